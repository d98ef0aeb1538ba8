"""Reference values for the critical-line signal, computed with mpmath.

Writes crates/core/tests/data/oracle_signal.json. Every number here comes
from mpmath's own algorithms (zetazero, siegelz, siegeltheta, nzeros, zeta),
not from the Rust code under test. Takes a few minutes on one core.

    python3 scripts/oracle_signal.py
"""
import json
import os
import sys
import time

import mpmath as mp
import numpy as np

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "data", "oracle_signal.json")
START = time.time()


def log(msg):
    print(f"[{time.time() - START:7.1f}s] {msg}", file=sys.stderr, flush=True)


def f(x):
    return float(x)


def s_of_t(t):
    t = mp.mpf(t)
    return mp.nzeros(t) - mp.siegeltheta(t) / mp.pi - 1


def s1_littlewood(t):
    # S1(T) = (1/pi) int_{1/2}^inf ln|zeta(s+iT)| ds - (1/pi) int_{1/2}^inf ln|zeta(s)| ds
    t = mp.mpf(t)
    edges = [0.5, 0.75, 1, 1.5, 2, 4, 8, mp.inf]
    a = mp.quad(lambda s: mp.log(abs(mp.zeta(mp.mpc(s, t)))), edges)
    b = mp.quad(lambda s: mp.log(abs(mp.zeta(s))), edges)
    return (a - b) / mp.pi


def cumulative(t, pieces, order=20):
    # fixed Gauss-Legendre on unit-width pieces; Z is entire, so this converges fast
    x, w = np.polynomial.legendre.leggauss(order)
    h = mp.mpf(t) / pieces
    total = mp.mpf(0)
    for i in range(pieces):
        mid = h * (i + mp.mpf(0.5))
        total += sum(wj * mp.siegelz(mid + h / 2 * xj) ** 2 for xj, wj in zip(x, w)) * h / 2
    return total


def main():
    out = {}
    mp.mp.dps = 30
    idx = [1, 2, 3, 10, 100, 1000]
    out["zero_index"] = idx
    out["zeros"] = [f(mp.zetazero(k).imag) for k in idx]
    log("zeros")
    ts = [14.0, 50.5, 100.3, 250.7, 499.9, 1000.1, 5000.2, 10000.3, 100000.7, 1000000.11]
    out["t"] = ts
    out["z"] = [f(mp.siegelz(t)) for t in ts]
    out["theta"] = [f(mp.siegeltheta(t)) for t in ts]
    log("Z and theta")
    s_ts = [50.5, 100.3, 1000.1, 10000.3]
    out["s_t"] = s_ts
    out["s"] = [f(s_of_t(t)) for t in s_ts]
    log("S")
    out["zeta_half"] = f(mp.zeta(0.5))
    mp.mp.dps = 20
    s1_ts = [100.3, 1000.1]
    out["s1_t"] = s1_ts
    out["s1"] = [f(s1_littlewood(t)) for t in s1_ts]
    log("S1")
    out["cumulative_t"] = [100.0, 500.0]
    out["cumulative"] = [f(cumulative(100, 100)), f(cumulative(500, 500))]
    log("cumulative")
    with open(OUT, "w") as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
