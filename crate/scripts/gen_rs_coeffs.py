"""Power-series coefficients of the Riemann-Siegel correction terms C0..C4.

Psi(p) = cos(2*pi*(p^2 - p - 1/16)) / cos(2*pi*p) is entire; its Taylor
coefficients about p = 1/2 are computed by a trapezoid Cauchy integral at
high precision, then combined into C_k(p) and re-expanded in z = 2p - 1.
Prints a Rust table.
"""
import mpmath as mp

mp.mp.dps = 80
DEG = 90          # Taylor degree kept for Psi
M = 512           # contour points
R = mp.mpf(1)     # contour radius in u = p - 1/2


def psi(p):
    return mp.cos(2 * mp.pi * (p * p - p - mp.mpf(1) / 16)) / mp.cos(2 * mp.pi * p)


def taylor_psi():
    vals = []
    for j in range(M):
        u = R * mp.expjpi(mp.mpf(2 * j) / M)
        vals.append(psi(mp.mpf(1) / 2 + u))
    coeffs = []
    for m in range(DEG + 13):
        s = mp.mpf(0)
        for j in range(M):
            s += vals[j] * mp.expjpi(-mp.mpf(2 * j * m) / M)
        coeffs.append(mp.re(s) / M / R**m)
    return coeffs


def deriv(coeffs, r):
    # coefficients (in u) of the r-th derivative
    out = []
    for m in range(r, len(coeffs)):
        out.append(coeffs[m] * mp.factorial(m) / mp.factorial(m - r))
    return out


def combo(coeffs, terms):
    n = DEG + 1
    acc = [mp.mpf(0)] * n
    for scale, r in terms:
        d = deriv(coeffs, r)
        for m in range(min(n, len(d))):
            acc[m] += scale * d[m]
    return acc


def main():
    a = taylor_psi()
    pi = mp.pi
    c = [
        combo(a, [(1, 0)]),
        combo(a, [(-1 / (96 * pi**2), 3)]),
        combo(a, [(1 / (64 * pi**2), 2), (1 / (18432 * pi**4), 6)]),
        combo(a, [(-1 / (64 * pi**2), 1), (-1 / (3840 * pi**4), 5), (-1 / (5308416 * pi**6), 9)]),
        combo(a, [(1 / (128 * pi**2), 0), (19 / (24576 * pi**4), 4), (11 / (5898240 * pi**6), 8),
                  (1 / (2038431744 * pi**8), 12)]),
    ]
    # re-expand in z = 2u
    tables = []
    for ck in c:
        zc = [ck[m] / mp.mpf(2)**m for m in range(len(ck))]
        last = max(i for i, v in enumerate(zc) if abs(v) > mp.mpf(10)**-21)
        tables.append(zc[: last + 1])
    return tables


if __name__ == "__main__":
    import sys
    tables = main()
    if len(sys.argv) > 1 and sys.argv[1] == "check":
        for t in [100, 1000, 12345.678, 1e6]:
            t = mp.mpf(t)
            a = mp.sqrt(t / (2 * mp.pi))
            n = int(mp.floor(a))
            p = a - n
            z = 2 * p - 1
            th = mp.siegeltheta(t)
            main_sum = 2 * sum(mp.cos(th - t * mp.log(k)) / mp.sqrt(k) for k in range(1, n + 1))
            ref = mp.siegelz(t)
            acc = mp.mpf(0)
            errs = []
            for k, tab in enumerate(tables):
                ck = sum(tab[m] * z**m for m in range(len(tab)))
                acc += ck * (t / (2 * mp.pi)) ** (-mp.mpf(k) / 2)
                val = main_sum + (-1) ** (n - 1) * (t / (2 * mp.pi)) ** (-mp.mpf(1) / 4) * acc
                errs.append(mp.nstr(abs(val - ref), 3))
            print(float(t), errs)
    else:
        for k, tab in enumerate(tables):
            print(f"const C{k}: [f64; {len(tab)}] = [")
            for v in tab:
                if abs(v) < mp.mpf(10)**-40:
                    print("    0.0,")
                else:
                    print(f"    {mp.nstr(v, 20, strip_zeros=False, min_fixed=-1, max_fixed=-1)},")
            print("];")
