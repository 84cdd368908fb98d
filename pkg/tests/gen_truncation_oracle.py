"""Regenerate the frozen truncation-oracle table in test_acceptance.py.

The oracle evaluates the weight-kernel integral for f = 1 without the
singularity-removing substitution: high-precision tanh-sinh quadrature of
s^(alpha-1) on the truncated range [eps, d], at eps = 1e-12 and 2e-12.
The known eps^alpha deficit is then eliminated exactly by one Richardson
step, which realises the eps -> 0 limit:

    L = (2^alpha * I(1e-12) - I(2e-12)) / (2^alpha - 1)

Run:  python3 tests/gen_truncation_oracle.py
"""

ALPHAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
SPANS = [1e-3, 1.0, 10.0]
EPS = 1e-12


def main() -> None:
    import mpmath as mp

    mp.mp.dps = 30
    print("TRUNCATION_ORACLE = {")
    for alpha in ALPHAS:
        al = mp.mpf(repr(alpha))
        for d in SPANS:
            dd = mp.mpf(repr(d))

            def kernel(s, _al=al):
                return s ** (_al - 1)

            i1 = mp.quad(kernel, [mp.mpf(repr(EPS)), dd])
            i2 = mp.quad(kernel, [mp.mpf(repr(2 * EPS)), dd])
            w = mp.mpf(2) ** al
            limit = (w * i1 - i2) / (w - 1)
            print(f"    ({alpha!r}, {d!r}): {mp.nstr(limit, 17)},")
    print("}")


if __name__ == "__main__":
    main()
