"""Radial behaviour of finite Blaschke products with dyadic zeros.

A product over the zeros z_k = 1 - 2^(-k) vanishes at every z_k on the
radius yet stays uniformly large at the midpoints between consecutive
zeros: every factor there is floored either by 1/8 (its own and the next
zero) or by the universal constant from the convergent product over all
dyadic spacings.  This script evaluates those floors numerically and then
contrasts the coefficient decay of the rational product with the slow
oscillatory decay of the singular family.

The slowest factor of the 12-level product needs order around 7.5e4 to
resolve to 1e-8, so the expansion below (order 2^14) carries a small
unresolved tail and the library says so; the warning is shown on purpose.
"""

import warnings

import numpy as np

from mgapprox import (
    BlaschkeSpec,
    blaschke_eval_radial,
    blaschke_product_coeffs,
    coefficient_decay_diagnostics,
    dyadic_midpoint_report,
    dyadic_radial_limit_bound,
    singular_inner_coeffs,
)

LEVEL = 12
ORDER = 2**14


def main():
    c = dyadic_radial_limit_bound()
    print(f"universal dyadic floor c = {c:.17f}")

    spec = BlaschkeSpec.dyadic(LEVEL)
    print(f"\n{LEVEL}-level product, zeros 1 - 2^-k, exact values on the radius:")
    for k in (1, LEVEL // 2, LEVEL):
        print(f"  B(1 - 2^-{k:<2d}) = {blaschke_eval_radial(spec, 1.0 - 2.0 ** -k):+.3e}")

    print("\nmidpoint floors between consecutive zeros:")
    print(" level     r            |B(r)|      floor c^2/64")
    for level in (2, 5, 9, 12):
        rep = dyadic_midpoint_report(level, k_max=40)
        assert min(rep.p2, rep.p3) >= 1.0 / 8.0
        assert min(rep.p1, rep.p4) >= rep.c_bound
        print(f"  {level:4d}  {rep.r:.9f}   {rep.product:.6f}   {c * c / 64.0:.6f}")

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        series = blaschke_product_coeffs(spec, ORDER)
    print(f"\ncoefficients to order {ORDER}: mass = "
          f"{float(series.coeffs @ series.coeffs):.12f}, "
          f"tail bound {series.tail_mass_bound:.2e}")
    for w in caught:
        print(f"  library warning: {w.message}")

    # Rational symbol: geometric decay sets in once the slowest zero
    # resolves, so the weighted size n |a_n| peaks at an interior index.
    rational = coefficient_decay_diagnostics(series)
    singular = coefficient_decay_diagnostics(singular_inner_coeffs(1.0, ORDER))
    print("\nweighted decay max n |a_n|:")
    print(f"  Blaschke product : {rational.max_weighted:8.4f} at n = {rational.arg_max}"
          f"  (interior peak, order {ORDER})")
    print(f"  singular (a = 1) : {singular.max_weighted:8.4f} at n = {singular.arg_max}"
          f"  (still climbing at the truncation)")
    assert rational.arg_max < ORDER - 1000
    assert singular.arg_max > ORDER - 1000

    tail = np.abs(series.coeffs[ORDER - 512 :])
    print(f"  last 512 Blaschke coefficients are below {tail.max():.3e}")


if __name__ == "__main__":
    main()
