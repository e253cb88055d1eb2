"""Coefficients of the singular inner function with one boundary atom.

The Taylor coefficients of exp(-a (1 + z) / (1 - z)) form an orthonormal
row when read as a moving-average kernel: total mass 1, autocorrelation
delta at lag zero.  Their partial sums A_n oscillate forever, but the
Cesaro means M_n die out, so the best scalar approximation of the window
sums drifts to zero and the normalized gap climbs to its ceiling.  This
script walks through all three facts at a = 1.
"""

import numpy as np

from mgapprox import (
    approximation_gap,
    autocorrelation,
    best_scalar_gap,
    cesaro_profile,
    coefficient_decay_diagnostics,
    newman_shapiro_main_term,
    singular_inner_coeffs,
)

A = 1.0
ORDER = 10**4


def main():
    s = singular_inner_coeffs(A, ORDER)
    mass = autocorrelation(s, 0)
    print(f"stored coefficients: {s.order + 1}")
    print(f"sum a_k^2           = {mass:.15f}  (tail bound {s.tail_mass_bound:.3e})")
    print(f"sum a_k a_(k+7)     = {autocorrelation(s, 7):+.3e}")
    assert abs(mass - 1.0) <= s.tail_mass_bound

    # The oscillatory main term pins down both the n^(-3/4) envelope and
    # the cos(2 sqrt(2 a n) + pi/4) phase.
    print("\n   n        a_n           main term      ratio")
    for n in (100, 400, 1600, 6400):
        main_term = newman_shapiro_main_term(A, n)
        ratio = s.coeffs[n] / main_term if main_term != 0.0 else np.inf
        print(f"{n:6d}  {s.coeffs[n]:+.6e}  {main_term:+.6e}  {ratio:8.4f}")

    diag = coefficient_decay_diagnostics(s)
    envelope = (2.0 * A) ** 0.25 / np.sqrt(np.pi) * diag.arg_max ** 0.25
    print(f"\nmax n |a_n| = {diag.max_weighted:.4f} at n = {diag.arg_max}")
    print(f"envelope (2a)^(1/4) n^(1/4) / sqrt(pi) there = {envelope:.4f}")
    print("the weighted size keeps growing like n^(1/4), it is not bounded")

    prof = cesaro_profile(s)
    print("\n    n        A_n          M_n")
    for n in (10, 100, 1000, 10000):
        print(f"{n:6d}  {prof.partial_sums[n - 1]:+.6f}  {prof.cesaro_means[n - 1]:+.6f}")
    assert abs(prof.cesaro_means[-1]) < 0.02

    # Orthonormal rows make the window norm exactly n, so the normalized
    # gap at scalar c is 1 + c^2 - 2 c M-like cross term.  As the means
    # die out no scalar helps: the minimal gap tends to the full norm.
    print("\n    n     c*           min gap^2   gap^2 at c=1")
    for n in (10, 100, 1000, 10000):
        best = best_scalar_gap(s, n)
        at_one = approximation_gap(s, 1.0, n)
        print(f"{n:6d}  {best.c_star:+.6f}   {best.min_gap_sq:.6f}    {at_one.gap_sq:.6f}")
    assert best_scalar_gap(s, 10000).min_gap_sq > 0.9


if __name__ == "__main__":
    main()
