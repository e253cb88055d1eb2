"""Two residual rates for one layered process.

The construction stacks independent two-sided levels whose scales are
synthesized so that level k only starts to matter past its horizon
phi(k).  Conditioning on the innovations shifted by the lag n keeps the
squared residual of the window sum bounded (the saturated ceiling is
zeta(2)/4), while conditioning on the natural coordinates at time zero
forces the residual above n b(n)^2 along the horizon ladder, where b is
the prescribed decay rule.  One process, two filtrations, two rates.
"""

import math

from mgapprox import (
    inv_sqrt_log_rule,
    residual_norm_sq_lagged,
    residual_norm_sq_natural,
    synthesize_layer_params,
)

K = 8


def main():
    rule = inv_sqrt_log_rule()
    params = synthesize_layer_params(rule, K)

    print("level ladder (p_k = 1/k, rho_k = 1/sqrt(8 phi_k)):")
    print("  k    phi_k    rho_k       b(phi_k)")
    for k in range(K):
        print(f"  {k + 1}  {params.phi[k]:7d}   {params.rho[k]:.6f}   {params.b_at_phi[k]:.6f}")

    ceiling = math.pi**2 / 24.0
    print(f"\nlagged residual, ceiling zeta(2)/4 = {ceiling:.6f}:")
    print("      n       residual^2   ceiling used")
    for e in range(7):
        n = 10**e
        r = residual_norm_sq_lagged(params, n)
        assert r <= ceiling + 1e-12
        print(f"  {n:8d}   {r:10.6f}   {r / ceiling:8.1%}")

    print("\nnatural residual against the floor n b(n)^2 at the horizons:")
    print("      n       residual^2    n b(n)^2     ratio")
    for n in params.phi:
        r = residual_norm_sq_natural(params, int(n))
        floor = n * rule(int(n)) ** 2
        assert r >= floor
        print(f"  {n:8d}   {r:10.4f}   {floor:10.4f}   {r / floor:7.2f}")

    # The separation is the whole point: the lagged rate stalls at a
    # constant while the natural rate keeps climbing with the ladder.
    top = int(params.phi[-1])
    sep = residual_norm_sq_natural(params, top) / residual_norm_sq_lagged(params, top)
    print(f"\nnatural / lagged at n = {top}: {sep:.1f}")


if __name__ == "__main__":
    main()
