"""A finite probability space where every projection is exact.

All the limit statements about martingale increments have finite
shadows: on 2^V equally likely sign patterns, conditional expectations
are plain group averages and can be checked to machine precision.  The
model below carries one observable built from a base-9 digit register
and a single coupled sign.  Its martingale increment norms follow the
geometric pattern 9^-(k+1), the completed sum of norms lands exactly 1/8
above the far-past norm at every depth, and the projection on the remote
past is twice the coupled sign, not zero.
"""

import numpy as np

from mgapprox import (
    ExactModel,
    conditional_expectation,
    conditioning_up_to,
    decode_digit_value,
    digit_value,
    hannan_sum,
    martingale_difference_norms,
    remote_past_projection,
)

DEPTH = 3


def main():
    model = ExactModel.build(DEPTH)
    v = len(model.labels)
    print(f"depth {DEPTH}: {v} carriers, {2**v} states")
    print(f"digit register range: [{model.digit.min():.6f}, {model.digit.max():.6f}]")
    print(f"observable mean = {model.observable.mean():+.3e}")

    print("\nmartingale increment norms (step k conditions on times <= k):")
    norms = martingale_difference_norms(model)
    for k in sorted(norms):
        tag = ""
        if 0 <= k < DEPTH:
            tag = f"   = 9^-{k + 1}"
            assert abs(norms[k] - 9.0 ** -(k + 1)) < 1e-12
        print(f"  k = {k:+d}:  {norms[k]:.12f}{tag}")

    # Completed by its analytic tail, the sum of the norms sits exactly
    # 1/8 over the single norm at the far past whatever the depth.
    print("\ncompleted norm sum vs far-past norm:")
    for depth in (1, 2, 3, 4):
        m = ExactModel.build(depth)
        root = martingale_difference_norms(m)[-1]
        total = hannan_sum(m)
        print(f"  depth {depth}: sum = {total:.12f}, root + 1/8 = {root + 0.125:.12f}")
        assert abs(total - (root + 0.125)) < 1e-12

    proj = remote_past_projection(model)
    e0 = model.column(("e", 0))
    print(f"\nremote past projection: norm = {proj.norm:.6f}, "
          f"equals 2 e_0: {bool(np.allclose(proj.values, 2.0 * e0))}")
    assert proj.matches_two_e0 and not proj.matches_e0

    # Tower property, exact: project onto a coarse algebra after a fine one.
    fine = conditional_expectation(model, model.observable, conditioning_up_to(model, 2))
    coarse = conditional_expectation(model, fine, conditioning_up_to(model, 0))
    direct = conditional_expectation(model, model.observable, conditioning_up_to(model, 0))
    print(f"tower property max |dev| = {np.abs(coarse - direct).max():.3e}")

    # The digit register is a perfect code: signs in, signs out.
    signs = {("e", 1): 1, ("e", -1): -1, ("e", 2): -1, ("e", -2): 1,
             ("e", 3): 1, ("e", -3): -1}
    value = digit_value(signs, DEPTH)
    assert decode_digit_value(value, DEPTH) == signs
    print(f"digit round trip ok, value = {value:.15f}")


if __name__ == "__main__":
    main()
