"""Orbit of u = sum_k 2^{-2^k} f_{2^k} under B_w = multiplication by 2/z.

Prints the squared distance to e_0 at powers of two next to the closed form
that keeps only the terms j > k. The terms j < k land on negative indices
with coefficients 2^{2^{k+1} - 2^{j+1}}, so the distance grows instead.
"""

import warnings

from bwshift.config import load_preset
from bwshift.core import BilateralVector
from bwshift.errors import EdgeDominated
from bwshift.orbit import simulate_orbit, zero_one_closed_form, zero_one_vector
from bwshift.shiftmatrix import apply


def main():
    cfg = load_preset("zero_one_failure").shift
    u = zero_one_vector(cfg.window, 5)
    e0 = BilateralVector.unit(0, cfg.window)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EdgeDominated)
        recs = simulate_orbit(cfg, u, 16, [e0], "powers_of_two")
    print(f"{'nu':>4s} {'dist^2 to e0':>14s} {'tail-only form':>16s}")
    for r in recs[1:]:
        k = r.step.bit_length() - 1
        print(f"{r.step:4d} {r.distances[0] ** 2:14.6g} {zero_one_closed_form(k):16.6g}")
    x = apply(cfg, 4, u)
    print("B^4 u on indices -3..1:", [round(x[n], 6) for n in range(-3, 2)])


if __name__ == "__main__":
    main()
