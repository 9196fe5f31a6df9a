"""Bergman weights: the weighted-shift part alpha_n and the essential spectrum estimate."""

from bwshift.config import load_preset
from bwshift.shiftmatrix import decompose, essential_spectrum_estimate


def main():
    cfg = load_preset("bergman").shift
    dec = decompose(cfg)
    lo = cfg.window[0]
    for n in (-4, -2, -1, 0, 1, 4, 16):
        print(f"alpha_{n:<3d} = {dec.alpha[n - lo]:.12f}")
    es = essential_spectrum_estimate(dec)
    print(f"compact perturbation: {dec.compact}")
    print(f"annulus estimate: {es.inner:.4f} <= |z| <= {es.outer:.4f}, meets circle: {es.meets_unit_circle}")
    for v, lo_r, hi_r in es.convergence:
        print(f"  block {v:3d}: [{lo_r:.4f}, {hi_r:.4f}]")
    # gamma_n / gamma_{n+1} -> 1 on the right and -> 4 on the left
    print(f"limits: alpha_n -> 4 as n -> +inf (alpha_64 = {dec.alpha[-1]:.4f}), "
          f"-> 1/2 as n -> -inf (alpha_-64 = {dec.alpha[0]:.4f})")


if __name__ == "__main__":
    main()
