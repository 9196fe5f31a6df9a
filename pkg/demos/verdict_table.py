"""Verdicts for every bundled preset at horizon 48."""

from bwshift.config import PRESETS, load_preset
from bwshift.dynamics import REPORT_KEYS, analyze, statuses


def main():
    short = [k[:12] for k in REPORT_KEYS]
    print(f"{'preset':26s}" + "".join(f"{k:>14s}" for k in short))
    for name in PRESETS:
        exp = load_preset(name)
        s = statuses(analyze(exp.shift, exp.horizon, exp.n_max, exp.thresholds))
        print(f"{name:26s}" + "".join(f"{str(s[k]):>14s}" for k in REPORT_KEYS))


if __name__ == "__main__":
    main()
