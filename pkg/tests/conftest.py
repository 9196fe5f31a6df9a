import numpy as np
import pytest

from bwshift.config import PRESETS, load_preset
from bwshift.core import BasisVariant, ShiftConfig, SpaceParams
from bwshift.seqexpr import SequenceSpec

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def spec_config(a, b, w, default_zero=True, **params):
    """ShiftConfig from piece lists like [("n>=0", "1"), ...]."""
    return ShiftConfig(SequenceSpec.from_pieces(a, name="a"),
                       SequenceSpec.from_pieces(b, default_zero=default_zero, name="b"),
                       SequenceSpec.from_pieces(w, name="w"),
                       SpaceParams(**params))


def classical(w="2", **params):
    return spec_config([("otherwise", "1")], [("otherwise", "0")], [("otherwise", w)], **params)


def random_config(rng, window=(-40, 40), rho=0.5, variant=BasisVariant.SPLIT, p=2.0, pad=200):
    """Random a, b, w tabulated around the window with |b_n / a_{n+1}| <= rho."""
    lo, hi = window
    idx = np.arange(lo - pad, hi + pad + 1)
    sgn = lambda: rng.choice([-1.0, 1.0], size=idx.size)
    a = rng.uniform(0.5, 2.0, idx.size) * sgn()
    w = rng.uniform(0.5, 2.0, idx.size) * sgn()
    b = np.empty(idx.size)
    b[:-1] = a[1:] * rng.uniform(-rho, rho, idx.size - 1)
    b[-1] = 0.0
    off = idx[0]

    def table(arr, default):
        return lambda n: float(arr[n - off]) if idx[0] <= n <= idx[-1] else default

    return ShiftConfig(table(a, 1.0), table(b, 0.0), table(w, 1.0),
                       SpaceParams(p=p, basis_variant=variant, window=window))


@pytest.fixture(scope="session")
def presets():
    return {name: load_preset(name) for name in PRESETS}


@pytest.fixture(scope="session")
def zero_one(presets):
    return presets["zero_one_failure"].shift


@pytest.fixture(scope="session")
def chaotic(presets):
    return presets["example_chaotic"].shift
