import math

import numpy as np
import pytest

from bwshift.core import BilateralVector, NormKind
from bwshift.dynamics import (REPORT_KEYS, Status, Thresholds, analyze, check_boundedness, check_chaotic,
                              check_dichotomy_preconditions, check_hypercyclic, check_mixing,
                              check_supercyclic, statuses, summable, tends_to_infinity, tends_to_zero)
from bwshift.shiftmatrix import apply

from conftest import classical, spec_config

TH = Thresholds()
H = np.arange(1, 49)


# ------------------------------------------------------------ heuristics

def test_tends_to_infinity_calls():
    assert tends_to_infinity(H * math.log(2), TH).call == "diverges"
    assert tends_to_infinity(np.zeros(48), TH).call == "bounded"
    assert tends_to_infinity(-H * 0.1, TH).call == "bounded"
    # slow growth: log-rate 0.5 reaches ln 1e9 within another horizon
    c = tends_to_infinity(0.3 * H, TH)
    assert c.call == "diverges" and "projected" in c.how
    # oscillation with no trend is left open
    assert tends_to_infinity(np.sin(H), TH).call == "unknown"


def test_full_limit_needs_tail():
    # crosses once and falls back
    lns = np.where(H == 40, 30.0, 0.0) + np.where(H > 40, -5.0, 0.0)
    lns[-1] = 30.0
    assert tends_to_infinity(lns, TH, full_limit=False).call == "diverges"
    assert tends_to_infinity(lns, TH, full_limit=True).call != "diverges"


def test_certificate_confirmed_on_extension():
    lns = np.concatenate([np.zeros(48), np.arange(1, 49) * 1.0])
    c = tends_to_infinity(lns, TH, horizon=48)
    assert c.call == "unknown"
    assert tends_to_infinity(np.zeros(96), TH, horizon=48).call == "bounded"


def test_tends_to_zero_mirror():
    assert tends_to_zero(-H * 1.0, TH).call == "vanishes"
    assert tends_to_zero(np.zeros(48), TH).call == "bounded_below"


@pytest.mark.parametrize("power,call", [(-2.0, "converges"), (-1.5, "converges"), (-1.0, "diverges"),
                                        (-0.5, "diverges"), (0.0, "diverges")])
def test_summable_power_laws(power, call):
    got = summable(power * np.log(np.arange(1, 97)), TH).call
    if call == "diverges":
        assert got in ("diverges", "unknown")
        assert got != "converges"
    else:
        assert got == call


def test_summable_geometric_and_infinite():
    assert summable(-np.arange(1, 97) * 0.5, TH).call == "converges"
    assert summable(np.arange(1, 97) * 0.5, TH).call == "diverges"
    x = np.zeros(96)
    x[3] = math.inf
    assert summable(x, TH).call == "diverges"


# ----------------------------------------------------------------- presets

EXPECTED = {
    "example_chaotic": dict(boundedness="Holds", hypercyclic="Holds", mixing="Holds", supercyclic="Holds",
                            chaotic="Holds", hypercyclic_subspace=True),
    "example_supercyclic_only": dict(boundedness="Holds", hypercyclic="Fails", mixing="Fails",
                                     supercyclic="Holds", chaotic="Fails", hypercyclic_subspace=False),
    "bergman": dict(boundedness="Holds", hypercyclic="Holds", mixing="Holds", chaotic="Holds"),
    "zero_one_failure": dict(boundedness="Holds", hypercyclic="Fails", supercyclic="Fails",
                             dichotomy_preconditions="Fails", hypercyclic_subspace=False),
    "classical_rolewicz": dict(boundedness="Holds", hypercyclic="Fails", supercyclic="Fails",
                               chaotic="Fails"),
}


@pytest.fixture(scope="module")
def reports(presets):
    return {name: analyze(e.shift, e.horizon, e.n_max, e.thresholds) for name, e in presets.items()}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_preset_verdicts(reports, name):
    got = statuses(reports[name])
    for key, want in EXPECTED[name].items():
        assert got[key] == want, key


def test_report_shape(reports):
    for rep in reports.values():
        assert tuple(rep)[:len(REPORT_KEYS)] == REPORT_KEYS


def test_supercyclic_only_exact_certificate(reports):
    v = reports["example_supercyclic_only"]["hypercyclic"]
    forward = [e[1] for e in v["evidence"] if e[0].endswith("forward")]
    assert forward and all(f["call"] == "bounded" and f["peak_ln"] == 0.0 for f in forward)
    assert all("exactly constant" in f["how"] for f in forward)


def test_consistency_invariants(reports):
    for name, rep in reports.items():
        s = statuses(rep)
        if s["mixing"] == "Holds":
            assert s["hypercyclic"] == "Holds", name
        if s["hypercyclic"] == "Holds":
            assert s["supercyclic"] == "Holds", name
        if s["chaotic"] == "Holds":
            assert s["hypercyclic"] == "Holds", name
        if s["supercyclic"] == "Fails":
            assert s["hypercyclic"] == "Fails", name


def test_analyze_deterministic_across_threads(chaotic):
    a = analyze(chaotic, threads=1)
    b = analyze(chaotic, threads=4)
    assert a == b


# ------------------------------------------------------- constructed cases

def test_classical_half_dichotomy():
    cfg = classical("1/2")
    assert check_dichotomy_preconditions(cfg).status is Status.HOLDS
    assert check_hypercyclic(cfg).status is Status.FAILS


def test_dichotomy_property_iterates_vanish():
    cfg = classical("1/2")
    rng = np.random.default_rng(8)
    for _ in range(20):
        x = rng.normal(size=129)
        u = BilateralVector(-64, x / np.linalg.norm(x))
        y = apply(cfg, 48, u)
        assert np.max(np.abs(y.coeffs[~y.taint_mask()])) < 1e-6


def test_unbounded_weights_fail_boundedness():
    cfg = classical("abs(n)+1")
    assert check_boundedness(cfg).status is Status.FAILS


def _blocks(n):
    # w = 2 on [4^k, 2*4^k) and 1/2 on [2*4^k, 4^(k+1)), mirrored for n < 0
    m = abs(n)
    if m < 1:
        return 2.0
    k = int(math.log(m, 4))
    return 2.0 if m < 2 * 4 ** k else 0.5


def test_alternating_blocks_not_mixing():
    from bwshift.core import ShiftConfig
    from bwshift.seqexpr import SequenceSpec
    cfg = ShiftConfig(SequenceSpec.constant(1), SequenceSpec.constant(0), _blocks)
    for horizon in (48, 96):
        assert check_mixing(cfg, horizon=horizon).status is not Status.HOLDS


def test_two_sided_weights_mixing():
    # w = 2 on the right and 1/2 on the left: both product families blow up
    cfg = spec_config([("otherwise", "1")], [("otherwise", "0")], [("n>=0", "2"), ("n<=-1", "1/2")])
    assert check_mixing(cfg).status is Status.HOLDS


def test_hypothesis_violated_reason():
    cfg = spec_config([("otherwise", "1")], [("otherwise", "1")], [("otherwise", "1")], window=(-20, 20))
    v = check_hypercyclic(cfg)
    assert v.status is Status.INCONCLUSIVE and "HypothesisViolated" in v.reason


def test_chaos_scope_error(chaotic):
    for cfg in (chaotic.with_params(p=1.0), chaotic.with_params(norm_kind=NormKind.C0)):
        v = check_chaotic(cfg)
        assert v.status is Status.INCONCLUSIVE and "ScopeError" in v.reason


def test_supercyclic_zero_one_limsup(zero_one):
    v = check_supercyclic(zero_one)
    assert v.status is Status.FAILS
