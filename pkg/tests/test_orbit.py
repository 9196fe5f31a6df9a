import math
import warnings

import numpy as np
import pytest

from bwshift.core import BilateralVector, SignedLog
from bwshift.dynamics import Status
from bwshift.errors import EdgeDominated, WindowTooSmall
from bwshift.orbit import (OrbitRecord, check_divergent_subspace, detect_limit_point, schedule_steps,
                           simulate_orbit, zero_one_closed_form, zero_one_vector)
from bwshift.shiftmatrix import apply

import oracle
from conftest import classical


def test_schedule():
    assert schedule_steps(16, "powers_of_two") == [1, 2, 4, 8, 16]
    assert schedule_steps(3) == [1, 2, 3]
    with pytest.raises(ValueError):
        schedule_steps(3, "odd")


def test_closed_form_values():
    assert zero_one_closed_form(1) == pytest.approx(2 ** -4 + 2 ** -12 + 2 ** -28 + 2 ** -60, rel=1e-15)
    assert zero_one_closed_form(5) == 0.0
    vals = [zero_one_closed_form(k) for k in range(1, 5)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_zero_one_first_step_matches_closed_form(zero_one):
    u = zero_one_vector(zero_one.window)
    e0 = BilateralVector.unit(0, zero_one.window)
    recs = simulate_orbit(zero_one, u, 2, [e0], "powers_of_two")
    # at nu = 2 the leading term lands exactly on e_0
    assert recs[1].distances[0] ** 2 == pytest.approx(zero_one_closed_form(1), abs=1e-12)


def test_orbit_iterates_match_oracle(zero_one):
    u = zero_one_vector(zero_one.window)
    lo = zero_one.window[0]
    for nu in (1, 2, 4, 8):
        x = apply(zero_one, nu, u)
        ref = oracle.shift_apply(u.coeffs, lo, nu, zero_one.a, zero_one.b, zero_one.w)
        keep = ~x.taint_mask()
        assert np.allclose(x.coeffs[keep], ref[keep], rtol=1e-12, atol=1e-12 * np.max(np.abs(ref)))


def test_orbit_records_norms(chaotic):
    v = BilateralVector.unit(3, chaotic.window)
    recs = simulate_orbit(chaotic, v, 5)
    assert [r.step for r in recs] == [1, 2, 3, 4, 5]
    assert len(recs[0].distances) == 5
    assert all(isinstance(r.norm, SignedLog) for r in recs)


def test_window_too_small(zero_one):
    v = BilateralVector.unit(-60, zero_one.window)
    with pytest.raises(WindowTooSmall):
        simulate_orbit(zero_one, v, 8)


def test_edge_dominated_warning():
    cfg = classical("2", window=(-10, 10))
    v = BilateralVector.unit(-9, (-10, 10))
    with pytest.warns(EdgeDominated):
        recs = simulate_orbit(cfg, v, 1)
    assert recs[0].edge_dominated


def _records(dists):
    return [OrbitRecord(i + 1, SignedLog.from_real(1.0), [d]) for i, d in enumerate(dists)]


def test_detect_limit_point_suffix_rule():
    assert detect_limit_point(_records([1, 0.5, 1e-4, 1e-5, 1e-6]))[0].detected
    # below the tolerance three times, then back out
    rep = detect_limit_point(_records([1e-4, 1e-4, 1e-4, 1.0]))[0]
    assert not rep.detected and rep.hits == [1, 2, 3]
    with pytest.raises(ValueError):
        detect_limit_point(_records([1, 2]))
    with pytest.raises(ValueError):
        detect_limit_point(_records([1, 2, 3]), candidates=[BilateralVector.zeros((-2, 2))])


def test_divergent_subspace_zero_one(zero_one):
    reps = check_divergent_subspace(zero_one, range(0, 5), steps=24)
    for r in reps:
        assert r.status is Status.HOLDS
        assert np.allclose(r.norms, r.exact, rtol=1e-10)


def test_divergent_subspace_chaotic_decreasing(chaotic):
    rep = check_divergent_subspace(chaotic, [0], steps=24)[0]
    assert rep.status is Status.FAILS


def test_divergent_subspace_window(zero_one):
    with pytest.raises(WindowTooSmall):
        check_divergent_subspace(zero_one, [0], steps=100)
