import math

import numpy as np
import pytest

from bwshift.basis import (annulus, coefficient_functional_bound, evaluate, laurent_from_schauder,
                           monomial_expansion, monomial_norm, monomial_norm_bound, schauder_from_laurent)
from bwshift.core import Basis, BasisVariant, BilateralVector, NormKind, vector_norm
from bwshift.errors import DivergentSeries, OutsideAnnulus, WindowExhausted, WrongBasis

import oracle
from conftest import classical, random_config, spec_config


def test_expansion_zero_one(zero_one):
    ex = monomial_expansion(3, zero_one)
    assert list(ex.coeffs[:5]) == [1.0, -0.5, 0.25, -0.125, 0.0625]
    assert ex.stop == "epsilon" and ex.rho == 0.5
    assert len(ex.coeffs) <= 56
    assert ex.tail_bound <= 1e-16
    neg = monomial_expansion(-2, zero_one)
    assert list(neg.coeffs) == [4.0] and neg.stop == "exact"


def test_expansion_classical():
    cfg = classical("1")
    for nu in (-5, 0, 7):
        ex = monomial_expansion(nu, cfg)
        assert list(ex.coeffs) == [1.0]


def test_expansion_window_exhausted():
    # |b_n / a_{n+1}| = 1 everywhere: no geometric bound
    cfg = spec_config([("otherwise", "1")], [("otherwise", "1")], [("otherwise", "1")], window=(-10, 10))
    with pytest.raises(WindowExhausted):
        monomial_expansion(0, cfg)


def test_norm_examples(zero_one):
    for nu in range(0, 5):
        assert monomial_norm(nu, zero_one).value ** 2 == pytest.approx(4 / 3, rel=1e-15)
    assert monomial_norm(-3, zero_one).value == pytest.approx(8.0, rel=1e-15)
    assert monomial_norm(5, classical("1")).value == 1.0


def test_norm_c0(chaotic):
    c0 = chaotic.with_params(norm_kind=NormKind.C0)
    # z^0 = f_0 - b_0/a_1 f_1 + ...; the largest coefficient is 1
    assert monomial_norm(0, c0).value == 1.0


def test_norm_divergent():
    # |b_n / a_{n+1}| = 2: the expansion grows
    cfg = spec_config([("otherwise", "1")], [("otherwise", "2")], [("otherwise", "1")], window=(-10, 10))
    with pytest.raises(DivergentSeries):
        monomial_norm(0, cfg)
    res = monomial_norm(0, cfg, strict=False)
    assert not res.member and res.value == math.inf


def test_norm_matches_expansion_vector():
    rng = np.random.default_rng(3)
    for _ in range(20):
        cfg = random_config(rng, p=float(rng.uniform(1, 4)))
        nu = int(rng.integers(-10, 10))
        ex = monomial_expansion(nu, cfg, limit=cfg.window[1] + 150)
        direct = vector_norm(ex.as_vector((nu, nu + len(ex.coeffs))), cfg.params)
        assert monomial_norm(nu, cfg).value == pytest.approx(direct, rel=1e-10)


def test_norm_bound_from_rho():
    rng = np.random.default_rng(4)
    for _ in range(20):
        cfg = random_config(rng, rho=0.5)
        for nu in range(-5, 6):
            assert monomial_norm(nu, cfg).value <= monomial_norm_bound(nu, cfg, 0.5) * (1 + 1e-12)


def test_laurent_examples(zero_one):
    w = zero_one.window
    e0 = BilateralVector.unit(0, w)
    hat = laurent_from_schauder(e0, zero_one)
    assert hat[0] == 1.0 and hat[1] == 0.5 and hat.window == (w[0], w[1] + 1)
    em1 = laurent_from_schauder(BilateralVector.unit(-1, w), zero_one)
    assert em1.to_mapping() == {-1: 0.5}
    v = BilateralVector.from_mapping({0: 1, 1: 1}, w)
    assert laurent_from_schauder(v, zero_one).to_mapping() == {0: 1.0, 1: 1.5, 2: 0.5}


def test_full_affine_e0_round_trip(zero_one):
    full = zero_one.with_params(basis_variant=BasisVariant.FULL)
    w = full.window
    hat = BilateralVector.from_mapping({0: full.a(0), 1: full.b(0)}, w, Basis.LAURENT)
    back = schauder_from_laurent(hat, full)
    assert back[0] == pytest.approx(1.0, rel=1e-15)
    rest = np.delete(back.coeffs, -back.n_min)
    assert np.max(np.abs(rest)) <= 1e-15


def test_wrong_basis(zero_one):
    w = zero_one.window
    with pytest.raises(WrongBasis):
        laurent_from_schauder(BilateralVector.unit(0, w, Basis.LAURENT), zero_one)
    with pytest.raises(WrongBasis):
        schauder_from_laurent(BilateralVector.unit(0, w), zero_one)


def test_round_trips_random():
    rng = np.random.default_rng(5)
    for variant in BasisVariant:
        for _ in range(20):
            cfg = random_config(rng, variant=variant)
            lo, hi = cfg.window
            lam = np.zeros(hi - lo + 1)
            lam[10:-10] = rng.normal(size=hi - lo + 1 - 20)
            v = BilateralVector(lo, lam)
            hat = laurent_from_schauder(v, cfg)
            back = schauder_from_laurent(hat, cfg, window=v.window)
            assert np.max(np.abs(back.coeffs - lam)) <= 1e-12 * max(1.0, np.max(np.abs(lam)))
            # and against the forward-substitution oracle
            ref = oracle.schauder(hat.coeffs, lo, cfg.a, cfg.b, len(lam))
            assert np.allclose(back.coeffs, ref, rtol=0, atol=1e-12 * np.max(np.abs(lam)))


def test_coefficient_identity_and_holder():
    rng = np.random.default_rng(6)
    for _ in range(20):
        cfg = random_config(rng, p=float(rng.uniform(1, 4)))
        lo, hi = cfg.window
        v = BilateralVector(lo, rng.normal(size=hi - lo + 1))
        hat = laurent_from_schauder(v, cfg)
        nv = vector_norm(v, cfg.params)
        for n in range(lo + 1, hi + 1):
            assert hat[n] == cfg.a(n) * v[n] + cfg.b(n - 1) * v[n - 1]
            assert abs(hat[n]) <= coefficient_functional_bound(n, cfg) * nv * (1 + 1e-12)


def test_coefficient_functional_bound_examples(zero_one, chaotic):
    assert coefficient_functional_bound(1, zero_one) == pytest.approx(math.sqrt(1.25))
    assert coefficient_functional_bound(3, classical("1")) == 1.0
    c0 = chaotic.with_params(norm_kind=NormKind.C0)
    assert coefficient_functional_bound(2, c0) == 2.0
    p1 = chaotic.with_params(p=1.0)
    assert coefficient_functional_bound(2, p1) == 1.0


def test_evaluate(zero_one):
    w = zero_one.window
    assert evaluate(BilateralVector.unit(-1, w), 0.75, zero_one) == pytest.approx(2 / 3)
    assert evaluate(BilateralVector.zeros(w), 0.75, zero_one) == 0
    full = zero_one.with_params(basis_variant=BasisVariant.FULL)
    assert evaluate(BilateralVector.unit(0, w), 0.75, full, radii=(0.5, 1.0)) == pytest.approx(1 + 0.75 * 0.5)
    with pytest.raises(OutsideAnnulus):
        evaluate(BilateralVector.unit(0, w), 0.25, zero_one)
    r, R = annulus(zero_one)
    assert abs(r - 0.5) < 1e-6 and abs(R - 1.0) < 1e-6


def test_evaluate_laurent_agrees_with_schauder(zero_one):
    rng = np.random.default_rng(7)
    w = zero_one.window
    lam = np.zeros(w[1] - w[0] + 1)
    lam[60:70] = rng.normal(size=10)
    v = BilateralVector(w[0], lam)
    z = 0.8 * np.exp(0.3j)
    assert evaluate(v, z, zero_one) == pytest.approx(evaluate(laurent_from_schauder(v, zero_one), z, zero_one))
