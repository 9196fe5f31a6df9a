import math

import numpy as np
import pytest

from bwshift.basis import laurent_from_schauder, schauder_from_laurent
from bwshift.core import Basis, BasisVariant, BilateralVector
from bwshift.errors import WrongBasis
from bwshift.shiftmatrix import (A_coefficient, C_coefficient, apply, apply_iterated, assemble_matrix,
                                 c_coefficient, decompose, essential_spectrum_estimate)

import oracle
from conftest import classical, random_config


def test_c_coefficients_zero_one(zero_one):
    # w = 2, a = 1 and b = 1/2 for n >= 0: c_0 = 2 * 1/2 - 0 = 1, c_n = 0 for n >= 1
    assert c_coefficient(0, zero_one) == 1.0
    assert [c_coefficient(n, zero_one) for n in (1, 2, 10)] == [0.0, 0.0, 0.0]
    assert c_coefficient(-3, zero_one) == 0.0


def test_matrix_entries_zero_one(zero_one):
    m = assemble_matrix(zero_one, 1, (-6, 6))
    # negative columns are pure shifts: A_{n,1} = w_n a_n / a_{n-1} = 2 * 2^n / 2^(n-1) = 4
    assert m.entry(-3, -2) == 4.0
    # column 0: row -1 holds A_{0,1} = w_0 a_0 / a_{-1} = 2 * 1 / (1/2)
    assert m.entry(-1, 0) == 4.0
    # column 0: diagonal carries C_{0,1} = 1, then the expansion of z^1
    assert [m.entry(r, 0) for r in range(0, 4)] == pytest.approx([1.0, -0.5, 0.25, -0.125], rel=1e-15)
    # positive columns: A_{n,1} = 2 and no C part
    assert m.diagonal(1)[3] == 2.0 and m.entry(3, 3) == 0.0


def test_matrix_entry_chaotic(chaotic):
    # column 0, row -1: w_0 a_0 / a_{-1} = 2 / (-2^-3)
    assert assemble_matrix(chaotic, 1, (-4, 4)).entry(-1, 0) == pytest.approx(-16.0, rel=1e-15)


def test_A_C_match_matrix(chaotic):
    for nu in (1, 3):
        m = assemble_matrix(chaotic, nu, (-10, 10))
        for n in range(-10 + nu, 11):
            assert m.entry(n - nu, n) == pytest.approx(A_coefficient(n, nu, chaotic).to_real(), rel=1e-13)
        for n in range(-10 + nu - 1, 11):
            assert m.entry(n - nu + 1, n) == pytest.approx(C_coefficient(n, nu, chaotic).to_real(),
                                                           rel=1e-13, abs=1e-300)


def test_matrix_csv(zero_one):
    csv = assemble_matrix(zero_one, 1, (-1, 1)).to_csv()
    assert csv.splitlines()[0] == "row,-1,0,1"
    assert csv.splitlines()[1] == "-1,0,4,0"


def test_power_matches_matrix_power(chaotic):
    w = (-12, 12)
    M1 = assemble_matrix(chaotic, 1, (-30, 30)).entries
    M3 = assemble_matrix(chaotic, 3, w).entries
    P = np.linalg.matrix_power(M1, 3)[18:43, 18:43]
    # interior block, far from both window edges of the big matrix
    assert np.allclose(M3, P, rtol=1e-12, atol=1e-12)


def test_apply_vs_iterated_and_oracle():
    rng = np.random.default_rng(11)
    for variant in BasisVariant:
        for _ in range(15):
            cfg = random_config(rng, variant=variant)
            lo, hi = cfg.window
            v = BilateralVector(lo, rng.normal(size=hi - lo + 1))
            nu = int(rng.integers(1, 6))
            x = apply(cfg, nu, v)
            y = apply_iterated(cfg, nu, v)
            keep = ~x.taint_mask()
            scale = np.max(np.abs(y.coeffs[keep]))
            assert np.max(np.abs(x.coeffs[keep] - y.coeffs[keep])) <= 1e-9 * scale
            ref = oracle.shift_apply(v.coeffs, lo, nu, cfg.a, cfg.b, cfg.w)
            assert np.max(np.abs(x.coeffs[keep] - ref[keep])) <= 1e-9 * scale


def test_apply_taints_edges(chaotic):
    v = BilateralVector.unit(0, (-10, 10))
    x = apply(chaotic, 3, v)
    mask = x.taint_mask()
    assert mask.sum() == 6 and mask[0] and mask[-1] and not mask[10]
    with pytest.raises(WrongBasis):
        apply(chaotic, 1, BilateralVector.unit(0, (-10, 10), Basis.LAURENT))


def test_adjoint_law():
    rng = np.random.default_rng(12)
    for variant in BasisVariant:
        for _ in range(15):
            cfg = random_config(rng, variant=variant)
            lo, hi = cfg.window
            v = BilateralVector(lo, rng.normal(size=hi - lo + 1))
            hv = laurent_from_schauder(v, cfg)
            hb = laurent_from_schauder(apply(cfg, 1, v), cfg)
            for n in range(lo + 2, hi - 2):
                assert abs(hb[n] - cfg.w(n + 1) * hv[n + 1]) <= 1e-12 * max(1.0, abs(hv[n + 1]))


def test_multiplication_by_two_over_z(zero_one):
    w = zero_one.window
    for nu in range(-20, 21):
        g = schauder_from_laurent(BilateralVector.unit(nu, w, Basis.LAURENT), zero_one)
        hat = laurent_from_schauder(apply(zero_one, 1, g), zero_one)
        assert hat[nu - 1] == pytest.approx(2.0, abs=1e-12)
        others = [hat[m] for m in range(-40, 41) if m != nu - 1]
        assert max(abs(x) for x in others) <= 1e-12


def test_decomposition_reassembles(presets):
    for name, exp in presets.items():
        cfg = exp.shift
        dec = decompose(cfg)
        M = assemble_matrix(cfg, 1).entries
        assert np.max(np.abs(dec.reassemble() - M)) <= 1e-12, name


def test_decomposition_zero_one(zero_one):
    dec = decompose(zero_one, i_max=60)
    assert dec.T_norms[0] == 0.5
    assert list(dec.T_norms[:5]) == pytest.approx([0.5, 0.25, 0.125, 0.0625, 0.03125], rel=1e-15)
    ps = dec.partial_sums()
    assert ps[-1] == pytest.approx(1.0, abs=1e-12)
    assert dec.tail_bound <= 1e-12
    assert dec.compact == "Holds"


def test_decomposition_classical_no_perturbation():
    dec = decompose(classical("2"))
    assert not np.any(dec.c) and dec.tail_bound == 0.0
    assert np.all(dec.alpha == 2.0)


def test_essential_spectrum():
    es = essential_spectrum_estimate(decompose(classical("2")))
    assert es.inner == pytest.approx(2.0, rel=1e-14) and es.outer == pytest.approx(2.0, rel=1e-14)
    assert not es.meets_unit_circle
    es = essential_spectrum_estimate(decompose(classical("1")))
    assert es.meets_unit_circle and es.status == "Holds"


def test_essential_spectrum_zero_one(zero_one):
    es = essential_spectrum_estimate(decompose(zero_one))
    # alpha_n = 4 for n <= -1 and 2 for n >= 0
    assert es.inner == pytest.approx(2.0) and es.outer == pytest.approx(4.0)
    assert not es.meets_unit_circle
    assert es.convergence[-1][0] == es.block
