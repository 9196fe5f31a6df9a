"""Schauder basis f_n = (a_n + b_n z) z^n versus the monomials z^n.

Covers monomial expansions and norms, change of basis in both directions,
point evaluation on the annulus and bounds for the Laurent coefficient
functionals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (Basis, BasisVariant, BilateralVector, NormKind, ShiftConfig,
                   lp_norm)
from .errors import DivergentSeries, OutsideAnnulus, WindowExhausted, WrongBasis

EPS_TRUNC = 1e-16


@dataclass(frozen=True)
class MonomialExpansion:
    """Schauder coefficients of z^nu: ``coeffs[j]`` multiplies f_{nu+j}.

    ``leading`` is 1/a_nu, so ``coeffs[j] = leading * (-1)^j * prod b/a``.
    ``stop`` says why the list ends: "exact" (a zero factor or a single
    term), "epsilon" (terms fell below the cutoff) or "window".
    """

    nu: int
    leading: float
    coeffs: np.ndarray
    tail_bound: float
    stop: str
    rho: float

    @property
    def tail(self) -> np.ndarray:
        """Normalized tail coefficients (-1)^j prod b/a, j >= 1."""
        return self.coeffs[1:] / self.leading

    def as_vector(self, window) -> BilateralVector:
        lo, hi = window
        c = np.zeros(hi - lo + 1)
        for j, x in enumerate(self.coeffs):
            n = self.nu + j
            if lo <= n <= hi:
                c[n - lo] = x
        return BilateralVector(lo, c, Basis.SCHAUDER)


def _ratio_bound(cfg, lo, hi):
    """sup |b_m / a_{m+1}| over lo <= m <= hi (0 for an empty range)."""
    if hi < lo:
        return 0.0
    return max(abs(cfg.b(m) / cfg.a(m + 1)) for m in range(lo, hi + 1))


def monomial_expansion(nu: int, cfg: ShiftConfig, limit: int | None = None,
                       eps: float = EPS_TRUNC) -> MonomialExpansion:
    """Expand z^nu in the Schauder basis up to index ``limit``.

    The recursion multiplies by -b_m / a_{m+1} at each step. In the split
    variant every monomial with nu <= -1 is a single basis vector.
    """
    limit = cfg.window[1] if limit is None else int(limit)
    lead = 1.0 / cfg.a(nu)
    out = [lead]
    if cfg.params.basis_variant is BasisVariant.SPLIT and nu <= -1:
        return MonomialExpansion(nu, lead, np.array(out), 0.0, "exact", 0.0)
    x = lead
    m = nu
    stop = "window"
    while m + 1 <= limit:
        b = cfg.b(m)
        if b == 0.0:
            stop = "exact"
            break
        x = -x * b / cfg.a(m + 1)
        out.append(x)
        m += 1
        if abs(x) < eps * abs(lead):
            stop = "epsilon"
            break
    # geometric bound from the traversed ratios, favouring the last quarter
    span = len(out) - 1
    rho = _ratio_bound(cfg, nu + (3 * span) // 4, nu + span - 1) if span else 0.0
    if stop == "exact":
        tail = 0.0
    elif rho < 1.0:
        tail = abs(out[-1]) * rho / (1.0 - rho)
    elif stop == "epsilon":
        tail = abs(out[-1])
    else:
        raise WindowExhausted(nu, f"|b/a| ratio {rho:.3g} gives no geometric bound")
    return MonomialExpansion(nu, lead, np.array(out), tail, stop, rho)


@dataclass(frozen=True)
class MonomialNorm:
    nu: int
    value: float      # inf when not a member
    member: bool
    terms: int
    tail_bound: float


def monomial_norm(nu: int, cfg: ShiftConfig, strict: bool = True,
                  max_terms: int = 20000) -> MonomialNorm:
    """Closed-form norm of z^nu.

    For l^p this is ``|a_nu|^{-1} (1 + sum_k prod_{j<=k} |b_{nu+j}/a_{nu+j+1}|^p)^{1/p}``;
    for c0 the sum becomes a max. The series is summed in log space past the
    window edge until terms fall below machine precision, then closed with a
    geometric bound from the last ratios. A series that keeps growing raises
    DivergentSeries (or reports non-membership when ``strict`` is false).
    """
    par = cfg.params
    c0 = par.norm_kind is NormKind.C0
    p = 1.0 if c0 else par.p
    ln_lead = -math.log(abs(cfg.a(nu)))
    logs = [0.0]          # log of each product term's magnitude (to the p for l^p)
    if not (par.basis_variant is BasisVariant.SPLIT and nu <= -1):
        ln_prod = 0.0
        m = nu
        peak = 0.0
        while len(logs) < max_terms:
            b = cfg.b(m)
            if b == 0.0:
                break
            ln_prod += math.log(abs(b)) - math.log(abs(cfg.a(m + 1)))
            logs.append(p * ln_prod)
            peak = max(peak, logs[-1])
            m += 1
            if logs[-1] < peak + math.log(EPS_TRUNC) - 2.0 and len(logs) > 8:
                break
            if logs[-1] > 700.0:
                return _divergent(nu, len(logs), strict)
        else:
            return _divergent(nu, len(logs), strict)
    arr = np.array(logs)
    peak = arr.max()
    if c0:
        val = math.exp(ln_lead + peak)
        return MonomialNorm(nu, val, True, len(arr), 0.0)
    total = float(np.sum(np.exp(arr - peak)))
    # geometric closing bound from the last few ratios
    if len(arr) > 4:
        steps = np.diff(arr[-4:])
        q = math.exp(min(steps.max(), 0.0))
        tail = math.exp(arr[-1] - peak) * q / (1.0 - q) if q < 1.0 else 0.0
    else:
        tail = 0.0
    val = math.exp(ln_lead + (peak + math.log(total)) / p)
    tail_norm = val * ((1.0 + tail / total) ** (1.0 / p) - 1.0)
    return MonomialNorm(nu, val, True, len(arr), tail_norm)


def _divergent(nu, terms, strict):
    if strict:
        raise DivergentSeries(f"norm series of z^{nu} does not decay; z^{nu} is not in the space")
    return MonomialNorm(nu, math.inf, False, terms, math.inf)


def laurent_from_schauder(v: BilateralVector, cfg: ShiftConfig, extend: bool = True) -> BilateralVector:
    """Laurent coefficients hat f(n) = lambda_n a_n + lambda_{n-1} b_{n-1}.

    With ``extend`` the output window grows by one at the top so that no
    coefficient is lost.
    """
    if v.basis is not Basis.SCHAUDER:
        raise WrongBasis("expected Schauder coefficients")
    lo, hi = v.window
    top = hi + 1 if extend else hi
    idx = np.arange(lo, top + 1)
    lam = np.concatenate([v.coeffs, [0.0]]) if extend else v.coeffs.copy()
    a = np.array([cfg.a(int(n)) for n in idx])
    b_prev = np.array([cfg.b(int(n) - 1) for n in idx])
    lam_prev = np.concatenate([[0.0], lam[:-1]])
    return BilateralVector(lo, lam * a + lam_prev * b_prev, Basis.LAURENT)


def schauder_from_laurent(v: BilateralVector, cfg: ShiftConfig, window=None) -> BilateralVector:
    """Schauder coefficients by superposing monomial expansions.

    The result lives on ``window`` (default: the input window); expansion
    terms that leave it are dropped, which leaves the in-window
    coordinates exact.
    """
    if v.basis is not Basis.LAURENT:
        raise WrongBasis("expected Laurent coefficients")
    lo, hi = v.window if window is None else window
    out = np.zeros(hi - lo + 1)
    for nu, c in zip(v.indices, v.coeffs):
        if c == 0.0:
            continue
        nu = int(nu)
        if nu > hi:
            continue
        exp = monomial_expansion(nu, cfg, limit=hi)
        start = nu - lo
        seg = exp.coeffs
        if start < 0:
            seg = seg[-start:]
            start = 0
        out[start:start + len(seg)] += c * seg
    return BilateralVector(lo, out, Basis.SCHAUDER)


def annulus(cfg: ShiftConfig):
    """(r, R) estimated on the config's window, cached on the config."""
    rad = getattr(cfg, "_annulus", None)
    if rad is None:
        from .seqexpr import validate_config
        rep = validate_config(cfg.a, cfg.b, cfg.w, cfg.window, cfg.params.basis_variant)
        rad = (rep.r, rep.R)
        cfg._annulus = rad
    return rad


def evaluate(v: BilateralVector, zeta: complex, cfg: ShiftConfig, radii=None) -> complex:
    """Value at a point of the open annulus r < |zeta| < R."""
    r, R = annulus(cfg) if radii is None else radii
    z = complex(zeta)
    if not r < abs(z) < R:
        raise OutsideAnnulus(f"|zeta| = {abs(z):.6g} is not inside ({r:.6g}, {R:.6g})")
    total = 0j
    for n, c in zip(v.indices, v.coeffs):
        if c == 0.0:
            continue
        n = int(n)
        if v.basis is Basis.LAURENT:
            total += c * z ** n
        else:
            total += c * (cfg.a(n) + cfg.b(n) * z) * z ** n
    return total


def coefficient_functional_bound(n: int, cfg: ShiftConfig) -> float:
    """Upper bound for the norm of the n-th Laurent coefficient functional."""
    a, b = abs(cfg.a(n)), abs(cfg.b(n - 1))
    par = cfg.params
    if par.norm_kind is NormKind.C0:
        return a + b
    if par.p == 1.0:
        return max(a, b)
    return lp_norm([a, b], par.q)


def monomial_norm_bound(nu: int, cfg: ShiftConfig, rho: float) -> float:
    """M_1 / |a_nu| with M_1 = (sum_j rho^{pj})^{1/p}; needs rho < 1."""
    if not rho < 1.0:
        return math.inf
    par = cfg.params
    if par.norm_kind is NormKind.C0:
        m1 = 1.0
    else:
        m1 = (1.0 / (1.0 - rho ** par.p)) ** (1.0 / par.p)
    return m1 / abs(cfg.a(nu))
