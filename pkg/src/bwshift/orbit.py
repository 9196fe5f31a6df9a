"""Orbits of B_w: iterates, distances to candidate limit points, divergence."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .basis import monomial_norm, schauder_from_laurent
from .core import Basis, BilateralVector, NormKind, ShiftConfig, SignedLog, vector_norm
from .dynamics import Status, Thresholds, tends_to_infinity
from .errors import EdgeDominated, WindowTooSmall
from .shiftmatrix import apply

EDGE_LIMIT = 0.25


@dataclass
class OrbitRecord:
    step: int
    norm: SignedLog
    distances: list = field(default_factory=list)
    edge_fraction: float = 0.0
    edge_dominated: bool = False

    def to_dict(self):
        return {"step": self.step, "norm": self.norm.to_real(), "ln_norm": self.norm.ln_mag,
                "distances": list(self.distances), "edge_fraction": self.edge_fraction,
                "edge_dominated": self.edge_dominated}


def schedule_steps(steps: int, schedule: str = "all") -> list:
    if schedule == "all":
        return list(range(1, steps + 1))
    if schedule == "powers_of_two":
        out, k = [], 1
        while k <= steps:
            out.append(k)
            k *= 2
        return out
    raise ValueError(f"unknown schedule {schedule!r}")


def default_candidates(window) -> list:
    return [BilateralVector.unit(n, window) for n in range(-2, 3)]


def _mass(x, params):
    x = np.abs(x)
    if params.norm_kind is NormKind.C0:
        return float(x.max()) if x.size else 0.0
    return float(np.sum(x ** params.p))


def simulate_orbit(cfg: ShiftConfig, v0: BilateralVector, steps: int, candidates=None,
                   schedule: str = "all") -> list:
    """Iterates [B_w^nu] v0 for nu on the schedule, each from the closed form.

    Mass moves left by nu, so the window must reach ``min(support) - nu_max``.
    Iterates whose tainted (edge) coordinates carry more than a quarter of
    the norm mass are flagged and an :class:`EdgeDominated` warning issued.
    """
    if v0.basis is not Basis.SCHAUDER:
        v0 = schauder_from_laurent(v0, cfg)
    if candidates is None:
        candidates = default_candidates(v0.window)
    cands = [c if c.basis is Basis.SCHAUDER else schauder_from_laurent(c, cfg, v0.window) for c in candidates]
    cands = [c.restrict(v0.window) for c in cands]
    nus = schedule_steps(steps, schedule)
    support = np.flatnonzero(v0.coeffs)
    if support.size and nus:
        low = v0.n_min + int(support[0]) - nus[-1]
        if low < v0.n_min:
            raise WindowTooSmall(f"window starts at {v0.n_min} but the orbit reaches index {low} "
                                 f"by step {nus[-1]}")
    par = cfg.params
    out = []
    for nu in nus:
        x = apply(cfg, nu, v0)
        nrm = vector_norm(x, par)
        total = _mass(x.coeffs, par)
        edge = _mass(x.coeffs[x.taint_mask()], par) if total > 0 else 0.0
        frac = edge / total if total > 0 else 0.0
        dominated = frac > EDGE_LIMIT
        if dominated:
            warnings.warn(f"step {nu}: {frac:.0%} of the iterate's mass sits on edge-tainted coordinates",
                          EdgeDominated, stacklevel=2)
        dists = [vector_norm(x - c, par) for c in cands]
        out.append(OrbitRecord(nu, SignedLog.from_real(nrm), dists, frac, dominated))
    return out


@dataclass
class LimitPointReport:
    candidate: int
    detected: bool
    hits: list
    distances: list
    tolerance: float

    def to_dict(self):
        return {"candidate": self.candidate, "detected": self.detected, "hits": self.hits,
                "distances": self.distances, "tolerance": self.tolerance}


def detect_limit_point(records, tolerance: float = 1e-3, candidates=None, min_hits: int = 3) -> list:
    """Per candidate: detected when the distance drops below ``tolerance`` at
    ``min_hits`` or more steps and stays below it to the end of the record.

    A zero candidate is rejected, since only nonzero limit points matter.
    """
    if len(records) < 3:
        raise ValueError("need at least three orbit records")
    k = len(records[0].distances)
    if candidates is not None:
        for i, c in enumerate(candidates):
            if not np.any(c.coeffs):
                raise ValueError(f"candidate {i} is zero; only nonzero limit points are tested")
    reports = []
    for i in range(k):
        d = [r.distances[i] for r in records]
        below = [r.step for r, x in zip(records, d) if x < tolerance]
        # eventually below: the hits form a suffix of the record
        suffix = 0
        for x in reversed(d):
            if x < tolerance:
                suffix += 1
            else:
                break
        detected = suffix >= min_hits
        reports.append(LimitPointReport(i, detected, below, d, tolerance))
    return reports


@dataclass
class DivergenceReport:
    index: int
    norms: list          # ||B^n z^index|| for n = 1..steps, from iterates
    exact: list          # |w_j ... w_{j-n+1}| ||z^{j-n}||
    ratios: list
    status: Status
    how: str

    def to_dict(self):
        return {"monomial": self.index, "norms": self.norms, "exact": self.exact, "ratios": self.ratios,
                "status": self.status.value, "how": self.how}


def check_divergent_subspace(cfg: ShiftConfig, monomials=range(0, 5), steps: int = 24,
                             th: Thresholds = Thresholds()) -> list:
    """Norm growth of B_w^n z^j for each monomial z^j.

    Iterates come from the closed form applied to the Schauder expansion of
    z^j; ``exact`` uses B_w z^m = w_m z^{m-1} directly and serves as a check.
    Holds means the norms diverge to infinity (full limit).
    """
    lo, hi = cfg.window
    out = []
    for j in monomials:
        j = int(j)
        if j - steps < lo or j > hi:
            raise WindowTooSmall(f"z^{j} needs indices down to {j - steps}; window starts at {lo}")
        g = schauder_from_laurent(BilateralVector.unit(j, cfg.window, Basis.LAURENT), cfg)
        norms, exact = [], []
        ln_w = 0.0
        for n in range(1, steps + 1):
            norms.append(vector_norm(apply(cfg, n, g), cfg.params))
            ln_w += math.log(abs(cfg.w(j - n + 1))) if cfg.w(j - n + 1) != 0 else -math.inf
            exact.append(math.exp(ln_w) * monomial_norm(j - n, cfg).value)
        lns = np.log(np.maximum(np.array(exact), 1e-300))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = (np.array(norms[1:]) / np.array(norms[:-1])).tolist()
        call = tends_to_infinity(lns, th, full_limit=True)
        status = {"diverges": Status.HOLDS, "bounded": Status.FAILS}.get(call.call, Status.INCONCLUSIVE)
        out.append(DivergenceReport(j, norms, exact, ratios, status, call.how))
    return out


def zero_one_vector(window, k_max: int = 5) -> BilateralVector:
    """u = sum_{k=1}^{k_max} 2^{-2^k} f_{2^k}, truncated at k_max."""
    return BilateralVector.from_mapping({2 ** k: 2.0 ** -(2 ** k) for k in range(1, k_max + 1)}, window)


def zero_one_closed_form(k: int, k_max: int = 5, p: float = 2.0) -> float:
    """sum_{j=k+1}^{k_max} (2^{2^k - 2^j})^p: the distance^p claimed for the
    truncated vector when only the tail terms are kept."""
    return math.fsum(2.0 ** (p * (2 ** k - 2 ** j)) for j in range(k + 1, k_max + 1))
