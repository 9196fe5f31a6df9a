"""Boundedness and dynamics criteria as tri-state verdicts with evidence.

Every criterion reduces to questions about sequences indexed by nu: does
it tend to infinity, to zero, is it bounded, is it summable. Those
questions cannot be settled from finitely many terms, so each one is
answered by an explicit heuristic whose thresholds are recorded in the
verdict:

* divergence: the running max passes ``diverge`` with its argmax in the
  final quarter of the horizon; a full limit also needs the tail after the
  first crossing to stay above ``stay``. A sequence whose second half grows
  at a steady positive log-rate also counts when that rate would cross
  ``diverge`` within ``projection_factor`` times the horizon.
* boundedness (the Fails side): the second half of the horizon is exactly
  constant or strictly decreasing, so the sup is attained and finite.
* summability: strictly decreasing terms whose local decay exponent
  d ln(term) / d ln(nu) stays below ``power_law_exponent`` over the second
  half, also after extrapolating its drift to ``projection_factor`` times
  the horizon. Non-decreasing terms certify divergence.

Sequences are handled as natural logs of magnitudes throughout.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .basis import coefficient_functional_bound, monomial_norm
from .core import NormKind, ShiftConfig
from .errors import DivergentSeries, ZeroWeight
from .shiftmatrix import decompose, essential_spectrum_estimate


class Status(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Thresholds:
    diverge: float = 1e9
    stay: float = 1e6
    vanish: float = 1e-9
    vanish_stay: float = 1e-6
    final_fraction: float = 0.25
    decrease_ratio: float = 1.0 - 1e-12
    const_tol: float = 1e-12
    projection_factor: float = 2.0
    power_law_exponent: float = -1.05
    compact_tol: float = 1e-2

    def to_dict(self):
        return asdict(self)


@dataclass
class Verdict:
    """Status plus the evidence that produced it."""

    status: Status
    evidence: list = field(default_factory=list)     # [label, value] pairs
    thresholds: dict = field(default_factory=dict)
    reason: str = ""
    sub: dict = field(default_factory=dict)          # named sub-verdicts

    def add(self, label, value):
        self.evidence.append([label, value])
        return self

    def get(self, label, default=None):
        for k, v in self.evidence:
            if k == label:
                return v
        return default

    def to_dict(self):
        d = {"status": self.status.value, "evidence": [[k, _jsonable(v)] for k, v in self.evidence],
             "thresholds": dict(self.thresholds)}
        if self.reason:
            d["reason"] = self.reason
        if self.sub:
            d["sub"] = {k: v.to_dict() for k, v in self.sub.items()}
        return d


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (np.floating, float)):
        x = float(v)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


# ---------------------------------------------------------- series calls

@dataclass
class SeriesCall:
    """Outcome of a limit question on one sequence."""

    call: str          # "diverges", "bounded", "unknown"
    how: str
    peak_ln: float
    peak_at: int
    last_ln: float

    def to_dict(self):
        return {"call": self.call, "how": self.how, "peak_ln": self.peak_ln,
                "peak_at": self.peak_at, "last_ln": self.last_ln}


def tends_to_infinity(lns, th: Thresholds, full_limit: bool = False, horizon: int | None = None) -> SeriesCall:
    """Classify ``exp(lns[k])``, k = 0..H-1 standing for nu = 1..H.

    When ``lns`` runs past ``horizon`` the extra terms only serve to confirm
    a bounded certificate: it must also hold on the extended series with the
    same sup, otherwise the call is "unknown".
    """
    lns = np.asarray(lns, dtype=float)
    if horizon is not None and len(lns) > horizon:
        c = tends_to_infinity(lns[:horizon], th, full_limit)
        if c.call == "bounded":
            ext = tends_to_infinity(lns, th, full_limit)
            if ext.call != "bounded" or ext.peak_ln > c.peak_ln:
                return SeriesCall("unknown", f"bounded over nu <= {horizon} but not confirmed up to "
                                  f"nu = {len(lns)}", c.peak_ln, c.peak_at, c.last_ln)
            c.how += f"; confirmed up to nu = {len(lns)}"
        return c
    H = len(lns)
    if H < 4:
        raise ValueError("need at least four terms")
    lnD, lnS = math.log(th.diverge), math.log(th.stay)
    peak_i = int(np.argmax(lns))
    peak = float(lns[peak_i])
    last = float(lns[-1])
    final_start = int(math.ceil(H * (1.0 - th.final_fraction)))
    if peak == math.inf:
        return SeriesCall("diverges", "infinite term", peak, peak_i + 1, last)
    if peak > lnD and peak_i >= final_start - 1:
        if not full_limit:
            return SeriesCall("diverges", "running max past threshold late in the horizon", peak, peak_i + 1, last)
        first = int(np.argmax(lns > lnD))
        if np.all(lns[first:] > lnS):
            return SeriesCall("diverges", "tail stays above the hold threshold after crossing", peak, peak_i + 1, last)
    half = lns[H // 2:]
    with np.errstate(invalid="ignore"):
        inc = np.diff(half)
    if np.all(np.isfinite(half)) and inc.size and inc.min() > 0.0 and last < lnD:
        rate = float(inc.min())
        need = (lnD - last) / rate
        if need <= (th.projection_factor - 1.0) * H:
            return SeriesCall("diverges", f"steady growth at log-rate >= {rate:.6g}, projected crossing "
                              f"after {need:.1f} more steps", peak, peak_i + 1, last)
    with np.errstate(invalid="ignore"):
        flat = np.ptp(half) <= th.const_tol
    if flat or np.all(half == -math.inf):
        return SeriesCall("bounded", "exactly constant over the second half", peak, peak_i + 1, last)
    with np.errstate(invalid="ignore"):
        if inc.size and np.all(inc <= math.log(th.decrease_ratio)):
            return SeriesCall("bounded", "strictly decreasing over the second half", peak, peak_i + 1, last)
    return SeriesCall("unknown", "no divergence and no bounded-tail certificate", peak, peak_i + 1, last)


def tends_to_zero(lns, th: Thresholds, full_limit: bool = False, horizon: int | None = None) -> SeriesCall:
    """Same question for 1/x: does x go to zero (or stay bounded below)."""
    mirrored = Thresholds(**{**th.to_dict(), "diverge": 1.0 / th.vanish, "stay": 1.0 / th.vanish_stay})
    c = tends_to_infinity(-np.asarray(lns, dtype=float), mirrored, full_limit, horizon)
    call = {"diverges": "vanishes", "bounded": "bounded_below"}.get(c.call, c.call)
    return SeriesCall(call, c.how, -c.peak_ln, c.peak_at, -c.last_ln)


@dataclass
class SumCall:
    call: str            # "converges", "diverges", "unknown"
    how: str
    partial_ln: float    # log of the partial sum
    tail_bound: float    # bound on the omitted tail relative to the partial sum

    def to_dict(self):
        return asdict(self)


def summable(lns, th: Thresholds, start: int = 1) -> SumCall:
    """Does sum_k exp(lns[k]) converge (terms indexed from ``start``)."""
    lns = np.asarray(lns, dtype=float)
    H = len(lns)
    if np.any(lns == math.inf):
        return SumCall("diverges", "infinite term", math.inf, math.inf)
    finite = lns[np.isfinite(lns)]
    if finite.size == 0:
        return SumCall("converges", "all terms vanish", -math.inf, 0.0)
    m = finite.max()
    partial_ln = m + math.log(float(np.sum(np.exp(finite - m))))
    half = lns[H // 2:]
    if np.all(half == -math.inf):
        return SumCall("converges", "terms vanish identically on the second half", partial_ln, 0.0)
    if not np.all(np.isfinite(half)):
        return SumCall("unknown", "vanishing terms mixed with nonzero ones", partial_ln, math.inf)
    inc = np.diff(half)
    if np.all(inc >= 0.0):
        return SumCall("diverges", "terms do not decrease over the second half", partial_ln, math.inf)
    if np.any(inc >= 0.0):
        return SumCall("unknown", "terms are not monotone over the second half", partial_ln, math.inf)
    # local power exponent s_k = d ln(term) / d ln(k): constant for power laws,
    # drifting to -inf for geometric and faster decay
    ns = np.arange(start, start + H)[H // 2:].astype(float)
    s = inc / np.diff(np.log(ns))
    s_max = float(s.max())
    drift = (s[-1] - s[0]) / (math.log(ns[-1]) - math.log(ns[1]))
    s_proj = s[-1] + max(drift, 0.0) * math.log(th.projection_factor)
    if s_max < th.power_law_exponent and s_proj < th.power_law_exponent:
        last = math.exp(half[-1] - partial_ln)
        tail = last * ns[-1] / (-s_max - 1.0)
        how = f"local decay exponent <= {s_max:.4g}"
        if np.all(np.diff(inc) <= 0.0):
            rho = math.exp(float(inc.max()))
            tail = min(tail, last * rho / (1.0 - rho))
            how += f", ratios non-increasing and <= {rho:.6g}"
        return SumCall("converges", how, partial_ln, tail)
    return SumCall("unknown", f"local decay exponent {s_max:.4g} not clearly below "
                   f"{th.power_law_exponent}", partial_ln, math.inf)


# ---------------------------------------------------------- raw sequences

class _Seq:
    """Log-magnitudes of the products used by the criteria."""

    def __init__(self, cfg: ShiftConfig, n_max: int, horizon: int):
        lo = min(cfg.window[0], -horizon - 2) - 2
        hi = max(cfg.window[1], n_max + horizon + 2) + 2
        self.t = cfg.tables(lo, hi)
        self.cfg = cfg

    def ln_w(self, lo, hi):
        s, l = self.t.pw.batch(lo, hi)
        return np.where(s == 0, -np.inf, l)

    def ln_a(self, n):
        return np.log(np.abs(self.t.at("a", n)))

    def forward(self, n, nus):
        """ln |w_{n+1} ... w_{n+nu} a_{n+nu}|"""
        return self.ln_w(np.full(len(nus), n + 1), n + nus) + self.ln_a(n + nus)

    def backward(self, n, nus):
        """ln |a_{n-nu} / (w_n ... w_{n-nu+1})|"""
        with np.errstate(invalid="ignore"):
            return self.ln_a(n - nus) - self.ln_w(n - nus + 1, np.full(len(nus), n))


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# ------------------------------------------------------------ boundedness

def _edge_growth(values, th: Thresholds = None):
    """Classify |values| (indexed left to right over the window) as bounded,
    unbounded or unknown by looking at both outer bands."""
    with np.errstate(invalid="ignore", divide="ignore"):
        return _edge_growth_inner(np.abs(np.asarray(values, dtype=float)))


def _edge_growth_inner(v):
    k = len(v)
    quarter = max(2, k // 8)
    half = k // 2
    with np.errstate(divide="ignore"):
        lv = np.log(v)
    calls = []
    for side in (lv[::-1], lv):          # toward the left edge, toward the right edge
        band = side[-quarter:]
        inc = np.diff(band)
        outer_half = side[half:]
        grow = np.diff(outer_half)
        if np.all(np.isfinite(outer_half)) and np.all(grow > 0) and outer_half[-1] - outer_half[0] >= math.log(1.5):
            calls.append("unbounded")
        elif np.all(~np.isfinite(band)) or np.all(inc[np.isfinite(inc)] <= 1e-3):
            calls.append("bounded")
        else:
            calls.append("unknown")
    if "unbounded" in calls:
        return "unbounded", calls
    if all(c == "bounded" for c in calls):
        return "bounded", calls
    return "unknown", calls


def _rho_tail(cfg: ShiftConfig):
    """Estimate of limsup |b_n / a_{n+1}| from the last quarter of the window."""
    hi = cfg.window[1]
    ns = range((3 * hi) // 4, hi + 1)
    vals = np.array([abs(cfg.b(n) / cfg.a(n + 1)) for n in ns])
    return float(vals.max()), vals


def check_boundedness(cfg: ShiftConfig, horizon: int = 48, th: Thresholds = Thresholds(),
                      dec=None) -> Verdict:
    lo, hi = cfg.window
    ns = np.arange(lo, hi + 1)
    dec = dec or decompose(cfg, i_max=60, compact_tol=th.compact_tol)
    alpha = dec.alpha
    v = Verdict(Status.INCONCLUSIVE, thresholds=th.to_dict())

    a_call, a_sides = _edge_growth(alpha, th)
    v.add("sup_abs_alpha_window", float(np.max(np.abs(alpha))))
    v.add("alpha_edge_behaviour", {"call": a_call, "left": a_sides[0], "right": a_sides[1]})
    c_call, c_sides = _edge_growth(dec.c, th)
    v.add("sup_abs_c_window", float(np.max(np.abs(dec.c))))
    v.add("c_edge_behaviour", {"call": c_call, "left": c_sides[0], "right": c_sides[1]})

    rho, tail = _rho_tail(cfg)
    cond33 = "Holds" if rho < 1.0 else ("Fails" if np.all(tail >= 1.0) else "Inconclusive")
    v.add("rho_estimate", rho)
    v.add("rho_tail", tail)
    v.add("condition_3_3", cond33)

    partial = dec.partial_sums()
    cond32 = "Holds" if (math.isfinite(dec.tail_bound) and c_call == "bounded") else "Inconclusive"
    v.add("T_norm_partial_sums", partial)
    v.add("T_tail_bound", dec.tail_bound)
    v.add("T_tail_ratio", dec.tail_ratio)
    v.add("condition_3_2", cond32)

    # necessary side from the coordinate-functional bounds
    try:
        kb = np.array([coefficient_functional_bound(int(n), cfg) for n in ns])
        ratio = np.abs([cfg.w(int(n) + 1) for n in ns[:-1]]) * kb[1:] / kb[:-1]
        v.add("sup_w_k_ratio_window", float(np.max(ratio)))
    except ZeroDivisionError:
        v.add("sup_w_k_ratio_window", math.inf)

    if a_call == "unbounded":
        v.status = Status.FAILS
        v.reason = "the weights w_{n+1} a_{n+1} / a_n grow monotonically without bound toward a window edge"
    elif c_call == "unbounded":
        v.status = Status.FAILS
        v.reason = "the diagonal c_n grows monotonically without bound toward a window edge"
    elif a_call == "bounded" and (cond32 == "Holds" or cond33 == "Holds"):
        v.status = Status.HOLDS
        v.reason = "weights bounded and the subdiagonal series converges" if cond32 == "Holds" \
            else "weights bounded and limsup |b_n / a_{n+1}| < 1"
    else:
        v.reason = "boundedness evidence incomplete"
    return v


def _hypotheses(cfg, th, bounded: Verdict | None):
    """Reason string when the dynamics theorems do not apply, else ''."""
    if bounded is not None and bounded.status is Status.FAILS:
        return "operator is not bounded"
    rho, _ = _rho_tail(cfg)
    if rho >= 1.0:
        return f"HypothesisViolated: limsup |b_n / a_(n+1)| estimate {rho:.6g} is not below 1"
    return ""


# ------------------------------------------------- hypercyclic and mixing

def _family(cfg, n_max, horizon, threads, build):
    """Per-n sequences over nu = 1..2*horizon (the second half confirms certificates)."""
    seq = _Seq(cfg, n_max, 2 * horizon)
    nus = np.arange(1, 2 * horizon + 1)
    return _map(lambda n: (n, build(seq, n, nus)), list(range(1, n_max + 1)), threads)


def _two_sided(cfg, n_max, horizon, th, full_limit, threads, bounded):
    v = Verdict(Status.INCONCLUSIVE, thresholds={**th.to_dict(), "n_max": n_max, "horizon": horizon,
                                                  "full_limit": full_limit})
    why = _hypotheses(cfg, th, bounded)
    rows = _family(cfg, n_max, horizon, threads, lambda s, n, nus: (s.forward(n, nus), s.backward(n, nus)))
    calls = {}
    for n, (fw, bw) in rows:
        cf = tends_to_infinity(fw, th, full_limit, horizon)
        cb = tends_to_infinity(bw, th, full_limit, horizon)
        calls[n] = (cf, cb)
        v.add(f"n={n} forward", cf.to_dict())
        v.add(f"n={n} backward", cb.to_dict())
    n0 = 1
    v.add(f"n={n0} forward ln-series", rows[0][1][0][:horizon])
    v.add(f"n={n0} backward ln-series", rows[0][1][1][:horizon])
    bounded_hits = [(n, side, c) for n, (cf, cb) in calls.items()
                    for side, c in (("forward", cf), ("backward", cb)) if c.call == "bounded"]
    if why:
        v.reason = why
        return v
    if bounded_hits:
        n, side, c = bounded_hits[0]
        v.status = Status.FAILS
        v.reason = (f"{side} sequence at n={n} is bounded ({c.how}); sup = {math.exp(c.peak_ln):.17g}"
                    f" attained at nu={c.peak_at}")
        v.add("certificate", {"n": n, "side": side, "sup": math.exp(c.peak_ln), "at_nu": c.peak_at,
                              "how": c.how})
    elif all(cf.call == "diverges" and cb.call == "diverges" for cf, cb in calls.values()):
        v.status = Status.HOLDS
        v.reason = "both sequences diverge for every sampled n"
    else:
        v.reason = "some sequences neither diverge nor carry a bounded certificate"
    return v


def check_hypercyclic(cfg, n_max=8, horizon=48, th=Thresholds(), threads=1, bounded=None) -> Verdict:
    """limsup of |w_{n+1}...w_{n+nu} a_{n+nu}| and |a_{n-nu} / (w_n...w_{n-nu+1})| both infinite."""
    return _two_sided(cfg, n_max, horizon, th, False, threads, bounded)


def check_mixing(cfg, n_max=8, horizon=48, th=Thresholds(), threads=1, bounded=None) -> Verdict:
    """Same two sequences with full limits instead of limsups."""
    return _two_sided(cfg, n_max, horizon, th, True, threads, bounded)


def check_supercyclic(cfg, n_max=8, horizon=48, th=Thresholds(), threads=1, bounded=None) -> Verdict:
    """limsup of the product of the two hypercyclicity sequences infinite."""
    v = Verdict(Status.INCONCLUSIVE, thresholds={**th.to_dict(), "n_max": n_max, "horizon": horizon})
    why = _hypotheses(cfg, th, bounded)
    rows = _family(cfg, n_max, horizon, threads, lambda s, n, nus: s.forward(n, nus) + s.backward(n, nus))
    calls = {}
    for n, ln in rows:
        calls[n] = tends_to_infinity(ln, th, False, horizon)
        v.add(f"n={n}", calls[n].to_dict())
    v.add("n=1 ln-series", rows[0][1][:horizon])
    if why:
        v.reason = why
        return v
    hits = [(n, c) for n, c in calls.items() if c.call == "bounded"]
    if hits:
        n, c = hits[0]
        v.status = Status.FAILS
        v.reason = f"product sequence at n={n} is bounded ({c.how}); sup = {math.exp(c.peak_ln):.17g}"
        v.add("certificate", {"n": n, "sup": math.exp(c.peak_ln), "at_nu": c.peak_at, "how": c.how})
    elif all(c.call == "diverges" for c in calls.values()):
        v.status = Status.HOLDS
        v.reason = "product sequence diverges for every sampled n"
    else:
        v.reason = "some product sequences are undecided"
    return v


# ------------------------------------------------------------------ chaos

def _chaos_series(cfg, horizon):
    seq = _Seq(cfg, 1, horizon)
    ns = np.arange(1, horizon + 1)
    # |w_0 ... w_{-n+1} / a_{-n}| and |1 / (w_1 ... w_n a_n)|
    neg = seq.ln_w(-ns + 1, np.zeros(len(ns), dtype=int)) - seq.ln_a(-ns)
    pos = -(seq.ln_w(np.ones(len(ns), dtype=int), ns) + seq.ln_a(ns))
    return neg, pos


def _double_series(cfg, p, q, horizon, th):
    """Outer terms (sum_j |prod_{k<=j} b_{n+k-1}/a_{n+k}|^p)^{q/p}, n = 1..N, as logs."""
    N = 2 * horizon
    logs = []
    for n in range(1, N + 1):
        lp = 0.0
        terms = []
        m = n
        while True:
            b = cfg.b(m)
            if b == 0.0:
                break
            lp += p * (math.log(abs(b)) - math.log(abs(cfg.a(m + 1))))
            terms.append(lp)
            m += 1
            if len(terms) > 8 and terms[-1] < max(terms) - 40.0:
                break
            if len(terms) > 4000 or terms[-1] > 700:
                return None
        if not terms:
            logs.append(-math.inf)
            continue
        t = np.array(terms)
        mx = t.max()
        inner = mx + math.log(float(np.sum(np.exp(t - mx))))
        logs.append(inner * q / p)
    return np.array(logs)


def check_chaotic(cfg, horizon=48, th=Thresholds(), bounded=None) -> Verdict:
    """Summability of the two product series, plus the extra condition that
    upgrades the necessary condition to a characterization."""
    par = cfg.params
    v = Verdict(Status.INCONCLUSIVE, thresholds={**th.to_dict(), "horizon": horizon})
    neg, pos = _chaos_series(cfg, horizon)
    p = par.p if par.norm_kind is NormKind.LP else 1.0
    s_neg = summable(p * neg, th)
    s_pos = summable(p * pos, th)
    v.add("negative_side_ln_terms", neg)
    v.add("positive_side_ln_terms", pos)
    v.add("negative_side_sum", s_neg.to_dict())
    v.add("positive_side_sum", s_pos.to_dict())
    v.add("implication_chain", "chaotic => nontrivial periodic vector => both series summable")

    if s_neg.call == "converges" and s_pos.call == "converges":
        cond3 = Status.HOLDS
    elif s_neg.call == "diverges" or s_pos.call == "diverges":
        cond3 = Status.FAILS
    else:
        cond3 = Status.INCONCLUSIVE
    v.sub["condition_iii"] = Verdict(cond3, [["negative", s_neg.call], ["positive", s_pos.call]])

    equiv = Status.INCONCLUSIVE
    if par.norm_kind is NormKind.LP and par.p > 1.0:
        dbl = _double_series(cfg, par.p, par.q, horizon, th)
        if dbl is None:
            v.add("equivalence_series", "inner series does not decay")
            equiv = Status.FAILS
        else:
            sc = summable(dbl, th)
            v.add("equivalence_series_ln_terms", dbl)
            v.add("equivalence_series_sum", sc.to_dict())
            equiv = {"converges": Status.HOLDS, "diverges": Status.FAILS}.get(sc.call, Status.INCONCLUSIVE)
    v.add("equivalence_condition", equiv.value)
    n_pos, n_neg = _chaos_norm_sums(cfg, horizon, th)
    norm_route = n_pos.call == "converges" and n_neg.call == "converges"
    v.add("norm_weighted_sums", {"positive": n_pos.to_dict(), "negative": n_neg.to_dict()})

    if par.norm_kind is not NormKind.LP or par.p <= 1.0:
        v.reason = f"ScopeError: the chaos characterization needs 1 < p < inf (space is {par.label()})"
        return v
    why = _hypotheses(cfg, th, bounded)
    if why:
        v.reason = why
        return v
    if cond3 is Status.FAILS:
        v.status = Status.FAILS
        side = "negative" if s_neg.call == "diverges" else "positive"
        v.reason = f"the {side}-side series diverges, so there is no nontrivial periodic vector"
    elif cond3 is Status.HOLDS and equiv is Status.HOLDS:
        v.status = Status.HOLDS
        v.reason = "both series converge and the equivalence condition holds"
    elif cond3 is Status.HOLDS and norm_route:
        v.status = Status.HOLDS
        v.reason = "both series converge and the norm-weighted sums converge (sufficient condition)"
    elif cond3 is Status.HOLDS:
        v.reason = "both series converge but the equivalence condition is not established"
    else:
        v.reason = "series undecided"
    return v


# ------------------------------------------------- generic (norm-based)

def _norm_logs(cfg, idx):
    out = np.empty(len(idx))
    for i, m in enumerate(idx):
        try:
            out[i] = math.log(monomial_norm(int(m), cfg).value)
        except DivergentSeries:
            out[i] = math.inf
    return out


def _chaos_norm_sums(cfg, horizon, th):
    """sum ||z^nu|| / |w_1...w_nu| and sum |w_0...w_{-nu+1}| ||z^{-nu}||; since
    |L(z^nu)| <= ||L|| ||z^nu||, convergence covers every functional L."""
    seq = _Seq(cfg, 1, horizon)
    nus = np.arange(1, horizon + 1)
    pos = _norm_logs(cfg, nus) - seq.ln_w(np.ones(len(nus), dtype=int), nus)
    neg = seq.ln_w(-nus + 1, np.zeros(len(nus), dtype=int)) + _norm_logs(cfg, -nus)
    return summable(pos, th), summable(neg, th)


def check_generic_criteria(cfg, n_max=8, horizon=48, th=Thresholds(), threads=1) -> Verdict:
    """Norm-based sufficient conditions; each sub-verdict is sufficient-only."""
    H2 = 2 * horizon
    seq = _Seq(cfg, n_max, H2)
    nus = np.arange(1, H2 + 1)
    m_lo = 1 - H2
    norms = _norm_logs(cfg, np.arange(m_lo, n_max + H2 + 1))

    def ln_norm(m):
        return norms[m - m_lo]

    v = Verdict(Status.INCONCLUSIVE, thresholds={**th.to_dict(), "n_max": n_max, "horizon": horizon,
                                                  "kind": "sufficient-only"})
    hyp, mix, sup = [], [], []
    for n in range(1, n_max + 1):
        # |w_n ... w_{n-nu+1}| ||z^{n-nu}|| and ||z^{n+nu}|| / |w_{n+1} ... w_{n+nu}|
        back = seq.ln_w(n - nus + 1, np.full(len(nus), n)) + ln_norm(n - nus)
        fwd = ln_norm(n + nus) - seq.ln_w(np.full(len(nus), n + 1), n + nus)
        prod = back + fwd
        hyp.append((tends_to_zero(back, th, False, horizon), tends_to_zero(fwd, th, False, horizon)))
        mix.append((tends_to_zero(back, th, True, horizon), tends_to_zero(fwd, th, True, horizon)))
        sup.append(tends_to_zero(prod, th, False, horizon))
        if n == 1:
            v.add("n=1 backward ln-series", back[:horizon])
            v.add("n=1 forward ln-series", fwd[:horizon])

    def pair_status(calls):
        if all(a.call == "vanishes" and b.call == "vanishes" for a, b in calls):
            return Status.HOLDS
        if any(a.call == "bounded_below" or b.call == "bounded_below" for a, b in calls):
            return Status.FAILS
        return Status.INCONCLUSIVE

    def single_status(calls):
        if all(c.call == "vanishes" for c in calls):
            return Status.HOLDS
        if any(c.call == "bounded_below" for c in calls):
            return Status.FAILS
        return Status.INCONCLUSIVE

    v.sub["hypercyclic"] = Verdict(pair_status(hyp), [[f"n={n + 1}", [a.to_dict(), b.to_dict()]]
                                                      for n, (a, b) in enumerate(hyp)])
    v.sub["mixing"] = Verdict(pair_status(mix), [[f"n={n + 1}", [a.to_dict(), b.to_dict()]]
                                                 for n, (a, b) in enumerate(mix)])
    v.sub["supercyclic"] = Verdict(single_status(sup), [[f"n={n + 1}", c.to_dict()] for n, c in enumerate(sup)])

    s_pos, s_neg = _chaos_norm_sums(cfg, horizon, th)
    # coordinate functionals: k_m(z^nu) = delta, so each sum has a single term;
    # the Schauder coordinate functionals see the expansion coefficients instead
    ev = [["positive_norm_sum", s_pos.to_dict()], ["negative_norm_sum", s_neg.to_dict()]]
    if s_pos.call == "converges" and s_neg.call == "converges":
        cs = Status.HOLDS
    else:
        cs = Status.INCONCLUSIVE
    v.sub["chaotic"] = Verdict(cs, ev, reason="sums of |L(z^nu)| bounded by ||L|| times the norm sums")
    v.status = v.sub["hypercyclic"].status
    v.reason = "sufficient-only: the status is that of the hypercyclicity condition; see sub-verdicts"
    return v


# ------------------------------------------------------------- dichotomy

def check_dichotomy_preconditions(cfg, horizon=48, th=Thresholds(), bounded=None, dec=None) -> Verdict:
    v = Verdict(Status.INCONCLUSIVE, thresholds={**th.to_dict(), "horizon": horizon})
    dec = dec or decompose(cfg, i_max=60, compact_tol=th.compact_tol)
    a_call, sides = _edge_growth(dec.alpha, th)
    s1 = {"bounded": Status.HOLDS, "unbounded": Status.FAILS}.get(a_call, Status.INCONCLUSIVE)
    rho, tail = _rho_tail(cfg)
    s2 = Status.HOLDS if rho < 1.0 else (Status.FAILS if np.all(tail >= 1.0) else Status.INCONCLUSIVE)
    neg, _ = _chaos_series(cfg, horizon)
    neg2, _ = _chaos_series(cfg, 2 * horizon)
    c3 = tends_to_infinity(neg2, th, horizon=horizon)
    s3 = {"bounded": Status.HOLDS, "diverges": Status.FAILS}.get(c3.call, Status.INCONCLUSIVE)
    v.sub["sup_weights"] = Verdict(s1, [["sup_abs_alpha_window", float(np.max(np.abs(dec.alpha)))],
                                        ["edge_behaviour", sides]])
    v.sub["limsup_ratio"] = Verdict(s2, [["rho_estimate", rho], ["rho_tail", tail]])
    v.sub["sup_negative_products"] = Verdict(s3, [["ln_series", neg], ["call", c3.to_dict()]])
    statuses = [s1, s2, s3]
    if Status.FAILS in statuses:
        v.status = Status.FAILS
        names = [k for k, s in zip(v.sub, statuses) if s is Status.FAILS]
        v.reason = "precondition fails: " + ", ".join(names)
    elif all(s is Status.HOLDS for s in statuses):
        v.status = Status.HOLDS
        v.reason = "all three preconditions hold"
    else:
        v.reason = "some preconditions undecided"
    return v


# ---------------------------------------------------------------- report

REPORT_KEYS = ("boundedness", "hypercyclic", "mixing", "supercyclic", "chaotic", "generic",
               "dichotomy_preconditions", "essential_spectrum", "hypercyclic_subspace")


def analyze(cfg: ShiftConfig, horizon: int = 48, n_max: int = 8, th: Thresholds = Thresholds(),
            threads: int = 1) -> dict:
    """Run every check and return the report with a fixed key order."""
    dec = decompose(cfg, i_max=60, compact_tol=th.compact_tol)
    bounded = check_boundedness(cfg, horizon, th, dec)
    hyp = check_hypercyclic(cfg, n_max, horizon, th, threads, bounded)
    mix = check_mixing(cfg, n_max, horizon, th, threads, bounded)
    sup = check_supercyclic(cfg, n_max, horizon, th, threads, bounded)
    chaos = check_chaotic(cfg, horizon, th, bounded)
    generic = check_generic_criteria(cfg, n_max, horizon, th, threads)
    dich = check_dichotomy_preconditions(cfg, horizon, th, bounded, dec)

    try:
        es = essential_spectrum_estimate(dec)
        ess = Verdict(Status(es.status), [[k, val] for k, val in es.to_dict().items()],
                      {"compact_tol": th.compact_tol}, es.note)
        ess.add("compactness", {"status": dec.compact, **dec.compact_evidence})
        meets = es.meets_unit_circle
    except ZeroWeight as exc:
        ess = Verdict(Status.INCONCLUSIVE, [], {"compact_tol": th.compact_tol}, str(exc))
        meets = None

    if hyp.status is Status.FAILS:
        hs = False
    elif hyp.status is Status.HOLDS and dec.compact == "Holds" and meets is not None:
        hs = bool(meets)
    else:
        hs = None

    out = {
        "boundedness": bounded.to_dict(),
        "hypercyclic": hyp.to_dict(),
        "mixing": mix.to_dict(),
        "supercyclic": sup.to_dict(),
        "chaotic": chaos.to_dict(),
        "generic": generic.to_dict(),
        "dichotomy_preconditions": dich.to_dict(),
        "essential_spectrum": ess.to_dict(),
        "hypercyclic_subspace": hs,
    }
    return out


def statuses(report: dict) -> dict:
    """Just the status of each entry of an :func:`analyze` report."""
    return {k: (v["status"] if isinstance(v, dict) else v) for k, v in report.items()}
