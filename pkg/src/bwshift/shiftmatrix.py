"""Truncated matrices of B_w and its powers in the Schauder basis.

Column n of the matrix of B_w^nu holds A_{n,nu} in row n-nu and
C_{n,nu} times the expansion of z^{n-nu+1} from row n-nu+1 downwards:

    A_{n,nu} = w_n ... w_{n-nu+1} a_n / a_{n-nu}
    C_{n,nu} = (w_{n+1} ... w_{n-nu+2} b_n - w_n ... w_{n-nu+1} a_n b_{n-nu} / a_{n-nu}) / a_{n-nu+1}

with b read through the basis variant, so in the split variant C vanishes
for n <= -1 and negative columns are pure shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (Basis, BasisVariant, BilateralVector, ShiftConfig, SignedLog)
from .errors import WrongBasis, ZeroWeight

_SAFE_LN = 600.0


# ------------------------------------------------------------ coefficients

def c_coefficient(n: int, cfg: ShiftConfig) -> float:
    """Diagonal entry c_n = w_{n+1} b_n / a_n - w_n b_{n-1} / a_{n-1}."""
    return cfg.w(n + 1) * cfg.b(n) / cfg.a(n) - cfg.w(n) * cfg.b(n - 1) / cfg.a(n - 1)


def A_coefficient(n: int, nu: int, cfg: ShiftConfig) -> SignedLog:
    t = cfg.tables(n - nu - 1, n + 2)
    return t.pw.slog(n - nu + 1, n) * SignedLog.from_real(cfg.a(n)) / SignedLog.from_real(cfg.a(n - nu))


def C_coefficient(n: int, nu: int, cfg: ShiftConfig) -> SignedLog:
    s, l = _C_arrays(cfg, np.array([n]), nu)
    return SignedLog.from_parts(int(s[0]), float(l[0]))


def _tables_for(cfg, lo, hi, nu):
    return cfg.tables(lo - nu - 2, hi + nu + 2)


def _A_arrays(cfg, ns, nu):
    """Signs and log-magnitudes of A_{n,nu} for an array of n."""
    t = _tables_for(cfg, int(ns.min()), int(ns.max()), nu)
    s, l = t.pw.batch(ns - nu + 1, ns)
    a_n = t.at("a", ns)
    a_m = t.at("a", ns - nu)
    s = s * np.sign(a_n) * np.sign(a_m)
    l = l + np.log(np.abs(a_n)) - np.log(np.abs(a_m))
    # direct products where they fit, for round-off comparable to a float product
    for i in np.nonzero((s != 0) & (np.abs(l) < _SAFE_LN))[0]:
        n = int(ns[i])
        x = t.pw.real(n - nu + 1, n) * a_n[i] / a_m[i]
        l[i] = math.log(abs(x))
    return s, np.where(s == 0, -np.inf, l)


def _C_arrays(cfg, ns, nu):
    """Signs and log-magnitudes of C_{n,nu}.

    The two terms can cancel exactly (powers of two in the bundled
    examples), so whenever both fit in a double the difference is formed
    from directly multiplied floats; otherwise it is formed in log space.
    """
    t = _tables_for(cfg, int(ns.min()), int(ns.max()), nu)
    signs = np.zeros(len(ns))
    logs = np.full(len(ns), -np.inf)
    for i, n in enumerate(ns):
        n = int(n)
        b_n, b_m = cfg.b(n), cfg.b(n - nu)
        if b_n == 0.0 and b_m == 0.0:
            continue
        a_n, a_m, a_m1 = cfg.a(n), cfg.a(n - nu), cfg.a(n - nu + 1)
        w1 = t.pw.slog(n - nu + 2, n + 1)
        w0 = t.pw.slog(n - nu + 1, n)
        t1 = w1 * SignedLog.from_real(b_n) / SignedLog.from_real(a_m1)
        t2 = w0 * SignedLog.from_real(a_n * b_m / a_m) / SignedLog.from_real(a_m1) if b_m != 0.0 else SignedLog.from_real(0.0)
        if all(x.sign == 0 or abs(x.ln_mag) < _SAFE_LN for x in (t1, t2, w0, w1)):
            v1 = t.pw.real(n - nu + 2, n + 1) * b_n
            v2 = t.pw.real(n - nu + 1, n) * a_n * b_m / a_m if b_m != 0.0 else 0.0
            val = (v1 - v2) / a_m1
            if val != 0.0:
                signs[i] = math.copysign(1.0, val)
                logs[i] = math.log(abs(val))
            continue
        c = t1 - t2
        signs[i], logs[i] = c.sign, c.ln_mag
    return signs, logs


def _to_real(signs, logs):
    with np.errstate(over="ignore"):
        out = signs * np.exp(np.minimum(logs, 709.78))
    big = logs > 709.78
    out[big] = signs[big] * np.inf
    out[signs == 0] = 0.0
    return out


def _rowwise_sum(signs, logs):
    """Signed log-sum-exp along the last axis."""
    finite = (signs != 0) & np.isfinite(logs)
    m = np.where(finite, logs, -np.inf).max(axis=-1)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(invalid="ignore", over="ignore"):
        terms = np.where(finite, signs * np.exp(logs - m_safe[..., None]), 0.0)
    total = terms.sum(axis=-1)
    out_s = np.sign(total)
    with np.errstate(divide="ignore"):
        out_l = np.where(total != 0, m_safe + np.log(np.abs(total)), -np.inf)
    return out_s, out_l


# ------------------------------------------------------------------ matrix

@dataclass
class TruncatedMatrix:
    """Dense block of [B_w^nu] on a bilateral window.

    ``entries[i, j]`` is the entry in row ``lo+i`` and column ``lo+j``.
    ``dropped`` is, per column, an estimate of the l^1 mass of the entries
    that fall outside the window.
    """

    window: tuple
    nu: int
    entries: np.ndarray
    basis_variant: BasisVariant
    dropped: np.ndarray = field(default=None)

    @property
    def index(self):
        return np.arange(self.window[0], self.window[1] + 1)

    def entry(self, row: int, col: int) -> float:
        lo = self.window[0]
        return float(self.entries[row - lo, col - lo])

    def diagonal(self, offset: int) -> dict:
        """Entries (n - offset, n), keyed by column n; offset=1 is the superdiagonal."""
        lo, hi = self.window
        out = {}
        for n in range(lo, hi + 1):
            r = n - offset
            if lo <= r <= hi:
                out[n] = self.entry(r, n)
        return out

    def column(self, n: int) -> np.ndarray:
        return self.entries[:, n - self.window[0]]

    def to_csv(self) -> str:
        lo, hi = self.window
        lines = ["row," + ",".join(str(n) for n in range(lo, hi + 1))]
        for i, n in enumerate(range(lo, hi + 1)):
            lines.append(f"{n}," + ",".join(_fmt(x) for x in self.entries[i]))
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    if x == 0.0:
        return "0"
    return f"{x:.17g}"


def _closed_form_columns(cfg, window, nu):
    """Entries from the column formula; valid in either basis variant."""
    lo, hi = window
    size = hi - lo + 1
    ns = np.arange(lo, hi + 1)
    M = np.zeros((size, size))
    dropped = np.zeros(size)
    A = _to_real(*_A_arrays(cfg, ns, nu))
    Cs, Cl = _C_arrays(cfg, ns, nu)
    t = cfg.tables(lo - nu - 2, hi + nu + 2)
    for j, n in enumerate(ns):
        row = n - nu
        if row >= lo:
            M[row - lo, j] = A[j]
        else:
            dropped[j] += abs(A[j])
        if Cs[j] == 0:
            continue
        start = n - nu + 1
        rows = np.arange(max(start, lo), hi + 1)
        if rows.size == 0:
            dropped[j] += math.exp(min(Cl[j], 709.0))
            continue
        # entry at row start+k is C (-1)^k prod_{m=start}^{start+k-1} b_m/a_{m+1}
        k = rows - start
        s, l = t.pr.batch(np.full(len(k), start), start + k - 1)
        s = s * np.where(k % 2 == 1, -1.0, 1.0) * Cs[j]
        M[rows - lo, j] = _to_real(s, l + Cl[j])
        last = abs(M[hi - lo, j])
        r_last = abs(t.ratio[hi - t.lo]) if hi - t.lo < len(t.ratio) else 0.0
        if last and r_last < 1.0:
            dropped[j] += last * r_last / (1.0 - r_last)
        elif last:
            dropped[j] = math.inf
    return M, dropped


def assemble_matrix(cfg: ShiftConfig, nu: int = 1, window=None) -> TruncatedMatrix:
    """Window block of [B_w^nu].

    In the split variant every power comes from the closed-form columns.
    In the full variant only nu = 1 has a closed form; higher powers are
    products of the nu = 1 block on a window padded by nu on both sides.
    """
    if nu < 1:
        raise ValueError("nu must be >= 1")
    window = cfg.window if window is None else tuple(window)
    variant = cfg.params.basis_variant
    if variant is BasisVariant.SPLIT or nu == 1:
        M, dropped = _closed_form_columns(cfg, window, nu)
        return TruncatedMatrix(window, nu, M, variant, dropped)
    lo, hi = window
    pad = (lo - nu, hi + nu)
    M1, _ = _closed_form_columns(cfg, pad, 1)
    P = np.linalg.matrix_power(M1, nu)
    k = hi - lo + 1
    return TruncatedMatrix(window, nu, P[nu:nu + k, nu:nu + k].copy(), variant,
                           np.full(k, np.nan))


# ------------------------------------------------------------------- apply

def _edge_mask(window, nu):
    lo, hi = window
    idx = np.arange(lo, hi + 1)
    return (idx < lo + nu) | (idx > hi - nu)


def apply(cfg: ShiftConfig, nu: int, v: BilateralVector) -> BilateralVector:
    """Schauder coefficients of B_w^nu v on the window of v.

    In the split variant each output coordinate is formed from the
    closed-form three-case expression, summed in log space:

        alpha_j = A_{nu+j} l_{nu+j} + C_{nu+j-1} l_{nu+j-1}
                  + sum_{k=nu-1}^{nu+j-2} (-1)^{nu+j-1-k} C_k l_k prod_{m=k-nu+1}^{j-1} b_m/a_{m+1}

    where the sum is empty for j <= 0. Coordinates within nu of either
    window edge are marked as tainted.
    """
    if v.basis is not Basis.SCHAUDER:
        raise WrongBasis("apply expects Schauder coefficients")
    if nu < 1:
        raise ValueError("nu must be >= 1")
    lo, hi = v.window
    taint = _edge_mask(v.window, nu)
    if not np.any(v.coeffs):
        return v.with_coeffs(np.zeros_like(v.coeffs), taint)
    if cfg.params.basis_variant is not BasisVariant.SPLIT:
        M = assemble_matrix(cfg, nu, v.window)
        return v.with_coeffs(M.entries @ v.coeffs, taint)

    lam = v.coeffs
    js = np.arange(lo, hi + 1)
    t = cfg.tables(lo - nu - 2, hi + nu + 2)

    def lam_at(idx):
        inside = (idx >= lo) & (idx <= hi)
        out = np.zeros(len(idx))
        out[inside] = lam[idx[inside] - lo]
        return out

    # shift term and first C term
    nA = js + nu
    lamA = lam_at(nA)
    As, Al = _A_arrays(cfg, nA, nu)
    nC = js + nu - 1
    lamC = lam_at(nC)
    Cs_j, Cl_j = _C_arrays(cfg, nC, nu)
    with np.errstate(divide="ignore"):
        s1 = As * np.sign(lamA)
        l1 = Al + np.log(np.abs(lamA))
        s2 = Cs_j * np.sign(lamC)
        l2 = Cl_j + np.log(np.abs(lamC))

    # tails of columns k >= nu-1 whose C-entry sits at row s_k = k-nu+1 >= 0
    ks = np.arange(max(nu - 1, lo), hi + 1)
    cols = [s1[:, None], s2[:, None]]
    logs = [l1[:, None], l2[:, None]]
    if ks.size:
        Ck_s, Ck_l = _C_arrays(cfg, ks, nu)
        lam_k = lam_at(ks)
        keep = (Ck_s != 0) & (lam_k != 0)
        ks, Ck_s, Ck_l, lam_k = ks[keep], Ck_s[keep], Ck_l[keep], lam_k[keep]
        if ks.size:
            s_k = ks - nu + 1
            J = js[:, None]
            S = s_k[None, :]
            active = J > S
            hi_idx = np.where(active, J - 1, S - 1)
            ps, pl = t.pr.batch(np.broadcast_to(S, hi_idx.shape), hi_idx)
            parity = np.where((J - S) % 2 == 1, -1.0, 1.0)
            ts = np.where(active, ps * parity * Ck_s[None, :] * np.sign(lam_k)[None, :], 0.0)
            tl = np.where(active, pl + Ck_l[None, :] + np.log(np.abs(lam_k))[None, :], -np.inf)
            cols.append(ts)
            logs.append(tl)
    S_all = np.concatenate(cols, axis=1)
    L_all = np.concatenate(logs, axis=1)
    out_s, out_l = _rowwise_sum(S_all, L_all)
    return v.with_coeffs(_to_real(out_s, out_l), taint)


def apply_slog(cfg: ShiftConfig, nu: int, v: BilateralVector):
    """Like :func:`apply` but also returns per-coordinate (signs, logs)."""
    out = apply(cfg, nu, v)
    with np.errstate(divide="ignore"):
        return out, np.sign(out.coeffs), np.log(np.abs(out.coeffs))


_M1_CACHE_ATTR = "_m1_cache"


def apply_iterated(cfg: ShiftConfig, nu: int, v: BilateralVector) -> BilateralVector:
    """Apply the nu = 1 block nu times; the oracle for :func:`apply`."""
    if v.basis is not Basis.SCHAUDER:
        raise WrongBasis("apply expects Schauder coefficients")
    cache = getattr(cfg, _M1_CACHE_ATTR, None)
    if cache is None:
        cache = {}
        setattr(cfg, _M1_CACHE_ATTR, cache)
    # pad by nu below: mass pushed under the window feeds back up through C
    lo, hi = v.window
    pad = (lo - nu, hi)
    M = cache.get(pad)
    if M is None:
        M = assemble_matrix(cfg, 1, pad).entries
        cache[pad] = M
    x = np.concatenate([np.zeros(nu), v.coeffs])
    for _ in range(nu):
        x = M @ x
    return v.with_coeffs(x[nu:], _edge_mask(v.window, nu))


# ----------------------------------------------------------- decomposition

@dataclass
class Decomposition:
    """[B_w] = T_{-1} + D + sum_i T_i on a window.

    ``alpha[k]`` is the weight alpha_n = w_{n+1} a_{n+1} / a_n for
    n = lo + k, ``c`` the diagonal, and ``sub[i-1]`` the entries of T_i
    in rows n+i of columns n (kept for every i reaching inside the window).
    ``T_norms[i-1]`` is sup_n |c_n prod_{k=n}^{n+i-1} b_k / a_{k+1}|.
    """

    window: tuple
    alpha: np.ndarray
    c: np.ndarray
    sub: list
    T_norms: np.ndarray
    i_max: int
    tail_ratio: float
    tail_bound: float
    compact: str                # Holds / Fails / Inconclusive
    compact_evidence: dict

    def reassemble(self) -> np.ndarray:
        lo, hi = self.window
        k = hi - lo + 1
        M = np.diag(self.alpha[:-1], 1) + np.diag(self.c)
        for i, d in enumerate(self.sub, start=1):
            if i < k:
                M += np.diag(d[: k - i], -i)
        return M

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.T_norms)


def decompose(cfg: ShiftConfig, i_max: int = 60, compact_tol: float = 1e-2) -> Decomposition:
    """Split [B_w] into a weighted shift, a diagonal and subdiagonals."""
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    lo, hi = cfg.window
    k = hi - lo + 1
    reach = max(i_max, k) + 2
    t = cfg.tables(lo - 2, hi + reach + 2)
    ns = np.arange(lo, hi + 1)
    alpha = t.at("w", ns + 1) * t.at("a", ns + 1) / t.at("a", ns)
    c = np.array([c_coefficient(int(n), cfg) for n in ns])

    # T_i entry in column n: c_n (-1)^i prod_{m=n}^{n+i-1} b_m / a_{m+1}
    n_i = max(i_max, k - 1)
    I = np.arange(1, n_i + 1)[:, None]
    N = ns[None, :]
    ps, pl = t.pr.batch(np.broadcast_to(N, (n_i, k)), N + I - 1)
    mag = np.abs(c)[None, :] * _to_real(np.abs(ps), pl)
    signs = np.sign(c)[None, :] * ps * np.where(I % 2 == 1, -1.0, 1.0)
    entries = signs * mag
    sub = [entries[i - 1] for i in range(1, k)]
    T_norms = mag[:i_max].max(axis=1)

    # geometric tail: ||T_{i+1}|| <= ||T_i|| sup_{m >= n0+i} |b_m / a_{m+1}|
    nz = np.nonzero(c)[0]
    if nz.size:
        n0 = int(ns[nz[0]])
        ratios = np.abs(t.ratio[(n0 + i_max) - t.lo: (hi + i_max) - t.lo + 1])
        q = float(ratios.max()) if ratios.size else 0.0
        tail = float(T_norms[-1]) * q / (1.0 - q) if q < 1.0 else math.inf
    else:
        q, tail = 0.0, 0.0

    compact, ev = _compactness(ns, c, compact_tol)
    return Decomposition((lo, hi), alpha, c, sub, T_norms, i_max, q, tail, compact, ev)


def _compactness(ns, c, tol):
    """Evidence that c_n -> 0 as |n| -> inf on the window.

    The subdiagonal entries are c_n times products bounded by the same
    ratio bound, so the diagonal carries the decision.
    """
    k = len(ns)
    quarter = max(1, k // 8)
    outer = np.concatenate([np.abs(c[:quarter]), np.abs(c[-quarter:])])
    inner_idx = slice(quarter, k - quarter)
    outer_max = float(outer.max())
    ev = {"outer_max_abs_c": outer_max, "inner_max_abs_c": float(np.abs(c[inner_idx]).max()),
          "tolerance": tol, "outer_band": quarter}
    if outer_max <= tol:
        return "Holds", ev
    right = np.abs(c[-quarter:])
    left = np.abs(c[:quarter])
    if (np.ptp(right) == 0.0 and right[0] > 0) or (np.ptp(left) == 0.0 and left[0] > 0):
        ev["certificate"] = "c_n exactly constant and nonzero on an outer band"
        return "Fails", ev
    return "Inconclusive", ev


# ------------------------------------------------------ essential spectrum

@dataclass
class EssentialSpectrum:
    inner: float
    outer: float
    meets_unit_circle: bool
    block: int
    convergence: list      # (block length, inner, outer)
    status: str            # Holds when the compactness hypothesis holds
    note: str

    def to_dict(self):
        return {"inner": self.inner, "outer": self.outer,
                "meets_unit_circle": self.meets_unit_circle, "block": self.block,
                "convergence": [list(r) for r in self.convergence],
                "status": self.status, "note": self.note}


def essential_spectrum_estimate(dec: Decomposition, block: int | None = None) -> EssentialSpectrum:
    """Annulus radii from geometric means of |alpha| over sliding blocks.

    This is a finite-horizon heuristic: the longest block that fits twice
    on each side of zero is used, and shorter blocks are listed so the
    trend can be judged.
    """
    alpha = np.abs(dec.alpha)
    if np.any(alpha == 0.0):
        n = dec.window[0] + int(np.nonzero(alpha == 0.0)[0][0])
        raise ZeroWeight(n)
    lo, hi = dec.window
    if block is None:
        block = max(1, min(-lo, hi) // 2)
    la = np.log(alpha)
    cs = np.concatenate([[0.0], np.cumsum(la)])

    def radii(v):
        means = (cs[v:] - cs[:-v]) / v
        return float(np.exp(means.min())), float(np.exp(means.max()))

    conv = []
    v = 1
    while v < block:
        conv.append((v, *radii(v)))
        v *= 2
    inner, outer = radii(block)
    conv.append((block, inner, outer))
    status = "Holds" if dec.compact == "Holds" else "Inconclusive"
    note = "geometric-mean heuristic on a finite window"
    if status != "Holds":
        note += "; compact-perturbation evidence is missing, so this only describes the weighted-shift part"
    return EssentialSpectrum(inner, outer, inner <= 1.0 <= outer, block, conv, status, note)
