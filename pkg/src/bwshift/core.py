"""Numeric substrate: signed-log scalars, bilateral vectors, space parameters.

Products of long weight sequences overflow doubles quickly (a product of
2^k for k up to 40 is already past 1e240), so every product that feeds a
criterion is carried as a sign plus a natural-log magnitude and only turned
back into a float at the reporting boundary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import NonFiniteValue, WrongBasis, ZeroA

LN_MAX = 709.0  # exp() of anything larger overflows a double


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as ``sign * exp(ln_mag)``.

    ``sign`` is -1, 0 or +1 and ``ln_mag`` is ``-inf`` exactly when the
    value is zero.
    """

    sign: int
    ln_mag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or 1")
        if (self.sign == 0) != (self.ln_mag == -math.inf):
            raise ValueError("ln_mag is -inf exactly when sign is 0")
        if math.isnan(self.ln_mag) or self.ln_mag == math.inf:
            raise ValueError("ln_mag must be finite or -inf")

    @classmethod
    def from_real(cls, x: float) -> "SignedLog":
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r}")
        if x == 0.0:
            return ZERO
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_parts(cls, sign, ln_mag) -> "SignedLog":
        if sign == 0 or ln_mag == -math.inf:
            return ZERO
        return cls(int(sign), float(ln_mag))

    def to_real(self) -> float:
        """Convert back to a float; saturates to +-inf instead of raising."""
        if self.sign == 0:
            return 0.0
        if self.ln_mag > 709.782712893384:
            return self.sign * math.inf
        return self.sign * math.exp(self.ln_mag)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other):
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return SignedLog(self.sign * other.sign, self.ln_mag + other.ln_mag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLog")
        if self.sign == 0:
            return ZERO
        return SignedLog(self.sign * other.sign, self.ln_mag - other.ln_mag)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def reciprocal(self) -> "SignedLog":
        return ONE / self

    def __neg__(self):
        return SignedLog(-self.sign, self.ln_mag)

    def __abs__(self):
        return SignedLog(abs(self.sign), self.ln_mag)

    def __pow__(self, p):
        """Real power of the magnitude; sign kept only for integer p."""
        if self.sign == 0:
            return ZERO if p > 0 else (ONE if p == 0 else _raise_zero_pow())
        sign = 1
        if self.sign < 0:
            if float(p).is_integer():
                sign = -1 if int(p) % 2 else 1
            else:
                raise ValueError("fractional power of a negative SignedLog")
        return SignedLog(sign, self.ln_mag * p)

    def __add__(self, other):
        return slog_sum([self, _coerce(other)])

    __radd__ = __add__

    def __sub__(self, other):
        return slog_sum([self, -_coerce(other)])

    def __rsub__(self, other):
        return slog_sum([_coerce(other), -self])

    def __repr__(self):
        return f"SignedLog(sign={self.sign}, ln_mag={self.ln_mag!r})"


def _raise_zero_pow():
    raise ZeroDivisionError("negative power of zero")


def _coerce(x) -> SignedLog:
    return x if isinstance(x, SignedLog) else SignedLog.from_real(x)


ZERO = SignedLog(0, -math.inf)
ONE = SignedLog(1, 0.0)


def slog_product(factors: Iterable[float]) -> SignedLog:
    """Product of real factors in signed-log form. The empty product is one."""
    sign = 1
    logs = []
    for x in factors:
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"non-finite factor {x!r}")
        if x == 0.0:
            sign = 0
            continue
        if x < 0:
            sign = -sign
        logs.append(math.log(abs(x)))
    if sign == 0:
        return ZERO
    # fsum keeps the result independent of factor order
    return SignedLog(sign, math.fsum(logs))


def slog_sum(terms: Iterable[SignedLog]) -> SignedLog:
    """Sum of signed-log terms, factoring out the largest magnitude."""
    terms = [t for t in map(_coerce, terms) if t.sign != 0]
    if not terms:
        return ZERO
    m = max(t.ln_mag for t in terms)
    total = math.fsum(t.sign * math.exp(t.ln_mag - m) for t in terms)
    if total == 0.0:
        return ZERO
    return SignedLog(1 if total > 0 else -1, m + math.log(abs(total)))


def logsumexp_signed(signs: np.ndarray, logs: np.ndarray) -> tuple[float, float]:
    """Vector version of :func:`slog_sum`; returns ``(sign, ln_mag)``."""
    signs = np.asarray(signs, dtype=float)
    logs = np.asarray(logs, dtype=float)
    keep = (signs != 0) & np.isfinite(logs)
    if not keep.any():
        return 0.0, -math.inf
    s, l = signs[keep], logs[keep]
    m = l.max()
    total = math.fsum(s * np.exp(l - m))
    if total == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, total), m + math.log(abs(total))


class PrefixProduct:
    """Range products of a real sequence stored on ``[offset, offset+len)``.

    Signs and zeros are tracked with counters so a range product is O(1).
    """

    def __init__(self, values, offset: int):
        v = np.asarray(values, dtype=float)
        self.values = v
        self.offset = int(offset)
        zero = v == 0.0
        with np.errstate(divide="ignore"):
            logs = np.where(zero, 0.0, np.log(np.abs(v)))
        # extended precision keeps long prefix sums from drifting
        self._log = np.concatenate([[0.0], np.cumsum(logs.astype(np.longdouble))])
        self._neg = np.concatenate([[0], np.cumsum(v < 0)])
        self._zero = np.concatenate([[0], np.cumsum(zero)])

    @property
    def lo(self):
        return self.offset

    @property
    def hi(self):
        return self.offset + len(self.values) - 1

    def _check(self, lo, hi):
        if hi >= lo and (lo < self.lo or hi > self.hi):
            raise IndexError(f"range [{lo}, {hi}] outside table [{self.lo}, {self.hi}]")

    def slog(self, lo: int, hi: int) -> SignedLog:
        """Product over lo..hi inclusive; empty range gives one."""
        if hi < lo:
            return ONE
        self._check(lo, hi)
        i, j = lo - self.offset, hi - self.offset + 1
        if self._zero[j] - self._zero[i]:
            return ZERO
        sign = -1 if (self._neg[j] - self._neg[i]) % 2 else 1
        return SignedLog(sign, float(self._log[j] - self._log[i]))

    def batch(self, lo, hi):
        """Vectorized range products; returns ``(signs, logs)`` arrays."""
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        empty = hi < lo
        i = np.where(empty, 0, lo - self.offset)
        j = np.where(empty, 0, hi - self.offset + 1)
        if (~empty).any() and (i[~empty].min() < 0 or j[~empty].max() > len(self.values)):
            raise IndexError("batch range outside table")
        logs = (self._log[j] - self._log[i]).astype(float)
        neg = (self._neg[j] - self._neg[i]) % 2
        signs = np.where(neg == 1, -1.0, 1.0)
        zero = (self._zero[j] - self._zero[i]) > 0
        signs = np.where(zero, 0.0, signs)
        logs = np.where(zero, -np.inf, logs)
        return signs, logs

    def real(self, lo: int, hi: int) -> float:
        """Range product as a float, multiplied directly when it fits.

        Direct multiplication keeps exact results exact (powers of two stay
        powers of two), which matters where two products cancel.
        """
        s = self.slog(lo, hi)
        if s.sign == 0:
            return 0.0
        if abs(s.ln_mag) < 600:
            return float(np.prod(self.values[lo - self.offset: hi - self.offset + 1]))
        return s.to_real()


class NormKind(str, enum.Enum):
    LP = "lp"
    C0 = "c0"


class BasisVariant(str, enum.Enum):
    FULL = "full_affine"
    SPLIT = "split_affine"


class Basis(str, enum.Enum):
    LAURENT = "laurent"
    SCHAUDER = "schauder"


@dataclass(frozen=True)
class SpaceParams:
    """Norm, basis variant and index window of a space."""

    norm_kind: NormKind = NormKind.LP
    p: float = 2.0
    basis_variant: BasisVariant = BasisVariant.SPLIT
    window: tuple = (-64, 64)

    def __post_init__(self):
        object.__setattr__(self, "norm_kind", NormKind(self.norm_kind))
        object.__setattr__(self, "basis_variant", BasisVariant(self.basis_variant))
        lo, hi = (int(x) for x in self.window)
        object.__setattr__(self, "window", (lo, hi))
        if not lo < 0 < hi:
            raise ValueError(f"window must satisfy n_min < 0 < n_max, got {self.window}")
        if self.norm_kind is NormKind.LP:
            p = float(self.p)
            if not (p >= 1.0 and math.isfinite(p)):
                raise ValueError(f"p must be a finite number >= 1, got {self.p!r}")
            object.__setattr__(self, "p", p)

    @property
    def q(self) -> float:
        """Conjugate exponent; inf for p = 1 and 1 for c0."""
        if self.norm_kind is NormKind.C0:
            return 1.0
        if self.p == 1.0:
            return math.inf
        return self.p / (self.p - 1.0)

    @property
    def n_min(self):
        return self.window[0]

    @property
    def n_max(self):
        return self.window[1]

    @property
    def size(self):
        return self.window[1] - self.window[0] + 1

    def label(self) -> str:
        return "c0" if self.norm_kind is NormKind.C0 else f"l^{self.p:g}"

    def replace(self, **changes) -> "SpaceParams":
        d = dict(norm_kind=self.norm_kind, p=self.p,
                 basis_variant=self.basis_variant, window=self.window)
        d.update(changes)
        return SpaceParams(**d)


class SequenceTables:
    """Dense arrays of a, b (effective) and w on an index range, plus
    prefix products of each and of the ratios b_n / a_{n+1}."""

    def __init__(self, cfg: "ShiftConfig", lo: int, hi: int):
        self.lo, self.hi = lo, hi
        idx = np.arange(lo, hi + 1)
        self.index = idx
        self.a = np.array([cfg.a(int(n)) for n in idx])
        self.b = np.array([cfg.b(int(n)) for n in idx])
        self.w = np.array([cfg.w(int(n)) for n in idx])
        self.pa = PrefixProduct(self.a, lo)
        self.pb = PrefixProduct(self.b, lo)
        self.pw = PrefixProduct(self.w, lo)
        # ratio r_m = b_m / a_{m+1}, defined for m in [lo, hi-1]
        self.ratio = self.b[:-1] / self.a[1:]
        self.pr = PrefixProduct(self.ratio, lo)

    def at(self, name: str, n):
        arr = getattr(self, name)
        return arr[np.asarray(n) - self.lo]


class ShiftConfig:
    """Sequences a, b, w together with space parameters.

    The sequences are callables ``int -> float``. ``b`` reported by this
    class is the effective one: zero for n <= -1 in the split variant.
    Values are cached since expression evaluation is comparatively slow.
    """

    def __init__(self, a: Callable, b: Callable, w: Callable,
                 params: SpaceParams | None = None, name: str = ""):
        self.params = params or SpaceParams()
        self.name = name
        self._a, self._b, self._w = a, b, w
        self._cache = {"a": {}, "b": {}, "w": {}}
        self._tables = {}

    def _value(self, key, fn, n):
        cache = self._cache[key]
        v = cache.get(n)
        if v is None:
            v = float(fn(n))
            if not math.isfinite(v):
                raise NonFiniteValue(n, name=key)
            cache[n] = v
        return v

    def a(self, n: int) -> float:
        v = self._value("a", self._a, n)
        if v == 0.0:
            raise ZeroA(n)
        return v

    def b(self, n: int) -> float:
        if self.params.basis_variant is BasisVariant.SPLIT and n <= -1:
            return 0.0
        return self._value("b", self._b, n)

    def b_raw(self, n: int) -> float:
        return self._value("b", self._b, n)

    def w(self, n: int) -> float:
        return self._value("w", self._w, n)

    def tables(self, lo: int, hi: int) -> SequenceTables:
        key = (lo, hi)
        t = self._tables.get(key)
        if t is None:
            # reuse a larger table when one exists
            for (l2, h2), t2 in self._tables.items():
                if l2 <= lo and h2 >= hi:
                    return t2
            t = SequenceTables(self, lo, hi)
            self._tables[key] = t
        return t

    def with_params(self, **changes) -> "ShiftConfig":
        """Same sequences, different space parameters."""
        cfg = ShiftConfig(self._a, self._b, self._w, self.params.replace(**changes), self.name)
        if cfg.params.basis_variant is self.params.basis_variant:
            cfg._cache = self._cache
        else:
            cfg._cache = {"a": self._cache["a"], "b": self._cache["b"], "w": self._cache["w"]}
        return cfg

    @property
    def window(self):
        return self.params.window

    def __repr__(self):
        return f"ShiftConfig(name={self.name!r}, params={self.params})"


@dataclass(frozen=True, eq=False)
class BilateralVector:
    """Finitely supported coefficients on a window ``[offset, offset+len)``.

    ``tainted`` optionally marks coordinates whose values are unreliable
    because of window truncation.
    """

    offset: int
    coeffs: np.ndarray
    basis: Basis = Basis.SCHAUDER
    tainted: np.ndarray | None = field(default=None)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1:
            raise ValueError("coeffs must be one-dimensional")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "basis", Basis(self.basis))
        if self.tainted is not None:
            t = np.array(self.tainted, dtype=bool)
            if t.shape != c.shape:
                raise ValueError("taint mask must match coeffs")
            t.setflags(write=False)
            object.__setattr__(self, "tainted", t)

    @classmethod
    def zeros(cls, window, basis=Basis.SCHAUDER):
        lo, hi = window
        return cls(lo, np.zeros(hi - lo + 1), basis)

    @classmethod
    def unit(cls, n, window, basis=Basis.SCHAUDER, scale=1.0):
        lo, hi = window
        if not lo <= n <= hi:
            raise IndexError(f"index {n} outside window {window}")
        c = np.zeros(hi - lo + 1)
        c[n - lo] = scale
        return cls(lo, c, basis)

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float], window, basis=Basis.SCHAUDER):
        lo, hi = window
        c = np.zeros(hi - lo + 1)
        for n, x in mapping.items():
            n = int(n)
            if not lo <= n <= hi:
                raise IndexError(f"index {n} outside window {window}")
            c[n - lo] = float(x)
        return cls(lo, c, basis)

    @property
    def n_min(self):
        return self.offset

    @property
    def n_max(self):
        return self.offset + len(self.coeffs) - 1

    @property
    def window(self):
        return (self.n_min, self.n_max)

    @property
    def indices(self):
        return np.arange(self.n_min, self.n_max + 1)

    def __getitem__(self, n: int) -> float:
        i = n - self.offset
        if 0 <= i < len(self.coeffs):
            return float(self.coeffs[i])
        return 0.0

    def taint_mask(self) -> np.ndarray:
        if self.tainted is None:
            return np.zeros(len(self.coeffs), dtype=bool)
        return self.tainted

    def to_mapping(self) -> dict:
        return {int(n): float(x) for n, x in zip(self.indices, self.coeffs) if x != 0.0}

    def with_coeffs(self, coeffs, tainted=None) -> "BilateralVector":
        return BilateralVector(self.offset, coeffs, self.basis, tainted)

    def restrict(self, window) -> "BilateralVector":
        """Re-index onto another window, dropping or zero-padding."""
        lo, hi = window
        c = np.zeros(hi - lo + 1)
        t = np.zeros(hi - lo + 1, dtype=bool)
        s_lo, s_hi = max(lo, self.n_min), min(hi, self.n_max)
        if s_lo <= s_hi:
            c[s_lo - lo: s_hi - lo + 1] = self.coeffs[s_lo - self.n_min: s_hi - self.n_min + 1]
            t[s_lo - lo: s_hi - lo + 1] = self.taint_mask()[s_lo - self.n_min: s_hi - self.n_min + 1]
        return BilateralVector(lo, c, self.basis, t if self.tainted is not None else None)

    def _check_compatible(self, other):
        if self.basis is not other.basis:
            raise WrongBasis(f"cannot combine {self.basis.value} and {other.basis.value} vectors")
        if self.window != other.window:
            raise ValueError(f"window mismatch {self.window} vs {other.window}")

    def __add__(self, other):
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs + other.coeffs, _merge_taint(self, other))

    def __sub__(self, other):
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs - other.coeffs, _merge_taint(self, other))

    def __mul__(self, s):
        return self.with_coeffs(self.coeffs * float(s), self.tainted)

    __rmul__ = __mul__

    def __repr__(self):
        nz = self.to_mapping()
        shown = dict(list(nz.items())[:6])
        more = "" if len(nz) <= 6 else f", +{len(nz) - 6} more"
        return f"BilateralVector({self.basis.value}, window={self.window}, {shown}{more})"


def _merge_taint(u, v):
    if u.tainted is None and v.tainted is None:
        return None
    return u.taint_mask() | v.taint_mask()


def lp_norm(x, p: float) -> float:
    """Max-factored l^p norm of a finite array."""
    x = np.abs(np.asarray(x, dtype=float))
    if x.size == 0:
        return 0.0
    m = x.max()
    if m == 0.0 or not math.isfinite(m):
        return float(m)
    return float(m * np.sum((x / m) ** p) ** (1.0 / p))


def vector_norm(v: BilateralVector, params: SpaceParams) -> float:
    """Space norm of a Schauder-coefficient vector."""
    if v.basis is not Basis.SCHAUDER:
        raise WrongBasis("the space norm is defined on Schauder coefficients")
    if params.norm_kind is NormKind.C0:
        return float(np.max(np.abs(v.coeffs))) if v.coeffs.size else 0.0
    return lp_norm(v.coeffs, params.p)


# ---------------------------------------------------------------------------
# limits from finitely many terms

@dataclass(frozen=True)
class RootLimit:
    """Estimate of limsup x_n^{1/n} as n -> +inf."""

    value: float          # extrapolated estimate
    raw: float            # max of x_n^{1/n} over the top quartile
    residual: float       # max residual of the extrapolating fit
    method: str
    tail: tuple           # (n, x_n^{1/n}) over the top quartile


_FIT_BASES = ((0, 1, 2, 3, 4, 5, 6), (0, 1, 1.5, 2, 2.5, 3, 3.5, 4))


def root_limit(x: Callable[[int], float], N: int, fit_tol: float = 1e-6) -> RootLimit:
    """Estimate ``limsup_{n->inf} |x_n|^{1/n}`` from n = 1..N.

    The raw estimate is the maximum of |x_n|^{1/n} over the top quartile.
    It converges like O(log n / n), far too slowly for six digits, so the
    returned value extrapolates instead: the log-increments
    ``ln x_{n+1} - ln x_n`` are fitted by a short series in ``1/(n+1/2)``
    and the constant term is the log of the limit. When no basis fits the
    tail (oscillating sequences), the raw estimate is returned.
    """
    ns = np.arange(1, N + 1)
    mags = np.array([abs(float(x(int(n)))) for n in ns])
    with np.errstate(divide="ignore"):
        logs = np.log(mags)
    q0 = max(1, (3 * N) // 4)
    top = ns >= q0
    roots = np.exp(logs[top] / ns[top])
    raw = float(np.max(roots))
    tail = tuple((int(n), float(r)) for n, r in zip(ns[top], roots))
    if not np.all(np.isfinite(logs)) or N < 16:
        return RootLimit(raw, raw, math.inf, "raw", tail)
    d = np.diff(logs)
    nn = ns[:-1]
    keep = nn >= max(1, N // 4)
    t = 1.0 / (nn[keep] + 0.5)
    best = None
    for powers in _FIT_BASES:
        V = np.column_stack([t ** e for e in powers])
        coef, *_ = np.linalg.lstsq(V, d[keep], rcond=None)
        res = float(np.max(np.abs(V @ coef - d[keep])))
        if best is None or res < best[1]:
            best = (float(coef[0]), res)
    if best[1] > fit_tol:
        return RootLimit(raw, raw, best[1], "raw", tail)
    return RootLimit(math.exp(best[0]), raw, best[1], "extrapolated", tail)

