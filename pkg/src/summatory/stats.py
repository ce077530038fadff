"""Distributional statistics of mu/lambda over {1..n} with uniform measure.

Value masses, moments and the characteristic function are computed from
exact integer sign counts (values live in {-1, 0, +1}, so the counts carry
the full information). Block-sum and covariance estimators stream over
sieve segments and aggregate with exact integer arithmetic wherever the
quantity is an integer; floating aggregation uses ``math.fsum``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DomainError
from .sieve import DEFAULT_BLOCK_LEN, Kind, iter_mu_lambda_blocks
from .walks import WalkSeries

#: Limiting variance of the value distribution: 6/pi^2 for mu, 1 for lambda.
MOBIUS_LIMIT_VARIANCE = 6.0 / math.pi**2
LIOUVILLE_LIMIT_VARIANCE = 1.0


class PhiKind(Enum):
    """Slowly increasing envelope functions (natural logs)."""

    LOG = "log"
    LOGLOG = "loglog"
    SQRT_LOG = "sqrt_log"

    def evaluate(self, n: np.ndarray) -> np.ndarray:
        ln = np.log(n)
        if self is PhiKind.LOG:
            return ln
        if self is PhiKind.LOGLOG:
            return np.log(ln)
        return np.sqrt(ln)

    @classmethod
    def parse(cls, text: str) -> "PhiKind":
        t = text.strip().lower()
        for member in cls:
            if member.value == t:
                return member
        raise DomainError(f"unknown phi {text!r}")


class Reference(Enum):
    STD_NORMAL = "std_normal"
    CUSTOM = "custom"


@dataclass
class EmpiricalDistribution:
    support: list
    masses: list
    n: int

    def __post_init__(self):
        if any(m < 0 for m in self.masses):
            raise DomainError("negative mass")
        if abs(math.fsum(self.masses) - 1.0) > 1e-12:
            raise DomainError("masses must sum to 1")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise DomainError("support must be strictly increasing")

    def cdf(self, x: float) -> float:
        """Right-continuous step CDF: P[X <= x]."""
        total = 0.0
        for v, m in zip(self.support, self.masses):
            if v <= x:
                total += m
        return total

    def mass_of(self, value: float) -> float:
        for v, m in zip(self.support, self.masses):
            if v == value:
                return m
        return 0.0


@dataclass
class MomentSummary:
    mean: float
    variance: float
    n: int


@dataclass
class LagCovariance:
    h: int
    n: int
    cov: float


@dataclass
class KSResult:
    statistic: float
    sample_size: int
    reference: Reference


@dataclass
class SqrtFit:
    coefficient: float
    residual: float
    n_lo: int
    n_hi: int
    exponent: float = 0.5


@dataclass
class EnvelopeReport:
    kind: Kind
    phi: PhiKind
    n_max: int
    violations: int
    violation_locations: list  # first locations, capped
    top_ratios: list  # (n, |S(n)| / (phi(n) sqrt(n))), largest first


# ---------------------------------------------------------------------------
# sign counts and the statistics that follow from them
# ---------------------------------------------------------------------------


def sign_counts(
    kind: Kind, n: int, *, block_len: int = DEFAULT_BLOCK_LEN, workers: int = 1
) -> tuple[int, int, int]:
    """Exact counts (#{-1}, #{0}, #{+1}) among f(1..n)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    c = np.zeros(3, dtype=np.int64)
    sel = 0 if kind is Kind.MOBIUS else 1
    for _, _, mu, lam in iter_mu_lambda_blocks(1, n + 1, block_len, workers):
        arr = (mu, lam)[sel]
        c += np.bincount((arr + 1).astype(np.int64), minlength=3)
    return int(c[0]), int(c[1]), int(c[2])


def distribution_from_counts(kind: Kind, counts: tuple[int, int, int], n: int) -> EmpiricalDistribution:
    neg, zero, pos = counts
    if kind is Kind.LIOUVILLE:
        if zero:
            raise DomainError("Liouville values never vanish")
        return EmpiricalDistribution([-1.0, 1.0], [neg / n, pos / n], n)
    return EmpiricalDistribution([-1.0, 0.0, 1.0], [neg / n, zero / n, pos / n], n)


def value_distribution(
    kind: Kind, n: int, *, block_len: int = DEFAULT_BLOCK_LEN, workers: int = 1
) -> EmpiricalDistribution:
    """Empirical masses of -1/0/+1 among f(1..n)."""
    counts = sign_counts(kind, n, block_len=block_len, workers=workers)
    return distribution_from_counts(kind, counts, n)


def moments_from_counts(counts: tuple[int, int, int], n: int) -> MomentSummary:
    neg, _, pos = counts
    mean = (pos - neg) / n
    mean_sq = (pos + neg) / n  # values are in {-1,0,1} so f^2 is the 0/1 indicator
    return MomentSummary(mean, mean_sq - mean * mean, n)


def moments(kind: Kind, n: int, *, block_len: int = DEFAULT_BLOCK_LEN, workers: int = 1) -> MomentSummary:
    """Mean and variance of f(1..n) under the uniform measure."""
    return moments_from_counts(sign_counts(kind, n, block_len=block_len, workers=workers), n)


def char_fn(
    kind: Kind, n: int, t: float, *, block_len: int = DEFAULT_BLOCK_LEN, workers: int = 1
) -> complex:
    """Characteristic function (1/n) sum exp(i t f(k)) for k <= n."""
    if not math.isfinite(t):
        raise DomainError("t must be finite")
    neg, zero, pos = sign_counts(kind, n, block_len=block_len, workers=workers)
    return (neg * complex(math.cos(-t), math.sin(-t)) + zero + pos * complex(math.cos(t), math.sin(t))) / n


def char_fn_from_counts(counts: tuple[int, int, int], n: int, t: float) -> complex:
    neg, zero, pos = counts
    return (neg * complex(math.cos(-t), math.sin(-t)) + zero + pos * complex(math.cos(t), math.sin(t))) / n


# ---------------------------------------------------------------------------
# lag covariance
# ---------------------------------------------------------------------------


def lag_covariance_from_values(values: Sequence[int], h: int) -> LagCovariance:
    """Synthetic input port: same estimator applied to an explicit sequence."""
    v = np.asarray(values, dtype=np.int64)
    n = len(v)
    if not 1 <= h < n:
        raise DomainError("need 1 <= h < n")
    prod = int(np.dot(v[:-h], v[h:]))
    s_a = int(np.sum(v[: n - h], dtype=np.int64))
    s_b = int(np.sum(v[h:], dtype=np.int64))
    w = n - h
    return LagCovariance(h, n, prod / w - (s_a / w) * (s_b / w))


def lag_covariance(
    kind: Kind, n: int, h: int, *, block_len: int = DEFAULT_BLOCK_LEN, workers: int = 1
) -> LagCovariance:
    """cov = mean(f(k) f(k+h)) - mean(f, 1..n-h) * mean(f, h+1..n), exact sums.

    Streams the range twice (once at offset h) so any h < n is supported
    without buffering.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    if not 1 <= h < n:
        raise DomainError("need 1 <= h < n")
    sel = 0 if kind is Kind.MOBIUS else 1
    w = n - h

    def stream(lo, hi):
        for _, _, mu, lam in iter_mu_lambda_blocks(lo, hi, block_len, workers):
            yield (mu, lam)[sel]

    prod = 0
    s_a = 0
    s_b = 0
    gen_a = stream(1, w + 1)
    gen_b = stream(h + 1, n + 1)
    buf_a = np.empty(0, dtype=np.int8)
    buf_b = np.empty(0, dtype=np.int8)
    while True:
        while len(buf_a) < block_len:
            try:
                buf_a = np.concatenate([buf_a, next(gen_a)])
            except StopIteration:
                break
        while len(buf_b) < len(buf_a):
            try:
                buf_b = np.concatenate([buf_b, next(gen_b)])
            except StopIteration:
                break
        if len(buf_a) == 0:
            break
        take = min(len(buf_a), len(buf_b))
        a = buf_a[:take].astype(np.int64)
        b = buf_b[:take].astype(np.int64)
        prod += int(np.dot(a, b))
        s_a += int(np.sum(a))
        s_b += int(np.sum(b))
        buf_a = buf_a[take:]
        buf_b = buf_b[take:]
    return LagCovariance(h, n, prod / w - (s_a / w) * (s_b / w))


# ---------------------------------------------------------------------------
# block sums, normality diagnostic, scaling
# ---------------------------------------------------------------------------


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def ks_statistic(samples: np.ndarray, cdf: Optional[Callable[[float], float]] = None) -> float:
    """Sup-distance between the empirical CDF of samples and a reference CDF."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(xs)
    if n == 0:
        raise DomainError("empty sample")
    ref = cdf or normal_cdf
    fvals = np.array([ref(float(v)) for v in xs])
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - fvals)
    d_minus = np.max(fvals - (i - 1) / n)
    return float(max(d_plus, d_minus, 0.0))


def raw_block_sums(
    kind: Kind, n_total: int, window: int, *, block_len: int = DEFAULT_BLOCK_LEN, workers: int = 1
) -> np.ndarray:
    """Sums of f over the disjoint windows [b*W+1, (b+1)*W], b = 0..floor(N/W)-1."""
    if window < 1:
        raise DomainError("window must be >= 1")
    nblocks = n_total // window
    if nblocks < 1:
        raise DomainError("no complete window fits")
    # align sieve segments to whole windows so each segment holds complete windows
    seg = max(window, (max(block_len, window) // window) * window)
    sums = np.empty(nblocks, dtype=np.int64)
    pos = 0
    sel = 0 if kind is Kind.MOBIUS else 1
    for blo, bhi, mu, lam in iter_mu_lambda_blocks(1, nblocks * window + 1, seg, workers):
        arr = (mu, lam)[sel]
        k = len(arr) // window
        chunk = arr[: k * window].astype(np.int64).reshape(k, window).sum(axis=1)
        sums[pos : pos + k] = chunk
        pos += k
    return sums


def block_sums_from_values(values: Sequence[int], window: int) -> np.ndarray:
    """Synthetic input port for the block-sum machinery."""
    v = np.asarray(values, dtype=np.int64)
    nblocks = len(v) // window
    if nblocks < 1:
        raise DomainError("no complete window fits")
    return v[: nblocks * window].reshape(nblocks, window).sum(axis=1)


def limit_variance(kind: Kind) -> float:
    return MOBIUS_LIMIT_VARIANCE if kind is Kind.MOBIUS else LIOUVILLE_LIMIT_VARIANCE


def block_sums_distribution(
    kind: Kind, n_total: int, window: int, *, block_len: int = DEFAULT_BLOCK_LEN, workers: int = 1
) -> tuple[np.ndarray, KSResult]:
    """Disjoint block sums normalized by sqrt(W * limiting variance), vs N(0,1).

    Requires W >= 100 and at least 100 complete windows.
    """
    if window < 100:
        raise DomainError("window must be >= 100")
    if n_total // window < 100:
        raise DomainError("need at least 100 complete windows")
    raw = raw_block_sums(kind, n_total, window, block_len=block_len, workers=workers)
    samples = raw / math.sqrt(window * limit_variance(kind))
    return samples, KSResult(ks_statistic(samples), len(samples), Reference.STD_NORMAL)


def sample_mean_var(samples: np.ndarray) -> tuple[float, float]:
    """Mean and population variance via compensated summation."""
    vals = [float(v) for v in samples]
    n = len(vals)
    mean = math.fsum(vals) / n
    var = math.fsum((v - mean) ** 2 for v in vals) / n
    return mean, var


def block_scaling(
    kind: Kind,
    n_total: int,
    windows: Sequence[int],
    *,
    block_len: int = DEFAULT_BLOCK_LEN,
    workers: int = 1,
) -> list:
    """Standard deviation of raw (unnormalized) block sums per window size.

    When the windows share a usable gcd, sums for every window are grouped
    from one base pass (sums over disjoint gcd-sized windows are exact
    integers, so regrouping loses nothing).
    """
    ws = [int(w) for w in windows]
    base = math.gcd(*ws) if len(ws) > 1 else ws[0]
    out = []
    if base >= 100 and n_total // base <= 10**7:
        base_sums = raw_block_sums(kind, n_total, base, block_len=block_len, workers=workers)
        for w in ws:
            k = w // base
            m = len(base_sums) // k
            raw = base_sums[: m * k].reshape(m, k).sum(axis=1)
            _, var = sample_mean_var(raw.astype(np.float64))
            out.append((w, math.sqrt(var)))
        return out
    for w in ws:
        raw = raw_block_sums(kind, n_total, w, block_len=block_len, workers=workers)
        _, var = sample_mean_var(raw.astype(np.float64))
        out.append((w, math.sqrt(var)))
    return out


# ---------------------------------------------------------------------------
# average of the Liouville walk
# ---------------------------------------------------------------------------


def average_summatory(series: WalkSeries, sample_points: Sequence[int]) -> tuple[list, SqrtFit]:
    """A(n) = (1/n) sum(L(k), k<=n) at the sample points, plus a c*sqrt(n) fit.

    The running totals are exact integers carried by the series, so every
    sample point must be one of its checkpoints.
    """
    if series.lsum is None:
        raise DomainError("series carries no running L totals (was it loaded from CSV?)")
    pts = [int(p) for p in sample_points]
    if not pts:
        raise DomainError("need at least one sample point")
    if any(p < 10 for p in pts):
        raise DomainError("sample points must be >= 10")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise DomainError("sample points must be strictly increasing")
    values = []
    for p in pts:
        i = int(np.searchsorted(series.xs, p))
        if i >= len(series.xs) or int(series.xs[i]) != p:
            raise DomainError(f"sample point {p} is not a checkpoint of the series")
        values.append((p, series.lsum[i] / p))
    # least squares for A(n) ~ c sqrt(n): c = sum(A sqrt(n)) / sum(n)
    num = math.fsum(a * math.sqrt(p) for p, a in values)
    den = math.fsum(p for p, _ in values)
    c = num / den
    resid = math.fsum((a - c * math.sqrt(p)) ** 2 for p, a in values)
    return values, SqrtFit(c, resid, pts[0], pts[-1])


# ---------------------------------------------------------------------------
# almost-everywhere envelope
# ---------------------------------------------------------------------------


def envelope_check(
    series: Union[WalkSeries, int],
    phi: PhiKind,
    kind: Kind,
    *,
    block_len: int = DEFAULT_BLOCK_LEN,
    workers: int = 1,
    location_cap: int = 1000,
    top_k: int = 10,
) -> EnvelopeReport:
    """Count n in [2, n_max] with |S(n)| > phi(n) * sqrt(n); report top ratios.

    Restreams the walk from the sieve (a checkpoint series cannot reconstruct
    per-n values); a WalkSeries argument only supplies its n_max. Where
    phi(n) <= 0 (tiny n for loglog) the inequality is trivially violated and
    counted, but no ratio is defined there.
    """
    n_max = series.n_max if isinstance(series, WalkSeries) else int(series)
    if n_max < 2:
        raise DomainError("need n_max >= 2")
    sel = 0 if kind is Kind.MOBIUS else 1
    s0 = 0
    violations = 0
    locations: list = []
    heap: list = []  # min-heap of (ratio, n)
    for blo, bhi, mu, lam in iter_mu_lambda_blocks(1, n_max + 1, block_len, workers):
        arr = (mu, lam)[sel]
        cum = s0 + np.cumsum(arr, dtype=np.int64)
        s0 = int(cum[-1])
        ns = np.arange(blo, bhi, dtype=np.float64)
        start = max(0, 2 - blo)  # the check applies for n >= 2
        bound = phi.evaluate(ns) * np.sqrt(ns)
        absS = np.abs(cum).astype(np.float64)
        viol = np.flatnonzero(absS[start:] > bound[start:]) + start
        violations += len(viol)
        if len(locations) < location_cap and len(viol):
            locations.extend((viol[: location_cap - len(locations)] + blo).tolist())
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(bound > 0, absS / bound, -np.inf)
        ratios[:start] = -np.inf
        k = min(top_k, len(ratios))
        top_idx = np.argpartition(ratios, -k)[-k:]
        for i in top_idx:
            r = float(ratios[i])
            if math.isfinite(r):
                item = (r, int(blo + i))
                if len(heap) < top_k:
                    heapq.heappush(heap, item)
                elif item > heap[0]:
                    heapq.heapreplace(heap, item)
    top = sorted(heap, reverse=True)
    return EnvelopeReport(
        kind=kind,
        phi=phi,
        n_max=n_max,
        violations=violations,
        violation_locations=locations,
        top_ratios=[(n, r) for r, n in top],
    )
