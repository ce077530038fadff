"""Truncated Perron quadrature recovering M(x) and L(x) from the zeta line.

sum_{n<=x} f(n) ~ (1/2 pi i) * integral over [b - iT, b + iT] of F(s) x^s / s ds

with b = 1 + 1/log(x). The integrand at conjugate s is the conjugate, so
only t in [0, T] is integrated (composite Simpson, fixed step) and the real
part doubled. Evaluation points are taken at half-integer x so the jump of
the step function never sits on the evaluation point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import AccuracyError, DomainError, SingularityError
from .sieve import Kind
from .walks import partial_sums
from .zeta import ZERO_EPS, ZetaParams, zeta, zeta_line


def default_step(x: float) -> float:
    """Largest admissible Simpson step: pi / (4 log x), resolving exp(i t log x)."""
    return math.pi / (4.0 * math.log(x))


@dataclass(frozen=True)
class PerronJob:
    x: float
    big_t: float
    target: Kind
    b: float = 0.0  # 0 means "use 1 + 1/log(x)"
    step: float = 0.0  # 0 means "use the default bound"

    def __post_init__(self):
        if self.x < 2.0:
            raise DomainError("Perron quadrature requires x >= 2")
        if self.big_t < 2.0:
            raise DomainError("T must be >= 2")
        if self.b == 0.0:
            object.__setattr__(self, "b", 1.0 + 1.0 / math.log(self.x))
        if self.b <= 1.0:
            raise DomainError("b must exceed 1")
        bound = default_step(self.x)
        if self.step == 0.0:
            object.__setattr__(self, "step", bound)
        if not 0.0 < self.step <= bound * (1.0 + 1e-12):
            raise DomainError(f"step must lie in (0, {bound:.6g}] for x={self.x}")


@dataclass
class QuadratureResult:
    approx: float
    exact: int
    abs_error: float
    evaluations: int


@dataclass
class RemainderScan:
    target: Kind
    x: float
    rows: list  # (T, abs_error)
    slope: float  # least-squares slope of log(abs_error) vs log(T)
    results: list = field(default_factory=list)


def perron_truncated(
    job: PerronJob,
    *,
    exact: Optional[int] = None,
    bernoulli_order: int = 8,
    self_check: bool = True,
) -> QuadratureResult:
    """Composite-Simpson value of the truncated Perron integral.

    ``exact`` is the walk value at floor(x); when omitted it is streamed
    from the sieve. A scalar-vs-vector zeta spot check guards the fast path.
    """
    m = 2 * math.ceil(job.big_t / (2.0 * job.step))
    ts = np.linspace(0.0, job.big_t, m + 1)
    params = ZetaParams.auto(float(ts[-1]), bernoulli_order)
    zs = zeta_line(job.b, ts, params)
    if float(np.min(np.abs(zs))) < ZERO_EPS:
        raise SingularityError("zeta(s) vanishes on the contour within tolerance")
    if job.target is Kind.MOBIUS:
        fvals = 1.0 / zs
    else:
        params2 = ZetaParams.auto(2.0 * float(ts[-1]), bernoulli_order)
        fvals = zeta_line(2.0 * job.b, 2.0 * ts, params2) / zs
    s = job.b + 1j * ts
    vals = fvals * np.exp(s * math.log(job.x)) / s
    if self_check:
        mid = m // 2
        ref = zeta(complex(job.b, float(ts[mid])), params)
        if abs(ref - complex(zs[mid])) > 1e-9:
            raise AccuracyError(f"vectorized zeta disagrees with scalar at t={float(ts[mid])}")
    weights = np.ones(m + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    integral = (job.big_t / m) / 3.0 * float(np.dot(weights, vals.real))
    approx = integral / math.pi
    if exact is None:
        n = math.floor(job.x)
        msum, lsum = partial_sums(n)
        exact = msum if job.target is Kind.MOBIUS else lsum
    return QuadratureResult(approx, int(exact), abs(approx - float(exact)), m + 1)


def remainder_scan(
    target: Kind,
    x: float,
    big_ts: Sequence[float],
    *,
    exact: Optional[int] = None,
    bernoulli_order: int = 8,
) -> RemainderScan:
    """abs_error of the truncated integral per T, with the log-log slope fit."""
    ts_list = [float(t) for t in big_ts]
    if len(ts_list) < 2:
        raise DomainError("need at least two T values")
    if any(b <= a for a, b in zip(ts_list, ts_list[1:])):
        raise DomainError("T values must be strictly increasing")
    if ts_list[0] < 2.0:
        raise DomainError("each T must be >= 2")
    if exact is None:
        n = math.floor(x)
        msum, lsum = partial_sums(n)
        exact = msum if target is Kind.MOBIUS else lsum
    rows = []
    results = []
    for t in ts_list:
        job = PerronJob(x=x, big_t=t, target=target)
        res = perron_truncated(job, exact=exact, bernoulli_order=bernoulli_order)
        rows.append((t, res.abs_error))
        results.append(res)
    log_t = np.log([r[0] for r in rows])
    log_e = np.log([max(r[1], 1e-300) for r in rows])
    slope = float(np.polyfit(log_t, log_e, 1)[0])
    return RemainderScan(target, x, rows, slope, results)
