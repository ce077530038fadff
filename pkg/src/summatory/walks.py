"""Streaming summatory walks M(x) and L(x).

``accumulate`` consumes sieve blocks in ascending order (sequential reduce)
and produces a checkpointed series: a checkpoint at every stride multiple,
at every sign-change location of either walk, and at the range boundaries.
Because sign events always force a checkpoint, the sign history of the walk
can be reconstructed from the checkpoint sequence alone.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from .errors import CheckpointParseError, DomainError
from .sieve import DEFAULT_BLOCK_LEN, Kind, iter_mu_lambda_blocks

SUMMARY_KEYS = (
    "n_max",
    "first_pos_L",
    "first_nonneg_L",
    "min_M",
    "argmin_M",
    "max_M",
    "argmax_M",
    "min_L",
    "argmin_L",
    "max_L",
    "argmax_L",
    "sign_changes_M",
    "sign_changes_L",
)


@dataclass(frozen=True)
class Checkpoint:
    x: int
    m: int
    l: int


@dataclass
class WalkSummary:
    n_max: int
    first_pos_L: Optional[int]
    first_nonneg_L: Optional[int]
    min_M: int
    argmin_M: int
    max_M: int
    argmax_M: int
    min_L: int
    argmin_L: int
    max_L: int
    argmax_L: int
    sign_changes_M: int
    sign_changes_L: int

    def to_json_dict(self) -> dict:
        return {k: getattr(self, k) for k in SUMMARY_KEYS}


@dataclass
class WalkSeries:
    """Checkpointed walk data plus running |M|, |L| records.

    ``xs/ms/ls`` are parallel arrays of checkpoints (ascending x). ``lsum``,
    when present, holds the exact running total sum(L(k), k<=x) per
    checkpoint as Python ints. Record arrays hold the locations where |M|
    (resp. |L|) first attained each new maximum. Equality compares the
    checkpoint data only (that is what the CSV round-trip preserves).
    """

    xs: np.ndarray
    ms: np.ndarray
    ls: np.ndarray
    lsum: Optional[list] = None
    m_record_x: Optional[np.ndarray] = None
    m_record_v: Optional[np.ndarray] = None
    l_record_x: Optional[np.ndarray] = None
    l_record_v: Optional[np.ndarray] = None
    summary: Optional[WalkSummary] = None

    @property
    def n_max(self) -> int:
        return int(self.xs[-1]) if len(self.xs) else 0

    def __len__(self) -> int:
        return len(self.xs)

    def checkpoint(self, i: int) -> Checkpoint:
        return Checkpoint(int(self.xs[i]), int(self.ms[i]), int(self.ls[i]))

    def checkpoints(self) -> list:
        return [self.checkpoint(i) for i in range(len(self.xs))]

    def __eq__(self, other) -> bool:
        if not isinstance(other, WalkSeries):
            return NotImplemented
        return (
            len(self.xs) == len(other.xs)
            and bool(np.array_equal(self.xs, other.xs))
            and bool(np.array_equal(self.ms, other.ms))
            and bool(np.array_equal(self.ls, other.ls))
        )


@dataclass(frozen=True)
class SignEvent:
    x: int
    old_sign: int
    new_sign: int


@dataclass
class RatioRecord:
    x: int
    max_abs_m: int
    max_abs_l: int
    ratio: float


@dataclass
class RatioDiagnostic:
    rows: list


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


class _Tracker:
    """Per-walk running state: sign, |value| records, extremes, zero/positive firsts."""

    def __init__(self):
        self.prev_sign = 0  # walk value at x=0 is 0
        self.sign_changes = -1  # the forced 0 -> + transition at x=1 is not an event
        self.record_x: list = []
        self.record_v: list = []
        self.best = 0
        self.min_v = None
        self.argmin = None
        self.max_v = None
        self.argmax = None

    def consume(self, blo: int, cum: np.ndarray) -> np.ndarray:
        """Update state with a block of walk values; return event positions (x)."""
        signs = np.sign(cum).astype(np.int8)
        prev = np.empty_like(signs)
        prev[0] = self.prev_sign
        prev[1:] = signs[:-1]
        ev_idx = np.flatnonzero(signs != prev)
        self.sign_changes += len(ev_idx)
        self.prev_sign = int(signs[-1])

        absv = np.abs(cum)
        runmax = np.maximum.accumulate(absv)
        prev_max = np.empty_like(runmax)
        prev_max[0] = self.best
        prev_max[1:] = runmax[:-1]
        rec_idx = np.flatnonzero(absv > prev_max)
        if len(rec_idx):
            self.record_x.extend((rec_idx + blo).tolist())
            self.record_v.extend(absv[rec_idx].tolist())
            self.best = int(runmax[-1]) if runmax[-1] > self.best else self.best
        bmin = int(cum.min())
        if self.min_v is None or bmin < self.min_v:
            self.min_v = bmin
            self.argmin = blo + int(cum.argmin())
        bmax = int(cum.max())
        if self.max_v is None or bmax > self.max_v:
            self.max_v = bmax
            self.argmax = blo + int(cum.argmax())
        return ev_idx + blo


def accumulate(
    range_end: int,
    checkpoint_stride: int,
    *,
    block_len: int = DEFAULT_BLOCK_LEN,
    workers: int = 1,
    progress: Optional[TextIO] = None,
) -> WalkSeries:
    """Stream both walks over [1, range_end] and checkpoint them.

    Checkpoints land on every multiple of ``checkpoint_stride``, on every
    sign-change location of M or L, and on x=1 and x=range_end. Partial sums
    are exact 64-bit integers (|S(x)| <= x); the running total of L is kept
    as an exact arbitrary-precision integer per checkpoint.
    """
    if range_end < 1:
        raise DomainError("range_end must be >= 1")
    if checkpoint_stride < 1:
        raise DomainError("checkpoint_stride must be >= 1")

    xs: list = []
    ms: list = []
    ls: list = []
    lsums: list = []
    tm = _Tracker()
    tl = _Tracker()
    m0 = 0
    l0 = 0
    total_l = 0  # sum of L(k) for k <= current position, exact
    first_pos_l: Optional[int] = None
    first_nonneg_l: Optional[int] = None

    for blo, bhi, mu, lam in iter_mu_lambda_blocks(1, range_end + 1, block_len, workers):
        cm = m0 + np.cumsum(mu, dtype=np.int64)
        cl = l0 + np.cumsum(lam, dtype=np.int64)
        ev_m = tm.consume(blo, cm)
        ev_l = tl.consume(blo, cl)

        if first_nonneg_l is None:
            hit = np.flatnonzero(cl[max(0, 2 - blo) :] >= 0)
            if len(hit):
                first_nonneg_l = blo + max(0, 2 - blo) + int(hit[0])
        if first_pos_l is None:
            hit = np.flatnonzero(cl[max(0, 2 - blo) :] > 0)
            if len(hit):
                first_pos_l = blo + max(0, 2 - blo) + int(hit[0])

        first_stride = ((blo + checkpoint_stride - 1) // checkpoint_stride) * checkpoint_stride
        stride_xs = np.arange(first_stride, bhi, checkpoint_stride, dtype=np.int64)
        forced = [stride_xs, ev_m, ev_l]
        if blo == 1:
            forced.append(np.array([1], dtype=np.int64))
        if bhi == range_end + 1:
            forced.append(np.array([range_end], dtype=np.int64))
        cp_x = np.unique(np.concatenate(forced))
        if len(cp_x):
            idx = cp_x - blo
            xs.extend(cp_x.tolist())
            ms.extend(cm[idx].tolist())
            ls.extend(cl[idx].tolist())
            csum_l = np.cumsum(cl, dtype=np.int64)
            lsums.extend((total_l + csum_l[idx]).tolist())
        total_l += int(np.sum(cl, dtype=np.int64))
        m0 = int(cm[-1])
        l0 = int(cl[-1])
        if progress is not None:
            print(f"  walk: reached {bhi - 1:,} / {range_end:,}", file=progress)

    summary = WalkSummary(
        n_max=range_end,
        first_pos_L=first_pos_l,
        first_nonneg_L=first_nonneg_l,
        min_M=tm.min_v,
        argmin_M=tm.argmin,
        max_M=tm.max_v,
        argmax_M=tm.argmax,
        min_L=tl.min_v,
        argmin_L=tl.argmin,
        max_L=tl.max_v,
        argmax_L=tl.argmax,
        sign_changes_M=max(tm.sign_changes, 0),
        sign_changes_L=max(tl.sign_changes, 0),
    )
    return WalkSeries(
        xs=np.asarray(xs, dtype=np.int64),
        ms=np.asarray(ms, dtype=np.int64),
        ls=np.asarray(ls, dtype=np.int64),
        lsum=lsums,
        m_record_x=np.asarray(tm.record_x, dtype=np.int64),
        m_record_v=np.asarray(tm.record_v, dtype=np.int64),
        l_record_x=np.asarray(tl.record_x, dtype=np.int64),
        l_record_v=np.asarray(tl.record_v, dtype=np.int64),
        summary=summary,
    )


def partial_sums(n: int, *, block_len: int = DEFAULT_BLOCK_LEN, workers: int = 1) -> tuple[int, int]:
    """Exact (M(n), L(n)) by streaming."""
    if n < 1:
        raise DomainError("n must be >= 1")
    m = 0
    l = 0
    for _, _, mu, lam in iter_mu_lambda_blocks(1, n + 1, block_len, workers):
        m += int(np.sum(mu, dtype=np.int64))
        l += int(np.sum(lam, dtype=np.int64))
    return m, l


def scan_sign_events(series: WalkSeries, which: Kind) -> list:
    """Sign-change events of the selected walk, from the checkpoint sequence.

    Valid because accumulate forces a checkpoint at every sign change, so
    between consecutive checkpoints the sign is constant. The series must
    cover [1, n_max] (walks start at M(1) = L(1) = +1).
    """
    if len(series.xs) == 0 or int(series.xs[0]) != 1:
        raise DomainError("series must start at x = 1")
    vals = series.ms if which is Kind.MOBIUS else series.ls
    signs = np.sign(vals).astype(np.int8)
    out = []
    for i in range(1, len(signs)):
        if signs[i] != signs[i - 1]:
            out.append(SignEvent(int(series.xs[i]), int(signs[i - 1]), int(signs[i])))
    return out


def ratio_diagnostic(series: WalkSeries, sample_points: Sequence[int]) -> RatioDiagnostic:
    """Running-records ratio max|M| / max|L| at the sample points.

    Uses running maxima rather than the pointwise quotient M(x)/L(x), which
    is undefined at the infinitely many zeros of L.
    """
    if series.m_record_x is None or series.l_record_x is None:
        raise DomainError("series carries no records (was it loaded from CSV?)")
    pts = [int(p) for p in sample_points]
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise DomainError("sample points must be strictly increasing")
    if pts and pts[-1] > series.n_max:
        raise DomainError(f"sample point {pts[-1]} beyond n_max={series.n_max}")
    mrx = series.m_record_x
    lrx = series.l_record_x
    rows = []
    for x in pts:
        if x < 1:
            raise DomainError("sample points must be >= 1")
        im = int(np.searchsorted(mrx, x, side="right")) - 1
        il = int(np.searchsorted(lrx, x, side="right")) - 1
        mm = int(series.m_record_v[im]) if im >= 0 else 0
        ll = int(series.l_record_v[il]) if il >= 0 else 0
        rows.append(RatioRecord(x, mm, ll, mm / ll if ll else float("nan")))
    return RatioDiagnostic(rows)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

CSV_HEADER = "x,M,L"


def save_checkpoints(series: WalkSeries, path, comment: Optional[str] = None) -> None:
    """Write the checkpoint CSV: optional comment lines, header, integer rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(CSV_HEADER + "\n")
        for i in range(len(series.xs)):
            fh.write(f"{int(series.xs[i])},{int(series.ms[i])},{int(series.ls[i])}\n")


def load_checkpoints(path) -> WalkSeries:
    """Read a checkpoint CSV back into a series (checkpoints only).

    Raises CheckpointParseError with the offending 1-based line number on
    malformed rows or non-monotone x.
    """
    xs: list = []
    ms: list = []
    ls: list = []
    header_seen = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                if line != CSV_HEADER:
                    raise CheckpointParseError(lineno, f"expected header {CSV_HEADER!r}, got {line!r}")
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise CheckpointParseError(lineno, f"expected 3 fields, got {len(parts)}")
            try:
                x, m, l = (int(p) for p in parts)
            except ValueError:
                raise CheckpointParseError(lineno, f"non-integer field in {line!r}") from None
            if xs and x <= xs[-1]:
                raise CheckpointParseError(lineno, f"x={x} not increasing (previous {xs[-1]})")
            if abs(m) > x or abs(l) > x:
                raise CheckpointParseError(lineno, f"|sum| exceeds x in {line!r}")
            xs.append(x)
            ms.append(m)
            ls.append(l)
    if not header_seen:
        raise CheckpointParseError(1, "missing header")
    return WalkSeries(
        xs=np.asarray(xs, dtype=np.int64),
        ms=np.asarray(ms, dtype=np.int64),
        ls=np.asarray(ls, dtype=np.int64),
    )


def summary_to_json(summary: WalkSummary) -> str:
    return json.dumps(summary.to_json_dict(), indent=None, separators=(", ", ": "))
