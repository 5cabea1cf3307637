"""Exact bidirectional evaluation of the k-generalized Pell sequence.

The order-k recurrence P_n = 2 P_{n-1} + P_{n-2} + ... + P_{n-k} with the
zero initial window P_n = 0 for n = -(k-2)..0 and P_1 = 1 extends uniquely
to all integer indices: solving the recurrence for its lowest-index term
gives the backward step

    P_m = P_{m+k} - 2 P_{m+k-1} - (P_{m+1} + ... + P_{m+k-2}).

Everything here is arbitrary-precision integer arithmetic; no rounding.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

DEFAULT_LIMIT = 10_000_000


class LimitExceeded(RuntimeError):
    """Requested index magnitude exceeds the context's resource limit."""

    def __init__(self, n, limit):
        super().__init__(
            f"index {n} exceeds the configured limit {limit}; "
            f"construct KContext with a higher limit to allow this")
        self.n = n
        self.limit = limit


@dataclass(frozen=True)
class ExactTerm:
    n: int
    value: int


class KContext:
    """Evaluation context for one order k: cache plus resource limit.

    The cache holds a contiguous index range so range requests are a
    single linear sweep.  Safe for concurrent readers; extensions are
    serialized by an internal lock.
    """

    def __init__(self, k: int, limit: int = DEFAULT_LIMIT, use_cache: bool = True):
        if k < 2:
            raise ValueError(f"order k must be >= 2, got {k}")
        self.k = k
        self.limit = limit
        self.use_cache = use_cache
        self._lock = threading.Lock()
        self._reset()

    def _reset(self):
        k = self.k
        self._vals = {n: 0 for n in range(-(k - 2), 1)}
        self._vals[1] = 1
        self._lo = -(k - 2)
        self._hi = 1

    def _extend_up(self, to_n: int):
        k = self.k
        vals = self._vals
        for n in range(self._hi + 1, to_n + 1):
            vals[n] = 2 * vals[n - 1] + sum(vals[n - j] for j in range(2, k + 1))
        self._hi = max(self._hi, to_n)

    def _extend_down(self, to_m: int):
        k = self.k
        vals = self._vals
        for m in range(self._lo - 1, to_m - 1, -1):
            vals[m] = (vals[m + k] - 2 * vals[m + k - 1]
                       - sum(vals[m + j] for j in range(1, k - 1)))
        self._lo = min(self._lo, to_m)

    def _ensure(self, n_lo: int, n_hi: int):
        if abs(n_lo) > self.limit or abs(n_hi) > self.limit:
            worst = n_lo if abs(n_lo) > abs(n_hi) else n_hi
            raise LimitExceeded(worst, self.limit)
        with self._lock:
            if n_hi > self._hi:
                self._extend_up(n_hi)
            if n_lo < self._lo:
                self._extend_down(n_lo)
            if not self.use_cache:
                # Keep only the window; recompute on the next call.
                vals = self._vals
                result = {n: vals[n] for n in range(n_lo, n_hi + 1)}
                self._reset()
                return result
            return self._vals

    def value(self, n: int) -> int:
        return self._ensure(n, n)[n]


def eval_term(ctx: KContext, n: int) -> ExactTerm:
    """The exact sequence value at any integer index."""
    return ExactTerm(n, ctx.value(n))


def eval_range(ctx: KContext, n_lo: int, n_hi: int) -> list[ExactTerm]:
    """Terms for every index in [n_lo, n_hi], one linear sweep."""
    if n_lo > n_hi:
        raise ValueError(f"empty range [{n_lo}, {n_hi}]")
    vals = ctx._ensure(n_lo, n_hi)
    return [ExactTerm(n, vals[n]) for n in range(n_lo, n_hi + 1)]
