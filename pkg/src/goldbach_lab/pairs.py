"""Exact Goldbach-pair counts.

``count_pairs`` counts the pairs ``(n - m, n + m)`` of odd primes for a
single ``n``; ``total_pairs`` counts all odd-prime pairs ``p1 <= p2`` with
``p1 + p2 <= M``.  Summing the first over ``n = 3 .. M // 2`` gives the
second.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .prime_engine import PrimeEngine, default_engine

ORACLE_LIMIT = 10**6

# "exact": every pair with (n + m)**2 < 2*n**2.
# "skip-first": additionally the smallest prime of the reduced window is
# never the lower member, which reproduces the published reduced-range counts.
REDUCED_CONVENTIONS = ("skip-first", "exact")
DEFAULT_REDUCED_CONVENTION = "skip-first"


class RangeKind(enum.Enum):
    FULL = "full"
    REDUCED = "reduced"

    @classmethod
    def parse(cls, value) -> "RangeKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown range {value!r}; expected 'full' or 'reduced'") from None


@dataclass(frozen=True)
class PairCount:
    n: int
    range: RangeKind
    count: int


def reduced_upper(n: int) -> int:
    """Largest ``b`` with ``b*b < 2*n*n``, i.e. the top of the reduced window."""
    return math.isqrt(2 * n * n - 1)


def reduced_lower(n: int) -> int:
    """Smallest lower member allowed by the reduced window."""
    return 2 * n - reduced_upper(n)


def _check_convention(convention: str) -> None:
    if convention not in REDUCED_CONVENTIONS:
        raise DomainError(f"unknown reduced convention {convention!r}")


def _first_set(engine: PrimeEngine, i0: int, i1: int) -> int:
    """Index of the first prime flag in ``[i0, i1)``, or ``i1``."""
    step = max(1, engine.segment_size // 2)
    i = i0
    while i < i1:
        j = min(i + step, i1)
        hits = np.flatnonzero(engine.odd_flags_by_index(i, j))
        if len(hits):
            return i + int(hits[0])
        i = j
    return i1


def _lower_index_bounds(
    n: int, kind: RangeKind, engine: PrimeEngine, convention: str
) -> tuple[int, int]:
    # lower member a = 2*ia + 1 runs over odd numbers in [3, n]
    ia_max = (n - 1) // 2
    ia_min = 1
    if kind is RangeKind.REDUCED:
        ia_min = max(ia_min, reduced_lower(n) // 2)
        if convention == "skip-first":
            ia_min = _first_set(engine, ia_min, ia_max + 1) + 1
    return ia_min, ia_max


def _count_block(engine: PrimeEngine, n: int, i0: int, i1: int, chunk: int) -> int:
    total = 0
    i = i0
    while i < i1:
        j = min(i + chunk, i1)
        low = engine.odd_flags_by_index(i, j)
        # the partner of index ia is n - 1 - ia
        high = engine.odd_flags_by_index(n - j, n - i)[::-1]
        total += int(np.count_nonzero(low & high))
        i = j
    return total


def count_pairs(
    n: int,
    kind: RangeKind | str = RangeKind.FULL,
    engine: PrimeEngine | None = None,
    workers: int | None = None,
    convention: str = DEFAULT_REDUCED_CONVENTION,
) -> int:
    """Number of ``m`` in ``[0, n - 3]`` with ``n - m`` and ``n + m`` both odd primes.

    For ``RangeKind.REDUCED`` only pairs with ``(n + m)**2 < 2*n**2`` count,
    subject to ``convention`` (see ``REDUCED_CONVENTIONS``).
    ``m = 0`` contributes once when ``n`` is an odd prime.
    """
    kind = RangeKind.parse(kind)
    _check_convention(convention)
    if n < 3:
        raise DomainError(f"count_pairs needs n >= 3, got {n}")
    engine = engine or default_engine()
    workers = workers or engine.workers
    engine.ensure(2 * n)
    ia_min, ia_max = _lower_index_bounds(n, kind, engine, convention)
    if ia_max < ia_min:
        return 0
    chunk = max(1, engine.segment_size // 2)
    stop = ia_max + 1
    if workers == 1:
        return _count_block(engine, n, ia_min, stop, chunk)
    edges = np.linspace(ia_min, stop, workers + 1).astype(np.int64).tolist()
    with ThreadPoolExecutor(workers) as pool:
        parts = pool.map(
            lambda ab: _count_block(engine, n, ab[0], ab[1], chunk), zip(edges[:-1], edges[1:])
        )
        return sum(parts)


def total_pairs(m_limit: int, engine: PrimeEngine | None = None) -> int:
    """Number of odd-prime pairs ``p1 <= p2`` with ``p1 + p2 <= m_limit``.

    Writing ``K`` for the number of odd primes up to ``m_limit // 2`` and
    ``pi_odd`` for the odd-prime counting function, the total equals
    ``sum(pi_odd(m_limit - p1)) - K*(K - 1)/2`` over odd primes
    ``p1 <= m_limit // 2``.  Lower primes are walked downward in chunks
    while their partners ``m_limit - p1`` sweep upward, so the prefix
    counts are one running sum and memory stays at one chunk per side.
    """
    if m_limit < 6:
        return 0
    engine = engine or default_engine()
    M = int(m_limit)
    engine.ensure(M)
    half = M // 2
    top = (half - 1) // 2 + 1  # lower odd indices [1, top)
    step = max(1, engine.segment_size // 2)

    # partner of the largest lower candidate; the upper sweep starts here
    j0 = (M - 2 * top) // 2
    running = engine.pi(2 * j0 - 1) - 1 if j0 > 1 else 0  # pi_odd(2*j0 - 1)

    total = 0
    k = 0
    i1 = top
    while i1 > 1:
        i0 = max(1, i1 - step)
        low = engine.odd_flags_by_index(i0, i1)
        p1 = 2 * (i0 + np.flatnonzero(low).astype(np.int64)) + 1
        k += len(p1)
        w0, w1 = j0, (M - 2 * i0) // 2
        cum = np.cumsum(engine.odd_flags_by_index(w0, w1), dtype=np.int64)
        if len(p1):
            q = M - p1
            total += int((running + cum[(q - 1) // 2 - w0]).sum())
        running += int(cum[-1]) if len(cum) else 0
        j0 = w1
        i1 = i0
    return total - k * (k - 1) // 2


@lru_cache(maxsize=None)
def _trial_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def oracle_count_pairs(
    n: int, kind: RangeKind | str = RangeKind.FULL, convention: str = DEFAULT_REDUCED_CONVENTION
) -> int:
    """Reference count by per-``m`` trial division; ``n <= 10**6`` only."""
    kind = RangeKind.parse(kind)
    _check_convention(convention)
    if n < 3:
        raise DomainError(f"oracle needs n >= 3, got {n}")
    if n > ORACLE_LIMIT:
        raise DomainError(f"oracle is limited to n <= {ORACLE_LIMIT}, got {n}")
    skip = None
    if kind is RangeKind.REDUCED and convention == "skip-first":
        lowest = max(3, 2 * n - math.isqrt(2 * n * n - 1))
        skip = next(a for a in range(lowest, 2 * n) if a % 2 and _trial_prime(a))
    count = 0
    for m in range(0, n - 2):
        a, b = n - m, n + m
        if kind is RangeKind.REDUCED and b * b >= 2 * n * n:
            break
        if a == skip:
            continue
        if a % 2 and b % 2 and _trial_prime(a) and _trial_prime(b):
            count += 1
    return count
