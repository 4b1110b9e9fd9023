"""Odd-only segmented sieve of Eratosthenes with exact prime counting.

Primality is stored for odd numbers only: flag index ``j`` stands for the
odd number ``2*j + 1``.  The prime 2 is never stored and is special-cased
by every query.

A :class:`PrimeEngine` keeps a resident prefix of flags (grown on demand
up to ``resident_limit``) and streams fresh segments beyond it, so counts
near ``10**10`` run in bounded memory.
"""

from __future__ import annotations

import bisect
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import CacheFormatError, ResourceLimitError

DEFAULT_LIMIT = 2 * 10**10
DEFAULT_SEGMENT_SIZE = 1 << 21  # integers per segment; 1 MiB of odd flags
DEFAULT_RESIDENT_LIMIT = 2 * 10**8

PI_CACHE_MAGIC = "GOLDBACH-PI v1"


@lru_cache(maxsize=8)
def _small_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    primes = np.flatnonzero(flags)
    primes.flags.writeable = False
    return primes


def base_primes(limit: int) -> np.ndarray:
    """All primes ``<= limit`` (including 2) as a read-only int64 array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    # round up so nearby requests share one cached sieve
    size = max(1 << 12, 1 << (int(limit) - 1).bit_length())
    primes = _small_sieve(size)
    return primes[: np.searchsorted(primes, limit, side="right")]


def sieve_odd_flags(lo: int, hi: int, primes: np.ndarray | None = None) -> np.ndarray:
    """Primality flags for the odd numbers in ``[lo, hi)``.

    ``lo`` and ``hi`` must be even.  Entry ``i`` refers to ``lo + 2*i + 1``.
    ``primes`` must contain every odd prime up to ``sqrt(hi)``.
    """
    n = (hi - lo) // 2
    flags = np.ones(n, dtype=bool)
    if n <= 0:
        return flags
    if primes is None:
        primes = base_primes(math.isqrt(hi))
    top = hi - 1
    for p in primes.tolist():
        if p == 2:
            continue
        sq = p * p
        if sq > top:
            break
        start = max(sq, -(-lo // p) * p)
        if start % 2 == 0:
            start += p
        if start < hi:
            flags[(start - lo - 1) // 2 :: p] = False
    if lo == 0:
        flags[0] = False  # 1 is not prime
    return flags


@dataclass(frozen=True)
class SievedSegment:
    """Immutable primality bitset for the odd numbers of ``[base, base + length)``.

    Bit ``i`` (little-endian within each byte) is set iff ``base + 2*i + 1``
    is prime.
    """

    base: int
    length: int
    bits: bytes = field(repr=False)

    def __post_init__(self):
        if self.base < 0 or self.base % 2:
            raise ValueError(f"segment base must be even and >= 0, got {self.base}")
        if self.length <= 0:
            raise ValueError(f"segment length must be positive, got {self.length}")

    @classmethod
    def from_flags(cls, base: int, length: int, flags: np.ndarray) -> "SievedSegment":
        return cls(base, length, np.packbits(flags, bitorder="little").tobytes())

    @property
    def size(self) -> int:
        """Number of odd slots in the window."""
        return self.length // 2

    def flags(self) -> np.ndarray:
        raw = np.frombuffer(self.bits, dtype=np.uint8)
        return np.unpackbits(raw, count=self.size, bitorder="little").astype(bool)

    def __contains__(self, n: int) -> bool:
        if not self.base <= n < self.base + self.length:
            return False
        if n == 2:
            return True
        if n % 2 == 0:
            return False
        i = (n - self.base - 1) // 2
        return bool(self.bits[i >> 3] >> (i & 7) & 1)

    def primes(self) -> np.ndarray:
        """Primes in the window, ascending, including 2 when it is covered."""
        odd = self.base + 1 + 2 * np.flatnonzero(self.flags()).astype(np.int64)
        if self.base <= 2 < self.base + self.length:
            odd = np.concatenate([np.array([2], dtype=np.int64), odd])
        return odd

    def count(self) -> int:
        n = int(np.unpackbits(np.frombuffer(self.bits, dtype=np.uint8)).sum())
        return n + (1 if self.base <= 2 < self.base + self.length else 0)


class PiIndex:
    """Sorted ``(x, pi(x))`` checkpoints.

    Every checkpoint is an exact prime count.  ``floor(x)`` returns the
    largest checkpoint at or below ``x``; ``(0, 0)`` is always present.
    """

    def __init__(self, checkpoints=()):
        self._xs: list[int] = [0]
        self._counts: list[int] = [0]
        self._lock = threading.Lock()
        for x, c in checkpoints:
            self.add(x, c)

    @property
    def checkpoints(self) -> list[tuple[int, int]]:
        with self._lock:
            return list(zip(self._xs, self._counts))

    @property
    def coverage_limit(self) -> int:
        return self._xs[-1]

    def __len__(self):
        return len(self._xs)

    def __eq__(self, other):
        if not isinstance(other, PiIndex):
            return NotImplemented
        return self._xs == other._xs and self._counts == other._counts

    def add(self, x: int, count: int) -> None:
        x, count = int(x), int(count)
        if x < 0 or count < 0:
            raise ValueError(f"negative checkpoint ({x}, {count})")
        with self._lock:
            self._insert(x, count)

    def _insert(self, x: int, count: int) -> None:
        i = bisect.bisect_left(self._xs, x)
        if i < len(self._xs) and self._xs[i] == x:
            if self._counts[i] != count:
                raise ValueError(f"conflicting checkpoint for x={x}: {self._counts[i]} vs {count}")
            return
        if i > 0 and self._counts[i - 1] > count:
            raise ValueError(f"checkpoint ({x}, {count}) breaks monotonicity")
        if i < len(self._xs) and self._counts[i] < count:
            raise ValueError(f"checkpoint ({x}, {count}) breaks monotonicity")
        self._xs.insert(i, x)
        self._counts.insert(i, count)

    def floor(self, x: int) -> tuple[int, int]:
        with self._lock:
            i = bisect.bisect_right(self._xs, x) - 1
            return self._xs[i], self._counts[i]

    def get(self, x: int) -> int | None:
        with self._lock:
            i = bisect.bisect_left(self._xs, x)
            if i < len(self._xs) and self._xs[i] == x:
                return self._counts[i]
            return None


def save_pi_cache(index: PiIndex, path) -> None:
    """Write ``index`` as ``GOLDBACH-PI v1`` text: one ``x<TAB>pi`` line per checkpoint."""
    lines = [PI_CACHE_MAGIC]
    lines += [f"{x}\t{c}" for x, c in index.checkpoints if x > 0]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_pi_cache(path) -> PiIndex:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CacheFormatError("missing header", line=1)
    if lines[0].rstrip("\r") != PI_CACHE_MAGIC:
        raise CacheFormatError(f"bad header {lines[0]!r}, expected {PI_CACHE_MAGIC!r}", line=1)
    index = PiIndex()
    prev_x, prev_c = 0, 0
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.rstrip("\r").split("\t")
        if len(parts) != 2:
            raise CacheFormatError(f"expected 'x<TAB>pi(x)', got {line!r}", line=lineno)
        try:
            x, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise CacheFormatError(f"non-integer field in {line!r}", line=lineno) from None
        if x <= prev_x:
            raise CacheFormatError(f"x={x} not ascending (previous {prev_x})", line=lineno)
        if c < prev_c or c < 0:
            raise CacheFormatError(f"count {c} decreases (previous {prev_c})", line=lineno)
        index.add(x, c)
        prev_x, prev_c = x, c
    return index


class PrimeEngine:
    """Primality and exact prime counts up to ``limit``.

    Parameters
    ----------
    limit : int
        Largest integer any query may touch.  Requests beyond it raise
        :class:`ResourceLimitError`.
    segment_size : int
        Integers sieved per segment (rounded up to an even number).
    workers : int
        Threads used to sieve segments.  Results do not depend on it.
    resident_limit : int
        Flags below this bound are kept in memory once sieved; windows
        above it are re-sieved on every request.
    pi_index : PiIndex, optional
        Pre-loaded checkpoints, e.g. from :func:`load_pi_cache`.
    """

    def __init__(
        self,
        limit: int = DEFAULT_LIMIT,
        segment_size: int = DEFAULT_SEGMENT_SIZE,
        workers: int = 1,
        resident_limit: int = DEFAULT_RESIDENT_LIMIT,
        pi_index: PiIndex | None = None,
    ):
        if limit < 2:
            raise ValueError("limit must be >= 2")
        if workers < 1:
            raise ValueError("workers must be >= 1")
        if segment_size < 2:
            raise ValueError("segment_size must be >= 2")
        self.limit = int(limit)
        self.segment_size = int(segment_size) + int(segment_size) % 2
        self.workers = int(workers)
        self.resident_limit = min(int(resident_limit), self.limit + 2)
        self.pi_index = pi_index if pi_index is not None else PiIndex()
        self._flags = np.zeros(0, dtype=bool)
        self._covered = 0  # resident flags cover the integers [0, _covered)
        self._resident_count = 0  # pi(_covered - 1)
        self._lock = threading.RLock()

    def __repr__(self):
        return (
            f"PrimeEngine(limit={self.limit}, segment_size={self.segment_size}, "
            f"workers={self.workers}, covered={self._covered})"
        )

    @property
    def covered(self) -> int:
        return self._covered

    def _check(self, hi: int) -> None:
        if hi - 1 > self.limit:
            raise ResourceLimitError(
                f"request reaches {hi - 1}, beyond the sieve limit {self.limit}"
            )

    def _sieve_range(self, lo: int, hi: int) -> np.ndarray:
        """Freshly sieve the odd numbers of ``[lo, hi)``, segment by segment."""
        primes = base_primes(math.isqrt(hi))
        bounds = list(range(lo, hi, self.segment_size)) + [hi]
        spans = list(zip(bounds[:-1], bounds[1:]))
        if len(spans) == 1:
            return sieve_odd_flags(lo, hi, primes)
        out = np.empty((hi - lo) // 2, dtype=bool)

        def work(span):
            a, b = span
            out[(a - lo) // 2 : (b - lo) // 2] = sieve_odd_flags(a, b, primes)

        if self.workers > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                list(pool.map(work, spans))
        else:
            for span in spans:
                work(span)
        return out

    def ensure(self, x: int) -> bool:
        """Make ``[0, x]`` resident if it fits under ``resident_limit``."""
        if x < self._covered:
            return True
        if x >= self.resident_limit:
            return False
        self._check(x + 1)
        with self._lock:
            if x < self._covered:
                return True
            step = self.segment_size
            target = min(-(-(x + 1) // step) * step, self.resident_limit + self.resident_limit % 2)
            target = max(target, x + 2 - x % 2)
            new = self._sieve_range(self._covered, target)
            counts = np.cumsum(new, dtype=np.int64)
            base = self._resident_count if self._covered else 1  # 1 counts the prime 2
            # checkpoints at segment boundaries let later pi() queries skip the prefix
            for b in [*range(self._covered + step, target, step), target]:
                self.pi_index.add(b - 1, base + int(counts[(b - self._covered) // 2 - 1]))
            self._flags = np.concatenate([self._flags, new])
            self._resident_count = base + int(counts[-1])
            self._covered = target
        return True

    def odd_flags_by_index(self, j0: int, j1: int) -> np.ndarray:
        """Flags ``F[j0:j1]`` where ``F[j]`` is the primality of ``2*j + 1``."""
        lo, hi = 2 * j0, 2 * j1
        if hi <= lo:
            return np.zeros(0, dtype=bool)
        self._check(hi)
        if hi <= self._covered or self.ensure(hi - 1):
            return self._flags[j0:j1]
        if lo < self._covered:
            head = self._flags[j0:]
            return np.concatenate([head, self._sieve_range(self._covered, hi)])
        return self._sieve_range(lo, hi)

    def iter_odd_flags(self, lo: int, hi: int, chunk: int | None = None):
        """Yield ``(j0, flags)`` covering the odd numbers of ``[lo, hi)`` in order."""
        chunk = chunk or self.segment_size
        j, j_end = lo // 2, hi // 2
        step = max(1, chunk // 2)
        while j < j_end:
            jn = min(j + step, j_end)
            yield j, self.odd_flags_by_index(j, jn)
            j = jn

    def sieve_segment(self, base: int, length: int) -> SievedSegment:
        if base < 0 or base % 2:
            raise ValueError(f"base must be even and >= 0, got {base}")
        if length < 2:
            raise ValueError(f"length must be >= 2, got {length}")
        self._check(base + length)
        j0 = base // 2
        flags = self.odd_flags_by_index(j0, j0 + length // 2)
        return SievedSegment.from_flags(base, length, flags)

    def is_prime(self, n: int) -> bool:
        if n < 2:
            return False
        if n % 2 == 0:
            return n == 2
        self._check(n + 1)
        j = n // 2
        return bool(self.odd_flags_by_index(j, j + 1)[0])

    def count_primes(self, lo: int, hi: int) -> int:
        """Number of primes ``p`` with ``lo <= p <= hi``."""
        if hi < lo or hi < 2:
            return 0
        lo = max(lo, 0)
        total = 1 if lo <= 2 <= hi else 0
        for _, flags in self.iter_odd_flags(lo, hi + 1):
            total += int(np.count_nonzero(flags))
        return total

    def pi(self, x: int) -> int:
        """Exact number of primes ``<= x``, 2 included."""
        x = int(x)
        if x < 2:
            return 0
        cached = self.pi_index.get(x)
        if cached is not None:
            return cached
        self._check(x + 1)
        self.ensure(x)
        x0, c0 = self.pi_index.floor(x)
        if x - x0 <= self.segment_size or x < self._covered:
            count = c0 + self.count_primes(x0 + 1, x)
            self.pi_index.add(x, count)
            return count
        # stream forward, dropping a checkpoint at each segment boundary
        count = c0
        pos = x0 + 1
        step = self.segment_size
        while pos <= x:
            nxt = min((pos // step + 1) * step, x + 1)
            count += self.count_primes(pos, nxt - 1)
            if nxt % step == 0:
                self.pi_index.add(nxt - 1, count)
            pos = nxt
        self.pi_index.add(x, count)
        return count

    def primes_between(self, lo: int, hi: int) -> np.ndarray:
        """Primes in ``[lo, hi]`` as an int64 array."""
        if hi < max(lo, 2):
            return np.empty(0, dtype=np.int64)
        parts = [np.array([2], dtype=np.int64)] if lo <= 2 <= hi else []
        for j0, flags in self.iter_odd_flags(max(lo, 0), hi + 1):
            parts.append(2 * (j0 + np.flatnonzero(flags).astype(np.int64)) + 1)
        out = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
        return out[(out >= lo) & (out <= hi)]


_default_engine: PrimeEngine | None = None


def default_engine() -> PrimeEngine:
    """Process-wide engine used when callers do not pass one."""
    global _default_engine
    if _default_engine is None:
        limit = int(os.environ.get("GOLDBACH_SIEVE_LIMIT", DEFAULT_LIMIT))
        _default_engine = PrimeEngine(limit=limit)
    return _default_engine


def sieve_segment(base: int, length: int, engine: PrimeEngine | None = None) -> SievedSegment:
    return (engine or default_engine()).sieve_segment(base, length)


def is_prime(n: int, engine: PrimeEngine | None = None) -> bool:
    return (engine or default_engine()).is_prime(n)


def pi(x: int, engine: PrimeEngine | None = None) -> int:
    return (engine or default_engine()).pi(x)
