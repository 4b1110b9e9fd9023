"""Analytic estimate of the number of Goldbach pairs for ``N``.

The pipeline: Dusart's explicit upper bound for ``pi(x)`` gives a smooth
cumulative pair total ``g_tot(x) = pi_upper(x)**2 / 4``.  Its derivative at
``2N``, doubled (pairs live on even sums only), scaled by the twin prime
constant and by the divisor factor of ``N``, estimates the count of pairs
``(N - m, N + m)``.  The prime-count unbalance ``U(N)`` raised to ``3/2``
corrects the systematic underestimate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .pairs import RangeKind, reduced_upper
from .prime_engine import PrimeEngine, base_primes, default_engine

DUSART_MIN_X = 355991
TWIN_PRIME_CONSTANT = 0.66016181584686957392
TWIN_CONSTANT_5DP = 0.66016

TWIN_CONSTANTS = {"paper": TWIN_CONSTANT_5DP, "full_precision": TWIN_PRIME_CONSTANT}


def round_half_away(x: float, places: int = 0):
    """Round half away from zero; returns ``int`` when ``places == 0``."""
    q = Decimal(1).scaleb(-places)
    if isinstance(x, Fraction):
        d = Decimal(x.numerator) / Decimal(x.denominator)
    else:
        d = Decimal(x)
    d = d.quantize(q, rounding=ROUND_HALF_UP)
    return int(d) if places == 0 else float(d)


@dataclass(frozen=True)
class EstimateConfig:
    twin_constant: float = TWIN_CONSTANT_5DP
    reduced_factor: float = math.sqrt(2) - 1
    dusart_min_x: int = DUSART_MIN_X
    correction_exponent: float = 1.5

    def __post_init__(self):
        for name in ("twin_constant", "reduced_factor", "dusart_min_x", "correction_exponent"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def for_mode(cls, mode: str, **kw) -> "EstimateConfig":
        try:
            return cls(twin_constant=TWIN_CONSTANTS[mode], **kw)
        except KeyError:
            raise DomainError(f"unknown twin-constant mode {mode!r}") from None

    def with_(self, **kw) -> "EstimateConfig":
        return replace(self, **kw)


DEFAULT_CONFIG = EstimateConfig()


def _check_dusart(x: float, config: EstimateConfig) -> None:
    if x < config.dusart_min_x:
        raise DomainError(
            f"x = {x} is below {config.dusart_min_x}, where the Dusart bound stops being valid"
        )


def dusart_pi_upper(x: float, config: EstimateConfig = DEFAULT_CONFIG) -> float:
    """``x/log x * (1 + 1/log x + 2.51/log^2 x)``, an upper bound for ``pi(x)``."""
    _check_dusart(x, config)
    L = math.log(x)
    return x / L * (1 + 1 / L + 2.51 / (L * L))


def g_tot(x: float, config: EstimateConfig = DEFAULT_CONFIG) -> float:
    return dusart_pi_upper(x, config) ** 2 / 4


def g_tot_prime(x: float, config: EstimateConfig = DEFAULT_CONFIG) -> float:
    """Closed-form derivative of :func:`g_tot`."""
    _check_dusart(x, config)
    L = math.log(x)
    return 0.25 * x * (100 * L**2 + 100 * L + 251) * (100 * L**3 + 51 * L - 753) / (5000 * L**7)


@dataclass(frozen=True)
class NdfValue:
    """Divisor factor: product of ``(p-1)/(p-2)`` over odd ``p | n`` with ``p*p <= n``."""

    n: int
    numerator: int
    denominator: int
    factors: tuple[int, ...] = field(default=())

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    def __float__(self):
        return self.value

    def rounded(self, places: int = 4) -> float:
        return round_half_away(Fraction(self.numerator, self.denominator), places)

    def __str__(self):
        return f"{self.rounded(4):.4f}"


def ndf(n: int) -> NdfValue:
    if n < 1:
        raise DomainError(f"ndf needs n >= 1, got {n}")
    n = int(n)
    frac = Fraction(1)
    included = []
    rest = n
    while rest % 2 == 0:
        rest //= 2
    root = math.isqrt(n)
    for p in base_primes(root).tolist():
        if p == 2:
            continue
        if p * p > rest:
            break
        if rest % p == 0:
            included.append(p)
            frac *= Fraction(p - 1, p - 2)
            while rest % p == 0:
                rest //= p
    # what is left is 1 or a single prime; it counts only if its square fits under n
    if rest > 2 and rest * rest <= n:
        included.append(rest)
        frac *= Fraction(rest - 1, rest - 2)
    return NdfValue(n, frac.numerator, frac.denominator, tuple(included))


def _ndf_block(start: int, count: int, primes: list[int]) -> np.ndarray:
    values = np.ones(count, dtype=np.float64)
    end = start + count
    for p in primes:
        sq = p * p
        if sq >= end:
            break
        first = max(-(-start // p) * p, sq)
        if first >= end:
            continue
        values[first - start :: p] *= (p - 1) / (p - 2)
    return values


def ndf_values(start: int, count: int, workers: int = 1, chunk: int = 1 << 18) -> np.ndarray:
    """Floating-point ``ndf`` for every ``n`` in ``[start, start + count)``.

    Factors are applied in ascending prime order, so each entry is
    independent of chunking and of ``workers``.
    """
    end = start + count
    primes = [p for p in base_primes(math.isqrt(end - 1)).tolist() if p > 2]
    spans = [(s, min(chunk, end - s)) for s in range(start, end, chunk)]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(workers) as pool:
            blocks = list(pool.map(lambda sc: _ndf_block(sc[0], sc[1], primes), spans))
    else:
        blocks = [_ndf_block(s, c, primes) for s, c in spans]
    return np.concatenate(blocks)


def ndf_average(start: int, count: int, workers: int = 1) -> float:
    if start < 2 or count < 1:
        raise DomainError(f"ndf_average needs start >= 2 and count >= 1, got ({start}, {count})")
    values = ndf_values(start, count, workers)
    # fsum is exactly rounded, hence independent of summation order
    return math.fsum(values.tolist()) / count


@dataclass(frozen=True)
class UnbalanceValue:
    n: int
    range: RangeKind
    lower: int
    upper: int
    u: float
    correction: float


def unbalance(
    n: int,
    kind: RangeKind | str = RangeKind.FULL,
    engine: PrimeEngine | None = None,
    config: EstimateConfig = DEFAULT_CONFIG,
) -> UnbalanceValue:
    """Prime-count unbalance around ``n``.

    Full range: ``2*pi(n)/pi(2n)``.  Reduced range: the same ratio taken
    over the primes of the reduced window ``[2n - b, b]`` with ``b`` the
    largest integer below ``n*sqrt(2)``, i.e. twice the primes in
    ``[2n - b, n]`` over all primes in the window.
    """
    kind = RangeKind.parse(kind)
    if n < 5:
        raise DomainError(f"unbalance needs n >= 5, got {n}")
    engine = engine or default_engine()
    if kind is RangeKind.FULL:
        lower, whole = engine.pi(n), engine.pi(2 * n)
    else:
        b = reduced_upper(n)
        below = engine.pi(2 * n - b - 1)
        lower = engine.pi(n) - below
        whole = engine.pi(b) - below
    u = 2 * lower / whole
    return UnbalanceValue(n, kind, lower, whole - lower, u, u**config.correction_exponent)


def estimate(
    n: int,
    kind: RangeKind | str = RangeKind.FULL,
    corrected: bool = False,
    engine: PrimeEngine | None = None,
    config: EstimateConfig = DEFAULT_CONFIG,
) -> float:
    """Estimated number of Goldbach pairs for ``n``; unrounded."""
    kind = RangeKind.parse(kind)
    value = g_tot_prime(2 * n, config) * 2 * config.twin_constant * ndf(n).value
    if kind is RangeKind.REDUCED:
        value *= config.reduced_factor
    if corrected:
        value *= unbalance(n, kind, engine, config).correction
    return value
