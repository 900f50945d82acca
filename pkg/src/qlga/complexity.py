"""Operation-count estimates for classical and quantum execution.

Everything is evaluated in log10 via ``lgamma`` so that inputs like
``n = 100`` particles never overflow; exact integers are attached when the
value is an integer below ``10**EXACT_LOG10_LIMIT``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ConfigError

EXACT_LOG10_LIMIT = 18


@dataclass(frozen=True)
class ResourceEstimate:
    formula_id: str
    log10_ops: float
    exact_ops: Optional[int] = None
    log10_approx: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.log10_ops):
            raise ValueError("log10_ops must be finite")
        if self.exact_ops is not None and abs(math.log10(self.exact_ops) - self.log10_ops) > 1e-9:
            raise ValueError("exact and log10 forms disagree")

    @property
    def value(self) -> float:
        return 10.0**self.log10_ops


def _log10_factorial(n: int) -> float:
    return math.lgamma(n + 1) / math.log(10)


def _exact_if_small(value: Fraction, log10_value: float) -> Optional[int]:
    if log10_value >= EXACT_LOG10_LIMIT or value.denominator != 1:
        return None
    return int(value)


def _positive(**kw) -> None:
    for name, v in kw.items():
        if int(v) != v or v < 1:
            raise ConfigError(f"{name} must be a positive integer, got {v}")


def count_variables(l: int, m: int, n: int) -> ResourceEstimate:
    """Amplitudes in the ``n``-particle sector, ``C(l m, n)``, and ``(l m)^n / n!``."""
    _positive(l=l, m=m)
    N = l * m
    if int(n) != n or not 0 <= n <= N:
        raise ConfigError(f"n must be an integer in [0, {N}]")
    log_exact = (math.lgamma(N + 1) - math.lgamma(n + 1) - math.lgamma(N - n + 1)) / math.log(10)
    log_approx = n * math.log10(N) - _log10_factorial(n)
    exact = None
    if log_exact < EXACT_LOG10_LIMIT:
        exact = math.comb(N, n)
        log_exact = math.log10(exact)
    return ResourceEstimate("variables", log_exact, exact, log_approx)


def t_classical(q: int, D: int, n: int) -> ResourceEstimate:
    """``q^(2 + D n) m^n / n!`` with ``m = 2D``: variables times ``q^2`` steps."""
    _positive(q=q, D=D)
    if int(n) != n or n < 0:
        raise ConfigError("n must be a non-negative integer")
    m = 2 * D
    log10 = (2 + D * n) * math.log10(q) + n * math.log10(m) - _log10_factorial(n)
    exact = None
    if log10 < EXACT_LOG10_LIMIT:
        exact = _exact_if_small(Fraction(q ** (2 + D * n) * m**n, math.factorial(n)), log10)
        if exact is not None:
            log10 = math.log10(exact)
    return ResourceEstimate("classical", log10, exact)


def t_quantum(q: int, D: int) -> ResourceEstimate:
    """``2D q^(2 + D)``: local operations per step times ``q^2`` steps."""
    _positive(q=q, D=D)
    exact = 2 * D * q ** (2 + D)
    return ResourceEstimate("quantum", math.log10(exact), exact if math.log10(exact) < EXACT_LOG10_LIMIT else None)


def t_quantum_pairwise(q: int, D: int) -> ResourceEstimate:
    """``4 D^2 q^(2 + 2D)``: one operation per q-bit pair per step."""
    _positive(q=q, D=D)
    exact = 4 * D**2 * q ** (2 + 2 * D)
    return ResourceEstimate("quantum_pairwise", math.log10(exact), exact if math.log10(exact) < EXACT_LOG10_LIMIT else None)


def estimate_all(q: int, D: int, n: int) -> list[ResourceEstimate]:
    """All four estimates for ``n`` particles on a ``q^D`` lattice."""
    return [
        count_variables(q**D, 2 * D, n),
        t_classical(q, D, n),
        t_quantum(q, D),
        t_quantum_pairwise(q, D),
    ]
