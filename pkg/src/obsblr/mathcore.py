"""
Numerically stable combinatorics.

Slot counts around 100 push binomial coefficients past 1e29 while the
state products they multiply shrink toward 1e-200, so the analytic model
does its bookkeeping in the log domain. Exact zeros are carried by the
``LOG_ZERO`` sentinel instead of ``-inf`` so that they never turn into NaN.
"""

import math
from typing import Iterable, Sequence, Union

from .errors import PreconditionError

_EXACT_LIMIT = 2**53
_TABLE_SIZE = 1025


class _LogZero:
    """Log of exactly zero. Absorbs under log-space multiplication."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "LOG_ZERO"

    def __reduce__(self):
        return (_LogZero, ())


LOG_ZERO = _LogZero()

LogWeight = Union[float, _LogZero]


def _build_table():
    # math.log accepts big ints, so every entry is the correctly rounded ln(n!)
    table = [0.0] * _TABLE_SIZE
    fact = 1
    for n in range(2, _TABLE_SIZE):
        fact *= n
        table[n] = math.log(fact)
    return tuple(table)


_LN_FACTORIAL = _build_table()


def is_log_zero(x: LogWeight) -> bool:
    return x is LOG_ZERO


def log_of(x: float) -> LogWeight:
    """Log of a nonnegative real, mapping 0 to ``LOG_ZERO``."""
    if x < 0:
        raise PreconditionError(f"log_of requires x >= 0, got {x}")
    if x == 0:
        return LOG_ZERO
    return math.log(x)


def exp_of(x: LogWeight) -> float:
    """Inverse of :func:`log_of`."""
    if x is LOG_ZERO:
        return 0.0
    return math.exp(x)


def log_mul(*terms: LogWeight) -> LogWeight:
    """Product in log space; any sentinel factor makes the product zero."""
    total = 0.0
    for t in terms:
        if t is LOG_ZERO:
            return LOG_ZERO
        total += t
    return total


def ln_factorial(n: int) -> float:
    """ln(n!) from a precomputed table, falling back to lgamma above 1024."""
    if n < _TABLE_SIZE:
        return _LN_FACTORIAL[n]
    return math.lgamma(n + 1)


def ln_binomial(n: int, k: int) -> LogWeight:
    """ln C(n, k), or ``LOG_ZERO`` outside 0 <= k <= n."""
    if k < 0 or k > n:
        return LOG_ZERO
    c = math.comb(n, k)
    if c < _EXACT_LIMIT:
        return math.log(c)
    return ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)


def binomial_coeff(n: int, k: int) -> float:
    """C(n, k) as a float; zero when k < 0 or k > n.

    Exact whenever the result is below 2**53, otherwise evaluated from
    log-factorial differences.
    """
    if k < 0 or k > n:
        return 0.0
    c = math.comb(n, k)
    if c < _EXACT_LIMIT:
        return float(c)
    return math.exp(ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))


def multinomial_pmf(k: int, counts: Sequence[int], shares: Sequence[float]) -> float:
    """Multinomial probability of ``counts`` out of ``k`` trials.

    Args:
        k: Total number of trials.
        counts: Outcome counts per category; must sum to ``k``.
        shares: Category probabilities; must sum to 1.

    Returns:
        ``k! / prod(j_i!) * prod(S_i ** j_i)``.
    """
    if len(counts) != len(shares):
        raise PreconditionError(
            f"counts and shares differ in length ({len(counts)} != {len(shares)})")
    if len(counts) < 2:
        raise PreconditionError("multinomial needs at least two categories")
    if any(j < 0 for j in counts) or sum(counts) != k:
        raise PreconditionError(f"counts {tuple(counts)} do not sum to k={k}")
    if any(s < 0 or s > 1 for s in shares) or abs(math.fsum(shares) - 1.0) > 1e-12:
        raise PreconditionError(f"shares {tuple(shares)} are not a distribution")

    coef = 1
    remaining = k
    for j in counts:
        coef *= math.comb(remaining, j)
        remaining -= j

    log_weight = 0.0
    for j, s in zip(counts, shares):
        if j == 0:
            continue
        if s == 0:
            return 0.0
        log_weight += j * math.log(s)

    if coef < _EXACT_LIMIT:
        prob = float(coef)
        # fixed factor order keeps the result invariant under relabelling
        for j, s in sorted(zip(counts, shares)):
            prob *= s**j
        return prob
    return math.exp(math.log(coef) + log_weight)


def log_sum_exp(values: Iterable[LogWeight]) -> LogWeight:
    """log(sum(exp(v))) without overflow; sentinels contribute nothing."""
    finite = [v for v in values if v is not LOG_ZERO]
    if not finite:
        return LOG_ZERO
    top = max(finite)
    return top + math.log(math.fsum(math.exp(v - top) for v in finite))


def round_half_away(x: float) -> int:
    """Round to the nearest integer, ties away from zero."""
    mag = abs(x)
    whole = math.floor(mag)
    if mag - whole >= 0.5:
        whole += 1
    return int(whole) if x >= 0 else -int(whole)
