"""Moment/cumulant transforms over exact rationals.

Free cumulants are tied to moments by sums over non-crossing partitions:
the i-th moment is the sum over NC(i) of products of cumulants indexed by
block sizes, and the inverse weights each partition by the Mobius value of
its interval up to the one-block partition.  The classical transform is the
same construction over all set partitions, with the partition-lattice Mobius
weight (-1)^(r-1) (r-1)! for an r-block partition.

Both directions only depend on a partition through its multiset of block
sizes, so the sums are evaluated from profile tables: counts (and Mobius
totals) of partitions grouped by block-size profile.  The non-crossing tables
are built once per order by streaming the enumerator; the classical counts
use the standard closed form i! / (prod_s (s!)^m_s m_s!).  Tests check both
tables against direct enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import KindMismatchError, SizeLimitError, ValidationError
from .noncrossing import (
    _kreweras_blocks,
    iter_nc_blocks,
    mobius_full,
    size_ceiling,
)

FREE = "free"
CLASSICAL = "classical"

# beyond this order the classical direction switches to the exponential
# generating function log/exp path
CLASSICAL_PARTITION_CAP = 12


def as_fraction(value) -> Fraction:
    """Exact coercion: int or Fraction only.  Floats are rejected, never
    silently converted."""
    if isinstance(value, bool):
        raise ValidationError("bool is not a rational scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    raise ValidationError(
        f"exact rational required, got {type(value).__name__}: {value!r}"
    )


def _as_values(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_fraction(v) for v in values)


@dataclass(frozen=True)
class MomentSequence:
    """Moments m_1..m_p of a (possibly signed-total-mass) measure."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_values(self.values))

    @property
    def p(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> Fraction:
        """1-indexed access: seq[i] is m_i."""
        if not 1 <= i <= self.p:
            raise ValidationError(f"moment index {i} outside 1..{self.p}")
        return self.values[i - 1]


@dataclass(frozen=True)
class CumulantSequence:
    """Cumulants k_1..k_p tagged with their kind (free or classical)."""

    values: tuple[Fraction, ...]
    kind: str = FREE

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_values(self.values))
        if self.kind not in (FREE, CLASSICAL):
            raise ValidationError(f"unknown cumulant kind {self.kind!r}")

    @property
    def p(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> Fraction:
        if not 1 <= i <= self.p:
            raise ValidationError(f"cumulant index {i} outside 1..{self.p}")
        return self.values[i - 1]


def _require_kind(seq: CumulantSequence, kind: str) -> None:
    if seq.kind != kind:
        raise KindMismatchError(f"expected {kind} cumulants, got {seq.kind}")


# ------------------------------------------------------------- profile tables


def _profile(blocks) -> tuple[int, ...]:
    return tuple(sorted((len(b) for b in blocks), reverse=True))


@lru_cache(maxsize=None)
def _nc_profile_counts(n: int) -> dict[tuple[int, ...], int]:
    counts: dict[tuple[int, ...], int] = {}
    for blocks in iter_nc_blocks(n):
        key = _profile(blocks)
        counts[key] = counts.get(key, 0) + 1
    return counts


@lru_cache(maxsize=None)
def _nc_profile_mobius(n: int) -> dict[tuple[int, ...], int]:
    """For each block-size profile, the sum over non-crossing partitions with
    that profile of the Mobius value of [partition, one-block]."""
    totals: dict[tuple[int, ...], int] = {}
    for blocks in iter_nc_blocks(n):
        comp = _kreweras_blocks(blocks, n)
        mob = 1
        for v in comp:
            mob *= mobius_full(len(v))
        key = _profile(blocks)
        totals[key] = totals.get(key, 0) + mob
    return totals


def _integer_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Partitions of the integer n as descending tuples."""

    def rec(remaining: int, cap: int, prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield prefix
            return
        for part in range(min(cap, remaining), 0, -1):
            yield from rec(remaining - part, part, prefix + (part,))

    yield from rec(n, n, ())


def _multiplicities(profile: tuple[int, ...]) -> dict[int, int]:
    mult: dict[int, int] = {}
    for s in profile:
        mult[s] = mult.get(s, 0) + 1
    return mult


@lru_cache(maxsize=None)
def _set_partition_profile_count(profile: tuple[int, ...]) -> int:
    """Number of set partitions of {1..n} with the given block-size profile:
    n! / (prod_s (s!)^m_s m_s!)."""
    n = sum(profile)
    denom = 1
    for s, m in _multiplicities(profile).items():
        denom *= math.factorial(s) ** m * math.factorial(m)
    return math.factorial(n) // denom


def _product_for_profile(profile: tuple[int, ...], values: tuple[Fraction, ...]) -> Fraction:
    acc = Fraction(1)
    for s in profile:
        acc *= values[s - 1]
    return acc


def _check_order(p: int, max_n: int | None) -> None:
    if p < 1:
        raise ValidationError("order p must be >= 1")
    ceiling = size_ceiling(max_n)
    if p > ceiling:
        raise SizeLimitError(
            f"order {p} exceeds the partition-sum ceiling {ceiling}"
        )


# ------------------------------------------------------------------ free side


def moments_from_free_cumulants(
    cumulants: CumulantSequence, max_n: int | None = None
) -> MomentSequence:
    """m_i = sum over non-crossing partitions of {1..i} of the product of
    cumulants over block sizes."""
    _require_kind(cumulants, FREE)
    _check_order(cumulants.p, max_n)
    out = []
    for i in range(1, cumulants.p + 1):
        acc = Fraction(0)
        for profile, count in _nc_profile_counts(i).items():
            acc += count * _product_for_profile(profile, cumulants.values)
        out.append(acc)
    return MomentSequence(tuple(out))


def free_cumulants_from_moments(
    moments: MomentSequence, max_n: int | None = None
) -> CumulantSequence:
    """Mobius inversion of the non-crossing moment formula: each partition is
    weighted by the Mobius value of its interval up to the one-block
    partition."""
    _check_order(moments.p, max_n)
    out = []
    for i in range(1, moments.p + 1):
        acc = Fraction(0)
        for profile, weight in _nc_profile_mobius(i).items():
            acc += weight * _product_for_profile(profile, moments.values)
        out.append(acc)
    return CumulantSequence(tuple(out), FREE)


def free_convolve(a: MomentSequence, b: MomentSequence) -> MomentSequence:
    """Moments of the free additive convolution, by adding free cumulants."""
    if a.p != b.p:
        raise ValidationError(f"order mismatch: {a.p} vs {b.p}")
    ka = free_cumulants_from_moments(a)
    kb = free_cumulants_from_moments(b)
    total = CumulantSequence(
        tuple(x + y for x, y in zip(ka.values, kb.values)), FREE
    )
    return moments_from_free_cumulants(total)


# ------------------------------------------------------------- classical side


def _classical_weight(num_blocks: int) -> int:
    return (-1) ** (num_blocks - 1) * math.factorial(num_blocks - 1)


def _egf_series(values: tuple[Fraction, ...], constant: Fraction):
    from .series import TruncatedSeries

    coeffs = [constant]
    for i, v in enumerate(values, start=1):
        coeffs.append(v / math.factorial(i))
    return TruncatedSeries.from_coeffs(coeffs)


def _values_from_egf(series) -> tuple[Fraction, ...]:
    return tuple(
        c * math.factorial(i)
        for i, c in enumerate(series.coeffs[1:], start=1)
    )


def moments_from_classical_cumulants(
    cumulants: CumulantSequence, max_n: int | None = None
) -> MomentSequence:
    """Same shape as the free formula but summed over all set partitions.
    Above the partition cap the exponential-generating-function identity
    exp(sum c_i z^i / i!) = sum m_i z^i / i! is used instead."""
    _require_kind(cumulants, CLASSICAL)
    if cumulants.p < 1:
        raise ValidationError("order p must be >= 1")
    if cumulants.p > CLASSICAL_PARTITION_CAP:
        return MomentSequence(_values_from_egf(
            _egf_series(cumulants.values, Fraction(0)).exp()
        ))
    out = []
    for i in range(1, cumulants.p + 1):
        acc = Fraction(0)
        for profile in _integer_partitions(i):
            count = _set_partition_profile_count(profile)
            acc += count * _product_for_profile(profile, cumulants.values)
        out.append(acc)
    return MomentSequence(tuple(out))


def classical_cumulants_from_moments(
    moments: MomentSequence, max_n: int | None = None
) -> CumulantSequence:
    if moments.p < 1:
        raise ValidationError("order p must be >= 1")
    if moments.p > CLASSICAL_PARTITION_CAP:
        return CumulantSequence(_values_from_egf(
            _egf_series(moments.values, Fraction(1)).log()
        ), CLASSICAL)
    out = []
    for i in range(1, moments.p + 1):
        acc = Fraction(0)
        for profile in _integer_partitions(i):
            count = _set_partition_profile_count(profile)
            weight = _classical_weight(len(profile))
            acc += count * weight * _product_for_profile(profile, moments.values)
        out.append(acc)
    return CumulantSequence(tuple(out), CLASSICAL)
