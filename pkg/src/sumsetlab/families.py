"""Generators for structured and random test sets.

Arithmetic and geometric progressions, two-ratio geometric grids, seeded
random subsets, and disjoint unions.  Where a family has a closed-form
cardinality (product set of a geometric progression, k-fold sum of an
arithmetic progression, ...) the predicted value is exposed so tests can
pin computed sizes against it; anything without a closed form reports
None rather than an estimate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exactnum import Rational, format_rational, rational
from .setops import FiniteSet

RationalLike = Union[int, str, Fraction]


def _as_rational(value: RationalLike, name: str, positive: bool = True) -> Rational:
    v = rational(value)
    if positive and v <= 0:
        raise ValueError(f"{name} must be positive, got {format_rational(v)}")
    return v


@dataclass(frozen=True)
class ApSpec:
    """Arithmetic progression {start, start+step, ...} with n terms."""

    start: Rational
    step: Rational
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", _as_rational(self.start, "start"))
        object.__setattr__(self, "step", _as_rational(self.step, "step"))
        if self.n < 1:
            raise ValueError("n must be >= 1")


@dataclass(frozen=True)
class GpSpec:
    """Geometric progression {start * ratio^i : 0 <= i < n}."""

    start: Rational
    ratio: Rational
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", _as_rational(self.start, "start"))
        object.__setattr__(self, "ratio", _as_rational(self.ratio, "ratio"))
        if self.ratio == 1:
            raise ValueError("ratio must differ from 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")


@dataclass(frozen=True)
class Gp2dSpec:
    """Two-ratio geometric grid {start * r^i * s^j}; ratios must be
    multiplicatively independent or the grid silently collapses."""

    start: Rational
    ratio1: Rational
    ratio2: Rational
    n1: int
    n2: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", _as_rational(self.start, "start"))
        object.__setattr__(self, "ratio1", _as_rational(self.ratio1, "ratio1"))
        object.__setattr__(self, "ratio2", _as_rational(self.ratio2, "ratio2"))
        if self.ratio1 == 1 or self.ratio2 == 1:
            raise ValueError("ratios must differ from 1")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("n1, n2 must be >= 1")
        if not multiplicatively_independent(self.ratio1, self.ratio2):
            raise ValueError(
                f"ratios {format_rational(self.ratio1)} and "
                f"{format_rational(self.ratio2)} are multiplicatively dependent"
            )


@dataclass(frozen=True)
class RangePool:
    """Integer pool {lo, ..., hi} for random sampling."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo < 1:
            raise ValueError("pool must contain positive integers only")
        if self.hi < self.lo:
            raise ValueError("empty pool range")


@dataclass(frozen=True)
class RandomSubsetSpec:
    """Seeded uniform sample (without replacement) from a pool.

    The draw is random.Random(seed).sample over the sorted pool, so a given
    (seed, pool, size) always regenerates the identical set.
    """

    size: int
    seed: int
    pool: Union[RangePool, GpSpec]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("size must be >= 1")
        pool_n = (
            self.pool.hi - self.pool.lo + 1
            if isinstance(self.pool, RangePool)
            else self.pool.n
        )
        if self.size > pool_n:
            raise ValueError(f"size {self.size} exceeds pool of {pool_n}")


@dataclass(frozen=True)
class UnionSpec:
    """Disjoint union of two sub-family sets; overlap is an error."""

    first: "FamilySpec"
    second: "FamilySpec"


FamilySpec = Union[ApSpec, GpSpec, Gp2dSpec, RandomSubsetSpec, UnionSpec]


def generate(spec: FamilySpec) -> FiniteSet:
    """Materialize the set a family spec describes."""
    if isinstance(spec, ApSpec):
        return FiniteSet.of(spec.start + i * spec.step for i in range(spec.n))
    if isinstance(spec, GpSpec):
        return FiniteSet.of(spec.start * spec.ratio**i for i in range(spec.n))
    if isinstance(spec, Gp2dSpec):
        return FiniteSet.of(
            spec.start * spec.ratio1**i * spec.ratio2**j
            for i in range(spec.n1)
            for j in range(spec.n2)
        )
    if isinstance(spec, RandomSubsetSpec):
        if isinstance(spec.pool, RangePool):
            pool = list(range(spec.pool.lo, spec.pool.hi + 1))
        else:
            pool = list(generate(spec.pool))
        picked = random.Random(spec.seed).sample(pool, spec.size)
        return FiniteSet.of(picked)
    if isinstance(spec, UnionSpec):
        a = generate(spec.first)
        b = generate(spec.second)
        overlap = set(a.elements) & set(b.elements)
        if overlap:
            raise ValueError(
                f"union parts overlap at {format_rational(sorted(overlap)[0])}"
            )
        return FiniteSet(tuple(sorted(a.elements + b.elements)))
    raise TypeError(f"unknown family spec {spec!r}")


def known_product_size(spec: FamilySpec) -> Optional[int]:
    """Predicted |AA| where a closed form exists, else None."""
    if isinstance(spec, GpSpec):
        return 2 * spec.n - 1
    if isinstance(spec, Gp2dSpec):
        # exponent grid of the product: (2*n1-1) x (2*n2-1)
        return (2 * spec.n1 - 1) * (2 * spec.n2 - 1)
    return None


def known_kfold_size(spec: FamilySpec, k: int) -> Optional[int]:
    """Predicted |kA| where a closed form exists, else None."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        if isinstance(spec, (ApSpec, GpSpec)):
            return spec.n
        if isinstance(spec, Gp2dSpec):
            return spec.n1 * spec.n2
        if isinstance(spec, RandomSubsetSpec):
            return spec.size
        if isinstance(spec, UnionSpec):
            first = known_kfold_size(spec.first, 1)
            second = known_kfold_size(spec.second, 1)
            if first is not None and second is not None:
                return first + second
        return None
    if isinstance(spec, ApSpec):
        return k * (spec.n - 1) + 1
    if isinstance(spec, GpSpec) and k == 2:
        # distinct exponent pairs {i <= j}: collisions are impossible for a
        # rational ratio != 1 (prime-valuation argument), so the count is
        # the number of unordered pairs with repetition
        return spec.n * (spec.n + 1) // 2
    return None


# --- multiplicative independence --------------------------------------------

def _factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; fine at generator scale."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _exponent_vector(r: Rational) -> dict[int, int]:
    vec = dict(_factorize(r.numerator))
    for p, e in _factorize(r.denominator).items():
        vec[p] = vec.get(p, 0) - e
    return {p: e for p, e in vec.items() if e != 0}


def multiplicatively_independent(r: RationalLike, s: RationalLike) -> bool:
    """True iff r^a * s^b = 1 has no integer solution besides a = b = 0.

    Writes both ratios as prime-exponent vectors and tests the vectors for
    parallelism; r or s equal to 1 is trivially dependent.
    """
    rv = _exponent_vector(rational(r))
    sv = _exponent_vector(rational(s))
    if not rv or not sv:
        return False
    p0, e0 = min(rv.items())
    f0 = sv.get(p0, 0)
    primes = set(rv) | set(sv)
    return any(e0 * sv.get(p, 0) != f0 * rv.get(p, 0) for p in primes)


# --- JSON form (CLI spec files) ----------------------------------------------

def spec_to_dict(spec: FamilySpec) -> dict:
    if isinstance(spec, ApSpec):
        return {
            "kind": "ap",
            "start": format_rational(spec.start),
            "step": format_rational(spec.step),
            "n": spec.n,
        }
    if isinstance(spec, GpSpec):
        return {
            "kind": "gp",
            "start": format_rational(spec.start),
            "ratio": format_rational(spec.ratio),
            "n": spec.n,
        }
    if isinstance(spec, Gp2dSpec):
        return {
            "kind": "gp2d",
            "start": format_rational(spec.start),
            "ratio1": format_rational(spec.ratio1),
            "ratio2": format_rational(spec.ratio2),
            "n1": spec.n1,
            "n2": spec.n2,
        }
    if isinstance(spec, RandomSubsetSpec):
        if isinstance(spec.pool, RangePool):
            pool = {"kind": "range", "lo": spec.pool.lo, "hi": spec.pool.hi}
        else:
            pool = spec_to_dict(spec.pool)
        return {"kind": "random-subset", "size": spec.size, "seed": spec.seed, "pool": pool}
    if isinstance(spec, UnionSpec):
        return {
            "kind": "union",
            "first": spec_to_dict(spec.first),
            "second": spec_to_dict(spec.second),
        }
    raise TypeError(f"unknown family spec {spec!r}")


def spec_from_dict(data: dict) -> FamilySpec:
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError("family spec must be an object with a 'kind' field")
    kind = data["kind"]
    try:
        if kind == "ap":
            return ApSpec(data["start"], data["step"], int(data["n"]))
        if kind == "gp":
            return GpSpec(data["start"], data["ratio"], int(data["n"]))
        if kind == "gp2d":
            return Gp2dSpec(
                data["start"], data["ratio1"], data["ratio2"],
                int(data["n1"]), int(data["n2"]),
            )
        if kind == "random-subset":
            pool_data = data["pool"]
            if pool_data.get("kind") == "range":
                pool: Union[RangePool, GpSpec] = RangePool(
                    int(pool_data["lo"]), int(pool_data["hi"])
                )
            else:
                pool_spec = spec_from_dict(pool_data)
                if not isinstance(pool_spec, GpSpec):
                    raise ValueError("random-subset pool must be a range or gp")
                pool = pool_spec
            return RandomSubsetSpec(int(data["size"]), int(data["seed"]), pool)
        if kind == "union":
            return UnionSpec(spec_from_dict(data["first"]), spec_from_dict(data["second"]))
    except KeyError as e:
        raise ValueError(f"family spec missing field {e.args[0]!r}") from e
    raise ValueError(f"unknown family kind {kind!r}")
