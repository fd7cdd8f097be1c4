"""Exact finite-set arithmetic: sumsets, product sets, and planar sums.

Sets are canonical (sorted, duplicate-free) tuples of exact rationals or
planar points.  Every operation is pure and returns canonical form;
cardinalities therefore always count distinct values, never multiset hits.
Pairwise sums/products are computed by hashing into a set and sorting once
at the end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Union

from .exactnum import Point, Rational, exact_div, format_rational, rational


@dataclass(frozen=True)
class FiniteSet:
    """Nonempty set of positive rationals, stored strictly increasing."""

    elements: tuple[Rational, ...]

    def __post_init__(self) -> None:
        if not self.elements:
            raise ValueError("empty set rejected: cardinality arguments need n >= 1")
        if self.elements[0] <= 0:
            raise ValueError("set elements must be positive")
        prev = self.elements[0]
        for cur in self.elements[1:]:
            if cur <= prev:
                raise ValueError("elements must be strictly increasing")
            prev = cur

    @classmethod
    def of(cls, values: Iterable[Union[int, str, Fraction]]) -> "FiniteSet":
        return cls(tuple(sorted({rational(v) for v in values})))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Rational]:
        return iter(self.elements)

    def __contains__(self, value: object) -> bool:
        return value in self.elements

    @property
    def min(self) -> Rational:
        return self.elements[0]

    @property
    def max(self) -> Rational:
        return self.elements[-1]

    def __str__(self) -> str:
        return "{" + ", ".join(format_rational(e) for e in self.elements) + "}"


@dataclass(frozen=True)
class PlanarSet:
    """Nonempty set of points in the open positive quadrant, in lex order."""

    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("empty planar set rejected")
        if self.points[0].x <= 0:
            raise ValueError("points must lie in the positive quadrant")
        prev = None
        for p in self.points:
            if p.y <= 0:
                raise ValueError("points must lie in the positive quadrant")
            if prev is not None and p <= prev:
                raise ValueError("points must be strictly increasing (lex)")
            prev = p

    @classmethod
    def of(cls, points: Iterable[tuple]) -> "PlanarSet":
        canon = {Point(rational(x), rational(y)) for x, y in points}
        return cls(tuple(sorted(canon)))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, p: object) -> bool:
        return p in self.points


def sumset(a: FiniteSet, b: FiniteSet) -> FiniteSet:
    """{x + y : x in A, y in B}."""
    eb = b.elements
    return FiniteSet(tuple(sorted({x + y for x in a.elements for y in eb})))


def productset(a: FiniteSet, b: FiniteSet) -> FiniteSet:
    """{x * y : x in A, y in B}."""
    eb = b.elements
    return FiniteSet(tuple(sorted({x * y for x in a.elements for y in eb})))


def quotientset(a: FiniteSet, b: FiniteSet) -> FiniteSet:
    """{x / y : x in A, y in B}; well-defined since all elements are positive."""
    out = set()
    for x in a.elements:
        for y in b.elements:
            out.add(exact_div(x, y))
    return FiniteSet(tuple(sorted(out)))


def kfold_sum(a: FiniteSet, k: int) -> FiniteSet:
    """A + A + ... + A with k summands, by iterated pairwise sumset."""
    if k < 1:
        raise ValueError("k-fold sum needs k >= 1")
    acc = a
    for _ in range(k - 1):
        acc = sumset(acc, a)
    return acc


def kfold_product(a: FiniteSet, k: int) -> FiniteSet:
    """A * A * ... * A with k factors."""
    if k < 1:
        raise ValueError("k-fold product needs k >= 1")
    acc = a
    for _ in range(k - 1):
        acc = productset(acc, a)
    return acc


def planar_sum(p: PlanarSet, q: PlanarSet) -> PlanarSet:
    """Componentwise vector sumset of two planar point sets."""
    qq = q.points
    out = set()
    add = out.add
    for px, py in p.points:
        for qx, qy in qq:
            add(Point(px + qx, py + qy))
    return PlanarSet(tuple(sorted(out)))


def planar_kfold(p: PlanarSet, k: int) -> PlanarSet:
    if k < 1:
        raise ValueError("k-fold planar sum needs k >= 1")
    acc = p
    for _ in range(k - 1):
        acc = planar_sum(acc, p)
    return acc


def project_y(p: PlanarSet) -> FiniteSet:
    """Set of y-coordinates (projection onto the vertical axis)."""
    return FiniteSet(tuple(sorted({pt.y for pt in p.points})))


def cartesian(a: FiniteSet, b: FiniteSet) -> PlanarSet:
    """Full grid A x B; always has exactly |A|*|B| points."""
    eb = b.elements
    pts = tuple(Point(x, y) for x in a.elements for y in eb)
    grid = PlanarSet(tuple(sorted(pts)))
    assert len(grid) == len(a) * len(b)
    return grid


# --- set files -------------------------------------------------------------
#
# A set file is a JSON array whose entries are integers or "p/q" strings,
# e.g. [1, "3/2", 7].  The writer emits lowest terms, integers as bare ints.

def set_to_json(a: FiniteSet) -> str:
    items: list[object] = [
        e.numerator if e.denominator == 1 else format_rational(e) for e in a.elements
    ]
    return json.dumps(items)


def set_from_json(text: str) -> FiniteSet:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"set file is not valid JSON: {e}") from e
    if not isinstance(raw, list):
        raise ValueError("set file must be a JSON array")
    values = []
    for item in raw:
        if isinstance(item, bool) or not isinstance(item, (int, str)):
            raise ValueError(
                f"set entries must be integers or 'p/q' strings, got {item!r}"
            )
        value = rational(item)
        if value <= 0:
            raise ValueError(f"set elements must be positive, got {item!r}")
        values.append(value)
    if not values:
        raise ValueError("set file holds no elements")
    return FiniteSet(tuple(sorted(set(values))))


def read_set_file(path: Union[str, Path]) -> FiniteSet:
    return set_from_json(Path(path).read_text())


def write_set_file(path: Union[str, Path], a: FiniteSet) -> None:
    Path(path).write_text(set_to_json(a) + "\n")
