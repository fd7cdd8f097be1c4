"""Growth certificates for k-fold sumsets of sets with few products.

``certify`` executes, on a concrete set A, the constructive argument behind
the lower bound |kA| >= c * |A|^psi / M^d:

  1. group A x A into slope classes (points on common lines through the
     origin, one line per element of A/A);
  2. keep the popular classes, those holding at least |A|/(2M^2) points;
  3. for consecutive popular slopes, form the planar block
     k1*(class_j) + k2*(class_{j+1}), the last block pairing the top class
     with its projection onto the vertical line x = min A;
  4. verify, in exact arithmetic, that the blocks are pairwise disjoint,
     sit inside kA x kA, and each has size equal to the product of its two
     one-dimensional k-fold projection counts;
  5. conclude |kA|^2 >= sum of block sizes, and check the constant-based
     lower bound itself.

Every check is an exact rational comparison; the resulting Certificate
records every intermediate quantity and serializes to deterministic JSON.
Inequalities that hold for *every* valid input by theorem (popular mass,
projection doubling) raise InternalInconsistencyError when violated, since
a violation can only mean a bug.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .bounds import BoundConstants, BoundValue, Strategy, bound_value, constants, tree_for
from .exactnum import Point, Rational, exact_div, format_rational, rational
from .setops import (
    FiniteSet,
    PlanarSet,
    kfold_sum,
    planar_kfold,
    planar_sum,
    productset,
    project_y,
    quotientset,
)

COMPARISON_MODE = "integer-power"


class InternalInconsistencyError(RuntimeError):
    """A theorem-guaranteed inequality failed: implementation bug."""

    def __init__(self, step: str, detail: str):
        self.step = step
        super().__init__(f"{step}: {detail}")


@dataclass(frozen=True)
class SlopeClass:
    """Points of A x A on the line y = slope * x."""

    slope: Rational
    points: PlanarSet

    def __post_init__(self) -> None:
        for p in self.points:
            if p.y != self.slope * p.x:
                raise ValueError(f"point {p} is off the line y = {format_rational(self.slope)}x")

    @property
    def size(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class DisjointnessResult:
    ok: bool
    # 1-based indices of the two colliding blocks, when ok is False
    witness: Optional[tuple[Point, int, int]]


@dataclass(frozen=True)
class BlockRecord:
    j: int
    slope: Rational
    proj_size: int
    block_size: int


@dataclass(frozen=True)
class Certificate:
    """Full record of one certified run; all fields exact."""

    n: int
    k: int
    k1: int
    k2: int
    M: Rational
    quotient_size: int
    threshold: Rational
    popular_slopes: tuple[Rational, ...]
    m: int
    popular_mass: int
    blocks: tuple[BlockRecord, ...]
    disjoint_ok: bool
    product_formula_ok: bool
    containment_ok: bool
    chain_ok: bool
    sum_of_blocks: int
    kA_size: int
    bound_constants: BoundConstants
    theorem_bound: BoundValue
    theorem_holds: bool
    disjoint_witness: Optional[tuple[Point, int, int]] = None

    @property
    def all_checks_pass(self) -> bool:
        return (
            self.disjoint_ok
            and self.product_formula_ok
            and self.containment_ok
            and self.chain_ok
            and self.theorem_holds
        )

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "k": self.k,
            "k1": self.k1,
            "k2": self.k2,
            "M": format_rational(self.M),
            "quotient_size": self.quotient_size,
            "threshold": format_rational(self.threshold),
            "popular_slopes": [format_rational(s) for s in self.popular_slopes],
            "m": self.m,
            "popular_mass": self.popular_mass,
            "blocks": [
                {
                    "j": b.j,
                    "slope_j": format_rational(b.slope),
                    "proj_size_j": b.proj_size,
                    "block_size": b.block_size,
                }
                for b in self.blocks
            ],
            "disjoint_ok": self.disjoint_ok,
            "product_formula_ok": self.product_formula_ok,
            "containment_ok": self.containment_ok,
            "chain_ok": self.chain_ok,
            "sum_of_blocks": self.sum_of_blocks,
            "kA_size": self.kA_size,
            "bound_constants": {
                "k": self.bound_constants.k,
                "psi": format_rational(self.bound_constants.psi),
                "d": format_rational(self.bound_constants.d),
                "c": self.bound_constants.c_string(),
                "split": self.bound_constants.split.render(),
            },
            "theorem_bound": {
                "radicand": format_rational(self.theorem_bound.radicand),
                "root": self.theorem_bound.root,
            },
            "theorem_holds": self.theorem_holds,
            "comparison_mode": COMPARISON_MODE,
        }
        return json.dumps(doc, indent=2) + "\n"


def doubling_M(a: FiniteSet) -> Rational:
    """Least admissible multiplicative doubling ratio |AA| / |A|."""
    return exact_div(len(productset(a, a)), len(a))


def slope_classes(a: FiniteSet) -> list[SlopeClass]:
    """Partition of A x A into lines through the origin, by slope."""
    buckets: dict[Rational, list[Point]] = {}
    for x in a.elements:
        for y in a.elements:
            buckets.setdefault(exact_div(y, x), []).append(Point(x, y))
    classes = [
        SlopeClass(slope=s, points=PlanarSet(tuple(sorted(pts))))
        for s, pts in sorted(buckets.items())
    ]
    n = len(a)
    total = sum(c.size for c in classes)
    if total != n * n:
        raise InternalInconsistencyError(
            "slope-partition", f"class sizes sum to {total}, expected {n * n}"
        )
    return classes


def popularity_threshold(n: int, m_ratio: Rational) -> Rational:
    """Pigeonhole threshold |A| / (2 M^2)."""
    return exact_div(n, 2 * m_ratio * m_ratio)


def popular_slopes(
    classes: list[SlopeClass], n: int, m_ratio: Rational
) -> list[SlopeClass]:
    """Classes meeting the popularity threshold, in increasing slope order.

    Two pigeonhole consequences hold for every valid input: the popular
    classes carry at least half the n^2 mass, and there are at least n/2 of
    them.  Either failing indicates a bug, not an interesting input.
    """
    threshold = popularity_threshold(n, m_ratio)
    popular = [c for c in classes if c.size >= threshold]
    popular.sort(key=lambda c: c.slope)
    mass = sum(c.size for c in popular)
    if 2 * mass < n * n:
        raise InternalInconsistencyError(
            "popular-mass", f"popular mass {mass} < n^2/2 = {n * n}/2"
        )
    if 2 * len(popular) < n:
        raise InternalInconsistencyError(
            "popular-count", f"m = {len(popular)} < n/2 = {n}/2"
        )
    return popular


def vertical_projection(cls: SlopeClass, x0: Rational) -> PlanarSet:
    """Horizontal projection of a class onto the vertical line x = x0."""
    return PlanarSet(tuple(sorted({Point(x0, p.y) for p in cls.points})))


def build_blocks(
    popular: list[SlopeClass], a: FiniteSet, k1: int, k2: int
) -> list[PlanarSet]:
    """Planar blocks k1*(class_j) + k2*(class_{j+1}) for j = 1..m.

    The (m+1)-st operand is the top class projected onto the vertical line
    x = min A, so the final block exists even when m = 1.
    """
    if not popular:
        raise ValueError("need at least one popular class")
    if k1 < 1 or k2 < 1:
        raise ValueError("k1, k2 must be >= 1")
    m = len(popular)
    folds_k1 = [planar_kfold(c.points, k1) for c in popular]
    if k1 == k2:
        folds_k2 = folds_k1
    else:
        folds_k2 = [planar_kfold(c.points, k2) for c in popular]
    vertical = vertical_projection(popular[m - 1], a.min)
    blocks = [planar_sum(folds_k1[j], folds_k2[j + 1]) for j in range(m - 1)]
    blocks.append(planar_sum(folds_k1[m - 1], planar_kfold(vertical, k2)))
    return blocks


def check_disjoint(blocks: list[PlanarSet]) -> DisjointnessResult:
    """Exact pairwise disjointness over all blocks.

    A single sweep through a point -> block-index map finds any collision;
    indices in the witness are 1-based, matching block labels.
    """
    seen: dict[Point, int] = {}
    for j, block in enumerate(blocks, start=1):
        for p in block.points:
            other = seen.get(p)
            if other is not None:
                return DisjointnessResult(ok=False, witness=(p, other, j))
            seen[p] = j
    return DisjointnessResult(ok=True, witness=None)


def check_product_formula(
    block: PlanarSet, left: PlanarSet, right: PlanarSet, k1: int, k2: int
) -> bool:
    """|block| must equal |k1-fold of left's y-projection| times
    |k2-fold of right's y-projection| (the operands span independent
    directions, so the planar sum is injective)."""
    left_size = len(kfold_sum(project_y(left), k1))
    right_size = len(kfold_sum(project_y(right), k2))
    return len(block) == left_size * right_size


def check_projection_doubling(
    cls: SlopeClass, product_size: int, n: int, m_ratio: Rational
) -> bool:
    """For B = y-projection of a popular class, verify exactly
    |BB| <= |AA| <= M|A| <= 2M^3|B|; all three hold by theorem."""
    b = project_y(cls.points)
    bb_size = len(productset(b, b))
    if bb_size > product_size:
        raise InternalInconsistencyError(
            "projection-doubling", f"|BB| = {bb_size} > |AA| = {product_size}"
        )
    if product_size > m_ratio * n:
        raise InternalInconsistencyError(
            "projection-doubling", f"|AA| = {product_size} > M|A|"
        )
    if m_ratio * n > 2 * m_ratio**3 * len(b):
        raise InternalInconsistencyError(
            "projection-doubling",
            f"M|A| > 2M^3|B| for slope {format_rational(cls.slope)}",
        )
    return True


def certify(
    a: FiniteSet,
    k: int,
    strategy: Strategy = "balanced",
    doubling_override: Optional[Union[int, str, Fraction]] = None,
) -> Certificate:
    """Run the full block construction on (A, k) and verify every step.

    The split strategy fixes both the top-level (k1, k2) and the recursion
    tree behind the bound constants.  M defaults to the exact |AA|/|A|; an
    override must be at least that value.
    """
    if k < 2:
        raise ValueError("certification needs k >= 2")
    tree = tree_for(k, strategy)
    assert tree.children is not None
    k1, k2 = tree.children[0].k, tree.children[1].k

    n = len(a)
    product_size = len(productset(a, a))
    minimal_m = exact_div(product_size, n)
    if doubling_override is not None:
        m_ratio = rational(doubling_override)
        if m_ratio < minimal_m:
            raise ValueError(
                f"doubling override {format_rational(m_ratio)} below exact "
                f"|AA|/|A| = {format_rational(minimal_m)}"
            )
    else:
        m_ratio = minimal_m
    quotient_size = len(quotientset(a, a))

    classes = slope_classes(a)
    if len(classes) != quotient_size:
        raise InternalInconsistencyError(
            "slope-partition",
            f"{len(classes)} slope classes but |A/A| = {quotient_size}",
        )
    popular = popular_slopes(classes, n, m_ratio)
    for cls in popular:
        check_projection_doubling(cls, product_size, n, m_ratio)

    m = len(popular)
    blocks = build_blocks(popular, a, k1, k2)

    records = tuple(
        BlockRecord(
            j=j + 1,
            slope=popular[j].slope,
            proj_size=len(project_y(popular[j].points)),
            block_size=len(blocks[j]),
        )
        for j in range(m)
    )

    disjoint = check_disjoint(blocks)

    vertical = vertical_projection(popular[m - 1], a.min)
    product_formula_ok = all(
        check_product_formula(
            blocks[j],
            popular[j].points,
            popular[j + 1].points if j + 1 < m else vertical,
            k1,
            k2,
        )
        for j in range(m)
    )

    ka = kfold_sum(a, k)
    ka_size = len(ka)
    ka_elements = frozenset(ka.elements)
    containment_ok = all(
        p.x in ka_elements and p.y in ka_elements for b in blocks for p in b.points
    )

    sum_of_blocks = sum(len(b) for b in blocks)
    chain_ok = ka_size * ka_size >= sum_of_blocks

    bc = constants(k, tree)
    bv = bound_value(bc, n, m_ratio)
    theorem_holds = bv.holds_for(ka_size)

    return Certificate(
        n=n,
        k=k,
        k1=k1,
        k2=k2,
        M=m_ratio,
        quotient_size=quotient_size,
        threshold=popularity_threshold(n, m_ratio),
        popular_slopes=tuple(c.slope for c in popular),
        m=m,
        popular_mass=sum(c.size for c in popular),
        blocks=records,
        disjoint_ok=disjoint.ok,
        product_formula_ok=product_formula_ok,
        containment_ok=containment_ok,
        chain_ok=chain_ok,
        sum_of_blocks=sum_of_blocks,
        kA_size=ka_size,
        bound_constants=bc,
        theorem_bound=bv,
        theorem_holds=theorem_holds,
        disjoint_witness=disjoint.witness,
    )
