"""Exact constants for the k-fold sumset lower bound.

The lower bound |kA| >= c * |A|^psi / M^d is driven by three constants
generated by a split recursion: a split of k into k1 + k2 gives

    psi_k = (1 + psi_k1 + psi_k2) / 2
    d_k   = (3*(d_k1 + d_k2) + 2*(psi_k1 + psi_k2)) / 2
    c_k   = (c_k1 * c_k2 * 2^-(1 + d_k1 + d_k2 + psi_k1 + psi_k2)) ^ (1/2)

with base case psi_1 = 1, d_1 = 0, c_1 = 1.  Every c_k is a power of two,
so it is stored as its exact base-2 exponent; psi and d are dyadic
rationals.  Nothing here is ever floated: comparisons against values like
log_4(2k) are done by raising both sides to an integer power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exactnum import Rational, format_rational

STRATEGIES = ("balanced", "pow2", "dp")


@dataclass(frozen=True)
class SplitTree:
    """Binary split tree over k: each internal node splits k into k1 + k2."""

    k: int
    children: Optional[tuple["SplitTree", "SplitTree"]]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("tree arity must be >= 1")
        if self.children is None:
            if self.k != 1:
                raise ValueError("leaves must have k = 1")
        else:
            left, right = self.children
            if left.k + right.k != self.k:
                raise ValueError(f"split {left.k}+{right.k} != {self.k}")

    @classmethod
    def leaf(cls) -> "SplitTree":
        return cls(1, None)

    @classmethod
    def node(cls, left: "SplitTree", right: "SplitTree") -> "SplitTree":
        return cls(left.k + right.k, (left, right))

    def render(self) -> str:
        if self.children is None:
            return "1"
        left, right = self.children
        return f"({left.render()}+{right.render()})"


def parse_split_tree(text: str) -> SplitTree:
    """Parse the render() grammar: tree := "1" | "(" tree "+" tree ")"."""
    s = text.replace(" ", "")
    pos = 0

    def parse() -> SplitTree:
        nonlocal pos
        if pos < len(s) and s[pos] == "1":
            pos += 1
            return SplitTree.leaf()
        if pos < len(s) and s[pos] == "(":
            pos += 1
            left = parse()
            if pos >= len(s) or s[pos] != "+":
                raise ValueError(f"expected '+' at offset {pos} in {text!r}")
            pos += 1
            right = parse()
            if pos >= len(s) or s[pos] != ")":
                raise ValueError(f"expected ')' at offset {pos} in {text!r}")
            pos += 1
            return SplitTree.node(left, right)
        raise ValueError(f"expected '1' or '(' at offset {pos} in {text!r}")

    tree = parse()
    if pos != len(s):
        raise ValueError(f"trailing characters at offset {pos} in {text!r}")
    return tree


def balanced_tree(k: int) -> SplitTree:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return SplitTree.leaf()
    return SplitTree.node(balanced_tree(k - k // 2), balanced_tree(k // 2))


def pow2_tree(k: int) -> SplitTree:
    """Split off half of the largest power of two <= k; halving exactly
    when k itself is a power of two."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return SplitTree.leaf()
    half = 1 << (k.bit_length() - 2)
    return SplitTree.node(pow2_tree(k - half), pow2_tree(half))


# dp tables: k -> psi, and k -> best k2 (the smaller part of the best split)
_DP_PSI: dict[int, Fraction] = {1: Fraction(1)}
_DP_SPLIT: dict[int, int] = {}


def _fill_dp(k: int) -> None:
    for j in range(2, k + 1):
        if j in _DP_PSI:
            continue
        best_psi = None
        best_k2 = None
        # scan k2 downward from j//2 so ties resolve to the most balanced split
        for k2 in range(j // 2, 0, -1):
            cand = (1 + _DP_PSI[j - k2] + _DP_PSI[k2]) / 2
            if best_psi is None or cand > best_psi:
                best_psi, best_k2 = cand, k2
        _DP_PSI[j] = best_psi
        _DP_SPLIT[j] = best_k2


def dp_tree(k: int) -> SplitTree:
    if k < 1:
        raise ValueError("k must be >= 1")
    _fill_dp(k)

    def build(j: int) -> SplitTree:
        if j == 1:
            return SplitTree.leaf()
        k2 = _DP_SPLIT[j]
        return SplitTree.node(build(j - k2), build(k2))

    return build(k)


Strategy = Union[str, SplitTree]


def tree_for(k: int, strategy: Strategy) -> SplitTree:
    if isinstance(strategy, SplitTree):
        if strategy.k != k:
            raise ValueError(f"explicit tree covers k={strategy.k}, expected {k}")
        return strategy
    if strategy == "balanced":
        return balanced_tree(k)
    if strategy == "pow2":
        return pow2_tree(k)
    if strategy == "dp":
        return dp_tree(k)
    raise ValueError(f"unknown split strategy {strategy!r}")


@dataclass(frozen=True)
class BoundConstants:
    """Exact (c, d, psi) triple for one k and split tree; c == 2**c_log2."""

    k: int
    psi: Fraction
    d: Fraction
    c_log2: Fraction
    split: SplitTree

    def __post_init__(self) -> None:
        assert self.psi >= 1 and self.d >= 0 and self.c_log2 <= 0
        for value in (self.psi, self.d, self.c_log2):
            den = value.denominator
            assert den & (den - 1) == 0, "exponents must be dyadic"

    def c_string(self) -> str:
        return f"2^({format_rational(self.c_log2)})"


def _tree_constants(tree: SplitTree) -> tuple[Fraction, Fraction, Fraction]:
    """Post-order (c_log2, d, psi) over a tree, iterative to tolerate
    arbitrarily lopsided explicit trees."""
    memo: dict[int, tuple[Fraction, Fraction, Fraction]] = {}
    stack = [tree]
    while stack:
        node = stack.pop()
        if id(node) in memo:
            continue
        if node.children is None:
            memo[id(node)] = (Fraction(0), Fraction(0), Fraction(1))
            continue
        left, right = node.children
        if id(left) in memo and id(right) in memo:
            cl, dl, pl = memo[id(left)]
            cr, dr, pr = memo[id(right)]
            psi = (1 + pl + pr) / 2
            d = (3 * (dl + dr) + 2 * (pl + pr)) / 2
            c = (cl + cr - (1 + dl + dr + pl + pr)) / 2
            memo[id(node)] = (c, d, psi)
        else:
            stack.append(node)
            stack.append(left)
            stack.append(right)
    return memo[id(tree)]


def psi(k: int, strategy: Strategy = "dp") -> Fraction:
    """Exponent of |A| in the lower bound, under the given split strategy."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if strategy == "dp":
        _fill_dp(k)
        return _DP_PSI[k]
    return _tree_constants(tree_for(k, strategy))[2]


def constants(k: int, strategy: Strategy = "dp") -> BoundConstants:
    """Full exact constant triple for k under the given split strategy."""
    if k < 1:
        raise ValueError("k must be >= 1")
    tree = tree_for(k, strategy)
    c_log2, d, psi_val = _tree_constants(tree)
    return BoundConstants(k=k, psi=psi_val, d=d, c_log2=c_log2, split=tree)


def floor_exponent(k: int) -> tuple[int, Fraction]:
    """(z, (z+2)/2) with z = floor(log2 k); (z+2)/2 >= log_4(2k) always."""
    if k < 1:
        raise ValueError("k must be >= 1")
    z = k.bit_length() - 1
    return z, Fraction(z + 2, 2)


def pow2_at_least(exponent: Fraction, value: int) -> bool:
    """Exact check 2**exponent >= value for rational exponent, value >= 1."""
    if value < 1:
        raise ValueError("comparison target must be >= 1")
    num, den = exponent.numerator, exponent.denominator
    if num < 0:
        return value == 1 and num == 0
    return 2**num >= value**den


def psi_dominates_log4(psi_value: Fraction, k: int) -> bool:
    """Exact check psi >= log_4(2k), i.e. 4**psi >= 2k."""
    return pow2_at_least(2 * psi_value, 2 * k)


@dataclass(frozen=True)
class BoundValue:
    """The bound c * n^psi / M^d as an exact root expression.

    All three exponents are dyadic, so bound**root is rational for the
    common denominator root = 2^t; the bound itself is radicand**(1/root).
    """

    radicand: Fraction
    root: int

    def holds_for(self, size: int) -> bool:
        """Exact size >= bound, via size**root >= radicand."""
        return Fraction(size) ** self.root >= self.radicand

    def decimal(self) -> float:
        """Float approximation, for reports only."""
        ln = math.log(self.radicand.numerator) - math.log(self.radicand.denominator)
        return math.exp(ln / self.root)


def bound_value(bc: BoundConstants, n: int, m_ratio: Rational) -> BoundValue:
    """Evaluate c * n^psi / M^d exactly for |A| = n and doubling ratio M."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if m_ratio < 1:
        raise ValueError("doubling ratio must be >= 1")
    root = max(bc.psi.denominator, bc.d.denominator, bc.c_log2.denominator)
    e_c = bc.c_log2 * root
    e_psi = bc.psi * root
    e_d = bc.d * root
    assert e_c.denominator == e_psi.denominator == e_d.denominator == 1
    radicand = (
        Fraction(2) ** int(e_c)
        * Fraction(n) ** int(e_psi)
        / Fraction(m_ratio) ** int(e_d)
    )
    return BoundValue(radicand=radicand, root=root)


def log4_string(x: int, digits: int = 4) -> str:
    """log_4(x) rendered exactly as p/q when x is a power of two, else as
    a fixed-precision decimal (display only)."""
    if x < 1:
        raise ValueError("x must be >= 1")
    if x & (x - 1) == 0:
        return format_rational(Fraction(x.bit_length() - 1, 2))
    return f"{math.log(x) / math.log(4):.{digits}f}"
