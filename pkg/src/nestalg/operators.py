"""Symbolic operator expressions with decidable structural metadata.

Operators live on the same sequence space as the nests.  The expression
grammar is closed: diagonals and weighted shifts driven by sequence
rules, rank-one operators with square-summable symbol vectors, interval
projections, finite matrices, and sums/scales/products/adjoints of
those.  Construction immediately normalizes toward a small core:

  Band(rule, offset)   entries rule(j) at (j + offset, j); offset 0 is a
                       diagonal, -1 the lowering shift, +1 the raising
                       shift; products of shifts produce wider offsets
  RankOne(e, f)        (e (x) f) h = <h, e> f, entries e(j) * f(i)
  FiniteMatrix         explicit dense block
  Sum / Scale / Product leftovers

canonicalize() flattens sums, merges bands of equal offset, rewrites
products away (a product of two rank-ones becomes a scaled rank-one via
a windowed inner product with a certified tail slack; the rewrite is
only taken when the slack is below 1e-12 relative).  Entry evaluation
and truncated rendering are exact on the canonical product-free core.

The matrix convention: (e (x) f) maps h to <h, e> f, so the entry at
(row i, column j) is e(j) * f(i); column support is the support of e.
All scalars are real doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SchemaError, UnboundedRule, WindowTooLarge
from .rules import (
    EMPTY_SUPPORT,
    NEG_INF,
    ONE_RULE,
    POS_INF,
    SeqRule,
    Support,
    rule_const,
    rule_finite,
    rule_from_json,
    rule_indicator,
    rule_product,
    rule_scale,
    rule_shift,
    rule_sum,
    rule_to_json,
)

RENDER_CAP = 4096  # hard cap on one side of a rendering window

# tolerance for the rank-one pair merge inside canonicalize
MERGE_RTOL = 1e-12
INNER_WINDOW = 1 << 15


class OperatorExpr:
    """Base class for expression nodes; all concrete nodes are frozen."""


@dataclass(frozen=True)
class ZeroOp(OperatorExpr):
    def __repr__(self):
        return "Zero"


ZERO = ZeroOp()


@dataclass(frozen=True)
class RuledVector:
    """A vector whose entries come from a sequence rule."""

    rule: SeqRule

    @property
    def square_summable(self):
        return self.rule.is_square_summable()

    def norm_upper(self) -> float:
        return math.sqrt(self.rule.sq_total())

    def value(self, i: int) -> float:
        return self.rule.value(i)

    def values_on(self, lo: int, hi: int) -> np.ndarray:
        return np.array(self.rule.values_on(lo, hi), dtype=float)

    @property
    def support(self) -> Support:
        return self.rule.support


def make_vector(rule: SeqRule) -> RuledVector:
    if rule.is_square_summable() is not True:
        raise UnboundedRule(f"vector entries must be certified square-summable: {rule!r}")
    return RuledVector(rule)


def basis_vector(i: int) -> RuledVector:
    return RuledVector(rule_finite({i: 1.0}))


@dataclass(frozen=True)
class Band(OperatorExpr):
    rule: SeqRule
    offset: int

    def __repr__(self):
        return f"Band(off={self.offset}, {self.rule!r})"


@dataclass(frozen=True)
class RankOne(OperatorExpr):
    e: RuledVector
    f: RuledVector


@dataclass(frozen=True)
class FiniteMatrix(OperatorExpr):
    row_lo: int
    col_lo: int
    rows: tuple  # tuple of row tuples

    @property
    def row_hi(self) -> int:
        return self.row_lo + len(self.rows) - 1

    @property
    def col_hi(self) -> int:
        return self.col_lo + (len(self.rows[0]) - 1 if self.rows else -1)

    def as_array(self) -> np.ndarray:
        return np.array([list(r) for r in self.rows], dtype=float)


@dataclass(frozen=True)
class SumOp(OperatorExpr):
    left: OperatorExpr
    right: OperatorExpr


@dataclass(frozen=True)
class ScaleOp(OperatorExpr):
    scalar: float
    x: OperatorExpr


@dataclass(frozen=True)
class ProductOp(OperatorExpr):
    left: OperatorExpr
    right: OperatorExpr


# ---------------------------------------------------------------------------
# constructors (normalize eagerly where cheap and exact)


def diag(rule: SeqRule) -> OperatorExpr:
    if rule.support.is_empty:
        return ZERO
    return Band(rule, 0)


def identity() -> OperatorExpr:
    return Band(ONE_RULE, 0)


def interval_proj(lo, hi) -> OperatorExpr:
    """Projection onto basis indices i with lo < i <= hi (cut semantics)."""
    lo_v = NEG_INF if lo is None else float(lo)
    hi_v = POS_INF if hi is None else float(hi)
    ind_lo = None if lo_v == NEG_INF else int(lo_v) + 1
    ind_hi = None if hi_v == POS_INF else int(hi_v)
    return diag(rule_indicator(ind_lo, ind_hi))


def wshift(rule: SeqRule, direction: str) -> OperatorExpr:
    if direction not in ("lower", "raise"):
        raise SchemaError(f"shift direction must be 'lower' or 'raise', got {direction!r}")
    if rule.support.is_empty:
        return ZERO
    return Band(rule, -1 if direction == "lower" else +1)


def band(rule: SeqRule, offset: int) -> OperatorExpr:
    if rule.support.is_empty:
        return ZERO
    return Band(rule, int(offset))


def rank_one(e: RuledVector, f: RuledVector) -> OperatorExpr:
    if e.rule.support.is_empty or f.rule.support.is_empty:
        return ZERO
    if e.square_summable is not True or f.square_summable is not True:
        raise UnboundedRule("rank-one symbols must be certified square-summable")
    return RankOne(e, f)


def finite_matrix(row_lo: int, col_lo: int, entries) -> OperatorExpr:
    rows = tuple(tuple(float(v) for v in row) for row in entries)
    if rows and len({len(r) for r in rows}) != 1:
        raise SchemaError("finite matrix rows must have equal length")
    return _trim_finite(FiniteMatrix(int(row_lo), int(col_lo), rows))


def _trim_finite(m: FiniteMatrix) -> OperatorExpr:
    arr = m.as_array()
    if arr.size == 0 or not np.any(arr):
        return ZERO
    nz_rows = np.nonzero(np.any(arr != 0.0, axis=1))[0]
    nz_cols = np.nonzero(np.any(arr != 0.0, axis=0))[0]
    r0, r1 = int(nz_rows[0]), int(nz_rows[-1])
    c0, c1 = int(nz_cols[0]), int(nz_cols[-1])
    sub = arr[r0 : r1 + 1, c0 : c1 + 1]
    return FiniteMatrix(m.row_lo + r0, m.col_lo + c0, tuple(tuple(v) for v in sub.tolist()))


def op_sum(*terms) -> OperatorExpr:
    parts = [t for t in terms if not isinstance(t, ZeroOp)]
    if not parts:
        return ZERO
    out = parts[0]
    for t in parts[1:]:
        out = SumOp(out, t)
    return out


def op_scale(scalar: float, x: OperatorExpr) -> OperatorExpr:
    s = float(scalar)
    if s == 0.0 or isinstance(x, ZeroOp):
        return ZERO
    if s == 1.0:
        return x
    if isinstance(x, Band):
        return band(rule_scale(x.rule, s), x.offset)
    if isinstance(x, RankOne):
        return RankOne(x.e, RuledVector(rule_scale(x.f.rule, s)))
    if isinstance(x, FiniteMatrix):
        return _trim_finite(FiniteMatrix(x.row_lo, x.col_lo, tuple(tuple(s * v for v in r) for r in x.rows)))
    if isinstance(x, SumOp):
        return op_sum(op_scale(s, x.left), op_scale(s, x.right))
    if isinstance(x, ScaleOp):
        return op_scale(s * x.scalar, x.x)
    return ScaleOp(s, x)


def op_adjoint(x: OperatorExpr) -> OperatorExpr:
    """Adjoint, pushed all the way down (entries are real)."""
    if isinstance(x, ZeroOp):
        return ZERO
    if isinstance(x, Band):
        return band(rule_shift(x.rule, x.offset), -x.offset)
    if isinstance(x, RankOne):
        return RankOne(x.f, x.e)
    if isinstance(x, FiniteMatrix):
        arr = x.as_array().T
        return _trim_finite(FiniteMatrix(x.col_lo, x.row_lo, tuple(tuple(v) for v in arr.tolist())))
    if isinstance(x, SumOp):
        return op_sum(op_adjoint(x.left), op_adjoint(x.right))
    if isinstance(x, ScaleOp):
        return op_scale(x.scalar, op_adjoint(x.x))
    if isinstance(x, ProductOp):
        return op_product(op_adjoint(x.right), op_adjoint(x.left))
    raise SchemaError(f"cannot take adjoint of {x!r}")


def op_product(l: OperatorExpr, r: OperatorExpr) -> OperatorExpr:
    if isinstance(l, ZeroOp) or isinstance(r, ZeroOp):
        return ZERO
    return ProductOp(l, r)


# ---------------------------------------------------------------------------
# exact symbolic application to ruled vectors


def apply_to_vector(T: OperatorExpr, rule: SeqRule) -> SeqRule:
    """Entry rule of T v for product-free T; exact."""
    if isinstance(T, ZeroOp):
        return rule_const(0.0)
    if isinstance(T, Band):
        return rule_shift(rule_product(T.rule, rule), T.offset)
    if isinstance(T, FiniteMatrix):
        table = {}
        for ri, row in enumerate(T.rows):
            acc = 0.0
            for ci, v in enumerate(row):
                acc += v * rule.value(T.col_lo + ci)
            if acc != 0.0:
                table[T.row_lo + ri] = acc
        return rule_finite(table)
    if isinstance(T, SumOp):
        return rule_sum(apply_to_vector(T.left, rule), apply_to_vector(T.right, rule))
    if isinstance(T, ScaleOp):
        return rule_scale(apply_to_vector(T.x, rule), T.scalar)
    if isinstance(T, RankOne):
        val, slack = inner_rules(rule, T.e.rule)
        if slack > MERGE_RTOL * (1.0 + abs(val)):
            raise UnboundedRule("inner product tail not certifiably negligible")
        return rule_scale(T.f.rule, val)
    raise SchemaError(f"apply_to_vector needs a product-free expression, got {T!r}")


def inner_rules(u: SeqRule, v: SeqRule, window: int = INNER_WINDOW):
    """<u, v> = sum u(i) v(i) over a window, with a certified tail slack."""
    total = 0.0
    lo, hi = -window, window
    usup, vsup = u.support, v.support
    lo = max(lo, int(max(usup.lo, vsup.lo))) if math.isfinite(max(usup.lo, vsup.lo)) else lo
    hi = min(hi, int(min(usup.hi, vsup.hi))) if math.isfinite(min(usup.hi, vsup.hi)) else hi
    for i in range(lo, hi + 1):
        total += u.value(i) * v.value(i)
    tail_hi = math.sqrt(u.sq_tail(hi + 1, +1)) * math.sqrt(v.sq_tail(hi + 1, +1))
    tail_lo = math.sqrt(u.sq_tail(lo - 1, -1)) * math.sqrt(v.sq_tail(lo - 1, -1))
    slack = 0.0
    for t in (tail_hi, tail_lo):
        slack += t if math.isfinite(t) else 0.0 if t == 0.0 else POS_INF
    return total, slack


# ---------------------------------------------------------------------------
# canonicalization


def flatten_sum(T: OperatorExpr) -> list:
    if isinstance(T, SumOp):
        return flatten_sum(T.left) + flatten_sum(T.right)
    if isinstance(T, ZeroOp):
        return []
    return [T]


def _part_key(p: OperatorExpr):
    if isinstance(p, Band):
        return (0, p.offset, repr(p.rule))
    if isinstance(p, RankOne):
        return (1, 0, repr(p.e.rule) + "|" + repr(p.f.rule))
    if isinstance(p, FiniteMatrix):
        return (2, p.row_lo, repr(p.rows))
    return (3, 0, repr(p))


def _merge_parts(parts: list) -> list:
    bands = {}
    finites = []
    rest = []
    for p in parts:
        if isinstance(p, Band):
            if p.offset in bands:
                bands[p.offset] = rule_sum(bands[p.offset], p.rule)
            else:
                bands[p.offset] = p.rule
        elif isinstance(p, FiniteMatrix):
            finites.append(p)
        else:
            rest.append(p)
    out = []
    for off in sorted(bands):
        merged = band(bands[off], off)
        if not isinstance(merged, ZeroOp):
            out.append(merged)
    if finites:
        merged_fm = _merge_finite(finites)
        if not isinstance(merged_fm, ZeroOp):
            out.append(merged_fm)
    out.extend(rest)
    return sorted(out, key=_part_key)


def _merge_finite(ms: list) -> OperatorExpr:
    r0 = min(m.row_lo for m in ms)
    r1 = max(m.row_hi for m in ms)
    c0 = min(m.col_lo for m in ms)
    c1 = max(m.col_hi for m in ms)
    acc = np.zeros((r1 - r0 + 1, c1 - c0 + 1))
    for m in ms:
        acc[m.row_lo - r0 : m.row_hi - r0 + 1, m.col_lo - c0 : m.col_hi - c0 + 1] += m.as_array()
    return _trim_finite(FiniteMatrix(r0, c0, tuple(tuple(v) for v in acc.tolist())))


def _pair_product(l: OperatorExpr, r: OperatorExpr) -> OperatorExpr:
    """Product of two canonical parts; ProductOp when it cannot be reduced."""
    if isinstance(l, ZeroOp) or isinstance(r, ZeroOp):
        return ZERO
    if isinstance(l, Band) and isinstance(r, Band):
        # (l r) e_j = l.rule(j + r.off) r.rule(j) e_{j + r.off + l.off}
        merged = rule_product(rule_shift(l.rule, -r.offset), r.rule)
        return band(merged, l.offset + r.offset)
    if isinstance(r, RankOne) and not isinstance(l, ProductOp):
        # T (e (x) f) = e (x) T f
        try:
            new_f = apply_to_vector(l, r.f.rule)
        except (SchemaError, UnboundedRule):
            return ProductOp(l, r)
        if new_f.support.is_empty:
            return ZERO
        if new_f.is_square_summable() is not True:
            return ProductOp(l, r)
        return RankOne(r.e, RuledVector(new_f))
    if isinstance(l, RankOne) and not isinstance(r, ProductOp):
        # (e (x) f) T = (T* e) (x) f
        try:
            new_e = apply_to_vector(op_adjoint(r), l.e.rule)
        except (SchemaError, UnboundedRule):
            return ProductOp(l, r)
        if new_e.support.is_empty:
            return ZERO
        if new_e.is_square_summable() is not True:
            return ProductOp(l, r)
        return RankOne(RuledVector(new_e), l.f)
    if isinstance(l, Band) and isinstance(r, FiniteMatrix):
        cols = range(r.col_lo, r.col_hi + 1)
        table = {}
        for ci, j in enumerate(cols):
            for ri in range(len(r.rows)):
                i = r.row_lo + ri
                v = r.rows[ri][ci]
                if v != 0.0:
                    w = l.rule.value(i) * v
                    if w != 0.0:
                        table[(i + l.offset, j)] = table.get((i + l.offset, j), 0.0) + w
        return _table_to_finite(table)
    if isinstance(l, FiniteMatrix) and isinstance(r, Band):
        table = {}
        for ri in range(len(l.rows)):
            i = l.row_lo + ri
            for ci in range(len(l.rows[0])):
                k = l.col_lo + ci
                v = l.rows[ri][ci]
                if v != 0.0:
                    # column j of r contributes at row j + off = k
                    j = k - r.offset
                    w = v * r.rule.value(j)
                    if w != 0.0:
                        table[(i, j)] = table.get((i, j), 0.0) + w
        return _table_to_finite(table)
    if isinstance(l, FiniteMatrix) and isinstance(r, FiniteMatrix):
        # align the contraction index: columns of l against rows of r
        k0, k1 = max(l.col_lo, r.row_lo), min(l.col_hi, r.row_hi)
        if k0 > k1:
            return ZERO
        la = l.as_array()[:, k0 - l.col_lo : k1 - l.col_lo + 1]
        ra = r.as_array()[k0 - r.row_lo : k1 - r.row_lo + 1, :]
        return _trim_finite(FiniteMatrix(l.row_lo, r.col_lo, tuple(tuple(v) for v in (la @ ra).tolist())))
    return ProductOp(l, r)


def _table_to_finite(table: dict) -> OperatorExpr:
    if not table:
        return ZERO
    r0 = min(i for i, _ in table)
    r1 = max(i for i, _ in table)
    c0 = min(j for _, j in table)
    c1 = max(j for _, j in table)
    acc = np.zeros((r1 - r0 + 1, c1 - c0 + 1))
    for (i, j), v in table.items():
        acc[i - r0, j - c0] = v
    return _trim_finite(FiniteMatrix(r0, c0, tuple(tuple(v) for v in acc.tolist())))


def _canon_once(T: OperatorExpr) -> OperatorExpr:
    if isinstance(T, (ZeroOp, Band, FiniteMatrix)):
        return T
    if isinstance(T, RankOne):
        return T
    if isinstance(T, SumOp):
        parts = []
        for t in flatten_sum(T):
            ct = _canon_once(t)
            parts.extend(flatten_sum(ct))
        return op_sum(*_merge_parts(parts))
    if isinstance(T, ScaleOp):
        return op_scale(T.scalar, _canon_once(T.x))
    if isinstance(T, ProductOp):
        l = _canon_once(T.left)
        r = _canon_once(T.right)
        if isinstance(l, ZeroOp) or isinstance(r, ZeroOp):
            return ZERO
        lparts = flatten_sum(l) if isinstance(l, SumOp) else [l]
        rparts = flatten_sum(r) if isinstance(r, SumOp) else [r]
        acc = []
        for lp in lparts:
            for rp in rparts:
                prod = _pair_product(lp, rp)
                if not isinstance(prod, ZeroOp):
                    acc.append(prod)
        if not acc:
            return ZERO
        return op_sum(*_merge_parts(acc))
    raise SchemaError(f"unknown node {T!r}")


@lru_cache(maxsize=None)
def canonicalize(T: OperatorExpr) -> OperatorExpr:
    """Rewrite to the product-free core; fixpoint within a bounded pass count."""
    cur = T
    for _ in range(8):
        nxt = _canon_once(cur)
        if nxt == cur:
            return cur
        cur = nxt
    return cur


def is_product_free(T: OperatorExpr) -> bool:
    if isinstance(T, (ZeroOp, Band, RankOne, FiniteMatrix)):
        return True
    if isinstance(T, SumOp):
        return is_product_free(T.left) and is_product_free(T.right)
    if isinstance(T, ScaleOp):
        return False
    return False


# ---------------------------------------------------------------------------
# metadata


def _shift_support(s: Support, d: int) -> Support:
    if s.is_empty or d == 0:
        return s
    lo = s.lo + d if math.isfinite(s.lo) else s.lo
    hi = s.hi + d if math.isfinite(s.hi) else s.hi
    return Support(lo, hi, s.exact)


def _hull(a: Support, b: Support) -> Support:
    if a.is_empty:
        return b
    if b.is_empty:
        return a
    return Support(min(a.lo, b.lo), max(a.hi, b.hi), False)


def col_support(T: OperatorExpr) -> Support:
    if isinstance(T, ZeroOp):
        return EMPTY_SUPPORT
    if isinstance(T, Band):
        return T.rule.support
    if isinstance(T, RankOne):
        return T.e.rule.support
    if isinstance(T, FiniteMatrix):
        return Support(float(T.col_lo), float(T.col_hi), False)
    if isinstance(T, SumOp):
        return _hull(col_support(T.left), col_support(T.right))
    if isinstance(T, ScaleOp):
        return col_support(T.x)
    if isinstance(T, ProductOp):
        return col_support(T.right).intersect(NEG_INF, POS_INF)
    raise SchemaError(f"unknown node {T!r}")


def row_support(T: OperatorExpr) -> Support:
    if isinstance(T, ZeroOp):
        return EMPTY_SUPPORT
    if isinstance(T, Band):
        return _shift_support(T.rule.support, T.offset)
    if isinstance(T, RankOne):
        return T.f.rule.support
    if isinstance(T, FiniteMatrix):
        return Support(float(T.row_lo), float(T.row_hi), False)
    if isinstance(T, SumOp):
        return _hull(row_support(T.left), row_support(T.right))
    if isinstance(T, ScaleOp):
        return row_support(T.x)
    if isinstance(T, ProductOp):
        return row_support(T.left).intersect(NEG_INF, POS_INF)
    raise SchemaError(f"unknown node {T!r}")


def norm_bound(T: OperatorExpr) -> float:
    """Certified upper bound on the operator norm."""
    if isinstance(T, ZeroOp):
        return 0.0
    if isinstance(T, Band):
        return T.rule.sup_abs()
    if isinstance(T, RankOne):
        return T.e.norm_upper() * T.f.norm_upper()
    if isinstance(T, FiniteMatrix):
        return float(np.linalg.norm(T.as_array(), "fro"))
    if isinstance(T, SumOp):
        return norm_bound(T.left) + norm_bound(T.right)
    if isinstance(T, ScaleOp):
        return abs(T.scalar) * norm_bound(T.x)
    if isinstance(T, ProductOp):
        return norm_bound(T.left) * norm_bound(T.right)
    raise SchemaError(f"unknown node {T!r}")


def entry(T: OperatorExpr, i: int, j: int) -> float:
    """Exact matrix entry; expression must be product-free."""
    if isinstance(T, ZeroOp):
        return 0.0
    if isinstance(T, Band):
        return T.rule.value(j) if i == j + T.offset else 0.0
    if isinstance(T, RankOne):
        return T.e.value(j) * T.f.value(i)
    if isinstance(T, FiniteMatrix):
        if T.row_lo <= i <= T.row_hi and T.col_lo <= j <= T.col_hi:
            return T.rows[i - T.row_lo][j - T.col_lo]
        return 0.0
    if isinstance(T, SumOp):
        return entry(T.left, i, j) + entry(T.right, i, j)
    if isinstance(T, ScaleOp):
        return T.scalar * entry(T.x, i, j)
    raise SchemaError(f"entry() needs a product-free expression, got {T!r}")


# ---------------------------------------------------------------------------
# rendering


def _check_window(lo: int, hi: int):
    if lo > hi:
        raise SchemaError(f"window [{lo}, {hi}] is empty")
    if hi - lo + 1 > RENDER_CAP:
        raise WindowTooLarge(f"window [{lo}, {hi}] exceeds the {RENDER_CAP} cap")


def render(T: OperatorExpr, lo: int, hi: int) -> np.ndarray:
    """Dense truncation on rows and columns lo..hi (inclusive)."""
    m, _ = render_with_leakage(T, lo, hi)
    return m


def render_with_leakage(T: OperatorExpr, lo: int, hi: int):
    """Truncation plus a certified bound on the product truncation error.

    The bound is zero whenever canonicalization eliminated all products,
    which is the case for the whole catalog grammar.
    """
    _check_window(lo, hi)
    C = canonicalize(T)
    n = hi - lo + 1
    out = np.zeros((n, n))
    leak = 0.0
    for part in flatten_sum(C):
        if is_product_free(part):
            out += _render_exact(part, lo, hi)
        else:
            m, bound = _render_product(part, lo, hi)
            out += m
            leak += bound
    return out, leak


def _render_exact(part: OperatorExpr, lo: int, hi: int) -> np.ndarray:
    n = hi - lo + 1
    out = np.zeros((n, n))
    if isinstance(part, Band):
        for j in range(lo, hi + 1):
            i = j + part.offset
            if lo <= i <= hi:
                v = part.rule.value(j)
                if v != 0.0:
                    out[i - lo, j - lo] = v
        return out
    if isinstance(part, RankOne):
        e = part.e.values_on(lo, hi)
        f = part.f.values_on(lo, hi)
        return np.outer(f, e)
    if isinstance(part, FiniteMatrix):
        r0, r1 = max(part.row_lo, lo), min(part.row_hi, hi)
        c0, c1 = max(part.col_lo, lo), min(part.col_hi, hi)
        if r0 <= r1 and c0 <= c1:
            src = part.as_array()[
                r0 - part.row_lo : r1 - part.row_lo + 1, c0 - part.col_lo : c1 - part.col_lo + 1
            ]
            out[r0 - lo : r1 - lo + 1, c0 - lo : c1 - lo + 1] = src
        return out
    if isinstance(part, SumOp):
        return _render_exact(part.left, lo, hi) + _render_exact(part.right, lo, hi)
    if isinstance(part, ZeroOp):
        return out
    raise SchemaError(f"cannot render {part!r} exactly")


def _render_product(part: OperatorExpr, lo: int, hi: int):
    """Windowed product with an enlarged internal window and an error bound."""
    if isinstance(part, ScaleOp):
        m, bound = _render_product(part.x, lo, hi) if not is_product_free(part.x) else (
            _render_exact(part.x, lo, hi),
            0.0,
        )
        return part.scalar * m, abs(part.scalar) * bound
    if not isinstance(part, ProductOp):
        return _render_exact(part, lo, hi), 0.0
    width = hi - lo + 1
    elo, ehi = lo - width, hi + width
    if ehi - elo + 1 > RENDER_CAP:
        elo, ehi = lo, hi  # cap reached; the leakage bound stays honest
    ml, bl = render_with_leakage(part.left, elo, ehi)
    mr, br = render_with_leakage(part.right, elo, ehi)
    full = ml @ mr
    s = lo - elo
    cropped = full[s : s + width, s : s + width]
    # contraction indices outside the enlarged window
    row_tail = _row_sq_tail_beyond(part.left, elo, ehi)
    col_tail = _col_sq_tail_beyond(part.right, elo, ehi)
    leak = width * math.sqrt(row_tail) * math.sqrt(col_tail)
    nl, nr = norm_bound(part.left), norm_bound(part.right)
    leak = min(leak, nl * nr) if math.isfinite(leak) else nl * nr
    leak += bl * nr + br * nl
    return cropped, leak


def _col_sq_tail_beyond(T: OperatorExpr, lo: int, hi: int) -> float:
    """Upper bound on sup_j sum of squared entries in rows outside [lo, hi]."""
    C = canonicalize(T)
    total = 0.0
    for part in flatten_sum(C):
        if isinstance(part, Band):
            s = part.rule.sup_abs()
            rs = _shift_support(part.rule.support, part.offset)
            if rs.lo < lo or rs.hi > hi:
                total += s * s
        elif isinstance(part, RankOne):
            t = part.f.rule.sq_tail(hi + 1, +1) + part.f.rule.sq_tail(lo - 1, -1)
            total += part.e.norm_upper() ** 2 * t
        elif isinstance(part, FiniteMatrix):
            if part.row_lo < lo or part.row_hi > hi:
                total += float(np.sum(part.as_array() ** 2))
        else:
            total += norm_bound(part) ** 2
    return total


def _row_sq_tail_beyond(T: OperatorExpr, lo: int, hi: int) -> float:
    """Upper bound on sup_i sum of squared entries in columns outside [lo, hi]."""
    return _col_sq_tail_beyond(op_adjoint_safe(T), lo, hi)


def op_adjoint_safe(T: OperatorExpr) -> OperatorExpr:
    try:
        return op_adjoint(T)
    except SchemaError:
        return canonicalize(T)


# ---------------------------------------------------------------------------
# serialization


def parse_operator(doc) -> OperatorExpr:
    if not isinstance(doc, dict) or "op" not in doc:
        raise SchemaError(f"operator document must be a dict with an 'op': {doc!r}")
    op = doc["op"]
    if op == "zero":
        return ZERO
    if op == "identity":
        return identity()
    if op == "diag":
        return diag(rule_from_json(doc.get("rule")))
    if op == "rank_one":
        e = make_vector(rule_from_json(doc.get("e")))
        f = make_vector(rule_from_json(doc.get("f")))
        return rank_one(e, f)
    if op == "wshift":
        return wshift(rule_from_json(doc.get("rule")), doc.get("direction", "lower"))
    if op == "interval_proj":
        lo = doc.get("lo")
        hi = doc.get("hi")
        lo = None if lo in (None, "-inf") else int(lo)
        hi = None if hi in (None, "inf", "+inf") else int(hi)
        return interval_proj(lo, hi)
    if op == "sum":
        if "terms" in doc:
            return op_sum(*(parse_operator(t) for t in doc["terms"]))
        return op_sum(parse_operator(doc.get("left")), parse_operator(doc.get("right")))
    if op == "scale":
        if "scalar" not in doc:
            raise SchemaError("scale needs 'scalar'")
        return op_scale(doc["scalar"], parse_operator(doc.get("x")))
    if op == "product":
        if "factors" in doc:
            fs = [parse_operator(t) for t in doc["factors"]]
            if not fs:
                raise SchemaError("product needs at least one factor")
            out = fs[0]
            for t in fs[1:]:
                out = op_product(out, t)
            return out
        return op_product(parse_operator(doc.get("left")), parse_operator(doc.get("right")))
    if op == "adjoint":
        return op_adjoint(parse_operator(doc.get("x")))
    if op == "finite_matrix":
        if "entries" not in doc:
            raise SchemaError("finite_matrix needs 'entries'")
        return finite_matrix(doc.get("row_lo", 1), doc.get("col_lo", 1), doc["entries"])
    raise SchemaError(f"unknown operator kind {op!r}")


def operator_to_json(T: OperatorExpr) -> dict:
    if isinstance(T, ZeroOp):
        return {"op": "zero"}
    if isinstance(T, Band):
        if T.offset == 0:
            return {"op": "diag", "rule": rule_to_json(T.rule)}
        if T.offset == -1:
            return {"op": "wshift", "rule": rule_to_json(T.rule), "direction": "lower"}
        if T.offset == 1:
            return {"op": "wshift", "rule": rule_to_json(T.rule), "direction": "raise"}
        return {"op": "band", "rule": rule_to_json(T.rule), "offset": T.offset}
    if isinstance(T, RankOne):
        return {"op": "rank_one", "e": rule_to_json(T.e.rule), "f": rule_to_json(T.f.rule)}
    if isinstance(T, FiniteMatrix):
        return {
            "op": "finite_matrix",
            "row_lo": T.row_lo,
            "col_lo": T.col_lo,
            "entries": [list(r) for r in T.rows],
        }
    if isinstance(T, SumOp):
        return {"op": "sum", "terms": [operator_to_json(t) for t in flatten_sum(T)]}
    if isinstance(T, ScaleOp):
        return {"op": "scale", "scalar": T.scalar, "x": operator_to_json(T.x)}
    if isinstance(T, ProductOp):
        return {"op": "product", "left": operator_to_json(T.left), "right": operator_to_json(T.right)}
    raise SchemaError(f"cannot serialize {T!r}")
