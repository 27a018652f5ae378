"""Compactness classification and boundary projections for nest operators.

The canonical core makes compactness decidable in all the cases this
package promises: a banded part is compact exactly when its amplitude
rule vanishes in both directions, rank-one and finite parts are always
compact, and a banded part whose amplitudes stay above a threshold
infinitely often is certifiably noncompact.  The noncompact certificate
is a plateau: infinitely many matrix positions carrying |entry| >= delta
along coordinate basis vectors that converge weakly to zero, which keeps
the distance to every compact operator at least delta after discounting
the (summable, hence vanishing) interference of rank-one and finite
parts at those positions.

Two boundary computations live here as well:

* the zero boundaries: the largest cut annihilated on the right and the
  smallest cut that covers the range, which together decide whether the
  two-sided multiplication induced by a pair vanishes;
* the compact boundaries: the join of cuts whose lower compression is
  compact and the meet of cuts whose upper compression is compact.

On all-integer nests the lower/upper compressions at different finite
cuts differ by a finite-rank perturbation, so one probe cut decides all
of them at once; on the natural-number basis every lower compression is
a finite-rank matrix outright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import UndecidableBoundary, UnknownSupport
from .nests import NEG_INF, POS_INF, Nest, NestCut, make_nest
from .numerics import NormInterval, singular_values
from .operators import (
    ZERO,
    Band,
    FiniteMatrix,
    OperatorExpr,
    ProductOp,
    RankOne,
    canonicalize,
    entry,
    flatten_sum,
    identity,
    interval_proj,
    norm_bound,
    op_product,
    render,
)
from .rules import exact_support

WALK_BUDGET = 64
SCAN_BUDGET = 512
INTERFERENCE_CAP = 1 << 16


# ---------------------------------------------------------------------------
# cut projections and compressions


def cut_proj(cut: NestCut) -> OperatorExpr:
    """Projection onto coordinates <= cut value."""
    v = cut.value if isinstance(cut, NestCut) else float(cut)
    if v == NEG_INF:
        return ZERO
    if v == POS_INF:
        return identity()
    return interval_proj(None, int(v))


def cocut_proj(cut: NestCut) -> OperatorExpr:
    """Projection onto coordinates > cut value."""
    v = cut.value if isinstance(cut, NestCut) else float(cut)
    if v == NEG_INF:
        return identity()
    if v == POS_INF:
        return ZERO
    return interval_proj(int(v), None)


def compress_lower(T: OperatorExpr, cut) -> OperatorExpr:
    p = cut_proj(cut)
    return canonicalize(op_product(op_product(p, T), p))


def compress_upper(T: OperatorExpr, cut) -> OperatorExpr:
    p = cocut_proj(cut)
    return canonicalize(op_product(op_product(p, T), p))


def lower_corner(T: OperatorExpr, cut) -> OperatorExpr:
    """Strictly lower corner: rows above the cut, columns at or below it."""
    return canonicalize(op_product(op_product(cocut_proj(cut), T), cut_proj(cut)))


# ---------------------------------------------------------------------------
# compactness classification


@dataclass(frozen=True)
class PlateauCertificate:
    """Witness of noncompactness along one band.

    |entry| >= threshold at infinitely many positions (j + offset, j)
    with j running to +inf (direction +1) or -inf (-1); all other parts
    contribute at most `interference` beyond the suppression index, so
    the distance to every compact operator is at least `effective`.
    """

    offset: int
    direction: int
    threshold: float
    interference: float
    suppress_from: int

    @property
    def effective(self) -> float:
        return self.threshold - self.interference


@dataclass(frozen=True)
class CompactVerdict:
    status: str  # "Compact" | "NonCompact" | "Unknown"
    certificate: PlateauCertificate | None = None
    reason: str = ""
    evidence: dict | None = None

    @property
    def delta(self) -> float | None:
        return self.certificate.effective if self.certificate else None


def _fm_extent(parts) -> int:
    ext = 0
    for p in parts:
        if isinstance(p, FiniteMatrix):
            ext = max(ext, abs(p.row_lo), abs(p.row_hi), abs(p.col_lo), abs(p.col_hi))
    return ext


def _interference_at(parts, skip, offset: int, direction: int, n: int) -> float:
    """Bound on |sum of other parts| at positions (j + offset, j), |j| >= n."""
    total = 0.0
    for p in parts:
        if p is skip:
            continue
        if isinstance(p, Band):
            if p.offset == offset:
                total = POS_INF  # same band positions; cannot suppress
            continue
        if isinstance(p, RankOne):
            if direction > 0:
                te = math.sqrt(p.e.rule.sq_tail(n, +1))
                tf = math.sqrt(p.f.rule.sq_tail(n + offset, +1))
            else:
                te = math.sqrt(p.e.rule.sq_tail(-n, -1))
                tf = math.sqrt(p.f.rule.sq_tail(-n + offset, -1))
            total += te * tf
        elif isinstance(p, FiniteMatrix):
            if n <= _fm_extent([p]) + abs(offset):
                total += max(abs(v) for row in p.rows for v in row)
        else:
            total = POS_INF
    return total


def _suppress_interference(parts, band_part, direction: int, delta: float):
    n = max(64, _fm_extent(parts) + abs(band_part.offset) + 1)
    while n <= INTERFERENCE_CAP:
        ib = _interference_at(parts, band_part, band_part.offset, direction, n)
        if ib < delta / 2.0:
            return ib, n
        n *= 2
    return None, None


def _first_plateau_cert(parts, band_part) -> PlateauCertificate | None:
    """Noncompactness certificate at half the tail bound, halving on failure."""
    for direction in (+1, -1):
        ts = band_part.rule.tail_sup(direction)
        if ts <= 0.0:
            continue
        for frac in (0.5, 0.25, 0.125, 0.0625, 0.03125):
            delta = ts * frac
            if delta <= 0.0:
                break
            if band_part.rule.infinite_plateau(delta, direction) is True:
                ib, n = _suppress_interference(parts, band_part, direction, delta)
                if ib is not None:
                    return PlateauCertificate(band_part.offset, direction, delta, ib, n)
                break
    return None


def _best_plateau_lower(parts, band_part, direction: int) -> float:
    """Largest certified plateau level for one band in one direction."""
    ts = band_part.rule.tail_sup(direction)
    if ts <= 0.0:
        return 0.0
    best = 0.0
    for frac in (1.0 - 1e-9, 0.99, 0.9, 0.75, 0.5, 0.25, 0.125, 0.0625, 0.03125):
        delta = ts * frac
        if delta <= best:
            break
        ok = band_part.rule.infinite_plateau(delta, direction)
        if ok is True:
            ib, _ = _suppress_interference(parts, band_part, direction, delta)
            if ib is not None and delta - ib > best:
                best = delta - ib
                break
    return best


def _band_vanishes(p: Band):
    tp, tm = p.rule.tail_sup(+1), p.rule.tail_sup(-1)
    return tp == 0.0 and tm == 0.0


def classify_compact(T: OperatorExpr) -> CompactVerdict:
    """Three-valued compactness with a certificate on the NonCompact side."""
    C = canonicalize(T)
    parts = flatten_sum(C)
    if not parts:
        return CompactVerdict("Compact", reason="zero operator")
    pending = []
    for p in parts:
        if isinstance(p, Band):
            if not _band_vanishes(p):
                pending.append(p)
        elif isinstance(p, (RankOne, FiniteMatrix)):
            continue
        elif isinstance(p, ProductOp):
            lc = classify_compact(p.left)
            rc = classify_compact(p.right)
            if lc.status != "Compact" and rc.status != "Compact":
                return CompactVerdict("Unknown", reason="irreducible product with no compact factor")
        else:
            return CompactVerdict("Unknown", reason=f"unclassifiable part {p!r}")
    if not pending:
        return CompactVerdict(
            "Compact", reason="band amplitudes vanish in both directions; other parts have finite rank"
        )
    for p in pending:
        cert = _first_plateau_cert(parts, p)
        if cert is not None:
            return CompactVerdict(
                "NonCompact",
                certificate=cert,
                reason=f"band at offset {cert.offset} keeps |entry| >= {cert.threshold:.6g} "
                f"toward {'+' if cert.direction > 0 else '-'}infinity",
            )
    return CompactVerdict("Unknown", reason="band tail does not vanish but no plateau was certified")


# ---------------------------------------------------------------------------
# exact column/row extremes (with cross-part cancellation verification)


def _part_col_support(p):
    if isinstance(p, Band):
        return exact_support(p.rule)
    if isinstance(p, RankOne):
        return exact_support(p.e.rule)
    if isinstance(p, FiniteMatrix):
        return (float(p.col_lo), float(p.col_hi))
    raise UndecidableBoundary(f"no exact column support for {p!r}")


def _part_row_support(p):
    if isinstance(p, Band):
        s = exact_support(p.rule)
        lo = s.lo + p.offset if math.isfinite(s.lo) else s.lo
        hi = s.hi + p.offset if math.isfinite(s.hi) else s.hi
        return (lo, hi)
    if isinstance(p, RankOne):
        return exact_support(p.f.rule)
    if isinstance(p, FiniteMatrix):
        return (float(p.row_lo), float(p.row_hi))
    raise UndecidableBoundary(f"no exact row support for {p!r}")


def _as_bounds(s):
    if isinstance(s, tuple):
        return s
    return (s.lo, s.hi)


def _nonzero_indices(rule, lo_hint: float, count: int, budget: int = SCAN_BUDGET):
    out = []
    start = int(lo_hint) if math.isfinite(lo_hint) else -budget // 2
    for i in range(start, start + budget):
        if rule.value(i) != 0.0:
            out.append(i)
            if len(out) >= count:
                break
    return out


def _interference_rows(parts) -> int:
    n = 0
    for p in parts:
        if isinstance(p, Band):
            n += 1
        elif isinstance(p, FiniteMatrix):
            n += len(p.rows)
    return n


def _col_probe_rows(parts, j: int) -> list:
    rows = set()
    need = _interference_rows(parts) + 1
    for p in parts:
        if isinstance(p, Band):
            if p.rule.value(j) != 0.0:
                rows.add(j + p.offset)
        elif isinstance(p, FiniteMatrix):
            if p.col_lo <= j <= p.col_hi:
                rows.update(range(p.row_lo, p.row_hi + 1))
        elif isinstance(p, RankOne):
            if p.e.value(j) != 0.0:
                lo = p.f.rule.support.lo
                rows.update(_nonzero_indices(p.f.rule, lo, need))
    return sorted(rows)


def _row_probe_cols(parts, i: int) -> list:
    cols = set()
    need = _interference_rows(parts) + 1
    for p in parts:
        if isinstance(p, Band):
            j = i - p.offset
            if p.rule.value(j) != 0.0:
                cols.add(j)
        elif isinstance(p, FiniteMatrix):
            if p.row_lo <= i <= p.row_hi:
                cols.update(range(p.col_lo, p.col_hi + 1))
        elif isinstance(p, RankOne):
            if p.f.value(i) != 0.0:
                lo = p.e.rule.support.lo
                cols.update(_nonzero_indices(p.e.rule, lo, need))
    return sorted(cols)


def exact_col_lo(C: OperatorExpr) -> float:
    """Smallest nonzero column of the canonical expression; +inf when zero."""
    parts = flatten_sum(canonicalize(C))
    if not parts:
        return POS_INF
    try:
        los = [_as_bounds(_part_col_support(p))[0] for p in parts]
    except UnknownSupport as exc:
        raise UndecidableBoundary(f"column support not certified: {exc}") from exc
    j0 = min(los)
    if j0 == NEG_INF:
        return NEG_INF
    for j in range(int(j0), int(j0) + WALK_BUDGET + 1):
        for i in _col_probe_rows(parts, j):
            if entry(C, i, j) != 0.0:
                return float(j)
    raise UndecidableBoundary("column walk exhausted its budget without a nonzero column")


def exact_row_hi(C: OperatorExpr) -> float:
    """Largest nonzero row of the canonical expression; -inf when zero."""
    parts = flatten_sum(canonicalize(C))
    if not parts:
        return NEG_INF
    try:
        his = [_as_bounds(_part_row_support(p))[1] for p in parts]
    except UnknownSupport as exc:
        raise UndecidableBoundary(f"row support not certified: {exc}") from exc
    i0 = max(his)
    if i0 == POS_INF:
        return POS_INF
    for i in range(int(i0), int(i0) - WALK_BUDGET - 1, -1):
        for j in _row_probe_cols(parts, i):
            if entry(C, i, j) != 0.0:
                return float(i)
    raise UndecidableBoundary("row walk exhausted its budget without a nonzero row")


# ---------------------------------------------------------------------------
# boundary projections


def boundary_rq(task):
    """(largest cut annihilated by a on the right, smallest cut covering ran b)."""
    r = task.nest.largest_cut_leq(exact_col_lo(task.a) - 1.0)
    q = task.nest.smallest_cut_geq(exact_row_hi(task.b))
    return r, q


def _classify_compression(T: OperatorExpr, what: str) -> str:
    v = classify_compact(T)
    if v.status == "Unknown":
        raise UndecidableBoundary(f"{what}: {v.reason}")
    return v.status


def join_of_compact_lower_corners(nest: Nest, a: OperatorExpr) -> NestCut:
    """Join of cuts whose lower compression of a is compact."""
    nest = make_nest(nest)
    if nest.is_all:
        if nest.basis == "N":
            return nest.top  # every lower compression is a finite matrix
        status = _classify_compression(compress_lower(a, NestCut(0.0)), "lower compression probe")
        return nest.top if status == "Compact" else nest.bottom
    values = list(nest.cut_values)
    for v in reversed(values):
        status = _classify_compression(compress_lower(a, NestCut(v)), f"lower compression at {v}")
        if status == "Compact":
            return NestCut(v)
    return nest.bottom


def meet_of_compact_upper_corners(nest: Nest, b: OperatorExpr) -> NestCut:
    """Meet of cuts whose upper compression of b is compact."""
    nest = make_nest(nest)
    if nest.is_all:
        status = _classify_compression(compress_upper(b, NestCut(0.0)), "upper compression probe")
        return nest.bottom if status == "Compact" else nest.top
    values = list(nest.cut_values)
    for v in values:
        status = _classify_compression(compress_upper(b, NestCut(v)), f"upper compression at {v}")
        if status == "Compact":
            return NestCut(v)
    return nest.top


def boundary_ul(task):
    """(join of compact-lower cuts of a, meet of compact-upper cuts of b)."""
    return (
        join_of_compact_lower_corners(task.nest, task.a),
        meet_of_compact_upper_corners(task.nest, task.b),
    )


# ---------------------------------------------------------------------------
# limiting restricted norms


def limit_restricted_norm(T: OperatorExpr, side: str, direction: int) -> NormInterval:
    """Two-sided bounds on the limiting norm of a one-sided restriction.

    side "col": lim over c of || T Proj(columns beyond c) ||
    side "row": lim over c of || Proj(rows beyond c) T ||
    where "beyond" runs to +inf for direction +1 and to -inf for -1.
    The limit exists because the restrictions shrink monotonically.
    """
    if side not in ("col", "row"):
        raise ValueError(f"side must be 'col' or 'row', got {side!r}")
    C = canonicalize(T)
    parts = flatten_sum(C)
    hi = 0.0
    lo = 0.0
    for p in parts:
        if isinstance(p, Band):
            hi += p.rule.tail_sup(direction)
        elif isinstance(p, (RankOne, FiniteMatrix)):
            continue  # vanish in the limit
        else:
            hi += norm_bound(p)
    for p in parts:
        if isinstance(p, Band):
            lo = max(lo, _best_plateau_lower(parts, p, direction))
    return NormInterval(lo, hi)


# ---------------------------------------------------------------------------
# numeric essential-norm evidence (never upgrades a symbolic verdict)


def default_window(nest: Nest, half: int = 32):
    nest = make_nest(nest)
    if nest.basis == "N":
        return (1, 2 * half)
    return (-half, half)


def ess_norm_proxy(nest, T: OperatorExpr, windows=(128, 256, 512), k: int = 10, seed: int = 0) -> dict:
    """Windowed singular-value trend as advisory evidence only.

    The probed index grows with the window (k_w = max(k, w // 8)); for a
    compact operator those singular values decay as the window widens,
    while a genuine essential spectrum keeps them level.
    """
    nest = make_nest(nest)
    sigmas = []
    used = []
    ks = []
    for w in windows:
        lo, hi = (1, w) if nest.basis == "N" else (-(w // 2), w - w // 2)
        kw = max(k, w // 8)
        M = render(T, lo, hi)
        s = singular_values(M, kw, seed=seed)
        sigmas.append(float(s[-1]) if s.size else 0.0)
        used.append([lo, hi])
        ks.append(kw)
    first, last = sigmas[0], sigmas[-1]
    if last <= 1e-9 or (first > 0 and last <= 0.55 * first):
        evidence = "decay"
    elif first > 1e-9 and last >= 0.8 * first:
        evidence = "plateau"
    else:
        evidence = "inconclusive"
    return {"sigma_k": sigmas, "windows": used, "evidence": evidence, "level": last, "k": k, "k_used": ks}
