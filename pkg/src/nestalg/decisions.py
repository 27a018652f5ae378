"""Verdicts for two-sided multiplications x -> a x b over a nest algebra.

Every decision returns a MultVerdict: a status string, a reason, and a
JSON-ready detail dict carrying the certificates (cuts, norm intervals,
witness indices).  Statuses never degrade silently: when a certificate
cannot be produced the status is "Unknown" and the detail says why.

The three main questions:

* is the induced map zero?  Decided exactly from the two zero-boundary
  cuts; a nonzero verdict always carries a concrete rank-one input whose
  image has a certified positive norm.
* is it compact?  Decided from compactness of one lower compression of
  a and one upper compression of b; on all-integer nests a single probe
  compression decides all finite cuts at once because any two differ by
  a finite-rank perturbation.
* is it weakly compact?  Two independent routes: the boundary route
  (compare the join/meet boundary projections, then inspect the
  obstruction block or tail norm in the equal case) and the two-cut
  route (search admissible cut pairs for vanishing obstruction norms).
  The two must agree whenever both decide; tests enforce that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .algebra import MultiplicationTask, rank_one_membership
from .compactness import (
    boundary_rq,
    classify_compact,
    compress_lower,
    compress_upper,
    default_window,
    ess_norm_proxy,
    exact_col_lo,
    join_of_compact_lower_corners,
    limit_restricted_norm,
    meet_of_compact_upper_corners,
)
from .errors import UndecidableBoundary
from .nests import NEG_INF, POS_INF, NestCut
from .numerics import NormInterval, power_norm
from .operators import (
    OperatorExpr,
    ZeroOp,
    basis_vector,
    canonicalize,
    col_support,
    entry,
    finite_matrix,
    flatten_sum,
    identity,
    norm_bound,
    op_product,
    operator_to_json,
    rank_one,
    render,
    row_support,
)
from .rules import rule_geometric

EPS_SCHEDULE = tuple(0.5**k for k in range(0, 21))
ROW_SCAN_BUDGET = 512


def cut_json(c: NestCut):
    v = c.value if isinstance(c, NestCut) else float(c)
    if v == POS_INF:
        return "inf"
    if v == NEG_INF:
        return "-inf"
    return int(v)


def _interval_json(iv: NormInterval) -> dict:
    return {"lo": iv.lo, "hi": iv.hi}


@dataclass(frozen=True)
class MultVerdict:
    question: str
    status: str
    reason: str = ""
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "question": self.question,
            "status": self.status,
            "reason": self.reason,
            "detail": self.detail,
        }


# ---------------------------------------------------------------------------
# zero test


def _first_nonzero_row_above(b: OperatorExpr, floor: float, budget: int = ROW_SCAN_BUDGET):
    """A row index i > floor where b has a verified nonzero entry."""
    from .compactness import _row_probe_cols  # shared probe machinery

    C = canonicalize(b)
    parts = flatten_sum(C)
    start = int(floor) + 1 if math.isfinite(floor) else int(row_support(C).lo) if math.isfinite(row_support(C).lo) else -budget // 2
    for i in range(start, start + budget):
        for j in _row_probe_cols(parts, i):
            v = entry(C, i, j)
            if v != 0.0:
                return i, j, v
    return None


def mult_zero_test(task: MultiplicationTask) -> MultVerdict:
    """Exact zero test with a rank-one witness on the nonzero side."""
    try:
        r, q = boundary_rq(task)
    except UndecidableBoundary as exc:
        return MultVerdict("zero", "Unknown", f"boundary not certified: {exc}")
    detail = {"annihilator_cut": cut_json(r), "range_cover_cut": cut_json(q)}
    if q.value <= r.value:
        return MultVerdict(
            "zero", "Zero", "the range cover cut sits at or below the annihilator cut", detail
        )
    # nonzero: build x = e (x) f with f = basis at the first nonzero column
    # of a and e = basis at a verified nonzero row of b above the
    # annihilator cut; then a x b = (b* e) (x) (a f) is nonzero.
    ja = exact_col_lo(task.a)
    found = _first_nonzero_row_above(task.b, r.value)
    if found is None:
        return MultVerdict("zero", "Unknown", "nonzero by boundaries but witness scan failed", detail)
    ib, jb, bval = found
    ca = canonicalize(task.a)
    from .compactness import _col_probe_rows

    ia_probe = None
    if math.isfinite(ja):
        for i in _col_probe_rows(flatten_sum(ca), int(ja)):
            v = entry(ca, i, int(ja))
            if v != 0.0:
                ia_probe = (int(ja), i, v)
                break
    else:
        # columns reach down indefinitely: walk down from the chosen row,
        # where the pairing is automatically admissible
        hi0 = col_support(ca).hi
        start = min(ib, int(hi0)) if math.isfinite(hi0) else ib
        parts = flatten_sum(ca)
        for j in range(start, start - ROW_SCAN_BUDGET, -1):
            hit = next((
                (j, i, entry(ca, i, j))
                for i in _col_probe_rows(parts, j)
                if entry(ca, i, j) != 0.0
            ), None)
            if hit is not None:
                ia_probe = hit
                break
    if ia_probe is None:
        return MultVerdict("zero", "Unknown", "column witness for a vanished unexpectedly", detail)
    ja, ia, aval = ia_probe
    if rank_one_membership(task.nest, basis_vector(ib), basis_vector(int(ja))).status != "Member":
        return MultVerdict("zero", "Unknown", "witness pairing fell outside the algebra", detail)
    witness_norm = abs(aval) * abs(bval)
    detail.update(
        {
            "witness": {
                "input": {"e_index": ib, "f_index": int(ja)},
                "x": operator_to_json(rank_one(basis_vector(ib), basis_vector(int(ja)))),
                "image_entry": {"row": ia, "col": jb, "value": aval * bval},
                "image_norm_lower": witness_norm,
            }
        }
    )
    return MultVerdict(
        "zero",
        "NonZero",
        f"basis input e_{ib} (x) e_{int(ja)} maps to an operator with entry "
        f"{aval * bval:.6g} at ({ia}, {jb})",
        detail,
    )


# ---------------------------------------------------------------------------
# compactness of the multiplication


def _verdict_json(v) -> dict:
    out = {"status": v.status, "reason": v.reason}
    if v.certificate is not None:
        c = v.certificate
        out["certificate"] = {
            "offset": c.offset,
            "direction": c.direction,
            "threshold": c.threshold,
            "interference": c.interference,
            "effective_delta": c.effective,
        }
    return out


def _a_side_verdict(task: MultiplicationTask, q: NestCut):
    nest = task.nest
    if q.value == POS_INF and nest.is_all:
        if nest.basis == "N":
            from .compactness import CompactVerdict

            return CompactVerdict("Compact", reason="every lower compression has finite rank")
        return classify_compact(compress_lower(task.a, NestCut(0.0)))
    return classify_compact(compress_lower(task.a, q))


def _b_side_verdict(task: MultiplicationTask, r: NestCut):
    nest = task.nest
    if r == nest.bottom and nest.is_all and nest.basis == "Z":
        return classify_compact(compress_upper(task.b, NestCut(0.0)))
    return classify_compact(compress_upper(task.b, r))


def mult_compact_decision(task: MultiplicationTask) -> MultVerdict:
    """Compactness of x -> a x b.

    A nonzero multiplication is compact exactly when the lower
    compression of a at the range cover cut and the upper compression of
    b at the annihilator cut are both compact; when the cover cut is an
    unattained limit the compression condition is evaluated at a probe
    cut, which is equivalent by finite-rank perturbation invariance.
    """
    try:
        r, q = boundary_rq(task)
    except UndecidableBoundary as exc:
        return MultVerdict("compact", "Unknown", f"boundary not certified: {exc}")
    if q.value <= r.value:
        return MultVerdict(
            "compact",
            "Compact",
            "the induced map is zero",
            {"annihilator_cut": cut_json(r), "range_cover_cut": cut_json(q)},
        )
    try:
        av = _a_side_verdict(task, q)
        bv = _b_side_verdict(task, r)
    except UndecidableBoundary as exc:
        return MultVerdict("compact", "Unknown", str(exc))
    detail = {
        "annihilator_cut": cut_json(r),
        "range_cover_cut": cut_json(q),
        "a_side": _verdict_json(av),
        "b_side": _verdict_json(bv),
    }
    if av.status == "NonCompact" or bv.status == "NonCompact":
        side = "a" if av.status == "NonCompact" else "b"
        return MultVerdict(
            "compact", "NonCompact", f"the {side}-side compression is noncompact", detail
        )
    if av.status == "Compact" and bv.status == "Compact":
        return MultVerdict("compact", "Compact", "both side compressions are compact", detail)
    detail["proxy"] = ess_norm_proxy(task.nest, task.a if av.status == "Unknown" else task.b)
    return MultVerdict("compact", "Unknown", "a side compression resisted classification", detail)


# ---------------------------------------------------------------------------
# weak compactness, boundary route


def _is_zero_block(T: OperatorExpr) -> bool:
    return isinstance(canonicalize(T), ZeroOp)


def _window_near(nest, lo_anchor: float, hi_anchor: float, width: int = 192):
    if math.isfinite(lo_anchor) and math.isfinite(hi_anchor):
        lo = int(lo_anchor)
        hi = min(int(hi_anchor), lo + width - 1)
        return lo, hi
    if math.isfinite(lo_anchor):
        lo = int(lo_anchor)
        return lo, lo + width - 1
    if math.isfinite(hi_anchor):
        hi = int(hi_anchor)
        return hi - width + 1, hi
    return default_window(nest, width // 2)


def _block_norm(nest, T: OperatorExpr, lo_anchor: float = NEG_INF, hi_anchor: float = POS_INF) -> NormInterval:
    """Norm interval of a (possibly one-sided) restricted expression."""
    C = canonicalize(T)
    if isinstance(C, ZeroOp):
        return NormInterval(0.0, 0.0)
    hi = norm_bound(C)
    cs, rs = col_support(C), row_support(C)
    lo_a = max(lo_anchor, min(cs.lo, rs.lo))
    hi_a = min(hi_anchor, max(cs.hi, rs.hi))
    wlo, whi = _window_near(nest, lo_a, hi_a)
    if nest.basis == "N":
        wlo = max(wlo, 1)
        whi = max(whi, wlo)
    lo = power_norm(render(C, wlo, whi))
    return NormInterval(lo, hi)


def _right_tail_obstruction(task: MultiplicationTask, s: NestCut) -> NormInterval:
    """inf over cuts P > s of ||a (P - s)||."""
    nest = task.nest
    succ = nest.succ(s)
    if succ.value > s.value:
        lo_c, hi_c = s.value, succ.value
        block = op_product(task.a, _interval_block(lo_c, hi_c))
        if _is_zero_block(block):
            return NormInterval(0.0, 0.0)
        return _block_norm(nest, block, lo_anchor=s.value + 1)
    # s is a limit from above (integer-basis bottom): the infimum over
    # P > s is the limiting norm of a on far-negative columns
    return limit_restricted_norm(task.a, "col", -1)


def _left_tail_obstruction(task: MultiplicationTask, s: NestCut) -> NormInterval:
    """inf over cuts P < s of ||(s - P) b||."""
    nest = task.nest
    pred = nest.pred(s)
    if pred.value < s.value:
        block = op_product(_interval_block(pred.value, s.value), task.b)
        if _is_zero_block(block):
            return NormInterval(0.0, 0.0)
        return _block_norm(nest, block, hi_anchor=s.value)
    # s is a limit from below (the top of an all-integer nest)
    return limit_restricted_norm(task.b, "row", +1)


def _interval_block(lo_cut_value: float, hi_cut_value: float) -> OperatorExpr:
    from .operators import interval_proj

    lo = None if lo_cut_value == NEG_INF else int(lo_cut_value)
    hi = None if hi_cut_value == POS_INF else int(hi_cut_value)
    return interval_proj(lo, hi)


def mult_weak_decision(task: MultiplicationTask) -> MultVerdict:
    """Weak compactness via the two compact-boundary projections.

    With U the join of compact-lower cuts of a and L the meet of
    compact-upper cuts of b: U above L is always weakly compact; U below
    L never is; at equality the verdict depends on the side compressions
    at the common cut and, when exactly one of them is noncompact, on
    whether the corresponding one-sided obstruction norm vanishes.
    """
    if task.is_zero_pair():
        return MultVerdict("weak", "WeaklyCompact", "a symbol is zero, the map is zero")
    try:
        u = join_of_compact_lower_corners(task.nest, task.a)
        l = meet_of_compact_upper_corners(task.nest, task.b)
    except UndecidableBoundary as exc:
        return MultVerdict("weak", "Unknown", f"compact boundary not certified: {exc}")
    detail = {"upper_join": cut_json(u), "lower_meet": cut_json(l)}
    if u.value > l.value:
        detail["case"] = "boundaries-separated"
        return MultVerdict(
            "weak", "WeaklyCompact", "the compact-lower join lies above the compact-upper meet", detail
        )
    if u.value < l.value:
        detail["case"] = "boundaries-inverted"
        return MultVerdict(
            "weak", "NotWeaklyCompact", "the compact-lower join lies below the compact-upper meet", detail
        )
    s = u
    av = classify_compact(compress_lower(task.a, s))
    bv = classify_compact(compress_upper(task.b, s))
    detail["common_cut"] = cut_json(s)
    detail["a_corner"] = _verdict_json(av)
    detail["b_corner"] = _verdict_json(bv)
    if av.status == "Unknown" or bv.status == "Unknown":
        return MultVerdict("weak", "Unknown", "a corner compression resisted classification", detail)
    if av.status == "Compact" and bv.status == "Compact":
        detail["case"] = "both-corners-compact"
        return MultVerdict("weak", "WeaklyCompact", "both corner compressions are compact", detail)
    if av.status == "NonCompact" and bv.status == "NonCompact":
        detail["case"] = "both-corners-noncompact"
        return MultVerdict("weak", "NotWeaklyCompact", "both corner compressions are noncompact", detail)
    if av.status == "Compact":
        obstruction = _right_tail_obstruction(task, s)
        detail["case"] = "right-tail"
        detail["obstruction"] = _interval_json(obstruction)
        if obstruction.hi == 0.0:
            return MultVerdict(
                "weak", "WeaklyCompact", "columns of a just above the common cut vanish", detail
            )
        if obstruction.lo > 0.0:
            return MultVerdict(
                "weak",
                "NotWeaklyCompact",
                "a keeps norm on every block just above the common cut",
                detail,
            )
        return MultVerdict("weak", "Unknown", "obstruction norm interval straddles zero", detail)
    obstruction = _left_tail_obstruction(task, s)
    detail["case"] = "left-tail"
    detail["obstruction"] = _interval_json(obstruction)
    if obstruction.hi == 0.0:
        return MultVerdict(
            "weak", "WeaklyCompact", "rows of b just below the common cut vanish", detail
        )
    if obstruction.lo > 0.0:
        return MultVerdict(
            "weak", "NotWeaklyCompact", "b keeps norm on every block just below the common cut", detail
        )
    return MultVerdict("weak", "Unknown", "obstruction norm interval straddles zero", detail)


# ---------------------------------------------------------------------------
# weak compactness, two-cut route


def _min_interval(a: NormInterval, b: NormInterval) -> NormInterval:
    return NormInterval(min(a.lo, b.lo), min(a.hi, b.hi))


def _pair_obstruction(task: MultiplicationTask, p1: NestCut, p2: NestCut) -> NormInterval:
    """min(||a (P2 - P1)||, ||(P2 - P1) b||) for one admissible pair."""
    nest = task.nest
    block = _interval_block(p1.value, p2.value)
    a_block = op_product(task.a, block)
    b_block = op_product(block, task.b)
    a_iv = (
        NormInterval(0.0, 0.0)
        if _is_zero_block(a_block)
        else _block_norm(nest, a_block, lo_anchor=p1.value, hi_anchor=p2.value)
    )
    b_iv = (
        NormInterval(0.0, 0.0)
        if _is_zero_block(b_block)
        else _block_norm(nest, b_block, lo_anchor=p1.value, hi_anchor=p2.value)
    )
    return _min_interval(a_iv, b_iv)


def _compact_cut_sets(task: MultiplicationTask):
    """Cuts whose lower compression of a / upper compression of b is compact.

    Explicit nests enumerate; all-integer nests return descriptors since
    the finite cuts behave identically by perturbation invariance.
    Returns (a_set, b_set) where each is a dict with keys:
    "cuts" (explicit list) or "finite_all" (bool) plus bottom/top flags.
    """
    nest = task.nest
    if nest.is_all:
        if nest.basis == "N":
            a_fin = True
        else:
            a_fin = classify_compact(compress_lower(task.a, NestCut(0.0))).status == "Compact"
        b_fin = classify_compact(compress_upper(task.b, NestCut(0.0))).status == "Compact"
        a_top = classify_compact(canonicalize(task.a)).status == "Compact"
        b_bot = classify_compact(canonicalize(task.b)).status == "Compact"
        return (
            {"finite_all": a_fin, "bottom": True, "top": a_top},
            {"finite_all": b_fin, "bottom": b_bot, "top": True},
        )
    a_cuts, b_cuts = [], []
    for v in nest.cut_values:
        c = NestCut(v)
        if classify_compact(compress_lower(task.a, c)).status == "Compact":
            a_cuts.append(c)
        if classify_compact(compress_upper(task.b, c)).status == "Compact":
            b_cuts.append(c)
    return {"cuts": a_cuts}, {"cuts": b_cuts}


def mult_weak_decision_2proj(task: MultiplicationTask) -> MultVerdict:
    """Weak compactness via admissible cut pairs.

    The map is weakly compact exactly when, for every tolerance, some
    pair of cuts P1 <= P2 exists with the lower compression of a at P1
    and the upper compression of b at P2 compact while the middle block
    strangles a or b below the tolerance.  The infimum of the middle
    obstruction over admissible pairs is computed per structural family;
    the verdict reads off whether it is zero.
    """
    if task.is_zero_pair():
        return MultVerdict("weak2", "WeaklyCompact", "a symbol is zero, the map is zero")
    nest = task.nest
    ca = classify_compact(task.a)
    cb = classify_compact(task.b)
    detail: dict = {"a_class": ca.status, "b_class": cb.status}
    if cb.status == "Compact":
        detail["pair"] = {"p1": "-inf", "p2": "-inf"}
        return MultVerdict(
            "weak2", "WeaklyCompact", "b is compact; the bottom pair has empty middle block", detail
        )
    if ca.status == "Compact":
        detail["pair"] = {"p1": "inf", "p2": "inf"}
        return MultVerdict(
            "weak2", "WeaklyCompact", "a is compact; the top pair has empty middle block", detail
        )
    try:
        a_set, b_set = _compact_cut_sets(task)
    except UndecidableBoundary as exc:
        return MultVerdict("weak2", "Unknown", f"cut classification failed: {exc}")
    families = []  # (label, NormInterval)
    if "cuts" in a_set:
        a_cuts = a_set["cuts"]
        b_cuts = b_set["cuts"]
        common = {c.value for c in a_cuts} & {c.value for c in b_cuts}
        if common:
            detail["pair"] = {"p1": cut_json(NestCut(max(common))), "p2": cut_json(NestCut(max(common)))}
            return MultVerdict(
                "weak2", "WeaklyCompact", "a common cut has both compressions compact", detail
            )
        for p1 in a_cuts:
            for p2 in b_cuts:
                if p1.value <= p2.value:
                    families.append(
                        (
                            {"p1": cut_json(p1), "p2": cut_json(p2)},
                            _pair_obstruction(task, p1, p2),
                        )
                    )
    else:
        if a_set["finite_all"] and b_set["finite_all"]:
            detail["pair"] = {"p1": 0, "p2": 0}
            return MultVerdict(
                "weak2", "WeaklyCompact", "every finite cut has both compressions compact", detail
            )
        # the always-admissible extreme pair
        families.append(
            ({"p1": "-inf", "p2": "inf"}, _pair_obstruction(task, nest.bottom, nest.top))
        )
        if a_set["finite_all"]:
            # P1 finite and large, P2 = top
            iv = _min_interval(
                limit_restricted_norm(task.a, "col", +1), limit_restricted_norm(task.b, "row", +1)
            )
            families.append(({"p1": "finite->inf", "p2": "inf"}, iv))
        if b_set["finite_all"]:
            iv = _min_interval(
                limit_restricted_norm(task.a, "col", -1), limit_restricted_norm(task.b, "row", -1)
            )
            families.append(({"p1": "-inf", "p2": "finite->-inf"}, iv))
    if not families:
        return MultVerdict("weak2", "Unknown", "no admissible cut pair was found", detail)
    best = families[0][1]
    best_label = families[0][0]
    for label, iv in families[1:]:
        if iv.hi < best.hi:
            best, best_label = iv, label
    overall = NormInterval(min(f[1].lo for f in families), best.hi)
    detail["obstruction"] = _interval_json(overall)
    detail["best_family"] = best_label
    detail["schedule"] = [
        {
            "eps": e,
            "outcome": "pass" if overall.hi < e else ("fail" if overall.lo >= e else "open"),
        }
        for e in EPS_SCHEDULE
    ]
    if overall.hi == 0.0:
        return MultVerdict("weak2", "WeaklyCompact", "an admissible pair kills the middle block", detail)
    if overall.lo > 0.0:
        return MultVerdict(
            "weak2",
            "NotWeaklyCompact",
            f"every admissible pair keeps obstruction norm >= {overall.lo:.6g}",
            detail,
        )
    return MultVerdict("weak2", "Unknown", "obstruction interval straddles zero", detail)


# ---------------------------------------------------------------------------
# derived verdicts


def range_in_compacts_sampler(task: MultiplicationTask, samples: int = 100, seed: int = 0) -> dict:
    """Classify a x b for sampled grammar inputs x.

    Mixes deterministic probes (the identity, basis rank-ones near the
    window center, geometric rank-ones) with seeded random finite
    matrices.  Purely a consistency check: a weakly compact
    multiplication maps everything into the compacts, so any certified
    noncompact image refutes a positive weak verdict.
    """
    import numpy as np

    rng = np.random.default_rng(seed)
    lo, hi = default_window(task.nest, 8)
    probes = [identity()]
    idx = list(range(lo, hi + 1))
    for i in idx[:4]:
        for j in idx[:4]:
            probes.append(rank_one(basis_vector(i), basis_vector(j)))
    probes.append(rank_one(_geom_vec(0.5, lo), _geom_vec(0.5, lo)))
    counts = {"Compact": 0, "NonCompact": 0, "Unknown": 0}
    records = []
    n = 0
    while n < samples:
        if n < len(probes):
            x = probes[n]
        else:
            size = int(rng.integers(1, 4))
            r0 = int(rng.integers(lo, hi - size + 1))
            c0 = int(rng.integers(lo, hi - size + 1))
            entries = rng.standard_normal((size, size)).tolist()
            x = finite_matrix(r0, c0, entries)
        image = canonicalize(op_product(op_product(task.a, x), task.b))
        v = classify_compact(image)
        counts[v.status] += 1
        if v.status == "NonCompact" and len(records) < 4:
            records.append({"x": operator_to_json(x), "image_class": _verdict_json(v)})
        n += 1
    family = None
    if counts["NonCompact"] == 0:
        family = _escaping_family_probe(task, rng)
    report = {
        "samples": samples,
        "counts": counts,
        "found_noncompact_image": counts["NonCompact"] > 0 or family is not None,
        "noncompact_examples": records,
    }
    if family is not None:
        report["escaping_family"] = family
    return report


def _escaping_family_probe(task: MultiplicationTask, rng) -> dict | None:
    """Look for a flat family of rank-one images escaping in both directions.

    Single sampled members are always finite expressions, so on a
    doubly infinite nest the map can send every one of them to a
    compact operator and still fail to be weakly compact: the witness
    is then a bounded family of corner rank-ones whose images keep a
    common norm floor while their supports separate.  A member's
    column at r is supported in rows <= r and its row at c in columns
    >= c, so certified tail norms in both escape directions pin the
    obstruction at every cut.  Only fires when both tails are
    certified positive; silence proves nothing.
    """
    if task.nest.basis != "Z" or not task.nest.is_all:
        return None
    la = limit_restricted_norm(task.a, "col", -1).lo
    lb = limit_restricted_norm(task.b, "row", +1).lo
    if la <= 1e-9 or lb <= 1e-9:
        return None
    floor = la * lb / 2.0
    W = 48
    hits = []
    for k in range(1, 25):
        r = -(4 * k + int(rng.integers(0, 4)))
        c = 4 * k + int(rng.integers(0, 4))
        alpha = math.sqrt(sum(entry(task.a, i, r) ** 2 for i in range(r - W, r + 1)))
        beta = math.sqrt(sum(entry(task.b, c, j) ** 2 for j in range(c, c + W + 1)))
        if alpha * beta >= floor:
            hits.append({"row": r, "col": c, "image_norm_lower": alpha * beta})
    if len(hits) < 8:
        return None
    return {
        "kind": "escaping-family",
        "tail_col_lower": la,
        "tail_row_lower": lb,
        "norm_floor": floor,
        "witnesses": hits[:8],
        "witness_count": len(hits),
    }


def _geom_vec(r: float, anchor: int):
    from .operators import RuledVector
    from .rules import rule_mask, rule_shift

    base = rule_shift(rule_geometric(r), anchor)
    return RuledVector(rule_mask(base, anchor, None))


def quasitriangular_decision(task: MultiplicationTask) -> MultVerdict:
    """Verdicts for the same pair acting on the quasitriangular extension.

    There the multiplication is compact exactly when both symbols are
    compact, and weakly compact exactly when at least one is.
    """
    ca = classify_compact(task.a)
    cb = classify_compact(task.b)
    detail = {"a_class": _verdict_json(ca), "b_class": _verdict_json(cb)}
    if ca.status == "Unknown" or cb.status == "Unknown":
        return MultVerdict("quasitriangular", "Unknown", "a symbol resisted classification", detail)
    compact = ca.status == "Compact" and cb.status == "Compact"
    weak = ca.status == "Compact" or cb.status == "Compact"
    detail["compact"] = compact
    detail["weakly_compact"] = weak
    status = "Compact" if compact else ("WeaklyCompactOnly" if weak else "Neither")
    return MultVerdict("quasitriangular", status, "decided from symbol compactness", detail)


def quotient_verdict(task: MultiplicationTask) -> MultVerdict:
    """Does the multiplication vanish on the quotient by the compacts?

    Equivalent to weak compactness; a negative verdict points at the
    bounded-sequence-space embedding machinery for an explicit witness.
    """
    weak = mult_weak_decision(task)
    detail = dict(weak.detail)
    if weak.status == "WeaklyCompact":
        return MultVerdict("quotient", "ZeroInQuotient", "the multiplication is weakly compact", detail)
    if weak.status == "NotWeaklyCompact":
        detail["embedding_witness"] = {
            "available": True,
            "how": "build an orthonormal-pair certificate and map bounded sequences through it",
        }
        return MultVerdict(
            "quotient",
            "NonzeroNotWeaklyCompact",
            "the induced quotient map embeds the bounded-sequence space",
            detail,
        )
    return MultVerdict("quotient", "Unknown", weak.reason, detail)
