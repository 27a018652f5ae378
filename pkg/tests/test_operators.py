"""Operator expressions: constructors, canonical forms, rendering, entries."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nestalg.errors import SchemaError, UnboundedRule
from nestalg.operators import (
    ZERO,
    apply_to_vector,
    band,
    basis_vector,
    canonicalize,
    col_support,
    diag,
    entry,
    finite_matrix,
    identity,
    interval_proj,
    norm_bound,
    op_adjoint,
    op_product,
    op_scale,
    op_sum,
    operator_to_json,
    parse_operator,
    rank_one,
    render,
    render_with_leakage,
    row_support,
    wshift,
)
from nestalg.rules import (
    rule_const,
    rule_finite,
    rule_geometric,
    rule_harmonic,
    rule_indicator,
)


def dense(T, lo, hi):
    return render(T, lo, hi)


def test_diag_entries_match_rule():
    d = diag(rule_harmonic())
    assert entry(d, 2, 2) == 0.5
    assert entry(d, 2, 3) == 0.0
    M = dense(d, -3, 4)
    assert M.shape == (8, 8)
    # row index 5 in the window is absolute index 2
    assert M[5, 5] == 0.5
    assert M[3, 3] == 0.0  # harmonic has a hole at 0


def test_identity_and_interval_proj():
    assert entry(identity(), 7, 7) == 1.0
    assert entry(identity(), 7, 8) == 0.0
    # cut semantics: lo < i <= hi
    p = interval_proj(2, 5)
    assert entry(p, 2, 2) == 0.0
    assert entry(p, 3, 3) == 1.0
    assert entry(p, 5, 5) == 1.0
    assert entry(p, 6, 6) == 0.0


def test_interval_proj_unbounded_sides():
    left = interval_proj(None, 0)
    assert entry(left, 0, 0) == 1.0
    assert entry(left, 1, 1) == 0.0
    assert entry(left, -100, -100) == 1.0
    right = interval_proj(0, None)
    assert entry(right, 1, 1) == 1.0
    assert entry(right, 0, 0) == 0.0


def test_wshift_direction_and_entries():
    w = wshift(rule_geometric(0.5), "lower")
    # lower shift moves mass to the previous index: nonzero at (j-1, j)
    assert entry(w, 1, 2) == 0.25
    assert entry(w, 2, 1) == 0.0
    r = wshift(rule_geometric(0.5), "raise")
    assert entry(r, 2, 1) == pytest.approx(0.5)
    with pytest.raises(SchemaError):
        wshift(rule_geometric(0.5), "sideways")


def test_rank_one_orientation():
    # rank_one(e, f): entry (i, j) = e(j) * f(i)
    x = rank_one(basis_vector(2), basis_vector(5))
    assert entry(x, 5, 2) == 1.0
    assert entry(x, 2, 5) == 0.0
    assert col_support(x) == row_support(x).__class__(lo=2.0, hi=2.0, exact=True)
    assert row_support(x).lo == 5.0


def test_rank_one_requires_square_summable():
    from nestalg.operators import make_vector

    with pytest.raises(UnboundedRule):
        rank_one(make_vector(rule_const(1.0)), basis_vector(0))


def test_finite_matrix_trimming():
    m = finite_matrix(1, 2, [[0.0, 1.0], [0.0, 0.0]])
    # zero rows and columns trimmed away, origin shifts
    assert m.row_lo == 1 and m.col_lo == 3
    assert m.rows == ((1.0,),)
    assert finite_matrix(0, 0, [[0.0]]) is ZERO


def test_finite_matrix_ragged_rejected():
    with pytest.raises(SchemaError):
        finite_matrix(0, 0, [[1.0, 2.0], [3.0]])


def test_zero_absorption():
    d = diag(rule_harmonic())
    assert canonicalize(op_sum(d, ZERO)) == canonicalize(d)
    assert canonicalize(op_product(d, ZERO)) is ZERO
    assert canonicalize(op_scale(0.0, d)) is ZERO
    assert diag(rule_const(0.0)) is ZERO


def test_scale_folding():
    s = canonicalize(op_scale(2.0, op_scale(3.0, identity())))
    assert entry(s, 4, 4) == 6.0


def test_adjoint_eliminated_in_canonical_form():
    # canonicalize pushes adjoints down to leaves; no Adjoint node survives
    w = wshift(rule_geometric(0.5), "lower")
    aw = canonicalize(op_adjoint(w))
    assert type(aw).__name__ == "Band"
    assert aw.offset == 1
    # adjoint swaps the rank-one symbols
    x = rank_one(basis_vector(2), basis_vector(5))
    ax = canonicalize(op_adjoint(x))
    assert entry(ax, 2, 5) == 1.0
    assert entry(ax, 5, 2) == 0.0


def test_adjoint_is_matrix_transpose():
    pieces = op_sum(
        diag(rule_harmonic()),
        wshift(rule_geometric(0.5), "lower"),
        finite_matrix(0, 1, [[1.0, -2.0], [0.5, 0.0]]),
    )
    a = canonicalize(op_adjoint(pieces))
    M = dense(pieces, -4, 6)
    A = dense(a, -4, 6)
    assert np.allclose(A, M.T)


def test_band_product_composes_offsets():
    w = wshift(rule_geometric(0.5), "lower")
    p = canonicalize(op_product(w, w))
    assert type(p).__name__ == "Band"
    assert p.offset == -2
    M = dense(w, 0, 8)
    assert np.allclose(dense(p, 0, 8), M @ M)


def test_product_render_matches_matrix_product():
    a = op_sum(diag(rule_harmonic()), wshift(rule_geometric(0.5), "raise"))
    b = op_sum(identity(), finite_matrix(2, 3, [[1.0, 4.0]]))
    p = op_product(a, b)
    # band/finite structure keeps leakage out of a comfortably padded window
    lo, hi = -16, 16
    Mp = dense(p, lo, hi)
    Ma = dense(a, lo, hi)
    Mb = dense(b, lo, hi)
    inner = slice(8, 25)
    assert np.allclose(Mp[inner, inner], (Ma @ Mb)[inner, inner])


def test_render_leakage_flag():
    w = wshift(rule_geometric(0.5), "lower")
    _, leak = render_with_leakage(w, 0, 5)
    assert isinstance(leak, float)
    assert leak >= 0.0


def test_norm_bound_upper_bounds_window_norm():
    cases = [
        diag(rule_harmonic()),
        wshift(rule_geometric(0.5), "lower"),
        op_sum(identity(), diag(rule_geometric(0.25))),
        rank_one(basis_vector(1), basis_vector(4)),
        op_scale(-3.0, identity()),
    ]
    for T in cases:
        nb = norm_bound(T)
        M = dense(T, -12, 12)
        win = float(np.linalg.norm(M, 2))
        assert win <= nb + 1e-9


def test_apply_to_vector_matches_dense_matvec():
    T = op_sum(
        diag(rule_harmonic()),
        wshift(rule_geometric(0.5), "lower"),
        op_scale(2.0, finite_matrix(1, 1, [[1.0, 0.0], [3.0, -1.0]])),
    )
    h = rule_finite({1: 1.0, 2: -0.5, 3: 2.0})
    out = apply_to_vector(T, h)
    lo, hi = -6, 10
    M = dense(T, lo, hi)
    hv = np.array([h.value(i) for i in range(lo, hi + 1)])
    want = M @ hv
    got = np.array([out.value(i) for i in range(lo, hi + 1)])
    assert np.allclose(got, want)


def test_json_round_trip_all_ops():
    docs = [
        {"op": "zero"},
        {"op": "identity"},
        {"op": "diag", "rule": {"kind": "harmonic"}},
        {"op": "wshift", "direction": "lower", "rule": {"kind": "geometric", "r": 0.5}},
        {
            "op": "rank_one",
            "e": {"kind": "finite", "table": {"2": 1.0}},
            "f": {"kind": "finite", "table": {"5": 1.0}},
        },
        {"op": "interval_proj", "lo": 0, "hi": 4},
        {"op": "interval_proj", "lo": None, "hi": 0},
        {"op": "scale", "scalar": 0.5, "x": {"op": "identity"}},
        {
            "op": "sum",
            "terms": [
                {"op": "identity"},
                {"op": "diag", "rule": {"kind": "const", "c": -1.0}},
            ],
        },
        {
            "op": "product",
            "factors": [
                {"op": "diag", "rule": {"kind": "harmonic"}},
                {"op": "identity"},
            ],
        },
        {"op": "adjoint", "x": {"op": "wshift", "direction": "lower", "rule": {"kind": "const", "c": 1.0}}},
        {"op": "finite_matrix", "row_lo": 0, "col_lo": 1, "entries": [[1.0, 2.0]]},
    ]
    for doc in docs:
        T = parse_operator(doc)
        again = parse_operator(operator_to_json(T))
        M1 = dense(T, -8, 8)
        M2 = dense(again, -8, 8)
        assert np.array_equal(M1, M2), doc["op"]


def test_parse_rejects_unknown_op():
    with pytest.raises(SchemaError):
        parse_operator({"op": "mystery"})
    with pytest.raises(SchemaError):
        parse_operator({"kind": "diag"})


def test_band_constructor_general_offset():
    # offset is row minus column: nonzero cells sit at (j + offset, j)
    b = band(rule_const(1.0), 3)
    assert entry(b, 3, 0) == 1.0
    assert entry(b, 0, 3) == 0.0


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=-6, max_value=6),
    st.integers(min_value=-6, max_value=6),
    st.floats(min_value=-4.0, max_value=4.0, allow_nan=False),
)
def test_entry_agrees_with_render_cell(i, j, c):
    T = op_sum(
        diag(rule_const(c)),
        wshift(rule_geometric(0.5), "raise"),
        rank_one(basis_vector(1), basis_vector(-2)),
    )
    M = dense(T, -8, 8)
    assert M[i + 8, j + 8] == pytest.approx(entry(T, i, j))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=4, unique=True))
def test_projection_sum_is_idempotent_on_disjoint_cells(cells):
    terms = [interval_proj(i - 1, i) for i in cells]
    p = op_sum(*terms)
    lo, hi = -8, 8
    M = dense(p, lo, hi)
    assert np.allclose(M @ M, M)
