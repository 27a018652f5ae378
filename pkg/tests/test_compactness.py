"""Compactness classification of single operators and corner compressions."""

import numpy as np
import pytest

from nestalg.algebra import MultiplicationTask
from nestalg.compactness import (
    boundary_rq,
    boundary_ul,
    classify_compact,
    cocut_proj,
    compress_lower,
    compress_upper,
    cut_proj,
    ess_norm_proxy,
    exact_col_lo,
    exact_row_hi,
    limit_restricted_norm,
)
from nestalg.nests import NestCut, make_nest
from nestalg.operators import (
    basis_vector,
    diag,
    entry,
    finite_matrix,
    identity,
    op_scale,
    op_sum,
    rank_one,
    render,
    wshift,
)
from nestalg.rules import (
    rule_const,
    rule_geometric,
    rule_harmonic,
    rule_indicator,
    rule_scale,
)


COMPACT_SPECIMENS = [
    diag(rule_harmonic()),
    diag(rule_geometric(0.5)),
    wshift(rule_geometric(0.5), "lower"),
    rank_one(basis_vector(2), basis_vector(5)),
    finite_matrix(0, 0, [[1.0, 2.0], [3.0, 4.0]]),
]

NONCOMPACT_SPECIMENS = [
    identity(),
    diag(rule_scale(rule_indicator(10, None), 0.75)),
    wshift(rule_const(1.0), "lower"),
    op_scale(0.5, identity()),
]


@pytest.mark.parametrize("T", COMPACT_SPECIMENS, ids=lambda T: type(T).__name__)
def test_compact_specimens(T):
    assert classify_compact(T).status == "Compact"


@pytest.mark.parametrize("T", NONCOMPACT_SPECIMENS, ids=str)
def test_noncompact_specimens(T):
    v = classify_compact(T)
    assert v.status == "NonCompact"
    assert v.certificate is not None


def test_plateau_certificate_survives_svd_check():
    # a certified plateau means singular values cannot decay: check the
    # claimed threshold against dense truncations of growing size
    plateau = diag(rule_scale(rule_indicator(10, None), 0.75))
    v = classify_compact(plateau)
    cert = v.certificate
    assert cert.threshold == pytest.approx(0.375)
    for hw in (64, 128, 256):
        M = render(plateau, -hw, hw)
        sv = np.linalg.svd(M, compute_uv=False)
        # effective lower bound from the certificate: threshold minus interference
        eff = cert.threshold - cert.interference
        assert sv[9] >= eff - 1e-9


def test_compact_sum_of_compacts():
    s = op_sum(diag(rule_harmonic()), rank_one(basis_vector(1), basis_vector(3)))
    assert classify_compact(s).status == "Compact"


def test_noncompact_plus_compact_stays_noncompact():
    s = op_sum(identity(), diag(rule_harmonic()))
    assert classify_compact(s).status == "NonCompact"


def test_limit_restricted_norm_identity():
    ni = limit_restricted_norm(identity(), "col", +1)
    assert ni.lo == pytest.approx(1.0, abs=1e-8)
    assert ni.hi == pytest.approx(1.0, abs=1e-8)


def test_limit_restricted_norm_vanishing():
    ni = limit_restricted_norm(diag(rule_harmonic()), "col", +1)
    assert ni.hi <= 1e-9


def test_exact_boundaries():
    x = rank_one(basis_vector(2), basis_vector(5))
    assert exact_col_lo(x) == 2.0
    assert exact_row_hi(x) == 5.0
    assert exact_col_lo(identity()) == -np.inf
    assert exact_row_hi(identity()) == np.inf


def test_boundary_rq_flagship():
    n = make_nest({"basis": "N", "cuts": "all"})
    task = MultiplicationTask.build(n, identity(), diag(rule_harmonic()))
    r, q = boundary_rq(task)
    assert r.value == 0.0
    assert q.value == np.inf
    u, l = boundary_ul(task)
    assert u.value == np.inf
    assert l.value == 0.0


def test_boundary_detects_annihilation():
    n = make_nest({"basis": "N", "cuts": "all"})
    a = rank_one(basis_vector(5), basis_vector(3))
    b = rank_one(basis_vector(2), basis_vector(1))
    task = MultiplicationTask.build(n, a, b)
    r, q = boundary_rq(task)
    # a kills everything supported at or below column 4; b's range tops out at row 1
    assert q.value <= r.value


def test_compressions_are_corners():
    d = diag(rule_harmonic())
    lowpart = compress_lower(d, NestCut(4.0))
    for i in (3, 4):
        assert entry(lowpart, i, i) == entry(d, i, i)
    for i in (5, 9):
        assert entry(lowpart, i, i) == 0.0
    up = compress_upper(d, NestCut(4.0))
    for i in (5, 9):
        assert entry(up, i, i) == entry(d, i, i)
    assert entry(up, 4, 4) == 0.0


def test_cut_projections_complementary():
    p = cut_proj(NestCut(3.0))
    q = cocut_proj(NestCut(3.0))
    for i in range(-4, 9):
        assert entry(p, i, i) + entry(q, i, i) == 1.0


def test_proxy_decays_for_compact():
    n = make_nest({"basis": "N", "cuts": "all"})
    px = ess_norm_proxy(n, diag(rule_harmonic()), windows=(64, 128), k=5)
    assert px["sigma_k"][1] < px["sigma_k"][0]
    assert px["level"] < 0.13


def test_proxy_plateaus_for_identity():
    n = make_nest({"basis": "N", "cuts": "all"})
    px = ess_norm_proxy(n, identity(), windows=(64, 128), k=5)
    assert min(px["sigma_k"]) >= 0.999
