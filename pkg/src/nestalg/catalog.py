"""Named specimens with known classifications.

Two lists: single operators with their expected compactness class, and
multiplication tasks with expected verdicts for the zero, compactness,
and weak-compactness questions.  Tests and the demo scripts draw from
here so expected values live in one place.  All documents use the
external JSON schema, so every specimen doubles as a parser fixture.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class OperatorSpecimen:
    name: str
    nest: dict
    op: dict
    expected: str  # "Compact" | "NonCompact"
    note: str = ""


@dataclass(frozen=True)
class TaskSpecimen:
    name: str
    nest: dict
    a: dict
    b: dict
    expected: dict = field(default_factory=dict)  # question -> status
    note: str = ""


N_ALL = {"basis": "N", "cuts": "all"}
Z_ALL = {"basis": "Z", "cuts": "all"}
N_TRIVIAL = {"basis": "N", "cuts": []}

_H = {"kind": "harmonic"}
_GEO = {"kind": "geometric", "r": 0.5}

DIAG_HARMONIC = {"op": "diag", "rule": _H}
DIAG_GEOMETRIC = {"op": "diag", "rule": _GEO}
IDENTITY = {"op": "identity"}

# plateau one on i <= 0, harmonic decay on i > 0; the rule algebra is
# reached through an operator-level product with an interval projection
SPLIT_PLATEAU = {
    "op": "sum",
    "terms": [
        {"op": "diag", "rule": {"kind": "indicator", "lo": None, "hi": 0}},
        {"op": "product",
         "left": {"op": "diag", "rule": _H},
         "right": {"op": "interval_proj", "lo": 0, "hi": None}},
    ],
}


OPERATOR_SPECIMENS = (
    OperatorSpecimen(
        "harmonic-diagonal", N_ALL, DIAG_HARMONIC, "Compact",
        "diagonal entries 1/i vanish",
    ),
    OperatorSpecimen(
        "geometric-diagonal", N_ALL, DIAG_GEOMETRIC, "Compact",
        "diagonal entries 2^-i vanish",
    ),
    OperatorSpecimen(
        "harmonic-lower-shift", N_ALL,
        {"op": "wshift", "rule": _H, "direction": "lower"}, "Compact",
        "weighted shift with vanishing weights",
    ),
    OperatorSpecimen(
        "geometric-rank-one", N_ALL,
        {"op": "rank_one", "e": _GEO, "f": _GEO}, "Compact",
        "rank one is always compact",
    ),
    OperatorSpecimen(
        "finite-block", N_ALL,
        {"op": "finite_matrix", "row_lo": 1, "col_lo": 1,
         "entries": [[1.0, 0.5], [0.0, 0.25]]}, "Compact",
        "finite rank",
    ),
    OperatorSpecimen("identity", N_ALL, IDENTITY, "NonCompact", "unit plateau"),
    OperatorSpecimen(
        "shifted-plateau-diagonal", N_ALL,
        {"op": "diag",
         "rule": {"kind": "scaled", "factor": 0.75,
                  "base": {"kind": "indicator", "lo": 10, "hi": None}}},
        "NonCompact",
        "plateau at three quarters from index ten on",
    ),
    OperatorSpecimen(
        "unit-lower-shift", N_ALL,
        {"op": "wshift", "rule": {"kind": "const", "c": 1.0},
         "direction": "lower"}, "NonCompact",
        "isometric shift",
    ),
    OperatorSpecimen(
        "split-plateau-diagonal", Z_ALL, SPLIT_PLATEAU, "NonCompact",
        "unit plateau on the negative side, vanishing on the positive",
    ),
    OperatorSpecimen(
        "half-identity", N_ALL,
        {"op": "scale", "scalar": 0.5, "x": IDENTITY}, "NonCompact",
        "constant diagonal at height one half",
    ),
)


TASK_SPECIMENS = (
    TaskSpecimen(
        "flagship-harmonic", N_ALL, IDENTITY, DIAG_HARMONIC,
        {"zero": "NonZero", "compact": "Compact", "weak": "WeaklyCompact",
         "weak2": "WeaklyCompact", "quasitriangular": "WeaklyCompactOnly",
         "quotient": "ZeroInQuotient"},
        "identity against a vanishing diagonal",
    ),
    TaskSpecimen(
        "two-sided-identity", N_ALL, IDENTITY, IDENTITY,
        {"zero": "NonZero", "compact": "NonCompact", "weak": "NotWeaklyCompact",
         "weak2": "NotWeaklyCompact", "quasitriangular": "Neither",
         "quotient": "NonzeroNotWeaklyCompact"},
        "nothing vanishes anywhere",
    ),
    TaskSpecimen(
        "right-geometric", N_ALL, IDENTITY, DIAG_GEOMETRIC,
        {"zero": "NonZero", "compact": "Compact", "weak": "WeaklyCompact"},
        "compact right factor carries the whole map",
    ),
    TaskSpecimen(
        "right-half-identity", N_ALL, IDENTITY,
        {"op": "scale", "scalar": 0.5, "x": IDENTITY},
        {"zero": "NonZero", "compact": "NonCompact", "weak": "NotWeaklyCompact"},
        "scaled plateau right factor",
    ),
    TaskSpecimen(
        "trivial-compact-left", N_TRIVIAL, DIAG_HARMONIC, IDENTITY,
        {"zero": "NonZero", "compact": "NonCompact", "weak": "WeaklyCompact",
         "quasitriangular": "WeaklyCompactOnly"},
        "one compact factor gives weak compactness only; norm compactness"
        " would need both",
    ),
    TaskSpecimen(
        "trivial-both-plateau", N_TRIVIAL, IDENTITY, IDENTITY,
        {"zero": "NonZero", "compact": "NonCompact", "weak": "NotWeaklyCompact"},
        "neither factor compact on the trivial nest",
    ),
    TaskSpecimen(
        "split-projections", Z_ALL,
        {"op": "interval_proj", "lo": None, "hi": 0},
        {"op": "interval_proj", "lo": 0, "hi": None},
        {"zero": "NonZero", "compact": "NonCompact", "weak": "NotWeaklyCompact",
         "weak2": "NotWeaklyCompact"},
        "mass below against mass above, boundaries inverted",
    ),
    TaskSpecimen(
        "annihilated-rank-ones", N_ALL,
        {"op": "rank_one", "e": {"kind": "finite", "table": {"5": 1.0}},
         "f": {"kind": "finite", "table": {"3": 1.0}}},
        {"op": "rank_one", "e": {"kind": "finite", "table": {"2": 1.0}},
         "f": {"kind": "finite", "table": {"1": 1.0}}},
        {"zero": "Zero", "compact": "Compact", "weak": "WeaklyCompact"},
        "the range cover of the right factor sits under the annihilator",
    ),
    TaskSpecimen(
        "rank-one-passthrough", N_ALL,
        {"op": "rank_one", "e": {"kind": "finite", "table": {"5": 1.0}},
         "f": {"kind": "finite", "table": {"3": 1.0}}},
        {"op": "rank_one", "e": {"kind": "finite", "table": {"7": 1.0}},
         "f": {"kind": "finite", "table": {"6": 1.0}}},
        {"zero": "NonZero", "compact": "Compact", "weak": "WeaklyCompact"},
        "chained rank ones survive",
    ),
    TaskSpecimen(
        "shared-corner-projections", {"basis": "N", "cuts": [4]},
        {"op": "diag", "rule": {"kind": "indicator", "lo": 5, "hi": None}},
        {"op": "diag", "rule": {"kind": "indicator", "lo": 5, "hi": None}},
        {"zero": "NonZero", "compact": "NonCompact", "weak": "NotWeaklyCompact"},
        "both factors live on the same infinite corner",
    ),
)


def operator_names():
    return [s.name for s in OPERATOR_SPECIMENS]


def task_names():
    return [s.name for s in TASK_SPECIMENS]


def find_operator(name: str) -> OperatorSpecimen:
    for s in OPERATOR_SPECIMENS:
        if s.name == name:
            return s
    raise KeyError(name)


def find_task(name: str) -> TaskSpecimen:
    for s in TASK_SPECIMENS:
        if s.name == name:
            return s
    raise KeyError(name)
