"""Scratch validation of anchors (not part of the package)."""
RUN = __name__ == "__main__"
import json
from fractions import Fraction

from tribell.functionals import parse_catalog, strategy_value
from tribell.polytope import local_bound, ns_bound

ENTRIES = [
    {
        "id": "sliwa-1",
        "basis": "probability",
        "bound": "1",
        "terms": [{"mon": "1", "coef": "1"}, {"mon": "P(000|000)", "coef": "-1"}],
    },
    {
        "id": "sliwa-2",
        "basis": "correlator",
        "bound": "2",
        "terms": [
            {"mon": "E(A0B0C1)", "coef": "1"},
            {"mon": "E(A0B1C0)", "coef": "1"},
            {"mon": "E(A1B0C0)", "coef": "1"},
            {"mon": "E(A1B1C1)", "coef": "-1"},
        ],
    },
    {
        "id": "sliwa-23",
        "basis": "correlator",
        "bound": "4",
        "terms": [
            {"mon": "E(A0)", "coef": "1"}, {"mon": "E(A1)", "coef": "1"},
            {"mon": "E(B0)", "coef": "1"}, {"mon": "E(A0B0)", "coef": "-1"},
            {"mon": "E(A1B0)", "coef": "-1"}, {"mon": "E(B1)", "coef": "1"},
            {"mon": "E(A0B1)", "coef": "-1"}, {"mon": "E(A1B1)", "coef": "-1"},
            {"mon": "E(A0C0)", "coef": "1"}, {"mon": "E(A1C0)", "coef": "-1"},
            {"mon": "E(A0B0C0)", "coef": "-1"}, {"mon": "E(A1B0C0)", "coef": "1"},
            {"mon": "E(A0B1C0)", "coef": "-1"}, {"mon": "E(A1B1C0)", "coef": "1"},
            {"mon": "E(B0C1)", "coef": "1"}, {"mon": "E(A0B0C1)", "coef": "-1"},
            {"mon": "E(A1B0C1)", "coef": "-1"}, {"mon": "E(B1C1)", "coef": "-1"},
            {"mon": "E(A0B1C1)", "coef": "1"}, {"mon": "E(A1B1C1)", "coef": "1"},
        ],
    },
    {
        "id": "sliwa-41",
        "basis": "correlator",
        "bound": "7",
        "terms": [
            {"mon": "E(A0)", "coef": "1"}, {"mon": "E(B0)", "coef": "1"},
            {"mon": "E(A0B0)", "coef": "1"}, {"mon": "E(C0)", "coef": "1"},
            {"mon": "E(A1C0)", "coef": "1"}, {"mon": "E(A0B0C0)", "coef": "-3"},
            {"mon": "E(A1B0C0)", "coef": "-1"}, {"mon": "E(B1C0)", "coef": "1"},
            {"mon": "E(A0B1C0)", "coef": "-1"}, {"mon": "E(A1B1C0)", "coef": "-2"},
            {"mon": "E(A0C1)", "coef": "1"}, {"mon": "E(A1C1)", "coef": "-1"},
            {"mon": "E(B0C1)", "coef": "1"}, {"mon": "E(A0B0C1)", "coef": "-4"},
            {"mon": "E(A1B0C1)", "coef": "1"}, {"mon": "E(B1C1)", "coef": "-1"},
            {"mon": "E(A0B1C1)", "coef": "1"}, {"mon": "E(A1B1C1)", "coef": "2"},
        ],
    },
    {
        "id": "aq-npa2-separator",
        "basis": "probability",
        "bound": "30/31",
        "terms": [
            {"mon": "P(A:0|0)", "coef": "30/31"}, {"mon": "P(A:0|1)", "coef": "-167/9"},
            {"mon": "P(B:0|0)", "coef": "30/31"}, {"mon": "P(B:0|1)", "coef": "-167/9"},
            {"mon": "P(C:0|0)", "coef": "30/31"}, {"mon": "P(C:0|1)", "coef": "-167/9"},
            {"mon": "P(AB:00|00)", "coef": "-74/11"},
            {"mon": "P(AC:00|00)", "coef": "-74/11"},
            {"mon": "P(BC:00|00)", "coef": "-74/11"},
            {"mon": "P(AB:00|01)", "coef": "174/11"},
            {"mon": "P(AB:00|10)", "coef": "174/11"},
            {"mon": "P(AB:00|11)", "coef": "244/23"},
        ],
    },
    {
        "id": "sliwa-7-witness",
        "basis": "correlator",
        "bound": "4",
        "terms": [
            {"mon": "E(A0B0C0)", "coef": "1"}, {"mon": "E(A0B0C1)", "coef": "1"},
            {"mon": "E(A0B1C0)", "coef": "1"}, {"mon": "E(A0B1C1)", "coef": "1"},
            {"mon": "E(A1B0C0)", "coef": "1"}, {"mon": "E(A1B0C1)", "coef": "1"},
            {"mon": "E(A1B1C0)", "coef": "1"}, {"mon": "E(A1B1C1)", "coef": "-3"},
        ],
    },
    {
        "id": "gyni-candidate",
        "basis": "probability",
        "bound": "4",
        "terms": [
            {"mon": "P(000|000)", "coef": "4"},
            {"mon": "P(110|011)", "coef": "4"},
            {"mon": "P(011|101)", "coef": "4"},
            {"mon": "P(101|110)", "coef": "4"},
        ],
    },
]

if __name__ == "__main__":
    cat = parse_catalog(json.dumps(ENTRIES))
    for f in cat:
        lb = local_bound(f)
        nb = ns_bound(f)
        ok = "OK " if (f.local_bound is None or lb.value == f.local_bound) else "MISMATCH"
        print(f"{f.id:22s} L = {lb.value!s:8s} [{ok}]  NS = {nb.value:.8f}"
              f"  snap = {nb.snapped}  gap = {nb.duality_gap:.1e}")
