"""Exact local-polytope bounds and no-signalling LP bounds.

The local set is the convex hull of the 64 deterministic strategies, so the
maximum of a linear functional over it is attained at a vertex and is
computed exactly in rational arithmetic.  The no-signalling set is cut out
by positivity, normalization and marginal-consistency equalities; its
maximum is a linear program solved by the shared interior-point engine with
all-diagonal blocks (an LP is just a degenerate SDP here, which keeps one
solver code path and one certification story).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SolverError
from .functionals import BellFunctional, probability_coefficients, strategy_value
from .scenario import (
    OUTCOMES,
    PAIRS,
    SETTINGS,
    Behavior,
    DeterministicStrategy,
    enumerate_deterministic,
    table_index,
)
from . import solver as sdp


@dataclass(frozen=True)
class BoundResult:
    """A computed bound with its achieving model.

    ``value`` is exact (Fraction) for the local set and float for NS;
    ``snapped`` carries the small-denominator rational when the NS value sits
    within 1e-7 of one (denominator <= 64), reported alongside the float.
    """

    value: Fraction | float
    optimizer: DeterministicStrategy | Behavior
    set_tag: str
    duality_gap: float = 0.0
    snapped: Fraction | None = None


def local_bound(f: BellFunctional) -> BoundResult:
    """Exact maximum of ``f`` over the 64 deterministic strategies.

    Ties are broken toward the lexicographically smallest strategy encoding;
    enumeration order makes that the first maximizer seen.
    """
    best: Fraction | None = None
    best_strategy: DeterministicStrategy | None = None
    for strat in enumerate_deterministic():
        v = strategy_value(f, strat)
        if best is None or v > best:
            best, best_strategy = v, strat
    assert best is not None and best_strategy is not None
    return BoundResult(value=best, optimizer=best_strategy, set_tag="L")


# -- no-signalling equalities -------------------------------------------------


def _candidate_equalities() -> tuple[list[list[Fraction]], list[Fraction], list[str]]:
    """Normalization plus the generating marginal-consistency equalities.

    Redundant on purpose; :func:`ns_equalities` reduces this to a
    non-redundant set (redundant equalities degrade interior-point
    conditioning).
    """
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    labels: list[str] = []

    def new_row() -> list[Fraction]:
        return [Fraction(0)] * 64

    for x, y, z in SETTINGS:
        row = new_row()
        for a, b, c in OUTCOMES:
            row[table_index(a, b, c, x, y, z)] += 1
        rows.append(row)
        rhs.append(Fraction(1))
        labels.append(f"norm|{x}{y}{z}")

    # two-party marginals independent of the traced party's setting
    for p0, p1 in PAIRS:
        other = ({0, 1, 2} - {p0, p1}).pop()
        for o0, o1 in itertools.product((0, 1), repeat=2):
            for s0, s1 in itertools.product((0, 1), repeat=2):
                row = new_row()
                for t, sign in ((0, 1), (1, -1)):
                    for oo in (0, 1):
                        abc = [0, 0, 0]
                        xyz = [0, 0, 0]
                        abc[p0], abc[p1], abc[other] = o0, o1, oo
                        xyz[p0], xyz[p1], xyz[other] = s0, s1, t
                        row[table_index(*abc, *xyz)] += sign
                rows.append(row)
                rhs.append(Fraction(0))
                labels.append(f"pair{p0}{p1}|{o0}{o1}|{s0}{s1}")

    # one-party marginals independent of both other settings
    for party in range(3):
        others = sorted({0, 1, 2} - {party})
        for outcome in (0, 1):
            for setting in (0, 1):
                for ts in ((0, 1), (1, 0), (1, 1)):
                    row = new_row()
                    for (t_pair, sign) in (((0, 0), 1), (ts, -1)):
                        for o1, o2 in itertools.product((0, 1), repeat=2):
                            abc = [0, 0, 0]
                            xyz = [0, 0, 0]
                            abc[party], abc[others[0]], abc[others[1]] = outcome, o1, o2
                            xyz[party] = setting
                            xyz[others[0]], xyz[others[1]] = t_pair
                            row[table_index(*abc, *xyz)] += sign
                    rows.append(row)
                    rhs.append(Fraction(0))
                    labels.append(f"single{party}|{outcome}|{setting}|{ts[0]}{ts[1]}")
    return rows, rhs, labels


def _independent_rows(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[int]:
    """Indices of a maximal independent subset, by exact Gaussian elimination."""
    kept: list[int] = []
    basis: list[tuple[list[Fraction], Fraction]] = []
    pivots: list[int] = []
    for idx, (row, r) in enumerate(zip(rows, rhs)):
        work = list(row)
        wr = r
        for (brow, br), piv in zip(basis, pivots):
            factor = work[piv]
            if factor:
                for j in range(64):
                    work[j] -= factor * brow[j]
                wr -= factor * br
        piv = next((j for j in range(64) if work[j]), None)
        if piv is None:
            continue
        inv = Fraction(1) / work[piv]
        work = [w * inv for w in work]
        wr *= inv
        basis.append((work, wr))
        pivots.append(piv)
        kept.append(idx)
    return kept


_NS_CACHE: tuple[np.ndarray, np.ndarray, tuple[str, ...]] | None = None


def ns_equalities() -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """The non-redundant equality system (A, b, labels) of the NS polytope.

    Built once and cached; rank is 38 (8 normalization + 30 marginal
    consistencies), leaving the polytope's 26 dimensions free.
    """
    global _NS_CACHE
    if _NS_CACHE is None:
        rows, rhs, labels = _candidate_equalities()
        kept = _independent_rows(rows, rhs)
        a = np.array([[float(v) for v in rows[i]] for i in kept])
        b = np.array([float(rhs[i]) for i in kept])
        _NS_CACHE = (a, b, tuple(labels[i] for i in kept))
    return _NS_CACHE


def _snap_rational(value: float, max_den: int = 64, tol: float = 1e-7) -> Fraction | None:
    cand = Fraction(value).limit_denominator(max_den)
    if abs(float(cand) - value) <= tol:
        return cand
    return None


def ns_bound(f: BellFunctional, cfg: sdp.SolverConfig | None = None) -> BoundResult:
    """Maximum of ``f`` over the no-signalling polytope, via LP.

    Variables are the 64 probabilities with positivity as 1x1 blocks;
    normalization and marginal consistency enter as equalities that the
    solver eliminates by null-space substitution.  Raises
    :class:`SolverError` if the LP fails to converge (it should not, on this
    bounded polytope).
    """
    const, coefs = probability_coefficients(f)
    c = np.array([float(v) for v in coefs])
    blocks = tuple(
        sdp.Block.from_entries(1, [], [(i, 0, 0, 1.0)]) for i in range(64)
    )
    a, b, _ = ns_equalities()
    problem = sdp.StandardForm(c=c, blocks=blocks, A=a, b=b)
    start = np.full(64, 0.125)
    sol = sdp.solve(problem, cfg or sdp.SolverConfig(), y0=start)
    if sol.status is not sdp.Status.OPTIMAL:
        raise SolverError(f"NS LP did not converge: {sol.status.value}", sol.status)
    value = sol.value + float(const)
    table = np.clip(sol.y, 0.0, 1.0)
    beh = Behavior.from_table([float(v) for v in table], strict=False)
    return BoundResult(
        value=value,
        optimizer=beh,
        set_tag="NS",
        duality_gap=sol.duality_gap,
        snapped=_snap_rational(value),
    )
