"""Domain types for the (3,2,2) Bell scenario.

Three parties A, B, C each choose a setting in {0,1} and obtain an outcome
in {0,1}.  A behavior is the table of 64 conditional probabilities
p(abc|xyz).  Outcome labels map to eigenvalues via a -> (-1)^a, so the
correlators are

    E(x)   = p_A(0|x) - p_A(1|x)
    E(xy)  = sum_{ab} (-1)^(a+b) p_AB(ab|xy)
    E(xyz) = sum_{abc} (-1)^(a+b+c) p(abc|xyz)

All types here are immutable after construction and all operations are pure,
so everything is safe to share across threads.  Arithmetic stays exact
(int / Fraction) whenever the inputs are exact and falls back to float
otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import NormalizationError, RangeError, SignallingError

PARTIES = ("A", "B", "C")

#: Tolerance for normalization / marginal-consistency checks on float tables.
CHECK_TOL = 1e-9
#: Tolerance below which constructed exact behaviors must be clean.
EXACT_TOL = 1e-12

Number = int | float | Fraction


def table_index(a: int, b: int, c: int, x: int, y: int, z: int) -> int:
    """Flat index of p(abc|xyz): outcomes major, settings minor, binary order."""
    return ((a << 2 | b << 1 | c) << 3) | (x << 2 | y << 1 | z)


def _is_exact(v: Number) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


OUTCOMES = tuple(itertools.product((0, 1), repeat=3))
SETTINGS = tuple(itertools.product((0, 1), repeat=3))


@dataclass(frozen=True)
class Behavior:
    """A conditional-probability table p(abc|xyz) for the (3,2,2) scenario.

    ``probs`` is a flat tuple of 64 numbers ordered by :func:`table_index`.
    Use :meth:`from_table` to construct with validation.
    """

    probs: tuple[Number, ...]

    @staticmethod
    def from_table(values: Sequence[Number], *, strict: bool = True) -> "Behavior":
        """Build a behavior from 64 probabilities.

        With ``strict`` (default) raises :class:`RangeError` or
        :class:`NormalizationError` on the first violated invariant.  With
        ``strict=False`` the behavior is returned regardless; call
        :meth:`violations` to list the problems.
        """
        vals = tuple(values)
        if len(vals) != 64:
            raise ValueError(f"expected 64 probabilities, got {len(vals)}")
        for v in vals:
            if not np.isfinite(float(v)):
                raise ValueError("probabilities must be finite")
        beh = Behavior(vals)
        if strict:
            problems = beh.violations()
            for p in problems:
                if p.startswith("range"):
                    raise RangeError(p)
            for p in problems:
                if p.startswith("normalization"):
                    raise NormalizationError(p)
        return beh

    def violations(self) -> list[str]:
        """List invariant violations (empty when the table is a valid behavior)."""
        out: list[str] = []
        for idx, v in enumerate(self.probs):
            f = float(v)
            if f < -EXACT_TOL or f > 1.0 + EXACT_TOL:
                out.append(f"range: entry {idx} = {f!r} outside [0,1]")
        for x, y, z in SETTINGS:
            s = sum(self.probs[table_index(a, b, c, x, y, z)] for a, b, c in OUTCOMES)
            if abs(float(s) - 1.0) > CHECK_TOL:
                out.append(f"normalization: slice xyz={x}{y}{z} sums to {float(s)!r}")
        return out

    # -- accessors ------------------------------------------------------------

    def prob(self, a: int, b: int, c: int, x: int, y: int, z: int) -> Number:
        return self.probs[table_index(a, b, c, x, y, z)]

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(v) for v in self.probs)

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.probs], dtype=float)

    # -- marginals -------------------------------------------------------------
    #
    # Marginals take explicit settings for the traced-out parties; consistency
    # across those choices is what check_no_signalling verifies.

    def marginal_pair(self, parties: tuple[int, int], outcomes: tuple[int, int],
                      settings: tuple[int, int], traced_setting: int = 0) -> Number:
        """Two-party marginal, tracing the remaining party at ``traced_setting``."""
        p0, p1 = parties
        other = ({0, 1, 2} - {p0, p1}).pop()
        total: Number = 0
        for o in (0, 1):
            abc = [0, 0, 0]
            xyz = [0, 0, 0]
            abc[p0], abc[p1], abc[other] = outcomes[0], outcomes[1], o
            xyz[p0], xyz[p1], xyz[other] = settings[0], settings[1], traced_setting
            total = total + self.probs[table_index(*abc, *xyz)]
        return total

    def marginal_single(self, party: int, outcome: int, setting: int,
                        traced_settings: tuple[int, int] = (0, 0)) -> Number:
        others = sorted({0, 1, 2} - {party})
        total: Number = 0
        for o1, o2 in itertools.product((0, 1), repeat=2):
            abc = [0, 0, 0]
            xyz = [0, 0, 0]
            abc[party], abc[others[0]], abc[others[1]] = outcome, o1, o2
            xyz[party] = setting
            xyz[others[0]], xyz[others[1]] = traced_settings
            total = total + self.probs[table_index(*abc, *xyz)]
        return total


# -- deterministic strategies --------------------------------------------------


@dataclass(frozen=True)
class DeterministicStrategy:
    """Deterministic local assignments: per party, an outcome for each setting.

    These are the 64 extreme points of the local polytope; shared randomness
    is represented implicitly by convexity.
    """

    a: tuple[int, int]
    b: tuple[int, int]
    c: tuple[int, int]

    def __post_init__(self):
        for pair in (self.a, self.b, self.c):
            if any(o not in (0, 1) for o in pair):
                raise ValueError("outcomes must be 0 or 1")

    def encoding(self) -> int:
        """Lexicographic strategy code, bits (a0 a1 b0 b1 c0 c1)."""
        bits = (*self.a, *self.b, *self.c)
        code = 0
        for bit in bits:
            code = code << 1 | bit
        return code

    def to_behavior(self) -> Behavior:
        vals = [0] * 64
        for x, y, z in SETTINGS:
            vals[table_index(self.a[x], self.b[y], self.c[z], x, y, z)] = 1
        return Behavior(tuple(vals))


def enumerate_deterministic() -> list[DeterministicStrategy]:
    """All 64 deterministic strategies, ordered by :meth:`encoding`."""
    out = []
    for bits in itertools.product((0, 1), repeat=6):
        out.append(DeterministicStrategy(a=bits[0:2], b=bits[2:4], c=bits[4:6]))
    return out


def uniform_behavior() -> Behavior:
    """The maximally mixed behavior p = 1/8 everywhere (exact)."""
    return Behavior(tuple(Fraction(1, 8) for _ in range(64)))


# -- no-signalling check --------------------------------------------------------


@dataclass(frozen=True)
class NoSignallingReport:
    """Outcome of a marginal-consistency check."""

    violated: tuple[str, ...]
    max_residual: float

    @property
    def ok(self) -> bool:
        return not self.violated


def check_no_signalling(beh: Behavior, tol: float = CHECK_TOL) -> NoSignallingReport:
    """Check every marginal-consistency equality.

    Two-party marginals must not depend on the traced-out party's setting,
    and one-party marginals must not depend on either other setting.  Returns
    a report listing each violated equality with the worst residual seen.
    """
    violated: list[str] = []
    worst = 0.0
    pair_labels = {(0, 1): "AB", (0, 2): "AC", (1, 2): "BC"}
    for (p0, p1), label in pair_labels.items():
        other = ({0, 1, 2} - {p0, p1}).pop()
        for outs in itertools.product((0, 1), repeat=2):
            for sets in itertools.product((0, 1), repeat=2):
                m0 = beh.marginal_pair((p0, p1), outs, sets, traced_setting=0)
                m1 = beh.marginal_pair((p0, p1), outs, sets, traced_setting=1)
                res = abs(float(m0) - float(m1))
                worst = max(worst, res)
                if res > tol:
                    violated.append(
                        f"p_{label}({outs[0]}{outs[1]}|{sets[0]}{sets[1]}) depends on "
                        f"setting of {PARTIES[other]} (residual {res:.3e})"
                    )
    for party in range(3):
        for outcome in (0, 1):
            for setting in (0, 1):
                base = beh.marginal_single(party, outcome, setting, (0, 0))
                for ts in ((0, 1), (1, 0), (1, 1)):
                    m = beh.marginal_single(party, outcome, setting, ts)
                    res = abs(float(base) - float(m))
                    worst = max(worst, res)
                    if res > tol:
                        violated.append(
                            f"p_{PARTIES[party]}({outcome}|{setting}) depends on other "
                            f"settings {ts} (residual {res:.3e})"
                        )
    return NoSignallingReport(tuple(violated), worst)


# -- correlators -----------------------------------------------------------------

PAIRS = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class CorrelatorVector:
    """The 27 correlator coordinates of a no-signalling behavior.

    ``singles`` is ordered (A0, A1, B0, B1, C0, C1); ``pairs`` runs over party
    pairs AB, AC, BC with the two settings in binary order (00, 01, 10, 11);
    ``triples`` runs over (xyz) in binary order.  ``unit`` is always 1.
    """

    unit: Number
    singles: tuple[Number, ...]
    pairs: tuple[Number, ...]
    triples: tuple[Number, ...]

    def single(self, party: int, s: int) -> Number:
        return self.singles[party * 2 + s]

    def pair(self, parties: tuple[int, int], s0: int, s1: int) -> Number:
        return self.pairs[PAIRS.index(parties) * 4 + s0 * 2 + s1]

    def triple(self, x: int, y: int, z: int) -> Number:
        return self.triples[x * 4 + y * 2 + z]

    def as_array(self) -> np.ndarray:
        vals = (self.unit, *self.singles, *self.pairs, *self.triples)
        return np.array([float(v) for v in vals])


def correlators(beh: Behavior, tol: float = CHECK_TOL) -> CorrelatorVector:
    """Convert a no-signalling behavior to its correlator vector.

    Raises :class:`SignallingError` when a pair or single correlator would
    depend on the traced-out setting beyond ``tol``; marginal-based
    correlators are only well-defined for no-signalling behaviors.
    """
    report = check_no_signalling(beh, tol)
    if not report.ok:
        raise SignallingError(
            f"correlators undefined: {len(report.violated)} marginal inconsistencies, "
            f"max residual {report.max_residual:.3e}"
        )
    singles = []
    for party in range(3):
        for s in (0, 1):
            e: Number = 0
            for outcome in (0, 1):
                m = beh.marginal_single(party, outcome, s, (0, 0))
                e = e + (m if outcome == 0 else -m)
            singles.append(e)
    pairs = []
    for pp in PAIRS:
        for s0, s1 in itertools.product((0, 1), repeat=2):
            e = 0
            for o0, o1 in itertools.product((0, 1), repeat=2):
                m = beh.marginal_pair(pp, (o0, o1), (s0, s1), traced_setting=0)
                e = e + ((-1) ** (o0 + o1)) * m
            pairs.append(e)
    triples = []
    for x, y, z in SETTINGS:
        e = 0
        for a, b, c in OUTCOMES:
            e = e + ((-1) ** (a + b + c)) * beh.prob(a, b, c, x, y, z)
        triples.append(e)
    return CorrelatorVector(1, tuple(singles), tuple(pairs), tuple(triples))


def behavior_from_correlators(cv: CorrelatorVector) -> Behavior:
    """Inverse of :func:`correlators` (together with normalization).

    p(abc|xyz) = (1/8) [1 + sum of signed correlators], the sign of each
    correlator term being the product of (-1)^outcome over its parties.
    """
    eighth = Fraction(1, 8) if _is_exact(cv.unit) else 0.125
    vals: list[Number] = [0] * 64
    for x, y, z in SETTINGS:
        s = (x, y, z)
        for a, b, c in OUTCOMES:
            o = (a, b, c)
            total: Number = cv.unit
            for party in range(3):
                total = total + ((-1) ** o[party]) * cv.single(party, s[party])
            for pp in PAIRS:
                sign = (-1) ** (o[pp[0]] + o[pp[1]])
                total = total + sign * cv.pair(pp, s[pp[0]], s[pp[1]])
            total = total + ((-1) ** (a + b + c)) * cv.triple(x, y, z)
            vals[table_index(a, b, c, x, y, z)] = eighth * total
    return Behavior(tuple(vals))
