"""Bell functionals: linear forms on behaviors, with exact rational terms.

A functional is a list of (monomial, coefficient) pairs in one of two bases:

* correlator basis -- monomials "1", "E(A0)", "E(A0B1)", "E(A0B0C1)";
* probability basis -- monomials "1", "P(abc|xyz)" and marginal forms
  "P(A:a|x)", "P(AB:ab|xy)" (likewise AC, BC, B, C).

Coefficients are kept as exact `Fraction`s end to end; they are only
converted to floats at the solver boundary.  Values like 167/9 or 244/23
do not survive premature rounding, and the separation results depend on
them staying exact.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import BasisError, DuplicateIdError, ParseError, SignallingError
from .scenario import (
    OUTCOMES,
    PAIRS,
    PARTIES,
    SETTINGS,
    Behavior,
    DeterministicStrategy,
    correlators,
    table_index,
)

_PARTY_INDEX = {"A": 0, "B": 1, "C": 2}


@dataclass(frozen=True)
class Monomial:
    """One term descriptor.

    ``parties`` is a sorted tuple of party indices (empty for the constant
    "1"); ``settings`` gives one setting per listed party.  ``outcomes`` is
    None for correlator monomials and a per-party outcome tuple for
    probability monomials.
    """

    parties: tuple[int, ...]
    settings: tuple[int, ...]
    outcomes: tuple[int, ...] | None = None

    def __post_init__(self):
        if tuple(sorted(self.parties)) != self.parties:
            raise ValueError("parties must be sorted")
        if len(self.settings) != len(self.parties):
            raise ValueError("one setting per party required")
        if self.outcomes is not None and len(self.outcomes) != len(self.parties):
            raise ValueError("one outcome per party required")

    @property
    def is_constant(self) -> bool:
        return not self.parties

    @property
    def is_correlator(self) -> bool:
        return self.outcomes is None and bool(self.parties)

    def __str__(self) -> str:
        if self.is_constant:
            return "1"
        if self.outcomes is None:
            body = "".join(f"{PARTIES[p]}{s}" for p, s in zip(self.parties, self.settings))
            return f"E({body})"
        outs = "".join(str(o) for o in self.outcomes)
        sets = "".join(str(s) for s in self.settings)
        if len(self.parties) == 3:
            return f"P({outs}|{sets})"
        label = "".join(PARTIES[p] for p in self.parties)
        return f"P({label}:{outs}|{sets})"


_CORR_RE = re.compile(r"^E\(((?:[ABC][01]){1,3})\)$")
_PROB_FULL_RE = re.compile(r"^P\(([01]{3})\|([01]{3})\)$")
_PROB_MARG_RE = re.compile(r"^P\((A|B|C|AB|AC|BC):([01]{1,2})\|([01]{1,2})\)$")


def parse_monomial(text: str) -> Monomial:
    """Parse a monomial string; raises ValueError on malformed input."""
    text = text.strip()
    if text == "1":
        return Monomial((), ())
    m = _CORR_RE.match(text)
    if m:
        body = m.group(1)
        pairs = [(_PARTY_INDEX[body[i]], int(body[i + 1])) for i in range(0, len(body), 2)]
        parties = tuple(p for p, _ in pairs)
        if len(set(parties)) != len(parties) or tuple(sorted(parties)) != parties:
            raise ValueError(f"parties must be distinct and in A<B<C order: {text!r}")
        return Monomial(parties, tuple(s for _, s in pairs))
    m = _PROB_FULL_RE.match(text)
    if m:
        outs = tuple(int(ch) for ch in m.group(1))
        sets = tuple(int(ch) for ch in m.group(2))
        return Monomial((0, 1, 2), sets, outs)
    m = _PROB_MARG_RE.match(text)
    if m:
        label, outs_s, sets_s = m.groups()
        parties = tuple(_PARTY_INDEX[ch] for ch in label)
        if len(outs_s) != len(parties) or len(sets_s) != len(parties):
            raise ValueError(f"outcome/setting count mismatch in {text!r}")
        return Monomial(parties, tuple(int(c) for c in sets_s), tuple(int(c) for c in outs_s))
    raise ValueError(f"malformed monomial {text!r}")


@dataclass(frozen=True)
class BellFunctional:
    """A linear Bell functional with exact rational coefficients.

    ``local_bound``, when present, is the exact maximum over deterministic
    strategies; the catalog validation gate recomputes it by brute force.
    """

    id: str
    basis: str  # "correlator" | "probability"
    terms: tuple[tuple[Monomial, Fraction], ...]
    local_bound: Fraction | None = None
    notes: str = ""

    def __post_init__(self):
        if self.basis not in ("correlator", "probability"):
            raise ValueError(f"unknown basis {self.basis!r}")
        for mon, _ in self.terms:
            if self.basis == "correlator" and mon.outcomes is not None:
                raise ValueError(f"probability monomial {mon} in correlator-basis functional")
            if self.basis == "probability" and mon.is_correlator:
                raise ValueError(f"correlator monomial {mon} in probability-basis functional")

    def scaled(self, factor: Fraction, new_id: str | None = None) -> "BellFunctional":
        factor = Fraction(factor)
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return BellFunctional(
            id=new_id or self.id,
            basis=self.basis,
            terms=tuple((m, c * factor) for m, c in self.terms),
            local_bound=None if self.local_bound is None else self.local_bound * factor,
            notes=self.notes,
        )


# -- evaluation -----------------------------------------------------------------


def _marginal_value(beh: Behavior, mon: Monomial):
    """Probability-monomial value, tracing absent parties at setting 0."""
    if len(mon.parties) == 3:
        return beh.prob(*mon.outcomes, *mon.settings)
    if len(mon.parties) == 2:
        return beh.marginal_pair(mon.parties, mon.outcomes, mon.settings, traced_setting=0)
    return beh.marginal_single(mon.parties[0], mon.outcomes[0], mon.settings[0], (0, 0))


def functional_value(f: BellFunctional, beh: Behavior):
    """Evaluate ``f`` on a behavior; exact when both sides are exact.

    Correlator-basis functionals require a no-signalling behavior (their
    marginal terms are otherwise ambiguous); a signalling input raises
    :class:`BasisError`.  Probability-basis marginal terms trace absent
    parties at setting 0, the same documented choice used everywhere else.
    """
    if f.basis == "correlator":
        try:
            cv = correlators(beh)
        except SignallingError as exc:
            raise BasisError(
                f"correlator-basis functional {f.id!r} applied to signalling behavior"
            ) from exc
        total = 0
        for mon, coef in f.terms:
            if mon.is_constant:
                total = total + coef
            elif len(mon.parties) == 1:
                total = total + coef * cv.single(mon.parties[0], mon.settings[0])
            elif len(mon.parties) == 2:
                total = total + coef * cv.pair(mon.parties, *mon.settings)
            else:
                total = total + coef * cv.triple(*mon.settings)
        return total
    total = 0
    for mon, coef in f.terms:
        if mon.is_constant:
            total = total + coef
        else:
            total = total + coef * _marginal_value(beh, mon)
    return total


def strategy_value(f: BellFunctional, strat: DeterministicStrategy) -> Fraction:
    """Exact value of ``f`` on the behavior of a deterministic strategy."""
    outs = (strat.a, strat.b, strat.c)
    total = Fraction(0)
    for mon, coef in f.terms:
        if mon.is_constant:
            total += coef
            continue
        if mon.outcomes is None:
            sign = 1
            for p, s in zip(mon.parties, mon.settings):
                sign = -sign if outs[p][s] else sign
            total += coef * sign
        else:
            hit = all(outs[p][s] == o for p, s, o in zip(mon.parties, mon.settings, mon.outcomes))
            if hit:
                total += coef
    return total


# -- basis conversion ------------------------------------------------------------

#: Setting used when expanding marginal terms over the full probability table.
#: Any fixed choice is equivalent under no-signalling; fixing setting 0 makes
#: all outputs reproducible.
TRACED_SETTING = 0


def _expand_to_full_probability(mon: Monomial) -> list[tuple[Monomial, int]]:
    """Expand a monomial over full P(abc|xyz) monomials with +-1 weights."""
    if mon.is_constant:
        raise ValueError("constant has no probability expansion")
    present = dict(zip(mon.parties, mon.settings))
    out_weights: list[tuple[Monomial, int]] = []
    absent = [p for p in range(3) if p not in present]
    if mon.outcomes is None:
        outcome_sets = itertools.product((0, 1), repeat=len(mon.parties))
        signed = [
            (dict(zip(mon.parties, outs)), (-1) ** sum(outs)) for outs in outcome_sets
        ]
    else:
        signed = [(dict(zip(mon.parties, mon.outcomes)), 1)]
    settings = [present.get(p, TRACED_SETTING) for p in range(3)]
    for fixed, sign in signed:
        for free in itertools.product((0, 1), repeat=len(absent)):
            outs = [0, 0, 0]
            for p, o in fixed.items():
                outs[p] = o
            for p, o in zip(absent, free):
                outs[p] = o
            out_weights.append((Monomial((0, 1, 2), tuple(settings), tuple(outs)), sign))
    return out_weights


def to_probability_basis(f: BellFunctional) -> BellFunctional:
    """Re-express a functional over full probabilities P(abc|xyz).

    Marginal and correlator terms are expanded with traced-out parties at
    setting :data:`TRACED_SETTING`; the result agrees with ``f`` on every
    no-signalling behavior.
    """
    acc: dict[Monomial, Fraction] = {}
    const = Fraction(0)
    for mon, coef in f.terms:
        if mon.is_constant:
            const += coef
            continue
        for full, sign in _expand_to_full_probability(mon):
            acc[full] = acc.get(full, Fraction(0)) + coef * sign
    terms: list[tuple[Monomial, Fraction]] = []
    if const:
        terms.append((Monomial((), ()), const))
    terms.extend((m, c) for m, c in sorted(acc.items(), key=lambda kv: str(kv[0])) if c)
    return BellFunctional(
        id=f.id, basis="probability", terms=tuple(terms), local_bound=f.local_bound, notes=f.notes
    )


def probability_coefficients(f: BellFunctional) -> tuple[Fraction, list[Fraction]]:
    """(constant, 64 coefficients over p(abc|xyz)) for LP-style use."""
    pf = f if f.basis == "probability" and all(
        m.is_constant or len(m.parties) == 3 for m, _ in f.terms
    ) else to_probability_basis(f)
    const = Fraction(0)
    coefs = [Fraction(0)] * 64
    for mon, coef in pf.terms:
        if mon.is_constant:
            const += coef
        else:
            coefs[table_index(*mon.outcomes, *mon.settings)] += coef
    return const, coefs


def moment_coefficients(f: BellFunctional) -> tuple[Fraction, dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction]]:
    """Expand ``f`` over 0-outcome subset moments.

    Returns (constant, {(parties, settings): coefficient}) where the moment
    for key ((0,1), (x,y)) is the expectation of the product of 0-outcome
    projectors of parties A and B at settings x and y.  The expansion uses
    the substitution (outcome 1) = (identity - outcome-0 projector) and
    (-1)^a eigenvalue mapping, so it is exact with integer weights.
    """
    const = Fraction(0)
    acc: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}

    def add(parties: tuple[int, ...], settings: tuple[int, ...], w: Fraction):
        nonlocal const
        if not parties:
            const += w
            return
        key = (parties, settings)
        acc[key] = acc.get(key, Fraction(0)) + w

    for mon, coef in f.terms:
        if mon.is_constant:
            const += coef
            continue
        ps = list(zip(mon.parties, mon.settings))
        if mon.outcomes is None:
            # product over parties of (2 Pi - 1)
            for sub in itertools.product((0, 1), repeat=len(ps)):
                weight = coef
                parties, settings = [], []
                for (p, s), take in zip(ps, sub):
                    if take:
                        weight *= 2
                        parties.append(p)
                        settings.append(s)
                    else:
                        weight *= -1
                add(tuple(parties), tuple(settings), weight)
        else:
            # product over parties of Pi (outcome 0) or (1 - Pi) (outcome 1)
            ones = [i for i, o in enumerate(mon.outcomes) if o == 1]
            zeros = [i for i, o in enumerate(mon.outcomes) if o == 0]
            for sub in itertools.product((0, 1), repeat=len(ones)):
                weight = coef * Fraction((-1) ** sum(sub))
                chosen = sorted(zeros + [ones[i] for i, take in enumerate(sub) if take])
                parties = tuple(ps[i][0] for i in chosen)
                settings = tuple(ps[i][1] for i in chosen)
                add(parties, settings, weight)
    acc = {k: v for k, v in acc.items() if v}
    return const, acc


# -- catalog I/O ------------------------------------------------------------------


def _parse_rational(raw, *, entry=None, fieldname=None) -> Fraction:
    if isinstance(raw, bool):
        raise ParseError("booleans are not rationals", entry=entry, field=fieldname)
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        raise ParseError(
            f"float {raw!r} not allowed; use an exact string like \"p/q\"",
            entry=entry, field=fieldname,
        )
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed rational {raw!r}: {exc}", entry=entry, field=fieldname)
    raise ParseError(f"cannot parse rational from {type(raw).__name__}", entry=entry, field=fieldname)


def parse_catalog(text: str) -> list[BellFunctional]:
    """Parse a catalog JSON document into functionals.

    The document is a JSON array; each element carries ``id``, ``basis``,
    ``bound``, ``terms`` (list of {"mon", "coef"}) and an optional ``notes``
    string.  Raises :class:`ParseError` with entry/field context and
    :class:`DuplicateIdError` on repeated ids.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise ParseError("catalog must be a JSON array")
    seen: set[str] = set()
    out: list[BellFunctional] = []
    for idx, raw in enumerate(doc):
        if not isinstance(raw, dict):
            raise ParseError("entry must be an object", entry=idx)
        ident = raw.get("id")
        if not isinstance(ident, str) or not ident:
            raise ParseError("missing or empty id", entry=idx, field="id")
        if ident in seen:
            raise DuplicateIdError(f"duplicate catalog id {ident!r}")
        seen.add(ident)
        basis = raw.get("basis")
        if basis not in ("correlator", "probability"):
            raise ParseError(f"unknown basis {basis!r}", entry=ident, field="basis")
        bound = None
        if raw.get("bound") is not None:
            bound = _parse_rational(raw["bound"], entry=ident, fieldname="bound")
        raw_terms = raw.get("terms")
        if not isinstance(raw_terms, list) or not raw_terms:
            raise ParseError("terms must be a non-empty list", entry=ident, field="terms")
        terms: list[tuple[Monomial, Fraction]] = []
        seen_mons: set[Monomial] = set()
        for t_idx, t in enumerate(raw_terms):
            if not isinstance(t, dict) or "mon" not in t or "coef" not in t:
                raise ParseError("term needs 'mon' and 'coef'", entry=ident, field=f"terms[{t_idx}]")
            try:
                mon = parse_monomial(t["mon"])
            except (ValueError, TypeError) as exc:
                raise ParseError(str(exc), entry=ident, field=f"terms[{t_idx}].mon")
            if mon in seen_mons:
                raise ParseError(f"repeated monomial {mon}", entry=ident, field=f"terms[{t_idx}].mon")
            seen_mons.add(mon)
            coef = _parse_rational(t["coef"], entry=ident, fieldname=f"terms[{t_idx}].coef")
            terms.append((mon, coef))
        try:
            func = BellFunctional(
                id=ident, basis=basis, terms=tuple(terms), local_bound=bound,
                notes=str(raw.get("notes", "")),
            )
        except ValueError as exc:
            raise ParseError(str(exc), entry=ident)
        out.append(func)
    return out


def _rational_str(q: Fraction) -> str | int:
    if q.denominator == 1:
        return int(q)
    return f"{q.numerator}/{q.denominator}"


def serialize_catalog(entries: Iterable[BellFunctional]) -> str:
    doc = []
    for f in entries:
        item = {
            "id": f.id,
            "basis": f.basis,
            "bound": None if f.local_bound is None else _rational_str(f.local_bound),
            "terms": [{"mon": str(m), "coef": _rational_str(c)} for m, c in f.terms],
        }
        if f.notes:
            item["notes"] = f.notes
        doc.append(item)
    return json.dumps(doc, indent=1)


def load_default_catalog() -> list[BellFunctional]:
    """Load the catalog shipped with the package."""
    from importlib.resources import files

    text = files("tribell.data").joinpath("catalog.json").read_text("utf-8")
    return parse_catalog(text)
