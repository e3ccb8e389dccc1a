"""Assembly of moment-matrix problems into solver-ready block LMIs.

A moment matrix over a generating set S has entry (i, j) equal to the
moment of the word  (S_i)^dagger S_j.  Moments form equivalence classes
under cross-party commutation, projector idempotence and word reversal
(reversal conjugates the value); each class is one scalar variable, which
is exactly the matrix-entry identification the relaxations rely on, and
keeps the SDP as small as possible.

Behavior probabilities are linear in the 0-outcome moments: substituting
(outcome 1) = identity - (0-outcome projector) and expanding multilinearly,

    p(abc|xyz) = sum over supersets of the 0-outcome parties,
                 with inclusion-exclusion signs,

an exact integer-coefficient map.  Bound mode leaves those moments free
(normalization <1> = 1 is the only pin); membership mode pins them to a
given behavior's values.  Marginal moments carry no trace of the removed
party's setting, so no-signalling holds implicitly in bound mode and no
extra constraints are added.

Moment matrices may be treated as real symmetric (default) or complex
Hermitian via the standard doubling embedding [[X, -Y], [Y, X]].  For every
problem assembled here the real restriction is lossless: conjugating any
feasible complex moment matrix gives another feasible one with the same
behavior moments, so the real part is itself feasible; the complex switch
stays available to verify that empirically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import IncompleteSet, SolverError, StructureError, UnsupportedLevel
from .functionals import BellFunctional, moment_coefficients
from .scenario import OUTCOMES, SETTINGS, Behavior, table_index
from .words import (
    IDENTITY_WORD,
    GeneratingSet,
    MomentKey,
    Word,
    canonicalize,
    entry_key,
    generating_set,
    multiply,
    reverse_word,
    word_length,
)
from . import solver as sdp

_PARTY_OF = {"A": 0, "B": 1, "C": 2, 0: 0, 1: 1, 2: 2}

IDENTITY_KEY = canonicalize(IDENTITY_WORD)


def behavior_moment_key(parties: tuple[int, ...], settings: tuple[int, ...]) -> MomentKey:
    """Key of the 0-outcome moment for a party subset at given settings."""
    parts: list[tuple[int, ...]] = [(), (), ()]
    for p, s in zip(parties, settings):
        parts[p] = (s,)
    return canonicalize(tuple(parts))


def behavior_expansion() -> dict[tuple[int, ...], tuple[tuple[MomentKey, int], ...]]:
    """For each (a,b,c,x,y,z), the inclusion-exclusion expansion over moments.

    The identity moment appears with key :data:`IDENTITY_KEY`; summing the
    eight expansions of one setting slice telescopes to that single key,
    which is the normalization identity.
    """
    out: dict[tuple[int, ...], tuple[tuple[MomentKey, int], ...]] = {}
    for a, b, c in OUTCOMES:
        for x, y, z in SETTINGS:
            outs = (a, b, c)
            sets = (x, y, z)
            zeros = tuple(p for p in range(3) if outs[p] == 0)
            ones = tuple(p for p in range(3) if outs[p] == 1)
            terms: dict[MomentKey, int] = {}
            for take in itertools.product((0, 1), repeat=len(ones)):
                chosen = tuple(sorted(zeros + tuple(p for p, t in zip(ones, take) if t)))
                key = behavior_moment_key(chosen, tuple(sets[p] for p in chosen))
                sign = (-1) ** sum(take)
                terms[key] = terms.get(key, 0) + sign
            out[(a, b, c, x, y, z)] = tuple((k, v) for k, v in terms.items() if v)
    return out


_BEHAVIOR_EXPANSION = behavior_expansion()

def _collect_behavior_keys() -> tuple[MomentKey, ...]:
    keys = set()
    for terms in _BEHAVIOR_EXPANSION.values():
        for k, _ in terms:
            if k != IDENTITY_KEY:
                keys.add(k)
    return tuple(sorted(keys, key=lambda k: (word_length(k.word), k.word)))


#: All 26 behavior-moment keys (1-, 2- and 3-party, without the identity).
BEHAVIOR_KEYS = _collect_behavior_keys()


def matrix_entry_keys(gset: GeneratingSet) -> set[MomentKey]:
    """All moment classes appearing in the base moment matrix of ``gset``."""
    if gset.is_product:
        # entries factor per party, so enumerate per-party products directly
        assert gset.local_words is not None
        per_party = sorted({
            _reduce(u, v)  # reduced product rev(u) v
            for u in gset.local_words
            for v in gset.local_words
        })
        keys = set()
        for pa in per_party:
            for pb in per_party:
                for pc in per_party:
                    keys.add(MomentKey(canonicalize((pa, pb, pc)).word, False))
        return keys
    keys = set()
    for i, wi in enumerate(gset.words):
        for wj in gset.words[i:]:
            keys.add(MomentKey(entry_key(wi, wj).word, False))
    return keys


def _reduce(u: tuple[int, ...], v: tuple[int, ...]) -> tuple[int, ...]:
    from .words import reduce_local

    return reduce_local(tuple(reversed(u)) + v)


def behavior_constraints(gset: GeneratingSet):
    """The exact linear map from moment variables to the 64 behavior entries.

    Returns the expansion dict; raises :class:`IncompleteSet` if the moment
    matrix of ``gset`` does not contain every required behavior moment.
    """
    available = matrix_entry_keys(gset)
    missing = [k for k in BEHAVIOR_KEYS if k not in available]
    if missing:
        raise IncompleteSet(
            f"generating set {gset.describe()} lacks {len(missing)} behavior moments, "
            f"e.g. word {missing[0].word}"
        )
    return _BEHAVIOR_EXPANSION


# -- block descriptions -------------------------------------------------------


@dataclass(frozen=True)
class BlockSpec:
    """Upper-triangle description of one moment LMI block.

    Entry t: position (rows[t], cols[t]) holds the moment of class
    ``keys[t]``, conjugated when ``conj[t]`` (imaginary part sign flip).
    """

    label: str
    dim: int
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    keys: tuple[MomentKey, ...]


def base_block(gset: GeneratingSet) -> BlockSpec:
    rows, cols, keys = [], [], []
    for i, wi in enumerate(gset.words):
        for j in range(i, gset.size):
            rows.append(i)
            cols.append(j)
            keys.append(entry_key(wi, gset.words[j]))
    return BlockSpec("base", gset.size, tuple(rows), tuple(cols), tuple(keys))


def ppt_block(gset: GeneratingSet, parties: Iterable[int | str]) -> BlockSpec:
    """Partially transposed moment block for a party subset.

    Only product-structured (local-level) sets have the tensor index
    structure partial transposition acts on; the entry at row (iA,iB,iC),
    column (jA,jB,jC) is the base entry with the i/j labels swapped for the
    transposed parties -- a pure index permutation, affine in the same
    variables.  Raises :class:`StructureError` for NPA sets.
    """
    if not gset.is_product:
        raise StructureError(
            f"{gset.describe()} has no party-product index structure; "
            "partial transposition is undefined"
        )
    subset = frozenset(_PARTY_OF[p] for p in parties)
    if not subset or subset == frozenset((0, 1, 2)):
        raise StructureError("transpose subset must be nonempty and proper")
    assert gset.local_words is not None
    local = gset.local_words
    n = len(local)
    rows, cols, keys = [], [], []
    dim = gset.size
    for i in range(dim):
        ia, ib, ic = i // (n * n), (i // n) % n, i % n
        for j in range(i, dim):
            ja, jb, jc = j // (n * n), (j // n) % n, j % n
            word_parts = []
            for party, (wi, wj) in enumerate((
                (local[ia], local[ja]), (local[ib], local[jb]), (local[ic], local[jc])
            )):
                if party in subset:
                    wi, wj = wj, wi
                word_parts.append(_reduce(wi, wj))
            rows.append(i)
            cols.append(j)
            keys.append(canonicalize(tuple(word_parts)))
    label = "T" + "".join("ABC"[p] for p in sorted(subset))
    return BlockSpec(label, dim, tuple(rows), tuple(cols), tuple(keys))


# -- the assembled problem -----------------------------------------------------


@dataclass
class MomentProblem:
    """A compiled moment SDP: shared variables, block LMIs, linear objective.

    ``mode`` is "bound" (objective = Bell functional, behavior moments free)
    or "membership" (behavior moments pinned, objective = smallest-eigenvalue
    slack t with blocks Gamma - t I).

    Bound mode always carries the 64 probability-positivity facets as
    one-dimensional blocks: the behavior entries are probabilities, and the
    relaxations are subsets of the no-signalling set only with positivity in
    place.  Local-level matrices imply it already (harmless redundancy); NPA
    matrices do not -- level 2 admits negative three-party entries without
    it, which would inflate e.g. the trivial positivity facet's bound above
    its published value of 1.  ``extra_keys`` lists behavior moments absent
    from every block (possible at npa level 1); they only live in those
    positivity blocks.
    """

    gset: GeneratingSet
    mode: str
    blocks: list[BlockSpec]
    free_keys: list[MomentKey]
    pinned: dict[MomentKey, Fraction]
    objective_const: Fraction
    objective: dict[MomentKey, Fraction]
    complex_embedding: bool
    ppt: tuple[str, ...]
    extra_keys: list[MomentKey] = field(default_factory=list)
    simplex_blocks: bool = False

    # -- variable layout -----------------------------------------------------

    def variable_layout(self):
        real_idx: dict[MomentKey, int] = {}
        imag_idx: dict[MomentKey, int] = {}
        pos = 0
        for k in self.free_keys + self.extra_keys:
            real_idx[k] = pos
            pos += 1
        if self.complex_embedding:
            for k in self.free_keys:
                if not k.is_real:
                    imag_idx[k] = pos
                    pos += 1
        t_idx = None
        if self.mode == "membership":
            t_idx = pos
            pos += 1
        return real_idx, imag_idx, t_idx, pos

    def _coeff(self, key: MomentKey):
        """(pinned value | None, canonical class key, conjugated?)"""
        base = MomentKey(key.word, False)
        return self.pinned.get(base), base, key.conjugated

    def to_standard_form(self) -> tuple[sdp.StandardForm, dict]:
        real_idx, imag_idx, t_idx, m = self.variable_layout()
        blocks: list[sdp.Block] = []
        for spec in self.blocks:
            const_entries: list[tuple[int, int, float]] = []
            var_entries: list[tuple[int, int, int, float]] = []
            d = spec.dim
            for i, j, key in zip(spec.rows, spec.cols, spec.keys):
                pinned_val, base, conj = self._coeff(key)
                if not self.complex_embedding:
                    if pinned_val is not None:
                        const_entries.append((i, j, float(pinned_val)))
                    else:
                        var_entries.append((real_idx[base], i, j, 1.0))
                else:
                    # X quadrants (real part)
                    if pinned_val is not None:
                        const_entries.append((i, j, float(pinned_val)))
                        const_entries.append((d + i, d + j, float(pinned_val)))
                    else:
                        var_entries.append((real_idx[base], i, j, 1.0))
                        var_entries.append((real_idx[base], d + i, d + j, 1.0))
                    # Y quadrant (imaginary part), zero for real classes
                    if base in imag_idx:
                        s = -1.0 if conj else 1.0
                        # top-right holds -Y; mirrored automatically
                        var_entries.append((imag_idx[base], i, d + j, -s))
                        var_entries.append((imag_idx[base], j, d + i, s))
                if t_idx is not None and i == j:
                    var_entries.append((t_idx, i, j, -1.0))
                    if self.complex_embedding:
                        var_entries.append((t_idx, d + i, d + j, -1.0))
            dim = 2 * d if self.complex_embedding else d
            blocks.append(sdp.Block.from_entries(dim, const_entries, var_entries))

        if self.simplex_blocks:
            for a, b, c in OUTCOMES:
                for x, y, z in SETTINGS:
                    const = 0.0
                    var_entries = []
                    for key, coef in _BEHAVIOR_EXPANSION[(a, b, c, x, y, z)]:
                        pinned_val, base, _ = self._coeff(key)
                        if pinned_val is not None:
                            const += coef * float(pinned_val)
                        else:
                            var_entries.append((real_idx[base], 0, 0, float(coef)))
                    blocks.append(sdp.Block.from_entries(1, [(0, 0, const)], var_entries))

        c = np.zeros(m)
        if self.mode == "membership":
            c[t_idx] = 1.0
        else:
            for key, coef in self.objective.items():
                pinned_val, base, _ = self._coeff(key)
                if pinned_val is not None:
                    continue  # folded into the constant elsewhere
                c[real_idx[base]] += float(coef)
        form = sdp.StandardForm(c=c, blocks=tuple(blocks))
        layout = {"real": real_idx, "imag": imag_idx, "t": t_idx, "m": m}
        return form, layout

    def warm_start(self, layout) -> np.ndarray:
        """Uniform-behavior moments (2^-order); zero imaginary parts and slack."""
        y0 = np.zeros(layout["m"])
        for key, pos in layout["real"].items():
            y0[pos] = 2.0 ** (-word_length(key.word))
        return y0

    def objective_offset(self) -> float:
        """Constant part of the objective, including pinned-moment terms."""
        total = Fraction(self.objective_const)
        for key, coef in self.objective.items():
            pinned_val, base, _ = self._coeff(key)
            if pinned_val is not None:
                total += coef * pinned_val
        return float(total)

    def behavior_from_values(self, layout, y: np.ndarray) -> Behavior:
        vals = [0.0] * 64
        for (a, b, c, x, y_, z), terms in _BEHAVIOR_EXPANSION.items():
            acc = 0.0
            for key, coef in terms:
                pinned_val, base, _ = self._coeff(key)
                if pinned_val is not None:
                    acc += coef * float(pinned_val)
                else:
                    acc += coef * float(y[layout["real"][base]])
            vals[table_index(a, b, c, x, y_, z)] = min(max(acc, 0.0), 1.0)
        return Behavior.from_table(vals, strict=False)


def _normalize_ppt(ppt: Iterable[int | str] | str | None) -> tuple[int, ...]:
    if ppt is None:
        return ()
    if isinstance(ppt, str):
        ppt = ("A", "B", "C") if ppt.lower() == "all" else (ppt,)
    return tuple(sorted({_PARTY_OF[p] for p in ppt}))


def assemble(
    gset: GeneratingSet | str,
    objective: BellFunctional | None,
    mode: str = "bound",
    behavior: Behavior | None = None,
    ppt: Iterable[int | str] | str | None = None,
    complex_embedding: bool = False,
) -> MomentProblem:
    """Compile a bound or membership moment problem over ``gset``.

    ``ppt`` lists parties whose partial transpose must also be PSD; "all"
    imposes every single-party transposition concurrently.  In bound mode
    behavior moments stay free (normalization only); if the generating set
    lacks some of them (npa level 1), they become free scalars constrained
    to the probability simplex.  In membership mode all behavior moments are
    pinned to ``behavior``'s values and the objective is the feasibility
    slack.
    """
    if isinstance(gset, str):
        gset = generating_set(gset)
    ppt_parties = _normalize_ppt(ppt)
    blocks = [base_block(gset)]
    for p in ppt_parties:
        blocks.append(ppt_block(gset, (p,)))

    all_keys: set[MomentKey] = set()
    for spec in blocks:
        for k in spec.keys:
            all_keys.add(MomentKey(k.word, False))
    ordered = sorted(all_keys, key=lambda k: (word_length(k.word), k.word))

    pinned: dict[MomentKey, Fraction] = {IDENTITY_KEY: Fraction(1)}
    extra: list[MomentKey] = []
    simplex = False

    if mode == "bound":
        if objective is None:
            raise ValueError("bound mode needs an objective functional")
        const, coeffs = moment_coefficients(objective)
        obj: dict[MomentKey, Fraction] = {}
        for (parties, settings), coef in coeffs.items():
            obj[behavior_moment_key(parties, settings)] = coef
        missing = [k for k in BEHAVIOR_KEYS if k not in all_keys]
        extra = missing  # moments outside the matrix become free scalars
        simplex = True
    elif mode == "membership":
        if behavior is None:
            raise ValueError("membership mode needs a behavior")
        behavior_constraints(gset)  # raises IncompleteSet when under-determined
        const, obj = Fraction(0), {}
        for key in BEHAVIOR_KEYS:
            parties = tuple(p for p in range(3) if key.word[p])
            settings = tuple(key.word[p][0] for p in parties)
            outs = tuple(0 for _ in parties)
            if len(parties) == 3:
                val = behavior.prob(0, 0, 0, *settings)
            elif len(parties) == 2:
                val = behavior.marginal_pair(parties, (0, 0), settings, traced_setting=0)
            else:
                val = behavior.marginal_single(parties[0], 0, settings[0], (0, 0))
            pinned[key] = Fraction(val) if not isinstance(val, float) else Fraction(val).limit_denominator(10 ** 12)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    free = [k for k in ordered if k not in pinned]
    return MomentProblem(
        gset=gset,
        mode=mode,
        blocks=blocks,
        free_keys=free,
        pinned=pinned,
        objective_const=const,
        objective=obj,
        complex_embedding=complex_embedding,
        ppt=tuple("ABC"[p] for p in ppt_parties),
        extra_keys=extra,
        simplex_blocks=simplex,
    )


# -- solve conveniences ----------------------------------------------------------


@dataclass
class MomentBound:
    """A solved relaxation bound with its certificate and optimizer data."""

    value: float
    solution: sdp.Solution
    problem: MomentProblem
    layout: dict
    certificate: dict

    def optimizer_behavior(self) -> Behavior:
        return self.problem.behavior_from_values(self.layout, self.solution.y)


def solve_bound(
    gset: GeneratingSet | str,
    objective: BellFunctional,
    ppt: Iterable[int | str] | str | None = None,
    complex_embedding: bool = False,
    cfg: sdp.SolverConfig | None = None,
    allow_large: bool = False,
) -> MomentBound:
    """Upper bound of a functional over the relaxation defined by ``gset``.

    Refuses solve-gated local levels (the 2197-size constructions) unless
    ``allow_large`` is set; assembly alone is always permitted.
    """
    if isinstance(gset, str):
        gset = generating_set(gset)
    if gset.solve_gated and not allow_large:
        raise UnsupportedLevel(
            f"{gset.describe()} is construction-only by default "
            "(pass allow_large to attempt a solve)"
        )
    problem = assemble(gset, objective, mode="bound", ppt=ppt,
                       complex_embedding=complex_embedding)
    form, layout = problem.to_standard_form()
    cfg = cfg or sdp.SolverConfig()
    if allow_large and not cfg.allow_large:
        cfg = sdp.SolverConfig(**{**cfg.__dict__, "allow_large": True})
    sol = sdp.solve(form, cfg, y0=problem.warm_start(layout))
    if sol.status is not sdp.Status.OPTIMAL:
        raise SolverError(
            f"bound solve failed on {gset.describe()} for {objective.id!r}: "
            f"{sol.status.value}", sol.status,
        )
    cert = sdp.certify(form, sol, feas_tol=max(cfg.feas_tol * 10, 1e-8))
    return MomentBound(
        value=sol.value + problem.objective_offset(),
        solution=sol,
        problem=problem,
        layout=layout,
        certificate=cert,
    )


@dataclass
class MembershipResult:
    feasible: bool
    slack: float
    solution: sdp.Solution


def check_membership(
    gset: GeneratingSet | str,
    behavior: Behavior,
    ppt: Iterable[int | str] | str | None = None,
    complex_embedding: bool = False,
    cfg: sdp.SolverConfig | None = None,
    tol: float = 1e-7,
) -> MembershipResult:
    """Is the behavior inside the relaxation?  Maximizes the PSD slack t.

    The moment matrix with behavior moments pinned admits a PSD completion
    iff max t >= 0 (within ``tol``); the sign of the optimum is the verdict.
    """
    if isinstance(gset, str):
        gset = generating_set(gset)
    problem = assemble(gset, None, mode="membership", behavior=behavior,
                       ppt=ppt, complex_embedding=complex_embedding)
    form, layout = problem.to_standard_form()
    sol = sdp.solve(form, cfg or sdp.SolverConfig(), y0=problem.warm_start(layout))
    if sol.status is not sdp.Status.OPTIMAL:
        raise SolverError(f"membership solve failed: {sol.status.value}", sol.status)
    return MembershipResult(feasible=sol.value >= -tol, slack=sol.value, solution=sol)


def realify(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Real doubling of a Hermitian matrix X + iY: [[X, -Y], [Y, X]].

    The doubled real symmetric matrix is PSD exactly when X + iY is, which
    is how complex moment matrices ride on a real-symmetric-only solver.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("X and Y must be square and of equal shape")
    if np.max(np.abs(x - x.T), initial=0.0) > 1e-12 or np.max(np.abs(y + y.T), initial=0.0) > 1e-12:
        raise ValueError("X must be symmetric and Y antisymmetric")
    return np.block([[x, -y], [y, x]])


# -- structural census -------------------------------------------------------------


def census(gset: GeneratingSet | str) -> dict:
    """Structural counts: words, moment classes, free parameters.

    Works for every supported level without materializing the matrix (entry
    words of product sets factor per party), so the construction-only levels
    are cheap to audit.
    """
    if isinstance(gset, str):
        gset = generating_set(gset)
    keys = matrix_entry_keys(gset)
    real_classes = sum(1 for k in keys if k.is_real)
    return {
        "set": gset.describe(),
        "words": gset.size,
        "moment_classes": len(keys),
        "real_moment_classes": real_classes,
        "complex_moment_classes": len(keys) - real_classes,
        "free_real_parameters": len(keys) - 1,  # identity pinned
        "free_parameters_complex_embedding": 2 * len(keys) - real_classes - 1,
        "behavior_moments_present": all(k in keys for k in BEHAVIOR_KEYS),
    }
