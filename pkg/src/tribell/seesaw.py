"""Heuristic quantum lower bounds by alternating (see-saw) optimization.

Models are three-qubit pure states with two binary projective measurements
per party; that family suffices to reach the quantum maximum in this
scenario.  Each observable is a 2x2 Hermitian involution O (eigenvalues
+-1) whose 0-outcome projector is (1 + O)/2.

One sweep alternates:

* state step -- the objective is <psi| B |psi> for the Bell operator B of
  the current observables, maximized by the top eigenvector of B;
* party step -- for a fixed state and fixed other parties, the objective is
  affine in each observable, sum_s tr(R_s O_s) + const, with R_s a 2x2
  conditioned operator obtained by partial contraction; the maximizing
  involution is the Hermitian sign of R_s.

Both steps are exact coordinate maximizers, so the objective never
decreases; the sweep loop asserts that invariant.  Every returned value is
a valid quantum lower bound by construction, and the returned model can be
re-checked independently by evaluating the functional on its Born-rule
behavior.

The biseparable mode restricts the state to a product across one
bipartition and alternates top-eigenvector solves of the two conditioned
factor operators, lower-bounding the biseparable maximum for that cut.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .functionals import BellFunctional, moment_coefficients
from .scenario import OUTCOMES, SETTINGS, Behavior, table_index

_I2 = np.eye(2, dtype=complex)
_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

BIPARTITIONS = {"A|BC": 0, "B|AC": 1, "C|AB": 2}


@dataclass(frozen=True)
class LocalObservable:
    """A 2x2 Hermitian involution; one measurement of one party and setting."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.shape != (2, 2):
            raise ValueError("observable must be 2x2")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("observable must be Hermitian")
        if np.max(np.abs(m @ m - _I2)) > 1e-12:
            raise ValueError("observable must square to the identity")

    @staticmethod
    def from_bloch(n: Sequence[float]) -> "LocalObservable":
        v = np.asarray(n, dtype=float)
        if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError("Bloch vector must be a unit 3-vector")
        return LocalObservable(sum(v[k] * _SIGMA[k] for k in range(3)))

    def projector(self) -> np.ndarray:
        """The 0-outcome projector (1 + O)/2."""
        return 0.5 * (_I2 + self.matrix)

    def bloch(self) -> tuple[float, tuple[float, float, float]]:
        """Decomposition O = t*1 + n.sigma (t = +-1 trivial, t = 0 unit Bloch)."""
        t = float(np.real(np.trace(self.matrix))) / 2.0
        n = tuple(float(np.real(np.trace(self.matrix @ s))) / 2.0 for s in _SIGMA)
        return t, n  # type: ignore[return-value]


Observables = tuple[tuple[LocalObservable, LocalObservable], ...]  # 3 parties x 2 settings


@dataclass(frozen=True)
class StateVector:
    """A three-qubit pure state; in product mode it factorizes across a cut."""

    amplitudes: np.ndarray
    mode: str = "generic"  # "generic" | "product"
    bipartition: str | None = None
    factors: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(8)
        object.__setattr__(self, "amplitudes", a)
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError("state must be normalized")
        if self.mode == "product":
            if self.bipartition not in BIPARTITIONS or self.factors is None:
                raise ValueError("product mode needs a bipartition and factors")


def _fix_phase(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > 1e-12:
            return v * (abs(x) / x)
    return v


def _term_structure(f: BellFunctional):
    const, coeffs = moment_coefficients(f)
    terms = [(parties, settings, float(c)) for (parties, settings), c in coeffs.items()]
    return float(const), terms


def bell_operator(f: BellFunctional, observables: Observables) -> np.ndarray:
    """The 8x8 Hermitian B with <psi|B|psi> = value of ``f`` on the model.

    Assembled from tensor products of 0-outcome projectors (identity for
    absent parties), plus the functional's constant times the identity.
    """
    const, terms = _term_structure(f)
    proj = [[observables[p][s].projector() for s in (0, 1)] for p in range(3)]
    b = const * np.eye(8, dtype=complex)
    for parties, settings, coef in terms:
        present = dict(zip(parties, settings))
        factors = [proj[p][present[p]] if p in present else _I2 for p in range(3)]
        b = b + coef * np.kron(np.kron(factors[0], factors[1]), factors[2])
    return 0.5 * (b + b.conj().T)


def behavior_from_model(state: StateVector, observables: Observables) -> Behavior:
    """The Born-rule probability table of a model (exactly normalized)."""
    psi = state.amplitudes.reshape(2, 2, 2)
    vals = [0.0] * 64
    projs = [
        [[observables[p][s].projector(), _I2 - observables[p][s].projector()] for s in (0, 1)]
        for p in range(3)
    ]
    for x, y, z in SETTINGS:
        for a, b, c in OUTCOMES:
            phi = np.einsum(
                "ai,bj,ck,ijk->abc",
                projs[0][x][a], projs[1][y][b], projs[2][z][c], psi,
            )
            vals[table_index(a, b, c, x, y, z)] = float(
                np.real(np.einsum("abc,abc->", psi.conj(), phi))
            )
    # clip tiny negatives from rounding; Born probabilities are nonnegative
    vals = [min(max(v, 0.0), 1.0) for v in vals]
    return Behavior.from_table(vals, strict=False)


@dataclass(frozen=True)
class SeesawConfig:
    restarts: int = 200
    tol: float = 1e-10
    max_sweeps: int = 500
    seed: int = 0


@dataclass
class SeesawResult:
    value: float
    state: StateVector
    observables: Observables
    sweeps: int
    restart_index: int

    def to_json(self) -> str:
        obs = []
        for pair in self.observables:
            row = []
            for o in pair:
                t, n = o.bloch()
                row.append({"trace_part": t, "bloch": list(n)})
            obs.append(row)
        doc = {
            "value": self.value,
            "mode": self.state.mode,
            "bipartition": self.state.bipartition,
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.state.amplitudes],
            "observables": obs,
        }
        return json.dumps(doc, indent=1)


def model_from_json(text: str) -> tuple[StateVector, Observables]:
    doc = json.loads(text)
    amps = np.array([complex(re, im) for re, im in doc["amplitudes"]])
    state = StateVector(amps / np.linalg.norm(amps))
    obs = tuple(
        tuple(
            LocalObservable(row["trace_part"] * _I2
                            + sum(row["bloch"][k] * _SIGMA[k] for k in range(3)))
            for row in pair
        )
        for pair in doc["observables"]
    )
    return state, obs  # type: ignore[return-value]


def _sign_observable(r: np.ndarray, previous: LocalObservable) -> LocalObservable:
    """Hermitian sign of the conditioned operator; ties go to +1.

    A vanishing conditioned operator (norm < 1e-12) keeps the previous
    observable: any choice is optimal there, and keeping the old one
    preserves monotonicity and determinism.
    """
    r = 0.5 * (r + r.conj().T)
    if np.max(np.abs(r)) < 1e-12:
        return previous
    w, v = np.linalg.eigh(r)
    signs = np.where(w >= 0.0, 1.0, -1.0)
    return LocalObservable(v @ np.diag(signs) @ v.conj().T)


def _conditioned_operators(terms, const, psi: np.ndarray, proj, party: int):
    """R_0, R_1 for one party: objective = sum_s tr(Pi_{0|s} R'_s) + rest.

    Written on the observable scale: objective = sum_s tr(O_s R_s)/1 + const',
    with R_s half the projector-conditioned operator (Pi = (1+O)/2).
    """
    rho = psi.reshape(2, 2, 2)
    r = [np.zeros((2, 2), dtype=complex), np.zeros((2, 2), dtype=complex)]
    for parties, settings, coef in terms:
        if party not in parties:
            continue
        present = dict(zip(parties, settings))
        ops = [proj[p][present[p]] if p in present else _I2 for p in range(3)]
        ops[party] = _I2
        # phi = (ops applied to all slots but `party`) |psi>
        phi = np.einsum("ai,bj,ck,ijk->abc", ops[0], ops[1], ops[2], rho)
        # partial contraction leaving party's (bra, ket) indices; the
        # objective piece is sum_{a,a'} O[a,a'] m[a,a'] = tr(O m^T),
        # so the conditioned operator is the transpose
        axes = [p for p in range(3) if p != party]
        m = np.tensordot(rho.conj(), phi, axes=(axes, axes))
        r[present[party]] += coef * m.T
    return r


def _sweep(terms, const, psi, observables, state_step):
    """One full sweep: state step, then both settings of each party in turn."""
    psi = state_step(observables, psi)
    obs = [list(pair) for pair in observables]
    for party in range(3):
        proj = [[obs[p][s].projector() for s in (0, 1)] for p in range(3)]
        r_pair = _conditioned_operators(terms, const, psi, proj, party)
        for s in (0, 1):
            # tr(Pi R) = tr(R)/2 + tr(O R)/2: the sign of R maximizes over O
            obs[party][s] = _sign_observable(r_pair[s], obs[party][s])
    return psi, tuple(tuple(pair) for pair in obs)


def _value(terms, const, psi, observables) -> float:
    proj = [[observables[p][s].projector() for s in (0, 1)] for p in range(3)]
    rho = psi.reshape(2, 2, 2)
    total = const
    for parties, settings, coef in terms:
        present = dict(zip(parties, settings))
        ops = [proj[p][present[p]] if p in present else _I2 for p in range(3)]
        phi = np.einsum("ai,bj,ck,ijk->abc", ops[0], ops[1], ops[2], rho)
        total += coef * float(np.real(np.einsum("abc,abc->", rho.conj(), phi)))
    return total


def _random_observables(rng) -> Observables:
    out = []
    for _ in range(3):
        pair = []
        for _ in range(2):
            z = 2.0 * rng.random() - 1.0
            phi = 2.0 * math.pi * rng.random()
            rho = math.sqrt(max(0.0, 1.0 - z * z))
            pair.append(LocalObservable.from_bloch((rho * math.cos(phi), rho * math.sin(phi), z)))
        out.append(tuple(pair))
    return tuple(out)


def _random_state(rng, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return _fix_phase(v / np.linalg.norm(v))


def _restart_rng(seed: int, restart: int):
    return np.random.Generator(np.random.Philox(key=seed).jumped(restart))


def _run_seesaw(f: BellFunctional, cfg: SeesawConfig, state_stepper, state_packer):
    const, terms = _term_structure(f)
    best: SeesawResult | None = None
    for restart in range(cfg.restarts):
        rng = _restart_rng(cfg.seed, restart)
        observables = _random_observables(rng)
        psi, aux = state_stepper.init(rng)
        value = _value(terms, const, psi, observables)
        sweeps = 0
        for sweeps in range(1, cfg.max_sweeps + 1):
            def state_step(obs, cur_psi):
                return state_stepper.step(terms, const, obs, cur_psi)

            psi, observables = _sweep(terms, const, psi, observables, state_step)
            new_value = _value(terms, const, psi, observables)
            # each half-step is an exact coordinate maximizer
            assert new_value >= value - 1e-12, (
                f"see-saw objective decreased: {value} -> {new_value}"
            )
            if new_value - value < cfg.tol:
                value = new_value
                break
            value = new_value
        if best is None or value > best.value:
            best = SeesawResult(
                value=value,
                state=state_packer(psi, state_stepper),
                observables=observables,
                sweeps=sweeps,
                restart_index=restart,
            )
    assert best is not None
    return best


class _GenericStateStepper:
    """Top eigenvector of the Bell operator, deterministic tie-breaking."""

    def init(self, rng):
        return _random_state(rng, 8), None

    def step(self, terms, const, observables, psi):
        proj = [[observables[p][s].projector() for s in (0, 1)] for p in range(3)]
        b = const * np.eye(8, dtype=complex)
        for parties, settings, coef in terms:
            present = dict(zip(parties, settings))
            factors = [proj[p][present[p]] if p in present else _I2 for p in range(3)]
            b += coef * np.kron(np.kron(factors[0], factors[1]), factors[2])
        b = 0.5 * (b + b.conj().T)
        _, vecs = np.linalg.eigh(b)
        return _fix_phase(vecs[:, -1])


class _ProductStateStepper:
    """Alternating top-eigenvector solves of the two conditioned factors."""

    def __init__(self, bipartition: str, inner_rounds: int = 4):
        self.bipartition = bipartition
        self.party = BIPARTITIONS[bipartition]
        self.inner_rounds = inner_rounds
        self.psi1 = None  # 2-vector on the singled-out party
        self.psi2 = None  # 4-vector on the pair

    def init(self, rng):
        self.psi1 = _random_state(rng, 2)
        self.psi2 = _random_state(rng, 4)
        return self._assemble(), None

    def _assemble(self) -> np.ndarray:
        p = self.party
        others = [q for q in range(3) if q != p]
        tmp = np.einsum("i,jk->ijk", self.psi1, self.psi2.reshape(2, 2))
        out = np.moveaxis(tmp, (0, 1, 2), (p, others[0], others[1]))
        return _fix_phase(np.ascontiguousarray(out).reshape(8))

    def step(self, terms, const, observables, psi):
        proj = [[observables[p][s].projector() for s in (0, 1)] for p in range(3)]
        b = const * np.eye(8, dtype=complex)
        for parties, settings, coef in terms:
            present = dict(zip(parties, settings))
            factors = [proj[p][present[p]] if p in present else _I2 for p in range(3)]
            b += coef * np.kron(np.kron(factors[0], factors[1]), factors[2])
        b = 0.5 * (b + b.conj().T)
        p = self.party
        others = [q for q in range(3) if q != p]
        # rearrange B to (party, pair) x (party, pair)
        t = b.reshape(2, 2, 2, 2, 2, 2)
        perm = [p, others[0], others[1]]
        t = t.transpose(perm + [3 + q for q in perm]).reshape(2, 4, 2, 4)
        for _ in range(self.inner_rounds):
            b1 = np.einsum("ixjy,x,y->ij", t, self.psi2.conj(), self.psi2)
            _, v1 = np.linalg.eigh(0.5 * (b1 + b1.conj().T))
            self.psi1 = _fix_phase(v1[:, -1])
            b2 = np.einsum("ixjy,i,j->xy", t, self.psi1.conj(), self.psi1)
            _, v2 = np.linalg.eigh(0.5 * (b2 + b2.conj().T))
            self.psi2 = _fix_phase(v2[:, -1])
        return self._assemble()


def seesaw_max(f: BellFunctional, cfg: SeesawConfig | None = None) -> SeesawResult:
    """Best quantum value found over seeded random restarts.

    Monotone within each run; deterministic for a fixed seed and
    configuration.  The result's value is always a valid lower bound on the
    quantum maximum.
    """
    cfg = cfg or SeesawConfig()
    stepper = _GenericStateStepper()

    def pack(psi, _stepper):
        return StateVector(psi)

    return _run_seesaw(f, cfg, stepper, pack)


def seesaw_bisep(f: BellFunctional, bipartition: str,
                 cfg: SeesawConfig | None = None) -> SeesawResult:
    """Best value over product states across ``bipartition`` (e.g. "A|BC").

    Lower-bounds the biseparable quantum maximum for that cut.
    """
    if bipartition not in BIPARTITIONS:
        raise ValueError(f"unknown bipartition {bipartition!r}; use one of {sorted(BIPARTITIONS)}")
    cfg = cfg or SeesawConfig()
    stepper = _ProductStateStepper(bipartition)

    def pack(psi, stp):
        return StateVector(
            psi, mode="product", bipartition=bipartition,
            factors=(stp.psi1.copy(), stp.psi2.copy()),
        )

    return _run_seesaw(f, cfg, stepper, pack)
