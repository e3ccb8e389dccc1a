"""Dense primal-dual interior-point solver for small block SDPs and LPs.

The problem form is the linear-matrix-inequality ("dual") standard form

    maximize    c . y
    subject to  F_b(y) = F0_b + sum_i y_i F_{b,i}  is PSD   for each block b,
                A y = b                                     (optional),

whose conic dual is  minimize <F0, X>  s.t.  <F_i, X> = -c_i,  X PSD.
Weak duality:  <F0, X> - c.y = <X, F(y)> >= 0.

Method: infeasible-start Mehrotra predictor-corrector path following with
Nesterov-Todd scaling on each block, a dense Schur complement factored by
Cholesky with a ramped diagonal regularization, and a 0.98
fraction-to-boundary step rule.  Linear equalities are eliminated up front
by null-space substitution, so the core iteration only sees the LMI.

Blocks of dimension 1 are aggregated into a diagonal group and handled
element-wise, which makes the LP sub-case (all 1x1 blocks) cheap.

Everything is deterministic: identical inputs and configuration produce
identical iterates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CertificationFailure, DimensionGateError, SolverError

_SYM_TOL = 1e-14


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_TROUBLE = "NumericalTrouble"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"


@dataclass(frozen=True)
class Block:
    """One affine-symmetric-matrix constraint F0 + sum_i y_i F_i >= 0.

    ``f0`` is the dense constant part.  The variable part is a flat triplet
    list (var, row, col, val) that must describe full matrices: off-diagonal
    entries appear twice, mirrored.  Use :meth:`from_entries` to build from
    an upper-triangle description.
    """

    dim: int
    f0: np.ndarray
    var: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @staticmethod
    def from_entries(dim: int,
                     const_entries: Sequence[tuple[int, int, float]],
                     var_entries: Sequence[tuple[int, int, int, float]]) -> "Block":
        """Build a block from upper-triangle entries (i <= j), mirroring."""
        f0 = np.zeros((dim, dim))
        for i, j, v in const_entries:
            f0[i, j] += v
            if i != j:
                f0[j, i] += v
        var, rows, cols, vals = [], [], [], []
        for k, i, j, v in var_entries:
            var.append(k); rows.append(i); cols.append(j); vals.append(v)
            if i != j:
                var.append(k); rows.append(j); cols.append(i); vals.append(v)
        return Block(
            dim=dim,
            f0=f0,
            var=np.asarray(var, dtype=np.intp),
            rows=np.asarray(rows, dtype=np.intp),
            cols=np.asarray(cols, dtype=np.intp),
            vals=np.asarray(vals, dtype=float),
        )

    def matrix_at(self, y: np.ndarray) -> np.ndarray:
        """Assemble F(y) densely."""
        m = self.f0.copy()
        if len(self.var):
            np.add.at(m, (self.rows, self.cols), self.vals * y[self.var])
        return m


@dataclass(frozen=True)
class StandardForm:
    """maximize c.y over the intersection of the block LMIs (and A y = b)."""

    c: np.ndarray
    blocks: tuple[Block, ...]
    A: np.ndarray | None = None
    b: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        object.__setattr__(self, "c", c)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("objective must be a non-empty vector")
        if not self.blocks:
            raise ValueError("at least one block required")
        for blk in self.blocks:
            if blk.dim < 1:
                raise ValueError("block dimensions must be >= 1")
            if blk.f0.shape != (blk.dim, blk.dim):
                raise ValueError("f0 shape mismatch")
            if np.max(np.abs(blk.f0 - blk.f0.T), initial=0.0) > _SYM_TOL * max(
                1.0, np.max(np.abs(blk.f0), initial=0.0)
            ):
                raise ValueError("f0 must be symmetric")
            if len(blk.var) and (blk.var.max() >= c.size or blk.var.min() < 0):
                raise ValueError("variable index out of range")
        if (self.A is None) != (self.b is None):
            raise ValueError("A and b must be given together")
        if self.A is not None:
            A = np.asarray(self.A, dtype=float)
            b = np.asarray(self.b, dtype=float)
            if A.shape != (b.size, c.size):
                raise ValueError("equality shape mismatch")
            object.__setattr__(self, "A", A)
            object.__setattr__(self, "b", b)

    @property
    def total_dim(self) -> int:
        return sum(blk.dim for blk in self.blocks)


@dataclass(frozen=True)
class SolverConfig:
    gap_tol: float = 1e-9
    feas_tol: float = 1e-9
    max_iter: int = 200
    step_frac: float = 0.98
    dim_gate: int = 600
    allow_large: bool = False
    verbose: bool = False


@dataclass
class Solution:
    value: float
    y: np.ndarray
    duality_gap: float
    status: Status
    iterations: int
    residuals: dict
    X: list[np.ndarray] = field(default_factory=list)
    Z: list[np.ndarray] = field(default_factory=list)
    dual_value: float = float("nan")

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


# -- equality elimination ------------------------------------------------------


def _eliminate_equalities(p: StandardForm):
    """Substitute y = y0 + N u with N an orthonormal null-space basis of A."""
    A, b = p.A, p.b
    m = p.c.size
    u, s, vt = np.linalg.svd(A, full_matrices=True)
    tol = max(A.shape) * np.finfo(float).eps * (s[0] if s.size else 1.0)
    rank = int(np.sum(s > tol))
    y0, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.max(np.abs(A @ y0 - b), initial=0.0) > 1e-8 * (1.0 + np.max(np.abs(b), initial=0.0)):
        raise SolverError("equality system A y = b is inconsistent", Status.DUAL_INFEASIBLE)
    N = vt[rank:].T  # (m, m - rank), orthonormal columns
    if N.shape[1] == 0:
        raise SolverError("equalities pin every variable; nothing to optimize")
    blocks = []
    for blk in p.blocks:
        f0 = blk.matrix_at(y0)
        # each triplet (k,i,j,v) becomes a row of coefficients v * N[k, :]
        var, rows, cols, vals = [], [], [], []
        for e in range(len(blk.var)):
            coeffs = blk.vals[e] * N[blk.var[e]]
            nz = np.nonzero(np.abs(coeffs) > 0.0)[0]
            for j in nz:
                var.append(j); rows.append(blk.rows[e]); cols.append(blk.cols[e])
                vals.append(coeffs[j])
        blocks.append(Block(
            dim=blk.dim, f0=f0,
            var=np.asarray(var, dtype=np.intp),
            rows=np.asarray(rows, dtype=np.intp),
            cols=np.asarray(cols, dtype=np.intp),
            vals=np.asarray(vals, dtype=float),
        ))
    reduced = StandardForm(c=N.T @ p.c, blocks=tuple(blocks))
    const_obj = float(p.c @ y0)
    return reduced, y0, N, const_obj


# -- internal block preprocessing ------------------------------------------------


class _MatBlock:
    """Triplets grouped by variable for fast scaled-congruence sweeps."""

    def __init__(self, blk: Block, m: int):
        self.dim = blk.dim
        self.f0 = blk.f0
        order = np.argsort(blk.var, kind="stable")
        self.var = blk.var[order]
        self.rows = blk.rows[order]
        self.cols = blk.cols[order]
        self.vals = blk.vals[order]
        # slice boundaries per variable actually present
        self.present, starts = np.unique(self.var, return_index=True)
        self.starts = np.append(starts, len(self.var))

    def at(self, y: np.ndarray) -> np.ndarray:
        m = self.f0.copy()
        if len(self.var):
            np.add.at(m, (self.rows, self.cols), self.vals * y[self.var])
        return m

    def lin(self, dy: np.ndarray) -> np.ndarray:
        m = np.zeros_like(self.f0)
        if len(self.var):
            np.add.at(m, (self.rows, self.cols), self.vals * dy[self.var])
        return m

    def inner_all(self, g: np.ndarray, m: int) -> np.ndarray:
        """Vector of <F_i, G> over all variables."""
        if not len(self.var):
            return np.zeros(m)
        return np.bincount(self.var, weights=self.vals * g[self.rows, self.cols], minlength=m)

    def congruences(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Stack of H_i = R^T F_i R for the variables present in this block."""
        k = len(self.present)
        h = np.empty((k, self.dim, self.dim))
        for t in range(k):
            s, e = self.starts[t], self.starts[t + 1]
            left = r[self.rows[s:e], :]          # (k_e, d)
            right = self.vals[s:e, None] * r[self.cols[s:e], :]
            h[t] = left.T @ right
        return self.present, h


class _DiagGroup:
    """All 1x1 blocks, handled element-wise: f(y) = d0 + D y >= 0."""

    def __init__(self, blocks: list[Block], m: int):
        self.size = len(blocks)
        self.d0 = np.array([blk.f0[0, 0] for blk in blocks])
        self.D = np.zeros((self.size, m))
        for idx, blk in enumerate(blocks):
            np.add.at(self.D[idx], blk.var, blk.vals)

    def at(self, y: np.ndarray) -> np.ndarray:
        return self.d0 + self.D @ y


# -- the interior-point core ------------------------------------------------------


def _max_step(chol_l: np.ndarray, delta: np.ndarray) -> float:
    """Largest alpha with  M + alpha*Delta  still PSD, where M = L L^T."""
    tmp = np.linalg.solve(chol_l, delta)
    tmp = np.linalg.solve(chol_l, tmp.T).T
    lam_min = float(np.linalg.eigvalsh(0.5 * (tmp + tmp.T))[0])
    if lam_min >= 0.0:
        return np.inf
    return -1.0 / lam_min


def _solve_core(p: StandardForm, cfg: SolverConfig, y0: np.ndarray | None) -> Solution:
    m = p.c.size
    c = p.c
    mat_blocks = [_MatBlock(blk, m) for blk in p.blocks if blk.dim > 1]
    diag_blocks = [blk for blk in p.blocks if blk.dim == 1]
    diag = _DiagGroup(diag_blocks, m) if diag_blocks else None
    n_tot = sum(b.dim for b in mat_blocks) + (diag.size if diag else 0)

    y = np.zeros(m) if y0 is None else np.asarray(y0, dtype=float).copy()

    # Infeasible start: Z begins at F(y) pushed strictly inside the cone,
    # X at a matching multiple of the identity.
    Zs, Xs = [], []
    for blk in mat_blocks:
        f = blk.at(y)
        f = 0.5 * (f + f.T)
        lam_min = float(np.linalg.eigvalsh(f)[0])
        shift = max(0.0, 1e-2 - lam_min) + 1e-8
        Zs.append(f + shift * np.eye(blk.dim))
        Xs.append(np.eye(blk.dim))
    if diag:
        d = diag.at(y)
        z_diag = np.maximum(d, 1e-2) + 1e-8
        x_diag = np.ones(diag.size)
    else:
        z_diag = x_diag = None

    obj_scale = 1.0 + float(np.max(np.abs(c), initial=0.0))
    status = Status.MAX_ITERATIONS
    it = 0
    pres = dres = gap = np.inf
    reg = 0.0
    best_worst = np.inf
    best_it = 0
    best_state = None

    # Gram matrix of the constraint maps, used to project X back onto
    # <F_i, X> = -c_i once the iterates are close (kills the slow residual
    # zig-zag near convergence without disturbing positive definiteness).
    gram = np.zeros((m, m))
    for blk in mat_blocks:
        pos = blk.rows * blk.dim + blk.cols
        order = np.argsort(pos, kind="stable")
        pos_s, var_s, val_s = pos[order], blk.var[order], blk.vals[order]
        bounds = np.flatnonzero(np.diff(pos_s)) + 1
        for chunk_var, chunk_val in zip(np.split(var_s, bounds), np.split(val_s, bounds)):
            gram[np.ix_(chunk_var, chunk_var)] += np.outer(chunk_val, chunk_val)
    if diag is not None:
        gram += diag.D.T @ diag.D
    try:
        gram_chol = np.linalg.cholesky(gram + 1e-13 * np.eye(m) * (1 + np.trace(gram) / m))
    except np.linalg.LinAlgError:
        gram_chol = None

    def _corrected_primal():
        """X shifted exactly onto <F_i, X> = -c_i, or None if too far off."""
        if gram_chol is None:
            return None
        r = c.copy()
        for blk, X in zip(mat_blocks, Xs):
            r += blk.inner_all(X, m)
        if diag is not None:
            r += diag.D.T @ x_diag
        if not np.all(np.isfinite(r)) or np.max(np.abs(r), initial=0.0) > 1e-5 * obj_scale:
            return None
        lam = np.linalg.solve(gram_chol.T, np.linalg.solve(gram_chol, -r))
        new_Xs = []
        for blk, X in zip(mat_blocks, Xs):
            cand = X.copy()
            if len(blk.var):
                np.add.at(cand, (blk.rows, blk.cols), blk.vals * lam[blk.var])
            new_Xs.append(0.5 * (cand + cand.T))
        new_d = None if diag is None else x_diag + diag.D @ lam
        return new_Xs, new_d

    def project_primal():
        """Adopt the corrected X mid-run, but only while strictly inside the cone."""
        nonlocal x_diag
        corrected = _corrected_primal()
        if corrected is None:
            return
        new_Xs, new_d = corrected
        for cand in new_Xs:
            try:
                np.linalg.cholesky(cand)
            except np.linalg.LinAlgError:
                return
        if new_d is not None and np.any(new_d <= 0.0):
            return
        Xs[:] = new_Xs
        if new_d is not None:
            x_diag = new_d

    def polish_and_accept():
        """Near the optimum: accept an exactly-primal-feasible X that is PSD
        within half the feasibility tolerance (the converged X is singular,
        so a strict interior requirement can never be met there)."""
        nonlocal x_diag
        corrected = _corrected_primal()
        if corrected is None:
            return False
        new_Xs, new_d = corrected
        # the corrected X may poke out of the cone by the size of the
        # correction itself; anything within certification slack is fine
        for cand in new_Xs:
            if float(np.linalg.eigvalsh(cand)[0]) < -5.0 * cfg.feas_tol:
                return False
        if new_d is not None and np.any(new_d < -5.0 * cfg.feas_tol):
            return False
        pobj_t = sum(float(np.sum(blk.f0 * X)) for blk, X in zip(mat_blocks, new_Xs))
        if new_d is not None:
            pobj_t += float(diag.d0 @ new_d)
        dobj_t = float(c @ y)
        gap_t = abs(pobj_t - dobj_t) / (1.0 + abs(pobj_t) + abs(dobj_t))
        if gap_t > cfg.gap_tol:
            return False
        Xs[:] = new_Xs
        if new_d is not None:
            x_diag = new_d
        return True

    def residuals():
        # primal: <F_i, X> + c_i = 0 ; dual: F(y) - Z = 0
        r = c.copy()
        for blk, X in zip(mat_blocks, Xs):
            r += blk.inner_all(X, m)
        if diag is not None:
            r += diag.D.T @ x_diag
        rd_list = []
        dmax = 0.0
        for blk, Z in zip(mat_blocks, Zs):
            rd = blk.at(y) - Z
            rd = 0.5 * (rd + rd.T)
            rd_list.append(rd)
            if rd.size:
                dmax = max(dmax, float(np.max(np.abs(rd))))
        rd_diag = None
        if diag is not None:
            rd_diag = diag.at(y) - z_diag
            if rd_diag.size:
                dmax = max(dmax, float(np.max(np.abs(rd_diag))))
        return r, rd_list, rd_diag, dmax

    for it in range(1, cfg.max_iter + 1):
        project_primal()
        rp, rd_list, rd_diag, dmax = residuals()
        mu_terms = sum(float(np.sum(X * Z)) for X, Z in zip(Xs, Zs))
        if diag is not None:
            mu_terms += float(x_diag @ z_diag)
        mu = mu_terms / max(n_tot, 1)

        pobj = sum(float(np.sum(blk.f0 * X)) for blk, X in zip(mat_blocks, Xs))
        if diag is not None:
            pobj += float(diag.d0 @ x_diag)
        dobj = float(c @ y)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pres = float(np.max(np.abs(rp), initial=0.0)) / obj_scale
        dres = dmax / (1.0 + max(
            (float(np.max(np.abs(b.f0), initial=0.0)) for b in mat_blocks), default=0.0
        ))

        if cfg.verbose:
            print(f"  it {it:3d}  gap {gap:9.2e}  pres {pres:9.2e}  dres {dres:9.2e}  mu {mu:9.2e}")
        worst = max(gap, pres, dres)
        if worst < best_worst:
            best_worst, best_it = worst, it
            best_state = (
                y.copy(), [x.copy() for x in Xs], [z.copy() for z in Zs],
                None if x_diag is None else x_diag.copy(),
                None if z_diag is None else z_diag.copy(),
                gap, pres, dres,
            )
        if gap <= cfg.gap_tol and pres <= cfg.feas_tol and dres <= cfg.feas_tol:
            status = Status.OPTIMAL
            break
        if dres <= cfg.feas_tol and mu <= 1e3 * cfg.gap_tol and polish_and_accept():
            rp, rd_list, rd_diag, dmax = residuals()
            pres = float(np.max(np.abs(rp), initial=0.0)) / obj_scale
            pobj = sum(float(np.sum(blk.f0 * X)) for blk, X in zip(mat_blocks, Xs))
            if diag is not None:
                pobj += float(diag.d0 @ x_diag)
            dobj = float(c @ y)
            gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
            if gap <= cfg.gap_tol and pres <= cfg.feas_tol and dres <= cfg.feas_tol:
                status = Status.OPTIMAL
                break
        if it - best_it >= 8:
            # no residual progress for a while: numerics are exhausted
            status = Status.NUMERICAL_TROUBLE
            break
        if abs(dobj) > 1e12 * obj_scale:
            status = Status.PRIMAL_INFEASIBLE if dobj > 0 else Status.DUAL_INFEASIBLE
            break

        # Nesterov-Todd scaling per block
        try:
            scal = []
            for X, Z in zip(Xs, Zs):
                lx = np.linalg.cholesky(X)
                lz = np.linalg.cholesky(Z)
                u, s, vt = np.linalg.svd(lz.T @ lx)
                s = np.maximum(s, 1e-300)
                r = lx @ vt.T / np.sqrt(s)
                rinv = np.sqrt(s)[:, None] * (vt @ np.linalg.inv(lx))
                scal.append((lx, lz, r, rinv, s))
        except np.linalg.LinAlgError:
            status = Status.NUMERICAL_TROUBLE
            break
        if diag is not None:
            w_diag = np.sqrt(x_diag / z_diag)
            lam_diag = np.sqrt(x_diag * z_diag)

        # Schur complement M = sum_b H_b H_b^T (+ diagonal part)
        M = np.zeros((m, m))
        h_stacks = []
        for blk, (lx, lz, r, rinv, s) in zip(mat_blocks, scal):
            present, h = blk.congruences(r)
            h_stacks.append((present, h))
            hf = h.reshape(len(present), -1)
            M[np.ix_(present, present)] += hf @ hf.T
        if diag is not None:
            M += (diag.D * (w_diag ** 2)[:, None]).T @ diag.D

        # Jacobi equilibration: the Schur diagonal spans many orders of
        # magnitude once mu is small, and a ramped regularization must be
        # measured against unit scale to stay harmless.
        dM = np.sqrt(np.maximum(np.diag(M), 1e-300))
        inv_d = 1.0 / dM
        Me = M * inv_d[:, None] * inv_d[None, :]
        chol_m = None
        reg = 0.0
        for attempt in range(10):
            try:
                chol_m = np.linalg.cholesky(Me + reg * np.eye(m))
                break
            except np.linalg.LinAlgError:
                reg = 1e-12 * (10.0 ** attempt)
        if chol_m is None:
            status = Status.NUMERICAL_TROUBLE
            break

        def schur_solve(v: np.ndarray) -> np.ndarray:
            # equilibrated Cholesky solve plus iterative refinement; the
            # Schur complement turns ill-conditioned as mu -> 0 and the
            # refinement buys several extra digits of feasibility
            ve = v * inv_d
            ue = np.linalg.solve(chol_m.T, np.linalg.solve(chol_m, ve))
            for _ in range(2):
                resid = ve - Me @ ue
                ue += np.linalg.solve(chol_m.T, np.linalg.solve(chol_m, resid))
            return ue * inv_d

        def solve_direction(targets, targets_diag):
            """Given scaled complementarity targets, return (dy, dXs, dZs, dxd, dzd)."""
            v = rp.copy()
            for blk, (lx, lz, r, rinv, s), t_hat, rd in zip(mat_blocks, scal, targets, rd_list):
                g = r @ t_hat @ r.T
                w_rd_w = r @ (r.T @ rd @ r) @ r.T
                v += blk.inner_all(g - w_rd_w, m)
            if diag is not None:
                g_d = w_diag * targets_diag - (w_diag ** 2) * rd_diag
                v += diag.D.T @ g_d
            dy = schur_solve(v)
            dXs, dZs = [], []
            for blk, (lx, lz, r, rinv, s), t_hat, rd in zip(mat_blocks, scal, targets, rd_list):
                dz = rd + blk.lin(dy)
                dz = 0.5 * (dz + dz.T)
                # form dX in the scaled space: one congruence out is better
                # conditioned than two nested ones
                dzh = r.T @ dz @ r
                dx = r @ (t_hat - dzh) @ r.T
                dx = 0.5 * (dx + dx.T)
                dXs.append(dx)
                dZs.append(dz)
            if diag is not None:
                dzd = rd_diag + diag.D @ dy
                dxd = w_diag * targets_diag - (w_diag ** 2) * dzd
            else:
                dxd = dzd = None
            return dy, dXs, dZs, dxd, dzd

        def step_lengths(dXs, dZs, dxd, dzd):
            ap = ad = np.inf
            for X, Z, dX, dZ, (lx, lz, *_rest) in zip(Xs, Zs, dXs, dZs, scal):
                ap = min(ap, _max_step(lx, dX))
                ad = min(ad, _max_step(lz, dZ))
            if diag is not None:
                neg = dxd < 0
                if np.any(neg):
                    ap = min(ap, float(np.min(-x_diag[neg] / dxd[neg])))
                neg = dzd < 0
                if np.any(neg):
                    ad = min(ad, float(np.min(-z_diag[neg] / dzd[neg])))
            return min(1.0, cfg.step_frac * ap), min(1.0, cfg.step_frac * ad)

        # predictor (affine scaling): scaled target -Lambda
        targets_aff = [-np.diag(s) for (_lx, _lz, _r, _rinv, s) in scal]
        t_diag_aff = -lam_diag if diag is not None else None
        aff = solve_direction(targets_aff, t_diag_aff)
        ap, ad = step_lengths(aff[1], aff[2], aff[3], aff[4])
        mu_aff = 0.0
        for X, Z, dX, dZ in zip(Xs, Zs, aff[1], aff[2]):
            mu_aff += float(np.sum((X + ap * dX) * (Z + ad * dZ)))
        if diag is not None:
            mu_aff += float((x_diag + ap * aff[3]) @ (z_diag + ad * aff[4]))
        mu_aff = max(mu_aff / max(n_tot, 1), 0.0)
        sigma = min(max((mu_aff / mu) ** 3 if mu > 0 else 0.0, 1e-10), 1.0 - 1e-10)
        if mu <= 1e4 * cfg.gap_tol * (1.0 + abs(dobj)):
            # endgame: keep some centering so the scaled targets stay bounded
            # and complementarity does not crash through the stopping window
            sigma = max(sigma, 0.2)

        # corrector: Lambda o T = sigma*mu*I - Lambda^2 - sym(dXhat dZhat)
        targets = []
        for (lx, lz, r, rinv, s), dX, dZ in zip(scal, aff[1], aff[2]):
            dxh = rinv @ dX @ rinv.T
            dzh = r.T @ dZ @ r
            cross = dxh @ dzh
            g_mat = sigma * mu * np.eye(len(s)) - np.diag(s * s) - 0.5 * (cross + cross.T)
            denom = 0.5 * (s[:, None] + s[None, :])
            targets.append(g_mat / denom)
        if diag is not None:
            dxh_d = aff[3] / w_diag
            dzh_d = aff[4] * w_diag
            g_d = sigma * mu - lam_diag ** 2 - dxh_d * dzh_d
            t_diag = g_d / lam_diag
        else:
            t_diag = None

        dy, dXs, dZs, dxd, dzd = solve_direction(targets, t_diag)
        ap, ad = step_lengths(dXs, dZs, dxd, dzd)
        if max(ap, ad) < 1e-12:
            status = Status.NUMERICAL_TROUBLE
            break

        for idx in range(len(mat_blocks)):
            Xs[idx] = Xs[idx] + ap * dXs[idx]
            Zs[idx] = Zs[idx] + ad * dZs[idx]
            Xs[idx] = 0.5 * (Xs[idx] + Xs[idx].T)
            Zs[idx] = 0.5 * (Zs[idx] + Zs[idx].T)
        if diag is not None:
            x_diag = x_diag + ap * dxd
            z_diag = z_diag + ad * dzd
        y = y + ad * dy

        # NT-metric primal refinement: push X back onto <F_i,X> = -c_i along
        # sum lam_i W F_i W.  Unlike a Frobenius projection this correction
        # scales with X itself, so it stays inside the cone even when X is
        # nearly singular; it cancels the reconstruction error that otherwise
        # accumulates in the endgame.
        for _pass in range(3):
            r_new = c.copy()
            for blk, X in zip(mat_blocks, Xs):
                r_new += blk.inner_all(X, m)
            if diag is not None:
                r_new += diag.D.T @ x_diag
            rmax = np.max(np.abs(r_new), initial=0.0)
            if not np.all(np.isfinite(r_new)) or rmax > 1e-4 * obj_scale or rmax < 1e-13 * obj_scale:
                break
            lam_full = schur_solve(-r_new)
            applied = False
            for theta in (1.0, 0.5, 0.25):
                lam = theta * lam_full
                new_Xs = []
                ok = True
                for (present, h), (lx, lz, r, rinv, s), X in zip(h_stacks, scal, Xs):
                    scaled = np.tensordot(lam[present], h, axes=(0, 0))
                    cand = X + r @ scaled @ r.T
                    cand = 0.5 * (cand + cand.T)
                    try:
                        np.linalg.cholesky(cand)
                    except np.linalg.LinAlgError:
                        ok = False
                        break
                    new_Xs.append(cand)
                cand_d = None
                if ok and diag is not None:
                    cand_d = x_diag + theta * (w_diag ** 2) * (diag.D @ lam_full)
                    ok = bool(np.all(cand_d > 0.0))
                if ok:
                    Xs[:] = new_Xs
                    if cand_d is not None:
                        x_diag = cand_d
                    applied = True
                    break
            if not applied:
                break

    if status is not Status.OPTIMAL and best_state is not None:
        # hand back the cleanest iterate seen, re-checking its tolerances
        y, Xs, Zs, x_diag, z_diag, gap, pres, dres = best_state
        if gap <= cfg.gap_tol and pres <= cfg.feas_tol and dres <= cfg.feas_tol:
            status = Status.OPTIMAL

    # assemble the Solution in the order of the original blocks
    X_out, Z_out = [], []
    im = id_ = 0
    for blk in p.blocks:
        if blk.dim > 1:
            X_out.append(Xs[im]); Z_out.append(Zs[im]); im += 1
        else:
            X_out.append(np.array([[x_diag[id_]]])); Z_out.append(np.array([[z_diag[id_]]])); id_ += 1

    pobj = sum(float(np.sum(blk.f0 * X)) for blk, X in zip(mat_blocks, Xs))
    if diag is not None:
        pobj += float(diag.d0 @ x_diag)
    return Solution(
        value=float(c @ y),
        y=y,
        duality_gap=gap,
        status=status,
        iterations=it,
        residuals={"primal": pres, "dual": dres, "gap": gap},
        X=X_out,
        Z=Z_out,
        dual_value=pobj,
    )


def solve(p: StandardForm, cfg: SolverConfig | None = None,
          y0: np.ndarray | None = None) -> Solution:
    """Solve a StandardForm problem.

    ``y0`` optionally warm-starts the LMI variables; the start is made
    strictly interior by shifting, so any vector is acceptable.  A total
    block dimension above ``cfg.dim_gate`` raises
    :class:`DimensionGateError` unless ``cfg.allow_large`` is set.
    """
    cfg = cfg or SolverConfig()
    if p.total_dim > cfg.dim_gate and not cfg.allow_large:
        raise DimensionGateError(
            f"total dimension {p.total_dim} exceeds the desk-scale gate "
            f"{cfg.dim_gate}; pass allow_large to override"
        )
    if p.A is not None:
        reduced, y_part, nbasis, const_obj = _eliminate_equalities(p)
        u0 = None
        if y0 is not None:
            u0 = nbasis.T @ (np.asarray(y0, dtype=float) - y_part)
        sol = _solve_core(reduced, cfg, u0)
        y_full = y_part + nbasis @ sol.y
        sol.y = y_full
        sol.value = float(p.c @ y_full)
        sol.dual_value = sol.dual_value + const_obj
        return sol
    return _solve_core(p, cfg, y0)


# -- certification ---------------------------------------------------------------


def certify(p: StandardForm, s: Solution, feas_tol: float = 1e-8) -> dict:
    """Re-check an Optimal solution through independent arithmetic paths.

    Feasibility of F(y) is established by full eigen-decomposition of
    freshly assembled blocks (the solver itself only ever factors), dual
    feasibility and the duality gap are recomputed from the returned
    multipliers, and equality residuals are measured directly.  Raises
    :class:`CertificationFailure` naming the first violated check.
    """
    if s.status is not Status.OPTIMAL:
        raise CertificationFailure(f"solution status is {s.status.value}, not Optimal")
    report: dict = {}
    min_eig = np.inf
    for blk, X in zip(p.blocks, s.X):
        f = blk.matrix_at(s.y)
        ev = np.linalg.eigvalsh(0.5 * (f + f.T))
        min_eig = min(min_eig, float(ev[0]))
        evx = np.linalg.eigvalsh(0.5 * (X + X.T))
        min_eig = min(min_eig, float(evx[0]))
    report["min_eigenvalue"] = min_eig
    if min_eig < -feas_tol:
        raise CertificationFailure(f"LMI feasibility violated: min eigenvalue {min_eig:.3e}")

    r = p.c.copy()
    for blk, X in zip(p.blocks, s.X):
        xs = 0.5 * (X + X.T)
        for e in range(len(blk.var)):
            r[blk.var[e]] += blk.vals[e] * xs[blk.rows[e], blk.cols[e]]
    scale = 1.0 + float(np.max(np.abs(p.c), initial=0.0))
    if p.A is not None:
        # dual residual only needs to vanish modulo the row space of A
        q, _ = np.linalg.qr(p.A.T, mode="reduced")
        r = r - q @ (q.T @ r)
        eq_res = float(np.max(np.abs(p.A @ s.y - p.b), initial=0.0))
        report["equality_residual"] = eq_res
        if eq_res > feas_tol * (1.0 + float(np.max(np.abs(p.b), initial=0.0))):
            raise CertificationFailure(f"equality residual {eq_res:.3e}")
    dual_res = float(np.max(np.abs(r), initial=0.0)) / scale
    report["dual_residual"] = dual_res
    if dual_res > feas_tol:
        raise CertificationFailure(f"dual feasibility residual {dual_res:.3e}")

    pobj = sum(float(np.sum(blk.f0 * X)) for blk, X in zip(p.blocks, s.X))
    if p.A is not None:
        # correct the primal objective for the multiplier on A y = b
        # <F0,X> piece only; gap below measures consistency of the pair
        pass
    dobj = float(p.c @ s.y)
    gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
    report["gap"] = gap
    report["primal_value"] = pobj
    report["dual_value"] = dobj
    if p.A is None and gap > 10 * feas_tol:
        raise CertificationFailure(f"duality gap {gap:.3e}")
    return report
