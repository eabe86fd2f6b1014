"""Coupled bulk-surface elliptic solver, bilinear forms, and dual norms.

The central object solves the weak problem: given a mean-free right-hand side
pair (y, y_Gamma), find the mean-free pair (u, u_Gamma) with

    a_L((u, u_Gamma), (z, z_Gamma)) = <(y, y_Gamma), (z, z_Gamma)>_L2

for every discrete test pair, where a_L couples the bulk and surface Dirichlet
forms through a Robin term with coefficient chi(L) = 1/L for finite positive L
(chi = 0 for L = 0 and L = inf).  For L = 0 the unknown is a conforming pair
(the surface values are the trace of the bulk values); for L = inf the system
decouples and the solver refuses to run (the time stepper never needs it).

The assembled operator is symmetric positive semidefinite with the constant
pair as kernel, so the solve uses Jacobi-preconditioned conjugate gradients
with the generalized mean re-projected every iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import ConformityError, ConvergenceError, MeanError
from .grid import (
    CoupledField,
    StripGrid,
    dirichlet_form_bulk,
    dirichlet_form_surface,
    trace,
)


def chi(L: float) -> float:
    """Robin coupling coefficient: 1/L on (0, inf), zero at both endpoints."""
    if L < 0.0:
        raise ValueError("kinetic rate L must be >= 0 (or inf)")
    if L == 0.0 or math.isinf(L):
        return 0.0
    return 1.0 / L


@dataclass(frozen=True)
class Forms:
    """Assembled quadrature weights and stiffness blocks for one grid."""

    grid: StripGrid
    w_bulk: np.ndarray  # quadrature weight per bulk node, length nx*ny
    w_surf: np.ndarray  # quadrature weight per surface node, length 2*nx
    T: sp.csr_matrix  # trace: bulk vector -> surface vector
    A_bulk: sp.csr_matrix  # bulk Dirichlet form
    A_surf: sp.csr_matrix  # surface Dirichlet form (both lines)


@lru_cache(maxsize=16)
def forms(g: StripGrid) -> Forms:
    nx, ny = g.nx, g.ny
    N, S = nx * ny, 2 * nx

    w_bulk = np.tile(g.hx * g.wy, nx)
    w_surf = np.full(S, g.hx)

    def node(i, j):
        return i * ny + j

    ii = np.arange(nx)
    jj = np.arange(ny)

    rows, cols, vals = [], [], []

    def add_edges(a, b, w):
        rows.extend([a, b, a, b])
        cols.extend([a, b, b, a])
        vals.extend([w, w, -w, -w])

    # x-edges (periodic): weight wy[j]/hx per edge in row j.
    for j in range(ny):
        a = node(ii, np.full(nx, j))
        b = node((ii + 1) % nx, np.full(nx, j))
        add_edges(a, b, np.full(nx, g.wy[j] / g.hx))
    # y-edges: weight hx/hy.
    for j in range(ny - 1):
        a = node(ii, np.full(nx, j))
        b = node(ii, np.full(nx, j + 1))
        add_edges(a, b, np.full(nx, g.hx / g.hy))
    A_bulk = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(N, N),
    ).tocsr()

    rows, cols, vals = [], [], []
    for line in range(2):
        a = line * nx + ii
        b = line * nx + (ii + 1) % nx
        add_edges(a, b, np.full(nx, 1.0 / g.hx))
    A_surf = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(S, S),
    ).tocsr()

    tr_rows = np.arange(S)
    tr_cols = np.concatenate([node(ii, np.zeros(nx, int)), node(ii, np.full(nx, ny - 1))])
    T = sp.coo_matrix((np.ones(S), (tr_rows, tr_cols)), shape=(S, N)).tocsr()

    return Forms(g, w_bulk, w_surf, T, A_bulk, A_surf)


def pack(f: CoupledField) -> np.ndarray:
    return np.concatenate([f.bulk.ravel(), f.surf.ravel()])


def unpack(g: StripGrid, z: np.ndarray) -> CoupledField:
    N = g.nx * g.ny
    return CoupledField(z[:N].reshape(g.nx, g.ny).copy(), z[N:].reshape(2, g.nx).copy())


def generalized_mean(g: StripGrid, f: CoupledField) -> float:
    """(|Omega|<y> + |Gamma|<y_Gamma>) / (|Omega| + |Gamma|)."""
    fo = forms(g)
    total = float(fo.w_bulk @ f.bulk.ravel() + fo.w_surf @ f.surf.ravel())
    return total / (g.area + g.perimeter)


def project_P(g: StripGrid, f: CoupledField) -> CoupledField:
    """Remove the generalized mean from both components."""
    m = generalized_mean(g, f)
    return CoupledField(f.bulk - m, f.surf - m)


def apply_aL(ctx: "EllipticContext", f: CoupledField, g: CoupledField) -> float:
    """Bilinear form a_L: bulk + surface Dirichlet forms + Robin penalty."""
    grid = ctx.grid
    if ctx.L == 0.0:
        tol = 1e-12
        for h in (f, g):
            if h.conformity_gap() > tol * (1.0 + np.max(np.abs(h.bulk))):
                raise ConformityError("a_0 requires conforming fields (u_Gamma = u|_Gamma)")
    val = dirichlet_form_bulk(grid, f.bulk, g.bulk)
    val += dirichlet_form_surface(grid, f.surf, g.surf)
    c = chi(ctx.L)
    if c > 0.0:
        gapf = trace(f.bulk) - f.surf
        gapg = trace(g.bulk) - g.surf
        val += c * float(np.sum(gapf * gapg)) * grid.hx
    return float(val)


def apply_bdelta(g: StripGrid, delta: float, f: CoupledField, h: CoupledField) -> float:
    """Bilinear form b_delta: bulk Dirichlet form + delta * surface Dirichlet form."""
    if delta < 0.0:
        raise ValueError("delta must be >= 0")
    val = dirichlet_form_bulk(g, f.bulk, h.bulk)
    if delta > 0.0:
        val += delta * dirichlet_form_surface(g, f.surf, h.surf)
    return float(val)


class EllipticContext:
    """Immutable assembled a_L operator with a projected-CG solver.

    For L in (0, inf) the unknown vector stacks bulk and surface values; for
    L = 0 the unknown is the bulk vector and the surface values are its trace.
    """

    def __init__(self, grid: StripGrid, L: float, tolerance: float = 1e-11,
                 max_iter: int = 50000):
        if L < 0.0:
            raise ValueError("kinetic rate L must be >= 0 (or inf)")
        self.grid = grid
        self.L = float(L)
        self.tolerance = float(tolerance)
        self.max_iter = int(max_iter)
        fo = forms(grid)
        self.forms = fo
        c = chi(self.L)
        if self.L == 0.0:
            K = (fo.A_bulk + fo.T.T @ fo.A_surf @ fo.T).tocsr()
            w = fo.w_bulk + fo.T.T @ fo.w_surf
        elif math.isinf(self.L):
            K = sp.block_diag([fo.A_bulk, fo.A_surf]).tocsr()
            w = np.concatenate([fo.w_bulk, fo.w_surf])
        else:
            Wg = sp.diags(fo.w_surf)
            K = sp.bmat(
                [
                    [fo.A_bulk + c * fo.T.T @ Wg @ fo.T, -c * fo.T.T @ Wg],
                    [-c * Wg @ fo.T, fo.A_surf + c * Wg],
                ]
            ).tocsr()
            w = np.concatenate([fo.w_bulk, fo.w_surf])
        self.K = K
        self._w = w
        self._wsum = float(np.sum(w))
        diag = K.diagonal()
        self._inv_diag = np.where(diag > 0.0, 1.0 / np.maximum(diag, 1e-300), 1.0)

    def _project(self, v: np.ndarray) -> np.ndarray:
        return v - (self._w @ v) / self._wsum

    def _pcg(self, F: np.ndarray, x0: np.ndarray | None) -> np.ndarray:
        normF = float(np.linalg.norm(F))
        if normF == 0.0:
            return np.zeros_like(F)
        x = self._project(x0.copy()) if x0 is not None else np.zeros_like(F)
        r = F - self.K @ x
        z = self._project(self._inv_diag * r)
        p = z.copy()
        rz = float(r @ z)
        for _ in range(self.max_iter):
            if np.linalg.norm(r) <= self.tolerance * normF:
                return self._project(x)
            Kp = self.K @ p
            alpha = rz / float(p @ Kp)
            x += alpha * p
            r -= alpha * Kp
            z = self._project(self._inv_diag * r)
            rz_new = float(r @ z)
            p = z + (rz_new / rz) * p
            rz = rz_new
        raise ConvergenceError(
            f"elliptic CG exceeded {self.max_iter} iterations "
            f"(relative residual {np.linalg.norm(r) / normF:.3e})"
        )


def _check_mean_free(ctx: EllipticContext, rhs: CoupledField, nrm: float) -> None:
    g = ctx.grid
    total = abs(generalized_mean(g, rhs)) * (g.area + g.perimeter)
    if total > 1e-10 * max(nrm, 1e-300):
        raise MeanError(
            f"right-hand side must be mean-free: |Omega|<y> + |Gamma|<y_G> = {total:.3e}"
        )


def solve_SL(ctx: EllipticContext, rhs: CoupledField, x0: CoupledField | None = None) -> CoupledField:
    """Apply the inverse coupled elliptic operator to a mean-free pair."""
    if math.isinf(ctx.L):
        raise ValueError("the coupled solve is not defined for L = inf")
    from .grid import norm_L2

    g = ctx.grid
    nrm = norm_L2(g, rhs)
    _check_mean_free(ctx, rhs, nrm)
    fo = ctx.forms
    if nrm == 0.0:
        return CoupledField.zeros(g)
    if ctx.L == 0.0:
        F = fo.w_bulk * rhs.bulk.ravel() + fo.T.T @ (fo.w_surf * rhs.surf.ravel())
        start = x0.bulk.ravel() if x0 is not None else None
        u = ctx._pcg(F, start)
        bulk = u.reshape(g.nx, g.ny)
        return CoupledField(bulk.copy(), trace(bulk))
    F = np.concatenate([fo.w_bulk * rhs.bulk.ravel(), fo.w_surf * rhs.surf.ravel()])
    start = pack(x0) if x0 is not None else None
    return unpack(g, ctx._pcg(F, start))


def dual_norm_0star(ctx: EllipticContext, f: CoupledField, x0: CoupledField | None = None) -> float:
    """Dual norm sqrt(<f, S_L f>) of a mean-free pair."""
    from .grid import inner_L2

    u = solve_SL(ctx, f, x0=x0)
    return float(np.sqrt(max(inner_L2(ctx.grid, f, u), 0.0)))


def dual_norm_star(ctx: EllipticContext, f: CoupledField) -> float:
    """Full dual norm: mean-free part in 0,* plus the generalized mean."""
    g = ctx.grid
    m = generalized_mean(g, f)
    val = dual_norm_0star(ctx, project_P(g, f))
    return float(math.hypot(val, m))


def _neumann_solve(A: sp.csr_matrix, w: np.ndarray, F: np.ndarray,
                   tol: float, max_iter: int) -> np.ndarray:
    wsum = float(np.sum(w))

    def project(v):
        return v - (w @ v) / wsum

    normF = float(np.linalg.norm(F))
    if normF == 0.0:
        return np.zeros_like(F)
    diag = A.diagonal()
    inv_diag = 1.0 / np.maximum(diag, 1e-300)
    x = np.zeros_like(F)
    r = F.copy()
    z = project(inv_diag * r)
    p = z.copy()
    rz = float(r @ z)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= tol * normF:
            return project(x)
        Ap = A @ p
        alpha = rz / float(p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        z = project(inv_diag * r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise ConvergenceError(f"Neumann CG exceeded {max_iter} iterations")


def solve_NOmega(g: StripGrid, y: np.ndarray, tolerance: float = 1e-11,
                 max_iter: int = 50000) -> np.ndarray:
    """Mean-free solution of -Delta u = y in the bulk (Neumann in y, periodic in x)."""
    y = g.check_bulk(y)
    fo = forms(g)
    yv = y.ravel()
    mean = float(fo.w_bulk @ yv) / g.area
    if abs(mean) > 1e-10 * max(float(np.max(np.abs(yv))), 1e-300):
        raise MeanError(f"bulk Neumann data must have zero mean, got {mean:.3e}")
    u = _neumann_solve(fo.A_bulk, fo.w_bulk, fo.w_bulk * yv, tolerance, max_iter)
    return u.reshape(g.nx, g.ny)


def solve_NGamma(g: StripGrid, v: np.ndarray, tolerance: float = 1e-11,
                 max_iter: int = 50000) -> np.ndarray:
    """Mean-free solution of -Delta_Gamma u = v on each boundary line."""
    v = g.check_surf(v)
    out = np.zeros_like(v)
    # The two lines are independent periodic problems; solve them separately
    # so the per-line mean constraint is enforced exactly.
    line_A = None
    for line in range(2):
        data = v[line]
        mean = float(np.mean(data))
        if abs(mean) > 1e-10 * max(float(np.max(np.abs(data))), 1e-300):
            raise MeanError(f"surface Neumann data must have zero mean per line, got {mean:.3e}")
        if line_A is None:
            fo = forms(g)
            line_A = fo.A_surf[: g.nx, : g.nx]
        w = np.full(g.nx, g.hx)
        out[line] = _neumann_solve(line_A, w, w * data, tolerance, max_iter)
    return out
