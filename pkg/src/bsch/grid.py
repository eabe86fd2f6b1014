"""Periodic-strip grid, coupled bulk/surface fields, and difference operators.

The domain is the strip (R/lx Z) x (0,1): periodic in x with nx uniform nodes
(hx = lx/nx), ny nodes in y including both boundary lines (hy = 1/(ny-1)).
The boundary consists of two periodic lines (bottom j=0, top j=ny-1).  Bulk
quadrature is trapezoid in y and uniform in x; surface quadrature is uniform.
These choices make the discrete summation-by-parts identity exact, which the
weak-form assembly in the elliptic and stepper modules relies on.

Conventions:

* bulk arrays have shape (nx, ny), index [i, j] at x_i = i*hx, y_j = j*hy;
* surf arrays have shape (2, nx): row 0 bottom line, row 1 top line;
* ``laplacian_bulk`` owns the full 5-point stencil on interior rows and only
  the tangential (x) part on boundary rows; the normal closure there belongs
  to the caller's boundary condition and is assembled by the weak form;
* ``boundary_flux`` is the first-order outward flux under which the discrete
  Green identity is exact; ``normal_derivative`` is the second-order one-sided
  trace derivative used for reporting (exact on quadratics in y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


@dataclass(frozen=True)
class StripGrid:
    nx: int = 64
    ny: int = 33
    lx: float = 1.0

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise ValueError("grid needs nx >= 4 and ny >= 4")
        if not self.lx > 0.0:
            raise ValueError("grid needs lx > 0")

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny - 1)

    @property
    def area(self) -> float:
        """|Omega| = lx * 1."""
        return self.lx

    @property
    def perimeter(self) -> float:
        """|Gamma| = two periodic lines of length lx."""
        return 2.0 * self.lx

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.hx

    @property
    def y(self) -> np.ndarray:
        return np.arange(self.ny) * self.hy

    @property
    def wy(self) -> np.ndarray:
        """Trapezoid weights in y (hy inside, hy/2 on the boundary rows)."""
        w = np.full(self.ny, self.hy)
        w[0] = w[-1] = 0.5 * self.hy
        return w

    @property
    def bulk_weights(self) -> np.ndarray:
        """Quadrature weight of every bulk node, shape (nx, ny)."""
        return np.broadcast_to(self.hx * self.wy, (self.nx, self.ny)).copy()

    def check_bulk(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.nx, self.ny):
            raise ShapeError(f"bulk array must have shape {(self.nx, self.ny)}, got {u.shape}")
        return u

    def check_surf(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (2, self.nx):
            raise ShapeError(f"surf array must have shape {(2, self.nx)}, got {v.shape}")
        return v


def trace(u: np.ndarray) -> np.ndarray:
    """Boundary rows of a bulk array as a surf array (bottom, top)."""
    return np.stack([u[:, 0], u[:, -1]])


@dataclass
class CoupledField:
    """A bulk field paired with a surface field.

    The pair is *conforming* when the surface values are the trace of the
    bulk values; fields produced by the solver are conforming by
    construction, generic right-hand sides need not be.
    """

    bulk: np.ndarray
    surf: np.ndarray

    @classmethod
    def zeros(cls, g: StripGrid) -> "CoupledField":
        return cls(np.zeros((g.nx, g.ny)), np.zeros((2, g.nx)))

    @classmethod
    def constant(cls, g: StripGrid, bulk: float, surf: float | None = None) -> "CoupledField":
        s = bulk if surf is None else surf
        return cls(np.full((g.nx, g.ny), float(bulk)), np.full((2, g.nx), float(s)))

    @classmethod
    def from_bulk(cls, bulk: np.ndarray) -> "CoupledField":
        bulk = np.asarray(bulk, dtype=float)
        return cls(bulk.copy(), trace(bulk))

    def copy(self) -> "CoupledField":
        return CoupledField(self.bulk.copy(), self.surf.copy())

    def conformity_gap(self) -> float:
        return float(np.max(np.abs(trace(self.bulk) - self.surf)))

    def __add__(self, other: "CoupledField") -> "CoupledField":
        return CoupledField(self.bulk + other.bulk, self.surf + other.surf)

    def __sub__(self, other: "CoupledField") -> "CoupledField":
        return CoupledField(self.bulk - other.bulk, self.surf - other.surf)

    def __mul__(self, a: float) -> "CoupledField":
        return CoupledField(self.bulk * a, self.surf * a)

    __rmul__ = __mul__


def laplacian_bulk(g: StripGrid, u: np.ndarray) -> np.ndarray:
    """5-point Laplacian on interior rows; tangential part only on boundary rows.

    The normal second difference at the boundary rows is owned by the caller's
    boundary closure (the stepper and elliptic modules assemble those rows from
    the weak form), so only the periodic x-part appears there.
    """
    u = g.check_bulk(u)
    out = np.empty_like(u)
    ddx = (np.roll(u, -1, axis=0) - 2.0 * u + np.roll(u, 1, axis=0)) / g.hx**2
    out[:] = ddx
    out[:, 1:-1] += (u[:, 2:] - 2.0 * u[:, 1:-1] + u[:, :-2]) / g.hy**2
    return out


def laplacian_surface(g: StripGrid, v: np.ndarray) -> np.ndarray:
    """Periodic 3-point second difference along each boundary line."""
    v = g.check_surf(v)
    return (np.roll(v, -1, axis=1) - 2.0 * v + np.roll(v, 1, axis=1)) / g.hx**2


def normal_derivative(g: StripGrid, u: np.ndarray) -> np.ndarray:
    """Second-order one-sided outward normal derivative on each line.

    Outward normal is -e_y on the bottom line and +e_y on the top line;
    exact for polynomials of degree <= 2 in y.
    """
    u = g.check_bulk(u)
    bottom = (3.0 * u[:, 0] - 4.0 * u[:, 1] + u[:, 2]) / (2.0 * g.hy)
    top = (3.0 * u[:, -1] - 4.0 * u[:, -2] + u[:, -3]) / (2.0 * g.hy)
    return np.stack([bottom, top])


def boundary_flux(g: StripGrid, u: np.ndarray) -> np.ndarray:
    """First-order outward flux (the one under which Green's identity is exact)."""
    u = g.check_bulk(u)
    bottom = (u[:, 0] - u[:, 1]) / g.hy
    top = (u[:, -1] - u[:, -2]) / g.hy
    return np.stack([bottom, top])


def means(g: StripGrid, f: CoupledField) -> tuple:
    """Component means (bulk trapezoid-in-y/uniform-in-x, surface uniform)."""
    bulk = float(np.sum(f.bulk * g.bulk_weights) / g.area)
    surf = float(np.sum(f.surf) * g.hx / g.perimeter)
    return bulk, surf


def inner_L2(g: StripGrid, a: CoupledField, b: CoupledField) -> float:
    """Quadrature inner product of coupled fields (bulk plus surface part)."""
    bulk = np.sum(a.bulk * b.bulk * g.bulk_weights)
    surf = np.sum(a.surf * b.surf) * g.hx
    return float(bulk + surf)


def norm_L2(g: StripGrid, a: CoupledField) -> float:
    return float(np.sqrt(max(inner_L2(g, a, a), 0.0)))


def dirichlet_form_bulk(g: StripGrid, u: np.ndarray, w: np.ndarray) -> float:
    """Discrete bulk Dirichlet form: first differences with matching quadrature."""
    u = g.check_bulk(u)
    w = g.check_bulk(w)
    dux = np.roll(u, -1, axis=0) - u
    dwx = np.roll(w, -1, axis=0) - w
    xpart = np.sum(dux * dwx * (g.wy / g.hx))
    duy = u[:, 1:] - u[:, :-1]
    dwy = w[:, 1:] - w[:, :-1]
    ypart = np.sum(duy * dwy) * (g.hx / g.hy)
    return float(xpart + ypart)


def dirichlet_form_surface(g: StripGrid, v: np.ndarray, w: np.ndarray) -> float:
    """Discrete surface Dirichlet form, both lines, periodic in x."""
    v = g.check_surf(v)
    w = g.check_surf(w)
    dv = np.roll(v, -1, axis=1) - v
    dw = np.roll(w, -1, axis=1) - w
    return float(np.sum(dv * dw) / g.hx)


def fourier_symbol(g: StripGrid, k: int) -> float:
    """Symbol of the periodic second difference for the mode cos(2*pi*k*x/lx)."""
    return (2.0 / g.hx**2) * (1.0 - np.cos(2.0 * np.pi * k / g.nx))
