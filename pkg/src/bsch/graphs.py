"""Maximal monotone graphs, their resolvents, and regularized potentials.

A potential F = betahat + pihat is split into a convex part betahat (whose
subdifferential is the monotone graph beta) and a smooth concave remainder
pihat with Lipschitz derivative pi.  The built-in kinds are

* ``logarithmic``    F(r) = (1+r)ln(1+r) + (1-r)ln(1-r) - c1*r^2,  r in (-1,1)
* ``double-obstacle``F(r) = c2*(1-r^2) on [-1,1], +inf outside
* ``regular-quartic``F(r) = (r^2-1)^2/4 with the split beta(r)=r^3, pi(r)=-r
* ``linear``         beta(r) = slope*r, no concave remainder
* ``custom``         user-supplied callables

All pointwise operations accept scalars or numpy arrays and are vectorized.
``resolvent`` solves s + lam*beta(s) = r by a bracketed, safeguarded Newton
iteration (absolute residual below 1e-13, at most 200 iterations); kinds with
a closed-form resolvent bypass the iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError, DomainError

KINDS = ("logarithmic", "double-obstacle", "regular-quartic", "linear", "custom")

RESOLVENT_RTOL = 1e-13
RESOLVENT_MAX_ITER = 200
# Brackets for open intervals stop one representable step inside the endpoint.
_EDGE = 1e-15


@dataclass(frozen=True)
class GraphSpec:
    """A monotone graph together with its concave remainder.

    ``rho`` and ``c0`` are the compatibility constants used when this graph
    plays the boundary role: the bulk Yosida regularization must satisfy
    |beta_eps(r)| <= rho*|beta_{Gamma,eps}(r)| + c0 for all r.
    """

    kind: str
    c1: float = 2.0
    c2: float = 1.0
    slope: float = 1.0
    rho: float = 1.0
    c0: float = 0.0
    beta_fn: Optional[Callable] = None
    beta_prime_fn: Optional[Callable] = None
    betahat_fn: Optional[Callable] = None
    pi_fn: Optional[Callable] = None
    pihat_fn: Optional[Callable] = None
    custom_domain: tuple = (-math.inf, math.inf)
    custom_lipschitz_pi: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown graph kind {self.kind!r}")
        if self.kind == "logarithmic" and not self.c1 > 1.0:
            raise DomainError("logarithmic graph requires c1 > 1")
        if self.kind == "double-obstacle" and not self.c2 > 0.0:
            raise DomainError("double-obstacle graph requires c2 > 0")
        if self.kind == "linear" and self.slope < 0.0:
            raise DomainError("linear graph requires slope >= 0")
        if not self.rho > 0.0:
            raise DomainError("compatibility weight rho must be > 0")
        if self.c0 < 0.0:
            raise DomainError("compatibility offset c0 must be >= 0")
        if self.kind == "custom":
            for name in ("beta_fn", "beta_prime_fn", "betahat_fn"):
                if getattr(self, name) is None:
                    raise DomainError(f"custom graph requires {name}")

    @property
    def domain(self) -> tuple:
        """Interval D(beta) as a (lo, hi) pair; infinite for whole-line graphs."""
        if self.kind in ("logarithmic", "double-obstacle"):
            return (-1.0, 1.0)
        if self.kind == "custom":
            return tuple(self.custom_domain)
        return (-math.inf, math.inf)

    @property
    def domain_closed(self) -> bool:
        """Whether the endpoints of a bounded domain belong to D(beta)."""
        return self.kind == "double-obstacle"

    @property
    def lipschitz_pi(self) -> float:
        """Lipschitz constant of the concave-part derivative pi."""
        if self.kind == "logarithmic":
            return 2.0 * self.c1
        if self.kind == "double-obstacle":
            return 2.0 * self.c2
        if self.kind == "regular-quartic":
            return 1.0
        if self.kind == "custom":
            return self.custom_lipschitz_pi
        return 0.0


def logarithmic(c1: float = 2.0, rho: float = 1.0, c0: float = 0.0) -> GraphSpec:
    return GraphSpec(kind="logarithmic", c1=c1, rho=rho, c0=c0)


def double_obstacle(c2: float = 1.0, rho: float = 1.0, c0: float = 0.0) -> GraphSpec:
    return GraphSpec(kind="double-obstacle", c2=c2, rho=rho, c0=c0)


def regular_quartic(rho: float = 1.0, c0: float = 0.0) -> GraphSpec:
    return GraphSpec(kind="regular-quartic", rho=rho, c0=c0)


def linear(slope: float = 1.0, rho: float = 1.0, c0: float = 0.0) -> GraphSpec:
    return GraphSpec(kind="linear", slope=slope, rho=rho, c0=c0)


@dataclass(frozen=True)
class PotentialPair:
    """Bulk and boundary potentials; compatibility constants come from ``boundary``."""

    bulk: GraphSpec
    boundary: GraphSpec

    @property
    def rho(self) -> float:
        return self.boundary.rho

    @property
    def c0(self) -> float:
        return self.boundary.c0


def _as_array(r):
    arr = np.asarray(r, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


def _beta_smooth(spec: GraphSpec, s):
    """Single-valued beta on the domain interior (used by the Newton solve)."""
    if spec.kind == "logarithmic":
        return np.log1p(s) - np.log1p(-s)
    if spec.kind == "double-obstacle":
        return np.zeros_like(s)
    if spec.kind == "regular-quartic":
        return s**3
    if spec.kind == "linear":
        return spec.slope * s
    return np.asarray(spec.beta_fn(s), dtype=float)


def _beta_prime(spec: GraphSpec, s):
    if spec.kind == "logarithmic":
        return 2.0 / ((1.0 + s) * (1.0 - s))
    if spec.kind == "double-obstacle":
        return np.zeros_like(s)
    if spec.kind == "regular-quartic":
        return 3.0 * s**2
    if spec.kind == "linear":
        return np.full_like(s, spec.slope)
    return np.asarray(spec.beta_prime_fn(s), dtype=float)


def minimal_section(spec: GraphSpec, r):
    """Minimal-norm element of beta(r); DomainError outside D(beta)."""
    arr, scalar = _as_array(r)
    lo, hi = spec.domain
    if spec.domain_closed or spec.kind == "double-obstacle":
        bad = (arr < lo) | (arr > hi)
    else:
        bad = (arr <= lo) | (arr >= hi)
    if np.any(bad):
        worst = arr[bad].flat[0] if not scalar else float(arr)
        raise DomainError(
            f"value {worst!r} outside graph domain ({lo}, {hi})"
            + (" (closed)" if spec.domain_closed else "")
        )
    if spec.kind == "double-obstacle":
        # beta = subdifferential of the indicator of [-1,1]: minimal section 0.
        out = np.zeros_like(arr)
    else:
        out = _beta_smooth(spec, arr)
    return _ret(out, scalar)


def betahat(spec: GraphSpec, s):
    """Convex potential betahat, extended by +inf outside its finite domain."""
    arr, scalar = _as_array(s)
    if spec.kind == "logarithmic":
        from scipy.special import xlogy

        ok = (arr >= -1.0) & (arr <= 1.0)
        a = np.clip(arr, -1.0, 1.0)
        # xlogy handles the 0*log(0) endpoints exactly.
        vals = xlogy(1.0 + a, 1.0 + a) + xlogy(1.0 - a, 1.0 - a)
        out = np.where(ok, vals, np.inf)
    elif spec.kind == "double-obstacle":
        out = np.where(np.abs(arr) <= 1.0, 0.0, np.inf)
    elif spec.kind == "regular-quartic":
        out = arr**4 / 4.0
    elif spec.kind == "linear":
        out = spec.slope * arr**2 / 2.0
    else:
        out = np.asarray(spec.betahat_fn(arr), dtype=float)
    return _ret(out, scalar)


def pi_eval(spec: GraphSpec, r):
    """Derivative of the concave remainder (entering the scheme explicitly)."""
    arr, scalar = _as_array(r)
    if spec.kind == "logarithmic":
        out = -2.0 * spec.c1 * arr
    elif spec.kind == "double-obstacle":
        out = -2.0 * spec.c2 * arr
    elif spec.kind == "regular-quartic":
        out = -arr
    elif spec.kind == "linear":
        out = np.zeros_like(arr)
    else:
        out = np.asarray(spec.pi_fn(arr), dtype=float) if spec.pi_fn else np.zeros_like(arr)
    return _ret(out, scalar)


def pihat_eval(spec: GraphSpec, r):
    """Concave remainder with additive constant fixed by pihat(0) = F(0) - betahat(0)."""
    arr, scalar = _as_array(r)
    if spec.kind == "logarithmic":
        out = -spec.c1 * arr**2
    elif spec.kind == "double-obstacle":
        out = spec.c2 * (1.0 - arr**2)
    elif spec.kind == "regular-quartic":
        out = 0.25 - arr**2 / 2.0
    elif spec.kind == "linear":
        out = np.zeros_like(arr)
    else:
        out = np.asarray(spec.pihat_fn(arr), dtype=float) if spec.pihat_fn else np.zeros_like(arr)
    return _ret(out, scalar)


def _solve_monotone(spec: GraphSpec, lam: float, r, lo: float, hi: float):
    """Safeguarded Newton for s + lam*beta(s) = r on the bracket [lo, hi]."""
    s = np.clip(r, lo, hi)
    blo = np.full_like(s, lo)
    bhi = np.full_like(s, hi)
    for _ in range(RESOLVENT_MAX_ITER):
        g = s + lam * _beta_smooth(spec, s) - r
        absg = np.abs(g)
        if np.all(absg < RESOLVENT_RTOL):
            return s
        pos = g > 0.0
        bhi = np.where(pos, np.minimum(bhi, s), bhi)
        blo = np.where(pos, blo, np.maximum(blo, s))
        gp = 1.0 + lam * _beta_prime(spec, s)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = s - g / gp
        bad = ~np.isfinite(cand) | (cand <= blo) | (cand >= bhi)
        stepped = np.where(bad, 0.5 * (blo + bhi), cand)
        # Converged points stay put so their residual cannot regress.
        s = np.where(absg < RESOLVENT_RTOL, s, stepped)
    g = s + lam * _beta_smooth(spec, s) - r
    worst = float(np.max(np.abs(g)))
    raise ConvergenceError(
        f"resolvent iteration did not reach residual {RESOLVENT_RTOL:g} "
        f"in {RESOLVENT_MAX_ITER} iterations (worst residual {worst:.3e})"
    )


def resolvent(spec: GraphSpec, lam: float, r):
    """Solve s + lam*beta(s) = r for s (the resolvent of lam*beta at r)."""
    if not lam > 0.0:
        raise DomainError("resolvent parameter lam must be > 0")
    arr, scalar = _as_array(r)
    if spec.kind == "double-obstacle":
        out = np.clip(arr, -1.0, 1.0)
    elif spec.kind == "linear":
        out = arr / (1.0 + lam * spec.slope)
    elif spec.kind == "logarithmic":
        out = _solve_monotone(spec, lam, arr, -1.0 + _EDGE, 1.0 - _EDGE)
    else:
        span = float(np.max(np.abs(arr))) if arr.size else 1.0
        lo, hi = spec.domain
        lo = max(lo + _EDGE if np.isfinite(lo) else -span - 1.0, -span - 1.0)
        hi = min(hi - _EDGE if np.isfinite(hi) else span + 1.0, span + 1.0)
        out = _solve_monotone(spec, lam, arr, lo, hi)
    return _ret(out, scalar)


def yosida(spec: GraphSpec, eps: float, r, scale: float = 1.0):
    """Yosida regularization beta_eps(r) = (r - resolvent(eps*scale, r))/(eps*scale).

    ``scale`` is 1 for the bulk graph and rho for the boundary graph.
    """
    lam = eps * scale
    arr, scalar = _as_array(r)
    j = resolvent(spec, lam, arr)
    return _ret((arr - j) / lam, scalar)


def yosida_derivative(spec: GraphSpec, eps: float, r, scale: float = 1.0):
    """Pointwise derivative of beta_eps; piecewise kinds return 0 at their kinks."""
    lam = eps * scale
    arr, scalar = _as_array(r)
    if spec.kind == "double-obstacle":
        out = np.where(np.abs(arr) > 1.0, 1.0 / lam, 0.0)
    elif spec.kind == "linear":
        out = np.full_like(arr, spec.slope / (1.0 + lam * spec.slope))
    else:
        j = resolvent(spec, lam, arr)
        jp = 1.0 / (1.0 + lam * _beta_prime(spec, j))
        out = (1.0 - jp) / lam
    return _ret(out, scalar)


def moreau(spec: GraphSpec, eps: float, r, scale: float = 1.0):
    """Moreau envelope of betahat: |r-J|^2/(2*eps*scale) + betahat(J)."""
    lam = eps * scale
    arr, scalar = _as_array(r)
    j = resolvent(spec, lam, arr)
    out = (arr - j) ** 2 / (2.0 * lam) + betahat(spec, j)
    return _ret(out, scalar)


def sample_domain(spec: GraphSpec, n: int = 1000, window: float = 5.0, inset: float = 1e-6):
    """Equispaced sample of D(beta); open endpoints are inset, infinite ones windowed."""
    lo, hi = spec.domain
    if not np.isfinite(lo):
        lo = -window
    elif not spec.domain_closed:
        lo = lo + inset * (min(hi, window) - lo)
    if not np.isfinite(hi):
        hi = window
    elif not spec.domain_closed:
        hi = hi - inset * (hi - max(lo, -window))
    return np.linspace(lo, hi, n)


def check_compatibility(bulk: GraphSpec, boundary: GraphSpec, eps_values, n: int = 1000):
    """Worst margin of |beta_eps(r)| <= rho*|beta_{Gamma,eps}(r)| + c0.

    Sampled on an equispaced grid over D(beta_Gamma) (windowed if unbounded)
    for every requested eps.  A negative return value means the pair is
    incompatible at some sample point.
    """
    rho, c0 = boundary.rho, boundary.c0
    pts = sample_domain(boundary, n)
    worst = math.inf
    for eps in np.atleast_1d(eps_values):
        lhs = np.abs(yosida(bulk, float(eps), pts))
        rhs = rho * np.abs(yosida(boundary, float(eps), pts, scale=rho)) + c0
        worst = min(worst, float(np.min(rhs - lhs)))
    return worst
