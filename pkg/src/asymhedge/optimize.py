"""Constrained likelihood maximization via transforms plus quasi-Newton ascent.

Constrained parameters are mapped to an unconstrained space (log transform
for positive parameters, a softmax-style transform for each stationarity
simplex, shifted log for a lower-bounded degrees-of-freedom parameter),
where a BFGS ascent with central finite-difference gradients runs from the
supplied start and a configurable number of jittered restarts.  The
curvature used for standard errors is the finite-difference Hessian of the
negative objective in the original parameter space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import (
    ConstraintViolationError,
    InvalidStartError,
    NonInvertibleInformationError,
)

__all__ = [
    "OptimizerConfig",
    "Optimum",
    "IdentityBlock",
    "ScaledIdentityBlock",
    "LogBlock",
    "SimplexBlock",
    "ShiftedLogBlock",
    "BoundedBlock",
    "BlockTransform",
    "fd_gradient",
    "fd_hessian",
    "maximize",
    "parameter_covariance",
]

_BIG = 1e15


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the quasi-Newton search.

    ``restarts`` counts optimization runs in total: the first uses the
    supplied start, the rest add seeded Gaussian jitter in the transformed
    space.  ``finite_difference_step`` is relative to each coordinate's
    magnitude (with a floor of 1 in transformed space).
    """

    max_iterations: int = 500
    gradient_tolerance: float = 1e-3
    step_tolerance: float = 1e-10
    finite_difference_step: float = 1e-5
    restarts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConstraintViolationError("max_iterations must be at least 1")
        if min(self.gradient_tolerance, self.step_tolerance, self.finite_difference_step) <= 0:
            raise ConstraintViolationError("tolerances must be positive")
        if self.restarts < 1:
            raise ConstraintViolationError("restarts must be at least 1")


@dataclass(frozen=True)
class Optimum:
    """Result of a maximization run.

    ``hessian`` holds second derivatives of the negative objective at the
    optimum, in the original (constrained) parameter space.  ``converged``
    reflects the measured finite-difference gradient norm in the transformed
    space, never the backend's own status flag alone.
    """

    params: np.ndarray
    loglik: float
    converged: bool
    iterations: int
    gradient_norm: float
    hessian: np.ndarray


class IdentityBlock:
    """Unconstrained coordinates, mapped through unchanged."""

    def __init__(self, size: int):
        self.size = size

    def to_constrained(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=float).copy()

    def to_unconstrained(self, theta: np.ndarray) -> np.ndarray:
        return np.asarray(theta, dtype=float).copy()

    def theta_scales(self, z: np.ndarray) -> np.ndarray:
        return np.ones(self.size)


class ScaledIdentityBlock:
    """Unconstrained coordinates with fixed per-coordinate scales.

    theta = scale * z.  Used to precondition coordinates whose natural
    magnitude differs wildly from 1, so a unit step in the search space is
    a sensible step for every parameter.
    """

    def __init__(self, scales):
        self.scales = np.asarray(scales, dtype=float)
        if np.any(self.scales <= 0) or not np.all(np.isfinite(self.scales)):
            raise ConstraintViolationError("scales must be positive and finite")
        self.size = self.scales.size

    def to_constrained(self, z: np.ndarray) -> np.ndarray:
        return self.scales * np.asarray(z, dtype=float)

    def to_unconstrained(self, theta: np.ndarray) -> np.ndarray:
        return np.asarray(theta, dtype=float) / self.scales

    def theta_scales(self, z: np.ndarray) -> np.ndarray:
        return self.scales.copy()


class LogBlock:
    """Strictly positive coordinates: theta = exp(z)."""

    def __init__(self, size: int):
        self.size = size

    def to_constrained(self, z: np.ndarray) -> np.ndarray:
        return np.exp(np.asarray(z, dtype=float))

    def to_unconstrained(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if np.any(theta <= 0):
            raise ConstraintViolationError(f"positive parameter required, got {theta}")
        return np.log(theta)

    def theta_scales(self, z: np.ndarray) -> np.ndarray:
        return self.to_constrained(z)


class ShiftedLogBlock:
    """Coordinates bounded below: theta = shift + exp(z)."""

    def __init__(self, size: int, shift: float):
        self.size = size
        self.shift = float(shift)

    def to_constrained(self, z: np.ndarray) -> np.ndarray:
        return self.shift + np.exp(np.asarray(z, dtype=float))

    def to_unconstrained(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if np.any(theta <= self.shift):
            raise ConstraintViolationError(
                f"parameter must exceed {self.shift}, got {theta}"
            )
        return np.log(theta - self.shift)

    def theta_scales(self, z: np.ndarray) -> np.ndarray:
        return np.exp(np.asarray(z, dtype=float))


class BoundedBlock:
    """Sign-free coordinates inside a symmetric box: theta = w * tanh(z).

    Used for covariance-recursion coefficients, which may be negative but
    must stay inside (-w, w) for the recursion to remain stable.
    """

    def __init__(self, size: int, half_width: float):
        if not half_width > 0:
            raise ConstraintViolationError(f"half_width must be positive, got {half_width}")
        self.size = size
        self.half_width = float(half_width)

    def to_constrained(self, z: np.ndarray) -> np.ndarray:
        return self.half_width * np.tanh(np.asarray(z, dtype=float))

    def to_unconstrained(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if np.any(np.abs(theta) >= self.half_width):
            raise ConstraintViolationError(
                f"parameter must lie inside (-{self.half_width}, {self.half_width}), got {theta}"
            )
        return np.arctanh(theta / self.half_width)

    def theta_scales(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        deriv = self.half_width * (1.0 - np.tanh(z) ** 2)
        # Near the box edge the derivative collapses; keep the step scale
        # meaningful by flooring at a small fraction of the box size.
        return np.maximum(deriv, 1e-3 * self.half_width)


class SimplexBlock:
    """Nonnegative coordinates with sum strictly below one.

    theta_i = exp(z_i) / (1 + sum_j exp(z_j)), so every coordinate is
    positive and the total stays inside the open simplex.  The inverse is
    defined on interior points (all coordinates strictly positive).  Far
    out in z-space the softmax sum rounds to 1.0 in floating point, so the
    image is additionally capped at 1 - 1e-10 to keep extreme-persistence
    optima representable as valid (strictly stationary) parameters.
    """

    _CAP = 1.0 - 1e-10

    def __init__(self, size: int):
        self.size = size

    def to_constrained(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        m = max(0.0, float(np.max(z))) if z.size else 0.0
        ez = np.exp(z - m)
        denom = np.exp(-m) + float(np.sum(ez))
        theta = ez / denom
        total = float(np.sum(theta))
        if total > self._CAP:
            theta = theta * (self._CAP / total)
        return theta

    def to_unconstrained(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        rest = 1.0 - float(np.sum(theta))
        if np.any(theta <= 0) or rest <= 0:
            raise ConstraintViolationError(
                f"simplex parameters must be positive with sum below 1, got {theta}"
            )
        return np.log(theta) - np.log(rest)

    def theta_scales(self, z: np.ndarray) -> np.ndarray:
        theta = self.to_constrained(z)
        return theta * (1.0 - theta)


class BlockTransform:
    """Concatenation of per-block transforms covering the full vector."""

    def __init__(self, blocks):
        self.blocks = list(blocks)
        self.size = sum(b.size for b in self.blocks)

    def to_constrained(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        out = np.empty(self.size)
        i = 0
        for b in self.blocks:
            out[i : i + b.size] = b.to_constrained(z[i : i + b.size])
            i += b.size
        return out

    def to_unconstrained(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.size,):
            raise ConstraintViolationError(
                f"parameter vector has length {theta.shape}, transform expects {self.size}"
            )
        out = np.empty(self.size)
        i = 0
        for b in self.blocks:
            out[i : i + b.size] = b.to_unconstrained(theta[i : i + b.size])
            i += b.size
        return out

    def theta_scales(self, z: np.ndarray) -> np.ndarray:
        """Natural magnitude of each constrained coordinate at ``z``.

        This is the diagonal of the transform's Jacobian, used to size
        finite-difference steps in the constrained space.
        """
        z = np.asarray(z, dtype=float)
        out = np.empty(self.size)
        i = 0
        for b in self.blocks:
            out[i : i + b.size] = b.theta_scales(z[i : i + b.size])
            i += b.size
        return out


def _identity_transform(n: int) -> BlockTransform:
    return BlockTransform([IdentityBlock(n)])


def fd_gradient(fun, x: np.ndarray, rel_step: float = 1e-5, floor: float = 1.0) -> np.ndarray:
    """Central finite-difference gradient with coordinate-relative steps."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * max(floor, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return g


def fd_hessian(
    fun,
    x: np.ndarray,
    rel_step: float = 1e-3,
    floor: float = 0.005,
    scales: np.ndarray | None = None,
) -> np.ndarray:
    """Central finite-difference Hessian, symmetrized.

    Steps scale with each coordinate's magnitude.  ``scales`` gives a
    per-coordinate natural magnitude replacing the scalar ``floor``; without
    it, a coordinate whose magnitude is far below the floor would be probed
    with a step comparable to its own value, which wrecks the curvature
    estimate for variance constants near zero.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if scales is None:
        lower = np.full(n, floor)
    else:
        lower = np.asarray(scales, dtype=float)
        if lower.shape != x.shape or np.any(lower <= 0) or not np.all(np.isfinite(lower)):
            raise ConstraintViolationError("scales must be positive, finite, and match x")
    steps = rel_step * np.maximum(np.abs(x), lower)
    f0 = fun(x)
    hess = np.empty((n, n))
    for i in range(n):
        hi = steps[i]
        xp = x.copy()
        xm = x.copy()
        xp[i] += hi
        xm[i] -= hi
        hess[i, i] = (fun(xp) - 2.0 * f0 + fun(xm)) / hi**2
        for j in range(i + 1, n):
            hj = steps[j]
            xpp = x.copy()
            xpm = x.copy()
            xmp = x.copy()
            xmm = x.copy()
            xpp[i] += hi
            xpp[j] += hj
            xpm[i] += hi
            xpm[j] -= hj
            xmp[i] -= hi
            xmp[j] += hj
            xmm[i] -= hi
            xmm[j] -= hj
            hess[i, j] = hess[j, i] = (fun(xpp) - fun(xpm) - fun(xmp) + fun(xmm)) / (
                4.0 * hi * hj
            )
    return 0.5 * (hess + hess.T)


def maximize(
    objective,
    start: np.ndarray,
    transform: BlockTransform | None = None,
    config: OptimizerConfig | None = None,
) -> Optimum:
    """Maximize ``objective`` over the feasible set encoded by ``transform``.

    ``objective`` maps a constrained parameter vector to a scalar; ``start``
    must be feasible with a finite objective value.  Returns the best point
    across restarts; ties on the objective are broken by the smaller
    measured gradient norm.  Non-convergence is reported through the
    ``converged`` flag, never silently.
    """
    config = config or OptimizerConfig()
    start = np.asarray(start, dtype=float)
    if transform is None:
        transform = _identity_transform(start.size)
    f0 = objective(start)
    if not np.isfinite(f0):
        raise InvalidStartError(f"objective is {f0} at the starting point")

    def neg(z: np.ndarray) -> float:
        val = objective(transform.to_constrained(z))
        if not np.isfinite(val):
            return _BIG
        return -float(val)

    def neg_grad(z: np.ndarray) -> np.ndarray:
        return fd_gradient(neg, z, rel_step=config.finite_difference_step)

    z0 = transform.to_unconstrained(start)
    rng = np.random.default_rng(config.seed)
    starts = [z0]
    for _ in range(config.restarts - 1):
        starts.append(z0 + 0.1 * rng.standard_normal(z0.size))

    best = None
    for zs in starts:
        if neg(zs) >= _BIG:
            continue
        z_cur = zs
        iters = 0
        gnorm = np.inf
        # A fresh BFGS from a stalled point resets the curvature model and
        # usually recovers from line-search precision loss, so keep going
        # until the measured gradient passes or progress stops.
        for _ in range(4):
            res = _scipy_minimize(
                neg,
                z_cur,
                jac=neg_grad,
                method="BFGS",
                options={
                    "maxiter": config.max_iterations,
                    "gtol": config.gradient_tolerance,
                    "xrtol": config.step_tolerance,
                },
            )
            iters += int(res.nit)
            z_cur = res.x
            gnorm = float(np.max(np.abs(neg_grad(z_cur)))) if z_cur.size else 0.0
            if gnorm <= config.gradient_tolerance or res.nit == 0:
                break
        value = -float(neg(z_cur))
        cand = (value, -gnorm, z_cur, iters)
        if best is None or (cand[0], cand[1]) > (best[0], best[1]):
            best = cand
    if best is None:
        raise InvalidStartError("no restart produced a finite objective value")

    value, neg_gnorm, z_best, iters = best
    gnorm = -neg_gnorm
    theta = transform.to_constrained(z_best)
    loglik = float(objective(theta))
    converged = gnorm <= config.gradient_tolerance

    def neg_original(th: np.ndarray) -> float:
        val = objective(th)
        if not np.isfinite(val):
            return _BIG
        return -float(val)

    hessian = fd_hessian(neg_original, theta, scales=transform.theta_scales(z_best))
    return Optimum(
        params=theta,
        loglik=loglik,
        converged=converged,
        iterations=iters,
        gradient_norm=gnorm,
        hessian=hessian,
    )


def parameter_covariance(opt: Optimum) -> np.ndarray:
    """Observed-information covariance: inverse Hessian of the negative objective.

    Requires the Hessian to be positive definite; otherwise the offending
    eigenvalue is reported.
    """
    hess = np.asarray(opt.hessian, dtype=float)
    hess = 0.5 * (hess + hess.T)
    eigvals, eigvecs = np.linalg.eigh(hess)
    if eigvals[0] <= 0:
        raise NonInvertibleInformationError(
            f"information matrix is not positive definite, smallest eigenvalue {eigvals[0]:.6g}"
        )
    cov = (eigvecs / eigvals) @ eigvecs.T
    return 0.5 * (cov + cov.T)
