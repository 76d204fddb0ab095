"""Special functions and small dense linear algebra used by the other modules.

Everything here is a pure function; tail quantities are also exposed in
log space so that values far below the smallest normal double (the deep
rows of the benchmark tables go to ~1e-43 and beyond) remain usable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy import special as sp

from .errors import DomainError, NotPositiveDefinite, QuadratureError

__all__ = [
    "CorrelationMatrix",
    "std_normal_tail",
    "std_normal_log_tail",
    "lognormal_pdf",
    "lognormal_log_pdf",
    "gamma_function",
    "sphere_marginal_density",
    "cholesky_factor",
    "equicorrelation",
    "adaptive_quad",
]

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def std_normal_tail(x: float) -> float:
    """P(N(0,1) > x), accurate in the far tail.

    Uses the complementary error function, so the relative error stays
    below ~1e-14 until the result leaves the normal double range
    (underflow to 0 starts only around x ~ 38.5).  For values beyond
    that use :func:`std_normal_log_tail`.
    """
    if not math.isfinite(x):
        raise DomainError(f"std_normal_tail needs a finite argument, got {x}")
    return 0.5 * math.erfc(x / _SQRT2)


def std_normal_log_tail(x: float) -> float:
    """log P(N(0,1) > x); never underflows for any finite x."""
    if not math.isfinite(x):
        raise DomainError(f"std_normal_log_tail needs a finite argument, got {x}")
    return float(sp.log_ndtr(-x))


def lognormal_pdf(u: float, mu: float = 0.0, sigma: float = 1.0) -> float:
    """Density at u of exp(N(mu, sigma^2))."""
    return math.exp(lognormal_log_pdf(u, mu, sigma))


def lognormal_log_pdf(u: float, mu: float = 0.0, sigma: float = 1.0) -> float:
    """Log-density at u of exp(N(mu, sigma^2)); u must be positive."""
    if u <= 0.0:
        raise DomainError(f"log-normal density is defined for u > 0, got {u}")
    if sigma <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    z = (math.log(u) - mu) / sigma
    return -0.5 * z * z - math.log(u * sigma) - _LOG_SQRT_2PI


def gamma_function(s: float) -> float:
    """Euler Gamma for s > 0."""
    if s <= 0.0:
        raise DomainError(f"gamma_function is restricted to s > 0, got {s}")
    return math.gamma(s)


def sphere_marginal_density(x: float, d: int) -> float:
    """Density at x of one coordinate of a uniform point on the unit sphere in R^d.

    h(x) = Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)) * (1 - x^2)^((d-3)/2)
    on (-1, 1).  Integrable singularity at the endpoints when d = 2.
    """
    if d < 2:
        raise DomainError(f"sphere_marginal_density needs dimension >= 2, got {d}")
    if not -1.0 < x < 1.0:
        raise DomainError(f"coordinate must lie strictly inside (-1, 1), got {x}")
    const = gamma_function(d / 2.0) / (math.sqrt(math.pi) * gamma_function((d - 1) / 2.0))
    return const * (1.0 - x * x) ** ((d - 3) / 2.0)


def adaptive_quad(f, a: float, b: float, *, abs_tol: float = 1e-12,
                  rel_tol: float = 1e-10, limit: int = 400) -> float:
    """Adaptive Gauss-Kronrod integration of f on [a, b].

    Raises QuadratureError when the reported error estimate exceeds the
    tolerance relative to the result (guards against silent failure on
    integrands spanning hundreds of orders of magnitude).
    """
    val, err = integrate.quad(f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=limit)
    if err > abs_tol + rel_tol * abs(val) and err > 1e-3 * abs(val):
        raise QuadratureError(
            f"quadrature error estimate {err:.3e} too large for result {val:.6e}"
        )
    return val


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """A symmetric positive-definite matrix with unit diagonal.

    Construction validates shape, symmetry, the unit diagonal, the
    [-1, 1] range off the diagonal, and positive definiteness (via a
    Cholesky factorization, cached for reuse).
    """

    entries: np.ndarray
    _chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"expected a square matrix, got shape {m.shape}")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12):
            raise DomainError("correlation matrix must be symmetric")
        if not np.all(np.diag(m) == 1.0):
            raise DomainError("correlation matrix must have unit diagonal")
        if np.any(np.abs(m) > 1.0 + 1e-12):
            raise DomainError("correlations must lie in [-1, 1]")
        m = 0.5 * (m + m.T)
        np.fill_diagonal(m, 1.0)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "_chol", _cholesky(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def cholesky(self) -> np.ndarray:
        """Lower-triangular L with L @ L.T equal to the matrix."""
        return self._chol

    def submatrix(self, idx: np.ndarray) -> np.ndarray:
        return self.entries[np.ix_(idx, idx)]


def _cholesky(m: np.ndarray) -> np.ndarray:
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(
            "matrix is not positive definite (Cholesky pivot <= 0)"
        ) from exc
    chol.setflags(write=False)
    return chol


def cholesky_factor(m: CorrelationMatrix | np.ndarray) -> np.ndarray:
    """Lower-triangular Cholesky factor; NotPositiveDefinite on failure."""
    if isinstance(m, CorrelationMatrix):
        return m.cholesky()
    return _cholesky(np.asarray(m, dtype=float))


def equicorrelation(d: int, rho: float) -> CorrelationMatrix:
    """The d x d correlation matrix with every off-diagonal entry rho."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    lo = -1.0 / (d - 1) if d > 1 else -1.0
    if not lo < rho < 1.0 and d > 1:
        raise DomainError(f"equicorrelation with d={d} needs rho in ({lo:.3f}, 1)")
    m = np.full((d, d), float(rho))
    np.fill_diagonal(m, 1.0)
    return CorrelationMatrix(m)
