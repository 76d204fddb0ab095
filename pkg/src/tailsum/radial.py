"""Radial laws in the Gumbel max-domain of attraction and derived scalings.

A radial law R feeds the stochastic representation exp(R * A * U) of the
risk vector.  Each built-in law carries its tail, log-tail, density, a
seeded sampler, and a scaling function chosen as the exact hazard-rate
reciprocal tail/density, which is a valid Gumbel scaling wherever the law
is in the Gumbel domain.

Three kinds are provided:

* ``ChiOfDim(d)``   -- R = sqrt(chi-square with d degrees of freedom); the
  law for which exp(R * A * U) is multivariate log-normal.  For d = 2 the
  tail is exp(-r^2/2) and the scaling is exactly 1/r.
* ``WeibullTail(tau, scale)`` -- tail exp(-(r/scale)^tau).  tau = 1 is the
  exponential law; ``WeibullTail(2, sqrt(2))`` coincides with ChiOfDim(2).
* ``LognormalLogRadius``      -- R itself log-normal.  In the Gumbel
  domain, but its induced scaling grows superlinearly, so the margin
  scaling limit does not exist (probes report that).

The derived scalings follow the threshold transform of the model: with
``scaling`` the radial scaling function b, ``exp_scale(u) = u * b(log u)``
is the scaling of exp(R), and ``ScalingBundle.margin_scale`` applies the
per-margin power/scale transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize
from scipy import special as sp

from .errors import DomainError, InvalidParams, NoFiniteLimit
from .numerics import std_normal_log_tail

__all__ = [
    "RadialLaw",
    "ScalingBundle",
    "MdaProbeRow",
    "PairConditionRow",
    "make_radial",
    "exp_scale",
    "probe_mda_limit",
    "probe_margin_mda_limit",
    "probe_condition_rho",
    "probe_o_regular_variation",
]


@dataclass(frozen=True, eq=False)
class RadialLaw:
    """A positive radial variable with tail, density, scaling and sampler.

    ``scaling`` is the Gumbel auxiliary function b: the tail satisfies
    tail(u + x*b(u))/tail(u) -> exp(-x).  ``sampler(rng, size)`` draws
    from the law using the supplied numpy Generator.
    """

    kind: str
    params: tuple
    tail: Callable[[float], float]
    log_tail: Callable[[float], float]
    density: Callable[[float], float]
    scaling: Callable[[float], float]
    sampler: Callable[[np.random.Generator, int], np.ndarray]

    def __repr__(self) -> str:  # params carry all identity
        inner = ", ".join(repr(p) for p in self.params)
        return f"{self.kind}({inner})"


# ---------------------------------------------------------------------------
# Built-in laws
# ---------------------------------------------------------------------------

def _chi_log_tail(r: float, d: int) -> float:
    """log P(sqrt(chi2_d) > r), stable for arbitrarily large r."""
    if r <= 0.0:
        return 0.0
    k = d / 2.0
    x = 0.5 * r * r
    if x <= 700.0:
        return math.log(float(sp.gammaincc(k, x)))
    # Asymptotic series Q(k,x) ~ x^{k-1} e^{-x}/Gamma(k) * (1 + (k-1)/x + ...)
    return -x + (k - 1.0) * math.log(x) - math.lgamma(k) + math.log(_chi_series(k, x))


def _chi_series(k: float, x: float) -> float:
    total, term, m = 1.0, 1.0, 0
    while m < 30:
        term *= (k - 1.0 - m) / x
        if abs(term) < 1e-17 * total:
            break
        total += term
        m += 1
    return total


def _chi_log_density(r: float, d: int) -> float:
    if r <= 0.0:
        return -math.inf
    k = d / 2.0
    return (d - 1.0) * math.log(r) - 0.5 * r * r - (k - 1.0) * math.log(2.0) - math.lgamma(k)


def _make_chi(d: int) -> RadialLaw:
    if d < 1 or d != int(d):
        raise InvalidParams(f"ChiOfDim needs an integer dimension >= 1, got {d}")
    d = int(d)

    def log_tail(r: float) -> float:
        return _chi_log_tail(r, d)

    def tail(r: float) -> float:
        return math.exp(log_tail(r)) if r > 0 else 1.0

    def density(r: float) -> float:
        return math.exp(_chi_log_density(r, d)) if r > 0 else 0.0

    if d == 2:
        def scaling(r: float) -> float:
            if r <= 0.0:
                raise DomainError("scaling of ChiOfDim(2) needs r > 0")
            return 1.0 / r
    else:
        def scaling(r: float) -> float:
            if r <= 0.0:
                raise DomainError("hazard-rate scaling needs r > 0")
            x = 0.5 * r * r
            k = d / 2.0
            if x > 700.0:
                return _chi_series(k, x) / r
            return math.exp(_chi_log_tail(r, d) - _chi_log_density(r, d))

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        return np.sqrt(rng.chisquare(d, size))

    return RadialLaw("ChiOfDim", (d,), tail, log_tail, density, scaling, sampler)


def _make_weibull(tau: float, scale: float = 1.0) -> RadialLaw:
    if tau <= 0.0 or scale <= 0.0:
        raise InvalidParams(f"WeibullTail needs tau > 0 and scale > 0, got ({tau}, {scale})")

    def log_tail(r: float) -> float:
        return -((r / scale) ** tau) if r > 0 else 0.0

    def tail(r: float) -> float:
        return math.exp(log_tail(r))

    def density(r: float) -> float:
        if r <= 0.0:
            return 0.0
        return tau * r ** (tau - 1.0) / scale**tau * tail(r)

    def scaling(r: float) -> float:
        if r <= 0.0:
            raise DomainError("Weibull scaling needs r > 0")
        return scale**tau * r ** (1.0 - tau) / tau

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        return scale * rng.standard_exponential(size) ** (1.0 / tau)

    return RadialLaw("WeibullTail", (tau, scale), tail, log_tail, density, scaling, sampler)


def _make_lognormal_log_radius() -> RadialLaw:
    def log_tail(r: float) -> float:
        return std_normal_log_tail(math.log(r)) if r > 0 else 0.0

    def tail(r: float) -> float:
        return math.exp(log_tail(r))

    def _log_density(r: float) -> float:
        lr = math.log(r)
        return -0.5 * lr * lr - lr - 0.5 * math.log(2.0 * math.pi)

    def density(r: float) -> float:
        return math.exp(_log_density(r)) if r > 0 else 0.0

    def scaling(r: float) -> float:
        if r <= 0.0:
            raise DomainError("scaling needs r > 0")
        return math.exp(log_tail(r) - _log_density(r))

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        return np.exp(rng.standard_normal(size))

    return RadialLaw("LognormalLogRadius", (), tail, log_tail, density, scaling, sampler)


def make_radial(kind: str, *params) -> RadialLaw:
    """Build one of the supported radial laws.

    kind is one of "ChiOfDim" (one integer parameter), "WeibullTail"
    (tau and optional scale) or "LognormalLogRadius" (no parameters).
    """
    if kind == "ChiOfDim":
        if len(params) != 1:
            raise InvalidParams("ChiOfDim takes exactly one parameter (the dimension)")
        return _make_chi(params[0])
    if kind == "WeibullTail":
        if len(params) not in (1, 2):
            raise InvalidParams("WeibullTail takes tau and an optional scale")
        return _make_weibull(*[float(p) for p in params])
    if kind == "LognormalLogRadius":
        if params:
            raise InvalidParams("LognormalLogRadius takes no parameters")
        return _make_lognormal_log_radius()
    raise InvalidParams(f"unknown radial law kind {kind!r}")


# ---------------------------------------------------------------------------
# Derived scalings
# ---------------------------------------------------------------------------

def exp_scale(u: float, law: RadialLaw) -> float:
    """Scaling function of exp(R): u * scaling(log u), for u > 1."""
    if u <= 1.0:
        raise DomainError(f"exp_scale needs u > 1, got {u}")
    return u * law.scaling(math.log(u))


@dataclass(frozen=True, eq=False)
class ScalingBundle:
    """Per-margin scaling functions derived from a radial law.

    Margins are indexed 0..d-1 and are described by positive scale
    factors ``lam``, positive exponents ``beta`` and a common positive
    ``gamma``: margin j is lam[j] * exp(R * A * U)_j ** (beta[j]*gamma).
    """

    law: RadialLaw
    lam: np.ndarray
    beta: np.ndarray
    gamma: float

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.lam, dtype=float)).copy()
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float)).copy()
        if lam.shape != beta.shape:
            raise InvalidParams("lam and beta must have the same length")
        if np.any(lam <= 0) or np.any(beta <= 0) or self.gamma <= 0:
            raise InvalidParams("margin parameters must be positive")
        lam.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "beta", beta)

    @property
    def n_margins(self) -> int:
        return len(self.lam)

    def exp_scale(self, u: float) -> float:
        return exp_scale(u, self.law)

    def margin_scale(self, j: int, u: float) -> float:
        """Scaling of margin j at threshold u.

        beta_j*gamma * u * e(v) / v  with  v = (u/lam_j)^(1/(beta_j*gamma)),
        where e is the exp(R) scaling.  Defined for v > 1, i.e. u > lam_j.
        """
        bg = self.beta[j] * self.gamma
        ratio = u / self.lam[j]
        if ratio <= 1.0:
            raise DomainError(
                f"margin_scale needs u > lam_j (margin {j}: u={u}, lam={self.lam[j]})"
            )
        v = ratio ** (1.0 / bg)
        return bg * u * self.exp_scale(v) / v

    def margin_scale_limit(self, j: int) -> float:
        """Limit of log(u) * margin_scale(j, u) / u as u grows.

        Closed form (gamma*beta_j)^2 for the ChiOfDim family; otherwise
        probed on a geometric grid and extrapolated, raising NoFiniteLimit
        when the probe grows without bound.
        """
        if self.law.kind == "ChiOfDim":
            return (self.gamma * self.beta[j]) ** 2
        return self._probe_limit(j)

    def _probe_limit(self, j: int) -> float:
        us = (1e6, 1e9, 1e12)
        xs = [math.log(u) for u in us]
        cs = [math.log(u) * self.margin_scale(j, u) / u for u in us]
        d1, d2 = cs[0] - cs[1], cs[1] - cs[2]
        scale = max(abs(c) for c in cs)
        if scale == 0.0:
            return 0.0
        if abs(d2) <= 1e-3 * abs(cs[2]) and abs(d1) <= 1e-3 * abs(cs[2]):
            return cs[2]
        if cs[2] > cs[1] > cs[0]:
            raise NoFiniteLimit(
                f"margin scale limit probe grows: {cs[0]:.4g} -> {cs[1]:.4g} -> {cs[2]:.4g}"
            )
        # Decaying probe: fit c(u) = a + b*(log u)^-p through the three
        # points and return the extrapolated a (clamped at 0).
        if d2 == 0.0 or d1 / d2 <= 1.0:
            raise NoFiniteLimit("margin scale limit probe does not settle")
        ratio = d1 / d2

        def gap(p: float) -> float:
            return (xs[0] ** -p - xs[1] ** -p) / (xs[1] ** -p - xs[2] ** -p) - ratio

        try:
            p = optimize.brentq(gap, 1e-6, 60.0)
        except ValueError as exc:
            raise NoFiniteLimit("margin scale limit extrapolation failed") from exc
        b = (cs[1] - cs[2]) / (xs[1] ** -p - xs[2] ** -p)
        a = cs[2] - b * xs[2] ** -p
        return max(a, 0.0)


# ---------------------------------------------------------------------------
# Condition probes.  Probes return measured numbers, never verdicts; the
# asymptotic conditions can only be sampled at finite u.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MdaProbeRow:
    u: float
    x: float
    ratio: float
    target: float

    @property
    def rel_error(self) -> float:
        return abs(self.ratio - self.target) / self.target


@dataclass(frozen=True)
class PairConditionRow:
    j: int
    i: int
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        """lhs - rhs; negative means the pair condition holds at this u."""
        return self.lhs - self.rhs


def probe_mda_limit(law: RadialLaw, u_grid: Sequence[float],
                    x_grid: Sequence[float]) -> list[MdaProbeRow]:
    """tail(u + x*scaling(u)) / tail(u) against exp(-x) on a grid."""
    rows = []
    for u in u_grid:
        b = law.scaling(u)
        for x in x_grid:
            shifted = u + x * b
            if shifted <= 0:
                continue
            ratio = math.exp(law.log_tail(shifted) - law.log_tail(u))
            rows.append(MdaProbeRow(u=u, x=x, ratio=ratio, target=math.exp(-x)))
    return rows


def probe_margin_mda_limit(bundle: ScalingBundle, j: int, u_grid: Sequence[float],
                           x_grid: Sequence[float],
                           log_tail: Callable[[float], float]) -> list[MdaProbeRow]:
    """P(X_j > u + x*margin_scale) / P(X_j > u) against exp(-x).

    ``log_tail`` is the margin's log tail function (the model module
    provides it); the bundle supplies the margin scaling.
    """
    rows = []
    for u in u_grid:
        es = bundle.margin_scale(j, u)
        for x in x_grid:
            shifted = u + x * es
            if shifted <= 0:
                continue
            ratio = math.exp(log_tail(shifted) - log_tail(u))
            rows.append(MdaProbeRow(u=u, x=x, ratio=ratio, target=math.exp(-x)))
    return rows


def probe_condition_rho(sigma: np.ndarray, bundle: ScalingBundle, u: float,
                        c: float = 1.0, epsilon: float = 1.0) -> list[PairConditionRow]:
    """Margins of the pairwise correlation condition at threshold u.

    For every ordered pair (i, j), i != j, evaluates

        lhs = sigma_ij + c * sqrt((1 - sigma_ij^2) / log u)
        rhs = (beta_j / beta_i) * log(epsilon * margin_scale(i, u)) / log u

    The condition behind the first-order expansion requires lhs <= rhs
    ultimately; a negative margin is evidence it holds at this u.
    """
    if u <= 1.0:
        raise DomainError(f"condition probe needs u > 1, got {u}")
    lu = math.log(u)
    d = bundle.n_margins
    rows = []
    for j in range(d):
        for i in range(d):
            if i == j:
                continue
            sij = float(sigma[i, j])
            lhs = sij + c * math.sqrt((1.0 - sij * sij) / lu)
            rhs = (bundle.beta[j] / bundle.beta[i]) * math.log(
                epsilon * bundle.margin_scale(i, u)
            ) / lu
            rows.append(PairConditionRow(j=j, i=i, lhs=lhs, rhs=rhs))
    return rows


def probe_o_regular_variation(law: RadialLaw, u_grid: Sequence[float],
                              lam: float = 1.01) -> list[float]:
    """|exp_scale(lam*u)/exp_scale(u) - 1| over the grid (O-variation check)."""
    return [abs(exp_scale(lam * u, law) / exp_scale(u, law) - 1.0) for u in u_grid]
