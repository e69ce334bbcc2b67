"""Rotation-invariant measures on C and the norm identity for analytic polynomials.

A radial measure is ``dmu~(z) = (1/2pi) drho(r) dtheta``.  The complex
Gaussian of scale ``s2`` has ``drho = (2/s2) r exp(-r^2/s2) dr``; its mixed
moments are ``int conj(z)^m z^n dmu~ = delta_{mn} s2^n n!``, which is exactly
the lambda sequence of Gaussian(m, s2) and of Poisson(s2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special
from scipy.stats import norm, qmc

from .bargmann import AnalyticSeries
from .errors import QuadratureDegreeTooLow, QuadratureFailure, UnsupportedMeasure
from .measures import GAUSSIAN, POISSON, MeasureSpec
from .orthopoly import jacobi_from_measure

MAX_RADIAL_NODES = 120
FINITE_DEPTH_NOTE = "finite-depth witness, not a proof"


@dataclass(frozen=True)
class RadialMeasure:
    """``(1/2pi) drho(r) dtheta`` with either a named complex-Gaussian scale or a density."""

    scale: float | None = None
    density: Callable[[float], float] | None = None

    def __post_init__(self):
        if (self.scale is None) == (self.density is None):
            raise ValueError("give exactly one of scale or density")
        if self.scale is not None and not self.scale > 0:
            raise ValueError("scale must be positive")

    @classmethod
    def complex_gaussian(cls, scale) -> "RadialMeasure":
        return cls(scale=float(scale))

    @property
    def is_gaussian(self) -> bool:
        return self.scale is not None

    def radial_density(self, r):
        """``drho/dr``."""
        r = np.asarray(r, dtype=float)
        if self.is_gaussian:
            s2 = self.scale
            return 2.0 / s2 * r * np.exp(-r * r / s2)
        return np.vectorize(self.density)(r)

    def total_mass(self) -> float:
        if self.is_gaussian:
            return radial_moment_quadrature(self, 0)
        return sp_integrate.quad(self.density, 0, np.inf)[0]


def representing_measure(spec: MeasureSpec) -> RadialMeasure:
    """Complex Gaussian whose mixed moments reproduce the lambda sequence of ``spec``."""
    if spec.kind == GAUSSIAN:
        return RadialMeasure.complex_gaussian(spec.variance)
    if spec.kind == POISSON:
        return RadialMeasure.complex_gaussian(spec.a)
    raise UnsupportedMeasure("no representing-measure construction for raw moment sequences")


def _laguerre(n_nodes: int):
    if n_nodes > MAX_RADIAL_NODES:
        raise QuadratureDegreeTooLow(f"{n_nodes} Laguerre nodes requested, limit is {MAX_RADIAL_NODES}")
    return special.roots_laguerre(n_nodes)


def radial_moment_quadrature(mu: RadialMeasure, n: int) -> float:
    """``int r^(2n) drho`` with ``u = r^2``: ``s2^n int v^n e^(-v) dv`` by Gauss-Laguerre."""
    if not mu.is_gaussian:
        value, _ = sp_integrate.quad(lambda r: r ** (2 * n) * mu.density(r), 0, np.inf, limit=200)
        return value
    v, w = _laguerre(n // 2 + 1)
    return float(mu.scale ** n * np.dot(w, v ** n))


def radial_moments(mu: RadialMeasure, n: int, rtol: float = 1e-9) -> float:
    """``int_0^inf r^(2n) drho(r)``.

    For the complex Gaussian this is ``s2^n n!``, cross-checked against
    Gauss-Laguerre quadrature; a disagreement beyond ``rtol`` raises
    :class:`QuadratureFailure`.  Densities are integrated adaptively.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if not mu.is_gaussian:
        return radial_moment_quadrature(mu, n)
    exact = mu.scale ** n * math.factorial(n)
    quad = radial_moment_quadrature(mu, n)
    if abs(quad - exact) > rtol * abs(exact):
        raise QuadratureFailure(f"radial moment {n}: closed form {exact!r} vs quadrature {quad!r}")
    return float(exact)


@dataclass(frozen=True)
class MixedMoments:
    """``gamma[m, n] = int conj(z)^m z^n dnu(z)`` for ``m, n <= M``."""

    gamma: np.ndarray

    @property
    def size(self) -> int:
        return self.gamma.shape[0] - 1

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.gamma))

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.gamma - self.gamma.conj().T)))


def mixed_moments(mu: RadialMeasure, M: int) -> MixedMoments:
    """Mixed moments up to order M; off-diagonal entries vanish by rotation invariance."""
    gamma = np.zeros((M + 1, M + 1), dtype=complex)
    for n in range(M + 1):
        gamma[n, n] = radial_moments(mu, n)
    return MixedMoments(gamma)


def monte_carlo_mixed_moments(mu: RadialMeasure, M: int = 4, seed: int = 0, log2_samples: int = 20) -> np.ndarray:
    """Randomised quasi-Monte-Carlo estimate of ``gamma[m, n]``.

    Samples ``z = sqrt(s2/2) (X + iY)`` with independent standard normals
    drawn from a scrambled Sobol sequence, so this route uses the Cartesian
    form of the measure rather than its polar product structure.
    """
    if not mu.is_gaussian:
        raise UnsupportedMeasure("Monte-Carlo check implemented for the complex Gaussian only")
    u = qmc.Sobol(d=2, scramble=True, seed=seed).random_base2(log2_samples)
    z = math.sqrt(mu.scale / 2) * (norm.ppf(u[:, 0]) + 1j * norm.ppf(u[:, 1]))
    zc = np.conj(z)
    powers = np.ones((M + 1, z.size), dtype=complex)
    powers_c = np.ones((M + 1, z.size), dtype=complex)
    for k in range(1, M + 1):
        powers[k] = powers[k - 1] * z
        powers_c[k] = powers_c[k - 1] * zc
    return powers_c @ powers.T / z.size


def monte_carlo_defect(mu: RadialMeasure, M: int = 4, seed: int = 0, log2_samples: int = 20) -> float:
    """Largest off-diagonal ``|gamma_hat[m, n]| / sqrt(gamma[m, m] gamma[n, n])``."""
    est = monte_carlo_mixed_moments(mu, M, seed, log2_samples)
    diag = np.array([mu.scale ** n * math.factorial(n) for n in range(M + 1)])
    scale = np.sqrt(np.outer(diag, diag))
    off = ~np.eye(M + 1, dtype=bool)
    return float(np.max(np.abs(est[off]) / scale[off])) if M > 0 else 0.0


def _log(v) -> float:
    if isinstance(v, Fraction):
        return math.log(v.numerator) - math.log(v.denominator)
    return math.log(v)


@dataclass(frozen=True)
class CriterionReport:
    ratios: list
    last_ratio: float
    limit_estimate: float
    decreasing_tail: bool
    satisfied: bool
    note: str = FINITE_DEPTH_NOTE

    def to_json(self) -> dict:
        return {
            "ratios": self.ratios,
            "last_ratio": self.last_ratio,
            "limit_estimate": self.limit_estimate,
            "decreasing_tail": self.decreasing_tail,
            "satisfied": self.satisfied,
            "note": self.note,
        }


def check_uniqueness_criterion(g, N: int | None = None, rel_limit: float = 0.05) -> CriterionReport:
    """Ratios ``gamma_nn^(1/n) / n^2`` for ``n = 1..N`` and a limit estimate.

    ``g`` is a :class:`MixedMoments` or the diagonal ``gamma_00, gamma_11, ...``.
    The limit is extrapolated by a least-squares fit ``c0 + c1/n + c2/n^2``
    over the second half of the window.  The witness is satisfied when the
    tail decreases and ``|c0|`` is below ``rel_limit`` times the ratio at the
    start of the fit window.
    """
    diag = list(g.diagonal()) if isinstance(g, MixedMoments) else list(g)
    N = len(diag) - 1 if N is None else N
    if N < 4 or N >= len(diag):
        raise ValueError("need gamma_00..gamma_NN with N >= 4")
    ratios = []
    for n in range(1, N + 1):
        if diag[n] <= 0:
            raise ValueError(f"gamma_{n}{n} must be positive")
        ratios.append(math.exp(_log(diag[n]) / n) / n ** 2)
    ns = np.arange(1, N + 1, dtype=float)
    start = N // 2
    tail_n, tail_r = ns[start - 1:], np.array(ratios[start - 1:])
    design = np.vstack([np.ones_like(tail_n), 1 / tail_n, 1 / tail_n ** 2]).T
    c0 = float(np.linalg.lstsq(design, tail_r, rcond=None)[0][0])
    decreasing = bool(np.all(np.diff(tail_r) < 0))
    satisfied = decreasing and abs(c0) <= rel_limit * tail_r[0]
    return CriterionReport(ratios, ratios[-1], c0, decreasing, satisfied)


@dataclass(frozen=True)
class CarlemanReport:
    partial_sum: float
    sqrt_fit_coefficient: float
    r_squared: float
    increment_ratio: float
    diverging: bool
    N: int
    note: str = FINITE_DEPTH_NOTE

    def to_json(self) -> dict:
        return {
            "partial_sum": self.partial_sum,
            "sqrt_fit_coefficient": self.sqrt_fit_coefficient,
            "r_squared": self.r_squared,
            "increment_ratio": self.increment_ratio,
            "diverging": self.diverging,
            "N": self.N,
            "note": self.note,
        }


def check_carleman(lam=None, N: int | None = None, *, log_lambda=None, growth_threshold: float = 1e-2) -> CarlemanReport:
    """Partial sums of ``lambda_n^(-1/(2n))`` for ``n = 1..N``.

    Pass either ``lam`` (``lambda_0, lambda_1, ...``) or ``log_lambda``, a
    sequence or a callable ``n -> log lambda_n`` for sequences that overflow
    floats.  Partial sums ``S_k`` are fitted to ``c sqrt(k) + b``.  The sum
    is flagged as diverging when the second half of the window still adds at
    least ``growth_threshold`` of the total.
    """
    if (lam is None) == (log_lambda is None):
        raise ValueError("give exactly one of lam or log_lambda")
    if lam is not None:
        N = len(lam) - 1 if N is None else N
        logs = [_log(lam[n]) for n in range(1, N + 1)]
    elif callable(log_lambda):
        if N is None:
            raise ValueError("N is required with a callable log_lambda")
        logs = [log_lambda(n) for n in range(1, N + 1)]
    else:
        N = len(log_lambda) - 1 if N is None else N
        logs = [float(log_lambda[n]) for n in range(1, N + 1)]
    ns = np.arange(1, N + 1, dtype=float)
    terms = np.exp(-np.array(logs) / (2 * ns))
    sums = np.cumsum(terms)
    total = float(sums[-1])
    design = np.vstack([np.sqrt(ns), np.ones_like(ns)]).T
    coef, *_ = np.linalg.lstsq(design, sums, rcond=None)
    fitted = design @ coef
    ss_res = float(np.sum((sums - fitted) ** 2))
    ss_tot = float(np.sum((sums - sums.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    half = float(sums[N // 2 - 1]) if N >= 2 else 0.0
    increment = (total - half) / total if total > 0 else 0.0
    return CarlemanReport(total, float(coef[0]), r2, increment, increment >= growth_threshold, N)


@dataclass(frozen=True)
class NormIdentityReport:
    rows: list = field(default_factory=list)
    tolerance: float = 1e-9

    @property
    def max_defect(self) -> float:
        return max((r["rel_defect"] for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_defect <= self.tolerance


def analytic_l2_norm_squared(mu: RadialMeasure, coeffs) -> float:
    """``int |F(z)|^2 dmu~`` by a polar product rule.

    Radial part: Gauss-Laguerre in ``u = r^2`` (complex Gaussian only).
    Angular part: equispaced trapezoid with ``2 deg + 1`` points, exact for
    the trigonometric polynomial ``|F(r e^{i theta})|^2``.  ``F`` itself is
    evaluated pointwise, so cross terms cancel numerically rather than by
    construction.
    """
    if not mu.is_gaussian:
        raise UnsupportedMeasure("product rule implemented for the complex Gaussian only")
    c = np.array([complex(v) for v in coeffs])
    deg = len(c) - 1
    v, w = _laguerre(deg + 1)
    r = np.sqrt(mu.scale * v)
    n_theta = 2 * deg + 1
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    z = r[:, None] * np.exp(1j * theta)[None, :]
    values = np.abs(np.polynomial.polynomial.polyval(z, c)) ** 2
    return float(np.dot(w, values.mean(axis=1)))


def verify_norm_identity(spec: MeasureSpec, polynomials, tolerance: float = 1e-9) -> NormIdentityReport:
    """Compare ``sum lambda_n |a_n|^2`` with ``int |F|^2 dmu~`` for each polynomial."""
    mu = representing_measure(spec)
    rows = []
    for F in polynomials:
        coeffs = F.coeffs if isinstance(F, AnalyticSeries) else np.asarray(F)
        deg = len(coeffs) - 1
        if deg + 1 > MAX_RADIAL_NODES:
            raise QuadratureDegreeTooLow(f"degree {deg} beyond radial rule limit")
        lam = jacobi_from_measure(spec, deg + 1, exact=False).lambda_array()
        lhs = float(np.sum(lam * np.abs(np.array([complex(v) for v in coeffs])) ** 2))
        rhs = analytic_l2_norm_squared(mu, coeffs)
        rows.append({"degree": deg, "hilbert_norm_sq": lhs, "l2_norm_sq": rhs,
                     "rel_defect": abs(lhs - rhs) / max(abs(lhs), 1e-300)})
    return NormIdentityReport(rows, tolerance)
