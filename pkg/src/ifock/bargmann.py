"""Coherent vectors and the Segal-Bargmann transform of an interacting Fock space.

For the lambda sequence of a measure ``mu``:

* ``G(z) = sum_n z^n / lambda_n`` converges on ``|z| < r``;
* the coherent vector ``E(x, z) = sum_n P_n(x) z^n / lambda_n`` lives in
  ``L2(mu)`` for ``|z| < sqrt(r)``;
* the transform ``(S f)(z) = int E(x, z) f(x) dmu(x)`` sends ``P_n`` to ``z^n``
  and is unitary onto the analytic functions with norm
  ``||F||^2 = sum_n lambda_n |a_n|^2``.

The transform is exposed both pointwise (quadrature against the kernel) and
as a coefficient map on polynomials expanded in the ``P_n`` basis.  The two
routes share no code beyond the Jacobi data and are meant to be compared.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegreeOverflow,
    OutsideDomain,
    QuadratureDegreeTooLow,
    SeriesTruncationError,
)
from .fock import FactorizationReport, factorization_defects
from .measures import GAUSSIAN, POISSON, RAW, MeasureSpec, RealQuadrature, make_quadrature
from .orthopoly import (
    JacobiData,
    PolynomialFamily,
    eval_all,
    jacobi_from_measure,
    to_p_basis,
)

DOMAIN_MARGIN = 0.99
SERIES_RTOL = 1e-12
NAMED_KERNEL_DEPTH = 80
GAUSS_NODES = 96


@dataclass(frozen=True)
class AnalyticSeries:
    """``F(z) = sum_n a_n z^n`` with the lambda-weighted norm."""

    coeffs: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs)
        lam = np.asarray(self.lam)
        if len(coeffs) > len(lam):
            raise DegreeOverflow(f"{len(coeffs)} coefficients but only {len(lam)} lambda values")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "lam", lam[: len(coeffs)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def norm_squared(self) -> float:
        return float(sum(float(l) * abs(complex(a)) ** 2 for l, a in zip(self.lam, self.coeffs)))

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def complex_coeffs(self) -> np.ndarray:
        return np.array([complex(a) for a in self.coeffs])

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.complex_coeffs())

    def to_json(self) -> dict:
        return {
            "coeffs": [[c.real, c.imag] for c in self.complex_coeffs()],
            "norm": self.norm(),
        }


@dataclass(frozen=True)
class DomainInfo:
    r_lambda: float
    estimated: bool

    @property
    def omega_radius(self) -> float:
        return math.sqrt(self.r_lambda)

    def to_json(self) -> dict:
        return {"r_lambda": self.r_lambda, "omega_radius": self.omega_radius, "estimated": self.estimated}


def _log(v) -> float:
    if isinstance(v, Fraction):
        return math.log(v.numerator) - math.log(v.denominator)
    return math.log(float(v))


def _log_lambda(source, depth: int | None = None) -> np.ndarray:
    if isinstance(source, MeasureSpec):
        depth = NAMED_KERNEL_DEPTH if depth is None else depth
        source = jacobi_from_measure(source, depth, exact=False)
    if isinstance(source, JacobiData):
        logs = np.concatenate([[0.0], np.cumsum([_log(w) for w in source.omega])])
        return logs
    return np.array([_log(v) for v in source])


def domain_info(source) -> DomainInfo:
    """Radius of convergence of ``sum z^n / lambda_n``.

    Gaussian and Poisson measures have ``r = inf`` exactly.  For a finite
    lambda sequence the radius is estimated: growing ratios
    ``omega_n = lambda_n / lambda_{n-1}`` over the second half of the window
    (doubling from the midpoint) are read as ``r = inf``; otherwise the
    minimum of ``lambda_n^(1/n)`` over the second half is returned.
    """
    if isinstance(source, MeasureSpec):
        if source.kind in (GAUSSIAN, POISSON):
            return DomainInfo(math.inf, False)
        depth = len(source.moments) // 2
        source = jacobi_from_measure(source, depth)
    logs = _log_lambda(source)
    n = len(logs) - 1
    if n < 2:
        raise ValueError("need at least lambda_0..lambda_2 to estimate the radius")
    log_ratio = np.diff(logs)
    half = n // 2
    tail = log_ratio[half - 1:]
    if np.all(np.diff(tail) > 0) and tail[-1] - tail[0] >= math.log(2):
        return DomainInfo(math.inf, True)
    roots = np.exp(logs[1:] / np.arange(1, n + 1))
    return DomainInfo(float(np.min(roots[half - 1:])), True)


def _check_domain(z, radius: float, what: str):
    if abs(z) >= DOMAIN_MARGIN * radius:
        raise OutsideDomain(f"|z| = {abs(z):.6g} is outside the {what} of radius {radius:.6g} (1% margin)")


def G_lambda(source, z, rtol: float = SERIES_RTOL, depth: int | None = None) -> complex:
    """Partial sum of ``sum z^n / lambda_n`` with a ratio-test tail certificate.

    ``source`` is a lambda sequence, a :class:`JacobiData` or a named
    :class:`MeasureSpec`.  For a named spec the depth is doubled until the
    tail certificate holds.  Raises :class:`SeriesTruncationError` when the
    supplied terms cannot certify ``rtol``.
    """
    z = complex(z)
    _check_domain(z, domain_info(source).r_lambda, "convergence disk")
    if z == 0:
        return 1.0 + 0j
    if isinstance(source, MeasureSpec):
        d = depth or 64
        while True:
            try:
                return _g_partial(_log_lambda(source, d), z, rtol)
            except SeriesTruncationError:
                if d >= 4096:
                    raise
                d *= 2
    return _g_partial(_log_lambda(source), z, rtol)


def _g_partial(logs: np.ndarray, z: complex, rtol: float) -> complex:
    n = np.arange(len(logs))
    log_mag = n * math.log(abs(z)) - logs
    terms = np.exp(log_mag + 1j * n * cmath.phase(z))
    total = complex(math.fsum(terms.real) + 1j * math.fsum(terms.imag))
    log_omega = np.diff(logs)
    last = log_omega[-min(3, len(log_omega)):]
    if not np.all(np.diff(last) >= -1e-15):
        raise SeriesTruncationError("ratios omega_n are not non-decreasing at the end of the window")
    q = abs(z) / math.exp(log_omega[-1])
    if q >= 1:
        raise SeriesTruncationError(f"ratio test fails at the last term (q = {q:.3g})")
    tail = math.exp(log_mag[-1]) * q / (1 - q)
    if tail > rtol * max(abs(total), 1e-300):
        raise SeriesTruncationError(f"tail bound {tail:.3g} exceeds {rtol:.1g} * |sum|")
    return total


@dataclass(frozen=True)
class CoherentKernel:
    """How to evaluate ``E(x, z)`` for one measure."""

    spec: MeasureSpec
    family: PolynomialFamily
    method: str = "series"

    @property
    def depth(self) -> int:
        return self.family.jacobi.depth


def make_kernel(spec: MeasureSpec, depth: int | None = None, method: str | None = None) -> CoherentKernel:
    """Kernel for ``spec``: closed form for Gaussian/Poisson unless ``method='series'``."""
    if method is None:
        method = {GAUSSIAN: "closed-form-gaussian", POISSON: "closed-form-poisson"}.get(spec.kind, "series")
    expected = {GAUSSIAN: "closed-form-gaussian", POISSON: "closed-form-poisson"}.get(spec.kind)
    if method != "series" and method != expected:
        raise ValueError(f"method {method!r} does not apply to a {spec.kind} measure")
    if depth is None:
        depth = len(spec.moments) // 2 if spec.kind == RAW else NAMED_KERNEL_DEPTH
    family = PolynomialFamily.from_jacobi(jacobi_from_measure(spec, depth))
    return CoherentKernel(spec, family, method)


def _closed_form(spec: MeasureSpec, x, z: complex):
    if spec.kind == GAUSSIAN:
        m, var = float(spec.mean), float(spec.variance)
        return np.exp(z * (x - m) / var - z * z / (2 * var))
    a = float(spec.a)
    return cmath.exp(-z) * np.power(1 + z / a, x)


def _series_terms(k: CoherentKernel, x, z: complex, n_max: int) -> np.ndarray:
    values = eval_all(k.family, x, n_max)
    logs = _log_lambda(k.family.jacobi)[: n_max + 1]
    n = np.arange(n_max + 1)
    scale = np.exp(n * math.log(abs(z)) - logs + 1j * n * cmath.phase(z)) if z != 0 else (n == 0).astype(complex)
    return values * scale.reshape((-1,) + (1,) * np.ndim(x))


def coherent(k: CoherentKernel, x, z, certify: bool = True, rtol: float = SERIES_RTOL):
    """Coherent vector ``E(x, z)`` for scalar or array ``x``.

    The series method sums ``P_n(x) z^n / lambda_n`` over the kernel depth;
    with ``certify`` the dropped tail is bounded by a ratio test on the last
    terms (geometric envelope), which is a heuristic certificate.
    """
    z = complex(z)
    _check_domain(z, domain_info(k.spec if k.spec.is_named else k.family.jacobi).omega_radius, "domain")
    if k.method != "series":
        out = _closed_form(k.spec, np.asarray(x, dtype=float), z)
        return out if np.ndim(out) else complex(out)
    n_max = k.family.max_degree - 1
    terms = _series_terms(k, np.asarray(x, dtype=float), z, n_max)
    total = terms.sum(axis=0)
    if certify and z != 0:
        # block ratio test: robust to single terms near a zero of P_n
        mags = np.abs(terms)
        recent = mags[-4:].max(axis=0)
        earlier = mags[-8:-4].max(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            block = np.where(earlier > 0, (recent / earlier) ** 0.25, 0.0)
        omega_last = float(k.family.jacobi.omega[-1])
        q = np.maximum(block, abs(z) / math.sqrt(omega_last))
        env = recent
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(q < 1, env * q / (1 - q), np.inf)
        if np.any(tail > rtol * np.maximum(np.abs(total), 1e-300)):
            raise SeriesTruncationError(
                f"coherent series at depth {k.depth} cannot certify rtol={rtol:g} for z={z}"
            )
    return total if np.ndim(total) else complex(total)


def _poly_degree(coeffs) -> int:
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return len(coeffs) - 1


def default_quadrature(spec: MeasureSpec, z: complex = 0j, degree: int = 0, growth: float | None = None) -> RealQuadrature:
    """Rule used by the pointwise routes when none is supplied."""
    if spec.kind == GAUSSIAN:
        return make_quadrature(spec, 2 * GAUSS_NODES - 1)
    if spec.kind == POISSON:
        if growth is None:
            growth = abs(1 + complex(z) / float(spec.a))
        return make_quadrature(spec, degree, growth=growth)
    return make_quadrature(spec, 2 * (len(spec.moments) // 2) - 1)


def sb_transform(spec: MeasureSpec, f, z, *, kernel: CoherentKernel | None = None,
                 quad: RealQuadrature | None = None) -> complex:
    """``(S f)(z) = int E(x, z) f(x) dmu(x)`` by quadrature.

    ``f`` is a callable or the monomial coefficients of a polynomial.  The
    integral is bilinear (no conjugation of ``f``).  For a polynomial of
    degree d and a series kernel, terms beyond ``exactness - d`` are dropped:
    they integrate to zero against ``f`` by orthogonality.
    """
    z = complex(z)
    kernel = make_kernel(spec) if kernel is None else kernel
    poly = None if callable(f) else np.asarray(f)
    degree = 0 if poly is None else _poly_degree(poly)
    quad = default_quadrature(spec, z, degree) if quad is None else quad
    x = quad.nodes
    fx = f(x) if poly is None else np.polynomial.polynomial.polyval(x, poly)
    if poly is not None and degree > quad.exactness_degree:
        raise QuadratureDegreeTooLow(f"degree {degree} exceeds rule exactness {quad.exactness_degree}")
    if kernel.method == "series" and poly is not None:
        n_max = min(kernel.family.max_degree - 1, quad.exactness_degree - degree)
        if n_max < degree:
            raise QuadratureDegreeTooLow(
                f"degree {degree} polynomial needs kernel terms up to {degree} within exactness {quad.exactness_degree}"
            )
        _check_domain(z, domain_info(kernel.family.jacobi).omega_radius, "domain")
        ex = _series_terms(kernel, x, z, n_max).sum(axis=0)
    else:
        ex = coherent(kernel, x, z)
    values = ex * fx
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite integrand in Segal-Bargmann quadrature")
    return complex(np.dot(quad.weights, values))


def sb_series(family: PolynomialFamily, f, basis: str = "monomial") -> AnalyticSeries:
    """Coefficient form of the transform: ``sum c_n P_n  ->  sum c_n z^n``.

    ``f`` holds monomial coefficients (``basis='monomial'``) or coefficients
    in the ``P_n`` basis (``basis='P'``).  Degree must stay below the family
    depth so that every ``lambda_n`` needed by the norm is known.
    """
    lam = family.jacobi.lam
    if basis == "P":
        c = list(f)
    elif basis == "monomial":
        c = to_p_basis(family, f)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    if len(c) > len(lam):
        raise DegreeOverflow(f"degree {len(c) - 1} needs lambda_{len(c) - 1}; Jacobi depth is {len(lam)}")
    exact = all(isinstance(v, (int, Fraction)) for v in c) and family.jacobi.exact
    coeffs = np.array(c, dtype=object) if exact else np.array(c)
    lam_arr = np.array(lam, dtype=object) if exact else np.array([float(v) for v in lam])
    return AnalyticSeries(coeffs, lam_arr)


def coherent_norm(spec: MeasureSpec, z, kernel: CoherentKernel | None = None,
                  quad: RealQuadrature | None = None) -> float:
    """``||E(., z)||_{L2(mu)}`` by quadrature; equals ``G(|z|^2)^(1/2)``."""
    z = complex(z)
    kernel = make_kernel(spec) if kernel is None else kernel
    if quad is None:
        growth = abs(1 + z / float(spec.a)) ** 2 if spec.kind == POISSON else None
        quad = default_quadrature(spec, z, growth=growth)
    e = coherent(kernel, quad.nodes, z)
    return math.sqrt(float(np.dot(quad.weights, np.abs(e) ** 2)))


def coherent_pairing(spec: MeasureSpec, z, w, kernel: CoherentKernel | None = None) -> complex:
    """``int E(x, z) E(x, w) dmu(x)``, which should equal ``sum (z w)^n / lambda_n``."""
    z, w = complex(z), complex(w)
    kernel = make_kernel(spec) if kernel is None else kernel
    growth = abs(1 + z / float(spec.a)) * abs(1 + w / float(spec.a)) if spec.kind == POISSON else None
    quad = default_quadrature(spec, z, growth=growth)
    return complex(np.dot(quad.weights, coherent(kernel, quad.nodes, z) * coherent(kernel, quad.nodes, w)))


class TildeOperators:
    """Operators on coefficient sequences of analytic functions.

    ``Ã z^n = omega_n z^{n-1}``, ``Ã* z^n = z^{n+1}``, ``Ñ z^n = n z^n`` and
    ``alpha~ z^n = alpha_n z^n``, truncated to degree < ``dimension``
    (``Ã* z^{D-1}`` is dropped).
    """

    def __init__(self, jacobi: JacobiData, dimension: int | None = None):
        self.dimension = jacobi.depth if dimension is None else dimension
        if self.dimension > jacobi.depth:
            raise DegreeOverflow(f"dimension {self.dimension} exceeds Jacobi depth {jacobi.depth}")
        self.jacobi = jacobi
        self.omega = [jacobi.omega_at(n) for n in range(self.dimension)]
        self.alpha = list(jacobi.alpha[: self.dimension])

    def _coeffs(self, F):
        c = F.coeffs if isinstance(F, AnalyticSeries) else F
        c = list(c)
        if len(c) > self.dimension:
            raise DegreeOverflow(f"series of degree {len(c) - 1} in dimension {self.dimension}")
        return c + [0] * (self.dimension - len(c))

    def annihilate(self, F) -> list:
        c = self._coeffs(F)
        return [self.omega[n + 1] * c[n + 1] for n in range(self.dimension - 1)] + [0 * c[0]]

    def create(self, F) -> list:
        c = self._coeffs(F)
        return [0 * c[0]] + c[: self.dimension - 1]

    def number(self, F) -> list:
        return [n * v for n, v in enumerate(self._coeffs(F))]

    def alpha_op(self, F) -> list:
        return [a * v for a, v in zip(self.alpha, self._coeffs(F))]

    def field(self, F) -> list:
        """``(Ã* + Ã + alpha~) F``, the image of multiplication by x."""
        parts = (self.create(F), self.annihilate(F), self.alpha_op(F))
        return [p + q + r for p, q, r in zip(*parts)]

    def series(self, coeffs) -> AnalyticSeries:
        return AnalyticSeries(np.array(coeffs), np.array(self.jacobi.lam[: self.dimension]))

    def matrices(self) -> dict:
        """Dense float matrices obtained by applying each operator to ``z^n``."""
        d = self.dimension
        out = {}
        for name, op in (("A", self.annihilate), ("A_star", self.create),
                         ("Num", self.number), ("AlphaN", self.alpha_op)):
            mat = np.zeros((d, d))
            for n in range(d):
                e = [0] * d
                e[n] = 1
                mat[:, n] = [float(v) for v in op(e)]
            out[name] = mat
        return out

    def field_matrix(self) -> np.ndarray:
        m = self.matrices()
        return m["A"] + m["A_star"] + m["AlphaN"]

    def commutator_defect(self) -> float:
        """Max gap of ``[Ã, Ã*] z^n = (omega_{n+1} - omega_n) z^n`` for n <= D-3."""
        worst = 0.0
        d = self.dimension
        for n in range(max(d - 2, 0)):
            e = [0] * d
            e[n] = 1
            lhs = np.array(self.annihilate(self.create(e)), dtype=float) - np.array(
                self.create(self.annihilate(e)), dtype=float
            )
            rhs = np.zeros(d)
            rhs[n] = float(self.omega[n + 1]) - float(self.omega[n])
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def poisson_factorization(self, a, tolerance: float = 1e-12) -> FactorizationReport:
        m = self.matrices()
        return factorization_defects(m["A"], m["A_star"], m["Num"], m["AlphaN"], a, tolerance)


@dataclass(frozen=True)
class IntertwiningReport:
    """``S(x P_n)`` against ``(Ã* + Ã + alpha~) z^n`` for n <= depth - 2."""

    spec: str
    per_n: list
    max_defect: float
    pattern_defect: float | None
    tolerance: float
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        worst = max(self.max_defect, self.pattern_defect or 0.0)
        return worst <= self.tolerance


def _coeff_gap(a, b) -> float:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return max(abs(complex(x) - complex(y)) for x, y in zip(a, b))


def verify_intertwining(spec: MeasureSpec, depth: int, tolerance: float = 1e-9) -> IntertwiningReport:
    """Compare the transform of ``x P_n`` with the tilde field applied to ``z^n``.

    For Poisson the result is also matched against
    ``z^{n+1} + (n + a) z^n + a n z^{n-1}``; for Gaussian ``(x - m) H_n`` is
    matched against ``z^{n+1} + var n z^{n-1}``.  Both sides are computed in
    rational arithmetic from the exact values of the parameters.
    """
    # floats are binary rationals, so the exact path is always available
    jac = jacobi_from_measure(spec, depth, exact=True)
    fam = PolynomialFamily.from_jacobi(jac)
    tilde = TildeOperators(jac)
    per_n = []
    pattern = None
    for n in range(depth - 1):
        pn = list(fam.coeffs[n])
        zero = pn[0] * 0
        xpn = [zero] + pn
        got = sb_series(fam, xpn).coeffs
        e = [zero] * depth
        e[n] = zero + 1
        want = tilde.field(e)
        per_n.append(_coeff_gap(got, want))
        if spec.kind == POISSON:
            a = jac.alpha[0]  # alpha_0 = a, in the Jacobi number type
            expected = [zero] * (n + 2)
            expected[n + 1] += 1
            expected[n] += n + a
            if n >= 1:
                expected[n - 1] += a * n
            gap = _coeff_gap(got, expected)
        elif spec.kind == GAUSSIAN:
            m = jac.alpha[0]
            var = jac.omega[0] if depth > 1 else zero + 1
            shifted = sb_series(fam, [c - m * p for c, p in zip(xpn, pn + [zero])]).coeffs
            expected = [zero] * (n + 2)
            expected[n + 1] += 1
            if n >= 1:
                expected[n - 1] += var * n
            gap = _coeff_gap(shifted, expected)
        else:
            continue
        pattern = gap if pattern is None else max(pattern, gap)
    return IntertwiningReport(str(spec), per_n, max(per_n) if per_n else 0.0, pattern, tolerance)
