"""Probability measures on the real line, their moments and quadrature rules.

Three kinds of measure are supported: a Gaussian with mean ``m`` and
variance ``var``, a Poisson measure with parameter ``a`` and a raw moment
sequence ``m_0, m_1, ...``.  Named families keep exact ``int``/``Fraction``
parameters exact, so every downstream quantity can be computed in rational
arithmetic when the inputs allow it.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import (
    InvalidMeasure,
    NonFiniteValue,
    PositivityViolation,
    SpecParseError,
    UnsupportedOrder,
)

GAUSSIAN = "gaussian"
POISSON = "poisson"
RAW = "raw"

POISSON_TAIL_MASS = 1e-16


def is_exact(value) -> bool:
    """True for ints, Fractions and floats holding an integral value."""
    if isinstance(value, bool):
        return False
    if isinstance(value, Rational):
        return True
    if isinstance(value, float):
        return math.isfinite(value) and value.is_integer()
    return False


def to_exact(value) -> Fraction:
    return Fraction(value)


@dataclass(frozen=True)
class MeasureSpec:
    """A probability measure on R described by family name and parameters.

    Use the constructors :meth:`gaussian`, :meth:`poisson` and :meth:`raw`
    rather than instantiating directly.
    """

    kind: str
    mean: object = None
    variance: object = None
    a: object = None
    moments: tuple = field(default=())

    def __post_init__(self):
        if self.kind == GAUSSIAN:
            if not self.variance > 0:
                raise InvalidMeasure(f"Gaussian variance must be positive, got {self.variance}")
        elif self.kind == POISSON:
            if not self.a > 0:
                raise InvalidMeasure(f"Poisson parameter must be positive, got {self.a}")
        elif self.kind == RAW:
            if len(self.moments) == 0:
                raise InvalidMeasure("raw moment sequence is empty")
            if self.moments[0] != 1:
                raise InvalidMeasure(f"m0 must be 1 for a probability measure, got {self.moments[0]}")
            if not all(math.isfinite(float(m)) for m in self.moments):
                raise InvalidMeasure("raw moments must be finite")
        else:
            raise InvalidMeasure(f"unknown measure kind {self.kind!r}")

    @classmethod
    def gaussian(cls, mean=0, variance=1) -> "MeasureSpec":
        return cls(GAUSSIAN, mean=mean, variance=variance)

    @classmethod
    def poisson(cls, a=1) -> "MeasureSpec":
        return cls(POISSON, a=a)

    @classmethod
    def raw(cls, moments) -> "MeasureSpec":
        return cls(RAW, moments=tuple(moments))

    @property
    def is_named(self) -> bool:
        return self.kind in (GAUSSIAN, POISSON)

    @property
    def exact_parameters(self) -> bool:
        if self.kind == GAUSSIAN:
            return is_exact(self.mean) and is_exact(self.variance)
        if self.kind == POISSON:
            return is_exact(self.a)
        return all(is_exact(m) for m in self.moments)

    def to_text(self) -> str:
        if self.kind == GAUSSIAN:
            return f"gaussian:m={_fmt(self.mean)},var={_fmt(self.variance)}"
        if self.kind == POISSON:
            return f"poisson:a={_fmt(self.a)}"
        return "raw:[" + ",".join(_fmt(m) for m in self.moments) + "]"

    def __str__(self):
        return self.to_text()


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else repr(float(value))
    return repr(value) if isinstance(value, float) else str(value)


def _parse_number(text: str):
    text = text.strip()
    if re.fullmatch(r"[+-]?\d+", text):
        return int(text)
    try:
        value = float(text)
    except ValueError:
        raise SpecParseError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise SpecParseError(f"non-finite parameter: {text!r}")
    return value


def parse_measure(text: str) -> MeasureSpec:
    """Parse ``gaussian:m=<f>,var=<f>``, ``poisson:a=<f>`` or ``raw:[m0,m1,...]``.

    Integer literals stay ``int`` so that exact arithmetic is used downstream.
    Raises :class:`SpecParseError` on malformed text; an unparseable spec never
    reaches the measure validity checks.  Well-formed text with invalid
    parameters (``var <= 0``, ``a <= 0``, ``m0 != 1``) raises
    :class:`InvalidMeasure`.
    """
    if not isinstance(text, str) or ":" not in text:
        raise SpecParseError(f"malformed measure spec {text!r}")
    kind, _, body = text.strip().partition(":")
    kind = kind.strip().lower()
    if kind in (GAUSSIAN, POISSON):
        params = {}
        for item in filter(None, (p.strip() for p in body.split(","))):
            key, sep, val = item.partition("=")
            if not sep:
                raise SpecParseError(f"expected key=value, got {item!r}")
            params[key.strip()] = _parse_number(val)
        expected = {"m", "var"} if kind == GAUSSIAN else {"a"}
        if set(params) != expected:
            raise SpecParseError(f"{kind} spec needs parameters {sorted(expected)}, got {sorted(params)}")
        # well-formed but invalid parameters raise InvalidMeasure
        if kind == GAUSSIAN:
            return MeasureSpec.gaussian(params["m"], params["var"])
        return MeasureSpec.poisson(params["a"])
    if kind == RAW:
        try:
            values = json.loads(body)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"raw moments must be a JSON array: {exc}") from None
        if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
        ):
            raise SpecParseError("raw moments must be a JSON array of numbers")
        values = [int(v) if isinstance(v, float) and v.is_integer() else v for v in values]
        return MeasureSpec.raw(values)
    raise SpecParseError(f"unknown measure kind {kind!r}")


def moments(spec: MeasureSpec, kmax: int, exact: bool | None = None) -> list:
    """Moments ``m_0..m_kmax`` as a list.

    Gaussian: ``m_k = m m_{k-1} + (k-1) var m_{k-2}``.
    Poisson: ``m_{k+1} = a sum_j C(k, j) m_j`` (Touchard polynomials).
    The arithmetic follows the parameter type, so exact inputs give exact
    output; ``exact=True`` forces rational arithmetic on the binary value of
    float parameters.
    """
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    if spec.kind == RAW:
        if kmax >= len(spec.moments):
            raise UnsupportedOrder(
                f"moment of order {kmax} requested but only {len(spec.moments)} moments supplied"
            )
        return list(spec.moments[: kmax + 1])
    if spec.kind == GAUSSIAN:
        m, var = spec.mean, spec.variance
        use_exact = spec.exact_parameters if exact is None else exact
        if use_exact:
            m, var = to_exact(m), to_exact(var)
        else:
            m, var = float(m), float(var)
        out = [Fraction(1) if use_exact else 1.0]
        if kmax >= 1:
            out.append(m)
        for k in range(2, kmax + 1):
            out.append(m * out[k - 1] + (k - 1) * var * out[k - 2])
        return out
    use_exact = spec.exact_parameters if exact is None else exact
    a = to_exact(spec.a) if use_exact else float(spec.a)
    out = [Fraction(1) if use_exact else 1.0]
    for k in range(kmax):
        out.append(a * sum(math.comb(k, j) * out[j] for j in range(k + 1)))
    return out


def moment(spec: MeasureSpec, k: int):
    """``int x^k dmu`` by the closed recurrence of the family (never by quadrature)."""
    if k < 0:
        raise ValueError("moment order must be non-negative")
    return moments(spec, k)[k]


def hankel_minors(seq, order: int) -> list[Fraction]:
    """Leading principal minors ``det[m_{i+j}]_{0<=i,j<=k}`` for ``k = 0..order``.

    Computed exactly with fraction-free Bareiss elimination.  Floats are
    converted to the binary rational they represent, so the signs returned
    are those of the supplied data, free of rounding.
    """
    if 2 * order >= len(seq):
        raise UnsupportedOrder(f"Hankel order {order} needs {2 * order + 1} moments, have {len(seq)}")
    size = order + 1
    h = [[Fraction(seq[i + j]) for j in range(size)] for i in range(size)]
    minors = []
    prev = Fraction(1)
    for k in range(size):
        pivot = h[k][k]
        minors.append(pivot)
        if pivot == 0:
            # all later leading minors are unavailable through elimination
            minors.extend([Fraction(0)] * (size - k - 1))
            break
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                h[i][j] = (h[i][j] * pivot - h[i][k] * h[k][j]) / prev
        prev = pivot
    return minors


def check_hankel(seq, order: int) -> None:
    """Raise :class:`PositivityViolation` unless all minors up to ``order`` are > 0."""
    for k, d in enumerate(hankel_minors(seq, order)):
        if d <= 0:
            raise PositivityViolation(
                f"Hankel minor of order {k} is {float(d):.6g}; the moment sequence is not positive definite"
            )


@dataclass(frozen=True)
class RealQuadrature:
    """Nodes and positive weights integrating against a probability measure."""

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def __len__(self):
        return len(self.nodes)


def gauss_rule(alpha, omega, polish: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule of the Jacobi matrix with diagonal ``alpha`` and products ``omega``.

    ``alpha`` holds ``alpha_0..alpha_{K-1}`` and ``omega`` holds
    ``omega_1..omega_{K-1}``.  Nodes are the eigenvalues of the symmetric
    Jacobi matrix, refined by Newton steps on the K-th orthogonal polynomial.
    Weights come from the Christoffel function ``1 / sum_n p_n(x)^2`` with
    orthonormal ``p_n``, which keeps small weights accurate in relative terms
    (eigenvector weights lose them to absolute rounding).
    """
    alpha = np.asarray(alpha, dtype=float)
    omega = np.asarray(omega, dtype=float)
    k = len(alpha)
    if len(omega) != k - 1:
        raise ValueError("omega must have exactly one entry fewer than alpha")
    if k == 0:
        raise ValueError("empty Jacobi matrix")
    beta = np.sqrt(omega)
    jac = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
    x = np.linalg.eigvalsh(jac)
    for _ in range(polish):
        p_prev, p = np.zeros_like(x), np.ones_like(x)
        d_prev, d = np.zeros_like(x), np.zeros_like(x)
        for n in range(k):
            b_n = beta[n - 1] if n > 0 else 0.0
            # unnormalised last step: only the ratio p / p' is needed
            b_next = beta[n] if n < k - 1 else 1.0
            p_new = ((x - alpha[n]) * p - b_n * p_prev) / b_next
            d_new = (p + (x - alpha[n]) * d - b_n * d_prev) / b_next
            p_prev, p, d_prev, d = p, p_new, d, d_new
        step = np.where(d != 0, p / np.where(d != 0, d, 1.0), 0.0)
        x = x - step
    p_prev, p = np.zeros_like(x), np.ones_like(x)
    total = np.ones_like(x)
    for n in range(k - 1):
        b_n = beta[n - 1] if n > 0 else 0.0
        p_prev, p = p, ((x - alpha[n]) * p - b_n * p_prev) / beta[n]
        total += p * p
    return x, 1.0 / total


def _poisson_lattice(a: float, degree: int, growth: float) -> tuple[np.ndarray, np.ndarray]:
    # Terms t_k = w_k * k^degree * growth^k; once t_{k+1}/t_k <= 1/2 the ratio
    # keeps falling, so the dropped tail is bounded by t_K.  The tail is also
    # kept below the size a^n n! (n = degree/2) of a squared orthogonal
    # polynomial, which can be far smaller than the raw moment of order degree.
    log_a = math.log(a)
    half = degree / 2
    log_floor = min(0.0, half * log_a + math.lgamma(half + 1)) + math.log(1e-20)
    weights = []
    mass = 0.0
    scaled_sum = 0.0
    k = 0
    while True:
        log_w = -a + k * log_a - math.lgamma(k + 1)
        w = math.exp(log_w)
        weights.append(w)
        mass += w
        t = math.exp(log_w + degree * math.log(max(k, 1)) + k * math.log(growth))
        scaled_sum += t
        ratio = a * growth / (k + 1) * ((k + 1) / max(k, 1)) ** degree
        tail_mass = w * (a / (k + 1)) / (1 - a / (k + 1)) if k + 1 > a else math.inf
        if (
            k > a * growth
            and ratio <= 0.5
            and tail_mass < POISSON_TAIL_MASS
            and t <= 1e-17 * scaled_sum
            and math.log(max(t, 1e-320)) <= log_floor
        ):
            break
        k += 1
    return np.arange(len(weights), dtype=float), np.array(weights)


def make_quadrature(spec: MeasureSpec, degree: int, *, growth: float = 1.0) -> RealQuadrature:
    """Quadrature rule integrating polynomials of degree <= ``degree`` against ``spec``.

    Gaussian and raw-moment measures get an n-point Gauss rule with
    ``n = ceil((degree + 1) / 2)``.  Poisson gets the lattice ``0..K`` with
    exact Poisson weights, truncated once the dropped mass is below 1e-16 and
    the dropped part of ``x^degree * growth^x`` is negligible.  ``growth`` is
    only meaningful for Poisson and accounts for exponentially growing
    integrands such as coherent vectors.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if spec.kind == POISSON:
        nodes, weights = _poisson_lattice(float(spec.a), degree, max(1.0, float(growth)))
        return RealQuadrature(nodes, weights, degree)
    n_nodes = max(1, (degree + 2) // 2)
    if spec.kind == GAUSSIAN:
        var = float(spec.variance)
        alpha = [float(spec.mean)] * n_nodes
        omega = [var * n for n in range(1, n_nodes)]
    else:
        from .orthopoly import jacobi_from_measure

        n_avail = len(spec.moments) // 2
        if n_nodes > n_avail:
            raise UnsupportedOrder(
                f"degree {degree} rule needs {2 * n_nodes} moments, have {len(spec.moments)}"
            )
        check_hankel(spec.moments, n_nodes - 1)
        jac = jacobi_from_measure(spec, n_nodes)
        alpha = [float(v) for v in jac.alpha]
        omega = [float(v) for v in jac.omega]
    nodes, weights = gauss_rule(alpha, omega)
    return RealQuadrature(nodes, weights, 2 * n_nodes - 1)


def integrate(q: RealQuadrature, f):
    """Return ``sum_i w_i f(x_i)``; ``f`` is called once on the node array."""
    values = np.asarray(f(q.nodes))
    if values.shape != q.nodes.shape:
        values = np.broadcast_to(values, q.nodes.shape)
    if not np.all(np.isfinite(values)):
        bad = q.nodes[~np.isfinite(values)]
        raise NonFiniteValue(f"integrand is not finite at node(s) {bad[:5].tolist()}")
    result = np.dot(q.weights, values)
    if np.iscomplexobj(result):
        return complex(result)
    return float(result)
