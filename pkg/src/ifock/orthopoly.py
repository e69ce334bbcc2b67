"""Jacobi parameters, the lambda sequence and monic orthogonal polynomials.

The monic polynomials of a measure obey

    (x - alpha_n) P_n = P_{n+1} + omega_n P_{n-1},    omega_0 P_{-1} = 0,

and ``lambda_n = omega_1 ... omega_n`` is the squared L2 norm of ``P_n``.
A :class:`JacobiData` of depth ``N`` holds the N x N Jacobi matrix, i.e.
``alpha_0..alpha_{N-1}``, ``omega_1..omega_{N-1}`` and ``lambda_0..lambda_{N-1}``;
this determines ``P_0..P_N``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from numpy.polynomial import Polynomial

from .errors import DegreeOverflow, DepthUnavailable, PositivityViolation
from .measures import GAUSSIAN, POISSON, MeasureSpec, to_exact

DEFAULT_DEPTH = 20
CONDITION_STAR_THRESHOLD = 1e-6


class IllConditionedWarning(UserWarning):
    """Jacobi extraction from inexact moments; Hankel conditioning amplifies input error."""


@dataclass(frozen=True)
class JacobiData:
    alpha: tuple
    omega: tuple
    lam: tuple
    exact: bool = False

    def __post_init__(self):
        n = len(self.alpha)
        if n < 1:
            raise ValueError("JacobiData needs depth >= 1")
        if len(self.omega) != n - 1 or len(self.lam) != n:
            raise ValueError("inconsistent JacobiData lengths")
        for i, w in enumerate(self.omega, start=1):
            if w <= 0:
                # omega_n = 0 would mean a finitely supported measure; refused
                raise PositivityViolation(f"omega_{i} = {w} is not positive")

    @classmethod
    def from_recurrence(cls, alpha, omega, exact: bool = False) -> "JacobiData":
        alpha, omega = tuple(alpha), tuple(omega)
        lam = [Fraction(1) if exact else 1.0]
        for w in omega:
            if w <= 0:
                raise PositivityViolation(f"omega_{len(lam)} = {w} is not positive")
            lam.append(lam[-1] * w)
        return cls(alpha, omega, tuple(lam), exact)

    @property
    def depth(self) -> int:
        return len(self.alpha)

    def omega_at(self, n: int):
        """``omega_n`` with the convention ``omega_0 = 0``."""
        return 0 if n == 0 else self.omega[n - 1]

    def truncate(self, depth: int) -> "JacobiData":
        if depth > self.depth:
            raise DepthUnavailable(f"depth {depth} requested from JacobiData of depth {self.depth}")
        return JacobiData(self.alpha[:depth], self.omega[: depth - 1], self.lam[:depth], self.exact)

    def alpha_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.alpha])

    def omega_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.omega])

    def lambda_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.lam])


def _stieltjes(mom, depth, zero, one):
    # Gram-Schmidt in the moment inner product <p, q> = sum p_i q_j m_{i+j};
    # generic over the scalar type (Fraction or mpf).
    def inner(p, q):
        return sum(pi * qj * mom[i + j] for i, pi in enumerate(p) for j, qj in enumerate(q))

    alpha, omega, lam = [], [], []
    p_prev, p = [], [one]
    for n in range(depth):
        norm = inner(p, p)
        if norm <= 0:
            raise PositivityViolation(
                f"Hankel minor of order {n} is not positive (lambda_{n} = {float(norm):.6g})"
            )
        if n > 0:
            omega.append(norm / lam[-1])
        lam.append(norm)
        xp = [zero] + p
        a_n = inner(xp, p) / norm
        alpha.append(a_n)
        if n == depth - 1:
            break
        nxt = [xp[i] - a_n * (p[i] if i < len(p) else zero) for i in range(len(xp))]
        if n > 0:
            w = omega[-1]
            for i, c in enumerate(p_prev):
                nxt[i] -= w * c
        p_prev, p = p, nxt
    return alpha, omega, lam


def jacobi_from_measure(spec: MeasureSpec, depth: int = DEFAULT_DEPTH, exact: bool | None = None) -> JacobiData:
    """Jacobi data of ``spec`` at ``depth``.

    Gaussian(m, var) and Poisson(a) use the closed forms ``alpha_n = m,
    omega_n = var n`` and ``alpha_n = n + a, omega_n = a n``.  Raw moments go
    through Gram-Schmidt on the Hankel moment matrix, which needs
    ``m_0..m_{2 depth - 1}``.  With ``exact=None`` rational inputs are handled
    in exact arithmetic; otherwise mpmath at extended precision is used and an
    :class:`IllConditionedWarning` is issued.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    use_exact = spec.exact_parameters if exact is None else exact
    if spec.kind == GAUSSIAN:
        m, var = spec.mean, spec.variance
        if use_exact:
            m, var = to_exact(m), to_exact(var)
        return JacobiData.from_recurrence([m] * depth, [var * n for n in range(1, depth)], use_exact)
    if spec.kind == POISSON:
        a = to_exact(spec.a) if use_exact else spec.a
        return JacobiData.from_recurrence(
            [n + a for n in range(depth)], [a * n for n in range(1, depth)], use_exact
        )
    if len(spec.moments) < 2 * depth:
        raise DepthUnavailable(
            f"depth {depth} needs moments m_0..m_{2 * depth - 1}, only {len(spec.moments)} supplied"
        )
    mom = spec.moments[: 2 * depth]
    if use_exact:
        alpha, omega, lam = _stieltjes([Fraction(v) for v in mom], depth, Fraction(0), Fraction(1))
        return JacobiData(tuple(alpha), tuple(omega), tuple(lam), True)
    hankel = np.array([[float(mom[i + j]) for j in range(depth)] for i in range(depth)])
    cond = np.linalg.cond(hankel)
    warnings.warn(
        f"inexact moments: Jacobi data computed in extended precision; Hankel condition number ~{cond:.2e}",
        IllConditionedWarning,
        stacklevel=2,
    )
    with mpmath.workdps(max(50, 4 * depth + 30)):
        alpha, omega, lam = _stieltjes([_to_mpf(v) for v in mom], depth, mpmath.mpf(0), mpmath.mpf(1))
        return JacobiData(
            tuple(float(v) for v in alpha),
            tuple(float(v) for v in omega),
            tuple(float(v) for v in lam),
            False,
        )


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def lambda_sequence(j: JacobiData) -> list:
    """``[lambda_0, ..., lambda_{N-1}]`` with ``lambda_0 = 1``."""
    return list(j.lam)


def _log(value) -> float:
    if isinstance(value, Fraction):
        return math.log(value.numerator) - math.log(value.denominator)
    return math.log(value)


@dataclass(frozen=True)
class ConditionStarReport:
    inf_estimate: float
    argmin: int
    satisfied: bool
    tail_decreasing: bool
    depth: int
    threshold: float
    note: str = "finite-depth witness, not a proof"

    def to_json(self) -> dict:
        return {
            "inf_estimate": self.inf_estimate,
            "satisfied": self.satisfied,
            "argmin": self.argmin,
            "tail_decreasing": self.tail_decreasing,
            "depth": self.depth,
            "note": self.note,
        }


def check_condition_star(lam, N: int | None = None, threshold: float = CONDITION_STAR_THRESHOLD) -> ConditionStarReport:
    """Finite-depth witness for ``inf_n lambda_n^(1/n) > 0``.

    Reports ``min_{1<=n<=N} lambda_n^(1/n)``.  The witness counts as
    satisfied when that minimum exceeds ``threshold`` and is not produced by a
    sequence still strictly decreasing at the end of the window (such a
    sequence may tend to zero beyond ``N``).
    """
    lam = list(lam)
    N = len(lam) - 1 if N is None else N
    if N < 1 or N >= len(lam):
        raise ValueError(f"need lambda_0..lambda_N with N >= 1, have {len(lam)} values for N={N}")
    roots = []
    for n in range(1, N + 1):
        if lam[n] <= 0:
            raise PositivityViolation(f"lambda_{n} = {lam[n]} is not positive")
        roots.append(math.exp(_log(lam[n]) / n))
    idx = int(np.argmin(roots))
    inf_estimate = roots[idx]
    tail = roots[-max(3, N // 4):]
    tail_decreasing = len(tail) >= 3 and all(b < a for a, b in zip(tail, tail[1:]))
    trailing_min = idx == N - 1 and tail_decreasing
    satisfied = inf_estimate > threshold and not trailing_min
    return ConditionStarReport(inf_estimate, idx + 1, satisfied, tail_decreasing, N, threshold)


@dataclass(frozen=True)
class PolynomialFamily:
    """Monic polynomials ``P_0..P_N`` generated by a :class:`JacobiData` of depth N.

    ``coeffs[n]`` lists the monomial coefficients of ``P_n`` in ascending order,
    in the number type of the Jacobi data.
    """

    jacobi: JacobiData
    coeffs: tuple

    @classmethod
    def from_jacobi(cls, jacobi: JacobiData) -> "PolynomialFamily":
        zero = Fraction(0) if jacobi.exact else 0.0
        one = Fraction(1) if jacobi.exact else 1.0
        table = [[one]]
        prev = []
        for n in range(jacobi.depth):
            cur = table[-1]
            a_n, w_n = jacobi.alpha[n], jacobi.omega_at(n)
            nxt = [zero] * (n + 2)
            for i, c in enumerate(cur):
                nxt[i + 1] += c
                nxt[i] -= a_n * c
            for i, c in enumerate(prev):
                nxt[i] -= w_n * c
            prev = cur
            table.append(nxt)
        return cls(jacobi, tuple(tuple(row) for row in table))

    @property
    def max_degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient_matrix(self) -> np.ndarray:
        """Float matrix whose row ``n`` holds the coefficients of ``P_n``."""
        size = len(self.coeffs)
        out = np.zeros((size, size))
        for n, row in enumerate(self.coeffs):
            out[n, : len(row)] = [float(c) for c in row]
        return out


def family_for(spec: MeasureSpec, depth: int = DEFAULT_DEPTH, exact: bool | None = None) -> PolynomialFamily:
    return PolynomialFamily.from_jacobi(jacobi_from_measure(spec, depth, exact))


def eval_P(fam: PolynomialFamily, n: int, x):
    """Evaluate ``P_n(x)`` by forward recurrence.

    ``x`` may be a scalar or array.  In exact mode with a rational scalar
    ``x`` the coefficient table is used and the value is exact.
    """
    if n < 0 or n > fam.max_degree:
        raise DegreeOverflow(f"P_{n} not available (family has degree <= {fam.max_degree})")
    j = fam.jacobi
    if j.exact and isinstance(x, (int, Fraction)):
        return sum(c * Fraction(x) ** i for i, c in enumerate(fam.coeffs[n]))
    x = np.asarray(x, dtype=float) if not np.iscomplexobj(x) else np.asarray(x)
    alpha, omega = j.alpha_array(), j.omega_array()
    p_prev, p = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        w = omega[k - 1] if k > 0 else 0.0
        p_prev, p = p, (x - alpha[k]) * p - w * p_prev
    return p if p.ndim else p[()]


def eval_all(fam: PolynomialFamily, x, n_max: int | None = None) -> np.ndarray:
    """Array ``[P_0(x), ..., P_{n_max}(x)]`` stacked along the first axis."""
    n_max = fam.max_degree if n_max is None else n_max
    if n_max > fam.max_degree:
        raise DegreeOverflow(f"P_{n_max} not available (family has degree <= {fam.max_degree})")
    x = np.asarray(x)
    alpha, omega = fam.jacobi.alpha_array(), fam.jacobi.omega_array()
    out = np.empty((n_max + 1,) + x.shape, dtype=np.result_type(x, float))
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x - alpha[0]
    for k in range(1, n_max):
        out[k + 1] = (x - alpha[k]) * out[k] - omega[k - 1] * out[k - 1]
    return out


def to_p_basis(fam: PolynomialFamily, mono) -> np.ndarray | list:
    """Coefficients ``c`` with ``sum_n c_n P_n`` equal to the monomial polynomial ``mono``."""
    mono = list(mono)
    while len(mono) > 1 and mono[-1] == 0:
        mono.pop()
    deg = len(mono) - 1
    if deg > fam.max_degree:
        raise DegreeOverflow(f"degree {deg} exceeds family degree {fam.max_degree}")
    exact = fam.jacobi.exact and all(isinstance(c, (int, Fraction)) for c in mono)
    if exact:
        rest = [Fraction(c) for c in mono]
        out = [Fraction(0)] * (deg + 1)
    else:
        rest = np.array(mono, dtype=complex if np.iscomplexobj(np.array(mono)) else float)
        out = np.zeros(deg + 1, dtype=rest.dtype)
    for k in range(deg, -1, -1):
        ck = rest[k]
        out[k] = ck
        if ck != 0:
            for i, p in enumerate(fam.coeffs[k]):
                rest[i] -= ck * (p if exact else float(p))
    return out


def from_p_basis(fam: PolynomialFamily, c) -> np.ndarray | list:
    """Monomial coefficients of ``sum_n c_n P_n``."""
    c = list(c)
    deg = len(c) - 1
    if deg > fam.max_degree:
        raise DegreeOverflow(f"degree {deg} exceeds family degree {fam.max_degree}")
    exact = fam.jacobi.exact and all(isinstance(v, (int, Fraction)) for v in c)
    if exact:
        out = [Fraction(0)] * (deg + 1)
        for n, cn in enumerate(c):
            for i, p in enumerate(fam.coeffs[n]):
                out[i] += cn * p
        return out
    c = np.asarray(c)
    mat = fam.coefficient_matrix()[: deg + 1, : deg + 1]
    return c @ mat


def hermite(n: int, x, var=1.0):
    """Monic Hermite polynomial ``H_n(x; var)``: ``H_{k+1} = x H_k - var k H_{k-1}``."""
    x = np.asarray(x, dtype=float)
    h_prev, h = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        h_prev, h = h, x * h - var * k * h_prev
    return h if h.ndim else float(h)


def charlier(n: int, x, a=1.0):
    """Monic Charlier polynomial ``C_n(x; a)``: ``C_{k+1} = (x - k - a) C_k - a k C_{k-1}``."""
    x = np.asarray(x, dtype=float)
    c_prev, c = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        c_prev, c = c, (x - k - a) * c - a * k * c_prev
    return c if c.ndim else float(c)


def hermite_coefficients(n: int, var=1.0, mean=0.0) -> np.ndarray:
    """Monomial coefficients of ``H_n(x - mean; var)`` built with numpy polynomial arithmetic."""
    x = Polynomial([-mean, 1.0])
    h_prev, h = Polynomial([0.0]), Polynomial([1.0])
    for k in range(n):
        h_prev, h = h, x * h - var * k * h_prev
    return _padded(h, n)


def charlier_coefficients(n: int, a=1.0) -> np.ndarray:
    x = Polynomial([0.0, 1.0])
    c_prev, c = Polynomial([0.0]), Polynomial([1.0])
    for k in range(n):
        c_prev, c = c, (x - k - a) * c - a * k * c_prev
    return _padded(c, n)


def _padded(p: Polynomial, n: int) -> np.ndarray:
    out = np.zeros(n + 1)
    out[: len(p.coef)] = p.coef[: n + 1]
    return out


def json_number(v):
    """Integral rationals as ``int``, everything else as ``float``."""
    if isinstance(v, (int, Fraction)) and Fraction(v).denominator == 1:
        return int(v)
    return float(v)


def jacobi_to_json(j: JacobiData, condition: ConditionStarReport | None = None) -> dict:
    out = {
        "alpha": [json_number(v) for v in j.alpha],
        "omega": [json_number(v) for v in j.omega],
        "lambda": [json_number(v) for v in j.lam],
        "depth": j.depth,
    }
    if condition is not None:
        out["condition_star"] = condition.to_json()
    return out


__all__ = [
    "ConditionStarReport",
    "IllConditionedWarning",
    "JacobiData",
    "PolynomialFamily",
    "charlier",
    "charlier_coefficients",
    "check_condition_star",
    "eval_P",
    "eval_all",
    "family_for",
    "from_p_basis",
    "gram_matrix",
    "hermite",
    "hermite_coefficients",
    "jacobi_from_measure",
    "jacobi_to_json",
    "lambda_sequence",
    "to_p_basis",
]


def gram_matrix(fam: PolynomialFamily, nodes, weights, n_max: int | None = None) -> np.ndarray:
    """``[<P_i, P_j>]`` for ``i, j <= n_max`` under the discrete measure ``sum w_k delta_{x_k}``.

    With exact Jacobi data and integer nodes (Poisson lattice) the values
    ``P_n(x_k)`` are computed exactly: there the polynomials are the minimal
    solution of the recurrence and forward evaluation loses accuracy.
    """
    n_max = fam.max_degree if n_max is None else n_max
    nodes = np.asarray(nodes, dtype=float)
    if fam.jacobi.exact and np.all(nodes == np.round(nodes)):
        vals = np.array([[float(eval_P(fam, n, int(x))) for x in nodes] for n in range(n_max + 1)])
    else:
        vals = eval_all(fam, nodes, n_max)
    return (vals * np.asarray(weights)) @ vals.T
