"""Truncated one-mode interacting Fock space.

The space of dimension ``D`` spans the number vectors ``Phi_0..Phi_{D-1}``
with ``<Phi_n, Phi_m> = delta_{nm} lambda_n``.  Ladder operators act by

    A Phi_n = omega_n Phi_{n-1},   A* Phi_n = Phi_{n+1},

and the creation operator is truncated by ``A* Phi_{D-1} = 0``.  Operator
identities are therefore only compared on the interior block of indices
``0..D-3``; defects on the boundary rows are reported separately.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegreeOverflow, DepthUnavailable
from .orthopoly import JacobiData, PolynomialFamily, from_p_basis, to_p_basis


@dataclass(frozen=True)
class FockVector:
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs))

    def __len__(self):
        return len(self.coeffs)


class TruncatedFock:
    """Finite slice of Gamma(lambda) built on a :class:`JacobiData`."""

    def __init__(self, jacobi: JacobiData, dimension: int | None = None):
        dimension = jacobi.depth if dimension is None else dimension
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        if dimension > jacobi.depth:
            raise DepthUnavailable(f"dimension {dimension} needs Jacobi data of depth >= {dimension}")
        self.jacobi = jacobi.truncate(dimension)
        self.dimension = dimension
        self.family = PolynomialFamily.from_jacobi(self.jacobi)

    @property
    def lam(self) -> np.ndarray:
        return self.jacobi.lambda_array()

    def number_vector(self, n: int) -> FockVector:
        if not 0 <= n < self.dimension:
            raise IndexError(f"Phi_{n} outside dimension {self.dimension}")
        v = np.zeros(self.dimension)
        v[n] = 1.0
        return FockVector(v)

    def vacuum(self) -> FockVector:
        return self.number_vector(0)

    def inner(self, u: FockVector, v: FockVector) -> complex:
        """``sum_n lambda_n conj(u_n) v_n``, conjugate-linear in the first slot."""
        return complex(np.sum(self.lam * np.conj(u.coeffs) * v.coeffs))

    def norm(self, v: FockVector) -> float:
        return float(np.sqrt(np.sum(self.lam * np.abs(v.coeffs) ** 2)))


@dataclass(frozen=True)
class LadderMatrices:
    A: np.ndarray
    A_star: np.ndarray
    Num: np.ndarray
    AlphaN: np.ndarray

    @property
    def dimension(self) -> int:
        return self.A.shape[0]

    @property
    def exact(self) -> bool:
        return self.A.dtype == object


def build_ladders(f: TruncatedFock, exact: bool = False) -> LadderMatrices:
    """Matrices of A, A*, N and alpha_N in the basis ``Phi_0..Phi_{D-1}``.

    Column ``n`` holds the image of ``Phi_n``.  With ``exact=True`` (rational
    Jacobi data only) the matrices are object arrays of Fractions.
    """
    d = f.dimension
    j = f.jacobi
    if exact:
        if not j.exact:
            raise ValueError("exact ladders need exact Jacobi data")
        zero = np.full((d, d), Fraction(0), dtype=object)
        A, A_star, Num, AlphaN = (zero.copy() for _ in range(4))
        one = Fraction(1)
    else:
        A, A_star, Num, AlphaN = (np.zeros((d, d)) for _ in range(4))
        one = 1.0
    for n in range(d):
        if n >= 1:
            A[n - 1, n] = j.omega[n - 1] if exact else float(j.omega[n - 1])
        if n + 1 < d:
            A_star[n + 1, n] = one
        Num[n, n] = one * n
        AlphaN[n, n] = j.alpha[n] if exact else float(j.alpha[n])
    return LadderMatrices(A, A_star, Num, AlphaN)


def field_matrix(l: LadderMatrices) -> np.ndarray:
    """``A + A* + alpha_N``, the Fock-side image of multiplication by x."""
    return l.A + l.A_star + l.AlphaN


def _apply(mat, v: FockVector) -> FockVector:
    return FockVector(mat @ v.coeffs)


def u_isomorphism(f: TruncatedFock, v: FockVector):
    """Monomial coefficients of ``U v = sum_n v_n P_n``."""
    if len(v) != f.dimension:
        raise ValueError(f"vector of length {len(v)} does not match dimension {f.dimension}")
    return from_p_basis(f.family, list(v.coeffs))


def u_inverse(f: TruncatedFock, poly) -> FockVector:
    """``U^{-1}`` of a polynomial given by monomial coefficients."""
    poly = list(poly)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    if len(poly) > f.dimension:
        raise DegreeOverflow(f"degree {len(poly) - 1} does not fit in dimension {f.dimension}")
    c = to_p_basis(f.family, poly)
    out = np.zeros(f.dimension, dtype=object if isinstance(c, list) else np.asarray(c).dtype)
    if isinstance(c, list):
        out[:] = Fraction(0)
    out[: len(c)] = c
    return FockVector(out)


def interior(mat, dimension: int | None = None) -> np.ndarray:
    """The block of indices ``0..D-3`` on which truncated identities hold."""
    d = mat.shape[0] if dimension is None else dimension
    k = max(d - 2, 0)
    return mat[:k, :k]


def _max_abs(mat) -> float:
    if mat.size == 0:
        return 0.0
    return float(max(abs(float(v)) for v in np.ravel(mat)))


def adjoint_defect(f: TruncatedFock, l: LadderMatrices) -> float:
    """Max entrywise gap between ``(A*)^T Lambda`` and ``Lambda A`` on the interior block.

    ``<A* u, v>_lambda = <u, A v>_lambda`` for all u, v is equivalent to
    ``(A*)^T Lambda = Lambda A`` with ``Lambda = diag(lambda)``.  The gap is
    relative to the largest lambda involved.
    """
    lam = np.diag(f.lam)
    block = interior(l.A_star.T.astype(float) @ lam - lam @ l.A.astype(float))
    scale = float(np.max(f.lam[: block.shape[0] + 1])) if block.size else 1.0
    return _max_abs(block) / scale


def commutator_defect(f: TruncatedFock, l: LadderMatrices) -> float:
    """Gap between ``[A, A*]`` and ``diag(omega_{n+1} - omega_n)`` on the interior block."""
    d = f.dimension
    comm = l.A @ l.A_star - l.A_star @ l.A
    j = f.jacobi
    expected = np.zeros((d, d))
    for n in range(max(d - 2, 0)):
        expected[n, n] = float(j.omega_at(n + 1)) - float(j.omega_at(n))
    return _max_abs(interior(comm.astype(float) - expected))


def intertwining_defect(f: TruncatedFock, l: LadderMatrices, poly) -> float:
    """Coefficient gap between ``U(field U^{-1} p)`` and ``x p`` for deg p <= D-2.

    Runs in rational arithmetic when the ladders are exact and ``poly`` has
    rational coefficients.
    """
    poly = list(poly)
    if len(poly) > f.dimension - 1:
        raise DegreeOverflow("x p must fit in the truncated space: need deg p <= D-2")
    field = field_matrix(l)
    if not l.exact:
        poly = [float(c) for c in poly]
    v = u_inverse(f, poly)
    coeffs = v.coeffs if l.exact else v.coeffs.astype(float)
    image = list(u_isomorphism(f, _apply(field, FockVector(coeffs))))
    xp = [0] + poly
    n = max(len(image), len(xp))
    image += [0] * (n - len(image))
    xp += [0] * (n - len(xp))
    return max(abs(float(a - b)) for a, b in zip(image, xp))


def creation_defect(f: TruncatedFock, l: LadderMatrices) -> float:
    """Max coefficient gap of ``U A* U^{-1} P_n = P_{n+1}`` over n <= D-2."""
    worst = 0.0
    for n in range(f.dimension - 1):
        pn = list(f.family.coeffs[n])
        if not l.exact:
            pn = [float(c) for c in pn]
        v = u_inverse(f, pn)
        coeffs = v.coeffs if l.exact else v.coeffs.astype(float)
        got = list(u_isomorphism(f, _apply(l.A_star, FockVector(coeffs))))
        want = list(f.family.coeffs[n + 1])
        worst = max(worst, max(abs(float(a - b)) for a, b in zip(got, want)))
    return worst


@dataclass(frozen=True)
class FactorizationReport:
    """Defects of ``alpha_N = A*A / a + a = N + a`` and the product factorisation."""

    a: float
    interior: dict
    full: dict
    tolerance: float

    @property
    def interior_max(self) -> float:
        return max(self.interior.values())

    @property
    def passed(self) -> bool:
        return self.interior_max <= self.tolerance

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "interior": self.interior,
            "full": self.full,
            "interior_max": self.interior_max,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def factorization_defects(A, A_star, Num, AlphaN, a, tolerance: float = 1e-12) -> FactorizationReport:
    """Shared check used for both Gamma(lambda) and the coefficient side."""
    d = A.shape[0]
    a = float(a)
    A, A_star, Num, AlphaN = (np.asarray(m, dtype=float) for m in (A, A_star, Num, AlphaN))
    eye = np.eye(d)
    s = np.sqrt(a)
    checks = {
        "alpha_from_ladders": AlphaN - (A_star @ A / a + a * eye),
        "alpha_from_number": AlphaN - (Num + a * eye),
        "field_factorization": (A + A_star + AlphaN) - (A_star / s + s * eye) @ (A / s + s * eye),
    }
    inner = {k: _max_abs(interior(v)) for k, v in checks.items()}
    full = {k: _max_abs(v) for k, v in checks.items()}
    return FactorizationReport(a, inner, full, tolerance)


def verify_poisson_factorization(l: LadderMatrices, a, tolerance: float = 1e-12) -> FactorizationReport:
    """Check ``alpha_N = (1/a) A*A + a = N + a`` and
    ``A* + A + alpha_N = (A*/sqrt(a) + sqrt(a)) (A/sqrt(a) + sqrt(a))``.

    Meant for ladders built from Poisson(a).  Other measures are not an error;
    the defects simply come out large.
    """
    return factorization_defects(l.A, l.A_star, l.Num, l.AlphaN, a, tolerance)


def _pairs(mat) -> list:
    return [[[float(np.real(v)), float(np.imag(v))] for v in row] for row in mat]


def ladders_to_json(l: LadderMatrices) -> dict:
    """Dense row-major matrices with ``[re, im]`` entries."""
    return {
        "dimension": l.dimension,
        "A": _pairs(l.A),
        "A_star": _pairs(l.A_star),
        "Num": _pairs(l.Num),
        "AlphaN": _pairs(l.AlphaN),
    }
