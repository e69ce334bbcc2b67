"""Verification runs: every identity the library implements, checked for one measure.

:func:`run_checks` executes the checks in a fixed declaration order and
returns a :class:`Report` whose JSON form is byte-stable for a given
:class:`RunConfig`.  Random inputs come from ``numpy.random.default_rng``
seeded with ``(seed, check index)``, so skipping one check never shifts the
random stream of another.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .bargmann import (
    G_lambda,
    TildeOperators,
    coherent,
    coherent_norm,
    coherent_pairing,
    make_kernel,
    sb_series,
    sb_transform,
    verify_intertwining,
)
from .cmeasure import (
    analytic_l2_norm_squared,
    check_carleman,
    check_uniqueness_criterion,
    mixed_moments,
    monte_carlo_defect,
    radial_moment_quadrature,
    representing_measure,
    verify_norm_identity,
)
from .errors import IfockError, MeasureError
from .fock import (
    TruncatedFock,
    adjoint_defect,
    build_ladders,
    commutator_defect,
    creation_defect,
    intertwining_defect,
    u_inverse,
    u_isomorphism,
    verify_poisson_factorization,
)
from .measures import (
    GAUSSIAN,
    POISSON,
    RAW,
    MeasureSpec,
    check_hankel,
    hankel_minors,
    integrate,
    make_quadrature,
    moments,
    parse_measure,
)
from .orthopoly import (
    JacobiData,
    PolynomialFamily,
    charlier_coefficients,
    check_condition_star,
    gram_matrix,
    hermite_coefficients,
    jacobi_from_measure,
    json_number,
)

QUADRATURE_TOL = 1e-8
ALGEBRAIC_TOL = 1e-12

DEFAULT_TOLERANCES = {
    "hankel_positivity": ALGEBRAIC_TOL,
    "quadrature_mass": ALGEBRAIC_TOL,
    "moment_quadrature": 1e-10,
    "jacobi_recovery": ALGEBRAIC_TOL,
    "condition_star": 1e-6,
    "orthogonality": QUADRATURE_TOL,
    "ladder_adjoint": ALGEBRAIC_TOL,
    "ladder_commutator": ALGEBRAIC_TOL,
    "fock_intertwining": ALGEBRAIC_TOL,
    "fock_creation": ALGEBRAIC_TOL,
    "basis_correspondence": ALGEBRAIC_TOL,
    "tilde_commutator": ALGEBRAIC_TOL,
    "prop_a": 1e-9,
    "prop_b": 1e-9,
    "prop_c": 1e-9,
    "prop_d": 1e-9,
    "intertwining": 1e-9,
    "poisson_factorization_fock": ALGEBRAIC_TOL,
    "poisson_factorization_tilde": ALGEBRAIC_TOL,
    "coherent_closed_vs_series": 1e-9,
    "coherent_norm": QUADRATURE_TOL,
    "reproducing_kernel": QUADRATURE_TOL,
    "pointwise_vs_series": QUADRATURE_TOL,
    "unitarity": QUADRATURE_TOL,
    "norm_identity": 1e-9,
    "radial_moments": 1e-9,
    "gamma_table": 1e-9,
    "gamma_hermitian": ALGEBRAIC_TOL,
    "gamma_psd": ALGEBRAIC_TOL,
    "gamma_monte_carlo": 1e-3,
    "end_to_end_isometry": QUADRATURE_TOL,
    "uniqueness_criterion": 0.05,
    "carleman": 1e-2,
}

FACTORIZATION_DIMENSION = 12
IDENTITY_MAX_N = 10
UNITARITY_SAMPLES = 50
RANDOM_Z_SAMPLES = 20
NORM_IDENTITY_MONOMIALS = 8
CRITERION_N = 40
CARLEMAN_N = 10_000
GAMMA_ORDER = 6
MC_ORDER = 4


class ConfigError(IfockError, ValueError):
    """Invalid run configuration (exit code 2 on the command line)."""


@dataclass
class RunConfig:
    """Settings for one verification run; mirrors the JSON config file."""

    measure: str
    depth: int = 20
    max_degree: int = 12
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    format: str = "json"
    output: str | None = None

    def __post_init__(self):
        if not isinstance(self.depth, int) or self.depth < 2:
            raise ConfigError(f"depth must be an integer >= 2, got {self.depth!r}")
        if not isinstance(self.max_degree, int) or self.max_degree < 0:
            raise ConfigError(f"max_degree must be a non-negative integer, got {self.max_degree!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        for name, tol in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown check {name!r} in tolerances")
            if not isinstance(tol, (int, float)) or not tol > 0 or not math.isfinite(tol):
                raise ConfigError(f"tolerance for {name} must be positive, got {tol!r}")
        # raises SpecParseError, which is also a configuration error
        parse_measure(self.measure)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "measure" not in data:
            raise ConfigError("config needs a 'measure' entry")
        return cls(**data)

    def spec(self) -> MeasureSpec:
        return parse_measure(self.measure)

    def tolerance(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def to_json(self) -> dict:
        out = asdict(self)
        out["tolerances"] = {k: self.tolerance(k) for k in DEFAULT_TOLERANCES}
        return out


def _finite(x):
    """JSON-safe float: non-finite values become strings."""
    x = float(x)
    return x if math.isfinite(x) else str(x)


@dataclass(frozen=True)
class CheckRecord:
    name: str
    defect: float
    tolerance: float
    passed: bool
    notes: str = ""

    def to_json(self, key: str = "name") -> dict:
        return {key: self.name, "defect": _finite(self.defect), "tolerance": self.tolerance,
                "pass": self.passed, "notes": self.notes}


@dataclass
class Report:
    config: dict
    records: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json(self) -> dict:
        return {
            "tool": "ifock",
            "version": self.version,
            "config": self.config,
            "checks": [r.to_json() for r in self.records],
            "skipped": self.skipped,
            "pass": self.passed,
        }

    def dumps(self, fmt: str = "json") -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2) + "\n"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "defect", "tolerance", "pass"])
        for r in self.records:
            writer.writerow([r.name, repr(float(r.defect)), repr(r.tolerance), str(r.passed).lower()])
        return buf.getvalue()


class Skip(Exception):
    """Raised by a check that does not apply to the measure at hand."""


def _rel(a, b, floor: float = 1e-300) -> float:
    return abs(a - b) / max(abs(b), floor)


def _coeff_gap(got, want) -> float:
    n = max(len(got), len(want))
    got = [complex(v) for v in got] + [0j] * (n - len(got))
    want = [complex(v) for v in want] + [0j] * (n - len(want))
    return max(abs(g - w) for g, w in zip(got, want))


def _unit(n: int, size: int | None = None) -> list:
    size = n + 1 if size is None else size
    e = [0] * size
    e[n] = 1
    return e


def _named_coefficients(spec: MeasureSpec, n: int) -> np.ndarray:
    """Monomial coefficients of the shifted Hermite or Charlier polynomial of degree n."""
    if spec.kind == GAUSSIAN:
        return hermite_coefficients(n, float(spec.variance), float(spec.mean))
    return charlier_coefficients(n, float(spec.a))


class Verifier:
    """Runs the checks of :data:`CHECKS` for one configuration."""

    def __init__(self, config: RunConfig, gamma_order: int = GAMMA_ORDER):
        self.config = config
        self.gamma_order = gamma_order
        self.spec = config.spec()
        if self.spec.kind == RAW:
            available = len(self.spec.moments) // 2
            if available < 2:
                raise ConfigError("raw spec needs at least 4 moments")
            # surfaces PositivityViolation before any check runs
            check_hankel(self.spec.moments, available - 1)
            self.depth = min(config.depth, available)
        else:
            self.depth = config.depth
        self.jacobi = jacobi_from_measure(self.spec, self.depth, exact=True)
        self.family = PolynomialFamily.from_jacobi(self.jacobi)
        self._float_family = None

    @property
    def named(self) -> bool:
        return self.spec.kind in (GAUSSIAN, POISSON)

    def float_family(self) -> PolynomialFamily:
        if self._float_family is None:
            j = self.jacobi
            self._float_family = PolynomialFamily.from_jacobi(JacobiData.from_recurrence(
                [float(a) for a in j.alpha], [float(w) for w in j.omega]))
        return self._float_family

    def rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, index])

    def require_named(self):
        if not self.named:
            raise Skip("needs a Gaussian or Poisson measure")

    def run(self, names=None) -> Report:
        """Run the checks in declaration order, optionally restricted to ``names``."""
        report = Report(self.config.to_json())
        for index, (name, method) in enumerate(CHECKS):
            if names is not None and name not in names:
                continue
            tol = self.config.tolerance(name)
            try:
                out = method(self, tol, self.rng(index))
            except Skip as exc:
                report.skipped.append({"name": name, "reason": str(exc)})
                continue
            except MeasureError:
                raise
            except IfockError as exc:
                out = (math.inf, False, f"{type(exc).__name__}: {exc}")
            defect, passed, notes = out if len(out) == 3 else (*out, "")
            if passed is None:
                passed = bool(defect <= tol)
            report.records.append(CheckRecord(name, float(defect), tol, bool(passed), notes))
        return report

    # measures

    def hankel_positivity(self, tol, rng):
        order = self.depth - 1
        seq = moments(self.spec, 2 * order, exact=True) if self.named else list(self.spec.moments)
        minors = hankel_minors(seq, order)
        worst = min(minors)
        return (0.0 if worst > 0 else 1.0), None, f"{len(minors)} leading minors, smallest {float(worst):.3e}"

    def quadrature_mass(self, tol, rng):
        q = make_quadrature(self.spec, 2 * self.depth - 1)
        return abs(float(np.sum(q.weights)) - 1.0), None

    def moment_quadrature(self, tol, rng):
        q = make_quadrature(self.spec, 2 * self.depth - 1)
        kmax = q.exactness_degree
        exact = moments(self.spec, kmax, exact=True) if self.named else self.spec.moments
        worst = 0.0
        for k in range(kmax + 1):
            got = integrate(q, lambda x, k=k: x ** k)
            scale = max(abs(float(exact[k])), float(np.dot(q.weights, np.abs(q.nodes) ** k)))
            worst = max(worst, abs(got - float(exact[k])) / scale)
        return worst, None, f"k <= {kmax}"

    # orthopoly

    def jacobi_recovery(self, tol, rng):
        self.require_named()
        raw = MeasureSpec.raw(moments(self.spec, 2 * self.depth - 1, exact=True))
        got = jacobi_from_measure(raw, self.depth, exact=True)
        if self.spec.kind == GAUSSIAN:
            m, var = Fraction(self.spec.mean), Fraction(self.spec.variance)
            alpha = [m] * self.depth
            omega = [var * n for n in range(1, self.depth)]
        else:
            a = Fraction(self.spec.a)
            alpha = [n + a for n in range(self.depth)]
            omega = [a * n for n in range(1, self.depth)]
        gap = max(abs(float(x - y)) for x, y in zip(list(got.alpha) + list(got.omega), alpha + omega))
        return gap, None, "raw moments -> exact Jacobi data vs closed form"

    def condition_star(self, tol, rng):
        rep = check_condition_star(self.jacobi.lam, threshold=tol)
        return rep.inf_estimate, rep.satisfied, f"min lambda_n^(1/n) at n={rep.argmin}; pass means above tolerance"

    def orthogonality(self, tol, rng):
        d = self.depth
        q = make_quadrature(self.spec, 2 * (d - 1))
        fam = self.family if self.spec.kind == POISSON else self.float_family()
        gram = gram_matrix(fam, q.nodes, q.weights, d - 1)
        lam = self.float_family().jacobi.lambda_array()
        defect = float(np.max(np.abs(gram - np.diag(lam)))) / float(np.max(lam))
        return defect, None, f"i, j <= {d - 1}; relative to max lambda"

    # fock

    def _fock(self):
        f = TruncatedFock(self.jacobi)
        return f, build_ladders(f, exact=True)

    def ladder_adjoint(self, tol, rng):
        f, l = self._fock()
        return adjoint_defect(f, l), None, "interior block"

    def ladder_commutator(self, tol, rng):
        f, l = self._fock()
        return commutator_defect(f, l), None, "interior block"

    def fock_intertwining(self, tol, rng):
        f, l = self._fock()
        worst = max(intertwining_defect(f, l, list(f.family.coeffs[n])) for n in range(f.dimension - 1))
        return worst, None, "U (A + A* + alpha_N) U^-1 P_n = x P_n"

    def fock_creation(self, tol, rng):
        f, l = self._fock()
        return creation_defect(f, l), None, "U A* U^-1 P_n = P_{n+1}"

    def basis_correspondence(self, tol, rng):
        f, _ = self._fock()
        worst = 0.0
        for n in range(f.dimension):
            poly = u_isomorphism(f, u_inverse(f, f.family.coeffs[n]))
            worst = max(worst, _coeff_gap(sb_series(self.family, poly).coeffs, _unit(n)))
        return worst, None, "S(U Phi_n) = z^n"

    # bargmann

    def tilde_commutator(self, tol, rng):
        return TildeOperators(self.jacobi).commutator_defect(), None

    def _prop_depth(self) -> int:
        return min(IDENTITY_MAX_N, self.depth - 2)

    def prop_a(self, tol, rng):
        self.require_named()
        n_max = self._prop_depth()
        fam = self.float_family()
        worst = 0.0
        for n in range(n_max + 1):
            got = sb_series(fam, _named_coefficients(self.spec, n)).coeffs
            worst = max(worst, _coeff_gap(got, _unit(n)))
        return worst, None, f"closed-form polynomials, n <= {n_max}"

    def _ladder_image(self, n: int, which: str):
        """``S U X U^-1 P_n`` for X in {A, A*}, with the matching tilde operator."""
        f, l = self._fock()
        mat = l.A if which == "A" else l.A_star
        v = u_inverse(f, f.family.coeffs[n])
        poly = u_isomorphism(f, type(v)(mat @ v.coeffs))
        got = sb_series(self.family, poly).coeffs
        tilde = TildeOperators(self.jacobi)
        e = _unit(n, self.depth)
        via_tilde = tilde.annihilate(e) if which == "A" else tilde.create(e)
        return got, via_tilde

    def prop_b(self, tol, rng):
        self.require_named()
        worst = 0.0
        scale = Fraction(self.spec.variance if self.spec.kind == GAUSSIAN else self.spec.a)
        for n in range(self._prop_depth() + 1):
            got, via_tilde = self._ladder_image(n, "A")
            want = [0] * max(n, 1)
            if n >= 1:
                want[n - 1] = scale * n
            worst = max(worst, _coeff_gap(got, want), _coeff_gap(via_tilde, want))
        return worst, None, "annihilation maps z^n to scale * n z^(n-1)"

    def prop_c(self, tol, rng):
        self.require_named()
        worst = 0.0
        for n in range(self._prop_depth() + 1):
            got, via_tilde = self._ladder_image(n, "A*")
            worst = max(worst, _coeff_gap(got, _unit(n + 1)), _coeff_gap(via_tilde, _unit(n + 1)))
        return worst, None, "creation maps z^n to z^(n+1)"

    def prop_d(self, tol, rng):
        self.require_named()
        rep = verify_intertwining(self.spec, self._prop_depth() + 2, tolerance=tol)
        return rep.pattern_defect, None, "coefficient pattern of the image of x P_n"

    def intertwining(self, tol, rng):
        rep = verify_intertwining(self.spec, self.depth, tolerance=tol)
        return rep.max_defect, None, f"n <= {self.depth - 2}"

    def _require_poisson(self):
        if self.spec.kind != POISSON:
            raise Skip("Poisson measures only")

    def poisson_factorization_fock(self, tol, rng):
        self._require_poisson()
        f = TruncatedFock(self.jacobi, min(FACTORIZATION_DIMENSION, self.depth))
        rep = verify_poisson_factorization(build_ladders(f), self.spec.a, tol)
        return rep.interior_max, None, f"D = {f.dimension}, interior block"

    def poisson_factorization_tilde(self, tol, rng):
        self._require_poisson()
        d = min(FACTORIZATION_DIMENSION, self.depth)
        rep = TildeOperators(self.jacobi, d).poisson_factorization(self.spec.a, tol)
        return rep.interior_max, None, f"D = {d}, interior block"

    def coherent_closed_vs_series(self, tol, rng):
        self.require_named()
        closed = make_kernel(self.spec)
        series = make_kernel(self.spec, method="series")
        if self.spec.kind == GAUSSIAN:
            sd = math.sqrt(float(self.spec.variance))
            xs = float(self.spec.mean) + sd * np.linspace(-3, 3, 13)
        else:
            xs = np.arange(0, 13, dtype=float)
        # Charlier values at integer x are the minimal solution of the
        # recurrence, so the series route is only stable for |z| < a
        shrink = self._z_scale()
        if self.spec.kind == POISSON:
            shrink = min(shrink, 0.6 * float(self.spec.a))
        worst = 0.0
        for z in (0.5, -0.8 + 0.3j, 1.2j, 1.5 - 0.5j):
            z *= shrink
            a = np.asarray(coherent(closed, xs, z))
            b = np.asarray(coherent(series, xs, z))
            worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
        return worst, None, "relative, over a grid of x and four z"

    def _z_scale(self) -> float:
        # |z| in units of sqrt(scale): G(z) = exp(z / scale) for both families
        return min(1.0, math.sqrt(float(self._scale())))

    def coherent_norm(self, tol, rng):
        self.require_named()
        r = self._z_scale()
        worst = 0.0
        for z in (0.3 * r, (1.0 + 0.5j) * r, -1.5j * r):
            got = coherent_norm(self.spec, z)
            want = math.sqrt(G_lambda(self.spec, abs(z) ** 2).real)
            worst = max(worst, _rel(got, want))
        return worst, None, "||E(., z)|| against G(|z|^2)^(1/2)"

    def reproducing_kernel(self, tol, rng):
        self.require_named()
        r = self._z_scale()
        worst = 0.0
        for z, w in ((0.5, 0.7), (1.0 + 0.5j, -0.3 + 0.8j), (-1.2j, 0.9)):
            z, w = z * r, w * r
            got = coherent_pairing(self.spec, z, w)
            want = G_lambda(self.spec, z * w)
            worst = max(worst, _rel(got, want))
        return worst, None, "<E(., z), E(., w)> against sum (z w)^n / lambda_n"

    def pointwise_vs_series(self, tol, rng):
        fam = self.float_family()
        kernel = make_kernel(self.spec) if self.named else make_kernel(self.spec, self.depth)
        deg = min(6, self.depth - 1, max((self.depth - 1) // 2, 0))
        # radius 2, shrunk for narrow measures where E(x, z) ~ exp(z x / scale)
        radius = 2.0 * min(1.0, math.sqrt(2 * float(self._scale()))) if self.named else 2.0
        worst = 0.0
        for _ in range(RANDOM_Z_SAMPLES):
            coeffs = rng.uniform(-1, 1, deg + 1)
            z = radius * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            got = sb_transform(self.spec, coeffs, z, kernel=kernel)
            series = sb_series(fam, coeffs)
            c = series.complex_coeffs()
            want = complex(series(z))
            scale = float(np.sum(np.abs(c) * abs(z) ** np.arange(len(c))))
            worst = max(worst, abs(got - want) / scale)
        return worst, None, f"{RANDOM_Z_SAMPLES} random z with |z| <= {radius:g}, degree {deg}"

    def unitarity(self, tol, rng):
        deg_max = min(self.config.max_degree, self.depth - 1)
        fam = self.float_family()
        q = make_quadrature(self.spec, 2 * deg_max)
        worst = 0.0
        for _ in range(UNITARITY_SAMPLES):
            deg = int(rng.integers(0, deg_max + 1))
            coeffs = rng.uniform(-1, 1, deg + 1)
            l2 = math.sqrt(integrate(q, lambda x: np.polynomial.polynomial.polyval(x, coeffs) ** 2))
            worst = max(worst, _rel(sb_series(fam, coeffs).norm(), l2))
        return worst, None, f"{UNITARITY_SAMPLES} random polynomials, degree <= {deg_max}"

    # cmeasure

    def norm_identity(self, tol, rng):
        self.require_named()
        polys = [_unit(n) for n in range(NORM_IDENTITY_MONOMIALS + 1)]
        polys += [rng.uniform(-1, 1, int(rng.integers(1, 9))) + 1j * rng.uniform(-1, 1, 1) for _ in range(20)]
        rep = verify_norm_identity(self.spec, polys, tol)
        return rep.max_defect, None, f"z^n for n <= {NORM_IDENTITY_MONOMIALS} and 20 random polynomials"

    def _scale(self):
        return Fraction(self.spec.variance if self.spec.kind == GAUSSIAN else self.spec.a)

    def radial_moments(self, tol, rng):
        self.require_named()
        mu = representing_measure(self.spec)
        s = float(self._scale())
        worst = 0.0
        for n in range(self.gamma_order + 1):
            exact = s ** n * math.factorial(n)
            worst = max(worst, _rel(radial_moment_quadrature(mu, n), exact))
        return worst, None, f"Laguerre rule in u = r^2 against scale^n n!, n <= {self.gamma_order}"

    def gamma_diagonal(self) -> list:
        """Exact ``scale^n n!`` for n up to the gamma order."""
        s = self._scale()
        return [json_number(s ** n * math.factorial(n)) for n in range(self.gamma_order + 1)]

    def gamma_table(self, tol, rng):
        self.require_named()
        mu = representing_measure(self.spec)
        g = mixed_moments(mu, self.gamma_order).gamma
        s = float(self._scale())
        worst = 0.0
        for m in range(self.gamma_order + 1):
            for n in range(self.gamma_order + 1):
                want = s ** n * math.factorial(n) if m == n else 0.0
                worst = max(worst, abs(g[m, n] - want) / (s ** n * math.factorial(n)))
        return worst, None, f"m, n <= {self.gamma_order}"

    def gamma_hermitian(self, tol, rng):
        self.require_named()
        return mixed_moments(representing_measure(self.spec), self.gamma_order).hermitian_defect(), None

    def gamma_psd(self, tol, rng):
        self.require_named()
        g = mixed_moments(representing_measure(self.spec), self.gamma_order).gamma
        low = float(np.min(np.linalg.eigvalsh((g + g.conj().T) / 2)))
        return max(0.0, -low), None, f"smallest eigenvalue {low:.3e}"

    def gamma_monte_carlo(self, tol, rng):
        self.require_named()
        mu = representing_measure(self.spec)
        return monte_carlo_defect(mu, min(MC_ORDER, self.gamma_order), seed=self.config.seed), None, "scrambled Sobol, 2^20 points, off-diagonal"

    def end_to_end_isometry(self, tol, rng):
        self.require_named()
        deg_max = min(10, self.depth - 1)
        fam = self.float_family()
        mu = representing_measure(self.spec)
        q = make_quadrature(self.spec, 2 * deg_max)
        worst = 0.0
        for _ in range(20):
            coeffs = rng.uniform(-1, 1, int(rng.integers(0, deg_max + 1)) + 1)
            lhs = integrate(q, lambda x: np.polynomial.polynomial.polyval(x, coeffs) ** 2)
            rhs = analytic_l2_norm_squared(mu, sb_series(fam, coeffs).complex_coeffs())
            worst = max(worst, _rel(rhs, lhs))
        return worst, None, f"20 random real polynomials, degree <= {deg_max}"

    def _log_lambda(self):
        s = float(self._scale())
        return lambda n: n * math.log(s) + math.lgamma(n + 1)

    def uniqueness_criterion(self, tol, rng):
        self.require_named()
        log_l = self._log_lambda()
        diag = [math.exp(log_l(n)) for n in range(CRITERION_N + 1)]
        rep = check_uniqueness_criterion(diag, CRITERION_N, rel_limit=tol)
        start = rep.ratios[CRITERION_N // 2 - 1]
        return abs(rep.limit_estimate) / start, rep.satisfied, (
            f"extrapolated limit {rep.limit_estimate:.3e}, N = {CRITERION_N}; {rep.note}")

    def carleman(self, tol, rng):
        self.require_named()
        rep = check_carleman(log_lambda=self._log_lambda(), N=CARLEMAN_N, growth_threshold=tol)
        return rep.partial_sum, rep.diverging, (
            f"partial sum at N = {CARLEMAN_N}, sqrt fit R^2 = {rep.r_squared:.6f}; {rep.note}")


CHECKS = [
    (name, getattr(Verifier, name))
    for name in DEFAULT_TOLERANCES
]


CMEASURE_CHECKS = (
    "radial_moments",
    "gamma_table",
    "gamma_hermitian",
    "gamma_psd",
    "gamma_monte_carlo",
    "norm_identity",
    "end_to_end_isometry",
    "uniqueness_criterion",
    "carleman",
)


def run_checks(config: RunConfig) -> Report:
    """Run every applicable check; raises measure-validity errors unchanged."""
    return Verifier(config).run()
