"""Dagger (modulus-squared) and double-dagger (square) fibre conditions.

For the frame ``e_1 = 1, e_2 = z`` the conditions at a point ``c`` read

* ``sum_{p(zeta)=c} zeta = 0`` for both systems, and
* ``sum |zeta|^2 = n`` (dagger) or ``sum zeta^2 = n`` (double dagger),

with ``n = deg p`` roots counted by multiplicity. The double-dagger system is
decided exactly from coefficients (``a_{n-1} = 0`` and ``a_{n-2} = -n a_n / 2``);
the dagger system can only be refuted pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from .dynamics import analyze_fixed_point, sample_basin
from .polynomial import Polynomial, format_polynomial, multiply
from .roots import find_roots

System = Literal["dagger", "ddagger"]

COEFF_TOL = 1e-12
POINT_TOL = 1e-8
REAL_TOL = 1e-8


class PreconditionError(ValueError):
    """An input polynomial does not meet an operation's stated hypothesis."""


@dataclass(frozen=True)
class DdaggerVerdict:
    a_nm1_zero: bool
    a_nm2_ok: bool
    satisfied: bool
    in_scope: bool = True

    @property
    def status(self) -> str:
        if not self.in_scope:
            return "out-of-theorem-scope"
        return "satisfied" if self.satisfied else "not-satisfied"

    def to_json(self) -> dict:
        return {"a_nm1_zero": self.a_nm1_zero, "a_nm2_ok": self.a_nm2_ok, "satisfied": self.satisfied}


def check_ddagger_coeffs(p: Polynomial, tol: float = COEFF_TOL) -> DdaggerVerdict:
    n = p.degree
    if n < 3:
        # raw flags are still meaningful for the sums; the classification is not
        top1 = abs(p.coefficient(n - 1)) <= tol if n >= 1 else False
        return DdaggerVerdict(top1, False, False, in_scope=False)
    top1 = abs(p.coeffs[n - 1]) <= tol
    top2 = abs(p.coeffs[n - 2] + n * p.leading / 2) <= tol
    return DdaggerVerdict(top1, top2, top1 and top2)


@dataclass(frozen=True)
class ConditionWitness:
    """Fibre sums over the solutions of ``p(zeta) = point``."""

    point: complex
    m: int
    sum_one: complex
    sum_zeta: complex
    sum_conj_zeta: complex
    sum_zeta_sq: complex
    sum_mod_sq: float
    all_real: bool
    system: System = "ddagger"
    tol: float = POINT_TOL

    @property
    def deviation(self) -> float:
        target = self.sum_mod_sq if self.system == "dagger" else self.sum_zeta_sq
        return max(abs(self.sum_zeta), abs(target - self.m))

    @property
    def satisfied(self) -> bool:
        return self.deviation <= self.tol

    def holds(self, system: System) -> bool:
        target = self.sum_mod_sq if system == "dagger" else self.sum_zeta_sq
        return max(abs(self.sum_zeta), abs(target - self.m)) <= self.tol

    def to_json(self) -> dict:
        return {
            "c": [self.point.real, self.point.imag],
            "sum_zeta": [self.sum_zeta.real, self.sum_zeta.imag],
            "sum_zeta_sq": [self.sum_zeta_sq.real, self.sum_zeta_sq.imag],
            "sum_mod_sq": self.sum_mod_sq,
        }


def _is_real(z: complex) -> bool:
    return abs(z.imag) <= REAL_TOL * max(1.0, abs(z))


def check_point_condition(p: Polynomial, c: complex, system: System = "dagger", tol: float = POINT_TOL) -> ConditionWitness:
    """Solve ``p(zeta) = c`` and collect the witness sums for ``system``.

    The first condition (``sum 1 = M(c)``) holds for every polynomial and is
    recorded in ``sum_one`` rather than tested.
    """
    if system not in ("dagger", "ddagger"):
        raise ValueError(f"unknown system {system!r}")
    c = complex(c)
    zeta = find_roots(p, c).as_array()
    return ConditionWitness(
        point=c,
        m=len(zeta),
        sum_one=complex(len(zeta)),
        sum_zeta=complex(zeta.sum()),
        sum_conj_zeta=complex(np.conj(zeta).sum()),
        sum_zeta_sq=complex((zeta**2).sum()),
        sum_mod_sq=float((np.abs(zeta) ** 2).sum()),
        all_real=all(_is_real(complex(z)) for z in zeta),
        system=system,
        tol=tol,
    )


def real_solution_probe(p: Polynomial, c: complex) -> bool:
    """True iff every solution of ``p(zeta) = c`` is real to ``1e-8`` relative."""
    return all(_is_real(z) for z in find_roots(p, complex(c)))


@dataclass(frozen=True)
class ScanReport:
    system: System
    points_tested: int
    worst_deviation: float
    failures: tuple[ConditionWitness, ...]
    per_point: tuple[ConditionWitness, ...] = field(repr=False, default=())

    @property
    def refuted(self) -> bool:
        return bool(self.failures)

    @property
    def verdict(self) -> str:
        # a finite scan never proves a condition on the whole basin
        if self.refuted:
            return f"refuted at {len(self.failures)} of {self.points_tested} points"
        return f"no counterexample found in {self.points_tested} samples"

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "points": self.points_tested,
            "worst_deviation": self.worst_deviation,
            "verdict": self.verdict,
            "failures": [w.to_json() for w in self.failures],
        }


def scan_points(p: Polynomial, points: Iterable[complex], system: System, tol: float = POINT_TOL) -> ScanReport:
    witnesses = tuple(check_point_condition(p, c, system, tol) for c in points)
    failures = tuple(sorted((w for w in witnesses if not w.satisfied), key=lambda w: (abs(w.point), w.point.real, w.point.imag)))
    worst = max((w.deviation for w in witnesses), default=0.0)
    return ScanReport(system, len(witnesses), worst, failures, witnesses)


def scan_basin(
    p: Polynomial,
    system: System,
    samples: int = 100,
    seed: int = 42,
    include: Iterable[complex] = (),
    tol: float = POINT_TOL,
    stop_at_first_failure: bool = False,
) -> ScanReport:
    """Test ``system`` at ``samples`` seeded basin points plus any ``include`` points."""
    if not analyze_fixed_point(p).attracting:
        raise PreconditionError(f"{p} has no attracting fixed point at 0")
    points = list(include) + sample_basin(p, samples, seed)
    if not stop_at_first_failure:
        return scan_points(p, points, system, tol)
    seen = []
    for c in points:
        w = check_point_condition(p, c, system, tol)
        seen.append(w)
        if not w.satisfied:
            break
    failures = tuple(w for w in seen if not w.satisfied)
    return ScanReport(system, len(seen), max(w.deviation for w in seen), failures, tuple(seen))


@dataclass(frozen=True)
class DaggerReport:
    polynomial: Polynomial
    attracting: bool
    derivative_modulus: float
    ddagger: DdaggerVerdict
    scans: tuple[ScanReport, ...] = ()
    witnesses: tuple[ConditionWitness, ...] = ()

    def scan(self, system: System) -> ScanReport | None:
        return next((s for s in self.scans if s.system == system), None)

    def to_json(self) -> dict:
        return {
            "polynomial": format_polynomial(self.polynomial),
            "degree": self.polynomial.degree,
            "attracting": self.attracting,
            "derivative_modulus": self.derivative_modulus,
            "ddagger": self.ddagger.to_json(),
            "ddagger_status": self.ddagger.status,
            "scans": [s.to_json() for s in self.scans],
            "witnesses": [dict(w.to_json(), system=w.system, satisfied=w.satisfied) for w in self.witnesses],
        }


def classify(p: Polynomial, samples: int = 100, seed: int = 42, systems: Iterable[System] = ("dagger", "ddagger")) -> DaggerReport:
    """Exact coefficient verdict plus pointwise scans; the witnesses at ``c = 0`` are always reported."""
    fp = analyze_fixed_point(p)
    verdict = check_ddagger_coeffs(p)
    if not fp.attracting or p.degree < 1:
        return DaggerReport(p, fp.attracting, fp.derivative_modulus, verdict)
    scans = tuple(scan_basin(p, s, samples, seed) for s in systems)
    witnesses = tuple(check_point_condition(p, 0j, s) for s in systems)
    return DaggerReport(p, True, fp.derivative_modulus, verdict, scans, witnesses)


def ddagger_product_check(p: Polynomial, q: Polynomial) -> tuple[Polynomial, DdaggerVerdict]:
    """Multiply two double-dagger polynomials and re-check the product's coefficients."""
    for name, f in (("first", p), ("second", q)):
        if not check_ddagger_coeffs(f).satisfied:
            raise PreconditionError(f"{name} factor {f} fails the coefficient test")
    prod = multiply(p, q)
    return prod, check_ddagger_coeffs(prod)


def _disk(rng: np.random.Generator, radius: float) -> complex:
    r = radius * np.sqrt(rng.uniform())
    return complex(r * np.exp(2j * np.pi * rng.uniform()))


def ddagger_family_sample(
    n: int,
    seed: int | np.random.Generator = 0,
    leading: complex | None = None,
    slope_radius: float = 0.9,
) -> Polynomial:
    """Random degree-``n`` polynomial satisfying the double-dagger coefficient test.

    ``a_0 = 0``, ``a_{n-1} = 0``, ``a_{n-2} = -n a_n / 2`` and ``|a_1| < 1``.
    Free coefficients are drawn from the unit disk and the leading modulus from
    [0.5, 2). For ``n = 3`` the slope and leading coefficient are tied
    (``a_1 = -3 a_3 / 2``) so ``a_3`` is derived from a sampled slope unless
    ``leading`` is forced.
    """
    if n < 3:
        raise ValueError("the classified family needs degree >= 3")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    a = [0j] * (n + 1)
    if n == 3:
        if leading is None:
            a1 = _disk(rng, slope_radius)
            while a1 == 0:
                a1 = _disk(rng, slope_radius)
            leading = -2 * a1 / 3
        a[3] = complex(leading)
        a[1] = -3 * a[3] / 2
        if abs(a[1]) >= 1:
            raise ValueError(f"leading coefficient {leading} forces |a_1| >= 1")
        return Polynomial(tuple(a))
    if leading is None:
        leading = rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform())
    a[n] = complex(leading)
    a[n - 2] = -n * a[n] / 2
    a[1] = _disk(rng, slope_radius)
    for k in range(2, n - 2):
        a[k] = _disk(rng, 1.0)
    return Polynomial(tuple(a))
