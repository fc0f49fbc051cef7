"""Verification engine: convergence-order studies and constant certification.

A convergence study solves the implicit relation on a descending delta
ladder, rebuilds the finite deformation, and records how fast the
linearized-strain residuals shrink; orders are least-squares slopes in
log-log coordinates, with pairwise Richardson ratios available as a
diagnostic. Certification samples the family's certified ball and reports
sampled suprema for the defining constants (lower bounds on the true ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    AllZeroResiduals,
    FitUnderdetermined,
    InadmissibleDelta,
    OutOfDomain,
    StrainLimError,
)
from .families import (
    FamilySpec,
    certified_domain,
    family_eval,
    family_leading,
    is_admissible,
    leading_gap,
    working_domain,
)
from .kinematics import (
    RotationSpec,
    deformation_from_green,
    deformation_from_hencky,
    make_rotation,
    sigma_from_cauchy,
    sigma_from_piola,
)
from .solver import solve_implicit, solve_implicit_hencky
from .symtensor import SymTensor, frobenius

# difference-quotient probes sit at this fraction of the domain radius;
# base draws shrink by twice that so probe partners stay inside the ball
PROBE_SCALE = 1e-3


@dataclass(frozen=True)
class ConvergenceRecord:
    delta: float
    delta0: float
    residual_full: float
    residual_leading: float
    stress_gap: float
    strain_gap: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-delta rows plus fitted orders (None when a residual is identically zero)."""

    records: tuple
    failures: tuple
    fitted_order_full: Optional[float]
    fitted_order_leading: Optional[float]
    fitted_order_stress: Optional[float]


@dataclass(frozen=True)
class CertificateRow:
    delta: float
    C0_hat: float
    C1_hat: float
    D0_hat: float
    C3_hat: float


@dataclass(frozen=True)
class CertificateReport:
    """Sampled suprema for the family constants; lower bounds on the true values."""

    C0_hat: float
    C1_hat: float
    D0_hat: float
    C3_hat: float
    samples: int
    seed: int
    rows: tuple


def fit_order(deltas, residuals) -> float:
    """Least-squares slope of log(residual) against log(delta).

    Rows with residual exactly zero are excluded; if every row is zero the
    identity holds exactly and AllZeroResiduals is raised (success, there
    is no order to fit). Fewer than four usable rows raises
    FitUnderdetermined.
    """
    if len(deltas) != len(residuals):
        raise ValueError("deltas and residuals must have equal length")
    if any(r < 0.0 for r in residuals):
        raise ValueError("residuals must be nonnegative")
    if len(deltas) < 4:
        raise FitUnderdetermined(f"need at least 4 rows, got {len(deltas)}")
    pairs = [(d, r) for d, r in zip(deltas, residuals) if r > 0.0]
    if not pairs:
        raise AllZeroResiduals("every residual is exactly zero")
    if len(pairs) < 4:
        raise FitUnderdetermined(f"only {len(pairs)} nonzero rows")
    ds = np.log([d for d, _ in pairs])
    rs = np.log([r for _, r in pairs])
    return float(np.polyfit(ds, rs, 1)[0])


def richardson_orders(deltas, values):
    """Pairwise orders log(r_i/r_{i+1}) / log(d_i/d_{i+1}) for consecutive rows.

    Diagnostic only (exposes pre-asymptotic contamination); pairs with a
    zero value are skipped.
    """
    out = []
    for (d0, r0), (d1, r1) in zip(zip(deltas, values), zip(deltas[1:], values[1:])):
        if r0 > 0.0 and r1 > 0.0 and d0 != d1:
            out.append(math.log(r0 / r1) / math.log(d0 / d1))
    return out


def _fit_or_none(deltas, values) -> Optional[float]:
    try:
        return fit_order(deltas, values)
    except AllZeroResiduals:
        return None


def _validate_ladder(spec, deltas):
    if len(deltas) < 4:
        raise FitUnderdetermined(f"need at least 4 deltas, got {len(deltas)}")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing")
    for d in deltas:
        if not is_admissible(spec, d):
            raise InadmissibleDelta(f"delta {d!r} is not admissible for kind {spec.kind}")


def _leading_residual(spec, delta, eps, sigma) -> float:
    lead = family_leading(spec, eps * (1.0 / delta), sigma) * delta
    return frobenius(eps - lead)


def run_convergence(
    spec: FamilySpec, Sbar: SymTensor, rot: RotationSpec, deltas
) -> ConvergenceReport:
    """Green-strain route: solve E = f_delta(E, Sbar), F = R (I+2E)^{1/2}.

    Per row: delta0 = |F - I|, residual_full = |eps - f_delta(eps, sigma)|,
    residual_leading = |eps - delta f_1(eps/delta, sigma)| with sigma the
    symmetrized Piola stress, stress_gap = |sigma - Sbar|, strain_gap =
    |E - eps|. Failed rows are recorded and skipped by the fits.
    """
    _validate_ladder(spec, deltas)
    if frobenius(Sbar) > working_domain(spec).stress_radius:
        raise OutOfDomain("Sbar lies outside the stress ball")
    records, failures = [], []
    for delta in deltas:
        try:
            rep = solve_implicit(spec, delta, Sbar)
            state = deformation_from_green(rep.solution, make_rotation(rot, delta))
            sigma = sigma_from_piola(state.F, Sbar)
            eps = state.eps
            records.append(
                ConvergenceRecord(
                    delta=delta,
                    delta0=state.delta0,
                    residual_full=frobenius(eps - family_eval(spec, delta, eps, sigma)),
                    residual_leading=_leading_residual(spec, delta, eps, sigma),
                    stress_gap=frobenius(sigma - Sbar),
                    strain_gap=frobenius(rep.solution - eps),
                )
            )
        except StrainLimError as exc:
            failures.append((delta, f"{type(exc).__name__}: {exc}"))
    return _assemble(records, failures)


def run_convergence_hencky(
    spec: FamilySpec, T: SymTensor, rot: RotationSpec, deltas
) -> ConvergenceReport:
    """Hencky-strain route: solve H = f_delta(H, T), F = e^H R.

    Same record layout as run_convergence with the Cauchy-derived stress
    sigma = det(F) (T F^{-T} + F^{-1} T)/2 and strain_gap = |H - eps|.
    """
    _validate_ladder(spec, deltas)
    if frobenius(T) > working_domain(spec).stress_radius:
        raise OutOfDomain("T lies outside the stress ball")
    records, failures = [], []
    for delta in deltas:
        try:
            rep = solve_implicit_hencky(spec, delta, T)
            state = deformation_from_hencky(rep.solution, make_rotation(rot, delta))
            sigma = sigma_from_cauchy(state.F, T)
            eps = state.eps
            records.append(
                ConvergenceRecord(
                    delta=delta,
                    delta0=state.delta0,
                    residual_full=frobenius(eps - family_eval(spec, delta, eps, sigma)),
                    residual_leading=_leading_residual(spec, delta, eps, sigma),
                    stress_gap=frobenius(sigma - T),
                    strain_gap=frobenius(rep.solution - eps),
                )
            )
        except StrainLimError as exc:
            failures.append((delta, f"{type(exc).__name__}: {exc}"))
    return _assemble(records, failures)


def _assemble(records, failures) -> ConvergenceReport:
    if len(records) < 4:
        raise FitUnderdetermined(
            f"only {len(records)} successful rows; failures: {failures!r}"
        )
    ds = [r.delta for r in records]
    return ConvergenceReport(
        records=tuple(records),
        failures=tuple(failures),
        fitted_order_full=_fit_or_none(ds, [r.residual_full for r in records]),
        fitted_order_leading=_fit_or_none(ds, [r.residual_leading for r in records]),
        fitted_order_stress=_fit_or_none(ds, [r.stress_gap for r in records]),
    )


def _ball_point(g, u, radius) -> SymTensor:
    # uniform in component volume over the Frobenius ball of the given
    # radius: Euclidean unit ball mapped by halving off-diagonal weight
    n = math.sqrt(float(g @ g))
    if n == 0.0:
        g = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        n = 1.0
    rho = radius * u ** (1.0 / 6.0)
    v = g * (rho / n)
    s = 1.0 / math.sqrt(2.0)
    return SymTensor(v[0], v[1], v[2], v[3] * s, v[4] * s, v[5] * s)


def _unit_direction(g) -> SymTensor:
    return _ball_point(g, 1.0, 1.0)


def certify_constants(
    spec: FamilySpec, deltas, samples: int, seed: int
) -> CertificateReport:
    """Sample the certified ball and report supremum estimates per delta.

    C0_hat = max |f_delta|/delta, C1_hat = max strain difference quotient,
    D0_hat = max stress difference quotient / delta, C3_hat = max
    leading_gap / delta^2. Deterministic for a given seed (byte-identical
    reports on repeat runs).
    """
    if samples < 100:
        raise ValueError("samples must be at least 100")
    for d in deltas:
        if not is_admissible(spec, d):
            raise InadmissibleDelta(f"delta {d!r} is not admissible for kind {spec.kind}")
    rng = np.random.default_rng(seed)
    dom = certified_domain(spec)
    shrink = 1.0 - 2.0 * PROBE_SCALE
    rows = []
    for delta in deltas:
        r_e = dom.strain_radius(delta)
        r_s = dom.stress_radius
        g_e = rng.standard_normal((samples, 6))
        u_e = rng.random(samples)
        g_s = rng.standard_normal((samples, 6))
        u_s = rng.random(samples)
        d_e = rng.standard_normal((samples, 6))
        d_s = rng.standard_normal((samples, 6))
        c0 = c1 = d0 = c3 = 0.0
        for i in range(samples):
            e1 = _ball_point(g_e[i], u_e[i], r_e * shrink)
            s1 = _ball_point(g_s[i], u_s[i], r_s * shrink)
            e2 = e1 + _unit_direction(d_e[i]) * (r_e * PROBE_SCALE)
            s2 = s1 + _unit_direction(d_s[i]) * (r_s * PROBE_SCALE)
            f00 = family_eval(spec, delta, e1, s1)
            f10 = family_eval(spec, delta, e2, s1)
            f01 = family_eval(spec, delta, e1, s2)
            c0 = max(c0, frobenius(f00) / delta, frobenius(f10) / delta,
                     frobenius(f01) / delta)
            c1 = max(c1, frobenius(f10 - f00) / frobenius(e2 - e1))
            d0 = max(d0, frobenius(f01 - f00) / (delta * frobenius(s2 - s1)))
            c3 = max(c3, leading_gap(spec, delta, e1, s1) / (delta * delta))
        rows.append(CertificateRow(delta, c0, c1, d0, c3))
    return CertificateReport(
        C0_hat=max(r.C0_hat for r in rows),
        C1_hat=max(r.C1_hat for r in rows),
        D0_hat=max(r.D0_hat for r in rows),
        C3_hat=max(r.C3_hat for r in rows),
        samples=samples,
        seed=seed,
        rows=tuple(rows),
    )
