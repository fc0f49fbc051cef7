"""Strain-limiting constitutive families: f_delta, leading profiles, domains.

Four kinds are implemented:

- power_law: f_delta = delta * a (1 + a^p |S|^p)^{-1/p} S, stress-only.
- density_modulus_reciprocal: isotropic compliance with generalized modulus
  E_delta = delta^{-1} E0 [1 + a delta^{-1} ((det(I+2E))^{-1/2} - 1)].
- density_modulus_direct: same numerator with
  E_delta = delta^{-1} E0 [1 + a delta^{-1} ((det(I+2E))^{1/2} - 1)]^{-1}.
- scaled_base: (delta/delta1) f(delta1 E / delta, S) for a supplied bounded
  Lipschitz base f with |f| <= delta1.

Each family carries two concentric strain balls. The certified ball
B(0, b*delta) is where the closed-form constants are guaranteed and is what
`certified_domain` (used by constant certification) and the
`generalized_modulus` precondition refer to. The working ball used for
evaluation and solving is wider for the density kinds: the fixed points of
E = f_delta(E, S) land outside B(0, b*delta) for moderate stresses, so the
working radius covers the full guaranteed range of f_delta with 5%
headroom while staying inside the modulus-positivity region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .errors import (
    InadmissibleDelta,
    NonpositiveModulus,
    NotPositiveDefinite,
    OutOfDomain,
    SingularLeading,
)
from .symtensor import SymTensor, det, frobenius, trace

KINDS = (
    "scaled_base",
    "power_law",
    "density_modulus_reciprocal",
    "density_modulus_direct",
)
DENSITY_KINDS = ("density_modulus_reciprocal", "density_modulus_direct")

_WORKING_MARGIN = 1.05


@dataclass(frozen=True)
class FamilySpec:
    """Parameters of one strain-limiting family.

    `a` is dimensionless for the density kinds and an inverse-stress scale
    for power_law; `b` and `c` are the certified strain/stress ball
    coefficients; `delta1` and `base` only matter for scaled_base. `base`
    is a callable (Etilde, Sbar) -> SymTensor bounded by delta1, or the
    string "power_law" naming the built-in profile (the serializable
    choice). `delta_max` overrides the admissibility ceiling.
    """

    kind: str
    a: float = 0.3
    p: float = 2.0
    E0: float = 1.0
    nu: float = 0.3
    b: float = 0.5
    c: float = 1.0
    delta1: float = 0.05
    delta_max: Optional[float] = None
    base: Union[Callable, str, None] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.a <= 0.0:
            raise ValueError("a must be positive")
        if self.p < 1.0:
            raise ValueError("p must be at least 1")
        if self.E0 <= 0.0:
            raise ValueError("E0 must be positive")
        if not 0.0 <= self.nu < 0.5:
            raise ValueError("nu must lie in [0, 1/2)")
        if self.b <= 0.0 or self.c <= 0.0:
            raise ValueError("b and c must be positive")
        if self.delta1 <= 0.0:
            raise ValueError("delta1 must be positive")
        if self.kind in DENSITY_KINDS and self.a * self.b >= 0.5:
            raise ValueError("density kinds require a*b < 1/2")
        if self.delta_max is not None and self.delta_max <= 0.0:
            raise ValueError("delta_max override must be positive")
        if self.kind == "scaled_base":
            if self.base is None:
                raise ValueError("scaled_base requires a base profile")
            if isinstance(self.base, str) and self.base != "power_law":
                raise ValueError(f"unknown named base {self.base!r}")


@dataclass(frozen=True)
class DomainSpec:
    """Ball domain U_delta x V: strain radius scales with delta, stress does not."""

    strain_coeff: float
    stress_radius: float

    def strain_radius(self, delta: float) -> float:
        return self.strain_coeff * delta


def _density_guaranteed_coeff(spec: FamilySpec) -> float:
    # range bound of f_delta on the certified ball: (1+4nu) c / (E0 (1-2ab))
    return (1.0 + 4.0 * spec.nu) * spec.c / (spec.E0 * (1.0 - 2.0 * spec.a * spec.b))


def working_domain(spec: FamilySpec) -> DomainSpec:
    """Domain used by evaluation, the solver, and convergence studies."""
    if spec.kind == "power_law":
        return DomainSpec(_WORKING_MARGIN, spec.c)
    if spec.kind == "scaled_base":
        return DomainSpec(spec.b / spec.delta1, spec.c)
    coeff = max(spec.b, _WORKING_MARGIN * _density_guaranteed_coeff(spec))
    return DomainSpec(coeff, spec.c)


def certified_domain(spec: FamilySpec) -> DomainSpec:
    """Ball on which the closed-form constants are guaranteed."""
    if spec.kind in DENSITY_KINDS:
        return DomainSpec(spec.b, spec.c)
    return working_domain(spec)


def delta_ceiling(spec: FamilySpec) -> float:
    """Admissibility ceiling: deltas must satisfy 0 < delta < ceiling."""
    if spec.delta_max is not None:
        return spec.delta_max
    if spec.kind == "power_law":
        return 0.1
    if spec.kind == "scaled_base":
        # keep the rescaled strain radius (b/delta1)*delta at or below 1/2
        return min(0.1, spec.delta1 / (2.0 * spec.b))
    ceiling = min(0.1, 1.0 / (50.0 * max(1.0, spec.a)))
    # keep the working ball inside B(0, 1/2) even for large stress radii
    return min(ceiling, 1.0 / (2.0 * working_domain(spec).strain_coeff))


def is_admissible(spec: FamilySpec, delta: float) -> bool:
    return 0.0 < delta < delta_ceiling(spec)


def _power_leading(a: float, p: float, Sbar: SymTensor) -> SymTensor:
    ns = frobenius(Sbar)
    return Sbar * (a * (1.0 + (a * ns) ** p) ** (-1.0 / p))


def _iso_numerator(nu: float, Sbar: SymTensor) -> SymTensor:
    # (1+nu) S - nu tr(S) I
    t = nu * trace(Sbar)
    k = 1.0 + nu
    return SymTensor(
        k * Sbar.xx - t,
        k * Sbar.yy - t,
        k * Sbar.zz - t,
        k * Sbar.xy,
        k * Sbar.xz,
        k * Sbar.yz,
    )


def _det_i2e_minus_one(E: SymTensor) -> float:
    # det(I + 2E) - 1 expanded in invariants of E, avoiding the cancellation
    # of forming det(...) and subtracting 1 when |E| is tiny
    t = trace(E)
    i2 = (
        E.xx * E.yy
        + E.xx * E.zz
        + E.yy * E.zz
        - E.xy * E.xy
        - E.xz * E.xz
        - E.yz * E.yz
    )
    return 2.0 * t + 4.0 * i2 + 8.0 * det(E)


def _modulus_brackets(spec: FamilySpec, delta: float, E: SymTensor):
    """(reciprocal bracket, direct denominator) for the density moduli.

    Only positivity is enforced here; the certified-ball check belongs to
    the public `generalized_modulus`.
    """
    dm1 = _det_i2e_minus_one(E)
    if dm1 <= -1.0:
        raise NotPositiveDefinite("I + 2E is not positive definite")
    if spec.kind == "density_modulus_reciprocal":
        # (det)^{-1/2} - 1, full relative precision near zero
        g = math.expm1(-0.5 * math.log1p(dm1))
    else:
        g = math.expm1(0.5 * math.log1p(dm1))
    bracket = 1.0 + spec.a * g / delta
    if bracket <= 0.0:
        raise NonpositiveModulus(f"modulus bracket {bracket!r} is nonpositive")
    return bracket


def _resolve_base(spec: FamilySpec) -> Callable:
    if callable(spec.base):
        return spec.base
    # built-in: the power-law profile scaled to the |f| <= delta1 convention
    a, p, d1 = spec.a, spec.p, spec.delta1
    return lambda Et, S: _power_leading(a, p, S) * d1


def _scaled_leading(spec: FamilySpec, Etilde: SymTensor, Sbar: SymTensor) -> SymTensor:
    f = _resolve_base(spec)
    return f(Etilde * spec.delta1, Sbar) * (1.0 / spec.delta1)


def family_eval(spec: FamilySpec, delta: float, E: SymTensor, Sbar: SymTensor) -> SymTensor:
    """Evaluate f_delta(E, Sbar) on the working domain.

    Raises InadmissibleDelta outside (0, delta_ceiling) and OutOfDomain
    outside U_delta x V.
    """
    if not is_admissible(spec, delta):
        raise InadmissibleDelta(
            f"delta {delta!r} outside (0, {delta_ceiling(spec)!r}) for kind {spec.kind}"
        )
    dom = working_domain(spec)
    if frobenius(E) > dom.strain_radius(delta):
        raise OutOfDomain(f"|E| = {frobenius(E)!r} exceeds {dom.strain_radius(delta)!r}")
    if frobenius(Sbar) > dom.stress_radius:
        raise OutOfDomain(f"|Sbar| = {frobenius(Sbar)!r} exceeds {dom.stress_radius!r}")
    if spec.kind == "power_law":
        # identical float path as delta * family_leading(...): the leading
        # residual of this kind is bit-equal to the full residual
        return _power_leading(spec.a, spec.p, Sbar) * delta
    if spec.kind == "scaled_base":
        return _scaled_leading(spec, E * (1.0 / delta), Sbar) * delta
    bracket = _modulus_brackets(spec, delta, E)
    m = _iso_numerator(spec.nu, Sbar)
    if spec.kind == "density_modulus_reciprocal":
        return m * (delta / (spec.E0 * bracket))
    return m * (delta * bracket / spec.E0)


def generalized_modulus(spec: FamilySpec, delta: float, E: SymTensor) -> float:
    """Generalized Young's modulus E_delta(E) on the certified ball |E| <= b*delta.

    Raises NonpositiveModulus if the modulus falls below the guaranteed
    lower bound delta^{-1} E0 (1 - 2ab), which signals a precondition
    violation (the bound holds for both density kinds on the certified
    ball, for admissible delta).
    """
    if spec.kind not in DENSITY_KINDS:
        raise ValueError("generalized_modulus is defined for the density kinds only")
    if not is_admissible(spec, delta):
        raise InadmissibleDelta(
            f"delta {delta!r} outside (0, {delta_ceiling(spec)!r}) for kind {spec.kind}"
        )
    if frobenius(E) > spec.b * delta:
        raise OutOfDomain(
            f"|E| = {frobenius(E)!r} exceeds the certified radius {spec.b * delta!r}"
        )
    bracket = _modulus_brackets(spec, delta, E)
    floor = 1.0 - 2.0 * spec.a * spec.b
    if spec.kind == "density_modulus_reciprocal":
        if bracket < floor:
            raise NonpositiveModulus(
                f"bracket {bracket!r} underflows the guaranteed bound {floor!r}"
            )
        return spec.E0 * bracket / delta
    if bracket > 1.0 / floor:
        raise NonpositiveModulus(
            f"modulus denominator {bracket!r} exceeds {1.0 / floor!r}"
        )
    return spec.E0 / (delta * bracket)


def family_leading(spec: FamilySpec, Etilde: SymTensor, Sbar: SymTensor) -> SymTensor:
    """Leading-order profile f_1(Etilde, Sbar) on the rescaled domain."""
    dom = working_domain(spec)
    if frobenius(Etilde) > dom.strain_coeff:
        raise OutOfDomain(f"|Etilde| = {frobenius(Etilde)!r} exceeds {dom.strain_coeff!r}")
    if frobenius(Sbar) > dom.stress_radius:
        raise OutOfDomain(f"|Sbar| = {frobenius(Sbar)!r} exceeds {dom.stress_radius!r}")
    if spec.kind == "power_law":
        return _power_leading(spec.a, spec.p, Sbar)
    if spec.kind == "scaled_base":
        return _scaled_leading(spec, Etilde, Sbar)
    m = _iso_numerator(spec.nu, Sbar)
    if spec.kind == "density_modulus_reciprocal":
        den = 1.0 - spec.a * trace(Etilde)
        if den <= 0.0:
            raise SingularLeading(f"1 - a tr(Etilde) = {den!r} is nonpositive")
        return m * (1.0 / (spec.E0 * den))
    return m * ((1.0 + spec.a * trace(Etilde)) / spec.E0)


def leading_gap(spec: FamilySpec, delta: float, E: SymTensor, Sbar: SymTensor) -> float:
    """|f_delta(E, S) - delta f_1(E/delta, S)|.

    Exactly zero for power_law and scaled_base (definitional identity,
    same float path); O(delta^2) for the density kinds.
    """
    full = family_eval(spec, delta, E, Sbar)
    lead = family_leading(spec, E * (1.0 / delta), Sbar) * delta
    return frobenius(full - lead)
