"""Exact Hopf conditions for 3-node rings and eigenvalue-crossing checks.

For n = 3 the Hopf point is characterised algebraically:

    omega^2 = a1*a2 + a1*a3 + a2*a3 > 0
    (a1+a2)(a1+a3)(a2+a3) = b1*b2*b3

together with tau = a1+a2+a3 < 0 for the branch to be the first local
bifurcation. The product identity is exact mathematics; numerically it is
accepted within a relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import AdmissibleOdeFamily, RingParams
from .spectra import Spectrum, eigenvalues

PRODUCT_REL_TOL = 1e-9
AXIS_TOL = 1e-8


class NotAHopfPointError(ValueError):
    """A precondition required an n=3 Hopf point and the params are not one."""


@dataclass(frozen=True)
class HopfReport:
    omega_sq: float
    product_lhs: float
    product_rhs: float
    trace: float
    omega: float | None
    positivity: bool
    product_identity: bool
    first_bifurcation: bool
    marginal_excluded: bool
    pairwise_sums_negative: bool
    coupling_product_negative: bool

    @property
    def is_hopf_point(self) -> bool:
        return self.positivity and self.product_identity

    def to_dict(self) -> dict:
        return {
            "omega_sq": self.omega_sq,
            "product_lhs": self.product_lhs,
            "product_rhs": self.product_rhs,
            "trace": self.trace,
            "omega": self.omega,
            "flags": {
                "positivity": self.positivity,
                "product_identity": self.product_identity,
                "first_bifurcation": self.first_bifurcation,
                "marginal_excluded": self.marginal_excluded,
                "pairwise_sums_negative": self.pairwise_sums_negative,
                "coupling_product_negative": self.coupling_product_negative,
            },
            "is_hopf_point": self.is_hopf_point,
        }


def hopf_conditions_3(params: RingParams, rel_tol: float = PRODUCT_REL_TOL) -> HopfReport:
    """Evaluate the closed-form n=3 Hopf conditions."""
    if params.n != 3:
        raise ValueError(f"closed-form Hopf conditions require n=3, got n={params.n}")
    a1, a2, a3 = params.a
    b1, b2, b3 = params.b
    omega_sq = a1 * a2 + a1 * a3 + a2 * a3
    lhs = (a1 + a2) * (a1 + a3) * (a2 + a3)
    rhs = b1 * b2 * b3
    trace = a1 + a2 + a3
    identity = abs(lhs - rhs) <= rel_tol * max(1.0, abs(lhs), abs(rhs))
    positivity = omega_sq > 0
    sums = (a1 + a2, a1 + a3, a2 + a3)
    return HopfReport(
        omega_sq=omega_sq,
        product_lhs=lhs,
        product_rhs=rhs,
        trace=trace,
        omega=math.sqrt(omega_sq) if positivity else None,
        positivity=positivity,
        product_identity=identity,
        first_bifurcation=trace < 0,
        marginal_excluded=trace != 0,
        pairwise_sums_negative=all(s < 0 for s in sums),
        coupling_product_negative=rhs < 0,
    )


def solve_coupling_for_hopf(a: tuple[float, float, float], b1: float, b2: float) -> float:
    """The b3 making the n=3 product identity exact, given a and b1, b2."""
    if b1 == 0 or b2 == 0:
        raise ValueError("b1 and b2 must be nonzero to solve for b3")
    a1, a2, a3 = a
    return (a1 + a2) * (a1 + a3) * (a2 + a3) / (b1 * b2)


@dataclass(frozen=True)
class SignConstraintReport:
    pairwise_sums: tuple[float, float, float]
    all_sums_negative: bool
    coupling_product: float
    coupling_product_negative: bool
    b_sign_class: str  # "three_negative" or "one_negative"

    def to_dict(self) -> dict:
        return {
            "pairwise_sums": list(self.pairwise_sums),
            "all_sums_negative": self.all_sums_negative,
            "coupling_product": self.coupling_product,
            "coupling_product_negative": self.coupling_product_negative,
            "b_sign_class": self.b_sign_class,
        }


def sign_constraints(params: RingParams) -> SignConstraintReport:
    """Sign consequences of Hopf bifurcation from a stable equilibrium (n=3)."""
    report = hopf_conditions_3(params)
    if not (report.is_hopf_point and report.trace < 0):
        raise NotAHopfPointError(
            "sign constraints require an n=3 Hopf point with negative trace"
        )
    a1, a2, a3 = params.a
    sums = (a1 + a2, a1 + a3, a2 + a3)
    prod = params.b[0] * params.b[1] * params.b[2]
    negatives = sum(1 for v in params.b if v < 0)
    klass = "three_negative" if negatives == 3 else "one_negative"
    return SignConstraintReport(
        pairwise_sums=sums,
        all_sums_negative=all(s < 0 for s in sums),
        coupling_product=prod,
        coupling_product_negative=prod < 0,
        b_sign_class=klass,
    )


@dataclass(frozen=True)
class ImaginaryPairDetection:
    omega: float | None
    warnings: tuple[str, ...]


def detect_imaginary_pair(spectrum: Spectrum, tol: float = AXIS_TOL) -> ImaginaryPairDetection:
    """Find a single simple conjugate pair on the imaginary axis, if any.

    A zero eigenvalue alongside a pair is reported as a 0:1 warning rather
    than blocking detection; two distinct pairs on the axis block it.
    """
    warnings = []
    axis_pos = [m for m in spectrum.eigenvalues if abs(m.real) < tol and m.imag > tol]
    zeros = [m for m in spectrum.eigenvalues if abs(m) < tol]
    if zeros and axis_pos:
        warnings.append("0:1 resonance: zero eigenvalue on the axis alongside a pair")
    if not axis_pos:
        return ImaginaryPairDetection(omega=None, warnings=tuple(warnings))
    # distinct pair frequencies (values within tol collapse to one pair)
    distinct = []
    for m in sorted(axis_pos, key=lambda m: m.imag):
        if not distinct or m.imag - distinct[-1][-1].imag > tol:
            distinct.append([m])
        else:
            distinct[-1].append(m)
    if len(distinct) > 1:
        warnings.append(
            "multiple imaginary pairs on the axis: "
            + ", ".join(f"{g[0].imag:.6g}" for g in distinct)
        )
        return ImaginaryPairDetection(omega=None, warnings=tuple(warnings))
    group = distinct[0]
    if len(group) > 1:
        warnings.append(f"imaginary pair at {group[0].imag:.6g} is not simple")
        return ImaginaryPairDetection(omega=None, warnings=tuple(warnings))
    return ImaginaryPairDetection(omega=float(group[0].imag), warnings=tuple(warnings))


@dataclass(frozen=True)
class CrossingCheck:
    lambdas: tuple[float, float, float]
    sigma: tuple[float, float, float]
    rho: tuple[float, float, float]
    dsigma_dlambda: float
    drho_dlambda: float

    def to_dict(self) -> dict:
        return {
            "lambdas": list(self.lambdas),
            "sigma": list(self.sigma),
            "rho": list(self.rho),
            "dsigma_dlambda": self.dsigma_dlambda,
            "drho_dlambda": self.drho_dlambda,
        }


def _eigs_at(jac: Callable[[float], np.ndarray], lam: float) -> np.ndarray:
    return np.linalg.eigvals(jac(lam))


def crossing_check(
    family: AdmissibleOdeFamily | Callable[[float], np.ndarray],
    lambda0: float,
    h: float,
    axis_tol: float = AXIS_TOL,
) -> CrossingCheck:
    """Central-difference derivative of the tracked imaginary pair across lambda0.

    `family` may be an AdmissibleOdeFamily (J + lambda*I action) or any
    callable lambda -> Jacobian matrix for other parameter actions.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    jac = family.jacobian if isinstance(family, AdmissibleOdeFamily) else family
    eigs0 = _eigs_at(jac, lambda0)
    axis = [m for m in eigs0 if abs(m.real) < axis_tol and m.imag > axis_tol]
    if not axis:
        raise NotAHopfPointError(
            f"no imaginary pair detected at lambda0={lambda0}"
        )
    mu0 = min(axis, key=lambda m: abs(m.real))

    def track(lam: float) -> complex:
        eigs = _eigs_at(jac, lam)
        order = np.argsort(np.abs(eigs - mu0))
        nearest = eigs[order[0]]
        if len(eigs) > 1:
            second = eigs[order[1]]
            if abs(second - nearest) <= 10 * h:
                raise RuntimeError(
                    f"eigenvalue matching ambiguous at lambda={lam}: "
                    f"{nearest} and {second} collide within 10*h"
                )
        return complex(nearest)

    mu_minus = track(lambda0 - h)
    mu_plus = track(lambda0 + h)
    return CrossingCheck(
        lambdas=(lambda0 - h, lambda0, lambda0 + h),
        sigma=(mu_minus.real, mu0.real, mu_plus.real),
        rho=(mu_minus.imag, mu0.imag, mu_plus.imag),
        dsigma_dlambda=(mu_plus.real - mu_minus.real) / (2 * h),
        drho_dlambda=(mu_plus.imag - mu_minus.imag) / (2 * h),
    )


def spectral_hopf_check(params: RingParams, tol: float = AXIS_TOL) -> ImaginaryPairDetection:
    """Direct spectral route: root-find, then look for an axis pair."""
    return detect_imaginary_pair(eigenvalues(params), tol=tol)
