"""Removal of multiple eigenvalues and k:1 resonances by coupling perturbations.

Both degeneracies pin the signed coupling product c = (-1)^(n+1) b_1...b_n
to one of finitely many values that depend only on the diagonal entries:

  * a multiple eigenvalue forces c = -A(lambda_i) at a root lambda_i of p',
  * a k:1 resonance forces c = -A(lambda_i) at a root of the auxiliary
    polynomial Q_k, which is likewise independent of the couplings.

So a single adjustment of b_1, after replacing any zero couplings, steers c
into the largest forbidden-value-free subinterval reachable within the
perturbation budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import RingParams, require_valid
from .spectra import Spectrum, eigenvalues

GAP_TOL_FACTOR = 1e-7
REAL_VALUE_TOL = 1e-9
RESONANCE_TOL = 1e-8


class PerturbationBudgetError(RuntimeError):
    """The requested epsilon cannot clear the forbidden set."""


@dataclass(frozen=True)
class EigenvalueCluster:
    value: complex
    multiplicity: int
    members: tuple[complex, ...]


def default_gap_tol(spectrum: Spectrum) -> float:
    return GAP_TOL_FACTOR * (1.0 + spectrum.spectral_radius())


def detect_multiple(spectrum: Spectrum, gap_tol: float | None = None) -> list[EigenvalueCluster]:
    """Clusters of eigenvalues closer than gap_tol (default scale-relative)."""
    if gap_tol is None:
        gap_tol = default_gap_tol(spectrum)
    mus = list(spectrum.eigenvalues)
    parent = list(range(len(mus)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(mus)):
        for j in range(i + 1, len(mus)):
            if abs(mus[i] - mus[j]) < gap_tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(len(mus)):
        groups.setdefault(find(i), []).append(mus[i])
    clusters = []
    for members in groups.values():
        if len(members) > 1:
            mean = sum(members) / len(members)
            clusters.append(
                EigenvalueCluster(
                    value=complex(mean),
                    multiplicity=len(members),
                    members=tuple(members),
                )
            )
    clusters.sort(key=lambda c: (c.value.real, c.value.imag))
    return clusters


@dataclass(frozen=True)
class ForbiddenSet:
    values: tuple[float, ...]
    sources: tuple[tuple, ...]  # ("p_prime_root", lam) or ("resonance_root", k, lam)

    def to_dict(self) -> dict:
        def jsonable(v):
            return [v.real, v.imag] if isinstance(v, complex) else v

        return {
            "values": list(self.values),
            "sources": [[jsonable(v) for v in s] for s in self.sources],
        }


def _a_poly_coeffs(params: RingParams) -> np.ndarray:
    """Dense coefficients (highest first) of A(lambda) = prod(a_j - lambda)."""
    coeffs = np.array([1.0])
    for v in params.a:
        coeffs = np.convolve(coeffs, np.array([-1.0, v]))
    return coeffs


def _real_forbidden_values(lam_roots, a_coeffs, source_maker) -> tuple[list, list]:
    values, sources = [], []
    for lam in lam_roots:
        v = -np.polyval(a_coeffs, lam)
        if abs(v.imag) < REAL_VALUE_TOL * (1.0 + abs(v)):
            values.append(float(v.real))
            sources.append(source_maker(lam))
    return values, sources


def multiplicity_forbidden_set(params: RingParams) -> ForbiddenSet:
    """Coupling products c at which p = A + c has a multiple root.

    p' = A' does not involve the couplings, so its roots are fixed by a;
    the forbidden values are -A(lambda_i) at those roots (real ones only,
    since c is real).
    """
    require_valid(params)
    a_coeffs = _a_poly_coeffs(params)
    dp = np.polyder(a_coeffs)
    lam_roots = np.roots(dp)
    values, sources = _real_forbidden_values(
        lam_roots, a_coeffs, lambda lam: ("p_prime_root", complex(lam))
    )
    return ForbiddenSet(values=tuple(values), sources=tuple(sources))


def resonance_poly(params: RingParams, k: int) -> np.ndarray:
    """Auxiliary polynomial Q_k whose roots locate possible k:1 resonances.

    Q_k(lambda) = p'(k*lambda)(k-1)A(lambda) - p'(lambda)(A(k*lambda) - A(lambda))

    Coefficients are returned highest degree first; the degree is 2n-1 and
    the leading coefficient is n(1 - k^(n-1)). Q_k does not depend on the
    couplings.
    """
    require_valid(params)
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    n = params.n
    A = _a_poly_coeffs(params)
    dp = np.polyder(A)

    def substitute_k(coeffs: np.ndarray) -> np.ndarray:
        deg = len(coeffs) - 1
        powers = np.array([float(k) ** (deg - i) for i in range(len(coeffs))])
        return coeffs * powers

    A_k = substitute_k(A)
    dp_k = substitute_k(dp)
    first = np.polymul(dp_k * (k - 1), A)
    second = np.polymul(dp, np.polysub(A_k, A))
    Q = np.polysub(first, second)
    expected_deg = 2 * n - 1
    if len(Q) - 1 != expected_deg:
        Q = np.concatenate([np.zeros(expected_deg + 1 - len(Q)), Q])
    return Q


def resonance_forbidden_set(params: RingParams, k_max: int) -> ForbiddenSet:
    """Union of forbidden coupling products over Q_k roots for 2 <= k <= k_max."""
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    a_coeffs = _a_poly_coeffs(params)
    values, sources = [], []
    for k in range(2, k_max + 1):
        Q = resonance_poly(params, k)
        v, s = _real_forbidden_values(
            np.roots(Q), a_coeffs, lambda lam, k=k: ("resonance_root", k, complex(lam))
        )
        values.extend(v)
        sources.extend(s)
    return ForbiddenSet(values=tuple(values), sources=tuple(sources))


@dataclass(frozen=True)
class ResonanceFlag:
    k: int  # 0 encodes the 0:1 flag (zero eigenvalue alongside a pair)
    omega: float

    def to_dict(self) -> dict:
        return {"k": self.k, "omega": self.omega}


def detect_resonance(spectrum: Spectrum, k_max: int, tol: float = RESONANCE_TOL) -> list[ResonanceFlag]:
    """k:1 resonances among axis pairs, plus the 0:1 flag for zero eigenvalues."""
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    axis = [m.imag for m in spectrum.eigenvalues if abs(m.real) < tol and m.imag > tol]
    zeros = [m for m in spectrum.eigenvalues if abs(m) < tol]
    # collapse near-duplicates to pair frequencies
    freqs = []
    for w in sorted(axis):
        if not freqs or w - freqs[-1] > tol:
            freqs.append(w)
    flags = []
    if zeros and freqs:
        flags.append(ResonanceFlag(k=0, omega=float(freqs[0])))
    for w in freqs:
        for k in range(2, k_max + 1):
            if any(abs(w2 - k * w) < tol * (1.0 + k) for w2 in freqs):
                flags.append(ResonanceFlag(k=k, omega=float(w)))
    return flags


@dataclass(frozen=True)
class PerturbationResult:
    original: RingParams
    perturbed: RingParams
    delta: float
    achieved_gap: float
    removed: tuple[str, ...]
    forbidden: ForbiddenSet

    def to_dict(self) -> dict:
        return {
            "original": self.original.to_dict(),
            "perturbed": self.perturbed.to_dict(),
            "delta": self.delta,
            "achieved_gap": self.achieved_gap,
            "removed": list(self.removed),
            "forbidden": self.forbidden.to_dict(),
        }


def _dezero_couplings(b: tuple[float, ...], epsilon: float) -> tuple[list[float], list[str]]:
    out = list(b)
    notes = []
    for j, v in enumerate(out):
        if v == 0.0:
            out[j] = epsilon / 2.0
            notes.append(f"zero coupling b[{j}] replaced by {epsilon / 2.0}")
    return out, notes


def _shift_coupling_product(
    params: RingParams,
    b_work: list[float],
    forbidden_values,
    epsilon: float,
) -> tuple[list[float], float]:
    """Move c into the widest forbidden-free subinterval reachable via b_1.

    Returns the adjusted couplings and the margin from c to the forbidden
    set. b_1 moves by at most epsilon/2. c = 0 is avoided as well, since it
    would require b_1 = 0.
    """
    n = params.n
    sign = (-1) ** (n + 1)
    rest = math.prod(b_work[1:])
    c_now = sign * b_work[0] * rest
    half_width = (epsilon / 2.0) * abs(rest)
    lo, hi = c_now - half_width, c_now + half_width
    avoid = sorted({v for v in list(forbidden_values) + [0.0] if lo < v < hi})
    points = [lo] + avoid + [hi]
    best_mid, best_margin = c_now, -math.inf
    for left, right in zip(points[:-1], points[1:]):
        if right - left <= 0:
            continue
        mid = (left + right) / 2.0
        margin = min(
            [abs(mid - v) for v in list(forbidden_values) + [0.0]] or [math.inf]
        )
        if margin > best_margin:
            best_mid, best_margin = mid, margin
    if not math.isfinite(best_margin) or best_margin <= 0:
        nearest = min(forbidden_values, key=lambda v: abs(v - c_now), default=None)
        raise PerturbationBudgetError(
            f"epsilon={epsilon} cannot clear the forbidden set; nearest value {nearest}"
        )
    b_new = list(b_work)
    b_new[0] = sign * best_mid / rest
    return b_new, best_margin


def remove_multiple(
    params: RingParams,
    epsilon: float,
    gap_tol: float | None = None,
) -> PerturbationResult:
    """Perturb couplings (only) so every eigenvalue is simple.

    Zero couplings are first replaced by epsilon/2, then b_1 moves by at
    most epsilon/2 to push the coupling product away from every forbidden
    value. The diagonal entries are never touched.
    """
    require_valid(params)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    spectrum = eigenvalues(params)
    if gap_tol is None:
        gap_tol = default_gap_tol(spectrum)
    clusters = detect_multiple(spectrum, gap_tol)
    forbidden = multiplicity_forbidden_set(params)
    if not clusters and all(v != 0.0 for v in params.b):
        return PerturbationResult(
            original=params,
            perturbed=params,
            delta=0.0,
            achieved_gap=spectrum.min_gap(),
            removed=(),
            forbidden=forbidden,
        )
    b_work, notes = _dezero_couplings(params.b, epsilon)
    b_new, _ = _shift_coupling_product(params, b_work, forbidden.values, epsilon)
    perturbed = RingParams(params.n, params.a, tuple(b_new))
    new_spectrum = eigenvalues(perturbed)
    achieved = new_spectrum.min_gap()
    if achieved <= gap_tol:
        nearest = min(
            forbidden.values,
            key=lambda v: abs(v - perturbed.coupling_product()),
            default=None,
        )
        raise PerturbationBudgetError(
            f"achieved gap {achieved:.3e} <= gap_tol {gap_tol:.3e}; "
            f"nearest forbidden value {nearest}"
        )
    removed = tuple(
        notes
        + [
            f"multiple eigenvalue near {c.value:.6g} (multiplicity {c.multiplicity})"
            for c in clusters
        ]
    )
    delta = max(abs(x - y) for x, y in zip(params.b, perturbed.b))
    return PerturbationResult(
        original=params,
        perturbed=perturbed,
        delta=delta,
        achieved_gap=achieved,
        removed=removed,
        forbidden=forbidden,
    )


def remove_resonances(
    params: RingParams,
    k_max: int,
    epsilon: float,
    tol: float = RESONANCE_TOL,
) -> PerturbationResult:
    """Perturb couplings (only) so no k:1 resonance survives for k <= k_max.

    The forbidden coupling products come from the Q_k roots for every
    2 <= k <= k_max, together with the multiplicity values, and a single
    b_1 adjustment clears all of them simultaneously.
    """
    require_valid(params)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    spectrum = eigenvalues(params)
    flags = detect_resonance(spectrum, k_max, tol)
    res_forbidden = resonance_forbidden_set(params, k_max)
    mult_forbidden = multiplicity_forbidden_set(params)
    forbidden = ForbiddenSet(
        values=res_forbidden.values + mult_forbidden.values,
        sources=res_forbidden.sources + mult_forbidden.sources,
    )
    if not flags and all(v != 0.0 for v in params.b):
        return PerturbationResult(
            original=params,
            perturbed=params,
            delta=0.0,
            achieved_gap=spectrum.min_gap(),
            removed=(),
            forbidden=forbidden,
        )
    b_work, notes = _dezero_couplings(params.b, epsilon)
    b_new, _ = _shift_coupling_product(params, b_work, forbidden.values, epsilon)
    perturbed = RingParams(params.n, params.a, tuple(b_new))
    new_spectrum = eigenvalues(perturbed)
    residual_flags = detect_resonance(new_spectrum, k_max, tol)
    if residual_flags:
        raise PerturbationBudgetError(
            f"resonances remain after perturbation: "
            f"{[(f.k, f.omega) for f in residual_flags]}"
        )
    removed = tuple(
        notes + [f"{f.k}:1 resonance at omega={f.omega:.6g}" for f in flags]
    )
    delta = max(abs(x - y) for x, y in zip(params.b, perturbed.b))
    return PerturbationResult(
        original=params,
        perturbed=perturbed,
        delta=delta,
        achieved_gap=new_spectrum.min_gap(),
        removed=removed,
        forbidden=forbidden,
    )
