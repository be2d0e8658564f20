"""ODE integration near a Hopf point and limit-cycle phase measurement.

The integrator is classical fixed-step RK4: trajectories here are smooth,
low-dimensional and short, and a fixed grid makes the Fourier windows an
exact number of steps. Phase differences are measured from the fundamental
Fourier coefficients c_j over a window of whole periods; the reported
Delta_j = arg(c_j / c_{j+1}) uses the same orientation as the predicted
phase shifts (node j relative to node j+1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import AdmissibleOdeFamily
from .phases import PhaseProfile
from .spectra import eigenvalues, eigenvector_for

TWO_PI = 2 * math.pi
DIVERGENCE_NORM = 1e6
DEFAULT_STEPS_PER_PERIOD = 4000


class DivergenceError(RuntimeError):
    """The trajectory left the integration domain or became non-finite."""


class NoCycleError(RuntimeError):
    """No limit cycle was found; the message carries the diagnostic."""


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n)
    lam: float
    step: float

    @property
    def steps(self) -> int:
        return len(self.times) - 1


def integrate(
    family: AdmissibleOdeFamily,
    x0,
    t_end: float,
    h: float,
    lam: float | None = None,
) -> Trajectory:
    """Classical RK4 with fixed step h from t=0 to (approximately) t_end."""
    if h <= 0 or t_end <= 0:
        raise ValueError("h and t_end must be positive")
    if lam is None:
        lam = family.lam
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (family.base.n,) or not np.all(np.isfinite(x)):
        raise ValueError(f"x0 must be a finite state of length {family.base.n}")
    n_steps = int(round(t_end / h))
    a = np.asarray(family.base.a) + lam
    b = np.asarray(family.base.b)
    g = np.asarray(family.cubic)
    idx = (np.arange(family.base.n) + 1) % family.base.n

    def rhs(y):
        return a * y + b * y[idx] + g * y**3

    states = np.empty((n_steps + 1, family.base.n))
    states[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_steps):
            k1 = rhs(x)
            k2 = rhs(x + 0.5 * h * k1)
            k3 = rhs(x + 0.5 * h * k2)
            k4 = rhs(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)) or np.abs(x).max() > DIVERGENCE_NORM:
                raise DivergenceError(
                    f"trajectory diverged at t={(i + 1) * h:.6g}"
                )
            states[i + 1] = x
    times = h * np.arange(n_steps + 1)
    return Trajectory(times=times, states=states, lam=lam, step=h)


@dataclass(frozen=True)
class CycleMeasurement:
    period: float
    fundamental_coeffs: tuple[complex, ...]
    amplitudes: tuple[float, ...]
    phase_diffs: tuple[float, ...]  # Delta_j = arg(c_j / c_{j+1}) in [0, 2*pi)
    lam: float

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "fundamental_coeffs": [[c.real, c.imag] for c in self.fundamental_coeffs],
            "amplitudes": list(self.amplitudes),
            "phase_diffs": list(self.phase_diffs),
            "lambda": self.lam,
        }


def _upward_crossings(times: np.ndarray, signal: np.ndarray) -> np.ndarray:
    """Linear-interpolated times where the signal crosses zero upward."""
    s0, s1 = signal[:-1], signal[1:]
    mask = (s0 < 0) & (s1 >= 0)
    i = np.nonzero(mask)[0]
    frac = -s0[i] / (s1[i] - s0[i])
    return times[i] + frac * (times[i + 1] - times[i])


def measure_cycle(traj: Trajectory, min_cycles: int = 10, period_tol: float = 0.01) -> CycleMeasurement:
    """Extract period, fundamental Fourier coefficients and phase differences.

    The period comes from successive upward zero crossings of node 1's
    deviation from its time mean, averaged over the trailing cycles; the
    Fourier window is the largest whole number of measured periods that
    fits on the grid.
    """
    x1 = traj.states[:, 0]
    dev = x1 - x1.mean()
    amplitude = np.abs(dev).max()
    if amplitude < 1e-6:
        raise NoCycleError(
            f"no cycle: node-1 oscillation amplitude {amplitude:.3e} at "
            f"lambda={traj.lam}"
        )
    crossings = _upward_crossings(traj.times, dev)
    if len(crossings) < min_cycles + 1:
        raise NoCycleError(
            f"no cycle: only {max(len(crossings) - 1, 0)} full cycles observed "
            f"at lambda={traj.lam}"
        )
    periods = np.diff(crossings[-(min_cycles + 1):])
    period = float(periods.mean())
    spread = float(periods.max() - periods.min())
    if spread > period_tol * period:
        raise NoCycleError(
            f"no cycle: period spread {spread:.3e} exceeds {period_tol} of "
            f"mean period {period:.6g} at lambda={traj.lam}"
        )
    cycles = min(min_cycles, int((traj.times[-1] - traj.times[0]) / period))
    window_steps = int(round(cycles * period / traj.step))
    window_steps = min(window_steps, len(traj.times) - 1)
    t = traj.times[-(window_steps + 1):]
    x = traj.states[-(window_steps + 1):]
    weight = np.exp(-1j * (TWO_PI / period) * t)
    span = t[-1] - t[0]
    coeffs = [
        complex(2.0 / span * np.trapezoid(x[:, j] * weight, t))
        for j in range(x.shape[1])
    ]
    diffs = [
        cmath.phase(coeffs[j] / coeffs[(j + 1) % len(coeffs)]) % TWO_PI
        for j in range(len(coeffs))
    ]
    return CycleMeasurement(
        period=period,
        fundamental_coeffs=tuple(coeffs),
        amplitudes=tuple(abs(c) for c in coeffs),
        phase_diffs=tuple(diffs),
        lam=traj.lam,
    )


def _critical_eigenvector(family: AdmissibleOdeFamily) -> tuple[np.ndarray, float]:
    spectrum = eigenvalues(family.base)
    if spectrum.omega is None:
        raise NoCycleError(
            "the base ring has no imaginary eigenvalue pair; cannot seed a cycle hunt"
        )
    u = eigenvector_for(family.base, 1j * spectrum.omega)
    return np.array(u.entries), spectrum.omega


def find_limit_cycle(
    family: AdmissibleOdeFamily,
    lam: float,
    settle_time: float | None = None,
    tol: float = 0.01,
    h: float | None = None,
    x0=None,
    measure_cycles: int = 10,
) -> CycleMeasurement:
    """Integrate past the transient and measure the limit cycle at `lam`.

    The initial condition defaults to 0.1*sqrt(|lam|) times the real part
    of the critical eigenvector, which starts close to the expected orbit.
    """
    u, omega = _critical_eigenvector(family)
    period_pred = TWO_PI / omega
    if h is None:
        h = period_pred / DEFAULT_STEPS_PER_PERIOD
    if settle_time is None:
        settle_time = max(40 * period_pred, 4.0 / max(abs(lam), 1e-6))
    if x0 is None:
        x0 = 0.1 * math.sqrt(abs(lam)) * u.real
    measure_time = (measure_cycles + 2) * period_pred
    traj = integrate(family, x0, settle_time + measure_time, h, lam=lam)
    keep = int(round(measure_time / h)) + 1
    tail = Trajectory(
        times=traj.times[-keep:],
        states=traj.states[-keep:],
        lam=lam,
        step=h,
    )
    return measure_cycle(tail, min_cycles=measure_cycles, period_tol=tol)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    measurement: CycleMeasurement | None
    diagnostic: str | None


def branch_sweep(family: AdmissibleOdeFamily, lambdas, **kwargs) -> list[SweepRow]:
    """find_limit_cycle at each lambda; per-lambda failures become diagnostics."""
    rows = []
    for lam in sorted(lambdas):
        try:
            m = find_limit_cycle(family, lam, **kwargs)
            rows.append(SweepRow(lam=lam, measurement=m, diagnostic=None))
        except (NoCycleError, DivergenceError) as exc:
            rows.append(SweepRow(lam=lam, measurement=None, diagnostic=str(exc)))
    return rows


@dataclass(frozen=True)
class PhaseComparison:
    distances: tuple[float, ...]
    max_distance: float
    mean_distance: float

    def to_dict(self) -> dict:
        return {
            "distances": list(self.distances),
            "max_distance": self.max_distance,
            "mean_distance": self.mean_distance,
        }


def circular_distance(x: float, y: float) -> float:
    d = abs(x - y) % TWO_PI
    return min(d, TWO_PI - d)


def compare_predicted(measurement: CycleMeasurement, profile: PhaseProfile) -> PhaseComparison:
    """Per-edge circular distance between measured and predicted phase shifts."""
    if len(measurement.phase_diffs) != len(profile.theta):
        raise ValueError("measurement and profile have different ring sizes")
    d = tuple(
        circular_distance(m, p)
        for m, p in zip(measurement.phase_diffs, profile.theta)
    )
    return PhaseComparison(
        distances=d,
        max_distance=max(d),
        mean_distance=sum(d) / len(d),
    )
