"""Closed-loop integration of dilation-homogeneous plants under exact and
quantized homogeneous state feedback.

The integrator is classical fixed-step RK4.  When a quantizer is attached,
the feedback sees the quantized state at every internal stage, not only at
sample times, so the recorded control always matches what actually drove the
plant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .checks import SampleSpec, check_field_homogeneity
from .dilation import Dilation, make_dilation
from .errors import EmptyTrajectoryError, NonFiniteStateError
from .geometry import DEFAULT_CONFIG, HomNormConfig, _solve
from .quantizer import QuantizerParams, hom_quantize, log_quantize, spherical_quantize

# Sampling plan for the construction-time homogeneity audit of a plant drift.
_DRIFT_AUDIT = SampleSpec(count=128, radius_range=(0.25, 4.0), seed=7)
_DRIFT_AUDIT_TOL = 1e-6


@dataclass(frozen=True)
class HomFeedback:
    """State feedback ``u(x) = |x|_d^norm_power * gain @ exp(-ln|x|_d G) x``."""

    gain: np.ndarray
    norm_power: float

    def __post_init__(self):
        gain = np.atleast_2d(np.array(self.gain, dtype=float))
        if not np.all(np.isfinite(gain)):
            raise ValueError("gain has non-finite entries")
        if not math.isfinite(self.norm_power):
            raise ValueError("norm_power must be finite")
        gain.setflags(write=False)
        object.__setattr__(self, "gain", gain)


@dataclass(frozen=True)
class HomPlant:
    """Control-affine plant ``xdot = drift(x) + input_matrix @ u`` whose drift
    is homogeneous of the stated degree under the stated dilation; the degree
    is audited by sampling at construction time."""

    drift: object
    input_matrix: np.ndarray
    degree: float
    dilation: Dilation

    def __post_init__(self):
        b = np.atleast_2d(np.array(self.input_matrix, dtype=float))
        if b.shape[0] != self.dilation.dim:
            raise ValueError(
                f"input matrix must have {self.dilation.dim} rows, got shape {b.shape}"
            )
        b.setflags(write=False)
        object.__setattr__(self, "input_matrix", b)
        residual = check_field_homogeneity(self.drift, self.dilation, self.degree, _DRIFT_AUDIT)
        if residual > _DRIFT_AUDIT_TOL:
            raise ValueError(
                f"drift is not homogeneous of degree {self.degree} under this dilation "
                f"(sampled residual {residual:.3e})"
            )


@dataclass
class Trajectory:
    """Uniformly sampled closed-loop run.

    ``quantized_states`` equals ``states`` row for row when no quantizer was
    attached.  All arrays share their first dimension.
    """

    times: np.ndarray
    states: np.ndarray
    quantized_states: np.ndarray
    controls: np.ndarray
    hom_norms: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        for name in ("states", "quantized_states", "controls", "hom_norms"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} must have {n} rows")

    def __len__(self) -> int:
        return len(self.times)


def _example_drift(x: np.ndarray) -> np.ndarray:
    x1, x2, x3 = x
    return np.array([x2 * x3 * x3 + x2 * x2, x1, x2 + x3 * x3])


def example_plant() -> HomPlant:
    """Built-in three-state benchmark plant.

    Drift ``(x2*x3^2 + x2^2, x1, x2 + x3^2)`` with a single input on the
    first coordinate; homogeneous of degree 1 under the dilation generated by
    ``diag(3, 2, 1)`` with identity weight.
    """
    d = make_dilation(np.diag([3.0, 2.0, 1.0]))
    b = np.array([[1.0], [0.0], [0.0]])
    return HomPlant(drift=_example_drift, input_matrix=b, degree=1.0, dilation=d)


def hom_feedback_eval(fb: HomFeedback, d: Dilation, x,
                      cfg: HomNormConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Feedback law evaluated at ``x``; zero below the zero threshold."""
    x = np.asarray(x, dtype=float)
    if d.weighted_norm(x) <= cfg.zero_threshold:
        return np.zeros(fb.gain.shape[0])
    s, y = _solve(d, x, cfg)
    return math.exp(s * fb.norm_power) * (fb.gain @ y)


def simulate(plant: HomPlant, fb: HomFeedback,
             quant: tuple[Dilation, QuantizerParams] | None,
             x0, h: float, t_end: float,
             cfg: HomNormConfig = DEFAULT_CONFIG) -> Trajectory:
    """Integrate the closed loop with fixed-step RK4.

    Records ``round(t_end/h) + 1`` uniformly spaced rows.  If the weighted
    norm of the state falls below ``cfg.zero_threshold`` the remaining rows
    are recorded as zero.  A NaN or infinite value in the state or in any
    derived quantity aborts with :class:`NonFiniteStateError` carrying the
    (entirely finite) rows recorded so far.
    """
    if not (h > 0 and math.isfinite(h)):
        raise ValueError("step size must be positive and finite")
    if not (t_end >= h and math.isfinite(t_end)):
        raise ValueError("t_end must be at least one step")
    x0 = np.asarray(x0, dtype=float)
    n = plant.dilation.dim
    if x0.shape != (n,):
        raise ValueError(f"x0 must have shape ({n},)")

    d = plant.dilation
    b = plant.input_matrix
    m = fb.gain.shape[0]
    drift = plant.drift
    kappa = fb.norm_power
    gain = fb.gain
    fold_quant = quant is not None and quant[0] is d

    def stage(x):
        # (xdot, x_hat, u, hom_norm) at one RK stage / record point.
        nrm = d.weighted_norm(x)
        if not (nrm > cfg.zero_threshold):
            # Origin (or NaN poison from an earlier overflow, which then
            # propagates through the drift into the step update).
            u = np.zeros(m)
            return np.asarray(drift(x), dtype=float) + b @ u, x, u, 0.0
        if not math.isfinite(nrm):
            return np.full(n, math.nan), x, np.zeros(m), math.inf
        if quant is None:
            s, y = _solve(d, x, cfg)
            u = math.exp(s * kappa) * (gain @ y)
            return np.asarray(drift(x), dtype=float) + b @ u, x, u, math.exp(s)
        if fold_quant:
            s, y = _solve(d, x, cfg)
            value, _ = log_quantize(quant[1], math.exp(s))
            seed = spherical_quantize(d, quant[1], y)
            x_hat = d.apply(math.log(value), seed)
            # The quantized state has homogeneous norm `value` by construction.
            u = value ** kappa * (gain @ seed)
            return np.asarray(drift(x), dtype=float) + b @ u, x_hat, u, math.exp(s)
        qd, qp = quant
        x_hat = hom_quantize(qd, qp, x, cfg)
        u = hom_feedback_eval(fb, d, x_hat, cfg)
        s_norm = math.exp(_solve(d, x, cfg)[0])
        return np.asarray(drift(x), dtype=float) + b @ u, x_hat, u, s_norm

    steps = int(round(t_end / h))
    times = np.arange(steps + 1) * h
    states = np.zeros((steps + 1, n))
    qstates = np.zeros((steps + 1, n))
    controls = np.zeros((steps + 1, m))
    norms = np.zeros(steps + 1)

    x = x0.copy()
    half = 0.5 * h
    sixth = h / 6.0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps + 1):
            bad = not np.all(np.isfinite(x))
            if not bad:
                k1, x_hat, u, r = stage(x)
                # A finite state can still overflow a derived quantity (the
                # weighted norm, or the norm raised to the feedback power);
                # never record a partially poisoned row.
                bad = not (math.isfinite(r) and np.all(np.isfinite(x_hat))
                           and np.all(np.isfinite(u)))
            if bad:
                partial = Trajectory(times[:k].copy(), states[:k].copy(), qstates[:k].copy(),
                                     controls[:k].copy(), norms[:k].copy())
                raise NonFiniteStateError(
                    f"state became non-finite at t={k * h:.6g}", trajectory=partial
                )
            states[k] = x
            qstates[k] = x_hat
            controls[k] = u
            norms[k] = r
            if k == steps:
                break
            if r == 0.0:
                # Reached the origin: remaining rows stay zero.
                break
            k2 = stage(x + half * k1)[0]
            k3 = stage(x + half * k2)[0]
            k4 = stage(x + h * k3)[0]
            x = x + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    return Trajectory(times, states, qstates, controls, norms)


def settling_metrics(traj: Trajectory, threshold: float) -> tuple[float | None, float]:
    """``(t_enter, overshoot)`` of a trajectory.

    ``t_enter`` is the first recorded time after which the Euclidean state
    norm stays at or below ``threshold``; ``None`` when the run never settles.
    ``overshoot`` is the peak norm relative to the initial norm (zero for a
    run started at the origin).
    """
    if len(traj) == 0:
        raise EmptyTrajectoryError("trajectory has no samples")
    if not (threshold > 0):
        raise ValueError("threshold must be positive")
    norms = np.linalg.norm(traj.states, axis=1)
    overshoot = float(np.max(norms) / norms[0]) if norms[0] > 0 else 0.0
    above = norms > threshold
    if not np.any(above):
        return float(traj.times[0]), overshoot
    last = int(np.max(np.nonzero(above)[0]))
    if last == len(norms) - 1:
        return None, overshoot
    return float(traj.times[last + 1]), overshoot
