"""First-moment time-domain integrator for the delayed cavity system.

Integrates the deterministic part of the rotating-frame equation

    v'(t) = A v(t) + gamma1 B v(t - tau),    v = (<c>, <c^dag>),

with A = [[-G, eps], [conj(eps), -G]] and B the exact carrier-phase
rotation diag(e^{i*phase0}, e^{-i*phase0}).  Vacuum inputs have zero
mean, so the noise terms drop out; the integrator's job is to validate
stability verdicts in the time domain and to demonstrate the
non-invasiveness of the difference-feedback control force.

Method of steps with classical RK4.  The step is snapped to an integer
divisor of tau, so delayed full-step lookups are direct array indexing
and only the half-step stage needs interpolation (cubic Hermite from
the stored state and derivative at the two bracketing nodes).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import Model


class StepTooLarge(ValueError):
    pass


class NonFiniteState(ArithmeticError):
    pass


class DegenerateTrace(ValueError):
    pass


DECAYING = "decaying"
GROWING = "growing"
MARGINAL = "marginal"

#: Norm above which an integration is cut short and flagged as growing.
OVERFLOW_NORM = 1e12


@dataclass(frozen=True)
class DdeTrace:
    t: np.ndarray          # sample times, ns
    v: np.ndarray          # (n, 2) complex samples of (<c>, <c^dag>)
    norm: np.ndarray
    tau: float
    dt: float
    rate_scale: float      # G, used for the marginal band in classify()
    overflowed: bool


@dataclass(frozen=True)
class TraceClassification:
    label: str
    rate: float            # fitted exponential rate of ||v||, ns^-1


def _rate_bound(model: Model) -> float:
    return max(model.G, model.gamma1, model.eps_abs, 1e-12)


def default_dt(model: Model) -> float:
    """Largest step satisfying dt <= tau/50 and dt <= 1/(50*max rate)."""
    dt = 1.0 / (50.0 * _rate_bound(model))
    if model.gamma1 > 0.0 and model.tau > 0.0:
        dt = min(dt, model.tau / 50.0)
    return dt


def integrate(model: Model, v0, t_end: float, dt: float | None = None) -> DdeTrace:
    """Method-of-steps RK4 from a constant history v(t) = v0 on
    [-tau, 0].  Stops early (flagging overflow) once ||v|| exceeds
    OVERFLOW_NORM.  Raises StepTooLarge for a dt violating the step
    bounds and NonFiniteState if the state leaves the finite range
    without first tripping the overflow guard."""
    v0 = np.asarray(v0, dtype=complex)
    if v0.shape != (2,):
        raise ValueError("v0 must be a length-2 complex vector")
    if t_end <= 0.0:
        raise ValueError("t_end must be positive")

    max_dt = default_dt(model)
    if dt is None:
        dt = max_dt
    elif dt > max_dt * (1.0 + 1e-12):
        raise StepTooLarge(f"dt = {dt} exceeds bound {max_dt}")

    g1, tau = model.gamma1, model.tau
    delayed = g1 > 0.0 and tau > 0.0
    if delayed:
        n_tau = max(50, math.ceil(tau / dt))
        dt = tau / n_tau
    n_steps = max(1, math.ceil(t_end / dt))

    eps = model.eps
    g = model.G
    bp = cmath.exp(1j * model.phase0) if delayed else 0.0
    bm = bp.conjugate() if delayed else 0.0

    def deriv(a1, a2, d1, d2):
        return (-g * a1 + eps * a2 + g1 * bp * d1,
                eps.conjugate() * a1 - g * a2 + g1 * bm * d2)

    v1, v2 = complex(v0[0]), complex(v0[1])
    vs = [(v1, v2)]
    f0 = deriv(v1, v2, v1, v2) if delayed else deriv(v1, v2, 0.0, 0.0)
    fs = [f0]

    def hist(idx: int):
        # state at node idx; constant v0 before t = 0
        if idx <= 0:
            return complex(v0[0]), complex(v0[1])
        return vs[idx]

    def hist_mid(idx: int):
        # state at t = (idx + 1/2)*dt via cubic Hermite
        if idx < 0:
            return complex(v0[0]), complex(v0[1])
        a1, a2 = vs[idx]
        b1, b2 = vs[idx + 1]
        fa1, fa2 = fs[idx]
        fb1, fb2 = fs[idx + 1]
        h = dt / 8.0
        return (0.5 * (a1 + b1) + h * (fa1 - fb1),
                0.5 * (a2 + b2) + h * (fa2 - fb2))

    overflowed = False
    for k in range(n_steps):
        if delayed:
            d0 = hist(k - n_tau)
            dh = hist_mid(k - n_tau)
            d1 = hist(k + 1 - n_tau)
        else:
            d0 = dh = d1 = (0.0, 0.0)
        k1 = deriv(v1, v2, *d0)
        k2 = deriv(v1 + 0.5 * dt * k1[0], v2 + 0.5 * dt * k1[1], *dh)
        k3 = deriv(v1 + 0.5 * dt * k2[0], v2 + 0.5 * dt * k2[1], *dh)
        k4 = deriv(v1 + dt * k3[0], v2 + dt * k3[1], *d1)
        v1 = v1 + dt / 6.0 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        v2 = v2 + dt / 6.0 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        vs.append((v1, v2))
        d_next = hist(k + 1 - n_tau) if delayed else (0.0, 0.0)
        fs.append(deriv(v1, v2, *d_next))
        nrm = math.hypot(abs(v1), abs(v2))
        if not math.isfinite(nrm):
            raise NonFiniteState(f"state became non-finite at step {k}")
        if nrm > OVERFLOW_NORM:
            overflowed = True
            break

    arr = np.array(vs, dtype=complex)
    t = np.arange(arr.shape[0]) * dt
    norm = np.linalg.norm(arr, axis=1)
    return DdeTrace(t=t, v=arr, norm=norm, tau=tau, dt=dt,
                    rate_scale=g, overflowed=overflowed)


def classify(trace: DdeTrace, marginal_frac: float = 1e-3) -> TraceClassification:
    """Least-squares exponential rate of ||v|| over the final half of
    the trace.  Marginal means |rate| < marginal_frac * G.  Traces cut
    short by the overflow guard are growing by construction."""
    if trace.overflowed:
        t2 = trace.t[len(trace.t) // 2:]
        n2 = trace.norm[len(trace.t) // 2:]
        keep = n2 > 0.0
        rate = float(np.polyfit(t2[keep], np.log(n2[keep]), 1)[0]) \
            if keep.sum() >= 2 else math.inf
        return TraceClassification(GROWING, rate)
    if not np.any(trace.norm > 0.0):
        raise DegenerateTrace("trace norm is identically zero")
    half = len(trace.t) // 2
    t2, n2 = trace.t[half:], trace.norm[half:]
    keep = n2 > 0.0
    if keep.sum() < 2:
        raise DegenerateTrace("trace norm vanished over the fit window")
    rate = float(np.polyfit(t2[keep], np.log(n2[keep]), 1)[0])
    band = marginal_frac * max(trace.rate_scale, 1e-12)
    if rate > band:
        return TraceClassification(GROWING, rate)
    if rate < -band:
        return TraceClassification(DECAYING, rate)
    return TraceClassification(MARGINAL, rate)


def pyragas_invariance_check(model: Model, v0, horizon_taus: float = 10.0) -> float:
    """Maximum drift of the state from its initial value over
    horizon_taus round trips, for the pure difference-feedback
    configuration (phi = pi, gamma_f = gamma1, gamma2 = gamma3 = 0,
    eps = 0, destructive interference).  The control force
    gamma1*[v(t) - v(t-tau)] vanishes identically on constant states,
    so the drift bounds the integrator error."""
    if not model.is_default_loop:
        raise ValueError("requires the default loop (phi = pi, gamma_f = gamma1)")
    if model.gamma2 != 0.0 or model.gamma3 != 0.0 or model.eps_abs != 0.0:
        raise ValueError("requires gamma2 = gamma3 = 0 and eps = 0")
    if model.interference.kind != "destructive":
        raise ValueError("requires destructive interference (omega0*tau = 2n*pi)")
    v0 = np.asarray(v0, dtype=complex)
    trace = integrate(model, v0, horizon_taus * model.tau)
    return float(np.max(np.linalg.norm(trace.v - v0[None, :], axis=1)))
