"""Scenario parameters for the delayed-feedback parametric cavity.

All rates are in ns^-1, times in ns.  The optical carrier defaults to
omega0 = 1e6 ns^-1 (1 fs^-1), so the carrier phase accumulated over one
feedback round trip, omega0*tau, is of order 1e6 rad.  Evaluating
exp(1j*omega0*tau) with a floating-point product would lose the phase
entirely; the scaled delay form therefore keeps exact integers and the
phase is reduced mod 2*pi symbolically.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

TWO_PI = 2.0 * math.pi

#: Default carrier frequency, ns^-1.
DEFAULT_OMEGA0 = 1.0e6


class ModelError(ValueError):
    """Base class for scenario validation failures."""


class NegativeRate(ModelError):
    pass


class ZeroOmega0(ModelError):
    pass


class MalformedDelaySpec(ModelError):
    pass


class Gamma1ZeroWithScaledDelay(ModelError):
    pass


@dataclass(frozen=True)
class RawDelay:
    """Delay given directly as a time.  Carrier phase is reduced in
    floating point, so the constructive/destructive dichotomy is not
    exact for this form."""

    tau: float


@dataclass(frozen=True)
class ScaledDelay:
    """Delay tau = (S + 1e-6*delta)*pi ns with S*1e6 an integer.

    delta in {0, 1} flips the round-trip carrier phase between the two
    interference classes while changing tau itself by a negligible
    femtosecond-scale amount.
    """

    S: float
    delta: int = 0

    def millionths(self) -> int:
        """S*1e6 as an exact integer; raises if S is not representable."""
        su = round(self.S * 1e6)
        if abs(self.S * 1e6 - su) > 1e-6:
            raise MalformedDelaySpec(
                f"scaled delay needs S*1e6 integral, got S={self.S!r}")
        return su

    @property
    def tau(self) -> float:
        return (self.millionths() + self.delta) * 1e-6 * math.pi


DelaySpec = RawDelay | ScaledDelay


def phase_of_omega0_tau(delay: DelaySpec, omega0: float = DEFAULT_OMEGA0) -> float:
    """Carrier round-trip phase omega0*tau reduced mod 2*pi.

    For a scaled delay the reduction is done on integers, so the result
    is exactly 0.0 or pi.  For a raw delay it is a floating-point
    remainder; with omega0 ~ 1e6 the absolute phase error is of order
    1e-10 rad per ns of tau.
    """
    if isinstance(delay, ScaledDelay):
        m = omega0 * 1e-6
        mi = round(m)
        if mi <= 0 or abs(m - mi) > 1e-9 * max(1.0, abs(m)):
            raise MalformedDelaySpec(
                f"scaled delay requires omega0 an integer multiple of 1e6 ns^-1, "
                f"got omega0={omega0!r}")
        return math.pi * ((mi * (delay.millionths() + delay.delta)) % 2)
    phase = math.fmod(omega0 * delay.tau, TWO_PI)
    if phase < 0.0:
        phase += TWO_PI
    return phase


CONSTRUCTIVE = "constructive"
DESTRUCTIVE = "destructive"
GENERIC = "generic"

SHORT_DELAY = "short"
LONG_DELAY = "long"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class Interference:
    """Interference class of the returning loop field at the feedback
    mirror: destructive for omega0*tau = 2n*pi, constructive for
    (2n-1)*pi, generic otherwise."""

    kind: str
    phase: float  # omega0*tau mod 2*pi

    @property
    def is_matched(self) -> bool:
        return self.kind in (CONSTRUCTIVE, DESTRUCTIVE)


@dataclass(frozen=True)
class ModelParams:
    """Raw scenario parameters; validate() turns these into a Model."""

    eps_abs: float
    gamma1: float
    gamma2: float
    delay: DelaySpec
    gamma3: float = 0.0
    eps_phase: float = 0.0
    omega0: float = DEFAULT_OMEGA0
    gamma_f: float | None = None  # defaults to gamma1 (lossless loop mirror)
    phi: float = math.pi          # loop phase shift
    theta: float | None = None    # None selects 2*theta = beta + pi
    theta_opt: bool = False       # per-frequency analytic minimisation

    def to_dict(self) -> dict:
        d = {
            "eps_abs": self.eps_abs,
            "eps_phase": self.eps_phase,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "gamma3": self.gamma3,
            "omega0": self.omega0,
            "gamma_f": self.gamma_f,
            "phi": self.phi,
            "theta": self.theta,
            "theta_opt": self.theta_opt,
        }
        if isinstance(self.delay, ScaledDelay):
            d["scale_S"] = self.delay.S
            d["delta"] = self.delay.delta
        else:
            d["tau"] = self.delay.tau
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        d = dict(d)
        if "tau" in d and ("scale_S" in d or "delta" in d):
            raise MalformedDelaySpec("both raw tau and scaled delay given")
        if "tau" in d:
            delay: DelaySpec = RawDelay(float(d.pop("tau")))
        elif "scale_S" in d:
            delay = ScaledDelay(float(d.pop("scale_S")), int(d.pop("delta", 0)))
        else:
            raise MalformedDelaySpec("no delay specification given")
        return cls(delay=delay, **d)


@dataclass(frozen=True)
class DerivedParams:
    G: float
    alpha_tilde: float | None
    gamma1_tau: float
    interference: Interference
    regime: str


@dataclass(frozen=True)
class Model:
    """Validated scenario with derived quantities populated."""

    params: ModelParams
    derived: DerivedParams

    # -- convenience accessors -------------------------------------------
    @property
    def eps(self) -> complex:
        p = self.params
        return p.eps_abs * complex(math.cos(p.eps_phase), math.sin(p.eps_phase))

    @property
    def eps_abs(self) -> float:
        return self.params.eps_abs

    @property
    def beta(self) -> float:
        return self.params.eps_phase

    @property
    def gamma1(self) -> float:
        return self.params.gamma1

    @property
    def gamma2(self) -> float:
        return self.params.gamma2

    @property
    def gamma3(self) -> float:
        return self.params.gamma3

    @property
    def gamma_f(self) -> float:
        gf = self.params.gamma_f
        return self.params.gamma1 if gf is None else gf

    @property
    def phi(self) -> float:
        return self.params.phi

    @property
    def omega0(self) -> float:
        return self.params.omega0

    @property
    def tau(self) -> float:
        return self.params.delay.tau

    @property
    def phase0(self) -> float:
        """Exact carrier round-trip phase, mod 2*pi."""
        return phase_of_omega0_tau(self.params.delay, self.params.omega0)

    @property
    def G(self) -> float:
        return self.derived.G

    @property
    def alpha_tilde(self) -> float | None:
        return self.derived.alpha_tilde

    @property
    def interference(self) -> Interference:
        return self.derived.interference

    @property
    def is_default_loop(self) -> bool:
        """True for the lossless-loop configuration phi=pi, gamma_f=gamma1."""
        return self.gamma_f == self.gamma1 and self.params.phi == math.pi

    @property
    def theta_eff(self) -> float:
        """Quadrature phase actually used: explicit theta, else the
        pump-locked choice 2*theta = beta + pi."""
        t = self.params.theta
        return (self.beta + math.pi) / 2.0 if t is None else t

    def fingerprint(self) -> str:
        blob = json.dumps(self.params.to_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def with_params(self, **changes) -> "Model":
        return validate(replace(self.params, **changes))


def _classify_interference(phase: float, exact: bool) -> Interference:
    if exact or phase == 0.0:
        if phase == 0.0:
            return Interference(DESTRUCTIVE, 0.0)
        if phase == math.pi:
            return Interference(CONSTRUCTIVE, math.pi)
    return Interference(GENERIC, phase)


def validate(params: ModelParams) -> Model:
    """Check physical sanity and populate derived quantities.

    Raises NegativeRate, ZeroOmega0, MalformedDelaySpec or
    Gamma1ZeroWithScaledDelay on bad input.
    """
    for name in ("gamma1", "gamma2", "gamma3"):
        if getattr(params, name) < 0.0:
            raise NegativeRate(f"{name} = {getattr(params, name)!r} < 0")
    if params.gamma_f is not None and params.gamma_f < 0.0:
        raise NegativeRate(f"gamma_f = {params.gamma_f!r} < 0")
    if params.eps_abs < 0.0:
        raise NegativeRate(f"eps_abs = {params.eps_abs!r} < 0")
    if params.omega0 <= 0.0:
        raise ZeroOmega0(f"omega0 = {params.omega0!r} must be positive")
    if isinstance(params.delay, RawDelay):
        if params.delay.tau < 0.0:
            raise MalformedDelaySpec(f"tau = {params.delay.tau!r} < 0")
    else:
        params.delay.millionths()  # integrality check
        if params.gamma1 == 0.0:
            raise Gamma1ZeroWithScaledDelay(
                "scaled delay with gamma1 = 0: no feedback channel, "
                "alpha_tilde undefined")

    gamma_f = params.gamma1 if params.gamma_f is None else params.gamma_f
    G = (params.gamma1 + gamma_f + params.gamma2 + params.gamma3) / 2.0
    if params.gamma1 > 0.0:
        alpha_tilde = (params.eps_abs
                       - (params.gamma2 + params.gamma3) / 2.0) / params.gamma1
    else:
        alpha_tilde = None

    phase = phase_of_omega0_tau(params.delay, params.omega0)
    interference = _classify_interference(
        phase, exact=isinstance(params.delay, ScaledDelay))

    g1tau = params.gamma1 * params.delay.tau
    if g1tau < 1.0:
        regime = SHORT_DELAY
    elif g1tau > 1.0:
        regime = LONG_DELAY
    else:
        regime = BOUNDARY

    derived = DerivedParams(G=G, alpha_tilde=alpha_tilde, gamma1_tau=g1tau,
                            interference=interference, regime=regime)
    return Model(params=params, derived=derived)


def scaled_delay_near(tau: float, kind: str, omega0: float = DEFAULT_OMEGA0) -> ScaledDelay:
    """Closest ScaledDelay to a target tau with the requested
    interference class (destructive: even phase count, constructive: odd).
    Helper for building dimensionless parameter sweeps."""
    if kind not in (CONSTRUCTIVE, DESTRUCTIVE):
        raise ValueError(f"kind must be constructive/destructive, got {kind!r}")
    m = round(omega0 * 1e-6)
    want_odd = (kind == CONSTRUCTIVE)
    if want_odd and m % 2 == 0:
        raise MalformedDelaySpec(
            "constructive interference unreachable: omega0/1e6 is even")
    total = max(1, round(tau / (1e-6 * math.pi)))  # su + delta
    if (m * total) % 2 != (1 if want_odd else 0):
        total += 1
    delta = 1 if want_odd else 0
    return ScaledDelay(S=(total - delta) * 1e-6, delta=delta)
