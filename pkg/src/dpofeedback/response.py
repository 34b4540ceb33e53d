"""Frequency-domain response of the delayed intracavity field.

Everything is evaluated at the rotating-frame detuning omega (the
carrier sits at omega = 0).  The delay enters through the unimodular
loop factor

    E(omega) = exp(1j*phase0) * exp(-1j*omega*tau),

where phase0 is the exactly reduced carrier phase omega0*tau mod 2*pi
from the model, never a floating product omega0*tau.  The loop loss
function is s(omega) = 1 - E(omega).

Note on notation: the conjugate-reflected diagonal element
Zbar(omega) = conj(Z(-omega)) carries +1j*omega, exactly like Z itself;
only the delay factor is reflected.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .model import Model


class SingularDelta(ArithmeticError):
    """det(M) fell below the configured floor: the scenario is being
    evaluated exactly at (or beyond) threshold.  Request threshold
    spectra as eps_abs = (1 - eta) * threshold instead."""

    def __init__(self, omega: float, delta: complex, floor: float):
        super().__init__(
            f"|det M| = {abs(delta):.3e} below floor {floor:.3e} at omega = {omega}")
        self.omega = omega
        self.delta = delta
        self.floor = floor


class NonDefaultLoop(ValueError):
    """eval_response was asked for a model with phi != pi or
    gamma_f != gamma1; use eval_response_general (or response_at)."""


@dataclass(frozen=True)
class FreqResponse:
    """Internal-mode solution at one detuning: diagonal elements of the
    response matrix, its determinant, and the six input coefficients
    (a_minus[j-1] multiplies b_in^j(omega), a_plus[j-1] multiplies
    b_in^j-dagger(-omega), j = 1..3)."""

    omega: float
    s_plus: complex        # s(omega)
    s_minus_conj: complex  # conj(s(-omega))
    z_plus: complex        # Z(omega)
    z_minus_conj: complex  # conj(Z(-omega))
    delta: complex         # det M = Z(omega)*conj(Z(-omega)) - |eps|^2
    a_minus: tuple[complex, complex, complex]
    a_plus: tuple[complex, complex, complex]


@dataclass(frozen=True)
class PortFunctions:
    """Input-output boundary functions b_out = X*b_in + Y*c per port."""

    x1: complex
    y1: complex
    x2: complex
    y2: complex


def loop_factor(omega: float, model: Model) -> complex:
    """E(omega) = exp(1j*(omega0*tau mod 2pi)) * exp(-1j*omega*tau)."""
    return _exp_iphi(model.phase0) * cmath.exp(-1j * omega * model.tau)


def eval_s(omega: float, model: Model) -> complex:
    """Frequency-dependent loss of the feedback channel,
    s(omega) = 1 - E(omega).  Vanishes at omega = 0 for destructive
    interference and equals 2 for constructive."""
    return 1.0 - loop_factor(omega, model)


def _s_minus_conj(omega: float, model: Model) -> complex:
    # conj(s(-omega)) = 1 - exp(-1j*phase0)*exp(-1j*omega*tau)
    carrier = _exp_iphi(model.phase0).conjugate()
    return 1.0 - carrier * cmath.exp(-1j * omega * model.tau)


def delta_floor(model: Model) -> float:
    return 1e-12 * max(1.0, model.gamma2 ** 2)


def _exp_iphi(phi: float) -> complex:
    # exact values at the two special loop phases; e^{i*pi} evaluated in
    # floating point leaves a 1e-16 residual that gets amplified by the
    # near-threshold 1/Delta factors
    if phi == math.pi:
        return -1.0 + 0.0j
    if phi == 0.0:
        return 1.0 + 0.0j
    return cmath.exp(1j * phi)


def eval_ports(omega: float, model: Model) -> PortFunctions:
    """Boundary functions for both output ports.

    Port 2 (mirror M2) is the plain input-output relation.  Port 1
    carries the delayed loop reflection: the general form is
    X1 = e^{i*phi} E(omega), Y1 = sqrt(gamma1) e^{i*phi} E(omega)
    + sqrt(gamma_f), which for phi = pi, gamma_f = gamma1 collapses to
    X1 = -E, Y1 = sqrt(gamma1) s(omega).
    """
    e = loop_factor(omega, model)
    ephi = _exp_iphi(model.phi)
    x1 = ephi * e
    y1 = math.sqrt(model.gamma1) * ephi * e + math.sqrt(model.gamma_f)
    return PortFunctions(x1=x1, y1=y1, x2=1.0 + 0.0j,
                         y2=complex(math.sqrt(model.gamma2)))


def _pack(omega, model, s_p, s_mc, z_p, z_mc, u_p, u_mc) -> FreqResponse:
    eps = model.eps
    delta = z_p * z_mc - model.eps_abs ** 2
    floor = delta_floor(model)
    if abs(delta) < floor:
        raise SingularDelta(omega, delta, floor)
    g2 = math.sqrt(model.gamma2)
    g3 = math.sqrt(model.gamma3)
    a_minus = (-u_p * z_mc / delta,
               -g2 * z_mc / delta,
               -g3 * z_mc / delta)
    a_plus = (-u_mc * eps / delta,
              -g2 * eps / delta,
              -g3 * eps / delta)
    return FreqResponse(omega=omega, s_plus=s_p, s_minus_conj=s_mc,
                        z_plus=z_p, z_minus_conj=z_mc, delta=delta,
                        a_minus=a_minus, a_plus=a_plus)


def eval_response(omega: float, model: Model) -> FreqResponse:
    """Response for the default loop configuration (phi = pi,
    gamma_f = gamma1), where the feedback channel couples through
    sqrt(gamma1)*s(omega)."""
    if not model.is_default_loop:
        raise NonDefaultLoop(
            "model has free phi/gamma_f; use eval_response_general")
    h = (model.gamma2 + model.gamma3) / 2.0
    s_p = eval_s(omega, model)
    s_mc = _s_minus_conj(omega, model)
    z_p = 1j * omega + h + model.gamma1 * s_p
    z_mc = 1j * omega + h + model.gamma1 * s_mc
    g1 = math.sqrt(model.gamma1)
    return _pack(omega, model, s_p, s_mc, z_p, z_mc, g1 * s_p, g1 * s_mc)


def eval_response_general(omega: float, model: Model) -> FreqResponse:
    """Response for free loop phase phi and return coupling gamma_f.

    Fourier transforming the delayed Langevin equation in the rotating
    frame gives the diagonal element

        Z(omega) = 1j*omega + (gamma2+gamma3)/2 + (gamma1+gamma_f)/2
                   + sqrt(gamma1*gamma_f) * e^{i*phi} * E(omega)

    and the feedback-channel input coupling
    u(omega) = sqrt(gamma1) + sqrt(gamma_f) e^{i*phi} E(omega); the
    conjugate row uses conj(Z(-omega)) and conj(u(-omega)).
    gamma_f = 0 removes the delayed term entirely (Markovian channel).
    """
    h = (model.gamma2 + model.gamma3) / 2.0 + (model.gamma1 + model.gamma_f) / 2.0
    sg = math.sqrt(model.gamma1 * model.gamma_f)
    g1 = math.sqrt(model.gamma1)
    gf = math.sqrt(model.gamma_f)
    ephi = _exp_iphi(model.phi)
    e_p = loop_factor(omega, model)
    # conj(E(-omega)) = exp(-1j*phase0)*exp(-1j*omega*tau)
    e_mc = _exp_iphi(model.phase0).conjugate() * cmath.exp(-1j * omega * model.tau)
    z_p = 1j * omega + h + sg * ephi * e_p
    z_mc = 1j * omega + h + sg * ephi.conjugate() * e_mc
    u_p = g1 + gf * ephi * e_p
    u_mc = g1 + gf * ephi.conjugate() * e_mc
    s_p = eval_s(omega, model)
    s_mc = _s_minus_conj(omega, model)
    return _pack(omega, model, s_p, s_mc, z_p, z_mc, u_p, u_mc)


def response_at(omega: float, model: Model) -> FreqResponse:
    """Dispatch to the simplified default-loop path when possible."""
    if model.is_default_loop:
        return eval_response(omega, model)
    return eval_response_general(omega, model)
