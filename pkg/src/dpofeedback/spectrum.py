"""Scattering coefficients, output correlations and squeezing spectra.

The two observable ports are the feedback channel (port 1, only
measurable in the waveguide realisation) and the mirror M2 (port 2).
A squeezing spectrum value below 1 means noise reduction below the
vacuum level; 0 is perfect squeezing.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .model import Model
from .response import SingularDelta, eval_ports, response_at

PORT_WAVEGUIDE = 1
PORT_MIRROR = 2

#: Threshold proximity used when a scenario pins the pump to threshold:
#: eps_abs = (1 - DEFAULT_ETA) * (gamma2 + gamma3)/2.
DEFAULT_ETA = 1e-6

STATUS_OK = "ok"
STATUS_SINGULAR = "singular"


class EmptyGrid(ValueError):
    pass


@dataclass(frozen=True)
class ScatteringRow:
    """Output-port scattering at one detuning.

    s_minus[j-1] multiplies b_in^j(omega), s_plus[j-1] multiplies
    b_in^j-dagger(-omega).  n = sum |s_minus|^2 and
    m = sum s_minus(omega) * s_plus(-omega) are the output-field
    correlations; bogoliubov_residual is the deviation of
    sum(|s_minus|^2 - |s_plus|^2) from 1.
    """

    port: int
    omega: float
    s_minus: tuple[complex, complex, complex]
    s_plus: tuple[complex, complex, complex]
    n: float
    m: complex
    bogoliubov_residual: float


def _port_coeffs(port: int, omega: float, model: Model):
    """(S-minus_j, S-plus_j) for one port at one detuning."""
    if port not in (PORT_WAVEGUIDE, PORT_MIRROR):
        raise ValueError(f"port must be 1 or 2, got {port}")
    resp = response_at(omega, model)
    ports = eval_ports(omega, model)
    if port == PORT_WAVEGUIDE:
        x, y = ports.x1, ports.y1
    else:
        x, y = ports.x2, ports.y2
    s_minus = tuple(y * a + (x if j == port - 1 else 0.0)
                    for j, a in enumerate(resp.a_minus))
    s_plus = tuple(y * a for a in resp.a_plus)
    return s_minus, s_plus


def scattering_row(port: int, omega: float, model: Model) -> ScatteringRow:
    """Full scattering row; needs the response at both +omega and
    -omega since the anomalous correlation pairs the two."""
    s_minus, s_plus = _port_coeffs(port, omega, model)
    _, s_plus_neg = _port_coeffs(port, -omega, model)
    n = sum(abs(c) ** 2 for c in s_minus)
    m = sum(a * b for a, b in zip(s_minus, s_plus_neg))
    residual = abs(n - sum(abs(c) ** 2 for c in s_plus) - 1.0)
    return ScatteringRow(port=port, omega=omega, s_minus=s_minus,
                         s_plus=s_plus, n=n, m=m,
                         bogoliubov_residual=residual)


def output_correlations(port: int, omega: float, model: Model):
    """(N_i(omega), N_i(-omega), M_i(omega)) for the squeezing formula."""
    row = scattering_row(port, omega, model)
    row_neg = scattering_row(port, -omega, model)
    return row.n, row_neg.n, row.m


def squeezing_spectrum(port: int, omega: float, theta: float, model: Model) -> float:
    """Variance of the theta-quadrature of the output field:

        P(omega, theta) = 2*Re[e^{-2i*theta} M(omega)]
                          + N(omega) + N(-omega) - 1.
    """
    n_p, n_m, m = output_correlations(port, omega, model)
    return 2.0 * (cmath.exp(-2j * theta) * m).real + n_p + n_m - 1.0


def optimal_theta(port: int, omega: float, model: Model) -> tuple[float, float]:
    """Quadrature phase minimising P at this detuning, and the minimum
    P itself: P_min = N(omega) + N(-omega) - 1 - 2|M|, attained at
    2*theta = arg M + pi.  theta is reported in [0, pi); theta = 0 by
    convention when M vanishes."""
    n_p, n_m, m = output_correlations(port, omega, model)
    p_min = n_p + n_m - 1.0 - 2.0 * abs(m)
    theta = 0.0 if m == 0 else ((cmath.phase(m) + math.pi) / 2.0) % math.pi
    return theta, p_min


@dataclass(frozen=True)
class SpectrumRow:
    omega: float
    status: str
    p1: float | None = None
    p2: float | None = None
    n1: float | None = None
    n2: float | None = None
    m1: complex | None = None
    m2: complex | None = None


@dataclass(frozen=True)
class SpectrumTable:
    """Squeezing spectra for both ports over a detuning grid.  Grid
    points where det M dipped below the floor are kept as 'singular'
    gap rows rather than dropped."""

    fingerprint: str
    theta_mode: str  # "fixed:<value>" or "optimal"
    rows: tuple[SpectrumRow, ...]

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def default_grid(model: Model, points: int = 2001):
    """Symmetric detuning grid wide enough to cover the feedback side
    peaks (spacing of order pi/tau) and the cavity linewidth."""
    tau = model.tau
    half = 6.0 * max(model.G, math.pi / tau if tau > 0 else 0.0)
    if half <= 0.0:
        half = 1.0
    step = 2.0 * half / (points - 1) if points > 1 else 0.0
    return [-half + i * step for i in range(points)]


def spectrum_table(model: Model, omega_grid, theta_mode: str = "fixed") -> SpectrumTable:
    """Evaluate both ports on a strictly increasing detuning grid.

    theta_mode "fixed" uses the model's effective theta for every row;
    "optimal" minimises over theta per row and per port.
    """
    grid = list(omega_grid)
    if not grid:
        raise EmptyGrid("empty detuning grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("detuning grid must be strictly increasing")
    if theta_mode not in ("fixed", "optimal"):
        raise ValueError(f"unknown theta mode {theta_mode!r}")

    theta = model.theta_eff
    rows = []
    for omega in grid:
        try:
            if theta_mode == "optimal":
                _, p1 = optimal_theta(PORT_WAVEGUIDE, omega, model)
                _, p2 = optimal_theta(PORT_MIRROR, omega, model)
                r1 = scattering_row(PORT_WAVEGUIDE, omega, model)
                r2 = scattering_row(PORT_MIRROR, omega, model)
            else:
                r1 = scattering_row(PORT_WAVEGUIDE, omega, model)
                r2 = scattering_row(PORT_MIRROR, omega, model)
                n1m = scattering_row(PORT_WAVEGUIDE, -omega, model).n
                n2m = scattering_row(PORT_MIRROR, -omega, model).n
                p1 = 2.0 * (cmath.exp(-2j * theta) * r1.m).real + r1.n + n1m - 1.0
                p2 = 2.0 * (cmath.exp(-2j * theta) * r2.m).real + r2.n + n2m - 1.0
        except SingularDelta:
            rows.append(SpectrumRow(omega=omega, status=STATUS_SINGULAR))
            continue
        rows.append(SpectrumRow(omega=omega, status=STATUS_OK,
                                p1=p1, p2=p2, n1=r1.n, n2=r2.n,
                                m1=r1.m, m2=r2.m))

    mode = "optimal" if theta_mode == "optimal" else f"fixed:{theta:.12g}"
    return SpectrumTable(fingerprint=model.fingerprint(), theta_mode=mode,
                         rows=tuple(rows))


def markovian_reference(model: Model) -> Model:
    """Same cavity with the feedback return switched off
    (gamma_f = 0): the loss channel gamma1 becomes a plain Markovian
    reservoir, giving the no-feedback comparison curve."""
    return model.with_params(gamma_f=0.0)


def threshold_pump(gamma2: float, gamma3: float = 0.0, eta: float = DEFAULT_ETA) -> float:
    """Pump magnitude just below the destructive-interference
    instability threshold (gamma2+gamma3)/2."""
    return (1.0 - eta) * (gamma2 + gamma3) / 2.0
