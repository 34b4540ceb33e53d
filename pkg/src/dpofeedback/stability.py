"""Asymptotic stability of the delayed system.

Three routes, used to cross-check each other:

* closed-form characteristic roots via the principal-branch Lambert W
  function (only for the two matched interference classes, where the
  characteristic determinant factorises);
* the delay-independent Routh-Hurwitz criterion with its analytic
  shortcut (gamma2+gamma3)/2 > |eps|;
* a numeric Newton search for characteristic roots, valid for any
  loop phase.

Sign convention for the factorised roots: the delayed coupling enters
with +gamma1 for destructive interference (omega0*tau = 2n*pi) and
-gamma1 for constructive (omega0*tau = (2n-1)*pi).

The dimensionless indicator s1w_dimensionless returns
tau * Re[s1] = Re[W0(sigma*x*exp(-x*(a-1)))] + x*(a-1) with
x = gamma1*tau and a the pump-loss balance alpha_tilde.  Note the
exponent sign: substituting alpha1 = gamma1*(alpha_tilde - 1) into the
root formula forces exp(-x*(a-1)) for both interference classes; the
sign is confirmed against the numeric root oracle over the whole
parameter map.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .lambertw import lambert_w0
from .model import CONSTRUCTIVE, DESTRUCTIVE, Model


class GenericPhase(ValueError):
    """Lambert-W / Routh-Hurwitz formulas only apply to the matched
    interference classes; use the numeric root oracle instead."""


class ZeroDelay(ValueError):
    pass


class NoRootFound(ArithmeticError):
    pass


def _interference_sign(model: Model) -> float:
    kind = model.interference.kind
    if kind == DESTRUCTIVE:
        return 1.0
    if kind == CONSTRUCTIVE:
        return -1.0
    raise GenericPhase(
        f"interference phase {model.interference.phase:.6g} is neither "
        "0 nor pi; Lambert-W stability formulas do not apply")


def char_roots_lambert(model: Model) -> tuple[complex, complex]:
    """Dominant pair of characteristic roots from the factorised
    characteristic equation, s_i = W0(tau*beta*e^{-tau*alpha_i})/tau
    + alpha_i with alpha_1 = |eps| - G, alpha_2 = -|eps| - G and
    beta = +/- gamma1 by interference class."""
    sigma = _interference_sign(model)
    if model.gamma1 <= 0.0:
        raise GenericPhase("gamma1 = 0: no delayed coupling, roots are -G +/- |eps|")
    tau = model.tau
    if tau <= 0.0:
        raise ZeroDelay("tau must be positive for the Lambert-W root formula")
    beta = sigma * model.gamma1
    roots = []
    for alpha in (model.eps_abs - model.G, -model.eps_abs - model.G):
        arg = tau * beta * math.exp(-tau * alpha)
        roots.append(lambert_w0(arg) / tau + alpha)
    return roots[0], roots[1]


def s1w_dimensionless(gamma1_tau: float, alpha_tilde: float, interference: str) -> float:
    """tau-scaled growth indicator of the dominant root; its sign and
    zero set match S^1_W.  Positive means unstable."""
    if gamma1_tau <= 0.0:
        raise ZeroDelay("gamma1*tau must be positive")
    if interference == DESTRUCTIVE:
        sigma = 1.0
    elif interference == CONSTRUCTIVE:
        sigma = -1.0
    else:
        raise GenericPhase(f"unsupported interference class {interference!r}")
    x = gamma1_tau
    c = x * (alpha_tilde - 1.0)
    return (lambert_w0(sigma * x * math.exp(-c))).real + c


def stability_boundary_alpha(gamma1_tau: float, interference: str,
                             lo: float = -2.0, hi: float = 6.0,
                             tol: float = 1e-10) -> float:
    """Zero of s1w_dimensionless in alpha_tilde at fixed gamma1*tau,
    by bisection (the indicator is increasing in alpha_tilde)."""
    f_lo = s1w_dimensionless(gamma1_tau, lo, interference)
    f_hi = s1w_dimensionless(gamma1_tau, hi, interference)
    if f_lo > 0.0 or f_hi < 0.0:
        raise ValueError("no sign change in bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if s1w_dimensionless(gamma1_tau, mid, interference) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Routh-Hurwitz delay-independent criterion


@dataclass(frozen=True)
class HurwitzCertificate:
    eigenvalues: tuple[float, float]      # of A + gamma1*B
    condition1: bool
    condition2: bool
    imaginary_axis_hits: tuple            # (T, y) pairs found by the scan
    analytic: bool                        # (gamma2+gamma3)/2 > |eps|
    procedure_agrees: bool


def _aux_poly(alpha: float, sigma: float, g1: float, t: float):
    # (iy - alpha)(1 + iTy)^2 - sigma*g1*(1 - iTy)^2 = 0, cubic in y
    c_plus = [-t * t, 2j * t, 1.0]    # (1 + iTy)^2, descending powers
    c_minus = [-t * t, -2j * t, 1.0]  # (1 - iTy)^2
    poly = np.convolve([1j, -alpha], c_plus)
    return poly - sigma * g1 * np.concatenate(([0.0], c_minus))


def routh_hurwitz_delay_independent(model: Model, scan_points: int = 2001,
                                    imag_tol: float = 1e-7):
    """Delay-independent stability within a matched interference class.

    Primary answer is the analytic shortcut (gamma2+gamma3)/2 > |eps|;
    the certificate carries the two-condition procedure as a
    transcription guard: (1) Hurwitz test of A + gamma1*B, and (2) a
    scan of the auxiliary equation
    det[s*1 - A - gamma1*B*((1-Ts)/(1+Ts))^2] = 0 for imaginary-axis
    roots s = iy.  An imaginary-axis root at parameter T requires
    |iy - alpha_i| = gamma1 (the unimodular factor only rotates), so
    the scan walks a documented y-grid looking for sign changes of
    y^2 + alpha_i^2 - gamma1^2, recovers the matching T from the phase
    condition, and confirms the hit against the cubic itself.
    """
    sigma = _interference_sign(model)
    g1, eps = model.gamma1, model.eps_abs
    alphas = (eps - model.G, -eps - model.G)
    # eigenvalues of A + gamma1*B for B = sigma * identity
    eigs = tuple(a + sigma * g1 for a in alphas)
    cond1 = max(eigs) < 0.0

    hits = []
    if g1 > 0.0:
        for alpha in alphas:
            y_max = g1 + abs(alpha) + 1.0
            ys = np.linspace(0.0, y_max, scan_points)
            h = ys * ys + alpha * alpha - g1 * g1
            for k in np.flatnonzero(np.sign(h[:-1]) != np.sign(h[1:])):
                lo, hi = ys[k], ys[k + 1]
                for _ in range(80):  # bisection on the crossing
                    mid = 0.5 * (lo + hi)
                    if (mid * mid + alpha * alpha - g1 * g1) * \
                            (lo * lo + alpha * alpha - g1 * g1) > 0.0:
                        lo = mid
                    else:
                        hi = mid
                y = 0.5 * (lo + hi)
                # phase condition: (iy - alpha)/(sigma*g1) = u^2 with
                # u = (1-iTy)/(1+iTy) = e^{-2i*arctan(Ty)}, arg u in (-pi, 0]
                w = complex(-alpha, y) / (sigma * g1)
                arg_u = 0.5 * cmath.phase(w)
                if arg_u > 0.0:
                    arg_u -= math.pi
                if y == 0.0:
                    t = 0.0 if abs(arg_u) < 1e-12 else math.nan
                else:
                    t = math.tan(-0.5 * arg_u) / y
                if not (math.isfinite(t) and t >= 0.0):
                    continue
                roots = np.roots(_aux_poly(alpha, sigma, g1, t))
                if any(abs(r.imag) <= imag_tol * (1.0 + abs(r.real))
                       and abs(r.real - y) <= 1e-6 * (1.0 + y)
                       for r in roots):
                    hits.append((t, y))
    cond2 = not hits

    analytic = (model.gamma2 + model.gamma3) / 2.0 > eps
    cert = HurwitzCertificate(eigenvalues=eigs, condition1=cond1,
                              condition2=cond2,
                              imaginary_axis_hits=tuple(hits[:16]),
                              analytic=analytic,
                              procedure_agrees=(cond1 and cond2) == analytic)
    return analytic, cert


# ---------------------------------------------------------------------------
# Numeric characteristic-root oracle


def _char_fun(model: Model):
    """Characteristic function det[s*1 - A - gamma1*B*e^{-tau*s}] and
    its derivative, with the exact loop phase (valid for any phase)."""
    g, eps2 = model.G, model.eps_abs ** 2
    g1, tau = model.gamma1, model.tau
    bp = cmath.exp(1j * model.phase0)
    bm = bp.conjugate()

    def f_df(s: complex):
        # exp overflow means the seed wandered far into the left half
        # plane; signal divergence instead of raising
        if -tau * s.real > 700.0:
            raise OverflowError("characteristic exponential overflow")
        e = cmath.exp(-tau * s)
        u = s + g - g1 * bp * e
        v = s + g - g1 * bm * e
        du = 1.0 + tau * g1 * bp * e
        dv = 1.0 + tau * g1 * bm * e
        return u * v - eps2, du * v + u * dv

    return f_df


def char_root_oracle(model: Model, re_span: tuple[float, float] | None = None,
                     seeds: int = 15) -> tuple[complex, list[complex]]:
    """Newton search for characteristic roots from a seed grid; returns
    the dominant root (largest real part) and all distinct roots found.

    For gamma1 = 0 the equation is polynomial and the roots -G +/- |eps|
    are returned directly.
    """
    g = model.G
    if model.gamma1 == 0.0:
        roots = [complex(-g + model.eps_abs), complex(-g - model.eps_abs)]
        return roots[0], roots
    tau = model.tau
    if tau <= 0.0:
        raise ZeroDelay("tau must be positive for the root oracle")
    f_df = _char_fun(model)
    scale = max(1.0, (g + model.gamma1 + model.eps_abs) ** 2)
    if re_span is None:
        re_span = (-5.0 * max(g, 1.0), 2.0 * max(g, 1.0))
    im_max = 3.0 * math.pi / tau

    found: list[complex] = []
    for re0 in np.linspace(re_span[0], re_span[1], seeds):
        for im0 in np.linspace(-im_max, im_max, seeds):
            s = complex(re0, im0)
            ok = False
            try:
                for _ in range(80):
                    f, df = f_df(s)
                    if df == 0:
                        break
                    step = f / df
                    s = s - step
                    if abs(step) < 1e-13 * (1.0 + abs(s)):
                        ok = abs(f_df(s)[0]) <= 1e-10 * scale
                        break
            except OverflowError:
                continue
            if not ok or not (abs(s.real) < 1e6 and abs(s.imag) < 1e6):
                continue
            for r in found:
                if abs(s - r) <= 1e-6 * (1.0 + abs(r)):
                    break
            else:
                found.append(s)
    if not found:
        raise NoRootFound("all Newton seeds diverged; widen the seed grid")
    found.sort(key=lambda r: (-r.real, abs(r.imag)))
    return found[0], found


# ---------------------------------------------------------------------------
# Verdicts and maps


@dataclass(frozen=True)
class StabilityVerdict:
    s1w: float                     # Re of dominant factorised root, ns^-1
    s2w: float
    stable: bool
    marginal: bool
    interference: str
    delay_independent: bool | None
    dominant_root: complex | None
    method: str


def classify_stability(model: Model, with_oracle: bool = False,
                       marginal_tol: float = 1e-6) -> StabilityVerdict:
    """Assemble a verdict for a validated model.

    Matched interference with gamma1 > 0 uses the Lambert-W roots (the
    dominant one alone decides); gamma1 = 0 falls back to the analytic
    eigenvalues.  Generic phases require with_oracle=True.
    """
    kind = model.interference.kind
    dominant = None
    if with_oracle:
        dominant, _ = char_root_oracle(model)
    if model.gamma1 == 0.0:
        s1 = model.eps_abs - model.G
        s2 = -model.eps_abs - model.G
        method = "eigenvalues"
        di: bool | None = model.G > model.eps_abs
    elif kind in (CONSTRUCTIVE, DESTRUCTIVE):
        if model.tau == 0.0:
            # zero delay: feedback term merges into the drift matrix
            sig = _interference_sign(model)
            s1 = model.eps_abs - model.G + sig * model.gamma1
            s2 = -model.eps_abs - model.G + sig * model.gamma1
            method = "eigenvalues"
        else:
            r1, r2 = char_roots_lambert(model)
            s1, s2 = r1.real, r2.real
            method = "lambert-w"
        di, _ = routh_hurwitz_delay_independent(model, scan_points=201)
    else:
        if dominant is None:
            raise GenericPhase(
                "generic interference phase: re-run with the root oracle "
                "(--with-oracle), which applies to any phase")
        s1, s2 = dominant.real, dominant.real
        method = "oracle"
        di = None
    band = marginal_tol * max(model.G, 1.0)
    return StabilityVerdict(s1w=s1, s2w=s2, stable=s1 < 0.0,
                            marginal=abs(s1) < band,
                            interference=kind, delay_independent=di,
                            dominant_root=dominant, method=method)


@dataclass(frozen=True)
class StabilityMap:
    gamma1_tau: tuple[float, ...]
    alpha_tilde: tuple[float, ...]
    s1w: tuple[tuple[float, ...], ...]   # [i_g1tau][i_alpha]
    boundary: tuple[tuple[float, float], ...]  # (gamma1_tau, alpha at zero)
    interference: str


def stability_map(gamma1_tau_grid, alpha_grid, interference: str) -> StabilityMap:
    """Dimensionless stability chart; the boundary polyline is the
    zero-level set of the indicator, located by linear interpolation
    between sign changes along each alpha_tilde column."""
    xs = [float(x) for x in gamma1_tau_grid]
    als = [float(a) for a in alpha_grid]
    values = []
    boundary = []
    for x in xs:
        col = [s1w_dimensionless(x, a, interference) for a in als]
        values.append(tuple(col))
        for (a0, a1), (f0, f1) in zip(zip(als, als[1:]), zip(col, col[1:])):
            if f0 == 0.0:
                boundary.append((x, a0))
            elif f0 < 0.0 < f1 or f1 < 0.0 < f0:
                boundary.append((x, a0 - f0 * (a1 - a0) / (f1 - f0)))
    return StabilityMap(gamma1_tau=tuple(xs), alpha_tilde=tuple(als),
                        s1w=tuple(values), boundary=tuple(boundary),
                        interference=interference)
