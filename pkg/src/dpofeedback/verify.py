"""Self-verification suite behind the `verify` CLI subcommand.

A quick cross-check of the independent computational routes: output
commutator preservation, reduction of the general loop to the default
one, Lambert-W residuals, sign agreement between the closed-form
stability indicator and the numeric root search, drift-freeness of the
difference feedback, and the derived quantities of every shipped
preset.  The pytest acceptance suite runs the same checks at full
scale; this one is sized to finish in seconds.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import dde, spectrum, stability
from .lambertw import lambert_w0
from .model import (CONSTRUCTIVE, DESTRUCTIVE, LONG_DELAY, SHORT_DELAY,
                    ModelParams, ScaledDelay, scaled_delay_near, validate)
from .response import eval_response, eval_response_general
from .scenario import PRESET_NAMES, load_preset


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_stable_model(rng: random.Random):
    """Random destructive-interference scenario below the
    delay-independent threshold (guaranteed stable)."""
    gamma1 = rng.uniform(0.2, 4.0)
    gamma2 = rng.uniform(0.5, 4.0)
    gamma3 = rng.uniform(0.0, 1.0)
    eps = rng.uniform(0.0, 0.95) * (gamma2 + gamma3) / 2.0
    tau = rng.uniform(0.05, 3.0)
    delay = scaled_delay_near(tau, DESTRUCTIVE)
    return validate(ModelParams(eps_abs=eps, eps_phase=rng.uniform(0, 2 * math.pi),
                                gamma1=gamma1, gamma2=gamma2, gamma3=gamma3,
                                delay=delay))


def check_bogoliubov(draws: int = 200, seed: int = 7) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(draws):
        m = random_stable_model(rng)
        omega = rng.uniform(-20.0, 20.0)
        for port in (1, 2):
            worst = max(worst,
                        spectrum.scattering_row(port, omega, m).bogoliubov_residual)
    return CheckResult("bogoliubov-identity", worst <= 1e-9,
                       f"max residual {worst:.3e} (limit 1e-9)")


def check_general_reduction(points: int = 10, seed: int = 11) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(points):
        m = random_stable_model(rng)
        omega = rng.uniform(-20.0, 20.0)
        a = eval_response(omega, m)
        b = eval_response_general(omega, m)
        for x, y in [(a.z_plus, b.z_plus), (a.z_minus_conj, b.z_minus_conj),
                     (a.delta, b.delta), *zip(a.a_minus, b.a_minus),
                     *zip(a.a_plus, b.a_plus)]:
            worst = max(worst, abs(x - y) / max(1.0, abs(x)))
    return CheckResult("general-loop-reduction", worst <= 1e-12,
                       f"max relative mismatch {worst:.3e} (limit 1e-12)")


def check_lambertw(points: int = 500, seed: int = 3) -> CheckResult:
    rng = random.Random(seed)
    worst = 0.0
    for i in range(points):
        if i % 5 == 0:
            z = complex(-math.exp(rng.uniform(-1.0, math.log(1e3))), 0.0)
        else:
            r = math.exp(rng.uniform(math.log(1e-3), math.log(1e3)))
            phi = rng.uniform(-math.pi, math.pi)
            z = r * complex(math.cos(phi), math.sin(phi))
        w = lambert_w0(z)
        worst = max(worst, abs(w * np.exp(w) - z) / max(1.0, abs(z)))
    return CheckResult("lambertw-residual", worst <= 1e-12,
                       f"max residual {worst:.3e} (limit 1e-12)")


def check_sign_agreement(n: int = 8) -> CheckResult:
    """S1W sign vs numeric dominant root on a small dimensionless grid
    for both interference classes; cells hugging the boundary skipped."""
    bad = 0
    total = 0
    for kind in (CONSTRUCTIVE, DESTRUCTIVE):
        for x in np.geomspace(0.15, 8.0, n):
            for alpha in np.linspace(-0.9, 3.7, n):
                boundary = stability.stability_boundary_alpha(x, kind)
                if abs(alpha - boundary) < 5e-2:
                    continue
                gamma1 = 1.0
                delay = scaled_delay_near(x / gamma1, kind)
                gamma2 = 2.5
                eps = alpha * gamma1 + gamma2 / 2.0
                if eps < 0:
                    continue
                m = validate(ModelParams(eps_abs=eps, gamma1=gamma1,
                                         gamma2=gamma2, gamma3=0.0,
                                         delay=delay))
                s1 = stability.s1w_dimensionless(m.derived.gamma1_tau,
                                                 m.alpha_tilde, kind)
                root, _ = stability.char_root_oracle(m, seeds=9)
                total += 1
                if (s1 > 0) != (root.real > 0):
                    bad += 1
    return CheckResult("stability-sign-agreement", bad == 0,
                       f"{bad} disagreements over {total} grid cells")


def check_pyragas_drift() -> CheckResult:
    m = validate(ModelParams(eps_abs=0.0, gamma1=2.0, gamma2=0.0, gamma3=0.0,
                             delay=ScaledDelay(0.5, 0)))
    drift = dde.pyragas_invariance_check(m, (1.0, 1.0))
    limit = 1e-8 * math.sqrt(2.0)
    return CheckResult("pyragas-noninvasive", drift <= limit,
                       f"max drift {drift:.3e} (limit {limit:.3e})")


_PRESET_EXPECT = {
    "fig3": dict(G=3.0, interference=DESTRUCTIVE, regime=LONG_DELAY),
    "fig4": dict(G=3.0, interference=DESTRUCTIVE, regime=LONG_DELAY),
    "fig5-g05": dict(G=3.0, interference=CONSTRUCTIVE, regime=SHORT_DELAY),
    "fig5-g3": dict(G=4.25, interference=CONSTRUCTIVE, regime=SHORT_DELAY),
    "fig5-g9": dict(G=7.25, interference=CONSTRUCTIVE, regime=SHORT_DELAY),
}


def check_presets() -> CheckResult:
    problems = []
    for name in PRESET_NAMES:
        scn = load_preset(name)
        if scn.map_grid is not None:
            continue
        m = validate(scn.model_params())
        expect = _PRESET_EXPECT[name]
        if abs(m.G - expect["G"]) > 1e-12:
            problems.append(f"{name}: G={m.G}")
        if m.interference.kind != expect["interference"]:
            problems.append(f"{name}: {m.interference.kind}")
        if m.derived.regime != expect["regime"]:
            problems.append(f"{name}: {m.derived.regime}")
    return CheckResult("preset-derived-quantities", not problems,
                       "; ".join(problems) or "all presets as documented")


def run_all() -> list[CheckResult]:
    return [
        check_bogoliubov(),
        check_general_reduction(),
        check_lambertw(),
        check_sign_agreement(),
        check_pyragas_drift(),
        check_presets(),
    ]
