"""End-to-end acceptance gate.

Each test prints a single PASS/FAIL line (visible with -s or in the
captured output on failure) and enforces the corresponding guarantee at
its stated tolerance.
"""
import math
import random

import numpy as np
import pytest

from conftest import random_stable_model
from dpofeedback.cli import main
from dpofeedback.dde import (DECAYING, GROWING, classify, integrate,
                             pyragas_invariance_check)
from dpofeedback.lambertw import lambert_w0
from dpofeedback.model import (CONSTRUCTIVE, DESTRUCTIVE, ModelParams,
                               ScaledDelay, scaled_delay_near, validate)
from dpofeedback.spectrum import (markovian_reference, scattering_row,
                                  squeezing_spectrum)
from dpofeedback.stability import (char_root_oracle,
                                   routh_hurwitz_delay_independent,
                                   s1w_dimensionless,
                                   stability_boundary_alpha)


def report(name, ok, detail=""):
    mark = "PASS" if ok else "FAIL"
    print(f"{mark} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def threshold_model(delta=0, eta=1e-6):
    return validate(ModelParams(eps_abs=(1.0 - eta), gamma1=2.0, gamma2=2.0,
                                gamma3=0.0, delay=ScaledDelay(0.5, delta)))


def grid_model(x, alpha, kind, gamma1=1.0, gamma2=2.5):
    delay = scaled_delay_near(x / gamma1, kind)
    eps = alpha * gamma1 + gamma2 / 2.0
    return validate(ModelParams(eps_abs=eps, gamma1=gamma1, gamma2=gamma2,
                                gamma3=0.0, delay=delay))


def test_01_bogoliubov_identity():
    rng = random.Random(101)
    worst = 0.0
    for _ in range(5000):
        m = random_stable_model(rng)
        w = rng.uniform(-20.0, 20.0)
        for port in (1, 2):
            worst = max(worst, scattering_row(port, w, m).bogoliubov_residual)
    report("01 output-commutator-identity", worst <= 1e-9,
           f"worst residual {worst:.3g} over 10^4 (model, port) draws")


def test_02_mirror_squeezing_vanishes_at_threshold():
    m = threshold_model()
    p2 = squeezing_spectrum(2, 0.0, m.theta_eff, m)
    report("02 mirror-output-center-squeezing", p2 <= 1e-4,
           f"P2(0) = {p2:.3g}")


def test_03_waveguide_center_pinned_to_noise_floor():
    m = threshold_model()
    p1 = squeezing_spectrum(1, 0.0, m.theta_eff, m)
    report("03 waveguide-output-center-noise", abs(p1 - 1.0) <= 1e-9,
           f"P1(0) = {p1:.12g}")


def test_04_no_pump_noise_floor():
    rng = random.Random(104)
    worst = 0.0
    for _ in range(200):
        m = random_stable_model(rng).with_params(eps_abs=0.0)
        w = rng.uniform(-30.0, 30.0)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        for port in (1, 2):
            worst = max(worst,
                        abs(squeezing_spectrum(port, w, theta, m) - 1.0))
    report("04 no-pump-noise-floor", worst <= 1e-12,
           f"worst |P - 1| = {worst:.3g}")


def test_05_constructive_boundary_shape():
    plateau = [stability_boundary_alpha(x, CONSTRUCTIVE)
               for x in (0.1, 0.3, 0.7)]
    tail = [stability_boundary_alpha(x, CONSTRUCTIVE) for x in (3, 10, 30)]
    ok = all(abs(b - 2.0) <= 1e-3 for b in plateau) \
        and tail[0] > tail[1] > tail[2] > 0.0
    report("05 constructive-boundary-shape", ok,
           f"plateau {['%.5f' % b for b in plateau]}, "
           f"tail {['%.5f' % b for b in tail]}")


def test_06_destructive_stability_sign():
    bad = []
    for x in (0.3, 2.0, 12.0):
        for alpha in np.linspace(-1.0, 4.0, 20):
            if abs(alpha) < 1e-3:
                continue
            s = s1w_dimensionless(x, float(alpha), DESTRUCTIVE)
            if (s < 0.0) != (alpha < 0.0):
                bad.append((x, float(alpha), s))
    report("06 destructive-stability-sign", not bad,
           f"{len(bad)} disagreement(s) over 60 grid cells")


def test_07_cross_oracle_stability_agreement():
    checked = 0
    bad = []
    for kind in (DESTRUCTIVE, CONSTRUCTIVE):
        for x in np.geomspace(0.1, 10.0, 20):
            boundary = 0.0 if kind == DESTRUCTIVE \
                else stability_boundary_alpha(float(x), kind)
            for alpha in np.linspace(-1.0, 4.0, 20):
                if abs(alpha - boundary) < 1e-3:
                    continue
                m = grid_model(float(x), float(alpha), kind)
                s1w = s1w_dimensionless(float(x), float(alpha), kind)
                dom, _ = char_root_oracle(m, seeds=7)
                s1_phys = s1w / m.tau
                t_end = min(1000.0, max(10.0 * m.tau, 10.0 / m.G,
                                        8.0 / abs(s1_phys)))
                trace = integrate(m, (1.0, 1.0), t_end)
                label = classify(trace, marginal_frac=1e-4).label
                want = GROWING if s1w > 0.0 else DECAYING
                agree = ((s1w > 0.0) == (dom.real > 0.0)) and label == want
                checked += 1
                if not agree:
                    bad.append((kind, float(x), float(alpha),
                                s1w, dom.real, label))
    report("07 cross-oracle-stability-agreement", not bad,
           f"{len(bad)} disagreement(s) over {checked} cells "
           "(closed form vs root search vs time domain)")


def test_08_delay_independent_criterion():
    rng = random.Random(108)
    checked = 0
    bad = 0
    for _ in range(50):
        g2 = rng.uniform(0.5, 4.0)
        g3 = rng.uniform(0.0, 1.0)
        g1 = rng.uniform(0.2, 3.0)
        eps = rng.uniform(0.0, 0.95) * (g2 + g3) / 2.0
        kind = rng.choice([DESTRUCTIVE, CONSTRUCTIVE])
        for x in np.geomspace(0.1, 10.0, 5):
            m = validate(ModelParams(
                eps_abs=eps, gamma1=g1, gamma2=g2, gamma3=g3,
                delay=scaled_delay_near(float(x) / g1, kind)))
            ok, _cert = routh_hurwitz_delay_independent(m, scan_points=201)
            dom, _ = char_root_oracle(m, seeds=7)
            checked += 1
            if not ok or dom.real >= 0.0:
                bad += 1
    report("08 delay-independent-criterion", bad == 0,
           f"{bad} failure(s) over {checked} below-threshold delay sweeps")


def test_09_difference_feedback_non_invasive():
    m = validate(ModelParams(eps_abs=0.0, gamma1=2.0, gamma2=0.0,
                             gamma3=0.0, delay=ScaledDelay(0.5, 0)))
    v0 = (1.0 + 0.5j, 1.0 - 0.5j)
    norm0 = math.sqrt(sum(abs(v) ** 2 for v in v0))
    drift = pyragas_invariance_check(m, v0)
    report("09 difference-feedback-non-invasive", drift <= 1e-8 * norm0,
           f"drift {drift:.3g} over ten delay periods")


def test_10_lambert_w_residuals():
    rng = random.Random(110)
    worst = 0.0
    for _ in range(10000):
        kind = rng.random()
        if kind < 0.2:
            z = complex(rng.uniform(-30.0, -1.0 / math.e), 0.0)  # real ray
        elif kind < 0.4:
            z = complex(rng.uniform(-1.0 / math.e, 30.0), 0.0)
        else:
            z = complex(rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0))
        w = lambert_w0(z)
        worst = max(worst, abs(w * np.exp(w) - z))
    branch = abs(lambert_w0(complex(-1.0 / math.e, 0.0)) + 1.0)
    report("10 lambert-w-residuals", worst <= 1e-12 and branch <= 1e-6,
           f"worst residual {worst:.3g}, branch point error {branch:.3g}")


def test_11_markovian_reduction_matches_textbook():
    m = markovian_reference(threshold_model())
    kappa = m.gamma1 + m.gamma2
    eps = m.eps_abs
    worst = 0.0
    for w in np.linspace(-18.0, 18.0, 2001):
        for port, g in ((1, m.gamma1), (2, m.gamma2)):
            expect = 1.0 - 2.0 * g * eps / ((kappa / 2.0 + eps) ** 2 + w * w)
            got = squeezing_spectrum(port, float(w), m.theta_eff, m)
            worst = max(worst, abs(got - expect))
    report("11 no-feedback-reduction", worst <= 1e-9,
           f"worst deviation from closed form {worst:.3g}")


def test_12_loss_ratio_trend_short_delay():
    p1_center = []
    p2_best = []
    for g2 in (0.5, 3.0, 9.0):
        m = validate(ModelParams(eps_abs=g2 / 2.0 + 5.0, gamma1=2.75,
                                 gamma2=g2, gamma3=0.0,
                                 delay=ScaledDelay(0.1, 1)))
        p1_center.append(squeezing_spectrum(1, 0.0, m.theta_eff, m))
        p2_best.append(min(squeezing_spectrum(2, float(w), m.theta_eff, m)
                           for w in np.linspace(-60.0, 60.0, 601)))
    ok = p1_center[0] < p1_center[1] < p1_center[2] \
        and p2_best[0] > p2_best[1] > p2_best[2]
    report("12 loss-ratio-trend", ok,
           f"P1(0) {['%.3f' % p for p in p1_center]} rising, "
           f"min P2 {['%.3f' % p for p in p2_best]} falling")


def test_13_preset_runs_are_byte_identical(tmp_path, capsys):
    outputs = []
    # one path per artifact, reused across runs: the embedded manifest
    # records the output path, so differing paths would differ trivially
    spath = tmp_path / "spec.csv"
    mpath = tmp_path / "map.csv"
    for _ in range(2):
        assert main(["spectrum", "--preset", "fig3",
                     "--output", str(spath)]) == 0
        assert main(["stability-map", "--preset", "fig2b-map",
                     "--g1tau-points", "31", "--alpha-points", "51",
                     "--output", str(mpath)]) == 0
        outputs.append(tuple(p.read_bytes() for p in sorted(tmp_path.iterdir())
                             if p.suffix == ".csv"))
    capsys.readouterr()
    report("13 byte-identical-reruns", outputs[0] == outputs[1],
           f"{len(outputs[0])} CSV file(s) compared byte-for-byte")
