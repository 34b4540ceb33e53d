import math
import random

import pytest

from dpofeedback.model import (DESTRUCTIVE, ModelParams, scaled_delay_near,
                               validate)


def random_stable_model(rng: random.Random, allow_phase: bool = True):
    """Destructive-interference scenario below the delay-independent
    threshold, guaranteed stable for any delay."""
    gamma1 = rng.uniform(0.2, 4.0)
    gamma2 = rng.uniform(0.5, 4.0)
    gamma3 = rng.uniform(0.0, 1.0)
    eps = rng.uniform(0.0, 0.95) * (gamma2 + gamma3) / 2.0
    delay = scaled_delay_near(rng.uniform(0.05, 3.0), DESTRUCTIVE)
    beta = rng.uniform(0.0, 2.0 * math.pi) if allow_phase else 0.0
    return validate(ModelParams(eps_abs=eps, eps_phase=beta, gamma1=gamma1,
                                gamma2=gamma2, gamma3=gamma3, delay=delay))


@pytest.fixture
def rng():
    return random.Random(12345)
