"""Principal branch of the Lambert W function on the complex plane.

Halley iteration from a piecewise initial guess: Taylor series near the
origin, a branch-point expansion near -1/e, and an asymptotic
log(z) - log(log(z)) guess elsewhere.  The principal branch is selected
by the guess (principal logarithm / principal square root), which keeps
Im W in (-pi, pi] and W >= -1 on the real ray z >= -1/e.
"""
from __future__ import annotations

import cmath
import math

_INV_E = math.exp(-1.0)
_MAX_ITER = 100


class NonConvergence(ArithmeticError):
    pass


def _initial_guess(z: complex) -> complex:
    if abs(z) < 0.25:
        # W = z - z^2 + 3/2 z^3 + O(z^4)
        return z * (1.0 + z * (-1.0 + 1.5 * z))
    if abs(z + _INV_E) < 0.6:
        # branch point: W = -1 + p - p^2/3 + 11 p^3/72, p = sqrt(2(ez+1));
        # the principal sqrt lands on the principal branch from above.
        p = cmath.sqrt(2.0 * (math.e * z + 1.0))
        return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0))
    lz = cmath.log(z)
    if abs(z) > 3.0:
        return lz - cmath.log(lz)
    # log(1+z) tracks W on the right half plane; near the negative axis
    # it would fall off the principal sheet, so keep the plain logarithm
    return cmath.log(1.0 + z) if z.real >= 0.0 else lz


def lambert_w0(z: complex) -> complex:
    """Solve w * exp(w) = z on the principal branch.

    The residual |w e^w - z| is driven below ~1e-14 * max(1, |z|);
    raises NonConvergence if Halley stalls (not observed on
    |z| <= 1e3, including the real ray z < -1/e).
    """
    z = complex(z)
    if z == 0:
        return 0.0 + 0.0j
    if abs(math.e * z + 1.0) < 1e-12 and z.imag == 0.0:
        return -1.0 + 0.0j  # branch point; Halley denominator degenerates
    w = _initial_guess(z)
    tol = 1e-14 * max(1.0, abs(z))
    for _ in range(_MAX_ITER):
        if abs(w.real) > 700.0:
            raise NonConvergence(f"iterate escaped for z={z!r}")
        ew = cmath.exp(w)
        f = w * ew - z
        if abs(f) <= tol:
            break
        # Halley step for f(w) = w e^w - z
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0:
            raise NonConvergence(f"degenerate Halley denominator at z={z!r}")
        w = w - f / denom
    else:
        raise NonConvergence(f"no convergence for z={z!r}")
    # exact-real inputs on z >= -1/e have a real principal value
    if z.imag == 0.0 and z.real >= -_INV_E:
        w = complex(w.real, 0.0)
    return w
