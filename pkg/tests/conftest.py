import numpy as np
import pytest

from duffqubit import DriveParams, DuffingParams, QuarticSign

TAU = 2.0 * np.pi


@pytest.fixture(scope="session")
def eq4_params():
    """Simulation parameter set (omega_o, g_qo, gamma, lam) = (1, 0.03, 0.05, 0.25)."""
    return DuffingParams(omega_o=1.0, lam=0.25, gamma=0.05,
                         quartic_sign=QuarticSign.CONFINING)


def drive(i0, omega_d=0.5, phase=0.0):
    return DriveParams(i0=i0, omega_d=omega_d, phase=phase)


def riemann_kernel(sd, s, panels=1_000_000):
    """Brute-force midpoint Riemann sum of integral J(w) e^{-iws} dw."""
    w = np.linspace(sd.domain_lo, sd.domain_hi, panels + 1)
    mid = 0.5 * (w[1:] + w[:-1])
    dw = np.diff(w)
    jw = sd.evaluate(mid)
    return np.sum(jw * np.exp(-1j * mid * s) * dw)
