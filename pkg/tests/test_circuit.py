import math

import numpy as np
import pytest

from duffqubit import CircuitParams, effective_params, validate_regime
from duffqubit.circuit import _squid_levels
from duffqubit.errors import ConfigError


def table1_circuit(**kw):
    base = dict(e_c=2.0e10, e_j=5.0e9, et_c=1.88e5, et_j=1.2032e7, phi_e=0.0,
                n_g0=5.0e-7, omega_g=4.999e9, i_e_amp=1.0e6, i_e_freq=5.0e5)
    base.update(kw)
    return CircuitParams(**base)


def test_omega_q_from_detuning():
    eff = effective_params(table1_circuit())
    assert eff.metadata["omega_q_hz"] == pytest.approx(1.0e6)
    assert eff.omega_q == 1.0


def test_degenerate_squid_rejected():
    with pytest.raises(ConfigError, match="degenerate"):
        effective_params(table1_circuit(phi_e=math.pi))


def test_squid_golden_values():
    # golden outputs of the 401-dim charge-basis diagonalization
    eff = effective_params(table1_circuit())
    md = eff.metadata
    assert md["omega_o_hz"] == pytest.approx(2.960234e6, rel=1e-6)
    assert md["anharmonicity_hz"] == pytest.approx(48779.89, rel=1e-5)
    assert md["lam_hz"] == pytest.approx(16259.96, rel=1e-5)
    assert md["phi_zpf"] == pytest.approx(0.25, rel=1e-12)
    assert eff.omega_o == pytest.approx(2.960234, rel=1e-6)
    assert eff.lam == pytest.approx(0.01625996, rel=1e-5)
    assert eff.g_qo == 0.03  # default override, not circuit-derived


def test_drive_mapping():
    eff = effective_params(table1_circuit())
    assert eff.i0 == pytest.approx(math.sqrt(2.0) * 1.0e6 * 0.25 / 1.0e6, rel=1e-12)
    assert eff.omega_d == pytest.approx(0.5)


def test_truncation_convergence():
    cp = table1_circuit()
    e1 = _squid_levels(cp, 200)[:3]
    e2 = _squid_levels(cp, 400)[:3]
    assert np.max(np.abs((e1 - e2) / e2)) < 1e-10


def test_harmonic_limit():
    # shrink the quartic content at fixed harmonic frequency:
    # Et_J *= k, Et_C /= k keeps 2*sqrt(Et_C*Et_J) fixed while phi_zpf -> 0
    base = table1_circuit()
    harmonic = 2.0 * math.sqrt(base.et_c * base.et_j)
    lams = []
    devs = []
    for k in (1.0, 16.0, 256.0):
        eff = effective_params(table1_circuit(et_c=base.et_c / k, et_j=base.et_j * k))
        lams.append(eff.metadata["lam_hz"])
        devs.append(abs(eff.metadata["omega_o_hz"] / harmonic - 1.0))
    assert lams[0] > lams[1] > lams[2]
    assert lams[2] < 0.01 * lams[0]
    assert devs[0] > devs[1] > devs[2]
    assert devs[1] < 0.01 and devs[2] < 0.01


def test_effective_params_deterministic():
    a = effective_params(table1_circuit())
    b = effective_params(table1_circuit())
    assert a.omega_o == b.omega_o and a.lam == b.lam


def test_regime_checks_pass_at_table_values():
    checks = validate_regime(table1_circuit())
    by_name = {c.name: c for c in checks}
    assert by_name["gate_drive_weak"].ratio == pytest.approx(0.01)
    assert all(c.passed for c in checks)


def test_regime_check_fails_at_large_ratio():
    checks = validate_regime(table1_circuit(n_g0=2.5e-5))  # ratio 0.5
    by_name = {c.name: c for c in checks}
    assert not by_name["gate_drive_weak"].passed
    assert by_name["gate_drive_weak"].ratio == pytest.approx(0.5)


def test_regime_check_zero_energies():
    checks = validate_regime(table1_circuit(e_j=0.0))
    assert len(checks) == 1
    assert not checks[0].passed
    assert "zero energy" in checks[0].note
