import numpy as np
import pytest

from duffqubit import Signal, correction_factor, cumulative_phase, f_from_sinusoids, psd
from duffqubit.errors import ConfigError
from duffqubit.spectral import Spectrum, band_power


def make_signal(values, dt):
    n = len(values)
    return Signal(t=np.arange(n) * dt, values=np.asarray(values, float), dt=dt)


def sine_signal(amp, omega, n, dt, phase=0.0):
    t = np.arange(n) * dt
    return make_signal(amp * np.cos(omega * t + phase), dt)


def test_psd_zero_signal():
    spec = psd(make_signal(np.zeros(4096), 0.05))
    assert np.all(spec.S == 0.0)


def test_psd_sinusoid_power():
    # integrated power near omega_d recovers A^2/2 within 1%
    dt = 0.05
    n = 2 ** 14
    amp, w = 0.7, 2.0
    spec = psd(sine_signal(amp, w, n, dt), segments=8)
    total = band_power(spec, w - 0.5, w + 0.5)
    assert total == pytest.approx(amp**2 / 2.0, rel=0.01)


def test_psd_parseval():
    rng = np.random.default_rng(11)
    dt = 0.05
    x = rng.standard_normal(2 ** 14) + 0.4  # keep a DC component
    sig = make_signal(x, dt)
    spec = psd(sig, segments=8)
    mean_square = float(np.mean(x**2))
    assert np.trapezoid(spec.S, spec.omega) == pytest.approx(mean_square, rel=0.01)


def test_psd_too_short():
    with pytest.raises(ConfigError):
        psd(make_signal(np.ones(16), 0.1), segments=8)


def test_psd_chaotic_vs_periodic_contrast_placeholder():
    # full contrast check lives in the acceptance suite (C8); here only the
    # dB scale sanity
    spec = psd(sine_signal(1.0, 1.0, 8192, 0.05))
    assert np.isfinite(spec.db[spec.S > 0]).all()


def test_psd_time_shift_invariance():
    rng = np.random.default_rng(7)
    dt = 0.05
    x = rng.standard_normal(2 ** 15)
    spec_a = psd(make_signal(x, dt), segments=8)
    spec_b = psd(make_signal(np.roll(x, 1237), dt), segments=8)
    pa = band_power(spec_a, 10.0, 30.0)
    pb = band_power(spec_b, 10.0, 30.0)
    assert pa == pytest.approx(pb, rel=0.10)


def test_cumulative_phase_constant_exact():
    sig = make_signal(np.full(1001, 0.3), 0.01)
    phi = cumulative_phase(sig)
    assert np.allclose(phi.values, 0.3 * sig.t, atol=1e-14)
    assert phi.values[0] == 0.0


def test_cumulative_phase_sinusoid():
    dt = 0.001
    amp, w = 1.0, 2.0
    sig = sine_signal(amp, w, 10001, dt)
    phi = cumulative_phase(sig)
    exact = (amp / w) * np.sin(w * sig.t)
    assert np.max(np.abs(phi.values - exact)) < 1e-5


def test_cumulative_phase_zero():
    phi = cumulative_phase(make_signal(np.zeros(100), 0.1))
    assert np.all(phi.values == 0.0)


def test_correction_factor_zero_spectrum():
    spec = Spectrum(omega=np.linspace(0, 10, 101), S=np.zeros(101),
                    nperseg=64, n_segments=4, overlap=0.5)
    assert correction_factor(spec, 1.0) == 1.0


def test_correction_factor_single_line():
    # synthesized sinusoid on an exact FFT bin; F = exp(-A^2/(2 w^2))
    dt = 0.05
    n = 2 ** 14
    segments = 8
    nperseg = int(n / ((segments - 1) * 0.5 + 1.0))
    w_bin = 2.0 * np.pi * 40.0 / (nperseg * dt)  # 40th bin of the segment FFT
    amp = 0.1 * w_bin
    spec = psd(sine_signal(amp, w_bin, n, dt), segments=segments)
    f_exp = np.exp(-amp**2 / (2.0 * w_bin**2))
    assert correction_factor(spec, 0.5 * w_bin) == pytest.approx(f_exp, rel=0.02)


def test_correction_factor_two_lines_product():
    dt = 0.05
    n = 2 ** 14
    segments = 8
    nperseg = int(n / ((segments - 1) * 0.5 + 1.0))
    df = 2.0 * np.pi / (nperseg * dt)
    w1, w2 = 40.0 * df, 90.0 * df
    a1, a2 = 0.08 * w1, 0.05 * w2
    t = np.arange(n) * dt
    both = make_signal(a1 * np.cos(w1 * t) + a2 * np.cos(w2 * t), dt)
    only1 = make_signal(a1 * np.cos(w1 * t), dt)
    only2 = make_signal(a2 * np.cos(w2 * t), dt)
    w_cd = 0.5 * w1
    f_both = correction_factor(psd(both, segments=segments), w_cd)
    f1 = correction_factor(psd(only1, segments=segments), w_cd)
    f2 = correction_factor(psd(only2, segments=segments), w_cd)
    assert f_both == pytest.approx(f1 * f2, abs=1e-6)


def test_correction_factor_monotone_in_cutoff():
    rng = np.random.default_rng(3)
    spec = psd(make_signal(rng.standard_normal(2 ** 14) * 0.05, 0.05), segments=8)
    cds = [2.0, 5.0, 10.0, 20.0]
    fs = [correction_factor(spec, c) for c in cds]
    assert all(f1 <= f2 + 1e-15 for f1, f2 in zip(fs, fs[1:]))
    assert all(0.0 < f <= 1.0 for f in fs)


def test_correction_factor_beyond_nyquist():
    spec = psd(sine_signal(0.1, 1.0, 4096, 0.05))
    with pytest.raises(ConfigError):
        correction_factor(spec, spec.nyquist * 1.5)


def test_f_from_sinusoids_empty():
    assert f_from_sinusoids([]) == 1.0


def test_f_from_sinusoids_single_line():
    w = 3.0
    assert f_from_sinusoids([(0.1 * w, w)]) == pytest.approx(np.exp(-0.005), rel=1e-12)


def test_f_from_sinusoids_permutation_invariant():
    lines = [(0.02, 2.0), (0.05, 3.0), (0.01, 1.5)]
    assert f_from_sinusoids(lines) == f_from_sinusoids(lines[::-1])


def test_f_from_sinusoids_monotone_in_amplitude():
    w = 4.0
    f_small = f_from_sinusoids([(0.01 * w, w)])
    f_large = f_from_sinusoids([(0.08 * w, w)])
    assert f_large < f_small


def test_f_from_sinusoids_guards():
    with pytest.raises(ConfigError):
        f_from_sinusoids([(1.0, -2.0)])
    with pytest.raises(ConfigError):
        f_from_sinusoids([(0.5, 2.0)])  # index 0.25 > 0.2
    with pytest.warns(UserWarning):
        f_from_sinusoids([(0.3, 2.0)])  # index 0.15 warns
