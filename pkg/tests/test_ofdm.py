import numpy as np
import pytest

from aircomp.channel import ChannelRealization, ImpairmentProfile
from aircomp.errors import ConstraintError
from aircomp.ofdm import (OfdmConfig, ofdm_modulate, predict_composite, receive_dft,
                          single_carrier_view, superpose_time_domain)
from aircomp.rng import substream

CFG = OfdmConfig(num_subcarriers=16, symbol_duration=1.0, cp_duration=0.25,
                 backoff=0.125, oversampling=4)


def _grid_draw(rng, cfg, K, max_taps=3):
    """Random taps and offsets on the sample grid, inside the CP margin."""
    fs = cfg.sample_rate
    taps, tos = [], []
    for _ in range(K):
        n_taps = int(rng.integers(1, max_taps + 1))
        delays = np.sort(rng.choice(np.arange(0, 5), size=n_taps, replace=False)) / fs
        gains = (rng.standard_normal(n_taps) + 1j * rng.standard_normal(n_taps)) / np.sqrt(2)
        taps.append(list(zip(gains, delays)))
    rx_to = int(rng.integers(0, 3)) / fs
    for k in range(K):
        tau = np.array([d for _, d in taps[k]])
        lo_n = int(np.ceil((tau.max() - cfg.cp_duration) * fs))
        hi_n = int(np.floor(tau.min() * fs))
        d_k = int(rng.integers(lo_n, hi_n + 1)) / fs
        tos.append(cfg.backoff - rx_to - d_k)
    flat = np.array([sum(g for g, _ in node) for node in taps])
    real = ChannelRealization(flat, 0.0, taps)
    prof = ImpairmentProfile(np.zeros(K), np.array(tos),
                             rng.uniform(-np.pi, np.pi, K), rx_to, 0.0)
    return real, prof


def test_cp_is_cyclic():
    rng = substream(0)
    a = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    wave = ofdm_modulate(a, CFG)
    n_cp = int(round(CFG.cp_duration * CFG.sample_rate))
    core = wave.samples[n_cp:]
    assert np.allclose(wave.samples[:n_cp], core[-n_cp:], atol=1e-12)


def test_dc_subcarrier_constant():
    a = np.zeros(16, dtype=complex)
    a[0] = 1.0
    wave = ofdm_modulate(a, CFG)
    assert np.allclose(wave.samples, 1.0, atol=1e-12)


def test_single_subcarrier_pure_tone():
    a = np.zeros(16, dtype=complex)
    a[3] = 1.0
    wave = ofdm_modulate(a, CFG)
    t = wave.start_time + np.arange(wave.samples.size) / CFG.sample_rate
    assert np.allclose(wave.samples, np.exp(2j * np.pi * 3 * t), atol=1e-12)


def test_recover_symbols_zero_offsets():
    rng = substream(1)
    cfg = OfdmConfig(16, 1.0, 0.25, backoff=0.0, oversampling=4)
    a = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    real = ChannelRealization(np.array([1.0]), 0.0)
    prof = ImpairmentProfile.ideal(1)
    wave = superpose_time_domain([a], cfg, real, prof)
    y = receive_dft(wave, cfg)
    assert np.max(np.abs(y - a)) < 1e-9


def test_oracle_equivalence_100_draws():
    rng = substream(2)
    worst = 0.0
    for _ in range(100):
        K = int(rng.integers(1, 4))
        real, prof = _grid_draw(rng, CFG, K)
        syms = rng.standard_normal((K, 16)) + 1j * rng.standard_normal((K, 16))
        wave = superpose_time_domain(syms, CFG, real, prof)
        y = receive_dft(wave, CFG)
        pred = (predict_composite(CFG, real, prof) * syms).sum(axis=0)
        worst = max(worst, np.max(np.abs(y - pred)) / np.max(np.abs(syms)))
    assert worst < 1e-9


def test_predict_phase_examples():
    # net timing offset T/4 on subcarrier 1 -> e^{j pi / 2}
    cfg = OfdmConfig(4, 1.0, 0.5, backoff=0.25, oversampling=4)
    real = ChannelRealization(np.array([1.0]), 0.0)
    prof = ImpairmentProfile([0.0], [0.0], [0.0], rx_to=0.0)
    comp = predict_composite(cfg, real, prof)
    assert comp[0, 1] == pytest.approx(np.exp(1j * np.pi / 2))
    # phase grows linearly with the subcarrier index
    phases = np.unwrap(np.angle(comp[0]))
    steps = np.diff(phases)
    assert np.allclose(steps, steps[0], atol=1e-9)


def test_zero_offsets_unit_tap_coefficient_one():
    real = ChannelRealization(np.array([1.0, 1.0]), 0.0)
    prof = ImpairmentProfile.ideal(2)
    cfg = OfdmConfig(8, 1.0, 0.25, backoff=0.0)
    comp = predict_composite(cfg, real, prof)
    assert np.allclose(comp, 1.0, atol=1e-12)


def test_dc_view_timing_free():
    rng = substream(3)
    for _ in range(20):
        real, prof = _grid_draw(rng, CFG, 2)
        comp = predict_composite(CFG, real, prof)
        dc = single_carrier_view(comp)
        expected = np.array(
            [sum(g for g, _ in real.node_taps(k)) for k in range(2)]
        ) * np.exp(1j * prof.po)
        assert np.max(np.abs(dc - expected)) < 1e-12
        assert np.allclose(dc, comp[:, 0])


def test_cfo_breaks_closed_form():
    rng = substream(4)
    real, prof = _grid_draw(rng, CFG, 1)
    with_cfo = ImpairmentProfile([0.1 / CFG.symbol_duration], prof.to, prof.po,
                                 prof.rx_to, prof.backoff)
    with pytest.raises(ConstraintError):
        predict_composite(CFG, real, with_cfo)
    # time-domain pipeline with CFO deviates from the zero-CFO closed form
    syms = rng.standard_normal((1, 16)) + 1j * rng.standard_normal((1, 16))
    wave = superpose_time_domain(syms, CFG, real, with_cfo)
    y = receive_dft(wave, CFG)
    pred = (predict_composite(CFG, real, prof) * syms).sum(axis=0)
    assert np.max(np.abs(y - pred)) > 1e-3


def test_cp_margin_violation_rejected():
    real = ChannelRealization(np.array([1.0]), 0.0)
    prof = ImpairmentProfile([0.0], [2.0 * CFG.cp_duration], [0.0])
    with pytest.raises(ConstraintError):
        predict_composite(CFG, real, prof)


def test_parseval():
    rng = substream(5)
    real, prof = _grid_draw(rng, CFG, 2)
    syms = rng.standard_normal((2, 16)) + 1j * rng.standard_normal((2, 16))
    wave = superpose_time_domain(syms, CFG, real, prof)
    y = receive_dft(wave, CFG)
    n0 = int(round((CFG.backoff - wave.start_time) * CFG.sample_rate))
    window = wave.samples[n0 : n0 + CFG.samples_per_symbol]
    assert np.sum(np.abs(y) ** 2) == pytest.approx(
        np.mean(np.abs(window) ** 2), rel=1e-9)


def test_jitter_between_passes_increases_mse():
    # redrawing the phase offsets between calibration and data strictly hurts
    rng = substream(6)
    n_trials = 400
    err_fixed = np.empty(n_trials)
    err_jitter = np.empty(n_trials)
    for t in range(n_trials):
        real, prof = _grid_draw(rng, CFG, 2)
        comp_cal = predict_composite(CFG, real, prof)
        syms = rng.standard_normal((2, 16)) + 1j * rng.standard_normal((2, 16))
        precoded = syms / comp_cal

        wave = superpose_time_domain(precoded, CFG, real, prof)
        y = receive_dft(wave, CFG)
        err_fixed[t] = np.mean(np.abs(y - syms.sum(axis=0)) ** 2)

        jprof = ImpairmentProfile(prof.cfo, prof.to,
                                  rng.uniform(-np.pi, np.pi, 2),
                                  prof.rx_to, prof.backoff)
        wave_j = superpose_time_domain(precoded, CFG, real, jprof)
        y_j = receive_dft(wave_j, CFG)
        err_jitter[t] = np.mean(np.abs(y_j - syms.sum(axis=0)) ** 2)
    diff = err_jitter - err_fixed
    assert diff.mean() > 3 * diff.std(ddof=1) / np.sqrt(n_trials)


def test_window_validation():
    rng = substream(7)
    a = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    wave = ofdm_modulate(a, CFG)  # starts at -T_cp, covers the window
    short = type(wave)(wave.start_time, wave.sample_rate, wave.samples[:10])
    with pytest.raises(ValueError):
        receive_dft(short, CFG)


def test_config_validation():
    with pytest.raises(ValueError):
        OfdmConfig(0, 1.0, 0.25)
    with pytest.raises(ValueError):
        OfdmConfig(8, 1.0, 0.25, backoff=0.5)
    with pytest.raises(ValueError):
        OfdmConfig(8, 1.0, 0.25, oversampling=0)
