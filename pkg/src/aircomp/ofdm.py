"""OFDM framing with cyclic prefix, receiver back-off and timing impairments.

A single OFDM symbol of duration T_sym carries Q subcarriers plus a cyclic
prefix of length T_cp. The receiver clock may run ahead of the transmitters by
``rx_to`` seconds; it opens a DFT window of length T_sym starting ``backoff``
seconds into its own time axis and projects onto the subcarrier basis
referenced to the window start. With zero CFO and all per-node window offsets

    d_k = backoff - rx_to - to_k

inside the per-path validity region [tau_max - T_cp, tau_min], the window
content is exactly

    r(t) = sum_l [ sum_k H_{k,l} e^{j po_k} e^{j 2 pi l d_k / T_sym} a_{k,l} ] e^{j 2 pi l t / T_sym}

with the multipath frequency response H_{k,l} = sum_w h_{k,w} e^{-j 2 pi l tau_w / T_sym}
(exponent sign chosen so the time-domain pipeline matches; the DC subcarrier
coefficient is timing-free). ``predict_composite`` returns the bracketed
coefficients in closed form; the sampled time-domain pipeline reproduces them
exactly when all offsets sit on the sample grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, ImpairmentProfile, complex_awgn
from .errors import ConstraintError


@dataclass(frozen=True)
class OfdmConfig:
    """Subcarrier count, symbol/CP durations, back-off and oversampling."""

    num_subcarriers: int
    symbol_duration: float
    cp_duration: float
    backoff: float = 0.0
    oversampling: int = 4

    def __post_init__(self):
        if self.num_subcarriers < 1:
            raise ValueError("need at least one subcarrier")
        if self.symbol_duration <= 0 or self.cp_duration < 0:
            raise ValueError("durations must be positive")
        if not 0 <= self.backoff <= self.cp_duration:
            raise ValueError("backoff must lie in [0, T_cp]")
        if self.oversampling < 1 or int(self.oversampling) != self.oversampling:
            raise ValueError("oversampling must be a positive integer")

    @property
    def sample_rate(self) -> float:
        return self.num_subcarriers * self.oversampling / self.symbol_duration

    @property
    def samples_per_symbol(self) -> int:
        return self.num_subcarriers * self.oversampling


@dataclass(frozen=True)
class SampledWaveform:
    """Complex samples, the time of sample 0 and the sample rate."""

    start_time: float
    sample_rate: float
    samples: np.ndarray


def ofdm_modulate(symbols, config: OfdmConfig, timing_offset: float = 0.0) -> SampledWaveform:
    """One cyclic-prefixed OFDM symbol for a node offset by ``timing_offset``.

    Emits sum_q a_q exp(j 2 pi q (t - dt) / T_sym) on [dt - T_cp, dt + T_sym).
    """
    a = np.asarray(symbols, dtype=complex)
    if a.shape != (config.num_subcarriers,):
        raise ValueError("need exactly Q subcarrier symbols")
    fs = config.sample_rate
    n_cp = int(round(config.cp_duration * fs))
    if abs(n_cp - config.cp_duration * fs) > 1e-9:
        raise ValueError("T_cp must be an integer number of samples")
    n_total = n_cp + config.samples_per_symbol
    t0 = timing_offset - config.cp_duration
    t = t0 + np.arange(n_total) / fs
    q = np.arange(config.num_subcarriers)
    phases = np.exp(2j * np.pi * np.outer(t - timing_offset, q) / config.symbol_duration)
    return SampledWaveform(t0, fs, phases @ a)


def _window_offsets(config: OfdmConfig, profile: ImpairmentProfile) -> np.ndarray:
    return config.backoff - profile.rx_to - profile.to


def _check_cp_margin(config: OfdmConfig, realization: ChannelRealization,
                     profile: ImpairmentProfile) -> None:
    # |d_k| plus the longest path delay must fit inside the cyclic prefix;
    # the sampled single-symbol pipeline additionally needs d_k <= min delay
    # (no subsequent symbol exists to cover a late window)
    d = _window_offsets(config, profile)
    for k in range(realization.num_nodes):
        delays = np.array([tau for _, tau in realization.node_taps(k)])
        if abs(d[k]) + delays.max() > config.cp_duration + 1e-12:
            raise ConstraintError(
                f"node {k}: window offset {d[k]:.3g} plus max delay "
                f"{delays.max():.3g} exceeds the CP margin {config.cp_duration:.3g}"
            )


def predict_composite(config: OfdmConfig, realization: ChannelRealization,
                      profile: ImpairmentProfile) -> np.ndarray:
    """Closed-form per-(node, subcarrier) composite coefficients.

    Requires zero CFO (Condition 3) and every per-path window offset within
    the cyclic-prefix margin; raises ConstraintError otherwise.
    """
    if np.any(profile.cfo != 0.0):
        raise ConstraintError("closed form requires zero CFO (Condition 3)")
    _check_cp_margin(config, realization, profile)
    K = realization.num_nodes
    Q = config.num_subcarriers
    ell = np.arange(Q)
    d = _window_offsets(config, profile)
    out = np.zeros((K, Q), dtype=complex)
    for k in range(K):
        H = np.zeros(Q, dtype=complex)
        for gain, tau in realization.node_taps(k):
            H += gain * np.exp(-2j * np.pi * ell * tau / config.symbol_duration)
        out[k] = H * np.exp(1j * profile.po[k]) * np.exp(
            2j * np.pi * ell * d[k] / config.symbol_duration
        )
    return out


def single_carrier_view(composite: np.ndarray) -> np.ndarray:
    """DC-subcarrier coefficients: the timing-phase-free single-carrier gains."""
    return np.asarray(composite)[:, 0]


def superpose_time_domain(per_node_symbols, config: OfdmConfig,
                          realization: ChannelRealization,
                          profile: ImpairmentProfile,
                          rng: np.random.Generator | None = None) -> SampledWaveform:
    """Sampled multipath superposition on the receiver's time axis.

    Each node's prefixed waveform is shifted by round((tau + to_k + rx_to) fs)
    samples, rotated by its phase offset and residual CFO, and accumulated on
    the receiver grid covering [0, backoff + T_sym). Offsets on the sample
    grid make the pipeline exact; off-grid offsets are quantized.
    """
    fs = config.sample_rate
    n_out = int(np.ceil((config.backoff + config.symbol_duration) * fs - 1e-9))
    t_abs = np.arange(n_out) / fs - profile.rx_to
    out = np.zeros(n_out, dtype=complex)
    for k, symbols in enumerate(per_node_symbols):
        wave = ofdm_modulate(symbols, config, float(profile.to[k]))
        n_wave = wave.samples.size
        for gain, tau in realization.node_taps(k):
            start = wave.start_time + tau + profile.rx_to
            idx0 = int(round(start * fs))
            lo = max(idx0, 0)
            hi = min(idx0 + n_wave, n_out)
            if lo >= hi:
                continue
            seg = wave.samples[lo - idx0 : hi - idx0]
            if profile.cfo[k] != 0.0:
                seg = seg * np.exp(2j * np.pi * profile.cfo[k] * (t_abs[lo:hi] - tau))
            out[lo:hi] += gain * np.exp(1j * profile.po[k]) * seg
    if rng is not None and realization.noise_variance > 0:
        out += complex_awgn(rng, realization.noise_variance, n_out)
    return SampledWaveform(0.0, fs, out)


def receive_dft(waveform: SampledWaveform, config: OfdmConfig) -> np.ndarray:
    """Extract the back-off-aligned window and project onto the Q subcarriers."""
    fs = waveform.sample_rate
    if abs(fs - config.sample_rate) > 1e-9:
        raise ValueError("waveform sample rate does not match the config")
    n0_float = (config.backoff - waveform.start_time) * fs
    n0 = int(round(n0_float))
    if abs(n0 - n0_float) > 1e-6:
        raise ValueError("DFT window start is not on the sample grid")
    n = config.samples_per_symbol
    if n0 < 0 or n0 + n > waveform.samples.size:
        raise ValueError("waveform does not cover the DFT window")
    window = waveform.samples[n0 : n0 + n]
    return np.fft.fft(window)[: config.num_subcarriers] / n
