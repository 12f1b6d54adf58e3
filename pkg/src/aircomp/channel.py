"""Fading channel realizations, AWGN, and synchronization impairments.

The flat multiple-access channel is y = sum_k h_k x_k + w with w ~ CN(0, s2).
The impairment path applies, per node k and multipath tap w,

    h_{k,w} e^{j dtheta_k} x_k(t - tau_{k,w} - dt_k) e^{j 2 pi df_k (t - tau_{k,w})}

to sampled baseband waveforms, with delays quantized to the sample grid (the
OFDM module provides an exact closed-form path for oracle comparisons).
Receiver-side offsets (``rx_to``, ``backoff``) live in the profile but are
consumed by the OFDM windowing, not here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


def _wrap_phase(theta: np.ndarray) -> np.ndarray:
    """Wrap angles to (-pi, pi]."""
    t = np.mod(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(t == -np.pi, np.pi, t)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-node complex gains, optional multipath taps and the noise level.

    ``taps[k]`` is a list of (complex gain, delay seconds) pairs with strictly
    increasing nonnegative delays. When both are present the flat gain must be
    the single tap's gain at delay 0.
    """

    flat_gains: np.ndarray
    noise_variance: float = 0.0
    taps: list | None = None

    def __post_init__(self):
        gains = np.asarray(self.flat_gains, dtype=complex)
        object.__setattr__(self, "flat_gains", gains)
        if gains.ndim != 1 or gains.size < 1:
            raise ValueError("flat_gains must be a nonempty vector")
        if self.noise_variance < 0:
            raise ValueError("noise variance must be nonnegative")
        if self.taps is not None:
            if len(self.taps) != gains.size:
                raise ValueError("need one tap list per node")
            for k, node_taps in enumerate(self.taps):
                delays = np.asarray([d for _, d in node_taps], dtype=float)
                if delays.size == 0:
                    raise ValueError("empty tap list")
                if delays.min() < 0 or np.any(np.diff(delays) <= 0):
                    raise ValueError("delays must be nonnegative and strictly increasing")
                if delays.size == 1 and delays[0] == 0.0:
                    if abs(complex(node_taps[0][0]) - gains[k]) > 1e-12:
                        raise ValueError(f"flat gain inconsistent with single tap for node {k}")

    @property
    def num_nodes(self) -> int:
        return self.flat_gains.size

    def node_taps(self, k: int) -> list[tuple[complex, float]]:
        if self.taps is not None:
            return [(complex(g), float(d)) for g, d in self.taps[k]]
        return [(complex(self.flat_gains[k]), 0.0)]

    def to_json(self) -> str:
        obj = {
            "flat_gains": [[g.real, g.imag] for g in self.flat_gains],
            "noise_variance": self.noise_variance,
        }
        if self.taps is not None:
            obj["taps"] = [
                [[complex(g).real, complex(g).imag, float(d)] for g, d in node]
                for node in self.taps
            ]
        return json.dumps(obj)

    @classmethod
    def from_json(cls, text: str) -> "ChannelRealization":
        obj = json.loads(text)
        gains = np.array([complex(re, im) for re, im in obj["flat_gains"]])
        taps = None
        if "taps" in obj:
            taps = [[(complex(re, im), d) for re, im, d in node] for node in obj["taps"]]
        return cls(gains, float(obj.get("noise_variance", 0.0)), taps)


@dataclass(frozen=True)
class ImpairmentProfile:
    """Synchronization offsets: CFO (Hz), TX timing (s), phase (rad), RX side."""

    cfo: np.ndarray
    to: np.ndarray
    po: np.ndarray
    rx_to: float = 0.0
    backoff: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "cfo", np.asarray(self.cfo, dtype=float))
        object.__setattr__(self, "to", np.asarray(self.to, dtype=float))
        object.__setattr__(self, "po", _wrap_phase(self.po))
        if not (self.cfo.size == self.to.size == self.po.size):
            raise ValueError("cfo, to and po must all have length K")

    @classmethod
    def ideal(cls, K: int) -> "ImpairmentProfile":
        z = np.zeros(K)
        return cls(z, z.copy(), z.copy())

    @property
    def num_nodes(self) -> int:
        return self.cfo.size

    def to_json(self) -> str:
        return json.dumps(
            {
                "cfo": self.cfo.tolist(),
                "to": self.to.tolist(),
                "po": self.po.tolist(),
                "rx_to": self.rx_to,
                "backoff": self.backoff,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ImpairmentProfile":
        obj = json.loads(text)
        return cls(obj["cfo"], obj["to"], obj["po"],
                   float(obj.get("rx_to", 0.0)), float(obj.get("backoff", 0.0)))


@dataclass(frozen=True)
class SnrSpec:
    """SNR in dB, referenced per user or to the total received signal power."""

    snr_db: float
    reference: str = "per_user"

    def __post_init__(self):
        if self.reference not in ("per_user", "total"):
            raise ValueError("reference must be 'per_user' or 'total'")


def snr_to_noise_variance(spec: SnrSpec, per_user_signal_power: float, K: int) -> float:
    """Noise variance for the requested SNR convention."""
    if per_user_signal_power <= 0:
        raise ValueError("signal power must be positive")
    factor = 10.0 ** (spec.snr_db / 10.0)
    if spec.reference == "per_user":
        return per_user_signal_power / factor
    return K * per_user_signal_power / factor


def complex_awgn(rng: np.random.Generator, variance: float, shape) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with the given variance."""
    if variance == 0.0:
        return np.zeros(shape, dtype=complex)
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_rayleigh(K: int, rng: np.random.Generator,
                  noise_variance: float = 0.0) -> ChannelRealization:
    """K i.i.d. unit-variance CN(0,1) flat gains (Rayleigh magnitudes)."""
    if K < 1:
        raise ValueError("K must be at least 1")
    gains = complex_awgn(rng, 1.0, K)
    return ChannelRealization(gains, noise_variance)


def apply_flat_channel(symbols, realization: ChannelRealization,
                       rng: np.random.Generator) -> np.ndarray:
    """sum_k h_k x_k + w, elementwise over the resource axis.

    ``symbols`` has shape (K, L); the result has shape (L,).
    """
    x = np.asarray(symbols, dtype=complex)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != realization.num_nodes:
        raise ValueError("one symbol vector per node required")
    y = realization.flat_gains @ x
    return y + complex_awgn(rng, realization.noise_variance, y.shape)


def apply_impairments(baseband, profile: ImpairmentProfile,
                      realization: ChannelRealization, sample_rate: float,
                      rng: np.random.Generator | None = None) -> np.ndarray:
    """Superpose per-node waveforms with multipath, timing, phase and CFO.

    ``baseband`` has shape (K, N): node k's complex waveform sampled at
    ``sample_rate`` on the common output grid t_n = n / sample_rate. Delays
    (tap delay + TX timing offset) are rounded to the sample grid; the CFO
    phase uses the exact delay. Samples shifted past the end are dropped, so a
    delay longer than the waveform is an error.
    """
    x = np.asarray(baseband, dtype=complex)
    if x.ndim != 2 or x.shape[0] != realization.num_nodes:
        raise ValueError("baseband must be (K, N) with one row per node")
    K, N = x.shape
    if profile.num_nodes != K:
        raise ValueError("profile size mismatch")
    max_cfo = float(np.max(np.abs(profile.cfo))) if K else 0.0
    if max_cfo > 0 and sample_rate < 10.0 * max_cfo:
        raise ValueError("sample_rate must oversample the largest CFO by 10x")

    t = np.arange(N) / sample_rate
    out = np.zeros(N, dtype=complex)
    for k in range(K):
        for gain, delay in realization.node_taps(k):
            total_delay = delay + profile.to[k]
            shift = int(round(total_delay * sample_rate))
            if abs(shift) >= N:
                raise ValueError(f"delay exceeds waveform length for node {k}")
            shifted = np.zeros(N, dtype=complex)
            if shift >= 0:
                shifted[shift:] = x[k, : N - shift]
            else:
                shifted[:shift] = x[k, -shift:]
            phase = profile.po[k] + 2 * np.pi * profile.cfo[k] * (t - delay)
            out += gain * np.exp(1j * phase) * shifted
    if rng is not None and realization.noise_variance > 0:
        out += complex_awgn(rng, realization.noise_variance, N)
    return out
