"""Modulation and demodulation schemes for computation over superposition.

Six schemes are implemented:

* analog direct aggregation: the preprocessed reading rides on one amplitude;
* bitwise digital aggregation: each base-p digit maps to a polar PAM symbol
  on its own resource and digit sums are recombined at the receiver;
* type-based multiple access with FSK tones: one resource per quantizer
  level, the received vector is the histogram ("type") of the data;
* Log-FSK: the log of an FSK tone is transmitted so the additive channel
  multiplies tones; the receiver exponentiates and detects the sum frequency;
* DCT hybrid: a single transmitter encodes a function's DCT coefficients in
  tone amplitudes and its reading in the tone family (frequency);
* sequence-energy aggregation: the reading scales the norm of a random-phase
  unimodular sequence, decoded non-coherently from received energy.

All functions are pure given explicit configs and generators.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintError, NumericalError
from .functions import NomographicDecomposition
from .quantizer import UniformQuantizer

SCHEMES = ("analog_da", "digital_bitwise", "tbma_fsk", "log_fsk",
           "dct_hybrid", "goldenbaum", "sumcomp", "channelcomp")


@dataclass(frozen=True)
class SchemeConfig:
    """Which scheme is in use plus its parameters (JSON-serializable)."""

    scheme: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        p = self.params
        if self.scheme == "digital_bitwise":
            if p.get("base", 2) < 2 or p.get("digits", 1) < 1:
                raise ValueError("digital_bitwise needs base >= 2 and digits >= 1")
        if self.scheme == "log_fsk" and p.get("alpha", 2.0) <= 1.0:
            raise ValueError("log_fsk needs alpha > 1")
        if self.scheme == "goldenbaum" and p.get("seq_len", 64) < 1:
            raise ValueError("goldenbaum needs seq_len >= 1")

    @property
    def resources(self) -> int:
        """Number of orthogonal radio resources L the scheme occupies."""
        if self.scheme == "digital_bitwise":
            return int(self.params.get("digits", 1))
        if self.scheme == "tbma_fsk":
            return int(self.params["levels"])
        if self.scheme == "goldenbaum":
            return int(self.params.get("seq_len", 64))
        return 1

    def to_json(self) -> str:
        return json.dumps({"scheme": self.scheme, "params": self.params})

    @classmethod
    def from_json(cls, text: str) -> "SchemeConfig":
        obj = json.loads(text)
        return cls(obj["scheme"], dict(obj.get("params", {})))


# ---------------------------------------------------------------------------
# analog direct aggregation
# ---------------------------------------------------------------------------

def analog_da_modulate(values, decomp: NomographicDecomposition) -> np.ndarray:
    """Per-node amplitudes phi(s_k) on the single shared resource."""
    vals = np.asarray(values, dtype=float)
    amps = np.asarray(decomp.preprocess(vals), dtype=float)
    if amps.shape != vals.shape:
        raise ValueError("single-resource decomposition required")
    return amps.astype(complex)


def analog_da_demodulate(y, decomp: NomographicDecomposition) -> float:
    """Postprocess the (coherently detected) superposed amplitude."""
    y_real = float(np.real(y))
    post = [psi(y_real) for psi in decomp.postprocess]
    return float(decomp.aggregate(post))


# ---------------------------------------------------------------------------
# bitwise digital aggregation
# ---------------------------------------------------------------------------

def _digits(values: np.ndarray, base: int, ndigits: int) -> np.ndarray:
    v = np.asarray(values, dtype=int)
    if np.any(v < 0) or np.any(v >= base**ndigits):
        raise ValueError(f"values must lie in [0, {base}^{ndigits})")
    d = np.empty(v.shape + (ndigits,), dtype=int)
    rem = v.copy()
    for i in range(ndigits):
        d[..., i] = rem % base
        rem //= base
    return d


def bitwise_modulate(values, base: int = 2, digits: int | None = None) -> np.ndarray:
    """Map each base-p digit to a polar PAM symbol: a = (p-1) - 2*digit.

    For p = 2 this is the usual a = 1 - 2m. Returns shape (K, D); digit d of
    node k occupies resource d.
    """
    v = np.asarray(values, dtype=int)
    if digits is None:
        digits = max(1, int(np.ceil(np.log(v.max() + 1) / np.log(base)))) if v.max() > 0 else 1
    d = _digits(v, base, digits)
    return ((base - 1) - 2 * d).astype(complex)


def bitwise_demodulate(y, K: int, base: int = 2, aggregate: str = "mean") -> float:
    """Recover the digit sums and recombine them in base p.

    Per resource, sum_k m_k = (K (p-1) - y) / 2, rounded to the nearest
    integer in [0, K (p-1)]; the value sum is sum_d p^d * digit_sum_d.
    """
    y_real = np.real(np.asarray(y))
    digit_sums = (K * (base - 1) - y_real) / 2.0
    digit_sums = np.clip(np.rint(digit_sums), 0, K * (base - 1))
    weights = float(base) ** np.arange(y_real.size)
    total = float(np.dot(weights, digit_sums))
    if aggregate == "sum":
        return total
    if aggregate == "mean":
        return total / K
    raise ValueError("aggregate must be 'sum' or 'mean'")


# ---------------------------------------------------------------------------
# type-based multiple access (FSK tone per quantizer level)
# ---------------------------------------------------------------------------

def tbma_modulate(values, quantizer: UniformQuantizer) -> np.ndarray:
    """One-hot resource vectors: node k puts unit amplitude on its level."""
    idx = quantizer.quantize(np.asarray(values, dtype=float))
    out = np.zeros((idx.size, quantizer.levels), dtype=complex)
    out[np.arange(idx.size), idx] = 1.0
    return out


def tbma_threshold(K: int, levels: int) -> float:
    """Detection threshold for max/min readout: K / (2 M) of a unit bin."""
    return K / (2.0 * levels)


def tbma_demodulate(type_estimate, kind: str, quantizer: UniformQuantizer,
                    K: int, threshold: float | None = None) -> float:
    """Compute a function from the (noisy) type.

    arithmetic mean: sum_l v_l y_l / K; sum: the same times K; geometric
    mean: exp(sum_l (y_l / K) ln v_l) where a zero-valued level contributes
    nothing (its value is remapped to 1 before the log); majority vote: the
    sign of the value-weighted type; maximum / minimum: the highest / lowest
    bin exceeding the detection threshold.
    """
    y = np.real(np.asarray(type_estimate, dtype=complex))
    if y.size != quantizer.levels:
        raise ValueError("type length must equal the quantizer level count")
    vals = quantizer.grid()
    if kind in ("arithmetic_mean", "sum"):
        total = float(np.dot(vals, y))
        return total / K if kind == "arithmetic_mean" else total
    if kind == "majority_vote":
        return float(np.sign(np.dot(vals, y)))
    if kind == "geometric_mean":
        if np.any(vals < 0):
            raise ValueError("geometric mean needs a nonnegative level grid")
        logs = np.where(vals > 0, np.log(np.maximum(vals, 1e-300)), 0.0)
        return float(np.exp(np.dot(y, logs) / K))
    if kind in ("maximum", "minimum"):
        thr = tbma_threshold(K, quantizer.levels) if threshold is None else threshold
        detected = np.flatnonzero(y >= thr)
        if detected.size == 0:
            raise NumericalError("no bin exceeds the detection threshold")
        idx = detected[-1] if kind == "maximum" else detected[0]
        return float(vals[idx])
    raise ConstraintError(f"TBMA does not support the {kind!r} function")


# ---------------------------------------------------------------------------
# Log-FSK
# ---------------------------------------------------------------------------

def _window_cos(order: int, n_samples: int) -> np.ndarray:
    """cos(2 pi * order * (n + 1/2) / N): integer tone orders over the window.

    The observation window spans four symbol durations, so the quarter-wave
    tone grid (2v+1)/(4T) lands on integer orders; distinct orders are exactly
    orthogonal on the midpoint sample grid.
    """
    n = np.arange(n_samples)
    return np.cos(2 * np.pi * order * (n + 0.5) / n_samples)


def logfsk_modulate(level: int, quantizer: UniformQuantizer, alpha: float,
                    n_samples: int, duration: float = 2.0) -> np.ndarray:
    """log(sqrt(2/T) cos(pi (2v+1) t / (2T)) + alpha), sampled over [0, 4T).

    ``level`` is the quantizer index v of the reading. alpha must exceed the
    tone amplitude sqrt(2/T) so the log argument stays positive.
    """
    if not 0 <= level < quantizer.levels:
        raise ValueError("level outside the quantizer range")
    amp = math.sqrt(2.0 / duration)
    if alpha <= amp:
        raise ValueError("alpha must exceed the tone amplitude sqrt(2/T)")
    return np.log(amp * _window_cos(2 * level + 1, n_samples) + alpha)


def logfsk_demodulate(waveform, K: int, quantizer: UniformQuantizer,
                      alpha: float, duration: float = 2.0,
                      rel_threshold: float = 0.5) -> int:
    """Exponentiate and detect the maximum frequency component.

    The K-fold tone product puts its unique highest-order component at
    2*sum(v_k) + K; everything else (partial products, difference tones)
    sits strictly below. Detection picks the highest DFT bin exceeding
    ``rel_threshold`` times the expected sum-tone magnitude, with the overall
    gain estimated from the DC term exp-mean, so a positive scaling of the
    exponentiated waveform (an additive log-domain offset) never changes the
    detected tone. Returns the estimated sum of level indices.
    """
    g = np.exp(np.real(np.asarray(waveform, dtype=complex)))
    n = g.size
    s_max = K * (quantizer.levels - 1)
    if 2 * s_max + K >= n // 2:
        raise ValueError("waveform too short for the candidate tone family")
    gain = g.mean() / alpha**K
    if gain <= 0:
        raise NumericalError("no tone detected")
    spectrum = np.abs(np.fft.rfft(g - g.mean()))
    amp_sum = (2.0 / duration) ** (K / 2.0) * 0.5 ** (K - 1) * (n / 2.0)
    passing = np.flatnonzero(spectrum >= rel_threshold * gain * amp_sum)
    passing = passing[passing >= 1]
    if passing.size == 0:
        raise NumericalError("no tone detected")
    b = int(passing.max())
    return int(np.clip(round((b - K) / 2), 0, s_max))


def logfsk_level_sum_to_value_sum(level_sum: int, K: int,
                                  quantizer: UniformQuantizer) -> float:
    """Sum of dequantized readings implied by a sum of level indices."""
    lo, _ = quantizer.range
    return K * lo + quantizer.step * level_sum


# ---------------------------------------------------------------------------
# DCT hybrid (single transmitter)
# ---------------------------------------------------------------------------

def dct_coefficients(f_grid) -> np.ndarray:
    """Orthonormal DCT-II coefficients of a function sampled on M gridpoints."""
    f = np.asarray(f_grid, dtype=float)
    M = f.size
    i = np.arange(M)[:, None]
    s = np.arange(M)[None, :]
    mat = np.cos(np.pi * i * (2 * s + 1) / (2 * M)) * np.sqrt(2.0 / M)
    mat[0] = np.sqrt(1.0 / M)
    return mat @ f


def dct_reconstruct(coeffs, s_idx: int, M: int) -> float:
    """Inverse DCT-II at one grid point (coefficients beyond len(coeffs) = 0)."""
    c = np.asarray(coeffs, dtype=float)
    i = np.arange(c.size)
    basis = np.cos(np.pi * i * (2 * s_idx + 1) / (2 * M)) * np.sqrt(2.0 / M)
    if c.size > 0:
        basis[0] = np.sqrt(1.0 / M)
    return float(np.dot(c, basis))


def dct_hybrid_modulate(level: int, coeffs, M: int, n_samples: int,
                        amplitude: float = 1.0) -> np.ndarray:
    """Tone family for reading level s with DCT amplitudes F_1..F_I.

    Emits A sum_i F_i sqrt(2/N) cos(pi i (2s+1) t / (2T)) over a window of
    four symbol durations, where the integer tone orders i (2s+1) are exactly
    orthogonal. ``coeffs`` holds F_1..F_I (the DC coefficient is never
    transmitted).
    """
    F = np.asarray(coeffs, dtype=float)
    I = F.size
    if I < 1:
        raise ValueError("need at least one transmitted coefficient")
    if 2 * I * (2 * (M - 1) + 1) >= n_samples:
        raise ValueError("sample count violates the Nyquist condition for tone I")
    x = np.zeros(n_samples)
    norm = math.sqrt(2.0 / n_samples)
    for i in range(1, I + 1):
        x += amplitude * F[i - 1] * norm * _window_cos(i * (2 * level + 1), n_samples)
    return x


def dct_hybrid_demodulate(waveform, n_coeffs: int, M: int, dc_coeff: float,
                          amplitude: float = 1.0) -> tuple[float, int]:
    """Matched-filter grid search over s, then amplitude readout.

    Projects onto each candidate level's tone family, picks the level with
    the largest projected energy, reads the I coefficients there and returns
    (reconstructed function value, detected level).
    """
    x = np.asarray(waveform, dtype=float)
    n = x.size
    norm = math.sqrt(2.0 / n)
    best_energy, best_level, best_proj = -1.0, 0, None
    for s in range(M):
        proj = np.array(
            [norm * np.dot(_window_cos(i * (2 * s + 1), n), x)
             for i in range(1, n_coeffs + 1)]
        )
        energy = float(np.sum(proj**2))
        if energy > best_energy:
            best_energy, best_level, best_proj = energy, s, proj
    coeffs = np.concatenate(([dc_coeff], best_proj / amplitude))
    return dct_reconstruct(coeffs, best_level, M), best_level


# ---------------------------------------------------------------------------
# sequence-energy aggregation (non-coherent)
# ---------------------------------------------------------------------------

def goldenbaum_modulate(value: float, seq_len: int, rng: np.random.Generator,
                        g_scale: float = 1.0, g_offset: float = 0.0) -> np.ndarray:
    """sqrt(g(s)) times a random-phase unimodular sequence, g(s) = a s + b."""
    g = g_scale * float(value) + g_offset
    if g < 0:
        raise ValueError("g(s) must be nonnegative")
    theta = rng.uniform(0.0, 2 * np.pi, seq_len)
    return np.sqrt(g) * np.exp(1j * theta)


def goldenbaum_demodulate(received, seq_len: int, K: int, sigma2: float,
                          g_scale: float = 1.0, g_offset: float = 0.0) -> float:
    """Energy readout: ||r||^2 / Q - sigma2, then undo the affine g.

    Assumes channel magnitudes pre-equalized to unity. Negative energy after
    the noise subtraction clamps at zero. Returns the estimate of sum_k s_k.
    """
    if seq_len < 1:
        raise ValueError("seq_len must be >= 1")
    r = np.asarray(received, dtype=complex)
    energy = float(np.sum(np.abs(r) ** 2)) / seq_len - sigma2
    energy = max(energy, 0.0)
    return (energy - K * g_offset) / g_scale


def write_waveform_csv(path, samples, sample_rate: float, t0: float = 0.0) -> None:
    """Dump a sampled waveform as (time, re, im) rows for inspection."""
    import csv

    x = np.asarray(samples, dtype=complex)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "re", "im"])
        for n, v in enumerate(x):
            writer.writerow([t0 + n / sample_rate, v.real, v.imag])
