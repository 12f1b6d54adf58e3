"""Reproducible Monte Carlo experiment engine.

A scenario binds a function, a scheme, the network size and the sweep axes.
Trials are processed in fixed-size chunks; every random quantity in a chunk
comes from a counter-based substream keyed by (chunk index, purpose, node),
so results are bit-identical for any worker count and schedule, and schemes
compared at the same trial index share their readings and noise draws
(paired comparison).

Channel model of ``run_sweep``: ideal coherent multiple access under perfect
synchronization and channel knowledge (unit effective gains) plus AWGN, the
setting of the modulation-scheme comparisons. Transmit energy is normalized
to one per node per computation across schemes, and the per-user SNR sets the
per-resource noise variance 10^(-SNR/10); absolute error levels depend on
this normalization, so scheme orderings and trends are the meaningful
outputs.

The imperfect-CSI experiment draws Rayleigh fading, applies the optimal
power-control policy on the true magnitudes and injects per-node phase
errors. Its aggregated signal is real-valued, so the per-user SNR references
the in-phase noise component: the complex noise variance is 2 P 10^(-SNR/10).
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import constellation as cst
from . import modem
from .channel import complex_awgn
from .errors import ConstraintError
from .functions import FunctionSpec, decompose, evaluate_function, evaluate_function_batch
from .metrics import compute_metrics
from .modem import SchemeConfig
from .power_control import solve_optimal_policy
from .quantizer import UniformQuantizer
from .rng import substream

CHUNK = 2048


@dataclass(frozen=True)
class Scenario:
    """One experiment: function, scheme, sweep axis, trial count and seed."""

    function: FunctionSpec
    scheme: SchemeConfig
    snr_db: tuple
    trials: int
    seed: int
    input_kind: str = "uniform"  # "uniform" over the range or "levels" endpoints
    channel: str = "awgn"
    epsilon: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not self.snr_db:
            raise ValueError("empty SNR sweep")
        if self.input_kind not in ("uniform", "levels"):
            raise ValueError("input_kind must be 'uniform' or 'levels'")
        if self.channel != "awgn":
            raise ValueError("run_sweep models the equalized MAC ('awgn') only")

    def to_json(self) -> str:
        return json.dumps(
            {
                "function": json.loads(self.function.to_json()),
                "scheme": json.loads(self.scheme.to_json()),
                "snr_db": list(self.snr_db),
                "trials": self.trials,
                "seed": self.seed,
                "input_kind": self.input_kind,
                "channel": self.channel,
                "epsilon": self.epsilon,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        obj = json.loads(text)
        return cls(
            function=FunctionSpec.from_json(json.dumps(obj["function"])),
            scheme=SchemeConfig.from_json(json.dumps(obj["scheme"])),
            snr_db=tuple(obj["snr_db"]),
            trials=int(obj["trials"]),
            seed=int(obj["seed"]),
            input_kind=obj.get("input_kind", "uniform"),
            channel=obj.get("channel", "awgn"),
            epsilon=obj.get("epsilon"),
        )

    def hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SweepResult:
    """Per-axis-point metric reports plus reproducibility metadata.

    ``errors`` holds the per-trial squared errors per axis point when the
    runner was asked to keep them (paired statistical tests need them).
    """

    axis_name: str
    axis_values: tuple
    reports: tuple
    metadata: dict = field(default_factory=dict)
    errors: tuple | None = None

    def to_rows(self) -> list[dict]:
        rows = []
        for x, rep in zip(self.axis_values, self.reports):
            rows.append(
                {
                    self.axis_name: x,
                    "mse": rep.mse,
                    "nmse": rep.nmse,
                    "outage": "" if rep.outage_rate is None else rep.outage_rate,
                    "cer": "" if rep.cer is None else rep.cer,
                    "ci": rep.confidence_halfwidth,
                    "trials": rep.trial_count,
                }
            )
        return rows


# ---------------------------------------------------------------------------
# scheme transceivers (vectorized over trials)
# ---------------------------------------------------------------------------


class _Transceiver:
    """Unit-gain superposed transmit path and the matching estimator.

    ``superposed`` returns the noiseless channel-side sum, shape (B, L), for a
    batch of reading matrices (B, K); ``estimate`` inverts the receiver
    chain. ``scale`` normalizes average transmit energy per node per
    computation to one.
    """

    needs_phase_stream = False

    def __init__(self, spec: FunctionSpec, config: SchemeConfig):
        self.spec = spec
        self.config = config
        self.K = spec.num_nodes
        self.scale = 1.0

    def calibrate(self, sample_readings: np.ndarray) -> None:
        energy = self._mean_energy(sample_readings)
        self.scale = 1.0 / np.sqrt(energy) if energy > 0 else 1.0

    def _mean_energy(self, readings: np.ndarray) -> float:
        raise NotImplementedError

    def superposed(self, readings: np.ndarray, rng=None) -> np.ndarray:
        raise NotImplementedError

    def estimate(self, y: np.ndarray, sigma2: float = 0.0) -> np.ndarray:
        raise NotImplementedError


def _grid_quantizer(spec: FunctionSpec, levels: int, log_domain: bool) -> UniformQuantizer:
    lo, hi = spec.input_range
    if log_domain:
        if lo <= 0:
            raise ConstraintError("log-domain grid requires a positive input range")
        return UniformQuantizer(levels, (float(np.log(lo)), float(np.log(hi))))
    return UniformQuantizer(levels, (float(lo), float(hi)))


class _LevelSumTransceiver(_Transceiver):
    """Base for schemes transporting the sum of quantizer levels.

    sum / arithmetic_mean use the linear level grid; product / geometric_mean
    ride the log grid and exponentiate at the receiver.
    """

    def __init__(self, spec, config, levels):
        super().__init__(spec, config)
        if spec.kind not in ("sum", "arithmetic_mean", "product", "geometric_mean"):
            raise ConstraintError(f"{config.scheme} cannot compute {spec.kind}")
        self.log_domain = spec.kind in ("product", "geometric_mean")
        self.quantizer = _grid_quantizer(spec, levels, self.log_domain)

    def levels_of(self, readings: np.ndarray) -> np.ndarray:
        x = np.log(readings) if self.log_domain else readings
        return self.quantizer.quantize(x)

    def value_from_level_sum(self, level_sum: np.ndarray) -> np.ndarray:
        lo, _ = self.quantizer.range
        total = self.K * lo + self.quantizer.step * np.asarray(level_sum, dtype=float)
        kind = self.spec.kind
        if kind == "sum":
            return total
        if kind == "arithmetic_mean":
            return total / self.K
        if kind == "product":
            return np.exp(total)
        return np.exp(total / self.K)  # geometric mean


class _AnalogDA(_Transceiver):
    def __init__(self, spec, config):
        super().__init__(spec, config)
        self.decomp = decompose(spec)

    def _mean_energy(self, readings):
        amps = np.asarray(self.decomp.preprocess(readings), dtype=float)
        return float(np.mean(amps**2))

    def superposed(self, readings, rng=None):
        amps = np.asarray(self.decomp.preprocess(readings), dtype=float)
        return self.scale * amps.sum(axis=1)[:, None].astype(complex)

    def estimate(self, y, sigma2=0.0):
        vals = np.real(y[:, 0]) / self.scale
        post = self.decomp.postprocess[0]
        return np.asarray(self.decomp.aggregate([post(vals)]), dtype=float)


class _Bitwise(_LevelSumTransceiver):
    def __init__(self, spec, config):
        base = int(config.params.get("base", 2))
        digits = int(config.params["digits"])
        super().__init__(spec, config, base**digits)
        self.base, self.digits = base, digits

    def _symbols(self, readings):
        lv = self.levels_of(readings)
        return modem.bitwise_modulate(lv.ravel(), self.base, self.digits).reshape(
            lv.shape + (self.digits,)
        )

    def _mean_energy(self, readings):
        a = self._symbols(readings)
        return float(np.mean(np.sum(np.abs(a) ** 2, axis=-1)))

    def superposed(self, readings, rng=None):
        return self.scale * self._symbols(readings).sum(axis=1)

    def estimate(self, y, sigma2=0.0):
        yr = np.real(y) / self.scale
        digit_sums = (self.K * (self.base - 1) - yr) / 2.0
        digit_sums = np.clip(np.rint(digit_sums), 0, self.K * (self.base - 1))
        weights = float(self.base) ** np.arange(self.digits)
        return self.value_from_level_sum(digit_sums @ weights)


class _Tbma(_Transceiver):
    """Type-based access; supports every histogram-computable function."""

    def __init__(self, spec, config):
        super().__init__(spec, config)
        levels = int(config.params["levels"])
        if spec.kind == "majority_vote":
            self.quantizer = UniformQuantizer(levels, (-1.0, 1.0))
            self.log_domain = False
        elif spec.kind in ("product", "geometric_mean"):
            self.quantizer = _grid_quantizer(spec, levels, True)
            self.log_domain = True
        elif spec.kind in ("sum", "arithmetic_mean", "maximum", "minimum"):
            self.quantizer = _grid_quantizer(spec, levels, False)
            self.log_domain = False
        else:
            raise ConstraintError(f"tbma_fsk cannot compute {spec.kind}")

    def _levels(self, readings):
        x = np.log(readings) if self.log_domain else readings
        return self.quantizer.quantize(x)

    def _mean_energy(self, readings):
        return 1.0  # one unit-amplitude tone per node

    def superposed(self, readings, rng=None):
        lv = self._levels(readings)
        B = lv.shape[0]
        counts = np.zeros((B, self.quantizer.levels))
        np.add.at(counts, (np.repeat(np.arange(B), self.K), lv.ravel()), 1.0)
        return self.scale * counts.astype(complex)

    def estimate(self, y, sigma2=0.0):
        counts = np.real(y) / self.scale
        vals = self.quantizer.grid()
        kind = self.spec.kind
        if kind in ("sum", "arithmetic_mean", "majority_vote"):
            tot = counts @ vals
            if kind == "sum":
                return tot
            if kind == "arithmetic_mean":
                return tot / self.K
            return np.sign(tot)
        if kind in ("product", "geometric_mean"):
            tot = counts @ vals  # grid values are logs already
            return np.exp(tot) if kind == "product" else np.exp(tot / self.K)
        thr = modem.tbma_threshold(self.K, self.quantizer.levels)
        out = np.empty(counts.shape[0])
        for n, row in enumerate(counts):
            detected = np.flatnonzero(row >= thr)
            if detected.size == 0:
                out[n] = np.nan
                continue
            idx = detected[-1] if kind == "maximum" else detected[0]
            out[n] = np.exp(vals[idx]) if self.log_domain else vals[idx]
        return out


class _SumComp(_LevelSumTransceiver):
    def __init__(self, spec, config):
        M = int(config.params["levels"])
        super().__init__(spec, config, M)
        self.M = M
        self.q = int(config.params.get("q", int(np.ceil(np.sqrt(M)))))
        if self.q * self.q < M:
            raise ValueError("need q^2 >= M for the QAM lattice")

    def _mean_energy(self, readings):
        a = cst.sumcomp_map(self.levels_of(readings).ravel(), self.M, self.q)
        return float(np.mean(np.abs(a) ** 2))

    def superposed(self, readings, rng=None):
        lv = self.levels_of(readings)
        a = cst.sumcomp_map(lv.ravel(), self.M, self.q).reshape(lv.shape)
        return self.scale * a.sum(axis=1)[:, None]

    def estimate(self, y, sigma2=0.0):
        level_sum = cst.sumcomp_decode(y[:, 0] / self.scale, self.K, self.M, self.q)
        return self.value_from_level_sum(level_sum)


class _ChannelCompPam(_LevelSumTransceiver):
    """Margin-optimized direct aggregation; polar PAM solution family.

    For enumerable orders the margin optimizer returns constellations in this
    class for the sum; the analytic form scales to the experiment sizes. Its
    power budget keeps the margin optimizer's own semantics, a per-symbol
    peak constraint |a|^2 <= 1, so the constellation's average energy is
    below the other schemes' unit average.
    """

    def __init__(self, spec, config):
        M = int(config.params["levels"])
        super().__init__(spec, config, M)
        self.M = M

    def calibrate(self, sample_readings) -> None:
        self.scale = 1.0 / (self.M - 1)  # peak symbol amplitude = 1

    def _pam(self, lv):
        return (2.0 * lv - (self.M - 1)).astype(complex)

    def _mean_energy(self, readings):
        return float(np.mean(np.abs(self._pam(self.levels_of(readings))) ** 2))

    def superposed(self, readings, rng=None):
        return self.scale * self._pam(self.levels_of(readings)).sum(axis=1)[:, None]

    def estimate(self, y, sigma2=0.0):
        raw = (np.real(y[:, 0]) / self.scale + self.K * (self.M - 1)) / 2.0
        level_sum = np.clip(np.rint(raw), 0, self.K * (self.M - 1))
        return self.value_from_level_sum(level_sum)


class _Goldenbaum(_Transceiver):
    """Non-coherent sequence-energy aggregation (sum / arithmetic mean)."""

    needs_phase_stream = True

    def __init__(self, spec, config):
        super().__init__(spec, config)
        if spec.kind not in ("sum", "arithmetic_mean"):
            raise ConstraintError("goldenbaum supports sum or arithmetic mean")
        self.seq_len = int(config.params.get("seq_len", 64))
        lo, _ = spec.input_range
        self.offset = -float(lo) if lo < 0 else 0.0

    def _g(self, readings):
        return readings + self.offset

    def _mean_energy(self, readings):
        return self.seq_len * float(np.mean(self._g(readings)))

    def superposed(self, readings, rng=None):
        B, K = readings.shape
        theta = rng.uniform(0.0, 2 * np.pi, (B, K, self.seq_len))
        seq = np.sqrt(self._g(readings))[:, :, None] * np.exp(1j * theta)
        return self.scale * seq.sum(axis=1)

    def estimate(self, y, sigma2=0.0):
        raw = np.sum(np.abs(y) ** 2, axis=1) / self.seq_len
        g_sum = np.maximum(raw - sigma2, 0.0) / self.scale**2
        total = g_sum - self.K * self.offset
        return total if self.spec.kind == "sum" else total / self.K


class _LogFsk(_LevelSumTransceiver):
    def __init__(self, spec, config):
        M = int(config.params["levels"])
        super().__init__(spec, config, M)
        self.alpha = float(config.params.get("alpha", 2.0))
        self.n_samples = int(config.params.get("samples", 0)) or max(
            256, 8 * (2 * self.K * (M - 1) + self.K)
        )

    def _mean_energy(self, readings):
        waves = [modem.logfsk_modulate(v, self.quantizer, self.alpha, self.n_samples)
                 for v in range(self.quantizer.levels)]
        energies = np.array([np.sum(w**2) for w in waves])
        counts = np.bincount(self.levels_of(readings).ravel(),
                             minlength=self.quantizer.levels)
        return float(np.average(energies, weights=np.maximum(counts, 1e-12)))

    def superposed(self, readings, rng=None):
        lv = self.levels_of(readings)
        waves = np.stack(
            [modem.logfsk_modulate(v, self.quantizer, self.alpha, self.n_samples)
             for v in range(self.quantizer.levels)]
        )
        return self.scale * waves[lv].sum(axis=1).astype(complex)

    def estimate(self, y, sigma2=0.0):
        out = np.empty(y.shape[0])
        for b in range(y.shape[0]):
            s = modem.logfsk_demodulate(np.real(y[b]) / self.scale, self.K,
                                        self.quantizer, self.alpha)
            out[b] = self.value_from_level_sum(float(s))
        return out


class _DctHybrid(_Transceiver):
    def __init__(self, spec, config):
        super().__init__(spec, config)
        if self.K != 1:
            raise ConstraintError("dct_hybrid is a single-transmitter scheme")
        M = int(config.params["levels"])
        I = int(config.params.get("coeffs", 3))
        self.M, self.I = M, I
        self.quantizer = _grid_quantizer(spec, M, False)
        grid_f = np.array([evaluate_function(spec, [v]) for v in self.quantizer.grid()])
        self.dct = modem.dct_coefficients(grid_f)
        self.n_samples = int(config.params.get("samples", 0)) or max(
            512, 4 * self.I * (2 * M - 1))

    def _mean_energy(self, readings):
        return float(np.sum(self.dct[1 : 1 + self.I] ** 2))

    def superposed(self, readings, rng=None):
        lv = self.quantizer.quantize(readings[:, 0])
        waves = np.stack(
            [modem.dct_hybrid_modulate(v, self.dct[1 : 1 + self.I], self.M,
                                       self.n_samples)
             for v in range(self.M)]
        )
        return self.scale * waves[lv].astype(complex)

    def estimate(self, y, sigma2=0.0):
        out = np.empty(y.shape[0])
        for b in range(y.shape[0]):
            fh, _ = modem.dct_hybrid_demodulate(np.real(y[b]) / self.scale,
                                                self.I, self.M, self.dct[0])
            out[b] = fh
        return out


_TRANSCEIVERS = {
    "analog_da": _AnalogDA,
    "digital_bitwise": _Bitwise,
    "tbma_fsk": _Tbma,
    "sumcomp": _SumComp,
    "channelcomp": _ChannelCompPam,
    "goldenbaum": _Goldenbaum,
    "log_fsk": _LogFsk,
    "dct_hybrid": _DctHybrid,
}


def build_transceiver(spec: FunctionSpec, config: SchemeConfig,
                      seed: int) -> _Transceiver:
    """Construct and energy-calibrate the scheme adapter for a function."""
    try:
        cls = _TRANSCEIVERS[config.scheme]
    except KeyError:
        raise ConstraintError(f"no simulator support for scheme {config.scheme!r}")
    tx = cls(spec, config)
    lo, hi = spec.input_range
    rng = substream(seed, "calibration")
    tx.calibrate(rng.uniform(lo, hi, (2048, spec.num_nodes)))
    return tx


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------


def _chunk_bounds(n: int, chunk: int = CHUNK):
    return [(i, min(i + chunk, n)) for i in range(0, n, chunk)]


def _draw_readings_1d(spec, input_kind, rng, n):
    lo, hi = spec.input_range
    if input_kind == "levels":
        return np.where(rng.integers(0, 2, n) > 0, hi, lo)
    return rng.uniform(lo, hi, n)


def _run_point(scenario: Scenario, tx: _Transceiver, sigma2: float,
               chunk_id: int, n: int):
    spec = scenario.function
    readings = np.column_stack(
        [
            _draw_readings_1d(spec, scenario.input_kind,
                              substream(scenario.seed, chunk_id, "readings", k), n)
            for k in range(spec.num_nodes)
        ]
    )
    truth = evaluate_function_batch(spec, readings)
    phase_rng = substream(scenario.seed, chunk_id, "scheme") if tx.needs_phase_stream else None
    y = tx.superposed(readings, phase_rng)
    y = y + complex_awgn(substream(scenario.seed, chunk_id, "noise"), sigma2, y.shape)
    return truth, tx.estimate(y, sigma2)


def _parallel_chunks(job, n_chunks: int, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, range(n_chunks)))
    return [job(ci) for ci in range(n_chunks)]


def run_sweep(scenario: Scenario, workers: int = 1,
              keep_errors: bool = False) -> SweepResult:
    """Run the SNR sweep; deterministic output for any worker count."""
    spec = scenario.function
    tx = build_transceiver(spec, scenario.scheme, scenario.seed)
    t0 = time.time()
    bounds = _chunk_bounds(scenario.trials)

    reports = []
    errors = []
    for snr in scenario.snr_db:
        sigma2 = 10.0 ** (-snr / 10.0)  # unit per-node energy by calibration

        def job(ci):
            lo, hi = bounds[ci]
            return _run_point(scenario, tx, sigma2, ci, hi - lo)

        parts = _parallel_chunks(job, len(bounds), workers)
        truth = np.concatenate([p[0] for p in parts])
        est = np.concatenate([p[1] for p in parts])
        reports.append(
            compute_metrics(truth, est, scenario.epsilon, discrete=spec.is_discrete())
        )
        if keep_errors:
            errors.append(np.abs(truth - est) ** 2)
    meta = {
        "scenario": json.loads(scenario.to_json()),
        "scenario_hash": scenario.hash(),
        "seed": scenario.seed,
        "wall_time_s": time.time() - t0,
    }
    return SweepResult("snr_db", scenario.snr_db, tuple(reports), meta,
                       tuple(errors) if keep_errors else None)


def run_scheme_comparison(schemes, function: FunctionSpec, snr_db, trials: int,
                          seed: int, workers: int = 1,
                          keep_errors: bool = False) -> dict:
    """One SweepResult per scheme with shared per-trial substreams."""
    out = {}
    for config in schemes:
        scn = Scenario(function=function, scheme=config, snr_db=tuple(snr_db),
                       trials=trials, seed=seed)
        out[config.scheme] = run_sweep(scn, workers=workers, keep_errors=keep_errors)
    return out


# ---------------------------------------------------------------------------
# imperfect-CSI experiment (Rayleigh fading + optimal policy + phase errors)
# ---------------------------------------------------------------------------


def _csi_chunk_base(K: int, sigma2: float, seed: int, chunk_id: int, n: int):
    """Per-chunk draws and policy solutions shared by all deviation points."""
    sqrt3 = np.sqrt(3.0)
    mags = np.abs(
        np.column_stack(
            [complex_awgn(substream(seed, chunk_id, "channel", k), 1.0, n)
             for k in range(K)]
        )
    )
    s = np.column_stack(
        [substream(seed, chunk_id, "readings", k).uniform(-sqrt3, sqrt3, n)
         for k in range(K)]
    )
    u = np.column_stack(
        [substream(seed, chunk_id, "phase", k).uniform(-1.0, 1.0, n)
         for k in range(K)]
    )
    w = complex_awgn(substream(seed, chunk_id, "noise"), sigma2, n)
    coeff = np.empty((n, K))
    inv_sqrt_eta = np.empty(n)
    budgets = np.ones(K)
    for t in range(n):
        policy = solve_optimal_policy(mags[t], budgets, sigma2)
        coeff[t] = np.sqrt(policy.powers) * mags[t]
        inv_sqrt_eta[t] = 1.0 / np.sqrt(policy.eta)
    return s, u, w, coeff, inv_sqrt_eta


def run_csi_error_experiment(K_list, snr_db_list, deviation_deg_list,
                             trials: int, seed: int, workers: int = 1,
                             keep_errors: bool = False) -> dict:
    """Coherent-sum MSE under per-node phase errors, per (K, SNR, deviation).

    Readings are U[-sqrt(3), sqrt(3)] (unit variance), channels Rayleigh, the
    per-node precoders follow the optimal power policy on the true channel
    magnitudes, and phase errors are uniform within the maximum deviation.
    Substreams share (chunk, node) keys across every sweep axis, so
    comparisons along deviation, SNR or K are paired. Returns
    {(K, snr_db): SweepResult over the deviation axis}.
    """
    devs = [float(d) for d in deviation_deg_list]
    if any(not 0.0 <= d <= 180.0 for d in devs):
        raise ValueError("phase deviations must lie in [0, 180] degrees")
    bounds = _chunk_bounds(trials)
    results = {}
    for K in K_list:
        for snr in snr_db_list:
            sigma2 = 2.0 * 10.0 ** (-snr / 10.0)

            def job(ci):
                lo, hi = bounds[ci]
                return _csi_chunk_base(K, sigma2, seed, ci, hi - lo)

            parts = _parallel_chunks(job, len(bounds), workers)
            s = np.concatenate([p[0] for p in parts])
            u = np.concatenate([p[1] for p in parts])
            w = np.concatenate([p[2] for p in parts])
            coeff = np.concatenate([p[3] for p in parts])
            inv_sqrt_eta = np.concatenate([p[4] for p in parts])
            truth = s.sum(axis=1)

            reports = []
            errors = []
            for dev in devs:
                rot = np.exp(1j * np.deg2rad(dev) * u)
                est = (np.sum(coeff * rot * s, axis=1) + w) * inv_sqrt_eta
                reports.append(compute_metrics(truth, est))
                if keep_errors:
                    errors.append(np.abs(truth - est) ** 2)
            results[(K, snr)] = SweepResult(
                "deviation_deg", tuple(devs), tuple(reports),
                {"K": K, "snr_db": snr, "seed": seed, "trials": trials},
                tuple(errors) if keep_errors else None,
            )
    return results
