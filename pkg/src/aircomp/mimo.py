"""MIMO aggregation beamforming for vector-valued superposition.

The receiver estimates sum_k s_k from y = sum_k H_k B_k s_k + n with a
receive combiner A = sqrt(eta) F (F tall orthonormal). Zero-forcing transmit
beamforming conditioned on A is optimal,

    B_k = (A^H H_k)^H (A^H H_k H_k^H A)^{-1},

and the close-to-optimal F maximizes sum_k w_k tr(U_k^H F F^H U_k), i.e. the
top-Q eigenvectors of G = sum_k w_k U_k U_k^H, where U_k spans the Q strongest
left singular directions of H_k and w_k is the Q-th largest squared singular
value (the tightened power constraint weight). The denoising factor is
eta = max_k tr((F^H H_k H_k^H F)^{-1}) / P0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import complex_awgn
from .errors import NumericalError


@dataclass(frozen=True)
class MimoScenario:
    """K node channels (N_r x N_t each), stream count Q, power cap and noise."""

    channels: list
    streams: int
    power_cap: float
    noise_variance: float = 0.0

    def __post_init__(self):
        mats = [np.asarray(H, dtype=complex) for H in self.channels]
        object.__setattr__(self, "channels", mats)
        if not mats:
            raise ValueError("need at least one channel")
        n_r, n_t = mats[0].shape
        if any(H.shape != (n_r, n_t) for H in mats):
            raise ValueError("all channels must share the same shape")
        if not 1 <= self.streams <= min(n_r, n_t):
            raise ValueError("streams must satisfy 1 <= Q <= min(N_t, N_r)")
        if self.power_cap <= 0:
            raise ValueError("power cap must be positive")
        for k, H in enumerate(mats):
            if np.linalg.matrix_rank(H) < self.streams:
                raise ValueError(f"channel {k} has rank below the stream count")

    @property
    def num_nodes(self) -> int:
        return len(self.channels)

    @property
    def n_rx(self) -> int:
        return self.channels[0].shape[0]

    @property
    def n_tx(self) -> int:
        return self.channels[0].shape[1]

    def to_json(self) -> str:
        return json.dumps(
            {
                "channels": [
                    [[[float(v.real), float(v.imag)] for v in row] for row in H]
                    for H in self.channels
                ],
                "streams": self.streams,
                "power_cap": self.power_cap,
                "noise_variance": self.noise_variance,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "MimoScenario":
        obj = json.loads(text)
        mats = [
            np.array([[complex(re, im) for re, im in row] for row in H])
            for H in obj["channels"]
        ]
        return cls(mats, int(obj["streams"]), float(obj["power_cap"]),
                   float(obj.get("noise_variance", 0.0)))


def _mat_to_pairs(M: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(M)]


@dataclass(frozen=True)
class BeamformerSet:
    """Receive combiner F (orthonormal columns), denoising eta, per-node B_k."""

    receive: np.ndarray
    eta: float
    transmit: list

    @property
    def combiner(self) -> np.ndarray:
        """A = sqrt(eta) F."""
        return np.sqrt(self.eta) * self.receive

    def to_json(self) -> str:
        return json.dumps(
            {
                "receive": _mat_to_pairs(self.receive),
                "eta": self.eta,
                "transmit": [_mat_to_pairs(B) for B in self.transmit],
            }
        )


def _fix_column_phases(F: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column real-positive."""
    out = F.copy()
    for j in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, j])))
        pivot = out[idx, j]
        if abs(pivot) > 0:
            out[:, j] *= np.conj(pivot) / abs(pivot)
    return out


def subspace_objective(scenario: MimoScenario, F: np.ndarray) -> float:
    """sum_k w_k tr(U_k^H F F^H U_k), the weighted subspace-alignment score."""
    total = 0.0
    Q = scenario.streams
    for H in scenario.channels:
        U, sing, _ = np.linalg.svd(H, full_matrices=False)
        w = sing[Q - 1] ** 2
        proj = U[:, :Q].conj().T @ F
        total += w * float(np.sum(np.abs(proj) ** 2))
    return total


def _eta_of(F: np.ndarray, channels, P0: float) -> float:
    eta = 0.0
    for H in channels:
        M = F.conj().T @ H @ H.conj().T @ F
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1e12:
            return np.inf
        eta = max(eta, float(np.trace(np.linalg.inv(M)).real) / P0)
    return eta


def _refine_tied_block(F: np.ndarray, basis: np.ndarray, n_fixed: int,
                       channels, P0: float) -> np.ndarray:
    """Re-pick the tied-eigenspace columns to minimize the denoising factor.

    The subspace objective is flat across an eigenvalue tie, so the original
    problem's remaining criterion (smallest eta) breaks the tie. Deterministic
    init: balanced combination of the channels' leading directions, then
    projected descent on the Stiefel factor.
    """
    Q = F.shape[1]
    r = Q - n_fixed
    m = basis.shape[1]
    directions = []
    for H in channels:
        u = np.linalg.svd(H, full_matrices=False)[0][:, 0]
        w = basis.conj().T @ u
        if np.linalg.norm(w) > 1e-12:
            pivot = w[int(np.argmax(np.abs(w)))]
            directions.append(w * np.conj(pivot) / abs(pivot))
    seed = np.sum(directions, axis=0) if directions else np.ones(m)
    W = np.concatenate([seed[:, None], np.eye(m, dtype=complex)[:, : r - 1]], axis=1) \
        if r > 1 else seed[:, None]
    W, _ = np.linalg.qr(W)

    def assemble(Wc):
        return np.concatenate([F[:, :n_fixed], basis @ Wc], axis=1)

    best = assemble(W)
    best_eta = _eta_of(best, channels, P0)
    step = 0.5
    for _ in range(200):
        # smooth-max gradient of eta over the tied coefficients
        Fc = assemble(W)
        grads = np.zeros_like(W)
        etas = []
        for H in channels:
            A = H @ H.conj().T
            M = Fc.conj().T @ A @ Fc
            if np.linalg.cond(M) > 1e12:
                etas.append(np.inf)
                continue
            Minv = np.linalg.inv(M)
            etas.append(float(np.trace(Minv).real) / P0)
            g_full = -(A @ Fc @ Minv @ Minv) / P0
            grads += (basis.conj().T @ g_full[:, n_fixed:]) * etas[-1]
        if not np.all(np.isfinite(etas)):
            # singular point: nudge toward the balanced seed
            W = W + 0.1 * (np.linalg.qr(seed[:, None] @ np.ones((1, r)))[0] - W)
            W, _ = np.linalg.qr(W)
            continue
        weights = np.exp((np.asarray(etas) - max(etas)) * 50.0)
        grads /= weights.sum()
        W_new, _ = np.linalg.qr(W - step * grads)
        eta_new = _eta_of(assemble(W_new), channels, P0)
        if eta_new < best_eta - 1e-15:
            best_eta, best, W = eta_new, assemble(W_new), W_new
        else:
            step *= 0.7
            if step < 1e-6:
                break
    return best


def aggregation_beamformer(scenario: MimoScenario) -> BeamformerSet:
    """Closed-form receive beamformer, denoising factor and ZF transmitters."""
    Q = scenario.streams
    P0 = scenario.power_cap
    G = np.zeros((scenario.n_rx, scenario.n_rx), dtype=complex)
    for H in scenario.channels:
        U, sing, _ = np.linalg.svd(H, full_matrices=False)
        Uq = U[:, :Q]
        G += (sing[Q - 1] ** 2) * (Uq @ Uq.conj().T)

    eigvals, eigvecs = np.linalg.eigh(G)
    lam = eigvals[::-1]
    vecs = eigvecs[:, ::-1]
    F = _fix_column_phases(vecs[:, :Q])

    # an eigenvalue tie across the cut makes the top-Q choice arbitrary; pick
    # the tied-block columns that minimize the denoising factor instead
    tol = 1e-9 * max(abs(lam[0]), 1.0)
    if Q < lam.size and lam[Q - 1] - lam[Q] <= tol:
        tied = np.flatnonzero(np.abs(lam - lam[Q - 1]) <= tol)
        n_fixed = int(tied.min())
        F = _fix_column_phases(
            _refine_tied_block(F, vecs[:, tied], n_fixed, scenario.channels, P0)
        )

    eta = 0.0
    for k, H in enumerate(scenario.channels):
        M = F.conj().T @ H @ H.conj().T @ F
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1e12:
            raise NumericalError(f"singular effective channel for node {k}")
        eta = max(eta, float(np.trace(np.linalg.inv(M)).real) / P0)

    A = np.sqrt(eta) * F
    transmit = []
    for H in scenario.channels:
        M = A.conj().T @ H
        transmit.append(M.conj().T @ np.linalg.inv(M @ M.conj().T))
    return BeamformerSet(F, eta, transmit)


def mimo_mse(scenario: MimoScenario, beamformers: BeamformerSet) -> float:
    """sum_k ||A^H H_k B_k - I||_F^2 + sigma_n^2 tr(A^H A)."""
    A = beamformers.combiner
    Q = scenario.streams
    total = 0.0
    for H, B in zip(scenario.channels, beamformers.transmit):
        R = A.conj().T @ H @ B - np.eye(Q)
        total += float(np.sum(np.abs(R) ** 2))
    total += scenario.noise_variance * float(np.sum(np.abs(A) ** 2))
    return total


def mimo_transmit_receive(readings, scenario: MimoScenario,
                          beamformers: BeamformerSet,
                          rng: np.random.Generator) -> np.ndarray:
    """Simulate y = sum_k H_k B_k s_k + n and return A^H y."""
    s = np.asarray(readings, dtype=complex)
    if s.shape != (scenario.num_nodes, scenario.streams):
        raise ValueError("readings must be (K, Q)")
    y = np.zeros(scenario.n_rx, dtype=complex)
    for k, (H, B) in enumerate(zip(scenario.channels, beamformers.transmit)):
        y += H @ B @ s[k]
    y += complex_awgn(rng, scenario.noise_variance, scenario.n_rx)
    return beamformers.combiner.conj().T @ y
