"""Digital constellation design for direct aggregation.

A constellation assigns each node's M quantized inputs to complex points; the
receiver sees the superposition sum_k a_k and must map every reachable sum to
a function value. Feasibility demands that input tuples with different f never
collide. The optimizer maximizes the margin

    delta = min over pairs with f_i != f_j of |y_i - y_j|^2 / |f_i - f_j|^2

subject to per-node power caps, by projected gradient ascent on a softmin
surrogate with random restarts plus perturbation polishing. The SumComp
mapping skips optimization: base-q digits ride the in-phase/quadrature PAM
grids so superpositions form an integer lattice decoded by rounding.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintError

MAX_TUPLES = 10**6


@dataclass(frozen=True)
class Constellation:
    """Per-node symbol lists, power budgets, and the function table.

    ``function_table`` maps the flattened input-tuple index (C order,
    numpy.ravel_multi_index over the K level axes) to the function value.
    """

    per_node_symbols: list
    power_budgets: np.ndarray
    function_table: np.ndarray

    def __post_init__(self):
        syms = [np.asarray(a, dtype=complex) for a in self.per_node_symbols]
        object.__setattr__(self, "per_node_symbols", syms)
        object.__setattr__(self, "power_budgets",
                           np.asarray(self.power_budgets, dtype=float))
        object.__setattr__(self, "function_table",
                           np.asarray(self.function_table, dtype=float))
        K = len(syms)
        if self.power_budgets.shape != (K,):
            raise ValueError("one power budget per node required")
        sizes = [a.size for a in syms]
        if int(np.prod(sizes)) != self.function_table.size:
            raise ValueError("function table size must be prod(M_k)")
        for k, a in enumerate(syms):
            if np.any(np.abs(a) ** 2 > self.power_budgets[k] + 1e-9):
                raise ValueError(f"node {k} exceeds its power budget")

    @property
    def num_nodes(self) -> int:
        return len(self.per_node_symbols)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.per_node_symbols)

    def superpositions(self) -> np.ndarray:
        """All reachable sums, flattened in C order over the level axes."""
        total = np.zeros(1, dtype=complex)
        for a in self.per_node_symbols:
            total = (total[:, None] + a[None, :]).ravel()
        return total

    def collision_tolerance(self) -> float:
        return 1e-6 * np.sqrt(float(self.power_budgets.max()))

    def to_json(self) -> str:
        return json.dumps(
            {
                "per_node_symbols": [
                    [[v.real, v.imag] for v in a] for a in self.per_node_symbols
                ],
                "power_budgets": self.power_budgets.tolist(),
                "function_table": self.function_table.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Constellation":
        obj = json.loads(text)
        syms = [np.array([complex(re, im) for re, im in a])
                for a in obj["per_node_symbols"]]
        return cls(syms, np.asarray(obj["power_budgets"]), np.asarray(obj["function_table"]))

    def write_csv(self, path) -> None:
        """Dump constellation points as (node, level, re, im) rows for plotting."""
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node", "level", "re", "im"])
            for k, a in enumerate(self.per_node_symbols):
                for i, v in enumerate(a):
                    writer.writerow([k, i, v.real, v.imag])


def build_function_table(fn, level_values, K: int) -> np.ndarray:
    """Tabulate a symmetric function over all K-tuples of level values."""
    vals = np.asarray(level_values, dtype=float)
    table = np.empty(vals.size**K)
    for flat, combo in enumerate(itertools.product(range(vals.size), repeat=K)):
        table[flat] = fn(vals[np.array(combo)])
    return table


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    violations: list = field(default_factory=list)

    def colliding_f_pairs(self) -> list[tuple[float, float]]:
        """Distinct (f_i, f_j) pairs, lower value first, that collide."""
        pairs = {tuple(sorted((v["f_i"], v["f_j"]))) for v in self.violations}
        return sorted(pairs)


def _cluster_points(points: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group complex points whose chained pairwise distance is within tol."""
    n = points.size
    order = np.argsort(points.real, kind="stable")
    parent = np.arange(n)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    re_sorted = points.real[order]
    for pos in range(n):
        i = order[pos]
        nxt = pos + 1
        while nxt < n and re_sorted[nxt] - re_sorted[pos] <= tol:
            j = order[nxt]
            nxt += 1
            ri, rj = find(i), find(j)
            if ri == rj:
                continue
            if abs(points[i] - points[j]) <= tol:
                parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.asarray(v) for v in groups.values()]


def check_feasibility(constellation: Constellation) -> FeasibilityResult:
    """Enumerate all input tuples and report sums shared by different f.

    Two sums count as equal within 1e-6 sqrt(max budget). Violations carry a
    witness tuple pair per colliding (f_i, f_j, sum point).
    """
    n = constellation.function_table.size
    if n > MAX_TUPLES:
        raise ValueError("constellation too large to enumerate")
    sums = constellation.superpositions()
    f = constellation.function_table
    tol = constellation.collision_tolerance()

    violations = []
    for members in _cluster_points(sums, tol):
        if members.size < 2:
            continue
        seen: dict[float, int] = {}
        for m in members:
            seen.setdefault(round(f[m], 12), int(m))
        if len(seen) > 1:
            reps = sorted(seen.items())
            for (fa, ia), (fb, ib) in itertools.combinations(reps, 2):
                violations.append(
                    {
                        "f_i": fa,
                        "f_j": fb,
                        "tuple_i": ia,
                        "tuple_j": ib,
                        "sum": complex(sums[ia]),
                    }
                )
    return FeasibilityResult(len(violations) == 0, violations)


# ---------------------------------------------------------------------------
# margin optimization
# ---------------------------------------------------------------------------

def _pair_structure(orders, tied: bool):
    """Index arrays mapping flat tuples to per-node levels."""
    grids = np.meshgrid(*[np.arange(m) for m in orders], indexing="ij")
    idx = np.stack([g.ravel() for g in grids])  # (K, n_tuples)
    return idx


def _margin_and_grad(points: np.ndarray, idx: np.ndarray, pair_i, pair_j,
                     weights, beta: float):
    """Softmin margin and its Wirtinger gradient wrt the point array.

    ``points`` is (K, M) (rows repeat for tied constellations). Returns the
    exact min ratio as well for bookkeeping.
    """
    K, M = points.shape
    y = points[np.arange(K)[:, None], idx].sum(axis=0)
    z = y[pair_i] - y[pair_j]
    ratios = np.abs(z) ** 2 / weights
    exact = float(ratios.min())
    shifted = -(ratios - ratios.min()) * beta
    p = np.exp(shifted)
    p /= p.sum()
    coeff = p * 2.0 / weights  # d ratio / d conj(z) = z / w
    grad = np.zeros_like(points)
    for k in range(K):
        gi = np.bincount(idx[k][pair_i], weights=(coeff * z).real, minlength=M) \
            + 1j * np.bincount(idx[k][pair_i], weights=(coeff * z).imag, minlength=M)
        gj = np.bincount(idx[k][pair_j], weights=(coeff * z).real, minlength=M) \
            + 1j * np.bincount(idx[k][pair_j], weights=(coeff * z).imag, minlength=M)
        grad[k] = gi - gj
    return exact, grad


def _project_power(points: np.ndarray, budgets: np.ndarray) -> np.ndarray:
    mags = np.abs(points)
    caps = np.sqrt(budgets)[:, None]
    scale = np.where(mags > caps, caps / np.maximum(mags, 1e-300), 1.0)
    return points * scale


def exact_margin(constellation: Constellation) -> float:
    """min |y_i - y_j|^2 / |f_i - f_j|^2 over pairs with differing f."""
    sums = constellation.superpositions()
    f = constellation.function_table
    i, j = np.triu_indices(f.size, k=1)
    mask = f[i] != f[j]
    if not np.any(mask):
        return float("inf")
    num = np.abs(sums[i[mask]] - sums[j[mask]]) ** 2
    den = np.abs(f[i[mask]] - f[j[mask]]) ** 2
    return float((num / den).min())


def optimize_channelcomp(function_table, M: int, K: int, budgets,
                         restarts: int = 32, seed: int = 0,
                         tied: bool | None = None,
                         iters: int = 300) -> tuple[Constellation, float]:
    """Maximize the pairwise margin delta by projected ascent with restarts.

    A symmetric function table gets a tied constellation (identical points at
    every node) unless ``tied`` is given. Each restart runs gradient ascent on
    a softmin surrogate with annealed sharpness, then a perturbation polish;
    the best exact margin wins. Returns (constellation, delta); a constant
    table is flagged with delta = inf. Raises ConstraintError when no restart
    produces a positive margin.
    """
    f = np.asarray(function_table, dtype=float)
    if f.size != M**K:
        raise ValueError("function table must have M^K entries")
    if M**K > 10**4:
        raise ValueError("dense pairwise optimization limited to M^K <= 10^4")
    budgets = np.broadcast_to(np.asarray(budgets, dtype=float), (K,)).copy()
    orders = (M,) * K
    idx = _pair_structure(orders, True)
    i, j = np.triu_indices(f.size, k=1)
    mask = f[i] != f[j]
    pair_i, pair_j = i[mask], j[mask]
    weights = np.abs(f[pair_i] - f[pair_j]) ** 2

    if tied is None:
        tied = _table_is_symmetric(f, orders)

    def make(points):
        rows = [points[0].copy() for _ in range(K)] if tied else [p.copy() for p in points]
        return Constellation(rows, budgets, f)

    if pair_i.size == 0:
        rng = np.random.default_rng(seed)
        pts = _project_power(
            (rng.standard_normal((1 if tied else K, M))
             + 1j * rng.standard_normal((1 if tied else K, M))), budgets[:1] if tied else budgets)
        return make(pts), float("inf")

    n_rows = 1 if tied else K
    best_delta, best_points = -np.inf, None
    for r in range(restarts):
        rng = np.random.default_rng((seed, r))
        pts = rng.standard_normal((n_rows, M)) + 1j * rng.standard_normal((n_rows, M))
        pts = _project_power(pts, budgets[:n_rows])
        delta, pts = _ascend(pts, idx, pair_i, pair_j, weights, budgets, tied, K, iters)
        # perturbation polish: jitter the best candidate and re-ascend
        for _ in range(2):
            trial = pts + 0.05 * (rng.standard_normal(pts.shape)
                                  + 1j * rng.standard_normal(pts.shape))
            trial = _project_power(trial, budgets[:n_rows])
            d2, trial = _ascend(trial, idx, pair_i, pair_j, weights, budgets, tied, K, iters // 2)
            if d2 > delta:
                delta, pts = d2, trial
        if delta > best_delta:
            best_delta, best_points = delta, pts

    if best_delta <= 0:
        raise ConstraintError(
            f"no feasible constellation found after {restarts} restarts")
    full = np.repeat(best_points, K, axis=0) if tied else best_points
    return make(full), float(best_delta)


def _ascend(points, idx, pair_i, pair_j, weights, budgets, tied, K, iters):
    n_rows = points.shape[0]
    pts = points.copy()
    step = 0.1 * float(np.sqrt(budgets.max()))
    for it in range(iters):
        beta = 10.0 * (1.0 + 9.0 * it / max(iters - 1, 1))  # anneal sharpness
        full = np.repeat(pts, K, axis=0) if tied else pts
        exact, grad = _margin_and_grad(full, idx, pair_i, pair_j, weights, beta)
        g = grad.sum(axis=0, keepdims=True) if tied else grad
        norm = np.sqrt(np.sum(np.abs(g) ** 2))
        if norm < 1e-14:
            break
        pts = _project_power(pts + step * g / norm, budgets[:n_rows])
        step *= 0.99
    full = np.repeat(pts, K, axis=0) if tied else pts
    exact, _ = _margin_and_grad(full, idx, pair_i, pair_j, weights, 1.0)
    return exact, pts


def _table_is_symmetric(f: np.ndarray, orders) -> bool:
    if len(set(orders)) != 1:
        return False
    arr = f.reshape(orders)
    perm = list(range(1, len(orders))) + [0]
    return np.allclose(arr, arr.transpose(perm))


# ---------------------------------------------------------------------------
# SumComp lattice mapping
# ---------------------------------------------------------------------------

def sumcomp_map(values, M: int, q: int) -> np.ndarray:
    """Quantized values onto the centered base-q QAM lattice (PAM when M <= q).

    Digit 0 rides the in-phase axis, digit 1 the quadrature axis, both on
    unit-spaced grids centered at (q-1)/2, so superposed symbols form a
    translated integer lattice decodable by rounding.
    """
    v = np.asarray(values, dtype=int)
    if M > q * q:
        raise ValueError("M must satisfy M <= q^2")
    if np.any(v < 0) or np.any(v >= M):
        raise ValueError("values must lie in [0, M)")
    d0 = v % q
    d1 = v // q
    center = (q - 1) / 2.0
    return (d0 - center) + 1j * (d1 - center)


def sumcomp_decode(y, K: int, M: int, q: int) -> np.ndarray:
    """Round the superposed lattice point back to the sum of values."""
    y = np.asarray(y, dtype=complex)
    center = K * (q - 1) / 2.0
    d0 = np.clip(np.rint(y.real + center), 0, K * (q - 1))
    d1 = np.clip(np.rint(y.imag + center), 0, K * (q - 1))
    return np.clip(d0 + q * d1, 0, K * (M - 1))


# ---------------------------------------------------------------------------
# sum-constellation ML demapper
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SumConstellation:
    """Reachable superposition points with their f values and a demapper.

    Coincident points with equal f are merged; decision regions are
    nearest-point (ML under AWGN). Exact midpoint ties break toward the
    smaller f value.
    """

    points: np.ndarray
    values: np.ndarray
    noise_variance: float = 0.0

    def demap(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=complex))
        dist = np.abs(y[:, None] - self.points[None, :])
        best = dist.min(axis=1)
        out = np.empty(y.size)
        for n in range(y.size):
            tied = np.flatnonzero(dist[n] <= best[n] + 1e-12)
            out[n] = self.values[tied].min()
        return out


def build_demapper(constellation: Constellation, K: int,
                   noise_variance: float = 0.0) -> SumConstellation:
    """Enumerate reachable sums, merge constructive overlaps, reject infeasible."""
    if K != constellation.num_nodes:
        raise ValueError("K must match the constellation")
    result = check_feasibility(constellation)
    if not result.feasible:
        raise ConstraintError(
            f"infeasible constellation: {result.colliding_f_pairs()}")
    sums = constellation.superpositions()
    f = constellation.function_table
    tol = constellation.collision_tolerance()
    points, values = [], []
    for members in _cluster_points(sums, tol):
        points.append(sums[members].mean())
        values.append(f[members[0]])
    order = np.lexsort((np.asarray(points).imag, np.asarray(points).real))
    pts = np.asarray(points)[order]
    vals = np.asarray(values)[order]
    return SumConstellation(pts, vals, noise_variance)
