"""Target functions and their nomographic decompositions.

A multivariate symmetric function f(s_1..s_K) is represented by a
:class:`FunctionSpec`. For the supported kinds, :func:`decompose` returns the
classical (preprocess, postprocess) pair with a single radio resource: each
node applies ``preprocess`` to its reading, the channel sums, and the receiver
applies ``postprocess``. Approximate kinds (geometric mean, maximum, minimum)
carry a precision parameter ``p0``; their worst-case error is measured on a
random grid at construction and stored in the decomposition metadata, since
no closed-form p0 -> error map exists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

EXACT_KINDS = ("arithmetic_mean", "sum", "majority_vote", "p_norm", "product")
APPROX_KINDS = ("geometric_mean", "maximum", "minimum")
KINDS = EXACT_KINDS + APPROX_KINDS + ("custom",)


@dataclass(frozen=True)
class Reading:
    """One node's scalar readout."""

    value: float
    node_id: int


@dataclass(frozen=True)
class FunctionSpec:
    """The function to compute, its input interval and network size.

    ``params`` holds kind-specific parameters: ``p`` for p_norm, ``p0`` for
    the approximate kinds, and ``fn`` / ``decomposition`` for custom kinds.
    """

    kind: str
    input_range: tuple[float, float]
    num_nodes: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}")
        lo, hi = self.input_range
        if not lo <= hi:
            raise ValueError("input_range must satisfy lo <= hi")
        if self.num_nodes < 1:
            raise ValueError("num_nodes must be >= 1")
        if self.kind in APPROX_KINDS and self.params.get("p0", 1.0) <= 0:
            raise ValueError("precision parameter p0 must be > 0")
        if self.kind == "p_norm" and self.params.get("p", 1.0) <= 0:
            raise ValueError("p_norm requires p > 0")

    @property
    def output_range(self) -> tuple[float, float]:
        lo, hi = self.input_range
        K = self.num_nodes
        amax = max(abs(lo), abs(hi))
        amin = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
        if self.kind == "arithmetic_mean":
            return (lo, hi)
        if self.kind == "sum":
            return (K * lo, K * hi)
        if self.kind == "majority_vote":
            return (-1.0, 1.0)
        if self.kind == "p_norm":
            p = self.params.get("p", 2.0)
            return (K ** (1.0 / p) * amin, K ** (1.0 / p) * amax)
        if self.kind in ("geometric_mean", "maximum", "minimum"):
            return (lo, hi)
        if self.kind == "product":
            if lo >= 0:
                return (lo**K, hi**K)
            return (-(amax**K), amax**K)
        return tuple(self.params.get("output_range", (lo, hi)))

    def is_discrete(self) -> bool:
        """Whether the output takes finitely many values (CER applies)."""
        return self.kind == "majority_vote"

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "params": {k: v for k, v in self.params.items() if not callable(v)},
                "input_range": list(self.input_range),
                "K": self.num_nodes,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FunctionSpec":
        obj = json.loads(text)
        return cls(
            kind=obj["kind"],
            input_range=tuple(obj["input_range"]),
            num_nodes=int(obj["K"]),
            params=dict(obj.get("params", {})),
        )


@dataclass(frozen=True)
class NomographicDecomposition:
    """Per-node preprocess, per-resource postprocess and the final aggregation.

    ``aggregate`` maps the vector of L postprocessed values to the scalar
    estimate; for the single-resource decompositions it just extracts the
    entry. ``metadata`` records the precision parameter, any affine input
    shift and the measured sup-norm error for approximate kinds.
    """

    preprocess: Callable[[np.ndarray], np.ndarray]
    postprocess: tuple[Callable[[float], float], ...]
    aggregate: Callable[[Sequence[float]], float]
    num_resources: int = 1
    metadata: dict = field(default_factory=dict)

    def compose(self, values: np.ndarray) -> float:
        """Evaluate psi_l(sum_k phi(s_k)) per resource, then aggregate (ideal MAC)."""
        values = np.asarray(values, dtype=float)
        pre = self.preprocess(values)
        pre = np.atleast_2d(pre)  # (L, K)
        sums = pre.sum(axis=1)
        post = [psi(sums[l]) for l, psi in enumerate(self.postprocess)]
        return float(self.aggregate(post))


def _as_values(spec: FunctionSpec, readings) -> np.ndarray:
    vals = np.asarray(
        [r.value if isinstance(r, Reading) else r for r in readings], dtype=float
    )
    if vals.size == 0:
        raise ValueError("empty readings")
    if vals.size != spec.num_nodes:
        raise ValueError(f"expected {spec.num_nodes} readings, got {vals.size}")
    lo, hi = spec.input_range
    if vals.min() < lo - 1e-12 or vals.max() > hi + 1e-12:
        raise ValueError("reading outside the configured input range")
    return vals


def evaluate_function(spec: FunctionSpec, readings) -> float:
    """Direct evaluation of f; the ground-truth oracle for every scheme."""
    s = _as_values(spec, readings)
    kind = spec.kind
    if kind == "arithmetic_mean":
        return float(s.mean())
    if kind == "sum":
        return float(s.sum())
    if kind == "majority_vote":
        return float(np.sign(np.sign(s).sum()))
    if kind == "p_norm":
        p = spec.params.get("p", 2.0)
        return float((np.abs(s) ** p).sum() ** (1.0 / p))
    if kind == "geometric_mean":
        if s.min() < 0:
            raise ValueError("geometric mean requires nonnegative readings")
        return float(np.prod(s) ** (1.0 / s.size))
    if kind == "maximum":
        return float(s.max())
    if kind == "minimum":
        return float(s.min())
    if kind == "product":
        return float(np.prod(s))
    if kind == "custom":
        return float(spec.params["fn"](s))
    raise ValueError(f"unsupported kind {kind!r}")


def evaluate_function_batch(spec: FunctionSpec, readings: np.ndarray) -> np.ndarray:
    """Vectorized evaluate_function over rows of an (N, K) reading matrix."""
    s = np.asarray(readings, dtype=float)
    if s.ndim != 2 or s.shape[1] != spec.num_nodes:
        raise ValueError("readings must be (N, K)")
    kind = spec.kind
    if kind == "arithmetic_mean":
        return s.mean(axis=1)
    if kind == "sum":
        return s.sum(axis=1)
    if kind == "majority_vote":
        return np.sign(np.sign(s).sum(axis=1))
    if kind == "p_norm":
        p = spec.params.get("p", 2.0)
        return (np.abs(s) ** p).sum(axis=1) ** (1.0 / p)
    if kind == "geometric_mean":
        return np.prod(s, axis=1) ** (1.0 / s.shape[1])
    if kind == "maximum":
        return s.max(axis=1)
    if kind == "minimum":
        return s.min(axis=1)
    if kind == "product":
        return np.prod(s, axis=1)
    return np.array([evaluate_function(spec, row) for row in s])


def _identity_aggregate(post):
    return post[0]


def _measure_sup_error(spec: FunctionSpec, decomp: NomographicDecomposition,
                       n_points: int = 10_000, seed: int = 20240) -> float:
    lo, hi = spec.input_range
    rng = np.random.default_rng(seed)
    grid = rng.uniform(lo, hi, size=(n_points, spec.num_nodes))
    worst = 0.0
    for row in grid:
        truth = evaluate_function(spec, row)
        approx = decomp.compose(row)
        worst = max(worst, abs(truth - approx))
    return worst


def decompose(spec: FunctionSpec, measure_error: bool = True) -> NomographicDecomposition:
    """Build the classical single-resource decomposition for ``spec``.

    Maximum/minimum shift the inputs to a positive interval when needed (the
    power pre/postprocessing is only valid there); the shift is undone by the
    aggregation and recorded in the metadata. For approximate kinds the
    sup-norm error over a 10^4-point random grid is measured and stored under
    ``metadata["sup_error"]`` unless ``measure_error`` is False.
    """
    K = spec.num_nodes
    lo, hi = spec.input_range
    kind = spec.kind
    meta: dict = {}

    if kind == "custom":
        decomp = spec.params.get("decomposition")
        if decomp is None:
            raise ValueError("custom function specs must supply a decomposition")
        return decomp

    if kind == "arithmetic_mean":
        pre = lambda x: x / K
        post = (lambda y: y,)
    elif kind == "sum":
        pre = lambda x: np.asarray(x, dtype=float)
        post = (lambda y: y,)
    elif kind == "majority_vote":
        pre = np.sign
        post = (np.sign,)
    elif kind == "p_norm":
        p = float(spec.params.get("p", 2.0))
        pre = lambda x: np.abs(x) ** p
        post = (lambda y: y ** (1.0 / p),)
        meta["p"] = p
    elif kind == "product":
        if lo <= 0:
            raise ValueError("product decomposition requires a positive input range")
        pre = np.log
        post = (np.exp,)
    elif kind == "geometric_mean":
        if lo < 0:
            raise ValueError("geometric mean requires a nonnegative input range")
        p0 = float(spec.params.get("p0", 100.0))
        pre = lambda x: np.log(np.asarray(x, dtype=float) + 1.0 / p0)
        post = (lambda y: np.exp(np.asarray(y) / K),)
        meta["p0"] = p0
    elif kind in ("maximum", "minimum"):
        p0 = float(spec.params.get("p0", 30.0))
        # power pre/postprocessing needs inputs >= 1 to be well conditioned
        shift = 0.0 if lo >= 1.0 else 1.0 - lo
        sign = 1.0 if kind == "maximum" else -1.0
        pre = lambda x: (np.asarray(x, dtype=float) + shift) ** (sign * p0)
        # noise can push the superposed value nonpositive; floor before the root
        post = (lambda y: np.maximum(np.asarray(y), 1e-300) ** (sign / p0),)
        meta.update(p0=p0, shift=shift)
        agg = lambda vals, _s=shift: vals[0] - _s
        decomp = NomographicDecomposition(pre, post, agg, 1, meta)
        if measure_error:
            meta["sup_error"] = _measure_sup_error(spec, decomp)
        return decomp
    else:
        raise ValueError(f"unsupported kind {kind!r}")

    decomp = NomographicDecomposition(pre, post, _identity_aggregate, 1, meta)
    if measure_error and kind in APPROX_KINDS:
        meta["sup_error"] = _measure_sup_error(spec, decomp)
    return decomp
