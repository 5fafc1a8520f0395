"""Synthetic stream families for experiments and acceptance runs, plus the
JSON sidecar that carries oracle ground truth next to every generated file."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .stream import ExactStats, StreamView, write_binary
from .verify import promise_matrix

KINDS = (
    "planted-heavy",
    "zipf",
    "uniform-distinct",
    "all-equal",
    "promise-case1",
    "promise-case2",
    "adversarial-placement",
)
PLACEMENTS = ("uniform-rows", "bursty-prefix", "random")

SIDECAR_MOMENT_ORDERS = tuple(range(2, 9))


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    m: int
    heavy_frequency: int = 0
    placement: str = "uniform-rows"
    zipf_s: float = 1.5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown stream kind {self.kind!r}")
        if self.placement not in PLACEMENTS:
            raise ValueError(f"unknown placement {self.placement!r}")
        if self.n < 1 or self.m < 0:
            raise ValueError("need n >= 1 and m >= 0")
        if self.heavy_frequency > self.m:
            raise ValueError("heavy frequency cannot exceed the stream length")


def _background(n: int, count: int, rng: np.random.Generator,
                exclude: int = 1) -> np.ndarray:
    """Filler items cycling over [1, n] minus the excluded id, frequencies as
    even as possible."""
    pool = np.array([i for i in range(1, n + 1) if i != exclude], dtype=np.uint32)
    if pool.size == 0:
        raise ValueError("universe too small for background traffic")
    reps = -(-count // pool.size)
    out = np.tile(pool, reps)[:count]
    rng.shuffle(out)
    return out


def _place_heavy(background: np.ndarray, heavy: int, f: int, placement: str,
                 rng: np.random.Generator) -> np.ndarray:
    m = background.size + f
    items = np.empty(m, dtype=np.uint32)
    if placement == "uniform-rows":
        # evenly spaced positions, one per stride
        pos = np.floor(np.arange(f) * m / f).astype(np.int64)
    elif placement == "bursty-prefix":
        pos = np.arange(f, dtype=np.int64)
    else:
        pos = np.sort(rng.choice(m, size=f, replace=False)).astype(np.int64)
    mask = np.zeros(m, dtype=bool)
    mask[pos] = True
    items[mask] = heavy
    items[~mask] = background
    return items


def generate_stream(spec: GeneratorSpec) -> StreamView:
    rng = np.random.default_rng(spec.seed)
    kind = spec.kind
    if kind == "all-equal":
        items = np.full(spec.m, 1, dtype=np.uint32)
    elif kind == "uniform-distinct":
        if spec.m > spec.n:
            raise ValueError("distinct stream needs m <= n")
        items = (rng.permutation(spec.n)[: spec.m] + 1).astype(np.uint32)
    elif kind == "zipf":
        ranks = np.arange(1, spec.n + 1, dtype=float)
        weights = ranks ** (-spec.zipf_s)
        weights /= weights.sum()
        items = (rng.choice(spec.n, size=spec.m, p=weights) + 1).astype(np.uint32)
    elif kind in ("planted-heavy", "adversarial-placement"):
        f = spec.heavy_frequency
        if f < 1:
            raise ValueError(f"{kind} needs a positive heavy frequency")
        placement = "bursty-prefix" if kind == "adversarial-placement" else spec.placement
        background = _background(spec.n, spec.m - f, rng)
        items = _place_heavy(background, 1, f, placement, rng)
    elif kind in ("promise-case1", "promise-case2"):
        case = 1 if kind == "promise-case1" else 2
        items, _, _ = promise_matrix(spec.n, k=3, case=case, seed=spec.seed)
    else:  # pragma: no cover - guarded by GeneratorSpec
        raise AssertionError(kind)
    return StreamView(items=items, n=spec.n)


def sidecar(view: StreamView, spec: GeneratorSpec | None = None) -> dict:
    """Oracle ground truth for a stream: frequencies, moments up to order 8,
    and the 100x heavy flag per order."""
    stats = ExactStats.from_view(view)
    heaviest = stats.heaviest()
    doc = {
        "schema": 1,
        "n": view.n,
        "m": view.m,
        "frequencies": {str(i): c for i, c in sorted(stats.freqs.items())},
        "moments": {str(k): stats.moment(k) for k in SIDECAR_MOMENT_ORDERS},
        "heaviest": heaviest,
        "heavy_element": {
            str(k): (heaviest if stats.is_heavy(heaviest, k) else None)
            for k in SIDECAR_MOMENT_ORDERS
        },
    }
    if spec is not None:
        doc["generator"] = {
            "kind": spec.kind,
            "n": spec.n,
            "m": spec.m,
            "heavy_frequency": spec.heavy_frequency,
            "placement": spec.placement,
            "zipf_s": spec.zipf_s,
            "seed": spec.seed,
        }
    return doc


def write_with_sidecar(spec: GeneratorSpec, stream_path, sidecar_path=None) -> dict:
    view = generate_stream(spec)
    write_binary(stream_path, view)
    doc = sidecar(view, spec)
    if sidecar_path is None:
        sidecar_path = f"{stream_path}.stats.json"
    with open(sidecar_path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return doc


def planted_heavy_frequency(n: int, m: int, k: int,
                            margin: float = 2.0) -> int:
    """Smallest planted frequency that clears the 100x dominance bar for an
    even background, padded by a safety margin."""
    base = max(1, -(-(m) // max(1, n - 1)))
    rest = (n - 1) * base**k
    return min(m, math.ceil((margin * 100.0 * rest) ** (1.0 / k)))
