"""Heavy-element finder: pick-and-drop repetitions across the skewness grid,
with a deterministic majority-counter fallback and a doubling schedule for
unknown stream length.  Every emitted count is a true lower bound."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import core
from .core import SENTINEL_ESTIMATE, Estimate
from .params import DEFAULT_REPS_CONSTANT, delta_grid, repetitions
from .stream import SENTINEL, MatrixOverlay, StreamView


class MisraGries:
    """Deterministic majority-style counter set; counts never exceed the true
    frequency, so it is safe to merge with sampler candidates."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.counters: dict[int, int] = {}

    def update(self, item: int) -> None:
        c = self.counters
        if item in c:
            c[item] += 1
        elif len(c) < self.capacity:
            c[item] = 1
        else:
            dead = []
            for key in c:
                c[key] -= 1
                if c[key] == 0:
                    dead.append(key)
            for key in dead:
                del c[key]

    def update_array(self, items: np.ndarray) -> None:
        for v in items:
            self.update(int(v))

    def best(self) -> Estimate:
        if not self.counters:
            return SENTINEL_ESTIMATE
        elem = min(self.counters, key=lambda i: (-self.counters[i], i))
        return Estimate(element=elem, count=self.counters[elem])


@dataclass(frozen=True)
class HeavyHitterConfig:
    n: int
    k: int
    eps: float
    length: int | None = None  # known F_1; None selects doubling mode
    reps_constant: float = DEFAULT_REPS_CONSTANT
    seed: int = 0
    # parameter overrides (applied to every grid instance when set)
    delta_override: int | None = None
    t_override: int | None = None
    lam_override: int | None = None

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError("eps must be in (0, 1)")
        if self.k < 3:
            raise ValueError("k must be >= 3")

    @property
    def mode(self) -> str:
        return "known-length" if self.length is not None else "doubling"


@dataclass
class CandidateSet:
    """Running max per source label; aggregation is a commutative max."""

    best_by_label: dict[str, Estimate] = field(default_factory=dict)

    def offer(self, label: str, estimate: Estimate) -> None:
        cur = self.best_by_label.get(label)
        if cur is None or estimate.better_than(cur):
            self.best_by_label[label] = estimate

    def aggregate(self) -> Estimate:
        return aggregate(list(self.best_by_label.values()))


def aggregate(candidates: list[Estimate]) -> Estimate:
    """Argmax by count with deterministic tie-break by smaller element id."""
    if not candidates:
        raise ValueError("empty candidate set")
    best = candidates[0]
    for cand in candidates[1:]:
        if cand.better_than(best):
            best = cand
    return best


def mg_capacity(eps: float) -> int:
    return math.ceil(40.0 / eps)


@dataclass(frozen=True)
class GridInstance:
    delta: int
    t: int
    lam: int
    T: int


def plan_grid(cfg: HeavyHitterConfig, F1: int) -> list[GridInstance]:
    """Per-delta matrix shapes and repetition counts for a length guess."""
    plans = []
    for delta in delta_grid(cfg.n, cfg.k):
        if cfg.delta_override is not None and delta != cfg.delta_override:
            continue
        t = cfg.t_override or math.ceil(delta * F1 / cfg.n ** (1.0 / cfg.k))
        if t < 1:
            t = 1
        if t > F1:
            # heavy elements this skewed are caught by the majority counters
            continue
        lam = cfg.lam_override or math.ceil(F1 * delta**3 / cfg.n)
        plans.append(
            GridInstance(delta=delta, t=t, lam=max(1, lam),
                         T=repetitions(cfg.n, cfg.k, cfg.eps, delta,
                                       cfg.reps_constant))
        )
    return plans


def planned_state_count(n: int, k: int, eps: float,
                        reps_constant: float = DEFAULT_REPS_CONSTANT) -> int:
    """Total live pick-and-drop run states for one length guess; depends only
    on (n, k, eps), never on the stream length."""
    return sum(repetitions(n, k, eps, d, reps_constant) for d in delta_grid(n, k))


def _best_of_runs(S: np.ndarray, C: np.ndarray) -> Estimate:
    valid = S != SENTINEL
    if not valid.any():
        return SENTINEL_ESTIMATE
    Sv = S[valid].astype(np.int64)
    Cv = C[valid]
    top = Cv.max()
    elem = int(Sv[Cv == top].min())
    return Estimate(element=elem, count=int(top))


def _run_segment(items: np.ndarray, n: int, plans: list[GridInstance],
                 seed: int, candidates: CandidateSet, label_prefix: str) -> None:
    if items.size == 0 or not plans:
        return
    view = StreamView(items=items, n=n)

    def one(idx_plan):
        idx, plan = idx_plan
        ov = MatrixOverlay.from_view(view, plan.t)
        group_seed = core._impl.derive_seed(seed ^ 0x5DEECE66D, idx)
        S, C = core.run_many(ov, plan.lam, plan.T, group_seed)
        return plan, _best_of_runs(S, C)

    workers = int(os.environ.get("PICKDROP_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, enumerate(plans)))
    else:
        results = [one(p) for p in enumerate(plans)]
    for plan, best in results:
        candidates.offer(f"{label_prefix}/delta={plan.delta}", best)


@dataclass
class HeavyResult:
    estimate: Estimate
    mode: str
    length: int
    grid: list[GridInstance]
    candidates: CandidateSet
    state_count: int

    def report(self) -> dict:
        return {
            "element": self.estimate.element,
            "estimate": self.estimate.count,
            "mode": self.mode,
            "length": self.length,
            "params": [
                {"delta": g.delta, "t": g.t, "lambda": g.lam, "repetitions": g.T}
                for g in self.grid
            ],
            "repetitions": sum(g.T for g in self.grid),
            "state_count": self.state_count,
        }


def find_heavy_detailed(items, cfg: HeavyHitterConfig) -> HeavyResult:
    """One pass over the source.  Known-length mode runs the full grid on the
    whole stream; doubling mode restarts grid instances each time the observed
    length doubles and aggregates every generation by max count."""
    mg = MisraGries(mg_capacity(cfg.eps))
    candidates = CandidateSet()
    grid_used: list[GridInstance] = []

    if cfg.mode == "known-length":
        buffered = []
        m = 0
        for item in items:
            v = int(item)
            mg.update(v)
            buffered.append(v)
            m += 1
        arr = np.asarray(buffered, dtype=np.uint32)
        plans = plan_grid(cfg, cfg.length)
        grid_used = plans
        _run_segment(arr, cfg.n, plans, cfg.seed, candidates, "known")
        length = m
    else:
        # generation g covers stream positions (2^(g-1), 2^g] and is sized
        # for the length guess 2^g
        segment: list[int] = []
        m = 0
        generation = 0
        boundary = 1
        for item in items:
            v = int(item)
            mg.update(v)
            segment.append(v)
            m += 1
            if m == boundary:
                arr = np.asarray(segment, dtype=np.uint32)
                plans = plan_grid(cfg, boundary)
                grid_used = plans
                seg_seed = core._impl.derive_seed(cfg.seed, 1000 + generation)
                _run_segment(arr, cfg.n, plans, seg_seed, candidates,
                             f"gen{generation}")
                segment = []
                generation += 1
                boundary *= 2
        if segment:
            arr = np.asarray(segment, dtype=np.uint32)
            plans = plan_grid(cfg, boundary)
            grid_used = plans
            seg_seed = core._impl.derive_seed(cfg.seed, 1000 + generation)
            _run_segment(arr, cfg.n, plans, seg_seed, candidates,
                         f"gen{generation}")
        length = m

    candidates.offer("misra-gries", mg.best())
    if length == 0:
        estimate = SENTINEL_ESTIMATE
    else:
        estimate = candidates.aggregate()
    return HeavyResult(
        estimate=estimate,
        mode=cfg.mode,
        length=length,
        grid=grid_used,
        candidates=candidates,
        state_count=planned_state_count(cfg.n, cfg.k, cfg.eps, cfg.reps_constant),
    )


def find_heavy(items, cfg: HeavyHitterConfig) -> Estimate:
    return find_heavy_detailed(items, cfg).estimate


def find_heavy_doubling(items, cfg: HeavyHitterConfig) -> Estimate:
    if cfg.length is not None:
        raise ValueError("doubling mode must not fix the stream length")
    return find_heavy(items, cfg)
