"""
Design Space Search Engine

Searches a SearchSpaceDef for the accelerator design that minimizes a scalar
hardware objective on one network. Every design dimension gets a logit vector;
designs are drawn with Gumbel-Softmax sampling, costed by the analytical
predictor and the logits are updated with Adam on a relaxed loss in which the
objective of each sampled design multiplies the soft probabilities of the
choices that produced it.

Key Features:
- **Objectives**: EA (energy + area) and TEA (throughput-per-energy with an area term)
- **Area Cap**: hard rejection or quadratic penalty above the space's cap
- **Gumbel-Softmax Search**: seeded, batched, optional temperature anneal, memoized costing
- **Baselines**: exhaustive enumeration (ground truth) and uniform random sampling
- **Density Sweep**: compute density vs throughput-per-energy scatter with Pareto front

Objective values stored in results are normalized by the metrics of the space's
center design, so values from search, baselines and re-costed designs compare
directly. The gradient signal uses running means of the sampled metrics instead.

Usage Example:
    ```python
    from search_engine import Objective, SearchBudget, search, exhaustive_search

    result = search(model, space, tech, Objective(), SearchBudget(steps=200, seed=7))
    oracle = exhaustive_search(model, space, tech, Objective())
    print(result.best_objective, oracle.best_objective)
    ```
"""

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import softmax
from scipy.stats import entropy

from arch_config import (
    DEFAULT_ENUMERATION_LIMIT,
    DIMENSIONS,
    AcceleratorConfig,
    SearchSpaceDef,
    enumerate_configs,
)
from cost_predictor import CostReport, network_cost
from device_lib import TechParams
from model_ir import DnnModel

logger = logging.getLogger(__name__)

SHIPPED_SEARCH_CONFIGS = Path(__file__).parent / "search"
INFEASIBLE = math.inf
SWEEP_COLUMNS = ["sample", "feasible", "compute_density", "throughput_per_energy", "area_mm2", "energy_pj"]
CHUNK = 256


def _is_integer(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_real(value) -> bool:
    return isinstance(value, (int, float, np.number)) and not isinstance(value, bool) and math.isfinite(value)


class ObjectiveMode(Enum):
    EA = "EA"
    TEA = "TEA"


class AreaCapMode(Enum):
    HARD_REJECT = "hard_reject"
    PENALTY = "penalty"


@dataclass(frozen=True)
class Objective:
    """Scalarization of a CostReport; lower is better"""
    mode: ObjectiveMode = ObjectiveMode.TEA
    w_energy: float = 1.0
    w_throughput: float = 1.0
    w_area: float = 0.1
    area_cap_mode: AreaCapMode = AreaCapMode.HARD_REJECT
    penalty_lambda: float = 10.0

    def __post_init__(self):
        for name in ("w_energy", "w_throughput", "w_area", "penalty_lambda"):
            value = getattr(self, name)
            if not _is_real(value) or value < 0:
                raise ValueError(f"{name} must be a finite number >= 0, got {value!r}")
        active = (self.w_energy, self.w_area) if self.mode == ObjectiveMode.EA else (self.w_throughput, self.w_area)
        if not any(weight > 0 for weight in active):
            raise ValueError(f"{self.mode.value} objective needs at least one positive weight")
        if self.area_cap_mode == AreaCapMode.PENALTY and not self.penalty_lambda > 0:
            raise ValueError("penalty mode requires penalty_lambda > 0")


@dataclass(frozen=True)
class MetricScales:
    """Reference magnitudes that make the objective terms dimensionless"""
    energy_pj: float = 1.0
    throughput_per_energy: float = 1.0
    area_mm2: float = 1.0

    @classmethod
    def from_report(cls, report: CostReport) -> "MetricScales":
        return cls(energy_pj=report.energy_pj, throughput_per_energy=report.throughput_per_energy,
                   area_mm2=report.area_mm2)

    @classmethod
    def reference(cls, model: DnnModel, space: SearchSpaceDef, tech: TechParams) -> "MetricScales":
        """Scales taken from the space's center design"""
        return cls.from_report(network_cost(model, space.center_config(), tech))


class RunningScales:
    """Running means of the sampled metrics"""

    def __init__(self, fallback: MetricScales):
        self.fallback = fallback
        self.count = 0
        self.energy_sum = 0.0
        self.tpe_sum = 0.0
        self.area_sum = 0.0

    def add(self, report: CostReport) -> None:
        self.count += 1
        self.energy_sum += report.energy_pj
        self.tpe_sum += report.throughput_per_energy
        self.area_sum += report.area_mm2

    def scales(self) -> MetricScales:
        if self.count == 0:
            return self.fallback
        return MetricScales(self.energy_sum / self.count, self.tpe_sum / self.count, self.area_sum / self.count)


def objective_value(report: CostReport, obj: Objective, scales: Optional[MetricScales] = None,
                    area_cap: Optional[float] = None) -> float:
    """Dimensionless objective of a report.

    Returns INFEASIBLE for a design above area_cap in hard-reject mode.
    """
    scales = scales or MetricScales()
    value = obj.w_area * report.area_mm2 / scales.area_mm2
    if obj.mode == ObjectiveMode.EA:
        value += obj.w_energy * report.energy_pj / scales.energy_pj
    else:
        value -= obj.w_throughput * report.throughput_per_energy / scales.throughput_per_energy

    if area_cap is not None and report.area_mm2 > area_cap:
        if obj.area_cap_mode == AreaCapMode.HARD_REJECT:
            return INFEASIBLE
        value += obj.penalty_lambda * ((report.area_mm2 - area_cap) / area_cap) ** 2
    return value


@dataclass
class CategoricalParams:
    """One logit vector per search dimension, in DIMENSIONS order"""
    space: SearchSpaceDef
    logits: List[np.ndarray]

    def __post_init__(self):
        if len(self.logits) != len(self.space.sizes):
            raise ValueError(f"expected {len(self.space.sizes)} logit vectors, got {len(self.logits)}")
        for dimension, size, logits in zip(DIMENSIONS, self.space.sizes, self.logits):
            if logits.shape != (size,):
                raise ValueError(f"logits for {dimension} must have shape ({size},), got {logits.shape}")
            if not np.all(np.isfinite(logits)):
                raise ValueError(f"logits for {dimension} are not finite")

    @classmethod
    def uniform(cls, space: SearchSpaceDef) -> "CategoricalParams":
        return cls(space=space, logits=[np.zeros(size) for size in space.sizes])

    def probabilities(self) -> List[np.ndarray]:
        return [softmax(logits) for logits in self.logits]

    def entropies(self) -> Dict[str, float]:
        return {dimension: float(entropy(p)) for dimension, p in zip(DIMENSIONS, self.probabilities())}

    def argmax_indices(self) -> Tuple[int, ...]:
        # np.argmax returns the first maximum: ties resolve to the earliest choice
        return tuple(int(np.argmax(logits)) for logits in self.logits)

    def argmax_config(self) -> AcceleratorConfig:
        return self.space.config_from_indices(self.argmax_indices())

    def copy(self) -> "CategoricalParams":
        return CategoricalParams(space=self.space, logits=[logits.copy() for logits in self.logits])


@dataclass(frozen=True, eq=False)
class GumbelDraw:
    """Hard choice indices of one sample plus the noise and soft vectors that produced them"""
    indices: Tuple[int, ...]
    soft: Tuple[np.ndarray, ...]
    noise: Tuple[np.ndarray, ...]
    tau: float


def relaxed_soft(logits: np.ndarray, noise: np.ndarray, tau: float) -> np.ndarray:
    """softmax((logits + noise) / tau)"""
    return softmax((logits + noise) / tau)


def gumbel_sample(params: CategoricalParams, tau: float,
                  rng: np.random.Generator) -> Tuple[AcceleratorConfig, GumbelDraw]:
    """Draw one design: per dimension the argmax of the Gumbel-perturbed relaxed softmax"""
    if not tau > 0:
        raise ValueError(f"temperature must be > 0, got {tau!r}")
    noise = tuple(rng.gumbel(size=logits.shape) for logits in params.logits)
    soft = tuple(relaxed_soft(logits, g, tau) for logits, g in zip(params.logits, noise))
    indices = tuple(int(np.argmax(s)) for s in soft)
    return params.space.config_from_indices(indices), GumbelDraw(indices=indices, soft=soft, noise=noise, tau=tau)


def relaxed_loss(params: CategoricalParams, batch: Sequence[Tuple[GumbelDraw, float]]) -> float:
    """Mean over the batch of objective * sum over dimensions of the chosen soft probability"""
    total = 0.0
    for draw, value in batch:
        chosen = sum(relaxed_soft(logits, draw.noise[i], draw.tau)[draw.indices[i]]
                     for i, logits in enumerate(params.logits))
        total += value * chosen
    return total / len(batch)


def loss_gradient(params: CategoricalParams, batch: Sequence[Tuple[GumbelDraw, float]]) -> List[np.ndarray]:
    """Analytic gradient of relaxed_loss with the objectives held constant.

    d s_c / d logits = s_c (e_c - s) / tau for the relaxed softmax s.
    """
    grads = [np.zeros_like(logits) for logits in params.logits]
    for draw, value in batch:
        for i, logits in enumerate(params.logits):
            soft = relaxed_soft(logits, draw.noise[i], draw.tau)
            chosen = draw.indices[i]
            direction = -soft * soft[chosen]
            direction[chosen] += soft[chosen]
            grads[i] += value * direction / draw.tau
    return [grad / len(batch) for grad in grads]


@dataclass
class AdamState:
    lr: float = 1e-7
    beta1: float = 0.5
    beta2: float = 0.999
    epsilon: float = 1e-8
    m: Optional[List[np.ndarray]] = None
    v: Optional[List[np.ndarray]] = None
    t: int = 0
    skipped_steps: int = 0

    def update(self, weights: List[np.ndarray], grads: List[np.ndarray]) -> List[np.ndarray]:
        if self.m is None:
            self.m = [np.zeros_like(w) for w in weights]
            self.v = [np.zeros_like(w) for w in weights]
        self.t += 1

        updated = []
        for i, (w, dw) in enumerate(zip(weights, grads)):
            self.m[i] = self.beta1 * self.m[i] + (1 - self.beta1) * dw
            self.v[i] = self.beta2 * self.v[i] + (1 - self.beta2) * (dw ** 2)
            mb = self.m[i] / (1 - self.beta1 ** self.t)
            vb = self.v[i] / (1 - self.beta2 ** self.t)
            updated.append(w - self.lr * mb / (np.sqrt(vb) + self.epsilon))
        return updated


def step(params: CategoricalParams, batch: Sequence[Tuple[GumbelDraw, float]],
         adam_state: AdamState) -> CategoricalParams:
    """One Adam update of the logits from a batch of (draw, objective) pairs.

    Infeasible samples (non-finite objective) are dropped. A batch with no
    feasible sample leaves the logits unchanged and counts a skipped step.
    """
    if not batch:
        raise ValueError("step requires a non-empty batch")
    feasible = [(draw, value) for draw, value in batch if math.isfinite(value)]
    if not feasible:
        adam_state.skipped_steps += 1
        logger.warning(f"All {len(batch)} samples infeasible, skipping update "
                       f"({adam_state.skipped_steps} skipped so far)")
        return params
    grads = loss_gradient(params, feasible)
    return CategoricalParams(space=params.space, logits=adam_state.update(params.logits, grads))


@dataclass(frozen=True)
class SearchBudget:
    steps: int = 300
    batch: int = 16
    tau_start: float = 1.0
    tau_end: Optional[float] = None  # None keeps tau constant
    seed: Optional[int] = None
    lr: float = 1e-7
    beta1: float = 0.5
    beta2: float = 0.999
    epsilon: float = 1e-8
    workers: int = 1

    def __post_init__(self):
        for name in ("steps", "batch", "workers"):
            value = getattr(self, name)
            if not _is_integer(value) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        if self.seed is not None and (not _is_integer(self.seed) or self.seed < 0):
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
        for name in ("tau_start", "tau_end", "lr", "epsilon", "beta1", "beta2"):
            value = getattr(self, name)
            if value is not None and not _is_real(value):
                raise ValueError(f"{name} must be a finite number, got {value!r}")
        for name in ("tau_start", "tau_end", "lr", "epsilon"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")

    def tau_at(self, step_index: int) -> float:
        """Linear anneal from tau_start to tau_end over the run"""
        if self.tau_end is None or self.steps == 1:
            return self.tau_start
        fraction = step_index / (self.steps - 1)
        return self.tau_start + (self.tau_end - self.tau_start) * fraction


@dataclass(frozen=True)
class TrajectoryPoint:
    step: int
    tau: float
    sampled_objective: float
    best_so_far: float
    feasible: int
    entropy: Dict[str, float] = field(default_factory=dict)


@dataclass
class SearchResult:
    method: str
    status: str
    network: str
    space: str
    objective: Objective
    scales: MetricScales
    seed: Optional[int] = None
    best_config: Optional[AcceleratorConfig] = None
    best_report: Optional[CostReport] = None
    best_objective: float = INFEASIBLE
    final_config: Optional[AcceleratorConfig] = None
    final_report: Optional[CostReport] = None
    final_objective: float = INFEASIBLE
    logits: Optional[List[np.ndarray]] = None
    trajectory: List[TrajectoryPoint] = field(default_factory=list)
    samples: int = 0
    evaluations: int = 0
    skipped_steps: int = 0
    wall_clock_s: float = 0.0
    diagnostics: str = ""

    @property
    def succeeded(self) -> bool:
        return self.status == "success"


def resolve_seed(seed: Optional[int]) -> int:
    """Return seed, or fresh OS entropy when None (recorded so the run can be replayed)"""
    if seed is not None:
        return int(seed)
    return int(np.random.SeedSequence().entropy)


class DesignEvaluator:
    """Costs designs of one space by their choice indices, optionally memoized and threaded"""

    def __init__(self, model: DnnModel, space: SearchSpaceDef, tech: TechParams, objective: Objective,
                 scales: MetricScales, workers: int = 1, memoize: bool = True):
        self.model = model
        self.space = space
        self.tech = tech
        self.objective = objective
        self.scales = scales
        self.memoize = memoize
        self.cache: Dict[Tuple[int, ...], CostReport] = {}
        self.evaluations = 0
        self.smallest_area = math.inf
        self._executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        if self._executor is not None:
            self._executor.shutdown()

    def _cost(self, indices: Tuple[int, ...]) -> CostReport:
        return network_cost(self.model, self.space.config_from_indices(indices), self.tech)

    def reports(self, batch: Sequence[Tuple[int, ...]]) -> List[CostReport]:
        """Reports in batch order; each distinct uncached design is costed once"""
        missing = list(dict.fromkeys(i for i in batch if i not in self.cache))
        if self._executor is not None:
            costed = list(self._executor.map(self._cost, missing))
        else:
            costed = [self._cost(indices) for indices in missing]
        self.evaluations += len(missing)

        fresh = dict(zip(missing, costed))
        for report in costed:
            self.smallest_area = min(self.smallest_area, report.area_mm2)
        if self.memoize:
            self.cache.update(fresh)
        return [self.cache[i] if i in self.cache else fresh[i] for i in batch]

    def report(self, indices: Tuple[int, ...]) -> CostReport:
        return self.reports([indices])[0]

    def is_feasible(self, report: CostReport) -> bool:
        return self.space.area_cap is None or report.area_mm2 <= self.space.area_cap

    def value(self, report: CostReport, scales: Optional[MetricScales] = None) -> float:
        return objective_value(report, self.objective, scales or self.scales, self.space.area_cap)

    def infeasible_diagnostics(self) -> str:
        return (f"no feasible design among {self.evaluations} distinct costed configurations; "
                f"area cap {self.space.area_cap} mm^2, smallest costed area {self.smallest_area:.4g} mm^2")


def search(model: DnnModel, space: SearchSpaceDef, tech: TechParams, obj: Objective,
           budget: Optional[SearchBudget] = None) -> SearchResult:
    """Gumbel-Softmax search over the space.

    Tracks the best feasible sampled design; the final design is the per-dimension
    argmax of the learned logits, re-costed. Deterministic for a given seed.
    """
    budget = budget or SearchBudget()
    seed = resolve_seed(budget.seed)
    rng = np.random.default_rng(seed)
    start = time.perf_counter()

    scales = MetricScales.reference(model, space, tech)
    result = SearchResult(method="gumbel", status="success", network=model.name, space=space.name,
                          objective=obj, scales=scales, seed=seed)
    params = CategoricalParams.uniform(space)
    adam = AdamState(lr=budget.lr, beta1=budget.beta1, beta2=budget.beta2, epsilon=budget.epsilon)
    running = RunningScales(scales)
    steps = 1 if space.cardinality == 1 else budget.steps
    logger.info(f"Searching {space.cardinality} designs of {space.name} for {model.name}: "
                f"{steps} steps x {budget.batch} samples, seed {seed}")

    with DesignEvaluator(model, space, tech, obj, scales, workers=budget.workers) as evaluator:
        for step_index in range(steps):
            tau = budget.tau_at(step_index)
            draws = [gumbel_sample(params, tau, rng) for _ in range(budget.batch)]
            reports = evaluator.reports([draw.indices for _, draw in draws])
            result.samples += len(draws)

            batch_best = INFEASIBLE
            feasible = 0
            for (config, _), report in zip(draws, reports):
                running.add(report)
                if not evaluator.is_feasible(report):
                    continue
                feasible += 1
                value = evaluator.value(report)
                batch_best = min(batch_best, value)
                if value < result.best_objective:
                    result.best_objective = value
                    result.best_config = config
                    result.best_report = report

            gradient_scales = running.scales()
            batch = [(draw, evaluator.value(report, gradient_scales)) for (_, draw), report in zip(draws, reports)]
            params = step(params, batch, adam)
            result.trajectory.append(TrajectoryPoint(
                step=step_index, tau=tau, sampled_objective=batch_best, best_so_far=result.best_objective,
                feasible=feasible, entropy=params.entropies()))

        final_indices = params.argmax_indices()
        result.final_config = space.config_from_indices(final_indices)
        result.final_report = evaluator.report(final_indices)
        if evaluator.is_feasible(result.final_report):
            result.final_objective = evaluator.value(result.final_report)
        else:
            logger.warning(f"Argmax design exceeds the area cap ({result.final_report.area_mm2:.4g} mm^2)")
        result.evaluations = evaluator.evaluations
        if result.best_config is None:
            result.status = "failed"
            result.diagnostics = evaluator.infeasible_diagnostics()

    result.logits = [logits.copy() for logits in params.logits]
    result.skipped_steps = adam.skipped_steps
    result.wall_clock_s = time.perf_counter() - start
    logger.info(f"Search finished in {result.wall_clock_s:.2f}s: status {result.status}, "
                f"best objective {result.best_objective:.6g}, {result.evaluations} distinct designs costed")
    return result


def _chunks(items: Iterable, size: int) -> Iterable[List]:
    chunk = []
    for item in items:
        chunk.append(item)
        if len(chunk) == size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def exhaustive_search(model: DnnModel, space: SearchSpaceDef, tech: TechParams, obj: Objective,
                      limit: int = DEFAULT_ENUMERATION_LIMIT, workers: int = 1) -> SearchResult:
    """Global optimum by enumeration; the first minimum in enumeration order wins.

    Raises EnumerationLimitError when the space exceeds limit. The trajectory
    records only the enumeration positions where the best objective improved.
    """
    enumeration = enumerate_configs(space, limit)
    start = time.perf_counter()
    scales = MetricScales.reference(model, space, tech)
    result = SearchResult(method="exhaustive", status="success", network=model.name, space=space.name,
                          objective=obj, scales=scales)

    with DesignEvaluator(model, space, tech, obj, scales, workers=workers, memoize=False) as evaluator:
        position = 0
        for chunk in _chunks(enumeration.indices(), CHUNK):
            for indices, report in zip(chunk, evaluator.reports(chunk)):
                if evaluator.is_feasible(report):
                    value = evaluator.value(report)
                    if value < result.best_objective:
                        result.best_objective = value
                        result.best_config = space.config_from_indices(indices)
                        result.best_report = report
                        result.trajectory.append(TrajectoryPoint(
                            step=position, tau=math.nan, sampled_objective=value, best_so_far=value, feasible=1))
                position += 1
        result.samples = position
        result.evaluations = evaluator.evaluations
        if result.best_config is None:
            result.status = "failed"
            result.diagnostics = evaluator.infeasible_diagnostics()

    result.final_config, result.final_report, result.final_objective = (
        result.best_config, result.best_report, result.best_objective)
    result.wall_clock_s = time.perf_counter() - start
    logger.info(f"Exhaustive search over {result.samples} designs finished in {result.wall_clock_s:.2f}s")
    return result


def sample_indices(space: SearchSpaceDef, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform i.i.d. choice indices, one row per sample"""
    return rng.integers(0, np.array(space.sizes), size=(samples, len(space.sizes)))


def random_search(model: DnnModel, space: SearchSpaceDef, tech: TechParams, obj: Objective,
                  samples: int, seed: Optional[int] = None, workers: int = 1) -> SearchResult:
    """Best feasible design among uniformly sampled configurations"""
    seed = resolve_seed(seed)
    start = time.perf_counter()
    scales = MetricScales.reference(model, space, tech)
    result = SearchResult(method="random", status="success", network=model.name, space=space.name,
                          objective=obj, scales=scales, seed=seed)
    if samples < 1:
        result.status = "failed"
        result.diagnostics = f"random search needs at least one sample, got {samples}"
        return result

    rows = [tuple(int(i) for i in row) for row in sample_indices(space, samples, np.random.default_rng(seed))]
    with DesignEvaluator(model, space, tech, obj, scales, workers=workers, memoize=False) as evaluator:
        for chunk_start, chunk in zip(range(0, samples, CHUNK), _chunks(rows, CHUNK)):
            for offset, (indices, report) in enumerate(zip(chunk, evaluator.reports(chunk))):
                feasible = evaluator.is_feasible(report)
                value = evaluator.value(report) if feasible else INFEASIBLE
                if value < result.best_objective:
                    result.best_objective = value
                    result.best_config = space.config_from_indices(indices)
                    result.best_report = report
                result.trajectory.append(TrajectoryPoint(
                    step=chunk_start + offset, tau=math.nan, sampled_objective=value,
                    best_so_far=result.best_objective, feasible=int(feasible)))
        result.samples = samples
        result.evaluations = len(set(rows))
        if result.best_config is None:
            result.status = "failed"
            result.diagnostics = evaluator.infeasible_diagnostics()

    result.final_config, result.final_report, result.final_objective = (
        result.best_config, result.best_report, result.best_objective)
    result.wall_clock_s = time.perf_counter() - start
    logger.info(f"Random search: {samples} samples, {result.evaluations} distinct designs, "
                f"best objective {result.best_objective:.6g}")
    return result


def density_sweep(model: DnnModel, space: SearchSpaceDef, tech: TechParams, samples: int,
                  seed: Optional[int] = None, workers: int = 1) -> pd.DataFrame:
    """Cost uniformly sampled designs; one row per sample in SWEEP_COLUMNS order"""
    seed = resolve_seed(seed)
    rows = [tuple(int(i) for i in row) for row in sample_indices(space, samples, np.random.default_rng(seed))]
    records = []
    with DesignEvaluator(model, space, tech, Objective(), MetricScales(), workers=workers,
                         memoize=False) as evaluator:
        for chunk in _chunks(rows, CHUNK):
            for report in evaluator.reports(chunk):
                records.append({
                    "sample": len(records),
                    "feasible": evaluator.is_feasible(report),
                    "compute_density": report.compute_density,
                    "throughput_per_energy": report.throughput_per_energy,
                    "area_mm2": report.area_mm2,
                    "energy_pj": report.energy_pj,
                })
    logger.info(f"Swept {samples} sampled designs of {space.name} (seed {seed})")
    return pd.DataFrame(records, columns=SWEEP_COLUMNS)


def pareto_front(frame: pd.DataFrame, x: str = "compute_density", y: str = "throughput_per_energy") -> pd.DataFrame:
    """Rows not dominated in (x, y), both maximized"""
    if frame.empty:
        return frame
    ordered = frame.sort_values([x, y], ascending=[False, False], kind="mergesort")
    running_best = ordered[y].cummax().shift(fill_value=-math.inf)
    return ordered[ordered[y] > running_best]


@dataclass(frozen=True)
class SweepSummary:
    samples: int
    feasible: int
    exceeding: int
    fraction: float
    pareto_size: int
    density_threshold: float
    tpe_threshold: float


def summarize_sweep(frame: pd.DataFrame, density_threshold: float = 0.0,
                    tpe_threshold: float = 0.0) -> SweepSummary:
    """Fraction of feasible designs strictly above both thresholds"""
    feasible = frame[frame["feasible"].astype(bool)]
    exceeding = int(((feasible["compute_density"] > density_threshold)
                     & (feasible["throughput_per_energy"] > tpe_threshold)).sum())
    return SweepSummary(
        samples=len(frame),
        feasible=len(feasible),
        exceeding=exceeding,
        fraction=exceeding / len(feasible) if len(feasible) else 0.0,
        pareto_size=len(pareto_front(feasible)),
        density_threshold=density_threshold,
        tpe_threshold=tpe_threshold,
    )


def search_config_from_dict(data: Dict) -> Tuple[Objective, SearchBudget]:
    unknown = set(data) - {"objective", "budget", "_comment", "_units"}
    if unknown:
        raise ValueError(f"unknown search config key(s) {sorted(unknown)}")
    objective = dict(data.get("objective", {}))
    budget = dict(data.get("budget", {}))
    try:
        if "mode" in objective:
            objective["mode"] = ObjectiveMode(objective["mode"])
        if "area_cap_mode" in objective:
            objective["area_cap_mode"] = AreaCapMode(objective["area_cap_mode"])
        return Objective(**objective), SearchBudget(**budget)
    except TypeError as e:
        raise ValueError(f"invalid search config: {e}") from e


def objective_to_dict(obj: Objective) -> Dict:
    objective = asdict(obj)
    objective["mode"] = obj.mode.value
    objective["area_cap_mode"] = obj.area_cap_mode.value
    return objective


def search_config_to_dict(obj: Objective, budget: SearchBudget) -> Dict:
    return {"objective": objective_to_dict(obj), "budget": asdict(budget)}


def load_search_config(path: Union[str, Path]) -> Tuple[Objective, SearchBudget]:
    """Read an objective and budget; missing fields keep their defaults"""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise ValueError(f"{path}: cannot read search config: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ValueError(f"{path}: search config must be an object")
    try:
        return search_config_from_dict(data)
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from e
