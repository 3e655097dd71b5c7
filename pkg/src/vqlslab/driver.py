"""The classical half of the solver: step the angles, watch the cost.

optimize() runs one gradient-based descent on a single instance and
returns the full per-iteration trace; label_instance() repeats it from
several random starts and keeps the best, which is how ground-truth
angles for the learned initializer are produced; summarize() reduces a
pile of traces to the per-(strategy, size) statistics the benchmark
reports.  Trace and summary CSV layouts live here so every writer and
reader agrees on them.
"""

import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from . import cost, kernels
from .cost import DegenerateCostError
from .initializers import init_uniform
from .problem import LinearSystem
from .simulator import ParamSet, StateVector, ansatz_state, build_bprep

TRACE_HEADER = "instance,strategy,qubits,iter,cost,wall_ms"
SUMMARY_HEADER = (
    "strategy,qubits,n,median_init,q1_init,q3_init,"
    "median_final,median_steps,converge_rate,mean_ms"
)


@dataclass(frozen=True)
class OptimizerSpec:
    """First-order update rule; adam's moment constants are standard."""

    kind: str = "adam"
    lr: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.kind not in ("adam", "gradient_descent"):
            raise ValueError(f"unknown optimizer {self.kind!r}")
        if self.lr <= 0.0:
            raise ValueError("learning rate must be positive")


@dataclass(frozen=True)
class RunConfig:
    cost_kind: str = "local"
    optimizer: OptimizerSpec = OptimizerSpec()
    max_iters: int = 800
    gamma: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.cost_kind not in ("global", "local"):
            raise ValueError(f"unknown cost kind {self.cost_kind!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie strictly inside (0, 1)")


@dataclass
class RunTrace:
    """Cost history of one optimize() call; index 0 is the starting cost."""

    instance_id: str
    strategy: str
    qubits: int
    costs: np.ndarray
    wall_ms: np.ndarray
    final_params: Optional[ParamSet]
    converged_at: Optional[int]

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=np.float64)
        self.wall_ms = np.asarray(self.wall_ms, dtype=np.float64)
        if self.wall_ms.shape != self.costs.shape:
            raise ValueError("wall_ms and costs must have matching length")
        if self.costs.size == 0:
            raise ValueError("a trace records at least the starting cost")
        if np.any(self.costs < 0.0) or np.any(self.costs > 1.0 + 1e-9):
            raise ValueError("trace costs must stay within [0, 1]")


@dataclass
class LabelResult:
    """Best-of-restarts angles for one instance plus restart bookkeeping."""

    params: ParamSet
    final_cost: float
    final_costs: List[float]
    trace: RunTrace


def _current_cost(sys: LinearSystem, angles: np.ndarray, kind: str, u) -> float:
    state = StateVector(sys.qubits, kernels.ansatz_amps(angles, sys.qubits))
    if kind == "global":
        return cost.global_cost(sys, state).normalized
    return cost.local_cost(sys, state, u).normalized


def optimize(sys: LinearSystem, p0: ParamSet, cfg: RunConfig,
             strategy: str = "manual") -> RunTrace:
    """Descend from p0 until the cost drops below gamma or the budget ends."""
    kind = cfg.cost_kind
    u = build_bprep(sys.rhs) if kind == "local" else None
    angles = p0.angles.copy()
    costs: List[float] = []
    walls: List[float] = []

    tic = time.perf_counter()
    try:
        c = _current_cost(sys, angles, kind, u)
    except DegenerateCostError as exc:
        raise DegenerateCostError(f"{sys.id}: iteration 0: {exc}") from exc
    # clamp float dust so recorded costs honor the [0, 1] contract
    costs.append(max(0.0, c))
    walls.append((time.perf_counter() - tic) * 1e3)

    converged_at: Optional[int] = None
    if costs[0] < cfg.gamma:
        converged_at = 0
    else:
        opt = cfg.optimizer
        m = np.zeros_like(angles)
        v = np.zeros_like(angles)
        for it in range(1, cfg.max_iters + 1):
            tic = time.perf_counter()
            try:
                grad = cost.cost_gradient(sys, ParamSet(sys.qubits, angles), kind, u)
                if opt.kind == "adam":
                    m = opt.beta1 * m + (1.0 - opt.beta1) * grad
                    v = opt.beta2 * v + (1.0 - opt.beta2) * grad * grad
                    m_hat = m / (1.0 - opt.beta1 ** it)
                    v_hat = v / (1.0 - opt.beta2 ** it)
                    angles -= opt.lr * m_hat / (np.sqrt(v_hat) + opt.eps)
                else:
                    angles -= opt.lr * grad
                c = _current_cost(sys, angles, kind, u)
            except DegenerateCostError as exc:
                raise DegenerateCostError(f"{sys.id}: iteration {it}: {exc}") from exc
            costs.append(max(0.0, c))
            walls.append((time.perf_counter() - tic) * 1e3)
            if c < cfg.gamma:
                converged_at = it
                break

    return RunTrace(
        instance_id=sys.id,
        strategy=strategy,
        qubits=sys.qubits,
        costs=np.array(costs),
        wall_ms=np.array(walls),
        final_params=ParamSet(sys.qubits, angles),
        converged_at=converged_at,
    )


def steps_to_threshold(trace_or_costs: Union[RunTrace, Sequence[float]],
                       gamma: float) -> Optional[int]:
    """First trace index whose cost is below gamma, or None."""
    costs = np.asarray(getattr(trace_or_costs, "costs", trace_or_costs), dtype=np.float64)
    below = np.nonzero(costs < gamma)[0]
    return int(below[0]) if below.size else None


def solution_fidelity(sys: LinearSystem, p: ParamSet) -> float:
    """Overlap squared between the ansatz state and the classical solution."""
    cond = np.linalg.cond(sys.matrix)
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError(
            f"matrix condition number {cond:.3e} exceeds 1e12, solve untrusted"
        )
    x = np.linalg.solve(sys.matrix, sys.rhs)
    x /= np.linalg.norm(x)
    state = ansatz_state(p)
    overlap = np.vdot(x, state.amplitudes)
    return float(overlap.real ** 2 + overlap.imag ** 2)


def label_instance(sys: LinearSystem, cfg: RunConfig, restarts: int,
                   seed: int) -> LabelResult:
    """Optimize from several uniform-random starts, keep the best end point.

    Restart r starts from init_uniform(q, SeedSequence(seed).generate_state(
    restarts)[r]), so a larger restart count extends a smaller one and the
    best final cost can only improve.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    states = np.random.SeedSequence(seed).generate_state(restarts)
    best: Optional[RunTrace] = None
    finals: List[float] = []
    failure: Optional[DegenerateCostError] = None
    for s in states:
        p0 = init_uniform(sys.qubits, int(s))
        try:
            trace = optimize(sys, p0, cfg, strategy="uniform")
        except DegenerateCostError as exc:
            failure = exc
            continue
        finals.append(float(trace.costs[-1]))
        if best is None or trace.costs[-1] < best.costs[-1]:
            best = trace
    if best is None:
        raise DegenerateCostError(
            f"{sys.id}: every restart degenerated (last: {failure})"
        )
    return LabelResult(
        params=best.final_params,
        final_cost=float(best.costs[-1]),
        final_costs=finals,
        trace=best,
    )


@dataclass(frozen=True)
class SummaryRow:
    strategy: str
    qubits: int
    n: int
    median_init: float
    q1_init: float
    q3_init: float
    median_final: float
    median_steps: Optional[float]
    converge_rate: float
    mean_ms: float


def summarize(traces: Sequence[RunTrace]) -> List[SummaryRow]:
    """Per-(strategy, qubits) statistics over a batch of traces.

    Quantiles use the lower-value convention (no interpolation between
    samples); median_steps covers converged traces only and is None when
    nothing converged; mean_ms is the mean total wall clock per trace.
    """
    if not traces:
        raise ValueError("summarize needs at least one trace")
    groups = {}
    for t in traces:
        groups.setdefault((t.strategy, t.qubits), []).append(t)
    rows = []
    for strategy, qubits in sorted(groups):
        ts = groups[(strategy, qubits)]
        inits = np.array([t.costs[0] for t in ts])
        finals = np.array([t.costs[-1] for t in ts])
        steps = np.array([t.converged_at for t in ts if t.converged_at is not None])
        q1, med, q3 = np.quantile(inits, [0.25, 0.5, 0.75], method="lower")
        rows.append(SummaryRow(
            strategy=strategy,
            qubits=qubits,
            n=len(ts),
            median_init=float(med),
            q1_init=float(q1),
            q3_init=float(q3),
            median_final=float(np.quantile(finals, 0.5, method="lower")),
            median_steps=float(np.quantile(steps, 0.5, method="lower")) if steps.size else None,
            converge_rate=steps.size / len(ts),
            mean_ms=float(np.mean([t.wall_ms.sum() for t in ts])),
        ))
    return rows


def write_trace_csv(traces: Sequence[RunTrace], path) -> None:
    with open(path, "w") as fh:
        fh.write(TRACE_HEADER + "\n")
        for t in traces:
            for k in range(len(t.costs)):
                fh.write(
                    f"{t.instance_id},{t.strategy},{t.qubits},{k},"
                    f"{float(t.costs[k])!r},{float(t.wall_ms[k])!r}\n"
                )


def read_trace_csv(path) -> List[RunTrace]:
    """Rebuild traces from the CSV layout; a zero iter starts a new trace.

    Final parameters and the convergence marker are not stored in the CSV;
    re-read traces carry final_params=None and converged_at=None, and steps
    are recovered with steps_to_threshold at whatever gamma the caller needs.
    """
    traces: List[RunTrace] = []
    current = None

    def flush():
        if current is not None:
            traces.append(RunTrace(
                instance_id=current[0], strategy=current[1], qubits=current[2],
                costs=np.array(current[3]), wall_ms=np.array(current[4]),
                final_params=None, converged_at=None,
            ))

    with open(path) as fh:
        header = fh.readline().strip()
        if header != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected trace header {header!r}")
        for ln, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 6:
                raise ValueError(f"{path}: line {ln}: expected 6 fields")
            instance, strategy, qubits, it, c, w = parts
            if int(it) == 0:
                flush()
                current = (instance, strategy, int(qubits), [], [])
            current[3].append(float(c))
            current[4].append(float(w))
    flush()
    return traces


def write_summary_csv(rows: Sequence[SummaryRow], path) -> None:
    with open(path, "w") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for r in rows:
            steps = "" if r.median_steps is None else f"{r.median_steps!r}"
            fh.write(
                f"{r.strategy},{r.qubits},{r.n},{r.median_init!r},{r.q1_init!r},"
                f"{r.q3_init!r},{r.median_final!r},{steps},"
                f"{r.converge_rate!r},{r.mean_ms!r}\n"
            )
