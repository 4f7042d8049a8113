"""Optimizers and schedules for trainable provers.

Gradient descent with parameter-shift (or supplied analytic) gradients,
SPSA with standard gain sequences, a derivative-free stage, the alternating
min-max schedules used by the competing-prover games, and the best-of-k
restart wrapper. Every run is reproducible from (config, seed) and records
its trace.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.optimize


@dataclass
class Objective:
    """A scalar objective over a real parameter vector.

    `gradient`, when given, returns (value, grad); otherwise the parameter
    shift rule (or central differences if `shift_rule` is False) is used.
    """

    fn: Callable[[np.ndarray], float]
    mode: str = "minimize"           # or "maximize"
    gradient: Callable | None = None
    shift_rule: bool = True

    def __post_init__(self):
        if self.mode not in ("minimize", "maximize"):
            raise ValueError("mode must be minimize or maximize")

    @property
    def sign(self) -> float:
        return 1.0 if self.mode == "minimize" else -1.0


@dataclass
class OptimizerConfig:
    kind: str = "gd"                 # gd | spsa | dfree
    step: float = 0.1
    max_iters: int = 300
    tol: float = 0.0                 # 0 disables the early stop
    seed: int = 0
    # SPSA gains: a_k = a/(k+1+A)^alpha, c_k = c/(k+1)^gamma
    a: float | None = None           # calibrated from the first gradient if None
    c: float = 0.1
    big_a: float | None = None       # defaults to 10% of max_iters
    alpha: float = 0.602
    gamma: float = 0.101
    batch: int = 30                  # dfree trace granularity

    def __post_init__(self):
        if self.step <= 0 or self.c <= 0:
            raise ValueError("step sizes must be positive")
        if self.tol < 0:
            raise ValueError("tolerance must be nonnegative")


@dataclass
class RunRecord:
    iterations: list[tuple[int, float]] = field(default_factory=list)
    params: np.ndarray | None = None
    cost: float = math.nan
    evaluations: int = 0
    stop_reason: str = ""
    wall_time: float = 0.0
    seed: int | None = None


class _Counted:
    """Objective wrapper counting every evaluation."""

    def __init__(self, obj: Objective):
        self.obj = obj
        self.count = 0

    def __call__(self, theta):
        self.count += 1
        return float(self.obj.fn(theta))


def grad_parameter_shift(obj: Objective, theta: np.ndarray,
                         fd_step: float = 1e-5) -> np.ndarray:
    """Gradient by +-pi/2 shifts for rotation-parameterized objectives,
    falling back to central finite differences otherwise."""
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    half = 0.5 * math.pi if obj.shift_rule else fd_step
    scale = 0.5 if obj.shift_rule else 0.5 / fd_step
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = half
        grad[i] = scale * (obj.fn(theta + e) - obj.fn(theta - e))
    return grad


def _value_and_grad(obj: Objective, counted: _Counted, theta: np.ndarray):
    if obj.gradient is not None:
        counted.count += 1
        val, grad = obj.gradient(theta)
        return float(val), np.asarray(grad, dtype=float)
    val = counted(theta)
    grad = grad_parameter_shift(obj, theta)
    counted.count += 2 * theta.size
    return val, grad


def gd_run(obj: Objective, theta0: np.ndarray, cfg: OptimizerConfig) -> RunRecord:
    """Fixed-step gradient descent (ascent for maximize mode)."""
    start = time.monotonic()
    counted = _Counted(obj)
    theta = np.asarray(theta0, dtype=float).copy()
    record = RunRecord(seed=cfg.seed)
    last = math.inf
    reason = "max_iters"
    for it in range(cfg.max_iters):
        val, grad = _value_and_grad(obj, counted, theta)
        if math.isnan(val):
            reason = "nan"
            break
        record.iterations.append((it, val))
        if cfg.tol > 0 and abs(val - last) <= cfg.tol:
            reason = "tolerance"
            break
        last = val
        theta = theta - obj.sign * cfg.step * grad
    record.params = theta
    record.cost = counted(theta)
    record.evaluations = counted.count
    record.stop_reason = reason
    record.wall_time = time.monotonic() - start
    return record


def spsa_run(obj: Objective, theta0: np.ndarray, cfg: OptimizerConfig) -> RunRecord:
    """Simultaneous perturbation stochastic approximation with Rademacher
    perturbations; the first-step scale is auto-calibrated when cfg.a is
    unset so the initial update is about `cfg.step` radians."""
    start = time.monotonic()
    counted = _Counted(obj)
    rng = np.random.default_rng(cfg.seed)
    theta = np.asarray(theta0, dtype=float).copy()
    record = RunRecord(seed=cfg.seed)
    big_a = cfg.big_a if cfg.big_a is not None else 0.1 * cfg.max_iters
    a = cfg.a
    if a is None:
        mags = []
        for _ in range(5):
            delta = rng.choice([-1.0, 1.0], size=theta.size)
            diff = counted(theta + cfg.c * delta) - counted(theta - cfg.c * delta)
            mags.append(abs(diff / (2 * cfg.c)))
        g0 = max(float(np.mean(mags)), 1e-3)
        a = cfg.step * (big_a + 1.0) ** cfg.alpha / g0
    last = math.inf
    reason = "max_iters"
    for k in range(cfg.max_iters):
        ak = a / (k + 1 + big_a) ** cfg.alpha
        ck = cfg.c / (k + 1) ** cfg.gamma
        delta = rng.choice([-1.0, 1.0], size=theta.size)
        plus = counted(theta + ck * delta)
        minus = counted(theta - ck * delta)
        if math.isnan(plus) or math.isnan(minus):
            reason = "nan"
            break
        ghat = (plus - minus) / (2 * ck) * (1.0 / delta)
        val = 0.5 * (plus + minus)
        record.iterations.append((k, val))
        if cfg.tol > 0 and abs(val - last) <= cfg.tol:
            reason = "tolerance"
            break
        last = val
        theta = theta - obj.sign * ak * ghat
    record.params = theta
    record.cost = counted(theta)
    record.evaluations = counted.count
    record.stop_reason = reason
    record.wall_time = time.monotonic() - start
    return record


def dfree_run(obj: Objective, theta0: np.ndarray, cfg: OptimizerConfig) -> RunRecord:
    """Derivative-free local stage (linear-approximation trust region via
    scipy's COBYLA), with the trace reported in evaluation batches."""
    start = time.monotonic()
    counted = _Counted(obj)
    record = RunRecord(seed=cfg.seed)
    budget = cfg.max_iters
    trace_vals: list[float] = []

    class _Abort(Exception):
        pass

    def wrapped(theta):
        val = obj.sign * counted(theta)
        if math.isnan(val):
            raise _Abort
        trace_vals.append(val * obj.sign)
        return val

    reason = "max_iters"
    theta = np.asarray(theta0, dtype=float).copy()
    try:
        res = scipy.optimize.minimize(wrapped, theta, method="COBYLA",
                                      options={"maxiter": budget,
                                               "rhobeg": cfg.step,
                                               "tol": cfg.tol or 1e-12})
        theta = np.asarray(res.x, dtype=float)
        if getattr(res, "status", None) == 1:
            reason = "converged"
    except _Abort:
        reason = "nan"
    for b in range(0, len(trace_vals), cfg.batch):
        chunk = trace_vals[b:b + cfg.batch]
        record.iterations.append((b // cfg.batch, chunk[-1]))
    record.params = theta
    record.cost = counted(theta)
    record.evaluations = counted.count
    record.stop_reason = reason
    record.wall_time = time.monotonic() - start
    return record


RUNNERS = {"gd": gd_run, "spsa": spsa_run, "dfree": dfree_run}


def run_optimizer(obj: Objective, theta0: np.ndarray, cfg: OptimizerConfig) -> RunRecord:
    return RUNNERS[cfg.kind](obj, theta0, cfg)


@dataclass
class MinMaxRecord:
    iterations: list[tuple[int, float]] = field(default_factory=list)
    theta_min: np.ndarray | None = None
    theta_max: np.ndarray | None = None
    cost: float = math.nan
    evaluations: int = 0
    stop_reason: str = ""
    wall_time: float = 0.0


def zigzag_minmax(joint_fn, theta_min0: np.ndarray, theta_max0: np.ndarray,
                  cfg_min: OptimizerConfig, cfg_max: OptimizerConfig,
                  budget: int, inner_tol: float = 1e-5,
                  inner_cap: int = 400, seed: int = 0) -> MinMaxRecord:
    """Alternate an inner minimization run to convergence with single
    maximization steps until the evaluation budget is spent.

    `joint_fn(theta_min, theta_max)` is the acceptance probability; the
    min block runs SPSA until its tolerance fires, then the max block takes
    one gradient step (parameter shift).
    """
    start = time.monotonic()
    t_min = np.asarray(theta_min0, dtype=float).copy()
    t_max = np.asarray(theta_max0, dtype=float).copy()
    record = MinMaxRecord()
    evals = 0
    it = 0
    round_idx = 0
    while evals < budget:
        remaining = budget - evals
        inner_iters = max(1, min(inner_cap, remaining // 2))
        cfg_inner = replace(cfg_min, kind="spsa", max_iters=inner_iters,
                            tol=inner_tol, seed=seed + 104729 * round_idx)
        inner_obj = Objective(fn=lambda tm: joint_fn(tm, t_max), mode="minimize")
        rec = spsa_run(inner_obj, t_min, cfg_inner)
        t_min = rec.params
        evals += rec.evaluations
        for _, v in rec.iterations:
            record.iterations.append((it, v))
            it += 1
        if evals >= budget:
            break
        # one maximization step by parameter shift on the max block
        max_obj = Objective(fn=lambda tx: joint_fn(t_min, tx), mode="maximize")
        grad = grad_parameter_shift(max_obj, t_max)
        evals += 2 * t_max.size
        t_max = t_max + cfg_max.step * grad
        val = joint_fn(t_min, t_max)
        evals += 1
        record.iterations.append((it, val))
        it += 1
        round_idx += 1
    record.theta_min, record.theta_max = t_min, t_max
    record.cost = joint_fn(t_min, t_max)
    record.evaluations = evals
    record.stop_reason = "budget"
    record.wall_time = time.monotonic() - start
    return record


def block_alternation(joint_fn, theta_a0: np.ndarray, theta_b0: np.ndarray,
                      cfg_a: OptimizerConfig, cfg_b: OptimizerConfig,
                      block_iters: int, budget: int,
                      modes: tuple[str, str] = ("maximize", "maximize"),
                      seed: int = 0) -> MinMaxRecord:
    """Alternate fixed-length optimization blocks on the two parameter
    groups (both maximizing for the discrimination games)."""
    start = time.monotonic()
    t_a = np.asarray(theta_a0, dtype=float).copy()
    t_b = np.asarray(theta_b0, dtype=float).copy()
    record = MinMaxRecord()
    evals = 0
    it = 0
    block = 0
    while evals < budget:
        side = block % 2
        cfg = cfg_a if side == 0 else cfg_b
        mode = modes[side]
        iters = max(1, min(block_iters, (budget - evals) // 2))
        cfg_run = replace(cfg, max_iters=iters, seed=seed + 7 * block)
        if side == 0:
            obj = Objective(fn=lambda ta: joint_fn(ta, t_b), mode=mode)
            rec = run_optimizer(obj, t_a, cfg_run)
            t_a = rec.params
        else:
            obj = Objective(fn=lambda tb: joint_fn(t_a, tb), mode=mode)
            rec = run_optimizer(obj, t_b, cfg_run)
            t_b = rec.params
        evals += rec.evaluations
        for _, v in rec.iterations:
            record.iterations.append((it, v))
            it += 1
        block += 1
    record.theta_min, record.theta_max = t_a, t_b
    record.cost = joint_fn(t_a, t_b)
    record.evaluations = evals
    record.stop_reason = "budget"
    record.wall_time = time.monotonic() - start
    return record


def best_of(runner: Callable[[int], RunRecord], seeds,
            mode: str = "minimize") -> tuple[RunRecord, list[RunRecord]]:
    """Run seeded instances and keep the best final cost."""
    records = [runner(s) for s in seeds]
    key = (lambda r: r.cost) if mode == "minimize" else (lambda r: -r.cost)
    best = min(records, key=key)
    return best, records
