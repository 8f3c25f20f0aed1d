"""Benchmark runners: static accuracy, parameter sweeps, dynamic updates, planning."""

from __future__ import annotations

from time import perf_counter

import numpy as np

from ..geometry import make_label_fn
from ..model import FastronModel, TrainParams
from ..planning import PlanQuery, rrt_connect_plan, rrt_plan, repair_plan, verify_plan
from ..sampling import SamplerParams, update_cycle
from .config import ScenarioConfig
from .report import MetricsRecord
from .scenarios import build_chain, build_workspace, random_start_goal

__all__ = [
    "run_static_eval",
    "run_sweep",
    "run_dynamic_eval",
    "run_planning_eval",
    "median_call_time",
]

# RNG stream tags: every consumer of randomness gets its own child stream,
# so held-out sets are disjoint from training data by construction
_S_SCENARIO, _S_TRAIN, _S_HOLDOUT, _S_TIMING, _S_STARTGOAL, _S_PLAN = range(6)

_PLANNERS = {"rrt": rrt_plan, "rrt_connect": rrt_connect_plan}


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


class CountingLabeler:
    """Wraps a label function and counts calls."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, p):
        self.calls += 1
        return self.fn(p)


def median_call_time(fn, queries, calls: int, batch: int) -> float:
    """Median per-call seconds over batches of at least ``batch`` calls.

    Batching amortizes clock resolution and allocator noise; queries are
    drawn before the clock starts.
    """
    times = []
    qn = len(queries)
    qi = 0
    done = 0
    while done < calls:
        m = min(batch, calls - done)
        t0 = perf_counter()
        for _ in range(m):
            fn(queries[qi])
            qi += 1
            if qi == qn:
                qi = 0
        times.append((perf_counter() - t0) / m)
        done += m
    return float(np.median(times))


def _train_params(cfg: ScenarioConfig) -> TrainParams:
    return TrainParams(
        gamma=cfg.resolved_gamma(),
        beta=cfg.fastron.beta,
        iter_max=cfg.fastron.iter_max,
        s_max=cfg.fastron.s_max,
    )


def _evaluate(model: FastronModel, label_fn, Q: np.ndarray):
    truth = np.fromiter((label_fn(q) for q in Q), dtype=np.int64, count=len(Q))
    pred = model.predict_batch(Q)
    acc = float(np.mean(pred == truth))
    pos = truth == 1
    neg = ~pos
    tpr = float(np.mean(pred[pos] == 1)) if pos.any() else None
    tnr = float(np.mean(pred[neg] == -1)) if neg.any() else None
    return acc, tpr, tnr


def _assert_lazy_fill(model: FastronModel) -> None:
    # training must never have evaluated more than one column's worth of
    # kernels per touched column, and strictly less than the full matrix
    gram = model.gram
    touched = int(np.count_nonzero(gram._computed[: gram.n]))
    n = gram.n
    assert gram.kernel_evals <= n * max(touched, 1), "lazy Gram fill over-evaluated"
    if n >= 100:
        assert gram.kernel_evals < n * n, "lazy Gram fill degenerated to eager"


def _train_static_model(cfg: ScenarioConfig, seed: int, chain, label_fn):
    """Label a fresh uniform dataset, train and sparsify; returns model + time."""
    n0 = cfg.resolved_n0()
    rng = _rng(seed, _S_TRAIN)
    X = rng.uniform(-1.0, 1.0, (n0, chain.dof))
    params = _train_params(cfg)
    model = FastronModel(params, dim=chain.dof, capacity=params.s_max + cfg.fastron.a_max)
    t0 = perf_counter()
    y = np.fromiter((label_fn(x) for x in X), dtype=np.float64, count=n0)
    model.set_data(X, y)
    report = model.train()
    _assert_lazy_fill(model)
    model.sparsify()
    update_time = perf_counter() - t0
    return model, report, update_time


def run_static_eval(cfg: ScenarioConfig, seeds) -> list[MetricsRecord]:
    """Train on a static scenario per seed; report accuracy and query timing."""
    records = []
    for seed in seeds:
        chain = build_chain(cfg)
        workspace = build_workspace(cfg, _rng(seed, _S_SCENARIO), chain)
        label_fn = make_label_fn(chain, workspace)
        model, _, update_time = _train_static_model(cfg, seed, chain, label_fn)
        holdout = _rng(seed, _S_HOLDOUT).uniform(-1.0, 1.0, (cfg.eval.holdout, chain.dof))
        acc, tpr, tnr = _evaluate(model, label_fn, holdout)
        timing_q = _rng(seed, _S_TIMING).uniform(-1.0, 1.0, (4096, chain.dof))
        queries = [np.ascontiguousarray(q) for q in timing_q]
        t_proxy = median_call_time(
            model.predict, queries, cfg.eval.timing_calls, cfg.eval.timing_batch
        )
        t_oracle = median_call_time(
            label_fn, queries, cfg.eval.timing_calls, cfg.eval.timing_batch
        )
        records.append(
            MetricsRecord(
                run="static",
                seed=seed,
                accuracy=acc,
                tpr=tpr,
                tnr=tnr,
                support_count=model.n,
                query_time_proxy=t_proxy,
                query_time_oracle=t_oracle,
                update_time=update_time,
            )
        )
    return records


def run_sweep(cfg: ScenarioConfig, parameter: str, values, seeds):
    """Static evaluation per sweep value; long-format records plus means."""
    if not values:
        raise ValueError("sweep values must be non-empty")
    records = []
    summary = []
    for value in values:
        sub = cfg.with_override(parameter, value)
        recs = run_static_eval(sub, seeds)
        for rec in recs:
            rec.run = "sweep"
            rec.param = parameter
            rec.value = float(value)
        records.extend(recs)
        stats = {}
        for name in ("accuracy", "tpr", "tnr", "support_count",
                     "query_time_proxy", "query_time_oracle"):
            vals = [getattr(r, name) for r in recs if getattr(r, name) is not None]
            stats[name] = float(np.mean(vals)) if vals else None
        summary.append((parameter, float(value), stats))
    return records, summary


def run_dynamic_eval(cfg: ScenarioConfig, seeds) -> list[MetricsRecord]:
    """Moving obstacles: one update cycle per step, evaluated post-move."""
    if cfg.obstacles.motion_steps < 1:
        raise ValueError("dynamic evaluation requires obstacles.motion_steps >= 1")
    records = []
    for seed in seeds:
        chain = build_chain(cfg)
        workspace = build_workspace(cfg, _rng(seed, _S_SCENARIO), chain)
        params = _train_params(cfg)
        model = FastronModel(params, dim=chain.dof,
                             capacity=params.s_max + cfg.fastron.a_max)
        sampler = SamplerParams(
            a_max=cfg.fastron.a_max,
            kappa=cfg.fastron.kappa,
            sigma=cfg.fastron.sigma,
            seed=seed,
            n_initial=cfg.resolved_n0(),
        )
        holdout_rng = _rng(seed, _S_HOLDOUT)
        for step in range(cfg.obstacles.motion_steps):
            if step > 0:
                workspace = workspace.stepped()
            oracle = CountingLabeler(make_label_fn(chain, workspace))
            t0 = perf_counter()
            update_cycle(model, oracle, sampler)
            update_time = perf_counter() - t0
            support = model.n - cfg.fastron.a_max  # pending active set is unlabeled
            holdout = holdout_rng.uniform(-1.0, 1.0, (cfg.eval.holdout, chain.dof))
            acc, tpr, tnr = _evaluate(model, oracle.fn, holdout)
            records.append(
                MetricsRecord(
                    run="dynamic",
                    seed=seed,
                    step=step,
                    accuracy=acc,
                    tpr=tpr,
                    tnr=tnr,
                    support_count=support,
                    update_time=update_time,
                    oracle_calls=oracle.calls,
                )
            )
    return records


def _timed_pipeline(planner, query: PlanQuery, oracle_free, cert_resolution: float):
    """plan -> verify -> repair with component timings; None if planning fails."""
    t0 = perf_counter()
    try:
        plan = planner(query)
    except ValueError:
        plan = None
    plan_time = perf_counter() - t0
    if plan is None:
        return None, plan_time, 0.0, 0.0
    t0 = perf_counter()
    invalid = verify_plan(plan, oracle_free, cert_resolution)
    verify_time = perf_counter() - t0
    repair_time = 0.0
    if invalid:
        t0 = perf_counter()
        plan = repair_plan(
            plan,
            invalid,
            oracle_free,
            planner=planner,
            edge_resolution=cert_resolution,
            step_size=query.step_size,
            goal_bias=query.goal_bias,
            max_iterations=query.max_iterations,
            seed=query.seed + 7919,
        )
        repair_time = perf_counter() - t0
    else:
        plan.certified = True
    if plan is not None:
        plan.planner_time = plan_time
        plan.verify_time = verify_time
        plan.repair_time = repair_time
    return plan, plan_time, verify_time, repair_time


def run_planning_eval(cfg: ScenarioConfig, seeds, return_details: bool = False):
    """Plan with the proxy (verify + repair) and with the oracle directly.

    Both routes are certified against the oracle at half the planning edge
    resolution, so a certified plan withstands an independent check at
    that resolution exactly.
    """
    planner = _PLANNERS[cfg.planner.algorithm]
    pl = cfg.planner
    cert_res = pl.edge_resolution / 2.0
    records = []
    details = []
    for seed in seeds:
        chain = build_chain(cfg)
        workspace = build_workspace(cfg, _rng(seed, _S_SCENARIO), chain)
        label_fn = make_label_fn(chain, workspace)
        model, _, _ = _train_static_model(cfg, seed, chain, label_fn)
        oracle_free = lambda p, fn=label_fn: fn(p) == -1
        proxy_free = lambda p, m=model: m.predict(p) == -1
        pair = random_start_goal(
            _rng(seed, _S_STARTGOAL),
            (oracle_free, proxy_free),
            chain.dof,
            pl.min_start_goal_dist,
        )
        detail = {"chain": chain, "workspace": workspace, "model": model,
                  "plans": {}, "start_goal": pair}
        if pair is None:
            for route in ("proxy", "oracle"):
                records.append(MetricsRecord(run="plan", seed=seed, route=route,
                                             plan_found=False, certified=False))
            details.append(detail)
            continue
        start, goal = pair
        for route, checker in (("proxy", proxy_free), ("oracle", oracle_free)):
            query = PlanQuery(
                start,
                goal,
                checker,
                edge_resolution=pl.edge_resolution,
                step_size=pl.step_size,
                goal_bias=pl.goal_bias,
                max_iterations=pl.max_iterations,
                seed=_rng(seed, _S_PLAN).integers(0, 2**31),
            )
            plan, plan_time, verify_time, repair_time = _timed_pipeline(
                planner, query, oracle_free, cert_res
            )
            detail["plans"][route] = plan
            records.append(
                MetricsRecord(
                    run="plan",
                    seed=seed,
                    route=route,
                    support_count=model.n if route == "proxy" else None,
                    plan_time=plan_time,
                    verify_time=verify_time if plan is not None else None,
                    repair_time=repair_time if plan is not None else None,
                    certified=plan.certified if plan is not None else False,
                    plan_found=plan is not None,
                )
            )
        details.append(detail)
    if return_details:
        return records, details
    return records
