"""RRT and RRT-Connect over an abstract collision checker, plus verify/repair.

Planners only see a predicate ``checker(point) -> bool`` (True = free), so
the same code plans against the learned proxy or the geometric oracle.
Plans produced with an approximate checker are certified afterwards:
verify finds the edges an oracle rejects, repair excises them with one
waypoint of margin and re-plans the gaps with the oracle as checker.

Nearest neighbors use a linear scan; trees at this scale stay small and
the behavior is easy to audit. Each planning call owns its RNG stream, so
identical query + seed reproduces the identical plan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "PlanQuery",
    "MotionPlan",
    "edge_valid",
    "rrt_plan",
    "rrt_connect_plan",
    "verify_plan",
    "repair_plan",
]

CheckerFn = Callable[[np.ndarray], bool]


@dataclass
class PlanQuery:
    start: np.ndarray
    goal: np.ndarray
    checker: CheckerFn
    edge_resolution: float = 0.05
    step_size: float = 0.2
    goal_bias: float = 0.05
    max_iterations: int = 50000
    seed: int = 0

    def __post_init__(self):
        self.start = np.asarray(self.start, dtype=np.float64)
        self.goal = np.asarray(self.goal, dtype=np.float64)
        if self.edge_resolution <= 0.0:
            raise ValueError("edge_resolution must be positive")
        if self.step_size <= 0.0:
            raise ValueError("step_size must be positive")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError("goal_bias must be in [0, 1]")


@dataclass
class MotionPlan:
    waypoints: list[np.ndarray] = field(default_factory=list)
    certified: bool = False
    planner_time: float = 0.0
    verify_time: float = 0.0
    repair_time: float = 0.0
    iterations: int = 0


def edge_valid(a, b, checker: CheckerFn, resolution: float) -> bool:
    """True iff every sample at spacing <= resolution on [a, b] is free.

    Endpoints included. ``a == b`` reduces to a point check.
    """
    if resolution <= 0.0:
        raise ValueError("resolution must be positive")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    dist = float(np.linalg.norm(b - a))
    steps = max(1, math.ceil(dist / resolution))
    delta = (b - a) / steps
    for k in range(steps + 1):
        if not checker(a + k * delta):
            return False
    return True


def _trace_path(pts: np.ndarray, parents: np.ndarray, idx: int) -> list[np.ndarray]:
    path = []
    while idx >= 0:
        path.append(pts[idx].copy())
        idx = int(parents[idx])
    path.reverse()
    return path


def rrt_plan(query: PlanQuery) -> MotionPlan | None:
    """Single-tree RRT; returns a plan on reaching the goal region, else None.

    The goal region is a step_size ball around the goal with a valid
    connecting edge; the goal itself becomes the final waypoint.
    """
    checker = query.checker
    start, goal = query.start, query.goal
    if not checker(start):
        raise ValueError("start configuration is in collision")
    if not checker(goal):
        raise ValueError("goal configuration is in collision")
    if np.array_equal(start, goal):
        return MotionPlan([start.copy()], iterations=0)
    d = start.shape[0]
    rng = np.random.default_rng(query.seed)
    cap = query.max_iterations + 2
    pts = np.empty((cap, d), dtype=np.float64)
    parents = np.empty(cap, dtype=np.int64)
    pts[0] = start
    parents[0] = -1
    n = 1
    res = query.edge_resolution
    for it in range(1, query.max_iterations + 1):
        target = goal if rng.random() < query.goal_bias else rng.uniform(-1.0, 1.0, d)
        diff = pts[:n] - target
        j = int(np.argmin((diff * diff).sum(axis=1)))
        near = pts[j]
        step = target - near
        dist = float(np.linalg.norm(step))
        if dist == 0.0:
            continue
        new = target if dist <= query.step_size else near + (query.step_size / dist) * step
        if not edge_valid(near, new, checker, res):
            continue
        pts[n] = new
        parents[n] = j
        n += 1
        gd = float(np.linalg.norm(new - goal))
        if gd == 0.0:
            return MotionPlan(_trace_path(pts, parents, n - 1), iterations=it)
        if gd <= query.step_size and edge_valid(new, goal, checker, res):
            pts[n] = goal
            parents[n] = n - 1
            n += 1
            return MotionPlan(_trace_path(pts, parents, n - 1), iterations=it)
    return None


class _Tree:
    __slots__ = ("pts", "parents", "n")

    def __init__(self, root: np.ndarray, cap: int):
        self.pts = np.empty((cap, root.shape[0]), dtype=np.float64)
        self.parents = np.empty(cap, dtype=np.int64)
        self.pts[0] = root
        self.parents[0] = -1
        self.n = 1

    def nearest(self, target: np.ndarray) -> int:
        diff = self.pts[: self.n] - target
        return int(np.argmin((diff * diff).sum(axis=1)))

    def add(self, point: np.ndarray, parent: int) -> int:
        self.pts[self.n] = point
        self.parents[self.n] = parent
        self.n += 1
        return self.n - 1

    def path(self, idx: int) -> list[np.ndarray]:
        return _trace_path(self.pts, self.parents, idx)


def _extend(tree: _Tree, target: np.ndarray, checker, step_size, res) -> int | None:
    j = tree.nearest(target)
    near = tree.pts[j]
    step = target - near
    dist = float(np.linalg.norm(step))
    if dist == 0.0:
        return None
    new = target if dist <= step_size else near + (step_size / dist) * step
    if not edge_valid(near, new, checker, res):
        return None
    return tree.add(new, j)


def _connect(tree: _Tree, target: np.ndarray, checker, step_size, res) -> int | None:
    """Extend repeatedly toward a fixed target; index of the target node
    when reached exactly, None when trapped."""
    for _ in range(100000):
        idx = _extend(tree, target, checker, step_size, res)
        if idx is None:
            return None
        if np.array_equal(tree.pts[idx], target):
            return idx
    return None


def rrt_connect_plan(query: PlanQuery) -> MotionPlan | None:
    """Bidirectional RRT with the greedy connect heuristic."""
    checker = query.checker
    start, goal = query.start, query.goal
    if not checker(start):
        raise ValueError("start configuration is in collision")
    if not checker(goal):
        raise ValueError("goal configuration is in collision")
    if np.array_equal(start, goal):
        return MotionPlan([start.copy()], iterations=0)
    d = start.shape[0]
    rng = np.random.default_rng(query.seed)
    cap = 2 * query.max_iterations + 4
    tree_a = _Tree(start, cap)
    tree_b = _Tree(goal, cap)
    swapped = False
    res = query.edge_resolution
    for it in range(1, query.max_iterations + 1):
        sample = rng.uniform(-1.0, 1.0, d)
        idx_a = _extend(tree_a, sample, checker, query.step_size, res)
        if idx_a is not None:
            q_new = tree_a.pts[idx_a].copy()
            idx_b = _connect(tree_b, q_new, checker, query.step_size, res)
            if idx_b is not None:
                path_a = tree_a.path(idx_a)
                path_b = tree_b.path(idx_b)
                start_side = path_b if swapped else path_a
                goal_side = path_a if swapped else path_b
                waypoints = start_side + list(reversed(goal_side))[1:]
                return MotionPlan(waypoints, iterations=it)
        tree_a, tree_b = tree_b, tree_a
        swapped = not swapped
    return None


def verify_plan(plan: MotionPlan, oracle: CheckerFn, resolution: float) -> list[int]:
    """Indices of plan edges that fail an oracle-backed edge check.

    An empty list certifies the plan at this resolution.
    """
    wps = plan.waypoints
    invalid = []
    for i in range(len(wps) - 1):
        if not edge_valid(wps[i], wps[i + 1], oracle, resolution):
            invalid.append(i)
    return invalid


def _excision_windows(invalid: list[int], n_waypoints: int) -> list[tuple[int, int]]:
    # one waypoint of margin on each side of an invalid run, clipped at
    # the plan ends; overlapping or touching windows merge
    windows = []
    for i in sorted(invalid):
        s = max(0, i - 1)
        e = min(n_waypoints - 1, i + 2)
        if windows and s <= windows[-1][1]:
            windows[-1] = (windows[-1][0], max(windows[-1][1], e))
        else:
            windows.append((s, e))
    return windows


def repair_plan(
    plan: MotionPlan,
    invalid: list[int],
    oracle: CheckerFn,
    *,
    planner=rrt_connect_plan,
    edge_resolution: float = 0.05,
    step_size: float = 0.2,
    goal_bias: float = 0.05,
    max_iterations: int = 50000,
    seed: int = 0,
) -> MotionPlan | None:
    """Excise invalid segments and bridge them with oracle-checked plans.

    Each window is re-planned between its (oracle-free) end waypoints. If
    any bridge fails, the whole query is re-planned start-to-goal with the
    oracle. The result is re-verified and returned certified, or None.
    """
    if not invalid:
        raise ValueError("repair_plan needs a non-empty invalid edge list")
    wps = plan.waypoints
    windows = _excision_windows(invalid, len(wps))

    def _query(a, b, k):
        return PlanQuery(
            a, b, oracle,
            edge_resolution=edge_resolution,
            step_size=step_size,
            goal_bias=goal_bias,
            max_iterations=max_iterations,
            seed=seed + k,
        )

    new_wps: list[np.ndarray] = []
    cursor = 0
    fallback = False
    for k, (s, e) in enumerate(windows):
        try:
            bridge = planner(_query(wps[s], wps[e], k))
        except ValueError:
            bridge = None  # a window endpoint the oracle rejects
        if bridge is None:
            fallback = True
            break
        new_wps.extend(wps[cursor : s + 1])
        new_wps.extend(bridge.waypoints[1:])
        cursor = e + 1
    if fallback:
        # bridge failed: re-plan the entire query against the oracle
        try:
            full = planner(_query(wps[0], wps[-1], len(windows)))
        except ValueError:
            return None
        if full is None:
            return None
        new_wps = full.waypoints
    else:
        new_wps.extend(wps[cursor:])
    repaired = MotionPlan(new_wps)
    if verify_plan(repaired, oracle, edge_resolution):
        return None  # oracle-checked bridges should never fail re-verification
    repaired.certified = True
    return repaired
