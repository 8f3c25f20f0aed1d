"""Seeded scenario generation: robots, obstacle layouts, start/goal pairs."""

from __future__ import annotations

import math

import numpy as np

from ..geometry import Box, KinematicChain, Workspace, from_input_space
from .config import ScenarioConfig

__all__ = ["build_chain", "build_workspace", "random_start_goal", "gap_obstacles"]


def build_chain(cfg: ScenarioConfig) -> KinematicChain:
    r = cfg.robot
    if r.type == "dof2":
        rods = [(1.0, 0.05)]
    elif r.type == "dof4":
        rods = [(0.5, 0.05), (0.5, 0.05)]
    else:
        rods = [(l, rad) for l, rad in r.rods]
    return KinematicChain(rods, link_shape=r.link_shape)


def _explicit_body(spec: dict) -> Box:
    center = spec["center"]
    if "half_extents" in spec:
        half = spec["half_extents"]
    else:
        half = [spec["size"] / 2.0] * 3
    rot = spec.get("rotation")
    return Box(center, half, rot)


def _link_axis(link) -> tuple[tuple, tuple]:
    if hasattr(link, "p0"):
        return link.p0, link.p1
    c, h, r = link.center, link.half, link.rot  # box link: axis along local x
    ax = (r[0][0] * h[0], r[1][0] * h[0], r[2][0] * h[0])
    return (c[0] - ax[0], c[1] - ax[1], c[2] - ax[2]), (c[0] + ax[0], c[1] + ax[1], c[2] + ax[2])


def _random_obstacle(rng: np.random.Generator, chain: KinematicChain, cfg: ScenarioConfig) -> Box:
    # anchor the cube near a random point on the arm so every obstacle
    # actually carves out some in-collision region of the C-space
    ob = cfg.obstacles
    p = rng.uniform(-1.0, 1.0, chain.dof)
    q = from_input_space(p, chain)
    bodies = chain.forward_kinematics(q)
    link = bodies[rng.integers(0, len(bodies))]
    t = rng.uniform(0.0, 1.0)
    p0, p1 = _link_axis(link)
    anchor = np.array([p0[k] + t * (p1[k] - p0[k]) for k in range(3)])
    scale = rng.uniform(*ob.placement_radius)
    norm = float(np.linalg.norm(anchor))
    if norm > 1e-9:
        anchor = anchor * (scale * chain.reach / max(norm, 1e-9))
    anchor = anchor + rng.normal(0.0, 0.05, 3)
    anchor[2] = max(anchor[2], 0.02)  # the rods only reach the upper half-space
    side = rng.uniform(*ob.size_range)
    return Box(tuple(anchor), (side / 2.0, side / 2.0, side / 2.0))


def build_workspace(cfg: ScenarioConfig, rng: np.random.Generator,
                    chain: KinematicChain) -> Workspace:
    ob = cfg.obstacles
    if ob.explicit is not None:
        obstacles = [_explicit_body(spec) for spec in ob.explicit]
    else:
        count = int(rng.integers(1, ob.count + 1)) if ob.randomize_count else ob.count
        obstacles = [_random_obstacle(rng, chain, cfg) for _ in range(count)]
    velocities = None
    if ob.motion_steps > 0:
        velocities = []
        for _ in obstacles:
            v = rng.normal(0.0, 1.0, 3)
            v /= max(float(np.linalg.norm(v)), 1e-9)
            velocities.append(tuple(v * ob.motion_speed))
    reach = chain.reach
    bounds = ((-0.95 * reach, -0.95 * reach, 0.0), (0.95 * reach, 0.95 * reach, 0.95 * reach))
    return Workspace(obstacles, velocities, bounds)


def gap_obstacles(radius: float = 0.55, side: float = 0.30, slots: int = 7,
                  gap_slot: int = 3) -> list[dict]:
    """Arc of cubes across the yaw=0 half-plane with one slot left open.

    The missing slot sits at the vertical, so crossing from negative to
    positive yaw forces the rod through a narrow near-vertical passage;
    in C-space this is a wall with a small gap.
    """
    specs = []
    for k in range(slots):
        if k == gap_slot:
            continue
        theta = (k + 0.5) * math.pi / slots
        center = (radius * math.cos(theta), 0.0, radius * math.sin(theta))
        specs.append({"center": list(center), "size": side})
    return specs


def random_start_goal(
    rng: np.random.Generator,
    checkers,
    dim: int,
    min_dist: float,
    max_tries: int = 10000,
) -> tuple[np.ndarray, np.ndarray] | None:
    """Draw a start/goal pair free under every checker, on opposite sides.

    "Opposite sides" means the first coordinate changes sign, so the arm
    has to cross the workspace rather than wiggle in place.
    """
    for _ in range(max_tries):
        s = rng.uniform(-1.0, 1.0, dim)
        g = rng.uniform(-1.0, 1.0, dim)
        if s[0] * g[0] >= 0.0:
            continue
        if float(np.linalg.norm(s - g)) < min_dist:
            continue
        if all(chk(s) and chk(g) for chk in checkers):
            return s, g
    return None
