"""Ground-truth collision checking: convex bodies, GJK, forward kinematics.

This is the labeling oracle the proxy model is trained against, and the
baseline the benchmarks time. A label query runs the entire cycle --
joint-limit mapping, forward kinematics, then pairwise convex
intersection tests -- with plain-float tuple arithmetic, because a query
sits on the hot path of every benchmark and per-call numpy overhead
would dominate at this scale.

Chains and workspaces are immutable after construction; labeling is pure
and safe to call concurrently.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Box",
    "Capsule",
    "Workspace",
    "KinematicChain",
    "two_dof_rod",
    "four_dof_rod",
    "gjk_intersect",
    "kcd_label",
    "to_input_space",
    "from_input_space",
    "make_label_fn",
]

Vec3 = tuple[float, float, float]
Rot3 = tuple[Vec3, Vec3, Vec3]

_IDENTITY: Rot3 = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))

# normalized support progress below which GJK declares separation (negative
# side) or falls back to the conservative in-collision answer (band)
_GJK_TOL = 1e-10
_LIMIT_TOL = 1e-9


def rot_z(a: float) -> Rot3:
    c, s = math.cos(a), math.sin(a)
    return ((c, -s, 0.0), (s, c, 0.0), (0.0, 0.0, 1.0))


def rot_y(a: float) -> Rot3:
    c, s = math.cos(a), math.sin(a)
    return ((c, 0.0, s), (0.0, 1.0, 0.0), (-s, 0.0, c))


def rot_mul(a: Rot3, b: Rot3) -> Rot3:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3)
    )  # type: ignore[return-value]


def rot_apply(r: Rot3, v: Vec3) -> Vec3:
    return (
        r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
        r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
        r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
    )


class Box:
    """Oriented box given by center, half-extents and a rotation matrix."""

    __slots__ = ("center", "half", "rot")

    def __init__(self, center, half_extents, rot: Rot3 | None = None):
        cx, cy, cz = center
        hx, hy, hz = half_extents
        if not (hx > 0.0 and hy > 0.0 and hz > 0.0):
            raise ValueError("box half-extents must be positive")
        self.center: Vec3 = (float(cx), float(cy), float(cz))
        self.half: Vec3 = (float(hx), float(hy), float(hz))
        self.rot: Rot3 = _IDENTITY if rot is None else tuple(tuple(map(float, row)) for row in rot)  # type: ignore[assignment]

    def support(self, dx: float, dy: float, dz: float) -> Vec3:
        r0, r1, r2 = self.rot
        # direction in the box frame = R^T d
        lx = r0[0] * dx + r1[0] * dy + r2[0] * dz
        ly = r0[1] * dx + r1[1] * dy + r2[1] * dz
        lz = r0[2] * dx + r1[2] * dy + r2[2] * dz
        hx, hy, hz = self.half
        sx = hx if lx >= 0.0 else -hx
        sy = hy if ly >= 0.0 else -hy
        sz = hz if lz >= 0.0 else -hz
        cx, cy, cz = self.center
        return (
            cx + r0[0] * sx + r0[1] * sy + r0[2] * sz,
            cy + r1[0] * sx + r1[1] * sy + r1[2] * sz,
            cz + r2[0] * sx + r2[1] * sy + r2[2] * sz,
        )

    def centroid(self) -> Vec3:
        return self.center

    def translated(self, v: Vec3) -> "Box":
        c = self.center
        return Box((c[0] + v[0], c[1] + v[1], c[2] + v[2]), self.half, self.rot)


class Capsule:
    """Segment with a radius; degenerates to a sphere when p0 == p1."""

    __slots__ = ("p0", "p1", "radius")

    def __init__(self, p0, p1, radius: float):
        if not radius > 0.0:
            raise ValueError("capsule radius must be positive")
        self.p0: Vec3 = (float(p0[0]), float(p0[1]), float(p0[2]))
        self.p1: Vec3 = (float(p1[0]), float(p1[1]), float(p1[2]))
        self.radius = float(radius)

    def support(self, dx: float, dy: float, dz: float) -> Vec3:
        p0, p1 = self.p0, self.p1
        d0 = p0[0] * dx + p0[1] * dy + p0[2] * dz
        d1 = p1[0] * dx + p1[1] * dy + p1[2] * dz
        p = p0 if d0 >= d1 else p1
        n = math.sqrt(dx * dx + dy * dy + dz * dz)
        if n == 0.0:
            return p
        f = self.radius / n
        return (p[0] + f * dx, p[1] + f * dy, p[2] + f * dz)

    def centroid(self) -> Vec3:
        p0, p1 = self.p0, self.p1
        return ((p0[0] + p1[0]) * 0.5, (p0[1] + p1[1]) * 0.5, (p0[2] + p1[2]) * 0.5)

    def translated(self, v: Vec3) -> "Capsule":
        p0, p1 = self.p0, self.p1
        return Capsule(
            (p0[0] + v[0], p0[1] + v[1], p0[2] + v[2]),
            (p1[0] + v[0], p1[1] + v[1], p1[2] + v[2]),
            self.radius,
        )


# ----------------------------------------------------------------------
# GJK


def _triple(ax, ay, az, bx, by, bz, cx, cy, cz):
    # (a x b) x c = b (c.a) - a (c.b)
    ca = cx * ax + cy * ay + cz * az
    cb = cx * bx + cy * by + cz * bz
    return (bx * ca - ax * cb, by * ca - ay * cb, bz * ca - az * cb)


def _handle_segment(s):
    b, a = s
    abx, aby, abz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    aox, aoy, aoz = -a[0], -a[1], -a[2]
    if abx * aox + aby * aoy + abz * aoz > 0.0:
        return _triple(abx, aby, abz, aox, aoy, aoz, abx, aby, abz)
    s[:] = [a]
    return (aox, aoy, aoz)


def _handle_triangle(s):
    c, b, a = s
    abx, aby, abz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    acx, acy, acz = c[0] - a[0], c[1] - a[1], c[2] - a[2]
    aox, aoy, aoz = -a[0], -a[1], -a[2]
    nx = aby * acz - abz * acy
    ny = abz * acx - abx * acz
    nz = abx * acy - aby * acx
    if nx * nx + ny * ny + nz * nz < 1e-30:
        # degenerate (collinear) triangle: fall back to the newest edge
        s[:] = [b, a]
        return False, _handle_segment(s)
    # outside the AC edge?
    px, py, pz = ny * acz - nz * acy, nz * acx - nx * acz, nx * acy - ny * acx
    if px * aox + py * aoy + pz * aoz > 0.0:
        if acx * aox + acy * aoy + acz * aoz > 0.0:
            s[:] = [c, a]
            return False, _triple(acx, acy, acz, aox, aoy, aoz, acx, acy, acz)
        s[:] = [b, a]
        return False, _handle_segment(s)
    # outside the AB edge?
    qx, qy, qz = aby * nz - abz * ny, abz * nx - abx * nz, abx * ny - aby * nx
    if qx * aox + qy * aoy + qz * aoz > 0.0:
        s[:] = [b, a]
        return False, _handle_segment(s)
    d = nx * aox + ny * aoy + nz * aoz
    if d > 0.0:
        return False, (nx, ny, nz)
    if d < 0.0:
        s[:] = [b, c, a]
        return False, (-nx, -ny, -nz)
    # origin lies in the triangle itself
    return True, (0.0, 0.0, 0.0)


def _handle_tetrahedron(s):
    d_, c, b, a = s
    # test the three faces that contain the newest vertex a; the origin is
    # enclosed iff it is on the inner side of all of them
    for p, q, r in ((b, c, d_), (c, d_, b), (d_, b, c)):
        apx, apy, apz = p[0] - a[0], p[1] - a[1], p[2] - a[2]
        aqx, aqy, aqz = q[0] - a[0], q[1] - a[1], q[2] - a[2]
        nx = apy * aqz - apz * aqy
        ny = apz * aqx - apx * aqz
        nz = apx * aqy - apy * aqx
        # orient the face normal away from the remaining vertex r
        arx, ary, arz = r[0] - a[0], r[1] - a[1], r[2] - a[2]
        if nx * arx + ny * ary + nz * arz > 0.0:
            nx, ny, nz = -nx, -ny, -nz
            p, q = q, p
        if nx * -a[0] + ny * -a[1] + nz * -a[2] > 0.0:
            s[:] = [q, p, a]
            return _handle_triangle(s)
    return True, (0.0, 0.0, 0.0)


def _handle_simplex(s):
    k = len(s)
    if k == 2:
        return False, _handle_segment(s)
    if k == 3:
        return _handle_triangle(s)
    return _handle_tetrahedron(s)


def gjk_intersect(a, b, max_iter: int = 64) -> bool:
    """True iff two convex bodies intersect; touching counts.

    Walks a simplex of Minkowski-difference support points toward the
    origin. Separation is reported only on a certified separating
    direction (normalized support progress below -1e-10); the ambiguous
    terminations -- progress inside the tolerance band, or the iteration
    cap -- return True, the conservative answer for collision checking.
    """
    ca = a.centroid()
    cb = b.centroid()
    dx, dy, dz = ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2]
    if dx * dx + dy * dy + dz * dz < 1e-24:
        dx, dy, dz = 1.0, 0.0, 0.0
    sa = a.support(dx, dy, dz)
    sb = b.support(-dx, -dy, -dz)
    w = (sa[0] - sb[0], sa[1] - sb[1], sa[2] - sb[2])
    simplex = [w]
    dx, dy, dz = -w[0], -w[1], -w[2]
    for _ in range(max_iter):
        dd = dx * dx + dy * dy + dz * dz
        if dd < 1e-24:
            return True  # origin sits on the simplex: contact
        sa = a.support(dx, dy, dz)
        sb = b.support(-dx, -dy, -dz)
        w = (sa[0] - sb[0], sa[1] - sb[1], sa[2] - sb[2])
        progress = (w[0] * dx + w[1] * dy + w[2] * dz) / math.sqrt(dd)
        if progress < -_GJK_TOL:
            return False
        if progress < _GJK_TOL:
            return True
        simplex.append(w)
        hit, (dx, dy, dz) = _handle_simplex(simplex)
        if hit:
            return True
    return True


# ----------------------------------------------------------------------
# kinematics


def _pair_rot(yaw: float, pitch: float) -> Rot3:
    # yaw about world-frame z, then pitch raising the rod toward +z;
    # the rod axis is the rotated +x
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    return (
        (cy * cp, -sy, -cy * sp),
        (sy * cp, cy, -sy * sp),
        (sp, 0.0, cp),
    )


class KinematicChain:
    """Serial chain of yaw-pitch joint pairs, one rod link per pair.

    Every pair contributes a yaw joint limited to (-pi, pi] and a pitch
    joint limited to [0, pi]; the two joints of a pair are co-located at
    the base of their rod. With all joints at zero the chain lies along
    +x. Immutable after construction.
    """

    def __init__(self, rods, link_shape: str = "capsule"):
        rods = [(float(l), float(r)) for l, r in rods]
        if not rods:
            raise ValueError("chain needs at least one rod")
        for l, r in rods:
            if l <= 0.0 or r <= 0.0:
                raise ValueError("rod length and radius must be positive")
        if link_shape not in ("capsule", "box"):
            raise ValueError(f"unknown link shape {link_shape!r}")
        self.rods = tuple(rods)
        self.link_shape = link_shape
        self.dof = 2 * len(rods)
        self.q_lower = np.array([-math.pi, 0.0] * len(rods))
        self.q_upper = np.array([math.pi, math.pi] * len(rods))
        self.reach = sum(l for l, _ in rods)

    def _check_limits(self, q) -> None:
        if len(q) != self.dof:
            raise ValueError(f"expected {self.dof} joint values, got {len(q)}")
        for k in range(self.dof):
            if not (self.q_lower[k] - _LIMIT_TOL <= q[k] <= self.q_upper[k] + _LIMIT_TOL):
                raise ValueError(f"joint {k} value {q[k]} outside limits")

    def forward_kinematics(self, q) -> list:
        """Pose every link in the world frame for joint vector ``q``."""
        self._check_limits(q)
        bodies = []
        rot = _IDENTITY
        bx, by, bz = 0.0, 0.0, 0.0
        for i, (length, radius) in enumerate(self.rods):
            rot = rot_mul(rot, _pair_rot(float(q[2 * i]), float(q[2 * i + 1])))
            ax, ay, az = rot[0][0], rot[1][0], rot[2][0]  # rod axis = R . x_hat
            tx, ty, tz = bx + length * ax, by + length * ay, bz + length * az
            if self.link_shape == "capsule":
                bodies.append(Capsule((bx, by, bz), (tx, ty, tz), radius))
            else:
                mid = ((bx + tx) * 0.5, (by + ty) * 0.5, (bz + tz) * 0.5)
                bodies.append(Box(mid, (length * 0.5 + radius, radius, radius), rot))
            bx, by, bz = tx, ty, tz
        return bodies


def two_dof_rod(length: float = 1.0, radius: float | None = None,
                link_shape: str = "capsule") -> KinematicChain:
    """Single rod with controllable yaw and pitch."""
    r = 0.05 * length if radius is None else radius
    return KinematicChain([(length, r)], link_shape=link_shape)


def four_dof_rod(lengths=(0.5, 0.5), radius: float | None = None,
                 link_shape: str = "capsule") -> KinematicChain:
    """Two yaw-pitch rods concatenated end to end."""
    r = 0.05 * sum(lengths) if radius is None else radius
    return KinematicChain([(l, r) for l in lengths], link_shape=link_shape)


# ----------------------------------------------------------------------
# joint <-> input space


def to_input_space(q, chain: KinematicChain) -> np.ndarray:
    """Map joint values within limits onto [-1, 1]^d."""
    q = np.asarray(q, dtype=np.float64)
    chain._check_limits(q)
    return (2.0 * q - chain.q_upper - chain.q_lower) / (chain.q_upper - chain.q_lower)


def from_input_space(p, chain: KinematicChain) -> np.ndarray:
    """Inverse of :func:`to_input_space`; clips rounding spill at the limits."""
    p = np.asarray(p, dtype=np.float64)
    if len(p) != chain.dof:
        raise ValueError(f"expected {chain.dof} coordinates, got {len(p)}")
    if p.size and np.abs(p).max() > 1.0 + _LIMIT_TOL:
        raise ValueError("input-space point outside [-1, 1]^d")
    q = 0.5 * (p * (chain.q_upper - chain.q_lower) + chain.q_upper + chain.q_lower)
    return np.clip(q, chain.q_lower, chain.q_upper)


# ----------------------------------------------------------------------
# workspace and labeling


class Workspace:
    """Obstacle set, optionally with per-obstacle velocities for motion."""

    def __init__(self, obstacles, velocities=None, bounds=None):
        self.obstacles = tuple(obstacles)
        self.velocities = None if velocities is None else tuple(
            (float(v[0]), float(v[1]), float(v[2])) for v in velocities
        )
        if self.velocities is not None and len(self.velocities) != len(self.obstacles):
            raise ValueError("one velocity per obstacle required")
        self.bounds = bounds or ((-0.9, -0.9, 0.0), (0.9, 0.9, 0.9))

    def stepped(self) -> "Workspace":
        """Advance every obstacle one step, bouncing off the motion bounds."""
        if self.velocities is None:
            return self
        lo, hi = self.bounds
        obstacles = []
        velocities = []
        for body, v in zip(self.obstacles, self.velocities):
            c = body.centroid()
            nc = [c[0] + v[0], c[1] + v[1], c[2] + v[2]]
            nv = list(v)
            for k in range(3):
                if nc[k] < lo[k]:
                    nc[k] = 2.0 * lo[k] - nc[k]
                    nv[k] = -nv[k]
                elif nc[k] > hi[k]:
                    nc[k] = 2.0 * hi[k] - nc[k]
                    nv[k] = -nv[k]
            shift = (nc[0] - c[0], nc[1] - c[1], nc[2] - c[2])
            obstacles.append(body.translated(shift))
            velocities.append(tuple(nv))
        return Workspace(obstacles, velocities, self.bounds)


def kcd_label(chain: KinematicChain, workspace: Workspace, q) -> int:
    """Ground-truth label of a joint configuration: +1 collision, -1 free."""
    bodies = chain.forward_kinematics(q)
    for link in bodies:
        for obs in workspace.obstacles:
            if gjk_intersect(link, obs):
                return 1
    return -1


def make_label_fn(chain: KinematicChain, workspace: Workspace):
    """Input-space labeler running the whole checking cycle per call.

    The mapping arithmetic matches :func:`from_input_space` exactly; it is
    inlined with plain floats because this callable is the timing baseline.
    """
    spans = [(float(u - l), float(u + l)) for l, u in zip(chain.q_lower, chain.q_upper)]
    lowers = [float(l) for l in chain.q_lower]
    uppers = [float(u) for u in chain.q_upper]
    obstacles = workspace.obstacles
    fk = chain.forward_kinematics
    dof = chain.dof

    def label(p) -> int:
        q = [0.0] * dof
        for k in range(dof):
            span, usum = spans[k]
            v = 0.5 * (float(p[k]) * span + usum)
            if v < lowers[k]:
                v = lowers[k]
            elif v > uppers[k]:
                v = uppers[k]
            q[k] = v
        for link in fk(q):
            for obs in obstacles:
                if gjk_intersect(link, obs):
                    return 1
        return -1

    return label
