"""Proxy collision model trained by greedy coordinate descent.

The model holds a dataset of normalized configurations with labels
+1 (in collision) / -1 (free) and fits a kernel expansion
``f(x) = sum_i alpha_i k(X_i, x)`` whose sign reproduces every training
label. Training repeatedly corrects the point with the worst margin
``y_i f(X_i)``: the correction sets that margin to exactly ``b_i``, where
``b_i = beta`` for in-collision points and 1 for free points. A bias
``beta > 1`` pads obstacle regions, trading false positives (cheap) for
false negatives (dangerous). Once every margin is positive, redundant
support points -- those the rest of the expansion already classifies
correctly -- are shed one at a time to keep the model sparse.

Each step touches a single Gram column, so the matrix is evaluated
lazily; in a changing environment, weights, hypothesis values and the
partially filled matrix are all carried over between updates instead of
retraining from scratch.

A model is single-writer. A trained model may be shared read-only across
threads for predict/hypothesis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import LazyGramMatrix

__all__ = ["DuplicatePointError", "TrainParams", "TrainReport", "FastronModel"]


class DuplicatePointError(ValueError):
    """A dataset would contain two bitwise-identical configurations."""


@dataclass
class TrainParams:
    """Hyperparameters of the learner.

    ``seed`` is bookkeeping only: training itself is deterministic.
    """

    gamma: float = 30.0
    beta: float = 1.0
    iter_max: int = 5000
    s_max: int = 1500
    seed: int = 0

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.beta < 1.0:
            raise ValueError("beta must be >= 1")
        if self.iter_max < 1:
            raise ValueError("iter_max must be >= 1")
        if self.s_max < 1:
            raise ValueError("s_max must be >= 1")


@dataclass
class TrainReport:
    """Instrumentation returned by a training run."""

    iterations_used: int = 0
    corrections: int = 0
    removals: int = 0
    final_misclassified: int = 0
    reverted: bool = False
    cap_blocked: bool = False
    loss_trace: list[float] | None = None
    step_kinds: list[str] | None = None


class FastronModel:
    """Dataset, weights and hypothesis vector of the proxy checker."""

    def __init__(self, params: TrainParams, dim: int | None = None, capacity: int = 0):
        self.params = params
        self.dim = dim
        self.X = np.zeros((0, dim if dim else 0), dtype=np.float64)
        self.y = np.zeros(0, dtype=np.float64)
        self.alpha = np.zeros(0, dtype=np.float64)
        self.F = np.zeros(0, dtype=np.float64)
        self.gram = LazyGramMatrix(params.gamma, capacity=capacity)
        self._sv: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def support_count(self) -> int:
        return int(np.count_nonzero(self.alpha))

    # ------------------------------------------------------------------
    # dataset management

    def _validate_points(self, X: np.ndarray) -> None:
        if X.ndim != 2:
            raise ValueError("points must be a 2-D array")
        if self.dim is not None and X.shape[0] and X.shape[1] != self.dim:
            raise ValueError(f"dimension mismatch: expected {self.dim}, got {X.shape[1]}")
        if X.size and np.abs(X).max() > 1.0:
            raise ValueError("coordinates must lie in [-1, 1]")

    @staticmethod
    def _validate_labels(y: np.ndarray, n: int) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64).reshape(-1).copy()
        if y.shape[0] != n:
            raise ValueError(f"expected {n} labels, got {y.shape[0]}")
        if y.size and not np.all(np.abs(y) == 1.0):
            raise ValueError("labels must be +1 or -1")
        return y

    def set_data(self, X, y) -> None:
        """Replace the dataset; weights and hypothesis are zeroed.

        Points must be pairwise distinct under exact comparison -- the
        positive-definiteness of the Gram matrix rides on it.
        """
        X = np.array(X, dtype=np.float64)
        self._validate_points(X)
        n = X.shape[0]
        y = self._validate_labels(y, n)
        if n and np.unique(X, axis=0).shape[0] != n:
            raise DuplicatePointError("dataset contains identical configurations")
        self.X = X
        self.y = y
        self.alpha = np.zeros(n, dtype=np.float64)
        self.F = np.zeros(n, dtype=np.float64)
        if n:
            self.dim = X.shape[1]
        self.gram.reset(n)
        self._sv = None

    def set_labels(self, y) -> None:
        """Overwrite labels in place, keeping weights and hypothesis.

        This is the relabeling step of the update pipeline: after the
        workspace changes, the oracle re-labels every retained point and
        training adapts the carried-over weights. Flipped labels may
        leave ``y_i * alpha_i < 0`` until training touches point i.
        """
        self.y = self._validate_labels(y, self.n)

    def append_points(self, A, y_A) -> None:
        """Add new points to a sparsified model.

        Partially filled Gram columns are completed first, then the
        hypothesis values of the new points are read off directly from
        the retained support weights. Existing entries are untouched.
        """
        A = np.array(A, dtype=np.float64)
        self._validate_points(A)
        y_A = self._validate_labels(y_A, A.shape[0])
        if A.shape[0] == 0:
            return
        if self.n and np.any(self.alpha == 0.0):
            raise ValueError("model must be sparsified before appending points")
        combined = np.vstack([self.X, A]) if self.n else A
        if np.unique(combined, axis=0).shape[0] != combined.shape[0]:
            raise DuplicatePointError("appended points collide with retained set")
        n_old = self.n
        self.gram.complete_and_extend(self.X, A)
        if n_old:
            F_new = self.gram.matrix[n_old:, :n_old] @ self.alpha
        else:
            F_new = np.zeros(A.shape[0], dtype=np.float64)
        self.X = combined
        self.y = np.concatenate([self.y, y_A])
        self.alpha = np.concatenate([self.alpha, np.zeros(A.shape[0])])
        self.F = np.concatenate([self.F, F_new])
        self.dim = self.X.shape[1]
        self._sv = None

    def sparsify(self) -> int:
        """Drop every zero-weight point; returns how many were discarded.

        Zero-weight terms contribute exactly nothing to the expansion, so
        hypothesis values at any query are bitwise unchanged.
        """
        keep = np.flatnonzero(self.alpha != 0.0)
        dropped = self.n - keep.size
        if dropped == 0:
            return 0
        self.X = self.X[keep]
        self.y = self.y[keep]
        self.alpha = self.alpha[keep]
        self.F = self.F[keep]
        self.gram.compact(keep)
        self._sv = None
        return dropped

    # ------------------------------------------------------------------
    # training

    def _target_vector(self) -> np.ndarray:
        # b_i y_i with b_i = beta for in-collision targets, 1 for free
        return np.where(self.y > 0.0, self.params.beta, 1.0) * self.y

    def _trace_loss(self, by: np.ndarray) -> float:
        # 1/2 a'Ka - (By)'a, using the maintained hypothesis F = Ka
        return 0.5 * float(self.alpha @ self.F) - float(by @ self.alpha)

    def _removal_step(self) -> bool:
        """Remove the support point with the largest resultant margin.

        The resultant margin y_i(F_i - alpha_i) is what the margin at i
        would become without i's own weight; only strictly positive
        values qualify (the point must stay correctly classified after
        removal). Ties go to the lowest index. Returns whether a removal
        happened.
        """
        resultant = self.y * (self.F - self.alpha)
        resultant[self.alpha == 0.0] = -np.inf
        j = int(np.argmax(resultant))
        if not resultant[j] > 0.0:
            return False
        col = self.gram.ensure_column(self.X, j)
        self.F -= self.alpha[j] * col
        self.alpha[j] = 0.0
        return True

    def remove_redundant(self) -> bool:
        """One removal attempt; meaningful once all margins are positive."""
        removed = self._removal_step()
        if removed:
            self._sv = None
        return removed

    def train(self, record_loss: bool = False) -> TrainReport:
        """Run the update loop until positive margins, the support cap, or iter_max.

        Each pass either corrects the worst-margin point (when some
        margin is <= 0), removes one redundant support point (when all
        margins are positive, after snapshotting the state), or stops.
        When the support cap blocks adding the worst point, one removal
        is attempted before retrying; if nothing can be removed, training
        terminates. If the final state misclassifies more points than the
        last snapshot, the snapshot is restored.
        """
        p = self.params
        report = TrainReport()
        if record_loss:
            report.loss_trace = []
            report.step_kinds = []
        n = self.n
        if n == 0:
            return report
        X, y, alpha, F = self.X, self.y, self.alpha, self.F
        gram = self.gram
        by = self._target_vector()
        alpha_before = alpha.copy()
        F_before = F.copy()
        if record_loss:
            report.loss_trace.append(self._trace_loss(by))
        for _ in range(p.iter_max):
            report.iterations_used += 1
            yF = y * F
            i = int(np.argmin(yF))  # ties resolve to the lowest index
            blocked = False
            if yF[i] <= 0.0:
                col = gram.ensure_column(X, i)
                if alpha[i] != 0.0 or np.count_nonzero(alpha) < p.s_max:
                    delta = by[i] - F[i]
                    alpha[i] += delta
                    F += delta * col
                    report.corrections += 1
                    if record_loss:
                        report.loss_trace.append(self._trace_loss(by))
                        report.step_kinds.append("correction")
                    continue
                blocked = True
            # All margins positive, or the cap blocks the needed addition:
            # snapshot, then try to shed one redundant support point.
            alpha_before[:] = alpha
            F_before[:] = F
            if self._removal_step():
                report.removals += 1
                if record_loss:
                    report.loss_trace.append(self._trace_loss(by))
                    report.step_kinds.append("removal")
                continue
            report.cap_blocked = blocked
            break
        if int(np.sum(y * F_before <= 0.0)) < int(np.sum(y * F <= 0.0)):
            alpha[:] = alpha_before
            F[:] = F_before
            report.reverted = True
        report.final_misclassified = int(np.sum(y * F <= 0.0))
        self._sv = None
        return report

    # ------------------------------------------------------------------
    # prediction

    def _support(self):
        # cached query-path arrays: with c0_i = 1 + gamma/2 * |x_i|^2 and
        # G = -gamma * Xs, a query needs one matrix-vector product and a
        # few in-place vector ops:
        # t_i = 1 + gamma/2 * |x_i - q|^2 = c0_i + (G q)_i + gamma/2 * |q|^2
        sv = self._sv
        if sv is None:
            mask = self.alpha != 0.0
            Xs = np.ascontiguousarray(self.X[mask])
            a = self.alpha[mask]
            gamma = self.params.gamma
            c0 = 1.0 + 0.5 * gamma * np.einsum("ij,ij->i", Xs, Xs)
            sv = self._sv = (Xs, a, c0, -gamma * Xs, 0.5 * gamma)
        return sv

    def hypothesis(self, q) -> float:
        """Raw score ``sum_{i in S} alpha_i k(X_i, q)``.

        Summed over the support set only, so sparsify never changes it.
        This is the query hot path; it stays allocation-light.
        """
        Xs, a, c0, G, half_gamma = self._support()
        if a.size == 0:
            return 0.0
        if not isinstance(q, np.ndarray) or q.dtype != np.float64:
            q = np.asarray(q, dtype=np.float64)
        if q.ndim != 1 or q.shape[0] != Xs.shape[1]:
            raise ValueError(f"dimension mismatch: expected {Xs.shape[1]}, got {q.shape}")
        t = G @ q
        t += c0
        t += half_gamma * float(q @ q)
        t *= t
        np.divide(a, t, out=t)
        return float(np.add.reduce(t))

    def predict(self, q) -> int:
        """Proxy collision label: +1 in collision, -1 free.

        A zero score (including the empty model) counts as in-collision;
        the conservative answer costs a detour, not a crash.
        """
        return -1 if self.hypothesis(q) < 0.0 else 1

    def hypothesis_batch(self, Q, block: int = 1024) -> np.ndarray:
        """Scores for many queries at once (direct-difference kernel form)."""
        Q = np.asarray(Q, dtype=np.float64)
        out = np.zeros(Q.shape[0], dtype=np.float64)
        Xs, a = self._support()[:2]
        if a.size == 0:
            return out
        gamma = self.params.gamma
        for s in range(0, Q.shape[0], block):
            chunk = Q[s : s + block]
            diff = chunk[:, None, :] - Xs[None, :, :]
            t = 1.0 + 0.5 * gamma * (diff * diff).sum(axis=2)
            out[s : s + chunk.shape[0]] = (1.0 / (t * t)) @ a
        return out

    def predict_batch(self, Q, block: int = 1024) -> np.ndarray:
        f = self.hypothesis_batch(Q, block=block)
        return np.where(f < 0.0, -1, 1)

    # ------------------------------------------------------------------
    # diagnostics

    def loss(self) -> float:
        """Modified loss ``1/2 a'Ka - y'B a``, evaluated from a full Gram fill.

        Test instrumentation; reduces to the plain perceptron loss at
        beta = 1.
        """
        K = self.gram.full(self.X)
        by = self._target_vector()
        a = self.alpha
        return float(0.5 * (a @ (K @ a)) - by @ a)

    def margins(self) -> np.ndarray:
        return self.y * self.F

    # ------------------------------------------------------------------
    # serialization

    def save(self, path) -> None:
        """Write the support set in the ``fastron v1`` text format.

        Floats are written with repr, which round-trips exactly, so a
        loaded model predicts identically on any query.
        """
        mask = self.alpha != 0.0
        Xs = self.X[mask]
        ys = self.y[mask]
        a = self.alpha[mask]
        p = self.params
        lines = [f"fastron v1 d={self.dim or Xs.shape[1]} n={Xs.shape[0]} "
                 f"gamma={float(p.gamma)!r} beta={float(p.beta)!r}"]
        for row, label, w in zip(Xs, ys, a):
            coords = " ".join(repr(float(c)) for c in row)
            lines.append(f"{coords} {float(label)!r} {float(w)!r}")
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "FastronModel":
        with open(path, "r", encoding="ascii") as fh:
            lines = [ln for ln in (l.strip() for l in fh) if ln]
        if not lines:
            raise ValueError(f"{path}: empty model file")
        head = lines[0].split()
        if len(head) != 6 or head[0] != "fastron" or head[1] != "v1":
            raise ValueError(f"{path}: not a fastron v1 model file")
        fields = dict(tok.split("=", 1) for tok in head[2:])
        d = int(fields["d"])
        ns = int(fields["n"])
        params = TrainParams(gamma=float(fields["gamma"]), beta=float(fields["beta"]))
        if len(lines) - 1 != ns:
            raise ValueError(f"{path}: expected {ns} support points, found {len(lines) - 1}")
        X = np.zeros((ns, d), dtype=np.float64)
        y = np.zeros(ns, dtype=np.float64)
        alpha = np.zeros(ns, dtype=np.float64)
        for k, ln in enumerate(lines[1:]):
            vals = [float(tok) for tok in ln.split()]
            if len(vals) != d + 2:
                raise ValueError(f"{path}: line {k + 2} has {len(vals)} fields, expected {d + 2}")
            X[k] = vals[:d]
            y[k] = vals[d]
            alpha[k] = vals[d + 1]
        model = cls(params, dim=d)
        model.set_data(X, y)
        model.alpha = alpha
        if ns:
            K = model.gram.full(model.X)
            model.F = K @ alpha
        model._sv = None
        return model
