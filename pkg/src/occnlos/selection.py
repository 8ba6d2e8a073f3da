"""Choosing (laser, camera) pairs by mutual information.

The design objective is the Gaussian mutual information between the chosen
measurements and the reflectivity,

    Phi(P) = 0.5 * logdet(I + A_P cov A_P^T / sigma2),

which is monotone and submodular, so the greedy rule carries the usual
(1 - 1/e) guarantee.

Greedy scoring keeps, for every candidate, its predictive variance ``v_i``
conditioned on the noisy measurements picked so far.  Accepting candidate
``j`` is one step of a pivoted Cholesky factorization of the candidate Gram
matrix ``Q = A cov A^T``::

    w  = (Q[:, j] - sum_k w_k[j] w_k) / sqrt(v_j + sigma2)
    v <- v - w**2

and the marginal gain of candidate ``i`` is ``0.5 * log1p(v_i / sigma2)``.
The gain is increasing in ``v_i``, so candidates are ranked on ``v`` directly.
Ties go to the lowest candidate index.
"""

from __future__ import annotations

import csv
import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .forward import assemble_pairs
from .geometry import Scene
from .priors import GaussianPrior
from .reconstruction.linalg import chol_logdet, spd_factor

MAX_SUBSETS = 1_000_000


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """Grid ``D`` on the illumination wall, candidate index pairs into it and their rows.

    ``pairs[i] = (a, b)`` means laser at ``grid[a]``, camera at ``grid[b]``;
    ``rows[i]`` is the matching time-integrated measurement row.
    """

    grid: np.ndarray
    pairs: np.ndarray
    rows: np.ndarray

    def __post_init__(self):
        grid = np.atleast_2d(np.asarray(self.grid, float))
        pairs = np.asarray(self.pairs, int).reshape(-1, 2)
        rows = np.atleast_2d(np.asarray(self.rows, float))
        if rows.shape[0] != pairs.shape[0]:
            raise ValueError("one row per candidate pair is required")
        if pairs.size and (pairs.min() < 0 or pairs.max() >= grid.shape[0]):
            raise ValueError("candidate indices fall outside the grid")
        if len({tuple(p) for p in pairs.tolist()}) != len(pairs):
            raise ValueError("candidate pairs must be distinct")
        for name, val in (("grid", grid), ("pairs", pairs), ("rows", rows)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    def __len__(self) -> int:
        return self.pairs.shape[0]

    @property
    def points(self) -> np.ndarray:
        """Laser and camera coordinates, shape (C, 2, d)."""
        return np.stack([self.grid[self.pairs[:, 0]], self.grid[self.pairs[:, 1]]], axis=1)

    @classmethod
    def from_scene(cls, scene: Scene, grid=None, diagonal_only: bool = False) -> "CandidateSet":
        """All of ``grid x grid`` in lexicographic (laser, camera) order, or the
        ``laser == camera`` diagonal.  ``grid`` defaults to the illumination-wall patch centers."""
        grid = scene.illumination.patches.centers if grid is None else np.atleast_2d(grid)
        g = grid.shape[0]
        if diagonal_only:
            pairs = np.stack([np.arange(g), np.arange(g)], axis=1)
        else:
            pairs = np.array(list(itertools.product(range(g), repeat=2)))
        rows = np.asarray(assemble_pairs(scene, np.stack([grid[pairs[:, 0]], grid[pairs[:, 1]]], 1)))
        return cls(grid, pairs, rows)


def uniform_grid(scene: Scene, n: int) -> np.ndarray:
    """``n`` midpoints per axis across the illumination wall."""
    wall = scene.illumination
    ticks = [(np.arange(n) + 0.5) * e / n for e in wall.extents]
    mesh = np.meshgrid(*ticks, indexing="ij")
    local = np.stack([m.ravel() for m in mesh], axis=1)
    return wall.origin + local @ wall.axes


@dataclass(frozen=True, eq=False)
class SelectionResult:
    """Selected candidates in pick order and ``Phi`` after each pick."""

    indices: np.ndarray
    pairs: np.ndarray
    points: np.ndarray
    phi: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def value(self) -> float:
        return float(self.phi[-1]) if len(self.phi) else 0.0

    def to_csv(self, path) -> None:
        """Columns: iteration, grid indices of laser and camera, their coordinates
        (``laser_0 .. laser_{d-1}``, likewise ``camera_*``) and Phi after the pick."""
        d = self.points.shape[-1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "laser", "camera"] + [f"laser_{i}" for i in range(d)]
                       + [f"camera_{i}" for i in range(d)] + ["phi"])
            for k, (pair, pt, phi) in enumerate(zip(self.pairs, self.points, self.phi), start=1):
                coords = [format(v, ".17g") for v in np.concatenate([pt[0], pt[1]])]
                w.writerow([k, int(pair[0]), int(pair[1])] + coords + [format(phi, ".17g")])


def _result(cands: CandidateSet, idx, phi) -> SelectionResult:
    idx = np.asarray(idx, int)
    return SelectionResult(idx, cands.pairs[idx], cands.points[idx], np.asarray(phi, float))


def mi_objective(A_P, prior: GaussianPrior, sigma2: float) -> float:
    """Mutual information (nats) between measurements with rows ``A_P`` and ``f``."""
    if not sigma2 > 0:
        raise ValueError("noise variance must be positive")
    A_P = np.asarray(A_P, float).reshape(-1, prior.n)
    if A_P.shape[0] == 0:
        return 0.0
    K = np.eye(A_P.shape[0]) + (A_P @ prior.cov @ A_P.T) / sigma2
    return 0.5 * chol_logdet(spd_factor(K))


def _gram(cands: CandidateSet, prior: GaussianPrior) -> np.ndarray:
    R = cands.rows
    Q = R @ prior.cov @ R.T
    return 0.5 * (Q + Q.T)


class _Conditioner:
    """Pivoted-Cholesky bookkeeping shared by the eager and lazy greedy loops.

    Each candidate's column of the factor is filled in only as far as needed
    (``done[i]`` steps), always with the same scalar recurrence, so both loops
    see bit-identical variances.
    """

    def __init__(self, Q: np.ndarray, sigma2: float, budget: int):
        self.Q = Q
        self.sigma2 = sigma2
        self.W = np.zeros((budget, Q.shape[0]))
        self.v = np.diag(Q).copy()
        self.done = np.zeros(Q.shape[0], int)
        self.picked: list[int] = []
        self.scale: list[float] = []

    def refresh(self, idx) -> None:
        """Bring columns ``idx`` up to date with every accepted pick."""
        idx = np.atleast_1d(idx)
        for k, j in enumerate(self.picked):
            sel = idx[self.done[idx] == k]
            if sel.size == 0:
                continue
            acc = self.Q[j, sel].copy()
            for m in range(k):
                acc -= self.W[m, j] * self.W[m, sel]
            w = acc / self.scale[k]
            self.W[k, sel] = w
            self.v[sel] = self.v[sel] - w * w
            self.done[sel] = k + 1

    def accept(self, j: int) -> float:
        self.refresh(j)
        vj = self.v[j]
        gain = 0.5 * math.log1p(max(vj, 0.0) / self.sigma2)
        self.picked.append(j)
        self.scale.append(math.sqrt(max(vj, 0.0) + self.sigma2))
        return gain


def greedy_select(cands: CandidateSet, K: int, prior: GaussianPrior, sigma2: float,
                  lazy: bool = False) -> SelectionResult:
    """Greedy maximization of ``Phi`` over at most ``K`` distinct candidates.

    ``lazy=True`` uses a priority queue of stale variances (valid upper bounds,
    since conditioning only lowers them) and returns the same picks.
    """
    if K < 1:
        raise ValueError("budget must be at least 1")
    if len(cands) == 0:
        raise ValueError("no candidates to choose from")
    if not sigma2 > 0:
        raise ValueError("noise variance must be positive")
    K = min(K, len(cands))
    cond = _Conditioner(_gram(cands, prior), sigma2, K)
    picks, phi, total = [], [], 0.0
    if lazy:
        heap = [(-v, i) for i, v in enumerate(cond.v)]
        heapq.heapify(heap)
    available = np.ones(len(cands), bool)
    for step in range(K):
        if lazy:
            while True:
                neg, i = heapq.heappop(heap)
                if cond.done[i] == step:
                    j = i
                    break
                cond.refresh(i)
                heapq.heappush(heap, (-cond.v[i], i))
        else:
            cond.refresh(np.flatnonzero(available))
            scores = np.where(available, cond.v, -np.inf)
            j = int(np.argmax(scores))
        available[j] = False
        total += cond.accept(j)
        picks.append(j)
        phi.append(total)
    return _result(cands, picks, phi)


def _prefix_phi(cands: CandidateSet, idx, prior: GaussianPrior, sigma2: float) -> list[float]:
    return [mi_objective(cands.rows[list(idx[:k])], prior, sigma2) for k in range(1, len(idx) + 1)]


def exhaustive_select(cands: CandidateSet, K: int, prior: GaussianPrior, sigma2: float,
                      max_subsets: int = MAX_SUBSETS) -> SelectionResult:
    """Best size-``K`` subset by enumeration (ties: lexicographically first subset)."""
    n = len(cands)
    if not 1 <= K <= n:
        raise ValueError(f"budget must lie in [1, {n}]")
    count = math.comb(n, K)
    if count > max_subsets:
        raise ValueError(f"{count} subsets exceed the enumeration limit of {max_subsets}")
    if not sigma2 > 0:
        raise ValueError("noise variance must be positive")
    Q = _gram(cands, prior) / sigma2
    best, best_val = None, -np.inf
    for sub in itertools.combinations(range(n), K):
        s = list(sub)
        val = 0.5 * chol_logdet(spd_factor(np.eye(K) + Q[np.ix_(s, s)]))
        if val > best_val:
            best, best_val = s, val
    return _result(cands, best, _prefix_phi(cands, best, prior, sigma2))


def random_select(cands: CandidateSet, K: int, prior: GaussianPrior, sigma2: float,
                  seed) -> SelectionResult:
    """``K`` candidates drawn uniformly without replacement."""
    K = min(K, len(cands))
    idx = np.random.default_rng(seed).permutation(len(cands))[:K]
    return _result(cands, idx, _prefix_phi(cands, idx, prior, sigma2))
