"""Surrogate networks and (gamma, omega) selection on a grid.

For every grid cell the score is the mean modularity of repeated detection
runs on the observed network minus the mean over detections on surrogate
networks whose per-block weight multisets match the observed ones exactly.
The cell with the largest difference wins; ties go to the smallest gamma,
then the smallest omega.

Every random stream is derived from the master seed through fixed spawn
keys, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .core import MultilayerNetwork
from .modularity import GainBasis, ModularityParams, leiden_maximize

__all__ = ["ParamGrid", "default_grid", "surrogate", "select_params"]


@dataclass(frozen=True)
class ParamGrid:
    """Grid of resolutions and inter-layer scales plus run budgets.

    obs_runs detection runs are averaged on the observed network per cell;
    each of surrogate_count surrogate networks gets surrogate_runs_per_net
    detection runs per cell (all contribute to the surrogate mean).
    swap_count=None means ten times the network's edge count.
    """

    gammas: tuple = field(default_factory=lambda: _default_gammas())
    omegas: tuple = field(default_factory=lambda: _default_omegas())
    obs_runs: int = 100
    surrogate_count: int = 100
    surrogate_runs_per_net: int = 1
    swap_count: int | None = None

    def __post_init__(self):
        if len(self.gammas) == 0 or len(self.omegas) == 0:
            raise ValueError("gamma and omega lists must be nonempty")
        if (self.obs_runs < 1 or self.surrogate_count < 1
                or self.surrogate_runs_per_net < 1):
            raise ValueError("run budgets must be positive")


def _default_gammas():
    return tuple(0.95 + 0.0025 * n for n in range(41))


def _default_omegas():
    return tuple(0.0125 * n for n in range(41))


def default_grid():
    """The default selection grid: 41 resolutions from 0.95 and 41
    inter-layer scales from 0, with 100 observed runs and 100 surrogates."""
    return ParamGrid()


def surrogate(net, swap_count=None, seed=None):
    """Randomized copy of a network preserving per-block weight multisets.

    Each swap picks one block pair (with probability proportional to its
    slot count, as if picking the first edge uniformly) and exchanges the
    weights of two uniformly chosen slots inside it. Intra-layer blocks
    swap upper-triangle slots and mirror; inter-layer blocks swap anywhere
    in the rectangle. Block totals are therefore preserved exactly for
    every block. swap_count=0 returns an identical copy.
    """
    rng = np.random.default_rng(seed)
    blocks = [(h, k) for h in range(net.layer_count)
              for k in range(h, net.layer_count)]
    slot_index = []
    for h, k in blocks:
        nh, nk = net.nodes_per_layer[h], net.nodes_per_layer[k]
        if h == k:
            slot_index.append(np.triu_indices(nh, k=1))
        else:
            grid = np.mgrid[0:nh, 0:nk]
            slot_index.append((grid[0].ravel(), grid[1].ravel()))
    slot_counts = np.array([idx[0].size for idx in slot_index], dtype=np.int64)

    if swap_count is None:
        swap_count = 10 * int(np.count_nonzero(np.triu(net.supra, k=1)))
    swap_count = int(swap_count)
    if swap_count < 0:
        raise ValueError("swap_count must be nonnegative")

    supra = net.supra.copy()
    if swap_count > 0 and slot_counts.sum() > 0:
        probs = slot_counts / slot_counts.sum()
        chosen = rng.choice(len(blocks), size=swap_count, p=probs)
        per_block = np.bincount(chosen, minlength=len(blocks))
        for bi, (h, k) in enumerate(blocks):
            c = int(per_block[bi])
            if c == 0 or slot_counts[bi] < 2:
                continue
            rows, cols = slot_index[bi]
            block = net.block(h, k)
            values = block[rows, cols].copy()
            perm = np.arange(slot_counts[bi])
            pairs = rng.integers(0, slot_counts[bi], size=(c, 2))
            for a, b in pairs:
                perm[a], perm[b] = perm[b], perm[a]
            new_values = values[perm]
            oh, ok = net.offsets[h], net.offsets[k]
            supra[oh + rows, ok + cols] = new_values
            supra[ok + cols, oh + rows] = new_values
    return net.with_supra(supra)


def _cell_seed(entropy, *key):
    return np.random.SeedSequence(entropy=entropy, spawn_key=key)


# Per-process payload for grid evaluation. Populated by fork inheritance
# (or by the pool initializer), never mutated afterwards except for the
# lazily filled surrogate gain-basis cache.
_CTX = {}


def _init_context(payload):
    _CTX.clear()
    _CTX.update(payload)
    _CTX["surr_basis"] = {}


def _surrogate_basis(index):
    cache = _CTX["surr_basis"]
    if index not in cache:
        cache[index] = GainBasis(_CTX["surrogates"][index])
    return cache[index]


def _eval_cell(task):
    gi, oi = task
    gamma = _CTX["gammas"][gi]
    omega = _CTX["omegas"][oi]
    entropy = _CTX["entropy"]
    obs_runs = _CTX["obs_runs"]
    cell = gi * len(_CTX["omegas"]) + oi
    params = ModularityParams(gamma=gamma, omega=omega)
    net = _CTX["net"]
    b_obs = _CTX["basis"].gain(params)
    q_obs = 0.0
    for r in range(obs_runs):
        _, q = leiden_maximize(net, params, _cell_seed(entropy, 1, cell, 0, r),
                               gain=b_obs)
        q_obs += q
    q_obs /= obs_runs
    q_surr = 0.0
    n_surr = len(_CTX["surrogates"])
    runs_per = _CTX["surr_runs"]
    for s in range(n_surr):
        b_s = _surrogate_basis(s).gain(params)
        for r in range(runs_per):
            _, q = leiden_maximize(_CTX["surrogates"][s], params,
                                   _cell_seed(entropy, 1, cell, 1, s, r),
                                   gain=b_s)
            q_surr += q
    q_surr /= n_surr * runs_per
    return gi, oi, q_obs - q_surr


def select_params(net, grid, seed, workers=1):
    """Pick (gamma, omega) maximizing observed minus surrogate modularity.

    Parameters
    ----------
    net : MultilayerNetwork
    grid : ParamGrid
    seed : int
        Master seed; every stream (surrogate construction, observed runs,
        surrogate runs) is a fixed-spawn-key child of it.
    workers : int
        Process count for evaluating grid cells. The result is identical
        for every worker count.

    Returns
    -------
    (float, float, ndarray)
        Selected gamma, selected omega, and the score surface with shape
        (len(gammas), len(omegas)).
    """
    entropy = int(seed)
    surrogates = [surrogate(net, grid.swap_count, _cell_seed(entropy, 0, s))
                  for s in range(grid.surrogate_count)]
    payload = {
        "net": net,
        "basis": GainBasis(net),
        "surrogates": surrogates,
        "gammas": grid.gammas,
        "omegas": grid.omegas,
        "obs_runs": grid.obs_runs,
        "surr_runs": grid.surrogate_runs_per_net,
        "entropy": entropy,
    }
    tasks = [(gi, oi) for gi in range(len(grid.gammas))
             for oi in range(len(grid.omegas))]
    surface = np.empty((len(grid.gammas), len(grid.omegas)))
    if workers > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers, initializer=_init_context,
                      initargs=(payload,)) as pool:
            results = pool.map(_eval_cell, tasks)
    else:
        _init_context(payload)
        results = [_eval_cell(t) for t in tasks]
    for gi, oi, score in results:
        surface[gi, oi] = score
    flat_best = int(np.argmax(surface))
    gi, oi = divmod(flat_best, len(grid.omegas))
    return float(grid.gammas[gi]), float(grid.omegas[oi]), surface
