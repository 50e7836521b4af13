"""Group-level community structure from per-subject detection runs.

Repeated detection runs per subject are summarised as co-clustering
matrices (how often two nodes land in the same community), and the
stack of subject matrices is clustered jointly with a multiview
spectral method so that one partition describes the whole group.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import MultilayerNetwork, Partition, ValidationError
from .modularity import ModularityParams, leiden_maximize


@dataclass(frozen=True)
class CoClusteringMatrix:
    """Pairwise same-community counts accumulated over detection runs.

    counts[i, j] is the number of runs that placed nodes i and j in the
    same community; the diagonal therefore equals run_count everywhere.
    """

    counts: np.ndarray
    run_count: int

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValidationError("co-clustering counts must be square")
        if self.run_count < 1:
            raise ValidationError("run_count must be at least 1")
        if not np.array_equal(counts, counts.T):
            raise ValidationError("co-clustering counts must be symmetric")
        if counts.min() < 0 or counts.max() > self.run_count:
            raise ValidationError(
                "co-clustering counts must lie in [0, run_count]")
        if not np.array_equal(np.diag(counts), np.full(len(counts), self.run_count)):
            raise ValidationError(
                "co-clustering diagonal must equal run_count")
        object.__setattr__(self, "counts", counts)

    @property
    def n_nodes(self):
        return self.counts.shape[0]

    def frequencies(self):
        """Counts normalised to [0, 1] agreement frequencies."""
        return self.counts / float(self.run_count)

    def as_adjacency(self):
        """Agreement frequencies as a weighted graph (zero diagonal)."""
        adj = self.frequencies()
        np.fill_diagonal(adj, 0.0)
        return adj


def co_clustering(partitions):
    """Accumulate a CoClusteringMatrix from a sequence of partitions.

    All partitions must label the same node set (same length).
    """
    parts = list(partitions)
    if not parts:
        raise ValidationError("co_clustering needs at least one partition")
    n = parts[0].assignment.shape[0]
    counts = np.zeros((n, n), dtype=np.int64)
    for p in parts:
        labels = p.assignment
        if len(labels) != n:
            raise ValidationError(
                "partition sizes disagree: %d vs %d" % (len(labels), n))
        onehot = np.zeros((n, int(labels.max()) + 1))
        onehot[np.arange(n), labels] = 1.0
        counts += (onehot @ onehot.T).astype(np.int64)
    return CoClusteringMatrix(counts, len(parts))


@dataclass(frozen=True)
class MultiviewGraph:
    """A stack of same-sized weighted adjacency views plus the coupling
    strength used when merging their spectral embeddings."""

    layers: tuple = field(default_factory=tuple)
    alpha: float = 0.5

    def __post_init__(self):
        layers = tuple(np.asarray(a, dtype=np.float64) for a in self.layers)
        if not layers:
            raise ValidationError("multiview graph needs at least one view")
        n = layers[0].shape[0]
        for idx, a in enumerate(layers):
            if a.ndim != 2 or a.shape != (n, n):
                raise ValidationError("view %d is not %dx%d" % (idx, n, n))
            if not np.allclose(a, a.T, atol=1e-12, rtol=0.0):
                raise ValidationError("view %d is not symmetric" % idx)
            if np.any(a < 0):
                raise ValidationError("view %d has negative weights" % idx)
        if not 0.0 <= self.alpha:
            raise ValidationError("alpha must be non-negative")
        object.__setattr__(self, "layers", layers)

    @property
    def n_nodes(self):
        return self.layers[0].shape[0]


def _sym_laplacian(adjacency):
    # d + eps guards isolated nodes; the eps row/col of L is ~zero anyway.
    d = adjacency.sum(axis=1)
    dinv = 1.0 / np.sqrt(d + 1e-12)
    lap = np.diag(d) - adjacency
    return dinv[:, None] * lap * dinv[None, :]


def _smallest_eigvecs(matrix, k):
    sym = 0.5 * (matrix + matrix.T)
    _, vecs = np.linalg.eigh(sym)
    return vecs[:, :k]


def _kmeans(points, k, rng, restarts=50, max_iter=300):
    """Plain Lloyd k-means with k-means++ seeding, best of `restarts`."""
    n = points.shape[0]
    if k > n:
        raise ValidationError("cannot make %d clusters from %d points" % (k, n))
    best_labels = None
    best_inertia = np.inf
    for _ in range(restarts):
        centers = _kmeanspp(points, k, rng)
        labels = np.zeros(n, dtype=np.int64)
        for _ in range(max_iter):
            d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = d2.argmin(axis=1)
            for c in range(k):
                members = new_labels == c
                if members.any():
                    centers[c] = points[members].mean(axis=0)
                else:
                    # Reseed a dead cluster at the farthest point.
                    far = d2.min(axis=1).argmax()
                    centers[c] = points[far]
                    new_labels[far] = c
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        inertia = d2[np.arange(n), labels].sum()
        if inertia < best_inertia:
            best_inertia = inertia
            best_labels = labels.copy()
    return best_labels


def _kmeanspp(points, k, rng):
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            centers[c] = points[rng.integers(n)]
        else:
            centers[c] = points[rng.choice(n, p=closest / total)]
        closest = np.minimum(closest, ((points - centers[c]) ** 2).sum(axis=1))
    return centers


def scml(graph, n_communities, seed=None):
    """Spectral clustering of a multiview graph.

    Each view contributes its symmetric normalised Laplacian minus a
    projector onto its own K leading (smallest-eigenvalue) subspace,
    scaled by alpha. Nodes are embedded in the K smallest eigenvectors
    of the summed modified Laplacian and clustered with k-means.
    """
    if n_communities < 2:
        raise ValidationError("n_communities must be at least 2")
    if n_communities > graph.n_nodes:
        raise ValidationError("more communities than nodes requested")
    l_mod = np.zeros((graph.n_nodes, graph.n_nodes))
    for adjacency in graph.layers:
        lap = _sym_laplacian(adjacency)
        u = _smallest_eigvecs(lap, n_communities)
        l_mod += lap - graph.alpha * (u @ u.T)
    embedding = _smallest_eigvecs(l_mod, n_communities)
    rng = np.random.default_rng(seed)
    labels = _kmeans(embedding, n_communities, rng)
    return Partition(labels)


def mean_community_count(counts):
    """Default K policy: mean detected community count, rounded half-up."""
    return int(np.floor(np.mean(counts) + 0.5))


def subject_coclusters(subject_nets, subject_params, seed=0, runs=100):
    """Repeated detection per subject, summarised as co-clustering matrices.

    Subject s, run r draws its seed from spawn key (s, r) of the root
    seed, so results do not depend on iteration interleaving.

    Returns (coclusters, mean_counts): per-subject CoClusteringMatrix
    and per-subject mean detected community count, in subject order.
    """
    nets = list(subject_nets)
    if not nets:
        raise ValidationError("need at least one subject")
    if isinstance(subject_params, ModularityParams):
        params = [subject_params] * len(nets)
    else:
        params = list(subject_params)
        if len(params) != len(nets):
            raise ValidationError(
                "expected %d parameter sets, got %d" % (len(nets), len(params)))
    n = nets[0].total_nodes
    for idx, net in enumerate(nets):
        if net.total_nodes != n:
            raise ValidationError(
                "subject %d has %d supra-nodes, expected %d"
                % (idx, net.total_nodes, n))
    if runs < 1:
        raise ValidationError("runs must be at least 1")

    coclusters = []
    mean_counts = []
    for s, (net, par) in enumerate(zip(nets, params)):
        partitions = []
        for r in range(runs):
            ss = np.random.SeedSequence(entropy=seed, spawn_key=(s, r))
            part, _ = leiden_maximize(net, par, seed=ss)
            partitions.append(part)
        coclusters.append(co_clustering(partitions))
        mean_counts.append(float(np.mean(
            [p.community_count for p in partitions])))
    return coclusters, mean_counts


def group_structure(subject_nets, subject_params, k_policy=None, seed=0,
                    runs=100, alpha=0.5):
    """Group-level partition from per-subject repeated detection.

    Runs modularity maximisation `runs` times per subject, stacks the
    per-subject co-clustering frequency graphs into a multiview graph,
    and clusters it with scml.

    Parameters
    ----------
    subject_nets : sequence of MultilayerNetwork
    subject_params : ModularityParams or sequence of them, one per subject
    k_policy : None, int, or callable
        None picks the mean detected community count rounded half-up;
        an int fixes K; a callable receives the per-subject mean counts
        and returns K. The result is clamped to [2, N].
    seed : int
        Root seed for both the detection runs and the clustering step.
    """
    coclusters, mean_counts = subject_coclusters(
        subject_nets, subject_params, seed=seed, runs=runs)
    if k_policy is None:
        k = mean_community_count(mean_counts)
    elif callable(k_policy):
        k = int(k_policy(mean_counts))
    else:
        k = int(k_policy)
    n = coclusters[0].n_nodes
    k = min(max(k, 2), n)
    graph = MultiviewGraph(
        tuple(cc.as_adjacency() for cc in coclusters), alpha=alpha)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(len(coclusters), 0, 1))
    return scml(graph, k, seed=ss)
