"""Partition similarity measures and a spectral distance between graphs.

NMI uses arithmetic-mean entropy normalization, VI is reported in bits,
and ARI is the permutation-model pair-counting index. The graph distance
is the square root of the Jensen-Shannon divergence between
trace-normalized combinatorial Laplacians treated as density matrices.
"""

from __future__ import annotations

import numpy as np

from .core import Partition, ValidationError

__all__ = [
    "contingency",
    "nmi",
    "ari",
    "vi",
    "js_distance",
    "band_similarity",
]


def _labels(p):
    if isinstance(p, Partition):
        return p.assignment
    return Partition(p).assignment


def contingency(p1, p2):
    """Joint community count table of two partitions over the same nodes."""
    a, b = _labels(p1), _labels(p2)
    if a.shape[0] != b.shape[0]:
        raise ValidationError("partitions cover %d and %d nodes"
                              % (a.shape[0], b.shape[0]))
    k1, k2 = int(a.max()) + 1, int(b.max()) + 1
    table = np.zeros((k1, k2), dtype=np.int64)
    np.add.at(table, (a, b), 1)
    return table


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def _mutual_information(table, n):
    nz = table > 0
    pij = table[nz] / n
    pi = (table.sum(axis=1) / n)[np.nonzero(nz)[0]]
    pj = (table.sum(axis=0) / n)[np.nonzero(nz)[1]]
    return float((pij * np.log(pij / (pi * pj))).sum())


def nmi(p1, p2):
    """Normalized mutual information with arithmetic-mean normalization.

    When both partitions are trivial (zero entropy on each side) the value
    is 1 if they are identical and 0 otherwise.
    """
    table = contingency(p1, p2)
    n = int(table.sum())
    h1 = _entropy(table.sum(axis=1), n)
    h2 = _entropy(table.sum(axis=0), n)
    if h1 == 0.0 and h2 == 0.0:
        return 1.0 if np.array_equal(_labels(p1), _labels(p2)) else 0.0
    i = _mutual_information(table, n)
    value = 2.0 * i / (h1 + h2)
    return float(min(max(value, 0.0), 1.0))


def ari(p1, p2):
    """Adjusted Rand index: pair-counting agreement corrected for chance."""
    table = contingency(p1, p2)
    n = int(table.sum())
    sum_ij = _choose2(table).sum()
    sum_a = _choose2(table.sum(axis=1)).sum()
    sum_b = _choose2(table.sum(axis=0)).sum()
    total = _choose2(np.array([n]))[0]
    if total == 0:
        return 1.0
    expected = sum_a * sum_b / total
    maximum = (sum_a + sum_b) / 2.0
    if maximum == expected:
        # Both sides degenerate the same way; identical partitions score 1.
        return 1.0 if np.array_equal(_labels(p1), _labels(p2)) else 0.0
    return float((sum_ij - expected) / (maximum - expected))


def _choose2(x):
    x = x.astype(np.float64)
    return x * (x - 1.0) / 2.0


def vi(p1, p2):
    """Variation of information in bits: H1 + H2 - 2 I, zero iff identical
    up to relabeling."""
    table = contingency(p1, p2)
    n = int(table.sum())
    h1 = _entropy(table.sum(axis=1), n)
    h2 = _entropy(table.sum(axis=0), n)
    i = _mutual_information(table, n)
    value = (h1 + h2 - 2.0 * i) / np.log(2.0)
    # max() would keep a cancellation-noise -0.0
    return float(value) if value > 0.0 else 0.0


def _density_matrix(adjacency):
    a = np.asarray(adjacency, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("adjacency must be square")
    if not np.allclose(a, a.T, atol=1e-12):
        raise ValidationError("adjacency must be symmetric")
    lap = np.diag(a.sum(axis=1)) - a
    trace = np.trace(lap)
    if trace <= 0.0:
        raise ValidationError("graph has no edges; distance undefined")
    return lap / trace


def _spectral_entropy(rho):
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-15]
    return float(-(lam * np.log2(lam)).sum())


def js_distance(a1, a2):
    """Jensen-Shannon spectral distance between two graphs.

    Both adjacency matrices are turned into trace-normalized combinatorial
    Laplacians rho_i; with M = (rho_1 + rho_2) / 2 the divergence is the
    average of the two relative entropies tr(rho_i (log2 rho_i - log2 M)),
    each matrix logarithm taken on its own eigenbasis with zero eigenvalues
    contributing nothing. The returned value is the square root, in [0, 1].
    """
    rho1 = _density_matrix(a1)
    rho2 = _density_matrix(a2)
    if rho1.shape != rho2.shape:
        raise ValidationError("graphs must have the same node count")
    mid = (rho1 + rho2) / 2.0
    div = (_relative_entropy(rho1, mid) + _relative_entropy(rho2, mid)) / 2.0
    return float(np.sqrt(max(div, 0.0)))


def _relative_entropy(rho, mid):
    lam_r = np.linalg.eigvalsh(rho)
    keep = lam_r > 1e-15
    plogp = float((lam_r[keep] * np.log2(lam_r[keep])).sum())
    lam_m, vec_m = np.linalg.eigh(mid)
    log_lam = np.where(lam_m > 1e-15, np.log2(np.maximum(lam_m, 1e-300)), 0.0)
    log_mid = (vec_m * log_lam) @ vec_m.T
    # tr(rho log2 M) via the elementwise product of two symmetric matrices;
    # rho has no weight on M's null space (supp rho is inside supp M), so
    # zeroing those log eigenvalues changes nothing.
    cross = float((rho * log_mid).sum())
    return plogp - cross


def band_similarity(p1, p2, net):
    """Per-layer NMI/ARI/VI between two partitions of one multilayer node set.

    Each layer's nodes are extracted from both partitions, relabeled
    contiguously, and compared. Returns one row per layer:
    (layer name, nmi, ari, vi).
    """
    a, b = _labels(p1), _labels(p2)
    if a.shape[0] != net.total_nodes or b.shape[0] != net.total_nodes:
        raise ValidationError("partitions must cover the whole network")
    rows = []
    for h in range(net.layer_count):
        sl = net.layer_slice(h)
        sub1 = Partition(a[sl])
        sub2 = Partition(b[sl])
        rows.append((net.layer_names[h], nmi(sub1, sub2),
                     ari(sub1, sub2), vi(sub1, sub2)))
    return rows
