"""Shared helpers: random network builders and independent oracles.

The oracles recompute quantities straight from their definitions with
plain python loops (ordered node pairs, restricted-growth-string
partition enumeration), so the vectorized library code is always checked
against a second route.
"""

import numpy as np

from mfnet.core import MultilayerNetwork


def random_net(rng, layers=3, nodes=5, density=0.6, inter_scale=0.5,
               empty_block_prob=0.0):
    """Random weighted multilayer network.

    `nodes` is one size for every layer or a per-layer sequence.
    `empty_block_prob` zeroes whole off-diagonal block pairs so the
    m = 0 guard gets exercised.
    """
    sizes = [int(nodes)] * layers if np.isscalar(nodes) \
        else [int(n) for n in nodes]
    n = sum(sizes)
    a = rng.uniform(0.0, 1.0, size=(n, n))
    a *= rng.random(size=(n, n)) < density
    a = np.triu(a, 1)
    a = a + a.T
    offs = np.concatenate(([0], np.cumsum(sizes)))
    for h in range(layers):
        for k in range(h + 1, layers):
            sl_h = slice(offs[h], offs[h + 1])
            sl_k = slice(offs[k], offs[k + 1])
            if rng.random() < empty_block_prob:
                a[sl_h, sl_k] = 0.0
                a[sl_k, sl_h] = 0.0
            else:
                a[sl_h, sl_k] *= inter_scale
                a[sl_k, sl_h] *= inter_scale
    return MultilayerNetwork(sizes, a)


def brute_modularity(net, labels, gamma, omega):
    """Modularity recomputed from the definition with explicit loops.

    Sum over ordered same-community pairs (i = j included) of
    w * (A[i, j] - gamma * s_i^k * s_j^h / ((1 + [h == k]) * m[h, k])),
    with w = 1 intra-layer and omega inter-layer, and a zero null term
    whenever the block total vanishes.
    """
    a = net.supra
    n = net.total_nodes
    lay = [net.node_layer(i)[1] for i in range(n)]
    L = net.layer_count

    s = np.zeros((n, L))
    for i in range(n):
        for j in range(n):
            s[i, lay[j]] += a[i, j]
    m = np.zeros((L, L))
    for i in range(n):
        for j in range(n):
            m[lay[i], lay[j]] += a[i, j]
    for h in range(L):
        m[h, h] /= 2.0

    labels = np.asarray(labels)
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] != labels[j]:
                continue
            h, k = lay[i], lay[j]
            if m[h, k] == 0.0:
                p = 0.0
            else:
                p = s[i, k] * s[j, h] / ((2.0 if h == k else 1.0) * m[h, k])
            w = 1.0 if h == k else omega
            q += w * (a[i, j] - gamma * p)
    return q


def set_partitions(n):
    """Every set partition of range(n) as a canonical label array.

    Restricted growth strings: label[0] = 0 and each later label is at
    most one past the current maximum, which enumerates each partition
    exactly once.
    """
    labels = np.zeros(n, dtype=np.int64)

    def rec(i, used):
        if i == n:
            yield labels.copy()
            return
        for c in range(used + 1):
            labels[i] = c
            yield from rec(i + 1, max(used, c + 1))

    yield from rec(1, 1) if n > 1 else iter([labels.copy()])


def exhaustive_best(b):
    """Global optimum of the pair-sum quality over all partitions of b's nodes."""
    best = -np.inf
    for labels in set_partitions(b.shape[0]):
        same = labels[:, None] == labels[None, :]
        q = float(b[same].sum())
        if q > best:
            best = q
    return best
