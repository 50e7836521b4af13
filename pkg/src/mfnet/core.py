"""Containers and primitive queries for weighted undirected multilayer networks.

A multilayer network couples L node layers through one supra-adjacency
matrix. Block (h, k) of that matrix holds the weights between the nodes of
layer h and the nodes of layer k; intra-layer blocks sit on the diagonal
of the block grid. Nodes are indexed layer-major: node (u, h) lives at
global index offset(h) + u with offset(h) the total size of the layers
before h.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ValidationError",
    "NumericError",
    "MultilayerNetwork",
    "Partition",
    "layer_strength",
    "block_total",
]


class ValidationError(ValueError):
    """Raised when an input violates a structural contract."""


class NumericError(RuntimeError):
    """Raised when a numerical routine cannot produce a usable result."""


class MultilayerNetwork:
    """Weighted undirected multilayer network stored as a supra-adjacency matrix.

    Parameters
    ----------
    nodes_per_layer : sequence of int
        Number of nodes in each layer, in layer order.
    supra : (N, N) array_like
        Supra-adjacency matrix, N = sum(nodes_per_layer). Must be symmetric
        within `tol`, nonnegative, and zero on the diagonal. The stored
        matrix is exactly symmetrized as (A + A.T) / 2 and made read-only.
    layer_names : sequence of str, optional
        One name per layer. Defaults to "layer0", "layer1", ...
    node_labels : sequence of str, optional
        One label per global node. Defaults to "n<u>:<layer name>".
    tol : float
        Absolute tolerance for the symmetry and zero-diagonal checks.
    """

    def __init__(self, nodes_per_layer, supra, layer_names=None,
                 node_labels=None, tol=1e-12):
        sizes = tuple(int(n) for n in nodes_per_layer)
        if len(sizes) == 0 or any(n <= 0 for n in sizes):
            raise ValidationError("nodes_per_layer must be positive integers")
        n_total = sum(sizes)

        a = np.array(supra, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError("supra-adjacency must be a square matrix")
        if a.shape[0] != n_total:
            raise ValidationError(
                "matrix size %d does not match layer sizes summing to %d"
                % (a.shape[0], n_total))
        if not np.isfinite(a).all():
            bad = np.argwhere(~np.isfinite(a))[0]
            raise ValidationError(
                "non-finite weight at (%d, %d)" % (bad[0], bad[1]))

        asym = np.abs(a - a.T)
        if asym.max(initial=0.0) > tol:
            bad = np.argwhere(asym > tol)[0]
            raise ValidationError(
                "asymmetric entry at (%d, %d): %r vs %r"
                % (bad[0], bad[1], a[bad[0], bad[1]], a[bad[1], bad[0]]))
        a = (a + a.T) / 2.0

        diag = np.abs(np.diagonal(a))
        if diag.max(initial=0.0) > tol:
            i = int(np.argmax(diag > tol))
            raise ValidationError(
                "nonzero diagonal at (%d, %d): %r" % (i, i, a[i, i]))
        np.fill_diagonal(a, 0.0)

        if a.min(initial=0.0) < -tol:
            bad = np.argwhere(a < -tol)[0]
            raise ValidationError(
                "negative weight at (%d, %d): %r" % (bad[0], bad[1], a[bad[0], bad[1]]))
        np.clip(a, 0.0, None, out=a)

        self.nodes_per_layer = sizes
        self.layer_count = len(sizes)
        self.total_nodes = n_total
        self.offsets = tuple(int(o) for o in np.concatenate(([0], np.cumsum(sizes))))
        if layer_names is None:
            layer_names = ["layer%d" % h for h in range(self.layer_count)]
        if len(layer_names) != self.layer_count:
            raise ValidationError("need one name per layer")
        self.layer_names = tuple(str(s) for s in layer_names)
        if node_labels is None:
            node_labels = ["n%d:%s" % (u, self.layer_names[h])
                           for h in range(self.layer_count)
                           for u in range(sizes[h])]
        if len(node_labels) != n_total:
            raise ValidationError("need one label per node")
        self.node_labels = tuple(str(s) for s in node_labels)

        a.setflags(write=False)
        self.supra = a

    def global_index(self, u, h):
        """Global index of local node u in layer h."""
        if not 0 <= h < self.layer_count:
            raise IndexError("layer %d out of range" % h)
        if not 0 <= u < self.nodes_per_layer[h]:
            raise IndexError("node %d out of range for layer %d" % (u, h))
        return self.offsets[h] + u

    def node_layer(self, i):
        """Inverse of global_index: (local index, layer) of global node i."""
        if not 0 <= i < self.total_nodes:
            raise IndexError("node %d out of range" % i)
        h = int(np.searchsorted(self.offsets, i, side="right") - 1)
        return i - self.offsets[h], h

    def layer_slice(self, h):
        """Slice of the global index range covering layer h."""
        if not 0 <= h < self.layer_count:
            raise IndexError("layer %d out of range" % h)
        return slice(self.offsets[h], self.offsets[h + 1])

    def block(self, h, k):
        """Read-only view of block (h, k) of the supra-adjacency matrix."""
        return self.supra[self.layer_slice(h), self.layer_slice(k)]

    def with_supra(self, supra):
        """New network with the same layer structure and a replaced matrix."""
        return MultilayerNetwork(self.nodes_per_layer, supra,
                                 layer_names=self.layer_names,
                                 node_labels=self.node_labels)

    def __repr__(self):
        return "MultilayerNetwork(layers=%d, nodes=%s)" % (
            self.layer_count, list(self.nodes_per_layer))


def layer_strength(net, node, target_layer):
    """Total weight from one node toward every node of a target layer.

    Parameters
    ----------
    net : MultilayerNetwork
    node : (int, int)
        Pair (u, h): local node index u in layer h.
    target_layer : int

    Returns
    -------
    float
        Sum over v in the target layer of the weight between (u, h) and v.
    """
    u, h = node
    i = net.global_index(u, h)
    return float(net.supra[i, net.layer_slice(target_layer)].sum())


def block_total(net, h, k):
    """Total weight of block (h, k).

    For distinct layers this is the plain block sum; for an intra-layer
    block the sum is halved so each undirected edge counts once.
    """
    s = float(net.block(h, k).sum())
    return s / 2.0 if h == k else s


class Partition:
    """Community assignment over a fixed set of nodes.

    Labels are canonicalized on construction: community ids are renumbered
    to 0..K-1 in order of first appearance, so every id in that range is
    used by at least one node.
    """

    def __init__(self, assignment):
        labels = np.asarray(assignment)
        if labels.ndim != 1 or labels.size == 0:
            raise ValidationError("assignment must be a nonempty 1-D sequence")
        labels = labels.astype(np.int64, copy=False)
        self.assignment = _canonical_labels(labels)
        self.assignment.setflags(write=False)
        self.community_count = int(self.assignment.max()) + 1

    @property
    def size(self):
        return self.assignment.shape[0]

    def communities(self):
        """List of index arrays, one per community, in id order."""
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.searchsorted(self.assignment[order],
                                 np.arange(self.community_count + 1))
        return [order[bounds[c]:bounds[c + 1]]
                for c in range(self.community_count)]

    def restrict(self, indices):
        """Partition induced on a subset of nodes, relabeled canonically."""
        return Partition(self.assignment[np.asarray(indices)])

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    def __repr__(self):
        return "Partition(n=%d, k=%d)" % (self.size, self.community_count)


def _canonical_labels(labels):
    n = labels.shape[0]
    uniq, inverse = np.unique(labels, return_inverse=True)
    first_pos = np.full(uniq.shape[0], n, dtype=np.int64)
    np.minimum.at(first_pos, inverse, np.arange(n, dtype=np.int64))
    rank = np.empty_like(first_pos)
    rank[np.argsort(first_pos, kind="stable")] = np.arange(uniq.shape[0])
    return rank[inverse]
