import numpy as np
import pytest

from mfnet.core import (MultilayerNetwork, Partition, ValidationError,
                        block_total, layer_strength)

from conftest import random_net


def small_net():
    # two layers (3 + 2 nodes), hand-checkable weights
    a = np.zeros((5, 5))
    a[0, 1] = a[1, 0] = 1.0
    a[1, 2] = a[2, 1] = 2.0
    a[3, 4] = a[4, 3] = 0.5
    a[0, 3] = a[3, 0] = 4.0
    a[2, 4] = a[4, 2] = 0.25
    return MultilayerNetwork([3, 2], a, layer_names=["alpha", "beta"])


def test_construction_symmetrizes_and_freezes():
    a = np.zeros((4, 4))
    a[0, 1] = 1.0
    a[1, 0] = 1.0 + 5e-13  # inside tol, averaged away
    net = MultilayerNetwork([2, 2], a)
    assert net.supra[0, 1] == net.supra[1, 0]
    assert not net.supra.flags.writeable
    with pytest.raises(ValueError):
        net.supra[0, 1] = 9.0


def test_construction_defaults():
    net = MultilayerNetwork([2, 1], np.zeros((3, 3)))
    assert net.layer_names == ("layer0", "layer1")
    assert net.node_labels == ("n0:layer0", "n1:layer0", "n0:layer1")
    assert net.total_nodes == 3
    assert net.offsets == (0, 2, 3)


@pytest.mark.parametrize("build", [
    lambda: MultilayerNetwork([], np.zeros((0, 0))),
    lambda: MultilayerNetwork([2, 0], np.zeros((2, 2))),
    lambda: MultilayerNetwork([2], np.zeros((2, 3))),
    lambda: MultilayerNetwork([3], np.zeros((2, 2))),
    lambda: MultilayerNetwork([2], [[0.0, 1.0], [2.0, 0.0]]),
    lambda: MultilayerNetwork([2], [[1.0, 0.0], [0.0, 0.0]]),
    lambda: MultilayerNetwork([2], [[0.0, -1.0], [-1.0, 0.0]]),
    lambda: MultilayerNetwork([2], [[0.0, np.nan], [np.nan, 0.0]]),
    lambda: MultilayerNetwork([2], np.zeros((2, 2)), layer_names=["a", "b"]),
    lambda: MultilayerNetwork([2], np.zeros((2, 2)), node_labels=["x"]),
])
def test_construction_rejects_bad_input(build):
    with pytest.raises(ValidationError):
        build()


def test_global_index_round_trip():
    net = random_net(np.random.default_rng(0), layers=3, nodes=[4, 2, 5])
    for i in range(net.total_nodes):
        u, h = net.node_layer(i)
        assert net.global_index(u, h) == i
    with pytest.raises(IndexError):
        net.global_index(4, 1)
    with pytest.raises(IndexError):
        net.global_index(0, 3)
    with pytest.raises(IndexError):
        net.node_layer(net.total_nodes)


def test_blocks_tile_the_supra_matrix():
    net = small_net()
    assert net.block(0, 0).shape == (3, 3)
    assert net.block(0, 1).shape == (3, 2)
    top = np.hstack([net.block(0, 0), net.block(0, 1)])
    bottom = np.hstack([net.block(1, 0), net.block(1, 1)])
    assert np.array_equal(np.vstack([top, bottom]), net.supra)


def test_with_supra_keeps_structure():
    net = small_net()
    other = net.with_supra(np.zeros((5, 5)))
    assert other.layer_names == net.layer_names
    assert other.node_labels == net.node_labels
    assert other.supra.sum() == 0.0


def test_layer_strength_matches_manual_sums():
    net = small_net()
    # node (1, 0) touches weights 1 and 2 inside its own layer
    assert layer_strength(net, (1, 0), 0) == 3.0
    assert layer_strength(net, (1, 0), 1) == 0.0
    assert layer_strength(net, (0, 0), 1) == 4.0
    assert layer_strength(net, (1, 1), 0) == 0.25
    rng = np.random.default_rng(7)
    net = random_net(rng, layers=3, nodes=4)
    for i in range(net.total_nodes):
        u, h = net.node_layer(i)
        for k in range(net.layer_count):
            manual = net.supra[i, net.layer_slice(k)].sum()
            assert layer_strength(net, (u, h), k) == pytest.approx(manual)


def test_block_total_halves_intra_only():
    net = small_net()
    assert block_total(net, 0, 0) == 3.0    # edges 1 + 2, each counted once
    assert block_total(net, 1, 1) == 0.5
    assert block_total(net, 0, 1) == 4.25   # plain block sum
    assert block_total(net, 1, 0) == block_total(net, 0, 1)


def test_partition_canonicalizes_labels():
    p = Partition([5, 5, 2, 7, 2])
    assert np.array_equal(p.assignment, [0, 0, 1, 2, 1])
    assert p.community_count == 3
    assert p.size == 5
    assert not p.assignment.flags.writeable


def test_partition_communities_cover_all_nodes():
    p = Partition([1, 0, 1, 2, 0, 1])
    groups = p.communities()
    assert len(groups) == 3
    assert sorted(np.concatenate(groups).tolist()) == list(range(6))
    for c, members in enumerate(groups):
        assert (p.assignment[members] == c).all()


def test_partition_restrict_relabels():
    p = Partition([0, 0, 1, 2, 2])
    sub = p.restrict([2, 3, 4])
    assert np.array_equal(sub.assignment, [0, 1, 1])


def test_partition_equality_is_label_invariant_only_after_canon():
    assert Partition([0, 1, 1]) == Partition([4, 9, 9])
    assert Partition([0, 1, 1]) != Partition([0, 0, 1])
    assert Partition([0]).__eq__(object()) is NotImplemented


@pytest.mark.parametrize("bad", [[], np.zeros((2, 2))])
def test_partition_rejects_bad_assignment(bad):
    with pytest.raises(ValidationError):
        Partition(bad)
