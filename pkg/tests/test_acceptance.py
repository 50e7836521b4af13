"""Release gate: ten end-to-end guarantees, one test per guarantee.

Each test prints one summary line with its measured margins (visible under
pytest -rA or -s); the pytest verdict line is the pass/fail record. Tests
with a wall-clock budget assert it.
"""
import time

import numpy as np
import pytest
from sklearn.cluster import SpectralClustering
from sklearn.metrics import normalized_mutual_info_score as sk_nmi

import mfnet.cli as cli
from mfnet.connectivity import build_network
from mfnet.consensus import MultiviewGraph, group_structure, scml
from mfnet.core import MultilayerNetwork, Partition, block_total
from mfnet.io import load_partition
from mfnet.metrics import ari, js_distance, nmi, vi
from mfnet.modularity import (LocalMoveState, ModularityParams, NullModel,
                              apply_move, gain_matrix, leiden_maximize,
                              modularity, modularity_gain,
                              single_layer_modularity)
from mfnet.params import ParamGrid, select_params, surrogate
from mfnet.synth import (PacLink, PhaseLock, PlantedSpec, coupled_trials,
                         independent_blueprint, mixed_blueprint,
                         planted_multilayer, spanning_blueprint)
from mfnet.tfd import TfdConfig, modulation_index, plv, rid_rihaczek

from conftest import exhaustive_best, random_net


def test_criterion_01_null_block_totals_and_zero_q():
    t0 = time.monotonic()
    rng = np.random.default_rng(101)
    worst_rel, worst_q = 0.0, 0.0
    for _ in range(100):
        net = random_net(rng, layers=4, nodes=16)
        null = NullModel(net)
        for h in range(net.layer_count):
            for k in range(net.layer_count):
                want = block_total(net, h, k) * (2.0 if h == k else 1.0)
                got = float(null.expected_block(h, k).sum())
                worst_rel = max(worst_rel, abs(got - want) / (want or 1.0))
        part = Partition(np.zeros(net.total_nodes, dtype=np.int64))
        q = modularity(net, part, ModularityParams(1.0, 1.0))
        worst_q = max(worst_q, abs(q))
    elapsed = time.monotonic() - t0
    assert worst_rel <= 1e-9
    assert worst_q <= 1e-9
    assert elapsed < 10.0
    print("criterion 1 PASS: block totals rel err <= %.1e, "
          "|Q(all-in-one, gamma=1)| <= %.1e, %.1f s"
          % (worst_rel, worst_q, elapsed))


def test_criterion_02_gain_increments_and_global_optimum():
    t0 = time.monotonic()
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(20):
        net = random_net(rng, layers=int(rng.integers(2, 4)),
                         nodes=int(rng.integers(4, 7)))
        params = ModularityParams(gamma=float(rng.uniform(0.8, 1.2)),
                                  omega=float(rng.uniform(0.0, 1.0)))
        labels = rng.integers(0, 4, size=net.total_nodes)
        state = LocalMoveState.from_network(net, params, labels=labels)
        q_cur = modularity(net, Partition(state.labels), params)
        for _ in range(100):
            node = int(rng.integers(net.total_nodes))
            target = int(rng.integers(net.total_nodes + 1))
            gain = modularity_gain(state, node, target)
            trial = state.labels.copy()
            trial[node] = target
            q_new = modularity(net, Partition(trial), params)
            worst = max(worst, abs(gain - (q_new - q_cur)))
            apply_move(state, node, target)
            q_cur = q_new
    assert worst <= 1e-9

    # dense frustrated instances: 8 nodes over 2 layers, exhaustive optimum
    hits = 0
    for seed in range(40):
        srng = np.random.default_rng(seed)
        m = srng.uniform(size=(8, 8))
        a = np.clip((m + m.T) / 2.0 - 0.35, 0.0, None)
        np.fill_diagonal(a, 0.0)
        net = MultilayerNetwork([4, 4], a)
        params = ModularityParams(gamma=float(srng.uniform(0.9, 1.1)),
                                  omega=float(srng.uniform(0.25, 1.0)))
        best = exhaustive_best(gain_matrix(net, params))
        _, q = leiden_maximize(net, params, seed=seed)
        if q >= best - 1e-9:
            hits += 1
    elapsed = time.monotonic() - t0
    assert hits >= 38  # 95% of 40
    assert elapsed < 120.0
    print("criterion 2 PASS: gain err <= %.1e over 2000 moves, "
          "global optimum %d/40, %.1f s" % (worst, hits, elapsed))


def test_criterion_03_omega_zero_decomposes_by_layer():
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(20):
        net = random_net(rng, layers=int(rng.integers(2, 5)),
                         nodes=int(rng.integers(4, 8)))
        labels = rng.integers(0, 4, size=net.total_nodes)
        gamma = float(rng.uniform(0.8, 1.2))
        q = modularity(net, Partition(labels), ModularityParams(gamma, 0.0))
        parts = 0.0
        for h in range(net.layer_count):
            sl = net.layer_slice(h)
            parts += single_layer_modularity(net.block(h, h), labels[sl],
                                             gamma)
        worst = max(worst, abs(q - parts))
    assert worst <= 1e-9
    print("criterion 3 PASS: per-layer decomposition err <= %.1e over "
          "20 nets" % worst)


def test_criterion_04_planted_recovery_at_selected_params():
    t0 = time.monotonic()
    grid = ParamGrid((0.95, 0.975, 1.0, 1.025, 1.05),
                     (0.0, 0.125, 0.25, 0.375, 0.5),
                     obs_runs=10, surrogate_count=10,
                     surrogate_runs_per_net=1)
    hits, scores = 0, []
    for seed in range(20):
        bp = mixed_blueprint(64, 4)
        net, truth = planted_multilayer(
            PlantedSpec(4, 64, bp, mu_in=0.8, mu_out=0.2, spread=0.05,
                        seed=seed))
        gs, ws, _ = select_params(net, grid, seed=seed, workers=4)
        part, _ = leiden_maximize(
            net, ModularityParams(gs, ws),
            np.random.SeedSequence(entropy=seed, spawn_key=(99,)))
        score = nmi(part, truth)
        scores.append(score)
        if score >= 0.9:
            hits += 1
    elapsed = time.monotonic() - t0
    assert hits >= 18  # 90% of 20 seeds
    assert elapsed < 600.0
    print("criterion 4 PASS: NMI >= 0.9 in %d/20 seeds (min %.3f), %.0f s"
          % (hits, min(scores), elapsed))


def test_criterion_05_omega_selection_tracks_coupling():
    t0 = time.monotonic()
    grid = ParamGrid(tuple(1.0 + 0.00625 * i for i in range(9)),
                     tuple(0.0625 * i for i in range(9)),
                     obs_runs=20, surrogate_count=20,
                     surrogate_runs_per_net=3)
    omega_cap = max(grid.omegas)
    low, pos = 0, 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        bp_ind = independent_blueprint(12, 6, 2, rng)
        bp_span = spanning_blueprint(12, 6, 2)
        net_ind, _ = planted_multilayer(
            PlantedSpec(6, 12, bp_ind, mu_in=0.70, mu_out=0.30, spread=0.30,
                        seed=seed))
        net_span, _ = planted_multilayer(
            PlantedSpec(6, 12, bp_span, mu_in=0.70, mu_out=0.30, spread=0.30,
                        seed=seed))
        _, w_ind, _ = select_params(net_ind, grid, seed=seed, workers=4)
        _, w_span, _ = select_params(net_span, grid, seed=seed, workers=4)
        if w_ind <= 0.1 * omega_cap:
            low += 1
        if w_span > 0.0:
            pos += 1
    elapsed = time.monotonic() - t0
    assert low >= 8  # 80% of 10 seeds
    assert pos >= 8
    assert elapsed < 900.0
    print("criterion 5 PASS: independent omega* in lowest decile %d/10, "
          "spanning omega* > 0 %d/10, %.0f s" % (low, pos, elapsed))


def test_criterion_06_signal_front_end():
    t0 = time.monotonic()
    rng = np.random.default_rng(606)

    stack = rng.uniform(-np.pi, np.pi, size=(7, 64))
    values = plv(stack)
    assert np.all((values >= 0.0) & (values <= 1.0 + 1e-12))
    assert np.allclose(plv(stack[:1]), 1.0, atol=1e-12)
    antipodal = np.stack([stack[0], stack[0] + np.pi])
    assert float(np.max(plv(antipodal))) <= 1e-12

    amps = rng.uniform(0.1, 2.0, size=(6, 64))
    phases = rng.uniform(-np.pi, np.pi, size=(6, 64))
    mi = modulation_index(amps, phases)
    assert np.all((mi >= 0.0) & (mi <= 1.0 + 1e-12))
    aligned = modulation_index(np.full((6, 64), 0.7),
                               np.tile(phases[0], (6, 1)))
    assert np.allclose(aligned, 1.0, atol=1e-9)

    n, rate = 256, 256.0
    t = np.arange(n) / rate
    tone = np.cos(2.0 * np.pi * 32.0 * t)
    cmap = rid_rihaczek(tone, sample_rate=rate)
    total = float(np.real(cmap.values.sum() * cmap.bin_step))
    assert total == pytest.approx(float((tone ** 2).sum()), rel=0.01)
    spectrum = np.fft.rfft(rng.normal(size=n))
    freqs = np.fft.rfftfreq(n, d=1.0 / rate)
    spectrum[(freqs < 8.0) | (freqs > 30.0)] = 0.0
    noise = np.fft.irfft(spectrum, n)
    cmap = rid_rihaczek(noise, sample_rate=rate)
    total = float(np.real(cmap.values.sum() * cmap.bin_step))
    assert total == pytest.approx(float((noise ** 2).sum()), rel=0.01)

    cfg = TfdConfig(window=(13, 499))
    lock_hits = 0
    for seed in range(2000, 2020):
        tensor = coupled_trials(5, 40, 512, 512.0, [PhaseLock(0, 1, 6.0)],
                                snr=1.0, seed=seed)
        net = build_network(tensor, cfg=cfg)
        th = net.layer_names.index("theta")
        block = net.block(th, th)
        if block[0, 1] == block[np.triu_indices(5, 1)].max():
            lock_hits += 1
    pac_hits = 0
    for seed in range(1000, 1020):
        tensor = coupled_trials(5, 40, 512, 512.0,
                                [PacLink(0, 1, 6.0, 40.0)],
                                snr=1.0, seed=seed)
        net = build_network(tensor, cfg=cfg)
        th = net.layer_names.index("theta")
        gm = net.layer_names.index("gamma")
        block = net.block(th, gm)
        if block[0, 1] == block.max():
            pac_hits += 1
    elapsed = time.monotonic() - t0
    assert lock_hits >= 18  # 90% of 20 seeds
    assert pac_hits >= 18
    assert elapsed < 300.0
    print("criterion 6 PASS: identities hold, theta lock first %d/20, "
          "theta->gamma pac first %d/20, %.0f s"
          % (lock_hits, pac_hits, elapsed))


def _block_multisets(net):
    out = []
    for h in range(net.layer_count):
        for k in range(h, net.layer_count):
            block = net.block(h, k)
            if h == k:
                vals = block[np.triu_indices(block.shape[0], 1)]
            else:
                vals = block.ravel()
            out.append(np.sort(vals))
    return out


def test_criterion_07_surrogates_preserve_block_structure():
    rng = np.random.default_rng(707)
    worst_total = 0.0
    for i in range(20):
        net = random_net(rng, layers=int(rng.integers(2, 5)),
                         nodes=int(rng.integers(5, 9)))
        sur = surrogate(net, swap_count=1000, seed=i)
        for before, after in zip(_block_multisets(net),
                                 _block_multisets(sur)):
            assert np.array_equal(before, after)
        for h in range(net.layer_count):
            for k in range(net.layer_count):
                want = block_total(net, h, k)
                got = block_total(sur, h, k)
                # equal multisets summed in a different order
                worst_total = max(worst_total,
                                  abs(got - want) / (want or 1.0))
    assert worst_total <= 1e-12
    print("criterion 7 PASS: sorted block multisets exact on 20 nets x "
          "1000 swaps, block totals rel err <= %.1e" % worst_total)


def _planted_blocks(rng, sizes=(12, 10, 8)):
    n = sum(sizes)
    truth = np.repeat(np.arange(len(sizes)), sizes)
    a = rng.uniform(0.0, 0.1, size=(n, n))
    start = 0
    for size in sizes:
        a[start:start + size, start:start + size] = rng.uniform(
            0.7, 1.0, size=(size, size))
        start += size
    a = np.triu(a, 1)
    return a + a.T, truth


def test_criterion_08_consensus_oracle_and_group_gain():
    t0 = time.monotonic()
    for seed in range(10):
        rng = np.random.default_rng(seed)
        a, _ = _planted_blocks(rng)
        part = scml(MultiviewGraph((a, a, a)), 3, seed=seed)
        oracle = SpectralClustering(3, affinity="precomputed",
                                    random_state=0).fit_predict(a)
        assert sk_nmi(part.assignment, oracle) > 1.0 - 1e-9

    bp = spanning_blueprint(24, 2, 3)
    params = ModularityParams(1.0, 0.3)
    group_scores, single_scores, wins = [], [], 0
    for seed in range(10):
        nets, truth = [], None
        for s in range(5):
            net, truth = planted_multilayer(
                PlantedSpec(2, 24, bp, mu_in=0.54, mu_out=0.46, spread=0.15,
                            seed=(seed, s)))
            nets.append(net)
        singles = []
        for s, net in enumerate(nets):
            part, _ = leiden_maximize(
                net, params,
                np.random.SeedSequence(entropy=seed, spawn_key=(8, s)))
            singles.append(nmi(part, truth))
        group = group_structure(nets, params, seed=seed, runs=50)
        group_scores.append(nmi(group, truth))
        single_scores.append(float(np.mean(singles)))
        if group_scores[-1] > single_scores[-1]:
            wins += 1
    elapsed = time.monotonic() - t0
    assert np.mean(group_scores) > np.mean(single_scores)
    print("criterion 8 PASS: scml matches spectral oracle 10/10, group "
          "NMI %.3f vs single %.3f (better in %d/10 seeds), %.0f s"
          % (np.mean(group_scores), np.mean(single_scores), wins, elapsed))


def _js_oracle(a1, a2):
    def density(a):
        lap = np.diag(a.sum(axis=1)) - a
        return lap / np.trace(lap)

    def entropy(d):
        vals = np.linalg.eigvalsh(d)
        vals = vals[vals > 1e-12]
        return float(-(vals * np.log2(vals)).sum())

    r1, r2 = density(a1), density(a2)
    mix = (r1 + r2) / 2.0
    div = entropy(mix) - (entropy(r1) + entropy(r2)) / 2.0
    return float(np.sqrt(max(div, 0.0)))


def _random_graph(rng, n=12):
    a = rng.uniform(size=(n, n))
    a = (a + a.T) / 2.0
    np.fill_diagonal(a, 0.0)
    return a


def test_criterion_09_partition_and_graph_metrics():
    rng = np.random.default_rng(909)
    for _ in range(5):
        p = Partition(rng.integers(0, 5, size=40))
        assert nmi(p, p) == pytest.approx(1.0, abs=1e-12)
        assert ari(p, p) == pytest.approx(1.0, abs=1e-12)
        assert vi(p, p) == pytest.approx(0.0, abs=1e-12)
    one = Partition(np.zeros(16, dtype=np.int64))
    singletons = Partition(np.arange(16))
    assert nmi(one, singletons) == pytest.approx(0.0, abs=1e-12)
    assert ari(one, singletons) == pytest.approx(0.0, abs=1e-12)
    assert vi(one, singletons) == pytest.approx(np.log2(16), abs=1e-12)

    for _ in range(100):
        a, b, c = (Partition(rng.integers(0, 6, size=30)) for _ in range(3))
        assert vi(a, c) <= vi(a, b) + vi(b, c) + 1e-12

    worst = 0.0
    for _ in range(20):
        g1, g2 = _random_graph(rng), _random_graph(rng)
        d = js_distance(g1, g2)
        assert 0.0 <= d <= 1.0
        worst = max(worst, abs(d - _js_oracle(g1, g2)))
        # self and double-scale distances are sqrt-amplified float noise
        assert js_distance(g1, g1) <= 1e-7
        assert js_distance(2.0 * g1, g1) <= 1e-7
        assert abs(d - js_distance(g2, g1)) <= 1e-14
    assert worst <= 1e-10
    print("criterion 9 PASS: identities and triangle hold, js oracle "
          "err <= %.1e over 20 pairs" % worst)


def _run_pipeline(base, seed):
    base.mkdir()
    tcfg = base / "trials.cfg"
    tcfg.write_text("kind=trials\nchannels=2\ntrials=6\nsamples=256\n"
                    "rate=256\ncouplings=plv:0:1:6.0\nsnr=1.0\n")
    trials = base / "trials.mftrials"
    assert cli.main(["synth", "--config", str(tcfg), "--seed", str(seed),
                     "--out", str(trials)]) == 0

    bcfg = base / "build.cfg"
    bcfg.write_text("bands=theta:4:7,alpha:8:12\nwindow=6:250\n")
    net_path = base / "built.mfnet"
    assert cli.main(["build", str(trials), "--config", str(bcfg),
                     "--out", str(net_path)]) == 0

    scfg = base / "select.cfg"
    scfg.write_text("gammas=0.95:0.05:3\nomegas=0.0,0.25\nobs_runs=2\n"
                    "surrogate_count=2\nswap_count=50\n")
    params_path = base / "params.txt"
    assert cli.main(["select", str(net_path), "--config", str(scfg),
                     "--seed", str(seed), "--out", str(params_path)]) == 0

    part_path = base / "best.partition"
    assert cli.main(["detect", str(net_path), "--params", str(params_path),
                     "--runs", "3", "--seed", str(seed),
                     "--out", str(part_path)]) == 0

    subjects = []
    for s in range(2):
        sdir = base / ("subj%d" % s)
        sdir.mkdir()
        ncfg = sdir / "net.cfg"
        ncfg.write_text("kind=network\nlayers=2\nnodes=12\ncommunities=3\n"
                        "mu_in=0.85\nmu_out=0.15\nspread=0.05\n")
        assert cli.main(["synth", "--config", str(ncfg),
                         "--seed", str(seed + 20 + s),
                         "--out", str(sdir / "network.mfnet")]) == 0
        (sdir / "params.txt").write_text("gamma=1.0\nomega=0.3\n")
        subjects.append(str(sdir))
    gcfg = base / "group.cfg"
    gcfg.write_text("runs=6\n")
    group_path = base / "group.partition"
    assert cli.main(["group"] + subjects + ["--config", str(gcfg),
                                            "--seed", str(seed),
                                            "--out", str(group_path)]) == 0

    metrics_path = base / "metrics.tsv"
    truth0 = str(base / "subj0" / "network.mfnet.truth.partition")
    assert cli.main(["compare", str(group_path), truth0,
                     "--out", str(metrics_path)]) == 0


def _tree_bytes(base):
    out = {}
    for path in sorted(base.rglob("*")):
        if path.is_file() and not path.name.endswith(".provenance.txt"):
            out[str(path.relative_to(base))] = path.read_bytes()
    return out


def test_criterion_10_pipeline_determinism(tmp_path):
    _run_pipeline(tmp_path / "run1", seed=12)
    _run_pipeline(tmp_path / "run2", seed=12)
    first = _tree_bytes(tmp_path / "run1")
    second = _tree_bytes(tmp_path / "run2")
    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], name

    net_path = str(tmp_path / "run1" / "built.mfnet")
    scfg = tmp_path / "wsel.cfg"
    scfg.write_text("gammas=0.95:0.05:3\nomegas=0.0,0.25\nobs_runs=2\n"
                    "surrogate_count=2\nswap_count=50\n")
    outs = []
    for tag, workers in (("w1", "1"), ("w4", "4")):
        out = tmp_path / ("params_%s.txt" % tag)
        assert cli.main(["select", net_path, "--config", str(scfg),
                         "--seed", "12", "--workers", workers,
                         "--out", str(out)]) == 0
        outs.append(out)
    assert outs[0].read_bytes() == outs[1].read_bytes()
    assert (tmp_path / "params_w1.txt.surface.tsv").read_bytes() \
        == (tmp_path / "params_w4.txt.surface.tsv").read_bytes()

    part = load_partition(str(tmp_path / "run1" / "best.partition"))
    assert part.size == 4  # 2 channels x 2 bands
    print("criterion 10 PASS: %d pipeline outputs bit-identical across "
          "same-seed reruns; select invariant across workers {1, 4}"
          % len(first))
