"""Command line pipeline: build, select, detect, group, compare, synth.

Every command reads optional key=value settings from --config, takes all
randomness from --seed, and writes its primary artifact to --out plus a
`<out>.provenance.txt` sidecar recording the invocation, seed, and config
digest. Outputs are plain files (binary matrix containers and TSV tables)
meant for external plotting.

Config keys by command:

  build    bands=theta:4:7,alpha:8:12,...   sigma=0.5
           frequency_bins=1024              window=13:38   (samples)
  select   gammas=0.95:0.0025:41 | 1.0,1.05,...   omegas= (same forms)
           obs_runs=100  surrogate_count=100  swap_count=...
  detect   (none; parameters come from --gamma/--omega or --params)
  group    runs=100  alpha=0.5  k=...  (k overrides the mean-count rule)
  compare  (none)
  synth    kind=network: layers= nodes= communities= blueprint=spanning|
             independent|mixed  mu_in= mu_out= spread= coupling=
           kind=trials: channels= trials= samples= rate= snr=
             couplings=plv:u:v:freq[:lag];pac:u:v:phase_hz:amp_hz[:depth]

Exit codes: 0 success, 2 validation error, 3 I/O error, 4 numeric failure.
Errors print one machine-parseable line on stderr:
  mfnet-error code=<validation|io|numeric> message="..."
"""

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .connectivity import Band, BandSet, build_network, default_bands
from .consensus import co_clustering, group_structure
from .core import MultilayerNetwork, NumericError, ValidationError
from .io import (config_digest, load_config, load_network, load_partition,
                 load_trials, save_network, save_partition, save_table,
                 save_trials)
from .metrics import ari, band_similarity, js_distance, nmi, vi
from .modularity import ModularityParams, leiden_maximize
from .params import ParamGrid, select_params
from .synth import (PacLink, PhaseLock, PlantedSpec, coupled_trials,
                    independent_blueprint, mixed_blueprint,
                    planted_multilayer, spanning_blueprint)
from .tfd import TfdConfig


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        return _fail(2, "validation", exc)
    except OSError as exc:
        return _fail(3, "io", exc)
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return _fail(4, "numeric", exc)


def _fail(code, kind, exc):
    message = " ".join(str(exc).split())
    sys.stderr.write('mfnet-error code=%s message="%s"\n' % (kind, message))
    return code


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mfnet",
        description="Multilayer frequency-band network pipeline.")
    parser.add_argument("--version", action="version",
                        version="mfnet " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, needs_seed):
        sp.add_argument("--config", help="key=value settings file")
        sp.add_argument("--seed", type=int, required=needs_seed,
                        help="master seed for all randomness")
        sp.add_argument("--workers", type=int, default=1,
                        help="process count for parallel sweeps")
        sp.add_argument("--out", required=True, help="primary output path")

    sp = sub.add_parser("build", help="trial tensor -> multilayer network")
    sp.add_argument("signals", help="trial tensor file")
    common(sp, needs_seed=False)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("select", help="grid-search (gamma, omega)")
    sp.add_argument("network", help="network file")
    common(sp, needs_seed=True)
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("detect", help="modularity maximization runs")
    sp.add_argument("network", help="network file")
    sp.add_argument("--params", help="params file from `select`")
    sp.add_argument("--gamma", type=float, help="resolution parameter")
    sp.add_argument("--omega", type=float, help="inter-layer scale")
    sp.add_argument("--runs", type=int, default=1,
                    help="number of seeded detection runs")
    common(sp, needs_seed=True)
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("group", help="group structure across subjects")
    sp.add_argument("subjects", nargs="+",
                    help="subject network files, or directories holding "
                         "network.mfnet and params.txt")
    sp.add_argument("--params", help="params file applied to every subject")
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--omega", type=float)
    common(sp, needs_seed=True)
    sp.set_defaults(func=cmd_group)

    sp = sub.add_parser("compare", help="partition metrics or JS distances")
    sp.add_argument("inputs", nargs="+", help="partition or network files")
    sp.add_argument("--mode", choices=("partitions", "networks"),
                    default="partitions")
    sp.add_argument("--network",
                    help="network file giving the layer split for a "
                         "per-layer partition table")
    common(sp, needs_seed=False)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("synth", help="synthetic networks or trial tensors")
    common(sp, needs_seed=True)
    sp.set_defaults(func=cmd_synth)

    return parser


# ---------------------------------------------------------------- helpers

def _settings(args):
    if args.config:
        return load_config(args.config)
    return {}


def _floats(text, what):
    """Parse 'start:step:count' or a comma list into a float tuple."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(
                "%s: expected start:step:count, got %r" % (what, text))
        start, step, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValidationError("%s: count must be positive" % what)
        return tuple(start + step * i for i in range(count))
    values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    if not values:
        raise ValidationError("%s: no values in %r" % (what, text))
    return values


def _bands_from(settings):
    if "bands" not in settings:
        return default_bands()
    bands = []
    for item in settings["bands"].split(","):
        parts = item.strip().split(":")
        if len(parts) != 3:
            raise ValidationError(
                "bands: expected name:low:high, got %r" % item)
        bands.append(Band(parts[0], float(parts[1]), float(parts[2])))
    return BandSet(bands)


def _tfd_config(settings):
    window = None
    if "window" in settings:
        lo, _, hi = settings["window"].partition(":")
        window = (int(lo), int(hi))
    bins = settings.get("frequency_bins")
    return TfdConfig(
        choi_williams_sigma=float(settings.get("sigma", 0.5)),
        frequency_bins=int(bins) if bins is not None else None,
        window=window)


def _params_from_file(path):
    settings = load_config(path)
    for key in ("gamma", "omega"):
        if key not in settings:
            raise ValidationError("%s: missing %s" % (path, key))
    return ModularityParams(gamma=float(settings["gamma"]),
                            omega=float(settings["omega"]))


def _resolve_params(args):
    if args.params is not None:
        if args.gamma is not None or args.omega is not None:
            raise ValidationError("--params conflicts with --gamma/--omega")
        return _params_from_file(args.params)
    if args.gamma is None or args.omega is None:
        raise ValidationError("need --params or both --gamma and --omega")
    return ModularityParams(gamma=args.gamma, omega=args.omega)


def _couplings_from(text):
    couplings = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        kind = parts[0].lower()
        if kind == "plv" and len(parts) in (4, 5):
            lag = float(parts[4]) if len(parts) == 5 else math.pi / 5
            couplings.append(PhaseLock(int(parts[1]), int(parts[2]),
                                       float(parts[3]), lag_rad=lag))
        elif kind == "pac" and len(parts) in (5, 6):
            depth = float(parts[5]) if len(parts) == 6 else 1.0
            couplings.append(PacLink(int(parts[1]), int(parts[2]),
                                     float(parts[3]), float(parts[4]),
                                     depth=depth))
        else:
            raise ValidationError(
                "couplings: expected plv:u:v:freq[:lag] or "
                "pac:u:v:phase_hz:amp_hz[:depth], got %r" % item)
    return tuple(couplings)


def _write_provenance(args, inputs, outputs):
    lines = [
        "tool=mfnet",
        "version=" + __version__,
        "command=" + args.command,
        "argv=" + " ".join(sys.argv[1:] if sys.argv else []),
        "seed=" + (str(args.seed) if args.seed is not None else "none"),
        "workers=" + str(args.workers),
        "config=" + (args.config or "none"),
        "config_sha256=" + (config_digest(args.config)
                            if args.config else "none"),
        "inputs=" + ",".join(inputs),
        "outputs=" + ",".join(outputs),
    ]
    with open(args.out + ".provenance.txt", "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


# --------------------------------------------------------------- commands

def cmd_build(args):
    settings = _settings(args)
    trials = load_trials(args.signals)
    net = build_network(trials, _bands_from(settings), _tfd_config(settings))
    save_network(net, args.out)
    _write_provenance(args, [args.signals], [args.out])
    print("wrote %s: %d layers, %d nodes"
          % (args.out, net.layer_count, net.total_nodes))
    return 0


def cmd_select(args):
    settings = _settings(args)
    net = load_network(args.network)
    kwargs = {}
    if "gammas" in settings:
        kwargs["gammas"] = _floats(settings["gammas"], "gammas")
    if "omegas" in settings:
        kwargs["omegas"] = _floats(settings["omegas"], "omegas")
    if "obs_runs" in settings:
        kwargs["obs_runs"] = int(settings["obs_runs"])
    if "surrogate_count" in settings:
        kwargs["surrogate_count"] = int(settings["surrogate_count"])
    if "surrogate_runs_per_net" in settings:
        kwargs["surrogate_runs_per_net"] = int(settings["surrogate_runs_per_net"])
    if "swap_count" in settings:
        kwargs["swap_count"] = int(settings["swap_count"])
    grid = ParamGrid(**kwargs)
    gamma, omega, surface = select_params(net, grid, args.seed,
                                          workers=args.workers)
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write("gamma=%r\nomega=%r\n" % (gamma, omega))
    rows = [(repr(g),) + tuple(surface[gi])
            for gi, g in enumerate(grid.gammas)]
    header = ("gamma\\omega",) + tuple(repr(o) for o in grid.omegas)
    save_table(args.out + ".surface.tsv", rows, header=header)
    _write_provenance(args, [args.network],
                      [args.out, args.out + ".surface.tsv"])
    print("selected gamma=%r omega=%r" % (gamma, omega))
    return 0


def cmd_detect(args):
    net = load_network(args.network)
    params = _resolve_params(args)
    if args.runs < 1:
        raise ValidationError("--runs must be positive")
    partitions = []
    scores = []
    for r in range(args.runs):
        ss = np.random.SeedSequence(entropy=args.seed, spawn_key=(r,))
        part, q = leiden_maximize(net, params, seed=ss)
        partitions.append(part)
        scores.append(q)
    best = int(np.argmax(scores))
    save_partition(partitions[best], args.out)
    outputs = [args.out]
    if args.runs > 1:
        cc = co_clustering(partitions)
        cc_net = MultilayerNetwork([cc.n_nodes], cc.as_adjacency(),
                                   layer_names=["cocluster"],
                                   node_labels=net.node_labels)
        save_network(cc_net, args.out + ".cocluster.mfnet")
        save_table(args.out + ".runs.tsv",
                   [(r, scores[r], partitions[r].community_count)
                    for r in range(args.runs)],
                   header=("run", "modularity", "communities"))
        outputs += [args.out + ".cocluster.mfnet", args.out + ".runs.tsv"]
    _write_provenance(args, [args.network], outputs)
    print("best run %d: modularity=%r, %d communities"
          % (best, scores[best], partitions[best].community_count))
    return 0


def cmd_group(args):
    settings = _settings(args)
    shared = None
    if args.params is not None or args.gamma is not None:
        shared = _resolve_params(args)
    nets = []
    subject_params = []
    inputs = []
    for path in args.subjects:
        if os.path.isdir(path):
            net_path = os.path.join(path, "network.mfnet")
            par_path = os.path.join(path, "params.txt")
            nets.append(load_network(net_path))
            subject_params.append(shared if shared is not None
                                  else _params_from_file(par_path))
            inputs.append(net_path)
        else:
            if shared is None:
                raise ValidationError(
                    "%s: subject given as a bare network file needs "
                    "--params or --gamma/--omega" % path)
            nets.append(load_network(path))
            subject_params.append(shared)
            inputs.append(path)
    k_policy = int(settings["k"]) if "k" in settings else None
    partition = group_structure(
        nets, subject_params, k_policy=k_policy, seed=args.seed,
        runs=int(settings.get("runs", 100)),
        alpha=float(settings.get("alpha", 0.5)))
    save_partition(partition, args.out)

    net0 = nets[0]
    rows = []
    for u in range(max(net0.nodes_per_layer)):
        row = [u]
        for h in range(net0.layer_count):
            if u < net0.nodes_per_layer[h]:
                row.append(int(partition.assignment[net0.global_index(u, h)]))
            else:
                row.append("")
        rows.append(tuple(row))
    save_table(args.out + ".table.tsv", rows,
               header=("node",) + net0.layer_names)
    _write_provenance(args, inputs, [args.out, args.out + ".table.tsv"])
    print("group partition: %d communities over %d nodes"
          % (partition.community_count, net0.total_nodes))
    return 0


def cmd_compare(args):
    if args.mode == "partitions":
        if len(args.inputs) != 2:
            raise ValidationError(
                "compare --mode partitions takes exactly two partition files")
        p1 = load_partition(args.inputs[0])
        p2 = load_partition(args.inputs[1])
        rows = [("all", nmi(p1, p2), ari(p1, p2), vi(p1, p2))]
        inputs = list(args.inputs)
        if args.network:
            net = load_network(args.network)
            rows += band_similarity(p1, p2, net)
            inputs.append(args.network)
        save_table(args.out, rows, header=("scope", "nmi", "ari", "vi"))
    else:
        if len(args.inputs) < 2:
            raise ValidationError(
                "compare --mode networks needs at least two network files")
        nets = [load_network(p) for p in args.inputs]
        names = [os.path.basename(p) for p in args.inputs]
        if len(set(names)) != len(names):
            # subject trees often share one basename; fall back to paths
            names = list(args.inputs)
        n = len(nets)
        dist = np.zeros((n, n))
        rows = []
        for i in range(n):
            for j in range(i + 1, n):
                dist[i, j] = dist[j, i] = js_distance(nets[i].supra,
                                                      nets[j].supra)
                rows.append((names[i], names[j], float(dist[i, j])))
        for i in range(n):
            mean = dist[i].sum() / (n - 1)
            rows.append((names[i], "__mean__", float(mean)))
        save_table(args.out, rows, header=("a", "b", "js_distance"))
        inputs = list(args.inputs)
    _write_provenance(args, inputs, [args.out])
    print("wrote %s" % args.out)
    return 0


def cmd_synth(args):
    settings = _settings(args)
    kind = settings.get("kind")
    if kind == "network":
        layers = int(settings.get("layers", 4))
        nodes = int(settings.get("nodes", 32))
        communities = int(settings.get("communities", 4))
        shape = settings.get("blueprint", "spanning")
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=args.seed, spawn_key=(1,)))
        if shape == "spanning":
            blueprint = spanning_blueprint(nodes, layers, communities)
        elif shape == "independent":
            blueprint = independent_blueprint(nodes, layers, communities, rng)
        elif shape == "mixed":
            blueprint = mixed_blueprint(nodes, layers)
        else:
            raise ValidationError("unknown blueprint %r" % shape)
        spec = PlantedSpec(
            layers, nodes, blueprint,
            mu_in=float(settings.get("mu_in", 0.8)),
            mu_out=float(settings.get("mu_out", 0.2)),
            spread=float(settings.get("spread", 0.05)),
            coupling=float(settings.get("coupling", 1.0)),
            seed=args.seed)
        net, truth = planted_multilayer(spec)
        save_network(net, args.out)
        save_partition(truth, args.out + ".truth.partition")
        _write_provenance(args, [], [args.out, args.out + ".truth.partition"])
        print("wrote %s: %d layers, %d nodes, %d planted communities"
              % (args.out, layers, net.total_nodes, truth.community_count))
    elif kind == "trials":
        tensor = coupled_trials(
            int(settings.get("channels", 2)),
            int(settings.get("trials", 40)),
            int(settings.get("samples", 512)),
            float(settings.get("rate", 512.0)),
            _couplings_from(settings.get("couplings", "")),
            snr=float(settings.get("snr", "inf")),
            seed=args.seed)
        save_trials(tensor, args.out)
        _write_provenance(args, [], [args.out])
        print("wrote %s: %d channels, %d trials, %d samples"
              % (args.out, tensor.data.shape[0], tensor.data.shape[1],
                 tensor.data.shape[2]))
    else:
        raise ValidationError("config must set kind=network or kind=trials")
    return 0


if __name__ == "__main__":
    sys.exit(main())
