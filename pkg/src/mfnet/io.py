"""File formats: network, partition, trial tensor, and key=value configs.

All binary payloads are little-endian IEEE-754 float64. Each binary file
starts with a plain-text header of key=value lines terminated by an
"end_header" line; the payload follows immediately after that line's
newline byte.
"""

from __future__ import annotations

import hashlib
import numpy as np

from .core import MultilayerNetwork, Partition, ValidationError

__all__ = [
    "save_network", "load_network",
    "save_partition", "load_partition",
    "save_trials", "load_trials",
    "parse_config", "load_config", "config_digest",
    "save_table",
]

_NETWORK_FORMAT = "mfnet-network"
_TRIALS_FORMAT = "mfnet-trials"
_VERSION = "1"


def _write_header(fh, pairs):
    for key, value in pairs:
        fh.write(("%s=%s\n" % (key, value)).encode("ascii"))
    fh.write(b"end_header\n")


def _read_header(fh, path):
    pairs = {}
    while True:
        line = fh.readline()
        if not line:
            raise ValidationError("%s: header ended before end_header" % path)
        try:
            text = line.decode("ascii").strip()
        except UnicodeDecodeError:
            raise ValidationError("%s: non-ascii bytes in header" % path)
        if text == "end_header":
            return pairs
        if "=" not in text:
            raise ValidationError("%s: malformed header line %r" % (path, text))
        key, _, value = text.partition("=")
        pairs[key.strip()] = value.strip()


def _header_get(pairs, key, path):
    if key not in pairs:
        raise ValidationError("%s: missing header key %r" % (path, key))
    return pairs[key]


def save_network(net, path):
    """Write a network as a text header plus the row-major float64 matrix."""
    with open(path, "wb") as fh:
        _write_header(fh, [
            ("format", _NETWORK_FORMAT),
            ("version", _VERSION),
            ("layer_count", str(net.layer_count)),
            ("nodes_per_layer", ",".join(str(n) for n in net.nodes_per_layer)),
            ("layer_names", ",".join(net.layer_names)),
            ("node_labels", ",".join(net.node_labels)),
        ])
        fh.write(np.ascontiguousarray(net.supra, dtype="<f8").tobytes())


def load_network(path):
    """Read a network file, validating structure before construction.

    The matrix must be symmetric within 1e-12; it is then exactly
    symmetrized as (A + A.T) / 2. Asymmetry, negative weights, and nonzero
    diagonal entries are reported with the first offending index pair.
    """
    with open(path, "rb") as fh:
        head = _read_header(fh, path)
        payload = fh.read()
    if _header_get(head, "format", path) != _NETWORK_FORMAT:
        raise ValidationError("%s: not a network file" % path)
    if _header_get(head, "version", path) != _VERSION:
        raise ValidationError("%s: unsupported version %r" % (path, head["version"]))
    layer_count = _parse_int(head, "layer_count", path)
    sizes = _parse_int_list(head, "nodes_per_layer", path)
    if len(sizes) != layer_count:
        raise ValidationError(
            "%s: layer_count=%d but %d layer sizes listed"
            % (path, layer_count, len(sizes)))
    names = _header_get(head, "layer_names", path).split(",")
    labels = _header_get(head, "node_labels", path).split(",")
    n = sum(sizes)
    expected = n * n * 8
    if len(payload) != expected:
        raise ValidationError(
            "%s: payload holds %d bytes, expected %d for a %dx%d matrix"
            % (path, len(payload), expected, n, n))
    a = np.frombuffer(payload, dtype="<f8").reshape(n, n)
    try:
        return MultilayerNetwork(sizes, a, layer_names=names, node_labels=labels)
    except ValidationError as exc:
        raise ValidationError("%s: %s" % (path, exc)) from None


def save_partition(part, path):
    """Write a partition as a text file of "global_index community_id" lines."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("N=%d\n" % part.size)
        fh.write("K=%d\n" % part.community_count)
        for i, c in enumerate(part.assignment):
            fh.write("%d %d\n" % (i, c))


def load_partition(path):
    """Read a partition file and validate its header against the body."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 3 or not lines[0].startswith("N=") or not lines[1].startswith("K="):
        raise ValidationError("%s: expected N= and K= header lines" % path)
    n = int(lines[0][2:])
    k = int(lines[1][2:])
    if len(lines) - 2 != n:
        raise ValidationError(
            "%s: header says N=%d but %d node lines follow" % (path, n, len(lines) - 2))
    labels = np.empty(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    for ln in lines[2:]:
        fields = ln.split()
        if len(fields) != 2:
            raise ValidationError("%s: malformed node line %r" % (path, ln))
        i, c = int(fields[0]), int(fields[1])
        if not 0 <= i < n:
            raise ValidationError("%s: node index %d out of range" % (path, i))
        if seen[i]:
            raise ValidationError("%s: duplicate node index %d" % (path, i))
        seen[i] = True
        labels[i] = c
    part = Partition(labels)
    if part.community_count != k:
        raise ValidationError(
            "%s: header says K=%d but %d communities found"
            % (path, k, part.community_count))
    return part


def save_trials(trials, path):
    """Write a trial tensor with float64 samples in (channel, trial, sample) order."""
    data = trials.data
    with open(path, "wb") as fh:
        _write_header(fh, [
            ("format", _TRIALS_FORMAT),
            ("version", _VERSION),
            ("channels", str(data.shape[0])),
            ("trials", str(data.shape[1])),
            ("samples", str(data.shape[2])),
            ("sample_rate", repr(float(trials.sample_rate))),
            ("channel_names", ",".join(trials.channel_names)),
        ])
        fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def load_trials(path):
    """Read a trial tensor file."""
    from .connectivity import TrialTensor

    with open(path, "rb") as fh:
        head = _read_header(fh, path)
        payload = fh.read()
    if _header_get(head, "format", path) != _TRIALS_FORMAT:
        raise ValidationError("%s: not a trial tensor file" % path)
    shape = tuple(_parse_int(head, key, path)
                  for key in ("channels", "trials", "samples"))
    rate = float(_header_get(head, "sample_rate", path))
    names = _header_get(head, "channel_names", path).split(",")
    expected = shape[0] * shape[1] * shape[2] * 8
    if len(payload) != expected:
        raise ValidationError(
            "%s: payload holds %d bytes, expected %d" % (path, len(payload), expected))
    data = np.frombuffer(payload, dtype="<f8").reshape(shape)
    return TrialTensor(data, rate, channel_names=names)


def _parse_int(head, key, path):
    value = _header_get(head, key, path)
    try:
        return int(value)
    except ValueError:
        raise ValidationError("%s: header key %r is not an integer: %r"
                              % (path, key, value)) from None


def _parse_int_list(head, key, path):
    value = _header_get(head, key, path)
    try:
        return [int(v) for v in value.split(",") if v != ""]
    except ValueError:
        raise ValidationError("%s: header key %r is not an integer list: %r"
                              % (path, key, value)) from None


def parse_config(text):
    """Parse key=value lines into a dict; '#' starts a comment."""
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError("malformed config line %r" % raw.strip())
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_digest(path):
    """Hex sha256 of a config file's bytes, for provenance records."""
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def save_table(path, rows, header=None):
    """Write rows of values as tab-separated text, one row per line."""
    with open(path, "w", encoding="ascii") as fh:
        if header is not None:
            fh.write("\t".join(str(h) for h in header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)
