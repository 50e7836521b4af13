"""Ground-truthed synthetic inputs: planted multilayer networks and
coupled-oscillator trial tensors.

Planted networks draw every pairwise weight from a truncated normal whose
mean depends on whether the pair shares a community; communities may span
several layers or stay private to one. Trial tensors superpose noise with
phase-locked tone pairs and phase-amplitude-coupled pairs whose modulator
is locked to the trial clock, so coupling survives cross-trial statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MultilayerNetwork, Partition, ValidationError

__all__ = [
    "PlantedSpec",
    "planted_multilayer",
    "spanning_blueprint",
    "independent_blueprint",
    "mixed_blueprint",
    "PhaseLock",
    "PacLink",
    "coupled_trials",
]


@dataclass(frozen=True)
class PlantedSpec:
    """Recipe for a planted-community multilayer network.

    blueprint lists communities as (entity index tuple, layer index tuple);
    every (entity, layer) node must appear in exactly one community.
    Intra-layer in-community weights center on mu_in, everything else on
    mu_out, except inter-layer in-community pairs which center on
    mu_out + coupling * (mu_in - mu_out). Weights are clipped to [0, 1].
    """

    layer_count: int
    nodes_per_layer: int
    blueprint: tuple
    mu_in: float = 0.8
    mu_out: float = 0.2
    spread: float = 0.05
    coupling: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.mu_in > self.mu_out >= 0:
            raise ValidationError("need mu_in > mu_out >= 0")
        if self.spread < 0:
            raise ValidationError("spread must be nonnegative")


def planted_multilayer(spec):
    """Generate (network, ground-truth partition) from a planted spec."""
    L, per = spec.layer_count, spec.nodes_per_layer
    n = L * per
    labels = np.full(n, -1, dtype=np.int64)
    for cid, (entities, layers) in enumerate(spec.blueprint):
        for h in layers:
            if not 0 <= h < L:
                raise ValidationError("blueprint layer %d out of range" % h)
            for u in entities:
                if not 0 <= u < per:
                    raise ValidationError("blueprint entity %d out of range" % u)
                i = h * per + u
                if labels[i] != -1:
                    raise ValidationError(
                        "node (%d, %d) assigned to two communities" % (u, h))
                labels[i] = cid
    if (labels == -1).any():
        i = int(np.argmax(labels == -1))
        raise ValidationError(
            "blueprint leaves node (%d, %d) unassigned" % (i % per, i // per))

    layer_of = np.repeat(np.arange(L), per)
    same_comm = labels[:, None] == labels[None, :]
    same_layer = layer_of[:, None] == layer_of[None, :]
    mu_inter = spec.mu_out + spec.coupling * (spec.mu_in - spec.mu_out)
    means = np.where(same_comm & same_layer, spec.mu_in,
                     np.where(same_comm, mu_inter, spec.mu_out))

    rng = np.random.default_rng(spec.seed)
    rows, cols = np.triu_indices(n, k=1)
    weights = rng.normal(means[rows, cols], spec.spread)
    np.clip(weights, 0.0, 1.0, out=weights)
    supra = np.zeros((n, n))
    supra[rows, cols] = weights
    supra[cols, rows] = weights
    net = MultilayerNetwork([per] * L, supra)
    return net, Partition(labels)


def _balanced_groups(n_entities, k, rng=None):
    order = np.arange(n_entities)
    if rng is not None:
        order = rng.permutation(n_entities)
    return [tuple(int(v) for v in part)
            for part in np.array_split(order, k)]


def spanning_blueprint(n_entities, layer_count, k, rng=None):
    """k balanced communities, each spanning every layer."""
    groups = _balanced_groups(n_entities, k, rng)
    all_layers = tuple(range(layer_count))
    return tuple((g, all_layers) for g in groups)


def independent_blueprint(n_entities, layer_count, k, rng):
    """Per-layer private communities with an independent split per layer."""
    out = []
    for h in range(layer_count):
        for g in _balanced_groups(n_entities, k, rng):
            out.append((g, (h,)))
    return tuple(out)


def mixed_blueprint(n_entities, layer_count, rng=None):
    """Three cross-layer communities plus one layer-private community in
    each layer past the second.

    Two large entity groups span every layer. A third, smaller group is a
    cross-layer community over the first two layers only; in each later
    layer the same entities form a layer-private community instead. With
    four layers this yields the 3-cross + 2-private mix. The big spanning
    groups keep every late-layer block's weight mass above the uniform
    level, so a private community's background rows toward other layers
    stay below their expected strength and the optimizer is never paid to
    absorb the private entities into the spanning groups.
    """
    if layer_count < 3:
        raise ValidationError("mixed blueprint needs at least 3 layers")
    if n_entities < 16:
        raise ValidationError("mixed blueprint needs at least 16 entities")
    order = np.arange(n_entities)
    if rng is not None:
        order = rng.permutation(n_entities)
    small = max(2, round(n_entities / 8))
    big = n_entities - small
    groups = [tuple(int(v) for v in part)
              for part in np.split(order, [(big + 1) // 2, big])]
    all_layers = tuple(range(layer_count))
    out = [(groups[0], all_layers), (groups[1], all_layers),
           (groups[2], (0, 1))]
    out.extend((groups[2], (h,)) for h in range(2, layer_count))
    return tuple(out)


@dataclass(frozen=True)
class PhaseLock:
    """Cross-channel phase locking: both channels carry the same narrow
    rhythm centered at freq_hz, with a shared per-trial phase offset and a
    fixed lag between them.

    The rhythm is a sum of four unit-spaced tones (freq_hz - 2 .. + 1 Hz)
    rather than a bare tone, so every 1 Hz bin of a band around freq_hz
    sees the locking instead of one bin diluted by three of background.
    """

    u: int
    v: int
    freq_hz: float
    lag_rad: float = math.pi / 5


@dataclass(frozen=True)
class PacLink:
    """Phase-amplitude coupling: channel u carries a slow rhythm whose
    phase multiplies the envelope of channel v's fast carrier.

    The rhythm spans four unit-spaced tones (phase_hz - 2 .. + 1 Hz) and
    keeps the same phase on every trial (locked to the trial clock); only
    the fast carrier's phase varies per trial. Envelope is
    (1 + depth * cos(center tone phase)) / 2. The rhythm's amplitude is
    drawn per trial from modulator_amp, mimicking spontaneous amplitude
    variability; without it the modulator's own flat envelope would be as
    trial-consistent as the coupled target's.
    """

    u: int
    v: int
    phase_hz: float
    amp_hz: float
    depth: float = 1.0
    modulator_amp: tuple = (0.4, 1.6)


def coupled_trials(channels, trials, samples, rate, couplings=(),
                   snr=math.inf, seed=None):
    """Synthesize a trial tensor with the requested couplings.

    Parameters
    ----------
    channels, trials, samples : int
    rate : float
        Sampling rate in Hz.
    couplings : sequence of PhaseLock and PacLink
    snr : float
        Mean tone power divided by noise power per channel; infinity
        disables noise entirely.
    seed : RNG seed material.

    Returns
    -------
    TrialTensor
    """
    from .connectivity import TrialTensor

    for c in couplings:
        if not (0 <= c.u < channels and 0 <= c.v < channels):
            raise ValidationError("coupling channels (%d, %d) outside the "
                                  "%d-channel tensor" % (c.u, c.v, channels))
        top = c.freq_hz + 1.0 if isinstance(c, PhaseLock) else c.amp_hz
        if top > rate / 2.0:
            raise ValidationError("coupling at %g Hz exceeds Nyquist %g Hz"
                                  % (top, rate / 2.0))
        low = c.freq_hz if isinstance(c, PhaseLock) else c.phase_hz
        if isinstance(c, PacLink) and not c.phase_hz + 1.0 < c.amp_hz:
            raise ValidationError("phase band must sit below amplitude band")
        if low <= 2.0:
            raise ValidationError(
                "rhythm center must exceed 2 Hz so all components stay "
                "positive")

    rng = np.random.default_rng(seed)
    t = np.arange(samples) / rate
    tone_power = 0.5  # mean power of a unit-amplitude cosine
    if math.isinf(snr):
        noise_std = 0.0
    else:
        if snr <= 0:
            raise ValidationError("snr must be positive")
        noise_std = math.sqrt(tone_power / snr)
    data = rng.normal(0.0, 1.0, size=(channels, trials, samples)) * noise_std

    # Amplitude per rhythm component; four components keep total rhythm
    # power equal to tone_power.
    comp_amp = math.sqrt(tone_power / 2.0)
    comp_offsets = np.array([-2.0, -1.0, 0.0, 1.0])

    for c in couplings:
        if isinstance(c, PhaseLock):
            offsets = rng.uniform(0.0, 2.0 * np.pi, size=trials)
            base = 2.0 * np.pi * (c.freq_hz + comp_offsets)[:, None] * t
            for ph in base:
                data[c.u] += comp_amp * np.cos(ph[None, :] + offsets[:, None])
                data[c.v] += comp_amp * np.cos(ph[None, :] + offsets[:, None]
                                               + c.lag_rad)
        elif isinstance(c, PacLink):
            psi0 = rng.uniform(0.0, 2.0 * np.pi)
            slow = 2.0 * np.pi * c.phase_hz * t + psi0
            envelope = (1.0 + c.depth * np.cos(slow)) / 2.0
            carrier_offsets = rng.uniform(0.0, 2.0 * np.pi, size=trials)
            amp_lo, amp_hi = c.modulator_amp
            mod_amps = rng.uniform(amp_lo, amp_hi, size=trials)
            fast = 2.0 * np.pi * c.amp_hz * t
            rhythm = comp_amp * np.cos(
                2.0 * np.pi * (c.phase_hz + comp_offsets)[:, None] * t
                + psi0).sum(axis=0)
            data[c.u] += mod_amps[:, None] * rhythm[None, :]
            data[c.v] += envelope[None, :] * np.cos(
                fast[None, :] + carrier_offsets[:, None])
        else:
            raise ValidationError("unknown coupling type %r" % (c,))

    names = ["ch%d" % i for i in range(channels)]
    return TrialTensor(data, rate, channel_names=names)
