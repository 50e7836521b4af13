"""Assemble a multilayer network from multichannel multi-trial signals.

One layer per frequency band; node (u, h) is channel u observed in band
h. Intra-layer weights are windowed band averages of the inter-trial
phase-locking value between two channels. Inter-layer weights, for bands
h below k, average the modulation index with the phase read at the source
node in band h and the amplitude read at the target node in band k; the
reverse block is the transpose, which keeps the supra-adjacency exactly
symmetric. Same-channel cross-band edges are kept (they are off-diagonal
in the supra-adjacency); within-layer self edges are not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import MultilayerNetwork, ValidationError
from .tfd import MAGNITUDE_FLOOR, TfdConfig, intra_layer_weight, plv, rid_rihaczek

__all__ = ["Band", "BandSet", "default_bands", "TrialTensor", "build_network"]


@dataclass(frozen=True)
class Band:
    name: str
    f_low: float
    f_high: float


class BandSet:
    """Ordered, non-overlapping, ascending frequency bands in Hz."""

    def __init__(self, bands):
        parsed = []
        for b in bands:
            band = b if isinstance(b, Band) else Band(str(b[0]), float(b[1]), float(b[2]))
            if not band.f_low < band.f_high:
                raise ValidationError(
                    "band %s: need f_low < f_high" % band.name)
            parsed.append(band)
        for prev, cur in zip(parsed, parsed[1:]):
            if cur.f_low <= prev.f_high:
                raise ValidationError(
                    "bands %s and %s overlap or are out of order"
                    % (prev.name, cur.name))
        if not parsed:
            raise ValidationError("need at least one band")
        self.bands = tuple(parsed)

    def __len__(self):
        return len(self.bands)

    def __iter__(self):
        return iter(self.bands)

    def __getitem__(self, i):
        return self.bands[i]

    @property
    def names(self):
        return tuple(b.name for b in self.bands)


def default_bands():
    """The standard four bands: theta 4-7, alpha 8-12, beta 13-30, and
    gamma 31-100 Hz."""
    return BandSet([
        Band("theta", 4.0, 7.0),
        Band("alpha", 8.0, 12.0),
        Band("beta", 13.0, 30.0),
        Band("gamma", 31.0, 100.0),
    ])


@dataclass
class TrialTensor:
    """Real-valued signals indexed (channel, trial, sample) at one rate."""

    data: np.ndarray
    sample_rate: float
    channel_names: list = field(default_factory=list)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise ValidationError("data must be (channel, trial, sample)")
        if data.shape[1] < 1:
            raise ValidationError("need at least one trial")
        if data.shape[2] < 4:
            raise ValidationError("trials must hold at least 4 samples")
        if not self.sample_rate > 0:
            raise ValidationError("sample_rate must be positive")
        if not np.isfinite(data).all():
            raise ValidationError("signals contain non-finite samples")
        self.data = data
        if not self.channel_names:
            self.channel_names = ["ch%d" % i for i in range(data.shape[0])]
        if len(self.channel_names) != data.shape[0]:
            raise ValidationError("need one name per channel")

    @property
    def channels(self):
        return self.data.shape[0]

    @property
    def trials(self):
        return self.data.shape[1]

    @property
    def samples(self):
        return self.data.shape[2]


def _default_window(rate, samples):
    start = int(round(0.025 * rate))
    stop = int(round(0.075 * rate))
    stop = min(stop, samples)
    if not 0 <= start < stop:
        raise ValidationError("default 25-75 ms window does not fit %d "
                              "samples at %g Hz" % (samples, rate))
    return start, stop


def build_network(trials, bands=None, cfg=None):
    """Build the multilayer network of a trial tensor.

    Parameters
    ----------
    trials : TrialTensor
        At least two channels.
    bands : BandSet, optional
        Defaults to theta/alpha/beta/gamma.
    cfg : TfdConfig, optional
        Transform settings; a missing window defaults to 25-75 ms.

    Returns
    -------
    MultilayerNetwork
        One layer per band, nodes labeled "<channel>:<band>".
    """
    if bands is None:
        bands = default_bands()
    if cfg is None:
        cfg = TfdConfig()
    n_ch, n_tr = trials.channels, trials.trials
    if n_ch < 2:
        raise ValidationError("need at least two channels")
    rate = trials.sample_rate
    for band in bands:
        if band.f_high > rate / 2.0:
            raise ValidationError("band %s tops out above the Nyquist "
                                  "frequency %g Hz" % (band.name, rate / 2.0))
    window = cfg.window if cfg.window is not None \
        else _default_window(rate, trials.samples)
    w0, w1 = window
    if w1 > trials.samples:
        raise ValidationError("window exceeds the %d-sample trials"
                              % trials.samples)

    # One transform per (channel, trial); keep only the windowed band bins
    # plus each map's peak magnitude (the phase floor reference).
    probe = rid_rihaczek(trials.data[0, 0], cfg, sample_rate=rate)
    n_bins = probe.n
    band_bins = [probe.band_bins(b.f_low, b.f_high) for b in bands]
    sel = np.concatenate(band_bins)
    positions, offset = [], 0
    for bins in band_bins:
        positions.append(slice(offset, offset + bins.size))
        offset += bins.size

    n_sel = sel.size
    n_t = w1 - w0
    extracts = np.empty((n_ch, n_tr, n_t, n_sel), dtype=np.complex128)
    peaks = np.empty((n_ch, n_tr))
    for c in range(n_ch):
        for k in range(n_tr):
            cmap = rid_rihaczek(trials.data[c, k], cfg, sample_rate=rate)
            peaks[c, k] = np.abs(cmap.values).max()
            extracts[c, k] = cmap.values[w0:w1, sel]
    floors = MAGNITUDE_FLOOR * peaks

    n_layers = len(bands)
    supra = np.zeros((n_layers * n_ch, n_layers * n_ch))

    # Intra-layer: windowed band-mean PLV per channel pair.
    magnitudes = np.abs(extracts)
    for h in range(n_layers):
        pos = positions[h]
        base = h * n_ch
        for u in range(n_ch):
            for v in range(u + 1, n_ch):
                prod = extracts[u, :, :, pos] * np.conj(extracts[v, :, :, pos])
                defined = (magnitudes[u, :, :, pos] >= floors[u, :, None, None]) \
                    & (magnitudes[v, :, :, pos] >= floors[v, :, None, None])
                phases = np.angle(prod)
                phases[~defined] = np.nan
                plv_map = plv(phases)
                w = intra_layer_weight(plv_map, np.arange(plv_map.shape[1]),
                                       (0, plv_map.shape[0]))
                supra[base + u, base + v] = supra[base + v, base + u] = w

    # Inter-layer: modulation index with the phase at the lower band's
    # node and the band-integrated amplitude envelope at the higher
    # band's node (magnitude of the complex time marginal over the band).
    t_abs = np.arange(w0, w1)
    for h in range(n_layers):
        pos_h = positions[h]
        f_bins = sel[pos_h]
        rotation = np.exp(2j * np.pi * f_bins[None, :] * t_abs[:, None] / n_bins)
        for k in range(h + 1, n_layers):
            pos_k = positions[k]
            env = np.abs(extracts[:, :, :, pos_k].sum(axis=-1))
            env_sq = env * env
            block = np.empty((n_ch, n_ch))
            for u in range(n_ch):
                xu = extracts[u, :, :, pos_h]
                defined = magnitudes[u, :, :, pos_h] >= floors[u, :, None, None]
                phase_vec = np.where(defined, np.exp(1j * np.angle(xu * rotation)), 0.0)
                mask = defined.astype(np.float64)
                counts = mask.sum(axis=0)
                z = np.einsum("ktp,vkt->vtp", phase_vec, env)
                s2 = np.einsum("ktp,vkt->vtp", mask, env_sq)
                with np.errstate(invalid="ignore", divide="ignore"):
                    mi = np.abs(z) / np.sqrt(counts[None, :, :] * s2)
                cnt3 = np.broadcast_to(counts[None, :, :], mi.shape)
                mi[(s2 == 0.0) & (cnt3 > 0)] = 0.0
                mi[cnt3 == 0] = np.nan
                flat = mi.reshape(n_ch, -1)
                got = np.zeros(n_ch)
                any_defined = ~np.isnan(flat).all(axis=1)
                got[any_defined] = np.nanmean(flat[any_defined], axis=1)
                block[u, :] = got
            supra[h * n_ch:(h + 1) * n_ch, k * n_ch:(k + 1) * n_ch] = block
            supra[k * n_ch:(k + 1) * n_ch, h * n_ch:(h + 1) * n_ch] = block.T

    labels = ["%s:%s" % (trials.channel_names[u], bands[h].name)
              for h in range(n_layers) for u in range(n_ch)]
    return MultilayerNetwork([n_ch] * n_layers, supra,
                             layer_names=bands.names, node_labels=labels)
