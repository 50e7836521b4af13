"""Complex time-frequency distribution and coupling measures.

The distribution is a Cohen's-class transform computed in the ambiguity
domain. The local autocorrelation uses the one-sided lag form, whose lag
transform already equals the product form z(t) Z*(f) exp(-j 2 pi f t / n),
so only the cross-term-suppressing Gaussian kernel exp(-(theta*tau)^2 /
sigma) is applied before transforming back to (time, frequency). Two
identities hold exactly by construction: a pure complex tone at a grid
frequency concentrates on its own bin untouched by the kernel (its
ambiguity support sits where the kernel is 1), and the map's grand sum
times the bin width 1/n equals the analytic signal's energy.

From the map: phase differences and their inter-trial consistency (PLV),
band-limited amplitude envelopes, single-bin phase series, and the
amplitude-normalized modulation index that quantifies phase-amplitude
coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .core import ValidationError

__all__ = [
    "TfdConfig",
    "TimeFrequencyMap",
    "rid_rihaczek",
    "phase_difference",
    "plv",
    "intra_layer_weight",
    "amplitude_envelope",
    "low_freq_phase",
    "modulation_index",
    "inter_layer_weight",
]

# Relative magnitude below which a cell's phase is undefined.
MAGNITUDE_FLOOR = 1e-12


@dataclass(frozen=True)
class TfdConfig:
    """Transform settings.

    choi_williams_sigma controls cross-term suppression (smaller is more
    aggressive). frequency_bins, when set, zero-pads the signal to that
    length before the transform. window is the analysis span in samples as
    a half-open (start, stop); None means the span is chosen downstream.
    """

    choi_williams_sigma: float = 0.5
    frequency_bins: int | None = None
    window: tuple | None = None

    def __post_init__(self):
        if not self.choi_williams_sigma > 0:
            raise ValidationError("choi_williams_sigma must be positive")
        if self.frequency_bins is not None and self.frequency_bins < 4:
            raise ValidationError("frequency_bins must be at least 4")
        if self.window is not None:
            start, stop = self.window
            if not 0 <= start < stop:
                raise ValidationError("window must satisfy 0 <= start < stop")


@dataclass
class TimeFrequencyMap:
    """Complex distribution over (time sample, frequency bin).

    values[t, f] covers t in 0..n-1 samples and f in 0..n-1 bins of width
    sample_rate / n Hz. bin_step is the quadrature weight (1/n) that makes
    sum(values) * bin_step equal the signal energy.
    """

    values: np.ndarray
    sample_rate: float
    channel: int | None = None
    trial: int | None = None

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def bin_step(self):
        return 1.0 / self.n

    @property
    def freqs_hz(self):
        return np.arange(self.n) * (self.sample_rate / self.n)

    def magnitude_floor(self):
        return MAGNITUDE_FLOOR * float(np.abs(self.values).max())

    def band_bins(self, f_low, f_high):
        """Indices of bins whose frequency lies in [f_low, f_high] Hz."""
        freqs = self.freqs_hz
        bins = np.flatnonzero((freqs >= f_low) & (freqs <= f_high))
        if bins.size == 0:
            raise ValidationError(
                "band [%g, %g] Hz holds no frequency bins" % (f_low, f_high))
        return bins


def rid_rihaczek(signal, cfg=None, sample_rate=1.0):
    """Complex reduced-interference distribution of one signal.

    Real input is converted to its analytic form (scaled by 1/sqrt(2) so
    the map's total mass matches the real signal's energy); complex input
    is used as-is. Output is an n-by-n map, n the (possibly padded) signal
    length.
    """
    if cfg is None:
        cfg = TfdConfig()
    x = np.asarray(signal)
    if x.ndim != 1:
        raise ValidationError("signal must be 1-D")
    if x.shape[0] < 4:
        raise ValidationError("signal must hold at least 4 samples")
    if not np.isfinite(x).all():
        raise ValidationError("signal contains non-finite samples")
    if np.iscomplexobj(x):
        z = x.astype(np.complex128)
    else:
        z = hilbert(x.astype(np.float64)) / math.sqrt(2.0)
    if cfg.frequency_bins is not None and cfg.frequency_bins > z.shape[0]:
        z = np.concatenate([z, np.zeros(cfg.frequency_bins - z.shape[0],
                                        dtype=np.complex128)])
    n = z.shape[0]

    # Local autocorrelation R[t, tau] = z[t] conj(z[t - tau mod n]).
    t_idx = np.arange(n)
    lag_idx = (t_idx[:, None] - t_idx[None, :]) % n
    r = z[:, None] * np.conj(z)[lag_idx]

    # To the ambiguity plane over t, apply the Gaussian kernel on the
    # signed (theta, tau) grid, and back.
    amb = np.fft.fft(r, axis=0)
    theta = 2.0 * np.pi * np.fft.fftfreq(n)
    tau = np.fft.fftfreq(n, d=1.0 / n)
    kernel = np.exp(-np.square(theta[:, None] * tau[None, :])
                    / cfg.choi_williams_sigma)
    smoothed = np.fft.ifft(amb * kernel, axis=0)
    values = np.fft.fft(smoothed, axis=1)
    return TimeFrequencyMap(values=values, sample_rate=float(sample_rate))


def phase_difference(cu, cv):
    """Elementwise phase of Cu * conj(Cv) in (-pi, pi].

    Cells where either map's magnitude falls below its own magnitude floor
    are undefined and returned as NaN.
    """
    vu, vv = cu.values, cv.values
    if vu.shape != vv.shape:
        raise ValidationError("maps have shapes %r and %r" % (vu.shape, vv.shape))
    phase = np.angle(vu * np.conj(vv))
    undefined = (np.abs(vu) < cu.magnitude_floor()) \
        | (np.abs(vv) < cv.magnitude_floor())
    phase[undefined] = np.nan
    return phase


def plv(phase_diffs):
    """Inter-trial phase-locking value per cell, in [0, 1].

    Input stacks one phase-difference matrix per trial. Undefined (NaN)
    cells are excluded per cell; a cell with no defined trial is NaN.
    """
    stack = np.asarray(phase_diffs, dtype=np.float64)
    if stack.ndim != 3 or stack.shape[0] == 0:
        raise ValidationError("need a nonempty stack of phase matrices")
    defined = ~np.isnan(stack)
    vectors = np.where(defined, np.exp(1j * np.where(defined, stack, 0.0)), 0.0)
    counts = defined.sum(axis=0)
    with np.errstate(invalid="ignore"):
        out = np.abs(vectors.sum(axis=0)) / counts
    out[counts == 0] = np.nan
    return out


def _window_mean(values):
    defined = ~np.isnan(values)
    if not defined.any():
        return 0.0
    return float(values[defined].mean())


def intra_layer_weight(plv_map, band_bins, window):
    """Mean PLV over a time window and a band's frequency bins."""
    band_bins = np.asarray(band_bins)
    if band_bins.size == 0:
        raise ValidationError("band holds no frequency bins")
    start, stop = window
    cells = plv_map[start:stop, :][:, band_bins]
    if cells.size == 0:
        raise ValidationError("window holds no samples")
    return _window_mean(cells)


def amplitude_envelope(cmap, band_bins):
    """Magnitude of the band-limited time marginal, one value per sample."""
    band_bins = np.asarray(band_bins)
    if band_bins.size == 0:
        raise ValidationError("band holds no frequency bins")
    marginal = cmap.values[:, band_bins].sum(axis=1) * cmap.bin_step
    return np.abs(marginal)


def low_freq_phase(cmap, f_bin):
    """Phase series at one frequency bin, in (-pi, pi].

    The map's cells carry a demodulation factor exp(-j 2 pi f t / n); the
    factor is multiplied back out so the returned series advances at the
    oscillation's own rate (for a pure tone at the bin, the unwrapped
    slope is 2 pi times the tone frequency). Cells below the magnitude
    floor are NaN.
    """
    n = cmap.n
    if not 0 <= f_bin < n:
        raise ValidationError("frequency bin %d off the grid" % f_bin)
    column = cmap.values[:, f_bin]
    t = np.arange(n)
    rotated = column * np.exp(2j * np.pi * f_bin * t / n)
    phase = np.angle(rotated)
    phase[np.abs(column) < cmap.magnitude_floor()] = np.nan
    return phase


def modulation_index(amps, phases):
    """Amplitude-normalized phase-amplitude coupling per time point.

    MI(t) = |sum_k a_k(t) exp(j phi_k(t))| / (sqrt(K) * sqrt(sum_k
    a_k(t)^2)) over the K trials, which lies in [0, 1]. Trials whose phase
    is undefined (NaN) at t are excluded there; a point with every trial
    undefined is NaN, and a point where all amplitudes vanish is 0.
    """
    a = np.asarray(amps, dtype=np.float64)
    p = np.asarray(phases, dtype=np.float64)
    if a.shape != p.shape or a.ndim != 2 or a.shape[0] == 0:
        raise ValidationError("need matching (trial, time) amplitude and "
                              "phase arrays")
    if np.nanmin(a) < 0:
        raise ValidationError("amplitudes must be nonnegative")
    defined = ~(np.isnan(p) | np.isnan(a))
    az = np.where(defined, a, 0.0)
    vectors = az * np.exp(1j * np.where(defined, p, 0.0))
    counts = defined.sum(axis=0)
    power = (az * az).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.abs(vectors.sum(axis=0)) / np.sqrt(counts * power)
    out[(counts > 0) & (power == 0.0)] = 0.0
    out[counts == 0] = np.nan
    return out


def inter_layer_weight(mi_values):
    """Mean modulation index over a (time, phase bin, amplitude bin) grid."""
    values = np.asarray(mi_values, dtype=np.float64)
    if values.size == 0:
        raise ValidationError("empty modulation index grid")
    return _window_mean(values)
