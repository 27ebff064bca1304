"""Real-input spectra and low-pass truncation.

Contexts and targets are embedded in the frequency domain through a
one-sided discrete Fourier transform. Dimensionality reduction keeps the
lowest-frequency bins and discards the rest; discarded bins are reinstated
as zeros before inverting back to the time domain.

Conventions: the forward transform is unscaled, the inverse carries the
1/n factor (numpy's default), so ``inverse_rft(forward_rft(x)) == x``. All
functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidFilter, MalformedSpectrum, SignalTooShort


def full_bin_count(n: int) -> int:
    """Number of one-sided spectrum bins for a real signal of length ``n``."""
    return n // 2 + 1


def filtered_bin_count(n: int, alpha: float) -> int:
    """Bins retained when keeping the lowest ``alpha`` fraction of frequencies.

    Rounds up, so the DC bin always survives and ``alpha == 1`` keeps
    every bin.
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidFilter(f"alpha must be in (0, 1], got {alpha}")
    return math.ceil(alpha * full_bin_count(n))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided spectrum of a real signal.

    ``bins`` holds complex coefficients ordered lowest frequency first
    (bin 0 is the DC term). ``original_length`` is the length of the real
    signal the spectrum came from, which fixes the full one-sided bin
    count ``original_length // 2 + 1``; a filtered spectrum holds fewer.
    """

    bins: np.ndarray
    original_length: int


@dataclass(frozen=True)
class FilterSpec:
    """Retained-bin counts for a given filter fraction and window lengths."""

    alpha: float
    context_bins: int
    target_bins: int

    @classmethod
    def for_lengths(cls, alpha: float, context_length: int, horizon: int) -> "FilterSpec":
        return cls(
            alpha=alpha,
            context_bins=filtered_bin_count(context_length, alpha),
            target_bins=filtered_bin_count(horizon, alpha),
        )


def forward_rft(signal) -> Spectrum:
    """One-sided discrete Fourier transform of a real signal.

    Parameters
    ----------
    signal : array_like, shape (n,)
        Real signal, ``n >= 2``.

    Returns
    -------
    Spectrum with ``n // 2 + 1`` bins and unit forward scaling.
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise SignalTooShort(f"expected a 1-D signal, got shape {x.shape}")
    if x.shape[0] < 2:
        raise SignalTooShort(f"signal length must be >= 2, got {x.shape[0]}")
    return Spectrum(bins=np.fft.rfft(x), original_length=x.shape[0])


def inverse_rft(spec: Spectrum) -> np.ndarray:
    """Invert a full one-sided spectrum back to a real signal.

    The spectrum must carry all ``original_length // 2 + 1`` bins; a
    filtered spectrum has to be run through :func:`pad_spectrum` first.
    """
    n = spec.original_length
    expected = full_bin_count(n)
    if spec.bins.shape[0] != expected:
        raise MalformedSpectrum(
            f"spectrum has {spec.bins.shape[0]} bins but length {n} requires {expected}; "
            "pad filtered spectra before inverting"
        )
    return np.fft.irfft(spec.bins, n=n)


def lowpass(spec: Spectrum, keep: int) -> Spectrum:
    """Keep the lowest ``keep`` bins, discarding the rest."""
    if not 1 <= keep <= spec.bins.shape[0]:
        raise InvalidFilter(
            f"keep must be in [1, {spec.bins.shape[0]}], got {keep}"
        )
    return Spectrum(bins=spec.bins[:keep].copy(), original_length=spec.original_length)


def pad_spectrum(spec: Spectrum) -> Spectrum:
    """Reinstate discarded high-frequency bins as zeros."""
    full = full_bin_count(spec.original_length)
    k = spec.bins.shape[0]
    if k > full:
        raise MalformedSpectrum(
            f"spectrum has {k} bins but length {spec.original_length} allows at most {full}"
        )
    if k == full:
        return Spectrum(bins=spec.bins.copy(), original_length=spec.original_length)
    padded = np.zeros(full, dtype=np.complex128)
    padded[:k] = spec.bins
    return Spectrum(bins=padded, original_length=spec.original_length)
