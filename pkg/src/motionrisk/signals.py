"""Smoothing and numerical differentiation of metric streams.

The smoother is a zero-phase low-pass: a Butterworth filter run forward
then backward, so FilterSpec.order is the effective order after both
passes (a design order of order/2 per pass). The default, a 6 Hz cutoff
at effective order 4, is standard practice for human-movement kinematics.

differentiate() uses central differences at interior samples and one-sided
differences at both ends, which is exact for sampled quadratics at the
interior.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, filtfilt

from .types import MetricStream

#: unit tag promotion under one time derivative
_UNIT_DERIVATIVE = {
    "deg": "deg/s",
    "deg/s": "deg/s²",
    "deg/s²": "deg/s³",
    "m": "m/s",
    "m/s": "m/s²",
    "N": "N/s",
    "BW": "BW/s",
}


@dataclass(frozen=True)
class FilterSpec:
    """Zero-phase low-pass parameters.

    cutoff_hz is the corner frequency; order is the effective order after
    the forward+backward pass and must be a positive even integer.
    """

    cutoff_hz: float = 6.0
    order: int = 4

    def __post_init__(self):
        if not (self.cutoff_hz > 0):
            raise ValueError(f"cutoff must be > 0 Hz, got {self.cutoff_hz}")
        if self.order < 2 or self.order % 2 != 0:
            raise ValueError(f"effective order must be a positive even integer, got {self.order}")


def smooth_samples(samples: np.ndarray, rate_hz: float, spec: FilterSpec) -> np.ndarray:
    """Zero-phase low-pass over a raw sample array."""
    nyquist = rate_hz / 2.0
    if spec.cutoff_hz >= nyquist:
        raise ValueError(
            f"cutoff {spec.cutoff_hz} Hz must be below the Nyquist rate {nyquist} Hz"
        )
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) < 3 * spec.order:
        raise ValueError(
            f"stream too short to filter: {len(samples)} samples < 3 x order ({3 * spec.order})"
        )
    b, a = butter(spec.order // 2, spec.cutoff_hz / nyquist, btype="low")
    padlen = min(3 * spec.order, len(samples) - 1)
    return filtfilt(b, a, samples, padtype="even", padlen=padlen)


def smooth(stream: MetricStream, spec: FilterSpec = FilterSpec()) -> MetricStream:
    """Zero-phase low-pass; unit tag and length are preserved."""
    return stream.with_samples(smooth_samples(stream.samples, stream.frame_rate_hz, spec))


def differentiate_samples(samples: np.ndarray, rate_hz: float) -> np.ndarray:
    """Time derivative: central differences inside, one-sided at the ends."""
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) < 2:
        raise ValueError(f"differentiation needs at least 2 samples, got {len(samples)}")
    out = np.empty_like(samples)
    out[1:-1] = (samples[2:] - samples[:-2]) * (rate_hz / 2.0)
    out[0] = (samples[1] - samples[0]) * rate_hz
    out[-1] = (samples[-1] - samples[-2]) * rate_hz
    return out


def differentiate(stream: MetricStream) -> MetricStream:
    """Differentiate a stream, promoting its unit tag (deg -> deg/s, ...)."""
    unit = _UNIT_DERIVATIVE.get(stream.unit, f"{stream.unit}/s")
    return stream.with_samples(
        differentiate_samples(stream.samples, stream.frame_rate_hz), unit=unit
    )
