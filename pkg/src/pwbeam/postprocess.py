"""Envelope detection and log compression."""

from __future__ import annotations

import numpy as np

from .core import BeamformedRF, BModeImage, EnvelopeImage
from .errors import AllZeroEnvelope, ColumnTooShort


def envelope(rf: BeamformedRF) -> EnvelopeImage:
    """Magnitude of the analytic signal along each axial line.

    Frequency-domain Hilbert transform: negative frequencies zeroed, positive
    doubled, DC and Nyquist kept once. The FFT length is the next power of two
    >= nz (zero padded, then truncated); padding perturbs only samples near
    the column ends.
    """
    v = rf.values
    nz = v.shape[0]
    if nz < 8:
        raise ColumnTooShort("envelope needs >= 8 axial samples per column")
    nfft = 1 << (nz - 1).bit_length()
    spec = np.fft.fft(v, n=nfft, axis=0)
    h = np.zeros(nfft)
    h[0] = 1.0
    h[nfft // 2] = 1.0
    h[1:nfft // 2] = 2.0
    analytic = np.fft.ifft(spec * h[:, None], axis=0)[:nz]
    return EnvelopeImage(np.abs(analytic), rf.grid)


def log_compress(env: EnvelopeImage, dynamic_range_db: float = 60.0) -> BModeImage:
    """B = 20 log10(env / max(env)), clipped to [-DR, 0]."""
    peak = env.values.max()
    if peak <= 0:
        raise AllZeroEnvelope("log compression needs a nonzero envelope")
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(env.values / peak)
    db = np.clip(db, -dynamic_range_db, 0.0)
    return BModeImage(db, env.grid, dynamic_range_db)
