"""Plane-wave ultrasound beamforming and simulation toolkit."""

from .beamform import ApodizationSpec, MvConfig, cpwc, das, mv_beamform, mv_weights
from .core import (
    AcquisitionParams,
    BModeImage,
    BeamformedRF,
    ChannelDataCube,
    EnvelopeImage,
    ImageGrid,
    Phantom,
    PixelAlignedRF,
    ProbeGeometry,
    RegionMask,
    normalize_channel_data,
    validate_probe,
)
from .geometry import (
    align_channels,
    aperture_for_depth,
    propagation_delay,
    rx_distance,
    tx_distance,
)
from .metrics import cr, fwhm, gcnr, point_target_fwhm, ssnr
from .postprocess import envelope, log_compress
from .simulate import (
    GroundTruthImage,
    PsfSpec,
    PulseSpec,
    ground_truth_image,
    ideal_psf,
    phantom_from_image,
    phantom_point_targets,
    pulse_waveform,
    synth_channel_data,
)
from .ubf import ubf_read, ubf_write

__version__ = "0.1.0"
