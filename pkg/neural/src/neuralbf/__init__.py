"""Learned plane-wave beamformer: wavelet U-Net from aligned RF to envelope."""

from .infer import infer_array, infer_file, load_checkpoint
from .losses import EPS, LOSS_KINDS, curriculum_loss
from .network import (
    NetworkConfig,
    WaveletUNet,
    build_network,
    forward_padded,
    parameter_count,
)
from .train import (
    CurriculumStage,
    TrainingPair,
    default_curriculum,
    load_manifest,
    split_pairs,
    train,
    validate_stages,
)
from .ubf import ubf_read, ubf_write
from .wavelet import dwt2, idwt2

__version__ = "0.1.0"
