"""Decoders: basis pursuit denoising, hard-thresholding baselines, PO-CS recovery."""
from .bpdn import BpdnConfig, DecodeResult, bpdn_solve
from .direction import recover_direction_pocs
from .greedy import hard_threshold, iht_solve, pbp_estimate

__all__ = [
    "BpdnConfig",
    "DecodeResult",
    "bpdn_solve",
    "hard_threshold",
    "iht_solve",
    "pbp_estimate",
    "recover_direction_pocs",
]
