"""Wavelet-preprocessed document binarization toolkit.

Haar-wavelet feature extraction, OpenCV-compatible resampling, classical
thresholding, DIBCO-style evaluation metrics, reference loss functions and
a three-stage patch pipeline with pluggable enhancement backends.
"""
from .errors import MfeBinError
from .kernels import BACKEND
from .raster import RasterImage, load_image, load_mask, save_image, save_mask, to_grayscale
from .mfe import NormalizationSpec, WaveletSubbands, hwt_forward, hwt_inverse, mfe_extract
from .resize import ResizeMethod, resize
from .binarize import ThresholdParams, binarize, otsu_threshold
from .metrics import MetricsConfig, MetricsReport, asm, evaluate_masks
from .pipeline import PipelineConfig, run_page, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "MfeBinError",
    "RasterImage",
    "load_image",
    "load_mask",
    "save_image",
    "save_mask",
    "to_grayscale",
    "NormalizationSpec",
    "WaveletSubbands",
    "hwt_forward",
    "hwt_inverse",
    "mfe_extract",
    "ResizeMethod",
    "resize",
    "ThresholdParams",
    "binarize",
    "otsu_threshold",
    "MetricsConfig",
    "MetricsReport",
    "asm",
    "evaluate_masks",
    "PipelineConfig",
    "run_page",
    "run_pipeline",
]
