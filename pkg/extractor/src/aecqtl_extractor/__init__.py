"""Pretrained-CNN feature extraction to AEFV files."""

from .extraction import (DATASETS, FEATURE_DIMS, ExtractionSpec,
                         build_backbone, extract, extract_features,
                         preprocess, write_aefv)

__version__ = "0.1.0"
