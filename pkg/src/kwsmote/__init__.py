"""Kernel-weighted convex-combination oversampling for imbalanced binary data."""

from .dataset import (
    ClassSummary,
    DatasetError,
    LabeledDataset,
    SplitSpec,
    append_synthetic,
    class_summary,
    load_csv,
    stratified_split,
    write_csv,
)
from .kernel import Bandwidth, DegenerateMinorityError, default_bandwidth, gaussian_kernel
from .metrics import ConfusionMatrix, EvalReport, confusion, f1_score, g_mean, roc_auc
from .neighbors import NeighborList, euclidean_distance, k_nearest
from .samplers import (
    AttemptCapError,
    SamplerConfig,
    SyntheticBatch,
    kwsmote_generate,
    normal_center_generate,
    required_count,
    resample,
    smote_generate,
    snocc_generate,
)

__version__ = "0.1.0"
