"""Noise-residual fingerprints for generated-image forensics.

Extract noise residuals, average them into per-source fingerprints,
analyze fingerprint energy and structure, and attribute images to
sources by normalized correlation.
"""

__version__ = "0.1.0"

from .attribution import (
    AttributionResult,
    ConfusionMatrix,
    CorrMatrix,
    CorrScore,
    RocCurve,
    ScoreSet,
    attribute,
    confusion,
    corr,
    correlation_matrix,
    mann_whitney_auc,
    roc,
    score_against,
)
from .container import (
    read_fingerprint,
    read_residual,
    write_fingerprint,
    write_residual,
)
from .denoise import DenoiserConfig, Residual, denoise, extract_residual, mmse_shrink
from .errors import GanprintError
from .fingerprint import (
    AutocorrMap,
    EnergyCurve,
    EnergyFit,
    Fingerprint,
    INVERSE_N,
    PAPER_EXP,
    autocorrelation,
    energy,
    energy_progression,
    estimate_fingerprint,
    fit_energy_curve,
)
from .imageops import flatten, inner_product, unflatten, zero_mean_unit_norm
from .manifest import DatasetManifest, load_manifest, write_manifest
from .synthgen import (
    SynthDataset,
    SynthSourceSpec,
    generate_dataset,
    make_fingerprint_pattern,
)
from .wavelets import WaveletPyramid, daubechies_filter, dwt2, idwt2
