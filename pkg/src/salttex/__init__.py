"""salttex: texture-gradient salt dome detection and tracking for 2D
seismic sections.

The attribute at the core is the gradient of texture (GoT): the spectral
dissimilarity of square windows flanking each pixel, combined over scales
and directions.  Detection grows a seed inside the salt body until the GoT
threshold is met; tracking learns tensor subspaces of boundary patch pairs
and searches along boundary normals in neighboring sections.
"""

from .attributes import (
    AttributeMap,
    GotConfig,
    directionality_map,
    dissimilarity,
    glcm_contrast_map,
    got_components,
    got_map,
    sobel2d_map,
    sobel3d_gradient,
)
from .errors import SaltTexError
from .evaluation import BoundaryMetrics, amd, boundary_metrics, summarize
from .noisebench import (
    BilateralConfig,
    NoiseSweepConfig,
    add_gaussian_noise,
    bilateral_filter,
    run_noise_sweep,
)
from .segmentation import (
    DetectionConfig,
    DetectionResult,
    Mask,
    detect,
    enhance_mask,
    otsu_threshold,
    region_grow,
    select_seed,
    trace_boundary,
)
from .synth import (
    calibrate_threshold,
    disk_section,
    drifting_disk_volume,
    tracking_section,
    vertical_boundary_section,
)
from .tracking import (
    PatchPair,
    SubspaceModel,
    TrackingConfig,
    build_patch_tensors,
    classify,
    learn_model,
    learn_subspace,
    load_model,
    reconstruction_error,
    save_model,
    track_section,
    track_volume,
)
from .volume_io import (
    Boundary,
    Section,
    SeismicVolume,
    extract_section,
    normalize_section,
    read_boundary_csv,
    read_grid,
    read_segy,
    write_boundary_csv,
    write_grid,
)

__version__ = "0.1.0"
