"""Graph dynamic mode decomposition of multi-agent interaction networks.

Turns trajectories of interacting agents into time series of kernel-weight
adjacency matrices, decomposes them into matrix-shaped spatial modes with
complex eigenvalues (frequency and growth), and feeds the averaged modes
into feature extraction and binary classification.
"""

from .classify import (
    CrossValResult,
    LabeledDataset,
    LogisticModel,
    Metrics,
    OddsRatio,
    cross_validate,
    evaluate,
    fit,
    odds_ratios,
    predict_proba,
)
from .dmd import SpectralResult, amplitudes, exact_dmd, reconstruct, to_continuous
from .features import (
    FeatureVector,
    dmd_spectrum_baseline,
    gdmd_spectrum,
    handcrafted,
    laplacian_eigs,
)
from .gdmd import (
    EmptySpectrumError,
    GraphDmdResult,
    dominant_frequency,
    gdmd_reconstruct,
    graph_dmd,
    reconstruct_series,
    vaf,
)
from .ingest import (
    BASKETBALL_LABELS,
    AdjacencySeries,
    Config,
    Frame,
    Segment,
    build_adjacency_series,
    kernel_weight,
    load_labels,
    load_segments,
    lowpass,
    order_agents,
)
from .linalg import DegenerateInputError
from .pipeline import (
    NoValidWindowsError,
    WindowedModes,
    aggregate,
    decompose_segment,
    postprocess,
    sliding_windows,
)
from .synth import (
    DominantFrequency,
    EdgeComponent,
    NoDominantFrequencyError,
    OrbitAgent,
    OscillatorSpec,
    TrajectorySpec,
    fft_edge_oracle,
    gen_adjacency,
    gen_labeled_dataset,
    gen_trajectories,
)
from .tensor import DmdFactors, TTCores, dmd_factors, tt_reconstruct, tt_svd, unfold12

__version__ = "0.1.0"
