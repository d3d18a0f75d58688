"""Graph-cepstrum spatial features for partially connected microphone arrays.

The graph cepstrum projects per-frame log-power vectors of a distributed
microphone array onto the eigenvectors of a connection-graph Laplacian,
capturing inter-channel level structure while respecting which microphones
belong to the same device.  The package also ships the PCA-based spatial
cepstrum baseline, a diagonal-GMM scene classifier, a synthetic scene and
synchronization-error simulator, and a sweep harness comparing the two
features under increasing sync error.
"""

from .audio import AudioClip, make_clip, read_wav, write_wav
from .classify import (
    EvaluationReport,
    GmmModel,
    classify_clip,
    evaluate,
    load_model,
    load_models,
    save_model,
    score_clip,
    train_gmm,
)
from .errors import (
    GraphCepsError,
    InvalidInputError,
    InvalidMatrixError,
    InvalidParameterError,
    InvalidTopologyError,
    NumericalError,
)
from .experiment import (
    ExperimentConfig,
    SweepResult,
    default_experiment_config,
    load_experiment_config,
    run_sweep,
    write_sweep_csv,
)
from .features import (
    CovarianceModel,
    FeatureSeries,
    FrameSeries,
    concat_frames,
    fit_covariance,
    frame_log_power,
    graph_cepstrum,
    pca_basis,
    spatial_cepstrum,
)
from .simulate import (
    ArrayLayout,
    ClipRecord,
    CorpusConfig,
    ScenePlan,
    SceneSpec,
    SyncErrorSpec,
    build_corpus,
    inject_sync_error,
    make_layout,
    synthesize_clip,
)
from .spectral import (
    DftMatrix,
    RingEquivalenceReport,
    SpectralBasis,
    eig_sym,
    gft_basis,
    idft_matrix,
    verify_ring_equivalence,
)
from .topology import (
    GraphLaplacian,
    MicArrayGraph,
    build_graph,
    degree_matrix,
    graph_from_edges,
    laplacian,
    load_topology,
    ring_graph,
)

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "ArrayLayout",
    "ClipRecord",
    "CorpusConfig",
    "CovarianceModel",
    "DftMatrix",
    "EvaluationReport",
    "ExperimentConfig",
    "FeatureSeries",
    "FrameSeries",
    "GmmModel",
    "GraphCepsError",
    "GraphLaplacian",
    "InvalidInputError",
    "InvalidMatrixError",
    "InvalidParameterError",
    "InvalidTopologyError",
    "MicArrayGraph",
    "NumericalError",
    "RingEquivalenceReport",
    "ScenePlan",
    "SceneSpec",
    "SpectralBasis",
    "SweepResult",
    "SyncErrorSpec",
    "build_corpus",
    "build_graph",
    "classify_clip",
    "concat_frames",
    "default_experiment_config",
    "degree_matrix",
    "eig_sym",
    "evaluate",
    "fit_covariance",
    "frame_log_power",
    "gft_basis",
    "graph_cepstrum",
    "graph_from_edges",
    "idft_matrix",
    "inject_sync_error",
    "laplacian",
    "load_experiment_config",
    "load_model",
    "load_models",
    "load_topology",
    "make_clip",
    "make_layout",
    "pca_basis",
    "read_wav",
    "ring_graph",
    "run_sweep",
    "save_model",
    "score_clip",
    "spatial_cepstrum",
    "synthesize_clip",
    "train_gmm",
    "verify_ring_equivalence",
    "write_sweep_csv",
    "write_wav",
]
