"""kNN ensembles built on the extended neighbourhood rule, plus a benchmark harness."""

__version__ = "0.1.0"

from .data import (  # noqa: E402
    BootstrapSample,
    DataError,
    Dataset,
    SplitPair,
    add_contrived_features,
    derive_seed,
    draw_bootstrap,
    load_csv,
    split,
    subspace_size,
)
from .ensemble import (  # noqa: E402
    BaseModel,
    EnsembleConfig,
    OExNRuleModel,
    fit,
    load_model,
    oob_error,
    predict,
    predict_proba,
    save_model,
)
from .metrics import MetricRecord, accuracy, brier_score, cohen_kappa  # noqa: E402
from .neighbors import (  # noqa: E402
    EUCLIDEAN,
    DistanceSpec,
    NeighborChain,
    exnrule_chain,
    exnrule_predict,
    knn_predict,
    minkowski_distance,
    wknn_predict,
)
