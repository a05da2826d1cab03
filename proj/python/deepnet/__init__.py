"""Deep pre-training toolkit.

C++ core exposed through the `_core` extension: dense matrix kernels
(naive and Strassen multiplication), feed-forward training, restricted
Boltzmann machines with contrastive divergence, sparse/denoising
autoencoders and greedy layer-wise stacks with fine-tuning.
"""

from deepnet._core import (
    CapacityError,
    ExperimentResult,
    FormatError,
    Network,
    NumericError,
    ParamError,
    Rbm,
    ShapeError,
    activate,
    col_means,
    downsample_2x,
    exact_loglik,
    exact_partition,
    gradcheck,
    hidden_probs,
    init_rbm,
    kl_divergence,
    load_csv,
    load_idx_images,
    load_idx_labels,
    load_model,
    matmul,
    run_experiment,
    save_model,
    train_from_config,
    train_rbm,
    visible_probs,
)

__all__ = [
    "CapacityError",
    "ExperimentResult",
    "FormatError",
    "Network",
    "NumericError",
    "ParamError",
    "Rbm",
    "ShapeError",
    "activate",
    "col_means",
    "downsample_2x",
    "exact_loglik",
    "exact_partition",
    "gradcheck",
    "hidden_probs",
    "init_rbm",
    "kl_divergence",
    "load_csv",
    "load_idx_images",
    "load_idx_labels",
    "load_model",
    "matmul",
    "run_experiment",
    "save_model",
    "train_from_config",
    "train_rbm",
    "visible_probs",
]

__version__ = "1.0.0"
