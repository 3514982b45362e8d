"""Symmetric Wasserstein autoencoder toolkit.

A small float64 numpy stack: hand-backpropagated MLPs and Adam, an
autoencoder with a learnable pseudo-input mixture prior, its joint
data/latent training objective, an exact assignment-based optimal
transport oracle (compiled kernel with a pure-Python fallback), dataset
utilities and evaluation protocols.
"""

from .data import Dataset, add_noise, gmm_generate, load_idx, split
from .evaluate import (denoise_report, generation_quality, knn_accuracy,
                       local_structure_spearman, reconstruction_error)
from .model import (GaussianParams, SwaeModel, build_model, conditional_prior,
                    decode, encode, prior_log_density, sample_conditional,
                    sample_prior)
from .nn import (AdamState, MlpParams, MlpSpec, adam_step, fd_gradient,
                 init_mlp, make_rng, mlp_backward, mlp_forward)
from .objective import (LossBreakdown, LossWeights, SwaeGrads, recon_loss,
                        swae_grad, swae_loss, x_loss, z_loss)
from .ot import (Assignment, EmpiricalDistribution, assignment_backend,
                 empirical_wasserstein, min_cost_assignment, verify_theorem1)
from .trainer import (TrainConfig, TrainLog, init_model, nearest_pseudo_input,
                      nearest_pseudo_inputs, train)

__version__ = "0.1.0"
