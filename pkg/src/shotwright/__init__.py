"""Sequential shot editing toolkit.

Predicts the attribute profile of upcoming shots from a rolling context
of recent ones (transformer actor, MLP critic, policy-gradient
fine-tuning on per-attribute rewards) and imitates multi-camera
broadcast editing styles.  Built on a small float64 tape-autodiff core;
numpy is the only runtime dependency.
"""

from .attributes import (
    ATTRIBUTE_NAMES,
    BLOCK_OFFSETS,
    BLOCK_SLICES,
    CLASS_COUNTS,
    NUM_ATTRIBUTES,
    TOTAL_CLASSES,
    AttributeSpec,
    AttributeTaxonomy,
    AttributeVector,
    decode_one_hot,
    default_taxonomy,
    hamming_distance,
    one_hot_encode,
)
from .dataset import (
    CONTEXT_SHOTS,
    EPISODE_SHOTS,
    TARGET_SHOTS,
    DatasetFormatError,
    Episode,
    Scene,
    Shot,
    load_dataset,
    load_taxonomy,
    sample_episodes,
    save_dataset,
    save_taxonomy,
    with_distribution,
)
from .evaluation import (
    EvalReport,
    GreedyActorPolicy,
    SamplingActorPolicy,
    UniformRandomPolicy,
    evaluate,
    format_report_row,
    overall_accuracy,
    per_attribute_accuracy,
    retrieve_shot,
)
from .policy import (
    ActorNetwork,
    CriticNetwork,
    Trajectory,
    actor_loss,
    advantage,
    critic_loss,
    greedy_action,
    reward,
    rollout,
    sample_action,
)
from .representation import (
    CONTEXT_DIM,
    AttributeDistribution,
    ContextState,
    advance_context,
    build_context,
    distribution_from_similarities,
    initial_context,
    one_hot_distribution,
    shot_representation,
    synth_distribution,
)
from .training import (
    TrainConfig,
    apply_representation,
    generate_markov_dataset,
    load_checkpoint,
    load_config,
    pretrain_supervised,
    save_checkpoint,
    save_config,
    train_rl,
)

__version__ = "0.1.0"
