"""Quantum-circuit policies trained by reinforcement learning, with
evolutionary search over the circuit structure."""

from .envbridge import BridgeEnv, spawn_bridge
from .envs import CartPole, Env, GridWorld, make_env
from .errors import (
    BridgeError,
    ConfigurationError,
    ContractViolationError,
    OracleScaleError,
    ProtocolOrderError,
)
from .estimators import QRLDQN, QRLNAS, QRLReinforce
from .nas import (
    Candidate,
    SearchConfig,
    SearchSpace,
    WirePolicy,
    evolutionary_search,
    fitness,
    inherit_params,
    mutate,
    random_architecture,
    random_search,
)
from .qnet import (
    Architecture,
    EncoderLayout,
    HeadMode,
    OutputHead,
    ParamStore,
    QNetwork,
    Squash,
    backward,
    build_architecture,
    chunked_layout,
    default_head,
    encode,
    forward,
    grad_parameter_shift,
    init_params,
    policy_probs,
    q_values,
)
from .qsim import (
    GateKind,
    GatePlacement,
    StateVector,
    apply_gate,
    expectation_z,
    full_unitary_oracle,
    gate_matrix,
    new_zero_state,
    probabilities,
)
from .rl import (
    DqnConfig,
    ReinforceConfig,
    ReplayBuffer,
    RewardLog,
    Transition,
    dqn_target,
    dqn_train_step,
    epsilon_greedy,
    evaluate,
    reinforce_returns,
    reinforce_update,
    train_dqn,
    train_reinforce,
)

__version__ = "0.1.0"

__all__ = [
    "Architecture",
    "BridgeEnv",
    "BridgeError",
    "Candidate",
    "CartPole",
    "ConfigurationError",
    "ContractViolationError",
    "DqnConfig",
    "EncoderLayout",
    "Env",
    "GateKind",
    "GatePlacement",
    "GridWorld",
    "HeadMode",
    "OracleScaleError",
    "OutputHead",
    "ParamStore",
    "ProtocolOrderError",
    "QNetwork",
    "QRLDQN",
    "QRLNAS",
    "QRLReinforce",
    "ReinforceConfig",
    "ReplayBuffer",
    "RewardLog",
    "SearchConfig",
    "SearchSpace",
    "Squash",
    "StateVector",
    "Transition",
    "WirePolicy",
    "apply_gate",
    "backward",
    "build_architecture",
    "chunked_layout",
    "default_head",
    "dqn_target",
    "dqn_train_step",
    "encode",
    "epsilon_greedy",
    "evaluate",
    "evolutionary_search",
    "expectation_z",
    "fitness",
    "forward",
    "full_unitary_oracle",
    "gate_matrix",
    "grad_parameter_shift",
    "inherit_params",
    "init_params",
    "make_env",
    "mutate",
    "new_zero_state",
    "policy_probs",
    "probabilities",
    "q_values",
    "random_architecture",
    "random_search",
    "reinforce_returns",
    "reinforce_update",
    "spawn_bridge",
    "train_dqn",
    "train_reinforce",
]
