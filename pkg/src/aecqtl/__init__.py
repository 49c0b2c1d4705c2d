"""Amplitude-encoded classical-quantum transfer learning models, trained by
exact parameter-shift gradients on a statevector simulator."""

from .circuits import (Circuit, ModelKind, ParamLayout, PoolingPlan,
                       build_conv_op, build_n_block, build_pool_op,
                       build_pooling_plan, build_tlqcnn, build_tlqnn, param_count)
from .data import (FeatureSet, SplitSpec, gen_synthetic, read_aefv, split,
                   write_aefv)
from .errors import (AefvParseError, ConfigError, DegenerateInputError,
                     ProgrammingError, TrainingError)
from .grad import (GradientBundle, backward_classical, batch_gradient,
                   bundle_deviation, ce_loss, fd_grad, param_shift_grad,
                   sample_gradient)
from .metrics import RocCurve, RunSummary, accuracy, mean_std, roc_auc, summarize_runs
from .model import (ForwardTrace, ModelConfig, ModelParams, forward,
                    n_qubits_for_dim, predict)
from .optim import (AdamState, EpochRecord, RunResult, TrainConfig, adam_step,
                    init_params, lr_at, run_repeats, train)
from .statevector import (GateKind, GateOp, StateVector, amplitude_encode,
                          apply_circuit, apply_gate, circuit_unitary,
                          expect_z, new_zero_state)

__version__ = "0.1.0"
