"""Tabular skip Q-learning on deterministic gridworlds."""

__version__ = "0.1.0"

from .gridworld import (Action, ConfigurationError, GridEnv, GridSpec, MapParseError,
                        StepOutcome, builtin_grid, load_grid, render_map)
from .skip import (SkipConnection, SkipTrajectory, build_connectedness_graph,
                   discounted_skip_reward, execute_skip, terminal_completions)
from .qtables import (AgentConfig, BehaviourQ, SkipQ, select_action, select_skip,
                      td_update, td_update_skip)
from .exploration import Schedule, epsilon_at
from .evaluation import (EvalRecord, LearningCurve, evaluate_greedy, mean_decisions,
                         normalized_auc, shortest_path, value_iteration)
from .agents import TrainLog, train, train_te_greedy, train_temporl, train_vanilla
from .experiment import (RunConfig, RunSummary, emit_plot_data, load_qtables,
                         reproduce_table, run, save_qtables)
