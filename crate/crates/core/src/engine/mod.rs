//! Execution machinery shared by every rule set: configurations, guard
//! evaluation, daemons and fixpoint iteration.

mod config;
mod daemon;
mod rules;
mod sim;
mod tracker;

pub use config::{exp_of, Configuration, InitPreset, NodeState};
pub use daemon::{
    Candidates, CentralAdversarial, CentralRandom, Daemon, DaemonKind, DaemonMode, Distributed,
    StrategyRegistry, Synchronous,
};
pub use rules::{
    apply_move, enabled_rules, enabled_set, Neighbor, NeighborTest, Quantifier, Rule, RuleId,
    RuleSet,
};
pub use sim::{
    default_move_cap, run_to_fixpoint, step_central, step_subset, ExecutionTrace, MoveRecord,
    Simulator,
};
