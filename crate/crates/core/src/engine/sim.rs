use crate::engine::config::{exp_of, Configuration, NodeState};
use crate::engine::daemon::{Candidates, Daemon, DaemonMode};
use crate::engine::rules::{enabled_set, RuleId, RuleSet};
use crate::engine::tracker::Tracker;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// One executed move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveRecord {
    /// 0-based, strictly increasing within a trace.
    pub step: u64,
    /// Round the move belongs to; equals `step` under a central daemon.
    pub round: u64,
    pub node: NodeId,
    pub rule: RuleId,
    pub new_state: NodeState,
    /// Enabled-node count once the step (or the whole round) completed.
    pub enabled_after: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub algorithm: &'static str,
    pub daemon: String,
    pub seed: u64,
    pub move_cap: u64,
    pub initial: Configuration,
    pub moves: Vec<MoveRecord>,
    pub rounds: u64,
    /// `true` iff `final_config` has no enabled node.
    pub converged: bool,
    pub final_config: Configuration,
}

impl ExecutionTrace {
    pub fn move_count(&self) -> u64 {
        self.moves.len() as u64
    }

    /// Moves grouped by round, in order.
    pub fn rounds_iter(&self) -> impl Iterator<Item = &[MoveRecord]> {
        self.moves.chunk_by(|a, b| a.round == b.round)
    }
}

/// Stateful runner: owns the configuration and the incremental enabled set.
pub struct Simulator<'g> {
    graph: &'g Graph,
    rules: &'g RuleSet,
    config: Configuration,
    tracker: Tracker,
    steps: u64,
    rounds: u64,
    validate: bool,
}

impl<'g> Simulator<'g> {
    pub fn new(graph: &'g Graph, rules: &'g RuleSet, init: Configuration) -> Result<Self> {
        init.check_against(graph)?;
        let tracker = Tracker::new(graph, rules, &init);
        Ok(Simulator {
            graph,
            rules,
            config: init,
            tracker,
            steps: 0,
            rounds: 0,
            validate: false,
        })
    }

    /// When on, every step is followed by a full recompute of `exp` and of
    /// the enabled set, and any divergence panics. Quadratic; tests only.
    pub fn validating(mut self, on: bool) -> Self {
        self.validate = on;
        self
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn into_config(self) -> Configuration {
        self.config
    }

    pub fn enabled_count(&self) -> usize {
        self.tracker.enabled().len()
    }

    pub fn enabled(&self) -> Vec<NodeId> {
        let mut v = self.tracker.enabled().to_vec();
        v.sort_unstable();
        v
    }

    pub fn firing_rule(&self, v: NodeId) -> Option<RuleId> {
        self.tracker
            .firing(v)
            .map(|r| self.rules.rules()[r as usize].id)
    }

    pub fn is_stable(&self) -> bool {
        self.tracker.enabled().is_empty()
    }

    pub fn moves(&self) -> u64 {
        self.steps
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    fn candidates(&self) -> Candidates<'_> {
        Candidates {
            graph: self.graph,
            config: &self.config,
            rules: self.rules,
            tracker: &self.tracker,
        }
    }

    /// One central step; `None` once no node is enabled.
    pub fn step_central(&mut self, daemon: &mut dyn Daemon) -> Result<Option<MoveRecord>> {
        if daemon.mode() != DaemonMode::Central {
            return Err(Error::WrongDaemonMode {
                daemon: daemon.name(),
                needed: "central",
            });
        }
        if self.is_stable() {
            return Ok(None);
        }
        let picked = daemon.select(&self.candidates());
        let v = match picked.as_slice() {
            [v] => *v,
            other => panic!("central daemon selected {} nodes", other.len()),
        };
        let r = self
            .tracker
            .firing(v)
            .unwrap_or_else(|| panic!("daemon selected disabled node {v}"));
        let rule = &self.rules.rules()[r as usize];
        self.tracker
            .change(self.graph, self.rules, &mut self.config, v, rule.becomes);
        let rec = MoveRecord {
            step: self.steps,
            round: self.rounds,
            node: v,
            rule: rule.id,
            new_state: rule.becomes,
            enabled_after: self.enabled_count() as u32,
        };
        self.steps += 1;
        self.rounds += 1;
        self.check();
        Ok(Some(rec))
    }

    /// One round under a subset daemon. Guards are read at round start and
    /// all selected statements take effect together. `budget` truncates the
    /// selection to the lowest ids when fewer moves remain under the cap.
    pub fn step_subset(
        &mut self,
        daemon: &mut dyn Daemon,
        budget: Option<usize>,
    ) -> Result<Option<Vec<MoveRecord>>> {
        if daemon.mode() != DaemonMode::Subset {
            return Err(Error::WrongDaemonMode {
                daemon: daemon.name(),
                needed: "subset",
            });
        }
        if self.is_stable() {
            return Ok(None);
        }
        let mut picked = daemon.select(&self.candidates());
        assert!(!picked.is_empty(), "subset daemon selected no node");
        picked.sort_unstable();
        picked.dedup();
        if let Some(b) = budget {
            picked.truncate(b.max(1));
        }
        // snapshot every statement before any of them is applied
        let planned: Vec<(NodeId, RuleId, NodeState)> = picked
            .into_iter()
            .map(|v| {
                let r = self
                    .tracker
                    .firing(v)
                    .unwrap_or_else(|| panic!("daemon selected disabled node {v}"));
                let rule = &self.rules.rules()[r as usize];
                (v, rule.id, rule.becomes)
            })
            .collect();
        for &(v, _, s) in &planned {
            self.tracker.change(self.graph, self.rules, &mut self.config, v, s);
        }
        let after = self.enabled_count() as u32;
        let round = self.rounds;
        let recs = planned
            .into_iter()
            .map(|(node, rule, new_state)| {
                let rec = MoveRecord {
                    step: self.steps,
                    round,
                    node,
                    rule,
                    new_state,
                    enabled_after: after,
                };
                self.steps += 1;
                rec
            })
            .collect();
        self.rounds += 1;
        self.check();
        Ok(Some(recs))
    }

    fn check(&self) {
        if !self.validate {
            return;
        }
        let fresh = Tracker::new(self.graph, self.rules, &self.config);
        if let Some(what) = self.tracker.diverges_from(&fresh) {
            panic!("incremental {what} diverged after step {}", self.steps);
        }
        for v in self.graph.nodes() {
            assert_eq!(self.tracker.exp(v), exp_of(self.graph, &self.config, v));
        }
        assert_eq!(
            self.enabled(),
            enabled_set(self.graph, &self.config, self.rules),
            "enabled set diverged from guard re-evaluation"
        );
    }

    /// Steps until no node is enabled or `move_cap` moves have run.
    pub fn run(mut self, daemon: &mut dyn Daemon, move_cap: u64) -> Result<ExecutionTrace> {
        if move_cap == 0 {
            return Err(Error::Invalid("move cap must be at least 1".into()));
        }
        let initial = self.config.clone();
        let mut moves = Vec::new();
        match daemon.mode() {
            DaemonMode::Central => {
                while self.steps < move_cap {
                    match self.step_central(daemon)? {
                        Some(rec) => moves.push(rec),
                        None => break,
                    }
                }
            }
            DaemonMode::Subset => {
                while self.steps < move_cap {
                    let budget = (move_cap - self.steps) as usize;
                    match self.step_subset(daemon, Some(budget))? {
                        Some(recs) => moves.extend(recs),
                        None => break,
                    }
                }
            }
        }
        Ok(ExecutionTrace {
            algorithm: self.rules.name(),
            daemon: daemon.name(),
            seed: daemon.seed(),
            move_cap,
            initial,
            moves,
            rounds: self.rounds,
            converged: self.is_stable(),
            final_config: self.config,
        })
    }
}

/// Stateless single central step from `c`.
pub fn step_central(
    g: &Graph,
    c: &Configuration,
    rules: &RuleSet,
    daemon: &mut dyn Daemon,
) -> Result<Option<(MoveRecord, Configuration)>> {
    let mut sim = Simulator::new(g, rules, c.clone())?;
    Ok(sim
        .step_central(daemon)?
        .map(|rec| (rec, sim.into_config())))
}

/// Stateless single subset round from `c`.
pub fn step_subset(
    g: &Graph,
    c: &Configuration,
    rules: &RuleSet,
    daemon: &mut dyn Daemon,
) -> Result<Option<(Vec<MoveRecord>, Configuration)>> {
    let mut sim = Simulator::new(g, rules, c.clone())?;
    Ok(sim
        .step_subset(daemon, None)?
        .map(|recs| (recs, sim.into_config())))
}

pub fn run_to_fixpoint(
    g: &Graph,
    rules: &RuleSet,
    daemon: &mut dyn Daemon,
    init: Configuration,
    move_cap: u64,
) -> Result<ExecutionTrace> {
    Simulator::new(g, rules, init)?.run(daemon, move_cap)
}

/// Default caps: `2n + 1` under a central daemon, `10n` otherwise.
pub fn default_move_cap(n: usize, mode: DaemonMode) -> u64 {
    match mode {
        DaemonMode::Central => 2 * n as u64 + 1,
        DaemonMode::Subset => (10 * n as u64).max(1),
    }
}
