//! Schedulers. Every daemon implements [`Daemon`]; central strategies are
//! looked up by name in a [`StrategyRegistry`], and a [`DaemonKind`] parsed
//! from a CLI token instantiates the right one for a seed.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::config::Configuration;
use crate::engine::rules::{RuleId, RuleSet};
use crate::engine::tracker::Tracker;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DaemonMode {
    /// Exactly one enabled node moves per step.
    Central,
    /// A nonempty subset of enabled nodes moves per round.
    Subset,
}

/// Read-only view of the enabled nodes handed to a daemon.
pub struct Candidates<'a> {
    pub(crate) graph: &'a Graph,
    pub(crate) config: &'a Configuration,
    pub(crate) rules: &'a RuleSet,
    pub(crate) tracker: &'a Tracker,
}

impl<'a> Candidates<'a> {
    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    pub fn config(&self) -> &'a Configuration {
        self.config
    }

    /// Enabled nodes in a deterministic but unspecified order.
    pub fn nodes(&self) -> &'a [NodeId] {
        self.tracker.enabled()
    }

    pub fn sorted(&self) -> Vec<NodeId> {
        let mut v = self.nodes().to_vec();
        v.sort_unstable();
        v
    }

    pub fn len(&self) -> usize {
        self.nodes().len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes().is_empty()
    }

    /// The rule `v` would fire (lowest-indexed enabled rule).
    pub fn rule(&self, v: NodeId) -> Option<RuleId> {
        self.tracker
            .firing(v)
            .map(|r| self.rules.rules()[r as usize].id)
    }
}

pub trait Daemon: Send {
    /// Token this daemon was built from, e.g. `distributed:0.5`.
    fn name(&self) -> String;
    fn mode(&self) -> DaemonMode;
    fn seed(&self) -> u64;
    /// Picks the nodes to activate; never called with an empty candidate
    /// set. Central daemons return exactly one node.
    fn select(&mut self, candidates: &Candidates<'_>) -> Vec<NodeId>;
}

/// Uniform choice among enabled nodes.
pub struct CentralRandom {
    rng: ChaCha8Rng,
    seed: u64,
}

impl CentralRandom {
    pub fn new(seed: u64) -> Self {
        CentralRandom {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }
}

impl Daemon for CentralRandom {
    fn name(&self) -> String {
        "central-random".into()
    }

    fn mode(&self) -> DaemonMode {
        DaemonMode::Central
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn select(&mut self, c: &Candidates<'_>) -> Vec<NodeId> {
        let nodes = c.nodes();
        vec![nodes[self.rng.gen_range(0..nodes.len())]]
    }
}

/// Ranks candidates; the daemon picks uniformly among the best-ranked.
type Ranking = fn(&Candidates<'_>, NodeId) -> i64;

/// Central daemon driven by a named ranking, ties broken by the seeded
/// generator.
pub struct CentralAdversarial {
    strategy: &'static str,
    rank: Ranking,
    rng: ChaCha8Rng,
    seed: u64,
}

impl Daemon for CentralAdversarial {
    fn name(&self) -> String {
        format!("central-adversarial:{}", self.strategy)
    }

    fn mode(&self) -> DaemonMode {
        DaemonMode::Central
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn select(&mut self, c: &Candidates<'_>) -> Vec<NodeId> {
        let nodes = c.sorted();
        let best = nodes
            .iter()
            .map(|&v| (self.rank)(c, v))
            .max()
            .expect("nonempty candidates");
        let top: Vec<NodeId> = nodes
            .into_iter()
            .filter(|&v| (self.rank)(c, v) == best)
            .collect();
        vec![*top.choose(&mut self.rng).expect("nonempty")]
    }
}

/// Named central strategies.
pub struct StrategyRegistry {
    entries: Vec<(&'static str, Ranking)>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry {
            entries: Vec::new(),
        }
    }

    /// `max-degree-first`, `min-id-first` and `delay-r1`.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("max-degree-first", |c, v| c.graph().degree(v) as i64);
        r.register("min-id-first", |_, v| -(v.index() as i64));
        // anything but the entry rule (rule 0) goes first
        r.register("delay-r1", |c, v| match c.rule(v) {
            Some(id) if id.index > 0 => 1,
            _ => 0,
        });
        r
    }

    pub fn register(&mut self, name: &'static str, rank: Ranking) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, rank));
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|(n, _)| *n)
    }

    pub fn build(&self, name: &str, seed: u64) -> Result<CentralAdversarial> {
        let (strategy, rank) = self
            .entries
            .iter()
            .find(|(n, _)| *n == name)
            .copied()
            .ok_or_else(|| Error::UnknownToken {
                what: "adversarial strategy",
                token: name.to_string(),
            })?;
        Ok(CentralAdversarial {
            strategy,
            rank,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        })
    }
}

/// Each enabled node joins the round independently with probability `q`;
/// empty draws are repeated.
pub struct Distributed {
    q: f64,
    rng: ChaCha8Rng,
    seed: u64,
}

impl Distributed {
    pub fn new(q: f64, seed: u64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Invalid(format!(
                "selection probability {q} outside (0, 1]"
            )));
        }
        Ok(Distributed {
            q,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        })
    }
}

impl Daemon for Distributed {
    fn name(&self) -> String {
        format!("distributed:{}", self.q)
    }

    fn mode(&self) -> DaemonMode {
        DaemonMode::Subset
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn select(&mut self, c: &Candidates<'_>) -> Vec<NodeId> {
        let nodes = c.sorted();
        loop {
            let picked: Vec<NodeId> = nodes
                .iter()
                .copied()
                .filter(|_| self.rng.gen_bool(self.q))
                .collect();
            if !picked.is_empty() {
                return picked;
            }
        }
    }
}

/// Every enabled node moves in every round.
pub struct Synchronous {
    seed: u64,
}

impl Synchronous {
    pub fn new(seed: u64) -> Self {
        Synchronous { seed }
    }
}

impl Daemon for Synchronous {
    fn name(&self) -> String {
        "synchronous".into()
    }

    fn mode(&self) -> DaemonMode {
        DaemonMode::Subset
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn select(&mut self, c: &Candidates<'_>) -> Vec<NodeId> {
        c.sorted()
    }
}

/// Parsed daemon token, instantiated per run with a seed.
#[derive(Debug, Clone, PartialEq)]
pub enum DaemonKind {
    CentralRandom,
    CentralAdversarial(String),
    Distributed(f64),
    Synchronous,
}

impl DaemonKind {
    pub fn mode(&self) -> DaemonMode {
        match self {
            DaemonKind::CentralRandom | DaemonKind::CentralAdversarial(_) => DaemonMode::Central,
            DaemonKind::Distributed(_) | DaemonKind::Synchronous => DaemonMode::Subset,
        }
    }

    pub fn is_central(&self) -> bool {
        self.mode() == DaemonMode::Central
    }

    pub fn build(&self, seed: u64) -> Result<Box<dyn Daemon>> {
        self.build_with(&StrategyRegistry::builtin(), seed)
    }

    pub fn build_with(&self, strategies: &StrategyRegistry, seed: u64) -> Result<Box<dyn Daemon>> {
        Ok(match self {
            DaemonKind::CentralRandom => Box::new(CentralRandom::new(seed)),
            DaemonKind::CentralAdversarial(name) => Box::new(strategies.build(name, seed)?),
            DaemonKind::Distributed(q) => Box::new(Distributed::new(*q, seed)?),
            DaemonKind::Synchronous => Box::new(Synchronous::new(seed)),
        })
    }
}

impl fmt::Display for DaemonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DaemonKind::CentralRandom => f.write_str("central-random"),
            DaemonKind::CentralAdversarial(s) => write!(f, "central-adversarial:{s}"),
            DaemonKind::Distributed(q) => write!(f, "distributed:{q}"),
            DaemonKind::Synchronous => f.write_str("synchronous"),
        }
    }
}

impl FromStr for DaemonKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownToken {
            what: "daemon",
            token: s.to_string(),
        };
        match s {
            "central-random" => Ok(DaemonKind::CentralRandom),
            "synchronous" => Ok(DaemonKind::Synchronous),
            "distributed" => Ok(DaemonKind::Distributed(0.5)),
            _ => {
                if let Some(name) = s.strip_prefix("central-adversarial:") {
                    if !StrategyRegistry::builtin().names().any(|n| n == name) {
                        return Err(Error::UnknownToken {
                            what: "adversarial strategy",
                            token: name.to_string(),
                        });
                    }
                    Ok(DaemonKind::CentralAdversarial(name.to_string()))
                } else if let Some(q) = s.strip_prefix("distributed:") {
                    let q: f64 = q.parse().map_err(|_| unknown())?;
                    Distributed::new(q, 0)?;
                    Ok(DaemonKind::Distributed(q))
                } else {
                    Err(unknown())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_round_trip() {
        for tok in [
            "central-random",
            "central-adversarial:max-degree-first",
            "central-adversarial:min-id-first",
            "central-adversarial:delay-r1",
            "distributed:0.5",
            "distributed:1",
            "synchronous",
        ] {
            let k: DaemonKind = tok.parse().unwrap();
            assert_eq!(k.to_string(), tok);
            assert_eq!(k.build(3).unwrap().name(), tok);
        }
        assert_eq!(
            "distributed".parse::<DaemonKind>().unwrap(),
            DaemonKind::Distributed(0.5)
        );
    }

    #[test]
    fn bad_tokens() {
        assert!("central".parse::<DaemonKind>().is_err());
        assert!("central-adversarial:nope".parse::<DaemonKind>().is_err());
        assert!("distributed:0".parse::<DaemonKind>().is_err());
        assert!("distributed:1.5".parse::<DaemonKind>().is_err());
        assert!("distributed:x".parse::<DaemonKind>().is_err());
    }

    #[test]
    fn modes() {
        assert!(DaemonKind::CentralRandom.is_central());
        assert!(DaemonKind::CentralAdversarial("min-id-first".into()).is_central());
        assert_eq!(DaemonKind::Synchronous.mode(), DaemonMode::Subset);
        assert_eq!(DaemonKind::Distributed(0.3).mode(), DaemonMode::Subset);
    }

    #[test]
    fn registry_accepts_custom_strategy() {
        let mut reg = StrategyRegistry::builtin();
        reg.register("max-id-first", |_, v| v.index() as i64);
        assert!(reg.names().any(|n| n == "max-id-first"));
        let d = DaemonKind::CentralAdversarial("max-id-first".into());
        assert_eq!(
            d.build_with(&reg, 0).unwrap().name(),
            "central-adversarial:max-id-first"
        );
        assert!(d.build(0).is_err());
    }
}
