//! Guarded-command rules.
//!
//! A guard has a fixed shape: the evaluating node must be in a given state,
//! and a neighbor test must hold for all (or for some) of its neighbors. The
//! neighbor test sees the neighbor's state and its expression `exp` (the
//! number of `In` neighbors of that neighbor), which is how a node reads its
//! distance-2 surroundings. Keeping guards in this shape lets the engine
//! maintain per-rule neighbor counters incrementally instead of re-running
//! every guard after each move.

use std::fmt;

use crate::engine::config::{exp_of, Configuration, NodeState};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Algorithm-local rule identifier. `index` doubles as the rule priority:
/// when several rules are enabled the lowest index fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId {
    pub index: u8,
    pub name: &'static str,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    /// Every neighbor passes the test (vacuously true for isolated nodes).
    All,
    /// At least one neighbor passes the test.
    Any,
}

/// What a neighbor test may read about one neighbor `id` of node `me`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub me: NodeId,
    pub id: NodeId,
    pub state: NodeState,
    pub exp: u32,
}

pub type NeighborTest = fn(Neighbor) -> bool;

#[derive(Clone)]
pub struct Rule {
    pub id: RuleId,
    /// Required state of the evaluating node.
    pub when: NodeState,
    pub quantifier: Quantifier,
    pub test: NeighborTest,
    /// Statement: the evaluating node's new state.
    pub becomes: NodeState,
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule")
            .field("id", &self.id)
            .field("when", &self.when)
            .field("quantifier", &self.quantifier)
            .field("becomes", &self.becomes)
            .finish()
    }
}

impl Rule {
    /// Guard evaluated from scratch, recounting every `exp` it reads.
    pub fn holds(&self, g: &Graph, c: &Configuration, v: NodeId) -> bool {
        if c.state(v) != self.when {
            return false;
        }
        let mut view = g.neighbors(v).iter().map(|&u| Neighbor {
            me: v,
            id: u,
            state: c.state(u),
            exp: exp_of(g, c, u),
        });
        match self.quantifier {
            Quantifier::All => view.all(self.test),
            Quantifier::Any => view.any(self.test),
        }
    }
}

/// An algorithm as an ordered list of rules.
#[derive(Debug, Clone)]
pub struct RuleSet {
    name: &'static str,
    rules: Vec<Rule>,
    anonymous: bool,
    reads_exp: bool,
}

impl RuleSet {
    /// `anonymous`: no test reads `Neighbor::me`.
    /// `reads_exp`: some test reads `Neighbor::exp`.
    ///
    /// Both flags only enable engine shortcuts; declaring them wrongly
    /// makes the incremental enabled set diverge from a full recompute.
    pub fn new(name: &'static str, rules: Vec<Rule>, anonymous: bool, reads_exp: bool) -> Self {
        assert!(!rules.is_empty() && rules.len() < u8::MAX as usize);
        for (i, r) in rules.iter().enumerate() {
            assert_eq!(r.id.index as usize, i, "rule ids must be positional");
        }
        RuleSet {
            name,
            rules,
            anonymous,
            reads_exp,
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id.index as usize]
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn is_anonymous(&self) -> bool {
        self.anonymous
    }

    pub fn reads_exp(&self) -> bool {
        self.reads_exp
    }

    pub fn find(&self, name: &str) -> Option<RuleId> {
        self.rules.iter().map(|r| r.id).find(|id| id.name == name)
    }
}

/// Ids of all rules whose guard holds at `v`; empty means `v` is disabled.
pub fn enabled_rules(g: &Graph, c: &Configuration, v: NodeId, rules: &RuleSet) -> Vec<RuleId> {
    rules
        .rules()
        .iter()
        .filter(|r| r.holds(g, c, v))
        .map(|r| r.id)
        .collect()
}

/// All enabled nodes, ascending, by full re-evaluation.
pub fn enabled_set(g: &Graph, c: &Configuration, rules: &RuleSet) -> Vec<NodeId> {
    g.nodes()
        .filter(|&v| rules.rules().iter().any(|r| r.holds(g, c, v)))
        .collect()
}

/// Applies `rule` at `v`, rejecting rules whose guard is false.
pub fn apply_move(
    g: &Graph,
    c: &Configuration,
    v: NodeId,
    rule: RuleId,
    rules: &RuleSet,
) -> Result<Configuration> {
    c.check_against(g)?;
    g.check(v)?;
    let r = rules.rule(rule);
    if !r.holds(g, c, v) {
        return Err(Error::RuleNotEnabled {
            node: v,
            rule: rule.name,
        });
    }
    let mut next = c.clone();
    next.set(v, r.becomes);
    Ok(next)
}
