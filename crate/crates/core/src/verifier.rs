//! Ground-truth checkers: set properties, the brute-force enumeration oracle,
//! and per-trace invariants of central-daemon MD2IS executions.

use std::fmt;
use std::str::FromStr;

use crate::algorithms::md2is;
use crate::engine::{Configuration, ExecutionTrace, RuleSet};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Largest graph the enumeration oracle accepts.
pub const ORACLE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    Node(NodeId),
    Pair(NodeId, NodeId),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Node(v) => write!(f, "{v}"),
            Witness::Pair(a, b) => write!(f, "{a},{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: &'static str,
    pub holds: bool,
    /// First violation in lexicographic order; present iff `!holds`.
    pub witness: Option<Witness>,
}

impl PropertyReport {
    fn ok(property: &'static str) -> Self {
        PropertyReport {
            property,
            holds: true,
            witness: None,
        }
    }

    fn fail(property: &'static str, witness: Witness) -> Self {
        PropertyReport {
            property,
            holds: false,
            witness: Some(witness),
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.witness {
            None => write!(f, "OK {}", self.property),
            Some(w) => write!(f, "FAIL {} witness={w}", self.property),
        }
    }
}

/// Set properties selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    D2Independent,
    MaximalD2is,
    MaximalIndependent,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::D2Independent => "d2-independent",
            Property::MaximalD2is => "d2is",
            Property::MaximalIndependent => "mis",
        }
    }

    pub fn check(self, g: &Graph, set: &[NodeId]) -> PropertyReport {
        match self {
            Property::D2Independent => is_d2_independent(g, set),
            Property::MaximalD2is => is_maximal_d2is(g, set),
            Property::MaximalIndependent => is_maximal_independent(g, set),
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Property::D2Independent,
            Property::MaximalD2is,
            Property::MaximalIndependent,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| Error::UnknownToken {
            what: "property",
            token: s.to_string(),
        })
    }
}

fn membership(g: &Graph, set: &[NodeId]) -> (Vec<bool>, Vec<NodeId>) {
    let mut mark = vec![false; g.node_count()];
    for &v in set {
        mark[v.index()] = true;
    }
    let sorted = g.nodes().filter(|v| mark[v.index()]).collect();
    (mark, sorted)
}

fn d2_violation(g: &Graph, mark: &[bool], sorted: &[NodeId]) -> Option<Witness> {
    for &a in sorted {
        let partner = g
            .neighbors(a)
            .iter()
            .flat_map(|&u| std::iter::once(u).chain(g.neighbors(u).iter().copied()))
            .filter(|&b| b > a && mark[b.index()])
            .min();
        if let Some(b) = partner {
            return Some(Witness::Pair(a, b));
        }
    }
    None
}

/// Every two members are more than distance 2 apart.
pub fn is_d2_independent(g: &Graph, set: &[NodeId]) -> PropertyReport {
    let (mark, sorted) = membership(g, set);
    match d2_violation(g, &mark, &sorted) {
        None => PropertyReport::ok(Property::D2Independent.name()),
        Some(w) => PropertyReport::fail(Property::D2Independent.name(), w),
    }
}

/// Distance-2 independent, and every non-member has a member within
/// distance 2.
pub fn is_maximal_d2is(g: &Graph, set: &[NodeId]) -> PropertyReport {
    let name = Property::MaximalD2is.name();
    let (mark, sorted) = membership(g, set);
    if let Some(w) = d2_violation(g, &mark, &sorted) {
        return PropertyReport::fail(name, w);
    }
    let mut covered = mark.clone();
    for &s in &sorted {
        for &u in g.neighbors(s) {
            covered[u.index()] = true;
            for &w in g.neighbors(u) {
                covered[w.index()] = true;
            }
        }
    }
    match g.nodes().find(|v| !covered[v.index()]) {
        None => PropertyReport::ok(name),
        Some(v) => PropertyReport::fail(name, Witness::Node(v)),
    }
}

/// No edge inside the set, and every non-member has a member neighbor.
pub fn is_maximal_independent(g: &Graph, set: &[NodeId]) -> PropertyReport {
    let name = Property::MaximalIndependent.name();
    let (mark, sorted) = membership(g, set);
    for &a in &sorted {
        if let Some(&b) = g.neighbors(a).iter().find(|&&b| b > a && mark[b.index()]) {
            return PropertyReport::fail(name, Witness::Pair(a, b));
        }
    }
    let undominated = g
        .nodes()
        .find(|&v| !mark[v.index()] && !g.neighbors(v).iter().any(|u| mark[u.index()]));
    match undominated {
        None => PropertyReport::ok(name),
        Some(v) => PropertyReport::fail(name, Witness::Node(v)),
    }
}

/// Every maximal distance-2 independent set of `g`, each sorted, the list
/// sorted lexicographically. Exponential; `n <= ORACLE_LIMIT`.
pub fn enumerate_all_maximal_d2is(g: &Graph) -> Result<Vec<Vec<NodeId>>> {
    let n = g.node_count();
    if n > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge {
            n,
            limit: ORACLE_LIMIT,
        });
    }
    // closed distance-2 ball of each node as a bitmask
    let ball: Vec<u32> = g
        .nodes()
        .map(|v| {
            let mut m = 1u32 << v.index();
            for &u in g.neighbors(v) {
                m |= 1 << u.index();
                for &w in g.neighbors(u) {
                    m |= 1 << w.index();
                }
            }
            m
        })
        .collect();

    fn extend(v: usize, chosen: u32, covered: u32, ball: &[u32], out: &mut Vec<u32>) {
        let n = ball.len();
        if v == n {
            if covered.count_ones() as usize == n {
                out.push(chosen);
            }
            return;
        }
        // v conflicts with a member iff a member lies in its ball
        if ball[v] & chosen == 0 {
            extend(v + 1, chosen | 1 << v, covered | ball[v], ball, out);
        }
        // leaving v out is only viable if something can still cover it
        let still_coverable = covered & (1 << v) != 0
            || (v + 1..n).any(|w| ball[v] & (1 << w) != 0 && ball[w] & chosen == 0);
        if still_coverable {
            extend(v + 1, chosen, covered, ball, out);
        }
    }

    let mut masks = Vec::new();
    extend(0, 0, 0, &ball, &mut masks);
    let mut sets: Vec<Vec<NodeId>> = masks
        .into_iter()
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).map(NodeId::from).collect())
        .collect();
    sets.sort();
    Ok(sets)
}

/// Move bound for central MD2IS traces: at most `2n` moves, each node
/// moves at most twice, and a node moving twice does R2 then R1.
pub fn check_move_bound(g: &Graph, trace: &ExecutionTrace) -> PropertyReport {
    let name = "move-bound";
    let mut seen: Vec<Vec<u8>> = vec![Vec::new(); g.node_count()];
    for m in &trace.moves {
        seen[m.node.index()].push(m.rule.index);
    }
    for v in g.nodes() {
        let ok = match seen[v.index()].as_slice() {
            [] | [_] => true,
            [a, b] => *a == md2is::R2.index && *b == md2is::R1.index,
            _ => false,
        };
        if !ok {
            return PropertyReport::fail(name, Witness::Node(v));
        }
    }
    // per-node bound already implies the total bound
    debug_assert!(trace.moves.len() <= 2 * g.node_count());
    PropertyReport::ok(name)
}

/// After a node executes R1 it never moves again, and no node within
/// distance 2 of it executes R1 afterwards.
pub fn check_r1_permanence(g: &Graph, trace: &ExecutionTrace) -> PropertyReport {
    let name = "r1-permanence";
    let mut joined: Vec<Option<u64>> = vec![None; g.node_count()];
    for m in &trace.moves {
        if joined[m.node.index()].is_some() {
            return PropertyReport::fail(name, Witness::Node(m.node));
        }
        if m.rule == md2is::R1 {
            let ball = g.dist2_neighborhood(m.node).expect("node in range");
            if let Some(&earlier) = ball.iter().find(|w| joined[w.index()].is_some()) {
                let (a, b) = (earlier.min(m.node), earlier.max(m.node));
                return PropertyReport::fail(name, Witness::Pair(a, b));
            }
            joined[m.node.index()] = Some(m.step);
        }
    }
    PropertyReport::ok(name)
}

/// Re-executes a trace against guards evaluated from scratch. Returns the
/// configuration before the first round and after each round. Fails if a
/// recorded move was not enabled at the start of its round, or if the end
/// state disagrees with the trace.
pub fn replay_trace(g: &Graph, rules: &RuleSet, trace: &ExecutionTrace) -> Result<Vec<Configuration>> {
    trace.initial.check_against(g)?;
    let mut current = trace.initial.clone();
    let mut history = vec![current.clone()];
    let mut last_step: Option<u64> = None;
    for round in trace.rounds_iter() {
        let start = current.clone();
        for m in round {
            if last_step.is_some_and(|s| m.step <= s) {
                return Err(Error::Invalid(format!("step {} out of order", m.step)));
            }
            last_step = Some(m.step);
            let rule = rules.rule(m.rule);
            // lowest-indexed enabled rule must be the one recorded
            let fired = rules.rules().iter().find(|r| r.holds(g, &start, m.node));
            if fired.map(|r| r.id) != Some(m.rule) {
                return Err(Error::RuleNotEnabled {
                    node: m.node,
                    rule: m.rule.name,
                });
            }
            if rule.becomes != m.new_state {
                return Err(Error::Invalid(format!("step {} records wrong state", m.step)));
            }
            current.set(m.node, rule.becomes);
        }
        history.push(current.clone());
    }
    if current != trace.final_config {
        return Err(Error::Invalid("replayed end state differs from trace".into()));
    }
    let stable = crate::engine::enabled_set(g, &current, rules).is_empty();
    if stable != trace.converged {
        return Err(Error::Invalid("converged flag disagrees with end state".into()));
    }
    Ok(history)
}
