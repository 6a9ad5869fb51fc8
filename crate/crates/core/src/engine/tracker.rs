//! Incremental enabled-set maintenance.
//!
//! For every node `w` and rule `r` the tracker keeps the number of neighbors
//! of `w` passing `r`'s neighbor test, plus the cached `exp` of every node.
//! A state change at `x` can only alter tests that read `x`'s state (at the
//! neighbors of `x`) or the `exp` of a neighbor of `x` (at distance 2), so
//! only those counters are touched.

use crate::engine::config::{Configuration, NodeState};
use crate::engine::rules::{Neighbor, Quantifier, RuleSet};
use crate::graph::{Graph, NodeId};

const NONE: u8 = u8::MAX;
const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Tracker {
    exp: Vec<u32>,
    /// counts[w * rules + r]
    counts: Vec<u32>,
    firing: Vec<u8>,
    enabled: Vec<NodeId>,
    pos: Vec<u32>,
    width: usize,
}

impl Tracker {
    pub(crate) fn new(g: &Graph, rules: &RuleSet, c: &Configuration) -> Self {
        let n = g.node_count();
        let width = rules.len();
        let exp: Vec<u32> = g
            .nodes()
            .map(|v| g.neighbors(v).iter().filter(|&&u| c.is_in(u)).count() as u32)
            .collect();
        let mut counts = vec![0u32; n * width];
        for w in g.nodes() {
            for &u in g.neighbors(w) {
                let view = Neighbor {
                    me: w,
                    id: u,
                    state: c.state(u),
                    exp: exp[u.index()],
                };
                for (r, rule) in rules.rules().iter().enumerate() {
                    if (rule.test)(view) {
                        counts[w.index() * width + r] += 1;
                    }
                }
            }
        }
        let mut t = Tracker {
            exp,
            counts,
            firing: vec![NONE; n],
            enabled: Vec::new(),
            pos: vec![ABSENT; n],
            width,
        };
        for w in g.nodes() {
            t.refresh(g, rules, c, w);
        }
        t
    }

    /// Enabled nodes in insertion order (deterministic, not sorted).
    pub(crate) fn enabled(&self) -> &[NodeId] {
        &self.enabled
    }

    pub(crate) fn firing(&self, v: NodeId) -> Option<u8> {
        match self.firing[v.index()] {
            NONE => None,
            r => Some(r),
        }
    }

    pub(crate) fn exp(&self, v: NodeId) -> u32 {
        self.exp[v.index()]
    }

    /// Sets `x` to `new` in `c` and updates every affected counter.
    pub(crate) fn change(
        &mut self,
        g: &Graph,
        rules: &RuleSet,
        c: &mut Configuration,
        x: NodeId,
        new: NodeState,
    ) {
        let old = c.state(x);
        if old == new {
            return;
        }
        c.set(x, new);

        let ex = self.exp[x.index()];
        for &w in g.neighbors(x) {
            let before = Neighbor {
                me: w,
                id: x,
                state: old,
                exp: ex,
            };
            let after = Neighbor { state: new, ..before };
            self.adjust(rules, w, before, after);
            self.refresh(g, rules, c, w);
        }

        for &u in g.neighbors(x) {
            let oe = self.exp[u.index()];
            let ne = if new == NodeState::In { oe + 1 } else { oe - 1 };
            self.exp[u.index()] = ne;
            if !rules.reads_exp() {
                continue;
            }
            let su = c.state(u);
            if rules.is_anonymous() {
                let before = Neighbor {
                    me: u,
                    id: u,
                    state: su,
                    exp: oe,
                };
                let after = Neighbor { exp: ne, ..before };
                let flips: Vec<(usize, bool)> = rules
                    .rules()
                    .iter()
                    .enumerate()
                    .filter_map(|(r, rule)| {
                        let (a, b) = ((rule.test)(before), (rule.test)(after));
                        (a != b).then_some((r, b))
                    })
                    .collect();
                if flips.is_empty() {
                    continue;
                }
                for &w in g.neighbors(u) {
                    for &(r, now) in &flips {
                        let k = w.index() * self.width + r;
                        if now {
                            self.counts[k] += 1;
                        } else {
                            self.counts[k] -= 1;
                        }
                    }
                    self.refresh(g, rules, c, w);
                }
            } else {
                for &w in g.neighbors(u) {
                    let before = Neighbor {
                        me: w,
                        id: u,
                        state: su,
                        exp: oe,
                    };
                    let after = Neighbor { exp: ne, ..before };
                    self.adjust(rules, w, before, after);
                    self.refresh(g, rules, c, w);
                }
            }
        }
        self.refresh(g, rules, c, x);
    }

    fn adjust(&mut self, rules: &RuleSet, w: NodeId, before: Neighbor, after: Neighbor) {
        for (r, rule) in rules.rules().iter().enumerate() {
            let (a, b) = ((rule.test)(before), (rule.test)(after));
            if a != b {
                let k = w.index() * self.width + r;
                if b {
                    self.counts[k] += 1;
                } else {
                    self.counts[k] -= 1;
                }
            }
        }
    }

    fn refresh(&mut self, g: &Graph, rules: &RuleSet, c: &Configuration, w: NodeId) {
        let deg = g.degree(w) as u32;
        let base = w.index() * self.width;
        let state = c.state(w);
        let fire = rules
            .rules()
            .iter()
            .enumerate()
            .find(|(r, rule)| {
                rule.when == state
                    && match rule.quantifier {
                        Quantifier::All => self.counts[base + r] == deg,
                        Quantifier::Any => self.counts[base + r] > 0,
                    }
            })
            .map_or(NONE, |(r, _)| r as u8);
        self.firing[w.index()] = fire;

        let p = self.pos[w.index()];
        match (fire != NONE, p != ABSENT) {
            (true, false) => {
                self.pos[w.index()] = self.enabled.len() as u32;
                self.enabled.push(w);
            }
            (false, true) => {
                let last = *self.enabled.last().expect("nonempty");
                self.enabled.swap_remove(p as usize);
                if last != w {
                    self.pos[last.index()] = p;
                }
                self.pos[w.index()] = ABSENT;
            }
            _ => {}
        }
    }

    /// Compares against a from-scratch rebuild; the enabled list is compared
    /// as a set since its order is history dependent.
    pub(crate) fn diverges_from(&self, fresh: &Tracker) -> Option<String> {
        if self.exp != fresh.exp {
            return Some("exp cache".into());
        }
        if self.counts != fresh.counts {
            return Some("neighbor counters".into());
        }
        if self.firing != fresh.firing {
            return Some("firing rules".into());
        }
        let mut a = self.enabled.clone();
        let mut b = fresh.enabled.clone();
        a.sort_unstable();
        b.sort_unstable();
        (a != b).then(|| "enabled set".into())
    }
}
