//! Concrete rule sets and the registry that maps CLI tokens onto them.

use std::fmt;
use std::str::FromStr;

use crate::engine::{NodeState, Quantifier, Rule, RuleId, RuleSet};
use crate::error::{Error, Result};
use crate::verifier::Property;

pub mod md2is {
    use super::*;

    pub const R1: RuleId = RuleId {
        index: 0,
        name: "R1",
    };
    pub const R2: RuleId = RuleId {
        index: 1,
        name: "R2",
    };

    /// Maximal distance-2 independent set under the expression model.
    ///
    /// R1: `Out` and every neighbor is `Out` with `exp = 0` -> `In`.
    /// R2: `In` and some neighbor is `In` or has `exp > 1` -> `Out`.
    ///
    /// A neighbor with `exp = 1` next to an `In` node is dominated only by
    /// that node and does not trigger R2. No rule reads node ids.
    pub fn rules() -> RuleSet {
        RuleSet::new(
            "md2is",
            vec![
                Rule {
                    id: R1,
                    when: NodeState::Out,
                    quantifier: Quantifier::All,
                    test: |u| u.state == NodeState::Out && u.exp == 0,
                    becomes: NodeState::In,
                },
                Rule {
                    id: R2,
                    when: NodeState::In,
                    quantifier: Quantifier::Any,
                    test: |u| u.state == NodeState::In || u.exp > 1,
                    becomes: NodeState::Out,
                },
            ],
            true,
            true,
        )
    }
}

pub mod mis {
    use super::*;

    pub const ENTER: RuleId = RuleId {
        index: 0,
        name: "enter",
    };
    pub const LEAVE: RuleId = RuleId {
        index: 1,
        name: "leave",
    };

    /// Join when no neighbor is in the set, leave when some neighbor is.
    /// Only stabilizes under a central daemon.
    pub fn central_rules() -> RuleSet {
        RuleSet::new(
            "mis",
            vec![
                Rule {
                    id: ENTER,
                    when: NodeState::Out,
                    quantifier: Quantifier::All,
                    test: |u| u.state == NodeState::Out,
                    becomes: NodeState::In,
                },
                Rule {
                    id: LEAVE,
                    when: NodeState::In,
                    quantifier: Quantifier::Any,
                    test: |u| u.state == NodeState::In,
                    becomes: NodeState::Out,
                },
            ],
            true,
            false,
        )
    }

    /// Id-ordered variant that also stabilizes under subset daemons.
    ///
    /// enter: `Out`, no neighbor `In`, and every smaller-id neighbor already
    /// has an `In` neighbor of its own. leave: `In` with a smaller-id `In`
    /// neighbor.
    pub fn idbased_rules() -> RuleSet {
        RuleSet::new(
            "mis-id",
            vec![
                Rule {
                    id: ENTER,
                    when: NodeState::Out,
                    quantifier: Quantifier::All,
                    test: |u| u.state == NodeState::Out && (u.id > u.me || u.exp > 0),
                    becomes: NodeState::In,
                },
                Rule {
                    id: LEAVE,
                    when: NodeState::In,
                    quantifier: Quantifier::Any,
                    test: |u| u.state == NodeState::In && u.id < u.me,
                    becomes: NodeState::Out,
                },
            ],
            false,
            true,
        )
    }
}

pub fn md2is_rules() -> RuleSet {
    md2is::rules()
}

pub fn mis_central_rules() -> RuleSet {
    mis::central_rules()
}

pub fn mis_idbased_rules() -> RuleSet {
    mis::idbased_rules()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    Md2is,
    MisCentral,
    MisIdBased,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 3] = [
        AlgorithmId::Md2is,
        AlgorithmId::MisCentral,
        AlgorithmId::MisIdBased,
    ];

    pub fn token(self) -> &'static str {
        match self {
            AlgorithmId::Md2is => "md2is",
            AlgorithmId::MisCentral => "mis",
            AlgorithmId::MisIdBased => "mis-id",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.token() == s)
            .ok_or_else(|| Error::UnknownToken {
                what: "algorithm",
                token: s.to_string(),
            })
    }
}

/// A runnable algorithm: its rules plus the property its fixpoints satisfy.
pub trait Algorithm: Send + Sync {
    fn id(&self) -> AlgorithmId;
    fn rules(&self) -> &RuleSet;
    fn fixpoint_property(&self) -> Property;
}

struct Builtin {
    id: AlgorithmId,
    rules: RuleSet,
    property: Property,
}

impl Algorithm for Builtin {
    fn id(&self) -> AlgorithmId {
        self.id
    }

    fn rules(&self) -> &RuleSet {
        &self.rules
    }

    fn fixpoint_property(&self) -> Property {
        self.property
    }
}

pub struct AlgorithmRegistry {
    entries: Vec<Box<dyn Algorithm>>,
}

impl AlgorithmRegistry {
    pub fn builtin() -> Self {
        let entries: Vec<Box<dyn Algorithm>> = vec![
            Box::new(Builtin {
                id: AlgorithmId::Md2is,
                rules: md2is_rules(),
                property: Property::MaximalD2is,
            }),
            Box::new(Builtin {
                id: AlgorithmId::MisCentral,
                rules: mis_central_rules(),
                property: Property::MaximalIndependent,
            }),
            Box::new(Builtin {
                id: AlgorithmId::MisIdBased,
                rules: mis_idbased_rules(),
                property: Property::MaximalIndependent,
            }),
        ];
        AlgorithmRegistry { entries }
    }

    pub fn get(&self, id: AlgorithmId) -> &dyn Algorithm {
        self.entries
            .iter()
            .find(|a| a.id() == id)
            .map(|a| a.as_ref())
            .expect("every algorithm id is registered")
    }

    pub fn lookup(&self, token: &str) -> Result<&dyn Algorithm> {
        Ok(self.get(token.parse()?))
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Algorithm> {
        self.entries.iter().map(|a| a.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{
        apply_move, enabled_rules, enabled_set, run_to_fixpoint, step_subset, CentralRandom,
        Configuration, Synchronous,
    };
    use crate::graph::{Graph, NodeId};

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    #[test]
    fn registry_covers_every_token() {
        let reg = AlgorithmRegistry::builtin();
        for tok in ["md2is", "mis", "mis-id"] {
            let a = reg.lookup(tok).unwrap();
            assert_eq!(a.id().token(), tok);
            assert_eq!(a.rules().name(), tok);
        }
        assert!(reg.lookup("md3is").is_err());
    }

    #[test]
    fn md2is_enabled_rule_examples() {
        let rules = md2is_rules();
        let g = Graph::empty(1);
        assert_eq!(
            enabled_rules(&g, &Configuration::all_out(1), n(0), &rules),
            vec![md2is::R1]
        );

        let edge = Graph::path(2);
        let both = Configuration::all_in(2);
        for v in edge.nodes() {
            assert_eq!(enabled_rules(&edge, &both, v, &rules), vec![md2is::R2]);
        }

        let p3 = Graph::path(3);
        let c = Configuration::from_members(3, &[n(0)]);
        for v in p3.nodes() {
            assert!(enabled_rules(&p3, &c, v, &rules).is_empty(), "node {v}");
        }
    }

    #[test]
    fn md2is_enabled_set_examples() {
        let rules = md2is_rules();
        let g = Graph::empty(4);
        assert_eq!(enabled_set(&g, &Configuration::all_out(4), &rules).len(), 4);
        let k3 = Graph::complete(3);
        assert_eq!(enabled_set(&k3, &Configuration::all_in(3), &rules).len(), 3);
        let p5 = Graph::path(5);
        let legit = Configuration::from_members(5, &[n(0), n(3)]);
        assert!(enabled_set(&p5, &legit, &rules).is_empty());
    }

    #[test]
    fn md2is_exp_one_does_not_trigger_r2() {
        // star: center In, leaves Out; each leaf has exp = 1
        let star = Graph::star(3);
        let c = Configuration::from_members(4, &[n(0)]);
        assert!(enabled_rules(&star, &c, n(0), &md2is_rules()).is_empty());
        // path 0-1-2, 0 In and 2 In: node 1 has exp = 2, so both ends get R2
        let p3 = Graph::path(3);
        let c = Configuration::from_members(3, &[n(0), n(2)]);
        assert_eq!(enabled_rules(&p3, &c, n(0), &md2is_rules()), vec![md2is::R2]);
    }

    #[test]
    fn apply_move_examples() {
        let rules = md2is_rules();
        let p3 = Graph::path(3);
        let c = apply_move(&p3, &Configuration::all_out(3), n(1), md2is::R1, &rules).unwrap();
        assert_eq!(c, Configuration::from_members(3, &[n(1)]));

        let edge = Graph::path(2);
        let c = apply_move(&edge, &Configuration::all_in(2), n(0), md2is::R2, &rules).unwrap();
        assert_eq!(c, Configuration::from_members(2, &[n(1)]));

        let err = apply_move(&p3, &Configuration::from_members(3, &[n(1)]), n(1), md2is::R1, &rules);
        assert!(matches!(err, Err(Error::RuleNotEnabled { .. })));
    }

    #[test]
    fn mis_central_examples() {
        let rules = mis_central_rules();
        for k in 2..7 {
            let g = Graph::complete(k);
            let t = run_to_fixpoint(&g, &rules, &mut CentralRandom::new(k as u64), Configuration::all_out(k), 100)
                .unwrap();
            assert!(t.converged);
            assert_eq!(t.moves.len(), 1);
            assert_eq!(t.final_config.cardinality(), 1);
        }
        // all-In edge: either endpoint leaves, then nothing is enabled
        let edge = Graph::path(2);
        for seed in 0..20 {
            let t = run_to_fixpoint(&edge, &rules, &mut CentralRandom::new(seed), Configuration::all_in(2), 100)
                .unwrap();
            assert!(t.converged);
            assert_eq!(t.moves.len(), 1);
            assert_eq!(t.moves[0].rule, mis::LEAVE);
        }
    }

    #[test]
    fn mis_idbased_examples() {
        let rules = mis_idbased_rules();
        let edge = Graph::path(2);
        let t = run_to_fixpoint(&edge, &rules, &mut Synchronous::new(0), Configuration::all_out(2), 100).unwrap();
        assert!(t.converged);
        assert_eq!(t.rounds, 1);
        assert_eq!(t.final_config.members(), vec![n(0)]);

        let k3 = Graph::complete(3);
        let (recs, c) = step_subset(&k3, &Configuration::all_in(3), &rules, &mut Synchronous::new(0))
            .unwrap()
            .unwrap();
        assert_eq!(recs.iter().map(|r| r.node).collect::<Vec<_>>(), vec![n(1), n(2)]);
        assert_eq!(c.members(), vec![n(0)]);
    }
}
