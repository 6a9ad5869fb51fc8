use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeState {
    Out,
    In,
}

impl NodeState {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeState::In => "In",
            NodeState::Out => "Out",
        }
    }
}

impl fmt::Display for NodeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "In" => Ok(NodeState::In),
            "Out" => Ok(NodeState::Out),
            _ => Err(Error::UnknownToken {
                what: "node state",
                token: s.to_string(),
            }),
        }
    }
}

/// Global state: one [`NodeState`] per node, indexed by [`NodeId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    states: Vec<NodeState>,
}

impl Configuration {
    pub fn uniform(n: usize, state: NodeState) -> Self {
        Configuration {
            states: vec![state; n],
        }
    }

    pub fn all_out(n: usize) -> Self {
        Self::uniform(n, NodeState::Out)
    }

    pub fn all_in(n: usize) -> Self {
        Self::uniform(n, NodeState::In)
    }

    /// Configuration whose `In` set is exactly `members`.
    pub fn from_members(n: usize, members: &[NodeId]) -> Self {
        let mut c = Self::all_out(n);
        for &v in members {
            c.states[v.index()] = NodeState::In;
        }
        c
    }

    pub fn from_states(states: Vec<NodeState>) -> Self {
        Configuration { states }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.states.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    #[inline]
    pub fn state(&self, v: NodeId) -> NodeState {
        self.states[v.index()]
    }

    #[inline]
    pub fn is_in(&self, v: NodeId) -> bool {
        self.state(v) == NodeState::In
    }

    pub fn set(&mut self, v: NodeId, s: NodeState) {
        self.states[v.index()] = s;
    }

    pub fn states(&self) -> &[NodeState] {
        &self.states
    }

    /// The set S = { v : state(v) = In }, ascending.
    pub fn members(&self) -> Vec<NodeId> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == NodeState::In)
            .map(|(i, _)| NodeId::from(i))
            .collect()
    }

    pub fn cardinality(&self) -> usize {
        self.states.iter().filter(|s| **s == NodeState::In).count()
    }

    pub fn check_against(&self, g: &Graph) -> Result<()> {
        if self.len() == g.node_count() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: g.node_count(),
                got: self.len(),
            })
        }
    }
}

/// Number of `v`'s neighbors whose state is `In`, recounted from `c`.
pub fn exp_of(g: &Graph, c: &Configuration, v: NodeId) -> u32 {
    g.neighbors(v).iter().filter(|&&u| c.is_in(u)).count() as u32
}

/// Named initial-configuration recipes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitPreset {
    AllOut,
    AllIn,
    /// Each node independently `In` with the given probability.
    Random(f64),
}

impl InitPreset {
    pub fn build(&self, n: usize, seed: u64) -> Configuration {
        match *self {
            InitPreset::AllOut => Configuration::all_out(n),
            InitPreset::AllIn => Configuration::all_in(n),
            InitPreset::Random(p) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Configuration::from_states(
                    (0..n)
                        .map(|_| {
                            if rng.gen_bool(p) {
                                NodeState::In
                            } else {
                                NodeState::Out
                            }
                        })
                        .collect(),
                )
            }
        }
    }
}

impl fmt::Display for InitPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitPreset::AllOut => f.write_str("all-out"),
            InitPreset::AllIn => f.write_str("all-in"),
            InitPreset::Random(p) => write!(f, "random:{p}"),
        }
    }
}

impl FromStr for InitPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownToken {
            what: "init preset",
            token: s.to_string(),
        };
        match s {
            "all-out" => Ok(InitPreset::AllOut),
            "all-in" => Ok(InitPreset::AllIn),
            _ => {
                let p: f64 = s
                    .strip_prefix("random:")
                    .ok_or_else(unknown)?
                    .parse()
                    .map_err(|_| unknown())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Invalid(format!("init probability {p} outside [0, 1]")));
                }
                Ok(InitPreset::Random(p))
            }
        }
    }
}
