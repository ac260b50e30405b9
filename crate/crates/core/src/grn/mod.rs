//! Genomes: a recurrent network that is both gene regulator and controller.
//!
//! External channels (sensors, regulators, controls, traits) are bound to
//! input and output neurons. Everything not expressed through the network
//! (surface node layout and colour) lives in [`Unregulated`].

mod mutation;
mod network;

pub use mutation::{init_genome, mutate_genome};
pub use network::{express, remap_cyclic, remap_output, tick, Expression, GrnState, NodeExpression, RawOutputs};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

pub type NeuronId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeuronKind {
    Input,
    Hidden,
    Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neuron {
    pub id: NeuronId,
    pub kind: NeuronKind,
    pub bias_input: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub src: NeuronId,
    pub dst: NeuronId,
    pub weight: f64,
    pub enabled: bool,
    pub innovation: u64,
}

/// A channel between the network and the rest of the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Channel {
    Bias,
    Random,
    Health,
    Size,
    Energy,
    ConstructionMass,
    PlantFood,
    MeatFood,
    Generation,
    Sensor { node: u32, k: u8 },
    GrowthRate,
    DigestionRate,
    DivisionThreshold,
    RepairPriority,
    ProductionRate,
    Control { node: u32, k: u8 },
    Signature { node: u32 },
}

pub const CELL_INPUTS: [Channel; 9] = [
    Channel::Bias,
    Channel::Random,
    Channel::Health,
    Channel::Size,
    Channel::Energy,
    Channel::ConstructionMass,
    Channel::PlantFood,
    Channel::MeatFood,
    Channel::Generation,
];

pub const CELL_OUTPUTS: [Channel; 5] = [
    Channel::GrowthRate,
    Channel::DigestionRate,
    Channel::DivisionThreshold,
    Channel::RepairPriority,
    Channel::ProductionRate,
];

pub const NODE_SENSORS: u8 = 3;
pub const NODE_CONTROLS: u8 = 3;

impl Channel {
    pub fn is_input(self) -> bool {
        matches!(
            self,
            Channel::Bias
                | Channel::Random
                | Channel::Health
                | Channel::Size
                | Channel::Energy
                | Channel::ConstructionMass
                | Channel::PlantFood
                | Channel::MeatFood
                | Channel::Generation
                | Channel::Sensor { .. }
        )
    }

    /// Heritable traits are wired only from the bias neuron at birth.
    pub fn is_trait(self) -> bool {
        matches!(
            self,
            Channel::GrowthRate | Channel::DivisionThreshold | Channel::Signature { .. }
        )
    }

    pub fn node(self) -> Option<u32> {
        match self {
            Channel::Sensor { node, .. } | Channel::Control { node, .. } | Channel::Signature { node } => Some(node),
            _ => None,
        }
    }

    /// Every channel a surface node with this uid owns.
    pub fn for_node(uid: u32) -> Vec<Channel> {
        let mut out: Vec<Channel> = (0..NODE_SENSORS).map(|k| Channel::Sensor { node: uid, k }).collect();
        out.extend((0..NODE_CONTROLS).map(|k| Channel::Control { node: uid, k }));
        out.push(Channel::Signature { node: uid });
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    /// Stable within one genome; links the node to its channels.
    pub uid: u32,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unregulated {
    pub nodes: Vec<NodeGene>,
    pub colour: [f64; 3],
}

impl Unregulated {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Run-wide source of innovation numbers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Innovations {
    next: u64,
}

impl Innovations {
    pub fn fresh(&mut self) -> u64 {
        let n = self.next;
        self.next += 1;
        n
    }

    pub fn peek(&self) -> u64 {
        self.next
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    /// Sorted by id.
    pub neurons: Vec<Neuron>,
    pub connections: Vec<Connection>,
    pub bindings: BTreeMap<Channel, NeuronId>,
    pub unregulated: Unregulated,
    pub next_neuron: NeuronId,
    pub next_node_uid: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenomeError {
    #[error("a genome needs at least one surface node")]
    NoNodes,
    #[error("neuron ids are not strictly increasing at {0}")]
    NeuronOrder(NeuronId),
    #[error("channel {0:?} is unbound")]
    Unbound(Channel),
    #[error("channel {0:?} is bound to a missing or wrongly kinded neuron")]
    BadBinding(Channel),
    #[error("neuron {0} is bound to more than one channel")]
    DoubleBinding(NeuronId),
    #[error("neuron {0} is an input or output but has no channel")]
    Orphan(NeuronId),
    #[error("bias flag is on the wrong neuron")]
    BiasFlag,
    #[error("connection {0} references a missing neuron")]
    Dangling(u64),
    #[error("connection {0} feeds an input neuron")]
    IntoInput(u64),
    #[error("innovation number {0} is used twice")]
    DuplicateInnovation(u64),
    #[error("connection {0} duplicates an existing (src, dst) pair")]
    DuplicatePair(u64),
    #[error("non-finite value in genome")]
    NonFinite,
    #[error("surface node uid {0} is duplicated or out of range")]
    NodeUid(u32),
    #[error("colour component outside [0, 1]")]
    Colour,
}

impl Genome {
    pub fn neuron_index(&self, id: NeuronId) -> Option<usize> {
        self.neurons.binary_search_by_key(&id, |n| n.id).ok()
    }

    pub fn neuron(&self, id: NeuronId) -> Option<&Neuron> {
        self.neuron_index(id).map(|i| &self.neurons[i])
    }

    pub fn binding(&self, ch: Channel) -> Option<NeuronId> {
        self.bindings.get(&ch).copied()
    }

    pub fn has_pair(&self, src: NeuronId, dst: NeuronId) -> bool {
        self.connections.iter().any(|c| c.src == src && c.dst == dst)
    }

    pub fn incoming(&self, dst: NeuronId) -> impl Iterator<Item = &Connection> {
        self.connections.iter().filter(move |c| c.dst == dst)
    }

    /// Channels that must be bound given the current node list.
    pub fn required_channels(&self) -> BTreeSet<Channel> {
        let mut set: BTreeSet<Channel> = CELL_INPUTS.iter().chain(CELL_OUTPUTS.iter()).copied().collect();
        for n in &self.unregulated.nodes {
            set.extend(Channel::for_node(n.uid));
        }
        set
    }

    pub fn validate(&self) -> Result<(), GenomeError> {
        if self.unregulated.nodes.is_empty() {
            return Err(GenomeError::NoNodes);
        }
        for w in self.neurons.windows(2) {
            if w[1].id <= w[0].id {
                return Err(GenomeError::NeuronOrder(w[1].id));
            }
        }
        if let Some(last) = self.neurons.last() {
            if last.id >= self.next_neuron {
                return Err(GenomeError::NeuronOrder(last.id));
            }
        }
        let mut uids = BTreeSet::new();
        for n in &self.unregulated.nodes {
            if !n.angle.is_finite() {
                return Err(GenomeError::NonFinite);
            }
            if n.uid >= self.next_node_uid || !uids.insert(n.uid) {
                return Err(GenomeError::NodeUid(n.uid));
            }
        }
        if self.unregulated.colour.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(GenomeError::Colour);
        }

        let required = self.required_channels();
        for ch in &required {
            if !self.bindings.contains_key(ch) {
                return Err(GenomeError::Unbound(*ch));
            }
        }
        let mut bound = BTreeSet::new();
        for (ch, id) in &self.bindings {
            if !required.contains(ch) {
                return Err(GenomeError::BadBinding(*ch));
            }
            let want = if ch.is_input() {
                NeuronKind::Input
            } else {
                NeuronKind::Output
            };
            match self.neuron(*id) {
                Some(n) if n.kind == want => {}
                _ => return Err(GenomeError::BadBinding(*ch)),
            }
            if !bound.insert(*id) {
                return Err(GenomeError::DoubleBinding(*id));
            }
        }
        for n in &self.neurons {
            if n.kind != NeuronKind::Hidden && !bound.contains(&n.id) {
                return Err(GenomeError::Orphan(n.id));
            }
            let is_bias = self.bindings.get(&Channel::Bias) == Some(&n.id);
            if n.bias_input != is_bias {
                return Err(GenomeError::BiasFlag);
            }
        }

        let mut innovations = BTreeSet::new();
        let mut pairs = BTreeSet::new();
        for c in &self.connections {
            if !c.weight.is_finite() {
                return Err(GenomeError::NonFinite);
            }
            let (Some(_), Some(dst)) = (self.neuron(c.src), self.neuron(c.dst)) else {
                return Err(GenomeError::Dangling(c.innovation));
            };
            if dst.kind == NeuronKind::Input {
                return Err(GenomeError::IntoInput(c.innovation));
            }
            if !innovations.insert(c.innovation) {
                return Err(GenomeError::DuplicateInnovation(c.innovation));
            }
            if !pairs.insert((c.src, c.dst)) {
                return Err(GenomeError::DuplicatePair(c.innovation));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "genome: {} neurons, {} connections ({} enabled), {} surface nodes",
            self.neurons.len(),
            self.connections.len(),
            self.connections.iter().filter(|c| c.enabled).count(),
            self.unregulated.nodes.len()
        )?;
        let [r, g, b] = self.unregulated.colour;
        writeln!(f, "colour: {r:.4} {g:.4} {b:.4}")?;
        for (i, n) in self.unregulated.nodes.iter().enumerate() {
            writeln!(f, "node {i}: uid {} angle {:.4}", n.uid, n.angle)?;
        }
        let names: BTreeMap<NeuronId, Channel> = self.bindings.iter().map(|(c, n)| (*n, *c)).collect();
        for n in &self.neurons {
            match names.get(&n.id) {
                Some(ch) => writeln!(f, "neuron {} {:?} {:?}", n.id, n.kind, ch)?,
                None => writeln!(f, "neuron {} {:?}", n.id, n.kind)?,
            }
        }
        for c in &self.connections {
            writeln!(
                f,
                "conn #{} {} -> {} w={:+.6}{}",
                c.innovation,
                c.src,
                c.dst,
                c.weight,
                if c.enabled { "" } else { " (disabled)" }
            )?;
        }
        Ok(())
    }
}
