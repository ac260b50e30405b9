use super::{Channel, Genome, NeuronKind, NODE_CONTROLS};
use crate::config::SimConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Activation of every neuron, aligned with `Genome::neurons`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrnState {
    pub values: Vec<f64>,
}

impl GrnState {
    pub fn new(genome: &Genome) -> Self {
        Self {
            values: vec![0.0; genome.neurons.len()],
        }
    }
}

/// Pre-activation value of each output channel.
pub type RawOutputs = BTreeMap<Channel, f64>;

/// One synchronous update.
///
/// Inputs are loaded into the previous state first (clamped to [-1, 1],
/// bias forced to 1, missing channels read as 0), then every other neuron
/// takes `tanh` of its weighted sum over that snapshot.
pub fn tick(genome: &Genome, prev: &GrnState, inputs: &BTreeMap<Channel, f64>) -> (GrnState, RawOutputs) {
    let n = genome.neurons.len();
    let mut loaded = prev.values.clone();
    loaded.resize(n, 0.0);
    for (ch, id) in &genome.bindings {
        if !ch.is_input() {
            continue;
        }
        let v = if *ch == Channel::Bias {
            1.0
        } else {
            let v = inputs.get(ch).copied().unwrap_or(0.0);
            if v.is_nan() {
                0.0
            } else {
                v.clamp(-1.0, 1.0)
            }
        };
        if let Some(i) = genome.neuron_index(*id) {
            loaded[i] = v;
        }
    }

    let mut z = vec![0.0; n];
    for c in genome.connections.iter().filter(|c| c.enabled) {
        if let (Some(s), Some(d)) = (genome.neuron_index(c.src), genome.neuron_index(c.dst)) {
            z[d] += c.weight * loaded[s];
        }
    }

    let mut next = loaded;
    for (i, neuron) in genome.neurons.iter().enumerate() {
        if neuron.kind != NeuronKind::Input {
            next[i] = z[i].tanh();
        }
    }

    let mut raw = RawOutputs::new();
    for (ch, id) in &genome.bindings {
        if !ch.is_input() {
            if let Some(i) = genome.neuron_index(*id) {
                raw.insert(*ch, z[i]);
            }
        }
    }
    (GrnState { values: next }, raw)
}

/// `lo + mod(x - lo, hi - lo)` with a non-negative modulus; result in `[lo, hi)`.
pub fn remap_cyclic(x: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(hi > lo);
    let w = hi - lo;
    let y = lo + (x - lo).rem_euclid(w);
    if y >= hi || !y.is_finite() {
        lo
    } else {
        y
    }
}

/// Map a raw output so that `[-1, 1)` spans `[lo, hi)` once, then wrap.
pub fn remap_output(z: f64, lo: f64, hi: f64) -> f64 {
    remap_cyclic(lo + (z + 1.0) * 0.5 * (hi - lo), lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeExpression {
    pub control: [f64; NODE_CONTROLS as usize],
    pub signature: f64,
}

/// Remapped outputs ready for use by the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expression {
    pub growth_rate: f64,
    pub digestion_rate: f64,
    pub division_threshold: f64,
    /// Below one half growth is funded first, otherwise repair.
    pub repair_priority: f64,
    pub production_rate: f64,
    /// Aligned with `Unregulated::nodes`.
    pub nodes: Vec<NodeExpression>,
}

pub fn express(genome: &Genome, raw: &RawOutputs, cfg: &SimConfig) -> Expression {
    let get = |ch: Channel| raw.get(&ch).copied().unwrap_or(0.0);
    let nodes = genome
        .unregulated
        .nodes
        .iter()
        .map(|n| NodeExpression {
            control: std::array::from_fn(|k| {
                remap_output(
                    get(Channel::Control {
                        node: n.uid,
                        k: k as u8,
                    }),
                    -1.0,
                    1.0,
                )
            }),
            signature: remap_output(get(Channel::Signature { node: n.uid }), 0.0, 1.0),
        })
        .collect();
    Expression {
        growth_rate: remap_output(get(Channel::GrowthRate), 0.0, cfg.grn.max_growth_rate),
        digestion_rate: remap_output(get(Channel::DigestionRate), 0.0, cfg.grn.max_digestion_rate),
        division_threshold: remap_output(
            get(Channel::DivisionThreshold),
            cfg.evolution.r_min_div,
            cfg.evolution.r_max_div,
        ),
        repair_priority: remap_output(get(Channel::RepairPriority), 0.0, 1.0),
        production_rate: remap_output(get(Channel::ProductionRate), 0.0, cfg.grn.max_production_rate),
        nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remap_examples() {
        assert_eq!(remap_cyclic(0.5, 0.0, 1.0), 0.5);
        assert_eq!(remap_cyclic(1.25, 0.0, 1.0), 0.25);
        assert_eq!(remap_cyclic(-0.25, 0.0, 1.0), 0.75);
        assert_eq!(remap_cyclic(1.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn remap_tiny_negative_stays_below_hi() {
        let y = remap_cyclic(-1e-20, 0.0, 1.0);
        assert!((0.0..1.0).contains(&y));
    }

    #[test]
    fn output_spans_range_once() {
        assert_eq!(remap_output(-1.0, 2.0, 4.0), 2.0);
        assert_eq!(remap_output(0.0, 2.0, 4.0), 3.0);
        assert_eq!(remap_output(1.0, 2.0, 4.0), 2.0);
    }
}
