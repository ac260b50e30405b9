use super::{
    Channel, Connection, Genome, GenomeError, Innovations, Neuron, NeuronId, NeuronKind, NodeGene, Unregulated,
    CELL_INPUTS, CELL_OUTPUTS,
};
use crate::config::GrnConfig;
use crate::rng::RngStream;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Attempts at finding an unused (src, dst) pair before giving up.
const ADD_CONNECTION_TRIES: usize = 20;

impl Genome {
    fn push_neuron(&mut self, kind: NeuronKind, channel: Option<Channel>) -> NeuronId {
        let id = self.next_neuron;
        self.next_neuron += 1;
        self.neurons.push(Neuron {
            id,
            kind,
            bias_input: channel == Some(Channel::Bias),
        });
        if let Some(ch) = channel {
            self.bindings.insert(ch, id);
        }
        id
    }

    fn connect(&mut self, src: NeuronId, dst: NeuronId, weight: f64, innov: &mut Innovations) {
        self.connections.push(Connection {
            src,
            dst,
            weight,
            enabled: true,
            innovation: innov.fresh(),
        });
    }

    fn input_ids(&self) -> Vec<NeuronId> {
        self.neurons
            .iter()
            .filter(|n| n.kind == NeuronKind::Input)
            .map(|n| n.id)
            .collect()
    }

    /// Birth wiring for one output: traits get a single bias link whose
    /// weight makes the remapped value uniform; controls see each input
    /// with probability one half.
    fn wire_output(
        &mut self,
        ch: Channel,
        id: NeuronId,
        rng: &mut RngStream,
        cfg: &GrnConfig,
        innov: &mut Innovations,
    ) {
        if ch.is_trait() {
            let bias = self.bindings[&Channel::Bias];
            let w = rng.uniform(-1.0, 1.0);
            self.connect(bias, id, w, innov);
        } else {
            for src in self.input_ids() {
                if rng.chance(0.5) {
                    let w = rng.normal(0.0, cfg.sigma_init);
                    self.connect(src, id, w, innov);
                }
            }
        }
    }

    fn control_outputs(&self) -> Vec<NeuronId> {
        self.bindings
            .iter()
            .filter(|(ch, _)| !ch.is_input() && !ch.is_trait())
            .map(|(_, id)| *id)
            .collect()
    }

    /// Insert a surface node at `position` with fresh channels wired by the
    /// birth rules. New sensors also reach existing controls with
    /// probability one half.
    pub fn add_node(
        &mut self,
        position: usize,
        angle: f64,
        rng: &mut RngStream,
        cfg: &GrnConfig,
        innov: &mut Innovations,
    ) {
        let uid = self.next_node_uid;
        self.next_node_uid += 1;
        let position = position.min(self.unregulated.nodes.len());
        self.unregulated.nodes.insert(position, NodeGene { uid, angle });

        let existing_controls = self.control_outputs();
        let channels = Channel::for_node(uid);
        let mut sensors = Vec::new();
        for ch in channels.iter().filter(|c| c.is_input()) {
            sensors.push(self.push_neuron(NeuronKind::Input, Some(*ch)));
        }
        for src in sensors {
            for &dst in &existing_controls {
                if rng.chance(0.5) {
                    let w = rng.normal(0.0, cfg.sigma_init);
                    self.connect(src, dst, w, innov);
                }
            }
        }
        for ch in channels.iter().filter(|c| !c.is_input()) {
            let id = self.push_neuron(NeuronKind::Output, Some(*ch));
            self.wire_output(*ch, id, rng, cfg, innov);
        }
    }

    /// Remove the node at `index` with its channels, neurons and links.
    /// Refuses to drop the last node.
    pub fn remove_node(&mut self, index: usize) -> bool {
        if self.unregulated.nodes.len() <= 1 || index >= self.unregulated.nodes.len() {
            return false;
        }
        let uid = self.unregulated.nodes.remove(index).uid;
        let gone: Vec<NeuronId> = Channel::for_node(uid)
            .into_iter()
            .filter_map(|ch| self.bindings.remove(&ch))
            .collect();
        self.neurons.retain(|n| !gone.contains(&n.id));
        self.connections
            .retain(|c| !gone.contains(&c.src) && !gone.contains(&c.dst));
        true
    }
}

/// A fresh genome for the initial population.
pub fn init_genome(
    node_count: usize,
    rng: &mut RngStream,
    cfg: &GrnConfig,
    innov: &mut Innovations,
) -> Result<Genome, GenomeError> {
    if node_count == 0 {
        return Err(GenomeError::NoNodes);
    }
    let mut g = Genome {
        neurons: Vec::new(),
        connections: Vec::new(),
        bindings: BTreeMap::new(),
        unregulated: Unregulated {
            nodes: Vec::new(),
            colour: [rng.unit(), rng.unit(), rng.unit()],
        },
        next_neuron: 0,
        next_node_uid: 0,
    };
    for _ in 0..node_count {
        let uid = g.next_node_uid;
        g.next_node_uid += 1;
        g.unregulated.nodes.push(NodeGene {
            uid,
            angle: rng.uniform(0.0, TAU),
        });
    }

    let mut inputs: Vec<Channel> = CELL_INPUTS.to_vec();
    let mut outputs: Vec<Channel> = CELL_OUTPUTS.to_vec();
    for n in &g.unregulated.nodes {
        for ch in Channel::for_node(n.uid) {
            if ch.is_input() {
                inputs.push(ch);
            } else {
                outputs.push(ch);
            }
        }
    }
    for ch in inputs {
        g.push_neuron(NeuronKind::Input, Some(ch));
    }
    for ch in outputs {
        let id = g.push_neuron(NeuronKind::Output, Some(ch));
        g.wire_output(ch, id, rng, cfg, innov);
    }
    Ok(g)
}

/// NEAT-style weight and structure mutation. Channel bindings and the
/// unregulated traits are left alone.
pub fn mutate_genome(genome: &Genome, rng: &mut RngStream, cfg: &GrnConfig, innov: &mut Innovations) -> Genome {
    let mut g = genome.clone();

    for c in &mut g.connections {
        let u = rng.unit();
        if u < cfg.p_weight_reset {
            c.weight = rng.normal(0.0, cfg.sigma_init);
        } else if u < cfg.p_weight_reset + cfg.p_weight_perturb {
            c.weight += rng.normal(0.0, cfg.weight_perturb_sigma);
        }
    }

    if rng.chance(cfg.p_add_connection) {
        let targets: Vec<NeuronId> = g
            .neurons
            .iter()
            .filter(|n| n.kind != NeuronKind::Input)
            .map(|n| n.id)
            .collect();
        for _ in 0..ADD_CONNECTION_TRIES {
            let src = g.neurons[rng.index(g.neurons.len())].id;
            let dst = targets[rng.index(targets.len())];
            if !g.has_pair(src, dst) {
                let w = rng.normal(0.0, cfg.sigma_init);
                g.connect(src, dst, w, innov);
                break;
            }
        }
    }

    if rng.chance(cfg.p_add_neuron) {
        let enabled: Vec<usize> = (0..g.connections.len()).filter(|&i| g.connections[i].enabled).collect();
        if !enabled.is_empty() {
            let i = enabled[rng.index(enabled.len())];
            g.connections[i].enabled = false;
            let (a, b, w) = (g.connections[i].src, g.connections[i].dst, g.connections[i].weight);
            let n = g.push_neuron(NeuronKind::Hidden, None);
            g.connect(a, n, 1.0, innov);
            g.connect(n, b, w, innov);
        }
    }

    if rng.chance(cfg.p_toggle_enable) && !g.connections.is_empty() {
        let i = rng.index(g.connections.len());
        g.connections[i].enabled = !g.connections[i].enabled;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fresh(nodes: usize, seed: u64) -> (Genome, Innovations) {
        let mut rng = RngStream::from_master_seed(seed);
        let mut innov = Innovations::default();
        let g = init_genome(nodes, &mut rng, &GrnConfig::default(), &mut innov).unwrap();
        (g, innov)
    }

    #[test]
    fn init_is_valid_and_traits_hang_off_bias() {
        let (g, _) = fresh(4, 1);
        g.validate().unwrap();
        let bias = g.binding(Channel::Bias).unwrap();
        for (ch, id) in &g.bindings {
            if ch.is_trait() {
                let inc: Vec<_> = g.incoming(*id).collect();
                assert_eq!(inc.len(), 1);
                assert_eq!(inc[0].src, bias);
            }
        }
    }

    #[test]
    fn zero_nodes_rejected() {
        let mut rng = RngStream::from_master_seed(1);
        let mut innov = Innovations::default();
        assert_eq!(
            init_genome(0, &mut rng, &GrnConfig::default(), &mut innov).unwrap_err(),
            GenomeError::NoNodes
        );
    }

    #[test]
    fn split_connection_structure() {
        let (g, mut innov) = fresh(1, 2);
        let cfg = GrnConfig {
            p_weight_perturb: 0.0,
            p_weight_reset: 0.0,
            p_add_connection: 0.0,
            p_add_neuron: 1.0,
            p_toggle_enable: 0.0,
            ..GrnConfig::default()
        };
        let mut rng = RngStream::from_master_seed(3);
        let m = mutate_genome(&g, &mut rng, &cfg, &mut innov);
        m.validate().unwrap();
        let hidden = m.neurons.iter().find(|n| n.kind == NeuronKind::Hidden).unwrap().id;
        let old = m.connections.iter().find(|c| !c.enabled).unwrap();
        let into = m.connections.iter().find(|c| c.dst == hidden).unwrap();
        let out = m.connections.iter().find(|c| c.src == hidden).unwrap();
        assert_eq!((into.src, into.weight), (old.src, 1.0));
        assert_eq!((out.dst, out.weight), (old.dst, old.weight));
    }

    #[test]
    fn zero_rates_leave_genome_unchanged() {
        let (g, mut innov) = fresh(3, 4);
        let cfg = GrnConfig {
            p_weight_perturb: 0.0,
            p_weight_reset: 0.0,
            p_add_connection: 0.0,
            p_add_neuron: 0.0,
            p_toggle_enable: 0.0,
            ..GrnConfig::default()
        };
        let mut rng = RngStream::from_master_seed(5);
        assert_eq!(mutate_genome(&g, &mut rng, &cfg, &mut innov), g);
    }

    #[test]
    fn node_add_and_remove_keep_bindings_complete() {
        let (mut g, mut innov) = fresh(2, 6);
        let mut rng = RngStream::from_master_seed(7);
        let before = g.bindings.len();
        g.add_node(1, 0.5, &mut rng, &GrnConfig::default(), &mut innov);
        g.validate().unwrap();
        assert_eq!(g.bindings.len(), before + 7);
        assert!(g.remove_node(0));
        assert!(g.remove_node(0));
        g.validate().unwrap();
        assert!(!g.remove_node(0));
    }
}
