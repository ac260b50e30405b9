//! Division, inheritance and mutation of the unregulated traits.

use crate::cell::{body_mass, CellId, Stores};
use crate::config::{EvolutionConfig, GrnConfig, SimConfig};
use crate::grn::{mutate_genome, Genome, Innovations};
use crate::ledger::{Ledger, Sink};
use crate::physics::Vec2;
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

pub const MIN_CHILDREN: usize = 2;
pub const MAX_CHILDREN: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineageRecord {
    pub id: CellId,
    pub parent: Option<CellId>,
    pub generation: u32,
    pub birth_tick: u64,
}

pub fn division_check(radius: f64, health: f64, threshold: f64, min_health: f64) -> bool {
    radius >= threshold && health > min_health
}

/// Expected number of children: 2 at `r_min_div` rising linearly to 6 at `r_max_div`.
pub fn expected_child_count(radius: f64, cfg: &EvolutionConfig) -> f64 {
    let span = (cfg.r_max_div - cfg.r_min_div).max(1e-12);
    let t = ((radius - cfg.r_min_div) / span).clamp(0.0, 1.0);
    MIN_CHILDREN as f64 + t * (MAX_CHILDREN - MIN_CHILDREN) as f64
}

/// Stochastic rounding of the expected count.
pub fn child_count(radius: f64, rng: &mut RngStream, cfg: &EvolutionConfig) -> usize {
    let e = expected_child_count(radius, cfg);
    let base = e.floor();
    let n = base as usize + usize::from(rng.chance(e - base));
    n.clamp(MIN_CHILDREN, MAX_CHILDREN)
}

/// Largest radius for `n` equal discs on a ring inside a disc of radius `parent`.
pub fn child_radius(parent: f64, n: usize) -> f64 {
    let s = (PI / n as f64).sin();
    parent * s / (1.0 + s)
}

/// Child offsets from the parent centre, fanned evenly from `phase`.
pub fn child_offsets(parent: f64, n: usize, phase: f64) -> Vec<Vec2> {
    let ring = parent - child_radius(parent, n);
    (0..n)
        .map(|i| Vec2::from_angle(phase + TAU * i as f64 / n as f64) * ring)
        .collect()
}

/// Split a parent into `n` children of radius `child_r`.
///
/// The overhead fraction of the stores goes to the division sink. The rest,
/// plus whatever body mass the smaller children do not use, is shared
/// equally as construction mass and stores.
pub fn split_resources(
    parent_radius: f64,
    stores: &Stores,
    n: usize,
    child_r: f64,
    density: f64,
    overhead: f64,
    ledger: &mut Ledger,
) -> Vec<Stores> {
    let mut pool = stores.clone();
    let lost = pool.take_fraction(overhead);
    ledger.mass.sink(Sink::Division, lost.mass());
    ledger.energy.sink(Sink::Division, lost.energy);
    let spare_body = (body_mass(parent_radius, density) - n as f64 * body_mass(child_r, density)).max(0.0);
    pool.construction_mass += spare_body;
    let share = 1.0 / n as f64;
    let mut out: Vec<Stores> = (0..n - 1)
        .map(|i| pool.take_fraction(share / (1.0 - share * i as f64)))
        .collect();
    out.push(pool);
    out
}

/// Node add/delete, angle jitter and colour steps.
pub fn mutate_unregulated(
    genome: &mut Genome,
    rng: &mut RngStream,
    cfg: &EvolutionConfig,
    grn: &GrnConfig,
    innov: &mut Innovations,
) {
    if rng.chance(cfg.p_node_add) {
        let position = rng.index(genome.unregulated.nodes.len() + 1);
        let angle = rng.uniform(0.0, TAU);
        genome.add_node(position, angle, rng, grn, innov);
    }
    if rng.chance(cfg.p_node_del) && genome.unregulated.nodes.len() > 1 {
        let i = rng.index(genome.unregulated.nodes.len());
        genome.remove_node(i);
    }
    for node in &mut genome.unregulated.nodes {
        if rng.chance(cfg.p_node_angle) {
            node.angle = (node.angle + rng.normal(0.0, cfg.node_angle_sigma)).rem_euclid(TAU);
        }
    }
    if rng.chance(cfg.p_colour) {
        let c = rng.index(3);
        let step = if rng.chance(0.5) {
            cfg.colour_step
        } else {
            -cfg.colour_step
        };
        let v = &mut genome.unregulated.colour[c];
        *v = (*v + step).clamp(0.0, 1.0);
    }
}

pub fn child_genome(parent: &Genome, rng: &mut RngStream, cfg: &SimConfig, innov: &mut Innovations) -> Genome {
    let mut g = mutate_genome(parent, rng, &cfg.grn, innov);
    mutate_unregulated(&mut g, rng, &cfg.evolution, &cfg.grn, innov);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grn::init_genome;

    #[test]
    fn division_check_examples() {
        assert!(!division_check(1.0, 0.15, 0.5, 0.15));
        assert!(!division_check(0.4, 0.9, 0.5, 0.15));
        assert!(division_check(0.6, 0.5, 0.5, 0.15));
    }

    #[test]
    fn minimum_radius_gives_two_children() {
        let cfg = EvolutionConfig::default();
        let mut rng = RngStream::from_master_seed(1);
        for _ in 0..10_000 {
            assert_eq!(child_count(cfg.r_min_div, &mut rng, &cfg), 2);
        }
    }

    #[test]
    fn children_fit_without_overlap() {
        for n in MIN_CHILDREN..=MAX_CHILDREN {
            let r = child_radius(1.0, n);
            let offs = child_offsets(1.0, n, 0.3);
            for (i, a) in offs.iter().enumerate() {
                assert!(a.length() + r <= 1.0 + 1e-12);
                for b in &offs[i + 1..] {
                    assert!((*a - *b).length() >= 2.0 * r - 1e-12);
                }
            }
            assert!(n as f64 * r * r <= 1.0);
        }
    }

    #[test]
    fn four_way_split_is_even_and_balanced() {
        let mut l = Ledger::default();
        let parent = Stores {
            energy: 8.0,
            construction_mass: 4.0,
            ..Stores::empty(4)
        };
        let r = child_radius(1.0, 4);
        let kids = split_resources(1.0, &parent, 4, r, 1.0, 0.0, &mut l);
        let spare = (body_mass(1.0, 1.0) - 4.0 * body_mass(r, 1.0)) / 4.0;
        for k in &kids {
            assert!((k.energy - 2.0).abs() < 1e-12);
            assert!((k.construction_mass - 1.0 - spare).abs() < 1e-12);
        }
        let mut l = Ledger::default();
        let kids = split_resources(1.0, &parent, 4, r, 1.0, 0.1, &mut l);
        let total: f64 = kids.iter().map(|k| k.energy).sum();
        assert!((total + l.energy.total_sinks() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn zero_rates_are_identity_and_delete_floors_at_one() {
        let mut rng = RngStream::from_master_seed(3);
        let mut innov = Innovations::default();
        let grn = GrnConfig::default();
        let g = init_genome(1, &mut rng, &grn, &mut innov).unwrap();
        let zero = EvolutionConfig {
            p_node_add: 0.0,
            p_node_del: 0.0,
            p_node_angle: 0.0,
            p_colour: 0.0,
            ..EvolutionConfig::default()
        };
        let mut m = g.clone();
        mutate_unregulated(&mut m, &mut rng, &zero, &grn, &mut innov);
        assert_eq!(m, g);
        let del = EvolutionConfig {
            p_node_del: 1.0,
            ..zero
        };
        mutate_unregulated(&mut m, &mut rng, &del, &grn, &mut innov);
        assert_eq!(m, g);
    }
}
