//! World orchestration.
//!
//! One call to [`WorldState::step`] runs the phases in a fixed order:
//! GRN ticks, node IO, physics, interactions, metabolism and construction,
//! chemistry, void damage, deaths, divisions and finally statistics. Cells
//! are always visited in id order.

pub mod environment;
pub mod snapshot;
pub mod stats;

use crate::cell::{
    body_mass, die_to_meat, grow, metabolise, photosynthesize, produce_molecule, Cell, CellId, CellKind, Protozoan,
    Stores, MEAT_COLOUR, PLANT_COLOUR,
};
use crate::chem::ChemGrid;
use crate::config::{ConfigError, SimConfig};
use crate::evolution::{
    child_count, child_genome, child_offsets, child_radius, division_check, split_resources, LineageRecord,
};
use crate::grn::{express, init_genome, tick as grn_tick, Channel, Genome, GrnState, Innovations, RawOutputs};
use crate::ledger::{relative_residual, Ledger, Sink};
use crate::lock::{advance_construction, snap_to_lattice, AttachmentKind};
use crate::nodes::{
    actuate, can_engulf, photoreceptor_signal, ray_angles, spike_dps, thrust_direction, EngulfQuery, SurfaceNode,
};
use crate::physics::geometry::{closest_point_on_segment, Triangle};
use crate::physics::{Body, BodyId, JointId, PhysicsWorld, Vec2};
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use stats::{component_sizes, node_frequencies, StatsRow};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

/// Generation count at which the GRN input reaches `tanh(1)`.
const GENERATION_INPUT_SCALE: f64 = 50.0;
const SPAWN_ATTEMPTS: usize = 200;
const ROCK_COLOUR: [f64; 3] = [0.45, 0.42, 0.4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binding {
    pub a: CellId,
    pub a_node: u32,
    pub b: CellId,
    pub b_node: u32,
    pub joint: JointId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub config: SimConfig,
    pub tick: u64,
    pub physics: PhysicsWorld,
    pub rocks: Vec<Triangle>,
    pub chem: ChemGrid,
    pub cells: BTreeMap<CellId, Cell>,
    /// Keyed by `(lower id, higher id)`.
    pub bindings: BTreeMap<(CellId, CellId), Binding>,
    pub next_id: u64,
    pub innovations: Innovations,
    pub ledger: Ledger,
    pub initial_mass: f64,
    pub initial_energy: f64,
    rng: RngStream,
}

/// Births, deaths and an optional stats sample from one step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    pub births: Vec<LineageRecord>,
    pub deaths: Vec<CellId>,
    pub stats: Option<StatsRow>,
}

fn pair_key(a: CellId, b: CellId) -> (CellId, CellId) {
    (a.min(b), a.max(b))
}

fn squash(x: f64, scale: f64) -> f64 {
    (x / scale.max(1e-12)).tanh()
}

impl WorldState {
    /// A fresh world: rocks, then plants, then protozoa.
    pub fn new(config: SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let root = RngStream::from_master_seed(config.run.master_seed);
        let formations = environment::generate_environment(&mut root.fork("environment"), &config);
        let rocks: Vec<Triangle> = formations.concat();
        let mut physics = PhysicsWorld::new();
        for (i, t) in rocks.iter().enumerate() {
            physics.add_body(Body::triangle(BodyId(i as u64), *t, ROCK_COLOUR));
        }
        let chem = ChemGrid::new(config.chem.grid_size as usize, config.world.world_radius);
        let mut world = WorldState {
            tick: 0,
            physics,
            next_id: rocks.len() as u64,
            rocks,
            chem,
            cells: BTreeMap::new(),
            bindings: BTreeMap::new(),
            innovations: Innovations::default(),
            ledger: Ledger::default(),
            initial_mass: 0.0,
            initial_energy: 0.0,
            rng: root.fork("world"),
            config,
        };
        let mut population = root.fork("population");
        for _ in 0..world.config.world.n_plants {
            let r = world.config.cell.plant_initial_radius;
            let p = world.free_spot(r, &mut population);
            let id = world.take_id();
            let cell = world.plant_cell(
                id,
                r,
                Stores::empty(world.molecule_count()),
                None,
                0,
                population.fork(&format!("cell/{id}")),
            );
            world.insert_cell(cell, p, Vec2::ZERO, 0.0);
        }
        for _ in 0..world.config.world.n_protozoa {
            let r = world.config.cell.protozoan_initial_radius;
            let p = world.free_spot(r, &mut population);
            let angle = population.uniform(0.0, TAU);
            let id = world.take_id();
            let mut rng = population.fork(&format!("cell/{id}"));
            let (lo, hi) = (
                world.config.evolution.initial_nodes_min,
                world.config.evolution.initial_nodes_max,
            );
            let n = lo as usize + rng.index((hi - lo + 1) as usize);
            let genome = init_genome(n, &mut rng, &world.config.grn, &mut world.innovations)
                .expect("node count is at least one");
            let mut stores = Stores::empty(world.molecule_count());
            stores.energy = world.config.cell.protozoan_initial_energy;
            stores.construction_mass = world.config.cell.protozoan_initial_mass;
            let cell = world.protozoan_cell(id, r, genome, stores, None, 0, rng);
            world.insert_cell(cell, p, Vec2::ZERO, angle);
        }
        world.initial_mass = world.total_mass();
        world.initial_energy = world.total_energy();
        Ok(world)
    }

    pub fn molecule_count(&self) -> usize {
        self.config.grn.molecule_count as usize
    }

    fn take_id(&mut self) -> CellId {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    /// A uniformly drawn point where a disc of `radius` touches neither
    /// rock nor cell; falls back to the last draw when crowded.
    fn free_spot(&self, radius: f64, rng: &mut RngStream) -> Vec2 {
        let reach = (self.config.world.world_radius - radius).max(0.0);
        let mut p = Vec2::ZERO;
        for _ in 0..SPAWN_ATTEMPTS {
            p = Vec2::from_angle(rng.uniform(0.0, TAU)) * (reach * rng.unit().sqrt());
            let clear_cells = self.cells.values().all(|c| {
                self.physics
                    .body(BodyId(c.id))
                    .is_none_or(|b| (b.position - p).length() > b.radius() + radius)
            });
            if clear_cells && environment::clear_of_rocks(p, radius, &self.rocks) {
                break;
            }
        }
        p
    }

    pub fn plant_cell(
        &self,
        id: CellId,
        radius: f64,
        stores: Stores,
        parent: Option<CellId>,
        generation: u32,
        rng: RngStream,
    ) -> Cell {
        Cell {
            id,
            kind: CellKind::Plant,
            radius,
            health: 1.0,
            stores,
            colour: PLANT_COLOUR,
            age: 0.0,
            generation,
            parent,
            birth_tick: self.tick,
            engulfed_by: None,
            engulfed_area: 0.0,
            proto: None,
            rng,
        }
    }

    fn meat_cell(&self, id: CellId, radius: f64, energy: f64, rng: RngStream) -> Cell {
        let mut stores = Stores::empty(self.molecule_count());
        stores.energy = energy;
        Cell {
            id,
            kind: CellKind::Meat,
            radius,
            health: 1.0,
            stores,
            colour: MEAT_COLOUR,
            age: 0.0,
            generation: 0,
            parent: None,
            birth_tick: self.tick,
            engulfed_by: None,
            engulfed_area: 0.0,
            proto: None,
            rng,
        }
    }

    /// A newborn protozoan; its network is ticked once so traits are expressed.
    #[allow(clippy::too_many_arguments)]
    pub fn protozoan_cell(
        &self,
        id: CellId,
        radius: f64,
        genome: Genome,
        stores: Stores,
        parent: Option<CellId>,
        generation: u32,
        rng: RngStream,
    ) -> Cell {
        let nodes = genome
            .unregulated
            .nodes
            .iter()
            .map(|n| SurfaceNode::new(n.uid, n.angle))
            .collect();
        let grn = GrnState::new(&genome);
        let expression = express(&genome, &RawOutputs::new(), &self.config);
        let mut cell = Cell {
            id,
            kind: CellKind::Protozoan,
            radius,
            health: 1.0,
            stores,
            colour: genome.unregulated.colour,
            age: 0.0,
            generation,
            parent,
            birth_tick: self.tick,
            engulfed_by: None,
            engulfed_area: 0.0,
            proto: Some(Box::new(Protozoan {
                genome,
                grn,
                expression,
                nodes,
                engulfed: Vec::new(),
                last_prey: None,
            })),
            rng,
        };
        grn_update(&mut cell, &self.config);
        cell
    }

    pub fn insert_cell(&mut self, cell: Cell, position: Vec2, velocity: Vec2, angle: f64) {
        let mut body = Body::disc(
            BodyId(cell.id),
            position,
            cell.radius,
            self.config.physics.density,
            cell.colour,
        );
        body.velocity = velocity;
        body.angle = angle;
        self.physics.add_body(body);
        self.cells.insert(cell.id, cell);
    }

    fn remove_cell(&mut self, id: CellId) -> Option<Cell> {
        self.physics.remove_body(BodyId(id));
        self.bindings.retain(|_, b| b.a != id && b.b != id);
        self.cells.remove(&id)
    }

    pub fn position(&self, id: CellId) -> Option<Vec2> {
        self.physics.body(BodyId(id)).map(|b| b.position)
    }

    pub fn total_mass(&self) -> f64 {
        let density = self.config.physics.density;
        self.cells.values().map(|c| c.total_mass(density)).sum::<f64>()
            + self.chem.resident_mass(self.config.chem.k_chem)
    }

    pub fn total_energy(&self) -> f64 {
        self.cells.values().map(|c| c.stores.energy).sum()
    }

    pub fn mass_residual(&self) -> f64 {
        relative_residual(self.initial_mass, self.total_mass(), self.ledger.mass.net())
    }

    pub fn energy_residual(&self) -> f64 {
        relative_residual(self.initial_energy, self.total_energy(), self.ledger.energy.net())
    }

    fn is_bound(&self, cell: CellId, node: u32) -> bool {
        self.bindings
            .values()
            .any(|b| (b.a == cell && b.a_node == node) || (b.b == cell && b.b_node == node))
    }

    /// Partner cell and node of a bound adhesion receptor.
    pub fn partner_of(&self, cell: CellId, node: u32) -> Option<(CellId, u32)> {
        self.bindings.values().find_map(|b| {
            if b.a == cell && b.a_node == node {
                Some((b.b, b.b_node))
            } else if b.b == cell && b.b_node == node {
                Some((b.a, b.a_node))
            } else {
                None
            }
        })
    }

    pub fn collect_stats(&self) -> StatsRow {
        let counts = stats::kind_counts(self.cells.values());
        let protozoa: Vec<CellId> = self.cells.values().filter(|c| c.is_protozoan()).map(|c| c.id).collect();
        let edges: Vec<(CellId, CellId)> = self.bindings.keys().copied().collect();
        StatsRow {
            tick: self.tick,
            max_generation: self
                .cells
                .values()
                .filter(|c| c.is_protozoan())
                .map(|c| c.generation)
                .max()
                .unwrap_or(0),
            protozoa: protozoa.len(),
            plants: counts.get(&CellKind::Plant).copied().unwrap_or(0),
            meat: counts.get(&CellKind::Meat).copied().unwrap_or(0),
            frequency: node_frequencies(self.cells.values()),
            multicell: component_sizes(&protozoa, &edges),
            total_mass: self.total_mass(),
            total_energy: self.total_energy(),
            mass_residual: self.mass_residual(),
            energy_residual: self.energy_residual(),
        }
    }

    /// Advance one physics step through every phase.
    pub fn step(&mut self) -> StepReport {
        let mut report = StepReport::default();
        let dt = self.config.run.physics_dt;
        if self.tick.is_multiple_of(self.config.run.grn_tick_interval as u64) {
            self.phase_grn();
        }
        self.phase_node_io(dt);
        self.physics.step(dt, &self.config.physics);
        self.phase_interactions(dt, &mut report);
        self.phase_metabolism(dt);
        if self.tick.is_multiple_of(self.config.run.grid_tick_interval as u64) {
            self.phase_chem();
        }
        self.phase_void(dt);
        self.phase_deaths(&mut report);
        self.phase_divisions(&mut report);
        for c in self.cells.values_mut() {
            c.stores.settle();
        }
        self.tick += 1;
        if self.tick.is_multiple_of(self.config.run.stats_interval as u64) {
            report.stats = Some(self.collect_stats());
        }
        report
    }

    fn live_ids(&self) -> Vec<CellId> {
        self.cells.keys().copied().collect()
    }

    fn phase_grn(&mut self) {
        let ids = self.live_ids();
        for id in ids {
            let Some(cell) = self.cells.get(&id) else { continue };
            if !cell.is_protozoan() || cell.engulfed_by.is_some() {
                continue;
            }
            let photo = self.photoreceptor_readings(cell);
            let cell = self.cells.get_mut(&id).unwrap();
            if let Some(p) = cell.proto.as_mut() {
                for (i, rgb) in photo {
                    p.nodes[i].sensors = rgb;
                }
            }
            grn_update(cell, &self.config);
        }
    }

    fn photoreceptor_readings(&self, cell: &Cell) -> Vec<(usize, [f64; 3])> {
        let Some(p) = &cell.proto else { return Vec::new() };
        let Some(body) = self.physics.body(BodyId(cell.id)) else {
            return Vec::new();
        };
        let cfg = &self.config.nodes;
        let range = cfg.photo_range_radii * cell.radius;
        p.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is(AttachmentKind::Photoreceptor))
            .map(|(i, n)| {
                let axis = body.angle + n.angle;
                let origin = body.surface_point(n.angle);
                let hits: Vec<Option<(f64, [f64; 3])>> = ray_angles(axis, cfg.n_rays, cfg.photo_cone_deg)
                    .into_iter()
                    .map(|a| {
                        self.physics
                            .raycast(origin, Vec2::from_angle(a), range, Some(body.id))
                            .map(|h| (h.distance, h.surface_colour))
                    })
                    .collect();
                (i, photoreceptor_signal(&hits, cell.radius))
            })
            .collect()
    }

    fn phase_node_io(&mut self, dt: f64) {
        let ids = self.live_ids();
        for id in ids {
            let cell = &self.cells[&id];
            if !cell.is_protozoan() || cell.engulfed_by.is_some() {
                continue;
            }
            let adhesion: Vec<(usize, [f64; 3])> = cell
                .proto
                .as_ref()
                .unwrap()
                .nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.is(AttachmentKind::AdhesionReceptor))
                .map(|(i, n)| {
                    let signal = self
                        .partner_of(id, n.uid)
                        .and_then(|(pc, pn)| {
                            self.cells[&pc]
                                .proto
                                .as_ref()
                                .and_then(|p| p.nodes.iter().find(|x| x.uid == pn))
                                .map(|x| x.control)
                        })
                        .unwrap_or([0.0; 3]);
                    (i, signal)
                })
                .collect();
            let body_angle = self.physics.body(BodyId(id)).map(|b| b.angle).unwrap_or(0.0);
            let cell = self.cells.get_mut(&id).unwrap();
            let proto = cell.proto.as_mut().unwrap();
            let mut force = Vec2::ZERO;
            let mut torque = 0.0;
            for (i, signal) in adhesion {
                proto.nodes[i].sensors = signal;
            }
            let prey = proto.last_prey;
            for node in &mut proto.nodes {
                match node.kind() {
                    None | Some(AttachmentKind::Flagellum) => {
                        let flag = node.is(AttachmentKind::Flagellum);
                        let act = actuate(node.control, flag, cell.stores.energy, dt, &self.config.nodes);
                        cell.stores.energy -= act.energy;
                        self.ledger.energy.sink(Sink::Actuation, act.energy);
                        force += thrust_direction(body_angle, node.angle) * act.thrust;
                        torque += act.torque;
                        node.sensors = [act.success, 0.0, 0.0];
                    }
                    Some(AttachmentKind::Spike) => {
                        if let Some(a) = node.attachment.as_mut() {
                            a.extended = node.control[0] >= 0.0;
                        }
                        node.sensors = [0.0; 3];
                    }
                    Some(AttachmentKind::Phagoreceptor) => {
                        node.sensors = match prey {
                            Some((CellKind::Plant, h)) => [1.0, 0.0, h],
                            Some((CellKind::Meat, h)) => [0.0, 1.0, h],
                            _ => [0.0; 3],
                        };
                    }
                    Some(AttachmentKind::Photoreceptor) | Some(AttachmentKind::AdhesionReceptor) => {}
                }
            }
            if let Some(b) = self.physics.body_mut(BodyId(id)) {
                b.apply_force(force);
                b.apply_torque(torque);
            }
        }
    }

    fn phase_interactions(&mut self, dt: f64, report: &mut StepReport) {
        let cfg = self.config.clone();
        let reach = cfg.physics.contact_margin.max(cfg.nodes.spike_length);
        let pairs = self.physics.disc_pairs_within(reach);

        // Engulfment, lower predator id wins a contested prey.
        let mut candidates: Vec<(CellId, CellId)> = Vec::new();
        for &(BodyId(a), BodyId(b), dist) in &pairs {
            for (pred, prey) in [(a, b), (b, a)] {
                if self.engulf_allowed(pred, prey, dist, None) {
                    candidates.push((prey, pred));
                }
            }
        }
        candidates.sort_unstable();
        let mut taken = BTreeSet::new();
        for (prey, pred) in candidates {
            if taken.contains(&prey) {
                continue;
            }
            let dist = match (self.position(pred), self.position(prey)) {
                (Some(p), Some(q)) => (p - q).length(),
                _ => continue,
            };
            if self.engulf_allowed(pred, prey, dist, Some(())) {
                taken.insert(prey);
                self.engulf(pred, prey);
            }
        }

        // Spikes.
        for &(BodyId(a), BodyId(b), _) in &pairs {
            for (att, vic) in [(a, b), (b, a)] {
                self.spike(att, vic, dt);
            }
        }

        // Adhesion.
        for &(BodyId(a), BodyId(b), dist) in &pairs {
            self.try_bind(a, b, dist);
        }

        // Resource sharing across bindings.
        let keys: Vec<(CellId, CellId)> = self.bindings.keys().copied().collect();
        let limit = cfg.nodes.binding_transfer_rate * dt;
        for (a, b) in keys {
            let (Some(ca), Some(cb)) = (self.cells.get(&a), self.cells.get(&b)) else {
                continue;
            };
            let de = ((ca.stores.energy - cb.stores.energy) / 2.0).clamp(-limit, limit);
            let dm = ((ca.stores.construction_mass - cb.stores.construction_mass) / 2.0).clamp(-limit, limit);
            let ca = self.cells.get_mut(&a).unwrap();
            ca.stores.energy -= de;
            ca.stores.construction_mass -= dm;
            let cb = self.cells.get_mut(&b).unwrap();
            cb.stores.energy += de;
            cb.stores.construction_mass += dm;
        }

        self.digest_prey(dt, report);
    }

    /// Whether `pred` may engulf `prey` now; `strict` re-checks capacity
    /// against prey taken earlier in the same step.
    fn engulf_allowed(&self, pred: CellId, prey: CellId, dist: f64, _strict: Option<()>) -> bool {
        let (Some(pc), Some(qc)) = (self.cells.get(&pred), self.cells.get(&prey)) else {
            return false;
        };
        let Some(p) = &pc.proto else { return false };
        if pc.engulfed_by.is_some() || qc.engulfed_by.is_some() || qc.is_protozoan() {
            return false;
        }
        if dist > pc.radius + qc.radius + self.config.physics.contact_margin {
            return false;
        }
        let (Some(pb), Some(qb)) = (self.physics.body(BodyId(pred)), self.physics.body(BodyId(prey))) else {
            return false;
        };
        let engulfed_area: f64 = p
            .engulfed
            .iter()
            .filter_map(|id| self.cells.get(id))
            .map(|c| c.area())
            .sum();
        let dir = qb.position - pb.position;
        let prey_direction = dir.y.atan2(dir.x);
        p.nodes.iter().filter(|n| n.is(AttachmentKind::Phagoreceptor)).any(|n| {
            let permitted = match qc.kind {
                CellKind::Plant => n.control[0] > 0.0,
                CellKind::Meat => n.control[1] > 0.0,
                CellKind::Protozoan => false,
            };
            can_engulf(
                &EngulfQuery {
                    predator_area: pc.area(),
                    engulfed_area,
                    prey_area: qc.area(),
                    permitted,
                    receptor_angle: pb.angle + n.angle,
                    prey_direction,
                },
                &self.config.nodes,
            )
        })
    }

    fn engulf(&mut self, pred: CellId, prey: CellId) {
        let q = self.cells.get_mut(&prey).unwrap();
        q.engulfed_by = Some(pred);
        q.engulfed_area = q.area();
        let kind = q.kind;
        let s = q.stores.take_fraction(1.0);
        if let Some(b) = self.physics.body_mut(BodyId(prey)) {
            b.collides = false;
        }
        let p = self.cells.get_mut(&pred).unwrap();
        let food = s.construction_mass + s.plant_food + s.meat_food;
        match kind {
            CellKind::Meat => p.stores.meat_food += food,
            _ => p.stores.plant_food += food,
        }
        p.stores.energy += s.energy;
        for (q, m) in p.stores.molecules.iter_mut().zip(&s.molecules) {
            *q += m;
        }
        let proto = p.proto.as_mut().unwrap();
        proto.engulfed.push(prey);
        proto.last_prey = Some((kind, 1.0));
    }

    fn spike(&mut self, att: CellId, vic: CellId, dt: f64) {
        let (Some(ac), Some(vc)) = (self.cells.get(&att), self.cells.get(&vic)) else {
            return;
        };
        if ac.engulfed_by.is_some() || vc.engulfed_by.is_some() {
            return;
        }
        let Some(p) = &ac.proto else { return };
        let (Some(ab), Some(vb)) = (self.physics.body(BodyId(att)), self.physics.body(BodyId(vic))) else {
            return;
        };
        let len = self.config.nodes.spike_length;
        let mut hits = Vec::new();
        for (i, n) in p.nodes.iter().enumerate() {
            if !n.is(AttachmentKind::Spike) || n.attachment.as_ref().is_some_and(|a| !a.extended) || n.sensors[1] > 0.0
            {
                continue;
            }
            let dir = Vec2::from_angle(ab.angle + n.angle);
            let base = ab.position + dir * ac.radius;
            let tip = base + dir * len;
            let closest = closest_point_on_segment(vb.position, base, tip);
            let depth = (vc.radius - (vb.position - closest).length()).clamp(0.0, len);
            if depth > 0.0 {
                hits.push((i, depth, spike_dps(depth, &self.config.nodes)));
            }
        }
        let code = vc.kind.code();
        let max = self.config.nodes.spike_dps.max(1e-12);
        let mut damage = 0.0;
        let proto = self.cells.get_mut(&att).unwrap().proto.as_mut().unwrap();
        for (i, depth, dps) in hits {
            proto.nodes[i].sensors = [dps / max, depth / len, code];
            damage += dps * dt;
        }
        let v = self.cells.get_mut(&vic).unwrap();
        v.health -= damage;
    }

    fn free_adhesion(&self, id: CellId) -> Option<u32> {
        let c = self.cells.get(&id)?;
        if c.engulfed_by.is_some() {
            return None;
        }
        c.proto
            .as_ref()?
            .nodes
            .iter()
            .find(|n| n.is(AttachmentKind::AdhesionReceptor) && !self.is_bound(id, n.uid))
            .map(|n| n.uid)
    }

    fn try_bind(&mut self, a: CellId, b: CellId, dist: f64) {
        if self.bindings.contains_key(&pair_key(a, b)) {
            return;
        }
        let (Some(ca), Some(cb)) = (self.cells.get(&a), self.cells.get(&b)) else {
            return;
        };
        if dist > ca.radius + cb.radius + self.config.physics.contact_margin {
            return;
        }
        let (Some(na), Some(nb)) = (self.free_adhesion(a), self.free_adhesion(b)) else {
            return;
        };
        if let Ok(joint) = self.physics.add_joint(BodyId(a), BodyId(b), &self.config.physics) {
            let (lo, hi) = pair_key(a, b);
            let (lo_node, hi_node) = if lo == a { (na, nb) } else { (nb, na) };
            self.bindings.insert(
                (lo, hi),
                Binding {
                    a: lo,
                    a_node: lo_node,
                    b: hi,
                    b_node: hi_node,
                    joint,
                },
            );
        }
    }

    /// Pull prey inward and move their body mass into the predator's stores.
    fn digest_prey(&mut self, dt: f64, report: &mut StepReport) {
        let density = self.config.physics.density;
        let rate = self.config.nodes.engulf_digest_rate;
        let pull = (self.config.nodes.engulf_pull * dt).min(1.0);
        let min_r = self.config.cell.min_radius;
        let ids: Vec<CellId> = self
            .cells
            .values()
            .filter(|c| c.proto.as_ref().is_some_and(|p| !p.engulfed.is_empty()))
            .map(|c| c.id)
            .collect();
        for pid in ids {
            let Some(pb) = self.physics.body(BodyId(pid)) else {
                continue;
            };
            let (centre, vel) = (pb.position, pb.velocity);
            let prey_ids = self.cells[&pid].proto.as_ref().unwrap().engulfed.clone();
            let mut gone = Vec::new();
            let mut gained = (0.0, 0.0);
            for q in &prey_ids {
                let Some(prey) = self.cells.get_mut(q) else {
                    gone.push(*q);
                    continue;
                };
                let area = (prey.area() - rate * dt).max(0.0);
                let new_r = (area / std::f64::consts::PI).sqrt();
                let finished = new_r < min_r;
                let released = if finished {
                    body_mass(prey.radius, density)
                } else {
                    body_mass(prey.radius, density) - body_mass(new_r, density)
                };
                // Anything the prey still stores goes the same way.
                let rest = prey.stores.take_fraction(1.0);
                let mass = released + rest.mass();
                match prey.kind {
                    CellKind::Meat => gained.1 += mass,
                    _ => gained.0 += mass,
                }
                let pc = self.cells.get_mut(&pid).unwrap();
                pc.stores.energy += rest.energy;
                if finished {
                    gone.push(*q);
                    self.physics.remove_body(BodyId(*q));
                    self.cells.remove(q);
                    report.deaths.push(*q);
                } else {
                    let prey = self.cells.get_mut(q).unwrap();
                    prey.radius = new_r;
                    if let Some(b) = self.physics.body_mut(BodyId(*q)) {
                        b.set_radius(new_r, density);
                        b.position = b.position + (centre - b.position) * pull;
                        b.velocity = vel;
                    }
                }
            }
            let last = prey_ids
                .iter()
                .rev()
                .find(|q| !gone.contains(q))
                .and_then(|q| self.cells.get(q))
                .map(|c| (c.kind, (c.area() / c.engulfed_area.max(1e-12)).min(1.0)));
            let pc = self.cells.get_mut(&pid).unwrap();
            pc.stores.plant_food += gained.0;
            pc.stores.meat_food += gained.1;
            let proto = pc.proto.as_mut().unwrap();
            proto.engulfed.retain(|q| !gone.contains(q));
            proto.last_prey = last;
        }
    }

    fn phase_metabolism(&mut self, dt: f64) {
        let cfg = self.config.clone();
        let density = cfg.physics.density;
        let arena = cfg.world.world_radius;
        let ids = self.live_ids();
        for id in ids {
            let pos = self.position(id).unwrap_or(Vec2::ZERO);
            let cell = self.cells.get_mut(&id).unwrap();
            cell.age += dt;
            if cell.engulfed_by.is_some() {
                continue;
            }
            match cell.kind {
                CellKind::Protozoan => {
                    let r = metabolise(cell, dt, &cfg, &mut self.ledger);
                    cell.radius = r;
                    let proto = cell.proto.as_mut().unwrap();
                    let open: Vec<usize> = (0..proto.nodes.len())
                        .filter(|&i| proto.nodes[i].attachment.is_none())
                        .collect();
                    if !open.is_empty() {
                        let each = proto.expression.production_rate * dt / open.len() as f64;
                        for &i in &open {
                            let idx = snap_to_lattice(proto.nodes[i].signature, cfg.grn.molecule_count as usize);
                            produce_molecule(&mut cell.stores, idx, each, &cfg.cell, &mut self.ledger);
                        }
                    }
                    for &i in &open {
                        let node = &mut proto.nodes[i];
                        let s = advance_construction(
                            &mut node.progress,
                            node.signature,
                            &mut cell.stores.construction_mass,
                            &mut cell.stores.energy,
                            &mut cell.stores.molecules,
                            dt,
                            &cfg.nodes,
                        );
                        self.ledger.mass.sink(Sink::Construction, s.mass + s.molecules);
                        self.ledger.energy.sink(Sink::Construction, s.energy);
                        if s.completed {
                            node.complete(s.kind.unwrap());
                        }
                    }
                }
                CellKind::Plant => {
                    if pos.length() <= arena {
                        photosynthesize(&mut cell.stores, dt, &cfg.cell, &mut self.ledger);
                    }
                    if cell.radius < cfg.cell.plant_division_radius {
                        cell.radius = grow(
                            cell.radius,
                            &mut cell.stores,
                            cfg.cell.plant_growth_rate,
                            dt,
                            density,
                            &cfg.cell,
                            &mut self.ledger,
                        );
                    }
                    let k = (cfg.chem.colour_recovery_rate * dt).min(1.0);
                    for c in 0..3 {
                        cell.colour[c] += (PLANT_COLOUR[c] - cell.colour[c]) * k;
                    }
                }
                CellKind::Meat => {}
            }
            let (r, colour) = (cell.radius, cell.colour);
            if let Some(b) = self.physics.body_mut(BodyId(id)) {
                if b.radius() != r {
                    b.set_radius(r, density);
                }
                b.colour = colour;
            }
        }
    }

    fn phase_chem(&mut self) {
        let cfg = self.config.clone();
        let k = cfg.chem.k_chem;
        let density = cfg.physics.density;
        let ids = self.live_ids();
        for id in ids {
            let Some(pos) = self.position(id) else { continue };
            let cell = self.cells.get_mut(&id).unwrap();
            if cell.engulfed_by.is_some() {
                continue;
            }
            match cell.kind {
                CellKind::Plant => {
                    let cost = self
                        .chem
                        .deposit_cost(pos, cell.radius, cell.colour, cfg.chem.deposit_fraction, k);
                    if cost > 0.0 && cell.stores.construction_mass > 0.0 {
                        let f = cfg.chem.deposit_fraction * (cell.stores.construction_mass / cost).min(1.0);
                        let m = self.chem.deposit(pos, cell.radius, cell.colour, f, k);
                        cell.stores.construction_mass -= m;
                        let grey = cell.colour.iter().sum::<f64>() / 3.0;
                        for c in 0..3 {
                            cell.colour[c] += (grey - cell.colour[c]) * cfg.chem.desaturate_step;
                        }
                    }
                }
                CellKind::Meat => {
                    let spare = body_mass(cell.radius, density) - body_mass(cfg.cell.min_radius, density);
                    let cost = self
                        .chem
                        .deposit_cost(pos, cell.radius, cell.colour, cfg.chem.deposit_fraction, k);
                    if cost > 0.0 && spare > 0.0 {
                        let f = cfg.chem.deposit_fraction * (spare / cost).min(1.0);
                        let m = self.chem.deposit(pos, cell.radius, cell.colour, f, k);
                        let left = body_mass(cell.radius, density) - m;
                        cell.radius = (left / (density * std::f64::consts::PI)).max(0.0).sqrt();
                        if let Some(b) = self.physics.body_mut(BodyId(id)) {
                            b.set_radius(cell.radius, density);
                        }
                    }
                }
                CellKind::Protozoan => {
                    let ex = self
                        .chem
                        .extract(pos, cell.radius, cfg.chem.extract_fraction, &cfg.chem);
                    cell.stores.plant_food += ex.plant_food;
                    cell.stores.meat_food += ex.meat_food;
                }
            }
        }
        let lost = self.chem.diffuse();
        self.ledger
            .mass
            .sink(Sink::Diffusion, k * self.chem.pixel_area() * lost);
    }

    fn phase_void(&mut self, dt: f64) {
        let rate = self.config.world.void_decay_rate;
        let radius = self.config.world.world_radius;
        for cell in self.cells.values_mut() {
            if cell.engulfed_by.is_some() {
                continue;
            }
            if let Some(b) = self.physics.body(BodyId(cell.id)) {
                cell.health -= void_damage(b.position, radius, rate) * dt;
            }
        }
    }

    fn release_prey(&mut self, pred: CellId) {
        let prey = match self.cells.get_mut(&pred).and_then(|c| c.proto.as_mut()) {
            Some(p) => std::mem::take(&mut p.engulfed),
            None => return,
        };
        if let Some(p) = self.cells.get_mut(&pred).and_then(|c| c.proto.as_mut()) {
            p.last_prey = None;
        }
        for q in prey {
            if let Some(c) = self.cells.get_mut(&q) {
                c.engulfed_by = None;
            }
            if let Some(b) = self.physics.body_mut(BodyId(q)) {
                b.collides = true;
            }
        }
    }

    fn phase_deaths(&mut self, report: &mut StepReport) {
        let cfg = self.config.clone();
        let density = cfg.physics.density;
        let ids = self.live_ids();
        for id in ids {
            let Some(cell) = self.cells.get(&id) else { continue };
            if cell.engulfed_by.is_some() {
                continue;
            }
            let dead = match cell.kind {
                CellKind::Meat => cell.health < cfg.cell.death_health || cell.age >= cfg.cell.meat_lifetime,
                _ => cell.health < cfg.cell.death_health,
            };
            if !dead {
                continue;
            }
            self.release_prey(id);
            let (pos, vel) = self
                .physics
                .body(BodyId(id))
                .map(|b| (b.position, b.velocity))
                .unwrap_or_default();
            let cell = self.remove_cell(id).unwrap();
            report.deaths.push(id);
            if cell.is_protozoan() {
                let pieces = die_to_meat(&cell, density, &cfg.cell, &mut self.ledger);
                for piece in pieces {
                    let mid = self.take_id();
                    let rng = cell.rng.fork(&format!("meat/{mid}"));
                    let meat = self.meat_cell(mid, piece.radius, piece.energy, rng);
                    self.insert_cell(meat, pos + piece.offset, vel, 0.0);
                }
            } else {
                self.ledger.mass.sink(Sink::Decay, cell.total_mass(density));
                self.ledger.energy.sink(Sink::Decay, cell.stores.energy);
            }
        }
    }

    fn phase_divisions(&mut self, report: &mut StepReport) {
        let cfg = self.config.clone();
        let density = cfg.physics.density;
        let mut plants = self.cells.values().filter(|c| c.kind == CellKind::Plant).count();
        let ready: Vec<CellId> = self
            .cells
            .values()
            .filter(|c| c.engulfed_by.is_none())
            .filter(|c| match c.kind {
                CellKind::Protozoan => division_check(
                    c.radius,
                    c.health,
                    c.proto.as_ref().unwrap().expression.division_threshold,
                    cfg.evolution.division_min_health,
                ),
                CellKind::Plant => c.radius >= cfg.cell.plant_division_radius,
                CellKind::Meat => false,
            })
            .map(|c| c.id)
            .collect();
        for id in ready {
            let (radius, kind) = {
                let c = &self.cells[&id];
                (c.radius, c.kind)
            };
            let mut n = child_count(radius, &mut self.cells.get_mut(&id).unwrap().rng, &cfg.evolution);
            if kind == CellKind::Plant {
                let room = (cfg.cell.max_plants as usize + 1).saturating_sub(plants);
                n = n.min(room);
                if n < 2 {
                    continue;
                }
            }
            let child_r = child_radius(radius, n);
            if child_r < cfg.cell.min_radius {
                continue;
            }
            self.release_prey(id);
            let (pos, vel, angle) = self
                .physics
                .body(BodyId(id))
                .map(|b| (b.position, b.velocity, b.angle))
                .unwrap_or_default();
            let mut parent = self.remove_cell(id).unwrap();
            let shares = split_resources(
                radius,
                &parent.stores,
                n,
                child_r,
                density,
                cfg.evolution.division_overhead,
                &mut self.ledger,
            );
            let phase = parent.rng.uniform(0.0, TAU);
            let offsets = child_offsets(radius, n, phase);
            for (share, off) in shares.into_iter().zip(offsets) {
                let cid = self.take_id();
                let rng = parent.rng.fork(&format!("child/{cid}"));
                let child = match kind {
                    CellKind::Protozoan => {
                        let genome = child_genome(
                            &parent.proto.as_ref().unwrap().genome,
                            &mut parent.rng,
                            &cfg,
                            &mut self.innovations,
                        );
                        self.protozoan_cell(cid, child_r, genome, share, Some(id), parent.generation + 1, rng)
                    }
                    _ => self.plant_cell(cid, child_r, share, Some(id), parent.generation + 1, rng),
                };
                report.births.push(LineageRecord {
                    id: cid,
                    parent: Some(id),
                    generation: child.generation,
                    birth_tick: self.tick,
                });
                self.insert_cell(child, pos + off, vel, angle);
            }
            if kind == CellKind::Plant {
                plants += n - 1;
            }
            report.deaths.push(id);
        }
    }

    /// Whether every binding has a joint and every cell a body.
    pub fn check_invariants(&self) -> Result<(), String> {
        for c in self.cells.values() {
            if self.physics.body(BodyId(c.id)).is_none() {
                return Err(format!("cell {} has no body", c.id));
            }
            if !c.stores.is_non_negative() {
                return Err(format!(
                    "cell {} ({:?}) has a negative store: {:?}",
                    c.id, c.kind, c.stores
                ));
            }
        }
        for b in self.bindings.values() {
            let Some(j) = self.physics.joint(b.joint) else {
                return Err(format!("binding {}-{} lost its joint", b.a, b.b));
            };
            if pair_key(j.body_a.0, j.body_b.0) != (b.a, b.b) {
                return Err(format!("binding {}-{} joint mismatch", b.a, b.b));
            }
        }
        let disc_bodies = self.physics.bodies().filter(|b| b.is_dynamic()).count();
        if disc_bodies != self.cells.len() {
            return Err("disc bodies and cells differ".into());
        }
        Ok(())
    }
}

/// Health lost per second at `position`.
pub fn void_damage(position: Vec2, world_radius: f64, rate: f64) -> f64 {
    let d = position.length();
    if d > world_radius {
        rate * (d - world_radius)
    } else {
        0.0
    }
}

/// Inputs a protozoan presents to its network.
pub fn grn_inputs(cell: &Cell, cfg: &SimConfig, random: f64) -> BTreeMap<Channel, f64> {
    let scale = cfg.cell.store_input_scale;
    let mut m = BTreeMap::new();
    m.insert(Channel::Bias, 1.0);
    m.insert(Channel::Random, random);
    m.insert(Channel::Health, 2.0 * cell.health - 1.0);
    m.insert(Channel::Size, 2.0 * cell.radius / cfg.cell.max_radius - 1.0);
    m.insert(Channel::Energy, squash(cell.stores.energy, scale));
    m.insert(Channel::ConstructionMass, squash(cell.stores.construction_mass, scale));
    m.insert(Channel::PlantFood, squash(cell.stores.plant_food, scale));
    m.insert(Channel::MeatFood, squash(cell.stores.meat_food, scale));
    m.insert(
        Channel::Generation,
        squash(cell.generation as f64, GENERATION_INPUT_SCALE),
    );
    if let Some(p) = &cell.proto {
        for n in &p.nodes {
            for k in 0..3u8 {
                m.insert(Channel::Sensor { node: n.uid, k }, n.sensors[k as usize]);
            }
        }
    }
    m
}

/// Tick a protozoan's network and push the remapped outputs to its nodes.
pub fn grn_update(cell: &mut Cell, cfg: &SimConfig) {
    if cell.proto.is_none() {
        return;
    }
    let random = cell.rng.uniform(-1.0, 1.0);
    let inputs = grn_inputs(cell, cfg, random);
    let p = cell.proto.as_mut().unwrap();
    let (state, raw) = grn_tick(&p.genome, &p.grn, &inputs);
    p.grn = state;
    p.expression = express(&p.genome, &raw, cfg);
    for (node, e) in p.nodes.iter_mut().zip(&p.expression.nodes) {
        node.control = e.control;
        node.signature = e.signature;
    }
}
