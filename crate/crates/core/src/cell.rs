//! Cell state and metabolism shared by plants, meat and protozoa.
//!
//! Mass lives in the body (`density * pi * r^2`), construction mass, the two
//! undigested food stores and the molecule store. Energy is a single store.
//! Every function here reports what it creates or destroys to a [`Ledger`].

use crate::config::{CellConfig, SimConfig};
use crate::grn::{Expression, Genome, GrnState};
use crate::ledger::{Ledger, Sink, Source};
use crate::nodes::SurfaceNode;
use crate::physics::Vec2;
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type CellId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CellKind {
    Plant,
    Meat,
    Protozoan,
}

impl CellKind {
    /// Code reported to spike sensors.
    pub fn code(self) -> f64 {
        match self {
            CellKind::Plant => -1.0,
            CellKind::Meat => 0.0,
            CellKind::Protozoan => 1.0,
        }
    }
}

pub const PLANT_COLOUR: [f64; 3] = [0.2, 0.8, 0.2];
pub const MEAT_COLOUR: [f64; 3] = [0.8, 0.15, 0.15];
/// Negative stores smaller than this are floating-point residue.
pub const ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stores {
    pub energy: f64,
    pub construction_mass: f64,
    pub plant_food: f64,
    pub meat_food: f64,
    /// Quantity per lattice signature.
    pub molecules: Vec<f64>,
}

impl Stores {
    pub fn empty(molecule_count: usize) -> Self {
        Self {
            molecules: vec![0.0; molecule_count],
            ..Self::default()
        }
    }

    pub fn mass(&self) -> f64 {
        self.construction_mass + self.plant_food + self.meat_food + self.molecules.iter().sum::<f64>()
    }

    pub fn is_non_negative(&self) -> bool {
        self.energy >= 0.0
            && self.construction_mass >= 0.0
            && self.plant_food >= 0.0
            && self.meat_food >= 0.0
            && self.molecules.iter().all(|&q| q >= 0.0)
    }

    /// Zero out negative residue left by floating-point cancellation.
    pub fn settle(&mut self) {
        for v in [
            &mut self.energy,
            &mut self.construction_mass,
            &mut self.plant_food,
            &mut self.meat_food,
        ]
        .into_iter()
        .chain(self.molecules.iter_mut())
        {
            if *v < 0.0 && *v > -ROUNDING {
                *v = 0.0;
            }
        }
    }

    /// Move a fraction of everything into a new store.
    pub fn take_fraction(&mut self, f: f64) -> Stores {
        let f = f.clamp(0.0, 1.0);
        let out = Stores {
            energy: self.energy * f,
            construction_mass: self.construction_mass * f,
            plant_food: self.plant_food * f,
            meat_food: self.meat_food * f,
            molecules: self.molecules.iter().map(|q| q * f).collect(),
        };
        self.energy -= out.energy;
        self.construction_mass -= out.construction_mass;
        self.plant_food -= out.plant_food;
        self.meat_food -= out.meat_food;
        for (q, o) in self.molecules.iter_mut().zip(&out.molecules) {
            *q -= o;
        }
        out
    }

    pub fn absorb(&mut self, other: Stores) {
        self.energy += other.energy;
        self.construction_mass += other.construction_mass;
        self.plant_food += other.plant_food;
        self.meat_food += other.meat_food;
        if self.molecules.len() < other.molecules.len() {
            self.molecules.resize(other.molecules.len(), 0.0);
        }
        for (q, o) in self.molecules.iter_mut().zip(other.molecules) {
            *q += o;
        }
    }
}

/// Protozoan-only state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protozoan {
    pub genome: Genome,
    pub grn: GrnState,
    pub expression: Expression,
    /// Aligned with `genome.unregulated.nodes`.
    pub nodes: Vec<SurfaceNode>,
    /// Prey currently being digested, in engulf order.
    pub engulfed: Vec<CellId>,
    /// Kind and health of the most recent prey still being absorbed.
    pub last_prey: Option<(CellKind, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: CellId,
    pub kind: CellKind,
    pub radius: f64,
    pub health: f64,
    pub stores: Stores,
    pub colour: [f64; 3],
    pub age: f64,
    pub generation: u32,
    pub parent: Option<CellId>,
    pub birth_tick: u64,
    /// Set while the cell is inside a predator.
    pub engulfed_by: Option<CellId>,
    /// Body area when engulfed, for reporting the prey's remaining health.
    pub engulfed_area: f64,
    pub proto: Option<Box<Protozoan>>,
    pub rng: RngStream,
}

pub fn disc_area(radius: f64) -> f64 {
    PI * radius * radius
}

pub fn body_mass(radius: f64, density: f64) -> f64 {
    density * disc_area(radius)
}

impl Cell {
    pub fn area(&self) -> f64 {
        disc_area(self.radius)
    }

    pub fn total_mass(&self, density: f64) -> f64 {
        body_mass(self.radius, density) + self.stores.mass()
    }

    pub fn is_protozoan(&self) -> bool {
        self.kind == CellKind::Protozoan
    }
}

/// Digest up to `rate * dt` of food, drawn from both stores in proportion.
/// Mass becomes construction mass; energy is released at each food's density.
pub fn digest(stores: &mut Stores, rate: f64, dt: f64, cfg: &CellConfig, ledger: &mut Ledger) {
    let food = stores.plant_food + stores.meat_food;
    let take = (rate.max(0.0) * dt).min(food);
    if take <= 0.0 {
        return;
    }
    let from_plant = take * stores.plant_food / food;
    let from_meat = take - from_plant;
    let from_meat = from_meat.min(stores.meat_food);
    stores.plant_food -= from_plant;
    stores.meat_food -= from_meat;
    stores.construction_mass += from_plant + from_meat;
    let energy = from_plant * cfg.plant_energy_density + from_meat * cfg.meat_energy_density;
    stores.energy += energy;
    ledger.energy.credit(Source::Digestion, energy);
}

/// Grow the radius by up to `rate * dt`, paying body mass from construction
/// mass and `growth_energy_per_mass` energy per unit. Short resources scale
/// the added area down. Returns the new radius.
pub fn grow(
    radius: f64,
    stores: &mut Stores,
    rate: f64,
    dt: f64,
    density: f64,
    cfg: &CellConfig,
    ledger: &mut Ledger,
) -> f64 {
    let target = (radius + rate.max(0.0) * dt).min(cfg.max_radius);
    if target <= radius {
        return radius;
    }
    let dm = body_mass(target, density) - body_mass(radius, density);
    let de = dm * cfg.growth_energy_per_mass;
    let ratio = |have: f64, need: f64| {
        if need > 0.0 {
            (have.max(0.0) / need).min(1.0)
        } else {
            1.0
        }
    };
    let s = ratio(stores.construction_mass, dm).min(ratio(stores.energy, de));
    if s <= 0.0 {
        return radius;
    }
    let new_radius = if s >= 1.0 {
        target
    } else {
        (radius * radius + s * (target * target - radius * radius)).sqrt()
    };
    let paid = body_mass(new_radius, density) - body_mass(radius, density);
    stores.construction_mass = (stores.construction_mass - paid).max(0.0);
    let energy = (paid * cfg.growth_energy_per_mass).min(stores.energy);
    stores.energy -= energy;
    ledger.energy.sink(Sink::Growth, energy);
    new_radius
}

/// Shrink a body to `new_radius`, returning the mass released.
pub fn shrink(radius: f64, new_radius: f64, density: f64) -> f64 {
    body_mass(radius, density) - body_mass(new_radius.max(0.0), density)
}

/// Restore health at up to `repair_rate`, limited by mass and energy.
pub fn repair(health: &mut f64, stores: &mut Stores, dt: f64, cfg: &CellConfig, ledger: &mut Ledger) {
    let want = (1.0 - *health).min(cfg.repair_rate * dt);
    if want <= 0.0 {
        return;
    }
    let ratio = |have: f64, per: f64| if per > 0.0 { have.max(0.0) / per } else { f64::INFINITY };
    let h = want
        .min(ratio(stores.construction_mass, cfg.repair_mass_per_health))
        .min(ratio(stores.energy, cfg.repair_energy_per_health));
    if h <= 0.0 {
        return;
    }
    let m = (h * cfg.repair_mass_per_health).min(stores.construction_mass);
    let e = (h * cfg.repair_energy_per_health).min(stores.energy);
    stores.construction_mass -= m;
    stores.energy -= e;
    ledger.mass.sink(Sink::Repair, m);
    ledger.energy.sink(Sink::Repair, e);
    *health = (*health + h).min(1.0);
}

/// Turn construction mass into molecules at lattice `index`. Energy costs
/// `molecule_energy_cost` per unit. Returns the amount produced.
pub fn produce_molecule(stores: &mut Stores, index: usize, amount: f64, cfg: &CellConfig, ledger: &mut Ledger) -> f64 {
    assert!(index < stores.molecules.len(), "signature index off the lattice");
    if amount <= 0.0 {
        return 0.0;
    }
    let mut q = amount.min(stores.construction_mass.max(0.0));
    if cfg.molecule_energy_cost > 0.0 {
        q = q.min(stores.energy.max(0.0) / cfg.molecule_energy_cost);
    }
    if q <= 0.0 {
        return 0.0;
    }
    let e = (q * cfg.molecule_energy_cost).min(stores.energy);
    stores.construction_mass -= q;
    stores.energy -= e;
    stores.molecules[index] += q;
    ledger.energy.sink(Sink::Production, e);
    q
}

/// Plant income; paused while construction mass (resp. energy) is at the cap.
pub fn photosynthesize(stores: &mut Stores, dt: f64, cfg: &CellConfig, ledger: &mut Ledger) {
    if dt <= 0.0 {
        return;
    }
    if stores.construction_mass < cfg.plant_store_cap {
        let m = cfg.plant_mass_rate * dt;
        stores.construction_mass += m;
        ledger.mass.credit(Source::Photosynthesis, m);
    }
    if stores.energy < cfg.plant_store_cap {
        let e = cfg.plant_energy_rate * dt;
        stores.energy += e;
        ledger.energy.credit(Source::Photosynthesis, e);
    }
}

/// Everything in a protozoan apart from its body is handled per step here:
/// health decay, digestion, then growth and repair in the order chosen by
/// the repair priority. Returns the new radius.
pub fn metabolise(cell: &mut Cell, dt: f64, cfg: &SimConfig, ledger: &mut Ledger) -> f64 {
    let Some(proto) = cell.proto.as_ref() else {
        return cell.radius;
    };
    let expr = &proto.expression;
    let (growth_rate, digestion_rate, repair_first) =
        (expr.growth_rate, expr.digestion_rate, expr.repair_priority >= 0.5);
    cell.health -= cfg.cell.base_health_decay * dt;
    digest(&mut cell.stores, digestion_rate, dt, &cfg.cell, ledger);
    let mut radius = cell.radius;
    let density = cfg.physics.density;
    if repair_first {
        repair(&mut cell.health, &mut cell.stores, dt, &cfg.cell, ledger);
        radius = grow(radius, &mut cell.stores, growth_rate, dt, density, &cfg.cell, ledger);
    } else {
        radius = grow(radius, &mut cell.stores, growth_rate, dt, density, &cfg.cell, ledger);
        repair(&mut cell.health, &mut cell.stores, dt, &cfg.cell, ledger);
    }
    radius
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeatPiece {
    pub offset: Vec2,
    pub radius: f64,
    pub energy: f64,
}

/// Split a dead protozoan into meat. The meat keeps `meat_fraction` of all
/// mass (as body) and energy; the rest goes to the decay sink.
pub fn die_to_meat(cell: &Cell, density: f64, cfg: &CellConfig, ledger: &mut Ledger) -> Vec<MeatPiece> {
    let mass = cell.total_mass(density);
    let energy = cell.stores.energy;
    let f = cfg.meat_fraction.clamp(0.0, 1.0);
    let meat_mass = f * mass;
    let meat_energy = f * energy;
    let area = meat_mass / density;

    let mut n = ((area / cfg.meat_piece_area).ceil() as usize).clamp(1, 6);
    while n > 1 && (area / n as f64 / PI).sqrt() < cfg.min_radius {
        n -= 1;
    }
    let r = (area / n as f64 / PI).sqrt();
    if meat_mass <= 0.0 || r < cfg.min_radius {
        ledger.mass.sink(Sink::Decay, mass);
        ledger.energy.sink(Sink::Decay, energy);
        return Vec::new();
    }
    ledger.mass.sink(Sink::Decay, mass - meat_mass);
    ledger.energy.sink(Sink::Decay, energy - meat_energy);
    let ring = if n == 1 { 0.0 } else { (cell.radius - r).max(0.0) };
    (0..n)
        .map(|i| MeatPiece {
            offset: Vec2::from_angle(std::f64::consts::TAU * i as f64 / n as f64) * ring,
            radius: r,
            energy: meat_energy / n as f64,
        })
        .collect()
}
