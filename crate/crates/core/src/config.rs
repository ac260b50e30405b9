//! Simulation configuration.
//!
//! A config document is TOML with one table per subsystem (`[run]`, `[world]`,
//! `[physics]`, `[chem]`, `[grn]`, `[cell]`, `[nodes]`, `[evolution]`). Every key
//! is optional; missing keys take the defaults below and unknown keys are
//! rejected. `SimConfig::to_text` emits every key, so the output of a load is
//! always a complete, reloadable echo of the run parameters.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config value out of range: `{key}` must be {bound} (got {value})")]
    Range {
        key: &'static str,
        bound: &'static str,
        value: String,
    },
    #[error("config serialization failed: {0}")]
    Serialize(String),
}

/// Complete parameter set for one run. Immutable after load.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub run: RunConfig,
    pub world: WorldConfig,
    pub physics: PhysicsConfig,
    pub chem: ChemConfig,
    pub grn: GrnConfig,
    pub cell: CellConfig,
    pub nodes: NodeConfig,
    pub evolution: EvolutionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Stored as a two's-complement `i64` in the document since TOML integers are signed.
    #[serde(with = "seed_as_i64")]
    pub master_seed: u64,
    pub physics_dt: f64,
    pub grn_tick_interval: u32,
    pub grid_tick_interval: u32,
    pub stats_interval: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            physics_dt: 0.05,
            grn_tick_interval: 5,
            grid_tick_interval: 4,
            stats_interval: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    pub world_radius: f64,
    /// Health lost per second per metre beyond `world_radius`.
    pub void_decay_rate: f64,
    pub n_plants: u32,
    pub n_protozoa: u32,
    pub n_formations: u32,
    pub formation_min_triangles: u32,
    pub formation_max_triangles: u32,
    /// Edge length of rock triangles, metres.
    pub rock_size: f64,
    /// Tail exponent of the formation-size distribution (Pareto shape).
    pub formation_size_tail: f64,
    /// Minimum gap between formations as a multiple of the maximum cell diameter.
    pub corridor_factor: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            world_radius: 30.0,
            void_decay_rate: 0.05,
            n_plants: 150,
            n_protozoa: 60,
            n_formations: 10,
            formation_min_triangles: 3,
            formation_max_triangles: 12,
            rock_size: 2.5,
            formation_size_tail: 1.2,
            corridor_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    /// kg per square metre of disc area.
    pub density: f64,
    pub restitution: f64,
    /// Linear drag coefficient c_lin, force = -c_lin * v.
    pub linear_damping: f64,
    pub angular_damping: f64,
    pub group_drag_scale_min: f64,
    pub slop: f64,
    pub correction_percent: f64,
    pub joint_stiffness: f64,
    pub joint_damping: f64,
    pub joint_angular_stiffness: f64,
    pub joint_angular_damping: f64,
    /// Rest gap between the surface anchors of a new joint, metres.
    pub joint_gap: f64,
    pub max_speed: f64,
    /// Extra distance within which two discs count as touching for interactions.
    pub contact_margin: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            density: 1.0,
            restitution: 0.1,
            linear_damping: 2.0,
            angular_damping: 0.5,
            group_drag_scale_min: 0.35,
            slop: 1e-3,
            correction_percent: 0.8,
            joint_stiffness: 40.0,
            joint_damping: 8.0,
            joint_angular_stiffness: 4.0,
            joint_angular_damping: 1.0,
            joint_gap: 0.02,
            max_speed: 10.0,
            contact_margin: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChemConfig {
    pub grid_size: u32,
    /// Mass carried by one unit of channel value spread over one square metre.
    pub k_chem: f64,
    /// Blend amount per grid tick when plants and meat deposit.
    pub deposit_fraction: f64,
    /// Fraction of a classified pixel's dominant channel extracted per grid tick.
    pub extract_fraction: f64,
    /// Blend of a depositing cell's colour toward its desaturated colour per deposit.
    pub desaturate_step: f64,
    /// Rate at which a plant's colour recovers toward its base colour, per second.
    pub colour_recovery_rate: f64,
    /// Read the classification margin additively (g > b + 1.5) instead of multiplicatively.
    pub additive_thresholds: bool,
}

impl Default for ChemConfig {
    fn default() -> Self {
        Self {
            grid_size: 1024,
            k_chem: 2.0,
            deposit_fraction: 0.05,
            extract_fraction: 0.02,
            desaturate_step: 0.01,
            colour_recovery_rate: 0.2,
            additive_thresholds: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrnConfig {
    pub molecule_count: u32,
    pub attachment_type_count: u32,
    pub sigma_init: f64,
    pub p_weight_perturb: f64,
    pub weight_perturb_sigma: f64,
    pub p_weight_reset: f64,
    pub p_add_connection: f64,
    pub p_add_neuron: f64,
    pub p_toggle_enable: f64,
    /// Upper bound of the growth-rate output, m/s.
    pub max_growth_rate: f64,
    /// Upper bound of the digestion-rate output, mass/s.
    pub max_digestion_rate: f64,
    /// Upper bound of the molecule production-rate output, mass/s.
    pub max_production_rate: f64,
}

impl Default for GrnConfig {
    fn default() -> Self {
        Self {
            molecule_count: 128,
            attachment_type_count: 5,
            sigma_init: 1.0,
            p_weight_perturb: 0.8,
            weight_perturb_sigma: 0.1,
            p_weight_reset: 0.05,
            p_add_connection: 0.05,
            p_add_neuron: 0.02,
            p_toggle_enable: 0.01,
            max_growth_rate: 0.01,
            max_digestion_rate: 0.5,
            max_production_rate: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellConfig {
    pub protozoan_initial_radius: f64,
    pub plant_initial_radius: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    /// Health lost per second by every protozoan.
    pub base_health_decay: f64,
    /// Maximum health repaired per second.
    pub repair_rate: f64,
    pub repair_mass_per_health: f64,
    pub repair_energy_per_health: f64,
    pub plant_energy_density: f64,
    pub meat_energy_density: f64,
    /// Energy spent per unit of mass turned into body area.
    pub growth_energy_per_mass: f64,
    /// Energy spent per unit mass of complex molecule produced.
    pub molecule_energy_cost: f64,
    /// Fraction of each store a dead protozoan leaves in its meat.
    pub meat_fraction: f64,
    pub meat_lifetime: f64,
    pub meat_piece_area: f64,
    pub plant_mass_rate: f64,
    pub plant_energy_rate: f64,
    pub plant_growth_rate: f64,
    pub plant_division_radius: f64,
    /// Photosynthesis stops while a plant holds at least this much construction mass.
    pub plant_store_cap: f64,
    pub max_plants: u32,
    pub protozoan_initial_energy: f64,
    pub protozoan_initial_mass: f64,
    /// Scale used to squash unbounded stores into GRN inputs via tanh(x / scale).
    pub store_input_scale: f64,
    pub death_health: f64,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self {
            protozoan_initial_radius: 0.3,
            plant_initial_radius: 0.15,
            min_radius: 0.05,
            max_radius: 2.0,
            base_health_decay: 0.004,
            repair_rate: 0.05,
            repair_mass_per_health: 2.0,
            repair_energy_per_health: 4.0,
            plant_energy_density: 3.0,
            meat_energy_density: 6.0,
            growth_energy_per_mass: 1.0,
            molecule_energy_cost: 1.0,
            meat_fraction: 0.6,
            meat_lifetime: 120.0,
            meat_piece_area: 0.3,
            plant_mass_rate: 0.03,
            plant_energy_rate: 0.05,
            plant_growth_rate: 0.005,
            plant_division_radius: 0.3,
            plant_store_cap: 1.0,
            max_plants: 400,
            protozoan_initial_energy: 10.0,
            protozoan_initial_mass: 5.0,
            store_input_scale: 5.0,
            death_health: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NodeConfig {
    pub mass_req: f64,
    pub energy_req: f64,
    pub molecule_req: f64,
    pub build_time: f64,
    pub n_rays: u32,
    pub photo_cone_deg: f64,
    /// Photoreceptor ray range in multiples of the cell radius.
    pub photo_range_radii: f64,
    pub phago_cone_deg: f64,
    /// Total engulfed prey area allowed, as a fraction of the predator's area.
    pub engulf_capacity: f64,
    /// Prey area digested per second, m^2/s.
    pub engulf_digest_rate: f64,
    /// Spring constant pulling engulfed prey toward the predator centre.
    pub engulf_pull: f64,
    /// Thrust of an unequipped node at full request, newtons.
    pub default_thrust: f64,
    pub default_torque: f64,
    pub flagellum_multiplier: f64,
    /// Energy spent per newton-second (or newton-metre-second) of actuation.
    pub actuation_energy_cost: f64,
    /// Spike length as a fraction of the cell radius.
    pub spike_length: f64,
    /// Health removed per second at full spike penetration.
    pub spike_dps: f64,
    pub adhesion_margin: f64,
    /// Maximum mass (and energy) moved across one binding per second.
    pub binding_transfer_rate: f64,
}

impl Default for NodeConfig {
    fn default() -> Self {
        Self {
            mass_req: 0.5,
            energy_req: 1.0,
            molecule_req: 0.2,
            build_time: 5.0,
            n_rays: 8,
            photo_cone_deg: 90.0,
            photo_range_radii: 10.0,
            phago_cone_deg: 90.0,
            engulf_capacity: 0.8,
            engulf_digest_rate: 0.02,
            engulf_pull: 5.0,
            default_thrust: 0.3,
            default_torque: 0.02,
            flagellum_multiplier: 5.0,
            actuation_energy_cost: 0.02,
            spike_length: 0.3,
            spike_dps: 0.5,
            adhesion_margin: 0.05,
            binding_transfer_rate: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub r_min_div: f64,
    pub r_max_div: f64,
    /// Fraction of parent stores and biomass lost at each division.
    pub division_overhead: f64,
    pub division_min_health: f64,
    pub p_node_add: f64,
    pub p_node_del: f64,
    pub p_node_angle: f64,
    pub node_angle_sigma: f64,
    pub p_colour: f64,
    pub colour_step: f64,
    pub initial_nodes_min: u32,
    pub initial_nodes_max: u32,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            r_min_div: 0.5,
            r_max_div: 2.0,
            division_overhead: 0.1,
            division_min_health: 0.15,
            p_node_add: 0.05,
            p_node_del: 0.05,
            p_node_angle: 0.1,
            node_angle_sigma: 0.3,
            p_colour: 0.2,
            colour_step: 0.05,
            initial_nodes_min: 3,
            initial_nodes_max: 5,
        }
    }
}

mod seed_as_i64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(*seed as i64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        Ok(i64::deserialize(d)? as u64)
    }
}

fn range_err(key: &'static str, bound: &'static str, value: impl ToString) -> ConfigError {
    ConfigError::Range {
        key,
        bound,
        value: value.to_string(),
    }
}

macro_rules! require {
    ($cond:expr, $key:literal, $bound:literal, $value:expr) => {
        if !($cond) {
            return Err(range_err($key, $bound, $value));
        }
    };
}

impl SimConfig {
    /// Parse a config document; missing keys take defaults.
    pub fn load(text: &str) -> Result<Self, ConfigError> {
        let config: SimConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_text(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Serialize(e.to_string()))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.run.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let r = &self.run;
        require!(
            r.physics_dt > 0.0 && r.physics_dt.is_finite(),
            "run.physics_dt",
            "> 0",
            r.physics_dt
        );
        require!(
            r.grn_tick_interval >= 1,
            "run.grn_tick_interval",
            ">= 1",
            r.grn_tick_interval
        );
        require!(
            r.grid_tick_interval >= 1,
            "run.grid_tick_interval",
            ">= 1",
            r.grid_tick_interval
        );
        require!(r.stats_interval >= 1, "run.stats_interval", ">= 1", r.stats_interval);

        let w = &self.world;
        require!(w.world_radius > 0.0, "world.world_radius", "> 0", w.world_radius);
        require!(
            w.void_decay_rate >= 0.0,
            "world.void_decay_rate",
            ">= 0",
            w.void_decay_rate
        );
        require!(
            w.formation_min_triangles >= 1,
            "world.formation_min_triangles",
            ">= 1",
            w.formation_min_triangles
        );
        require!(
            w.formation_max_triangles >= w.formation_min_triangles,
            "world.formation_max_triangles",
            ">= world.formation_min_triangles",
            w.formation_max_triangles
        );
        require!(w.rock_size > 0.0, "world.rock_size", "> 0", w.rock_size);
        require!(
            w.formation_size_tail > 0.0,
            "world.formation_size_tail",
            "> 0",
            w.formation_size_tail
        );
        require!(
            w.corridor_factor >= 0.0,
            "world.corridor_factor",
            ">= 0",
            w.corridor_factor
        );

        let p = &self.physics;
        require!(p.density > 0.0, "physics.density", "> 0", p.density);
        require!(
            (0.0..=1.0).contains(&p.restitution),
            "physics.restitution",
            "in [0, 1]",
            p.restitution
        );
        require!(
            p.linear_damping >= 0.0,
            "physics.linear_damping",
            ">= 0",
            p.linear_damping
        );
        require!(
            p.angular_damping >= 0.0,
            "physics.angular_damping",
            ">= 0",
            p.angular_damping
        );
        require!(
            (0.0..=1.0).contains(&p.group_drag_scale_min),
            "physics.group_drag_scale_min",
            "in [0, 1]",
            p.group_drag_scale_min
        );
        require!(p.slop >= 0.0, "physics.slop", ">= 0", p.slop);
        require!(
            (0.0..=1.0).contains(&p.correction_percent),
            "physics.correction_percent",
            "in [0, 1]",
            p.correction_percent
        );
        require!(
            p.joint_stiffness >= 0.0,
            "physics.joint_stiffness",
            ">= 0",
            p.joint_stiffness
        );
        require!(p.joint_damping >= 0.0, "physics.joint_damping", ">= 0", p.joint_damping);
        require!(
            p.joint_angular_stiffness >= 0.0,
            "physics.joint_angular_stiffness",
            ">= 0",
            p.joint_angular_stiffness
        );
        require!(
            p.joint_angular_damping >= 0.0,
            "physics.joint_angular_damping",
            ">= 0",
            p.joint_angular_damping
        );
        require!(p.joint_gap >= 0.0, "physics.joint_gap", ">= 0", p.joint_gap);
        require!(p.max_speed > 0.0, "physics.max_speed", "> 0", p.max_speed);
        require!(
            p.contact_margin >= 0.0,
            "physics.contact_margin",
            ">= 0",
            p.contact_margin
        );

        let c = &self.chem;
        require!(c.grid_size >= 16, "chem.grid_size", ">= 16", c.grid_size);
        require!(c.k_chem > 0.0, "chem.k_chem", "> 0", c.k_chem);
        require!(
            c.deposit_fraction > 0.0 && c.deposit_fraction <= 1.0,
            "chem.deposit_fraction",
            "in (0, 1]",
            c.deposit_fraction
        );
        require!(
            (0.0..=1.0).contains(&c.extract_fraction),
            "chem.extract_fraction",
            "in [0, 1]",
            c.extract_fraction
        );
        require!(
            (0.0..=1.0).contains(&c.desaturate_step),
            "chem.desaturate_step",
            "in [0, 1]",
            c.desaturate_step
        );
        require!(
            c.colour_recovery_rate >= 0.0,
            "chem.colour_recovery_rate",
            ">= 0",
            c.colour_recovery_rate
        );

        let g = &self.grn;
        require!(
            g.attachment_type_count == 5,
            "grn.attachment_type_count",
            "== 5",
            g.attachment_type_count
        );
        require!(
            g.molecule_count >= g.attachment_type_count,
            "grn.molecule_count",
            ">= grn.attachment_type_count",
            g.molecule_count
        );
        require!(g.sigma_init >= 0.0, "grn.sigma_init", ">= 0", g.sigma_init);
        for (key, v) in [
            ("grn.p_weight_perturb", g.p_weight_perturb),
            ("grn.p_weight_reset", g.p_weight_reset),
            ("grn.p_add_connection", g.p_add_connection),
            ("grn.p_add_neuron", g.p_add_neuron),
            ("grn.p_toggle_enable", g.p_toggle_enable),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(range_err(key, "in [0, 1]", v));
            }
        }
        require!(
            g.weight_perturb_sigma >= 0.0,
            "grn.weight_perturb_sigma",
            ">= 0",
            g.weight_perturb_sigma
        );
        require!(
            g.max_growth_rate >= 0.0,
            "grn.max_growth_rate",
            ">= 0",
            g.max_growth_rate
        );
        require!(
            g.max_digestion_rate >= 0.0,
            "grn.max_digestion_rate",
            ">= 0",
            g.max_digestion_rate
        );
        require!(
            g.max_production_rate >= 0.0,
            "grn.max_production_rate",
            ">= 0",
            g.max_production_rate
        );

        let cl = &self.cell;
        require!(cl.min_radius > 0.0, "cell.min_radius", "> 0", cl.min_radius);
        require!(
            cl.max_radius > cl.min_radius,
            "cell.max_radius",
            "> cell.min_radius",
            cl.max_radius
        );
        require!(
            cl.protozoan_initial_radius >= cl.min_radius && cl.protozoan_initial_radius <= cl.max_radius,
            "cell.protozoan_initial_radius",
            "in [cell.min_radius, cell.max_radius]",
            cl.protozoan_initial_radius
        );
        require!(
            cl.plant_initial_radius >= cl.min_radius && cl.plant_initial_radius <= cl.max_radius,
            "cell.plant_initial_radius",
            "in [cell.min_radius, cell.max_radius]",
            cl.plant_initial_radius
        );
        require!(
            (0.0..=1.0).contains(&cl.meat_fraction),
            "cell.meat_fraction",
            "in [0, 1]",
            cl.meat_fraction
        );
        require!(
            cl.plant_energy_density >= 0.0 && cl.meat_energy_density >= 0.0,
            "cell.plant_energy_density",
            ">= 0",
            cl.plant_energy_density
        );
        require!(
            cl.meat_piece_area > 0.0,
            "cell.meat_piece_area",
            "> 0",
            cl.meat_piece_area
        );
        require!(
            cl.plant_division_radius > cl.plant_initial_radius,
            "cell.plant_division_radius",
            "> cell.plant_initial_radius",
            cl.plant_division_radius
        );
        require!(
            cl.store_input_scale > 0.0,
            "cell.store_input_scale",
            "> 0",
            cl.store_input_scale
        );
        require!(
            (0.0..1.0).contains(&cl.death_health),
            "cell.death_health",
            "in [0, 1)",
            cl.death_health
        );
        for (key, v) in [
            ("cell.base_health_decay", cl.base_health_decay),
            ("cell.repair_rate", cl.repair_rate),
            ("cell.repair_mass_per_health", cl.repair_mass_per_health),
            ("cell.repair_energy_per_health", cl.repair_energy_per_health),
            ("cell.growth_energy_per_mass", cl.growth_energy_per_mass),
            ("cell.molecule_energy_cost", cl.molecule_energy_cost),
            ("cell.meat_lifetime", cl.meat_lifetime),
            ("cell.plant_mass_rate", cl.plant_mass_rate),
            ("cell.plant_energy_rate", cl.plant_energy_rate),
            ("cell.plant_growth_rate", cl.plant_growth_rate),
            ("cell.plant_store_cap", cl.plant_store_cap),
            ("cell.protozoan_initial_energy", cl.protozoan_initial_energy),
            ("cell.protozoan_initial_mass", cl.protozoan_initial_mass),
        ] {
            if !(v >= 0.0) {
                return Err(range_err(key, ">= 0", v));
            }
        }

        let n = &self.nodes;
        require!(n.build_time > 0.0, "nodes.build_time", "> 0", n.build_time);
        require!(
            n.mass_req >= 0.0 && n.energy_req >= 0.0 && n.molecule_req >= 0.0,
            "nodes.mass_req",
            ">= 0 (with energy_req, molecule_req)",
            n.mass_req
        );
        require!(n.n_rays >= 1, "nodes.n_rays", ">= 1", n.n_rays);
        require!(
            n.photo_cone_deg >= 0.0 && n.photo_cone_deg <= 360.0,
            "nodes.photo_cone_deg",
            "in [0, 360]",
            n.photo_cone_deg
        );
        require!(
            n.photo_range_radii > 0.0,
            "nodes.photo_range_radii",
            "> 0",
            n.photo_range_radii
        );
        require!(
            n.phago_cone_deg >= 0.0 && n.phago_cone_deg <= 360.0,
            "nodes.phago_cone_deg",
            "in [0, 360]",
            n.phago_cone_deg
        );
        require!(
            n.engulf_capacity > 0.0 && n.engulf_capacity <= 1.0,
            "nodes.engulf_capacity",
            "in (0, 1]",
            n.engulf_capacity
        );
        require!(
            n.engulf_digest_rate > 0.0,
            "nodes.engulf_digest_rate",
            "> 0",
            n.engulf_digest_rate
        );
        require!(
            n.flagellum_multiplier >= 1.0,
            "nodes.flagellum_multiplier",
            ">= 1",
            n.flagellum_multiplier
        );
        require!(n.spike_length > 0.0, "nodes.spike_length", "> 0", n.spike_length);
        require!(
            n.binding_transfer_rate >= 0.0,
            "nodes.binding_transfer_rate",
            ">= 0",
            n.binding_transfer_rate
        );

        let e = &self.evolution;
        require!(e.r_min_div > 0.0, "evolution.r_min_div", "> 0", e.r_min_div);
        require!(
            e.r_max_div > e.r_min_div,
            "evolution.r_max_div",
            "> evolution.r_min_div",
            e.r_max_div
        );
        require!(
            (0.0..1.0).contains(&e.division_overhead),
            "evolution.division_overhead",
            "in [0, 1)",
            e.division_overhead
        );
        for (key, v) in [
            ("evolution.p_node_add", e.p_node_add),
            ("evolution.p_node_del", e.p_node_del),
            ("evolution.p_node_angle", e.p_node_angle),
            ("evolution.p_colour", e.p_colour),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(range_err(key, "in [0, 1]", v));
            }
        }
        require!(
            e.initial_nodes_min >= 1,
            "evolution.initial_nodes_min",
            ">= 1",
            e.initial_nodes_min
        );
        require!(
            e.initial_nodes_max >= e.initial_nodes_min,
            "evolution.initial_nodes_max",
            ">= evolution.initial_nodes_min",
            e.initial_nodes_max
        );
        Ok(())
    }

    /// Largest diameter any cell can reach.
    pub fn max_cell_diameter(&self) -> f64 {
        2.0 * self.cell.max_radius
    }

    /// Critical matching distance 1/(2T).
    pub fn critical_distance(&self) -> f64 {
        0.5 / self.grn.attachment_type_count as f64
    }
}
