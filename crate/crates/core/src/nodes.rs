//! Surface nodes and the IO semantics of each attachment.
//!
//! Every node takes three controls and a construction signature from the
//! network and returns three sensor values.
//!
//! | kind          | controls                          | sensors                                  |
//! |---------------|-----------------------------------|------------------------------------------|
//! | none          | thrust, torque (default motility) | propulsion success, 0, 0                 |
//! | flagellum     | thrust, torque, unused            | propulsion success, 0, 0                 |
//! | spike         | extend (>= 0) / retract, unused   | damage dealt, depth / length, victim code|
//! | phagoreceptor | engulf plants (> 0), meat (> 0)   | last prey is plant, is meat, its health  |
//! | photoreceptor | unused                            | red, green, blue                         |
//! | adhesion      | outgoing signal triple            | partner's outgoing triple                |

use crate::config::NodeConfig;
use crate::lock::{AttachmentKind, KIND_COUNT};
use crate::physics::Vec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub kind: AttachmentKind,
    /// Spikes only.
    pub extended: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceNode {
    pub uid: u32,
    /// Body-frame angle of the node on the cell surface.
    pub angle: f64,
    pub attachment: Option<Attachment>,
    pub progress: [f64; KIND_COUNT],
    pub control: [f64; 3],
    pub signature: f64,
    pub sensors: [f64; 3],
}

impl SurfaceNode {
    pub fn new(uid: u32, angle: f64) -> Self {
        Self {
            uid,
            angle,
            attachment: None,
            progress: [0.0; KIND_COUNT],
            control: [0.0; 3],
            signature: 0.0,
            sensors: [0.0; 3],
        }
    }

    pub fn kind(&self) -> Option<AttachmentKind> {
        self.attachment.as_ref().map(|a| a.kind)
    }

    pub fn is(&self, kind: AttachmentKind) -> bool {
        self.kind() == Some(kind)
    }

    pub fn complete(&mut self, kind: AttachmentKind) {
        self.progress[kind.index()] = 1.0;
        self.attachment = Some(Attachment { kind, extended: true });
    }
}

/// Signed difference `b - a` wrapped into `(-pi, pi]`.
pub fn angle_between(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Whether the world direction `dir_angle` lies within a cone of total
/// width `cone_deg` around `axis_angle`.
pub fn within_cone(axis_angle: f64, dir_angle: f64, cone_deg: f64) -> bool {
    angle_between(axis_angle, dir_angle).abs() <= 0.5 * cone_deg.to_radians()
}

/// Evenly spread ray angles across a cone about `axis_angle`.
pub fn ray_angles(axis_angle: f64, n_rays: u32, cone_deg: f64) -> Vec<f64> {
    let cone = cone_deg.to_radians();
    if n_rays <= 1 {
        return vec![axis_angle; n_rays as usize];
    }
    (0..n_rays)
        .map(|i| axis_angle + cone * (i as f64 / (n_rays - 1) as f64 - 0.5))
        .collect()
}

/// Distance-weighted colour over all rays; misses contribute nothing.
/// Weights fall off as `1 / (1 + (d / scale)^2)`.
pub fn photoreceptor_signal(hits: &[Option<(f64, [f64; 3])>], scale: f64) -> [f64; 3] {
    if hits.is_empty() {
        return [0.0; 3];
    }
    let mut out = [0.0; 3];
    for (d, c) in hits.iter().flatten() {
        let x = d / scale.max(1e-12);
        let w = 1.0 / (1.0 + x * x);
        for k in 0..3 {
            out[k] += w * c[k];
        }
    }
    out.map(|v| v / hits.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Actuation {
    /// Signed thrust along the node-to-centre direction.
    pub thrust: f64,
    pub torque: f64,
    pub energy: f64,
    /// Produced over requested; 1 when nothing was asked for.
    pub success: f64,
}

/// Energy-limited motility for one node over `dt`.
///
/// Requests come from the first two controls times the default budget,
/// multiplied for flagella.
pub fn actuate(control: [f64; 3], flagellum: bool, available_energy: f64, dt: f64, cfg: &NodeConfig) -> Actuation {
    let mult = if flagellum { cfg.flagellum_multiplier } else { 1.0 };
    let thrust = control[0] * cfg.default_thrust * mult;
    let torque = control[1] * cfg.default_torque * mult;
    let need = cfg.actuation_energy_cost * (thrust.abs() + torque.abs()) * dt;
    if need <= 0.0 {
        return Actuation {
            thrust: 0.0,
            torque: 0.0,
            energy: 0.0,
            success: 1.0,
        };
    }
    let r = (available_energy.max(0.0) / need).min(1.0);
    Actuation {
        thrust: thrust * r,
        torque: torque * r,
        energy: need * r,
        success: r,
    }
}

/// Inputs to the engulfment decision for one predator/prey contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngulfQuery {
    pub predator_area: f64,
    /// Area of everything the predator is currently digesting.
    pub engulfed_area: f64,
    pub prey_area: f64,
    /// The phagoreceptor's control for this prey type is positive.
    pub permitted: bool,
    /// World angle of the receptor and of the direction to the prey.
    pub receptor_angle: f64,
    pub prey_direction: f64,
}

pub fn can_engulf(q: &EngulfQuery, cfg: &NodeConfig) -> bool {
    q.permitted
        && q.prey_area > 0.0
        && q.engulfed_area + q.prey_area <= cfg.engulf_capacity * q.predator_area
        && within_cone(q.receptor_angle, q.prey_direction, cfg.phago_cone_deg)
}

/// Damage per second dealt by a spike penetrating `depth` into a victim.
pub fn spike_dps(depth: f64, cfg: &NodeConfig) -> f64 {
    if depth <= 0.0 || cfg.spike_length <= 0.0 {
        return 0.0;
    }
    cfg.spike_dps * (depth / cfg.spike_length).min(1.0)
}

/// Unit vector from a surface node toward the cell centre.
pub fn thrust_direction(body_angle: f64, node_angle: f64) -> Vec2 {
    -Vec2::from_angle(body_angle + node_angle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actuation_without_energy_is_zero() {
        let a = actuate([1.0, 0.5, 0.0], true, 0.0, 0.05, &NodeConfig::default());
        assert_eq!((a.thrust, a.torque, a.success), (0.0, 0.0, 0.0));
    }

    #[test]
    fn funded_actuation_succeeds() {
        let cfg = NodeConfig::default();
        let a = actuate([1.0, -0.5, 0.0], true, 100.0, 0.05, &cfg);
        assert_eq!(a.success, 1.0);
        assert!((a.thrust - cfg.default_thrust * cfg.flagellum_multiplier).abs() < 1e-12);
        let b = actuate([1.0, -0.5, 0.0], false, 100.0, 0.05, &cfg);
        assert!((a.thrust / b.thrust - cfg.flagellum_multiplier).abs() < 1e-12);
    }

    #[test]
    fn partial_energy_gives_partial_success() {
        let cfg = NodeConfig::default();
        let full = actuate([1.0, 0.0, 0.0], false, 100.0, 0.05, &cfg);
        let half = actuate([1.0, 0.0, 0.0], false, full.energy / 2.0, 0.05, &cfg);
        assert!((half.success - 0.5).abs() < 1e-12);
        assert!((half.thrust - full.thrust / 2.0).abs() < 1e-12);
    }

    #[test]
    fn engulf_capacity_boundary() {
        let cfg = NodeConfig::default();
        let q = EngulfQuery {
            predator_area: 1.0,
            engulfed_area: 0.0,
            prey_area: 0.81,
            permitted: true,
            receptor_angle: 0.0,
            prey_direction: 0.0,
        };
        assert!(!can_engulf(&q, &cfg));
        assert!(can_engulf(&EngulfQuery { prey_area: 0.8, ..q }, &cfg));
        assert!(!can_engulf(
            &EngulfQuery {
                prey_area: 0.5,
                permitted: false,
                ..q
            },
            &cfg
        ));
        assert!(!can_engulf(
            &EngulfQuery {
                prey_area: 0.5,
                prey_direction: PI,
                ..q
            },
            &cfg
        ));
    }

    #[test]
    fn cone_wraps_around() {
        assert!(within_cone(0.1, TAU - 0.1, 60.0));
        assert!(!within_cone(0.0, PI / 2.0, 60.0));
    }

    #[test]
    fn photo_weights_fall_with_distance() {
        let near = photoreceptor_signal(&[Some((0.0, [0.0, 1.0, 0.0]))], 1.0);
        let far = photoreceptor_signal(&[Some((1.0, [0.0, 1.0, 0.0]))], 1.0);
        assert_eq!(near[1], 1.0);
        assert_eq!(far[1], 0.5);
        assert_eq!(photoreceptor_signal(&[None, None], 1.0), [0.0; 3]);
    }

    #[test]
    fn ray_fan_spans_cone() {
        let a = ray_angles(1.0, 3, 90.0);
        assert!((a[0] - (1.0 - PI / 4.0)).abs() < 1e-12);
        assert!((a[1] - 1.0).abs() < 1e-12);
        assert!((a[2] - (1.0 + PI / 4.0)).abs() < 1e-12);
    }
}
