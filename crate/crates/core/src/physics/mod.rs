//! Minimal deterministic 2D rigid-body core.
//!
//! Dynamic bodies are discs, static bodies are triangles. A step is
//! semi-implicit Euler with one velocity pass over joints and contacts and a
//! Baumgarte-style positional correction afterwards. Everything iterates in
//! body-id order so identical worlds produce bit-identical results.

pub mod broadphase;
pub mod geometry;
pub mod vec2;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PhysicsConfig;
use broadphase::SpatialHash;

const ROCK_HASH_CELL: f64 = 1.0;
use geometry::Triangle;
use vec2::cross_sv;
pub use vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BodyId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JointId(pub u64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Disc {
        radius: f64,
    },
    /// World-space vertices, counter-clockwise.
    Triangle {
        vertices: Triangle,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub id: BodyId,
    pub shape: Shape,
    pub position: Vec2,
    pub velocity: Vec2,
    pub angle: f64,
    pub angular_velocity: f64,
    pub mass: f64,
    pub inertia: f64,
    pub colour: [f64; 3],
    /// Bodies with `collides == false` are skipped by contacts and raycasts.
    pub collides: bool,
    force: Vec2,
    torque: f64,
}

impl Body {
    pub fn disc(id: BodyId, position: Vec2, radius: f64, density: f64, colour: [f64; 3]) -> Self {
        debug_assert!(radius > 0.0);
        let mut b = Body {
            id,
            shape: Shape::Disc { radius },
            position,
            velocity: Vec2::ZERO,
            angle: 0.0,
            angular_velocity: 0.0,
            mass: 0.0,
            inertia: 0.0,
            colour,
            collides: true,
            force: Vec2::ZERO,
            torque: 0.0,
        };
        b.set_radius(radius, density);
        b
    }

    pub fn triangle(id: BodyId, vertices: Triangle, colour: [f64; 3]) -> Self {
        let vertices = geometry::ccw(vertices);
        Body {
            id,
            position: geometry::centroid(&vertices),
            shape: Shape::Triangle { vertices },
            velocity: Vec2::ZERO,
            angle: 0.0,
            angular_velocity: 0.0,
            mass: 0.0,
            inertia: 0.0,
            colour,
            collides: true,
            force: Vec2::ZERO,
            torque: 0.0,
        }
    }

    pub fn is_dynamic(&self) -> bool {
        matches!(self.shape, Shape::Disc { .. })
    }

    pub fn radius(&self) -> f64 {
        match self.shape {
            Shape::Disc { radius } => radius,
            Shape::Triangle { .. } => 0.0,
        }
    }

    /// Resize a disc; mass and inertia follow `density * pi * r^2`.
    pub fn set_radius(&mut self, radius: f64, density: f64) {
        if let Shape::Disc { radius: r } = &mut self.shape {
            *r = radius;
            self.mass = density * std::f64::consts::PI * radius * radius;
            self.inertia = 0.5 * self.mass * radius * radius;
        }
    }

    pub fn inv_mass(&self) -> f64 {
        if self.is_dynamic() && self.mass > 0.0 {
            1.0 / self.mass
        } else {
            0.0
        }
    }

    pub fn inv_inertia(&self) -> f64 {
        if self.is_dynamic() && self.inertia > 0.0 {
            1.0 / self.inertia
        } else {
            0.0
        }
    }

    pub fn apply_force(&mut self, f: Vec2) {
        self.force += f;
    }

    pub fn apply_torque(&mut self, t: f64) {
        self.torque += t;
    }

    /// World position of a point on the disc surface at body-frame angle `theta`.
    pub fn surface_point(&self, theta: f64) -> Vec2 {
        self.position + Vec2::from_angle(theta + self.angle) * self.radius()
    }
}

/// Spring-damper link between surface anchors of two discs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    pub id: JointId,
    pub body_a: BodyId,
    pub body_b: BodyId,
    /// Unit directions in each body's frame; the anchor sits on the surface.
    pub anchor_a: Vec2,
    pub anchor_b: Vec2,
    pub rest_length: f64,
    pub stiffness: f64,
    pub damping: f64,
    pub angular_stiffness: f64,
    pub angular_damping: f64,
    /// `angle_b - angle_a` at creation.
    pub reference_angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayHit {
    pub body_id: BodyId,
    pub distance: f64,
    pub surface_colour: [f64; 3],
}

#[derive(Debug, Error, PartialEq)]
pub enum JointError {
    #[error("joint endpoint {0:?} is missing or not a dynamic disc")]
    BadEndpoint(BodyId),
    #[error("bodies {0:?} and {1:?} are already joined")]
    AlreadyJoined(BodyId, BodyId),
    #[error("a body cannot be joined to itself")]
    SelfJoint,
}

/// Drag multiplier for a disc given the positions of the discs joined to it.
///
/// Each partner at offset `o` contributes a reduction proportional to the
/// cosine distance between the velocity and the line through `o`,
/// `1 - |cos(v, o)|`. The reductions add up and the result is
/// `clamp(1 - (1 - scale_min) * sum / 2, scale_min, 1)`. A solo cell gets 1;
/// one partner perpendicular to the motion gives the midpoint of
/// `[scale_min, 1]`; motion along the line between partners keeps full drag.
pub fn group_drag_scale(velocity: Vec2, position: Vec2, partners: &[Vec2], scale_min: f64) -> f64 {
    let speed = velocity.length();
    if partners.is_empty() || speed <= 0.0 {
        return 1.0;
    }
    let reduction: f64 = partners
        .iter()
        .map(|p| {
            let off = *p - position;
            let len = off.length();
            if len <= 0.0 {
                0.0
            } else {
                1.0 - (velocity.dot(off) / (speed * len)).abs().min(1.0)
            }
        })
        .sum();
    (1.0 - (1.0 - scale_min) * reduction / 2.0).clamp(scale_min, 1.0)
}

/// Viscous drag force `-c_lin * scale * v`.
pub fn damping_force(body: &Body, partners: &[Vec2], linear_damping: f64, scale_min: f64) -> Vec2 {
    let scale = group_drag_scale(body.velocity, body.position, partners, scale_min);
    body.velocity * (-linear_damping * scale)
}

struct Contact {
    a: usize,
    /// `None` for a static triangle.
    b: Option<usize>,
    /// Points from `a` toward `b` for disc pairs, from the triangle toward `a` otherwise.
    normal: Vec2,
    penetration: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhysicsWorld {
    bodies: BTreeMap<BodyId, Body>,
    joints: BTreeMap<JointId, Joint>,
    next_joint: u64,
}

impl PhysicsWorld {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_body(&mut self, body: Body) {
        self.bodies.insert(body.id, body);
    }

    /// Remove a body together with every joint touching it.
    pub fn remove_body(&mut self, id: BodyId) -> Option<Body> {
        self.joints.retain(|_, j| j.body_a != id && j.body_b != id);
        self.bodies.remove(&id)
    }

    pub fn body(&self, id: BodyId) -> Option<&Body> {
        self.bodies.get(&id)
    }

    pub fn body_mut(&mut self, id: BodyId) -> Option<&mut Body> {
        self.bodies.get_mut(&id)
    }

    pub fn bodies(&self) -> impl Iterator<Item = &Body> {
        self.bodies.values()
    }

    pub fn body_count(&self) -> usize {
        self.bodies.len()
    }

    pub fn joints(&self) -> impl Iterator<Item = &Joint> {
        self.joints.values()
    }

    pub fn joint(&self, id: JointId) -> Option<&Joint> {
        self.joints.get(&id)
    }

    pub fn joint_between(&self, a: BodyId, b: BodyId) -> Option<JointId> {
        self.joints
            .values()
            .find(|j| (j.body_a == a && j.body_b == b) || (j.body_a == b && j.body_b == a))
            .map(|j| j.id)
    }

    /// Join two discs at the surface points facing each other.
    pub fn add_joint(&mut self, a: BodyId, b: BodyId, cfg: &PhysicsConfig) -> Result<JointId, JointError> {
        if a == b {
            return Err(JointError::SelfJoint);
        }
        let ba = self
            .bodies
            .get(&a)
            .filter(|x| x.is_dynamic())
            .ok_or(JointError::BadEndpoint(a))?;
        let bb = self
            .bodies
            .get(&b)
            .filter(|x| x.is_dynamic())
            .ok_or(JointError::BadEndpoint(b))?;
        if self.joint_between(a, b).is_some() {
            return Err(JointError::AlreadyJoined(a, b));
        }
        let axis = (bb.position - ba.position).normalized_or(Vec2::new(1.0, 0.0));
        let anchor_a = axis.rotate(-ba.angle);
        let anchor_b = (-axis).rotate(-bb.angle);
        let gap = (bb.position - ba.position).length() - ba.radius() - bb.radius();
        let joint = Joint {
            id: JointId(self.next_joint),
            body_a: a,
            body_b: b,
            anchor_a,
            anchor_b,
            rest_length: gap.max(cfg.joint_gap),
            stiffness: cfg.joint_stiffness,
            damping: cfg.joint_damping,
            angular_stiffness: cfg.joint_angular_stiffness,
            angular_damping: cfg.joint_angular_damping,
            reference_angle: bb.angle - ba.angle,
        };
        self.next_joint += 1;
        let id = joint.id;
        self.joints.insert(id, joint);
        Ok(id)
    }

    pub fn insert_joint(&mut self, joint: Joint) {
        self.next_joint = self.next_joint.max(joint.id.0 + 1);
        self.joints.insert(joint.id, joint);
    }

    pub fn remove_joint(&mut self, id: JointId) -> Option<Joint> {
        self.joints.remove(&id)
    }

    /// Positions of every body joined to `id`, in joint-id order.
    pub fn partner_positions(&self, id: BodyId) -> Vec<Vec2> {
        self.joints
            .values()
            .filter_map(|j| {
                let other = if j.body_a == id {
                    j.body_b
                } else if j.body_b == id {
                    j.body_a
                } else {
                    return None;
                };
                self.bodies.get(&other).map(|b| b.position)
            })
            .collect()
    }

    pub fn anchor_world(&self, joint: &Joint) -> Option<(Vec2, Vec2)> {
        let a = self.bodies.get(&joint.body_a)?;
        let b = self.bodies.get(&joint.body_b)?;
        Some((
            a.position + (joint.anchor_a * a.radius()).rotate(a.angle),
            b.position + (joint.anchor_b * b.radius()).rotate(b.angle),
        ))
    }

    fn dynamic_ids(&self) -> Vec<BodyId> {
        self.bodies.values().filter(|b| b.is_dynamic()).map(|b| b.id).collect()
    }

    fn triangles(&self) -> Vec<Triangle> {
        self.bodies
            .values()
            .filter_map(|b| match &b.shape {
                Shape::Triangle { vertices } if b.collides => Some(*vertices),
                _ => None,
            })
            .collect()
    }

    /// Advance the world by `dt`.
    pub fn step(&mut self, dt: f64, cfg: &PhysicsConfig) {
        self.joints
            .retain(|_, j| self.bodies.contains_key(&j.body_a) && self.bodies.contains_key(&j.body_b));

        // Forces, then drag as an exact exponential decay of the drag force.
        let partner_map: BTreeMap<BodyId, Vec<Vec2>> = self
            .dynamic_ids()
            .into_iter()
            .map(|id| (id, self.partner_positions(id)))
            .collect();
        for body in self.bodies.values_mut().filter(|b| b.is_dynamic()) {
            let inv_m = body.inv_mass();
            let inv_i = body.inv_inertia();
            body.velocity += body.force * (inv_m * dt);
            body.angular_velocity += body.torque * inv_i * dt;
            body.force = Vec2::ZERO;
            body.torque = 0.0;
            let partners = &partner_map[&body.id];
            let scale = group_drag_scale(body.velocity, body.position, partners, cfg.group_drag_scale_min);
            body.velocity *= (-cfg.linear_damping * scale * inv_m * dt).exp();
            body.angular_velocity *= (-cfg.angular_damping * inv_i * dt).exp();
        }

        self.solve_joints(dt);

        let ids = self.dynamic_ids();
        let tris = self.triangles();
        let contacts = self.find_contacts(&ids, &tris);
        self.resolve_velocities(&ids, &contacts, cfg.restitution);

        for body in self.bodies.values_mut().filter(|b| b.is_dynamic()) {
            let speed = body.velocity.length();
            if speed > cfg.max_speed {
                body.velocity *= cfg.max_speed / speed;
            }
            body.position += body.velocity * dt;
            body.angle += body.angular_velocity * dt;
            debug_assert!(body.position.is_finite(), "non-finite position on {:?}", body.id);
        }

        let contacts = self.find_contacts(&ids, &tris);
        self.correct_positions(&ids, &contacts, cfg);
    }

    fn find_contacts(&self, ids: &[BodyId], tris: &[Triangle]) -> Vec<Contact> {
        let discs: Vec<&Body> = ids.iter().map(|id| &self.bodies[id]).collect();
        let positions: Vec<Vec2> = discs.iter().map(|b| b.position).collect();
        let max_r = discs.iter().map(|b| b.radius()).fold(0.0, f64::max);
        let hash = SpatialHash::build(
            2.0 * max_r,
            discs
                .iter()
                .enumerate()
                .filter(|(_, b)| b.collides)
                .map(|(i, b)| (i, b.position)),
        );
        let mut contacts = Vec::new();
        for (i, j) in hash.candidate_pairs(&positions) {
            let (a, b) = (discs[i], discs[j]);
            let d = b.position - a.position;
            let dist = d.length();
            let pen = a.radius() + b.radius() - dist;
            if pen > 0.0 {
                contacts.push(Contact {
                    a: i,
                    b: Some(j),
                    normal: d.normalized_or(Vec2::new(1.0, 0.0)),
                    penetration: pen,
                });
            }
        }
        if !tris.is_empty() && discs.iter().any(|b| b.collides) {
            // Queries are by box, so the cell size only affects speed.
            let tri_hash = SpatialHash::build_boxes(
                (2.0 * max_r).max(ROCK_HASH_CELL),
                tris.iter().enumerate().map(|(k, t)| {
                    let min = Vec2::new(t[0].x.min(t[1].x).min(t[2].x), t[0].y.min(t[1].y).min(t[2].y));
                    let max = Vec2::new(t[0].x.max(t[1].x).max(t[2].x), t[0].y.max(t[1].y).max(t[2].y));
                    (k, min, max)
                }),
            );
            let mut scratch = Vec::new();
            for (i, a) in discs.iter().enumerate().filter(|(_, b)| b.collides) {
                scratch.clear();
                let r = Vec2::new(a.radius(), a.radius());
                tri_hash.query_box(a.position - r, a.position + r, &mut scratch);
                scratch.sort_unstable();
                scratch.dedup();
                for &k in &scratch {
                    if let Some((n, pen)) = geometry::disc_triangle_contact(a.position, a.radius(), &tris[k]) {
                        contacts.push(Contact {
                            a: i,
                            b: None,
                            normal: n,
                            penetration: pen,
                        });
                    }
                }
            }
        }
        contacts
    }

    fn resolve_velocities(&mut self, ids: &[BodyId], contacts: &[Contact], restitution: f64) {
        for c in contacts {
            match c.b {
                Some(j) => {
                    let (a, b) = (&self.bodies[&ids[c.a]], &self.bodies[&ids[j]]);
                    let (ia, ib) = (a.inv_mass(), b.inv_mass());
                    let vn = (b.velocity - a.velocity).dot(c.normal);
                    if vn >= 0.0 || ia + ib <= 0.0 {
                        continue;
                    }
                    let imp = -(1.0 + restitution) * vn / (ia + ib);
                    self.bodies.get_mut(&ids[c.a]).unwrap().velocity -= c.normal * (imp * ia);
                    self.bodies.get_mut(&ids[j]).unwrap().velocity += c.normal * (imp * ib);
                }
                None => {
                    let a = self.bodies.get_mut(&ids[c.a]).unwrap();
                    let vn = a.velocity.dot(c.normal);
                    if vn < 0.0 {
                        a.velocity -= c.normal * ((1.0 + restitution) * vn);
                    }
                }
            }
        }
    }

    fn correct_positions(&mut self, ids: &[BodyId], contacts: &[Contact], cfg: &PhysicsConfig) {
        for c in contacts {
            let depth = (c.penetration - cfg.slop).max(0.0) * cfg.correction_percent;
            if depth <= 0.0 {
                continue;
            }
            match c.b {
                Some(j) => {
                    let ia = self.bodies[&ids[c.a]].inv_mass();
                    let ib = self.bodies[&ids[j]].inv_mass();
                    if ia + ib <= 0.0 {
                        continue;
                    }
                    let k = depth / (ia + ib);
                    self.bodies.get_mut(&ids[c.a]).unwrap().position -= c.normal * (k * ia);
                    self.bodies.get_mut(&ids[j]).unwrap().position += c.normal * (k * ib);
                }
                None => {
                    self.bodies.get_mut(&ids[c.a]).unwrap().position += c.normal * depth;
                }
            }
        }
    }

    /// One soft-constraint velocity pass over every joint.
    ///
    /// Returns the linear impulse applied by each joint (positive pulls the
    /// anchors together).
    pub fn solve_joints(&mut self, dt: f64) -> Vec<(JointId, f64)> {
        let joints: Vec<Joint> = self.joints.values().cloned().collect();
        let mut impulses = Vec::with_capacity(joints.len());
        for j in joints {
            let (Some(a), Some(b)) = (self.bodies.get(&j.body_a), self.bodies.get(&j.body_b)) else {
                self.joints.remove(&j.id);
                continue;
            };
            let (ima, imb) = (a.inv_mass(), b.inv_mass());
            let (iia, iib) = (a.inv_inertia(), b.inv_inertia());
            let ra = (j.anchor_a * a.radius()).rotate(a.angle);
            let rb = (j.anchor_b * b.radius()).rotate(b.angle);
            let d = (b.position + rb) - (a.position + ra);
            let len = d.length();
            let u = if len > 1e-9 {
                d / len
            } else {
                (b.position - a.position).normalized_or(Vec2::new(1.0, 0.0))
            };
            let c = len - j.rest_length;
            let cra = ra.cross(u);
            let crb = rb.cross(u);
            let inv_eff = ima + imb + iia * cra * cra + iib * crb * crb;

            let mut va = a.velocity;
            let mut wa = a.angular_velocity;
            let mut vb = b.velocity;
            let mut wb = b.angular_velocity;

            let mut linear = 0.0;
            let soft = dt * (j.damping + dt * j.stiffness);
            if inv_eff > 0.0 && soft > 0.0 {
                let gamma = 1.0 / soft;
                let bias = c * dt * j.stiffness * gamma;
                let mass = 1.0 / (inv_eff + gamma);
                let cdot = u.dot((vb + cross_sv(wb, rb)) - (va + cross_sv(wa, ra)));
                let imp = -mass * (cdot + bias);
                let p = u * imp;
                va -= p * ima;
                wa -= iia * ra.cross(p);
                vb += p * imb;
                wb += iib * rb.cross(p);
                linear = -imp;
            }

            let inv_i = iia + iib;
            let soft_ang = dt * (j.angular_damping + dt * j.angular_stiffness);
            if inv_i > 0.0 && soft_ang > 0.0 {
                let gamma = 1.0 / soft_ang;
                let c_ang = (b.angle - a.angle) - j.reference_angle;
                let bias = c_ang * dt * j.angular_stiffness * gamma;
                let mass = 1.0 / (inv_i + gamma);
                let imp = -mass * ((wb - wa) + bias);
                wa -= iia * imp;
                wb += iib * imp;
            }

            let a = self.bodies.get_mut(&j.body_a).unwrap();
            a.velocity = va;
            a.angular_velocity = wa;
            let b = self.bodies.get_mut(&j.body_b).unwrap();
            b.velocity = vb;
            b.angular_velocity = wb;
            impulses.push((j.id, linear));
        }
        impulses
    }

    /// Nearest collidable body hit by a ray, excluding `exclude`.
    pub fn raycast(&self, origin: Vec2, dir: Vec2, max_range: f64, exclude: Option<BodyId>) -> Option<RayHit> {
        let mut best: Option<RayHit> = None;
        for b in self.bodies.values() {
            if !b.collides || Some(b.id) == exclude {
                continue;
            }
            let t = match &b.shape {
                Shape::Disc { radius } => geometry::ray_disc(origin, dir, b.position, *radius),
                Shape::Triangle { vertices } => geometry::ray_triangle(origin, dir, vertices),
            };
            if let Some(t) = t.filter(|t| *t <= max_range) {
                if best.as_ref().is_none_or(|h| t < h.distance) {
                    best = Some(RayHit {
                        body_id: b.id,
                        distance: t,
                        surface_colour: b.colour,
                    });
                }
            }
        }
        best
    }

    /// Pairs of collidable discs whose surfaces are within `margin`, sorted by id.
    pub fn disc_pairs_within(&self, margin: f64) -> Vec<(BodyId, BodyId, f64)> {
        let discs: Vec<&Body> = self.bodies.values().filter(|b| b.is_dynamic() && b.collides).collect();
        let positions: Vec<Vec2> = discs.iter().map(|b| b.position).collect();
        let max_r = discs.iter().map(|b| b.radius()).fold(0.0, f64::max);
        let hash = SpatialHash::build(2.0 * max_r + margin, positions.iter().copied().enumerate());
        hash.candidate_pairs(&positions)
            .into_iter()
            .filter_map(|(i, j)| {
                let dist = (discs[j].position - discs[i].position).length();
                (dist <= discs[i].radius() + discs[j].radius() + margin).then_some((discs[i].id, discs[j].id, dist))
            })
            .collect()
    }

    /// Deepest disc overlap with any static triangle.
    pub fn max_triangle_penetration(&self) -> f64 {
        let tris = self.triangles();
        self.bodies
            .values()
            .filter(|b| b.is_dynamic() && b.collides)
            .flat_map(|b| {
                tris.iter()
                    .filter_map(|t| geometry::disc_triangle_contact(b.position, b.radius(), t).map(|c| c.1))
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }
}
