//! Procedural rock formations.
//!
//! Each formation starts from one equilateral triangle and grows by gluing
//! new triangles onto free edges. Any two triangles in the world either
//! touch or are at least the corridor width apart, so every passage admits
//! the largest possible cell.

use crate::config::SimConfig;
use crate::physics::geometry::{ccw, centroid, triangle_distance, triangles_overlap, Triangle};
use crate::physics::Vec2;
use crate::rng::RngStream;
use std::f64::consts::TAU;

/// Distances below this count as touching.
pub const TOUCH: f64 = 1e-9;

const FORMATION_ATTEMPTS: usize = 60;
const GROWTH_ATTEMPTS: usize = 40;

pub fn corridor_width(cfg: &SimConfig) -> f64 {
    cfg.world.corridor_factor * cfg.max_cell_diameter()
}

fn formation_size(rng: &mut RngStream, cfg: &SimConfig) -> usize {
    let w = &cfg.world;
    let u = 1.0 - rng.unit();
    let x = u.powf(-1.0 / w.formation_size_tail.max(1e-3));
    let n = (w.formation_min_triangles as f64 * x).round();
    (n as u32).clamp(w.formation_min_triangles, w.formation_max_triangles) as usize
}

fn inside_arena(t: &Triangle, radius: f64) -> bool {
    t.iter().all(|v| v.length() <= radius)
}

/// Whether `t` may join a world already holding `others`: it must not
/// overlap anything and must either touch or clear each triangle by `gap`.
fn admissible(t: &Triangle, others: &[Triangle], gap: f64) -> bool {
    others.iter().all(|o| {
        if triangles_overlap(t, o) {
            return false;
        }
        let d = triangle_distance(t, o);
        d <= TOUCH || d >= gap
    })
}

fn glue(t: &Triangle, edge: usize, rng: &mut RngStream) -> Triangle {
    let a = t[edge];
    let b = t[(edge + 1) % 3];
    let c = t[(edge + 2) % 3];
    let mid = (a + b) * 0.5;
    let along = b - a;
    let mut normal = along.perp().normalized_or(Vec2::new(1.0, 0.0));
    if normal.dot(c - mid) > 0.0 {
        normal = -normal;
    }
    let h = along.length() * 3f64.sqrt() * 0.5 * rng.uniform(0.7, 1.3);
    let apex = mid + normal * h + along * rng.uniform(-0.25, 0.25);
    ccw([a, b, apex])
}

fn grow_formation(
    seed: Vec2,
    size: usize,
    placed: &[Triangle],
    rng: &mut RngStream,
    cfg: &SimConfig,
) -> Option<Vec<Triangle>> {
    let gap = corridor_width(cfg);
    let radius = cfg.world.world_radius;
    let s = cfg.world.rock_size;
    let phase = rng.uniform(0.0, TAU);
    let first = ccw([0, 1, 2].map(|k| seed + Vec2::from_angle(phase + TAU * k as f64 / 3.0) * (s / 3f64.sqrt())));
    // Other formations must be a full corridor away.
    let far_enough = |t: &Triangle| placed.iter().all(|o| triangle_distance(t, o) >= gap);
    if !inside_arena(&first, radius) || !far_enough(&first) {
        return None;
    }
    let mut tris = vec![first];
    for _ in 0..GROWTH_ATTEMPTS {
        if tris.len() >= size {
            break;
        }
        let base = tris[rng.index(tris.len())];
        let cand = glue(&base, rng.index(3), rng);
        if inside_arena(&cand, radius) && far_enough(&cand) && admissible(&cand, &tris, gap) {
            tris.push(cand);
        }
    }
    Some(tris)
}

/// Rock formations for a fresh world, one list per formation.
pub fn generate_environment(rng: &mut RngStream, cfg: &SimConfig) -> Vec<Vec<Triangle>> {
    let mut formations: Vec<Vec<Triangle>> = Vec::new();
    let mut placed: Vec<Triangle> = Vec::new();
    let reach = (cfg.world.world_radius - cfg.world.rock_size).max(0.0);
    for _ in 0..cfg.world.n_formations {
        let size = formation_size(rng, cfg);
        for _ in 0..FORMATION_ATTEMPTS {
            let r = reach * rng.unit().sqrt();
            let seed = Vec2::from_angle(rng.uniform(0.0, TAU)) * r;
            if let Some(f) = grow_formation(seed, size, &placed, rng, cfg) {
                placed.extend(f.iter().copied());
                formations.push(f);
                break;
            }
        }
    }
    formations
}

/// Smallest non-touching distance between any two triangles.
pub fn narrowest_passage(triangles: &[Triangle]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..triangles.len() {
        for j in i + 1..triangles.len() {
            let d = triangle_distance(&triangles[i], &triangles[j]);
            if d > TOUCH && best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        }
    }
    best
}

/// Whether a disc of `radius` at `p` clears every triangle.
pub fn clear_of_rocks(p: Vec2, radius: f64, triangles: &[Triangle]) -> bool {
    triangles.iter().all(|t| {
        let c = centroid(t);
        let reach = t.iter().map(|v| (*v - c).length()).fold(0.0, f64::max);
        (p - c).length() > reach + radius || crate::physics::geometry::disc_triangle_contact(p, radius, t).is_none()
    })
}
