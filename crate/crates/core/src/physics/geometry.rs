//! Closed-form queries on discs, segments and triangles.

use super::vec2::Vec2;

pub type Triangle = [Vec2; 3];

pub fn signed_area(t: &Triangle) -> f64 {
    0.5 * (t[1] - t[0]).cross(t[2] - t[0])
}

/// Reorder vertices counter-clockwise.
pub fn ccw(t: Triangle) -> Triangle {
    if signed_area(&t) < 0.0 {
        [t[0], t[2], t[1]]
    } else {
        t
    }
}

pub fn centroid(t: &Triangle) -> Vec2 {
    (t[0] + t[1] + t[2]) / 3.0
}

pub fn closest_point_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len_sq = ab.length_sq();
    if len_sq <= 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    a + ab * t
}

/// Inclusive containment test for a counter-clockwise triangle.
pub fn point_in_triangle(p: Vec2, t: &Triangle) -> bool {
    (0..3).all(|i| {
        let a = t[i];
        let b = t[(i + 1) % 3];
        (b - a).cross(p - a) >= 0.0
    })
}

/// Contact between a disc and a counter-clockwise triangle.
///
/// Returns `(normal, penetration)` where `normal` points from the triangle
/// toward the disc centre and `penetration > 0` means overlap.
pub fn disc_triangle_contact(centre: Vec2, radius: f64, t: &Triangle) -> Option<(Vec2, f64)> {
    if point_in_triangle(centre, t) {
        // Push out through the nearest edge.
        let mut best: Option<(Vec2, f64)> = None;
        for i in 0..3 {
            let a = t[i];
            let b = t[(i + 1) % 3];
            let edge = b - a;
            let outward = Vec2::new(edge.y, -edge.x).normalized_or(Vec2::new(1.0, 0.0));
            let depth = (a - centre).dot(outward);
            if best.is_none_or(|(_, d)| depth < d) {
                best = Some((outward, depth));
            }
        }
        let (n, depth) = best?;
        return Some((n, radius + depth));
    }
    let mut closest = t[0];
    let mut best = f64::INFINITY;
    for i in 0..3 {
        let q = closest_point_on_segment(centre, t[i], t[(i + 1) % 3]);
        let d = (centre - q).length_sq();
        if d < best {
            best = d;
            closest = q;
        }
    }
    let dist = best.sqrt();
    if dist >= radius {
        return None;
    }
    let n = (centre - closest).normalized_or(Vec2::new(1.0, 0.0));
    Some((n, radius - dist))
}

/// Smallest `t >= 0` with `|origin + t*dir - centre| = radius`; `dir` must be unit length.
pub fn ray_disc(origin: Vec2, dir: Vec2, centre: Vec2, radius: f64) -> Option<f64> {
    let m = origin - centre;
    let c = m.length_sq() - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let b = m.dot(dir);
    if b > 0.0 {
        return None;
    }
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    Some((-b - disc.sqrt()).max(0.0))
}

pub fn ray_segment(origin: Vec2, dir: Vec2, a: Vec2, b: Vec2) -> Option<f64> {
    let e = b - a;
    let denom = dir.cross(e);
    if denom.abs() < 1e-15 {
        return None;
    }
    let w = a - origin;
    let t = w.cross(e) / denom;
    let u = w.cross(dir) / denom;
    if t >= 0.0 && (0.0..=1.0).contains(&u) {
        Some(t)
    } else {
        None
    }
}

pub fn ray_triangle(origin: Vec2, dir: Vec2, t: &Triangle) -> Option<f64> {
    if point_in_triangle(origin, t) {
        return Some(0.0);
    }
    (0..3)
        .filter_map(|i| ray_segment(origin, dir, t[i], t[(i + 1) % 3]))
        .min_by(f64::total_cmp)
}

pub fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = (q2 - q1).cross(p1 - q1);
    let d2 = (q2 - q1).cross(p2 - q1);
    let d3 = (p2 - p1).cross(q1 - p1);
    let d4 = (p2 - p1).cross(q2 - p1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

pub fn triangles_overlap(a: &Triangle, b: &Triangle) -> bool {
    for i in 0..3 {
        for j in 0..3 {
            if segments_intersect(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]) {
                return true;
            }
        }
    }
    point_in_triangle(centroid(a), b) || point_in_triangle(centroid(b), a)
}

/// Minimum distance between two triangles (zero when they overlap).
pub fn triangle_distance(a: &Triangle, b: &Triangle) -> f64 {
    if triangles_overlap(a, b) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (s, o) in [(a, b), (b, a)] {
        for p in s.iter() {
            for j in 0..3 {
                let q = closest_point_on_segment(*p, o[j], o[(j + 1) % 3]);
                best = best.min((*p - q).length());
            }
        }
    }
    best
}
