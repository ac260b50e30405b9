//! Fuzzy lock-and-key matching between construction signatures and
//! complex molecules, and the construction projects it drives.
//!
//! Molecules live on a lattice `i / T_mol` of the unit circle. Attachment
//! kinds sit at function points `i / T`.

use crate::config::NodeConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AttachmentKind {
    Flagellum,
    Spike,
    Phagoreceptor,
    Photoreceptor,
    AdhesionReceptor,
}

pub const KIND_COUNT: usize = 5;

impl AttachmentKind {
    pub const ALL: [AttachmentKind; KIND_COUNT] = [
        AttachmentKind::Flagellum,
        AttachmentKind::Spike,
        AttachmentKind::Phagoreceptor,
        AttachmentKind::Photoreceptor,
        AttachmentKind::AdhesionReceptor,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> AttachmentKind {
        Self::ALL[i % KIND_COUNT]
    }

    pub fn function_point(self) -> f64 {
        self.index() as f64 / KIND_COUNT as f64
    }

    pub fn name(self) -> &'static str {
        match self {
            AttachmentKind::Flagellum => "flagellum",
            AttachmentKind::Spike => "spike",
            AttachmentKind::Phagoreceptor => "phagoreceptor",
            AttachmentKind::Photoreceptor => "photoreceptor",
            AttachmentKind::AdhesionReceptor => "adhesion",
        }
    }
}

/// Shortest distance between two points on the unit circle; in `[0, 0.5]`.
pub fn cycle_distance(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    (hi - lo).min(1.0 - hi + lo)
}

pub fn critical_distance(kind_count: usize) -> f64 {
    0.5 / kind_count as f64
}

/// One at distance zero, zero at or past `d_critical`, linear between.
pub fn matching_coefficient(d: f64, d_critical: f64) -> f64 {
    if d >= d_critical {
        0.0
    } else {
        ((d_critical - d) / d_critical).clamp(0.0, 1.0)
    }
}

/// Potency of a molecule at `s` and the kind it builds.
///
/// Works in units of function-point spacing so that exact midpoints give
/// exactly zero. Ties go to the lower kind index.
pub fn functional_potency(s: f64) -> (f64, AttachmentKind) {
    let t = KIND_COUNT as f64;
    let x = (s * t).rem_euclid(t);
    let below = x.floor();
    let frac = x - below;
    let lower = below as usize % KIND_COUNT;
    let upper = (lower + 1) % KIND_COUNT;
    let (kind, dist) = if frac < 0.5 {
        (lower, frac)
    } else if frac > 0.5 {
        (upper, 1.0 - frac)
    } else {
        (lower.min(upper), 0.5)
    };
    ((1.0 - 2.0 * dist).clamp(0.0, 1.0), AttachmentKind::from_index(kind))
}

pub fn lattice_signature(i: usize, molecule_count: usize) -> f64 {
    i as f64 / molecule_count as f64
}

pub fn snap_to_lattice(s: f64, molecule_count: usize) -> usize {
    let n = molecule_count as f64;
    ((s * n).round().rem_euclid(n)) as usize % molecule_count
}

/// Combined weight `k_func * k_matching` of lattice molecule `i` for a node
/// presenting `signature`, together with the kind it would build.
pub fn molecule_weight(signature: f64, i: usize, molecule_count: usize) -> (f64, AttachmentKind) {
    let s = lattice_signature(i, molecule_count);
    let (k_func, kind) = functional_potency(s);
    let k_match = matching_coefficient(cycle_distance(signature, s), critical_distance(KIND_COUNT));
    (k_func * k_match, kind)
}

/// Quantity-weighted drive toward each attachment kind.
pub fn select_project(signature: f64, store: &[f64]) -> [f64; KIND_COUNT] {
    let mut drive = [0.0; KIND_COUNT];
    for (i, &q) in store.iter().enumerate() {
        if q <= 0.0 {
            continue;
        }
        let (w, kind) = molecule_weight(signature, i, store.len());
        drive[kind.index()] += q * w;
    }
    drive
}

/// The kind with the strongest positive drive; ties to the lower index.
pub fn chosen_project(drive: &[f64; KIND_COUNT]) -> Option<AttachmentKind> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &d) in drive.iter().enumerate() {
        if d > 0.0 && best.is_none_or(|(_, b)| d > b) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| AttachmentKind::from_index(i))
}

/// Resources taken by one construction step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstructionStep {
    pub kind: Option<AttachmentKind>,
    pub mass: f64,
    pub energy: f64,
    pub molecules: f64,
    pub progress: f64,
    pub completed: bool,
}

/// Advance the strongest project on one node by `dt`.
///
/// Requirements per step are the totals times `dt / build_time`, scaled by
/// the drive (capped at 1). Short stores slow progress by the availability
/// ratio. Molecules are drawn best-weight first and the mean weight of what
/// was drawn scales progress.
#[allow(clippy::too_many_arguments)]
pub fn advance_construction(
    progress: &mut [f64; KIND_COUNT],
    signature: f64,
    mass: &mut f64,
    energy: &mut f64,
    molecules: &mut [f64],
    dt: f64,
    cfg: &NodeConfig,
) -> ConstructionStep {
    let drive = select_project(signature, molecules);
    let Some(kind) = chosen_project(&drive) else {
        return ConstructionStep::default();
    };
    let a = drive[kind.index()].min(1.0);
    let step = dt / cfg.build_time * a;
    let need_mass = cfg.mass_req * step;
    let need_energy = cfg.energy_req * step;
    let need_mol = cfg.molecule_req * step;

    let mut usable: Vec<(usize, f64)> = (0..molecules.len())
        .filter(|&i| molecules[i] > 0.0)
        .filter_map(|i| {
            let (w, k) = molecule_weight(signature, i, molecules.len());
            (k == kind && w > 0.0).then_some((i, w))
        })
        .collect();
    usable.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let available: f64 = usable.iter().map(|&(i, _)| molecules[i]).sum();

    let ratio = |have: f64, need: f64| if need > 0.0 { (have / need).min(1.0) } else { 1.0 };
    let r = ratio(mass.max(0.0), need_mass)
        .min(ratio(energy.max(0.0), need_energy))
        .min(ratio(available, need_mol));
    if r <= 0.0 {
        return ConstructionStep {
            kind: Some(kind),
            ..ConstructionStep::default()
        };
    }

    // Quality of the molecules this step would draw.
    let want = need_mol * r;
    let mut left = want;
    let mut taken = Vec::new();
    let mut weighted = 0.0;
    for &(i, w) in &usable {
        if left <= 0.0 {
            break;
        }
        let q = molecules[i].min(left);
        taken.push((i, q));
        weighted += q * w;
        left -= q;
    }
    let drawn = want - left.max(0.0);
    let quality = if drawn > 0.0 { weighted / drawn } else { 1.0 };

    let before = progress[kind.index()];
    let mut gain = step * r * quality;
    // Scale consumption on the final step so totals equal the requirements.
    let mut scale = 1.0;
    if before + gain >= 1.0 {
        scale = ((1.0 - before) / gain).clamp(0.0, 1.0);
        gain = 1.0 - before;
    }
    let used_mass = need_mass * r * scale;
    let used_energy = need_energy * r * scale;
    *mass -= used_mass;
    *energy -= used_energy;
    let mut used_mol = 0.0;
    for (i, q) in taken {
        let q = q * scale;
        molecules[i] -= q;
        used_mol += q;
    }
    progress[kind.index()] = (before + gain).min(1.0);
    ConstructionStep {
        kind: Some(kind),
        mass: used_mass,
        energy: used_energy,
        molecules: used_mol,
        progress: gain,
        completed: progress[kind.index()] >= 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_distance_examples() {
        assert_eq!(cycle_distance(0.3, 0.3), 0.0);
        assert!((cycle_distance(0.1, 0.9) - 0.2).abs() < 1e-12);
        assert_eq!(cycle_distance(0.25, 0.75), 0.5);
    }

    #[test]
    fn matching_examples() {
        let dc = critical_distance(5);
        assert_eq!(matching_coefficient(0.0, dc), 1.0);
        assert_eq!(matching_coefficient(dc, dc), 0.0);
        assert!((matching_coefficient(dc / 2.0, dc) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn potency_examples() {
        assert_eq!(functional_potency(0.4), (1.0, AttachmentKind::Phagoreceptor));
        assert_eq!(functional_potency(0.5), (0.0, AttachmentKind::Phagoreceptor));
        let (k, kind) = functional_potency(0.95);
        assert_eq!(kind, AttachmentKind::Flagellum);
        assert!((k - 0.5).abs() < 1e-12);
    }

    #[test]
    fn drive_examples() {
        let mut store = vec![0.0; 128];
        assert_eq!(select_project(0.4, &store), [0.0; 5]);
        store[snap_to_lattice(0.4, 128)] = 2.0;
        let d = select_project(0.4, &store);
        assert!(d[2] > 0.0);
        assert_eq!(d.iter().filter(|&&x| x > 0.0).count(), 1);
        let mut half = vec![0.0; 128];
        half[64] = 3.0;
        assert_eq!(select_project(0.5, &half), [0.0; 5]);
    }

    fn cfg() -> NodeConfig {
        NodeConfig::default()
    }

    #[test]
    fn empty_stores_make_no_progress() {
        let mut p = [0.0; 5];
        let (mut m, mut e) = (0.0, 0.0);
        let mut mol = vec![0.0; 128];
        mol[0] = 5.0;
        let s = advance_construction(&mut p, 0.0, &mut m, &mut e, &mut mol, 0.05, &cfg());
        assert_eq!(s.progress, 0.0);
        assert_eq!(mol[0], 5.0);
    }

    #[test]
    fn full_stores_progress_by_dt_over_build_time() {
        let c = cfg();
        let dt = 0.05;
        let mut p = [0.0; 5];
        let (mut m, mut e) = (c.mass_req * dt / c.build_time, c.energy_req * dt / c.build_time);
        let mut mol = vec![0.0; 128];
        mol[0] = 5.0;
        let s = advance_construction(&mut p, 0.0, &mut m, &mut e, &mut mol, dt, &c);
        assert!((s.progress - dt / c.build_time).abs() < 1e-12);
        assert!(m.abs() < 1e-15 && e.abs() < 1e-15);
    }

    #[test]
    fn whole_build_consumes_exact_requirements() {
        let c = cfg();
        let mut p = [0.0; 5];
        let (mut m, mut e) = (100.0, 100.0);
        let mut mol = vec![0.0; 128];
        mol[0] = 10.0;
        let mut totals = (0.0, 0.0, 0.0);
        for _ in 0..100_000 {
            let s = advance_construction(&mut p, 0.0, &mut m, &mut e, &mut mol, 0.05, &c);
            totals.0 += s.mass;
            totals.1 += s.energy;
            totals.2 += s.molecules;
            if s.completed {
                break;
            }
        }
        assert_eq!(p[0], 1.0);
        assert!((totals.0 - c.mass_req).abs() < 1e-6);
        assert!((totals.1 - c.energy_req).abs() < 1e-6);
        assert!((totals.2 - c.molecule_req).abs() < 1e-6);
    }

    #[test]
    fn half_matching_molecule_halves_progress() {
        let c = cfg();
        let dt = 0.05;
        let run = |signature: f64| {
            let mut p = [0.0; 5];
            let (mut m, mut e) = (10.0, 10.0);
            let mut mol = vec![0.0; 128];
            mol[0] = 5.0;
            advance_construction(&mut p, signature, &mut m, &mut e, &mut mol, dt, &c).progress
        };
        let exact = run(0.0);
        let half = run(critical_distance(5) / 2.0);
        assert!((half / exact - 0.5).abs() < 1e-12);
    }
}
