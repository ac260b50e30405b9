//! Population statistics sampled during a run.

use crate::cell::{Cell, CellId, CellKind};
use crate::lock::{AttachmentKind, KIND_COUNT};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Bumped whenever the column set changes.
pub const STATS_FORMAT_VERSION: u32 = 1;

pub const STATS_COLUMNS: [&str; 19] = [
    "tick",
    "max_generation",
    "protozoa",
    "plants",
    "meat",
    "freq_flagellum",
    "freq_spike",
    "freq_phagoreceptor",
    "freq_photoreceptor",
    "freq_adhesion",
    "multicell_components",
    "multicell_min",
    "multicell_mean",
    "multicell_max",
    "no_protozoa",
    "total_mass",
    "total_energy",
    "mass_residual",
    "energy_residual",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub tick: u64,
    pub max_generation: u32,
    pub protozoa: usize,
    pub plants: usize,
    pub meat: usize,
    /// Completed attachments of each kind per live protozoan.
    pub frequency: [f64; KIND_COUNT],
    /// Sizes of bound groups with at least two cells, ascending.
    pub multicell: Vec<usize>,
    pub total_mass: f64,
    pub total_energy: f64,
    pub mass_residual: f64,
    pub energy_residual: f64,
}

impl StatsRow {
    pub fn no_protozoa(&self) -> bool {
        self.protozoa == 0
    }

    pub fn multicell_min(&self) -> Option<usize> {
        self.multicell.first().copied()
    }

    pub fn multicell_max(&self) -> Option<usize> {
        self.multicell.last().copied()
    }

    pub fn multicell_mean(&self) -> Option<f64> {
        (!self.multicell.is_empty()).then(|| self.multicell.iter().sum::<usize>() as f64 / self.multicell.len() as f64)
    }

    /// Fields in [`STATS_COLUMNS`] order; absent values are empty strings.
    pub fn record(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let mut out = vec![
            self.tick.to_string(),
            self.max_generation.to_string(),
            self.protozoa.to_string(),
            self.plants.to_string(),
            self.meat.to_string(),
        ];
        out.extend(self.frequency.iter().map(|f| f.to_string()));
        out.push(self.multicell.len().to_string());
        out.push(opt(self.multicell_min().map(|v| v.to_string())));
        out.push(opt(self.multicell_mean().map(|v| v.to_string())));
        out.push(opt(self.multicell_max().map(|v| v.to_string())));
        out.push(u8::from(self.no_protozoa()).to_string());
        out.push(self.total_mass.to_string());
        out.push(self.total_energy.to_string());
        out.push(self.mass_residual.to_string());
        out.push(self.energy_residual.to_string());
        out
    }
}

/// Completed attachments of each kind divided by the protozoan count.
pub fn node_frequencies<'a>(cells: impl IntoIterator<Item = &'a Cell>) -> [f64; KIND_COUNT] {
    let mut counts = [0usize; KIND_COUNT];
    let mut protozoa = 0usize;
    for c in cells {
        let Some(p) = &c.proto else { continue };
        protozoa += 1;
        for n in &p.nodes {
            if let Some(k) = n.kind() {
                counts[k.index()] += 1;
            }
        }
    }
    if protozoa == 0 {
        return [0.0; KIND_COUNT];
    }
    counts.map(|c| c as f64 / protozoa as f64)
}

/// Sizes of connected groups of two or more, ascending.
pub fn component_sizes(nodes: &[CellId], edges: &[(CellId, CellId)]) -> Vec<usize> {
    let index: BTreeMap<CellId, usize> = nodes.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut uf = UnionFind::<usize>::new(nodes.len());
    for (a, b) in edges {
        if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
            uf.union(i, j);
        }
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..nodes.len() {
        *sizes.entry(uf.find(i)).or_default() += 1;
    }
    let mut out: Vec<usize> = sizes.into_values().filter(|&s| s >= 2).collect();
    out.sort_unstable();
    out
}

pub fn kind_counts<'a>(cells: impl IntoIterator<Item = &'a Cell>) -> BTreeMap<CellKind, usize> {
    let mut m = BTreeMap::new();
    for c in cells {
        *m.entry(c.kind).or_default() += 1;
    }
    m
}

pub fn attachment_column(kind: AttachmentKind) -> &'static str {
    STATS_COLUMNS[5 + kind.index()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_of_small_graph() {
        let sizes = component_sizes(&[1, 2, 3, 4, 5, 6], &[(1, 2), (2, 3), (4, 5)]);
        assert_eq!(sizes, vec![2, 3]);
    }

    #[test]
    fn no_edges_no_components() {
        assert!(component_sizes(&[1, 2], &[]).is_empty());
    }

    #[test]
    fn record_matches_columns() {
        let row = StatsRow {
            tick: 1,
            max_generation: 0,
            protozoa: 0,
            plants: 0,
            meat: 0,
            frequency: [0.0; KIND_COUNT],
            multicell: vec![],
            total_mass: 0.0,
            total_energy: 0.0,
            mass_residual: 0.0,
            energy_residual: 0.0,
        };
        assert_eq!(row.record().len(), STATS_COLUMNS.len());
        assert_eq!(attachment_column(AttachmentKind::Phagoreceptor), "freq_phagoreceptor");
    }
}
