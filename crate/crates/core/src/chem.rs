//! Chemical-solution grid: plants and meat deposit their colour, a 3x3 box
//! blur spreads it, and protozoa passing over classified pixels extract food.
//!
//! The grid spans the arena's bounding square `[-R, R]^2`. Pixels whose centre
//! lies outside the arena circle belong to the void and stay zero. Resident
//! mass is `k_chem * pixel_area * (sum of all channel values)`.

use serde::{Deserialize, Serialize};

use crate::config::ChemConfig;
use crate::physics::Vec2;

/// Per-extraction food gains.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Extraction {
    pub plant_food: f64,
    pub meat_food: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelClass {
    Plant,
    Meat,
    Unclassified,
}

/// Colour-space rule separating plant-made from meat-made solution.
pub fn classify(px: [f64; 3], additive: bool) -> PixelClass {
    let [r, g, b] = px;
    let dominates = |c: f64, o1: f64, o2: f64| {
        if additive {
            c > 0.5 && c > o1 + 1.5 && c > o2 + 1.5
        } else {
            c > 0.5 && c > 1.5 * o1 && c > 1.5 * o2
        }
    };
    if dominates(g, r, b) {
        PixelClass::Plant
    } else if dominates(r, g, b) {
        PixelClass::Meat
    } else {
        PixelClass::Unclassified
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChemGrid {
    size: usize,
    world_radius: f64,
    pixels: Vec<[f64; 3]>,
    /// 1 inside the arena, 0 in the void.
    arena: Vec<bool>,
    /// Number of the 9 kernel taps around each pixel that fall in the void or off-grid.
    void_taps: Vec<u8>,
}

impl ChemGrid {
    pub fn new(size: usize, world_radius: f64) -> Self {
        assert!(size >= 1 && world_radius > 0.0);
        let mut grid = ChemGrid {
            size,
            world_radius,
            pixels: vec![[0.0; 3]; size * size],
            arena: vec![false; size * size],
            void_taps: vec![0; size * size],
        };
        for j in 0..size {
            for i in 0..size {
                let c = grid.pixel_centre(i, j);
                grid.arena[j * size + i] = c.length() <= world_radius;
            }
        }
        for j in 0..size {
            for i in 0..size {
                let mut void = 0;
                for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        if !grid.in_arena(i as i64 + di, j as i64 + dj) {
                            void += 1;
                        }
                    }
                }
                grid.void_taps[j * size + i] = void;
            }
        }
        grid
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pixel_width(&self) -> f64 {
        2.0 * self.world_radius / self.size as f64
    }

    pub fn pixel_area(&self) -> f64 {
        self.pixel_width() * self.pixel_width()
    }

    pub fn pixel_centre(&self, i: usize, j: usize) -> Vec2 {
        let w = self.pixel_width();
        Vec2::new(
            -self.world_radius + (i as f64 + 0.5) * w,
            -self.world_radius + (j as f64 + 0.5) * w,
        )
    }

    fn in_arena(&self, i: i64, j: i64) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.size
            && (j as usize) < self.size
            && self.arena[j as usize * self.size + i as usize]
    }

    pub fn is_arena(&self, i: usize, j: usize) -> bool {
        self.arena[j * self.size + i]
    }

    pub fn get(&self, i: usize, j: usize) -> [f64; 3] {
        self.pixels[j * self.size + i]
    }

    /// Set a pixel; void pixels ignore writes. Values are clamped to [0, 1].
    pub fn set(&mut self, i: usize, j: usize, px: [f64; 3]) {
        let k = j * self.size + i;
        if self.arena[k] {
            self.pixels[k] = px.map(|c| c.clamp(0.0, 1.0));
        }
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    pub fn channel_sum(&self) -> f64 {
        self.pixels.iter().map(|p| p[0] + p[1] + p[2]).sum()
    }

    pub fn resident_mass(&self, k_chem: f64) -> f64 {
        k_chem * self.pixel_area() * self.channel_sum()
    }

    /// Arena pixel indices whose centre lies inside the disc, row-major order.
    fn footprint(&self, centre: Vec2, radius: f64) -> Vec<usize> {
        let w = self.pixel_width();
        let to_idx = |x: f64| ((x + self.world_radius) / w).floor();
        let lo_i = to_idx(centre.x - radius).max(0.0) as usize;
        let lo_j = to_idx(centre.y - radius).max(0.0) as usize;
        let hi_i = (to_idx(centre.x + radius).min(self.size as f64 - 1.0)).max(-1.0);
        let hi_j = (to_idx(centre.y + radius).min(self.size as f64 - 1.0)).max(-1.0);
        if hi_i < 0.0 || hi_j < 0.0 {
            return Vec::new();
        }
        let (hi_i, hi_j) = (hi_i as usize, hi_j as usize);
        let r2 = radius * radius;
        let mut out = Vec::new();
        for j in lo_j..=hi_j {
            for i in lo_i..=hi_i {
                let k = j * self.size + i;
                if self.arena[k] && (self.pixel_centre(i, j) - centre).length_sq() <= r2 {
                    out.push(k);
                }
            }
        }
        out
    }

    /// Mass a deposit of `colour` at blend `fraction` would move into the grid.
    pub fn deposit_cost(&self, centre: Vec2, radius: f64, colour: [f64; 3], fraction: f64, k_chem: f64) -> f64 {
        let raise: f64 = self
            .footprint(centre, radius)
            .into_iter()
            .map(|k| {
                let p = self.pixels[k];
                (0..3).map(|c| fraction * (colour[c] - p[c]).max(0.0)).sum::<f64>()
            })
            .sum();
        k_chem * self.pixel_area() * raise
    }

    /// Blend the pixels under a disc toward `colour`.
    ///
    /// Channels only move upward (`p += fraction * max(0, colour - p)`), so the
    /// deposit is a pure transfer of mass from the cell to the solution. Returns
    /// the mass moved; a disc entirely in the void moves nothing.
    pub fn deposit(&mut self, centre: Vec2, radius: f64, colour: [f64; 3], fraction: f64, k_chem: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&fraction));
        let mut raise = 0.0;
        for k in self.footprint(centre, radius) {
            let p = &mut self.pixels[k];
            for c in 0..3 {
                let target = colour[c].clamp(0.0, 1.0);
                let d = fraction * (target - p[c]).max(0.0);
                p[c] += d;
                raise += d;
            }
        }
        k_chem * self.pixel_area() * raise
    }

    /// Osmotrophic extraction under a disc.
    ///
    /// Each classified pixel gives up `fraction` of its dominant channel, which
    /// moves it toward grey; the removed amount becomes food of that class.
    pub fn extract(&mut self, centre: Vec2, radius: f64, fraction: f64, cfg: &ChemConfig) -> Extraction {
        let mut plant = 0.0;
        let mut meat = 0.0;
        for k in self.footprint(centre, radius) {
            let p = &mut self.pixels[k];
            match classify(*p, cfg.additive_thresholds) {
                PixelClass::Plant => {
                    let d = fraction * p[1];
                    p[1] -= d;
                    plant += d;
                }
                PixelClass::Meat => {
                    let d = fraction * p[0];
                    p[0] -= d;
                    meat += d;
                }
                PixelClass::Unclassified => {}
            }
        }
        let scale = cfg.k_chem * self.pixel_area();
        Extraction {
            plant_food: plant * scale,
            meat_food: meat * scale,
        }
    }

    /// 3x3 box blur; taps in the void or off-grid read zero.
    ///
    /// Returns the channel-sum lost through the arena boundary, computed from
    /// the pre-blur values as `sum(value * void_taps / 9)`.
    pub fn diffuse(&mut self) -> f64 {
        let n = self.size;
        let mut next = vec![[0.0; 3]; n * n];
        let mut lost = 0.0;
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                if !self.arena[k] {
                    continue;
                }
                let p = self.pixels[k];
                lost += (p[0] + p[1] + p[2]) * self.void_taps[k] as f64 / 9.0;
                let mut acc = [0.0; 3];
                for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        let (ii, jj) = (i as i64 + di, j as i64 + dj);
                        if self.in_arena(ii, jj) {
                            let q = self.pixels[jj as usize * n + ii as usize];
                            acc[0] += q[0];
                            acc[1] += q[1];
                            acc[2] += q[2];
                        }
                    }
                }
                next[k] = acc.map(|c| (c / 9.0).clamp(0.0, 1.0));
            }
        }
        self.pixels = next;
        lost
    }

    /// Raw 8-bit RGB frame, row 0 at the top (largest y).
    pub fn to_rgb8(&self) -> Vec<u8> {
        let n = self.size;
        let mut out = Vec::with_capacity(n * n * 3);
        for j in (0..n).rev() {
            for i in 0..n {
                for c in self.pixels[j * n + i] {
                    out.push((c * 255.0).round() as u8);
                }
            }
        }
        out
    }
}
