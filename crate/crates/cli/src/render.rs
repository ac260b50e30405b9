//! Binary PPM (P6) frames of a world state.

use protolife::cell::CellKind;
use protolife::engine::WorldState;
use protolife::lock::AttachmentKind;
use protolife::physics::geometry::Triangle;
use protolife::physics::{BodyId, Shape, Vec2};

const VOID: [u8; 3] = [12, 12, 18];
const ARENA: [u8; 3] = [28, 28, 34];
const ROCK: [u8; 3] = [115, 107, 102];
const LINK: [u8; 3] = [240, 240, 240];
const BORDER_FRACTION: f64 = 0.05;

fn glyph(kind: Option<AttachmentKind>) -> [u8; 3] {
    match kind {
        None => [150, 150, 150],
        Some(AttachmentKind::Flagellum) => [255, 220, 40],
        Some(AttachmentKind::Spike) => [255, 60, 200],
        Some(AttachmentKind::Phagoreceptor) => [60, 200, 255],
        Some(AttachmentKind::Photoreceptor) => [255, 255, 255],
        Some(AttachmentKind::AdhesionReceptor) => [255, 140, 0],
    }
}

fn rgb(c: [f64; 3]) -> [u8; 3] {
    c.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
}

pub struct Canvas {
    pub width: usize,
    pub height: usize,
    pixels: Vec<[u8; 3]>,
    /// World coordinate of the top-left corner and pixels per metre.
    origin: Vec2,
    scale: f64,
}

impl Canvas {
    fn new(extent: f64, scale: f64) -> Self {
        let size = ((2.0 * extent * scale).ceil() as usize).max(1);
        Canvas {
            width: size,
            height: size,
            pixels: vec![VOID; size * size],
            origin: Vec2::new(-extent, extent),
            scale,
        }
    }

    fn world(&self, px: usize, py: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + (px as f64 + 0.5) / self.scale,
            self.origin.y - (py as f64 + 0.5) / self.scale,
        )
    }

    /// Pixel range covering the world box `[lo, hi]`.
    fn span(&self, lo: Vec2, hi: Vec2) -> (usize, usize, usize, usize) {
        let clampx = |x: f64| (x.floor().max(0.0) as usize).min(self.width);
        let clampy = |y: f64| (y.floor().max(0.0) as usize).min(self.height);
        let x0 = clampx((lo.x - self.origin.x) * self.scale);
        let x1 = clampx((hi.x - self.origin.x) * self.scale + 1.0);
        let y0 = clampy((self.origin.y - hi.y) * self.scale);
        let y1 = clampy((self.origin.y - lo.y) * self.scale + 1.0);
        (x0, x1, y0, y1)
    }

    fn fill(&mut self, lo: Vec2, hi: Vec2, colour: [u8; 3], inside: impl Fn(Vec2) -> bool) {
        let (x0, x1, y0, y1) = self.span(lo, hi);
        for py in y0..y1 {
            for px in x0..x1 {
                if inside(self.world(px, py)) {
                    self.pixels[py * self.width + px] = colour;
                }
            }
        }
    }

    fn disc(&mut self, centre: Vec2, radius: f64, colour: [u8; 3]) {
        let r = Vec2::new(radius, radius);
        self.fill(centre - r, centre + r, colour, |p| (p - centre).length() <= radius);
    }

    fn triangle(&mut self, t: &Triangle, colour: [u8; 3]) {
        let lo = Vec2::new(
            t.iter().map(|v| v.x).fold(f64::MAX, f64::min),
            t.iter().map(|v| v.y).fold(f64::MAX, f64::min),
        );
        let hi = Vec2::new(
            t.iter().map(|v| v.x).fold(f64::MIN, f64::max),
            t.iter().map(|v| v.y).fold(f64::MIN, f64::max),
        );
        self.fill(lo, hi, colour, |p| {
            (0..3).all(|k| {
                let a = t[k];
                let b = t[(k + 1) % 3];
                (b - a).cross(p - a) >= 0.0
            })
        });
    }

    fn line(&mut self, a: Vec2, b: Vec2, colour: [u8; 3]) {
        let steps = (((b - a).length() * self.scale * 2.0).ceil() as usize).max(1);
        for s in 0..=steps {
            let p = a + (b - a) * (s as f64 / steps as f64);
            let px = ((p.x - self.origin.x) * self.scale).floor();
            let py = ((self.origin.y - p.y) * self.scale).floor();
            if px >= 0.0 && py >= 0.0 && (px as usize) < self.width && (py as usize) < self.height {
                self.pixels[py as usize * self.width + px as usize] = colour;
            }
        }
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }
}

/// Draw the arena, chemical grid, rocks, cells, node glyphs and bindings.
pub fn render(world: &WorldState, scale: f64) -> Canvas {
    let radius = world.config.world.world_radius;
    let mut canvas = Canvas::new(radius * (1.0 + BORDER_FRACTION), scale);

    let grid = &world.chem;
    let n = grid.size();
    let w = grid.pixel_width();
    for py in 0..canvas.height {
        for px in 0..canvas.width {
            let p = canvas.world(px, py);
            if p.length() > radius {
                continue;
            }
            let i = (((p.x + radius) / w).floor() as usize).min(n - 1);
            let j = (((p.y + radius) / w).floor() as usize).min(n - 1);
            let chem = rgb(grid.get(i, j));
            canvas.pixels[py * canvas.width + px] = [0, 1, 2].map(|c| ARENA[c].max(chem[c]));
        }
    }

    for t in &world.rocks {
        canvas.triangle(t, ROCK);
    }

    for cell in world.cells.values() {
        let Some(body) = world.physics.body(BodyId(cell.id)) else {
            continue;
        };
        let Shape::Disc { radius: r } = body.shape else {
            continue;
        };
        let colour = match cell.kind {
            CellKind::Protozoan => rgb(cell.colour),
            _ => rgb(body.colour),
        };
        canvas.disc(body.position, r, colour);
        if let Some(p) = &cell.proto {
            for node in &p.nodes {
                canvas.disc(
                    body.surface_point(node.angle),
                    (0.2 * r).max(0.5 / scale),
                    glyph(node.kind()),
                );
            }
        }
    }

    for b in world.bindings.values() {
        if let (Some(a), Some(c)) = (world.position(b.a), world.position(b.b)) {
            canvas.line(a, c, LINK);
        }
    }
    canvas
}
