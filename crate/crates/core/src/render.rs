//! Raster overlays of plates, heatmaps and planned skills.

use thiserror::Error;

use crate::geometry::{density_map, line_pixels, DensityMap, GeometryError};
use crate::planner::SkillSequence;
use crate::plate::{FoodItem, Pixel, PlateState};
use crate::skills::{round_px, SkillCommand, SkillKind};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("png encoding: {0}")]
    Png(#[from] png::EncodingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Rgb = [u8; 3];

pub const BACKGROUND: Rgb = [236, 232, 224];
pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [20, 20, 20];
pub const MARKER: Rgb = [220, 30, 40];

const PALETTE: [Rgb; 8] = [
    [214, 170, 84],
    [150, 80, 60],
    [90, 160, 80],
    [230, 200, 150],
    [200, 110, 140],
    [120, 120, 190],
    [190, 150, 60],
    [110, 170, 170],
];

pub fn item_color(index: usize) -> Rgb {
    PALETTE[index % PALETTE.len()]
}

/// RGB raster with clipped drawing primitives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl Canvas {
    pub fn new(width: u32, height: u32, fill: Rgb) -> Self {
        let mut pixels = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            pixels.extend_from_slice(&fill);
        }
        Self { width, height, pixels }
    }

    pub fn get(&self, p: Pixel) -> Option<Rgb> {
        let i = self.index(p)?;
        Some([self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]])
    }

    fn index(&self, p: Pixel) -> Option<usize> {
        (p.x >= 0 && p.y >= 0 && (p.x as u32) < self.width && (p.y as u32) < self.height)
            .then(|| ((p.y as u32 * self.width + p.x as u32) * 3) as usize)
    }

    pub fn put(&mut self, p: Pixel, c: Rgb) {
        if let Some(i) = self.index(p) {
            self.pixels[i..i + 3].copy_from_slice(&c);
        }
    }

    pub fn blend(&mut self, p: Pixel, c: Rgb, alpha: f64) {
        if let Some(old) = self.get(p) {
            let mix = |a: u8, b: u8| (f64::from(a) * (1.0 - alpha) + f64::from(b) * alpha).round() as u8;
            self.put(p, [mix(old[0], c[0]), mix(old[1], c[1]), mix(old[2], c[2])]);
        }
    }

    pub fn line(&mut self, a: Pixel, b: Pixel, c: Rgb) {
        for p in line_pixels(a, b) {
            self.put(p, c);
        }
    }

    pub fn thick_line(&mut self, a: Pixel, b: Pixel, c: Rgb) {
        for p in line_pixels(a, b) {
            for (dx, dy) in [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)] {
                self.put(p.offset(dx, dy), c);
            }
        }
    }

    pub fn cross(&mut self, p: Pixel, r: i32, c: Rgb) {
        self.line(p.offset(-r, -r), p.offset(r, r), c);
        self.line(p.offset(-r, r), p.offset(r, -r), c);
    }

    pub fn dot(&mut self, p: Pixel, r: i32, c: Rgb) {
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy <= r * r {
                    self.put(p.offset(dx, dy), c);
                }
            }
        }
    }

    /// Shaft from `a` to `b` with a two-stroke head at `b`.
    pub fn arrow(&mut self, a: Pixel, b: Pixel, c: Rgb) {
        self.thick_line(a, b, c);
        let (dx, dy) = (f64::from(b.x - a.x), f64::from(b.y - a.y));
        let len = dx.hypot(dy);
        if len < 1.0 {
            return;
        }
        let (ux, uy) = (dx / len, dy / len);
        let head = 6.0_f64.min(len / 2.0);
        for s in [-1.0, 1.0] {
            let (hx, hy) = (-ux * head + s * -uy * head * 0.6, -uy * head + s * ux * head * 0.6);
            let tip = Pixel::new(b.x + hx.round() as i32, b.y + hy.round() as i32);
            self.thick_line(b, tip, c);
        }
    }

    /// Short stroke through `p` at `angle_deg` (image coordinates).
    pub fn tick(&mut self, p: Pixel, angle_deg: f64, half_len: f64, c: Rgb) {
        let (s, co) = angle_deg.to_radians().sin_cos();
        let off = Pixel::new((co * half_len).round() as i32, (s * half_len).round() as i32);
        self.thick_line(p.offset(-off.x, -off.y), p.offset(off.x, off.y), c);
    }

    pub fn fill_item(&mut self, item: &FoodItem, c: Rgb) {
        for p in item.mask.pixels() {
            self.put(p, c);
        }
        for p in item.mask.boundary() {
            self.blend(p, BLACK, 0.5);
        }
    }

    /// RGBA bytes for an HTML canvas.
    pub fn to_rgba(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.pixels.len() / 3 * 4);
        for px in self.pixels.chunks_exact(3) {
            out.extend_from_slice(px);
            out.push(255);
        }
        out
    }

    pub fn to_png(&self) -> Result<Vec<u8>, RenderError> {
        let mut buf = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut buf, self.width, self.height);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header()?;
            writer.write_image_data(&self.pixels)?;
        }
        Ok(buf)
    }
}

/// Dark-to-bright ramp for values in [0, 1].
pub fn heat_color(v: f64) -> Rgb {
    let v = v.clamp(0.0, 1.0);
    let r = (255.0 * (1.5 * v).min(1.0)).round() as u8;
    let g = (255.0 * (1.5 * v - 0.5).clamp(0.0, 1.0)).round() as u8;
    let b = (255.0 * (3.0 * v - 2.0).clamp(0.0, 1.0)).round() as u8;
    [r.max(16), g.max(8), b.max(32)]
}

pub fn draw_plate(state: &PlateState) -> Canvas {
    let obs = &state.observation;
    let mut canvas = Canvas::new(obs.width, obs.height, BACKGROUND);
    for (i, item) in state.items().iter().enumerate() {
        canvas.fill_item(item, item_color(i));
    }
    canvas
}

pub fn draw_heatmap(dmap: &DensityMap) -> Canvas {
    let mut canvas = Canvas::new(dmap.width, dmap.height, BLACK);
    for y in 0..dmap.height as i32 {
        for x in 0..dmap.width as i32 {
            let p = Pixel::new(x, y);
            canvas.put(p, heat_color(dmap.get(p)));
        }
    }
    canvas.cross(dmap.peak, 4, WHITE);
    canvas
}

pub fn item_heatmap(item: &FoodItem, sigma: f64) -> Result<Canvas, RenderError> {
    Ok(draw_heatmap(&density_map(&item.mask, sigma)?))
}

/// Draws one command: arrows for sweeps, a marker plus tine tick for point
/// skills and a line across the item for cuts.
pub fn draw_command(canvas: &mut Canvas, cmd: &SkillCommand) {
    match cmd.kind {
        SkillKind::Push | SkillKind::Group | SkillKind::Scoop => {
            if let Some((a, b)) = cmd.segment() {
                canvas.arrow(round_px(a), round_px(b), WHITE);
            }
        }
        SkillKind::Skewer | SkillKind::Twirl => {
            if let Some(t) = cmd.target_point() {
                let p = round_px(t);
                canvas.dot(p, 2, MARKER);
                if let Some(g) = cmd.param("gamma") {
                    canvas.tick(p, g, 8.0, MARKER);
                }
            }
        }
        SkillKind::Cut => {
            if let (Some(t), Some(dx), Some(dy)) = (cmd.target_point(), cmd.param("dir_x"), cmd.param("dir_y")) {
                let p = round_px(t);
                let reach = 14.0;
                let off = Pixel::new((-dy * reach).round() as i32, (dx * reach).round() as i32);
                canvas.thick_line(p.offset(-off.x, -off.y), p.offset(off.x, off.y), WHITE);
            }
        }
        SkillKind::Dip => {
            if let Some(t) = cmd.target_point() {
                canvas.cross(round_px(t), 4, WHITE);
            }
        }
    }
}

pub fn draw_plan(canvas: &mut Canvas, sequence: &SkillSequence) {
    for cmd in &sequence.commands {
        draw_command(canvas, cmd);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plate::{FoodCategory, FoodMask};
    use crate::skills::param_push;

    #[test]
    fn png_has_signature_and_is_stable() {
        let mut c = Canvas::new(16, 8, BACKGROUND);
        c.arrow(Pixel::new(1, 1), Pixel::new(14, 6), WHITE);
        let a = c.to_png().unwrap();
        assert_eq!(&a[..8], b"\x89PNG\r\n\x1a\n");
        assert_eq!(a, c.to_png().unwrap());
    }

    #[test]
    fn drawing_clips_at_edges() {
        let mut c = Canvas::new(10, 10, BLACK);
        c.dot(Pixel::new(0, 0), 3, WHITE);
        c.line(Pixel::new(-5, 5), Pixel::new(20, 5), WHITE);
        assert_eq!(c.get(Pixel::new(9, 5)), Some(WHITE));
        assert_eq!(c.to_rgba().len(), 400);
    }

    #[test]
    fn push_arrow_is_white() {
        let bed = FoodItem {
            instance_id: 1,
            label: "spaghetti".into(),
            category: FoodCategory::Noodles,
            mask: FoodMask::from_fn(100, 100, |p| p.dist2(Pixel::new(50, 50)) <= 900),
        };
        let ball = FoodItem {
            instance_id: 2,
            label: "meatball".into(),
            category: FoodCategory::MeatSeafood,
            mask: FoodMask::from_fn(100, 100, |p| p.dist2(Pixel::new(60, 50)) <= 25),
        };
        let cmd = param_push(&ball, &bed).unwrap();
        let mut c = Canvas::new(100, 100, BLACK);
        draw_command(&mut c, &cmd);
        let (_, end) = cmd.segment().unwrap();
        assert_eq!(c.get(round_px(end)), Some(WHITE));
    }
}
