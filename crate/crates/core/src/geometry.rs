//! Pixel-level analyses over a single food mask: density heatmaps, entropy,
//! principal axes, boundary queries and segment obstruction tests.
//!
//! Angles are in degrees, measured from the +x (column) axis toward +y (row,
//! pointing down the image). Whenever several pixels attain an extremum the
//! smallest one in row-major order wins.

use thiserror::Error;

use crate::plate::{FoodMask, Pixel};

/// Gaussian weights are quantised to integers with this scale so the
/// separable convolution is exact and reproducible.
pub const WEIGHT_SCALE: f64 = (1u64 << 20) as f64;

/// Kernel half-width in units of sigma.
pub const TRUNCATE_SIGMAS: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("mask is empty")]
    EmptyMask,
    #[error("density map has no positive value")]
    AllZero,
    #[error("sigma must be positive, got {0}")]
    BadSigma(f64),
    #[error("major axis {axis_length:.1} px is not longer than bite length {bite_length:.1} px")]
    TooShort { axis_length: f64, bite_length: f64 },
}

/// One-sided integer Gaussian kernel: `w[i]` is the weight at offset `±i`.
pub fn gaussian_weights(sigma: f64) -> Vec<u64> {
    let radius = (TRUNCATE_SIGMAS * sigma).ceil() as usize;
    (0..=radius)
        .map(|i| {
            let d = i as f64;
            (WEIGHT_SCALE * (-(d * d) / (2.0 * sigma * sigma)).exp()).round() as u64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMap {
    pub width: u32,
    pub height: u32,
    /// Row-major, each value in `[0, 1]`.
    pub values: Vec<f64>,
    pub peak: Pixel,
    pub peak_value: f64,
}

impl DensityMap {
    /// Wraps externally computed values; the peak is the first maximum in
    /// row-major order.
    pub fn from_values(width: u32, height: u32, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), width as usize * height as usize);
        let mut best = 0usize;
        for (i, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = i;
            }
        }
        let w = width as usize;
        Self {
            width,
            height,
            peak: Pixel::new((best % w) as i32, (best / w) as i32),
            peak_value: values[best],
            values,
        }
    }

    pub fn get(&self, p: Pixel) -> f64 {
        if p.x < 0 || p.y < 0 || p.x as u32 >= self.width || p.y as u32 >= self.height {
            return 0.0;
        }
        self.values[p.y as usize * self.width as usize + p.x as usize]
    }
}

/// Gaussian-smoothed mask divided by the kernel mass, so a value of 1 means
/// the whole kernel footprint is covered by food.
pub fn density_map(mask: &FoodMask, sigma: f64) -> Result<DensityMap, GeometryError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(GeometryError::BadSigma(sigma));
    }
    let Some((lo, hi)) = mask.bbox() else {
        return Err(GeometryError::EmptyMask);
    };
    if mask.is_empty() {
        return Err(GeometryError::EmptyMask);
    }
    let weights = gaussian_weights(sigma);
    let radius = weights.len() as i32 - 1;
    let (w, h) = (mask.width() as i32, mask.height() as i32);
    let x0 = (lo.x - radius).max(0);
    let x1 = (hi.x + radius).min(w - 1);
    let y0 = (lo.y - radius).max(0);
    let y1 = (hi.y + radius).min(h - 1);
    let rw = (x1 - x0 + 1) as usize;

    // Horizontal pass restricted to the rows that contain food.
    let mut horiz = vec![0u64; rw * (hi.y - lo.y + 1) as usize];
    for y in lo.y..=hi.y {
        let row = mask.row(y as u32);
        let out = &mut horiz[(y - lo.y) as usize * rw..][..rw];
        for x in lo.x..=hi.x {
            if !row[x as usize] {
                continue;
            }
            let a = (x - radius).max(x0);
            let b = (x + radius).min(x1);
            for tx in a..=b {
                out[(tx - x0) as usize] += weights[(tx - x).unsigned_abs() as usize];
            }
        }
    }

    let mut raw = vec![0u64; w as usize * h as usize];
    let mut best: Option<(u64, Pixel)> = None;
    for y in y0..=y1 {
        let a = (y - radius).max(lo.y);
        let b = (y + radius).min(hi.y);
        for tx in 0..rw {
            let mut acc = 0u64;
            for sy in a..=b {
                acc += weights[(sy - y).unsigned_abs() as usize] * horiz[(sy - lo.y) as usize * rw + tx];
            }
            let x = x0 + tx as i32;
            raw[(y * w + x) as usize] = acc;
            if best.is_none_or(|(v, _)| acc > v) {
                best = Some((acc, Pixel::new(x, y)));
            }
        }
    }

    let one_side: u64 = weights[0] + 2 * weights[1..].iter().sum::<u64>();
    let norm = (one_side * one_side) as f64;
    let (best_raw, peak) = best.ok_or(GeometryError::EmptyMask)?;
    Ok(DensityMap {
        width: mask.width(),
        height: mask.height(),
        values: raw.into_iter().map(|v| v as f64 / norm).collect(),
        peak,
        peak_value: best_raw as f64 / norm,
    })
}

pub fn densest_point(mask: &FoodMask, sigma: f64) -> Result<Pixel, GeometryError> {
    Ok(density_map(mask, sigma)?.peak)
}

/// Shannon entropy of the sum-normalised heatmap over `ln(width * height)`.
pub fn entropy_2d(dmap: &DensityMap) -> Result<f64, GeometryError> {
    let total: f64 = dmap.values.iter().filter(|&&v| v > 0.0).sum();
    if total <= 0.0 {
        return Err(GeometryError::AllZero);
    }
    let cells = dmap.values.len();
    if cells <= 1 {
        return Ok(0.0);
    }
    let h: f64 = dmap
        .values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let p = v / total;
            -p * p.ln()
        })
        .sum();
    Ok((h / (cells as f64).ln()).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisEstimate {
    /// In `[0, 180)`.
    pub angle_deg: f64,
    /// Set pixels with the smallest and largest projection on the axis.
    pub endpoints: [Pixel; 2],
    pub axis_length: f64,
    /// The pixel covariance is isotropic (or the mask is a single pixel), so
    /// the angle is reported as 0.
    pub degenerate: bool,
}

impl AxisEstimate {
    pub fn direction(&self) -> (f64, f64) {
        let r = self.angle_deg.to_radians();
        (r.cos(), r.sin())
    }
}

pub fn normalize_deg_180(angle: f64) -> f64 {
    let a = angle.rem_euclid(180.0);
    if a >= 180.0 - 1e-12 {
        0.0
    } else {
        a
    }
}

pub fn normalize_deg_360(angle: f64) -> f64 {
    let a = angle.rem_euclid(360.0);
    if a >= 360.0 - 1e-12 {
        0.0
    } else {
        a
    }
}

fn mean_xy(mask: &FoodMask) -> Option<(f64, f64, usize)> {
    let (mut sx, mut sy, mut n) = (0i64, 0i64, 0usize);
    for p in mask.pixels() {
        sx += i64::from(p.x);
        sy += i64::from(p.y);
        n += 1;
    }
    (n > 0).then(|| (sx as f64 / n as f64, sy as f64 / n as f64, n))
}

/// First principal component of the set-pixel coordinates.
pub fn major_axis(mask: &FoodMask) -> Result<AxisEstimate, GeometryError> {
    let (mx, my, _) = mean_xy(mask).ok_or(GeometryError::EmptyMask)?;
    let (mut cxx, mut cyy, mut cxy) = (0.0, 0.0, 0.0);
    for p in mask.pixels() {
        let dx = f64::from(p.x) - mx;
        let dy = f64::from(p.y) - my;
        cxx += dx * dx;
        cyy += dy * dy;
        cxy += dx * dy;
    }
    let spread = (cxx - cyy).hypot(2.0 * cxy);
    let degenerate = spread <= 1e-9 * (cxx + cyy) || cxx + cyy == 0.0;
    let angle_deg = if degenerate {
        0.0
    } else {
        normalize_deg_180(0.5 * (2.0 * cxy).atan2(cxx - cyy).to_degrees())
    };
    let (ux, uy) = {
        let r = angle_deg.to_radians();
        (r.cos(), r.sin())
    };
    let mut lo: Option<(f64, Pixel)> = None;
    let mut hi: Option<(f64, Pixel)> = None;
    for p in mask.pixels() {
        let t = (f64::from(p.x) - mx) * ux + (f64::from(p.y) - my) * uy;
        if lo.is_none_or(|(v, _)| t < v) {
            lo = Some((t, p));
        }
        if hi.is_none_or(|(v, _)| t > v) {
            hi = Some((t, p));
        }
    }
    let (a, b) = (lo.unwrap().1, hi.unwrap().1);
    Ok(AxisEstimate {
        angle_deg,
        endpoints: [a, b],
        axis_length: a.dist(b),
        degenerate,
    })
}

/// Integer division rounding half up, for a positive denominator.
fn div_round(num: i64, den: i64) -> i64 {
    (2 * num + den).div_euclid(2 * den)
}

/// Rasterised straight segment. The endpoints are put in row-major order
/// first, so `line_pixels(a, b)` and `line_pixels(b, a)` visit the same set.
pub fn line_pixels(a: Pixel, b: Pixel) -> impl Iterator<Item = Pixel> {
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    let dx = i64::from(q.x - p.x);
    let dy = i64::from(q.y - p.y);
    let n = dx.abs().max(dy.abs());
    (0..=n).map(move |t| {
        if n == 0 {
            return p;
        }
        if dx.abs() >= dy.abs() {
            let x = i64::from(p.x) + t * dx.signum();
            let y = i64::from(p.y) + div_round(t * dy, n);
            Pixel::new(x as i32, y as i32)
        } else {
            let y = i64::from(p.y) + t * dy.signum();
            let x = i64::from(p.x) + div_round(t * dx, n);
            Pixel::new(x as i32, y as i32)
        }
    })
}

/// True iff any pixel of the rasterised segment `a`–`b` is set in `mask`.
pub fn segment_intersects_mask(a: Pixel, b: Pixel, mask: &FoodMask) -> bool {
    let Some((lo, hi)) = mask.bbox() else {
        return false;
    };
    if a.x.max(b.x) < lo.x || a.x.min(b.x) > hi.x || a.y.max(b.y) < lo.y || a.y.min(b.y) > hi.y {
        return false;
    }
    line_pixels(a, b).any(|p| mask.get(p))
}

/// Integer-rounded mean of the set-pixel coordinates.
pub fn centroid(mask: &FoodMask) -> Result<Pixel, GeometryError> {
    let (mut sx, mut sy, mut n) = (0i64, 0i64, 0i64);
    for p in mask.pixels() {
        sx += i64::from(p.x);
        sy += i64::from(p.y);
        n += 1;
    }
    if n == 0 {
        return Err(GeometryError::EmptyMask);
    }
    Ok(Pixel::new(div_round(sx, n) as i32, div_round(sy, n) as i32))
}

/// Farthest boundary pixel from `densest` whose segment to it avoids every
/// obstruction; falls back to the unconditionally farthest boundary pixel.
/// The flag reports whether an unobstructed pixel was found.
pub fn sparsest_point_checked(
    mask: &FoodMask,
    densest: Pixel,
    obstructions: &[&FoodMask],
) -> Result<(Pixel, bool), GeometryError> {
    let mut boundary = mask.boundary();
    if boundary.is_empty() {
        return Err(GeometryError::EmptyMask);
    }
    boundary.sort_by_key(|&p| (std::cmp::Reverse(p.dist2(densest)), p));
    let clear = boundary
        .iter()
        .copied()
        .find(|&p| !obstructions.iter().any(|o| segment_intersects_mask(p, densest, o)));
    Ok(match clear {
        Some(p) => (p, true),
        None => (boundary[0], false),
    })
}

pub fn sparsest_point(mask: &FoodMask, densest: Pixel, obstructions: &[&FoodMask]) -> Result<Pixel, GeometryError> {
    Ok(sparsest_point_checked(mask, densest, obstructions)?.0)
}

pub fn nearest_boundary_point(mask: &FoodMask, from: Pixel) -> Result<Pixel, GeometryError> {
    mask.boundary()
        .into_iter()
        .min_by_key(|&p| (p.dist2(from), p))
        .ok_or(GeometryError::EmptyMask)
}

/// Set pixel nearest to a real-valued point.
pub fn nearest_set_pixel(mask: &FoodMask, x: f64, y: f64) -> Option<Pixel> {
    let mut best: Option<(f64, Pixel)> = None;
    for p in mask.pixels() {
        let d = (f64::from(p.x) - x).powi(2) + (f64::from(p.y) - y).powi(2);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, p));
        }
    }
    best.map(|(_, p)| p)
}

/// Where to cut a bite of `bite_length` pixels off the row-major-first end
/// of the major axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CutPlan {
    pub point: Pixel,
    /// Orientation of the cut line, orthogonal to the major axis, in `[0, 180)`.
    pub angle_deg: f64,
    pub extremity: Pixel,
    /// Unit vector along the axis pointing away from `extremity`.
    pub direction: (f64, f64),
    pub axis: AxisEstimate,
}

pub fn plan_cut(mask: &FoodMask, bite_length: f64) -> Result<CutPlan, GeometryError> {
    let axis = major_axis(mask)?;
    if axis.axis_length <= bite_length {
        return Err(GeometryError::TooShort {
            axis_length: axis.axis_length,
            bite_length,
        });
    }
    let [a, b] = axis.endpoints;
    let (extremity, other) = if a <= b { (a, b) } else { (b, a) };
    let (mut ux, mut uy) = axis.direction();
    if f64::from(other.x - extremity.x) * ux + f64::from(other.y - extremity.y) * uy < 0.0 {
        ux = -ux;
        uy = -uy;
    }
    let tx = f64::from(extremity.x) + bite_length * ux;
    let ty = f64::from(extremity.y) + bite_length * uy;
    let point = nearest_set_pixel(mask, tx, ty).ok_or(GeometryError::EmptyMask)?;
    Ok(CutPlan {
        point,
        angle_deg: normalize_deg_180(axis.angle_deg + 90.0),
        extremity,
        direction: (ux, uy),
        axis,
    })
}

pub fn cut_point(mask: &FoodMask, bite_length: f64) -> Result<(Pixel, f64), GeometryError> {
    let plan = plan_cut(mask, bite_length)?;
    Ok((plan.point, plan.angle_deg))
}

/// `mask` with every enclosed hole filled: unset pixels that cannot reach the
/// raster edge through 4-connected unset pixels become set.
pub fn fill_holes(mask: &FoodMask) -> FoodMask {
    let (w, h) = (mask.width() as i32, mask.height() as i32);
    let mut outside = vec![false; (w * h) as usize];
    let mut stack = Vec::new();
    for x in 0..w {
        stack.push(Pixel::new(x, 0));
        stack.push(Pixel::new(x, h - 1));
    }
    for y in 0..h {
        stack.push(Pixel::new(0, y));
        stack.push(Pixel::new(w - 1, y));
    }
    while let Some(p) = stack.pop() {
        if !mask.in_bounds(p) || mask.get(p) {
            continue;
        }
        let i = (p.y * w + p.x) as usize;
        if outside[i] {
            continue;
        }
        outside[i] = true;
        stack.extend([p.offset(1, 0), p.offset(-1, 0), p.offset(0, 1), p.offset(0, -1)]);
    }
    FoodMask::from_fn(mask.width(), mask.height(), |p| !outside[(p.y * w + p.x) as usize])
}

/// The part of `mask` inside the closed disc of `radius` around `center`.
pub fn crop_disc(mask: &FoodMask, center: Pixel, radius: f64) -> FoodMask {
    let r2 = radius * radius;
    FoodMask::from_pixels(
        mask.width(),
        mask.height(),
        mask.pixels().filter(|p| p.dist2(center) as f64 <= r2),
    )
}

pub fn disc_intersects(mask: &FoodMask, center: Pixel, radius: f64) -> bool {
    let r2 = radius * radius;
    mask.pixels().any(|p| p.dist2(center) as f64 <= r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(w: u32, h: u32, x0: i32, y0: i32, rw: i32, rh: i32) -> FoodMask {
        FoodMask::from_fn(w, h, |p| (x0..x0 + rw).contains(&p.x) && (y0..y0 + rh).contains(&p.y))
    }

    #[test]
    fn dirac_peak_is_the_pixel() {
        let m = FoodMask::from_pixels(100, 100, [Pixel::new(50, 50)]);
        for sigma in [1.0, 4.0, 10.0] {
            let d = density_map(&m, sigma).unwrap();
            assert_eq!(d.peak, Pixel::new(50, 50));
        }
        assert_eq!(densest_point(&m, 10.0).unwrap(), Pixel::new(50, 50));
    }

    #[test]
    fn empty_mask_and_bad_sigma_rejected() {
        let m = FoodMask::new(10, 10);
        assert_eq!(density_map(&m, 3.0), Err(GeometryError::EmptyMask));
        let m = FoodMask::from_pixels(10, 10, [Pixel::new(1, 1)]);
        assert_eq!(density_map(&m, 0.0), Err(GeometryError::BadSigma(0.0)));
    }

    #[test]
    fn big_square_beats_small_square() {
        let mut m = rect(128, 128, 10, 10, 20, 20);
        for p in rect(128, 128, 90, 90, 4, 4).pixels() {
            m.set(p, true);
        }
        let peak = densest_point(&m, 10.0).unwrap();
        assert!((10..30).contains(&peak.x) && (10..30).contains(&peak.y), "{peak}");
    }

    #[test]
    fn symmetric_blobs_tie_break_row_major() {
        let mut m = rect(60, 60, 5, 10, 6, 6);
        for p in rect(60, 60, 45, 10, 6, 6).pixels() {
            m.set(p, true);
        }
        let d = density_map(&m, 2.0).unwrap();
        // Both blob centres share one row; the left one is first.
        assert!(d.peak.x < 30);
    }

    #[test]
    fn density_values_are_fractions_of_the_kernel() {
        let full = FoodMask::from_fn(80, 80, |_| true);
        let d = density_map(&full, 3.0).unwrap();
        assert!((d.peak_value - 1.0).abs() < 1e-12);
        assert!(d.values.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
        let dot = FoodMask::from_pixels(80, 80, [Pixel::new(40, 40)]);
        assert!(density_map(&dot, 3.0).unwrap().peak_value < 0.05);
    }

    #[test]
    fn entropy_limits() {
        let mut v = vec![0.0; 100];
        v[17] = 0.3;
        assert_eq!(entropy_2d(&DensityMap::from_values(10, 10, v)).unwrap(), 0.0);
        let u = DensityMap::from_values(10, 10, vec![0.25; 100]);
        assert!((entropy_2d(&u).unwrap() - 1.0).abs() < 1e-12);
        let zero = DensityMap::from_values(10, 10, vec![0.0; 100]);
        assert_eq!(entropy_2d(&zero), Err(GeometryError::AllZero));
    }

    #[test]
    fn half_plate_entropy() {
        let values: Vec<f64> = (0..10_000).map(|i| if i < 5000 { 0.5 } else { 0.0 }).collect();
        let e = entropy_2d(&DensityMap::from_values(100, 100, values)).unwrap();
        assert!((e - 5000f64.ln() / 10000f64.ln()).abs() < 1e-12);
        assert!((e - 0.9247).abs() < 1e-4);
    }

    #[test]
    fn smearing_a_dirac_raises_entropy() {
        let mut v = vec![0.0; 64];
        v[10] = 1.0;
        let point = entropy_2d(&DensityMap::from_values(8, 8, v.clone())).unwrap();
        v[11] = 1.0;
        let pair = entropy_2d(&DensityMap::from_values(8, 8, v)).unwrap();
        assert!(pair > point);
    }

    #[test]
    fn axis_aligned_rectangles() {
        let wide = major_axis(&rect(100, 100, 20, 40, 40, 10)).unwrap();
        assert!(wide.angle_deg.abs() < 1e-9, "{}", wide.angle_deg);
        assert!(!wide.degenerate);
        assert!((wide.axis_length - 39.0).abs() < 1e-9);
        let tall = major_axis(&rect(100, 100, 40, 20, 10, 40)).unwrap();
        assert!((tall.angle_deg - 90.0).abs() < 1e-9);
    }

    #[test]
    fn isotropic_masks_are_degenerate() {
        let sq = major_axis(&rect(50, 50, 10, 10, 10, 10)).unwrap();
        assert!(sq.degenerate);
        assert_eq!(sq.angle_deg, 0.0);
        let dot = major_axis(&FoodMask::from_pixels(9, 9, [Pixel::new(4, 4)])).unwrap();
        assert!(dot.degenerate);
        assert_eq!(dot.axis_length, 0.0);
        assert_eq!(major_axis(&FoodMask::new(3, 3)), Err(GeometryError::EmptyMask));
    }

    #[test]
    fn centroids() {
        let sq = rect(40, 40, 10, 10, 11, 11);
        assert_eq!(centroid(&sq).unwrap(), Pixel::new(15, 15));
        let dot = FoodMask::from_pixels(9, 9, [Pixel::new(3, 7)]);
        assert_eq!(centroid(&dot).unwrap(), Pixel::new(3, 7));
        assert_eq!(centroid(&FoodMask::new(3, 3)), Err(GeometryError::EmptyMask));
    }

    #[test]
    fn line_is_symmetric_and_connected() {
        let a = Pixel::new(3, 17);
        let b = Pixel::new(40, 2);
        let mut f: Vec<_> = line_pixels(a, b).collect();
        let mut r: Vec<_> = line_pixels(b, a).collect();
        f.sort();
        r.sort();
        assert_eq!(f, r);
        assert_eq!(f.len(), 38);
        assert_eq!(line_pixels(a, a).collect::<Vec<_>>(), vec![a]);
    }

    #[test]
    fn segment_tests() {
        let sq = rect(50, 50, 20, 20, 10, 10);
        assert!(!segment_intersects_mask(Pixel::new(0, 0), Pixel::new(10, 5), &sq));
        assert!(segment_intersects_mask(Pixel::new(0, 25), Pixel::new(49, 25), &sq));
        assert!(!segment_intersects_mask(
            Pixel::new(0, 0),
            Pixel::new(1, 1),
            &FoodMask::new(50, 50)
        ));
    }

    #[test]
    fn sparsest_on_a_bar() {
        let bar = rect(100, 20, 10, 5, 60, 6);
        let densest = Pixel::new(69, 7);
        assert_eq!(sparsest_point(&bar, densest, &[]).unwrap().x, 10);
        let dot = FoodMask::from_pixels(9, 9, [Pixel::new(4, 4)]);
        assert_eq!(sparsest_point(&dot, Pixel::new(4, 4), &[]).unwrap(), Pixel::new(4, 4));
    }

    #[test]
    fn sparsest_falls_back_when_everything_is_blocked() {
        let bar = rect(100, 20, 10, 5, 60, 6);
        let densest = Pixel::new(40, 7);
        let cover = rect(100, 20, 35, 0, 10, 20);
        let (p, clear) = sparsest_point_checked(&bar, densest, &[&cover]).unwrap();
        assert!(!clear);
        assert_eq!(p, sparsest_point(&bar, densest, &[]).unwrap());
    }

    #[test]
    fn nearest_boundary() {
        let sq = rect(50, 50, 10, 10, 20, 20);
        assert_eq!(
            nearest_boundary_point(&sq, Pixel::new(12, 20)).unwrap(),
            Pixel::new(10, 20)
        );
        assert_eq!(
            nearest_boundary_point(&sq, Pixel::new(29, 29)).unwrap(),
            Pixel::new(29, 29)
        );
    }

    #[test]
    fn holes_are_filled() {
        let ring = FoodMask::from_fn(30, 30, |p| {
            let d = p.dist2(Pixel::new(15, 15));
            (25..=100).contains(&d)
        });
        let filled = fill_holes(&ring);
        assert!(filled.get(Pixel::new(15, 15)));
        assert!(!filled.get(Pixel::new(0, 0)));
        assert_eq!(
            filled.area(),
            FoodMask::from_fn(30, 30, |p| p.dist2(Pixel::new(15, 15)) <= 100).area()
        );
    }

    #[test]
    fn cut_on_horizontal_bar() {
        let bar = rect(200, 40, 0, 10, 100, 10);
        let (p, angle) = cut_point(&bar, 40.0).unwrap();
        assert!((p.x - 40).abs() <= 1, "{p}");
        assert!((angle - 90.0).abs() < 1e-9);
        let short = rect(200, 40, 0, 10, 31, 10);
        assert!(matches!(cut_point(&short, 40.0), Err(GeometryError::TooShort { .. })));
    }
}
