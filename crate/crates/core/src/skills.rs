//! The seven-skill library: turn a food item's mask geometry into a
//! parameterised command with symbolic utensil waypoints.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{
    centroid, crop_disc, densest_point, fill_holes, major_axis, nearest_boundary_point, normalize_deg_180,
    normalize_deg_360, plan_cut, sparsest_point_checked, GeometryError,
};
use crate::plate::{FoodCategory, FoodItem, FoodMask, Pixel};

/// Pitch with the tines pointing straight down at the plate.
pub const BETA_VERTICAL: f64 = 90.0;
/// Pitch with the tines parallel to the plate.
pub const BETA_TINES_HORIZONTAL: f64 = 0.0;
pub const TWIRL_REVOLUTIONS: f64 = 2.0;
pub const PUSH_APPROACH_OFFSET: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SkillKind {
    Skewer,
    Twirl,
    Scoop,
    Dip,
    Group,
    Push,
    Cut,
}

impl SkillKind {
    pub const ALL: [SkillKind; 7] = [
        SkillKind::Skewer,
        SkillKind::Twirl,
        SkillKind::Scoop,
        SkillKind::Dip,
        SkillKind::Group,
        SkillKind::Push,
        SkillKind::Cut,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SkillKind::Skewer => "skewer",
            SkillKind::Twirl => "twirl",
            SkillKind::Scoop => "scoop",
            SkillKind::Dip => "dip",
            SkillKind::Group => "group",
            SkillKind::Push => "push",
            SkillKind::Cut => "cut",
        }
    }

    pub fn is_acquisition(self) -> bool {
        matches!(
            self,
            SkillKind::Skewer | SkillKind::Twirl | SkillKind::Scoop | SkillKind::Dip
        )
    }
}

impl fmt::Display for SkillKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SkillKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SkillKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown skill `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZLevel {
    Approach,
    Surface,
    Lift,
}

impl ZLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            ZLevel::Approach => "approach",
            ZLevel::Surface => "surface",
            ZLevel::Lift => "lift",
        }
    }
}

/// Utensil tip pose in plate pixels with a symbolic height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtensilAction {
    pub x: f64,
    pub y: f64,
    pub z: ZLevel,
    pub beta_deg: f64,
    pub gamma_deg: f64,
    pub psi_deg: f64,
}

impl UtensilAction {
    fn new(x: f64, y: f64, z: ZLevel, beta: f64, gamma: f64, psi: f64) -> Self {
        Self {
            x,
            y,
            z,
            beta_deg: normalize_deg_360(beta),
            gamma_deg: normalize_deg_360(gamma),
            psi_deg: normalize_deg_360(psi),
        }
    }

    fn at(p: (f64, f64), z: ZLevel, beta: f64, gamma: f64) -> Self {
        Self::new(p.0, p.1, z, beta, gamma, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkillCommand {
    pub kind: SkillKind,
    pub target_item: u32,
    /// Ordered named parameters; the order is part of the log format.
    pub params: Vec<(&'static str, f64)>,
    pub waypoints: Vec<UtensilAction>,
}

impl SkillCommand {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }

    fn point(&self, x: &str, y: &str) -> Option<(f64, f64)> {
        Some((self.param(x)?, self.param(y)?))
    }

    /// Start and end of a linear motion (scoop, group, push).
    pub fn segment(&self) -> Option<((f64, f64), (f64, f64))> {
        Some((self.point("start_x", "start_y")?, self.point("end_x", "end_y")?))
    }

    /// The fork contact point of a point skill (skewer, twirl, dip, cut).
    pub fn target_point(&self) -> Option<(f64, f64)> {
        self.point("x", "y")
    }

    /// `skill <kind> item=<id> k=v ...` followed by one `wp` line per waypoint.
    pub fn to_log_lines(&self) -> Vec<String> {
        let mut head = format!("skill {} item={}", self.kind, self.target_item);
        for (k, v) in &self.params {
            head.push_str(&format!(" {k}={}", fmt_num(*v)));
        }
        let mut lines = vec![head];
        for wp in &self.waypoints {
            lines.push(format!(
                "wp {} {} {} {} {} {}",
                fmt_num(wp.x),
                fmt_num(wp.y),
                wp.z.as_str(),
                fmt_num(wp.beta_deg),
                fmt_num(wp.gamma_deg),
                fmt_num(wp.psi_deg)
            ));
        }
        lines
    }
}

/// Two decimals, with `-0.00` folded to `0.00`.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkillError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{skill} needs a {expected} item, got {found}")]
    WrongCategory {
        skill: SkillKind,
        expected: FoodCategory,
        found: FoodCategory,
    },
    #[error("dip needs a bite on the fork")]
    NoHeldItem,
    #[error("dip target {0} is not a sauce")]
    NonSauce(u32),
}

fn require(item: &FoodItem, skill: SkillKind, expected: FoodCategory) -> Result<(), SkillError> {
    if item.category != expected {
        return Err(SkillError::WrongCategory {
            skill,
            expected,
            found: item.category,
        });
    }
    Ok(())
}

fn xy(p: Pixel) -> (f64, f64) {
    (f64::from(p.x), f64::from(p.y))
}

fn require_nonempty(mask: &FoodMask) -> Result<(), SkillError> {
    if mask.is_empty() {
        return Err(GeometryError::EmptyMask.into());
    }
    Ok(())
}

/// Tine roll perpendicular to an axis at `axis_deg`, in `[0, 180)`.
pub fn tines_across(axis_deg: f64) -> f64 {
    normalize_deg_180(90.0 + axis_deg)
}

fn direction_deg(from: (f64, f64), to: (f64, f64)) -> f64 {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    if dx == 0.0 && dy == 0.0 {
        0.0
    } else {
        dy.atan2(dx).to_degrees()
    }
}

fn unit(from: (f64, f64), to: (f64, f64)) -> (f64, f64) {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let len = dx.hypot(dy);
    if len == 0.0 {
        (0.0, 0.0)
    } else {
        (dx / len, dy / len)
    }
}

/// Plunge at the centroid with tines across the major axis, then tilt the
/// tines horizontal on the way up.
pub fn param_skewer(item: &FoodItem) -> Result<SkillCommand, SkillError> {
    let target = centroid(&item.mask)?;
    let axis = major_axis(&item.mask)?;
    let gamma = tines_across(axis.angle_deg);
    let c = xy(target);
    Ok(SkillCommand {
        kind: SkillKind::Skewer,
        target_item: item.instance_id,
        params: vec![("x", c.0), ("y", c.1), ("theta", axis.angle_deg), ("gamma", gamma)],
        waypoints: vec![
            UtensilAction::at(c, ZLevel::Approach, BETA_VERTICAL, gamma),
            UtensilAction::at(c, ZLevel::Surface, BETA_VERTICAL, gamma),
            UtensilAction::at(c, ZLevel::Lift, BETA_TINES_HORIZONTAL, gamma),
        ],
    })
}

/// Twirl at the densest point; the tines cross the local strand direction,
/// estimated from the principal axis of a disc crop around that point.
pub fn param_twirl(item: &FoodItem, sigma: f64, crop_radius: f64) -> Result<SkillCommand, SkillError> {
    require(item, SkillKind::Twirl, FoodCategory::Noodles)?;
    require_nonempty(&item.mask)?;
    let target = densest_point(&item.mask, sigma)?;
    let crop = crop_disc(&item.mask, target, crop_radius);
    let local = if crop.is_empty() {
        0.0
    } else {
        major_axis(&crop)?.angle_deg
    };
    let gamma = tines_across(local);
    let c = xy(target);
    Ok(SkillCommand {
        kind: SkillKind::Twirl,
        target_item: item.instance_id,
        params: vec![
            ("x", c.0),
            ("y", c.1),
            ("theta", local),
            ("gamma", gamma),
            ("revolutions", TWIRL_REVOLUTIONS),
        ],
        waypoints: vec![
            UtensilAction::at(c, ZLevel::Approach, BETA_VERTICAL, gamma),
            UtensilAction::at(c, ZLevel::Surface, BETA_VERTICAL, gamma),
            UtensilAction::at(c, ZLevel::Lift, BETA_TINES_HORIZONTAL, gamma),
        ],
    })
}

fn obstruction_masks(others: &[FoodItem]) -> Vec<&FoodMask> {
    others
        .iter()
        .filter(|o| o.category != FoodCategory::Sauce)
        .map(|o| &o.mask)
        .collect()
}

/// Shortens `start` toward `end` so the segment is at most `max_len` long.
pub fn truncate_segment(start: (f64, f64), end: (f64, f64), max_len: f64) -> (f64, f64) {
    let (dx, dy) = (start.0 - end.0, start.1 - end.1);
    let len = dx.hypot(dy);
    if len <= max_len || len == 0.0 {
        return start;
    }
    let k = max_len / len;
    (end.0 + dx * k, end.1 + dy * k)
}

/// Scoop from the sparsest unobstructed boundary point toward the densest
/// point, no longer than `max_dist`.
pub fn param_scoop(
    item: &FoodItem,
    others: &[FoodItem],
    sigma: f64,
    max_dist: f64,
) -> Result<SkillCommand, SkillError> {
    require(item, SkillKind::Scoop, FoodCategory::Semisolid)?;
    require_nonempty(&item.mask)?;
    let densest = densest_point(&item.mask, sigma)?;
    let (sparse, _) = sparsest_point_checked(&item.mask, densest, &obstruction_masks(others))?;
    let end = xy(densest);
    let start = truncate_segment(xy(sparse), end, max_dist);
    let heading = direction_deg(start, end);
    Ok(SkillCommand {
        kind: SkillKind::Scoop,
        target_item: item.instance_id,
        params: vec![
            ("start_x", start.0),
            ("start_y", start.1),
            ("end_x", end.0),
            ("end_y", end.1),
        ],
        waypoints: vec![
            UtensilAction::at(start, ZLevel::Approach, BETA_TINES_HORIZONTAL, heading),
            UtensilAction::at(start, ZLevel::Surface, BETA_TINES_HORIZONTAL, heading),
            UtensilAction::at(end, ZLevel::Surface, BETA_TINES_HORIZONTAL, heading),
            UtensilAction::at(end, ZLevel::Lift, BETA_TINES_HORIZONTAL, heading),
        ],
    })
}

/// Dip command with an optional held item. The sequencer plans dips before a
/// bite exists; the simulator checks the fork when it executes them.
pub fn dip_command(held_item: Option<u32>, sauce: &FoodItem) -> Result<SkillCommand, SkillError> {
    if sauce.category != FoodCategory::Sauce {
        return Err(SkillError::NonSauce(sauce.instance_id));
    }
    let c = xy(centroid(&sauce.mask)?);
    let mut params = vec![("x", c.0), ("y", c.1)];
    if let Some(held) = held_item {
        params.push(("held", f64::from(held)));
    }
    Ok(SkillCommand {
        kind: SkillKind::Dip,
        target_item: sauce.instance_id,
        params,
        waypoints: vec![
            UtensilAction::at(c, ZLevel::Approach, BETA_TINES_HORIZONTAL, 0.0),
            UtensilAction::at(c, ZLevel::Surface, BETA_TINES_HORIZONTAL, 0.0),
            UtensilAction::at(c, ZLevel::Lift, BETA_TINES_HORIZONTAL, 0.0),
        ],
    })
}

pub fn param_dip(held_item: Option<u32>, sauce: &FoodItem) -> Result<SkillCommand, SkillError> {
    if sauce.category != FoodCategory::Sauce {
        return Err(SkillError::NonSauce(sauce.instance_id));
    }
    let held = held_item.ok_or(SkillError::NoHeldItem)?;
    dip_command(Some(held), sauce)
}

/// Linear sweep from the sparsest point to the densest point.
pub fn param_group(item: &FoodItem, others: &[FoodItem], sigma: f64) -> Result<SkillCommand, SkillError> {
    require(item, SkillKind::Group, FoodCategory::Noodles)?;
    require_nonempty(&item.mask)?;
    let densest = densest_point(&item.mask, sigma)?;
    let (sparse, _) = sparsest_point_checked(&item.mask, densest, &obstruction_masks(others))?;
    Ok(linear_sweep(
        SkillKind::Group,
        item.instance_id,
        xy(sparse),
        xy(densest),
        true,
    ))
}

fn linear_sweep(kind: SkillKind, target: u32, start: (f64, f64), end: (f64, f64), lift: bool) -> SkillCommand {
    let dir = unit(start, end);
    let gamma = tines_across(direction_deg(start, end));
    let mut waypoints = vec![
        UtensilAction::at(start, ZLevel::Approach, BETA_VERTICAL, gamma),
        UtensilAction::at(start, ZLevel::Surface, BETA_VERTICAL, gamma),
        UtensilAction::at(end, ZLevel::Surface, BETA_VERTICAL, gamma),
    ];
    if lift {
        waypoints.push(UtensilAction::at(end, ZLevel::Lift, BETA_VERTICAL, gamma));
    }
    SkillCommand {
        kind,
        target_item: target,
        params: vec![
            ("start_x", start.0),
            ("start_y", start.1),
            ("end_x", end.0),
            ("end_y", end.1),
            ("dir_x", dir.0),
            ("dir_y", dir.1),
        ],
        waypoints,
    }
}

/// Push `topping` off `bed` toward the bed boundary nearest to it.
///
/// The bed is taken with its holes filled, so a topping occluding the middle
/// of a bed is pushed toward the outer rim. The fork starts a fixed offset
/// behind the topping centroid and ends one topping radius past the rim
/// (further if the bed is concave there), clamped to the plate. A topping
/// that does not touch the filled bed gets a zero-length push.
pub fn param_push(topping: &FoodItem, bed: &FoodItem) -> Result<SkillCommand, SkillError> {
    require_nonempty(&topping.mask)?;
    require_nonempty(&bed.mask)?;
    let c = centroid(&topping.mask)?;
    let footprint = fill_holes(&bed.mask);
    let mut cmd = if !topping.mask.intersects(&footprint) {
        linear_sweep(SkillKind::Push, topping.instance_id, xy(c), xy(c), false)
    } else {
        let boundary = nearest_boundary_point(&footprint, c)?;
        let mut dir = unit(xy(c), xy(boundary));
        if dir == (0.0, 0.0) {
            let bc = centroid(&bed.mask)?;
            dir = unit(xy(bc), xy(c));
            if dir == (0.0, 0.0) {
                dir = (1.0, 0.0);
            }
        }
        let radius = (topping.mask.area() as f64 / std::f64::consts::PI).sqrt();
        let start = (
            f64::from(c.x) - PUSH_APPROACH_OFFSET * dir.0,
            f64::from(c.y) - PUSH_APPROACH_OFFSET * dir.1,
        );
        let (w, h) = (f64::from(bed.mask.width() - 1), f64::from(bed.mask.height() - 1));
        let clamp = |p: (f64, f64)| (p.0.clamp(0.0, w), p.1.clamp(0.0, h));
        let mut extend = radius;
        let mut end = clamp((
            f64::from(boundary.x) + extend * dir.0,
            f64::from(boundary.y) + extend * dir.1,
        ));
        let limit = f64::from(bed.mask.width().max(bed.mask.height()));
        while footprint.get(round_px(end)) && extend < limit {
            extend += 1.0;
            end = clamp((
                f64::from(boundary.x) + extend * dir.0,
                f64::from(boundary.y) + extend * dir.1,
            ));
        }
        linear_sweep(SkillKind::Push, topping.instance_id, clamp(start), end, false)
    };
    cmd.params.push(("bed", f64::from(bed.instance_id)));
    Ok(cmd)
}

pub fn round_px(p: (f64, f64)) -> Pixel {
    Pixel::new(p.0.round() as i32, p.1.round() as i32)
}

/// Slice a bite off the row-major-first end of the major axis.
pub fn param_cut(item: &FoodItem, bite_length: f64) -> Result<SkillCommand, SkillError> {
    require(item, SkillKind::Cut, FoodCategory::Cuttable)?;
    let plan = plan_cut(&item.mask, bite_length)?;
    let c = xy(plan.point);
    let psi = plan.angle_deg;
    let wp = |z| UtensilAction::new(c.0, c.1, z, BETA_VERTICAL, 90.0, psi);
    Ok(SkillCommand {
        kind: SkillKind::Cut,
        target_item: item.instance_id,
        params: vec![
            ("x", c.0),
            ("y", c.1),
            ("theta", plan.axis.angle_deg),
            ("psi", psi),
            ("dir_x", plan.direction.0),
            ("dir_y", plan.direction.1),
            ("bite_length", bite_length),
        ],
        waypoints: vec![wp(ZLevel::Approach), wp(ZLevel::Surface)],
    })
}

/// Predicted piece that a cut at `cmd` separates from `mask`: the pixels on
/// the extremity side of the cut line.
pub fn cut_piece(mask: &FoodMask, cmd: &SkillCommand) -> Option<(FoodMask, FoodMask)> {
    let (cx, cy) = cmd.target_point()?;
    let (ux, uy) = (cmd.param("dir_x")?, cmd.param("dir_y")?);
    let (mut piece, mut rest) = (
        FoodMask::new(mask.width(), mask.height()),
        FoodMask::new(mask.width(), mask.height()),
    );
    for p in mask.pixels() {
        let t = (f64::from(p.x) - cx) * ux + (f64::from(p.y) - cy) * uy;
        if t < 0.0 {
            piece.set(p, true);
        } else {
            rest.set(p, true);
        }
    }
    Some((piece, rest))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: u32, label: &str, category: FoodCategory, mask: FoodMask) -> FoodItem {
        FoodItem {
            instance_id: id,
            label: label.into(),
            category,
            mask,
        }
    }

    fn rect(x0: i32, y0: i32, w: i32, h: i32) -> FoodMask {
        FoodMask::from_fn(200, 200, |p| (x0..x0 + w).contains(&p.x) && (y0..y0 + h).contains(&p.y))
    }

    #[test]
    fn skewer_horizontal_carrot() {
        let carrot = item(1, "carrot", FoodCategory::Vegetable, rect(50, 50, 40, 10));
        let cmd = param_skewer(&carrot).unwrap();
        assert_eq!(cmd.param("gamma"), Some(90.0));
        let c = centroid(&carrot.mask).unwrap();
        assert_eq!(cmd.target_point(), Some((f64::from(c.x), f64::from(c.y))));
        assert_eq!(cmd.waypoints.first().unwrap().z, ZLevel::Approach);
        let last = cmd.waypoints.last().unwrap();
        assert_eq!(last.z, ZLevel::Lift);
        assert_eq!(last.beta_deg, BETA_TINES_HORIZONTAL);
    }

    #[test]
    fn skewer_single_pixel() {
        let pea = item(
            2,
            "pea",
            FoodCategory::Vegetable,
            FoodMask::from_pixels(200, 200, [Pixel::new(7, 9)]),
        );
        let cmd = param_skewer(&pea).unwrap();
        assert_eq!(cmd.param("gamma"), Some(90.0));
        assert_eq!(cmd.target_point(), Some((7.0, 9.0)));
        let empty = item(3, "pea", FoodCategory::Vegetable, FoodMask::new(200, 200));
        assert!(param_skewer(&empty).is_err());
    }

    #[test]
    fn twirl_band() {
        let band = item(1, "spaghetti", FoodCategory::Noodles, rect(20, 90, 160, 20));
        let cmd = param_twirl(&band, 10.0, 30.0).unwrap();
        assert!((cmd.param("gamma").unwrap() - 90.0).abs() < 2.0);
        assert_eq!(cmd.param("revolutions"), Some(2.0));
        let (x, y) = cmd.target_point().unwrap();
        assert!((50.0..=149.0).contains(&x) && (90.0..110.0).contains(&y));
        let dot = item(
            2,
            "ramen",
            FoodCategory::Noodles,
            FoodMask::from_pixels(200, 200, [Pixel::new(3, 4)]),
        );
        let cmd = param_twirl(&dot, 10.0, 30.0).unwrap();
        assert_eq!(cmd.target_point(), Some((3.0, 4.0)));
        assert_eq!(cmd.param("revolutions"), Some(2.0));
    }

    #[test]
    fn twirl_rejects_non_noodles() {
        let x = item(1, "rice", FoodCategory::Semisolid, rect(0, 0, 5, 5));
        assert!(matches!(
            param_twirl(&x, 3.0, 10.0),
            Err(SkillError::WrongCategory { .. })
        ));
    }

    #[test]
    fn scoop_truncates_to_max_dist() {
        let bar = item(1, "potato", FoodCategory::Semisolid, rect(20, 90, 160, 12));
        let cmd = param_scoop(&bar, &[], 10.0, 60.0).unwrap();
        let (s, e) = cmd.segment().unwrap();
        let len = (s.0 - e.0).hypot(s.1 - e.1);
        assert!((len - 60.0).abs() < 1e-9, "{len}");
        assert_eq!(cmd.waypoints[0].beta_deg, BETA_TINES_HORIZONTAL);
    }

    #[test]
    fn dip_preconditions() {
        let sauce = item(5, "chocolate sauce", FoodCategory::Sauce, rect(150, 150, 20, 20));
        let cmd = param_dip(Some(1), &sauce).unwrap();
        let c = centroid(&sauce.mask).unwrap();
        assert_eq!(cmd.target_point(), Some((f64::from(c.x), f64::from(c.y))));
        assert_eq!(cmd.waypoints[0].beta_deg, BETA_TINES_HORIZONTAL);
        assert_eq!(param_dip(None, &sauce), Err(SkillError::NoHeldItem));
        let veg = item(6, "carrot", FoodCategory::Vegetable, rect(10, 10, 5, 5));
        assert_eq!(param_dip(Some(1), &veg), Err(SkillError::NonSauce(6)));
    }

    #[test]
    fn group_direction_is_unit() {
        let mut m = rect(20, 20, 30, 30);
        for p in rect(140, 140, 8, 8).pixels() {
            m.set(p, true);
        }
        let noodles = item(1, "noodles", FoodCategory::Noodles, m);
        let cmd = param_group(&noodles, &[], 10.0).unwrap();
        let (s, e) = cmd.segment().unwrap();
        let d = (cmd.param("dir_x").unwrap(), cmd.param("dir_y").unwrap());
        assert!((d.0.hypot(d.1) - 1.0).abs() < 1e-12);
        let len = (e.0 - s.0).hypot(e.1 - s.1);
        assert!(((e.0 - s.0) / len - d.0).abs() < 1e-12);
        // The far blob's boundary is the start.
        assert!(s.0 >= 140.0 && s.1 >= 140.0);
        assert!(e.0 < 50.0 && e.1 < 50.0);
    }

    #[test]
    fn group_on_dirac_is_degenerate() {
        let dot = item(
            1,
            "noodles",
            FoodCategory::Noodles,
            FoodMask::from_pixels(200, 200, [Pixel::new(9, 9)]),
        );
        let cmd = param_group(&dot, &[], 10.0).unwrap();
        let (s, e) = cmd.segment().unwrap();
        assert_eq!(s, e);
        assert_eq!(cmd.param("dir_x"), Some(0.0));
    }

    #[test]
    fn push_meatball_off_spaghetti() {
        let bed_mask = FoodMask::from_fn(200, 200, |p| {
            p.dist2(Pixel::new(100, 100)) <= 45 * 45 && p.dist2(Pixel::new(110, 100)) > 64
        });
        let bed = item(1, "spaghetti", FoodCategory::Noodles, bed_mask);
        let ball = item(
            2,
            "meatball",
            FoodCategory::MeatSeafood,
            FoodMask::from_fn(200, 200, |p| p.dist2(Pixel::new(110, 100)) <= 64),
        );
        let cmd = param_push(&ball, &bed).unwrap();
        let (s, e) = cmd.segment().unwrap();
        assert!(!bed.mask.get(round_px(e)));
        // Nearest boundary is to the right of the meatball.
        assert!(e.0 > 145.0, "{e:?}");
        assert!(s.0 < 110.0);
        assert_eq!(cmd.waypoints.last().unwrap().z, ZLevel::Surface);
    }

    #[test]
    fn push_of_topping_beside_bed_is_zero_length() {
        let bed = item(1, "spaghetti", FoodCategory::Noodles, rect(10, 10, 40, 40));
        let ball = item(2, "meatball", FoodCategory::MeatSeafood, rect(150, 150, 10, 10));
        let cmd = param_push(&ball, &bed).unwrap();
        let (s, e) = cmd.segment().unwrap();
        assert_eq!(s, e);
    }

    #[test]
    fn cut_banana() {
        let banana = item(1, "banana", FoodCategory::Cuttable, rect(30, 95, 121, 14));
        let cmd = param_cut(&banana, 40.0).unwrap();
        assert_eq!(cmd.waypoints[0].beta_deg, 90.0);
        assert_eq!(cmd.waypoints[0].gamma_deg, 90.0);
        assert!((cmd.param("x").unwrap() - 70.0).abs() <= 1.0);
        assert!((cmd.param("psi").unwrap() - 90.0).abs() < 1e-9);
        let (piece, rest) = cut_piece(&banana.mask, &cmd).unwrap();
        assert_eq!(piece.area() + rest.area(), banana.mask.area());
        let brownie = item(2, "brownie", FoodCategory::Cuttable, rect(10, 10, 31, 20));
        assert!(matches!(
            param_cut(&brownie, 40.0),
            Err(SkillError::Geometry(GeometryError::TooShort { .. }))
        ));
    }

    #[test]
    fn log_lines() {
        let carrot = item(4, "carrot", FoodCategory::Vegetable, rect(10, 10, 40, 10));
        let lines = param_skewer(&carrot).unwrap().to_log_lines();
        assert_eq!(lines[0], "skill skewer item=4 x=30.00 y=15.00 theta=0.00 gamma=90.00");
        assert_eq!(lines[1], "wp 30.00 15.00 approach 90.00 90.00 0.00");
        assert_eq!(lines.len(), 4);
    }
}
