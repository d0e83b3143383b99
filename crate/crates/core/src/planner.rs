//! Hierarchical acquisition planner: pick the skill sequence that gets one
//! bite of an item onto the fork. The sequence length is the item's
//! efficiency score (fewer actions is better).

use std::fmt;

use thiserror::Error;

use crate::geometry::{
    centroid, density_map, disc_intersects, entropy_2d, fill_holes, major_axis, nearest_boundary_point,
    segment_intersects_mask, sparsest_point_checked, GeometryError,
};
use crate::plate::{FoodCategory, FoodItem, FoodMask, Pixel};
use crate::skills::{
    dip_command, param_cut, param_group, param_push, param_scoop, param_skewer, param_twirl, round_px,
    truncate_segment, SkillCommand, SkillError, SkillKind,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    /// Peak smoothed density at or above which a pile is acquired directly.
    pub density_thresh: f64,
    /// Normalised entropy at or above which noodles count as spread out.
    pub entropy_thresh: f64,
    /// Pixels of major axis per bite for cuttable items.
    pub bite_length: f64,
    /// Pixel area of one bite of noodles or semisolid.
    pub portion_size: f64,
    pub sigma: f64,
    pub crop_radius: f64,
    pub scoop_max_dist: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            density_thresh: 0.6,
            entropy_thresh: 0.85,
            bite_length: 40.0,
            portion_size: 900.0,
            sigma: 10.0,
            crop_radius: 30.0,
            scoop_max_dist: 60.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{field} must be {rule}, got {value}")]
    Range {
        field: &'static str,
        rule: &'static str,
        value: f64,
    },
}

impl PlannerConfig {
    pub const FIELDS: [&'static str; 7] = [
        "density_thresh",
        "entropy_thresh",
        "bite_length",
        "portion_size",
        "sigma",
        "crop_radius",
        "scoop_max_dist",
    ];

    fn field_mut(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "density_thresh" => &mut self.density_thresh,
            "entropy_thresh" => &mut self.entropy_thresh,
            "bite_length" => &mut self.bite_length,
            "portion_size" => &mut self.portion_size,
            "sigma" => &mut self.sigma,
            "crop_radius" => &mut self.crop_radius,
            "scoop_max_dist" => &mut self.scoop_max_dist,
            _ => return None,
        })
    }

    /// Sets one field by name; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        let slot = self
            .field_mut(key)
            .ok_or_else(|| format!("unknown config key `{key}`"))?;
        *slot = value;
        Ok(())
    }

    /// Applies flat `key = value` overrides. `#` starts a comment.
    pub fn apply_overrides(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("bad number `{}`", value.trim())))?;
            self.set(key.trim(), value).map_err(err)?;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("density_thresh", self.density_thresh),
            ("entropy_thresh", self.entropy_thresh),
            ("bite_length", self.bite_length),
            ("portion_size", self.portion_size),
            ("sigma", self.sigma),
            ("crop_radius", self.crop_radius),
            ("scoop_max_dist", self.scoop_max_dist),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::Range {
                    field,
                    rule: "positive",
                    value,
                });
            }
        }
        if self.density_thresh > 1.0 {
            return Err(ConfigError::Range {
                field: "density_thresh",
                rule: "at most 1",
                value: self.density_thresh,
            });
        }
        if self.entropy_thresh >= 1.0 {
            return Err(ConfigError::Range {
                field: "entropy_thresh",
                rule: "below 1",
                value: self.entropy_thresh,
            });
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut c = self.clone();
        Self::FIELDS
            .iter()
            .map(|f| format!("{f} = {}\n", c.field_mut(f).map_or(0.0, |v| *v)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkillSequence {
    pub commands: Vec<SkillCommand>,
}

impl SkillSequence {
    /// Number of actions needed to get the bite.
    pub fn efficiency(&self) -> usize {
        self.commands.len()
    }

    pub fn kinds(&self) -> Vec<SkillKind> {
        self.commands.iter().map(|c| c.kind).collect()
    }

    pub fn kinds_string(&self) -> String {
        self.kinds().iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for SkillSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.kinds_string().replace(',', ", "))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("item {0} has an empty mask")]
    EmptyMask(u32),
    #[error("item {id}: {source}")]
    Skill {
        id: u32,
        #[source]
        source: SkillError,
    },
}

impl PlanError {
    fn skill(id: u32) -> impl Fn(SkillError) -> PlanError {
        move |source| PlanError::Skill { id, source }
    }
}

/// True when `topping` sits on `bed`: it touches the bed's footprint with
/// holes filled, so both overlapping masks and occlusion holes count.
pub fn rests_on(topping: &FoodItem, bed: &FoodItem) -> bool {
    topping.mask.intersects(&fill_holes(&bed.mask))
}

/// Number of angular perturbations each side of the base segment.
const CANDIDATE_STEPS: i32 = 4;
const CANDIDATE_STEP_DEG: f64 = 15.0;

/// The base segment `start`–`end` plus eight copies rotated about `end` in
/// 15 degree steps, with starts clamped to the plate.
pub fn segment_candidates(start: Pixel, end: Pixel, width: u32, height: u32) -> Vec<(Pixel, Pixel)> {
    let mut out = vec![(start, end)];
    let (vx, vy) = (f64::from(start.x - end.x), f64::from(start.y - end.y));
    for k in (-CANDIDATE_STEPS..=CANDIDATE_STEPS).filter(|&k| k != 0) {
        let a = (f64::from(k) * CANDIDATE_STEP_DEG).to_radians();
        let (c, s) = (a.cos(), a.sin());
        let x = (f64::from(end.x) + vx * c - vy * s)
            .round()
            .clamp(0.0, f64::from(width - 1));
        let y = (f64::from(end.y) + vx * s + vy * c)
            .round()
            .clamp(0.0, f64::from(height - 1));
        out.push((Pixel::new(x as i32, y as i32), end));
    }
    out
}

fn blocked_by<'a>(a: Pixel, b: Pixel, obstacles: &[&'a FoodItem]) -> Vec<&'a FoodItem> {
    obstacles
        .iter()
        .copied()
        .filter(|o| segment_intersects_mask(a, b, &o.mask))
        .collect()
}

/// Picks the topping nearest the bed's outer rim (centroid distance), ties
/// broken by row-major centroid then instance id.
fn choose_topping<'a>(candidates: &[&'a FoodItem], bed: &FoodItem) -> Result<&'a FoodItem, GeometryError> {
    let footprint = fill_holes(&bed.mask);
    let mut best: Option<((i64, Pixel, u32), &FoodItem)> = None;
    for &t in candidates {
        let c = centroid(&t.mask)?;
        let rim = nearest_boundary_point(&footprint, c)?;
        let key = (c.dist2(rim), c, t.instance_id);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, t));
        }
    }
    best.map(|(_, t)| t).ok_or(GeometryError::EmptyMask)
}

/// Why the planner took the branch it did; useful for reports and overlays.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanTrace {
    pub peak_density: Option<f64>,
    pub entropy: Option<f64>,
    pub pushed: Option<u32>,
    pub axis_length: Option<f64>,
}

pub fn plan_acquisition(item: &FoodItem, others: &[FoodItem], cfg: &PlannerConfig) -> Result<SkillSequence, PlanError> {
    plan_with_trace(item, others, cfg).map(|(s, _)| s)
}

pub fn efficiency_of(item: &FoodItem, others: &[FoodItem], cfg: &PlannerConfig) -> Result<usize, PlanError> {
    Ok(plan_acquisition(item, others, cfg)?.efficiency())
}

pub fn plan_with_trace(
    item: &FoodItem,
    others: &[FoodItem],
    cfg: &PlannerConfig,
) -> Result<(SkillSequence, PlanTrace), PlanError> {
    if item.mask.is_empty() {
        return Err(PlanError::EmptyMask(item.instance_id));
    }
    let id = item.instance_id;
    let err = PlanError::skill(id);
    let mut trace = PlanTrace {
        peak_density: None,
        entropy: None,
        pushed: None,
        axis_length: None,
    };
    let obstacles: Vec<&FoodItem> = others
        .iter()
        .filter(|o| o.category != FoodCategory::Sauce && o.instance_id != id)
        .collect();
    let obstacle_masks: Vec<&FoodMask> = obstacles.iter().map(|o| &o.mask).collect();
    let geo = |e: GeometryError| PlanError::Skill { id, source: e.into() };

    let mut commands = Vec::new();
    match item.category {
        FoodCategory::MeatSeafood | FoodCategory::Fruit | FoodCategory::Vegetable => {
            commands.push(param_skewer(item).map_err(&err)?);
        }
        FoodCategory::Sauce => {
            commands.push(dip_command(None, item).map_err(&err)?);
        }
        FoodCategory::Noodles => {
            let dmap = density_map(&item.mask, cfg.sigma).map_err(geo)?;
            let densest = dmap.peak;
            trace.peak_density = Some(dmap.peak_value);
            let mut push = None;
            let mut group = false;
            if dmap.peak_value >= cfg.density_thresh {
                let near: Vec<&FoodItem> = obstacles
                    .iter()
                    .copied()
                    .filter(|o| disc_intersects(&o.mask, densest, cfg.crop_radius) && rests_on(o, item))
                    .collect();
                if !near.is_empty() {
                    push = Some(choose_topping(&near, item).map_err(geo)?);
                }
            } else {
                let entropy = entropy_2d(&dmap).map_err(geo)?;
                trace.entropy = Some(entropy);
                if entropy >= cfg.entropy_thresh {
                    group = true;
                    let (sparse, _) = sparsest_point_checked(&item.mask, densest, &obstacle_masks).map_err(geo)?;
                    let candidates = segment_candidates(sparse, densest, item.mask.width(), item.mask.height());
                    let all_blocked = candidates
                        .iter()
                        .all(|&(a, b)| !blocked_by(a, b, &obstacles).is_empty());
                    if all_blocked {
                        let blockers = blocked_by(sparse, densest, &obstacles);
                        push = Some(choose_topping(&blockers, item).map_err(geo)?);
                    }
                } else {
                    let toppings: Vec<&FoodItem> = obstacles.iter().copied().filter(|o| rests_on(o, item)).collect();
                    if !toppings.is_empty() {
                        push = Some(choose_topping(&toppings, item).map_err(geo)?);
                    }
                }
            }
            if let Some(topping) = push {
                trace.pushed = Some(topping.instance_id);
                commands.push(param_push(topping, item).map_err(&err)?);
            }
            if group {
                commands.push(param_group(item, others, cfg.sigma).map_err(&err)?);
            }
            commands.push(param_twirl(item, cfg.sigma, cfg.crop_radius).map_err(&err)?);
        }
        FoodCategory::Semisolid => {
            let dmap = density_map(&item.mask, cfg.sigma).map_err(geo)?;
            let densest = dmap.peak;
            trace.peak_density = Some(dmap.peak_value);
            let (sparse, _) = sparsest_point_checked(&item.mask, densest, &obstacle_masks).map_err(geo)?;
            let start = round_px(truncate_segment(
                (f64::from(sparse.x), f64::from(sparse.y)),
                (f64::from(densest.x), f64::from(densest.y)),
                cfg.scoop_max_dist,
            ));
            let candidates = segment_candidates(start, densest, item.mask.width(), item.mask.height());
            let all_blocked = candidates
                .iter()
                .all(|&(a, b)| !blocked_by(a, b, &obstacles).is_empty());
            if all_blocked {
                let blockers = blocked_by(start, densest, &obstacles);
                let topping = choose_topping(&blockers, item).map_err(geo)?;
                trace.pushed = Some(topping.instance_id);
                commands.push(param_push(topping, item).map_err(&err)?);
            }
            commands.push(param_scoop(item, others, cfg.sigma, cfg.scoop_max_dist).map_err(&err)?);
        }
        FoodCategory::Cuttable => {
            let axis = major_axis(&item.mask).map_err(geo)?;
            trace.axis_length = Some(axis.axis_length);
            if axis.axis_length > cfg.bite_length {
                let cut = param_cut(item, cfg.bite_length).map_err(&err)?;
                let (piece, _) =
                    crate::skills::cut_piece(&item.mask, &cut).expect("cut commands carry a point and direction");
                let piece_item = FoodItem {
                    mask: if piece.is_empty() { item.mask.clone() } else { piece },
                    ..item.clone()
                };
                commands.push(cut);
                commands.push(param_skewer(&piece_item).map_err(&err)?);
            } else {
                commands.push(param_skewer(item).map_err(&err)?);
            }
        }
    }
    Ok((SkillSequence { commands }, trace))
}
