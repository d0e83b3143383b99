//! Closed-loop meal simulation: execute skill sequences against the plate,
//! re-perceive after every bite and log the pickup curve.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{centroid, fill_holes, GeometryError};
use crate::llm::LlmTransport;
use crate::planner::{PlanError, PlannerConfig};
use crate::plate::{FoodCategory, FoodItem, FoodMask, HeldBite, Pixel, PlateState};
use crate::portions::estimate_portions;
use crate::sequencer::{
    next_bite_efficiency_only, next_bite_flair, next_bite_preference_only, NextBite, SequencerContext, SequencerError,
};
use crate::skills::{
    cut_piece, dip_command, param_cut, param_group, param_push, param_scoop, param_skewer, param_twirl, round_px,
    SkillCommand, SkillError, SkillKind,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("no item with instance id {0}")]
    MissingInstance(u32),
    #[error("dip with nothing on the fork")]
    NothingHeld,
    #[error("no dipping sauce labelled `{0}`")]
    MissingDip(String),
    #[error("planner chose `{0}`, which has no plan")]
    UnplannedLabel(String),
    #[error("command is missing parameter `{0}`")]
    MissingParam(&'static str),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Skill(#[from] SkillError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sequencer(#[from] SequencerError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkillEffectConfig {
    pub twirl_radius: f64,
    pub scoop_width: f64,
    /// Indexed like `SkillKind::ALL`.
    pub success_prob: [f64; 7],
    pub rng_seed: u64,
}

impl Default for SkillEffectConfig {
    fn default() -> Self {
        Self {
            twirl_radius: 20.0,
            scoop_width: 12.0,
            success_prob: [1.0; 7],
            rng_seed: 0,
        }
    }
}

fn kind_index(kind: SkillKind) -> usize {
    SkillKind::ALL
        .iter()
        .position(|&k| k == kind)
        .expect("every kind is listed")
}

impl SkillEffectConfig {
    pub fn success_prob(&self, kind: SkillKind) -> f64 {
        self.success_prob[kind_index(kind)]
    }

    pub fn set_success_prob(&mut self, kind: SkillKind, p: f64) {
        self.success_prob[kind_index(kind)] = p.clamp(0.0, 1.0);
    }

    pub fn is_deterministic(&self) -> bool {
        self.success_prob.iter().all(|&p| p >= 1.0)
    }
}

/// What one executed command did to the plate.
#[derive(Debug, Clone)]
pub struct SkillOutcome {
    pub state: PlateState,
    pub removed_area: usize,
    pub removed_instances: usize,
    /// Label picked up by an acquisition.
    pub acquired: Option<String>,
    /// `(piece, remainder)` ids created by a cut.
    pub split: Option<(u32, u32)>,
}

fn require_item(state: &PlateState, id: u32) -> Result<&FoodItem, SimError> {
    state.item(id).ok_or(SimError::MissingInstance(id))
}

fn replace_mask(state: &mut PlateState, id: u32, mask: FoodMask) {
    let items = &mut state.observation.items;
    if mask.is_empty() {
        items.retain(|i| i.instance_id != id);
    } else if let Some(item) = items.iter_mut().find(|i| i.instance_id == id) {
        item.mask = mask;
    }
}

/// Removes at least `min(candidates, portion)` pixels, nearest first, and
/// always enough to drop the item's portion count by one.
fn take_portion(mask: &FoodMask, mut in_region: Vec<(i64, Pixel)>, anchor: Pixel, portion: usize) -> FoodMask {
    let area = mask.area();
    let portion = portion.max(1);
    let drop_one = area - (area.div_ceil(portion) - 1) * portion;
    let count = in_region.len().min(portion).max(drop_one).min(area);
    let mut order: Vec<(i64, Pixel)> = if count <= in_region.len() {
        in_region.sort_unstable();
        in_region
    } else {
        let mut all: Vec<(i64, Pixel)> = mask.pixels().map(|p| (p.dist2(anchor), p)).collect();
        all.sort_unstable();
        all
    };
    order.truncate(count);
    let mut out = mask.clone();
    for (_, p) in order {
        out.set(p, false);
    }
    out
}

fn point_segment_dist2(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    qx * qx + qy * qy
}

/// Largest shift along (dx, dy) no greater than requested that keeps the
/// mask's bounding box on the plate.
fn clamp_shift(mask: &FoodMask, dx: i32, dy: i32) -> (i32, i32) {
    let Some((lo, hi)) = mask.bbox() else {
        return (0, 0);
    };
    let (w, h) = (mask.width() as i32, mask.height() as i32);
    (dx.clamp(-lo.x, w - 1 - hi.x), dy.clamp(-lo.y, h - 1 - hi.y))
}

fn twirl_effect(
    mask: &FoodMask,
    cmd: &SkillCommand,
    fx: &SkillEffectConfig,
    portion: usize,
) -> Result<FoodMask, SimError> {
    let (x, y) = cmd.target_point().ok_or(SimError::MissingParam("x"))?;
    let anchor = round_px((x, y));
    let r2 = fx.twirl_radius * fx.twirl_radius;
    let region = mask
        .pixels()
        .map(|p| (p.dist2(anchor), p))
        .filter(|&(d, _)| d as f64 <= r2)
        .collect();
    Ok(take_portion(mask, region, anchor, portion))
}

fn scoop_effect(
    mask: &FoodMask,
    cmd: &SkillCommand,
    fx: &SkillEffectConfig,
    portion: usize,
) -> Result<FoodMask, SimError> {
    let (a, b) = cmd.segment().ok_or(SimError::MissingParam("start_x"))?;
    let half = fx.scoop_width / 2.0;
    let anchor = round_px(b);
    let region = mask
        .pixels()
        .filter(|p| point_segment_dist2((f64::from(p.x), f64::from(p.y)), a, b) <= half * half)
        .map(|p| (p.dist2(anchor), p))
        .collect();
    Ok(take_portion(mask, region, anchor, portion))
}

/// Slides the half of the mask nearer the sweep start along the sweep until
/// it rests against the other half.
fn group_effect(mask: &FoodMask, cmd: &SkillCommand) -> Result<FoodMask, SimError> {
    let (a, b) = cmd.segment().ok_or(SimError::MissingParam("start_x"))?;
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len = dx.hypot(dy);
    if len < 1.0 {
        return Ok(mask.clone());
    }
    let u = (dx / len, dy / len);
    let mid = len / 2.0;
    let (w, h) = (mask.width(), mask.height());
    let mut sparse = FoodMask::new(w, h);
    let mut dense = FoodMask::new(w, h);
    for p in mask.pixels() {
        let t = (f64::from(p.x) - a.0) * u.0 + (f64::from(p.y) - a.1) * u.1;
        if t < mid {
            sparse.set(p, true);
        } else {
            dense.set(p, true);
        }
    }
    if sparse.is_empty() || dense.is_empty() {
        return Ok(mask.clone());
    }
    let area = sparse.area();
    let mut best = None;
    for k in 1..=len.ceil() as i32 {
        let (ox, oy) = ((f64::from(k) * u.0).round() as i32, (f64::from(k) * u.1).round() as i32);
        let moved = sparse.translated(ox, oy);
        if moved.area() != area || moved.intersects(&dense) {
            break;
        }
        best = Some(moved);
    }
    let Some(moved) = best else {
        return Ok(mask.clone());
    };
    let mut out = dense;
    for p in moved.pixels() {
        out.set(p, true);
    }
    Ok(out)
}

/// Moves the topping so its centroid lands on the push end point, then on
/// along the push until it is clear of the bed, never leaving the plate.
fn push_effect(state: &PlateState, topping: &FoodItem, cmd: &SkillCommand) -> Result<FoodMask, SimError> {
    let (_, end) = cmd.segment().ok_or(SimError::MissingParam("end_x"))?;
    let c = centroid(&topping.mask)?;
    let target = round_px(end);
    if cmd.segment().map(|(s, e)| s == e).unwrap_or(true) {
        return Ok(topping.mask.clone());
    }
    let bed = cmd
        .param("bed")
        .and_then(|id| state.item(id as u32))
        .map(|b| fill_holes(&b.mask));
    let (ux, uy) = (cmd.param("dir_x").unwrap_or(0.0), cmd.param("dir_y").unwrap_or(0.0));
    let (mut dx, mut dy) = clamp_shift(&topping.mask, target.x - c.x, target.y - c.y);
    let mut moved = topping.mask.translated(dx, dy);
    if let Some(bed) = bed {
        let limit = topping.mask.width().max(topping.mask.height()) as i32;
        let mut extra = 1;
        while moved.intersects(&bed) && extra <= limit {
            let step = round_px((f64::from(extra) * ux, f64::from(extra) * uy));
            let next = clamp_shift(&topping.mask, target.x - c.x + step.x, target.y - c.y + step.y);
            if next == (dx, dy) && extra > 1 {
                break;
            }
            (dx, dy) = next;
            moved = topping.mask.translated(dx, dy);
            extra += 1;
        }
    }
    Ok(moved)
}

/// Applies one command's geometric effect. Cuts mint two fresh instance
/// ids: the piece gets the lower one.
pub fn apply_skill(
    state: &PlateState,
    cmd: &SkillCommand,
    fx: &SkillEffectConfig,
    portion_size: f64,
) -> Result<SkillOutcome, SimError> {
    let target = require_item(state, cmd.target_item)?.clone();
    let portion = portion_size.round().max(1.0) as usize;
    let mut next = state.clone();
    let mut acquired = None;
    let mut split = None;
    match cmd.kind {
        SkillKind::Skewer => {
            next.observation.items.retain(|i| i.instance_id != target.instance_id);
            acquired = Some(target.label.clone());
        }
        SkillKind::Twirl => {
            replace_mask(
                &mut next,
                target.instance_id,
                twirl_effect(&target.mask, cmd, fx, portion)?,
            );
            acquired = Some(target.label.clone());
        }
        SkillKind::Scoop => {
            replace_mask(
                &mut next,
                target.instance_id,
                scoop_effect(&target.mask, cmd, fx, portion)?,
            );
            acquired = Some(target.label.clone());
        }
        SkillKind::Dip => {
            if target.category != FoodCategory::Sauce {
                return Err(SkillError::NonSauce(target.instance_id).into());
            }
            let held = next.held.as_mut().ok_or(SimError::NothingHeld)?;
            held.dipped_in = Some(target.label.clone());
        }
        SkillKind::Group => {
            replace_mask(&mut next, target.instance_id, group_effect(&target.mask, cmd)?);
        }
        SkillKind::Push => {
            let moved = push_effect(state, &target, cmd)?;
            replace_mask(&mut next, target.instance_id, moved);
        }
        SkillKind::Cut => {
            let (piece, rest) = cut_piece(&target.mask, cmd).ok_or(SimError::MissingParam("dir_x"))?;
            if !piece.is_empty() && !rest.is_empty() {
                let piece_id = state.next_instance_id();
                let rest_id = piece_id + 1;
                let pos = next
                    .observation
                    .items
                    .iter()
                    .position(|i| i.instance_id == target.instance_id)
                    .expect("target exists");
                next.observation.items.splice(
                    pos..=pos,
                    [
                        FoodItem {
                            instance_id: piece_id,
                            mask: piece,
                            ..target.clone()
                        },
                        FoodItem {
                            instance_id: rest_id,
                            mask: rest,
                            ..target.clone()
                        },
                    ],
                );
                split = Some((piece_id, rest_id));
            }
        }
    }
    if let Some(label) = &acquired {
        next.held = Some(HeldBite {
            label: label.clone(),
            dipped_in: None,
        });
    }
    let before_instances = state.items().len();
    let after_instances = next.items().len();
    Ok(SkillOutcome {
        removed_area: state.total_food_area().saturating_sub(next.total_food_area()),
        removed_instances: before_instances.saturating_sub(after_instances),
        state: next,
        acquired,
        split,
    })
}

/// Rebuilds a planned command against the plate as it is now.
fn reparameterize(
    state: &PlateState,
    planned: &SkillCommand,
    target: u32,
    cfg: &PlannerConfig,
    held_id: Option<u32>,
) -> Result<SkillCommand, SimError> {
    let item = require_item(state, target)?;
    let others = state.others(target);
    Ok(match planned.kind {
        SkillKind::Skewer => param_skewer(item)?,
        SkillKind::Twirl => param_twirl(item, cfg.sigma, cfg.crop_radius)?,
        SkillKind::Scoop => param_scoop(item, &others, cfg.sigma, cfg.scoop_max_dist)?,
        SkillKind::Group => param_group(item, &others, cfg.sigma)?,
        SkillKind::Cut => param_cut(item, cfg.bite_length)?,
        SkillKind::Push => {
            let bed_id = planned.param("bed").ok_or(SimError::MissingParam("bed"))? as u32;
            param_push(item, require_item(state, bed_id)?)?
        }
        SkillKind::Dip => {
            if state.held.is_none() {
                return Err(SimError::NothingHeld);
            }
            dip_command(held_id, item)?
        }
    })
}

/// Which next-bite policy drives the episode.
#[derive(Clone, Copy)]
pub enum Planner<'a> {
    Flair(&'a dyn LlmTransport),
    PreferenceOnly(&'a dyn LlmTransport),
    EfficiencyOnly,
}

impl Planner<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Planner::Flair(_) => "flair",
            Planner::PreferenceOnly(_) => "pref",
            Planner::EfficiencyOnly => "eff",
        }
    }

    pub fn next_bite(&self, ctx: &SequencerContext) -> Result<NextBite, SequencerError> {
        match self {
            Planner::Flair(llm) => next_bite_flair(ctx, *llm),
            Planner::PreferenceOnly(llm) => next_bite_preference_only(ctx, *llm),
            Planner::EfficiencyOnly => Ok(next_bite_efficiency_only(ctx)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    PlateEmpty,
    PlannerNoBite,
    StepCap,
    Aborted,
}

impl TerminationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationReason::PlateEmpty => "plate_empty",
            TerminationReason::PlannerNoBite => "planner_no_bite",
            TerminationReason::StepCap => "step_cap",
            TerminationReason::Aborted => "aborted",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    /// 1-based count of executed commands.
    pub action_index: usize,
    /// 1-based index of the bite decision this command belongs to.
    pub decision: usize,
    pub bite: NextBite,
    pub command: SkillCommand,
    pub success: bool,
    pub removed_area: usize,
    pub removed_instances: usize,
    pub bites_fed: usize,
    pub food_area: usize,
    pub instances: usize,
    pub portions: Vec<(String, u32)>,
}

#[derive(Debug, Clone)]
pub struct EpisodeLog {
    pub planner: String,
    pub initial_area: usize,
    pub initial_portions: u32,
    pub steps: Vec<StepRecord>,
    pub terminated_reason: TerminationReason,
    pub error: Option<String>,
    /// Bites in the order they were fed.
    pub fed: Vec<String>,
}

impl EpisodeLog {
    pub fn actions(&self) -> usize {
        self.steps.len()
    }

    pub fn bites_fed(&self) -> usize {
        self.steps.last().map_or(0, |s| s.bites_fed)
    }

    /// First acquisition: the bite and the number of actions it took.
    pub fn first_bite(&self) -> Option<(&NextBite, usize)> {
        self.steps
            .iter()
            .find(|s| s.bites_fed == 1)
            .map(|s| (&s.bite, s.action_index))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "episode planner={} initial_area={} initial_portions={}\n",
            self.planner, self.initial_area, self.initial_portions
        );
        for s in &self.steps {
            let portions: Vec<String> = s.portions.iter().map(|(l, n)| format!("{l}:{n}")).collect();
            let _ = writeln!(
                out,
                "step {} decision={} bite={} ok={} removed_area={} removed_instances={} bites_fed={} food_area={} portions={}",
                s.action_index,
                s.decision,
                s.bite.render_list(),
                u8::from(s.success),
                s.removed_area,
                s.removed_instances,
                s.bites_fed,
                s.food_area,
                portions.join(",")
            );
            for line in s.command.to_log_lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error {e}");
        }
        let _ = writeln!(
            out,
            "end reason={} actions={} bites={}",
            self.terminated_reason.as_str(),
            self.actions(),
            self.bites_fed()
        );
        out
    }
}

fn portions_snapshot(state: &PlateState, cfg: &PlannerConfig) -> Vec<(String, u32)> {
    estimate_portions(state, cfg)
        .into_iter()
        .map(|e| (e.label, e.portions))
        .collect()
}

fn dip_instance(state: &PlateState, label: &str) -> Result<u32, SimError> {
    state
        .dips_available()
        .into_iter()
        .filter(|d| d.label == label)
        .map(|d| d.instance_id)
        .min()
        .ok_or_else(|| SimError::MissingDip(label.to_string()))
}

struct Episode<'a> {
    cfg: &'a PlannerConfig,
    fx: &'a SkillEffectConfig,
    rng: ChaCha8Rng,
    state: PlateState,
    log: EpisodeLog,
    bites_fed: usize,
}

impl Episode<'_> {
    fn roll(&mut self, kind: SkillKind) -> bool {
        let p = self.fx.success_prob(kind);
        p >= 1.0 || self.rng.random::<f64>() < p
    }

    /// Runs one bite decision. Returns false once the step cap is hit.
    fn execute(
        &mut self,
        decision: usize,
        bite: &NextBite,
        planned: &[SkillCommand],
        cap: usize,
    ) -> Result<bool, SimError> {
        let mut target_override: Option<u32> = None;
        let mut acquired = false;
        let mut held_id = None;
        for planned_cmd in planned {
            if self.log.steps.len() >= cap {
                return Ok(false);
            }
            let target = match planned_cmd.kind {
                SkillKind::Skewer => target_override.take().unwrap_or(planned_cmd.target_item),
                _ => planned_cmd.target_item,
            };
            let cmd = reparameterize(&self.state, planned_cmd, target, self.cfg, held_id)?;
            let success = self.roll(cmd.kind);
            let (removed_area, removed_instances) = if success {
                let out = apply_skill(&self.state, &cmd, self.fx, self.cfg.portion_size)?;
                if let Some((piece, _)) = out.split {
                    target_override = Some(piece);
                }
                if out.acquired.is_some() {
                    acquired = true;
                    held_id = Some(cmd.target_item);
                    self.bites_fed += 1;
                }
                self.state = out.state;
                (out.removed_area, out.removed_instances)
            } else {
                (0, 0)
            };
            self.log.steps.push(StepRecord {
                action_index: self.log.steps.len() + 1,
                decision,
                bite: bite.clone(),
                command: cmd,
                success,
                removed_area,
                removed_instances,
                bites_fed: self.bites_fed,
                food_area: self.state.total_food_area(),
                instances: self.state.items().len(),
                portions: portions_snapshot(&self.state, self.cfg),
            });
            if !success {
                break;
            }
        }
        if acquired {
            let entry = match self.state.held.take() {
                Some(HeldBite {
                    label,
                    dipped_in: Some(d),
                }) => format!("{label} dipped in {d}"),
                Some(HeldBite { label, dipped_in: None }) => label,
                None => bite.item().unwrap_or_default().to_string(),
            };
            self.state.consumed_history.push(entry.clone());
            self.log.fed.push(entry);
        }
        self.state.held = None;
        Ok(true)
    }

    fn decide(
        &mut self,
        planner: &Planner<'_>,
        decision: usize,
        cap: usize,
    ) -> Result<Option<TerminationReason>, SimError> {
        if self.state.is_empty() {
            return Ok(Some(TerminationReason::PlateEmpty));
        }
        if self.log.steps.len() >= cap {
            return Ok(Some(TerminationReason::StepCap));
        }
        let (ctx, plans) = SequencerContext::from_state(&self.state, self.cfg)?;
        let bite = planner.next_bite(&ctx)?;
        let Some(label) = bite.item() else {
            return Ok(Some(TerminationReason::PlannerNoBite));
        };
        let plan = plans
            .iter()
            .find(|p| p.label == label)
            .ok_or_else(|| SimError::UnplannedLabel(label.to_string()))?;
        let mut commands = plan.sequence.commands.clone();
        if let Some(dip) = bite.dip() {
            let sauce_id = dip_instance(&self.state, dip)?;
            let sauce = require_item(&self.state, sauce_id)?;
            commands.push(dip_command(None, sauce)?);
        }
        if !self.execute(decision, &bite, &commands, cap)? {
            return Ok(Some(TerminationReason::StepCap));
        }
        Ok(None)
    }
}

/// MPC loop: perceive, choose a bite, plan it, execute, repeat.
pub fn run_episode(
    initial: &PlateState,
    planner: Planner<'_>,
    cfg: &PlannerConfig,
    fx: &SkillEffectConfig,
    step_cap: usize,
) -> EpisodeLog {
    let mut ep = Episode {
        cfg,
        fx,
        rng: ChaCha8Rng::seed_from_u64(fx.rng_seed),
        state: initial.clone(),
        log: EpisodeLog {
            planner: planner.name().to_string(),
            initial_area: initial.total_food_area(),
            initial_portions: estimate_portions(initial, cfg).iter().map(|e| e.portions).sum(),
            steps: Vec::new(),
            terminated_reason: TerminationReason::Aborted,
            error: None,
            fed: Vec::new(),
        },
        bites_fed: 0,
    };
    let mut decision = 0;
    loop {
        decision += 1;
        match ep.decide(&planner, decision, step_cap.max(1)) {
            Ok(None) => {}
            Ok(Some(reason)) => {
                ep.log.terminated_reason = reason;
                break;
            }
            Err(e) => {
                ep.log.terminated_reason = TerminationReason::Aborted;
                ep.log.error = Some(e.to_string());
                break;
            }
        }
    }
    ep.log
}

/// Bites fed after each executed action.
pub fn pickup_curve(log: &EpisodeLog) -> Vec<(usize, usize)> {
    log.steps.iter().map(|s| (s.action_index, s.bites_fed)).collect()
}

pub const CURVE_HEADER: &str = "action_index,bites_fed,planner,fixture";

pub fn curve_csv_rows(curve: &[(usize, usize)], planner: &str, fixture: &str) -> String {
    let mut out = String::new();
    for (a, b) in curve {
        let _ = writeln!(out, "{a},{b},{planner},{fixture}");
    }
    out
}

/// Value of a step curve at `action`, holding the last value past its end.
pub fn curve_at(curve: &[(usize, usize)], action: usize) -> usize {
    curve
        .iter()
        .take_while(|(a, _)| *a <= action)
        .last()
        .map_or(0, |&(_, b)| b)
}

/// Pointwise sum of several step curves over `1..=len`, each held at its
/// final value once it ends.
pub fn aggregate_curves(curves: &[Vec<(usize, usize)>]) -> Vec<(usize, usize)> {
    let len = curves.iter().map(|c| c.last().map_or(0, |p| p.0)).max().unwrap_or(0);
    (1..=len)
        .map(|a| (a, curves.iter().map(|c| curve_at(c, a)).sum()))
        .collect()
}

/// True when `hi` is at least `lo` at every action index of either curve.
pub fn dominates(hi: &[(usize, usize)], lo: &[(usize, usize)]) -> bool {
    let len = hi.last().map_or(0, |p| p.0).max(lo.last().map_or(0, |p| p.0));
    (1..=len).all(|a| curve_at(hi, a) >= curve_at(lo, a))
}

/// Default step budget: four actions per initial portion.
pub fn default_step_cap(state: &PlateState, cfg: &PlannerConfig) -> usize {
    let portions: u32 = estimate_portions(state, cfg).iter().map(|e| e.portions).sum();
    (4 * portions as usize).max(1)
}
