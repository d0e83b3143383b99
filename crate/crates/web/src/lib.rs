//! Browser bindings: density heatmaps, planner overlays under adjustable
//! thresholds, and the efficiency-only pickup curve for the bundled plates.

use biteplan::geometry::density_map;
use biteplan::planner::plan_with_trace;
use biteplan::plate::parse_fixture;
use biteplan::render::{draw_heatmap, draw_plan, draw_plate};
use biteplan::sim::{default_step_cap, pickup_curve, run_episode};
use biteplan::{Planner, PlannerConfig, PlateState, SkillEffectConfig};
use wasm_bindgen::prelude::*;

const PLATES: [(&str, &str); 7] = [
    (
        "spaghetti_meatballs",
        include_str!("../../core/fixtures/plates/spaghetti_meatballs.txt"),
    ),
    (
        "fettuccine_chicken_broccoli",
        include_str!("../../core/fixtures/plates/fettuccine_chicken_broccoli.txt"),
    ),
    (
        "mashed_potatoes_sausage",
        include_str!("../../core/fixtures/plates/mashed_potatoes_sausage.txt"),
    ),
    (
        "oatmeal_strawberries",
        include_str!("../../core/fixtures/plates/oatmeal_strawberries.txt"),
    ),
    ("appetizer", include_str!("../../core/fixtures/plates/appetizer.txt")),
    ("dessert", include_str!("../../core/fixtures/plates/dessert.txt")),
    (
        "spaghetti_no_meatballs",
        include_str!("../../core/fixtures/preference/spaghetti_no_meatballs.txt"),
    ),
];

fn load(name: &str) -> Result<PlateState, JsError> {
    let (_, text) = PLATES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| JsError::new(&format!("unknown plate `{name}`")))?;
    parse_fixture(text).map_err(|e| JsError::new(&e.to_string()))
}

fn config(density_thresh: f64, entropy_thresh: f64) -> Result<PlannerConfig, JsError> {
    let cfg = PlannerConfig {
        density_thresh,
        entropy_thresh,
        ..PlannerConfig::default()
    };
    cfg.validate().map_err(|e| JsError::new(&e.to_string()))?;
    Ok(cfg)
}

#[wasm_bindgen]
pub fn plate_names() -> Vec<String> {
    PLATES.iter().map(|(n, _)| n.to_string()).collect()
}

/// `[width, height]` of a plate raster.
#[wasm_bindgen]
pub fn plate_size(name: &str) -> Result<Vec<u32>, JsError> {
    let s = load(name)?;
    Ok(vec![s.observation.width, s.observation.height])
}

/// `id label category` per item, one line each.
#[wasm_bindgen]
pub fn plate_items(name: &str) -> Result<String, JsError> {
    let s = load(name)?;
    Ok(s.items()
        .iter()
        .map(|i| format!("{} {} {}\n", i.instance_id, i.label, i.category.as_str()))
        .collect())
}

/// RGBA heatmap of one item's smoothed density, with the peak marked.
#[wasm_bindgen]
pub fn heatmap_rgba(name: &str, instance_id: u32, sigma: f64) -> Result<Vec<u8>, JsError> {
    let s = load(name)?;
    let item = s
        .item(instance_id)
        .ok_or_else(|| JsError::new(&format!("no item {instance_id}")))?;
    let d = density_map(&item.mask, sigma).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(draw_heatmap(&d).to_rgba())
}

/// RGBA plate drawing with every item's planned skills overlaid.
#[wasm_bindgen]
pub fn plan_overlay_rgba(name: &str, density_thresh: f64, entropy_thresh: f64) -> Result<Vec<u8>, JsError> {
    let s = load(name)?;
    let cfg = config(density_thresh, entropy_thresh)?;
    let mut canvas = draw_plate(&s);
    for item in s.items() {
        let (seq, _) =
            plan_with_trace(item, &s.others(item.instance_id), &cfg).map_err(|e| JsError::new(&e.to_string()))?;
        draw_plan(&mut canvas, &seq);
    }
    Ok(canvas.to_rgba())
}

/// One line per item: planned kinds, efficiency, peak density and entropy.
#[wasm_bindgen]
pub fn plan_text(name: &str, density_thresh: f64, entropy_thresh: f64) -> Result<String, JsError> {
    let s = load(name)?;
    let cfg = config(density_thresh, entropy_thresh)?;
    let mut out = String::new();
    for item in s.items() {
        let (seq, trace) =
            plan_with_trace(item, &s.others(item.instance_id), &cfg).map_err(|e| JsError::new(&e.to_string()))?;
        let num = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
        out.push_str(&format!(
            "{} #{}: {} (eff {}, density {}, entropy {})\n",
            item.label,
            item.instance_id,
            seq.kinds_string(),
            seq.efficiency(),
            num(trace.peak_density),
            num(trace.entropy)
        ));
    }
    Ok(out)
}

/// Cumulative bites after each action for the efficiency-only planner,
/// flattened as `[action, bites, action, bites, ...]`.
#[wasm_bindgen]
pub fn efficiency_curve(name: &str) -> Result<Vec<u32>, JsError> {
    let s = load(name)?;
    let cfg = PlannerConfig::default();
    let log = run_episode(
        &s,
        Planner::EfficiencyOnly,
        &cfg,
        &SkillEffectConfig::default(),
        default_step_cap(&s, &cfg),
    );
    if let Some(e) = log.error {
        return Err(JsError::new(&e));
    }
    Ok(pickup_curve(&log)
        .into_iter()
        .flat_map(|(a, b)| [a as u32, b as u32])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_plates_parse() {
        for name in plate_names() {
            let [w, h] = plate_size(&name).unwrap()[..] else {
                panic!()
            };
            let rgba = plan_overlay_rgba(&name, 0.6, 0.85).unwrap();
            assert_eq!(rgba.len(), (w * h * 4) as usize);
        }
    }

    #[test]
    fn thresholds_change_the_plan() {
        let loose = plan_text("fettuccine_chicken_broccoli", 0.6, 0.85).unwrap();
        let strict = plan_text("fettuccine_chicken_broccoli", 0.6, 0.99).unwrap();
        assert!(loose.contains("push,group,twirl"), "{loose}");
        assert_ne!(loose, strict);
    }

    #[test]
    fn curve_is_monotone() {
        let c = efficiency_curve("appetizer").unwrap();
        assert!(c.len() >= 2 && c.len().is_multiple_of(2));
        assert!(c.chunks(2).zip(c.chunks(2).skip(1)).all(|(a, b)| a[1] <= b[1]));
    }

    #[test]
    fn heatmap_has_canvas_size() {
        let rgba = heatmap_rgba("spaghetti_meatballs", 1, 10.0).unwrap();
        assert_eq!(rgba.len(), 200 * 200 * 4);
    }
}
