//! Shared checks for the integration suites and the acceptance report.
//! Each returns `Err` with a readable reason on the first violation.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use biteplan::geometry::{
    centroid, densest_point, density_map, entropy_2d, gaussian_weights, line_pixels, major_axis,
    nearest_boundary_point, segment_intersects_mask, sparsest_point,
};
use biteplan::llm::{load_cassette, ReplayTransport};
use biteplan::planner::plan_acquisition;
use biteplan::plate::load_fixture;
use biteplan::sequencer::{build_prompt, next_bite_efficiency_only, parse_and_validate, parse_response};
use biteplan::sim::{aggregate_curves, default_step_cap, dominates, pickup_curve, run_episode};
use biteplan::{
    EpisodeLog, FoodMask, NextBite, Pixel, Planner, PlannerConfig, PlateState, PreferenceSpec, SequencerContext,
    SequencerError, SkillEffectConfig, SkillKind, TerminationReason,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn txt_files(dir: &Path) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    out.sort();
    out
}

pub fn stem(path: &Path) -> String {
    path.file_stem().unwrap().to_string_lossy().into_owned()
}

pub fn load(path: &Path) -> PlateState {
    load_fixture(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn replay(name: &str) -> ReplayTransport {
    let path = fixtures().join("cassettes").join(format!("{name}.cassette"));
    ReplayTransport::new(
        load_cassette(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display())),
        true,
    )
}

/// Plans every expected `(fixture, item)` row and compares the skill kinds.
pub fn check_decision_tree() -> Check {
    let dir = fixtures().join("tree");
    let expected = fs::read_to_string(dir.join("expected.tsv")).map_err(|e| e.to_string())?;
    let cfg = PlannerConfig::default();
    let start = Instant::now();
    let mut rows = 0;
    let mut seen = std::collections::BTreeSet::new();
    for line in expected.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let [name, id, kinds] = f[..] else {
            return Err(format!("bad expectation row {line:?}"));
        };
        let state = load(&dir.join(format!("{name}.txt")));
        let id: u32 = id.parse().map_err(|_| format!("bad id in {line:?}"))?;
        let item = state.item(id).ok_or(format!("{name}: no item {id}"))?;
        let seq = plan_acquisition(item, &state.others(id), &cfg).map_err(|e| format!("{name}/{id}: {e}"))?;
        if seq.kinds_string() != kinds {
            return Err(format!("{name}/{id}: planned {} expected {kinds}", seq.kinds_string()));
        }
        seen.insert(name.to_string());
        rows += 1;
    }
    let elapsed = start.elapsed();
    let files = txt_files(&dir).len();
    if files < 20 || seen.len() != files {
        return Err(format!("{files} fixtures, {} with expectations", seen.len()));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("suite took {elapsed:?}"));
    }
    if rows == 0 {
        return Err("no expectations".into());
    }
    Ok(())
}

/// Random blobby mask; the seed fully determines it.
pub fn random_mask(rng: &mut ChaCha8Rng) -> FoodMask {
    let w = rng.random_range(8..=128u32);
    let h = rng.random_range(8..=128u32);
    let shapes: Vec<(i32, i32, i32, bool)> = (0..rng.random_range(1..=5))
        .map(|_| {
            (
                rng.random_range(0..w as i32),
                rng.random_range(0..h as i32),
                rng.random_range(1..=(w.min(h) as i32 / 3).max(2)),
                rng.random_bool(0.5),
            )
        })
        .collect();
    let noise = rng.random_range(0.0..0.02);
    let mut mask = FoodMask::from_fn(w, h, |p| {
        shapes.iter().any(|&(cx, cy, r, disc)| {
            if disc {
                p.dist2(Pixel::new(cx, cy)) <= i64::from(r * r)
            } else {
                (p.x - cx).abs() <= r && (p.y - cy).abs() <= r / 2
            }
        })
    });
    for y in 0..h as i32 {
        for x in 0..w as i32 {
            if rng.random_bool(noise) {
                mask.set(Pixel::new(x, y), true);
            }
        }
    }
    if mask.is_empty() {
        mask.set(Pixel::new(0, 0), true);
    }
    mask
}

/// Direct 2-D Gaussian sum at every pixel, in kernel units.
fn oracle_density(mask: &FoodMask, sigma: f64) -> Vec<u64> {
    let w = gaussian_weights(sigma);
    let r = w.len() as i32 - 1;
    all_pixels(mask)
        .map(|c| {
            let mut v = 0u64;
            for dy in -r..=r {
                for dx in -r..=r {
                    if mask.get(c.offset(dx, dy)) {
                        v += w[dx.unsigned_abs() as usize] * w[dy.unsigned_abs() as usize];
                    }
                }
            }
            v
        })
        .collect()
}

fn oracle_densest(raw: &[u64], width: u32) -> Pixel {
    let mut best = 0;
    for (i, &v) in raw.iter().enumerate() {
        if v > raw[best] {
            best = i;
        }
    }
    Pixel::new((best % width as usize) as i32, (best / width as usize) as i32)
}

fn oracle_centroid(mask: &FoodMask) -> Pixel {
    let set: Vec<Pixel> = mask.pixels().collect();
    let n = set.len() as f64;
    let mx = set.iter().map(|p| f64::from(p.x)).sum::<f64>() / n;
    let my = set.iter().map(|p| f64::from(p.y)).sum::<f64>() / n;
    Pixel::new((mx + 0.5).floor() as i32, (my + 0.5).floor() as i32)
}

fn is_boundary(mask: &FoodMask, p: Pixel) -> bool {
    mask.get(p)
        && [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .any(|&(dx, dy)| !mask.get(p.offset(dx, dy)))
}

fn all_pixels(mask: &FoodMask) -> impl Iterator<Item = Pixel> + '_ {
    (0..mask.height() as i32).flat_map(move |y| (0..mask.width() as i32).map(move |x| Pixel::new(x, y)))
}

fn oracle_nearest_boundary(mask: &FoodMask, from: Pixel) -> Pixel {
    all_pixels(mask)
        .filter(|&p| is_boundary(mask, p))
        .min_by_key(|&p| (p.dist2(from), p))
        .unwrap()
}

/// DDA with endpoint canonicalisation, written independently.
fn oracle_segment(a: Pixel, b: Pixel, mask: &FoodMask) -> bool {
    let (p, q) = if (a.y, a.x) <= (b.y, b.x) { (a, b) } else { (b, a) };
    let (dx, dy) = (q.x - p.x, q.y - p.y);
    let n = dx.abs().max(dy.abs());
    (0..=n).any(|t| {
        let f = |d: i32| {
            if n == 0 {
                0
            } else {
                (f64::from(t * d) / f64::from(n) + 0.5).floor() as i32
            }
        };
        let pt = if dx.abs() >= dy.abs() {
            Pixel::new(p.x + t * dx.signum(), p.y + f(dy))
        } else {
            Pixel::new(p.x + f(dx), p.y + t * dy.signum())
        };
        mask.get(pt)
    })
}

fn oracle_sparsest(mask: &FoodMask, densest: Pixel, obstacles: &[&FoodMask]) -> Pixel {
    let boundary: Vec<Pixel> = all_pixels(mask).filter(|&p| is_boundary(mask, p)).collect();
    let far = |cands: &mut dyn Iterator<Item = Pixel>| cands.max_by_key(|&p| (p.dist2(densest), Reverse(p)));
    let clear = far(&mut boundary
        .iter()
        .copied()
        .filter(|&p| !obstacles.iter().any(|o| oracle_segment(p, densest, o))));
    clear.or_else(|| far(&mut boundary.iter().copied())).unwrap()
}

fn entropy_direct(raw: &[u64]) -> f64 {
    let total: u64 = raw.iter().sum();
    let mut h = 0.0;
    for &v in raw.iter().filter(|&&v| v > 0) {
        let p = v as f64 / total as f64;
        h -= p * p.ln();
    }
    h / (raw.len() as f64).ln()
}

pub fn check_geometry_oracles(cases: u64) -> Check {
    for seed in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = random_mask(&mut rng);
        let other = random_mask(&mut rng);
        let other = FoodMask::from_fn(mask.width(), mask.height(), |p| other.get(p) && !mask.get(p));
        let sigma = [2.0, 3.5, 6.0][seed as usize % 3];
        let ctx = |what: &str| format!("seed {seed} ({}x{}): {what}", mask.width(), mask.height());

        let dp = densest_point(&mask, sigma).map_err(|e| ctx(&e.to_string()))?;
        let raw = oracle_density(&mask, sigma);
        if dp != oracle_densest(&raw, mask.width()) {
            return Err(ctx("densest_point"));
        }
        if centroid(&mask).unwrap() != oracle_centroid(&mask) {
            return Err(ctx("centroid"));
        }
        let probe = Pixel::new(
            rng.random_range(-5..mask.width() as i32 + 5),
            rng.random_range(-5..mask.height() as i32 + 5),
        );
        if nearest_boundary_point(&mask, probe).unwrap() != oracle_nearest_boundary(&mask, probe) {
            return Err(ctx("nearest_boundary_point"));
        }
        let obstacles = [&other];
        if sparsest_point(&mask, dp, &obstacles).unwrap() != oracle_sparsest(&mask, dp, &obstacles) {
            return Err(ctx("sparsest_point"));
        }
        for _ in 0..20 {
            let (w, h) = (mask.width() as i32, mask.height() as i32);
            let a = Pixel::new(rng.random_range(-10..w + 10), rng.random_range(-10..h + 10));
            let b = Pixel::new(rng.random_range(-10..w + 10), rng.random_range(-10..h + 10));
            if segment_intersects_mask(a, b, &mask) != oracle_segment(a, b, &mask) {
                return Err(ctx(&format!("segment_intersects_mask {a:?}-{b:?}")));
            }
        }
        let d = density_map(&mask, sigma).unwrap();
        let e = entropy_2d(&d).unwrap();
        let direct = entropy_direct(&raw);
        if (e - direct).abs() > 1e-9 {
            return Err(ctx(&format!("entropy {e} vs {direct}")));
        }
    }
    Ok(())
}

pub fn rotated_rect(angle_deg: f64, len: f64, width: f64) -> FoodMask {
    let (s, c) = angle_deg.to_radians().sin_cos();
    FoodMask::from_fn(128, 128, |p| {
        let (dx, dy) = (f64::from(p.x) - 64.0, f64::from(p.y) - 64.0);
        (dx * c + dy * s).abs() <= len / 2.0 && (-dx * s + dy * c).abs() <= width / 2.0
    })
}

pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

pub fn check_major_axis() -> Check {
    for k in 0..18 {
        let truth = f64::from(k) * 10.0;
        let est = major_axis(&rotated_rect(truth, 90.0, 16.0)).map_err(|e| e.to_string())?;
        if angle_gap(est.angle_deg, truth) > 2.0 {
            return Err(format!("{truth} deg estimated as {}", est.angle_deg));
        }
    }
    Ok(())
}

pub fn fettuccine_path() -> PathBuf {
    fixtures().join("plates").join("fettuccine_chicken_broccoli.txt")
}

pub fn check_fettuccine_efficiencies() -> Check {
    let state = load(&fettuccine_path());
    let (ctx, _) = SequencerContext::from_state(&state, &PlannerConfig::default()).map_err(|e| e.to_string())?;
    let got: Vec<(String, u32)> = ctx
        .items_remaining
        .iter()
        .cloned()
        .zip(ctx.efficiencies.iter().copied())
        .collect();
    let want = [("fettuccine", 3), ("chicken", 1), ("broccoli", 1)];
    if got.len() != 3 || want.iter().any(|(l, e)| !got.contains(&(l.to_string(), *e))) {
        return Err(format!("efficiencies {got:?}"));
    }
    Ok(())
}

pub fn random_context(rng: &mut ChaCha8Rng) -> SequencerContext {
    let n = rng.random_range(0..=8usize);
    SequencerContext {
        items_remaining: (0..n).map(|i| format!("item{i}")).collect(),
        portions: (0..n).map(|_| rng.random_range(1..=6)).collect(),
        efficiencies: (0..n).map(|_| rng.random_range(1..=4)).collect(),
        preference: PreferenceSpec::default(),
        dips: (0..rng.random_range(0..=2)).map(|i| format!("dip{i}")).collect(),
        history: Vec::new(),
    }
}

pub fn check_efficiency_argmin(cases: u64) -> Check {
    for seed in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let ctx = random_context(&mut rng);
        let got = next_bite_efficiency_only(&ctx);
        let n = ctx.items_remaining.len();
        let expected = if n == 0 {
            NextBite::NoBite
        } else {
            let min = *ctx.efficiencies.iter().min().unwrap();
            let mut best: Option<usize> = None;
            for i in 0..n {
                if ctx.efficiencies[i] != min {
                    continue;
                }
                if best.is_none_or(|b| ctx.portions[i] > ctx.portions[b]) {
                    best = Some(i);
                }
            }
            NextBite::Single(ctx.items_remaining[best.unwrap()].clone())
        };
        if got != expected {
            return Err(format!("seed {seed}: {got:?} vs {expected:?} for {ctx:?}"));
        }
    }
    Ok(())
}

pub fn banana_context() -> SequencerContext {
    SequencerContext {
        items_remaining: vec!["banana".into(), "strawberry".into(), "brownie".into()],
        portions: vec![3, 2, 1],
        efficiencies: vec![2, 1, 1],
        preference: PreferenceSpec::default(),
        dips: vec!["nutella".into(), "whipped cream".into()],
        history: vec!["banana".into()],
    }
}

pub fn golden_dir() -> PathBuf {
    fixtures().join("golden")
}

pub fn check_sequencer() -> Check {
    let shapes = [
        NextBite::NoBite,
        NextBite::Single("banana".into()),
        NextBite::Dipped("banana".into(), "nutella".into()),
        NextBite::Single("chicken nugget".into()),
        NextBite::Dipped("chicken nugget".into(), "bbq sauce".into()),
        NextBite::Single("mac 'n cheese".into()),
    ];
    for bite in &shapes {
        let text = format!("Strategy: whatever\n{}", bite.marker_line());
        let back = parse_response(&text).map_err(|e| format!("{bite:?}: {e}"))?;
        if &back != bite {
            return Err(format!("round trip {bite:?} -> {back:?}"));
        }
    }
    let literal = parse_response("Next bite as list: ['banana', 'nutella']").map_err(|e| e.to_string())?;
    if literal != (NextBite::Dipped("banana".into(), "nutella".into())) {
        return Err(format!("literal pair parsed as {literal:?}"));
    }
    let ctx = banana_context();
    match parse_and_validate("Next bite as list: ['nutella']", &ctx) {
        Err(SequencerError::DipAlone(_)) => {}
        other => return Err(format!("dip alone accepted: {other:?}")),
    }
    match parse_and_validate("Next bite as list: ['pasta']", &ctx) {
        Err(SequencerError::AbsentItem(_)) => {}
        other => return Err(format!("absent item accepted: {other:?}")),
    }
    match parse_and_validate("Next bite as list: ['banana', 'strawberry']", &ctx) {
        Err(SequencerError::NotADip(_)) => {}
        other => return Err(format!("non-dip pair accepted: {other:?}")),
    }
    for (name, eff) in [("prompt_flair.txt", true), ("prompt_preference_only.txt", false)] {
        let want = fs::read_to_string(golden_dir().join(name)).map_err(|e| format!("{name}: {e}"))?;
        if build_prompt(&ctx, eff) != want {
            return Err(format!("{name} differs from the built prompt"));
        }
    }
    let with = build_prompt(&ctx, true);
    let without = build_prompt(&ctx, false);
    if with == without || strip_efficiency_clauses(&with, &ctx) != without {
        return Err("prompts differ outside efficiency clauses".into());
    }
    Ok(())
}

/// Deletes the five efficiency clauses from a with-efficiency prompt.
pub fn strip_efficiency_clauses(prompt: &str, ctx: &SequencerContext) -> String {
    let eff_list = format!("{:?}", ctx.efficiencies);
    let mut out = String::new();
    for line in prompt.split_inclusive('\n') {
        if line.starts_with("Efficiency (") && line.contains(&eff_list)
            || line.starts_with("4) Now, consider efficiency")
            || line.starts_with("Next bite (accounting for efficiency)")
        {
            continue;
        }
        out.push_str(line);
    }
    out.replace(" If one item is more efficient, start with that.", "")
        .replace(" if it doesn't affect efficiency", "")
        .replace(" from 4)", "")
}

pub struct EpisodeSet {
    pub fixture: String,
    pub portions: usize,
    pub logs: Vec<EpisodeLog>,
}

/// All three planners on one fixture with deterministic effects and
/// strict cassette replay.
pub fn run_all(path: &Path) -> EpisodeSet {
    let name = stem(path);
    let state = load(path);
    let cfg = PlannerConfig::default();
    let fx = SkillEffectConfig::default();
    let cap = default_step_cap(&state, &cfg);
    let transport = replay(&name);
    let logs = [
        Planner::EfficiencyOnly,
        Planner::Flair(&transport),
        Planner::PreferenceOnly(&transport),
    ]
    .into_iter()
    .map(|p| run_episode(&state, p, &cfg, &fx, cap))
    .collect();
    EpisodeSet {
        fixture: name,
        portions: cap / 4,
        logs,
    }
}

pub fn plate_paths() -> Vec<PathBuf> {
    txt_files(&fixtures().join("plates"))
}

pub fn check_conservation() -> Check {
    let plates = plate_paths();
    if plates.len() != 6 {
        return Err(format!("{} plates", plates.len()));
    }
    for path in &plates {
        let set = run_all(path);
        for log in &set.logs {
            let tag = format!("{} {}", set.fixture, log.planner);
            if let Some(e) = &log.error {
                return Err(format!("{tag}: {e}"));
            }
            let mut area = log.initial_area;
            for s in &log.steps {
                if s.food_area > area || s.food_area + s.removed_area != area {
                    return Err(format!(
                        "{tag}: area {area} -> {} at action {}",
                        s.food_area, s.action_index
                    ));
                }
                let conserving = matches!(s.command.kind, SkillKind::Group | SkillKind::Push | SkillKind::Cut);
                if conserving && s.removed_area != 0 {
                    return Err(format!(
                        "{tag}: {} removed {} px",
                        s.command.kind.as_str(),
                        s.removed_area
                    ));
                }
                area = s.food_area;
            }
            if log.terminated_reason == TerminationReason::StepCap || log.actions() >= 4 * set.portions {
                return Err(format!(
                    "{tag}: {} actions for {} portions",
                    log.actions(),
                    set.portions
                ));
            }
        }
    }
    Ok(())
}

pub fn check_curve_ordering() -> Check {
    let mut by_planner: [Vec<Vec<(usize, usize)>>; 3] = Default::default();
    for path in &plate_paths() {
        let set = run_all(path);
        let curves: Vec<_> = set.logs.iter().map(pickup_curve).collect();
        for log in &set.logs {
            if let Some(e) = &log.error {
                return Err(format!("{} {}: {e}", set.fixture, log.planner));
            }
        }
        if !dominates(&curves[0], &curves[1]) {
            return Err(format!("{}: flair above efficiency-only", set.fixture));
        }
        if !dominates(&curves[1], &curves[2]) {
            return Err(format!("{}: preference-only above flair", set.fixture));
        }
        for (k, c) in curves.into_iter().enumerate() {
            by_planner[k].push(c);
        }
    }
    let agg: Vec<_> = by_planner.iter().map(|c| aggregate_curves(c)).collect();
    if !dominates(&agg[0], &agg[1]) || !dominates(&agg[1], &agg[2]) {
        return Err("aggregate ordering violated".into());
    }

    let path = fixtures().join("preference").join("spaghetti_no_meatballs.txt");
    let set = run_all(&path);
    let flair = set.logs[1].first_bite().map(|(b, _)| b.clone());
    if flair.as_ref().and_then(|b| b.item()) != Some("spaghetti") {
        return Err(format!("flair first bite {flair:?}"));
    }
    match set.logs[0].first_bite() {
        Some((b, 1)) if b.item() == Some("meatball") => {}
        other => return Err(format!("efficiency-only first bite {other:?}")),
    }
    Ok(())
}

/// Runs `simulate` twice into fresh directories and compares the outputs.
pub fn check_determinism() -> Check {
    let fixture = fixtures().join("plates").join("spaghetti_meatballs.txt");
    let cassette = fixtures().join("cassettes").join("spaghetti_meatballs.cassette");
    let runs: [&[&str]; 2] = [
        &["--planner", "flair", "--strict-replay"],
        &[
            "--planner",
            "eff",
            "--seed",
            "7",
            "--success",
            "skewer=0.8",
            "--success",
            "twirl=0.7",
        ],
    ];
    for extra in runs {
        check_simulate_twice(&fixture, &cassette, extra)?;
    }
    Ok(())
}

fn check_simulate_twice(fixture: &Path, cassette: &Path, extra: &[&str]) -> Check {
    let dirs = [
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    ];
    for d in &dirs {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_biteplan"))
            .arg("simulate")
            .args(extra)
            .arg("--fixture")
            .arg(fixture)
            .arg("--cassette")
            .arg(cassette)
            .arg("--out")
            .arg(d.path())
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("simulate failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
    }
    for f in ["episode.log", "curve.csv", "episode.png"] {
        let a = fs::read(dirs[0].path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        let b = fs::read(dirs[1].path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        if a.is_empty() || a != b {
            return Err(format!("{f} differs between runs with {extra:?}"));
        }
    }
    Ok(())
}

pub fn line_is_symmetric(a: Pixel, b: Pixel) -> bool {
    let mut x: Vec<Pixel> = line_pixels(a, b).collect();
    let mut y: Vec<Pixel> = line_pixels(b, a).collect();
    x.sort();
    y.sort();
    x == y
}
