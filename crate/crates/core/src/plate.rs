//! Plates, food items, binary masks, and the text fixture format.
//!
//! A fixture looks like this:
//!
//! ```text
//! # comments start with '#'
//! plate 200 200 2
//! preference Please don't feed me meatballs
//! item 1 spaghetti noodles
//! 10:5 40:2
//! 12:8
//! end
//! ```
//!
//! Every line between an `item` header and `end` is one raster row, top row
//! first, holding `<start>:<len>` runs of set pixels. A blank line is an empty
//! row, and rows after the last listed one are empty.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

/// Integer pixel coordinate. `x` is the column, `y` the row.
///
/// The derived ordering is row-major: `y` first, then `x`. Every tie-break in
/// the crate relies on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pixel {
    pub y: i32,
    pub x: i32,
}

impl Pixel {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { y, x }
    }

    pub fn dist2(self, other: Pixel) -> i64 {
        let dx = i64::from(self.x - other.x);
        let dy = i64::from(self.y - other.y);
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Pixel) -> f64 {
        (self.dist2(other) as f64).sqrt()
    }

    pub fn offset(self, dx: i32, dy: i32) -> Pixel {
        Pixel::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Display for Pixel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FoodCategory {
    MeatSeafood,
    Fruit,
    Vegetable,
    Sauce,
    Noodles,
    Semisolid,
    Cuttable,
}

impl FoodCategory {
    pub const ALL: [FoodCategory; 7] = [
        FoodCategory::MeatSeafood,
        FoodCategory::Fruit,
        FoodCategory::Vegetable,
        FoodCategory::Sauce,
        FoodCategory::Noodles,
        FoodCategory::Semisolid,
        FoodCategory::Cuttable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FoodCategory::MeatSeafood => "meat_seafood",
            FoodCategory::Fruit => "fruit",
            FoodCategory::Vegetable => "vegetable",
            FoodCategory::Sauce => "sauce",
            FoodCategory::Noodles => "noodles",
            FoodCategory::Semisolid => "semisolid",
            FoodCategory::Cuttable => "cuttable",
        }
    }

    /// Categories stored one item per physical piece and counted by instance.
    pub fn is_countable(self) -> bool {
        matches!(
            self,
            FoodCategory::MeatSeafood | FoodCategory::Fruit | FoodCategory::Vegetable
        )
    }
}

impl fmt::Display for FoodCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown food category `{0}`")]
pub struct UnknownCategory(pub String);

impl FromStr for FoodCategory {
    type Err = UnknownCategory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FoodCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

/// A binary raster the size of the plate.
///
/// The bounding box is a conservative superset of the set pixels: it grows on
/// `set(.., true)` and is never shrunk by clearing.
#[derive(Clone)]
pub struct FoodMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
    bbox: Option<(Pixel, Pixel)>,
}

impl PartialEq for FoodMask {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.bits == other.bits
    }
}

impl Eq for FoodMask {}

impl fmt::Debug for FoodMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FoodMask")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("area", &self.area())
            .finish()
    }
}

impl FoodMask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
            bbox: None,
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(Pixel) -> bool) -> Self {
        let mut mask = Self::new(width, height);
        for y in 0..height as i32 {
            for x in 0..width as i32 {
                let p = Pixel::new(x, y);
                if f(p) {
                    mask.set(p, true);
                }
            }
        }
        mask
    }

    pub fn from_pixels(width: u32, height: u32, pixels: impl IntoIterator<Item = Pixel>) -> Self {
        let mut mask = Self::new(width, height);
        for p in pixels {
            mask.set(p, true);
        }
        mask
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn in_bounds(&self, p: Pixel) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as u32) < self.width && (p.y as u32) < self.height
    }

    fn index(&self, p: Pixel) -> usize {
        p.y as usize * self.width as usize + p.x as usize
    }

    /// Out-of-bounds pixels read as unset.
    pub fn get(&self, p: Pixel) -> bool {
        self.in_bounds(p) && self.bits[self.index(p)]
    }

    /// Writes outside the raster are ignored.
    pub fn set(&mut self, p: Pixel, value: bool) {
        if !self.in_bounds(p) {
            return;
        }
        let i = self.index(p);
        self.bits[i] = value;
        if value {
            self.bbox = Some(match self.bbox {
                None => (p, p),
                Some((lo, hi)) => (
                    Pixel::new(lo.x.min(p.x), lo.y.min(p.y)),
                    Pixel::new(hi.x.max(p.x), hi.y.max(p.y)),
                ),
            });
        }
    }

    /// Inclusive (min, max) corners enclosing every set pixel, if any were ever set.
    pub fn bbox(&self) -> Option<(Pixel, Pixel)> {
        self.bbox
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Set pixels in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        let w = self.width as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| Pixel::new((i % w) as i32, (i / w) as i32))
    }

    pub fn row(&self, y: u32) -> &[bool] {
        let w = self.width as usize;
        &self.bits[y as usize * w..(y as usize + 1) * w]
    }

    /// Set pixels with at least one unset 4-neighbour, in row-major order.
    /// Pixels on the raster edge count as boundary.
    pub fn boundary(&self) -> Vec<Pixel> {
        self.pixels()
            .filter(|&p| {
                [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|&(dx, dy)| !self.get(p.offset(dx, dy)))
            })
            .collect()
    }

    pub fn intersects(&self, other: &FoodMask) -> bool {
        self.bits.iter().zip(&other.bits).any(|(&a, &b)| a && b)
    }

    /// Copy shifted by `(dx, dy)`; pixels leaving the raster are dropped.
    pub fn translated(&self, dx: i32, dy: i32) -> FoodMask {
        FoodMask::from_pixels(self.width, self.height, self.pixels().map(|p| p.offset(dx, dy)))
    }

    /// Run-length encoding of one row as `(start, len)` pairs.
    pub fn row_runs(&self, y: u32) -> Vec<(u32, u32)> {
        let mut runs = Vec::new();
        let mut start = None;
        for (x, &b) in self.row(y).iter().enumerate() {
            match (b, start) {
                (true, None) => start = Some(x as u32),
                (false, Some(s)) => {
                    runs.push((s, x as u32 - s));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push((s, self.width - s));
        }
        runs
    }

    /// Rebuilds a mask from per-row runs. Fails if a run leaves the raster.
    pub fn from_runs(width: u32, height: u32, rows: &[Vec<(u32, u32)>]) -> Result<Self, String> {
        if rows.len() > height as usize {
            return Err(format!("{} rows exceed plate height {height}", rows.len()));
        }
        let mut mask = Self::new(width, height);
        for (y, runs) in rows.iter().enumerate() {
            for &(start, len) in runs {
                let end = start as u64 + len as u64;
                if end > width as u64 {
                    return Err(format!("run {start}:{len} on row {y} exceeds plate width {width}"));
                }
                for x in start..start + len {
                    mask.set(Pixel::new(x as i32, y as i32), true);
                }
            }
        }
        Ok(mask)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoodItem {
    pub instance_id: u32,
    pub label: String,
    pub category: FoodCategory,
    pub mask: FoodMask,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlateObservation {
    pub width: u32,
    pub height: u32,
    pub px_per_mm: f64,
    pub items: Vec<FoodItem>,
    pub frame_id: u64,
}

/// A bite currently on the fork.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeldBite {
    pub label: String,
    pub dipped_in: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlateState {
    pub observation: PlateObservation,
    /// Append-only, oldest first.
    pub consumed_history: Vec<String>,
    /// Free-form user instruction carried by the fixture, if any.
    pub preference: Option<String>,
    pub held: Option<HeldBite>,
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("item {instance_id} ({label}): {message}")]
    Invalid {
        instance_id: u32,
        label: String,
        message: String,
    },
    #[error("plate: {0}")]
    Plate(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PlateState {
    /// Validates the observation and wraps it with an empty history.
    pub fn new(observation: PlateObservation) -> Result<Self, FixtureError> {
        let state = Self {
            observation,
            consumed_history: Vec::new(),
            preference: None,
            held: None,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<(), FixtureError> {
        let obs = &self.observation;
        if obs.width == 0 || obs.height == 0 {
            return Err(FixtureError::Plate("width and height must be positive".into()));
        }
        if !(obs.px_per_mm > 0.0 && obs.px_per_mm.is_finite()) {
            return Err(FixtureError::Plate("px_per_mm must be positive".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for item in &obs.items {
            let invalid = |message: &str| FixtureError::Invalid {
                instance_id: item.instance_id,
                label: item.label.clone(),
                message: message.to_string(),
            };
            if item.label.trim().is_empty() {
                return Err(invalid("empty label"));
            }
            if !seen.insert(item.instance_id) {
                return Err(invalid("duplicate instance id"));
            }
            if item.mask.width() != obs.width || item.mask.height() != obs.height {
                return Err(invalid("mask does not fit the plate"));
            }
            if item.mask.is_empty() {
                return Err(invalid("empty mask"));
            }
        }
        Ok(())
    }

    pub fn items(&self) -> &[FoodItem] {
        &self.observation.items
    }

    pub fn item(&self, instance_id: u32) -> Option<&FoodItem> {
        self.observation.items.iter().find(|i| i.instance_id == instance_id)
    }

    /// Sauce items; dips are never fed alone.
    pub fn dips_available(&self) -> Vec<&FoodItem> {
        self.observation
            .items
            .iter()
            .filter(|i| i.category == FoodCategory::Sauce)
            .collect()
    }

    /// Every item except `instance_id`.
    pub fn others(&self, instance_id: u32) -> Vec<FoodItem> {
        self.observation
            .items
            .iter()
            .filter(|i| i.instance_id != instance_id)
            .cloned()
            .collect()
    }

    pub fn next_instance_id(&self) -> u32 {
        self.observation
            .items
            .iter()
            .map(|i| i.instance_id)
            .max()
            .map_or(1, |m| m + 1)
    }

    /// True when no non-sauce food remains.
    pub fn is_empty(&self) -> bool {
        self.observation.items.iter().all(|i| i.category == FoodCategory::Sauce)
    }

    pub fn total_food_area(&self) -> usize {
        self.observation
            .items
            .iter()
            .filter(|i| i.category != FoodCategory::Sauce)
            .map(|i| i.mask.area())
            .sum()
    }
}

fn quote_label(label: &str) -> String {
    if label.chars().any(char::is_whitespace) || label.starts_with('"') {
        format!("\"{label}\"")
    } else {
        label.to_string()
    }
}

/// Splits an `item` line into its fields; a label may be double-quoted.
fn split_item_header(rest: &str) -> Option<(String, String, String)> {
    let rest = rest.trim();
    let (id, rest) = rest.split_once(char::is_whitespace)?;
    let rest = rest.trim_start();
    let (label, rest) = if let Some(stripped) = rest.strip_prefix('"') {
        let end = stripped.find('"')?;
        (stripped[..end].to_string(), &stripped[end + 1..])
    } else {
        let (l, r) = rest.split_once(char::is_whitespace)?;
        (l.to_string(), r)
    };
    let category = rest.trim();
    if category.is_empty() || category.contains(char::is_whitespace) {
        return None;
    }
    Some((id.to_string(), label, category.to_string()))
}

fn parse_runs(line: &str, lineno: usize) -> Result<Vec<(u32, u32)>, FixtureError> {
    line.split_whitespace()
        .map(|tok| {
            let parsed = tok
                .split_once(':')
                .and_then(|(s, l)| Some((s.parse::<u32>().ok()?, l.parse::<u32>().ok()?)));
            match parsed {
                Some((s, l)) if l > 0 => Ok((s, l)),
                _ => Err(FixtureError::Parse {
                    line: lineno,
                    message: format!("bad run `{tok}`, expected <start>:<len> with len > 0"),
                }),
            }
        })
        .collect()
}

/// Parses fixture text. Items whose mask decodes to zero pixels are dropped.
pub fn parse_fixture(text: &str) -> Result<PlateState, FixtureError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let parse_err = |line: usize, message: String| FixtureError::Parse { line, message };

    let mut header = None;
    let mut preference = None;
    let mut items = Vec::new();

    while let Some((lineno, raw)) = lines.next() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match keyword {
            "plate" => {
                if header.is_some() {
                    return Err(parse_err(lineno, "duplicate plate header".into()));
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                let [w, h, scale] = fields[..] else {
                    return Err(parse_err(
                        lineno,
                        "expected `plate <width> <height> <px_per_mm>`".into(),
                    ));
                };
                let width: u32 = w.parse().map_err(|_| parse_err(lineno, format!("bad width `{w}`")))?;
                let height: u32 = h.parse().map_err(|_| parse_err(lineno, format!("bad height `{h}`")))?;
                let scale: f64 = scale
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad px_per_mm `{scale}`")))?;
                header = Some((width, height, scale));
            }
            "preference" => {
                preference = Some(rest.trim().to_string());
            }
            "item" => {
                let Some((width, height, _)) = header else {
                    return Err(parse_err(lineno, "item before plate header".into()));
                };
                let (id, label, category) = split_item_header(rest)
                    .ok_or_else(|| parse_err(lineno, "expected `item <instance_id> <label> <category>`".into()))?;
                let instance_id: u32 = id
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad instance id `{id}`")))?;
                let category: FoodCategory = category
                    .parse()
                    .map_err(|e: UnknownCategory| parse_err(lineno, e.to_string()))?;
                let mut rows = Vec::new();
                let mut terminated = false;
                for (row_line, raw_row) in lines.by_ref() {
                    let row = raw_row.trim();
                    if row == "end" {
                        terminated = true;
                        break;
                    }
                    if row.starts_with('#') {
                        continue;
                    }
                    rows.push(parse_runs(row, row_line)?);
                }
                if !terminated {
                    return Err(parse_err(lineno, format!("item {instance_id} missing `end`")));
                }
                let mask = FoodMask::from_runs(width, height, &rows).map_err(|message| FixtureError::Invalid {
                    instance_id,
                    label: label.clone(),
                    message,
                })?;
                if !mask.is_empty() {
                    items.push(FoodItem {
                        instance_id,
                        label,
                        category,
                        mask,
                    });
                }
            }
            other => return Err(parse_err(lineno, format!("unexpected `{other}`"))),
        }
    }

    let (width, height, px_per_mm) = header.ok_or_else(|| parse_err(0, "missing plate header".into()))?;
    let mut state = PlateState::new(PlateObservation {
        width,
        height,
        px_per_mm,
        items,
        frame_id: 0,
    })?;
    state.preference = preference;
    Ok(state)
}

/// Canonical fixture text. Trailing empty rows of each mask are omitted.
pub fn render_fixture(state: &PlateState) -> String {
    let obs = &state.observation;
    let mut out = format!("plate {} {} {}\n", obs.width, obs.height, obs.px_per_mm);
    if let Some(pref) = &state.preference {
        out.push_str(&format!("preference {pref}\n"));
    }
    for item in &obs.items {
        out.push_str(&format!(
            "item {} {} {}\n",
            item.instance_id,
            quote_label(&item.label),
            item.category
        ));
        let last_row = item.mask.pixels().map(|p| p.y).max().unwrap_or(-1);
        for y in 0..=last_row {
            let runs = item.mask.row_runs(y as u32);
            let line: Vec<String> = runs.iter().map(|(s, l)| format!("{s}:{l}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<PlateState, FixtureError> {
    let text = fs::read_to_string(path)?;
    parse_fixture(&text)
}

pub fn save_fixture(state: &PlateState, path: impl AsRef<Path>) -> Result<(), FixtureError> {
    fs::write(path, render_fixture(state))?;
    Ok(())
}
