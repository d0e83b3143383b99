//! Bite sequencing: prompt assembly, response parsing and the three
//! next-bite planners (preference+efficiency, preference only, efficiency only).

use std::fmt;

use thiserror::Error;

use crate::llm::{LlmError, LlmTransport};
use crate::planner::{plan_acquisition, PlanError, PlannerConfig, SkillSequence};
use crate::plate::{FoodCategory, PlateState};
use crate::portions::item_portions;

pub const PROMPT_TEMPLATE: &str = include_str!("../assets/bite_sequencing_prompt.txt");
pub const FOOD_DETECTION_TEMPLATE: &str = include_str!("../assets/food_detection_prompt.txt");
pub const BITE_MARKER: &str = "Next bite as list:";
pub const NO_PREFERENCE: &str = "No preference";

const EFF_OPEN: &str = "[[eff]]";
const EFF_CLOSE: &str = "[[/eff]]";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequencerError {
    #[error("response has no line beginning `{BITE_MARKER}`")]
    MissingMarker,
    #[error("malformed bite list: {0}")]
    Malformed(String),
    #[error("`{0}` is a dip and cannot be fed by itself")]
    DipAlone(String),
    #[error("`{0}` is not among the remaining items")]
    AbsentItem(String),
    #[error("`{0}` is not a dipping sauce")]
    NotADip(String),
    #[error("invalid bite after retry: first `{first}`, then `{second}`")]
    InvalidAfterRetry { first: String, second: String },
    #[error("transport: {0}")]
    Transport(String),
    #[error("context lists have mismatched lengths")]
    Mismatched,
}

impl From<LlmError> for SequencerError {
    fn from(e: LlmError) -> Self {
        SequencerError::Transport(e.to_string())
    }
}

/// Free-form preference text, kept exactly as given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceSpec {
    pub text: String,
}

impl PreferenceSpec {
    pub fn new(text: impl Into<String>) -> Self {
        Self { text: text.into() }
    }
}

impl Default for PreferenceSpec {
    fn default() -> Self {
        Self::new(NO_PREFERENCE)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SequencerContext {
    pub items_remaining: Vec<String>,
    pub portions: Vec<u32>,
    pub efficiencies: Vec<u32>,
    pub preference: PreferenceSpec,
    pub dips: Vec<String>,
    /// Oldest first.
    pub history: Vec<String>,
}

/// The cheapest instance of one label together with its plan.
#[derive(Debug, Clone)]
pub struct LabelPlan {
    pub label: String,
    pub instance_id: u32,
    pub sequence: SkillSequence,
    pub portions: u32,
}

/// Plans every non-sauce instance and keeps, per label, the instance with
/// the fewest actions (lowest instance id on ties). Labels keep their order
/// of first appearance.
pub fn plan_labels(state: &PlateState, cfg: &PlannerConfig) -> Result<Vec<LabelPlan>, PlanError> {
    let mut out: Vec<LabelPlan> = Vec::new();
    for item in state.items() {
        if item.category == FoodCategory::Sauce {
            continue;
        }
        let portions = item_portions(item, cfg).unwrap_or(0);
        if portions == 0 {
            continue;
        }
        let sequence = plan_acquisition(item, &state.others(item.instance_id), cfg)?;
        match out.iter_mut().find(|p| p.label == item.label) {
            Some(p) => {
                p.portions += portions;
                if sequence.efficiency() < p.sequence.efficiency() {
                    p.instance_id = item.instance_id;
                    p.sequence = sequence;
                }
            }
            None => out.push(LabelPlan {
                label: item.label.clone(),
                instance_id: item.instance_id,
                sequence,
                portions,
            }),
        }
    }
    Ok(out)
}

impl SequencerContext {
    /// Builds the context from the current plate alone.
    pub fn from_state(state: &PlateState, cfg: &PlannerConfig) -> Result<(Self, Vec<LabelPlan>), PlanError> {
        let plans = plan_labels(state, cfg)?;
        let mut dips: Vec<String> = Vec::new();
        for d in state.dips_available() {
            if !dips.contains(&d.label) {
                dips.push(d.label.clone());
            }
        }
        let ctx = SequencerContext {
            items_remaining: plans.iter().map(|p| p.label.clone()).collect(),
            portions: plans.iter().map(|p| p.portions).collect(),
            efficiencies: plans.iter().map(|p| p.sequence.efficiency() as u32).collect(),
            preference: state.preference.clone().map(PreferenceSpec::new).unwrap_or_default(),
            dips,
            history: state.consumed_history.clone(),
        };
        Ok((ctx, plans))
    }

    pub fn validate(&self) -> Result<(), SequencerError> {
        let n = self.items_remaining.len();
        if self.portions.len() != n || self.efficiencies.len() != n {
            return Err(SequencerError::Mismatched);
        }
        if let Some(d) = self.dips.iter().find(|d| self.items_remaining.contains(d)) {
            return Err(SequencerError::NotADip(d.clone()));
        }
        Ok(())
    }

    fn position(&self, label: &str) -> Option<usize> {
        self.items_remaining.iter().position(|l| l == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NextBite {
    NoBite,
    Single(String),
    Dipped(String, String),
}

impl NextBite {
    pub fn item(&self) -> Option<&str> {
        match self {
            NextBite::NoBite => None,
            NextBite::Single(i) | NextBite::Dipped(i, _) => Some(i),
        }
    }

    pub fn dip(&self) -> Option<&str> {
        match self {
            NextBite::Dipped(_, d) => Some(d),
            _ => None,
        }
    }

    /// `['item']`, `['item', 'dip']` or `[]`.
    pub fn render_list(&self) -> String {
        let quote = |s: &str| {
            if s.contains('\'') {
                format!("\"{s}\"")
            } else {
                format!("'{s}'")
            }
        };
        match self {
            NextBite::NoBite => "[]".to_string(),
            NextBite::Single(i) => format!("[{}]", quote(i)),
            NextBite::Dipped(i, d) => format!("[{}, {}]", quote(i), quote(d)),
        }
    }

    pub fn marker_line(&self) -> String {
        format!("{BITE_MARKER} {}", self.render_list())
    }
}

impl fmt::Display for NextBite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NextBite::NoBite => write!(f, "no bite"),
            NextBite::Single(i) => write!(f, "{i}"),
            NextBite::Dipped(i, d) => write!(f, "{i} dipped in {d}"),
        }
    }
}

fn json_list<T: fmt::Display>(values: &[T], quote: bool) -> String {
    let parts: Vec<String> = values
        .iter()
        .map(|v| {
            if quote {
                serde_json::to_string(&v.to_string()).expect("strings always serialize")
            } else {
                v.to_string()
            }
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn apply_eff_markers(template: &str, keep: bool) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find(EFF_OPEN) {
        out.push_str(&rest[..start]);
        let after = &rest[start + EFF_OPEN.len()..];
        let end = after.find(EFF_CLOSE).expect("unbalanced efficiency marker in template");
        if keep {
            out.push_str(&after[..end]);
        }
        rest = &after[end + EFF_CLOSE.len()..];
    }
    out.push_str(rest);
    out
}

/// Single pass over `{name}` placeholders so substituted text is never
/// re-scanned.
fn substitute(template: &str, lookup: impl Fn(&str) -> Option<String>) -> String {
    let mut out = String::with_capacity(template.len() + 256);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        match after
            .find('}')
            .and_then(|close| lookup(&after[..close]).map(|v| (close, v)))
        {
            Some((close, value)) => {
                out.push_str(&value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

pub fn build_prompt(ctx: &SequencerContext, include_efficiency: bool) -> String {
    let template = apply_eff_markers(PROMPT_TEMPLATE, include_efficiency);
    substitute(&template, |name| match name {
        "items" => Some(json_list(&ctx.items_remaining, true)),
        "portions" => Some(json_list(&ctx.portions, false)),
        "efficiencies" => Some(json_list(&ctx.efficiencies, false)),
        "preference" => Some(ctx.preference.text.clone()),
        "dips" => Some(json_list(&ctx.dips, true)),
        "history" => Some(json_list(&ctx.history, true)),
        _ => None,
    })
}

fn parse_list(body: &str) -> Result<Vec<String>, SequencerError> {
    let malformed = |m: &str| SequencerError::Malformed(format!("{m} in `{body}`"));
    let mut chars = body.trim_start().chars().peekable();
    if chars.next() != Some('[') {
        return Err(malformed("expected `[`"));
    }
    let mut items = Vec::new();
    let mut expect_item = true;
    loop {
        match chars.next() {
            None => return Err(malformed("unterminated list")),
            Some(c) if c.is_whitespace() => {}
            Some(']') => {
                if expect_item && !items.is_empty() {
                    return Err(malformed("trailing comma"));
                }
                break;
            }
            Some(',') if !expect_item => expect_item = true,
            Some(q @ ('\'' | '"')) if expect_item => {
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => return Err(malformed("unterminated quote")),
                        Some(c) if c == q => break,
                        Some(c) => s.push(c),
                    }
                }
                let s = s.trim().to_string();
                if s.is_empty() {
                    return Err(malformed("empty item"));
                }
                items.push(s);
                expect_item = false;
            }
            Some(c) => return Err(malformed(&format!("unexpected `{c}`"))),
        }
    }
    let tail: String = chars.collect();
    let tail = tail.trim();
    if !tail.is_empty() && !tail.starts_with('#') {
        return Err(malformed("trailing text after list"));
    }
    Ok(items)
}

/// Reads the last `Next bite as list:` line of a response.
pub fn parse_response(text: &str) -> Result<NextBite, SequencerError> {
    let line = text
        .lines()
        .rev()
        .map(str::trim_start)
        .find(|l| l.starts_with(BITE_MARKER))
        .ok_or(SequencerError::MissingMarker)?;
    let mut items = parse_list(&line[BITE_MARKER.len()..])?;
    match items.len() {
        0 => Ok(NextBite::NoBite),
        1 => Ok(NextBite::Single(items.remove(0))),
        2 => {
            let dip = items.pop().expect("two items");
            Ok(NextBite::Dipped(items.pop().expect("two items"), dip))
        }
        n => Err(SequencerError::Malformed(format!("{n} items; at most 2 allowed"))),
    }
}

/// Checks a parsed bite against the context.
pub fn validate_bite(bite: &NextBite, ctx: &SequencerContext) -> Result<(), SequencerError> {
    let check_item = |item: &str| {
        if ctx.position(item).is_some() {
            Ok(())
        } else if ctx.dips.iter().any(|d| d == item) {
            Err(SequencerError::DipAlone(item.to_string()))
        } else {
            Err(SequencerError::AbsentItem(item.to_string()))
        }
    };
    match bite {
        NextBite::NoBite => Ok(()),
        NextBite::Single(item) => check_item(item),
        NextBite::Dipped(item, dip) => {
            check_item(item)?;
            if ctx.dips.iter().any(|d| d == dip) {
                Ok(())
            } else if ctx.position(dip).is_some() {
                Err(SequencerError::NotADip(dip.clone()))
            } else {
                Err(SequencerError::AbsentItem(dip.clone()))
            }
        }
    }
}

pub fn parse_and_validate(text: &str, ctx: &SequencerContext) -> Result<NextBite, SequencerError> {
    let bite = parse_response(text)?;
    validate_bite(&bite, ctx)?;
    Ok(bite)
}

/// Text appended to the prompt when the first answer is rejected.
pub fn correction_prompt(prompt: &str, error: &SequencerError) -> String {
    format!(
        "{prompt}\nYour previous answer was rejected: {error}. Choose only from 'Items remaining', \
optionally dipped in one item from 'Dipping sauces remaining', and end with a line beginning '{BITE_MARKER}'."
    )
}

fn ask_with_retry(
    ctx: &SequencerContext,
    llm: &dyn LlmTransport,
    include_efficiency: bool,
) -> Result<NextBite, SequencerError> {
    ctx.validate()?;
    if ctx.items_remaining.is_empty() {
        return Ok(NextBite::NoBite);
    }
    let prompt = build_prompt(ctx, include_efficiency);
    let first = match parse_and_validate(&llm.complete(&prompt)?, ctx) {
        Ok(bite) => return Ok(bite),
        Err(e) => e,
    };
    let retry = correction_prompt(&prompt, &first);
    parse_and_validate(&llm.complete(&retry)?, ctx).map_err(|second| SequencerError::InvalidAfterRetry {
        first: first.to_string(),
        second: second.to_string(),
    })
}

pub fn next_bite_flair(ctx: &SequencerContext, llm: &dyn LlmTransport) -> Result<NextBite, SequencerError> {
    ask_with_retry(ctx, llm, true)
}

pub fn next_bite_preference_only(ctx: &SequencerContext, llm: &dyn LlmTransport) -> Result<NextBite, SequencerError> {
    ask_with_retry(ctx, llm, false)
}

/// Fewest actions, then most portions, then list order. Never dips.
pub fn next_bite_efficiency_only(ctx: &SequencerContext) -> NextBite {
    (0..ctx.items_remaining.len())
        .min_by_key(|&i| {
            (
                ctx.efficiencies.get(i).copied().unwrap_or(u32::MAX),
                std::cmp::Reverse(ctx.portions.get(i).copied().unwrap_or(0)),
                i,
            )
        })
        .map(|i| NextBite::Single(ctx.items_remaining[i].clone()))
        .unwrap_or(NextBite::NoBite)
}
