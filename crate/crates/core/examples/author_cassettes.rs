//! Records the replay cassettes under `fixtures/cassettes/`.
//!
//! With `FLAIR_LLM_ENDPOINT` set, prompts go to the live model. Otherwise a
//! scripted responder answers by applying the prompt's own decision rules to
//! the context it reads back out of the prompt. Either way every exchange is
//! recorded, so tests replay the same bytes.
//!
//! Run with `cargo run -p biteplan --example author_cassettes`.

use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use biteplan::llm::{prompt_hash, FnTransport, LiveClient, LlmError, LlmTransport, Recorder};
use biteplan::plate::load_fixture;
use biteplan::sim::{default_step_cap, run_episode, Planner, SkillEffectConfig};
use biteplan::PlannerConfig;

/// Context fields read back out of a rendered prompt.
struct Parsed {
    items: Vec<String>,
    portions: Vec<u32>,
    efficiencies: Option<Vec<u32>>,
    preference: String,
    dips: Vec<String>,
    history: Vec<String>,
}

fn after<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key))
}

fn json<T: JsonList>(s: &str) -> Option<Vec<T>> {
    let v: serde_json::Value = serde_json::from_str(s.trim()).ok()?;
    v.as_array()?.iter().map(T::from_value).collect()
}

trait JsonList: Sized {
    fn from_value(v: &serde_json::Value) -> Option<Self>;
}

impl JsonList for String {
    fn from_value(v: &serde_json::Value) -> Option<Self> {
        v.as_str().map(str::to_string)
    }
}

impl JsonList for u32 {
    fn from_value(v: &serde_json::Value) -> Option<Self> {
        v.as_u64().and_then(|n| u32::try_from(n).ok())
    }
}

fn parse_prompt(prompt: &str) -> Option<Parsed> {
    let history = prompt
        .split("I have eaten the following bites: ")
        .nth(1)?
        .split(". The first item")
        .next()?;
    Some(Parsed {
        items: json(after(prompt, "Items remaining: ")?)?,
        portions: json(after(
            prompt,
            "Portions remaining (corresponding to items remaining list): ",
        )?)?,
        efficiencies: prompt
            .lines()
            .find(|l| l.starts_with("Efficiency ("))
            .and_then(|l| l.rsplit_once(": "))
            .and_then(|(_, v)| json(v)),
        preference: after(prompt, "Preference: ")?.to_string(),
        dips: json(after(prompt, "Dipping sauces remaining: ")?)?,
        history: json(history)?,
    })
}

fn stem(word: &str) -> String {
    let w = word.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
    w.strip_suffix("es")
        .filter(|s| s.ends_with("ch") || s.ends_with("sh") || s.ends_with('o'))
        .or_else(|| w.strip_suffix('s'))
        .unwrap_or(&w)
        .to_string()
}

/// Items the preference rules out, from "don't feed me X" or "no X".
fn excluded(preference: &str, item: &str) -> bool {
    let p = preference.to_lowercase();
    let words: Vec<&str> = p.split_whitespace().collect();
    let item_stem: Vec<String> = item.split_whitespace().map(stem).collect();
    for (i, w) in words.iter().enumerate() {
        let target = match *w {
            "no" | "without" => words.get(i + 1..),
            "me" if i >= 2 && words[i - 1] == "feed" && matches!(words[i - 2], "don't" | "dont" | "never") => {
                words.get(i + 1..)
            }
            _ => None,
        };
        if let Some(rest) = target {
            let phrase: Vec<String> = rest.iter().take(item_stem.len()).map(|w| stem(w)).collect();
            if phrase == item_stem {
                return true;
            }
        }
    }
    false
}

/// Typical sauce for an item, if any.
fn pairing(item: &str) -> &'static [&'static str] {
    match item {
        "carrot" | "celery" | "broccoli" => &["ranch"],
        "chicken nugget" => &["bbq sauce", "ketchup"],
        "banana" => &["nutella"],
        "strawberry" | "brownie" => &["whipped cream", "nutella"],
        "apple" => &["caramel"],
        _ => &[],
    }
}

fn scripted(prompt: &str) -> Result<String, LlmError> {
    let ctx = parse_prompt(prompt).ok_or_else(|| LlmError::Malformed("unrecognised prompt".into()))?;
    let n = ctx.items.len();
    let mut pool: Vec<usize> = (0..n).filter(|&i| !excluded(&ctx.preference, &ctx.items[i])).collect();
    let mut strategy = Vec::new();
    if pool.len() < n {
        strategy.push("Skip the items the preference rules out.".to_string());
    }
    if pool.is_empty() {
        return Ok(respond(&ctx, "Nothing left that I want.", "Do not feed a bite", &[]));
    }
    let multi: Vec<usize> = pool.iter().copied().filter(|&i| ctx.portions[i] > 1).collect();
    if !multi.is_empty() && multi.len() < pool.len() {
        pool = multi;
        strategy.push("Leave single portions for later.".into());
    }
    let max = pool.iter().map(|&i| ctx.portions[i]).max().unwrap_or(0);
    let min = pool.iter().map(|&i| ctx.portions[i]).min().unwrap_or(0);
    if max - min >= 3 {
        pool.retain(|&i| ctx.portions[i] == max);
        strategy.push("Work down the largest portion first.".into());
    }
    let eff = |i: usize| ctx.efficiencies.as_ref().map_or(0, |e| e[i]);
    if let Some(last) = ctx.history.last() {
        let last = last.split(" dipped in ").next().unwrap_or(last);
        if pool.len() > 1 {
            if let Some(pos) = pool.iter().position(|&i| ctx.items[i] == last) {
                let repeat = pool[pos];
                let cheaper = pool.iter().all(|&j| j == repeat || eff(repeat) < eff(j));
                if !(ctx.efficiencies.is_some() && cheaper) {
                    pool.remove(pos);
                    strategy.push("Avoid repeating the last bite.".into());
                }
            }
        }
    }
    let pick = if ctx.efficiencies.is_some() {
        strategy.push("Among the remaining choices, take the one needing fewest actions.".into());
        *pool.iter().min_by_key(|&&i| (eff(i), i)).expect("non-empty pool")
    } else {
        let h = prompt_hash(prompt);
        let k = usize::from_str_radix(&h[..8], 16).expect("hex digest") % pool.len();
        strategy.push("Pick any of the balanced options.".into());
        pool[k]
    };
    let item = ctx.items[pick].clone();
    let dip = pairing(&item)
        .iter()
        .find(|d| ctx.dips.iter().any(|x| x == *d))
        .map(|d| d.to_string());
    let (phrase, list) = match &dip {
        Some(d) => (format!("Feed {item} dipped in {d}"), vec![item.clone(), d.clone()]),
        None => (format!("Feed {item}"), vec![item.clone()]),
    };
    Ok(respond(&ctx, &strategy.join(" "), &phrase, &list))
}

fn respond(ctx: &Parsed, strategy: &str, phrase: &str, list: &[String]) -> String {
    let left: Vec<String> = ctx
        .items
        .iter()
        .zip(&ctx.portions)
        .map(|(i, p)| format!("{p} {i}"))
        .collect();
    let quoted: Vec<String> = list.iter().map(|s| format!("'{s}'")).collect();
    let mut out = format!(
        "Food Items Left: {}.\nStrategy: {}\nNext bite: {}\n",
        left.join(", "),
        if strategy.is_empty() {
            "Feed what is left."
        } else {
            strategy
        },
        phrase
    );
    if ctx.efficiencies.is_some() {
        out.push_str(&format!("Next bite (accounting for efficiency): {phrase}\n"));
    }
    out.push_str(&format!("Next bite as list: [{}]", quoted.join(", ")));
    out
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let out_dir = root.join("cassettes");
    fs::create_dir_all(&out_dir).expect("create cassette dir");
    let responder: Box<dyn LlmTransport> = match LiveClient::from_env(None, None, Duration::from_secs(120)) {
        Ok(live) => {
            eprintln!("recording from live endpoint {}", live.endpoint);
            Box::new(live)
        }
        Err(_) => Box::new(FnTransport(scripted)),
    };
    let cfg = PlannerConfig::default();
    let fx = SkillEffectConfig::default();
    let mut fixtures = Vec::new();
    for dir in ["plates", "preference"] {
        let mut found: Vec<PathBuf> = fs::read_dir(root.join(dir))
            .expect("fixture dir")
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        found.sort();
        fixtures.extend(found);
    }
    for path in fixtures {
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let cassette = out_dir.join(format!("{name}.cassette"));
        let _ = fs::remove_file(&cassette);
        let recorder = Recorder::open(&*responder, &cassette).expect("open cassette");
        let state = load_fixture(&path).expect("fixture loads");
        let cap = default_step_cap(&state, &cfg);
        for planner in [Planner::Flair(&recorder), Planner::PreferenceOnly(&recorder)] {
            let log = run_episode(&state, planner, &cfg, &fx, cap);
            println!(
                "{name} {} actions={} bites={} reason={}",
                planner.name(),
                log.actions(),
                log.bites_fed(),
                log.terminated_reason.as_str()
            );
            if let Some(e) = log.error {
                panic!("{name}: {e}");
            }
        }
    }
}
