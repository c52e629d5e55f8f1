//! Campaign files: a seed and a list of steps, each an argv for one verb plus
//! optional expectations on its report.
//!
//! ```json
//! {"seed": 7, "steps": [
//!   {"argv": ["verify", "directional", "--f", "builtin:ip", "--n", "8", "--k", "5"],
//!    "expect": {"/result/joint/value": "0/1"}}
//! ]}
//! ```
//!
//! Step reports land in `OUT/NN-verb.json`, the roll-up in `OUT/summary.json`.
//! Relative paths inside argv resolve against `OUT`, so artifacts one step
//! writes are visible to the next and the whole tree is self-contained.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cli::{Cli, Command};
use crate::commands::{self, Ctx};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub steps: Vec<Step>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub argv: Vec<String>,
    #[serde(default)]
    pub expect: BTreeMap<String, Value>,
}

/// Outcome of a whole campaign; `ok` is false when any step errored,
/// reported `passed: false` or missed an expectation.
#[derive(Debug)]
pub struct Outcome {
    pub summary: Value,
    pub ok: bool,
}

pub fn load(path: &Path) -> Result<Campaign> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn step_file(i: usize, argv: &[String]) -> String {
    let verb = argv.first().map_or("empty", String::as_str);
    let verb: String = verb.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    format!("{:02}-{verb}.json", i + 1)
}

fn parse_step(seed: u64, budget: u128, argv: &[String]) -> Result<Cli> {
    let mut full = vec!["dalab".to_string(), "--seed".into(), seed.to_string(), "--budget".into(), budget.to_string()];
    full.extend(argv.iter().cloned());
    let cli = Cli::try_parse_from(&full).map_err(|e| anyhow::anyhow!("{}", e.to_string().trim_end()))?;
    if matches!(cli.command, Command::Campaign(_)) {
        bail!("campaigns cannot be nested");
    }
    Ok(cli)
}

fn check_expect(report: &Value, expect: &BTreeMap<String, Value>) -> Vec<Value> {
    expect
        .iter()
        .filter_map(|(ptr, want)| {
            let got = report.pointer(ptr);
            (got != Some(want)).then(|| json!({ "pointer": ptr, "expected": want, "found": got }))
        })
        .collect()
}

/// Runs every step in order. Steps parse as if typed after
/// `dalab --seed SEED --budget BUDGET`, with `--seed` in argv taking priority.
pub fn run(file: &Path, out: &Path, seed: u64, budget: u128) -> Result<Outcome> {
    let c = load(file)?;
    let seed = c.seed.unwrap_or(seed);
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut steps = Vec::new();
    let mut ok = true;
    for (i, step) in c.steps.iter().enumerate() {
        let name = step_file(i, &step.argv);
        let argv = resolve(&step.argv, out);
        let result = parse_step(seed, budget, &argv).and_then(|cli| {
            let ctx = Ctx { seed: cli.seed, budget: cli.budget };
            commands::run(&cli.command, &ctx)
        });
        let (report, error) = match result {
            Ok(r) => (relativize(r, out), None),
            Err(e) => (Value::Null, Some(format!("{e:#}"))),
        };
        let misses = if error.is_none() { check_expect(&report, &step.expect) } else { Vec::new() };
        let passed = error.is_none() && misses.is_empty() && report["passed"] != Value::Bool(false);
        ok &= passed;
        let body =
            json!({ "argv": step.argv, "report": report, "error": error, "expect_failures": misses, "ok": passed });
        fs::write(out.join(&name), serde_json::to_string_pretty(&body)? + "\n")?;
        steps.push(json!({ "file": name, "argv": step.argv, "ok": passed, "error": error }));
    }
    let summary = json!({ "seed": seed, "steps": steps, "ok": ok });
    if !c.steps.is_empty() {
        fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    Ok(Outcome { summary, ok })
}

const PATH_FLAGS: &[&str] =
    &["--out", "--params", "--expander", "--condenser", "--config", "--program", "--injector", "--trace"];

fn join(out: &Path, p: &str) -> String {
    if Path::new(p).is_absolute() {
        p.to_string()
    } else {
        out.join(p).display().to_string()
    }
}

fn resolve_value(flag: &str, v: &str, out: &Path) -> String {
    if PATH_FLAGS.contains(&flag) {
        return join(out, v);
    }
    if flag == "--f" {
        for prefix in ["file:", "pipeline:"] {
            if let Some(rest) = v.strip_prefix(prefix) {
                return format!("{prefix}{}", join(out, rest));
            }
        }
    }
    v.to_string()
}

fn resolve(argv: &[String], out: &Path) -> Vec<String> {
    let mut res = Vec::with_capacity(argv.len());
    let mut prev: Option<&str> = None;
    for a in argv {
        let arg = match (prev, a.split_once('=')) {
            (_, Some((flag, v))) if flag.starts_with("--") => format!("{flag}={}", resolve_value(flag, v, out)),
            (Some(flag), _) => resolve_value(flag, a, out),
            _ => a.clone(),
        };
        res.push(arg);
        prev = (a.starts_with("--") && !a.contains('=')).then_some(a.as_str());
    }
    res
}

/// Rewrites paths under `out` back to their relative form so a report does
/// not depend on where the tree was written.
fn relativize(v: Value, out: &Path) -> Value {
    let prefix = format!("{}/", out.display());
    match v {
        Value::String(s) => Value::String(s.replace(&prefix, "")),
        Value::Array(a) => Value::Array(a.into_iter().map(|x| relativize(x, out)).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, x)| (k, relativize(x, out))).collect()),
        v => v,
    }
}
