use std::process::ExitCode;

use clap::Parser;
use dalab::campaign;
use dalab::cli::{Cli, Command};
use dalab::commands::{self, Ctx};
use dalab::par;
use serde_json::Value;

fn summary(report: &Value) -> String {
    let mut s = String::new();
    let verdict = match report["passed"] {
        Value::Bool(true) => "PASS",
        Value::Bool(false) => "FAIL",
        _ => "done",
    };
    s.push_str(&format!("{} {verdict}\n", report["command"].as_str().unwrap_or("?")));
    if let Value::Object(m) = &report["result"] {
        for (k, v) in m {
            let line = match v {
                Value::Object(o) => match o.get("value") {
                    Some(Value::Object(m)) if m.contains_key("exact") => m["exact"].as_str().unwrap_or("?").to_string(),
                    Some(Value::Object(m)) => format!("{} ± {}", m["estimate"], m["radius"]),
                    _ => continue,
                },
                Value::Array(_) => continue,
                Value::String(t) => t.clone(),
                v => v.to_string(),
            };
            s.push_str(&format!("  {k}: {line}\n"));
        }
    }
    s
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let ctx = Ctx { seed: cli.seed, budget: cli.budget };
    let pool = par::pool(cli.workers.unwrap_or_else(par::default_workers))?;
    pool.install(|| match &cli.command {
        Command::Campaign(a) => {
            let o = campaign::run(&a.file, &a.out, cli.seed, cli.budget)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&o.summary)?);
            } else {
                for step in o.summary["steps"].as_array().into_iter().flatten() {
                    let mark = if step["ok"] == Value::Bool(true) { "ok  " } else { "FAIL" };
                    println!("{mark} {}", step["file"].as_str().unwrap_or("?"));
                    if let Some(e) = step["error"].as_str() {
                        println!("     {e}");
                    }
                }
            }
            Ok(o.ok)
        }
        c => {
            let report = commands::run(c, &ctx)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", summary(&report));
            }
            Ok(report["passed"] != Value::Bool(false))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
