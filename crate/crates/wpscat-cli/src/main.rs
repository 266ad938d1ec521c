//! `wpscat` command-line front end. Exit codes: 0 all checks pass,
//! 1 a check failed or the numerics did not converge, 2 configuration error.

mod commands;
mod config;

use clap::{Arg, ArgAction, Command};
use serde_json::json;
use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

fn cli() -> Command {
    let mut app = Command::new("wpscat")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Gaussian wave-packet scattering toolkit")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for c in config::COMMANDS {
        let mut sub = Command::new(c.name).about(c.about).hide(c.hidden).arg(
            Arg::new("config").long("config").value_name("FILE").help("key=value config file with [section] headers"),
        );
        for p in c.params.iter().chain(config::GLOBAL) {
            let mut help = p.help.to_string();
            if let config::Kind::Choice(opts) = p.kind {
                help.push_str(&format!(" ({})", opts.join("|")));
            }
            if let Some(d) = p.default {
                help.push_str(&format!(" [default: {d}]"));
            }
            sub = sub.arg(
                Arg::new(p.name)
                    .long(p.name)
                    .value_name("VALUE")
                    .allow_hyphen_values(true)
                    .action(ArgAction::Set)
                    .help(help),
            );
        }
        app = app.subcommand(sub);
    }
    app
}

fn config_error(errors: &[String]) -> ExitCode {
    let mut e = std::io::stderr();
    let _ = writeln!(e, "configuration errors:");
    for m in errors {
        let _ = writeln!(e, "  {m}");
    }
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let cmd = config::command(name).expect("known subcommand");
    let mut flags = BTreeMap::new();
    for p in cmd.params.iter().chain(config::GLOBAL) {
        if let Some(v) = sub.get_one::<String>(p.name) {
            flags.insert(p.name.to_string(), v.clone());
        }
    }
    let file = match sub.get_one::<String>("config") {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match config::parse_file(&text) {
                Ok(f) => f,
                Err(errs) => return config_error(&errs),
            },
            Err(e) => return config_error(&[format!("cannot read {path}: {e}")]),
        },
        None => config::FileConfig::new(),
    };
    let cfg = match config::build(cmd, &flags, &file) {
        Ok(c) => c,
        Err(errs) => return config_error(&errs),
    };

    let threads = cfg.count("threads");
    let outcome = wpscat::par::with_threads(threads, || commands::run(&cfg));
    let report = match outcome {
        Ok(r) => r,
        Err(msg) => {
            let summary = json!({
                "tool": "wpscat",
                "version": env!("CARGO_PKG_VERSION"),
                "command": cfg.command,
                "config": cfg.echo(),
                "error": msg,
                "pass": false,
            });
            println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            eprintln!("numerical failure: {msg}");
            return ExitCode::from(1);
        }
    };
    let pass = report.checks.iter().all(|c| c.pass);
    let summary = json!({
        "tool": "wpscat",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command,
        "config": cfg.echo(),
        "results": report.results,
        "checks": report.checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        "pass": pass,
        "metadata": {"parallel_feature": wpscat::par::PARALLEL},
    });
    let text = serde_json::to_string_pretty(&summary).unwrap_or_default();
    match (cfg.out(), &report.table) {
        (Some("-"), Some(t)) => {
            print!("{t}");
            eprintln!("{text}");
        }
        (Some(path), Some(t)) => {
            if let Err(e) = std::fs::write(path, t) {
                eprintln!("cannot write {path}: {e}");
                return ExitCode::from(2);
            }
            println!("{text}");
        }
        _ => println!("{text}"),
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
