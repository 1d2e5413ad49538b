//! Command-line front end: group ingestion, fusion and transfer reports,
//! idempotent serialization, and the catalog-wide verification suite.
//!
//! Exit codes: 0 when every requested check passes, 1 when a theorem
//! assertion fails, 2 on input errors.

// divisibility is spelled `x % n == 0`, as in the core crate
#![allow(clippy::manual_is_multiple_of)]

use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fusion_core::battery::run_verify_suite;
use fusion_core::burnside::{characteristic_biset, characteristic_idempotent, default_precision};
use fusion_core::catalog;
use fusion_core::fusion::{
    controls_transfer, elementary_focal_subgroup, focal_subgroup, hyperfocal_subgroup,
    intermediate_subsystem, normalizer_subsystem, FusionSystem, SystemKind,
};
use fusion_core::group::{overgroups, prime_divisors, FiniteGroup, Subgroup};
use fusion_core::theorems::{tate_check, yoshida_check};
use fusion_core::transfer::transfer_image_subgroup;

#[derive(Parser)]
#[command(name = "fusion", version, about = "fusion systems, double Burnside modules and transfer maps of finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sylow, focal and transfer analysis of one group
    Analyze(GroupArgs),
    /// Residual comparison against every intermediate realization
    Tate(GroupArgs),
    /// Control of transfer by the normalizer subsystem
    Yoshida(GroupArgs),
    /// Characteristic idempotent of the fusion system mod p^k
    Idempotent(GroupArgs),
    /// Property batteries over the whole catalog
    VerifySuite(SuiteArgs),
}

#[derive(Args)]
struct GroupArgs {
    /// catalog name (for example dihedral:8) or path to a perm/table file
    group: String,
    /// prime for the Sylow subgroup; defaults to the smallest prime divisor
    #[arg(long)]
    p: Option<u64>,
    /// coefficient precision k of Z/p^k; defaults to the exponent length of S/S' plus 2
    #[arg(long)]
    precision: Option<u32>,
    /// largest admissible group order
    #[arg(long, default_value_t = 400)]
    max_order: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// dump full member lists instead of generator words only
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct SuiteArgs {
    /// largest catalog order to sweep (at most 400)
    #[arg(long, default_value_t = 100)]
    max_order: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn panic_message(payload: &dyn std::any::Any) -> &str {
    payload
        .downcast_ref::<String>()
        .map(String::as_str)
        .or_else(|| payload.downcast_ref::<&str>().copied())
        .unwrap_or("")
}

fn is_broken_pipe(message: &str) -> bool {
    message.contains("failed printing to stdout")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // a closed stdout (e.g. piping into head) must not read as a failure
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        if !is_broken_pipe(panic_message(info.payload())) {
            default_hook(info);
        }
    }));
    match std::panic::catch_unwind(|| run(cli.command)) {
        Ok(Ok(code)) => code,
        Ok(Err(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
        Err(payload) if is_broken_pipe(panic_message(payload.as_ref())) => ExitCode::SUCCESS,
        Err(_) => {
            eprintln!("a theorem assertion failed; see the panic message above");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Analyze(a) | Command::Tate(a) | Command::Yoshida(a) => group_command(a, false),
        Command::Idempotent(a) => group_command(a, true),
        Command::VerifySuite(s) => suite_command(s),
    }
}

fn load_group(source: &str) -> anyhow::Result<Arc<FiniteGroup>> {
    if Path::new(source).is_file() {
        let text = std::fs::read_to_string(source).with_context(|| format!("reading {source}"))?;
        return catalog::parse_group(&text).with_context(|| format!("parsing {source}"));
    }
    catalog::build(source)
        .map_err(|e| anyhow!("{source} is neither a catalog name nor a group file: {e}"))
}

fn is_prime(p: u64) -> bool {
    p >= 2 && prime_divisors(p) == vec![p]
}

fn choose_prime(g: &Arc<FiniteGroup>, requested: Option<u64>) -> anyhow::Result<u64> {
    match requested {
        Some(p) => {
            if !is_prime(p) {
                bail!("--p {p} is not prime");
            }
            if g.order() as u64 % p != 0 {
                eprintln!("warning: {p} does not divide |G| = {}; the Sylow subgroup is trivial", g.order());
            }
            Ok(p)
        }
        None => prime_divisors(g.order() as u64)
            .first()
            .copied()
            .ok_or_else(|| anyhow!("the trivial group has no prime divisors; pass --p")),
    }
}

fn member_labels(sub: &Subgroup) -> Vec<String> {
    sub.members().iter().map(|&m| sub.parent().label(m as usize).to_string()).collect()
}

fn subgroup_value(sub: &Subgroup, full: bool) -> Value {
    let mut v = json!({ "order": sub.order(), "generators": sub.generator_words() });
    if full {
        v["members"] = json!(member_labels(sub));
    }
    v
}

fn subgroup_text(sub: &Subgroup, full: bool) -> String {
    let gens = sub.generator_words();
    let head = if gens.is_empty() {
        format!("order {} (trivial)", sub.order())
    } else {
        format!("order {}, generated by {}", sub.order(), gens.join(", "))
    };
    if full {
        format!("{head}, members {{{}}}", member_labels(sub).join(", "))
    } else {
        head
    }
}

fn group_command(args: GroupArgs, with_idempotent: bool) -> anyhow::Result<ExitCode> {
    if args.max_order > 400 {
        bail!("--max-order {} exceeds the supported bound 400", args.max_order);
    }
    let g = load_group(&args.group)?;
    if g.order() > args.max_order {
        bail!("|G| = {} exceeds --max-order {}", g.order(), args.max_order);
    }
    let p = choose_prime(&g, args.p)?;
    if let Some(k) = args.precision {
        if k == 0 {
            bail!("--precision must be at least 1");
        }
    }
    let f = FusionSystem::of_group(&g, p);
    let SystemKind::Ambient { ambient } = f.kind() else { unreachable!("of_group is ambient") };

    let focal = focal_subgroup(&f)?;
    let hyper = hyperfocal_subgroup(&f)?;
    let elementary = elementary_focal_subgroup(&f)?;
    let t_f = transfer_image_subgroup(&f, &characteristic_biset(&f))?;
    let controls = controls_transfer(&f, &normalizer_subsystem(&f))?;
    let yoshida = yoshida_check(&f)?;
    let mut tate_rows = Vec::new();
    for h0 in overgroups(ambient, f.s()) {
        let h = intermediate_subsystem(&f, &h0)?;
        tate_rows.push((h0.clone(), tate_check(&f, &h)?.verdict));
    }
    tate_rows.sort_by_key(|(h0, _)| h0.order());

    let mut report = json!({
        "group": { "name": g.name(), "order": g.order() },
        "p": p,
        "sylow_order": f.s().order(),
        "focal": subgroup_value(&focal, args.full),
        "hyperfocal": subgroup_value(&hyper, args.full),
        "elementary_focal": subgroup_value(&elementary, args.full),
        "T_F": subgroup_value(&t_f, args.full),
        "controls_NFS": controls,
        "yoshida": { "verdict": yoshida.verdict, "witness": yoshida.witness },
        "tate": tate_rows
            .iter()
            .map(|(h0, verdict)| json!({
                "intermediate": subgroup_value(h0, args.full),
                "residuals_equal": verdict,
            }))
            .collect::<Vec<Value>>(),
    });

    let mut text = String::new();
    text.push_str(&format!("group: {} (order {})\n", g.name(), g.order()));
    text.push_str(&format!("p: {p}\n"));
    text.push_str(&format!("sylow order: {}\n", f.s().order()));
    text.push_str(&format!("focal subgroup: {}\n", subgroup_text(&focal, args.full)));
    text.push_str(&format!("hyperfocal subgroup: {}\n", subgroup_text(&hyper, args.full)));
    text.push_str(&format!("elementary focal subgroup: {}\n", subgroup_text(&elementary, args.full)));
    text.push_str(&format!("transfer image T_F: {}\n", subgroup_text(&t_f, args.full)));
    text.push_str(&format!("normalizer subsystem controls transfer: {controls}\n"));
    text.push_str(&format!("yoshida: {}\n", yoshida.witness.join("; ")));
    text.push_str("tate residual comparison:\n");
    for (h0, verdict) in &tate_rows {
        let status = if *verdict { "residuals equal" } else { "residuals differ" };
        text.push_str(&format!("  H0 {}: {status}\n", subgroup_text(h0, args.full)));
    }

    if with_idempotent {
        let k = match args.precision {
            Some(k) => k,
            None => default_precision(f.s(), p),
        };
        let omega = characteristic_idempotent(&f, k)?;
        let terms: Vec<String> = omega.to_string().lines().map(str::to_string).collect();
        report["idempotent"] = json!({ "precision": k, "terms": terms });
        text.push_str(&format!("characteristic idempotent mod {p}^{k}:\n"));
        for line in &terms {
            text.push_str(&format!("  {line}\n"));
        }
    }

    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn suite_command(args: SuiteArgs) -> anyhow::Result<ExitCode> {
    let outcomes = run_verify_suite(args.max_order)?;
    let passed = outcomes.iter().all(|o| o.passed());
    match args.format {
        Format::Json => {
            let report = json!({
                "max_order": args.max_order,
                "passed": passed,
                "batteries": outcomes
                    .iter()
                    .map(|o| json!({
                        "name": o.name,
                        "cases": o.cases,
                        "failures": o.failures,
                    }))
                    .collect::<Vec<Value>>(),
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Format::Text => {
            for o in &outcomes {
                let status = if o.passed() { "pass" } else { "FAIL" };
                println!("{}: {status} ({} cases)", o.name, o.cases);
                for failure in &o.failures {
                    println!("  {failure}");
                }
            }
            println!("verify-suite: {}", if passed { "all batteries passed" } else { "FAILED" });
        }
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
