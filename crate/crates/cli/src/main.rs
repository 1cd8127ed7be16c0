use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sic_core::acyclic::Analyzer;
use sic_core::chain::{sbac_with, ChainGraph};
use sic_core::model::parse_problem;
use sic_core::oracle::{check_code, find_all_codes, oracle_best_rate};
use sic_core::report::{build_report, BoundKind, EntryValue};
use sic_core::spm::build_spm_lp;
use sic_core::{Error, GPartition, Notation, ProblemInstance, SubsetMask};

#[derive(Parser)]
#[command(name = "sicb", version, about = "Bounds on the symmetric secure capacity of secure index coding instances")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Instance file in the text grammar or JSON; `-` reads standard input.
    file: PathBuf,
    /// Meaning of the middle field of each record.
    #[arg(long, default_value = "A")]
    notation: Notation,
}

#[derive(Subcommand)]
enum Command {
    /// Compute upper and lower bounds.
    Bounds {
        #[command(flatten)]
        input: Input,
        /// Comma-separated subset of mais,smais,sbac,spm,lower.
        #[arg(long, default_value = "mais,smais,sbac,spm,lower")]
        bounds: String,
        #[arg(long)]
        json: bool,
        /// Add an approximate decimal column.
        #[arg(long)]
        decimal: bool,
        /// Include wall times in the JSON report.
        #[arg(long)]
        timings: bool,
        /// Write the unreduced S-PM linear program to this path.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
    },
    /// Search small codes exhaustively and compare their rate with the bounds.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        max_t: u32,
        #[arg(long = "max-M", default_value_t = 4)]
        max_m: usize,
        /// List every valid code at the best (t, M), up to relabeling.
        #[arg(long)]
        find_all: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the g-partition.
    Partition {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Show the winning S-BAC chain with a realizing sequence for each edge.
    ExplainChain {
        #[command(flatten)]
        input: Input,
        /// Explain the height of this set instead, e.g. `1,2`.
        #[arg(long)]
        set: Option<String>,
    },
}

fn read_instance(input: &Input) -> Result<ProblemInstance, Error> {
    let text = if input.file == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(&input.file)?
    };
    if text.trim_start().starts_with('{') {
        ProblemInstance::from_json(&text)
    } else {
        parse_problem(&text, input.notation)
    }
}

fn parse_set(text: &str, n: usize) -> Result<SubsetMask, Error> {
    let mut set = SubsetMask::EMPTY;
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let k: usize = part.parse().map_err(|_| Error::Usage(format!("bad message index `{part}`")))?;
        if k == 0 || k > n {
            return Err(Error::Usage(format!("message {k} outside [1..{n}]")));
        }
        set = set.with(k);
    }
    Ok(set)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::GuardExceeded { .. } => 3,
        Error::Consistency(_) | Error::Solver(_) | Error::IterationCap(_) => 2,
        _ => 1,
    }
}

fn run_bounds(
    input: &Input,
    bounds: &str,
    json: bool,
    decimal: bool,
    timings: bool,
    dump_lp: Option<&Path>,
) -> Result<(), Error> {
    let kinds = BoundKind::parse_list(bounds)?;
    let instance = read_instance(input)?;
    if let Some(path) = dump_lp {
        fs::write(path, build_spm_lp(&instance).to_text())?;
    }
    let report = build_report(&instance, &kinds)?;
    if json {
        print!("{}", report.to_json(timings));
    } else {
        print!("{}", report.to_table(decimal));
    }
    Ok(())
}

fn run_oracle(input: &Input, max_t: u32, max_m: usize, find_all: bool, json: bool) -> Result<(), Error> {
    let instance = read_instance(input)?;
    let res = oracle_best_rate(&instance, max_t, max_m)?;
    let upper = [BoundKind::Mais, BoundKind::Smais, BoundKind::Sbac, BoundKind::Spm];
    let report = build_report(&instance, &upper)?;
    let mut sandwich = Vec::new();
    if let Some((rate, _)) = &res.best {
        for e in &report.entries {
            if let EntryValue::Upper(v) = &e.value {
                sandwich.push((e.kind.name(), v.to_string(), rate.within(v)));
            }
        }
    }
    let all = match (&res.best, find_all) {
        (Some((_, code)), true) => Some(find_all_codes(&instance, code.t(), code.m() as usize, 1000)?),
        _ => None,
    };
    let sandwich_ok = sandwich.iter().all(|s| s.2);

    if json {
        let best = res.best.as_ref().map(
            |(rate, code)| json!({ "rate": rate.to_string(), "t": code.t(), "M": code.m(), "table": code.table() }),
        );
        let checks: Vec<_> = sandwich
            .iter()
            .map(|(name, value, ok)| json!({ "bound": name, "value": value, "rate_within": ok }))
            .collect();
        let mut out = json!({
            "max_t": max_t,
            "max_M": max_m,
            "best": best,
            "smallest_M": res.smallest_m,
            "sandwich": checks,
        });
        if let Some((codes, truncated)) = &all {
            out["all_codes"] = json!(codes.iter().map(|c| c.table().to_vec()).collect::<Vec<_>>());
            out["truncated"] = json!(truncated);
        }
        println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    } else {
        match &res.best {
            None => println!("no valid code found with t ≤ {max_t}, M ≤ {max_m}"),
            Some((rate, code)) => {
                println!("best rate {rate} at t = {}, M = {}", code.t(), code.m());
                print!("{}", code.to_text());
                for (name, value, ok) in &sandwich {
                    println!("{name:<6} {value:<16} {}", if *ok { "ok" } else { "VIOLATED" });
                }
                debug_assert!(check_code(&instance, code)?.is_valid());
            }
        }
        if let Some((codes, truncated)) = &all {
            println!("{} valid codes{}", codes.len(), if *truncated { " (truncated)" } else { "" });
            for (i, c) in codes.iter().enumerate() {
                println!("code {}", i + 1);
                print!("{}", c.to_text());
            }
        }
    }
    if !sandwich_ok {
        return Err(Error::Consistency("a valid code exceeds an upper bound".into()));
    }
    Ok(())
}

fn run_partition(input: &Input, json: bool) -> Result<(), Error> {
    let instance = read_instance(input)?;
    let gp = GPartition::build(&instance);
    if json {
        println!("{}", serde_json::to_string_pretty(&gp.to_json_value()).expect("serializes"));
    } else {
        print!("{}", gp.to_text());
    }
    Ok(())
}

fn run_explain(input: &Input, set: Option<&str>) -> Result<(), Error> {
    let instance = read_instance(input)?;
    let analyzer = Analyzer::new(&instance);
    let gp = GPartition::build(&instance);
    let graph = ChainGraph::build(&analyzer, &gp);
    if let Some(text) = set {
        let l = parse_set(text, instance.n())?;
        println!("{}", graph.chain_height(&analyzer, l));
        return Ok(());
    }
    let res = sbac_with(&analyzer, &gp, &graph);
    let Some(chain) = &res.chain else {
        println!("no chain");
        return Ok(());
    };
    println!("chain {chain}");
    println!("bound {}", res.bound);
    println!("terminal {}", chain.terminal_witness);
    for w in chain.messages.windows(2) {
        let pair = SubsetMask::from_messages([w[0], w[1]]);
        println!("{}", graph.chain_height(&analyzer, pair));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Bounds { input, bounds, json, decimal, timings, dump_lp } => {
            run_bounds(input, bounds, *json, *decimal, *timings, dump_lp.as_deref())
        }
        Command::Oracle { input, max_t, max_m, find_all, json } => run_oracle(input, *max_t, *max_m, *find_all, *json),
        Command::Partition { input, json } => run_partition(input, *json),
        Command::ExplainChain { input, set } => run_explain(input, set.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
