use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tcount::channel::{channel_of_unitary, ChannelMatrix, Unitary};
use tcount::circuit::{emit_circuit, fixtures, Circuit};
use tcount::heuristic::{method_by_name, HeuristicConfig, DEFAULT_FRONTIER_CAP};
use tcount::provable::{ProvableConfig, ProvableSearch, DEFAULT_MEM_CAP};
use tcount::solver::{solver_by_name, solver_names, SolverOptions};
use tcount::{Decomposition, Error};

#[derive(Parser)]
#[command(
    name = "tsynth",
    version,
    about = "T-count optimal Clifford+T synthesis"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Heuristic T-count and decomposition.
    Tcount {
        /// Circuit (.qc) or unitary/channel JSON (.json).
        input: PathBuf,
        #[arg(long, default_value = "C")]
        method: String,
        #[arg(long, default_value_t = DEFAULT_FRONTIER_CAP)]
        frontier_cap: usize,
        #[arg(long)]
        m_cap: Option<usize>,
        /// Select at level 1 instead of joining the first two levels.
        #[arg(long)]
        no_join2: bool,
        #[arg(long)]
        json: bool,
        /// Write the T-gate fragment of the decomposition as a circuit file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Exact T-count by nested meet-in-the-middle, up to a bound.
    TcountProvable {
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        c: usize,
        #[arg(long, env = "TCDB_DIR")]
        db_dir: Option<PathBuf>,
        /// Database memory cap in bytes.
        #[arg(long, default_value_t = DEFAULT_MEM_CAP)]
        mem_cap: usize,
        /// Only decide; skip building the decomposition.
        #[arg(long)]
        no_decompose: bool,
        #[arg(long)]
        json: bool,
    },
    /// Write a fixture or random circuit.
    Gen {
        /// Fixture name, or "random".
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        tgates: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; ".json" writes the unitary, anything else the circuit.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        #[arg(long, default_value = "heuristic")]
        solver: String,
        /// Random circuits per table2 row.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add the 4-qubit rows (adder, U2) to table1.
        #[arg(long)]
        four_qubit: bool,
        /// Restrict table2 to one (n, tgates) row.
        #[arg(long, requires = "tgates")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        tgates: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Table1,
    Table2,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Inconclusive {
            overflowed: false, ..
        } => 2,
        Error::Inconclusive {
            overflowed: true, ..
        }
        | Error::FrontierOverflow { .. }
        | Error::DatabaseTooLarge { .. } => 3,
        _ => 1,
    }
}

fn load_channel(path: &Path) -> Result<ChannelMatrix, Error> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("qc") => channel_of_unitary(&Circuit::parse(&text)?.unitary()),
        Some("json") => {
            let v: Value = serde_json::from_str(&text)?;
            let is_unitary = v["entries"][0][0].as_array().is_some_and(|e| e.len() == 5);
            if is_unitary {
                channel_of_unitary(&Unitary::from_json(&text)?)
            } else {
                ChannelMatrix::from_json(&text)
            }
        }
        _ => Err(Error::Invalid(format!(
            "{}: expected a .qc or .json file",
            path.display()
        ))),
    }
}

fn paulis_json(d: &Decomposition) -> Vec<String> {
    d.paulis.iter().map(|p| p.to_string()).collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Tcount {
            input,
            method,
            frontier_cap,
            m_cap,
            no_join2,
            json,
            emit,
        } => {
            let cfg = HeuristicConfig {
                method: method_by_name(&method)?,
                frontier_cap,
                m_cap,
                join_first_two: !no_join2,
            };
            let u = load_channel(&input)?;
            let r = tcount::min_t_synth(&u, &cfg)?;
            let d = &r.decomposition;
            if let Some(path) = emit {
                std::fs::write(path, emit_circuit(d)?.to_text())?;
            }
            if json {
                let report = json!({
                    "input": input.display().to_string(),
                    "algorithm": "heuristic",
                    "parameters": {
                        "method": cfg.method.name(),
                        "frontier_cap": frontier_cap,
                        "m_cap": cfg.effective_m_cap(&u),
                        "join_first_two": !no_join2,
                    },
                    "tcount": d.tcount(),
                    "paulis": paulis_json(d),
                    "clifford_channel": d.clifford.to_json_value(),
                    "telemetry": r.telemetry,
                });
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("input         {}", input.display());
                println!("algorithm     heuristic (method {})", cfg.method.name());
                println!("tcount        {}", d.tcount());
                println!("paulis        {}", paulis_json(d).join(" "));
                println!("max_frontier  {}", r.telemetry.max_frontier);
                println!("levels        {:?}", r.telemetry.levels);
                println!("wall_ms       {}", r.telemetry.wall_ms);
            }
        }
        Cmd::TcountProvable {
            input,
            m,
            c,
            db_dir,
            mem_cap,
            no_decompose,
            json,
        } => {
            let cfg = ProvableConfig {
                m,
                c,
                mem_cap,
                db_dir,
            };
            cfg.validate()?;
            let u = load_channel(&input)?;
            let start = Instant::now();
            let search = ProvableSearch::new(u.n(), cfg.clone())?;
            let t = search.decide(&u)?;
            let d = match t {
                Some(t) if !no_decompose => Some(search.decompose(&u, t)?),
                _ => None,
            };
            let wall_ms = start.elapsed().as_millis();
            let db_sizes: Vec<usize> = search
                .databases()
                .levels()
                .iter()
                .map(|l| l.len())
                .collect();
            if json {
                let mut report = json!({
                    "input": input.display().to_string(),
                    "algorithm": "provable",
                    "parameters": {"m": m, "c": c, "depth": cfg.depth()},
                    "tcount": t,
                    "telemetry": {
                        "database_sizes": db_sizes,
                        "database_bytes": search.databases().approx_bytes(),
                        "wall_ms": wall_ms,
                    },
                });
                if let Some(d) = &d {
                    report["paulis"] = json!(paulis_json(d));
                    report["clifford_channel"] = d.clifford.to_json_value();
                }
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("input           {}", input.display());
                println!("algorithm       provable (m={m}, c={c})");
                match t {
                    Some(t) => println!("tcount          {t}"),
                    None => println!("tcount          NO (> {m})"),
                }
                if let Some(d) = &d {
                    println!("paulis          {}", paulis_json(d).join(" "));
                }
                println!("database_sizes  {db_sizes:?}");
                println!("wall_ms         {wall_ms}");
            }
        }
        Cmd::Gen {
            name,
            n,
            tgates,
            seed,
            out,
        } => {
            let c = if name == "random" {
                let (Some(n), Some(g)) = (n, tgates) else {
                    return Err(Error::Invalid("random needs --n and --tgates".into()));
                };
                fixtures::random_circuit(n, g, seed)?
            } else {
                fixtures::by_name(&name)?
            };
            match out {
                Some(path) if path.extension().is_some_and(|e| e == "json") => {
                    std::fs::write(path, c.unitary().to_json()?)?
                }
                Some(path) => std::fs::write(path, c.to_text())?,
                None => print!("{}", c.to_text()),
            }
        }
        Cmd::Bench {
            suite,
            repeat,
            solver,
            samples,
            seed,
            four_qubit,
            n,
            tgates,
            json,
        } => {
            if !solver_names().contains(&solver.as_str()) {
                return Err(Error::UnknownName {
                    kind: "solver",
                    name: solver,
                });
            }
            let rows = match suite {
                Suite::Table1 => bench_table1(&solver, repeat.max(1), four_qubit)?,
                Suite::Table2 => {
                    let grid = match (n, tgates) {
                        (Some(n), Some(g)) => vec![(n, g)],
                        _ => vec![(2, 10), (2, 20), (3, 10)],
                    };
                    bench_table2(&solver, repeat.max(1), samples, seed, &grid)?
                }
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                print_table(&rows);
            }
        }
    }
    Ok(())
}

fn solve_timed(
    solver: &str,
    u: &ChannelMatrix,
    bound: usize,
) -> Result<(Option<usize>, f64, usize), Error> {
    let opts = SolverOptions {
        provable: ProvableConfig::new(bound.max(1), 2)?,
        provable_decompose: false,
        brute_mmax: bound,
        ..Default::default()
    };
    let s = solver_by_name(solver, &opts)?;
    let start = Instant::now();
    let sol = s.solve(u)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(d) = &sol.decomposition {
        d.verify(u)?;
    }
    let frontier = sol.telemetry.map(|t| t.max_frontier).unwrap_or(0);
    Ok((sol.tcount, ms, frontier))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn bench_table1(solver: &str, repeat: usize, four_qubit: bool) -> Result<Vec<Value>, Error> {
    let mut names = vec![
        "toffoli",
        "fredkin",
        "peres",
        "quantum_or",
        "negated_toffoli",
    ];
    if four_qubit {
        names.extend(["adder4", "u2"]);
    }
    let mut rows = Vec::new();
    for name in names {
        let c = fixtures::by_name(name)?;
        let u = channel_of_unitary(&c.unitary())?;
        let mut times = Vec::new();
        let mut counts = Vec::new();
        let mut frontier = 0;
        for _ in 0..repeat {
            let (t, ms, f) = solve_timed(solver, &u, c.t_count())?;
            counts.push(t);
            times.push(ms);
            frontier = frontier.max(f);
        }
        let (mean, std) = mean_std(&times);
        rows.push(json!({
            "circuit": name,
            "n": c.n(),
            "tcount": counts[0],
            "stable": counts.iter().all(|t| *t == counts[0]),
            "wall_ms_mean": mean,
            "wall_ms_std": std,
            "max_frontier": frontier,
        }));
    }
    Ok(rows)
}

fn bench_table2(
    solver: &str,
    repeat: usize,
    samples: usize,
    seed: u64,
    grid: &[(usize, usize)],
) -> Result<Vec<Value>, Error> {
    let mut rows = Vec::new();
    for (row, &(n, g)) in grid.iter().enumerate() {
        let mut times = Vec::new();
        let mut counts = Vec::new();
        let mut frontier = 0;
        let mut within = true;
        for s in 0..samples {
            let sample_seed = seed
                .wrapping_mul(1_000_003)
                .wrapping_add((row * 10_000 + s) as u64);
            let c = fixtures::random_circuit(n, g, sample_seed)?;
            let u = channel_of_unitary(&c.unitary())?;
            for _ in 0..repeat {
                let (t, ms, f) = solve_timed(solver, &u, g)?;
                within &= t.is_some_and(|t| t <= g);
                counts.push(t.map_or(f64::NAN, |t| t as f64));
                times.push(ms);
                frontier = frontier.max(f);
            }
        }
        let (mean, std) = mean_std(&times);
        let (tmean, _) = mean_std(&counts);
        rows.push(json!({
            "circuit": format!("random n={n} g={g}"),
            "n": n,
            "tgates": g,
            "samples": samples,
            "tcount_mean": tmean,
            "tcount_max": counts.iter().copied().fold(0.0, f64::max),
            "all_within_bound": within,
            "wall_ms_mean": mean,
            "wall_ms_std": std,
            "max_frontier": frontier,
        }));
    }
    Ok(rows)
}

fn print_table(rows: &[Value]) {
    println!(
        "{:<22} {:>2} {:>8} {:>12} {:>10} {:>9}",
        "circuit", "n", "tcount", "wall_ms", "std_ms", "frontier"
    );
    for r in rows {
        let t = if r["tcount"].is_null() && r["tcount_mean"].is_null() {
            "-".to_string()
        } else if let Some(t) = r["tcount"].as_u64() {
            t.to_string()
        } else {
            format!("{:.1}", r["tcount_mean"].as_f64().unwrap_or(f64::NAN))
        };
        println!(
            "{:<22} {:>2} {:>8} {:>12.1} {:>10.1} {:>9}",
            r["circuit"].as_str().unwrap_or(""),
            r["n"],
            t,
            r["wall_ms_mean"].as_f64().unwrap_or(0.0),
            r["wall_ms_std"].as_f64().unwrap_or(0.0),
            r["max_frontier"]
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Invalid("x".into())), 1);
        assert_eq!(
            exit_code(&Error::Inconclusive {
                m_cap: 3,
                overflowed: false
            }),
            2
        );
        assert_eq!(
            exit_code(&Error::Inconclusive {
                m_cap: 3,
                overflowed: true
            }),
            3
        );
        assert_eq!(
            exit_code(&Error::DatabaseTooLarge {
                level: 2,
                entries: 1,
                bytes: 9
            }),
            3
        );
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
