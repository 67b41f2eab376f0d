//! `tgrid` — batch front end for exact threshold-function counting,
//! verification sweeps, error-term studies and labeling checks.

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use tgrid_core::asymptotics::{
    fit_exponent, sweep_with_cap, synthetic_power_law, write_csv, ResidualRecord, SweepShape,
};
use tgrid_core::counting::{
    f_moebius, f_naive, f_q_moebius, f_q_naive, part1_identity_check, GridDims,
};
use tgrid_core::moebius::MoebiusTable;
use tgrid_core::separability::{
    count_by_enumeration, is_threshold, verify_witness, Labeling, DEFAULT_ENUMERATION_CAP,
    MAX_ENUMERATION_CAP,
};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "tgrid", version, about = "Threshold functions on rectangular grids: exact counts, oracles and error-term studies")]
struct Cli {
    /// Worker threads (default: available parallelism). `--workers 1`
    /// forces sequential execution for reproducibility audits.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output format for `count`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Naive,
    Moebius,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Square,
    FixedM,
    AspectRatio,
}

#[derive(Subcommand)]
enum Command {
    /// Print f(m,n) and t(m,n), or f_q(m,n) with --q.
    Count {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Moebius)]
        method: MethodArg,
        /// Restrict to pairs with gcd exactly q.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Cross-check the enumeration oracle, both evaluators and the exact
    /// moment-sum identity on all grids up to a cell budget.
    Verify {
        /// Largest m*n for the enumeration oracle (hard cap 24).
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        max_cells: u64,
        /// Allow cell budgets up to 24 (2^24 feasibility calls).
        #[arg(long)]
        unsafe_cap: bool,
    },
    /// Emit a residual CSV plus a summary line with measured maxima and
    /// the fitted log-log exponent.
    ErrorStudy {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        /// Fixed smaller dimension (fixed-m shape only).
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        max_n: u64,
        /// Destination path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sweep-size ceiling.
        #[arg(long, default_value_t = tgrid_core::asymptotics::DEFAULT_MAX_SWEEP_N)]
        cap: u64,
        /// Replace the sweep with synthetic |residual| = (mn)^EXP records.
        #[arg(long, hide = true, value_name = "EXP")]
        synthetic_power: Option<f64>,
    },
    /// Decide whether a labeling file is a threshold function.
    Check {
        /// Labeling text file: first line "m n", then n rows of 0/1.
        file: PathBuf,
    },
    /// Time the naive evaluator against the accelerated one.
    Bench {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 3)]
        reps: u32,
    },
}

#[derive(Serialize)]
struct BenchReport {
    method: String,
    m: u64,
    n: u64,
    reps: u32,
    seconds: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .expect("rayon pool configured once");
    }
    let code = match cli.command {
        Command::Count { m, n, method, q } => cmd_count(m, n, method, q, cli.format),
        Command::Verify {
            max_cells,
            unsafe_cap,
        } => cmd_verify(max_cells, unsafe_cap),
        Command::ErrorStudy {
            shape,
            m,
            max_n,
            out,
            cap,
            synthetic_power,
        } => cmd_error_study(shape, m, max_n, out, cap, synthetic_power),
        Command::Check { file } => cmd_check(&file),
        Command::Bench { m, n, reps } => cmd_bench(m, n, reps),
    };
    ExitCode::from(code)
}

fn cmd_count(m: u64, n: u64, method: MethodArg, q: Option<u64>, format: Format) -> u8 {
    let dims = match GridDims::new(m, n) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let table = MoebiusTable::sieve((m.max(n) as usize).saturating_sub(1).max(1))
        .expect("positive sieve limit");
    match (q, method) {
        (Some(_), MethodArg::Oracle) => {
            eprintln!("error: --q cannot be combined with the oracle method");
            EXIT_USAGE
        }
        (Some(q), method) => {
            if q == 0 {
                eprintln!("error: --q must be at least 1");
                return EXIT_USAGE;
            }
            let f_q = match method {
                MethodArg::Naive => f_q_naive(dims, q),
                _ => f_q_moebius(dims, q, &table),
            }
            .expect("validated inputs");
            match format {
                Format::Text => println!("f_{q}={f_q}"),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({ "m": m, "n": n, "q": q, "f_q": f_q.to_string() })
                ),
            }
            0
        }
        (None, MethodArg::Oracle) => {
            match count_by_enumeration(dims, DEFAULT_ENUMERATION_CAP) {
                Ok(t) => {
                    match format {
                        Format::Text => println!("t={t}"),
                        Format::Json => println!(
                            "{}",
                            serde_json::json!({ "m": m, "n": n, "t": t.to_string() })
                        ),
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CAP
                }
            }
        }
        (None, method) => {
            let f = match method {
                MethodArg::Naive => f_naive(dims),
                _ => f_moebius(dims, &table).expect("table sized to dims"),
            };
            let t: BigInt = &f + 2;
            match format {
                Format::Text => println!("f={f} t={t}"),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({ "m": m, "n": n, "f": f.to_string(), "t": t.to_string() })
                ),
            }
            0
        }
    }
}

fn cmd_verify(max_cells: u64, unsafe_cap: bool) -> u8 {
    let cap = if unsafe_cap {
        MAX_ENUMERATION_CAP
    } else {
        DEFAULT_ENUMERATION_CAP
    };
    if max_cells > cap {
        eprintln!("error: cap exceeded: --max-cells {max_cells} is above the limit of {cap}");
        return EXIT_USAGE;
    }
    let table = MoebiusTable::sieve(512).expect("positive sieve limit");
    let mut all_pass = true;
    println!(
        "{:<8}{:>10}{:>10}{:>11}  status",
        "grid", "oracle", "naive+2", "moebius+2"
    );
    let mut m = 2;
    while m * m <= max_cells {
        let mut n = m;
        while m * n <= max_cells {
            let dims = GridDims::new(m, n).expect("m,n >= 2");
            let oracle = count_by_enumeration(dims, max_cells).expect("within cap");
            let naive = f_naive(dims) + 2;
            let moebius = f_moebius(dims, &table).expect("table is large enough") + 2;
            let ok = oracle == naive && naive == moebius;
            all_pass &= ok;
            println!(
                "{:<8}{:>10}{:>10}{:>11}  {}",
                format!("{m}x{n}"),
                oracle.to_string(),
                naive.to_string(),
                moebius.to_string(),
                if ok { "PASS" } else { "FAIL" }
            );
            n += 1;
        }
        m += 1;
    }
    // evaluator equivalence battery
    let mut equiv_ok = true;
    for m in 2..=80u64 {
        for n in 2..=80u64 {
            let dims = GridDims::new(m, n).expect("m,n >= 2");
            if f_naive(dims) != f_moebius(dims, &table).expect("table is large enough") {
                equiv_ok = false;
            }
        }
    }
    all_pass &= equiv_ok;
    println!(
        "evaluator equivalence on 2..=80 square: {}",
        if equiv_ok { "PASS" } else { "FAIL" }
    );
    // moment-sum identity battery, deterministic pseudo-random pairs
    let mut ident_ok = true;
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) % 300 + 1
    };
    for _ in 0..50 {
        let (m, n) = (next(), next());
        if !part1_identity_check(m, n, &table).expect("table is large enough") {
            ident_ok = false;
        }
    }
    all_pass &= ident_ok;
    println!(
        "moment-sum identity on 50 pseudo-random pairs: {}",
        if ident_ok { "PASS" } else { "FAIL" }
    );
    if all_pass {
        0
    } else {
        EXIT_MISMATCH
    }
}

fn summarize(records: &[ResidualRecord]) -> String {
    let max_abs = |f: fn(&ResidualRecord) -> f64| {
        records
            .iter()
            .map(|r| f(r).abs())
            .fold(0.0f64, f64::max)
    };
    let fit = fit_exponent(records);
    let fit_text = match fit {
        Ok(fit) => format!("slope={:.4} r2={:.4}", fit.slope, fit.r2),
        Err(e) => format!("fit unavailable ({e})"),
    };
    format!(
        "records={} max|norm_mn2|={:.6} max|norm_n3|={:.6} max|norm_conj|={:.6} {fit_text}",
        records.len(),
        max_abs(|r| r.norm_mn2),
        max_abs(|r| r.norm_n3),
        max_abs(|r| r.norm_conj),
    )
}

fn cmd_error_study(
    shape: ShapeArg,
    m: Option<u64>,
    max_n: u64,
    out: Option<PathBuf>,
    cap: u64,
    synthetic_power: Option<f64>,
) -> u8 {
    let records = if let Some(exp) = synthetic_power {
        synthetic_power_law(exp, max_n.saturating_sub(1) as usize)
    } else {
        let shape = match shape {
            ShapeArg::Square => SweepShape::Square { max_n },
            ShapeArg::FixedM => match m {
                Some(m) => SweepShape::FixedM { m, max_n },
                None => {
                    eprintln!("error: --shape fixed-m requires --m");
                    return EXIT_USAGE;
                }
            },
            ShapeArg::AspectRatio => SweepShape::SqrtAspect { max_n },
        };
        match sweep_with_cap(shape, cap) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        }
    };
    let summary = summarize(&records);
    match out {
        Some(path) => {
            let mut file = match std::fs::File::create(&path) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            };
            write_csv(&records, &mut file).and_then(|_| file.flush()).expect("csv write");
            println!("{summary}");
        }
        None => {
            let stdout = std::io::stdout();
            write_csv(&records, &mut stdout.lock()).expect("csv write");
            eprintln!("{summary}");
        }
    }
    0
}

fn cmd_check(path: &std::path::Path) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let labeling = match Labeling::parse(&text) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match is_threshold(&labeling) {
        Some(w) => {
            debug_assert!(verify_witness(&labeling, &w));
            println!("THRESHOLD a={} b={} c={}", w.a, w.b, w.c);
        }
        None => println!("NOT-THRESHOLD"),
    }
    0
}

fn time_evals<F: FnMut() -> BigInt>(reps: u32, mut eval: F) -> (BigInt, f64) {
    let start = Instant::now();
    let mut value = eval();
    for _ in 1..reps {
        value = eval();
    }
    (value, start.elapsed().as_secs_f64() / reps as f64)
}

fn cmd_bench(m: u64, n: u64, reps: u32) -> u8 {
    let dims = match GridDims::new(m, n) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if reps == 0 {
        eprintln!("error: --reps must be at least 1");
        return EXIT_USAGE;
    }
    let table = MoebiusTable::sieve((m.max(n) as usize - 1).max(1)).expect("positive sieve limit");
    let (naive_value, naive_secs) = time_evals(reps, || f_naive(dims));
    let (moebius_value, moebius_secs) =
        time_evals(reps, || f_moebius(dims, &table).expect("table sized to dims"));
    assert_eq!(naive_value, moebius_value, "evaluator mismatch");
    let reports = [
        BenchReport {
            method: "naive".into(),
            m,
            n,
            reps,
            seconds: naive_secs,
        },
        BenchReport {
            method: "moebius".into(),
            m,
            n,
            reps,
            seconds: moebius_secs,
        },
    ];
    println!("{}", serde_json::to_string_pretty(&reports).expect("serializable"));
    eprintln!(
        "speedup naive/moebius: {:.2}x",
        naive_secs / moebius_secs.max(f64::EPSILON)
    );
    0
}
