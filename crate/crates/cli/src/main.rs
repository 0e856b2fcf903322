//! Command-line surface: compute counts, run check suites, parameter
//! sweeps, exhaustive small-case verification, and the exact exponent
//! table. Outputs are byte-identical for identical invocations, including
//! across worker-thread counts.
//!
//! Exit status: 0 = success (all assertions pass), 1 = at least one
//! assertion failed (the report is still written), 2 = input error.

mod input;
mod output;

use anyhow::{anyhow, Context as _};
use bisector_lab::checks::{self, exponents, CheckMode, CheckReport};
use bisector_lab::counting::{naive, PlaneSet};
use bisector_lab::field::make_modulus;
use bisector_lab::gen::{self, GenSpec, Generated};
use bisector_lab::sumprod::{self, ResidueSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::ToPrimitive;
use output::{check_row, check_row_csv, json_count, render_ratio, skipped_row, to_json_string};
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bisector-lab",
    version,
    about = "Exact counting and verification for planar distance geometry and residue-set energies over prime fields"
)]
struct Cli {
    /// Worker threads (default: BISECTOR_LAB_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// Exact assertions only
    Exact,
    /// Ratio dashboards only
    Dashboards,
    /// Everything
    All,
}

#[derive(Args)]
struct SetArgs {
    /// Prime modulus; required with --input
    #[arg(long)]
    p: Option<u64>,
    /// Set file: one "x y" point per line (plane) or one residue per line
    #[arg(long, conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generator spec: family:p:size:seed[:k=v,...]
    #[arg(long)]
    gen: Option<String>,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every count for the input set
    Counts(SetArgs),
    /// Run the check registry; exit 1 if any assertion fails
    Verify {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Deterministic generator sweep, one CSV row per trial
    Sweep {
        /// Base generator spec (plane families only)
        #[arg(long)]
        gen: String,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Overrides the seed inside the spec; trial i uses seed + i
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively verify every identity over all subsets of F_p^2
    /// (p = 3), or over all k-subsets with --k
    Exhaustive {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print the exact exponent-arithmetic table
    Exponents {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads(flag: Option<usize>) {
    let from_env = std::env::var("BISECTOR_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = flag.or(from_env) {
        // The global pool can only be set once; a second call erroring is
        // exactly the semantics we want.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Counts(args) => {
            let (set, origin) = load_set(&args)?;
            let report = match &set {
                Generated::Plane(s) => plane_counts(s, &origin),
                Generated::Residue(a) => residue_counts(a, &origin),
            };
            emit(&args.out, &render(report, args.format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { set: args, suite } => {
            let (set, origin) = load_set(&args)?;
            let (rows, failures) = verify_rows(&set, suite);
            let mut report = Map::new();
            report.insert("command".into(), json!("verify"));
            report.insert("input".into(), json!(origin));
            report.insert(
                "suite".into(),
                json!(match suite {
                    Suite::Exact => "exact",
                    Suite::Dashboards => "dashboards",
                    Suite::All => "all",
                }),
            );
            report.insert("assert_failures".into(), json!(failures));
            report.insert("rows".into(), Value::Array(rows));
            emit(&args.out, &render(Value::Object(report), args.format))?;
            Ok(if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Sweep {
            gen,
            trials,
            seed,
            out,
        } => {
            let text = sweep_csv(&gen, trials, seed)?;
            emit(&out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Exhaustive { p, k, out, format } => {
            let (report, failures) = exhaustive_report(p, k)?;
            emit(&out, &render(report, format))?;
            Ok(if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Exponents { out, format } => {
            emit(&out, &render(exponent_table(), format))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_set(args: &SetArgs) -> anyhow::Result<(Generated, String)> {
    match (&args.input, &args.gen) {
        (Some(path), None) => {
            let p = args
                .p
                .ok_or_else(|| anyhow!("--p is required with --input"))?;
            let m = make_modulus(p)?;
            let set = input::read_set_file(path, m)?;
            Ok((set, path.display().to_string()))
        }
        (None, Some(spec_str)) => {
            let spec = GenSpec::parse(spec_str)?;
            if let Some(p) = args.p {
                if p != spec.p {
                    return Err(anyhow!(
                        "--p {p} disagrees with the generator spec ({})",
                        spec.p
                    ));
                }
            }
            let set = gen::generate(&spec)?;
            Ok((set, spec.render()))
        }
        _ => Err(anyhow!("exactly one of --input or --gen is required")),
    }
}

fn plane_counts(set: &PlaneSet, origin: &str) -> Value {
    let hist = set.distance_histogram();
    let delta = set.distance_set();
    let mut out = Map::new();
    out.insert("command".into(), json!("counts"));
    out.insert("input".into(), json!(origin));
    out.insert("kind".into(), json!("plane"));
    out.insert("p".into(), json!(set.modulus().p()));
    out.insert("n".into(), json!(set.len()));
    out.insert("delta_size".into(), json!(delta.len()));
    out.insert("delta_nonzero".into(), json!(set.nonzero_distance_count()));
    out.insert("nu_total".into(), json_count(hist.total()));
    out.insert(
        "nu_max".into(),
        json_count(hist.counts().values().copied().max().unwrap_or(0) as u128),
    );
    out.insert("second_moment".into(), json_count(hist.second_moment()));
    out.insert("t_count".into(), json_count(set.isosceles_count()));
    out.insert("rect_count".into(), json_count(set.rectangle_count()));
    out.insert("q_count".into(), json_count(set.bisector_energy()));
    out.insert(
        "para_count".into(),
        json_count(set.paraboloid_quadruples()),
    );
    out.insert(
        "bisector_incidences".into(),
        json_count(set.bisector_incidences()),
    );
    Value::Object(out)
}

fn residue_counts(a: &ResidueSet, origin: &str) -> Value {
    let mut out = Map::new();
    out.insert("command".into(), json!("counts"));
    out.insert("input".into(), json!(origin));
    out.insert("kind".into(), json!("residue"));
    out.insert("p".into(), json!(a.modulus().p()));
    out.insert("n".into(), json!(a.len()));
    if a.is_empty() {
        return Value::Object(out);
    }
    let prof = sumprod::mk_profile(a);
    let sets = sumprod::dist_like_sets(a, None).expect("same modulus");
    let diff = sumprod::difference_set(a, a).expect("same modulus");
    out.insert("diff_size".into(), json!(diff.len()));
    out.insert("square_diff_size".into(), json!(sets.square_diff.len()));
    out.insert(
        "m_ratio".into(),
        json!(format!("{}/{}", prof.m_ratio.numer(), prof.m_ratio.denom())),
    );
    out.insert(
        "k_ratio".into(),
        json!(format!("{}/{}", prof.k_ratio.numer(), prof.k_ratio.denom())),
    );
    out.insert("e4".into(), json_count(sumprod::e4_energy(a)));
    out.insert("popular_size".into(), json!(sumprod::popular_set(a).len()));
    out.insert("chi".into(), json_count(sumprod::chi(a)));
    out.insert(
        "variant_diff_size".into(),
        json!(sets.diff_squares_diff.len()),
    );
    Value::Object(out)
}

/// Names of the mod-4-gated planar assertions, for SKIPPED rows.
const GATED_CHECKS: &[&str] = &[
    "bisector_energy_bound",
    "paraboloid_rectangle_identity",
    "isosceles_incidence_identity",
    "second_moment_isosceles_bound",
];

fn verify_rows(set: &Generated, suite: Suite) -> (Vec<Value>, usize) {
    let mut reports: Vec<CheckReport> = Vec::new();
    let mut skipped: Vec<Value> = Vec::new();
    match set {
        Generated::Plane(s) => {
            if suite != Suite::Dashboards {
                if s.modulus().is_three_mod_four() {
                    reports.extend(checks::plane_assert_suite(s));
                } else {
                    for name in GATED_CHECKS {
                        skipped.push(skipped_row(name, "requires p = 3 (mod 4)"));
                    }
                    match checks::check_distance_lower_bound(s) {
                        Ok(r) => reports.push(r),
                        Err(_) => skipped.push(skipped_row(
                            "distance_set_cauchy_schwarz",
                            "requires a nonempty set",
                        )),
                    }
                }
            }
            if suite != Suite::Exact {
                reports.push(checks::report_isosceles_bound(s));
                match checks::report_distance_chain(s) {
                    Ok(rows) => reports.extend(rows),
                    Err(_) => skipped.push(skipped_row(
                        "isosceles_chain_dashboard",
                        "requires p = 3 (mod 4)",
                    )),
                }
            }
        }
        Generated::Residue(a) => {
            if a.is_empty() {
                skipped.push(skipped_row("residue_suite", "requires a nonempty set"));
            } else {
                let keep = |r: &CheckReport| match suite {
                    Suite::Exact => r.mode == CheckMode::Assert,
                    Suite::Dashboards => r.mode == CheckMode::Report,
                    Suite::All => true,
                };
                reports.extend(checks::residue_suite(a).into_iter().filter(keep));
            }
        }
    }
    let failures = reports
        .iter()
        .filter(|r| r.mode == CheckMode::Assert && !r.pass)
        .count();
    let mut rows: Vec<Value> = reports.iter().map(check_row).collect();
    rows.extend(skipped);
    // Deterministic emission order regardless of how the suite ran.
    rows.sort_by(|a, b| {
        let key = |v: &Value| {
            (
                v["name"].as_str().unwrap_or_default().to_string(),
                v["context"].as_str().unwrap_or_default().to_string(),
            )
        };
        key(a).cmp(&key(b))
    });
    (rows, failures)
}

const SWEEP_COLUMNS: &[&str] = &[
    "p",
    "family",
    "seed",
    "n",
    "delta",
    "t",
    "rect",
    "q",
    "para",
    "ratio_energy_bound",
    "ratio_isosceles",
    "ratio_chain",
    "log_delta_over_log_n",
];

fn sweep_csv(gen_str: &str, trials: u64, seed_override: Option<u64>) -> anyhow::Result<String> {
    let mut base = GenSpec::parse(gen_str)?;
    if !base.family.is_plane() {
        return Err(anyhow!(
            "sweep requires a plane family, got {}",
            base.family.name()
        ));
    }
    if let Some(seed) = seed_override {
        base.seed = seed;
    }
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(SWEEP_COLUMNS)?;
    for trial in 0..trials {
        let mut spec = base.clone();
        spec.seed = base.seed.wrapping_add(trial);
        let set = gen::generate(&spec)?;
        let set = set.as_plane().expect("plane family");
        let n = set.len() as f64;
        let delta = set.distance_set().len() as u128;
        let t = set.isosceles_count();
        let rect = set.rectangle_count();
        let q = set.bisector_energy();
        let para = set.paraboloid_quadruples();

        let ln_n = if set.len() <= 1 { 1.0 } else { n.ln() };
        let deltaf = delta as f64;
        let energy_rhs = 2.0 * deltaf * (rect as f64 + n * n);
        let ratio_energy = if energy_rhs == 0.0 {
            0.0
        } else {
            q as f64 / energy_rhs
        };
        let iso_rhs = n * n * ln_n + n.powf(5.0 / 3.0) * (q as f64).powf(4.0 / 15.0);
        let ratio_iso = if iso_rhs == 0.0 {
            0.0
        } else {
            t as f64 / iso_rhs
        };
        let chain_rhs = n * n * ln_n
            + deltaf.powf(4.0 / 15.0) * n.powf(33.0 / 15.0)
            + n.powf(5.0 / 3.0) * deltaf.powf(4.0 / 15.0) * (rect as f64).powf(4.0 / 15.0);
        let ratio_chain = if chain_rhs == 0.0 {
            0.0
        } else {
            t as f64 / chain_rhs
        };
        let log_ratio = if set.len() <= 1 || delta == 0 {
            0.0
        } else {
            deltaf.ln() / n.ln()
        };

        wtr.write_record(&[
            spec.p.to_string(),
            spec.family.name().to_string(),
            spec.seed.to_string(),
            set.len().to_string(),
            delta.to_string(),
            t.to_string(),
            rect.to_string(),
            q.to_string(),
            para.to_string(),
            render_ratio(ratio_energy),
            render_ratio(ratio_iso),
            render_ratio(ratio_chain),
            render_ratio(log_ratio),
        ])?;
    }
    Ok(String::from_utf8(wtr.into_inner()?)?)
}

fn exhaustive_report(p: u64, k: Option<u64>) -> anyhow::Result<(Value, usize)> {
    let m = make_modulus(p)?;
    let started = std::time::Instant::now();
    let mut failures = 0usize;
    let mut subsets = 0usize;
    let mut run_one = |set: &PlaneSet| {
        subsets += 1;
        if !exhaustive_identities_hold(set) {
            failures += 1;
        }
    };
    match k {
        None => {
            for set in gen::all_plane_subsets(m)? {
                run_one(&set);
            }
        }
        Some(k) => {
            let ground = PlaneSet::new(
                m,
                (0..m.p()).flat_map(|x| (0..m.p()).map(move |y| bisector_lab::Point2::new(x, y))),
            );
            for set in gen::plane_k_subsets(m, &ground, k)? {
                run_one(&set);
            }
        }
    }
    let mut out = Map::new();
    out.insert("command".into(), json!("exhaustive"));
    out.insert("p".into(), json!(p));
    out.insert("k".into(), k.map_or(Value::Null, |k| json!(k)));
    out.insert("subsets".into(), json!(subsets));
    out.insert("failures".into(), json!(failures));
    out.insert(
        "elapsed_ms".into(),
        json!(started.elapsed().as_millis() as u64),
    );
    Ok((Value::Object(out), failures))
}

/// The full identity battery for one subset: engine-oracle agreement plus
/// every assertion in the registry.
fn exhaustive_identities_hold(set: &PlaneSet) -> bool {
    let n = set.len() as u128;
    let hist = set.distance_histogram();
    let mut ok = hist.total() == n * n;
    ok &= hist.second_moment() == naive::equal_distance_quadruples(set);
    ok &= set.isosceles_count() == naive::isosceles_count(set);
    ok &= set.rectangle_count() == naive::rectangle_count(set);
    ok &= set.bisector_energy() == naive::bisector_energy(set);
    ok &= set.bisector_energy() == set.bisector_partition().energy();
    ok &= set.paraboloid_quadruples() == naive::paraboloid_quadruples(set);
    ok &= set.bisector_incidences() == naive::bisector_incidences(set);
    if set.modulus().is_three_mod_four() {
        ok &= set.paraboloid_quadruples() == set.rectangle_count() + n * n - n;
        ok &= set.isosceles_count() == set.bisector_incidences() + n * n - n;
    }
    ok && checks::plane_assert_suite(set).iter().all(|r| r.pass)
}

fn exponent_table() -> Value {
    let chain = exponents::ExponentExpr::isosceles_chain();
    let main = exponents::solve_distance_exponent(&chain, &exponents::rat(99, 41))
        .expect("solvable");
    let squared =
        exponents::solve_distance_exponent(&chain, &exponents::rat(2, 1)).expect("solvable");
    let conjectured = exponents::solve_distance_exponent(
        &exponents::ExponentExpr::conjectured_chain(),
        &exponents::rat(2, 1),
    )
    .expect("solvable");
    let (eps, variant) = exponents::epsilon_balance();

    let rat_str = |r: &num::BigRational| format!("{}/{}", r.numer(), r.denom());
    let rat_f64 = |r: &num::BigRational| r.to_f64().unwrap();
    let offset = main.overall.clone() - exponents::rat(1, 2);

    let row = |name: &str, value: &num::BigRational, note: &str| {
        let mut r = Map::new();
        r.insert("name".into(), json!(name));
        r.insert("value".into(), json!(rat_str(value)));
        r.insert("approx".into(), json!(render_ratio(rat_f64(value))));
        r.insert("note".into(), json!(note));
        Value::Object(r)
    };

    let mut out = Map::new();
    out.insert("command".into(), json!("exponents"));
    out.insert(
        "main_chain_per_term".into(),
        json!(main.per_term.iter().map(&rat_str).collect::<Vec<_>>()),
    );
    out.insert(
        "rows".into(),
        json!([
            row(
                "distance_exponent_main",
                &main.overall,
                "rectangle exponent 99/41; equals 1/2 + 69/1558"
            ),
            row(
                "offset_above_half",
                &offset,
                "distance_exponent_main minus 1/2"
            ),
            row(
                "distance_exponent_rect_squared",
                &squared.overall,
                "rectangle exponent 2 (improved rectangle bound only)"
            ),
            row(
                "distance_exponent_conjectured",
                &conjectured.overall,
                "conjectured incidence and rectangle inputs"
            ),
            row("variant_epsilon", &eps, "balancing parameter"),
            row("variant_distance_exponent", &variant, "equals 3/2 + 1/142"),
        ]),
    );
    Value::Object(out)
}

fn render(report: Value, format: Format) -> String {
    match format {
        Format::Json => to_json_string(&report),
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            match report.get("rows") {
                Some(Value::Array(rows)) if rows.iter().all(|r| r.get("name").is_some()) => {
                    let headers: Vec<&str> = if report["command"] == "exponents" {
                        vec!["name", "value", "approx", "note"]
                    } else {
                        vec!["name", "mode", "lhs", "rhs", "ratio", "status", "context"]
                    };
                    wtr.write_record(&headers).unwrap();
                    for row in rows {
                        if report["command"] == "exponents" {
                            let get = |k: &str| {
                                row.get(k)
                                    .and_then(|v| v.as_str())
                                    .unwrap_or_default()
                                    .to_string()
                            };
                            wtr.write_record([
                                get("name"),
                                get("value"),
                                get("approx"),
                                get("note"),
                            ])
                            .unwrap();
                        } else {
                            wtr.write_record(check_row_csv(row)).unwrap();
                        }
                    }
                }
                _ => {
                    // Flat single-object report: header line then one row.
                    if let Value::Object(map) = &report {
                        let keys: Vec<&String> = map.keys().collect();
                        wtr.write_record(keys.iter().map(|k| k.as_str())).unwrap();
                        wtr.write_record(map.values().map(|v| match v {
                            Value::String(s) => s.clone(),
                            Value::Null => String::new(),
                            other => other.to_string(),
                        }))
                        .unwrap();
                    }
                }
            }
            String::from_utf8(wtr.into_inner().unwrap()).unwrap()
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}
