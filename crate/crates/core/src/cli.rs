//! Command line front end.
//!
//! Exit codes: 0 success, 2 precondition violation, 3 solver failure, 4 I/O error.
//! Verbosity is taken from the `RFRAMES_LOG` environment variable.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::{
    denoise_cases, known_set, missing_cases, periodic_signal, run_denoise_case, run_missing_case,
    worked_examples, DENOISE_N, MISSING_N, MISSING_P, MISSING_PERIODS,
};
use crate::filterbank::{identify_period, RamanujanFilterBank, DEFAULT_ZERO_TOL};
use crate::frame::{frame_operator_bounds, frame_report};
use crate::io::{round_sig, to_json_string, write_atomic};
use crate::number_theory::{divisor_list, ramanujan_sum};
use crate::random::seeded;
use crate::recovery::{
    add_noise, denoise, denoise_condition, detect_support_set, missing_condition, recover_missing,
    recover_missing_periodic, snr_of, truncated_sum, CoefficientSet, NoiseModel, DEFAULT_THRESHOLD,
};
use crate::signal::Signal;
use crate::subspace::{
    erasure_scan, fusion_after_local_erasures, fusion_frame_check, robust_to_erasures,
    ERASURE_SCAN_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "rframes", version, about = "Ramanujan filter bank frames and recovery")]
pub struct Cli {
    /// Output format for the report printed on stdout.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reproduction {
    Examples,
    Tables,
    Erasures,
    Fusion,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print c_q(n) for n = 0..N-1.
    Rsum {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
    },
    /// Frame bounds and polyphase ranks of a bank.
    FrameCheck {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Bank description (JSON); overrides --n/--p.
        #[arg(long)]
        bank: Option<PathBuf>,
        /// Also compute the bounds from the full frame operator.
        #[arg(long)]
        crosscheck: bool,
    },
    /// Estimate the period of a signal from its channel energies.
    PeriodId {
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover a signal from a bank output with missing coefficients.
    Recover {
        /// Recovery request (JSON); replaces the other inputs.
        #[arg(long)]
        request: Option<PathBuf>,
        #[arg(long)]
        signal: Option<PathBuf>,
        #[arg(long)]
        bank: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Missing coefficients as {"pairs": [[k, i], ...]}, i 1-based.
        #[arg(long)]
        missing: Option<PathBuf>,
        /// Known periodic components, e.g. 5,7.
        #[arg(long, value_delimiter = ',')]
        periods: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove noise by l1 fitting onto the detected channels.
    Denoise {
        #[arg(long)]
        request: Option<PathBuf>,
        #[arg(long)]
        signal: Option<PathBuf>,
        #[arg(long)]
        bank: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Add Gaussian noise at this SNR before denoising; the signal is then the clean reference.
        #[arg(long)]
        snr_db: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the worked examples, scenario tables, erasure and fusion checks.
    Reproduce {
        #[arg(value_enum)]
        which: Reproduction,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn init_logging() {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("RFRAMES_LOG"))
        .format_timestamp(None)
        .try_init();
}

fn fmt_or(cli: &Cli, default: Format) -> Format {
    cli.format.unwrap_or(default)
}

fn bank_from(bank: &Option<PathBuf>, n: Option<usize>, p: Option<usize>, fallback_n: Option<usize>) -> Result<RamanujanFilterBank> {
    if let Some(path) = bank {
        return RamanujanFilterBank::load(path);
    }
    let n = n
        .or(fallback_n)
        .ok_or_else(|| Error::domain("either --bank or --n is required"))?;
    RamanujanFilterBank::uniform(n, p.unwrap_or(1))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_out(dir: &Option<PathBuf>, name: &str, content: &str) -> Result<()> {
    if let Some(d) = dir {
        ensure_dir(d)?;
        write_atomic(&d.join(name), content.as_bytes())?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<String> {
    log::debug!("command: {:?}", cli.command);
    match &cli.command {
        Command::Rsum { q, n } => {
            let r = ramanujan_sum(*q, *n)?;
            Ok(match fmt_or(cli, Format::Csv) {
                Format::Csv => {
                    let parts: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
                    format!("{}\n", parts.join(","))
                }
                Format::Json => to_json_string(&json!({"q": q, "n": n, "values": r.values}))?,
            })
        }
        Command::FrameCheck {
            n,
            p,
            bank,
            crosscheck,
        } => {
            let bank = bank_from(bank, *n, *p, None)?;
            let mut text = String::new();
            if bank.decimation().is_some() {
                let r = frame_report(&bank)?;
                text = match fmt_or(cli, Format::Json) {
                    Format::Json => to_json_string(&r)?,
                    Format::Csv => {
                        let mut s = String::from("m,rank,eigenvalues\n");
                        for (m, (rank, e)) in r.ranks.iter().zip(&r.per_m_eigs).enumerate() {
                            let es: Vec<String> = e.iter().map(|v| format!("{v:?}")).collect();
                            s.push_str(&format!("{m},{rank},{}\n", es.join(" ")));
                        }
                        s
                    }
                };
            }
            if *crosscheck || bank.decimation().is_none() {
                let b = frame_operator_bounds(&bank);
                let v = json!({"A": b.a, "B": b.b, "tight": b.tight, "is_frame": b.is_frame});
                if text.is_empty() {
                    text = to_json_string(&v)?;
                } else if let Ok(Value::Object(mut doc)) = serde_json::from_str::<Value>(&text) {
                    doc.insert("frame_operator".into(), v);
                    text = to_json_string(&Value::Object(doc))?;
                } else {
                    text.push_str(&format!("frame_operator,{:?},{:?}\n", b.a, b.b));
                }
            }
            Ok(text)
        }
        Command::PeriodId { signal, tol, out } => {
            let x = Signal::load(signal)?;
            let est = identify_period(&x, *tol)?;
            write_out(out, "energies.csv", &est.energies.to_csv())?;
            Ok(match fmt_or(cli, Format::Json) {
                Format::Json => to_json_string(&json!({
                    "period": est.period,
                    "responding": est.responding,
                    "energies": est.energies.energies,
                }))?,
                Format::Csv => format!("{}\n", est.period),
            })
        }
        Command::Recover {
            request,
            signal,
            bank,
            n,
            p,
            missing,
            periods,
            out,
        } => {
            let req = match request {
                Some(path) => RecoveryRequest::load(path)?,
                None => {
                    let x = Signal::load(signal.as_ref().ok_or_else(|| Error::domain("--signal is required"))?)?;
                    let bank = bank_from(bank, *n, *p, Some(x.len()))?;
                    let missing = CoefficientSet::load(
                        missing.as_ref().ok_or_else(|| Error::domain("--missing is required"))?,
                    )?;
                    RecoveryRequest::from_parts(x, bank, Some(missing), periods.clone(), None, None)
                }
            };
            let report = run_recover(&req)?;
            finish(cli, out, "recovered.csv", &report)
        }
        Command::Denoise {
            request,
            signal,
            bank,
            n,
            p,
            snr_db,
            threshold,
            seed,
            out,
        } => {
            let req = match request {
                Some(path) => RecoveryRequest::load(path)?,
                None => {
                    let x = Signal::load(signal.as_ref().ok_or_else(|| Error::domain("--signal is required"))?)?;
                    let bank = bank_from(bank, *n, *p, Some(x.len()))?;
                    let noise = snr_db.map(|s| NoiseSpec {
                        model: NoiseModel::Gaussian { snr_db: s },
                        seed: *seed,
                    });
                    RecoveryRequest::from_parts(x, bank, None, None, noise, Some(*threshold))
                }
            };
            let report = run_denoise(&req)?;
            finish(cli, out, "denoised.csv", &report)
        }
        Command::Reproduce { which, seed, out } => {
            ensure_dir(out)?;
            match which {
                Reproduction::Examples => reproduce_examples(out),
                Reproduction::Tables => reproduce_tables(out, *seed),
                Reproduction::Erasures => reproduce_erasures(out, *seed),
                Reproduction::Fusion => reproduce_fusion(out, *seed),
            }
        }
    }
}

fn finish(cli: &Cli, out: &Option<PathBuf>, csv_name: &str, report: &Report) -> Result<String> {
    write_out(out, csv_name, &report.signal.to_csv())?;
    write_out(out, "traces.csv", &report.traces())?;
    let json = to_json_string(&report.body)?;
    write_out(out, "report.json", &json)?;
    Ok(match fmt_or(cli, Format::Json) {
        Format::Json => json,
        Format::Csv => report.signal.to_csv(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub model: NoiseModel,
    #[serde(default)]
    pub seed: u64,
}

/// Request document shared by `recover` and `denoise`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryRequest {
    pub signal: Value,
    #[serde(default)]
    pub bank: Option<Value>,
    #[serde(default)]
    pub p: Option<usize>,
    #[serde(default)]
    pub missing: Option<Value>,
    #[serde(default)]
    pub periods: Option<Vec<usize>>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub threshold: Option<f64>,
}

impl RecoveryRequest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn from_parts(
        x: Signal,
        bank: RamanujanFilterBank,
        missing: Option<CoefficientSet>,
        periods: Option<Vec<usize>>,
        noise: Option<NoiseSpec>,
        threshold: Option<f64>,
    ) -> Self {
        let parse = |s: String| serde_json::from_str(&s).expect("serialised json parses");
        RecoveryRequest {
            signal: parse(x.to_json()),
            bank: Some(parse(bank.to_json())),
            p: None,
            missing: missing.map(|m| parse(m.to_json())),
            periods,
            noise,
            threshold,
        }
    }

    fn signal(&self) -> Result<Signal> {
        Signal::parse_json(&self.signal.to_string())
    }

    fn bank(&self, n: usize) -> Result<RamanujanFilterBank> {
        match &self.bank {
            Some(b) => RamanujanFilterBank::parse_json(&b.to_string()),
            None => RamanujanFilterBank::uniform(n, self.p.unwrap_or(1)),
        }
    }
}

struct Report {
    original: Signal,
    observed: Signal,
    signal: Signal,
    body: Value,
}

impl Report {
    /// `(original, observed, output)` per sample, for plotting.
    fn traces(&self) -> String {
        let mut s = String::from("n,original,observed,output\n");
        let rows = self
            .original
            .values()
            .iter()
            .zip(self.observed.values())
            .zip(self.signal.values());
        for (k, ((a, b), c)) in rows.enumerate() {
            s.push_str(&format!("{k},{a:?},{b:?},{c:?}\n"));
        }
        s
    }
}

/// Gain in dB, with `+inf` when both sides are exact.
/// `+inf` when the output is exact or the input carried no error at all.
fn gain(before: f64, after: f64) -> f64 {
    if (after.is_infinite() && after > 0.0) || (before.is_infinite() && before > 0.0) {
        f64::INFINITY
    } else {
        after - before
    }
}

fn run_recover(req: &RecoveryRequest) -> Result<Report> {
    let x = req.signal()?;
    let bank = req.bank(x.len())?;
    let missing = CoefficientSet::parse_json(
        &req.missing
            .as_ref()
            .ok_or_else(|| Error::domain("request has no missing set"))?
            .to_string(),
    )?;
    missing.validate(&bank)?;
    let j = missing.complement(&bank);
    let observed = truncated_sum(&x, &j, &bank)?;
    let cond = missing_condition(&x, &j, &bank)?;
    let rec = match &req.periods {
        Some(periods) => recover_missing_periodic(&observed, &j, &bank, periods)?,
        None => recover_missing(&observed, &j, &bank)?,
    };
    let snr_obs = snr_of(&x, &observed)?;
    let snr_rec = snr_of(&x, &rec.signal)?;
    log::info!("recovery: {} LP iterations", rec.stats.iterations);
    Ok(Report {
        body: json!({
            "n": bank.n(),
            "missing": missing.len(),
            "periods": req.periods,
            "condition": cond,
            "snr_observed_db": finite_or_str(snr_obs),
            "snr_recovered_db": finite_or_str(snr_rec),
            "snr_gain_db": finite_or_str(gain(snr_obs, snr_rec)),
            "sup_error": rec.signal.sup_distance(&x),
            "lp": rec.stats,
            "recovered": rec.signal.values(),
        }),
        original: x,
        observed,
        signal: rec.signal,
    })
}

fn finite_or_str(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn run_denoise(req: &RecoveryRequest) -> Result<Report> {
    let x = req.signal()?;
    let bank = req.bank(x.len())?;
    let threshold = req.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let y = match &req.noise {
        Some(spec) => add_noise(&x, &spec.model, spec.seed)?,
        None => x.clone(),
    };
    let est = detect_support_set(&y, &bank, threshold)?;
    let out = denoise(&y, &est.set, &bank)?;
    let noise_support = y.sub(&x)?.values().iter().filter(|v| **v != 0.0).count();
    let cond = denoise_condition(&est.set, noise_support, &bank)?;
    let mut body = json!({
        "n": bank.n(),
        "threshold": threshold,
        "detected_channels": est.channels.iter().map(|&i| bank.channels()[i].q).collect::<Vec<_>>(),
        "condition": cond,
        "subspace_dim": out.subspace_dim,
        "lp": out.stats,
        "denoised": out.signal.values(),
    });
    let s_in = snr_of(&x, &y)?;
    let s_out = snr_of(&x, &out.signal)?;
    body["snr_noisy_db"] = finite_or_str(s_in);
    body["snr_denoised_db"] = finite_or_str(s_out);
    body["snr_gain_db"] = finite_or_str(gain(s_in, s_out));
    Ok(Report {
        original: x,
        observed: y,
        signal: out.signal,
        body,
    })
}

fn reproduce_examples(out: &Path) -> Result<String> {
    let ex = worked_examples()?;
    write_atomic(&out.join("examples.json"), to_json_string(&ex)?.as_bytes())?;
    let mut s = String::new();
    for e in &ex {
        match e.bound {
            Some(b) => s.push_str(&format!("N={} p={}: {} with bound {}\n", e.n, e.p, e.class, round_sig(b))),
            None => s.push_str(&format!(
                "N={} p={}: {}, ranks {:?}\n",
                e.n, e.p, e.class, e.ranks
            )),
        }
    }
    Ok(s)
}

fn reproduce_tables(out: &Path, seed: u64) -> Result<String> {
    let mut rng = seeded(seed);
    let bank = RamanujanFilterBank::uniform(MISSING_N, MISSING_P)?;
    let x = periodic_signal(MISSING_N, &MISSING_PERIODS, &mut rng)?;
    let mut t1 = String::from(
        "case,missing,condition_2JcC,bound,snr_observed_db,gain_plain_db,gain_periodic_db,sup_error_plain,sup_error_periodic\n",
    );
    for (idx, case) in missing_cases().iter().enumerate() {
        let j = known_set(&bank, case);
        let o = run_missing_case(idx + 1, &x, &j, &bank, &MISSING_PERIODS)?;
        t1.push_str(&format!(
            "{},{},{},{:.6},{:.4},{:.4},{:.4},{:.3e},{:.3e}\n",
            o.case,
            o.missing,
            o.condition_lhs,
            o.bound,
            o.snr_observed_db,
            o.gain_plain_db,
            cap_db(o.gain_periodic_db),
            o.sup_error_plain,
            o.sup_error_periodic
        ));
    }
    write_atomic(&out.join("table_missing.csv"), t1.as_bytes())?;

    let dbank = RamanujanFilterBank::uniform(DENOISE_N, 1)?;
    let mut t2 = String::from(
        "case,components,detected,condition_2M,noise_support,bound,snr_noisy_db,gain_db\n",
    );
    for (idx, (comps, snr)) in denoise_cases().iter().enumerate() {
        let x = periodic_signal(DENOISE_N, comps, &mut rng)?;
        let o = run_denoise_case(&x, comps, &dbank, *snr, DEFAULT_THRESHOLD, seed.wrapping_add(idx as u64))?;
        let join = |v: &[usize]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
        t2.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.4},{:.4}\n",
            idx + 1,
            join(&o.components),
            join(&o.detected),
            o.condition_factor,
            o.noise_support,
            o.bound,
            o.snr_noisy_db,
            o.gain_db
        ));
    }
    write_atomic(&out.join("table_denoise.csv"), t2.as_bytes())?;
    Ok(format!("{t1}\n{t2}"))
}

fn cap_db(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

fn reproduce_erasures(out: &Path, seed: u64) -> Result<String> {
    let mut s = String::new();
    let single = robust_to_erasures(1, 4, &[(0, 2)])?;
    let pair = robust_to_erasures(1, 4, &[(0, 2), (2, 2)])?;
    s.push_str(&format!(
        "R(1,4) without L0 c4: robust = {}\nR(1,4) without L0 c4, L2 c4: robust = {}\n",
        single.robust, pair.robust
    ));
    let mut csv = String::from("n,p,size,sufficient,candidates,checked,exhaustive,seed,failures\n");
    for (n, p) in [(4, 1), (6, 1), (12, 1), (30, 1), (6, 2), (30, 2), (42, 2), (210, 2)] {
        for size in [1, 2] {
            let r = erasure_scan(p, n, size, ERASURE_SCAN_CAP, 200, seed)?;
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                n,
                p,
                size,
                r.sufficient_condition,
                r.candidate_sets,
                r.checked,
                r.exhaustive,
                r.seed.map(|v| v.to_string()).unwrap_or_default(),
                r.failures.len()
            ));
        }
    }
    write_atomic(&out.join("erasures.csv"), csv.as_bytes())?;
    s.push_str(&csv);
    Ok(s)
}

fn reproduce_fusion(out: &Path, seed: u64) -> Result<String> {
    let mut csv = String::from(
        "n,p,a_f,b_f,empirical_min,empirical_max,local_a_f,local_b_f,guaranteed_lower\n",
    );
    for (n, p) in [(6, 1), (12, 1), (30, 1), (60, 1), (6, 2), (30, 2), (42, 2)] {
        let f = fusion_frame_check(p, n, 100, seed)?;
        let k = divisor_list(n).len();
        let d = n / p;
        let lists: Vec<Vec<usize>> = (0..k).map(|i| vec![i % d]).collect();
        let l = fusion_after_local_erasures(p, n, &lists)?;
        csv.push_str(&format!(
            "{},{},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12}\n",
            n, p, f.a_f, f.b_f, f.empirical_min, f.empirical_max, l.a_f, l.b_f, l.guaranteed_lower
        ));
    }
    write_atomic(&out.join("fusion.csv"), csv.as_bytes())?;
    Ok(csv)
}
