use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use cpofdm::analysis::{
    monte_carlo_designs, sinr_sweep, MonteCarloSummary, PAPR_THRESHOLDS_DB, S_MIN_THRESHOLDS,
    XI_THRESHOLDS_DB,
};
use cpofdm::design::{best_of_search, design_pulse, DesignConfig};
use cpofdm::io::{PulseFile, ReceivedFile, SceneFile};
use cpofdm::reconstruct::{
    default_s_min_floor, lfm_range_compress, ofdm_range_compress, synthesize_lfm_received,
};
use cpofdm::scene::{lfm_sequence, synthesize_received, timing_constraints, SPEED_OF_LIGHT};
use cpofdm::spectral::autocorrelation;
use cpofdm::{Error, OfdmPulse, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "cpofdm", version, about = "OFDM radar pulse design and range reconstruction experiments")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a zero-headed OFDM pulse and write it to a pulse file.
    Design(DesignArgs),
    /// Monte Carlo over design seeds: PAPR/xi CDFs and threshold tables.
    Montecarlo(MonteCarloArgs),
    /// Image one range line with the OFDM and LFM paths at several noise levels.
    Rangeline(RangeLineArgs),
    /// Sweep mean SINR curves over an input-SNR grid.
    SinrSweep(SinrSweepArgs),
    /// Pulse duration, minimum range and maximum PRF for given N, M.
    Timing(TimingArgs),
    /// Reconstruct a range line from a pulse file and a received-signal file.
    Reconstruct(ReconstructArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Design(args) => cmd_design(args),
        Command::Montecarlo(args) => cmd_montecarlo(args),
        Command::Rangeline(args) => cmd_rangeline(args),
        Command::SinrSweep(args) => cmd_sinr_sweep(args),
        Command::Timing(args) => cmd_timing(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
    }
}

fn req<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("missing required parameter: {name}")))
}

fn load_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read config {path:?}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("config {path:?}: {e}")))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Error::InvalidArgument(format!("cannot create {parent:?}: {e}")))?;
        }
    }
    fs::write(path, content)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {path:?}: {e}")))
}

/// Single '#'-prefixed JSON header line that makes a run replayable.
fn header(command: &str, params: serde_json::Value) -> String {
    format!(
        "# {}\n",
        json!({"tool": "cpofdm", "version": VERSION, "command": command, "params": params})
    )
}

// ---------------------------------------------------------------------------
// design

#[derive(Args, Serialize, Deserialize, Default)]
struct DesignArgs {
    /// Read all parameters from a JSON config file instead of flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Subcarrier count N.
    #[arg(long)]
    n: Option<usize>,
    /// Range-cell count M.
    #[arg(long)]
    m: Option<usize>,
    /// Oversampling factor L.
    #[arg(long)]
    l: Option<usize>,
    /// Iteration count Q.
    #[arg(long)]
    q: Option<usize>,
    /// Desired PAPR lower-bound parameter, dB.
    #[arg(long = "papr-d")]
    papr_d: Option<f64>,
    /// Frequency clipping factor, 0 < gf < 1.
    #[arg(long)]
    gf: Option<f64>,
    /// Design seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Try this many seeds and keep the lowest-PAPR pulse meeting the xi floor.
    #[arg(long = "best-of")]
    best_of: Option<usize>,
    /// xi floor (dB) for --best-of selection.
    #[arg(long = "xi-floor", allow_hyphen_values = true)]
    xi_floor: Option<f64>,
    /// Output pulse file path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_design(mut args: DesignArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = load_config(&path)?;
    }
    let cfg = DesignConfig {
        n: req(args.n, "n")?,
        m: req(args.m, "m")?,
        l: args.l.unwrap_or(4),
        q: args.q.unwrap_or(40),
        papr_d_db: args.papr_d.unwrap_or(1.0),
        g_f: args.gf.unwrap_or(0.05),
        seed: args.seed.unwrap_or(0),
    };
    cfg.validate()?;
    let (chosen_seed, pulse) = match args.best_of {
        Some(t) => best_of_search(&cfg, t, args.xi_floor.unwrap_or(-0.4))?,
        None => (cfg.seed, design_pulse(&cfg)?),
    };
    let final_cfg = DesignConfig {
        seed: chosen_seed,
        ..cfg
    };
    let q = pulse.quality();
    println!(
        "papr_db={} xi_db={} s_min_norm={} oob_energy={:e} seed={}",
        q.papr_db, q.xi_db, q.s_min_norm, q.oob_energy, chosen_seed
    );
    if let Some(out) = args.out {
        let doc = PulseFile::from_pulse(&pulse, &final_cfg);
        write_file(&out, &doc.to_json())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// montecarlo

#[derive(Args, Serialize, Deserialize, Default)]
struct MonteCarloArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long = "papr-d")]
    papr_d: Option<f64>,
    #[arg(long)]
    gf: Option<f64>,
    /// Base seed; trial t uses seed base+t.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for papr_cdf.csv, xi_cdf.csv and thresholds.csv.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

fn cmd_montecarlo(mut args: MonteCarloArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = load_config(&path)?;
    }
    let trials = req(args.trials, "trials")?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let base_seed = args.seed.unwrap_or(0);
    let cfg = DesignConfig {
        n: args.n.unwrap_or(128),
        m: args.m.unwrap_or(96),
        l: args.l.unwrap_or(4),
        q: args.q.unwrap_or(40),
        papr_d_db: args.papr_d.unwrap_or(1.0),
        g_f: args.gf.unwrap_or(0.05),
        seed: base_seed,
    };
    let out_dir = req(args.out_dir, "out-dir")?;
    let (_, summary) = monte_carlo_designs(&cfg, trials, base_seed)?;

    let params = json!({
        "trials": trials, "n": cfg.n, "m": cfg.m, "l": cfg.l, "q": cfg.q,
        "papr_d_db": cfg.papr_d_db, "g_f": cfg.g_f, "seed": base_seed
    });

    write_file(
        &out_dir.join("papr_cdf.csv"),
        &cdf_csv("montecarlo", &params, &summary.papr_sorted_db),
    )?;
    write_file(
        &out_dir.join("xi_cdf.csv"),
        &cdf_csv("montecarlo", &params, &summary.xi_sorted_db),
    )?;
    write_file(
        &out_dir.join("thresholds.csv"),
        &thresholds_csv(&params, &summary),
    )?;
    println!(
        "trials={} papr_leq_3db_and_xi_geq_-0.4db={} s_min_geq_0.8={}",
        trials, summary.joint_counts[2][2], summary.s_min_counts[2]
    );
    Ok(())
}

fn cdf_csv(command: &str, params: &serde_json::Value, sorted: &[f64]) -> String {
    let mut out = header(command, params.clone());
    out.push_str("value_db,cumulative_fraction\n");
    let n = sorted.len() as f64;
    for (i, v) in sorted.iter().enumerate() {
        out.push_str(&format!("{},{}\n", v, (i + 1) as f64 / n));
    }
    out
}

fn thresholds_csv(params: &serde_json::Value, summary: &MonteCarloSummary) -> String {
    let mut out = header("montecarlo", params.clone());
    out.push_str("criterion,count,fraction\n");
    let n = summary.trials as f64;
    for (p, &pt) in PAPR_THRESHOLDS_DB.iter().enumerate() {
        for (x, &xt) in XI_THRESHOLDS_DB.iter().enumerate() {
            let count = summary.joint_counts[p][x];
            out.push_str(&format!(
                "papr<={}dB&xi>={}dB,{},{}\n",
                pt,
                xt,
                count,
                count as f64 / n
            ));
        }
    }
    for (i, &st) in S_MIN_THRESHOLDS.iter().enumerate() {
        let count = summary.s_min_counts[i];
        out.push_str(&format!(
            "s_min>={}/sqrt(N),{},{}\n",
            st,
            count,
            count as f64 / n
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// rangeline

#[derive(Args, Serialize, Deserialize, Default)]
struct RangeLineArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Pulse file produced by `design`.
    #[arg(long)]
    pulse: Option<PathBuf>,
    /// Scene file (JSON target list).
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Noise variance; may be repeated for several noise levels.
    #[arg(long = "sigma-sq")]
    sigma_sq: Vec<f64>,
    /// Noise seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Bandwidth in Hz, used only to label cells with range offsets.
    #[arg(long = "bandwidth-hz")]
    bandwidth_hz: Option<f64>,
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

fn load_pulse(path: &Path) -> Result<OfdmPulse> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read pulse {path:?}: {e}")))?;
    PulseFile::from_json(&text)?.to_pulse()
}

fn cmd_rangeline(mut args: RangeLineArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = load_config(&path)?;
    }
    let pulse = load_pulse(&req(args.pulse, "pulse")?)?;
    let scene_path = req(args.scene, "scene")?;
    let scene = SceneFile::from_json(
        &fs::read_to_string(&scene_path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read scene {scene_path:?}: {e}")))?,
    )?
    .to_scene()?;
    if scene.len() != pulse.m() {
        return Err(Error::InvalidArgument(format!(
            "scene has {} cells but pulse expects M={}",
            scene.len(),
            pulse.m()
        )));
    }
    let sigma_list = if args.sigma_sq.is_empty() {
        vec![0.0]
    } else {
        args.sigma_sq.clone()
    };
    let seed = args.seed.unwrap_or(0);
    let bandwidth = args.bandwidth_hz.unwrap_or(150e6);
    let rho_r = SPEED_OF_LIGHT / (2.0 * bandwidth);
    let out_dir = req(args.out_dir, "out-dir")?;

    let n_t = pulse.n() - pulse.m() + 1;
    let lfm = lfm_sequence(n_t)?;

    for &sigma_sq in &sigma_list {
        let params = json!({
            "n": pulse.n(), "m": pulse.m(), "sigma_sq": sigma_sq, "seed": seed,
            "bandwidth_hz": bandwidth, "n_t": n_t
        });

        let rx = synthesize_received(&pulse, &scene, sigma_sq, seed)?;
        let est = ofdm_range_compress(&rx, &pulse, default_s_min_floor(pulse.n()))?;
        write_file(
            &out_dir.join(format!("ofdm_sigma_{sigma_sq}.csv")),
            &estimates_csv("rangeline", &params, &est.d_hat, rho_r, true),
        )?;

        // LFM path: linear-convolution echo, independent noise stream
        let u_lfm = synthesize_lfm_received(&scene, &lfm, sigma_sq, seed.wrapping_add(1))?;
        let est_lfm = lfm_range_compress(&u_lfm, &lfm, scene.len())?;
        write_file(
            &out_dir.join(format!("lfm_sigma_{sigma_sq}.csv")),
            &estimates_csv("rangeline", &params, &est_lfm.d_hat, rho_r, true),
        )?;
    }
    println!("wrote {} noise level(s) to {}", sigma_list.len(), out_dir.display());
    Ok(())
}

/// Estimate rows {cell, range_m, re, im, magnitude}; when `normalize` is set
/// the magnitudes are divided by the peak and the constant is recorded in a
/// second header line.
fn estimates_csv(
    command: &str,
    params: &serde_json::Value,
    d_hat: &[Complex64],
    rho_r: f64,
    normalize: bool,
) -> String {
    let mut out = header(command, params.clone());
    let peak = d_hat.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let scale = if normalize && peak > 0.0 { peak } else { 1.0 };
    out.push_str(&format!("# {}\n", json!({ "normalization": scale })));
    out.push_str("cell,range_m,re,im,magnitude\n");
    for (cell, v) in d_hat.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            cell,
            cell as f64 * rho_r,
            v.re,
            v.im,
            v.norm() / scale
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// sinr-sweep

#[derive(Args, Serialize, Deserialize, Default)]
struct SinrSweepArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Swath width in cells.
    #[arg(long)]
    m: Option<usize>,
    /// Transmitted sequence length (chirp length).
    #[arg(long)]
    nt: Option<usize>,
    /// Subcarrier count N (needed with --s-min-norm).
    #[arg(long)]
    n: Option<usize>,
    /// Weight-modulus lower bound, normalized by 1/sqrt(N).
    #[arg(long = "s-min-norm")]
    s_min_norm: Option<f64>,
    /// Pulse file; supplies N, the weights and the realized S_min.
    #[arg(long)]
    pulse: Option<PathBuf>,
    #[arg(long = "grid-start", allow_hyphen_values = true)]
    grid_start: Option<f64>,
    #[arg(long = "grid-stop", allow_hyphen_values = true)]
    grid_stop: Option<f64>,
    #[arg(long = "grid-step")]
    grid_step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_sinr_sweep(mut args: SinrSweepArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = load_config(&path)?;
    }
    let m = args.m.unwrap_or(96);
    let n_t = args.nt.unwrap_or(33);
    let start = args.grid_start.unwrap_or(-10.0);
    let stop = args.grid_stop.unwrap_or(20.0);
    let step = args.grid_step.unwrap_or(1.0);
    if step <= 0.0 || stop < start {
        return Err(Error::InvalidArgument("empty input-SNR grid".into()));
    }
    let mut grid = Vec::new();
    let mut g = start;
    while g <= stop + 1e-9 {
        grid.push(g);
        g += step;
    }

    let (n, s_min, weights, pulse_path) = match &args.pulse {
        Some(path) => {
            let pulse = load_pulse(path)?;
            let n = pulse.n();
            let s_min = pulse.quality().s_min_norm / (n as f64).sqrt();
            (n, s_min, Some(pulse.weights().to_vec()), Some(path.clone()))
        }
        None => {
            let n = req(args.n, "n")?;
            let norm = args.s_min_norm.unwrap_or(0.8);
            (n, norm / (n as f64).sqrt(), None, None)
        }
    };

    let lfm = lfm_sequence(n_t)?;
    let z = autocorrelation(&lfm);
    let curve = sinr_sweep(s_min, weights.as_deref(), n, &z, m, &grid)?;

    let params = json!({
        "m": m, "n_t": n_t, "n": n, "s_min": s_min,
        "pulse": pulse_path.map(|p| p.display().to_string()),
        "grid": {"start": start, "stop": stop, "step": step}
    });
    let mut out = header("sinr-sweep", params);
    out.push_str("snr_in_db,lfm_sinr_db,ofdm_bound_db,ofdm_true_db\n");
    for i in 0..curve.snr_in_db.len() {
        let true_db = curve
            .ofdm_true_db
            .as_ref()
            .map(|v| v[i].to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            curve.snr_in_db[i], curve.lfm_sinr_db[i], curve.ofdm_bound_db[i], true_db
        ));
    }
    match args.out {
        Some(path) => write_file(&path, &out)?,
        None => {
            std::io::stdout()
                .write_all(out.as_bytes())
                .map_err(|e| Error::InvalidArgument(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// timing

#[derive(Args, Serialize, Deserialize, Default)]
struct TimingArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Sampling rate in Hz.
    #[arg(long = "sample-rate")]
    sample_rate: Option<f64>,
    /// Swath width in meters.
    #[arg(long = "swath-width")]
    swath_width: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_timing(mut args: TimingArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = load_config(&path)?;
    }
    let n = req(args.n, "n")?;
    let m = req(args.m, "m")?;
    let sample_rate = req(args.sample_rate, "sample-rate")?;
    let swath_width = req(args.swath_width, "swath-width")?;
    let t = timing_constraints(n, m, sample_rate, swath_width)?;
    let params = json!({
        "n": n, "m": m, "sample_rate_hz": sample_rate, "swath_width_m": swath_width
    });
    let mut out = header("timing", params);
    out.push_str("pulse_duration_s,min_range_m,max_prf_hz\n");
    out.push_str(&format!("{},{},{}\n", t.pulse_duration, t.min_range, t.max_prf));
    match args.out {
        Some(path) => write_file(&path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// reconstruct

#[derive(Args, Serialize, Deserialize, Default)]
struct ReconstructArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    pulse: Option<PathBuf>,
    /// Received-signal file (JSON).
    #[arg(long)]
    received: Option<PathBuf>,
    /// Rejection floor for subcarrier moduli; default 1e-6/sqrt(N).
    #[arg(long = "s-min-floor")]
    s_min_floor: Option<f64>,
    #[arg(long = "bandwidth-hz")]
    bandwidth_hz: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_reconstruct(mut args: ReconstructArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = load_config(&path)?;
    }
    let pulse = load_pulse(&req(args.pulse, "pulse")?)?;
    let rx_path = req(args.received, "received")?;
    let rx = ReceivedFile::from_json(
        &fs::read_to_string(&rx_path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {rx_path:?}: {e}")))?,
    )?
    .to_received()?;
    let floor = args.s_min_floor.unwrap_or_else(|| default_s_min_floor(pulse.n()));
    let est = ofdm_range_compress(&rx, &pulse, floor)?;
    let bandwidth = args.bandwidth_hz.unwrap_or(150e6);
    let rho_r = SPEED_OF_LIGHT / (2.0 * bandwidth);
    let params = json!({
        "n": pulse.n(), "m": pulse.m(), "sigma_sq": rx.sigma_sq, "seed": rx.seed,
        "s_min_floor": floor, "bandwidth_hz": bandwidth
    });
    let out = estimates_csv("reconstruct", &params, &est.d_hat, rho_r, false);
    match args.out {
        Some(path) => write_file(&path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}
