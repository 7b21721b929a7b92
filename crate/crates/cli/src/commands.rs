//! The four subcommands. Each validates its whole configuration and opens
//! its output before doing any computation.

use std::fmt::Write as _;
use std::path::Path;

use ain_core::ain_mimo::{build_beams, certify, diversity_optimize_beams, streams_per_part};
use ain_core::ain_scalar::{build_scalar_scheme, choose_q, CANCELLATION_TOL};
use ain_core::channel::{sample_scalar_channel, streams, RunSeed};
use ain_core::dof::{scalar_sweep, sweep, sweep_channel, ScalarSweepConfig, SweepConfig};
use ain_core::link_sim::{snr_to_power, RelayMode};

use crate::config::{ExperimentConfig, DEFAULT_SCALAR_GRID, DEFAULT_SWEEP_GRID};
use crate::error::{CliError, CliResult};
use crate::output::{decode, encode, ResultFile, ScalarRow, Sink, SweepRow, SCALAR_SCHEMA, SWEEP_SCHEMA};

/// Test hook for `verify`: corrupt the first channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyHooks {
    /// Make `H[2,R]` of channel 0 rank one before building beams.
    pub inject_singular: bool,
}

/// Certifies the MIMO and scalar constructions over `n_channels` seeded
/// channels and returns the printed report.
pub fn cmd_verify(cfg: &ExperimentConfig, hooks: VerifyHooks) -> CliResult<String> {
    cfg.validate()?;
    streams_per_part(cfg.m)?;
    let beam_seed = RunSeed::new(cfg.seed, streams::BEAMS);

    let mut max_res: f64 = 0.0;
    let mut min_sigma = f64::INFINITY;
    for c in 0..cfg.n_channels as u64 {
        let mut ch = sweep_channel(cfg.seed, cfg.m, c).map_err(CliError::from)?;
        if hooks.inject_singular && c == 0 {
            let first = ch.h_2r.column(0).into_owned();
            ch.h_2r.set_column(1, &first);
        }
        let fail = |e: ain_core::AinError| CliError::Invariant(format!("channel {c}: {e}"));
        let mut beams = build_beams(&ch, beam_seed.fork(c)).map_err(fail)?;
        if cfg.diversity {
            beams = diversity_optimize_beams(&ch, &beams).map_err(fail)?;
        }
        let cert = certify(&ch, &beams);
        if let Some(what) = cert.violation() {
            return Err(CliError::Invariant(format!(
                "{what} (channel {c}, residual {:.3e}, min sigma {:.3e})",
                cert.max_residual(),
                cert.min_sigma()
            )));
        }
        max_res = max_res.max(cert.max_residual());
        min_sigma = min_sigma.min(cert.min_sigma());
    }

    let p = snr_to_power(cfg.snr_or(DEFAULT_SCALAR_GRID).stop_db);
    let q = choose_q(p, cfg.gamma, cfg.epsilon)?;
    let mut scalar_res: f64 = 0.0;
    for c in 0..cfg.n_channels as u64 {
        let ch = sample_scalar_channel(RunSeed::new(cfg.seed, streams::CHANNEL).fork(c));
        let sch = build_scalar_scheme(&ch, p, q, beam_seed.fork(c))
            .map_err(|e| CliError::Invariant(format!("scalar channel {c}: {e}")))?;
        let worst = sch
            .alignment_residuals(&ch)
            .into_iter()
            .chain(sch.neutralization_residuals(&ch))
            .fold(0.0, f64::max);
        if !(worst <= CANCELLATION_TOL) {
            return Err(CliError::Invariant(format!(
                "scalar alignment/neutralization (channel {c}, residual {worst:.3e})"
            )));
        }
        if let Some(i) = sch.power_bounds().iter().position(|&b| b > p * (1.0 + 1e-12)) {
            return Err(CliError::Invariant(format!("scalar power constraint at node {i} (channel {c})")));
        }
        scalar_res = scalar_res.max(worst);
    }

    let mut report = String::new();
    let _ = writeln!(
        report,
        "mimo: {} channels, M = {}, max residual {max_res:.1e}, min sigma {min_sigma:.1e}",
        cfg.n_channels, cfg.m
    );
    let _ = writeln!(
        report,
        "scalar: {} channels, P = {p:.0e}, Q = {q}, max residual {scalar_res:.1e}",
        cfg.n_channels
    );
    let _ = writeln!(report, "max residual {:.1e}, pass", max_res.max(scalar_res));
    Ok(report)
}

fn sweep_configs(cfg: &ExperimentConfig) -> CliResult<Vec<SweepConfig>> {
    let grid = cfg.snr_or(DEFAULT_SWEEP_GRID).points();
    cfg.scenarios
        .iter()
        .map(|&scenario| {
            let mut sc = SweepConfig::new(scenario, cfg.m, grid.clone(), cfg.n_channels, cfg.seed);
            sc.n_noise = cfg.n_noise;
            sc.mode = cfg.mode_or(RelayMode::Genie);
            sc.diversity = cfg.diversity;
            sc.validate().map_err(|e| CliError::Usage(format!("{scenario}: {e}")))?;
            Ok(sc)
        })
        .collect()
}

/// Runs every configured scenario and returns the rows in output order
/// together with one summary line per scenario.
pub fn sweep_rows(cfg: &ExperimentConfig) -> CliResult<(Vec<SweepRow>, Vec<String>)> {
    let configs = sweep_configs(cfg)?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for sc in &configs {
        let est = sweep(sc)?;
        let name = sc.scenario.name().to_string();
        let m = sc.scenario.effective_m(sc.m);
        for g in &est.grid {
            rows.push(SweepRow {
                scenario: name.clone(),
                m,
                snr_db: Some(g.snr_db),
                sum_rate_bits: Some(g.sum_rate),
                user1_rate: Some(g.user_rates[0]),
                user2_rate: Some(g.user_rates[1]),
                ser1: Some(g.ser[0]),
                ser2: Some(g.ser[1]),
                seed: sc.seed,
                slope: None,
                r_squared: None,
            });
        }
        rows.push(SweepRow {
            scenario: name.clone(),
            m,
            snr_db: None,
            sum_rate_bits: None,
            user1_rate: None,
            user2_rate: None,
            ser1: None,
            ser2: None,
            seed: sc.seed,
            slope: Some(est.slope),
            r_squared: Some(est.r_squared),
        });
        lines.push(format!("{name}: slope {:.4}, r^2 {:.6}", est.slope, est.r_squared));
    }
    Ok((rows, lines))
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> CliResult<Vec<String>> {
    cfg.validate()?;
    sweep_configs(cfg)?;
    let sink = Sink::open(cfg.out.as_deref())?;
    let (rows, lines) = sweep_rows(cfg)?;
    sink.commit(&encode(&rows, SWEEP_SCHEMA, cfg.format)?)?;
    Ok(lines)
}

fn scalar_config(cfg: &ExperimentConfig) -> CliResult<ScalarSweepConfig> {
    let mode = cfg.mode_or(RelayMode::HardDecision);
    if mode == RelayMode::ZfForward {
        return Err(CliError::Usage(
            "mode: the scalar scheme supports genie and hard_decision only".into(),
        ));
    }
    Ok(ScalarSweepConfig {
        p_db_grid: cfg.snr_or(DEFAULT_SCALAR_GRID).points(),
        gamma: cfg.gamma,
        epsilon: cfg.epsilon,
        n_symbols: cfg.n_symbols,
        budget: cfg.budget,
        seed: cfg.seed,
        mode,
    })
}

pub fn scalar_rows(cfg: &ExperimentConfig) -> CliResult<Vec<ScalarRow>> {
    let sc = scalar_config(cfg)?;
    let points = scalar_sweep(&sc)?;
    Ok(points
        .into_iter()
        .map(|pt| {
            let s = pt.trial.submessage_ser;
            let r = pt.trial.submessage_rates;
            ScalarRow {
                p_db: pt.p_db,
                q: pt.q,
                d_min: pt.d_min,
                ser_1_1: s[0][0],
                ser_1_2: s[0][1],
                ser_1_3: s[0][2],
                ser_2_1: s[1][0],
                ser_2_2: s[1][1],
                ser_2_3: s[1][2],
                rate_1_1: r[0][0],
                rate_1_2: r[0][1],
                rate_1_3: r[0][2],
                rate_2_1: r[1][0],
                rate_2_2: r[1][1],
                rate_2_3: r[1][2],
                sum_rate: pt.trial.sum_rate(),
                dof: pt.dof,
                relay_ser: pt.trial.relay_ser,
                seed: sc.seed,
            }
        })
        .collect())
}

/// Checks that every grid point's constellation fits the enumeration budget.
fn check_budget(cfg: &ExperimentConfig) -> CliResult<()> {
    for p_db in cfg.snr_or(DEFAULT_SCALAR_GRID).points() {
        let q = choose_q(snr_to_power(p_db), cfg.gamma, cfg.epsilon)?;
        let (a, b) = (2 * q as u128 + 1, 4 * q as u128 + 1);
        let tuples = a * a * b * b;
        if tuples > cfg.budget as u128 {
            return Err(ain_core::AinError::EnumerationTooLarge {
                q,
                tuples,
                budget: cfg.budget,
            }
            .into());
        }
    }
    Ok(())
}

pub fn cmd_scalar(cfg: &ExperimentConfig) -> CliResult<()> {
    cfg.validate()?;
    scalar_config(cfg)?;
    check_budget(cfg)?;
    let sink = Sink::open(cfg.out.as_deref())?;
    let rows = scalar_rows(cfg)?;
    sink.commit(&encode(&rows, SCALAR_SCHEMA, cfg.format)?)
}

/// Summarizes a result file written by `sweep` or `scalar`.
pub fn cmd_report(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut out = String::new();
    match decode(&bytes)? {
        ResultFile::Sweep(rows) => {
            for s in rows.iter().filter(|r| r.is_summary()) {
                let data: Vec<&SweepRow> = rows.iter().filter(|r| !r.is_summary() && r.scenario == s.scenario).collect();
                let _ = write!(
                    out,
                    "{} (M = {}): slope {:.4}, r^2 {:.6}, {} points",
                    s.scenario,
                    s.m,
                    s.slope.unwrap_or(f64::NAN),
                    s.r_squared.unwrap_or(f64::NAN),
                    data.len()
                );
                if let Some(top) = data.iter().max_by(|a, b| a.snr_db.partial_cmp(&b.snr_db).unwrap()) {
                    let _ = write!(
                        out,
                        ", sum rate {:.3} bits at {} dB",
                        top.sum_rate_bits.unwrap_or(f64::NAN),
                        top.snr_db.unwrap_or(f64::NAN)
                    );
                }
                out.push('\n');
            }
        }
        ResultFile::Scalar(rows) => {
            let _ = writeln!(out, "{:>7} {:>3} {:>11} {:>9} {:>7}", "p_db", "q", "d_min", "sum_rate", "dof");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{:>7.1} {:>3} {:>11.4e} {:>9.4} {:>7.4}",
                    r.p_db, r.q, r.d_min, r.sum_rate, r.dof
                );
            }
        }
    }
    Ok(out)
}
