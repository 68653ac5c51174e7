use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::config::{OutputKind, ScenarioConfig};
use super::output::{canonical_json, config_hash, trace_csv, write_atomic};
use crate::linalg::{max_abs, C64};
use crate::matexp::DerivMethod;
use crate::quantum::{spin_chain_scenario, SpinChainParams};
use crate::sensan::{
    classify, detect_spikes, fit_polynomial_degree, fit_slope, spike_schedule, trace,
    DivergenceClassification, DivergenceKind, ErrorSystem, SensitivityTrace, TimeGrid,
    DEFAULT_PRUNE_TOL,
};
use crate::Result;

fn pair(z: Option<C64>) -> Option<[f64; 2]> {
    z.map(|z| [z.re, z.im])
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub a0: Option<[f64; 2]>,
    pub b0: Option<[f64; 2]>,
    pub g0: Option<[f64; 2]>,
    pub sbar11: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub kind: &'static str,
    pub inconclusive: bool,
    pub slope: Option<f64>,
    pub sigma: Option<f64>,
    pub omega: Option<f64>,
    pub phi01: Option<f64>,
    pub t0: Option<f64>,
    pub period: Option<f64>,
    pub degree: Option<u32>,
    pub pruned_modes: Vec<usize>,
    pub dominant_modes: Vec<usize>,
    pub constants: ConstantsReport,
    pub pair_product: Option<[f64; 2]>,
    pub predicted_spikes: Vec<f64>,
    pub diagnostic: Option<String>,
}

impl ClassificationReport {
    fn new(c: &DivergenceClassification, grid: &TimeGrid) -> Self {
        let predicted_spikes = match (c.t0, c.period) {
            (Some(t0), Some(p)) if p > 0.0 && t0 <= grid.end => {
                let n = (((grid.end - t0) / p).floor() as usize + 1).min(10_000);
                spike_schedule(c, n).unwrap_or_default()
            }
            _ => Vec::new(),
        };
        ClassificationReport {
            kind: c.kind.name(),
            inconclusive: c.kind == DivergenceKind::Inconclusive,
            slope: c.slope,
            sigma: c.sigma,
            omega: c.omega,
            phi01: c.phi01,
            t0: c.t0,
            period: c.period,
            degree: c.degree,
            pruned_modes: c.pruned_modes.clone(),
            dominant_modes: c.dominant_modes.clone(),
            constants: ConstantsReport {
                a0: pair(c.constants.a0),
                b0: pair(c.constants.b0),
                g0: pair(c.constants.g0),
                sbar11: pair(c.constants.sbar11),
            },
            pair_product: pair(c.pair_product),
            predicted_spikes,
            diagnostic: c.diagnostic.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalReport {
    pub fit_window: [f64; 2],
    /// Least-squares slope of `|s|` over the fit window.
    pub fitted_slope: Option<f64>,
    pub fitted_degree: Option<u32>,
    pub detected_spikes: Vec<f64>,
    pub masked_samples: usize,
    pub max_abs_logsens: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationReport {
    /// `|fitted| - |predicted|` slope difference and its relative size.
    pub slope_abs: Option<f64>,
    pub slope_rel: Option<f64>,
    /// Largest distance from a predicted spike to the nearest detected one.
    pub spike_time_max: Option<f64>,
    /// Mean spacing of detected spikes after `t₀` minus the predicted period.
    pub period: Option<f64>,
    pub degree: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub samples: Vec<f64>,
    pub max_pairwise_rel_deviation: Option<f64>,
    pub pairs: Vec<OraclePair>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OraclePair {
    pub a: &'static str,
    pub b: &'static str,
    pub max_rel_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub config_hash: String,
    pub config: Value,
    pub grid: TimeGrid,
    pub grid_points: usize,
    pub method: &'static str,
}

/// Everything `run` reports about one scenario.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub classification: ClassificationReport,
    pub empirical: EmpiricalReport,
    pub deviations: DeviationReport,
    pub oracle_check: OracleReport,
    pub provenance: Provenance,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("report serializes"))
    }
}

fn rel_dev(a: &crate::linalg::RMat, b: &crate::linalg::RMat) -> f64 {
    let scale = max_abs(a).max(max_abs(b));
    if scale == 0.0 {
        0.0
    } else {
        max_abs(&(a - b)) / scale
    }
}

/// Sample times for oracle checks: `n` points evenly spaced in `(start, end]`.
pub fn oracle_times(grid: &TimeGrid, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| grid.start + (grid.end - grid.start) * i as f64 / n as f64)
        .collect()
}

/// Evaluates the full derivative matrix by every route at the sample times
/// and reports the largest pairwise relative deviation.
pub fn check_oracles_system(sys: &ErrorSystem, times: &[f64]) -> OracleReport {
    let methods = DerivMethod::ALL;
    let mut pairs: Vec<OraclePair> = Vec::new();
    let mut failures = Vec::new();
    for (i, a) in methods.iter().enumerate() {
        for b in &methods[i + 1..] {
            pairs.push(OraclePair {
                a: a.name(),
                b: b.name(),
                max_rel_deviation: 0.0,
            });
        }
    }
    for &t in times {
        let mats: Vec<Option<crate::linalg::RMat>> = methods
            .iter()
            .map(|&m| match sys.dderiv(t, m) {
                Ok(d) => Some(d),
                Err(e) => {
                    failures.push(format!("{} at t={t}: {e}", m.name()));
                    None
                }
            })
            .collect();
        let mut k = 0;
        for i in 0..methods.len() {
            for j in i + 1..methods.len() {
                if let (Some(x), Some(y)) = (&mats[i], &mats[j]) {
                    let d = rel_dev(x, y);
                    let slot = &mut pairs[k].max_rel_deviation;
                    *slot = if d.is_nan() { f64::NAN } else { slot.max(d) };
                }
                k += 1;
            }
        }
    }
    let max = pairs
        .iter()
        .map(|p| p.max_rel_deviation)
        .fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |a| a.max(d)))
        });
    OracleReport {
        samples: times.to_vec(),
        max_pairwise_rel_deviation: max,
        pairs,
        failures,
    }
}

/// [`check_oracles_system`] for a config, at `t_samples` evenly spaced times.
pub fn check_oracles(cfg: &ScenarioConfig, t_samples: usize) -> Result<OracleReport> {
    let sys = cfg.error_system()?;
    Ok(check_oracles_system(
        &sys,
        &oracle_times(&cfg.grid, t_samples),
    ))
}

fn deviations(cls: &ClassificationReport, emp: &EmpiricalReport) -> DeviationReport {
    let (slope_abs, slope_rel) = match (cls.slope, emp.fitted_slope) {
        (Some(p), Some(f)) => {
            let d = f.abs() - p.abs();
            (Some(d), (p != 0.0).then(|| d / p.abs()))
        }
        _ => (None, None),
    };
    let spike_time_max = if cls.predicted_spikes.is_empty() || emp.detected_spikes.is_empty() {
        None
    } else {
        Some(cls.predicted_spikes.iter().fold(0.0f64, |acc, &p| {
            let near = emp
                .detected_spikes
                .iter()
                .fold(f64::INFINITY, |m, &d| m.min((d - p).abs()));
            acc.max(near)
        }))
    };
    let period = match (cls.t0, cls.period) {
        (Some(t0), Some(p)) => {
            let after: Vec<f64> = emp
                .detected_spikes
                .iter()
                .copied()
                .filter(|&d| d >= t0 - 0.5 * p)
                .collect();
            (after.len() >= 2)
                .then(|| (after[after.len() - 1] - after[0]) / (after.len() - 1) as f64 - p)
        }
        _ => None,
    };
    let degree = match (cls.degree, emp.fitted_degree) {
        (Some(p), Some(f)) => Some(f as i64 - p as i64),
        _ => None,
    };
    DeviationReport {
        slope_abs,
        slope_rel,
        spike_time_max,
        period,
        degree,
    }
}

/// Computes the trace and the analysis report without touching the disk.
pub fn analyze(cfg: &ScenarioConfig) -> Result<(AnalysisReport, SensitivityTrace)> {
    let sys = cfg.error_system()?;
    let cls = classify(
        sys.spectrum(),
        sys.couplings(),
        sys.xi0(),
        DEFAULT_PRUNE_TOL,
    );
    let tr = trace(&sys, &cfg.grid.points(), cfg.method)?;
    let window = (cfg.fit_window[0], cfg.fit_window[1]);
    let max_abs = tr.max_abs_logsens();
    let empirical = EmpiricalReport {
        fit_window: cfg.fit_window,
        fitted_slope: fit_slope(&tr, window).ok(),
        fitted_degree: fit_polynomial_degree(&tr, window).ok(),
        detected_spikes: detect_spikes(&tr),
        masked_samples: tr.spike_mask.iter().filter(|&&m| m).count(),
        max_abs_logsens: max_abs.is_finite().then_some(max_abs),
    };
    let classification = ClassificationReport::new(&cls, &cfg.grid);
    let deviations = deviations(&classification, &empirical);
    let oracle_check = check_oracles_system(&sys, &oracle_times(&cfg.grid, cfg.oracle_samples));
    let config = cfg.to_value();
    let report = AnalysisReport {
        classification,
        empirical,
        deviations,
        oracle_check,
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            config_hash: config_hash(&config),
            config,
            grid: cfg.grid,
            grid_points: cfg.grid.len(),
            method: cfg.method.name(),
        },
    };
    Ok((report, tr))
}

pub const TRACE_FILE: &str = "trace.csv";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: AnalysisReport,
    pub trace: SensitivityTrace,
    pub written: Vec<PathBuf>,
}

/// Runs a scenario and writes the requested outputs into `out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunOutcome> {
    let (report, trace) = analyze(cfg)?;
    if let Some(i) = trace
        .error
        .iter()
        .chain(&trace.derror)
        .position(|x| !x.is_finite())
    {
        return Err(crate::sensan::SensanError::NonFinite(
            trace
                .times
                .get(i % trace.len())
                .copied()
                .unwrap_or(f64::NAN),
        )
        .into());
    }
    let mut written = Vec::new();
    for kind in &cfg.outputs {
        let (name, body) = match kind {
            OutputKind::TraceCsv => (TRACE_FILE, trace_csv(&trace)),
            OutputKind::ReportJson => (REPORT_FILE, report.to_json()),
        };
        let path = out_dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(RunOutcome {
        report,
        trace,
        written,
    })
}

/// The two spin chains of the fidelity table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Chain {
    N2,
    N3,
}

impl Chain {
    pub fn sites(self) -> usize {
        match self {
            Chain::N2 => 2,
            Chain::N3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Chain::N2 => "n2",
            Chain::N3 => "n3",
        }
    }

    /// Fidelity targets of the published table.
    pub fn default_targets(self) -> Vec<f64> {
        match self {
            Chain::N2 => vec![1.0, 0.9999, 0.99899, 0.98999, 0.90001],
            Chain::N3 => vec![1.0, 0.9999, 0.99899, 0.98996, 0.90008],
        }
    }
}

/// Bracket on which `1 - e(t)` rises monotonically to 1 at the transfer time.
pub const TABLE1_BRACKET: (f64, f64) = (2.5, 5.0);
/// Grid on which unit-fidelity rows are sampled: the last point `k·h` before
/// the transfer time.
pub const TABLE1_UNIT_FIDELITY_STEP: f64 = 3e-4;
const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub fidelity: f64,
    pub time: Option<f64>,
    pub abs_logsens: Option<f64>,
    /// Set when the target is unreachable on the bracket.
    pub flagged: bool,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return None;
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Solves `1 - e(t) = target` near the first fidelity maximum and evaluates
/// `|s(ξ₀, t)|` there. A target of exactly 1 is sampled on the grid
/// [`TABLE1_UNIT_FIDELITY_STEP`] instead, since `s` diverges at the transfer
/// time itself.
pub fn table1_repro(chain: Chain, targets: &[f64]) -> Result<Vec<Table1Row>> {
    let params = SpinChainParams::new(chain.sites());
    let sys = spin_chain_scenario(&params)?.error_system()?;
    let transfer = params.transfer_time();
    let (lo, hi) = (
        TABLE1_BRACKET.0 * transfer / 5.0,
        TABLE1_BRACKET.1 * transfer / 5.0,
    );
    let mut rows = Vec::with_capacity(targets.len());
    for &target in targets {
        let time = if target == 1.0 {
            let k = (transfer / TABLE1_UNIT_FIDELITY_STEP).ceil() - 1.0;
            Some(k * TABLE1_UNIT_FIDELITY_STEP)
        } else if target > 0.0 && target < 1.0 {
            bisect(|t| 1.0 - sys.error_signal(t) - target, lo, hi)
        } else {
            None
        };
        let abs_logsens = match time {
            Some(t) => sys.log_sensitivity(t)?.map(f64::abs),
            None => None,
        };
        rows.push(Table1Row {
            fidelity: target,
            time,
            abs_logsens,
            flagged: abs_logsens.is_none(),
        });
    }
    Ok(rows)
}

/// Two-column CSV `fidelity,abs_logsens`; flagged rows leave the value empty.
pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from("fidelity,abs_logsens\n");
    for r in rows {
        match r.abs_logsens {
            Some(s) => out.push_str(&format!("{:?},{:?}\n", r.fidelity, s)),
            None => out.push_str(&format!("{:?},\n", r.fidelity)),
        }
    }
    out
}
