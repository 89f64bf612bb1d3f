//! Experiment harness: exhaustive accuracy sweeps, intermediate-stage
//! correlation profiling, figure-of-merit arithmetic over the bundled
//! hardware-cost tables, and report export.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitstream::{scc, zce};
use crate::circuits::{
    self, builtin_spec_with_trial, eval_circuit, CircuitConfig, FunctionId, Variant,
};
use crate::error::{Error, Result};

/// Which real-valued curve the squared errors are measured against.
///
/// The accuracy tables track the stochastic implementation error, so the
/// default target is the truncated series the circuit is built to compute;
/// `True` additionally folds in the series truncation error as a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RefMode {
    #[default]
    Maclaurin,
    True,
}

impl RefMode {
    pub fn value(self, function: FunctionId, x: f64) -> f64 {
        match self {
            RefMode::Maclaurin => circuits::maclaurin_reference(function, x),
            RefMode::True => circuits::true_reference(function, x),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRecord {
    pub x: u64,
    pub trial: u64,
    pub estimate: f64,
    pub reference: f64,
    pub sq_error: f64,
}

/// Full result of one accuracy sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub function: FunctionId,
    pub variant: Variant,
    pub n: usize,
    pub trials: u64,
    pub reference: RefMode,
    pub mse: f64,
    /// Configuration snapshot (trial 0 for seeded baselines).
    pub config: CircuitConfig,
    pub records: Vec<EvalRecord>,
}

/// Swept thresholds for one function at stream length `n`: every value in
/// `[0, N]`, clipped to the function's supported domain.
pub fn sweep_points(function: FunctionId, n: usize) -> Vec<u64> {
    let max_x = (function.domain_max() * n as f64).floor() as u64;
    (0..=max_x).collect()
}

/// Exhaustive mean-squared-error sweep against the truncated-series target.
pub fn mse_sweep(
    function: FunctionId,
    variant: Variant,
    n: usize,
    trials: u64,
) -> Result<EvalReport> {
    mse_sweep_with(function, variant, n, trials, RefMode::Maclaurin)
}

/// Accuracy sweep with an explicit reference mode. Deterministic variants
/// are forced to a single trial; seeded baselines run the trial schedule.
pub fn mse_sweep_with(
    function: FunctionId,
    variant: Variant,
    n: usize,
    trials: u64,
    reference: RefMode,
) -> Result<EvalReport> {
    let trials = if variant.is_deterministic() {
        1
    } else {
        trials.max(1)
    };
    let points = sweep_points(function, n);
    let snapshot = builtin_spec_with_trial(function, variant, n, None)?;

    let per_trial: Result<Vec<Vec<EvalRecord>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let config = if variant.is_deterministic() {
                builtin_spec_with_trial(function, variant, n, None)?
            } else {
                builtin_spec_with_trial(function, variant, n, Some(trial))?
            };
            points
                .iter()
                .map(|&x| {
                    let estimate = circuits::eval_estimate(&config, x)?;
                    let r = reference.value(function, x as f64 / n as f64);
                    Ok(EvalRecord {
                        x,
                        trial,
                        estimate,
                        reference: r,
                        sq_error: (estimate - r) * (estimate - r),
                    })
                })
                .collect()
        })
        .collect();
    let records: Vec<EvalRecord> = per_trial?.into_iter().flatten().collect();

    let mse = records.iter().map(|r| r.sq_error).sum::<f64>() / records.len() as f64;
    Ok(EvalReport {
        function,
        variant,
        n,
        trials,
        reference,
        mse,
        config: snapshot,
        records,
    })
}

/// Per-stage correlation statistics over a full input sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationProfile {
    pub stage: String,
    /// One SCC / ZCE value per swept X, metrics of the stage gate's two
    /// data inputs.
    pub scc: Vec<f64>,
    pub zce: Vec<f64>,
}

impl CorrelationProfile {
    pub fn fraction_scc_in(&self, lo: f64, hi: f64) -> f64 {
        fraction_in(&self.scc, lo, hi)
    }

    pub fn fraction_zce_in(&self, lo: f64, hi: f64) -> f64 {
        fraction_in(&self.zce, lo, hi)
    }

    /// Fixed-width histogram over [lo, hi]; mass equals the sweep size
    /// (out-of-range values clamp to the edge bins).
    pub fn scc_histogram(&self, bins: usize) -> Vec<u64> {
        histogram(&self.scc, -1.0, 1.0, bins)
    }

    pub fn zce_histogram(&self, bins: usize) -> Vec<u64> {
        histogram(&self.zce, -0.5, 0.5, bins)
    }
}

fn fraction_in(values: &[f64], lo: f64, hi: f64) -> f64 {
    values.iter().filter(|v| (lo..=hi).contains(*v)).count() as f64 / values.len() as f64
}

fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    for &v in values {
        let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
        let idx = ((t * bins as f64) as usize).min(bins - 1);
        h[idx] += 1;
    }
    h
}

/// SCC and ZCE of each cascade stage's gate-input pair for every swept X.
/// Only the quadratic cascades expose the `i1..i4` taps.
pub fn correlation_profile(
    function: FunctionId,
    variant: Variant,
    n: usize,
) -> Result<Vec<CorrelationProfile>> {
    let config = builtin_spec_with_trial(function, variant, n, Some(0))?;
    let spec = match &config {
        CircuitConfig::Single(s) => s,
        CircuitConfig::Division { .. } => {
            return Err(Error::Domain(
                "the divider circuit has no single cascade to profile; \
                 profile sin or cos directly"
                    .into(),
            ))
        }
    };
    let points = sweep_points(function, n);
    let per_x: Result<Vec<Vec<(f64, f64)>>> = points
        .par_iter()
        .map(|&x| {
            let out = eval_circuit(spec, x)?;
            if out.taps.is_empty() {
                return Err(Error::Domain(format!(
                    "{function} has no quadratic cascade taps to profile"
                )));
            }
            out.taps
                .iter()
                .map(|tap| {
                    Ok((
                        scc(&tap.gate_left, &tap.gate_right)?,
                        zce(&tap.gate_left, &tap.gate_right)?,
                    ))
                })
                .collect()
        })
        .collect();
    let per_x = per_x?;

    let stage_count = per_x[0].len();
    let mut profiles = Vec::with_capacity(stage_count);
    for stage_idx in 0..stage_count {
        profiles.push(CorrelationProfile {
            stage: format!("i{}", stage_idx + 1),
            scc: per_x.iter().map(|row| row[stage_idx].0).collect(),
            zce: per_x.iter().map(|row| row[stage_idx].1).collect(),
        });
    }
    Ok(profiles)
}

// ---------------------------------------------------------------------------
// hardware-cost data and the figure of merit
// ---------------------------------------------------------------------------

/// One synthesis data point, loaded verbatim from the bundled table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwCostRecord {
    pub function: String,
    pub design: String,
    pub n: usize,
    pub area_um2: f64,
    pub cpl_ns: f64,
    pub power_uw: f64,
    pub energy_pj: f64,
}

pub const HW_COSTS_CSV: &str = include_str!("../../../data/hw_costs.csv");
pub const HW_RNG_CSV: &str = include_str!("../../../data/hw_rng.csv");
pub const CROSS_PARADIGM_CSV: &str = include_str!("../../../data/cross_paradigm.csv");

/// Parse the hardware-cost table from CSV text.
pub fn parse_hw_costs(text: &str) -> Result<Vec<HwCostRecord>> {
    let mut out = Vec::new();
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "function,design,N,area_um2,cpl_ns,power_uw,energy_pj" {
        return Err(Error::Config(format!("unexpected hw-cost header {header:?}")));
    }
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::Config(format!("hw-cost row {} malformed", idx + 2)));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Config(format!("bad number {s:?} in hw-cost row")))
        };
        let rec = HwCostRecord {
            function: f[0].to_string(),
            design: f[1].to_string(),
            n: f[2]
                .parse()
                .map_err(|_| Error::Config(format!("bad N {:?}", f[2])))?,
            area_um2: parse(f[3])?,
            cpl_ns: parse(f[4])?,
            power_uw: parse(f[5])?,
            energy_pj: parse(f[6])?,
        };
        if rec.area_um2 <= 0.0 || rec.cpl_ns <= 0.0 || rec.power_uw <= 0.0 || rec.energy_pj <= 0.0 {
            return Err(Error::Config(format!(
                "non-positive hardware figure in row {}",
                idx + 2
            )));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn bundled_hw_costs() -> Result<Vec<HwCostRecord>> {
    parse_hw_costs(HW_COSTS_CSV)
}

pub fn load_hw_costs(path: &Path) -> Result<Vec<HwCostRecord>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_hw_costs(&text)
}

pub fn hw_lookup<'a>(
    records: &'a [HwCostRecord],
    function: FunctionId,
    design: &str,
    n: usize,
) -> Option<&'a HwCostRecord> {
    records
        .iter()
        .find(|r| r.function == function.name() && r.design == design && r.n == n)
}

/// Figure of merit: accuracy over hardware cost,
/// `(1/MSE) / (area * power * latency)`.
pub fn fom(mse: f64, hw: &HwCostRecord) -> Result<f64> {
    if mse <= 0.0 {
        return Err(Error::invalid(format!("FoM needs mse > 0, got {mse}")));
    }
    Ok((1.0 / mse) / (hw.area_um2 * hw.power_uw * hw.cpl_ns))
}

// ---------------------------------------------------------------------------
// report export
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Nine-significant-digit float formatting used by every CSV column.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn report_to_csv(report: &EvalReport) -> String {
    let mut out = String::from("function,variant,N,X,estimate,reference,sq_error\n");
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            report.function,
            report.variant,
            report.n,
            r.x,
            fmt_float(r.estimate),
            fmt_float(r.reference),
            fmt_float(r.sq_error)
        ));
    }
    out
}

/// Write a report to `path` in the given format. CSV carries the per-record
/// schema; JSON additionally embeds the resolved configuration snapshot.
pub fn export_report(report: &EvalReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => report_to_csv(report),
        ReportFormat::Json => serde_json::to_string_pretty(report)
            .map_err(|e| Error::Config(format!("serialize report: {e}")))?,
    };
    let mut file =
        std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}
