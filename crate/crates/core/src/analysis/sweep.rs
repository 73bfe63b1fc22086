use super::stats::{loglog_slope, mean_se};
use crate::circuit::{build_pi_matrix_with, pauli_model, BuildOptions, CircuitSpec};
use crate::error::{invalid, Error, Result};
use crate::estimators::{
    collision_estimate, cv_lambda, eiv_least_squares, mle_multinomial, mle_poisson_ridge, threshold, threshold_cv,
    variational_em, xeb_estimate, EstimatorConfig, ThresholdKind,
};
use crate::mixture::{
    dirichlet_row, mixture_values, sample_bitstrings_multinomial, sample_bitstrings_poissonized, sample_dirichlet_matrix,
    sample_side_info, BitstringHistogram, DistributionMatrix, SideHistograms,
};
use crate::moments::{moment_estimate, sorted_loss};
use crate::rng::{derive_path, rng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepEstimator {
    /// Returns the truth; its curve is identically zero.
    Oracle,
    Xeb,
    XebHard,
    XebSoft,
    Mle,
    Poisson,
    Collision,
    CollisionHard,
    Eiv,
    EivSimplex,
    Vem,
    /// Unlabeled; scored by the sorted loss.
    Moments,
}

impl SweepEstimator {
    pub fn needs_side_info(self) -> bool {
        matches!(self, Self::Collision | Self::CollisionHard | Self::Eiv | Self::EivSimplex | Self::Vem)
    }

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TruthMode {
    /// Fresh flat-Dirichlet rows in every replicate.
    #[default]
    Dirichlet,
    /// Ideal row and the first `k − 1` single-Pauli rows of one chain circuit on `log2 d` qubits.
    Circuit { depth: usize, gate_seed: u64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingModel {
    #[default]
    Multinomial,
    Poisson,
}

fn default_c1() -> f64 {
    0.5
}

fn default_max_d() -> usize {
    1 << 20
}

/// Grid of a Monte Carlo risk experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    #[serde(default)]
    pub truth: TruthMode,
    pub d: usize,
    pub k: usize,
    /// Fixed truth; otherwise `c_1` followed by `(1 − c_1)` times a flat-Dirichlet draw per replicate.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default = "default_c1")]
    pub c1: f64,
    pub n: Vec<u64>,
    /// Reference sample sizes for side-information estimators.
    #[serde(default)]
    pub m: Vec<u64>,
    pub replicates: usize,
    pub estimators: Vec<SweepEstimator>,
    #[serde(default)]
    pub sampling: SamplingModel,
    /// Refuse scenarios with more outcomes than this.
    #[serde(default = "default_max_d")]
    pub max_d: usize,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 || self.k == 0 {
            return Err(invalid("need d >= 2 and k >= 1"));
        }
        if self.d > self.max_d {
            return Err(Error::Resource(format!("d={} exceeds the guard max_d={}", self.d, self.max_d)));
        }
        if self.k.saturating_mul(self.d) > 1 << 28 {
            return Err(Error::Resource(format!("dense Π with k={} and d={} is too large", self.k, self.d)));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.k {
                return Err(invalid("fixed weights must have length k"));
            }
        }
        if !(0.0..=1.0).contains(&self.c1) {
            return Err(invalid("c1 must lie in [0, 1]"));
        }
        if self.estimators.iter().any(|e| e.needs_side_info()) && self.m.is_empty() {
            return Err(invalid("side-information estimators need a non-empty m grid"));
        }
        if self.estimators.contains(&SweepEstimator::Moments) && self.k > crate::moments::MAX_ORDER {
            return Err(invalid("the moment estimator supports k <= 8"));
        }
        if let TruthMode::Circuit { .. } = self.truth {
            if !self.d.is_power_of_two() {
                return Err(invalid("circuit truth needs d a power of two"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCell {
    pub estimator: SweepEstimator,
    pub n: u64,
    pub m: Option<u64>,
    pub k: usize,
    pub d: usize,
    pub replicates: usize,
    pub mean: Option<f64>,
    pub se: Option<f64>,
    /// Set for cells without replicates.
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    pub scenario: String,
    pub cells: Vec<RiskCell>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.9e}")).unwrap_or_default()
}

impl RiskCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("estimator,n,m,k,d,replicates,mean_error,se,empty\n");
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                c.estimator.name(),
                c.n,
                c.m.map(|m| m.to_string()).unwrap_or_default(),
                c.k,
                c.d,
                c.replicates,
                fmt_opt(c.mean),
                fmt_opt(c.se),
                c.empty
            );
        }
        s
    }

    /// Cells of one estimator (and `m`, for side-information estimators) in `n` order.
    pub fn series(&self, est: SweepEstimator, m: Option<u64>) -> Vec<&RiskCell> {
        self.cells.iter().filter(|c| c.estimator == est && c.m == m).collect()
    }

    /// Log-log slope of mean risk against `n` for cells with `lo <= n <= hi`.
    pub fn n_slope(&self, est: SweepEstimator, m: Option<u64>, lo: u64, hi: u64) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .series(est, m)
            .into_iter()
            .filter(|c| c.n >= lo && c.n <= hi)
            .filter_map(|c| c.mean.map(|v| (c.n as f64, v)))
            .collect();
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        loglog_slope(&x, &y)
    }
}

struct Truth {
    pi: DistributionMatrix,
    c: Vec<f64>,
}

fn draw_truth(sc: &Scenario, circuit_pi: Option<&DistributionMatrix>, seed: u64) -> Result<Truth> {
    let pi = match circuit_pi {
        Some(p) => p.clone(),
        None => sample_dirichlet_matrix(sc.k, sc.d, derive_path(seed, &[0]))?,
    };
    let c = match &sc.weights {
        Some(w) => w.clone(),
        None if sc.k == 1 => vec![1.0],
        None => {
            let mut r = rng(derive_path(seed, &[1]));
            let rest = dirichlet_row(sc.k - 1, &mut r);
            std::iter::once(sc.c1).chain(rest.into_iter().map(|v| (1.0 - sc.c1) * v)).collect()
        }
    };
    Ok(Truth { pi, c })
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn side_info_error(est: SweepEstimator, t: &Truth, y: &BitstringHistogram, v: &SideHistograms, cfg: &EstimatorConfig) -> Result<f64> {
    let labels = t.pi.labels();
    let e = match est {
        SweepEstimator::Collision => collision_estimate(y, v, labels)?,
        SweepEstimator::CollisionHard => {
            let raw = collision_estimate(y, v, labels)?;
            let lam = cv_lambda(y, cfg.cv_seed, ThresholdKind::Hard, |h| collision_estimate(h, v, labels))?;
            threshold(&raw, lam, ThresholdKind::Hard)?
        }
        SweepEstimator::Eiv => eiv_least_squares(y, v, labels, false, cfg)?,
        SweepEstimator::EivSimplex => eiv_least_squares(y, v, labels, true, cfg)?,
        SweepEstimator::Vem => variational_em(y, v, labels, None, cfg)?,
        _ => unreachable!("not a side-information estimator"),
    };
    Ok(l2(e.values(), &t.c))
}

fn exact_error(est: SweepEstimator, t: &Truth, y: &BitstringHistogram, cfg: &EstimatorConfig) -> Result<f64> {
    let values = match est {
        SweepEstimator::Oracle => t.c.clone(),
        SweepEstimator::Xeb => xeb_estimate(&t.pi, y)?.values.values,
        SweepEstimator::XebHard => threshold_cv(&t.pi, y, cfg, ThresholdKind::Hard)?.values.values,
        SweepEstimator::XebSoft => threshold_cv(&t.pi, y, cfg, ThresholdKind::Soft)?.values.values,
        SweepEstimator::Mle => mle_multinomial(&t.pi, y, cfg)?.values.values,
        SweepEstimator::Poisson => mle_poisson_ridge(&t.pi, y, cfg)?.values.values,
        SweepEstimator::Moments => {
            let me = moment_estimate(y, t.c.len())?;
            return sorted_loss(&me.c_hat, &t.c);
        }
        _ => unreachable!("side-information estimator"),
    };
    Ok(l2(&values, &t.c))
}

/// Monte Carlo risk over the scenario grid.
///
/// Seeds: replicate `r` draws its truth from `derive_path(seed, [0, r])`, its
/// data at the `i`-th `n` from `[1, i, r]`, its reference samples at the
/// `j`-th `m` from `[2, j, r]` and its fold split from `[3, i, r]`. The truth is
/// shared across cells so curves are coupled. Replicates run in parallel and
/// are aggregated in replicate order, so results do not depend on threading.
pub fn risk_sweep(sc: &Scenario) -> Result<RiskCurve> {
    sc.validate()?;
    let mut cells = Vec::new();
    for &est in &sc.estimators {
        let ms: Vec<Option<u64>> = if est.needs_side_info() { sc.m.iter().map(|&m| Some(m)).collect() } else { vec![None] };
        for m in ms {
            for &n in &sc.n {
                cells.push(RiskCell { estimator: est, n, m, k: sc.k, d: sc.d, replicates: sc.replicates, mean: None, se: None, empty: true });
            }
        }
    }
    let circuit_pi = match &sc.truth {
        TruthMode::Dirichlet => None,
        TruthMode::Circuit { depth, gate_seed } => {
            let spec = CircuitSpec::chain(sc.d.trailing_zeros() as usize, *depth, *gate_seed);
            let mut model = pauli_model(&spec, 0..*depth, false);
            if model.sources.len() + 1 < sc.k {
                return Err(invalid(format!("circuit has only {} error rows", model.sources.len())));
            }
            model.sources.truncate(sc.k - 1);
            Some(build_pi_matrix_with(&spec, &model, &BuildOptions { allow_large: true })?)
        }
    };
    let per_rep: Vec<Vec<f64>> = (0..sc.replicates)
        .into_par_iter()
        .map(|r| {
            let rep = r as u64;
            let t = draw_truth(sc, circuit_pi.as_ref(), derive_path(sc.seed, &[0, rep]))?;
            let p = mixture_values(&t.pi, &t.c)?;
            let ys = sc
                .n
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    let s = derive_path(sc.seed, &[1, i as u64, rep]);
                    match sc.sampling {
                        SamplingModel::Multinomial => sample_bitstrings_multinomial(&p, n, s),
                        SamplingModel::Poisson => sample_bitstrings_poissonized(&p, n as f64, s),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let side = if sc.estimators.iter().any(|e| e.needs_side_info()) {
                sc.m.iter()
                    .enumerate()
                    .map(|(j, &m)| sample_side_info(&t.pi, m, derive_path(sc.seed, &[2, j as u64, rep])))
                    .collect::<Result<Vec<_>>>()?
            } else {
                vec![]
            };
            let mut errs = Vec::with_capacity(cells.len());
            for cell in &cells {
                let i = sc.n.iter().position(|&n| n == cell.n).unwrap_or(0);
                let cfg = EstimatorConfig { cv_seed: derive_path(sc.seed, &[3, i as u64, rep]), ..Default::default() };
                let e = match cell.m {
                    Some(m) => {
                        let j = sc.m.iter().position(|&x| x == m).unwrap_or(0);
                        side_info_error(cell.estimator, &t, &ys[i], &side[j], &cfg)?
                    }
                    None => exact_error(cell.estimator, &t, &ys[i], &cfg)?,
                };
                errs.push(e);
            }
            Ok(errs)
        })
        .collect::<Result<_>>()?;
    for (ci, cell) in cells.iter_mut().enumerate() {
        if per_rep.is_empty() {
            continue;
        }
        let v: Vec<f64> = per_rep.iter().map(|e| e[ci]).collect();
        let (m, se) = mean_se(&v);
        cell.mean = Some(m);
        cell.se = Some(se);
        cell.empty = false;
    }
    Ok(RiskCurve { scenario: sc.name.clone(), cells })
}
