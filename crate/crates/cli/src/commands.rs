use crate::manifest::RunManifest;
use crate::{Cli, Command, Format, Method, Preset, Sampling, TestKind};
use rcslab::analysis::scenarios::TimeDependence;
use rcslab::analysis::{chi2_gof, gradient_test, risk_sweep, Alternative, Scenario};
use rcslab::circuit::{build_pi_matrix, pauli_model, table_model, CircuitSpec, ErrorModelSpec, TableOptions};
use rcslab::estimators::{
    bootstrap_stderr, collision_estimate, eiv_least_squares, mle_multinomial, mle_poisson_ridge, threshold_cv,
    variational_em, xeb_estimate, Estimate, EstimatorConfig, ThresholdChoice, ThresholdKind,
};
use rcslab::mixture::{
    mixture_values, read_histogram_csv, read_pimx, sample_bitstrings_multinomial, sample_bitstrings_poissonized,
    sample_side_info, write_histogram_csv, write_pimx, BitstringHistogram, DistributionMatrix, SideHistograms,
};
use rcslab::moments::{fidelity_estimate, moment_estimate};
use rcslab::report::{build_report, render_markdown, Provenance};
use rcslab::rng::derive_seed;
use rcslab::{Error, ErrorLabel, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Seed streams derived from `--seed`.
const DATA_STREAM: u64 = 0;
const SIDE_STREAM: u64 = 1;
const BOOT_STREAM: u64 = 2;
const GOF_STREAM: u64 = 3;
const NULL_STREAM: u64 = 4;

struct Run<'a> {
    cli: &'a Cli,
    start: Instant,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    seeds: Vec<u64>,
}

impl<'a> Run<'a> {
    fn input(&mut self, p: &Path) -> PathBuf {
        self.inputs.push(p.to_path_buf());
        p.to_path_buf()
    }

    fn json<T: DeserializeOwned>(&mut self, p: &Path) -> Result<T> {
        let text = std::fs::read_to_string(self.input(p))?;
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", p.display())))
    }

    fn pimx(&mut self, p: &Path) -> Result<DistributionMatrix> {
        read_pimx(BufReader::new(std::fs::File::open(self.input(p))?))
    }

    fn histogram(&mut self, p: &Path) -> Result<BitstringHistogram> {
        read_histogram_csv(BufReader::new(std::fs::File::open(self.input(p))?))
    }

    fn side(&mut self, p: &Path) -> Result<SideHistograms> {
        let s: SideHistograms = self.json(p)?;
        SideHistograms::new(s.d(), s.m(), s.components().to_vec())
    }

    /// Write the main result to `--out` or stdout.
    fn emit(&mut self, bytes: &[u8]) -> Result<()> {
        match &self.cli.out {
            Some(p) => {
                std::fs::write(p, bytes)?;
                self.outputs.push(p.clone());
            }
            None => std::io::stdout().write_all(bytes)?,
        }
        Ok(())
    }

    fn require_out(&self, what: &str) -> Result<PathBuf> {
        self.cli.out.clone().ok_or_else(|| Error::InvalidArgument(format!("{what} needs --out")))
    }

    fn finish(self, name: &str) -> Result<()> {
        let Some(out) = &self.cli.out else { return Ok(()) };
        let m = RunManifest {
            subcommand: name.into(),
            config: serde_json::json!({ "command": &self.cli.command, "seed": self.cli.seed, "format": self.cli.format }),
            seeds: self.seeds,
            inputs: self.inputs,
            outputs: self.outputs,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            wall_clock_secs: self.start.elapsed().as_secs_f64(),
        };
        m.write(out)
    }
}

/// Weights given either as a bare array or as an object with `values`.
#[derive(Deserialize)]
#[serde(untagged)]
enum WeightsFile {
    Values(Vec<f64>),
    Object { values: Vec<f64> },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn generic_labels(k: usize) -> Vec<ErrorLabel> {
    (0..k).map(|i| if i == 0 { ErrorLabel::ideal() } else { ErrorLabel::custom(format!("row{i}")) }).collect()
}

fn estimate_csv(est: &Estimate) -> String {
    let mut s = String::from("label,value,stderr\n");
    for (i, (l, v)) in est.labels().iter().zip(est.values()).enumerate() {
        let se = est.stderr.as_ref().map(|se| se[i].to_string()).unwrap_or_default();
        s.push_str(&format!("{l},{v},{se}\n"));
    }
    s
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<Vec<u8>> {
    Ok((serde_json::to_string_pretty(v)? + "\n").into_bytes())
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut r = Run { cli, start: Instant::now(), inputs: vec![], outputs: vec![], seeds: vec![cli.seed] };
    let seed = cli.seed;
    let name = match &cli.command {
        Command::Simulate { spec, model, preset, white_noise } => {
            let out = r.require_out("simulate")?;
            let spec: CircuitSpec = r.json(spec)?;
            let model = match (model, preset) {
                (Some(p), _) => r.json::<ErrorModelSpec>(p)?,
                (None, Some(Preset::Pauli)) => pauli_model(&spec, 0..spec.depth, *white_noise),
                (None, Some(Preset::Table)) => {
                    table_model(&spec, &TableOptions { white_noise: *white_noise, ..Default::default() })
                }
                (None, None) => return Err(invalid("simulate needs --model or --preset")),
            };
            let pi = build_pi_matrix(&spec, &model)?;
            let mut buf = Vec::new();
            write_pimx(&mut buf, &pi)?;
            r.emit(&buf)?;
            let model_path = PathBuf::from(format!("{}.model.json", out.display()));
            std::fs::write(&model_path, serde_json::to_string_pretty(&model)? + "\n")?;
            r.outputs.push(model_path);
            "simulate"
        }
        Command::Sample { pi, weights, n, sampling, side_m } => {
            let pi = r.pimx(pi)?;
            let w = match r.json::<WeightsFile>(weights)? {
                WeightsFile::Values(v) | WeightsFile::Object { values: v } => v,
            };
            let p = mixture_values(&pi, &w)?;
            let data_seed = derive_seed(seed, DATA_STREAM);
            let y = match sampling {
                Sampling::Multinomial => sample_bitstrings_multinomial(&p, *n, data_seed)?,
                Sampling::Poisson => sample_bitstrings_poissonized(&p, *n as f64, data_seed)?,
            };
            let mut buf = Vec::new();
            write_histogram_csv(&mut buf, &y)?;
            if *side_m > 0 {
                let out = r.require_out("--side-m")?;
                let v = sample_side_info(&pi, *side_m, derive_seed(seed, SIDE_STREAM))?;
                let side_path = PathBuf::from(format!("{}.side.json", out.display()));
                std::fs::write(&side_path, serde_json::to_string(&v)? + "\n")?;
                r.outputs.push(side_path);
            }
            r.emit(&buf)?;
            "sample"
        }
        Command::Estimate { method, input, pi, side, simplex, n_boot, lambda } => {
            let y = r.histogram(input)?;
            let pi = pi.as_ref().map(|p| r.pimx(p)).transpose()?;
            let side = side.as_ref().map(|p| r.side(p)).transpose()?;
            let mut cfg = EstimatorConfig { cv_seed: derive_seed(seed, DATA_STREAM), ..Default::default() };
            if let Some(l) = lambda {
                cfg.threshold = ThresholdChoice::Fixed(*l);
            }
            let labels = match (&pi, &side) {
                (Some(p), _) => p.labels().to_vec(),
                (None, Some(v)) => generic_labels(v.k()),
                (None, None) => vec![],
            };
            let fit = |h: &BitstringHistogram| run_method(*method, pi.as_ref(), side.as_ref(), &labels, h, &cfg, *simplex);
            let mut est = fit(&y)?;
            if *n_boot > 0 {
                est.stderr = Some(bootstrap_stderr(&y, *n_boot, derive_seed(seed, BOOT_STREAM), fit)?);
            }
            let bytes = match cli.format.unwrap_or(Format::Json) {
                Format::Csv => estimate_csv(&est).into_bytes(),
                Format::Json => (est.to_json()? + "\n").into_bytes(),
                Format::Md => return Err(invalid("estimate supports json and csv")),
            };
            r.emit(&bytes)?;
            "estimate"
        }
        Command::Moments { k, input } => {
            let y = r.histogram(input)?;
            let me = moment_estimate(&y, *k)?;
            let mut v = serde_json::to_value(&me)?;
            v["fidelity"] = fidelity_estimate(&me).into();
            r.emit(&pretty(&v)?)?;
            "moments"
        }
        Command::Test {
            kind,
            n_boot,
            pi,
            input,
            estimate,
            qubits,
            layers,
            eps_first,
            eps_last,
            eps_null,
            n,
            growing,
            one_sided,
        } => {
            match kind {
                TestKind::Gof => {
                    let pi = r.pimx(pi.as_ref().ok_or_else(|| invalid("gof needs --pi"))?)?;
                    let y = r.histogram(input.as_ref().ok_or_else(|| invalid("gof needs --input"))?)?;
                    let cfg = EstimatorConfig::default();
                    let fitted = match estimate {
                        Some(p) => Estimate::from_json(&std::fs::read_to_string(r.input(p))?)?,
                        None => mle_poisson_ridge(&pi, &y, &cfg)?,
                    };
                    let res = chi2_gof(&pi, &y, &fitted, *n_boot, derive_seed(seed, GOF_STREAM), &cfg)?;
                    r.emit(&pretty(&res)?)?;
                }
                TestKind::Gradient => {
                    let sc = TimeDependence::new(*qubits, *layers, seed, *eps_first, *eps_last, *eps_null)?;
                    let cfg = EstimatorConfig::default();
                    let y = match input {
                        Some(p) => r.histogram(p)?,
                        None => sc.dataset(*growing, *n, derive_seed(seed, DATA_STREAM))?.1,
                    };
                    let rates = sc.layer_rates(&y, &cfg)?;
                    let alt = if *one_sided { Alternative::Greater } else { Alternative::TwoSided };
                    let res = gradient_test(&rates, *n_boot, derive_seed(seed, NULL_STREAM), alt, |s| {
                        sc.null_layer_rates(*n, s, &cfg)
                    })?;
                    let v = serde_json::json!({ "layer_rates": rates, "test": res });
                    r.emit(&pretty(&v)?)?;
                }
            }
            "test"
        }
        Command::Bench { scenario } => {
            let sc: Scenario = r.json(scenario)?;
            r.seeds = vec![sc.seed];
            let curve = risk_sweep(&sc)?;
            let bytes = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => curve.to_csv().into_bytes(),
                Format::Json => pretty(&curve)?,
                Format::Md => return Err(invalid("bench supports csv and json")),
            };
            r.emit(&bytes)?;
            "bench"
        }
        Command::Report { estimate, model } => {
            let est = Estimate::from_json(&std::fs::read_to_string(r.input(estimate))?)?;
            let model: ErrorModelSpec = r.json(model)?;
            let name = estimate.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let config = serde_json::to_string(&cli.command)?;
            let rep = build_report(&est, &model, Provenance::new(name, vec![seed], &config))?;
            let bytes = match cli.format.unwrap_or(Format::Json) {
                Format::Md => render_markdown(&rep).into_bytes(),
                Format::Json => (rep.to_json()? + "\n").into_bytes(),
                Format::Csv => return Err(invalid("report supports json and md")),
            };
            r.emit(&bytes)?;
            "report"
        }
    };
    r.finish(name)
}

fn run_method(
    method: Method,
    pi: Option<&DistributionMatrix>,
    side: Option<&SideHistograms>,
    labels: &[ErrorLabel],
    y: &BitstringHistogram,
    cfg: &EstimatorConfig,
    simplex: bool,
) -> Result<Estimate> {
    let need_pi = || pi.ok_or_else(|| invalid("this method needs --pi"));
    let need_side = || side.ok_or_else(|| Error::NeedsSideInfo("this method needs --side".into()));
    match method {
        Method::Xeb => xeb_estimate(need_pi()?, y),
        Method::XebHt => threshold_cv(need_pi()?, y, cfg, ThresholdKind::Hard),
        Method::XebSt => threshold_cv(need_pi()?, y, cfg, ThresholdKind::Soft),
        Method::Mle => mle_multinomial(need_pi()?, y, cfg),
        Method::MlePoisson => mle_poisson_ridge(need_pi()?, y, cfg),
        Method::Collision => collision_estimate(y, need_side()?, labels),
        Method::Eiv => eiv_least_squares(y, need_side()?, labels, simplex, cfg),
        Method::Vem => variational_em(y, need_side()?, labels, None, cfg),
    }
}
