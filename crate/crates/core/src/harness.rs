//! Benchmark runner and runtime regression.
//!
//! [`run_bench`] compiles generated circuits several times with different
//! seeds, keeps the narrowest width, and times a separate batch of
//! compilations. [`fit_polynomial`] fits runtime against circuit size by
//! least squares and reports R² and the F-statistic of the fit.

use std::io;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchgen::{gen_grcs, gen_qaoa, BenchgenError, GrcsSpec, QaoaSpec};
use crate::circuit::Circuit;
use crate::search::{gidnet, Iterations, SearchConfig, SearchError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Benchgen(#[from] BenchgenError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("repeats and time reps must be at least 1")]
    NoRuns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Grcs,
    Qaoa,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grcs" => Ok(Family::Grcs),
            "qaoa" => Ok(Family::Qaoa),
            _ => Err(format!("unknown family `{s}`, expected grcs or qaoa")),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Grcs => "grcs",
            Family::Qaoa => "qaoa",
        })
    }
}

/// Lattice shape for an `n`-qubit GRCS circuit: the most square `rows × cols`
/// with `rows ≤ cols`.
pub fn grcs_shape(n: usize) -> (usize, usize) {
    let rows = (1..=n)
        .take_while(|r| r * r <= n)
        .filter(|&r| n.is_multiple_of(r))
        .last()
        .unwrap_or(1);
    (rows, n / rows.max(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    /// GRCS depth or QAOA layer count.
    pub depth_or_p: usize,
    /// Compilations per instance; the narrowest is kept.
    pub repeats: usize,
    /// Timed compilations per instance.
    pub time_reps: usize,
    pub seed: u64,
    /// Instances generated per size.
    pub instances: usize,
    pub iterations: Iterations,
    pub threads: usize,
}

impl BenchConfig {
    pub fn new(family: Family, sizes: Vec<usize>, depth_or_p: usize) -> BenchConfig {
        BenchConfig {
            family,
            sizes,
            depth_or_p,
            repeats: 10,
            time_reps: 7,
            seed: 0,
            instances: 1,
            iterations: Iterations::Auto,
            threads: 1,
        }
    }
}

/// One benchmarked instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub circuit_id: String,
    pub family: Family,
    pub n: usize,
    pub depth_or_p: usize,
    /// Seed the instance was generated from.
    pub seed: u64,
    pub orig_width: usize,
    /// Width of every repeat, in run order.
    pub widths: Vec<usize>,
    pub best_width: usize,
    pub runtime_samples: Vec<f64>,
    pub mean_runtime_s: f64,
    pub median_runtime_s: f64,
}

/// The CSV form of a [`BenchRecord`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: Family,
    pub n: usize,
    pub depth_or_p: usize,
    pub seed: u64,
    pub orig_width: usize,
    pub best_width: usize,
    pub mean_runtime_s: f64,
    pub median_runtime_s: f64,
}

impl BenchRecord {
    pub fn row(&self) -> BenchRow {
        BenchRow {
            family: self.family,
            n: self.n,
            depth_or_p: self.depth_or_p,
            seed: self.seed,
            orig_width: self.orig_width,
            best_width: self.best_width,
            mean_runtime_s: self.mean_runtime_s,
            median_runtime_s: self.median_runtime_s,
        }
    }
}

/// Deterministic seed stream: the `index`-th draw of a generator seeded
/// with `seed` on stream `stream`.
fn derive_seed(seed: u64, stream: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

// seed streams
const INSTANCE_STREAM: u64 = 1;
const RUN_STREAM: u64 = 2;

/// Generates one benchmark circuit and returns it with its id.
pub fn generate(family: Family, n: usize, depth_or_p: usize, seed: u64) -> Result<(String, Circuit), HarnessError> {
    Ok(match family {
        Family::Grcs => {
            let (rows, cols) = grcs_shape(n);
            let spec = GrcsSpec::new(rows, cols, depth_or_p, seed)?;
            (format!("grcs-{rows}x{cols}-d{depth_or_p}-s{seed}"), gen_grcs(&spec))
        }
        Family::Qaoa => {
            let spec = QaoaSpec::random(n, depth_or_p, seed)?;
            (format!("qaoa-n{n}-p{depth_or_p}-s{seed}"), gen_qaoa(&spec))
        }
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Benchmarks every `(size, instance)` pair in order.
///
/// Widths depend only on the configuration; timings are wall clock around
/// the compile call, taken one at a time.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>, HarnessError> {
    if config.repeats == 0 || config.time_reps == 0 {
        return Err(HarnessError::NoRuns);
    }
    let mut out = Vec::new();
    for (si, &n) in config.sizes.iter().enumerate() {
        for inst in 0..config.instances.max(1) {
            let index = si * config.instances.max(1) + inst;
            let instance_seed = derive_seed(config.seed, INSTANCE_STREAM, index);
            let (circuit_id, circuit) = generate(config.family, n, config.depth_or_p, instance_seed)?;

            let run_config = |r: usize| SearchConfig {
                iterations: config.iterations,
                seed: derive_seed(instance_seed, RUN_STREAM, r),
                threads: config.threads,
                ..SearchConfig::default()
            };
            let widths = (0..config.repeats)
                .map(|r| gidnet(&circuit, &run_config(r)).map(|s| s.width()))
                .collect::<Result<Vec<_>, _>>()?;

            let timed = run_config(0);
            let mut samples = Vec::with_capacity(config.time_reps);
            for _ in 0..config.time_reps {
                let start = Instant::now();
                let sol = gidnet(&circuit, &timed)?;
                samples.push(start.elapsed().as_secs_f64());
                std::hint::black_box(sol);
            }

            out.push(BenchRecord {
                circuit_id,
                family: config.family,
                n: circuit.num_qubits(),
                depth_or_p: config.depth_or_p,
                seed: instance_seed,
                orig_width: circuit.num_qubits(),
                best_width: widths.iter().copied().min().unwrap_or(n),
                widths,
                mean_runtime_s: mean(&samples),
                median_runtime_s: median(&samples),
                runtime_samples: samples,
            });
        }
    }
    Ok(out)
}

pub fn write_csv<W: io::Write>(records: &[BenchRecord], writer: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r.row())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: io::Read>(reader: R) -> Result<Vec<BenchRow>, HarnessError> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .collect::<Result<Vec<BenchRow>, _>>()
        .map_err(HarnessError::from)
}

pub fn write_json<W: io::Write>(records: &[BenchRecord], writer: W) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(writer, records)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("insufficient sizes: degree {degree} needs at least {needed} distinct sizes, found {found}")]
    InsufficientSizes {
        degree: usize,
        needed: usize,
        found: usize,
    },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("x and y have different lengths")]
    LengthMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub degree: usize,
    /// Coefficient of `x^k` at index `k`.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    /// Infinite (serialized as `null`) when the fit is exact.
    pub f_statistic: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl FitReport {
    pub fn predict(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Least-squares polynomial fit of `ys` against `xs` with monomials up to
/// `degree`.
///
/// `R² = 1 − SS_res/SS_tot` and `F = (SS_reg/degree) / (SS_res/(N−degree−1))`.
/// A constant response has `SS_tot = 0`; R² is then reported as 0 with a
/// warning.
pub fn fit_polynomial(xs: &[f64], ys: &[f64], degree: usize) -> Result<FitReport, FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch);
    }
    let mut distinct = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let needed = degree + 2;
    if distinct.len() < needed {
        return Err(FitError::InsufficientSizes {
            degree,
            needed,
            found: distinct.len(),
        });
    }

    // scale x into [-1, 1] so high powers stay well conditioned
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let n = xs.len();
    let a = DMatrix::from_fn(n, degree + 1, |i, k| (xs[i] / scale).powi(k as i32));
    let y = DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let min_sv = svd.singular_values.min();
    if max_sv == 0.0 || min_sv / max_sv < 1e-12 {
        return Err(FitError::RankDeficient);
    }
    let beta = svd.solve(&y, 0.0).map_err(|_| FitError::RankDeficient)?;

    let fitted = &a * &beta;
    let y_mean = ys.iter().sum::<f64>() / n as f64;
    let ss_res: f64 = ys.iter().zip(fitted.iter()).map(|(y, f)| (y - f).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let ss_reg = (ss_tot - ss_res).max(0.0);

    let (r_squared, warning) = if ss_tot == 0.0 {
        (0.0, Some("response is constant; R² reported as 0".to_string()))
    } else {
        ((1.0 - ss_res / ss_tot).clamp(0.0, 1.0), None)
    };
    let dof = (n - degree - 1) as f64;
    let f_statistic = if ss_res == 0.0 {
        if ss_reg == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (ss_reg / degree.max(1) as f64) / (ss_res / dof)
    };

    let coefficients = beta
        .iter()
        .enumerate()
        .map(|(k, b)| b / scale.powi(k as i32))
        .collect();
    Ok(FitReport {
        degree,
        coefficients,
        r_squared,
        f_statistic,
        points: n,
        warning,
    })
}

/// Fits mean runtime against `n` over CSV rows.
pub fn fit_rows(rows: &[BenchRow], degree: usize) -> Result<FitReport, FitError> {
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_runtime_s).collect();
    fit_polynomial(&xs, &ys, degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_shapes() {
        assert_eq!(grcs_shape(16), (4, 4));
        assert_eq!(grcs_shape(36), (6, 6));
        assert_eq!(grcs_shape(12), (3, 4));
        assert_eq!(grcs_shape(7), (1, 7));
        assert_eq!(grcs_shape(144), (12, 12));
    }

    #[test]
    fn exact_cubic_is_recovered() {
        let xs: Vec<f64> = [16.0, 36.0, 64.0, 100.0, 144.0].to_vec();
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 - 0.02 * x + 3e-4 * x * x + 2e-6 * x * x * x).collect();
        let r = fit_polynomial(&xs, &ys, 3).unwrap();
        assert!((r.r_squared - 1.0).abs() < 1e-9);
        for (x, y) in xs.iter().zip(&ys) {
            assert!((r.predict(*x) - y).abs() < 1e-9);
        }
        assert!((r.coefficients[3] - 2e-6).abs() < 1e-10);
    }

    #[test]
    fn constant_response_reports_zero() {
        let r = fit_polynomial(&[1.0, 2.0, 3.0, 4.0], &[5.0; 4], 2).unwrap();
        assert_eq!(r.r_squared, 0.0);
        assert!(r.warning.is_some());
    }

    #[test]
    fn too_few_sizes() {
        let e = fit_polynomial(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 5.0], 3).unwrap_err();
        assert_eq!(
            e,
            FitError::InsufficientSizes {
                degree: 3,
                needed: 5,
                found: 4
            }
        );
        assert!(e.to_string().starts_with("insufficient sizes"));
        // repeated sizes do not count twice
        let xs = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        assert!(fit_polynomial(&xs, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 3).is_err());
    }

    #[test]
    fn f_statistic_matches_definition() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let ys = [1.1, 3.9, 9.2, 15.8, 25.3, 35.9];
        let r = fit_polynomial(&xs, &ys, 2).unwrap();
        let fitted: Vec<f64> = xs.iter().map(|&x| r.predict(x)).collect();
        let mean = ys.iter().sum::<f64>() / 6.0;
        let ss_res: f64 = ys.iter().zip(&fitted).map(|(y, f)| (y - f).powi(2)).sum();
        let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
        let f = ((ss_tot - ss_res) / 2.0) / (ss_res / 3.0);
        assert!((r.f_statistic - f).abs() / f < 1e-6);
        assert!((r.r_squared - (1.0 - ss_res / ss_tot)).abs() < 1e-12);
    }

    #[test]
    fn median_and_mean() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(mean(&[1.0, 2.0, 3.0]), 2.0);
    }

    #[test]
    fn derived_seeds_differ_and_repeat() {
        assert_eq!(derive_seed(5, 1, 3), derive_seed(5, 1, 3));
        assert_ne!(derive_seed(5, 1, 3), derive_seed(5, 1, 4));
        assert_ne!(derive_seed(5, 1, 3), derive_seed(5, 2, 3));
    }

    #[test]
    fn small_bench_runs() {
        let mut cfg = BenchConfig::new(Family::Grcs, vec![16], 11);
        cfg.time_reps = 2;
        let recs = run_bench(&cfg).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert!(r.best_width <= 16);
        assert_eq!(r.best_width, *r.widths.iter().min().unwrap());
        assert_eq!(r.widths.len(), 10);
        assert!(r.runtime_samples.iter().all(|&s| s > 0.0));

        let mut qaoa = BenchConfig::new(Family::Qaoa, vec![4], 1);
        qaoa.time_reps = 1;
        assert!(run_bench(&qaoa).unwrap()[0].best_width <= 4);
    }

    #[test]
    fn csv_round_trip() {
        let mut cfg = BenchConfig::new(Family::Qaoa, vec![6, 8], 1);
        cfg.repeats = 2;
        cfg.time_reps = 1;
        let recs = run_bench(&cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "family,n,depth_or_p,seed,orig_width,best_width,mean_runtime_s,median_runtime_s\nqaoa,6,1,"
        ));
        let rows = read_csv(buf.as_slice()).unwrap();
        assert_eq!(rows, recs.iter().map(BenchRecord::row).collect::<Vec<_>>());
    }
}
