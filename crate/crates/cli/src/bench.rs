//! Timing and operation-count benchmark of the structured inverse against
//! the Sherman-Morrison baseline and dense LU.

use std::hint::black_box;
use std::time::Instant;

use bandinv::oracle::{dense_invert, sherman_morrison_invert};
use bandinv::{invert, BandSpec, HomogeneousSpec, Extent, InvertOptions, StructuredMatrix};
use serde::Serialize;

use crate::error::CliError;
use crate::suite;

/// Dense paths are skipped above this size.
pub const DENSE_CAP: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Structured,
    ShermanMorrison,
    DenseLu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Instance {
    Homogeneous,
    Random,
}

/// Least-squares slope of `ln y` on `ln n` with a 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub instance: Instance,
    pub method: Method,
    /// Median seconds per size; `None` where the method was skipped.
    pub seconds: Vec<Option<f64>>,
    pub fit: Option<Fit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counts {
    pub instance: Instance,
    /// Entry computations of a full structured inverse, per size.
    pub ops: Vec<u64>,
    pub fit: Option<Fit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub timings: Vec<Series>,
    pub counts: Vec<Counts>,
    /// Fewer than two sizes: no slopes were fitted.
    pub insufficient: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
}

impl BenchConfig {
    pub fn new(sizes: Vec<usize>, repetitions: usize) -> Self {
        Self { sizes, repetitions, seed: 0, methods: vec![Method::Structured, Method::ShermanMorrison, Method::DenseLu] }
    }
}

// two-sided 95% quantiles of Student's t for 1..=30 degrees of freedom
const T975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
    2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
];

/// Fits `ln y = a + s ln x`. Needs two points; the interval is zero-width
/// with exactly two.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len();
    if k < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let half = if k > 2 {
        let sse: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
        let se = (sse / (k - 2) as f64 / sxx).sqrt();
        let t = T975.get(k - 3).copied().unwrap_or(1.96);
        t * se
    } else {
        0.0
    };
    Some(Fit { slope, lo: slope - half, hi: slope + half })
}

fn instance(kind: Instance, n: usize, seed: u64) -> Result<StructuredMatrix, CliError> {
    let spec: BandSpec = match kind {
        Instance::Homogeneous => HomogeneousSpec::new(2.0, 1.0, 1.0, Extent::Finite(n)).to_band()?,
        Instance::Random => {
            let mut rng = suite::rng(seed ^ n as u64);
            return Ok(suite::random_matrix(&mut rng, n, 0, 0));
        }
    };
    Ok(StructuredMatrix::validate(spec)?)
}

fn run_once(method: Method, b: &StructuredMatrix, n: usize) -> Result<f64, CliError> {
    let opts = InvertOptions::default();
    let start = Instant::now();
    match method {
        Method::Structured => {
            black_box(invert(b, n, &opts)?);
        }
        Method::DenseLu => {
            black_box(dense_invert(&b.to_dense(n))?);
        }
        Method::ShermanMorrison => {
            let parts = b.decompose()?;
            let w_inv = dense_invert(&parts.tridiagonal.to_dense())?;
            black_box(sherman_morrison_invert(&w_inv, &parts.perturbation)?);
        }
    }
    Ok(start.elapsed().as_secs_f64())
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2])
    }
}

fn fit_sizes<T: Copy + Into<f64>>(sizes: &[usize], ys: &[Option<T>]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = sizes.iter().zip(ys).filter_map(|(&n, y)| y.map(|y| (n as f64, y.into()))).collect();
    loglog_fit(&pts)
}

pub fn bench(config: &BenchConfig) -> Result<BenchReport, CliError> {
    let sizes = &config.sizes;
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(CliError::Usage("benchmark sizes must be positive and strictly ascending".into()));
    }
    let kinds = [Instance::Homogeneous, Instance::Random];
    let mut counts = Vec::new();
    let mut timings = Vec::new();
    for kind in kinds {
        let mut ops = Vec::with_capacity(sizes.len());
        let mut series: Vec<Series> = config
            .methods
            .iter()
            .map(|&method| Series { instance: kind, method, seconds: Vec::new(), fit: None })
            .collect();
        for &n in sizes {
            let b = instance(kind, n, config.seed)?;
            ops.push(invert(&b, n, &InvertOptions::default())?.ops());
            for s in series.iter_mut() {
                let skip = config.repetitions == 0 || (s.method != Method::Structured && n > DENSE_CAP);
                if skip {
                    s.seconds.push(None);
                    continue;
                }
                run_once(s.method, &b, n)?; // warmup
                let mut times = Vec::with_capacity(config.repetitions);
                for _ in 0..config.repetitions {
                    times.push(run_once(s.method, &b, n)?);
                }
                s.seconds.push(Some(median(times)));
            }
        }
        let fit = fit_sizes(sizes, &ops.iter().map(|&o| Some(o as f64)).collect::<Vec<_>>());
        counts.push(Counts { instance: kind, ops, fit });
        if config.repetitions > 0 {
            for s in series.iter_mut() {
                s.fit = fit_sizes(sizes, &s.seconds);
            }
            timings.extend(series);
        }
    }
    Ok(BenchReport {
        sizes: sizes.clone(),
        repetitions: config.repetitions,
        seed: config.seed,
        timings,
        counts,
        insufficient: sizes.len() < 2,
    })
}

#[derive(Serialize)]
struct Row<'a> {
    instance: Instance,
    method: &'a str,
    size: usize,
    seconds: Option<f64>,
    ops: Option<u64>,
}

impl BenchReport {
    /// One row per instance, method and size; operation counts appear under
    /// the `ops` method.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Usage(format!("cannot write table: {e}"));
        for c in &self.counts {
            for (k, &n) in self.sizes.iter().enumerate() {
                w.serialize(Row { instance: c.instance, method: "ops", size: n, seconds: None, ops: Some(c.ops[k]) })
                    .map_err(err)?;
            }
        }
        for s in &self.timings {
            let method = match s.method {
                Method::Structured => "structured",
                Method::ShermanMorrison => "sherman-morrison",
                Method::DenseLu => "dense-lu",
            };
            for (k, &n) in self.sizes.iter().enumerate() {
                w.serialize(Row { instance: s.instance, method, size: n, seconds: s.seconds[k], ops: None })
                    .map_err(err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("cannot write table: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn timing(&self, instance: Instance, method: Method) -> Option<&Series> {
        self.timings.iter().find(|s| s.instance == instance && s.method == method)
    }

    pub fn count(&self, instance: Instance) -> Option<&Counts> {
        self.counts.iter().find(|c| c.instance == instance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_power() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0].iter().map(|&n: &f64| (n, 3.0 * n.powi(2))).collect();
        let f = loglog_fit(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!(f.hi - f.lo < 1e-9);
        assert!(loglog_fit(&pts[..1]).is_none());
    }

    #[test]
    fn counts_only() {
        let r = bench(&BenchConfig::new(vec![16, 32], 0)).unwrap();
        assert!(r.timings.is_empty());
        assert_eq!(r.counts.len(), 2);
        assert!(!r.insufficient);
        assert!(r.to_csv().unwrap().starts_with("instance,method,size,seconds,ops\n"));
    }

    #[test]
    fn single_size_is_flagged() {
        let r = bench(&BenchConfig::new(vec![24], 1)).unwrap();
        assert!(r.insufficient);
        assert!(r.timings.iter().all(|s| s.fit.is_none()));
        assert!(r.counts.iter().all(|c| c.fit.is_none()));
    }

    #[test]
    fn op_count_slope() {
        let r = bench(&BenchConfig::new(vec![64, 128, 256, 512, 1024], 0)).unwrap();
        for c in &r.counts {
            assert!((c.fit.unwrap().slope - 2.0).abs() < 0.05);
        }
    }

    #[test]
    fn rejects_unsorted() {
        assert!(bench(&BenchConfig::new(vec![32, 16], 0)).is_err());
    }
}
