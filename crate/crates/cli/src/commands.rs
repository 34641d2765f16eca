//! Argument parsing and the subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bandinv::apps::{absorbing_bd_invert, absorbing_shape, steady_state, value_function, AbsorbingSpec};
use bandinv::general::zero_up_rows;
use bandinv::homogeneous::hom_invert;
use bandinv::{invert, Extent, InverseView, InvertOptions, Scheme, StructuredMatrix};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bench::{bench, BenchConfig, BenchReport};
use crate::error::CliError;
use crate::format::{number, row, Digits};
use crate::specfile::{Model, SpecFile};
use crate::{selftest, TOL_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum SchemeArg {
    #[default]
    Ratio,
    Forward,
}

#[derive(Debug, Parser)]
#[command(name = "bandinv", version, about = "Exact inverses and spectra of band-plus-first-column rate matrices")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Relative tolerance for adaptive truncation of infinite matrices
    #[arg(long, global = true, env = TOL_ENV, default_value_t = 1e-12)]
    pub tol: f64,
    /// Significant digits in printed numbers
    #[arg(long, global = true, default_value_t = 12)]
    pub digits: usize,
    /// Print numbers in shortest round-trip form
    #[arg(long, global = true)]
    pub exact: bool,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Write results here instead of stdout
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for generated instances
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural conditions of a spec
    Validate { spec: PathBuf },
    /// Leading n x n block of the inverse
    Invert {
        spec: PathBuf,
        /// Block size (defaults to all rows of a finite matrix)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = SchemeArg::Ratio)]
        scheme: SchemeArg,
    },
    /// One entry c(i, j) of the inverse
    Element { spec: PathBuf, i: usize, j: usize },
    /// Stationary distribution of a generator (bd_0 = 0)
    SteadyState {
        spec: PathBuf,
        /// Print only the first n probabilities
        #[arg(long)]
        n: Option<usize>,
    },
    /// Discounted value function V solving alpha V = c + Q V
    ValueFunction {
        spec: PathBuf,
        /// Discount rate (overrides the spec file)
        #[arg(long)]
        alpha: Option<f64>,
        /// Comma-separated cost rates (override the spec file)
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        cost: Option<Vec<f64>>,
    },
    /// Inverse of an absorbing birth-and-death matrix
    AbsorbingBd {
        spec: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Eigenvalues by rank-one updates of the tridiagonal part
    Eigen {
        spec: PathBuf,
        /// Compare with a dense eigensolver
        #[arg(long)]
        oracle: bool,
    },
    /// Time the structured inverse against Sherman-Morrison and dense LU
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256, 512, 1024])]
        sizes: Vec<usize>,
        /// Timed repetitions per size after one discarded warmup
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// Write the per-size table here
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the full report here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the worked examples and a seeded consistency sweep
    Selftest {
        /// Matrices in the consistency sweep
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Worker threads for the sweep
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Printed text plus an error to report after it.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub failure: Option<CliError>,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Self { text, failure: None }
    }
}

fn load(path: &Path) -> Result<(SpecFile, Model), CliError> {
    let file = SpecFile::load(path)?;
    let model = file.model()?;
    Ok((file, model))
}

fn complex(z: Complex64, digits: Digits) -> String {
    if z.im == 0.0 {
        number(z.re, digits)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", number(z.re, digits), number(z.im.abs(), digits))
    }
}

fn block_of(view: &InverseView, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| view.get(i, j).expect("materialized")).collect()).collect()
}

impl Cli {
    fn digits(&self) -> Digits {
        if self.global.exact {
            Digits::RoundTrip
        } else {
            Digits::Significant(self.global.digits)
        }
    }

    fn opts(&self) -> Result<InvertOptions, CliError> {
        let tol = self.global.tol;
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(CliError::Usage(format!("tolerance must be positive, got {tol}")));
        }
        Ok(InvertOptions::default().with_tol(tol))
    }

    fn table(&self) -> bool {
        self.global.format == OutputFormat::Table
    }

    fn size(n: Option<usize>, b: &StructuredMatrix) -> Result<usize, CliError> {
        match (n, b.size()) {
            (Some(0), _) => Err(CliError::Usage("--n must be at least 1".into())),
            (Some(n), Some(size)) if n > size => {
                Err(CliError::Usage(format!("--n {n} exceeds the {size} rows of the matrix")))
            }
            (Some(n), _) => Ok(n),
            (None, Some(size)) => Ok(size),
            (None, None) => Err(CliError::Usage("an infinite matrix needs --n".into())),
        }
    }

    /// Writes `text` to `--output` or stdout.
    pub fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.global.output {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    pub fn execute(&self) -> Result<Outcome, CliError> {
        match &self.command {
            Command::Validate { spec } => self.validate(spec).map(Into::into),
            Command::Invert { spec, n, scheme } => self.invert(spec, *n, *scheme).map(Into::into),
            Command::Element { spec, i, j } => self.element(spec, *i, *j).map(Into::into),
            Command::SteadyState { spec, n } => self.steady_state(spec, *n).map(Into::into),
            Command::ValueFunction { spec, alpha, cost } => self.value_function(spec, *alpha, cost.as_deref()).map(Into::into),
            Command::AbsorbingBd { spec, n } => self.absorbing(spec, *n).map(Into::into),
            Command::Eigen { spec, oracle } => self.eigen(spec, *oracle).map(Into::into),
            Command::Bench { sizes, reps, csv, json } => self.bench(sizes, *reps, csv.as_deref(), json.as_deref()).map(Into::into),
            Command::Selftest { count, jobs } => self.selftest(*count, *jobs),
        }
    }

    fn render(&self, table: String, value: Value) -> String {
        if self.table() {
            table
        } else {
            let mut s = serde_json::to_string_pretty(&value).expect("json value serialises");
            s.push('\n');
            s
        }
    }

    fn validate(&self, path: &Path) -> Result<String, CliError> {
        let (_, model) = load(path)?;
        let b = StructuredMatrix::validate(model.band()?)?;
        let extent = match b.extent() {
            Extent::Finite(n) => format!("finite, {n} rows"),
            Extent::Infinite => "infinite".to_string(),
        };
        let d = self.digits();
        let zero_down: Vec<usize> = match b.size() {
            Some(n) => (1..n).filter(|&i| b.rates(i).down == 0.0).collect(),
            None => Vec::new(),
        };
        let zero_up = if b.size().is_some() { zero_up_rows(&b) } else { Vec::new() };
        let mut t = String::new();
        writeln!(t, "extent: {extent}").unwrap();
        writeln!(t, "bd_0 > 0: ok (bd_0 = {})", number(b.rates(0).down, d)).unwrap();
        writeln!(t, "rates finite and non-negative: ok").unwrap();
        writeln!(t, "bw_i > 0 for i >= 1: ok").unwrap();
        if b.size().is_some() {
            writeln!(t, "last row bu = 0: ok").unwrap();
            writeln!(t, "rows with bd_i = 0: {zero_down:?}").unwrap();
            writeln!(t, "rows with bu_i = 0: {zero_up:?}").unwrap();
        }
        writeln!(t, "valid").unwrap();
        let v = json!({ "valid": true, "extent": extent, "zero_down": zero_down, "zero_up": zero_up });
        Ok(self.render(t, v))
    }

    fn view(&self, model: &Model, n: usize, scheme: SchemeArg) -> Result<InverseView, CliError> {
        let opts = self.opts()?.with_scheme(match scheme {
            SchemeArg::Ratio => Scheme::Ratio,
            SchemeArg::Forward => Scheme::Forward,
        });
        Ok(match model {
            Model::Homogeneous(h) if scheme == SchemeArg::Ratio => hom_invert(h, n, &opts)?,
            Model::Absorbing(a) if scheme == SchemeArg::Ratio => absorbing_bd_invert(a, n, &opts)?,
            _ => invert(&StructuredMatrix::validate(model.band()?)?, n, &opts)?,
        })
    }

    fn block_text(&self, view: &InverseView, n: usize) -> (String, Value) {
        let d = self.digits();
        let block = block_of(view, n);
        let mut t = String::new();
        for r in &block {
            writeln!(t, "{}", row(r, d)).unwrap();
        }
        let residual = view.residual();
        writeln!(t, "residual {}", number(residual, d)).unwrap();
        let report = view.report();
        let mut v = json!({ "n": n, "inverse": block, "residual": residual });
        if let Some(level) = report.level {
            writeln!(t, "truncation level {level} change {}", number(report.change, d)).unwrap();
            v["truncation"] = json!({ "level": level, "change": report.change, "tol": report.tol });
        }
        (t, v)
    }

    fn invert(&self, path: &Path, n: Option<usize>, scheme: SchemeArg) -> Result<String, CliError> {
        let (_, model) = load(path)?;
        let b = StructuredMatrix::validate(model.band()?)?;
        let n = Self::size(n, &b)?;
        let view = self.view(&model, n, scheme)?;
        let (t, v) = self.block_text(&view, n);
        Ok(self.render(t, v))
    }

    fn element(&self, path: &Path, i: usize, j: usize) -> Result<String, CliError> {
        let (_, model) = load(path)?;
        let b = StructuredMatrix::validate(model.band()?)?;
        if let Some(size) = b.size() {
            if i >= size || j >= size {
                return Err(bandinv::Error::OutOfRange { i, j, size }.into());
            }
        }
        let n = i.max(j) + 1;
        let view = self.view(&model, n, SchemeArg::Ratio)?;
        let value = view.get(i, j).expect("materialized");
        let residual = view.residual();
        let d = self.digits();
        let t = format!("c({i},{j}) = {}\nresidual {}\n", number(value, d), number(residual, d));
        Ok(self.render(t, json!({ "i": i, "j": j, "value": value, "residual": residual })))
    }

    fn steady_state(&self, path: &Path, n: Option<usize>) -> Result<String, CliError> {
        let (_, model) = load(path)?;
        let ss = steady_state(&model.band()?, &self.opts()?)?;
        let shown = match n {
            Some(0) => return Err(CliError::Usage("--n must be at least 1".into())),
            Some(n) => n.min(ss.pi.len()),
            None => ss.pi.len(),
        };
        let d = self.digits();
        let mut t = format!("{}\nresidual {}\n", row(&ss.pi[..shown], d), number(ss.residual, d));
        let mut v = json!({ "pi": &ss.pi[..shown], "residual": ss.residual });
        if let Some(level) = ss.level {
            writeln!(t, "truncation level {level} change {}", number(ss.change, d)).unwrap();
            v["truncation"] = json!({ "level": level, "change": ss.change });
        }
        if let Some(tail) = ss.tail_bound {
            writeln!(t, "tail mass bound {}", number(tail, d)).unwrap();
            v["tail_bound"] = json!(tail);
        }
        Ok(self.render(t, v))
    }

    fn value_function(&self, path: &Path, alpha: Option<f64>, cost: Option<&[f64]>) -> Result<String, CliError> {
        let (file, model) = load(path)?;
        let alpha = alpha.or(file.alpha).ok_or_else(|| CliError::Usage("no discount rate: pass --alpha or set `alpha`".into()))?;
        let cost = cost
            .map(<[f64]>::to_vec)
            .or(file.cost.clone())
            .ok_or_else(|| CliError::Usage("no cost rates: pass --cost or set `cost`".into()))?;
        let vf = value_function(&model.band()?, &cost, alpha, &self.opts()?)?;
        let d = self.digits();
        let route = match vf.route {
            bandinv::apps::ValueRoute::Absorbing => "absorbing",
            bandinv::apps::ValueRoute::RankOne => "rank-one",
        };
        let t = format!("{}\nresidual {}\nroute {route}\n", row(&vf.v, d), number(vf.residual, d));
        Ok(self.render(t, json!({ "v": vf.v, "residual": vf.residual, "route": route })))
    }

    fn absorbing(&self, path: &Path, n: Option<usize>) -> Result<String, CliError> {
        let (_, model) = load(path)?;
        let spec: AbsorbingSpec = match &model {
            Model::Absorbing(a) => *a,
            _ => absorbing_shape(&StructuredMatrix::validate(model.band()?)?)?,
        };
        let b = StructuredMatrix::validate(spec.to_band()?)?;
        let n = Self::size(n, &b)?;
        let view = absorbing_bd_invert(&spec, n.max(2), &self.opts()?)?;
        let (mut t, mut v) = self.block_text(&view, n);
        let c11 = spec.c11()?;
        if spec.extent == Extent::Infinite {
            writeln!(t, "c(1,1) closed form {}", number(c11, self.digits())).unwrap();
            v["c11_closed_form"] = json!(c11);
        }
        Ok(self.render(t, v))
    }

    fn eigen(&self, path: &Path, oracle: bool) -> Result<String, CliError> {
        let (_, model) = load(path)?;
        let b = StructuredMatrix::validate(model.band()?)?;
        let r = bandinv::spectral::eigenvalues_of_b(&b, oracle)?;
        let d = self.digits();
        let values: Vec<String> = r.spectrum.values.iter().map(|&z| complex(z, d)).collect();
        let alphas: Vec<String> = r.alphas.iter().map(|&z| complex(z, d)).collect();
        let audit = if r.audit.passed() { "passed" } else { "FAILED" };
        let mut t = String::new();
        writeln!(t, "{}", values.join(" ")).unwrap();
        writeln!(t, "alphas {}", alphas.join(" ")).unwrap();
        writeln!(t, "stages {} all real {} sign pattern {}", r.stages, r.all_real, r.sign_pattern).unwrap();
        writeln!(t, "vector residual {}", number(r.vector_residual, d)).unwrap();
        writeln!(t, "expansion residual {}", number(r.expansion_residual, d)).unwrap();
        writeln!(t, "gershgorin {audit} (max real part {})", number(r.audit.max_real_part, d)).unwrap();
        let pair = |z: &Complex64| [z.re, z.im];
        let mut v = json!({
            "eigenvalues": r.spectrum.values.iter().map(pair).collect::<Vec<_>>(),
            "alphas": r.alphas.iter().map(pair).collect::<Vec<_>>(),
            "stages": r.stages,
            "all_real": r.all_real,
            "sign_pattern": r.sign_pattern,
            "vector_residual": r.vector_residual,
            "expansion_residual": r.expansion_residual,
            "gershgorin": { "passed": r.audit.passed(), "max_real_part": r.audit.max_real_part },
        });
        if let Some(dist) = r.oracle_distance {
            writeln!(t, "dense eigen distance {}", number(dist, d)).unwrap();
            v["oracle_distance"] = json!(dist);
        }
        Ok(self.render(t, v))
    }

    fn bench(&self, sizes: &[usize], reps: usize, csv: Option<&Path>, json_path: Option<&Path>) -> Result<String, CliError> {
        let mut config = BenchConfig::new(sizes.to_vec(), reps);
        config.seed = self.global.seed;
        let report = bench(&config)?;
        let write = |path: &Path, text: String| std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e));
        if let Some(p) = csv {
            write(p, report.to_csv()?)?;
        }
        if let Some(p) = json_path {
            write(p, report.to_json())?;
        }
        if self.table() {
            Ok(self.bench_table(&report))
        } else {
            Ok(report.to_json() + "\n")
        }
    }

    fn bench_table(&self, r: &BenchReport) -> String {
        let d = Digits::Significant(4);
        let slope = |f: Option<crate::bench::Fit>| match f {
            Some(f) => format!("slope {} [{}, {}]", number(f.slope, d), number(f.lo, d), number(f.hi, d)),
            None => "slope n/a".to_string(),
        };
        let mut t = format!("sizes {:?} repetitions {}\n", r.sizes, r.repetitions);
        for c in &r.counts {
            writeln!(t, "{:?} ops {:?} {}", c.instance, c.ops, slope(c.fit)).unwrap();
        }
        for s in &r.timings {
            let secs: Vec<String> = s.seconds.iter().map(|x| x.map_or("-".into(), |x| number(x, d))).collect();
            writeln!(t, "{:?} {:?} seconds [{}] {}", s.instance, s.method, secs.join(" "), slope(s.fit)).unwrap();
        }
        if r.insufficient {
            writeln!(t, "insufficient sizes for a slope").unwrap();
        }
        t
    }

    fn selftest(&self, count: usize, jobs: usize) -> Result<Outcome, CliError> {
        let checks = selftest::run(self.global.seed, count, jobs)?;
        let d = Digits::Significant(3);
        let mut t = String::new();
        for c in &checks {
            let mark = if c.passed() { "ok  " } else { "FAIL" };
            writeln!(t, "{mark} {} (error {}, tol {})", c.name, number(c.error, d), number(c.tol, d)).unwrap();
        }
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
        let v = json!({
            "checks": checks.iter().map(|c| json!({ "name": c.name, "error": c.error, "tol": c.tol, "passed": c.passed() })).collect::<Vec<_>>(),
        });
        let failure = (!failed.is_empty()).then(|| CliError::Mismatch(failed.join(", ")));
        Ok(Outcome { text: self.render(t, v), failure })
    }
}
