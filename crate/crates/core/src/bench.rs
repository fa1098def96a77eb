//! Repeated-run comparison of solvers over a set of workspaces.
//!
//! Each (environment, method) pair is run `reps` times; repetitions run in
//! parallel and each owns its data. Only the solve call is timed.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::batch;
use crate::cspp::{solve_cspp, SppSolution};
use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::ga::{run_ga, GaConfig};
use crate::oracle::solve_exact;
use crate::workspace::Workspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Cspp,
    Exact,
    Ga,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Cspp => "cspp",
            Method::Exact => "exact",
            Method::Ga => "ga",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cspp" => Ok(Method::Cspp),
            "exact" => Ok(Method::Exact),
            "ga" => Ok(Method::Ga),
            other => Err(Error::Invalid(format!("unknown method {other:?} (expected cspp, exact or ga)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub reps: usize,
    /// GA population; the size schedule of [`GaConfig::for_size`] when `None`.
    pub ga_population: Option<usize>,
    /// Seed of the first GA repetition; repetition `r` uses `seed + r`.
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { methods: vec![Method::Cspp, Method::Ga], reps: 30, ga_population: None, seed: 1, threads: None }
    }
}

/// One repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub solution: SppSolution,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub env: String,
    pub method: Method,
    pub length_mean: f64,
    pub length_std: f64,
    pub time_mean: f64,
    pub time_std: f64,
    /// Percent time saved by CSPP over the GA in this environment.
    pub time_improving: Option<f64>,
    pub length_improving: Option<f64>,
    pub runs: Vec<Run>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, env: &str, method: Method) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.env == env && r.method == method)
    }

    /// One line per (environment, method). Lengths use nine significant
    /// digits, times are seconds at millisecond resolution, improvements are
    /// percentages and only filled on CSPP rows that have a GA counterpart.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "env,method,length_mean,length_std,time_mean,time_std,time_improving_pct,length_improving_pct\n",
        );
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.3},{:.3},{},{}\n",
                r.env,
                r.method,
                sig9(r.length_mean),
                sig9(r.length_std),
                r.time_mean,
                r.time_std,
                opt(r.time_improving),
                opt(r.length_improving)
            ));
        }
        out
    }
}

/// Sample mean and standard deviation (n - 1 denominator, 0 for one value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (mean, var.sqrt())
}

/// `100 * (baseline - ours) / baseline`.
pub fn improvement_pct(baseline: f64, ours: f64) -> f64 {
    100.0 * (baseline - ours) / baseline
}

fn run_once(ws: &Workspace, method: Method, rep: usize, cfg: &BenchConfig) -> Result<Run> {
    let clock = Instant::now();
    let solution = match method {
        Method::Cspp => solve_cspp(ws)?,
        Method::Exact => solve_exact(ws)?,
        Method::Ga => {
            let mut ga = GaConfig::for_size(ws.len(), cfg.seed.wrapping_add(rep as u64));
            if let Some(p) = cfg.ga_population {
                ga.population_size = p;
            }
            run_ga(ws, &ga)?.0
        }
    };
    Ok(Run { solution, seconds: clock.elapsed().as_secs_f64() })
}

pub fn run_bench(envs: &[(String, Workspace)], cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.reps == 0 {
        return Err(Error::Invalid("reps must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for (name, ws) in envs {
        for &method in &cfg.methods {
            let runs = batch::with_threads(cfg.threads, || {
                batch::map_range(cfg.reps, |rep| run_once(ws, method, rep, cfg))
            })
            .into_iter()
            .collect::<Result<Vec<Run>>>()?;
            let lengths: Vec<f64> = runs.iter().map(|r| r.solution.length).collect();
            let times: Vec<f64> = runs.iter().map(|r| r.seconds).collect();
            let (length_mean, length_std) = mean_std(&lengths);
            let (time_mean, time_std) = mean_std(&times);
            rows.push(BenchRow {
                env: name.clone(),
                method,
                length_mean,
                length_std,
                time_mean,
                time_std,
                time_improving: None,
                length_improving: None,
                runs,
            });
        }
    }
    let mut report = BenchReport { rows };
    for k in 0..report.rows.len() {
        if report.rows[k].method != Method::Cspp {
            continue;
        }
        let env = report.rows[k].env.clone();
        if let Some(ga) = report.row(&env, Method::Ga).cloned() {
            let row = &mut report.rows[k];
            row.time_improving = Some(improvement_pct(ga.time_mean, row.time_mean));
            row.length_improving = Some(improvement_pct(ga.length_mean, row.length_mean));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(improvement_pct(200.0, 150.0), 25.0);
    }

    #[test]
    fn method_names() {
        for m in [Method::Cspp, Method::Exact, Method::Ga] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("lkh".parse::<Method>().is_err());
    }

    #[test]
    fn small_report() {
        let envs: Vec<(String, Workspace)> =
            (0..2).map(|k| (format!("env{k}"), Workspace::random(8, 100.0, 2.0, k).unwrap())).collect();
        let cfg = BenchConfig {
            methods: vec![Method::Cspp, Method::Ga, Method::Exact],
            reps: 3,
            ga_population: Some(20),
            ..BenchConfig::default()
        };
        let report = run_bench(&envs, &cfg).unwrap();
        assert_eq!(report.rows.len(), 6);
        for (name, _) in &envs {
            let cspp = report.row(name, Method::Cspp).unwrap();
            let ga = report.row(name, Method::Ga).unwrap();
            let exact = report.row(name, Method::Exact).unwrap();
            assert_eq!(cspp.length_std, 0.0);
            assert_eq!(exact.length_std, 0.0);
            assert!(exact.length_mean <= cspp.length_mean + 1e-9);
            let expected = 100.0 * (ga.length_mean - cspp.length_mean) / ga.length_mean;
            assert!((cspp.length_improving.unwrap() - expected).abs() < 1e-12);
            assert!(ga.length_improving.is_none());
        }
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.lines().nth(1).unwrap().starts_with("env0,cspp,"));
    }
}
