//! Batch front end for `dimred-core`: job specification, dispatch, reports
//! and the count cache.

pub mod cache;
pub mod config;
pub mod report;

use std::collections::BTreeSet;
use std::path::PathBuf;

use dimred_core::dt::{
    extract_dt, hn_factorize, stability_invariance_check, total_series_with,
    verify_kac_conjecture_with,
};
use dimred_core::fq::{count_moment_fiber, count_seminilpotent, group_order, MomentFiberCount};
use dimred_core::gqg::{
    closed_form_count, seminilpotent_leading, u_plus_dim, FormParams, OracleTag,
};
use dimred_core::kac::{hua_kac, km_weight_dim};
use dimred_core::quiver::{ks_twist, DimVector, FourthRoot, Quiver};
use dimred_core::series::CentralCharge;
use dimred_core::Error;
use num::BigRational;
use serde::Serialize;
use serde_json::json;
use thiserror::Error as ThisError;

use crate::cache::{cached, Cache};
use crate::config::{load_config, parse_charge, QuiverConfig};
use crate::report::{OutFormat, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) => match e {
                Error::VertexMismatch { .. }
                | Error::UnknownVertex(_)
                | Error::InvalidQuiver(_)
                | Error::NonReflectableVertex(_)
                | Error::Parse(_)
                | Error::NotPrime(_)
                | Error::DegenerateCharge(_)
                | Error::InvalidCharge(_)
                | Error::InvalidFormParam(_) => EXIT_CONFIG,
                Error::TooLarge(_)
                | Error::NotPolynomialCount(_)
                | Error::OutsideBound(_)
                | Error::ImaginaryUnsupported
                | Error::NoOracle(_) => EXIT_INFEASIBLE,
                _ => EXIT_VERIFICATION,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Kac polynomials up to a height bound.
    Kac,
    /// Moment-map fiber count at one dimension vector and prime.
    Count,
    /// Total DT-series, ray factors and DT-invariants.
    Dt,
    /// Dimensions of the generalized quantum group with oracle cross-checks.
    Qdim,
    /// Compares DT-invariants with Kac polynomials.
    Verify,
    /// Checks the sign identity of the twisted reduction map.
    TwistCheck,
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: Command,
    pub quiver: Option<PathBuf>,
    pub bound: Option<u32>,
    pub primes: Vec<u64>,
    pub gamma: Option<Vec<u32>>,
    pub q: Option<u64>,
    /// Each in `re1,im1;re2,im2;...` form.
    pub charges: Vec<String>,
    pub seminilpotent: bool,
    pub format: OutFormat,
    pub cache: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            quiver: None,
            bound: None,
            primes: Vec::new(),
            gamma: None,
            q: None,
            charges: Vec::new(),
            seminilpotent: false,
            format: OutFormat::Text,
            cache: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.bound == Some(0) {
            return Err(CliError::Config("bound must be at least 1".into()));
        }
        let distinct: BTreeSet<u64> = self.primes.iter().copied().collect();
        if distinct.len() != self.primes.len() {
            return Err(CliError::Config("primes must be distinct".into()));
        }
        Ok(())
    }

    fn bound(&self) -> Result<u32, CliError> {
        self.bound
            .ok_or_else(|| CliError::Config("--bound is required".into()))
    }

    fn config(&self) -> Result<QuiverConfig, CliError> {
        let path = self
            .quiver
            .as_ref()
            .ok_or_else(|| CliError::Config("--quiver is required".into()))?;
        load_config(path)
    }

    /// Charges from the flags, else the config file's charge.
    fn charges(&self, cfg: &QuiverConfig) -> Result<Vec<CentralCharge>, CliError> {
        let n = cfg.quiver.num_vertices();
        let mut out = self
            .charges
            .iter()
            .map(|c| parse_charge(c, n))
            .collect::<Result<Vec<_>, _>>()?;
        if out.is_empty() {
            out.extend(cfg.charge.clone());
        }
        if out.len() > 2 {
            return Err(CliError::Config("at most two charges".into()));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Report,
}

pub fn run(job: &JobSpec) -> Result<Outcome, CliError> {
    job.validate()?;
    let cache = job
        .cache
        .as_ref()
        .map(|d| {
            Cache::open(d)
                .map_err(|e| CliError::Config(format!("cache directory {}: {e}", d.display())))
        })
        .transpose()?;
    let cache = cache.as_ref();
    match job.command {
        Command::Kac => run_kac(job),
        Command::Count => run_count(job, cache),
        Command::Dt => run_dt(job, cache),
        Command::Qdim => run_qdim(job),
        Command::Verify => run_verify(job, cache),
        Command::TwistCheck => run_twist_check(job),
    }
}

fn ok(json: serde_json::Value, table: Table, summary: Vec<String>) -> Outcome {
    Outcome {
        exit_code: EXIT_OK,
        report: Report {
            json,
            table,
            summary,
        },
    }
}

fn to_json<T: Serialize>(t: &T) -> serde_json::Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn gamma_str(g: &DimVector) -> String {
    g.0.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn fiber_count(
    cache: Option<&Cache>,
    q: &Quiver,
    g: &DimVector,
    p: u64,
) -> dimred_core::Result<u64> {
    cached(
        cache,
        || Cache::key("moment_fiber", q, g, p, ""),
        || count_moment_fiber(q, g, p),
    )
}

fn run_kac(job: &JobSpec) -> Result<Outcome, CliError> {
    let cfg = job.config()?;
    let table = hua_kac(&cfg.quiver, job.bound()?)?;
    let mut t = Table::new(&["gamma", "a_gamma(q)"]);
    for (g, a) in &table.entries {
        t.push(vec![gamma_str(g), a.to_string()]);
    }
    Ok(ok(to_json(&table), t, Vec::new()))
}

fn run_count(job: &JobSpec, cache: Option<&Cache>) -> Result<Outcome, CliError> {
    let cfg = job.config()?;
    let q = &cfg.quiver;
    let g = DimVector(
        job.gamma
            .clone()
            .ok_or_else(|| CliError::Config("--gamma is required".into()))?,
    );
    if g.len() != q.num_vertices() {
        return Err(Error::VertexMismatch {
            expected: q.num_vertices(),
            got: g.len(),
        }
        .into());
    }
    let p = job
        .q
        .ok_or_else(|| CliError::Config("--q is required".into()))?;
    let raw = fiber_count(cache, q, &g, p)?;
    let seminilpotent = if job.seminilpotent {
        Some(cached(
            cache,
            || Cache::key("seminilpotent", q, &g, p, ""),
            || count_seminilpotent(q, &g, p),
        )?)
    } else {
        None
    };
    let record = MomentFiberCount {
        quiver_hash: q.canonical_hash(),
        gamma: g.clone(),
        q: p,
        raw,
        stack: BigRational::new(raw.into(), group_order(&g, p).into()),
        seminilpotent,
    };
    let mut t = Table::new(&["gamma", "q", "raw", "stack", "seminilpotent"]);
    t.push(vec![
        gamma_str(&g),
        p.to_string(),
        raw.to_string(),
        record.stack.to_string(),
        seminilpotent.map_or_else(|| "-".into(), |s| s.to_string()),
    ]);
    Ok(ok(to_json(&record), t, Vec::new()))
}

fn run_dt(job: &JobSpec, cache: Option<&Cache>) -> Result<Outcome, CliError> {
    let cfg = job.config()?;
    let q = &cfg.quiver;
    let mut charges = job.charges(&cfg)?;
    if charges.is_empty() {
        charges.push(CentralCharge::standard(q.num_vertices()));
    }
    let counter = |q: &Quiver, g: &DimVector, p: u64| fiber_count(cache, q, g, p);
    let total = total_series_with(q, job.bound()?, &job.primes, &counter)?;
    let omega = extract_dt(&total.series)?;
    let factorizations = charges
        .iter()
        .map(|z| Ok(json!({ "charge": z, "rays": hn_factorize(&total.series, z)? })))
        .collect::<Result<Vec<_>, Error>>()?;
    let stability = match charges.as_slice() {
        [z1, z2] => Some(stability_invariance_check(&total.series, z1, z2)?),
        _ => None,
    };
    let mut t = Table::new(&["gamma", "coefficient", "source", "omega"]);
    for e in &omega {
        let source = &total.sources[&e.gamma];
        let method = to_json(source)["method"]
            .as_str()
            .unwrap_or_default()
            .to_string();
        t.push(vec![
            gamma_str(&e.gamma),
            total.series.coeff(&e.gamma).unwrap().to_string(),
            method,
            e.omega.to_string(),
        ]);
    }
    let mut summary = Vec::new();
    let mut exit_code = EXIT_OK;
    if let Some(s) = &stability {
        summary.push(format!(
            "stability invariance: {}",
            if s.passed { "pass" } else { "FAIL" }
        ));
        if !s.passed {
            exit_code = EXIT_VERIFICATION;
        }
    }
    let json = json!({
        "quiver_hash": q.canonical_hash(),
        "bound": job.bound()?,
        "total": total.series,
        "sources": total.sources.iter().collect::<Vec<_>>(),
        "omega": omega,
        "factorizations": factorizations,
        "stability": stability,
    });
    Ok(Outcome {
        exit_code,
        report: Report {
            json,
            table: t,
            summary,
        },
    })
}

fn run_verify(job: &JobSpec, cache: Option<&Cache>) -> Result<Outcome, CliError> {
    let cfg = job.config()?;
    let q = &cfg.quiver;
    let charges = job.charges(&cfg)?;
    let counter = |q: &Quiver, g: &DimVector, p: u64| fiber_count(cache, q, g, p);
    let report = verify_kac_conjecture_with(q, job.bound()?, &job.primes, &counter)?;
    let stability = match charges.as_slice() {
        [z1, z2] => Some(stability_invariance_check(&report.total, z1, z2)?),
        [_] => {
            return Err(CliError::Config("verify takes zero or two charges".into()));
        }
        _ => None,
    };
    let mut t = Table::new(&["gamma", "omega", "expected", "residual"]);
    for (e, ((g, want), (_, res))) in report
        .omega
        .iter()
        .zip(report.expected_omega.iter().zip(&report.residuals))
    {
        debug_assert_eq!(&e.gamma, g);
        t.push(vec![
            gamma_str(g),
            e.omega.to_string(),
            want.to_string(),
            res.to_string(),
        ]);
    }
    let passed = report.passed && stability.as_ref().is_none_or(|s| s.passed);
    let mut summary = vec![format!(
        "kac conjecture: {}",
        if report.passed { "pass" } else { "FAIL" }
    )];
    if let Some(s) = &stability {
        summary.push(format!(
            "stability invariance: {}",
            if s.passed { "pass" } else { "FAIL" }
        ));
    }
    let json = json!({ "kac": report, "stability": stability, "passed": passed });
    Ok(Outcome {
        exit_code: if passed { EXIT_OK } else { EXIT_VERIFICATION },
        report: Report {
            json,
            table: t,
            summary,
        },
    })
}

#[derive(Serialize)]
struct QdimRow {
    gamma: DimVector,
    dim: u64,
    dim_perturbed: u64,
    oracles: Vec<(OracleTag, u64)>,
    agree: bool,
}

fn run_qdim(job: &JobSpec) -> Result<Outcome, CliError> {
    let cfg = job.config()?;
    let q = &cfg.quiver;
    let mut rows = Vec::new();
    for g in q.dims_up_to(job.bound()?) {
        let dim = u_plus_dim(q, &g, &FormParams::default())?;
        let dim_perturbed = u_plus_dim(q, &g, &FormParams::perturbed())?;
        let mut oracles = vec![(OracleTag::UPlus, dim)];
        if let Some(c) = closed_form_count(q, &g) {
            oracles.push((OracleTag::ClosedForm, c));
        }
        if q.is_loop_free() {
            oracles.push((OracleTag::KmWeight, km_weight_dim(q, &g)?));
        }
        if let Some(c) = seminilpotent_leading(q, &g)? {
            oracles.push((OracleTag::Seminilpotent, c));
        }
        let agree = dim == dim_perturbed && oracles.iter().all(|&(_, c)| c == dim);
        rows.push(QdimRow {
            gamma: g,
            dim,
            dim_perturbed,
            oracles,
            agree,
        });
    }
    let mut t = Table::new(&["gamma", "dim", "oracles"]);
    for r in &rows {
        let tags: Vec<String> = r
            .oracles
            .iter()
            .map(|(tag, c)| format!("{}={c}", to_json(tag).as_str().unwrap_or_default()))
            .collect();
        t.push(vec![gamma_str(&r.gamma), r.dim.to_string(), tags.join(" ")]);
    }
    let passed = rows.iter().all(|r| r.agree);
    let summary = vec![format!(
        "oracle concordance: {}",
        if passed { "pass" } else { "FAIL" }
    )];
    let json = json!({ "quiver_hash": q.canonical_hash(), "rows": rows, "passed": passed });
    Ok(Outcome {
        exit_code: if passed { EXIT_OK } else { EXIT_VERIFICATION },
        report: Report {
            json,
            table: t,
            summary,
        },
    })
}

fn run_twist_check(job: &JobSpec) -> Result<Outcome, CliError> {
    let rank = match &job.quiver {
        Some(_) => job.config()?.quiver.num_vertices(),
        None => 2,
    };
    let bound = job.bound.unwrap_or(4);
    let vectors = box_vectors(rank, bound as i64);
    let mut failures = Vec::new();
    for a in &vectors {
        for b in &vectors {
            let dot: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            if ks_twist(a) * ks_twist(b) * FourthRoot::sign(dot) != ks_twist(&sum) {
                failures.push((a.clone(), b.clone()));
            }
        }
    }
    let pairs = vectors.len() * vectors.len();
    let passed = failures.is_empty();
    let mut t = Table::new(&["rank", "bound", "pairs", "failures"]);
    t.push(vec![
        rank.to_string(),
        bound.to_string(),
        pairs.to_string(),
        failures.len().to_string(),
    ]);
    let json = json!({ "rank": rank, "bound": bound, "pairs": pairs, "failures": failures, "passed": passed });
    Ok(Outcome {
        exit_code: if passed { EXIT_OK } else { EXIT_VERIFICATION },
        report: Report {
            json,
            table: t,
            summary: Vec::new(),
        },
    })
}

/// All of `[0, bound]^rank`.
fn box_vectors(rank: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=bound).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}
