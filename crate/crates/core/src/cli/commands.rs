//! Subcommand bodies.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::base::{BaseGroup, FreeGroup};
use crate::error::{Error, Result};
use crate::lamp::LampGroup;
use crate::lemma::{check_random_instance, LemmaCheck};
use crate::stats::{
    clt_report, defect_moment_table, estimate_drift, estimate_sigma, least_squares, median,
    power_law_fit, write_growth_csv, MomentAccumulator,
};
use crate::tsp::{self, SolverPolicy, TspInstance, DEFAULT_DP_CAP};
use crate::walk::{batch, BatchOutput, BatchSpec, JobKind, TrackingRecord};
use crate::wreath::Wreath;

use super::config::*;

pub const TOOL: &str = concat!("lampwalk-", env!("CARGO_PKG_VERSION"));

/// Seed offset of the independent calibration batch of `clt-test`.
pub const CALIBRATION_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Where and how results are written.
pub struct Context<'a> {
    pub command: &'static str,
    pub hash: String,
    pub seed: Option<u64>,
    pub threads: usize,
    pub stdout: &'a mut dyn Write,
}

/// A command result in every format it supports.
pub struct Report {
    pub text: String,
    pub csv: Option<Vec<u8>>,
    pub json: Value,
    pub default: OutputFormat,
    /// False turns into exit status 1.
    pub success: bool,
}

impl Context<'_> {
    pub fn meta_line(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("# tool={TOOL} config_hash={} seed={seed}\n", self.hash)
    }

    fn meta_json(&self) -> Value {
        json!({
            "tool": TOOL,
            "command": self.command,
            "config_hash": self.hash,
            "seed": self.seed,
        })
    }

    fn write_file(&self, path: &Path, bytes: &[u8]) -> Result<()> {
        std::fs::write(path, bytes)?;
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut meta = self.meta_json();
        meta["threads"] = json!(self.threads);
        meta["created_unix"] = json!(created);
        let mut side = path.as_os_str().to_owned();
        side.push(".meta.json");
        std::fs::write(PathBuf::from(side), serde_json::to_string_pretty(&meta)? + "\n")?;
        Ok(())
    }

    /// Meta comment line, then the CSV body; to `path` or stdout.
    pub fn emit_csv(&mut self, path: Option<&Path>, body: &[u8]) -> Result<()> {
        let mut bytes = self.meta_line().into_bytes();
        bytes.extend_from_slice(body);
        match path {
            Some(p) => self.write_file(p, &bytes),
            None => Ok(self.stdout.write_all(&bytes)?),
        }
    }

    fn emit(&mut self, report: &Report, format: OutputFormat, path: Option<&Path>) -> Result<()> {
        let format = match format {
            OutputFormat::Default => report.default,
            f => f,
        };
        match format {
            OutputFormat::Csv => {
                let body = report
                    .csv
                    .as_ref()
                    .ok_or_else(|| Error::config("format", format!("{} has no CSV output", self.command)))?;
                self.emit_csv(path, body)
            }
            OutputFormat::Json => {
                let doc = json!({ "meta": self.meta_json(), "result": report.json });
                let bytes = (serde_json::to_string_pretty(&doc)? + "\n").into_bytes();
                match path {
                    Some(p) => self.write_file(p, &bytes),
                    None => Ok(self.stdout.write_all(&bytes)?),
                }
            }
            OutputFormat::Text | OutputFormat::Default => match path {
                Some(p) => {
                    let mut bytes = self.meta_line().into_bytes();
                    bytes.extend_from_slice(report.text.as_bytes());
                    self.write_file(p, &bytes)
                }
                None => Ok(self.stdout.write_all(report.text.as_bytes())?),
            },
        }
    }

    pub fn finish(&mut self, report: Report, format: OutputFormat, path: Option<&Path>) -> Result<i32> {
        self.emit(&report, format, path)?;
        Ok(if report.success { 0 } else { 1 })
    }
}

fn keyed<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { .. } => e,
        e if e.is_resource_guard() => e,
        e => Error::config(key, e.to_string()),
    })
}

fn csv_bytes(out: &BatchOutput) -> Vec<u8> {
    let mut buf = Vec::new();
    out.write_csv(&mut buf).expect("writing to memory");
    buf
}

struct LengthTask<'c>(&'c LengthConfig);

impl GroupTask for LengthTask<'_> {
    type Output = Report;
    fn run<L: LampGroup, B: BaseGroup>(self, wreath: Wreath<L, B>) -> Result<Report> {
        let cap = self.0.dp_cap.unwrap_or(DEFAULT_DP_CAP);
        let wreath = wreath.with_policy(SolverPolicy::Exact { cap });
        let g = keyed("element", wreath.parse_element(&self.0.element))?;
        let detail = wreath.word_length_detail(&g)?;
        let total = detail.total();
        Ok(Report {
            text: format!("{total}\n"),
            csv: Some(format!("element_length,tsp,lamp_cost\n{total},{},{}\n", detail.tsp.value, detail.lamp_cost).into_bytes()),
            json: json!({
                "element": wreath.format_element(&g),
                "word_length": total,
                "tsp": detail.tsp.value,
                "lamp_cost": detail.lamp_cost,
                "order": detail.tsp.order.iter().map(|x| wreath.base().format(x)).collect::<Vec<_>>(),
            }),
            default: OutputFormat::Text,
            success: true,
        })
    }
}

pub fn length(cfg: &LengthConfig, _ctx: &mut Context) -> Result<Report> {
    cfg.group.dispatch(LengthTask(cfg))
}

struct TspTask<'c>(&'c TspConfig);

impl GroupTask for TspTask<'_> {
    type Output = Report;
    fn run<L: LampGroup, B: BaseGroup>(self, wreath: Wreath<L, B>) -> Result<Report> {
        let cfg = self.0;
        let h = wreath.base();
        let start = keyed("start", h.parse(&cfg.start))?;
        let end = keyed("end", h.parse(&cfg.end))?;
        let points: Vec<B::Elem> = keyed("points", cfg.points.iter().map(|p| h.parse(p)).collect())?;
        let inst = TspInstance::new(start, points, end);
        let sol = match cfg.solver {
            SolverChoice::Auto => tsp::solve(h, &inst, SolverPolicy::Exact { cap: cfg.dp_cap }),
            SolverChoice::Tree => keyed("solver", tsp::solve_tree(h, &inst)),
            SolverChoice::Dp => tsp::solve_dp(h, &inst, cfg.dp_cap),
            SolverChoice::Brute => tsp::brute_force(h, &inst),
            SolverChoice::Heuristic => Ok(tsp::solve_heuristic(h, &inst)),
        }?;
        let order: Vec<String> = sol.order.iter().map(|x| h.format(x)).collect();
        Ok(Report {
            text: format!("{}\n", sol.value),
            csv: None,
            json: json!({ "value": sol.value, "order": order, "exact": sol.exact }),
            default: OutputFormat::Text,
            success: true,
        })
    }
}

pub fn tsp(cfg: &TspConfig, _ctx: &mut Context) -> Result<Report> {
    cfg.group.dispatch(TspTask(cfg))
}

struct BfsTask<'c>(&'c BfsConfig);

impl GroupTask for BfsTask<'_> {
    type Output = Report;
    fn run<L: LampGroup, B: BaseGroup>(self, wreath: Wreath<L, B>) -> Result<Report> {
        let ball = wreath.bfs_oracle_with_limit(self.0.radius, self.0.limit)?;
        let entries: Vec<_> = ball.into_iter().collect();
        let checked: Vec<(u64, bool)> = entries
            .par_iter()
            .map(|(g, r)| Ok((*r, wreath.word_length(g)? == *r)))
            .collect::<Result<_>>()?;
        let mut spheres: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
        for (r, ok) in checked {
            let e = spheres.entry(r).or_default();
            e.0 += 1;
            e.1 += ok as u64;
        }
        let total: u64 = spheres.values().map(|v| v.0).sum();
        let agree: u64 = spheres.values().map(|v| v.1).sum();
        let mut csv = b"radius,count,agree\n".to_vec();
        let mut text = String::new();
        for (r, (c, a)) in &spheres {
            csv.extend(format!("{r},{c},{a}\n").bytes());
            text += &format!("radius {r:<4}{c:>10} elements{a:>10} agree\n");
        }
        text += &format!("total     {total:>10} elements{agree:>10} agree\n");
        Ok(Report {
            text,
            csv: Some(csv),
            json: json!({
                "radius": self.0.radius,
                "elements": total,
                "agree": agree,
                "spheres": spheres.iter().map(|(r, (c, a))| json!({"radius": r, "count": c, "agree": a})).collect::<Vec<_>>(),
            }),
            default: OutputFormat::Csv,
            success: agree == total,
        })
    }
}

pub fn bfs_oracle(cfg: &BfsConfig, ctx: &mut Context) -> Result<Report> {
    in_pool(ctx.threads, || cfg.group.dispatch(BfsTask(cfg)))
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?
        .install(f)
}

fn summarize(out: &BatchOutput) -> Result<Value> {
    let acc2 = || MomentAccumulator::new(2);
    Ok(match out {
        BatchOutput::Cocycle(rs) => {
            let mut by: BTreeMap<u64, (MomentAccumulator, MomentAccumulator)> = BTreeMap::new();
            for r in rs {
                let e = by.entry(r.n).or_insert_with(|| (acc2(), acc2()));
                e.0.push(r.q as i64)?;
                e.1.push(r.base_depth as i64)?;
            }
            json!(by
                .iter()
                .map(|(n, (q, b))| json!({
                    "n": n, "samples": q.count(), "mean_q": q.mean(), "var_q": q.variance(),
                    "mean_base_depth": b.mean(),
                }))
                .collect::<Vec<_>>())
        }
        BatchOutput::Defect(rs) => {
            let mut by: BTreeMap<(u64, u64), (MomentAccumulator, i64)> = BTreeMap::new();
            for r in rs {
                let e = by.entry((r.m, r.n)).or_insert_with(|| (acc2(), 0));
                e.0.push(r.psi)?;
                e.1 = e.1.max(r.psi);
            }
            json!(by
                .iter()
                .map(|((m, n), (a, mx))| json!({
                    "m": m, "n": n, "samples": a.count(), "mean_psi": a.mean(),
                    "second_moment": a.raw_moment(2), "max_psi": mx,
                }))
                .collect::<Vec<_>>())
        }
        BatchOutput::Tracking(rs) => json!(tracking_rows(rs, 10)),
    })
}

pub fn simulate(cfg: &SimulateConfig, ctx: &mut Context) -> Result<Report> {
    let spec = BatchSpec {
        kind: match cfg.kind {
            SimulateKind::Cocycle => JobKind::Cocycle {
                horizons: cfg.horizons.clone(),
            },
            SimulateKind::Defect => JobKind::Defect {
                pairs: cfg.pairs.clone(),
            },
            SimulateKind::Tracking => JobKind::Tracking {
                horizons: cfg.horizons.clone(),
                progress: cfg.progress,
            },
        },
        samples: cfg.samples,
        seed: cfg.seed,
    };
    let threads = ctx.threads;
    let out = cfg.group.dispatch(BatchTask {
        measure: &cfg.measure,
        spec: &spec,
        threads,
    })?;
    Ok(Report {
        text: String::from_utf8(csv_bytes(&out)).expect("ascii"),
        csv: Some(csv_bytes(&out)),
        json: json!({ "kind": cfg.kind, "samples": cfg.samples, "summary": summarize(&out)? }),
        default: OutputFormat::Csv,
        success: true,
    })
}

struct BatchTask<'c> {
    measure: &'c MeasureSpec,
    spec: &'c BatchSpec,
    threads: usize,
}

impl GroupTask for BatchTask<'_> {
    type Output = BatchOutput;
    fn run<L: LampGroup, B: BaseGroup>(self, wreath: Wreath<L, B>) -> Result<BatchOutput> {
        let mu = self.measure.build(&wreath)?;
        batch(&wreath, &mu, self.spec, self.threads)
    }
}

/// `E|Ψ_{n,n}|^p / n` strictly decreasing along the grid.
fn normalized_decreasing(points: &[crate::stats::GrowthPoint]) -> bool {
    points
        .windows(2)
        .all(|w| w[1].moment / (w[1].n as f64) < w[0].moment / (w[0].n as f64))
}

pub fn defect_table(cfg: &DefectTableConfig, ctx: &mut Context) -> Result<Report> {
    let spec = BatchSpec {
        kind: JobKind::Defect {
            pairs: cfg.ns.iter().map(|&n| (n, n)).collect(),
        },
        samples: cfg.samples,
        seed: cfg.seed,
    };
    let out = cfg.group.dispatch(BatchTask {
        measure: &cfg.measure,
        spec: &spec,
        threads: ctx.threads,
    })?;
    let BatchOutput::Defect(records) = &out else {
        unreachable!("defect job")
    };
    if let Some(p) = &cfg.records_output {
        ctx.emit_csv(Some(p), &csv_bytes(&out))?;
    }
    let fits = defect_moment_table(records.iter().map(|r| (r.m, r.n, r.psi)), &cfg.powers)?;
    let mut csv = Vec::new();
    write_growth_csv(&fits, &mut csv)?;
    let json_fits: Vec<Value> = fits
        .iter()
        .map(|f| {
            json!({
                "p": f.p,
                "exponent": f.exponent,
                "coefficient": f.coefficient,
                "normalized_decreasing": normalized_decreasing(&f.points),
                "points": f.points,
            })
        })
        .collect();
    Ok(Report {
        text: String::from_utf8(csv.clone()).expect("ascii"),
        csv: Some(csv),
        json: json!({ "samples": cfg.samples, "fits": json_fits }),
        default: OutputFormat::Csv,
        success: true,
    })
}

pub fn clt_test(cfg: &CltConfig, ctx: &mut Context) -> Result<Report> {
    let n = cfg.n;
    let calib = BatchSpec {
        kind: JobKind::Cocycle {
            horizons: vec![n / 2, n],
        },
        samples: cfg.calibration_samples,
        seed: cfg.seed ^ CALIBRATION_SALT,
    };
    let main = BatchSpec {
        kind: JobKind::Cocycle { horizons: vec![n] },
        samples: cfg.samples,
        seed: cfg.seed,
    };
    let task = |spec| BatchTask {
        measure: &cfg.measure,
        spec,
        threads: ctx.threads,
    };
    let BatchOutput::Cocycle(cal) = cfg.group.dispatch(task(&calib))? else {
        unreachable!("cocycle job")
    };
    let main_out = cfg.group.dispatch(task(&main))?;
    if let Some(p) = &cfg.samples_output {
        ctx.emit_csv(Some(p), &csv_bytes(&main_out))?;
    }
    let BatchOutput::Cocycle(main_rs) = main_out else {
        unreachable!("cocycle job")
    };
    let group_q = |h: u64| -> Vec<u64> { cal.iter().filter(|r| r.n == h).map(|r| r.q).collect() };
    let drift = keyed("calibration_samples", estimate_drift(&[(n / 2, group_q(n / 2)), (n, group_q(n))]))?;
    let sigma = keyed("calibration_samples", estimate_sigma(&group_q(n), n))?;
    let qs: Vec<u64> = main_rs.iter().map(|r| r.q).collect();
    let report = keyed("samples", clt_report(&qs, n, drift.ell, sigma))?;
    let rejected = report.rejects(cfg.alpha);
    let mut text = report.to_string();
    text += &format!("{:<18}{}\n", "ks_rejected", rejected);
    Ok(Report {
        text,
        csv: None,
        json: json!({
            "alpha": cfg.alpha,
            "ks_rejected": rejected,
            "drift": drift,
            "report": report,
            "calibration_samples": cfg.calibration_samples,
        }),
        default: OutputFormat::Json,
        success: true,
    })
}

/// Per-horizon summary of tracking records.
pub fn tracking_rows(records: &[TrackingRecord], slow_divisor: u64) -> Vec<Value> {
    let mut by: BTreeMap<u64, Vec<&TrackingRecord>> = BTreeMap::new();
    for r in records {
        by.entry(r.n).or_default().push(r);
    }
    by.iter()
        .map(|(n, rs)| {
            let dev: Vec<u64> = rs.iter().map(|r| r.max_deviation).collect();
            let depth: Vec<u64> = rs.iter().map(|r| r.endpoint_depth).collect();
            let slow = rs
                .iter()
                .filter(|r| r.endpoint_depth * slow_divisor <= *n)
                .count();
            json!({
                "n": n,
                "samples": rs.len(),
                "median_max_deviation": median(&dev),
                "mean_max_deviation": dev.iter().sum::<u64>() as f64 / dev.len() as f64,
                "median_endpoint_depth": median(&depth),
                "slow_fraction": slow as f64 / rs.len() as f64,
                "violations": rs.iter().map(|r| r.violations).sum::<u64>(),
                "pairs": rs.iter().map(|r| r.pairs).sum::<u64>(),
            })
        })
        .collect()
}

pub fn tracking(cfg: &TrackingConfig, ctx: &mut Context) -> Result<Report> {
    let spec = BatchSpec {
        kind: JobKind::Tracking {
            horizons: cfg.horizons.clone(),
            progress: cfg.progress,
        },
        samples: cfg.samples,
        seed: cfg.seed,
    };
    let out = cfg.group.dispatch(BatchTask {
        measure: &cfg.measure,
        spec: &spec,
        threads: ctx.threads,
    })?;
    if let Some(p) = &cfg.records_output {
        ctx.emit_csv(Some(p), &csv_bytes(&out))?;
    }
    let BatchOutput::Tracking(records) = &out else {
        unreachable!("tracking job")
    };
    let rows = tracking_rows(records, cfg.slow_divisor);
    let ns: Vec<f64> = rows.iter().map(|r| r["n"].as_f64().unwrap_or(0.0)).collect();
    let med: Vec<f64> = rows
        .iter()
        .map(|r| r["median_max_deviation"].as_f64().unwrap_or(0.0))
        .collect();
    let exponent = power_law_fit(&ns, &med).map(|f| f.slope);
    let log_ns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let log_slope = least_squares(&log_ns, &med).map(|f| f.slope);
    let mut csv = b"n,samples,median_max_deviation,mean_max_deviation,median_endpoint_depth,slow_fraction,violations,pairs\n".to_vec();
    for r in &rows {
        csv.extend(
            format!(
                "{},{},{},{:.6},{},{:.6},{},{}\n",
                r["n"], r["samples"], r["median_max_deviation"], r["mean_max_deviation"].as_f64().unwrap_or(0.0),
                r["median_endpoint_depth"], r["slow_fraction"].as_f64().unwrap_or(0.0), r["violations"], r["pairs"]
            )
            .bytes(),
        );
    }
    Ok(Report {
        text: String::from_utf8(csv.clone()).expect("ascii"),
        csv: Some(csv),
        json: json!({
            "samples": cfg.samples,
            "rows": rows,
            "deviation_exponent": exponent,
            "deviation_slope_vs_log_n": log_slope,
        }),
        default: OutputFormat::Csv,
        success: true,
    })
}

pub fn verify_lemma(cfg: &VerifyLemmaConfig, ctx: &mut Context) -> Result<Report> {
    let group = FreeGroup::new(cfg.rank).map_err(|e| Error::config("rank", e.to_string()))?;
    let params = cfg.params();
    let rows: Vec<LemmaCheck> = in_pool(ctx.threads, || {
        (0..cfg.count)
            .into_par_iter()
            .map(|i| check_random_instance(&group, &params, cfg.seed.wrapping_add(i)))
            .collect()
    })?;
    let mut csv = b"seed,R,D,N,t1,t2,t3,defect,bound,verdict,alpha,beta,beta_ok\n".to_vec();
    for r in &rows {
        csv.extend(
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.seed, r.r, r.d, r.n, r.t1, r.t2, r.t3, r.defect, r.bound, r.verdict, r.alpha, r.beta, r.beta_ok
            )
            .bytes(),
        );
    }
    let passed = rows.iter().filter(|r| r.verdict && r.beta_ok).count();
    Ok(Report {
        text: format!("{passed}/{} instances pass\n", rows.len()),
        csv: Some(csv),
        json: json!({ "count": rows.len(), "passed": passed, "max_defect": rows.iter().map(|r| r.defect).max() }),
        default: OutputFormat::Csv,
        success: passed == rows.len(),
    })
}
