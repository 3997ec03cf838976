//! Command implementations shared by the binary and the integration tests.

use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use surfdist_core::oracle::{
    brute_force_min, kkt_check, least_squares_multipliers, sample_surface_y, sample_surface_z,
};
use surfdist_core::solver::{perturb_and_solve, solve_global_with_cache, verify_lemma1};
use surfdist_core::{
    dual::duality_gap, CertificateStatus, SeparationStatus, SolverConfig, SpectralCache,
};

use crate::instance::load_instance;
use crate::record::{fmt_f64, fmt_short, ResultRecord};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NOT_CERTIFIED: u8 = 2;
pub const EXIT_NONE_FOUND: u8 = 3;
pub const EXIT_CHECK_FAILED: u8 = 4;

/// The oracle's pair scan is `O(m^(2(n−1)))`; past n = 4 it stops being a
/// desk-scale check.
const ORACLE_MAX_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
    Csv,
}

/// Solver settings plus the oracle knobs, as overridable from the command
/// line via `--config key=value`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub solver: SolverConfig,
    /// Oracle directions-per-dimension.
    pub m: usize,
    /// Whether the oracle polishes its best pairs.
    pub polish: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { solver: SolverConfig::default(), m: 64, polish: true }
    }
}

/// Applies `key=value` overrides; unknown keys are input errors.
pub fn parse_overrides(pairs: &[String]) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("config override \"{pair}\" is not of the form key=value"))?;
        let bad = |e: &dyn std::fmt::Display| format!("config key \"{key}\": {e}");
        match key {
            "grad_tol" => cfg.solver.grad_tol = value.parse().map_err(|e| bad(&e))?,
            "max_iter" => cfg.solver.max_iter = value.parse().map_err(|e| bad(&e))?,
            "damping_shrink" => cfg.solver.damping_shrink = value.parse().map_err(|e| bad(&e))?,
            "min_step" => cfg.solver.min_step = value.parse().map_err(|e| bad(&e))?,
            "dedup_tol" => cfg.solver.dedup_tol = value.parse().map_err(|e| bad(&e))?,
            "m" => cfg.m = value.parse().map_err(|e| bad(&e))?,
            "polish" => cfg.polish = value.parse().map_err(|e| bad(&e))?,
            _ => return Err(format!("unknown config key \"{key}\"")),
        }
    }
    Ok(cfg)
}

/// Where command output goes.
pub struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Self {
        Self { out }
    }

    fn write(&self, content: &str) -> Result<(), String> {
        match &self.out {
            Some(path) => std::fs::write(path, content)
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => {
                print!("{content}");
                std::io::stdout().flush().map_err(|e| e.to_string())
            }
        }
    }
}

fn input_error(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}

fn status_exit(status: CertificateStatus) -> u8 {
    match status {
        CertificateStatus::GlobalUnique => EXIT_OK,
        CertificateStatus::StationaryNotCertified => EXIT_NOT_CERTIFIED,
        CertificateStatus::NoneFound => EXIT_NONE_FOUND,
    }
}

fn emit_record(record: &ResultRecord, format: Format, sink: &Sink) -> Result<(), String> {
    match format {
        Format::Json => sink.write(&record.to_json()),
        Format::Text => sink.write(&record.to_text()),
        Format::Csv => Err("csv output is only available for the sample command".into()),
    }
}

pub fn cmd_solve(instance: &Path, cfg: &RunConfig, format: Format, sink: &Sink) -> u8 {
    let inst = match load_instance(instance) {
        Ok(inst) => inst,
        Err(e) => return input_error(&e),
    };
    let cache = match SpectralCache::new(&inst) {
        Ok(c) => c,
        Err(e) => return input_error(&e.to_string()),
    };
    let cert = match solve_global_with_cache(&inst, &cache, &cfg.solver) {
        Ok(cert) => cert,
        Err(e) => return input_error(&e.to_string()),
    };
    let record = ResultRecord::from_certificate(&cert);
    match emit_record(&record, format, sink) {
        Ok(()) => status_exit(cert.status),
        Err(e) => input_error(&e),
    }
}

pub fn cmd_perturb(
    instance: &Path,
    cfg: &RunConfig,
    direction: Option<&str>,
    schedule: Option<&str>,
    format: Format,
    sink: &Sink,
) -> u8 {
    let inst = match load_instance(instance) {
        Ok(inst) => inst,
        Err(e) => return input_error(&e),
    };
    let e_dir = match direction {
        Some(text) => match parse_floats(text) {
            Ok(v) => DVector::from_vec(v),
            Err(e) => return input_error(&format!("--direction: {e}")),
        },
        None => {
            // Default: unit vector along the last coordinate.
            let mut v = DVector::zeros(inst.n());
            v[inst.n() - 1] = 1.0;
            v
        }
    };
    let schedule = match schedule {
        Some(text) => match parse_floats(text) {
            Ok(v) => v,
            Err(e) => return input_error(&format!("--schedule: {e}")),
        },
        None => vec![64.0, 1000.0, 10_000.0, 100_000.0],
    };
    let cert = match perturb_and_solve(&inst, &e_dir, &schedule, &cfg.solver) {
        Ok(cert) => cert,
        Err(e) => return input_error(&e.to_string()),
    };
    let record = ResultRecord::from_certificate(&cert);
    match emit_record(&record, format, sink) {
        Ok(()) => status_exit(cert.status),
        Err(e) => input_error(&e),
    }
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

pub fn cmd_verify(instance: &Path, cfg: &RunConfig, format: Format, sink: &Sink) -> u8 {
    let inst = match load_instance(instance) {
        Ok(inst) => inst,
        Err(e) => return input_error(&e),
    };
    // Precondition gate: the theory assumes disjoint surfaces.
    let separation = inst.check_separation();
    if separation.status == SeparationStatus::Violated {
        return input_error("separation check failed: the surfaces appear to intersect");
    }
    let cache = match SpectralCache::new(&inst) {
        Ok(c) => c,
        Err(e) => return input_error(&e.to_string()),
    };
    let cert = match solve_global_with_cache(&inst, &cache, &cfg.solver) {
        Ok(cert) => cert,
        Err(e) => return input_error(&e.to_string()),
    };

    let mut checks: Vec<Check> = Vec::new();
    checks.push(Check {
        name: "stationary_point",
        pass: cert.witness.is_some(),
        detail: format!("status {}", crate::record::status_name(cert.status)),
    });

    if let Some(sp) = &cert.witness {
        match duality_gap(&inst, &cache, &sp.x, &sp.dp) {
            Ok(gap) => {
                let tol = 1e-6 * (1.0 + gap.pi.abs());
                checks.push(Check {
                    name: "complementary_dual_chain",
                    pass: !sp.diagnostics.in_sa || gap.max_gap <= tol,
                    detail: format!("max gap {}", fmt_short(gap.max_gap)),
                });
            }
            Err(e) => checks.push(Check {
                name: "complementary_dual_chain",
                pass: false,
                detail: e.to_string(),
            }),
        }

        let lemma = verify_lemma1(sp);
        checks.push(Check {
            name: "multiplier_feasibility_equivalence",
            pass: lemma.consistent,
            detail: format!(
                "mu_zero {}, lam_zero {}, infeasible {}",
                lemma.mu_zero, lemma.lam_zero, lemma.infeasible
            ),
        });

        if cert.status == CertificateStatus::GlobalUnique {
            let kkt = least_squares_multipliers(&inst, &sp.x)
                .and_then(|(lam, mu)| kkt_check(&inst, &sp.x, lam, mu, 1e-6));
            match kkt {
                Ok(report) => checks.push(Check {
                    name: "classical_kkt",
                    pass: report.passes(),
                    detail: format!(
                        "stationarity ({}, {}), residuals ({}, {})",
                        fmt_short(report.stationarity_y),
                        fmt_short(report.stationarity_z),
                        fmt_short(report.h_res),
                        fmt_short(report.g_res)
                    ),
                }),
                Err(e) => {
                    checks.push(Check { name: "classical_kkt", pass: false, detail: e.to_string() })
                }
            }

            if inst.n() <= ORACLE_MAX_N {
                match brute_force_min(&inst, &cache, cfg.m, cfg.polish, 0) {
                    Ok(oracle) => {
                        let no_better = oracle.pi_value >= sp.pi - 1e-6 * (1.0 + sp.pi.abs());
                        let y_close = (&oracle.best_y - &sp.x.y).norm() <= 1e-4 * (1.0 + sp.x.y.norm());
                        let z_close = (&oracle.best_z - &sp.x.z).norm() <= 1e-4 * (1.0 + sp.x.z.norm());
                        checks.push(Check {
                            name: "oracle_agreement",
                            pass: no_better && (!cfg.polish || (y_close && z_close)),
                            detail: format!(
                                "oracle pi {}, certified pi {}",
                                fmt_short(oracle.pi_value),
                                fmt_short(sp.pi)
                            ),
                        });
                    }
                    Err(e) => checks.push(Check {
                        name: "oracle_agreement",
                        pass: false,
                        detail: e.to_string(),
                    }),
                }
            }
        }
    }

    let all_pass = checks.iter().all(|c| c.pass);
    let report = match format {
        Format::Json => {
            let mut s = String::from("{\"checks\":[");
            for (i, c) in checks.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&format!(
                    "{{\"name\":{},\"pass\":{},\"detail\":{}}}",
                    serde_json::to_string(c.name).unwrap(),
                    c.pass,
                    serde_json::to_string(&c.detail).unwrap()
                ));
            }
            s.push_str(&format!("],\"all_pass\":{all_pass}}}\n"));
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in &checks {
                s.push_str(&format!(
                    "{}: {} ({})\n",
                    c.name,
                    if c.pass { "pass" } else { "FAIL" },
                    c.detail
                ));
            }
            s.push_str(if all_pass { "all checks passed\n" } else { "verification failed\n" });
            s
        }
        Format::Csv => return input_error("csv output is only available for the sample command"),
    };
    if let Err(e) = sink.write(&report) {
        return input_error(&e);
    }
    if all_pass {
        EXIT_OK
    } else {
        let failing = checks.iter().find(|c| !c.pass).expect("some check failed");
        eprintln!("error: check failed: {}", failing.name);
        EXIT_CHECK_FAILED
    }
}

pub fn cmd_oracle(instance: &Path, cfg: &RunConfig, seed: u64, format: Format, sink: &Sink) -> u8 {
    let inst = match load_instance(instance) {
        Ok(inst) => inst,
        Err(e) => return input_error(&e),
    };
    if inst.n() > ORACLE_MAX_N {
        return input_error(&format!(
            "oracle is limited to n <= {ORACLE_MAX_N} (pair scan cost grows as m^(2(n-1))); got n = {}",
            inst.n()
        ));
    }
    let cache = match SpectralCache::new(&inst) {
        Ok(c) => c,
        Err(e) => return input_error(&e.to_string()),
    };
    let res = match brute_force_min(&inst, &cache, cfg.m, cfg.polish, seed) {
        Ok(res) => res,
        Err(e) => return input_error(&e.to_string()),
    };
    let out = match format {
        Format::Json => {
            let minima: Vec<String> = res
                .local_minima
                .iter()
                .map(|m| {
                    format!(
                        "{{\"y\":{},\"z\":{},\"pi\":{}}}",
                        float_array(m.y.as_slice()),
                        float_array(m.z.as_slice()),
                        fmt_f64(m.pi)
                    )
                })
                .collect();
            format!(
                "{{\"distance\":{},\"pi\":{},\"best_y\":{},\"best_z\":{},\"resolution\":{},\"local_minima\":[{}]}}\n",
                fmt_f64(res.distance),
                fmt_f64(res.pi_value),
                float_array(res.best_y.as_slice()),
                float_array(res.best_z.as_slice()),
                res.resolution,
                minima.join(",")
            )
        }
        Format::Text => {
            let mut s = format!(
                "distance = {} (pi = {}), grid resolution {}\n",
                fmt_short(res.distance),
                fmt_short(res.pi_value),
                res.resolution
            );
            s.push_str(&format!("best y = [{}]\n", join_short(res.best_y.as_slice())));
            s.push_str(&format!("best z = [{}]\n", join_short(res.best_z.as_slice())));
            for (i, m) in res.local_minima.iter().enumerate() {
                s.push_str(&format!(
                    "basin {}: pi = {}, y = [{}], z = [{}]\n",
                    i,
                    fmt_short(m.pi),
                    join_short(m.y.as_slice()),
                    join_short(m.z.as_slice())
                ));
            }
            s
        }
        Format::Csv => return input_error("csv output is only available for the sample command"),
    };
    match sink.write(&out) {
        Ok(()) => EXIT_OK,
        Err(e) => input_error(&e),
    }
}

pub fn cmd_sample(instance: &Path, cfg: &RunConfig, seed: u64, format: Format, sink: &Sink) -> u8 {
    let inst = match load_instance(instance) {
        Ok(inst) => inst,
        Err(e) => return input_error(&e),
    };
    let cache = match SpectralCache::new(&inst) {
        Ok(c) => c,
        Err(e) => return input_error(&e.to_string()),
    };
    let ys = sample_surface_y(&inst, &cache, cfg.m, seed);
    let zs = sample_surface_z(&inst, cfg.m, seed.wrapping_add(1));
    let out = match format {
        Format::Csv => {
            let mut s = String::from("surface");
            for i in 1..=inst.n() {
                s.push_str(&format!(",x{i}"));
            }
            s.push_str(",residual\n");
            for y in &ys.points {
                push_csv_row(&mut s, "Y", y.as_slice(), inst.h_value(y).unwrap().abs());
            }
            for z in &zs.points {
                push_csv_row(&mut s, "Z", z.as_slice(), inst.g_value(z).unwrap().abs());
            }
            s
        }
        Format::Json => {
            let y_rows: Vec<String> = ys.points.iter().map(|p| float_array(p.as_slice())).collect();
            let z_rows: Vec<String> = zs.points.iter().map(|p| float_array(p.as_slice())).collect();
            format!(
                "{{\"y\":[{}],\"z\":[{}],\"residual_bound\":{}}}\n",
                y_rows.join(","),
                z_rows.join(","),
                fmt_f64(ys.residual_bound.max(zs.residual_bound))
            )
        }
        Format::Text => {
            return input_error("sample emits csv or json; use --format csv or --format json")
        }
    };
    match sink.write(&out) {
        Ok(()) => EXIT_OK,
        Err(e) => input_error(&e),
    }
}

fn push_csv_row(s: &mut String, surface: &str, coords: &[f64], residual: f64) {
    s.push_str(surface);
    for &x in coords {
        s.push(',');
        s.push_str(&fmt_f64(x));
    }
    s.push(',');
    s.push_str(&fmt_f64(residual));
    s.push('\n');
}

fn parse_floats(text: &str) -> Result<Vec<f64>, String> {
    if text.trim().is_empty() {
        return Err("expected a comma-separated list of numbers".into());
    }
    text.split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|e| format!("\"{tok}\": {e}")))
        .collect()
}

fn float_array(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| fmt_f64(x)).collect();
    format!("[{}]", items.join(","))
}

fn join_short(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| fmt_short(x)).collect();
    items.join(", ")
}
