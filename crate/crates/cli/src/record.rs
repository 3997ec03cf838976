//! Machine-readable result records.
//!
//! Records are emitted through a hand-rolled writer rather than a generic
//! serializer so that key order is canonical and every float carries 17
//! significant digits: parsing an emitted record and re-emitting it yields
//! byte-identical output.

use serde::Deserialize;
use surfdist_core::solver::TraceEntry;
use surfdist_core::{Certificate, CertificateStatus, StationaryPoint};

/// Formats a float with 17 significant digits, enough to reproduce the exact
/// `f64` on re-parse.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Formats a float with 7 significant digits for human summaries.
pub fn fmt_short(x: f64) -> String {
    format!("{x:.6e}")
}

pub fn status_name(status: CertificateStatus) -> &'static str {
    match status {
        CertificateStatus::GlobalUnique => "global_unique",
        CertificateStatus::StationaryNotCertified => "stationary_not_certified",
        CertificateStatus::NoneFound => "none_found",
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualTriple {
    pub lambda: f64,
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XBar {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    pub d: Vec<f64>,
    pub in_sa: bool,
    pub in_sa_plus: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Residuals {
    pub h: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRow {
    pub k: f64,
    pub f: Vec<f64>,
    pub status: String,
    pub dual_point: Option<DualTriple>,
    pub x_bar: Option<XBar>,
}

/// The result record: one solved certificate, optionally with the trace of a
/// perturbation schedule.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub status: String,
    pub dual_point: Option<DualTriple>,
    pub x_bar: Option<XBar>,
    pub pi: Option<f64>,
    pub pi_d: Option<f64>,
    pub grad_norm: Option<f64>,
    pub diagnostics: Option<Diagnostics>,
    pub residuals: Option<Residuals>,
    #[serde(default)]
    pub perturbation_trace: Option<Vec<TraceRow>>,
}

impl ResultRecord {
    pub fn from_certificate(cert: &Certificate) -> Self {
        let w = cert.witness.as_ref();
        Self {
            status: status_name(cert.status).to_string(),
            dual_point: w.map(dual_of),
            x_bar: w.map(x_bar_of),
            pi: w.map(|sp| sp.pi),
            pi_d: w.map(|sp| sp.pi_d),
            grad_norm: w.map(|sp| sp.grad_norm),
            diagnostics: w.map(|sp| Diagnostics {
                d: sp.diagnostics.d.clone(),
                in_sa: sp.diagnostics.in_sa,
                in_sa_plus: sp.diagnostics.in_sa_plus,
            }),
            residuals: w.map(|sp| Residuals { h: sp.h_res, g: sp.g_res }),
            perturbation_trace: cert
                .perturbation_trace
                .as_ref()
                .map(|trace| trace.iter().map(trace_row_of).collect()),
        }
    }

    /// Canonical JSON emission (fixed key order, 17-significant-digit floats,
    /// trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = String::from("{");
        push_kv(&mut s, "status", json_string(&self.status));
        push_kv(&mut s, "dual_point", opt(&self.dual_point, dual_json));
        push_kv(&mut s, "x_bar", opt(&self.x_bar, x_bar_json));
        push_kv(&mut s, "pi", opt(&self.pi, |x| fmt_f64(*x)));
        push_kv(&mut s, "pi_d", opt(&self.pi_d, |x| fmt_f64(*x)));
        push_kv(&mut s, "grad_norm", opt(&self.grad_norm, |x| fmt_f64(*x)));
        push_kv(&mut s, "diagnostics", opt(&self.diagnostics, diag_json));
        push_kv(&mut s, "residuals", opt(&self.residuals, residuals_json));
        if let Some(trace) = &self.perturbation_trace {
            let rows: Vec<String> = trace.iter().map(trace_row_json).collect();
            push_kv(&mut s, "perturbation_trace", format!("[{}]", rows.join(",")));
        }
        s.push('}');
        s.push('\n');
        s
    }

    /// Human summary (7-significant-digit floats).
    pub fn to_text(&self) -> String {
        let mut out = format!("status: {}\n", self.status);
        if let Some(dp) = &self.dual_point {
            out.push_str(&format!(
                "dual point: lambda = {}, mu = {}, sigma = {}\n",
                fmt_short(dp.lambda),
                fmt_short(dp.mu),
                fmt_short(dp.sigma)
            ));
        }
        if let Some(x) = &self.x_bar {
            out.push_str(&format!("y = [{}]\n", join_short(&x.y)));
            out.push_str(&format!("z = [{}]\n", join_short(&x.z)));
        }
        if let (Some(pi), Some(pi_d)) = (self.pi, self.pi_d) {
            out.push_str(&format!("pi = {}, pi_d = {}\n", fmt_short(pi), fmt_short(pi_d)));
        }
        if let Some(g) = self.grad_norm {
            out.push_str(&format!("gradient norm = {}\n", fmt_short(g)));
        }
        if let Some(res) = &self.residuals {
            out.push_str(&format!(
                "residuals: |h| = {}, |g| = {}\n",
                fmt_short(res.h),
                fmt_short(res.g)
            ));
        }
        if let Some(diag) = &self.diagnostics {
            out.push_str(&format!(
                "d = [{}], in S_a: {}, in S_a+: {}\n",
                join_short(&diag.d),
                diag.in_sa,
                diag.in_sa_plus
            ));
        }
        if let Some(trace) = &self.perturbation_trace {
            out.push_str("perturbation trace:\n");
            out.push_str("  k            lambda         mu             sigma          y / z\n");
            for row in trace {
                let (lam, mu, sig) = match &row.dual_point {
                    Some(dp) => (fmt_short(dp.lambda), fmt_short(dp.mu), fmt_short(dp.sigma)),
                    None => ("-".into(), "-".into(), "-".into()),
                };
                let xs = match &row.x_bar {
                    Some(x) => format!("[{}] / [{}]", join_short(&x.y), join_short(&x.z)),
                    None => "-".into(),
                };
                out.push_str(&format!(
                    "  {:<12} {:<14} {:<14} {:<14} {} ({})\n",
                    row.k, lam, mu, sig, xs, row.status
                ));
            }
        }
        out
    }
}

fn dual_of(sp: &StationaryPoint) -> DualTriple {
    DualTriple { lambda: sp.dp.lam, mu: sp.dp.mu, sigma: sp.dp.sig }
}

fn x_bar_of(sp: &StationaryPoint) -> XBar {
    XBar { y: sp.x.y.iter().copied().collect(), z: sp.x.z.iter().copied().collect() }
}

fn trace_row_of(entry: &TraceEntry) -> TraceRow {
    let (status, dual_point, x_bar) = match &entry.result {
        Ok(cert) => (
            status_name(cert.status).to_string(),
            cert.witness.as_ref().map(dual_of),
            cert.witness.as_ref().map(x_bar_of),
        ),
        Err(e) => (format!("error: {e}"), None, None),
    };
    TraceRow { k: entry.k, f: entry.f.iter().copied().collect(), status, dual_point, x_bar }
}

fn push_kv(s: &mut String, key: &str, value: String) {
    if !s.ends_with('{') {
        s.push(',');
    }
    s.push('"');
    s.push_str(key);
    s.push_str("\":");
    s.push_str(&value);
}

fn opt<T>(v: &Option<T>, f: impl Fn(&T) -> String) -> String {
    match v {
        Some(v) => f(v),
        None => "null".to_string(),
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn float_array(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| fmt_f64(x)).collect();
    format!("[{}]", items.join(","))
}

fn dual_json(dp: &DualTriple) -> String {
    format!(
        "{{\"lambda\":{},\"mu\":{},\"sigma\":{}}}",
        fmt_f64(dp.lambda),
        fmt_f64(dp.mu),
        fmt_f64(dp.sigma)
    )
}

fn x_bar_json(x: &XBar) -> String {
    format!("{{\"y\":{},\"z\":{}}}", float_array(&x.y), float_array(&x.z))
}

fn diag_json(d: &Diagnostics) -> String {
    format!(
        "{{\"d\":{},\"in_sa\":{},\"in_sa_plus\":{}}}",
        float_array(&d.d),
        d.in_sa,
        d.in_sa_plus
    )
}

fn residuals_json(r: &Residuals) -> String {
    format!("{{\"h\":{},\"g\":{}}}", fmt_f64(r.h), fmt_f64(r.g))
}

fn trace_row_json(row: &TraceRow) -> String {
    let mut s = String::from("{");
    push_kv(&mut s, "k", fmt_f64(row.k));
    push_kv(&mut s, "f", float_array(&row.f));
    push_kv(&mut s, "status", json_string(&row.status));
    push_kv(&mut s, "dual_point", opt(&row.dual_point, dual_json));
    push_kv(&mut s, "x_bar", opt(&row.x_bar, x_bar_json));
    s.push('}');
    s
}

fn join_short(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| fmt_short(x)).collect();
    items.join(", ")
}
