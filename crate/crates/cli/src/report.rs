//! JSON-serializable mirrors of core results, with set witnesses rendered
//! as bit strings.

use std::collections::BTreeMap;

use serde::Serialize;

use robinson_gauge::approx::{ApproxReport, RegionMap};
use robinson_gauge::cutnorm::CutNormResult;
use robinson_gauge::gamma::{GammaEstimate, QuadrupleCertificate};

#[derive(Debug, Serialize)]
pub struct GammaEstimateJson {
    pub value: f64,
    pub witness_bits: String,
    pub method: &'static str,
    pub resolution: usize,
}

impl From<&GammaEstimate> for GammaEstimateJson {
    fn from(e: &GammaEstimate) -> Self {
        GammaEstimateJson {
            value: e.lower,
            witness_bits: e.witness.bit_string(),
            method: e.method.as_str(),
            resolution: e.resolution,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CertificateJson {
    pub value: f64,
    pub alpha: f64,
    pub alpha_cells: usize,
    pub resolution: usize,
    pub s_upper: String,
    pub s_lower: String,
    pub t_lower: String,
    pub t_upper: String,
}

impl From<&QuadrupleCertificate> for CertificateJson {
    fn from(c: &QuadrupleCertificate) -> Self {
        CertificateJson {
            value: c.value,
            alpha: c.alpha,
            alpha_cells: c.alpha_cells,
            resolution: c.resolution,
            s_upper: c.interval(0).bit_string(),
            s_lower: c.interval(1).bit_string(),
            t_lower: c.interval(2).bit_string(),
            t_upper: c.interval(3).bit_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CutNormJson {
    pub value: f64,
    pub witness_s: String,
    pub witness_t: String,
    pub exact: bool,
}

impl From<&CutNormResult> for CutNormJson {
    fn from(r: &CutNormResult) -> Self {
        CutNormJson {
            value: r.value,
            witness_s: r.witness_s.bit_string(),
            witness_t: r.witness_t.bit_string(),
            exact: r.exact,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ApproxReportJson {
    pub violation: f64,
    pub gamma_hat: f64,
    pub gamma_curve: Vec<(usize, f64)>,
    pub converged: bool,
    pub alpha: f64,
    pub distance: f64,
    pub distance_exact: bool,
    pub bound: f64,
    pub pass: bool,
}

impl From<&ApproxReport> for ApproxReportJson {
    fn from(r: &ApproxReport) -> Self {
        ApproxReportJson {
            violation: r.violation,
            gamma_hat: r.gamma_hat,
            gamma_curve: r.gamma_curve.clone(),
            converged: r.converged,
            alpha: r.alpha,
            distance: r.distance,
            distance_exact: r.distance_exact,
            bound: r.bound,
            pass: r.pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RegionMapHeaderJson {
    pub m: usize,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl From<&RegionMap> for RegionMapHeaderJson {
    fn from(m: &RegionMap) -> Self {
        RegionMapHeaderJson {
            m: m.levels(),
            alpha: m.alpha(),
            n: m.resolution(),
        }
    }
}

/// Run manifest: full config echo plus a content hash of the CSV, so a
/// finished run can be replayed and verified from this file alone.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: BTreeMap<String, String>,
    pub csv_file: String,
    pub csv_sha256: String,
    pub summary: serde_json::Value,
    pub total_runtime_ms: u64,
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report")
}
