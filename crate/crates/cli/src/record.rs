use serde::{Deserialize, Serialize};

/// One solve of one k-column batch.
///
/// Timing fields are seconds and stay empty unless timing was requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub mode: String,
    pub precond: String,
    pub tol: f64,
    pub seed: u64,
    pub batch: usize,
    pub iterations: usize,
    pub status: String,
    pub converged: bool,
    pub breakdown_iteration: Option<usize>,
    /// Largest explicit relative residual over the columns.
    pub max_residual: f64,
    pub flops_bdot: u64,
    pub flops_baxpy: u64,
    pub flops_bop: u64,
    pub flops_total: u64,
    pub time_bdot: Option<f64>,
    pub time_baxpy: Option<f64>,
    pub time_bop: Option<f64>,
    pub time_bsolve: Option<f64>,
    pub time_precond: Option<f64>,
    pub time_total: Option<f64>,
}

impl RunRecord {
    pub const HEADER: [&'static str; 25] = [
        "nx",
        "ny",
        "n",
        "k",
        "p",
        "mode",
        "precond",
        "tol",
        "seed",
        "batch",
        "iterations",
        "status",
        "converged",
        "breakdown_iteration",
        "max_residual",
        "flops_bdot",
        "flops_baxpy",
        "flops_bop",
        "flops_total",
        "time_bdot",
        "time_baxpy",
        "time_bop",
        "time_bsolve",
        "time_precond",
        "time_total",
    ];
}

/// One model prediction; times in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub p: u64,
    pub t_comp: f64,
    pub t_mem: f64,
    pub t_reg: f64,
    pub t: f64,
    pub bound: String,
}

impl ModelRecord {
    pub const HEADER: [&'static str; 6] = ["p", "t_comp", "t_mem", "t_reg", "t", "bound"];
}

/// CSV writer that emits `header` even when no rows follow.
pub fn writer<W: std::io::Write>(out: W, header: &[&str]) -> csv::Result<csv::Writer<W>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header)?;
    Ok(w)
}
