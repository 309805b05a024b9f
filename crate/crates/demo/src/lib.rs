//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function takes plain numbers and strings and returns a JSON
//! document; the page draws it on a canvas. The `*_json` functions are the
//! same computations without the JavaScript boundary, for native use and tests.

use blockkrylov::perfmodel::{divisors, memory_crossover, sweep};
use blockkrylov::theory::{rate_classical, rate_global, spectrum_of};
use blockkrylov::{
    bcg_solve, poisson2d, random_block_rhs, CoefficientField, Kernel, MachineProfile, Mode,
    PoissonSpec, Preconditioner, PreconditionerKind, SolveOptions, SubalgebraConfig,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest grid side accepted by [`convergence_json`].
pub const MAX_SOLVE_GRID: usize = 96;
/// Largest grid side accepted by [`rate_curves_json`]; the spectrum is dense.
pub const MAX_SPECTRUM_GRID: usize = 20;

type Json = Result<String, String>;

fn to_json(value: &impl Serialize) -> Json {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

#[derive(Serialize)]
struct SweepPoint {
    p: u64,
    t_comp: f64,
    t_mem: f64,
    t_reg: f64,
    t: f64,
    bound: String,
}

#[derive(Serialize)]
struct SweepResult {
    kernel: String,
    crossover: Option<u64>,
    points: Vec<SweepPoint>,
}

/// Predicted kernel time for every divisor `p` of `k` on the reference machine.
pub fn model_sweep_json(kernel: &str, n: u64, k: u64, z: u64) -> Json {
    let kernel: Kernel = kernel.parse().map_err(err)?;
    if k == 0 || n == 0 {
        return Err("n and k must be positive".into());
    }
    let m = MachineProfile::skylake_reference();
    let z = (kernel == Kernel::Bop).then_some(z);
    let rows = sweep(kernel, n, k, &divisors(k), z, &m).map_err(err)?;
    to_json(&SweepResult {
        kernel: kernel.to_string(),
        crossover: memory_crossover(kernel, n, k, z, &m),
        points: rows
            .into_iter()
            .map(|r| SweepPoint {
                p: r.p,
                t_comp: r.prediction.t_comp,
                t_mem: r.prediction.t_mem,
                t_reg: r.prediction.t_reg,
                t: r.prediction.time,
                bound: r.prediction.bound.to_string(),
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct ConvergenceResult {
    n: usize,
    iterations: usize,
    status: String,
    /// Largest per-column `‖Rⁱ‖/‖B‖` at each iteration.
    history: Vec<f64>,
    flops: u64,
}

/// Solves a seeded heterogeneous Poisson problem and reports the defect history.
#[allow(clippy::too_many_arguments)]
pub fn convergence_json(
    nx: usize,
    k: usize,
    p: usize,
    mode: &str,
    precond: &str,
    contrast: f64,
    seed: u64,
) -> Json {
    if nx > MAX_SOLVE_GRID {
        return Err(format!("grid side is limited to {MAX_SOLVE_GRID}"));
    }
    let mode: Mode = mode.parse().map_err(err)?;
    let kind: PreconditionerKind = precond.parse().map_err(err)?;
    let cfg = SubalgebraConfig::new(k, p, mode).map_err(err)?;
    let spec =
        PoissonSpec::new(nx, nx, CoefficientField::LogUniform { contrast }, seed).map_err(err)?;
    let a = poisson2d(&spec).map_err(err)?;
    let b = random_block_rhs(a.n(), k, seed);
    let m = Preconditioner::build(kind, &a).map_err(err)?;
    let (_, rep) = bcg_solve(&a, &b, None, &m, cfg, &SolveOptions::default()).map_err(err)?;
    let history = rep
        .defect_history
        .iter()
        .map(|d| {
            d.iter()
                .zip(&rep.rhs_norms)
                .map(|(r, b)| if *b > 0.0 { r / b } else { *r })
                .fold(0.0, f64::max)
        })
        .collect();
    to_json(&ConvergenceResult {
        n: a.n(),
        iterations: rep.iterations,
        status: rep.status.as_str().to_string(),
        history,
        flops: rep.flops.total(),
    })
}

#[derive(Serialize)]
struct RatePoint {
    k: usize,
    classical: f64,
    /// Global bound for each divisor `p` of `k`, as `(p, rate)`.
    global: Vec<(usize, f64)>,
}

#[derive(Serialize)]
struct RateResult {
    lambda_min: f64,
    lambda_max: f64,
    points: Vec<RatePoint>,
}

/// Rate bounds for `k = 1..=k_max` from the spectrum of a small Poisson operator.
pub fn rate_curves_json(nx: usize, k_max: usize, contrast: f64, seed: u64) -> Json {
    if nx > MAX_SPECTRUM_GRID {
        return Err(format!("grid side is limited to {MAX_SPECTRUM_GRID}"));
    }
    let spec =
        PoissonSpec::new(nx, nx, CoefficientField::LogUniform { contrast }, seed).map_err(err)?;
    let spectrum = spectrum_of(&poisson2d(&spec).map_err(err)?).map_err(err)?;
    let k_max = k_max.clamp(1, spectrum.len());
    let points = (1..=k_max)
        .map(|k| {
            let global = divisors(k as u64)
                .into_iter()
                .map(|p| p as usize)
                .map(|p| rate_global(&spectrum, p, k / p).map(|r| (p, r)))
                .collect::<Result<_, _>>()?;
            Ok(RatePoint {
                k,
                classical: rate_classical(&spectrum, k)?,
                global,
            })
        })
        .collect::<blockkrylov::Result<_>>()
        .map_err(err)?;
    to_json(&RateResult {
        lambda_min: spectrum.min(),
        lambda_max: spectrum.max(),
        points,
    })
}

fn js(r: Json) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn model_sweep(kernel: &str, n: f64, k: u32, z: f64) -> Result<String, JsValue> {
    js(model_sweep_json(kernel, n as u64, k.into(), z as u64))
}

#[wasm_bindgen]
pub fn convergence(
    nx: u32,
    k: u32,
    p: u32,
    mode: &str,
    precond: &str,
    contrast: f64,
    seed: u32,
) -> Result<String, JsValue> {
    js(convergence_json(
        nx as usize,
        k as usize,
        p as usize,
        mode,
        precond,
        contrast,
        seed.into(),
    ))
}

#[wasm_bindgen]
pub fn rate_curves(nx: u32, k_max: u32, contrast: f64, seed: u32) -> Result<String, JsValue> {
    js(rate_curves_json(
        nx as usize,
        k_max as usize,
        contrast,
        seed.into(),
    ))
}
