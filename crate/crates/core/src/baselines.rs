//! Comparison algorithms: CoSaMP (with either a `T` or `2T` proxy selection)
//! and iterative hard thresholding.

use crate::error::{Error, Result};
use crate::linalg::{self, DenseVector};
use crate::model::{self, MeasurementMatrix, Signal, SupportSet};
use crate::pursuit::{PursuitResult, PursuitState, StopReason, ZERO_RESIDUAL};

/// Number of proxy entries merged into the support each CoSaMP iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosampWidth {
    /// `T` entries.
    Single,
    /// `2T` entries (the usual choice).
    Double,
}

impl CosampWidth {
    pub fn entries(&self, t: usize) -> usize {
        match self {
            CosampWidth::Single => t,
            CosampWidth::Double => 2 * t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosampConfig {
    pub width: CosampWidth,
    pub iterations: usize,
}

impl Default for CosampConfig {
    fn default() -> Self {
        Self {
            width: CosampWidth::Double,
            iterations: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IhtConfig {
    pub iterations: usize,
    /// Gradient step applied to the rescaled operator `Φ / ‖Φ‖₂`.
    pub step_size: f64,
    /// Power iterations used to estimate `‖Φ‖₂`.
    pub power_iterations: usize,
    /// Stop once `‖x_{k+1} − x_k‖₂ < tolerance · ‖x_{k+1}‖₂`.
    pub tolerance: f64,
}

impl Default for IhtConfig {
    fn default() -> Self {
        Self {
            iterations: 300,
            step_size: 1.0,
            power_iterations: 50,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineConfig {
    Cosamp(CosampConfig),
    Iht(IhtConfig),
}

impl BaselineConfig {
    pub fn run(&self, phi: &MeasurementMatrix, y: &[f64], t: usize) -> Result<PursuitResult> {
        match self {
            BaselineConfig::Cosamp(cfg) => cosamp(phi, y, t, cfg),
            BaselineConfig::Iht(cfg) => iht(phi, y, t, cfg),
        }
    }
}

fn check_inputs(phi: &MeasurementMatrix, y: &[f64], t: usize, iterations: usize) -> Result<()> {
    if y.len() != phi.rows() {
        return Err(Error::DimensionMismatch {
            context: "measurement length",
            expected: phi.rows(),
            found: y.len(),
        });
    }
    if t == 0 || t > phi.cols() {
        return Err(Error::InvalidArgument(format!(
            "sparsity {t} must lie in 1..={}",
            phi.cols()
        )));
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("iteration count must be at least 1".into()));
    }
    Ok(())
}

/// Residual `y − Φ_S c` for a coefficient map.
fn residual_of(phi: &MeasurementMatrix, y: &[f64], support: &[usize], coeffs: &[f64]) -> Vec<f64> {
    phi.matvec_sparse(support, coeffs)
        .iter()
        .zip(y)
        .map(|(p, yi)| yi - p)
        .collect()
}

struct Trace {
    history: Vec<f64>,
    states: Vec<PursuitState>,
}

impl Trace {
    fn new(y_norm: f64) -> Self {
        Self {
            history: vec![y_norm],
            states: Vec::new(),
        }
    }

    fn record(&mut self, t: usize, x: &[f64], residual: &[f64]) {
        self.history.push(linalg::norm2(residual));
        let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0.0).collect();
        self.states.push(PursuitState {
            t,
            coeffs: support.iter().map(|&i| (i, x[i])).collect(),
            lambda_t: SupportSet::new(support),
            residual: DenseVector::new(residual.to_vec()).expect("finite residual"),
        });
    }

    fn finish(
        self,
        x: Vec<f64>,
        residual: Vec<f64>,
        iterations_run: usize,
        stopped_early: Option<StopReason>,
    ) -> Result<PursuitResult> {
        let estimate = Signal::new(x)?;
        Ok(PursuitResult {
            support: estimate.support(),
            estimate,
            selection_order: Vec::new(),
            states: self.states,
            residual_norm_history: self.history,
            residual: DenseVector::new(residual)?,
            iterations_run,
            stopped_early,
        })
    }
}

/// CoSaMP: merge the strongest proxy entries with the current support, solve
/// least squares on the union, prune to the best `t` terms, repeat.
pub fn cosamp(phi: &MeasurementMatrix, y: &[f64], t: usize, cfg: &CosampConfig) -> Result<PursuitResult> {
    check_inputs(phi, y, t, cfg.iterations)?;
    let n = phi.cols();
    let y_norm = linalg::norm2(y);
    let mut trace = Trace::new(y_norm);
    let mut x = vec![0.0; n];
    let mut kept: Vec<usize> = Vec::new();
    let mut residual = y.to_vec();
    if y_norm == 0.0 {
        return trace.finish(x, residual, 0, Some(StopReason::ZeroResidual { at: 0 }));
    }
    let width = cfg.width.entries(t).min(n);
    let mut stopped_early = None;
    let mut iterations_run = 0;

    for it in 1..=cfg.iterations {
        let proxy = phi.tr_matvec(&residual);
        let mut merged = linalg::top_k_indices(&proxy, width);
        merged.extend_from_slice(&kept);
        merged.sort_unstable();
        merged.dedup();

        let b = linalg::least_squares(&phi.select_columns(&merged), y)
            .map_err(|e| e.at_iteration(it))?;
        kept = linalg::top_k_indices(&b, t.min(merged.len()))
            .into_iter()
            .map(|k| merged[k])
            .collect();
        kept.sort_unstable();
        x.iter_mut().for_each(|v| *v = 0.0);
        for (k, &pos) in merged.iter().enumerate() {
            if kept.binary_search(&pos).is_ok() {
                x[pos] = b[k];
            }
        }
        let coeffs: Vec<f64> = kept.iter().map(|&i| x[i]).collect();
        residual = residual_of(phi, y, &kept, &coeffs);
        trace.record(it, &x, &residual);
        iterations_run = it;

        if linalg::norm2(&residual) <= ZERO_RESIDUAL * y_norm {
            if it < cfg.iterations {
                stopped_early = Some(StopReason::ZeroResidual { at: it });
            }
            break;
        }
    }
    trace.finish(x, residual, iterations_run, stopped_early)
}

/// Iterative hard thresholding `x ← H_t(x + μ Φ̃ᵀ(ỹ − Φ̃x))` on the rescaled
/// problem `Φ̃ = Φ/‖Φ‖₂`, `ỹ = y/‖Φ‖₂`, which has the same solutions.
pub fn iht(phi: &MeasurementMatrix, y: &[f64], t: usize, cfg: &IhtConfig) -> Result<PursuitResult> {
    check_inputs(phi, y, t, cfg.iterations)?;
    if !(cfg.step_size > 0.0 && cfg.step_size.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step size must be positive, got {}",
            cfg.step_size
        )));
    }
    let n = phi.cols();
    let y_norm = linalg::norm2(y);
    let mut trace = Trace::new(y_norm);
    let mut x = vec![0.0; n];
    let mut residual = y.to_vec();
    if y_norm == 0.0 {
        return trace.finish(x, residual, 0, Some(StopReason::ZeroResidual { at: 0 }));
    }
    let scale = linalg::spectral_norm_estimate(phi, cfg.power_iterations);
    if scale == 0.0 {
        return Err(Error::InvalidArgument("measurement matrix is zero".into()));
    }
    // With Φ̃ = Φ/s and ỹ = y/s the gradient Φ̃ᵀ(ỹ − Φ̃x) equals Φᵀ(y − Φx)/s².
    let gain = cfg.step_size / (scale * scale);
    let mut stopped_early = None;
    let mut iterations_run = 0;

    for it in 1..=cfg.iterations {
        let gradient = phi.tr_matvec(&residual);
        let step: Vec<f64> = x.iter().zip(&gradient).map(|(xi, g)| xi + gain * g).collect();
        let next = model::best_t_term(&Signal::new(step)?, t).into_vec();

        let change = linalg::distance(&next, &x);
        let size = linalg::norm2(&next);
        x = next;
        let support: Vec<usize> = (0..n).filter(|&i| x[i] != 0.0).collect();
        let coeffs: Vec<f64> = support.iter().map(|&i| x[i]).collect();
        residual = residual_of(phi, y, &support, &coeffs);
        let r_norm = linalg::norm2(&residual);
        trace.record(it, &x, &residual);
        iterations_run = it;

        if r_norm > 10.0 * y_norm {
            return Err(Error::Diverged {
                iteration: it,
                residual_norm: r_norm,
                measurement_norm: y_norm,
            });
        }
        if r_norm <= ZERO_RESIDUAL * y_norm {
            if it < cfg.iterations {
                stopped_early = Some(StopReason::ZeroResidual { at: it });
            }
            break;
        }
        if change <= cfg.tolerance * size {
            if it < cfg.iterations {
                stopped_early = Some(StopReason::Converged { at: it });
            }
            break;
        }
    }
    trace.finish(x, residual, iterations_run, stopped_early)
}
