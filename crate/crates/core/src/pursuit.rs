//! Orthogonal matching pursuit and its multi-atom relatives.
//!
//! All three algorithms share one loop: correlate the residual with every
//! unselected column, add the `k_t` strongest (by absolute correlation, lowest
//! index first on ties), re-project `y` onto every selected column, and update
//! the residual. They differ only in the width schedule `k_t`:
//!
//! * OMP: `k_t = 1`
//! * K-fold OMP: `k_t = K`
//! * hybrid α-OMP: `k_t = max(1, ⌈α(T − t + 1)⌉)`

use crate::error::{Error, Result};
use crate::linalg::{self, DenseVector};
use crate::model::{self, MeasurementMatrix, Signal, SupportSet};

/// `‖r_t‖₂ ≤ ZERO_RESIDUAL · ‖y‖₂` ends a run early (successfully).
pub const ZERO_RESIDUAL: f64 = 1e-12;

/// Slack allowed when checking that residual norms never increase.
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Allowed `|φᵢᵀ r_t| / ‖y‖₂` on selected atoms after each projection.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

// Guards the ceiling in the hybrid schedule against products like 0.1 * 30
// landing a hair above an integer.
const WIDTH_EPS: f64 = 1e-9;

/// How many atoms to add at each iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionRule {
    FixedK(usize),
    HybridAlpha(f64),
}

impl SelectionRule {
    pub fn omp() -> Self {
        SelectionRule::FixedK(1)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            SelectionRule::FixedK(0) => Err(Error::InvalidArgument("K must be at least 1".into())),
            SelectionRule::HybridAlpha(a) if !(a > 0.0 && a <= 1.0) => Err(
                Error::InvalidArgument(format!("alpha must lie in (0, 1], got {a}")),
            ),
            _ => Ok(()),
        }
    }

    /// Width at iteration `t` (1-based) of a `total`-iteration run.
    pub fn width(&self, t: usize, total: usize) -> usize {
        match *self {
            SelectionRule::FixedK(k) => k,
            SelectionRule::HybridAlpha(alpha) => {
                let remaining = (total + 1).saturating_sub(t) as f64;
                ((alpha * remaining - WIDTH_EPS).ceil() as usize).max(1)
            }
        }
    }

    /// Widths for every iteration of a `total`-iteration run.
    pub fn schedule(&self, total: usize) -> Vec<usize> {
        (1..=total).map(|t| self.width(t, total)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PursuitOptions {
    /// Keep a full [`PursuitState`] per iteration; otherwise only norms.
    pub keep_states: bool,
}

impl Default for PursuitOptions {
    fn default() -> Self {
        Self { keep_states: true }
    }
}

impl PursuitOptions {
    pub fn low_memory() -> Self {
        Self { keep_states: false }
    }
}

/// Snapshot taken after iteration `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PursuitState {
    pub t: usize,
    /// Selected positions after this iteration.
    pub lambda_t: SupportSet,
    pub residual: DenseVector,
    /// `(position, coefficient)` for every selected position, in increasing
    /// position order.
    pub coeffs: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Residual vanished after `at` iterations.
    ZeroResidual { at: usize },
    /// Fewer unselected columns remained than the rule asked for.
    Exhausted { at: usize },
    /// An iterative method's update fell below its convergence threshold.
    Converged { at: usize },
}

impl StopReason {
    pub fn tag(&self) -> &'static str {
        match self {
            StopReason::ZeroResidual { .. } => "zero_residual",
            StopReason::Exhausted { .. } => "exhausted",
            StopReason::Converged { .. } => "converged",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PursuitResult {
    pub estimate: Signal,
    /// Every selected position (a superset of the estimate's nonzeros).
    pub support: SupportSet,
    /// Positions in the order they were selected. Empty for baselines.
    pub selection_order: Vec<usize>,
    pub states: Vec<PursuitState>,
    /// `‖r_0‖₂ = ‖y‖₂` followed by the norm after every iteration.
    pub residual_norm_history: Vec<f64>,
    /// `y − Φ x̃` at exit.
    pub residual: DenseVector,
    pub iterations_run: usize,
    pub stopped_early: Option<StopReason>,
}

/// Violations of the per-iteration residual invariants.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InvariantReport {
    pub monotonicity: usize,
    pub orthogonality: usize,
}

impl InvariantReport {
    pub fn total(&self) -> usize {
        self.monotonicity + self.orthogonality
    }
}

impl std::ops::AddAssign for InvariantReport {
    fn add_assign(&mut self, rhs: Self) {
        self.monotonicity += rhs.monotonicity;
        self.orthogonality += rhs.orthogonality;
    }
}

impl PursuitResult {
    /// Checks that residual norms never grow (up to [`MONOTONE_SLACK`]) and,
    /// when snapshots were kept, that every snapshot's residual is orthogonal
    /// to the atoms selected so far.
    pub fn check_residual_invariants(&self, phi: &MeasurementMatrix, y: &[f64]) -> InvariantReport {
        let mut report = InvariantReport::default();
        for w in self.residual_norm_history.windows(2) {
            if w[1] > w[0] + MONOTONE_SLACK {
                report.monotonicity += 1;
            }
        }
        let limit = ORTHOGONALITY_TOLERANCE * linalg::norm2(y);
        for state in &self.states {
            for &i in state.lambda_t.as_slice() {
                let c: f64 = (0..phi.rows()).map(|r| phi.get(r, i) * state.residual[r]).sum();
                if c.abs() > limit {
                    report.orthogonality += 1;
                }
            }
        }
        report
    }
}

/// Orthogonal matching pursuit with `iterations` single-atom steps.
pub fn omp(phi: &MeasurementMatrix, y: &[f64], iterations: usize) -> Result<PursuitResult> {
    pursue(phi, y, iterations, SelectionRule::omp(), PursuitOptions::default())
}

/// K-fold OMP: `iterations` steps of `k` atoms each, ending with a least-squares
/// fit on all selected columns.
pub fn komp(phi: &MeasurementMatrix, y: &[f64], iterations: usize, k: usize) -> Result<PursuitResult> {
    pursue(phi, y, iterations, SelectionRule::FixedK(k), PursuitOptions::default())
}

/// Hybrid α-OMP: step `t` adds `max(1, ⌈α(T − t + 1)⌉)` atoms.
pub fn hybrid_omp(phi: &MeasurementMatrix, y: &[f64], iterations: usize, alpha: f64) -> Result<PursuitResult> {
    pursue(
        phi,
        y,
        iterations,
        SelectionRule::HybridAlpha(alpha),
        PursuitOptions::default(),
    )
}

/// The shared pursuit loop.
///
/// Fails with [`Error::UnstableWidth`] when the schedule would select more
/// columns than there are measurements, and with [`Error::SingularProjection`]
/// (carrying the iteration) when a projection is rank deficient.
pub fn pursue(
    phi: &MeasurementMatrix,
    y: &[f64],
    iterations: usize,
    rule: SelectionRule,
    options: PursuitOptions,
) -> Result<PursuitResult> {
    rule.validate()?;
    let (m, n) = (phi.rows(), phi.cols());
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            context: "measurement length",
            expected: m,
            found: y.len(),
        });
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("iteration count must be at least 1".into()));
    }
    let planned: usize = rule.schedule(iterations).iter().sum::<usize>().min(n);
    if planned > m {
        return Err(Error::UnstableWidth {
            selected: planned,
            rows: m,
        });
    }

    let y_norm = linalg::norm2(y);
    let mut residual = y.to_vec();
    let mut history = vec![y_norm];
    let mut states = Vec::new();
    let mut selected = vec![false; n];
    let mut order: Vec<usize> = Vec::with_capacity(planned);
    let mut coeffs: Vec<f64> = Vec::new();
    let mut stopped_early = None;
    let mut iterations_run = 0;

    if y_norm <= ZERO_RESIDUAL * y_norm {
        stopped_early = Some(StopReason::ZeroResidual { at: 0 });
    } else {
        for t in 1..=iterations {
            let width = rule.width(t, iterations);
            let correlations = phi.tr_matvec(&residual);
            let picks = linalg::top_k_indices_excluding(&correlations, width, &selected);
            if picks.is_empty() {
                stopped_early = Some(StopReason::Exhausted { at: t - 1 });
                break;
            }
            let short = picks.len() < width;
            for &i in &picks {
                selected[i] = true;
                order.push(i);
            }

            let sub = phi.select_columns(&order);
            coeffs = linalg::least_squares(&sub, y)
                .map_err(|e| e.at_iteration(t))?
                .into_inner();
            let projection = sub.matvec(&coeffs);
            for ((r, yi), pi) in residual.iter_mut().zip(y).zip(&projection) {
                *r = yi - pi;
            }
            let r_norm = linalg::norm2(&residual);
            history.push(r_norm);
            iterations_run = t;

            if options.keep_states {
                states.push(snapshot(t, &order, &coeffs, &residual));
            }
            if short {
                stopped_early = Some(StopReason::Exhausted { at: t });
                break;
            }
            if r_norm <= ZERO_RESIDUAL * y_norm {
                if t < iterations {
                    stopped_early = Some(StopReason::ZeroResidual { at: t });
                }
                break;
            }
        }
    }

    let mut estimate = vec![0.0; n];
    for (&i, &c) in order.iter().zip(&coeffs) {
        estimate[i] = c;
    }
    Ok(PursuitResult {
        estimate: Signal::new(estimate)?,
        support: SupportSet::new(order.clone()),
        selection_order: order,
        states,
        residual_norm_history: history,
        residual: DenseVector::new(residual)?,
        iterations_run,
        stopped_early,
    })
}

fn snapshot(t: usize, order: &[usize], coeffs: &[f64], residual: &[f64]) -> PursuitState {
    let mut pairs: Vec<(usize, f64)> = order.iter().copied().zip(coeffs.iter().copied()).collect();
    pairs.sort_unstable_by_key(|p| p.0);
    PursuitState {
        t,
        lambda_t: SupportSet::new(order.to_vec()),
        residual: DenseVector::new(residual.to_vec()).expect("finite residual"),
        coeffs: pairs,
    }
}

/// The best `t`-term approximation of a pursuit estimate.
pub fn truncate_result(result: &PursuitResult, t: usize) -> Signal {
    model::best_t_term(&result.estimate, t)
}
