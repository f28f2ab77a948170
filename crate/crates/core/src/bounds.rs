//! Error-bound constants for OMP and K-fold OMP.
//!
//! For OMP after `T` iterations,
//!
//! ```text
//! C₁′(T) = √(1+δ_T)/√(1−δ_{2T}) · (√T + √(1+δ_{T+1})) / (1 − δ_{T+1}(1+√T)) + 2/√(1−δ_{2T})
//! C₁(T)  = √(1+δ_T) · C₁′(T)
//! ```
//!
//! and for K-fold OMP, with `T_K = (K−1)T + K`,
//!
//! ```text
//! C_K″(T) = (√(T/K)·√(1+δ_K) + √(1+δ_{T_K})) / (1 − δ_{T_K}(1+√(T/K)))
//! C_K′(T) = √(1+δ_{T_K})/√(1−δ_{(K+1)T}) · C_K″(T) + 2/√(1−δ_{(K+1)T})
//! C_K(T)  = √(1+δ_T) · C_K′(T)
//! ```
//!
//! With every `δ = 0` these collapse to `√T + 3` and `√(T/K) + 3`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::rip::{DeltaOracle, RipReport};

/// Restricted isometry constants as a function of the order.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaModel {
    /// `δ_ℓ = delta2 · ℓ^beta`.
    PowerLaw { delta2: f64, beta: f64 },
    Table(BTreeMap<usize, f64>),
}

impl DeltaModel {
    pub fn power_law(delta2: f64, beta: f64) -> Result<Self> {
        if !(delta2 >= 0.0 && delta2.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "power law needs finite delta2 >= 0 and finite beta, got {delta2}, {beta}"
            )));
        }
        Ok(DeltaModel::PowerLaw { delta2, beta })
    }

    /// Every constant zero.
    pub fn zero() -> Self {
        DeltaModel::PowerLaw {
            delta2: 0.0,
            beta: 0.0,
        }
    }

    pub fn from_report(report: &RipReport) -> Self {
        DeltaModel::Table(
            report
                .orders
                .iter()
                .copied()
                .zip(report.deltas.iter().copied())
                .collect(),
        )
    }

    fn get(&self, order: usize) -> Result<f64> {
        self.delta(order).ok_or(Error::OrderOutOfRange { order })
    }

    /// True when `δ_order ≥ 1`, where the bound formulas stop making sense.
    pub fn saturated(&self, order: usize) -> bool {
        self.delta(order).is_some_and(|d| d >= 1.0)
    }
}

impl DeltaOracle for DeltaModel {
    fn delta(&self, order: usize) -> Option<f64> {
        match self {
            DeltaModel::PowerLaw { delta2, beta } => Some(delta2 * (order as f64).powf(*beta)),
            DeltaModel::Table(table) => table.get(&order).copied(),
        }
    }
}

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::BoundUndefined(what()))
    }
}

fn check_sparsity(t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidArgument("T must be at least 1".into()));
    }
    Ok(())
}

/// `C₁′(T)`.
pub fn c1_prime(model: &DeltaModel, t: usize) -> Result<f64> {
    check_sparsity(t)?;
    let d_t = model.get(t)?;
    let d_t1 = model.get(t + 1)?;
    let d_2t = model.get(2 * t)?;
    let root_t = (t as f64).sqrt();
    require(d_2t < 1.0, || format!("delta_{} = {d_2t} is not below 1", 2 * t))?;
    let denom = 1.0 - d_t1 * (1.0 + root_t);
    require(denom > 0.0, || {
        format!("delta_{} * (1 + sqrt(T)) = {} is not below 1", t + 1, d_t1 * (1.0 + root_t))
    })?;
    let lower = (1.0 - d_2t).sqrt();
    Ok((1.0 + d_t).sqrt() / lower * (root_t + (1.0 + d_t1).sqrt()) / denom + 2.0 / lower)
}

/// `C₁(T) = √(1+δ_T)·C₁′(T)`, the OMP error-bound constant.
pub fn c1_constant(model: &DeltaModel, t: usize) -> Result<f64> {
    Ok((1.0 + model.get(t.max(1))?).sqrt() * c1_prime(model, t)?)
}

/// `T_K = (K−1)T + K`.
pub fn t_k(t: usize, k: usize) -> usize {
    (k - 1) * t + k
}

/// `C_K″(T)`.
pub fn ck_double_prime(model: &DeltaModel, t: usize, k: usize) -> Result<f64> {
    check_sparsity(t)?;
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let order = t_k(t, k);
    let d_k = model.get(k)?;
    let d_tk = model.get(order)?;
    let ratio = (t as f64 / k as f64).sqrt();
    let denom = 1.0 - d_tk * (1.0 + ratio);
    require(denom > 0.0, || {
        format!("delta_{order} * (1 + sqrt(T/K)) = {} is not below 1", d_tk * (1.0 + ratio))
    })?;
    Ok((ratio * (1.0 + d_k).sqrt() + (1.0 + d_tk).sqrt()) / denom)
}

/// `C_K′(T)`.
pub fn ck_prime(model: &DeltaModel, t: usize, k: usize) -> Result<f64> {
    let inner = ck_double_prime(model, t, k)?;
    let d_tk = model.get(t_k(t, k))?;
    let wide = (k + 1) * t;
    let d_wide = model.get(wide)?;
    require(d_wide < 1.0, || format!("delta_{wide} = {d_wide} is not below 1"))?;
    let lower = (1.0 - d_wide).sqrt();
    Ok((1.0 + d_tk).sqrt() / lower * inner + 2.0 / lower)
}

/// `C_K(T) = √(1+δ_T)·C_K′(T)`, the K-fold OMP error-bound constant.
///
/// At `K = 1` this is the K-fold formula evaluated at one atom per step, which
/// is not the same expression as [`c1_constant`].
pub fn ck_constant(model: &DeltaModel, t: usize, k: usize) -> Result<f64> {
    let prime = ck_prime(model, t, k)?;
    Ok((1.0 + model.get(t)?).sqrt() * prime)
}

/// When a K-fold row counts as beating OMP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossoverRule {
    /// `2·C_K(T) + 2 < C₁(T)`: the leading coefficients of the truncated
    /// K-fold bound and the OMP bound.
    #[default]
    DoubledPlusTwo,
    /// `2·C_K(T) < C₁(T)`.
    DoubledConstant,
}

impl CrossoverRule {
    pub fn comparison_value(&self, ck: f64) -> f64 {
        match self {
            CrossoverRule::DoubledPlusTwo => 2.0 * ck + 2.0,
            CrossoverRule::DoubledConstant => 2.0 * ck,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            CrossoverRule::DoubledPlusTwo => "2ck_plus_2",
            CrossoverRule::DoubledConstant => "2ck",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub k: usize,
    /// `C_K(T)`; row `K = 1` carries `C₁(T)` instead.
    pub ck: Option<f64>,
    /// Value compared against `C₁(T)`; `C₁(T)` itself on row `K = 1`.
    pub comparison: Option<f64>,
    pub crossover: bool,
    pub defined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    pub t: usize,
    pub c1: Option<f64>,
    pub rule: CrossoverRule,
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    /// Smallest K whose row beats OMP.
    pub fn first_crossover(&self) -> Option<usize> {
        self.rows.iter().find(|r| r.crossover).map(|r| r.k)
    }
}

/// OMP-vs-KOMP comparison over `ks` with the default [`CrossoverRule`].
pub fn compare_omp_komp(model: &DeltaModel, t: usize, ks: RangeInclusive<usize>) -> BoundTable {
    compare_omp_komp_with(model, t, ks, CrossoverRule::default())
}

pub fn compare_omp_komp_with(
    model: &DeltaModel,
    t: usize,
    ks: RangeInclusive<usize>,
    rule: CrossoverRule,
) -> BoundTable {
    let c1 = c1_constant(model, t).ok();
    let rows = ks
        .filter(|&k| k >= 1)
        .map(|k| {
            if k == 1 {
                return BoundRow {
                    k,
                    ck: c1,
                    comparison: c1,
                    crossover: false,
                    defined: c1.is_some(),
                };
            }
            match ck_constant(model, t, k) {
                Ok(ck) => {
                    let comparison = rule.comparison_value(ck);
                    BoundRow {
                        k,
                        ck: Some(ck),
                        comparison: Some(comparison),
                        crossover: c1.is_some_and(|c1| comparison < c1),
                        defined: true,
                    }
                }
                Err(_) => BoundRow {
                    k,
                    ck: None,
                    comparison: None,
                    crossover: false,
                    defined: false,
                },
            }
        })
        .collect();
    BoundTable { t, c1, rule, rows }
}

fn check_errors(err2: f64, err1: f64, noise2: f64) -> Result<()> {
    if [err2, err1, noise2].iter().all(|v| *v >= 0.0 && v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "error norms must be finite and non-negative, got {err2}, {err1}, {noise2}"
        )))
    }
}

/// OMP bound `(1 + C₁)‖x − x_T‖₂ + (C₁/√T)‖x − x_T‖₁ + C₁‖w‖₂`.
pub fn theorem2_rhs(model: &DeltaModel, t: usize, err2: f64, err1: f64, noise2: f64) -> Result<f64> {
    check_errors(err2, err1, noise2)?;
    let c = c1_constant(model, t)?;
    Ok((1.0 + c) * err2 + c / (t as f64).sqrt() * err1 + c * noise2)
}

/// K-fold OMP bound on the untruncated estimate:
/// `(1 + C_K)‖x − x_T‖₂ + (C_K/√T)‖x − x_T‖₁ + C_K‖w‖₂`.
pub fn theorem4_rhs(model: &DeltaModel, t: usize, k: usize, err2: f64, err1: f64, noise2: f64) -> Result<f64> {
    check_errors(err2, err1, noise2)?;
    let c = ck_constant(model, t, k)?;
    Ok((1.0 + c) * err2 + c / (t as f64).sqrt() * err1 + c * noise2)
}

/// K-fold OMP bound on the `T`-term truncation:
/// `(3 + 2C_K)‖x − x_T‖₂ + (C_K/√T)‖x − x_T‖₁ + 2‖w‖₂`.
pub fn corollary1_rhs(model: &DeltaModel, t: usize, k: usize, err2: f64, err1: f64, noise2: f64) -> Result<f64> {
    check_errors(err2, err1, noise2)?;
    let c = ck_constant(model, t, k)?;
    Ok((3.0 + 2.0 * c) * err2 + c / (t as f64).sqrt() * err1 + 2.0 * noise2)
}
