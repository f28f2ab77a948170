//! Restricted isometry constants and the recovery conditions built on them.
//!
//! `δ_T` is the largest deviation from 1 of any eigenvalue of `Φ_SᵀΦ_S` over
//! all column subsets `S` of size `T`. At desk scale it is computed exactly by
//! enumerating subsets in lexicographic order; beyond that a seeded random
//! sample gives a lower bound.

use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::model::{rng_from_seed, MeasurementMatrix};

/// Default cap on the number of subsets an exact computation may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000;

const CHUNK: u64 = 10_000;
const PROGRESS_EVERY: u64 = 100_000;
const GROWTH_SLACK: f64 = 1e-9;

/// Anything that can report `δ_ℓ` for an order `ℓ`.
pub trait DeltaOracle {
    fn delta(&self, order: usize) -> Option<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RipMethod {
    ExactEnumeration,
    MonteCarloLowerBound,
}

impl RipMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            RipMethod::ExactEnumeration => "exact_enumeration",
            RipMethod::MonteCarloLowerBound => "monte_carlo_lower_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RipReport {
    pub orders: Vec<usize>,
    pub deltas: Vec<f64>,
    pub method: RipMethod,
    pub subsets_evaluated: Vec<u64>,
    pub seed: Option<u64>,
}

impl DeltaOracle for RipReport {
    fn delta(&self, order: usize) -> Option<f64> {
        self.orders
            .iter()
            .position(|&o| o == order)
            .map(|i| self.deltas[i])
    }
}

/// C(n, k), saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let mut v = next;
        loop {
            let below = binomial(n - v - 1, k - slot - 1);
            if rank < below {
                break;
            }
            rank -= below;
            v += 1;
        }
        out.push(v);
        next = v + 1;
    }
    out
}

/// Advances to the next lexicographic combination; false after the last one.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in (i + 1)..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gram of the full matrix, indexed for fast sub-block extraction.
struct GramCache {
    n: usize,
    g: Vec<f64>,
}

impl GramCache {
    fn new(phi: &DenseMatrix) -> Self {
        Self {
            n: phi.cols(),
            g: phi.gram().as_slice().to_vec(),
        }
    }

    fn deviation(&self, subset: &[usize]) -> f64 {
        let k = subset.len();
        let (lo, hi) = if k == 1 {
            let v = self.g[subset[0] * self.n + subset[0]];
            (v, v)
        } else {
            let sub = DenseMatrix::from_fn(k, k, |a, b| self.g[subset[a] * self.n + subset[b]]);
            linalg::psd_extreme_eigenvalues(&sub)
        };
        (hi - 1.0).max(1.0 - lo)
    }
}

fn check_order(phi: &MeasurementMatrix, t: usize) -> Result<()> {
    if t == 0 || t > phi.cols() {
        return Err(Error::InvalidArgument(format!(
            "order {t} must lie in 1..={}",
            phi.cols()
        )));
    }
    if t > phi.rows() {
        return Err(Error::InvalidArgument(format!(
            "order {t} exceeds the {} rows; the constant is at least 1",
            phi.rows()
        )));
    }
    Ok(())
}

fn enumerate_max(cache: &GramCache, n: usize, t: usize, total: u64) -> f64 {
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            if start % PROGRESS_EVERY == 0 && start > 0 {
                log::debug!("rip order {t}: {start} of {total} subsets");
            }
            let mut subset = unrank_combination(n, t, start as u128);
            let mut best = cache.deviation(&subset);
            for _ in (start + 1)..end {
                next_combination(&mut subset, n);
                best = best.max(cache.deviation(&subset));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Exact `δ_T` with the default enumeration budget.
pub fn rip_constant_exact(phi: &MeasurementMatrix, t: usize) -> Result<f64> {
    rip_constant_exact_with_budget(phi, t, DEFAULT_ENUMERATION_BUDGET).map(|(d, _)| d)
}

/// Exact `δ_T` and the number of subsets visited.
///
/// The maximum is reduced across rayon workers; since `max` is associative and
/// commutative the result does not depend on the worker count.
pub fn rip_constant_exact_with_budget(phi: &MeasurementMatrix, t: usize, budget: u64) -> Result<(f64, u64)> {
    check_order(phi, t)?;
    let n = phi.cols();
    let subsets = binomial(n, t);
    if subsets > budget as u128 {
        return Err(Error::BudgetExceeded { subsets, budget });
    }
    let total = subsets as u64;
    let cache = GramCache::new(phi);
    Ok((enumerate_max(&cache, n, t, total), total))
}

/// Largest subset deviation over `samples` random `T`-subsets; a lower bound
/// on `δ_T`. When `samples` covers every subset, all subsets are enumerated
/// instead and the result is exact.
pub fn rip_constant_lower_bound(phi: &MeasurementMatrix, t: usize, samples: u64, seed: u64) -> Result<f64> {
    rip_lower_bound_counted(phi, t, samples, seed).map(|(d, _)| d)
}

fn rip_lower_bound_counted(phi: &MeasurementMatrix, t: usize, samples: u64, seed: u64) -> Result<(f64, u64)> {
    check_order(phi, t)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let n = phi.cols();
    let cache = GramCache::new(phi);
    let subsets = binomial(n, t);
    if subsets <= samples as u128 {
        let total = subsets as u64;
        return Ok((enumerate_max(&cache, n, t, total), total));
    }
    let mut rng = rng_from_seed(seed);
    let drawn: Vec<Vec<usize>> = (0..samples)
        .map(|_| {
            let mut s = index::sample(&mut rng, n, t).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    let best = drawn
        .par_iter()
        .map(|s| cache.deviation(s))
        .reduce(|| 0.0, f64::max);
    Ok((best, samples))
}

/// Exact constants for each order in `orders`.
pub fn rip_report_exact(phi: &MeasurementMatrix, orders: &[usize], budget: u64) -> Result<RipReport> {
    let mut deltas = Vec::with_capacity(orders.len());
    let mut counts = Vec::with_capacity(orders.len());
    for &t in orders {
        let (d, c) = rip_constant_exact_with_budget(phi, t, budget)?;
        deltas.push(d);
        counts.push(c);
    }
    Ok(RipReport {
        orders: orders.to_vec(),
        deltas,
        method: RipMethod::ExactEnumeration,
        subsets_evaluated: counts,
        seed: None,
    })
}

/// Sampled lower bounds for each order in `orders`. Each order draws from its
/// own stream derived from `seed`.
pub fn rip_report_sampled(phi: &MeasurementMatrix, orders: &[usize], samples: u64, seed: u64) -> Result<RipReport> {
    let mut deltas = Vec::with_capacity(orders.len());
    let mut counts = Vec::with_capacity(orders.len());
    for &t in orders {
        let (d, c) = rip_lower_bound_counted(phi, t, samples, seed.wrapping_add(t as u64))?;
        deltas.push(d);
        counts.push(c);
    }
    Ok(RipReport {
        orders: orders.to_vec(),
        deltas,
        method: RipMethod::MonteCarloLowerBound,
        subsets_evaluated: counts,
        seed: Some(seed),
    })
}

/// OMP recovery condition `δ_{T+1} < 1/(1 + √T)`.
pub fn check_theorem1(delta_t_plus_1: f64, t: usize) -> bool {
    delta_t_plus_1 < 1.0 / (1.0 + (t as f64).sqrt())
}

/// K-fold OMP recovery condition: for every `t = 1..=T`,
/// `δ_{T+(K−2)t+K} < 1/(1 + √((T − t + 1)/K))`, and `δ_{KT} < 1`.
pub fn check_theorem3(oracle: &impl DeltaOracle, t: usize, k: usize) -> Result<bool> {
    if t == 0 || k == 0 {
        return Err(Error::InvalidArgument("T and K must be at least 1".into()));
    }
    let lookup = |order: usize| oracle.delta(order).ok_or(Error::OrderOutOfRange { order });
    let mut holds = lookup(k * t)? < 1.0;
    for step in 1..=t {
        let order = (t + k * step + k).checked_sub(2 * step).expect("order is positive");
        let ratio = (t - step + 1) as f64 / k as f64;
        holds &= lookup(order)? < 1.0 / (1.0 + ratio.sqrt());
    }
    Ok(holds)
}

/// True when every reported `δ_T ≤ T·δ_2` (up to 1e-9) and the constants are
/// non-decreasing in the order. Requires `δ_2` in the report.
pub fn verify_growth_law(report: &RipReport) -> bool {
    let Some(delta2) = report.delta(2) else {
        return false;
    };
    let mut pairs: Vec<(usize, f64)> = report
        .orders
        .iter()
        .copied()
        .zip(report.deltas.iter().copied())
        .collect();
    pairs.sort_by_key(|p| p.0);
    let bounded = pairs
        .iter()
        .all(|&(t, d)| d <= t as f64 * delta2 + GROWTH_SLACK);
    let monotone = pairs.windows(2).all(|w| w[1].1 + GROWTH_SLACK >= w[0].1);
    bounded && monotone
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::gen_gaussian_matrix;

    fn unit_columns(m: usize, n: usize, seed: u64) -> MeasurementMatrix {
        gen_gaussian_matrix(m, n, seed, true).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 2), 66);
        assert_eq!(binomial(256, 4), 174_792_640);
        assert_eq!(binomial(5, 7), 0);
        assert_eq!(binomial(7, 0), 1);
    }

    #[test]
    fn unranking_matches_iteration() {
        let (n, k) = (9, 4);
        let mut c: Vec<usize> = (0..k).collect();
        let mut rank = 0u128;
        loop {
            assert_eq!(unrank_combination(n, k, rank), c);
            rank += 1;
            if !next_combination(&mut c, n) {
                break;
            }
        }
        assert_eq!(rank, binomial(n, k));
    }

    #[test]
    fn orthonormal_columns_have_zero_constant() {
        let phi = MeasurementMatrix::from_matrix(DenseMatrix::identity(6));
        for t in 1..=4 {
            assert!(rip_constant_exact(&phi, t).unwrap() < 1e-12);
        }
        assert!(rip_constant_lower_bound(&phi, 3, 1, 9).unwrap() < 1e-12);
    }

    #[test]
    fn duplicate_columns_give_one() {
        let m = DenseMatrix::new(2, 3, vec![1.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let phi = MeasurementMatrix::from_matrix(m);
        assert!((rip_constant_exact(&phi, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_two_equals_max_coherence() {
        let phi = unit_columns(8, 12, 21);
        let mut coherence: f64 = 0.0;
        for a in 0..12 {
            for b in (a + 1)..12 {
                coherence = coherence.max(linalg::dot(&phi.column(a), &phi.column(b)).abs());
            }
        }
        let exact = rip_constant_exact(&phi, 2).unwrap();
        assert!((exact - coherence).abs() < 1e-9);
        let covered = rip_constant_lower_bound(&phi, 2, 66, 1).unwrap();
        assert_eq!(covered, exact);
    }

    #[test]
    fn order_one_is_column_norm_deviation() {
        let phi = gen_gaussian_matrix(8, 12, 4, false).unwrap();
        let direct = (0..12)
            .map(|j| (phi.column_norm(j).powi(2) - 1.0).abs())
            .fold(0.0, f64::max);
        assert!((rip_constant_exact(&phi, 1).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn sampled_bound_never_exceeds_exact() {
        for seed in 0..5 {
            let phi = gen_gaussian_matrix(8, 12, seed, false).unwrap();
            for t in 1..=4 {
                let exact = rip_constant_exact(&phi, t).unwrap();
                let lb = rip_constant_lower_bound(&phi, t, 20, seed).unwrap();
                assert!(lb <= exact + 1e-15);
                assert_eq!(lb, rip_constant_lower_bound(&phi, t, 20, seed).unwrap());
            }
        }
    }

    #[test]
    fn exact_is_invariant_under_permutation_and_sign_flips() {
        let phi = gen_gaussian_matrix(7, 10, 8, false).unwrap();
        let perm = [3, 9, 0, 5, 1, 8, 2, 7, 4, 6];
        let flipped = DenseMatrix::from_fn(7, 10, |i, j| {
            let s = if j % 3 == 0 { -1.0 } else { 1.0 };
            s * phi.get(i, perm[j])
        });
        let other = MeasurementMatrix::from_matrix(flipped);
        for t in 1..=3 {
            let a = rip_constant_exact(&phi, t).unwrap();
            let b = rip_constant_exact(&other, t).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let phi = gen_gaussian_matrix(10, 18, 2, false).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| rip_constant_exact(&phi, 4).unwrap());
        let b = four.install(|| rip_constant_exact(&phi, 4).unwrap());
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn budget_is_enforced() {
        let phi = gen_gaussian_matrix(100, 256, 1, false).unwrap();
        assert!(matches!(
            rip_constant_exact(&phi, 4),
            Err(Error::BudgetExceeded { subsets: 174_792_640, .. })
        ));
        assert!(rip_constant_exact(&phi, 0).is_err());
    }

    #[test]
    fn theorem1_thresholds() {
        assert!(check_theorem1(0.30, 4));
        assert!(!check_theorem1(1.0 / 3.0, 4));
        assert!(check_theorem1(0.49, 1));
        assert!(!check_theorem1(0.5, 1));
    }

    struct Const(f64, usize);
    impl DeltaOracle for Const {
        fn delta(&self, order: usize) -> Option<f64> {
            (order <= self.1).then_some(self.0)
        }
    }

    struct PowerLaw;
    impl DeltaOracle for PowerLaw {
        fn delta(&self, order: usize) -> Option<f64> {
            Some(0.00015 * (order as f64).powf(0.3))
        }
    }

    #[test]
    fn theorem3_examples() {
        assert!(check_theorem3(&Const(0.0, 1000), 7, 3).unwrap());
        // K = 2 uses order T + 2 for every t; the binding step is t = 1.
        let t = 8;
        let bound = 1.0 / (1.0 + (t as f64 / 2.0).sqrt());
        assert!(check_theorem3(&Const(bound - 1e-9, 100), t, 2).unwrap());
        assert!(!check_theorem3(&Const(bound, 100), t, 2).unwrap());
        assert!(matches!(
            check_theorem3(&Const(0.0, 5), 8, 2),
            Err(Error::OrderOutOfRange { .. })
        ));

        // Direct evaluation of all 100 inequalities for the power-law model.
        let mut expected = 0.00015 * 200f64.powf(0.3) < 1.0;
        for step in 1..=100usize {
            let d = 0.00015 * 102f64.powf(0.3);
            expected &= d < 1.0 / (1.0 + ((101 - step) as f64 / 2.0).sqrt());
        }
        assert!(expected);
        assert_eq!(check_theorem3(&PowerLaw, 100, 2).unwrap(), expected);
    }

    #[test]
    fn growth_law_checks() {
        let phi = MeasurementMatrix::from_matrix(DenseMatrix::identity(5));
        let report = rip_report_exact(&phi, &[1, 2, 3, 4], DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(verify_growth_law(&report));

        for seed in 0..3 {
            let phi = gen_gaussian_matrix(8, 12, seed, false).unwrap();
            let report = rip_report_exact(&phi, &[1, 2, 3, 4], DEFAULT_ENUMERATION_BUDGET).unwrap();
            assert!(verify_growth_law(&report));
        }

        let fake = RipReport {
            orders: vec![2, 3],
            deltas: vec![0.3, 0.2],
            method: RipMethod::ExactEnumeration,
            subsets_evaluated: vec![1, 1],
            seed: None,
        };
        assert!(!verify_growth_law(&fake));
        let no_two = RipReport { orders: vec![3], deltas: vec![0.1], subsets_evaluated: vec![1], ..fake };
        assert!(!verify_growth_law(&no_two));
    }
}
