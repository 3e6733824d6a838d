//! Lorentz functional `‖f‖_{p,τ}` via non-increasing rearrangement.
//!
//! Grid samples carry equal mass `1/M` of the unit cube, so the empirical
//! rearrangement is a step function and the defining integral
//! `(∫₀¹ (f*(t))^τ t^{τ/p−1} dt)^{1/τ}` has the closed form
//!
//! ```text
//! ( Σ_i v_i^τ · (p/τ) · [((i+1)/M)^{τ/p} − (i/M)^{τ/p}] )^{1/τ}
//! ```
//!
//! which is exact for the step function; the only approximation error is the
//! sampling of the function itself. `τ = p` collapses the weights to `1/M`
//! and recovers the discrete Lebesgue mean, so the `L_p` norm is the special
//! case rather than a separate code path.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{CoreError, Result};
use crate::spectrum::{self, GridSample, SpectralFunction};

/// The pair `(p, τ)` selecting the space `L_{p,τ}`, `1 < p < ∞`,
/// `1 ≤ τ < ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzIndex {
    p: f64,
    tau: f64,
}

impl LorentzIndex {
    pub fn new(p: f64, tau: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite() && tau >= 1.0 && tau.is_finite()) {
            return Err(CoreError::InvalidLorentzIndex { p, tau });
        }
        Ok(LorentzIndex { p, tau })
    }

    /// `L²` shorthand, used by oracles throughout.
    pub fn l2() -> Self {
        LorentzIndex { p: 2.0, tau: 2.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Grid resolution policy for norm evaluation: per axis
/// `N_j = max(ceil(oversample · (2·band_j + 1)), min_points)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    pub oversample: f64,
    pub min_points: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            oversample: 4.0,
            min_points: 64,
        }
    }
}

impl SamplingConfig {
    pub fn new(oversample: f64, min_points: usize) -> Result<Self> {
        if !(oversample >= 1.0) || min_points == 0 {
            return Err(CoreError::InvalidParameter(format!(
                "oversample {} must be >= 1 and min_points {} positive",
                oversample, min_points
            )));
        }
        Ok(SamplingConfig {
            oversample,
            min_points,
        })
    }

    /// Alias-free grid dimensions for a function of the given band.
    pub fn grid_dims(&self, band: &[i64]) -> Vec<usize> {
        band.iter()
            .map(|&b| {
                let need = (self.oversample * (2 * b + 1) as f64).ceil() as usize;
                need.max(self.min_points)
            })
            .collect()
    }
}

/// Non-increasing sequence of absolute sample values, each owning mass `1/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    values: Vec<f64>,
}

impl Rearrangement {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Sort `|g|` non-increasingly. Values below `1e-300` are clamped to zero
/// before any powering to avoid underflow artifacts.
pub fn rearrange(g: &GridSample) -> Rearrangement {
    let mut values = g.abs_values();
    for v in &mut values {
        if *v < 1e-300 {
            *v = 0.0;
        }
    }
    values.sort_unstable_by(|a, b| b.total_cmp(a));
    Rearrangement { values }
}

thread_local! {
    // Step-integral weights keyed by (M, bits of τ/p); shared across the many
    // same-shaped evaluations of a search.
    static WEIGHTS: RefCell<HashMap<(usize, u64), Rc<Vec<f64>>>> = RefCell::new(HashMap::new());
}

fn step_weights(m: usize, c: f64) -> Rc<Vec<f64>> {
    WEIGHTS.with(|cache| {
        cache
            .borrow_mut()
            .entry((m, c.to_bits()))
            .or_insert_with(|| {
                let mut w = Vec::with_capacity(m);
                let mf = m as f64;
                let mut prev = 0.0;
                for i in 0..m {
                    let cur = (((i + 1) as f64) / mf).powf(c);
                    w.push(cur - prev);
                    prev = cur;
                }
                Rc::new(w)
            })
            .clone()
    })
}

/// Exact step-function integral of the rearrangement.
pub fn lorentz_norm(r: &Rearrangement, idx: &LorentzIndex) -> f64 {
    if r.values.is_empty() {
        return 0.0;
    }
    let tau = idx.tau;
    let c = tau / idx.p;
    let weights = step_weights(r.values.len(), c);
    let mut sum = 0.0;
    if tau == 2.0 {
        for (v, w) in r.values.iter().zip(weights.iter()) {
            sum += v * v * w;
        }
    } else if tau == 1.0 {
        for (v, w) in r.values.iter().zip(weights.iter()) {
            sum += v * w;
        }
    } else {
        for (v, w) in r.values.iter().zip(weights.iter()) {
            if *v > 0.0 {
                sum += v.powf(tau) * w;
            }
        }
    }
    ((idx.p / tau) * sum).powf(1.0 / tau)
}

/// `‖f‖_{p,τ}` through the sampling pipeline: synthesize on an alias-free
/// grid, rearrange, integrate.
pub fn norm(f: &SpectralFunction, idx: &LorentzIndex, sampling: &SamplingConfig) -> Result<f64> {
    let dims = sampling.grid_dims(f.band());
    let g = spectrum::evaluate(f, &dims)?;
    Ok(lorentz_norm(&rearrange(&g), idx))
}

/// A norm value together with its grid-doubling refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormConvergence {
    /// Value at the configured resolution.
    pub value: f64,
    /// Value with every axis doubled.
    pub refined: f64,
}

impl NormConvergence {
    /// Convergence estimate `|refined − value|`.
    pub fn delta(&self) -> f64 {
        (self.refined - self.value).abs()
    }
}

/// Norm plus the change under doubling all grid axes.
pub fn norm_with_convergence(
    f: &SpectralFunction,
    idx: &LorentzIndex,
    sampling: &SamplingConfig,
) -> Result<NormConvergence> {
    let dims = sampling.grid_dims(f.band());
    let value = lorentz_norm(&rearrange(&spectrum::evaluate(f, &dims)?), idx);
    let doubled: Vec<usize> = dims.iter().map(|&n| 2 * n).collect();
    let refined = lorentz_norm(&rearrange(&spectrum::evaluate(f, &doubled)?), idx);
    Ok(NormConvergence { value, refined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn rearrange_sorts_absolute_values() {
        let g = GridSample::from_real(vec![4], vec![1.0, -3.0, 2.0, 0.0]).unwrap();
        assert_eq!(rearrange(&g).values(), &[3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn rearrange_constant() {
        let g = GridSample::from_real(vec![2, 3], vec![-2.5; 6]).unwrap();
        assert!(rearrange(&g).values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn constant_one_norm_closed_form() {
        for &(p, tau) in &[(2.0, 2.0), (2.5, 1.5), (4.0, 3.0), (1.5, 1.0)] {
            let idx = LorentzIndex::new(p, tau).unwrap();
            let g = GridSample::from_real(vec![4096], vec![1.0; 4096]).unwrap();
            let got = lorentz_norm(&rearrange(&g), &idx);
            assert_abs_diff_eq!(got, (p / tau).powf(1.0 / tau), epsilon = 1e-12);
        }
    }

    #[test]
    fn indicator_norm_closed_form() {
        let m = 4096;
        for &(p, tau) in &[(2.0, 2.0), (3.0, 1.5)] {
            for &mu in &[0.25, 0.5] {
                let idx = LorentzIndex::new(p, tau).unwrap();
                let ones = (mu * m as f64).round() as usize;
                let mut values = vec![0.0; m];
                values[..ones].fill(1.0);
                let g = GridSample::from_real(vec![m], values).unwrap();
                let got = lorentz_norm(&rearrange(&g), &idx);
                let expect = (p / tau).powf(1.0 / tau) * mu.powf(1.0 / p);
                assert_abs_diff_eq!(got, expect, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn lebesgue_case_matches_classical_cosine_integral() {
        // ‖cos‖₂ = 1/√2 on a fine grid
        let f = SpectralFunction::cosine_product(&[1]).unwrap();
        let g = spectrum::evaluate(&f, &[1 << 14]).unwrap();
        let got = lorentz_norm(&rearrange(&g), &LorentzIndex::l2());
        assert_abs_diff_eq!(got, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-6);
    }

    #[test]
    fn tau_equals_p_reduces_to_discrete_mean() {
        let values = vec![0.3, 1.7, 0.0, 2.4, 0.9, 1.1, 0.05, 3.2];
        for &p in &[1.5, 2.0, 2.7, 4.0] {
            let idx = LorentzIndex::new(p, p).unwrap();
            let g = GridSample::from_real(vec![values.len()], values.clone()).unwrap();
            let got = lorentz_norm(&rearrange(&g), &idx);
            let mean = (values.iter().map(|v| v.abs().powf(p)).sum::<f64>()
                / values.len() as f64)
                .powf(1.0 / p);
            assert_abs_diff_eq!(got, mean, epsilon = 1e-12);
        }
    }

    #[test]
    fn norm_zero_function() {
        let idx = LorentzIndex::new(2.5, 1.5).unwrap();
        let got = norm(
            &SpectralFunction::zero(2),
            &idx,
            &SamplingConfig::default(),
        )
        .unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn norm_matches_parseval_at_l2() {
        let f = SpectralFunction::new(
            2,
            vec![
                (vec![1, 1], Complex64::new(0.7, 0.1)),
                (vec![-3, 2], Complex64::new(-0.2, 0.4)),
                (vec![5, -6], Complex64::new(0.05, 0.0)),
            ],
        )
        .unwrap();
        let got = norm(&f, &LorentzIndex::l2(), &SamplingConfig::default()).unwrap();
        assert_abs_diff_eq!(got, f.l2_norm(), epsilon = 1e-6);
    }

    #[test]
    fn norm_of_cosine_product() {
        // ‖cos x cos y‖₂ = 1/2
        let f = SpectralFunction::cosine_product(&[1, 1]).unwrap();
        let got = norm(&f, &LorentzIndex::l2(), &SamplingConfig::default()).unwrap();
        assert_abs_diff_eq!(got, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn scaling_is_exact() {
        let values = vec![0.2, 1.4, 0.8, 2.2];
        let idx = LorentzIndex::new(3.0, 2.0).unwrap();
        let g = GridSample::from_real(vec![4], values.clone()).unwrap();
        let scaled =
            GridSample::from_real(vec![4], values.iter().map(|v| v * 3.5).collect()).unwrap();
        let a = lorentz_norm(&rearrange(&g), &idx);
        let b = lorentz_norm(&rearrange(&scaled), &idx);
        assert_abs_diff_eq!(b, 3.5 * a, epsilon = 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn monotone_in_pointwise_domination() {
        let idx = LorentzIndex::new(2.5, 1.2).unwrap();
        let v = vec![0.1, 0.5, 0.9, 0.3];
        let w: Vec<f64> = v.iter().map(|x| x + 0.2).collect();
        let gv = GridSample::from_real(vec![4], v).unwrap();
        let gw = GridSample::from_real(vec![4], w).unwrap();
        assert!(lorentz_norm(&rearrange(&gv), &idx) <= lorentz_norm(&rearrange(&gw), &idx));
    }

    #[test]
    fn genuine_norm_regime_triangle_inequality() {
        // τ ≤ p: the functional is an actual norm, K = 1
        let f = SpectralFunction::new(
            2,
            vec![
                (vec![1, 2], Complex64::new(0.5, 0.2)),
                (vec![-2, 1], Complex64::new(0.3, -0.1)),
            ],
        )
        .unwrap();
        let g = SpectralFunction::new(
            2,
            vec![
                (vec![1, 2], Complex64::new(-0.1, 0.6)),
                (vec![4, -3], Complex64::new(0.8, 0.0)),
            ],
        )
        .unwrap();
        let sampling = SamplingConfig::default();
        for &(p, tau) in &[(2.0, 2.0), (2.5, 1.5), (3.0, 3.0)] {
            let idx = LorentzIndex::new(p, tau).unwrap();
            let nf = norm(&f, &idx, &sampling).unwrap();
            let ng = norm(&g, &idx, &sampling).unwrap();
            let nfg = norm(&f.add(&g).unwrap(), &idx, &sampling).unwrap();
            assert!(nfg <= (nf + ng) * (1.0 + 1e-9), "{} > {} + {}", nfg, nf, ng);
        }
    }

    #[test]
    fn translation_invariance_within_convergence_estimate() {
        let f = SpectralFunction::new(
            2,
            vec![
                (vec![1, 1], Complex64::new(0.9, 0.0)),
                (vec![2, -3], Complex64::new(0.0, 0.4)),
            ],
        )
        .unwrap();
        let shifted = spectrum::shift(&f, &[0.61, -1.37]).unwrap();
        let idx = LorentzIndex::new(2.5, 1.5).unwrap();
        let sampling = SamplingConfig::default();
        let a = norm_with_convergence(&f, &idx, &sampling).unwrap();
        let b = norm_with_convergence(&shifted, &idx, &sampling).unwrap();
        let budget = 10.0 * (a.delta() + b.delta()) + 1e-12;
        assert!(
            (a.value - b.value).abs() <= budget,
            "norms {} vs {} differ beyond convergence budget {}",
            a.value,
            b.value,
            budget
        );
    }
}
