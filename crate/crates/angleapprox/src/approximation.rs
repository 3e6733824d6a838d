//! Best angular approximation and the two-sided estimate functionals.
//!
//! The best approximation by angle `Y_l̄(f)_{p,τ}` is the infimum of
//! `‖f − Σ_j T_j‖` over polynomials `T_j` band-limited to `l_j` in variable
//! `j` only. Three estimators are provided:
//!
//! - [`angle_surrogate`]: `‖f − U_l̄(f)‖_{p,τ}`, a two-sided proxy (`Y ≤`
//!   surrogate, and the surrogate is bounded by a constant multiple of `Y`);
//! - [`best_angle_l2`]: the exact value at `p = τ = 2`, where the infimum is
//!   the orthogonal projection and `Y` equals the far-region coefficient
//!   tail;
//! - [`best_angle_optimize`]: descent on the component coefficients from the
//!   `U`-decomposition, for general `(p, τ)`.
//!
//! On top of these sit the "compute both sides" functionals: Bernstein
//! ratios, the realization identity, and the direct/inverse estimates with
//! the sharp `β = min{2, τ}` aggregate.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::lorentz::{self, LorentzIndex, SamplingConfig};
use crate::smoothness::{
    self, safe_ratio, FractionalOrder, ModulusConfig, ModulusSearchConfig,
};
use crate::spectrum::{self, AxisSubset, SpectralFunction};

/// One experiment row for a two-sided estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub function_id: String,
    pub n: Vec<i64>,
    pub alpha: Vec<f64>,
    pub p: f64,
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs/rhs`, with `0/0 = 1` and `x/0 = +∞`.
    pub ratio: f64,
}

impl RatioReport {
    fn new(
        function_id: &str,
        n: &[i64],
        alpha: &[f64],
        idx: &LorentzIndex,
        lhs: f64,
        rhs: f64,
    ) -> Self {
        RatioReport {
            function_id: function_id.to_string(),
            n: n.to_vec(),
            alpha: alpha.to_vec(),
            p: idx.p(),
            tau: idx.tau(),
            lhs,
            rhs,
            ratio: safe_ratio(lhs, rhs),
        }
    }
}

/// Cached evaluator for `‖f − U_l̄(f)‖_{p,τ}` over many cutoff vectors.
///
/// The residual is determined by its surviving coefficient set, so norms are
/// memoized on that set; sweeps over dense cutoff schedules collapse to the
/// few distinct supports.
pub struct AngleEvaluator<'a> {
    f: &'a SpectralFunction,
    idx: LorentzIndex,
    sampling: SamplingConfig,
    cache: HashMap<Vec<Vec<i64>>, f64>,
}

impl<'a> AngleEvaluator<'a> {
    pub fn new(f: &'a SpectralFunction, idx: LorentzIndex, sampling: SamplingConfig) -> Self {
        AngleEvaluator {
            f,
            idx,
            sampling,
            cache: HashMap::new(),
        }
    }

    pub fn function(&self) -> &SpectralFunction {
        self.f
    }

    pub fn index(&self) -> &LorentzIndex {
        &self.idx
    }

    pub fn sampling(&self) -> &SamplingConfig {
        &self.sampling
    }

    /// `‖f − U_l̄(f)‖_{p,τ}` (the residual keeps exactly the frequencies
    /// with `|k_j| > l_j` on every axis).
    pub fn surrogate(&mut self, cutoffs: &[i64]) -> Result<f64> {
        let residual = spectrum::far_residual(self.f, cutoffs)?;
        let key: Vec<Vec<i64>> = residual.iter().map(|(k, _)| k.to_vec()).collect();
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let v = lorentz::norm(&residual, &self.idx, &self.sampling)?;
        self.cache.insert(key, v);
        Ok(v)
    }
}

/// One-shot `‖f − U_l̄(f)‖_{p,τ}`.
pub fn angle_surrogate(
    f: &SpectralFunction,
    cutoffs: &[i64],
    idx: &LorentzIndex,
    sampling: &SamplingConfig,
) -> Result<f64> {
    let residual = spectrum::far_residual(f, cutoffs)?;
    lorentz::norm(&residual, idx, sampling)
}

/// Exact best angular approximation in `L²`: the far-region coefficient
/// tail `(Σ_{|k_j|>l_j ∀j} |a_k|²)^{1/2}` (orthogonal projection).
pub fn best_angle_l2(f: &SpectralFunction, cutoffs: &[i64]) -> Result<f64> {
    Ok(spectrum::far_residual(f, cutoffs)?.l2_norm())
}

/// Descent configuration for [`best_angle_optimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeConfig {
    pub max_iters: usize,
    /// Base step of the `step0/√(t+1)` schedule, relative to `‖f‖₂`.
    pub step0: f64,
    /// Central-difference probe width.
    pub fd_eps: f64,
    /// Stop after this many iterations without improving the best value.
    pub patience: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            max_iters: 500,
            step0: 0.1,
            fd_eps: 1e-5,
            patience: 40,
        }
    }
}

/// Outcome of the coefficient descent.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    /// Smallest objective value observed (never above the initial value).
    pub best: f64,
    pub iterations: usize,
    /// Best-so-far value after each iteration, starting with the initial
    /// objective.
    pub history: Vec<f64>,
}

/// Bundle of the angular approximation estimators for one `(f, l̄)`.
#[derive(Debug, Clone)]
pub struct AngleApproxResult {
    pub surrogate: f64,
    /// Exact value when `p = τ = 2`.
    pub exact_l2: Option<f64>,
    pub optimized: Option<OptimizeOutcome>,
}

struct ComponentVars {
    /// (component axis, frequency index) per complex variable.
    keys: Vec<(usize, Vec<i64>)>,
    /// Interleaved re/im values.
    x: Vec<f64>,
}

impl ComponentVars {
    fn assemble(&self, dim: usize) -> SpectralFunction {
        let entries = self
            .keys
            .iter()
            .enumerate()
            .map(|(i, (_, k))| {
                (
                    k.clone(),
                    Complex64::new(self.x[2 * i], self.x[2 * i + 1]),
                )
            })
            .collect::<Vec<_>>();
        // duplicate indices across components accumulate, matching Σ_j T_j
        SpectralFunction::new(dim, entries).expect("component supports avoid zero coordinates")
    }
}

fn enumerate_box(band: &[i64]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut k = vec![0i64; band.len()];
    fn rec(out: &mut Vec<Vec<i64>>, k: &mut Vec<i64>, axis: usize, band: &[i64]) {
        if axis == band.len() {
            out.push(k.clone());
            return;
        }
        for v in -band[axis]..=band[axis] {
            if v == 0 {
                continue;
            }
            k[axis] = v;
            rec(out, k, axis + 1, band);
        }
    }
    rec(&mut out, &mut k, 0, band);
    out
}

/// Minimize `‖f − Σ_j T_j‖_{p,τ}` over the coefficients of the `m`
/// components (component `j` confined to `|k_j| ≤ l_j` and to the band of
/// `f` on the other axes).
///
/// The start point is the `U_l̄` decomposition — each surviving frequency of
/// `U_l̄(f)` is assigned to the first axis whose cutoff it satisfies — so
/// the initial objective is exactly the surrogate value, and the returned
/// best-so-far can only improve on it. The subgradient is estimated by
/// central finite differences over the active coefficients.
pub fn best_angle_optimize(
    f: &SpectralFunction,
    cutoffs: &[i64],
    idx: &LorentzIndex,
    sampling: &SamplingConfig,
    cfg: &OptimizeConfig,
) -> Result<OptimizeOutcome> {
    if cutoffs.len() != f.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: f.dim(),
            got: cutoffs.len(),
        });
    }
    if cfg.max_iters == 0 {
        return Err(CoreError::InvalidParameter("max_iters must be >= 1".into()));
    }
    let dim = f.dim();
    let dims = sampling.grid_dims(f.band());

    // variable layout: for each axis j, the support box of component j
    let mut keys: Vec<(usize, Vec<i64>)> = Vec::new();
    for j in 0..dim {
        let mut support_band: Vec<i64> = f.band().to_vec();
        support_band[j] = support_band[j].min(cutoffs[j].max(0));
        if support_band.iter().any(|&b| b == 0) {
            continue;
        }
        for k in enumerate_box(&support_band) {
            keys.push((j, k));
        }
    }
    let mut vars = ComponentVars {
        x: vec![0.0; 2 * keys.len()],
        keys,
    };

    // initialize at the U-decomposition: assign each kept frequency to the
    // first admissible axis
    let u = spectrum::angular_sum(f, cutoffs)?;
    let mut slot: HashMap<(usize, Vec<i64>), usize> = HashMap::new();
    for (i, (j, k)) in vars.keys.iter().enumerate() {
        slot.insert((*j, k.clone()), i);
    }
    for (k, a) in u.iter() {
        let axis = (0..dim)
            .find(|&j| k[j].abs() <= cutoffs[j])
            .expect("every kept frequency satisfies some cutoff");
        let i = slot[&(axis, k.to_vec())];
        vars.x[2 * i] = a.re;
        vars.x[2 * i + 1] = a.im;
    }

    let objective = |vars: &ComponentVars| -> Result<f64> {
        let sum = vars.assemble(dim);
        let residual = f.sub(&sum)?;
        let g = spectrum::evaluate(&residual, &dims)?;
        Ok(lorentz::lorentz_norm(&lorentz::rearrange(&g), idx))
    };

    let mut best = objective(&vars)?;
    let mut history = vec![best];
    let scale = f.l2_norm().max(1e-12);
    let mut since_improvement = 0usize;
    let mut iterations = 0usize;
    let nvar = vars.x.len();

    for iter in 0..cfg.max_iters {
        iterations = iter + 1;
        let mut grad = vec![0.0; nvar];
        let eps = cfg.fd_eps * scale;
        for i in 0..nvar {
            let x0 = vars.x[i];
            vars.x[i] = x0 + eps;
            let up = objective(&vars)?;
            vars.x[i] = x0 - eps;
            let down = objective(&vars)?;
            vars.x[i] = x0;
            grad[i] = (up - down) / (2.0 * eps);
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-12 {
            break;
        }
        let step = cfg.step0 * scale / ((iter + 1) as f64).sqrt();
        for i in 0..nvar {
            vars.x[i] -= step * grad[i] / gnorm;
        }
        let v = objective(&vars)?;
        if v < best {
            best = v;
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        history.push(best);
        if since_improvement >= cfg.patience {
            break;
        }
    }
    Ok(OptimizeOutcome {
        best,
        iterations,
        history,
    })
}

/// All three estimators for one `(f, l̄, p, τ)`.
pub fn angle_report(
    f: &SpectralFunction,
    cutoffs: &[i64],
    idx: &LorentzIndex,
    sampling: &SamplingConfig,
    optimize: Option<&OptimizeConfig>,
) -> Result<AngleApproxResult> {
    let surrogate = angle_surrogate(f, cutoffs, idx, sampling)?;
    let exact_l2 = if idx.p() == 2.0 && idx.tau() == 2.0 {
        Some(best_angle_l2(f, cutoffs)?)
    } else {
        None
    };
    let optimized = match optimize {
        Some(cfg) => Some(best_angle_optimize(f, cutoffs, idx, sampling, cfg)?),
        None => None,
    };
    Ok(AngleApproxResult {
        surrogate,
        exact_l2,
        optimized,
    })
}

/// Bernstein ratio: `lhs = ‖f^{(ᾱ)}‖`, `rhs = Π(n_j+1)^{α_j}·‖f‖` with `n̄`
/// the band of `f`; integer orders only.
pub fn bernstein_check(
    f: &SpectralFunction,
    order: &FractionalOrder,
    idx: &LorentzIndex,
    sampling: &SamplingConfig,
    function_id: &str,
) -> Result<RatioReport> {
    if !order.is_integer() {
        return Err(CoreError::InvalidParameter(
            "Bernstein check takes integer orders".into(),
        ));
    }
    let n = f.band().to_vec();
    let lhs = lorentz::norm(&spectrum::frac_derivative(f, order)?, idx, sampling)?;
    let factor: f64 = n
        .iter()
        .zip(order.alphas())
        .map(|(&nj, &a)| ((nj + 1) as f64).powf(a))
        .product();
    let rhs = factor * lorentz::norm(f, idx, sampling)?;
    Ok(RatioReport::new(
        function_id,
        &n,
        order.alphas(),
        idx,
        lhs,
        rhs,
    ))
}

fn check_cutoffs(f: &SpectralFunction, n: &[i64]) -> Result<()> {
    if n.len() != f.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: f.dim(),
            got: n.len(),
        });
    }
    if n.iter().any(|&nj| nj < 1) {
        return Err(CoreError::InvalidParameter(format!(
            "orders n̄ must be >= 1, got {:?}",
            n
        )));
    }
    Ok(())
}

/// The named terms of the realization right-hand side: the `U`-residual norm
/// and one weighted derivative norm per nonempty axis subset.
pub fn realization_rhs_breakdown(
    f: &SpectralFunction,
    n: &[i64],
    order: &FractionalOrder,
    idx: &LorentzIndex,
    sampling: &SamplingConfig,
) -> Result<Vec<(String, f64)>> {
    check_cutoffs(f, n)?;
    let mut terms = Vec::new();
    let residual = lorentz::norm(&spectrum::far_residual(f, n)?, idx, sampling)?;
    terms.push(("residual".to_string(), residual));
    for e in AxisSubset::nonempty_subsets(f.dim()) {
        let complement = e.complement();
        // S_{∞, n̄^ê} with ê = ∅ is the zero operator here, making the full
        // subset contribute the plain derivative term
        let inner = if complement.is_empty() {
            f.clone()
        } else {
            f.sub(&spectrum::partial_sum(f, n, &complement)?)?
        };
        let projected = spectrum::partial_sum(&inner, n, &e)?;
        let derived = spectrum::frac_derivative(&projected, &order.restricted_to(&e))?;
        let weight: f64 = e
            .iter()
            .map(|j| (n[j] as f64).powf(-order.alphas()[j]))
            .product();
        let value = weight * lorentz::norm(&derived, idx, sampling)?;
        terms.push((format!("S{}", e), value));
    }
    Ok(terms)
}

/// Realization identity sides: `lhs = ω_ᾱ(f, π/n̄)`, `rhs` the residual plus
/// weighted projected-derivative sum.
pub fn realization_sides(
    f: &SpectralFunction,
    n: &[i64],
    order: &FractionalOrder,
    idx: &LorentzIndex,
    cfg: &ModulusConfig,
    function_id: &str,
) -> Result<RatioReport> {
    check_cutoffs(f, n)?;
    let steps: Vec<f64> = n.iter().map(|&nj| std::f64::consts::PI / nj as f64).collect();
    let lhs = smoothness::modulus(f, order, &steps, idx, cfg)?.value;
    let rhs = realization_rhs_breakdown(f, n, order, idx, &cfg.sampling)?
        .iter()
        .map(|(_, v)| v)
        .sum();
    Ok(RatioReport::new(
        function_id,
        n,
        order.alphas(),
        idx,
        lhs,
        rhs,
    ))
}

/// Direct estimate sides: `lhs = ‖f − U_n̄(f)‖` (standing in for `Y_n̄`),
/// `rhs = ω_ᾱ(f, 1/(n̄+1))`.
pub fn direct_theorem_sides(
    ev: &mut AngleEvaluator<'_>,
    n: &[i64],
    order: &FractionalOrder,
    search: &ModulusSearchConfig,
    function_id: &str,
) -> Result<RatioReport> {
    let f = ev.f;
    check_cutoffs(f, n)?;
    let lhs = ev.surrogate(n)?;
    let steps: Vec<f64> = n.iter().map(|&nj| 1.0 / (nj + 1) as f64).collect();
    let cfg = ModulusConfig {
        search: *search,
        sampling: ev.sampling,
    };
    let idx = ev.idx;
    let rhs = smoothness::modulus(f, order, &steps, &idx, &cfg)?.value;
    Ok(RatioReport::new(
        function_id,
        n,
        order.alphas(),
        &idx,
        lhs,
        rhs,
    ))
}

/// Which inverse estimate to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseVariant {
    /// `ω(f, 1/(n̄+1)) ≪ Πn_j^{−α_j} Σ_ν̄ Πν_j^{α_j−1} Y_ν̄`.
    Natural,
    /// `ω(f, π/n̄) ≪ Πn_j^{−α_j} (Σ_ν̄ Πν_j^{βα_j−1} Y_ν̄^β)^{1/β}`,
    /// `β = min{2, τ}`.
    Sharp,
}

/// `β = min{2, τ}` of the sharp inverse estimate.
pub fn sharp_beta(idx: &LorentzIndex) -> f64 {
    idx.tau().min(2.0)
}

/// Parameter domain of the sharp inverse estimate:
/// `(1 < p < ∞, 1 < τ ≤ 2)` or `(2 < p < ∞, 2 < τ < ∞)`.
pub fn sharp_domain_ok(idx: &LorentzIndex) -> bool {
    let (p, tau) = (idx.p(), idx.tau());
    (tau > 1.0 && tau <= 2.0) || (p > 2.0 && tau > 2.0)
}

/// Weighted `Y`-aggregate over `ν̄ ∈ Π[1, n_j+1]`: exponent `weight_pow` on
/// `ν_j` is `βα_j − 1`, outer power `1/β`; `β = 1` gives the plain sum.
fn y_aggregate(
    ev: &mut AngleEvaluator<'_>,
    n: &[i64],
    order: &FractionalOrder,
    beta: f64,
) -> Result<f64> {
    let dim = n.len();
    let mut nu = vec![1i64; dim];
    let mut sum = 0.0;
    loop {
        let y = ev.surrogate(&nu)?;
        if y > 0.0 {
            let weight: f64 = nu
                .iter()
                .zip(order.alphas())
                .map(|(&v, &a)| (v as f64).powf(beta * a - 1.0))
                .product();
            sum += weight * y.powf(beta);
        }
        let mut j = 0;
        loop {
            if j == dim {
                let prefactor: f64 = n
                    .iter()
                    .zip(order.alphas())
                    .map(|(&nj, &a)| (nj as f64).powf(-a))
                    .product();
                return Ok(prefactor * sum.powf(1.0 / beta));
            }
            nu[j] += 1;
            if nu[j] <= n[j] + 1 {
                break;
            }
            nu[j] = 1;
            j += 1;
        }
    }
}

/// Inverse estimate sides in either variant. The sharp variant is rejected
/// outside its `(p, τ)` domain.
pub fn inverse_theorem_sides(
    ev: &mut AngleEvaluator<'_>,
    n: &[i64],
    order: &FractionalOrder,
    variant: InverseVariant,
    search: &ModulusSearchConfig,
    function_id: &str,
) -> Result<RatioReport> {
    let f = ev.f;
    check_cutoffs(f, n)?;
    let idx = ev.idx;
    let cfg = ModulusConfig {
        search: *search,
        sampling: ev.sampling,
    };
    let (lhs, rhs) = match variant {
        InverseVariant::Natural => {
            let steps: Vec<f64> = n.iter().map(|&nj| 1.0 / (nj + 1) as f64).collect();
            let lhs = smoothness::modulus(f, order, &steps, &idx, &cfg)?.value;
            let rhs = y_aggregate(ev, n, order, 1.0)?;
            (lhs, rhs)
        }
        InverseVariant::Sharp => {
            if !sharp_domain_ok(&idx) {
                return Err(CoreError::OutsideDomain {
                    what: "the sharp inverse estimate",
                    p: idx.p(),
                    tau: idx.tau(),
                });
            }
            let steps: Vec<f64> =
                n.iter().map(|&nj| std::f64::consts::PI / nj as f64).collect();
            let lhs = smoothness::modulus(f, order, &steps, &idx, &cfg)?.value;
            let rhs = y_aggregate(ev, n, order, sharp_beta(&idx))?;
            (lhs, rhs)
        }
    };
    Ok(RatioReport::new(
        function_id,
        n,
        order.alphas(),
        &idx,
        lhs,
        rhs,
    ))
}

/// Right-hand sides of both inverse variants on the same data, for
/// demonstrating the sharp aggregate's improvement (`sharp ≤ natural` up to
/// a constant when `τ ≤ 2`).
pub fn inverse_rhs_pair(
    ev: &mut AngleEvaluator<'_>,
    n: &[i64],
    order: &FractionalOrder,
) -> Result<(f64, f64)> {
    check_cutoffs(ev.f, n)?;
    let beta = sharp_beta(&ev.idx);
    let sharp = y_aggregate(ev, n, order, beta)?;
    let natural = y_aggregate(ev, n, order, 1.0)?;
    Ok((sharp, natural))
}
