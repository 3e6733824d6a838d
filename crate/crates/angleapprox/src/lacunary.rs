//! Lacunary cosine series with dyadic frequencies.
//!
//! The class consists of series `Σ_ν̄ λ_ν̄ Π_j cos(2^{ν_j} x_j)` with real
//! `λ_ν̄` indexed over `Z_+^m`. Each product of cosines expands into `2^m`
//! exponentials of weight `λ_ν̄/2^m` at the sign patterns of
//! `(2^{ν_1}, …, 2^{ν_m})`; distinct `ν̄` occupy disjoint frequency sets, so
//! the dyadic blocks of such a function are exactly its individual terms.
//! The coefficient-side functionals of the sharp-estimate theory are
//! evaluated here directly on the `λ` lattice.

use std::collections::BTreeMap;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::approximation::{best_angle_l2, AngleEvaluator};
use crate::error::{CoreError, Result};
use crate::lorentz::LorentzIndex;
use crate::smoothness::FractionalOrder;
use crate::spectrum::{AxisSubset, SpectralFunction};

/// Finite map `ν̄ ∈ Z_+^m → λ_ν̄` defining a lacunary series.
#[derive(Debug, Clone, PartialEq)]
pub struct LacunarySpec {
    dim: usize,
    lambda: BTreeMap<Vec<u32>, f64>,
}

impl LacunarySpec {
    /// Collect entries; zero weights are dropped, duplicate indices rejected.
    pub fn new<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut lambda = BTreeMap::new();
        for (nu, v) in entries {
            if nu.len() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    got: nu.len(),
                });
            }
            if v == 0.0 {
                continue;
            }
            if lambda.insert(nu.clone(), v).is_some() {
                return Err(CoreError::InvalidParameter(format!(
                    "duplicate lacunary index {:?}",
                    nu
                )));
            }
        }
        Ok(LacunarySpec { dim, lambda })
    }

    /// Geometric family `λ_ν̄ = Π_j 2^{−ν_j ρ_j}` over the box `ν_j ≤ v_j`.
    pub fn geometric(rho: &[f64], vmax: &[u32]) -> Result<Self> {
        if rho.len() != vmax.len() {
            return Err(CoreError::DimensionMismatch {
                expected: rho.len(),
                got: vmax.len(),
            });
        }
        let dim = rho.len();
        let mut entries = Vec::new();
        let mut nu = vec![0u32; dim];
        loop {
            let v: f64 = nu
                .iter()
                .zip(rho)
                .map(|(&nj, &rj)| 2f64.powf(-(nj as f64) * rj))
                .product();
            entries.push((nu.clone(), v));
            let mut j = 0;
            loop {
                if j == dim {
                    return Self::new(dim, entries);
                }
                nu[j] += 1;
                if nu[j] <= vmax[j] {
                    break;
                }
                nu[j] = 0;
                j += 1;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.lambda.iter().map(|(nu, &v)| (nu.as_slice(), v))
    }
}

/// Expand the series into its spectrum: weight `λ_ν̄ / 2^m` at each of the
/// `2^m` sign patterns of `(2^{ν_1}, …, 2^{ν_m})`.
pub fn build(spec: &LacunarySpec) -> Result<SpectralFunction> {
    let mut f = SpectralFunction::zero(spec.dim);
    for (nu, v) in spec.entries() {
        let freqs: Vec<i64> = nu.iter().map(|&nj| 1i64 << nj).collect();
        let term = SpectralFunction::cosine_product(&freqs)?.scale_real(v);
        f = f.add(&term)?;
    }
    // dyadic uniqueness: distinct ν̄ occupy distinct frequencies, so nothing
    // may merge or cancel
    assert_eq!(
        f.num_coeffs(),
        spec.lambda.len() << spec.dim,
        "lacunary frequency collision"
    );
    Ok(f)
}

/// `(Σ |λ_ν̄|²)^{1/2}`; at `p = τ = 2` this equals `2^{m/2}·‖f‖₂` exactly.
pub fn coeff_l2_functional(spec: &LacunarySpec) -> f64 {
    spec.lambda.values().map(|v| v * v).sum::<f64>().sqrt()
}

/// `(Σ |λ_ν̄|^τ)^{1/τ}`.
pub fn coeff_ltau_functional(spec: &LacunarySpec, tau: f64) -> f64 {
    spec.lambda
        .values()
        .map(|v| v.abs().powf(tau))
        .sum::<f64>()
        .powf(1.0 / tau)
}

fn check_lattice_args(spec: &LacunarySpec, n: &[u32], order: &FractionalOrder) -> Result<()> {
    if n.len() != spec.dim || order.dim() != spec.dim {
        return Err(CoreError::DimensionMismatch {
            expected: spec.dim,
            got: n.len().max(order.dim()),
        });
    }
    Ok(())
}

/// Coefficient-side bound of the lacunary modulus estimate: the three-part
/// sum over the `λ` lattice split by the regions `ν̄ ≤ n̄`, `G_n̄(e)` for
/// nonempty `e`, and `ν̄ > n̄`, with weights `2^{±ν_jα_j}` as in the proofs
/// (the inner exponent is positive; the one printed flip is a typo the
/// brute-force oracle confirms against).
pub fn thm32_rhs(spec: &LacunarySpec, n: &[u32], order: &FractionalOrder) -> Result<f64> {
    check_lattice_args(spec, n, order)?;
    let alphas = order.alphas();
    let lam2 = |v: f64| v * v;

    // Π_j 2^{−n_j α_j} (Σ_{ν̄ ≤ n̄} Π_j 2^{2 ν_j α_j} λ²)^{1/2}
    let outer_full: f64 = n
        .iter()
        .zip(alphas)
        .map(|(&nj, &a)| 2f64.powf(-(nj as f64) * a))
        .product();
    let mut inner_full = 0.0;
    for (nu, v) in spec.entries() {
        if nu.iter().zip(n).all(|(&vj, &nj)| vj <= nj) {
            let w: f64 = nu
                .iter()
                .zip(alphas)
                .map(|(&vj, &a)| 2f64.powf(2.0 * vj as f64 * a))
                .product();
            inner_full += w * lam2(v);
        }
    }
    let mut total = outer_full * inner_full.sqrt();

    // angle regions on the lattice, per nonempty subset
    for e in AxisSubset::nonempty_subsets(spec.dim) {
        let outer: f64 = e
            .iter()
            .map(|j| 2f64.powf(-(n[j] as f64) * alphas[j]))
            .product();
        let mut inner = 0.0;
        for (nu, v) in spec.entries() {
            let in_region = (0..spec.dim).all(|j| {
                if e.contains(j) {
                    nu[j] <= n[j]
                } else {
                    nu[j] > n[j]
                }
            });
            if in_region {
                let w: f64 = e
                    .iter()
                    .map(|j| 2f64.powf(2.0 * nu[j] as f64 * alphas[j]))
                    .product();
                inner += w * lam2(v);
            }
        }
        total += outer * inner.sqrt();
    }

    // far tail (Σ_{ν̄ > n̄} λ²)^{1/2}
    let mut tail = 0.0;
    for (nu, v) in spec.entries() {
        if nu.iter().zip(n).all(|(&vj, &nj)| vj > nj) {
            tail += lam2(v);
        }
    }
    total += tail.sqrt();
    Ok(total)
}

/// Parameter domain of the lacunary modulus equivalence:
/// `(1 < p ≤ 2, 1 < τ ≤ 2)` or `(2 < p < ∞, 1 < τ < ∞)`.
pub fn thm33_domain_ok(idx: &LorentzIndex) -> bool {
    let (p, tau) = (idx.p(), idx.tau());
    (p <= 2.0 && tau > 1.0 && tau <= 2.0) || (p > 2.0 && tau > 1.0)
}

fn i_functional<Y>(n: &[i64], order: &FractionalOrder, mut y: Y) -> Result<f64>
where
    Y: FnMut(&[i64]) -> Result<f64>,
{
    let dim = n.len();
    if n.iter().any(|&nj| nj < 1) {
        return Err(CoreError::InvalidParameter(format!(
            "orders n̄ must be >= 1, got {:?}",
            n
        )));
    }
    let mut nu = vec![1i64; dim];
    let mut sum = 0.0;
    loop {
        let cut: Vec<i64> = nu.iter().map(|&v| v - 1).collect();
        let yv = y(&cut)?;
        if yv > 0.0 {
            let w: f64 = nu
                .iter()
                .zip(order.alphas())
                .map(|(&v, &a)| (v as f64).powf(2.0 * a - 1.0))
                .product();
            sum += w * yv * yv;
        }
        let mut j = 0;
        loop {
            if j == dim {
                let prefactor: f64 = n
                    .iter()
                    .zip(order.alphas())
                    .map(|(&nj, &a)| (nj as f64).powf(-a))
                    .product();
                return Ok(prefactor * sum.sqrt());
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

/// The functional
/// `I_n̄(f) = Πn_j^{−α_j}(Σ_{ν̄=1}^{n̄+1} Πν_j^{2α_j−1} Y²_{ν̄−1}(f))^{1/2}`
/// with `Y` taken as the angular-sum surrogate; compared against
/// `ω_ᾱ(f, 1/n̄)` on its `(p, τ)` domain.
pub fn thm33_functional(
    ev: &mut AngleEvaluator<'_>,
    n: &[i64],
    order: &FractionalOrder,
) -> Result<f64> {
    if !thm33_domain_ok(ev.index()) {
        return Err(CoreError::OutsideDomain {
            what: "the lacunary modulus equivalence",
            p: ev.index().p(),
            tau: ev.index().tau(),
        });
    }
    if order.dim() != n.len() || ev.function().dim() != n.len() {
        return Err(CoreError::DimensionMismatch {
            expected: ev.function().dim(),
            got: n.len(),
        });
    }
    i_functional(n, order, |cut| ev.surrogate(cut))
}

/// Same functional with the exact `L²` best approximation in place of the
/// surrogate (the Parseval route; meaningful at `p = τ = 2`).
pub fn thm33_functional_parseval(
    f: &SpectralFunction,
    n: &[i64],
    order: &FractionalOrder,
) -> Result<f64> {
    if order.dim() != n.len() || f.dim() != n.len() {
        return Err(CoreError::DimensionMismatch {
            expected: f.dim(),
            got: n.len(),
        });
    }
    i_functional(n, order, |cut| best_angle_l2(f, cut))
}

// JSON shape: { "dim": m, "lambda": [[ν_1, …, ν_m, value], …] }.
impl Serialize for LacunarySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Row<'a>(&'a [u32], f64);
        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len() + 1))?;
                for nj in self.0 {
                    seq.serialize_element(nj)?;
                }
                seq.serialize_element(&self.1)?;
                seq.end()
            }
        }
        struct Rows<'a>(&'a LacunarySpec);
        impl Serialize for Rows<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.lambda.len()))?;
                for (nu, v) in self.0.entries() {
                    seq.serialize_element(&Row(nu, v))?;
                }
                seq.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("dim", &self.dim)?;
        map.serialize_entry("lambda", &Rows(self))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for LacunarySpec {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = LacunarySpec;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a map with dim and lambda")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut dim: Option<usize> = None;
                let mut rows: Option<Vec<Vec<f64>>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "dim" => dim = Some(map.next_value()?),
                        "lambda" => rows = Some(map.next_value()?),
                        other => {
                            return Err(de::Error::unknown_field(other, &["dim", "lambda"]))
                        }
                    }
                }
                let dim = dim.ok_or_else(|| de::Error::missing_field("dim"))?;
                let rows = rows.ok_or_else(|| de::Error::missing_field("lambda"))?;
                let mut entries = Vec::with_capacity(rows.len());
                for row in rows {
                    if row.len() != dim + 1 {
                        return Err(de::Error::invalid_length(row.len(), &"dim + 1 numbers"));
                    }
                    let mut nu = Vec::with_capacity(dim);
                    for &x in &row[..dim] {
                        if x.fract() != 0.0 || x < 0.0 {
                            return Err(de::Error::custom("lattice index must be in Z_+"));
                        }
                        nu.push(x as u32);
                    }
                    entries.push((nu, row[dim]));
                }
                LacunarySpec::new(dim, entries).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{self, SamplingConfig};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn build_single_term_m1() {
        let spec = LacunarySpec::new(1, vec![(vec![0], 1.0)]).unwrap();
        let f = build(&spec).unwrap();
        assert_eq!(f.coeff(&[1]), Complex64::new(0.5, 0.0));
        assert_eq!(f.coeff(&[-1]), Complex64::new(0.5, 0.0));
        assert!(f.is_real());
    }

    #[test]
    fn build_single_term_m2() {
        let spec = LacunarySpec::new(2, vec![(vec![0, 0], 1.0)]).unwrap();
        let f = build(&spec).unwrap();
        for k in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
            assert_eq!(f.coeff(&k), Complex64::new(0.25, 0.0));
        }
    }

    #[test]
    fn build_norm_via_parseval() {
        let spec = LacunarySpec::new(
            2,
            vec![(vec![0, 1], 1.0), (vec![2, 0], -0.5), (vec![3, 3], 0.25)],
        )
        .unwrap();
        let f = build(&spec).unwrap();
        let expect = 0.5 * coeff_l2_functional(&spec); // 2^{−m/2} Σ^{1/2}
        assert_abs_diff_eq!(f.l2_norm(), expect, epsilon = 1e-12);
        let sampled = lorentz::norm(&f, &LorentzIndex::l2(), &SamplingConfig::default()).unwrap();
        assert_abs_diff_eq!(sampled, expect, epsilon = 1e-6);
    }

    #[test]
    fn coeff_functionals() {
        let spec = LacunarySpec::new(1, vec![(vec![0], 3.0), (vec![1], 4.0)]).unwrap();
        assert_abs_diff_eq!(coeff_l2_functional(&spec), 5.0, epsilon = 1e-15);
        let single = LacunarySpec::new(1, vec![(vec![2], -2.0)]).unwrap();
        assert_eq!(coeff_l2_functional(&single), 2.0);
        assert_eq!(coeff_ltau_functional(&single, 3.0), 2.0);
        let pair = LacunarySpec::new(1, vec![(vec![0], 1.0), (vec![1], 1.0)]).unwrap();
        assert_abs_diff_eq!(
            coeff_ltau_functional(&pair, 2.0),
            2f64.sqrt(),
            epsilon = 1e-15
        );
        let triple =
            LacunarySpec::new(1, vec![(vec![0], 1.0), (vec![1], 1.0), (vec![2], 1.0)]).unwrap();
        assert_abs_diff_eq!(
            coeff_ltau_functional(&triple, 3.0),
            3f64.powf(1.0 / 3.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn thm32_rhs_supported_below_cutoff() {
        let spec = LacunarySpec::new(2, vec![(vec![1, 1], 1.0), (vec![2, 0], 0.5)]).unwrap();
        let order = FractionalOrder::new(vec![1.0, 1.0]).unwrap();
        let n = [3u32, 3];
        // all λ below n̄: the angle regions with an outside axis and the far
        // tail are empty, leaving only the full-box contributions
        let got = thm32_rhs(&spec, &n, &order).unwrap();
        let brute = thm32_rhs_bruteforce(&spec, &n, &order);
        assert_abs_diff_eq!(got, brute, epsilon = 1e-14);
        let full_inner = (2f64.powf(4.0) * 1.0 + 2f64.powf(4.0) * 0.25).sqrt();
        // the full-box region appears twice: as the printed first term and as
        // the e = e_m angle region
        assert_abs_diff_eq!(got, 2.0 * 2f64.powf(-6.0) * full_inner, epsilon = 1e-12);
    }

    #[test]
    fn thm32_rhs_single_far_term() {
        let spec = LacunarySpec::new(2, vec![(vec![4, 5], -0.7)]).unwrap();
        let order = FractionalOrder::new(vec![0.5, 1.5]).unwrap();
        let got = thm32_rhs(&spec, &[2, 2], &order).unwrap();
        assert_abs_diff_eq!(got, 0.7, epsilon = 1e-14);
    }

    /// Oracle: classify every λ entry into its region in one pass and
    /// assemble the same three-part sum.
    fn thm32_rhs_bruteforce(spec: &LacunarySpec, n: &[u32], order: &FractionalOrder) -> f64 {
        let alphas = order.alphas();
        let dim = spec.dim();
        let mut inner_full = 0.0;
        let mut tail = 0.0;
        let mut region_inner: std::collections::HashMap<u32, f64> =
            std::collections::HashMap::new();
        for (nu, v) in spec.entries() {
            let mask: u32 = (0..dim)
                .filter(|&j| nu[j] <= n[j])
                .map(|j| 1u32 << j)
                .sum();
            if mask == (1u32 << dim) - 1 {
                let w: f64 = nu
                    .iter()
                    .zip(alphas)
                    .map(|(&vj, &a)| 2f64.powf(2.0 * vj as f64 * a))
                    .product();
                inner_full += w * v * v;
            }
            if mask == 0 {
                tail += v * v;
            }
            // every ν̄ lies in exactly one angle region G_n̄(e), e = mask
            if mask != 0 {
                let w: f64 = (0..dim)
                    .filter(|&j| mask & (1 << j) != 0)
                    .map(|j| 2f64.powf(2.0 * nu[j] as f64 * alphas[j]))
                    .product();
                *region_inner.entry(mask).or_insert(0.0) += w * v * v;
            }
        }
        let outer_full: f64 = n
            .iter()
            .zip(alphas)
            .map(|(&nj, &a)| 2f64.powf(-(nj as f64) * a))
            .product();
        let mut total = outer_full * inner_full.sqrt() + tail.sqrt();
        for (mask, inner) in region_inner {
            let outer: f64 = (0..dim)
                .filter(|&j| mask & (1 << j) != 0)
                .map(|j| 2f64.powf(-(n[j] as f64) * alphas[j]))
                .product();
            total += outer * inner.sqrt();
        }
        total
    }

    #[test]
    fn thm32_rhs_matches_bruteforce_on_geometric_family() {
        let spec = LacunarySpec::geometric(&[1.0, 0.5], &[5, 5]).unwrap();
        let order = FractionalOrder::new(vec![0.7, 1.2]).unwrap();
        for n in [[0u32, 0], [1, 3], [2, 2], [5, 1], [6, 6]] {
            let a = thm32_rhs(&spec, &n, &order).unwrap();
            let b = thm32_rhs_bruteforce(&spec, &n, &order);
            assert_abs_diff_eq!(a, b, epsilon = 1e-12 * (1.0 + a));
        }
    }

    #[test]
    fn thm32_rhs_geometric_closed_form_m1() {
        // λ_ν = 2^{−νρ}: the full-box inner sum is geometric with ratio
        // 2^{2(α−ρ)} and the tail is geometric with ratio 2^{−2ρ}
        let rho = 1.0;
        let vmax = 6u32;
        let alpha = 0.6;
        let spec = LacunarySpec::geometric(&[rho], &[vmax]).unwrap();
        let order = FractionalOrder::new(vec![alpha]).unwrap();
        let n = 3u32;
        let r = 2f64.powf(2.0 * (alpha - rho));
        let geo = |ratio: f64, terms: u32| -> f64 {
            (0..terms).map(|i| ratio.powi(i as i32)).sum::<f64>()
        };
        let inner_full = geo(r, n + 1);
        let tail: f64 = ((n + 1)..=vmax)
            .map(|v| 2f64.powf(-2.0 * v as f64 * rho))
            .sum();
        // first term and the e = {0} region coincide for m = 1
        let expect = 2.0 * 2f64.powf(-(n as f64) * alpha) * inner_full.sqrt() + tail.sqrt();
        let got = thm32_rhs(&spec, &[n], &order).unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-12);
    }

    #[test]
    fn thm33_single_term_reduces_to_norm() {
        // single λ at ν̄ = 0̄: Y_{ν̄−1} = ‖f‖ only at ν̄ = 1̄, so
        // I_n̄ = Πn_j^{−α_j}·‖f‖
        let spec = LacunarySpec::new(2, vec![(vec![0, 0], 1.0)]).unwrap();
        let f = build(&spec).unwrap();
        let order = FractionalOrder::new(vec![1.0, 0.5]).unwrap();
        let mut ev = AngleEvaluator::new(&f, LorentzIndex::l2(), SamplingConfig::default());
        let n = [8i64, 8];
        let got = thm33_functional(&mut ev, &n, &order).unwrap();
        let expect = 8f64.powf(-1.0) * 8f64.powf(-0.5) * 0.5;
        assert_abs_diff_eq!(got, expect, epsilon = 1e-6);
    }

    #[test]
    fn thm33_zero_function() {
        let f = SpectralFunction::zero(1);
        let order = FractionalOrder::new(vec![1.0]).unwrap();
        let mut ev = AngleEvaluator::new(&f, LorentzIndex::l2(), SamplingConfig::default());
        assert_eq!(thm33_functional(&mut ev, &[4], &order).unwrap(), 0.0);
    }

    #[test]
    fn thm33_surrogate_agrees_with_parseval_route_at_l2() {
        let spec = LacunarySpec::geometric(&[1.0], &[5]).unwrap();
        let f = build(&spec).unwrap();
        let order = FractionalOrder::new(vec![0.8]).unwrap();
        let mut ev = AngleEvaluator::new(&f, LorentzIndex::l2(), SamplingConfig::default());
        for n in [2i64, 4, 8, 16] {
            let a = thm33_functional(&mut ev, &[n], &order).unwrap();
            let b = thm33_functional_parseval(&f, &[n], &order).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-6 * (1.0 + a));
        }
    }

    #[test]
    fn thm33_rejects_out_of_domain_index() {
        let spec = LacunarySpec::new(1, vec![(vec![0], 1.0)]).unwrap();
        let f = build(&spec).unwrap();
        let order = FractionalOrder::new(vec![1.0]).unwrap();
        let idx = LorentzIndex::new(1.5, 3.0).unwrap();
        let mut ev = AngleEvaluator::new(&f, idx, SamplingConfig::default());
        assert!(matches!(
            thm33_functional(&mut ev, &[4], &order),
            Err(CoreError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = LacunarySpec::new(2, vec![(vec![0, 1], 1.0), (vec![3, 2], -0.5)]).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.starts_with(r#"{"dim":2,"lambda":[[0,1,1.0]"#));
        let back: LacunarySpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn duplicate_indices_rejected() {
        let dup = LacunarySpec::new(1, vec![(vec![1], 1.0), (vec![1], 2.0)]);
        assert!(dup.is_err());
    }
}
