//! Deterministic test-function families.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use angleapprox::lacunary::{self, LacunarySpec};
use angleapprox::SpectralFunction;

use crate::config::FamilySpec;
use crate::Result;

/// A generated test function with its stable identifier; lacunary members
/// keep their coefficient lattice for the coefficient-side functionals.
#[derive(Debug, Clone)]
pub struct FamilyFunction {
    pub id: String,
    pub f: SpectralFunction,
    pub lacunary: Option<LacunarySpec>,
}

fn float_tag(x: f64) -> String {
    format!("{}", x).replace('.', "p").replace('-', "m")
}

/// Enumerate the band box on the positive-leading half lattice: exactly one
/// of `k, −k` per conjugate pair, zero coordinates excluded.
fn half_lattice(dim: usize, band: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut k = vec![0i64; dim];
    fn rec(out: &mut Vec<Vec<i64>>, k: &mut Vec<i64>, axis: usize, band: i64) {
        if axis == k.len() {
            out.push(k.clone());
            return;
        }
        for v in -band..=band {
            if v == 0 {
                continue;
            }
            k[axis] = v;
            rec(out, k, axis + 1, band);
        }
    }
    rec(&mut out, &mut k, 0, band);
    out.retain(|k| k[0] > 0);
    out
}

/// Materialize a family specification into concrete functions. The same
/// `(spec, dim, seed)` always yields identical coefficients.
pub fn make_family(spec: &FamilySpec, dim: usize, seed: u64) -> Result<Vec<FamilyFunction>> {
    match spec {
        FamilySpec::LacunaryGeometric { rho, vmax } => {
            let lspec = LacunarySpec::geometric(rho, vmax)?;
            let f = lacunary::build(&lspec)?;
            let id = format!(
                "lac-r{}-v{}",
                rho.iter().map(|&r| float_tag(r)).collect::<Vec<_>>().join("_"),
                vmax.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("_"),
            );
            Ok(vec![FamilyFunction {
                id,
                f,
                lacunary: Some(lspec),
            }])
        }
        FamilySpec::RandomBand { band, decay, count } => {
            let mut out = Vec::with_capacity(*count);
            for i in 0..*count {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let mut entries = Vec::new();
                for k in half_lattice(dim, *band) {
                    let mag: f64 = k
                        .iter()
                        .map(|&kj| (kj.abs() as f64).powf(-decay))
                        .product();
                    let phase = rng.random_range(0.0..std::f64::consts::TAU);
                    let a = Complex64::from_polar(mag, phase);
                    let neg: Vec<i64> = k.iter().map(|&kj| -kj).collect();
                    entries.push((neg, a.conj()));
                    entries.push((k, a));
                }
                let f = SpectralFunction::new_real(dim, entries)?;
                out.push(FamilyFunction {
                    id: format!("rnd-b{}-d{}-s{}-{}", band, float_tag(*decay), seed, i),
                    f,
                    lacunary: None,
                });
            }
            Ok(out)
        }
        FamilySpec::Product { degree } => {
            let mut entries = Vec::new();
            let mut k = vec![0i64; dim];
            fn rec(
                entries: &mut Vec<(Vec<i64>, Complex64)>,
                k: &mut Vec<i64>,
                axis: usize,
                degree: i64,
            ) {
                if axis == k.len() {
                    let w: f64 = k.iter().map(|&kj| 0.5 / kj.abs() as f64).product();
                    entries.push((k.clone(), Complex64::new(w, 0.0)));
                    return;
                }
                for v in -degree..=degree {
                    if v == 0 {
                        continue;
                    }
                    k[axis] = v;
                    rec(entries, k, axis + 1, degree);
                }
            }
            rec(&mut entries, &mut k, 0, *degree);
            let f = SpectralFunction::new_real(dim, entries)?;
            Ok(vec![FamilyFunction {
                id: format!("prod-d{}", degree),
                f,
                lacunary: None,
            }])
        }
    }
}

/// All functions for a configuration, in family order.
pub fn make_all(specs: &[FamilySpec], dim: usize, seed: u64) -> Result<Vec<FamilyFunction>> {
    let mut out = Vec::new();
    for spec in specs {
        out.extend(make_family(spec, dim, seed)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_repetition_reproduces_coefficients() {
        let spec = FamilySpec::RandomBand {
            band: 4,
            decay: 1.0,
            count: 2,
        };
        let a = make_family(&spec, 2, 7).unwrap();
        let b = make_family(&spec, 2, 7).unwrap();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.f, y.f);
        }
        let c = make_family(&spec, 2, 8).unwrap();
        assert_ne!(a[0].f, c[0].f);
    }

    #[test]
    fn geometric_family_has_expected_lattice() {
        let spec = FamilySpec::LacunaryGeometric {
            rho: vec![1.0],
            vmax: vec![4],
        };
        let fam = make_family(&spec, 1, 0).unwrap();
        let lspec = fam[0].lacunary.as_ref().unwrap();
        assert_eq!(lspec.entries().count(), 5);
        assert_eq!(fam[0].f.num_coeffs(), 10);
    }

    #[test]
    fn random_family_respects_zero_mean_class() {
        let spec = FamilySpec::RandomBand {
            band: 5,
            decay: 2.0,
            count: 1,
        };
        let fam = make_family(&spec, 2, 3).unwrap();
        assert!(fam[0].f.is_real());
        for (k, _) in fam[0].f.iter() {
            assert!(k.iter().all(|&kj| kj != 0));
        }
        // full symmetric box minus zero planes
        assert_eq!(fam[0].f.num_coeffs(), 100);
    }

    #[test]
    fn product_family_is_tensor_of_fixed_polynomial() {
        let fam = make_family(&FamilySpec::Product { degree: 3 }, 2, 0).unwrap();
        let f = &fam[0].f;
        assert_eq!(f.num_coeffs(), 36);
        assert_eq!(
            f.coeff(&[2, -3]),
            Complex64::new(0.25 * (0.5 / 3.0), 0.0)
        );
    }
}
