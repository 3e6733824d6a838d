//! Fast oracle cross-checks run before every suite (fail-fast).

use num_complex::Complex64;

use angleapprox::smoothness::{frac_difference_direct, frac_difference_multiplier};
use angleapprox::spectrum::{self, SpectralFunction};
use angleapprox::{lorentz, LorentzIndex, SamplingConfig};

use crate::{HarnessError, Result};

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::Preflight(what.to_string()))
    }
}

/// Re-validate the spectrum/lorentz/smoothness cross-checks on small fixed
/// inputs. Costs a few milliseconds; any failure aborts the suite.
pub fn preflight() -> Result<()> {
    // fractional difference: series versus closed form
    let f = SpectralFunction::cosine_product(&[1]).unwrap();
    let tol = 1e-10;
    let d = frac_difference_direct(&f, 0.5, 0, 0.9, tol)?;
    let m = frac_difference_multiplier(&f, 0.5, 0, 0.9)?;
    let err = d.result.sub(&m)?.l2_norm();
    check(err <= 10.0 * tol * f.l2_norm(), "difference routes disagree")?;

    // sampled norm versus Parseval at p = τ = 2
    let g = SpectralFunction::new(
        2,
        vec![
            (vec![1, 2], Complex64::new(0.4, -0.1)),
            (vec![-3, 1], Complex64::new(0.2, 0.6)),
        ],
    )?;
    let sampled = lorentz::norm(&g, &LorentzIndex::l2(), &SamplingConfig::default())?;
    check(
        (sampled - g.l2_norm()).abs() <= 1e-6,
        "sampled norm deviates from Parseval",
    )?;

    // dyadic blocks partition, angular sum plus residual reassembles
    let mut sum = SpectralFunction::zero(2);
    for s1 in 1..=2u32 {
        for s2 in 1..=2u32 {
            sum = sum.add(&spectrum::dyadic_block(&g, &[s1, s2])?)?;
        }
    }
    check(sum == g, "dyadic blocks fail to partition")?;
    let u = spectrum::angular_sum(&g, &[1, 1])?;
    let r = spectrum::far_residual(&g, &[1, 1])?;
    check(u.add(&r)? == g, "angular sum duality broken")?;
    Ok(())
}
