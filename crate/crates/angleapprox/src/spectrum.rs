//! Sparse multivariate trigonometric spectra and their linear operators.
//!
//! A [`SpectralFunction`] stores finitely many Fourier coefficients `a_k`,
//! `k ∈ Z^m`, of a function `x ↦ Σ_k a_k e^{i⟨k, 2πx⟩}` on the unit cube
//! `I^m = [0,1)^m`. Coefficients with any zero coordinate are excluded by
//! construction (zero mean in every variable), which is the class all the
//! estimators in this crate are stated for.
//!
//! Operators act diagonally on coefficients (partial sums, dyadic blocks,
//! angular sums, fractional derivatives, shifts) or synthesize values on a
//! uniform grid via FFT ([`evaluate`]).

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::smoothness::FractionalOrder;

/// A subset of the axis indices `{0, …, m−1}`, stored as a bitmask.
///
/// Encodes the paper-style index sets `e ⊆ {1,…,m}`; "no cutoff on axis j"
/// is always expressed by leaving `j` out of the subset, never by a sentinel
/// cutoff value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisSubset {
    dim: usize,
    mask: u32,
}

impl AxisSubset {
    const MAX_DIM: usize = 24;

    /// The empty subset.
    pub fn empty(dim: usize) -> Self {
        assert!(dim <= Self::MAX_DIM, "dimension too large for AxisSubset");
        AxisSubset { dim, mask: 0 }
    }

    /// The full subset `{0, …, dim−1}`.
    pub fn full(dim: usize) -> Self {
        assert!(dim <= Self::MAX_DIM, "dimension too large for AxisSubset");
        AxisSubset {
            dim,
            mask: if dim == 0 { 0 } else { (1u32 << dim) - 1 },
        }
    }

    /// Subset from explicit axis indices.
    pub fn from_axes(dim: usize, axes: &[usize]) -> Result<Self> {
        let mut s = Self::empty(dim);
        for &j in axes {
            if j >= dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    got: j + 1,
                });
            }
            s.mask |= 1 << j;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, axis: usize) -> bool {
        axis < self.dim && self.mask & (1 << axis) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        *self == Self::full(self.dim)
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// The complement within `{0, …, dim−1}`.
    pub fn complement(&self) -> Self {
        AxisSubset {
            dim: self.dim,
            mask: Self::full(self.dim).mask & !self.mask,
        }
    }

    /// Axes in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).filter(|&j| self.contains(j))
    }

    /// All nonempty subsets of `{0, …, dim−1}`, in increasing mask order.
    pub fn nonempty_subsets(dim: usize) -> impl Iterator<Item = AxisSubset> {
        assert!(dim <= Self::MAX_DIM);
        (1u32..1u32 << dim).map(move |mask| AxisSubset { dim, mask })
    }
}

impl fmt::Display for AxisSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", j)?;
        }
        write!(f, "}}")
    }
}

/// A region of the frequency lattice `Z^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrequencyBlock {
    /// `|k_j| ≤ l_j` for every axis.
    FullBox { cutoffs: Vec<i64> },
    /// Dyadic shell: `[2^{s_j−1}] ≤ |k_j| < 2^{s_j}` per axis (`s_j = 0`
    /// selects `k_j = 0`, hence nothing on zero-mean functions).
    Dyadic { levels: Vec<u32> },
    /// `G_l̄(e)`: `|k_j| ≤ l_j` for `j ∈ e`, `|k_j| > l_j` for `j ∉ e`.
    AngleRegion { cutoffs: Vec<i64>, inside: AxisSubset },
    /// `|k_j| > l_j` for every axis.
    FarRegion { cutoffs: Vec<i64> },
}

impl FrequencyBlock {
    fn dim(&self) -> usize {
        match self {
            FrequencyBlock::FullBox { cutoffs } | FrequencyBlock::FarRegion { cutoffs } => {
                cutoffs.len()
            }
            FrequencyBlock::Dyadic { levels } => levels.len(),
            FrequencyBlock::AngleRegion { cutoffs, .. } => cutoffs.len(),
        }
    }

    /// Membership test for a frequency index.
    pub fn contains(&self, k: &[i64]) -> bool {
        match self {
            FrequencyBlock::FullBox { cutoffs } => {
                k.iter().zip(cutoffs).all(|(&kj, &lj)| kj.abs() <= lj)
            }
            FrequencyBlock::Dyadic { levels } => k.iter().zip(levels).all(|(&kj, &sj)| {
                let lo = if sj == 0 { 0 } else { 1i64 << (sj - 1) };
                let hi = 1i64 << sj;
                let a = kj.abs();
                lo <= a && a < hi
            }),
            FrequencyBlock::AngleRegion { cutoffs, inside } => {
                k.iter().zip(cutoffs).enumerate().all(|(j, (&kj, &lj))| {
                    if inside.contains(j) {
                        kj.abs() <= lj
                    } else {
                        kj.abs() > lj
                    }
                })
            }
            FrequencyBlock::FarRegion { cutoffs } => {
                k.iter().zip(cutoffs).all(|(&kj, &lj)| kj.abs() > lj)
            }
        }
    }
}

/// Sparse spectrum of a trigonometric polynomial on `I^m`.
///
/// Invariants, enforced on construction and preserved by every operator:
/// every stored index has all coordinates nonzero (zero mean per variable),
/// exact-zero coefficients are not stored, and when the real flag is set the
/// coefficients are conjugate-symmetric (`a_{−k} = conj(a_k)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    dim: usize,
    real: bool,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
    band: Vec<i64>,
}

impl SpectralFunction {
    /// The zero function of the given dimension.
    pub fn zero(dim: usize) -> Self {
        SpectralFunction {
            dim,
            real: true,
            coeffs: BTreeMap::new(),
            band: vec![0; dim],
        }
    }

    /// Build from coefficient entries; the real flag is left unset.
    ///
    /// Entries on a zero-coordinate hyperplane are rejected, exact zeros are
    /// dropped, duplicate indices accumulate.
    pub fn new<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut coeffs: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (k, a) in entries {
            if k.len() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    got: k.len(),
                });
            }
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            if k.iter().any(|&kj| kj == 0) {
                return Err(CoreError::ZeroCoordinate { index: k });
            }
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        coeffs.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        let band = band_of(dim, &coeffs);
        Ok(SpectralFunction {
            dim,
            real: false,
            coeffs,
            band,
        })
    }

    /// Build with the real flag set, verifying conjugate symmetry.
    pub fn new_real<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let f = Self::new(dim, entries)?;
        for (k, a) in &f.coeffs {
            let neg: Vec<i64> = k.iter().map(|&kj| -kj).collect();
            let mirror = f.coeff(&neg);
            if mirror != a.conj() {
                return Err(CoreError::ConjugateSymmetry { index: k.clone() });
            }
        }
        Ok(SpectralFunction { real: true, ..f })
    }

    /// The product `Π_j cos(k_j θ_j)` (all `k_j ≠ 0`): `2^m` coefficients of
    /// value `2^{−m}` at the sign patterns of `k̄`.
    pub fn cosine_product(freqs: &[i64]) -> Result<Self> {
        let dim = freqs.len();
        if freqs.iter().any(|&k| k == 0) {
            return Err(CoreError::ZeroCoordinate {
                index: freqs.to_vec(),
            });
        }
        let weight = Complex64::new(0.5f64.powi(dim as i32), 0.0);
        let mut entries = Vec::with_capacity(1 << dim);
        for signs in 0u32..1 << dim {
            let k: Vec<i64> = freqs
                .iter()
                .enumerate()
                .map(|(j, &kj)| {
                    if signs & (1 << j) != 0 {
                        -kj.abs()
                    } else {
                        kj.abs()
                    }
                })
                .collect();
            entries.push((k, weight));
        }
        Self::new_real(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Per-axis maximum `|k_j|` over stored indices (all zeros for the zero
    /// function).
    pub fn band(&self) -> &[i64] {
        &self.band
    }

    /// Whether the real-valuedness flag is set.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_coeffs(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient at `k` (zero when absent).
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Stored entries in lexicographic index order.
    pub fn iter(&self) -> impl Iterator<Item = (&[i64], Complex64)> + '_ {
        self.coeffs.iter().map(|(k, &a)| (k.as_slice(), a))
    }

    /// Coefficient ℓ² norm `(Σ|a_k|²)^{1/2}`; by Parseval this is the `L²`
    /// norm of the function.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs
            .values()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let real = self.real && c.im == 0.0;
        let coeffs: BTreeMap<Vec<i64>, Complex64> = self
            .coeffs
            .iter()
            .filter_map(|(k, &a)| {
                let v = a * c;
                (v != Complex64::new(0.0, 0.0)).then(|| (k.clone(), v))
            })
            .collect();
        let band = band_of(self.dim, &coeffs);
        SpectralFunction {
            dim: self.dim,
            real,
            coeffs,
            band,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut coeffs = self.coeffs.clone();
        for (k, &a) in &other.coeffs {
            *coeffs.entry(k.clone()).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        coeffs.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        let band = band_of(self.dim, &coeffs);
        Ok(SpectralFunction {
            dim: self.dim,
            real: self.real && other.real,
            coeffs,
            band,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_real(-1.0))
    }

    /// Apply a diagonal multiplier `a_k ↦ a_k · mul(k)`, dropping exact
    /// zeros. `real_out` states whether the result keeps the real flag.
    pub(crate) fn map_multiplier<F>(&self, real_out: bool, mul: F) -> SpectralFunction
    where
        F: Fn(&[i64]) -> Complex64,
    {
        let coeffs: BTreeMap<Vec<i64>, Complex64> = self
            .coeffs
            .iter()
            .filter_map(|(k, &a)| {
                let v = a * mul(k);
                (v != Complex64::new(0.0, 0.0)).then(|| (k.clone(), v))
            })
            .collect();
        let band = band_of(self.dim, &coeffs);
        SpectralFunction {
            dim: self.dim,
            real: self.real && real_out,
            coeffs,
            band,
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }
}

fn band_of(dim: usize, coeffs: &BTreeMap<Vec<i64>, Complex64>) -> Vec<i64> {
    let mut band = vec![0i64; dim];
    for k in coeffs.keys() {
        for (j, &kj) in k.iter().enumerate() {
            band[j] = band[j].max(kj.abs());
        }
    }
    band
}

/// Restriction of the spectrum to a frequency region.
pub fn restrict(f: &SpectralFunction, block: &FrequencyBlock) -> Result<SpectralFunction> {
    f.check_len(block.dim())?;
    let coeffs: BTreeMap<Vec<i64>, Complex64> = f
        .coeffs
        .iter()
        .filter(|(k, _)| block.contains(k))
        .map(|(k, &a)| (k.clone(), a))
        .collect();
    let band = band_of(f.dim, &coeffs);
    Ok(SpectralFunction {
        dim: f.dim,
        real: f.real,
        coeffs,
        band,
    })
}

/// Partial sum over the axes in `e`: keeps coefficients with `|k_j| ≤ l_j`
/// for every `j ∈ e`; axes outside `e` are unconstrained. `e = ∅` is the
/// identity.
pub fn partial_sum(
    f: &SpectralFunction,
    cutoffs: &[i64],
    axes: &AxisSubset,
) -> Result<SpectralFunction> {
    f.check_len(cutoffs.len())?;
    f.check_len(axes.dim())?;
    if cutoffs.iter().zip(0..f.dim).any(|(&l, j)| axes.contains(j) && l < 0) {
        return Err(CoreError::InvalidParameter(
            "partial sum cutoffs must be nonnegative on selected axes".into(),
        ));
    }
    let keep = |k: &[i64]| {
        k.iter()
            .zip(cutoffs)
            .enumerate()
            .all(|(j, (&kj, &lj))| !axes.contains(j) || kj.abs() <= lj)
    };
    let coeffs: BTreeMap<Vec<i64>, Complex64> = f
        .coeffs
        .iter()
        .filter(|(k, _)| keep(k))
        .map(|(k, &a)| (k.clone(), a))
        .collect();
    let band = band_of(f.dim, &coeffs);
    Ok(SpectralFunction {
        dim: f.dim,
        real: f.real,
        coeffs,
        band,
    })
}

/// Restriction to the dyadic shell `ρ(s̄)`.
pub fn dyadic_block(f: &SpectralFunction, levels: &[u32]) -> Result<SpectralFunction> {
    f.check_len(levels.len())?;
    restrict(
        f,
        &FrequencyBlock::Dyadic {
            levels: levels.to_vec(),
        },
    )
}

/// Angular sum `U_l̄(f)`: keeps exactly the frequencies with `|k_j| ≤ l_j`
/// for at least one axis. Its residual `f − U_l̄(f)` is [`far_residual`].
pub fn angular_sum(f: &SpectralFunction, cutoffs: &[i64]) -> Result<SpectralFunction> {
    f.check_len(cutoffs.len())?;
    let coeffs: BTreeMap<Vec<i64>, Complex64> = f
        .coeffs
        .iter()
        .filter(|(k, _)| k.iter().zip(cutoffs).any(|(&kj, &lj)| kj.abs() <= lj))
        .map(|(k, &a)| (k.clone(), a))
        .collect();
    let band = band_of(f.dim, &coeffs);
    Ok(SpectralFunction {
        dim: f.dim,
        real: f.real,
        coeffs,
        band,
    })
}

/// The far region `f − U_l̄(f)`: frequencies with `|k_j| > l_j` on every axis.
pub fn far_residual(f: &SpectralFunction, cutoffs: &[i64]) -> Result<SpectralFunction> {
    f.check_len(cutoffs.len())?;
    restrict(
        f,
        &FrequencyBlock::FarRegion {
            cutoffs: cutoffs.to_vec(),
        },
    )
}

/// Fractional derivative of order `ᾱ ≥ 0`:
/// `a_k ↦ a_k · Π_j |k_j|^{α_j} e^{i(π/2)α_j sign k_j}`.
///
/// Axes with `α_j = 0` contribute factor 1; `ᾱ = 0̄` is the identity. The
/// real flag is kept only for the identity case (the multiplier restores
/// real-valuedness on conjugate-symmetric input, but this is asserted
/// numerically where needed rather than assumed).
pub fn frac_derivative(f: &SpectralFunction, order: &FractionalOrder) -> Result<SpectralFunction> {
    f.check_len(order.dim())?;
    let alphas = order.alphas();
    if alphas.iter().all(|&a| a == 0.0) {
        return Ok(f.clone());
    }
    Ok(f.map_multiplier(false, |k| {
        let mut m = Complex64::new(1.0, 0.0);
        for (j, &alpha) in alphas.iter().enumerate() {
            if alpha == 0.0 {
                continue;
            }
            let kj = k[j];
            let mag = (kj.abs() as f64).powf(alpha);
            let phase = std::f64::consts::FRAC_PI_2 * alpha * kj.signum() as f64;
            m *= Complex64::from_polar(mag, phase);
        }
        m
    }))
}

/// Exact translation in coefficient space: `a_k ↦ a_k e^{i⟨k, s̄⟩}` realizes
/// the shifted function with `s̄` in angular units.
pub fn shift(f: &SpectralFunction, offset: &[f64]) -> Result<SpectralFunction> {
    f.check_len(offset.len())?;
    Ok(f.map_multiplier(true, |k| {
        let phase: f64 = k.iter().zip(offset).map(|(&kj, &sj)| kj as f64 * sj).sum();
        Complex64::from_polar(1.0, phase)
    }))
}

/// Values of a function on a uniform tensor grid over `I^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    dims: Vec<usize>,
    values: GridValues,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl GridSample {
    pub fn from_real(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        check_grid_len(&dims, values.len())?;
        Ok(GridSample {
            dims,
            values: GridValues::Real(values),
        })
    }

    pub fn from_complex(dims: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        check_grid_len(&dims, values.len())?;
        Ok(GridSample {
            dims,
            values: GridValues::Complex(values),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &GridValues {
        &self.values
    }

    /// Pointwise absolute values, in row-major grid order.
    pub fn abs_values(&self) -> Vec<f64> {
        match &self.values {
            GridValues::Real(v) => v.iter().map(|x| x.abs()).collect(),
            GridValues::Complex(v) => v.iter().map(|z| z.norm()).collect(),
        }
    }
}

fn check_grid_len(dims: &[usize], len: usize) -> Result<()> {
    let expect: usize = dims.iter().product();
    if expect != len || dims.iter().any(|&n| n == 0) {
        return Err(CoreError::InvalidParameter(format!(
            "grid dims {:?} do not match {} values",
            dims, len
        )));
    }
    Ok(())
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place FFT along every axis of a row-major tensor.
fn fft_all_axes(buf: &mut [Complex64], dims: &[usize], direction: FftDirection) {
    let total: usize = dims.iter().product();
    debug_assert_eq!(buf.len(), total);
    PLANNER.with(|planner| {
        for axis in 0..dims.len() {
            let n = dims[axis];
            if n == 1 {
                continue;
            }
            let fft = planner.borrow_mut().plan_fft(n, direction);
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            let inner: usize = dims[axis + 1..].iter().product();
            let outer: usize = dims[..axis].iter().product();
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            for o in 0..outer {
                for i in 0..inner {
                    let base = o * n * inner + i;
                    if inner == 1 {
                        let slice = &mut buf[base..base + n];
                        fft.process_with_scratch(slice, &mut scratch);
                    } else {
                        for (t, v) in line.iter_mut().enumerate() {
                            *v = buf[base + t * inner];
                        }
                        fft.process_with_scratch(&mut line, &mut scratch);
                        for (t, v) in line.iter().enumerate() {
                            buf[base + t * inner] = *v;
                        }
                    }
                }
            }
        }
    });
}

/// Synthesize `f` on the uniform grid `x_j = i_j / N_j`, `i_j = 0..N_j`:
/// `values[ī] = Σ_k a_k e^{i⟨k, 2π(i_1/N_1, …, i_m/N_m)⟩}`.
///
/// Every axis must satisfy `N_j ≥ 2·band_j + 1` so that distinct stored
/// frequencies land in distinct grid bins (alias-free). With the real flag
/// set the imaginary residue is checked and dropped.
pub fn evaluate(f: &SpectralFunction, dims: &[usize]) -> Result<GridSample> {
    f.check_len(dims.len())?;
    for (axis, (&n, &b)) in dims.iter().zip(f.band()).enumerate() {
        let required = (2 * b + 1) as usize;
        if n < required {
            return Err(CoreError::Undersampled { axis, n, required });
        }
    }
    let total: usize = dims.iter().product();
    let mut buf = vec![Complex64::new(0.0, 0.0); total];
    for (k, a) in f.iter() {
        let mut idx = 0usize;
        for (j, &kj) in k.iter().enumerate() {
            let n = dims[j] as i64;
            let pos = kj.rem_euclid(n) as usize;
            idx = idx * dims[j] + pos;
        }
        buf[idx] += a;
    }
    // Inverse direction without normalization is exactly the synthesis sum.
    fft_all_axes(&mut buf, dims, FftDirection::Inverse);
    if f.is_real() {
        let peak = buf.iter().map(|z| z.re.abs()).fold(0.0f64, f64::max);
        let resid = buf.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
        assert!(
            resid <= 1e-10 * (1.0 + peak),
            "imaginary residue {} on a real-flagged synthesis",
            resid
        );
        GridSample::from_real(dims.to_vec(), buf.iter().map(|z| z.re).collect())
    } else {
        GridSample::from_complex(dims.to_vec(), buf)
    }
}

/// Exact DFT analysis: recover the coefficients of a band-limited function
/// from an alias-free grid. Coefficients on zero-coordinate hyperplanes are
/// discarded (they are roundoff for zero-mean input). Inverse of
/// [`evaluate`] up to floating-point error.
pub fn analyze(g: &GridSample, band: &[i64]) -> Result<SpectralFunction> {
    if band.len() != g.dims.len() {
        return Err(CoreError::DimensionMismatch {
            expected: g.dims.len(),
            got: band.len(),
        });
    }
    for (axis, (&n, &b)) in g.dims.iter().zip(band).enumerate() {
        let required = (2 * b + 1) as usize;
        if n < required {
            return Err(CoreError::Undersampled { axis, n, required });
        }
    }
    let mut buf: Vec<Complex64> = match &g.values {
        GridValues::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        GridValues::Complex(v) => v.clone(),
    };
    fft_all_axes(&mut buf, &g.dims, FftDirection::Forward);
    let total: usize = g.dims.iter().product();
    let scale = 1.0 / total as f64;
    let dim = g.dims.len();
    let mut entries = Vec::new();
    let mut k = vec![0i64; dim];
    collect_box(&mut entries, &mut k, 0, band, &g.dims, &buf, scale);
    SpectralFunction::new(dim, entries)
}

fn collect_box(
    entries: &mut Vec<(Vec<i64>, Complex64)>,
    k: &mut Vec<i64>,
    axis: usize,
    band: &[i64],
    dims: &[usize],
    buf: &[Complex64],
    scale: f64,
) {
    if axis == band.len() {
        if k.iter().any(|&kj| kj == 0) {
            return;
        }
        let mut idx = 0usize;
        for (j, &kj) in k.iter().enumerate() {
            idx = idx * dims[j] + kj.rem_euclid(dims[j] as i64) as usize;
        }
        let a = buf[idx] * scale;
        if a != Complex64::new(0.0, 0.0) {
            entries.push((k.clone(), a));
        }
        return;
    }
    for kj in -band[axis]..=band[axis] {
        k[axis] = kj;
        collect_box(entries, k, axis + 1, band, dims, buf, scale);
    }
}

// JSON shape: { "dim": m, "real": bool, "coeffs": [[k_1, …, k_m, re, im], …] }.
impl Serialize for SpectralFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Row<'a>(&'a [i64], Complex64);
        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len() + 2))?;
                for kj in self.0 {
                    seq.serialize_element(kj)?;
                }
                seq.serialize_element(&self.1.re)?;
                seq.serialize_element(&self.1.im)?;
                seq.end()
            }
        }
        struct Rows<'a>(&'a SpectralFunction);
        impl Serialize for Rows<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.coeffs.len()))?;
                for (k, a) in self.0.iter() {
                    seq.serialize_element(&Row(k, a))?;
                }
                seq.end()
            }
        }
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("dim", &self.dim)?;
        map.serialize_entry("real", &self.real)?;
        map.serialize_entry("coeffs", &Rows(self))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for SpectralFunction {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = SpectralFunction;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map with dim, real, coeffs")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut dim: Option<usize> = None;
                let mut real: Option<bool> = None;
                let mut rows: Option<Vec<Vec<f64>>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "dim" => dim = Some(map.next_value()?),
                        "real" => real = Some(map.next_value()?),
                        "coeffs" => rows = Some(map.next_value()?),
                        other => {
                            return Err(de::Error::unknown_field(
                                other,
                                &["dim", "real", "coeffs"],
                            ))
                        }
                    }
                }
                let dim = dim.ok_or_else(|| de::Error::missing_field("dim"))?;
                let real = real.ok_or_else(|| de::Error::missing_field("real"))?;
                let rows = rows.ok_or_else(|| de::Error::missing_field("coeffs"))?;
                let mut entries = Vec::with_capacity(rows.len());
                for row in rows {
                    if row.len() != dim + 2 {
                        return Err(de::Error::invalid_length(row.len(), &"dim + 2 numbers"));
                    }
                    let mut k = Vec::with_capacity(dim);
                    for &x in &row[..dim] {
                        if x.fract() != 0.0 {
                            return Err(de::Error::custom("non-integer frequency index"));
                        }
                        k.push(x as i64);
                    }
                    entries.push((k, Complex64::new(row[dim], row[dim + 1])));
                }
                let f = if real {
                    SpectralFunction::new_real(dim, entries)
                } else {
                    SpectralFunction::new(dim, entries)
                };
                f.map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `cos x` embedded in one dimension.
    fn cos_x() -> SpectralFunction {
        SpectralFunction::cosine_product(&[1]).unwrap()
    }

    #[test]
    fn constructor_enforces_zero_mean_class() {
        let err = SpectralFunction::new(2, vec![(vec![0, 1], c(1.0, 0.0))]);
        assert!(matches!(err, Err(CoreError::ZeroCoordinate { .. })));
        // exact zeros on the hyperplane are simply dropped before the check
        let ok = SpectralFunction::new(1, vec![(vec![2], c(0.0, 0.0))]).unwrap();
        assert!(ok.is_zero());
    }

    #[test]
    fn partial_sum_box_cutoff() {
        let f = SpectralFunction::new(
            2,
            vec![(vec![1, 1], c(1.0, 0.0)), (vec![3, 1], c(1.0, 0.0))],
        )
        .unwrap();
        let s = partial_sum(&f, &[2, 2], &AxisSubset::full(2)).unwrap();
        assert_eq!(s.num_coeffs(), 1);
        assert_eq!(s.coeff(&[1, 1]), c(1.0, 0.0));
    }

    #[test]
    fn partial_sum_empty_subset_is_identity() {
        let f = SpectralFunction::new(
            2,
            vec![(vec![5, 7], c(1.0, 2.0)), (vec![-3, 2], c(0.5, 0.0))],
        )
        .unwrap();
        let s = partial_sum(&f, &[0, 0], &AxisSubset::empty(2)).unwrap();
        assert_eq!(s, f);
    }

    #[test]
    fn partial_sum_single_axis_on_lacunary() {
        // λ at ν̄ = (0,0) and (1,1): frequencies (±1,±1) and (±2,±2)
        let f = SpectralFunction::cosine_product(&[1, 1])
            .unwrap()
            .add(&SpectralFunction::cosine_product(&[2, 2]).unwrap())
            .unwrap();
        let s = partial_sum(&f, &[1, 0], &AxisSubset::from_axes(2, &[0]).unwrap()).unwrap();
        assert_eq!(s.num_coeffs(), 4);
        for (k, _) in s.iter() {
            assert_eq!(k[0].abs(), 1);
            assert_eq!(k[1].abs(), 1);
        }
    }

    #[test]
    fn dyadic_block_selects_shell() {
        let f = SpectralFunction::new(
            1,
            (1..=4).map(|k| (vec![k], c(1.0, 0.0))).collect::<Vec<_>>(),
        )
        .unwrap();
        let b = dyadic_block(&f, &[2]).unwrap();
        let kept: Vec<i64> = b.iter().map(|(k, _)| k[0]).collect();
        assert_eq!(kept, vec![2, 3]);
    }

    #[test]
    fn dyadic_blocks_partition_band_limited() {
        let f = SpectralFunction::new(
            2,
            vec![
                (vec![1, 1], c(1.0, 0.0)),
                (vec![2, 3], c(0.0, 1.0)),
                (vec![-4, 7], c(2.0, -1.0)),
                (vec![5, -2], c(0.25, 0.0)),
            ],
        )
        .unwrap();
        let mut sum = SpectralFunction::zero(2);
        for s1 in 1..=3u32 {
            for s2 in 1..=3u32 {
                sum = sum.add(&dyadic_block(&f, &[s1, s2]).unwrap()).unwrap();
            }
        }
        assert_eq!(sum, f);
    }

    #[test]
    fn dyadic_block_level_zero_is_empty_on_zero_mean() {
        let f = cos_x();
        assert!(dyadic_block(&f, &[0]).unwrap().is_zero());
    }

    #[test]
    fn angular_sum_membership() {
        let f = SpectralFunction::new(
            2,
            vec![
                (vec![1, 1], c(1.0, 0.0)),
                (vec![2, 1], c(1.0, 0.0)),
                (vec![2, 2], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        let u = angular_sum(&f, &[1, 1]).unwrap();
        assert_eq!(u.coeff(&[1, 1]), c(1.0, 0.0));
        assert_eq!(u.coeff(&[2, 1]), c(1.0, 0.0));
        assert_eq!(u.coeff(&[2, 2]), c(0.0, 0.0));
        let r = far_residual(&f, &[1, 1]).unwrap();
        assert_eq!(r.coeff(&[2, 2]), c(1.0, 0.0));
        assert_eq!(r.num_coeffs(), 1);
        assert_eq!(u.add(&r).unwrap(), f);
    }

    #[test]
    fn angular_sum_identity_when_cutoffs_cover_band() {
        let f = SpectralFunction::cosine_product(&[2, 3]).unwrap();
        let u = angular_sum(&f, &[2, 3]).unwrap();
        assert_eq!(u, f);
        assert!(far_residual(&f, &[2, 3]).unwrap().is_zero());
    }

    #[test]
    fn angular_sum_inclusion_exclusion_m2() {
        // U = S_{l1,∞} + S_{∞,l2} − S_{l1,l2}, coefficientwise
        let f = SpectralFunction::new(
            2,
            vec![
                (vec![1, 2], c(0.3, 0.1)),
                (vec![-2, 5], c(1.0, -0.7)),
                (vec![4, 1], c(0.0, 2.0)),
                (vec![3, 3], c(-1.0, 0.0)),
                (vec![-5, -4], c(0.5, 0.5)),
            ],
        )
        .unwrap();
        let l = [2i64, 3i64];
        let u = angular_sum(&f, &l).unwrap();
        let s1 = partial_sum(&f, &l, &AxisSubset::from_axes(2, &[0]).unwrap()).unwrap();
        let s2 = partial_sum(&f, &l, &AxisSubset::from_axes(2, &[1]).unwrap()).unwrap();
        let s12 = partial_sum(&f, &l, &AxisSubset::full(2)).unwrap();
        let alt = s1.add(&s2).unwrap().sub(&s12).unwrap();
        assert_eq!(u, alt);
    }

    #[test]
    fn frac_derivative_classical() {
        // (cos x)' = −sin x: a_{±1} = ±i/2
        let d = frac_derivative(&cos_x(), &FractionalOrder::new(vec![1.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(d.coeff(&[1]).im, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.coeff(&[-1]).im, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.coeff(&[1]).re, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn frac_derivative_half_order_of_cosine() {
        // D^{1/2} cos x = cos(x + π/4); compare synthesized values
        let d = frac_derivative(&cos_x(), &FractionalOrder::new(vec![0.5]).unwrap()).unwrap();
        let n = 16;
        let g = evaluate(&d, &[n]).unwrap();
        let vals = match g.values() {
            GridValues::Complex(v) => v.clone(),
            GridValues::Real(v) => v.iter().map(|&x| c(x, 0.0)).collect(),
        };
        for (i, z) in vals.iter().enumerate() {
            let x = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let expect = (x + std::f64::consts::FRAC_PI_4).cos();
            assert_abs_diff_eq!(z.re, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn frac_derivative_zero_order_is_identity() {
        let f = SpectralFunction::new(2, vec![(vec![2, -3], c(1.0, 4.0))]).unwrap();
        let d = frac_derivative(&f, &FractionalOrder::new(vec![0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(d, f);
    }

    #[test]
    fn frac_derivative_composes_additively() {
        let f = SpectralFunction::new(
            2,
            vec![(vec![2, 1], c(1.0, -0.5)), (vec![-3, 4], c(0.2, 0.0))],
        )
        .unwrap();
        let a = FractionalOrder::new(vec![0.7, 1.3]).unwrap();
        let b = FractionalOrder::new(vec![0.4, 0.0]).unwrap();
        let ab = FractionalOrder::new(vec![1.1, 1.3]).unwrap();
        let two_step = frac_derivative(&frac_derivative(&f, &a).unwrap(), &b).unwrap();
        let one_step = frac_derivative(&f, &ab).unwrap();
        for (k, v) in one_step.iter() {
            assert_abs_diff_eq!((two_step.coeff(k) - v).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn shift_identities() {
        let f = SpectralFunction::new(
            2,
            vec![(vec![1, -2], c(0.5, 0.25)), (vec![3, 1], c(-1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(shift(&f, &[0.0, 0.0]).unwrap(), f);

        // cos(x + π) = −cos x
        let half = shift(&cos_x(), &[std::f64::consts::PI]).unwrap();
        assert_abs_diff_eq!((half.coeff(&[1]) + c(0.5, 0.0)).norm(), 0.0, epsilon = 1e-15);

        let back = shift(&shift(&f, &[0.9, -1.7]).unwrap(), &[-0.9, 1.7]).unwrap();
        for (k, v) in f.iter() {
            assert_abs_diff_eq!((back.coeff(k) - v).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn evaluate_cos_small_grid() {
        let g = evaluate(&cos_x(), &[4]).unwrap();
        match g.values() {
            GridValues::Real(v) => {
                let expect = [1.0, 0.0, -1.0, 0.0];
                for (a, b) in v.iter().zip(expect) {
                    assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
                }
            }
            GridValues::Complex(_) => panic!("real flag should synthesize real values"),
        }
    }

    #[test]
    fn evaluate_zero_function() {
        let g = evaluate(&SpectralFunction::zero(2), &[8, 8]).unwrap();
        assert!(g.abs_values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn evaluate_rejects_undersampled_grid() {
        let f = SpectralFunction::cosine_product(&[3]).unwrap();
        assert!(matches!(
            evaluate(&f, &[6]),
            Err(CoreError::Undersampled { .. })
        ));
        assert!(evaluate(&f, &[7]).is_ok());
    }

    #[test]
    fn evaluate_parseval_identity() {
        let f = SpectralFunction::new(
            2,
            vec![
                (vec![1, 2], c(0.4, -0.3)),
                (vec![-2, 1], c(0.1, 0.9)),
                (vec![3, -3], c(-0.6, 0.2)),
            ],
        )
        .unwrap();
        let g = evaluate(&f, &[16, 16]).unwrap();
        let mean_sq: f64 =
            g.abs_values().iter().map(|&x| x * x).sum::<f64>() / g.len() as f64;
        let coeff_sq: f64 = f.iter().map(|(_, a)| a.norm_sqr()).sum();
        assert_abs_diff_eq!(mean_sq, coeff_sq, epsilon = 1e-12);
    }

    #[test]
    fn analyze_round_trips_evaluate() {
        let f = SpectralFunction::new(
            2,
            vec![
                (vec![2, 1], c(1.0, 0.5)),
                (vec![-1, 4], c(-0.2, 0.8)),
                (vec![3, -2], c(0.0, -1.0)),
            ],
        )
        .unwrap();
        let g = evaluate(&f, &[11, 13]).unwrap();
        let back = analyze(&g, f.band()).unwrap();
        for (k, v) in f.iter() {
            assert_abs_diff_eq!((back.coeff(k) - v).norm(), 0.0, epsilon = 1e-12);
        }
        for (k, v) in back.iter() {
            assert_abs_diff_eq!((f.coeff(k) - v).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn json_round_trip_matches_declared_shape() {
        let f = SpectralFunction::cosine_product(&[2, 1]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.starts_with(r#"{"dim":2,"real":true,"coeffs":[[-2,-1,0.25,0.0]"#));
        let back: SpectralFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn real_flag_requires_conjugate_symmetry() {
        let bad = SpectralFunction::new_real(1, vec![(vec![1], c(1.0, 0.0))]);
        assert!(matches!(bad, Err(CoreError::ConjugateSymmetry { .. })));
    }
}
