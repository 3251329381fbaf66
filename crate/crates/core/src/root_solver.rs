//! All complex roots of integer polynomials by Aberth–Ehrlich iteration,
//! and membership tests against disks, annuli and real intervals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;
use twofloat::TwoFloat;

use crate::poly_core::{ExactPolynomial, PolyError, Precision, Real};

/// Largest `|im| / max(1, |z|)` for a root to count as real.
pub const PAIRING_TOLERANCE: f64 = 1e-10;
/// Default relative tolerance for boundary classification.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;
/// `1 + 3^(1/3)`, the radius of the global root disk.
pub fn global_radius() -> f64 {
    1.0 + 3f64.cbrt()
}

/// `1 + (n-1)^(1/(n-1))`.
pub fn order_disk_radius(n: usize) -> f64 {
    let m = (n - 1) as f64;
    1.0 + m.powf(1.0 / m)
}

/// Fixed angular offset of the starting circle, in radians (sqrt(2) - 1).
const START_ANGLE_OFFSET: f64 = std::f64::consts::SQRT_2 - 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("polynomial of degree < 1 has no roots to find")]
    DegreeTooLow,
    #[error("no convergence at either precision (worst backward error {worst_residual:e})")]
    NoConvergence { worst_residual: f64 },
    #[error(transparent)]
    Overflow(#[from] PolyError),
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Precision of the first attempt. Standard escalates to extended once.
    pub precision: Precision,
    pub max_iterations: usize,
    pub polish_steps: usize,
    /// Largest accepted backward error `|p(z)| / sum |c_k| |z|^k`.
    pub residual_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            precision: Precision::Standard,
            max_iterations: 200,
            polish_steps: 3,
            residual_tolerance: 1e-10,
        }
    }
}

/// Roots of one polynomial. `roots` excludes the root at the origin, whose
/// multiplicity is recorded separately; roots are sorted by `(re, im)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// Backward error per root.
    pub residuals: Vec<f64>,
    /// True where an exact sign change of the integer polynomial brackets
    /// the root on the real line; such roots have `im == 0`.
    pub certified_real: Vec<bool>,
    pub zero_multiplicity: usize,
    /// Precision that produced the accepted roots.
    pub precision: Precision,
}

impl RootSet {
    pub fn degree(&self) -> usize {
        self.roots.len() + self.zero_multiplicity
    }

    /// Every root including the zero roots, sorted by `(re, im)`.
    pub fn all_roots(&self) -> Vec<Complex64> {
        let mut all = self.roots.clone();
        all.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), self.zero_multiplicity));
        all.sort_by(cmp_complex);
        all
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Largest root modulus; 0 when there are no nonzero roots.
pub fn max_modulus(rs: &RootSet) -> f64 {
    rs.max_modulus()
}

pub fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn is_near_real(z: Complex64) -> bool {
    z.im.abs() <= PAIRING_TOLERANCE * z.norm().max(1.0)
}

/// `p` and `p'` at `z` by a single Horner pass.
fn horner_with_derivative<T: Real>(coeffs: &[T], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut p = zero;
    let mut dp = zero;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(c, T::zero());
    }
    (p, dp)
}

/// `|p(z)| / sum |c_k| |z|^k`.
fn backward_error<T: Real>(coeffs: &[T], z: Complex<T>) -> f64 {
    let r = z.norm();
    let mut scale = T::zero();
    let mut p = Complex::new(T::zero(), T::zero());
    for &c in coeffs.iter().rev() {
        scale = scale * r + c.abs();
        p = p * z + Complex::new(c, T::zero());
    }
    if scale.is_zero() {
        return 0.0;
    }
    (p.norm() / scale).to_f64()
}

/// Fujiwara's bound on the moduli of the roots.
fn root_bound(coeffs: &[f64]) -> f64 {
    let d = coeffs.len() - 1;
    let lead = coeffs[d].abs();
    let mut bound: f64 = 0.0;
    for k in 1..=d {
        let mut c = coeffs[d - k].abs() / lead;
        if k == d {
            c /= 2.0;
        }
        bound = bound.max(c.powf(1.0 / k as f64));
    }
    2.0 * bound
}

fn starting_circle(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let radius = (1.0 + root_bound(coeffs)) / 2.0;
    (0..d)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / d as f64 + START_ANGLE_OFFSET;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Gauss–Seidel Aberth–Ehrlich iteration. Each approximation freezes once
/// its correction is below `step_tolerance * max(1, |z|)`.
fn aberth<T: Real>(coeffs: &[T], mut roots: Vec<Complex<T>>, max_iterations: usize, step_tolerance: f64) -> Vec<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    let mut frozen = vec![false; roots.len()];
    for _ in 0..max_iterations {
        let mut all_frozen = true;
        for k in 0..roots.len() {
            if frozen[k] {
                continue;
            }
            let z = roots[k];
            let (p, dp) = horner_with_derivative(coeffs, z);
            if p.is_zero() {
                frozen[k] = true;
                continue;
            }
            let repulsion = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (_, &w)| acc + one / (z - w));
            let newton = p / dp;
            let mut step = newton / (one - newton * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                // Stationary point of p: nudge off it.
                step = Complex::new(T::from_f64(1e-3) * (T::one() + z.norm()), T::from_f64(1e-3));
            }
            roots[k] = z - step;
            if step.norm().to_f64() <= step_tolerance * z.norm().to_f64().max(1.0) {
                frozen[k] = true;
            } else {
                all_frozen = false;
            }
        }
        if all_frozen {
            break;
        }
    }
    roots
}

/// Newton steps that are kept only while they shrink `|p|`.
fn polish<T: Real>(coeffs: &[T], z: Complex<T>, steps: usize) -> Complex<T> {
    let mut z = z;
    let (mut p, mut dp) = horner_with_derivative(coeffs, z);
    for _ in 0..steps {
        if p.is_zero() || dp.is_zero() {
            break;
        }
        let candidate = z - p / dp;
        let (cp, cdp) = horner_with_derivative(coeffs, candidate);
        if cp.norm() < p.norm() {
            z = candidate;
            p = cp;
            dp = cdp;
        } else {
            break;
        }
    }
    z
}

/// Coefficient-wise tolerance when rebuilding a polynomial from its roots.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-8;

/// Largest `|rebuilt_k - c_k / c_d| / max(1, |c_k / c_d|)`.
fn coefficient_mismatch(coeffs: &[f64], roots: &[Complex64]) -> f64 {
    let lead = coeffs[coeffs.len() - 1];
    monic_from_roots(roots)
        .iter()
        .zip(coeffs)
        .map(|(r, &c)| (r - c / lead).norm() / (c / lead).abs().max(1.0))
        .fold(0.0, f64::max)
}

struct Attempt {
    roots: Vec<Complex64>,
    residuals: Vec<f64>,
}

fn attempt<T: Real>(coeffs: &[T], start: Vec<Complex<T>>, config: &SolverConfig) -> Attempt {
    let step_tolerance = if T::unit_roundoff() < 1e-20 { 1e-29 } else { 1e-14 };
    let raw = aberth(coeffs, start, config.max_iterations, step_tolerance);
    let polished: Vec<Complex<T>> = raw.into_iter().map(|z| polish(coeffs, z, config.polish_steps)).collect();
    let residuals = polished.iter().map(|&z| backward_error(coeffs, z)).collect();
    Attempt {
        roots: polished.iter().map(|z| Complex64::new(z.re.to_f64(), z.im.to_f64())).collect(),
        residuals,
    }
}

fn to_extended(z: Complex64) -> Complex<TwoFloat> {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

/// Sign of `p` at the exact value of a double.
fn sign_at(p: &ExactPolynomial, x: f64) -> i8 {
    let v = p.eval_exact(&BigRational::from_float(x).expect("finite"));
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// True when `p` changes sign (or vanishes) on a small bracket around `x`.
pub fn certify_real_root(p: &ExactPolynomial, x: f64) -> bool {
    let delta = 1e-9 * x.abs().max(1.0);
    let (lo, hi) = (sign_at(p, x - delta), sign_at(p, x + delta));
    lo == 0 || hi == 0 || lo != hi
}

pub fn find_roots(p: &ExactPolynomial) -> Result<RootSet, SolverError> {
    find_roots_with(p, &SolverConfig::default())
}

/// Factors out `x^m` exactly, iterates on the cofactor, polishes, and
/// escalates once to double-double if any backward error exceeds the
/// tolerance.
pub fn find_roots_with(p: &ExactPolynomial, config: &SolverConfig) -> Result<RootSet, SolverError> {
    let degree = p.degree().filter(|&d| d >= 1).ok_or(SolverError::DegreeTooLow)?;
    let zero_multiplicity = p.zero_root_multiplicity().expect("nonzero polynomial");
    let cofactor = p.shift_down(zero_multiplicity);
    let mut result = RootSet {
        roots: Vec::new(),
        residuals: Vec::new(),
        certified_real: Vec::new(),
        zero_multiplicity,
        precision: config.precision,
    };
    if zero_multiplicity == degree {
        return Ok(result);
    }

    let coeffs_f64 = cofactor.to_real::<f64>();
    if coeffs_f64.iter().any(|c| !c.is_finite()) {
        return Err(PolyError::OverflowAtPrecision { precision: "standard" }.into());
    }
    let start = starting_circle(&coeffs_f64);

    let mut accepted = None;
    let mut worst = f64::INFINITY;
    if config.precision == Precision::Standard {
        let a = attempt(&coeffs_f64, start.clone(), config);
        worst = a.residuals.iter().copied().fold(0.0, f64::max);
        let finite = a.roots.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        // Per-root backward errors can all be tiny while a cluster as a whole
        // is off; the rebuilt coefficients catch that.
        if worst <= config.residual_tolerance && finite && coefficient_mismatch(&coeffs_f64, &a.roots) <= RECONSTRUCTION_TOLERANCE {
            accepted = Some((a, Precision::Standard));
        } else if finite {
            // Restart the extended run from the double-precision estimates.
            let ext = attempt(&cofactor.to_real::<TwoFloat>(), a.roots.iter().copied().map(to_extended).collect(), config);
            worst = ext.residuals.iter().copied().fold(0.0, f64::max);
            if worst <= config.residual_tolerance {
                accepted = Some((ext, Precision::Extended));
            }
        }
    }
    if accepted.is_none() && (config.precision == Precision::Extended || !worst.is_finite()) {
        let ext = attempt(&cofactor.to_real::<TwoFloat>(), start.into_iter().map(to_extended).collect(), config);
        worst = ext.residuals.iter().copied().fold(0.0, f64::max);
        if worst <= config.residual_tolerance {
            accepted = Some((ext, Precision::Extended));
        }
    }
    let (a, precision) = accepted.ok_or(SolverError::NoConvergence { worst_residual: worst })?;

    let mut entries: Vec<(Complex64, f64, bool)> = a
        .roots
        .into_iter()
        .zip(a.residuals)
        .map(|(z, r)| {
            if z.im != 0.0 && is_near_real(z) && certify_real_root(&cofactor, z.re) {
                (Complex64::new(z.re, 0.0), r, true)
            } else if z.im == 0.0 {
                (z, r, certify_real_root(&cofactor, z.re))
            } else {
                (z, r, false)
            }
        })
        .collect();
    entries.sort_by(|x, y| cmp_complex(&x.0, &y.0));
    result.roots = entries.iter().map(|e| e.0).collect();
    result.residuals = entries.iter().map(|e| e.1).collect();
    result.certified_real = entries.iter().map(|e| e.2).collect();
    result.precision = precision;
    Ok(result)
}

/// Which named region a predicate describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionKind {
    DiskGlobal,
    DiskOrderN,
    AnnulusOrderN,
    RealInterval,
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionKind::DiskGlobal => "global-disk",
            RegionKind::DiskOrderN => "order-disk",
            RegionKind::AnnulusOrderN => "annulus",
            RegionKind::RealInterval => "real-interval",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionShape {
    /// `|z| <= radius`.
    Disk { radius: f64 },
    /// `inner <= |z - center| <= outer` for real `center`.
    Annulus { center: f64, inner: f64, outer: f64 },
    /// Real points between `lo` and `hi`; infinite endpoints allowed.
    Interval { lo: f64, hi: f64, lo_closed: bool, hi_closed: bool },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionPredicate {
    pub kind: RegionKind,
    pub shape: RegionShape,
    pub boundary_tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Placement {
    Inside,
    Boundary,
    Outside,
}

/// Placement of one point plus how far outside it lies (0 unless outside).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub placement: Placement,
    pub distance_outside: f64,
}

impl RegionPredicate {
    pub fn disk_global() -> Self {
        RegionPredicate {
            kind: RegionKind::DiskGlobal,
            shape: RegionShape::Disk { radius: global_radius() },
            boundary_tolerance: BOUNDARY_TOLERANCE,
        }
    }

    /// Disk of radius `1 + (n-1)^(1/(n-1))`; needs `n >= 2`.
    pub fn disk_order(n: usize) -> Self {
        assert!(n >= 2, "order disk needs n >= 2");
        RegionPredicate {
            kind: RegionKind::DiskOrderN,
            shape: RegionShape::Disk { radius: order_disk_radius(n) },
            boundary_tolerance: BOUNDARY_TOLERANCE,
        }
    }

    /// `1/2 <= |z + 1/2| <= 1/2 + (n-1)^(1/(n-1))`; needs `n >= 2`.
    pub fn annulus_order(n: usize) -> Self {
        assert!(n >= 2, "annulus needs n >= 2");
        RegionPredicate {
            kind: RegionKind::AnnulusOrderN,
            shape: RegionShape::Annulus {
                center: -0.5,
                inner: 0.5,
                outer: order_disk_radius(n) - 0.5,
            },
            boundary_tolerance: BOUNDARY_TOLERANCE,
        }
    }

    pub fn real_interval(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        assert!(lo <= hi, "empty interval");
        RegionPredicate {
            kind: RegionKind::RealInterval,
            shape: RegionShape::Interval { lo, hi, lo_closed, hi_closed },
            boundary_tolerance: BOUNDARY_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.boundary_tolerance = tolerance;
        self
    }

    /// Strict membership, ignoring the boundary tolerance.
    pub fn contains_real(&self, x: f64) -> bool {
        match self.shape {
            RegionShape::Interval { lo, hi, lo_closed, hi_closed } => {
                let above = if lo_closed { x >= lo } else { x > lo };
                let below = if hi_closed { x <= hi } else { x < hi };
                above && below
            }
            _ => self.classify_point(Complex64::new(x, 0.0)).placement != Placement::Outside,
        }
    }

    pub fn classify_point(&self, z: Complex64) -> Classification {
        let slack = self.boundary_tolerance * z.norm().max(1.0);
        let near = |a: f64, b: f64| (a - b).abs() <= slack;
        let outside = |d: f64| Classification {
            placement: Placement::Outside,
            distance_outside: d,
        };
        let at = |placement| Classification {
            placement,
            distance_outside: 0.0,
        };
        match self.shape {
            RegionShape::Disk { radius } => {
                let r = z.norm();
                if near(r, radius) {
                    at(Placement::Boundary)
                } else if r < radius {
                    at(Placement::Inside)
                } else {
                    outside(r - radius)
                }
            }
            RegionShape::Annulus { center, inner, outer } => {
                let w = (z - center).norm();
                if near(w, inner) || near(w, outer) {
                    at(Placement::Boundary)
                } else if w < inner {
                    outside(inner - w)
                } else if w > outer {
                    outside(w - outer)
                } else {
                    at(Placement::Inside)
                }
            }
            RegionShape::Interval { lo, hi, .. } => {
                if !is_near_real(z) {
                    return outside(z.im.abs());
                }
                let x = z.re;
                if (lo.is_finite() && near(x, lo)) || (hi.is_finite() && near(x, hi)) {
                    at(Placement::Boundary)
                } else if self.contains_real(x) {
                    at(Placement::Inside)
                } else {
                    outside(if x < lo { lo - x } else { x - hi })
                }
            }
        }
    }
}

/// Placement of every root, zero roots included, in `all_roots` order.
pub fn classify(rs: &RootSet, region: &RegionPredicate) -> Vec<Classification> {
    rs.all_roots().into_iter().map(|z| region.classify_point(z)).collect()
}

/// Real roots (zero roots included) lying in a real interval, by exact
/// membership of the real part.
pub fn real_roots_in(rs: &RootSet, interval: &RegionPredicate) -> Vec<f64> {
    assert_eq!(interval.kind, RegionKind::RealInterval, "real_roots_in needs an interval");
    rs.all_roots()
        .into_iter()
        .filter(|&z| is_near_real(z) && interval.contains_real(z.re))
        .map(|z| z.re)
        .collect()
}

/// Monic polynomial with the given roots, expanded in double precision.
pub fn monic_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        coeffs = next;
    }
    coeffs
}

/// Largest `|rebuilt_k - c_k| / max(1, |c_k|)` between the monic polynomial
/// rebuilt from the roots and the input divided by its leading coefficient.
pub fn reconstruction_error(p: &ExactPolynomial, rs: &RootSet) -> f64 {
    coefficient_mismatch(&p.to_real::<f64>(), &rs.all_roots())
}

/// Largest distance from a non-real root to the nearest computed conjugate.
pub fn conjugate_pairing_error(rs: &RootSet) -> f64 {
    rs.roots
        .iter()
        .filter(|z| z.im != 0.0)
        .map(|z| {
            rs.roots
                .iter()
                .map(|w| (w - z.conj()).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Sum of the roots against `-c_{d-1} / c_d`, relative to `max(1, |.|)`.
pub fn root_sum_error(p: &ExactPolynomial, rs: &RootSet) -> f64 {
    let d = p.degree().expect("nonzero");
    let lead = <f64 as Real>::from_bigint(&p.coeff(d));
    let expected = -<f64 as Real>::from_bigint(&p.coeff(d - 1)) / lead;
    let sum: Complex64 = rs.roots.iter().sum();
    (sum - expected).norm() / expected.abs().max(1.0)
}

/// Integer value of a polynomial at `-1`, handy for sign checks.
pub fn value_at_minus_one(p: &ExactPolynomial) -> BigInt {
    p.eval_integer(&BigInt::from(-1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subtree_engine::subtree_polynomial;
    use crate::tree_model::{FamilySpec, Tree};
    use rand::SeedableRng;

    fn p(c: &[i64]) -> ExactPolynomial {
        ExactPolynomial::from_i64s(c)
    }

    /// Closed forms of the claw's nonzero roots.
    fn claw_roots() -> [Complex64; 3] {
        let c = 3f64.cbrt();
        let s = 3f64.powf(5.0 / 6.0);
        [
            Complex64::new(-1.0 - c, 0.0),
            Complex64::new(-1.0 + c / 2.0, -s / 2.0),
            Complex64::new(-1.0 + c / 2.0, s / 2.0),
        ]
    }

    #[test]
    fn claw_roots_match_closed_form() {
        let rs = find_roots(&p(&[0, 4, 3, 3, 1])).unwrap();
        assert_eq!(rs.zero_multiplicity, 1);
        assert_eq!(rs.roots.len(), 3);
        for (got, want) in rs.roots.iter().zip(claw_roots()) {
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        }
        assert!((rs.roots[0].re + 2.442249570).abs() < 1e-9);
        assert!((rs.roots[1].re + 0.278875).abs() < 1e-6);
        assert!((rs.roots[2].im - 1.249025).abs() < 1e-6);
        assert!(rs.certified_real[0]);
        assert_eq!(rs.roots[0].im, 0.0);
        assert!((max_modulus(&rs) - global_radius()).abs() < 1e-9);
    }

    #[test]
    fn trivial_cases() {
        let rs = find_roots(&p(&[0, 2, 1])).unwrap();
        assert_eq!(rs.zero_multiplicity, 1);
        assert_eq!(rs.roots, vec![Complex64::new(-2.0, 0.0)]);
        assert_eq!(max_modulus(&rs), 2.0);

        let rs = find_roots(&p(&[0, 0, 0, 1])).unwrap();
        assert_eq!(rs.zero_multiplicity, 3);
        assert!(rs.roots.is_empty());
        assert_eq!(max_modulus(&rs), 0.0);

        assert_eq!(find_roots(&p(&[5])), Err(SolverError::DegreeTooLow));
        assert_eq!(find_roots(&ExactPolynomial::zero()), Err(SolverError::DegreeTooLow));
    }

    #[test]
    fn extended_precision_agrees() {
        let config = SolverConfig {
            precision: Precision::Extended,
            ..SolverConfig::default()
        };
        let rs = find_roots_with(&p(&[0, 4, 3, 3, 1]), &config).unwrap();
        assert_eq!(rs.precision, Precision::Extended);
        for (got, want) in rs.roots.iter().zip(claw_roots()) {
            assert!((got - want).norm() < 1e-14);
        }
        assert!(rs.max_residual() < 1e-28);
    }

    #[test]
    fn clustered_roots() {
        // (x + 1)^6 (x + 2): a sixfold root is only resolvable to about u^(1/6).
        let q = p(&[1, 1]).pow(6).mul(&p(&[2, 1]));
        let rs = find_roots(&q).unwrap();
        assert_eq!(rs.roots.len(), 7);
        assert!(rs.max_residual() <= 1e-10);
        assert!(rs.roots.iter().filter(|z| (*z + 1.0).norm() < 1e-2).count() == 6);

        // A double root next to simple ones rebuilds to full tolerance.
        let q = p(&[1, 1]).pow(2).mul(&p(&[2, 1])).mul(&p(&[1, 1, 1]));
        let rs = find_roots(&q).unwrap();
        assert!(reconstruction_error(&q, &rs) < 1e-8);
        assert!(root_sum_error(&q, &rs) < 1e-9);
    }

    #[test]
    fn classification() {
        let disk = RegionPredicate::disk_global();
        let b = Complex64::new(-1.0 - 3f64.cbrt(), 0.0);
        assert_eq!(disk.classify_point(b).placement, Placement::Boundary);
        assert_eq!(disk.classify_point(Complex64::new(-2.0, 0.0)).placement, Placement::Inside);
        let c = disk.classify_point(Complex64::new(0.0, 3.0));
        assert_eq!(c.placement, Placement::Outside);
        assert!((c.distance_outside - (3.0 - global_radius())).abs() < 1e-15);

        let annulus = RegionPredicate::annulus_order(4);
        assert_eq!(annulus.classify_point(Complex64::new(0.0, 0.0)).placement, Placement::Boundary);
        assert_eq!(annulus.classify_point(Complex64::new(-0.5, 0.1)).placement, Placement::Outside);
        assert_eq!(annulus.classify_point(Complex64::new(-2.0, 0.0)).placement, Placement::Inside);

        // order 4: disk radius equals the global one
        assert!((order_disk_radius(4) - global_radius()).abs() < 1e-15);
        assert_eq!(order_disk_radius(2), 2.0);

        let interval = RegionPredicate::real_interval(-1.0, 0.0, true, false);
        assert_eq!(interval.classify_point(Complex64::new(-0.5, 0.0)).placement, Placement::Inside);
        assert_eq!(interval.classify_point(Complex64::new(-0.5, 0.5)).placement, Placement::Outside);
        assert_eq!(interval.classify_point(Complex64::new(-2.0, 0.0)).placement, Placement::Outside);
        assert_eq!(interval.classify_point(Complex64::new(0.0, 0.0)).placement, Placement::Boundary);
    }

    #[test]
    fn real_roots_in_intervals() {
        let claw = find_roots(&p(&[0, 4, 3, 3, 1])).unwrap();
        let left = RegionPredicate::real_interval(f64::NEG_INFINITY, -global_radius(), false, false);
        assert!(real_roots_in(&claw, &left).is_empty());
        let positive = RegionPredicate::real_interval(0.0, f64::INFINITY, false, false);
        assert!(real_roots_in(&claw, &positive).is_empty());

        let p2 = find_roots(&p(&[0, 2, 1])).unwrap();
        let closure = RegionPredicate::real_interval(-2.0, -1.0, true, true);
        assert_eq!(real_roots_in(&p2, &closure), vec![-2.0]);
        let with_zero = RegionPredicate::real_interval(-3.0, 0.0, true, true);
        assert_eq!(real_roots_in(&p2, &with_zero), vec![-2.0, 0.0]);
    }

    #[test]
    fn solver_invariants_on_random_trees() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for n in 2..=18 {
            for _ in 0..5 {
                let phi = subtree_polynomial(&Tree::random(n, &mut rng));
                let rs = find_roots(&phi).unwrap();
                assert_eq!(rs.zero_multiplicity, 1);
                assert_eq!(rs.degree(), n);
                assert!(rs.max_residual() <= 1e-10);
                assert!(reconstruction_error(&phi, &rs) <= 1e-8);
                assert!(conjugate_pairing_error(&rs) <= 1e-10);
                assert!(root_sum_error(&phi, &rs) <= 1e-9);
                assert!(rs.roots.windows(2).all(|w| cmp_complex(&w[0], &w[1]) != Ordering::Greater));
            }
        }
    }

    #[test]
    fn spider_polynomials_solve() {
        for a in (1..=9).step_by(2) {
            for b in 1..=9 {
                let phi = subtree_polynomial(&FamilySpec::Spider { a, b }.build().unwrap());
                let rs = find_roots(&phi).unwrap();
                assert!(rs.max_residual() <= 1e-10);
                assert_eq!(rs.degree(), a + 2 * b + 1);
            }
        }
    }

    #[test]
    fn exact_certificates() {
        let q = p(&[0, 2, 1]);
        assert!(certify_real_root(&q, -2.0));
        assert!(certify_real_root(&q, -2.0 + 1e-12));
        assert!(!certify_real_root(&q, -1.5));
        // x^2 + 1 has no real root to certify
        assert!(!certify_real_root(&p(&[1, 0, 1]), 0.0));
    }

    fn random_tree(max_n: usize) -> impl proptest::strategy::Strategy<Value = Tree> {
        use proptest::prelude::*;
        (2..=max_n)
            .prop_flat_map(|n| proptest::collection::vec(0..n, n - 2))
            .prop_map(|seq| Tree::from_prufer(&seq))
    }

    proptest::proptest! {
        #[test]
        fn root_set_invariants(t in random_tree(18)) {
            let phi = subtree_polynomial(&t);
            let rs = find_roots(&phi).unwrap();
            proptest::prop_assert_eq!(rs.zero_multiplicity, 1);
            proptest::prop_assert_eq!(rs.roots.len() + rs.zero_multiplicity, t.order());
            proptest::prop_assert!(rs.max_residual() <= 1e-10);
            proptest::prop_assert!(reconstruction_error(&phi, &rs) <= 1e-8);
            proptest::prop_assert!(conjugate_pairing_error(&rs) <= 1e-10);
            proptest::prop_assert!(root_sum_error(&phi, &rs) <= 1e-9);
            proptest::prop_assert!(rs.max_modulus() <= global_radius() + 1e-9);
        }

        #[test]
        fn disk_classification_matches_modulus(re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let z = Complex64::new(re, im);
            let c = RegionPredicate::disk_global().classify_point(z);
            let gap = z.norm() - global_radius();
            match c.placement {
                Placement::Inside => proptest::prop_assert!(gap < 0.0),
                Placement::Outside => proptest::prop_assert!(gap > 0.0 && (c.distance_outside - gap).abs() < 1e-12),
                Placement::Boundary => proptest::prop_assert!(gap.abs() <= 1e-9 * z.norm().max(1.0)),
            }
        }

        #[test]
        fn annulus_is_inside_order_disk(n in 2usize..30, re in -4.0f64..3.0, im in -4.0f64..4.0) {
            let z = Complex64::new(re, im);
            let inside_annulus = RegionPredicate::annulus_order(n).classify_point(z).placement != Placement::Outside;
            let inside_disk = RegionPredicate::disk_order(n).classify_point(z).placement != Placement::Outside;
            proptest::prop_assert!(!inside_annulus || inside_disk);
        }
    }
}
