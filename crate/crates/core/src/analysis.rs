//! Exhaustive scans of free trees against the root regions, real-axis
//! checks, and the spider construction that approximates any point of
//! `[-2, -1]` by a real subtree root.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::poly_core::{ExactPolynomial, Precision};
use crate::root_solver::{
    self, classify, conjugate_pairing_error, Classification, find_roots_with, global_radius, is_near_real, reconstruction_error,
    Placement, RegionKind, RegionPredicate, RootSet, SolverConfig, SolverError,
};
use crate::subtree_engine::{all_local_polynomials, closed_form, forest_polynomial, subtree_polynomial, EngineError};
use crate::tree_enum::{enumerate_free_trees, EnumError, TreeId};
use crate::tree_model::{FamilySpec, Tree, TreeError};

/// Largest order accepted by the scans.
pub const MAX_SCAN_ORDER: usize = 18;
/// Largest order accepted by the local-versus-deleted check.
pub const MAX_LOCAL_CHECK_ORDER: usize = 14;
/// Spider orders up to this are cross-checked against the full solver.
pub const CROSS_CHECK_MAX_ORDER: usize = 60;
pub const HISTOGRAM_BINS: usize = 64;
/// Absolute agreement required between a bisected spider root and the solver.
pub const SPIDER_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("order {order} outside {min}..={max}")]
    OrderOutOfRange { order: usize, min: usize, max: usize },
    #[error("tree {tree} of order {}: {source}", tree.order)]
    Solver { tree: TreeId, source: SolverError },
    #[error("counterexample at tree {tree} of order {}: {witness}", tree.order)]
    CounterexampleFound { tree: TreeId, witness: String },
    #[error("no witness within {epsilon:e} of {target} inside the order budget (best distance {best_distance:e})")]
    BudgetExhausted {
        target: f64,
        epsilon: f64,
        best_distance: f64,
        best: Option<ClosureWitness>,
    },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("spider ({a}, {b}): solver failed: {source}")]
    SpiderSolver { a: usize, b: usize, source: SolverError },
}

fn check_order(n: usize, min: usize, max: usize) -> Result<(), AnalysisError> {
    if (min..=max).contains(&n) {
        Ok(())
    } else {
        Err(AnalysisError::OrderOutOfRange { order: n, min, max })
    }
}

/// Runs `f` on a pool of `workers` threads, or the global pool when `None`.
fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// The regions named by `kinds`, instantiated for order `n`.
pub fn regions_for(n: usize, kinds: &[RegionKind]) -> Vec<RegionPredicate> {
    kinds
        .iter()
        .filter_map(|kind| match kind {
            RegionKind::DiskGlobal => Some(RegionPredicate::disk_global()),
            RegionKind::DiskOrderN => Some(RegionPredicate::disk_order(n)),
            RegionKind::AnnulusOrderN => Some(RegionPredicate::annulus_order(n)),
            RegionKind::RealInterval => None,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootHit {
    pub tree: TreeId,
    pub root: Complex64,
    pub region: RegionKind,
    /// Zero for boundary hits.
    pub distance_outside: f64,
}

/// One nonzero root in the root cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct RootRow {
    pub tree: TreeId,
    pub root: Complex64,
    pub residual: f64,
}

/// Counts of near-real nonzero roots in equal bins over `[-1 - 3^(1/3), 0]`,
/// plus the ones falling left or right of that range.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRootHistogram {
    pub lo: f64,
    pub hi: f64,
    pub bins: Vec<u64>,
    pub below: u64,
    pub above: u64,
}

impl Default for RealRootHistogram {
    fn default() -> Self {
        RealRootHistogram {
            lo: -global_radius(),
            hi: 0.0,
            bins: vec![0; HISTOGRAM_BINS],
            below: 0,
            above: 0,
        }
    }
}

impl RealRootHistogram {
    pub fn add(&mut self, x: f64) {
        if x < self.lo {
            self.below += 1;
        } else if x > self.hi {
            self.above += 1;
        } else {
            let width = (self.hi - self.lo) / self.bins.len() as f64;
            let k = (((x - self.lo) / width) as usize).min(self.bins.len() - 1);
            self.bins[k] += 1;
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.below += other.below;
        self.above += other.above;
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().sum::<u64>() + self.below + self.above
    }

    /// Count in bins lying entirely inside `[a, b]`.
    pub fn mass_within(&self, a: f64, b: f64) -> u64 {
        let width = (self.hi - self.lo) / self.bins.len() as f64;
        self.bins
            .iter()
            .enumerate()
            .filter(|&(k, _)| {
                let left = self.lo + k as f64 * width;
                left >= a && left + width <= b
            })
            .map(|(_, &c)| c)
            .sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    pub precision: Precision,
    pub workers: Option<usize>,
    /// Keep every nonzero root for the root-cloud output.
    pub collect_roots: bool,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub order: usize,
    pub tree_count: u64,
    pub max_root_modulus: f64,
    pub argmax_tree: Option<TreeId>,
    pub violations: Vec<RootHit>,
    pub boundary_hits: Vec<RootHit>,
    pub real_root_histogram: RealRootHistogram,
    /// Near-real nonzero roots of every tree, sorted ascending.
    pub real_roots: Vec<f64>,
    pub max_residual: f64,
    pub max_reconstruction_error: f64,
    pub max_pairing_error: f64,
    /// Trees whose roots needed extended precision.
    pub escalations: u64,
    pub root_cloud: Vec<RootRow>,
    pub elapsed: Duration,
}

impl ScanReport {
    pub fn violation_count(&self, kind: RegionKind) -> usize {
        self.violations.iter().filter(|h| h.region == kind).count()
    }

    pub fn boundary_count(&self, kind: RegionKind) -> usize {
        self.boundary_hits.iter().filter(|h| h.region == kind).count()
    }
}

struct TreeOutcome {
    id: TreeId,
    roots: RootSet,
    hits: Vec<(Complex64, RegionKind, Classification)>,
    reconstruction: f64,
    pairing: f64,
}

fn analyse_tree(
    id: TreeId,
    tree: &Tree,
    regions: &[RegionPredicate],
    config: &SolverConfig,
) -> Result<TreeOutcome, AnalysisError> {
    let phi = subtree_polynomial(tree);
    let roots = find_roots_with(&phi, config).map_err(|source| AnalysisError::Solver { tree: id, source })?;
    let all = roots.all_roots();
    let mut hits = Vec::new();
    for region in regions {
        for (z, c) in all.iter().zip(classify(&roots, region)) {
            if c.placement != Placement::Inside {
                hits.push((*z, region.kind, c));
            }
        }
    }
    Ok(TreeOutcome {
        id,
        reconstruction: reconstruction_error(&phi, &roots),
        pairing: conjugate_pairing_error(&roots),
        roots,
        hits,
    })
}

/// Solves and classifies every free tree of order `n`. Per-tree work runs
/// on the pool; the reduction walks the results in tree-id order so the
/// report does not depend on scheduling.
pub fn scan_order(n: usize, regions: &[RegionPredicate], options: &ScanOptions) -> Result<ScanReport, AnalysisError> {
    check_order(n, 2, MAX_SCAN_ORDER)?;
    let start = Instant::now();
    let config = SolverConfig {
        precision: options.precision,
        ..SolverConfig::default()
    };
    let trees: Vec<(TreeId, Tree)> = enumerate_free_trees(n)?.collect();
    let outcomes: Vec<Result<TreeOutcome, AnalysisError>> = with_pool(options.workers, || {
        trees
            .par_iter()
            .map(|(id, t)| analyse_tree(*id, t, regions, &config))
            .collect()
    });

    let mut report = ScanReport {
        order: n,
        tree_count: trees.len() as u64,
        max_root_modulus: 0.0,
        argmax_tree: None,
        violations: Vec::new(),
        boundary_hits: Vec::new(),
        real_root_histogram: RealRootHistogram::default(),
        real_roots: Vec::new(),
        max_residual: 0.0,
        max_reconstruction_error: 0.0,
        max_pairing_error: 0.0,
        escalations: 0,
        root_cloud: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for outcome in outcomes {
        let o = outcome?;
        let m = o.roots.max_modulus();
        if report.argmax_tree.is_none() || m > report.max_root_modulus {
            report.max_root_modulus = m;
            report.argmax_tree = Some(o.id);
        }
        for (root, region, c) in o.hits {
            let hit = RootHit {
                tree: o.id,
                root,
                region,
                distance_outside: c.distance_outside,
            };
            match c.placement {
                Placement::Outside => report.violations.push(hit),
                Placement::Boundary => report.boundary_hits.push(hit),
                Placement::Inside => {}
            }
        }
        for &z in o.roots.roots.iter().filter(|z| is_near_real(**z)) {
            report.real_root_histogram.add(z.re);
            report.real_roots.push(z.re);
        }
        report.max_residual = report.max_residual.max(o.roots.max_residual());
        report.max_reconstruction_error = report.max_reconstruction_error.max(o.reconstruction);
        report.max_pairing_error = report.max_pairing_error.max(o.pairing);
        if o.roots.precision == Precision::Extended && options.precision == Precision::Standard {
            report.escalations += 1;
        }
        if options.collect_roots {
            report.root_cloud.extend(o.roots.roots.iter().zip(&o.roots.residuals).map(|(&root, &residual)| RootRow {
                tree: o.id,
                root,
                residual,
            }));
        }
    }
    report.real_roots.sort_by(f64::total_cmp);
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Number of distinct values in a sorted list, merging neighbours closer
/// than `tol * max(1, |x|)`.
pub fn distinct_count(sorted: &[f64], tol: f64) -> usize {
    let mut count = 0;
    let mut last: Option<f64> = None;
    for &x in sorted {
        if last.is_none_or(|l| (x - l).abs() > tol * x.abs().max(1.0)) {
            count += 1;
        }
        last = Some(x);
    }
    count
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalReport {
    pub order: usize,
    pub tree_count: u64,
    /// Exact sign evaluations performed.
    pub exact_checks: u64,
    /// Real roots seen in `[-1 - 3^(1/3), -1)`, the only place they may lie.
    pub allowed_real_roots: u64,
}

/// Sample points `-k/m` for `k = 1..=m`.
fn negative_samples(samples: usize) -> Vec<BigRational> {
    let m = samples.max(2) as i64;
    (1..=m)
        .map(|k| BigRational::new(BigInt::from(-k), BigInt::from(m)))
        .collect()
}

/// Checks that no tree of order `n` has a real root in `(-inf, -1 - 3^(1/3))`,
/// `[-1, 0)` or `(0, inf)` beyond `tol`, and that `Phi < 0` on `[-1, 0)` and
/// `Phi' > 0` on `(-1, 0)` at `samples` exact rational points (both include
/// `-1/2` when `samples` is even).
pub fn verify_root_free_intervals(n: usize, samples: usize, workers: Option<usize>) -> Result<IntervalReport, AnalysisError> {
    check_order(n, 2, MAX_SCAN_ORDER)?;
    let tol = root_solver::BOUNDARY_TOLERANCE;
    let r = global_radius();
    let points = negative_samples(samples);
    let minus_one = BigRational::from_integer(BigInt::from(-1));
    let trees: Vec<(TreeId, Tree)> = enumerate_free_trees(n)?.collect();
    let config = SolverConfig::default();
    let results: Vec<Result<(u64, u64), AnalysisError>> = with_pool(workers, || {
        trees
            .par_iter()
            .map(|(id, t)| {
                let id = *id;
                let counterexample = |witness: String| AnalysisError::CounterexampleFound { tree: id, witness };
                let phi = subtree_polynomial(t);
                let dphi = phi.derivative();
                let mut checks = 0u64;
                for x in &points {
                    let v = phi.eval_exact(x);
                    if !v.is_negative() {
                        return Err(counterexample(format!("Phi({x}) = {v} is not negative")));
                    }
                    checks += 1;
                    if *x != minus_one {
                        let d = dphi.eval_exact(x);
                        if !d.is_positive() {
                            return Err(counterexample(format!("Phi'({x}) = {d} is not positive")));
                        }
                        checks += 1;
                    }
                }
                let rs = find_roots_with(&phi, &config).map_err(|source| AnalysisError::Solver { tree: id, source })?;
                let mut allowed = 0;
                for z in rs.roots.iter().filter(|z| is_near_real(**z)) {
                    let x = z.re;
                    let slack = tol * x.abs().max(1.0);
                    if x < -r - slack || (x >= -1.0 + slack && x < -slack) || x > slack {
                        return Err(counterexample(format!("real root {x:.17e}")));
                    }
                    allowed += 1;
                }
                Ok((checks, allowed))
            })
            .collect()
    });
    let mut report = IntervalReport {
        order: n,
        tree_count: trees.len() as u64,
        exact_checks: 0,
        allowed_real_roots: 0,
    };
    for res in results {
        let (checks, allowed) = res?;
        report.exact_checks += checks;
        report.allowed_real_roots += allowed;
    }
    Ok(report)
}

/// Sign of `y^a (y^2 + y + 1)^b - a - b (1 - y)` for `y > 0`, compared in
/// logarithms so huge exponents stay finite.
fn spider_sign(a: f64, b: f64, y: f64) -> bool {
    let rhs = a + b * (1.0 - y);
    if rhs <= 0.0 {
        return true;
    }
    a * y.ln() + b * (y * y + y + 1.0).ln() > rhs.ln()
}

/// Bisects a monotone predicate on `[lo, hi]` where `pred(lo)` is false and
/// `pred(hi)` is true.
fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Positive root `y*` of `y^a (y^2 + y + 1)^b - a - b (1 - y)`.
fn spider_positive_root(a: usize, b: usize) -> f64 {
    let (af, bf) = (a as f64, b as f64);
    let mut hi = 1.0;
    while !spider_sign(af, bf, hi) {
        hi *= 2.0;
    }
    bisect(0.0, hi, |y| y > 0.0 && spider_sign(af, bf, y))
}

/// The real subtree root `-1 - y*` of the spider with `a` (odd) bare legs
/// and `b` legs of length two.
pub fn spider_real_root(a: usize, b: usize) -> Result<f64, AnalysisError> {
    if a.is_multiple_of(2) || b == 0 {
        return Err(AnalysisError::InvalidParameters(format!("spider root needs odd a and b >= 1, got ({a}, {b})")));
    }
    Ok(-1.0 - spider_positive_root(a, b))
}

/// Distance from `x` to the nearest real root the full solver finds for the
/// spider's exact polynomial.
pub fn spider_solver_distance(a: usize, b: usize, x: f64) -> Result<f64, AnalysisError> {
    let phi = closed_form(&FamilySpec::Spider { a, b })?;
    let rs = find_roots_with(&phi, &SolverConfig::default()).map_err(|source| AnalysisError::SpiderSolver { a, b, source })?;
    Ok(rs
        .roots
        .iter()
        .filter(|z| is_near_real(**z))
        .map(|z| (z.re - x).abs())
        .fold(f64::INFINITY, f64::min))
}

/// `ln(rho^2 + rho + 1) / ln(rho + 1 + 1/rho)`, increasing from 0 to 1 on `(0, 1)`.
pub fn ratio_of_root(rho: f64) -> f64 {
    (rho * rho + rho + 1.0).ln() / (rho + 1.0 + 1.0 / rho).ln()
}

/// The root in `(0, 1)` of `y^t (y^2 + y + 1)^(1 - t) - 1`, found by
/// inverting `ratio_of_root`.
pub fn closure_root_map(t: f64) -> Result<f64, AnalysisError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(AnalysisError::InvalidParameters(format!("t = {t} outside (0, 1)")));
    }
    Ok(bisect(0.0, 1.0, |rho| rho > 0.0 && ratio_of_root(rho) >= t))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureWitness {
    /// Base leg counts; the witness spider is `(a * multiplier, b * multiplier)`.
    pub a: usize,
    pub b: usize,
    pub multiplier: usize,
    /// Real subtree root of the witness.
    pub root: f64,
    pub order: usize,
    /// Distance from `root` to the solver's nearest real root, when the
    /// witness is small enough to solve in full.
    pub solver_distance: Option<f64>,
}

impl ClosureWitness {
    pub fn legs(&self) -> (usize, usize) {
        (self.a * self.multiplier, self.b * self.multiplier)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureTarget {
    pub target: f64,
    pub epsilon: f64,
    /// Largest witness order the search may try.
    pub order_budget: usize,
    /// Try every spider up to `CROSS_CHECK_MAX_ORDER` before the
    /// continued-fraction search, which favours small witnesses.
    pub small_sweep: bool,
    pub result: Option<ClosureWitness>,
}

impl ClosureTarget {
    pub fn new(target: f64, epsilon: f64) -> Self {
        ClosureTarget {
            target,
            epsilon,
            order_budget: 1_000_000,
            small_sweep: true,
            result: None,
        }
    }
}

fn spider_order(a: usize, b: usize) -> usize {
    a + 2 * b + 1
}

/// Continued-fraction convergents `p/q` of `x` in `(0, 1)`.
fn convergents(x: f64, max_terms: usize) -> Vec<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut rem = x;
    let mut out = Vec::new();
    for _ in 0..max_terms {
        let a = rem.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u64;
        let (p2, q2) = (a.saturating_mul(p1).saturating_add(p0), a.saturating_mul(q1).saturating_add(q0));
        if q2 > 1 << 40 {
            break;
        }
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rem - a as f64;
        if frac < 1e-15 {
            break;
        }
        rem = 1.0 / frac;
    }
    out
}

/// Multipliers tried for each base ratio: odd values up to 99, then
/// `n -> 2n + 1`.
fn multipliers() -> impl Iterator<Item = usize> {
    let mut n = 1usize;
    std::iter::from_fn(move || {
        let current = n;
        n = if n < 99 { n + 2 } else { 2 * n + 1 };
        Some(current)
    })
}

/// Finds a spider whose real subtree root lies within `epsilon` of
/// `target`. Small spiders are swept first (when enabled); otherwise the
/// leg ratio comes from continued-fraction convergents of the limiting
/// ratio for `target`, scaled by an odd multiplier until close enough.
pub fn approximate_target_root(mut target: ClosureTarget) -> Result<ClosureTarget, AnalysisError> {
    let ClosureTarget { target: x, epsilon, .. } = target;
    if !(x > -2.0 && x < -1.0) {
        return Err(AnalysisError::InvalidParameters(format!("target {x} outside (-2, -1)")));
    }
    if !(epsilon > 0.0) {
        return Err(AnalysisError::InvalidParameters(format!("epsilon {epsilon} must be positive")));
    }
    let y_target = -1.0 - x;
    let mut best: Option<(f64, ClosureWitness)> = None;
    let mut consider = |a: usize, b: usize, multiplier: usize| -> Option<ClosureWitness> {
        let (la, lb) = (a * multiplier, b * multiplier);
        let root = -1.0 - spider_positive_root(la, lb);
        let witness = ClosureWitness {
            a,
            b,
            multiplier,
            root,
            order: spider_order(la, lb),
            solver_distance: None,
        };
        let d = (root - x).abs();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, witness.clone()));
        }
        (d <= epsilon).then_some(witness)
    };

    let mut found = None;
    if target.small_sweep {
        'sweep: for order in 4..=CROSS_CHECK_MAX_ORDER.min(target.order_budget) {
            for b in 1..order / 2 {
                let Some(a) = (order - 1).checked_sub(2 * b) else { continue };
                if a % 2 == 1 {
                    if let Some(w) = consider(a, b, 1) {
                        found = Some(w);
                        break 'sweep;
                    }
                }
            }
        }
    }
    if found.is_none() {
        let t_star = ratio_of_root(y_target);
        'ratios: for (p, q) in convergents(t_star, 40) {
            let (a, b) = (p as usize, (q - p) as usize);
            if a % 2 == 0 || b == 0 {
                continue;
            }
            let limit = closure_root_map(a as f64 / q as f64)?;
            if (limit - y_target).abs() >= epsilon {
                continue;
            }
            for n in multipliers() {
                if spider_order(a * n, b * n) > target.order_budget {
                    break;
                }
                if let Some(w) = consider(a, b, n) {
                    found = Some(w);
                    break 'ratios;
                }
            }
        }
    }
    let Some(mut witness) = found else {
        let (best_distance, best) = best.map_or((f64::INFINITY, None), |(d, w)| (d, Some(w)));
        return Err(AnalysisError::BudgetExhausted {
            target: x,
            epsilon,
            best_distance,
            best,
        });
    };
    if witness.order <= CROSS_CHECK_MAX_ORDER {
        let (la, lb) = witness.legs();
        let d = spider_solver_distance(la, lb, witness.root)?;
        if d > SPIDER_AGREEMENT {
            return Err(AnalysisError::Engine(EngineError::InternalInvariantViolation(format!(
                "spider ({la}, {lb}): bisected root {} is {d:e} from every solver root",
                witness.root
            ))));
        }
        witness.solver_distance = Some(d);
    }
    target.result = Some(witness);
    Ok(target)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalCheckReport {
    pub order: usize,
    pub tree_count: u64,
    pub comparisons: u64,
    /// Smallest `|Phi_{T,v}(z)| - |Phi_{T-v}(z)|` relative to `max(1, |Phi_{T-v}(z)|)`.
    pub min_margin: f64,
}

/// Checks `|Phi_{T,v}(z)| >= |Phi_{T-v}(z)|` (with relative slack `1e-10`)
/// for every tree of order `n`, every vertex, the point `-1 - 3^(1/3)` and
/// `samples` seeded random points with `1 + 3^(1/3) <= |z| <= 4`.
pub fn verify_local_vs_deleted(n: usize, samples: usize, seed: u64) -> Result<LocalCheckReport, AnalysisError> {
    check_order(n, 2, MAX_LOCAL_CHECK_ORDER)?;
    let r = global_radius();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut points = vec![Complex64::new(-r, 0.0)];
    points.extend((0..samples).map(|_| {
        let modulus = rng.gen_range(r..=4.0);
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        Complex64::from_polar(modulus, angle)
    }));
    let mut report = LocalCheckReport {
        order: n,
        tree_count: 0,
        comparisons: 0,
        min_margin: f64::INFINITY,
    };
    for (id, t) in enumerate_free_trees(n)? {
        report.tree_count += 1;
        for (v, local) in all_local_polynomials(&t).iter().enumerate() {
            let rest = forest_polynomial(&t.delete_vertex(v)?);
            let lc: Vec<f64> = local.to_real();
            let rc: Vec<f64> = rest.to_real();
            for &z in &points {
                let lhs = horner(&lc, z).norm();
                let rhs = horner(&rc, z).norm();
                let margin = (lhs - rhs) / rhs.max(1.0);
                report.comparisons += 1;
                report.min_margin = report.min_margin.min(margin);
                if margin < -1e-10 {
                    return Err(AnalysisError::CounterexampleFound {
                        tree: id,
                        witness: format!("vertex {v}, z = {z}: |local| = {lhs:e} < |deleted| = {rhs:e}"),
                    });
                }
            }
        }
    }
    Ok(report)
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `Phi_T` at an exact rational point; a convenience for reports.
pub fn exact_value(p: &ExactPolynomial, num: i64, den: i64) -> BigRational {
    p.eval_exact(&BigRational::new(BigInt::from(num), BigInt::from(den)))
}
