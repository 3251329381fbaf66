//! Global and local subtree polynomials.
//!
//! For a vertex `w` of a rooted tree let `f(w) = x * prod_c (1 + f(c))` over
//! the children `c` of `w`; `f(w)` counts the subtrees whose vertex nearest
//! the root is `w`. Rooting at `v` makes `f(v)` the local polynomial at `v`,
//! and summing `f` over all vertices gives the subtree polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly_core::ExactPolynomial;
use crate::tree_model::{FamilySpec, Forest, Tree, TreeError};

/// Largest order the subset-enumeration oracle accepts.
pub const BRUTE_FORCE_MAX_ORDER: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("order {order} exceeds the brute-force oracle limit {limit}")]
    OrderTooLargeForOracle { order: usize, limit: usize },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

/// `x * prod (1 + p_i)`.
fn x_times_product<'a>(factors: impl Iterator<Item = &'a ExactPolynomial>) -> ExactPolynomial {
    let one = ExactPolynomial::one();
    factors.fold(ExactPolynomial::x(), |acc, p| acc.mul(&p.add(&one)))
}

/// `f(w)` for every vertex of `t` rooted at `root`.
fn rooted_down_polynomials(t: &Tree, root: usize) -> (Vec<usize>, Vec<usize>, Vec<ExactPolynomial>) {
    let (parent, order) = t.rooted_order(root);
    let mut down = vec![ExactPolynomial::zero(); t.order()];
    for &w in order.iter().rev() {
        let children = t.neighbors(w).iter().filter(|&&c| c != parent[w]);
        down[w] = x_times_product(children.map(|&c| &down[c]));
    }
    (parent, order, down)
}

fn check_vertex(t: &Tree, v: usize) -> Result<(), EngineError> {
    if v < t.order() {
        Ok(())
    } else {
        Err(TreeError::VertexOutOfRange {
            vertex: v,
            order: t.order(),
        }
        .into())
    }
}

/// The local subtree polynomial at `v`: coefficient `k` counts the
/// `k`-vertex subtrees containing `v`.
pub fn local_polynomial(t: &Tree, v: usize) -> Result<ExactPolynomial, EngineError> {
    check_vertex(t, v)?;
    let (_, _, down) = rooted_down_polynomials(t, v);
    Ok(down[v].clone())
}

/// The subtree polynomial, from a single rooted pass.
pub fn subtree_polynomial(t: &Tree) -> ExactPolynomial {
    let (_, _, down) = rooted_down_polynomials(t, 0);
    down.iter().sum()
}

/// Sum of the subtree polynomials of the components.
pub fn forest_polynomial(f: &Forest) -> ExactPolynomial {
    f.components.iter().map(subtree_polynomial).sum()
}

/// Local polynomials at every vertex via two passes over one rooting.
///
/// `up(w)` is the local polynomial at the parent of `w` in the component of
/// `T - w` that contains the parent. It is assembled from prefix and suffix
/// products over siblings, so no polynomial division is needed.
pub fn all_local_polynomials(t: &Tree) -> Vec<ExactPolynomial> {
    let n = t.order();
    let (parent, order, down) = rooted_down_polynomials(t, 0);
    let one = ExactPolynomial::one();
    let mut up: Vec<Option<ExactPolynomial>> = vec![None; n];
    let mut local = vec![ExactPolynomial::zero(); n];
    for &p in &order {
        let above = up[p].as_ref().map(|u| u.add(&one));
        local[p] = match &above {
            Some(a) => down[p].mul(a),
            None => down[p].clone(),
        };
        let children: Vec<usize> = t.neighbors(p).iter().copied().filter(|&c| c != parent[p]).collect();
        if children.is_empty() {
            continue;
        }
        let factors: Vec<ExactPolynomial> = children.iter().map(|&c| down[c].add(&one)).collect();
        // suffix[i] = prod_{j >= i} factors[j]
        let mut suffix = vec![ExactPolynomial::one(); factors.len() + 1];
        for i in (0..factors.len()).rev() {
            suffix[i] = suffix[i + 1].mul(&factors[i]);
        }
        let mut prefix = match above {
            Some(a) => a.shift_up(1),
            None => ExactPolynomial::x(),
        };
        for (i, &c) in children.iter().enumerate() {
            up[c] = Some(prefix.mul(&suffix[i + 1]));
            prefix = prefix.mul(&factors[i]);
        }
    }
    local
}

/// Counts connected vertex subsets directly, by size. Exponential; for
/// cross-checking only.
pub fn brute_force_polynomial(t: &Tree) -> Result<ExactPolynomial, EngineError> {
    let n = t.order();
    if n > BRUTE_FORCE_MAX_ORDER {
        return Err(EngineError::OrderTooLargeForOracle {
            order: n,
            limit: BRUTE_FORCE_MAX_ORDER,
        });
    }
    let adjacency: Vec<u32> = (0..n)
        .map(|v| t.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut counts = vec![0u64; n + 1];
    for mask in 1u32..(1u32 << n) {
        let mut reach = mask & mask.wrapping_neg();
        loop {
            let mut grown = reach;
            let mut bits = reach;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                grown |= adjacency[v];
            }
            grown &= mask;
            if grown == reach {
                break;
            }
            reach = grown;
        }
        if reach == mask {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    Ok(ExactPolynomial::new(counts.into_iter().map(BigInt::from).collect()))
}

/// Maximum independent set size by the include/exclude tree program.
pub fn max_independent_set(t: &Tree) -> usize {
    let (parent, order) = t.rooted_order(0);
    let mut with = vec![1usize; t.order()];
    let mut without = vec![0usize; t.order()];
    for &w in order.iter().rev() {
        for &c in t.neighbors(w).iter().filter(|&&c| c != parent[w]) {
            with[w] += without[c];
            without[w] += with[c].max(without[c]);
        }
    }
    with[0].max(without[0])
}

/// The subtree polynomial together with the invariants it encodes.
#[derive(Clone, Debug, PartialEq)]
pub struct SubtreeProfile {
    pub polynomial: ExactPolynomial,
    pub local_polynomials: Vec<ExactPolynomial>,
    pub subtree_count: BigInt,
    pub mean_subtree_order: BigRational,
    pub independence_number: BigInt,
}

/// Computes the profile and cross-checks the independence number read off
/// the polynomial at `-1` against the tree program.
pub fn profile(t: &Tree) -> Result<SubtreeProfile, EngineError> {
    let polynomial = subtree_polynomial(t);
    let local_polynomials = all_local_polynomials(t);
    let one = BigInt::one();
    let subtree_count = polynomial.eval_integer(&one);
    let order_sum = polynomial.derivative().eval_integer(&one);
    let mean_subtree_order = BigRational::new(order_sum, subtree_count.clone());
    let independence_number = -polynomial.eval_integer(&-one);
    let dp = BigInt::from(max_independent_set(t));
    if independence_number != dp {
        return Err(EngineError::InternalInvariantViolation(format!(
            "-Phi(-1) = {independence_number} but the maximum independent set has size {dp}"
        )));
    }
    let n = t.order();
    let summed: ExactPolynomial = local_polynomials.iter().sum();
    if summed != polynomial.derivative().shift_up(1) {
        return Err(EngineError::InternalInvariantViolation(
            "local polynomials do not sum to x * Phi'".into(),
        ));
    }
    if polynomial.degree() != Some(n) || polynomial.coeff(1) != BigInt::from(n) || !polynomial.coeff(0).is_zero() {
        return Err(EngineError::InternalInvariantViolation(format!(
            "malformed subtree polynomial {polynomial} for order {n}"
        )));
    }
    Ok(SubtreeProfile {
        polynomial,
        local_polynomials,
        subtree_count,
        mean_subtree_order,
        independence_number,
    })
}

/// The closed-form subtree polynomial of a named family.
pub fn closed_form(spec: &FamilySpec) -> Result<ExactPolynomial, EngineError> {
    spec.validate()?;
    let one_plus_x = ExactPolynomial::from_i64s(&[1, 1]);
    let poly = match *spec {
        FamilySpec::Path(n) => {
            ExactPolynomial::new((0..=n).map(|k| if k == 0 { BigInt::zero() } else { BigInt::from(n - k + 1) }).collect())
        }
        FamilySpec::Star(n) => {
            let leaves = (n - 1) as u32;
            one_plus_x
                .pow(leaves)
                .shift_up(1)
                .add(&ExactPolynomial::monomial(BigInt::from(n - 1), 1))
        }
        FamilySpec::Spider { a, b } => {
            let core = one_plus_x
                .pow(a as u32)
                .mul(&ExactPolynomial::from_i64s(&[1, 1, 1]).pow(b as u32));
            let tail = ExactPolynomial::new(vec![BigInt::from(a + 2 * b), BigInt::from(b)]);
            core.add(&tail).shift_up(1)
        }
    };
    Ok(poly)
}
