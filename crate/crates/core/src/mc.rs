//! The Maurer–Cartan engine for nilpotent dglas.
//!
//! A degree-1 element `z` of a nilpotent dgla is Maurer–Cartan when its
//! curvature `dz + ½[z, z]` vanishes. Degree-0 elements `γ` act on such `z`
//! by the gauge action
//!
//! ```text
//! exp(γ)·z = z + Σ_{k≥0} (ad γ)^k / (k+1)! · ([γ, z] − dγ)
//! ```
//!
//! a finite sum by nilpotency, and compose through the
//! Baker–Campbell–Hausdorff logarithm. These generic operations work over
//! any [`MCHost`]; the concrete [`TensorHost`] pairs an artinian
//! coefficient ring with a dgla and adds the m-adic machinery: square-zero
//! solving, order-by-order obstruction lifting, and the gauge-equivalence
//! search.

use std::collections::HashMap;
use std::fmt::Debug;

use thiserror::Error;

use crate::artin::{m_filtration, ArtinianLocalDga, MFiltration};
use crate::dgla::{tensor_dgla, Dgla, DglaError};
use crate::forms::FormsError;
use crate::linalg::{vec_add, vec_is_zero, vec_neg, vec_scale, vec_sub, Matrix};
use crate::scalar::{parity_sign, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McError {
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Algebra(#[from] DglaError),
    #[error("precondition failed: {reason}")]
    PreconditionFailed { reason: String },
}

/// A nilpotent dgla presented operationally: everything the curvature,
/// gauge, and BCH formulas need. Implementations may be finite-dimensional
/// coordinate hosts or lazy form-valued hosts; operations return errors
/// when the underlying arithmetic can overflow (polynomial degree bounds).
pub trait MCHost<S: Scalar> {
    type Elt: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elt;
    fn is_zero(&self, a: &Self::Elt) -> bool;
    fn add(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn neg(&self, a: &Self::Elt) -> Self::Elt;
    fn scale(&self, s: &S, a: &Self::Elt) -> Self::Elt;
    fn d(&self, a: &Self::Elt) -> Result<Self::Elt, McError>;
    fn bracket(&self, a: &Self::Elt, b: &Self::Elt) -> Result<Self::Elt, McError>;
    /// An upper bound on the nilpotency class: every bracket nested more
    /// than this many times vanishes. Controls series truncation.
    fn bracket_depth(&self) -> usize;

    fn sub(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt {
        self.add(a, &self.neg(b))
    }
}

/// The curvature `dz + ½[z, z]` of a degree-1 element.
pub fn curvature<S: Scalar, H: MCHost<S>>(host: &H, z: &H::Elt) -> Result<H::Elt, McError> {
    let dz = host.d(z)?;
    let half_bracket = host.scale(&S::inv_int(2), &host.bracket(z, z)?);
    Ok(host.add(&dz, &half_bracket))
}

/// Whether `z` satisfies the Maurer–Cartan equation exactly.
pub fn is_mc<S: Scalar, H: MCHost<S>>(host: &H, z: &H::Elt) -> Result<bool, McError> {
    Ok(host.is_zero(&curvature(host, z)?))
}

/// The gauge action of `exp(γ)` on `z`: the closed formula
/// `z + Σ_{k≥0} (ad γ)^k/(k+1)! · ([γ, z] − dγ)`, truncated by nilpotency.
/// Sends Maurer–Cartan elements to Maurer–Cartan elements.
pub fn gauge_act<S: Scalar, H: MCHost<S>>(
    host: &H,
    gamma: &H::Elt,
    z: &H::Elt,
) -> Result<H::Elt, McError> {
    let mut out = z.clone();
    // u_k = (ad γ)^k ([γ, z] − dγ), added with coefficient 1/(k+1)!.
    let mut u = host.sub(&host.bracket(gamma, z)?, &host.d(gamma)?);
    let mut factorial: i64 = 1;
    let mut k: i64 = 0;
    while !host.is_zero(&u) && k <= host.bracket_depth() as i64 {
        factorial *= k + 1;
        out = host.add(&out, &host.scale(&S::inv_int(factorial), &u));
        u = host.bracket(gamma, &u)?;
        k += 1;
    }
    Ok(out)
}

/// The Baker–Campbell–Hausdorff logarithm `log(exp(a) exp(b))` via the
/// Dynkin series, truncated at the host's bracket depth. On degree-0
/// elements this is the group law of the gauge group.
pub fn bch<S: Scalar, H: MCHost<S>>(
    host: &H,
    a: &H::Elt,
    b: &H::Elt,
) -> Result<H::Elt, McError> {
    let depth = host.bracket_depth().max(1);
    // Right-nested brackets of words in {a, b}, memoized by word; words
    // whose bracket has already vanished never reappear as suffixes.
    let mut nested: HashMap<Vec<bool>, H::Elt> = HashMap::new();
    nested.insert(vec![true], a.clone());
    nested.insert(vec![false], b.clone());
    let mut out = host.zero();
    for (word, blocks, block_factorials) in dynkin_tuples(depth) {
        let elt = nested_bracket(host, &mut nested, &word)?;
        if host.is_zero(&elt) {
            continue;
        }
        let sign: S = parity_sign(blocks as i64 - 1);
        let denom = blocks as i64 * word.len() as i64 * block_factorials;
        out = host.add(&out, &host.scale(&(sign * S::inv_int(denom)), &elt));
    }
    Ok(out)
}

fn nested_bracket<S: Scalar, H: MCHost<S>>(
    host: &H,
    memo: &mut HashMap<Vec<bool>, H::Elt>,
    word: &[bool],
) -> Result<H::Elt, McError> {
    if let Some(e) = memo.get(word) {
        return Ok(e.clone());
    }
    let tail = nested_bracket(host, memo, &word[1..])?;
    let head = memo[&vec![word[0]]].clone();
    let e = host.bracket(&head, &tail)?;
    memo.insert(word.to_vec(), e.clone());
    Ok(e)
}

/// All Dynkin index tuples up to total length `depth`: for each, the word
/// in {a = true, b = false}, the number of blocks `n`, and the product of
/// the block factorials `Π r_i! s_i!`. The series term for a tuple is
/// `(−1)^{n−1}/(n · |word| · Π r_i! s_i!)` times the right-nested bracket
/// of the word.
fn dynkin_tuples(depth: usize) -> Vec<(Vec<bool>, usize, i64)> {
    fn factorial(k: usize) -> i64 {
        (1..=k as i64).product()
    }
    let mut out = Vec::new();
    // Depth-first over block sequences (r_i, s_i) with r_i + s_i ≥ 1.
    let mut stack: Vec<(Vec<bool>, usize, i64)> = vec![(Vec::new(), 0, 1)];
    while let Some((word, blocks, denom)) = stack.pop() {
        if !word.is_empty() {
            out.push((word.clone(), blocks, denom));
        }
        let room = depth - word.len();
        for r in 0..=room {
            for s in 0..=(room - r) {
                if r + s == 0 {
                    continue;
                }
                let mut next = word.clone();
                next.extend(std::iter::repeat_n(true, r));
                next.extend(std::iter::repeat_n(false, s));
                stack.push((next, blocks + 1, denom * factorial(r) * factorial(s)));
            }
        }
    }
    out
}

/// An artinian coefficient ring tensored with a dgla: the nilpotent host
/// `m ⊗ g` together with the m-adic filtration that powers order-by-order
/// analysis. Elements are full coordinate vectors over the tensor basis
/// `m_a ⊗ g_i` (m-index outer, g-index inner).
#[derive(Clone, Debug)]
pub struct TensorHost<S> {
    algebra: Dgla<S>,
    filtration: MFiltration<S>,
    m_dim: usize,
    g_dim: usize,
}

impl<S: Scalar> TensorHost<S> {
    /// Builds the host from a validated artinian ring and a dgla.
    pub fn new(r: &ArtinianLocalDga<S>, g: &Dgla<S>) -> Result<Self, McError> {
        let filtration = m_filtration(r).ok_or_else(|| McError::PreconditionFailed {
            reason: "maximal ideal is not nilpotent".to_string(),
        })?;
        let algebra = tensor_dgla(&r.maximal_ideal_cdga(), g)?;
        Ok(TensorHost {
            algebra,
            filtration,
            m_dim: r.m_dim(),
            g_dim: g.dim(),
        })
    }

    pub fn algebra(&self) -> &Dgla<S> {
        &self.algebra
    }

    pub fn filtration(&self) -> &MFiltration<S> {
        &self.filtration
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    fn pair(&self, a: usize, i: usize) -> usize {
        a * self.g_dim + i
    }

    /// Element with a single coordinate `coeff · m_label ⊗ g_label`.
    pub fn coord_element(&self, terms: &[(&str, &str, S)]) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim()];
        for (m_label, g_label, coeff) in terms {
            let label = format!("{m_label}⊗{g_label}");
            let idx = self
                .algebra
                .index_of(&label)
                .unwrap_or_else(|| panic!("no basis element {label}"));
            v[idx] = v[idx].clone() + coeff.clone();
        }
        v
    }

    /// Human-readable rendering of an element over the tensor basis.
    pub fn render(&self, v: &[S]) -> String {
        let parts: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if c.is_one() {
                    self.algebra.label(i).to_string()
                } else {
                    format!("{}·{}", c, self.algebra.label(i))
                }
            })
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Whether every nonzero coordinate sits in tensor degree `deg`.
    pub fn is_homogeneous(&self, v: &[S], deg: i64) -> bool {
        v.iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || self.algebra.degree(i) == deg)
    }

    /// Largest `j` with the element in `m^j ⊗ g`; zero reports the
    /// nilpotency index.
    pub fn level_of(&self, v: &[S]) -> usize {
        let mut level = self.filtration.nilpotency_index();
        for i in 0..self.g_dim {
            let m_vec: Vec<S> = (0..self.m_dim).map(|a| v[self.pair(a, i)].clone()).collect();
            if vec_is_zero(&m_vec) {
                continue;
            }
            level = level.min(self.filtration.level_of(&m_vec));
        }
        level
    }

    /// Basis of the tensor-degree-`deg` part of `m^level ⊗ g`, as full
    /// coordinate vectors. The subspace is graded, so degree projections
    /// of a spanning set span the component.
    pub fn filtration_degree_basis(&self, level: usize, deg: i64) -> Vec<Vec<S>> {
        let mut candidates = Vec::new();
        for v in self.filtration.level_basis(level) {
            for i in 0..self.g_dim {
                let mut w = vec![S::zero(); self.dim()];
                let mut nonzero = false;
                for (a, c) in v.iter().enumerate() {
                    let idx = self.pair(a, i);
                    if !c.is_zero() && self.algebra.degree(idx) == deg {
                        w[idx] = c.clone();
                        nonzero = true;
                    }
                }
                if nonzero {
                    candidates.push(w);
                }
            }
        }
        let picked = Matrix::extend_span(self.dim(), &[], &candidates);
        picked.into_iter().map(|i| candidates[i].clone()).collect()
    }

    /// Solves `d(u) ≡ rhs mod m^{level+1} ⊗ g` with `u` in the
    /// degree-`deg` part of `m^level ⊗ g`; `None` when no solution exists.
    fn solve_d_mod(&self, level: usize, deg: i64, rhs: &[S]) -> Option<Vec<S>> {
        let u_basis = self.filtration_degree_basis(level, deg);
        let w_basis = self.filtration_degree_basis(level + 1, deg + 1);
        let mut cols: Vec<Vec<S>> = u_basis.iter().map(|u| self.algebra.d_full(u)).collect();
        cols.extend(w_basis.iter().cloned());
        let x = Matrix::from_cols_of(self.dim(), &cols).solve(rhs)?;
        let mut u = vec![S::zero(); self.dim()];
        for (r, ub) in u_basis.iter().enumerate() {
            u = vec_add(&u, &vec_scale(&x[r], ub));
        }
        Some(u)
    }
}

impl<S: Scalar> MCHost<S> for TensorHost<S> {
    type Elt = Vec<S>;

    fn zero(&self) -> Vec<S> {
        vec![S::zero(); self.dim()]
    }

    fn is_zero(&self, a: &Vec<S>) -> bool {
        vec_is_zero(a)
    }

    fn add(&self, a: &Vec<S>, b: &Vec<S>) -> Vec<S> {
        vec_add(a, b)
    }

    fn neg(&self, a: &Vec<S>) -> Vec<S> {
        vec_neg(a)
    }

    fn scale(&self, s: &S, a: &Vec<S>) -> Vec<S> {
        vec_scale(s, a)
    }

    fn d(&self, a: &Vec<S>) -> Result<Vec<S>, McError> {
        Ok(self.algebra.d_full(a))
    }

    fn bracket(&self, a: &Vec<S>, b: &Vec<S>) -> Result<Vec<S>, McError> {
        Ok(self.algebra.bracket_full(a, b))
    }

    fn bracket_depth(&self) -> usize {
        self.filtration.nilpotency_index().saturating_sub(1)
    }
}

/// Exact description of the Maurer–Cartan set when `m² = 0`: the bracket
/// term vanishes identically, so the set is the kernel of `d` on degree 1,
/// returned as a basis of full coordinate vectors.
pub fn mc_solve_square_zero<S: Scalar>(host: &TensorHost<S>) -> Result<Vec<Vec<S>>, McError> {
    if host.filtration.level_dim(2) > 0 {
        let witness = host.filtration.level_basis(2)[0].clone();
        let m_names: Vec<String> = witness
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| format!("{c}·m[{a}]"))
            .collect();
        return Err(McError::PreconditionFailed {
            reason: format!(
                "maximal ideal is not square-zero: m² contains {}",
                m_names.join(" + ")
            ),
        });
    }
    let deg1 = host.algebra.degree_indices(1).to_vec();
    let mut cols = Vec::with_capacity(deg1.len());
    for &i in &deg1 {
        let mut e = host.zero();
        e[i] = S::one();
        cols.push(host.algebra.d_full(&e));
    }
    let kernel = Matrix::from_cols_of(host.dim(), &cols).kernel_basis();
    Ok(kernel
        .into_iter()
        .map(|k| {
            let mut v = host.zero();
            for (pos, &i) in deg1.iter().enumerate() {
                v[i] = k[pos].clone();
            }
            v
        })
        .collect())
}

/// Outcome of one obstruction-lifting step.
#[derive(Clone, Debug, PartialEq)]
pub enum LiftOutcome<S> {
    /// A correction in `m^{k+1} ⊗ g` was found; the corrected element has
    /// curvature one filtration level deeper.
    Lifted { corrected: Vec<S> },
    /// No correction exists: the curvature class in
    /// `(m^{k+1}/m^{k+2}) ⊗ g²` is an obstruction. `class` is a
    /// representative and `description` its rendering.
    Obstructed { class: Vec<S>, description: String },
}

/// One step of order-by-order lifting: given `z` with curvature in
/// `m^{k+1} ⊗ g`, reads off the obstruction class in
/// `(m^{k+1}/m^{k+2}) ⊗ g²`, verifies it is closed, and either corrects
/// `z` so the curvature moves to `m^{k+2} ⊗ g` or reports the class.
pub fn obstruction_step<S: Scalar>(
    host: &TensorHost<S>,
    z: &[S],
    k: usize,
) -> Result<LiftOutcome<S>, McError> {
    assert!(
        host.is_homogeneous(z, 1),
        "Maurer–Cartan candidates are degree-1 elements"
    );
    let z = z.to_vec();
    let c = curvature(host, &z)?;
    if vec_is_zero(&c) {
        return Ok(LiftOutcome::Lifted { corrected: z });
    }
    let level = host.level_of(&c);
    if level < k + 1 {
        return Err(McError::PreconditionFailed {
            reason: format!(
                "curvature lies in m^{level} ⊗ g but not in m^{} ⊗ g",
                k + 1
            ),
        });
    }
    // Bianchi gives d(curvature) = −[z, curvature] ∈ m^{k+2} ⊗ g, so the
    // class is closed in the quotient; anything else is an internal error.
    let dc = host.algebra.d_full(&c);
    assert!(
        host.level_of(&dc) >= k + 2,
        "curvature class is not closed: the host algebra is inconsistent"
    );
    match host.solve_d_mod(k + 1, 1, &vec_neg(&c)) {
        Some(u) => {
            let corrected = vec_add(&z, &u);
            let new_c = curvature(host, &corrected)?;
            debug_assert!(vec_is_zero(&new_c) || host.level_of(&new_c) >= k + 2);
            Ok(LiftOutcome::Lifted { corrected })
        }
        None => Ok(LiftOutcome::Obstructed {
            description: host.render(&c),
            class: c,
        }),
    }
}

/// Outcome of the gauge-equivalence search.
#[derive(Clone, Debug, PartialEq)]
pub enum GaugeOutcome<S> {
    /// `gauge_act(gamma, z) = z'` exactly (verified before returning).
    Found { gamma: Vec<S> },
    /// The order-by-order search failed at filtration level `order`. This
    /// is not a proof of inequivalence in general — each stage commits to
    /// one solution of its linear problem — but the answer is complete
    /// when `m² = 0`, where the single stage is an exact linear decision.
    NotFoundAtOrder { order: usize },
}

/// Searches for a gauge element carrying `z` to `z'`, order by order
/// through the m-adic filtration. Both inputs must be Maurer–Cartan.
pub fn gauge_equivalent<S: Scalar>(
    host: &TensorHost<S>,
    z: &[S],
    z_prime: &[S],
) -> Result<GaugeOutcome<S>, McError> {
    let (z, z_prime) = (z.to_vec(), z_prime.to_vec());
    assert!(is_mc(host, &z)?, "gauge search requires Maurer–Cartan inputs");
    assert!(
        is_mc(host, &z_prime)?,
        "gauge search requires Maurer–Cartan inputs"
    );
    let n = host.filtration.nilpotency_index();
    let mut gamma = MCHost::<S>::zero(host);
    for k in 1..n {
        let w = gauge_act(host, &gamma, &z)?;
        let r = vec_sub(&w, &z_prime);
        if vec_is_zero(&r) {
            return Ok(GaugeOutcome::Found { gamma });
        }
        debug_assert!(host.level_of(&r) >= k);
        // First-order stage: for δ ∈ m^k ⊗ g the action changes w by
        // −dδ mod m^{k+1}, so we need dδ ≡ w − z' there.
        match host.solve_d_mod(k, 0, &r) {
            Some(delta) => gamma = bch(host, &delta, &gamma)?,
            None => return Ok(GaugeOutcome::NotFoundAtOrder { order: k }),
        }
    }
    let w = gauge_act(host, &gamma, &z)?;
    if w == z_prime {
        Ok(GaugeOutcome::Found { gamma })
    } else {
        Ok(GaugeOutcome::NotFoundAtOrder { order: n })
    }
}
