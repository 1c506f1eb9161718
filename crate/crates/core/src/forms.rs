//! Polynomial differential forms on standard simplices.
//!
//! A form on the n-simplex is a polynomial in the barycentric coordinates
//! `t_1, ..., t_n` (with `t_0 = 1 - t_1 - ... - t_n` eliminated, so the
//! representation is a unique normal form) times square-free exterior
//! monomials in `dt_1, ..., dt_n`. The face and degeneracy conventions are
//! fixed once here: the i-th face of the n-simplex omits vertex i, and
//! coordinates renumber accordingly. On the interval this makes
//! `face_0(t) = 1` and `face_1(t) = 0`.
//!
//! Every form carries a maximum polynomial degree bound; operations that
//! would exceed it fail loudly with [`FormsError::DegreeOverflow`] instead
//! of truncating. The differential and the simplicial operators never raise
//! the polynomial degree, so only products can overflow.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Default polynomial degree bound; large enough for the gauge and
/// contraction paths over the shipped artinian bases, whose exponentials
/// are finite sums controlled by the nilpotency index.
pub const DEFAULT_POLY_BOUND: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormsError {
    #[error("polynomial degree {degree} exceeds the bound {bound}")]
    DegreeOverflow { degree: u32, bound: u32 },
}

/// One monomial `t^powers dt_J`: polynomial exponents of `t_1..t_n` and a
/// sorted square-free list of exterior indices (0-based: entry `j` stands
/// for `dt_{j+1}`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    pub powers: Vec<u32>,
    pub dts: Vec<usize>,
}

impl Monomial {
    /// The constant monomial on the n-simplex.
    pub fn one(n: usize) -> Self {
        Monomial {
            powers: vec![0; n],
            dts: Vec::new(),
        }
    }

    pub fn poly_degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    /// Form degree = exterior word length.
    pub fn form_degree(&self) -> usize {
        self.dts.len()
    }

    /// Product of monomials with the Koszul sign from merging the exterior
    /// words; `None` when a `dt` repeats.
    pub fn wedge(&self, other: &Monomial) -> Option<(Monomial, i64)> {
        let powers = self
            .powers
            .iter()
            .zip(&other.powers)
            .map(|(a, b)| a + b)
            .collect();
        // Count inversions while merging the sorted exterior words: each
        // pair (j in self, k in other) with k < j contributes a sign flip.
        let mut dts = Vec::with_capacity(self.dts.len() + other.dts.len());
        let mut inversions = 0usize;
        let (mut p, mut q) = (0, 0);
        while p < self.dts.len() || q < other.dts.len() {
            if q >= other.dts.len() {
                dts.push(self.dts[p]);
                p += 1;
            } else if p >= self.dts.len() {
                dts.push(other.dts[q]);
                q += 1;
            } else if self.dts[p] < other.dts[q] {
                dts.push(self.dts[p]);
                p += 1;
            } else if self.dts[p] > other.dts[q] {
                inversions += self.dts.len() - p;
                dts.push(other.dts[q]);
                q += 1;
            } else {
                return None;
            }
        }
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Some((Monomial { powers, dts }, sign))
    }

    /// Exterior derivative of the monomial: integer combinations of
    /// monomials, `d(t^a dt_J) = sum_i a_i t^(a - e_i) dt_i ∧ dt_J`.
    pub fn differential(&self) -> Vec<(Monomial, i64)> {
        let mut out = Vec::new();
        for (i, &a) in self.powers.iter().enumerate() {
            if a == 0 || self.dts.contains(&i) {
                continue;
            }
            let mut powers = self.powers.clone();
            powers[i] -= 1;
            let pos = self.dts.iter().filter(|&&j| j < i).count();
            let mut dts = self.dts.clone();
            dts.insert(pos, i);
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            out.push((Monomial { powers, dts }, a as i64 * sign));
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &a) in self.powers.iter().enumerate() {
            match a {
                0 => {}
                1 => parts.push(format!("t{}", i + 1)),
                _ => parts.push(format!("t{}^{}", i + 1, a)),
            }
        }
        for &j in &self.dts {
            parts.push(format!("dt{}", j + 1));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Polynomial differential form on the n-simplex, in the normal form with
/// `t_0` eliminated. Zero coefficients are never stored, so structural
/// equality is semantic equality (the degree bound is bookkeeping and does
/// not enter comparisons).
#[derive(Clone, Debug)]
pub struct SullivanForm<S> {
    n: usize,
    bound: u32,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> PartialEq for SullivanForm<S> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

impl<S: Scalar + Eq> Eq for SullivanForm<S> {}

impl<S: Scalar> SullivanForm<S> {
    pub fn zero(n: usize, bound: u32) -> Self {
        SullivanForm {
            n,
            bound,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, bound: u32, c: S) -> Self {
        let mut form = Self::zero(n, bound);
        if !c.is_zero() {
            form.terms.insert(Monomial::one(n), c);
        }
        form
    }

    /// The coordinate `t_i`, `1 <= i <= n`.
    pub fn coordinate(n: usize, bound: u32, i: usize) -> Self {
        assert!((1..=n).contains(&i), "coordinate index out of range");
        let mut mono = Monomial::one(n);
        mono.powers[i - 1] = 1;
        let mut form = Self::zero(n, bound);
        form.terms.insert(mono, S::one());
        form
    }

    /// The 1-form `dt_i`, `1 <= i <= n`.
    pub fn dt(n: usize, bound: u32, i: usize) -> Self {
        assert!((1..=n).contains(&i), "dt index out of range");
        let mut mono = Monomial::one(n);
        mono.dts.push(i - 1);
        let mut form = Self::zero(n, bound);
        form.terms.insert(mono, S::one());
        form
    }

    /// Assembles a form from monomial terms, rejecting polynomial degrees
    /// above the bound.
    pub fn from_terms(
        n: usize,
        bound: u32,
        terms: impl IntoIterator<Item = (Monomial, S)>,
    ) -> Result<Self, FormsError> {
        let mut form = Self::zero(n, bound);
        for (mono, coeff) in terms {
            assert_eq!(mono.powers.len(), n, "monomial lives on the wrong simplex");
            if mono.poly_degree() > bound {
                return Err(FormsError::DegreeOverflow {
                    degree: mono.poly_degree(),
                    bound,
                });
            }
            form.add_term(mono, coeff);
        }
        Ok(form)
    }

    pub fn simplex_dim(&self) -> usize {
        self.n
    }

    pub fn poly_bound(&self) -> u32 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> S {
        self.terms.get(mono).cloned().unwrap_or_else(S::zero)
    }

    /// Form degree when homogeneous; `None` for 0 or mixed-degree sums.
    pub fn form_degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(Monomial::form_degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    fn add_term(&mut self, mono: Monomial, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "forms live on different simplices");
        let mut out = self.clone();
        for (mono, coeff) in &other.terms {
            out.add_term(mono.clone(), coeff.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff = -coeff.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.n, self.bound);
        }
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff = coeff.clone() * s.clone();
        }
        out
    }

    /// Scales each monomial by `(-1)^{k·(form degree)}`: the Koszul sign
    /// for moving a degree-k element past the monomial's exterior part.
    pub fn koszul_scale(&self, k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            return self.clone();
        }
        let mut out = self.clone();
        for (mono, coeff) in out.terms.iter_mut() {
            if mono.form_degree() % 2 == 1 {
                *coeff = -coeff.clone();
            }
        }
        out
    }

    /// Exterior derivative. The polynomial degree never increases, so the
    /// bound cannot overflow on well-formed input; the `Result` mirrors the
    /// other graded operations for uniform propagation.
    pub fn omega_d(&self) -> Result<Self, FormsError> {
        let mut out = Self::zero(self.n, self.bound);
        for (mono, coeff) in &self.terms {
            for (dm, k) in mono.differential() {
                out.add_term(dm, coeff.clone() * S::from_int(k));
            }
        }
        Ok(out)
    }

    /// Graded-commutative wedge product.
    pub fn wedge(&self, other: &Self) -> Result<Self, FormsError> {
        assert_eq!(self.n, other.n, "forms live on different simplices");
        let bound = self.bound.max(other.bound);
        let mut out = Self::zero(self.n, bound);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let Some((mono, sign)) = ma.wedge(mb) else {
                    continue;
                };
                if mono.poly_degree() > bound {
                    return Err(FormsError::DegreeOverflow {
                        degree: mono.poly_degree(),
                        bound,
                    });
                }
                out.add_term(mono, ca.clone() * cb.clone() * S::from_int(sign));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self, FormsError> {
        let mut out = Self::constant(self.n, self.bound, S::one());
        for _ in 0..k {
            out = out.wedge(self)?;
        }
        Ok(out)
    }

    /// Pullback along the algebra map sending `t_j` to `images[j-1]`; the
    /// images must be 0-forms on a common target simplex. `dt_j` is sent to
    /// the derivative of the image, so the result commutes with `d`.
    pub fn substitute(
        &self,
        target_n: usize,
        target_bound: u32,
        images: &[SullivanForm<S>],
    ) -> Result<Self, FormsError> {
        assert_eq!(images.len(), self.n, "one image per coordinate");
        for img in images {
            assert_eq!(img.n, target_n, "image on the wrong simplex");
            assert_eq!(img.form_degree().unwrap_or(0), 0, "images must be 0-forms");
        }
        let mut out = Self::zero(target_n, target_bound);
        for (mono, coeff) in &self.terms {
            let mut term = Self::constant(target_n, target_bound, coeff.clone());
            for (j, &a) in mono.powers.iter().enumerate() {
                if a > 0 {
                    term = term.wedge(&images[j].pow(a)?)?;
                }
            }
            for &j in &mono.dts {
                term = term.wedge(&images[j].omega_d()?)?;
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Evaluation at a rational point of the simplex (an algebra map to
    /// the 0-simplex): returns the constant value of the 0-form part;
    /// positive-degree terms vanish because `d(point) = 0`.
    pub fn evaluate(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.n, "one value per coordinate");
        let images: Vec<SullivanForm<S>> = point
            .iter()
            .map(|v| SullivanForm::constant(0, self.bound, v.clone()))
            .collect();
        let res = self
            .substitute(0, self.bound, &images)
            .expect("constants cannot overflow the degree bound");
        res.coeff(&Monomial::one(0))
    }
}

/// Pullback along the i-th coface (`0 <= i <= n`): the face of the
/// n-simplex omitting vertex i, with coordinates renumbered. With `t_0`
/// eliminated this reads, for `i >= 1`: `t_j -> s_j` (j < i), `t_i -> 0`,
/// `t_j -> s_{j-1}` (j > i); and for `i = 0`: `t_1 -> 1 - s_1 - ... -
/// s_{n-1}`, `t_j -> s_{j-1}`.
pub fn face_map<S: Scalar>(i: usize, w: &SullivanForm<S>) -> SullivanForm<S> {
    let n = w.simplex_dim();
    assert!(n >= 1, "the 0-simplex has no faces");
    assert!(i <= n, "face index out of range");
    let m = n - 1;
    let bound = w.poly_bound();
    let images: Vec<SullivanForm<S>> = (1..=n)
        .map(|j| {
            if j < i {
                SullivanForm::coordinate(m, bound, j)
            } else if j == i {
                SullivanForm::zero(m, bound)
            } else if j == 1 {
                // i = 0, j = 1: the eliminated target coordinate s_0.
                let mut img = SullivanForm::constant(m, bound, S::one());
                for k in 1..=m {
                    img = img.sub(&SullivanForm::coordinate(m, bound, k));
                }
                img
            } else {
                SullivanForm::coordinate(m, bound, j - 1)
            }
        })
        .collect();
    w.substitute(m, bound, &images)
        .expect("affine substitution preserves the degree bound")
}

/// Pullback along the i-th codegeneracy (`0 <= i <= n`), collapsing the
/// edge (i, i+1): `t_j -> s_j` (j < i), `t_i -> s_i + s_{i+1}`,
/// `t_j -> s_{j+1}` (j > i); the `i = 0` case only renumbers since `t_0`
/// is eliminated.
pub fn degeneracy_map<S: Scalar>(i: usize, w: &SullivanForm<S>) -> SullivanForm<S> {
    let n = w.simplex_dim();
    assert!(i <= n, "degeneracy index out of range");
    let m = n + 1;
    let bound = w.poly_bound();
    let images: Vec<SullivanForm<S>> = (1..=n)
        .map(|j| {
            if j < i {
                SullivanForm::coordinate(m, bound, j)
            } else if j == i {
                SullivanForm::coordinate(m, bound, i)
                    .add(&SullivanForm::coordinate(m, bound, i + 1))
            } else {
                SullivanForm::coordinate(m, bound, j + 1)
            }
        })
        .collect();
    w.substitute(m, bound, &images)
        .expect("affine substitution preserves the degree bound")
}

impl<S: Scalar> fmt::Display for SullivanForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(mono, coeff)| {
                if *mono == Monomial::one(self.n) {
                    format!("{coeff}")
                } else if coeff.is_one() {
                    format!("{mono}")
                } else {
                    format!("{coeff}·{mono}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
