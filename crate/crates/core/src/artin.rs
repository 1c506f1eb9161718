//! Artinian local non-positively graded commutative dg algebras `(R, m)`:
//! constructors, validation, and the m-adic filtration `m ⊇ m² ⊇ … ⊇ m^N = 0`
//! that drives order-by-order lifting of Maurer-Cartan elements.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::check::ValidationReport;
use crate::dgla::{Cdga, DglaError, SparseVec};
use crate::linalg::{vec_is_zero, Matrix};
use crate::scalar::{parity_sign, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArtinError {
    #[error(transparent)]
    Algebra(#[from] DglaError),
    #[error("unknown label {label:?}")]
    UnknownLabel { label: String },
}

/// Artinian local dg algebra: a finite-dimensional graded-commutative dg
/// algebra with a distinguished unit and a distinguished basis of the
/// maximal ideal, all in degrees <= 0. Validity is checked by
/// [`validate_artinian`], not assumed, so user-supplied algebras are
/// admissible inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct ArtinianLocalDga<S> {
    algebra: Cdga<S>,
    unit: usize,
    m_basis: Vec<usize>,
}

impl<S: Scalar> ArtinianLocalDga<S> {
    pub fn new(
        labels: Vec<String>,
        degrees: Vec<i64>,
        mul: BTreeMap<(usize, usize), SparseVec<S>>,
        diff: Matrix<S>,
        unit_label: &str,
        m_labels: &[&str],
    ) -> Result<Self, ArtinError> {
        let algebra = Cdga::new(labels, degrees, mul, diff)?;
        let find = |label: &str| {
            (0..algebra.dim())
                .find(|&i| algebra.label(i) == label)
                .ok_or_else(|| ArtinError::UnknownLabel {
                    label: label.to_string(),
                })
        };
        let unit = find(unit_label)?;
        let m_basis = m_labels
            .iter()
            .map(|l| find(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ArtinianLocalDga {
            algebra,
            unit,
            m_basis,
        })
    }

    pub fn algebra(&self) -> &Cdga<S> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn m_dim(&self) -> usize {
        self.m_basis.len()
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn m_indices(&self) -> &[usize] {
        &self.m_basis
    }

    pub fn label(&self, i: usize) -> &str {
        self.algebra.label(i)
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.algebra.degree(i)
    }

    pub fn m_label(&self, a: usize) -> &str {
        self.algebra.label(self.m_basis[a])
    }

    pub fn m_degree(&self, a: usize) -> i64 {
        self.algebra.degree(self.m_basis[a])
    }

    /// The maximal ideal as a standalone coefficient algebra, in the
    /// distinguished m-basis. Faithful when the algebra validates (products
    /// and differentials of ideal elements stay inside the ideal).
    pub fn maximal_ideal_cdga(&self) -> Cdga<S> {
        let m = self.m_dim();
        let pos: BTreeMap<usize, usize> = self
            .m_basis
            .iter()
            .enumerate()
            .map(|(a, &i)| (i, a))
            .collect();
        let labels = (0..m).map(|a| self.m_label(a).to_string()).collect();
        let degrees = (0..m).map(|a| self.m_degree(a)).collect();
        let mut mul = BTreeMap::new();
        for a in 0..m {
            for b in a..m {
                let prod: SparseVec<S> = self
                    .algebra
                    .mul_elems(self.m_basis[a], self.m_basis[b])
                    .into_iter()
                    .filter_map(|(c, coeff)| pos.get(&c).map(|&cc| (cc, coeff)))
                    .collect();
                if !prod.is_empty() {
                    mul.insert((a, b), prod);
                }
            }
        }
        let mut diff = Matrix::zeros(m, m);
        for a in 0..m {
            for (c, coeff) in self.algebra.d_elem(self.m_basis[a]) {
                if let Some(&cc) = pos.get(&c) {
                    diff[(cc, a)] = coeff;
                }
            }
        }
        Cdga::new(labels, degrees, mul, diff).expect("ideal basis is well-formed")
    }
}

/// `k[e]/e^n` concentrated in degree 0 with zero differential: basis
/// `1, eps, eps^2, ..., eps^{n-1}`.
pub fn make_dual_numbers<S: Scalar>(n: usize) -> ArtinianLocalDga<S> {
    assert!(n >= 2, "need at least the dual numbers");
    let labels: Vec<String> = (0..n)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "eps".to_string(),
            _ => format!("eps^{k}"),
        })
        .collect();
    let mut mul = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            if i + j < n {
                mul.insert((i, j), vec![(i + j, S::one())]);
            }
        }
    }
    let m_labels: Vec<&str> = labels[1..].iter().map(String::as_str).collect();
    ArtinianLocalDga::new(
        labels.clone(),
        vec![0; n],
        mul,
        Matrix::zeros(n, n),
        "1",
        &m_labels,
    )
    .expect("dual numbers are well-formed")
}

/// Checks every defining property of an artinian local dg algebra:
/// degrees <= 0 with the right degree bookkeeping, the residue-field
/// splitting basis = {unit} ∪ m-basis, unitality, graded commutativity,
/// associativity, the derivation rule and `d² = 0`, the ideal property of
/// `m` (stable under products and `d`), and nilpotency of `m`.
pub fn validate_artinian<S: Scalar>(r: &ArtinianLocalDga<S>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let alg = &r.algebra;
    let n = alg.dim();
    let dense = |v: &SparseVec<S>| {
        let mut out = vec![S::zero(); n];
        for (c, coeff) in v {
            out[*c] = out[*c].clone() + coeff.clone();
        }
        out
    };
    let mul_vec = |u: &[S], v: &[S]| {
        let mut out = vec![S::zero(); n];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                for (c, coeff) in alg.mul_elems(a, b) {
                    out[c] = out[c].clone() + ua.clone() * vb.clone() * coeff;
                }
            }
        }
        out
    };
    let unit_vec = |i: usize| {
        let mut v = vec![S::zero(); n];
        v[i] = S::one();
        v
    };

    // Degrees: everything in degree <= 0, unit in degree 0, d raises the
    // degree by one, products add degrees.
    'degree: {
        for i in 0..n {
            if alg.degree(i) > 0 {
                report.push_first("degree", || {
                    format!("{} has positive degree {}", alg.label(i), alg.degree(i))
                });
                break 'degree;
            }
        }
        if alg.degree(r.unit) != 0 {
            report.push_first("degree", || {
                format!("unit {} has degree {}", alg.label(r.unit), alg.degree(r.unit))
            });
            break 'degree;
        }
        for a in 0..n {
            for (c, coeff) in alg.d_elem(a) {
                if !coeff.is_zero() && alg.degree(c) != alg.degree(a) + 1 {
                    report.push_first("degree", || {
                        format!(
                            "d({}) has a component on {} of degree {}, expected {}",
                            alg.label(a),
                            alg.label(c),
                            alg.degree(c),
                            alg.degree(a) + 1
                        )
                    });
                    break 'degree;
                }
            }
            for b in a..n {
                for (c, coeff) in alg.mul_elems(a, b) {
                    if !coeff.is_zero() && alg.degree(c) != alg.degree(a) + alg.degree(b) {
                        report.push_first("degree", || {
                            format!(
                                "{}·{} has a component on {} of degree {}, expected {}",
                                alg.label(a),
                                alg.label(b),
                                alg.label(c),
                                alg.degree(c),
                                alg.degree(a) + alg.degree(b)
                            )
                        });
                        break 'degree;
                    }
                }
            }
        }
    }

    // Residue field: the basis splits as {unit} plus the m-basis, so that
    // R/m is one-dimensional in degree 0.
    'residue: {
        if r.m_basis.contains(&r.unit) {
            report.push_first("residue_field", || {
                format!("unit {} listed in the m-basis", alg.label(r.unit))
            });
            break 'residue;
        }
        for (k, &i) in r.m_basis.iter().enumerate() {
            if r.m_basis[..k].contains(&i) {
                report.push_first("residue_field", || {
                    format!("m-basis repeats {}", alg.label(i))
                });
                break 'residue;
            }
        }
        if r.m_basis.len() + 1 != n {
            report.push_first("residue_field", || {
                format!(
                    "basis has {} elements but unit + m-basis accounts for {}",
                    n,
                    r.m_basis.len() + 1
                )
            });
            break 'residue;
        }
    }

    // Unit law.
    'unit: for i in 0..n {
        let prod = mul_vec(&unit_vec(r.unit), &unit_vec(i));
        if prod != unit_vec(i) {
            report.push_first("unit", || {
                format!("1·{} != {}", alg.label(i), alg.label(i))
            });
            break 'unit;
        }
    }

    // Graded commutativity: consistency of pairs supplied in both orders,
    // and odd squares vanish in characteristic zero.
    'comm: for a in 0..n {
        if alg.degree(a) % 2 != 0 {
            let sq = mul_vec(&unit_vec(a), &unit_vec(a));
            if !vec_is_zero(&sq) {
                report.push_first("commutativity", || {
                    format!("odd-degree square {}·{} is nonzero", alg.label(a), alg.label(a))
                });
                break 'comm;
            }
        }
        for b in a + 1..n {
            let ab = dense(&alg.mul_elems(a, b));
            let ba = dense(&alg.mul_elems(b, a));
            let sign: S = parity_sign(alg.degree(a) * alg.degree(b));
            let expected: Vec<S> = ab.iter().map(|x| sign.clone() * x.clone()).collect();
            if ba != expected {
                report.push_first("commutativity", || {
                    format!(
                        "{}·{} and {}·{} violate graded commutativity",
                        alg.label(a),
                        alg.label(b),
                        alg.label(b),
                        alg.label(a)
                    )
                });
                break 'comm;
            }
        }
    }

    // Associativity over sorted triples (the rest follows from
    // commutativity, checked above).
    'assoc: for a in 0..n {
        for b in a..n {
            for c in b..n {
                let lhs = mul_vec(&dense(&alg.mul_elems(a, b)), &unit_vec(c));
                let rhs = mul_vec(&unit_vec(a), &dense(&alg.mul_elems(b, c)));
                if lhs != rhs {
                    report.push_first("associativity", || {
                        format!(
                            "({}·{})·{} != {}·({}·{})",
                            alg.label(a),
                            alg.label(b),
                            alg.label(c),
                            alg.label(a),
                            alg.label(b),
                            alg.label(c)
                        )
                    });
                    break 'assoc;
                }
            }
        }
    }

    // d is a derivation with d² = 0.
    let d_vec = |v: &[S]| {
        let mut out = vec![S::zero(); n];
        for (a, va) in v.iter().enumerate() {
            if va.is_zero() {
                continue;
            }
            for (c, coeff) in alg.d_elem(a) {
                out[c] = out[c].clone() + va.clone() * coeff;
            }
        }
        out
    };
    'deriv: for a in 0..n {
        for b in a..n {
            let lhs = d_vec(&dense(&alg.mul_elems(a, b)));
            let mut rhs = mul_vec(&dense(&alg.d_elem(a)), &unit_vec(b));
            let sgn: S = parity_sign(alg.degree(a));
            let right = mul_vec(&unit_vec(a), &dense(&alg.d_elem(b)));
            for (r, x) in rhs.iter_mut().zip(right) {
                *r = r.clone() + sgn.clone() * x;
            }
            if lhs != rhs {
                report.push_first("derivation", || {
                    format!(
                        "d({}·{}) != d{0}·{1} + (-1)^|{0}| {0}·d{1}",
                        alg.label(a),
                        alg.label(b)
                    )
                });
                break 'deriv;
            }
        }
    }
    'dsq: for a in 0..n {
        let dd = d_vec(&dense(&alg.d_elem(a)));
        if !vec_is_zero(&dd) {
            report.push_first("d_squared", || {
                format!("d(d({})) is nonzero", alg.label(a))
            });
            break 'dsq;
        }
    }

    // m is a dg ideal: products with anything and differentials of its
    // elements have no unit component.
    'ideal: for &i in &r.m_basis {
        for b in 0..n {
            let prod = dense(&alg.mul_elems(i, b));
            if !prod[r.unit].is_zero() {
                report.push_first("ideal", || {
                    format!(
                        "{}·{} leaves the ideal (unit component {})",
                        alg.label(i),
                        alg.label(b),
                        prod[r.unit]
                    )
                });
                break 'ideal;
            }
        }
        let di = dense(&alg.d_elem(i));
        if !di[r.unit].is_zero() {
            report.push_first("ideal", || {
                format!(
                    "d({}) leaves the ideal (unit component {})",
                    alg.label(i),
                    di[r.unit]
                )
            });
            break 'ideal;
        }
    }

    // m is nilpotent: the power filtration must reach zero.
    if filtration_levels(r).is_none() {
        report.push_first("nilpotent", || {
            "powers of the maximal ideal stabilize at a nonzero subspace".to_string()
        });
    }

    report
}

/// The m-adic filtration `m = m¹ ⊇ m² ⊇ … ⊇ m^N = 0`, with exact bases in
/// m-coordinates (coordinates over the distinguished m-basis).
#[derive(Clone, Debug, PartialEq)]
pub struct MFiltration<S> {
    levels: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> MFiltration<S> {
    /// Minimal `N` with `m^N = 0`; level `N` is stored and empty.
    pub fn nilpotency_index(&self) -> usize {
        self.levels.len()
    }

    /// Basis of `m^j` in m-coordinates, `1 <= j <= N`; empty for `j >= N`.
    pub fn level_basis(&self, j: usize) -> &[Vec<S>] {
        assert!(j >= 1, "levels start at m^1");
        if j <= self.levels.len() {
            &self.levels[j - 1]
        } else {
            &[]
        }
    }

    pub fn level_dim(&self, j: usize) -> usize {
        self.level_basis(j).len()
    }

    /// Largest `j` with `v ∈ m^j`, for `v` in m-coordinates; the zero
    /// vector reports the top level `N`.
    pub fn level_of(&self, v: &[S]) -> usize {
        let n = self.nilpotency_index();
        if vec_is_zero(v) {
            return n;
        }
        let mut level = 1;
        for j in 2..n {
            let basis = self.level_basis(j);
            if Matrix::from_cols_of(v.len(), basis).in_column_span(v) {
                level = j;
            } else {
                break;
            }
        }
        level
    }
}

/// Computes the power filtration of `m`; `None` when the powers stabilize
/// at a nonzero subspace (the ideal is not nilpotent).
pub fn m_filtration<S: Scalar>(r: &ArtinianLocalDga<S>) -> Option<MFiltration<S>> {
    filtration_levels(r).map(|levels| MFiltration { levels })
}

fn filtration_levels<S: Scalar>(r: &ArtinianLocalDga<S>) -> Option<Vec<Vec<Vec<S>>>> {
    let m = r.m_dim();
    let pos: BTreeMap<usize, usize> = r
        .m_basis
        .iter()
        .enumerate()
        .map(|(a, &i)| (i, a))
        .collect();
    // Product of an m-basis generator with an m-coordinate vector,
    // projected back to m-coordinates (valid inputs stay inside m; any
    // unit component is ignored here and reported by the validator).
    let mul_into_m = |gen: usize, v: &[S]| {
        let mut out = vec![S::zero(); m];
        for (b, vb) in v.iter().enumerate() {
            if vb.is_zero() {
                continue;
            }
            for (c, coeff) in r.algebra.mul_elems(r.m_basis[gen], r.m_basis[b]) {
                if let Some(&cc) = pos.get(&c) {
                    out[cc] = out[cc].clone() + vb.clone() * coeff;
                }
            }
        }
        out
    };

    let mut levels: Vec<Vec<Vec<S>>> = Vec::new();
    let mut current: Vec<Vec<S>> = (0..m)
        .map(|a| {
            let mut v = vec![S::zero(); m];
            v[a] = S::one();
            v
        })
        .collect();
    loop {
        levels.push(current.clone());
        if current.is_empty() {
            return Some(levels);
        }
        let mut gens = Vec::new();
        for a in 0..m {
            for v in &current {
                let w = mul_into_m(a, v);
                if !vec_is_zero(&w) {
                    gens.push(w);
                }
            }
        }
        let kept = Matrix::extend_span(m, &[], &gens);
        let next: Vec<Vec<S>> = kept.into_iter().map(|k| gens[k].clone()).collect();
        if next.len() == current.len() {
            return None;
        }
        current = next;
    }
}
