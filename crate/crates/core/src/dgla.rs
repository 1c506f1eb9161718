//! dg Lie algebras presented by structure constants: axiom validation,
//! the endomorphism dgla of a complex, tensoring with graded-commutative
//! dg algebras, nilpotency, and quasi-isomorphism checks for morphisms.
//!
//! Sign conventions, fixed here and used by every caller:
//! differential `d` of degree +1 with `d[x,y] = [dx,y] + (-1)^{|x|} [x,dy]`;
//! graded antisymmetry `[x,y] = -(-1)^{|x||y|} [y,x]`;
//! graded Jacobi `[x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]`;
//! commutator bracket on endomorphisms `[f,g] = f.g - (-1)^{|f||g|} g.f`;
//! tensor differential `d(c(x)x) = dc(x)x + (-1)^{|c|} c(x)dx` and bracket
//! `[a(x)x, b(x)y] = (-1)^{|x||b|} ab(x)[x,y]`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::check::ValidationReport;
use crate::graded::{ChainComplex, ChainMap, GradedVectorSpace, HomComplex};
use crate::linalg::{vec_is_zero, Matrix};
use crate::scalar::{parity_sign, Scalar};

/// Sparse coordinate vector: (basis index, coefficient) pairs.
pub type SparseVec<S> = Vec<(usize, S)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DglaError {
    #[error("expected {want} degrees for {got} basis labels")]
    DegreeCountMismatch { want: usize, got: usize },
    #[error("differential matrix is {got_rows}x{got_cols}, expected {dim}x{dim}")]
    DifferentialShape {
        dim: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("duplicate basis label {label:?}")]
    DuplicateLabel { label: String },
    #[error("morphism block at degree {degree} has shape {got_rows}x{got_cols}, expected {want_rows}x{want_cols}")]
    BlockShape {
        degree: i64,
        want_rows: usize,
        want_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
}

/// Finite-dimensional graded-commutative dg algebra given by structure
/// constants; products may be supplied for either order of a basis pair,
/// the other order being recovered through the Koszul sign.
///
/// Used as the coefficient algebra of [`tensor_dgla`]: the maximal ideal of
/// an artinian base, or a truncated algebra of polynomial forms.
#[derive(Clone, Debug, PartialEq)]
pub struct Cdga<S> {
    labels: Vec<String>,
    degrees: Vec<i64>,
    mul: BTreeMap<(usize, usize), SparseVec<S>>,
    diff: Matrix<S>,
}

impl<S: Scalar> Cdga<S> {
    pub fn new(
        labels: Vec<String>,
        degrees: Vec<i64>,
        mul: BTreeMap<(usize, usize), SparseVec<S>>,
        diff: Matrix<S>,
    ) -> Result<Self, DglaError> {
        let dim = labels.len();
        check_labels(&labels)?;
        if degrees.len() != dim {
            return Err(DglaError::DegreeCountMismatch {
                want: dim,
                got: degrees.len(),
            });
        }
        if (diff.rows(), diff.cols()) != (dim, dim) {
            return Err(DglaError::DifferentialShape {
                dim,
                got_rows: diff.rows(),
                got_cols: diff.cols(),
            });
        }
        check_sparse_table(&mul, dim)?;
        Ok(Cdga {
            labels,
            degrees,
            mul,
            diff,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    /// `d` applied to the `i`-th basis element, as a sparse vector.
    pub fn d_elem(&self, i: usize) -> SparseVec<S> {
        sparse_col(&self.diff, i)
    }

    /// Product of two basis elements; the missing order of a pair is filled
    /// in by graded commutativity `ba = (-1)^{|a||b|} ab`.
    pub fn mul_elems(&self, a: usize, b: usize) -> SparseVec<S> {
        if let Some(v) = self.mul.get(&(a, b)) {
            v.clone()
        } else if let Some(v) = self.mul.get(&(b, a)) {
            let sign: S = parity_sign(self.degrees[a] * self.degrees[b]);
            v.iter()
                .map(|(c, coeff)| (*c, sign.clone() * coeff.clone()))
                .collect()
        } else {
            Vec::new()
        }
    }
}

/// dg Lie algebra presented by a basis with integer degrees, a differential
/// matrix (column `a` holds the coordinates of `d(x_a)`), and bracket
/// structure constants. Brackets may be supplied for either order of a
/// basis pair; the other order is recovered through graded antisymmetry,
/// and supplying both makes antisymmetry an explicit consistency check in
/// [`validate_dgla`].
#[derive(Clone, Debug, PartialEq)]
pub struct Dgla<S> {
    labels: Vec<String>,
    degrees: Vec<i64>,
    diff: Matrix<S>,
    brackets: BTreeMap<(usize, usize), SparseVec<S>>,
    by_degree: BTreeMap<i64, Vec<usize>>,
}

impl<S: Scalar> Dgla<S> {
    pub fn new(
        labels: Vec<String>,
        degrees: Vec<i64>,
        diff: Matrix<S>,
        brackets: BTreeMap<(usize, usize), SparseVec<S>>,
    ) -> Result<Self, DglaError> {
        let dim = labels.len();
        check_labels(&labels)?;
        if degrees.len() != dim {
            return Err(DglaError::DegreeCountMismatch {
                want: dim,
                got: degrees.len(),
            });
        }
        if (diff.rows(), diff.cols()) != (dim, dim) {
            return Err(DglaError::DifferentialShape {
                dim,
                got_rows: diff.rows(),
                got_cols: diff.cols(),
            });
        }
        check_sparse_table(&brackets, dim)?;
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &k) in degrees.iter().enumerate() {
            by_degree.entry(k).or_default().push(i);
        }
        Ok(Dgla {
            labels,
            degrees,
            diff,
            brackets,
            by_degree,
        })
    }

    /// Zero bracket, zero differential.
    pub fn abelian(labels: Vec<String>, degrees: Vec<i64>) -> Result<Self, DglaError> {
        let dim = labels.len();
        Dgla::new(labels, degrees, Matrix::zeros(dim, dim), BTreeMap::new())
    }

    /// Abelian dgla on the basis of a complex, with the differential of the
    /// complex. Labels must be globally unique across degrees.
    pub fn from_complex(c: &ChainComplex<S>) -> Result<Self, DglaError> {
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        for i in c.space().degrees() {
            for label in c.space().labels(i) {
                labels.push(label.clone());
                degrees.push(i);
            }
        }
        let dim = labels.len();
        let offset: BTreeMap<i64, usize> = {
            let mut off = BTreeMap::new();
            let mut acc = 0;
            for i in c.space().degrees() {
                off.insert(i, acc);
                acc += c.dim(i);
            }
            off
        };
        let mut diff = Matrix::zeros(dim, dim);
        for i in c.space().degrees() {
            let block = c.d(i);
            for r in 0..block.rows() {
                for col in 0..block.cols() {
                    if !block[(r, col)].is_zero() {
                        diff[(offset[&(i + 1)] + r, offset[&i] + col)] =
                            block[(r, col)].clone();
                    }
                }
            }
        }
        Dgla::new(labels, degrees, diff, BTreeMap::new())
    }

    /// Blockwise direct sum; labels of the summands must not clash.
    pub fn direct_sum(a: &Dgla<S>, b: &Dgla<S>) -> Result<Self, DglaError> {
        let shift = a.dim();
        let dim = shift + b.dim();
        let labels = a.labels.iter().chain(&b.labels).cloned().collect();
        let degrees = a.degrees.iter().chain(&b.degrees).copied().collect();
        let diff = Matrix::from_fn(dim, dim, |r, c| {
            if r < shift && c < shift {
                a.diff[(r, c)].clone()
            } else if r >= shift && c >= shift {
                b.diff[(r - shift, c - shift)].clone()
            } else {
                S::zero()
            }
        });
        let mut brackets = a.brackets.clone();
        for (&(p, q), v) in &b.brackets {
            brackets.insert(
                (p + shift, q + shift),
                v.iter()
                    .map(|(c, coeff)| (c + shift, coeff.clone()))
                    .collect(),
            );
        }
        Dgla::new(labels, degrees, diff, brackets)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Global basis indices living in the given degree, in basis order.
    pub fn degree_indices(&self, k: i64) -> &[usize] {
        self.by_degree.get(&k).map_or(&[] as &[usize], Vec::as_slice)
    }

    pub fn dim_at(&self, k: i64) -> usize {
        self.degree_indices(k).len()
    }

    pub fn degrees_populated(&self) -> impl Iterator<Item = i64> + '_ {
        self.by_degree.keys().copied()
    }

    /// Coordinates over the degree-`k` subbasis, scattered into a full vector.
    pub fn embed(&self, k: i64, coords: &[S]) -> Vec<S> {
        let idx = self.degree_indices(k);
        assert_eq!(coords.len(), idx.len(), "coordinate length mismatch");
        let mut full = vec![S::zero(); self.dim()];
        for (&i, c) in idx.iter().zip(coords) {
            full[i] = c.clone();
        }
        full
    }

    /// Degree-`k` coordinates of a full vector.
    pub fn project(&self, k: i64, full: &[S]) -> Vec<S> {
        self.degree_indices(k)
            .iter()
            .map(|&i| full[i].clone())
            .collect()
    }

    pub fn d_full(&self, v: &[S]) -> Vec<S> {
        self.diff.apply(v)
    }

    pub fn d_elem(&self, i: usize) -> SparseVec<S> {
        sparse_col(&self.diff, i)
    }

    /// `[x_a, x_b]` as a sparse vector; the missing order of a pair is
    /// filled in by graded antisymmetry.
    pub fn bracket_elems(&self, a: usize, b: usize) -> SparseVec<S> {
        if let Some(v) = self.brackets.get(&(a, b)) {
            v.clone()
        } else if let Some(v) = self.brackets.get(&(b, a)) {
            let sign: S = -parity_sign::<S>(self.degrees[a] * self.degrees[b]);
            v.iter()
                .map(|(c, coeff)| (*c, sign.clone() * coeff.clone()))
                .collect()
        } else {
            Vec::new()
        }
    }

    /// Bilinear extension of the bracket to full coordinate vectors.
    pub fn bracket_full(&self, u: &[S], v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim()];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                for (c, coeff) in self.bracket_elems(a, b) {
                    out[c] = out[c].clone() + ua.clone() * vb.clone() * coeff;
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim()];
        v[i] = S::one();
        v
    }

    fn densify(&self, sparse: &SparseVec<S>) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim()];
        for (c, coeff) in sparse {
            v[*c] = v[*c].clone() + coeff.clone();
        }
        v
    }

    /// The graded space and differential underneath the Lie structure.
    /// Faithful when the dgla validates (degree-compatible differential).
    pub fn underlying_complex(&self) -> ChainComplex<S> {
        let mut components = BTreeMap::new();
        for (&k, idx) in &self.by_degree {
            components.insert(k, idx.iter().map(|&i| self.labels[i].clone()).collect());
        }
        let space = GradedVectorSpace::new(components).expect("dgla labels are unique");
        let mut diffs = BTreeMap::new();
        for &k in self.by_degree.keys() {
            let rows = self.degree_indices(k + 1);
            let cols = self.degree_indices(k);
            if rows.is_empty() || cols.is_empty() {
                continue;
            }
            let block = Matrix::from_fn(rows.len(), cols.len(), |r, c| {
                self.diff[(rows[r], cols[c])].clone()
            });
            diffs.insert(k, block);
        }
        ChainComplex::new(space, diffs).expect("blocks built to shape")
    }

    /// `dim H^k` of the underlying complex.
    pub fn homology_dim(&self, k: i64) -> usize {
        self.underlying_complex().homology_dim(k)
    }
}

fn check_labels(labels: &[String]) -> Result<(), DglaError> {
    for (i, label) in labels.iter().enumerate() {
        if labels[..i].contains(label) {
            return Err(DglaError::DuplicateLabel {
                label: label.clone(),
            });
        }
    }
    Ok(())
}

fn check_sparse_table<S>(
    table: &BTreeMap<(usize, usize), SparseVec<S>>,
    dim: usize,
) -> Result<(), DglaError> {
    for (&(a, b), v) in table {
        for &idx in [a, b].iter().chain(v.iter().map(|(c, _)| c)) {
            if idx >= dim {
                return Err(DglaError::IndexOutOfRange { index: idx, dim });
            }
        }
    }
    Ok(())
}

fn sparse_col<S: Scalar>(m: &Matrix<S>, c: usize) -> SparseVec<S> {
    (0..m.rows())
        .filter(|&r| !m[(r, c)].is_zero())
        .map(|r| (r, m[(r, c)].clone()))
        .collect()
}

/// Checks every dg Lie algebra axiom by exhaustive basis enumeration:
/// degree compatibility of `d` and the bracket, graded antisymmetry,
/// `d^2 = 0`, graded Leibniz over basis pairs and graded Jacobi over
/// basis triples. The report names each violated axiom with the first
/// offending basis tuple.
pub fn validate_dgla<S: Scalar>(g: &Dgla<S>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = g.dim();

    // Degree compatibility: d raises degree by one, the bracket adds degrees.
    'd_deg: for a in 0..n {
        for (r, _) in g.d_elem(a) {
            if g.degree(r) != g.degree(a) + 1 {
                report.push_first("degree", || {
                    format!(
                        "d({}) has a component on {} of degree {}, expected degree {}",
                        g.label(a),
                        g.label(r),
                        g.degree(r),
                        g.degree(a) + 1
                    )
                });
                break 'd_deg;
            }
        }
    }
    'b_deg: for (&(a, b), v) in &g.brackets {
        for (c, coeff) in v {
            if !coeff.is_zero() && g.degree(*c) != g.degree(a) + g.degree(b) {
                report.push_first("degree", || {
                    format!(
                        "[{}, {}] has a component on {} of degree {}, expected degree {}",
                        g.label(a),
                        g.label(b),
                        g.label(*c),
                        g.degree(*c),
                        g.degree(a) + g.degree(b)
                    )
                });
                break 'b_deg;
            }
        }
    }

    // Graded antisymmetry: consistency of explicitly supplied pairs, and
    // [x,x] = 0 for even-degree x.
    'antisym: for (&(a, b), v) in &g.brackets {
        if a == b {
            if g.degree(a) % 2 == 0 && !vec_is_zero(&g.densify(v)) {
                report.push_first("antisymmetry", || {
                    format!(
                        "[{}, {}] must vanish for even degree {}",
                        g.label(a),
                        g.label(a),
                        g.degree(a)
                    )
                });
                break 'antisym;
            }
            continue;
        }
        if let Some(w) = g.brackets.get(&(b, a)) {
            let sign: S = -parity_sign::<S>(g.degree(a) * g.degree(b));
            let expected: Vec<S> = g
                .densify(v)
                .into_iter()
                .map(|x| sign.clone() * x)
                .collect();
            if g.densify(w) != expected {
                let (p, q) = (a.min(b), a.max(b));
                report.push_first("antisymmetry", || {
                    format!(
                        "[{}, {}] and [{}, {}] are inconsistent with graded antisymmetry",
                        g.label(p),
                        g.label(q),
                        g.label(q),
                        g.label(p)
                    )
                });
                break 'antisym;
            }
        }
    }

    // d^2 = 0.
    let d2 = &g.diff * &g.diff;
    'dsq: for a in 0..n {
        for r in 0..n {
            if !d2[(r, a)].is_zero() {
                report.push_first("d_squared", || {
                    format!("d(d({})) has a nonzero component on {}", g.label(a), g.label(r))
                });
                break 'dsq;
            }
        }
    }

    // Graded Leibniz on basis pairs.
    'leibniz: for a in 0..n {
        for b in a..n {
            let lhs = g.d_full(&g.densify(&g.bracket_elems(a, b)));
            let mut rhs = g.bracket_full(&g.densify(&g.d_elem(a)), &g.unit(b));
            let sgn: S = parity_sign(g.degree(a));
            let right = g.bracket_full(&g.unit(a), &g.densify(&g.d_elem(b)));
            for (r, x) in rhs.iter_mut().zip(right) {
                *r = r.clone() + sgn.clone() * x;
            }
            if lhs != rhs {
                report.push_first("leibniz", || {
                    format!("d[{}, {}] != [d{0}, {1}] + (-1)^|{0}| [{0}, d{1}]",
                        g.label(a), g.label(b))
                });
                break 'leibniz;
            }
        }
    }

    // Graded Jacobi on sorted basis triples (the rest follows from
    // antisymmetry, which is checked above).
    'jacobi: for a in 0..n {
        for b in a..n {
            for c in b..n {
                let inner_bc = g.densify(&g.bracket_elems(b, c));
                let lhs = g.bracket_full(&g.unit(a), &inner_bc);
                let ab = g.densify(&g.bracket_elems(a, b));
                let mut rhs = g.bracket_full(&ab, &g.unit(c));
                let sgn: S = parity_sign(g.degree(a) * g.degree(b));
                let inner_ac = g.densify(&g.bracket_elems(a, c));
                let right = g.bracket_full(&g.unit(b), &inner_ac);
                for (r, x) in rhs.iter_mut().zip(right) {
                    *r = r.clone() + sgn.clone() * x;
                }
                if lhs != rhs {
                    report.push_first("jacobi", || {
                        format!(
                            "Jacobi fails on ({}, {}, {})",
                            g.label(a),
                            g.label(b),
                            g.label(c)
                        )
                    });
                    break 'jacobi;
                }
            }
        }
    }

    report
}

/// The endomorphism dgla of a complex: underlying complex `Hom(A, A)` with
/// `D f = d.f - (-1)^{|f|} f.d`, bracket the graded commutator
/// `[f,g] = f.g - (-1)^{|f||g|} g.f`.
pub fn end_dgla<S: Scalar>(a: &ChainComplex<S>) -> Dgla<S> {
    let hom = HomComplex::new(a, a);
    let end = &hom.complex;

    // Global indexing: degrees ascending, Hom basis order within a degree.
    let degrees_list: Vec<i64> = end.space().degrees().collect();
    let mut labels = Vec::new();
    let mut degrees = Vec::new();
    let mut offset: BTreeMap<i64, usize> = BTreeMap::new();
    for &k in &degrees_list {
        offset.insert(k, labels.len());
        for label in end.space().labels(k) {
            labels.push(label.clone());
            degrees.push(k);
        }
    }
    let dim = labels.len();

    let mut diff = Matrix::zeros(dim, dim);
    for &k in &degrees_list {
        let block = end.d(k);
        if block.is_zero() {
            continue;
        }
        let (ro, co) = (offset[&(k + 1)], offset[&k]);
        for r in 0..block.rows() {
            for c in 0..block.cols() {
                if !block[(r, c)].is_zero() {
                    diff[(ro + r, co + c)] = block[(r, c)].clone();
                }
            }
        }
    }

    // The commutator of elementary maps x_a |-> y_b: compose when the inner
    // map's target matches the outer map's source.
    let elem = |k: i64, pos: usize| hom.basis(k)[pos];
    let global = |k: i64, e: crate::graded::HomBasisElem| offset[&k] + hom.coord_index(k, e);

    let mut brackets = BTreeMap::new();
    for p in 0..dim {
        for q in p..dim {
            let (k1, k2) = (degrees[p], degrees[q]);
            let e1 = elem(k1, p - offset[&k1]);
            let e2 = elem(k2, q - offset[&k2]);
            let mut out: BTreeMap<usize, S> = BTreeMap::new();
            // e1 . e2
            if e1.source_degree == e2.source_degree + k2 && e1.source_index == e2.target_index {
                let composed = crate::graded::HomBasisElem {
                    source_degree: e2.source_degree,
                    source_index: e2.source_index,
                    target_index: e1.target_index,
                };
                let c = global(k1 + k2, composed);
                let entry = out.entry(c).or_insert_with(S::zero);
                *entry = entry.clone() + S::one();
            }
            // -(-1)^{k1 k2} e2 . e1
            if e2.source_degree == e1.source_degree + k1 && e2.source_index == e1.target_index {
                let composed = crate::graded::HomBasisElem {
                    source_degree: e1.source_degree,
                    source_index: e1.source_index,
                    target_index: e2.target_index,
                };
                let c = global(k1 + k2, composed);
                let sign: S = -parity_sign::<S>(k1 * k2);
                let entry = out.entry(c).or_insert_with(S::zero);
                *entry = entry.clone() + sign;
            }
            let sparse: SparseVec<S> = out.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            if !sparse.is_empty() {
                brackets.insert((p, q), sparse);
            }
        }
    }

    Dgla::new(labels, degrees, diff, brackets).expect("end basis is well-formed")
}

/// Tensor of a graded-commutative dg algebra with a dgla, on the basis of
/// pairs `c(x)x` with `|c(x)x| = |c| + |x|`.
pub fn tensor_dgla<S: Scalar>(c: &Cdga<S>, g: &Dgla<S>) -> Result<Dgla<S>, DglaError> {
    let (nc, ng) = (c.dim(), g.dim());
    let dim = nc * ng;
    let pair = |a: usize, i: usize| a * ng + i;

    let mut labels = Vec::with_capacity(dim);
    let mut degrees = Vec::with_capacity(dim);
    for a in 0..nc {
        for i in 0..ng {
            labels.push(format!("{}⊗{}", c.label(a), g.label(i)));
            degrees.push(c.degree(a) + g.degree(i));
        }
    }

    let mut diff: Matrix<S> = Matrix::zeros(dim, dim);
    for a in 0..nc {
        let da = c.d_elem(a);
        let sgn: S = parity_sign(c.degree(a));
        for i in 0..ng {
            let col = pair(a, i);
            for (b, coeff) in &da {
                let r = pair(*b, i);
                diff[(r, col)] = diff[(r, col)].clone() + coeff.clone();
            }
            for (j, coeff) in g.d_elem(i) {
                let r = pair(a, j);
                diff[(r, col)] = diff[(r, col)].clone() + sgn.clone() * coeff;
            }
        }
    }

    let mut brackets = BTreeMap::new();
    for p in 0..dim {
        for q in p..dim {
            let (a, i) = (p / ng, p % ng);
            let (b, j) = (q / ng, q % ng);
            let prod = c.mul_elems(a, b);
            if prod.is_empty() {
                continue;
            }
            let br = g.bracket_elems(i, j);
            if br.is_empty() {
                continue;
            }
            let sign: S = parity_sign(g.degree(i) * c.degree(b));
            let mut out: BTreeMap<usize, S> = BTreeMap::new();
            for (e, ce) in &prod {
                for (k, ck) in &br {
                    let idx = pair(*e, *k);
                    let entry = out.entry(idx).or_insert_with(S::zero);
                    *entry = entry.clone() + sign.clone() * ce.clone() * ck.clone();
                }
            }
            let sparse: SparseVec<S> = out.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            if !sparse.is_empty() {
                brackets.insert((p, q), sparse);
            }
        }
    }

    Dgla::new(labels, degrees, diff, brackets)
}

/// Nilpotency of the lower central series `L_1 = g`, `L_{k+1} = [g, L_k]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nilpotency {
    /// Least `N` with `L_{N+1} = 0`: brackets nested `N` times (with `N+1`
    /// entries) all vanish. The abelian case is class 1, the zero algebra
    /// class 0.
    Class(usize),
    /// The series stabilizes at a nonzero subspace.
    NotNilpotent,
}

pub fn nilpotency_class<S: Scalar>(g: &Dgla<S>) -> Nilpotency {
    let n = g.dim();
    let mut current: Vec<Vec<S>> = (0..n).map(|i| g.unit(i)).collect();
    let mut class = 0usize;
    loop {
        if current.is_empty() {
            return Nilpotency::Class(class);
        }
        let mut gens = Vec::new();
        for a in 0..n {
            let ua = g.unit(a);
            for v in &current {
                let w = g.bracket_full(&ua, v);
                if !vec_is_zero(&w) {
                    gens.push(w);
                }
            }
        }
        let kept = Matrix::extend_span(n, &[], &gens);
        let next: Vec<Vec<S>> = kept.into_iter().map(|k| gens[k].clone()).collect();
        // The series is decreasing, so a repeat in dimension means it
        // stabilized at a nonzero subspace.
        if next.len() == current.len() {
            return Nilpotency::NotNilpotent;
        }
        current = next;
        class += 1;
    }
}

/// Degree-0 map of dglas, one matrix block per degree.
#[derive(Clone, Debug)]
pub struct DglaMorphism<S> {
    pub source: Dgla<S>,
    pub target: Dgla<S>,
    blocks: BTreeMap<i64, Matrix<S>>,
}

impl<S: Scalar> DglaMorphism<S> {
    pub fn new(
        source: Dgla<S>,
        target: Dgla<S>,
        blocks: BTreeMap<i64, Matrix<S>>,
    ) -> Result<Self, DglaError> {
        for (&k, block) in &blocks {
            let want = (target.dim_at(k), source.dim_at(k));
            if (block.rows(), block.cols()) != want {
                return Err(DglaError::BlockShape {
                    degree: k,
                    want_rows: want.0,
                    want_cols: want.1,
                    got_rows: block.rows(),
                    got_cols: block.cols(),
                });
            }
        }
        Ok(DglaMorphism {
            source,
            target,
            blocks,
        })
    }

    pub fn identity(g: &Dgla<S>) -> Self {
        let blocks = g
            .degrees_populated()
            .map(|k| (k, Matrix::identity(g.dim_at(k))))
            .collect();
        DglaMorphism {
            source: g.clone(),
            target: g.clone(),
            blocks,
        }
    }

    pub fn block(&self, k: i64) -> Matrix<S> {
        self.blocks
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.target.dim_at(k), self.source.dim_at(k)))
    }

    /// Applies the morphism to full source coordinates.
    pub fn apply_full(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.target.dim()];
        for k in self.source.degrees_populated() {
            let coords = self.source.project(k, v);
            if coords.iter().all(S::is_zero) {
                continue;
            }
            let mapped = self.block(k).apply(&coords);
            for (&idx, x) in self.target.degree_indices(k).iter().zip(mapped) {
                out[idx] = out[idx].clone() + x;
            }
        }
        out
    }

    /// Checks that the map commutes with the differentials and preserves
    /// brackets on basis pairs.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let s = &self.source;
        'chain: for a in 0..s.dim() {
            let lhs = self.apply_full(&s.d_full(&s.unit(a)));
            let rhs = self.target.d_full(&self.apply_full(&s.unit(a)));
            if lhs != rhs {
                report.push_first("chain_map", || {
                    format!("f(d({0})) != d(f({0}))", s.label(a))
                });
                break 'chain;
            }
        }
        'hom: for a in 0..s.dim() {
            for b in a..s.dim() {
                let lhs = self.apply_full(&s.densify(&s.bracket_elems(a, b)));
                let rhs = self
                    .target
                    .bracket_full(&self.apply_full(&s.unit(a)), &self.apply_full(&s.unit(b)));
                if lhs != rhs {
                    report.push_first("bracket_hom", || {
                        format!("f[{0}, {1}] != [f({0}), f({1})]", s.label(a), s.label(b))
                    });
                    break 'hom;
                }
            }
        }
        report
    }

    /// The underlying map of complexes.
    pub fn to_chain_map(&self) -> ChainMap<S> {
        ChainMap::new(
            self.source.underlying_complex(),
            self.target.underlying_complex(),
            0,
            self.blocks.clone(),
        )
        .expect("morphism blocks are well-shaped")
    }

    /// True iff the mapping cone of the underlying chain map is acyclic.
    pub fn is_quasi_iso(&self) -> bool {
        self.to_chain_map().is_quasi_iso()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::end_complex;
    use crate::{rat, QComplex, QDgla, Rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn sparse(entries: &[(usize, i64)]) -> SparseVec<Rat> {
        entries.iter().map(|&(i, v)| (i, rat(v))).collect()
    }

    /// Two-dimensional solvable Lie algebra in degree 0: [x, y] = y.
    fn solvable2() -> QDgla {
        let mut brackets = BTreeMap::new();
        brackets.insert((0, 1), sparse(&[(1, 1)]));
        Dgla::new(
            labels(&["x", "y"]),
            vec![0, 0],
            Matrix::zeros(2, 2),
            brackets,
        )
        .unwrap()
    }

    /// Three-dimensional simple Lie algebra in degree 0:
    /// [e,f] = h, [h,e] = 2e, [h,f] = -2f.
    fn simple3() -> QDgla {
        let mut brackets = BTreeMap::new();
        brackets.insert((0, 1), sparse(&[(2, 1)]));
        brackets.insert((0, 2), sparse(&[(0, -2)]));
        brackets.insert((1, 2), sparse(&[(1, 2)]));
        Dgla::new(
            labels(&["e", "f", "h"]),
            vec![0, 0, 0],
            Matrix::zeros(3, 3),
            brackets,
        )
        .unwrap()
    }

    /// The maximal ideal of the truncated polynomial algebra on one
    /// degree-0 generator e with e^n = 0: basis e, e^2, ..., e^{n-1}.
    pub(crate) fn dual_ideal(n: usize) -> Cdga<Rat> {
        let m = n - 1;
        let labels: Vec<String> = (1..n).map(|k| format!("e{k}")).collect();
        let mut mul = BTreeMap::new();
        for i in 1..n {
            for j in i..n {
                if i + j < n {
                    mul.insert((i - 1, j - 1), sparse(&[(i + j - 1, 1)]));
                }
            }
        }
        Cdga::new(labels, vec![0; m], mul, Matrix::zeros(m, m)).unwrap()
    }

    #[test]
    fn abelian_any_grading_is_valid() {
        let g = Dgla::<Rat>::abelian(labels(&["a", "b", "c"]), vec![-2, 1, 5]).unwrap();
        assert!(validate_dgla(&g).ok());
    }

    #[test]
    fn solvable_algebra_is_valid() {
        assert!(validate_dgla(&solvable2()).ok());
        assert!(validate_dgla(&simple3()).ok());
    }

    #[test]
    fn broken_antisymmetry_is_named_with_the_pair() {
        let mut brackets = BTreeMap::new();
        brackets.insert((0, 1), sparse(&[(1, 1)]));
        brackets.insert((1, 0), sparse(&[(1, 1)]));
        let g = Dgla::new(
            labels(&["x", "y"]),
            vec![0, 0],
            Matrix::zeros(2, 2),
            brackets,
        )
        .unwrap();
        let report = validate_dgla(&g);
        assert!(!report.ok());
        let failure = report.first().unwrap();
        assert_eq!(failure.axiom, "antisymmetry");
        assert!(failure.witness.contains("[x, y]"));
    }

    #[test]
    fn degree_incompatible_bracket_is_rejected() {
        let mut brackets = BTreeMap::new();
        brackets.insert((0, 1), sparse(&[(0, 1)]));
        let g = Dgla::new(
            labels(&["x", "y"]),
            vec![1, 2],
            Matrix::zeros(2, 2),
            brackets,
        )
        .unwrap();
        let report = validate_dgla(&g);
        assert_eq!(report.first().unwrap().axiom, "degree");
    }

    #[test]
    fn even_self_bracket_must_vanish() {
        let mut brackets = BTreeMap::new();
        brackets.insert((0, 0), sparse(&[(0, 1)]));
        let g = Dgla::new(labels(&["x"]), vec![0], Matrix::zeros(1, 1), brackets).unwrap();
        assert_eq!(validate_dgla(&g).first().unwrap().axiom, "antisymmetry");
    }

    #[test]
    fn odd_self_bracket_is_allowed() {
        // [x,x] = y with |x| = 1, |y| = 2 satisfies every axiom
        // (x with [x,y] = 0, forced by Jacobi).
        let mut brackets = BTreeMap::new();
        brackets.insert((0, 0), sparse(&[(1, 1)]));
        let g = Dgla::new(
            labels(&["x", "y"]),
            vec![1, 2],
            Matrix::zeros(2, 2),
            brackets,
        )
        .unwrap();
        assert!(validate_dgla(&g).ok());
    }

    #[test]
    fn leibniz_violation_is_detected() {
        // d(y) = z but [x, y] = y with d[x,y] != [dx,y] + [x,dy].
        let mut brackets = BTreeMap::new();
        brackets.insert((0, 1), sparse(&[(1, 1)]));
        let mut diff = Matrix::zeros(3, 3);
        diff[(2, 1)] = rat(1);
        let g = Dgla::new(labels(&["x", "y", "z"]), vec![0, 0, 1], diff, brackets).unwrap();
        let report = validate_dgla(&g);
        assert!(!report.ok());
        assert_eq!(report.first().unwrap().axiom, "leibniz");
    }

    #[test]
    fn jacobi_violation_is_detected() {
        // [x,y] = x, [x,z] = y, [y,z] = 0 in degree 0:
        // [[x,y],z] + [y,[x,z]] = y while [x,[y,z]] = 0.
        let mut brackets = BTreeMap::new();
        brackets.insert((0, 1), sparse(&[(0, 1)]));
        brackets.insert((0, 2), sparse(&[(1, 1)]));
        let g = Dgla::new(
            labels(&["x", "y", "z"]),
            vec![0, 0, 0],
            Matrix::zeros(3, 3),
            brackets,
        )
        .unwrap();
        let report = validate_dgla(&g);
        assert!(!report.ok());
        assert_eq!(report.first().unwrap().axiom, "jacobi");
        assert!(report.first().unwrap().witness.contains("(x, y, z)"));
    }

    #[test]
    fn end_of_point_is_one_dimensional_abelian() {
        let point = QComplex::zero_differential(GradedVectorSpace::with_dims(&[(0, 1)]));
        let g = end_dgla(&point);
        assert_eq!(g.dim(), 1);
        assert_eq!(g.degree(0), 0);
        assert!(g.bracket_elems(0, 0).is_empty());
        assert!(validate_dgla(&g).ok());
    }

    #[test]
    fn end_of_two_term_complex() {
        let a = QComplex::zero_differential(GradedVectorSpace::with_dims(&[(-1, 1), (0, 1)]));
        let g = end_dgla(&a);
        assert_eq!(g.dim(), 4);
        assert_eq!(g.underlying_complex().space(), end_complex(&a).space());

        // The two degree-0 idempotents commute.
        let deg0 = g.degree_indices(0);
        assert_eq!(deg0.len(), 2);
        let (p, q) = (deg0[0], deg0[1]);
        assert!(g.bracket_elems(p, q).is_empty());

        // The commutator of the degree +1 and degree -1 elementary maps is
        // the anticommutator of odd maps: the sum of the two idempotents.
        let up = g.degree_indices(1)[0];
        let down = g.degree_indices(-1)[0];
        let v = g.densify(&g.bracket_elems(up, down));
        let mut expected = vec![rat(0); 4];
        expected[p] = rat(1);
        expected[q] = rat(1);
        assert_eq!(v, expected);
        assert!(validate_dgla(&g).ok());
    }

    #[test]
    fn end_dgla_of_random_complexes_validates() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..3 {
            let a = random_complex(&mut rng);
            let g = end_dgla(&a);
            let report = validate_dgla(&g);
            assert!(report.ok(), "end dgla failed validation: {report}");
        }
    }

    #[test]
    fn square_zero_coefficients_kill_all_brackets() {
        let m = dual_ideal(2);
        let t = tensor_dgla(&m, &simple3()).unwrap();
        assert_eq!(t.dim(), 3);
        for a in 0..3 {
            for b in a..3 {
                assert!(t.bracket_elems(a, b).is_empty());
            }
        }
        assert!(validate_dgla(&t).ok());
    }

    #[test]
    fn truncated_forms_tensor_abelian_stays_abelian() {
        // Polynomial forms on the interval truncated at polynomial degree 2:
        // basis 1, t, t^2, dt, t dt, t^2 dt with products beyond t^2 dropped.
        let labels6 = labels(&["1", "t", "t2", "dt", "tdt", "t2dt"]);
        let degrees6 = vec![0, 0, 0, 1, 1, 1];
        let mut mul = BTreeMap::new();
        for (i, j, out) in [
            (0, 0, Some(0)),
            (0, 1, Some(1)),
            (0, 2, Some(2)),
            (0, 3, Some(3)),
            (0, 4, Some(4)),
            (0, 5, Some(5)),
            (1, 1, Some(2)),
            (1, 2, None),
            (1, 3, Some(4)),
            (1, 4, Some(5)),
            (1, 5, None),
            (2, 2, None),
            (2, 3, Some(5)),
            (2, 4, None),
            (2, 5, None),
        ] {
            if let Some(k) = out {
                mul.insert((i, j), sparse(&[(k, 1)]));
            }
        }
        // dt wedge dt and friends vanish; omitted entries are zero.
        let mut diff = Matrix::zeros(6, 6);
        diff[(3, 1)] = rat(1); // d t = dt
        diff[(4, 2)] = rat(2); // d t^2 = 2 t dt
        let omega = Cdga::new(labels6, degrees6, mul, diff).unwrap();

        let g = Dgla::<Rat>::abelian(labels(&["u", "v"]), vec![0, 1]).unwrap();
        let t = tensor_dgla(&omega, &g).unwrap();
        assert!(validate_dgla(&t).ok());
        for a in 0..t.dim() {
            for b in a..t.dim() {
                assert!(t.bracket_elems(a, b).is_empty());
            }
        }
        // The differential acts by the form part alone: d(t ⊗ u) = dt ⊗ u.
        let it = t.index_of("t⊗u").unwrap();
        let d = t.densify(&t.d_elem(it));
        let idtu = t.index_of("dt⊗u").unwrap();
        assert_eq!(d[idtu], rat(1));
        assert_eq!(d.iter().filter(|x| **x != rat(0)).count(), 1);
    }

    #[test]
    fn koszul_sign_on_tensor_differential() {
        // |c| odd and |x| odd: d(c⊗x) = dc⊗x - c⊗dx.
        let c = Cdga::new(
            labels(&["c", "dc"]),
            vec![-1, 0],
            BTreeMap::new(),
            Matrix::from_int_rows(&[&[0, 0], &[1, 0]]),
        )
        .unwrap();
        let g = {
            let mut diff = Matrix::zeros(2, 2);
            diff[(1, 0)] = rat(1);
            Dgla::<Rat>::new(labels(&["x", "dx"]), vec![1, 2], diff, BTreeMap::new()).unwrap()
        };
        let t = tensor_dgla(&c, &g).unwrap();
        let d = t.densify(&t.d_elem(t.index_of("c⊗x").unwrap()));
        assert_eq!(d[t.index_of("dc⊗x").unwrap()], rat(1));
        assert_eq!(d[t.index_of("c⊗dx").unwrap()], rat(-1));
    }

    #[test]
    fn nilpotency_classes() {
        let abelian = Dgla::<Rat>::abelian(labels(&["a"]), vec![0]).unwrap();
        assert_eq!(nilpotency_class(&abelian), Nilpotency::Class(1));

        let t = tensor_dgla(&dual_ideal(3), &solvable2()).unwrap();
        assert_eq!(nilpotency_class(&t), Nilpotency::Class(2));

        assert_eq!(nilpotency_class(&simple3()), Nilpotency::NotNilpotent);
    }

    #[test]
    fn tensor_with_nilpotent_ideal_is_nilpotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 2..=4 {
            let m = dual_ideal(n);
            for _ in 0..3 {
                let g = random_dgla(&mut rng);
                let t = tensor_dgla(&m, &g).unwrap();
                match nilpotency_class(&t) {
                    Nilpotency::Class(c) => assert!(c <= n, "class {c} exceeds index {n}"),
                    Nilpotency::NotNilpotent => panic!("tensor with nilpotent ideal not nilpotent"),
                }
            }
        }
    }

    #[test]
    fn tensor_of_random_inputs_validates() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..6 {
            let m = dual_ideal(rng.gen_range(2..=4));
            let g = random_dgla(&mut rng);
            let t = tensor_dgla(&m, &g).unwrap();
            let report = validate_dgla(&t);
            assert!(report.ok(), "tensor failed validation: {report}");
        }
    }

    #[test]
    fn identity_morphism_is_quasi_iso() {
        let g = solvable2();
        let f = DglaMorphism::identity(&g);
        assert!(f.validate().ok());
        assert!(f.is_quasi_iso());
    }

    #[test]
    fn zero_morphism_misses_homology() {
        let g = solvable2();
        let f = DglaMorphism::new(g.clone(), g, BTreeMap::new()).unwrap();
        assert!(f.validate().ok());
        assert!(!f.is_quasi_iso());
    }

    #[test]
    fn projection_off_contractible_summand_is_quasi_iso() {
        // Source: solvable2 (+) a contractible abelian pair u -> v.
        let contractible = {
            let mut diff = Matrix::zeros(2, 2);
            diff[(1, 0)] = rat(1);
            Dgla::<Rat>::new(labels(&["u", "v"]), vec![0, 1], diff, BTreeMap::new()).unwrap()
        };
        let source = Dgla::direct_sum(&solvable2(), &contractible).unwrap();
        let target = solvable2();
        // Degree 0 of source is x, y, u; kill u. Degree 1 is v; kill it.
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::from_int_rows(&[&[1, 0, 0], &[0, 1, 0]]));
        blocks.insert(1, Matrix::zeros(0, 1));
        let f = DglaMorphism::new(source, target, blocks).unwrap();
        assert!(f.validate().ok(), "{}", f.validate());
        assert!(f.is_quasi_iso());
    }

    #[test]
    fn bracket_breaking_map_is_rejected() {
        // x |-> y, y |-> y is a chain map (d = 0) but not a bracket map.
        let g = solvable2();
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::from_int_rows(&[&[0, 0], &[1, 1]]));
        let f = DglaMorphism::new(g.clone(), g, blocks).unwrap();
        let report = f.validate();
        assert!(!report.ok());
        assert_eq!(report.first().unwrap().axiom, "bracket_hom");
    }

    use crate::graded::GradedVectorSpace;

    pub(crate) fn random_complex(rng: &mut impl Rng) -> QComplex {
        loop {
            let lo = rng.gen_range(-2..=0);
            let hi = rng.gen_range(lo..=lo + 2);
            let dims: Vec<(i64, usize)> =
                (lo..=hi).map(|i| (i, rng.gen_range(0..=2))).collect();
            let space = GradedVectorSpace::with_dims(&dims);
            if space.total_dim() == 0 || space.total_dim() > 4 {
                continue;
            }
            let mut diffs = BTreeMap::new();
            for i in lo..hi {
                let (r, c) = (space.dim(i + 1), space.dim(i));
                if r * c == 0 {
                    continue;
                }
                diffs.insert(
                    i,
                    Matrix::from_fn(r, c, |_, _| rat(rng.gen_range(-1..=1))),
                );
            }
            let complex = ChainComplex::new(space, diffs).unwrap();
            if complex.validate().ok() {
                return complex;
            }
        }
    }

    /// Random valid dgla: either the endomorphisms of a random complex or
    /// an abelian dgla with a random differential.
    pub(crate) fn random_dgla(rng: &mut impl Rng) -> QDgla {
        if rng.gen_bool(0.5) {
            end_dgla(&random_complex(rng))
        } else {
            Dgla::from_complex(&random_complex(rng)).unwrap()
        }
    }
}
