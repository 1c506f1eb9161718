//! Graded vector spaces, chain complexes with degree +1 differential,
//! homology, chain maps, and Hom/End complexes.
//!
//! The cohomological convention is fixed once here and used everywhere:
//! a differential of a complex raises degree by one, `d^i : C^i -> C^{i+1}`,
//! stored as the matrix acting on column vectors of coordinates.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::check::ValidationReport;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("differential block at degree {degree} has shape {got_rows}x{got_cols}, expected {want_rows}x{want_cols}")]
    ShapeMismatch {
        degree: i64,
        want_rows: usize,
        want_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("duplicate basis label {label:?} in degree {degree}")]
    DuplicateLabel { degree: i64, label: String },
    #[error("unknown basis label {label:?}")]
    UnknownLabel { label: String },
}

/// Finite-support graded vector space given by basis labels per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVectorSpace {
    components: BTreeMap<i64, Vec<String>>,
}

impl GradedVectorSpace {
    /// Builds a graded space; empty degrees are dropped and duplicate labels
    /// within a degree are rejected.
    pub fn new(components: BTreeMap<i64, Vec<String>>) -> Result<Self, GradedError> {
        let components: BTreeMap<i64, Vec<String>> = components
            .into_iter()
            .filter(|(_, labels)| !labels.is_empty())
            .collect();
        for (&degree, labels) in &components {
            for (k, label) in labels.iter().enumerate() {
                if labels[..k].contains(label) {
                    return Err(GradedError::DuplicateLabel {
                        degree,
                        label: label.clone(),
                    });
                }
            }
        }
        Ok(GradedVectorSpace { components })
    }

    /// Auto-labelled space with the given dimension per degree.
    pub fn with_dims(dims: &[(i64, usize)]) -> Self {
        let mut components = BTreeMap::new();
        for &(degree, dim) in dims {
            if dim == 0 {
                continue;
            }
            let labels = (0..dim).map(|k| format!("x{degree}_{k}")).collect();
            components.insert(degree, labels);
        }
        GradedVectorSpace { components }
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.components.get(&degree).map_or(0, Vec::len)
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    /// Populated degrees in increasing order.
    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.components.keys().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.components.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.components.keys().next_back().copied()
    }

    pub fn labels(&self, degree: i64) -> &[String] {
        self.components
            .get(&degree)
            .map_or(&[] as &[String], Vec::as_slice)
    }
}

/// Chain complex: a graded space with a degree +1 differential per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex<S> {
    space: GradedVectorSpace,
    diffs: BTreeMap<i64, Matrix<S>>,
}

impl<S: Scalar> ChainComplex<S> {
    /// Assembles a complex, checking that every stored block has the shape
    /// `dim C^{i+1} x dim C^i`. `d^2 = 0` is *not* assumed here; that is what
    /// [`ChainComplex::validate`] reports on.
    pub fn new(
        space: GradedVectorSpace,
        diffs: BTreeMap<i64, Matrix<S>>,
    ) -> Result<Self, GradedError> {
        for (&degree, block) in &diffs {
            let want = (space.dim(degree + 1), space.dim(degree));
            if (block.rows(), block.cols()) != want {
                return Err(GradedError::ShapeMismatch {
                    degree,
                    want_rows: want.0,
                    want_cols: want.1,
                    got_rows: block.rows(),
                    got_cols: block.cols(),
                });
            }
        }
        let diffs = diffs.into_iter().filter(|(_, b)| !b.is_zero()).collect();
        Ok(ChainComplex { space, diffs })
    }

    /// Complex with zero differential on the given space.
    pub fn zero_differential(space: GradedVectorSpace) -> Self {
        ChainComplex {
            space,
            diffs: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.space.dim(degree)
    }

    /// The block `d^i : C^i -> C^{i+1}` (zero matrix when absent).
    pub fn d(&self, degree: i64) -> Matrix<S> {
        self.diffs.get(&degree).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.space.dim(degree + 1), self.space.dim(degree))
        })
    }

    /// Confirms `d^{i+1} . d^i = 0` at every populated degree. On failure the
    /// report names the first offending degree and nonzero entry.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for i in self.space.degrees() {
            let sq = &self.d(i + 1) * &self.d(i);
            if sq.is_zero() {
                continue;
            }
            'outer: for r in 0..sq.rows() {
                for c in 0..sq.cols() {
                    if !sq[(r, c)].is_zero() {
                        report.push_first("d_squared", || {
                            format!(
                                "d.d != 0 starting at degree {i}: entry ({r},{c}) = {}",
                                sq[(r, c)]
                            )
                        });
                        break 'outer;
                    }
                }
            }
            break;
        }
        report
    }

    /// `dim H^i = dim ker d^i - rank d^{i-1}`, exact.
    pub fn homology_dim(&self, degree: i64) -> usize {
        let kernel = self.dim(degree) - self.d(degree).rank();
        kernel - self.d(degree - 1).rank()
    }

    /// Basis of cocycles at the given degree.
    pub fn cocycles(&self, degree: i64) -> Vec<Vec<S>> {
        if self.dim(degree) == 0 {
            return Vec::new();
        }
        self.d(degree).kernel_basis()
    }

    /// Representatives of a complement of the coboundaries inside the
    /// cocycles: a deterministic basis of `H^i` lifted to cocycles.
    pub fn homology_reps(&self, degree: i64) -> Vec<Vec<S>> {
        let cocycles = self.cocycles(degree);
        if cocycles.is_empty() {
            return Vec::new();
        }
        let prev = self.d(degree - 1);
        let image: Vec<Vec<S>> = (0..prev.cols()).map(|c| prev.col(c)).collect();
        let chosen = Matrix::extend_span(self.dim(degree), &image, &cocycles);
        chosen.into_iter().map(|k| cocycles[k].clone()).collect()
    }
}

/// Graded map of complexes of pure degree, stored as one block per source
/// degree: `blocks[i] : source^i -> target^{i+degree}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap<S> {
    pub source: ChainComplex<S>,
    pub target: ChainComplex<S>,
    pub degree: i64,
    blocks: BTreeMap<i64, Matrix<S>>,
}

impl<S: Scalar> ChainMap<S> {
    pub fn new(
        source: ChainComplex<S>,
        target: ChainComplex<S>,
        degree: i64,
        blocks: BTreeMap<i64, Matrix<S>>,
    ) -> Result<Self, GradedError> {
        for (&i, block) in &blocks {
            let want = (target.dim(i + degree), source.dim(i));
            if (block.rows(), block.cols()) != want {
                return Err(GradedError::ShapeMismatch {
                    degree: i,
                    want_rows: want.0,
                    want_cols: want.1,
                    got_rows: block.rows(),
                    got_cols: block.cols(),
                });
            }
        }
        let blocks = blocks.into_iter().filter(|(_, b)| !b.is_zero()).collect();
        Ok(ChainMap {
            source,
            target,
            degree,
            blocks,
        })
    }

    pub fn identity(c: &ChainComplex<S>) -> Self {
        let blocks = c
            .space()
            .degrees()
            .map(|i| (i, Matrix::identity(c.dim(i))))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            degree: 0,
            blocks,
        }
    }

    pub fn block(&self, i: i64) -> Matrix<S> {
        self.blocks.get(&i).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.target.dim(i + self.degree), self.source.dim(i))
        })
    }

    /// Whether the map commutes with the differentials,
    /// `d_target . f = (-1)^{deg f} f . d_source` blockwise.
    pub fn commutes_with_d(&self) -> bool {
        let sign = if self.degree.rem_euclid(2) == 0 {
            S::one()
        } else {
            -S::one()
        };
        self.source.space().degrees().all(|i| {
            let lhs = &self.target.d(i + self.degree) * &self.block(i);
            let rhs = (&self.block(i + 1) * &self.source.d(i)).scale(&sign);
            lhs == rhs
        })
    }

    pub fn compose(&self, inner: &ChainMap<S>) -> ChainMap<S> {
        assert_eq!(inner.target.space(), self.source.space());
        let degree = self.degree + inner.degree;
        let blocks = inner
            .source
            .space()
            .degrees()
            .map(|i| (i, &self.block(i + inner.degree) * &inner.block(i)))
            .collect();
        ChainMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            degree,
            blocks,
        }
    }

    /// Mapping cone of a degree-0 chain map: `Cone^i = A^{i+1} (+) B^i` with
    /// differential `(a, b) -> (-d_A a, f a + d_B b)`.
    pub fn mapping_cone(&self) -> ChainComplex<S> {
        assert_eq!(self.degree, 0, "mapping cone needs a degree-0 map");
        let a = &self.source;
        let b = &self.target;
        let mut dims = BTreeMap::new();
        let degrees: Vec<i64> = a
            .space()
            .degrees()
            .map(|i| i - 1)
            .chain(b.space().degrees())
            .collect();
        for &i in &degrees {
            let dim = a.dim(i + 1) + b.dim(i);
            if dim > 0 {
                dims.insert(i, dim);
            }
        }
        let space = GradedVectorSpace::with_dims(
            &dims.iter().map(|(&i, &d)| (i, d)).collect::<Vec<_>>(),
        );
        let mut diffs = BTreeMap::new();
        for &i in dims.keys() {
            let (sa, sb) = (a.dim(i + 1), b.dim(i));
            let (ta, tb) = (a.dim(i + 2), b.dim(i + 1));
            if ta + tb == 0 {
                continue;
            }
            let da = a.d(i + 1);
            let f = self.block(i + 1);
            let db = b.d(i);
            let block = Matrix::from_fn(ta + tb, sa + sb, |r, c| {
                if r < ta && c < sa {
                    -da[(r, c)].clone()
                } else if r >= ta && c < sa {
                    f[(r - ta, c)].clone()
                } else if r >= ta && c >= sa {
                    db[(r - ta, c - sa)].clone()
                } else {
                    S::zero()
                }
            });
            diffs.insert(i, block);
        }
        ChainComplex::new(space, diffs).expect("cone blocks are well-shaped")
    }

    /// True iff the mapping cone is exact everywhere, i.e. the map is a
    /// quasi-isomorphism of bounded complexes.
    pub fn is_quasi_iso(&self) -> bool {
        let cone = self.mapping_cone();
        let lo = cone.space().min_degree().unwrap_or(0);
        let hi = cone.space().max_degree().unwrap_or(0);
        (lo..=hi).all(|i| cone.homology_dim(i) == 0)
    }
}

/// One elementary basis map of a Hom complex: the matrix unit sending the
/// `source_index`-th basis vector of `A^{source_degree}` to the
/// `target_index`-th basis vector of `B^{source_degree + k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HomBasisElem {
    pub source_degree: i64,
    pub source_index: usize,
    pub target_index: usize,
}

/// The complex `Hom(A, B)` with `Hom^k = (+)_i Hom(A^i, B^{i+k})` and
/// differential `D f = d_B . f - (-1)^{|f|} f . d_A`, plus the bookkeeping
/// to move between coordinate vectors and actual graded maps.
#[derive(Clone, Debug)]
pub struct HomComplex<S> {
    pub complex: ChainComplex<S>,
    pub source: ChainComplex<S>,
    pub target: ChainComplex<S>,
    index: BTreeMap<i64, Vec<HomBasisElem>>,
}

impl<S: Scalar> HomComplex<S> {
    pub fn new(a: &ChainComplex<S>, b: &ChainComplex<S>) -> Self {
        let mut index: BTreeMap<i64, Vec<HomBasisElem>> = BTreeMap::new();
        for i in a.space().degrees() {
            for j in b.space().degrees() {
                let k = j - i;
                let entry = index.entry(k).or_default();
                for src in 0..a.dim(i) {
                    for tgt in 0..b.dim(j) {
                        entry.push(HomBasisElem {
                            source_degree: i,
                            source_index: src,
                            target_index: tgt,
                        });
                    }
                }
            }
        }
        for elems in index.values_mut() {
            elems.sort();
        }

        let mut components = BTreeMap::new();
        for (&k, elems) in &index {
            let labels = elems
                .iter()
                .map(|e| {
                    let src = &a.space().labels(e.source_degree)[e.source_index];
                    let tgt = &b.space().labels(e.source_degree + k)[e.target_index];
                    format!("{}:{src}->{tgt}", e.source_degree)
                })
                .collect();
            components.insert(k, labels);
        }
        let space = GradedVectorSpace::new(components).expect("hom labels are unique");

        let mut diffs = BTreeMap::new();
        for (&k, elems) in &index {
            let out = match index.get(&(k + 1)) {
                Some(o) => o,
                None => continue,
            };
            let sign = if k.rem_euclid(2) == 0 {
                S::one()
            } else {
                -S::one()
            };
            let mut block: Matrix<S> = Matrix::zeros(out.len(), elems.len());
            for (col, e) in elems.iter().enumerate() {
                let i = e.source_degree;
                // d_B . f lands in Hom(A^i, B^{i+k+1}).
                let db = b.d(i + k);
                for t in 0..b.dim(i + k + 1) {
                    let coeff = db[(t, e.target_index)].clone();
                    if coeff.is_zero() {
                        continue;
                    }
                    let row = position_of(
                        out,
                        HomBasisElem {
                            source_degree: i,
                            source_index: e.source_index,
                            target_index: t,
                        },
                    );
                    block[(row, col)] = block[(row, col)].clone() + coeff;
                }
                // -(-1)^k f . d_A lands in Hom(A^{i-1}, B^{i+k}).
                let da = a.d(i - 1);
                for s in 0..a.dim(i - 1) {
                    let coeff = da[(e.source_index, s)].clone();
                    if coeff.is_zero() {
                        continue;
                    }
                    let row = position_of(
                        out,
                        HomBasisElem {
                            source_degree: i - 1,
                            source_index: s,
                            target_index: e.target_index,
                        },
                    );
                    block[(row, col)] = block[(row, col)].clone() - sign.clone() * coeff;
                }
            }
            if !block.is_zero() {
                diffs.insert(k, block);
            }
        }

        let complex = ChainComplex::new(space, diffs).expect("hom blocks are well-shaped");
        HomComplex {
            complex,
            source: a.clone(),
            target: b.clone(),
            index,
        }
    }

    pub fn basis(&self, degree: i64) -> &[HomBasisElem] {
        self.index
            .get(&degree)
            .map_or(&[] as &[HomBasisElem], Vec::as_slice)
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.basis(degree).len()
    }

    pub fn coord_index(&self, degree: i64, elem: HomBasisElem) -> usize {
        position_of(self.basis(degree), elem)
    }

    /// Turns a coordinate vector in `Hom^k` into the graded map it encodes.
    pub fn map_from_coords(&self, degree: i64, coords: &[S]) -> ChainMap<S> {
        let elems = self.basis(degree);
        assert_eq!(coords.len(), elems.len(), "coordinate length mismatch");
        let mut blocks: BTreeMap<i64, Matrix<S>> = BTreeMap::new();
        for i in self.source.space().degrees() {
            blocks.insert(
                i,
                Matrix::zeros(self.target.dim(i + degree), self.source.dim(i)),
            );
        }
        for (e, c) in elems.iter().zip(coords) {
            if c.is_zero() {
                continue;
            }
            let block = blocks.get_mut(&e.source_degree).expect("degree indexed");
            block[(e.target_index, e.source_index)] =
                block[(e.target_index, e.source_index)].clone() + c.clone();
        }
        ChainMap::new(self.source.clone(), self.target.clone(), degree, blocks)
            .expect("blocks built to shape")
    }

    /// Coordinates of a graded map, inverse to [`HomComplex::map_from_coords`].
    pub fn coords_of_map(&self, map: &ChainMap<S>) -> Vec<S> {
        let elems = self.basis(map.degree);
        elems
            .iter()
            .map(|e| map.block(e.source_degree)[(e.target_index, e.source_index)].clone())
            .collect()
    }
}

fn position_of(elems: &[HomBasisElem], elem: HomBasisElem) -> usize {
    elems
        .binary_search(&elem)
        .expect("hom basis element present")
}

/// `Hom(A, B)` as a plain complex.
pub fn hom_complex<S: Scalar>(a: &ChainComplex<S>, b: &ChainComplex<S>) -> ChainComplex<S> {
    HomComplex::new(a, b).complex
}

/// `End(A) = Hom(A, A)` as a plain complex.
pub fn end_complex<S: Scalar>(a: &ChainComplex<S>) -> ChainComplex<S> {
    hom_complex(a, a)
}
