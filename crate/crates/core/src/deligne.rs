//! The Deligne groupoid and its simplicial enrichment.
//!
//! The n-simplices of the nerve of a nilpotent dgla `h` are the
//! Maurer–Cartan elements of `Ω_n ⊗ h`, where `Ω_n` is the algebra of
//! polynomial forms on the n-simplex; the gauge group in simplicial degree
//! n is `exp((Ω_n ⊗ h)⁰)`, handled through logarithms. Both sets are
//! infinite, so they are represented by membership and constructor
//! operations — never by enumeration — and every constructed simplex is
//! certified by the Maurer–Cartan predicate before it is returned.
//!
//! Horn-filling is deliberately not implemented; the fibration-flavored
//! content is evidenced through the two explicit fillers that matter
//! downstream: gauge paths (1-simplices connecting a point to its gauge
//! transform) and contraction paths (1-simplices contracting the gauge
//! group onto the identity). π₀ comparisons are exact over square-zero
//! coefficients, where both sides reduce to linear algebra.

use std::collections::BTreeMap;

use crate::artin::ArtinianLocalDga;
use crate::dgla::{Dgla, DglaMorphism};
use crate::forms::{degeneracy_map, face_map, Monomial, SullivanForm};
use crate::linalg::Matrix;
use crate::mc::{
    bch, curvature, gauge_act, is_mc, mc_solve_square_zero, MCHost, McError, TensorHost,
};
use crate::scalar::Scalar;

/// The nilpotent dgla `Ω_n ⊗ m ⊗ g`, represented lazily: an element is one
/// polynomial-form coefficient per basis element of the finite tensor host
/// `m ⊗ g`. All form coefficients share the simplex dimension and the
/// polynomial degree bound.
#[derive(Clone, Debug)]
pub struct FormHost<S> {
    base: TensorHost<S>,
    n: usize,
    bound: u32,
}

impl<S: Scalar> FormHost<S> {
    pub fn new(base: TensorHost<S>, n: usize, bound: u32) -> Self {
        FormHost { base, n, bound }
    }

    pub fn base(&self) -> &TensorHost<S> {
        &self.base
    }

    pub fn simplex_dim(&self) -> usize {
        self.n
    }

    pub fn poly_bound(&self) -> u32 {
        self.bound
    }

    /// Embeds a finite tensor element as an element with constant
    /// coefficients. This is a map of dglas.
    pub fn constant_elt(&self, coords: &[S]) -> Vec<SullivanForm<S>> {
        assert_eq!(coords.len(), self.base.dim());
        coords
            .iter()
            .map(|c| SullivanForm::constant(self.n, self.bound, c.clone()))
            .collect()
    }

    /// Multiplies every coefficient by a form on the left (the module
    /// structure of `Ω_n ⊗ h` over `Ω_n`; no Koszul sign arises).
    pub fn form_mul(
        &self,
        f: &SullivanForm<S>,
        v: &[SullivanForm<S>],
    ) -> Result<Vec<SullivanForm<S>>, McError> {
        v.iter()
            .map(|w| f.wedge(w).map_err(McError::from))
            .collect()
    }

    /// The coefficient forms of an element, indexed by the tensor basis.
    pub fn coefficients<'a>(
        &self,
        v: &'a [SullivanForm<S>],
    ) -> impl Iterator<Item = (usize, &'a SullivanForm<S>)> {
        v.iter().enumerate().filter(|(_, f)| !f.is_zero())
    }

    /// Whether every monomial sits in total degree `deg` (form degree plus
    /// tensor-basis degree).
    pub fn is_homogeneous(&self, v: &[SullivanForm<S>], deg: i64) -> bool {
        v.iter().enumerate().all(|(p, f)| {
            let base_deg = self.base.algebra().degree(p);
            f.terms()
                .all(|(mono, _)| mono.form_degree() as i64 + base_deg == deg)
        })
    }

    /// For an element on the 0-simplex, the finite tensor coordinates.
    pub fn flatten_point(&self, v: &[SullivanForm<S>]) -> Vec<S> {
        assert_eq!(self.n, 0, "only 0-simplex elements are points");
        v.iter().map(|f| f.coeff(&Monomial::one(0))).collect()
    }

    /// The host of the (n−1)-simplex faces.
    pub fn face_host(&self) -> FormHost<S> {
        assert!(self.n >= 1, "the 0-simplex has no faces");
        FormHost::new(self.base.clone(), self.n - 1, self.bound)
    }

    /// Coefficient-wise pullback along the i-th coface.
    pub fn face_elt(&self, i: usize, v: &[SullivanForm<S>]) -> Vec<SullivanForm<S>> {
        v.iter().map(|f| face_map(i, f)).collect()
    }

    /// The host of the (n+1)-simplex degeneracies.
    pub fn degeneracy_host(&self) -> FormHost<S> {
        FormHost::new(self.base.clone(), self.n + 1, self.bound)
    }

    /// Coefficient-wise pullback along the i-th codegeneracy.
    pub fn degeneracy_elt(&self, i: usize, v: &[SullivanForm<S>]) -> Vec<SullivanForm<S>> {
        v.iter().map(|f| degeneracy_map(i, f)).collect()
    }
}

impl<S: Scalar> MCHost<S> for FormHost<S> {
    type Elt = Vec<SullivanForm<S>>;

    fn zero(&self) -> Self::Elt {
        vec![SullivanForm::zero(self.n, self.bound); self.base.dim()]
    }

    fn is_zero(&self, a: &Self::Elt) -> bool {
        a.iter().all(SullivanForm::is_zero)
    }

    fn add(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }

    fn neg(&self, a: &Self::Elt) -> Self::Elt {
        a.iter().map(SullivanForm::neg).collect()
    }

    fn scale(&self, s: &S, a: &Self::Elt) -> Self::Elt {
        a.iter().map(|x| x.scale(s)).collect()
    }

    /// `d(ω ⊗ e) = dω ⊗ e + (−1)^{|ω|} ω ⊗ d_h(e)`, per monomial.
    fn d(&self, a: &Self::Elt) -> Result<Self::Elt, McError> {
        let mut out = self.zero();
        for (q, f) in a.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            out[q] = out[q].add(&f.omega_d()?);
            let signed = f.koszul_scale(1);
            for (p, c) in self.base.algebra().d_elem(q) {
                out[p] = out[p].add(&signed.scale(&c));
            }
        }
        Ok(out)
    }

    /// `[ω ⊗ e, η ⊗ e'] = (−1)^{|e||η|} (ω ∧ η) ⊗ [e, e']`, per monomial.
    fn bracket(&self, a: &Self::Elt, b: &Self::Elt) -> Result<Self::Elt, McError> {
        let mut out = self.zero();
        for (p, u) in a.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            let deg_p = self.base.algebra().degree(p);
            for (q, v) in b.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let lie = self.base.algebra().bracket_elems(p, q);
                if lie.is_empty() {
                    continue;
                }
                let product = u.wedge(&v.koszul_scale(deg_p))?;
                if product.is_zero() {
                    continue;
                }
                for (r, c) in lie {
                    out[r] = out[r].add(&product.scale(&c));
                }
            }
        }
        Ok(out)
    }

    fn bracket_depth(&self) -> usize {
        self.base.bracket_depth()
    }
}

/// Result of a nerve membership test, carrying a witness on failure.
#[derive(Clone, Debug, PartialEq)]
pub enum NerveCheck {
    Member,
    /// The curvature is nonzero; `monomial` names one offending
    /// coefficient, e.g. `dt1⊗eps⊗x`.
    NotMember { monomial: String },
}

impl NerveCheck {
    pub fn is_member(&self) -> bool {
        matches!(self, NerveCheck::Member)
    }
}

/// Whether `Z` is an n-simplex of the nerve: Maurer–Cartan in
/// `Ω_n ⊗ m ⊗ g`. On failure the first nonzero curvature monomial is
/// reported.
pub fn nerve_member<S: Scalar>(
    host: &FormHost<S>,
    z: &[SullivanForm<S>],
) -> Result<NerveCheck, McError> {
    let c = curvature(host, &z.to_vec())?;
    for (p, f) in c.iter().enumerate() {
        if let Some((mono, _)) = f.terms().next() {
            return Ok(NerveCheck::NotMember {
                monomial: format!("{mono}⊗{}", host.base().algebra().label(p)),
            });
        }
    }
    Ok(NerveCheck::Member)
}

/// A certified n-simplex of the nerve.
#[derive(Clone, Debug)]
pub struct NerveSimplex<S> {
    n: usize,
    element: Vec<SullivanForm<S>>,
}

impl<S: Scalar> PartialEq for NerveSimplex<S> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.element == other.element
    }
}

impl<S: Scalar> NerveSimplex<S> {
    /// Certifies a candidate by the Maurer–Cartan predicate.
    pub fn certify(host: &FormHost<S>, element: Vec<SullivanForm<S>>) -> Result<Self, McError> {
        match nerve_member(host, &element)? {
            NerveCheck::Member => Ok(NerveSimplex {
                n: host.simplex_dim(),
                element,
            }),
            NerveCheck::NotMember { monomial } => Err(McError::PreconditionFailed {
                reason: format!("not Maurer–Cartan: nonzero curvature at {monomial}"),
            }),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn element(&self) -> &[SullivanForm<S>] {
        &self.element
    }
}

/// A gauge-group n-simplex, stored through its logarithm: a degree-0
/// element of `Ω_n ⊗ m ⊗ g`.
#[derive(Clone, Debug)]
pub struct GaugeGroupSimplex<S> {
    n: usize,
    logarithm: Vec<SullivanForm<S>>,
}

impl<S: Scalar> PartialEq for GaugeGroupSimplex<S> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.logarithm == other.logarithm
    }
}

impl<S: Scalar> GaugeGroupSimplex<S> {
    pub fn identity(host: &FormHost<S>) -> Self {
        GaugeGroupSimplex {
            n: host.simplex_dim(),
            logarithm: MCHost::<S>::zero(host),
        }
    }

    /// Wraps a degree-0 logarithm.
    pub fn from_logarithm(host: &FormHost<S>, logarithm: Vec<SullivanForm<S>>) -> Self {
        assert!(
            host.is_homogeneous(&logarithm, 0),
            "gauge logarithms are degree-0 elements"
        );
        GaugeGroupSimplex {
            n: host.simplex_dim(),
            logarithm,
        }
    }

    /// The 0-simplex with the given finite logarithm coordinates.
    pub fn point(host: &FormHost<S>, coords: &[S]) -> Self {
        assert_eq!(host.simplex_dim(), 0);
        Self::from_logarithm(host, host.constant_elt(coords))
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn logarithm(&self) -> &[SullivanForm<S>] {
        &self.logarithm
    }
}

/// The group law: logarithms compose through the
/// Baker–Campbell–Hausdorff series in `Ω_n ⊗ m ⊗ g`.
pub fn group_mul<S: Scalar>(
    host: &FormHost<S>,
    g: &GaugeGroupSimplex<S>,
    g_prime: &GaugeGroupSimplex<S>,
) -> Result<GaugeGroupSimplex<S>, McError> {
    assert_eq!(g.n, host.simplex_dim(), "simplex dimensions must match");
    assert_eq!(g_prime.n, host.simplex_dim(), "simplex dimensions must match");
    let logarithm = bch(host, &g.logarithm, &g_prime.logarithm)?;
    Ok(GaugeGroupSimplex {
        n: host.simplex_dim(),
        logarithm,
    })
}

/// Connects a Maurer–Cartan point to its gauge transform: the 1-simplex
/// `Z = exp(−t·γ) · (constant at gauge_act(γ, z))`, which has dt-component
/// exactly γ and faces `z` (at t = 1, face 0) and `gauge_act(γ, z)` (at
/// t = 0, face 1). All postconditions are re-verified before returning.
pub fn gauge_path<S: Scalar>(
    host: &FormHost<S>,
    z: &[S],
    gamma: &[S],
) -> Result<NerveSimplex<S>, McError> {
    assert_eq!(host.simplex_dim(), 1, "gauge paths are 1-simplices");
    let base = host.base();
    assert!(
        is_mc(base, &z.to_vec())?,
        "gauge paths start at Maurer–Cartan points"
    );
    let w = gauge_act(base, &gamma.to_vec(), &z.to_vec())?;

    let t = SullivanForm::coordinate(1, host.poly_bound(), 1);
    let alpha = MCHost::<S>::neg(host, &host.form_mul(&t, &host.constant_elt(gamma))?);
    let path = gauge_act(host, &alpha, &host.constant_elt(&w))?;

    // Self-verification: membership, both faces, and the dt-component.
    let simplex = NerveSimplex::certify(host, path)?;
    let face_host = host.face_host();
    let at_one = face_host.flatten_point(&host.face_elt(0, &simplex.element));
    let at_zero = face_host.flatten_point(&host.face_elt(1, &simplex.element));
    assert_eq!(at_one, z, "face 0 of a gauge path is the starting point");
    assert_eq!(at_zero, w, "face 1 of a gauge path is the gauge transform");
    let dt = Monomial {
        powers: vec![0],
        dts: vec![0],
    };
    for (p, f) in simplex.element.iter().enumerate() {
        assert_eq!(
            f.coeff(&dt),
            gamma[p].clone(),
            "the dt-component of a gauge path is the gauge logarithm"
        );
    }
    Ok(simplex)
}

/// Contracts a gauge-group point onto the identity: the 1-simplex with
/// logarithm `t·log(g)`, whose faces are `g` (at t = 1, face 0) and the
/// identity (at t = 0, face 1).
pub fn contraction_path<S: Scalar>(
    point_host: &FormHost<S>,
    g: &GaugeGroupSimplex<S>,
) -> Result<GaugeGroupSimplex<S>, McError> {
    assert_eq!(g.dimension(), 0, "contraction paths start from 0-simplices");
    let log_g = point_host.flatten_point(g.logarithm());
    let interval = FormHost::new(point_host.base().clone(), 1, point_host.poly_bound());
    let t = SullivanForm::coordinate(1, interval.poly_bound(), 1);
    let logarithm = interval.form_mul(&t, &interval.constant_elt(&log_g))?;
    Ok(GaugeGroupSimplex::from_logarithm(&interval, logarithm))
}

/// Exact π₀ of the nerve over square-zero coefficients: the Maurer–Cartan
/// set is the kernel of d on degree 1, the gauge action is the affine
/// translation by the image of d on degree 0, and the orbit space is their
/// exact linear quotient. `representatives` is a basis of a complement of
/// the image inside the kernel — one representative per basis direction of
/// the orbit space, the zero orbit not listed.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareZeroPi0<S> {
    pub mc_dimension: usize,
    pub orbit_dimension: usize,
    pub representatives: Vec<Vec<S>>,
}

pub fn pi0_sigma_square_zero<S: Scalar>(
    g: &Dgla<S>,
    r: &ArtinianLocalDga<S>,
) -> Result<SquareZeroPi0<S>, McError> {
    let host = TensorHost::new(r, g)?;
    let kernel = mc_solve_square_zero(&host)?;
    let dim = host.dim();
    let image: Vec<Vec<S>> = host
        .algebra()
        .degree_indices(0)
        .iter()
        .map(|&i| {
            let mut e = vec![S::zero(); dim];
            e[i] = S::one();
            host.algebra().d_full(&e)
        })
        .collect();
    let image_basis: Vec<Vec<S>> = Matrix::extend_span(dim, &[], &image)
        .into_iter()
        .map(|i| image[i].clone())
        .collect();
    let representatives: Vec<Vec<S>> = Matrix::extend_span(dim, &image_basis, &kernel)
        .into_iter()
        .map(|i| kernel[i].clone())
        .collect();
    Ok(SquareZeroPi0 {
        mc_dimension: kernel.len(),
        orbit_dimension: representatives.len(),
        representatives,
    })
}

/// The linear map induced on square-zero orbit spaces by a dgla morphism,
/// expressed in the representative bases of [`pi0_sigma_square_zero`].
#[derive(Clone, Debug, PartialEq)]
pub struct InducedMapReport<S> {
    pub matrix: Matrix<S>,
    pub injective: bool,
    pub surjective: bool,
}

pub fn mc_classes_map<S: Scalar>(
    f: &DglaMorphism<S>,
    r: &ArtinianLocalDga<S>,
) -> Result<InducedMapReport<S>, McError> {
    assert!(f.validate().ok(), "the morphism must be a valid dgla map");
    let source = pi0_sigma_square_zero(&f.source, r)?;
    let target_host = TensorHost::new(r, &f.target)?;
    let target = pi0_sigma_square_zero(&f.target, r)?;
    let dim_t = target_host.dim();
    let g_dim_s = f.source.dim();
    let g_dim_t = f.target.dim();
    let m_dim = dim_t / g_dim_t.max(1);

    // 1 ⊗ f on tensor coordinates: apply f on each m-slice.
    let tensor_f = |v: &[S]| -> Vec<S> {
        let mut out = vec![S::zero(); dim_t];
        for a in 0..m_dim {
            let slice = &v[a * g_dim_s..(a + 1) * g_dim_s];
            let mapped = f.apply_full(slice);
            out[a * g_dim_t..(a + 1) * g_dim_t].clone_from_slice(&mapped);
        }
        out
    };

    // Coordinates in the target orbit space: solve against the
    // representative basis extended by the gauge image.
    let image: Vec<Vec<S>> = target_host
        .algebra()
        .degree_indices(0)
        .iter()
        .map(|&i| {
            let mut e = vec![S::zero(); dim_t];
            e[i] = S::one();
            target_host.algebra().d_full(&e)
        })
        .collect();
    let mut cols = target.representatives.clone();
    cols.extend(image);
    let solver = Matrix::from_cols_of(dim_t, &cols);

    let mut matrix = Matrix::zeros(target.orbit_dimension, source.orbit_dimension);
    for (j, rep) in source.representatives.iter().enumerate() {
        let mapped = tensor_f(rep);
        let x = solver
            .solve(&mapped)
            .expect("a chain map sends Maurer–Cartan classes to Maurer–Cartan classes");
        for i in 0..target.orbit_dimension {
            matrix[(i, j)] = x[i].clone();
        }
    }
    let rank = matrix.rank();
    Ok(InducedMapReport {
        injective: rank == source.orbit_dimension,
        surjective: rank == target.orbit_dimension,
        matrix,
    })
}

/// A simplicial set truncated at level `L`, given by explicit face and
/// degeneracy tables. The simplicial identities are checked at
/// construction as far as the truncation allows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSimplicialSet {
    sizes: Vec<usize>,
    /// faces[n-1][i][s] = the i-th face of simplex s at level n.
    faces: Vec<Vec<Vec<usize>>>,
    /// degeneracies[n][i][s] = the i-th degeneracy of simplex s at level n.
    degeneracies: Vec<Vec<Vec<usize>>>,
}

impl FiniteSimplicialSet {
    pub fn new(
        sizes: Vec<usize>,
        faces: Vec<Vec<Vec<usize>>>,
        degeneracies: Vec<Vec<Vec<usize>>>,
    ) -> Self {
        assert!(!sizes.is_empty(), "at least level 0 is required");
        let top = sizes.len() - 1;
        assert_eq!(faces.len(), top, "one face table per level 1..=L");
        assert_eq!(degeneracies.len(), top, "one degeneracy table per level 0..L");
        let x = FiniteSimplicialSet {
            sizes,
            faces,
            degeneracies,
        };
        for n in 1..=top {
            assert_eq!(x.faces[n - 1].len(), n + 1, "level {n} needs {} faces", n + 1);
            for i in 0..=n {
                assert_eq!(x.faces[n - 1][i].len(), x.sizes[n]);
                for &img in &x.faces[n - 1][i] {
                    assert!(img < x.sizes[n - 1], "face image out of range");
                }
            }
        }
        for n in 0..top {
            assert_eq!(x.degeneracies[n].len(), n + 1);
            for i in 0..=n {
                assert_eq!(x.degeneracies[n][i].len(), x.sizes[n]);
                for &img in &x.degeneracies[n][i] {
                    assert!(img < x.sizes[n + 1], "degeneracy image out of range");
                }
            }
        }
        x.check_identities();
        x
    }

    fn check_identities(&self) {
        let top = self.sizes.len() - 1;
        // ∂_i ∂_j = ∂_{j−1} ∂_i for i < j.
        for n in 2..=top {
            for s in 0..self.sizes[n] {
                for j in 1..=n {
                    for i in 0..j {
                        assert_eq!(
                            self.face(n - 1, i, self.face(n, j, s)),
                            self.face(n - 1, j - 1, self.face(n, i, s)),
                            "face identity fails at level {n}, simplex {s}"
                        );
                    }
                }
            }
        }
        // s_i s_j = s_{j+1} s_i for i ≤ j.
        for n in 0..top.saturating_sub(1) {
            for s in 0..self.sizes[n] {
                for j in 0..=n {
                    for i in 0..=j {
                        assert_eq!(
                            self.degeneracy(n + 1, i, self.degeneracy(n, j, s)),
                            self.degeneracy(n + 1, j + 1, self.degeneracy(n, i, s)),
                            "degeneracy identity fails at level {n}, simplex {s}"
                        );
                    }
                }
            }
        }
        // ∂_i s_j relations.
        for n in 0..top {
            for s in 0..self.sizes[n] {
                for j in 0..=n {
                    let up = self.degeneracy(n, j, s);
                    for i in 0..=(n + 1) {
                        let got = self.face(n + 1, i, up);
                        if i == j || i == j + 1 {
                            assert_eq!(got, s, "∂_{i} s_{j} must be the identity");
                        } else if n >= 1 {
                            let expected = if i < j {
                                self.degeneracy(n - 1, j - 1, self.face(n, i, s))
                            } else {
                                self.degeneracy(n - 1, j, self.face(n, i - 1, s))
                            };
                            assert_eq!(got, expected, "mixed identity fails at ∂_{i} s_{j}");
                        }
                    }
                }
            }
        }
    }

    pub fn truncation_level(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn level_size(&self, n: usize) -> usize {
        self.sizes[n]
    }

    pub fn face(&self, n: usize, i: usize, s: usize) -> usize {
        self.faces[n - 1][i][s]
    }

    pub fn degeneracy(&self, n: usize, i: usize, s: usize) -> usize {
        self.degeneracies[n][i][s]
    }
}

/// Connected components by edge connectivity on levels 0 and 1.
pub fn pi0(x: &FiniteSimplicialSet) -> usize {
    let vertices = x.level_size(0);
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn root(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    if x.truncation_level() >= 1 {
        for e in 0..x.level_size(1) {
            let a = root(&mut parent, x.face(1, 0, e));
            let b = root(&mut parent, x.face(1, 1, e));
            parent[a] = b;
        }
    }
    (0..vertices)
        .filter(|&v| root(&mut parent, v) == v)
        .count()
}

/// A finite groupoid presentation: arrows with sources and targets, an
/// identity arrow per object, and a total composition table on composable
/// pairs (`compose[(g, f)] = g ∘ f` when `tgt(f) = src(g)`).
#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    objects: usize,
    src: Vec<usize>,
    tgt: Vec<usize>,
    identities: Vec<usize>,
    compose: BTreeMap<(usize, usize), usize>,
}

impl FiniteGroupoid {
    pub fn new(
        objects: usize,
        arrows: &[(usize, usize)],
        identities: Vec<usize>,
        compose: BTreeMap<(usize, usize), usize>,
    ) -> Self {
        let (src, tgt): (Vec<usize>, Vec<usize>) = arrows.iter().copied().unzip();
        let g = FiniteGroupoid {
            objects,
            src,
            tgt,
            identities,
            compose,
        };
        assert_eq!(g.identities.len(), objects, "one identity per object");
        for (o, &e) in g.identities.iter().enumerate() {
            assert_eq!((g.src[e], g.tgt[e]), (o, o), "identity endpoints");
        }
        for f in 0..g.src.len() {
            for h in 0..g.src.len() {
                if g.tgt[f] == g.src[h] {
                    let c = *g
                        .compose
                        .get(&(h, f))
                        .expect("composition must be total on composable pairs");
                    assert_eq!((g.src[c], g.tgt[c]), (g.src[f], g.tgt[h]));
                }
            }
        }
        for f in 0..g.src.len() {
            assert_eq!(g.compose[&(g.identities[g.tgt[f]], f)], f, "left unit");
            assert_eq!(g.compose[&(f, g.identities[g.src[f]])], f, "right unit");
        }
        g
    }

    /// The one-object groupoid of a finite group given by its
    /// multiplication table (`table[a][b] = a·b`, identity at index 0).
    pub fn one_object_group(table: &[Vec<usize>]) -> Self {
        let k = table.len();
        let mut compose = BTreeMap::new();
        for (a, row) in table.iter().enumerate() {
            for (b, &product) in row.iter().enumerate() {
                // Arrow composition g∘f matches the group product g·f.
                compose.insert((a, b), product);
            }
        }
        FiniteGroupoid::new(1, &vec![(0, 0); k], vec![0], compose)
    }

    /// The discrete groupoid on `k` objects (identity arrows only).
    pub fn discrete(k: usize) -> Self {
        let arrows: Vec<(usize, usize)> = (0..k).map(|o| (o, o)).collect();
        let compose = (0..k).map(|o| ((o, o), o)).collect();
        FiniteGroupoid::new(k, &arrows, (0..k).collect(), compose)
    }
}

/// The nerve of a finite groupoid up to level `L`: level n is the set of
/// composable strings of n arrows, outer faces drop an end, inner faces
/// compose, and degeneracies insert identities.
pub fn finite_nerve(gpd: &FiniteGroupoid, level: usize) -> FiniteSimplicialSet {
    // Strings are stored per level in lexicographic order of arrow ids.
    let mut strings: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]];
    for n in 1..=level {
        let mut next = Vec::new();
        if n == 1 {
            for f in 0..gpd.src.len() {
                next.push(vec![f]);
            }
        } else {
            for s in &strings[n - 1] {
                let last = *s.last().unwrap();
                for f in 0..gpd.src.len() {
                    if gpd.src[f] == gpd.tgt[last] {
                        let mut t = s.clone();
                        t.push(f);
                        next.push(t);
                    }
                }
            }
        }
        strings.push(next);
    }
    // Level 0 is the object set.
    let mut sizes = vec![gpd.objects];
    sizes.extend(strings.iter().skip(1).map(Vec::len));

    let index: Vec<BTreeMap<Vec<usize>, usize>> = strings
        .iter()
        .map(|level| {
            level
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i))
                .collect()
        })
        .collect();

    let mut faces = Vec::new();
    for n in 1..=level {
        let mut per_i = vec![vec![0; sizes[n]]; n + 1];
        for (s_idx, s) in strings[n].iter().enumerate() {
            for i in 0..=n {
                per_i[i][s_idx] = if n == 1 {
                    // Faces of an arrow are its endpoints: face 0 drops the
                    // source, face 1 drops the target.
                    if i == 0 {
                        gpd.tgt[s[0]]
                    } else {
                        gpd.src[s[0]]
                    }
                } else {
                    let reduced: Vec<usize> = if i == 0 {
                        s[1..].to_vec()
                    } else if i == n {
                        s[..n - 1].to_vec()
                    } else {
                        let mut t = s[..i - 1].to_vec();
                        t.push(gpd.compose[&(s[i], s[i - 1])]);
                        t.extend_from_slice(&s[i + 1..]);
                        t
                    };
                    index[n - 1][&reduced]
                };
            }
        }
        faces.push(per_i);
    }

    let mut degeneracies = Vec::new();
    for n in 0..level {
        let mut per_i = vec![vec![0; sizes[n]]; n + 1];
        if n == 0 {
            for o in 0..gpd.objects {
                per_i[0][o] = index[1][&vec![gpd.identities[o]]];
            }
        } else {
            for (s_idx, s) in strings[n].iter().enumerate() {
                for i in 0..=n {
                    // Vertex i of the string: source of arrow i, or the
                    // final target when i = n.
                    let vertex = if i < n { gpd.src[s[i]] } else { gpd.tgt[s[n - 1]] };
                    let mut t = s[..i].to_vec();
                    t.push(gpd.identities[vertex]);
                    t.extend_from_slice(&s[i..]);
                    per_i[i][s_idx] = index[n + 1][&t];
                }
            }
        }
        degeneracies.push(per_i);
    }

    FiniteSimplicialSet::new(sizes, faces, degeneracies)
}

/// A bisimplicial set truncated at level `L` in each direction.
#[derive(Clone, Debug)]
pub struct FiniteBisimplicialSet {
    sizes: Vec<Vec<usize>>,
    /// h_faces[p-1][q][i][s]: i-th horizontal face X_{p,q} → X_{p−1,q}.
    h_faces: Vec<Vec<Vec<Vec<usize>>>>,
    /// v_faces[p][q-1][i][s]: i-th vertical face X_{p,q} → X_{p,q−1}.
    v_faces: Vec<Vec<Vec<Vec<usize>>>>,
    /// h_degeneracies[p][q][i][s]: X_{p,q} → X_{p+1,q}.
    h_degeneracies: Vec<Vec<Vec<Vec<usize>>>>,
    /// v_degeneracies[p][q][i][s]: X_{p,q} → X_{p,q+1}.
    v_degeneracies: Vec<Vec<Vec<Vec<usize>>>>,
}

impl FiniteBisimplicialSet {
    /// The bisimplicial set constant in the vertical direction:
    /// `X_{p,q} = Y_p`, with identity vertical structure maps.
    pub fn constant_vertical(y: &FiniteSimplicialSet) -> Self {
        let top = y.truncation_level();
        let sizes: Vec<Vec<usize>> = (0..=top)
            .map(|p| vec![y.level_size(p); top + 1])
            .collect();
        let identity = |p: usize, count: usize| -> Vec<Vec<usize>> {
            vec![(0..y.level_size(p)).collect(); count]
        };
        let mut h_faces = Vec::new();
        for p in 1..=top {
            let per_q: Vec<Vec<Vec<usize>>> = (0..=top)
                .map(|_| {
                    (0..=p)
                        .map(|i| (0..y.level_size(p)).map(|s| y.face(p, i, s)).collect())
                        .collect()
                })
                .collect();
            h_faces.push(per_q);
        }
        let mut v_faces = Vec::new();
        for p in 0..=top {
            let per_q: Vec<Vec<Vec<usize>>> =
                (1..=top).map(|q| identity(p, q + 1)).collect();
            v_faces.push(per_q);
        }
        let mut h_degeneracies = Vec::new();
        for p in 0..top {
            let per_q: Vec<Vec<Vec<usize>>> = (0..=top)
                .map(|_| {
                    (0..=p)
                        .map(|i| {
                            (0..y.level_size(p)).map(|s| y.degeneracy(p, i, s)).collect()
                        })
                        .collect()
                })
                .collect();
            h_degeneracies.push(per_q);
        }
        let mut v_degeneracies = Vec::new();
        for p in 0..=top {
            let per_q: Vec<Vec<Vec<usize>>> = (0..top).map(|q| identity(p, q + 1)).collect();
            v_degeneracies.push(per_q);
        }
        FiniteBisimplicialSet {
            sizes,
            h_faces,
            v_faces,
            h_degeneracies,
            v_degeneracies,
        }
    }

    pub fn size(&self, p: usize, q: usize) -> usize {
        self.sizes[p][q]
    }
}

/// The diagonal simplicial set: level n is `X_{n,n}`, with
/// `∂_i = ∂_i^h ∂_i^v` and `s_i = s_i^h s_i^v`.
pub fn diagonal(x: &FiniteBisimplicialSet) -> FiniteSimplicialSet {
    let top = x.sizes.len() - 1;
    let sizes: Vec<usize> = (0..=top).map(|n| x.size(n, n)).collect();
    let mut faces = Vec::new();
    for (n, &level) in sizes.iter().enumerate().skip(1) {
        let per_i: Vec<Vec<usize>> = (0..=n)
            .map(|i| {
                (0..level)
                    .map(|s| {
                        let after_h = x.h_faces[n - 1][n][i][s];
                        x.v_faces[n - 1][n - 1][i][after_h]
                    })
                    .collect()
            })
            .collect();
        faces.push(per_i);
    }
    let mut degeneracies = Vec::new();
    for (n, &level) in sizes.iter().enumerate().take(top) {
        let per_i: Vec<Vec<usize>> = (0..=n)
            .map(|i| {
                (0..level)
                    .map(|s| {
                        let after_h = x.h_degeneracies[n][n][i][s];
                        x.v_degeneracies[n + 1][n][i][after_h]
                    })
                    .collect()
            })
            .collect();
        degeneracies.push(per_i);
    }
    FiniteSimplicialSet::new(sizes, faces, degeneracies)
}
