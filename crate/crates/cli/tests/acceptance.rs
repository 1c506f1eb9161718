//! Acceptance suite. Each test exercises one advertised guarantee of the
//! library end to end — exact arithmetic throughout, no tolerances — and
//! prints an `acceptance NN <claim>: PASS` line on success (run with
//! `--nocapture` to see them; a failure panics with the offending detail).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use mcdeform::artin::{make_dual_numbers, validate_artinian, ArtinianLocalDga};
use mcdeform::check::ValidationReport;
use mcdeform::deform::{classify_first_order, counterexample_demo, iso_reducing_to_identity};
use mcdeform::deligne::{
    contraction_path, mc_classes_map, pi0_sigma_square_zero, FormHost, GaugeGroupSimplex,
};
use mcdeform::dgla::{end_dgla, validate_dgla, Dgla, DglaMorphism, SparseVec};
use mcdeform::forms::{degeneracy_map, face_map, Monomial, SullivanForm, DEFAULT_POLY_BOUND};
use mcdeform::graded::{end_complex, ChainComplex, GradedVectorSpace};
use mcdeform::linalg::Matrix;
use mcdeform::mc::{
    bch, curvature, gauge_act, is_mc, obstruction_step, LiftOutcome, MCHost, TensorHost,
};
use mcdeform::{rat, ratio, QArtinian, QComplex, QDgla, Rat};
use mcdeform_cli::doc::{self, Kind};
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pass(number: u32, claim: &str) {
    println!("acceptance {number:02} {claim}: PASS");
}

/// A sparse table entry: basis pair on the left, (target, coefficient) on
/// the right.
type TableEntry = ((usize, usize), (usize, i64));

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn load_dgla(name: &str) -> QDgla {
    doc::load(&fixture(name))
        .expect("fixture parses")
        .to_dgla()
        .expect("fixture is a dgla")
}

fn load_ring(name: &str) -> QArtinian {
    doc::load(&fixture(name))
        .expect("fixture parses")
        .to_artinian()
        .expect("fixture is an artinian algebra")
}

/// Five tensor hosts with nilpotency class at most 3, built from the
/// shipped fixture documents.
fn hosts() -> Vec<(&'static str, TensorHost<Rat>)> {
    let dual2 = load_ring("dual_numbers.json");
    let dual3 = load_ring("dual_numbers_3.json");
    vec![
        (
            "endomorphisms of two points over the dual numbers",
            TensorHost::new(&dual2, &load_dgla("end_two_points.json")).unwrap(),
        ),
        (
            "endomorphisms of the arrow over the dual numbers",
            TensorHost::new(&dual2, &load_dgla("end_arrow.json")).unwrap(),
        ),
        (
            "quadratic cone at third order",
            TensorHost::new(&dual3, &load_dgla("xy.json")).unwrap(),
        ),
        (
            "resolved quadratic cone at third order",
            TensorHost::new(&dual3, &load_dgla("xyu.json")).unwrap(),
        ),
        (
            "abelian pair over the dual numbers",
            TensorHost::new(&dual2, &load_dgla("abelian.json")).unwrap(),
        ),
    ]
}

fn random_homogeneous(rng: &mut ChaCha8Rng, host: &TensorHost<Rat>, deg: i64) -> Vec<Rat> {
    let algebra = host.algebra();
    let mut v = vec![Rat::zero(); algebra.dim()];
    for (i, slot) in v.iter_mut().enumerate() {
        if algebra.degree(i) == deg {
            *slot = rat(rng.gen_range(-2..=2));
        }
    }
    v
}

#[test]
fn acceptance_01_window_twists_are_gauge_nontrivial_yet_interior_acyclic() {
    for n in 2..=5 {
        let report = counterexample_demo::<Rat>(n).unwrap();
        assert!(report.twist_is_mc, "radius {n}: the shift twist solves the equation");
        assert!(
            !report.gauge_trivial,
            "radius {n}: the twist must not be gauge-equivalent to zero"
        );
        assert_eq!(
            report.interior_homology.len(),
            (2 * n - 1) as usize,
            "radius {n}: one entry per interior degree"
        );
        for &(degree, h) in &report.interior_homology {
            assert_eq!(h, 0, "radius {n}: interior degree {degree} must be acyclic");
        }
    }
    pass(1, "window twists are gauge-nontrivial with acyclic interiors");
}

/// A chain complex from (degree, dimension) pairs and unit entries of the
/// differential given as (source degree, target row, source column).
fn complex(dims: &[(i64, usize)], entries: &[(i64, usize, usize)]) -> QComplex {
    let space = GradedVectorSpace::with_dims(dims);
    let mut blocks: BTreeMap<i64, Matrix<Rat>> = space
        .degrees()
        .map(|i| (i, Matrix::zeros(space.dim(i + 1), space.dim(i))))
        .collect();
    for &(deg, row, col) in entries {
        blocks.get_mut(&deg).expect("populated degree")[(row, col)] = rat(1);
    }
    ChainComplex::new(space, blocks).unwrap()
}

#[test]
fn acceptance_02_classification_agrees_with_orbits_and_isomorphism_tests() {
    let complexes: Vec<(&str, QComplex)> = vec![
        ("two isolated points", complex(&[(-1, 1), (0, 1)], &[])),
        ("three isolated points", complex(&[(-1, 2), (0, 1)], &[])),
        ("zero-differential line", complex(&[(-2, 1), (-1, 1), (0, 1)], &[])),
        ("contractible arrow", complex(&[(-1, 1), (0, 1)], &[(-1, 0, 0)])),
        (
            "arrow with two spectators",
            complex(&[(-2, 1), (-1, 2), (0, 1)], &[(-2, 0, 0)]),
        ),
    ];
    let r = make_dual_numbers::<Rat>(2);
    for (name, a) in &complexes {
        let total: usize = a.space().degrees().map(|i| a.space().dim(i)).sum();
        assert!(total <= 6, "{name}: sample stays small");
        assert!(a.space().degrees().all(|i| i <= 0), "{name}: non-positive degrees");

        let classification = classify_first_order(a).unwrap();
        let orbits = pi0_sigma_square_zero(&end_dgla(a), &r).unwrap();
        assert_eq!(
            classification.dimension, orbits.orbit_dimension,
            "{name}: class-space dimension must match the exact orbit count"
        );

        // The emitted representatives, turned into twists, must fall into
        // exactly `dimension` distinct isomorphism classes, none of them
        // the trivial one.
        let host = TensorHost::new(&r, &end_dgla(a)).unwrap();
        let labels = end_complex(a).space().labels(1).to_vec();
        let twists: Vec<Vec<Rat>> = classification
            .cocycle_representatives
            .iter()
            .map(|rep| {
                let terms: Vec<(&str, &str, Rat)> = rep
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| ("eps", labels[i].as_str(), c.clone()))
                    .collect();
                host.coord_element(&terms)
            })
            .collect();
        let mut classes: Vec<Vec<Rat>> = vec![vec![Rat::zero(); host.dim()]];
        for z in &twists {
            let novel = classes
                .iter()
                .all(|w| iso_reducing_to_identity(a, &r, z, w).unwrap().is_none());
            if novel {
                classes.push(z.clone());
            }
        }
        assert_eq!(
            classes.len() - 1,
            classification.dimension,
            "{name}: representatives must realize pairwise non-isomorphic, nontrivial twists"
        );
    }
    pass(2, "first-order classes match exact orbits and isomorphism tests");
}

#[test]
fn acceptance_03_contraction_paths_have_group_faces_and_multiplicative_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut samples = 0;
    for (name, host) in hosts() {
        let point_host = FormHost::new(host.clone(), 0, DEFAULT_POLY_BOUND);
        let interval = FormHost::new(host.clone(), 1, DEFAULT_POLY_BOUND);
        for _ in 0..5 {
            let gamma = random_homogeneous(&mut rng, &host, 0);
            let g = GaugeGroupSimplex::point(&point_host, &gamma);
            let path = contraction_path(&point_host, &g).unwrap();
            assert_eq!(path.dimension(), 1, "{name}: contraction paths are 1-simplices");

            let at_one = point_host.flatten_point(&interval.face_elt(0, path.logarithm()));
            let at_zero = point_host.flatten_point(&interval.face_elt(1, path.logarithm()));
            assert_eq!(at_one, gamma, "{name}: face 0 is the contracted point");
            assert!(
                at_zero.iter().all(Zero::is_zero),
                "{name}: face 1 is the identity"
            );

            let eval = |s: &Rat| -> Vec<Rat> {
                path.logarithm()
                    .iter()
                    .map(|f| f.evaluate(std::slice::from_ref(s)))
                    .collect()
            };
            let s1 = ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3));
            let s2 = ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3));
            let composed = bch(&host, &eval(&s1), &eval(&s2)).unwrap();
            assert_eq!(
                composed,
                eval(&(s1.clone() + s2.clone())),
                "{name}: evaluations at {s1} and {s2} must compose additively"
            );
            samples += 1;
        }
    }
    assert!(samples >= 20, "enough contraction paths sampled");
    pass(3, "contraction paths contract onto the identity multiplicatively");
}

#[test]
fn acceptance_04_gauge_action_composes_through_the_group_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut pairs = 0;
    for (name, host) in hosts() {
        for _ in 0..20 {
            let seed_gamma = random_homogeneous(&mut rng, &host, 0);
            let z = gauge_act(&host, &seed_gamma, &host.zero()).unwrap();
            assert!(is_mc(&host, &z).unwrap(), "{name}: orbit of zero stays flat");

            let g1 = random_homogeneous(&mut rng, &host, 0);
            let g2 = random_homogeneous(&mut rng, &host, 0);
            let stepwise = gauge_act(&host, &g2, &gauge_act(&host, &g1, &z).unwrap()).unwrap();
            let combined = gauge_act(&host, &bch(&host, &g2, &g1).unwrap(), &z).unwrap();
            assert_eq!(
                stepwise, combined,
                "{name}: acting twice must equal acting by the product"
            );
            assert!(is_mc(&host, &stepwise).unwrap(), "{name}: the action preserves flatness");
            pairs += 1;
        }
    }
    assert!(pairs >= 100, "enough gauge pairs sampled");
    pass(4, "the gauge action preserves solutions and composes under the group law");
}

#[test]
fn acceptance_05_curvature_satisfies_the_differential_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let all = hosts();
    assert!(all.len() >= 5);
    let mut count = 0;
    for (name, host) in &all {
        for _ in 0..25 {
            let z = random_homogeneous(&mut rng, host, 1);
            let c = curvature(host, &z).unwrap();
            let lhs = host.add(&host.d(&c).unwrap(), &host.bracket(&z, &c).unwrap());
            assert!(
                host.is_zero(&lhs),
                "{name}: d(curvature) + [z, curvature] must vanish, got {}",
                host.render(&lhs)
            );
            count += 1;
        }
    }
    assert!(count >= 100, "enough curvature samples");
    pass(5, "d(curvature) + [z, curvature] vanishes identically");
}

#[test]
fn acceptance_06_second_order_obstruction_and_its_resolution() {
    let r = load_ring("dual_numbers_3.json");

    let cone = load_dgla("xy.json");
    let host = TensorHost::new(&r, &cone).unwrap();
    let z = host.coord_element(&[("eps", "x", rat(1))]);
    match obstruction_step(&host, &z, 1).unwrap() {
        LiftOutcome::Obstructed { class, description } => {
            assert_eq!(
                class,
                host.coord_element(&[("eps^2", "y", ratio(1, 2))]),
                "the obstruction is half the bracket square"
            );
            assert!(description.contains("eps^2⊗y"), "got {description}");
        }
        LiftOutcome::Lifted { .. } => panic!("the quadratic cone admits no second-order lift"),
    }

    let resolved = load_dgla("xyu.json");
    let host = TensorHost::new(&r, &resolved).unwrap();
    let z = host.coord_element(&[("eps", "x", rat(1))]);
    match obstruction_step(&host, &z, 1).unwrap() {
        LiftOutcome::Lifted { corrected } => {
            assert_eq!(
                corrected,
                host.coord_element(&[("eps", "x", rat(1)), ("eps^2", "u", ratio(-1, 2))]),
                "the correction subtracts half the primitive"
            );
            assert!(is_mc(&host, &corrected).unwrap(), "the corrected element is exact");
        }
        LiftOutcome::Obstructed { description, .. } => {
            panic!("du = y resolves the obstruction, got {description}")
        }
    }
    pass(6, "the order-two obstruction appears and a primitive removes it");
}

#[test]
fn acceptance_07_induced_maps_on_classes_detect_quasi_isomorphisms() {
    let r = make_dual_numbers::<Rat>(2);

    // Collapsing an acyclic summand: {x, u, v : du = v} onto {x}.
    let mut diff = Matrix::zeros(3, 3);
    diff[(2, 1)] = rat(1);
    let padded = Dgla::new(
        vec!["x".into(), "u".into(), "v".into()],
        vec![1, 1, 2],
        diff,
        BTreeMap::new(),
    )
    .unwrap();
    let line = Dgla::abelian(vec!["x".into()], vec![1]).unwrap();
    let collapse = DglaMorphism::new(
        padded,
        line.clone(),
        BTreeMap::from([(1, Matrix::from_rows(vec![vec![rat(1), rat(0)]]))]),
    )
    .unwrap();

    // The identity on a dgla with brackets in play.
    let end = load_dgla("end_two_points.json");
    let identity = DglaMorphism::identity(&end);

    // A shear automorphism of the abelian plane.
    let plane = Dgla::abelian(vec!["p".into(), "q".into()], vec![1, 1]).unwrap();
    let shear = DglaMorphism::new(
        plane.clone(),
        plane.clone(),
        BTreeMap::from([(
            1,
            Matrix::from_rows(vec![vec![rat(1), rat(1)], vec![rat(0), rat(1)]]),
        )]),
    )
    .unwrap();

    for (name, f) in [
        ("collapse of an acyclic summand", &collapse),
        ("identity", &identity),
        ("shear of the abelian plane", &shear),
    ] {
        assert!(f.validate().ok(), "{name} is a dgla morphism");
        let report = mc_classes_map(f, &r).unwrap();
        assert!(
            report.injective && report.surjective,
            "{name}: a surjective quasi-isomorphism must induce a bijection on classes"
        );
    }

    // A surjection that kills homology fails to stay injective.
    let fold = DglaMorphism::new(
        plane,
        line,
        BTreeMap::from([(1, Matrix::from_rows(vec![vec![rat(1), rat(0)]]))]),
    )
    .unwrap();
    assert!(fold.validate().ok());
    let report = mc_classes_map(&fold, &r).unwrap();
    assert!(report.surjective, "the fold stays surjective on classes");
    assert!(
        !report.injective,
        "killing a homology class must break injectivity on classes"
    );
    pass(7, "induced maps on classes are bijective exactly for the quasi-isomorphisms");
}

fn expect_axiom(report: &ValidationReport, axiom: &str, what: &str) {
    assert!(!report.ok(), "{what}: the validator must reject this object");
    assert!(
        report.failures.iter().any(|f| f.axiom == axiom),
        "{what}: expected a {axiom} failure, got {:?}",
        report.failures
    );
}

#[test]
fn acceptance_08_validators_accept_fixtures_and_name_every_broken_axiom() {
    // Every shipped fixture parses; the broken_* ones are rejected with a
    // named axiom, all others validate cleanly.
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    assert!(paths.len() >= 10, "the fixture corpus stays populated");
    for path in &paths {
        let document = doc::load(path).unwrap();
        let report = match document.kind() {
            Kind::Dgla => validate_dgla(&document.to_dgla().unwrap()),
            Kind::Artinian => validate_artinian(&document.to_artinian().unwrap()),
            Kind::Complex => document.to_complex().unwrap().validate(),
        };
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.starts_with("broken_") {
            assert!(!report.ok(), "{name} must be rejected");
            assert!(!report.failures.is_empty());
        } else {
            assert!(report.ok(), "{name} must validate: {:?}", report.failures);
        }
    }

    // Single-constant mutations of valid objects, each rejected with the
    // axiom it breaks. Chain complexes first.
    let broken_square = complex(&[(0, 1), (1, 1), (2, 1)], &[(0, 0, 0), (1, 0, 0)]);
    expect_axiom(&broken_square.validate(), "d_squared", "d(a)=b, d(b)=c");

    // dg Lie algebras: one mutation per axiom.
    let dgla = |labels: &[(&str, i64)],
                diff: &[(usize, usize)],
                brackets: &[TableEntry]|
     -> QDgla {
        let names = labels.iter().map(|(l, _)| l.to_string()).collect();
        let degrees = labels.iter().map(|(_, d)| *d).collect();
        let mut d = Matrix::zeros(labels.len(), labels.len());
        for &(row, col) in diff {
            d[(row, col)] = rat(1);
        }
        let mut table: BTreeMap<(usize, usize), SparseVec<Rat>> = BTreeMap::new();
        for &((a, b), (t, c)) in brackets {
            table.entry((a, b)).or_default().push((t, rat(c)));
        }
        Dgla::new(names, degrees, d, table).unwrap()
    };
    let wrong_degree = dgla(&[("x", 1), ("y", 2), ("w", 4)], &[], &[((0, 0), (2, 1))]);
    expect_axiom(&validate_dgla(&wrong_degree), "degree", "[x,x] landing two degrees high");
    let even_square = dgla(&[("e", 0), ("s", 0)], &[], &[((0, 0), (1, 1))]);
    expect_axiom(&validate_dgla(&even_square), "antisymmetry", "[e,e] nonzero for even e");
    let two_step = dgla(&[("x", 0), ("y", 1), ("z", 2)], &[(1, 0), (2, 1)], &[]);
    expect_axiom(&validate_dgla(&two_step), "d_squared", "d(x)=y, d(y)=z");
    let non_derivation = dgla(&[("x", 1), ("y", 2), ("z", 3)], &[(1, 0)], &[((0, 1), (2, 1))]);
    expect_axiom(&validate_dgla(&non_derivation), "leibniz", "d(x)=y against [x,y]=z");
    let cone_on_itself = dgla(
        &[("x", 1), ("y", 2), ("z", 3)],
        &[],
        &[((0, 0), (1, 1)), ((0, 1), (2, 1))],
    );
    expect_axiom(&validate_dgla(&cone_on_itself), "jacobi", "[x,[x,x]] inconsistent");

    // Artinian coefficient algebras: one mutation per axiom.
    let artin = |labels: &[(&str, i64)],
                 products: &[TableEntry],
                 diff: &[(usize, usize)],
                 m: &[&str]|
     -> QArtinian {
        let names: Vec<String> = labels.iter().map(|(l, _)| l.to_string()).collect();
        let degrees = labels.iter().map(|(_, d)| *d).collect();
        let mut table: BTreeMap<(usize, usize), SparseVec<Rat>> = BTreeMap::new();
        for &((a, b), (t, c)) in products {
            table.entry((a, b)).or_default().push((t, rat(c)));
        }
        let mut d = Matrix::zeros(labels.len(), labels.len());
        for &(row, col) in diff {
            d[(row, col)] = rat(1);
        }
        ArtinianLocalDga::new(names, degrees, table, d, "1", m).unwrap()
    };
    let unit = ((0, 0), (0, 1));

    let graded_wrong = artin(
        &[("1", 0), ("e", 0), ("f", 1)],
        &[unit, ((0, 1), (1, 1)), ((0, 2), (2, 1)), ((1, 1), (2, 1))],
        &[],
        &["e", "f"],
    );
    expect_axiom(&validate_artinian(&graded_wrong), "degree", "e·e of degree 1");
    let stray_line = artin(
        &[("1", 0), ("e", 0)],
        &[unit, ((0, 1), (1, 1))],
        &[],
        &[],
    );
    expect_axiom(&validate_artinian(&stray_line), "residue_field", "e outside the ideal");
    let doubled_unit = artin(
        &[("1", 0), ("e", 0)],
        &[unit, ((0, 1), (1, 2))],
        &[],
        &["e"],
    );
    expect_axiom(&validate_artinian(&doubled_unit), "unit", "1·e = 2e");
    let skew = artin(
        &[("1", 0), ("e", 0)],
        &[unit, ((0, 1), (1, 1)), ((1, 0), (1, 2))],
        &[],
        &["e"],
    );
    expect_axiom(&validate_artinian(&skew), "commutativity", "1·e ≠ e·1");
    let leaky_unit_derivative = artin(
        &[("1", 0), ("f", 1)],
        &[unit, ((0, 1), (1, 1))],
        &[(1, 0)],
        &["f"],
    );
    expect_axiom(&validate_artinian(&leaky_unit_derivative), "derivation", "d(1) = f");
    let curled = artin(
        &[("1", 0), ("a", 0), ("b", 1), ("c", 2)],
        &[unit, ((0, 1), (1, 1)), ((0, 2), (2, 1)), ((0, 3), (3, 1))],
        &[(2, 1), (3, 2)],
        &["a", "b", "c"],
    );
    expect_axiom(&validate_artinian(&curled), "d_squared", "d(a)=b, d(b)=c");
    let unital_square = artin(
        &[("1", 0), ("e", 0)],
        &[unit, ((0, 1), (1, 1)), ((1, 1), (0, 1))],
        &[],
        &["e"],
    );
    expect_axiom(&validate_artinian(&unital_square), "ideal", "e·e = 1 escapes the ideal");
    let idempotent = artin(
        &[("1", 0), ("e", 0)],
        &[unit, ((0, 1), (1, 1)), ((1, 1), (1, 1))],
        &[],
        &["e"],
    );
    expect_axiom(&validate_artinian(&idempotent), "nilpotent", "e·e = e never vanishes");

    pass(8, "validators accept the corpus and name the axiom each mutation breaks");
}

fn random_form(rng: &mut ChaCha8Rng, n: usize) -> (SullivanForm<Rat>, usize) {
    let k = rng.gen_range(0..=n.min(2));
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let mut mono = Monomial::one(n);
        for p in 0..n {
            mono.powers[p] = rng.gen_range(0..=1);
        }
        let mut coords: Vec<usize> = (0..n).collect();
        for _ in 0..k {
            let pick = rng.gen_range(0..coords.len());
            mono.dts.push(coords.remove(pick));
        }
        mono.dts.sort_unstable();
        terms.push((mono, rat(rng.gen_range(1..=3))));
    }
    (
        SullivanForm::from_terms(n, DEFAULT_POLY_BOUND, terms).unwrap(),
        k,
    )
}

#[test]
fn acceptance_09_polynomial_forms_obey_the_calculus_and_simplicial_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut forms_checked = 0;
    for n in 1..=3 {
        for _ in 0..34 {
            let (w, wk) = random_form(&mut rng, n);
            let (v, vk) = random_form(&mut rng, n);
            forms_checked += 2;

            let ddw = w.omega_d().unwrap().omega_d().unwrap();
            assert!(ddw.is_zero(), "d² must vanish on Δ{n}");

            let product = w.wedge(&v).unwrap();
            let left = w.omega_d().unwrap().wedge(&v).unwrap();
            let right = w.wedge(&v.omega_d().unwrap()).unwrap();
            let signed_right = if wk % 2 == 0 { right } else { right.neg() };
            assert_eq!(
                product.omega_d().unwrap(),
                left.add(&signed_right),
                "Leibniz on Δ{n}"
            );

            let flipped = v.wedge(&w).unwrap();
            let signed_flip = if (wk * vk) % 2 == 0 { flipped } else { flipped.neg() };
            assert_eq!(product, signed_flip, "graded commutativity on Δ{n}");

            // Double faces commute the simplicial way.
            for j in 0..=n {
                for i in 0..j {
                    if n >= 2 {
                        assert_eq!(
                            face_map(i, &face_map(j, &w)),
                            face_map(j - 1, &face_map(i, &w)),
                            "face-face identity ({i},{j}) on Δ{n}"
                        );
                    }
                }
            }
            // Double degeneracies likewise.
            for j in 0..=n {
                for i in 0..=j {
                    assert_eq!(
                        degeneracy_map(i, &degeneracy_map(j, &w)),
                        degeneracy_map(j + 1, &degeneracy_map(i, &w)),
                        "degeneracy-degeneracy identity ({i},{j}) on Δ{n}"
                    );
                }
            }
            // Mixed identities, including both sections of each degeneracy.
            for j in 0..=n {
                let sj = degeneracy_map(j, &w);
                assert_eq!(face_map(j, &sj), w, "face {j} sections degeneracy {j}");
                assert_eq!(face_map(j + 1, &sj), w, "face {} sections degeneracy {j}", j + 1);
                for i in 0..j {
                    assert_eq!(
                        face_map(i, &sj),
                        degeneracy_map(j - 1, &face_map(i, &w)),
                        "mixed identity ({i},{j}) on Δ{n}"
                    );
                }
                for i in (j + 2)..=(n + 1) {
                    assert_eq!(
                        face_map(i, &sj),
                        degeneracy_map(j, &face_map(i - 1, &w)),
                        "mixed identity ({i},{j}) on Δ{n}"
                    );
                }
            }
        }
    }
    assert!(forms_checked >= 200, "enough random forms sampled");
    pass(9, "polynomial forms satisfy the calculus and simplicial identities");
}

#[test]
fn acceptance_10_reports_are_byte_stable_and_pinned() {
    let bin = env!("CARGO_BIN_EXE_mcdeform");
    let manifest = env!("CARGO_MANIFEST_DIR");
    let element = r#"[["eps","f","1"]]"#;
    let scenarios: Vec<(&str, Vec<&str>)> = vec![
        ("validate_abelian.json", vec!["validate", "tests/fixtures/abelian.json"]),
        (
            "mc_lift_obstructed.json",
            vec![
                "mc",
                "tests/fixtures/xy.json",
                "tests/fixtures/dual_numbers_3.json",
                "--lift-order",
                "2",
                "--from",
                r#"[["eps","x","1"]]"#,
            ],
        ),
        (
            "gauge_cohomologous.json",
            vec![
                "gauge",
                "tests/fixtures/end_arrow.json",
                "tests/fixtures/dual_numbers.json",
                element,
                "[]",
            ],
        ),
        (
            "nerve_path_contracting.json",
            vec![
                "nerve",
                "tests/fixtures/end_arrow.json",
                "tests/fixtures/dual_numbers.json",
                "--path",
                element,
                r#"[["eps","a","1"]]"#,
            ],
        ),
        (
            "deform_classify_two_points.json",
            vec!["deform", "tests/fixtures/two_points.json", "--classify"],
        ),
        ("deform_counterexample_2.json", vec!["deform", "--counterexample", "2"]),
        (
            "deform_counterexample_3_text.txt",
            vec!["--format", "text", "deform", "--counterexample", "3"],
        ),
    ];
    for (golden, args) in &scenarios {
        let run = || {
            Command::new(bin)
                .args(args)
                .current_dir(manifest)
                .output()
                .expect("the binary runs")
        };
        let first = run();
        let second = run();
        assert!(first.status.success(), "{golden}: the command succeeds");
        assert_eq!(
            first.stdout, second.stdout,
            "{golden}: two runs must be byte-identical"
        );
        let pinned = std::fs::read(Path::new(manifest).join("tests/golden").join(golden))
            .expect("golden file exists");
        assert_eq!(first.stdout, pinned, "{golden}: report matches the pinned bytes");
    }
    pass(10, "reports are byte-stable across runs and match their golden files");
}
