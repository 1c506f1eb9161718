//! Input documents: a JSON schema describing dg Lie algebras, chain
//! complexes and artinian coefficient algebras over ℚ, with rational
//! scalars written as strings (`"1"`, `"-1/2"`) so no precision is lost.
//!
//! The document kind is inferred from its sections: an `algebra` section
//! makes it an artinian coefficient algebra, a `bracket` section (even an
//! empty one) makes it a dg Lie algebra, and a document with neither is a
//! chain complex. Exactly one reading is ever possible because `algebra`
//! and `bracket` exclude each other.

use std::collections::BTreeMap;
use std::path::Path;

use mcdeform::dgla::SparseVec;
use mcdeform::graded::{ChainComplex, GradedVectorSpace};
use mcdeform::linalg::Matrix;
use mcdeform::{QArtinian, QComplex, QDgla, Rat};
use num_traits::Zero;
use serde::Deserialize;

/// Schema tag every document and report carries.
pub const SCHEMA: &str = "mcdeform/1";

/// A problem with a document. `Parse` covers unreadable, syntactically
/// invalid or internally inconsistent files; `Axiom` covers well-formed
/// documents whose content violates a structural axiom that must hold
/// before the object can even be assembled (currently: differential
/// entries in the wrong degree of a chain complex).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DocIssue {
    Parse(String),
    Axiom { axiom: String, witness: String },
}

/// One basis generator.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

/// The `algebra` section of artinian documents.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSection {
    pub unit: String,
    pub m_basis: Vec<String>,
    /// Products as `"a,b"` keys; omitted pairs multiply to zero. The
    /// engine recovers the transposed pair through graded commutativity.
    #[serde(default)]
    pub products: BTreeMap<String, Vec<(String, String)>>,
}

/// A parsed document. Linear combinations are lists of `[label, coeff]`
/// pairs with rational coefficients as strings.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub schema: String,
    pub field: String,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub differential: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub bracket: Option<BTreeMap<String, Vec<(String, String)>>>,
    #[serde(default)]
    pub algebra: Option<AlgebraSection>,
}

/// The three document kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Dgla,
    Complex,
    Artinian,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Dgla => "dgla",
            Kind::Complex => "complex",
            Kind::Artinian => "artinian",
        }
    }
}

/// Parses `"p/q"` (or `"p"`) into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, DocIssue> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| DocIssue::Parse(format!("invalid rational {s:?}: {e}")))
}

/// Reads and syntax-checks a document; the schema and field tags must
/// match exactly.
pub fn load(path: &Path) -> Result<InputDocument, DocIssue> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DocIssue::Parse(format!("cannot read {}: {e}", path.display())))?;
    let doc: InputDocument = serde_json::from_str(&text)
        .map_err(|e| DocIssue::Parse(format!("{}: {e}", path.display())))?;
    if doc.schema != SCHEMA {
        return Err(DocIssue::Parse(format!(
            "{}: unsupported schema {:?}, expected {SCHEMA:?}",
            path.display(),
            doc.schema
        )));
    }
    if doc.field != "Q" {
        return Err(DocIssue::Parse(format!(
            "{}: unsupported field {:?}, only \"Q\" is available",
            path.display(),
            doc.field
        )));
    }
    if doc.bracket.is_some() && doc.algebra.is_some() {
        return Err(DocIssue::Parse(format!(
            "{}: a document cannot carry both a bracket and an algebra section",
            path.display()
        )));
    }
    Ok(doc)
}

impl InputDocument {
    pub fn kind(&self) -> Kind {
        if self.algebra.is_some() {
            Kind::Artinian
        } else if self.bracket.is_some() {
            Kind::Dgla
        } else {
            Kind::Complex
        }
    }

    fn index_map(&self) -> Result<BTreeMap<&str, usize>, DocIssue> {
        let mut map = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            if map.insert(g.name.as_str(), i).is_some() {
                return Err(DocIssue::Parse(format!(
                    "duplicate generator {:?}",
                    g.name
                )));
            }
        }
        Ok(map)
    }

    /// The document's differential as a full square matrix over the
    /// generator basis (column `a` holds the coordinates of the image of
    /// generator `a`).
    fn differential_matrix(
        &self,
        index: &BTreeMap<&str, usize>,
    ) -> Result<Matrix<Rat>, DocIssue> {
        let dim = self.generators.len();
        let mut diff: Matrix<Rat> = Matrix::zeros(dim, dim);
        for (src, combo) in &self.differential {
            let col = *index.get(src.as_str()).ok_or_else(|| {
                DocIssue::Parse(format!("differential of undeclared generator {src:?}"))
            })?;
            for (target, coeff) in combo {
                let row = *index.get(target.as_str()).ok_or_else(|| {
                    DocIssue::Parse(format!(
                        "differential of {src:?} references undeclared generator {target:?}"
                    ))
                })?;
                diff[(row, col)] = diff[(row, col)].clone() + parse_rat(coeff)?;
            }
        }
        Ok(diff)
    }

    /// A `"x,y"`-keyed table of combinations to an index-pair table.
    fn pair_table(
        &self,
        section: &BTreeMap<String, Vec<(String, String)>>,
        what: &str,
        index: &BTreeMap<&str, usize>,
    ) -> Result<BTreeMap<(usize, usize), SparseVec<Rat>>, DocIssue> {
        let mut table = BTreeMap::new();
        for (key, combo) in section {
            let (left, right) = key.split_once(',').ok_or_else(|| {
                DocIssue::Parse(format!(
                    "{what} key {key:?} must name a pair \"x,y\""
                ))
            })?;
            let lookup = |label: &str| {
                index.get(label.trim()).copied().ok_or_else(|| {
                    DocIssue::Parse(format!(
                        "{what} key {key:?} references undeclared generator {label:?}"
                    ))
                })
            };
            let (a, b) = (lookup(left)?, lookup(right)?);
            let mut entry: SparseVec<Rat> = Vec::new();
            for (target, coeff) in combo {
                let t = *index.get(target.as_str()).ok_or_else(|| {
                    DocIssue::Parse(format!(
                        "{what} of {key:?} references undeclared generator {target:?}"
                    ))
                })?;
                entry.push((t, parse_rat(coeff)?));
            }
            if table.insert((a, b), entry).is_some() {
                return Err(DocIssue::Parse(format!(
                    "{what} pair {key:?} appears twice"
                )));
            }
        }
        Ok(table)
    }

    pub fn to_dgla(&self) -> Result<QDgla, DocIssue> {
        let bracket = self.bracket.as_ref().ok_or_else(|| {
            DocIssue::Parse("document has no bracket section, not a dgla".into())
        })?;
        let index = self.index_map()?;
        let labels = self.generators.iter().map(|g| g.name.clone()).collect();
        let degrees = self.generators.iter().map(|g| g.degree).collect();
        let diff = self.differential_matrix(&index)?;
        let brackets = self.pair_table(bracket, "bracket", &index)?;
        QDgla::new(labels, degrees, diff, brackets)
            .map_err(|e| DocIssue::Parse(e.to_string()))
    }

    pub fn to_complex(&self) -> Result<QComplex, DocIssue> {
        if self.bracket.is_some() || self.algebra.is_some() {
            return Err(DocIssue::Parse(
                "document is not a plain chain complex".into(),
            ));
        }
        let index = self.index_map()?;
        let mut components: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        let mut place = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let bucket = components.entry(g.degree).or_default();
            place.push((g.degree, bucket.len()));
            bucket.push(g.name.clone());
        }
        let space = GradedVectorSpace::new(components)
            .map_err(|e| DocIssue::Parse(e.to_string()))?;

        let mut blocks: BTreeMap<i64, Matrix<Rat>> = space
            .degrees()
            .map(|i| (i, Matrix::zeros(space.dim(i + 1), space.dim(i))))
            .collect();
        for (src, combo) in &self.differential {
            let s = *index.get(src.as_str()).ok_or_else(|| {
                DocIssue::Parse(format!("differential of undeclared generator {src:?}"))
            })?;
            let (si, sc) = place[s];
            for (target, coeff) in combo {
                let t = *index.get(target.as_str()).ok_or_else(|| {
                    DocIssue::Parse(format!(
                        "differential of {src:?} references undeclared generator {target:?}"
                    ))
                })?;
                let (ti, tr) = place[t];
                let c = parse_rat(coeff)?;
                if c.is_zero() {
                    continue;
                }
                if ti != si + 1 {
                    return Err(DocIssue::Axiom {
                        axiom: "degree".into(),
                        witness: format!(
                            "d({src}) has a component on {target} of degree {ti}, \
                             expected degree {}",
                            si + 1
                        ),
                    });
                }
                let block = blocks.get_mut(&si).expect("populated degree");
                block[(tr, sc)] = block[(tr, sc)].clone() + c;
            }
        }
        ChainComplex::new(space, blocks).map_err(|e| DocIssue::Parse(e.to_string()))
    }

    pub fn to_artinian(&self) -> Result<QArtinian, DocIssue> {
        let algebra = self.algebra.as_ref().ok_or_else(|| {
            DocIssue::Parse("document has no algebra section, not an artinian algebra".into())
        })?;
        let index = self.index_map()?;
        let labels: Vec<String> = self.generators.iter().map(|g| g.name.clone()).collect();
        let degrees = self.generators.iter().map(|g| g.degree).collect();
        let diff = self.differential_matrix(&index)?;
        let mul = self.pair_table(&algebra.products, "product", &index)?;
        let m_labels: Vec<&str> = algebra.m_basis.iter().map(String::as_str).collect();
        QArtinian::new(labels, degrees, mul, diff, &algebra.unit, &m_labels)
            .map_err(|e| DocIssue::Parse(e.to_string()))
    }
}
