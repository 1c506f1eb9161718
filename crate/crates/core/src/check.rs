//! Structural validation reports shared by the complex, dgla and artinian
//! validators.

use std::fmt;

/// One violated axiom with a human-readable witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    /// Short axiom name, e.g. `antisymmetry`, `d_squared`, `jacobi`.
    pub axiom: &'static str,
    /// Where and how the axiom fails (basis labels, degree, offending value).
    pub witness: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.axiom, self.witness)
    }
}

/// Outcome of a validation pass. Each checker records at most the first
/// violation per axiom, in a fixed check order, so reports are deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn push(&mut self, axiom: &'static str, witness: String) {
        self.failures.push(Failure { axiom, witness });
    }

    /// Records a failure only if this axiom has no recorded failure yet.
    pub fn push_first(&mut self, axiom: &'static str, witness: impl FnOnce() -> String) {
        if !self.failures.iter().any(|f| f.axiom == axiom) {
            self.push(axiom, witness());
        }
    }

    pub fn first(&self) -> Option<&Failure> {
        self.failures.first()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "valid")
        } else {
            for (i, fail) in self.failures.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{}: {}", fail.axiom, fail.witness)?;
            }
            Ok(())
        }
    }
}
