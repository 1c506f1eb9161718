//! Command-line front end for the Maurer–Cartan engine: a JSON document
//! schema for dg Lie algebras, chain complexes and artinian coefficient
//! algebras, byte-stable reports, and the command implementations behind
//! the `mcdeform` binary.

pub mod doc;
pub mod report;
pub mod run;
