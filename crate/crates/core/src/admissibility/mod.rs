//! Linear hypotheses on the linear parts: semi-simplicity, blocks, modulus
//! classes, the flat subspace, density and similarity.

pub mod classes;
pub mod report;
pub mod semisimple;
pub mod similarity;
pub mod splitting;

pub use classes::{flat_subspace, modulus_classes, FlatOptions, FlatSubspace, ModulusClass};
pub use report::{check_admissible, AdmissibilityReport, HypothesisCheck};
pub use semisimple::{block_decompose, is_semisimple, BlockDecomposition, SemisimpleWitness};
pub use similarity::{similarity_certificate, similarity_ratio, Ratio, RatioJson, SimilarityCertificate};
pub use splitting::{commutant_check, density_check, positive_definite, rational_hull, DensityReport, KMatrix, Splitting};
