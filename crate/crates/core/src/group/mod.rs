//! Bundle automorphisms of `Tᵖ × C`, words in generators, relations,
//! lifts to `ℝᵖ × C` and fixed points on fibres.

pub mod automorphism;
pub mod fixed;
pub mod ratio;
pub mod relations;
pub mod section;
pub mod spec;
pub mod word;

pub use automorphism::{BaseAction, BaseFactor, BaseManifold, BundleAutomorphism, FactorKind, KVec, NumericAutomorphism};
pub use fixed::{affine_fixed_point_analysis, fiber_fixed_point_free, fixed_point_in_box, AffineFixedPoints, FiberFixedPoints};
pub use ratio::{rho, split_extension, SplitExtension};
pub use relations::{conjugate_translation, splitting_obstruction, verify_relation, RelationReport, SplitResult, SplitSystem};
pub use section::{conjugate_by_section, conjugated_commutator_f64, constant_translation_obstruction, Conjugation, TranslationObstruction};
pub use spec::{evaluate_word, ElemJson, GroupSpec, GroupSpecJson, Relation};
pub use word::{Letter, Word};
