//! Number fields `ℚ[x]/(P)` with certified embeddings.

pub mod element;
pub mod formal;
pub mod interval;
pub mod modulus;
pub mod roots;

pub use element::{kernel_over_k, nf_embed, rational_coordinates, Enclosure, NFElement, NFVector, NumberField, NumberFieldJson};
pub use formal::{formal_rank, FormalVector};
pub use interval::{pi_interval, CBox, Interval};
pub use modulus::{compare_moduli, squared_modulus_poly, AlgebraicRoot};
pub use roots::{root_isolation, RootBox, RootBoxJson};
