//! Reference estimators and the stochastic Cramér–Rao bound.

mod crb;
mod esprit;
mod root_music;

pub use crb::{stochastic_crb, CrbResult};
pub use esprit::{selection_matrices, unitary_esprit};
pub use root_music::{root_music, root_music_polynomial};
