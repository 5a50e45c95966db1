//! Exact computational algebra for the partial inner automorphism group
//! `I_n ≤ Aut(F_n)`: normal-form arithmetic, word and conjugacy procedures,
//! the graded Lie algebra `gr(I_n)` with lattice certificates, and bounded
//! degree checks of its Johnson images.

pub mod ajohnson;
pub mod conj;
pub mod decomp;
pub mod endos;
pub mod error;
pub mod igroup;
pub mod lattice;
pub mod lie;
pub mod magnus;
pub mod parse;
pub mod rng;
pub mod verify;
pub mod words;

pub use endos::EndoF;
pub use error::Error;
pub use igroup::IElem;
pub use magnus::{Depth, Mono, NcPoly};
pub use words::FreeWord;
