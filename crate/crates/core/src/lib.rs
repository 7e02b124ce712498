//! Exact finite-field models for unitary dual pairs and their periods.
//!
//! The crate builds quadratic extensions `E/F` of finite fields, ε-Hermitian spaces and
//! their isometry groups, the Schrödinger model of the Weil representation of
//! `U(V) × P(X)`, and a character-table engine, then checks Jacquet-module, period-transfer
//! and filtration identities by character arithmetic. A separate module evaluates
//! multiplicity formulas over component groups of symbolic L-parameters.

pub mod cache;
pub mod character;
pub mod error;
pub mod field;
pub mod group;
pub mod lparam;
pub mod matrix;
pub mod siegel;
pub mod spaces;
pub mod tolerance;
pub mod verify;
pub mod weil;

pub use character::{CharacterTable, ClassFunction, ConjugacyClasses};
pub use error::{Error, Result};
pub use field::{Elem, ExtensionContext, MultiplicativeCharacter, Phase, SplittingConvention};
pub use group::{GroupOps, MatrixGroup};
pub use matrix::EMat;
pub use siegel::{ParabolicElement, SiegelData};
pub use spaces::{EpsHermitianSpace, Epsilon};
pub use verify::{Check, VerificationReport};
pub use weil::WeilModel;
