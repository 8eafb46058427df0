//! Exact conclusive LOCC discrimination of two-qubit orthogonal pure-state
//! ensembles.
//!
//! The crate decides, for sets of two to four pairwise-orthogonal two-qubit
//! pure states, which members can be identified without error (with nonzero
//! probability) by local operations and classical communication, verifies
//! unextendible entangled bases, and ranks ensembles in the resulting
//! nonlocality hierarchy. Every analytic verdict can be cross-checked against
//! an independent brute-force search in [`oracle`].

pub mod cli;
pub mod discrimination;
pub mod ensemble;
pub mod error;
pub mod oracle;
pub mod product_finder;
pub mod qstate;
pub mod random;
pub mod tolerance;
pub mod ueb;
pub mod verify;

pub use discrimination::{
    classify, conclusively_identifiable, perfectly_distinguishable, IdentifiabilityReport,
    NonlocalityClass, NonlocalityLabel, Witness,
};
pub use ensemble::OrthogonalSet;
pub use error::{Error, Result};
pub use product_finder::{orthocomplement, product_states_in_2d, quadratic_roots, Subspace};
pub use qstate::{concurrence, entanglement_profile, make_state, PureState, Qubit, C64};
pub use tolerance::Tolerances;
