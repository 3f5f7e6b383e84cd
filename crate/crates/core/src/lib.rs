//! Score-only string recovery: score functions, a metered oracle, adaptive
//! attacks that reconstruct a hidden sequence, a hardness-reduction instance
//! generator, and a corpus simulation harness.

pub mod alphabet;
pub mod attack;
pub mod error;
pub mod events;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod satisfiability;
pub mod scoring;

pub use alphabet::{Alphabet, Color, Sequence};
pub use attack::AttackResult;
pub use error::{Error, Result};
pub use events::EventList;
pub use model::VariationModel;
pub use oracle::{Oracle, QueryMode, QueryTranscript};
pub use scoring::Score;
