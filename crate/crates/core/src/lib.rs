//! Topped partial commutative monoids, separating relations and partial
//! morphisms over finite carriers, with exhaustive law checkers, sub-PCM
//! quotients and a bounded explorer for a ticket-lock resource.

pub mod element;
pub mod error;
pub mod instances;
pub mod morphism;
pub mod pcm;
pub mod report;
pub mod seprel;
pub mod subpcm;
mod sweep;
pub mod ticketlock;

pub use element::{Element, HistOp, Label, Ownership, Value};
pub use error::{PcmError, Result};
pub use instances::*;
pub use morphism::*;
pub use pcm::{check_pcm_laws, is_separate, join, product, star_split, Pcm, PcmStructure, SubjState};
pub use report::{LawCheck, LawReport, Status, TraceEntry};
pub use seprel::*;
pub use subpcm::*;
pub use ticketlock::*;
