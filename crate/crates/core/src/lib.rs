//! Distributed supervisory control of timed discrete-event systems whose
//! supervisors exchange event reports over lossy FIFO channels with bounded
//! delays.

pub mod automaton;
pub mod channel;
pub mod comm;
pub mod dot;
pub mod dfa;
pub mod error;
pub mod event;
pub mod generate;
pub mod model;
pub mod network;
pub mod oracle;
pub mod report;
pub mod simulate;
pub mod synthesis;
pub mod verify;

pub use automaton::{parallel_compose, validate_timed_assumptions, TimedAutomaton, TimingViolation};
pub use channel::{ChannelConfig, ChannelEntry, ChannelState};
pub use comm::{build_comm_automaton, BuildOptions, CommAutomaton, CommEvent, CommState};
pub use error::{Error, Result};
pub use event::EventId;
pub use model::{Model, ModelDoc};
pub use network::{ChannelSpec, NetworkConfig, Supervisor};
pub use synthesis::{solve_dnnscp, SolveOptions, SolveReport, SupervisorMap};
pub use verify::{Condition, Verdict, Witness};
