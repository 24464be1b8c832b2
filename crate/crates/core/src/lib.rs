//! PID synthesis: a per-sample PID loop chases a breakpoint-defined setpoint
//! curve (the "artist"), and its clamped output is the audio signal.
//!
//! The pipeline renders at an oversampled rate, low-passes with a
//! Kaiser-windowed sinc FIR and decimates back to the playback rate. Voices can
//! be mixed additively, parameters automated with envelopes or LFO voices, and
//! results analyzed spectrally.

pub mod analysis;
pub mod artist;
pub mod engine;
mod error;
pub mod io;
pub mod pid;
pub mod presets;
pub mod resample;

pub use artist::{ArtistSpec, Breakpoint, BreakpointSet, PhaseAccumulator, Skeleton};
pub use engine::{render_patch, Patch, RenderResult, Voice};
pub use error::{PidsError, Result};
pub use pid::{PidConfig, PidGains, PidState};
pub use resample::OversampleFactor;
