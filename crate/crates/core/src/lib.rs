//! Domain-of-attraction estimation for asymptotically stable fixed points of
//! polynomial difference systems `x ↦ f(x)`.
//!
//! The Lyapunov function solving `V(f(x)) − V(x) = −‖x‖²`, `V(0) = 0` is
//! analytic exactly on the domain of attraction of the origin. Its Taylor
//! series truncated at degree `p` (the *embryo*) is computed in
//! [`lyapunov`], turned into a region estimate by a root test on its top
//! homogeneous layer in [`region`], and re-expanded around points near the
//! boundary of that estimate in [`continuation`]. [`oracle`] classifies
//! orbits directly and serves as ground truth.
//!
//! The crate is `no_std` (with `alloc`). File formats, rendering, and the
//! command-line front end live in the companion `daest` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod continuation;
mod dense;
pub mod error;
pub mod examples;
pub mod ext;
pub mod linalg;
pub mod lyapunov;
pub mod monomial;
pub mod oracle;
pub mod polymap;
pub mod region;
pub mod series;

pub use continuation::{
    extend_step, run_auto, run_from, select_centers, ContinuationParams, ContinuationReport, ReexpandMethod,
    StepRecord, StopReason,
};
pub use error::{Error, Result};
pub use ext::ExtFloat;
pub use linalg::Matrix;
pub use lyapunov::{check_hypotheses, residual, solve_embryo, EmbryoMethod};
pub use oracle::{OrbitParams, Verdict, VerdictKind};
pub use polymap::{Poly, PolyMap, Term};
pub use region::{BasinRaster, Grid, Label, LayerRule, RegionEstimate};
pub use series::TruncatedSeries;
