//! The sets of the feasibility problem and their projections.
//!
//! * the observation set `{Z : Z_Ω = M_Ω}` ([`ObservedData`],
//!   [`project_affine_mask`]);
//! * the rank level set `{Z : rank Z ≤ r}`, projected exactly
//!   ([`project_rank_exact`]), with the standard Ritz stopping rule
//!   ([`project_rank_ritz`]) or inexactly under a certificate
//!   ([`inexact_project_rank`]);
//! * unions of closed intervals on the real line ([`IntervalUnion`]).

mod interval;
mod observed;
mod rank;

pub use interval::{project_interval_union, IntervalUnion};
pub use observed::{project_affine_mask, ObservedData};
pub use rank::{
    inexact_project_rank, kappa, project_rank_exact, project_rank_ritz, InexactCertificate, InexactOptions,
    RitzProjection,
};
