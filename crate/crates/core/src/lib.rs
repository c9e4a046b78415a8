//! Exact-arithmetic kernel for Lubin-Tate formal groups and truncated
//! models of the associated rings of p-adic periods.
//!
//! The crate is organised around one invariant: every value carries its
//! own absolute precision (in `pi_F`-units) and every operation propagates
//! the worst case, so identities can be asserted digit-exactly instead of
//! approximately. The layers are:
//!
//! * [`padic`] — the base field `F/Q_p` (unramified or Eisenstein) with
//!   tracked-precision arithmetic in `O_F` and `F`;
//! * [`series`] — truncated one-variable Laurent series over `F`;
//! * [`lubin_tate`] — the formal group `[pi_F](T) = T^q + pi_F T`, its
//!   endomorphisms `[a](T)`, logarithm/exponential, the torsion
//!   polynomials `Q_k` and evaluation at torsion points;
//! * [`mpoly`] — truncated multivariate series (total-degree cap);
//! * [`period`] — the one-variable period-ring model: Gauss valuations
//!   `V(., r)`, the operators `phi_q`, `psi_q`, the `Gamma`-action,
//!   `t_F`, derivations, orbit Taylor expansions and Mahler weights;
//! * [`multivar`] — the multivariable locally analytic model with twisted
//!   actions, directional derivations and the Taylor decomposition;
//! * [`monodromy`] — integrable connections and the explicit
//!   fundamental-solution series `H`;
//! * [`wire`] — JSON-facing record types (exact round-trip).

pub mod error;
pub mod lubin_tate;
pub mod monodromy;
pub mod mpoly;
pub mod multivar;
pub mod padic;
pub mod period;
pub mod sampling;
pub mod series;
pub mod wire;

pub use error::{Error, Result};
pub use padic::{BaseFieldSpec, FElement, FieldSpec, Flavor, OFElement, Valuation};
pub use series::TruncSeries;
