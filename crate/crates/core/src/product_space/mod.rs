//! Finite product spaces `Ω^n`, the distance functional `m(A, x)` and
//! exhaustive checks of the exponential integral inequality.

pub mod distance;
pub mod minimize;
pub mod space;
pub mod theorem;

pub use distance::{densities, m_nu, point_mass_distance, CoordinateDensities};
pub use minimize::{minimize_m, minimize_m_with, Minimized};
pub use space::{FiniteProductSpace, MeasureOnSubset, Point, Subset, ENUMERATION_LIMIT};
pub use theorem::{
    verify_theorem1, verify_theorem1_all_subsets, verify_theorem1_with, SweepReport,
    Theorem1Options, Theorem1Report,
};
