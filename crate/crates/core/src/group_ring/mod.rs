//! Finite abelian groups G_M = (Z/M)^* / {+-1}, group rings over localisations
//! of Z, and the graded pieces of the augmentation filtration.

pub mod brute;
mod group;
mod intmat;
mod quotient;
mod ring;

pub use group::{build_group, invariant_factors, shared_group, FiniteAbelianGroup};
pub use intmat::{hnf, quotient as smith_quotient, smith, solve_hnf, ModLattice, Row, SmithQuotient};
pub use quotient::{
    class_in_qr, element_class, graded_quotient, in_power, level_data, obstruction_primes, phi_image, vanishing_order, LevelData,
    QuotientClass, VanishingOrder, DEFAULT_N_MAX,
};
pub use ring::{GroupRingElement, SubringOfQ};
