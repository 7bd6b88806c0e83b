//! Comparative probability orders on a finite set of atoms.
//!
//! An order ranks every subset of `{1, …, n}` subject to de Finetti's
//! axiom. This crate builds such orders from utility vectors, translates them
//! into discrete cones, enumerates their flippable pairs and flips, decides
//! representability exactly, and computes the bounds on the number of
//! flippable pairs of a representable order.

pub mod bounds;
pub mod cone;
pub mod enumerate;
pub mod error;
pub mod flips;
pub mod lp;
pub mod order;
pub mod precise;
pub mod represent;
pub mod subset;
pub mod utility;

pub use cone::{
    characteristic_vector, cone_from_order, irreducible_elements, DiscreteCone, TernaryVector,
};
pub use error::{Error, Result};
pub use flips::{critical_pairs, flip, flippable_pairs, neighbors, CriticalPair, FlippablePair};
pub use order::{order_from_utilities, validate_order, ComparativeOrder, Validation};
pub use represent::{
    check_trading_transform, find_trading_transform, friendly, is_representable, Certificate,
    TradingTransform,
};
pub use subset::Subset;
pub use utility::{insert_utility, lexicographic_utilities, maclagan_utilities, UtilityVector};
