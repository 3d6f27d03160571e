//! Crossed groups over three finite sites: the simplex category `Delta`, its
//! augmented version restricted to nonempty ordinals, and the interval category.
//!
//! Levels are truncated at a maximum level and every structure is stored as
//! integer-indexed tables, so axioms and universal properties can be checked
//! by enumeration.

pub mod base_change;
pub mod classification;
pub mod crossed;
pub mod families;
pub mod free_product;
pub mod group;
pub mod monoidal;
pub mod presheaf;
pub mod signed;
pub mod site;
pub mod verify;

pub use crossed::{CrossedError, CrossedGroup, CrossedMap, Family};
pub use signed::{CrossedElement, SignedPerm};
pub use site::{Point, SiteError, SiteId, SiteMorphism, Truncation};
pub use verify::{verify_crossed_axioms, CheckMode, VerifyOptions, VerifyReport};
