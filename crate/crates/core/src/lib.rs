//! Algebraic K-theory of pointed monoids, computed at desk scale.
//!
//! A pointed monoid `A` is a finite monoid with an absorbing zero. The crate
//! provides the groups `GLₙ(A)` of invertible row-monomic matrices, the
//! category of finite `A`-sets, a rank-bounded Q-construction, closed-form
//! K-group calculators for group monoids, and the groups `M(ℤ/d)` with exact
//! normal forms.

pub mod abgroup;
pub mod aset;
pub mod guard;
pub mod ktheory;
pub mod matrix;
pub mod monoid;
pub mod perm;
pub mod qcat;
pub mod steinberg;

pub use abgroup::{FgAbelianGroup, IntegerMatrix};
pub use guard::SizeGuard;
pub use monoid::{FiniteGroup, PointedMonoid};
pub use perm::Permutation;
