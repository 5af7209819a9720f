//! Decision procedures for generalized Baumslag-Solitar groups: word
//! problem, Britton reduction, conjugacy, and the commutative monoid
//! reductions behind elliptic conjugacy.

pub mod arith;
pub mod gog;
pub mod freegrp;
pub mod britton;
pub mod gen;
pub mod commonoid;
pub mod conjugacy;
