//! Reference computations for tests. Nothing here shares code with the
//! `rakegame` implementation it checks.

pub mod dense;
pub mod quadrature;
