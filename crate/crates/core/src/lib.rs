#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod construction;
pub mod diagonal;
pub mod game;
pub mod ideals;
pub mod omega;
pub mod ramsey;
pub mod rational;
pub mod trees;

pub use omega::{DescribedSet, FiniteString, SizeClass};
pub use rational::Rational;
