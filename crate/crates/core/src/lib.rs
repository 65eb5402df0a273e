//! Synthesis of planner strategies for stochastic games in which an adversary
//! hides its effect on the true state until the planner attempts a reveal.
//!
//! The pipeline: [`model`] describes the game, [`game_core`] gives the
//! hidden-information and delayed-action semantics, [`transform`] checks that
//! the latter simulates the former, [`decomposition`] splits the delayed game
//! into subgames between reveals, and [`synthesis`] solves them and composes
//! the results into a supergame.

pub mod decomposition;
pub mod game_core;
pub mod model;
pub mod synthesis;
pub mod transform;
