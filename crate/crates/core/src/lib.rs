#![allow(clippy::should_implement_trait)]

pub mod cover;
pub mod definability;
pub mod elim;
pub mod ground;
pub mod linear;
pub mod locality;
pub mod pipeline;
pub mod qe;
pub mod syntax;
