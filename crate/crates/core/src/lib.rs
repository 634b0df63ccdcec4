pub mod models;
pub mod operators;
pub mod quadrature;
pub mod random;
pub mod scenario;
pub mod states;
pub mod superselection;
