pub mod algebra;
pub mod forms;
pub mod operators;
pub mod pairing;
pub mod repn;
pub mod report;
pub mod rumin;
pub mod scalar;
pub mod suite;
pub mod transfer;
