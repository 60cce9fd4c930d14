pub mod bench;
pub mod certificates;
pub mod cli;
pub mod linalg;
pub mod lp;
pub mod models;
pub mod rip;
