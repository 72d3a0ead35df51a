pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod conditions;
pub mod degeneration;
pub mod dsl;
pub mod families;
pub mod linalg;
pub mod scalars;
