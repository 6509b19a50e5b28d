pub mod eval;
pub mod mbr;
pub mod parseval;
pub mod perturb;
pub mod project;
pub mod segeval;
pub mod validate;
