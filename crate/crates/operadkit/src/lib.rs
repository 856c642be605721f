//! Cell complexes of decorated planar trees: the simplex, cube and
//! associahedron models of the associative operad and its bimodules, their
//! tilde variants with metric corks, and the Wb- and B-constructions.

pub mod rational;
pub mod tree_core;
pub mod complexes;
pub mod classic_models;
pub mod wb_construction;
pub mod b_construction;
pub mod tilde_models;
pub mod towers;
pub mod cli;
