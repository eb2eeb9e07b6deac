//! Exact local cohomology and wall-crossing checks for torus-weighted graded rings.

pub mod analyzer;
pub mod cech;
pub mod corpus;
pub mod crosscheck;
pub mod engine;
pub mod field;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod ring;
pub mod table;
pub mod toric;
pub mod window;
