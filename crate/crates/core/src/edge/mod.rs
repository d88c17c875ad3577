//! Edge constraints, exact elimination and vertex conditions.

pub mod assemble;
pub mod catalog;
pub mod eliminate;
pub mod rational;
pub mod vertex;

pub use assemble::{assemble_edge_constraints, EdgeRow, EdgeSystem, RowKind};
pub use catalog::{DataSymbol, SymbolCatalog, Unknown, UnknownCatalog};
pub use eliminate::{eliminate, feasibility_check, Feasibility, Parametrization};
pub use vertex::{assemble_vertex_conditions, boundary_matrices, EssentialBC, VertexRow};
