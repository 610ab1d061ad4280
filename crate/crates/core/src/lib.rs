//! Graphs of abelian groups: exact word reduction in the fundamental groupoid,
//! the Bass-Serre tree and its boundary, decision procedures for the boundary
//! action, classification reports and finite checks of the G-family relations.

pub mod abelian;
pub mod bstree;
pub mod classify;
pub mod dynamics;
pub mod gfamily;
pub mod gog;
pub mod par;
pub mod render;
pub mod words;

pub use abelian::{AbElement, AbHom, AbelianError, FgAbelianGroup, Index};
pub use gog::{GogError, GraphOfGroups, RaySpec, SpanningTree};
