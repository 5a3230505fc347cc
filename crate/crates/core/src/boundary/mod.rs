//! Boundary conditions as partitions of the boundary, and the operations on
//! them: refinement order, join, distance, bridges, modifications and
//! typicality.

mod bridges;
mod induced;
mod modify;
mod partition;
mod typical;

pub use bridges::{bridges_over, classify_bridges, classify_lengths, Bridge, BridgeOrdering, BridgeSet, BridgeTarget, SideView};
pub use induced::{induced_boundary, to_global};
pub use modify::{cross_side_classes, modify_bridges, modify_segment, modify_sides};
pub use partition::BoundaryCondition;
pub use typical::{is_typical, max_bridges_on_side, TypicalityReport};
