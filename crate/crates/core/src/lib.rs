//! Track, queue and 3D grid layouts for plane graphs.

pub mod drawing3d;
pub mod fans;
pub mod generate;
pub mod ladder;
pub mod layering;
pub mod pipeline;
pub mod placement;
pub mod plane_graph;
pub mod registry;
pub mod skeleton;
pub mod verify;
