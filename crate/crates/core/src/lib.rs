//! Solver suite for multi-robot order picking in smart warehouses.
//!
//! The planning model is a heterogeneous-fleet, multi-depot vehicle routing
//! problem with dispersed vehicles: robots start anywhere on a grid, picking
//! tasks have integer demands, and every loaded leg must end at one of the
//! delivery stations. Routes are open paths that terminate at a station.
//!
//! The crate provides two solvers (the DoNe-CPTA dispatching heuristic and
//! the a-nCAR cluster-first baseline), dataset generation for four instance
//! families, TSPLIB-style file I/O, and an experiment harness with a
//! Mann-Whitney U significance test.

pub mod baseline;
pub mod cost;
pub mod datagen;
pub mod domain;
pub mod experiment;
pub mod io;
pub mod model;
pub mod rng;
pub mod scheduler;
pub mod stats;

pub use model::{
    DeliveryStation, Family, Instance, PickingTask, Point, Robot, RobotId, RouteStep, Solution,
    StationId, TaskId,
};
