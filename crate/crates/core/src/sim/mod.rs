//! Deterministic fixed-step simulation of the warehouse: drone and AGV
//! kinematics, payload grasp/release, route autopilot and zone queries.

mod geometry;
mod scene;
mod world;

pub use geometry::{angle_diff, wrap_angle, Pose, Vec3};
pub use scene::{
    AgvRouteDef, AgvSpec, BoxSpec, DroneLiftDef, DroneSpec, RouteSpec, Scene, SceneError, TaskDefs,
    ZoneSpec,
};
pub use world::{
    nearest_quarter_turn, step, AgvBody, BoxId, BoxItem, DroneBody, RobotId, Route, RouteId,
    SimError, WorldConfig, WorldState, Zone, ZoneId, ZoneKind, WAYPOINT_EPS,
};
