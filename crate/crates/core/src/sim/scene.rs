//! Declarative scene files.
//!
//! A scene is a TOML document listing the world configuration, robots, boxes,
//! zones, routes and the two secondary-task definitions. The shipped default
//! lives in `scenes/default.toml`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::geometry::{Pose, Vec3};
use super::world::{
    AgvBody, BoxId, BoxItem, DroneBody, RobotId, Route, RouteId, SimError, WorldConfig, WorldState,
    Zone, ZoneId, ZoneKind,
};

const DEFAULT_SCENE: &str = include_str!("../../scenes/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub name: String,
    #[serde(default)]
    pub config: WorldConfig,
    #[serde(default)]
    pub drones: Vec<DroneSpec>,
    #[serde(default)]
    pub agvs: Vec<AgvSpec>,
    #[serde(default)]
    pub boxes: Vec<BoxSpec>,
    #[serde(default)]
    pub zones: Vec<ZoneSpec>,
    #[serde(default)]
    pub routes: Vec<RouteSpec>,
    pub tasks: TaskDefs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DroneSpec {
    pub id: RobotId,
    pub position: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgvSpec {
    pub id: RobotId,
    pub position: [f64; 2],
    #[serde(default)]
    pub yaw: f64,
    /// Route the AGV is already driving when the scene starts.
    #[serde(default)]
    pub route: Option<RouteId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub id: BoxId,
    pub position: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneSpec {
    pub id: ZoneId,
    pub kind: ZoneKind,
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(default)]
    pub pad_yaw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteSpec {
    pub id: RouteId,
    pub waypoints: Vec<[f64; 2]>,
}

/// The two secondary tasks a session can ask for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDefs {
    pub agv_route: AgvRouteDef,
    pub drone_lift: DroneLiftDef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgvRouteDef {
    pub agv: RobotId,
    pub route: RouteId,
    pub entry_zone: ZoneId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DroneLiftDef {
    #[serde(rename = "box")]
    pub box_id: BoxId,
    pub takeoff: ZoneId,
    pub landing: ZoneId,
}

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("reading scene: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing scene: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Invalid(#[from] SimError),
}

impl Scene {
    /// The warehouse used in the study: two AGVs driving their routes on the
    /// left, a spare route on the right, two work tables in the middle with
    /// the drone's takeoff pad next to them, and a landing pad.
    pub fn default_scene() -> Scene {
        Scene::from_toml_str(DEFAULT_SCENE).expect("bundled scene is valid")
    }

    pub fn from_toml_str(s: &str) -> Result<Scene, SceneError> {
        let scene: Scene = toml::from_str(s)?;
        scene.build_world()?;
        Ok(scene)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
        Scene::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scene serializes")
    }

    /// SHA-256 over the canonical JSON form of the scene.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("scene serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn build_world(&self) -> Result<WorldState, SimError> {
        let mut w = WorldState::new(self.config.clone());
        for z in &self.zones {
            w.add_zone(Zone {
                id: z.id.clone(),
                kind: z.kind,
                center: Vec3::new(z.center[0], z.center[1], 0.0),
                radius: z.radius,
                pad_yaw: z.pad_yaw,
            });
        }
        for r in &self.routes {
            w.add_route(Route {
                id: r.id.clone(),
                waypoints: r
                    .waypoints
                    .iter()
                    .map(|p| Vec3::new(p[0], p[1], 0.0))
                    .collect(),
            });
        }
        for d in &self.drones {
            let [x, y, z] = d.position;
            w.add_drone(DroneBody::new(
                d.id.clone(),
                Pose::new(Vec3::new(x, y, z), d.yaw),
            ));
        }
        for b in &self.boxes {
            let [x, y, z] = b.position;
            w.add_box(BoxItem {
                id: b.id.clone(),
                pose: Pose::new(Vec3::new(x, y, z), b.yaw),
                carried_by: None,
                carry_yaw_offset: 0.0,
            });
        }
        for a in &self.agvs {
            let [x, y] = a.position;
            w.add_agv(AgvBody::new(
                a.id.clone(),
                Pose::new(Vec3::new(x, y, 0.0), a.yaw),
            ));
        }
        w.validate()?;
        for a in &self.agvs {
            if let Some(route) = &a.route {
                w.assign_route(&a.id, route)?;
            }
        }
        self.check_tasks(&w)?;
        Ok(w)
    }

    fn check_tasks(&self, w: &WorldState) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidScene(m.to_owned()));
        let t = &self.tasks;
        if !w.agvs.contains_key(&t.agv_route.agv) {
            return bad("agv_route task names an unknown AGV");
        }
        if !w.routes.contains_key(&t.agv_route.route) {
            return bad("agv_route task names an unknown route");
        }
        if w.zones.get(&t.agv_route.entry_zone).map(|z| z.kind) != Some(ZoneKind::RouteEntry) {
            return bad("agv_route entry_zone must be a route_entry zone");
        }
        if !w.boxes.contains_key(&t.drone_lift.box_id) {
            return bad("drone_lift task names an unknown box");
        }
        if w.zones.get(&t.drone_lift.takeoff).map(|z| z.kind) != Some(ZoneKind::TakeoffPad) {
            return bad("drone_lift takeoff must be a takeoff_pad zone");
        }
        if w.zones.get(&t.drone_lift.landing).map(|z| z.kind) != Some(ZoneKind::LandingPad) {
            return bad("drone_lift landing must be a landing_pad zone");
        }
        if w.drones.is_empty() {
            return bad("drone_lift needs a drone");
        }
        Ok(())
    }
}
