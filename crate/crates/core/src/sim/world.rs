use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::{angle_diff, wrap_angle, Pose, Vec3};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

string_id!(
    /// Identifier shared by drones and AGVs.
    RobotId
);
string_id!(BoxId);
string_id!(ZoneId);
string_id!(RouteId);

/// Distance under which an autopilot considers a waypoint or target reached.
pub const WAYPOINT_EPS: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("unknown robot `{0}`")]
    UnknownRobot(RobotId),
    #[error("unknown route `{0}`")]
    UnknownRoute(RouteId),
    #[error("drone `{0}` is flying autonomously")]
    AutonomousFlightActive(RobotId),
    #[error("AGV `{0}` is following a route")]
    RouteActive(RobotId),
    #[error("no free box within grasp radius")]
    NoBoxInRange,
    #[error("drone already carries a box")]
    AlreadyCarrying,
    #[error("drone is not over a takeoff pad")]
    NotOverTakeoffPad,
    #[error("drone does not carry a box")]
    NotCarrying,
    #[error("no vision system on board")]
    VisionUnavailable,
    #[error("AGV is {distance:.3} m from the route start")]
    NotAtRouteStart { distance: f64 },
    #[error("scene has no {0:?} zone")]
    NoZone(ZoneKind),
    #[error("invalid command: {0}")]
    InvalidCommand(String),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
}

/// Tunables of the simulation. Every field has a default so scene files only
/// need to list overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    /// Integration step in seconds.
    pub dt: f64,
    pub grasp_radius: f64,
    pub arrival_radius: f64,
    pub v_max_drone: f64,
    pub v_max_agv: f64,
    /// Maximum yaw rate for both robot kinds, rad/s.
    pub omega_max: f64,
    /// Heading error above which the AGV autopilot turns in place.
    pub heading_tolerance: f64,
    pub vision_available: bool,
    pub grasp_requires_takeoff_pad: bool,
    /// When set, a successful grasp hands the flight to the autopilot, which
    /// carries the box to the nearest landing pad.
    pub autonomous_picking: bool,
    pub box_half_height: f64,
    /// Vertical distance from the drone origin down to its gripper.
    pub grasp_offset: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            dt: 0.02,
            grasp_radius: 0.3,
            arrival_radius: 0.5,
            v_max_drone: 2.0,
            v_max_agv: 1.0,
            omega_max: FRAC_PI_2,
            heading_tolerance: 0.05,
            vision_available: true,
            grasp_requires_takeoff_pad: true,
            autonomous_picking: false,
            box_half_height: 0.15,
            grasp_offset: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroneBody {
    pub id: RobotId,
    pub pose: Pose,
    pub commanded_velocity: Vec3,
    pub commanded_yaw_rate: f64,
    pub carried: Option<BoxId>,
    pub autonomous_flight: bool,
    pub autopilot_target: Option<Vec3>,
    /// Pending rate-limited slew (Rotate 90° / Align).
    pub yaw_target: Option<f64>,
}

impl DroneBody {
    pub fn new(id: RobotId, pose: Pose) -> Self {
        Self {
            id,
            pose,
            commanded_velocity: Vec3::ZERO,
            commanded_yaw_rate: 0.0,
            carried: None,
            autonomous_flight: false,
            autopilot_target: None,
            yaw_target: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgvBody {
    pub id: RobotId,
    pub pose: Pose,
    /// Signed speed along the heading, m/s.
    pub forward_speed: f64,
    pub yaw_rate: f64,
    pub active_route: Option<RouteId>,
    /// Index of the waypoint currently targeted on the active route.
    pub route_progress: usize,
    pub fork_raised: bool,
    /// Point-to-point autopilot target (drive to charge).
    pub goto_target: Option<Vec3>,
    /// Most recent route that was successfully assigned.
    pub last_assigned_route: Option<RouteId>,
}

impl AgvBody {
    pub fn new(id: RobotId, pose: Pose) -> Self {
        Self {
            id,
            pose: Pose::new(Vec3::new(pose.position.x, pose.position.y, 0.0), pose.yaw),
            forward_speed: 0.0,
            yaw_rate: 0.0,
            active_route: None,
            route_progress: 0,
            fork_raised: false,
            goto_target: None,
            last_assigned_route: None,
        }
    }

    pub fn on_autopilot(&self) -> bool {
        self.active_route.is_some() || self.goto_target.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxItem {
    pub id: BoxId,
    pub pose: Pose,
    pub carried_by: Option<RobotId>,
    /// Box yaw minus carrier yaw, fixed at grasp time.
    #[serde(default)]
    pub carry_yaw_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneKind {
    TakeoffPad,
    LandingPad,
    RouteEntry,
    WorkTable,
    Charging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub id: ZoneId,
    pub kind: ZoneKind,
    pub center: Vec3,
    pub radius: f64,
    #[serde(default)]
    pub pad_yaw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub id: RouteId,
    pub waypoints: Vec<Vec3>,
}

impl Route {
    pub fn start(&self) -> Vec3 {
        self.waypoints[0]
    }

    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| w[0].planar_distance(w[1]))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub sim_time: f64,
    pub config: WorldConfig,
    pub drones: BTreeMap<RobotId, DroneBody>,
    pub agvs: BTreeMap<RobotId, AgvBody>,
    pub boxes: BTreeMap<BoxId, BoxItem>,
    pub zones: BTreeMap<ZoneId, Zone>,
    pub routes: BTreeMap<RouteId, Route>,
}

/// Pure form of [`WorldState::step`].
pub fn step(world: &WorldState, dt: f64) -> WorldState {
    let mut next = world.clone();
    next.step(dt);
    next
}

impl WorldState {
    pub fn new(config: WorldConfig) -> Self {
        Self {
            sim_time: 0.0,
            config,
            drones: BTreeMap::new(),
            agvs: BTreeMap::new(),
            boxes: BTreeMap::new(),
            zones: BTreeMap::new(),
            routes: BTreeMap::new(),
        }
    }

    pub fn add_drone(&mut self, drone: DroneBody) {
        self.drones.insert(drone.id.clone(), drone);
    }

    pub fn add_agv(&mut self, agv: AgvBody) {
        self.agvs.insert(agv.id.clone(), agv);
    }

    pub fn add_box(&mut self, item: BoxItem) {
        self.boxes.insert(item.id.clone(), item);
    }

    pub fn add_zone(&mut self, zone: Zone) {
        self.zones.insert(zone.id.clone(), zone);
    }

    pub fn add_route(&mut self, route: Route) {
        self.routes.insert(route.id.clone(), route);
    }

    /// Checks the structural invariants a loaded scene must satisfy.
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidScene(m));
        let c = &self.config;
        for (name, v) in [
            ("dt", c.dt),
            ("grasp_radius", c.grasp_radius),
            ("arrival_radius", c.arrival_radius),
            ("v_max_drone", c.v_max_drone),
            ("v_max_agv", c.v_max_agv),
            ("omega_max", c.omega_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        for z in self.zones.values() {
            if !(z.radius > 0.0 && z.radius.is_finite()) || !z.center.is_finite() {
                return bad(format!("zone {} needs a finite positive radius", z.id));
            }
        }
        for r in self.routes.values() {
            if r.waypoints.len() < 2 {
                return bad(format!("route {} needs at least two waypoints", r.id));
            }
            if r.waypoints.iter().any(|w| w.z != 0.0 || !w.is_finite()) {
                return bad(format!("route {} waypoints must lie on the floor", r.id));
            }
            if r.waypoints.windows(2).any(|w| w[0] == w[1]) {
                return bad(format!("route {} repeats a waypoint", r.id));
            }
        }
        for id in self.drones.keys() {
            if self.agvs.contains_key(id) {
                return bad(format!("robot id {id} used twice"));
            }
        }
        for d in self.drones.values() {
            if let Some(b) = &d.carried {
                match self.boxes.get(b) {
                    Some(item) if item.carried_by.as_ref() == Some(&d.id) => {}
                    _ => return bad(format!("drone {} carries unknown box {b}", d.id)),
                }
            }
        }
        for b in self.boxes.values() {
            if let Some(r) = &b.carried_by {
                if self.drones.get(r).and_then(|d| d.carried.as_ref()) != Some(&b.id) {
                    return bad(format!("box {} claims carrier {r}", b.id));
                }
            }
        }
        for a in self.agvs.values() {
            if a.pose.position.z != 0.0 {
                return bad(format!("AGV {} must sit on the floor", a.id));
            }
            if let Some(r) = &a.active_route {
                if !self.routes.contains_key(r) {
                    return bad(format!("AGV {} follows unknown route {r}", a.id));
                }
            }
        }
        Ok(())
    }

    pub fn robot_position(&self, id: &RobotId) -> Option<Vec3> {
        self.drones
            .get(id)
            .map(|d| d.pose.position)
            .or_else(|| self.agvs.get(id).map(|a| a.pose.position))
    }

    pub fn is_drone(&self, id: &RobotId) -> bool {
        self.drones.contains_key(id)
    }

    fn drone_mut(&mut self, id: &RobotId) -> Result<&mut DroneBody, SimError> {
        self.drones
            .get_mut(id)
            .ok_or_else(|| SimError::UnknownRobot(id.clone()))
    }

    fn agv_mut(&mut self, id: &RobotId) -> Result<&mut AgvBody, SimError> {
        self.agvs
            .get_mut(id)
            .ok_or_else(|| SimError::UnknownRobot(id.clone()))
    }

    /// Nearest zone of `kind` whose radius strictly contains the robot's
    /// floor projection. Ties go to the lexicographically smaller id.
    pub fn proximity(&self, robot: &RobotId, kind: ZoneKind) -> Result<Option<ZoneId>, SimError> {
        let pos = self
            .robot_position(robot)
            .ok_or_else(|| SimError::UnknownRobot(robot.clone()))?;
        Ok(self.zone_containing(pos, kind).map(|z| z.id.clone()))
    }

    pub fn zone_containing(&self, pos: Vec3, kind: ZoneKind) -> Option<&Zone> {
        self.zones
            .values()
            .filter(|z| z.kind == kind)
            .map(|z| (z.center.planar_distance(pos), z))
            .filter(|(d, z)| *d < z.radius)
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)))
            .map(|(_, z)| z)
    }

    fn nearest_zone(&self, pos: Vec3, kind: ZoneKind) -> Option<&Zone> {
        self.zones
            .values()
            .filter(|z| z.kind == kind)
            .min_by(|a, b| {
                a.center
                    .planar_distance(pos)
                    .total_cmp(&b.center.planar_distance(pos))
                    .then_with(|| a.id.cmp(&b.id))
            })
    }

    pub fn grasp_point(&self, drone: &DroneBody) -> Vec3 {
        drone.pose.position - Vec3::new(0.0, 0.0, self.config.grasp_offset)
    }

    /// Nearest uncarried box within grasp radius of the drone's gripper.
    pub fn graspable_box(&self, drone: &DroneBody) -> Option<&BoxItem> {
        let gp = self.grasp_point(drone);
        self.boxes
            .values()
            .filter(|b| b.carried_by.is_none())
            .map(|b| (b.pose.position.distance(gp), b))
            .filter(|(d, _)| *d <= self.config.grasp_radius)
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)))
            .map(|(_, b)| b)
    }

    pub fn command_drone(&mut self, id: &RobotId, v: Vec3, yaw_rate: f64) -> Result<(), SimError> {
        if !v.is_finite() || !yaw_rate.is_finite() {
            return Err(SimError::InvalidCommand("non-finite drone velocity".into()));
        }
        let (v_max, w_max) = (self.config.v_max_drone, self.config.omega_max);
        let drone = self.drone_mut(id)?;
        if drone.autonomous_flight {
            return Err(SimError::AutonomousFlightActive(id.clone()));
        }
        drone.commanded_velocity = v.clamp_norm(v_max);
        drone.commanded_yaw_rate = yaw_rate.clamp(-w_max, w_max);
        if yaw_rate != 0.0 {
            drone.yaw_target = None;
        }
        Ok(())
    }

    pub fn command_agv(
        &mut self,
        id: &RobotId,
        forward_speed: f64,
        yaw_rate: f64,
    ) -> Result<(), SimError> {
        if !forward_speed.is_finite() || !yaw_rate.is_finite() {
            return Err(SimError::InvalidCommand("non-finite AGV speed".into()));
        }
        let (v_max, w_max) = (self.config.v_max_agv, self.config.omega_max);
        let agv = self.agv_mut(id)?;
        if agv.on_autopilot() {
            return Err(SimError::RouteActive(id.clone()));
        }
        agv.forward_speed = forward_speed.clamp(-v_max, v_max);
        agv.yaw_rate = yaw_rate.clamp(-w_max, w_max);
        Ok(())
    }

    pub fn grasp(&mut self, id: &RobotId) -> Result<BoxId, SimError> {
        let drone = self
            .drones
            .get(id)
            .ok_or_else(|| SimError::UnknownRobot(id.clone()))?;
        if drone.carried.is_some() {
            return Err(SimError::AlreadyCarrying);
        }
        if self.config.grasp_requires_takeoff_pad
            && self
                .zone_containing(drone.pose.position, ZoneKind::TakeoffPad)
                .is_none()
        {
            return Err(SimError::NotOverTakeoffPad);
        }
        let box_id = self
            .graspable_box(drone)
            .ok_or(SimError::NoBoxInRange)?
            .id
            .clone();
        let drone_pose = drone.pose;
        let attach_at = self.grasp_point(drone);

        let item = self.boxes.get_mut(&box_id).expect("box resolved above");
        item.carried_by = Some(id.clone());
        item.carry_yaw_offset = angle_diff(item.pose.yaw, drone_pose.yaw);
        item.pose.position = attach_at;
        let drone = self.drones.get_mut(id).expect("drone resolved above");
        drone.carried = Some(box_id.clone());

        if self.config.autonomous_picking {
            if let Some(pad) = self.nearest_zone(drone_pose.position, ZoneKind::LandingPad) {
                let target = Vec3::new(pad.center.x, pad.center.y, drone_pose.position.z);
                self.autopilot_fly(id, target)?;
            }
        }
        Ok(box_id)
    }

    pub fn release(&mut self, id: &RobotId) -> Result<BoxId, SimError> {
        let half = self.config.box_half_height;
        let drone = self.drone_mut(id)?;
        let box_id = drone.carried.take().ok_or(SimError::NotCarrying)?;
        let at = drone.pose.position;
        let item = self.boxes.get_mut(&box_id).expect("carried box exists");
        item.carried_by = None;
        item.pose.position = Vec3::new(at.x, at.y, half);
        item.carry_yaw_offset = 0.0;
        Ok(box_id)
    }

    pub fn rotate_quarter(&mut self, id: &RobotId) -> Result<f64, SimError> {
        let drone = self.drone_mut(id)?;
        let base = drone.yaw_target.unwrap_or(drone.pose.yaw);
        let target = wrap_angle(base + FRAC_PI_2);
        drone.yaw_target = Some(target);
        drone.commanded_yaw_rate = 0.0;
        Ok(target)
    }

    /// Slews the drone so the carried box lines up with the landing pad,
    /// choosing the quarter-turn equivalent of the pad yaw nearest to the box.
    pub fn align_to_pad(&mut self, id: &RobotId) -> Result<f64, SimError> {
        let drone = self
            .drones
            .get(id)
            .ok_or_else(|| SimError::UnknownRobot(id.clone()))?;
        let box_id = drone.carried.as_ref().ok_or(SimError::NotCarrying)?;
        if !self.config.vision_available {
            return Err(SimError::VisionUnavailable);
        }
        let pad = self
            .nearest_zone(drone.pose.position, ZoneKind::LandingPad)
            .ok_or(SimError::NoZone(ZoneKind::LandingPad))?;
        let offset = self.boxes[box_id].carry_yaw_offset;
        let box_yaw = wrap_angle(drone.pose.yaw + offset);
        let target_box_yaw = nearest_quarter_turn(box_yaw, pad.pad_yaw);
        let target = wrap_angle(target_box_yaw - offset);
        let drone = self.drone_mut(id)?;
        drone.yaw_target = Some(target);
        drone.commanded_yaw_rate = 0.0;
        Ok(target)
    }

    pub fn assign_route(&mut self, id: &RobotId, route: &RouteId) -> Result<(), SimError> {
        let start = self
            .routes
            .get(route)
            .ok_or_else(|| SimError::UnknownRoute(route.clone()))?
            .start();
        let arrival = self.config.arrival_radius;
        let agv = self.agv_mut(id)?;
        if agv.active_route.is_some() {
            return Err(SimError::RouteActive(id.clone()));
        }
        let distance = agv.pose.position.planar_distance(start);
        if distance > arrival {
            return Err(SimError::NotAtRouteStart { distance });
        }
        agv.active_route = Some(route.clone());
        agv.route_progress = 0;
        agv.goto_target = None;
        agv.forward_speed = 0.0;
        agv.yaw_rate = 0.0;
        agv.last_assigned_route = Some(route.clone());
        Ok(())
    }

    pub fn autopilot_fly(&mut self, id: &RobotId, target: Vec3) -> Result<(), SimError> {
        if !target.is_finite() {
            return Err(SimError::InvalidCommand(
                "non-finite autopilot target".into(),
            ));
        }
        let arrival = self.config.arrival_radius;
        let drone = self.drone_mut(id)?;
        drone.commanded_velocity = Vec3::ZERO;
        if drone.pose.position.distance(target) <= arrival {
            drone.autonomous_flight = false;
            drone.autopilot_target = None;
        } else {
            drone.autonomous_flight = true;
            drone.autopilot_target = Some(target);
        }
        Ok(())
    }

    /// Sends the AGV to the nearest charging zone, preempting any route.
    pub fn go_to_charge(&mut self, id: &RobotId) -> Result<ZoneId, SimError> {
        let pos = self
            .agvs
            .get(id)
            .ok_or_else(|| SimError::UnknownRobot(id.clone()))?
            .pose
            .position;
        let zone = self
            .nearest_zone(pos, ZoneKind::Charging)
            .ok_or(SimError::NoZone(ZoneKind::Charging))?;
        let (zid, center) = (
            zone.id.clone(),
            Vec3::new(zone.center.x, zone.center.y, 0.0),
        );
        let agv = self.agv_mut(id)?;
        agv.active_route = None;
        agv.goto_target = Some(center);
        Ok(zid)
    }

    pub fn set_forks(&mut self, id: &RobotId, raised: bool) -> Result<(), SimError> {
        self.agv_mut(id)?.fork_raised = raised;
        Ok(())
    }

    /// Advances the world by `dt`, split into equal substeps no longer than
    /// the configured integration step.
    pub fn step(&mut self, dt: f64) {
        assert!(
            dt > 0.0 && dt.is_finite(),
            "step needs a positive finite dt, got {dt}"
        );
        let n = ((dt / self.config.dt) - 1e-9).ceil().max(1.0) as u64;
        let h = dt / n as f64;
        for _ in 0..n {
            self.substep(h);
        }
    }

    fn substep(&mut self, h: f64) {
        let cfg = self.config.clone();
        for drone in self.drones.values_mut() {
            integrate_drone(drone, &cfg, h);
        }
        let routes = &self.routes;
        for agv in self.agvs.values_mut() {
            integrate_agv(agv, routes, &cfg, h);
        }
        for item in self.boxes.values_mut() {
            if let Some(carrier) = &item.carried_by {
                let d = &self.drones[carrier];
                item.pose.position = d.pose.position - Vec3::new(0.0, 0.0, cfg.grasp_offset);
                item.pose.yaw = wrap_angle(d.pose.yaw + item.carry_yaw_offset);
            }
        }
        self.sim_time += h;
    }
}

/// Yaw congruent to `reference` modulo π/2 that is closest to `yaw`.
pub fn nearest_quarter_turn(yaw: f64, reference: f64) -> f64 {
    let k = (angle_diff(yaw, reference) / FRAC_PI_2).round();
    wrap_angle(reference + k * FRAC_PI_2)
}

fn integrate_drone(drone: &mut DroneBody, cfg: &WorldConfig, h: f64) {
    if let (true, Some(target)) = (drone.autonomous_flight, drone.autopilot_target) {
        let diff = target - drone.pose.position;
        let dist = diff.norm();
        drone.commanded_velocity = if dist > 0.0 {
            diff * (cfg.v_max_drone.min(dist / h) / dist)
        } else {
            Vec3::ZERO
        };
    }

    match drone.yaw_target {
        Some(target) => {
            let err = angle_diff(target, drone.pose.yaw);
            let max_turn = cfg.omega_max * h;
            if err.abs() <= max_turn {
                drone.pose.yaw = target;
                drone.yaw_target = None;
            } else {
                drone.pose.yaw = wrap_angle(drone.pose.yaw + max_turn.copysign(err));
            }
        }
        None => {
            if drone.commanded_yaw_rate != 0.0 {
                drone.pose.yaw = wrap_angle(drone.pose.yaw + drone.commanded_yaw_rate * h);
            }
        }
    }

    let v = drone.commanded_velocity;
    let p = &mut drone.pose.position;
    p.x += v.x * h;
    p.y += v.y * h;
    p.z = (p.z + v.z * h).max(0.0);

    if let (true, Some(target)) = (drone.autonomous_flight, drone.autopilot_target) {
        if drone.pose.position.distance(target) <= WAYPOINT_EPS {
            drone.autonomous_flight = false;
            drone.autopilot_target = None;
            drone.commanded_velocity = Vec3::ZERO;
        }
    }
}

/// Turn-in-place-then-drive control toward `target`. Returns `true` once the
/// target is reached, leaving the speeds untouched in that case.
fn steer_toward(agv: &mut AgvBody, target: Vec3, cfg: &WorldConfig, h: f64) -> bool {
    let p = agv.pose.position;
    let dist = p.planar_distance(target);
    if dist <= WAYPOINT_EPS {
        return true;
    }
    let heading = (target.y - p.y).atan2(target.x - p.x);
    let err = angle_diff(heading, agv.pose.yaw);
    agv.yaw_rate = (err / h).clamp(-cfg.omega_max, cfg.omega_max);
    agv.forward_speed = if err.abs() > cfg.heading_tolerance {
        0.0
    } else {
        cfg.v_max_agv.min(dist / h)
    };
    false
}

fn integrate_agv(agv: &mut AgvBody, routes: &BTreeMap<RouteId, Route>, cfg: &WorldConfig, h: f64) {
    if let Some(route_id) = agv.active_route.clone() {
        let waypoints = &routes[&route_id].waypoints;
        while agv.route_progress < waypoints.len()
            && steer_toward(agv, waypoints[agv.route_progress], cfg, h)
        {
            agv.route_progress += 1;
        }
        if agv.route_progress >= waypoints.len() {
            agv.active_route = None;
            agv.forward_speed = 0.0;
            agv.yaw_rate = 0.0;
        }
    } else if let Some(target) = agv.goto_target {
        if steer_toward(agv, target, cfg, h) {
            agv.goto_target = None;
            agv.forward_speed = 0.0;
            agv.yaw_rate = 0.0;
        }
    }

    let (v, yaw) = (agv.forward_speed, agv.pose.yaw);
    agv.pose.position.x += v * yaw.cos() * h;
    agv.pose.position.y += v * yaw.sin() * h;
    if agv.yaw_rate != 0.0 {
        agv.pose.yaw = wrap_angle(yaw + agv.yaw_rate * h);
    }

    if agv.active_route.is_none() {
        if let Some(target) = agv.goto_target {
            if agv.pose.position.planar_distance(target) <= WAYPOINT_EPS {
                agv.goto_target = None;
                agv.forward_speed = 0.0;
                agv.yaw_rate = 0.0;
            }
        }
    }
}
