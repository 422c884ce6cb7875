//! Wire messages and framing.
//!
//! A frame is the payload length in ASCII decimal, a `\n`, then that many
//! bytes of UTF-8 JSON. Inbound messages carry a client-chosen `id`; every
//! one is answered by an `ack` or `err` echoing it as `corr`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::interaction::{
    AffordanceSet, AvatarColor, ControllerState, DroneOpState, GestureEvent, PanelAction,
};
use crate::metrics::LogEvent;
use crate::orchestrator::{Modality, Notification, Which};
use crate::sim::{AgvBody, BoxItem, DroneBody, Pose, RobotId, RouteId};

pub const PROTOCOL_VERSION: u32 = 1;

/// Default upper bound on a frame payload.
pub const MAX_FRAME: usize = 1 << 20;

/// Longest accepted length header, in digits.
const MAX_HEADER: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inbound {
    pub id: u64,
    pub body: InboundBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InboundBody {
    Hello {
        client: String,
    },
    Gesture {
        event: GestureEvent,
    },
    PanelAction {
        action: PanelAction,
        magnitude: f64,
    },
    JoypadInput {
        robot: RobotId,
        #[serde(default)]
        axes: JoyAxes,
        /// Buttons pressed since the previous input.
        #[serde(default)]
        pressed: Vec<JoyButton>,
    },
    QuestionnaireSubmit {
        form: QuestionnaireForm,
    },
    SessionControl {
        control: SessionControl,
    },
}

impl InboundBody {
    pub fn name(&self) -> &'static str {
        match self {
            InboundBody::Hello { .. } => "hello",
            InboundBody::Gesture { .. } => "gesture",
            InboundBody::PanelAction { .. } => "panel_action",
            InboundBody::JoypadInput { .. } => "joypad_input",
            InboundBody::QuestionnaireSubmit { .. } => "questionnaire_submit",
            InboundBody::SessionControl { .. } => "session_control",
        }
    }
}

/// Stick deflections in [-1, 1]. Left stick: x/y translation (drone) or
/// forward/backward on `left_y` (AGV). Right stick: `right_x` yaw (positive
/// is clockwise), `right_y` altitude.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JoyAxes {
    pub left_x: f64,
    pub left_y: f64,
    pub right_x: f64,
    pub right_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JoyButton {
    A,
    B,
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum QuestionnaireForm {
    /// SUS answers for the session just finished.
    Sus { items: Vec<i64> },
    /// Comparative block, after the second session only.
    Comparative {
        choices: [Modality; 3],
        comments: [Option<String>; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum SessionControl {
    Start {
        subject: String,
        session: Which,
    },
    Abort,
    /// One move of the primary (work table) task.
    PrimaryTaskMove {
        item: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outbound {
    Snapshot {
        sim_time: f64,
        drones: Vec<DroneBody>,
        agvs: Vec<AgvBody>,
        boxes: Vec<BoxItem>,
    },
    AffordanceUpdate {
        controller: ControllerState,
        camera_view: bool,
        hand_near: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        panel: Option<PanelView>,
    },
    NotificationMsg {
        notification: Notification,
    },
    StateColor {
        robot: RobotId,
        state: DroneOpState,
        color: AvatarColor,
    },
    CameraFrame {
        sim_time: f64,
        robot: RobotId,
        objects: Vec<CameraObject>,
    },
    SessionEvent {
        event: LogEvent,
    },
    Ack {
        corr: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hello: Option<HelloInfo>,
    },
    Err {
        /// `None` when the offending message had no readable id.
        corr: Option<u64>,
        reason: String,
    },
}

impl Outbound {
    pub fn name(&self) -> &'static str {
        match self {
            Outbound::Snapshot { .. } => "snapshot",
            Outbound::AffordanceUpdate { .. } => "affordance_update",
            Outbound::NotificationMsg { .. } => "notification_msg",
            Outbound::StateColor { .. } => "state_color",
            Outbound::CameraFrame { .. } => "camera_frame",
            Outbound::SessionEvent { .. } => "session_event",
            Outbound::Ack { .. } => "ack",
            Outbound::Err { .. } => "err",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelView {
    pub robot: RobotId,
    pub affordances: AffordanceSet,
    /// Arrows enabled and the hand near the replica.
    pub arrows_shown: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CameraObjectKind {
    Box,
    Agv,
    Zone,
}

/// An object seen by the drone camera, posed in the drone frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraObject {
    pub id: String,
    pub kind: CameraObjectKind,
    pub relative: Pose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelloInfo {
    pub protocol_version: u32,
    pub scene: SceneSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSummary {
    pub name: String,
    pub config_hash: String,
    pub dt: f64,
    pub drones: Vec<RobotId>,
    pub agvs: Vec<RobotId>,
    pub routes: Vec<RouteId>,
}

pub fn encode_frame<T: Serialize>(msg: &T) -> Vec<u8> {
    let payload = serde_json::to_vec(msg).expect("wire message serializes");
    let mut out = format!("{}\n", payload.len()).into_bytes();
    out.extend_from_slice(&payload);
    out
}

pub fn decode_payload<T: DeserializeOwned>(payload: &[u8]) -> Result<T, String> {
    serde_json::from_slice(payload).map_err(|e| e.to_string())
}

/// Decodes an inbound payload. On failure returns the message id, if one
/// could be read, with the reason.
pub fn decode_inbound(payload: &[u8]) -> Result<Inbound, (Option<u64>, String)> {
    decode_payload(payload).map_err(|reason| {
        let id = serde_json::from_slice::<serde_json::Value>(payload)
            .ok()
            .and_then(|v| v.get("id").and_then(|id| id.as_u64()));
        (id, reason)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameError {
    /// Unparsable length header; the bad line was discarded and the stream
    /// continues.
    BadHeader(String),
    /// Declared length above the limit; the stream cannot be resynchronised.
    TooLarge(usize),
}

/// Incremental frame splitter for a byte stream.
#[derive(Debug)]
pub struct FrameDecoder {
    buf: Vec<u8>,
    max_frame: usize,
    fatal: bool,
}

impl Default for FrameDecoder {
    fn default() -> Self {
        Self::new(MAX_FRAME)
    }
}

impl FrameDecoder {
    pub fn new(max_frame: usize) -> Self {
        Self {
            buf: Vec::new(),
            max_frame,
            fatal: false,
        }
    }

    pub fn push(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    pub fn next_frame(&mut self) -> Option<Result<Vec<u8>, FrameError>> {
        if self.fatal {
            return None;
        }
        let Some(nl) = self
            .buf
            .iter()
            .take(MAX_HEADER + 1)
            .position(|&b| b == b'\n')
        else {
            if self.buf.len() > MAX_HEADER {
                let junk = String::from_utf8_lossy(&self.buf[..MAX_HEADER]).into_owned();
                self.buf.clear();
                return Some(Err(FrameError::BadHeader(junk)));
            }
            return None;
        };
        let header = &self.buf[..nl];
        let len = match std::str::from_utf8(header)
            .ok()
            .filter(|h| !h.is_empty() && h.bytes().all(|b| b.is_ascii_digit()))
        {
            Some(h) => h.parse::<usize>().unwrap_or(usize::MAX),
            None => {
                let junk = String::from_utf8_lossy(header).into_owned();
                self.buf.drain(..=nl);
                return Some(Err(FrameError::BadHeader(junk)));
            }
        };
        if len > self.max_frame {
            self.fatal = true;
            self.buf.clear();
            return Some(Err(FrameError::TooLarge(len)));
        }
        if self.buf.len() < nl + 1 + len {
            return None;
        }
        let frame = self.buf[nl + 1..nl + 1 + len].to_vec();
        self.buf.drain(..nl + 1 + len);
        Some(Ok(frame))
    }
}
