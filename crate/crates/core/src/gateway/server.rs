//! Threaded TCP server around the [`Engine`].
//!
//! One loop thread owns the engine. Each connection has a reader thread that
//! decodes frames into an ordered queue towards the loop, and a writer thread
//! fed by a bounded queue; a client whose queue fills up is disconnected
//! rather than slowing the loop down.

use std::collections::BTreeMap;
use std::io::{ErrorKind, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, Sender, SyncSender, TrySendError};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::engine::{Delivery, Engine, Outgoing};
use super::protocol::{
    decode_inbound, decode_payload, encode_frame, FrameDecoder, FrameError, Inbound, InboundBody,
    Outbound, MAX_FRAME,
};
use super::GatewayError;
use crate::metrics::{log_file_name, to_ndjson};
use crate::orchestrator::{SessionConfig, StudyPlan};
use crate::sim::Scene;

/// Server settings, loadable from TOML. `REPLICA_PORT` and
/// `REPLICA_DATA_DIR` override the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeConfig {
    pub bind: String,
    /// 0 picks a free port.
    pub port: u16,
    /// Session logs are written here.
    pub data_dir: PathBuf,
    pub snapshot_hz: f64,
    /// Simulated seconds per wall-clock second.
    pub time_scale: f64,
    /// Outbound frames buffered per client before it is dropped.
    pub client_queue: usize,
    pub max_frame: usize,
    pub session: SessionConfig,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1".into(),
            port: 7878,
            data_dir: PathBuf::from("data"),
            snapshot_hz: 30.0,
            time_scale: 1.0,
            client_queue: 1024,
            max_frame: MAX_FRAME,
            session: SessionConfig::default(),
        }
    }
}

impl ServeConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, GatewayError> {
        let cfg: Self =
            toml::from_str(s).map_err(|e| GatewayError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GatewayError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Applies overrides from a variable lookup such as `std::env::var`.
    pub fn apply_overrides(
        &mut self,
        var: impl Fn(&str) -> Option<String>,
    ) -> Result<(), GatewayError> {
        if let Some(p) = var("REPLICA_PORT") {
            self.port = p
                .trim()
                .parse()
                .map_err(|_| GatewayError::InvalidConfig(format!("REPLICA_PORT={p}")))?;
        }
        if let Some(d) = var("REPLICA_DATA_DIR") {
            self.data_dir = PathBuf::from(d);
        }
        Ok(())
    }

    pub fn apply_env(&mut self) -> Result<(), GatewayError> {
        self.apply_overrides(|k| std::env::var(k).ok())
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        let bad = |m: &str| Err(GatewayError::InvalidConfig(m.into()));
        if !(self.snapshot_hz.is_finite() && self.snapshot_hz > 0.0) {
            return bad("snapshot_hz must be positive");
        }
        if !(self.time_scale.is_finite() && self.time_scale > 0.0) {
            return bad("time_scale must be positive");
        }
        if self.client_queue == 0 || self.max_frame == 0 {
            return bad("client_queue and max_frame must be nonzero");
        }
        if !(self.session.notify_after.is_finite() && self.session.notify_after >= 0.0) {
            return bad("session.notify_after must be nonnegative");
        }
        Ok(())
    }
}

type ClientId = u64;

enum LoopMsg {
    Connect(ClientId, SyncSender<Arc<Vec<u8>>>, TcpStream),
    Inbound(ClientId, Inbound),
    Malformed(ClientId, Option<u64>, String),
    Disconnect(ClientId),
}

struct Conn {
    tx: SyncSender<Arc<Vec<u8>>>,
    stream: TcpStream,
}

/// A running server. Dropping it stops the server.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    threads: Vec<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting, closes every connection and waits for the loop.
    pub fn shutdown(mut self) {
        self.stop_threads();
    }

    /// Blocks until the server stops.
    pub fn wait(mut self) {
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
    }

    fn stop_threads(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_threads();
    }
}

/// Starts the server on `config.bind:config.port` and returns once it is
/// listening.
pub fn serve(
    config: &ServeConfig,
    scene: Scene,
    plan: StudyPlan,
) -> Result<ServerHandle, GatewayError> {
    config.validate()?;
    let engine = Engine::new(scene, plan, config.session.clone())?;
    let addr_text = format!("{}:{}", config.bind, config.port);
    let listener = TcpListener::bind(&addr_text).map_err(|e| GatewayError::BindFailure {
        addr: addr_text.clone(),
        reason: e.to_string(),
    })?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let (loop_tx, loop_rx) = mpsc::channel();

    let accept = {
        let stop = stop.clone();
        let cfg = config.clone();
        thread::Builder::new()
            .name("replica-accept".into())
            .spawn(move || accept_loop(listener, loop_tx, stop, cfg))?
    };
    let sim = {
        let stop = stop.clone();
        let cfg = config.clone();
        thread::Builder::new()
            .name("replica-loop".into())
            .spawn(move || sim_loop(engine, loop_rx, stop, cfg))?
    };
    log::info!("listening on {addr}");
    Ok(ServerHandle {
        addr,
        stop,
        threads: vec![accept, sim],
    })
}

fn accept_loop(
    listener: TcpListener,
    loop_tx: Sender<LoopMsg>,
    stop: Arc<AtomicBool>,
    cfg: ServeConfig,
) {
    let next_id = AtomicU64::new(1);
    while !stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, peer)) => {
                let id = next_id.fetch_add(1, Ordering::SeqCst);
                log::info!("client {id} connected from {peer}");
                if let Err(e) = start_client(id, stream, &loop_tx, &stop, &cfg) {
                    log::warn!("client {id}: {e}");
                }
            }
            Err(e) if e.kind() == ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(5)),
            Err(e) => {
                log::warn!("accept: {e}");
                thread::sleep(Duration::from_millis(5));
            }
        }
    }
}

fn start_client(
    id: ClientId,
    stream: TcpStream,
    loop_tx: &Sender<LoopMsg>,
    stop: &Arc<AtomicBool>,
    cfg: &ServeConfig,
) -> std::io::Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(Duration::from_millis(50)))?;
    let (tx, rx) = mpsc::sync_channel::<Arc<Vec<u8>>>(cfg.client_queue);
    let mut writer = stream.try_clone()?;
    thread::spawn(move || {
        for frame in rx {
            if writer.write_all(&frame).is_err() {
                break;
            }
        }
        let _ = writer.shutdown(Shutdown::Both);
    });
    let _ = loop_tx.send(LoopMsg::Connect(id, tx, stream.try_clone()?));
    let loop_tx = loop_tx.clone();
    let stop = stop.clone();
    let max_frame = cfg.max_frame;
    let mut reader = stream;
    thread::spawn(move || {
        let mut dec = FrameDecoder::new(max_frame);
        let mut buf = [0u8; 8192];
        'outer: while !stop.load(Ordering::SeqCst) {
            let n = match reader.read(&mut buf) {
                Ok(0) => break,
                Ok(n) => n,
                Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {
                    continue
                }
                Err(_) => break,
            };
            dec.push(&buf[..n]);
            while let Some(frame) = dec.next_frame() {
                let msg = match frame {
                    Ok(payload) => match decode_inbound(&payload) {
                        Ok(m) => LoopMsg::Inbound(id, m),
                        Err((corr, reason)) => LoopMsg::Malformed(id, corr, reason),
                    },
                    Err(FrameError::BadHeader(h)) => {
                        LoopMsg::Malformed(id, None, format!("bad frame header `{h}`"))
                    }
                    Err(FrameError::TooLarge(n)) => {
                        let _ = loop_tx.send(LoopMsg::Malformed(
                            id,
                            None,
                            format!("frame of {n} bytes exceeds limit"),
                        ));
                        break 'outer;
                    }
                };
                if loop_tx.send(msg).is_err() {
                    break 'outer;
                }
            }
        }
        let _ = loop_tx.send(LoopMsg::Disconnect(id));
    });
    Ok(())
}

struct Fanout {
    clients: BTreeMap<ClientId, Conn>,
}

impl Fanout {
    fn send(&mut self, id: ClientId, msg: &Outbound) {
        let frame = Arc::new(encode_frame(msg));
        self.send_frame(id, frame);
    }

    fn send_frame(&mut self, id: ClientId, frame: Arc<Vec<u8>>) {
        let Some(c) = self.clients.get(&id) else {
            return;
        };
        match c.tx.try_send(frame) {
            Ok(()) => {}
            Err(TrySendError::Full(_)) => {
                log::warn!("client {id} is too slow, disconnecting");
                self.drop_client(id);
            }
            Err(TrySendError::Disconnected(_)) => self.drop_client(id),
        }
    }

    fn broadcast(&mut self, msg: &Outbound) {
        let frame = Arc::new(encode_frame(msg));
        let ids: Vec<ClientId> = self.clients.keys().copied().collect();
        for id in ids {
            self.send_frame(id, frame.clone());
        }
    }

    fn deliver(&mut self, sender: Option<ClientId>, out: Outgoing) {
        for (d, msg) in out {
            match (d, sender) {
                (Delivery::Sender, Some(id)) => self.send(id, &msg),
                (Delivery::Sender, None) => {}
                (Delivery::Broadcast, _) => self.broadcast(&msg),
            }
        }
    }

    fn drop_client(&mut self, id: ClientId) {
        if let Some(c) = self.clients.remove(&id) {
            let _ = c.stream.shutdown(Shutdown::Both);
        }
    }
}

fn write_logs(engine: &mut Engine, dir: &Path) {
    for s in engine.take_finished() {
        let name = log_file_name(&s.subject, s.which, s.modality);
        let result = std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(dir.join(&name), to_ndjson(&s.log)));
        match result {
            Ok(()) => log::info!("wrote {}", dir.join(&name).display()),
            Err(e) => log::error!("cannot write {name}: {e}"),
        }
    }
}

fn sim_loop(mut engine: Engine, rx: Receiver<LoopMsg>, stop: Arc<AtomicBool>, cfg: ServeConfig) {
    let mut fan = Fanout {
        clients: BTreeMap::new(),
    };
    let dt = engine.world().config.dt;
    let start = Instant::now();
    let mut stepped: u64 = 0;
    let snapshot_period = 1.0 / cfg.snapshot_hz;
    let mut next_snapshot = 0.0;
    let mut last_snapshot_time = f64::NEG_INFINITY;

    while !stop.load(Ordering::SeqCst) {
        while let Ok(msg) = rx.try_recv() {
            match msg {
                LoopMsg::Connect(id, tx, stream) => {
                    fan.clients.insert(id, Conn { tx, stream });
                    fan.send(id, &engine.snapshot());
                    fan.send(id, &engine.affordance_update());
                }
                LoopMsg::Inbound(id, m) => {
                    let out = engine.handle(m);
                    fan.deliver(Some(id), out);
                }
                LoopMsg::Malformed(id, corr, reason) => {
                    fan.send(id, &Outbound::Err { corr, reason })
                }
                // the writer flushes what is queued, then closes
                LoopMsg::Disconnect(id) => {
                    fan.clients.remove(&id);
                }
            }
        }

        let wall = start.elapsed().as_secs_f64();
        let due = (wall * cfg.time_scale / dt) as u64;
        // bounded catch-up after stalls
        let mut budget = 500;
        while stepped < due && budget > 0 {
            let out = engine.advance();
            fan.deliver(None, out);
            stepped += 1;
            budget -= 1;
        }
        if stepped < due {
            stepped = due;
        }
        write_logs(&mut engine, &cfg.data_dir);

        if wall >= next_snapshot {
            next_snapshot = wall + snapshot_period;
            if engine.now() > last_snapshot_time {
                last_snapshot_time = engine.now();
                fan.broadcast(&engine.snapshot());
                if let Some(frame) = engine.camera_frame() {
                    fan.broadcast(&frame);
                }
            }
        }
        thread::sleep(Duration::from_secs_f64((dt / cfg.time_scale).min(0.005)));
    }
    write_logs(&mut engine, &cfg.data_dir);
    let ids: Vec<ClientId> = fan.clients.keys().copied().collect();
    for id in ids {
        fan.drop_client(id);
    }
}

/// Minimal blocking client for the wire protocol.
pub struct Client {
    stream: TcpStream,
    dec: FrameDecoder,
    next_id: u64,
}

impl Client {
    pub fn connect(addr: SocketAddr) -> std::io::Result<Self> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        Ok(Self {
            stream,
            dec: FrameDecoder::default(),
            next_id: 1,
        })
    }

    /// Sends a message and returns its id.
    pub fn send(&mut self, body: InboundBody) -> std::io::Result<u64> {
        let id = self.next_id;
        self.next_id += 1;
        self.stream
            .write_all(&encode_frame(&Inbound { id, body }))?;
        Ok(id)
    }

    /// Writes raw bytes, framing included.
    pub fn send_raw(&mut self, bytes: &[u8]) -> std::io::Result<()> {
        self.stream.write_all(bytes)
    }

    /// Next message, or `None` on timeout or disconnect.
    pub fn recv(&mut self, timeout: Duration) -> Option<Outbound> {
        let deadline = Instant::now() + timeout;
        let mut buf = [0u8; 8192];
        loop {
            if let Some(frame) = self.dec.next_frame() {
                return frame.ok().and_then(|f| decode_payload(&f).ok());
            }
            let left = deadline.checked_duration_since(Instant::now())?;
            self.stream
                .set_read_timeout(Some(left.max(Duration::from_millis(1))))
                .ok()?;
            match self.stream.read(&mut buf) {
                Ok(0) => return None,
                Ok(n) => self.dec.push(&buf[..n]),
                Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {
                    return None
                }
                Err(_) => return None,
            }
        }
    }

    /// Reads until a message satisfies `pred`, discarding the rest.
    pub fn recv_until(
        &mut self,
        timeout: Duration,
        mut pred: impl FnMut(&Outbound) -> bool,
    ) -> Option<Outbound> {
        let deadline = Instant::now() + timeout;
        loop {
            let left = deadline.checked_duration_since(Instant::now())?;
            let msg = self.recv(left)?;
            if pred(&msg) {
                return Some(msg);
            }
        }
    }

    /// Reply (ack or err) to the message with id `corr`.
    pub fn reply(&mut self, corr: u64, timeout: Duration) -> Option<Outbound> {
        self.recv_until(timeout, |m| match m {
            Outbound::Ack { corr: c, .. } => *c == corr,
            Outbound::Err { corr: c, .. } => *c == Some(corr),
            _ => false,
        })
    }
}
