//! Client side of the generator wire protocol.

use std::io::{BufReader, BufWriter, Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Child, Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::protocol::{write_message, Dims, FrameReader, Message, ProtocolError};
use super::{GenesisError, RealnessScore};
use crate::image::Image;
use crate::search::LatentVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transport {
    /// Spawn `command[0]` with the remaining arguments and talk over its stdio.
    Stdio { command: Vec<String> },
    /// Connect to `host:port`.
    Tcp { address: String },
}

/// One protocol connection; a single request is in flight at a time.
pub struct Connection {
    reader: FrameReader<Box<dyn Read + Send>>,
    writer: Box<dyn Write + Send>,
    dims: Dims,
    dead: bool,
    child: Option<Child>,
}

impl std::fmt::Debug for Connection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Connection")
            .field("dims", &self.dims)
            .field("dead", &self.dead)
            .finish()
    }
}

impl Connection {
    /// Waits for the server's HELLO on an already-open byte stream.
    pub fn handshake(
        reader: Box<dyn Read + Send>,
        writer: Box<dyn Write + Send>,
    ) -> Result<Self, ProtocolError> {
        let mut reader = FrameReader::new(reader);
        let start = reader.offset();
        let dims = match reader.read_message(None)? {
            Message::Hello(d) => d,
            Message::Error(msg) => return Err(ProtocolError::Remote(msg)),
            other => {
                return Err(ProtocolError::UnexpectedFrame {
                    offset: start,
                    found: other.frame_type(),
                    expected: "HELLO",
                })
            }
        };
        Ok(Self {
            reader,
            writer,
            dims,
            dead: false,
            child: None,
        })
    }

    pub fn connect_tcp(address: &str, timeout: Option<Duration>) -> Result<Self, ProtocolError> {
        let io_err = |source| ProtocolError::Io { offset: 0, source };
        let addr = address
            .to_socket_addrs()
            .map_err(io_err)?
            .next()
            .ok_or_else(|| io_err(std::io::Error::other(format!("no address for {address}"))))?;
        let stream = match timeout {
            Some(t) => TcpStream::connect_timeout(&addr, t),
            None => TcpStream::connect(addr),
        }
        .map_err(io_err)?;
        stream.set_read_timeout(timeout).map_err(io_err)?;
        stream.set_nodelay(true).map_err(io_err)?;
        let write_half = stream.try_clone().map_err(io_err)?;
        Self::handshake(
            Box::new(BufReader::new(stream)),
            Box::new(BufWriter::new(write_half)),
        )
    }

    pub fn spawn_stdio(command: &[String]) -> Result<Self, ProtocolError> {
        let io_err = |source| ProtocolError::Io { offset: 0, source };
        let (program, args) = command
            .split_first()
            .ok_or_else(|| io_err(std::io::Error::other("empty stdio command")))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(io_err)?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut conn = Self::handshake(
            Box::new(BufReader::new(stdout)),
            Box::new(BufWriter::new(stdin)),
        )?;
        conn.child = Some(child);
        Ok(conn)
    }

    pub fn open(transport: &Transport, timeout: Option<Duration>) -> Result<Self, ProtocolError> {
        match transport {
            Transport::Stdio { command } => Self::spawn_stdio(command),
            Transport::Tcp { address } => Self::connect_tcp(address, timeout),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_dead(&self) -> bool {
        self.dead
    }

    /// Sends one request and reads its response. Any transport or framing
    /// failure marks the connection dead; a remote ERROR frame does not.
    pub fn roundtrip(&mut self, request: &Message) -> Result<Message, ProtocolError> {
        if self.dead {
            return Err(ProtocolError::ConnectionDead);
        }
        let offset = self.reader.offset();
        let result = write_message(&mut self.writer, request)
            .map_err(|source| ProtocolError::Io { offset, source })
            .and_then(|()| self.reader.read_message(Some(&self.dims)));
        match result {
            Ok(Message::Error(msg)) => Err(ProtocolError::Remote(msg)),
            Ok(msg) => Ok(msg),
            Err(e) => {
                self.dead = true;
                Err(e)
            }
        }
    }

    pub fn generate(&mut self, z: &[f32]) -> Result<Vec<u8>, ProtocolError> {
        let offset = self.reader.offset();
        match self.roundtrip(&Message::GenReq(z.to_vec()))? {
            Message::ImgResp(rgb) => Ok(rgb),
            other => {
                self.dead = true;
                Err(ProtocolError::UnexpectedFrame {
                    offset,
                    found: other.frame_type(),
                    expected: "IMG_RESP",
                })
            }
        }
    }

    pub fn discriminate(&mut self, z: &[f32], rgb: &[u8]) -> Result<f32, ProtocolError> {
        let offset = self.reader.offset();
        let request = Message::DiscReq {
            latent: z.to_vec(),
            rgb: rgb.to_vec(),
        };
        match self.roundtrip(&request)? {
            Message::DiscResp(score) => Ok(score),
            other => {
                self.dead = true;
                Err(ProtocolError::UnexpectedFrame {
                    offset,
                    found: other.frame_type(),
                    expected: "DISC_RESP",
                })
            }
        }
    }

    /// Writes raw bytes, bypassing framing. Used to probe malformed-frame handling.
    pub fn send_raw(&mut self, bytes: &[u8]) -> Result<(), ProtocolError> {
        let offset = self.reader.offset();
        self.writer
            .write_all(bytes)
            .and_then(|()| self.writer.flush())
            .map_err(|source| ProtocolError::Io { offset, source })
    }

    /// Reads the next frame without sending anything first.
    pub fn receive(&mut self) -> Result<Message, ProtocolError> {
        self.reader.read_message(Some(&self.dims))
    }
}

impl Drop for Connection {
    fn drop(&mut self) {
        if let Some(mut child) = self.child.take() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// A pool of connections to one external generator.
pub struct ExternalGenerator {
    dims: Dims,
    pool: Vec<Mutex<Connection>>,
    next: AtomicUsize,
}

impl std::fmt::Debug for ExternalGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalGenerator")
            .field("dims", &self.dims)
            .field("connections", &self.pool.len())
            .finish()
    }
}

impl ExternalGenerator {
    /// Builds a pool from already-handshaken connections. All must agree on dimensions.
    pub fn from_connections(conns: Vec<Connection>) -> Result<Self, GenesisError> {
        let dims = conns
            .first()
            .ok_or_else(|| GenesisError::Config("external endpoint needs a connection".into()))?
            .dims();
        if let Some(bad) = conns.iter().find(|c| c.dims() != dims) {
            return Err(GenesisError::Config(format!(
                "pooled connections disagree on dimensions: {:?} vs {:?}",
                dims,
                bad.dims()
            )));
        }
        Ok(Self {
            dims,
            pool: conns.into_iter().map(Mutex::new).collect(),
            next: AtomicUsize::new(0),
        })
    }

    pub fn connect(
        transport: &Transport,
        connections: usize,
        timeout: Option<Duration>,
    ) -> Result<Self, GenesisError> {
        let conns = (0..connections.max(1))
            .map(|_| Connection::open(transport, timeout))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_connections(conns)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    fn with_connection<T>(
        &self,
        f: impl FnOnce(&mut Connection) -> Result<T, ProtocolError>,
    ) -> Result<T, ProtocolError> {
        let n = self.pool.len();
        let start = self.next.fetch_add(1, Ordering::Relaxed) % n;
        for i in 0..n {
            if let Ok(mut conn) = self.pool[(start + i) % n].try_lock() {
                if !conn.is_dead() {
                    return f(&mut conn);
                }
            }
        }
        // Everything busy or dead: wait on the first live connection.
        for i in 0..n {
            let mut conn = self.pool[(start + i) % n]
                .lock()
                .unwrap_or_else(|p| p.into_inner());
            if !conn.is_dead() {
                return f(&mut conn);
            }
        }
        Err(ProtocolError::ConnectionDead)
    }

    pub fn generate(&self, z: &LatentVector) -> Result<Image, GenesisError> {
        let latent = to_f32(z);
        let rgb = self.with_connection(|c| c.generate(&latent))?;
        Ok(Image::new(
            self.dims.width as usize,
            self.dims.height as usize,
            rgb,
        )?)
    }

    pub fn realness(&self, z: &LatentVector, img: &Image) -> Result<RealnessScore, GenesisError> {
        let latent = to_f32(z);
        let raw = self.with_connection(|c| c.discriminate(&latent, img.as_bytes()))?;
        if !raw.is_finite() {
            return Err(GenesisError::Config(format!(
                "remote realness score is not finite: {raw}"
            )));
        }
        Ok(RealnessScore {
            raw: f64::from(raw),
        })
    }
}

pub fn to_f32(z: &LatentVector) -> Vec<f32> {
    z.as_slice().iter().map(|&v| v as f32).collect()
}
