//! In-process echo stub speaking the generator protocol, backed by a builtin generator.

use std::io::{BufReader, BufWriter, Read, Write};
use std::net::{SocketAddr, TcpListener};
use std::sync::Arc;
use std::thread;

use super::builtin::{shell_distance, BuiltinGenerator, BuiltinKind};
use super::protocol::{write_message, Dims, FrameReader, Message, ProtocolError};
use super::GenesisError;
use crate::search::LatentVector;

/// The dimensions the default stub advertises.
pub const STUB_DIMS: Dims = Dims {
    latent_dim: 100,
    width: 128,
    height: 128,
};

pub fn default_stub_generator() -> Result<BuiltinGenerator, GenesisError> {
    BuiltinGenerator::new(
        BuiltinKind::Coherent,
        0,
        STUB_DIMS.latent_dim as usize,
        STUB_DIMS.width as usize,
        STUB_DIMS.height as usize,
    )
}

fn answer(generator: &BuiltinGenerator, msg: Message) -> Message {
    let latent = |z: &[f32]| LatentVector::new(z.iter().map(|&v| f64::from(v)).collect());
    match msg {
        Message::GenReq(z) => match generator.generate(&latent(&z)) {
            Ok(img) => Message::ImgResp(img.into_bytes()),
            Err(e) => Message::Error(e.to_string()),
        },
        Message::DiscReq { latent: z, .. } => {
            let z: Vec<f64> = z.iter().map(|&v| f64::from(v)).collect();
            Message::DiscResp(shell_distance(&z) as f32)
        }
        other => Message::Error(format!("unexpected {:?} frame", other.frame_type())),
    }
}

/// Serves one connection until EOF. Malformed frames get an ERROR reply and
/// close the connection.
pub fn serve<R: Read, W: Write>(
    reader: R,
    mut writer: W,
    generator: &BuiltinGenerator,
) -> Result<(), ProtocolError> {
    let (w, h) = generator.image_size();
    let dims = Dims {
        latent_dim: generator.latent_dim() as u32,
        width: w as u32,
        height: h as u32,
    };
    let io = |source| ProtocolError::Io { offset: 0, source };
    write_message(&mut writer, &Message::Hello(dims)).map_err(io)?;
    let mut reader = FrameReader::new(reader);
    loop {
        let frame = match reader.read_raw() {
            Ok(Some(f)) => f,
            Ok(None) => return Ok(()),
            Err(e) => {
                let _ = write_message(&mut writer, &Message::Error(e.to_string()));
                return Err(e);
            }
        };
        let (kind, payload, start) = frame;
        let msg = match Message::decode(kind, &payload, Some(&dims), start) {
            Ok(m) => m,
            Err(e) => {
                let _ = write_message(&mut writer, &Message::Error(e.to_string()));
                return Err(e);
            }
        };
        write_message(&mut writer, &answer(generator, msg)).map_err(io)?;
    }
}

/// Listens on an ephemeral loopback port and serves every connection on its own thread.
pub fn spawn_tcp_stub(generator: BuiltinGenerator) -> std::io::Result<SocketAddr> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    serve_listener(listener, generator)
}

pub fn serve_listener(listener: TcpListener, generator: BuiltinGenerator) -> std::io::Result<SocketAddr> {
    let addr = listener.local_addr()?;
    let generator = Arc::new(generator);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(stream) = stream else { continue };
            let generator = Arc::clone(&generator);
            thread::spawn(move || {
                let _ = stream.set_nodelay(true);
                let Ok(write_half) = stream.try_clone() else {
                    return;
                };
                if let Err(e) = serve(BufReader::new(stream), BufWriter::new(write_half), &generator) {
                    log::debug!("stub connection closed: {e}");
                }
            });
        }
    });
    Ok(addr)
}
