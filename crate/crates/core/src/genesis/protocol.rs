//! Length-prefixed binary frames exchanged with external generator processes.
//!
//! ```text
//! frame   := magic "AEVO" | version u16 | type u16 | payload_len u32 | payload
//! HELLO=1     latent_dim u32, width u32, height u32   (server -> client, on connect)
//! GEN_REQ=2   latent_dim x f32
//! IMG_RESP=3  width*height*3 bytes RGB8, row-major
//! DISC_REQ=4  latent_dim x f32, then width*height*3 bytes RGB8
//! DISC_RESP=5 f32 raw score
//! ERROR=6     UTF-8 message
//! ```
//!
//! All integers and floats are little-endian.

use std::io::{self, Read, Write};

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"AEVO";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 12;
/// Upper bound on a payload the reader will allocate for.
pub const MAX_PAYLOAD: u32 = 256 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum FrameType {
    Hello = 1,
    GenReq = 2,
    ImgResp = 3,
    DiscReq = 4,
    DiscResp = 5,
    Error = 6,
}

impl FrameType {
    pub const ALL: [FrameType; 6] = [
        FrameType::Hello,
        FrameType::GenReq,
        FrameType::ImgResp,
        FrameType::DiscReq,
        FrameType::DiscResp,
        FrameType::Error,
    ];

    pub fn from_u16(v: u16) -> Option<Self> {
        Self::ALL.into_iter().find(|t| *t as u16 == v)
    }
}

/// Dimensions negotiated by the HELLO frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub latent_dim: u32,
    pub width: u32,
    pub height: u32,
}

impl Dims {
    pub fn image_bytes(&self) -> usize {
        self.width as usize * self.height as usize * 3
    }

    pub fn latent_bytes(&self) -> usize {
        self.latent_dim as usize * 4
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Message {
    Hello(Dims),
    GenReq(Vec<f32>),
    ImgResp(Vec<u8>),
    DiscReq { latent: Vec<f32>, rgb: Vec<u8> },
    DiscResp(f32),
    Error(String),
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("bad magic {found:?} at byte {offset}")]
    BadMagic { offset: u64, found: [u8; 4] },
    #[error("protocol version {found} at byte {offset}, expected {VERSION}")]
    VersionMismatch { offset: u64, found: u16 },
    #[error("unknown frame type {found} at byte {offset}")]
    UnknownType { offset: u64, found: u16 },
    #[error("truncated frame at byte {offset}: needed {needed} more bytes")]
    Truncated { offset: u64, needed: usize },
    #[error("{frame:?} payload of {found} bytes at byte {offset}, expected {expected}")]
    PayloadLength {
        offset: u64,
        frame: FrameType,
        expected: usize,
        found: usize,
    },
    #[error("invalid {frame:?} payload at byte {offset}: {reason}")]
    InvalidPayload {
        offset: u64,
        frame: FrameType,
        reason: String,
    },
    #[error("unexpected {found:?} frame at byte {offset}, expected {expected}")]
    UnexpectedFrame {
        offset: u64,
        found: FrameType,
        expected: &'static str,
    },
    #[error("remote error: {0}")]
    Remote(String),
    #[error("timed out waiting for frame at byte {offset}")]
    Timeout { offset: u64 },
    #[error("connection is dead after an earlier failure")]
    ConnectionDead,
    #[error("transport i/o error at byte {offset}: {source}")]
    Io {
        offset: u64,
        #[source]
        source: io::Error,
    },
}

impl ProtocolError {
    fn io(offset: u64, source: io::Error) -> Self {
        match source.kind() {
            io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => ProtocolError::Timeout { offset },
            _ => ProtocolError::Io { offset, source },
        }
    }
}

impl Message {
    pub fn frame_type(&self) -> FrameType {
        match self {
            Message::Hello(_) => FrameType::Hello,
            Message::GenReq(_) => FrameType::GenReq,
            Message::ImgResp(_) => FrameType::ImgResp,
            Message::DiscReq { .. } => FrameType::DiscReq,
            Message::DiscResp(_) => FrameType::DiscResp,
            Message::Error(_) => FrameType::Error,
        }
    }

    pub fn payload(&self) -> Vec<u8> {
        fn floats(out: &mut Vec<u8>, v: &[f32]) {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        let mut out = Vec::new();
        match self {
            Message::Hello(d) => {
                out.extend_from_slice(&d.latent_dim.to_le_bytes());
                out.extend_from_slice(&d.width.to_le_bytes());
                out.extend_from_slice(&d.height.to_le_bytes());
            }
            Message::GenReq(z) => floats(&mut out, z),
            Message::ImgResp(rgb) => out.extend_from_slice(rgb),
            Message::DiscReq { latent, rgb } => {
                floats(&mut out, latent);
                out.extend_from_slice(rgb);
            }
            Message::DiscResp(score) => out.extend_from_slice(&score.to_le_bytes()),
            Message::Error(msg) => out.extend_from_slice(msg.as_bytes()),
        }
        out
    }

    /// Full frame bytes: header followed by payload.
    pub fn encode(&self) -> Vec<u8> {
        let payload = self.payload();
        let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.frame_type() as u16).to_le_bytes());
        out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&payload);
        out
    }

    /// Decodes a payload. Every frame type except HELLO and ERROR needs the
    /// negotiated dimensions, and its length must match them exactly.
    pub fn decode(
        frame: FrameType,
        payload: &[u8],
        dims: Option<&Dims>,
        offset: u64,
    ) -> Result<Message, ProtocolError> {
        let expect_len = |expected: usize| -> Result<(), ProtocolError> {
            if payload.len() == expected {
                Ok(())
            } else {
                Err(ProtocolError::PayloadLength {
                    offset,
                    frame,
                    expected,
                    found: payload.len(),
                })
            }
        };
        let need_dims = || {
            dims.ok_or(ProtocolError::UnexpectedFrame {
                offset,
                found: frame,
                expected: "HELLO before any sized frame",
            })
        };
        let floats = |bytes: &[u8]| -> Vec<f32> {
            bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect()
        };
        match frame {
            FrameType::Hello => {
                expect_len(12)?;
                let word = |i: usize| {
                    u32::from_le_bytes([payload[i], payload[i + 1], payload[i + 2], payload[i + 3]])
                };
                let d = Dims {
                    latent_dim: word(0),
                    width: word(4),
                    height: word(8),
                };
                if d.latent_dim == 0 || d.width == 0 || d.height == 0 {
                    return Err(ProtocolError::InvalidPayload {
                        offset,
                        frame,
                        reason: format!("zero dimension in {d:?}"),
                    });
                }
                Ok(Message::Hello(d))
            }
            FrameType::GenReq => {
                let d = need_dims()?;
                expect_len(d.latent_bytes())?;
                Ok(Message::GenReq(floats(payload)))
            }
            FrameType::ImgResp => {
                let d = need_dims()?;
                expect_len(d.image_bytes())?;
                Ok(Message::ImgResp(payload.to_vec()))
            }
            FrameType::DiscReq => {
                let d = need_dims()?;
                expect_len(d.latent_bytes() + d.image_bytes())?;
                let (z, rgb) = payload.split_at(d.latent_bytes());
                Ok(Message::DiscReq {
                    latent: floats(z),
                    rgb: rgb.to_vec(),
                })
            }
            FrameType::DiscResp => {
                expect_len(4)?;
                Ok(Message::DiscResp(f32::from_le_bytes([
                    payload[0], payload[1], payload[2], payload[3],
                ])))
            }
            FrameType::Error => String::from_utf8(payload.to_vec())
                .map(Message::Error)
                .map_err(|e| ProtocolError::InvalidPayload {
                    offset,
                    frame,
                    reason: e.to_string(),
                }),
        }
    }
}

/// Reads frames from a byte stream, tracking the stream offset for errors.
pub struct FrameReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> FrameReader<R> {
    pub fn new(inner: R) -> Self {
        Self { inner, offset: 0 }
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// Fills `buf`, returning how many bytes were read before EOF.
    fn fill(&mut self, buf: &mut [u8]) -> Result<usize, ProtocolError> {
        let mut got = 0;
        while got < buf.len() {
            match self.inner.read(&mut buf[got..]) {
                Ok(0) => break,
                Ok(n) => {
                    got += n;
                    self.offset += n as u64;
                }
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(ProtocolError::io(self.offset, e)),
            }
        }
        Ok(got)
    }

    /// Reads one raw frame. Returns `Ok(None)` on clean EOF at a frame boundary.
    pub fn read_raw(&mut self) -> Result<Option<(FrameType, Vec<u8>, u64)>, ProtocolError> {
        let start = self.offset;
        let mut header = [0u8; HEADER_LEN];
        let got = self.fill(&mut header)?;
        if got == 0 {
            return Ok(None);
        }
        if got < HEADER_LEN {
            return Err(ProtocolError::Truncated {
                offset: self.offset,
                needed: HEADER_LEN - got,
            });
        }
        let magic = [header[0], header[1], header[2], header[3]];
        if magic != MAGIC {
            return Err(ProtocolError::BadMagic {
                offset: start,
                found: magic,
            });
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != VERSION {
            return Err(ProtocolError::VersionMismatch {
                offset: start + 4,
                found: version,
            });
        }
        let raw_type = u16::from_le_bytes([header[6], header[7]]);
        let frame = FrameType::from_u16(raw_type).ok_or(ProtocolError::UnknownType {
            offset: start + 6,
            found: raw_type,
        })?;
        let len = u32::from_le_bytes([header[8], header[9], header[10], header[11]]);
        if len > MAX_PAYLOAD {
            return Err(ProtocolError::InvalidPayload {
                offset: start + 8,
                frame,
                reason: format!("payload length {len} exceeds limit"),
            });
        }
        let mut payload = vec![0u8; len as usize];
        let got = self.fill(&mut payload)?;
        if got < payload.len() {
            return Err(ProtocolError::Truncated {
                offset: self.offset,
                needed: payload.len() - got,
            });
        }
        Ok(Some((frame, payload, start)))
    }

    /// Reads and decodes one message; EOF before a frame is a truncation.
    pub fn read_message(&mut self, dims: Option<&Dims>) -> Result<Message, ProtocolError> {
        match self.read_raw()? {
            Some((frame, payload, start)) => Message::decode(frame, &payload, dims, start),
            None => Err(ProtocolError::Truncated {
                offset: self.offset,
                needed: HEADER_LEN,
            }),
        }
    }
}

pub fn write_message<W: Write>(writer: &mut W, msg: &Message) -> io::Result<()> {
    writer.write_all(&msg.encode())?;
    writer.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DIMS: Dims = Dims {
        latent_dim: 3,
        width: 2,
        height: 2,
    };

    fn roundtrip(msg: &Message, dims: &Dims) -> Message {
        let bytes = msg.encode();
        let mut r = FrameReader::new(bytes.as_slice());
        let out = r.read_message(Some(dims)).unwrap();
        assert_eq!(r.offset() as usize, bytes.len());
        out
    }

    #[test]
    fn header_layout() {
        let bytes = Message::DiscResp(1.5).encode();
        assert_eq!(&bytes[..4], b"AEVO");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(&bytes[6..8], &[5, 0]);
        assert_eq!(&bytes[8..12], &[4, 0, 0, 0]);
        assert_eq!(&bytes[12..], &1.5f32.to_le_bytes());
    }

    #[test]
    fn each_type_roundtrips() {
        let msgs = [
            Message::Hello(Dims {
                latent_dim: 100,
                width: 128,
                height: 128,
            }),
            Message::GenReq(vec![0.5, -1.0, 3.25]),
            Message::ImgResp((0..12).collect()),
            Message::DiscReq {
                latent: vec![1.0, 2.0, 3.0],
                rgb: vec![7; 12],
            },
            Message::DiscResp(0.125),
            Message::Error("boom".into()),
        ];
        for m in &msgs {
            assert_eq!(&roundtrip(m, &DIMS), m);
        }
    }

    #[test]
    fn bad_magic_and_version() {
        let mut bytes = Message::DiscResp(1.0).encode();
        bytes[0] = b'X';
        assert!(matches!(
            FrameReader::new(bytes.as_slice()).read_message(Some(&DIMS)),
            Err(ProtocolError::BadMagic { offset: 0, .. })
        ));
        let mut bytes = Message::DiscResp(1.0).encode();
        bytes[4] = 2;
        assert!(matches!(
            FrameReader::new(bytes.as_slice()).read_message(Some(&DIMS)),
            Err(ProtocolError::VersionMismatch { offset: 4, found: 2 })
        ));
        let mut bytes = Message::DiscResp(1.0).encode();
        bytes[6] = 9;
        assert!(matches!(
            FrameReader::new(bytes.as_slice()).read_message(Some(&DIMS)),
            Err(ProtocolError::UnknownType { found: 9, .. })
        ));
    }

    #[test]
    fn truncated_payload() {
        let mut bytes = Message::ImgResp(vec![1; 12]).encode();
        bytes.pop();
        let err = FrameReader::new(bytes.as_slice())
            .read_message(Some(&DIMS))
            .unwrap_err();
        assert!(matches!(err, ProtocolError::Truncated { offset: 23, needed: 1 }), "{err:?}");
    }

    #[test]
    fn length_checked_against_dims() {
        let bytes = Message::ImgResp(vec![1; 11]).encode();
        assert!(matches!(
            FrameReader::new(bytes.as_slice()).read_message(Some(&DIMS)),
            Err(ProtocolError::PayloadLength {
                expected: 12,
                found: 11,
                ..
            })
        ));
        let bytes = Message::GenReq(vec![1.0; 3]).encode();
        assert!(matches!(
            FrameReader::new(bytes.as_slice()).read_message(None),
            Err(ProtocolError::UnexpectedFrame { .. })
        ));
    }

    #[test]
    fn second_frame_offsets_account_for_first() {
        let mut bytes = Message::DiscResp(1.0).encode();
        let mut bad = Message::DiscResp(2.0).encode();
        bad[1] = 0;
        bytes.extend(bad);
        let mut r = FrameReader::new(bytes.as_slice());
        r.read_message(Some(&DIMS)).unwrap();
        assert!(matches!(
            r.read_message(Some(&DIMS)),
            Err(ProtocolError::BadMagic { offset: 16, .. })
        ));
    }

    fn dims_strategy() -> impl Strategy<Value = Dims> {
        (1u32..40, 1u32..12, 1u32..12).prop_map(|(latent_dim, width, height)| Dims {
            latent_dim,
            width,
            height,
        })
    }

    fn finite_f32() -> impl Strategy<Value = f32> {
        prop::num::f32::NORMAL | prop::num::f32::ZERO | prop::num::f32::SUBNORMAL
    }

    fn message_strategy() -> impl Strategy<Value = (Dims, Message)> {
        dims_strategy().prop_flat_map(|d| {
            let n = d.latent_dim as usize;
            let px = d.image_bytes();
            let msg = prop_oneof![
                dims_strategy().prop_map(Message::Hello),
                prop::collection::vec(finite_f32(), n).prop_map(Message::GenReq),
                prop::collection::vec(any::<u8>(), px).prop_map(Message::ImgResp),
                (
                    prop::collection::vec(finite_f32(), n),
                    prop::collection::vec(any::<u8>(), px)
                )
                    .prop_map(|(latent, rgb)| Message::DiscReq { latent, rgb }),
                finite_f32().prop_map(Message::DiscResp),
                ".{0,40}".prop_map(Message::Error),
            ];
            (Just(d), msg)
        })
    }

    proptest! {
        #[test]
        fn encode_decode_identity((dims, msg) in message_strategy()) {
            prop_assert_eq!(roundtrip(&msg, &dims), msg);
        }
    }
}
