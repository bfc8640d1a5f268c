//! Binary PPM (P6, maxval 255).

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{Image, ImageError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PpmError {
    #[error("bad magic at byte {offset}: expected \"P6\"")]
    BadMagic { offset: usize },
    #[error("malformed header at byte {offset}: {reason}")]
    BadHeader { offset: usize, reason: &'static str },
    #[error("unsupported maxval {maxval} at byte {offset}; only 255 is accepted")]
    UnsupportedMaxval { offset: usize, maxval: usize },
    #[error("truncated payload at byte {offset}: expected {expected} bytes, found {found}")]
    Truncated {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("{found} trailing bytes after payload at byte {offset}")]
    TrailingData { offset: usize, found: usize },
}

pub fn encode_ppm(img: &Image) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.as_bytes().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.as_bytes());
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &'static str) -> Result<usize, PpmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(usize::from(b - b'0')))
                .ok_or(PpmError::BadHeader {
                    offset: start,
                    reason: "number overflows",
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PpmError::BadHeader {
                offset: start,
                reason: what,
            });
        }
        Ok(value)
    }
}

pub fn decode_ppm(bytes: &[u8]) -> Result<Image, PpmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(PpmError::BadMagic { offset: 0 });
    }
    let mut cur = Cursor { bytes, pos: 2 };
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        _ => {
            return Err(PpmError::BadHeader {
                offset: 2,
                reason: "expected whitespace after magic",
            })
        }
    }
    let width = cur.number("expected width")?;
    let height = cur.number("expected height")?;
    if width == 0 || height == 0 {
        return Err(PpmError::BadHeader {
            offset: cur.pos,
            reason: "zero dimension",
        });
    }
    cur.skip_whitespace_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number("expected maxval")?;
    if maxval != 255 {
        return Err(PpmError::UnsupportedMaxval {
            offset: maxval_at,
            maxval,
        });
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(PpmError::BadHeader {
                offset: cur.pos,
                reason: "expected single whitespace before payload",
            })
        }
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or(PpmError::BadHeader {
            offset: cur.pos,
            reason: "dimensions overflow",
        })?;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(PpmError::Truncated {
            offset: bytes.len(),
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(PpmError::TrailingData {
            offset: cur.pos + expected,
            found: payload.len() - expected,
        });
    }
    Ok(Image::new(width, height, payload.to_vec()).expect("length checked"))
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<Image, ImageError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(decode_ppm(&bytes)?)
}

pub fn write_ppm(img: &Image, path: impl AsRef<Path>) -> Result<(), ImageError> {
    let path = path.as_ref();
    fs::write(path, encode_ppm(img)).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })
}
