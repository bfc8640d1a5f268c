//! Conformance probe for generator servers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::client::Connection;
use super::protocol::{Dims, Message, ProtocolError, HEADER_LEN};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub dims: Option<Dims>,
    pub roundtrips: usize,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|i| i.passed)
    }

    fn record(&mut self, name: &str, result: Result<String, String>) {
        let (passed, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.items.push(CheckItem {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

/// Runs the handshake, `rounds` alternating GEN/DISC round trips and three
/// malformed-frame probes, each probe on a fresh connection from `connect`.
pub fn protocol_check(
    mut connect: impl FnMut() -> Result<Connection, ProtocolError>,
    rounds: usize,
    seed: u64,
) -> CheckReport {
    let mut report = CheckReport::default();
    let mut conn = match connect() {
        Ok(c) => c,
        Err(e) => {
            report.record("handshake", Err(e.to_string()));
            return report;
        }
    };
    let dims = conn.dims();
    report.dims = Some(dims);
    report.record(
        "handshake",
        Ok(format!(
            "latent_dim={} image={}x{}",
            dims.latent_dim, dims.width, dims.height
        )),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first: Option<(Vec<f32>, Vec<u8>)> = None;
    let mut failure = None;
    for i in 0..rounds {
        let z: Vec<f32> = (0..dims.latent_dim)
            .map(|_| {
                let v: f64 = StandardNormal.sample(&mut rng);
                v as f32
            })
            .collect();
        let outcome = if i % 2 == 0 {
            conn.generate(&z).map(|rgb| {
                if first.is_none() {
                    first = Some((z.clone(), rgb));
                }
            })
        } else {
            let rgb = vec![128u8; dims.image_bytes()];
            conn.discriminate(&z, &rgb).and_then(|s| {
                if s.is_finite() {
                    Ok(())
                } else {
                    Err(ProtocolError::Remote(format!("non-finite score {s}")))
                }
            })
        };
        match outcome {
            Ok(()) => report.roundtrips += 1,
            Err(e) => {
                failure = Some(format!("round {i}: {e}"));
                break;
            }
        }
    }
    report.record(
        "roundtrips",
        match failure {
            None => Ok(format!("{} GEN/DISC round trips", report.roundtrips)),
            Some(f) => Err(f),
        },
    );

    if let Some((z, rgb)) = first {
        let again = conn.generate(&z);
        report.record(
            "deterministic",
            match again {
                Ok(img) if img == rgb => Ok("repeated GEN_REQ returned identical image".into()),
                Ok(_) => Err("repeated GEN_REQ returned a different image".into()),
                Err(e) => Err(e.to_string()),
            },
        );
    }

    let valid = Message::GenReq(vec![0.0; dims.latent_dim as usize]).encode();
    let mut bad_magic = valid.clone();
    bad_magic[..4].copy_from_slice(b"OVEA");
    let mut bad_version = valid.clone();
    bad_version[4] = 0xff;
    let mut bad_length = Message::GenReq(vec![0.0; dims.latent_dim as usize + 1]).encode();
    bad_length.truncate(HEADER_LEN + dims.latent_bytes() + 4);
    for (name, bytes) in [
        ("reject_bad_magic", bad_magic),
        ("reject_bad_version", bad_version),
        ("reject_bad_length", bad_length),
    ] {
        let result = connect().and_then(|mut c| {
            c.send_raw(&bytes)?;
            c.receive()
        });
        report.record(
            name,
            match result {
                Ok(Message::Error(msg)) => Ok(format!("server replied ERROR: {msg}")),
                Ok(other) => Err(format!("server replied {:?}", other.frame_type())),
                Err(e) => Err(e.to_string()),
            },
        );
    }
    report
}
