//! Versioned binary snapshots.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      8 bytes  "PROTOSNP"
//! version    u32
//! tick       u64
//! config     u32 length + UTF-8 TOML
//! rng id     u32 length + UTF-8
//! checksum   32 bytes SHA-256 of the payload
//! payload    u64 length + bincode(WorldState)
//! ```

use super::WorldState;
use crate::config::SimConfig;
use crate::rng::RNG_ALGORITHM;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"PROTOSNP";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("not a snapshot (bad magic)")]
    Magic,
    #[error("snapshot format version {found}, expected {expected}")]
    Version { found: u32, expected: u32 },
    #[error("snapshot uses random algorithm {0:?}, this build uses {RNG_ALGORITHM:?}")]
    Rng(String),
    #[error("snapshot is truncated")]
    Truncated,
    #[error("snapshot checksum mismatch")]
    Checksum,
    #[error("snapshot payload is corrupt: {0}")]
    Decode(String),
    #[error("snapshot header does not match payload")]
    Header,
    #[error("could not encode snapshot: {0}")]
    Encode(String),
}

/// Header fields readable without decoding the payload.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub version: u32,
    pub tick: u64,
    pub config_text: String,
    pub rng_algorithm: String,
}

impl SnapshotHeader {
    pub fn config(&self) -> Result<SimConfig, crate::config::ConfigError> {
        SimConfig::load(&self.config_text)
    }
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend((s.len() as u32).to_le_bytes());
    out.extend(s.as_bytes());
}

pub fn encode(world: &WorldState) -> Result<Vec<u8>, SnapshotError> {
    let payload = bincode::serialize(world).map_err(|e| SnapshotError::Encode(e.to_string()))?;
    let config = world
        .config
        .to_text()
        .map_err(|e| SnapshotError::Encode(e.to_string()))?;
    let mut out = Vec::with_capacity(payload.len() + config.len() + 128);
    out.extend(SNAPSHOT_MAGIC);
    out.extend(SNAPSHOT_VERSION.to_le_bytes());
    out.extend(world.tick.to_le_bytes());
    put_str(&mut out, &config);
    put_str(&mut out, RNG_ALGORITHM);
    out.extend(Sha256::digest(&payload));
    out.extend((payload.len() as u64).to_le_bytes());
    out.extend(payload);
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SnapshotError> {
        let end = self.at.checked_add(n).ok_or(SnapshotError::Truncated)?;
        let s = self.bytes.get(self.at..end).ok_or(SnapshotError::Truncated)?;
        self.at = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, SnapshotError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, SnapshotError> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|e| SnapshotError::Decode(e.to_string()))
    }
}

fn parse(bytes: &[u8]) -> Result<(SnapshotHeader, [u8; 32], &[u8]), SnapshotError> {
    let mut r = Reader { bytes, at: 0 };
    if r.take(8).map_err(|_| SnapshotError::Magic)? != SNAPSHOT_MAGIC {
        return Err(SnapshotError::Magic);
    }
    let version = r.u32()?;
    if version != SNAPSHOT_VERSION {
        return Err(SnapshotError::Version {
            found: version,
            expected: SNAPSHOT_VERSION,
        });
    }
    let tick = r.u64()?;
    let config_text = r.string()?;
    let rng_algorithm = r.string()?;
    let checksum: [u8; 32] = r.take(32)?.try_into().unwrap();
    let len = r.u64()? as usize;
    let payload = r.take(len)?;
    if r.at != bytes.len() {
        return Err(SnapshotError::Decode("trailing bytes".into()));
    }
    Ok((
        SnapshotHeader {
            version,
            tick,
            config_text,
            rng_algorithm,
        },
        checksum,
        payload,
    ))
}

pub fn read_header(bytes: &[u8]) -> Result<SnapshotHeader, SnapshotError> {
    parse(bytes).map(|(h, _, _)| h)
}

pub fn decode(bytes: &[u8]) -> Result<WorldState, SnapshotError> {
    let (header, checksum, payload) = parse(bytes)?;
    if header.rng_algorithm != RNG_ALGORITHM {
        return Err(SnapshotError::Rng(header.rng_algorithm));
    }
    if Sha256::digest(payload).as_slice() != checksum {
        return Err(SnapshotError::Checksum);
    }
    let world: WorldState = bincode::deserialize(payload).map_err(|e| SnapshotError::Decode(e.to_string()))?;
    if world.tick != header.tick {
        return Err(SnapshotError::Header);
    }
    Ok(world)
}
