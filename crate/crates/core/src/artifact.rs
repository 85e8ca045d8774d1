//! Versioned binary artifacts.
//!
//! Layout: 8-byte magic `RSSLOC\0\x01`, little-endian `u32` format version,
//! little-endian `u32` kind tag, then the CBOR encoding of the payload.

use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gbt::GbtEnsemble;
use crate::localization::LocalizationModel;
use crate::sae::StackedAutoencoder;

pub const MAGIC: [u8; 8] = *b"RSSLOC\0\x01";
pub const FORMAT_VERSION: u32 = 1;

/// What an artifact file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum ArtifactKind {
    Model = 1,
    Autoencoder = 2,
    Ensemble = 3,
}

/// Types that can be stored as a standalone artifact.
pub trait Artifact: Serialize + DeserializeOwned {
    const KIND: ArtifactKind;
}

impl Artifact for LocalizationModel {
    const KIND: ArtifactKind = ArtifactKind::Model;
}

impl Artifact for StackedAutoencoder {
    const KIND: ArtifactKind = ArtifactKind::Autoencoder;
}

impl Artifact for GbtEnsemble {
    const KIND: ArtifactKind = ArtifactKind::Ensemble;
}

pub fn encode<A: Artifact>(value: &A) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write(value, &mut buf)?;
    Ok(buf)
}

pub fn write<A: Artifact, W: Write>(value: &A, mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Artifact(format!("write failed: {e}"));
    w.write_all(&MAGIC).map_err(io)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&(A::KIND as u32).to_le_bytes()).map_err(io)?;
    ciborium::into_writer(value, &mut w).map_err(|e| Error::Artifact(format!("encoding failed: {e}")))
}

pub fn decode<A: Artifact>(bytes: &[u8]) -> Result<A> {
    read(bytes)
}

pub fn read<A: Artifact, R: Read>(mut r: R) -> Result<A> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)
        .map_err(|_| Error::Artifact("file too short for an artifact header".into()))?;
    if header[..8] != MAGIC {
        return Err(Error::Artifact("not an artifact file (bad magic)".into()));
    }
    let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Artifact(format!(
            "unsupported format version {version}, this build reads version {FORMAT_VERSION}"
        )));
    }
    let kind = u32::from_le_bytes(header[12..16].try_into().unwrap());
    if kind != A::KIND as u32 {
        return Err(Error::Artifact(format!(
            "artifact holds kind {kind}, expected {:?} ({})",
            A::KIND,
            A::KIND as u32
        )));
    }
    ciborium::from_reader(r).map_err(|e| Error::Artifact(format!("decoding failed: {e}")))
}

pub fn save<A: Artifact>(value: &A, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(value)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load<A: Artifact>(path: impl AsRef<Path>) -> Result<A> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
