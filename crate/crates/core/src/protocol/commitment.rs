//! Salted-hash commitments to claimed positions.
//!
//! A SHA-256 digest over `salt || x || y`, coordinates encoded as little-endian
//! IEEE-754 doubles. Negative zero is folded into positive zero so that equal
//! positions always yield equal digests.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::types::Position;

const DOMAIN_TAG: &[u8] = b"tpop/position-commitment/v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    #[serde(with = "hex_bytes")]
    pub digest: [u8; 32],
    #[serde(with = "hex_vec")]
    pub salt: Vec<u8>,
}

fn canonical(value: f64) -> [u8; 8] {
    let value = if value == 0.0 { 0.0 } else { value };
    value.to_le_bytes()
}

fn digest(position: &Position, salt: &[u8]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(DOMAIN_TAG);
    hasher.update((salt.len() as u64).to_le_bytes());
    hasher.update(salt);
    hasher.update(canonical(position.x));
    hasher.update(canonical(position.y));
    let out = hasher.finalize();
    let mut bytes = [0u8; 32];
    bytes.copy_from_slice(&out);
    bytes
}

pub fn commit(position: &Position, salt: &[u8]) -> Result<Commitment> {
    if salt.is_empty() {
        return Err(Error::EmptySalt);
    }
    Ok(Commitment { digest: digest(position, salt), salt: salt.to_vec() })
}

/// Commits with a fresh 32-byte salt drawn from `rng`.
pub fn commit_random<R: RngCore + ?Sized>(position: &Position, rng: &mut R) -> Commitment {
    let mut salt = vec![0u8; 32];
    rng.fill_bytes(&mut salt);
    commit(position, &salt).expect("salt is non-empty")
}

/// True iff `commitment` opens to `position` under `salt`.
pub fn open(commitment: &Commitment, position: &Position, salt: &[u8]) -> bool {
    !salt.is_empty() && commitment.salt == salt && commitment.digest == digest(position, salt)
}

mod hex_bytes {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let raw = hex::decode(text).map_err(D::Error::custom)?;
        raw.try_into().map_err(|_| D::Error::custom("digest must be 32 bytes"))
    }
}

mod hex_vec {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        hex::decode(String::deserialize(d)?).map_err(D::Error::custom)
    }
}
