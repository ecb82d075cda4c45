//! Append-only, SHA-256 hash-chained record of MAP selection events.
//!
//! A block hashes its canonical encoding:
//!
//! ```text
//! index: u64 LE | round: u64 LE | payload length: u32 BE | payload | prev_hash: [u8; 32]
//! ```
//!
//! where the payload is the selection event as compact JSON with
//! lexicographically sorted keys.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::LedgerError;
use crate::model::VehicleId;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Hash256(pub [u8; 32]);

impl Hash256 {
    pub const ZERO: Hash256 = Hash256([0; 32]);

    pub fn of(bytes: &[u8]) -> Hash256 {
        let digest = Sha256::digest(bytes);
        let mut out = [0u8; 32];
        out.copy_from_slice(&digest);
        Hash256(out)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Hash256, LedgerError> {
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out)
            .map_err(|e| LedgerError::Malformed(format!("hash `{s}`: {e}")))?;
        Ok(Hash256(out))
    }
}

impl fmt::Debug for Hash256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hash256({})", self.to_hex())
    }
}

impl fmt::Display for Hash256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Hash256 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Hash256 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Hash256::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// One round's election outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionEvent {
    pub round: u64,
    pub elected_maps: Vec<VehicleId>,
    /// Identities flagged as Sybil at election time.
    pub excluded_sybils: Vec<VehicleId>,
    /// Digest of the (id, load, trust) table the election sampled from.
    pub input_digest: Hash256,
}

impl SelectionEvent {
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("event serializes");
        let mut out = String::new();
        write_canonical(&value, &mut out);
        out
    }
}

/// Hashes an election input table: `id: u32 LE | load: u32 LE | trust: f64 LE` per entry.
pub fn input_digest<I>(entries: I) -> Hash256
where
    I: IntoIterator<Item = (VehicleId, u32, f64)>,
{
    let mut hasher = Sha256::new();
    for (id, load, trust) in entries {
        hasher.update(id.0.to_le_bytes());
        hasher.update(load.to_le_bytes());
        hasher.update(trust.to_le_bytes());
    }
    let mut out = [0u8; 32];
    out.copy_from_slice(&hasher.finalize());
    Hash256(out)
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&map[k], out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub index: u64,
    pub round: u64,
    pub payload: SelectionEvent,
    pub prev_hash: Hash256,
    pub hash: Hash256,
}

fn encode(index: u64, round: u64, payload: &[u8], prev_hash: &Hash256) -> Vec<u8> {
    let mut buf = Vec::with_capacity(8 + 8 + 4 + payload.len() + 32);
    buf.extend_from_slice(&index.to_le_bytes());
    buf.extend_from_slice(&round.to_le_bytes());
    buf.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    buf.extend_from_slice(payload);
    buf.extend_from_slice(&prev_hash.0);
    buf
}

impl Block {
    pub fn new(index: u64, payload: SelectionEvent, prev_hash: Hash256) -> Block {
        let round = payload.round;
        let mut block = Block {
            index,
            round,
            payload,
            prev_hash,
            hash: Hash256::ZERO,
        };
        block.hash = block.compute_hash();
        block
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        encode(
            self.index,
            self.round,
            self.payload.canonical_json().as_bytes(),
            &self.prev_hash,
        )
    }

    pub fn compute_hash(&self) -> Hash256 {
        Hash256::of(&self.canonical_bytes())
    }

    /// Strict inverse of [`Block::canonical_bytes`]: rejects trailing bytes,
    /// bad lengths and payloads that are not in canonical form.
    pub fn decode(bytes: &[u8], hash: Hash256) -> Result<Block, LedgerError> {
        let malformed = |m: &str| LedgerError::Malformed(m.to_string());
        if bytes.len() < 8 + 8 + 4 + 32 {
            return Err(malformed("truncated header"));
        }
        let index = u64::from_le_bytes(bytes[0..8].try_into().unwrap());
        let round = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let len = u32::from_be_bytes(bytes[16..20].try_into().unwrap()) as usize;
        if bytes.len() != 20 + len + 32 {
            return Err(malformed("payload length mismatch"));
        }
        let payload_bytes = &bytes[20..20 + len];
        let text = std::str::from_utf8(payload_bytes).map_err(|_| malformed("payload not UTF-8"))?;
        let payload: SelectionEvent =
            serde_json::from_str(text).map_err(|e| LedgerError::Malformed(e.to_string()))?;
        if payload.canonical_json().as_bytes() != payload_bytes {
            return Err(malformed("payload not canonical"));
        }
        let mut prev = [0u8; 32];
        prev.copy_from_slice(&bytes[20 + len..]);
        Ok(Block {
            index,
            round,
            payload,
            prev_hash: Hash256(prev),
            hash,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ledger {
    pub blocks: Vec<Block>,
}

impl Ledger {
    pub fn new() -> Ledger {
        Ledger::default()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn head_hash(&self) -> Option<Hash256> {
        self.blocks.last().map(|b| b.hash)
    }

    /// Appends one block; rounds must strictly increase.
    pub fn append_event(&mut self, event: SelectionEvent) -> Result<&Block, LedgerError> {
        let prev_hash = match self.blocks.last() {
            Some(last) if event.round <= last.round => {
                return Err(LedgerError::NonMonotonicRound {
                    last: last.round,
                    got: event.round,
                })
            }
            Some(last) => last.hash,
            None => Hash256::ZERO,
        };
        let block = Block::new(self.blocks.len() as u64, event, prev_hash);
        self.blocks.push(block);
        Ok(self.blocks.last().unwrap())
    }

    pub fn verify_chain(&self) -> bool {
        let mut prev: Option<&Block> = None;
        for (i, block) in self.blocks.iter().enumerate() {
            if block.index != i as u64 || block.round != block.payload.round {
                return false;
            }
            let expected_prev = prev.map_or(Hash256::ZERO, |p| p.hash);
            if block.prev_hash != expected_prev {
                return false;
            }
            if prev.is_some_and(|p| block.round <= p.round) {
                return false;
            }
            if block.compute_hash() != block.hash {
                return false;
            }
            prev = Some(block);
        }
        true
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }

    pub fn from_json(text: &str) -> Result<Ledger, LedgerError> {
        serde_json::from_str(text).map_err(|e| LedgerError::Malformed(e.to_string()))
    }
}

/// Convenience for [`Ledger::verify_chain`].
pub fn verify_chain(ledger: &Ledger) -> bool {
    ledger.verify_chain()
}
