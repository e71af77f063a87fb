use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the canonical JSON serialization of a value.
pub fn hash_of<T: Serialize>(value: &T) -> String {
    sha256_hex(
        serde_json::to_string(value)
            .expect("serializable")
            .as_bytes(),
    )
}
