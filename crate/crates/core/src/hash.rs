//! Content-addressed identifiers.

use sha2::{Digest, Sha256};

/// Hex length of every id (128 bits).
pub const ID_HEX_LEN: usize = 32;

/// SHA-256 of `canonical`, hex-encoded and truncated to 128 bits.
pub fn digest_id(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    hex::encode(&digest[..ID_HEX_LEN / 2])
}

/// Whether `s` has the shape of an id produced by [`digest_id`].
pub fn looks_like_id(s: &str) -> bool {
    s.len() == ID_HEX_LEN && s.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
}
