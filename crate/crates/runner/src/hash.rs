//! Stable content hashing for resolved configs. Hashes go over the
//! canonical JSON serialization of the resolved structures, so reordering
//! keys or editing comments in the TOML source cannot change them.

use serde::Serialize;

/// FNV-1a over the canonical JSON of any serializable value, as 16 hex
/// digits.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("resolved configs serialize");
    fnv1a_hex(json.as_bytes())
}

pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_fnv_vector() {
        // "a" hashes to af63dc4c8601ec8c under 64-bit FNV-1a
        assert_eq!(fnv1a_hex(b"a"), "af63dc4c8601ec8c");
    }

    #[test]
    fn hash_depends_on_content() {
        assert_ne!(config_hash(&("x", 1)), config_hash(&("x", 2)));
        assert_eq!(config_hash(&("x", 1)), config_hash(&("x", 1)));
    }
}
