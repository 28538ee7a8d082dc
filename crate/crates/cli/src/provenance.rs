//! Provenance attached to every emitted artifact.

use std::io::{self, Write};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "varboot";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    /// SHA-256 (hex) of the canonical description of the run inputs.
    pub config_hash: String,
}

impl Provenance {
    pub fn new(command: &str, seed: Option<u64>, replicates: Option<usize>, canonical: &str) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            seed,
            replicates,
            config_hash: sha256_hex(canonical.as_bytes()),
        }
    }

    pub fn write_comments<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# tool: {} {}", self.tool, self.version)?;
        writeln!(w, "# command: {}", self.command)?;
        if let Some(seed) = self.seed {
            writeln!(w, "# seed: {seed}")?;
        }
        if let Some(m) = self.replicates {
            writeln!(w, "# replicates: {m}")?;
        }
        writeln!(w, "# config_hash: {}", self.config_hash)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn comment_block() {
        let p = Provenance::new("simulate", Some(7), Some(200), "x");
        let mut out = Vec::new();
        p.write_comments(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().all(|l| l.starts_with("# ")));
        assert!(text.contains("# seed: 7\n"));
    }
}
