//! Flat key-value configuration files with `[section]` headers, plus the
//! canonical digest used for run manifests.
//!
//! Grammar (documented for users in `docs/config.md`):
//! - `#` starts a comment (full-line or trailing); blank lines are ignored
//! - `[name]` opens a section; all entries belong to the current section
//! - entries are `key = value`; values are free text, typed by the consumer
//! - keys are unique within a section, except `member`, which may repeat
//!   (ensemble atoms are declared one per line)
//!
//! The canonical form sorts sections and keys (repeated `member` entries keep
//! their order) and strips comments and whitespace, so the digest is stable
//! under reformatting but changes with any semantic edit.

use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

/// The only key allowed to repeat within a section.
const REPEATABLE_KEY: &str = "member";

#[derive(Debug, Clone, Default)]
pub struct Config {
    /// section -> entries in file order (repeats only for `member`).
    sections: BTreeMap<String, Vec<(String, String)>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = match raw.split_once('#') {
                Some((before, _)) => before,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        Error::Config(format!("line {lineno}: unterminated section header '{raw}'"))
                    })?
                    .trim();
                if name.is_empty() {
                    return Err(Error::Config(format!("line {lineno}: empty section name")));
                }
                current = name.to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {lineno}: expected 'key = value', got '{raw}'"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(Error::Config(format!("line {lineno}: empty key")));
            }
            if current.is_empty() {
                return Err(Error::Config(format!(
                    "line {lineno}: entry '{key}' before any [section] header"
                )));
            }
            let entries = sections.get_mut(&current).unwrap();
            if key != REPEATABLE_KEY && entries.iter().any(|(k, _)| k == key) {
                return Err(Error::Config(format!(
                    "line {lineno}: duplicate key '{key}' in section [{current}]"
                )));
            }
            entries.push((key.to_string(), value.to_string()));
        }
        Ok(Self { sections })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingInput(path.display().to_string()));
        }
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    pub fn section_names(&self) -> Vec<&str> {
        self.sections.keys().map(String::as_str).collect()
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)?
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// All values of a repeated key, in file order.
    pub fn get_all(&self, section: &str, key: &str) -> Vec<&str> {
        self.sections
            .get(section)
            .map(|e| e.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect())
            .unwrap_or_default()
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key)
            .ok_or_else(|| Error::Config(format!("missing required key '{key}' in [{section}]")))
    }

    pub fn require_f64(&self, section: &str, key: &str) -> Result<f64> {
        let v = self.require(section, key)?;
        v.parse()
            .map_err(|_| Error::Config(format!("[{section}] {key}: not a number: '{v}'")))
    }

    pub fn get_f64(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("[{section}] {key}: not a number: '{v}'"))),
        }
    }

    pub fn require_usize(&self, section: &str, key: &str) -> Result<usize> {
        let v = self.require(section, key)?;
        v.parse()
            .map_err(|_| Error::Config(format!("[{section}] {key}: not a nonnegative integer: '{v}'")))
    }

    pub fn get_usize(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                Error::Config(format!("[{section}] {key}: not a nonnegative integer: '{v}'"))
            }),
        }
    }

    pub fn get_bool(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.get(section, key) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(Error::Config(format!(
                "[{section}] {key}: expected 'true' or 'false', got '{v}'"
            ))),
        }
    }

    /// Whitespace- or comma-separated list of numbers.
    pub fn get_f64_list(&self, section: &str, key: &str) -> Result<Vec<f64>> {
        let Some(v) = self.get(section, key) else {
            return Ok(Vec::new());
        };
        v.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| {
                    Error::Config(format!("[{section}] {key}: not a number in list: '{s}'"))
                })
            })
            .collect()
    }

    /// Canonical text: sorted sections, sorted keys (repeats kept in file
    /// order), single `key=value` per line. The digest hashes this form.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (name, entries) in &self.sections {
            out.push_str(&format!("[{name}]\n"));
            let mut sorted: Vec<&(String, String)> = entries.iter().collect();
            // stable sort: repeated `member` entries keep their file order
            sorted.sort_by(|a, b| a.0.cmp(&b.0));
            for (k, v) in sorted {
                out.push_str(&format!("{k}={v}\n"));
            }
        }
        out
    }

    /// SHA-256 hex digest of the canonical form.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# run configuration
[model]
a = 1.0
b = 10.0   # region D requires b^2 > 27 a c
c = 1.0

[grid]
n = 64
box_len = 48

[ensemble]
member = 0.5 uniaxial_power_tail alpha=0.01 delta=1
member = 0.5 uniaxial_power_tail alpha=0.02 delta=1
";

    #[test]
    fn parse_and_lookup() {
        let cfg = Config::parse(SAMPLE).unwrap();
        assert_eq!(cfg.require_f64("model", "a").unwrap(), 1.0);
        assert_eq!(cfg.require_usize("grid", "n").unwrap(), 64);
        assert_eq!(cfg.get("grid", "missing"), None);
        assert_eq!(cfg.get_f64("grid", "missing", 7.5).unwrap(), 7.5);
        assert!(cfg.require("model", "zeta").is_err());
        assert_eq!(cfg.get_all("ensemble", "member").len(), 2);
        assert!(cfg.has_section("model") && !cfg.has_section("fronts"));
    }

    #[test]
    fn parse_errors_name_the_line() {
        for (text, needle) in [
            ("a = 1", "before any [section]"),
            ("[s]\nnokey", "expected 'key = value'"),
            ("[s\nx = 1", "unterminated section"),
            ("[s]\nx = 1\nx = 2", "duplicate key 'x'"),
            ("[]\n", "empty section name"),
            ("[s]\n= 3", "empty key"),
        ] {
            match Config::parse(text) {
                Err(Error::Config(msg)) => {
                    assert!(msg.contains(needle), "'{msg}' should mention '{needle}'")
                }
                other => panic!("expected config error for {text:?}, got {other:?}"),
            }
        }
        // repeated member is legal
        assert!(Config::parse("[e]\nmember = x\nmember = y").is_ok());
    }

    #[test]
    fn typed_accessors() {
        let cfg = Config::parse("[s]\nflag = true\nbad = maybe\nlist = 1, 2.5 3\nnum = x").unwrap();
        assert!(cfg.get_bool("s", "flag", false).unwrap());
        assert!(cfg.get_bool("s", "missing", true).unwrap());
        assert!(cfg.get_bool("s", "bad", false).is_err());
        assert_eq!(cfg.get_f64_list("s", "list").unwrap(), vec![1.0, 2.5, 3.0]);
        assert!(cfg.require_f64("s", "num").is_err());
        assert!(cfg.get_f64_list("s", "missing").unwrap().is_empty());
    }

    #[test]
    fn digest_stable_under_reformatting() {
        let cfg = Config::parse(SAMPLE).unwrap();
        // same content: different ordering, spacing, comments
        let shuffled = "\
[grid]
box_len=48
n=64
[model]
c   =   1.0
b = 10.0
a = 1.0  # comment
[ensemble]
member = 0.5 uniaxial_power_tail alpha=0.01 delta=1
member = 0.5 uniaxial_power_tail alpha=0.02 delta=1
";
        let other = Config::parse(shuffled).unwrap();
        assert_eq!(cfg.digest(), other.digest());
        assert_eq!(cfg.digest().len(), 64);

        // any semantic change moves the digest
        let changed = Config::parse(&SAMPLE.replace("a = 1.0", "a = 2.0")).unwrap();
        assert_ne!(cfg.digest(), changed.digest());
        // member order is semantic (weights pair with sources)
        let swapped = Config::parse(
            "[ensemble]\nmember = 0.5 uniaxial_power_tail alpha=0.02 delta=1\n\
             member = 0.5 uniaxial_power_tail alpha=0.01 delta=1\n",
        )
        .unwrap();
        let original = Config::parse(
            "[ensemble]\nmember = 0.5 uniaxial_power_tail alpha=0.01 delta=1\n\
             member = 0.5 uniaxial_power_tail alpha=0.02 delta=1\n",
        )
        .unwrap();
        assert_ne!(swapped.digest(), original.digest());
    }
}
