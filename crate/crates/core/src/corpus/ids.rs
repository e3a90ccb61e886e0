use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {kind} identifier {value:?}")]
pub struct IdError {
    pub kind: &'static str,
    pub value: String,
}

/// A CVE identifier of the form `CVE-YYYY-NNNN` (four or more sequence digits).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CveId(String);

impl CveId {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn year(&self) -> u16 {
        self.0[4..8].parse().expect("validated on construction")
    }
}

impl FromStr for CveId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || IdError {
            kind: "CVE",
            value: s.to_string(),
        };
        let rest = s.strip_prefix("CVE-").ok_or_else(err)?;
        let (year, seq) = rest.split_once('-').ok_or_else(err)?;
        let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        if year.len() != 4 || !digits(year) || seq.len() < 4 || !digits(seq) {
            return Err(err());
        }
        Ok(CveId(s.to_string()))
    }
}

impl TryFrom<String> for CveId {
    type Error = IdError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<CveId> for String {
    fn from(id: CveId) -> Self {
        id.0
    }
}

impl fmt::Display for CveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A CWE identifier, `CWE-<digits>`. Ordering is numeric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CweId(u32);

impl CweId {
    pub fn new(number: u32) -> Self {
        CweId(number)
    }

    pub fn number(self) -> u32 {
        self.0
    }

    /// Canonical definition page on the MITRE site.
    pub fn catalog_url(self) -> String {
        format!("https://cwe.mitre.org/data/definitions/{}.html", self.0)
    }

    /// Accepts both `CWE-203` and a bare `203` (as found in the catalog CSV).
    pub fn parse_lenient(s: &str) -> Result<Self, IdError> {
        let t = s.trim();
        if !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()) {
            return t.parse::<u32>().map(CweId).map_err(|_| IdError {
                kind: "CWE",
                value: s.to_string(),
            });
        }
        t.parse()
    }
}

impl FromStr for CweId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || IdError {
            kind: "CWE",
            value: s.to_string(),
        };
        let digits = s.strip_prefix("CWE-").ok_or_else(err)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        digits.parse().map(CweId).map_err(|_| err())
    }
}

impl TryFrom<String> for CweId {
    type Error = IdError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<CweId> for String {
    fn from(id: CweId) -> Self {
        id.to_string()
    }
}

impl fmt::Display for CweId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CWE-{}", self.0)
    }
}
