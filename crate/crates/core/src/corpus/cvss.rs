//! CVSS v3.x base vectors: the eight base metrics and their canonical string form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CvssParseError {
    #[error("vector must start with CVSS:3.0/ or CVSS:3.1/")]
    BadPrefix,
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("metric {0} given more than once")]
    Duplicate(&'static str),
}

macro_rules! metric_enum {
    ($name:ident, $abbr:literal, [$($variant:ident = $code:literal),+ $(,)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub const ABBR: &'static str = $abbr;

            pub fn code(self) -> char {
                match self {
                    $($name::$variant => $code),+
                }
            }

            fn from_code(code: &str) -> Option<Self> {
                match code {
                    $(c if c.len() == 1 && c.starts_with($code) => Some($name::$variant),)+
                    _ => None,
                }
            }
        }
    };
}

metric_enum!(AttackVector, "AV", [Network = 'N', Adjacent = 'A', Local = 'L', Physical = 'P']);
metric_enum!(AttackComplexity, "AC", [Low = 'L', High = 'H']);
metric_enum!(PrivilegesRequired, "PR", [None = 'N', Low = 'L', High = 'H']);
metric_enum!(UserInteraction, "UI", [None = 'N', Required = 'R']);
metric_enum!(Scope, "S", [Unchanged = 'U', Changed = 'C']);
metric_enum!(ImpactLevel, "CIA", [High = 'H', Low = 'L', None = 'N']);

/// A complete CVSS v3.1 base vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CvssVector {
    pub av: AttackVector,
    pub ac: AttackComplexity,
    pub pr: PrivilegesRequired,
    pub ui: UserInteraction,
    pub scope: Scope,
    pub conf: ImpactLevel,
    pub integ: ImpactLevel,
    pub avail: ImpactLevel,
}

/// The eight base metrics in canonical order.
pub const METRIC_NAMES: [&str; 8] = ["AV", "AC", "PR", "UI", "S", "C", "I", "A"];

impl CvssVector {
    /// Canonical `CVSS:3.1/AV:_/AC:_/PR:_/UI:_/S:_/C:_/I:_/A:_` rendering.
    pub fn canonical_string(&self) -> String {
        self.to_string()
    }

    /// Single-letter value codes in canonical metric order.
    pub fn codes(&self) -> [char; 8] {
        [
            self.av.code(),
            self.ac.code(),
            self.pr.code(),
            self.ui.code(),
            self.scope.code(),
            self.conf.code(),
            self.integ.code(),
            self.avail.code(),
        ]
    }

    /// Every legal base vector (4·2·3·2·2·3·3·3 = 2592 of them).
    pub fn all() -> impl Iterator<Item = CvssVector> {
        let mut out = Vec::with_capacity(2592);
        for &av in AttackVector::ALL {
            for &ac in AttackComplexity::ALL {
                for &pr in PrivilegesRequired::ALL {
                    for &ui in UserInteraction::ALL {
                        for &scope in Scope::ALL {
                            for &conf in ImpactLevel::ALL {
                                for &integ in ImpactLevel::ALL {
                                    for &avail in ImpactLevel::ALL {
                                        out.push(CvssVector {
                                            av,
                                            ac,
                                            pr,
                                            ui,
                                            scope,
                                            conf,
                                            integ,
                                            avail,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out.into_iter()
    }
}

impl fmt::Display for CvssVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CVSS:3.1")?;
        for (name, code) in METRIC_NAMES.iter().zip(self.codes()) {
            write!(f, "/{name}:{code}")?;
        }
        Ok(())
    }
}

impl FromStr for CvssVector {
    type Err = CvssParseError;

    /// Parses a v3.0 or v3.1 base vector; metric order in the input is irrelevant.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s
            .strip_prefix("CVSS:3.1/")
            .or_else(|| s.strip_prefix("CVSS:3.0/"))
            .ok_or(CvssParseError::BadPrefix)?;

        let mut slots: [Option<char>; 8] = [None; 8];
        let mut raw: [&str; 8] = [""; 8];
        for pair in body.split('/') {
            let (metric, value) = pair
                .split_once(':')
                .ok_or_else(|| CvssParseError::UnknownToken(pair.to_string()))?;
            let idx = METRIC_NAMES
                .iter()
                .position(|m| *m == metric)
                .ok_or_else(|| CvssParseError::UnknownToken(metric.to_string()))?;
            if slots[idx].is_some() {
                return Err(CvssParseError::Duplicate(METRIC_NAMES[idx]));
            }
            slots[idx] = Some(' ');
            raw[idx] = value;
        }
        if let Some(i) = slots.iter().position(Option::is_none) {
            return Err(CvssParseError::Missing(METRIC_NAMES[i]));
        }

        fn get<T>(raw: &str, metric: &str, f: fn(&str) -> Option<T>) -> Result<T, CvssParseError> {
            f(raw).ok_or_else(|| CvssParseError::UnknownToken(format!("{metric}:{raw}")))
        }
        Ok(CvssVector {
            av: get(raw[0], "AV", AttackVector::from_code)?,
            ac: get(raw[1], "AC", AttackComplexity::from_code)?,
            pr: get(raw[2], "PR", PrivilegesRequired::from_code)?,
            ui: get(raw[3], "UI", UserInteraction::from_code)?,
            scope: get(raw[4], "S", Scope::from_code)?,
            conf: get(raw[5], "C", ImpactLevel::from_code)?,
            integ: get(raw[6], "I", ImpactLevel::from_code)?,
            avail: get(raw[7], "A", ImpactLevel::from_code)?,
        })
    }
}

impl TryFrom<String> for CvssVector {
    type Error = CvssParseError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<CvssVector> for String {
    fn from(v: CvssVector) -> Self {
        v.to_string()
    }
}
