//! CVSS v3.1 base scoring.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{
    AttackComplexity, AttackVector, CvssVector, ImpactLevel, PrivilegesRequired, Scope, UserInteraction,
};

/// Qualitative severity band, ordered from `None` up to `Critical`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rating {
    None,
    Low,
    Medium,
    High,
    Critical,
}

impl Rating {
    pub const ALL: [Rating; 5] = [Rating::None, Rating::Low, Rating::Medium, Rating::High, Rating::Critical];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Rating> {
        Rating::ALL.get(i).copied()
    }

    /// Band of a base score: 0 None, 0.1–3.9 Low, 4.0–6.9 Medium,
    /// 7.0–8.9 High, 9.0–10.0 Critical.
    pub fn from_base(base: f64) -> Rating {
        if base <= 0.0 {
            Rating::None
        } else if base < 4.0 {
            Rating::Low
        } else if base < 7.0 {
            Rating::Medium
        } else if base < 9.0 {
            Rating::High
        } else {
            Rating::Critical
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rating::None => "None",
            Rating::Low => "Low",
            Rating::Medium => "Medium",
            Rating::High => "High",
            Rating::Critical => "Critical",
        }
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rating {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rating::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown rating {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreTriple {
    /// Rounded half-up to one decimal.
    pub exploitability: f64,
    /// Rounded half-up to one decimal, floored at 0.
    pub impact: f64,
    pub base: f64,
    pub rating: Rating,
}

fn av_weight(v: AttackVector) -> f64 {
    match v {
        AttackVector::Network => 0.85,
        AttackVector::Adjacent => 0.62,
        AttackVector::Local => 0.55,
        AttackVector::Physical => 0.2,
    }
}

fn ac_weight(v: AttackComplexity) -> f64 {
    match v {
        AttackComplexity::Low => 0.77,
        AttackComplexity::High => 0.44,
    }
}

fn pr_weight(v: PrivilegesRequired, scope: Scope) -> f64 {
    let changed = scope == Scope::Changed;
    match v {
        PrivilegesRequired::None => 0.85,
        PrivilegesRequired::Low if changed => 0.68,
        PrivilegesRequired::Low => 0.62,
        PrivilegesRequired::High if changed => 0.5,
        PrivilegesRequired::High => 0.27,
    }
}

fn ui_weight(v: UserInteraction) -> f64 {
    match v {
        UserInteraction::None => 0.85,
        UserInteraction::Required => 0.62,
    }
}

fn cia_weight(v: ImpactLevel) -> f64 {
    match v {
        ImpactLevel::High => 0.56,
        ImpactLevel::Low => 0.22,
        ImpactLevel::None => 0.0,
    }
}

/// Round up to one decimal, computed on an integer scale so that values
/// like 4.000000000000001 do not become 4.1.
pub fn roundup(x: f64) -> f64 {
    let i = (x * 100_000.0).round() as i64;
    if i % 10_000 == 0 {
        i as f64 / 100_000.0
    } else {
        (i.div_euclid(10_000) + 1) as f64 / 10.0
    }
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Impact sub-score base: 1 − (1−C)(1−I)(1−A).
pub fn iss(v: &CvssVector) -> f64 {
    1.0 - (1.0 - cia_weight(v.conf)) * (1.0 - cia_weight(v.integ)) * (1.0 - cia_weight(v.avail))
}

/// Unrounded exploitability: 8.22 · AV · AC · PR · UI.
pub fn exploitability_score(v: &CvssVector) -> f64 {
    8.22 * av_weight(v.av) * ac_weight(v.ac) * pr_weight(v.pr, v.scope) * ui_weight(v.ui)
}

/// Unrounded impact; may be slightly negative for changed scope with no
/// C/I/A impact.
pub fn impact_score(v: &CvssVector) -> f64 {
    let iss = iss(v);
    match v.scope {
        Scope::Unchanged => 6.42 * iss,
        Scope::Changed => 7.52 * (iss - 0.029) - 3.25 * (iss - 0.02).powi(15),
    }
}

pub fn base_score(v: &CvssVector) -> ScoreTriple {
    let impact = impact_score(v);
    let expl = exploitability_score(v);
    let base = if impact <= 0.0 {
        0.0
    } else {
        match v.scope {
            Scope::Unchanged => roundup((impact + expl).min(10.0)),
            Scope::Changed => roundup((1.08 * (impact + expl)).min(10.0)),
        }
    };
    ScoreTriple {
        exploitability: round1(expl),
        impact: round1(impact.max(0.0)),
        base,
        rating: Rating::from_base(base),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> CvssVector {
        s.parse().unwrap()
    }

    #[test]
    fn critical_reference() {
        let s = base_score(&v("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"));
        assert_eq!((s.exploitability, s.impact, s.base, s.rating), (3.9, 5.9, 9.8, Rating::Critical));
    }

    #[test]
    fn no_impact_is_zero() {
        for scope in ["U", "C"] {
            let s = base_score(&v(&format!("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:{scope}/C:N/I:N/A:N")));
            assert_eq!((s.base, s.impact, s.rating), (0.0, 0.0, Rating::None));
        }
    }

    #[test]
    fn roundup_integer_rule() {
        assert_eq!(roundup(4.0), 4.0);
        assert_eq!(roundup(4.000000000000001), 4.0);
        assert_eq!(roundup(4.02), 4.1);
        assert_eq!(roundup(0.0), 0.0);
        assert_eq!(roundup(9.99), 10.0);
    }

    #[test]
    fn bands() {
        let cases = [(0.0, Rating::None), (0.1, Rating::Low), (3.9, Rating::Low), (4.0, Rating::Medium)];
        for (b, r) in cases {
            assert_eq!(Rating::from_base(b), r);
        }
        assert_eq!(Rating::from_base(6.9), Rating::Medium);
        assert_eq!(Rating::from_base(7.0), Rating::High);
        assert_eq!(Rating::from_base(8.9), Rating::High);
        assert_eq!(Rating::from_base(9.0), Rating::Critical);
        assert_eq!(Rating::from_base(10.0), Rating::Critical);
    }
}
