use serde::{Deserialize, Serialize};

use crate::corpus::{
    AttackComplexity, AttackVector, CvssVector, ImpactLevel, PrivilegesRequired, Scope, UserInteraction, METRIC_NAMES,
};

pub const N_COLUMNS: usize = 22;

fn value_codes(metric: usize) -> Vec<char> {
    match metric {
        0 => AttackVector::ALL.iter().map(|v| v.code()).collect(),
        1 => AttackComplexity::ALL.iter().map(|v| v.code()).collect(),
        2 => PrivilegesRequired::ALL.iter().map(|v| v.code()).collect(),
        3 => UserInteraction::ALL.iter().map(|v| v.code()).collect(),
        4 => Scope::ALL.iter().map(|v| v.code()).collect(),
        _ => ImpactLevel::ALL.iter().map(|v| v.code()).collect(),
    }
}

/// `(metric index, value code)` for every column, in column order.
pub fn column_layout() -> Vec<(usize, char)> {
    (0..METRIC_NAMES.len())
        .flat_map(|m| value_codes(m).into_iter().map(move |c| (m, c)))
        .collect()
}

/// `"AV=N"`, `"AV=A"`, … in column order.
pub fn column_names() -> Vec<String> {
    column_layout()
        .into_iter()
        .map(|(m, c)| format!("{}={c}", METRIC_NAMES[m]))
        .collect()
}

/// One row as a bitmask; bit `j` is column `j`.
pub fn encode(v: &CvssVector) -> u32 {
    let codes = v.codes();
    column_layout()
        .iter()
        .enumerate()
        .filter(|(_, (m, c))| codes[*m] == *c)
        .fold(0u32, |acc, (j, _)| acc | (1 << j))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneHotMatrix {
    pub rows: Vec<u32>,
    pub column_names: Vec<String>,
}

impl OneHotMatrix {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row] >> col & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_columns(&self) -> usize {
        self.column_names.len()
    }
}

pub fn one_hot(vectors: &[CvssVector]) -> OneHotMatrix {
    OneHotMatrix {
        rows: vectors.iter().map(encode).collect(),
        column_names: column_names(),
    }
}
