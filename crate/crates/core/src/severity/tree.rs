//! GINI decision tree over one-hot CVSS features.
//!
//! Growth is best-first: among all expandable leaves the one whose split
//! removes the most weighted impurity is expanded next (earliest-created
//! leaf on ties), until no leaf can be split or `max_leaf_nodes` is reached.
//! Split quality is compared as exact rationals so that ties are real ties.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::onehot::{encode, OneHotMatrix};
use super::score::Rating;
use super::SeverityError;
use crate::corpus::CvssVector;

pub const N_CLASSES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub max_leaf_nodes: usize,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { max_depth: 6, max_leaf_nodes: 32, min_samples_split: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Internal {
        split_column: usize,
        /// Child for rows where the column bit is 0.
        left: usize,
        /// Child for rows where the column bit is 1.
        right: usize,
        gini: f64,
        samples: usize,
        histogram: [usize; N_CLASSES],
        depth: usize,
    },
    Leaf {
        label: Rating,
        gini: f64,
        samples: usize,
        histogram: [usize; N_CLASSES],
        depth: usize,
    },
}

impl Node {
    pub fn gini(&self) -> f64 {
        match self {
            Node::Internal { gini, .. } | Node::Leaf { gini, .. } => *gini,
        }
    }

    pub fn samples(&self) -> usize {
        match self {
            Node::Internal { samples, .. } | Node::Leaf { samples, .. } => *samples,
        }
    }

    pub fn histogram(&self) -> [usize; N_CLASSES] {
        match self {
            Node::Internal { histogram, .. } | Node::Leaf { histogram, .. } => *histogram,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Internal { depth, .. } | Node::Leaf { depth, .. } => *depth,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub config: TreeConfig,
    pub column_names: Vec<String>,
    /// Root is node 0.
    pub nodes: Vec<Node>,
}

pub fn gini(hist: &[usize; N_CLASSES]) -> f64 {
    let n: usize = hist.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - hist.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Most frequent class; ties go to the lower rating.
pub fn modal_label(hist: &[usize; N_CLASSES]) -> Rating {
    let mut best = 0;
    for (i, &c) in hist.iter().enumerate() {
        if c > hist[best] {
            best = i;
        }
    }
    Rating::ALL[best]
}

fn sum_sq(hist: &[usize; N_CLASSES]) -> u128 {
    hist.iter().map(|&c| (c as u128) * (c as u128)).sum()
}

/// Impurity decrease of a split, scaled by the node size, as a fraction
/// `num / den`: ΣcL²/nL + ΣcR²/nR − Σc²/n.
#[derive(Debug, Clone, Copy)]
struct Gain {
    num: i128,
    den: i128,
}

impl Gain {
    fn cmp(&self, other: &Gain) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

#[derive(Debug, Clone, Copy)]
struct Split {
    column: usize,
    gain: Gain,
}

fn histogram(idx: &[usize], labels: &[Rating]) -> [usize; N_CLASSES] {
    let mut h = [0; N_CLASSES];
    for &i in idx {
        h[labels[i].index()] += 1;
    }
    h
}

fn best_split(idx: &[usize], rows: &[u32], labels: &[Rating], n_cols: usize) -> Option<Split> {
    let n = idx.len() as i128;
    let parent = histogram(idx, labels);
    let c = sum_sq(&parent) as i128;
    let mut best: Option<(usize, i128, i128)> = None; // column, S numerator, S denominator
    for col in 0..n_cols {
        let mut right = [0usize; N_CLASSES];
        for &i in idx {
            if rows[i] >> col & 1 == 1 {
                right[labels[i].index()] += 1;
            }
        }
        let nr: usize = right.iter().sum();
        let nl = idx.len() - nr;
        if nl == 0 || nr == 0 {
            continue;
        }
        let mut left = parent;
        for k in 0..N_CLASSES {
            left[k] -= right[k];
        }
        let (nl, nr) = (nl as i128, nr as i128);
        let s_num = sum_sq(&left) as i128 * nr + sum_sq(&right) as i128 * nl;
        let s_den = nl * nr;
        // must strictly beat the unsplit node: S > Σc²/n
        if s_num * n <= c * s_den {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, bn, bd)) => s_num * bd > bn * s_den,
        };
        if better {
            best = Some((col, s_num, s_den));
        }
    }
    best.map(|(column, s_num, s_den)| Split {
        column,
        gain: Gain { num: s_num * n - c * s_den, den: s_den * n },
    })
}

struct Pending {
    node: usize,
    idx: Vec<usize>,
    split: Split,
}

pub fn train_tree(
    features: &OneHotMatrix,
    labels: &[Rating],
    config: TreeConfig,
) -> Result<DecisionTree, SeverityError> {
    if features.len() != labels.len() {
        return Err(SeverityError::LabelMismatch { rows: features.len(), labels: labels.len() });
    }
    if features.len() < 2 {
        return Err(SeverityError::TooFewSamples(features.len()));
    }
    let rows = &features.rows;
    let n_cols = features.n_columns();
    let mut nodes: Vec<Node> = Vec::new();
    let mut frontier: Vec<Pending> = Vec::new();

    let make_leaf = |idx: &[usize], depth: usize| {
        let h = histogram(idx, labels);
        Node::Leaf { label: modal_label(&h), gini: gini(&h), samples: idx.len(), histogram: h, depth }
    };
    let consider = |node: usize, idx: Vec<usize>, depth: usize, frontier: &mut Vec<Pending>| {
        let h = histogram(&idx, labels);
        let pure = h.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= config.max_depth || idx.len() < config.min_samples_split {
            return;
        }
        if let Some(split) = best_split(&idx, rows, labels, n_cols) {
            frontier.push(Pending { node, idx, split });
        }
    };

    let all: Vec<usize> = (0..features.len()).collect();
    nodes.push(make_leaf(&all, 0));
    consider(0, all, 0, &mut frontier);
    let mut leaves = 1;

    while leaves < config.max_leaf_nodes && !frontier.is_empty() {
        // largest gain; on ties the earliest-created node
        let mut pick = 0;
        for (i, p) in frontier.iter().enumerate().skip(1) {
            let ord = p.split.gain.cmp(&frontier[pick].split.gain);
            if ord == Ordering::Greater || (ord == Ordering::Equal && p.node < frontier[pick].node) {
                pick = i;
            }
        }
        let Pending { node, idx, split } = frontier.swap_remove(pick);
        let depth = nodes[node].depth();
        let (r, l): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| rows[i] >> split.column & 1 == 1);
        let left = nodes.len();
        nodes.push(make_leaf(&l, depth + 1));
        let right = nodes.len();
        nodes.push(make_leaf(&r, depth + 1));
        let h = nodes[node].histogram();
        nodes[node] = Node::Internal {
            split_column: split.column,
            left,
            right,
            gini: gini(&h),
            samples: idx.len(),
            histogram: h,
            depth,
        };
        leaves += 1;
        consider(left, l, depth + 1, &mut frontier);
        consider(right, r, depth + 1, &mut frontier);
    }

    Ok(DecisionTree { config, column_names: features.column_names.clone(), nodes })
}

impl DecisionTree {
    pub fn predict_row(&self, row: u32) -> Rating {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label, .. } => return *label,
                Node::Internal { split_column, left, right, .. } => {
                    at = if row >> split_column & 1 == 1 { *right } else { *left };
                }
            }
        }
    }

    pub fn predict(&self, v: &CvssVector) -> Rating {
        self.predict_row(encode(v))
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(Node::depth).max().unwrap_or(0)
    }

    /// Indented text, one node per line.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        self.write_node(&mut out, 0, "root");
        out
    }

    fn write_node(&self, out: &mut String, at: usize, edge: &str) {
        let node = &self.nodes[at];
        let indent = "  ".repeat(node.depth());
        let counts = Rating::ALL
            .iter()
            .zip(node.histogram())
            .map(|(r, c)| format!("{r}:{c}"))
            .collect::<Vec<_>>()
            .join(" ");
        let head = format!(
            "{indent}{edge} gini={:.4} samples={} [{counts}]",
            node.gini(),
            node.samples()
        );
        match node {
            Node::Leaf { label, .. } => {
                let _ = writeln!(out, "{head} -> {label}");
            }
            Node::Internal { split_column, left, right, .. } => {
                let name = &self.column_names[*split_column];
                let _ = writeln!(out, "{head} split {name}");
                self.write_node(out, *left, &format!("{name}=0"));
                self.write_node(out, *right, &format!("{name}=1"));
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }

    pub fn from_json(s: &str) -> Result<DecisionTree, SeverityError> {
        let tree: DecisionTree =
            serde_json::from_str(s).map_err(|e| SeverityError::BadTree(e.to_string()))?;
        tree.check()?;
        Ok(tree)
    }

    fn check(&self) -> Result<(), SeverityError> {
        if self.nodes.is_empty() {
            return Err(SeverityError::BadTree("no nodes".into()));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::Internal { split_column, left, right, .. } = n {
                let ok = *split_column < self.column_names.len()
                    && *split_column < 32
                    && *left > i
                    && *right > i
                    && *left < self.nodes.len()
                    && *right < self.nodes.len();
                if !ok {
                    return Err(SeverityError::BadTree(format!("node {i} has invalid links")));
                }
            }
        }
        Ok(())
    }
}
