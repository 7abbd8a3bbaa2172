//! Per-node class vectors and train/validation/test roles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{to_id, NodeId, NodeIdMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    /// Exactly one class per node.
    SingleClass,
    /// Any subset of classes per node, including none.
    MultiClass,
}

/// Binary class vectors stored sparsely: each row keeps the sorted indices of
/// its set entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    num_classes: usize,
    mode: LabelMode,
    offsets: Vec<usize>,
    classes: Vec<u32>,
}

impl LabelMatrix {
    /// Build from per-node class index lists. Duplicate indices within a row
    /// collapse, since rows are binary.
    pub fn from_rows<R, I>(rows: R, num_classes: usize, mode: LabelMode) -> Result<Self>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = u32>,
    {
        let mut offsets = vec![0];
        let mut classes = Vec::new();
        for (v, row) in rows.into_iter().enumerate() {
            let start = classes.len();
            classes.extend(row);
            let slot = &mut classes[start..];
            slot.sort_unstable();
            let mut w = start;
            for r in start..classes.len() {
                if r == start || classes[r] != classes[w - 1] {
                    classes[w] = classes[r];
                    w += 1;
                }
            }
            classes.truncate(w);
            let row = &classes[start..];
            if let Some(&c) = row.last() {
                if c as usize >= num_classes {
                    return Err(Error::InvalidInput(format!(
                        "node {v}: class {c} out of range (num_classes = {num_classes})"
                    )));
                }
            }
            if mode == LabelMode::SingleClass && row.len() != 1 {
                return Err(Error::InvalidInput(format!(
                    "node {v}: single-class labels need exactly one class, found {}",
                    row.len()
                )));
            }
            offsets.push(classes.len());
        }
        Ok(Self {
            num_classes,
            mode,
            offsets,
            classes,
        })
    }

    /// Single-class labels from one class index per node.
    pub fn single_class(classes: &[u32], num_classes: usize) -> Result<Self> {
        Self::from_rows(
            classes.iter().map(|&c| [c]),
            num_classes,
            LabelMode::SingleClass,
        )
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn mode(&self) -> LabelMode {
        self.mode
    }

    /// Sorted indices of the classes set on node `v`.
    pub fn row(&self, v: usize) -> &[u32] {
        &self.classes[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Row `v` as a dense 0/1 vector of length `num_classes`.
    pub fn dense_row(&self, v: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.num_classes];
        for &c in self.row(v) {
            out[c as usize] = 1.0;
        }
        out
    }

    /// Euclidean distance between the class vectors of `v` and `u`.
    ///
    /// For binary vectors this is the square root of the symmetric
    /// difference size, so it is exact and agrees bit-for-bit with the dense
    /// computation.
    #[inline]
    pub fn distance(&self, v: usize, u: usize) -> f64 {
        let a = self.row(v);
        let b = self.row(u);
        let (mut i, mut j, mut common) = (0, 0, 0usize);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    common += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        ((a.len() + b.len() - 2 * common) as f64).sqrt()
    }

    /// Rows of the retained nodes, in new-id order.
    pub fn remap(&self, map: &NodeIdMap) -> LabelMatrix {
        let mut offsets = vec![0];
        let mut classes = Vec::new();
        for &old in map.inverse() {
            classes.extend_from_slice(self.row(old as usize));
            offsets.push(classes.len());
        }
        LabelMatrix {
            num_classes: self.num_classes,
            mode: self.mode,
            offsets,
            classes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Train,
    Val,
    Test,
    /// Removed from training but kept in the graph for inference.
    Dropped,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Train => "train",
            Role::Val => "val",
            Role::Test => "test",
            Role::Dropped => "drop",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Role::Train),
            "val" => Ok(Role::Val),
            "test" => Ok(Role::Test),
            "drop" => Ok(Role::Dropped),
            other => Err(Error::InvalidInput(format!(
                "unknown split role {other:?} (expected train, val, test or drop)"
            ))),
        }
    }
}

/// One role per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMask {
    roles: Vec<Role>,
}

impl SplitMask {
    pub fn new(roles: Vec<Role>) -> Self {
        Self { roles }
    }

    pub fn all_train(num_nodes: usize) -> Self {
        Self::new(vec![Role::Train; num_nodes])
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn role(&self, v: usize) -> Role {
        self.roles[v]
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn is_train(&self, v: usize) -> bool {
        self.roles[v] == Role::Train
    }

    /// Training nodes in ascending id order.
    pub fn training_nodes(&self) -> Vec<NodeId> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == Role::Train)
            .map(|(v, _)| to_id(v))
            .collect()
    }

    pub fn count(&self, role: Role) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }

    pub fn remap(&self, map: &NodeIdMap) -> SplitMask {
        SplitMask::new(
            map.inverse()
                .iter()
                .map(|&o| self.roles[o as usize])
                .collect(),
        )
    }
}
