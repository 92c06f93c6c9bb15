use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{argument, Result};
use crate::multi_index::MAX_DIM;

/// Partition of the chart coordinates into base and fiber coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fibration {
    pub base: Vec<usize>,
    pub fiber: Vec<usize>,
}

/// An ordered list of named coordinates, optionally split by a fibration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<String>,
    split: Option<Fibration>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<Chart>> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_DIM {
            return Err(argument(format!("chart dimension {} exceeds {MAX_DIM}", names.len())));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !is_identifier(n) {
                return Err(argument(format!("coordinate name {n:?} is not an identifier")));
            }
            if !seen.insert(n.as_str()) {
                return Err(argument(format!("duplicate coordinate name {n:?}")));
            }
        }
        Ok(Arc::new(Chart { names, split: None }))
    }

    /// Chart with a fibration split given by coordinate names. The two lists
    /// must partition the coordinates.
    pub fn with_split<S: AsRef<str>>(names: Vec<String>, base: &[S], fiber: &[S]) -> Result<Arc<Chart>> {
        let chart = Chart::new(names)?;
        let lookup = |list: &[S]| -> Result<Vec<usize>> {
            list.iter()
                .map(|n| {
                    chart.index_of(n.as_ref()).ok_or_else(|| argument(format!("unknown coordinate {:?} in split", n.as_ref())))
                })
                .collect()
        };
        let base = lookup(base)?;
        let fiber = lookup(fiber)?;
        let mut all: Vec<usize> = base.iter().chain(&fiber).copied().collect();
        all.sort_unstable();
        if all != (0..chart.dim()).collect::<Vec<_>>() {
            return Err(argument("fibration split must partition the coordinates"));
        }
        let mut chart = (*chart).clone();
        chart.split = Some(Fibration { base, fiber });
        Ok(Arc::new(chart))
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn split(&self) -> Option<&Fibration> {
        self.split.as_ref()
    }
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_names_and_split() {
        assert!(Chart::new(["x", "x"]).is_err());
        assert!(Chart::new(["1x"]).is_err());
        let c = Chart::with_split(vec!["x".into(), "y".into(), "p".into()], &["x", "y"], &["p"]).unwrap();
        assert_eq!(c.split().unwrap().fiber, vec![2]);
        assert!(Chart::with_split(vec!["x".into(), "p".into()], &["x"], &["x"]).is_err());
        assert!(Chart::with_split(vec!["x".into(), "p".into()], &["x"], &["q"]).is_err());
    }
}
