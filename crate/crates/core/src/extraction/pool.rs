use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ExtractionError;
use crate::graver::SearchBox;
use crate::model::Problem;

/// Deduplicated, negation-closed set of nonzero kernel directions inside a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionPool {
    n: usize,
    m: usize,
    search_box: SearchBox,
    directions: BTreeSet<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct PoolFile {
    n: usize,
    m: usize,
    #[serde(rename = "box")]
    search_box: SearchBox,
    directions: Vec<Vec<i64>>,
}

impl DirectionPool {
    pub fn new(n: usize, m: usize, search_box: SearchBox) -> Self {
        Self {
            n,
            m,
            search_box,
            directions: BTreeSet::new(),
        }
    }

    /// Pool over the difference box of `problem`.
    pub fn for_problem(problem: &Problem) -> Self {
        Self::new(problem.n(), problem.m(), problem.difference_box())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn search_box(&self) -> &SearchBox {
        &self.search_box
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn contains(&self, g: &[i64]) -> bool {
        self.directions.contains(g)
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.directions.iter()
    }

    /// Insert `g` and `−g`. Zero, wrong-length and out-of-box vectors are
    /// ignored. Returns whether anything new was added.
    pub fn insert_pair(&mut self, g: &[i64]) -> bool {
        if g.len() != self.n || g.iter().all(|&v| v == 0) || !self.search_box.contains(g) {
            return false;
        }
        let neg: Vec<i64> = g.iter().map(|&v| -v).collect();
        let a = self.directions.insert(g.to_vec());
        let b = self.directions.insert(neg);
        a || b
    }

    /// Kernel membership of every member against `problem`, plus matching
    /// dimensions.
    pub fn check_compatible(&self, problem: &Problem) -> Result<(), ExtractionError> {
        if self.n != problem.n() || self.m != problem.m() {
            return Err(ExtractionError::PoolMismatch(format!(
                "pool is for (n, m) = ({}, {}), instance has ({}, {})",
                self.n,
                self.m,
                problem.n(),
                problem.m()
            )));
        }
        if let Some(g) = self.directions.iter().find(|g| !problem.in_kernel(g)) {
            return Err(ExtractionError::PoolMismatch(format!(
                "direction {g:?} is not in the kernel of the instance matrix"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = PoolFile {
            n: self.n,
            m: self.m,
            search_box: self.search_box.clone(),
            directions: self.directions.iter().cloned().collect(),
        };
        serde_json::to_string_pretty(&file).expect("pool serialization cannot fail")
    }

    /// Parse a pool file. Members are re-validated against the stored box and
    /// the set is re-closed under negation.
    pub fn from_json(text: &str) -> Result<Self, ExtractionError> {
        let file: PoolFile =
            serde_json::from_str(text).map_err(|e| ExtractionError::PoolFormat(e.to_string()))?;
        if file.search_box.dim() != file.n {
            return Err(ExtractionError::PoolFormat(format!(
                "box has dimension {} but n = {}",
                file.search_box.dim(),
                file.n
            )));
        }
        let mut pool = Self::new(file.n, file.m, file.search_box);
        for g in &file.directions {
            if g.len() != pool.n || g.iter().all(|&v| v == 0) || !pool.search_box.contains(g) {
                return Err(ExtractionError::PoolFormat(format!(
                    "invalid direction {g:?}"
                )));
            }
            pool.insert_pair(g);
        }
        Ok(pool)
    }
}

impl<'a> IntoIterator for &'a DirectionPool {
    type Item = &'a Vec<i64>;
    type IntoIter = std::collections::btree_set::Iter<'a, Vec<i64>>;

    fn into_iter(self) -> Self::IntoIter {
        self.directions.iter()
    }
}
