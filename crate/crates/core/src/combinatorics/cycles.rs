//! Even-cycle classes as rooted plane trees.
//!
//! A class of even cycles of length `2l` is represented by a rooted plane tree
//! with `l` edges; its closed Euler tour `i_0, ..., i_{2l}` (with
//! `i_{2l} = i_0`) is the canonical cycle. A vertex has multiplicity `t` when
//! it occupies `t` of the `2l + 1` tour positions, the root counting at both
//! ends. `b_{l,t}` totals the vertices of multiplicity `t` over all classes.

use num_bigint::BigUint;

use super::{binomial, ln_biguint};
use crate::error::{Error, Result};

/// Default largest `l` for enumeration (`C_12 = 208012` trees).
pub const DEFAULT_CYCLE_CAP: usize = 12;
/// Hard limit on the configurable cap.
pub const MAX_CYCLE_CAP: usize = 15;

/// Multiplicity counts for one `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleClassTable {
    pub l: usize,
    /// `b[t - 1] = b_{l,t}` for `t = 1..=l+1`.
    pub b: Vec<u64>,
    pub class_count: u64,
}

impl CycleClassTable {
    pub fn b(&self, t: usize) -> u64 {
        if t == 0 || t > self.b.len() {
            0
        } else {
            self.b[t - 1]
        }
    }
}

pub fn enumerate_cycle_classes(l: usize) -> Result<CycleClassTable> {
    enumerate_cycle_classes_capped(l, DEFAULT_CYCLE_CAP)
}

/// Enumerates all Dyck words of length `2l` (up = descend to a new child,
/// down = return to the parent), walks each tour and counts visits per vertex.
pub fn enumerate_cycle_classes_capped(l: usize, cap: usize) -> Result<CycleClassTable> {
    let cap = cap.min(MAX_CYCLE_CAP);
    if l == 0 || l > cap {
        return Err(Error::EnumerationCap { l, cap });
    }
    let mut b = vec![0u64; l + 1];
    let mut class_count = 0u64;
    let mut word = vec![false; 2 * l];
    let mut visits = vec![0usize; l + 1];
    let mut stack = Vec::with_capacity(l + 1);
    for_each_dyck_word(&mut word, 0, 0, 0, l, &mut |w| {
        class_count += 1;
        visits.iter_mut().for_each(|v| *v = 0);
        stack.clear();
        stack.push(0usize);
        visits[0] = 1;
        let mut next_vertex = 1;
        for &up in w.iter() {
            if up {
                stack.push(next_vertex);
                next_vertex += 1;
            } else {
                stack.pop();
            }
            visits[*stack.last().expect("tour never leaves the root")] += 1;
        }
        for &t in &visits {
            b[t - 1] += 1;
        }
    });
    Ok(CycleClassTable { l, b, class_count })
}

fn for_each_dyck_word(
    word: &mut [bool],
    pos: usize,
    ups: usize,
    depth: usize,
    l: usize,
    visit: &mut impl FnMut(&[bool]),
) {
    if pos == word.len() {
        visit(word);
        return;
    }
    if ups < l {
        word[pos] = true;
        for_each_dyck_word(word, pos + 1, ups + 1, depth + 1, l, visit);
    }
    if depth > 0 {
        word[pos] = false;
        for_each_dyck_word(word, pos + 1, ups, depth - 1, l, visit);
    }
}

/// Tables for `l = 1..=max_l`, built once and shared read-only.
#[derive(Clone, Debug)]
pub struct BTables {
    tables: Vec<CycleClassTable>,
}

impl BTables {
    pub fn build(max_l: usize) -> Result<Self> {
        Self::build_capped(max_l, DEFAULT_CYCLE_CAP)
    }

    pub fn build_capped(max_l: usize, cap: usize) -> Result<Self> {
        let tables = (1..=max_l).map(|l| enumerate_cycle_classes_capped(l, cap)).collect::<Result<_>>()?;
        Ok(Self { tables })
    }

    pub fn max_l(&self) -> usize {
        self.tables.len()
    }

    pub fn table(&self, l: usize) -> Option<&CycleClassTable> {
        l.checked_sub(1).and_then(|i| self.tables.get(i))
    }

    /// `b_{l,t}`; panics if `l` is outside the built range.
    pub fn b(&self, l: usize, t: usize) -> u64 {
        self.table(l).unwrap_or_else(|| panic!("b table for l = {l} not built")).b(t)
    }
}

#[derive(Clone, Debug)]
pub struct BsizesRow {
    pub t: usize,
    pub b: u64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

#[derive(Clone, Debug)]
pub struct BsizesReport {
    pub l: usize,
    pub rows: Vec<BsizesRow>,
}

impl BsizesReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.lower_holds && r.upper_holds)
    }
}

/// Checks `binom(2l+1-t, l) / (4l) <= b_{l,t} <= (l+1)^120 binom(2l+1-t, l)`.
/// The lower bound is compared exactly as `4l b >= binom`, the upper one in log space.
pub fn verify_bsizes(table: &CycleClassTable) -> BsizesReport {
    let l = table.l;
    let rows = (1..=l + 1)
        .map(|t| {
            let b = table.b(t);
            let binom = binomial((2 * l + 1 - t) as u64, l as u64);
            let lower_holds = BigUint::from(4 * l as u64) * BigUint::from(b) >= binom;
            let upper_holds = (b as f64).ln() <= 120.0 * ((l + 1) as f64).ln() + ln_biguint(&binom);
            BsizesRow { t, b, lower_holds, upper_holds }
        })
        .collect();
    BsizesReport { l, rows }
}
