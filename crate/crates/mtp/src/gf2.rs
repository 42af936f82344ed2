//! Bit-packed GF(2) rows and Gaussian elimination.
//!
//! Rows pack 64 columns per machine word. Elimination is column-major
//! with a pivot map, which keeps rank checks and attack solves in the
//! microsecond range for the matrix sizes the cipher produces.

/// A row vector over GF(2); column `c` lives in word `c / 64`, bit `c % 64`.
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct BitRow {
    words: Vec<u64>,
    ncols: usize,
}

impl BitRow {
    pub(crate) fn zero(ncols: usize) -> Self {
        BitRow {
            words: vec![0u64; ncols.div_ceil(64)],
            ncols,
        }
    }

    pub(crate) fn ncols(&self) -> usize {
        self.ncols
    }

    pub(crate) fn get(&self, col: usize) -> bool {
        debug_assert!(col < self.ncols);
        (self.words[col / 64] >> (col % 64)) & 1 == 1
    }

    pub(crate) fn set(&mut self, col: usize, value: bool) {
        debug_assert!(col < self.ncols);
        let mask = 1u64 << (col % 64);
        if value {
            self.words[col / 64] |= mask;
        } else {
            self.words[col / 64] &= !mask;
        }
    }

    pub(crate) fn xor_in(&mut self, other: &BitRow) {
        debug_assert_eq!(self.ncols, other.ncols);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Lowest set column, if any.
    pub(crate) fn leading_one(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }
}

/// Rank of a row list, plus the 0-based indices of rows that are XOR
/// combinations of earlier rows.
pub(crate) fn rank_with_dependents(rows: &[BitRow]) -> (usize, Vec<usize>) {
    let mut basis: Vec<BitRow> = Vec::new();
    let mut pivot_of: Vec<Option<usize>> = Vec::new(); // parallel to basis
    let mut dependents = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        loop {
            match r.leading_one() {
                None => {
                    dependents.push(idx);
                    break;
                }
                Some(lead) => {
                    if let Some(pos) = pivot_of.iter().position(|p| *p == Some(lead)) {
                        r.xor_in(&basis[pos]);
                    } else {
                        basis.push(r);
                        pivot_of.push(Some(lead));
                        break;
                    }
                }
            }
        }
    }
    (basis.len(), dependents)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Solution {
    Unique(Vec<bool>),
    /// Affine space: `particular` plus any XOR combination of `nullspace`.
    Space {
        particular: Vec<bool>,
        nullspace: Vec<Vec<bool>>,
    },
    Inconsistent,
}

/// Solves `rows * x = rhs` over GF(2) for `ncols` unknowns. Returns the
/// rank of the coefficient matrix alongside the classification.
pub(crate) fn solve(ncols: usize, rows: &[BitRow], rhs: &[bool]) -> (usize, Solution) {
    assert_eq!(rows.len(), rhs.len(), "one rhs bit per equation");
    debug_assert!(rows.iter().all(|r| r.ncols() == ncols));
    // Augment with the rhs in column `ncols`.
    let mut aug: Vec<BitRow> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut a = BitRow::zero(ncols + 1);
            for c in 0..ncols {
                if r.get(c) {
                    a.set(c, true);
                }
            }
            a.set(ncols, b);
            a
        })
        .collect();

    let mut pivots: Vec<usize> = Vec::new();
    let mut next_row = 0usize;
    for col in 0..ncols {
        let Some(found) = (next_row..aug.len()).find(|&r| aug[r].get(col)) else {
            continue;
        };
        aug.swap(next_row, found);
        let pivot_row = aug[next_row].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != next_row && row.get(col) {
                row.xor_in(&pivot_row);
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    let rank = pivots.len();

    for row in &aug[rank..] {
        if row.get(ncols) {
            return (rank, Solution::Inconsistent);
        }
    }

    let mut particular = vec![false; ncols];
    for (i, &col) in pivots.iter().enumerate() {
        particular[col] = aug[i].get(ncols);
    }
    if rank == ncols {
        return (rank, Solution::Unique(particular));
    }

    let pivot_set: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut nullspace = Vec::with_capacity(ncols - rank);
    for free in (0..ncols).filter(|&c| !pivot_set[c]) {
        let mut vec = vec![false; ncols];
        vec[free] = true;
        for (i, &col) in pivots.iter().enumerate() {
            vec[col] = aug[i].get(free);
        }
        nullspace.push(vec);
    }
    (
        rank,
        Solution::Space {
            particular,
            nullspace,
        },
    )
}
