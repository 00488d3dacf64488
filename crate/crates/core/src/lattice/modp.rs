//! Ranks over prime fields.
//!
//! [`ModpEchelon`] keeps a row-echelon basis of the vectors inserted so far;
//! pivot rows are stored sparse and switch to a dense layout once they fill
//! in. Ranks of large generator families are computed by sharding the columns
//! over workers (each with its own echelon) and merging the shard bases.

use rayon::prelude::*;

use super::SparseIntMatrix;
use crate::ring::PrimeField;

#[derive(Clone, Debug)]
enum PivotRow {
    Sparse(Vec<(u32, u32)>),
    Dense(Vec<u32>),
}

/// Incremental echelon form over `F_p` in a space of fixed dimension.
#[derive(Clone, Debug)]
pub struct ModpEchelon {
    dim: usize,
    p: u64,
    field: PrimeField,
    /// `pivots[i]` has leading entry 1 at coordinate `i`.
    pivots: Vec<Option<PivotRow>>,
    rank: usize,
    scratch: Vec<u64>,
    bytes: usize,
}

impl ModpEchelon {
    pub fn new(dim: usize, p: u64) -> Self {
        let field = PrimeField::new(p);
        ModpEchelon {
            dim,
            p,
            field,
            pivots: vec![None; dim],
            rank: 0,
            scratch: vec![0; dim],
            bytes: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Heap bytes held by pivot rows and scratch space.
    pub fn stored_bytes(&self) -> usize {
        self.bytes + self.dim * (8 + std::mem::size_of::<Option<PivotRow>>())
    }

    pub fn is_full(&self) -> bool {
        self.rank == self.dim
    }

    /// Insert a vector given as `(index, residue)` pairs (duplicates are
    /// summed). Returns whether it was independent of the current basis.
    pub fn insert(&mut self, v: &[(usize, u64)]) -> bool {
        if self.is_full() {
            return false;
        }
        let p = self.p;
        let mut lo = usize::MAX;
        // scratch is zero above `hi`
        let mut hi = 0;
        let mut touched = false;
        for &(i, x) in v {
            let x = x % p;
            if x != 0 {
                self.scratch[i] = (self.scratch[i] + x) % p;
                lo = lo.min(i);
                hi = hi.max(i);
                touched = true;
            }
        }
        if !touched {
            return false;
        }
        let mut result = false;
        let mut i = lo;
        while i <= hi {
            let x = self.scratch[i];
            if x == 0 {
                i += 1;
                continue;
            }
            match &self.pivots[i] {
                Some(row) => {
                    let f = p - x;
                    match row {
                        PivotRow::Sparse(entries) => {
                            for &(j, y) in entries {
                                let s = &mut self.scratch[j as usize];
                                *s = (*s + f * y as u64) % p;
                            }
                            if let Some(&(j, _)) = entries.last() {
                                hi = hi.max(j as usize);
                            }
                        }
                        PivotRow::Dense(vals) => {
                            for (j, &y) in vals.iter().enumerate().skip(i) {
                                if y != 0 {
                                    let s = &mut self.scratch[j];
                                    *s = (*s + f * y as u64) % p;
                                    hi = hi.max(j);
                                }
                            }
                        }
                    }
                    debug_assert_eq!(self.scratch[i], 0);
                    i += 1;
                }
                None => {
                    let inv = self.field.inv(x);
                    let mut entries = Vec::new();
                    for j in i..=hi {
                        let y = self.scratch[j];
                        if y != 0 {
                            entries.push((j as u32, ((y * inv) % p) as u32));
                        }
                    }
                    let row = if entries.len() * 4 > self.dim - i {
                        let mut dense = vec![0u32; self.dim];
                        for (j, y) in entries {
                            dense[j as usize] = y;
                        }
                        self.bytes += 4 * self.dim;
                        PivotRow::Dense(dense)
                    } else {
                        self.bytes += 8 * entries.len();
                        PivotRow::Sparse(entries)
                    };
                    self.pivots[i] = Some(row);
                    self.rank += 1;
                    result = true;
                    break;
                }
            }
        }
        for s in self.scratch[lo..=hi].iter_mut() {
            *s = 0;
        }
        result
    }

    /// The basis vectors, as sparse residue lists.
    pub fn basis(&self) -> Vec<Vec<(usize, u64)>> {
        self.pivots
            .iter()
            .flatten()
            .map(|row| match row {
                PivotRow::Sparse(e) => e.iter().map(|&(j, y)| (j as usize, y as u64)).collect(),
                PivotRow::Dense(d) => d
                    .iter()
                    .enumerate()
                    .filter(|(_, &y)| y != 0)
                    .map(|(j, &y)| (j, y as u64))
                    .collect(),
            })
            .collect()
    }
}

/// Columns of `m` reduced mod `p`.
pub fn columns_mod_p(m: &SparseIntMatrix, p: u64) -> Vec<Vec<(usize, u64)>> {
    let f = PrimeField::new(p);
    (0..m.cols())
        .map(|j| {
            m.column(j)
                .iter()
                .map(|(i, v)| (*i, crate::ring::Ring::from_bigint(&f, v)))
                .filter(|(_, x)| *x != 0)
                .collect()
        })
        .collect()
}

/// Rank over `F_p` of a family of vectors in `F_p^dim`, sharded over
/// `workers` echelons (sparsest vectors first, a Markowitz-style order).
pub fn rank_of_vectors(dim: usize, p: u64, vectors: &[Vec<(usize, u64)>], workers: usize) -> usize {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by_key(|&k| (vectors[k].len(), k));
    let workers = workers.max(1);
    if workers == 1 || vectors.len() < 256 {
        let mut ech = ModpEchelon::new(dim, p);
        for k in order {
            ech.insert(&vectors[k]);
            if ech.is_full() {
                break;
            }
        }
        return ech.rank();
    }
    let shards: Vec<Vec<usize>> = (0..workers)
        .map(|w| order.iter().copied().skip(w).step_by(workers).collect())
        .collect();
    let bases: Vec<Vec<Vec<(usize, u64)>>> = shards
        .par_iter()
        .map(|idx| {
            let mut ech = ModpEchelon::new(dim, p);
            for &k in idx {
                ech.insert(&vectors[k]);
                if ech.is_full() {
                    break;
                }
            }
            ech.basis()
        })
        .collect();
    let mut merged = ModpEchelon::new(dim, p);
    for b in bases {
        for v in b {
            merged.insert(&v);
        }
    }
    merged.rank()
}

/// Rank of `m` over `F_p`.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    rank_mod_p_workers(m, p, rayon::current_num_threads())
}

pub fn rank_mod_p_workers(m: &SparseIntMatrix, p: u64, workers: usize) -> usize {
    let cols = columns_mod_p(m, p);
    rank_of_vectors(m.rows(), p, &cols, workers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn identity_and_zero() {
        let id = SparseIntMatrix::identity(5);
        assert_eq!(rank_mod_p(&id, 7), 5);
        let z = SparseIntMatrix::zeros(4, 6);
        assert_eq!(rank_mod_p(&z, 7), 0);
    }

    #[test]
    fn dependent_mod_small_prime() {
        // columns (1,1) and (1,4): determinant 3
        let m = SparseIntMatrix::from_dense(&[vec![1, 1], vec![1, 4]]);
        assert_eq!(rank_mod_p(&m, 3), 1);
        assert_eq!(rank_mod_p(&m, 5), 2);
    }

    #[test]
    fn sharded_matches_single() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut rows = vec![vec![0i64; 300]; 40];
        for r in rows.iter_mut() {
            for x in r.iter_mut() {
                if rng.gen_bool(0.05) {
                    *x = rng.gen_range(-3..=3);
                }
            }
        }
        let m = SparseIntMatrix::from_dense(&rows);
        let a = rank_mod_p_workers(&m, 101, 1);
        let b = rank_mod_p_workers(&m, 101, 4);
        assert_eq!(a, b);
        let _ = BigInt::from(0);
    }
}
