//! Exact integer linear algebra.
//!
//! Everything here rests on one operation: inserting a column into an
//! echelon family with unimodular two-column steps (extended gcd). Tracking
//! the transforms gives a saturated kernel for free, since the transforms of
//! all columns form a unimodular matrix.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{IntVec, LatticeBasis, SparseIntMatrix};
use crate::ring::small_prime_factors;

fn axpy(v: &mut IntVec, q: &BigInt, b: &IntVec) {
    for (i, x) in b {
        let e = v.entry(*i).or_insert_with(BigInt::zero);
        *e += q * x;
        if e.is_zero() {
            v.remove(i);
        }
    }
}

/// `x*a + y*b`
fn combine(x: &BigInt, a: &IntVec, y: &BigInt, b: &IntVec) -> IntVec {
    let mut out = IntVec::new();
    if !x.is_zero() {
        for (i, v) in a {
            out.insert(*i, x * v);
        }
    }
    if !y.is_zero() {
        axpy(&mut out, y, b);
    }
    out.retain(|_, v| !v.is_zero());
    out
}

struct Echelon {
    /// pivot row -> (vector, transform)
    piv: BTreeMap<usize, (IntVec, IntVec)>,
    kernel: Vec<IntVec>,
    track: bool,
}

impl Echelon {
    fn new(track: bool) -> Self {
        Echelon { piv: BTreeMap::new(), kernel: Vec::new(), track }
    }

    fn insert(&mut self, mut v: IntVec, mut t: IntVec) {
        loop {
            let Some((&i, c)) = v.iter().next() else {
                if self.track {
                    self.kernel.push(t);
                }
                return;
            };
            let c = c.clone();
            let Some((b, tb)) = self.piv.get_mut(&i) else {
                self.piv.insert(i, (v, t));
                return;
            };
            let a = b[&i].clone();
            if c.is_multiple_of(&a) {
                let q = -(&c / &a);
                axpy(&mut v, &q, b);
                if self.track {
                    axpy(&mut t, &q, tb);
                }
            } else {
                let e = a.extended_gcd(&c);
                let (g, x, y) = (e.gcd, e.x, e.y);
                debug_assert_eq!(&x * &a + &y * &c, g);
                let cg = &c / &g;
                let ag = -(&a / &g);
                let nb = combine(&x, b, &y, &v);
                let nv = combine(&cg, b, &ag, &v);
                if self.track {
                    let ntb = combine(&x, tb, &y, &t);
                    let nt = combine(&cg, tb, &ag, &t);
                    *tb = ntb;
                    t = nt;
                }
                *b = nb;
                v = nv;
            }
        }
    }
}

/// Echelon basis (over Z) of the lattice spanned by `columns`; the result
/// has one vector per distinct leading row, ordered by leading row.
pub fn integer_echelon(_dim: usize, columns: Vec<IntVec>) -> Vec<IntVec> {
    let mut e = Echelon::new(false);
    for c in columns {
        e.insert(c, IntVec::new());
    }
    e.piv.into_values().map(|(v, _)| v).collect()
}

/// Column Hermite normal form of the column lattice of `m`: positive
/// pivots, entries in pivot rows reduced into `[0, pivot)`.
pub fn hermite_basis(m: &SparseIntMatrix) -> Vec<IntVec> {
    let mut e = Echelon::new(false);
    for j in 0..m.cols() {
        e.insert(m.column_vec(j), IntVec::new());
    }
    let rows: Vec<usize> = e.piv.keys().copied().collect();
    let mut vecs: Vec<IntVec> = e.piv.into_values().map(|(v, _)| v).collect();
    for v in vecs.iter_mut() {
        if v.values().next().is_some_and(|x| x.is_negative()) {
            for x in v.values_mut() {
                *x = -&*x;
            }
        }
    }
    for (k, &i) in rows.iter().enumerate() {
        let (before, rest) = vecs.split_at_mut(k);
        let b = &rest[0];
        let p = b[&i].clone();
        for w in before.iter_mut() {
            if let Some(x) = w.get(&i) {
                let q = -x.div_floor(&p);
                if !q.is_zero() {
                    axpy(w, &q, b);
                }
            }
        }
    }
    vecs
}

pub fn rank_over_q(m: &SparseIntMatrix) -> usize {
    integer_echelon(m.rows(), (0..m.cols()).map(|j| m.column_vec(j)).collect()).len()
}

/// A basis of `ker(m) ∩ Z^cols`. The result is saturated by construction
/// and remembers `m` for exact membership tests.
pub fn kernel_saturated(m: &SparseIntMatrix) -> LatticeBasis {
    let mut e = Echelon::new(true);
    // sparse columns first keeps transforms short
    let mut order: Vec<usize> = (0..m.cols()).collect();
    order.sort_by_key(|&j| (m.column(j).len(), j));
    for j in order {
        let mut t = IntVec::new();
        t.insert(j, BigInt::one());
        e.insert(m.column_vec(j), t);
    }
    let mut kernel = e.kernel;
    for v in kernel.iter_mut() {
        if v.values().next().is_some_and(|x| x.is_negative()) {
            for x in v.values_mut() {
                *x = -&*x;
            }
        }
    }
    kernel.sort();
    LatticeBasis::new(m.cols(), kernel).with_map(m.clone())
}

fn dense_snf(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let r = a.len();
    let c = a.first().map_or(0, |x| x.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < r.min(c) {
        // smallest nonzero pivot in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..r {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                let (top, bottom) = a.split_at_mut(i);
                for j in t..c {
                    let d = &q * &top[t][j];
                    bottom[0][j] -= d;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                    if a[i][t].abs() < a[t][t].abs() {
                        a.swap(t, i);
                    }
                }
            }
            for j in t + 1..c {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let d = &q * &row[t];
                    row[j] -= d;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                    if a[t][j].abs() < a[t][t].abs() {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the rest
            let p = a[t][t].clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let (top, bottom) = a.split_at_mut(i);
                    for j in t..c {
                        top[t][j] += &bottom[0][j];
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Nonzero elementary divisors of `m`, in divisibility order.
pub fn elementary_divisors(m: &SparseIntMatrix) -> Vec<BigInt> {
    let ech = integer_echelon(m.rows(), (0..m.cols()).map(|j| m.column_vec(j)).collect());
    if ech.is_empty() {
        return Vec::new();
    }
    // drop rows that are zero in every echelon vector
    let mut used: Vec<usize> = ech.iter().flat_map(|v| v.keys().copied()).collect();
    used.sort_unstable();
    used.dedup();
    let pos: BTreeMap<usize, usize> = used.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let dense: Vec<Vec<BigInt>> = ech
        .iter()
        .map(|v| {
            let mut row = vec![BigInt::zero(); used.len()];
            for (i, x) in v {
                row[pos[i]] = x.clone();
            }
            row
        })
        .collect();
    let mut d = dense_snf(dense);
    d.sort();
    d
}

/// Comparison of the lattice spanned by some generators with a target
/// lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpanReport {
    pub target_rank: usize,
    pub generator_count: usize,
    pub generator_rank: usize,
    /// Generators outside the rational span of the target, with a residual
    /// (image under the target's defining map, or the vector itself).
    pub outside: Vec<(usize, IntVec)>,
    /// Elementary divisors of the generator lattice (nonzero only).
    pub divisors: Vec<BigInt>,
    /// Primes dividing some divisor.
    pub bad_primes: Vec<u64>,
    /// Parts of divisors not factored by trial division.
    pub unfactored: Vec<BigInt>,
    pub equal_over_q: bool,
    pub equal_over_z: bool,
}

/// Compare `span_Z(generators)` with the saturated lattice `target`.
pub fn span_analysis(generators: &SparseIntMatrix, target: &LatticeBasis) -> SpanReport {
    let mut outside = Vec::new();
    for j in 0..generators.cols() {
        let g = generators.column_vec(j);
        if !target.contains_rationally(&g) {
            let residual = match target.defining_map() {
                Some(m) => m.mul_vec(&g),
                None => g,
            };
            outside.push((j, residual));
        }
    }
    let divisors = elementary_divisors(generators);
    let generator_rank = divisors.len();
    let mut bad = Vec::new();
    let mut unfactored = Vec::new();
    for d in &divisors {
        let (ps, rest) = small_prime_factors(d, 1_000_000);
        bad.extend(ps);
        if !rest.is_one() {
            unfactored.push(rest);
        }
    }
    bad.sort_unstable();
    bad.dedup();
    let equal_over_q = outside.is_empty() && generator_rank == target.rank();
    let equal_over_z = equal_over_q && divisors.iter().all(One::is_one);
    SpanReport {
        target_rank: target.rank(),
        generator_count: generators.cols(),
        generator_rank,
        outside,
        divisors,
        bad_primes: bad,
        unfactored,
        equal_over_q,
        equal_over_z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisors_of_small_matrices() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let d = elementary_divisors(&m);
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let m = SparseIntMatrix::from_dense(&[vec![1, 1], vec![1, 4]]);
        assert_eq!(elementary_divisors(&m), vec![BigInt::from(1), BigInt::from(3)]);
    }

    #[test]
    fn kernel_is_saturated() {
        // x + 2y + 3z = 0 and 2x + 4y + 6z = 0
        let m = SparseIntMatrix::from_dense(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = kernel_saturated(&m);
        assert_eq!(k.rank(), 2);
        assert!(k.is_saturated());
        for v in &k.basis {
            assert!(m.mul_vec(v).is_empty());
        }
        // 2x - 4y = 0 has kernel generated by (2,1), not (4,2)
        let m = SparseIntMatrix::from_dense(&[vec![2, -4]]);
        let k = kernel_saturated(&m);
        let v: Vec<_> = k.basis[0].values().cloned().collect();
        assert_eq!(v, vec![BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn hermite_reduces() {
        let m = SparseIntMatrix::from_dense(&[vec![3, 1], vec![5, 2]]);
        let h = hermite_basis(&m);
        // unimodular, so the HNF is the identity
        assert_eq!(h.len(), 2);
        assert_eq!(h[0].get(&0), Some(&BigInt::one()));
        assert_eq!(h[0].get(&1), None);
        assert_eq!(h[1].get(&1), Some(&BigInt::one()));
    }

    #[test]
    fn span_detects_index_and_outsiders() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 1, -1]]);
        let k = kernel_saturated(&m);
        // generators (2,-2,0), (0,1,1): index 2 in the kernel
        let g = SparseIntMatrix::from_dense(&[vec![2, 0], vec![-2, 1], vec![0, 1]]);
        let r = span_analysis(&g, &k);
        assert!(r.equal_over_q);
        assert!(!r.equal_over_z);
        assert_eq!(r.bad_primes, vec![2]);
        let g = SparseIntMatrix::from_dense(&[vec![1], vec![0], vec![0]]);
        let r = span_analysis(&g, &k);
        assert_eq!(r.outside.len(), 1);
    }

    #[test]
    fn kernel_matches_rank_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let rows: Vec<Vec<i64>> =
                (0..5).map(|_| (0..8).map(|_| rng.gen_range(-4..=4)).collect()).collect();
            let m = SparseIntMatrix::from_dense(&rows);
            let k = kernel_saturated(&m);
            assert_eq!(k.rank() + rank_over_q(&m), 8);
            assert!(k.is_saturated());
        }
    }
}
