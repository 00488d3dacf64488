//! Integer lattices: sparse matrices, saturated kernels, elementary divisors
//! and span checks.

mod integer;
mod modp;

pub use integer::{
    elementary_divisors, hermite_basis, integer_echelon, kernel_saturated, rank_over_q,
    span_analysis, SpanReport,
};
pub use modp::{columns_mod_p, rank_mod_p, rank_mod_p_workers, rank_of_vectors, ModpEchelon};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse integer vector, index -> nonzero value.
pub type IntVec = BTreeMap<usize, BigInt>;

/// Sparse integer matrix stored column by column; zero entries are never kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, BigInt)>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, BigInt::from(1)));
        }
        m
    }

    /// From `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Result<Self> {
        let mut cols_map: Vec<IntVec> = vec![BTreeMap::new(); cols];
        for (i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::Lattice(format!(
                    "entry ({i},{j}) outside {rows}x{cols}"
                )));
            }
            *cols_map[j].entry(i).or_insert_with(BigInt::zero) += v;
        }
        Ok(Self::from_columns(rows, cols_map))
    }

    pub fn from_columns(rows: usize, columns: Vec<IntVec>) -> Self {
        let cols = columns.len();
        let data = columns
            .into_iter()
            .map(|c| {
                debug_assert!(c.keys().all(|&i| i < rows));
                c.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        SparseIntMatrix { rows, cols, data }
    }

    /// Dense row-major input, mostly for tests.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut cols = vec![BTreeMap::new(); c];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    cols[j].insert(i, BigInt::from(v));
                }
            }
        }
        Self::from_columns(r, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, BigInt)] {
        &self.data[j]
    }

    pub fn column_vec(&self, j: usize) -> IntVec {
        self.data[j].iter().cloned().collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = &[(usize, BigInt)]> {
        self.data.iter().map(|c| c.as_slice())
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.data[j]
            .iter()
            .find(|(r, _)| *r == i)
            .map_or_else(BigInt::zero, |(_, v)| v.clone())
    }

    /// Triplets sorted by row, then column.
    pub fn triplets(&self) -> Vec<(usize, usize, BigInt)> {
        let mut t: Vec<_> = self
            .data
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v.clone())))
            .collect();
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        t
    }

    pub fn transpose(&self) -> Self {
        let t = self.triplets().into_iter().map(|(i, j, v)| (j, i, v));
        Self::from_triplets(self.cols, self.rows, t).expect("transpose in range")
    }

    pub fn mul_vec(&self, x: &IntVec) -> IntVec {
        let mut out = IntVec::new();
        for (j, xj) in x {
            for (i, v) in &self.data[*j] {
                *out.entry(*i).or_insert_with(BigInt::zero) += v * xj;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseIntMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Lattice(format!(
                "shape mismatch {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let cols = (0..other.cols).map(|j| self.mul_vec(&other.column_vec(j))).collect();
        Ok(Self::from_columns(self.rows, cols))
    }

    pub fn hcat(&self, other: &SparseIntMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Lattice("hcat row mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(SparseIntMatrix { rows: self.rows, cols: self.cols + other.cols, data })
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        SparseIntMatrix {
            rows: self.rows,
            cols: idx.len(),
            data: idx.iter().map(|&j| self.data[j].clone()).collect(),
        }
    }

    pub fn max_abs(&self) -> BigInt {
        self.data
            .iter()
            .flatten()
            .map(|(_, v)| v.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Render in SMS format: `rows cols M`, 1-based triplets, `0 0 0`.
    pub fn to_sms(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} M", self.rows, self.cols).unwrap();
        for (i, j, v) in self.triplets() {
            writeln!(s, "{} {} {}", i + 1, j + 1, v).unwrap();
        }
        s.push_str("0 0 0\n");
        s
    }

    pub fn from_sms(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty SMS input".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[2] != "M" {
            return Err(Error::Parse(format!("bad SMS header '{header}'")));
        }
        let rows: usize = h[0].parse().map_err(|_| Error::Parse("bad row count".into()))?;
        let cols: usize = h[1].parse().map_err(|_| Error::Parse("bad column count".into()))?;
        let mut trip = Vec::new();
        let mut terminated = false;
        for l in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("bad SMS line '{l}'")));
            }
            let i: usize = f[0].parse().map_err(|_| Error::Parse(format!("bad row in '{l}'")))?;
            let j: usize = f[1].parse().map_err(|_| Error::Parse(format!("bad col in '{l}'")))?;
            let v: BigInt = f[2].parse().map_err(|_| Error::Parse(format!("bad value in '{l}'")))?;
            if i == 0 && j == 0 {
                terminated = true;
                break;
            }
            if i == 0 || j == 0 {
                return Err(Error::Parse(format!("SMS indices are 1-based: '{l}'")));
            }
            trip.push((i - 1, j - 1, v));
        }
        if !terminated {
            return Err(Error::Parse("missing SMS terminator".into()));
        }
        Self::from_triplets(rows, cols, trip)
    }
}

/// A lattice given by a basis of sparse integer vectors in `Z^ambient`,
/// optionally together with a map whose kernel it is (used for exact
/// membership tests).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeBasis {
    pub ambient: usize,
    pub basis: Vec<IntVec>,
    #[serde(skip)]
    defining_map: Option<SparseIntMatrix>,
}

impl LatticeBasis {
    pub fn new(ambient: usize, basis: Vec<IntVec>) -> Self {
        LatticeBasis { ambient, basis, defining_map: None }
    }

    pub(crate) fn with_map(mut self, m: SparseIntMatrix) -> Self {
        self.defining_map = Some(m);
        self
    }

    pub fn defining_map(&self) -> Option<&SparseIntMatrix> {
        self.defining_map.as_ref()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix(&self) -> SparseIntMatrix {
        SparseIntMatrix::from_columns(self.ambient, self.basis.clone())
    }

    /// Is `v` in the rational span? Exact.
    pub fn contains_rationally(&self, v: &IntVec) -> bool {
        if let Some(m) = &self.defining_map {
            return m.mul_vec(v).is_empty();
        }
        let mut cols = self.basis.clone();
        cols.push(v.clone());
        integer_echelon(self.ambient, cols).len() == self.rank()
    }

    /// Saturated iff every elementary divisor of the basis matrix is 1.
    pub fn is_saturated(&self) -> bool {
        let d = elementary_divisors(&self.matrix());
        d.len() == self.rank() && d.iter().all(|x| x == &BigInt::from(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sms_round_trip() {
        let m = SparseIntMatrix::from_dense(&[vec![0, -3, 0], vec![12345678901, 0, 1]]);
        let s = m.to_sms();
        assert_eq!(s, "2 3 M\n1 2 -3\n2 1 12345678901\n2 3 1\n0 0 0\n");
        let back = SparseIntMatrix::from_sms(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_sms(), s);
    }

    #[test]
    fn sms_rejects_garbage() {
        assert!(SparseIntMatrix::from_sms("2 2\n0 0 0\n").is_err());
        assert!(SparseIntMatrix::from_sms("2 2 M\n1 1 4\n").is_err());
        assert!(SparseIntMatrix::from_sms("2 2 M\n3 1 4\n0 0 0\n").is_err());
    }

    #[test]
    fn product_and_transpose() {
        let a = SparseIntMatrix::from_dense(&[vec![1, 2], vec![0, 1]]);
        let b = a.mul(&a).unwrap();
        assert_eq!(b, SparseIntMatrix::from_dense(&[vec![1, 4], vec![0, 1]]));
        assert_eq!(a.transpose().get(1, 0), BigInt::from(2));
    }
}
