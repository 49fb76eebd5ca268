//! Sparse storage for nonsymmetric systems and a direct solver.

use std::io::Write;

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Matrix in coordinate (triplet) form together with its right-hand side.
#[derive(Debug, Clone, Default)]
pub struct SparseSystem {
    pub n: usize,
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            triplets: Vec::new(),
            rhs: vec![0.0; n],
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        self.triplets.push((row, col, value));
    }

    /// Appends all entries of `other` (same dimension).
    pub fn extend(&mut self, other: SparseSystem) {
        debug_assert_eq!(self.n, other.n);
        self.triplets.extend(other.triplets);
        for (r, o) in self.rhs.iter_mut().zip(other.rhs) {
            *r += o;
        }
    }

    /// Replaces each listed row by the identity row with the given right-hand side.
    pub fn constrain_rows(&mut self, rows: &[(usize, f64)]) {
        let mut constrained = vec![false; self.n];
        for &(r, _) in rows {
            constrained[r] = true;
        }
        self.triplets.retain(|&(r, _, _)| !constrained[r]);
        for &(r, value) in rows {
            self.triplets.push((r, r, 1.0));
            self.rhs[r] = value;
        }
    }

    pub fn compress(&self) -> Result<CsrMatrix> {
        CsrMatrix::from_triplets(self.n, &self.triplets)
    }
}

/// Compressed-row matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicates; the layout depends only on the set of entries, not their order.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if let Some(&(row, col, _)) = triplets.iter().find(|(r, c, _)| *r >= n || *c >= n) {
            return Err(Error::IndexOutOfRange { row, col, n });
        }
        let mut sorted = triplets.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));

        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_nnz(&self, row: usize) -> usize {
        self.row_ptr[row + 1] - self.row_ptr[row]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|k| self.values[k] * x[self.col_idx[k]])
                    .sum()
            })
            .collect()
    }

    /// `x^T A y`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matvec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Dump as `row col value` lines, 0-based.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                writeln!(out, "{} {} {:.17e}", i, self.col_idx[k], self.values[k])?;
            }
        }
        Ok(())
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trip: Vec<Triplet<usize, usize, f64>> = (0..self.n)
            .flat_map(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, k)))
            .map(|(i, k)| Triplet::new(i, self.col_idx[k], self.values[k]))
            .collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &trip)
            .map_err(|e| Error::InvalidArgument(format!("sparse conversion failed: {e:?}")))
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Result of a linear solve, with the achieved relative residual.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub relative_residual: f64,
}

/// Solves `A x = b` by sparse LU with a few steps of iterative refinement, and
/// checks `|A x - b| <= tol |b|`.
pub fn solve(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Solution> {
    if b.len() != a.n {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has length {} but matrix has dimension {}",
            b.len(),
            a.n
        )));
    }
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(Solution {
            x: vec![0.0; a.n],
            relative_residual: 0.0,
        });
    }
    let lu = a.to_faer()?.sp_lu().map_err(|_| Error::Singular)?;
    let lu_solve = |r: &[f64]| -> Vec<f64> {
        let rhs = Mat::from_fn(a.n, 1, |i, _| r[i]);
        let sol = faer::linalg::solvers::Solve::solve(&lu, &rhs);
        (0..a.n).map(|i| sol[(i, 0)]).collect()
    };

    let mut x = lu_solve(b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    let residual = |x: &[f64]| {
        let ax = a.matvec(x);
        ax.iter().zip(b).map(|(p, q)| q - p).collect::<Vec<f64>>()
    };
    let mut r = residual(&x);
    let mut rel = norm2(&r) / bnorm;
    for _ in 0..3 {
        if rel <= tol {
            break;
        }
        let dx = lu_solve(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        r = residual(&x);
        rel = norm2(&r) / bnorm;
    }
    if !(rel <= tol) {
        return Err(Error::NotConverged { residual: rel, tol });
    }
    Ok(Solution {
        x,
        relative_residual: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(1, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 3.0);
    }

    #[test]
    fn identity_triplets() {
        let trip: Vec<_> = (0..5).map(|i| (i, i, 1.0)).collect();
        let m = CsrMatrix::from_triplets(5, &trip).unwrap();
        assert_eq!(m.nnz(), 5);
        assert_eq!(m.row_ptr, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn empty_matrix() {
        let m = CsrMatrix::from_triplets(3, &[]).unwrap();
        assert_eq!(m.matvec(&[1.0, 2.0, 3.0]), vec![0.0; 3]);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            CsrMatrix::from_triplets(2, &[(0, 2, 1.0)]),
            Err(Error::IndexOutOfRange {
                row: 0,
                col: 2,
                n: 2
            })
        ));
    }

    #[test]
    fn solve_identity() {
        let m = CsrMatrix::from_triplets(3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]).unwrap();
        let s = solve(&m, &[1.0, 2.0, 3.0], DEFAULT_TOL).unwrap();
        assert_eq!(s.x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn solve_nonsymmetric_2x2() {
        let m = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        let s = solve(&m, &[3.0, 1.0], DEFAULT_TOL).unwrap();
        assert_relative_eq!(s.x[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.x[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let m = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)])
            .unwrap();
        assert!(solve(&m, &[1.0, 2.0], DEFAULT_TOL).is_err());
    }

    #[test]
    fn constrain_rows_replaces_row() {
        let mut sys = SparseSystem::new(2);
        sys.add(0, 0, 4.0);
        sys.add(0, 1, 1.0);
        sys.add(1, 0, 1.0);
        sys.add(1, 1, 4.0);
        sys.rhs = vec![5.0, 5.0];
        sys.constrain_rows(&[(1, 7.0)]);
        let m = sys.compress().unwrap();
        assert_eq!((m.get(1, 0), m.get(1, 1)), (0.0, 1.0));
        let s = solve(&m, &sys.rhs, DEFAULT_TOL).unwrap();
        assert_eq!(s.x[1], 7.0);
        assert_relative_eq!(s.x[0], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn matvec_matches_triplets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 50;
        let trip: Vec<_> = (0..600)
            .map(|_| {
                (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut brute = vec![0.0; n];
        for &(r, c, v) in &trip {
            brute[r] += v * x[c];
        }
        let m = CsrMatrix::from_triplets(n, &trip).unwrap();
        for (a, b) in m.matvec(&x).iter().zip(&brute) {
            assert!((a - b).abs() <= 1e-13);
        }
        // Layout independent of insertion order.
        let mut rev = trip.clone();
        rev.reverse();
        assert_eq!(CsrMatrix::from_triplets(n, &rev).unwrap(), m);
    }

    #[test]
    fn coordinate_dump() {
        let m = CsrMatrix::from_triplets(2, &[(1, 0, 2.5), (0, 1, -1.0)]).unwrap();
        let mut buf = Vec::new();
        m.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("0 1 "));
        assert!(lines[1].starts_with("1 0 2.5"));
    }
}
