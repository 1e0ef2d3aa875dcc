//! Small dense least-squares kernels.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `A^T y`.
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate().take(self.rows) {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j) * yi;
            }
        }
        out
    }

    fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                m.set(i, k, self.get(i, j));
            }
        }
        m
    }
}

/// Minimizes `||A x - b||` by Householder QR. Requires `rows >= cols`; returns
/// `None` when `A` is numerically rank deficient.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let (m, n) = (a.rows, a.cols);
    assert_eq!(b.len(), m);
    if m < n {
        return None;
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    let scale = r.data.iter().fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)));
    for k in 0..n {
        let norm = libm::sqrt((k..m).map(|i| r.get(i, k) * r.get(i, k)).sum::<f64>());
        if norm <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        let alpha = if r.get(k, k) > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * r.get(i, j)).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                let val = r.get(i, j) - f * v[i - k];
                r.set(i, j, val);
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * y[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            y[i] -= f * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| r.get(k, j) * x[j]).sum();
        x[k] = (y[k] - s) / r.get(k, k);
    }
    Some(x)
}

/// Non-negative least squares, `min ||A x - b||` subject to `x >= 0`
/// (Lawson-Hanson active set).
pub fn nnls(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.cols;
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let residual = |x: &[f64]| -> Vec<f64> { a.mul_vec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect() };
    let norm1 = (0..n)
        .map(|j| (0..a.rows).map(|i| libm::fabs(a.get(i, j))).sum::<f64>())
        .fold(0.0f64, f64::max);
    let tol = 10.0 * f64::EPSILON * norm1 * a.rows.max(n) as f64;
    let max_outer = 3 * n + 30;
    for _ in 0..max_outer {
        let w = a.tr_mul_vec(&residual(&x));
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap_or(core::cmp::Ordering::Equal));
        match candidate {
            Some(j) if w[j] > tol => passive[j] = true,
            _ => return Some(x),
        }
        loop {
            let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let z_p = least_squares(&a.select_columns(&cols), b)?;
            if z_p.iter().all(|z| *z > 0.0) {
                for (k, &j) in cols.iter().enumerate() {
                    x[j] = z_p[k];
                }
                break;
            }
            // step back toward x until the first passive variable hits zero
            let mut alpha = 1.0f64;
            for (k, &j) in cols.iter().enumerate() {
                if z_p[k] <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - z_p[k]));
                }
            }
            for (k, &j) in cols.iter().enumerate() {
                x[j] += alpha * (z_p[k] - x[j]);
                if x[j] <= 1e-15 * (1.0 + libm::fabs(z_p[k])) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    Some(x)
}
