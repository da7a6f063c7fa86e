// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense complex matrices.
//!
//! Everything in the crate is at most 2^8 × 2^8, so matrices are plain
//! row-major `Vec<Complex64>` with no sparse or blocked storage.

use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Absolute per-entry comparison bound.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    /// Bound used for checks against exact algebraic entries.
    pub const STRICT: Tolerance = Tolerance(1e-12);
    /// Bound used once states have been pushed through several products.
    pub const LOOSE: Tolerance = Tolerance(1e-10);

    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::OutOfRange(format!(
                "tolerance must be >= 0, got {epsilon}"
            )));
        }
        Ok(Tolerance(epsilon))
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "empty matrix {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(i) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: i / cols,
                col: i % cols,
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Builds a matrix whose j-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let cols = columns.len();
        let mut data = vec![ZERO; rows * cols];
        for (j, column) in columns.iter().enumerate() {
            for (i, &z) in column.iter().enumerate() {
                data[i * cols + j] = z;
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self::from_raw(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self[(row, col)]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.data
    }

    /// Returns a copy with one entry replaced.
    pub fn with_entry(&self, row: usize, col: usize, value: Complex64) -> Result<Self> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::OutOfRange(format!(
                "entry ({row}, {col}) outside {}x{}",
                self.rows, self.cols
            )));
        }
        let mut data = self.data.clone();
        data[row * self.cols + col] = value;
        Self::new(self.rows, self.cols, data)
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, col)]).collect()
    }

    /// Sub-matrix of `rows × cols` starting at `(row0, col0)`.
    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Result<Self> {
        if row0 + rows > self.rows || col0 + cols > self.cols {
            return Err(Error::DimensionMismatch(format!(
                "block {rows}x{cols} at ({row0}, {col0}) exceeds {}x{}",
                self.rows, self.cols
            )));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in row0..row0 + rows {
            data.extend_from_slice(&self.data[r * self.cols + col0..r * self.cols + col0 + cols]);
        }
        Ok(Self::from_raw(rows, cols, data))
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::from_raw(self.rows, rhs.cols, out))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut data = vec![ZERO; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.data[r * self.cols + c].conj();
            }
        }
        Self::from_raw(self.cols, self.rows, data)
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![ZERO; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        Self::from_raw(self.cols, self.rows, data)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|&z| z * factor).collect(),
        )
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.check_same_shape(rhs)?;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.check_same_shape(rhs)?;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    pub fn trace(&self) -> Result<Complex64> {
        self.check_square()?;
        Ok((0..self.rows).map(|i| self.data[i * self.cols + i]).sum())
    }

    /// Determinant of a 2×2 matrix.
    pub fn det2(&self) -> Result<Complex64> {
        if self.rows != 2 || self.cols != 2 {
            return Err(Error::DimensionMismatch("det2 needs a 2x2 matrix".into()));
        }
        Ok(self.data[0] * self.data[3] - self.data[1] * self.data[2])
    }

    /// Block-diagonal `self ⊕ rhs`.
    pub fn direct_sum(&self, rhs: &ComplexMatrix) -> Self {
        let rows = self.rows + rhs.rows;
        let cols = self.cols + rhs.cols;
        let mut out = Self::zeros(rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[r * cols + c] = self.data[r * self.cols + c];
            }
        }
        for r in 0..rhs.rows {
            for c in 0..rhs.cols {
                out.data[(r + self.rows) * cols + c + self.cols] = rhs.data[r * rhs.cols + c];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation of `self† self` from the identity.
    pub fn unitarity_deviation(&self) -> Result<f64> {
        self.check_square()?;
        let product = self.dagger().matmul(self)?;
        max_abs_diff(&product, &Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: Tolerance) -> Result<bool> {
        Ok(self.unitarity_deviation()? <= tol.epsilon())
    }

    pub fn is_hermitian(&self, tol: Tolerance) -> Result<bool> {
        self.check_square()?;
        Ok(max_abs_diff(self, &self.dagger())? <= tol.epsilon())
    }

    /// Serializes to the text fixture format: one row per line, entries
    /// `re+imj` separated by single spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    out.push(' ');
                }
                let z = self.data[r * self.cols + c];
                // -0.0 prints as "-0"; keep fixtures free of signed zeros.
                let re = if z.re == 0.0 { 0.0 } else { z.re };
                let im = if z.im == 0.0 { 0.0 } else { z.im };
                if im < 0.0 {
                    let _ = write!(out, "{re}-{}j", -im);
                } else {
                    let _ = write!(out, "{re}+{im}j");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text fixture format written by [`ComplexMatrix::to_text`].
    /// Bare reals are accepted as entries; blank lines are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|line| {
                line.split_whitespace()
                    .map(parse_complex)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        if rows.is_empty() {
            return Err(Error::Parse("no rows".into()));
        }
        Self::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
    }

    fn check_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn check_same_shape(&self, rhs: &ComplexMatrix) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r}, {c}) out of bounds"
        );
        &self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self.data[r * self.cols + c];
                write!(f, "{:>8.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn parse_complex(token: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex entry `{token}`"));
    let Some(body) = token.strip_suffix('j') else {
        return token
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // Split at the sign that starts the imaginary part: the last `+`/`-`
    // that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    let z = Complex64::new(re, im);
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(bad());
    }
    Ok(z)
}

/// Kronecker product. The first argument is the most-significant factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut data = vec![ZERO; rows * cols];
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a.data[ar * a.cols + ac];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                let row = ar * b.rows + br;
                for bc in 0..b.cols {
                    data[row * cols + ac * b.cols + bc] = x * b.data[br * b.cols + bc];
                }
            }
        }
    }
    ComplexMatrix::from_raw(rows, cols, data)
}

/// Kronecker product of a sequence, leftmost factor most significant.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, m| kron(&acc, m))
}

/// `m ⊗ m ⊗ ... ⊗ m` with `n` factors.
pub fn kron_power(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    (0..n).fold(ComplexMatrix::identity(1), |acc, _| kron(&acc, m))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_shape(b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Largest entry deviation after rotating `b` onto the phase of `a`.
///
/// The phase is read off the largest-magnitude entry of `a`; if `b` is zero
/// there the matrices cannot agree up to phase and the plain difference is
/// returned.
pub fn phase_aligned_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_shape(b)?;
    let (idx, _) = a.data.iter().enumerate().fold((0, -1.0), |best, (i, z)| {
        if z.norm() > best.1 {
            (i, z.norm())
        } else {
            best
        }
    });
    let (pa, pb) = (a.data[idx], b.data[idx]);
    if pb.norm() == 0.0 || pa.norm() == 0.0 {
        return max_abs_diff(a, b);
    }
    let phase = (pa / pb) / (pa / pb).norm();
    max_abs_diff(a, &b.scale(phase))
}

pub fn equal_up_to_global_phase(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: Tolerance,
) -> Result<bool> {
    Ok(phase_aligned_diff(a, b)? <= tol.epsilon())
}
