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

//! Gate constructors and embedding of k-wire gates into an n-wire register.
//!
//! A gate's own matrix treats its first wire as the most-significant bit, so
//! `controlled(g, v)` puts the control on the first wire. Placement order
//! therefore matters: `cx` on `[2, 0]` is controlled by wire 2.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance, ONE, ZERO};

#[derive(Clone, PartialEq)]
pub struct Gate {
    name: String,
    params: Vec<f64>,
    arity: usize,
    matrix: ComplexMatrix,
}

impl Gate {
    /// Wraps an arbitrary unitary. The name is kept for display only and is
    /// not understood by [`from_name`] unless it belongs to the library.
    pub fn custom(name: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        Self::build(name.into(), Vec::new(), matrix)
    }

    fn build(name: String, params: Vec<f64>, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let dim = matrix.rows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch(format!(
                "gate dimension {dim} is not 2^k, k >= 1"
            )));
        }
        let deviation = matrix.unitarity_deviation()?;
        if deviation > Tolerance::STRICT.epsilon() {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Gate {
            name,
            params,
            arity: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    // Library gates are unitary by construction.
    fn known(name: &str, params: Vec<f64>, matrix: ComplexMatrix) -> Self {
        Self::build(name.to_owned(), params, matrix).expect("library gate is unitary")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Inverse gate. Library names map onto library names so inverted
    /// circuits still round-trip through the text format.
    pub fn dagger(&self) -> Gate {
        let matrix = self.matrix.dagger();
        let (name, params) = dagger_name(&self.name, &self.params);
        Gate {
            name,
            params,
            arity: self.arity,
            matrix,
        }
    }

    /// `name(p0,p1)` or bare `name`.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{p}")).collect();
            format!("{}({})", self.name, ps.join(","))
        }
    }
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gate({})", self.label())
    }
}

fn dagger_name(name: &str, params: &[f64]) -> (String, Vec<f64>) {
    if let Some(inner) = name.strip_prefix("c-") {
        let (n, p) = dagger_name(inner, params);
        return (format!("c-{n}"), p);
    }
    if let Some(inner) = name.strip_prefix("o-") {
        let (n, p) = dagger_name(inner, params);
        return (format!("o-{n}"), p);
    }
    match name {
        "id" | "h" | "x" | "y" | "z" | "cx" | "ccx" | "swap" => (name.to_owned(), params.to_vec()),
        "ry" => ("ry".into(), vec![-params[0]]),
        // (Ry(a) X)† = X Ry(-a)
        "ryx" => ("xry".into(), vec![-params[0]]),
        "xry" => ("ryx".into(), vec![-params[0]]),
        _ => match name.strip_suffix("^dg") {
            Some(base) => (base.to_owned(), params.to_vec()),
            None => (format!("{name}^dg"), params.to_vec()),
        },
    }
}

fn real2(a: f64, b: f64, c: f64, d: f64) -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[a, b, c, d]).expect("2x2")
}

pub fn identity() -> Gate {
    Gate::known("id", vec![], ComplexMatrix::identity(2))
}

pub fn h() -> Gate {
    let s = FRAC_1_SQRT_2;
    Gate::known("h", vec![], real2(s, s, s, -s))
}

pub fn x() -> Gate {
    Gate::known("x", vec![], real2(0.0, 1.0, 1.0, 0.0))
}

pub fn y() -> Gate {
    let m = ComplexMatrix::new(
        2,
        2,
        vec![
            ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            ZERO,
        ],
    )
    .expect("2x2");
    Gate::known("y", vec![], m)
}

pub fn z() -> Gate {
    Gate::known("z", vec![], real2(1.0, 0.0, 0.0, -1.0))
}

fn ry_matrix(alpha: f64) -> ComplexMatrix {
    let (s, c) = (alpha / 2.0).sin_cos();
    real2(c, -s, s, c)
}

/// `exp(-i α σ_y / 2)`.
pub fn ry(alpha: f64) -> Gate {
    Gate::known("ry", vec![alpha], ry_matrix(alpha))
}

/// The product `R_y(α) σ_x` as one gate.
pub fn ry_x(alpha: f64) -> Gate {
    let m = ry_matrix(alpha).matmul(x().matrix()).expect("2x2");
    Gate::known("ryx", vec![alpha], m)
}

/// The product `σ_x R_y(α)` as one gate.
pub fn x_ry(alpha: f64) -> Gate {
    let m = x().matrix().matmul(&ry_matrix(alpha)).expect("2x2");
    Gate::known("xry", vec![alpha], m)
}

pub fn cnot() -> Gate {
    let mut g = controlled(&x(), 1);
    g.name = "cx".into();
    g
}

pub fn toffoli() -> Gate {
    let mut g = controlled(&cnot(), 1);
    g.name = "ccx".into();
    g
}

pub fn swap() -> Gate {
    let mut m = vec![ZERO; 16];
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[r * 4 + c] = ONE;
    }
    Gate::known("swap", vec![], ComplexMatrix::new(4, 4, m).expect("4x4"))
}

/// Adds a control wire in front of `gate`. With `control_value == 1` the
/// gate fires when the control is |1⟩; with `0` it is an open control.
pub fn controlled(gate: &Gate, control_value: u8) -> Gate {
    let dim = gate.matrix.rows();
    let id = ComplexMatrix::identity(dim);
    let m = if control_value == 0 {
        gate.matrix.direct_sum(&id)
    } else {
        id.direct_sum(&gate.matrix)
    };
    let prefix = if control_value == 0 { "o-" } else { "c-" };
    Gate::known(&format!("{prefix}{}", gate.name), gate.params.clone(), m)
}

/// Looks a gate up by its text-format name. Prefixes `c-` and `o-` add a
/// closed or open control to the remainder of the name.
pub fn from_name(name: &str, params: &[f64]) -> Result<Gate> {
    if let Some(inner) = name.strip_prefix("c-") {
        return Ok(controlled(&from_name(inner, params)?, 1));
    }
    if let Some(inner) = name.strip_prefix("o-") {
        return Ok(controlled(&from_name(inner, params)?, 0));
    }
    let want = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "gate `{name}` takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let finite = || {
        if params.iter().all(|p| p.is_finite()) {
            Ok(())
        } else {
            Err(Error::Parse(format!("non-finite parameter for `{name}`")))
        }
    };
    finite()?;
    match name {
        "id" => want(0).map(|_| identity()),
        "h" => want(0).map(|_| h()),
        "x" => want(0).map(|_| x()),
        "y" => want(0).map(|_| y()),
        "z" => want(0).map(|_| z()),
        "cx" => want(0).map(|_| cnot()),
        "ccx" => want(0).map(|_| toffoli()),
        "swap" => want(0).map(|_| swap()),
        "ry" => want(1).map(|_| ry(params[0])),
        "ryx" => want(1).map(|_| ry_x(params[0])),
        "xry" => want(1).map(|_| x_ry(params[0])),
        _ => Err(Error::Parse(format!("unknown gate `{name}`"))),
    }
}

/// A gate bound to register wires; `wires[0]` carries the gate's
/// most-significant qubit.
#[derive(Clone, PartialEq)]
pub struct PlacedGate {
    gate: Gate,
    wires: Vec<usize>,
}

impl PlacedGate {
    pub fn new(gate: Gate, wires: &[usize]) -> Result<Self> {
        if wires.len() != gate.arity {
            return Err(Error::InvalidWires(format!(
                "gate {} acts on {} wire(s), {} given",
                gate.label(),
                gate.arity,
                wires.len()
            )));
        }
        for (i, w) in wires.iter().enumerate() {
            if wires[..i].contains(w) {
                return Err(Error::InvalidWires(format!(
                    "wire {w} repeated in {wires:?}"
                )));
            }
        }
        Ok(PlacedGate {
            gate,
            wires: wires.to_vec(),
        })
    }

    pub fn gate(&self) -> &Gate {
        &self.gate
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires
    }

    pub fn check_register(&self, n_wires: usize) -> Result<()> {
        match self.wires.iter().find(|&&w| w >= n_wires) {
            Some(w) => Err(Error::InvalidWires(format!(
                "wire {w} outside a {n_wires}-wire register"
            ))),
            None => Ok(()),
        }
    }

    pub fn dagger(&self) -> PlacedGate {
        PlacedGate {
            gate: self.gate.dagger(),
            wires: self.wires.clone(),
        }
    }

    /// Parses one line of the circuit text format, `name(params) @ w0,w1`.
    pub fn parse(line: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("{why} in `{line}`"));
        let (head, wires) = line.split_once('@').ok_or_else(|| bad("missing `@`"))?;
        let wires: Vec<usize> = wires
            .split(',')
            .map(|w| w.trim().parse::<usize>().map_err(|_| bad("bad wire index")))
            .collect::<Result<_>>()?;
        let head = head.trim();
        let (name, params) = match head.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| bad("unclosed parameter list"))?;
                let params: Vec<f64> = inner
                    .split(',')
                    .map(|p| p.trim().parse::<f64>().map_err(|_| bad("bad parameter")))
                    .collect::<Result<_>>()?;
                (name.trim(), params)
            }
            None => (head, Vec::new()),
        };
        PlacedGate::new(from_name(name, &params)?, &wires)
    }
}

impl fmt::Display for PlacedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws: Vec<String> = self.wires.iter().map(usize::to_string).collect();
        write!(f, "{} @ {}", self.gate.label(), ws.join(","))
    }
}

impl fmt::Debug for PlacedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Full `2^n × 2^n` unitary of a placed gate, identity on the other wires.
pub fn embed(pg: &PlacedGate, n_wires: usize) -> Result<ComplexMatrix> {
    pg.check_register(n_wires)?;
    let mut m = ComplexMatrix::identity(1 << n_wires);
    apply_to_rows(
        m.entries_mut(),
        n_wires,
        1 << n_wires,
        pg.gate.matrix(),
        &pg.wires,
    );
    Ok(m)
}

/// Multiplies a `2^n × ncols` row-major block on the left by the embedding
/// of `gate` on `wires`, in place. Wires must already be validated.
pub(crate) fn apply_to_rows(
    data: &mut [Complex64],
    n_wires: usize,
    ncols: usize,
    gate: &ComplexMatrix,
    wires: &[usize],
) {
    debug_assert_eq!(data.len(), ncols << n_wires);
    apply_strided(data, n_wires, gate, wires, ncols, 1, ncols);
}

/// Multiplies a `nrows × 2^n` row-major block on the right by the embedding
/// of `gate†` on `wires`, in place.
pub(crate) fn apply_dagger_to_cols(
    data: &mut [Complex64],
    n_wires: usize,
    nrows: usize,
    gate: &ComplexMatrix,
    wires: &[usize],
) {
    debug_assert_eq!(data.len(), nrows << n_wires);
    // (A G†)_{ij} = sum_k A_ik conj(G_jk): each row is a vector transformed by conj(G).
    let conj = gate.entries().iter().map(|z| z.conj()).collect();
    let conj = ComplexMatrix::from_raw(gate.rows(), gate.cols(), conj);
    apply_strided(data, n_wires, &conj, wires, 1, 1 << n_wires, nrows);
}

/// Core kernel: the basis index `x` of the register and an unrelated index
/// `y < n_other` address `data[x * basis_stride + y * other_stride]`.
fn apply_strided(
    data: &mut [Complex64],
    n_wires: usize,
    gate: &ComplexMatrix,
    wires: &[usize],
    basis_stride: usize,
    other_stride: usize,
    n_other: usize,
) {
    let k = wires.len();
    let local = 1usize << k;
    debug_assert_eq!(gate.rows(), local);
    let bit = |w: usize| 1usize << (n_wires - 1 - w);
    let offsets: Vec<usize> = (0..local)
        .map(|l| {
            (0..k)
                .filter(|j| (l >> (k - 1 - j)) & 1 == 1)
                .map(|j| bit(wires[j]))
                .sum::<usize>()
                * basis_stride
        })
        .collect();
    let mask: usize = wires.iter().map(|&w| bit(w)).sum();
    let g = gate.entries();
    let mut gathered = vec![ZERO; local];
    for base in (0..1usize << n_wires).filter(|b| b & mask == 0) {
        for y in 0..n_other {
            let origin = base * basis_stride + y * other_stride;
            for (slot, off) in gathered.iter_mut().zip(&offsets) {
                *slot = data[origin + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &g[r * local..(r + 1) * local];
                data[origin + off] = row.iter().zip(&gathered).map(|(a, b)| a * b).sum();
            }
        }
    }
}
