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

//! Error-avoiding code for fully-correlated noise `W^{⊗n}`.
//!
//! The 8×8 encoder `U` satisfies `U†(W⊗W⊗W)U = (I₂⊗W) ⊕ F_W` for every
//! `W ∈ SU(2)`, so a register prepared as `|0⟩|ψ⟩|v⟩` (wire 0 first) comes
//! back as `|0⟩|ψ⟩(W|v⟩)` after encode, noise, decode. For a general
//! `W ∈ U(2)` the upper block picks up the scalar `det W`, which is a global
//! phase on the protected subspace.
//!
//! Wire roles for the three-qubit code: wire 0 is the pure ancilla, wire 1
//! the data qubit, wire 2 the arbitrary qubit that absorbs `W`. Diagrams
//! that label qubits `q₀…q₂` from the least-significant end map
//! `qᵢ` to wire `2 - i`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, DensityMatrix, QuantumState, StateVector, MAX_WIRES};
use crate::error::{Error, Result};
use crate::gates::{self, controlled};
use crate::linalg::{kron, kron_all, max_abs_diff, ComplexMatrix, Tolerance, ONE, ZERO};

fn sqrt(x: f64) -> f64 {
    x.sqrt()
}

/// Rotation angle of the controlled `R_y(α)σ_x` gate, `2·asin(√(1/3))`.
pub fn alpha() -> f64 {
    2.0 * sqrt(1.0 / 3.0).asin()
}

/// Angle of the earlier (incorrect) three-gate decomposition,
/// `sin(θ/2) = -√(2/3)`.
pub fn theta_legacy() -> f64 {
    -2.0 * sqrt(2.0 / 3.0).asin()
}

/// The encoder that the legacy circuit was claimed to implement.
pub fn build_old_u() -> ComplexMatrix {
    let (a, b, c, d) = (sqrt(2.0 / 3.0), sqrt(1.0 / 3.0), sqrt(1.0 / 6.0), sqrt(0.5));
    #[rustfmt::skip]
    let rows = [
        0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0,
        a,   0.0, 0.0, 0.0, 0.0, b,   0.0, 0.0,
        -c,  0.0, d,   0.0, 0.0, b,   0.0, 0.0,
        0.0, c,   0.0, d,   0.0, 0.0, b,   0.0,
        -c,  0.0, -d,  0.0, 0.0, b,   0.0, 0.0,
        0.0, c,   0.0, -d,  0.0, 0.0, b,   0.0,
        0.0, -a,  0.0, 0.0, 0.0, 0.0, b,   0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
    ];
    ComplexMatrix::from_real(8, 8, &rows).expect("8x8")
}

/// The encoder used throughout: same first four columns as
/// [`build_old_u`], different completion so it factors into six gates.
pub fn build_new_u() -> ComplexMatrix {
    let (a, b, c, d) = (sqrt(2.0 / 3.0), sqrt(1.0 / 3.0), sqrt(1.0 / 6.0), sqrt(0.5));
    #[rustfmt::skip]
    let rows = [
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0,
        a,   0.0, 0.0, 0.0, b,   0.0, 0.0, 0.0,
        -c,  0.0, d,   0.0, b,   0.0, 0.0, 0.0,
        0.0, c,   0.0, d,   0.0, -b,  0.0, 0.0,
        -c,  0.0, -d,  0.0, b,   0.0, 0.0, 0.0,
        0.0, c,   0.0, -d,  0.0, -b,  0.0, 0.0,
        0.0, -a,  0.0, 0.0, 0.0, -b,  0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
    ];
    ComplexMatrix::from_real(8, 8, &rows).expect("8x8")
}

/// Six-gate factorization with three CNOT-type gates, one σ_z and two
/// controlled rotations. In time order: controlled `R_y(α)σ_x`, controlled
/// `R_y(π/2)`, `σ_z`, then three CNOTs.
pub fn standard_decomposition() -> Circuit {
    let mut c = Circuit::new(3).expect("3 wires");
    let steps = [
        (controlled(&gates::ry_x(alpha()), 0), vec![1, 0]),
        (controlled(&gates::ry(FRAC_PI_2), 0), vec![0, 1]),
        // σ_z sits on the last wire; placing it on wire 0 does not reproduce U.
        (gates::z(), vec![2]),
        (gates::cnot(), vec![2, 1]),
        (gates::cnot(), vec![0, 2]),
        (controlled(&gates::x(), 0), vec![1, 0]),
    ];
    for (g, w) in steps {
        c.push(g, &w).expect("valid placement");
    }
    c
}

/// Fourteen-gate factorization using only CNOTs and single-qubit gates
/// (6 two-wire, 8 one-wire).
pub fn basic_decomposition() -> Circuit {
    let a = alpha();
    let quarter = std::f64::consts::FRAC_PI_4;
    let mut c = Circuit::new(3).expect("3 wires");
    let steps = [
        (gates::x(), vec![1]),
        (gates::ry(-a / 2.0), vec![0]),
        (gates::cnot(), vec![1, 0]),
        (gates::x_ry(a / 2.0), vec![0]),
        (gates::cnot(), vec![0, 1]),
        (gates::ry(quarter), vec![1]),
        (gates::cnot(), vec![0, 1]),
        (gates::x(), vec![0]),
        (gates::ry(-quarter), vec![1]),
        (gates::z(), vec![2]),
        (gates::cnot(), vec![2, 1]),
        (gates::cnot(), vec![0, 2]),
        (gates::cnot(), vec![1, 0]),
        (gates::x(), vec![1]),
    ];
    for (g, w) in steps {
        c.push(g, &w).expect("valid placement");
    }
    c
}

/// Which factorization of the encoder to use when building circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Decomposition {
    #[default]
    Standard,
    Basic,
}

impl Decomposition {
    pub fn circuit(self) -> Circuit {
        match self {
            Decomposition::Standard => standard_decomposition(),
            Decomposition::Basic => basic_decomposition(),
        }
    }
}

fn ket(bits: [usize; 3]) -> Vec<Complex64> {
    let mut v = vec![ZERO; 8];
    v[bits[0] << 2 | bits[1] << 1 | bits[2]] = ONE;
    v
}

fn ket2(first: [f64; 2], mid: [f64; 2], last: [f64; 2]) -> Vec<Complex64> {
    let v = |x: [f64; 2]| ComplexMatrix::from_real(2, 1, &x).expect("2x1");
    kron_all([&v(first), &v(mid), &v(last)]).into_entries()
}

/// The six factors `U₁…U₆` of the legacy circuit, built column by column.
pub fn erroneous_decomposition_factors() -> [ComplexMatrix; 6] {
    let s3 = sqrt(3.0);
    let a1 = [1.0 / s3, -sqrt(2.0) / s3];
    let a2 = [sqrt(2.0) / s3, 1.0 / s3];
    let b1 = [1.0 / sqrt(2.0), -1.0 / sqrt(2.0)];
    let b2 = [1.0 / sqrt(2.0), 1.0 / sqrt(2.0)];
    let e0 = [1.0, 0.0];
    let e1 = [0.0, 1.0];
    let from_cols =
        |cols: Vec<Vec<Complex64>>| ComplexMatrix::from_columns(&cols).expect("8 columns");

    // Basis columns given as bit triples.
    let perm = |cols: [[usize; 3]; 8]| from_cols(cols.iter().map(|b| ket(*b)).collect());

    let u1 = from_cols(vec![
        ket2(e0, e0, e0),
        ket2(e0, e0, e1),
        ket2(a1, e1, e0),
        ket2(a1, e1, e1),
        ket2(e1, e0, e0),
        ket2(e1, e0, e1),
        ket2(a2, e1, e0),
        ket2(a2, e1, e1),
    ]);
    let u2 = from_cols(vec![
        ket2(e0, b1, e0),
        ket2(e0, b1, e1),
        ket2(e0, b2, e0),
        ket2(e0, b2, e1),
        ket2(e1, e0, e0),
        ket2(e1, e0, e1),
        ket2(e1, e1, e0),
        ket2(e1, e1, e1),
    ]);
    let u3 = kron(&ComplexMatrix::identity(4), gates::z().matrix());
    let u4 = perm([
        [0, 0, 0],
        [1, 0, 1],
        [0, 1, 0],
        [1, 1, 1],
        [1, 0, 0],
        [0, 0, 1],
        [1, 1, 0],
        [0, 1, 1],
    ]);
    let u5 = perm([
        [0, 0, 1],
        [0, 0, 0],
        [0, 1, 0],
        [0, 1, 1],
        [1, 0, 1],
        [1, 0, 0],
        [1, 1, 0],
        [1, 1, 1],
    ]);
    let u6 = perm([
        [0, 0, 0],
        [0, 0, 1],
        [0, 1, 0],
        [0, 1, 1],
        [1, 1, 0],
        [1, 1, 1],
        [1, 0, 0],
        [1, 0, 1],
    ]);
    [u1, u2, u3, u4, u5, u6]
}

/// `U₆U₅U₄U₃U₂U₁` of the legacy circuit. It is not the encoder it was
/// claimed to realize.
pub fn erroneous_decomposition_product() -> ComplexMatrix {
    erroneous_decomposition_factors()
        .iter()
        .fold(ComplexMatrix::identity(8), |acc, f| {
            f.matmul(&acc).expect("8x8")
        })
}

/// The legacy product as published, rounded to four decimals.
#[rustfmt::skip]
#[allow(clippy::approx_constant)]
pub const ERRONEOUS_PRODUCT_ROUNDED: [[f64; 8]; 8] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0],
    [0.7071, 0.0, 0.4082, 0.0, 0.0, 0.0, 0.5774, 0.0],
    [-0.7071, 0.0, 0.4082, 0.0, 0.0, 0.0, 0.5774, 0.0],
    [0.0, 0.0, 0.0, 0.8165, 0.0, 0.0, 0.0, -0.5774],
    [0.0, 0.0, -0.8165, 0.0, 0.0, 0.0, 0.5774, 0.0],
    [0.0, 0.7071, 0.0, -0.4082, 0.0, 0.0, 0.0, -0.5774],
    [0.0, -0.7071, 0.0, -0.4082, 0.0, 0.0, 0.0, -0.5774],
    [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
];

/// Result of checking the block structure of `U†(W⊗W⊗W)U`.
#[derive(Debug, Clone)]
pub struct BlockReport {
    pub top_left: ComplexMatrix,
    pub bottom_right: ComplexMatrix,
    /// Largest entry of the two off-diagonal 4×4 blocks.
    pub off_diag_norm: f64,
    /// `max |top_left - I₂⊗W|`.
    pub top_left_deviation: f64,
    /// `det W`; equals 1 on SU(2).
    pub det_w: Complex64,
    /// `max |top_left - det(W)·(I₂⊗W)|`.
    pub phase_adjusted_deviation: f64,
}

impl BlockReport {
    pub fn is_block_diagonal(&self, tol: Tolerance) -> bool {
        self.off_diag_norm <= tol.epsilon()
    }
}

pub fn verify_block_structure(u: &ComplexMatrix, w: &ComplexMatrix) -> Result<BlockReport> {
    if u.rows() != 8 || u.cols() != 8 || w.rows() != 2 || w.cols() != 2 {
        return Err(Error::DimensionMismatch(
            "block check needs an 8x8 U and a 2x2 W".into(),
        ));
    }
    for m in [u, w] {
        let deviation = m.unitarity_deviation()?;
        if deviation > Tolerance::LOOSE.epsilon() {
            return Err(Error::NotUnitary { deviation });
        }
    }
    let conj = u.dagger().matmul(&kron_all([w, w, w]))?.matmul(u)?;
    let top_left = conj.block(0, 0, 4, 4)?;
    let bottom_right = conj.block(4, 4, 4, 4)?;
    let off_diag_norm = conj
        .block(0, 4, 4, 4)?
        .max_abs()
        .max(conj.block(4, 0, 4, 4)?.max_abs());
    let expected = kron(&ComplexMatrix::identity(2), w);
    let det_w = w.det2()?;
    Ok(BlockReport {
        top_left_deviation: max_abs_diff(&top_left, &expected)?,
        phase_adjusted_deviation: max_abs_diff(&top_left, &expected.scale(det_w))?,
        top_left,
        bottom_right,
        off_diag_norm,
        det_w,
    })
}

/// Finitely supported mixture of collective unitaries,
/// `ρ ↦ Σ pᵢ Wᵢ^{⊗n} ρ Wᵢ^{⊗n}†`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedChannel {
    n_qubits: usize,
    support: Vec<(ComplexMatrix, f64)>,
}

pub fn make_channel(
    n_qubits: usize,
    support: Vec<(ComplexMatrix, f64)>,
) -> Result<CorrelatedChannel> {
    if n_qubits == 0 || n_qubits > MAX_WIRES {
        return Err(Error::InvalidChannel(format!(
            "{n_qubits} qubits is outside 1..={MAX_WIRES}"
        )));
    }
    if support.is_empty() {
        return Err(Error::InvalidChannel("empty support".into()));
    }
    let mut total = 0.0;
    for (w, p) in &support {
        if w.rows() != 2 || w.cols() != 2 {
            return Err(Error::InvalidChannel("atoms must be 2x2".into()));
        }
        let deviation = w.unitarity_deviation()?;
        if deviation > Tolerance::STRICT.epsilon() {
            return Err(Error::InvalidChannel(format!(
                "atom is not unitary (deviation {deviation:e})"
            )));
        }
        if !(p.is_finite() && *p >= 0.0) {
            return Err(Error::InvalidChannel(format!("bad probability {p}")));
        }
        total += p;
    }
    if (total - 1.0).abs() > Tolerance::STRICT.epsilon() {
        return Err(Error::InvalidChannel(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(CorrelatedChannel { n_qubits, support })
}

impl CorrelatedChannel {
    /// Channel that always applies `w`.
    pub fn single(n_qubits: usize, w: ComplexMatrix) -> Result<Self> {
        make_channel(n_qubits, vec![(w, 1.0)])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn support(&self) -> &[(ComplexMatrix, f64)] {
        &self.support
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n_wires() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit channel on a {}-wire state",
                self.n_qubits,
                rho.n_wires()
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, p) in &self.support {
            if *p == 0.0 {
                continue;
            }
            let mut term = rho.clone();
            for wire in 0..self.n_qubits {
                term.conjugate_in_place(w, &[wire]);
            }
            for (a, t) in acc.entries_mut().iter_mut().zip(term.matrix().entries()) {
                *a += t * *p;
            }
        }
        Ok(DensityMatrix::from_raw(self.n_qubits, acc))
    }
}

pub fn apply_channel(ch: &CorrelatedChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ch.apply(rho)
}

/// Serializable description of a [`CorrelatedChannel`]: each atom names its
/// unitary with a selector understood by [`parse_unitary_selector`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub n: usize,
    pub support: Vec<ChannelAtom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelAtom {
    pub w: String,
    pub p: f64,
}

impl ChannelSpec {
    pub fn build(&self) -> Result<CorrelatedChannel> {
        let support = self
            .support
            .iter()
            .map(|a| Ok((parse_unitary_selector(&a.w)?, a.p)))
            .collect::<Result<Vec<_>>>()?;
        make_channel(self.n, support)
    }
}

/// Parses `{ "n": 3, "support": [ {"w": "h", "p": 0.5}, ... ] }`.
pub fn channel_from_json(text: &str) -> Result<CorrelatedChannel> {
    serde_json::from_str::<ChannelSpec>(text)?.build()
}

/// Parses a single-qubit unitary selector: `h`, `x`, `y`, `z`, `i`,
/// `ry:<alpha>`, or `matrix:[e00,e01,e10,e11]` where each entry is a real
/// number or a `[re, im]` pair.
pub fn parse_unitary_selector(selector: &str) -> Result<ComplexMatrix> {
    let s = selector.trim();
    let lower = s.to_ascii_lowercase();
    let m = match lower.as_str() {
        "h" => gates::h().matrix().clone(),
        "x" => gates::x().matrix().clone(),
        "y" => gates::y().matrix().clone(),
        "z" => gates::z().matrix().clone(),
        "i" | "id" => ComplexMatrix::identity(2),
        _ => {
            if let Some(angle) = lower.strip_prefix("ry:") {
                let a: f64 = angle
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad angle in `{selector}`")))?;
                if !a.is_finite() {
                    return Err(Error::Parse(format!("bad angle in `{selector}`")));
                }
                gates::ry(a).matrix().clone()
            } else if let Some(body) = s.strip_prefix("matrix:") {
                parse_matrix_literal(body)?
            } else {
                return Err(Error::Parse(format!(
                    "unknown unitary selector `{selector}`"
                )));
            }
        }
    };
    let deviation = m.unitarity_deviation()?;
    if deviation > Tolerance::STRICT.epsilon() {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(m)
}

fn parse_matrix_literal(body: &str) -> Result<ComplexMatrix> {
    let bad = || Error::Parse(format!("bad matrix literal `{body}`"));
    let value: serde_json::Value = serde_json::from_str(body).map_err(|_| bad())?;
    let entries = value.as_array().ok_or_else(bad)?;
    if entries.len() != 4 {
        return Err(bad());
    }
    let data = entries
        .iter()
        .map(|e| match e {
            serde_json::Value::Number(n) => {
                n.as_f64().map(|re| Complex64::new(re, 0.0)).ok_or_else(bad)
            }
            serde_json::Value::Array(pair) if pair.len() == 2 => {
                match (pair[0].as_f64(), pair[1].as_f64()) {
                    (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::new(2, 2, data)
}

/// Outcome of one protection experiment.
#[derive(Debug, Clone)]
pub struct ProtectionOutcome {
    pub fidelity_data: f64,
    pub final_state: DensityMatrix,
}

/// Encodes `|0⟩|ψ⟩|v⟩`, lets `ch` act `rounds` times, decodes, and reports
/// the fidelity of wire 1 with `ψ`.
pub fn three_qubit_protect(
    psi: &StateVector,
    v: &StateVector,
    ch: &CorrelatedChannel,
    rounds: usize,
) -> Result<ProtectionOutcome> {
    protect_with_encoder(&build_new_u(), psi, v, ch, rounds)
}

/// [`three_qubit_protect`] with a caller-supplied 8×8 encoder.
pub fn protect_with_encoder(
    encoder: &ComplexMatrix,
    psi: &StateVector,
    v: &StateVector,
    ch: &CorrelatedChannel,
    rounds: usize,
) -> Result<ProtectionOutcome> {
    if ch.n_qubits() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "need a 3-qubit channel, got {}",
            ch.n_qubits()
        )));
    }
    if psi.n_wires() != 1 || v.n_wires() != 1 {
        return Err(Error::InvalidState(
            "psi and v must be single qubits".into(),
        ));
    }
    if rounds == 0 {
        return Err(Error::OutOfRange("rounds must be >= 1".into()));
    }
    let input = StateVector::product(&[StateVector::zero(1)?, psi.clone(), v.clone()])?;
    let mut rho = input.to_density().apply_matrix(encoder)?;
    for _ in 0..rounds {
        rho = ch.apply(&rho)?;
    }
    let final_state = rho.apply_matrix(&encoder.dagger())?;
    let fidelity_data = final_state.partial_trace(&[1])?.fidelity_with(psi)?;
    Ok(ProtectionOutcome {
        fidelity_data,
        final_state,
    })
}

/// Largest supported recursion depth (2k+1 wires must fit the simulator).
pub const MAX_RECURSION: usize = (MAX_WIRES - 1) / 2;

/// Wire roles of the `2k+1`-wire recursive code: data on odd wires, the
/// arbitrary qubit on wire 2, pure ancillas on the remaining even wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursiveLayout {
    pub n_wires: usize,
    pub data: Vec<usize>,
    pub pure_ancillas: Vec<usize>,
    pub free_wire: usize,
}

pub fn recursive_layout(k: usize) -> Result<RecursiveLayout> {
    check_depth(k)?;
    Ok(RecursiveLayout {
        n_wires: 2 * k + 1,
        data: (1..=k).map(|j| 2 * j - 1).collect(),
        pure_ancillas: std::iter::once(0).chain((2..=k).map(|j| 2 * j)).collect(),
        free_wire: 2,
    })
}

fn check_depth(k: usize) -> Result<()> {
    if k == 0 || k > MAX_RECURSION {
        return Err(Error::OutOfRange(format!(
            "recursion depth {k} outside 1..={MAX_RECURSION}"
        )));
    }
    Ok(())
}

/// Encoder for `k` data qubits on `2k+1` wires, using the standard
/// decomposition for every block.
pub fn recursive_encoder(k: usize) -> Result<Circuit> {
    recursive_encoder_with(k, &standard_decomposition())
}

/// Recursive encoder built from a given three-wire block.
///
/// Block 1 acts on wires `(0, 1, 2)` in that role order (pure, data, free).
/// Block `j ≥ 2` acts on `(2j, 2j-1, 2j-2)`: it is the same gate sequence
/// with its first and last wires swapped, and it uses the previous block's
/// pure wire (the free wire for `j = 2`) as its free slot. Blocks are
/// applied in order, so decoding peels them off from the last one.
pub fn recursive_encoder_with(k: usize, block: &Circuit) -> Result<Circuit> {
    check_depth(k)?;
    if block.n_wires() != 3 {
        return Err(Error::DimensionMismatch(
            "recursive blocks must act on 3 wires".into(),
        ));
    }
    let n = 2 * k + 1;
    let mut circuit = block.remap(&[0, 1, 2], n)?;
    for j in 2..=k {
        circuit = circuit.then(&block.remap(&[2 * j, 2 * j - 1, 2 * j - 2], n)?)?;
    }
    Ok(circuit)
}

fn five_qubit_column_gates(theta: f64, decode: bool) -> Vec<(gates::Gate, Vec<usize>)> {
    let half_pi = FRAC_PI_2;
    let oc = |g: gates::Gate| controlled(&g, 0);
    if !decode {
        vec![
            (oc(gates::ry_x(theta)), vec![1, 0]),
            (gates::z(), vec![2]),
            (oc(gates::ry_x(theta)), vec![3, 4]),
            (oc(gates::ry(half_pi)), vec![0, 1]),
            (oc(gates::ry(half_pi)), vec![4, 3]),
            (gates::cnot(), vec![2, 1]),
            (gates::cnot(), vec![0, 2]),
            (oc(gates::x()), vec![1, 0]),
            (gates::z(), vec![2]),
            (gates::cnot(), vec![2, 3]),
            (gates::cnot(), vec![4, 2]),
            (oc(gates::x()), vec![3, 4]),
        ]
    } else {
        vec![
            (oc(gates::x()), vec![3, 4]),
            (gates::cnot(), vec![4, 2]),
            (gates::cnot(), vec![2, 3]),
            (oc(gates::x()), vec![1, 0]),
            (gates::z(), vec![2]),
            (gates::cnot(), vec![0, 2]),
            (gates::cnot(), vec![2, 1]),
            (oc(gates::ry(-half_pi)), vec![0, 1]),
            (oc(gates::ry(-half_pi)), vec![4, 3]),
            (oc(gates::x_ry(-theta)), vec![1, 0]),
            (gates::z(), vec![2]),
            (oc(gates::x_ry(-theta)), vec![3, 4]),
        ]
    }
}

/// The explicit gate-level encoder of the five-qubit scheme, with the angle
/// of its controlled `R_y(θ)σ_x` gates left as a parameter.
pub fn explicit_five_qubit_encoder(theta: f64) -> Circuit {
    build_five_wire(five_qubit_column_gates(theta, false))
}

/// The explicit gate-level decoder of the five-qubit scheme.
pub fn explicit_five_qubit_decoder(theta: f64) -> Circuit {
    build_five_wire(five_qubit_column_gates(theta, true))
}

fn build_five_wire(steps: Vec<(gates::Gate, Vec<usize>)>) -> Circuit {
    let mut c = Circuit::new(5).expect("5 wires");
    for (g, w) in steps {
        c.push(g, &w).expect("valid placement");
    }
    c
}

/// Outcome of a recursive-code run.
#[derive(Debug, Clone)]
pub struct RecursiveOutcome {
    /// Fidelity of each data wire with its input, in layout order.
    pub data_fidelities: Vec<f64>,
    /// Fidelity of each pure ancilla with `|0⟩`, in layout order.
    pub ancilla_fidelities: Vec<f64>,
    pub final_state: StateVector,
}

/// Runs the recursive code on pure states with a single collective error
/// `w` applied `rounds` times: encode, `(W^{⊗n})^rounds`, decode.
pub fn recursive_protect(
    encoder: &Circuit,
    data: &[StateVector],
    free: &StateVector,
    w: &ComplexMatrix,
    rounds: usize,
) -> Result<RecursiveOutcome> {
    let n = encoder.n_wires();
    if n.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "recursive encoders have odd width, got {n}"
        )));
    }
    let layout = recursive_layout(n / 2)?;
    if data.len() != layout.data.len() || data.iter().chain([free]).any(|s| s.n_wires() != 1) {
        return Err(Error::InvalidState(format!(
            "need {} single-qubit data states",
            layout.data.len()
        )));
    }
    let mut parts = vec![StateVector::zero(1)?; n];
    for (wire, psi) in layout.data.iter().zip(data) {
        parts[*wire] = psi.clone();
    }
    parts[layout.free_wire] = free.clone();
    let mut state = encoder.apply(&StateVector::product(&parts)?)?;
    for _ in 0..rounds {
        for wire in 0..n {
            state = state.apply_gate(w, &[wire])?;
        }
    }
    let final_state = encoder.inverse().apply(&state)?;
    let data_fidelities = layout
        .data
        .iter()
        .zip(data)
        .map(|(&wire, psi)| final_state.reduced(&[wire])?.fidelity_with(psi))
        .collect::<Result<_>>()?;
    let zero = StateVector::zero(1)?;
    let ancilla_fidelities = layout
        .pure_ancillas
        .iter()
        .map(|&wire| final_state.reduced(&[wire])?.fidelity_with(&zero))
        .collect::<Result<_>>()?;
    Ok(RecursiveOutcome {
        data_fidelities,
        ancilla_fidelities,
        final_state,
    })
}

/// Identity 2×2 helper used by callers that build channels programmatically.
pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![ONE, ZERO, ZERO, ONE]).expect("2x2")
}
