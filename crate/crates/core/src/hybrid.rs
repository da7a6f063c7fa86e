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

//! Hybrid encoders that turn `W^{⊗n}` into an operator on one or two
//! ancilla wires for `W ∈ {I, σx, σy, σz}`.
//!
//! `P_n† W^{⊗n} P_n` acts on the leading wires only: wire 0 for odd `n`,
//! wires 0 and 1 for even `n`. The remaining wires carry the data and come
//! back untouched. For even `n` the two-wire action is diagonal up to phase,
//! so computational-basis ancillas are returned exactly.
//!
//! Qiskit-style diagrams label qubits `q₀…q_{n-1}` from the least-significant
//! end; label `qᵢ` is wire `n-1-i` here.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::{Circuit, DensityMatrix, QuantumState, StateVector, MAX_WIRES};
use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::{kron, kron_power, max_abs_diff, ComplexMatrix, Tolerance};

/// `(I⊗σz + σx⊗σx)/√2`.
pub fn p2_matrix() -> ComplexMatrix {
    let x = gates::x().matrix().clone();
    let z = gates::z().matrix().clone();
    let sum = kron(&ComplexMatrix::identity(2), &z)
        .add(&kron(&x, &x))
        .expect("4x4");
    sum.scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
}

/// The permutation `|abc⟩ ↦ |a⊕c, a⊕b, a⊕b⊕c⟩`.
pub fn p3_matrix() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(8, 8);
    for input in 0..8usize {
        let (a, b, c) = (input >> 2 & 1, input >> 1 & 1, input & 1);
        let output = (a ^ c) << 2 | (a ^ b) << 1 | (a ^ b ^ c);
        m = m
            .with_entry(output, input, Complex64::new(1.0, 0.0))
            .expect("in range");
    }
    m
}

/// `P_n` by recursion: `(I₂⊗P_{n-1})(P₂⊗I)` for even `n`,
/// `(I₄⊗P_{n-2})(P₃⊗I)` for odd `n ≥ 5`.
pub fn hybrid_matrix(n: usize) -> Result<ComplexMatrix> {
    check_n(n)?;
    Ok(match n {
        2 => p2_matrix(),
        3 => p3_matrix(),
        _ => {
            let (block, width) = if n.is_multiple_of(2) {
                (p2_matrix(), 2)
            } else {
                (p3_matrix(), 3)
            };
            let rest = hybrid_matrix(n - width + 1)?;
            let head = kron(&block, &ComplexMatrix::identity(1 << (n - width)));
            let tail = kron(&ComplexMatrix::identity(1 << (width - 1)), &rest);
            tail.matmul(&head)?
        }
    })
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_WIRES).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "hybrid code size {n} outside 2..={MAX_WIRES}"
        )));
    }
    Ok(())
}

/// CNOT, Hadamard, CNOT on two wires; equals [`p2_matrix`].
pub fn p2_circuit() -> Circuit {
    let mut c = Circuit::new(2).expect("2 wires");
    c.push(gates::cnot(), &[1, 0]).expect("valid");
    c.push(gates::h(), &[1]).expect("valid");
    c.push(gates::cnot(), &[1, 0]).expect("valid");
    c
}

/// Three CNOTs on three wires; equals [`p3_matrix`].
pub fn p3_circuit() -> Circuit {
    let mut c = Circuit::new(3).expect("3 wires");
    c.push(gates::cnot(), &[0, 1]).expect("valid");
    c.push(gates::cnot(), &[2, 0]).expect("valid");
    c.push(gates::cnot(), &[1, 2]).expect("valid");
    c
}

/// Gate-level `P_n`: the leading block first, then `P_{n-1}` (even `n`) or
/// `P_{n-2}` (odd `n`) on the trailing wires.
pub fn hybrid_circuit(n: usize) -> Result<Circuit> {
    check_n(n)?;
    Ok(match n {
        2 => p2_circuit(),
        3 => p3_circuit(),
        _ => {
            let (block, width) = if n.is_multiple_of(2) {
                (p2_circuit(), 2)
            } else {
                (p3_circuit(), 3)
            };
            let head = block.remap(&(0..width).collect::<Vec<_>>(), n)?;
            let rest = n - width + 1;
            let tail = hybrid_circuit(rest)?.remap(&(width - 1..n).collect::<Vec<_>>(), n)?;
            head.then(&tail)?
        }
    })
}

/// Wire index of the diagram label `q_label` in an `n`-wire register.
pub fn label_to_wire(n: usize, label: usize) -> usize {
    n - 1 - label
}

#[derive(Debug, Clone)]
pub struct HybridEncoder {
    pub n: usize,
    pub matrix: ComplexMatrix,
    pub circuit: Circuit,
}

pub fn hybrid_encoder(n: usize) -> Result<HybridEncoder> {
    Ok(HybridEncoder {
        n,
        matrix: hybrid_matrix(n)?,
        circuit: hybrid_circuit(n)?,
    })
}

impl HybridEncoder {
    pub fn ancilla_wires(&self) -> Vec<usize> {
        ancilla_wires(self.n)
    }

    pub fn data_wires(&self) -> Vec<usize> {
        data_wires(self.n)
    }
}

pub fn ancilla_wires(n: usize) -> Vec<usize> {
    if n.is_multiple_of(2) {
        vec![0, 1]
    } else {
        vec![0]
    }
}

pub fn data_wires(n: usize) -> Vec<usize> {
    (ancilla_wires(n).len()..n).collect()
}

/// Collective Pauli error `W` in `W^{⊗n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliErrorTag {
    I,
    X,
    Y,
    Z,
}

impl PauliErrorTag {
    pub const ALL: [PauliErrorTag; 4] = [
        PauliErrorTag::I,
        PauliErrorTag::X,
        PauliErrorTag::Y,
        PauliErrorTag::Z,
    ];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            PauliErrorTag::I => ComplexMatrix::identity(2),
            PauliErrorTag::X => gates::x().matrix().clone(),
            PauliErrorTag::Y => gates::y().matrix().clone(),
            PauliErrorTag::Z => gates::z().matrix().clone(),
        }
    }

    /// Parses a comma-separated list such as `x,z,y`. The empty string is
    /// the empty list.
    pub fn parse_list(text: &str) -> Result<Vec<PauliErrorTag>> {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl FromStr for PauliErrorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" => Ok(PauliErrorTag::I),
            "x" => Ok(PauliErrorTag::X),
            "y" => Ok(PauliErrorTag::Y),
            "z" => Ok(PauliErrorTag::Z),
            _ => Err(Error::Parse(format!("unknown Pauli error `{s}`"))),
        }
    }
}

impl fmt::Display for PauliErrorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PauliErrorTag::I => "i",
            PauliErrorTag::X => "x",
            PauliErrorTag::Y => "y",
            PauliErrorTag::Z => "z",
        };
        f.write_str(s)
    }
}

/// Single-qubit product of an error sequence, last error leftmost.
pub fn composed_error(errors: &[PauliErrorTag]) -> ComplexMatrix {
    errors.iter().fold(ComplexMatrix::identity(2), |acc, e| {
        e.matrix().matmul(&acc).expect("2x2")
    })
}

/// `P_n† W^{⊗n} P_n`.
pub fn conjugated_error(n: usize, w: PauliErrorTag) -> Result<ComplexMatrix> {
    let p = hybrid_matrix(n)?;
    p.dagger().matmul(&kron_power(&w.matrix(), n))?.matmul(&p)
}

/// Initial state of the ancilla wires.
#[derive(Debug, Clone, PartialEq)]
pub enum Ancilla {
    /// Computational basis bits, wire 0 first.
    Basis(String),
    /// The same single-qubit state on every ancilla wire.
    Qubit(StateVector),
}

impl Ancilla {
    /// Parses `01`-style bits or `ry:<angle>` (the state `R_y(angle)|0⟩`).
    pub fn parse(text: &str) -> Result<Ancilla> {
        let t = text.trim();
        if let Some(angle) = t.strip_prefix("ry:") {
            let a: f64 = angle
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad ancilla angle `{t}`")))?;
            if !a.is_finite() {
                return Err(Error::Parse(format!("bad ancilla angle `{t}`")));
            }
            let (s, c) = (a / 2.0).sin_cos();
            return Ok(Ancilla::Qubit(StateVector::qubit(
                Complex64::new(c, 0.0),
                Complex64::new(s, 0.0),
            )?));
        }
        if t.is_empty() || !t.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Parse(format!(
                "ancilla must be bits or ry:<angle>, got `{t}`"
            )));
        }
        Ok(Ancilla::Basis(t.to_string()))
    }

    fn state(&self, n_ancillas: usize) -> Result<StateVector> {
        match self {
            Ancilla::Basis(bits) => {
                if bits.len() != n_ancillas {
                    return Err(Error::InvalidState(format!(
                        "expected {n_ancillas} ancilla bits, got `{bits}`"
                    )));
                }
                StateVector::from_bits(bits)
            }
            Ancilla::Qubit(q) => {
                if q.n_wires() != 1 {
                    return Err(Error::InvalidState(
                        "ancilla qubit must be a single wire".into(),
                    ));
                }
                StateVector::product(&vec![q.clone(); n_ancillas])
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct HybridOutcome {
    /// Fidelity of the decoded data wires with the input data state. 1 when
    /// there are no data wires.
    pub fidelity_data: f64,
    /// For basis ancillas: max deviation of the decoded ancilla state from
    /// the input bits.
    pub ancilla_deviation: Option<f64>,
    pub final_state: StateVector,
}

impl HybridOutcome {
    pub fn ancilla_preserved(&self, tol: Tolerance) -> Option<bool> {
        self.ancilla_deviation.map(|d| d <= tol.epsilon())
    }
}

/// Encodes `ancilla ⊗ data`, applies the collective errors in order, decodes.
pub fn hybrid_protect(
    n: usize,
    data: &StateVector,
    ancilla: &Ancilla,
    errors: &[PauliErrorTag],
) -> Result<HybridOutcome> {
    let enc = hybrid_encoder(n)?;
    let anc_wires = enc.ancilla_wires();
    let data_wires = enc.data_wires();
    if data.n_wires() != data_wires.len() {
        return Err(Error::InvalidState(format!(
            "n = {n} carries {} data wires, got a {}-wire state",
            data_wires.len(),
            data.n_wires()
        )));
    }
    let input = ancilla.state(anc_wires.len())?.tensor(data)?;
    let mut state = input.apply_matrix(&enc.matrix)?;
    let w = composed_error(errors);
    for wire in 0..n {
        state = state.apply_gate(&w, &[wire])?;
    }
    let final_state = state.apply_matrix(&enc.matrix.dagger())?;
    let fidelity_data = if data_wires.is_empty() {
        1.0
    } else {
        final_state.reduced(&data_wires)?.fidelity_with(data)?
    };
    let ancilla_deviation = match ancilla {
        Ancilla::Basis(bits) => {
            let expected = StateVector::from_bits(bits)?.to_density();
            let got: DensityMatrix = final_state.reduced(&anc_wires)?;
            Some(max_abs_diff(got.matrix(), expected.matrix())?)
        }
        Ancilla::Qubit(_) => None,
    };
    Ok(HybridOutcome {
        fidelity_data,
        ancilla_deviation,
        final_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{equal_up_to_global_phase, kron_all};
    use crate::random::{random_state, rng_from_seed};

    #[test]
    fn p2_and_p3_entries() {
        let p2 = p2_matrix();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        #[rustfmt::skip]
        let expected = ComplexMatrix::from_real(4, 4, &[
            s, 0.0, 0.0, s,
            0.0, -s, s, 0.0,
            0.0, s, s, 0.0,
            s, 0.0, 0.0, -s,
        ]).unwrap();
        assert!(max_abs_diff(&p2, &expected).unwrap() < 1e-15);

        let p3 = p3_matrix();
        let v = ComplexMatrix::from_real(8, 1, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        let out: Vec<f64> = p3
            .matmul(&v)
            .unwrap()
            .entries()
            .iter()
            .map(|z| z.re)
            .collect();
        assert_eq!(out, vec![0.0, 7.0, 5.0, 2.0, 6.0, 1.0, 3.0, 4.0]);
        assert!(p3.is_unitary(Tolerance::STRICT).unwrap());
    }

    #[test]
    fn small_circuits_equal_matrices() {
        assert!(max_abs_diff(&p2_circuit().realize(), &p2_matrix()).unwrap() < 1e-15);
        assert!(max_abs_diff(&p3_circuit().realize(), &p3_matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn p2_conjugation_table() {
        let p2 = p2_matrix();
        for tag in PauliErrorTag::ALL {
            let w = tag.matrix();
            let c = p2
                .dagger()
                .matmul(&kron(&w, &w))
                .unwrap()
                .matmul(&p2)
                .unwrap();
            // Always diagonal in the computational basis.
            for r in 0..4 {
                for col in 0..4 {
                    if r != col {
                        assert!(c.get(r, col).norm() < 1e-15, "{tag} ({r},{col})");
                    }
                }
            }
        }
        assert!(
            max_abs_diff(
                &conjugated_error(2, PauliErrorTag::I).unwrap(),
                &ComplexMatrix::identity(4)
            )
            .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn conjugated_errors_act_on_ancillas_only() {
        for n in 2..=MAX_WIRES {
            let k = ancilla_wires(n).len();
            let rest = ComplexMatrix::identity(1 << (n - k));
            for tag in PauliErrorTag::ALL {
                let c = conjugated_error(n, tag).unwrap();
                // Read the ancilla block off the first data index, then
                // check the tensor form.
                let mut small = ComplexMatrix::zeros(1 << k, 1 << k);
                for r in 0..(1 << k) {
                    for col in 0..(1 << k) {
                        small = small
                            .with_entry(r, col, c.get(r << (n - k), col << (n - k)))
                            .unwrap();
                    }
                }
                assert!(
                    max_abs_diff(&c, &kron(&small, &rest)).unwrap() < 1e-12,
                    "n={n} {tag}"
                );
                assert!(small.is_unitary(Tolerance::LOOSE).unwrap());
            }
        }
    }

    #[test]
    fn recursive_circuits_equal_recursive_matrices() {
        for n in 2..=MAX_WIRES {
            let enc = hybrid_encoder(n).unwrap();
            assert!(
                max_abs_diff(&enc.circuit.realize(), &enc.matrix).unwrap() < 1e-12,
                "n={n}"
            );
        }
        assert!(hybrid_encoder(1).is_err());
        assert!(hybrid_encoder(MAX_WIRES + 1).is_err());
    }

    #[test]
    fn recursion_matches_explicit_kron_form() {
        let p4 = kron(&ComplexMatrix::identity(2), &p3_matrix())
            .matmul(&kron(&p2_matrix(), &ComplexMatrix::identity(4)))
            .unwrap();
        assert_eq!(hybrid_matrix(4).unwrap(), p4);
        let p5 = kron(&ComplexMatrix::identity(4), &p3_matrix())
            .matmul(&kron(&p3_matrix(), &ComplexMatrix::identity(4)))
            .unwrap();
        assert_eq!(hybrid_matrix(5).unwrap(), p5);
    }

    #[test]
    fn diagram_labels_are_bit_reversed_wires() {
        assert_eq!(label_to_wire(4, 0), 3);
        assert_eq!(label_to_wire(4, 3), 0);
        // CNOT controlled by q0 onto q1 in the two-qubit diagram.
        let mut c = Circuit::new(2).unwrap();
        c.push(gates::cnot(), &[label_to_wire(2, 0), label_to_wire(2, 1)])
            .unwrap();
        assert_eq!(c.gates()[0], p2_circuit().gates()[0]);
    }

    #[test]
    fn basis_ancilla_with_z_error_n4() {
        let mut rng = rng_from_seed(3);
        let data = random_state(2, &mut rng);
        let out = hybrid_protect(
            4,
            &data,
            &Ancilla::parse("10").unwrap(),
            &[PauliErrorTag::Z],
        )
        .unwrap();
        assert!((out.fidelity_data - 1.0).abs() < 1e-10);
        assert_eq!(out.ancilla_preserved(Tolerance::LOOSE), Some(true));
    }

    #[test]
    fn random_data_all_sizes_and_errors() {
        let mut rng = rng_from_seed(4);
        for n in 2..=MAX_WIRES {
            let data = random_state(data_wires(n).len(), &mut rng);
            let bits: String = (0..ancilla_wires(n).len())
                .map(|i| if i % 2 == 0 { '1' } else { '0' })
                .collect();
            let anc = Ancilla::parse(&bits).unwrap();
            for tag in PauliErrorTag::ALL {
                let out = hybrid_protect(n, &data, &anc, &[tag]).unwrap();
                assert!((out.fidelity_data - 1.0).abs() < 1e-10, "n={n} {tag}");
                if n.is_multiple_of(2) {
                    assert_eq!(
                        out.ancilla_preserved(Tolerance::LOOSE),
                        Some(true),
                        "n={n} {tag}"
                    );
                }
            }
            let seq = PauliErrorTag::parse_list("x,z,y,x").unwrap();
            let out = hybrid_protect(n, &data, &anc, &seq).unwrap();
            assert!((out.fidelity_data - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn arbitrary_ancilla_for_odd_n() {
        let mut rng = rng_from_seed(5);
        for n in [3, 5, 7] {
            let data = random_state(n - 1, &mut rng);
            let anc = Ancilla::parse("ry:1.234").unwrap();
            let out =
                hybrid_protect(n, &data, &anc, &PauliErrorTag::parse_list("y,x").unwrap()).unwrap();
            assert!((out.fidelity_data - 1.0).abs() < 1e-10);
            assert_eq!(out.ancilla_deviation, None);
        }
    }

    #[test]
    fn unprotected_data_is_damaged() {
        // Sanity check that the errors are not trivial on the data wires.
        let data = StateVector::from_bits("00").unwrap();
        let w = PauliErrorTag::X.matrix();
        let hit = data.apply_matrix(&kron_all([&w, &w])).unwrap();
        assert!(hit.fidelity_with(&data).unwrap() < 1e-12);
    }

    #[test]
    fn input_validation() {
        let data = StateVector::zero(2).unwrap();
        assert!(hybrid_protect(
            4,
            &StateVector::zero(1).unwrap(),
            &Ancilla::parse("00").unwrap(),
            &[]
        )
        .is_err());
        assert!(hybrid_protect(4, &data, &Ancilla::parse("0").unwrap(), &[]).is_err());
        assert!(Ancilla::parse("0a").is_err());
        assert!(Ancilla::parse("ry:x").is_err());
        assert!(PauliErrorTag::parse_list("x,q").is_err());
        assert_eq!(PauliErrorTag::parse_list("").unwrap(), vec![]);
    }

    #[test]
    fn n2_has_no_data_wires() {
        assert!(data_wires(2).is_empty());
        let out = hybrid_protect(
            2,
            &StateVector::zero(0).unwrap(),
            &Ancilla::parse("11").unwrap(),
            &[PauliErrorTag::Y],
        )
        .unwrap();
        assert_eq!(out.fidelity_data, 1.0);
        assert_eq!(out.ancilla_preserved(Tolerance::LOOSE), Some(true));
    }

    #[test]
    fn composed_error_order() {
        let seq = [PauliErrorTag::X, PauliErrorTag::Z];
        let expected = PauliErrorTag::Z
            .matrix()
            .matmul(&PauliErrorTag::X.matrix())
            .unwrap();
        assert_eq!(composed_error(&seq), expected);
        assert!(equal_up_to_global_phase(
            &composed_error(&seq),
            &PauliErrorTag::Y.matrix(),
            Tolerance::STRICT
        )
        .unwrap());
    }
}
