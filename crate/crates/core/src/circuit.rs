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

//! Circuits, pure and mixed states, and computational-basis sampling.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{self, Gate, PlacedGate};
use crate::linalg::{kron, ComplexMatrix, Tolerance, ZERO};
use crate::random;

/// Largest register the simulator accepts (256-dimensional state space).
pub const MAX_WIRES: usize = 8;

fn check_register_size(n_wires: usize) -> Result<()> {
    if n_wires > MAX_WIRES {
        return Err(Error::OutOfRange(format!(
            "{n_wires} wires exceeds the {MAX_WIRES}-wire limit"
        )));
    }
    Ok(())
}

/// Ordered list of placed gates; the first gate is applied first.
#[derive(Clone, PartialEq)]
pub struct Circuit {
    n_wires: usize,
    gates: Vec<PlacedGate>,
}

impl Circuit {
    pub fn new(n_wires: usize) -> Result<Self> {
        if n_wires == 0 {
            return Err(Error::OutOfRange(
                "a circuit needs at least one wire".into(),
            ));
        }
        check_register_size(n_wires)?;
        Ok(Circuit {
            n_wires,
            gates: Vec::new(),
        })
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn gates(&self) -> &[PlacedGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate, wires: &[usize]) -> Result<&mut Self> {
        self.push_placed(PlacedGate::new(gate, wires)?)
    }

    pub fn push_placed(&mut self, pg: PlacedGate) -> Result<&mut Self> {
        pg.check_register(self.n_wires)?;
        self.gates.push(pg);
        Ok(self)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Circuit) -> Result<Circuit> {
        if next.n_wires != self.n_wires {
            return Err(Error::DimensionMismatch(format!(
                "cannot append a {}-wire circuit to a {}-wire circuit",
                next.n_wires, self.n_wires
            )));
        }
        let mut out = self.clone();
        out.gates.extend(next.gates.iter().cloned());
        Ok(out)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_wires: self.n_wires,
            gates: self.gates.iter().rev().map(PlacedGate::dagger).collect(),
        }
    }

    /// Moves wire `w` to `map[w]` in a register of `n_wires` wires. Used both
    /// for permutations and for placing a small circuit inside a larger one.
    pub fn remap(&self, map: &[usize], n_wires: usize) -> Result<Circuit> {
        if map.len() != self.n_wires {
            return Err(Error::InvalidWires(format!(
                "map has {} entries for {} wires",
                map.len(),
                self.n_wires
            )));
        }
        let mut out = Circuit::new(n_wires)?;
        for pg in &self.gates {
            let wires: Vec<usize> = pg.wires().iter().map(|&w| map[w]).collect();
            out.push(pg.gate().clone(), &wires)?;
        }
        Ok(out)
    }

    /// Number of gates acting on exactly `arity` wires.
    pub fn count_arity(&self, arity: usize) -> usize {
        self.gates
            .iter()
            .filter(|g| g.gate().arity() == arity)
            .count()
    }

    /// Full unitary `G_k ⋯ G_1`.
    pub fn realize(&self) -> ComplexMatrix {
        let dim = 1usize << self.n_wires;
        let mut m = ComplexMatrix::identity(dim);
        for pg in &self.gates {
            gates::apply_to_rows(
                m.entries_mut(),
                self.n_wires,
                dim,
                pg.gate().matrix(),
                pg.wires(),
            );
        }
        m
    }

    pub fn apply<S: QuantumState>(&self, state: &S) -> Result<S> {
        state.apply_circuit(self)
    }

    /// One placed gate per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for pg in &self.gates {
            let _ = writeln!(out, "{pg}");
        }
        out
    }

    /// Parses the line format of [`Circuit::to_text`]. Lines starting with
    /// `#` are comments. Without an explicit size the register is as wide
    /// as the largest wire index used.
    pub fn parse_text(text: &str, n_wires: Option<usize>) -> Result<Circuit> {
        let placed: Vec<PlacedGate> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(PlacedGate::parse)
            .collect::<Result<_>>()?;
        let used = placed
            .iter()
            .flat_map(|p| p.wires().iter().copied())
            .max()
            .map_or(1, |w| w + 1);
        let mut c = Circuit::new(n_wires.unwrap_or(used))?;
        for pg in placed {
            c.push_placed(pg)?;
        }
        Ok(c)
    }
}

impl std::fmt::Debug for Circuit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Circuit")
            .field("n_wires", &self.n_wires)
            .field("gates", &self.gates)
            .finish()
    }
}

/// Behaviour shared by pure and mixed register states.
pub trait QuantumState: Sized {
    fn n_wires(&self) -> usize;

    /// Born probabilities over the full computational basis.
    fn probabilities(&self) -> Vec<f64>;

    fn apply_circuit(&self, circuit: &Circuit) -> Result<Self>;

    /// `⟨b|ρ|b⟩` for mixed states, `|⟨a|b⟩|²` for pure ones.
    fn fidelity_with(&self, target: &StateVector) -> Result<f64>;

    fn to_density(&self) -> DensityMatrix;
}

fn check_same_register(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!(
            "{a}-wire state vs {b}-wire operand"
        )));
    }
    Ok(())
}

#[derive(Clone, PartialEq)]
pub struct StateVector {
    n_wires: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Validates length `2^n` and unit norm (within 1e-10).
    pub fn new(n_wires: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_register_size(n_wires)?;
        if amplitudes.len() != 1 << n_wires {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for {n_wires} wires",
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > Tolerance::LOOSE.epsilon() {
            return Err(Error::InvalidState(format!("squared norm {norm} != 1")));
        }
        Ok(StateVector {
            n_wires,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_wires: usize, index: usize) -> Result<Self> {
        check_register_size(n_wires)?;
        if index >= 1 << n_wires {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range"
            )));
        }
        let mut amps = vec![ZERO; 1 << n_wires];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_wires,
            amplitudes: amps,
        })
    }

    pub fn zero(n_wires: usize) -> Result<Self> {
        Self::basis(n_wires, 0)
    }

    /// Basis state from a bitstring, leftmost character on wire 0.
    pub fn from_bits(bits: &str) -> Result<Self> {
        Self::basis(bits.len(), parse_bits(bits)?)
    }

    /// Single qubit `α|0⟩ + β|1⟩`, normalized.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("zero or non-finite qubit".into()));
        }
        Self::new(1, vec![alpha / norm, beta / norm])
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Tensor product, `self` on the leading wires.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        check_register_size(self.n_wires + other.n_wires)?;
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector {
            n_wires: self.n_wires + other.n_wires,
            amplitudes: amps,
        })
    }

    pub fn product(parts: &[StateVector]) -> Result<StateVector> {
        let mut iter = parts.iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidState("empty product".into()))?;
        iter.try_fold(first.clone(), |acc, s| acc.tensor(s))
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_same_register(self.n_wires, other.n_wires)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `U|ψ⟩` for a full-register unitary.
    pub fn apply_matrix(&self, u: &ComplexMatrix) -> Result<StateVector> {
        if u.rows() != self.amplitudes.len() || u.cols() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a {}-dim state",
                u.rows(),
                u.cols(),
                self.amplitudes.len()
            )));
        }
        let column = ComplexMatrix::from_raw(self.amplitudes.len(), 1, self.amplitudes.clone());
        let out = u.matmul(&column)?;
        Ok(StateVector {
            n_wires: self.n_wires,
            amplitudes: out.into_entries(),
        })
    }

    pub fn apply_gate(&self, gate: &ComplexMatrix, wires: &[usize]) -> Result<StateVector> {
        let pg = PlacedGate::new(Gate::custom("u", gate.clone())?, wires)?;
        pg.check_register(self.n_wires)?;
        let mut amps = self.amplitudes.clone();
        gates::apply_to_rows(&mut amps, self.n_wires, 1, gate, wires);
        Ok(StateVector {
            n_wires: self.n_wires,
            amplitudes: amps,
        })
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(&self.to_density(), keep)
    }
}

impl std::fmt::Debug for StateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "StateVector({} wires, {:?})",
            self.n_wires, self.amplitudes
        )
    }
}

impl QuantumState for StateVector {
    fn n_wires(&self) -> usize {
        self.n_wires
    }

    fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    fn apply_circuit(&self, circuit: &Circuit) -> Result<Self> {
        check_same_register(self.n_wires, circuit.n_wires)?;
        let mut amps = self.amplitudes.clone();
        for pg in circuit.gates() {
            gates::apply_to_rows(&mut amps, self.n_wires, 1, pg.gate().matrix(), pg.wires());
        }
        Ok(StateVector {
            n_wires: self.n_wires,
            amplitudes: amps,
        })
    }

    fn fidelity_with(&self, target: &StateVector) -> Result<f64> {
        Ok(self.inner(target)?.norm_sqr().clamp(0.0, 1.0))
    }

    fn to_density(&self) -> DensityMatrix {
        let dim = self.amplitudes.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in &self.amplitudes {
            data.extend(self.amplitudes.iter().map(|b| a * b.conj()));
        }
        DensityMatrix {
            n_wires: self.n_wires,
            matrix: ComplexMatrix::from_raw(dim, dim, data),
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    n_wires: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace (within 1e-10) and a
    /// non-negative diagonal (within -1e-9).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || !matrix.rows().is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "density matrix must be 2^n square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let n_wires = matrix.rows().trailing_zeros() as usize;
        check_register_size(n_wires)?;
        if !matrix.is_hermitian(Tolerance::LOOSE)? {
            return Err(Error::InvalidState(
                "density matrix is not Hermitian".into(),
            ));
        }
        let tr = matrix.trace()?;
        if (tr - Complex64::new(1.0, 0.0)).norm() > Tolerance::LOOSE.epsilon() {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        if let Some(i) = (0..matrix.rows()).find(|&i| matrix.get(i, i).re < -1e-9) {
            return Err(Error::InvalidState(format!(
                "negative population at basis state {i}"
            )));
        }
        Ok(DensityMatrix { n_wires, matrix })
    }

    pub(crate) fn from_raw(n_wires: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << n_wires);
        DensityMatrix { n_wires, matrix }
    }

    pub fn maximally_mixed(n_wires: usize) -> Result<Self> {
        check_register_size(n_wires)?;
        let dim = 1usize << n_wires;
        let m = ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        Ok(DensityMatrix { n_wires, matrix: m })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace().expect("square")
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        check_register_size(self.n_wires + other.n_wires)?;
        Ok(DensityMatrix {
            n_wires: self.n_wires + other.n_wires,
            matrix: kron(&self.matrix, &other.matrix),
        })
    }

    /// `U ρ U†` for a full-register unitary.
    pub fn apply_matrix(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        let m = u.matmul(&self.matrix)?.matmul(&u.dagger())?;
        Ok(DensityMatrix {
            n_wires: self.n_wires,
            matrix: m,
        })
    }

    /// `G ρ G†` with `G` acting on `wires`.
    pub fn apply_gate(&self, gate: &ComplexMatrix, wires: &[usize]) -> Result<DensityMatrix> {
        let pg = PlacedGate::new(Gate::custom("u", gate.clone())?, wires)?;
        pg.check_register(self.n_wires)?;
        let mut out = self.clone();
        out.conjugate_in_place(gate, wires);
        Ok(out)
    }

    pub(crate) fn conjugate_in_place(&mut self, gate: &ComplexMatrix, wires: &[usize]) {
        let dim = 1usize << self.n_wires;
        let data = self.matrix.entries_mut();
        gates::apply_to_rows(data, self.n_wires, dim, gate, wires);
        gates::apply_dagger_to_cols(data, self.n_wires, dim, gate, wires);
    }

    /// Adds `weight · K ρ K†` into `acc` for a `K` acting on `wires`.
    pub(crate) fn accumulate_conjugated(
        &self,
        acc: &mut ComplexMatrix,
        kraus: &ComplexMatrix,
        wires: &[usize],
        weight: f64,
    ) {
        let mut term = self.clone();
        term.conjugate_in_place(kraus, wires);
        for (a, t) in acc.entries_mut().iter_mut().zip(term.matrix.entries()) {
            *a += t * weight;
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

impl std::fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DensityMatrix({} wires) {:?}", self.n_wires, self.matrix)
    }
}

impl QuantumState for DensityMatrix {
    fn n_wires(&self) -> usize {
        self.n_wires
    }

    fn probabilities(&self) -> Vec<f64> {
        (0..self.matrix.rows())
            .map(|i| self.matrix.get(i, i).re.max(0.0))
            .collect()
    }

    fn apply_circuit(&self, circuit: &Circuit) -> Result<Self> {
        check_same_register(self.n_wires, circuit.n_wires)?;
        let mut out = self.clone();
        for pg in circuit.gates() {
            out.conjugate_in_place(pg.gate().matrix(), pg.wires());
        }
        Ok(out)
    }

    fn fidelity_with(&self, target: &StateVector) -> Result<f64> {
        check_same_register(self.n_wires, target.n_wires)?;
        let b = target.amplitudes();
        let dim = b.len();
        let mut acc = ZERO;
        for i in 0..dim {
            for j in 0..dim {
                acc += b[i].conj() * self.matrix.get(i, j) * b[j];
            }
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    fn to_density(&self) -> DensityMatrix {
        self.clone()
    }
}

fn validate_wire_subset(wires: &[usize], n_wires: usize, what: &str) -> Result<()> {
    if wires.is_empty() {
        return Err(Error::InvalidWires(format!("{what}: empty wire set")));
    }
    for (i, &w) in wires.iter().enumerate() {
        if w >= n_wires {
            return Err(Error::InvalidWires(format!(
                "{what}: wire {w} outside {n_wires}-wire register"
            )));
        }
        if wires[..i].contains(&w) {
            return Err(Error::InvalidWires(format!("{what}: wire {w} repeated")));
        }
    }
    Ok(())
}

/// Full-register basis index with the bits of `sub` (MSB first) written
/// onto `wires`.
fn scatter_bits(sub: usize, wires: &[usize], n_wires: usize) -> usize {
    let k = wires.len();
    wires
        .iter()
        .enumerate()
        .filter(|(j, _)| (sub >> (k - 1 - j)) & 1 == 1)
        .map(|(_, &w)| 1usize << (n_wires - 1 - w))
        .sum()
}

/// Reduced state on `keep`. The result's wire `i` is register wire
/// `keep[i]`, so a sorted `keep` preserves the original bit order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_wires;
    validate_wire_subset(keep, n, "partial trace")?;
    let traced: Vec<usize> = (0..n).filter(|w| !keep.contains(w)).collect();
    let kept_dim = 1usize << keep.len();
    let kept_idx: Vec<usize> = (0..kept_dim).map(|i| scatter_bits(i, keep, n)).collect();
    let traced_idx: Vec<usize> = if traced.is_empty() {
        vec![0]
    } else {
        (0..1usize << traced.len())
            .map(|t| scatter_bits(t, &traced, n))
            .collect()
    };
    let mut out = vec![ZERO; kept_dim * kept_dim];
    for (i, &ki) in kept_idx.iter().enumerate() {
        for (j, &kj) in kept_idx.iter().enumerate() {
            out[i * kept_dim + j] = traced_idx
                .iter()
                .map(|&t| rho.matrix.get(ki | t, kj | t))
                .sum();
        }
    }
    Ok(DensityMatrix {
        n_wires: keep.len(),
        matrix: ComplexMatrix::from_raw(kept_dim, kept_dim, out),
    })
}

pub fn fidelity<S: QuantumState>(state: &S, target: &StateVector) -> Result<f64> {
    state.fidelity_with(target)
}

/// Outcome distribution on `wires`, indexed MSB-first in the order given.
pub fn marginal_distribution(probs: &[f64], n_wires: usize, wires: &[usize]) -> Result<Vec<f64>> {
    validate_wire_subset(wires, n_wires, "measurement")?;
    let k = wires.len();
    let mut out = vec![0.0; 1 << k];
    for (idx, &p) in probs.iter().enumerate() {
        let sub = wires.iter().fold(0usize, |acc, &w| {
            (acc << 1) | ((idx >> (n_wires - 1 - w)) & 1)
        });
        out[sub] += p;
    }
    debug_assert!(k > 0);
    Ok(out)
}

/// Samples `shots` computational-basis outcomes on `wires` from the Born
/// distribution of `state`, using a ChaCha8 stream seeded with `seed`.
pub fn measure_shots<S: QuantumState>(
    state: &S,
    wires: &[usize],
    shots: u64,
    seed: u64,
) -> Result<Histogram> {
    let mut rng = random::rng_from_seed(seed);
    let dist = marginal_distribution(&state.probabilities(), state.n_wires(), wires)?;
    Histogram::sample(&dist, wires.len(), shots, &mut rng)
}

fn parse_bits(bits: &str) -> Result<usize> {
    if bits.is_empty() || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Parse(format!("`{bits}` is not a bitstring")));
    }
    Ok(bits
        .bytes()
        .fold(0, |acc, b| (acc << 1) | usize::from(b == b'1')))
}

pub fn format_bits(index: usize, width: usize) -> String {
    (0..width)
        .map(|j| {
            if (index >> (width - 1 - j)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Shot counts keyed by bitstring, first measured wire leftmost. Only
/// outcomes that occurred are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    n_measured: usize,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
struct HistogramJson {
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn new(n_measured: usize, counts: BTreeMap<String, u64>) -> Result<Self> {
        if n_measured == 0 {
            return Err(Error::OutOfRange("histogram over zero wires".into()));
        }
        for key in counts.keys() {
            if key.len() != n_measured {
                return Err(Error::Parse(format!(
                    "key `{key}` is not {n_measured} bits"
                )));
            }
            parse_bits(key)?;
        }
        let counts: BTreeMap<String, u64> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        let shots = counts.values().sum();
        Ok(Histogram {
            n_measured,
            shots,
            counts,
        })
    }

    /// Counts indexed by outcome number (MSB-first bitstrings).
    pub fn from_outcome_counts(n_measured: usize, outcome_counts: &[u64]) -> Result<Self> {
        if outcome_counts.len() != 1 << n_measured {
            return Err(Error::DimensionMismatch(format!(
                "{} outcomes for {n_measured} bits",
                outcome_counts.len()
            )));
        }
        let counts = outcome_counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (format_bits(i, n_measured), c))
            .collect();
        Self::new(n_measured, counts)
    }

    pub fn sample<R: rand::Rng + ?Sized>(
        dist: &[f64],
        n_measured: usize,
        shots: u64,
        rng: &mut R,
    ) -> Result<Self> {
        if shots == 0 {
            return Err(Error::OutOfRange("shots must be >= 1".into()));
        }
        if dist.len() != 1 << n_measured {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {n_measured} bits",
                dist.len()
            )));
        }
        Self::from_outcome_counts(n_measured, &random::sample_counts(dist, shots, rng))
    }

    pub fn n_measured(&self) -> usize {
        self.n_measured
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn frequency(&self, key: &str) -> f64 {
        self.count(key) as f64 / self.shots as f64
    }

    /// Same histogram with every key reversed (last measured wire leftmost),
    /// which is how the IBM toolchain prints bitstrings.
    pub fn reversed_bit_order(&self) -> Histogram {
        let counts = self
            .counts
            .iter()
            .map(|(k, &c)| (k.chars().rev().collect(), c))
            .collect();
        Histogram {
            n_measured: self.n_measured,
            shots: self.shots,
            counts,
        }
    }

    /// Total-variation distance between the empirical frequencies and an
    /// exact distribution indexed MSB-first.
    pub fn total_variation(&self, exact: &[f64]) -> Result<f64> {
        if exact.len() != 1 << self.n_measured {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {} bits",
                exact.len(),
                self.n_measured
            )));
        }
        let sum: f64 = exact
            .iter()
            .enumerate()
            .map(|(i, p)| (self.frequency(&format_bits(i, self.n_measured)) - p).abs())
            .sum();
        Ok(0.5 * sum)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&HistogramJson {
            shots: self.shots,
            counts: self.counts.clone(),
        })
        .expect("histogram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: HistogramJson = serde_json::from_str(text)?;
        let width = raw
            .counts
            .keys()
            .next()
            .map(String::len)
            .ok_or_else(|| Error::Parse("histogram without counts".into()))?;
        let h = Self::new(width, raw.counts)?;
        if h.shots != raw.shots {
            return Err(Error::Parse(format!(
                "shots {} but counts sum to {}",
                raw.shots, h.shots
            )));
        }
        Ok(h)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (k, c) in &self.counts {
            let _ = writeln!(out, "{k},{c}");
        }
        out
    }
}
