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

//! Simulation and verification of error-avoiding quantum codes for
//! fully-correlated noise, where every qubit of a register suffers the same
//! single-qubit unitary `W`.
//!
//! The crate covers two schemes:
//!
//! - the recursive scheme for arbitrary `W`, built on an 8×8 encoder whose
//!   conjugation of `W⊗W⊗W` is block diagonal ([`correlated`]);
//! - the hybrid scheme for Pauli-correlated errors `σ^{⊗n}`, which also
//!   preserves classical ancilla bits ([`hybrid`]).
//!
//! Everything is dense linear algebra on at most 8 qubits. Circuits are lists
//! of placed gates ([`circuit::Circuit`]) realized as unitaries or applied to
//! pure and mixed states. [`noise_exp`] adds gate-level depolarizing noise and
//! seeded shot sampling, and [`cli`] wraps it all in a command-line tool.
//!
//! # Bit convention
//!
//! Wire 0 is the most-significant bit and the leftmost Kronecker factor.
//! Histogram keys print wire 0 first.

pub mod circuit;
pub mod cli;
pub mod correlated;
pub mod error;
pub mod gates;
pub mod hybrid;
pub mod linalg;
pub mod noise_exp;
pub mod random;

pub use circuit::{Circuit, DensityMatrix, Histogram, StateVector};
pub use error::{Error, Result};
pub use gates::{Gate, PlacedGate};
pub use linalg::{ComplexMatrix, Tolerance};
