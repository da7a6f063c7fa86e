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

//! Seeded randomness.
//!
//! All sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded with
//! `seed_from_u64`. Independent experiments share a seed but draw from
//! different ChaCha streams selected by an FNV-1a hash of their label, so a
//! report depends only on `(seed, label)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::StateVector;
use crate::linalg::ComplexMatrix;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// RNG for one labelled stream under a shared seed.
pub fn rng_for(seed: u64, label: &str) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(label.as_bytes()));
    rng
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn normal_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed element of SU(2): `[[a, -b*], [b, a*]]` with `(a, b)`
/// uniform on the unit 3-sphere.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let (a, b) = loop {
        let a = normal_complex(rng);
        let b = normal_complex(rng);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm > 1e-9 {
            break (a / norm, b / norm);
        }
    };
    ComplexMatrix::new(2, 2, vec![a, -b.conj(), b, a.conj()]).expect("2x2")
}

/// Haar-random element of U(2): an SU(2) element times a uniform phase.
pub fn haar_u2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    haar_su2(rng).scale(phase)
}

/// Uniformly random pure state on `n_wires` qubits.
pub fn random_state<R: Rng + ?Sized>(n_wires: usize, rng: &mut R) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..1usize << n_wires)
            .map(|_| normal_complex(rng))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 {
            let amps = amps.into_iter().map(|z| z / norm).collect();
            return StateVector::new(n_wires, amps).expect("normalized");
        }
    }
}

/// Matrix with i.i.d. standard complex normal entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| normal_complex(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("finite")
}

/// Draws `shots` outcome indices from `probs` by inverse CDF and returns the
/// per-outcome counts. `probs` must be non-negative; it is renormalized.
pub fn sample_counts<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let total = acc;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        // First index whose cumulative mass exceeds u; skips zero-mass outcomes.
        let idx = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
        counts[idx] += 1;
    }
    counts
}
