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

//! Gate-level depolarizing noise and a seeded experiment runner.
//!
//! Every experiment is simulated exactly on density matrices: noisy encoder,
//! noiseless correlated channel, noisy decoder, readout flips. Shots are then
//! drawn from the exact distribution with an RNG stream keyed by the seed and
//! the experiment name, so reports are reproducible byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{format_bits, Circuit, DensityMatrix, Histogram, QuantumState, StateVector};
use crate::correlated::{
    parse_unitary_selector, recursive_encoder_with, recursive_layout, ChannelSpec,
    CorrelatedChannel, Decomposition,
};
use crate::error::{Error, Result};
use crate::gates;
use crate::hybrid::{self, Ancilla, PauliErrorTag};
use crate::linalg::ComplexMatrix;
use crate::random::rng_for;

/// Depolarizing strengths and readout flip probability.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
    #[serde(default)]
    pub p_readout: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, p_readout: f64) -> Result<Self> {
        let nm = NoiseModel { p1, p2, p_readout };
        nm.validate()?;
        Ok(nm)
    }

    pub fn noiseless() -> Self {
        NoiseModel::default()
    }

    /// `p1 = 0.001`, `p2 = 0.01`, no readout error.
    pub fn synthetic() -> Self {
        NoiseModel {
            p1: 0.001,
            p2: 0.01,
            p_readout: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("readout", self.p_readout),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidNoise(format!(
                    "{name} = {p} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.p_readout == 0.0
    }

    /// Parses `0`, `synthetic`, or `p1=..,p2=..,readout=..` (missing keys
    /// are zero).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t {
            "0" | "none" => return Ok(NoiseModel::noiseless()),
            "synthetic" => return Ok(NoiseModel::synthetic()),
            _ => {}
        }
        let mut nm = NoiseModel::noiseless();
        for part in t.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidNoise(format!("expected key=value, got `{part}`")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidNoise(format!("bad number in `{part}`")))?;
            match key.trim() {
                "p1" => nm.p1 = v,
                "p2" => nm.p2 = v,
                "readout" | "p_readout" => nm.p_readout = v,
                other => return Err(Error::InvalidNoise(format!("unknown noise key `{other}`"))),
            }
        }
        nm.validate()?;
        Ok(nm)
    }
}

/// `ρ ↦ (1-p)ρ + p·Tr_w(ρ)⊗I/2` on one wire, in Kraus form.
pub fn depolarize(rho: &DensityMatrix, wire: usize, p: f64) -> Result<DensityMatrix> {
    if wire >= rho.n_wires() {
        return Err(Error::InvalidWires(format!(
            "wire {wire} on a {}-wire state",
            rho.n_wires()
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidNoise(format!("depolarizing strength {p}")));
    }
    if p == 0.0 {
        return Ok(rho.clone());
    }
    let mut acc = rho.matrix().scale((1.0 - 0.75 * p).into());
    for pauli in [gates::x(), gates::y(), gates::z()] {
        rho.accumulate_conjugated(&mut acc, pauli.matrix(), &[wire], p / 4.0);
    }
    Ok(DensityMatrix::from_raw(rho.n_wires(), acc))
}

/// Applies `c` gate by gate, depolarizing every touched wire after each
/// gate: strength `p1` for one-wire gates, `p2/k` per wire for `k`-wire ones.
pub fn apply_noisy(c: &Circuit, rho: &DensityMatrix, nm: &NoiseModel) -> Result<DensityMatrix> {
    nm.validate()?;
    if c.n_wires() != rho.n_wires() {
        return Err(Error::DimensionMismatch(format!(
            "{}-wire circuit on a {}-wire state",
            c.n_wires(),
            rho.n_wires()
        )));
    }
    let mut out = rho.clone();
    for pg in c.gates() {
        out.conjugate_in_place(pg.gate().matrix(), pg.wires());
        let k = pg.wires().len();
        let p = if k == 1 { nm.p1 } else { nm.p2 / k as f64 };
        if p > 0.0 {
            for &w in pg.wires() {
                out = depolarize(&out, w, p)?;
            }
        }
    }
    Ok(out)
}

/// Independent bit flips with probability `p` on each of `n_bits` bits.
pub fn apply_readout_noise(dist: &[f64], n_bits: usize, p: f64) -> Result<Vec<f64>> {
    if dist.len() != 1usize << n_bits {
        return Err(Error::DimensionMismatch(format!(
            "{} outcomes for {n_bits} bits",
            dist.len()
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidNoise(format!("readout flip probability {p}")));
    }
    let mut out = dist.to_vec();
    if p == 0.0 {
        return Ok(out);
    }
    for b in 0..n_bits {
        let mask = 1usize << b;
        let prev = out.clone();
        for (x, o) in out.iter_mut().enumerate() {
            *o = (1.0 - p) * prev[x] + p * prev[x ^ mask];
        }
    }
    Ok(out)
}

/// Which protection scheme an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Three-qubit code, one data wire.
    Corr3,
    /// Five-qubit recursive code, two data wires.
    Corr5,
    /// Hybrid code on `n` wires.
    Hybrid,
}

impl Scheme {
    pub fn parse(name: &str) -> Result<Scheme> {
        match name {
            "corr3" => Ok(Scheme::Corr3),
            "corr5" => Ok(Scheme::Corr5),
            "hybrid" => Ok(Scheme::Hybrid),
            other => Err(Error::UnknownExperiment(other.to_string())),
        }
    }
}

fn default_shots() -> u64 {
    8192
}

fn default_rounds() -> usize {
    1
}

/// Experiment description, as read from JSON or assembled from CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// `corr3`, `corr5` or `hybrid`.
    pub scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Register size for `hybrid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Collective unitary for the correlated schemes (default `h`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    /// Mixture channel for the correlated schemes; overrides `w`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default)]
    pub decomposition: Decomposition,
    /// Data bits, data wires in increasing order (default all zeros).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    /// Hybrid ancilla bits or `ry:<angle>`; for the correlated schemes the
    /// state of the free qubit (default `0`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla: Option<String>,
    /// Comma-separated Pauli errors for `hybrid` (default `x`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<String>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseModel,
}

impl ExperimentSpec {
    pub fn new(scheme: &str) -> Self {
        ExperimentSpec {
            scheme: scheme.to_string(),
            name: None,
            n: None,
            w: None,
            channel: None,
            decomposition: Decomposition::Standard,
            data: None,
            ancilla: None,
            errors: None,
            rounds: default_rounds(),
            shots: default_shots(),
            seed: 0,
            noise: NoiseModel::noiseless(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Explicit name, or one derived from the scheme parameters.
    pub fn resolved_name(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        let decomposition = match self.decomposition {
            Decomposition::Standard => "standard",
            Decomposition::Basic => "basic",
        };
        match self.scheme.as_str() {
            "hybrid" => format!("hybrid-n{}", self.n.unwrap_or(0)),
            s => format!("{s}-{decomposition}"),
        }
    }
}

/// Everything needed to simulate one experiment.
#[derive(Debug, Clone)]
pub struct PreparedExperiment {
    pub name: String,
    pub input: StateVector,
    pub encoder: Circuit,
    pub channel: CorrelatedChannel,
    pub rounds: usize,
    pub data_wires: Vec<usize>,
    pub data_bits: String,
}

fn single_qubit(selector: &str) -> Result<StateVector> {
    match Ancilla::parse(selector)? {
        Ancilla::Basis(bits) if bits.len() == 1 => StateVector::from_bits(&bits),
        Ancilla::Qubit(q) => Ok(q),
        Ancilla::Basis(bits) => Err(Error::InvalidState(format!(
            "free qubit takes one bit, got `{bits}`"
        ))),
    }
}

fn bits_state(bits: &str) -> Result<StateVector> {
    if bits.is_empty() {
        StateVector::zero(0)
    } else {
        StateVector::from_bits(bits)
    }
}

fn data_bits(spec: &ExperimentSpec, width: usize) -> Result<String> {
    let bits = spec.data.clone().unwrap_or_else(|| "0".repeat(width));
    if bits.len() != width || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::InvalidState(format!(
            "expected {width} data bits, got `{bits}`"
        )));
    }
    Ok(bits)
}

fn correlated_channel(spec: &ExperimentSpec, n: usize) -> Result<CorrelatedChannel> {
    match (&spec.channel, &spec.w) {
        (Some(_), Some(_)) => Err(Error::InvalidChannel(
            "give either w or channel, not both".into(),
        )),
        (Some(ch), None) => {
            if ch.n != n {
                return Err(Error::InvalidChannel(format!(
                    "channel acts on {} qubits, scheme uses {n}",
                    ch.n
                )));
            }
            ch.build()
        }
        (None, w) => {
            CorrelatedChannel::single(n, parse_unitary_selector(w.as_deref().unwrap_or("h"))?)
        }
    }
}

/// Validates `spec` and builds the states, circuits and channel.
pub fn prepare(spec: &ExperimentSpec) -> Result<PreparedExperiment> {
    let scheme = Scheme::parse(&spec.scheme)?;
    spec.noise.validate()?;
    if spec.shots == 0 {
        return Err(Error::OutOfRange("shots must be >= 1".into()));
    }
    if spec.rounds == 0 {
        return Err(Error::OutOfRange("rounds must be >= 1".into()));
    }
    let name = spec.resolved_name();
    match scheme {
        Scheme::Corr3 | Scheme::Corr5 => {
            let k = if scheme == Scheme::Corr3 { 1 } else { 2 };
            let n = 2 * k + 1;
            if spec.n.is_some_and(|m| m != n) {
                return Err(Error::OutOfRange(format!("{} uses {n} wires", spec.scheme)));
            }
            if spec.errors.is_some() {
                return Err(Error::InvalidChannel(
                    "errors applies to the hybrid scheme; use w or channel".into(),
                ));
            }
            let layout = recursive_layout(k)?;
            let bits = data_bits(spec, k)?;
            let mut parts = vec![StateVector::zero(1)?; n];
            for (wire, b) in layout.data.iter().zip(bits.chars()) {
                parts[*wire] = StateVector::from_bits(&b.to_string())?;
            }
            parts[layout.free_wire] = single_qubit(spec.ancilla.as_deref().unwrap_or("0"))?;
            Ok(PreparedExperiment {
                name,
                input: StateVector::product(&parts)?,
                encoder: recursive_encoder_with(k, &spec.decomposition.circuit())?,
                channel: correlated_channel(spec, n)?,
                rounds: spec.rounds,
                data_wires: layout.data,
                data_bits: bits,
            })
        }
        Scheme::Hybrid => {
            let n = spec
                .n
                .ok_or_else(|| Error::OutOfRange("hybrid needs n".into()))?;
            if spec.w.is_some() || spec.channel.is_some() {
                return Err(Error::InvalidChannel(
                    "hybrid takes Pauli errors, not w or channel".into(),
                ));
            }
            let enc = hybrid::hybrid_encoder(n)?;
            let data_wires = enc.data_wires();
            let n_anc = enc.ancilla_wires().len();
            let bits = data_bits(spec, data_wires.len())?;
            let ancilla = Ancilla::parse(spec.ancilla.as_deref().unwrap_or(&"0".repeat(n_anc)))?;
            let anc_state = match &ancilla {
                Ancilla::Basis(b) if b.len() == n_anc => StateVector::from_bits(b)?,
                Ancilla::Basis(b) => {
                    return Err(Error::InvalidState(format!(
                        "n = {n} takes {n_anc} ancilla bits, got `{b}`"
                    )))
                }
                Ancilla::Qubit(q) => StateVector::product(&vec![q.clone(); n_anc])?,
            };
            let errors = PauliErrorTag::parse_list(spec.errors.as_deref().unwrap_or("x"))?;
            let w: ComplexMatrix = hybrid::composed_error(&errors);
            Ok(PreparedExperiment {
                name,
                input: anc_state.tensor(&bits_state(&bits)?)?,
                encoder: enc.circuit,
                channel: CorrelatedChannel::single(n, w)?,
                rounds: spec.rounds,
                data_wires,
                data_bits: bits,
            })
        }
    }
}

/// Exact outcome distribution over all wires, wire 0 most significant.
#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub n_wires: usize,
    pub distribution: Vec<f64>,
    pub data_wires: Vec<usize>,
    pub data_bits: String,
    pub success_probability: f64,
}

impl ExactOutcome {
    fn is_success(&self, outcome: usize) -> bool {
        self.data_wires
            .iter()
            .zip(self.data_bits.bytes())
            .all(|(&w, b)| (outcome >> (self.n_wires - 1 - w) & 1) == usize::from(b - b'0'))
    }
}

pub fn exact_distribution(spec: &ExperimentSpec) -> Result<ExactOutcome> {
    simulate(&prepare(spec)?, &spec.noise)
}

/// Noisy encoder, `rounds` applications of the channel, noisy decoder,
/// readout flips.
pub fn simulate(exp: &PreparedExperiment, nm: &NoiseModel) -> Result<ExactOutcome> {
    let n = exp.input.n_wires();
    let mut rho = apply_noisy(&exp.encoder, &exp.input.to_density(), nm)?;
    for _ in 0..exp.rounds {
        rho = exp.channel.apply(&rho)?;
    }
    let rho = apply_noisy(&exp.encoder.inverse(), &rho, nm)?;
    let distribution = apply_readout_noise(&rho.probabilities(), n, nm.p_readout)?;
    let mut out = ExactOutcome {
        n_wires: n,
        distribution,
        data_wires: exp.data_wires.clone(),
        data_bits: exp.data_bits.clone(),
        success_probability: 0.0,
    };
    out.success_probability = (0..out.distribution.len())
        .filter(|&x| out.is_success(x))
        .map(|x| out.distribution[x])
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Ok(out)
}

/// Machine-readable result of [`run_named`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub config: ExperimentSpec,
    pub shots: u64,
    /// Bitstring keys, wire 0 first unless the report was flipped.
    pub counts: BTreeMap<String, u64>,
    /// Exact mass on outcomes whose data bits match the prepared data.
    pub success_probability: f64,
    /// Fraction of sampled shots that succeeded.
    pub sampled_success: f64,
    pub data_wires: Vec<usize>,
}

impl ExperimentReport {
    pub fn histogram(&self) -> Result<Histogram> {
        let n = self.counts.keys().next().map_or(0, String::len);
        Histogram::new(n, self.counts.clone())
    }

    /// Same report with every bitstring key reversed.
    pub fn with_reversed_bit_order(&self) -> Result<ExperimentReport> {
        let mut out = self.clone();
        out.counts = self.histogram()?.reversed_bit_order().counts().clone();
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("bitstring,count\n");
        for (k, v) in &self.counts {
            s.push_str(&format!("{k},{v}\n"));
        }
        s
    }
}

/// Runs the experiment described by `spec`: exact noisy simulation, then
/// `shots` samples from the stream keyed by `(seed, name)`.
pub fn run_named(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let exp = prepare(spec)?;
    let exact = simulate(&exp, &spec.noise)?;
    let mut rng = rng_for(spec.seed, &exp.name);
    let hist = Histogram::sample(&exact.distribution, exact.n_wires, spec.shots, &mut rng)?;
    let successes: u64 = hist
        .counts()
        .iter()
        .filter(|(k, _)| exact.is_success(usize::from_str_radix(k, 2).expect("bitstring key")))
        .map(|(_, c)| c)
        .sum();
    Ok(ExperimentReport {
        name: exp.name,
        seed: spec.seed,
        config: spec.clone(),
        shots: spec.shots,
        counts: hist.counts().clone(),
        success_probability: exact.success_probability,
        sampled_success: successes as f64 / spec.shots as f64,
        data_wires: exact.data_wires,
    })
}

/// Exact success probability for each `p2` in `sweep`, with `p1 = p2/10`.
pub fn p2_sweep(spec: &ExperimentSpec, sweep: &[f64]) -> Result<Vec<f64>> {
    let exp = prepare(spec)?;
    sweep
        .iter()
        .map(|&p2| {
            let nm = NoiseModel::new(p2 / 10.0, p2, spec.noise.p_readout)?;
            Ok(simulate(&exp, &nm)?.success_probability)
        })
        .collect()
}

/// All bitstrings of `n` bits in increasing order, for aligning histograms
/// with exact distributions.
pub fn outcome_labels(n: usize) -> Vec<String> {
    (0..1usize << n).map(|x| format_bits(x, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::random::{random_state, rng_from_seed};

    fn corr3() -> ExperimentSpec {
        let mut s = ExperimentSpec::new("corr3");
        s.w = Some("h".into());
        s
    }

    #[test]
    fn zero_noise_is_plain_application() {
        let mut rng = rng_from_seed(1);
        let rho = random_state(3, &mut rng).to_density();
        let c = crate::correlated::basic_decomposition();
        let noisy = apply_noisy(&c, &rho, &NoiseModel::noiseless()).unwrap();
        let clean = c.apply(&rho).unwrap();
        assert!(max_abs_diff(noisy.matrix(), clean.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn full_depolarizing_gives_maximally_mixed() {
        let mut c = Circuit::new(1).unwrap();
        c.push(gates::identity(), &[0]).unwrap();
        let rho = StateVector::zero(1).unwrap().to_density();
        let out = apply_noisy(&c, &rho, &NoiseModel::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        let half = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(max_abs_diff(out.matrix(), half.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn trace_preserved_under_noise() {
        let mut rng = rng_from_seed(2);
        let rho = random_state(3, &mut rng).to_density();
        let nm = NoiseModel::new(0.3, 0.7, 0.0).unwrap();
        let out = apply_noisy(&crate::correlated::standard_decomposition(), &rho, &nm).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-10);
        assert!(out
            .matrix()
            .is_hermitian(crate::linalg::Tolerance::LOOSE)
            .unwrap());
    }

    #[test]
    fn noisy_apply_rejects_mismatch() {
        let rho = StateVector::zero(2).unwrap().to_density();
        assert!(apply_noisy(&Circuit::new(3).unwrap(), &rho, &NoiseModel::noiseless()).is_err());
        assert!(NoiseModel::new(1.5, 0.0, 0.0).is_err());
        assert!(depolarize(&rho, 2, 0.1).is_err());
    }

    #[test]
    fn readout_noise_on_one_bit() {
        let out = apply_readout_noise(&[1.0, 0.0], 1, 0.1).unwrap();
        assert!((out[0] - 0.9).abs() < 1e-15 && (out[1] - 0.1).abs() < 1e-15);
        let out = apply_readout_noise(&[0.0, 0.0, 0.0, 1.0], 2, 0.5).unwrap();
        assert!(out.iter().all(|p| (p - 0.25).abs() < 1e-15));
        assert!(apply_readout_noise(&[1.0], 1, 0.1).is_err());
    }

    #[test]
    fn noise_parsing() {
        assert_eq!(NoiseModel::parse("0").unwrap(), NoiseModel::noiseless());
        assert_eq!(
            NoiseModel::parse("synthetic").unwrap(),
            NoiseModel::synthetic()
        );
        let nm = NoiseModel::parse("p2=0.01, readout=0.02").unwrap();
        assert_eq!((nm.p1, nm.p2, nm.p_readout), (0.0, 0.01, 0.02));
        assert!(NoiseModel::parse("p3=0.1").is_err());
        assert!(NoiseModel::parse("p1=2").is_err());
        assert!(NoiseModel::parse("p1").is_err());
    }

    #[test]
    fn noiseless_schemes_always_succeed() {
        let mut specs = vec![corr3(), ExperimentSpec::new("corr5")];
        let mut basic = corr3();
        basic.decomposition = Decomposition::Basic;
        basic.ancilla = Some("ry:0.7".into());
        basic.data = Some("1".into());
        specs.push(basic);
        for n in 2..=6 {
            let mut s = ExperimentSpec::new("hybrid");
            s.n = Some(n);
            s.errors = Some("x,y".into());
            specs.push(s);
        }
        for s in specs {
            let exact = exact_distribution(&s).unwrap();
            assert!(
                (exact.success_probability - 1.0).abs() < 1e-10,
                "{}",
                s.resolved_name()
            );
        }
    }

    #[test]
    fn preset_noise_keeps_success_high() {
        let mut s = corr3();
        s.noise = NoiseModel::synthetic();
        let p = exact_distribution(&s).unwrap().success_probability;
        assert!(p > 0.8 && p < 1.0, "{p}");
    }

    #[test]
    fn success_decreases_with_p2() {
        let sweep = p2_sweep(&corr3(), &[0.0, 0.005, 0.01, 0.02, 0.04]).unwrap();
        assert!((sweep[0] - 1.0).abs() < 1e-10);
        for pair in sweep.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{sweep:?}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let mut s = corr3();
        s.noise = NoiseModel::synthetic();
        s.seed = 42;
        let a = run_named(&s).unwrap().to_json();
        let b = run_named(&s).unwrap().to_json();
        assert_eq!(a, b);
        s.seed = 43;
        assert_ne!(a, run_named(&s).unwrap().to_json());
    }

    #[test]
    fn sampled_frequencies_track_exact_distribution() {
        let mut s = corr3();
        s.noise = NoiseModel::parse("p1=0.02,p2=0.1,readout=0.05").unwrap();
        s.shots = 65536;
        s.seed = 5;
        let exact = exact_distribution(&s).unwrap();
        let report = run_named(&s).unwrap();
        let tv = report
            .histogram()
            .unwrap()
            .total_variation(&exact.distribution)
            .unwrap();
        assert!(tv <= 5.0 * (8.0f64 / 65536.0).sqrt(), "{tv}");
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            prepare(&ExperimentSpec::new("corr9")),
            Err(Error::UnknownExperiment(_))
        ));
        let mut s = ExperimentSpec::new("hybrid");
        assert!(prepare(&s).is_err());
        s.n = Some(4);
        s.w = Some("h".into());
        assert!(prepare(&s).is_err());
        let mut s = corr3();
        s.shots = 0;
        assert!(prepare(&s).is_err());
        let mut s = corr3();
        s.data = Some("01".into());
        assert!(prepare(&s).is_err());
        let mut s = corr3();
        s.errors = Some("x".into());
        assert!(prepare(&s).is_err());
        assert!(ExperimentSpec::from_json(r#"{"scheme": "corr3", "bogus": 1}"#).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let s = ExperimentSpec::from_json(
            r#"{"scheme": "hybrid", "n": 5, "errors": "x", "ancilla": "ry:2.356"}"#,
        )
        .unwrap();
        assert_eq!(s.shots, 8192);
        assert_eq!(s.resolved_name(), "hybrid-n5");
        let again = ExperimentSpec::from_json(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, again);
        let r = run_named(&s).unwrap();
        assert!((r.success_probability - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_report_keys() {
        let mut s = ExperimentSpec::new("hybrid");
        s.n = Some(4);
        s.data = Some("01".into());
        s.ancilla = Some("10".into());
        s.errors = Some("y".into());
        let r = run_named(&s).unwrap();
        assert_eq!(r.counts.keys().collect::<Vec<_>>(), vec!["1001"]);
        let flipped = r.with_reversed_bit_order().unwrap();
        assert_eq!(flipped.counts.keys().collect::<Vec<_>>(), vec!["1001"]);
        assert!(r.to_csv().starts_with("bitstring,count\n1001,8192"));
        s.data = Some("11".into());
        s.ancilla = Some("00".into());
        let flipped = run_named(&s).unwrap().with_reversed_bit_order().unwrap();
        assert_eq!(flipped.counts.keys().collect::<Vec<_>>(), vec!["1100"]);
    }

    #[test]
    fn more_gates_cost_more_under_noise() {
        let mut std = corr3();
        std.noise = NoiseModel::synthetic();
        let mut basic = std.clone();
        basic.decomposition = Decomposition::Basic;
        let a = exact_distribution(&std).unwrap().success_probability;
        let b = exact_distribution(&basic).unwrap().success_probability;
        // 12 decomposed gates per round trip against 28.
        assert!(b < a, "standard {a}, basic {b}");
        assert_eq!(outcome_labels(2), vec!["00", "01", "10", "11"]);
    }
}
