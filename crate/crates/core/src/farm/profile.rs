use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::sim::{GateKind, GateOp, NoiseModel, PauliChannel, ReadoutError};
use crate::topology::ConnectivityGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTier {
    /// Energy relaxation and dephasing over gate durations only.
    Erad,
    /// Relaxation plus depolarizing gate error and readout bit flips.
    FullEmulation,
}

/// Gate durations in seconds, shared by all qubits of a backend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateDurations {
    pub single: f64,
    pub cnot: f64,
    pub measure: f64,
    pub reset: f64,
}

impl Default for GateDurations {
    fn default() -> Self {
        GateDurations { single: 35e-9, cnot: 300e-9, measure: 1.0e-6, reset: 0.5e-6 }
    }
}

impl GateDurations {
    pub fn of(&self, kind: GateKind) -> f64 {
        match kind {
            GateKind::H | GateKind::S | GateKind::X | GateKind::Z => self.single,
            GateKind::Cnot => self.cnot,
            GateKind::MeasureZ => self.measure,
            GateKind::Reset => self.reset,
        }
    }
}

/// Per-qubit calibration arrays, all of length `num_qubits`. Times in
/// seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitCalibration {
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    /// Depolarizing rate of single-qubit gates.
    pub eps_single: Vec<f64>,
    /// Depolarizing rate applied to this qubit when it takes part in a CNOT.
    pub eps_cnot: Vec<f64>,
    pub p01: Vec<f64>,
    pub p10: Vec<f64>,
}

impl QubitCalibration {
    fn len(&self) -> usize {
        self.t1.len()
    }

    fn validate(&self, n: usize, tier: NoiseTier) -> Result<()> {
        let arrays = [&self.t1, &self.t2, &self.eps_single, &self.eps_cnot, &self.p01, &self.p10];
        if arrays.iter().any(|a| a.len() != n) {
            return invalid(format!("calibration arrays must all have length {n}"));
        }
        for q in 0..n {
            let (t1, t2) = (self.t1[q], self.t2[q]);
            if !(t1 > 0.0 && t2 > 0.0 && t2 <= 2.0 * t1) {
                return invalid(format!("qubit {q}: T1={t1}, T2={t2} violates 0 < T2 <= 2 T1"));
            }
            for (name, p) in
                [("eps_single", self.eps_single[q]), ("eps_cnot", self.eps_cnot[q]), ("p01", self.p01[q]), ("p10", self.p10[q])]
            {
                if !(0.0..=1.0).contains(&p) {
                    return invalid(format!("qubit {q}: {name}={p} outside [0, 1]"));
                }
                if tier == NoiseTier::Erad && p != 0.0 {
                    return invalid(format!("qubit {q}: ERaD profile has nonzero {name}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEpoch {
    pub index: u64,
    /// Simulated seconds.
    pub timestamp: f64,
    pub seed: u64,
}

/// Identity and noise of one virtual backend. `base` is fixed at fabrication;
/// `current` is what jobs run under and moves with calibration epochs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile {
    pub backend_id: String,
    pub tier: NoiseTier,
    pub seed: u64,
    pub num_qubits: usize,
    pub coupling: ConnectivityGraph,
    pub durations: GateDurations,
    pub base: QubitCalibration,
    pub current: QubitCalibration,
    pub epoch: u64,
    pub epoch_timestamp: f64,
}

impl NoiseProfile {
    pub fn validate(&self) -> Result<()> {
        if self.coupling.num_qubits() != self.num_qubits {
            return invalid("coupling graph size differs from num_qubits");
        }
        let d = &self.durations;
        if [d.single, d.cnot, d.measure, d.reset].iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return invalid("gate durations must be finite and non-negative");
        }
        self.base.validate(self.num_qubits, self.tier)?;
        self.current.validate(self.num_qubits, self.tier)
    }

    /// A profile with no noise at all, for tests and baselines. Durations are
    /// zero, so the placeholder coherence times never act.
    pub fn noiseless(backend_id: impl Into<String>, coupling: ConnectivityGraph) -> Self {
        let n = coupling.num_qubits();
        let cal = QubitCalibration {
            t1: vec![1.0; n],
            t2: vec![1.0; n],
            eps_single: vec![0.0; n],
            eps_cnot: vec![0.0; n],
            p01: vec![0.0; n],
            p10: vec![0.0; n],
        };
        NoiseProfile {
            backend_id: backend_id.into(),
            tier: NoiseTier::FullEmulation,
            seed: 0,
            num_qubits: n,
            coupling,
            durations: GateDurations { single: 0.0, cnot: 0.0, measure: 0.0, reset: 0.0 },
            base: cal.clone(),
            current: cal,
            epoch: 0,
            epoch_timestamp: 0.0,
        }
    }

    /// Per-qubit channels of the current calibration, ready for the shot
    /// runner.
    pub fn compile(&self) -> Result<CompiledNoise> {
        let c = &self.current;
        let relax = |t: f64, q: usize| PauliChannel::thermal_relaxation(t, c.t1[q], c.t2[q]);
        let mut single = Vec::with_capacity(c.len());
        let mut cnot = Vec::with_capacity(c.len());
        let mut measure = Vec::with_capacity(c.len());
        let mut reset = Vec::with_capacity(c.len());
        let mut readout = Vec::with_capacity(c.len());
        for q in 0..c.len() {
            single.push(PauliChannel::depolarizing(c.eps_single[q])?.compose(&relax(self.durations.single, q)?));
            cnot.push(PauliChannel::depolarizing(c.eps_cnot[q])?.compose(&relax(self.durations.cnot, q)?));
            measure.push(relax(self.durations.measure, q)?);
            reset.push(relax(self.durations.reset, q)?);
            readout.push(ReadoutError::new(c.p01[q], c.p10[q])?);
        }
        Ok(CompiledNoise { calibration: c.clone(), single, cnot, measure, reset, readout })
    }
}

/// Precomputed channels of one profile at one epoch.
#[derive(Clone, Debug)]
pub struct CompiledNoise {
    calibration: QubitCalibration,
    single: Vec<PauliChannel>,
    cnot: Vec<PauliChannel>,
    measure: Vec<PauliChannel>,
    reset: Vec<PauliChannel>,
    readout: Vec<ReadoutError>,
}

impl CompiledNoise {
    fn with_duration(&self, op: &GateOp, q: usize, t: f64) -> PauliChannel {
        let c = &self.calibration;
        let eps = match op.kind {
            GateKind::Cnot => c.eps_cnot[q],
            GateKind::MeasureZ | GateKind::Reset => 0.0,
            _ => c.eps_single[q],
        };
        let relax = PauliChannel::thermal_relaxation(t, c.t1[q], c.t2[q]).unwrap_or_default();
        PauliChannel::depolarizing(eps).unwrap_or_default().compose(&relax)
    }
}

impl NoiseModel for CompiledNoise {
    fn gate_channel(&self, _: usize, op: &GateOp, qubit: usize) -> PauliChannel {
        if let Some(t) = op.duration {
            return self.with_duration(op, qubit, t);
        }
        match op.kind {
            GateKind::H | GateKind::S | GateKind::X | GateKind::Z => self.single[qubit],
            GateKind::Cnot => self.cnot[qubit],
            GateKind::MeasureZ => self.measure[qubit],
            GateKind::Reset => self.reset[qubit],
        }
    }

    fn readout(&self, qubit: usize) -> ReadoutError {
        self.readout[qubit]
    }
}

/// Closed interval sampled log-uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRange {
    pub lo: f64,
    pub hi: f64,
}

impl LogRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        LogRange { lo, hi }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.hi <= self.lo {
            return self.lo;
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (a + (b - a) * rng.random::<f64>()).exp()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.hi.is_finite()) {
            return invalid(format!("{name} range [{}, {}] is not a positive interval", self.lo, self.hi));
        }
        Ok(())
    }
}

/// Parameter ranges for fabricating backends. Times in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FleetConfig {
    pub t1: LogRange,
    /// T2 is drawn from `[t2.lo, min(2 T1, t2.hi)]`.
    pub t2: LogRange,
    pub eps_single: LogRange,
    pub eps_cnot: LogRange,
    pub readout: LogRange,
    pub durations: GateDurations,
}

impl Default for FleetConfig {
    fn default() -> Self {
        FleetConfig {
            t1: LogRange::new(50e-6, 400e-6),
            t2: LogRange::new(20e-6, 400e-6),
            eps_single: LogRange::new(1e-4, 1e-3),
            eps_cnot: LogRange::new(3e-3, 2e-2),
            readout: LogRange::new(5e-3, 5e-2),
            durations: GateDurations::default(),
        }
    }
}

impl FleetConfig {
    pub fn validate(&self) -> Result<()> {
        self.t1.validate("t1")?;
        self.t2.validate("t2")?;
        self.eps_single.validate("eps_single")?;
        self.eps_cnot.validate("eps_cnot")?;
        self.readout.validate("readout")?;
        if self.eps_single.hi > 1.0 || self.eps_cnot.hi > 1.0 || self.readout.hi > 1.0 {
            return invalid("error probabilities must not exceed 1");
        }
        Ok(())
    }
}

/// Lognormal widths of calibration-to-calibration jitter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DriftConfig {
    pub eps_sigma: f64,
    pub coherence_sigma: f64,
    pub readout_sigma: f64,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig { eps_sigma: 0.15, coherence_sigma: 0.05, readout_sigma: 0.10 }
    }
}

impl DriftConfig {
    pub fn none() -> Self {
        DriftConfig { eps_sigma: 0.0, coherence_sigma: 0.0, readout_sigma: 0.0 }
    }
}

/// Coupling graph shape for a fleet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphTemplate {
    HeavyHex { rows: usize, cols: usize },
    Grid { rows: usize, cols: usize },
    Complete { num_qubits: usize },
    Explicit { graph: ConnectivityGraph },
}

impl GraphTemplate {
    pub fn build(&self) -> Result<ConnectivityGraph> {
        Ok(match self {
            GraphTemplate::HeavyHex { rows, cols } => {
                if *rows == 0 || *cols == 0 {
                    return invalid("heavy_hex needs rows, cols >= 1");
                }
                ConnectivityGraph::heavy_hex(*rows, *cols)
            }
            GraphTemplate::Grid { rows, cols } => ConnectivityGraph::grid(*rows, *cols),
            GraphTemplate::Complete { num_qubits } => ConnectivityGraph::complete(*num_qubits),
            GraphTemplate::Explicit { graph } => graph.clone(),
        })
    }
}

/// Fabricates `n_backends` backends, `backend-0 .. backend-{n-1}`.
///
/// Every qubit draws its own T1, T2, gate error rates and readout flips from
/// `config`. Draw order does not depend on the tier, so an ERaD fleet has
/// exactly the T1/T2 values of the full-emulation fleet with the same seed.
pub fn generate_fleet(
    n_backends: usize,
    graph: &GraphTemplate,
    tier: NoiseTier,
    config: &FleetConfig,
    seed: u64,
) -> Result<Vec<NoiseProfile>> {
    if n_backends < 2 {
        return invalid(format!("a fleet needs at least 2 backends, got {n_backends}"));
    }
    config.validate()?;
    let coupling = graph.build()?;
    let n = coupling.num_qubits();
    (0..n_backends)
        .map(|b| {
            let backend_seed = rng::derive_seed(seed, b as u64);
            let mut r = rng::seeded(backend_seed);
            let mut cal = QubitCalibration {
                t1: Vec::with_capacity(n),
                t2: Vec::with_capacity(n),
                eps_single: Vec::with_capacity(n),
                eps_cnot: Vec::with_capacity(n),
                p01: Vec::with_capacity(n),
                p10: Vec::with_capacity(n),
            };
            for _ in 0..n {
                let t1 = config.t1.sample(&mut r);
                let t2_hi = config.t2.hi.min(2.0 * t1);
                let t2 = LogRange::new(config.t2.lo.min(t2_hi), t2_hi).sample(&mut r);
                cal.t1.push(t1);
                cal.t2.push(t2);
                cal.eps_single.push(config.eps_single.sample(&mut r));
                cal.eps_cnot.push(config.eps_cnot.sample(&mut r));
                cal.p01.push(config.readout.sample(&mut r));
                cal.p10.push(config.readout.sample(&mut r));
            }
            if tier == NoiseTier::Erad {
                for v in [&mut cal.eps_single, &mut cal.eps_cnot, &mut cal.p01, &mut cal.p10] {
                    v.iter_mut().for_each(|p| *p = 0.0);
                }
            }
            let profile = NoiseProfile {
                backend_id: format!("backend-{b}"),
                tier,
                seed: backend_seed,
                num_qubits: n,
                coupling: coupling.clone(),
                durations: config.durations,
                base: cal.clone(),
                current: cal,
                epoch: 0,
                epoch_timestamp: 0.0,
            };
            profile.validate()?;
            Ok(profile)
        })
        .collect()
}

/// Moves `profile` to calibration `epoch`: current values are redrawn as
/// base values times a lognormal factor; base values never change.
pub fn advance_calibration(profile: &NoiseProfile, epoch: &CalibrationEpoch, drift: &DriftConfig) -> Result<NoiseProfile> {
    if epoch.index <= profile.epoch {
        return Err(Error::StaleEpoch { requested: epoch.index, current: profile.epoch });
    }
    let mut r = rng::seeded(rng::derive_seed(epoch.seed, profile.seed));
    let mut factor = |sigma: f64| -> f64 {
        let z: f64 = StandardNormal.sample(&mut r);
        (sigma * z).exp()
    };
    let base = &profile.base;
    let n = base.len();
    let mut cur = base.clone();
    for q in 0..n {
        let t1 = base.t1[q] * factor(drift.coherence_sigma);
        let t2 = (base.t2[q] * factor(drift.coherence_sigma)).min(2.0 * t1);
        cur.t1[q] = t1;
        cur.t2[q] = t2;
        cur.eps_single[q] = (base.eps_single[q] * factor(drift.eps_sigma)).min(1.0);
        cur.eps_cnot[q] = (base.eps_cnot[q] * factor(drift.eps_sigma)).min(1.0);
        cur.p01[q] = (base.p01[q] * factor(drift.readout_sigma)).min(1.0);
        cur.p10[q] = (base.p10[q] * factor(drift.readout_sigma)).min(1.0);
    }
    let mut next = profile.clone();
    next.current = cur;
    next.epoch = epoch.index;
    next.epoch_timestamp = epoch.timestamp;
    next.validate()?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fleet(tier: NoiseTier, seed: u64) -> Vec<NoiseProfile> {
        generate_fleet(5, &GraphTemplate::Grid { rows: 3, cols: 4 }, tier, &FleetConfig::default(), seed).unwrap()
    }

    #[test]
    fn five_valid_profiles() {
        let f = fleet(NoiseTier::FullEmulation, 1);
        assert_eq!(f.len(), 5);
        for p in &f {
            p.validate().unwrap();
            assert_eq!(p.num_qubits, 12);
            for q in 0..12 {
                assert!((50e-6..=400e-6).contains(&p.base.t1[q]));
                assert!(p.base.t2[q] <= 2.0 * p.base.t1[q] && p.base.t2[q] >= 20e-6 * 0.999);
                assert!((3e-3..=2e-2).contains(&p.base.eps_cnot[q]));
            }
        }
        let ids: Vec<&str> = f.iter().map(|p| p.backend_id.as_str()).collect();
        assert_eq!(ids, ["backend-0", "backend-1", "backend-2", "backend-3", "backend-4"]);
    }

    #[test]
    fn same_seed_same_fleet() {
        assert_eq!(fleet(NoiseTier::FullEmulation, 3), fleet(NoiseTier::FullEmulation, 3));
        assert_ne!(fleet(NoiseTier::FullEmulation, 3), fleet(NoiseTier::FullEmulation, 4));
    }

    #[test]
    fn erad_fleet_has_only_relaxation() {
        let erad = fleet(NoiseTier::Erad, 5);
        let full = fleet(NoiseTier::FullEmulation, 5);
        for (e, f) in erad.iter().zip(&full) {
            assert!(e.base.eps_cnot.iter().chain(&e.base.eps_single).all(|&p| p == 0.0));
            assert!(e.base.p01.iter().chain(&e.base.p10).all(|&p| p == 0.0));
            assert_eq!(e.base.t1, f.base.t1);
            assert_eq!(e.base.t2, f.base.t2);
        }
    }

    #[test]
    fn single_backend_fleet_is_rejected() {
        let r = generate_fleet(1, &GraphTemplate::Complete { num_qubits: 3 }, NoiseTier::Erad, &FleetConfig::default(), 0);
        assert!(r.is_err());
    }

    #[test]
    fn zero_drift_keeps_profile() {
        let p = &fleet(NoiseTier::FullEmulation, 6)[0];
        let e = CalibrationEpoch { index: 1, timestamp: 86_400.0, seed: 42 };
        let next = advance_calibration(p, &e, &DriftConfig::none()).unwrap();
        assert_eq!(next.current, p.current);
        assert_eq!(next.epoch, 1);
    }

    #[test]
    fn drift_is_deterministic_and_keeps_base() {
        let p = &fleet(NoiseTier::FullEmulation, 7)[2];
        let e = CalibrationEpoch { index: 3, timestamp: 0.0, seed: 9 };
        let a = advance_calibration(p, &e, &DriftConfig::default()).unwrap();
        let b = advance_calibration(p, &e, &DriftConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.base, p.base);
        assert_ne!(a.current, p.current);
    }

    #[test]
    fn stale_epoch_is_rejected() {
        let p = &fleet(NoiseTier::FullEmulation, 8)[0];
        let e = CalibrationEpoch { index: 2, timestamp: 0.0, seed: 1 };
        let moved = advance_calibration(p, &e, &DriftConfig::default()).unwrap();
        assert!(matches!(advance_calibration(&moved, &e, &DriftConfig::default()), Err(Error::StaleEpoch { .. })));
    }

    #[test]
    fn drift_width_matches_sigma() {
        let p = &fleet(NoiseTier::FullEmulation, 10)[0];
        let drift = DriftConfig::default();
        let logs: Vec<f64> = (1..=1000u64)
            .map(|i| {
                let e = CalibrationEpoch { index: i, timestamp: i as f64, seed: rng::derive_seed(77, i) };
                let next = advance_calibration(p, &e, &drift).unwrap();
                (next.current.eps_cnot[0] / p.base.eps_cnot[0]).ln()
            })
            .collect();
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        let var = logs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (logs.len() - 1) as f64;
        let sd = var.sqrt();
        assert!((sd - drift.eps_sigma).abs() <= 0.1 * drift.eps_sigma, "sd {sd}");
    }

    #[test]
    fn compiled_channels_follow_tier() {
        let f = fleet(NoiseTier::Erad, 11);
        let noise = f[0].compile().unwrap();
        assert_eq!(noise.readout(0), ReadoutError::default());
        let ch = noise.gate_channel(0, &GateOp::cnot(0, 1), 0);
        let expect = PauliChannel::thermal_relaxation(300e-9, f[0].current.t1[0], f[0].current.t2[0]).unwrap();
        assert!((ch.px - expect.px).abs() < 1e-15 && (ch.pz - expect.pz).abs() < 1e-15);
    }
}
