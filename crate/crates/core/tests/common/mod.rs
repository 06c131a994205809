//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use syndrome_fp::sim::{Circuit, GateKind, GateOp};
use syndrome_fp::topology::ConnectivityGraph;

/// Dense state vector; qubit `q` is bit `q` of the basis index.
pub struct StateVector {
    pub n: usize,
    pub amp: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[0] = Complex64::new(1.0, 0.0);
        StateVector { n, amp }
    }

    pub fn apply(&mut self, op: &GateOp) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match op.kind {
            GateKind::H => {
                let m = 1 << op.targets[0];
                for i in 0..self.amp.len() {
                    if i & m == 0 {
                        let (a, b) = (self.amp[i], self.amp[i | m]);
                        self.amp[i] = (a + b) * h;
                        self.amp[i | m] = (a - b) * h;
                    }
                }
            }
            GateKind::S => {
                let m = 1 << op.targets[0];
                for (i, a) in self.amp.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a *= Complex64::i();
                    }
                }
            }
            GateKind::X => {
                let m = 1 << op.targets[0];
                for i in 0..self.amp.len() {
                    if i & m == 0 {
                        self.amp.swap(i, i | m);
                    }
                }
            }
            GateKind::Z => {
                let m = 1 << op.targets[0];
                for (i, a) in self.amp.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = -*a;
                    }
                }
            }
            GateKind::Cnot => {
                let (c, t) = (1 << op.targets[0], 1 << op.targets[1]);
                for i in 0..self.amp.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amp.swap(i, i | t);
                    }
                }
            }
            GateKind::MeasureZ | GateKind::Reset => panic!("oracle handles unitary prefixes only"),
        }
    }

    /// Outcome distribution of measuring `qubits` in order; outcome bit `k`
    /// is the result for `qubits[k]`.
    pub fn distribution(&self, qubits: &[usize]) -> Vec<f64> {
        let mut p = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amp.iter().enumerate() {
            let key = qubits.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((i >> q) & 1) << k));
            p[key] += a.norm_sqr();
        }
        p
    }
}

/// Random unitary Clifford prefix over `n` qubits followed by terminal
/// measurement of `measured`.
pub fn random_clifford<R: Rng>(n: usize, depth: usize, rng: &mut R) -> (Circuit, Vec<usize>) {
    let mut c = Circuit::new(n);
    for _ in 0..depth {
        let q = rng.random_range(0..n);
        let op = match rng.random_range(0..6) {
            0 | 1 => GateOp::h(q),
            2 => GateOp::s(q),
            3 => GateOp::x(q),
            4 => GateOp::z(q),
            _ if n > 1 => {
                let mut t = rng.random_range(0..n - 1);
                if t >= q {
                    t += 1;
                }
                GateOp::cnot(q, t)
            }
            _ => GateOp::h(q),
        };
        c.push(op);
    }
    let mut measured: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.8)).collect();
    if measured.is_empty() {
        measured.push(0);
    }
    for &q in &measured {
        c.push(GateOp::measure(q));
    }
    (c, measured)
}

/// Exact distribution of a unitary-prefix circuit's measured qubits.
pub fn oracle_distribution(c: &Circuit, measured: &[usize]) -> Vec<f64> {
    let mut sv = StateVector::zero(c.num_qubits);
    for op in c.ops.iter().filter(|o| o.kind.is_unitary()) {
        sv.apply(op);
    }
    sv.distribution(measured)
}

/// Pearson chi-square of `counts` against `p` and its degrees of freedom
/// (support size - 1).
pub fn chi_square(counts: &[usize], p: &[f64], shots: usize) -> (f64, usize) {
    let mut chi = 0.0;
    let mut support = 0usize;
    for (&k, &pi) in counts.iter().zip(p) {
        if pi > 1e-12 {
            support += 1;
            let e = shots as f64 * pi;
            chi += (k as f64 - e).powi(2) / e;
        }
    }
    (chi, support.saturating_sub(1))
}

/// Worst standardized deviation of observed outcome counts from `p`, and
/// whether any impossible outcome occurred.
pub fn max_z(counts: &[usize], p: &[f64], shots: usize) -> (f64, bool) {
    let mut worst: f64 = 0.0;
    let mut impossible = false;
    for (&k, &pi) in counts.iter().zip(p) {
        if pi < 1e-12 {
            impossible |= k > 0;
            continue;
        }
        let sd = (shots as f64 * pi * (1.0 - pi)).sqrt();
        if sd > 0.0 {
            worst = worst.max((k as f64 - shots as f64 * pi).abs() / sd);
        } else if k != shots {
            impossible = true;
        }
    }
    (worst, impossible)
}

/// Adjusted Rand index from pair counts over all unordered pairs.
pub fn ari_pairs(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut ss, mut sd, mut ds, mut dd) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in i + 1..n {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => ss += 1.0,
                (true, false) => sd += 1.0,
                (false, true) => ds += 1.0,
                (false, false) => dd += 1.0,
            }
        }
    }
    let den = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
    if den == 0.0 {
        1.0
    } else {
        2.0 * (ss * dd - sd * ds) / den
    }
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for v in 0..=next {
            prefix.push(v);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// Number of injective edge-preserving maps from `p` into `h`.
pub fn count_embeddings(p: &ConnectivityGraph, h: &ConnectivityGraph) -> usize {
    fn go(p: &ConnectivityGraph, h: &ConnectivityGraph, map: &mut Vec<usize>, used: &mut [bool]) -> usize {
        let k = map.len();
        if k == p.num_qubits() {
            return 1;
        }
        let mut total = 0;
        for v in 0..h.num_qubits() {
            if used[v] || !p.neighbors(k).iter().filter(|&&w| w < k).all(|&w| h.has_edge(map[w], v)) {
                continue;
            }
            used[v] = true;
            map.push(v);
            total += go(p, h, map, used);
            map.pop();
            used[v] = false;
        }
        total
    }
    go(p, h, &mut Vec::new(), &mut vec![false; h.num_qubits()])
}

pub fn random_graph<R: Rng>(n: usize, density: f64, rng: &mut R) -> ConnectivityGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(density) {
                edges.push((a, b));
            }
        }
    }
    ConnectivityGraph::new(n, edges).unwrap()
}

/// Tally of outcome keys built from the measured bits.
pub fn tally(bits: impl Iterator<Item = Vec<bool>>, width: usize) -> Vec<usize> {
    let mut counts = vec![0; 1 << width];
    for b in bits {
        counts[b.iter().enumerate().fold(0, |acc, (k, &x)| acc | (usize::from(x) << k))] += 1;
    }
    counts
}

/// Frequency of each distinct value.
pub fn histogram<T: std::hash::Hash + Eq>(xs: impl Iterator<Item = T>) -> HashMap<T, usize> {
    let mut h = HashMap::new();
    for x in xs {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}
