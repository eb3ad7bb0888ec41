//! Brute-force reference: N explicit spin-1/2 particles in a 2^N state vector.
//!
//! Nothing here touches the Dicke-basis machinery. Collective rotations are
//! products of closed-form single-spin gates, the twist is a diagonal phase
//! on bit strings, and symmetric-subspace amplitudes come from projecting
//! onto the normalized Dicke sums.

#![allow(dead_code)]

use num_complex::Complex64 as C64;

/// Bit `q` of a basis index is spin `q`: 0 = up (+z), 1 = down.
#[derive(Clone, Debug)]
pub struct Register {
    pub n: usize,
    pub amps: Vec<C64>,
}

#[derive(Clone, Copy, Debug)]
pub enum Pauli {
    X,
    Y,
    Z,
}

fn pauli(p: Pauli) -> [[C64; 2]; 2] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match p {
        Pauli::X => [[o, one], [one, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[one, o], [o, -one]],
    }
}

/// `exp(-i·angle·σ/2) = cos(angle/2)·1 - i·sin(angle/2)·σ`.
fn spin_rotation(p: Pauli, angle: f64) -> [[C64; 2]; 2] {
    let s = pauli(p);
    let (sn, cs) = (0.5 * angle).sin_cos();
    let mut g = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c { cs } else { 0.0 };
            g[r][c] = C64::new(id, 0.0) - C64::new(0.0, sn) * s[r][c];
        }
    }
    g
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Register {
    /// Every spin along +x: (|0⟩ + |1⟩)/√2 each.
    pub fn plus_x(n: usize) -> Self {
        let dim = 1usize << n;
        let a = (dim as f64).sqrt().recip();
        Self {
            n,
            amps: vec![C64::new(a, 0.0); dim],
        }
    }

    fn apply_gate_everywhere(&mut self, g: [[C64; 2]; 2]) {
        for q in 0..self.n {
            let bit = 1usize << q;
            for idx in 0..self.amps.len() {
                if idx & bit == 0 {
                    let a0 = self.amps[idx];
                    let a1 = self.amps[idx | bit];
                    self.amps[idx] = g[0][0] * a0 + g[0][1] * a1;
                    self.amps[idx | bit] = g[1][0] * a0 + g[1][1] * a1;
                }
            }
        }
    }

    /// `exp(-i·angle·J_p)` with `J_p = Σ σ_p / 2`.
    pub fn rotate(&mut self, p: Pauli, angle: f64) {
        self.apply_gate_everywhere(spin_rotation(p, angle));
    }

    fn jz_of(&self, idx: usize) -> f64 {
        let down = idx.count_ones() as f64;
        0.5 * (self.n as f64 - 2.0 * down)
    }

    /// `exp(-i·t·J_z²)`.
    pub fn twist(&mut self, t: f64) {
        for idx in 0..self.amps.len() {
            let m = self.jz_of(idx);
            self.amps[idx] *= C64::from_polar(1.0, -t * m * m);
        }
    }

    /// `J_p |ψ⟩` as a sum of single-spin Paulis.
    pub fn apply_collective(&self, p: Pauli) -> Vec<C64> {
        let s = pauli(p);
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for q in 0..self.n {
            let bit = 1usize << q;
            for idx in 0..self.amps.len() {
                let b = (idx & bit != 0) as usize;
                let flipped = idx ^ bit;
                // row b of σ acting on spin q
                out[idx] += 0.5 * s[b][b] * self.amps[idx];
                out[idx] += 0.5 * s[b][1 - b] * self.amps[flipped];
            }
        }
        out
    }

    pub fn expectation(&self, p: Pauli) -> f64 {
        let applied = self.apply_collective(p);
        self.amps
            .iter()
            .zip(&applied)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn variance(&self, p: Pauli) -> f64 {
        let applied = self.apply_collective(p);
        let mean: f64 = self
            .amps
            .iter()
            .zip(&applied)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        applied.iter().map(|c| c.norm_sqr()).sum::<f64>() - mean * mean
    }

    /// Projections onto the Dicke states, index k = number of down spins
    /// (so m = N/2 - k, descending).
    pub fn dicke_amplitudes(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.n + 1];
        for (idx, a) in self.amps.iter().enumerate() {
            out[idx.count_ones() as usize] += a;
        }
        for (k, c) in out.iter_mut().enumerate() {
            *c /= binomial(self.n, k).sqrt();
        }
        out
    }

    /// Weight outside the symmetric subspace (should be zero).
    pub fn leakage(&self) -> f64 {
        let sym: f64 = self.dicke_amplitudes().iter().map(|c| c.norm_sqr()).sum();
        1.0 - sym
    }

    /// `P(m)` for a `J_z` measurement, m descending.
    pub fn z_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        for (idx, a) in self.amps.iter().enumerate() {
            out[idx.count_ones() as usize] += a.norm_sqr();
        }
        out
    }

    /// `P(m)` for a `J_x` measurement, m descending: each spin is expanded in
    /// the σ_x eigenbasis |±x⟩ = (|0⟩ ± |1⟩)/√2 and the +x spins counted.
    pub fn x_distribution(&self) -> Vec<f64> {
        let mut coeffs = self.amps.clone();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for q in 0..self.n {
            let bit = 1usize << q;
            for idx in 0..coeffs.len() {
                if idx & bit == 0 {
                    let (a0, a1) = (coeffs[idx], coeffs[idx | bit]);
                    coeffs[idx] = (a0 + a1) * h; // ⟨+x|
                    coeffs[idx | bit] = (a0 - a1) * h; // ⟨-x|
                }
            }
        }
        let mut out = vec![0.0; self.n + 1];
        for (idx, a) in coeffs.iter().enumerate() {
            out[idx.count_ones() as usize] += a.norm_sqr();
        }
        out
    }
}

/// Realignment angle evaluated directly from its closed form.
pub fn reference_adjustment(n: usize, t: f64) -> f64 {
    let a = 1.0 - (2.0 * t).cos().powi(n as i32 - 2);
    let b = 4.0 * t.sin() * t.cos().powi(n as i32 - 2);
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        0.5 * b.atan2(a)
    }
}

/// Squeezed probe `exp(+iδJ_x) exp(-itJ_z²) |+x⟩^N`, then the channel
/// `exp(-iφJ_y)`.
pub fn reference_pipeline(n: usize, t: f64, phi: f64) -> Register {
    let mut r = Register::plus_x(n);
    r.twist(t);
    r.rotate(Pauli::X, -reference_adjustment(n, t));
    r.rotate(Pauli::Y, phi);
    r
}
