//! Dense truncated Fock-space states.
//!
//! This is the brute-force side of every cross-check in the crate: states are
//! stored as explicit amplitude tensors and gates are applied sector by sector
//! in total photon number. Nothing here uses the closed forms of
//! [`crate::catalysis`].

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::catalysis::TruncationWarning;
use crate::error::{check_domain, Error, Result};

/// Default bound on `1 − ‖ψ‖²` before a truncation warning is attached.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;

/// Tolerance on `‖ψ‖² = 1` for operations that need normalized input.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A value together with a possible truncation warning.
#[derive(Debug, Clone)]
pub struct Checked<T> {
    pub value: T,
    pub warning: Option<TruncationWarning>,
}

/// Amplitudes over `modes` modes, each truncated at `cutoff` photons.
///
/// Mode 0 is the most significant index.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    modes: usize,
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn zeros(modes: usize, cutoff: usize) -> Self {
        Self {
            cutoff,
            modes,
            amps: vec![ZERO; (cutoff + 1).pow(modes as u32)],
        }
    }

    pub fn basis(cutoff: usize, occupation: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(occupation.len(), cutoff);
        let idx = s.index_of(occupation)?;
        s.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn vacuum(modes: usize, cutoff: usize) -> Self {
        let mut s = Self::zeros(modes, cutoff);
        s.amps[0] = Complex64::new(1.0, 0.0);
        s
    }

    /// Single-mode state from amplitudes on `|0⟩, |1⟩, …`; extra entries beyond
    /// the cutoff are dropped.
    pub fn single_mode(cutoff: usize, amps: &[Complex64]) -> Self {
        let mut s = Self::zeros(1, cutoff);
        for (dst, src) in s.amps.iter_mut().zip(amps) {
            *dst = *src;
        }
        s
    }

    pub fn from_amplitudes(modes: usize, cutoff: usize, amps: Vec<Complex64>) -> Result<Self> {
        let expected = (cutoff + 1).pow(modes as u32);
        if amps.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for {modes} modes at cutoff {cutoff} (need {expected})",
                amps.len()
            )));
        }
        Ok(Self {
            cutoff,
            modes,
            amps,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow((self.modes - 1 - mode) as u32)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.modes {
            Ok(())
        } else {
            Err(Error::ModeIndex {
                index: mode,
                modes: self.modes,
            })
        }
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_mode(a)?;
        self.check_mode(b)?;
        if a == b {
            return Err(Error::Contract(format!("modes must be distinct, got {a} twice")));
        }
        Ok(())
    }

    pub fn index_of(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.modes {
            return Err(Error::ShapeMismatch(format!(
                "occupation of length {} for {} modes",
                occupation.len(),
                self.modes
            )));
        }
        let mut idx = 0;
        for &n in occupation {
            if n > self.cutoff {
                return Err(Error::Contract(format!(
                    "occupation {n} exceeds cutoff {}",
                    self.cutoff
                )));
            }
            idx = idx * (self.cutoff + 1) + n;
        }
        Ok(idx)
    }

    pub fn occupation(&self, mut idx: usize) -> Vec<usize> {
        let mut occ = vec![0; self.modes];
        for slot in occ.iter_mut().rev() {
            *slot = idx % (self.cutoff + 1);
            idx /= self.cutoff + 1;
        }
        occ
    }

    /// Photon number of `mode` at flat index `idx`.
    fn count(&self, idx: usize, mode: usize) -> usize {
        (idx / self.stride(mode)) % (self.cutoff + 1)
    }

    pub fn get(&self, occupation: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.index_of(occupation)?])
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            cutoff: self.cutoff,
            modes: self.modes,
            amps: self.amps.iter().map(|a| a * k).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq();
        if n <= 0.0 {
            return Err(Error::NoSupport);
        }
        Ok(self.scale(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.modes == other.modes && self.cutoff == other.cutoff {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{} modes @ cutoff {} vs {} modes @ cutoff {}",
                self.modes, self.cutoff, other.modes, other.cutoff
            )))
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            cutoff: self.cutoff,
            modes: self.modes,
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    /// `self ⊗ other`; `other`'s modes are appended after `self`'s.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.cutoff != other.cutoff {
            return Err(Error::ShapeMismatch(format!(
                "cutoffs {} and {} differ",
                self.cutoff, other.cutoff
            )));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(Self {
            cutoff: self.cutoff,
            modes: self.modes + other.modes,
            amps,
        })
    }

    pub fn mean_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| self.count(i, mode) as f64 * a.norm_sqr())
            .sum())
    }

    /// `⟨N̂_j N̂_k⟩` (`j == k` gives `⟨N̂_j²⟩`).
    pub fn number_correlation(&self, j: usize, k: usize) -> Result<f64> {
        self.check_mode(j)?;
        self.check_mode(k)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| (self.count(i, j) * self.count(i, k)) as f64 * a.norm_sqr())
            .sum())
    }

    /// Multiplies every amplitude by `phase(occupation)`.
    pub fn apply_diagonal(&self, phase: impl Fn(&[usize]) -> Complex64) -> Self {
        let mut out = self.clone();
        let mut occ = vec![0; self.modes];
        for a in out.amps.iter_mut() {
            *a *= phase(&occ);
            increment(&mut occ, self.cutoff);
        }
        out
    }

    /// Applies the passive two-mode transformation with
    /// `a† ↦ m[0][0] a† + m[1][0] b†`, `b† ↦ m[0][1] a† + m[1][1] b†`.
    ///
    /// Each total-photon sector `N = n_a + n_b` is mapped by its own
    /// `(N+1)×(N+1)` block; output components above the cutoff are dropped.
    /// Only the block columns of occupied input states are evaluated.
    pub fn apply_two_mode(&self, mode_a: usize, mode_b: usize, m: [[Complex64; 2]; 2]) -> Result<Self> {
        self.check_pair(mode_a, mode_b)?;
        let c = self.cutoff;
        let mut columns = SectorColumns::new(&m, 2 * c);
        let (sa, sb) = (self.stride(mode_a), self.stride(mode_b));
        let mut out = vec![ZERO; self.amps.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            if *amp == ZERO {
                continue;
            }
            let na = self.count(idx, mode_a);
            let nb = self.count(idx, mode_b);
            let base = idx - na * sa - nb * sb;
            let n = na + nb;
            let col = columns.column(n, na);
            for k in n.saturating_sub(c)..=n.min(c) {
                out[base + k * sa + (n - k) * sb] += col[k] * amp;
            }
        }
        Ok(Self {
            cutoff: c,
            modes: self.modes,
            amps: out,
        })
    }

    /// Projects `mode` onto `|k⟩` and removes it; returns the unnormalized
    /// conditional state and its squared norm.
    pub fn project(&self, mode: usize, k: usize) -> Result<(Self, f64)> {
        self.check_mode(mode)?;
        if k > self.cutoff {
            return Err(Error::Contract(format!("outcome {k} exceeds cutoff {}", self.cutoff)));
        }
        let s = self.stride(mode);
        let d = self.cutoff + 1;
        let outer = self.amps.len() / (s * d);
        let mut amps = Vec::with_capacity(self.amps.len() / d);
        for hi in 0..outer {
            let start = hi * s * d + k * s;
            amps.extend_from_slice(&self.amps[start..start + s]);
        }
        let state = Self {
            cutoff: self.cutoff,
            modes: self.modes - 1,
            amps,
        };
        let p = state.norm_sq();
        Ok((state, p))
    }

    /// `1 − ‖ψ‖²` as a warning when above `tolerance`.
    pub fn leakage_warning(&self, expected_norm_sq: f64, tolerance: f64) -> Option<TruncationWarning> {
        let leakage = expected_norm_sq - self.norm_sq();
        (leakage > tolerance).then_some(TruncationWarning { leakage, tolerance })
    }
}

fn increment(occ: &mut [usize], cutoff: usize) {
    for slot in occ.iter_mut().rev() {
        if *slot < cutoff {
            *slot += 1;
            return;
        }
        *slot = 0;
    }
}

/// Columns `⟨k, N−k| U |j, N−j⟩` of the photon-number sector blocks,
/// built on demand in log space so high sectors neither overflow nor cost
/// a full block.
struct SectorColumns {
    ln_f: Vec<f64>,
    ln_abs: [[f64; 2]; 2],
    arg: [[f64; 2]; 2],
    cache: HashMap<(usize, usize), Vec<Complex64>>,
}

impl SectorColumns {
    fn new(m: &[[Complex64; 2]; 2], max_n: usize) -> Self {
        let mut ln_f = Vec::with_capacity(max_n + 1);
        let mut acc = 0.0;
        ln_f.push(0.0);
        for k in 1..=max_n {
            acc += (k as f64).ln();
            ln_f.push(acc);
        }
        Self {
            ln_f,
            ln_abs: m.map(|row| row.map(|x| x.norm().ln())),
            arg: m.map(|row| row.map(|x| x.arg())),
            cache: HashMap::new(),
        }
    }

    /// `e · ln|m_ij|` with `0 · ln 0 = 0`.
    fn ln_pow(&self, i: usize, j: usize, e: usize) -> f64 {
        if e == 0 {
            0.0
        } else {
            e as f64 * self.ln_abs[i][j]
        }
    }

    fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.ln_f[n] - self.ln_f[k] - self.ln_f[n - k]
    }

    fn column(&mut self, n: usize, j: usize) -> &[Complex64] {
        if !self.cache.contains_key(&(n, j)) {
            // (m00 a† + m10 b†)^j (m01 a† + m11 b†)^{n−j}, coefficient of a†^k b†^{n−k}
            let mut col = vec![ZERO; n + 1];
            let ln_in = self.ln_f[j] + self.ln_f[n - j];
            for p in 0..=j {
                let x = self.ln_binomial(j, p) + self.ln_pow(0, 0, p) + self.ln_pow(1, 0, j - p);
                let xa = p as f64 * self.arg[0][0] + (j - p) as f64 * self.arg[1][0];
                for q in 0..=(n - j) {
                    let k = p + q;
                    let y = self.ln_binomial(n - j, q) + self.ln_pow(0, 1, q) + self.ln_pow(1, 1, n - j - q);
                    let ya = q as f64 * self.arg[0][1] + (n - j - q) as f64 * self.arg[1][1];
                    let ln_mag = x + y + 0.5 * (self.ln_f[k] + self.ln_f[n - k] - ln_in);
                    col[k] += Complex64::from_polar(ln_mag.exp(), xa + ya);
                }
            }
            self.cache.insert((n, j), col);
        }
        &self.cache[&(n, j)]
    }
}

/// Mode map of `exp[θ (b†a − b a†)]` with `cos θ = √T`.
pub fn beamsplitter_matrix(t: f64) -> [[Complex64; 2]; 2] {
    let c = t.sqrt();
    let s = (1.0 - t).max(0.0).sqrt();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// Mode map of `exp[iφ (a†b + a b†)]`.
pub fn mixer_matrix(phi: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new(phi.cos(), 0.0);
    let is = Complex64::new(0.0, phi.sin());
    [[c, is], [is, c]]
}

/// `B̂(T) = exp[(b†a − b a†) arccos √T]` with `mode_b` playing the ancilla.
pub fn apply_beamsplitter(state: &FockVector, mode_a: usize, mode_b: usize, t: f64) -> Result<FockVector> {
    check_domain("T", t, (0.0..=1.0).contains(&t), "0 <= T <= 1")?;
    state.apply_two_mode(mode_a, mode_b, beamsplitter_matrix(t))
}

/// `e^{iφ n̂}` on one mode.
pub fn apply_phase(state: &FockVector, mode: usize, phi: f64) -> Result<FockVector> {
    state.check_mode(mode)?;
    Ok(state.apply_diagonal(|occ| Complex64::from_polar(1.0, phi * occ[mode] as f64)))
}

pub fn project_photon_number(state: &FockVector, mode: usize, k: usize) -> Result<(FockVector, f64)> {
    state.project(mode, k)
}

/// `√sech r Σ (−tanh r / 2)^l √(2l)!/l! |2l⟩` truncated at `cutoff`.
pub fn squeezed_vacuum(r: f64, cutoff: usize) -> Result<Checked<FockVector>> {
    check_domain("r", r, r >= 0.0, "r >= 0")?;
    let mut amps = vec![ZERO; cutoff + 1];
    let mut a = 1.0 / r.cosh().sqrt();
    let ratio = -0.5 * r.tanh();
    for l in 0..=cutoff / 2 {
        if l > 0 {
            let two_l = 2.0 * l as f64;
            a *= ratio * (two_l * (two_l - 1.0)).sqrt() / l as f64;
        }
        amps[2 * l] = Complex64::new(a, 0.0);
    }
    let value = FockVector::single_mode(cutoff, &amps);
    let warning = value.leakage_warning(1.0, LEAKAGE_TOLERANCE);
    Ok(Checked { value, warning })
}

/// `⟨n| B̂(T) |n⟩ |ξ⟩` built literally: squeeze, inject `|n⟩`, mix, project.
pub fn oracle_catalyzed_state(r: f64, t: f64, n: usize, cutoff: usize) -> Result<Checked<FockVector>> {
    check_domain("T", t, t > 0.0 && t <= 1.0, "0 < T <= 1")?;
    if n > cutoff {
        return Err(Error::Contract(format!("catalysis photons {n} exceed cutoff {cutoff}")));
    }
    let squeezed = squeezed_vacuum(r, cutoff)?;
    let ancilla = FockVector::basis(cutoff, &[n])?;
    let joint = squeezed.value.tensor(&ancilla)?;
    let mixed = apply_beamsplitter(&joint, 0, 1, t)?;
    let (value, _) = mixed.project(1, n)?;
    Ok(Checked {
        value,
        warning: squeezed.warning,
    })
}

/// `f_jk = 4(⟨N̂_j N̂_k⟩ − ⟨N̂_j⟩⟨N̂_k⟩)` directly from amplitudes.
pub fn oracle_qfi_matrix(state: &FockVector, phase_modes: &[usize]) -> Result<DMatrix<f64>> {
    let norm = state.norm_sq();
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Contract(format!("state norm² {norm} is not 1")));
    }
    let means = phase_modes
        .iter()
        .map(|&m| state.mean_number(m))
        .collect::<Result<Vec<_>>>()?;
    let d = phase_modes.len();
    let mut f = DMatrix::zeros(d, d);
    for j in 0..d {
        for k in j..d {
            let corr = state.number_correlation(phase_modes[j], phase_modes[k])?;
            let v = 4.0 * (corr - means[j] * means[k]);
            f[(j, k)] = v;
            f[(k, j)] = v;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Matrix exponential of the generator restricted to one photon sector,
    /// independent of `sector_block`.
    fn expm_sector(n: usize, generator: impl Fn(usize, usize) -> Complex64) -> DMatrix<Complex64> {
        let g = DMatrix::from_fn(n + 1, n + 1, generator);
        g.exp()
    }

    #[test]
    fn squeezed_vacuum_examples() {
        let v = squeezed_vacuum(0.0, 6).unwrap().value;
        assert_eq!(v, FockVector::vacuum(1, 6));

        let s = squeezed_vacuum(0.5, 6).unwrap().value;
        let expected = -(0.5f64.tanh()) * (1.0 / 0.5f64.cosh()).sqrt() / 2f64.sqrt();
        assert_relative_eq!(s.amps()[2].re, expected, epsilon = 1e-15);
        assert_relative_eq!(expected, -0.307_719_176_458_370_4, epsilon = 1e-12);
        assert!(s.amps().iter().skip(1).step_by(2).all(|a| *a == ZERO));
    }

    #[test]
    fn squeezed_vacuum_truncation() {
        // Closed-form tail: Σ_{l>30} sech r · C(2l,l) (tanh r / 2)^{2l}
        let r: f64 = 1.5;
        let mut w = 1.0 / r.cosh();
        let mut tail = 0.0;
        for l in 1..2000 {
            w *= r.tanh().powi(2) * (2 * l - 1) as f64 / (2 * l) as f64;
            if l > 30 {
                tail += w;
            }
        }
        let at60 = squeezed_vacuum(r, 60).unwrap();
        assert_relative_eq!(1.0 - at60.value.norm_sq(), tail, max_relative = 1e-9);
        assert_relative_eq!(tail, 4.628_179_5e-4, max_relative = 1e-7);
        assert!(at60.warning.is_some());

        let at220 = squeezed_vacuum(r, 220).unwrap();
        assert!(at220.warning.is_none());
        assert!((1.0 - at220.value.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn beamsplitter_identity_and_single_photon() {
        let s = FockVector::basis(3, &[2, 1]).unwrap();
        assert_eq!(apply_beamsplitter(&s, 0, 1, 1.0).unwrap(), s);

        let t = 0.3;
        let out = apply_beamsplitter(&FockVector::basis(2, &[1, 0]).unwrap(), 0, 1, t).unwrap();
        assert_relative_eq!(out.get(&[1, 0]).unwrap().re, t.sqrt(), epsilon = 1e-15);
        // exp[θ(b†a − b a†)] sends a† → cos θ a† + sin θ b†
        assert_relative_eq!(out.get(&[0, 1]).unwrap().re, (1.0 - t).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn beamsplitter_matches_generator_exponential() {
        // Sector N=3 in basis |k, 3−k⟩, generator θ(b†a − b a†).
        let t: f64 = 0.9;
        let theta = t.sqrt().acos();
        let n = 3;
        let u = expm_sector(n, |k, j| {
            // b†a: |j, n−j⟩ → √j √(n−j+1) |j−1, n−j+1⟩
            let mut g = 0.0;
            if j >= 1 && k == j - 1 {
                g += ((j * (n - j + 1)) as f64).sqrt();
            }
            // −b a†: |j, n−j⟩ → −√(j+1) √(n−j) |j+1, n−j−1⟩
            if j < n && k == j + 1 {
                g -= (((j + 1) * (n - j)) as f64).sqrt();
            }
            c(theta * g)
        });
        let out = apply_beamsplitter(&FockVector::basis(3, &[2, 1]).unwrap(), 0, 1, t).unwrap();
        for k in 0..=n {
            let got = out.get(&[k, n - k]).unwrap();
            assert!((got - u[(k, 2)]).norm() < 1e-13, "k={k}: {got} vs {}", u[(k, 2)]);
        }
    }

    #[test]
    fn mixer_matches_generator_exponential() {
        let phi = std::f64::consts::FRAC_PI_4;
        for n in 1..5 {
            let u = expm_sector(n, |k, j| {
                let mut g = 0.0;
                if j >= 1 && k == j - 1 {
                    g += ((j * (n - j + 1)) as f64).sqrt();
                }
                if j < n && k == j + 1 {
                    g += (((j + 1) * (n - j)) as f64).sqrt();
                }
                Complex64::new(0.0, phi * g)
            });
            for j in 0..=n {
                let s = FockVector::basis(n, &[j, n - j]).unwrap();
                let out = s.apply_two_mode(0, 1, mixer_matrix(phi)).unwrap();
                for k in 0..=n {
                    assert!((out.get(&[k, n - k]).unwrap() - u[(k, j)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn beamsplitter_is_unitary_and_conserves_photons() {
        // keep every sector below the cutoff so nothing is dropped
        let sq = squeezed_vacuum(0.6, 22).unwrap().value;
        let sq = FockVector::single_mode(24, sq.amps());
        let joint = sq.tensor(&FockVector::basis(24, &[2]).unwrap()).unwrap();
        let out = apply_beamsplitter(&joint, 0, 1, 0.7).unwrap();
        assert!((out.norm_sq() - joint.norm_sq()).abs() < 1e-12);
        // total photon number distribution preserved sector by sector
        let sector = |s: &FockVector| {
            let mut w = vec![0.0; 49];
            for (i, a) in s.amps().iter().enumerate() {
                let o = s.occupation(i);
                w[o[0] + o[1]] += a.norm_sqr();
            }
            w
        };
        for (a, b) in sector(&joint).iter().zip(sector(&out)) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn invalid_modes() {
        let s = FockVector::vacuum(2, 2);
        assert!(matches!(apply_beamsplitter(&s, 0, 2, 0.5), Err(Error::ModeIndex { .. })));
        assert!(matches!(apply_beamsplitter(&s, 1, 1, 0.5), Err(Error::Contract(_))));
        assert!(apply_beamsplitter(&s, 0, 1, 1.5).is_err());
    }

    #[test]
    fn projection_examples() {
        let (_, p) = FockVector::vacuum(1, 3).project(0, 0).unwrap();
        assert_eq!(p, 1.0);

        let t = 0.4;
        let s = apply_beamsplitter(&FockVector::basis(2, &[1, 0]).unwrap(), 0, 1, t).unwrap();
        let (rest, p) = s.project(1, 0).unwrap();
        assert_relative_eq!(p, t, epsilon = 1e-15);
        assert_eq!(rest.modes(), 1);
        assert_relative_eq!(rest.amps()[1].re, t.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn projection_keeps_remaining_mode_order() {
        let s = FockVector::basis(2, &[1, 2, 0]).unwrap();
        let (rest, p) = s.project(1, 2).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(rest.get(&[1, 0]).unwrap(), c(1.0));
    }

    #[test]
    fn catalysis_oracle_limits() {
        let o = oracle_catalyzed_state(0.0, 0.6, 2, 10).unwrap().value;
        assert_relative_eq!(o.amps()[0].re, 0.6, epsilon = 1e-14);
        assert!(o.amps().iter().skip(1).all(|a| a.norm() < 1e-15));

        let o = oracle_catalyzed_state(0.7, 1.0, 3, 30).unwrap().value;
        let sq = squeezed_vacuum(0.7, 30).unwrap().value;
        for (a, b) in o.amps().iter().zip(sq.amps()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn qfi_examples() {
        let vac = FockVector::vacuum(2, 3);
        assert_eq!(oracle_qfi_matrix(&vac, &[0, 1]).unwrap(), DMatrix::zeros(2, 2));

        let sq = squeezed_vacuum(0.3, 12).unwrap().value.normalized().unwrap();
        let prod = sq.tensor(&sq).unwrap();
        let f = oracle_qfi_matrix(&prod, &[0, 1]).unwrap();
        assert!(f[(0, 1)].abs() < 1e-13);
        assert_relative_eq!(f[(0, 0)], f[(1, 1)], max_relative = 1e-12);

        let half = FockVector::basis(2, &[1]).unwrap().scale(c(0.5));
        assert!(matches!(oracle_qfi_matrix(&half, &[0]), Err(Error::Contract(_))));
    }

    #[test]
    fn tensor_and_index_round_trip() {
        let a = FockVector::basis(3, &[1, 2]).unwrap();
        let b = FockVector::basis(3, &[3]).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.get(&[1, 2, 3]).unwrap(), c(1.0));
        for i in [0, 17, 40, 63] {
            assert_eq!(ab.index_of(&ab.occupation(i)).unwrap(), i);
        }
    }
}
