//! Single-mode n-photon catalysis of a squeezed vacuum.
//!
//! The catalyzed state keeps only even Fock levels. Its amplitudes `d_l` on
//! `|2l⟩` are left unnormalized: they carry the heralding amplitude, so
//! `Σ d_l²` is the success probability of the catalysis.

use crate::error::{check_domain, Result};
use crate::series::{build_kernel, factorial, BivariateSeries};

/// Relative weight of the last retained level below which the adaptive
/// expansion stops.
pub const TAIL_TOLERANCE: f64 = 1e-14;

/// Hard cap on the adaptive expansion.
pub const MAX_LEVELS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    /// Relative weight `d_lmax² / Σ d_l²` (or `1 − norm²` for Fock vectors).
    pub leakage: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalyzedState {
    pub r: f64,
    pub t: f64,
    pub n: usize,
    /// Amplitudes on `|2l⟩`, `l = 0..=l_max`.
    pub coeffs: Vec<f64>,
    pub norm_sq: f64,
    pub truncation: Option<TruncationWarning>,
}

fn check_inputs(r: f64, t: f64) -> Result<()> {
    check_domain("r", r, r >= 0.0, "r >= 0")?;
    check_domain("T", t, t > 0.0 && t <= 1.0, "0 < T <= 1")
}

/// Generator of the `d_l` sequence.
///
/// `d_l = T^{n/2} · s_l · Σ_j C(2l,j) C(n,j) (−c)^j` with `c = (1−T)/T` and
/// `s_l = (−T tanh r / 2)^l √(2l)!/l! / √cosh r`. The sum is the `τⁿ`
/// coefficient of `[(1 − τ/T)/(1 − τ)]^{2l} / (1 − τ)`, which is
/// `(√T − τ/√T)^{2l} (1−τ)^{−(2l+1)}` with `T^l` moved into `s_l`.
struct LevelIter {
    t: f64,
    n: usize,
    prefactor: f64,
    ratio: f64,
    scale: f64,
    l: usize,
}

impl LevelIter {
    fn new(r: f64, t: f64, n: usize) -> Self {
        Self {
            t,
            n,
            prefactor: 1.0 / r.cosh().sqrt(),
            ratio: -0.5 * t * r.tanh(),
            scale: t.powf(n as f64 / 2.0),
            l: 0,
        }
    }
}

impl Iterator for LevelIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let l = self.l;
        if l > 0 {
            let two_l = 2.0 * l as f64;
            self.prefactor *= self.ratio * (two_l * (two_l - 1.0)).sqrt() / l as f64;
        }
        let c = (1.0 - self.t) / self.t;
        let mut sum = 0.0;
        let mut term = 1.0; // C(2l,j) C(n,j) (−c)^j
        for j in 0..=self.n.min(2 * l) {
            if j > 0 {
                term *= -c * ((2 * l - j + 1) * (self.n - j + 1)) as f64 / (j * j) as f64;
            }
            sum += term;
        }
        self.l += 1;
        Some(self.scale * self.prefactor * sum)
    }
}

/// Catalyzed amplitudes for `l = 0..=l_max`.
pub fn catalyzed_coeffs(r: f64, t: f64, n: usize, l_max: usize) -> Result<CatalyzedState> {
    check_inputs(r, t)?;
    let coeffs: Vec<f64> = LevelIter::new(r, t, n).take(l_max + 1).collect();
    Ok(finish(r, t, n, coeffs, true))
}

/// Catalyzed amplitudes with `l_max` grown until the last retained level
/// carries less than [`TAIL_TOLERANCE`] of the norm, weighted by `(2l+1)⁴` so
/// that the second moment has converged too.
pub fn catalyze(r: f64, t: f64, n: usize) -> Result<CatalyzedState> {
    check_inputs(r, t)?;
    let mut coeffs = Vec::new();
    let mut norm = 0.0;
    let mut quiet = 0;
    for (l, d) in LevelIter::new(r, t, n).take(MAX_LEVELS).enumerate() {
        norm += d * d;
        coeffs.push(d);
        let weight = ((2 * l + 1) as f64).powi(4);
        // Several consecutive small levels: isolated zeros of the
        // catalysis polynomial must not end the expansion early.
        if d * d * weight <= TAIL_TOLERANCE * norm {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 4 && coeffs.len() > n + 4 {
            break;
        }
    }
    Ok(finish(r, t, n, coeffs, true))
}

fn finish(r: f64, t: f64, n: usize, coeffs: Vec<f64>, warn: bool) -> CatalyzedState {
    let norm_sq: f64 = coeffs.iter().map(|d| d * d).sum();
    let last = coeffs.last().copied().unwrap_or(0.0);
    let leakage = if norm_sq > 0.0 { last * last / norm_sq } else { 0.0 };
    let truncation = (warn && leakage >= TAIL_TOLERANCE).then_some(TruncationWarning {
        leakage,
        tolerance: TAIL_TOLERANCE,
    });
    CatalyzedState {
        r,
        t,
        n,
        coeffs,
        norm_sq,
        truncation,
    }
}

impl CatalyzedState {
    pub fn l_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Keep levels `|2l⟩` with `2l <= cutoff`.
    pub fn truncated_to_photons(&self, cutoff: usize) -> CatalyzedState {
        let keep = (cutoff / 2 + 1).min(self.coeffs.len());
        finish(self.r, self.t, self.n, self.coeffs[..keep].to_vec(), false)
    }

    /// `(level, weight)` pairs: photon number `2l` and `d_l²`.
    fn weights(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(l, d)| (2.0 * l as f64, d * d))
    }

    /// `d_0` and `d_0²`.
    pub fn vacuum_overlap(&self) -> (f64, f64) {
        let d0 = self.coeffs[0];
        (d0, d0 * d0)
    }

    pub fn raw_mean(&self) -> f64 {
        self.weights().map(|(k, w)| k * w).sum()
    }

    pub fn raw_second(&self) -> f64 {
        self.weights().map(|(k, w)| k * k * w).sum()
    }
}

/// Both evaluation routes of one quantity and their disagreement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRoutes {
    pub coefficients: f64,
    pub series: f64,
}

impl TwoRoutes {
    pub fn abs_diff(&self) -> f64 {
        (self.coefficients - self.series).abs()
    }

    pub fn rel_diff(&self) -> f64 {
        let scale = self.coefficients.abs().max(self.series.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.abs_diff() / scale
        }
    }
}

/// Series-side evaluator: `Tⁿ/(n!)² · ∂ⁿ_τ∂ⁿ_τ*[ℵ · f(ℑ)]|₀` for several `f`.
pub struct SeriesMoments {
    n: usize,
    prefactor: f64,
    aleph: BivariateSeries,
    im: BivariateSeries,
    one_minus_im: BivariateSeries,
}

impl SeriesMoments {
    pub fn new(r: f64, t: f64, n: usize) -> Result<Self> {
        let kernel = build_kernel(r, t, n)?;
        let nf = factorial(n);
        Ok(Self {
            n,
            prefactor: t.powi(n as i32) / (nf * nf),
            one_minus_im: kernel.one_minus_im(),
            aleph: kernel.aleph,
            im: kernel.im,
        })
    }

    fn eval(&self, body: &BivariateSeries) -> Result<f64> {
        Ok(self.prefactor * self.aleph.mul(body)?.mixed_partial_at_zero(self.n)?)
    }

    /// `𝕹`, from `ℵ [1 − ℑ]^{−1/2}`.
    pub fn norm(&self) -> Result<f64> {
        self.eval(&self.one_minus_im.pow(-0.5)?)
    }

    /// `|⟨0|ξ′⟩|²`, from `ℵ` alone.
    pub fn vacuum_weight(&self) -> Result<f64> {
        self.eval(&BivariateSeries::constant(self.n, 1.0))
    }

    /// `⟨ξ′|N̂|ξ′⟩`, from `ℵ ℑ [1 − ℑ]^{−3/2}`.
    pub fn mean(&self) -> Result<f64> {
        self.eval(&self.im.mul(&self.one_minus_im.pow(-1.5)?)?)
    }

    /// `⟨ξ′|N̂²|ξ′⟩`, from `ℵ ℑ(ℑ + 2) [1 − ℑ]^{−5/2}`.
    pub fn second(&self) -> Result<f64> {
        let body = self
            .im
            .mul(&self.im.add_constant(2.0))?
            .mul(&self.one_minus_im.pow(-2.5)?)?;
        self.eval(&body)
    }
}

/// Heralding probability `𝕹` by both routes.
pub fn heralding_probability(state: &CatalyzedState) -> Result<TwoRoutes> {
    let series = SeriesMoments::new(state.r, state.t, state.n)?;
    Ok(TwoRoutes {
        coefficients: state.norm_sq,
        series: series.norm()?,
    })
}

/// `d_0` and `d_0²`.
pub fn vacuum_overlap(state: &CatalyzedState) -> (f64, f64) {
    state.vacuum_overlap()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawMoments {
    pub mean: TwoRoutes,
    pub second: TwoRoutes,
}

/// Unnormalized `⟨ξ′|N̂|ξ′⟩` and `⟨ξ′|N̂²|ξ′⟩` by both routes.
pub fn raw_moments(state: &CatalyzedState) -> Result<RawMoments> {
    let series = SeriesMoments::new(state.r, state.t, state.n)?;
    Ok(RawMoments {
        mean: TwoRoutes {
            coefficients: state.raw_mean(),
            series: series.mean()?,
        },
        second: TwoRoutes {
            coefficients: state.raw_second(),
            series: series.second()?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ssvs(r: f64, l: usize) -> f64 {
        let mut a = 1.0 / r.cosh().sqrt();
        for k in 1..=l {
            let two_k = 2.0 * k as f64;
            a *= -0.5 * r.tanh() * (two_k * (two_k - 1.0)).sqrt() / k as f64;
        }
        a
    }

    #[test]
    fn vacuum_input_transmits_catalysis_amplitude() {
        let s = catalyzed_coeffs(0.0, 0.5, 2, 4).unwrap();
        assert_relative_eq!(s.coeffs[0], 0.5, epsilon = 1e-15);
        assert!(s.coeffs[1..].iter().all(|d| *d == 0.0));
        assert_relative_eq!(s.norm_sq, 0.25, epsilon = 1e-15);
        assert_relative_eq!(heralding_probability(&s).unwrap().series, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn unit_transmissivity_is_identity() {
        for n in 0..4 {
            let s = catalyze(0.8, 1.0, n).unwrap();
            for (l, d) in s.coeffs.iter().enumerate().take(60) {
                assert_relative_eq!(*d, ssvs(0.8, l), max_relative = 1e-12, epsilon = 1e-300);
            }
            assert_relative_eq!(s.norm_sq, 1.0, epsilon = 1e-12);
            assert_relative_eq!(s.vacuum_overlap().0, (1.0 / 0.8f64.cosh()).sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn r_zero_probabilities() {
        for (t, n) in [(0.7, 1), (0.9, 3), (0.5, 2)] {
            let s = catalyze(0.0, t, n).unwrap();
            assert_relative_eq!(s.norm_sq, t.powi(n as i32), epsilon = 1e-15);
            assert_relative_eq!(s.vacuum_overlap().0, t.powf(n as f64 / 2.0), epsilon = 1e-15);
            let m = raw_moments(&s).unwrap();
            assert_eq!(m.mean.coefficients, 0.0);
            assert_eq!(m.second.coefficients, 0.0);
            assert!(m.mean.series.abs() < 1e-15);
        }
    }

    #[test]
    fn unit_transmissivity_moments() {
        let s = catalyze(1.0, 1.0, 2).unwrap();
        let m = raw_moments(&s).unwrap();
        let sh2 = 1.0f64.sinh().powi(2);
        let ch2 = 1.0f64.cosh().powi(2);
        assert_relative_eq!(m.mean.coefficients, sh2, max_relative = 1e-12);
        assert_relative_eq!(m.mean.series, sh2, max_relative = 1e-12);
        assert_relative_eq!(m.second.series, sh2 * sh2 + 2.0 * sh2 * ch2, max_relative = 1e-12);
        assert_relative_eq!(sh2, 1.381_097_845_541_816_7, epsilon = 1e-12);
        assert_relative_eq!(sh2 * sh2 + 2.0 * sh2 * ch2, 8.484_489_467_964_366, max_relative = 1e-12);
    }

    #[test]
    fn routes_agree_on_grid() {
        for &r in &[0.1, 0.5, 1.0, 1.5] {
            for &t in &[0.7, 0.8, 0.9, 1.0] {
                for n in 0..4 {
                    let s = catalyze(r, t, n).unwrap();
                    assert!(s.truncation.is_none());
                    let h = heralding_probability(&s).unwrap();
                    let m = raw_moments(&s).unwrap();
                    assert!(h.rel_diff() < 1e-10, "norm {r} {t} {n}: {h:?}");
                    assert!(m.mean.rel_diff() < 1e-10, "mean {r} {t} {n}: {m:?}");
                    assert!(m.second.rel_diff() < 1e-10, "second {r} {t} {n}: {m:?}");
                    let vac = SeriesMoments::new(r, t, n).unwrap().vacuum_weight().unwrap();
                    assert_relative_eq!(vac, s.vacuum_overlap().1, max_relative = 1e-12);
                    // Cauchy–Schwarz on the normalized state
                    let (mean, second) = (m.mean.coefficients / s.norm_sq, m.second.coefficients / s.norm_sq);
                    assert!(second >= mean * mean);
                }
            }
        }
    }

    #[test]
    fn norm_is_a_probability() {
        for &t in &[0.3, 0.7, 0.95] {
            for n in 0..4 {
                let s = catalyze(1.2, t, n).unwrap();
                assert!(s.norm_sq > 0.0 && s.norm_sq <= 1.0);
            }
        }
    }

    #[test]
    fn tail_is_eventually_monotone() {
        let s = catalyze(1.0, 0.7, 3).unwrap();
        let tail = &s.coeffs[20..];
        assert!(tail.windows(2).all(|w| w[1].abs() < w[0].abs()));
    }

    #[test]
    fn short_expansion_is_flagged() {
        let s = catalyzed_coeffs(1.0, 0.9, 1, 3).unwrap();
        assert!(s.truncation.is_some());
        assert_eq!(s.l_max(), 3);
    }

    #[test]
    fn domain_errors() {
        assert!(catalyze(-1.0, 0.9, 1).is_err());
        assert!(catalyze(1.0, 0.0, 1).is_err());
        assert!(catalyzed_coeffs(1.0, 1.5, 1, 3).is_err());
    }
}
