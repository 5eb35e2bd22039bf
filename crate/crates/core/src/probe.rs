//! The (d+1)-mode entangled probe built from one catalyzed squeezed vacuum.
//!
//! The probe is `Σ_j s_j |0…ξ′_j…0⟩ / √S`: the catalyzed state `|ξ′⟩` sits in
//! exactly one mode of each branch, every other mode is vacuum. Because the
//! branches overlap only through their vacuum components, everything reduces
//! to single-mode quantities of `|ξ′⟩` plus the branch phases `s_j`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::catalysis::{catalyze, CatalyzedState, SeriesMoments, TwoRoutes};
use crate::error::{check_domain, Error, Result};
use crate::fock::FockVector;

/// Relative floor below which `S` is treated as zero.
pub const DEGENERATE_FLOOR: f64 = 1e-12;

/// Default cap on the number of amplitudes in an explicit state vector.
pub const DEFAULT_AMPLITUDE_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Symmetric => "sym",
            Parity::Antisymmetric => "antisym",
        })
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sym" | "symmetric" => Ok(Parity::Symmetric),
            "antisym" | "antisymmetric" => Ok(Parity::Antisymmetric),
            other => Err(Error::Config(format!("unknown parity `{other}` (sym | antisym)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    pub r: f64,
    pub t: f64,
    /// Catalysis photons.
    pub n: usize,
    /// Estimated phases; the probe has `d + 1` modes with mode 0 as reference.
    pub d: usize,
    pub parity: Parity,
}

impl ProbeSpec {
    pub fn new(r: f64, t: f64, n: usize, d: usize, parity: Parity) -> Result<Self> {
        let spec = Self { r, t, n, d, parity };
        spec.validate()?;
        Ok(spec)
    }

    /// The uncatalyzed entangled squeezed vacuum (`T = 1`, `n = 0`).
    pub fn esvs(r: f64, d: usize, parity: Parity) -> Result<Self> {
        Self::new(r, 1.0, 0, d, parity)
    }

    pub fn validate(&self) -> Result<()> {
        check_domain("r", self.r, self.r >= 0.0, "r >= 0")?;
        check_domain("T", self.t, self.t > 0.0 && self.t <= 1.0, "0 < T <= 1")?;
        if self.d == 0 {
            return Err(Error::Contract("d must be at least 1".into()));
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.d + 1
    }

    /// Phase `s_j` of the branch with `|ξ′⟩` in mode `j`.
    ///
    /// Antisymmetric probes use `(+,−,−,+,−,+)` for six modes and the
    /// `(d+1)`-th roots of unity otherwise; both sum to zero, which is all the
    /// moments depend on.
    pub fn branch_phases(&self) -> Vec<Complex64> {
        let m = self.modes();
        match self.parity {
            Parity::Symmetric => vec![Complex64::new(1.0, 0.0); m],
            Parity::Antisymmetric if m == 6 => [1.0, -1.0, -1.0, 1.0, -1.0, 1.0]
                .iter()
                .map(|&s| Complex64::new(s, 0.0))
                .collect(),
            Parity::Antisymmetric => (0..m)
                .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
                .collect(),
        }
    }
}

/// `|Σ_j s_j|²`, snapped to the exact value for the built-in patterns.
fn phase_sum_sq(spec: &ProbeSpec) -> f64 {
    match spec.parity {
        Parity::Symmetric => (spec.modes() * spec.modes()) as f64,
        Parity::Antisymmetric => 0.0,
    }
}

/// `S = (d+1)(𝕹 − d_0²) + |Σ s_j|² d_0²` for unit-modulus phases.
///
/// `𝕹 − d_0²` is summed directly over `l ≥ 1` so that antisymmetric probes
/// near `r = 0` do not cancel.
pub fn normalization_for_phases(state: &CatalyzedState, phases: &[Complex64]) -> f64 {
    let sum: Complex64 = phases.iter().sum();
    normalization_raw(state, phases.len(), sum.norm_sqr())
}

fn normalization_raw(state: &CatalyzedState, modes: usize, phase_sum_sq: f64) -> f64 {
    let excited: f64 = state.coeffs.iter().skip(1).map(|c| c * c).sum();
    let (_, d0_sq) = state.vacuum_overlap();
    modes as f64 * excited + phase_sum_sq * d0_sq
}

fn check_degenerate(s: f64, scale: f64) -> Result<()> {
    if s > DEGENERATE_FLOOR * scale {
        Ok(())
    } else {
        Err(Error::DegenerateProbe { sum: s })
    }
}

/// A probe together with the catalyzed state it is built from.
#[derive(Debug, Clone)]
pub struct Probe {
    pub spec: ProbeSpec,
    pub state: CatalyzedState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeMoments {
    /// Normalization sum `S`.
    pub s: f64,
    /// `⟨N̂_j⟩`, identical for every mode.
    pub mode_mean: f64,
    /// `⟨N̂_j²⟩`.
    pub mode_second: f64,
    /// `⟨N̂_j N̂_k⟩` for `j ≠ k`; no branch populates two modes.
    pub cross: f64,
    /// `Σ_j ⟨N̂_j⟩` over all `d + 1` modes.
    pub total_mean: f64,
}

impl ProbeMoments {
    pub fn variance(&self) -> f64 {
        self.mode_second - self.mode_mean * self.mode_mean
    }
}

impl Probe {
    pub fn new(spec: ProbeSpec) -> Result<Self> {
        spec.validate()?;
        let state = catalyze(spec.r, spec.t, spec.n)?;
        Ok(Self { spec, state })
    }

    /// Uses a caller-provided catalyzed state (e.g. a truncated one).
    pub fn with_state(spec: ProbeSpec, state: CatalyzedState) -> Result<Self> {
        spec.validate()?;
        if state.r != spec.r || state.t != spec.t || state.n != spec.n {
            return Err(Error::Contract(format!(
                "catalyzed state (r={}, T={}, n={}) does not match the probe spec",
                state.r, state.t, state.n
            )));
        }
        Ok(Self { spec, state })
    }

    /// The same probe restricted to at most `cutoff` photons per mode.
    pub fn truncated(&self, cutoff: usize) -> Self {
        Self {
            spec: self.spec,
            state: self.state.truncated_to_photons(cutoff),
        }
    }

    pub fn normalization(&self) -> Result<f64> {
        let s = normalization_raw(&self.state, self.spec.modes(), phase_sum_sq(&self.spec));
        check_degenerate(s, self.spec.modes() as f64 * self.state.norm_sq)?;
        Ok(s)
    }

    pub fn moments(&self) -> Result<ProbeMoments> {
        let s = self.normalization()?;
        let mode_mean = self.state.raw_mean() / s;
        Ok(ProbeMoments {
            s,
            mode_mean,
            mode_second: self.state.raw_second() / s,
            cross: 0.0,
            total_mean: self.spec.modes() as f64 * mode_mean,
        })
    }

    /// Explicit normalized amplitudes, keeping levels `|2l⟩` with
    /// `2l ≤ cutoff` and normalizing within that truncation.
    pub fn state_vector(&self, cutoff: usize, budget: usize) -> Result<FockVector> {
        let modes = self.spec.modes();
        let required = (cutoff + 1)
            .checked_pow(modes as u32)
            .unwrap_or(usize::MAX);
        if required > budget {
            return Err(Error::MemoryBudget { required, budget });
        }
        let truncated = self.truncated(cutoff);
        let scale = 1.0 / truncated.normalization()?.sqrt();
        let phases = self.spec.branch_phases();
        let mut psi = FockVector::zeros(modes, cutoff);
        let mut amps = psi.amps().to_vec();
        let mut occ = vec![0; modes];
        for (l, c) in truncated.state.coeffs.iter().enumerate() {
            for (j, s) in phases.iter().enumerate() {
                occ.fill(0);
                occ[j] = 2 * l;
                amps[psi.index_of(&occ)?] += s * (c * scale);
            }
        }
        psi = FockVector::from_amplitudes(modes, cutoff, amps)?;
        Ok(psi)
    }
}

/// `S` from the catalyzed amplitudes and from the bivariate-series
/// expression `Tⁿ/(n!)² ∂ⁿ∂ⁿ[ℵ((d+1)(1−ℑ)^{−1/2} + |Σs|² − (d+1))]|₀`.
pub fn normalization_sum(spec: &ProbeSpec) -> Result<TwoRoutes> {
    let probe = Probe::new(*spec)?;
    let coefficients = probe.normalization()?;
    let series = SeriesMoments::new(spec.r, spec.t, spec.n)?;
    let modes = spec.modes() as f64;
    let value = modes * series.norm()? + (phase_sum_sq(spec) - modes) * series.vacuum_weight()?;
    Ok(TwoRoutes {
        coefficients,
        series: value,
    })
}

pub fn probe_moments(spec: &ProbeSpec) -> Result<ProbeMoments> {
    Probe::new(*spec)?.moments()
}

pub fn build_state_vector(spec: &ProbeSpec, cutoff: usize) -> Result<FockVector> {
    Probe::new(*spec)?.state_vector(cutoff, DEFAULT_AMPLITUDE_BUDGET)
}
