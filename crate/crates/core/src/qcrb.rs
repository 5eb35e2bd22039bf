//! Quantum Cramér–Rao bounds for simultaneous estimation of `d` phases.
//!
//! For these probes the (bound on the) QFI matrix is always `f_d` on the
//! diagonal and `f_o` everywhere else, so its inverse trace has the closed
//! form `(d−1)/(f_d−f_o) + 1/(f_d+(d−1)f_o)` from the two distinct
//! eigenvalues.
//!
//! Photon loss is handled through the Kraus-representation bound: with
//! per-mode transmissivity `η` and variational parameter `ε`,
//! `μ = 1 − (1+ε)(1−η)`, `v = (1+ε)² η(1−η)` and the bound is the maximum of
//! the inverse trace over `ε`.

use crate::error::{check_domain, Error, Result};
use crate::optimize::{bisect, golden_max};
use crate::probe::{Probe, ProbeMoments, ProbeSpec};

/// Largest squeezing explored when mapping a mean photon number back to `r`.
pub const R_MAX: f64 = 4.0;

/// Smallest squeezing explored; antisymmetric probes degenerate at `r = 0`.
const R_MIN: f64 = 1e-4;

const EPS_GRID: usize = 64;
const EPS_WIDENINGS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    pub eta: f64,
    pub epsilon: f64,
}

impl LossModel {
    pub fn new(eta: f64, epsilon: f64) -> Result<Self> {
        check_domain("eta", eta, (0.0..=1.0).contains(&eta), "0 <= eta <= 1")?;
        check_domain("epsilon", epsilon, true, "finite")?;
        Ok(Self { eta, epsilon })
    }

    pub fn mu(&self) -> f64 {
        1.0 - (1.0 + self.epsilon) * (1.0 - self.eta)
    }

    pub fn v(&self) -> f64 {
        (1.0 + self.epsilon).powi(2) * self.eta * (1.0 - self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcrbResult {
    pub spec: ProbeSpec,
    /// `None` for the lossless bound.
    pub eta: Option<f64>,
    pub f_d: f64,
    pub f_o: f64,
    /// `Tr F⁻¹`, the bound on `|Δθ|²`.
    pub trace_inv: f64,
    pub eps_opt: Option<f64>,
    pub total_mean: f64,
    /// `d/(4⟨N̂²⟩′) · (S + 1/(k − d/S))` with `k = ⟨N̂²⟩′/⟨N̂⟩′²` on the
    /// unnormalized moments; lossless only.
    pub closed_form: Option<f64>,
    /// `|closed_form − trace_inv| / trace_inv`.
    pub route_deviation: Option<f64>,
}

/// `(f_d, f_o)` from normalized moments.
pub fn lossless_elements(m: &ProbeMoments) -> (f64, f64) {
    (4.0 * m.variance(), -4.0 * m.mode_mean * m.mode_mean)
}

pub fn qfi_elements_lossless(spec: &ProbeSpec) -> Result<(f64, f64)> {
    Ok(lossless_elements(&Probe::new(*spec)?.moments()?))
}

pub fn trace_inverse(f_d: f64, f_o: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Contract("d must be at least 1".into()));
    }
    let singular = || Error::Singular { f_d, f_o, d };
    let collective = f_d + (d - 1) as f64 * f_o;
    if !(collective > 0.0) {
        return Err(singular());
    }
    if d == 1 {
        return Ok(1.0 / collective);
    }
    let relative = f_d - f_o;
    if !(relative > 0.0) {
        return Err(singular());
    }
    Ok((d - 1) as f64 / relative + 1.0 / collective)
}

fn closed_form(probe: &Probe, m: &ProbeMoments) -> f64 {
    let d = probe.spec.d as f64;
    let raw1 = probe.state.raw_mean();
    let raw2 = probe.state.raw_second();
    let k = raw2 / (raw1 * raw1);
    d / (4.0 * raw2) * (m.s + 1.0 / (k - d / m.s))
}

pub fn qcrb_lossless_probe(probe: &Probe) -> Result<QcrbResult> {
    let m = probe.moments()?;
    let (f_d, f_o) = lossless_elements(&m);
    let trace_inv = trace_inverse(f_d, f_o, probe.spec.d)?;
    let closed = closed_form(probe, &m);
    Ok(QcrbResult {
        spec: probe.spec,
        eta: None,
        f_d,
        f_o,
        trace_inv,
        eps_opt: None,
        total_mean: m.total_mean,
        closed_form: Some(closed),
        route_deviation: Some((closed - trace_inv).abs() / trace_inv),
    })
}

pub fn qcrb_lossless(spec: &ProbeSpec) -> Result<QcrbResult> {
    qcrb_lossless_probe(&Probe::new(*spec)?)
}

pub fn lossy_elements(m: &ProbeMoments, loss: &LossModel) -> (f64, f64) {
    let mu2 = loss.mu().powi(2);
    (
        4.0 * (mu2 * m.variance() + loss.v() * m.mode_mean),
        -4.0 * mu2 * m.mode_mean * m.mode_mean,
    )
}

pub fn lossy_f_elements(spec: &ProbeSpec, loss: &LossModel) -> Result<(f64, f64)> {
    Ok(lossy_elements(&Probe::new(*spec)?.moments()?, loss))
}

/// `Tr F⁻¹` as a function of `ε`; singular points count as `+∞`.
fn lossy_objective(m: &ProbeMoments, eta: f64, d: usize) -> impl Fn(f64) -> f64 + '_ {
    move |epsilon| {
        let (f_d, f_o) = lossy_elements(m, &LossModel { eta, epsilon });
        trace_inverse(f_d, f_o, d).unwrap_or(f64::INFINITY)
    }
}

/// Coarse grid, widened while the best point sits on an edge, then
/// golden-section refinement inside the neighbouring grid cells.
fn maximize_over_epsilon(objective: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (-2.0_f64, 2.0_f64);
    for _ in 0..=EPS_WIDENINGS {
        let step = (hi - lo) / (EPS_GRID - 1) as f64;
        let values: Vec<f64> = (0..EPS_GRID).map(|i| objective(lo + step * i as f64)).collect();
        let (best, &fbest) = values
            .iter()
            .enumerate()
            .fold((0, &values[0]), |acc, p| if p.1 > acc.1 { p } else { acc });
        let fmin = values.iter().copied().fold(f64::INFINITY, f64::min);
        if fbest - fmin <= 1e-15 * fbest.abs() {
            return Ok((lo + step * best as f64, fbest));
        }
        if best == 0 {
            lo -= hi - lo;
            continue;
        }
        if best == EPS_GRID - 1 {
            hi += hi - lo;
            continue;
        }
        let x = lo + step * best as f64;
        let (eps, value) = golden_max(&objective, x - step, x + step, 1e-12, 500)?;
        return Ok(if value >= fbest { (eps, value) } else { (x, fbest) });
    }
    Err(Error::NonConvergence {
        iterations: EPS_WIDENINGS,
        lo,
        hi,
    })
}

pub fn qcrb_lossy_probe(probe: &Probe, eta: f64) -> Result<QcrbResult> {
    check_domain("eta", eta, (0.0..=1.0).contains(&eta), "0 <= eta <= 1")?;
    let d = probe.spec.d;
    if eta == 0.0 {
        return Err(Error::Singular { f_d: 0.0, f_o: 0.0, d });
    }
    let m = probe.moments()?;
    let (epsilon, _) = maximize_over_epsilon(lossy_objective(&m, eta, d))?;
    let (f_d, f_o) = lossy_elements(&m, &LossModel { eta, epsilon });
    let trace_inv = trace_inverse(f_d, f_o, d)?;
    Ok(QcrbResult {
        spec: probe.spec,
        eta: Some(eta),
        f_d,
        f_o,
        trace_inv,
        eps_opt: Some(epsilon),
        total_mean: m.total_mean,
        closed_form: None,
        route_deviation: None,
    })
}

pub fn qcrb_lossy(spec: &ProbeSpec, eta: f64) -> Result<QcrbResult> {
    qcrb_lossy_probe(&Probe::new(*spec)?, eta)
}

/// A family of bounds parameterized by squeezing; `spec.r` is ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curve {
    pub spec: ProbeSpec,
    pub eta: Option<f64>,
}

impl Curve {
    pub fn lossless(spec: ProbeSpec) -> Self {
        Self { spec, eta: None }
    }

    pub fn lossy(spec: ProbeSpec, eta: f64) -> Self {
        Self { spec, eta: Some(eta) }
    }

    fn probe(&self, r: f64) -> Result<Probe> {
        Probe::new(ProbeSpec { r, ..self.spec })
    }

    pub fn at_r(&self, r: f64) -> Result<QcrbResult> {
        let probe = self.probe(r)?;
        match self.eta {
            None => qcrb_lossless_probe(&probe),
            Some(eta) => qcrb_lossy_probe(&probe, eta),
        }
    }

    pub fn total_mean_at(&self, r: f64) -> Result<f64> {
        Ok(self.probe(r)?.moments()?.total_mean)
    }

    /// Range of total mean photon numbers reachable for `r ∈ [R_MIN, R_MAX]`.
    pub fn mean_range(&self) -> Result<(f64, f64)> {
        Ok((self.total_mean_at(R_MIN)?, self.total_mean_at(R_MAX)?))
    }

    /// Inverts the (increasing) map `r ↦ total_mean`.
    pub fn r_for_mean(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.mean_range()?;
        check_domain("total_mean", x, x >= lo && x <= hi, "reachable for 1e-4 <= r <= 4")?;
        bisect(|r| Ok(self.total_mean_at(r)? - x), R_MIN, R_MAX, 1e-13, 200)
    }

    pub fn at_mean(&self, x: f64) -> Result<QcrbResult> {
        self.at_r(self.r_for_mean(x)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    pub total_mean: f64,
    pub a: QcrbResult,
    pub b: QcrbResult,
    /// The requested window exceeded what one of the curves can reach.
    pub clipped: bool,
}

const CROSSOVER_SCAN: usize = 48;

/// First total mean photon number in `[lo, hi]` where the two bounds cross.
pub fn crossover_mean_photon(a: &Curve, b: &Curve, lo: f64, hi: f64) -> Result<Crossover> {
    let (a_lo, a_hi) = a.mean_range()?;
    let (b_lo, b_hi) = b.mean_range()?;
    let start = lo.max(a_lo).max(b_lo);
    let stop = hi.min(a_hi).min(b_hi);
    if !(start < stop) {
        return Err(Error::NoCrossover { lo, hi });
    }
    let clipped = start > lo || stop < hi;
    let diff = |x: f64| -> Result<f64> {
        Ok(a.at_mean(x)?.trace_inv.ln() - b.at_mean(x)?.trace_inv.ln())
    };
    let step = (stop - start) / CROSSOVER_SCAN as f64;
    let mut prev = (start, diff(start)?);
    for i in 1..=CROSSOVER_SCAN {
        let x = start + step * i as f64;
        let cur = (x, diff(x)?);
        if prev.1 * cur.1 < 0.0 {
            let root = bisect(diff, prev.0, cur.0, 1e-7, 200)?;
            return Ok(Crossover {
                total_mean: root,
                a: a.at_mean(root)?,
                b: b.at_mean(root)?,
                clipped,
            });
        }
        prev = cur;
    }
    Err(Error::NoCrossover { lo: start, hi: stop })
}
