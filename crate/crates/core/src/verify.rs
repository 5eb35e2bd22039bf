//! Agreement checks between the closed-form pipeline and the brute-force
//! Fock-space oracle.

use std::fmt;

use crate::catalysis::catalyze;
use crate::circuit::{cascade_generate, fidelity};
use crate::error::{Error, Result};
use crate::fock::{oracle_catalyzed_state, oracle_qfi_matrix};
use crate::probe::{build_state_vector, normalization_sum, Parity, Probe, ProbeSpec, DEFAULT_AMPLITUDE_BUDGET};
use crate::qcrb::{qcrb_lossless, qcrb_lossless_probe, qcrb_lossy};

pub const GRID_R: [f64; 6] = [0.1, 0.3, 0.5, 0.8, 1.0, 1.5];
pub const GRID_T: [f64; 4] = [0.7, 0.8, 0.9, 1.0];
pub const GRID_N: [usize; 4] = [0, 1, 2, 3];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Largest deviation seen (or `1 − fidelity`).
    pub worst: f64,
    pub tolerance: f64,
    pub points: usize,
    /// Where the worst deviation occurred.
    pub at: String,
}

impl Check {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            worst: 0.0,
            tolerance,
            points: 0,
            at: String::new(),
        }
    }

    fn record(&mut self, deviation: f64, at: impl FnOnce() -> String) {
        self.points += 1;
        // NaN must fail the check
        if deviation.is_nan() || deviation > self.worst {
            self.worst = if deviation.is_nan() { f64::INFINITY } else { deviation };
            self.at = at();
        }
    }

    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: worst {:.2e} (tol {:.0e}) over {} points",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.points
        )?;
        if !self.at.is_empty() {
            write!(f, " at {}", self.at)?;
        }
        Ok(())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Catalyzed amplitudes, `𝕹`, `⟨N̂⟩′`, `⟨N̂²⟩′` against the literal
/// beam-splitter-and-projection construction.
///
/// Amplitude deviations are relative to the largest amplitude; the oracle
/// cutoff covers every level the closed form keeps.
pub fn catalysis_vs_oracle(rs: &[f64], ts: &[f64], ns: &[usize]) -> Result<Check> {
    let mut check = Check::new("catalysis vs Fock oracle", 1e-8);
    for &r in rs {
        for &t in ts {
            for &n in ns {
                let state = catalyze(r, t, n)?;
                let cutoff = (2 * state.l_max()).max(n);
                let oracle = oracle_catalyzed_state(r, t, n, cutoff)?.value;
                let amps = oracle.amps();
                let scale = state.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
                let mut amp_err = 0.0_f64;
                for (k, a) in amps.iter().enumerate() {
                    let expected = if k % 2 == 0 { state.coeffs[k / 2] } else { 0.0 };
                    amp_err = amp_err.max((a - expected).norm() / scale);
                }
                let weights = amps.iter().enumerate().map(|(k, a)| (k as f64, a.norm_sqr()));
                let (norm, mean, second) = weights.fold((0.0, 0.0, 0.0), |(s0, s1, s2), (k, w)| {
                    (s0 + w, s1 + k * w, s2 + k * k * w)
                });
                let worst = amp_err
                    .max(rel(norm, state.norm_sq))
                    .max(rel(mean, state.raw_mean()))
                    .max(rel(second, state.raw_second()));
                check.record(worst, || format!("r={r} T={t} n={n}"));
            }
        }
    }
    Ok(check)
}

/// `T = 1` reductions: raw moments of the squeezed vacuum and the
/// uncatalyzed normalization `(d+1)(1 + d sech r)`.
pub fn unit_transmission_identities(rs: &[f64], ds: &[usize]) -> Result<Check> {
    let mut check = Check::new("T=1 identities", 1e-12);
    for &r in rs {
        let sh2 = r.sinh().powi(2);
        let ch2 = r.cosh().powi(2);
        for n in 0..4 {
            let s = catalyze(r, 1.0, n)?;
            check.record(rel(s.raw_mean(), sh2), || format!("mean r={r} n={n}"));
            check.record(rel(s.raw_second(), sh2 * sh2 + 2.0 * sh2 * ch2), || {
                format!("second r={r} n={n}")
            });
        }
        for &d in ds {
            let s = normalization_sum(&ProbeSpec::new(r, 1.0, 0, d, Parity::Symmetric)?)?;
            let expected = (d + 1) as f64 * (1.0 + d as f64 / r.cosh());
            let dev = rel(s.coefficients, expected).max(rel(s.series, expected));
            check.record(dev, || format!("S r={r} d={d}"));
        }
    }
    Ok(check)
}

/// Both routes of the normalization sum.
pub fn normalization_routes(rs: &[f64], ts: &[f64], ns: &[usize], d: usize) -> Result<Check> {
    let mut check = Check::new("normalization sum routes", 1e-8);
    for &r in rs {
        for &t in ts {
            for &n in ns {
                for parity in [Parity::Symmetric, Parity::Antisymmetric] {
                    let s = normalization_sum(&ProbeSpec::new(r, t, n, d, parity)?)?;
                    check.record(s.rel_diff(), || format!("r={r} T={t} n={n} {parity}"));
                }
            }
        }
    }
    Ok(check)
}

/// Structured `Tr F⁻¹` against the explicitly inverted oracle QFI matrix of
/// the explicit probe state at `cutoff` photons per mode.
pub fn qcrb_vs_oracle(max_d: usize, cutoff: usize) -> Result<Check> {
    let mut check = Check::new("QCRB pipeline vs explicit QFI inverse", 1e-8);
    for d in 1..=max_d {
        for &r in &[0.3, 0.5, 0.8] {
            for &t in &[0.7, 0.9, 1.0] {
                for n in 0..3 {
                    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
                        let probe = Probe::new(ProbeSpec::new(r, t, n, d, parity)?)?.truncated(cutoff);
                        let structured = qcrb_lossless_probe(&probe)?.trace_inv;
                        let psi = probe.state_vector(cutoff, DEFAULT_AMPLITUDE_BUDGET)?;
                        let modes: Vec<usize> = (1..=d).collect();
                        let f = oracle_qfi_matrix(&psi, &modes)?;
                        let inv = f.try_inverse().ok_or(Error::Singular {
                            f_d: f64::NAN,
                            f_o: f64::NAN,
                            d,
                        })?;
                        check.record(rel(structured, inv.trace()), || {
                            format!("d={d} r={r} T={t} n={n} {parity}")
                        });
                    }
                }
            }
        }
    }
    Ok(check)
}

/// `η = 1` reproduces the lossless bound.
pub fn unit_efficiency_limit(specs: &[ProbeSpec]) -> Result<Check> {
    let mut check = Check::new("eta=1 equals lossless", 1e-10);
    for spec in specs {
        let a = qcrb_lossless(spec)?.trace_inv;
        let b = qcrb_lossy(spec, 1.0)?.trace_inv;
        check.record(rel(a, b), || format!("{spec:?}"));
    }
    Ok(check)
}

/// Largest relative increase of the lossy bound along increasing `η`
/// (0 when non-increasing everywhere).
pub fn loss_monotonicity(specs: &[ProbeSpec], etas: &[f64]) -> Result<Check> {
    let mut check = Check::new("lossy bound non-increasing in eta", 1e-12);
    for spec in specs {
        let mut prev: Option<f64> = None;
        for &eta in etas {
            let q = qcrb_lossy(spec, eta)?.trace_inv;
            let rise = prev.map_or(0.0, |p| ((q - p) / p).max(0.0));
            check.record(rise, || format!("r={} T={} n={} eta={eta}", spec.r, spec.t, spec.n));
            prev = Some(q);
        }
    }
    Ok(check)
}

/// `1 − F` between the cascade output and the analytic probe.
pub fn circuit_fidelity(ds: &[usize], ns: &[usize], cutoff: usize) -> Result<Check> {
    let mut check = Check::new("cascade fidelity", 1e-8);
    for &d in ds {
        for &n in ns {
            for parity in [Parity::Symmetric, Parity::Antisymmetric] {
                let spec = ProbeSpec::new(0.5, 0.9, n, d, parity)?;
                let out = cascade_generate(&spec, cutoff)?;
                let f = fidelity(&out.state, &build_state_vector(&spec, cutoff)?)?;
                check.record(1.0 - f, || format!("d={d} n={n} {parity}"));
            }
        }
    }
    Ok(check)
}

pub fn loss_specs() -> Result<Vec<ProbeSpec>> {
    Ok(vec![
        ProbeSpec::new(0.5, 0.9, 1, 5, Parity::Symmetric)?,
        ProbeSpec::new(1.0, 0.7, 2, 3, Parity::Symmetric)?,
        ProbeSpec::new(0.8, 0.9, 3, 5, Parity::Antisymmetric)?,
    ])
}

pub fn eta_grid() -> Vec<f64> {
    (1..=10).map(|i| 0.1 * i as f64).collect()
}

/// Every check at its standard settings.
pub fn run_all() -> Result<Vec<Check>> {
    let specs = loss_specs()?;
    Ok(vec![
        catalysis_vs_oracle(&GRID_R, &GRID_T, &GRID_N)?,
        unit_transmission_identities(&GRID_R, &[1, 2, 5])?,
        normalization_routes(&GRID_R, &GRID_T, &GRID_N, 5)?,
        qcrb_vs_oracle(3, 8)?,
        unit_efficiency_limit(&specs)?,
        loss_monotonicity(&specs, &eta_grid())?,
        circuit_fidelity(&[1, 2], &[1, 2], 8)?,
    ])
}
