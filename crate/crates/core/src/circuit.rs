//! Heralded generation of the entangled probe.
//!
//! One stage entangles a mode `a` carrying `|ξ′⟩` with a fresh vacuum mode
//! `b`: a Mach–Zehnder pair with a cross-Kerr coupling acts as a Fredkin gate
//! controlled by an ancilla photon in `u`, the ancilla interferometer closes
//! on detectors `(u, v)`, and a quarter-wave plate on `b` removes the
//! `(−1)^l` picked up by `|2l⟩` on the swapped branch.
//!
//! With 50:50 ancilla splitters the two single-photon patterns herald the
//! symmetric and antisymmetric two-mode states. A chain of identical 50:50
//! stages cannot produce equal weights on more than two modes (a branch that
//! stayed behind sees later stages only through their vacuum response), so
//! longer cascades retune each stage's ancilla splitting `α` and ancilla
//! phase `φ`. The settings are solved backwards from the target branch
//! phases; two-mode probes use the plain 50:50 hardware.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::catalysis::TruncationWarning;
use crate::error::{Error, Result};
use crate::fock::{apply_phase, mixer_matrix, FockVector, NORMALIZATION_TOLERANCE};
use crate::probe::{Parity, Probe, ProbeSpec, DEFAULT_AMPLITUDE_BUDGET};

/// Herald probabilities at or below this are rounding residue.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-20;

/// `e^{i χt n_a n_u}`.
pub fn apply_cross_kerr(state: &FockVector, mode_a: usize, mode_u: usize, chi_t: f64) -> Result<FockVector> {
    check_modes(state, &[mode_a, mode_u])?;
    Ok(state.apply_diagonal(|occ| Complex64::from_polar(1.0, chi_t * (occ[mode_a] * occ[mode_u]) as f64)))
}

fn check_modes(state: &FockVector, modes: &[usize]) -> Result<()> {
    for (i, &m) in modes.iter().enumerate() {
        if m >= state.modes() {
            return Err(Error::ModeIndex {
                index: m,
                modes: state.modes(),
            });
        }
        if modes[..i].contains(&m) {
            return Err(Error::Contract(format!("modes must be distinct, got {m} twice")));
        }
    }
    Ok(())
}

/// Mode map of `e^{θ(b†a − a†b)}`.
fn rotation_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// `e^{iπ/2 n_u(n_a+n_b)} e^{π/2 n_u(a b† − a† b)}`, applied slice by slice
/// in the photon number of `u`.
pub fn apply_fredkin(state: &FockVector, mode_u: usize, mode_a: usize, mode_b: usize) -> Result<FockVector> {
    check_modes(state, &[mode_u, mode_a, mode_b])?;
    let shift = |m: usize| if m > mode_u { m - 1 } else { m };
    let mut amps = vec![Complex64::new(0.0, 0.0); state.len()];
    for k in 0..=state.cutoff() {
        let (slice, weight) = state.project(mode_u, k)?;
        if weight == 0.0 {
            continue;
        }
        let mut m = rotation_matrix(FRAC_PI_2 * k as f64);
        let phase = Complex64::from_polar(1.0, FRAC_PI_2 * k as f64);
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x *= phase;
            }
        }
        let out = slice.apply_two_mode(shift(mode_a), shift(mode_b), m)?;
        for (i, amp) in out.amps().iter().enumerate() {
            let mut occ = out.occupation(i);
            occ.insert(mode_u, k);
            amps[state.index_of(&occ)?] = *amp;
        }
    }
    FockVector::from_amplitudes(state.modes(), state.cutoff(), amps)
}

/// The same gate as [`apply_fredkin`], built from its optical parts:
/// 50:50 mixer, cross-Kerr at `χt = π`, inverse mixer.
pub fn apply_fredkin_composed(state: &FockVector, mode_u: usize, mode_a: usize, mode_b: usize) -> Result<FockVector> {
    check_modes(state, &[mode_u, mode_a, mode_b])?;
    let s = state.apply_two_mode(mode_a, mode_b, mixer_matrix(FRAC_PI_4))?;
    let s = apply_cross_kerr(&s, mode_a, mode_u, PI)?;
    s.apply_two_mode(mode_a, mode_b, mixer_matrix(-FRAC_PI_4))
}

pub fn fidelity(a: &FockVector, b: &FockVector) -> Result<f64> {
    for s in [a, b] {
        let n = s.norm_sq();
        if (n - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Contract(format!("state norm² {n} is not 1")));
        }
    }
    Ok(a.inner(b)?.norm_sqr())
}

/// Tunable parts of one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSettings {
    /// Ancilla mixer angle; `π/4` is the 50:50 splitter.
    pub alpha: f64,
    /// Phase on `u` between the ancilla mixers.
    pub phi: f64,
    pub wave_plate: bool,
}

impl Default for StageSettings {
    fn default() -> Self {
        Self {
            alpha: FRAC_PI_4,
            phi: 0.0,
            wave_plate: true,
        }
    }
}

/// Detector pattern `(photons in u, photons in v)`.
pub type Pattern = (usize, usize);

/// Runs one stage on mode `a` of `state`, appending modes `b`, `u`, `v`
/// (in that order) before any detection.
pub fn run_stage(state: &FockVector, a: usize, settings: &StageSettings) -> Result<FockVector> {
    let c = state.cutoff();
    let ancillas = FockVector::basis(c, &[0, 0, 1])?;
    let s = state.tensor(&ancillas)?;
    let (b, u, v) = (state.modes(), state.modes() + 1, state.modes() + 2);
    let s = s.apply_two_mode(u, v, mixer_matrix(settings.alpha))?;
    let s = apply_phase(&s, u, settings.phi)?;
    let s = apply_fredkin_composed(&s, u, a, b)?;
    let s = s.apply_two_mode(u, v, mixer_matrix(-settings.alpha))?;
    if settings.wave_plate {
        apply_phase(&s, b, FRAC_PI_2)
    } else {
        Ok(s)
    }
}

/// Projects the two trailing ancilla modes of a [`run_stage`] output.
fn detect(state: &FockVector, pattern: Pattern) -> Result<(FockVector, f64)> {
    let v = state.modes() - 1;
    let (s, _) = state.project(v, pattern.1)?;
    s.project(v - 1, pattern.0)
}

#[derive(Debug, Clone)]
pub struct CircuitOutcome {
    /// Normalized heralded state.
    pub state: FockVector,
    pub herald_probability: f64,
    /// Detector patterns, one per stage.
    pub patterns: Vec<Pattern>,
    /// Parity of the produced superposition, when it is one of the two.
    pub parity: Option<Parity>,
    pub warning: Option<TruncationWarning>,
}

/// Sign relating the `|2l,0⟩` and `|0,2l⟩` amplitudes of a two-mode state.
fn two_mode_parity(state: &FockVector) -> Option<Parity> {
    let c = state.cutoff();
    let mut best = (0.0, None);
    for k in 1..=c {
        let x = state.get(&[k, 0]).ok()?;
        let y = state.get(&[0, k]).ok()?;
        if x.norm() > best.0 {
            best = (x.norm(), Some(y / x));
        }
    }
    // pure vacuum: both branches coincide
    let Some(ratio) = best.1 else {
        return Some(Parity::Symmetric);
    };
    if (ratio - 1.0).norm() < 1e-9 {
        Some(Parity::Symmetric)
    } else if (ratio + 1.0).norm() < 1e-9 {
        Some(Parity::Antisymmetric)
    } else {
        None
    }
}

#[derive(Debug, Clone)]
pub struct TwoModeHerald {
    pub symmetric: CircuitOutcome,
    pub antisymmetric: CircuitOutcome,
    /// Probability of every `(u, v)` pattern within the cutoff.
    pub pattern_probabilities: Vec<(Pattern, f64)>,
}

/// Single 50:50 stage on `|ξ⟩_a|0⟩_b|0⟩_u|1⟩_v`, `xi` normalized.
pub fn herald_two_mode(xi: &FockVector) -> Result<TwoModeHerald> {
    if xi.modes() != 1 {
        return Err(Error::ShapeMismatch(format!("expected one mode, got {}", xi.modes())));
    }
    let out = run_stage(xi, 0, &StageSettings::default())?;
    let c = xi.cutoff();
    let mut pattern_probabilities = Vec::new();
    for pu in 0..=c {
        for pv in 0..=c {
            let (_, p) = detect(&out, (pu, pv))?;
            pattern_probabilities.push(((pu, pv), p));
        }
    }
    let mut sym = None;
    let mut anti = None;
    for pattern in [(0, 1), (1, 0)] {
        let (s, p) = detect(&out, pattern)?;
        if p <= NEGLIGIBLE_PROBABILITY {
            continue;
        }
        let state = s.normalized()?;
        let parity = two_mode_parity(&state);
        let outcome = CircuitOutcome {
            state,
            herald_probability: p,
            patterns: vec![pattern],
            parity,
            warning: None,
        };
        match parity {
            Some(Parity::Symmetric) => sym = Some(outcome),
            Some(Parity::Antisymmetric) => anti = Some(outcome),
            None => {}
        }
    }
    // Vacuum input: the antisymmetric pattern never fires.
    let vacuum_outcome = |pattern| CircuitOutcome {
        state: FockVector::zeros(2, c),
        herald_probability: 0.0,
        patterns: vec![pattern],
        parity: None,
        warning: None,
    };
    Ok(TwoModeHerald {
        symmetric: sym.ok_or(Error::NoSupport)?,
        antisymmetric: anti.unwrap_or_else(|| vacuum_outcome((1, 0))),
        pattern_probabilities,
    })
}

/// Catalyzed input for the circuit: levels `2l ≤ cutoff`, normalized, with a
/// warning when the dropped tail exceeds the tolerance.
pub fn catalyzed_input(r: f64, t: f64, n: usize, cutoff: usize) -> Result<(FockVector, Option<TruncationWarning>)> {
    let spec = ProbeSpec::new(r, t, n, 1, Parity::Symmetric)?;
    let probe = Probe::new(spec)?;
    let kept = probe.state.truncated_to_photons(cutoff);
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    for (l, c) in kept.coeffs.iter().enumerate() {
        amps[2 * l] = Complex64::new(*c, 0.0);
    }
    let leakage = 1.0 - kept.norm_sq / probe.state.norm_sq;
    let warning = (leakage > crate::fock::LEAKAGE_TOLERANCE).then_some(TruncationWarning {
        leakage,
        tolerance: crate::fock::LEAKAGE_TOLERANCE,
    });
    Ok((FockVector::single_mode(cutoff, &amps).normalized()?, warning))
}

/// Stage settings and detector patterns producing branch phases `phases`
/// along the chain `0 → 1 → … → d`.
///
/// Stage `k` leaves `|ξ′⟩` in mode `k−1` with amplitude `A_k` or moves it to
/// mode `k` with amplitude `B_k`, and maps a vacuum `a` input to `A_k + B_k`.
/// With `ρ_k = B_k/A_k` the branch ratios are
/// `t_k/t_{k−1} = ρ_k / (1 + ρ_{k+1})`, solved from the last stage back.
pub fn cascade_settings(phases: &[Complex64]) -> Result<Vec<(StageSettings, Pattern)>> {
    let d = phases.len().saturating_sub(1);
    if d == 0 {
        return Err(Error::Contract("need at least two modes".into()));
    }
    let mut rho = vec![Complex64::new(0.0, 0.0); d + 1];
    for k in (1..=d).rev() {
        let next = if k == d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0) + rho[k + 1]
        };
        rho[k] = phases[k] / phases[k - 1] * next;
        if rho[k].norm() < 1e-12 {
            return Err(Error::NoSupport);
        }
    }
    Ok(rho[1..]
        .iter()
        .map(|&r| {
            if (r + 1.0).norm() < 1e-12 {
                // B/A = −1 is the second single-photon pattern of a 50:50 stage.
                (StageSettings::default(), (1, 0))
            } else {
                let settings = StageSettings {
                    alpha: r.norm().sqrt().atan(),
                    phi: r.arg(),
                    wave_plate: true,
                };
                (settings, (0, 1))
            }
        })
        .collect())
}

/// Builds the `(d+1)`-mode probe by chaining heralded stages.
pub fn cascade_generate(spec: &ProbeSpec, cutoff: usize) -> Result<CircuitOutcome> {
    cascade_generate_with_budget(spec, cutoff, DEFAULT_AMPLITUDE_BUDGET)
}

pub fn cascade_generate_with_budget(spec: &ProbeSpec, cutoff: usize, budget: usize) -> Result<CircuitOutcome> {
    spec.validate()?;
    // The last stage holds d probe modes, the fresh b and two ancillas.
    let required = (cutoff + 1)
        .checked_pow(spec.modes() as u32 + 2)
        .unwrap_or(usize::MAX);
    if required > budget {
        return Err(Error::MemoryBudget { required, budget });
    }
    let (mut state, warning) = catalyzed_input(spec.r, spec.t, spec.n, cutoff)?;
    let stages = cascade_settings(&spec.branch_phases())?;
    let mut probability = 1.0;
    let mut patterns = Vec::with_capacity(stages.len());
    for (k, (settings, pattern)) in stages.iter().enumerate() {
        let out = run_stage(&state, k, settings)?;
        let (s, p) = detect(&out, *pattern)?;
        if p <= NEGLIGIBLE_PROBABILITY {
            return Err(Error::NoSupport);
        }
        probability *= p;
        patterns.push(*pattern);
        state = s.normalized()?;
    }
    Ok(CircuitOutcome {
        parity: Some(spec.parity),
        state,
        herald_probability: probability,
        patterns,
        warning,
    })
}
