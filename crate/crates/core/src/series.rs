//! Truncated bivariate power series in `(τ, τ*)`.
//!
//! Every catalysis expectation value in this crate reduces to a mixed
//! derivative `∂ⁿ_τ ∂ⁿ_τ* f(τ, τ*)` at the origin. Those derivatives only read
//! the `τⁿ τ*ⁿ` coefficient, so all arithmetic here is exact up to a per-variable
//! order and silently drops anything above it.

use crate::error::{check_domain, Error, Result};

/// Dense real coefficients `c[i][j]` of `τ^i τ*^j`, `0 <= i, j <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries {
    order: usize,
    coeffs: Vec<f64>,
}

impl BivariateSeries {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            coeffs: vec![0.0; (order + 1) * (order + 1)],
        }
    }

    pub fn constant(order: usize, value: f64) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = value;
        s
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut s = Self::zeros(order);
        for i in 0..=order {
            for j in 0..=order {
                s.coeffs[i * (order + 1) + j] = f(i, j);
            }
        }
        s
    }

    /// `f(τ)·h(τ*)` from univariate coefficient lists (missing entries are zero).
    pub fn separable(order: usize, f: &[f64], h: &[f64]) -> Self {
        let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        Self::from_fn(order, |i, j| at(f, i) * at(h, j))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        assert!(i <= self.order && j <= self.order, "index beyond order");
        self.coeffs[i * (self.order + 1) + j]
    }

    pub fn constant_term(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn add_constant(&self, k: f64) -> Self {
        let mut s = self.clone();
        s.coeffs[0] += k;
        s
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let m = self.order;
        let w = m + 1;
        let mut out = Self::zeros(m);
        for i1 in 0..=m {
            for j1 in 0..=m {
                let a = self.coeffs[i1 * w + j1];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=(m - i1) {
                    let row = (i1 + i2) * w + j1;
                    let brow = i2 * w;
                    for j2 in 0..=(m - j1) {
                        out.coeffs[row + j2] += a * other.coeffs[brow + j2];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `s^alpha` via the binomial series in `u = s/s(0,0) - 1`.
    ///
    /// `u` has no constant term, so `u^k` vanishes below total degree `k` and
    /// the series terminates at `k = 2·order`.
    pub fn pow(&self, alpha: f64) -> Result<Self> {
        let c0 = self.constant_term();
        check_domain("constant term", c0, c0 > 0.0, "> 0 for a real power")?;
        let u = self.scale(1.0 / c0).add_constant(-1.0);
        let mut out = Self::constant(self.order, 1.0);
        let mut term = Self::constant(self.order, 1.0);
        let mut binom = 1.0;
        for k in 1..=(2 * self.order) {
            binom *= (alpha - (k as f64 - 1.0)) / k as f64;
            term = term.mul(&u)?;
            if binom == 0.0 {
                break;
            }
            out = out.add(&term.scale(binom))?;
        }
        Ok(out.scale(c0.powf(alpha)))
    }

    /// `∂ⁿ_τ ∂ⁿ_τ* s |₀ = (n!)² · c[n][n]`.
    pub fn mixed_partial_at_zero(&self, n: usize) -> Result<f64> {
        if n > self.order {
            return Err(Error::OutOfRange {
                n,
                order: self.order,
            });
        }
        let nf = factorial(n);
        Ok(nf * nf * self.coeff(n, n))
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `ℵ(τ,τ*)` and `ℑ(τ,τ*)` expanded to a fixed order for one `(r, T)`.
#[derive(Debug, Clone)]
pub struct CatalysisKernel {
    pub aleph: BivariateSeries,
    pub im: BivariateSeries,
    pub r: f64,
    pub t: f64,
}

/// Coefficients of `g(τ) = (√T − τ/√T)² / (1 − τ)²`, i.e. `e^{2μ(τ)}`.
fn squeeze_phase_factor(t: f64, order: usize) -> Vec<f64> {
    // (T − 2τ + τ²/T) · Σ (k+1) τ^k
    let numer = [t, -2.0, 1.0 / t];
    (0..=order)
        .map(|k| {
            numer
                .iter()
                .enumerate()
                .filter(|(p, _)| *p <= k)
                .map(|(p, c)| c * (k - p + 1) as f64)
                .sum()
        })
        .collect()
}

pub fn build_kernel(r: f64, t: f64, order: usize) -> Result<CatalysisKernel> {
    check_domain("r", r, r >= 0.0, "r >= 0")?;
    check_domain("T", t, t > 0.0 && t <= 1.0, "0 < T <= 1")?;
    let geometric = vec![1.0; order + 1];
    let aleph = BivariateSeries::separable(order, &geometric, &geometric).scale(1.0 / r.cosh());
    let g = squeeze_phase_factor(t, order);
    let th = r.tanh();
    let im = BivariateSeries::separable(order, &g, &g).scale(th * th);
    Ok(CatalysisKernel { aleph, im, r, t })
}

impl CatalysisKernel {
    pub fn order(&self) -> usize {
        self.aleph.order()
    }

    /// `1 − ℑ`, the base of every fractional power in the moment formulas.
    pub fn one_minus_im(&self) -> BivariateSeries {
        self.im.scale(-1.0).add_constant(1.0)
    }
}
