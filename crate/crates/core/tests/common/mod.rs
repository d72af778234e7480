//! Brute-force reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's numerics: the joint posterior of
//! (μ, τ) under a flat effect prior is tabulated on a plain midpoint grid and
//! summed. Slow, simple, and independent.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

pub const MU_STEP: f64 = 0.005;
pub const TAU_STEP: f64 = 0.002;

pub mod props;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// The committed synthetic datasets, `(file name, y, sigma)`.
pub fn synthetic() -> Vec<(&'static str, Vec<f64>, Vec<f64>)> {
    vec![
        ("synthetic_k1.csv", vec![0.3], vec![0.5]),
        ("synthetic_k2.csv", vec![-0.2, 0.6], vec![0.3, 0.4]),
        ("synthetic_k3.csv", vec![-0.5, 0.1, 0.9], vec![0.4, 0.3, 0.5]),
        (
            "synthetic_k5.csv",
            vec![0.12, -0.35, 0.48, 0.9, 0.05],
            vec![0.25, 0.4, 0.3, 0.5, 0.2],
        ),
    ]
}

/// Abramowitz & Stegun 7.1.26, |error| < 1.5e-7.
pub fn erf_as(x: f64) -> f64 {
    let t = 1.0 / (1.0 + 0.3275911 * x.abs());
    let poly = t * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let r = 1.0 - poly * (-x * x).exp();
    if x >= 0.0 {
        r
    } else {
        -r
    }
}

pub fn phi_as(z: f64) -> f64 {
    0.5 * (1.0 + erf_as(z / 2f64.sqrt()))
}

pub fn normal_density(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
}

#[derive(Clone, Copy, Debug)]
pub enum OraclePrior {
    HalfNormal(f64),
    Uniform(f64),
}

impl OraclePrior {
    pub fn density(self, tau: f64) -> f64 {
        match self {
            OraclePrior::HalfNormal(s) => 2.0 * normal_density(tau, 0.0, s),
            OraclePrior::Uniform(u) => {
                if tau <= u {
                    1.0 / u
                } else {
                    0.0
                }
            }
        }
    }

    /// Where the τ grid stops.
    pub fn tau_max(self) -> f64 {
        match self {
            OraclePrior::HalfNormal(s) => 8.0 * s,
            OraclePrior::Uniform(u) => u,
        }
    }
}

/// Tabulated joint posterior on midpoint cells.
pub struct Grid {
    pub mu: Vec<f64>,
    pub tau: Vec<f64>,
    /// Row-major over (τ, μ); sums to 1.
    pub mass: Vec<f64>,
    pub mu_step: f64,
    pub tau_step: f64,
}

fn tabulate(y: &[f64], sigma: &[f64], prior: OraclePrior, mu_lo: f64, mu_hi: f64, mu_step: f64, tau_step: f64) -> Grid {
    let n_mu = ((mu_hi - mu_lo) / mu_step).ceil() as usize;
    let n_tau = (prior.tau_max() / tau_step).round() as usize;
    let mu: Vec<f64> = (0..n_mu).map(|i| mu_lo + (i as f64 + 0.5) * mu_step).collect();
    let tau: Vec<f64> = (0..n_tau).map(|j| (j as f64 + 0.5) * tau_step).collect();

    // Per τ the log-likelihood is quadratic in μ: log c(τ) - A(τ)(μ - m(τ))²/2.
    let rows: Vec<(f64, f64, f64)> = tau
        .iter()
        .map(|&t| {
            let (mut a, mut b, mut c, mut logdet) = (0.0, 0.0, 0.0, 0.0);
            for (&yi, &si) in y.iter().zip(sigma) {
                let v = si * si + t * t;
                a += 1.0 / v;
                b += yi / v;
                c += yi * yi / v;
                logdet += v.ln();
            }
            let m = b / a;
            let log_c = prior.density(t).ln() - 0.5 * logdet - 0.5 * (c - b * b / a);
            (log_c, a, m)
        })
        .collect();
    let offset = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);

    let mut mass = Vec::with_capacity(n_mu * n_tau);
    let mut total = 0.0;
    for &(log_c, a, m) in &rows {
        let base = log_c - offset;
        for &x in &mu {
            let w = (base - 0.5 * a * (x - m) * (x - m)).exp();
            total += w;
            mass.push(w);
        }
    }
    mass.iter_mut().for_each(|w| *w /= total);
    Grid {
        mu,
        tau,
        mass,
        mu_step,
        tau_step,
    }
}

/// Joint posterior with μ step 0.005 on mean ± 10 sd and τ step 0.002 on
/// [0, τ_max]. The mean and sd are taken from a coarse pilot pass.
pub fn brute_force(y: &[f64], sigma: &[f64], prior: OraclePrior) -> Grid {
    let spread = sigma.iter().cloned().fold(0.0, f64::max) + prior.tau_max();
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min) - 10.0 * spread;
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 10.0 * spread;
    let pilot = tabulate(y, sigma, prior, lo, hi, 0.05, 0.02);
    let (mean, sd) = pilot.mu_moments();
    tabulate(y, sigma, prior, mean - 10.0 * sd, mean + 10.0 * sd, MU_STEP, TAU_STEP)
}

fn cell_quantile(centers: &[f64], step: f64, masses: &[f64], p: f64) -> f64 {
    let mut acc = 0.0;
    for (&c, &m) in centers.iter().zip(masses) {
        if acc + m >= p {
            return c - 0.5 * step + step * (p - acc) / m;
        }
        acc += m;
    }
    centers[centers.len() - 1] + 0.5 * step
}

impl Grid {
    pub fn mu_marginal(&self) -> Vec<f64> {
        let n = self.mu.len();
        let mut out = vec![0.0; n];
        for row in self.mass.chunks(n) {
            out.iter_mut().zip(row).for_each(|(o, w)| *o += w);
        }
        out
    }

    pub fn tau_marginal(&self) -> Vec<f64> {
        self.mass.chunks(self.mu.len()).map(|row| row.iter().sum()).collect()
    }

    pub fn mu_moments(&self) -> (f64, f64) {
        let m = self.mu_marginal();
        let mean: f64 = self.mu.iter().zip(&m).map(|(x, w)| x * w).sum();
        let var: f64 = self.mu.iter().zip(&m).map(|(x, w)| (x - mean).powi(2) * w).sum();
        (mean, var.sqrt())
    }

    pub fn mu_quantile(&self, p: f64) -> f64 {
        cell_quantile(&self.mu, self.mu_step, &self.mu_marginal(), p)
    }

    pub fn tau_quantile(&self, p: f64) -> f64 {
        cell_quantile(&self.tau, self.tau_step, &self.tau_marginal(), p)
    }

    pub fn mu_cdf(&self, x: f64) -> f64 {
        let m = self.mu_marginal();
        let mut acc = 0.0;
        for (&c, &w) in self.mu.iter().zip(&m) {
            let (lo, hi) = (c - 0.5 * self.mu_step, c + 0.5 * self.mu_step);
            if x >= hi {
                acc += w;
            } else if x > lo {
                acc += w * (x - lo) / self.mu_step;
            }
        }
        acc
    }

    /// CDF of the study effect θᵢ: given (μ, τ), θᵢ is normal with mean
    /// B·yᵢ + (1−B)·μ and variance B·σᵢ², B = τ²/(σᵢ²+τ²).
    pub fn theta_cdf(&self, yi: f64, si: f64, xs: &[f64]) -> Vec<f64> {
        let n = self.mu.len();
        let mut out = vec![0.0; xs.len()];
        let floor = self.mass.iter().cloned().fold(0.0, f64::max) * 1e-14;
        for (j, row) in self.mass.chunks(n).enumerate() {
            let t = self.tau[j];
            let b = t * t / (si * si + t * t);
            let sd = (b * si * si).sqrt();
            for (&mu, &w) in self.mu.iter().zip(row) {
                if w < floor {
                    continue;
                }
                let mean = b * yi + (1.0 - b) * mu;
                for (o, &x) in out.iter_mut().zip(xs) {
                    *o += w * phi_as((x - mean) / sd);
                }
            }
        }
        out
    }
}

/// log ∫ Πᵢ N(yᵢ; μ, σᵢ²+τ²) dμ by a Riemann sum over μ ∈ [-10, 10].
pub fn log_integrated_likelihood(y: &[f64], sigma: &[f64], tau: f64) -> f64 {
    let n = (20.0 / MU_STEP).round() as usize;
    let mut total = 0.0;
    for i in 0..n {
        let mu = -10.0 + (i as f64 + 0.5) * MU_STEP;
        let mut l = 1.0;
        for (&yi, &si) in y.iter().zip(sigma) {
            l *= normal_density(yi, mu, (si * si + tau * tau).sqrt());
        }
        total += l * MU_STEP;
    }
    total.ln()
}
