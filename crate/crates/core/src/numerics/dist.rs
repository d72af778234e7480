use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::special::{beta_inc, erfc, gamma_p, ln_gamma};
use super::{check_probability, QUANTILE_REL_TOL};
use crate::error::{Error, Result};

const MAX_NEWTON: usize = 400;

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF, Φ(x) = erfc(-x/√2)/2.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

// Acklam's rational approximation to the normal quantile (relative error
// about 1.2e-9), refined afterwards by Halley steps on `normal_cdf`.
const ACKLAM_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const ACKLAM_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const ACKLAM_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const ACKLAM_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

fn acklam(p: f64) -> f64 {
    const P_LOW: f64 = 0.024_25;
    let (a, b, c, d) = (&ACKLAM_A, &ACKLAM_B, &ACKLAM_C, &ACKLAM_D);
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    }
}

/// Standard normal quantile Φ⁻¹(p).
pub fn normal_quantile(p: f64) -> Result<f64> {
    check_probability(p, "probability")?;
    if p == 0.5 {
        return Ok(0.0);
    }
    // solve in the lower half and reflect, so that tail accuracy is relative
    if p > 0.5 {
        // 1 - p loses bits when p is close to 1, so polish against p itself
        let x = -normal_quantile(1.0 - p)?;
        return Ok(halley_polish(x, p));
    }
    Ok(halley_polish(acklam(p), p))
}

fn halley_polish(mut x: f64, p: f64) -> f64 {
    for _ in 0..3 {
        let e = normal_cdf(x) - p;
        let u = e / normal_pdf(x);
        if !u.is_finite() {
            break;
        }
        let step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Lower-tail χ² CDF.
pub fn chisq_cdf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_p(0.5 * dof, 0.5 * x)
    }
}

fn chisq_pdf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let a = 0.5 * dof;
    ((a - 1.0) * x.ln() - 0.5 * x - a * 2f64.ln() - ln_gamma(a)).exp()
}

/// χ² quantile by safeguarded Newton iteration from a Wilson–Hilferty start.
pub fn chisq_quantile(p: f64, dof: f64) -> Result<f64> {
    check_probability(p, "probability")?;
    if !(dof > 0.0) || !dof.is_finite() {
        return Err(Error::Domain(format!("degrees of freedom must be > 0, got {dof}")));
    }
    let z = normal_quantile(p)?;
    let h = 2.0 / (9.0 * dof);
    let wh = dof * (1.0 - h + z * h.sqrt()).powi(3);
    // small-x expansion P(a, x/2) ≈ (x/2)^a / Γ(a + 1)
    let a = 0.5 * dof;
    let small = 2.0 * ((p.ln() + ln_gamma(a + 1.0)) / a).exp();
    let start = if wh > 0.0 && wh > small.min(dof) * 0.5 { wh } else { small };
    invert_cdf(|x| chisq_cdf(x, dof), |x| chisq_pdf(x, dof), p, start, 0.0)
}

/// Student-t CDF via the regularized incomplete beta function.
pub fn student_t_cdf(t: f64, dof: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * beta_inc(0.5 * dof, 0.5, dof / (dof + t * t));
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

fn student_t_pdf(t: f64, dof: f64) -> f64 {
    let ln = ln_gamma(0.5 * (dof + 1.0))
        - ln_gamma(0.5 * dof)
        - 0.5 * (dof * PI).ln()
        - 0.5 * (dof + 1.0) * (t * t / dof).ln_1p();
    ln.exp()
}

/// Student-t quantile.
///
/// One and two degrees of freedom use their closed forms; other values are
/// found by safeguarded Newton iteration on [`student_t_cdf`].
pub fn student_t_quantile(p: f64, dof: f64) -> Result<f64> {
    check_probability(p, "probability")?;
    if !(dof > 0.0) || !dof.is_finite() {
        return Err(Error::Domain(format!("degrees of freedom must be > 0, got {dof}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if dof == 1.0 {
        return Ok((PI * (p - 0.5)).tan());
    }
    if dof == 2.0 {
        return Ok((2.0 * p - 1.0) / (2.0 * p * (1.0 - p)).sqrt());
    }
    if p < 0.5 {
        return student_t_quantile(1.0 - p, dof).map(|t| -t);
    }
    let start = normal_quantile(p)?.max(1e-3);
    invert_cdf(
        |t| student_t_cdf(t, dof),
        |t| student_t_pdf(t, dof),
        p,
        start,
        0.0,
    )
}

/// Inverts a continuous increasing CDF on `[lower, ∞)` by Newton steps that
/// fall back to bisection whenever they leave the current bracket.
fn invert_cdf(
    cdf: impl Fn(f64) -> f64,
    pdf: impl Fn(f64) -> f64,
    p: f64,
    start: f64,
    lower: f64,
) -> Result<f64> {
    let mut lo = lower;
    let mut hi = start.max(lower + f64::MIN_POSITIVE);
    let mut expansions = 0;
    while cdf(hi) < p {
        lo = hi;
        hi = if hi > 0.0 { 2.0 * hi } else { 1.0 };
        expansions += 1;
        if expansions > 2000 || !hi.is_finite() {
            return Err(Error::NonConvergence(format!("could not bracket quantile {p}")));
        }
    }
    let target = QUANTILE_REL_TOL * p.min(1.0 - p);
    let mut x = start.clamp(lo, hi);
    for _ in 0..MAX_NEWTON {
        let e = cdf(x) - p;
        if e.abs() <= target {
            return Ok(x);
        }
        if e < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            return Ok(x);
        }
        let d = pdf(x);
        let newton = x - e / d;
        x = if d > 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NonConvergence(format!("quantile iteration for p = {p}")))
}
