use super::{Interval, MAX_QUAD_DEPTH};
use crate::error::{Error, Result};

const INITIAL_PANELS: usize = 8;

/// Adaptive Simpson quadrature with a relative error target.
///
/// The interval is first cut into a few panels, each of which is then
/// bisected until the Richardson error estimate falls below `rel_tol` times
/// the panel's own contribution (or its share of the total absolute mass,
/// whichever is larger).
pub fn integrate<F: Fn(f64) -> f64>(f: F, interval: Interval, rel_tol: f64) -> Result<f64> {
    integrate_with_depth(f, interval, rel_tol, MAX_QUAD_DEPTH)
}

pub fn integrate_with_depth<F: Fn(f64) -> f64>(
    f: F,
    interval: Interval,
    rel_tol: f64,
    max_depth: usize,
) -> Result<f64> {
    if !(rel_tol > 0.0) {
        return Err(Error::Domain(format!("rel_tol must be > 0, got {rel_tol}")));
    }
    if !interval.is_finite() {
        return Err(Error::Domain("integration interval must be finite".into()));
    }
    let (a, b) = (interval.lo, interval.hi);
    if a == b {
        return Ok(0.0);
    }
    let n = INITIAL_PANELS;
    let h = (b - a) / n as f64;
    let xs: Vec<f64> = (0..=2 * n).map(|i| a + 0.5 * h * i as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if let Some(x) = xs.iter().zip(&fs).find(|(_, v)| !v.is_finite()).map(|(x, _)| *x) {
        return Err(Error::Domain(format!("integrand is not finite at {x}")));
    }

    let abs_mass: f64 = (0..n)
        .map(|i| h / 6.0 * (fs[2 * i].abs() + 4.0 * fs[2 * i + 1].abs() + fs[2 * i + 2].abs()))
        .sum();
    let ctx = Ctx {
        f: &f,
        rel_tol,
        abs_density: rel_tol * abs_mass / (b - a),
        max_depth,
    };

    let mut total = 0.0;
    for i in 0..n {
        let (x0, x2) = (xs[2 * i], xs[2 * i + 2]);
        let (f0, f1, f2) = (fs[2 * i], fs[2 * i + 1], fs[2 * i + 2]);
        let whole = (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
        total += ctx.refine(x0, x2, f0, f1, f2, whole, 0)?;
    }
    Ok(total)
}

struct Ctx<'a, F> {
    f: &'a F,
    rel_tol: f64,
    abs_density: f64,
    max_depth: usize,
}

impl<F: Fn(f64) -> f64> Ctx<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(&self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, depth: usize) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        if !flm.is_finite() || !frm.is_finite() {
            return Err(Error::Domain(format!("integrand is not finite near {m}")));
        }
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let halves = left + right;
        let delta = halves - whole;
        let tol = (self.rel_tol * halves.abs()).max(self.abs_density * (b - a));
        // depth 0 panels are always split once so a single coarse sample
        // cannot hide structure
        if depth > 0 && (delta.abs() <= 15.0 * tol || delta.abs() <= 8.0 * f64::EPSILON * halves.abs())
        {
            return Ok(halves + delta / 15.0);
        }
        if lm <= a || m <= lm || rm <= m || b <= rm {
            // interval can no longer be split in floating point
            return Ok(halves + delta / 15.0);
        }
        if depth >= self.max_depth {
            return Err(Error::NonConvergence(format!(
                "adaptive quadrature reached depth {} near {m}",
                self.max_depth
            )));
        }
        Ok(self.refine(a, m, fa, flm, fm, left, depth + 1)?
            + self.refine(m, b, fm, frm, fb, right, depth + 1)?)
    }
}
