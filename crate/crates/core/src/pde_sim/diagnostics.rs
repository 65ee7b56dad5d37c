use serde::Serialize;

use super::Field2D;

/// Front position and shape at one time.
///
/// Levels that are not found are reported as NaN.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontDiagnostics {
    pub t: f64,
    pub rho_max: f64,
    /// `min{x : ρ ≤ 1/2}`.
    pub x_half: f64,
    /// `max{x : ρ ≥ 0.1}`.
    pub x_delta_01: f64,
    /// `max{x : ρ ≥ 0.1} − max{x : ρ ≥ 0.9}`.
    pub width: f64,
    /// `x_half / t^{3/2}`.
    pub prefactor: f64,
    /// Slope of `ln x_half` against `ln t` over the last decade of records.
    pub exponent_fit: f64,
    /// Largest increase of `ρ` between neighbouring columns.
    pub rho_overshoot: f64,
    pub f_min: f64,
}

/// Smallest `x` where the linear interpolant of `rho` drops to `level`.
pub fn lower_level(rho: &[f64], dx: f64, level: f64) -> f64 {
    if rho.first().is_some_and(|&r| r <= level) {
        return 0.0;
    }
    for i in 1..rho.len() {
        if rho[i] <= level {
            let s = (rho[i - 1] - level) / (rho[i - 1] - rho[i]);
            return dx * (i as f64 - 1.0 + s);
        }
    }
    f64::NAN
}

/// Largest `x` where the linear interpolant of `rho` is at least `level`.
pub fn upper_level(rho: &[f64], dx: f64, level: f64) -> f64 {
    let Some(i) = rho.iter().rposition(|&r| r >= level) else {
        return f64::NAN;
    };
    if i + 1 == rho.len() {
        return f64::NAN;
    }
    let s = (rho[i] - level) / (rho[i] - rho[i + 1]);
    dx * (i as f64 + s)
}

/// Least-squares slope of `ln x` against `ln t` over `t ∈ [t_last/10, t_last]`;
/// NaN with fewer than three usable points.
pub fn exponent_fit(samples: &[(f64, f64)]) -> f64 {
    let Some(&(t_last, _)) = samples.last() else {
        return f64::NAN;
    };
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(t, x)| *t >= t_last / 10.0 * (1.0 - 1e-12) && *t > 0.0 && *x > 0.0)
        .map(|(t, x)| (t.ln(), x.ln()))
        .collect();
    if pts.len() < 3 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Diagnostics of `f`; `history` holds earlier `(t, x_half)` records used
/// for the exponent fit.
pub fn diagnostics(f: &Field2D, history: &[(f64, f64)]) -> FrontDiagnostics {
    let rho = f.density();
    let x_half = lower_level(&rho, f.dx, 0.5);
    let x_delta_01 = upper_level(&rho, f.dx, 0.1);
    let mut pts = history.to_vec();
    if x_half.is_finite() {
        pts.push((f.t, x_half));
    }
    FrontDiagnostics {
        t: f.t,
        rho_max: rho.iter().copied().fold(0.0, f64::max),
        x_half,
        x_delta_01,
        width: x_delta_01 - upper_level(&rho, f.dx, 0.9),
        prefactor: x_half / f.t.powf(1.5),
        exponent_fit: exponent_fit(&pts),
        rho_overshoot: rho.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max),
        f_min: f.values.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Floor applied to `f` before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-200;

/// One sample `(x/t^{3/2}, θ/t, −t ln f)` of the rescaled field.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct USample {
    pub y: f64,
    pub eta: f64,
    pub u: f64,
}

/// `U = −t ln max(f, LOG_FLOOR)` in self-similar coordinates, on every
/// `stride`-th node in each direction.
pub fn u_slice(f: &Field2D, stride: usize) -> Vec<USample> {
    let stride = stride.max(1);
    let t = f.t;
    let mut out = Vec::new();
    for j in (0..f.ntheta).step_by(stride) {
        for i in (0..f.nx).step_by(stride) {
            out.push(USample {
                y: f.x(i) / t.powf(1.5),
                eta: f.theta(j) / t,
                u: -t * f.get(i, j).max(LOG_FLOOR).ln(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heaviside_levels() {
        let dx = 0.5;
        let rho: Vec<f64> = (0..40).map(|i| if (i as f64) * dx < 7.0 { 1.0 } else { 0.0 }).collect();
        // the jump sits between nodes 13 and 14, at the interpolated crossing
        for level in [0.1, 0.5, 0.9] {
            let lo = lower_level(&rho, dx, level);
            let hi = upper_level(&rho, dx, level);
            assert!((lo - (6.5 + dx * (1.0 - level))).abs() < 1e-12);
            assert!((hi - lo).abs() < 1e-12);
        }
    }

    #[test]
    fn level_sets_of_monotone_profiles_nest() {
        let rho: Vec<f64> = (0..100).map(|i| 1.0 / (1.0 + (0.2 * (i as f64 - 40.0)).exp())).collect();
        let levels = [0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95];
        let xs: Vec<f64> = levels.iter().map(|&d| upper_level(&rho, 1.0, d)).collect();
        assert!(xs.windows(2).all(|w| w[1] < w[0]));
        assert!((lower_level(&rho, 1.0, 0.5) - 40.0).abs() < 1e-9);
    }

    #[test]
    fn missing_levels_are_nan() {
        assert!(lower_level(&[1.0, 0.9, 0.8], 1.0, 0.5).is_nan());
        assert!(upper_level(&[0.0, 0.0], 1.0, 0.5).is_nan());
        assert_eq!(lower_level(&[0.2, 0.1], 1.0, 0.5), 0.0);
    }

    #[test]
    fn fits_power_laws() {
        let samples: Vec<(f64, f64)> = (1..=100).map(|k| {
            let t = k as f64;
            (t, 1.3 * t.powf(1.5))
        }).collect();
        assert!((exponent_fit(&samples) - 1.5).abs() < 1e-12);
        assert!(exponent_fit(&samples[..2]).is_nan());
    }
}
