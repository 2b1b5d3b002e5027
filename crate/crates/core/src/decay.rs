//! Exponential localization of edge states: log-linear fits of the
//! transverse-maximum profile away from the cut.

use crate::error::{Error, Result};
use crate::fiber::{assemble_fiber, transverse_max_profile, FiberSpec, FiberSpectrum};
use crate::linalg::refine_eigenpair;
use crate::scalar::Scalar;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DecayFit<T: Scalar> {
    /// Decay rate per unit length of the profile envelope.
    pub alpha_fit: T,
    pub r_squared: T,
    pub fit_range: (T, T),
    pub points: usize,
}

impl<T: Scalar> DecayFit<T> {
    pub fn accepted(&self) -> bool {
        self.alpha_fit > T::zero() && self.r_squared >= T::lit(0.9)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DecayOptions<T: Scalar> {
    /// Profile values below `underflow * max` end the fit range.
    pub underflow: T,
    /// Distance kept clear of the cut and of the wall, in periods `L`.
    pub margin_periods: T,
}

impl<T: Scalar> Default for DecayOptions<T> {
    fn default() -> Self {
        Self { underflow: T::lit(1e-14), margin_periods: T::lit(2.0) }
    }
}

/// Log-linear least squares `y = c_j - alpha x` with one slope and an
/// intercept per phase class `j`, so that a periodic modulation of the
/// amplitude is absorbed by the intercepts. Returns `(alpha, r^2)`.
pub fn periodic_log_fit<T: Scalar>(points: &[(usize, T, T)]) -> Option<(T, T)> {
    let mut groups: std::collections::BTreeMap<usize, Vec<(T, T)>> = Default::default();
    for &(j, x, y) in points {
        groups.entry(j).or_default().push((x, y));
    }
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    let mut used = Vec::new();
    for g in groups.values().filter(|g| g.len() >= 2) {
        let n = T::from_usize_lossy(g.len());
        let mx = g.iter().fold(T::zero(), |s, p| s + p.0) / n;
        let my = g.iter().fold(T::zero(), |s, p| s + p.1) / n;
        for &(x, y) in g {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        used.push((g, mx, my));
    }
    if !(sxx > T::zero()) {
        return None;
    }
    let slope = sxy / sxx;
    let all: Vec<T> = used.iter().flat_map(|(g, _, _)| g.iter().map(|p| p.1)).collect();
    let mean = all.iter().fold(T::zero(), |s, &y| s + y) / T::from_usize_lossy(all.len());
    let ss_tot = all.iter().fold(T::zero(), |s, &y| s + (y - mean) * (y - mean));
    let mut ss_res = T::zero();
    for (g, mx, my) in &used {
        for &(x, y) in g.iter() {
            let r = y - (*my + slope * (x - *mx));
            ss_res += r * r;
        }
    }
    let r2 = if ss_tot > T::zero() { T::one() - ss_res / ss_tot } else { T::one() };
    Some((-slope, r2))
}

/// Decay rate of `state` into the `x1 > 0` side of the fiber, fitted on
/// `[cut + 2L, X - 2L]` to `max_{x2} |psi|`.
pub fn fit_decay_rate<T: Scalar>(spec: &FiberSpec<T>, state: &[Complex<T>], opts: &DecayOptions<T>) -> Result<DecayFit<T>> {
    if state.len() != spec.dim() {
        return Err(Error::InvalidArgument { field: "state", reason: format!("length {} does not match fiber dimension {}", state.len(), spec.dim()) });
    }
    let profile = transverse_max_profile(spec, state);
    let peak = profile.iter().fold(T::zero(), |a, p| a.max(p.1));
    if !(peak > T::zero()) {
        return Err(Error::Decay("zero state".into()));
    }
    let margin = spec.length() * opts.margin_periods;
    let (start, end) = (margin, spec.x_extent - margin);
    let floor = peak * opts.underflow;
    let ny = spec.ny();
    let mut pts = Vec::new();
    for &(x1, m) in &profile {
        if x1 < start || x1 > end {
            continue;
        }
        if m < floor {
            // Underflow: shorten the range here.
            break;
        }
        let phase = ((x1 / spec.h).round().as_f64() as i64).rem_euclid(ny as i64) as usize;
        pts.push((phase, x1, m.ln()));
    }
    let insufficient = || Error::Decay(format!("insufficient range: {} usable points in [{start}, {end}]", pts.len()));
    if pts.len() < 4 {
        return Err(insufficient());
    }
    let (alpha, r2) = periodic_log_fit(&pts).ok_or_else(insufficient)?;
    Ok(DecayFit { alpha_fit: alpha, r_squared: r2, fit_range: (pts[0].1, pts[pts.len() - 1].1), points: pts.len() })
}

/// Fits every non-spurious in-gap state of `spectrum`, after polishing each
/// eigenvector by inverse iteration so the tail is resolved.
pub fn fit_in_gap_states<T: Scalar>(spectrum: &FiberSpectrum<T>, opts: &DecayOptions<T>) -> Result<Vec<(T, Result<DecayFit<T>>)>> {
    let a = assemble_fiber(&spectrum.spec)?;
    let mut out = Vec::new();
    for (i, &e) in spectrum.eigenvalues.iter().enumerate() {
        if !spectrum.in_gap[i] {
            continue;
        }
        let (e, v) = refine_eigenpair(&a, e, &spectrum.vectors[i], 3)?;
        out.push((e, fit_decay_rate(&spectrum.spec, &v, opts)));
    }
    Ok(out)
}

/// Rows `(energy, alpha_fit, r_squared)`; failed fits are left blank.
pub fn write_decay_csv<T: Scalar, W: Write>(fits: &[(T, Result<DecayFit<T>>)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["energy", "alpha_fit", "r_squared"])?;
    for (e, f) in fits {
        match f {
            Ok(f) => w.write_record([e.to_string(), f.alpha_fit.to_string(), f.r_squared.to_string()])?,
            Err(_) => w.write_record([e.to_string(), String::new(), String::new()])?,
        }
    }
    w.flush()?;
    Ok(())
}
