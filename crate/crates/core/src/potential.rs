//! Periodic potentials stored by their Fourier coefficients, rational
//! rotations of the square lattice and the dislocated potential `W_t`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;

/// A point of the plane.
pub type Point<T> = [T; 2];

/// One Fourier term `V_G exp(2 pi i G.x)` of a descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    #[serde(rename = "G1")]
    pub g1: i64,
    #[serde(rename = "G2")]
    pub g2: i64,
    pub re: f64,
    pub im: f64,
}

/// Structured description of a potential family.
///
/// Serialized with a `family` tag, e.g. `{"family": "cosine2d", "amplitude": 4.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    /// `v (cos 2 pi x1 + cos 2 pi x2)`.
    Cosine2d { amplitude: f64 },
    /// One Gaussian `depth exp(-|x|^2 / (2 width^2))` per lattice site.
    GaussianBumps { depth: f64, width: f64 },
    Fourier { coefficients: Vec<FourierTerm> },
}

const FAMILIES: [&str; 4] = ["zero", "cosine2d", "gaussian_bumps", "fourier"];

impl PotentialSpec {
    /// Parses a JSON descriptor, reporting unknown family names explicitly.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        Self::from_value(value)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        match value.get("family").and_then(|f| f.as_str()) {
            Some(name) if !FAMILIES.contains(&name) => return Err(Error::UnknownFamily(name.to_string())),
            None => return Err(Error::Parse("potential descriptor lacks a `family` string".into())),
            _ => {}
        }
        Ok(serde_json::from_value(value)?)
    }

    /// Reads a coefficient list from CSV with header `G1,G2,re,im`.
    pub fn fourier_from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let coefficients = rdr.deserialize().collect::<std::result::Result<Vec<FourierTerm>, _>>()?;
        Ok(PotentialSpec::Fourier { coefficients })
    }

    pub fn family(&self) -> &'static str {
        match self {
            PotentialSpec::Zero => "zero",
            PotentialSpec::Cosine2d { .. } => "cosine2d",
            PotentialSpec::GaussianBumps { .. } => "gaussian_bumps",
            PotentialSpec::Fourier { .. } => "fourier",
        }
    }
}

/// Coprime pair `(p, q)` with `tan theta = p / q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct RationalAngle {
    p: i64,
    q: i64,
}

impl TryFrom<(i64, i64)> for RationalAngle {
    type Error = Error;
    fn try_from((p, q): (i64, i64)) -> Result<Self> {
        RationalAngle::new(p, q)
    }
}

impl From<RationalAngle> for (i64, i64) {
    fn from(a: RationalAngle) -> Self {
        (a.p, a.q)
    }
}

pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl RationalAngle {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        let bad = |reason: &str| Err(Error::InvalidAngle { p, q, reason: reason.into() });
        if p < 0 {
            return bad("p must be nonnegative");
        }
        if q < 1 {
            return bad("q must be positive");
        }
        if gcd(p as i128, q as i128) != 1 {
            return bad("p and q must be coprime");
        }
        Ok(Self { p, q })
    }

    pub const UNROTATED: RationalAngle = RationalAngle { p: 0, q: 1 };

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `L^2 = p^2 + q^2`.
    pub fn length_squared(&self) -> i64 {
        self.p * self.p + self.q * self.q
    }

    pub fn length<T: Scalar>(&self) -> T {
        T::lit((self.length_squared() as f64).sqrt())
    }

    /// `R_theta = (q/L, -p/L; p/L, q/L)`.
    pub fn rotation_matrix<T: Scalar>(&self) -> [[T; 2]; 2] {
        let l = self.length::<T>();
        let (p, q) = (T::lit(self.p as f64) / l, T::lit(self.q as f64) / l);
        [[q, -p], [p, q]]
    }

    /// `R_theta^{-1} x`.
    pub fn unrotate<T: Scalar>(&self, x: Point<T>) -> Point<T> {
        let l = self.length::<T>();
        let (p, q) = (T::lit(self.p as f64), T::lit(self.q as f64));
        [(q * x[0] + p * x[1]) / l, (q * x[1] - p * x[0]) / l]
    }

    /// Integer label `G'` of the rotated harmonic: `V_G e^{2 pi i G.R^{-1}x} = V_G e^{2 pi i G'.x / L}`.
    pub fn rotate_harmonic(&self, g: (i64, i64)) -> (i64, i64) {
        (self.q * g.0 - self.p * g.1, self.p * g.0 + self.q * g.1)
    }
}

impl std::fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// A real, Z^2-periodic potential.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPotential<T: Scalar> {
    coeffs: BTreeMap<(i64, i64), Complex<T>>,
    sup_norm: T,
    lipschitz_nu: T,
    spec: PotentialSpec,
}

/// Wraps `x` into `[0, 1)` before forming phases so that periodicity holds to round-off.
#[inline]
fn frac<T: Scalar>(x: T) -> T {
    x - x.floor()
}

impl<T: Scalar> PeriodicPotential<T> {
    pub fn fourier_coeffs(&self) -> &BTreeMap<(i64, i64), Complex<T>> {
        &self.coeffs
    }

    pub fn coefficient(&self, g: (i64, i64)) -> Complex<T> {
        self.coeffs.get(&g).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn sup_norm(&self) -> T {
        self.sup_norm
    }

    pub fn lipschitz_nu(&self) -> T {
        self.lipschitz_nu
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.re == T::zero() && c.im == T::zero())
    }

    /// Largest `|G|_inf` carrying a coefficient.
    pub fn max_harmonic(&self) -> i64 {
        self.coeffs.keys().map(|g| g.0.abs().max(g.1.abs())).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: Point<T>) -> T {
        let two_pi = T::two_pi();
        let (y1, y2) = (frac(x[0]), frac(x[1]));
        let mut s = T::zero();
        for (&(g1, g2), c) in &self.coeffs {
            let phase = two_pi * (T::lit(g1 as f64) * y1 + T::lit(g2 as f64) * y2);
            s += c.re * phase.cos() - c.im * phase.sin();
        }
        s
    }

    pub fn gradient(&self, x: Point<T>) -> Point<T> {
        let two_pi = T::two_pi();
        let (y1, y2) = (frac(x[0]), frac(x[1]));
        let mut d = [T::zero(), T::zero()];
        for (&(g1, g2), c) in &self.coeffs {
            let (a, b) = (T::lit(g1 as f64), T::lit(g2 as f64));
            let phase = two_pi * (a * y1 + b * y2);
            let w = -two_pi * (c.re * phase.sin() + c.im * phase.cos());
            d[0] += w * a;
            d[1] += w * b;
        }
        d
    }

    /// Coefficients of `V_theta` on the reciprocal lattice of `L Z^2`, keyed by `G'`.
    pub fn rotated_coefficients(&self, angle: &RationalAngle) -> BTreeMap<(i64, i64), Complex<T>> {
        self.coeffs.iter().map(|(&g, &c)| (angle.rotate_harmonic(g), c)).collect()
    }
}

/// `V(R_theta^{-1} x)`.
pub fn evaluate_rotated<T: Scalar>(v: &PeriodicPotential<T>, angle: &RationalAngle, x: Point<T>) -> T {
    v.evaluate(angle.unrotate(x))
}

/// `W_t(x)`: `V_theta(x)` for `x1 <= 0` and `V_theta(x - t e1)` for `x1 > 0`.
pub fn evaluate_dislocated<T: Scalar>(v: &PeriodicPotential<T>, angle: &RationalAngle, t: T, x: Point<T>) -> T {
    if x[0] <= T::zero() {
        evaluate_rotated(v, angle, x)
    } else {
        evaluate_rotated(v, angle, [x[0] - t, x[1]])
    }
}

/// Builds the potential described by `spec`.
pub fn make_potential<T: Scalar>(spec: &PotentialSpec) -> Result<PeriodicPotential<T>> {
    let mut coeffs: BTreeMap<(i64, i64), Complex<T>> = BTreeMap::new();
    let mut put = |g: (i64, i64), re: f64, im: f64| {
        let e = coeffs.entry(g).or_insert(Complex::new(T::zero(), T::zero()));
        *e += Complex::new(T::lit(re), T::lit(im));
    };
    let (sup, nu, scan) = match spec {
        PotentialSpec::Zero => (0.0, 0.0, false),
        &PotentialSpec::Cosine2d { amplitude: v } => {
            for g in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                put(g, v / 2.0, 0.0);
            }
            (2.0 * v.abs(), 2.0 * PI * 2f64.sqrt() * v.abs(), false)
        }
        &PotentialSpec::GaussianBumps { depth, width } => {
            if !(width > 0.0) || !depth.is_finite() {
                return Err(Error::InvalidArgument { field: "width", reason: "must be positive and finite".into() });
            }
            // Poisson summation: V_G = depth 2 pi w^2 exp(-2 pi^2 w^2 |G|^2).
            let scale = depth * 2.0 * PI * width * width;
            let decay = 2.0 * PI * PI * width * width;
            let cutoff = ((-(1e-16f64).ln()) / decay).sqrt().ceil() as i64;
            for g1 in -cutoff..=cutoff {
                for g2 in -cutoff..=cutoff {
                    let amp = scale * (-decay * (g1 * g1 + g2 * g2) as f64).exp();
                    if amp.abs() > 1e-16 * scale.abs() {
                        put((g1, g2), amp, 0.0);
                    }
                }
            }
            let (s, n) = gaussian_bounds(depth, width);
            (s, n, false)
        }
        PotentialSpec::Fourier { coefficients } => {
            for c in coefficients {
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(Error::InvalidArgument { field: "coefficients", reason: "non-finite amplitude".into() });
                }
                put((c.g1, c.g2), c.re, c.im);
            }
            (0.0, 0.0, true)
        }
    };
    coeffs.retain(|_, c| c.re != T::zero() || c.im != T::zero());
    let scale = coeffs.values().map(|c| c.norm_sqr().sqrt()).fold(T::zero(), |a, b| a.max(b));
    let tol = scale * T::lit(1e-12);
    for (&(g1, g2), c) in &coeffs {
        let partner = coeffs.get(&(-g1, -g2)).copied().unwrap_or(Complex::new(T::zero(), T::zero()));
        if (partner - c.conj()).norm_sqr().sqrt() > tol {
            return Err(Error::NonHermitianCoefficients { g1, g2 });
        }
    }
    let mut v = PeriodicPotential { coeffs, sup_norm: T::lit(sup), lipschitz_nu: T::lit(nu), spec: spec.clone() };
    if scan {
        let (s, n) = grid_scan(&v, 512);
        v.sup_norm = s * T::lit(1.05);
        v.lipschitz_nu = n * T::lit(1.05);
    }
    Ok(v)
}

/// Maximum of `|V|` and `|grad V|` over an `n x n` grid of the unit cell.
pub fn grid_scan<T: Scalar>(v: &PeriodicPotential<T>, n: usize) -> (T, T) {
    let mut sup = T::zero();
    let mut nu = T::zero();
    let step = T::one() / T::from_usize_lossy(n);
    for i in 0..n {
        for j in 0..n {
            let x = [T::from_usize_lossy(i) * step, T::from_usize_lossy(j) * step];
            sup = sup.max(v.evaluate(x).abs());
            let g = v.gradient(x);
            nu = nu.max((g[0] * g[0] + g[1] * g[1]).sqrt());
        }
    }
    (sup, nu)
}

/// Bounds for a lattice of Gaussians from the real-space lattice sum.
///
/// The sup is attained at a bump center or at the cell center. The gradient
/// maximum is located by a fine search over the triangle `0 <= y <= x <= 1/2`,
/// which holds a representative of every point by the square symmetry.
fn gaussian_bounds(depth: f64, width: f64) -> (f64, f64) {
    let reach = (8.0 * width).ceil() as i64 + 1;
    let field = |x: f64, y: f64| -> (f64, f64, f64) {
        let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
        for m1 in -reach..=reach {
            for m2 in -reach..=reach {
                let (dx, dy) = (x - m1 as f64, y - m2 as f64);
                let e = depth * (-(dx * dx + dy * dy) / (2.0 * width * width)).exp();
                v += e;
                gx -= e * dx / (width * width);
                gy -= e * dy / (width * width);
            }
        }
        (v, gx, gy)
    };
    let sup = field(0.0, 0.0).0.abs().max(field(0.5, 0.5).0.abs());
    let grad = |x: f64, y: f64| {
        let (_, gx, gy) = field(x, y);
        gx.hypot(gy)
    };
    let n = 400;
    let step = 0.5 / n as f64;
    let mut best = (0.0, 0.0, 0.0);
    for i in 0..=n {
        for j in 0..=i {
            let (x, y) = (i as f64 * step, j as f64 * step);
            let g = grad(x, y);
            if g > best.0 {
                best = (g, x, y);
            }
        }
    }
    // Local pattern search around the best sample.
    let (mut g, mut x, mut y) = best;
    let mut d = step;
    for _ in 0..60 {
        let mut moved = false;
        for (a, b) in [(d, 0.0), (-d, 0.0), (0.0, d), (0.0, -d)] {
            let g2 = grad(x + a, y + b);
            if g2 > g {
                (g, x, y) = (g2, x + a, y + b);
                moved = true;
            }
        }
        if !moved {
            d /= 2.0;
        }
    }
    (sup, g)
}
