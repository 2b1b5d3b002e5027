//! Run configuration, read from TOML with every field defaulted.

use bandcut::convergents::GOLDEN_RATIO;
use bandcut::{make_potential, Boundary, PotentialSpec, RationalAngle, Slope};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    /// `(p, q)` with `tan theta = p / q`, used by every command except `fill`.
    pub angle: [i64; 2],
    /// Slope for `fill`, as a decimal or `p/q`.
    pub alpha: String,
    pub n_convergents: usize,
    pub gap: GapSelection,
    pub discretization: Discretization,
    pub sweep: Sweep,
    pub output_dir: PathBuf,
    pub cache: bool,
}

/// Which bulk gap of the unrotated lattice to work in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum GapSelection {
    /// The `index`-th gap above the bottom of the spectrum, counting from 1.
    Auto { index: usize },
    Explicit { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Discretization {
    /// Plane-wave cutoff of the bulk solver.
    pub cutoff: usize,
    /// Bloch grid points per direction.
    pub grid_size: usize,
    pub n_bands: usize,
    /// Target grid spacing of fibers; the actual spacing divides `L`.
    pub h: f64,
    /// Tube half-length `X` in periods `L`.
    pub periods: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub k: f64,
    pub t: f64,
    pub k_samples: usize,
    pub t_samples: usize,
    pub boundary: Boundary,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: PotentialSpec::Cosine2d { amplitude: 30.0 },
            angle: [0, 1],
            alpha: GOLDEN_RATIO.to_string(),
            n_convergents: 4,
            gap: GapSelection::Auto { index: 1 },
            discretization: Discretization::default(),
            sweep: Sweep::default(),
            output_dir: PathBuf::from("bandcut-out"),
            cache: true,
        }
    }
}

impl Default for Discretization {
    fn default() -> Self {
        Self { cutoff: 6, grid_size: 12, n_bands: 6, h: 1.0 / 16.0, periods: 6 }
    }
}

impl Default for Sweep {
    fn default() -> Self {
        Self { k: 0.0, t: 0.0, k_samples: 8, t_samples: 16, boundary: Boundary::Dislocated }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn angle(&self) -> bandcut::Result<RationalAngle> {
        RationalAngle::new(self.angle[0], self.angle[1])
    }

    pub fn slope(&self) -> bandcut::Result<Slope> {
        self.alpha.parse()
    }

    /// Every violated field, in declaration order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |field: &str, reason: String| out.push(Violation { field: field.to_string(), reason });
        if let Err(e) = make_potential::<f64>(&self.potential) {
            bad("potential", e.to_string());
        }
        if let Err(e) = self.angle() {
            bad("angle", e.to_string());
        }
        if let Err(e) = self.slope() {
            bad("alpha", e.to_string());
        }
        if self.n_convergents == 0 {
            bad("n_convergents", "must be at least 1".into());
        }
        match self.gap {
            GapSelection::Auto { index } if index == 0 => bad("gap.index", "gaps are counted from 1".into()),
            GapSelection::Explicit { a, b } if !(a.is_finite() && b.is_finite() && a < b) => {
                bad("gap", format!("({a}, {b}) is not a finite interval with a < b"))
            }
            _ => {}
        }
        let d = &self.discretization;
        if d.cutoff == 0 {
            bad("discretization.cutoff", "must be at least 1".into());
        }
        if d.grid_size == 0 {
            bad("discretization.grid_size", "must be at least 1".into());
        }
        if d.n_bands < 2 {
            bad("discretization.n_bands", "must be at least 2 to bound a gap".into());
        }
        if !(d.h > 0.0 && d.h <= 0.25) {
            bad("discretization.h", format!("{} outside (0, 1/4]", d.h));
        }
        if d.periods < 5 {
            bad("discretization.periods", "X must be at least 5 periods".into());
        }
        let s = &self.sweep;
        if !s.t.is_finite() {
            bad("sweep.t", "must be finite".into());
        }
        if let Ok(angle) = self.angle() {
            let kmax = std::f64::consts::PI / angle.length::<f64>();
            if !(s.k.abs() <= kmax) {
                bad("sweep.k", format!("{} outside [-pi/L, pi/L] = [-{kmax}, {kmax}]", s.k));
            }
        }
        if s.k_samples == 0 {
            bad("sweep.k_samples", "must be at least 1".into());
        }
        if s.t_samples == 0 {
            bad("sweep.t_samples", "must be at least 1".into());
        }
        if s.boundary == Boundary::DomainWall {
            bad("sweep.boundary", "only dislocated and dirichlet fibers are supported".into());
        }
        if self.output_dir.as_os_str().is_empty() {
            bad("output_dir", "must not be empty".into());
        }
        out
    }

    /// Nodes per period for the configured `h`, rounded up to a multiple of
    /// `L^2` when that costs at most a quarter more nodes.
    pub fn points_per_period(&self, angle: &RationalAngle) -> usize {
        let l2 = angle.length_squared() as usize;
        let base = ((angle.length::<f64>() / self.discretization.h).ceil() as usize).max(16);
        let aligned = base.div_ceil(l2) * l2;
        if aligned * 4 <= base * 5 {
            aligned
        } else {
            base
        }
    }
}
