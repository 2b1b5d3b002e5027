//! The six pipelines behind the command line.

use crate::cache::Entry;
use crate::config::{GapSelection, RunConfig};
use bandcut::bulk::{bands_below, compute_bands, find_gaps, write_bands_csv};
use bandcut::decay::{fit_in_gap_states, write_decay_csv, DecayOptions};
use bandcut::fiber::{fiber_essential_gap, solve_fiber};
use bandcut::filling::{approximant_sweep, count_check, FillOptions};
use bandcut::flow::{verify_flow_theorem, write_crossings_csv, FlowSetup};
use bandcut::{make_potential, BandStructure, FiberSpec, FiberSpectrum, Potential, RationalAngle, SpectralGap};
use clap::ValueEnum;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Bands,
    Gaps,
    Edge,
    Flow,
    Fill,
    Decay,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::Gaps => "gaps",
            Command::Edge => "edge",
            Command::Flow => "flow",
            Command::Fill => "fill",
            Command::Decay => "decay",
        }
    }
}

/// Failure of a run, rendered as `{code, message, field?}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunError {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

impl From<bandcut::Error> for RunError {
    fn from(e: bandcut::Error) -> Self {
        use bandcut::Error::*;
        let (code, field) = match &e {
            UnknownFamily(_) => ("unknown_family", Some("potential".to_string())),
            NonHermitianCoefficients { .. } => ("non_hermitian", Some("potential".to_string())),
            InvalidAngle { .. } => ("invalid_angle", Some("angle".to_string())),
            InvalidSlope(_) => ("invalid_slope", Some("alpha".to_string())),
            InvalidArgument { field, .. } => ("invalid_argument", Some(field.to_string())),
            InsufficientBands { .. } => ("insufficient_bands", Some("discretization.n_bands".to_string())),
            NotInGap { .. } => ("not_in_gap", Some("gap".to_string())),
            Grid(_) => ("grid", Some("discretization".to_string())),
            Singular(_) => ("singular", None),
            NotConverged { .. } => ("not_converged", None),
            BranchAmbiguity { .. } => ("branch_ambiguity", None),
            EnergyTooCloseToEdge { .. } => ("energy_too_close_to_edge", None),
            Decay(_) => ("decay", None),
            Io(_) => ("io", None),
            Parse(_) => ("parse", None),
        };
        RunError { code, message: e.to_string(), field }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError { code: "io", message: e.to_string(), field: None }
    }
}

type Run<T> = Result<T, RunError>;

/// Provenance written at the top of every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Header<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub cache_key: &'a str,
    #[serde(serialize_with = "serialize_provenance")]
    pub config: &'a RunConfig,
}

/// The config without where and whether results are stored, which do not
/// change any number.
fn provenance(cfg: &RunConfig) -> serde_json::Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let Some(map) = v.as_object_mut() {
        map.remove("output_dir");
        map.remove("cache");
    }
    v
}

fn serialize_provenance<S: serde::Serializer>(cfg: &&RunConfig, s: S) -> Result<S::Ok, S::Error> {
    provenance(cfg).serialize(s)
}

impl Header<'_> {
    fn csv_preamble(&self) -> String {
        let config = serde_json::to_string(&provenance(self.config)).expect("value serializes");
        format!("# {} {} {} cache_key={}\n# config {config}\n", self.tool, self.version, self.command.name(), self.cache_key)
    }
}

struct Artifacts<'a> {
    header: &'a Header<'a>,
    files: BTreeMap<String, String>,
}

impl<'a> Artifacts<'a> {
    fn new(header: &'a Header<'a>) -> Self {
        Self { header, files: BTreeMap::new() }
    }

    fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> bandcut::Result<()>) -> Run<()> {
        let mut buf = self.header.csv_preamble().into_bytes();
        write(&mut buf)?;
        self.files.insert(name.to_string(), String::from_utf8(buf).expect("csv is utf-8"));
        Ok(())
    }

    fn json<S: Serialize>(&mut self, name: &str, result: &S) -> Run<()> {
        let doc = serde_json::json!({ "header": self.header, "result": result });
        let mut text = serde_json::to_string_pretty(&doc).map_err(bandcut::Error::from)?;
        text.push('\n');
        self.files.insert(name.to_string(), text);
        Ok(())
    }

    fn finish(self, summary: String) -> Entry {
        Entry { summary, files: self.files }
    }
}

/// Runs `command` on a validated config.
pub fn run(command: Command, header: &Header) -> Run<Entry> {
    let cfg = header.config;
    let v: Potential = make_potential(&cfg.potential)?;
    let mut out = Artifacts::new(header);
    let summary = match command {
        Command::Bands => bands(cfg, &v, &mut out)?,
        Command::Gaps => gaps(cfg, &v, &mut out)?,
        Command::Edge => edge(cfg, &v, &mut out)?,
        Command::Flow => flow(cfg, &v, &mut out)?,
        Command::Fill => fill(cfg, &v, &mut out)?,
        Command::Decay => decay(cfg, &v, &mut out)?,
    };
    Ok(out.finish(summary))
}

fn band_structure(cfg: &RunConfig, v: &Potential, angle: &RationalAngle) -> Run<BandStructure> {
    let d = &cfg.discretization;
    Ok(compute_bands(v, angle, d.grid_size, d.n_bands, d.cutoff)?)
}

/// Every gap resolved by the computed bands, from the bottom of the spectrum up.
fn all_gaps(bs: &BandStructure) -> Run<Vec<SpectralGap>> {
    let top = bs.band_minimum(bs.n_bands() - 1);
    Ok(find_gaps(bs, (bs.band_minimum(0) - 1.0, top), 1e-6)?)
}

/// The selected gap of the unrotated lattice with its `N(E)`, or `None` when
/// the bands show no such gap.
fn selected_gap(cfg: &RunConfig, v: &Potential) -> Run<Option<SpectralGap>> {
    let bs = band_structure(cfg, v, &RationalAngle::UNROTATED)?;
    match cfg.gap {
        GapSelection::Auto { index } => Ok(all_gaps(&bs)?.get(index - 1).copied()),
        GapSelection::Explicit { a, b } => {
            let n_below = bands_below(&bs, (a + b) / 2.0)?;
            Ok(Some(SpectralGap { a, b, n_below }))
        }
    }
}

fn require_gap(cfg: &RunConfig, v: &Potential) -> Run<SpectralGap> {
    selected_gap(cfg, v)?.ok_or_else(|| RunError {
        code: "no_gap",
        message: "the computed bands show fewer gaps than the selected index".into(),
        field: Some("gap".into()),
    })
}

fn fiber_spec(cfg: &RunConfig, v: &Potential) -> Run<FiberSpec> {
    let angle = cfg.angle()?;
    let spec = FiberSpec::new(v.clone(), angle, cfg.sweep.boundary, cfg.points_per_period(&angle), cfg.discretization.periods)?;
    Ok(spec.with_t(cfg.sweep.t).with_k(cfg.sweep.k))
}

/// Spectrum of the configured fiber in its essential gap around the selected bulk gap.
fn edge_spectrum(cfg: &RunConfig, v: &Potential) -> Run<(FiberSpectrum, (f64, f64))> {
    let gap = require_gap(cfg, v)?;
    let spec = fiber_spec(cfg, v)?;
    let (fa, fb) = fiber_essential_gap(&spec, gap.midpoint(), 17)?.unwrap_or((gap.a, gap.b));
    let window = (if fa.is_finite() { fa } else { gap.a }, if fb.is_finite() { fb } else { gap.b });
    let mut spectrum = solve_fiber(&spec, window, 400)?;
    spectrum.classify(window);
    Ok((spectrum, window))
}

fn bands(cfg: &RunConfig, v: &Potential, out: &mut Artifacts) -> Run<String> {
    let bs = band_structure(cfg, v, &cfg.angle()?)?;
    out.csv("bands.csv", |w| write_bands_csv(&bs, w))?;
    out.json("bands.json", &bs)?;
    Ok(format!("bands: {} bands on {} k-points, lowest energy {:.6}", bs.n_bands(), bs.k_grid.len(), bs.band_minimum(0)))
}

fn gaps(cfg: &RunConfig, v: &Potential, out: &mut Artifacts) -> Run<String> {
    let angle = cfg.angle()?;
    let bs = band_structure(cfg, v, &angle)?;
    let gaps = all_gaps(&bs)?;
    out.csv("gaps.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["a", "b", "n_below"])?;
        for g in &gaps {
            c.write_record([g.a.to_string(), g.b.to_string(), g.n_below.to_string()])?;
        }
        c.flush()?;
        Ok(())
    })?;
    out.json("gaps.json", &gaps)?;
    Ok(match gaps.first() {
        None => format!("gaps: none below band {} at angle {angle}", bs.n_bands()),
        Some(g) => format!("gaps: {} found, first ({:.6}, {:.6}) with {} bands below", gaps.len(), g.a, g.b, g.n_below),
    })
}

#[derive(Serialize)]
struct EdgeSummary {
    window: (f64, f64),
    h: f64,
    x_extent: f64,
    eigenvalues: Vec<f64>,
    spurious: Vec<bool>,
    in_gap: Vec<bool>,
    truncated: bool,
}

fn edge_summary(s: &FiberSpectrum, window: (f64, f64)) -> EdgeSummary {
    EdgeSummary {
        window,
        h: s.spec.h,
        x_extent: s.spec.x_extent,
        eigenvalues: s.eigenvalues.clone(),
        spurious: s.spurious.clone(),
        in_gap: s.in_gap.clone(),
        truncated: s.truncated,
    }
}

fn edge(cfg: &RunConfig, v: &Potential, out: &mut Artifacts) -> Run<String> {
    let (spectrum, window) = edge_spectrum(cfg, v)?;
    out.csv("edge.csv", |w| spectrum.write_csv(w, true))?;
    out.json("edge.json", &edge_summary(&spectrum, window))?;
    Ok(format!(
        "edge: {} eigenvalues in ({:.6}, {:.6}), {} edge states",
        spectrum.len(),
        window.0,
        window.1,
        spectrum.in_gap_values().len()
    ))
}

fn flow(cfg: &RunConfig, v: &Potential, out: &mut Artifacts) -> Run<String> {
    let angle = cfg.angle()?;
    // The free operator has no gaps; below its spectrum there are no states to flow.
    let gap = match selected_gap(cfg, v)? {
        None if v.is_zero() => SpectralGap { a: -2.0, b: -1.0, n_below: 0 },
        _ => require_gap(cfg, v)?,
    };
    let setup = FlowSetup {
        points_per_period: cfg.points_per_period(&angle),
        periods: cfg.discretization.periods,
        ..FlowSetup::for_angle(&angle)
    };
    let (report, family) = verify_flow_theorem(v, &angle, gap, cfg.sweep.k, cfg.sweep.boundary, &setup)?;
    out.csv("branches.csv", |w| family.write_csv(w))?;
    let crossings = bandcut::FlowResult {
        flow: report.measured_flow,
        reference_energy: report.reference_energy,
        crossings: report.crossings.clone(),
        period: report.period,
    };
    out.csv("crossings.csv", |w| write_crossings_csv(&crossings, w))?;
    out.json("flow.json", &report)?;
    Ok(if family.is_empty() {
        format!("flow = {} (no gap states)", report.measured_flow)
    } else {
        format!(
            "flow = {} (expected {}, {})",
            report.measured_flow,
            report.expected_flow,
            if report.pass { "pass" } else { "FAIL" }
        )
    })
}

fn fill(cfg: &RunConfig, v: &Potential, out: &mut Artifacts) -> Run<String> {
    let gap = require_gap(cfg, v)?;
    let opts = FillOptions {
        k_samples: cfg.sweep.k_samples,
        t_samples: cfg.sweep.t_samples,
        points_per_unit_length: 1.0 / cfg.discretization.h,
        periods: cfg.discretization.periods,
        ..FillOptions::default()
    };
    let report = approximant_sweep(v, &cfg.slope()?, cfg.n_convergents, gap, &opts)?;
    out.csv("fill.csv", |w| report.write_csv(w))?;
    out.json("fill.json", &report)?;
    let checks = report.records.iter().filter(|r| count_check(r)).count();
    let last = report.records.last();
    Ok(format!(
        "fill: {} records, counting bound met in {}, last L = {:.4} with free length {:.4}",
        report.records.len(),
        checks,
        last.map_or(0.0, |r| r.length),
        last.map_or(0.0, |r| r.max_free_subinterval_length)
    ))
}

#[derive(Serialize)]
struct DecayRow {
    energy: f64,
    fit: Option<bandcut::DecayFit>,
    accepted: bool,
    error: Option<String>,
}

fn decay(cfg: &RunConfig, v: &Potential, out: &mut Artifacts) -> Run<String> {
    let (spectrum, _) = edge_spectrum(cfg, v)?;
    let fits = fit_in_gap_states(&spectrum, &DecayOptions::default())?;
    out.csv("decay.csv", |w| write_decay_csv(&fits, w))?;
    let rows: Vec<DecayRow> = fits
        .iter()
        .map(|(e, f)| DecayRow {
            energy: *e,
            fit: f.as_ref().ok().copied(),
            accepted: f.as_ref().is_ok_and(|f| f.accepted()),
            error: f.as_ref().err().map(|e| e.to_string()),
        })
        .collect();
    out.json("decay.json", &rows)?;
    let accepted: Vec<f64> = rows.iter().filter(|r| r.accepted).filter_map(|r| r.fit.map(|f| f.alpha_fit)).collect();
    let min = accepted.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if accepted.is_empty() {
        format!("decay: {} edge states, none with an accepted fit", rows.len())
    } else {
        format!("decay: {} edge states, {} accepted, smallest alpha {:.4}", rows.len(), accepted.len(), min)
    })
}
