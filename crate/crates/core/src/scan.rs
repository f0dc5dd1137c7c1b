//! Scans over the particle number: the three estimation strategies, the
//! classical information of both realistic measurements, validation suites
//! and CSV/JSON reports.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{self, Backend, Povm};
use crate::engine::{self, PovmFamily};
use crate::error::{Error, Result};
use crate::hamiltonian::{FieldParams, GeneratorSet};
use crate::probe::{default_probe_phases, dense_statevector, probe_rdm2, triple_ghz_probe};
use crate::qfim::{self, FisherMatrix};
use crate::tolerances::{dense_cap, PHI_DEFAULT, PHI_LIMIT};

/// Particle numbers scanned by default; each is divisible by 24.
pub const DEFAULT_N_GRID: [usize; 6] = [24, 48, 96, 192, 384, 768];

/// Registers on which [`validate`] always runs.
pub const VALIDATION_SIZES: [usize; 2] = [8, 12];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub phi: [f64; 3],
    pub n_values: Vec<usize>,
    pub povm_families: Vec<PovmFamily>,
    /// GHZ projector phases; `None` searches the phase grid.
    pub deltas: Option<[f64; 3]>,
    pub backend: Backend,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            phi: PHI_DEFAULT,
            n_values: DEFAULT_N_GRID.to_vec(),
            povm_families: vec![PovmFamily::GhzProjectors, PovmFamily::PauliStrings],
            deltas: None,
            backend: Backend::Auto,
            output_path: None,
            format: ReportFormat::Csv,
        }
    }
}

impl ScanConfig {
    pub fn check(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::Config("no particle numbers given".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 3) {
            return Err(Error::Config(format!("N must be at least 3, got {n}")));
        }
        if !self.phi.iter().all(|p| p.is_finite()) {
            return Err(Error::Config("field components must be finite".into()));
        }
        if self.backend == Backend::Dense {
            let max = *self.n_values.iter().max().expect("nonempty");
            let cap = dense_cap();
            if max > cap {
                return Err(Error::Config(format!(
                    "dense backend requested for N = {max} above the cap {cap}"
                )));
            }
        }
        Ok(())
    }

    /// Field at which classical information is evaluated; an exactly
    /// vanishing field is replaced by the small symmetric offset.
    fn fim_params(&self) -> Result<FieldParams> {
        if self.phi == [0.0; 3] {
            FieldParams::new(PHI_LIMIT)
        } else {
            FieldParams::new(self.phi)
        }
    }
}

/// Total variances at one particle number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRecord {
    pub n: usize,
    pub var_sep_ind: Option<f64>,
    pub var_ent_ind: Option<f64>,
    pub var_ent_sim: Option<f64>,
    pub var_fim_povm1: Option<f64>,
    pub var_fim_povm2: Option<f64>,
    /// The probe marginals are exactly maximally mixed (`N ≡ 0 mod 8`).
    pub exact: bool,
    pub error: Option<String>,
}

impl ScenarioRecord {
    /// `sim ≤ ind-ent ≤ sep`, when all three are present.
    pub fn ordering_holds(&self) -> bool {
        match (self.var_ent_sim, self.var_ent_ind, self.var_sep_ind) {
            (Some(a), Some(b), Some(c)) => a <= b && b <= c,
            _ => true,
        }
    }
}

/// Probe, measurement and evaluation for one family at one `N`.
pub fn fim_for_family(
    n_sites: usize,
    params: &FieldParams,
    family: PovmFamily,
    deltas: Option<[f64; 3]>,
    backend: Backend,
) -> Result<classical::ClassicalFim> {
    let probe = triple_ghz_probe(n_sites, default_probe_phases(n_sites))?;
    let povm = family_povm(n_sites, family, deltas)?;
    let (p, g) = classical::evaluate(&probe, &GeneratorSet::magnetic(), params.as_slice(), &povm, backend)?;
    Ok(classical::classical_fim(&p, &g))
}

/// The measurement of `family` at `N`, searching the GHZ phases when
/// `deltas` is `None`.
pub fn family_povm(n_sites: usize, family: PovmFamily, deltas: Option<[f64; 3]>) -> Result<Povm> {
    match (family, deltas) {
        (PovmFamily::GhzProjectors, Some(d)) => classical::povm_ghz_projectors_strict(n_sites, d),
        (PovmFamily::GhzProjectors, None) => classical::povm_ghz_projectors(n_sites, classical::default_povm_phases(n_sites)),
        (PovmFamily::PauliStrings, _) => classical::povm_pauli_strings(n_sites),
    }
}

fn scan_one(n: usize, config: &ScanConfig) -> ScenarioRecord {
    let mut rec = ScenarioRecord {
        n,
        var_sep_ind: None,
        var_ent_ind: None,
        var_ent_sim: None,
        var_fim_povm1: None,
        var_fim_povm2: None,
        exact: n % 8 == 0,
        error: None,
    };
    let mut errors = Vec::new();
    match FieldParams::new(config.phi).and_then(|p| qfim::scenario_variances(n, &p)) {
        Ok(v) => {
            rec.var_sep_ind = Some(v.sep_individual);
            rec.var_ent_ind = Some(v.ent_individual);
            rec.var_ent_sim = Some(v.ent_simultaneous);
        }
        Err(e) => errors.push(e.to_string()),
    }
    for &family in &config.povm_families {
        // the GHZ projectors exist only for even N; odd N leaves the column empty
        if family == PovmFamily::GhzProjectors && n % 2 != 0 {
            continue;
        }
        let result = config
            .fim_params()
            .and_then(|p| fim_for_family(n, &p, family, config.deltas, config.backend))
            .and_then(|f| f.total_variance());
        match (result, family) {
            (Ok(v), PovmFamily::GhzProjectors) => rec.var_fim_povm1 = Some(v),
            (Ok(v), PovmFamily::PauliStrings) => rec.var_fim_povm2 = Some(v),
            (Err(e), f) => {
                let tag = if f == PovmFamily::GhzProjectors { "povm1" } else { "povm2" };
                errors.push(format!("{tag}: {e}"));
            }
        }
    }
    if !errors.is_empty() {
        rec.error = Some(errors.join("; "));
    }
    rec
}

/// One record per `N`, computed in parallel and ordered by `N`. Per-`N`
/// failures are recorded in the row.
pub fn run_scan(config: &ScanConfig) -> Result<Vec<ScenarioRecord>> {
    config.check()?;
    let mut ns = config.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    Ok(ns.par_iter().map(|&n| scan_one(n, config)).collect())
}

/// Twelve significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub const CSV_HEADER: [&str; 8] = [
    "n",
    "var_sep_ind",
    "var_ent_ind",
    "var_ent_sim",
    "var_fim_povm1",
    "var_fim_povm2",
    "exact",
    "error",
];

pub fn render_report(records: &[ScenarioRecord], format: ReportFormat) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Config("no records to report".into()));
    }
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(CSV_HEADER).map_err(io)?;
            for r in records {
                w.write_record([
                    r.n.to_string(),
                    opt(r.var_sep_ind),
                    opt(r.var_ent_ind),
                    opt(r.var_ent_sim),
                    opt(r.var_fim_povm1),
                    opt(r.var_fim_povm2),
                    r.exact.to_string(),
                    r.error.clone().unwrap_or_default(),
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
        }
        ReportFormat::Json => {
            // values rounded exactly as in the CSV
            let round = |x: Option<f64>| x.map(|v| format_float(v).parse::<f64>().expect("formatted float"));
            let rows: Vec<ScenarioRecord> = records
                .iter()
                .map(|r| ScenarioRecord {
                    var_sep_ind: round(r.var_sep_ind),
                    var_ent_ind: round(r.var_ent_ind),
                    var_ent_sim: round(r.var_ent_sim),
                    var_fim_povm1: round(r.var_fim_povm1),
                    var_fim_povm2: round(r.var_fim_povm2),
                    ..r.clone()
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes the report to the configured path, or standard output.
pub fn emit_report(records: &[ScenarioRecord], config: &ScanConfig) -> Result<()> {
    let text = render_report(records, config.format)?;
    match &config.output_path {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn record(&mut self, name: String, result: Result<(bool, String)>) {
        let (passed, detail) = result.unwrap_or_else(|e| (false, e.to_string()));
        self.checks.push(Check { name, passed, detail });
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{tag} {}: {}", c.name, c.detail);
        }
        s
    }
}

fn route_agreement(n: usize, phi: [f64; 3]) -> Result<(bool, String)> {
    let gens = GeneratorSet::magnetic();
    let probe = triple_ghz_probe(n, default_probe_phases(n))?;
    let psi = dense_statevector(&probe)?;
    let dense = qfim::qfim_dense(&psi, &gens, &phi, n)?;
    let fd = qfim::qfim_fd_oracle(&psi, &gens, &phi, n, 1e-4)?;
    let reduced = qfim::qfim_reduced(
        &engine::single_site_marginal(&probe)?,
        &engine::two_site_marginal(&probe)?,
        &gens,
        &phi,
        n,
    )?
    .total;
    let d_fd = fd.relative_deviation(&dense);
    let d_red = reduced.relative_deviation(&dense);
    let mut ok = d_fd <= 1e-5 && d_red <= 1e-9;
    let mut detail = format!("fd {d_fd:.1e}, reduced {d_red:.1e}");
    if probe_rdm2(n)?.exact {
        let closed = qfim::qfim_closed_form(&FieldParams::new(phi)?, n)?;
        let d_cf = closed.relative_deviation(&dense);
        ok &= d_cf <= 1e-9;
        let _ = write!(detail, ", closed form {d_cf:.1e}");
    }
    Ok((ok, detail))
}

fn povm_validity(n: usize, family: PovmFamily, deltas: Option<[f64; 3]>) -> Result<(bool, String)> {
    let povm = match family_povm(n, family, deltas) {
        Ok(p) => p,
        Err(Error::InvalidPovm(msg)) => return Ok((false, msg)),
        Err(e) => return Err(e),
    };
    let c = classical::verify_dense(&povm)?;
    Ok((
        c.is_valid(1e-10),
        format!(
            "min eigenvalue {:.2e}, completeness {:.1e}, phases {:?}",
            c.min_eigenvalue,
            c.completeness_error,
            povm.deltas()
        ),
    ))
}

fn crb_and_backends(
    n: usize,
    params: &FieldParams,
    family: PovmFamily,
    deltas: Option<[f64; 3]>,
) -> Result<(bool, String)> {
    let gens = GeneratorSet::magnetic();
    let probe = triple_ghz_probe(n, default_probe_phases(n))?;
    let povm = family_povm(n, family, deltas)?;
    let phi = params.as_slice();
    let (pd, gd) = classical::evaluate(&probe, &gens, phi, &povm, Backend::Dense)?;
    let (ps, gs) = classical::evaluate(&probe, &gens, phi, &povm, Backend::Superposition)?;
    let dp = pd
        .probs()
        .iter()
        .zip(ps.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let dg = (gd.entries() - gs.entries()).amax();
    let fd = classical::classical_fim(&pd, &gd).matrix;
    let fs = classical::classical_fim(&ps, &gs).matrix;
    let dfim = fs.relative_deviation(&fd);
    let q = qfim::qfim_dense(&dense_statevector(&probe)?, &gens, phi, n)?;
    let vq = qfim::total_variance(&q)?;
    let vf = qfim::total_variance(&fd)?;
    let ok = dp <= 1e-9 && dg <= 1e-9 && dfim <= 1e-9 && vf >= vq - 1e-8;
    Ok((
        ok,
        format!("Δp {dp:.1e}, Δ∂p {dg:.1e}, ΔF {dfim:.1e}, Tr F⁻¹ {vf:.6e} ≥ Tr I⁻¹ {vq:.6e}"),
    ))
}

/// Cross-route QFIM agreement, measurement validity, Cramér-Rao ordering
/// and backend equivalence on small registers. Failures are reported, not
/// returned as errors.
pub fn validate(config: &ScanConfig) -> Result<ValidationReport> {
    if config.n_values.is_empty() {
        return Err(Error::Config("no particle numbers given".into()));
    }
    let params = config.fim_params()?;
    let mut sizes: Vec<usize> = VALIDATION_SIZES.to_vec();
    sizes.extend(config.n_values.iter().copied().filter(|&n| (3..=classical::AUTO_DENSE_MAX).contains(&n)));
    sizes.sort_unstable();
    sizes.dedup();

    let mut report = ValidationReport::default();
    for &n in &sizes {
        report.record(format!("qfim routes N={n}"), route_agreement(n, params.phi));
        for &family in &config.povm_families {
            if family == PovmFamily::GhzProjectors && n % 2 != 0 {
                continue;
            }
            let tag = match family {
                PovmFamily::GhzProjectors => "povm1",
                PovmFamily::PauliStrings => "povm2",
            };
            report.record(format!("{tag} validity N={n}"), povm_validity(n, family, config.deltas));
            report.record(
                format!("{tag} bound and backends N={n}"),
                crb_and_backends(n, &params, family, config.deltas),
            );
        }
    }
    Ok(report)
}

/// Text summary of the four QFIM routes for the probe at `N`.
pub fn qfim_summary(n: usize, phi: [f64; 3]) -> Result<String> {
    let gens = GeneratorSet::magnetic();
    let params = FieldParams::new(phi)?;
    let mut s = String::new();
    let show = |s: &mut String, name: &str, f: &FisherMatrix| {
        let _ = writeln!(s, "{name}:");
        for k in 0..f.d() {
            let row: Vec<String> = (0..f.d()).map(|l| format!("{:>16.9e}", f.get(k, l))).collect();
            let _ = writeln!(s, "  {}", row.join(" "));
        }
    };
    let closed = qfim::qfim_closed_form(&params, n)?;
    show(&mut s, "closed form", &closed);
    let probe = triple_ghz_probe(n, default_probe_phases(n))?;
    let reduced = qfim::qfim_reduced(
        &engine::single_site_marginal(&probe)?,
        &engine::two_site_marginal(&probe)?,
        &gens,
        &phi,
        n,
    )?;
    show(&mut s, "reduced", &reduced.total);
    if n <= dense_cap() {
        let psi = dense_statevector(&probe)?;
        show(&mut s, "dense", &qfim::qfim_dense(&psi, &gens, &phi, n)?);
        show(&mut s, "finite difference", &qfim::qfim_fd_oracle(&psi, &gens, &phi, n, 1e-4)?);
    }
    let _ = writeln!(
        s,
        "total variance (closed form): {}",
        format_float(qfim::total_variance(&closed)?)
    );
    Ok(s)
}

/// Text summary of the classical information of each family at `N`.
pub fn fim_summary(n: usize, config: &ScanConfig) -> Result<String> {
    let params = config.fim_params()?;
    let mut s = String::new();
    for &family in &config.povm_families {
        let f = fim_for_family(n, &params, family, config.deltas, config.backend)?;
        let _ = writeln!(
            s,
            "{family:?}: total variance {}, singular outcomes {:?}",
            format_float(f.total_variance()?),
            f.singular_outcomes
        );
    }
    Ok(s)
}

/// Validity of each configured family at `N`.
pub fn povm_check(n: usize, config: &ScanConfig) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    for &family in &config.povm_families {
        report.record(format!("{family:?} N={n}"), povm_validity(n, family, config.deltas));
    }
    Ok(report)
}
