//! Subcommand implementations. Each returns the text to write so the binary
//! stays a thin shell and everything here is testable in-process.

use std::f64::consts::PI;
use std::path::Path;

use optosqueeze_core::analysis::{
    fit_detuning, fit_shot_noise_slope, min_uncertainty_product, noise_floors, squeezing_minimum, NoiseFloors,
    SqueezingReport,
};
use optosqueeze_core::detection::compose_efficiency;
use optosqueeze_core::effective::cooperativity;
use optosqueeze_core::oracle::{oracle_spectrum, stability_margin};
use optosqueeze_core::spectrum::linspace;
use optosqueeze_core::units::{deg_to_rad, hz_to_rad, rad_to_deg, rad_to_hz, to_db};
use optosqueeze_core::{
    output_quadrature_spectrum, rpsn_thermal_ratio, total_detected_spectrum, ModelError, QuadratureSpectrum,
    SystemParams,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, Scenario, SCHEMA_VERSION};
use crate::error::CliError;
use crate::table::{fmt_num, header_comments, write_csv, Table};

/// Oracle-check failure threshold on the relative deviation.
pub const ORACLE_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    /// Signal detuning, Hz.
    Detuning,
    /// Homodyne quadrature angle, degrees.
    Phi,
    /// Intracavity photon number.
    Power,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Axis::Detuning => "detuning_hz",
            Axis::Phi => "phi_deg",
            Axis::Power => "nbar",
        }
    }

    fn apply(self, cfg: &RunConfig, value: f64) -> RunConfig {
        match self {
            Axis::Detuning => cfg.with_detuning_hz(value),
            Axis::Phi => cfg.with_phi_deg(value),
            Axis::Power => cfg.with_nbar(value),
        }
    }
}

/// Values along a sweep axis, in increasing order.
#[derive(Debug, Clone, Copy)]
pub struct AxisRange {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl AxisRange {
    fn values(&self, cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
        if !self.from.is_finite() || !self.to.is_finite() {
            return Err(CliError::Usage("--from and --to must be finite".into()));
        }
        if self.points == 0 {
            return Err(CliError::Usage("--points must be at least 1".into()));
        }
        if self.points > 1 && self.from == self.to {
            return Err(CliError::Usage("--from equals --to but --points > 1".into()));
        }
        if self.axis == Axis::Phi && !cfg.detection.homodyne {
            return Err(CliError::Usage("a quadrature sweep needs homodyne detection".into()));
        }
        let (lo, hi) = if self.from <= self.to {
            (self.from, self.to)
        } else {
            (self.to, self.from)
        };
        Ok(linspace(lo, hi, self.points))
    }
}

fn ensure_stable(params: &SystemParams) -> Result<(), ModelError> {
    let margin = stability_margin(params)?;
    if margin > 0.0 {
        Ok(())
    } else {
        Err(ModelError::Unstable { gamma_eff: 2.0 * margin })
    }
}

fn detected(s: &Scenario, omega: f64) -> Result<f64, ModelError> {
    total_detected_spectrum(omega, &s.params, &s.chain, &s.noise)
}

fn db_or_null(v: f64) -> Option<f64> {
    (v > 0.0).then(|| to_db(v))
}

#[derive(Serialize)]
struct SpectrumRow {
    frequency_hz: f64,
    value_shot_units: f64,
    value_db: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumJson<'a, R> {
    schema_version: u32,
    command: &'a str,
    config_sha256: String,
    description: Option<&'a str>,
    rows: Vec<R>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Detected spectrum over the config's frequency grid.
pub fn spectrum(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let s = cfg.scenario()?;
    ensure_stable(&s.params)?;
    let freqs = cfg.frequencies()?;
    let spec = QuadratureSpectrum::evaluate(freqs, vec![s.chain.measured_phi()], |w, _| detected(&s, w))?;
    let rows = spec.frequencies().iter().zip(spec.values());
    Ok(match format {
        Format::Csv => write_csv(
            &header_comments("spectrum", Some(&cfg.hash()), &[]),
            &["frequency_hz", "value_shot_units", "value_db"],
            &rows
                .map(|(&w, &v)| vec![fmt_num(rad_to_hz(w)), fmt_num(v), db_or_null(v).map_or(String::new(), fmt_num)])
                .collect::<Vec<_>>(),
        ),
        Format::Json => to_json(&SpectrumJson {
            schema_version: SCHEMA_VERSION,
            command: "spectrum",
            config_sha256: cfg.hash(),
            description: cfg.description.as_deref(),
            rows: rows
                .map(|(&w, &v)| SpectrumRow {
                    frequency_hz: rad_to_hz(w),
                    value_shot_units: v,
                    value_db: db_or_null(v),
                })
                .collect(),
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Unstable,
    Singular,
    Invalid,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Unstable => "unstable",
            Status::Singular => "singular",
            Status::Invalid => "invalid",
        }
    }
}

fn classify(e: &CliError) -> Status {
    match e {
        CliError::Model(ModelError::Singular { .. }) => Status::Singular,
        CliError::Model(ModelError::Unstable { .. }) => Status::Unstable,
        _ => Status::Invalid,
    }
}

/// Detected values on the frequency grid at one axis value, or why not.
fn sweep_point(cfg: &RunConfig, freqs: &[f64]) -> Result<Vec<f64>, CliError> {
    let s = cfg.scenario()?;
    ensure_stable(&s.params)?;
    Ok(freqs.iter().map(|&w| detected(&s, w)).collect::<Result<Vec<_>, _>>()?)
}

#[derive(Serialize)]
struct SweepRow {
    axis_value: f64,
    frequency_hz: f64,
    value_shot_units: Option<f64>,
    value_db: Option<f64>,
    status: Status,
}

/// Long-format sweep: one row per (axis value, frequency).
pub fn sweep(cfg: &RunConfig, range: AxisRange, format: Format) -> Result<String, CliError> {
    let freqs = cfg.frequencies()?;
    let values = range.values(cfg)?;
    let results: Vec<(f64, Result<Vec<f64>, Status>)> = values
        .par_iter()
        .map(|&v| {
            let point = sweep_point(&range.axis.apply(cfg, v), &freqs).map_err(|e| classify(&e));
            (v, point)
        })
        .collect();

    let mut rows = Vec::with_capacity(values.len() * freqs.len());
    for (v, res) in &results {
        for (k, &w) in freqs.iter().enumerate() {
            let (value, status) = match res {
                Ok(vals) => (Some(vals[k]), Status::Ok),
                Err(st) => (None, *st),
            };
            rows.push(SweepRow {
                axis_value: *v,
                frequency_hz: rad_to_hz(w),
                value_shot_units: value,
                value_db: value.and_then(db_or_null),
                status,
            });
        }
    }
    let axis_name = range.axis.column();
    Ok(match format {
        Format::Csv => write_csv(
            &header_comments("sweep", Some(&cfg.hash()), &[("axis", axis_name.to_string())]),
            &[axis_name, "frequency_hz", "value_shot_units", "value_db", "status"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_num(r.axis_value),
                        fmt_num(r.frequency_hz),
                        r.value_shot_units.map_or(String::new(), fmt_num),
                        r.value_db.map_or(String::new(), fmt_num),
                        r.status.as_str().to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => to_json(&SpectrumJson {
            schema_version: SCHEMA_VERSION,
            command: "sweep",
            config_sha256: cfg.hash(),
            description: cfg.description.as_deref(),
            rows,
        }),
    })
}

#[derive(Debug, Serialize)]
pub struct ContourJson {
    pub frequency_hz: f64,
    pub phi_deg: f64,
}

#[derive(Debug, Serialize)]
pub struct UncertaintyJson {
    pub min_product: f64,
    pub min_product_frequency_hz: f64,
    pub max_product: f64,
    pub max_product_frequency_hz: f64,
}

#[derive(Debug, Serialize)]
pub struct ModelJson {
    pub cooperativity: f64,
    /// RPSN-to-thermal ratio from the bare mechanics, when it has a bath.
    pub r_ratio: Option<f64>,
    /// The same ratio from the effective (damping-beam dressed) mechanics.
    pub r_ratio_effective: Option<f64>,
    pub floors: Option<NoiseFloors>,
    pub overall_efficiency: f64,
    pub external_efficiency: f64,
    pub mechanics_freq_hz: f64,
    pub mechanics_gamma_hz: f64,
    pub mechanics_n_th: f64,
    pub uncertainty: Option<UncertaintyJson>,
}

#[derive(Debug, Serialize)]
pub struct AxisPointJson {
    pub value: f64,
    pub status: Status,
    pub s_min: Option<f64>,
    pub omega_opt_hz: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct AxisJson {
    pub name: &'static str,
    pub best_value: f64,
    pub points: Vec<AxisPointJson>,
}

#[derive(Debug, Serialize)]
pub struct AnalysisJson {
    pub schema_version: u32,
    pub command: &'static str,
    pub config_sha256: Option<String>,
    pub s_min: f64,
    pub s_min_db: f64,
    pub squeezed: bool,
    pub omega_opt_hz: f64,
    pub phi_opt_deg: f64,
    pub contour: Vec<ContourJson>,
    pub model: Option<ModelJson>,
    pub axis: Option<AxisJson>,
}

/// Detected map over the config grid: one row per quadrature angle.
fn config_map(cfg: &RunConfig) -> Result<QuadratureSpectrum, CliError> {
    let freqs = cfg.frequencies()?;
    let s = cfg.scenario()?;
    ensure_stable(&s.params)?;
    match cfg.phis_deg() {
        None => Ok(QuadratureSpectrum::evaluate(freqs, vec![s.chain.measured_phi()], |w, _| detected(&s, w))?),
        Some(phis_deg) => {
            let scenarios = phis_deg
                .iter()
                .map(|&p| cfg.with_phi_deg(p).scenario())
                .collect::<Result<Vec<_>, _>>()?;
            let phis: Vec<f64> = phis_deg.iter().map(|&p| deg_to_rad(p)).collect();
            Ok(QuadratureSpectrum::evaluate(freqs, phis.clone(), |w, phi| {
                let i = phis.iter().position(|&p| p == phi).expect("angle from grid");
                detected(&scenarios[i], w)
            })?)
        }
    }
}

/// Reads a spectrum CSV (`frequency_hz`, `value_shot_units`, optional
/// `phi_deg`) into a rectangular grid. Missing grid cells become NaN.
pub fn read_spectrum(path: &Path) -> Result<QuadratureSpectrum, CliError> {
    let t = Table::read(path, &["frequency_hz", "value_shot_units"], &["phi_deg"], &["value_shot_units"])?;
    spectrum_from_table(&t, &path.display().to_string())
}

fn sorted_unique(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

fn spectrum_from_table(t: &Table, origin: &str) -> Result<QuadratureSpectrum, CliError> {
    let f = t.column("frequency_hz").expect("required column");
    let v = t.column("value_shot_units").expect("required column");
    let zeros = vec![0.0; t.len()];
    let p = t.column("phi_deg").unwrap_or(&zeros);
    let freqs = sorted_unique(f);
    let phis = sorted_unique(p);
    let mut values = vec![f64::NAN; freqs.len() * phis.len()];
    let mut filled = vec![false; values.len()];
    for k in 0..t.len() {
        let i_f = freqs.binary_search_by(|x| x.total_cmp(&f[k])).expect("value from column");
        let i_p = phis.binary_search_by(|x| x.total_cmp(&p[k])).expect("value from column");
        let idx = i_p * freqs.len() + i_f;
        if filled[idx] {
            return Err(CliError::Usage(format!(
                "{origin}: duplicate point at {} Hz, {} deg",
                f[k], p[k]
            )));
        }
        filled[idx] = true;
        values[idx] = v[k];
    }
    Ok(QuadratureSpectrum::new(
        freqs.into_iter().map(hz_to_rad).collect(),
        phis.into_iter().map(deg_to_rad).collect(),
        values,
    )?)
}

fn squeezing_fields(r: &SqueezingReport) -> (Vec<ContourJson>, f64, f64) {
    let contour = r
        .contour
        .iter()
        .map(|c| ContourJson {
            frequency_hz: rad_to_hz(c.omega),
            phi_deg: rad_to_deg(c.phi),
        })
        .collect();
    (contour, rad_to_hz(r.omega_opt), rad_to_deg(r.phi_opt))
}

fn model_summary(cfg: &RunConfig) -> Result<ModelJson, CliError> {
    let s = cfg.scenario()?;
    let p = &s.params;
    let bare_params = SystemParams::new(p.cavity, s.bare, p.coupling);
    let r_ratio = (s.bare.n_th() > 0.0)
        .then(|| rpsn_thermal_ratio(&bare_params, s.bare.n_th()))
        .transpose()?;
    let r_ratio_effective = (p.mechanics.n_th() > 0.0)
        .then(|| rpsn_thermal_ratio(p, p.mechanics.n_th()))
        .transpose()?;
    let floors = if p.mechanics.n_th() > 0.0 && p.cavity.nbar() > 0.0 && p.coupling.g() > 0.0 {
        Some(noise_floors(p, &s.chain)?)
    } else {
        None
    };
    let uncertainty = match cfg.grid {
        Some(_) if ensure_stable(p).is_ok() => {
            let freqs = cfg.frequencies()?;
            let products = freqs
                .par_iter()
                .map(|&w| min_uncertainty_product(w, p, &s.chain).map(|(v, _)| (w, v)))
                .collect::<Result<Vec<_>, _>>()?;
            let lo = products.iter().fold(products[0], |b, &x| if x.1 < b.1 { x } else { b });
            let hi = products.iter().fold(products[0], |b, &x| if x.1 > b.1 { x } else { b });
            Some(UncertaintyJson {
                min_product: lo.1,
                min_product_frequency_hz: rad_to_hz(lo.0),
                max_product: hi.1,
                max_product_frequency_hz: rad_to_hz(hi.0),
            })
        }
        _ => None,
    };
    Ok(ModelJson {
        cooperativity: cooperativity(p),
        r_ratio,
        r_ratio_effective,
        floors,
        overall_efficiency: compose_efficiency(&s.chain),
        external_efficiency: s.chain.external_efficiency(),
        mechanics_freq_hz: rad_to_hz(p.mechanics.omega_m()),
        mechanics_gamma_hz: rad_to_hz(p.mechanics.gamma()),
        mechanics_n_th: p.mechanics.n_th(),
        uncertainty,
    })
}

/// Squeezing report for a measured spectrum, a configured model, or both.
///
/// With an axis range the model is re-evaluated at every axis value and the
/// report describes the deepest minimum found.
pub fn analyze(cfg: Option<&RunConfig>, input: Option<&Path>, range: Option<AxisRange>) -> Result<String, CliError> {
    let (report, axis, best_cfg) = match (input, range) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--axis cannot be combined with --input".into())),
        (Some(path), None) => (squeezing_minimum(&read_spectrum(path)?)?, None, cfg.cloned()),
        (None, None) => {
            let cfg = cfg.ok_or_else(|| CliError::Usage("analyze needs --config or --input".into()))?;
            (squeezing_minimum(&config_map(cfg)?)?, None, Some(cfg.clone()))
        }
        (None, Some(range)) => {
            let cfg = cfg.ok_or_else(|| CliError::Usage("--axis needs --config".into()))?;
            let values = range.values(cfg)?;
            let results: Vec<_> = values
                .par_iter()
                .map(|&v| {
                    let c = range.axis.apply(cfg, v);
                    let r = config_map(&c).and_then(|m| Ok(squeezing_minimum(&m)?));
                    (v, c, r)
                })
                .collect();
            let mut best: Option<(f64, RunConfig, SqueezingReport)> = None;
            let mut points = Vec::new();
            for (v, c, r) in results {
                match r {
                    Ok(rep) => {
                        points.push(AxisPointJson {
                            value: v,
                            status: Status::Ok,
                            s_min: Some(rep.s_min),
                            omega_opt_hz: Some(rad_to_hz(rep.omega_opt)),
                        });
                        if best.as_ref().is_none_or(|b| rep.s_min < b.2.s_min) {
                            best = Some((v, c, rep));
                        }
                    }
                    Err(e) => points.push(AxisPointJson {
                        value: v,
                        status: classify(&e),
                        s_min: None,
                        omega_opt_hz: None,
                    }),
                }
            }
            let (bv, bc, rep) = best.ok_or_else(|| CliError::Usage("no usable point along the axis".into()))?;
            let axis = AxisJson {
                name: range.axis.column(),
                best_value: bv,
                points,
            };
            (rep, Some(axis), Some(bc))
        }
    };
    let (contour, f_opt, phi_opt) = squeezing_fields(&report);
    let model = best_cfg.as_ref().map(model_summary).transpose()?;
    Ok(to_json(&AnalysisJson {
        schema_version: SCHEMA_VERSION,
        command: "analyze",
        config_sha256: cfg.map(RunConfig::hash),
        s_min: report.s_min,
        s_min_db: report.s_min_db,
        squeezed: report.is_squeezed(),
        omega_opt_hz: f_opt,
        phi_opt_deg: phi_opt,
        contour,
        model,
        axis,
    }))
}

#[derive(Debug, Serialize)]
struct FitJson {
    schema_version: u32,
    command: &'static str,
    config_sha256: String,
    detuning_hz: f64,
    detuning_over_kappa: f64,
    residual: f64,
    points: usize,
}

/// Calibrates the signal detuning against a measured single-quadrature
/// spectrum (`frequency_hz`, `value_shot_units`). The config's own detuning
/// is ignored; classical noise is not part of the fit model.
pub fn fit(cfg: &RunConfig, input: &Path) -> Result<String, CliError> {
    let s = cfg.scenario()?;
    let t = Table::read(input, &["frequency_hz", "value_shot_units"], &[], &[])?;
    let f = t.column("frequency_hz").expect("required column");
    let v = t.column("value_shot_units").expect("required column");
    let mut pairs: Vec<(f64, f64)> = f.iter().copied().zip(v.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let measured = QuadratureSpectrum::single(
        pairs.iter().map(|p| hz_to_rad(p.0)).collect(),
        s.chain.measured_phi(),
        pairs.iter().map(|p| p.1).collect(),
    )?;
    let result = fit_detuning(&measured, &s.params, &s.chain)?;
    Ok(to_json(&FitJson {
        schema_version: SCHEMA_VERSION,
        command: "fit",
        config_sha256: cfg.hash(),
        detuning_hz: rad_to_hz(result.detuning),
        detuning_over_kappa: result.detuning / s.params.cavity.kappa(),
        residual: result.residual,
        points: result.points,
    }))
}

#[derive(Debug, Serialize)]
struct CalibrationJson {
    schema_version: u32,
    command: &'static str,
    slope_a2_per_hz_per_a: f64,
    slope_stderr: f64,
    intercept_a2_per_hz: f64,
    intercept_stderr: f64,
    ratio_to_2qe: f64,
    points: usize,
}

/// Shot-noise slope of detector noise (`psd_a2_per_hz`) against DC
/// photocurrent (`photocurrent_a`).
pub fn calibrate(input: &Path) -> Result<String, CliError> {
    let t = Table::read(input, &["photocurrent_a", "psd_a2_per_hz"], &[], &[])?;
    let x = t.column("photocurrent_a").expect("required column");
    let y = t.column("psd_a2_per_hz").expect("required column");
    let pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    let fit = fit_shot_noise_slope(&pts)?;
    Ok(to_json(&CalibrationJson {
        schema_version: SCHEMA_VERSION,
        command: "calibrate",
        slope_a2_per_hz_per_a: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept_a2_per_hz: fit.intercept,
        intercept_stderr: fit.intercept_stderr,
        ratio_to_2qe: fit.ratio_to_shot,
        points: fit.points,
    }))
}

#[derive(Debug, Serialize)]
pub struct OracleJson {
    pub schema_version: u32,
    pub command: &'static str,
    pub config_sha256: String,
    pub samples: usize,
    pub max_relative_deviation: f64,
    pub worst_frequency_hz: f64,
    pub worst_phi_deg: f64,
    pub max_condition_number: f64,
    pub max_relative_imag_residue: f64,
    pub warnings: Vec<String>,
    pub limit: f64,
    pub passed: bool,
}

/// Compares the closed-form output spectrum with the numerical solve at up
/// to `samples` grid frequencies and every configured quadrature (eight
/// evenly spaced angles if the config has none).
pub fn oracle_check(cfg: &RunConfig, samples: usize) -> Result<(String, OracleJson), CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let s = cfg.scenario()?;
    ensure_stable(&s.params)?;
    let all = cfg.frequencies()?;
    let freqs: Vec<f64> = if all.len() <= samples {
        all
    } else if samples == 1 {
        vec![all[0]]
    } else {
        (0..samples)
            .map(|k| all[k * (all.len() - 1) / (samples - 1)])
            .collect()
    };
    let phis: Vec<f64> = match cfg.phis_deg() {
        Some(p) => p.into_iter().map(deg_to_rad).collect(),
        None => (0..8).map(|k| k as f64 * PI / 8.0).collect(),
    };
    let pts: Vec<(f64, f64)> = freqs
        .iter()
        .flat_map(|&w| phis.iter().map(move |&p| (w, p)))
        .collect();
    let results = pts
        .par_iter()
        .map(|&(w, phi)| {
            let closed = output_quadrature_spectrum(w, phi, &s.params)?;
            let o = oracle_spectrum(w, phi, &s.params)?;
            Ok((w, phi, (closed - o.value).abs() / o.value, o))
        })
        .collect::<Result<Vec<_>, ModelError>>()?;

    let mut worst = (0.0, freqs[0], phis[0]);
    let mut max_cond = 0.0f64;
    let mut max_imag = 0.0f64;
    let mut warnings = Vec::new();
    for (w, phi, dev, o) in &results {
        if *dev > worst.0 {
            worst = (*dev, *w, *phi);
        }
        max_cond = max_cond.max(o.condition);
        max_imag = max_imag.max(o.imag_residue.abs() / o.value);
        if let Some(msg) = &o.warning {
            warnings.push(msg.clone());
        }
    }
    warnings.dedup();
    let report = OracleJson {
        schema_version: SCHEMA_VERSION,
        command: "oracle-check",
        config_sha256: cfg.hash(),
        samples: results.len(),
        max_relative_deviation: worst.0,
        worst_frequency_hz: rad_to_hz(worst.1),
        worst_phi_deg: rad_to_deg(worst.2),
        max_condition_number: max_cond,
        max_relative_imag_residue: max_imag,
        warnings,
        limit: ORACLE_LIMIT,
        passed: worst.0 <= ORACLE_LIMIT,
    };
    Ok((to_json(&report), report))
}
