//! Run configuration: JSON in ordinary-frequency units, validated in one pass
//! so every problem is reported at once, then converted to angular units.

use std::path::Path;

use optosqueeze_core::effective::{effective_parameters, DampingDrive};
use optosqueeze_core::spectrum::linspace;
use optosqueeze_core::units::{bose_occupation, deg_to_rad, hz_to_rad};
use optosqueeze_core::{
    ClassicalNoise, Coupling, DetectionChain, Efficiency, EfficiencyKind, MechanicalMode, ModelError,
    OpticalCavity, Scheme, SystemParams,
};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, FieldError};

pub const SCHEMA_VERSION: u32 = 1;

/// A validated configuration together with its canonical form.
#[derive(Debug, Clone)]
pub struct RunConfig {
    raw: Value,
    pub description: Option<String>,
    pub cavity: CavityCfg,
    pub mechanics: MechanicsCfg,
    pub g0_hz: f64,
    pub signal: SignalCfg,
    pub damping_beam: Option<DampingCfg>,
    pub detection: DetectionCfg,
    pub classical_noise: Option<(f64, f64)>,
    pub grid: Option<GridCfg>,
}

#[derive(Debug, Clone, Copy)]
pub struct CavityCfg {
    pub kappa_hz: f64,
    pub in_frac: f64,
    pub out_frac: f64,
    pub int_frac: f64,
}

#[derive(Debug, Clone, Copy)]
pub enum Occupation {
    TemperatureK(f64),
    Phonons(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct MechanicsCfg {
    pub freq_hz: f64,
    pub gamma_hz: f64,
    pub mass_kg: f64,
    pub occupation: Occupation,
}

#[derive(Debug, Clone, Copy)]
pub struct SignalCfg {
    pub detuning_hz: f64,
    pub nbar: f64,
}

#[derive(Debug, Clone, Copy)]
pub enum DampingCfg {
    Direct {
        freq_eff_hz: f64,
        gamma_eff_hz: f64,
        occupation: Occupation,
    },
    Computed {
        detuning_hz: f64,
        nbar: f64,
    },
}

#[derive(Debug, Clone)]
pub struct DetectionCfg {
    pub homodyne: bool,
    pub efficiencies: Vec<Efficiency>,
    pub lo_ratio: f64,
    pub phi_deg: f64,
    pub phase_offset_deg: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct GridCfg {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub points: usize,
    pub phi: Option<(f64, f64, usize)>,
}

/// Everything a command needs, in angular units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: SystemParams,
    /// Mechanics before any damping beam.
    pub bare: MechanicalMode,
    pub chain: DetectionChain,
    pub noise: ClassicalNoise,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let raw: Value = serde_json::from_str(text).map_err(|e| CliError::Json {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut v = Validator::default();
        let cfg = v.run_config(&raw);
        match cfg {
            Some(cfg) if v.errors.is_empty() => {
                let cfg = RunConfig { raw, ..cfg };
                // Surface cross-field constraints the core constructors enforce.
                cfg.scenario().map_err(|e| match e {
                    CliError::Model(m) => CliError::Config(vec![FieldError {
                        path: "config".into(),
                        message: m.to_string(),
                    }]),
                    other => other,
                })?;
                Ok(cfg)
            }
            _ => Err(CliError::Config(v.errors)),
        }
    }

    /// SHA-256 of the canonical (key-sorted, whitespace-free) JSON.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&self.raw).expect("JSON values serialize");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let c = &self.cavity;
        let cavity = OpticalCavity::new(
            hz_to_rad(c.kappa_hz),
            c.in_frac,
            c.out_frac,
            c.int_frac,
            hz_to_rad(self.signal.detuning_hz),
            self.signal.nbar,
        )?;
        let m = &self.mechanics;
        let bare = mode(m.freq_hz, m.gamma_hz, m.mass_kg, m.occupation)?;
        let coupling = Coupling::new(hz_to_rad(self.g0_hz))?;
        let mechanics = match self.damping_beam {
            None => bare,
            Some(DampingCfg::Direct {
                freq_eff_hz,
                gamma_eff_hz,
                occupation,
            }) => mode(freq_eff_hz, gamma_eff_hz, m.mass_kg, occupation)?,
            Some(DampingCfg::Computed { detuning_hz, nbar }) => {
                let drive = DampingDrive::computed(hz_to_rad(detuning_hz), nbar)?;
                effective_parameters(&bare, &cavity, &coupling, &drive)?.to_mode(&bare)?
            }
        };
        let d = &self.detection;
        let scheme = if d.homodyne {
            Scheme::Homodyne {
                phi: deg_to_rad(d.phi_deg),
                lo_ratio: d.lo_ratio,
            }
        } else {
            Scheme::Direct
        };
        let chain = DetectionChain::new(d.efficiencies.clone(), scheme)?
            .with_phase_offset(deg_to_rad(d.phase_offset_deg))?;
        let noise = match self.classical_noise {
            Some((a, p)) => ClassicalNoise::new(a, p)?,
            None => ClassicalNoise::quantum_limited(),
        };
        Ok(Scenario {
            params: SystemParams::new(cavity, mechanics, coupling),
            bare,
            chain,
            noise,
        })
    }

    /// Frequency grid in rad/s.
    pub fn frequencies(&self) -> Result<Vec<f64>, CliError> {
        let g = self.require_grid()?;
        Ok(linspace(g.f_min_hz, g.f_max_hz, g.points)
            .into_iter()
            .map(hz_to_rad)
            .collect())
    }

    /// Quadrature grid in degrees, if the config has one.
    pub fn phis_deg(&self) -> Option<Vec<f64>> {
        self.grid
            .and_then(|g| g.phi)
            .map(|(lo, hi, n)| linspace(lo, hi, n))
    }

    pub fn require_grid(&self) -> Result<GridCfg, CliError> {
        self.grid
            .ok_or_else(|| CliError::Usage("config has no `grid` section".into()))
    }

    pub fn with_detuning_hz(&self, detuning_hz: f64) -> Self {
        let mut c = self.clone();
        c.signal.detuning_hz = detuning_hz;
        c
    }

    pub fn with_nbar(&self, nbar: f64) -> Self {
        let mut c = self.clone();
        c.signal.nbar = nbar;
        c
    }

    pub fn with_phi_deg(&self, phi_deg: f64) -> Self {
        let mut c = self.clone();
        c.detection.phi_deg = phi_deg;
        c
    }
}

fn mode(freq_hz: f64, gamma_hz: f64, mass: f64, occ: Occupation) -> Result<MechanicalMode, ModelError> {
    let omega = hz_to_rad(freq_hz);
    let n = match occ {
        Occupation::Phonons(n) => n,
        Occupation::TemperatureK(t) => bose_occupation(omega, t),
    };
    MechanicalMode::new(omega, hz_to_rad(gamma_hz), mass, n)
}

#[derive(Default)]
struct Validator {
    errors: Vec<FieldError>,
}

type Obj = Map<String, Value>;

impl Validator {
    fn err(&mut self, path: &str, message: impl Into<String>) {
        self.errors.push(FieldError {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn object<'a>(&mut self, parent: &'a Obj, path: &str, key: &str, required: bool) -> Option<&'a Obj> {
        let full = join(path, key);
        match parent.get(key) {
            None if required => {
                self.err(&full, "missing section");
                None
            }
            None => None,
            Some(Value::Object(o)) => Some(o),
            Some(_) => {
                self.err(&full, "expected an object");
                None
            }
        }
    }

    fn known_keys(&mut self, obj: &Obj, path: &str, allowed: &[&str]) {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(&join(path, k), format!("unknown field (expected one of: {})", allowed.join(", ")));
            }
        }
    }

    fn number(&mut self, obj: &Obj, path: &str, key: &str) -> Option<f64> {
        let full = join(path, key);
        match obj.get(key) {
            None => {
                self.err(&full, "missing field");
                None
            }
            Some(v) => self.as_number(v, &full),
        }
    }

    fn opt_number(&mut self, obj: &Obj, path: &str, key: &str) -> Option<f64> {
        obj.get(key).and_then(|v| self.as_number(v, &join(path, key)))
    }

    fn as_number(&mut self, v: &Value, full: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(full, "expected a finite number");
                None
            }
        }
    }

    fn check(&mut self, value: Option<f64>, path: &str, key: &str, ok: impl Fn(f64) -> bool, rule: &str) -> Option<f64> {
        match value {
            Some(x) if !ok(x) => {
                self.err(&join(path, key), format!("{rule}, got {x}"));
                None
            }
            other => other,
        }
    }

    fn positive(&mut self, obj: &Obj, path: &str, key: &str) -> Option<f64> {
        let v = self.number(obj, path, key);
        self.check(v, path, key, |x| x > 0.0, "must be > 0")
    }

    fn non_negative(&mut self, obj: &Obj, path: &str, key: &str) -> Option<f64> {
        let v = self.number(obj, path, key);
        self.check(v, path, key, |x| x >= 0.0, "must be >= 0")
    }

    fn fraction(&mut self, obj: &Obj, path: &str, key: &str) -> Option<f64> {
        let v = self.number(obj, path, key);
        self.check(v, path, key, |x| (0.0..=1.0).contains(&x), "must be in [0, 1]")
    }

    fn count(&mut self, obj: &Obj, path: &str, key: &str) -> Option<usize> {
        let full = join(path, key);
        match obj.get(key) {
            None => {
                self.err(&full, "missing field");
                None
            }
            Some(v) => match v.as_u64() {
                Some(n) if (1..=10_000_000).contains(&n) => Some(n as usize),
                _ => {
                    self.err(&full, "expected an integer between 1 and 10000000");
                    None
                }
            },
        }
    }

    fn occupation(&mut self, obj: &Obj, path: &str, temp_key: &str, n_key: &str) -> Option<Occupation> {
        match (obj.contains_key(temp_key), obj.contains_key(n_key)) {
            (true, false) => {
                let t = self.number(obj, path, temp_key);
                self.check(t, path, temp_key, |x| x >= 0.0, "must be >= 0")
                    .map(Occupation::TemperatureK)
            }
            (false, true) => {
                let n = self.number(obj, path, n_key);
                self.check(n, path, n_key, |x| x >= 0.0, "must be >= 0")
                    .map(Occupation::Phonons)
            }
            (true, true) => {
                self.err(path, format!("give either `{temp_key}` or `{n_key}`, not both"));
                None
            }
            (false, false) => {
                self.err(path, format!("missing `{temp_key}` or `{n_key}`"));
                None
            }
        }
    }

    fn run_config(&mut self, raw: &Value) -> Option<RunConfig> {
        let Some(root) = raw.as_object() else {
            self.err("config", "expected a JSON object at the top level");
            return None;
        };
        self.known_keys(
            root,
            "",
            &[
                "schema_version",
                "description",
                "cavity",
                "mechanics",
                "coupling",
                "signal",
                "damping_beam",
                "detection",
                "classical_noise",
                "grid",
            ],
        );
        if let Some(v) = root.get("schema_version") {
            if v.as_u64() != Some(SCHEMA_VERSION as u64) {
                self.err("schema_version", format!("unsupported version {v}, expected {SCHEMA_VERSION}"));
            }
        }
        let description = match root.get("description") {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.err("description", "expected a string");
                None
            }
        };

        let cavity = self.object(root, "", "cavity", true).and_then(|o| self.cavity(o));
        let mechanics = self.object(root, "", "mechanics", true).and_then(|o| self.mechanics(o));
        let g0_hz = self.object(root, "", "coupling", true).and_then(|o| {
            self.known_keys(o, "coupling", &["g0_hz"]);
            self.non_negative(o, "coupling", "g0_hz")
        });
        let signal = self.object(root, "", "signal", true).and_then(|o| {
            self.known_keys(o, "signal", &["detuning_hz", "nbar"]);
            let detuning_hz = self.number(o, "signal", "detuning_hz");
            let nbar = self.non_negative(o, "signal", "nbar");
            Some(SignalCfg {
                detuning_hz: detuning_hz?,
                nbar: nbar?,
            })
        });
        let damping = match self.object(root, "", "damping_beam", false) {
            Some(o) => self.damping(o).map(Some),
            None => Some(None),
        };
        let detection = self.object(root, "", "detection", true).and_then(|o| self.detection(o));
        let noise = match self.object(root, "", "classical_noise", false) {
            Some(o) => {
                self.known_keys(o, "classical_noise", &["amp_rel_shot", "phase_rel_shot"]);
                let a = self.opt_number(o, "classical_noise", "amp_rel_shot").unwrap_or(0.0);
                let p = self.opt_number(o, "classical_noise", "phase_rel_shot").unwrap_or(0.0);
                let a = self.check(Some(a), "classical_noise", "amp_rel_shot", |x| x >= 0.0, "must be >= 0");
                let p = self.check(Some(p), "classical_noise", "phase_rel_shot", |x| x >= 0.0, "must be >= 0");
                a.zip(p).map(Some)
            }
            None => Some(None),
        };
        let grid = match self.object(root, "", "grid", false) {
            Some(o) => self.grid(o).map(Some),
            None => Some(None),
        };

        if let (Some(g), Some(d)) = (&grid, &detection) {
            if g.is_some_and(|g| g.phi.is_some()) && !d.homodyne {
                self.err("grid.phi_points", "a quadrature grid needs homodyne detection");
            }
        }

        Some(RunConfig {
            raw: Value::Null,
            description,
            cavity: cavity?,
            mechanics: mechanics?,
            g0_hz: g0_hz?,
            signal: signal?,
            damping_beam: damping?,
            detection: detection?,
            classical_noise: noise?,
            grid: grid?,
        })
    }

    fn cavity(&mut self, o: &Obj) -> Option<CavityCfg> {
        let p = "cavity";
        self.known_keys(o, p, &["kappa_hz", "kappa_in_frac", "kappa_out_frac", "kappa_int_frac"]);
        let kappa_hz = self.positive(o, p, "kappa_hz");
        let in_frac = self.fraction(o, p, "kappa_in_frac");
        let out_frac = self.fraction(o, p, "kappa_out_frac");
        let int_frac = self.fraction(o, p, "kappa_int_frac");
        if let (Some(a), Some(b), Some(c)) = (in_frac, out_frac, int_frac) {
            if ((a + b + c) - 1.0).abs() > 1e-12 {
                self.err(p, format!("port fractions must sum to 1, got {}", a + b + c));
                return None;
            }
        }
        Some(CavityCfg {
            kappa_hz: kappa_hz?,
            in_frac: in_frac?,
            out_frac: out_frac?,
            int_frac: int_frac?,
        })
    }

    fn mechanics(&mut self, o: &Obj) -> Option<MechanicsCfg> {
        let p = "mechanics";
        self.known_keys(o, p, &["freq_hz", "gamma_hz", "mass_kg", "bath_temp_k", "n_th"]);
        let freq_hz = self.positive(o, p, "freq_hz");
        let gamma_hz = self.positive(o, p, "gamma_hz");
        let mass_kg = self.positive(o, p, "mass_kg");
        let occupation = self.occupation(o, p, "bath_temp_k", "n_th");
        Some(MechanicsCfg {
            freq_hz: freq_hz?,
            gamma_hz: gamma_hz?,
            mass_kg: mass_kg?,
            occupation: occupation?,
        })
    }

    fn damping(&mut self, o: &Obj) -> Option<DampingCfg> {
        let p = "damping_beam";
        match o.get("mode").and_then(Value::as_str) {
            Some("direct") => {
                self.known_keys(o, p, &["mode", "freq_eff_hz", "gamma_eff_hz", "temp_eff_k", "n_eff"]);
                let freq_eff_hz = self.positive(o, p, "freq_eff_hz");
                let gamma_eff_hz = self.positive(o, p, "gamma_eff_hz");
                let occupation = self.occupation(o, p, "temp_eff_k", "n_eff");
                Some(DampingCfg::Direct {
                    freq_eff_hz: freq_eff_hz?,
                    gamma_eff_hz: gamma_eff_hz?,
                    occupation: occupation?,
                })
            }
            Some("computed") => {
                self.known_keys(o, p, &["mode", "detuning_hz", "nbar"]);
                let detuning_hz = self.number(o, p, "detuning_hz");
                let nbar = self.positive(o, p, "nbar");
                Some(DampingCfg::Computed {
                    detuning_hz: detuning_hz?,
                    nbar: nbar?,
                })
            }
            _ => {
                self.err(&join(p, "mode"), "expected \"direct\" or \"computed\"");
                None
            }
        }
    }

    fn detection(&mut self, o: &Obj) -> Option<DetectionCfg> {
        let p = "detection";
        self.known_keys(o, p, &["scheme", "efficiencies", "lo_ratio", "phi_deg", "phase_offset_deg"]);
        let homodyne = match o.get("scheme").and_then(Value::as_str) {
            Some("direct") => Some(false),
            Some("homodyne") => Some(true),
            _ => {
                self.err(&join(p, "scheme"), "expected \"direct\" or \"homodyne\"");
                None
            }
        };
        let efficiencies = self.efficiencies(o.get("efficiencies"));
        let lo_ratio = self.opt_number(o, p, "lo_ratio").unwrap_or(0.0);
        let lo_ratio = self.check(Some(lo_ratio), p, "lo_ratio", |x| x >= 0.0, "must be >= 0");
        let phi_deg = match homodyne {
            Some(true) => self.number(o, p, "phi_deg"),
            _ => Some(self.opt_number(o, p, "phi_deg").unwrap_or(0.0)),
        };
        if homodyne == Some(false) && o.get("lo_ratio").is_some() {
            self.err(&join(p, "lo_ratio"), "only meaningful for homodyne detection");
        }
        let phase_offset_deg = self.opt_number(o, p, "phase_offset_deg").unwrap_or(0.0);
        Some(DetectionCfg {
            homodyne: homodyne?,
            efficiencies: efficiencies?,
            lo_ratio: lo_ratio?,
            phi_deg: phi_deg?,
            phase_offset_deg,
        })
    }

    fn efficiencies(&mut self, v: Option<&Value>) -> Option<Vec<Efficiency>> {
        let base = "detection.efficiencies";
        let Some(v) = v else {
            return Some(Vec::new());
        };
        let Some(items) = v.as_array() else {
            self.err(base, "expected an array");
            return None;
        };
        let mut out = Vec::new();
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            let path = format!("{base}[{i}]");
            let Some(o) = item.as_object() else {
                self.err(&path, "expected an object with `kind` and `value`");
                ok = false;
                continue;
            };
            self.known_keys(o, &path, &["kind", "value"]);
            let kind = match o.get("kind").and_then(Value::as_str) {
                Some("cavity") => Some(EfficiencyKind::Cavity),
                Some("propagation") => Some(EfficiencyKind::Propagation),
                Some("detector") => Some(EfficiencyKind::Detector),
                Some("mode_match") => Some(EfficiencyKind::ModeMatch),
                Some("other") => Some(EfficiencyKind::Other),
                _ => {
                    self.err(
                        &join(&path, "kind"),
                        "expected cavity, propagation, detector, mode_match, or other",
                    );
                    None
                }
            };
            let value = self.number(o, &path, "value");
            let value = self.check(value, &path, "value", |x| x > 0.0 && x <= 1.0, "must be in (0, 1]");
            match (kind, value) {
                (Some(kind), Some(value)) => out.push(Efficiency { kind, value }),
                _ => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn grid(&mut self, o: &Obj) -> Option<GridCfg> {
        let p = "grid";
        self.known_keys(
            o,
            p,
            &["f_min_hz", "f_max_hz", "points", "phi_min_deg", "phi_max_deg", "phi_points"],
        );
        let f_min_hz = self.positive(o, p, "f_min_hz");
        let f_max_hz = self.positive(o, p, "f_max_hz");
        let points = self.count(o, p, "points");
        if let (Some(lo), Some(hi), Some(n)) = (f_min_hz, f_max_hz, points) {
            if n > 1 && hi <= lo {
                self.err(&join(p, "f_max_hz"), "must exceed f_min_hz when points > 1");
            }
        }
        let has_phi = ["phi_min_deg", "phi_max_deg", "phi_points"]
            .iter()
            .any(|k| o.contains_key(*k));
        let phi = if has_phi {
            let lo = self.number(o, p, "phi_min_deg");
            let hi = self.number(o, p, "phi_max_deg");
            let n = self.count(o, p, "phi_points");
            if let (Some(lo), Some(hi), Some(n)) = (lo, hi, n) {
                if n > 1 && hi <= lo {
                    self.err(&join(p, "phi_max_deg"), "must exceed phi_min_deg when phi_points > 1");
                }
            }
            Some(Some((lo?, hi?, n?)))
        } else {
            Some(None)
        };
        Some(GridCfg {
            f_min_hz: f_min_hz?,
            f_max_hz: f_max_hz?,
            points: points?,
            phi: phi?,
        })
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
        "description": "test",
        "cavity": {"kappa_hz": 1.7e6, "kappa_in_frac": 0.31, "kappa_out_frac": 0.6, "kappa_int_frac": 0.09},
        "mechanics": {"freq_hz": 1.524e6, "gamma_hz": 0.22, "mass_kg": 6.75e-12, "bath_temp_k": 4.6},
        "coupling": {"g0_hz": 33},
        "signal": {"detuning_hz": -42e3, "nbar": 1.1e8},
        "damping_beam": {"mode": "direct", "freq_eff_hz": 1.524e6, "gamma_eff_hz": 2700, "n_eff": 4.86},
        "detection": {"scheme": "direct", "efficiencies": [{"kind": "cavity", "value": 0.6}, {"kind": "detector", "value": 0.87}]},
        "grid": {"f_min_hz": 1.5e6, "f_max_hz": 1.55e6, "points": 11}
    }"#;

    #[test]
    fn parses_and_converts() {
        let c = RunConfig::parse(GOOD, "good").unwrap();
        let s = c.scenario().unwrap();
        assert!((s.params.mechanics.gamma() - hz_to_rad(2700.0)).abs() < 1e-9);
        assert!((s.bare.gamma() - hz_to_rad(0.22)).abs() < 1e-12);
        assert!((s.chain.external_efficiency() - 0.87).abs() < 1e-15);
        assert_eq!(c.frequencies().unwrap().len(), 11);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn hash_ignores_formatting_and_key_order() {
        let a = RunConfig::parse(GOOD, "a").unwrap();
        let reordered = GOOD.replace(
            r#""coupling": {"g0_hz": 33},"#,
            "",
        ).replace(r#""description": "test","#, r#""description": "test", "coupling": {"g0_hz": 33},"#);
        let b = RunConfig::parse(&reordered, "b").unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::parse(&GOOD.replace("-42e3", "-43e3"), "c").unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn reports_every_problem() {
        let bad = GOOD
            .replace("1.7e6", "-1")
            .replace(r#""gamma_hz": 0.22"#, r#""gamma_hz": "fast""#)
            .replace(r#""g0_hz": 33"#, r#""g0_hz": 33, "g1": 2"#)
            .replace(r#""value": 0.87"#, r#""value": 1.5"#);
        let Err(CliError::Config(errs)) = RunConfig::parse(&bad, "bad") else {
            panic!("expected config errors");
        };
        let paths: Vec<_> = errs.iter().map(|e| e.path.as_str()).collect();
        assert!(paths.contains(&"cavity.kappa_hz"), "{paths:?}");
        assert!(paths.contains(&"mechanics.gamma_hz"));
        assert!(paths.contains(&"coupling.g1"));
        assert!(paths.contains(&"detection.efficiencies[1].value"));
        assert_eq!(errs.len(), 4, "{errs:?}");
    }

    #[test]
    fn json_syntax_error_has_position() {
        let Err(CliError::Json { line, .. }) = RunConfig::parse("{\n\"cavity\": ,\n}", "x") else {
            panic!("expected a JSON error");
        };
        assert_eq!(line, 2);
    }

    #[test]
    fn fraction_sum_is_checked() {
        let bad = GOOD.replace(r#""kappa_int_frac": 0.09"#, r#""kappa_int_frac": 0.1"#);
        let Err(CliError::Config(errs)) = RunConfig::parse(&bad, "bad") else {
            panic!();
        };
        assert_eq!(errs[0].path, "cavity");
    }

    #[test]
    fn occupation_is_exclusive() {
        let bad = GOOD.replace(r#""bath_temp_k": 4.6"#, r#""bath_temp_k": 4.6, "n_th": 3"#);
        assert!(matches!(RunConfig::parse(&bad, "bad"), Err(CliError::Config(_))));
    }
}
