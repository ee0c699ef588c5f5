//! Scenario configuration: schema, preset layering and validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{join, Error, IssueKind, Result, Validate, ValidationErrors, Validator};
use crate::harmonic::continuum::Accuracy;
use crate::map::AxisSpec;
use crate::model::{
    validate_harmonic, CattaneoParams, DispersionSpec, MomentumGrid, NvParams, OccupationSpec, ProbeGeometry,
    ProtocolKind,
};
use crate::verify::GROUPS;

use super::presets::{default_preset, preset};

/// Version of the configuration schema understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Data product to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Filters,
    Markov,
    HarmonicMap,
    GaplessMap,
    DiffusiveMap,
    NvMap,
    Parametric,
    Verify,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Filters,
        Scenario::Markov,
        Scenario::HarmonicMap,
        Scenario::GaplessMap,
        Scenario::DiffusiveMap,
        Scenario::NvMap,
        Scenario::Parametric,
        Scenario::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Filters => "filters",
            Scenario::Markov => "markov",
            Scenario::HarmonicMap => "harmonic-map",
            Scenario::GaplessMap => "gapless-map",
            Scenario::DiffusiveMap => "diffusive-map",
            Scenario::NvMap => "nv-map",
            Scenario::Parametric => "parametric",
            Scenario::Verify => "verify",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Separation and time axes of a map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r: AxisSpec,
    pub t: AxisSpec,
}

/// Filter tables: frequencies on `omega`, durations on the grid's t axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltersConfig {
    pub omega: AxisSpec,
    pub protocols: Vec<ProtocolKind>,
}

/// Spatial shape of white noise, γ(r).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarkovProfile {
    /// γ(r) = γ_r for r > 0.
    Constant { gamma_r: f64 },
    /// γ(r) = γ0 e^{−r/ξ}.
    Exponential { length: f64 },
    /// γ(r) = γ0 e^{−r²/(2ξ²)}.
    Gaussian { length: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovConfig {
    pub gamma0: f64,
    pub profile: MarkovProfile,
}

impl MarkovConfig {
    pub fn gamma(&self, r: f64) -> f64 {
        match self.profile {
            MarkovProfile::Constant { gamma_r } => {
                if r == 0.0 {
                    self.gamma0
                } else {
                    gamma_r
                }
            }
            MarkovProfile::Exponential { length } => self.gamma0 * (-r / length).exp(),
            MarkovProfile::Gaussian { length } => self.gamma0 * (-0.5 * (r / length).powi(2)).exp(),
        }
    }
}

/// Harmonic bath and probe pair for harmonic and gapless maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicConfig {
    pub dispersion: DispersionSpec,
    pub occupation: OccupationSpec,
    pub geometry: ProbeGeometry,
    pub momentum: MomentumGrid,
    /// Protocol of the X12 map.
    pub protocol: ProtocolKind,
}

/// Parametric drive: momenta on `k`, drive durations on the grid's t axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametricConfig {
    pub dispersion: DispersionSpec,
    pub temperature: f64,
    pub delta: f64,
    pub drive_frequency: f64,
    pub k: AxisSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Check groups to run; empty runs all.
    pub groups: Vec<String>,
    /// Replaces every check tolerance when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance_override: Option<f64>,
}

/// Complete description of one run. Every section is always present; a
/// preset supplies the values a configuration file leaves out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub preset: String,
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub tolerance: Accuracy,
    pub grid: GridSpec,
    pub filters: FiltersConfig,
    pub markov: MarkovConfig,
    pub harmonic: HarmonicConfig,
    pub diffusive: CattaneoParams,
    pub nv: NvParams,
    pub parametric: ParametricConfig,
    pub verify: VerifyConfig,
}

/// Flag values that take precedence over the configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub preset: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Quadrature tolerance for maps; check tolerance for `verify`.
    pub tol: Option<f64>,
}

/// Overlays `top` on `base`. Tables merge key by key, except tagged
/// variants whose `kind` changes, which are replaced whole.
fn merge(base: &mut toml::Value, top: toml::Value) {
    match (base, top) {
        (toml::Value::Table(b), toml::Value::Table(t)) => {
            let kind_changed = matches!((b.get("kind"), t.get("kind")), (Some(x), Some(y)) if x != y);
            if kind_changed {
                *b = t;
                return;
            }
            for (key, value) in t {
                match b.get_mut(&key) {
                    Some(slot) => merge(slot, value),
                    None => {
                        b.insert(key, value);
                    }
                }
            }
        }
        (slot, value) => *slot = value,
    }
}

fn as_str<'a>(table: &'a toml::Table, key: &str) -> Result<Option<&'a str>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(Error::Config(format!("`{key}` must be a string"))),
    }
}

impl ScenarioConfig {
    /// Builds a configuration from optional TOML text and flag overrides.
    ///
    /// The scenario comes from the flags, else the file, else the preset;
    /// the preset comes from the flags, else the file, else the scenario's
    /// default. File keys then overlay the preset and flags overlay both.
    pub fn load(text: Option<&str>, overrides: &Overrides) -> Result<Self> {
        let file: toml::Table = match text {
            Some(t) => toml::from_str(t).map_err(|e| Error::Config(format!("cannot parse configuration: {e}")))?,
            None => toml::Table::new(),
        };
        if let Some(v) = file.get("schema_version") {
            if v.as_integer() != Some(SCHEMA_VERSION as i64) {
                return Err(Error::Config(format!(
                    "unsupported schema_version {v}; this build reads version {SCHEMA_VERSION}"
                )));
            }
        }
        let file_scenario = match as_str(&file, "scenario")? {
            Some(s) => Some(Scenario::from_name(s).ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))?),
            None => None,
        };
        let preset_name = overrides
            .preset
            .clone()
            .or(as_str(&file, "preset")?.map(str::to_string));
        let scenario = overrides.scenario.or(file_scenario);
        let name = match (&preset_name, scenario) {
            (Some(p), _) => p.clone(),
            (None, Some(s)) => default_preset(s).to_string(),
            (None, None) => return Err(Error::Config("no scenario or preset given".into())),
        };
        let base = preset(&name)?;
        let scenario = scenario.unwrap_or(base.scenario);
        let mut value = toml::Value::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut value, toml::Value::Table(file));
        let mut cfg: ScenarioConfig = value
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("invalid configuration: {e}")))?;
        cfg.scenario = scenario;
        cfg.preset = name;
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(d) = &o.out_dir {
            self.out_dir = d.clone();
        }
        if let Some(w) = o.workers {
            self.workers = w;
        }
        if let Some(t) = o.tol {
            if self.scenario == Scenario::Verify {
                self.verify.tolerance_override = Some(t);
            } else {
                self.tolerance.rel_tol = t;
            }
        }
    }

    /// Serialized form, suitable as a configuration file.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

fn check_axis(path: &str, axis: &AxisSpec, v: &mut Validator) {
    match axis.values() {
        Err(e) => v.push(path, IssueKind::InvalidValue, e.to_string()),
        Ok(x) => {
            if x.is_empty() {
                v.push(path, IssueKind::InvalidValue, "axis is empty");
            }
            if x.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
                v.push(path, IssueKind::InvalidValue, "entries must be finite and >= 0");
            }
            if x.windows(2).any(|w| !(w[0] < w[1])) {
                v.push(path, IssueKind::InvalidValue, "entries must be strictly increasing");
            }
        }
    }
}

fn merge_errors(result: std::result::Result<(), ValidationErrors>, v: &mut Validator) {
    if let Err(e) = result {
        for issue in e.0 {
            v.push(&issue.path, issue.kind, issue.message);
        }
    }
}

impl Validate for ScenarioConfig {
    fn check(&self, path: &str, v: &mut Validator) {
        if self.schema_version != SCHEMA_VERSION {
            v.push(
                &join(path, "schema_version"),
                IssueKind::InvalidValue,
                format!("must be {SCHEMA_VERSION}"),
            );
        }
        let tol = self.tolerance;
        if !(tol.rel_tol.is_finite() && tol.rel_tol >= 0.0) {
            v.push(
                &join(path, "tolerance.rel_tol"),
                IssueKind::InvalidValue,
                "must be finite and >= 0",
            );
        }
        v.non_negative(&join(path, "tolerance.abs_tol"), tol.abs_tol);
        if tol.max_panels == 0 {
            v.push(
                &join(path, "tolerance.max_panels"),
                IssueKind::InvalidValue,
                "must be positive",
            );
        }
        let grid_used = !matches!(self.scenario, Scenario::Verify);
        if grid_used {
            check_axis(&join(path, "grid.t"), &self.grid.t, v);
            if self.scenario != Scenario::Filters && self.scenario != Scenario::Parametric {
                check_axis(&join(path, "grid.r"), &self.grid.r, v);
            }
            let normalized = matches!(
                self.scenario,
                Scenario::HarmonicMap | Scenario::GaplessMap | Scenario::DiffusiveMap | Scenario::NvMap
            );
            if normalized
                && self
                    .grid
                    .t
                    .values()
                    .is_ok_and(|t| t.first().is_some_and(|&t0| t0 <= 0.0))
            {
                v.push(
                    &join(path, "grid.t"),
                    IssueKind::InvalidValue,
                    "maps normalized by their zero-separation value need t > 0",
                );
            }
        }
        match self.scenario {
            Scenario::Filters => {
                match self.filters.omega.values() {
                    Ok(w) if !w.is_empty() && w.iter().all(|x| x.is_finite()) && w.windows(2).all(|p| p[0] < p[1]) => {}
                    _ => v.push(
                        &join(path, "filters.omega"),
                        IssueKind::InvalidValue,
                        "must be a non-empty, finite, strictly increasing axis",
                    ),
                }
                if self.filters.protocols.is_empty() {
                    v.push(
                        &join(path, "filters.protocols"),
                        IssueKind::InvalidValue,
                        "must not be empty",
                    );
                }
            }
            Scenario::Markov => {
                let m = &self.markov;
                v.positive(&join(path, "markov.gamma0"), m.gamma0);
                match m.profile {
                    MarkovProfile::Constant { gamma_r } => {
                        if !(gamma_r.is_finite() && gamma_r.abs() <= m.gamma0) {
                            v.push(
                                &join(path, "markov.profile.gamma_r"),
                                IssueKind::InvalidValue,
                                "must satisfy |gamma_r| <= gamma0",
                            );
                        }
                    }
                    MarkovProfile::Exponential { length } | MarkovProfile::Gaussian { length } => {
                        v.positive(&join(path, "markov.profile.length"), length)
                    }
                }
            }
            Scenario::HarmonicMap | Scenario::GaplessMap => {
                let h = &self.harmonic;
                merge_errors(
                    validate_harmonic(&h.dispersion, &h.occupation, &h.geometry, &h.momentum),
                    v,
                );
                if self.scenario == Scenario::GaplessMap {
                    match h.dispersion {
                        DispersionSpec::Gapless { .. } => {}
                        _ => v.push(
                            &join(path, "harmonic.dispersion"),
                            IssueKind::InvalidValue,
                            "gapless-map needs a gapless dispersion",
                        ),
                    }
                    if !matches!(h.occupation, OccupationSpec::Thermal { temperature } if temperature > 0.0) {
                        v.push(
                            &join(path, "harmonic.occupation"),
                            IssueKind::InvalidValue,
                            "gapless-map needs a thermal occupation with T > 0",
                        );
                    }
                }
            }
            Scenario::DiffusiveMap => self.diffusive.check(&join(path, "diffusive"), v),
            Scenario::NvMap => self.nv.check(&join(path, "nv"), v),
            Scenario::Parametric => {
                let p = &self.parametric;
                self.parametric
                    .dispersion
                    .check(&join(path, "parametric.dispersion"), v);
                OccupationSpec::ParametricEvolved {
                    temperature: p.temperature,
                    delta: p.delta,
                    drive_frequency: p.drive_frequency,
                    t_drive: 0.0,
                }
                .check(&join(path, "parametric"), v);
                check_axis(&join(path, "parametric.k"), &p.k, v);
            }
            Scenario::Verify => {
                for g in &self.verify.groups {
                    if !GROUPS.contains(&g.as_str()) {
                        v.push(
                            &join(path, "verify.groups"),
                            IssueKind::InvalidValue,
                            format!("unknown group `{g}`"),
                        );
                    }
                }
                if let Some(t) = self.verify.tolerance_override {
                    v.non_negative(&join(path, "verify.tolerance_override"), t);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::presets::PRESETS;

    fn load(text: &str) -> Result<ScenarioConfig> {
        ScenarioConfig::load(Some(text), &Overrides::default())
    }

    #[test]
    fn every_preset_loads_and_validates() {
        for (name, _) in PRESETS {
            let cfg = ScenarioConfig::load(
                None,
                &Overrides {
                    preset: Some(name.to_string()),
                    ..Overrides::default()
                },
            )
            .unwrap();
            assert_eq!(cfg.preset, *name);
        }
    }

    #[test]
    fn scenario_alone_selects_its_default_preset() {
        for s in Scenario::ALL {
            let cfg = load(&format!("scenario = \"{}\"", s.name())).unwrap();
            assert_eq!(cfg.scenario, s);
            assert_eq!(cfg.preset, default_preset(s));
        }
    }

    #[test]
    fn file_keys_overlay_the_preset_and_flags_overlay_the_file() {
        let text = r#"
            schema_version = 1
            scenario = "harmonic-map"
            workers = 3
            [grid]
            r = [0.0, 1.0, 2.0]
            [harmonic.occupation]
            temperature = 2.5
        "#;
        let cfg = load(text).unwrap();
        assert_eq!(cfg.workers, 3);
        assert_eq!(cfg.grid.r, AxisSpec::Values(vec![0.0, 1.0, 2.0]));
        assert_eq!(cfg.harmonic.occupation, OccupationSpec::Thermal { temperature: 2.5 });
        let o = Overrides {
            workers: Some(1),
            tol: Some(1e-5),
            out_dir: Some("elsewhere".into()),
            ..Overrides::default()
        };
        let cfg = ScenarioConfig::load(Some(text), &o).unwrap();
        assert_eq!(cfg.workers, 1);
        assert_eq!(cfg.tolerance.rel_tol, 1e-5);
        assert_eq!(cfg.out_dir, PathBuf::from("elsewhere"));
    }

    #[test]
    fn changing_a_variant_replaces_the_table() {
        let text = r#"
            scenario = "harmonic-map"
            [harmonic.occupation]
            kind = "thermal_plus_gaussian"
            temperature = 1.0
            amplitude = 5.0
            k_dr = 1.0
            sigma_dr = 0.2
        "#;
        let cfg = load(text).unwrap();
        assert!(
            matches!(cfg.harmonic.occupation, OccupationSpec::ThermalPlusGaussian { amplitude, .. } if amplitude == 5.0)
        );
    }

    #[test]
    fn tol_flag_targets_check_tolerance_for_verify() {
        let o = Overrides {
            scenario: Some(Scenario::Verify),
            tol: Some(1e-20),
            ..Overrides::default()
        };
        let cfg = ScenarioConfig::load(None, &o).unwrap();
        assert_eq!(cfg.verify.tolerance_override, Some(1e-20));
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = load("scenario = \"nv-map\"").unwrap();
        let again = load(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(load("scenario = \"nope\""), Err(Error::Config(_))));
        assert!(matches!(
            load("schema_version = 2\nscenario = \"markov\""),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            load("scenario = \"markov\"\nbogus = 1"),
            Err(Error::Config(_))
        ));
        assert!(matches!(load("this is not toml"), Err(Error::Config(_))));
        assert!(matches!(
            ScenarioConfig::load(None, &Overrides::default()),
            Err(Error::Config(_))
        ));
        let unsorted = load("scenario = \"markov\"\n[grid]\nr = [1.0, 0.5]");
        assert!(matches!(unsorted, Err(Error::Invalid(_))));
        let empty = load("scenario = \"markov\"\n[grid]\nt = []");
        assert!(matches!(empty, Err(Error::Invalid(_))));
        let wrong_bath =
            load("scenario = \"gapless-map\"\n[harmonic.dispersion]\nkind = \"gapped\"\nomega0 = 1.0\nc = 1.0");
        assert!(matches!(wrong_bath, Err(Error::Invalid(_))));
        let divergent = load("scenario = \"gapless-map\"\n[harmonic.geometry]\ndim = 1");
        match divergent {
            Err(Error::Invalid(e)) => assert!(e.has(IssueKind::DivergentRegime)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            load("scenario = \"verify\"\n[verify]\ngroups = [\"nope\"]"),
            Err(Error::Invalid(_))
        ));
    }
}
