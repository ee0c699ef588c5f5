//! Named parameter sets shipped with the runner.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::harmonic::continuum::Accuracy;
use crate::map::AxisSpec;
use crate::model::{
    CattaneoParams, DispersionSpec, MomentumGrid, NvParams, OccupationSpec, ProbeGeometry, ProtocolKind, Spacing,
};

use super::config::{
    FiltersConfig, GridSpec, HarmonicConfig, MarkovConfig, MarkovProfile, ParametricConfig, Scenario, ScenarioConfig,
    VerifyConfig, SCHEMA_VERSION,
};

/// Preset names with a one-line description.
pub const PRESETS: &[(&str, &str)] = &[
    (
        "filters-default",
        "filter functions of all protocols, log-spaced frequencies",
    ),
    ("markov-default", "white noise with an exponential spatial profile"),
    (
        "markov-equal-rates",
        "white noise with gamma(r) = gamma0: coherence stays 1",
    ),
    (
        "fig2-equilibrium",
        "gapped bath at T = omega0, c k_max = 30 omega0, D = 2",
    ),
    ("kdr-zero-drive", "gapped bath with a Gaussian population at k = 0"),
    (
        "finite-kdr-drive",
        "gapped bath with a Gaussian population at k_dr = 2, sigma_dr = 0.1",
    ),
    ("gapless-d3-z2", "gapless bath, D = 3, z = 2, times a decade apart"),
    ("gapless-d3-z1", "gapless bath, D = 3, z = 1 with a UV cutoff"),
    ("diffusive-crossover", "Cattaneo medium, tau_D = 1, tau_s = 100, 2D"),
    ("nv-probe", "NV probe at d = 1 above the Cattaneo medium"),
    (
        "parametric-resonance",
        "parametric drive resonant with the mode at omega = 1.5",
    ),
    ("verify-all", "the full verification suite"),
];

/// Preset used when only a scenario is given.
pub fn default_preset(s: Scenario) -> &'static str {
    match s {
        Scenario::Filters => "filters-default",
        Scenario::Markov => "markov-default",
        Scenario::HarmonicMap => "fig2-equilibrium",
        Scenario::GaplessMap => "gapless-d3-z2",
        Scenario::DiffusiveMap => "diffusive-crossover",
        Scenario::NvMap => "nv-probe",
        Scenario::Parametric => "parametric-resonance",
        Scenario::Verify => "verify-all",
    }
}

fn gapped() -> DispersionSpec {
    DispersionSpec::Gapped { omega0: 1.0, c: 1.0 }
}

fn base(scenario: Scenario, name: &str) -> ScenarioConfig {
    ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        scenario,
        preset: name.to_string(),
        out_dir: PathBuf::from("out").join(name),
        workers: 0,
        tolerance: Accuracy::with_rel(1e-7),
        grid: GridSpec {
            r: AxisSpec::linear(0.0, 60.0, 60),
            t: AxisSpec::linear(0.5, 30.0, 60),
        },
        filters: FiltersConfig {
            omega: AxisSpec::log(1e-3, 1e3, 121),
            protocols: ProtocolKind::ALL.to_vec(),
        },
        markov: MarkovConfig {
            gamma0: 1.0,
            profile: MarkovProfile::Exponential { length: 2.0 },
        },
        harmonic: HarmonicConfig {
            dispersion: gapped(),
            occupation: OccupationSpec::Thermal { temperature: 1.0 },
            geometry: ProbeGeometry::default(),
            momentum: MomentumGrid::new(0.0, 30.0, 64, Spacing::Linear),
            protocol: ProtocolKind::Ramsey,
        },
        diffusive: CattaneoParams::default(),
        nv: NvParams::default(),
        parametric: ParametricConfig {
            dispersion: gapped(),
            temperature: 1.0,
            delta: 0.2,
            drive_frequency: 3.0,
            k: AxisSpec::linear(0.0, 3.0, 61),
        },
        verify: VerifyConfig::default(),
    }
}

fn drive(k_dr: f64) -> OccupationSpec {
    OccupationSpec::ThermalPlusGaussian {
        temperature: 1.0,
        amplitude: 50.0,
        k_dr,
        sigma_dr: 0.1,
    }
}

/// The configuration stored under `name`.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let cfg = match name {
        "filters-default" => {
            let mut c = base(Scenario::Filters, name);
            c.grid.t = AxisSpec::Values(vec![0.5, 1.0, 2.0]);
            c
        }
        "markov-default" => {
            let mut c = base(Scenario::Markov, name);
            c.grid = GridSpec {
                r: AxisSpec::linear(0.0, 10.0, 21),
                t: AxisSpec::linear(0.0, 5.0, 11),
            };
            c
        }
        "markov-equal-rates" => {
            let mut c = preset("markov-default")?;
            c.markov.profile = MarkovProfile::Constant { gamma_r: 1.0 };
            c
        }
        "fig2-equilibrium" => base(Scenario::HarmonicMap, name),
        "kdr-zero-drive" => {
            let mut c = base(Scenario::HarmonicMap, name);
            c.harmonic.occupation = drive(0.0);
            c
        }
        "finite-kdr-drive" => {
            let mut c = base(Scenario::HarmonicMap, name);
            c.harmonic.occupation = drive(2.0);
            c.grid = GridSpec {
                r: AxisSpec::linear(0.0, 40.0, 401),
                t: AxisSpec::linear(30.0, 150.0, 5),
            };
            c
        }
        "gapless-d3-z2" => {
            let mut c = base(Scenario::GaplessMap, name);
            c.harmonic.dispersion = DispersionSpec::Gapless { alpha: 1.0, z: 2.0 };
            c.harmonic.geometry.dim = 3;
            c.grid = GridSpec {
                r: AxisSpec::linear(0.0, 60.0, 61),
                t: AxisSpec::log(10.0, 1000.0, 3),
            };
            c
        }
        "gapless-d3-z1" => {
            let mut c = base(Scenario::GaplessMap, name);
            c.harmonic.dispersion = DispersionSpec::Gapless { alpha: 1.0, z: 1.0 };
            c.harmonic.geometry.dim = 3;
            c.grid = GridSpec {
                r: AxisSpec::linear(0.0, 20.0, 41),
                t: AxisSpec::log(1.0, 1000.0, 31),
            };
            c
        }
        "diffusive-crossover" => {
            let mut c = base(Scenario::DiffusiveMap, name);
            c.grid = GridSpec {
                r: AxisSpec::linear(0.0, 30.0, 61),
                t: AxisSpec::log(0.01, 1000.0, 41),
            };
            c
        }
        "nv-probe" => {
            let mut c = base(Scenario::NvMap, name);
            c.grid = GridSpec {
                r: AxisSpec::linear(0.0, 10.0, 41),
                t: AxisSpec::log(0.01, 1000.0, 21),
            };
            c
        }
        "parametric-resonance" => {
            let mut c = base(Scenario::Parametric, name);
            c.grid.t = AxisSpec::linear(0.0, 50.0, 26);
            c
        }
        "verify-all" => base(Scenario::Verify, name),
        _ => {
            let known: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            return Err(Error::Config(format!(
                "unknown preset `{name}`; known: {}",
                known.join(", ")
            )));
        }
    };
    Ok(ScenarioConfig {
        preset: name.to_string(),
        out_dir: PathBuf::from("out").join(name),
        ..cfg
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Validate;

    #[test]
    fn presets_are_listed_and_valid() {
        for (name, _) in PRESETS {
            let c = preset(name).unwrap();
            assert_eq!(c.preset, *name);
            c.validate().unwrap();
        }
        for s in Scenario::ALL {
            assert_eq!(preset(default_preset(s)).unwrap().scenario, s);
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn named_presets_carry_their_parameters() {
        let eq = preset("fig2-equilibrium").unwrap();
        assert_eq!(eq.harmonic.dispersion, DispersionSpec::Gapped { omega0: 1.0, c: 1.0 });
        assert_eq!(eq.harmonic.occupation.temperature(), 1.0);
        assert_eq!(eq.harmonic.momentum.k_max, 30.0);
        assert_eq!(eq.harmonic.geometry.dim, 2);
        assert_eq!(eq.grid.r.values().unwrap().len(), 60);
        assert_eq!(eq.grid.t.values().unwrap().len(), 60);
        let fr = preset("finite-kdr-drive").unwrap();
        assert_eq!(fr.harmonic.occupation, drive(2.0));
        assert_eq!(preset("kdr-zero-drive").unwrap().harmonic.occupation, drive(0.0));
    }
}
