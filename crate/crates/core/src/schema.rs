//! JSON run configuration: suite selection, constants, tolerances and
//! optional explicit field specifications.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::solution::{
    dirac_plane_wave, kg_plane_wave, offshell_variant, pauli_mode, schrodinger_mode, DiracField, KleinGordonField, PauliField,
    PhysicalConstants, SchrodingerField, WaveField,
};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable consulted when no seed is given.
pub const SEED_ENV: &str = "CURRENT_FORGE_SEED";

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_GRID: usize = 16;
pub const DEFAULT_POINTS: usize = 200;

pub const SUITES: [&str; 11] = [
    "clifford",
    "fierz",
    "conserve",
    "gordon",
    "charge",
    "stress",
    "pauli",
    "schrodinger",
    "uniqueness-dirac",
    "uniqueness-kg",
    "all",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default)]
    pub e: f64,
    #[serde(default)]
    pub kappa: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ConstantsSpec {
    fn default() -> Self {
        PhysicalConstants::default().into()
    }
}

impl From<PhysicalConstants> for ConstantsSpec {
    fn from(k: PhysicalConstants) -> Self {
        ConstantsSpec {
            hbar: k.hbar,
            c: k.c,
            m: k.m,
            e: k.e,
            kappa: k.kappa,
        }
    }
}

impl From<ConstantsSpec> for PhysicalConstants {
    fn from(k: ConstantsSpec) -> Self {
        PhysicalConstants {
            hbar: k.hbar,
            c: k.c,
            m: k.m,
            e: k.e,
            kappa: k.kappa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationSpec {
    Dirac,
    KleinGordon,
    Pauli,
    Schrodinger,
}

/// One mode. Which entries are read depends on the equation: `p` is the
/// spatial momentum (Dirac, Klein-Gordon) or wavevector (Pauli,
/// Schrödinger); `energy_sign` and `spin` apply to Dirac, `energy_sign` to
/// Klein-Gordon, `seed` (the initial two-spinor) to Pauli.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub p: [f64; 3],
    #[serde(default = "positive")]
    pub energy_sign: i8,
    #[serde(default = "spin_up")]
    pub spin: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<[[f64; 2]; 2]>,
    #[serde(default = "unit_coeff")]
    pub coeff: [f64; 2],
    #[serde(default)]
    pub energy_shift: f64,
}

fn positive() -> i8 {
    1
}

fn spin_up() -> u8 {
    1
}

fn unit_coeff() -> [f64; 2] {
    [1.0, 0.0]
}

fn complex(z: [f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub equation: EquationSpec,
    /// Overrides the run's constants for this field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsSpec>,
    pub modes: Vec<ModeSpec>,
    #[serde(default)]
    pub a_const: [f64; 4],
    #[serde(default)]
    pub b: [f64; 3],
    #[serde(default)]
    pub a_vec: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_state: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    pub lattice: bool,
    #[serde(default = "yes")]
    pub on_shell: bool,
}

fn yes() -> bool {
    true
}

impl FieldSpec {
    /// Builds the field. An `on_shell: false` field whose modes carry no
    /// energy shift is moved off shell with the seeded random shifts of
    /// [`offshell_variant`].
    pub fn build(&self, run_constants: &PhysicalConstants, seed: u64) -> Result<WaveField> {
        let k: PhysicalConstants = self.constants.map_or(*run_constants, Into::into);
        k.validate().map_err(|e| Error::Config(e.to_string()))?;
        let shifted = self.modes.iter().any(|m| m.energy_shift != 0.0);
        if self.on_shell && shifted {
            return Err(Error::Config("an on-shell field cannot carry energy shifts".into()));
        }
        let field = match self.equation {
            EquationSpec::Dirac => {
                let modes = self
                    .modes
                    .iter()
                    .map(|m| {
                        let mut mode = dirac_plane_wave(m.p, m.energy_sign, m.spin, &k, self.a_const)?.with_coeff(complex(m.coeff));
                        mode.energy_shift = m.energy_shift;
                        mode.p.0[0] += m.energy_shift;
                        Ok(mode)
                    })
                    .collect::<Result<Vec<_>>>()?;
                WaveField::Dirac(DiracField::new(modes, k, self.a_const, self.lattice)?)
            }
            EquationSpec::KleinGordon => {
                let modes = self
                    .modes
                    .iter()
                    .map(|m| {
                        let mut mode = kg_plane_wave(m.p, m.energy_sign, &k)?.with_coeff(complex(m.coeff));
                        mode.energy_shift = m.energy_shift;
                        mode.p.0[0] += m.energy_shift;
                        Ok(mode)
                    })
                    .collect::<Result<Vec<_>>>()?;
                WaveField::KleinGordon(KleinGordonField::new(modes, k, self.lattice)?)
            }
            EquationSpec::Pauli => {
                let modes = self
                    .modes
                    .iter()
                    .map(|m| {
                        let seed = m.seed.ok_or_else(|| Error::Config("Pauli modes need a spinor seed".into()))?;
                        let mut mode =
                            pauli_mode(m.p, [complex(seed[0]), complex(seed[1])], &k, self.b, self.a_vec)?.with_coeff(complex(m.coeff));
                        mode.energy_shift = m.energy_shift;
                        Ok(mode)
                    })
                    .collect::<Result<Vec<_>>>()?;
                WaveField::Pauli(PauliField::new(modes, k, self.a_vec, self.b, self.lattice)?)
            }
            EquationSpec::Schrodinger => {
                let modes = self
                    .modes
                    .iter()
                    .map(|m| {
                        let mut mode = schrodinger_mode(m.p, &k)?.with_coeff(complex(m.coeff));
                        mode.energy_shift = m.energy_shift;
                        Ok(mode)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let chi = self.spin_state.map(|s| [complex(s[0]), complex(s[1])]);
                WaveField::Schrodinger(SchrodingerField::new(modes, k, chi, self.lattice)?)
            }
        };
        if !self.on_shell && !shifted {
            return offshell_variant(&field, seed);
        }
        Ok(field)
    }

    /// The specification of an existing field.
    pub fn from_field(field: &WaveField) -> Self {
        let base = |equation, k: &PhysicalConstants, modes, lattice, on_shell| FieldSpec {
            equation,
            constants: Some((*k).into()),
            modes,
            a_const: [0.0; 4],
            b: [0.0; 3],
            a_vec: [0.0; 3],
            spin_state: None,
            lattice,
            on_shell,
        };
        let on_shell = field.is_on_shell();
        match field {
            WaveField::Dirac(f) => {
                let modes = f
                    .modes
                    .iter()
                    .map(|m| ModeSpec {
                        p: m.p.spatial(),
                        energy_sign: m.energy_sign,
                        spin: m.spin,
                        seed: None,
                        coeff: pair(m.coeff),
                        energy_shift: m.energy_shift,
                    })
                    .collect();
                FieldSpec {
                    a_const: f.a_const,
                    ..base(EquationSpec::Dirac, &f.constants, modes, f.lattice, on_shell)
                }
            }
            WaveField::KleinGordon(f) => {
                let modes = f
                    .modes
                    .iter()
                    .map(|m| ModeSpec {
                        p: m.p.spatial(),
                        energy_sign: m.energy_sign,
                        spin: 1,
                        seed: None,
                        coeff: pair(m.coeff),
                        energy_shift: m.energy_shift,
                    })
                    .collect();
                base(EquationSpec::KleinGordon, &f.constants, modes, f.lattice, on_shell)
            }
            WaveField::Pauli(f) => {
                let modes = f
                    .modes
                    .iter()
                    .map(|m| ModeSpec {
                        p: m.k,
                        energy_sign: 1,
                        spin: 1,
                        seed: Some([pair(m.seed[0]), pair(m.seed[1])]),
                        coeff: pair(m.coeff),
                        energy_shift: m.energy_shift,
                    })
                    .collect();
                FieldSpec {
                    b: f.b,
                    a_vec: f.a_vec,
                    ..base(EquationSpec::Pauli, &f.constants, modes, f.lattice, on_shell)
                }
            }
            WaveField::Schrodinger(f) => {
                let modes = f
                    .modes
                    .iter()
                    .map(|m| ModeSpec {
                        p: m.k,
                        energy_sign: 1,
                        spin: 1,
                        seed: None,
                        coeff: pair(m.coeff),
                        energy_shift: m.energy_shift,
                    })
                    .collect();
                FieldSpec {
                    spin_state: f.spin_state.map(|v| [pair(v[0]), pair(v[1])]),
                    ..base(EquationSpec::Schrodinger, &f.constants, modes, f.lattice, on_shell)
                }
            }
        }
    }
}

/// A complete run description. Every field has a default, so `{}` plus a
/// schema version is a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default = "default_suite")]
    pub suite: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub constants: ConstantsSpec,
    /// Replaces every upper-bound tolerance when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default = "default_grid")]
    pub grid_n: usize,
    /// Fixed mode count for generated fields; otherwise 4–8.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Extra fields whose registered currents are swept by the conserve suite.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldSpec>,
}

fn default_suite() -> String {
    "all".into()
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

fn default_points() -> usize {
    DEFAULT_POINTS
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            suite: default_suite(),
            seed: None,
            constants: ConstantsSpec::default(),
            tolerance: None,
            grid_n: DEFAULT_GRID,
            modes: None,
            points: DEFAULT_POINTS,
            output: None,
            fields: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn for_suite(suite: &str) -> Self {
        RunConfig {
            suite: suite.into(),
            ..RunConfig::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(Error::Config(format!("unknown suite {:?}; expected one of {}", self.suite, SUITES.join(", "))));
        }
        PhysicalConstants::from(self.constants)
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.grid_n < 2 {
            return Err(Error::Config("grid_n must be at least 2".into()));
        }
        if self.points == 0 {
            return Err(Error::Config("points must be at least 1".into()));
        }
        if self.modes == Some(0) {
            return Err(Error::Config("modes must be at least 1".into()));
        }
        Ok(())
    }

    /// The explicit seed, else the environment fallback, else the default.
    pub fn resolved_seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV} must be a non-negative integer, got {v:?}"))),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let c = RunConfig::from_json(r#"{"schema_version": 1}"#).unwrap();
        assert_eq!(c.suite, "all");
        assert_eq!(c.grid_n, 16);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            RunConfig::from_json(r#"{"schema_version": 1, "sweet": "fierz"}"#),
            Err(Error::Config(_))
        ));
        assert!(RunConfig::from_json(r#"{"schema_version": 2}"#).is_err());
        assert!(RunConfig::from_json(r#"{"schema_version": 1, "suite": "nope"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"schema_version": 1, "constants": {"m": -1}}"#).is_err());
    }

    #[test]
    fn field_round_trip() {
        let text = r#"{
            "equation": "dirac",
            "modes": [{"p": [0.7, -0.3, 0.2], "energy_sign": 1, "spin": 2, "coeff": [0.5, 0.25]},
                      {"p": [0.0, 1.0, 0.0], "energy_sign": -1}],
            "a_const": [0.1, 0.0, 0.0, 0.2]
        }"#;
        let spec: FieldSpec = serde_json::from_str(text).unwrap();
        let k = PhysicalConstants::default().with_charge(0.5);
        let f = spec.build(&k, 1).unwrap();
        let back = FieldSpec::from_field(&f).build(&k, 1).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn offshell_flag() {
        let spec = FieldSpec {
            equation: EquationSpec::KleinGordon,
            constants: None,
            modes: vec![ModeSpec {
                p: [1.0, 0.0, 0.0],
                energy_sign: 1,
                spin: 1,
                seed: None,
                coeff: [1.0, 0.0],
                energy_shift: 0.0,
            }],
            a_const: [0.0; 4],
            b: [0.0; 3],
            a_vec: [0.0; 3],
            spin_state: None,
            lattice: false,
            on_shell: false,
        };
        let f = spec.build(&PhysicalConstants::default(), 3).unwrap();
        assert!(!f.is_on_shell());
        assert!(f.equation_residual([0.0; 4]) > 0.1);
    }

    #[test]
    fn pauli_needs_seed() {
        let spec: FieldSpec = serde_json::from_str(r#"{"equation": "pauli", "modes": [{"p": [1, 0, 0]}]}"#).unwrap();
        assert!(matches!(spec.build(&PhysicalConstants::default(), 0), Err(Error::Config(_))));
    }
}
