//! Exact plane-wave solutions of the Dirac, Klein-Gordon, Pauli and
//! Schrödinger equations, and their jets.
//!
//! Every field is stored as a finite sum of plane waves
//! `a · exp(i(k·x − ω x⁰))` with a constant amplitude vector `a`, so each
//! derivative is an exact multiplication (∂₀ → −iω, ∂ⱼ → ikⱼ). For the
//! relativistic modes ω = p⁰/ħ and k = p/ħ, i.e. `∂ᵤψ = −(i/ħ) pᵤ ψ` with
//! the index lowered by the (+,−,−,−) metric.
//!
//! Potentials are given with the index up: `A = (A⁰, A¹, A², A³)`.

use nalgebra::{Vector2, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gamma::{lower, minkowski_dot, pauli, GammaRep, Spinor, SpinorMatrix};
use crate::jet::{Amplitude, DiracJet, Jet, PauliJet, ScalarJet};

/// Side of the periodic box used for global charges.
pub const BOX_LENGTH: f64 = 2.0 * std::f64::consts::PI;

/// Tolerance for the on-shell checks of individual modes.
pub const SHELL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub m: f64,
    pub e: f64,
    pub kappa: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar: 1.0,
            c: 1.0,
            m: 1.0,
            e: 0.0,
            kappa: 0.0,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("c", self.c), ("m", self.m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConstants(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.e.is_finite() || !self.kappa.is_finite() {
            return Err(Error::InvalidConstants("e and kappa must be finite".into()));
        }
        Ok(())
    }

    /// mc/ħ, the inverse Compton length.
    pub fn compton_wavenumber(&self) -> f64 {
        self.m * self.c / self.hbar
    }

    pub fn with_charge(mut self, e: f64) -> Self {
        self.e = e;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }
}

/// Contravariant energy-momentum pᵘ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourMomentum(pub [f64; 4]);

impl FourMomentum {
    pub fn energy(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn lower(&self) -> [f64; 4] {
        lower(self.0)
    }

    pub fn square(&self) -> f64 {
        minkowski_dot(self.0, self.0)
    }
}

/// A single plane wave `amplitude · exp(i(k·x − ω x⁰))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWave<const N: usize> {
    pub amplitude: Amplitude<N>,
    pub omega: f64,
    pub k: [f64; 3],
}

impl<const N: usize> PlaneWave<N> {
    /// ∂ᵤ acts on this wave as multiplication by `factor(μ)`.
    fn factors(&self) -> [Complex64; 4] {
        [
            Complex64::new(0.0, -self.omega),
            Complex64::new(0.0, self.k[0]),
            Complex64::new(0.0, self.k[1]),
            Complex64::new(0.0, self.k[2]),
        ]
    }

    fn accumulate(&self, jet: &mut Jet<N>) {
        let x = jet.x;
        let phase = self.k[0] * x[1] + self.k[1] * x[2] + self.k[2] * x[3] - self.omega * x[0];
        let v = self.amplitude * Complex64::from_polar(1.0, phase);
        let f = self.factors();
        jet.value += v;
        for mu in 0..4 {
            jet.d1[mu] += v * f[mu];
            for nu in mu..4 {
                let d = v * (f[mu] * f[nu]);
                jet.d2[mu][nu] += d;
                if nu != mu {
                    jet.d2[nu][mu] += d;
                }
            }
        }
    }
}

/// A finite superposition of plane waves.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Superposition<const N: usize> {
    pub waves: Vec<PlaneWave<N>>,
}

impl<const N: usize> Superposition<N> {
    pub fn jet(&self, x: [f64; 4]) -> Jet<N> {
        let mut jet = Jet::zero(x);
        for w in &self.waves {
            w.accumulate(&mut jet);
        }
        jet
    }

    /// Σ |amplitude|², the unit used to normalise field amplitudes.
    pub fn amplitude_norm_sqr(&self) -> f64 {
        self.waves.iter().map(|w| w.amplitude.norm_squared()).sum()
    }

    /// Largest |kⱼ| over all waves and spatial directions.
    pub fn max_wavenumber(&self) -> f64 {
        self.waves
            .iter()
            .flat_map(|w| w.k.iter().map(|k| k.abs()))
            .fold(0.0, f64::max)
    }
}

/// Anything evaluable as a plane-wave superposition with `N` components.
pub trait Field<const N: usize> {
    fn superposition(&self) -> &Superposition<N>;

    fn constants(&self) -> &PhysicalConstants;

    fn is_on_shell(&self) -> bool;

    fn jet(&self, x: [f64; 4]) -> Jet<N> {
        self.superposition().jet(x)
    }
}

/// Which equation a field solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Equation {
    Dirac,
    KleinGordon,
    Pauli,
    Schrodinger,
}

impl Equation {
    pub fn name(&self) -> &'static str {
        match self {
            Equation::Dirac => "dirac",
            Equation::KleinGordon => "klein-gordon",
            Equation::Pauli => "pauli",
            Equation::Schrodinger => "schrodinger",
        }
    }
}

fn check_lattice(k: [f64; 3]) -> Result<()> {
    let unit = 2.0 * std::f64::consts::PI / BOX_LENGTH;
    for kj in k {
        let n = kj / unit;
        if (n - n.round()).abs() > 1e-9 {
            return Err(Error::OffLattice);
        }
    }
    Ok(())
}

/// Largest |nⱼ| with kⱼ = (2π/L) nⱼ over the given wavevectors.
pub fn max_mode_index<const N: usize>(s: &Superposition<N>) -> usize {
    let unit = 2.0 * std::f64::consts::PI / BOX_LENGTH;
    (s.max_wavenumber() / unit).round() as usize
}

// ---------------------------------------------------------------------------
// Dirac

#[derive(Debug, Clone, PartialEq)]
pub struct DiracMode {
    pub p: FourMomentum,
    pub w: Spinor,
    pub coeff: Complex64,
    pub a_const: [f64; 4],
    pub energy_sign: i8,
    pub spin: u8,
    /// Added to p⁰ after solving the dispersion; non-zero means off-shell.
    pub energy_shift: f64,
}

impl DiracMode {
    /// ‖(γᵘ(pᵤ − eAᵤ) − mc) w‖ / ‖w‖.
    pub fn constraint_residual(&self, rep: &GammaRep, constants: &PhysicalConstants) -> f64 {
        let q: [f64; 4] = std::array::from_fn(|mu| self.p.0[mu] - constants.e * self.a_const[mu]);
        let op = rep.slash(q) - SpinorMatrix::identity() * Complex64::new(constants.m * constants.c, 0.0);
        (op * self.w).norm() / self.w.norm()
    }

    pub fn with_coeff(mut self, coeff: Complex64) -> Self {
        self.coeff = coeff;
        self
    }

    fn plane_wave(&self, hbar: f64) -> PlaneWave<4> {
        let s = self.p.spatial();
        PlaneWave {
            amplitude: self.w * self.coeff,
            omega: self.p.energy() / hbar,
            k: [s[0] / hbar, s[1] / hbar, s[2] / hbar],
        }
    }
}

/// Kinetic momentum q = p − eA for the given spatial momentum, with q⁰ on
/// the requested branch of q·q = m²c².
fn kinetic_momentum(p_spatial: [f64; 3], energy_sign: i8, constants: &PhysicalConstants, a: [f64; 4]) -> [f64; 4] {
    let qs: [f64; 3] = std::array::from_fn(|i| p_spatial[i] - constants.e * a[i + 1]);
    let mc = constants.m * constants.c;
    let q0 = f64::from(energy_sign.signum()) * (qs.iter().map(|x| x * x).sum::<f64>() + mc * mc).sqrt();
    [q0, qs[0], qs[1], qs[2]]
}

/// Plane-wave Dirac mode with the given spatial momentum pⁱ, energy branch
/// and spin index (1 or 2), in a constant potential `a_const`.
///
/// The amplitude is (γᵘqᵤ + mc) applied to a rest-frame seed spinor,
/// normalised to w†w = 1: seeds e₁, e₂ on the positive branch, e₃, e₄ on the
/// negative one.
pub fn dirac_plane_wave(
    p_spatial: [f64; 3],
    energy_sign: i8,
    spin_index: u8,
    constants: &PhysicalConstants,
    a_const: [f64; 4],
) -> Result<DiracMode> {
    constants.validate()?;
    if !(spin_index == 1 || spin_index == 2) {
        return Err(Error::Config(format!("spin index must be 1 or 2, got {spin_index}")));
    }
    if energy_sign != 1 && energy_sign != -1 {
        return Err(Error::Config(format!("energy sign must be ±1, got {energy_sign}")));
    }
    if p_spatial.iter().chain(a_const.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite momentum or potential".into()));
    }
    let rep = GammaRep::standard();
    let q = kinetic_momentum(p_spatial, energy_sign, constants, a_const);
    let seed_index = usize::from(spin_index - 1) + if energy_sign > 0 { 0 } else { 2 };
    let mut seed = Spinor::zeros();
    seed[seed_index] = Complex64::new(1.0, 0.0);

    let projector = rep.slash(q) + SpinorMatrix::identity() * Complex64::new(constants.m * constants.c, 0.0);
    let w = projector * seed;
    let n = w.norm();
    if n < 1e-10 {
        return Err(Error::DegenerateProjector);
    }
    let p0 = q[0] + constants.e * a_const[0];
    Ok(DiracMode {
        p: FourMomentum([p0, p_spatial[0], p_spatial[1], p_spatial[2]]),
        w: w / Complex64::new(n, 0.0),
        coeff: Complex64::new(1.0, 0.0),
        a_const,
        energy_sign,
        spin: spin_index,
        energy_shift: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracField {
    pub modes: Vec<DiracMode>,
    pub constants: PhysicalConstants,
    pub a_const: [f64; 4],
    pub lattice: bool,
    waves: Superposition<4>,
}

impl DiracField {
    /// All modes must share the field's constant potential.
    pub fn new(modes: Vec<DiracMode>, constants: PhysicalConstants, a_const: [f64; 4], lattice: bool) -> Result<Self> {
        constants.validate()?;
        if modes.iter().any(|m| m.a_const != a_const) {
            return Err(Error::Config("every Dirac mode must use the field's constant potential".into()));
        }
        if lattice {
            for m in &modes {
                check_lattice(m.p.spatial().map(|p| p / constants.hbar))?;
            }
        }
        let waves = Superposition {
            waves: modes.iter().map(|m| m.plane_wave(constants.hbar)).collect(),
        };
        Ok(DiracField {
            modes,
            constants,
            a_const,
            lattice,
            waves,
        })
    }

    /// |γᵘ(iħ∂ᵤ − eAᵤ)ψ − mcψ| at `x`.
    pub fn equation_residual(&self, rep: &GammaRep, x: [f64; 4]) -> f64 {
        dirac_operator_residual(&self.jet(x), rep, &self.constants, self.a_const)
    }
}

/// |γᵘ(iħ∂ᵤ − eAᵤ)ψ − mcψ| evaluated on a jet, with A constant.
pub fn dirac_operator_residual(jet: &DiracJet, rep: &GammaRep, k: &PhysicalConstants, a: [f64; 4]) -> f64 {
    let a_low = lower(a);
    let mut out = jet.value * Complex64::new(-k.m * k.c, 0.0);
    for mu in 0..4 {
        let d = jet.d1[mu] * Complex64::new(0.0, k.hbar) - jet.value * Complex64::new(k.e * a_low[mu], 0.0);
        out += rep.gamma(mu) * d;
    }
    out.norm()
}

impl Field<4> for DiracField {
    fn superposition(&self) -> &Superposition<4> {
        &self.waves
    }
    fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }
    fn is_on_shell(&self) -> bool {
        self.modes.iter().all(|m| m.energy_shift == 0.0)
    }
}

// ---------------------------------------------------------------------------
// Klein-Gordon

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMode {
    pub p: FourMomentum,
    pub coeff: Complex64,
    pub energy_sign: i8,
    pub energy_shift: f64,
}

impl ScalarMode {
    /// |pᵘpᵤ − m²c²|.
    pub fn mass_shell_residual(&self, constants: &PhysicalConstants) -> f64 {
        let mc = constants.m * constants.c;
        (self.p.square() - mc * mc).abs()
    }

    pub fn with_coeff(mut self, coeff: Complex64) -> Self {
        self.coeff = coeff;
        self
    }

    fn plane_wave(&self, hbar: f64) -> PlaneWave<1> {
        let s = self.p.spatial();
        PlaneWave {
            amplitude: Amplitude::<1>::new(self.coeff),
            omega: self.p.energy() / hbar,
            k: [s[0] / hbar, s[1] / hbar, s[2] / hbar],
        }
    }
}

/// On-shell Klein-Gordon mode: p⁰ = ±√(|p|² + m²c²).
pub fn kg_plane_wave(p_spatial: [f64; 3], energy_sign: i8, constants: &PhysicalConstants) -> Result<ScalarMode> {
    constants.validate()?;
    if energy_sign != 1 && energy_sign != -1 {
        return Err(Error::Config(format!("energy sign must be ±1, got {energy_sign}")));
    }
    if p_spatial.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite momentum".into()));
    }
    let q = kinetic_momentum(p_spatial, energy_sign, &PhysicalConstants { e: 0.0, ..*constants }, [0.0; 4]);
    Ok(ScalarMode {
        p: FourMomentum(q),
        coeff: Complex64::new(1.0, 0.0),
        energy_sign,
        energy_shift: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KleinGordonField {
    pub modes: Vec<ScalarMode>,
    pub constants: PhysicalConstants,
    pub lattice: bool,
    waves: Superposition<1>,
}

impl KleinGordonField {
    pub fn new(modes: Vec<ScalarMode>, constants: PhysicalConstants, lattice: bool) -> Result<Self> {
        constants.validate()?;
        if lattice {
            for m in &modes {
                check_lattice(m.p.spatial().map(|p| p / constants.hbar))?;
            }
        }
        let waves = Superposition {
            waves: modes.iter().map(|m| m.plane_wave(constants.hbar)).collect(),
        };
        Ok(KleinGordonField {
            modes,
            constants,
            lattice,
            waves,
        })
    }

    /// |∂ᵘ∂ᵤψ + (m²c²/ħ²)ψ| at `x`.
    pub fn equation_residual(&self, x: [f64; 4]) -> f64 {
        kg_operator_residual(&self.jet(x), &self.constants)
    }
}

pub fn kg_operator_residual(jet: &ScalarJet, k: &PhysicalConstants) -> f64 {
    let mu2 = k.compton_wavenumber().powi(2);
    (jet.box_op()[0] + jet.psi() * mu2).norm()
}

impl Field<1> for KleinGordonField {
    fn superposition(&self) -> &Superposition<1> {
        &self.waves
    }
    fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }
    fn is_on_shell(&self) -> bool {
        self.modes.iter().all(|m| m.energy_shift == 0.0)
    }
}

// ---------------------------------------------------------------------------
// Pauli

/// Pauli plane-wave mode: exp(ik·x) times a two-spinor evolving under the
/// constant matrix H = |ħk − eA|²/2m + κB·σ. The evolution is stored as the
/// spectral decomposition of H, one (energy, amplitude) pair per eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliMode {
    pub k: [f64; 3],
    pub seed: Vector2<Complex64>,
    pub coeff: Complex64,
    pub components: Vec<(f64, Vector2<Complex64>)>,
    pub energy_shift: f64,
}

impl PauliMode {
    pub fn with_coeff(mut self, coeff: Complex64) -> Self {
        self.coeff = coeff;
        self
    }

    /// exp(−iHt/ħ) · seed, at k·x = 0.
    pub fn spinor_at(&self, t: f64, hbar: f64) -> Vector2<Complex64> {
        self.components
            .iter()
            .fold(Vector2::zeros(), |acc, (en, a)| {
                acc + a * Complex64::from_polar(1.0, -(en + self.energy_shift) * t / hbar)
            })
    }

    fn plane_waves(&self, hbar: f64) -> impl Iterator<Item = PlaneWave<2>> + '_ {
        self.components.iter().map(move |(en, a)| PlaneWave {
            amplitude: a * self.coeff,
            omega: (en + self.energy_shift) / hbar,
            k: self.k,
        })
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Closed-form Pauli mode. Supported: (e = 0, any κ, uniform B) or
/// (any e, constant A, B = 0); the scalar potential is zero.
pub fn pauli_mode(
    k: [f64; 3],
    seed: [Complex64; 2],
    constants: &PhysicalConstants,
    b_uniform: [f64; 3],
    a_vec: [f64; 3],
) -> Result<PauliMode> {
    constants.validate()?;
    let b_norm = norm3(b_uniform);
    if constants.e != 0.0 && b_norm != 0.0 {
        return Err(Error::UnsupportedPauliConfiguration);
    }
    let kin: [f64; 3] = std::array::from_fn(|i| constants.hbar * k[i] - constants.e * a_vec[i]);
    let kinetic = kin.iter().map(|x| x * x).sum::<f64>() / (2.0 * constants.m);
    let seed = Vector2::new(seed[0], seed[1]);

    let split = constants.kappa * b_norm;
    let components = if split == 0.0 {
        vec![(kinetic, seed)]
    } else {
        let s = pauli();
        let mut n_sigma = nalgebra::Matrix2::<Complex64>::zeros();
        for (sj, bj) in s.iter().zip(b_uniform) {
            n_sigma += sj * Complex64::new(bj / b_norm, 0.0);
        }
        let id = nalgebra::Matrix2::<Complex64>::identity();
        let half = Complex64::new(0.5, 0.0);
        let up = (id + n_sigma) * half;
        let down = (id - n_sigma) * half;
        vec![(kinetic + split, up * seed), (kinetic - split, down * seed)]
    };
    Ok(PauliMode {
        k,
        seed,
        coeff: Complex64::new(1.0, 0.0),
        components,
        energy_shift: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliField {
    pub modes: Vec<PauliMode>,
    pub constants: PhysicalConstants,
    pub a_vec: [f64; 3],
    pub b: [f64; 3],
    pub lattice: bool,
    waves: Superposition<2>,
}

impl PauliField {
    pub fn new(modes: Vec<PauliMode>, constants: PhysicalConstants, a_vec: [f64; 3], b: [f64; 3], lattice: bool) -> Result<Self> {
        constants.validate()?;
        if constants.e != 0.0 && norm3(b) != 0.0 {
            return Err(Error::UnsupportedPauliConfiguration);
        }
        if lattice {
            for m in &modes {
                check_lattice(m.k)?;
            }
        }
        let waves = Superposition {
            waves: modes.iter().flat_map(|m| m.plane_waves(constants.hbar)).collect(),
        };
        Ok(PauliField {
            modes,
            constants,
            a_vec,
            b,
            lattice,
            waves,
        })
    }

    /// |iħ∂ₜφ − [(−iħ∇ − eA)²/2m + κB·σ]φ| at `x` (x⁰ = t).
    pub fn equation_residual(&self, x: [f64; 4]) -> f64 {
        let k = &self.constants;
        let jet = self.jet(x);
        let s = pauli();
        let mut h = -jet.laplacian() * Complex64::new(k.hbar * k.hbar, 0.0);
        let a2: f64 = self.a_vec.iter().map(|a| a * a).sum();
        for j in 0..3 {
            h += jet.d1[j + 1] * Complex64::new(0.0, 2.0 * k.hbar * k.e * self.a_vec[j]);
        }
        h += jet.value * Complex64::new(k.e * k.e * a2, 0.0);
        h /= Complex64::new(2.0 * k.m, 0.0);
        for j in 0..3 {
            h += s[j] * jet.value * Complex64::new(k.kappa * self.b[j], 0.0);
        }
        (jet.d1[0] * Complex64::new(0.0, k.hbar) - h).norm()
    }
}

impl Field<2> for PauliField {
    fn superposition(&self) -> &Superposition<2> {
        &self.waves
    }
    fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }
    fn is_on_shell(&self) -> bool {
        self.modes.iter().all(|m| m.energy_shift == 0.0)
    }
}

// ---------------------------------------------------------------------------
// Schrödinger

#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerMode {
    pub k: [f64; 3],
    pub coeff: Complex64,
    pub energy: f64,
    pub energy_shift: f64,
}

impl SchrodingerMode {
    pub fn with_coeff(mut self, coeff: Complex64) -> Self {
        self.coeff = coeff;
        self
    }

    /// Angular frequency ħk²/2m (plus any off-shell shift).
    pub fn frequency(&self, hbar: f64) -> f64 {
        (self.energy + self.energy_shift) / hbar
    }
}

/// Ψ = exp(i(k·x − ħk²t/2m)), free particle with V = 0.
pub fn schrodinger_mode(k: [f64; 3], constants: &PhysicalConstants) -> Result<SchrodingerMode> {
    constants.validate()?;
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite wavevector".into()));
    }
    let k2: f64 = k.iter().map(|x| x * x).sum();
    Ok(SchrodingerMode {
        k,
        coeff: Complex64::new(1.0, 0.0),
        energy: constants.hbar * constants.hbar * k2 / (2.0 * constants.m),
        energy_shift: 0.0,
    })
}

/// A Schrödinger field, optionally the spatial part of a Pauli spin
/// eigenstate φ = Ψχ with χ†χ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerField {
    pub modes: Vec<SchrodingerMode>,
    pub constants: PhysicalConstants,
    pub spin_state: Option<Vector2<Complex64>>,
    pub lattice: bool,
    waves: Superposition<1>,
}

impl SchrodingerField {
    /// The spin state, if given, is normalised to χ†χ = 1.
    pub fn new(
        modes: Vec<SchrodingerMode>,
        constants: PhysicalConstants,
        spin_state: Option<[Complex64; 2]>,
        lattice: bool,
    ) -> Result<Self> {
        constants.validate()?;
        let spin_state = match spin_state {
            None => None,
            Some(chi) => {
                let v = Vector2::new(chi[0], chi[1]);
                let n = v.norm();
                if !(n > 1e-12) || !n.is_finite() {
                    return Err(Error::Config("spin eigenstate must be non-zero".into()));
                }
                Some(v / Complex64::new(n, 0.0))
            }
        };
        if lattice {
            for m in &modes {
                check_lattice(m.k)?;
            }
        }
        let waves = Superposition {
            waves: modes
                .iter()
                .map(|m| PlaneWave {
                    amplitude: Amplitude::<1>::new(m.coeff),
                    omega: m.frequency(constants.hbar),
                    k: m.k,
                })
                .collect(),
        };
        Ok(SchrodingerField {
            modes,
            constants,
            spin_state,
            lattice,
            waves,
        })
    }

    /// s = (ħ/2) χ†σχ, if the field carries a spin eigenstate.
    pub fn spin_vector(&self) -> Option<[f64; 3]> {
        self.spin_state.map(|chi| spin_vector(&chi, self.constants.hbar))
    }

    /// |iħ∂ₜΨ + (ħ²/2m)∇²Ψ| at `x` (x⁰ = t).
    pub fn equation_residual(&self, x: [f64; 4]) -> f64 {
        let k = &self.constants;
        let jet = self.jet(x);
        (jet.d(0) * Complex64::new(0.0, k.hbar) + jet.laplacian()[0] * (k.hbar * k.hbar / (2.0 * k.m))).norm()
    }
}

/// (ħ/2) χ†σχ.
pub fn spin_vector(chi: &Vector2<Complex64>, hbar: f64) -> [f64; 3] {
    let s = pauli();
    std::array::from_fn(|j| 0.5 * hbar * chi.dotc(&(s[j] * chi)).re)
}

impl Field<1> for SchrodingerField {
    fn superposition(&self) -> &Superposition<1> {
        &self.waves
    }
    fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }
    fn is_on_shell(&self) -> bool {
        self.modes.iter().all(|m| m.energy_shift == 0.0)
    }
}

// ---------------------------------------------------------------------------
// Tagged field

#[derive(Debug, Clone, PartialEq)]
pub enum WaveField {
    Dirac(DiracField),
    KleinGordon(KleinGordonField),
    Pauli(PauliField),
    Schrodinger(SchrodingerField),
}

impl WaveField {
    pub fn equation(&self) -> Equation {
        match self {
            WaveField::Dirac(_) => Equation::Dirac,
            WaveField::KleinGordon(_) => Equation::KleinGordon,
            WaveField::Pauli(_) => Equation::Pauli,
            WaveField::Schrodinger(_) => Equation::Schrodinger,
        }
    }

    pub fn is_on_shell(&self) -> bool {
        match self {
            WaveField::Dirac(f) => f.is_on_shell(),
            WaveField::KleinGordon(f) => f.is_on_shell(),
            WaveField::Pauli(f) => f.is_on_shell(),
            WaveField::Schrodinger(f) => f.is_on_shell(),
        }
    }

    pub fn constants(&self) -> &PhysicalConstants {
        match self {
            WaveField::Dirac(f) => &f.constants,
            WaveField::KleinGordon(f) => &f.constants,
            WaveField::Pauli(f) => &f.constants,
            WaveField::Schrodinger(f) => &f.constants,
        }
    }

    /// Residual of the field's own wave equation at `x`.
    pub fn equation_residual(&self, x: [f64; 4]) -> f64 {
        match self {
            WaveField::Dirac(f) => f.equation_residual(&GammaRep::standard(), x),
            WaveField::KleinGordon(f) => f.equation_residual(x),
            WaveField::Pauli(f) => f.equation_residual(x),
            WaveField::Schrodinger(f) => f.equation_residual(x),
        }
    }

    pub fn jet(&self, x: [f64; 4]) -> FieldJet {
        match self {
            WaveField::Dirac(f) => FieldJet::Dirac(f.jet(x)),
            WaveField::KleinGordon(f) => FieldJet::Scalar(f.jet(x)),
            WaveField::Pauli(f) => FieldJet::Pauli(f.jet(x)),
            WaveField::Schrodinger(f) => FieldJet::Scalar(f.jet(x)),
        }
    }
}

/// A jet of whichever component count the field has.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldJet {
    Dirac(DiracJet),
    Scalar(ScalarJet),
    Pauli(PauliJet),
}

pub fn eval_jet(field: &WaveField, x: [f64; 4]) -> FieldJet {
    field.jet(x)
}

fn shift_magnitude(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.5..1.5)
}

/// Same modes with every energy moved off shell by an O(1) seeded amount.
///
/// The shift has the sign of the mode energy, so |p·p − m²c²| ≥ 0.5·(2mc + 0.5)
/// for scalar modes and the Dirac constraint residual is at least 0.5.
pub fn offshell_variant(field: &WaveField, seed: u64) -> Result<WaveField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match field {
        WaveField::Dirac(f) => {
            let scale = f.constants.m * f.constants.c;
            let modes = f
                .modes
                .iter()
                .map(|m| {
                    let mut m = m.clone();
                    let s = shift_magnitude(&mut rng) * scale * f64::from(m.energy_sign);
                    m.energy_shift += s;
                    m.p.0[0] += s;
                    m
                })
                .collect();
            WaveField::Dirac(DiracField::new(modes, f.constants, f.a_const, f.lattice)?)
        }
        WaveField::KleinGordon(f) => {
            let scale = f.constants.m * f.constants.c;
            let modes = f
                .modes
                .iter()
                .map(|m| {
                    let mut m = m.clone();
                    let s = shift_magnitude(&mut rng) * scale * f64::from(m.energy_sign);
                    m.energy_shift += s;
                    m.p.0[0] += s;
                    m
                })
                .collect();
            WaveField::KleinGordon(KleinGordonField::new(modes, f.constants, f.lattice)?)
        }
        WaveField::Pauli(f) => {
            let scale = f.constants.hbar * f.constants.hbar / f.constants.m;
            let modes = f
                .modes
                .iter()
                .map(|m| {
                    let mut m = m.clone();
                    m.energy_shift += shift_magnitude(&mut rng) * scale;
                    m
                })
                .collect();
            WaveField::Pauli(PauliField::new(modes, f.constants, f.a_vec, f.b, f.lattice)?)
        }
        WaveField::Schrodinger(f) => {
            let scale = f.constants.hbar * f.constants.hbar / f.constants.m;
            let modes = f
                .modes
                .iter()
                .map(|m| {
                    let mut m = m.clone();
                    m.energy_shift += shift_magnitude(&mut rng) * scale;
                    m
                })
                .collect();
            let chi = f.spin_state.map(|v| [v[0], v[1]]);
            WaveField::Schrodinger(SchrodingerField::new(modes, f.constants, chi, f.lattice)?)
        }
    })
}

// ---------------------------------------------------------------------------
// Seeded random fields

/// Random complex coefficient with modulus in [0.5, 1] and uniform phase.
pub fn random_coeff(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.5..1.0), rng.random_range(0.0..std::f64::consts::TAU))
}

/// How spatial momenta of random fields are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentumSampling {
    /// Uniform in [−r, r]³.
    Uniform(f64),
    /// Box-lattice momenta ħ(2π/L)n with integer |nⱼ| ≤ max_index.
    Lattice(i32),
}

impl MomentumSampling {
    fn draw(&self, rng: &mut impl Rng, hbar: f64) -> [f64; 3] {
        match *self {
            MomentumSampling::Uniform(r) => std::array::from_fn(|_| rng.random_range(-r..=r)),
            MomentumSampling::Lattice(n) => {
                let unit = hbar * 2.0 * std::f64::consts::PI / BOX_LENGTH;
                std::array::from_fn(|_| f64::from(rng.random_range(-n..=n)) * unit)
            }
        }
    }

    fn is_lattice(&self) -> bool {
        matches!(self, MomentumSampling::Lattice(_))
    }
}

fn random_sign(rng: &mut impl Rng) -> i8 {
    if rng.random_bool(0.5) {
        1
    } else {
        -1
    }
}

/// Dirac field of `n_modes` random modes mixing both energy branches and spins.
pub fn random_dirac_field(
    rng: &mut impl Rng,
    n_modes: usize,
    constants: &PhysicalConstants,
    a_const: [f64; 4],
    sampling: MomentumSampling,
) -> Result<DiracField> {
    let mut modes = Vec::with_capacity(n_modes);
    for i in 0..n_modes {
        let p = sampling.draw(rng, constants.hbar);
        // alternate branches so every field mixes them
        let sign = if i < 2 { [1, -1][i] } else { random_sign(rng) };
        let spin = if rng.random_bool(0.5) { 1 } else { 2 };
        modes.push(dirac_plane_wave(p, sign, spin, constants, a_const)?.with_coeff(random_coeff(rng)));
    }
    DiracField::new(modes, *constants, a_const, sampling.is_lattice())
}

pub fn random_kg_field(
    rng: &mut impl Rng,
    n_modes: usize,
    constants: &PhysicalConstants,
    sampling: MomentumSampling,
) -> Result<KleinGordonField> {
    let mut modes = Vec::with_capacity(n_modes);
    for i in 0..n_modes {
        let p = sampling.draw(rng, constants.hbar);
        let sign = if i < 2 { [1, -1][i] } else { random_sign(rng) };
        modes.push(kg_plane_wave(p, sign, constants)?.with_coeff(random_coeff(rng)));
    }
    KleinGordonField::new(modes, *constants, sampling.is_lattice())
}

pub fn random_pauli_field(
    rng: &mut impl Rng,
    n_modes: usize,
    constants: &PhysicalConstants,
    b_uniform: [f64; 3],
    a_vec: [f64; 3],
    sampling: MomentumSampling,
) -> Result<PauliField> {
    let mut modes = Vec::with_capacity(n_modes);
    for _ in 0..n_modes {
        let k = sampling.draw(rng, 1.0);
        let seed = [random_coeff(rng), random_coeff(rng)];
        modes.push(pauli_mode(k, seed, constants, b_uniform, a_vec)?.with_coeff(random_coeff(rng)));
    }
    PauliField::new(modes, *constants, a_vec, b_uniform, sampling.is_lattice())
}

pub fn random_schrodinger_field(
    rng: &mut impl Rng,
    n_modes: usize,
    constants: &PhysicalConstants,
    spin_state: Option<[Complex64; 2]>,
    sampling: MomentumSampling,
) -> Result<SchrodingerField> {
    let mut modes = Vec::with_capacity(n_modes);
    for _ in 0..n_modes {
        let k = sampling.draw(rng, 1.0);
        modes.push(schrodinger_mode(k, constants)?.with_coeff(random_coeff(rng)));
    }
    SchrodingerField::new(modes, *constants, spin_state, sampling.is_lattice())
}

/// Uniform point in [−r, r]⁴.
pub fn random_point(rng: &mut impl Rng, r: f64) -> [f64; 4] {
    std::array::from_fn(|_| rng.random_range(-r..=r))
}

pub fn random_spinor(rng: &mut impl Rng) -> Spinor {
    Vector4::from_fn(|_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dirac_rest_mode_positive() {
        let k = PhysicalConstants::default();
        let m = dirac_plane_wave([0.0; 3], 1, 1, &k, [0.0; 4]).unwrap();
        assert_eq!(m.p.energy(), 1.0);
        assert!((m.w - Vector4::new(c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.))).norm() < 1e-15);
    }

    #[test]
    fn dirac_rest_mode_negative() {
        let k = PhysicalConstants::default();
        let m = dirac_plane_wave([0.0; 3], -1, 1, &k, [0.0; 4]).unwrap();
        assert_eq!(m.p.energy(), -1.0);
        assert!((m.w - Vector4::new(c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.))).norm() < 1e-15);
    }

    #[test]
    fn dirac_mode_with_potential_satisfies_constraint() {
        let rep = GammaRep::standard();
        let k = PhysicalConstants::default().with_charge(0.8);
        let m = dirac_plane_wave([0.7, -0.3, 0.2], 1, 2, &k, [0.1, 0.0, 0.0, 0.2]).unwrap();
        assert!(m.constraint_residual(&rep, &k) <= 1e-12);
        assert!((m.w.norm_squared() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn dirac_modes_satisfy_constraint_all_seeds() {
        let rep = GammaRep::standard();
        let k = PhysicalConstants { hbar: 0.7, c: 1.3, m: 0.9, e: -0.4, kappa: 0.0 };
        for sign in [1, -1] {
            for spin in [1, 2] {
                let m = dirac_plane_wave([1.5, 0.2, -2.0], sign, spin, &k, [0.3, -0.2, 0.5, 0.1]).unwrap();
                assert!(m.constraint_residual(&rep, &k) <= 1e-12);
            }
        }
    }

    #[test]
    fn dirac_rejects_bad_spin() {
        let k = PhysicalConstants::default();
        assert!(dirac_plane_wave([0.0; 3], 1, 3, &k, [0.0; 4]).is_err());
    }

    #[test]
    fn kg_dispersion() {
        let k = PhysicalConstants::default();
        assert_eq!(kg_plane_wave([0.0; 3], 1, &k).unwrap().p.energy(), 1.0);
        let m = kg_plane_wave([3.0, 4.0, 0.0], 1, &k).unwrap();
        assert!((m.p.energy() - 26f64.sqrt()).abs() < 1e-15);
        let m = kg_plane_wave([1.0, 0.0, 0.0], -1, &k).unwrap();
        assert!((m.p.energy() + 2f64.sqrt()).abs() < 1e-15);
        assert!(m.mass_shell_residual(&k) <= 1e-12);
    }

    #[test]
    fn pauli_sigma3_eigenstate_phase() {
        let b = 0.6;
        let k = PhysicalConstants::default().with_kappa(0.9);
        let m = pauli_mode([0.0; 3], [c(1., 0.), c(0., 0.)], &k, [0.0, 0.0, b], [0.0; 3]).unwrap();
        for t in [0.0, 0.4, 2.5, -3.0] {
            let phi = m.spinor_at(t, k.hbar);
            let expect = Complex64::from_polar(1.0, -k.kappa * b * t / k.hbar);
            assert!((phi[0] - expect).norm() < 1e-14);
            assert!(phi[1].norm() < 1e-14);
        }
    }

    #[test]
    fn pauli_precession_is_unitary() {
        let k = PhysicalConstants::default().with_kappa(1.1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = pauli_mode([0.0; 3], [c(s, 0.), c(s, 0.)], &k, [0.0, 0.0, 0.7], [0.0; 3]).unwrap();
        for t in [0.0, 0.3, 1.7, 5.0] {
            assert!((m.spinor_at(t, k.hbar).norm_squared() - 1.0).abs() < 1e-14);
        }
        // the transverse component actually precesses
        let a = m.spinor_at(0.0, 1.0);
        let b = m.spinor_at(1.0, 1.0);
        assert!((a[0].conj() * a[1] - b[0].conj() * b[1]).norm() > 0.1);
    }

    #[test]
    fn pauli_free_frequency() {
        let k = PhysicalConstants::default();
        let m = pauli_mode([1.0, 0.0, 0.0], [c(1., 0.), c(0., 0.)], &k, [0.0; 3], [0.0; 3]).unwrap();
        assert_eq!(m.components.len(), 1);
        assert!((m.components[0].0 / k.hbar - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pauli_rejects_charge_with_field() {
        let k = PhysicalConstants::default().with_charge(1.0);
        let err = pauli_mode([0.0; 3], [c(1., 0.), c(0., 0.)], &k, [0.0, 0.0, 1.0], [0.0; 3]).unwrap_err();
        assert_eq!(err.to_string(), "no closed-form mode for this configuration");
    }

    #[test]
    fn pauli_fields_solve_equation() {
        let mut rng = seeded_rng(11);
        let k1 = PhysicalConstants::default().with_kappa(0.7);
        let f1 = random_pauli_field(&mut rng, 3, &k1, [0.3, -0.5, 0.8], [0.0; 3], MomentumSampling::Uniform(2.0)).unwrap();
        let k2 = PhysicalConstants::default().with_charge(0.6);
        let f2 = random_pauli_field(&mut rng, 3, &k2, [0.0; 3], [0.4, 0.1, -0.3], MomentumSampling::Uniform(2.0)).unwrap();
        for _ in 0..50 {
            let x = random_point(&mut rng, 5.0);
            assert!(f1.equation_residual(x) <= 1e-11);
            assert!(f2.equation_residual(x) <= 1e-11);
        }
    }

    #[test]
    fn schrodinger_modes() {
        let k = PhysicalConstants::default();
        let m = schrodinger_mode([0.0; 3], &k).unwrap();
        let f = SchrodingerField::new(vec![m], k, None, false).unwrap();
        let j = f.jet([1.0, 2.0, 3.0, 4.0]);
        assert!((j.psi() - c(1., 0.)).norm() < 1e-15);

        let m = schrodinger_mode([1.0, 0.0, 0.0], &k).unwrap();
        assert!((m.frequency(k.hbar) - 0.5).abs() < 1e-15);

        let m2 = schrodinger_mode([0.0, -1.0, 2.0], &k).unwrap().with_coeff(c(0.3, 0.2));
        let f = SchrodingerField::new(vec![m, m2], k, None, false).unwrap();
        let mut rng = seeded_rng(3);
        for _ in 0..20 {
            assert!(f.equation_residual(random_point(&mut rng, 5.0)) <= 1e-12);
        }
    }

    #[test]
    fn offshell_dirac_violates_constraint() {
        let rep = GammaRep::standard();
        let k = PhysicalConstants::default();
        let f = random_dirac_field(&mut seeded_rng(1), 5, &k, [0.0; 4], MomentumSampling::Uniform(2.0)).unwrap();
        let off = offshell_variant(&WaveField::Dirac(f.clone()), 7).unwrap();
        let WaveField::Dirac(off) = off else { unreachable!() };
        assert!(!off.is_on_shell());
        for m in &off.modes {
            assert!(m.constraint_residual(&rep, &k) >= 0.1);
        }
        let again = offshell_variant(&WaveField::Dirac(f), 7).unwrap();
        assert_eq!(again, WaveField::Dirac(off));
    }

    #[test]
    fn offshell_kg_violates_equation() {
        let k = PhysicalConstants::default();
        let f = random_kg_field(&mut seeded_rng(2), 5, &k, MomentumSampling::Uniform(2.0)).unwrap();
        let x = [0.3, -1.2, 2.2, 0.7];
        assert!(f.equation_residual(x) <= 1e-12);
        let off = offshell_variant(&WaveField::KleinGordon(f), 3).unwrap();
        let r = off.equation_residual(x);
        let scale = match &off {
            WaveField::KleinGordon(f) => f.jet(x).psi().norm(),
            _ => unreachable!(),
        };
        assert!(r > 0.1 * scale, "residual {r} vs |psi| {scale}");
    }

    #[test]
    fn kg_jet_single_mode_derivative() {
        let k = PhysicalConstants::default();
        let m = kg_plane_wave([0.4, -0.2, 1.1], 1, &k).unwrap();
        let p_low = m.p.lower();
        let f = KleinGordonField::new(vec![m], k, false).unwrap();
        let j = f.jet([0.5, 1.0, -2.0, 3.0]);
        for mu in 0..4 {
            let expect = Complex64::new(0.0, -p_low[mu]) * j.psi();
            assert!((j.d(mu) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn on_shell_kg_field_solves_equation() {
        let k = PhysicalConstants::default();
        let mut rng = seeded_rng(5);
        let f = random_kg_field(&mut rng, 6, &k, MomentumSampling::Uniform(2.0)).unwrap();
        for _ in 0..100 {
            assert!(f.equation_residual(random_point(&mut rng, 5.0)) <= 1e-11);
        }
    }

    #[test]
    fn on_shell_dirac_field_solves_equation() {
        let rep = GammaRep::standard();
        let k = PhysicalConstants::default().with_charge(0.5);
        let mut rng = seeded_rng(8);
        let f = random_dirac_field(&mut rng, 6, &k, [0.2, 0.1, -0.3, 0.4], MomentumSampling::Uniform(2.0)).unwrap();
        for _ in 0..100 {
            let x = random_point(&mut rng, 5.0);
            let scale = f.jet(x).value.norm().max(1.0);
            assert!(f.equation_residual(&rep, x) <= 1e-11 * scale);
        }
    }

    #[test]
    fn jet_is_linear_and_symmetric() {
        let k = PhysicalConstants::default();
        let mut rng = seeded_rng(9);
        let f = random_dirac_field(&mut rng, 4, &k, [0.0; 4], MomentumSampling::Uniform(2.0)).unwrap();
        let x = [0.1, 0.2, 0.3, 0.4];
        let whole = f.jet(x);
        assert_eq!(whole.d2_asymmetry(), 0.0);
        let mut sum = Jet::<4>::zero(x);
        for m in &f.modes {
            let single = DiracField::new(vec![m.clone()], k, [0.0; 4], false).unwrap();
            sum = sum.add(&single.jet(x));
        }
        assert!((sum.value - whole.value).norm() < 1e-14);
        for mu in 0..4 {
            assert!((sum.d1[mu] - whole.d1[mu]).norm() < 1e-13);
        }
        let lam = c(0.3, -1.2);
        let scaled: Vec<_> = f.modes.iter().map(|m| m.clone().with_coeff(m.coeff * lam)).collect();
        let g = DiracField::new(scaled, k, [0.0; 4], false).unwrap();
        assert!((g.jet(x).value - whole.value * lam).norm() < 1e-13);
    }

    #[test]
    fn lattice_flag_enforced() {
        let k = PhysicalConstants::default();
        let m = kg_plane_wave([0.5, 0.0, 0.0], 1, &k).unwrap();
        assert!(matches!(KleinGordonField::new(vec![m], k, true), Err(Error::OffLattice)));
        let m = kg_plane_wave([2.0, -1.0, 0.0], 1, &k).unwrap();
        assert!(KleinGordonField::new(vec![m], k, true).is_ok());
    }

    #[test]
    fn invalid_constants_rejected() {
        let k = PhysicalConstants { m: 0.0, ..Default::default() };
        assert!(kg_plane_wave([0.0; 3], 1, &k).is_err());
    }
}
