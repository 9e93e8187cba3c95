//! Numerical verification: finite-difference divergences, conservation
//! sweeps, periodic-box charges and the on-shell/off-shell classification of
//! currents.

use num_complex::Complex64;
use serde::Serialize;

use crate::currents::{self, FourVector};
use crate::solution::{max_mode_index, offshell_variant, random_point, seeded_rng, Equation, Field, FieldJet, WaveField, BOX_LENGTH};
use crate::{Error, Result};

/// Base step of the difference stencil.
pub const FD_STEP: f64 = 1e-3;

/// Half-width of the sampling region [−5, 5]⁴.
pub const SWEEP_RADIUS: f64 = 5.0;

/// Default relative tolerance of conservation sweeps.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A current from the registry, with its constants. `eval` reads any
/// external data (potential, spin vector) from the field it is applied to.
#[derive(Debug, Clone, PartialEq)]
pub enum Current {
    /// g ψ̄γᵘψ + hᵘ.
    Dirac { g: f64, h: [f64; 4] },
    /// The probability current cψ̄γᵘψ.
    DiracProbability,
    /// k ∂ᵥ(ψ̄γᵘᵛψ).
    DiracBivector { k: f64 },
    GordonConvective,
    GordonInternal,
    DiracSecondOrder,
    /// (iħ/2m)(ψ*∂ᵘψ − ψ∂ᵘψ*).
    KleinGordon,
    /// k ∂ᵥ(∂ᵘψ∂ᵛψ* − ∂ᵛψ∂ᵘψ*).
    KgBivector { k: f64 },
    KgSecondOrder,
    /// kᵥTᵘᵛ with the symmetric Klein-Gordon tensor.
    KgStress { k: [f64; 4] },
    Pauli,
    /// With `spin`, the field's spin vector adds (1/m)∇ρ×s.
    Schrodinger { spin: bool },
    /// Pointwise sum of several currents.
    Sum(Vec<Current>),
}

impl Current {
    pub fn name(&self) -> String {
        match self {
            Current::Dirac { .. } => "dirac_current".into(),
            Current::DiracProbability => "dirac_current".into(),
            Current::DiracBivector { .. } => "bivector_current".into(),
            Current::GordonConvective => "gordon_convective".into(),
            Current::GordonInternal => "gordon_internal".into(),
            Current::DiracSecondOrder => "dirac_second_order".into(),
            Current::KleinGordon => "kg_current".into(),
            Current::KgBivector { .. } => "kg_bivector_current".into(),
            Current::KgSecondOrder => "kg_second_order".into(),
            Current::KgStress { .. } => "kg_stress_current".into(),
            Current::Pauli => "pauli_current".into(),
            Current::Schrodinger { spin: false } => "schrodinger_current".into(),
            Current::Schrodinger { spin: true } => "schrodinger_spin_current".into(),
            Current::Sum(parts) => parts.iter().map(Current::name).collect::<Vec<_>>().join("+"),
        }
    }

    fn incompatible(&self, field: &WaveField) -> Error {
        Error::IncompatibleCurrent {
            current: self.name(),
            equation: field.equation().name(),
        }
    }

    /// The current at one jet of `field`.
    pub fn eval(&self, field: &WaveField, jet: &FieldJet) -> Result<FourVector> {
        let k = field.constants();
        match (self, field, jet) {
            (Current::Sum(parts), _, _) => parts
                .iter()
                .try_fold(FourVector::zero(), |acc, c| Ok(acc + c.eval(field, jet)?)),
            (Current::Dirac { g, h }, WaveField::Dirac(_), FieldJet::Dirac(j)) => Ok(currents::dirac_current(j, *g, *h)),
            (Current::DiracProbability, WaveField::Dirac(_), FieldJet::Dirac(j)) => Ok(currents::dirac_probability_current(j, k)),
            (Current::DiracBivector { k: kk }, WaveField::Dirac(_), FieldJet::Dirac(j)) => Ok(currents::bivector_current(j, *kk)),
            (Current::GordonConvective, WaveField::Dirac(f), FieldJet::Dirac(j)) => {
                Ok(currents::gordon_decomposition(j, k, f.a_const).0)
            }
            (Current::GordonInternal, WaveField::Dirac(f), FieldJet::Dirac(j)) => {
                Ok(currents::gordon_decomposition(j, k, f.a_const).1)
            }
            (Current::DiracSecondOrder, WaveField::Dirac(_), FieldJet::Dirac(j)) => Ok(currents::dirac_second_order(j, k)),
            (Current::KleinGordon, WaveField::KleinGordon(_), FieldJet::Scalar(j)) => Ok(currents::kg_probability_current(j, k)),
            (Current::KgBivector { k: kk }, WaveField::KleinGordon(_), FieldJet::Scalar(j)) => {
                Ok(currents::kg_bivector_current(j, *kk))
            }
            (Current::KgSecondOrder, WaveField::KleinGordon(_), FieldJet::Scalar(j)) => Ok(currents::kg_second_order(j, k)),
            (Current::KgStress { k: kv }, WaveField::KleinGordon(_), FieldJet::Scalar(j)) => {
                Ok(currents::kg_stress_current(j, k, *kv))
            }
            (Current::Pauli, WaveField::Pauli(f), FieldJet::Pauli(j)) => Ok(currents::pauli_four_current(j, k, f.a_vec)),
            (Current::Schrodinger { spin }, WaveField::Schrodinger(f), FieldJet::Scalar(j)) => {
                let s = if *spin {
                    Some(f.spin_vector().ok_or_else(|| self.incompatible(field))?)
                } else {
                    None
                };
                Ok(currents::schrodinger_four_current(j, k, s))
            }
            _ => Err(self.incompatible(field)),
        }
    }

    /// The current at `x`.
    pub fn at(&self, field: &WaveField, x: [f64; 4]) -> Result<FourVector> {
        self.eval(field, &field.jet(x))
    }
}

/// Currents whose conservation is classified by [`offshell_discrimination`].
pub fn registered_currents(equation: Equation) -> Vec<Current> {
    match equation {
        Equation::Dirac => vec![
            Current::DiracProbability,
            Current::DiracBivector { k: 1.0 },
            Current::GordonConvective,
            Current::DiracSecondOrder,
        ],
        Equation::KleinGordon => vec![
            Current::KleinGordon,
            Current::KgBivector { k: 1.0 },
            Current::KgSecondOrder,
            Current::KgStress { k: [1.0, 0.0, 0.0, 0.0] },
        ],
        Equation::Pauli => vec![Current::Pauli],
        Equation::Schrodinger => vec![Current::Schrodinger { spin: false }],
    }
}

/// Whether a registered current is expected to be conserved for every field
/// rather than only on solutions.
pub fn identically_conserved(current: &Current) -> bool {
    matches!(
        current,
        Current::DiracBivector { .. } | Current::GordonInternal | Current::KgBivector { .. }
    )
}

// ---------------------------------------------------------------------------
// Divergence

fn check_finite(v: &[FourVector]) -> Result<()> {
    if v.iter().all(FourVector::is_finite) {
        Ok(())
    } else {
        Err(Error::StencilEvaluation)
    }
}

/// ∂ᵤjᵘ at `x` for every current returned by `eval`.
///
/// Each ∂ᵤ uses the fourth-order central difference
/// [−f(2h) + 8f(h) − 8f(−h) + f(−2h)]/12h at steps h and h/2, combined by one
/// Richardson level (16·D(h/2) − D(h))/15.
pub fn divergence_of<F>(mut eval: F, x: [f64; 4]) -> Result<Vec<Complex64>>
where
    F: FnMut([f64; 4]) -> Result<Vec<FourVector>>,
{
    let h = FD_STEP;
    let mut out: Option<Vec<Complex64>> = None;
    for mu in 0..4 {
        let mut sample = |s: f64| -> Result<Vec<Complex64>> {
            let mut y = x;
            y[mu] += s;
            let v = eval(y)?;
            check_finite(&v)?;
            Ok(v.iter().map(|j| j.0[mu]).collect())
        };
        let offsets = [2.0 * h, h, h / 2.0, -h / 2.0, -h, -2.0 * h];
        let vals = offsets.iter().map(|&s| sample(s)).collect::<Result<Vec<_>>>()?;
        let n = vals[0].len();
        let acc = out.get_or_insert_with(|| vec![Complex64::default(); n]);
        if acc.len() != n {
            return Err(Error::StencilEvaluation);
        }
        for t in 0..n {
            let d = |fp2: Complex64, fp1: Complex64, fm1: Complex64, fm2: Complex64, step: f64| {
                (-fp2 + fp1 * 8.0 - fm1 * 8.0 + fm2) / (12.0 * step)
            };
            let d_h = d(vals[0][t], vals[1][t], vals[4][t], vals[5][t], h);
            let d_h2 = d(vals[1][t], vals[2][t], vals[3][t], vals[4][t], h / 2.0);
            acc[t] += (d_h2 * 16.0 - d_h) / 15.0;
        }
    }
    Ok(out.unwrap_or_default())
}

/// ∂ᵤjᵘ of one registered current at `x`.
pub fn divergence_at(current: &Current, field: &WaveField, x: [f64; 4]) -> Result<Complex64> {
    let v = divergence_of(|y| Ok(vec![current.at(field, y)?]), x)?;
    Ok(v[0])
}

/// Outcome of a conservation sweep. `pass` ⇔ max_residual ≤ tolerance·max(scale, 1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub current: String,
    pub field: String,
    pub n_points: usize,
    pub max_residual: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SweepReport {
    /// max_residual / max(scale, 1).
    pub fn relative_residual(&self) -> f64 {
        self.max_residual / self.scale.max(1.0)
    }
}

/// Short description of a field for reports.
pub fn describe_field(field: &WaveField) -> String {
    let (n, shell) = match field {
        WaveField::Dirac(f) => (f.modes.len(), f.is_on_shell()),
        WaveField::KleinGordon(f) => (f.modes.len(), f.is_on_shell()),
        WaveField::Pauli(f) => (f.modes.len(), f.is_on_shell()),
        WaveField::Schrodinger(f) => (f.modes.len(), f.is_on_shell()),
    };
    format!(
        "{} {n}-mode {}",
        field.equation().name(),
        if shell { "on-shell" } else { "off-shell" }
    )
}

/// Divergence at `n_points` seeded points of [−5, 5]⁴; the scale is the
/// largest |jᵘ| met at those points.
pub fn conservation_sweep(current: &Current, field: &WaveField, n_points: usize, seed: u64, tol: f64) -> Result<SweepReport> {
    if n_points == 0 {
        return Err(Error::Config("a sweep needs at least one point".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut max_residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for _ in 0..n_points {
        let x = random_point(&mut rng, SWEEP_RADIUS);
        let j = current.at(field, x)?;
        if !j.is_finite() {
            return Err(Error::StencilEvaluation);
        }
        scale = scale.max(j.max_abs());
        max_residual = max_residual.max(divergence_at(current, field, x)?.norm());
    }
    Ok(SweepReport {
        current: current.name(),
        field: describe_field(field),
        n_points,
        max_residual,
        scale,
        tolerance: tol,
        pass: max_residual <= tol * scale.max(1.0),
    })
}

// ---------------------------------------------------------------------------
// Global charges

fn lattice_info(field: &WaveField) -> (bool, usize, f64) {
    match field {
        WaveField::Dirac(f) => (f.lattice, max_mode_index(f.superposition()), f.constants.c),
        WaveField::KleinGordon(f) => (f.lattice, max_mode_index(f.superposition()), f.constants.c),
        WaveField::Pauli(f) => (f.lattice, max_mode_index(f.superposition()), 1.0),
        WaveField::Schrodinger(f) => (f.lattice, max_mode_index(f.superposition()), 1.0),
    }
}

/// Smallest grid for which the rectangle rule integrates the field's
/// bilinears exactly.
pub fn required_grid(field: &WaveField) -> usize {
    2 * lattice_info(field).1 + 2
}

/// ∫ j⁰ d³x over the periodic box [0, L)³ at time `t` by the rectangle rule
/// on grid_n³ points, returned as a complex number.
pub fn global_charge_complex(current: &Current, field: &WaveField, t: f64, grid_n: usize) -> Result<Complex64> {
    box_sum(current, field, t, grid_n, |z| z)
}

/// ∫ |j⁰| d³x, the natural scale for relative charge comparisons when the
/// charge itself may nearly cancel.
pub fn global_charge_scale(current: &Current, field: &WaveField, t: f64, grid_n: usize) -> Result<f64> {
    Ok(box_sum(current, field, t, grid_n, |z| Complex64::new(z.norm(), 0.0))?.re)
}

fn box_sum(current: &Current, field: &WaveField, t: f64, grid_n: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Complex64> {
    let (lattice, _, c) = lattice_info(field);
    if !lattice {
        return Err(Error::OffLattice);
    }
    let required = required_grid(field);
    if grid_n < required {
        return Err(Error::AliasedQuadrature { grid_n, required });
    }
    let dx = BOX_LENGTH / grid_n as f64;
    let x0 = c * t;
    let mut sum = Complex64::default();
    for i in 0..grid_n {
        for j in 0..grid_n {
            for k in 0..grid_n {
                let x = [x0, i as f64 * dx, j as f64 * dx, k as f64 * dx];
                let v = current.at(field, x)?;
                if !v.is_finite() {
                    return Err(Error::StencilEvaluation);
                }
                sum += f(v.0[0]);
            }
        }
    }
    Ok(sum * dx.powi(3))
}

/// Real part of [`global_charge_complex`].
pub fn global_charge(current: &Current, field: &WaveField, t: f64, grid_n: usize) -> Result<f64> {
    Ok(global_charge_complex(current, field, t, grid_n)?.re)
}

/// Charges of several currents at one time, with their largest pairwise
/// difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargeComparison {
    pub charges: Vec<(String, f64)>,
    pub max_difference: f64,
}

pub fn charge_equality(currents: &[Current], field: &WaveField, t: f64, grid_n: usize) -> Result<ChargeComparison> {
    let charges = currents
        .iter()
        .map(|c| Ok((c.name(), global_charge(c, field, t, grid_n)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut max_difference: f64 = 0.0;
    for (i, a) in charges.iter().enumerate() {
        for b in &charges[i + 1..] {
            max_difference = max_difference.max((a.1 - b.1).abs());
        }
    }
    Ok(ChargeComparison { charges, max_difference })
}

/// The currents whose global charges must coincide on free fields.
pub fn charge_family(equation: Equation) -> Vec<Current> {
    match equation {
        Equation::Dirac => vec![Current::DiracProbability, Current::GordonConvective, Current::DiracSecondOrder],
        Equation::KleinGordon => vec![Current::KleinGordon, Current::KgSecondOrder],
        Equation::Pauli => vec![Current::Pauli],
        Equation::Schrodinger => vec![Current::Schrodinger { spin: false }],
    }
}

// ---------------------------------------------------------------------------
// On-shell / off-shell classification

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrimination {
    pub current: String,
    pub on_shell: SweepReport,
    pub off_shell: SweepReport,
    pub identically_conserved: bool,
}

impl Discrimination {
    /// The observed classification agrees with the expected one.
    pub fn as_expected(&self) -> bool {
        self.on_shell.pass && self.off_shell.pass == self.identically_conserved
    }
}

/// Sweeps every current in `currents` over `field` and over its off-shell
/// variant built from `seed`.
pub fn offshell_discrimination(
    currents: &[Current],
    field: &WaveField,
    seed: u64,
    n_points: usize,
    tol: f64,
) -> Result<Vec<Discrimination>> {
    let off = offshell_variant(field, seed)?;
    currents
        .iter()
        .map(|c| {
            Ok(Discrimination {
                current: c.name(),
                on_shell: conservation_sweep(c, field, n_points, seed, tol)?,
                off_shell: conservation_sweep(c, &off, n_points, seed, tol)?,
                identically_conserved: identically_conserved(c),
            })
        })
        .collect()
}
