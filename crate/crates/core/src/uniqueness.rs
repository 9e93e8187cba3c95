//! The uniqueness certificate: ansatz families of candidate currents, the
//! linear system of their conservation residuals over sampled solutions,
//! and its SVD nullspace. Also the constraint relations a conserved density
//! of the Dirac state must satisfy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::currents::FourVector;
use crate::gamma::{hermitian_basis, hermitian_coefficients, standard_rep, GammaRep, Spinor, SpinorMatrix, BASIS_LABELS, METRIC};
use crate::jet::{DiracJet, ScalarJet};
use crate::linalg;
use crate::solution::{
    random_dirac_field, random_kg_field, random_point, random_spinor, seeded_rng, Equation, Field, FieldJet, MomentumSampling,
    PhysicalConstants, WaveField,
};
use crate::verify::{divergence_of, SWEEP_RADIUS};
use crate::{Error, Result};

/// Singular values at or below this fraction of the largest count as null.
pub const NULL_THRESHOLD: f64 = 1e-8;

/// No singular value may lie within this factor of the threshold.
pub const MIN_GAP: f64 = 10.0;

/// Relative rank tolerance of the sampling Gram check.
pub const GRAM_RANK_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which field a Klein-Gordon term multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgSlot {
    /// X ∂ᵤψ
    X,
    /// Y ∂ᵤψ*
    Y,
}

#[derive(Debug, Clone, PartialEq)]
enum TermKind {
    /// jᵘ = ψ†Hψ in component `mu` only.
    DiracForm { mu: usize, q: usize },
    /// jᵘ = value in component `mu` only.
    Constant { mu: usize, value: Complex64 },
    /// jᵤ = c ψᵃ(ψ*)ᵇ · invariant · ∂ᵤψ (or ∂ᵤψ*).
    KgTerm {
        slot: KgSlot,
        a: u32,
        b: u32,
        invariant: Option<usize>,
        c: Complex64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzTerm {
    pub name: String,
    kind: TermKind,
}

/// A finite basis of candidate currents; a candidate is a real coefficient
/// vector over `terms`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzFamily {
    pub equation: Equation,
    pub terms: Vec<AnsatzTerm>,
    /// Indices of the additive-constant terms.
    pub constant_columns: Vec<usize>,
    /// Coefficient vectors of the conventional current (one per real
    /// direction of its multiplicative constant).
    pub references: Vec<DVector<f64>>,
    hermitian: Vec<SpinorMatrix>,
}

impl AnsatzFamily {
    pub fn count(&self) -> usize {
        self.terms.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.name.clone()).collect()
    }

    /// Reference vectors as the columns of one matrix.
    pub fn reference_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.references)
    }

    /// Every term evaluated at one jet.
    pub fn evaluate(&self, jet: &FieldJet) -> Result<Vec<FourVector>> {
        match (self.equation, jet) {
            (Equation::Dirac, FieldJet::Dirac(j)) => Ok(self.evaluate_dirac(j)),
            (Equation::KleinGordon, FieldJet::Scalar(j)) => Ok(self.evaluate_kg(j)),
            _ => Err(Error::IncompatibleCurrent {
                current: format!("{} ansatz family", self.equation.name()),
                equation: match jet {
                    FieldJet::Dirac(_) => "dirac",
                    FieldJet::Scalar(_) => "scalar",
                    FieldJet::Pauli(_) => "pauli",
                },
            }),
        }
    }

    fn evaluate_dirac(&self, jet: &DiracJet) -> Vec<FourVector> {
        let psi = &jet.value;
        let forms: Vec<f64> = self.hermitian.iter().map(|h| psi.dotc(&(h * psi)).re).collect();
        self.terms
            .iter()
            .map(|t| match t.kind {
                TermKind::DiracForm { mu, q } => single(mu, Complex64::new(forms[q], 0.0)),
                TermKind::Constant { mu, value } => single(mu, value),
                TermKind::KgTerm { .. } => unreachable!("Klein-Gordon term in a Dirac family"),
            })
            .collect()
    }

    fn evaluate_kg(&self, jet: &ScalarJet) -> Vec<FourVector> {
        let psi = jet.psi();
        let inv = kg_invariants(jet);
        self.terms
            .iter()
            .map(|t| match t.kind {
                TermKind::Constant { mu, value } => single(mu, value),
                TermKind::KgTerm { slot, a, b, invariant, c } => {
                    let x = c * monomial(psi, a, b) * invariant.map_or(ONE, |i| inv[i]);
                    FourVector(std::array::from_fn(|mu| {
                        let d = match slot {
                            KgSlot::X => jet.d(mu),
                            KgSlot::Y => jet.d(mu).conj(),
                        };
                        x * d * METRIC[mu]
                    }))
                }
                TermKind::DiracForm { .. } => unreachable!("Dirac term in a Klein-Gordon family"),
            })
            .collect()
    }

    /// ∂ᵤjᵘ of every term from the jet's exact derivatives (no differencing).
    /// Used as an independent oracle for the assembled matrix.
    pub fn analytic_divergence(&self, jet: &FieldJet) -> Result<Vec<Complex64>> {
        match (self.equation, jet) {
            (Equation::Dirac, FieldJet::Dirac(j)) => Ok(self.analytic_dirac(j)),
            (Equation::KleinGordon, FieldJet::Scalar(j)) => Ok(self.analytic_kg(j)),
            _ => self.evaluate(jet).map(|_| unreachable!()),
        }
    }

    fn analytic_dirac(&self, jet: &DiracJet) -> Vec<Complex64> {
        let psi = &jet.value;
        self.terms
            .iter()
            .map(|t| match t.kind {
                TermKind::DiracForm { mu, q } => {
                    let h = &self.hermitian[q];
                    jet.d1[mu].dotc(&(h * psi)) + psi.dotc(&(h * jet.d1[mu]))
                }
                _ => Complex64::default(),
            })
            .collect()
    }

    fn analytic_kg(&self, jet: &ScalarJet) -> Vec<Complex64> {
        let psi = jet.psi();
        let inv = kg_invariants(jet);
        let d_inv = kg_invariant_gradients(jet);
        let box_psi = jet.box_op()[0];
        self.terms
            .iter()
            .map(|t| match t.kind {
                TermKind::KgTerm { slot, a, b, invariant, c } => {
                    let dfield = |mu: usize| match slot {
                        KgSlot::X => jet.d(mu),
                        KgSlot::Y => jet.d(mu).conj(),
                    };
                    let box_field = match slot {
                        KgSlot::X => box_psi,
                        KgSlot::Y => box_psi.conj(),
                    };
                    let p = monomial(psi, a, b);
                    let q = invariant.map_or(ONE, |i| inv[i]);
                    let mut acc = p * q * box_field;
                    for mu in 0..4 {
                        let dp = monomial_derivative(psi, a, b, jet.d(mu), jet.d(mu).conj());
                        let dq = invariant.map_or(Complex64::default(), |i| d_inv[i][mu]);
                        acc += (dp * q + p * dq) * dfield(mu) * METRIC[mu];
                    }
                    c * acc
                }
                _ => Complex64::default(),
            })
            .collect()
    }
}

fn single(mu: usize, v: Complex64) -> FourVector {
    let mut out = FourVector::zero();
    out.0[mu] = v;
    out
}

fn monomial(psi: Complex64, a: u32, b: u32) -> Complex64 {
    psi.powu(a) * psi.conj().powu(b)
}

/// ∂(ψᵃψ*ᵇ) given ∂ψ and ∂ψ*.
fn monomial_derivative(psi: Complex64, a: u32, b: u32, d: Complex64, dc: Complex64) -> Complex64 {
    let mut out = Complex64::default();
    if a > 0 {
        out += monomial(psi, a - 1, b) * f64::from(a) * d;
    }
    if b > 0 {
        out += monomial(psi, a, b - 1) * f64::from(b) * dc;
    }
    out
}

/// ∂ᵘψ∂ᵤψ, ∂ᵘψ*∂ᵤψ*, ∂ᵘψ∂ᵤψ*.
pub fn kg_invariants(jet: &ScalarJet) -> [Complex64; 3] {
    let mut out = [Complex64::default(); 3];
    for mu in 0..4 {
        let d = jet.d(mu);
        out[0] += d * d * METRIC[mu];
        out[1] += d.conj() * d.conj() * METRIC[mu];
        out[2] += d * d.conj() * METRIC[mu];
    }
    out
}

/// ∂ᵥ of each invariant, ν = 0..3.
fn kg_invariant_gradients(jet: &ScalarJet) -> [[Complex64; 4]; 3] {
    let mut out = [[Complex64::default(); 4]; 3];
    for nu in 0..4 {
        for mu in 0..4 {
            let (d, dd) = (jet.d(mu), jet.dd(nu, mu));
            let e = METRIC[mu];
            out[0][nu] += d * dd * (2.0 * e);
            out[1][nu] += d.conj() * dd.conj() * (2.0 * e);
            out[2][nu] += (dd * d.conj() + d * dd.conj()) * e;
        }
    }
    out
}

/// Per component μ: the 16 Hermitian forms ψ†H_Qψ and one constant;
/// 68 real coefficients.
pub fn dirac_ansatz_family(rep: &GammaRep) -> AnsatzFamily {
    let hermitian = hermitian_basis(rep);
    let mut terms = Vec::with_capacity(68);
    let mut constant_columns = Vec::new();
    for mu in 0..4 {
        for (q, label) in BASIS_LABELS.iter().enumerate() {
            terms.push(AnsatzTerm {
                name: format!("j{mu}:psi^+ H[{label}] psi"),
                kind: TermKind::DiracForm { mu, q },
            });
        }
        constant_columns.push(terms.len());
        terms.push(AnsatzTerm {
            name: format!("j{mu}:const"),
            kind: TermKind::Constant { mu, value: ONE },
        });
    }
    let mut reference = DVector::zeros(terms.len());
    for mu in 0..4 {
        let coeffs = hermitian_coefficients(rep, &(rep.gamma(0) * rep.gamma(mu)));
        for (q, c) in coeffs.iter().enumerate() {
            reference[mu * 17 + q] = *c;
        }
    }
    AnsatzFamily {
        equation: Equation::Dirac,
        terms,
        constant_columns,
        references: vec![reference.normalize()],
        hermitian,
    }
}

/// Coefficient vector of the axial current ψ̄γᵘγ⁵ψ in the Dirac family.
pub fn dirac_axial_vector(rep: &GammaRep) -> DVector<f64> {
    let mut v = DVector::zeros(68);
    for mu in 0..4 {
        let coeffs = hermitian_coefficients(rep, &(rep.gamma(0) * rep.gamma(mu) * rep.gamma5()));
        for (q, c) in coeffs.iter().enumerate() {
            v[mu * 17 + q] = *c;
        }
    }
    v.normalize()
}

/// Monomials ψᵃψ*ᵇ with a + b ≤ degree, by increasing degree.
fn monomials(degree: u32) -> Vec<(u32, u32)> {
    (0..=degree).flat_map(|d| (0..=d).rev().map(move |a| (a, d - a))).collect()
}

fn monomial_label(a: u32, b: u32) -> String {
    match (a, b) {
        (0, 0) => "1".into(),
        _ => {
            let part = |s: &str, n: u32| match n {
                0 => String::new(),
                1 => s.to_string(),
                n => format!("{s}^{n}"),
            };
            [part("psi", a), part("psi*", b)].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join(" ")
        }
    }
}

const INVARIANT_LABELS: [&str; 3] = ["(dpsi.dpsi)", "(dpsi*.dpsi*)", "(dpsi.dpsi*)"];

/// jᵤ = X∂ᵤψ + Y∂ᵤψ* + hᵤ with X, Y complex polynomials in (ψ, ψ*) of total
/// degree ≤ `max_degree`, optionally times {1, I₁, I₂, I₃} of the derivative
/// invariants; h complex.
pub fn kg_ansatz_family(max_degree: u32, include_derivative_invariants: bool) -> Result<AnsatzFamily> {
    if !(1..=2).contains(&max_degree) {
        return Err(Error::UnsupportedDegree(max_degree));
    }
    let monos = monomials(max_degree);
    let invariants: Vec<Option<usize>> = if include_derivative_invariants {
        vec![None, Some(0), Some(1), Some(2)]
    } else {
        vec![None]
    };
    let mut terms = Vec::new();
    let mut ref_real = Vec::new();
    let mut ref_imag = Vec::new();
    for &invariant in &invariants {
        for slot in [KgSlot::X, KgSlot::Y] {
            for &(a, b) in &monos {
                for (c, c_label) in [(ONE, "re"), (I, "im")] {
                    let inv_label = invariant.map_or(String::new(), |i| format!(" {}", INVARIANT_LABELS[i]));
                    let d_label = if slot == KgSlot::X { "d psi" } else { "d psi*" };
                    // the conventional current: X = ψ*, Y = −ψ
                    if invariant.is_none() {
                        let sign = match (slot, a, b) {
                            (KgSlot::X, 0, 1) => 1.0,
                            (KgSlot::Y, 1, 0) => -1.0,
                            _ => 0.0,
                        };
                        if sign != 0.0 {
                            if c == ONE {
                                ref_real.push((terms.len(), sign));
                            } else {
                                ref_imag.push((terms.len(), sign));
                            }
                        }
                    }
                    terms.push(AnsatzTerm {
                        name: format!("{c_label}:{}{inv_label} {d_label}", monomial_label(a, b)),
                        kind: TermKind::KgTerm { slot, a, b, invariant, c },
                    });
                }
            }
        }
    }
    let mut constant_columns = Vec::new();
    for mu in 0..4 {
        for (c, c_label) in [(ONE, "re"), (I, "im")] {
            constant_columns.push(terms.len());
            terms.push(AnsatzTerm {
                name: format!("{c_label}:h{mu}"),
                kind: TermKind::Constant { mu, value: c },
            });
        }
    }
    let to_vec = |entries: &[(usize, f64)]| {
        let mut v = DVector::zeros(terms.len());
        for &(i, s) in entries {
            v[i] = s;
        }
        v.normalize()
    };
    let references = vec![to_vec(&ref_real), to_vec(&ref_imag)];
    Ok(AnsatzFamily {
        equation: Equation::KleinGordon,
        terms,
        constant_columns,
        references,
        hermitian: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// Sampling and assembly

/// Settings for drawing the on-shell fields the residual system is built on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub n_fields: usize,
    pub points_per_field: usize,
    pub min_modes: usize,
    pub max_modes: usize,
    pub momentum_range: f64,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            n_fields: 6,
            points_per_field: 60,
            min_modes: 4,
            max_modes: 8,
            momentum_range: 2.0,
            seed: 42,
        }
    }
}

impl SamplingPlan {
    /// `factor` times as many fields and points, with another seed.
    pub fn oversampled(&self, factor: usize, seed: u64) -> Self {
        SamplingPlan {
            n_fields: self.n_fields * factor,
            seed,
            ..*self
        }
    }
}

/// Seeded generic on-shell fields (free, both energy branches).
pub fn sample_fields(equation: Equation, plan: &SamplingPlan, constants: &PhysicalConstants) -> Result<Vec<WaveField>> {
    use rand::Rng;
    let mut rng = seeded_rng(plan.seed);
    let sampling = MomentumSampling::Uniform(plan.momentum_range);
    (0..plan.n_fields)
        .map(|_| {
            let n = rng.random_range(plan.min_modes..=plan.max_modes);
            match equation {
                Equation::Dirac => Ok(WaveField::Dirac(random_dirac_field(&mut rng, n, constants, [0.0; 4], sampling)?)),
                Equation::KleinGordon => Ok(WaveField::KleinGordon(random_kg_field(&mut rng, n, constants, sampling)?)),
                other => Err(Error::Config(format!("no ansatz family for {}", other.name()))),
            }
        })
        .collect()
}

fn amplitude_scale(field: &WaveField) -> f64 {
    let n = match field {
        WaveField::Dirac(f) => f.superposition().amplitude_norm_sqr(),
        WaveField::KleinGordon(f) => f.superposition().amplitude_norm_sqr(),
        WaveField::Pauli(f) => f.superposition().amplitude_norm_sqr(),
        WaveField::Schrodinger(f) => f.superposition().amplitude_norm_sqr(),
    };
    if n > 0.0 {
        1.0 / n.sqrt()
    } else {
        1.0
    }
}

fn scaled_jet(field: &WaveField, x: [f64; 4], s: f64) -> FieldJet {
    let s = Complex64::new(s, 0.0);
    match field.jet(x) {
        FieldJet::Dirac(j) => FieldJet::Dirac(j.scale(s)),
        FieldJet::Scalar(j) => FieldJet::Scalar(j.scale(s)),
        FieldJet::Pauli(j) => FieldJet::Pauli(j.scale(s)),
    }
}

/// How divergences of the ansatz terms are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceMethod {
    /// The shared difference stencil of [`crate::verify`].
    FiniteDifference,
    /// Exact derivatives from the jet (oracle).
    Analytic,
}

/// Residual system: one column per family term, rows are the real and
/// imaginary parts of ∂ᵤjᵘ at each sampled (field, point) pair, every field
/// first rescaled to unit amplitude norm.
#[derive(Debug, Clone)]
pub struct ResidualSystem {
    pub matrix: DMatrix<f64>,
    pub gram_rank: usize,
}

pub fn assemble_residual_matrix(
    family: &AnsatzFamily,
    fields: &[WaveField],
    points_per_field: usize,
    seed: u64,
) -> Result<ResidualSystem> {
    assemble_with(family, fields, points_per_field, seed, DivergenceMethod::FiniteDifference)
}

pub fn assemble_with(
    family: &AnsatzFamily,
    fields: &[WaveField],
    points_per_field: usize,
    seed: u64,
    method: DivergenceMethod,
) -> Result<ResidualSystem> {
    let n = family.count();
    let n_rows = 2 * fields.len() * points_per_field;
    if n_rows < 4 * n {
        return Err(Error::DegenerateSampling(format!(
            "{n_rows} residual rows for {n} coefficients, need at least {}",
            4 * n
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut matrix = DMatrix::zeros(n_rows, n);
    // term values at the sample points, for the Gram rank check
    let mut values = DMatrix::zeros(8 * fields.len() * points_per_field, n);
    let mut row = 0;
    for field in fields {
        let s = amplitude_scale(field);
        for _ in 0..points_per_field {
            let x = random_point(&mut rng, SWEEP_RADIUS);
            let div = match method {
                DivergenceMethod::FiniteDifference => divergence_of(|y| family.evaluate(&scaled_jet(field, y, s)), x)?,
                DivergenceMethod::Analytic => family.analytic_divergence(&scaled_jet(field, x, s))?,
            };
            for (col, d) in div.iter().enumerate() {
                matrix[(2 * row, col)] = d.re;
                matrix[(2 * row + 1, col)] = d.im;
            }
            let vals = family.evaluate(&scaled_jet(field, x, s))?;
            for (col, v) in vals.iter().enumerate() {
                for mu in 0..4 {
                    values[(8 * row + 2 * mu, col)] = v.0[mu].re;
                    values[(8 * row + 2 * mu + 1, col)] = v.0[mu].im;
                }
            }
            row += 1;
        }
    }
    let gram_rank = linalg::numerical_rank(&values, GRAM_RANK_TOL);
    if gram_rank < n {
        return Err(Error::DegenerateSampling(format!("Gram rank {gram_rank} of {n} terms")));
    }
    Ok(ResidualSystem { matrix, gram_rank })
}

// ---------------------------------------------------------------------------
// Nullspace

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullspaceReport {
    /// Descending, one per column.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    pub dimension: usize,
    /// Dimension left after removing the constant directions.
    pub non_constant_dimension: usize,
    /// Nullspace basis, one coefficient vector per entry.
    pub basis: Vec<Vec<f64>>,
    /// Smallest |cos| between a reference vector and the non-constant
    /// nullspace.
    pub alignment: f64,
    /// Smallest retained over largest null singular value; the null one is
    /// floored at ε·σ_max.
    pub gap: f64,
}

impl NullspaceReport {
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        if self.basis.is_empty() {
            return DMatrix::zeros(self.singular_values.len(), 0);
        }
        let cols: Vec<DVector<f64>> = self.basis.iter().map(|b| DVector::from_column_slice(b)).collect();
        DMatrix::from_columns(&cols)
    }
}

pub fn nullspace_report(matrix: &DMatrix<f64>, references: &[DVector<f64>], constant_columns: &[usize]) -> Result<NullspaceReport> {
    let n = matrix.ncols();
    let svd = linalg::sorted_svd(matrix);
    let sv = svd.singular_values;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let threshold = NULL_THRESHOLD * sigma_max;
    if let Some(s) = sv.iter().find(|&&s| s > threshold / MIN_GAP && s < threshold * MIN_GAP) {
        return Err(Error::IllSeparatedNullspace { gap: s / threshold });
    }
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    let dimension = n - rank;
    let gap = if rank == 0 || dimension == 0 {
        f64::INFINITY
    } else {
        sv[rank - 1] / sv[rank].max(f64::EPSILON * sigma_max)
    };
    let null = svd.v.columns(rank, dimension).into_owned();

    let mut projected = null.clone();
    for &c in constant_columns {
        for j in 0..projected.ncols() {
            projected[(c, j)] = 0.0;
        }
    }
    let non_constant = linalg::orthonormal_columns(&projected, 1e-6);
    let alignment = references
        .iter()
        .map(|r| (non_constant.transpose() * r).norm() / r.norm())
        .fold(f64::INFINITY, f64::min);
    Ok(NullspaceReport {
        singular_values: sv,
        threshold,
        dimension,
        non_constant_dimension: non_constant.ncols(),
        basis: null.column_iter().map(|c| c.iter().copied().collect()).collect(),
        alignment: if references.is_empty() { 0.0 } else { alignment },
        gap,
    })
}

/// ‖M a‖ relative to the RMS norm of the non-zero columns of M.
pub fn direction_residual(matrix: &DMatrix<f64>, direction: &DVector<f64>) -> f64 {
    let norms: Vec<f64> = matrix.column_iter().map(|c| c.norm()).filter(|&n| n > 0.0).collect();
    if norms.is_empty() {
        return 0.0;
    }
    let rms = (norms.iter().map(|n| n * n).sum::<f64>() / norms.len() as f64).sqrt();
    (matrix * direction).norm() / (direction.norm() * rms)
}

/// ‖M c‖ relative to σ_max.
pub fn reference_residual(matrix: &DMatrix<f64>, reference: &DVector<f64>) -> f64 {
    let sigma_max = matrix.clone().singular_values().iter().copied().fold(0.0, f64::max);
    (matrix * reference).norm() / (reference.norm() * sigma_max.max(f64::MIN_POSITIVE))
}

/// Largest absolute entry in the constant columns.
pub fn constant_column_max(matrix: &DMatrix<f64>, constant_columns: &[usize]) -> f64 {
    constant_columns
        .iter()
        .map(|&c| matrix.column(c).amax())
        .fold(0.0, f64::max)
}

/// Everything the certificate needs from one sampling plan.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub system: ResidualSystem,
    pub report: NullspaceReport,
}

pub fn certify(family: &AnsatzFamily, plan: &SamplingPlan, constants: &PhysicalConstants, method: DivergenceMethod) -> Result<Certificate> {
    let fields = sample_fields(family.equation, plan, constants)?;
    let system = assemble_with(family, &fields, plan.points_per_field, plan.seed.wrapping_add(1), method)?;
    let report = nullspace_report(&system.matrix, &family.references, &family.constant_columns)?;
    Ok(Certificate { system, report })
}

// ---------------------------------------------------------------------------
// Constraint relations on candidate densities

/// A candidate density j⁰(ψ, ψ†), real-valued.
pub trait DensityCandidate {
    fn name(&self) -> String;

    fn value(&self, psi: &Spinor) -> f64;

    /// (∂j⁰/∂ψᵃ, ∂j⁰/∂ψ*ᵃ). The default uses central differences in the real
    /// and imaginary parts with step 1e-6.
    fn gradients(&self, psi: &Spinor) -> (Spinor, Spinor) {
        finite_difference_gradients(|p| self.value(p), psi, 1e-6)
    }
}

/// Wirtinger gradients of a real function by central differences.
pub fn finite_difference_gradients(f: impl Fn(&Spinor) -> f64, psi: &Spinor, step: f64) -> (Spinor, Spinor) {
    let mut d_psi = Spinor::zeros();
    for a in 0..4 {
        let partial = |dir: Complex64| {
            let mut up = *psi;
            let mut dn = *psi;
            up[a] += dir * step;
            dn[a] -= dir * step;
            (f(&up) - f(&dn)) / (2.0 * step)
        };
        let (dx, dy) = (partial(ONE), partial(I));
        d_psi[a] = Complex64::new(0.5 * dx, -0.5 * dy);
    }
    let d_psi_dag = d_psi.map(|z| z.conj());
    (d_psi, d_psi_dag)
}

/// j⁰ = ψ†Hψ for a Hermitian H.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianDensity {
    pub label: String,
    pub h: SpinorMatrix,
}

impl HermitianDensity {
    /// The conventional density α = ψ†ψ.
    pub fn conventional() -> Self {
        HermitianDensity {
            label: "alpha".into(),
            h: SpinorMatrix::identity(),
        }
    }

    /// δ = ψ†γ⁵ψ.
    pub fn axial(rep: &GammaRep) -> Self {
        HermitianDensity {
            label: "delta".into(),
            h: *rep.gamma5(),
        }
    }
}

impl DensityCandidate for HermitianDensity {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn value(&self, psi: &Spinor) -> f64 {
        psi.dotc(&(self.h * psi)).re
    }

    fn gradients(&self, psi: &Spinor) -> (Spinor, Spinor) {
        // ∂/∂ψᵃ = (ψ†H)ₐ, ∂/∂ψ*ᵃ = (Hψ)ₐ
        let col = self.h * psi;
        let row = self.h.transpose() * psi.map(|z| z.conj());
        (row, col)
    }
}

/// j⁰ = βα = (ψ̄ψ)(ψ†ψ).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTimesDensity {
    pub gamma0: SpinorMatrix,
}

impl ScalarTimesDensity {
    pub fn new(rep: &GammaRep) -> Self {
        ScalarTimesDensity { gamma0: *rep.gamma(0) }
    }
}

impl DensityCandidate for ScalarTimesDensity {
    fn name(&self) -> String {
        "beta*alpha".into()
    }

    fn value(&self, psi: &Spinor) -> f64 {
        psi.dotc(&(self.gamma0 * psi)).re * psi.norm_squared()
    }

    fn gradients(&self, psi: &Spinor) -> (Spinor, Spinor) {
        let alpha = Complex64::new(psi.norm_squared(), 0.0);
        let beta = psi.dotc(&(self.gamma0 * psi));
        let col = psi * beta + self.gamma0 * psi * alpha;
        (col.map(|z| z.conj()), col)
    }
}

/// A density given only by its values; gradients by finite differences.
pub struct FnDensity<F: Fn(&Spinor) -> f64> {
    pub label: String,
    pub f: F,
}

impl<F: Fn(&Spinor) -> f64> DensityCandidate for FnDensity<F> {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn value(&self, psi: &Spinor) -> f64 {
        (self.f)(psi)
    }
}

/// |(∂j⁰/∂ψ)M ψ − ψ†M(∂j⁰/∂ψ†)| for M = γ⁰ (r1) and M = γ⁰γᵘ (r2),
/// maximised over `n_spinors` seeded spinors (and μ for r2).
pub fn constraint_residuals(candidate: &dyn DensityCandidate, rep: &GammaRep, n_spinors: usize, seed: u64) -> (f64, f64) {
    let mut rng = seeded_rng(seed);
    let g0 = rep.gamma(0);
    let forms: Vec<SpinorMatrix> = (0..4).map(|mu| g0 * rep.gamma(mu)).collect();
    let residual = |row: &Spinor, col: &Spinor, psi: &Spinor, m: &SpinorMatrix| -> f64 {
        let lhs: Complex64 = row.iter().zip((m * psi).iter()).map(|(a, b)| a * b).sum();
        (lhs - psi.dotc(&(m * col))).norm()
    };
    let (mut r1, mut r2): (f64, f64) = (0.0, 0.0);
    for _ in 0..n_spinors {
        let psi = random_spinor(&mut rng);
        let (row, col) = candidate.gradients(&psi);
        r1 = r1.max(residual(&row, &col, &psi, g0));
        for m in &forms {
            r2 = r2.max(residual(&row, &col, &psi, m));
        }
    }
    (r1, r2)
}

/// The three built-in candidates: α, δ and βα.
pub fn builtin_candidates() -> Vec<Box<dyn DensityCandidate>> {
    let rep = standard_rep();
    vec![
        Box::new(HermitianDensity::conventional()),
        Box::new(HermitianDensity::axial(rep)),
        Box::new(ScalarTimesDensity::new(rep)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        let rep = GammaRep::standard();
        assert_eq!(dirac_ansatz_family(&rep).count(), 68);
        assert_eq!(kg_ansatz_family(2, false).unwrap().count(), 32);
        assert_eq!(kg_ansatz_family(1, false).unwrap().count(), 20);
        assert_eq!(kg_ansatz_family(2, true).unwrap().count(), 104);
        assert!(matches!(kg_ansatz_family(3, false), Err(Error::UnsupportedDegree(3))));
        assert!(matches!(kg_ansatz_family(0, false), Err(Error::UnsupportedDegree(0))));
    }

    #[test]
    fn dirac_reference_reproduces_current() {
        let rep = GammaRep::standard();
        let fam = dirac_ansatz_family(&rep);
        let mut rng = seeded_rng(3);
        let mut jet = DiracJet::zero([0.0; 4]);
        jet.value = random_spinor(&mut rng);
        let vals = fam.evaluate(&FieldJet::Dirac(jet.clone())).unwrap();
        let r = &fam.references[0];
        let norm = 2.0; // the unnormalised reference has four unit entries
        let j = crate::currents::dirac_current(&jet, 1.0, [0.0; 4]);
        for mu in 0..4 {
            let combined: f64 = vals.iter().zip(r.iter()).map(|(v, c)| v.0[mu].re * c).sum::<f64>() * norm;
            assert!((combined - j.0[mu].re).abs() < 1e-13);
        }
    }

    #[test]
    fn kg_reference_reproduces_current() {
        let fam = kg_ansatz_family(2, true).unwrap();
        let k = PhysicalConstants::default();
        let f = random_kg_field(&mut seeded_rng(4), 3, &k, MomentumSampling::Uniform(1.0)).unwrap();
        let jet = f.jet([0.1, 0.2, 0.3, 0.4]);
        let vals = fam.evaluate(&FieldJet::Scalar(jet.clone())).unwrap();
        let r = &fam.references[0];
        let expected = crate::currents::kg_current(&jet, ONE, [Complex64::default(); 4]);
        for mu in 0..4 {
            let combined: Complex64 = vals.iter().zip(r.iter()).map(|(v, c)| v.0[mu] * *c).sum::<Complex64>() * 2f64.sqrt();
            assert!((combined - expected.0[mu]).norm() < 1e-13);
        }
    }

    #[test]
    fn analytic_divergence_matches_stencil() {
        let k = PhysicalConstants::default();
        let fam = kg_ansatz_family(2, true).unwrap();
        let f = WaveField::KleinGordon(random_kg_field(&mut seeded_rng(5), 4, &k, MomentumSampling::Uniform(1.5)).unwrap());
        let x = [0.3, -1.0, 2.0, 0.5];
        let fd = divergence_of(|y| fam.evaluate(&f.jet(y)), x).unwrap();
        let an = fam.analytic_divergence(&f.jet(x)).unwrap();
        let scale = an.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (a, b) in fd.iter().zip(&an) {
            assert!((a - b).norm() < 1e-8 * scale, "{a} vs {b}");
        }
        let famd = dirac_ansatz_family(&GammaRep::standard());
        let g = WaveField::Dirac(random_dirac_field(&mut seeded_rng(6), 4, &k, [0.0; 4], MomentumSampling::Uniform(1.5)).unwrap());
        let fd = divergence_of(|y| famd.evaluate(&g.jet(y)), x).unwrap();
        let an = famd.analytic_divergence(&g.jet(x)).unwrap();
        for (a, b) in fd.iter().zip(&an) {
            assert!((a - b).norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn too_few_rows_is_degenerate() {
        let fam = dirac_ansatz_family(&GammaRep::standard());
        let fields = sample_fields(Equation::Dirac, &SamplingPlan::default(), &PhysicalConstants::default()).unwrap();
        assert!(matches!(
            assemble_residual_matrix(&fam, &fields[..1], 10, 1),
            Err(Error::DegenerateSampling(_))
        ));
    }

    #[test]
    fn single_mode_fields_are_degenerate() {
        let fam = dirac_ansatz_family(&GammaRep::standard());
        let plan = SamplingPlan {
            min_modes: 1,
            max_modes: 1,
            ..SamplingPlan::default()
        };
        let fields = sample_fields(Equation::Dirac, &plan, &PhysicalConstants::default()).unwrap();
        assert!(matches!(
            assemble_residual_matrix(&fam, &fields, 60, 1),
            Err(Error::DegenerateSampling(_))
        ));
    }

    #[test]
    fn nullspace_of_known_matrix() {
        // columns 0 and 1 conserved-like (zero), column 2 a constant
        let m = DMatrix::from_row_slice(4, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let r = DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]);
        let rep = nullspace_report(&m, &[r], &[2]).unwrap();
        assert_eq!(rep.dimension, 2);
        assert_eq!(rep.non_constant_dimension, 1);
        assert!((rep.alignment - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ill_separated_nullspace_is_rejected() {
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, 1e-8, 1.0]));
        assert!(matches!(nullspace_report(&m, &[], &[]), Err(Error::IllSeparatedNullspace { .. })));
    }

    #[test]
    fn constraint_residuals_of_builtins() {
        let rep = GammaRep::standard();
        let (r1, r2) = constraint_residuals(&HermitianDensity::conventional(), &rep, 200, 1);
        assert!(r1 <= 1e-12 && r2 <= 1e-12);
        let (r1, _) = constraint_residuals(&HermitianDensity::axial(&rep), &rep, 200, 1);
        assert!(r1 > 0.1);
        let (r1, r2) = constraint_residuals(&ScalarTimesDensity::new(&rep), &rep, 200, 1);
        assert!(r1 <= 1e-12);
        assert!(r2 > 0.1);
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let rep = GammaRep::standard();
        let psi = random_spinor(&mut seeded_rng(9));
        for cand in builtin_candidates() {
            let (row, col) = cand.gradients(&psi);
            let (frow, fcol) = finite_difference_gradients(|p| cand.value(p), &psi, 1e-6);
            assert!((row - frow).norm() < 1e-8);
            assert!((col - fcol).norm() < 1e-8);
        }
        let fallback = FnDensity {
            label: "alpha".into(),
            f: |p: &Spinor| p.norm_squared(),
        };
        let (r1, r2) = constraint_residuals(&fallback, &rep, 50, 2);
        assert!(r1 < 1e-8 && r2 < 1e-8);
    }

    #[test]
    fn monomial_ordering() {
        assert_eq!(monomials(1), vec![(0, 0), (1, 0), (0, 1)]);
        assert_eq!(monomials(2).len(), 6);
        assert_eq!(monomial_label(1, 1), "psi psi*");
    }
}
