//! Gamma matrices in the Dirac (standard) representation.
//!
//! ```text
//! γ⁰ = [ I  0 ]    γⁱ = [  0  σⁱ ]    γ⁵ = iγ⁰γ¹γ²γ³ = [ 0 I ]
//!      [ 0 −I ]         [ −σⁱ  0 ]                      [ I 0 ]
//! ```
//!
//! with metric signature (+, −, −, −). All matrices here have O(1) entries,
//! so equality is tested with an absolute per-entry tolerance.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::linalg;

pub type SpinorMatrix = Matrix4<Complex64>;
pub type Spinor = Vector4<Complex64>;

/// Per-entry absolute tolerance for matrix equality.
pub const MATRIX_TOL: f64 = 1e-13;

/// Diagonal of the Minkowski metric ηᵘᵛ.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pauli matrices σ¹, σ², σ³.
pub fn pauli() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

fn blocks(
    a: &Matrix2<Complex64>,
    b: &Matrix2<Complex64>,
    c: &Matrix2<Complex64>,
    d: &Matrix2<Complex64>,
) -> SpinorMatrix {
    let mut m = SpinorMatrix::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &SpinorMatrix, b: &SpinorMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn approx_eq(a: &SpinorMatrix, b: &SpinorMatrix) -> bool {
    max_abs_diff(a, b) <= MATRIX_TOL
}

/// The four gamma matrices and γ⁵.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRep {
    gamma: [SpinorMatrix; 4],
    gamma5: SpinorMatrix,
}

impl GammaRep {
    pub fn standard() -> Self {
        let s = pauli();
        let id = Matrix2::identity();
        let z = Matrix2::zeros();
        let g0 = blocks(&id, &z, &z, &(-id));
        let gi = |k: usize| blocks(&z, &s[k], &(-s[k]), &z);
        let gamma = [g0, gi(0), gi(1), gi(2)];
        let gamma5 = blocks(&z, &id, &id, &z);
        GammaRep { gamma, gamma5 }
    }

    pub fn gamma(&self, mu: usize) -> &SpinorMatrix {
        &self.gamma[mu]
    }

    pub fn gamma5(&self) -> &SpinorMatrix {
        &self.gamma5
    }

    /// γᵘᵛ = ½(γᵘγᵛ − γᵛγᵘ).
    pub fn sigma(&self, mu: usize, nu: usize) -> SpinorMatrix {
        (self.gamma[mu] * self.gamma[nu] - self.gamma[nu] * self.gamma[mu]) * Complex64::new(0.5, 0.0)
    }

    /// γᵘqᵤ for a covariant (index-down) vector `q_lower`.
    pub fn slash_lower(&self, q_lower: [f64; 4]) -> SpinorMatrix {
        let mut m = SpinorMatrix::zeros();
        for (g, q) in self.gamma.iter().zip(q_lower) {
            m += g * Complex64::new(q, 0.0);
        }
        m
    }

    /// γᵘqᵤ for a contravariant (index-up) vector.
    pub fn slash(&self, q_upper: [f64; 4]) -> SpinorMatrix {
        self.slash_lower(lower(q_upper))
    }

    /// Dirac adjoint row ψ̄ = ψ†γ⁰, returned as a column for convenience.
    pub fn bar(&self, psi: &Spinor) -> Spinor {
        // (ψ†γ⁰)ᵀ conjugated back: ψ̄ Γ φ == bar(ψ)^† Γ φ with bar(ψ) = γ⁰ψ
        self.gamma[0] * psi
    }

    /// ψ̄ Γ φ.
    pub fn sandwich(&self, psi: &Spinor, gamma: &SpinorMatrix, phi: &Spinor) -> Complex64 {
        self.bar(psi).dotc(&(gamma * phi))
    }

    /// max over μ,ν of the entrywise residual of γᵘγᵛ + γᵛγᵘ − 2ηᵘᵛ I.
    pub fn anticommutation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in mu..4 {
                worst = worst.max(self.anticommutator_residual(mu, nu));
            }
        }
        worst
    }

    pub fn anticommutator_residual(&self, mu: usize, nu: usize) -> f64 {
        let lhs = self.gamma[mu] * self.gamma[nu] + self.gamma[nu] * self.gamma[mu];
        let eta = if mu == nu { METRIC[mu] } else { 0.0 };
        let rhs = SpinorMatrix::identity() * Complex64::new(2.0 * eta, 0.0);
        max_abs_diff(&lhs, &rhs)
    }

    /// Residual of γ⁵ − iγ⁰γ¹γ²γ³.
    pub fn gamma5_residual(&self) -> f64 {
        let prod = self.gamma[0] * self.gamma[1] * self.gamma[2] * self.gamma[3] * I;
        max_abs_diff(&self.gamma5, &prod)
    }
}

impl Default for GammaRep {
    fn default() -> Self {
        Self::standard()
    }
}

pub fn build_standard_rep() -> GammaRep {
    GammaRep::standard()
}

/// Shared instance of the standard representation.
pub fn standard_rep() -> &'static GammaRep {
    static REP: std::sync::OnceLock<GammaRep> = std::sync::OnceLock::new();
    REP.get_or_init(GammaRep::standard)
}

/// Lower (or raise) an index with the diagonal metric.
pub fn lower(v: [f64; 4]) -> [f64; 4] {
    [v[0], -v[1], -v[2], -v[3]]
}

pub fn minkowski_dot(a: [f64; 4], b: [f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Labels of the 16 basis elements, in basis order.
pub const BASIS_LABELS: [&str; 16] = [
    "I", "g0", "g1", "g2", "g3", "g01", "g02", "g03", "g12", "g13", "g23", "g0g5", "g1g5",
    "g2g5", "g3g5", "g5",
];

/// Index of γ⁵ in the basis.
pub const GAMMA5_INDEX: usize = 15;

/// (μ, ν) pairs with μ < ν, in the order used by the basis.
pub const BIVECTOR_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// The 16 linearly independent matrices
/// {I, γᵘ, γᵘᵛ (μ<ν), γᵘγ⁵, γ⁵}, in that fixed order.
pub fn sixteen_basis(rep: &GammaRep) -> Vec<SpinorMatrix> {
    let mut out = Vec::with_capacity(16);
    out.push(SpinorMatrix::identity());
    out.extend(rep.gamma.iter().cloned());
    out.extend(BIVECTOR_PAIRS.iter().map(|&(m, n)| rep.sigma(m, n)));
    out.extend(rep.gamma.iter().map(|g| g * rep.gamma5));
    out.push(rep.gamma5);
    out
}

/// Each basis element made Hermitian: anti-Hermitian elements are
/// multiplied by i. The result is an orthogonal basis of the Hermitian
/// 4×4 matrices under tr(AB), with tr(H_Q H_Q) = 4.
pub fn hermitian_basis(rep: &GammaRep) -> Vec<SpinorMatrix> {
    sixteen_basis(rep)
        .into_iter()
        .map(|m| {
            if approx_eq(&m.adjoint(), &m) {
                m
            } else {
                debug_assert!(approx_eq(&m.adjoint(), &(-m)));
                m * I
            }
        })
        .collect()
}

/// Real coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coefficients(rep: &GammaRep, m: &SpinorMatrix) -> [f64; 16] {
    let basis = hermitian_basis(rep);
    let mut out = [0.0; 16];
    for (c, h) in out.iter_mut().zip(&basis) {
        *c = (h * m).trace().re / 4.0;
    }
    out
}

/// Rank of the 16 basis matrices viewed as vectors in ℝ³².
pub fn basis_rank(basis: &[SpinorMatrix]) -> usize {
    let mut m = DMatrix::<f64>::zeros(32, basis.len());
    for (j, b) in basis.iter().enumerate() {
        for (k, z) in b.iter().enumerate() {
            m[(2 * k, j)] = z.re;
            m[(2 * k + 1, j)] = z.im;
        }
    }
    linalg::numerical_rank(&m, 1e-12)
}

/// Indices of the basis elements commuting with every generator.
pub fn commutant_in_basis(rep: &GammaRep, generators: &[SpinorMatrix]) -> Vec<usize> {
    let basis = sixteen_basis(rep);
    filter_commuting(&basis, (0..basis.len()).collect(), generators)
}

/// Keep the candidate indices whose basis element commutes with all generators.
pub fn filter_commuting(
    basis: &[SpinorMatrix],
    candidates: Vec<usize>,
    generators: &[SpinorMatrix],
) -> Vec<usize> {
    candidates
        .into_iter()
        .filter(|&q| {
            generators
                .iter()
                .all(|g| approx_eq(&(basis[q] * g), &(g * basis[q])))
        })
        .collect()
}

/// {γ⁰γ¹, γ⁰γ², γ⁰γ³}: the Dirac α-matrices.
pub fn boost_generators(rep: &GammaRep) -> Vec<SpinorMatrix> {
    (1..4).map(|i| rep.gamma[0] * rep.gamma[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gamma0_is_diag() {
        let rep = build_standard_rep();
        let expect = SpinorMatrix::from_diagonal(&Vector4::new(c(1.), c(1.), c(-1.), c(-1.)));
        assert_eq!(rep.gamma(0), &expect);
    }

    #[test]
    fn gamma1_squares_to_minus_identity() {
        let rep = build_standard_rep();
        let sq = rep.gamma(1) * rep.gamma(1);
        assert!(approx_eq(&sq, &(-SpinorMatrix::identity())));
    }

    #[test]
    fn gamma5_is_offdiagonal_identity_block() {
        let rep = build_standard_rep();
        let g5 = rep.gamma5();
        for r in 0..4 {
            for col in 0..4 {
                let expect = if (r + 2) % 4 == col { 1.0 } else { 0.0 };
                assert_eq!(g5[(r, col)], c(expect));
            }
        }
    }

    #[test]
    fn clifford_relations() {
        let rep = build_standard_rep();
        assert!(rep.anticommutation_residual() <= 1e-14);
        assert!(rep.gamma5_residual() <= 1e-14);
        let g5sq = rep.gamma5() * rep.gamma5();
        assert!(max_abs_diff(&g5sq, &SpinorMatrix::identity()) <= 1e-14);
        let ac = rep.gamma5() * rep.gamma(0) + rep.gamma(0) * rep.gamma5();
        assert!(max_abs_diff(&ac, &SpinorMatrix::zeros()) <= 1e-14);
    }

    #[test]
    fn hermiticity_pattern() {
        let rep = build_standard_rep();
        assert!(approx_eq(&rep.gamma(0).adjoint(), rep.gamma(0)));
        for i in 1..4 {
            assert!(approx_eq(&rep.gamma(i).adjoint(), &(-rep.gamma(i))));
        }
    }

    #[test]
    fn basis_has_sixteen_independent_elements() {
        let rep = build_standard_rep();
        let b = sixteen_basis(&rep);
        assert_eq!(b.len(), 16);
        assert_eq!(basis_rank(&b), 16);
        assert_eq!(basis_rank(&hermitian_basis(&rep)), 16);
    }

    #[test]
    fn basis_traces_vanish_except_identity() {
        let rep = build_standard_rep();
        for (q, m) in sixteen_basis(&rep).iter().enumerate() {
            let tr = m.trace();
            if q == 0 {
                assert_eq!(tr, c(4.0));
            } else {
                assert!(tr.norm() < 1e-15, "trace of {} = {tr}", BASIS_LABELS[q]);
            }
        }
    }

    #[test]
    fn sigma_antisymmetric() {
        let rep = build_standard_rep();
        for mu in 0..4 {
            assert!(approx_eq(&rep.sigma(mu, mu), &SpinorMatrix::zeros()));
            for nu in 0..4 {
                assert!(approx_eq(&rep.sigma(mu, nu), &(-rep.sigma(nu, mu))));
            }
        }
    }

    #[test]
    fn hermitian_basis_is_trace_orthogonal() {
        let rep = build_standard_rep();
        let h = hermitian_basis(&rep);
        for a in 0..16 {
            assert!(approx_eq(&h[a].adjoint(), &h[a]));
            for b in 0..16 {
                let t = (h[a] * h[b]).trace();
                let expect = if a == b { 4.0 } else { 0.0 };
                assert!((t - c(expect)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn coefficients_of_vector_current_forms() {
        let rep = build_standard_rep();
        // γ⁰γ⁰ = I, γ⁰γⁱ = γ⁰ⁱ
        let c0 = hermitian_coefficients(&rep, &(rep.gamma(0) * rep.gamma(0)));
        assert!((c0[0] - 1.0).abs() < 1e-15);
        let c2 = hermitian_coefficients(&rep, &(rep.gamma(0) * rep.gamma(2)));
        assert!((c2[6] - 1.0).abs() < 1e-15);
        assert!((c2.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn commutant_of_boost_generators() {
        let rep = build_standard_rep();
        let gens = boost_generators(&rep);
        assert_eq!(commutant_in_basis(&rep, &gens), vec![0, GAMMA5_INDEX]);
    }

    #[test]
    fn commutant_trivial_cases() {
        let rep = build_standard_rep();
        let all: Vec<usize> = (0..16).collect();
        assert_eq!(commutant_in_basis(&rep, &[]), all);
        assert_eq!(commutant_in_basis(&rep, &[SpinorMatrix::identity()]), all);
    }

    #[test]
    fn commutant_filter_is_idempotent() {
        let rep = build_standard_rep();
        let basis = sixteen_basis(&rep);
        for gens in [boost_generators(&rep), vec![*rep.gamma(0)], vec![rep.sigma(1, 2)]] {
            let once = commutant_in_basis(&rep, &gens);
            let twice = filter_commuting(&basis, once.clone(), &gens);
            assert_eq!(once, twice);
        }
    }
}
