//! Bilinear covariants of a Dirac spinor and the quartic identities among
//! their rotational scalars.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::gamma::{GammaRep, Spinor, SpinorMatrix, BIVECTOR_PAIRS};
use crate::linalg;

/// Imaginary parts above this (relative to max(1, α)) indicate a broken
/// hermiticity and are reported by [`compute_bilinears_checked`].
pub const REALITY_TOL: f64 = 1e-12;

/// β = ψ̄ψ, Vᵘ = ψ̄γᵘψ, Sᵘ = ψ̄γᵘγ⁵ψ, Bᵘᵛ = iψ̄γᵘᵛψ, χ = iψ̄γ⁵ψ and the
/// rotational scalars α = ψ†ψ, δ = ψ†γ⁵ψ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BilinearSet {
    pub alpha: f64,
    pub beta: f64,
    pub chi: f64,
    pub delta: f64,
    pub v: [f64; 4],
    pub s: [f64; 4],
    /// Bᵘᵛ for (μ,ν) in [`BIVECTOR_PAIRS`] order.
    pub b: [f64; 6],
}

impl BilinearSet {
    /// Bᵘᵛ for any index pair, antisymmetric by construction.
    pub fn bivector(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            return 0.0;
        }
        let (a, b, sign) = if mu < nu { (mu, nu, 1.0) } else { (nu, mu, -1.0) };
        let idx = BIVECTOR_PAIRS.iter().position(|&p| p == (a, b)).expect("valid pair");
        sign * self.b[idx]
    }
}

fn minkowski(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Bilinears together with the largest discarded imaginary part.
pub fn compute_bilinears_checked(psi: &Spinor, rep: &GammaRep) -> (BilinearSet, f64) {
    let mut worst: f64 = 0.0;
    let mut form = |m: &SpinorMatrix, phase: Complex64| -> f64 {
        let z = rep.sandwich(psi, m, psi) * phase;
        worst = worst.max(z.im.abs());
        z.re
    };
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let id = SpinorMatrix::identity();
    let g5 = *rep.gamma5();

    let beta = form(&id, one);
    let chi = form(&g5, i);
    let v: [f64; 4] = std::array::from_fn(|mu| form(rep.gamma(mu), one));
    let s: [f64; 4] = std::array::from_fn(|mu| form(&(rep.gamma(mu) * g5), one));
    let b: [f64; 6] = std::array::from_fn(|k| {
        let (mu, nu) = BIVECTOR_PAIRS[k];
        form(&rep.sigma(mu, nu), i)
    });
    let alpha = psi.norm_squared();
    let delta = {
        let z = psi.dotc(&(g5 * psi));
        worst = worst.max(z.im.abs());
        z.re
    };
    (
        BilinearSet {
            alpha,
            beta,
            chi,
            delta,
            v,
            s,
            b,
        },
        worst,
    )
}

pub fn compute_bilinears(psi: &Spinor, rep: &GammaRep) -> BilinearSet {
    compute_bilinears_checked(psi, rep).0
}

/// Normalised residuals of the four groups of quartic identities:
///
/// 0. VᵘVᵤ = −SᵘSᵤ = β² + χ²
/// 1. V⁰S⁰ = −VⁱSᵢ = αδ
/// 2. Σ(Vⁱ)² = α² − β² − χ²
/// 3. Σ(Sⁱ)² = δ² + β² + χ²
///
/// Each entry is the largest absolute residual in its group divided by
/// max(1, α²).
pub fn fierz_residuals(psi: &Spinor, rep: &GammaRep) -> [f64; 4] {
    let b = compute_bilinears(psi, rep);
    let bc = b.beta * b.beta + b.chi * b.chi;
    let vv = minkowski(&b.v, &b.v);
    let ss = minkowski(&b.s, &b.s);
    // VⁱSᵢ with the spatial index lowered
    let vs_spatial: f64 = -(1..4).map(|i| b.v[i] * b.s[i]).sum::<f64>();
    let v_sq: f64 = (1..4).map(|i| b.v[i] * b.v[i]).sum();
    let s_sq: f64 = (1..4).map(|i| b.s[i] * b.s[i]).sum();
    let ad = b.alpha * b.delta;
    let norm = (b.alpha * b.alpha).max(1.0);
    [
        (vv - bc).abs().max((ss + bc).abs()) / norm,
        (b.v[0] * b.s[0] - ad).abs().max((vs_spatial + ad).abs()) / norm,
        (v_sq - b.alpha * b.alpha + bc).abs() / norm,
        (s_sq - b.delta * b.delta - bc).abs() / norm,
    ]
}

/// Jacobian of (α, β, χ, δ) with respect to (Re ψᵃ, Im ψᵃ), a = 1..4.
///
/// Each scalar is a Hermitian form ψ†Hψ, whose gradient is 2 Re(Hψ) in the
/// real parts and 2 Im(Hψ) in the imaginary parts.
pub fn rotational_scalar_jacobian(psi: &Spinor, rep: &GammaRep) -> DMatrix<f64> {
    let g0 = *rep.gamma(0);
    let g5 = *rep.gamma5();
    let forms = [
        SpinorMatrix::identity(),
        g0,
        g0 * g5 * Complex64::new(0.0, 1.0),
        g5,
    ];
    let mut jac = DMatrix::zeros(4, 8);
    for (row, h) in forms.iter().enumerate() {
        let hp = h * psi;
        for a in 0..4 {
            jac[(row, 2 * a)] = 2.0 * hp[a].re;
            jac[(row, 2 * a + 1)] = 2.0 * hp[a].im;
        }
    }
    jac
}

/// Numerical rank of [`rotational_scalar_jacobian`] with singular-value
/// threshold 1e-8·σ_max.
pub fn rotational_scalar_rank(psi: &Spinor, rep: &GammaRep) -> usize {
    linalg::numerical_rank(&rotational_scalar_jacobian(psi, rep), 1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::{random_spinor, seeded_rng};
    use nalgebra::Vector4;

    fn basis_spinor(i: usize) -> Spinor {
        let mut s = Spinor::zeros();
        s[i] = Complex64::new(1.0, 0.0);
        s
    }

    #[test]
    fn rest_frame_spinor() {
        let rep = GammaRep::standard();
        let b = compute_bilinears(&basis_spinor(0), &rep);
        assert_eq!(b.alpha, 1.0);
        assert_eq!(b.beta, 1.0);
        assert_eq!(b.chi, 0.0);
        assert_eq!(b.delta, 0.0);
        assert_eq!(b.v, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(fierz_residuals(&basis_spinor(0), &rep), [0.0; 4]);
    }

    #[test]
    fn zero_spinor() {
        let rep = GammaRep::standard();
        let b = compute_bilinears(&Spinor::zeros(), &rep);
        assert_eq!(b, BilinearSet::default());
    }

    #[test]
    fn random_spinors_have_real_forms() {
        let rep = GammaRep::standard();
        let mut rng = seeded_rng(17);
        for _ in 0..200 {
            let psi = random_spinor(&mut rng);
            let (b, imag) = compute_bilinears_checked(&psi, &rep);
            assert!(imag <= REALITY_TOL * b.alpha.max(1.0));
            assert!((b.alpha - b.v[0]).abs() < 1e-14);
            assert!((b.delta - b.s[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn bivector_antisymmetric() {
        let rep = GammaRep::standard();
        let b = compute_bilinears(&random_spinor(&mut seeded_rng(2)), &rep);
        for mu in 0..4 {
            assert_eq!(b.bivector(mu, mu), 0.0);
            for nu in 0..4 {
                assert_eq!(b.bivector(mu, nu), -b.bivector(nu, mu));
            }
        }
    }

    #[test]
    fn fierz_identities_hold_for_random_spinors() {
        let rep = GammaRep::standard();
        let mut rng = seeded_rng(1);
        for _ in 0..1000 {
            let psi = random_spinor(&mut rng);
            for r in fierz_residuals(&psi, &rep) {
                assert!(r <= 1e-12, "residual {r}");
            }
            let b = compute_bilinears(&psi, &rep);
            assert!(minkowski(&b.v, &b.v) >= 0.0);
            assert!(b.v[0] >= 0.0);
        }
    }

    #[test]
    fn fierz_identities_quartic_homogeneous() {
        let rep = GammaRep::standard();
        let mut rng = seeded_rng(4);
        for lam in [Complex64::new(3.0, -4.0), Complex64::new(0.01, 0.02), Complex64::new(-20.0, 7.0)] {
            let psi = random_spinor(&mut rng) * lam;
            for r in fierz_residuals(&psi, &rep) {
                assert!(r <= 1e-12);
            }
        }
    }

    #[test]
    fn scalars_functionally_independent() {
        let rep = GammaRep::standard();
        let mut rng = seeded_rng(5);
        for _ in 0..20 {
            assert_eq!(rotational_scalar_rank(&random_spinor(&mut rng), &rep), 4);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let rep = GammaRep::standard();
        let psi = random_spinor(&mut seeded_rng(6));
        let jac = rotational_scalar_jacobian(&psi, &rep);
        let scalars = |p: &Spinor| {
            let b = compute_bilinears(p, &rep);
            [b.alpha, b.beta, b.chi, b.delta]
        };
        let h = 1e-6;
        for a in 0..4 {
            for (col, dir) in [(2 * a, Complex64::new(h, 0.0)), (2 * a + 1, Complex64::new(0.0, h))] {
                let mut e = Vector4::zeros();
                e[a] = dir;
                let (up, dn) = (scalars(&(psi + e)), scalars(&(psi - e)));
                for row in 0..4 {
                    let fd = (up[row] - dn[row]) / (2.0 * h);
                    assert!((fd - jac[(row, col)]).abs() < 1e-8);
                }
            }
        }
    }
}
