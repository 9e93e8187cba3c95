//! Currents, decomposition terms and stress tensors as pure functions of a
//! jet.
//!
//! All four-vectors are returned with the index up. Components are complex:
//! the physical currents are real up to roundoff and the imaginary parts are
//! kept as a diagnostic. The two identically conserved bivector currents are
//! kept exactly as `k ∂ᵥ(…)` with a real `k`; their bracket is purely
//! imaginary, so they come out imaginary unless `k` carries a factor of i.

use num_complex::Complex64;

use crate::gamma::{standard_rep, Spinor, SpinorMatrix, METRIC};
use crate::jet::{DiracJet, PauliJet, ScalarJet};
use crate::solution::PhysicalConstants;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector(pub [Complex64; 4]);

impl FourVector {
    pub fn zero() -> Self {
        FourVector::default()
    }

    pub fn from_real(v: [f64; 4]) -> Self {
        FourVector(v.map(re))
    }

    pub fn real(&self) -> [f64; 4] {
        self.0.map(|z| z.re)
    }

    /// Largest |Im jᵘ|.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Largest |jᵘ|.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// jᵘjᵤ (complex, no conjugation).
    pub fn minkowski_square(&self) -> Complex64 {
        (0..4).map(|mu| self.0[mu] * self.0[mu] * METRIC[mu]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        FourVector(self.0.map(|z| z * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|mu| self.0[mu] + rhs.0[mu]))
    }
}

impl std::ops::Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|mu| self.0[mu] - rhs.0[mu]))
    }
}

impl std::ops::Index<usize> for FourVector {
    type Output = Complex64;
    fn index(&self, mu: usize) -> &Complex64 {
        &self.0[mu]
    }
}

/// Tᵘᵛ with both indices up.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RankTwoTensor(pub [[Complex64; 4]; 4]);

impl RankTwoTensor {
    /// Tᵘᵛ kᵥ for a contravariant `k`.
    pub fn contract_second(&self, k_upper: [f64; 4]) -> FourVector {
        FourVector(std::array::from_fn(|mu| {
            (0..4).map(|nu| self.0[mu][nu] * (k_upper[nu] * METRIC[nu])).sum()
        }))
    }

    /// Largest |Tᵘᵛ + Tᵛᵘ|.
    pub fn symmetric_part_norm(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                worst = worst.max((self.0[mu][nu] + self.0[nu][mu]).norm());
            }
        }
        worst
    }

    /// Tᵘᵤ.
    pub fn trace(&self) -> Complex64 {
        (0..4).map(|mu| self.0[mu][mu] * METRIC[mu]).sum()
    }
}

/// Non-relativistic density and flux (ρ, j), with x⁰ = t.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityFlux {
    pub rho: f64,
    pub j: [f64; 3],
}

impl From<FourVector> for DensityFlux {
    fn from(v: FourVector) -> Self {
        DensityFlux {
            rho: v.0[0].re,
            j: [v.0[1].re, v.0[2].re, v.0[3].re],
        }
    }
}

// ---------------------------------------------------------------------------
// Dirac

/// ψ̄Γφ.
fn bar(a: &Spinor, m: &SpinorMatrix, b: &Spinor) -> Complex64 {
    standard_rep().sandwich(a, m, b)
}

/// jᵘ = g ψ̄γᵘψ + hᵘ. With g = c and h = 0 this is the Dirac probability
/// current.
pub fn dirac_current(jet: &DiracJet, g: f64, h: [f64; 4]) -> FourVector {
    let rep = standard_rep();
    let psi = &jet.value;
    FourVector(std::array::from_fn(|mu| bar(psi, rep.gamma(mu), psi) * g + h[mu]))
}

/// The Dirac probability current cψ̄γᵘψ.
pub fn dirac_probability_current(jet: &DiracJet, k: &PhysicalConstants) -> FourVector {
    dirac_current(jet, k.c, [0.0; 4])
}

/// ∂ᵥ(ψ̄γᵘᵛψ) expanded by the product rule.
fn bivector_divergence(jet: &DiracJet) -> FourVector {
    let rep = standard_rep();
    let psi = &jet.value;
    FourVector(std::array::from_fn(|mu| {
        (0..4)
            .filter(|&nu| nu != mu)
            .map(|nu| {
                let s = rep.sigma(mu, nu);
                bar(&jet.d1[nu], &s, psi) + bar(psi, &s, &jet.d1[nu])
            })
            .sum()
    }))
}

/// Gordon split of the Dirac current with constant potential `a` (index up):
///
/// * convective Gᵘ = (iħ/2m)(ψ̄∂ᵘψ − (∂ᵘψ̄)ψ) − (e/m)ψ̄ψAᵘ
/// * internal = (iħ/2m)∂ᵥ(ψ̄γᵘᵛψ)
///
/// On solutions their sum is cψ̄γᵘψ.
pub fn gordon_decomposition(jet: &DiracJet, k: &PhysicalConstants, a: [f64; 4]) -> (FourVector, FourVector) {
    let id = SpinorMatrix::identity();
    let psi = &jet.value;
    let pref = I * (k.hbar / (2.0 * k.m));
    let beta = bar(psi, &id, psi);
    let convective = FourVector(std::array::from_fn(|mu| {
        let d_up = jet.d1_up(mu);
        pref * (bar(psi, &id, &d_up) - bar(&d_up, &id, psi)) - beta * (k.e / k.m * a[mu])
    }));
    let internal = bivector_divergence(jet).scale(pref);
    (convective, internal)
}

/// aᵘ = k ∂ᵥ(ψ̄γᵘᵛψ), identically divergence-free.
pub fn bivector_current(jet: &DiracJet, k: f64) -> FourVector {
    bivector_divergence(jet).scale(re(k))
}

/// Second-order conserved vector of the free Dirac equation:
///
/// (ħ²/2m²c)[−ψ̄γᵛ∂ᵥ∂ᵘψ − (∂ᵥ∂ᵘψ̄)γᵛψ + ∂ᵥ(ψ̄γᵘ∂ᵛψ + (∂ᵛψ̄)γᵘψ)]
pub fn dirac_second_order(jet: &DiracJet, k: &PhysicalConstants) -> FourVector {
    let rep = standard_rep();
    let psi = &jet.value;
    let pref = k.hbar * k.hbar / (2.0 * k.m * k.m * k.c);
    let box_psi = jet.box_op();
    FourVector(std::array::from_fn(|mu| {
        let g_mu = rep.gamma(mu);
        let mut acc = Complex64::new(0.0, 0.0);
        for nu in 0..4 {
            // ∂ᵥ∂ᵘψ
            let dd = jet.d2_mixed(nu, mu);
            acc -= bar(psi, rep.gamma(nu), &dd) + bar(&dd, rep.gamma(nu), psi);
            // (∂ᵥψ̄)γᵘ∂ᵛψ + (∂ᵛψ̄)γᵘ∂ᵥψ
            acc += bar(&jet.d1[nu], g_mu, &jet.d1[nu]) * (2.0 * METRIC[nu]);
        }
        acc += bar(psi, g_mu, &box_psi) + bar(&box_psi, g_mu, psi);
        acc * pref
    }))
}

/// Canonical Dirac tensor Tᵘᵛ = ψ̄γᵘ∂ᵛψ − (∂ᵘψ̄)γᵛψ, without the usual
/// iħc/2 prefactor.
pub fn dirac_stress(jet: &DiracJet) -> RankTwoTensor {
    let rep = standard_rep();
    let psi = &jet.value;
    RankTwoTensor(std::array::from_fn(|mu| {
        std::array::from_fn(|nu| {
            bar(psi, rep.gamma(mu), &jet.d1_up(nu)) - bar(&jet.d1_up(mu), rep.gamma(nu), psi)
        })
    }))
}

/// (T⁰⁰, (2mc/iħ)ψ̄ψ + (∂ᵢψ̄)γⁱψ − ψ̄γⁱ∂ᵢψ). The two agree on free solutions.
pub fn t00_rewrite(jet: &DiracJet, k: &PhysicalConstants) -> (Complex64, Complex64) {
    let rep = standard_rep();
    let psi = &jet.value;
    let lhs = dirac_stress(jet).0[0][0];
    let mut rhs = bar(psi, &SpinorMatrix::identity(), psi) * (re(2.0 * k.m * k.c) / (I * k.hbar));
    for i in 1..4 {
        rhs += bar(&jet.d1[i], rep.gamma(i), psi) - bar(psi, rep.gamma(i), &jet.d1[i]);
    }
    (lhs, rhs)
}

/// (G⁰, cψ†ψ − (iħ/2m)∂ᵢ(ψ†γⁱψ)) with G the convective Gordon term. Equal on
/// solutions.
pub fn g0_reduction(jet: &DiracJet, k: &PhysicalConstants, a: [f64; 4]) -> (Complex64, Complex64) {
    let rep = standard_rep();
    let psi = &jet.value;
    let (g, _) = gordon_decomposition(jet, k, a);
    let mut div = Complex64::new(0.0, 0.0);
    for i in 1..4 {
        let gi = rep.gamma(i);
        div += jet.d1[i].dotc(&(gi * psi)) + psi.dotc(&(gi * jet.d1[i]));
    }
    let rhs = re(k.c * psi.norm_squared()) - I * (k.hbar / (2.0 * k.m)) * div;
    (g.0[0], rhs)
}

// ---------------------------------------------------------------------------
// Klein-Gordon

/// jᵘ = g(ψ*∂ᵘψ − ψ∂ᵘψ*) + hᵘ.
pub fn kg_current(jet: &ScalarJet, g: Complex64, h: [Complex64; 4]) -> FourVector {
    let psi = jet.psi();
    FourVector(std::array::from_fn(|mu| {
        let d = jet.d(mu) * METRIC[mu];
        g * (psi.conj() * d - psi * d.conj()) + h[mu]
    }))
}

/// The usual Klein-Gordon current, g = iħ/2m.
pub fn kg_probability_current(jet: &ScalarJet, k: &PhysicalConstants) -> FourVector {
    kg_current(jet, I * (k.hbar / (2.0 * k.m)), [Complex64::new(0.0, 0.0); 4])
}

/// ∂ᵥ(∂ᵘψ∂ᵛψ* − ∂ᵛψ∂ᵘψ*) expanded onto the jet.
fn kg_bivector_bracket(jet: &ScalarJet) -> FourVector {
    let box_psi = jet.box_op()[0];
    FourVector(std::array::from_fn(|mu| {
        let e_mu = METRIC[mu];
        let d_up_mu = jet.d(mu) * e_mu;
        let mut acc = d_up_mu * box_psi.conj() - box_psi * d_up_mu.conj();
        for nu in 0..4 {
            let e_nu = METRIC[nu];
            // ∂ᵥ∂ᵘψ ∂ᵛψ* − ∂ᵛψ ∂ᵥ∂ᵘψ*
            let dd = jet.dd(nu, mu) * e_mu;
            acc += dd * (jet.d(nu).conj() * e_nu) - (jet.d(nu) * e_nu) * dd.conj();
        }
        acc
    }))
}

/// aᵘ = k ∂ᵥ(∂ᵘψ∂ᵛψ* − ∂ᵛψ∂ᵘψ*), identically divergence-free.
pub fn kg_bivector_current(jet: &ScalarJet, k: f64) -> FourVector {
    kg_bivector_bracket(jet).scale(re(k))
}

/// Second-order Klein-Gordon vector (iħ³/2m³c²)(∂ᵛ∂ᵘψ ∂ᵥψ* − ∂ᵥψ ∂ᵛ∂ᵘψ*).
pub fn kg_second_order(jet: &ScalarJet, k: &PhysicalConstants) -> FourVector {
    let pref = I * (k.hbar.powi(3) / (2.0 * k.m.powi(3) * k.c * k.c));
    FourVector(std::array::from_fn(|mu| {
        let mut acc = Complex64::new(0.0, 0.0);
        for nu in 0..4 {
            // ∂ᵛ∂ᵘψ = η^νν η^μμ ∂ᵥ∂ᵤψ
            let dd = jet.dd(nu, mu) * (METRIC[nu] * METRIC[mu]);
            acc += dd * jet.d(nu).conj() - jet.d(nu) * dd.conj();
        }
        acc * pref
    }))
}

/// The identically conserved remainder of the Klein-Gordon current,
/// (iħ³/2m³c²)∂ᵥ(∂ᵛψ∂ᵘψ* − ∂ᵘψ∂ᵛψ*), so that on solutions
/// `kg_probability_current = kg_second_order + kg_second_order_remainder`.
pub fn kg_second_order_remainder(jet: &ScalarJet, k: &PhysicalConstants) -> FourVector {
    let pref = I * (k.hbar.powi(3) / (2.0 * k.m.powi(3) * k.c * k.c));
    kg_bivector_bracket(jet).scale(-pref)
}

/// Symmetric Klein-Gordon stress tensor
/// Tᵘᵛ = ∂ᵘψ*∂ᵛψ + ∂ᵛψ*∂ᵘψ − ηᵘᵛ(∂ᵅψ*∂ₐψ − (m²c²/ħ²)ψ*ψ).
pub fn kg_stress_tensor(jet: &ScalarJet, k: &PhysicalConstants) -> RankTwoTensor {
    let psi = jet.psi();
    let up: [Complex64; 4] = std::array::from_fn(|mu| jet.d(mu) * METRIC[mu]);
    let lagr: Complex64 =
        (0..4).map(|a| up[a].conj() * jet.d(a)).sum::<Complex64>() - psi.conj() * psi * k.compton_wavenumber().powi(2);
    RankTwoTensor(std::array::from_fn(|mu| {
        std::array::from_fn(|nu| {
            let eta = if mu == nu { METRIC[mu] } else { 0.0 };
            up[mu].conj() * up[nu] + up[nu].conj() * up[mu] - lagr * eta
        })
    }))
}

/// lᵘ = kᵥTᵘᵛ for a constant contravariant `k`.
pub fn kg_stress_current(jet: &ScalarJet, k: &PhysicalConstants, k_vec: [f64; 4]) -> FourVector {
    kg_stress_tensor(jet, k).contract_second(k_vec)
}

// ---------------------------------------------------------------------------
// Pauli and Schrödinger

/// Pauli current as a four-vector (ρ, j) with x⁰ = t:
/// ρ = φ†φ, j = (ħ/2mi)(φ†∇φ − (∇φ†)φ) − (eρ/m)A + (1/m)∇×(ρs),
/// with ρs = (ħ/2)φ†σφ taken directly so nothing divides by ρ.
pub fn pauli_four_current(jet: &PauliJet, k: &PhysicalConstants, a: [f64; 3]) -> FourVector {
    let sigma = crate::gamma::pauli();
    let phi = &jet.value;
    let rho = phi.dotc(phi);
    // ∂ⱼ(ρsₖ) = (ħ/2)(∂ⱼφ†σₖφ + φ†σₖ∂ⱼφ)
    let d_spin = |j: usize, kk: usize| -> Complex64 {
        let d = &jet.d1[j + 1];
        (d.dotc(&(sigma[kk] * phi)) + phi.dotc(&(sigma[kk] * d))) * (0.5 * k.hbar)
    };
    let mut out = [rho, Complex64::default(), Complex64::default(), Complex64::default()];
    for j in 0..3 {
        let d = &jet.d1[j + 1];
        let conv = (phi.dotc(d) - d.dotc(phi)) * (re(k.hbar / (2.0 * k.m)) / I);
        let (a1, a2) = ((j + 1) % 3, (j + 2) % 3);
        let curl = d_spin(a1, a2) - d_spin(a2, a1);
        out[j + 1] = conv - rho * (k.e / k.m * a[j]) + curl / k.m;
    }
    FourVector(out)
}

pub fn pauli_current(jet: &PauliJet, k: &PhysicalConstants, a: [f64; 3]) -> DensityFlux {
    pauli_four_current(jet, k, a).into()
}

/// Schrödinger current as (ρ, j) with x⁰ = t:
/// ρ = Ψ*Ψ, j = (ħ/2mi)(Ψ*∇Ψ − (∇Ψ*)Ψ), plus (1/m)∇(Ψ*Ψ)×s when the state
/// carries the spin vector `s`.
pub fn schrodinger_four_current(jet: &ScalarJet, k: &PhysicalConstants, spin: Option<[f64; 3]>) -> FourVector {
    let psi = jet.psi();
    let rho = psi.conj() * psi;
    let grad: [Complex64; 3] = std::array::from_fn(|j| jet.d(j + 1));
    let grad_rho: [Complex64; 3] = std::array::from_fn(|j| psi.conj() * grad[j] + grad[j].conj() * psi);
    let mut out = [rho, Complex64::default(), Complex64::default(), Complex64::default()];
    for j in 0..3 {
        out[j + 1] = (psi.conj() * grad[j] - grad[j].conj() * psi) * (re(k.hbar / (2.0 * k.m)) / I);
        if let Some(s) = spin {
            let (a1, a2) = ((j + 1) % 3, (j + 2) % 3);
            out[j + 1] += (grad_rho[a1] * s[a2] - grad_rho[a2] * s[a1]) / k.m;
        }
    }
    FourVector(out)
}

pub fn schrodinger_current(jet: &ScalarJet, k: &PhysicalConstants, spin: Option<[f64; 3]>) -> DensityFlux {
    schrodinger_four_current(jet, k, spin).into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;
    use crate::solution::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rest_dirac_field(k: &PhysicalConstants) -> DiracField {
        let m = dirac_plane_wave([0.0; 3], 1, 1, k, [0.0; 4]).unwrap();
        DiracField::new(vec![m], *k, [0.0; 4], false).unwrap()
    }

    fn close(a: &FourVector, b: [f64; 4], tol: f64) -> bool {
        (0..4).all(|mu| (a.0[mu] - re(b[mu])).norm() <= tol)
    }

    #[test]
    fn dirac_current_rest_frame() {
        let k = PhysicalConstants::default();
        let jet = rest_dirac_field(&k).jet([0.3, 1.0, 2.0, -1.0]);
        assert!(close(&dirac_current(&jet, 1.0, [0.0; 4]), [1.0, 0.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn dirac_current_of_zero_field_is_h() {
        let jet = Jet::<4>::zero([0.0; 4]);
        let h = [1.0, 2.0, 3.0, 4.0];
        assert!(close(&dirac_current(&jet, 1.0, h), h, 0.0));
    }

    #[test]
    fn dirac_current_causal_future_pointing() {
        let mut rng = seeded_rng(3);
        for _ in 0..500 {
            let mut jet = Jet::<4>::zero([0.0; 4]);
            jet.value = random_spinor(&mut rng);
            let j = dirac_current(&jet, 1.0, [0.0; 4]);
            assert!(j.max_imag() < 1e-14);
            assert!(j.minkowski_square().re >= 0.0);
            assert!(j.0[0].re >= 0.0);
        }
    }

    #[test]
    fn gordon_rest_frame() {
        let k = PhysicalConstants::default();
        let jet = rest_dirac_field(&k).jet([1.1, -0.4, 0.2, 0.9]);
        let (g, int) = gordon_decomposition(&jet, &k, [0.0; 4]);
        assert!(close(&g, [1.0, 0.0, 0.0, 0.0], 1e-15));
        assert!(close(&int, [0.0; 4], 1e-15));
    }

    #[test]
    fn gordon_identity_on_shell_and_fails_off_shell() {
        let k = PhysicalConstants::default().with_charge(0.7);
        let a = [0.3, -0.1, 0.2, 0.25];
        let mut rng = seeded_rng(21);
        let f = random_dirac_field(&mut rng, 3, &k, a, MomentumSampling::Uniform(2.0)).unwrap();
        for _ in 0..50 {
            let jet = f.jet(random_point(&mut rng, 5.0));
            let j = dirac_probability_current(&jet, &k);
            let (g, int) = gordon_decomposition(&jet, &k, a);
            let diff = (j - (g + int)).max_abs();
            assert!(diff <= 1e-10 * j.max_abs().max(1e-300), "diff {diff}");
        }
        let WaveField::Dirac(off) = offshell_variant(&WaveField::Dirac(f), 4).unwrap() else { unreachable!() };
        let worst = (0..20)
            .map(|_| {
                let jet = off.jet(random_point(&mut rng, 5.0));
                let j = dirac_probability_current(&jet, &k);
                let (g, int) = gordon_decomposition(&jet, &k, a);
                (j - (g + int)).max_abs() / j.max_abs()
            })
            .fold(0.0, f64::max);
        assert!(worst > 0.1);
    }

    #[test]
    fn bivector_current_vanishes_for_single_mode_and_zero_k() {
        let k = PhysicalConstants::default();
        let m = dirac_plane_wave([0.4, 1.0, -0.3], -1, 2, &k, [0.0; 4]).unwrap();
        let f = DiracField::new(vec![m], k, [0.0; 4], false).unwrap();
        let jet = f.jet([0.2, 0.1, 0.5, -0.6]);
        assert!(bivector_current(&jet, 1.0).max_abs() < 1e-14);
        let g = random_dirac_field(&mut seeded_rng(1), 3, &k, [0.0; 4], MomentumSampling::Uniform(2.0)).unwrap();
        assert_eq!(bivector_current(&g.jet([0.0; 4]), 0.0).max_abs(), 0.0);
    }

    #[test]
    fn second_order_rest_frame_and_zero() {
        let k = PhysicalConstants::default();
        let jet = rest_dirac_field(&k).jet([0.7, 0.0, 1.0, 0.0]);
        assert!(close(&dirac_second_order(&jet, &k), [1.0, 0.0, 0.0, 0.0], 1e-14));
        assert_eq!(dirac_second_order(&Jet::zero([0.0; 4]), &k).max_abs(), 0.0);
    }

    #[test]
    fn stress_rest_frame_and_rewrite() {
        let k = PhysicalConstants::default();
        let jet = rest_dirac_field(&k).jet([0.7, 0.0, 1.0, 0.0]);
        let t = dirac_stress(&jet);
        assert!((t.0[0][0] - c(0.0, -2.0)).norm() < 1e-14);
        let (lhs, rhs) = t00_rewrite(&jet, &k);
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn stress_rewrite_on_random_free_field() {
        let k = PhysicalConstants { hbar: 0.8, c: 1.2, m: 0.9, ..Default::default() };
        let mut rng = seeded_rng(31);
        let f = random_dirac_field(&mut rng, 5, &k, [0.0; 4], MomentumSampling::Uniform(2.0)).unwrap();
        for _ in 0..50 {
            let jet = f.jet(random_point(&mut rng, 5.0));
            let (lhs, rhs) = t00_rewrite(&jet, &k);
            let scale = lhs.norm().max(1.0);
            assert!((lhs - rhs).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn kg_current_rest_mode() {
        let k = PhysicalConstants::default();
        let m = kg_plane_wave([0.0; 3], 1, &k).unwrap();
        let f = KleinGordonField::new(vec![m], k, false).unwrap();
        let jet = f.jet([0.4, 1.0, 2.0, 3.0]);
        let j = kg_current(&jet, c(0.0, 0.5), [c(0.0, 0.0); 4]);
        assert!(close(&j, [1.0, 0.0, 0.0, 0.0], 1e-15));
        assert!(close(&kg_second_order(&jet, &k), [1.0, 0.0, 0.0, 0.0], 1e-14));
        let l = kg_stress_current(&jet, &k, [1.0, 0.0, 0.0, 0.0]);
        assert!(close(&l, [2.0, 0.0, 0.0, 0.0], 1e-14));
    }

    #[test]
    fn kg_current_of_real_field_has_no_flux() {
        // ψ = cos(k·x − ωt) as the sum of two conjugate waves
        let k = PhysicalConstants::default();
        let a = kg_plane_wave([0.3, 0.5, -0.2], 1, &k).unwrap().with_coeff(c(0.5, 0.0));
        let mut b = a.clone();
        b.p.0 = a.p.0.map(|x| -x);
        b.energy_sign = -1;
        let f = KleinGordonField::new(vec![a, b], k, false).unwrap();
        let mut rng = seeded_rng(2);
        for _ in 0..20 {
            let jet = f.jet(random_point(&mut rng, 3.0));
            assert!(jet.psi().im.abs() < 1e-15);
            assert!(kg_probability_current(&jet, &k).max_abs() < 1e-14);
        }
    }

    #[test]
    fn kg_zero_field() {
        let k = PhysicalConstants::default();
        let jet = Jet::<1>::zero([0.0; 4]);
        let h = [c(1.0, 0.0), c(0.0, 2.0), c(3.0, 0.0), c(0.0, 0.0)];
        assert_eq!(kg_current(&jet, c(0.0, 0.5), h).0, h);
        assert_eq!(kg_second_order(&jet, &k).max_abs(), 0.0);
        assert_eq!(kg_stress_current(&jet, &k, [0.0; 4]).max_abs(), 0.0);
    }

    #[test]
    fn kg_bivector_single_mode_zero() {
        let k = PhysicalConstants::default();
        let m = kg_plane_wave([0.3, 0.2, 1.0], -1, &k).unwrap();
        let f = KleinGordonField::new(vec![m], k, false).unwrap();
        let jet = f.jet([1.0, 2.0, 0.0, 0.5]);
        assert!(kg_bivector_current(&jet, 1.0).max_abs() < 1e-14);
        assert_eq!(kg_bivector_current(&jet, 0.0).max_abs(), 0.0);
    }

    #[test]
    fn kg_second_order_rearrangement() {
        let k = PhysicalConstants { hbar: 1.1, c: 0.9, m: 1.3, ..Default::default() };
        let mut rng = seeded_rng(12);
        let f = random_kg_field(&mut rng, 5, &k, MomentumSampling::Uniform(2.0)).unwrap();
        for _ in 0..30 {
            let jet = f.jet(random_point(&mut rng, 5.0));
            let j = kg_probability_current(&jet, &k);
            let parts = kg_second_order(&jet, &k) + kg_second_order_remainder(&jet, &k);
            assert!((j - parts).max_abs() <= 1e-10 * j.max_abs().max(1.0));
        }
    }

    #[test]
    fn dominant_energy_of_kg_stress_current() {
        let k = PhysicalConstants::default();
        let mut rng = seeded_rng(13);
        let f = random_kg_field(&mut rng, 5, &k, MomentumSampling::Uniform(2.0)).unwrap();
        for _ in 0..100 {
            let jet = f.jet(random_point(&mut rng, 5.0));
            let l = kg_stress_current(&jet, &k, [1.3, 0.2, -0.5, 0.4]);
            assert!(l.max_imag() < 1e-12 * l.max_abs().max(1.0));
            assert!(l.0[0].re >= 0.0);
            assert!(l.minkowski_square().re >= 0.0);
        }
    }

    #[test]
    fn pauli_plane_wave_current() {
        let k = PhysicalConstants { hbar: 1.0, c: 1.0, m: 2.0, e: 0.0, kappa: 0.5 };
        let kv = [0.4, -1.0, 0.3];
        let m = pauli_mode(kv, [c(0.6, 0.0), c(0.0, 0.8)], &k, [0.0; 3], [0.0; 3]).unwrap();
        let f = PauliField::new(vec![m], k, [0.0; 3], [0.0; 3], false).unwrap();
        let jet = f.jet([0.3, 0.1, 0.2, 0.3]);
        let cur = pauli_current(&jet, &k, [0.0; 3]);
        for j in 0..3 {
            assert!((cur.j[j] - k.hbar * kv[j] / k.m * cur.rho).abs() < 1e-14);
        }
        let zero = pauli_current(&Jet::zero([0.0; 4]), &k, [0.0; 3]);
        assert_eq!(zero, DensityFlux::default());
    }

    #[test]
    fn schrodinger_plane_wave_current() {
        let k = PhysicalConstants::default();
        let kv = [1.0, 0.5, -2.0];
        let f = SchrodingerField::new(vec![schrodinger_mode(kv, &k).unwrap().with_coeff(c(0.3, 0.4))], k, None, false).unwrap();
        let cur = schrodinger_current(&f.jet([0.1, 0.2, 0.3, 0.4]), &k, None);
        assert!((cur.rho - 0.25).abs() < 1e-15);
        for j in 0..3 {
            assert!((cur.j[j] - kv[j] * cur.rho).abs() < 1e-14);
        }
    }
}
