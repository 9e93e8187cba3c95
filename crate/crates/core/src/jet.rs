//! Field jets: value plus first and second spacetime derivatives at a point.
//!
//! Derivatives are taken with respect to the contravariant coordinates,
//! `d1[μ] = ∂ψ/∂xᵘ = ∂ᵤψ` and `d2[μ][ν] = ∂ᵤ∂ᵥψ`. For the relativistic
//! equations x⁰ = ct; for Pauli and Schrödinger fields x⁰ = t.

use nalgebra::SVector;
use num_complex::Complex64;

use crate::gamma::METRIC;

pub type Amplitude<const N: usize> = SVector<Complex64, N>;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<const N: usize> {
    pub x: [f64; 4],
    pub value: Amplitude<N>,
    pub d1: [Amplitude<N>; 4],
    pub d2: [[Amplitude<N>; 4]; 4],
}

/// Dirac spinor jet.
pub type DiracJet = Jet<4>;
/// Klein-Gordon or Schrödinger scalar jet.
pub type ScalarJet = Jet<1>;
/// Pauli two-spinor jet.
pub type PauliJet = Jet<2>;

impl<const N: usize> Jet<N> {
    pub fn zero(x: [f64; 4]) -> Self {
        let z = Amplitude::<N>::zeros();
        Jet {
            x,
            value: z,
            d1: [z; 4],
            d2: [[z; 4]; 4],
        }
    }

    /// ∂ᵘψ = ηᵘᵘ ∂ᵤψ.
    pub fn d1_up(&self, mu: usize) -> Amplitude<N> {
        self.d1[mu] * Complex64::new(METRIC[mu], 0.0)
    }

    /// ∂ᵤ∂ᵛψ (second index raised).
    pub fn d2_mixed(&self, mu: usize, nu: usize) -> Amplitude<N> {
        self.d2[mu][nu] * Complex64::new(METRIC[nu], 0.0)
    }

    /// □ψ = ∂ᵘ∂ᵤψ.
    pub fn box_op(&self) -> Amplitude<N> {
        (0..4).fold(Amplitude::<N>::zeros(), |acc, mu| {
            acc + self.d2[mu][mu] * Complex64::new(METRIC[mu], 0.0)
        })
    }

    /// Spatial Laplacian ∇²ψ.
    pub fn laplacian(&self) -> Amplitude<N> {
        self.d2[1][1] + self.d2[2][2] + self.d2[3][3]
    }

    /// Jet of the complex-conjugate field.
    pub fn conj(&self) -> Self {
        let c = |a: &Amplitude<N>| a.map(|z| z.conj());
        Jet {
            x: self.x,
            value: c(&self.value),
            d1: std::array::from_fn(|m| c(&self.d1[m])),
            d2: std::array::from_fn(|m| std::array::from_fn(|n| c(&self.d2[m][n]))),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Jet {
            x: self.x,
            value: self.value * s,
            d1: std::array::from_fn(|m| self.d1[m] * s),
            d2: std::array::from_fn(|m| std::array::from_fn(|n| self.d2[m][n] * s)),
        }
    }

    /// Largest |d2[μ][ν] − d2[ν][μ]| over all index pairs.
    pub fn d2_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                worst = worst.max((self.d2[mu][nu] - self.d2[nu][mu]).norm());
            }
        }
        worst
    }

    /// Componentwise sum; the point `x` of `self` is kept.
    pub fn add(&self, other: &Self) -> Self {
        Jet {
            x: self.x,
            value: self.value + other.value,
            d1: std::array::from_fn(|m| self.d1[m] + other.d1[m]),
            d2: std::array::from_fn(|m| std::array::from_fn(|n| self.d2[m][n] + other.d2[m][n])),
        }
    }
}

impl ScalarJet {
    pub fn psi(&self) -> Complex64 {
        self.value[0]
    }

    pub fn d(&self, mu: usize) -> Complex64 {
        self.d1[mu][0]
    }

    pub fn dd(&self, mu: usize, nu: usize) -> Complex64 {
        self.d2[mu][nu][0]
    }
}
