// SPDX-License-Identifier: Apache-2.0

//! Flux-tunable circuit: a SQUID embedded in an inductive loop.
//!
//! All Hamiltonians are written in the Fock basis of the flux-independent
//! oscillator `E_c n^2 + E_L phi^2`, whose frequency is `w0 = 2 sqrt(E_c E_L)`.
//! Energies are in GHz.

use nalgebra::ComplexField;

use crate::error::{Error, Result};
use crate::operators::{
    hermitian_eig, hermitian_function, phase_charge_operators, FockSpace, Operator,
};
use crate::scalar::Real;

/// Default tolerance of the truncation convergence protocol, GHz.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// Energy scales of the circuit (GHz) and the normalized SQUID flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams<T: Real> {
    pub e_c: T,
    pub e_j: T,
    pub e_l: T,
    pub f_s: T,
}

impl<T: Real> CircuitParams<T> {
    pub fn new(e_c: T, e_j: T, e_l: T, f_s: T) -> Result<Self> {
        for (name, v) in [("E_c", e_c), ("E_J", e_j), ("E_L", e_l)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                });
            }
        }
        if !f_s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "f_s",
                reason: format!("must be finite, got {f_s}"),
            });
        }
        Ok(Self { e_c, e_j, e_l, f_s })
    }

    /// `E_c = 0.12`, `E_J = 58`, `E_L = 58.6` GHz at the given flux.
    pub fn reference(f_s: T) -> Self {
        Self {
            e_c: T::lit(0.12),
            e_j: T::lit(58.0),
            e_l: T::lit(58.6),
            f_s,
        }
    }

    pub fn with_flux(&self, f_s: T) -> Self {
        Self { f_s, ..*self }
    }

    /// `E_J(f_s) = 2 E_J cos(pi f_s)`.
    pub fn josephson(&self) -> T {
        effective_josephson(self.e_j, self.f_s)
    }

    /// `w0 = 2 sqrt(E_c E_L)`.
    pub fn omega0(&self) -> T {
        T::lit(2.0) * (self.e_c * self.e_l).sqrt()
    }

    /// Oscillator mass `1 / (2 E_c)`.
    pub fn mass(&self) -> T {
        T::one() / (T::lit(2.0) * self.e_c)
    }

    pub fn stability(&self) -> Stability<T> {
        stability(self)
    }
}

/// `cos(pi x)`, exact at integer and half-integer `x`.
fn cos_pi<T: Real>(x: T) -> T {
    let twice = x * T::lit(2.0);
    if ComplexField::round(twice) == twice {
        if let Some(k) = twice.to_i64() {
            return match k.rem_euclid(4) {
                0 => T::one(),
                2 => -T::one(),
                _ => T::zero(),
            };
        }
    }
    (T::pi() * x).cos()
}

pub fn effective_josephson<T: Real>(e_j: T, f_s: T) -> T {
    T::lit(2.0) * e_j * cos_pi(f_s)
}

/// Harmonic-regime flag with its margin `E_L + E_J(f_s)/2` in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability<T: Real> {
    pub stable: bool,
    pub margin: T,
}

pub fn stability<T: Real>(p: &CircuitParams<T>) -> Stability<T> {
    let margin = p.e_l + p.josephson() / T::lit(2.0);
    Stability {
        stable: margin >= T::zero(),
        margin,
    }
}

fn require_stable<T: Real>(p: &CircuitParams<T>) -> Result<()> {
    let s = stability(p);
    if !s.stable {
        return Err(Error::Unstable {
            margin: s.margin.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Phase and charge operators of the `w0` basis, plus `n^2` and `phi^2`.
#[derive(Debug, Clone)]
pub struct CircuitBasis<T: Real> {
    pub phi: Operator<T>,
    pub n: Operator<T>,
    pub n2: Operator<T>,
    pub phi2: Operator<T>,
}

impl<T: Real> CircuitBasis<T> {
    pub fn new(p: &CircuitParams<T>, space: FockSpace) -> Result<Self> {
        let (phi, n) = phase_charge_operators(space, p.mass(), p.omega0())?;
        let n2 = n.mul(&n)?;
        let phi2 = phi.mul(&phi)?;
        Ok(Self { phi, n, n2, phi2 })
    }

    /// `E_c n^2 + quad phi^2 + extra`, summed in a fixed order so that equal
    /// coefficients give bit-identical matrices across Hamiltonian variants.
    fn assemble(&self, e_c: T, quad: T, extra: Option<Operator<T>>) -> Result<Operator<T>> {
        let h = self.n2.scale_real(e_c).add(&self.phi2.scale_real(quad))?;
        match extra {
            Some(x) => h.add(&x),
            None => Ok(h),
        }
    }
}

/// `H0 = E_c n^2 + E_L phi^2`.
pub fn harmonic_hamiltonian<T: Real>(
    p: &CircuitParams<T>,
    space: FockSpace,
) -> Result<Operator<T>> {
    CircuitBasis::new(p, space)?.assemble(p.e_c, p.e_l, None)
}

/// `H = E_c n^2 - E_J(f_s) cos(phi) + E_L phi^2`, with `cos(phi)` taken as a
/// Hermitian matrix function of the truncated phase operator.
pub fn full_hamiltonian<T: Real>(p: &CircuitParams<T>, space: FockSpace) -> Result<Operator<T>> {
    require_stable(p)?;
    let basis = CircuitBasis::new(p, space)?;
    let ej = p.josephson();
    let extra = if ej == T::zero() {
        None
    } else {
        Some(hermitian_function(&basis.phi, |x| x.cos())?.scale_real(-ej))
    };
    basis.assemble(p.e_c, p.e_l, extra)
}

/// `H1 = E_c n^2 + [2E_L + E_J(f_s)]/2 phi^2 - E_J(f_s) phi^4 / 24`.
///
/// The full quartic term is kept; normal ordering and the mean-field step
/// only enter through [`reduced_params`].
pub fn quartic_hamiltonian<T: Real>(p: &CircuitParams<T>, space: FockSpace) -> Result<Operator<T>> {
    require_stable(p)?;
    let basis = CircuitBasis::new(p, space)?;
    let ej = p.josephson();
    let quad = (T::lit(2.0) * p.e_l + ej) / T::lit(2.0);
    let extra = if ej == T::zero() {
        None
    } else {
        Some(basis.phi2.mul(&basis.phi2)?.scale_real(-ej / T::lit(24.0)))
    };
    basis.assemble(p.e_c, quad, extra)
}

/// Which circuit Hamiltonian to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianKind {
    Harmonic,
    Full,
    Quartic,
}

impl HamiltonianKind {
    pub fn build<T: Real>(self, p: &CircuitParams<T>, space: FockSpace) -> Result<Operator<T>> {
        match self {
            HamiltonianKind::Harmonic => harmonic_hamiltonian(p, space),
            HamiltonianKind::Full => full_hamiltonian(p, space),
            HamiltonianKind::Quartic => quartic_hamiltonian(p, space),
        }
    }
}

/// Parameters of the reduced quadratic gate Hamiltonian
/// `w1 a^dagger a - eta1 (a^2 + a^dagger^2)` and of the `w0` oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams<T: Real> {
    pub omega0: T,
    pub omega1: T,
    pub eta1: T,
    pub beta: T,
}

/// Closed-form reduction of the quartic Hamiltonian with `N_a = 0`:
/// `beta = E_c / (2[2E_L + E_J(f_s)])`, `eta1 = beta E_J(f_s) / 4`,
/// `w1 = sqrt(2 E_c [2E_L + E_J(f_s)]) - eta1`.
pub fn reduced_params<T: Real>(p: &CircuitParams<T>) -> Result<ReducedParams<T>> {
    let ej = p.josephson();
    let stiffness = T::lit(2.0) * p.e_l + ej;
    if !(stiffness > T::zero()) {
        return Err(Error::Unstable {
            margin: (stiffness / T::lit(2.0)).to_f64_lossy(),
        });
    }
    let beta = p.e_c / (T::lit(2.0) * stiffness);
    let eta1 = beta * ej / T::lit(4.0);
    let omega1 = (T::lit(2.0) * p.e_c * stiffness).sqrt() - eta1;
    Ok(ReducedParams {
        omega0: p.omega0(),
        omega1,
        eta1,
        beta,
    })
}

/// Lowest levels of a circuit Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Real> {
    pub levels: Vec<(usize, T)>,
    pub e01: T,
    pub e12: T,
}

impl<T: Real> Spectrum<T> {
    pub fn energies(&self) -> Vec<T> {
        self.levels.iter().map(|&(_, e)| e).collect()
    }
}

/// Lowest `k` eigenvalues of `h` (`3 <= k <= dim`).
pub fn spectrum<T: Real>(h: &Operator<T>, k: usize) -> Result<Spectrum<T>> {
    if k > h.dim() {
        return Err(Error::TooManyLevels {
            requested: k,
            dim: h.dim(),
        });
    }
    if k < 3 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("need at least 3 levels for E01 and E12, got {k}"),
        });
    }
    let eig = hermitian_eig(h)?;
    let levels: Vec<(usize, T)> = eig.values.iter().copied().take(k).enumerate().collect();
    let e = |i: usize| levels[i].1;
    Ok(Spectrum {
        e01: e(1) - e(0),
        e12: e(2) - e(1),
        levels,
    })
}

/// `alpha = (E12 - E01) / E01`.
pub fn anharmonicity<T: Real>(s: &Spectrum<T>) -> Result<T> {
    if !(s.e01 > T::zero()) {
        return Err(Error::DegenerateSpectrum {
            e01: s.e01.to_f64_lossy(),
        });
    }
    Ok((s.e12 - s.e01) / s.e01)
}

/// Doubling schedule for the Fock truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePolicy {
    pub start: FockSpace,
    /// Largest allowed change of `E0, E1, E2` between successive dims, GHz.
    pub tolerance: f64,
    pub max_dim: usize,
}

impl Default for ConvergencePolicy {
    fn default() -> Self {
        Self {
            start: FockSpace::default(),
            tolerance: CONVERGENCE_TOL,
            max_dim: 4 * crate::operators::DEFAULT_DIM,
        }
    }
}

/// A spectrum together with the truncation it converged at.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergedSpectrum<T: Real> {
    pub spectrum: Spectrum<T>,
    pub dim: usize,
    /// Largest change of the lowest three levels on the final doubling.
    pub change: T,
}

fn lowest_three_change<T: Real>(a: &Spectrum<T>, b: &Spectrum<T>) -> T {
    a.levels
        .iter()
        .zip(&b.levels)
        .take(3)
        .fold(T::zero(), |acc, (x, y)| acc.max((x.1 - y.1).abs()))
}

/// Doubles the Fock dimension until the lowest three levels move by less than
/// the policy tolerance; returns the spectrum at the finer truncation.
pub fn converged_spectrum<T: Real>(
    kind: HamiltonianKind,
    p: &CircuitParams<T>,
    k: usize,
    policy: &ConvergencePolicy,
) -> Result<ConvergedSpectrum<T>> {
    if policy.max_dim < 2 * policy.start.dim() {
        return Err(Error::InvalidParameter {
            name: "max_dim",
            reason: format!(
                "must allow at least one doubling of dim {}, got {}",
                policy.start.dim(),
                policy.max_dim
            ),
        });
    }
    let mut space = policy.start;
    let mut coarse = spectrum(&kind.build(p, space)?, k)?;
    let mut change = T::zero();
    while 2 * space.dim() <= policy.max_dim {
        let fine_space = space.doubled();
        let fine = spectrum(&kind.build(p, fine_space)?, k)?;
        change = lowest_three_change(&coarse, &fine);
        if change < T::lit(policy.tolerance) {
            return Ok(ConvergedSpectrum {
                spectrum: fine,
                dim: fine_space.dim(),
                change,
            });
        }
        space = fine_space;
        coarse = fine;
    }
    Err(Error::NotConverged {
        from: space.dim() / 2,
        to: space.dim(),
        change: change.to_f64_lossy(),
        tolerance: policy.tolerance,
    })
}

/// Largest change of `E0, E1, E2` when the truncation is doubled once.
pub fn doubling_change<T: Real>(
    kind: HamiltonianKind,
    p: &CircuitParams<T>,
    space: FockSpace,
) -> Result<T> {
    let a = spectrum(&kind.build(p, space)?, 3)?;
    let b = spectrum(&kind.build(p, space.doubled())?, 3)?;
    Ok(lowest_three_change(&a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::max_abs;
    use approx::assert_relative_eq;

    fn fock(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(CircuitParams::new(0.12, 58.0, 58.6, 0.9).is_ok());
        assert!(CircuitParams::new(0.0, 58.0, 58.6, 0.9).is_err());
        assert!(CircuitParams::new(0.12, -1.0, 58.6, 0.9).is_err());
        assert!(CircuitParams::new(0.12, 58.0, f64::INFINITY, 0.9).is_err());
        assert!(CircuitParams::new(0.12, 58.0, 58.6, f64::NAN).is_err());
    }

    #[test]
    fn effective_josephson_values() {
        assert_eq!(effective_josephson(58.0, 0.5), 0.0);
        assert_eq!(effective_josephson(58.0, 0.0), 116.0);
        assert_eq!(effective_josephson(58.0, 1.0), -116.0);
        assert_eq!(effective_josephson(58.0, -1.5), 0.0);
        // 116 cos(0.9 pi), cos(0.9 pi) = -0.95105651629515...
        assert_relative_eq!(
            effective_josephson(58.0, 0.9),
            -110.32255589023766,
            max_relative = 1e-14
        );
    }

    #[test]
    fn stability_cases() {
        let p = CircuitParams::new(0.12, 58.0, 58.6, 0.5).unwrap();
        let s = stability(&p);
        assert!(s.stable);
        assert_eq!(s.margin, 58.6);
        let edge = CircuitParams::new(0.12, 58.0, 58.0, 1.0).unwrap();
        assert_eq!(
            stability(&edge),
            Stability {
                stable: true,
                margin: 0.0
            }
        );
        let bad = CircuitParams::new(0.12, 58.0, 0.9 * 58.0, 1.0).unwrap();
        assert!(!stability(&bad).stable);
        assert!(matches!(
            full_hamiltonian(&bad, fock(10)),
            Err(Error::Unstable { .. })
        ));
        assert!(matches!(
            quartic_hamiltonian(&bad, fock(10)),
            Err(Error::Unstable { .. })
        ));
        assert!(matches!(reduced_params(&bad), Err(Error::Unstable { .. })));
        // the boundary itself has no quadratic stiffness left
        assert!(reduced_params(&edge).is_err());
    }

    #[test]
    fn reduced_params_at_half_flux() {
        let r = reduced_params(&CircuitParams::reference(0.5)).unwrap();
        assert_eq!(r.eta1, 0.0);
        let w0 = 2.0 * (0.12f64 * 58.6).sqrt();
        assert_relative_eq!(r.omega1, w0, max_relative = 1e-15);
        assert_relative_eq!(r.omega0, 5.303583694069511, max_relative = 1e-15);
        assert_relative_eq!(r.beta, 0.12 / (4.0 * 58.6), max_relative = 1e-15);
    }

    #[test]
    fn reduced_params_at_operating_flux() {
        // independent scalar evaluation
        let ej = 116.0 * (0.9 * std::f64::consts::PI).cos();
        let stiff = 117.2 + ej;
        let beta = 0.12 / (2.0 * stiff);
        let eta1 = 0.25 * beta * ej;
        let r = reduced_params(&CircuitParams::reference(0.9)).unwrap();
        assert_relative_eq!(r.beta, beta, max_relative = 1e-13);
        assert_relative_eq!(r.eta1, eta1, max_relative = 1e-13);
        assert_relative_eq!(
            r.omega1 + r.eta1,
            (0.24 * stiff).sqrt(),
            max_relative = 1e-13
        );
        assert!((stiff - 6.87).abs() < 0.01);
        assert!((r.beta - 0.00873).abs() < 1e-5);
        assert!((r.eta1 + 0.2408).abs() < 1e-3);
        assert!((r.omega1 - 1.525).abs() < 1e-3);
    }

    #[test]
    fn reduced_params_near_stability_edge() {
        let p = CircuitParams::new(0.12, 58.0, 1.005 * 58.0, 1.0).unwrap();
        let r = reduced_params(&p).unwrap();
        assert!((r.eta1 + 3.0).abs() < 0.01, "eta1 = {}", r.eta1);
    }

    #[test]
    fn half_flux_collapse_is_bitwise() {
        let p = CircuitParams::reference(0.5);
        let s = fock(30);
        let h0 = harmonic_hamiltonian(&p, s).unwrap();
        assert_eq!(full_hamiltonian(&p, s).unwrap(), h0);
        assert_eq!(quartic_hamiltonian(&p, s).unwrap(), h0);
    }

    #[test]
    fn harmonic_spectrum_is_uniform() {
        let p = CircuitParams::reference(0.5);
        let h = harmonic_hamiltonian(&p, fock(60)).unwrap();
        let s = spectrum(&h, 3).unwrap();
        let w0 = p.omega0();
        assert_relative_eq!(s.e01, w0, max_relative = 1e-10);
        assert_relative_eq!(s.e12, w0, max_relative = 1e-10);
        assert_relative_eq!(s.levels[0].1, w0 / 2.0, max_relative = 1e-10);
        assert!(anharmonicity(&s).unwrap().abs() < 1e-9);
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        let p = CircuitParams::reference(0.9);
        for kind in [
            HamiltonianKind::Full,
            HamiltonianKind::Quartic,
            HamiltonianKind::Harmonic,
        ] {
            let h = kind.build(&p, fock(40)).unwrap();
            assert!(h.hermiticity_residual() < 1e-10 * max_abs(h.matrix()));
        }
    }

    #[test]
    fn spectrum_errors() {
        let h = harmonic_hamiltonian(&CircuitParams::reference(0.5), fock(4)).unwrap();
        assert!(matches!(
            spectrum(&h, 5),
            Err(Error::TooManyLevels {
                requested: 5,
                dim: 4
            })
        ));
        assert!(spectrum(&h, 2).is_err());
        let flat = Spectrum {
            levels: vec![(0, 1.0), (1, 1.0), (2, 2.0)],
            e01: 0.0,
            e12: 1.0,
        };
        assert!(matches!(
            anharmonicity(&flat),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn operating_point_spectrum() {
        let p = CircuitParams::reference(0.9);
        let policy = ConvergencePolicy::default();
        let full = converged_spectrum(HamiltonianKind::Full, &p, 3, &policy).unwrap();
        let quart = converged_spectrum(HamiltonianKind::Quartic, &p, 3, &policy).unwrap();
        assert_eq!(full.dim, 120);
        assert!(full.change < 1e-6);
        let (ef, eq) = (full.spectrum.e01, quart.spectrum.e01);
        assert!((ef - eq).abs() / ef < 0.05);
        let r = reduced_params(&p).unwrap();
        assert!((eq - r.omega1).abs() / eq < 0.05);
        // the quartic term stiffens the potential here: level spacing grows
        assert!(anharmonicity(&quart.spectrum).unwrap() > 0.0);
        assert!(anharmonicity(&full.spectrum).unwrap() > 0.0);
    }

    #[test]
    fn convergence_protocol_reports_failure() {
        let p = CircuitParams::reference(0.9);
        let policy = ConvergencePolicy {
            start: fock(4),
            tolerance: 1e-6,
            max_dim: 8,
        };
        assert!(matches!(
            converged_spectrum(HamiltonianKind::Full, &p, 3, &policy),
            Err(Error::NotConverged { from: 4, to: 8, .. })
        ));
        assert!(doubling_change(HamiltonianKind::Full, &p, fock(4)).unwrap() > 1e-6);
    }
}
