// SPDX-License-Identifier: Apache-2.0

//! NV pseudo-spin, loop field, bare coupling and its squeezing amplification.
//!
//! Energies are GHz (`E/h`), times ns, lengths m, inductances H. The bare
//! coupling is reported in GHz like every other energy; quoting it as
//! "2 pi x f" is a presentation choice only.

use nalgebra::{DMatrix, DVector};

use crate::circuit::{reduced_params, CircuitParams};
use crate::error::{Error, Result};
use crate::operators::{
    annihilation, interior_block, kron_identity_spin, kron_spin_identity, number, pauli_x, pauli_z,
    unitarity_residual, FockSpace, Operator, Space,
};
use crate::scalar::{cr, max_abs, CMatrix, Real};

/// Physical constants (SI, CODATA 2018).
pub mod constants {
    /// Planck constant, J s.
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Elementary charge, C.
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Flux quantum `h / 2e`, Wb.
    pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
    /// Bohr magneton, J/T.
    pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
    /// Electron g-factor (magnitude).
    pub const G_ELECTRON: f64 = 2.002_319_304_362_56;
    /// Vacuum permeability, H/m.
    pub const MU0: f64 = 1.256_637_062_12e-6;
    /// NV zero-field splitting, GHz.
    pub const NV_ZERO_FIELD_SPLITTING: f64 = 2.87;
}

use constants::*;

/// Normalized flux at which the coupling is active.
pub const WORKING_FLUX: f64 = 0.5;

/// Default loop edge length, m. An assumed value: the loop size is not fixed
/// by the circuit parameters and only enters through the far-edge terms.
pub const DEFAULT_EDGE_LENGTH: f64 = 10e-6;

/// Default NV distance from the loop edge, m.
pub const DEFAULT_Z_NV: f64 = 0.01e-6;

/// Accepted relative mismatch between a given `L` and the one implied by `E_L`.
pub const INDUCTANCE_CONSISTENCY_TOL: f64 = 5e-3;

/// `L = Phi0^2 / (8 pi^2 E_L)` with `E_L` in GHz (energy `h E_L 1e9`).
pub fn inductance_from_e_l<T: Real>(e_l_ghz: T) -> T {
    let phi0 = T::lit(FLUX_QUANTUM);
    let energy = T::lit(PLANCK * 1e9) * e_l_ghz;
    phi0 * phi0 / (T::lit(8.0) * T::pi() * T::pi() * energy)
}

/// `E_L = Phi0^2 / (8 pi^2 L)` in GHz.
pub fn e_l_from_inductance<T: Real>(inductance: T) -> T {
    let phi0 = T::lit(FLUX_QUANTUM);
    phi0 * phi0 / (T::lit(8.0) * T::pi() * T::pi() * inductance) / T::lit(PLANCK * 1e9)
}

/// NV pseudo-spin built from the `m_s = 0, -1` sublevels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NVParams<T: Real> {
    /// Zero-field splitting, GHz.
    pub d: T,
    /// `g_e mu_B B_z`, GHz.
    pub zeeman: T,
}

impl<T: Real> NVParams<T> {
    pub fn new(zeeman: T) -> Self {
        Self {
            d: T::lit(NV_ZERO_FIELD_SPLITTING),
            zeeman,
        }
    }

    pub fn omega_nv(&self) -> T {
        nv_frequency(self)
    }
}

/// `w_NV = D - g_e mu_B B_z`.
pub fn nv_frequency<T: Real>(nv: &NVParams<T>) -> T {
    nv.d - nv.zeeman
}

/// Square loop of edge `l` with the NV at distance `z_nv` from one edge on the midline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingGeometry<T: Real> {
    pub l: T,
    pub z_nv: T,
    pub inductance: T,
}

impl<T: Real> CouplingGeometry<T> {
    pub fn new(l: T, z_nv: T, inductance: T) -> Result<Self> {
        if !(l > T::zero()) || !l.is_finite() {
            return Err(Error::Geometry(format!(
                "edge length must be positive, got {l}"
            )));
        }
        if !(z_nv > T::zero() && z_nv < l) {
            return Err(Error::Geometry(format!(
                "NV position {z_nv} m must lie strictly inside (0, {l}) m"
            )));
        }
        if !(inductance > T::zero()) || !inductance.is_finite() {
            return Err(Error::Geometry(format!(
                "loop inductance must be positive, got {inductance}"
            )));
        }
        Ok(Self {
            l,
            z_nv,
            inductance,
        })
    }

    /// Geometry whose inductance is the one implied by `e_l` (GHz).
    pub fn with_e_l(l: T, z_nv: T, e_l: T) -> Result<Self> {
        Self::new(l, z_nv, inductance_from_e_l(e_l))
    }

    /// Relative mismatch between `inductance` and the value implied by `e_l`.
    pub fn inductance_mismatch(&self, e_l: T) -> T {
        (self.inductance / inductance_from_e_l(e_l) - T::one()).abs()
    }
}

/// Field per unit loop current at the NV, T/A.
pub fn biot_savart_b0<T: Real>(geom: &CouplingGeometry<T>) -> Result<T> {
    let (l, z) = (geom.l, geom.z_nv);
    if !(z > T::zero() && z < l) {
        return Err(Error::Geometry(format!(
            "NV position {z} m must lie strictly inside (0, {l}) m"
        )));
    }
    let two = T::lit(2.0);
    let half_l = l / two;
    let w = l - z;
    let near = (l * l + two * z * z) / (l * z * (half_l * half_l + z * z).sqrt());
    let far = (T::lit(3.0) * l * l - T::lit(4.0) * l * z + two * z * z)
        / (l * w * (w * w + half_l * half_l).sqrt());
    Ok(T::lit(MU0) / (T::lit(4.0) * T::pi()) * (near + far))
}

/// Bare coupling computed along two unit chains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareCoupling<T: Real> {
    /// T/A.
    pub b0: T,
    /// `beta` at the working flux.
    pub beta: T,
    /// Interaction energy, J.
    pub energy_joule: T,
    /// `E / h` from the SI chain, Hz.
    pub g_hz_si: T,
    /// Same quantity from the GHz chain (via `E_L` implied by `L`), GHz.
    pub g_ghz: T,
}

impl<T: Real> BareCoupling<T> {
    /// Relative disagreement of the two unit chains.
    pub fn chain_mismatch(&self) -> T {
        (self.g_hz_si / (self.g_ghz * T::lit(1e9)) - T::one()).abs()
    }

    /// Angular frequency `E / hbar`, rad/s.
    pub fn angular(&self) -> T {
        T::lit(2.0) * T::pi() * self.g_hz_si
    }
}

/// `g = g_e mu_B Phi0 B0 beta^(1/4) / (2 sqrt(2) pi L)` at the working flux.
///
/// `beta` is always evaluated at `f_s = 0.5`, independent of `p.f_s`. The
/// geometry's inductance has to match `p.e_l` within
/// [`INDUCTANCE_CONSISTENCY_TOL`].
pub fn bare_coupling<T: Real>(
    p: &CircuitParams<T>,
    geom: &CouplingGeometry<T>,
) -> Result<BareCoupling<T>> {
    let mismatch = geom.inductance_mismatch(p.e_l);
    if mismatch > T::lit(INDUCTANCE_CONSISTENCY_TOL) {
        return Err(Error::InvalidParameter {
            name: "inductance",
            reason: format!(
                "{} H implies E_L = {} GHz, inconsistent with E_L = {} GHz",
                geom.inductance,
                e_l_from_inductance(geom.inductance),
                p.e_l
            ),
        });
    }
    let b0 = biot_savart_b0(geom)?;
    let beta = reduced_params(&p.with_flux(T::lit(WORKING_FLUX)))?.beta;
    let beta_q = beta.sqrt().sqrt();
    let (ge, mub, phi0) = (
        T::lit(G_ELECTRON),
        T::lit(BOHR_MAGNETON),
        T::lit(FLUX_QUANTUM),
    );
    let two_sqrt2_pi = T::lit(2.0) * T::lit(2.0).sqrt() * T::pi();

    let energy = ge * mub * phi0 * b0 * beta_q / (two_sqrt2_pi * geom.inductance);
    let g_hz_si = energy / T::lit(PLANCK);

    // Phi0 / L = 8 pi^2 h E_L / Phi0, and mu_B B0 / Phi0 is dimensionless
    let e_l_implied = e_l_from_inductance(geom.inductance);
    let g_ghz = two_sqrt2_pi * ge * mub * b0 * beta_q * e_l_implied / phi0;

    Ok(BareCoupling {
        b0,
        beta,
        energy_joule: energy,
        g_hz_si,
        g_ghz,
    })
}

/// `H_tot = w0 a^dagger a + w_NV tau_z / 2 + g (a + a^dagger) tau_x`
/// on oscillator (x) spin, spin as the fast index.
pub fn total_hamiltonian<T: Real>(
    p: &CircuitParams<T>,
    nv: &NVParams<T>,
    g: T,
    space: FockSpace,
) -> Result<Operator<T>> {
    let n = number::<T>(space);
    let a = annihilation::<T>(space);
    let x = a.matrix() + a.matrix().adjoint();
    let h = kron_spin_identity(n.matrix()) * cr(p.omega0())
        + kron_identity_spin(space.dim(), &pauli_z::<T>()) * cr(nv.omega_nv() / T::lit(2.0))
        + x.kronecker(&pauli_x::<T>()) * cr(g);
    Operator::new(h, Space::FockSpin(space))
}

/// Closed-form parameters of `S H_tot S^dagger`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams<T: Real> {
    pub omega_eff: T,
    pub chi: T,
    pub g_eff: T,
    pub eta2: T,
}

impl<T: Real> EffectiveParams<T> {
    pub fn gain(&self, g: T) -> T {
        self.g_eff / g
    }
}

/// `w_eff = w0 cosh(4 eta2)`, `chi = w0 sinh(4 eta2) / 2`, `g_eff = g exp(2 eta2)`.
pub fn effective_params<T: Real>(p: &CircuitParams<T>, g: T, eta2: T) -> EffectiveParams<T> {
    let w0 = p.omega0();
    let x = T::lit(4.0) * eta2;
    EffectiveParams {
        omega_eff: w0 * x.cosh(),
        chi: w0 * x.sinh() / T::lit(2.0),
        g_eff: g * (T::lit(2.0) * eta2).exp(),
        eta2,
    }
}

/// Unitarity tolerance for the conjugating operator.
pub const CONJUGATION_UNITARITY_TOL: f64 = 1e-8;

/// `S H S^dagger`. An oscillator-only `S` is lifted to `S (x) I_2` when `H`
/// lives on oscillator (x) spin.
pub fn conjugate_hamiltonian<T: Real>(s: &CMatrix<T>, h: &Operator<T>) -> Result<Operator<T>> {
    let lifted;
    let s_full = if s.nrows() * 2 == h.dim() && matches!(h.space(), Space::FockSpin(_)) {
        lifted = kron_spin_identity(s);
        &lifted
    } else {
        s
    };
    if s_full.shape() != (h.dim(), h.dim()) {
        return Err(Error::ShapeMismatch {
            expected: (h.dim(), h.dim()),
            found: s_full.shape(),
        });
    }
    let residual = unitarity_residual(s_full);
    if residual > T::lit(CONJUGATION_UNITARITY_TOL) {
        return Err(Error::TruncationLeak {
            residual: residual.to_f64_lossy(),
            tolerance: CONJUGATION_UNITARITY_TOL,
        });
    }
    let scale = max_abs(h.matrix()).max(T::one());
    let herm = h.hermiticity_residual();
    if herm > T::lit(1e-10) * scale {
        return Err(Error::NotHermitian {
            residual: herm.to_f64_lossy(),
            tolerance: 1e-10 * scale.to_f64_lossy(),
        });
    }
    let out = s_full * h.matrix() * s_full.adjoint();
    Operator::hermitian(out, h.space(), T::lit(1e-8) * scale)
}

/// Coefficients of a hybrid Hamiltonian in the operator basis
/// `{a^dagger a, tau_z / 2, a^2 + a^dagger^2, (a + a^dagger) tau_x, I}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedCoefficients<T: Real> {
    pub omega: T,
    pub omega_nv: T,
    pub chi: T,
    pub g: T,
    pub offset: T,
    /// Largest entry of the part of the block outside the span.
    pub residual: T,
}

/// Least-squares projection of the interior block (lowest `levels` oscillator
/// levels) of a hybrid operator onto the effective-Hamiltonian basis.
pub fn project_effective<T: Real>(
    h: &Operator<T>,
    levels: usize,
) -> Result<ProjectedCoefficients<T>> {
    let fock = match h.space() {
        Space::FockSpin(f) => f,
        _ => {
            return Err(Error::InvalidParameter {
                name: "space",
                reason: "projection needs an oscillator (x) spin operator".into(),
            })
        }
    };
    if levels < 3 || levels > fock.dim() {
        return Err(Error::InvalidParameter {
            name: "levels",
            reason: format!("need 3 <= levels <= {}, got {levels}", fock.dim()),
        });
    }
    let space = h.space();
    let n = number::<T>(fock);
    let a = annihilation::<T>(fock);
    let a2 = a.matrix() * a.matrix();
    let basis: Vec<CMatrix<T>> = [
        kron_spin_identity(n.matrix()),
        kron_identity_spin(fock.dim(), &pauli_z::<T>()) * cr(T::lit(0.5)),
        kron_spin_identity(&(&a2 + a2.adjoint())),
        (a.matrix() + a.matrix().adjoint()).kronecker(&pauli_x::<T>()),
        CMatrix::identity(space.dim(), space.dim()),
    ]
    .iter()
    .map(|b| interior_block(b, space, levels))
    .collect();
    let target = interior_block(h.matrix(), space, levels);

    let inner = |x: &CMatrix<T>, y: &CMatrix<T>| -> T {
        x.iter()
            .zip(y.iter())
            .fold(T::zero(), |acc, (u, v)| acc + (u.conj() * v).re)
    };
    let k = basis.len();
    let gram = DMatrix::<T>::from_fn(k, k, |i, j| inner(&basis[i], &basis[j]));
    let rhs = DVector::<T>::from_fn(k, |i, _| inner(&basis[i], &target));
    let coef = gram
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter {
            name: "levels",
            reason: "projection basis is degenerate on the chosen block".into(),
        })?
        .solve(&rhs);
    let fitted = basis.iter().zip(coef.iter()).fold(
        CMatrix::<T>::zeros(target.nrows(), target.ncols()),
        |acc, (b, &c)| acc + b * cr(c),
    );
    Ok(ProjectedCoefficients {
        omega: coef[0],
        omega_nv: coef[1],
        chi: coef[2],
        g: coef[3],
        offset: coef[4],
        residual: max_abs(&(target - fitted)),
    })
}

/// How the phase `eta2 = -eta1 t` is formed from GHz and ns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PhaseConvention {
    /// The plain product GHz x ns.
    #[default]
    Direct,
    /// An extra factor `2 pi` (energies read as cycle frequencies).
    TwoPi,
}

impl PhaseConvention {
    pub fn factor<T: Real>(self) -> T {
        match self {
            PhaseConvention::Direct => T::one(),
            PhaseConvention::TwoPi => T::two_pi(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PhaseConvention::Direct => "direct",
            PhaseConvention::TwoPi => "two-pi",
        }
    }
}

/// Inputs of the amplification sweep. `E_L = ratio * E_J` for each ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings<T: Real> {
    pub e_c: T,
    pub e_j: T,
    pub ratios: Vec<T>,
    /// Evolution time of the squeezing propagator, ns.
    pub t: T,
    pub flux: Vec<T>,
    pub l: T,
    pub z_nv: T,
    pub convention: PhaseConvention,
}

impl Default for SweepSettings<f64> {
    fn default() -> Self {
        Self {
            e_c: 0.12,
            e_j: 58.0,
            ratios: vec![1.005, 1.01, 1.02, 1.05],
            t: 1.0,
            flux: (0..=50).map(|i| 0.5 + 0.01 * i as f64).collect(),
            l: DEFAULT_EDGE_LENGTH,
            z_nv: DEFAULT_Z_NV,
            convention: PhaseConvention::Direct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepPoint<T: Real> {
    Stable {
        eta1: T,
        eta2: T,
        gain: T,
        g_eff: T,
    },
    /// `E_L + E_J(f_s)/2` is not positive.
    Unstable {
        margin: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T: Real> {
    pub ratio: T,
    pub f_s: T,
    /// Bare coupling for this ratio, GHz.
    pub g: T,
    pub point: SweepPoint<T>,
}

/// Bare coupling of the circuit with `E_L = ratio * E_J`.
pub fn ratio_coupling<T: Real>(s: &SweepSettings<T>, ratio: T) -> Result<T> {
    let e_l = ratio * s.e_j;
    let p = CircuitParams::new(s.e_c, s.e_j, e_l, T::lit(WORKING_FLUX))?;
    let geom = CouplingGeometry::with_e_l(s.l, s.z_nv, e_l)?;
    Ok(bare_coupling(&p, &geom)?.g_ghz)
}

/// One row of the sweep; `g` is the bare coupling for `ratio`.
pub fn amplification_row<T: Real>(
    s: &SweepSettings<T>,
    ratio: T,
    f_s: T,
    g: T,
) -> Result<SweepRow<T>> {
    let p = CircuitParams::new(s.e_c, s.e_j, ratio * s.e_j, f_s)?;
    let point = match reduced_params(&p) {
        Ok(r) => {
            let eta2 = -r.eta1 * s.t * s.convention.factor::<T>();
            let eff = effective_params(&p, g, eta2);
            SweepPoint::Stable {
                eta1: r.eta1,
                eta2,
                gain: eff.gain(g),
                g_eff: eff.g_eff,
            }
        }
        Err(Error::Unstable { .. }) => SweepPoint::Unstable {
            margin: p.stability().margin,
        },
        Err(e) => return Err(e),
    };
    Ok(SweepRow {
        ratio,
        f_s,
        g,
        point,
    })
}

/// Rows in `(ratio, f_s)` order.
pub fn amplification_sweep<T: Real>(s: &SweepSettings<T>) -> Result<Vec<SweepRow<T>>> {
    let mut rows = Vec::with_capacity(s.ratios.len() * s.flux.len());
    for &ratio in &s.ratios {
        let g = ratio_coupling(s, ratio)?;
        for &f in &s.flux {
            rows.push(amplification_row(s, ratio, f, g)?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{squeeze_target, Rep};
    use approx::assert_relative_eq;

    fn geom() -> CouplingGeometry<f64> {
        CouplingGeometry::new(DEFAULT_EDGE_LENGTH, DEFAULT_Z_NV, 1.4e-9).unwrap()
    }

    #[test]
    fn nv_frequency_cases() {
        assert_eq!(nv_frequency(&NVParams::new(2.87)), 0.0);
        assert_eq!(nv_frequency(&NVParams::new(0.0)), 2.87);
        assert_relative_eq!(nv_frequency(&NVParams::new(1.37)), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn inductance_round_trip() {
        let l: f64 = inductance_from_e_l(58.6);
        assert!((l - 1.4e-9).abs() / 1.4e-9 < 5e-3);
        assert_relative_eq!(e_l_from_inductance(l), 58.6, max_relative = 1e-14);
        assert!(geom().inductance_mismatch(58.6) < INDUCTANCE_CONSISTENCY_TOL);
    }

    #[test]
    fn geometry_validation() {
        assert!(CouplingGeometry::new(1e-5, 0.0, 1e-9).is_err());
        assert!(CouplingGeometry::new(1e-5, 1e-5, 1e-9).is_err());
        assert!(CouplingGeometry::new(1e-5, 2e-5, 1e-9).is_err());
        assert!(CouplingGeometry::new(1e-5, 1e-6, 0.0).is_err());
        assert!(CouplingGeometry::new(-1e-5, 1e-6, 1e-9).is_err());
    }

    #[test]
    fn b0_midpoint_closed_form() {
        let l = 10e-6;
        let g = CouplingGeometry::new(l, l / 2.0, 1.4e-9).unwrap();
        let want = MU0 / (4.0 * std::f64::consts::PI) * 6.0 * 2f64.sqrt() / l;
        assert_relative_eq!(biot_savart_b0(&g).unwrap(), want, max_relative = 1e-14);
    }

    #[test]
    fn b0_near_wire_asymptote() {
        let b = biot_savart_b0(&geom()).unwrap();
        let asym = MU0 / (2.0 * std::f64::consts::PI * DEFAULT_Z_NV);
        assert!((b / asym - 1.0).abs() < 0.02);
        assert!((b - 20.0).abs() / 20.0 < 0.02);
    }

    #[test]
    fn b0_symmetry_grid() {
        // dyadic grid so that l - (l - z) == z exactly
        let l = 2f64.powi(-17);
        for i in 1..=1000 {
            let z = l * i as f64 / 1024.0;
            assert_eq!(l - (l - z), z);
            let a = biot_savart_b0(&CouplingGeometry::new(l, z, 1e-9).unwrap()).unwrap();
            let b = biot_savart_b0(&CouplingGeometry::new(l, l - z, 1e-9).unwrap()).unwrap();
            assert!(
                (a - b).abs() <= 8.0 * f64::EPSILON * a,
                "z = {z}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn bare_coupling_magnitude_and_chains() {
        let p = CircuitParams::reference(0.5);
        let c = bare_coupling(&p, &geom()).unwrap();
        assert_relative_eq!(c.beta, 0.12 / 234.4, max_relative = 1e-14);
        assert!((c.beta.powf(0.25) - 0.1504).abs() < 1e-4);
        assert!(
            c.g_hz_si > 10e3 / 3.0 && c.g_hz_si < 30e3,
            "g = {} Hz",
            c.g_hz_si
        );
        assert!(c.chain_mismatch() < 1e-10);
        // beta is taken at the working flux whatever the circuit flux
        let c9 = bare_coupling(&p.with_flux(0.9), &geom()).unwrap();
        assert_eq!(c9.g_ghz, c.g_ghz);
    }

    #[test]
    fn bare_coupling_scales_inversely_with_inductance() {
        let p = CircuitParams::reference(0.5);
        let c1 = bare_coupling(&p, &geom()).unwrap();
        // doubling L at fixed E_L breaks consistency; compare against the formula directly
        let p2 = CircuitParams {
            e_l: e_l_from_inductance(2.8e-9),
            ..p
        };
        let g2 = CouplingGeometry::new(DEFAULT_EDGE_LENGTH, DEFAULT_Z_NV, 2.8e-9).unwrap();
        let c2 = bare_coupling(&p2, &g2).unwrap();
        let beta_ratio = (c2.beta / c1.beta).powf(0.25);
        assert_relative_eq!(
            c2.energy_joule / c1.energy_joule,
            0.5 * beta_ratio,
            max_relative = 1e-12
        );
    }

    #[test]
    fn bare_coupling_rejects_inconsistent_inductance() {
        let p = CircuitParams::reference(0.5);
        let g = CouplingGeometry::new(DEFAULT_EDGE_LENGTH, DEFAULT_Z_NV, 2.0e-9).unwrap();
        assert!(matches!(
            bare_coupling(&p, &g),
            Err(Error::InvalidParameter {
                name: "inductance",
                ..
            })
        ));
    }

    #[test]
    fn total_hamiltonian_decoupled_spectrum() {
        let p = CircuitParams::reference(0.5);
        let nv = NVParams::new(1.37);
        let f = FockSpace::new(8).unwrap();
        let h = total_hamiltonian(&p, &nv, 0.0, f).unwrap();
        assert!(h.hermiticity_residual() <= 1e-12);
        // spin is the fast index: row 2n + s
        let w0 = p.omega0();
        for n in 0..8 {
            assert_relative_eq!(
                h.matrix()[(2 * n, 2 * n)].re,
                n as f64 * w0 + 0.75,
                epsilon = 1e-12
            );
            assert_relative_eq!(
                h.matrix()[(2 * n + 1, 2 * n + 1)].re,
                n as f64 * w0 - 0.75,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn vacuum_rabi_splitting() {
        let p = CircuitParams::<f64>::reference(0.5);
        let w0 = p.omega0();
        let nv = NVParams { d: w0, zeeman: 0.0 };
        let g = 1e-3 * w0;
        let h = total_hamiltonian(&p, &nv, g, FockSpace::new(10).unwrap()).unwrap();
        let e = crate::operators::hermitian_eig(&h).unwrap().values;
        // ground ~ -w0/2, then the doublet around w0/2
        let split = e[2] - e[1];
        assert!(
            (split / (2.0 * g) - 1.0).abs() < 0.01,
            "split {split}, 2g {}",
            2.0 * g
        );
    }

    #[test]
    fn effective_params_identity_and_gain() {
        let p = CircuitParams::reference(0.5);
        let e0 = effective_params(&p, 1e-5, 0.0);
        assert_eq!(e0.omega_eff, p.omega0());
        assert_eq!(e0.chi, 0.0);
        assert_eq!(e0.g_eff, 1e-5);
        let e = effective_params(&p, 1e-5, 0.2408);
        assert_relative_eq!(e.gain(1e-5), 0.4816f64.exp(), max_relative = 1e-14);
        assert!((e.gain(1e-5) - 1.619).abs() < 1e-3);
        let big = effective_params(&p, 1e-5, 3.0);
        assert!((big.gain(1e-5) - 403.4).abs() < 0.1);
        for eta in [-3.0, -1.0, 0.0, 0.5, 3.0] {
            let e = effective_params(&p, 1.0, eta);
            let w0 = p.omega0();
            let lhs = e.omega_eff * e.omega_eff - 4.0 * e.chi * e.chi;
            assert!((lhs - w0 * w0).abs() <= 1e-10 * e.omega_eff * e.omega_eff);
        }
    }

    #[test]
    fn conjugation_identity_and_spectrum() {
        let p = CircuitParams::reference(0.5);
        let nv = NVParams::new(1.37);
        let f = FockSpace::new(20).unwrap();
        let h = total_hamiltonian(&p, &nv, 0.01, f).unwrap();
        let same = conjugate_hamiltonian(&crate::scalar::identity::<f64>(20), &h).unwrap();
        assert!(max_abs(&(same.matrix() - h.matrix())) < 1e-14);

        let bad = crate::scalar::identity::<f64>(20) * cr(1.1);
        assert!(matches!(
            conjugate_hamiltonian(&bad, &h),
            Err(Error::TruncationLeak { .. })
        ));
        assert!(conjugate_hamiltonian(&crate::scalar::identity::<f64>(7), &h).is_err());
    }

    #[test]
    fn conjugation_projection_matches_closed_forms() {
        let p = CircuitParams::<f64>::reference(0.5);
        let nv = NVParams::new(1.37);
        let f = FockSpace::new(80).unwrap();
        let g = 1.4e-5;
        let eta2 = 0.2;
        let h = total_hamiltonian(&p, &nv, g, f).unwrap();
        let s = squeeze_target(eta2, Rep::Fock(f)).unwrap();
        let heff = conjugate_hamiltonian(&s, &h).unwrap();
        let proj = project_effective(&heff, 10).unwrap();
        let want = effective_params(&p, g, eta2);
        assert!((proj.omega / want.omega_eff - 1.0).abs() < 1e-6);
        assert!((proj.chi / want.chi - 1.0).abs() < 1e-6);
        assert!((proj.g / want.g_eff - 1.0).abs() < 1e-6);
        assert!((proj.omega_nv / nv.omega_nv() - 1.0).abs() < 1e-6);
        assert!(proj.residual < 1e-8);
    }

    #[test]
    fn sweep_unit_gain_at_half_flux_and_monotone() {
        let s = SweepSettings::default();
        let rows = amplification_sweep(&s).unwrap();
        assert_eq!(rows.len(), s.ratios.len() * s.flux.len());
        for chunk in rows.chunks(s.flux.len()) {
            let SweepPoint::Stable { gain, .. } = chunk[0].point else {
                panic!()
            };
            assert_eq!(gain, 1.0);
            let gains: Vec<f64> = chunk
                .iter()
                .filter_map(|r| match r.point {
                    SweepPoint::Stable { gain, .. } => Some(gain),
                    _ => None,
                })
                .collect();
            for w in gains.windows(2) {
                assert!(w[1] > w[0]);
            }
        }
        let best = rows
            .iter()
            .filter(|r| r.ratio == 1.005 && r.f_s < 1.0)
            .filter_map(|r| match r.point {
                SweepPoint::Stable { gain, .. } => Some(gain),
                _ => None,
            })
            .fold(0.0, f64::max);
        assert!(best >= 100.0, "best gain {best}");
    }

    #[test]
    fn sweep_flags_unstable_points() {
        let s = SweepSettings {
            ratios: vec![0.9],
            flux: vec![0.5, 0.9, 1.0],
            ..SweepSettings::default()
        };
        let rows = amplification_sweep(&s).unwrap();
        assert!(matches!(rows[0].point, SweepPoint::Stable { .. }));
        assert!(matches!(rows[2].point, SweepPoint::Unstable { .. }));
    }

    #[test]
    fn two_pi_convention_scales_eta2() {
        let s = SweepSettings::default();
        let g = ratio_coupling(&s, 1.01).unwrap();
        let a = amplification_row(&s, 1.01, 0.9, g).unwrap();
        let s2 = SweepSettings {
            convention: PhaseConvention::TwoPi,
            ..s.clone()
        };
        let b = amplification_row(&s2, 1.01, 0.9, g).unwrap();
        match (a.point, b.point) {
            (SweepPoint::Stable { eta2: x, .. }, SweepPoint::Stable { eta2: y, .. }) => {
                assert_relative_eq!(y, x * 2.0 * std::f64::consts::PI, max_relative = 1e-14)
            }
            _ => panic!("expected stable rows"),
        }
    }
}
