// SPDX-License-Identifier: Apache-2.0

//! The two basic gates and the squeezing operator composed from them.
//!
//! `U0(t) = exp(-i w0 a^dagger a t)` is free evolution at the harmonic flux
//! point and `U1(t) = exp(-i [w1 a^dagger a - eta1 (a^2 + a^dagger^2)] t)` is
//! evolution at the operating flux. Interleaving `U0^dagger` and `U1` cancels
//! the number-operator parts and leaves the pure two-photon propagator
//! `Us(t) = exp(2i eta1 G1 t)`; conjugating `Us` with `U0` at a quarter-period
//! phase rotates `G1` into `G2` and yields `S = exp[eta2 (a^2 - a^dagger^2)]`
//! with `eta2 = -eta1 t`.
//!
//! Fock-representation gates use `a^dagger a`; the 2x2 representation uses
//! `G3 = a^dagger a + 1/2`. The two differ by a global phase, so distances are
//! only ever taken within one representation.

use crate::circuit::{reduced_params, CircuitParams, ReducedParams};
use crate::error::{Error, Result};
use crate::operators::{
    annihilation, check_leak, evolve_matrix, exp_2x2, exp_normal, number, su11_generators,
    su11_generators_2x2, FockSpace, SU11Generators, Space,
};
use crate::scalar::{ci, cr, identity, max_abs, CMatrix, Real, C};

/// Representation a gate is built in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rep {
    Fock(FockSpace),
    /// Two-dimensional non-unitary SU(1,1) representation.
    Compact,
}

impl Rep {
    pub fn space(self) -> Space {
        match self {
            Rep::Fock(f) => Space::Fock(f),
            Rep::Compact => Space::Compact,
        }
    }

    fn generators<T: Real>(self) -> SU11Generators<T> {
        match self {
            Rep::Fock(f) => su11_generators(f),
            Rep::Compact => su11_generators_2x2(),
        }
    }
}

/// Duration of each `U0^dagger` slice relative to the `U1` slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PrimeTime {
    /// `t' = w1 t / w0`: the `U0^dagger` phase cancels the `w1` rotation of `U1`.
    #[default]
    Cancelling,
    /// `t' = w0 t / w1` as the formula is usually quoted.
    Quoted,
}

/// Frequency used to solve for the conjugation time `t''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ConjugationFrequency {
    /// `w0 t'' = (4k+1) pi/4`, the frequency of the conjugating gate `U0`.
    #[default]
    Omega0,
    /// `w1 t'' = (4k+1) pi/4` as the formula is usually quoted.
    Omega1,
}

/// Evolution times of the squeezing construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSchedule<T: Real> {
    pub t: T,
    pub steps: usize,
    pub k: usize,
    pub t_prime: T,
    pub t_dprime: T,
}

impl<T: Real> GateSchedule<T> {
    pub fn new(
        r: &ReducedParams<T>,
        t: T,
        steps: usize,
        k: usize,
        prime: PrimeTime,
        conjugation: ConjugationFrequency,
    ) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter {
                name: "M",
                reason: "step count must be at least 1".into(),
            });
        }
        let t_prime = match prime {
            PrimeTime::Cancelling => r.omega1 * t / r.omega0,
            PrimeTime::Quoted => r.omega0 * t / r.omega1,
        };
        let phase = T::lit((4 * k + 1) as f64) * T::frac_pi_4();
        let t_dprime = match conjugation {
            ConjugationFrequency::Omega0 => phase / r.omega0,
            ConjugationFrequency::Omega1 => phase / r.omega1,
        };
        Ok(Self {
            t,
            steps,
            k,
            t_prime,
            t_dprime,
        })
    }
}

/// `exp(-i w G t)` for the diagonal generator: `a^dagger a` in Fock, `G3` in 2x2.
fn rotation<T: Real>(omega: T, t: T, rep: Rep) -> Result<CMatrix<T>> {
    match rep {
        Rep::Fock(f) => {
            let n = f.dim();
            let mut u = CMatrix::zeros(n, n);
            for k in 0..n {
                let phase = -omega * T::lit(k as f64) * t;
                u[(k, k)] = C::new(phase.cos(), phase.sin());
            }
            Ok(u)
        }
        Rep::Compact => {
            let g3 = su11_generators_2x2::<T>().gamma3;
            exp_2x2(&(g3.matrix() * ci(-omega * t)))
        }
    }
}

fn reduced<T: Real>(p: &CircuitParams<T>) -> Result<ReducedParams<T>> {
    let s = p.stability();
    if !s.stable {
        return Err(Error::Unstable {
            margin: s.margin.to_f64_lossy(),
        });
    }
    reduced_params(p)
}

/// `U0(t) = exp(-i w0 a^dagger a t)` (Fock) or `exp(-i w0 G3 t)` (2x2).
pub fn gate_u0<T: Real>(p: &CircuitParams<T>, t: T, rep: Rep) -> Result<CMatrix<T>> {
    let r = reduced(p)?;
    rotation(r.omega0, t, rep)
}

/// `U1(t) = exp(-i [w1 a^dagger a - eta1 (a^2 + a^dagger^2)] t)` (Fock) or
/// `exp(-i w1 G3 t + 2i eta1 G1 t)` (2x2, generally non-unitary).
pub fn gate_u1<T: Real>(p: &CircuitParams<T>, t: T, rep: Rep) -> Result<CMatrix<T>> {
    let r = reduced(p)?;
    u1_from_reduced(&r, t, rep)
}

fn u1_from_reduced<T: Real>(r: &ReducedParams<T>, t: T, rep: Rep) -> Result<CMatrix<T>> {
    match rep {
        Rep::Fock(f) => {
            let g1 = su11_generators::<T>(f).gamma1;
            let h = number::<T>(f).matrix() * cr(r.omega1) - g1.matrix() * cr(T::lit(2.0) * r.eta1);
            evolve_matrix(&h, t)
        }
        Rep::Compact => {
            let g = su11_generators_2x2::<T>();
            let gen = g.gamma3.matrix() * ci(-r.omega1 * t)
                + g.gamma1.matrix() * ci(T::lit(2.0) * r.eta1 * t);
            exp_2x2(&gen)
        }
    }
}

fn us_from_reduced<T: Real>(r: &ReducedParams<T>, t: T, rep: Rep) -> Result<CMatrix<T>> {
    let g1 = rep.generators::<T>().gamma1;
    let gen = g1.matrix() * ci(T::lit(2.0) * r.eta1 * t);
    let u = exp_normal(&gen)?;
    if let Rep::Fock(_) = rep {
        check_leak(&u, rep.space(), "two-photon propagator");
    }
    Ok(u)
}

/// `Us(t) = exp(2i eta1 G1 t)`; in 2x2 this is `cosh(2 eta1 t) + i G1 sinh(2 eta1 t)`.
pub fn analytic_us<T: Real>(p: &CircuitParams<T>, t: T, rep: Rep) -> Result<CMatrix<T>> {
    let r = reduced(p)?;
    us_from_reduced(&r, t, rep)
}

fn trotter_from_reduced<T: Real>(
    r: &ReducedParams<T>,
    t: T,
    t_prime: T,
    steps: usize,
    rep: Rep,
) -> Result<CMatrix<T>> {
    let m = T::lit(steps as f64);
    let u0_dag = rotation(r.omega0, t_prime / m, rep)?.adjoint();
    let u1 = u1_from_reduced(r, t / m, rep)?;
    let step = u0_dag * u1;
    let mut out = identity::<T>(rep.space().dim());
    for _ in 0..steps {
        out = &out * &step;
    }
    Ok(out)
}

/// `U's(t) = [U0^dagger(t'/M) U1(t/M)]^M` with `t'` from `prime`.
pub fn trotter_squeeze_with<T: Real>(
    p: &CircuitParams<T>,
    t: T,
    steps: usize,
    rep: Rep,
    prime: PrimeTime,
) -> Result<CMatrix<T>> {
    let r = reduced(p)?;
    let sched = GateSchedule::new(&r, t, steps, 0, prime, ConjugationFrequency::default())?;
    trotter_from_reduced(&r, t, sched.t_prime, steps, rep)
}

pub fn trotter_squeeze<T: Real>(
    p: &CircuitParams<T>,
    t: T,
    steps: usize,
    rep: Rep,
) -> Result<CMatrix<T>> {
    trotter_squeeze_with(p, t, steps, rep, PrimeTime::default())
}

/// Source of `Us` inside the squeezing operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    #[default]
    Analytic,
    Trotter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SqueezeOptions {
    pub backend: Backend,
    pub prime: PrimeTime,
    pub conjugation: ConjugationFrequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeResult<T: Real> {
    /// `eta2 = -eta1 t`.
    pub eta2: T,
    pub schedule: GateSchedule<T>,
    /// `U0(t'') Us(t) U0^dagger(t'')`.
    pub s: CMatrix<T>,
    /// Directly exponentiated `exp[eta2 (a^2 - a^dagger^2)]`.
    pub target: CMatrix<T>,
    /// `gate_distance(s, target)`.
    pub residual: T,
    /// Truncation leak of `target` (zero in 2x2).
    pub leak: T,
}

/// `exp[eta2 (a^2 - a^dagger^2)] = exp(-2i eta2 G2)`.
pub fn squeeze_target<T: Real>(eta2: T, rep: Rep) -> Result<CMatrix<T>> {
    match rep {
        Rep::Fock(f) => {
            let a = annihilation::<T>(f);
            let a2 = a.matrix() * a.matrix();
            exp_normal(&((&a2 - a2.adjoint()) * cr(eta2)))
        }
        Rep::Compact => {
            let g2 = su11_generators_2x2::<T>().gamma2;
            exp_2x2(&(g2.matrix() * ci(T::lit(-2.0) * eta2)))
        }
    }
}

/// `cosh(2 eta2) I - i G2 sinh(2 eta2)` in the 2x2 representation.
pub fn squeeze_closed_form_2x2<T: Real>(eta2: T) -> CMatrix<T> {
    let x = T::lit(2.0) * eta2;
    let g2 = su11_generators_2x2::<T>().gamma2;
    identity::<T>(2) * cr(x.cosh()) - g2.matrix() * ci(x.sinh())
}

/// Builds `S = U0(t'') Us(t) U0^dagger(t'')` and compares it to `exp(-2i eta2 G2)`.
pub fn squeeze_operator<T: Real>(
    p: &CircuitParams<T>,
    t: T,
    steps: usize,
    k: usize,
    rep: Rep,
    opts: SqueezeOptions,
) -> Result<SqueezeResult<T>> {
    let r = reduced(p)?;
    if !(r.eta1 < T::zero()) {
        return Err(Error::WrongRegime {
            eta1: r.eta1.to_f64_lossy(),
        });
    }
    let schedule = GateSchedule::new(&r, t, steps, k, opts.prime, opts.conjugation)?;
    let us = match opts.backend {
        Backend::Analytic => us_from_reduced(&r, t, rep)?,
        Backend::Trotter => trotter_from_reduced(&r, t, schedule.t_prime, steps, rep)?,
    };
    let u0 = rotation(r.omega0, schedule.t_dprime, rep)?;
    let s = &u0 * us * u0.adjoint();
    let eta2 = -r.eta1 * t;
    let target = squeeze_target(eta2, rep)?;
    let leak = match rep {
        Rep::Fock(_) => check_leak(&target, rep.space(), "squeezing operator"),
        Rep::Compact => T::zero(),
    };
    let residual = gate_distance(&s, &target)?;
    Ok(SqueezeResult {
        eta2,
        schedule,
        s,
        target,
        residual,
        leak,
    })
}

/// `U0(t'') G1 U0^dagger(t'')`, which closes the squeezing identity when it equals `G2`.
pub fn conjugated_gamma1<T: Real>(
    p: &CircuitParams<T>,
    k: usize,
    rep: Rep,
    conjugation: ConjugationFrequency,
) -> Result<CMatrix<T>> {
    let r = reduced(p)?;
    let sched = GateSchedule::new(&r, T::zero(), 1, k, PrimeTime::default(), conjugation)?;
    let u0 = rotation(r.omega0, sched.t_dprime, rep)?;
    let g1 = rep.generators::<T>().gamma1;
    Ok(&u0 * g1.matrix() * u0.adjoint())
}

/// Largest entry-wise modulus difference.
pub fn gate_distance<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: a.shape(),
            found: b.shape(),
        });
    }
    Ok(max_abs(&(a - b)))
}
