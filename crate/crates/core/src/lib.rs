// SPDX-License-Identifier: Apache-2.0

//! Simulation of an NV center coupled to a parametrically squeezed
//! superconducting loop circuit.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for `f32`
//! and `f64`). Energies are in GHz, times in ns, and phases are the plain
//! product GHz x ns unless a sweep asks for the `2 pi` convention.

// `!(x > 0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod coupling;
pub mod error;
pub mod gates;
pub mod operators;
pub mod scalar;

pub use circuit::{
    anharmonicity, converged_spectrum, full_hamiltonian, harmonic_hamiltonian, quartic_hamiltonian,
    reduced_params, spectrum, CircuitParams, ConvergencePolicy, HamiltonianKind, ReducedParams,
    Spectrum, Stability,
};
pub use coupling::{
    amplification_sweep, bare_coupling, biot_savart_b0, conjugate_hamiltonian, effective_params,
    nv_frequency, project_effective, total_hamiltonian, CouplingGeometry, EffectiveParams,
    NVParams, PhaseConvention, SweepSettings,
};
pub use error::{Error, Result};
pub use gates::{
    gate_u0, gate_u1, squeeze_operator, trotter_squeeze, Backend, Rep, SqueezeOptions,
    SqueezeResult,
};
pub use operators::{FockSpace, Operator, Space};
pub use scalar::{CMatrix, Real, C};

pub type Operator64 = Operator<f64>;
pub type Operator32 = Operator<f32>;
pub type CircuitParams64 = CircuitParams<f64>;
pub type CircuitParams32 = CircuitParams<f32>;
pub type NVParams64 = NVParams<f64>;
pub type CouplingGeometry64 = CouplingGeometry<f64>;
pub type CMatrix64 = CMatrix<f64>;
