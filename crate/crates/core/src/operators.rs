// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock-space operators and the dense matrix functions built on them.
//!
//! Every operator is a dense complex matrix tagged with the [`Space`] it acts
//! on. Matrix functions of Hermitian and normal operators go through a
//! Hermitian eigendecomposition; 2x2 matrices use closed forms.
//!
//! Ladder identities only hold away from the truncation edge: `[a, a^dagger]`
//! equals the identity on all but the top Fock level, and the SU(1,1)
//! commutators on all but the top two. Checks that compare against the
//! infinite-dimensional algebra therefore restrict to an interior block
//! (see [`interior_block`]).

use nalgebra::{ComplexField, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{c, ci, cr, dagger, identity, max_abs, CMatrix, Real, C};

/// Default number of retained Fock levels.
pub const DEFAULT_DIM: usize = 60;

/// Weight in the top tenth of the ladder above which a truncation leak is reported.
pub const LEAK_THRESHOLD: f64 = 1e-6;

/// Largest hyperbolic growth exponent accepted by the 2x2 exponential.
pub const MAX_2X2_EXPONENT: f64 = 10.0;

const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Tolerance floor that stays meaningful in single precision.
pub(crate) fn input_tol<T: Real>(base: f64) -> T {
    let eps = T::default_epsilon().to_f64_lossy();
    T::lit(base.max(1e4 * eps))
}

/// Number of retained Fock levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same truncation with twice the levels.
    pub fn doubled(&self) -> Self {
        Self { dim: 2 * self.dim }
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self { dim: DEFAULT_DIM }
    }
}

pub fn make_fock_space(dim: usize) -> Result<FockSpace> {
    FockSpace::new(dim)
}

/// Hilbert space an [`Operator`] acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    /// A single truncated bosonic mode.
    Fock(FockSpace),
    /// Oscillator tensor spin-1/2, spin as the fast index: row `2n + s`.
    FockSpin(FockSpace),
    /// The two-dimensional non-unitary SU(1,1) representation.
    Compact,
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Fock(f) => f.dim(),
            Space::FockSpin(f) => 2 * f.dim(),
            Space::Compact => 2,
        }
    }

    /// Matrix rows spanned by the lowest `levels` oscillator levels.
    pub fn rows_for_levels(&self, levels: usize) -> usize {
        match self {
            Space::Fock(_) => levels,
            Space::FockSpin(_) => 2 * levels,
            Space::Compact => 2,
        }
    }
}

/// A dense operator on a fixed [`Space`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    matrix: CMatrix<T>,
    space: Space,
}

impl<T: Real> Operator<T> {
    pub fn new(matrix: CMatrix<T>, space: Space) -> Result<Self> {
        let n = space.dim();
        if matrix.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                expected: (n, n),
                found: matrix.shape(),
            });
        }
        Ok(Self { matrix, space })
    }

    /// Wraps `matrix` and verifies `max|M - M^dagger| <= tol`.
    pub fn hermitian(matrix: CMatrix<T>, space: Space, tol: T) -> Result<Self> {
        let op = Self::new(matrix, space)?;
        let residual = op.hermiticity_residual();
        if residual > tol {
            return Err(Error::NotHermitian {
                residual: residual.to_f64_lossy(),
                tolerance: tol.to_f64_lossy(),
            });
        }
        Ok(op)
    }

    pub fn identity(space: Space) -> Self {
        Self {
            matrix: identity(space.dim()),
            space,
        }
    }

    pub fn zeros(space: Space) -> Self {
        let n = space.dim();
        Self {
            matrix: CMatrix::zeros(n, n),
            space,
        }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermiticity_residual(&self) -> T {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: dagger(&self.matrix),
            space: self.space,
        }
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        Self {
            matrix: &self.matrix * factor,
            space: self.space,
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(cr(factor))
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::ShapeMismatch {
                expected: self.matrix.shape(),
                found: other.matrix.shape(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            space: self.space,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
            space: self.space,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            space: self.space,
        })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
            space: self.space,
        })
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = identity(self.dim());
        for _ in 0..k {
            out = &out * &self.matrix;
        }
        Self {
            matrix: out,
            space: self.space,
        }
    }
}

/// Leading block of `m` spanned by the lowest `levels` oscillator levels of `space`.
pub fn interior_block<T: Real>(m: &CMatrix<T>, space: Space, levels: usize) -> CMatrix<T> {
    let rows = space.rows_for_levels(levels).min(m.nrows());
    m.view((0, 0), (rows, rows)).into_owned()
}

/// Annihilation operator: `<m|a|n> = sqrt(n) delta_{m, n-1}`.
pub fn annihilation<T: Real>(space: FockSpace) -> Operator<T> {
    let n = space.dim();
    let mut m = CMatrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = cr(T::lit(k as f64).sqrt());
    }
    Operator {
        matrix: m,
        space: Space::Fock(space),
    }
}

pub fn creation<T: Real>(space: FockSpace) -> Operator<T> {
    annihilation(space).dagger()
}

/// `a^dagger a`, built directly as `diag(0, 1, ..., dim-1)`.
pub fn number<T: Real>(space: FockSpace) -> Operator<T> {
    let n = space.dim();
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| cr(T::lit(k as f64))));
    Operator {
        matrix: m,
        space: Space::Fock(space),
    }
}

/// Phase and Cooper-pair number operators of an oscillator with mass `mass`
/// and angular frequency `omega`:
/// `phi = sqrt(1/(2 m w)) (a + a^dagger)`, `n = i sqrt(m w / 2) (a^dagger - a)`.
pub fn phase_charge_operators<T: Real>(
    space: FockSpace,
    mass: T,
    omega: T,
) -> Result<(Operator<T>, Operator<T>)> {
    if !(mass > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "mass",
            reason: format!("must be positive, got {mass}"),
        });
    }
    if !(omega > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: format!("must be positive, got {omega}"),
        });
    }
    let a = annihilation::<T>(space);
    let ad = a.dagger();
    let two = T::lit(2.0);
    let x0 = (T::one() / (two * mass * omega)).sqrt();
    let p0 = (mass * omega / two).sqrt();
    let phi = Operator {
        matrix: (&a.matrix + &ad.matrix) * cr(x0),
        space: a.space,
    };
    let n = Operator {
        matrix: (&ad.matrix - &a.matrix) * ci(p0),
        space: a.space,
    };
    Ok((phi, n))
}

/// The SU(1,1) generator triple in either representation.
#[derive(Debug, Clone, PartialEq)]
pub struct SU11Generators<T: Real> {
    pub gamma1: Operator<T>,
    pub gamma2: Operator<T>,
    pub gamma3: Operator<T>,
}

impl<T: Real> SU11Generators<T> {
    pub fn space(&self) -> Space {
        self.gamma1.space()
    }

    /// Largest residual of the three defining commutators
    /// `[G1,G2] = -2i G3`, `[G2,G3] = 2i G1`, `[G3,G1] = 2i G2`,
    /// restricted to the lowest `levels` oscillator levels.
    pub fn commutator_residual(&self, levels: usize) -> T {
        let (g1, g2, g3) = (
            self.gamma1.matrix(),
            self.gamma2.matrix(),
            self.gamma3.matrix(),
        );
        let two_i = ci::<T>(T::lit(2.0));
        let r12 = g1 * g2 - g2 * g1 + g3 * two_i;
        let r23 = g2 * g3 - g3 * g2 - g1 * two_i;
        let r31 = g3 * g1 - g1 * g3 - g2 * two_i;
        let space = self.space();
        [r12, r23, r31]
            .iter()
            .map(|r| max_abs(&interior_block(r, space, levels)))
            .fold(T::zero(), |acc, x| acc.max(x))
    }
}

/// `G1 = (a^2 + a^dagger^2)/2`, `G2 = i(a^2 - a^dagger^2)/2`, `G3 = a^dagger a + 1/2`.
pub fn su11_generators<T: Real>(space: FockSpace) -> SU11Generators<T> {
    let a = annihilation::<T>(space);
    let a2 = &a.matrix * &a.matrix;
    let ad2 = a2.adjoint();
    let half = T::lit(0.5);
    let g1 = (&a2 + &ad2) * cr(half);
    let g2 = (&a2 - &ad2) * ci(half);
    let g3 = number::<T>(space).matrix + identity::<T>(space.dim()) * cr(half);
    let s = Space::Fock(space);
    SU11Generators {
        gamma1: Operator {
            matrix: g1,
            space: s,
        },
        gamma2: Operator {
            matrix: g2,
            space: s,
        },
        gamma3: Operator {
            matrix: g3,
            space: s,
        },
    }
}

/// `G1 = i tau_y`, `G2 = -i tau_x`, `G3 = tau_z`.
pub fn su11_generators_2x2<T: Real>() -> SU11Generators<T> {
    let z = c::<T>(0.0, 0.0);
    let one = c::<T>(1.0, 0.0);
    let g1 = CMatrix::from_row_slice(2, 2, &[z, one, -one, z]);
    let g2 = CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, -1.0), z]);
    let g3 = CMatrix::from_row_slice(2, 2, &[one, z, z, -one]);
    SU11Generators {
        gamma1: Operator {
            matrix: g1,
            space: Space::Compact,
        },
        gamma2: Operator {
            matrix: g2,
            space: Space::Compact,
        },
        gamma3: Operator {
            matrix: g3,
            space: Space::Compact,
        },
    }
}

pub fn pauli_x<T: Real>() -> CMatrix<T> {
    let z = c::<T>(0.0, 0.0);
    let one = c::<T>(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[z, one, one, z])
}

pub fn pauli_y<T: Real>() -> CMatrix<T> {
    let z = c::<T>(0.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z])
}

pub fn pauli_z<T: Real>() -> CMatrix<T> {
    let z = c::<T>(0.0, 0.0);
    let one = c::<T>(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[one, z, z, -one])
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigen<T: Real> {
    pub values: Vec<T>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: CMatrix<T>,
}

impl<T: Real> Eigen<T> {
    /// `V f(D) V^dagger` for a scalar function applied to the eigenvalues.
    pub fn apply(&self, f: impl Fn(T) -> C<T>) -> CMatrix<T> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &e) in self.values.iter().enumerate() {
            let fj = f(e);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.apply(cr)
    }
}

/// Hermitian eigendecomposition of a raw matrix.
pub fn hermitian_eig_matrix<T: Real>(m: &CMatrix<T>) -> Result<Eigen<T>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (m.nrows(), m.nrows()),
            found: m.shape(),
        });
    }
    let scale = max_abs(m).max(T::one());
    let residual = max_abs(&(m - m.adjoint()));
    let tol = input_tol::<T>(HERMITIAN_INPUT_TOL) * scale;
    if residual > tol {
        return Err(Error::NotHermitian {
            residual: residual.to_f64_lossy(),
            tolerance: tol.to_f64_lossy(),
        });
    }
    let sym = (m + m.adjoint()) * cr(T::lit(0.5));
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.nrows();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(Eigen { values, vectors })
}

pub fn hermitian_eig<T: Real>(op: &Operator<T>) -> Result<Eigen<T>> {
    hermitian_eig_matrix(op.matrix())
}

/// Applies a real scalar function to a Hermitian operator.
pub fn hermitian_function<T: Real>(op: &Operator<T>, f: impl Fn(T) -> T) -> Result<Operator<T>> {
    let eig = hermitian_eig(op)?;
    Ok(Operator {
        matrix: eig.apply(|x| cr(f(x))),
        space: op.space(),
    })
}

/// `exp(-i H t)` for a Hermitian matrix `H` (GHz) and time `t` (ns).
pub fn evolve_matrix<T: Real>(h: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
    let eig = hermitian_eig_matrix(h)?;
    Ok(eig.apply(|e| {
        let phase = -e * t;
        C::new(phase.cos(), phase.sin())
    }))
}

pub fn evolve<T: Real>(h: &Operator<T>, t: T) -> Result<Operator<T>> {
    Ok(Operator {
        matrix: evolve_matrix(h.matrix(), t)?,
        space: h.space(),
    })
}

/// Closed-form exponential of an arbitrary 2x2 complex matrix.
///
/// Writing `K = mu I + K'` with `K'` traceless, `K'^2 = s^2 I` and
/// `exp(K) = e^mu [cosh(s) I + sinh(s)/s K']`. The hyperbolic pieces grow
/// without bound in the non-unitary SU(1,1) representation, so the growth
/// exponent `|Re s| + |Re mu|` is capped at [`MAX_2X2_EXPONENT`].
pub fn exp_2x2<T: Real>(k: &CMatrix<T>) -> Result<CMatrix<T>> {
    if k.shape() != (2, 2) {
        return Err(Error::ShapeMismatch {
            expected: (2, 2),
            found: k.shape(),
        });
    }
    let two = cr::<T>(T::lit(2.0));
    let mu = (k[(0, 0)] + k[(1, 1)]) / two;
    let d = (k[(0, 0)] - k[(1, 1)]) / two;
    let s2 = d * d + k[(0, 1)] * k[(1, 0)];
    let s = ComplexField::sqrt(s2);
    let growth = s.re.abs() + mu.re.abs();
    if growth > T::lit(MAX_2X2_EXPONENT) {
        return Err(Error::ExponentTooLarge {
            magnitude: growth.to_f64_lossy(),
            bound: MAX_2X2_EXPONENT,
        });
    }
    let cosh = ComplexField::cosh(s);
    // sinh(s)/s, with its series near s = 0
    let sinhc = if s.modulus() < T::lit(1e-4) {
        cr::<T>(T::one()) + s2 / cr(T::lit(6.0)) + s2 * s2 / cr(T::lit(120.0))
    } else {
        ComplexField::sinh(s) / s
    };
    let e_mu = ComplexField::exp(mu);
    let m00 = (cosh + sinhc * d) * e_mu;
    let m11 = (cosh - sinhc * d) * e_mu;
    let m01 = sinhc * k[(0, 1)] * e_mu;
    let m10 = sinhc * k[(1, 0)] * e_mu;
    Ok(CMatrix::from_row_slice(2, 2, &[m00, m01, m10, m11]))
}

/// `exp(K)` for a normal matrix via its commuting Hermitian and
/// anti-Hermitian parts, or via [`exp_2x2`] for any 2x2 input.
pub fn exp_normal<T: Real>(k: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !k.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (k.nrows(), k.nrows()),
            found: k.shape(),
        });
    }
    if k.nrows() == 2 {
        return exp_2x2(k);
    }
    let kd = k.adjoint();
    let scale = max_abs(k).max(T::one());
    let residual = max_abs(&(k * &kd - &kd * k));
    if residual > input_tol::<T>(HERMITIAN_INPUT_TOL) * scale * scale {
        return Err(Error::NotNormal {
            residual: residual.to_f64_lossy(),
        });
    }
    let half = cr::<T>(T::lit(0.5));
    let herm = (k + &kd) * half;
    // anti-Hermitian part B = -i H' with H' = i B Hermitian
    let anti_as_herm = (k - &kd) * half * ci::<T>(T::one());
    let has_herm = max_abs(&herm) > T::zero();
    let has_anti = max_abs(&anti_as_herm) > T::zero();
    let n = k.nrows();
    let rot = if has_anti {
        evolve_matrix(&anti_as_herm, T::one())?
    } else {
        identity(n)
    };
    if !has_herm {
        return Ok(rot);
    }
    let grow = hermitian_eig_matrix(&herm)?.apply(|x| cr(x.exp()));
    Ok(grow * rot)
}

/// `max|U^dagger U - I|`.
pub fn unitarity_residual<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - identity::<T>(n)))
}

/// Probability weight that `u` moves from the lowest tenth of the ladder into
/// the top tenth, maximised over those low-lying input states.
pub fn truncation_leak<T: Real>(u: &CMatrix<T>, space: Space) -> T {
    let levels = match space {
        Space::Fock(f) | Space::FockSpin(f) => f.dim(),
        Space::Compact => return T::zero(),
    };
    let band = levels.div_ceil(10);
    let inputs = space.rows_for_levels(band);
    let first_top = space.rows_for_levels(levels - band);
    (0..inputs)
        .map(|col| {
            (first_top..u.nrows()).fold(T::zero(), |acc, row| acc + u[(row, col)].modulus_squared())
        })
        .fold(T::zero(), |acc, w| acc.max(w))
}

/// Measures [`truncation_leak`] and logs a warning above [`LEAK_THRESHOLD`].
pub fn check_leak<T: Real>(u: &CMatrix<T>, space: Space, what: &str) -> T {
    let leak = truncation_leak(u, space);
    if leak > T::lit(LEAK_THRESHOLD) {
        log::warn!(
            "truncation leak in {what}: {:.3e} of the weight reaches the top 10% of {} levels",
            leak.to_f64_lossy(),
            space.dim()
        );
    }
    leak
}

/// Embeds an oscillator operator as `A (x) I_2` with spin as the fast index.
pub fn kron_spin_identity<T: Real>(op: &CMatrix<T>) -> CMatrix<T> {
    op.kronecker(&identity::<T>(2))
}

/// `I_osc (x) s` for a 2x2 spin matrix.
pub fn kron_identity_spin<T: Real>(osc_dim: usize, s: &CMatrix<T>) -> CMatrix<T> {
    identity::<T>(osc_dim).kronecker(s)
}
