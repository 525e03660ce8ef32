// SPDX-License-Identifier: Apache-2.0

//! Run configuration: TOML with dotted sections, unknown keys rejected.
//!
//! ```toml
//! circuit.e_c = 0.12
//! circuit.e_j = 58.0
//! circuit.e_l = 58.6
//! truncation.dim = 60
//! amplify.ratios = [1.005, 1.01]
//! amplify.two_pi = false
//! ```

use std::path::{Path, PathBuf};

use nvamp::coupling::{PhaseConvention, DEFAULT_EDGE_LENGTH, DEFAULT_Z_NV};
use nvamp::{CircuitParams, CouplingGeometry, FockSpace, NVParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitSection,
    pub truncation: TruncationSection,
    pub spectrum: GridSection,
    pub trotter: TrotterSection,
    pub amplify: AmplifySection,
    pub geometry: GeometrySection,
    pub nv: NvSection,
    pub tolerances: ToleranceSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitSection {
    /// GHz.
    pub e_c: f64,
    /// GHz.
    pub e_j: f64,
    /// GHz.
    pub e_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationSection {
    pub dim: usize,
    /// Largest dimension the doubling schedule may reach; `0` means `4 * dim`.
    pub max_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub fs_min: f64,
    pub fs_max: f64,
    pub fs_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrotterSection {
    pub f_s: f64,
    /// Trotter steps `M`.
    pub m: usize,
    pub k: usize,
    /// ns.
    pub t_max: f64,
    pub t_steps: usize,
    /// Agreement threshold for the max element deviation.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmplifySection {
    /// ns.
    pub t: f64,
    pub ratios: Vec<f64>,
    pub fs_min: f64,
    pub fs_max: f64,
    pub fs_steps: usize,
    pub two_pi: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    /// Loop edge, m.
    pub l: f64,
    /// NV distance from the edge, m.
    pub z_nv: f64,
    /// H.
    pub inductance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NvSection {
    /// GHz.
    pub d: f64,
    /// GHz.
    pub zeeman: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSection {
    pub commutator: f64,
    pub unitarity: f64,
    pub hyperbolic: f64,
    pub conjugation: f64,
    /// Relative, in units of machine epsilon.
    pub symmetry_eps: f64,
    /// GHz.
    pub convergence: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
}

impl Default for CircuitSection {
    fn default() -> Self {
        Self {
            e_c: 0.12,
            e_j: 58.0,
            e_l: 58.6,
        }
    }
}

impl Default for TruncationSection {
    fn default() -> Self {
        Self {
            dim: nvamp::operators::DEFAULT_DIM,
            max_dim: 0,
        }
    }
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            fs_min: 0.5,
            fs_max: 0.95,
            fs_steps: 50,
        }
    }
}

impl Default for TrotterSection {
    fn default() -> Self {
        Self {
            f_s: 0.9,
            m: 100,
            k: 0,
            t_max: 15.0,
            t_steps: 31,
            threshold: 0.02,
        }
    }
}

impl Default for AmplifySection {
    fn default() -> Self {
        Self {
            t: 1.0,
            ratios: vec![1.005, 1.01, 1.02, 1.05],
            fs_min: 0.5,
            fs_max: 1.0,
            fs_steps: 51,
            two_pi: false,
        }
    }
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            l: DEFAULT_EDGE_LENGTH,
            z_nv: DEFAULT_Z_NV,
            inductance: 1.4e-9,
        }
    }
}

impl Default for NvSection {
    fn default() -> Self {
        Self {
            d: nvamp::coupling::constants::NV_ZERO_FIELD_SPLITTING,
            zeeman: 1.37,
        }
    }
}

impl Default for ToleranceSection {
    fn default() -> Self {
        Self {
            commutator: 1e-12,
            unitarity: 1e-9,
            hyperbolic: 1e-10,
            conjugation: 1e-6,
            symmetry_eps: 8.0,
            convergence: nvamp::circuit::CONVERGENCE_TOL,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub two_pi: bool,
    pub fs_min: Option<f64>,
    pub fs_max: Option<f64>,
    pub fs_steps: Option<usize>,
    pub ratios: Option<Vec<f64>>,
    pub t: Option<f64>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Which grid a `--fs-*` / `--t` flag applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Spectrum,
    Trotter,
    Amplify,
    Other,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides, target: Target) {
        if let Some(d) = o.dim {
            self.truncation.dim = d;
        }
        if o.two_pi {
            self.amplify.two_pi = true;
        }
        if let Some(r) = &o.ratios {
            self.amplify.ratios = r.clone();
        }
        if let Some(m) = o.m {
            self.trotter.m = m;
        }
        if let Some(k) = o.k {
            self.trotter.k = k;
        }
        if let Some(p) = &o.out {
            self.output.path = Some(p.clone());
        }
        match target {
            Target::Spectrum => set_grid(
                &mut self.spectrum.fs_min,
                &mut self.spectrum.fs_max,
                &mut self.spectrum.fs_steps,
                o,
            ),
            Target::Amplify => {
                let a = &mut self.amplify;
                set_grid(&mut a.fs_min, &mut a.fs_max, &mut a.fs_steps, o);
                if let Some(t) = o.t {
                    a.t = t;
                }
            }
            Target::Trotter => {
                if let Some(t) = o.t {
                    self.trotter.t_max = t;
                }
            }
            Target::Other => {}
        }
    }

    /// Checks every physical field before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let c = &self.circuit;
        CircuitParams::new(c.e_c, c.e_j, c.e_l, 0.5)?;
        FockSpace::new(self.truncation.dim)?;
        if self.truncation.max_dim != 0 && self.truncation.max_dim < 2 * self.truncation.dim {
            return Err(CliError::Config(format!(
                "truncation.max_dim = {} must be 0 or at least twice dim = {}",
                self.truncation.max_dim, self.truncation.dim
            )));
        }
        grid_ok(
            "spectrum",
            self.spectrum.fs_min,
            self.spectrum.fs_max,
            self.spectrum.fs_steps,
        )?;
        let a = &self.amplify;
        grid_ok("amplify", a.fs_min, a.fs_max, a.fs_steps)?;
        positive("amplify.t", a.t)?;
        if a.ratios.is_empty() {
            return Err(CliError::Config("amplify.ratios must not be empty".into()));
        }
        for &r in &a.ratios {
            positive("amplify.ratios", r)?;
        }
        let t = &self.trotter;
        finite("trotter.f_s", t.f_s)?;
        if t.m == 0 {
            return Err(CliError::Config("trotter.m must be at least 1".into()));
        }
        if !(t.t_max >= 0.0 && t.t_max.is_finite()) || t.t_steps < 2 {
            return Err(CliError::Config(
                "trotter needs t_max >= 0 and t_steps >= 2".into(),
            ));
        }
        positive("trotter.threshold", t.threshold)?;
        let g = &self.geometry;
        CouplingGeometry::new(g.l, g.z_nv, g.inductance)?;
        finite("nv.d", self.nv.d)?;
        finite("nv.zeeman", self.nv.zeeman)?;
        let tol = &self.tolerances;
        for (name, v) in [
            ("tolerances.commutator", tol.commutator),
            ("tolerances.unitarity", tol.unitarity),
            ("tolerances.hyperbolic", tol.hyperbolic),
            ("tolerances.conjugation", tol.conjugation),
            ("tolerances.symmetry_eps", tol.symmetry_eps),
            ("tolerances.convergence", tol.convergence),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!(
                    "{name} must be a finite non-negative number"
                )));
            }
        }
        Ok(())
    }

    pub fn params(&self, f_s: f64) -> CircuitParams<f64> {
        CircuitParams {
            e_c: self.circuit.e_c,
            e_j: self.circuit.e_j,
            e_l: self.circuit.e_l,
            f_s,
        }
    }

    pub fn max_dim(&self) -> usize {
        match self.truncation.max_dim {
            0 => 4 * self.truncation.dim,
            n => n,
        }
    }

    pub fn nv_params(&self) -> NVParams<f64> {
        NVParams {
            d: self.nv.d,
            zeeman: self.nv.zeeman,
        }
    }

    pub fn convention(&self) -> PhaseConvention {
        if self.amplify.two_pi {
            PhaseConvention::TwoPi
        } else {
            PhaseConvention::Direct
        }
    }
}

fn set_grid(min: &mut f64, max: &mut f64, steps: &mut usize, o: &Overrides) {
    if let Some(v) = o.fs_min {
        *min = v;
    }
    if let Some(v) = o.fs_max {
        *max = v;
    }
    if let Some(v) = o.fs_steps {
        *steps = v;
    }
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be finite, got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn grid_ok(section: &str, min: f64, max: f64, steps: usize) -> Result<(), CliError> {
    finite(section, min)?;
    finite(section, max)?;
    if steps == 0 || min > max {
        return Err(CliError::Config(format!(
            "{section}: need fs_min <= fs_max and fs_steps >= 1"
        )));
    }
    Ok(())
}

/// `n` evenly spaced points from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..n)
            .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
