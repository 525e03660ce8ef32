// SPDX-License-Identifier: Apache-2.0

//! The five subcommands. Each returns the full output text so runs can be
//! compared byte for byte.

use nvamp::circuit::{converged_spectrum, ConvergencePolicy, HamiltonianKind};
use nvamp::coupling::{
    amplification_row, bare_coupling, e_l_from_inductance, effective_params, ratio_coupling,
    SweepPoint, SweepSettings, WORKING_FLUX,
};
use nvamp::gates::{analytic_us, gate_distance, trotter_squeeze};
use nvamp::operators::{su11_generators, su11_generators_2x2, unitarity_residual};
use nvamp::{
    anharmonicity, biot_savart_b0, conjugate_hamiltonian, gate_u0, gate_u1, project_effective,
    squeeze_operator, total_hamiltonian, CouplingGeometry, Error, FockSpace, Rep, SqueezeOptions,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{linspace, RunConfig};
use crate::error::CliError;

/// Fixed scientific notation with 12 significant digits.
pub fn sci(x: f64) -> String {
    // avoid "-0" so output does not depend on how a zero was reached
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn blanks(n: usize) -> Vec<String> {
    vec![String::new(); n]
}

fn policy(cfg: &RunConfig) -> Result<ConvergencePolicy, CliError> {
    Ok(ConvergencePolicy {
        start: FockSpace::new(cfg.truncation.dim)?,
        tolerance: cfg.tolerances.convergence,
        max_dim: cfg.max_dim(),
    })
}

/// Lowest three levels of the full and quartic Hamiltonians over the flux grid.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<String, CliError> {
    let s = &cfg.spectrum;
    let grid = linspace(s.fs_min, s.fs_max, s.fs_steps);
    let policy = policy(cfg)?;
    let rows = grid
        .par_iter()
        .map(|&f| spectrum_row(cfg, &policy, f))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = format!(
        "# energies in GHz, flux in units of Phi0; E_c={}, E_J={}, E_L={} GHz; phase convention: direct (GHz*ns)\n",
        sci(cfg.circuit.e_c),
        sci(cfg.circuit.e_j),
        sci(cfg.circuit.e_l)
    );
    out += "f_s[Phi0],status,dim,E0_full[GHz],E1_full[GHz],E2_full[GHz],E0_quartic[GHz],E1_quartic[GHz],E2_quartic[GHz],alpha_F,alpha_A\n";
    for r in rows {
        out += &r;
    }
    Ok(out)
}

fn spectrum_row(cfg: &RunConfig, policy: &ConvergencePolicy, f: f64) -> Result<String, CliError> {
    let p = cfg.params(f);
    let mut fields = vec![sci(f)];
    if !p.stability().stable {
        fields.push("unstable".into());
        fields.extend(blanks(9));
        return Ok(csv_line(&fields));
    }
    let full = converged_spectrum(HamiltonianKind::Full, &p, 3, policy);
    let quartic = converged_spectrum(HamiltonianKind::Quartic, &p, 3, policy);
    match (full, quartic) {
        (Ok(a), Ok(b)) => {
            fields.push("ok".into());
            fields.push(a.dim.max(b.dim).to_string());
            for s in [&a.spectrum, &b.spectrum] {
                fields.extend(s.energies().iter().map(|&e| sci(e)));
            }
            fields.push(sci(anharmonicity(&a.spectrum)?));
            fields.push(sci(anharmonicity(&b.spectrum)?));
        }
        (Err(Error::NotConverged { .. }), _) | (_, Err(Error::NotConverged { .. })) => {
            fields.push("unconverged".into());
            fields.extend(blanks(9));
        }
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    }
    Ok(csv_line(&fields))
}

/// Entries of the analytic and Trotterized squeezing propagators in the 2x2
/// representation over a time grid.
pub fn cmd_trotter(cfg: &RunConfig) -> Result<String, CliError> {
    let tr = &cfg.trotter;
    let p = cfg.params(tr.f_s);
    nvamp::reduced_params(&p)?;
    let grid = linspace(0.0, tr.t_max, tr.t_steps);
    let rows = grid
        .par_iter()
        .map(|&t| {
            let mut fields = vec![sci(t), sci(t / tr.m as f64)];
            let pair = analytic_us(&p, t, Rep::Compact)
                .and_then(|us| Ok((us, trotter_squeeze(&p, t, tr.m, Rep::Compact)?)));
            match pair {
                Ok((us, up)) => {
                    let dev = gate_distance(&up, &us)?;
                    fields.push(
                        if dev < tr.threshold {
                            "ok"
                        } else {
                            "above_threshold"
                        }
                        .into(),
                    );
                    for m in [&us, &up] {
                        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                            fields.push(sci(m[(i, j)].re));
                            fields.push(sci(m[(i, j)].im));
                        }
                    }
                    fields.push(sci(dev));
                }
                Err(Error::ExponentTooLarge { .. }) => {
                    fields.push("overflow".into());
                    fields.extend(blanks(17));
                }
                Err(e) => return Err(CliError::from(e)),
            }
            Ok(csv_line(&fields))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut out = format!(
        "# 2x2 representation, t in ns, f_s={}, M={}, threshold={}; phase convention: direct (GHz*ns)\n",
        sci(tr.f_s),
        tr.m,
        sci(tr.threshold)
    );
    let mut header = vec!["t[ns]".to_string(), "t_over_M[ns]".into(), "status".into()];
    for name in ["Us", "Usp"] {
        for ij in ["11", "12", "21", "22"] {
            header.push(format!("{name}{ij}_re"));
            header.push(format!("{name}{ij}_im"));
        }
    }
    header.push("max_dev".into());
    out += &csv_line(&header);
    for r in rows {
        out += &r;
    }
    Ok(out)
}

pub fn sweep_settings(cfg: &RunConfig) -> SweepSettings<f64> {
    let a = &cfg.amplify;
    SweepSettings {
        e_c: cfg.circuit.e_c,
        e_j: cfg.circuit.e_j,
        ratios: a.ratios.clone(),
        t: a.t,
        flux: linspace(a.fs_min, a.fs_max, a.fs_steps),
        l: cfg.geometry.l,
        z_nv: cfg.geometry.z_nv,
        convention: cfg.convention(),
    }
}

/// Coupling gain over flux for each `E_L / E_J`.
pub fn cmd_amplify(cfg: &RunConfig) -> Result<String, CliError> {
    let s = sweep_settings(cfg);
    let couplings = s
        .ratios
        .iter()
        .map(|&r| ratio_coupling(&s, r).map(|g| (r, g)))
        .collect::<Result<Vec<_>, _>>()?;
    let cells: Vec<(f64, f64, f64)> = couplings
        .iter()
        .flat_map(|&(r, g)| s.flux.iter().map(move |&f| (r, f, g)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(r, f, g)| amplification_row(&s, r, f, g))
        .collect::<Result<Vec<_>, _>>()?;

    let conv = s.convention.label();
    let mut out = format!(
        "# E_c={} GHz, E_J={} GHz, t={} ns; phase convention: {conv} (eta2 = -eta1 t{})\n",
        sci(s.e_c),
        sci(s.e_j),
        sci(s.t),
        if conv == "direct" { "" } else { " 2pi" }
    );
    out += &format!("E_L/E_J,f_s[Phi0],status,eta1[GHz],eta2[{conv}],gain,g_eff[GHz],g[GHz]\n");
    for row in rows {
        let mut fields = vec![sci(row.ratio), sci(row.f_s)];
        match row.point {
            SweepPoint::Stable {
                eta1,
                eta2,
                gain,
                g_eff,
            } => {
                fields.push("ok".into());
                fields.extend([sci(eta1), sci(eta2), sci(gain), sci(g_eff)]);
            }
            SweepPoint::Unstable { .. } => {
                fields.push("unstable".into());
                fields.extend(blanks(4));
            }
        }
        fields.push(sci(row.g));
        out += &csv_line(&fields);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub edge_length_m: f64,
    pub z_nv_m: f64,
    pub inductance_h: f64,
    pub e_l_ghz: f64,
    pub e_l_from_inductance_ghz: f64,
    pub working_flux: f64,
    pub b0_tesla_per_amp: f64,
    pub beta: f64,
    pub beta_quarter: f64,
    pub g_joule: f64,
    pub g_hz: f64,
    pub g_ghz: f64,
    pub g_rad_per_s: f64,
    pub g_display: String,
    pub chain_mismatch: f64,
    pub assumptions: Vec<String>,
}

/// Bare spin-loop coupling at the working flux.
pub fn cmd_coupling(cfg: &RunConfig) -> Result<String, CliError> {
    let g = &cfg.geometry;
    let geom = CouplingGeometry::new(g.l, g.z_nv, g.inductance)?;
    let p = cfg.params(WORKING_FLUX);
    let c = bare_coupling(&p, &geom)?;
    let report = CouplingReport {
        edge_length_m: g.l,
        z_nv_m: g.z_nv,
        inductance_h: g.inductance,
        e_l_ghz: p.e_l,
        e_l_from_inductance_ghz: e_l_from_inductance(g.inductance),
        working_flux: WORKING_FLUX,
        b0_tesla_per_amp: biot_savart_b0(&geom)?,
        beta: c.beta,
        beta_quarter: c.beta.powf(0.25),
        g_joule: c.energy_joule,
        g_hz: c.g_hz_si,
        g_ghz: c.g_ghz,
        g_rad_per_s: c.angular(),
        g_display: format!("2pi x {:.3} kHz", c.g_hz_si / 1e3),
        chain_mismatch: c.chain_mismatch(),
        assumptions: vec![
            format!(
                "loop edge length l = {} m is an assumed value, not a circuit parameter",
                g.l
            ),
            "beta evaluated at f_s = 0.5 regardless of other settings".into(),
            "g is E/h; angular frequency is 2pi g".into(),
        ],
    };
    Ok(serde_json::to_string_pretty(&report)? + "\n")
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub failed: usize,
    pub checks: Vec<Check>,
}

fn check(
    name: &'static str,
    value: Result<f64, nvamp::Error>,
    tolerance: f64,
    detail: String,
) -> Check {
    match value {
        Ok(v) => Check {
            name,
            value: v,
            tolerance,
            passed: v.is_finite() && v < tolerance,
            detail,
        },
        Err(e) => Check {
            name,
            value: f64::NAN,
            tolerance,
            passed: false,
            detail: format!("{detail}; error: {e}"),
        },
    }
}

/// Invariant suite. A check passes when its value is strictly below tolerance.
pub fn selftest(cfg: &RunConfig) -> Result<SelftestReport, CliError> {
    let tol = &cfg.tolerances;
    let dim = cfg.truncation.dim;
    let space = FockSpace::new(dim)?;
    let p = cfg.params(cfg.trotter.f_s);
    let levels = (dim / 2).max(1);
    let mut checks = Vec::new();

    checks.push(check(
        "su11_commutators_fock",
        Ok(su11_generators::<f64>(space).commutator_residual(levels)),
        tol.commutator,
        format!("lowest {levels} of {dim} levels"),
    ));
    checks.push(check(
        "su11_commutators_2x2",
        Ok(su11_generators_2x2::<f64>().commutator_residual(2)),
        tol.commutator,
        "2x2 representation".into(),
    ));

    let unitarity = (|| -> nvamp::Result<f64> {
        let rep = Rep::Fock(space);
        let t = cfg.amplify.t;
        let s = squeeze_operator(
            &p,
            t,
            cfg.trotter.m,
            cfg.trotter.k,
            rep,
            SqueezeOptions::default(),
        )?;
        Ok([
            gate_u0(&p, t, rep)?,
            gate_u1(&p, t, rep)?,
            analytic_us(&p, t, rep)?,
            s.s,
        ]
        .iter()
        .map(unitarity_residual)
        .fold(0.0, f64::max))
    })();
    checks.push(check(
        "unitarity",
        unitarity,
        tol.unitarity,
        format!("U0, U1, Us, S in Fock dim {dim} at f_s={}", cfg.trotter.f_s),
    ));

    let w0 = p.omega0();
    let hyper = linspace(-3.0, 3.0, 61)
        .into_iter()
        .map(|eta| {
            let e = effective_params(&p, 1.0, eta);
            (e.omega_eff * e.omega_eff - 4.0 * e.chi * e.chi - w0 * w0).abs()
                / (e.omega_eff * e.omega_eff)
        })
        .fold(0.0, f64::max);
    checks.push(check(
        "hyperbolic_identity",
        Ok(hyper),
        tol.hyperbolic,
        "relative to w_eff^2, eta2 in [-3, 3]".into(),
    ));

    let conj_dim = dim.max(80);
    let conjugation = (|| -> nvamp::Result<f64> {
        let f = FockSpace::new(conj_dim)?;
        let p0 = cfg.params(WORKING_FLUX);
        let nv = cfg.nv_params();
        let g = 1e-5;
        let eta2 = 0.2;
        let h = total_hamiltonian(&p0, &nv, g, f)?;
        let s = nvamp::gates::squeeze_target(eta2, Rep::Fock(f))?;
        let proj = project_effective(&conjugate_hamiltonian(&s, &h)?, conj_dim / 8)?;
        let want = effective_params(&p0, g, eta2);
        Ok([
            proj.omega / want.omega_eff,
            proj.chi / want.chi,
            proj.g / want.g_eff,
        ]
        .iter()
        .map(|r| (r - 1.0).abs())
        .fold(0.0, f64::max))
    })();
    checks.push(check(
        "conjugation_equivalence",
        conjugation,
        tol.conjugation,
        format!(
            "eta2 = 0.2, Fock dim {conj_dim}, lowest {} levels",
            conj_dim / 8
        ),
    ));

    // a power-of-two edge keeps the reflection l - (l - z) exact
    let l = 2f64.powi(cfg.geometry.l.log2().round() as i32);
    let symmetry = (|| -> nvamp::Result<f64> {
        let mut worst = 0.0f64;
        for i in 1..=1000 {
            let z = l * i as f64 / 1024.0;
            let a = biot_savart_b0(&CouplingGeometry::new(l, z, 1e-9)?)?;
            let b = biot_savart_b0(&CouplingGeometry::new(l, l - z, 1e-9)?)?;
            worst = worst.max((a - b).abs() / a / f64::EPSILON);
        }
        Ok(worst)
    })();
    checks.push(check(
        "biot_savart_symmetry",
        symmetry,
        tol.symmetry_eps,
        format!("1000 points, l = {l:e} m, relative difference in units of eps"),
    ));

    let policy = ConvergencePolicy {
        start: space,
        tolerance: tol.convergence,
        max_dim: cfg.max_dim(),
    };
    let convergence = match converged_spectrum(HamiltonianKind::Full, &p, 3, &policy) {
        Ok(c) => Ok(c.change),
        Err(Error::NotConverged { change, .. }) => Ok(change.max(tol.convergence)),
        Err(e) => Err(e),
    };
    checks.push(check(
        "truncation_convergence",
        convergence,
        tol.convergence,
        format!(
            "full Hamiltonian at f_s={}, doubling from {dim} up to {}",
            cfg.trotter.f_s,
            cfg.max_dim()
        ),
    ));

    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(SelftestReport {
        passed: failed == 0,
        failed,
        checks,
    })
}

pub fn cmd_selftest(cfg: &RunConfig) -> Result<(String, usize), CliError> {
    let report = selftest(cfg)?;
    Ok((serde_json::to_string_pretty(&report)? + "\n", report.failed))
}
