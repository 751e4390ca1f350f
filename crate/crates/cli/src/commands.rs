//! The four subcommands. Each writes its data files under `out_dir` and
//! returns the paths it wrote, in order.

use std::path::PathBuf;

use ptscatter_core::{
    fit_power_law, hermitian_reference_energy, locate_ep, phase_histogram, resonance_pair,
    sample_wavefunction_padded, solve_amplitudes, sweep, symmetry_score, trace, trace_argand,
    BigGammaMap, DimerFamily, EnergyWindow, PeakSearch, Resonance, SymmetryLabel,
};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{cell, opt_cell, to_json, write_atomic, Csv};
use crate::CliError;

/// Everything derived from a validated config before any command runs.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub family: DimerFamily,
    pub window: EnergyWindow,
    pub search: PeakSearch,
    pub map: BigGammaMap,
    pub gammas: Vec<f64>,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        config.validate()?;
        let family = config.family()?;
        let window = config.energy_window()?;
        let search = PeakSearch::relative_to_hermitian(
            &family,
            window,
            config.window.n_points,
            config.prominence_rel,
        )?;
        let energy_ref = match config.energy_ref {
            Some(e) => e,
            None => hermitian_reference_energy(&family, &search)?,
        };
        let map = BigGammaMap::new(
            config.big_gamma_convention.into(),
            energy_ref,
            config.geometry.v_prime,
            config.hbar2_over_2m,
        )?;
        let gammas = match (&config.gammas, &config.big_gammas) {
            (Some(g), _) => g.clone(),
            (None, Some(big)) => big
                .iter()
                .map(|&b| map.gamma(b))
                .collect::<Result<_, _>>()?,
            (None, None) => vec![0.0],
        };
        Ok(Self {
            config,
            family,
            window,
            search,
            map,
            gammas,
        })
    }

    fn path(&self, name: String) -> PathBuf {
        self.config.out_dir.join(name)
    }

    /// Resolved configuration embedded in every JSON summary.
    fn provenance(&self) -> Value {
        json!({
            "config": self.config,
            "resolved": {
                "gammas": self.gammas,
                "energy_ref": self.map.energy_ref,
                "prominence_min": self.search.prominence_min,
                "hbar2_over_2m": self.family.hbar2_over_2m,
            },
        })
    }

    fn summary(&self, mut body: Value) -> Value {
        let mut doc = self.provenance();
        if let (Some(doc), Some(body)) = (doc.as_object_mut(), body.as_object_mut()) {
            doc.append(body);
        }
        doc
    }

    fn gamma_entry(&self, gamma: f64) -> Result<Value, CliError> {
        Ok(json!({
            "gamma": gamma,
            "big_gamma": self.map.big_gamma(gamma)?,
            "big_gamma_formula": self.map.formula_big_gamma(gamma)?,
        }))
    }
}

fn resonance_json(r: &Resonance) -> Value {
    json!({
        "energy": r.energy,
        "height": r.height,
        "fwhm": r.fwhm,
        "q": r.q,
        "prominence": r.prominence,
    })
}

fn merge(mut a: Value, mut b: Value) -> Value {
    if let (Some(a), Some(b)) = (a.as_object_mut(), b.as_object_mut()) {
        a.append(b);
    }
    a
}

/// Transmission spectra, one CSV per γ, plus `sweep_summary.json`.
pub fn cmd_sweep(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let mut runs = Vec::new();
    for (i, &gamma) in ctx.gammas.iter().enumerate() {
        let spectrum = sweep(
            &ctx.family.at(gamma)?,
            &ctx.window,
            ctx.config.window.n_points,
        )?;
        let mut csv = Csv::new(&[
            "energy_eV",
            "T",
            "R",
            "T_prime",
            "R_prime",
            "defect_left",
            "defect_right",
        ]);
        for p in spectrum.points() {
            csv.row(&[
                cell(p.energy),
                cell(p.t),
                cell(p.r),
                cell(p.t_prime),
                cell(p.r_prime),
                cell(p.defect_left),
                cell(p.defect_right),
            ]);
        }
        let name = format!("spectrum_gamma_{i:03}.csv");
        let path = ctx.path(name.clone());
        write_atomic(&path, csv.as_str())?;
        written.push(path);

        let peaks = spectrum.find_peaks(ctx.search.prominence_min)?;
        runs.push(merge(
            ctx.gamma_entry(gamma)?,
            json!({
                "file": name,
                "max_transmission": spectrum.max_transmission(),
                "resonances": peaks.iter().map(resonance_json).collect::<Vec<_>>(),
            }),
        ));
    }
    let path = ctx.path("sweep_summary.json".into());
    write_atomic(&path, &to_json(&ctx.summary(json!({ "runs": runs })))?)?;
    written.push(path);
    Ok(written)
}

/// Wavefunctions at every tracked resonance, plus `wavefunction_summary.json`.
pub fn cmd_wavefunction(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let wf_cfg = &ctx.config.wavefunction;
    let mut written = Vec::new();
    let mut runs = Vec::new();
    for (i, &gamma) in ctx.gammas.iter().enumerate() {
        let pot = ctx.family.at(gamma)?;
        let pair = resonance_pair(&ctx.family, gamma, &ctx.search)?;
        let tracked: Vec<(&str, Resonance)> = match pair.upper {
            Some(upper) => vec![("lower", pair.lower), ("upper", upper)],
            None => vec![("merged", pair.lower)],
        };
        let mut entries = Vec::new();
        for (j, (role, res)) in tracked.into_iter().enumerate() {
            let amps = solve_amplitudes(&pot, res.energy)?;
            let wf = sample_wavefunction_padded(&amps, wf_cfg.n_points, wf_cfg.lead_padding)?;
            let score = symmetry_score(&wf, amps.center())?;
            let label = SymmetryLabel::from_score(score);

            let mut csv = Csv::new(&["x_nm", "re_psi", "im_psi", "region_index"]);
            for ((&x, psi), &region) in wf.x().iter().zip(wf.psi()).zip(wf.region()) {
                csv.row(&[cell(x), cell(psi.re), cell(psi.im), region.to_string()]);
            }
            let name = format!("wavefunction_gamma_{i:03}_res_{j}.csv");
            let path = ctx.path(name.clone());
            write_atomic(&path, csv.as_str())?;
            written.push(path);

            entries.push(merge(
                resonance_json(&res),
                json!({
                    "file": name,
                    "role": role,
                    "symmetry_score": score,
                    "label": label.as_str(),
                    "max_abs_psi": wf.max_abs(),
                }),
            ));
        }
        runs.push(merge(
            ctx.gamma_entry(gamma)?,
            json!({ "resonances": entries }),
        ));
    }
    let path = ctx.path("wavefunction_summary.json".into());
    write_atomic(&path, &to_json(&ctx.summary(json!({ "runs": runs })))?)?;
    written.push(path);
    Ok(written)
}

/// Argand trajectories and eigenphase histograms, plus `phases_summary.json`.
pub fn cmd_phases(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let mut runs = Vec::new();
    for (i, &gamma) in ctx.gammas.iter().enumerate() {
        let pot = ctx.family.at(gamma)?;
        let argand = trace_argand(&pot, &ctx.window, ctx.config.window.n_points)?;

        let mut csv = Csv::new(&[
            "energy",
            "branch",
            "re_lambda",
            "im_lambda",
            "theta_re",
            "theta_im",
        ]);
        for b in 0..2 {
            let phases = argand.eigenphases(b)?;
            for ((&e, lambda), (theta_re, theta_im)) in
                argand.energies.iter().zip(&argand.branches[b]).zip(phases)
            {
                csv.row(&[
                    cell(e),
                    (b + 1).to_string(),
                    cell(lambda.re),
                    cell(lambda.im),
                    cell(theta_re),
                    cell(theta_im),
                ]);
            }
        }
        let argand_name = format!("argand_gamma_{i:03}.csv");
        let path = ctx.path(argand_name.clone());
        write_atomic(&path, csv.as_str())?;
        written.push(path);

        let hist = phase_histogram(&argand, ctx.config.phases.n_bins)?;
        let mut csv = Csv::new(&["bin_left", "bin_right", "count_branch1", "count_branch2"]);
        for k in 0..hist.n_bins() {
            csv.row(&[
                cell(hist.edges[k]),
                cell(hist.edges[k + 1]),
                hist.counts[0][k].to_string(),
                hist.counts[1][k].to_string(),
            ]);
        }
        let hist_name = format!("histogram_gamma_{i:03}.csv");
        let path = ctx.path(hist_name.clone());
        write_atomic(&path, csv.as_str())?;
        written.push(path);

        let max_radius = argand
            .branches
            .iter()
            .flatten()
            .map(|l| l.norm())
            .fold(0.0, f64::max);
        runs.push(merge(
            ctx.gamma_entry(gamma)?,
            json!({
                "argand_file": argand_name,
                "histogram_file": hist_name,
                "max_radius": max_radius,
                "max_radius_deviation": argand.max_radius_deviation(),
                "jump_energies": argand.jumps.iter().map(|&j| argand.energies[j]).collect::<Vec<_>>(),
                "pi_radius": ctx.config.phases.pi_radius,
                "fraction_near_pi": hist.fraction_near_pi(ctx.config.phases.pi_radius),
            }),
        ));
    }
    let path = ctx.path("phases_summary.json".into());
    write_atomic(&path, &to_json(&ctx.summary(json!({ "runs": runs })))?)?;
    written.push(path);
    Ok(written)
}

/// Coalescence point, doublet trace and splitting fit: `ep_trace.csv` and
/// `ep_report.json`.
pub fn cmd_ep(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let ep_cfg = &ctx.config.ep;
    let ep = locate_ep(
        &ctx.family,
        ep_cfg.gamma_lo,
        ep_cfg.gamma_hi,
        ep_cfg.tol_gamma,
        &ctx.search,
        &ctx.map,
    )?;
    let n = ep_cfg.trace_points;
    let gammas: Vec<f64> = (0..n)
        .map(|i| ep_cfg.trace_extent * ep.gamma * i as f64 / (n - 1) as f64)
        .collect();
    let tr = trace(&ctx.family, &gammas, &ctx.search, &ctx.map)?;
    let fit = fit_power_law(&tr, &ep, ep_cfg.band())?;

    let mut csv = Csv::new(&[
        "gamma",
        "big_gamma",
        "big_gamma_formula",
        "n_resonances",
        "e_lower",
        "height_lower",
        "fwhm_lower",
        "q_lower",
        "e_upper",
        "height_upper",
        "fwhm_upper",
        "q_upper",
        "splitting",
    ]);
    for p in &tr.points {
        let (lo, up) = (p.pair.lower, p.pair.upper);
        csv.row(&[
            cell(p.gamma),
            cell(p.big_gamma),
            cell(p.big_gamma_formula),
            p.pair.count().to_string(),
            cell(lo.energy),
            cell(lo.height),
            cell(lo.fwhm),
            cell(lo.q),
            opt_cell(up.map(|r| r.energy)),
            opt_cell(up.map(|r| r.height)),
            opt_cell(up.map(|r| r.fwhm)),
            opt_cell(up.map(|r| r.q)),
            opt_cell(p.splitting()),
        ]);
    }
    let trace_path = ctx.path("ep_trace.csv".into());
    write_atomic(&trace_path, csv.as_str())?;

    let report = ctx.summary(json!({
        "gamma_ep": ep.gamma,
        "big_gamma_ep": ep.big_gamma,
        "big_gamma_ep_formula": ctx.map.formula_big_gamma(ep.gamma)?,
        "bracket": [ep.bracket.0, ep.bracket.1],
        "iterations": ep.iterations,
        "trace_file": "ep_trace.csv",
        "fit": {
            "model": "splitting = a * (big_gamma_ep - big_gamma)^b",
            "a": fit.a,
            "b": fit.b,
            "residual": fit.residual,
            "n_points": fit.n_points,
            "gamma_range": [fit.gamma_range.0, fit.gamma_range.1],
            "min_detuning": ep_cfg.fit_min_detuning,
            "max_detuning": ep_cfg.fit_max_detuning,
        },
    }));
    let report_path = ctx.path("ep_report.json".into());
    write_atomic(&report_path, &to_json(&report)?)?;
    Ok(vec![trace_path, report_path])
}
