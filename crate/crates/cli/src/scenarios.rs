//! Scenario dispatch: each runner turns a validated config into a CSV
//! document, a human-readable summary block, and a list of validity flags
//! (non-empty flags fail the run under `--strict`).

use anyhow::{anyhow, bail, Context, Result};

use collapse_photons::cosmology::{self, CosmologyScenario, DegeneracyVerdict};
use collapse_photons::energy_gain;
use collapse_photons::fock::{self, DensityState, FockModel, ModeGrid};
use collapse_photons::laser::{self, LaserPulseSpec, LossRegime};
use collapse_photons::superposition::{self, SuperpositionSpec};
use collapse_photons::units::{CollapseParams, PhysicalConstants};

use crate::config::{Kind, ScenarioConfig};
use crate::output::{fmt_num, CsvDoc};

pub struct RunOutput {
    pub csv: CsvDoc,
    pub summary: Vec<String>,
    /// Validity flags; any entry makes the run fail under --strict.
    pub flags: Vec<String>,
}

/// Tolerance and sample-count overrides from the command line.
#[derive(Debug, Clone, Copy)]
pub struct Overrides {
    pub seed: u64,
    pub tol: Option<f64>,
    pub samples: Option<u64>,
}

fn collapse_params(cfg: &ScenarioConfig) -> Result<CollapseParams> {
    let lambda = cfg.num("lambda_rate", 1.0);
    let a = cfg.num("a_cm", 1e-5);
    let params = match cfg.has("lambdabar_n_cm") {
        true => CollapseParams::with_constants(
            lambda,
            a,
            PhysicalConstants::with_lambdabar_n(cfg.req("lambdabar_n_cm"))?,
        )?,
        false => CollapseParams::new(lambda, a)?,
    };
    Ok(params)
}

fn pulse_spec(cfg: &ScenarioConfig) -> Result<LaserPulseSpec> {
    let sigma = cfg.req("sigma_cm");
    let n0 = cfg.req("n0");
    if cfg.has("k0_cm_inv") {
        Ok(LaserPulseSpec::new(cfg.req("k0_cm_inv"), sigma, n0)?)
    } else {
        let lambda0_cm = cfg.req("lambda0_nm") * 1e-7;
        Ok(LaserPulseSpec::from_wavelength(lambda0_cm, sigma, n0)?)
    }
}

fn regime(cfg: &ScenarioConfig) -> Result<LossRegime> {
    Ok(match cfg.str_opt("regime").unwrap_or("low") {
        "low" | "low_k0a" => LossRegime::LowK0a,
        "high" | "high_k0a" => LossRegime::HighK0a,
        "exact" => LossRegime::Exact,
        other => bail!("unsupported regime \"{other}\""),
    })
}

pub fn run(cfg: &ScenarioConfig, ov: &Overrides) -> Result<RunOutput> {
    match cfg.kind {
        Kind::EnergyGain => energy_gain_run(cfg, ov),
        Kind::LaserLoss => laser_loss_run(cfg, ov),
        Kind::Excitation => excitation_run(cfg, ov),
        Kind::Cosmology => cosmology_run(cfg, ov),
        Kind::Superposition => superposition_run(cfg, ov),
        Kind::FockSim => fock_sim_run(cfg, ov),
        Kind::Validate => bail!("validate has a dedicated runner"),
    }
}

fn energy_gain_run(cfg: &ScenarioConfig, ov: &Overrides) -> Result<RunOutput> {
    let params = collapse_params(cfg)?;
    let a = params.a;
    let mass = cfg.num("mass_cm_inv", 0.0);
    let tol = ov.tol.unwrap_or(cfg.num("tol", 1e-8));
    let n = cfg.num("n_points", 50.0) as usize;
    let grid = laser::log_grid(cfg.num("ka_min", 0.01) / a, cfg.num("ka_max", 100.0) / a, n);

    let mut csv = CsvDoc::new(
        cfg,
        ov.seed,
        &["k1_cm_inv", "f_exact", "f_high_ka", "f_low_ka_photon"],
    );
    for &k1 in &grid {
        let exact = energy_gain::f_exact(k1, mass, a, tol)
            .with_context(|| format!("f_exact at k1 = {k1:e}"))?;
        csv.push_row(&[
            k1,
            exact,
            energy_gain::f_high_ka(k1, mass, a),
            energy_gain::f_low_ka_photon(k1, a),
        ]);
    }
    let k_lo = grid[0];
    let k_hi = grid[n - 1];
    let summary = vec![
        format!("energy-gain kernel f(k1), mass = {mass:e} cm^-1, a = {a:e} cm"),
        format!(
            "  f_exact({:e}) = {:e} (low-ka form {:e})",
            k_lo,
            energy_gain::f_exact(k_lo, mass, a, tol)?,
            energy_gain::f_low_ka_photon(k_lo, a)
        ),
        format!(
            "  f_exact({:e}) = {:e} (high-ka form {:e})",
            k_hi,
            energy_gain::f_exact(k_hi, mass, a, tol)?,
            energy_gain::f_high_ka(k_hi, mass, a)
        ),
    ];
    Ok(RunOutput { csv, summary, flags: Vec::new() })
}

fn spectrum_csv(
    cfg: &ScenarioConfig,
    ov: &Overrides,
    spec: &LaserPulseSpec,
    params: &CollapseParams,
    t: f64,
) -> Result<CsvDoc> {
    // the grid must cover both the soft halo (~1/a) and the elastic peak
    // near k0 (which sits far above 1/a in the high-k0a regime)
    let a = params.a;
    let lo = (1e-3 / a).min((spec.k0 - 5.0 / a).max(1e-2 / a));
    let hi = (10.0 / a).max(1.01 * (spec.k0 + 5.0 / a));
    let n = cfg.num("n_points", 512.0) as usize;
    let grid = laser::log_grid(lo, hi, n);
    let s = laser::excitation_density(&grid, spec, params, t)?;
    let mut csv = CsvDoc::new(cfg, ov.seed, &["k_cm_inv", "P_per_d3k", "cumulative_fraction"]);
    for i in 0..s.k.len() {
        csv.push_row(&[s.k[i], s.p[i], s.cumulative_fraction[i]]);
    }
    Ok(csv)
}

fn laser_loss_run(cfg: &ScenarioConfig, ov: &Overrides) -> Result<RunOutput> {
    let params = collapse_params(cfg)?;
    let spec = pulse_spec(cfg)?;
    let t = cfg.req("t_s");
    let result = laser::mean_photons(&spec, &params, t, regime(cfg)?)?;
    let mut flags: Vec<String> = spec.warnings(&params);
    if !result.within_first_order {
        flags.push(format!(
            "loss fraction {:e} exceeds first-order validity",
            result.loss_fraction
        ));
    }
    let summary = vec![
        format!(
            "laser-loss: k0 = {:e} cm^-1, sigma = {:e} cm, n0 = {:e}",
            spec.k0, spec.sigma, spec.n_mean0
        ),
        format!(
            "  loss_coefficient_low = {:e}, loss_coefficient_high = {:e}",
            laser::loss_coefficient_low(&spec, &params),
            laser::loss_coefficient_high(&spec, &params)
        ),
        format!(
            "  regime {}: loss_coefficient = {:e}, loss_fraction = {:e}",
            result.regime, result.loss_coefficient, result.loss_fraction
        ),
        format!(
            "  n_mean(t = {:e} s) = {:e}, within_first_order = {}",
            t, result.n_mean_t, result.within_first_order
        ),
    ];
    let csv = spectrum_csv(cfg, ov, &spec, &params, t)?;
    Ok(RunOutput { csv, summary, flags })
}

fn excitation_run(cfg: &ScenarioConfig, ov: &Overrides) -> Result<RunOutput> {
    let params = collapse_params(cfg)?;
    let spec = pulse_spec(cfg)?;
    let t = cfg.req("t_s");
    let rate = laser::total_excitation_rate(&spec, &params);
    let expected = laser::expected_anomalous_photons(&spec, &params, t);
    let flags = spec.warnings(&params);
    let summary = vec![
        format!(
            "excitation: k0 = {:e} cm^-1, sigma = {:e} cm, n0 = {:e}",
            spec.k0, spec.sigma, spec.n_mean0
        ),
        format!("  total_excitation_rate (per photon) = {rate:e} s^-1"),
        format!("  expected_anomalous_photons over t = {t:e} s: {expected:e}"),
    ];
    let csv = spectrum_csv(cfg, ov, &spec, &params, t)?;
    Ok(RunOutput { csv, summary, flags })
}

fn cosmology_run(cfg: &ScenarioConfig, ov: &Overrides) -> Result<RunOutput> {
    let params = collapse_params(cfg)?;
    let defaults = CosmologyScenario::with_params(params.clone());
    let scenario = CosmologyScenario::new(
        cfg.num("temp0_k", defaults.temp0_k),
        cfg.num("t0_s", defaults.t0),
        cfg.num("z0", defaults.z0),
        cfg.num("delta", defaults.delta),
        params,
    )?;
    let grid = laser::log_grid(
        cfg.num("lambda_min_cm", 0.05),
        cfg.num("lambda_max_cm", 50.0),
        cfg.num("n_points", 200.0) as usize,
    );
    let points = cosmology::distorted_spectrum(&grid, &scenario)?;
    let mut csv = CsvDoc::new(
        cfg,
        ov.seed,
        &[
            "lambda0_cm",
            "planck_occupancy",
            "distorted_occupancy",
            "fractional_loss",
            "validity_flag",
        ],
    );
    let mut invalid_rows = 0usize;
    for p in &points {
        if !p.valid {
            invalid_rows += 1;
        }
        csv.push_row_raw(vec![
            fmt_num(p.lambda0_cm),
            fmt_num(p.planck_occupancy),
            fmt_num(p.distorted_occupancy),
            fmt_num(p.fractional_loss),
            (p.valid as u8).to_string(),
        ]);
    }
    let verdict = match cosmology::temperature_degeneracy(1.0, &scenario)? {
        DegeneracyVerdict::Bound { lambda_max } => {
            format!("distortion distinguishable; lambda bound {lambda_max:e}")
        }
        DegeneracyVerdict::Degenerate { .. } => "degenerate with a temperature shift".into(),
    };
    let mut flags = Vec::new();
    if invalid_rows > 0 {
        flags.push(format!(
            "{invalid_rows} of {} spectrum rows outside approximation validity",
            points.len()
        ));
    }
    let summary = vec![
        format!(
            "cosmology: T0 = {} K, t0 = {:e} s, Z0 = {}, delta = {:e}",
            scenario.temp0_k, scenario.t0, scenario.z0, scenario.delta
        ),
        format!(
            "  fractional_loss(0.1 cm) = {:e}",
            cosmology::fractional_loss(0.1, &scenario)?
        ),
        format!(
            "  loss/gain at thermal peak = {:e}",
            cosmology::loss_gain_ratio_at_peak(&scenario)?
        ),
        format!("  at lambda0 = 1 cm: {verdict}"),
    ];
    Ok(RunOutput { csv, summary, flags })
}

fn superposition_run(cfg: &ScenarioConfig, ov: &Overrides) -> Result<RunOutput> {
    let params = collapse_params(cfg)?;
    let spec = SuperpositionSpec::new(
        cfg.req("n_photons"),
        cfg.req("sigma_cm"),
        cfg.req("k0_cm_inv"),
        cfg.num("mass_cm_inv", 0.0),
        cfg.req("d_cm"),
    )?;
    let mut flags = spec.validate(&params)?;
    let t_end = cfg.req("t_s");
    let n = cfg.num("n_points", 50.0) as usize;
    let mut csv = CsvDoc::new(cfg, ov.seed, &["t_s", "offdiag"]);
    let mut last = None;
    for i in 0..n.max(2) {
        let t = t_end * i as f64 / (n.max(2) - 1) as f64;
        let d = superposition::offdiag_decay(&spec, &params, t)?;
        csv.push_row(&[t, d.offdiag]);
        last = Some(d);
    }
    let d = last.ok_or_else(|| anyhow!("empty time grid"))?;
    if !d.within_first_order {
        flags.push("first-order decay exceeded 1/2 before t_s".into());
    }
    let mut summary = vec![
        format!(
            "superposition: N = {}, sigma = {:e} cm, k0 = {:e} cm^-1, d = {:e} cm",
            spec.n, spec.sigma, spec.k0, spec.d
        ),
        format!("  I1 = {:e}, I2 = {:e}, I3 = {:e}", d.i1, d.i2, d.i3),
        format!("  enhancement bracket = {:e}", d.bracket),
        format!(
            "  offdiag(t = {:e} s) = {:e}, within_first_order = {}",
            t_end, d.offdiag, d.within_first_order
        ),
    ];
    // optional Monte-Carlo cross-check of the overlap integrals
    if let Some(samples) = ov.samples {
        let (i1, i2, i3) =
            superposition::integrals_oracle(&spec, &params, samples, ov.seed)?;
        summary.push(format!(
            "  oracle ({samples} samples): I1 = {:e} +- {:e}, I2 = {:e} +- {:e}, I3 = {:e} +- {:e}",
            i1.value, i1.error_estimate, i2.value, i2.error_estimate, i3.value, i3.error_estimate
        ));
    }
    Ok(RunOutput { csv, summary, flags })
}

fn parse_triples(s: &str) -> Result<Vec<[i64; 3]>> {
    s.split(';')
        .map(|m| {
            let parts: Vec<i64> = m
                .split(',')
                .map(|p| p.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .with_context(|| format!("bad mode triple \"{m}\""))?;
            if parts.len() != 3 {
                bail!("mode \"{m}\" must have 3 integer components");
            }
            Ok([parts[0], parts[1], parts[2]])
        })
        .collect()
}

fn parse_occ(s: &str, modes: usize) -> Result<Vec<usize>> {
    let occ: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad occupation list \"{s}\""))?;
    if occ.len() != modes {
        bail!("occupation list \"{s}\" must have {modes} entries");
    }
    Ok(occ)
}

fn fock_sim_run(cfg: &ScenarioConfig, ov: &Overrides) -> Result<RunOutput> {
    let params = collapse_params(cfg)?;
    let momenta = parse_triples(cfg.str_opt("modes").unwrap())?;
    let n_modes = momenta.len();
    let grid = ModeGrid::new(momenta, cfg.req("l_box_cm"), cfg.num("mass_cm_inv", 0.0))?;
    let model = FockModel::new(grid, cfg.req("n_max") as usize, &params)?;
    let initial = cfg.str_opt("initial").unwrap();
    let state = match initial.split_once('|') {
        Some((a, b)) => DensityState::superposed_number(
            &model,
            &parse_occ(a, n_modes)?,
            &parse_occ(b, n_modes)?,
        )?,
        None => DensityState::number_state(&model, &parse_occ(initial, n_modes)?)?,
    };
    let t = cfg.req("t_s");
    let auto_steps = (model.generator_norm_bound() * t / 0.05).ceil().max(1.0) as usize;
    let steps = (cfg.num("steps", 0.0) as usize).max(auto_steps);
    let record_every = (cfg.num("record_every", 0.0) as usize).max(1).min(steps);
    let traj = fock::evolve_trajectory(&state, &model, t, steps, record_every)?;
    let mut csv = CsvDoc::new(
        cfg,
        ov.seed,
        &["t_s", "trace", "total_number", "energy_cm_inv", "max_coherence", "top_layer"],
    );
    let mut top_layer_max = 0.0f64;
    for (tt, st) in &traj {
        let o = fock::observables(st, &model);
        top_layer_max = top_layer_max.max(o.top_layer);
        csv.push_row(&[*tt, o.trace, o.total_number, o.energy, o.max_coherence, o.top_layer]);
    }
    let (t_last, last) = traj.last().ok_or_else(|| anyhow!("empty trajectory"))?;
    let o = fock::observables(last, &model);
    let mut flags = Vec::new();
    if top_layer_max > 1e-6 {
        flags.push(format!(
            "truncation sentinel: top-layer probability reached {top_layer_max:e} (> 1e-6)"
        ));
    }
    let summary = vec![
        format!(
            "fock-sim: {} modes, n_max = {}, dim = {}, steps = {steps}",
            n_modes, model.n_max, model.dim
        ),
        format!(
            "  at t = {:e} s: trace = {:.12}, N = {:.12}, E = {:e} cm^-1",
            t_last, o.trace, o.total_number, o.energy
        ),
        format!(
            "  max_coherence = {:e}, top_layer = {:e}",
            o.max_coherence, o.top_layer
        ),
    ];
    Ok(RunOutput { csv, summary, flags })
}
