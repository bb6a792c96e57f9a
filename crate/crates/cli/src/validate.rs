//! The `validate` subcommand: a fast oracle suite cross-checking the
//! closed-form evaluators against the independent quadrature / Monte-Carlo
//! engine, one printed pass/fail line per check.

use std::f64::consts::PI;

use anyhow::Result;

use collapse_photons::cosmology::{self, CosmologyScenario};
use collapse_photons::energy_gain;
use collapse_photons::fock::{self, DensityState, FockModel, ModeGrid};
use collapse_photons::laser::{self, LaserPulseSpec};
use collapse_photons::quadrature::{self, GaussianWeight3D};
use collapse_photons::superposition::{self, bessel, SuperpositionSpec};
use collapse_photons::units::{CollapseParams, PhysicalConstants};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Runs the suite; returns the checks in execution order.
pub fn run_suite(seed: u64, samples: u64, tol: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let push = |name: &'static str, passed: bool, detail: String, out: &mut Vec<Check>| {
        out.push(Check { name, passed, detail });
    };

    // energy-gain kernel against its closed-form limits
    {
        let a = 1.0;
        let exact = energy_gain::f_exact(20.0, 0.0, a, tol)?;
        let high = energy_gain::f_high_ka(20.0, 0.0, a);
        push(
            "energy-gain: quadrature vs high-ka form at k1 a = 20 (0.5%)",
            rel(exact, high) <= 5e-3,
            format!("dev {:.2e}", rel(exact, high)),
            &mut checks,
        );
        let exact_low = energy_gain::f_exact(0.02, 0.0, a, tol)?;
        let low = energy_gain::f_low_ka_photon(0.02, a);
        push(
            "energy-gain: quadrature vs low-ka form at k1 a = 0.02 (2%)",
            rel(exact_low, low) <= 2e-2,
            format!("dev {:.2e}", rel(exact_low, low)),
            &mut checks,
        );
        let w = GaussianWeight3D::on_axis(3.0, 0.7)?;
        let quad =
            quadrature::integrate_gaussian_3d(|k| quadrature::norm2(k) - 9.0, &w, 1e-10)?.value;
        let closed = PI.powf(1.5) / 0.7f64.powi(3) * 3.0 / (2.0 * 0.49);
        push(
            "energy-gain: quadratic-moment quadrature vs closed form (1e-6)",
            rel(quad, closed) <= 1e-6,
            format!("dev {:.2e}", rel(quad, closed)),
            &mut checks,
        );
    }

    // laser bookkeeping
    {
        let spec = LaserPulseSpec::from_wavelength(1e-4, 1.0, 5e16)?;
        let params = CollapseParams::with_constants(
            1.0,
            1e-5,
            PhysicalConstants::with_lambdabar_n(2.0e-14)?,
        )?;
        let t = 1e-6;
        let resid = laser::trace_check(&spec, &params, t)?.abs();
        let loss = laser::loss_coefficient_low(&spec, &params) * params.lambda_rate * t;
        push(
            "laser: two-path trace bookkeeping (1e-3 of first-order loss)",
            resid / loss <= 1e-3,
            format!("relative residual {:.2e}", resid / loss),
            &mut checks,
        );
        let en = laser::energy_balance_check(&spec, &params, t)?;
        push(
            "laser: two-path energy balance (1e-6 relative)",
            en <= 1e-6,
            format!("mismatch {en:.2e}"),
            &mut checks,
        );
    }

    // quartic overlap vs constrained Monte Carlo
    {
        let (sigma, a, k0) = (1.0, 0.01, 5.0);
        let env = GaussianWeight3D::on_axis(k0, sigma / std::f64::consts::SQRT_2)?;
        let envs = [env, env, env, env];
        let na = 1.0 / (PI / (sigma * sigma)).powf(0.75);
        let alpha = move |k: [f64; 3]| {
            let d = quadrature::sub(k, [0.0, 0.0, k0]);
            na * (-quadrature::norm2(d) * sigma * sigma / 2.0).exp()
        };
        let g = move |k1: [f64; 3], k2: [f64; 3], k3: [f64; 3], k4: [f64; 3]| {
            let kern = (-quadrature::norm2(quadrature::sub(k1, k2)) * a * a).exp();
            k0 * k0 * alpha(k1) * alpha(k2) * alpha(k3) * alpha(k4) * kern
        };
        let mc = quadrature::integrate_constrained_4k(g, &envs, samples, seed)?;
        let b4 = laser::quartic_overlap(k0, sigma, a)?.value;
        push(
            "laser: quartic overlap vs constrained Monte Carlo (3 SE)",
            (mc.value - b4).abs() <= 3.0 * mc.error_estimate,
            format!("MC {:.4e} +- {:.1e} vs {:.4e}", mc.value, mc.error_estimate, b4),
            &mut checks,
        );
    }

    // superposition integrals vs Monte Carlo
    {
        let params = CollapseParams::new(1.0, 1.0)?;
        let spec = SuperpositionSpec::new(10.0, 20.0, 10.0, 0.0, 0.0)?;
        let (i1, i2, i3) = superposition::integrals_oracle(&spec, &params, samples, seed)?;
        let (c1, c2, c3) = superposition::integrals_closed(&spec, &params);
        let ok = (i1.value - c1).abs() <= (3.0 * i1.error_estimate).max(0.05 * c1)
            && (i2.value - c2).abs() <= (3.0 * i2.error_estimate).max(0.05 * c2)
            && (i3.value - c3).abs() <= (3.0 * i3.error_estimate).max(0.05 * c3);
        push(
            "superposition: I1, I2, I3 closed forms vs Monte Carlo (max of 3 SE, 5%)",
            ok,
            format!(
                "I1 {:.3e}/{:.3e}, I2 {:.3e}/{:.3e}, I3 {:.3e}/{:.3e}",
                i1.value, c1, i2.value, c2, i3.value, c3
            ),
            &mut checks,
        );
    }

    // Bessel backbone against frozen references
    {
        let (k0, k1) = bessel::bessel_k0_k1(1.0)?;
        let ok = (k0 - 0.421_024_438_240_708_33).abs() <= 1e-10
            && (k1 - 0.601_907_230_197_234_57).abs() <= 1e-10;
        push(
            "superposition: K0, K1 at x = 1 vs reference (1e-10)",
            ok,
            format!("K0 = {k0:.12}, K1 = {k1:.12}"),
            &mut checks,
        );
        let ratio = superposition::commutator_kernel(10.0, 1.0)?
            / superposition::commutator_kernel_asymptotic(10.0, 1.0)?;
        push(
            "superposition: commutator kernel vs asymptote at M r = 10 (10%)",
            (ratio - 1.0).abs() <= 0.10,
            format!("ratio {ratio:.4}"),
            &mut checks,
        );
    }

    // cosmology loss dominance
    {
        let s = CosmologyScenario::with_params(CollapseParams::new(1.0, 1e-5)?);
        let ratio = cosmology::loss_gain_ratio_at_peak(&s)?;
        push(
            "cosmology: loss/gain ratio at thermal peak in [1e14, 1e15]",
            (1e14..1e15).contains(&ratio),
            format!("ratio {ratio:.3e}"),
            &mut checks,
        );
        let resid = cosmology::number_conservation_residual(1.0, 0.5)?;
        push(
            "cosmology: exact-kernel photon-number conservation (1e-6 relative)",
            resid <= 1e-6,
            format!("relative residual {resid:.2e}"),
            &mut checks,
        );
    }

    // Fock integration invariants
    {
        let params = CollapseParams::new(1.0e24, 0.12)?;
        let grid = ModeGrid::new(vec![[0, 0, 1], [0, 0, 2]], 1.0, 0.0)?;
        let model = FockModel::new(grid, 3, &params)?;
        let state = DensityState::number_state(&model, &[2, 0])?;
        let t = 1.0 / model.generator_norm_bound();
        let end = fock::evolve(&state, &model, t, 400)?;
        let o = fock::observables(&end, &model);
        let ok = (o.trace - 1.0).abs() <= 1e-8 && (o.total_number - 2.0).abs() <= 1e-8;
        push(
            "fock: trace and photon-number drift over ||generator|| t = 1 (1e-8)",
            ok,
            format!(
                "trace drift {:.1e}, number drift {:.1e}",
                (o.trace - 1.0).abs(),
                (o.total_number - 2.0).abs()
            ),
            &mut checks,
        );
    }

    Ok(checks)
}
