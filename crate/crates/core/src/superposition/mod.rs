//! Decay of a macroscopic two-place superposition of N photons, and the
//! spacelike commutator kernel of the smeared energy density.
//!
//! For N photons in identical wavepackets superposed between locations x_L
//! and x_R (separation d), the off-diagonal density-matrix element decays
//! at first order as
//!
//!   <L|rho(t)|R> = 1/2 - (N lambda t w^2(k0) / 2 M_N^2)
//!                    [ N (a/sigma)^3 (1 - e^{-d^2/4 sigma^2}) + 1 ],
//!
//! the relativistic analogue of the mass-density result with M^2 replaced
//! by w^2(k0). The three overlap integrals I1, I2, I3 behind the bracket
//! have Gaussian closed forms, cross-checked here by constrained Monte
//! Carlo over the pre-approximation integrands.

pub mod bessel;

use crate::error::{Error, Result};
use crate::quadrature::{self, GaussianWeight3D, IntegrationResult};
use crate::units::CollapseParams;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::f64::consts::PI;

/// N-photon two-place superposition parameters.
#[derive(Debug, Clone, Copy)]
pub struct SuperpositionSpec {
    /// Photon count N.
    pub n: f64,
    /// Wavepacket width sigma (cm).
    pub sigma: f64,
    /// Central wavenumber (cm^-1).
    pub k0: f64,
    /// Mass as a wavenumber (cm^-1); 0 for photons.
    pub mass: f64,
    /// Separation |x_L - x_R| (cm).
    pub d: f64,
}

impl SuperpositionSpec {
    pub fn new(n: f64, sigma: f64, k0: f64, mass: f64, d: f64) -> Result<Self> {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::Domain(format!("N must be >= 1, got {n}")));
        }
        if !(sigma > 0.0) || !(k0 > 0.0) || !(mass >= 0.0) || !(d >= 0.0) {
            return Err(Error::Domain(format!(
                "need sigma > 0, k0 > 0, M >= 0, d >= 0; got {sigma}, {k0}, {mass}, {d}"
            )));
        }
        Ok(Self {
            n,
            sigma,
            k0,
            mass,
            d,
        })
    }

    /// Enforces the regime k0 a > 3 and sigma > 3a; returns warnings when
    /// the assumed wavepacket orthogonality e^{-N d^2/8 sigma^2} is poor.
    pub fn validate(&self, params: &CollapseParams) -> Result<Vec<String>> {
        let a = params.a;
        if self.k0 * a <= 3.0 {
            return Err(Error::Domain(format!(
                "requires k0 a >> 1 (enforced k0 a > 3), got {:.3}",
                self.k0 * a
            )));
        }
        if self.sigma <= 3.0 * a {
            return Err(Error::Domain(format!(
                "requires sigma >> a (enforced sigma > 3a), got sigma/a = {:.3}",
                self.sigma / a
            )));
        }
        let mut warnings = Vec::new();
        let overlap = (-self.n * self.d * self.d / (8.0 * self.sigma * self.sigma)).exp();
        if overlap > 1e-6 {
            warnings.push(format!(
                "wavepacket orthogonality is poor: e^{{-N d^2/8 sigma^2}} = {overlap:.3e}"
            ));
        }
        Ok(warnings)
    }

    /// w^2(k0) = k0^2 + M^2.
    pub fn omega2(&self) -> f64 {
        self.k0 * self.k0 + self.mass * self.mass
    }
}

/// Off-diagonal decay with its component pieces.
#[derive(Debug, Clone, Copy)]
pub struct DecayResult {
    /// <L|rho(t)|R>.
    pub offdiag: f64,
    /// The enhancement bracket N (a/sigma)^3 (1 - e^{-d^2/4 sigma^2}) + 1.
    pub bracket: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// False once the first-order decay reaches 1/2.
    pub within_first_order: bool,
}

/// Closed forms of the three overlap integrals:
/// I1 = w^2 (a/sigma)^3, I2 = w^2, I3 = I1 e^{-d^2/4 sigma^2}.
pub fn integrals_closed(spec: &SuperpositionSpec, params: &CollapseParams) -> (f64, f64, f64) {
    let w2 = spec.omega2();
    let r3 = (params.a / spec.sigma).powi(3);
    let i1 = w2 * r3;
    (i1, w2, i1 * (-spec.d * spec.d / (4.0 * spec.sigma * spec.sigma)).exp())
}

fn alpha(k: [f64; 3], k0: f64, sigma: f64) -> f64 {
    let d = quadrature::sub(k, [0.0, 0.0, k0]);
    (2.0 * sigma * sigma / PI).powf(0.75) * (-quadrature::norm2(d) * sigma * sigma).exp()
}

/// Monte-Carlo evaluation of the pre-approximation integrands, including
/// the full sqrt(w1 w2 w3 w4) factors the closed forms replace by w^2(k0),
/// and the cross-term phase cos((k1 - k2).d) for I3 (d perpendicular to
/// k0). Returns (I1, I2, I3) with standard errors.
pub fn integrals_oracle(
    spec: &SuperpositionSpec,
    params: &CollapseParams,
    samples: u64,
    seed: u64,
) -> Result<(IntegrationResult, IntegrationResult, IntegrationResult)> {
    spec.validate(params)?;
    let a = params.a;
    let sigma = spec.sigma;
    let k0 = spec.k0;
    let mass = spec.mass;
    let kernel_norm = (a * a / PI).powf(1.5);
    let env = GaussianWeight3D::on_axis(k0, sigma)?;
    let envs = [env, env, env, env];

    let sqrt_omegas = move |k1: [f64; 3], k2: [f64; 3], k3: [f64; 3], k4: [f64; 3]| {
        (omega4(k1, mass) * omega4(k2, mass) * omega4(k3, mass) * omega4(k4, mass)).sqrt()
    };
    let base = move |k1: [f64; 3], k2: [f64; 3], k3: [f64; 3], k4: [f64; 3]| {
        let q = quadrature::sub(k1, k2);
        sqrt_omegas(k1, k2, k3, k4)
            * alpha(k1, k0, sigma)
            * alpha(k2, k0, sigma)
            * alpha(k3, k0, sigma)
            * alpha(k4, k0, sigma)
            * kernel_norm
            * (-quadrature::norm2(q) * a * a).exp()
    };
    let i1 = quadrature::integrate_constrained_4k(base, &envs, samples, seed)?;
    let dvec = [spec.d, 0.0, 0.0];
    let i3 = quadrature::integrate_constrained_4k(
        move |k1, k2, k3, k4| {
            let q = quadrature::sub(k1, k2);
            base(k1, k2, k3, k4)
                * (q[0] * dvec[0] + q[1] * dvec[1] + q[2] * dvec[2]).cos()
        },
        &envs,
        samples,
        seed.wrapping_add(1),
    )?;
    let i2 = i2_oracle(spec, params, samples, seed.wrapping_add(2))?;
    Ok((i1, i2, i3))
}

fn omega4(k: [f64; 3], mass: f64) -> f64 {
    (quadrature::norm2(k) + mass * mass).sqrt()
}

/// I2 = int dk1 dk2 w1 w2 alpha^2(k1) W(k1 - k2): sample k1 from the
/// normalized density alpha^2 and k2 from the kernel Gaussian around k1,
/// leaving E[w1 w2] as the estimator.
fn i2_oracle(
    spec: &SuperpositionSpec,
    params: &CollapseParams,
    samples: u64,
    seed: u64,
) -> Result<IntegrationResult> {
    if samples < 100_000 {
        return Err(Error::Domain(format!(
            "I2 oracle needs >= 1e5 samples, got {samples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd1 = 1.0 / (2.0 * spec.sigma); // alpha^2 ~ e^{-2 D^2 sigma^2}
    let sd2 = 1.0 / (params.a * std::f64::consts::SQRT_2);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let mut k1 = [0.0, 0.0, spec.k0];
        let mut k2 = [0.0; 3];
        for i in 0..3 {
            k1[i] += sd1 * normal(&mut rng);
            k2[i] = k1[i] + sd2 * normal(&mut rng);
        }
        let v = omega4(k1, spec.mass) * omega4(k2, spec.mass);
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(IntegrationResult {
        value: mean,
        error_estimate: (var / n).sqrt(),
        evaluations: samples,
    })
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// First-order off-diagonal decay at time t.
pub fn offdiag_decay(
    spec: &SuperpositionSpec,
    params: &CollapseParams,
    t: f64,
) -> Result<DecayResult> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    let (i1, i2, i3) = integrals_closed(spec, params);
    let w2 = spec.omega2();
    let ratio3 = (params.a / spec.sigma).powi(3);
    let bracket =
        spec.n * ratio3 * (1.0 - (-spec.d * spec.d / (4.0 * spec.sigma * spec.sigma)).exp())
            + 1.0;
    let m_n = params.mass_ref();
    let decay =
        spec.n * params.lambda_rate * t * w2 / (2.0 * m_n * m_n) * bracket;
    Ok(DecayResult {
        offdiag: 0.5 - decay,
        bracket,
        i1,
        i2,
        i3,
        within_first_order: decay < 0.5,
    })
}

/// Exact spacelike commutator kernel of the smeared energy density,
///
///   -(M^2/(2 pi^2 r^2)) [K0(M r) + K1(M r)/(M r)],
///
/// negative everywhere (the operators fail to commute at spacelike
/// separation, with exponentially small violation beyond the Compton
/// wavelength 1/M). The massless limit diverges and is rejected.
pub fn commutator_kernel(r: f64, mass: f64) -> Result<f64> {
    if !(r > 0.0) || !(mass > 0.0) {
        return Err(Error::Domain(format!(
            "commutator kernel needs r > 0 and M > 0, got r = {r}, M = {mass}"
        )));
    }
    let x = mass * r;
    let (k0, k1) = bessel::bessel_k0_k1(x)?;
    Ok(-(mass * mass / (2.0 * PI * PI * r * r)) * (k0 + k1 / x))
}

/// Large-Mr asymptote -[(2 pi)^3 lambdabar_M^3 r^5]^{-1/2} e^{-r/lambdabar_M}
/// with lambdabar_M = 1/M.
pub fn commutator_kernel_asymptotic(r: f64, mass: f64) -> Result<f64> {
    if !(r > 0.0) || !(mass > 0.0) {
        return Err(Error::Domain(format!(
            "commutator kernel needs r > 0 and M > 0, got r = {r}, M = {mass}"
        )));
    }
    Ok(-(mass.powi(3) / ((2.0 * PI).powi(3) * r.powi(5))).sqrt() * (-mass * r).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params_a(a: f64) -> CollapseParams {
        CollapseParams::new(1.0, a).unwrap()
    }

    #[test]
    fn spec_guards_and_validation() {
        assert!(SuperpositionSpec::new(0.5, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(SuperpositionSpec::new(10.0, -1.0, 1.0, 0.0, 0.0).is_err());
        let p = params_a(1.0);
        // k0 a too small
        let s = SuperpositionSpec::new(10.0, 20.0, 2.0, 0.0, 100.0).unwrap();
        assert!(s.validate(&p).is_err());
        // sigma too small
        let s = SuperpositionSpec::new(10.0, 2.0, 10.0, 0.0, 100.0).unwrap();
        assert!(s.validate(&p).is_err());
        // fine, but poor orthogonality at d = 0
        let s = SuperpositionSpec::new(10.0, 20.0, 10.0, 0.0, 0.0).unwrap();
        assert!(!s.validate(&p).unwrap().is_empty());
        let s = SuperpositionSpec::new(10.0, 20.0, 10.0, 0.0, 500.0).unwrap();
        assert!(s.validate(&p).unwrap().is_empty());
    }

    #[test]
    fn closed_integrals_structure() {
        let p = params_a(1.0);
        let d0 = SuperpositionSpec::new(10.0, 20.0, 10.0, 0.0, 0.0).unwrap();
        let (i1, _i2, i3) = integrals_closed(&d0, &p);
        assert_eq!(i1, i3);
        // massless: all proportional to k0^2
        let s2 = SuperpositionSpec::new(10.0, 20.0, 20.0, 0.0, 0.0).unwrap();
        let (j1, j2, _) = integrals_closed(&s2, &p);
        assert_relative_eq!(j1 / i1, 4.0, epsilon = 1e-12);
        let (_, i2, _) = integrals_closed(&d0, &p);
        assert_relative_eq!(j2 / i2, 4.0, epsilon = 1e-12);
        // sigma = a degenerate case: I1 = I2 = w^2
        let deg = SuperpositionSpec::new(10.0, 1.0, 10.0, 0.0, 0.0).unwrap();
        let (e1, e2, _) = integrals_closed(&deg, &p);
        assert_relative_eq!(e1, deg.omega2(), epsilon = 1e-12);
        assert_relative_eq!(e2, deg.omega2(), epsilon = 1e-12);
    }

    #[test]
    fn i3_never_exceeds_i1() {
        let p = params_a(1.0);
        for d in [0.0, 1.0, 10.0, 100.0] {
            let s = SuperpositionSpec::new(10.0, 20.0, 10.0, 0.0, d).unwrap();
            let (i1, _, i3) = integrals_closed(&s, &p);
            if d == 0.0 {
                assert_eq!(i3, i1);
            } else {
                assert!(i3 < i1);
            }
        }
    }

    #[test]
    fn oracle_d_zero_ratio_one() {
        let p = params_a(1.0);
        let s = SuperpositionSpec::new(10.0, 20.0, 10.0, 0.0, 200.0).unwrap();
        // I3 at d = 0 equals I1: compare the two MC runs
        let s0 = SuperpositionSpec { d: 0.0, ..s };
        let (i1, _, i3) = integrals_oracle(&s0, &p, 400_000, 11).unwrap();
        let (c1, _, c3) = integrals_closed(&s0, &p);
        let tol1 = (3.0 * i1.error_estimate).max(0.05 * c1);
        assert!((i1.value - c1).abs() < tol1, "I1 {} vs {}", i1.value, c1);
        let tol3 = (3.0 * i3.error_estimate).max(0.05 * c3);
        assert!((i3.value - c3).abs() < tol3, "I3 {} vs {}", i3.value, c3);
    }

    #[test]
    fn oracle_d_four_sigma() {
        let p = params_a(1.0);
        let s = SuperpositionSpec::new(10.0, 20.0, 10.0, 0.0, 80.0).unwrap();
        let (i1, _, i3) = integrals_oracle(&s, &p, 600_000, 5).unwrap();
        let expect = (-4.0f64).exp();
        let ratio = i3.value / i1.value;
        let se = (i3.error_estimate / i1.value).abs()
            + (i1.error_estimate * i3.value / (i1.value * i1.value)).abs();
        assert!(
            (ratio - expect).abs() < (3.0 * se).max(0.05 * expect),
            "I3/I1 = {ratio} vs e^-4 = {expect} (se {se})"
        );
    }

    #[test]
    fn oracle_i2_matches_omega_squared() {
        let p = params_a(1.0);
        let s = SuperpositionSpec::new(10.0, 20.0, 10.0, 0.0, 200.0).unwrap();
        let (_, i2, _) = integrals_oracle(&s, &p, 400_000, 3).unwrap();
        assert_relative_eq!(i2.value, s.omega2(), max_relative = 0.05);
    }

    #[test]
    fn offdiag_basics() {
        let p = params_a(1.0);
        let s = SuperpositionSpec::new(100.0, 20.0, 10.0, 0.0, 200.0).unwrap();
        let r0 = offdiag_decay(&s, &p, 0.0).unwrap();
        assert_eq!(r0.offdiag, 0.5);
        assert!(r0.bracket >= 1.0);
        // large d: bracket -> N (a/sigma)^3 + 1
        let expect = 100.0 * (1.0f64 / 20.0).powi(3) + 1.0;
        assert_relative_eq!(r0.bracket, expect, max_relative = 1e-10);
        // first-order validity flag
        let deep = offdiag_decay(&s, &params_a(1.0), 1e30);
        assert!(!deep.unwrap().within_first_order);
    }

    #[test]
    fn relativistic_rate_replaces_mass_squared() {
        // at k0 = M the rate factor w^2 = 2 M^2
        let m = 10.0;
        let rel = SuperpositionSpec::new(10.0, 20.0, m, 0.0, 200.0).unwrap();
        let massive_like = SuperpositionSpec::new(10.0, 20.0, m, m, 200.0).unwrap();
        assert_relative_eq!(massive_like.omega2() / rel.omega2(), 2.0, epsilon = 1e-12);
        // lambda scaled up so the decay is representable against 1/2
        let p = CollapseParams::new(1e25, 1.0).unwrap();
        let r_rel = offdiag_decay(&rel, &p, 1e-6).unwrap();
        let r_m = offdiag_decay(&massive_like, &p, 1e-6).unwrap();
        assert_relative_eq!(
            (0.5 - r_m.offdiag) / (0.5 - r_rel.offdiag),
            2.0,
            max_relative = 1e-10
        );
    }

    #[test]
    fn offdiag_monotone_in_t_d_n_k0() {
        // lambda scaled up so decay differences are representable
        let p = CollapseParams::new(1e25, 1.0).unwrap();
        let base = SuperpositionSpec::new(100.0, 20.0, 10.0, 0.0, 40.0).unwrap();
        let at = |s: &SuperpositionSpec, t: f64| offdiag_decay(s, &p, t).unwrap().offdiag;
        assert!(at(&base, 2e-6) < at(&base, 1e-6));
        let more_d = SuperpositionSpec { d: 80.0, ..base };
        assert!(at(&more_d, 1e-6) < at(&base, 1e-6));
        let more_n = SuperpositionSpec { n: 200.0, ..base };
        assert!(at(&more_n, 1e-6) < at(&base, 1e-6));
        let more_k = SuperpositionSpec { k0: 20.0, ..base };
        assert!(at(&more_k, 1e-6) < at(&base, 1e-6));
    }

    #[test]
    fn kernel_matches_asymptote() {
        let m = 1.0;
        let exact10 = commutator_kernel(10.0, m).unwrap();
        let asym10 = commutator_kernel_asymptotic(10.0, m).unwrap();
        assert_relative_eq!(exact10 / asym10, 1.0, max_relative = 0.10);
        let exact50 = commutator_kernel(50.0, m).unwrap();
        let asym50 = commutator_kernel_asymptotic(50.0, m).unwrap();
        assert_relative_eq!(exact50 / asym50, 1.0, max_relative = 0.02);
        // error shrinks with Mr
        assert!(
            (exact50 / asym50 - 1.0).abs() < (exact10 / asym10 - 1.0).abs()
        );
    }

    #[test]
    fn kernel_negative_and_decaying() {
        let m = 2.0;
        let mut prev = f64::NEG_INFINITY;
        for r in [0.6, 1.0, 2.0, 5.0, 10.0] {
            let v = commutator_kernel(r, m).unwrap();
            assert!(v < 0.0);
            assert!(v > prev, "|kernel| not decreasing at r = {r}");
            prev = v;
        }
        assert!(commutator_kernel(1.0, 0.0).is_err());
        assert!(commutator_kernel(0.0, 1.0).is_err());
    }

    #[test]
    fn kernel_matches_regulated_quadrature_oracle() {
        // J(eps) = (1/2 pi^2 r) int k sqrt(k^2+M^2) sin(kr) e^{-eps k} dk,
        // Neville-extrapolated to eps -> 0, against the Bessel closed form
        let (r, m) = (1.0, 1.0);
        let eps_list = [0.8, 0.4, 0.2, 0.1, 0.05];
        let mut vals: Vec<f64> = eps_list
            .iter()
            .map(|&eps| {
                let cut = 80.0 / eps;
                quadrature::integrate_radial(
                    |k| {
                        k * (k * k + m * m).sqrt() * (k * r).sin() * (-eps * k).exp()
                            / (2.0 * PI * PI * r)
                    },
                    0.0,
                    cut,
                    1e-10,
                )
                .unwrap()
                .value
            })
            .collect();
        // Neville tableau at eps = 0
        let n = eps_list.len();
        for level in 1..n {
            for i in 0..n - level {
                let (e0, e1) = (eps_list[i], eps_list[i + level]);
                vals[i] = (e0 * vals[i + 1] - e1 * vals[i]) / (e0 - e1);
            }
        }
        let oracle = vals[0];
        // The regulated transform converges to -(M^2/2 pi^2 r^2)
        // [K0 + 2 K1/(M r)] = -M^2 K2(M r)/(2 pi^2 r^2): applying
        // (-nabla^2 + M^2) to the standard transform M K1(M r)/(2 pi^2 r)
        // of 1/sqrt(k^2 + M^2) doubles the K1/x coefficient relative to
        // the published closed form, which this artifact reproduces
        // verbatim. The two are documented here side by side; the
        // acceptance gate carries the (failing) published-form comparison.
        let (k0, k1) = bessel::bessel_k0_k1(m * r).unwrap();
        let transform = -(m * m / (2.0 * PI * PI * r * r)) * (k0 + 2.0 * k1 / (m * r));
        assert_relative_eq!(transform, oracle, max_relative = 0.01);
        let exact = commutator_kernel(r, m).unwrap();
        assert_relative_eq!(exact, -0.051_822_3, max_relative = 1e-4);
        // the published form sits ~37% below the transform at M r = 1
        assert_relative_eq!(exact / transform, 0.6296, max_relative = 1e-3);
    }
}
