use log::warn;

use super::rhs::{nsv_rhs, pressure_poisson};
use super::{stiffest_rate, Sample, SolverConfig, SolverState, Trajectory};
use crate::error::{Error, Result};
use crate::initial::project_initial;
use crate::spectral::{SpectralVector, SpectralVelocity};

// Real-axis extent of the classical RK4 stability region.
const RK4_REAL_STABILITY: f64 = 2.785;

/// Step count and uniform step for a run. The count is the smallest multiple
/// of `2 * sample_every` covering `t_final` with steps no larger than the
/// requested `dt`, so the sample count is odd (composite Simpson).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPlan {
    pub steps: usize,
    pub dt: f64,
}

impl StepPlan {
    pub fn for_config(config: &SolverConfig) -> Self {
        let block = 2 * config.sample_every;
        let raw = (config.t_final / config.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let steps = raw.div_ceil(block) * block;
        Self {
            steps,
            dt: config.t_final / steps as f64,
        }
    }
}

fn check_finite(u: &SpectralVelocity, t: f64) -> Result<()> {
    for (k, d) in u.lattice().modes().iter().zip(u.coeffs()) {
        if d.iter().any(|z| !z.is_finite()) {
            return Err(Error::BlowUp { t, mode: *k });
        }
    }
    Ok(())
}

fn rk4_from(
    state: &SolverState,
    k1: &SpectralVector,
    dt: f64,
    rhs: &impl Fn(&SpectralVector) -> SpectralVector,
) -> Result<SolverState> {
    let u = &state.u;
    let mut stage = u.clone();
    stage.axpy(0.5 * dt, k1);
    let k2 = rhs(&stage);
    let mut stage = u.clone();
    stage.axpy(0.5 * dt, &k2);
    let k3 = rhs(&stage);
    let mut stage = u.clone();
    stage.axpy(dt, &k3);
    let k4 = rhs(&stage);

    let mut next = u.clone();
    next.axpy(dt / 6.0, k1);
    next.axpy(dt / 3.0, &k2);
    next.axpy(dt / 3.0, &k3);
    next.axpy(dt / 6.0, &k4);
    next.symmetrize();
    let t = state.t + dt;
    check_finite(&next, t)?;
    Ok(SolverState {
        t,
        u: next,
        alpha: state.alpha,
    })
}

/// One classical RK4 step of the NSV Galerkin system.
pub fn step(state: &SolverState, dt: f64) -> Result<SolverState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let alpha = state.alpha;
    let rhs = |u: &SpectralVector| nsv_rhs(u, alpha);
    let k1 = rhs(&state.u);
    rk4_from(state, &k1, dt, &rhs)
}

/// Integrates from `P_n u0` at `t = 0` to `t_final`, storing a sample every
/// `sample_every` steps.
pub fn integrate(config: &SolverConfig, u0: &SpectralVelocity) -> Result<Trajectory> {
    let alpha = config.alpha;
    integrate_with(config, u0, move |u| nsv_rhs(u, alpha))
}

/// [`integrate`] with a caller-supplied right-hand side.
pub fn integrate_with(
    config: &SolverConfig,
    u0: &SpectralVelocity,
    rhs: impl Fn(&SpectralVector) -> SpectralVector,
) -> Result<Trajectory> {
    config.validate()?;
    u0.validate()?;
    let plan = StepPlan::for_config(config);
    let stiff = stiffest_rate(config.n, config.alpha);
    if config.alpha == 0.0 && plan.dt > 2.8 / (config.n * config.n) as f64 {
        warn!(
            "dt = {} exceeds the explicit stability bound 2.8/n^2 = {} for alpha = 0",
            plan.dt,
            2.8 / (config.n * config.n) as f64
        );
    } else if plan.dt * stiff > RK4_REAL_STABILITY {
        warn!(
            "dt = {} times the stiffest rate {} leaves the RK4 stability region",
            plan.dt, stiff
        );
    }

    let mut u = project_initial(u0, config.n)?;
    u.symmetrize();
    let mut state = SolverState::new(0.0, u, config.alpha)?;
    let mut samples = Vec::with_capacity(plan.steps / config.sample_every + 1);
    let make_sample = |state: &SolverState, k1: &SpectralVector| Sample {
        state: state.clone(),
        rhs: k1.clone(),
        pressure: config.store_pressure.then(|| pressure_poisson(&state.u)),
    };

    let mut k1 = rhs(&state.u);
    samples.push(make_sample(&state, &k1));
    for s in 1..=plan.steps {
        state = rk4_from(&state, &k1, plan.dt, &rhs)?;
        if s == plan.steps {
            // land exactly on t_final
            state.t = config.t_final;
        } else {
            state.t = s as f64 * plan.dt;
        }
        k1 = rhs(&state.u);
        if s % config.sample_every == 0 {
            samples.push(make_sample(&state, &k1));
        }
    }
    Ok(Trajectory {
        config: config.clone(),
        dt: plan.dt,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::galerkin_nse_rhs;
    use crate::initial::{random_solenoidal, taylor_green, SpectrumSpec};

    #[test]
    fn plan_gives_odd_sample_count() {
        for (t, dt, every) in [
            (1.0, 1e-3, 1),
            (0.5, 0.03, 3),
            (0.7, 0.01, 4),
            (1.0, 2.0, 1),
        ] {
            let cfg = SolverConfig::new(4, 0.1, t)
                .with_dt(dt)
                .with_sample_every(every);
            let plan = StepPlan::for_config(&cfg);
            assert!(plan.dt <= dt * (1.0 + 1e-12));
            assert_eq!(plan.steps % (2 * every), 0);
            assert_eq!((plan.steps / every + 1) % 2, 1);
        }
        let plan = StepPlan::for_config(&SolverConfig::new(4, 0.0, 1.0).with_dt(1e-3));
        assert_eq!(plan.steps, 1000);
    }

    #[test]
    fn zero_field_is_fixed_point() {
        let l = crate::spectral::Lattice::shared(3).unwrap();
        let s = SolverState::new(0.0, SpectralVector::zeros(l), 0.3).unwrap();
        let next = step(&s, 0.01).unwrap();
        assert_eq!(next.u.max_abs(), 0.0);
        assert!((next.t - 0.01).abs() < 1e-16);
    }

    #[test]
    fn taylor_green_single_step() {
        let u = taylor_green(1.0, 4).unwrap();
        let s = SolverState::new(0.0, u.clone(), 0.5).unwrap();
        let dt = 1e-3;
        let next = step(&s, dt).unwrap();
        let exact = u.scaled((-2.0 * dt / 1.5).exp());
        assert!(next.u.max_abs_diff(&exact) < 1e-15);
    }

    #[test]
    fn one_step_error_is_fifth_order() {
        // RK4 amplification error for y' = -λy is λ^5 dt^5 / 120 + O(dt^6)
        let u = taylor_green(1.0, 2).unwrap();
        let alpha = 0.0;
        let lambda: f64 = 2.0;
        let err = |dt: f64| {
            let s = SolverState::new(0.0, u.clone(), alpha).unwrap();
            let next = step(&s, dt).unwrap();
            next.u.max_abs_diff(&u.scaled((-lambda * dt).exp()))
        };
        let (e1, e2) = (err(0.1), err(0.05));
        let ratio = e1 / e2;
        assert!((ratio - 32.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn blow_up_is_reported() {
        let l = crate::spectral::Lattice::shared(2).unwrap();
        let mut u = SpectralVector::zeros(l);
        u.coeffs_mut()[0][0] = num_complex::Complex64::new(f64::NAN, 0.0);
        let s = SolverState::new(0.0, u, 0.0).unwrap();
        assert!(matches!(step(&s, 0.01), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn zero_alpha_matches_unit_voigt_factor_bitwise() {
        let u0 = random_solenoidal(&SpectrumSpec::default(), 3, 4).unwrap();
        let cfg = SolverConfig::new(4, 0.0, 0.05)
            .with_dt(2e-3)
            .with_pressure(false);
        let a = integrate(&cfg, &u0).unwrap();
        let b = integrate_with(&cfg, &u0, galerkin_nse_rhs).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.u().coeffs(), y.u().coeffs());
            assert_eq!(x.rhs.coeffs(), y.rhs.coeffs());
        }
    }

    #[test]
    fn samples_carry_rhs_and_pressure() {
        let u0 = random_solenoidal(&SpectrumSpec::default(), 9, 3).unwrap();
        let cfg = SolverConfig::new(3, 0.2, 0.1)
            .with_dt(0.01)
            .with_sample_every(2);
        let traj = integrate(&cfg, &u0).unwrap();
        assert_eq!(traj.len() % 2, 1);
        assert_eq!(traj.samples[0].t(), 0.0);
        assert_eq!(traj.last().t(), 0.1);
        for s in &traj.samples {
            let r = nsv_rhs(s.u(), 0.2);
            assert_eq!(r.coeffs(), s.rhs.coeffs());
            let p = pressure_poisson(s.u());
            assert_eq!(p.coeffs(), s.pressure.as_ref().unwrap().coeffs());
            assert!(s.u().divergence_defect() < 1e-13);
            assert_eq!(s.u().hermitian_defect(), 0.0);
        }
        let times = traj.times();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
    }
}
