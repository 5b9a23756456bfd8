//! Named instances and the oracle paired with each.

use twonorm::instances::OdeSpec;
use twonorm::oracles::OracleError;
use twonorm::{
    blowup_time, make_advection_instance, make_burgers_instance, Grid, Ode, SmoothProfile,
    Transport,
};

use crate::config::{InstanceConfig, Profile, Shape};

/// Samples used when locating the steepest compression of a profile.
const BLOWUP_SAMPLES: usize = 1 << 14;

pub fn smooth_profile(profile: &Profile, length: f64) -> SmoothProfile<f64> {
    match profile.shape {
        Shape::Sin => SmoothProfile::sine(length, profile.amplitude),
        Shape::Cos => SmoothProfile::cosine(length, profile.amplitude),
        Shape::Zero => SmoothProfile::constant(length, 0.0),
        Shape::Constant => SmoothProfile::constant(length, profile.amplitude),
    }
}

/// A built instance with its initial data.
pub enum Scenario {
    Ode {
        instance: Ode,
        x0: Vec<f64>,
    },
    Transport {
        instance: Transport,
        profile: SmoothProfile<f64>,
        u0: Grid,
    },
}

impl InstanceConfig {
    pub fn build(&self) -> Scenario {
        match self {
            InstanceConfig::Decay(p) => ode(OdeSpec::decay(p.rate), p.x0),
            InstanceConfig::Riccati(p) => ode(OdeSpec::riccati(), p.x0),
            InstanceConfig::Advect(p) => transport(
                make_advection_instance(
                    p.n,
                    p.length,
                    p.interpolation,
                    p.speed,
                    p.speed_variation,
                    p.damping,
                ),
                smooth_profile(&p.profile, p.length),
                p.n,
            ),
            InstanceConfig::Burgers(p) => transport(
                make_burgers_instance(p.n, p.length, p.interpolation),
                smooth_profile(&p.profile, p.length),
                p.n,
            ),
        }
    }

    /// The same instance with initial data of size `a`: `x0 = a` for ODEs, `u0 = a * profile`
    /// for transport.
    pub fn with_amplitude(&self, a: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            InstanceConfig::Decay(p) => p.x0 = a,
            InstanceConfig::Riccati(p) => p.x0 = a,
            InstanceConfig::Advect(p) => p.profile.amplitude *= a,
            InstanceConfig::Burgers(p) => p.profile.amplitude *= a,
        }
        out
    }

    /// The grid size, for transport instances.
    pub fn grid_size(&self) -> Option<usize> {
        match self {
            InstanceConfig::Advect(p) => Some(p.n),
            InstanceConfig::Burgers(p) => Some(p.n),
            _ => None,
        }
    }

    pub fn with_grid_size(&self, n: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            InstanceConfig::Advect(p) => p.n = n,
            InstanceConfig::Burgers(p) => p.n = n,
            _ => {}
        }
        out
    }

    /// Exact blow-up time where one is known: `1 / x0` for `x' = x^2`, the shock time for
    /// Burgers. `Ok(None)` for instances without a blow-up oracle.
    pub fn oracle_blowup_time(&self) -> Result<Option<f64>, OracleError> {
        match self {
            InstanceConfig::Riccati(p) => Ok(Some(if p.x0 > 0.0 {
                1.0 / p.x0
            } else {
                f64::INFINITY
            })),
            InstanceConfig::Burgers(p) => {
                blowup_time(&smooth_profile(&p.profile, p.length), BLOWUP_SAMPLES).map(Some)
            }
            _ => Ok(None),
        }
    }
}

fn ode(spec: OdeSpec<f64>, x0: f64) -> Scenario {
    Scenario::Ode {
        instance: Ode::new(spec),
        x0: vec![x0],
    }
}

fn transport(instance: Transport, profile: SmoothProfile<f64>, n: usize) -> Scenario {
    let u0 = profile
        .sample_grid(n)
        .expect("validated grid parameters always sample");
    Scenario::Transport {
        instance,
        profile,
        u0,
    }
}
