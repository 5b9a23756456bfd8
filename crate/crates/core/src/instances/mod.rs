//! Concrete problem instances: ODEs with analytic bounds and periodic transport equations.

mod ode;
mod transport;

pub use ode::{
    ode_bounds, ode_step, sup_norm_vec, LipschitzModel, OdeConstants, OdeInstance, OdeRhs, OdeSpec,
};
pub use transport::{
    make_advection_instance, make_burgers_instance, transport_step, Coefficient, TransportInstance,
    TransportSpec,
};
