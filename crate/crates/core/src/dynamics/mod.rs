//! Finite-lattice wave-packet dynamics: an independent time-domain check of
//! the stationary scattering and pole results.

mod hamiltonian;
mod integrator;
mod layout;
mod observables;
mod packet;
mod propagator;

pub use hamiltonian::{build_hamiltonian, TridiagonalHamiltonian, HOPPING};
pub use integrator::{evolve_direct, rk4_step_size, DEFAULT_LOCAL_TOL};
pub use layout::LatticeLayout;
pub use observables::{
    growth_rate_fit, intensity_split, log_slope_rate, site_intensity, transmitted_intensity,
    validity_horizon, IntensitySplit, MIN_GROWTH_DECADES,
};
pub use packet::{gaussian_packet, WaveState};
pub use propagator::{
    evolve, evolve_many, prepare_propagator, PropagatorBundle, BIORTHOGONALITY_TOL,
    NEAR_DEFECTIVE_CONDITION, SPECTRAL_RESIDUAL_TOL,
};
