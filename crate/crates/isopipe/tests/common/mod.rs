//! Shared helpers for the integration and acceptance suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use isopipe::state::{GasParams, State};
use isopipe::valve::{ValveDecision, ValveError, ValveModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sampling protocol of the randomized suites: density log-uniform in
/// [0.1, 10], velocity ratio nu uniform in [-3, 3].
pub fn random_state(rng: &mut ChaCha8Rng, g: GasParams) -> State {
    let mu = rng.gen_range(0.1f64.ln()..10f64.ln());
    let nu = rng.gen_range(-3.0..3.0);
    State::from_mu_nu(mu, nu, g).expect("sampled states are far from the vacuum floor")
}

/// Valve that never activates: turns the coupling solver into the
/// classical one.
pub struct AlwaysOpen;

impl ValveModel for AlwaysOpen {
    fn decide(&self, _: State, _: State, _: GasParams) -> Result<ValveDecision, ValveError> {
        Ok(ValveDecision::Open)
    }
}

/// Prints the per-criterion verdict line and fails the test on FAIL.
pub fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {:>2} ({name}): {detail}",
        if pass { "PASS" } else { "FAIL" },
        id
    );
    assert!(pass, "criterion {id} ({name}): {detail}");
}
