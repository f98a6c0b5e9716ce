//! Fog density as a first-order linear system.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FogParams {
    /// Emission rate `e` (density units per second) while the machine is on.
    pub emission_rate: f64,
    /// Decay rate `k` (1/s).
    pub decay_rate: f64,
}

impl Default for FogParams {
    fn default() -> Self {
        FogParams {
            emission_rate: 0.5,
            decay_rate: 0.1,
        }
    }
}

impl FogParams {
    pub fn steady_state(&self) -> f64 {
        self.emission_rate / self.decay_rate
    }
}

/// Advances `d' = e·[emitting] − k·d` by `dt` seconds using the closed-form
/// solution, so the result does not depend on how `dt` is subdivided.
pub fn fog_step(density: f64, emitting: bool, dt: f64, params: FogParams) -> f64 {
    let target = if emitting { params.steady_state() } else { 0.0 };
    let next = target + (density - target) * (-params.decay_rate * dt).exp();
    next.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: FogParams = FogParams {
        emission_rate: 0.5,
        decay_rate: 0.1,
    };

    #[test]
    fn zero_is_a_fixpoint_when_off() {
        assert_eq!(fog_step(0.0, false, 1.0, P), 0.0);
    }

    #[test]
    fn steady_state_holds() {
        assert!((fog_step(5.0, true, 0.5, P) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn decay_matches_exponential() {
        let d = fog_step(1.0, false, 10.0, P);
        assert!((d - (-1.0f64).exp()).abs() < 1e-12);
        assert!((d - 0.3679).abs() < 1e-4);
    }

    #[test]
    fn subdivision_invariance() {
        let whole = fog_step(0.3, true, 4.0, P);
        let mut d = 0.3;
        for _ in 0..8 {
            d = fog_step(d, true, 0.5, P);
        }
        assert!((whole - d).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn stays_within_zero_and_steady_state(
            d0 in 0.0f64..=5.0, on in proptest::bool::ANY, dt in 0.001f64..50.0
        ) {
            let d = fog_step(d0, on, dt, P);
            proptest::prop_assert!((0.0..=5.0 + 1e-12).contains(&d));
        }
    }
}
