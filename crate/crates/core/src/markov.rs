//! Classical Markovian (white) noise with a spatial profile γ(r).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Noise power at zero separation and at the probe separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovSpec {
    pub gamma0: f64,
    pub gamma_r: f64,
}

impl MarkovSpec {
    /// Samples a spatial profile at zero and at separation `r`.
    pub fn from_profile<F: Fn(f64) -> f64>(profile: F, r: f64) -> Self {
        Self {
            gamma0: profile(0.0),
            gamma_r: profile(r),
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.gamma0 >= self.gamma_r.abs()) {
            return Err(Error::InvalidKernel {
                gamma0: self.gamma0,
                gamma_r: self.gamma_r,
            });
        }
        Ok(())
    }
}

/// Local noise, correlated dephasing and two-qubit coherence at unit
/// couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovSignal {
    pub n1: f64,
    pub n2: f64,
    pub n12: f64,
    /// exp(−(γ(0) − γ(r)) t).
    pub coherence: f64,
}

/// Closed-form signals after a Ramsey sequence of duration `t`.
pub fn markov_signal(spec: &MarkovSpec, t: f64) -> Result<MarkovSignal> {
    spec.check()?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("duration must be >= 0, got {t}")));
    }
    let local = 0.5 * spec.gamma0 * t;
    Ok(MarkovSignal {
        n1: local,
        n2: local,
        n12: spec.gamma_r * t,
        coherence: (-(spec.gamma0 - spec.gamma_r) * t).exp(),
    })
}
