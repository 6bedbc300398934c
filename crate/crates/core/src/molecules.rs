//! Molecular transition data, polarizability and thermal photon statistics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};

/// A ground-state transition: angular frequency ω_k0 and summed squared
/// dipole matrix element d² over the upper manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub omega: f64,
    pub d_squared: f64,
}

impl Transition {
    pub fn new(omega: f64, d_squared: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("transition frequency must be > 0, got {omega}")));
        }
        if !(d_squared > 0.0 && d_squared.is_finite()) {
            return Err(Error::domain(format!("d_squared must be > 0, got {d_squared}")));
        }
        Ok(Transition { omega, d_squared })
    }

    /// Transition wavelength 2πc/ω.
    pub fn wavelength(&self) -> f64 {
        2.0 * PI * crate::constants::C / self.omega
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    pub name: String,
    /// Sorted by ascending frequency.
    pub transitions: Vec<Transition>,
}

impl Molecule {
    pub fn new(name: impl Into<String>, mut transitions: Vec<Transition>) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::domain("molecule name is empty"));
        }
        if transitions.is_empty() {
            return Err(Error::domain(format!("molecule `{name}` has no transitions")));
        }
        for t in &transitions {
            Transition::new(t.omega, t.d_squared)?;
        }
        transitions.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        Ok(Molecule { name, transitions })
    }

    /// LiH: effective rotational transition to the first excited manifold.
    pub fn lih() -> Self {
        Molecule {
            name: "LiH".into(),
            transitions: vec![Transition {
                omega: 2.78973e12,
                d_squared: 3.847e-58,
            }],
        }
    }

    /// The lowest-frequency transition.
    pub fn primary(&self) -> &Transition {
        &self.transitions[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalEnvironment {
    pub temperature: f64,
}

impl ThermalEnvironment {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::domain(format!("temperature must be > 0 K, got {temperature}")));
        }
        Ok(ThermalEnvironment { temperature })
    }

    pub fn thermal_energy(&self) -> f64 {
        K_B * self.temperature
    }
}

/// Ground-state polarizability α(iξ) = (2/3ħ) Σ_k d_k² ω_k/(ω_k² + ξ²).
pub fn polarizability_imag(mol: &Molecule, xi: f64) -> f64 {
    let mut sum = 0.0;
    for t in &mol.transitions {
        sum += t.d_squared * t.omega / (t.omega * t.omega + xi * xi);
    }
    2.0 * sum / (3.0 * HBAR)
}

/// Bose–Einstein photon number 1/(e^{ħω/k_BT} − 1).
pub fn photon_number(omega: f64, env: &ThermalEnvironment) -> f64 {
    1.0 / (HBAR * omega / env.thermal_energy()).exp_m1()
}

/// ξ_j = 2πj k_BT/ħ.
pub fn matsubara_frequency(j: u32, env: &ThermalEnvironment) -> f64 {
    2.0 * PI * j as f64 * env.thermal_energy() / HBAR
}

/// Frequency maximising ω³ n(ω), where thermal driving of resonant
/// potentials is strongest: ħω/k_BT = x with x = 3(1 − e^{−x}).
pub fn peak_thermal_frequency(env: &ThermalEnvironment) -> f64 {
    let mut x: f64 = 3.0;
    for _ in 0..50 {
        let f = x - 3.0 * (1.0 - (-x).exp());
        let df = 1.0 - 3.0 * (-x).exp();
        let step = f / df;
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x * env.thermal_energy() / HBAR
}
