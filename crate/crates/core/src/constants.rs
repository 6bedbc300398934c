//! Physical constants (CODATA 2018) and a few mathematical ones.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 2.997_924_58e8;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, N/A^2.
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Apéry's constant ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;
