//! Physical constants and conversions between the interface units
//! (nm, fs, µm, degrees) and the SI units used internally.

use core::f64::consts::PI;

/// Speed of light in vacuum [m/s] (exact, SI definition).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn omega_from_wavelength_nm(lambda_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (lambda_nm * 1e-9)
}

pub fn wavelength_nm_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e9
}

pub fn wavelength_um_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e6
}

pub fn deg(rad: f64) -> f64 {
    rad.to_degrees()
}

pub fn rad(deg: f64) -> f64 {
    deg.to_radians()
}

pub const FS: f64 = 1e-15;
pub const UM: f64 = 1e-6;
pub const MM: f64 = 1e-3;
