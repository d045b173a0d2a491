use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dispersion::{kz_pump, CrystalSpec, SpectralPoint};
use crate::perturbative::PumpSpec;
use crate::units::SPEED_OF_LIGHT;
use crate::{Error, Result};

/// Discretization of the `(t, x, y) ↔ (ω, k_x, k_y)` box.
///
/// Arrays are stored with `t`/`ω` slowest and `y`/`k_y` fastest. Both
/// domains use FFT ordering: index `j` maps to the signed offset `j` for
/// `j < n/2` and `j − n` otherwise, so the window center is index 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationGrid {
    pub n_t: usize,
    pub n_x: usize,
    pub n_y: usize,
    /// Time window [s].
    pub span_t: f64,
    /// Transverse windows [m].
    pub span_x: f64,
    pub span_y: f64,
    pub n_z: usize,
    /// Carrier of the fluorescence envelope, `ω₀` [rad/s].
    pub omega_center: f64,
}

/// Signed FFT-order offset of index `j` on an axis of length `n`.
#[inline]
pub fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl SimulationGrid {
    /// Desk-scale defaults: 128×64×64, windows of eight pump widths, 200 z steps.
    pub fn desk_default(pump: &PumpSpec) -> Self {
        SimulationGrid {
            n_t: 128,
            n_x: 64,
            n_y: 64,
            span_t: 8.0 * pump.tau,
            span_x: 8.0 * pump.width,
            span_y: 8.0 * pump.width,
            n_z: 200,
            omega_center: 0.5 * pump.omega_center,
        }
    }

    /// Sets both transverse windows so the largest transverse wavevector
    /// on each axis equals `k_max`.
    pub fn with_transverse_kmax(mut self, k_max: f64) -> Self {
        self.span_x = PI * self.n_x as f64 / k_max;
        self.span_y = PI * self.n_y as f64 / k_max;
        self
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.n_t, self.n_x, self.n_y]
    }

    pub fn len(&self) -> usize {
        self.n_t * self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, it: usize, ix: usize, iy: usize) -> usize {
        (it * self.n_x + ix) * self.n_y + iy
    }

    #[inline]
    pub fn unravel(&self, i: usize) -> (usize, usize, usize) {
        let iy = i % self.n_y;
        let r = i / self.n_y;
        (r / self.n_x, r % self.n_x, iy)
    }

    pub fn d_omega(&self) -> f64 {
        2.0 * PI / self.span_t
    }

    pub fn dk_x(&self) -> f64 {
        2.0 * PI / self.span_x
    }

    pub fn dk_y(&self) -> f64 {
        2.0 * PI / self.span_y
    }

    pub fn dt(&self) -> f64 {
        self.span_t / self.n_t as f64
    }

    pub fn dx(&self) -> f64 {
        self.span_x / self.n_x as f64
    }

    pub fn dy(&self) -> f64 {
        self.span_y / self.n_y as f64
    }

    pub fn dz(&self, length: f64) -> f64 {
        length / self.n_z as f64
    }

    /// Spectral volume `Δω·Δk_x·Δk_y` of one mode.
    pub fn mode_volume(&self) -> f64 {
        self.d_omega() * self.dk_x() * self.dk_y()
    }

    pub fn delta_omega(&self, it: usize) -> f64 {
        signed_index(it, self.n_t) as f64 * self.d_omega()
    }

    pub fn omega(&self, it: usize) -> f64 {
        self.omega_center + self.delta_omega(it)
    }

    pub fn kx(&self, ix: usize) -> f64 {
        signed_index(ix, self.n_x) as f64 * self.dk_x()
    }

    pub fn ky(&self, iy: usize) -> f64 {
        signed_index(iy, self.n_y) as f64 * self.dk_y()
    }

    pub fn t(&self, it: usize) -> f64 {
        signed_index(it, self.n_t) as f64 * self.dt()
    }

    pub fn x(&self, ix: usize) -> f64 {
        signed_index(ix, self.n_x) as f64 * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        signed_index(iy, self.n_y) as f64 * self.dy()
    }

    /// Fluorescence mode at flat index `i`.
    pub fn spectral_point(&self, i: usize) -> SpectralPoint {
        let (it, ix, iy) = self.unravel(i);
        SpectralPoint::new(self.omega(it), self.kx(ix), self.ky(iy))
    }

    /// Pump component sharing the grid offsets, carried at `2ω₀`.
    pub fn pump_point(&self, i: usize) -> SpectralPoint {
        let (it, ix, iy) = self.unravel(i);
        SpectralPoint::new(
            2.0 * self.omega_center + self.delta_omega(it),
            self.kx(ix),
            self.ky(iy),
        )
    }

    /// `(ω_min, ω_max)` of the fluorescence grid.
    pub fn omega_range(&self) -> (f64, f64) {
        let half = (self.n_t / 2) as f64;
        (
            self.omega_center - half * self.d_omega(),
            self.omega_center + (half - 1.0) * self.d_omega(),
        )
    }

    /// Largest `|k_x|`, `|k_y|` on the grid.
    pub fn k_max(&self) -> (f64, f64) {
        (
            (self.n_x / 2) as f64 * self.dk_x(),
            (self.n_y / 2) as f64 * self.dk_y(),
        )
    }

    /// Radius of the largest transverse disc whose modes all have their
    /// conjugate partner `−k` on the grid.
    pub fn k_inscribed(&self) -> f64 {
        let a = (self.n_x / 2).saturating_sub(1) as f64 * self.dk_x();
        let b = (self.n_y / 2).saturating_sub(1) as f64 * self.dk_y();
        a.min(b)
    }

    /// Band `ω₀ ± (n_t/2 − 1)·Δω` whose modes all have an on-grid partner
    /// at `2ω₀ − ω`.
    pub fn paired_omega_range(&self) -> (f64, f64) {
        let half = (self.n_t / 2).saturating_sub(1) as f64 * self.d_omega();
        (self.omega_center - half, self.omega_center + half)
    }

    /// False on a Nyquist index: the mode aliases onto itself and cannot be
    /// pair-generated.
    pub fn is_paired(&self, i: usize) -> bool {
        let (it, ix, iy) = self.unravel(i);
        let ok = |j: usize, n: usize| n == 1 || j != n / 2;
        ok(it, self.n_t) && ok(ix, self.n_x) && ok(iy, self.n_y)
    }

    pub fn validate(&self, crystal: &CrystalSpec) -> Result<()> {
        for (name, n) in [("n_t", self.n_t), ("n_x", self.n_x), ("n_y", self.n_y)] {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::invalid(
                    name,
                    alloc::format!("{n} is not a power of two >= 2"),
                ));
            }
        }
        for (name, s) in [
            ("span_t", self.span_t),
            ("span_x", self.span_x),
            ("span_y", self.span_y),
        ] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::invalid(name, "expected a positive window"));
            }
        }
        if self.n_z < 1 {
            return Err(Error::invalid("n_z", "need at least one z step"));
        }
        if !(self.omega_center > 0.0) {
            return Err(Error::invalid(
                "omega_center",
                "expected a positive carrier",
            ));
        }
        let (w_lo, w_hi) = self.omega_range();
        if !(w_lo > 0.0) {
            return Err(Error::GridUnderresolved(alloc::format!(
                "frequency window reaches {w_lo:.3e} rad/s"
            )));
        }
        for w in [
            w_lo,
            w_hi,
            2.0 * self.omega_center + (w_lo - self.omega_center),
            2.0 * self.omega_center + (w_hi - self.omega_center),
        ] {
            crystal.material.n_squared(w)?;
        }
        // Every corner mode must propagate at the lowest frequency.
        let (kx, ky) = self.k_max();
        let kt = kx.hypot(ky);
        let (no2, _) = crystal.material.n_squared(w_lo)?;
        let k_light = no2.sqrt() * w_lo / SPEED_OF_LIGHT;
        if kt >= k_light {
            return Err(Error::GridUnderresolved(alloc::format!(
                "corner transverse wavevector {kt:.3e} rad/m is evanescent at the lowest grid frequency ({k_light:.3e})"
            )));
        }
        let w_p_lo = 2.0 * self.omega_center + (w_lo - self.omega_center);
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                kz_pump(SpectralPoint::new(w_p_lo, sx * kx, sy * ky), crystal)
                    .map_err(|e| Error::GridUnderresolved(alloc::format!("pump corner: {e}")))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub n_realizations: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_realizations < 1 {
            return Err(Error::invalid(
                "n_realizations",
                "need at least one realization",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{FS, UM};

    fn setup() -> (CrystalSpec, PumpSpec) {
        let c = CrystalSpec::bbo(31.3, 2e-3).unwrap();
        let p = PumpSpec::new(60.0 * FS, 80.0 * UM, c.pump_center_omega, 2e-3).unwrap();
        (c, p)
    }

    #[test]
    fn default_grid_is_valid() {
        let (c, p) = setup();
        let g = SimulationGrid::desk_default(&p);
        g.validate(&c).unwrap();
        assert_eq!(g.len(), 128 * 64 * 64);
        assert!((g.mode_volume() - g.d_omega() * g.dk_x() * g.dk_y()).abs() == 0.0);
    }

    #[test]
    fn index_roundtrip_and_signed_offsets() {
        let (_, p) = setup();
        let g = SimulationGrid::desk_default(&p);
        for i in [0, 1, 4095, 77777, g.len() - 1] {
            let (a, b, c) = g.unravel(i);
            assert_eq!(g.index(a, b, c), i);
        }
        assert_eq!(signed_index(0, 8), 0);
        assert_eq!(signed_index(3, 8), 3);
        assert_eq!(signed_index(4, 8), -4);
        assert_eq!(signed_index(7, 8), -1);
        let (lo, hi) = g.omega_range();
        assert_eq!(lo, g.omega(64));
        assert_eq!(hi, g.omega(63));
        let (plo, phi) = g.paired_omega_range();
        assert_eq!((plo, phi), (g.omega(65), g.omega(63)));
        assert_eq!(2.0 * g.omega_center - phi, plo);
    }

    #[test]
    fn nyquist_modes_are_unpaired() {
        let (_, p) = setup();
        let mut g = SimulationGrid::desk_default(&p);
        (g.n_t, g.n_x, g.n_y) = (8, 4, 4);
        let paired = (0..g.len()).filter(|&i| g.is_paired(i)).count();
        assert_eq!(paired, 7 * 3 * 3);
        assert!(!g.is_paired(g.index(4, 0, 0)));
        assert!(!g.is_paired(g.index(0, 2, 1)));
        assert_eq!(g.k_inscribed(), g.dk_x().min(g.dk_y()));
    }

    #[test]
    fn invalid_grids_rejected() {
        let (c, p) = setup();
        let mut g = SimulationGrid::desk_default(&p);
        g.n_x = 48;
        assert!(g.validate(&c).is_err());
        let mut g = SimulationGrid::desk_default(&p);
        g.n_z = 0;
        assert!(g.validate(&c).is_err());
        // transverse Nyquist far beyond the light cone
        let g = SimulationGrid::desk_default(&p).with_transverse_kmax(2e7);
        assert!(matches!(g.validate(&c), Err(Error::GridUnderresolved(_))));
        // window so wide the low edge leaves the dispersion window
        let mut g = SimulationGrid::desk_default(&p);
        g.span_t = 0.5 * p.tau;
        assert!(g.validate(&c).is_err());
    }
}
