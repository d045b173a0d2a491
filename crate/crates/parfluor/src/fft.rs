//! Three-axis FFT on grid-ordered buffers.
//!
//! Spectral → position sums plane waves `exp(i(k_x x + k_y y − δω t))`,
//! which is an inverse DFT along `x`, `y` and a forward DFT along `t`.
//! Signal fields use the unitary scaling `1/√N` in both directions; the
//! pump uses a plain sum so its peak equals the sum of its coefficients.
//!
//! The propagator never looks at position data except pointwise, so it uses
//! the unscaled `*_t_fastest` pair, which leaves position data with `t` as
//! the fastest axis and saves one full transpose per direction.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use parfluor_core::wigner::SimulationGrid;

struct AxisPlans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl AxisPlans {
    fn new(planner: &mut FftPlanner<f64>, n: usize) -> Self {
        AxisPlans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn pick(&self, forward: bool) -> &Arc<dyn Fft<f64>> {
        if forward {
            &self.forward
        } else {
            &self.inverse
        }
    }

    fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }
}

/// Plans for one grid shape. Shared across threads; each caller brings an
/// [`FftWorkspace`].
pub struct Fft3 {
    shape: [usize; 3],
    t: AxisPlans,
    x: AxisPlans,
    y: AxisPlans,
}

/// Per-thread buffers for [`Fft3`].
pub struct FftWorkspace {
    swap: Vec<Complex64>,
    slab: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Fft3 {
    pub fn new(grid: &SimulationGrid) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            shape: grid.shape(),
            t: AxisPlans::new(&mut planner, grid.n_t),
            x: AxisPlans::new(&mut planner, grid.n_x),
            y: AxisPlans::new(&mut planner, grid.n_y),
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn workspace(&self) -> FftWorkspace {
        let s = self
            .t
            .scratch_len()
            .max(self.x.scratch_len())
            .max(self.y.scratch_len());
        let zero = Complex64::new(0.0, 0.0);
        FftWorkspace {
            swap: vec![zero; self.len()],
            slab: vec![zero; self.shape[1] * self.shape[2]],
            scratch: vec![zero; s],
        }
    }

    /// Unitary spectral → position transform of a signal field.
    pub fn to_position(&self, data: &mut Vec<Complex64>, ws: &mut FftWorkspace) {
        self.sum_to_position(data, ws);
        scale(data, 1.0 / (self.len() as f64).sqrt());
    }

    /// Unitary position → spectral transform of a signal field.
    pub fn to_spectral(&self, data: &mut Vec<Complex64>, ws: &mut FftWorkspace) {
        let [n_t, n_x, n_y] = self.shape;
        transpose_into(data, &mut ws.swap, n_t, n_x * n_y);
        std::mem::swap(data, &mut ws.swap);
        self.t_fastest_to_spectral(data, ws);
        scale(data, 1.0 / (self.len() as f64).sqrt());
    }

    /// Unscaled spectral → position transform, used for the pump.
    pub fn sum_to_position(&self, data: &mut Vec<Complex64>, ws: &mut FftWorkspace) {
        let [n_t, n_x, n_y] = self.shape;
        self.spectral_to_t_fastest(data, ws);
        transpose_into(data, &mut ws.swap, n_x * n_y, n_t);
        std::mem::swap(data, &mut ws.swap);
    }

    /// Unscaled spectral → position; the result is stored `t` fastest.
    pub fn spectral_to_t_fastest(&self, data: &mut Vec<Complex64>, ws: &mut FftWorkspace) {
        assert_eq!(
            data.len(),
            self.len(),
            "buffer does not match the FFT shape"
        );
        let [n_t, n_x, n_y] = self.shape;
        let slab = n_x * n_y;
        for block in data.chunks_exact_mut(slab) {
            self.slab_2d(block, ws, false);
        }
        transpose_into(data, &mut ws.swap, n_t, slab);
        std::mem::swap(data, &mut ws.swap);
        self.t.forward.process_with_scratch(data, &mut ws.scratch);
    }

    /// Unscaled inverse of [`Fft3::spectral_to_t_fastest`] up to a factor `N`.
    pub fn t_fastest_to_spectral(&self, data: &mut Vec<Complex64>, ws: &mut FftWorkspace) {
        assert_eq!(
            data.len(),
            self.len(),
            "buffer does not match the FFT shape"
        );
        let [n_t, n_x, n_y] = self.shape;
        let slab = n_x * n_y;
        self.t.inverse.process_with_scratch(data, &mut ws.scratch);
        transpose_into(data, &mut ws.swap, slab, n_t);
        std::mem::swap(data, &mut ws.swap);
        for block in data.chunks_exact_mut(slab) {
            self.slab_2d(block, ws, true);
        }
    }

    /// 2D transform of one `(x, y)` slab; spectral → position is inverse on both axes.
    fn slab_2d(&self, block: &mut [Complex64], ws: &mut FftWorkspace, forward: bool) {
        let (n_x, n_y) = (self.shape[1], self.shape[2]);
        self.y
            .pick(forward)
            .process_with_scratch(block, &mut ws.scratch);
        transpose_into(block, &mut ws.slab, n_x, n_y);
        self.x
            .pick(forward)
            .process_with_scratch(&mut ws.slab, &mut ws.scratch);
        transpose_into(&ws.slab, block, n_y, n_x);
    }
}

fn scale(data: &mut [Complex64], s: f64) {
    for v in data {
        *v *= s;
    }
}

/// `dst[c·rows + r] = src[r·cols + c]`, blocked for cache use.
fn transpose_into(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 16;
    debug_assert_eq!(src.len(), rows * cols);
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}
