//! N-dimensional complex FFT built from per-axis `rustfft` passes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANS: RefCell<Plans> = RefCell::new(Plans::default());
}

struct Plans {
    planner: FftPlanner<f64>,
    cache: HashMap<(usize, bool), Arc<dyn Fft<f64>>>,
    line_buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Default for Plans {
    fn default() -> Self {
        Self {
            planner: FftPlanner::new(),
            cache: HashMap::new(),
            line_buf: Vec::new(),
            scratch: Vec::new(),
        }
    }
}

impl Plans {
    fn plan(&mut self, n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
        let planner = &mut self.planner;
        self.cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    }
}

/// In-place unnormalized transform over a row-major array of `shape`.
pub(crate) fn transform(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let inverse = direction == FftDirection::Inverse;
    let total = data.len();
    debug_assert_eq!(total, shape.iter().product::<usize>());
    PLANS.with(|cell| {
        let plans = &mut *cell.borrow_mut();
        for axis in 0..shape.len() {
            let n = shape[axis];
            let fft = plans.plan(n, inverse);
            let need = fft.get_inplace_scratch_len();
            if plans.scratch.len() < need {
                plans.scratch.resize(need, Complex64::default());
            }
            let stride: usize = shape[axis + 1..].iter().product();
            if stride == 1 {
                fft.process_with_scratch(data, &mut plans.scratch[..need]);
                continue;
            }
            let outer = total / (n * stride);
            let buf = &mut plans.line_buf;
            buf.resize(total, Complex64::default());
            for o in 0..outer {
                let base = o * n * stride;
                for j in 0..n {
                    let row = &data[base + j * stride..base + (j + 1) * stride];
                    for (i, &z) in row.iter().enumerate() {
                        buf[(o * stride + i) * n + j] = z;
                    }
                }
            }
            fft.process_with_scratch(&mut buf[..total], &mut plans.scratch[..need]);
            for o in 0..outer {
                let base = o * n * stride;
                for j in 0..n {
                    let row = &mut data[base + j * stride..base + (j + 1) * stride];
                    for (i, z) in row.iter_mut().enumerate() {
                        *z = buf[(o * stride + i) * n + j];
                    }
                }
            }
        }
    });
}
