use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(len)
        } else {
            p.plan_fft_inverse(len)
        }
    })
}

/// Unnormalized in-place n-dimensional transform of a row-major cube of side `n`.
pub(crate) fn fft_nd(data: &mut [Complex64], dim: usize, n: usize, forward: bool) {
    let fft = plan(n, forward);
    let total = data.len();
    debug_assert_eq!(total, n.pow(dim as u32));
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // Last axis: contiguous lines.
    fft.process_with_scratch(data, &mut scratch);
    if dim == 1 {
        return;
    }
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim - 1 {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for b in (0..total).step_by(block) {
            for off in 0..stride {
                let base = b + off;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
}
