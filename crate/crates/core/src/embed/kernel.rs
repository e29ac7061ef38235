//! The per-example update shared by both training modes.

use crate::vectors::dot;

#[inline]
pub fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
fn axpy(alpha: f32, x: &[f32], y: &mut [f32]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// One target of a negative-sampling step. Updates `out_row` in place,
/// accumulates the hidden-vector update into `hidden_update`, and returns
/// the target's loss term. `label` is 1 for the positive, 0 for negatives.
#[inline]
pub fn step_target(hidden: &[f32], hidden_update: &mut [f32], out_row: &mut [f32], label: f32, lr: f32) -> f64 {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the CPU supports AVX2.
        return unsafe { step_target_avx2(hidden, hidden_update, out_row, label, lr) };
    }
    step_target_portable(hidden, hidden_update, out_row, label, lr)
}

/// Same operations in the same order as the portable version, only wider
/// registers, so results are bit-identical.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn step_target_avx2(hidden: &[f32], hidden_update: &mut [f32], out_row: &mut [f32], label: f32, lr: f32) -> f64 {
    step_target_portable(hidden, hidden_update, out_row, label, lr)
}

#[inline(always)]
fn step_target_portable(hidden: &[f32], hidden_update: &mut [f32], out_row: &mut [f32], label: f32, lr: f32) -> f64 {
    let f = dot(hidden, out_row);
    let s = sigmoid(f);
    let g = (label - s) * lr;
    for ((u, o), h) in hidden_update.iter_mut().zip(out_row.iter_mut()).zip(hidden) {
        let old = *o;
        *u += g * old;
        *o = old + g * h;
    }
    let p = if label > 0.5 { s } else { 1.0 - s };
    -f64::from(p.max(1e-30)).ln()
}

pub(crate) fn add_scaled(alpha: f32, x: &[f32], y: &mut [f32]) {
    axpy(alpha, x, y)
}
