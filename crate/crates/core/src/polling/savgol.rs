//! Savitzky-Golay smoothing: a least-squares polynomial fit over a sliding window, evaluated
//! at the window's centre. Near the ends the window is truncated to the samples that exist
//! and the fit is evaluated at the edge sample itself.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

/// Convolution weights that evaluate a least-squares polynomial of degree `order`, fitted at
/// integer `offsets` relative to the target sample, at offset 0.
pub fn savgol_coefficients(offsets: &[i64], order: usize) -> Result<Vec<f64>> {
    if offsets.is_empty() {
        return Err(invalid("no offsets"));
    }
    let order = order.min(offsets.len() - 1);
    let scale = offsets.iter().map(|o| o.unsigned_abs()).max().unwrap_or(1).max(1) as f64;
    let a = DMatrix::from_fn(offsets.len(), order + 1, |r, c| (offsets[r] as f64 / scale).powi(c as i32));
    let gram = a.transpose() * &a;
    let mut e0 = DVector::zeros(order + 1);
    e0[0] = 1.0;
    let z = gram
        .lu()
        .solve(&e0)
        .ok_or_else(|| invalid("singular Savitzky-Golay system"))?;
    Ok((a * z).iter().copied().collect())
}

pub fn savgol_smooth(values: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(invalid(format!("window must be odd and >= 3, got {window}")));
    }
    if order >= window {
        return Err(invalid(format!("order {order} must be below window {window}")));
    }
    let n = values.len();
    if window > n {
        return Err(invalid(format!("window {window} exceeds curve length {n}")));
    }
    let half = (window / 2) as i64;
    let centred: Vec<i64> = (-half..=half).collect();
    let interior = savgol_coefficients(&centred, order)?;

    let mut out = vec![0.0; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let i = i as i64;
        let lo = (i - half).max(0);
        let hi = (i + half).min(n as i64 - 1);
        let window_values = &values[lo as usize..=hi as usize];
        *slot = if hi - lo + 1 == window as i64 {
            dot(&interior, window_values)
        } else {
            let offsets: Vec<i64> = (lo - i..=hi - i).collect();
            dot(&savgol_coefficients(&offsets, order)?, window_values)
        };
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
