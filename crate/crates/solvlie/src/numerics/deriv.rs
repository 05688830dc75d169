//! Central finite differences with one Richardson extrapolation step.

use crate::error::{Error, Result};

pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// Derivative of order 1..=4 of `g` at 0, central differences at steps `h` and
/// `h/2` combined by Richardson extrapolation (leading error O(h^4)).
pub fn derivative_at_zero<F: Fn(f64) -> Result<f64>>(g: F, order: usize, h: f64) -> Result<f64> {
    if order == 0 {
        return g(0.0);
    }
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeDepth {
            depth: order,
            limit: MAX_DERIVATIVE_ORDER,
        });
    }
    if !(h > 0.0) {
        return Err(Error::Input("finite-difference step must be positive".into()));
    }
    let coarse = central(&g, order, h)?;
    let fine = central(&g, order, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn central<F: Fn(f64) -> Result<f64>>(g: &F, order: usize, h: f64) -> Result<f64> {
    let v = |s: f64| -> Result<f64> {
        let y = g(s)?;
        if !y.is_finite() {
            return Err(Error::NonFinite {
                context: format!("finite-difference sample at s={s}"),
            });
        }
        Ok(y)
    };
    let d = match order {
        1 => (v(h)? - v(-h)?) / (2.0 * h),
        2 => (v(h)? - 2.0 * v(0.0)? + v(-h)?) / (h * h),
        3 => (v(2.0 * h)? - 2.0 * v(h)? + 2.0 * v(-h)? - v(-2.0 * h)?) / (2.0 * h * h * h),
        4 => {
            (v(2.0 * h)? - 4.0 * v(h)? + 6.0 * v(0.0)? - 4.0 * v(-h)? + v(-2.0 * h)?)
                / (h * h * h * h)
        }
        _ => unreachable!(),
    };
    Ok(d)
}

/// Derivative of `f` along a parametrized curve through `curve(0)`.
pub fn directional_derivative<F, C>(f: F, curve: C, order: usize, h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
    C: Fn(f64) -> Vec<f64>,
{
    derivative_at_zero(|s| f(&curve(s)), order, h)
}
