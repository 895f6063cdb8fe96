use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordinary least squares of `ln error` on `ln dt`; returns `(slope, intercept)`.
pub fn fit_order<T: Scalar>(rows: &[(T, T)]) -> Result<(T, T)> {
    if rows.len() < 2 {
        return Err(Error::DegenerateData(format!("need at least two rows, got {}", rows.len())));
    }
    if let Some(&(dt, err)) = rows.iter().find(|(dt, err)| !(*dt > T::zero() && *err > T::zero())) {
        return Err(Error::DegenerateData(format!("log-log fit needs positive values, got dt = {dt}, error = {err}")));
    }
    let n = T::of(rows.len() as f64);
    let xs: Vec<T> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<T> = rows.iter().map(|r| r.1.ln()).collect();
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx = xs.iter().map(|&x| (x - mx) * (x - mx)).sum::<T>();
    if sxx == T::zero() {
        return Err(Error::DegenerateData("all rows share one step size".into()));
    }
    let sxy = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum::<T>();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
