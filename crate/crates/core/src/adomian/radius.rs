use alloc::vec::Vec;

use super::series::AdmSeries;
use crate::error::Result;

/// Fewer successive ratios than this gives only a rough estimate.
pub const RELIABLE_RATIOS: usize = 8;

/// Ratio-test estimate of the time radius of convergence at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusEstimate {
    pub x: f64,
    /// `|ũ_{n+1}(x)| / (n+1) / |ũ_n(x)|`, i.e. `|u_{n+1}/u_n|` at `t = 1`.
    pub ratios: Vec<f64>,
    /// `1 / ρ`, with `ρ` the mean of the last two ratios; `None` if
    /// `ρ` is zero.
    pub radius: Option<f64>,
    /// False when some coefficient vanishes at `x`, so the ratios say
    /// nothing about growth.
    pub valid: bool,
    /// Set when fewer than [`RELIABLE_RATIOS`] ratios were available.
    pub low_order: bool,
}

/// Terms needed beyond `ũ_0` for an estimate.
pub const MIN_TERMS: usize = 4;

/// A series with fewer than [`MIN_TERMS`] terms, or one with a coefficient
/// vanishing at `x`, gives an invalid estimate rather than an error.
pub fn estimate_radius(series: &AdmSeries, x: f64) -> Result<RadiusEstimate> {
    let order = series.order();
    if order < MIN_TERMS {
        return Ok(RadiusEstimate {
            x,
            ratios: Vec::new(),
            radius: None,
            valid: false,
            low_order: true,
        });
    }
    let values: Vec<f64> = (0..=order)
        .map(|n| series.coefficient_at(n, x))
        .collect::<Result<_>>()?;
    let valid = values.iter().all(|v| *v != 0.0 && v.is_finite());
    let mut ratios = Vec::with_capacity(order);
    if valid {
        for n in 0..order {
            ratios.push((values[n + 1] / values[n]).abs() / (n + 1) as f64);
        }
    }
    let radius = match ratios.as_slice() {
        [.., a, b] => {
            let rho = 0.5 * (a + b);
            (rho > 0.0).then(|| 1.0 / rho)
        }
        _ => None,
    };
    Ok(RadiusEstimate {
        x,
        low_order: ratios.len() < RELIABLE_RATIOS,
        ratios,
        radius,
        valid,
    })
}
