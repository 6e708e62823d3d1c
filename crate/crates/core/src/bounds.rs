//! Shape functions of the error bounds, with every hidden constant set to 1.
//!
//! `ln` is used where the bounds are stated with an ordinary logarithm and the
//! truncated `Log(x) = max(2, log2 x)` where they are stated with `Log`.

use crate::error::{Error, Result};

/// `(n, d, delta)` with `n >= d >= 1` and `delta` in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInput {
    pub n: f64,
    pub d: f64,
    pub delta: f64,
}

impl BoundInput {
    pub fn new(n: f64, d: f64, delta: f64) -> Result<Self> {
        if !(d >= 1.0 && n >= d && n.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bounds need n >= d >= 1 (n = {n}, d = {d})"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1)")));
        }
        Ok(Self { n, d, delta })
    }
}

/// Truncated logarithm `max(2, log2 x)`.
pub fn log_trunc(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!("Log needs x > 0, got {x}")));
    }
    Ok(x.log2().max(2.0))
}

fn lt(x: f64) -> f64 {
    x.log2().max(2.0)
}

/// Single consistent hypothesis: `(d/n) ln(n/d) + ln(1/delta)/n`.
pub fn erm_bound(b: BoundInput) -> f64 {
    b.d / b.n * (b.n / b.d).ln() + (1.0 / b.delta).ln() / b.n
}

/// Optimal rate: `d/n + ln(1/delta)/n`.
pub fn optimal_bound(b: BoundInput) -> f64 {
    b.d / b.n + (1.0 / b.delta).ln() / b.n
}

/// Prefix-majority rate `(d/n) lnln(n/d) + ln(1/delta)/n`, with the double
/// log replaced by `Log(Log(n/d))` so the shape stays positive for small `n/d`.
pub fn simon_bound(b: BoundInput) -> f64 {
    b.d / b.n * lt(lt(b.n / b.d)) + (1.0 / b.delta).ln() / b.n
}

/// High-probability majority-of-three rate:
/// `(d/n) Log(Log(min(n/d, 1/delta))) + Log(1/delta)/n`.
pub fn thm2_bound(b: BoundInput) -> f64 {
    let inner = (b.n / b.d).min(1.0 / b.delta);
    b.d / b.n * lt(lt(inner)) + lt(1.0 / b.delta) / b.n
}

/// Weakened uniform convergence: `4 max(d Log(2em/d)/m, Log(2/delta)/m)`.
pub fn uniform_convergence_bound(m: f64, d: f64, delta: f64) -> Result<f64> {
    if !(m >= 1.0) || !(d >= 1.0) {
        return Err(Error::InvalidParameter(format!("need m >= 1 and d >= 1 (m = {m}, d = {d})")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1)")));
    }
    let e = std::f64::consts::E;
    Ok(4.0 * (d * lt(2.0 * e * m / d) / m).max(lt(2.0 / delta) / m))
}

/// All shapes at one input, in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub input: BoundInput,
    pub erm: f64,
    pub optimal: f64,
    pub simon: f64,
    pub thm2: f64,
    pub uniform_convergence: f64,
}

pub fn bound_row(input: BoundInput) -> Result<BoundRow> {
    Ok(BoundRow {
        input,
        erm: erm_bound(input),
        optimal: optimal_bound(input),
        simon: simon_bound(input),
        thm2: thm2_bound(input),
        uniform_convergence: uniform_convergence_bound(input.n, input.d, input.delta)?,
    })
}

fn ordered(b: BoundInput) -> bool {
    let (o, t, s, e) = (optimal_bound(b), thm2_bound(b), simon_bound(b), erm_bound(b));
    o <= t && t <= s && s <= e
}

/// Smallest `n` on the grid from which `optimal <= thm2 <= simon <= erm`
/// holds at every later grid point, or `None` if it fails at the last one.
pub fn ordering_crossover(d: f64, delta: f64, grid: &[f64]) -> Result<Option<f64>> {
    let mut crossover = None;
    for &n in grid.iter().rev() {
        if ordered(BoundInput::new(n, d, delta)?) {
            crossover = Some(n);
        } else {
            break;
        }
    }
    Ok(crossover)
}
