use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for an interior extremum of a unimodal function on
/// `[lo, hi]`, to abscissa tolerance `tol`.
///
/// Fails with [`Error::ExtremumNotFound`] when the optimum runs into either
/// end of the bracket.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64, goal: Goal) -> Result<Extremum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::domain(format!(
            "golden section needs lo < hi and tol > 0, got [{lo:e}, {hi:e}], tol {tol:e}"
        )));
    }
    let sign = match goal {
        Goal::Minimize => 1.0,
        Goal::Maximize => -1.0,
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = sign * f(x1)?;
    let mut f2 = sign * f(x2)?;
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = sign * f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = sign * f(x2)?;
        }
    }
    let (x, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let edge = 2.0 * tol;
    if x - lo < edge || hi - x < edge {
        return Err(Error::ExtremumNotFound(0.5 * (lo + hi)));
    }
    Ok(Extremum {
        x,
        value: sign * v,
    })
}
