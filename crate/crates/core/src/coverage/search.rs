//! Scalar minimisation: a coarse grid to locate the basin, then golden-section
//! refinement inside the neighbouring grid cells.

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_848_2; // (√5 − 1)/2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `x_tol`.
pub fn golden_section<F>(f: F, mut a: f64, mut b: f64, x_tol: f64) -> Result<Minimum>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    while (b - a).abs() > x_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Ok(Minimum {
        x,
        value,
        evaluations,
    })
}

/// Evaluates `f` on `lo, lo + step, …, hi` and refines around the smallest
/// grid value with [`golden_section`]. The refined point is kept only if it
/// improves on the grid value.
pub fn grid_then_golden<F>(f: F, lo: f64, hi: f64, step: f64, x_tol: f64) -> Result<Minimum>
where
    F: Fn(f64) -> Result<f64>,
{
    let cells = ((hi - lo) / step).round() as usize;
    let mut best = (lo, f(lo)?);
    for i in 1..=cells {
        let x = if i == cells { hi } else { lo + i as f64 * step };
        let v = f(x)?;
        if v < best.1 {
            best = (x, v);
        }
    }
    let a = (best.0 - step).max(lo);
    let b = (best.0 + step).min(hi);
    let refined = golden_section(&f, a, b, x_tol)?;
    let evaluations = cells + 1 + refined.evaluations;
    Ok(if refined.value <= best.1 {
        Minimum {
            evaluations,
            ..refined
        }
    } else {
        Minimum {
            x: best.0,
            value: best.1,
            evaluations,
        }
    })
}
