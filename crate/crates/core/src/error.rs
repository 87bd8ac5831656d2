use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the set on which the operation is defined.
    #[error("{name} = {value} is outside the valid domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("response table has {found} for {what}, the design expects {expected}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error(
        "quadrature did not reach tolerance {requested:e} (achieved error estimate {achieved:e})"
    )]
    Quadrature { requested: f64, achieved: f64 },

    /// The bivariate-cdf and conditional-quadrature evaluations of the joint
    /// tail probability disagree.
    #[error(
        "joint tail routes disagree: quadrature {quadrature}, bivariate cdf {bivariate} (gap {:e} > {tolerance:e})",
        (quadrature - bivariate).abs()
    )]
    RouteDisagreement {
        quadrature: f64,
        bivariate: f64,
        tolerance: f64,
    },
}

pub(crate) fn ensure_level(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "0 < value < 1",
        })
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite",
        })
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite and > 0",
        })
    }
}
