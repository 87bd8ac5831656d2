//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const DEFAULT_MAX_SUBDIVISIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_centre = f(centre);
    let mut kronrod = WGK[7] * f_centre;
    let mut gauss = WG[3] * f_centre;
    let mut res_abs = kronrod.abs();
    let mut fv = [(0.0, 0.0); 7];

    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let lo = f(centre - dx);
        let hi = f(centre + dx);
        *slot = (lo, hi);
        kronrod += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (f_centre - mean).abs();
    for (j, (lo, hi)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }

    let abs_half = half.abs();
    Panel {
        a,
        b,
        value: kronrod * half,
        error: rescale_error(
            (kronrod - gauss) * half,
            res_abs * abs_half,
            res_asc * abs_half,
        ),
    }
}

/// Integrates `f` over `[a, b]` until the summed panel error estimate drops
/// below `abs_tol`, bisecting the worst panel at each step.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadratureResult> {
    let mut panels = vec![gauss_kronrod_15(&f, a, b)];
    let mut evaluations = 15;
    loop {
        let (value, error) = panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if error <= abs_tol {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        if panels.len() >= max_subdivisions {
            return Err(Error::Quadrature {
                requested: abs_tol,
                achieved: error,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        panels.push(gauss_kronrod_15(&f, a, mid));
        panels.push(gauss_kronrod_15(&f, mid, b));
        evaluations += 30;
    }
}
