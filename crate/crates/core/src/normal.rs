//! Standard normal density, distribution function and quantiles.
//!
//! The distribution function is built on `erfc`, which keeps full relative
//! precision in the lower tail. Quantiles start from Wichura's AS241
//! rational approximation and are then polished by Newton steps against
//! [`std_normal_cdf`], so a quantile fed back through the cdf reproduces the
//! requested probability to rounding.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{ensure_level, Error, Result};

/// 1/√(2π)
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;

const NEWTON_STEPS: usize = 2;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain {
                name: "probability",
                value,
                expected: "0 <= value <= 1",
            })
        }
    }

    /// Clamps a computed value into `[0, 1]`, absorbing rounding overshoot.
    pub(crate) fn saturating(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::Domain {
                name: "probability",
                value,
                expected: "not NaN",
            });
        }
        Ok(Self(value.clamp(0.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Two-sided critical value `c_a` with `P(-c_a <= Z <= c_a) = 1 - a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantile {
    a: f64,
    c: f64,
}

impl Quantile {
    /// Significance level `a`.
    pub fn level(&self) -> f64 {
        self.a
    }

    /// The critical value `c_a > 0`.
    pub fn value(&self) -> f64 {
        self.c
    }
}

fn reject_nan(name: &'static str, x: f64) -> Result<f64> {
    if x.is_nan() {
        Err(Error::Domain {
            name,
            value: x,
            expected: "not NaN",
        })
    } else {
        Ok(x)
    }
}

#[inline]
pub(crate) fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub(crate) fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `P(lo < Z < hi)`, evaluated on whichever side of zero keeps precision.
#[inline]
pub(crate) fn interval_prob(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        0.0
    } else if lo > 0.0 {
        cdf(-lo) - cdf(-hi)
    } else if hi < 0.0 {
        cdf(hi) - cdf(lo)
    } else {
        // Straddling zero: written so that (lo, hi) and (−hi, −lo) round
        // identically.
        1.0 - (cdf(lo) + cdf(-hi))
    }
}

pub fn std_normal_pdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            name: "x",
            value: x,
            expected: "finite",
        });
    }
    Ok(pdf(x))
}

/// Φ(x). Infinite arguments map to the limits 0 and 1; NaN is rejected.
pub fn std_normal_cdf(x: f64) -> Result<Probability> {
    let x = reject_nan("x", x)?;
    Ok(Probability(cdf(x)))
}

/// Two-sided quantile `c_a`, i.e. Φ⁻¹(1 − a/2).
pub fn std_normal_quantile(a: f64) -> Result<Quantile> {
    let a = ensure_level("a", reject_nan("a", a)?)?;
    // Φ(-c) = a/2 is solved in the lower tail, where erfc is relatively exact.
    let c = -lower_inverse(0.5 * a);
    Ok(Quantile { a, c })
}

/// One-sided inverse Φ⁻¹(p) for `0 < p < 1`.
pub fn inverse_cdf(p: f64) -> Result<f64> {
    let p = ensure_level("p", reject_nan("p", p)?)?;
    Ok(inverse_cdf_unchecked(p))
}

#[inline]
pub(crate) fn inverse_cdf_unchecked(p: f64) -> f64 {
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1).
        -lower_inverse(1.0 - p)
    } else {
        lower_inverse(p)
    }
}

/// Φ⁻¹(p) for `0 < p <= 0.5`.
#[inline]
fn lower_inverse(p: f64) -> f64 {
    let mut x = as241(p);
    for _ in 0..NEWTON_STEPS {
        let density = pdf(x);
        if density == 0.0 {
            break;
        }
        let step = (cdf(x) - p) / density;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}

#[inline]
fn poly(coeffs: &[f64; 8], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
}

// Wichura (1988), algorithm AS241 PPND16.
const A: [f64; 8] = [
    3.387_132_872_796_366_608_0,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083_0e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061_0e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561_0e3,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_90,
    5.769_497_221_460_691_405_50,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    2.417_807_251_774_506_117_70e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_40e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_40,
    6.897_673_349_851_000_045_50e-1,
    1.481_039_764_274_800_745_90e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946_00e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_20,
    5.463_784_911_164_114_369_90,
    1.784_826_539_917_291_335_80,
    2.965_605_718_285_048_912_30e-1,
    2.653_218_952_657_612_309_30e-2,
    1.242_660_947_388_078_438_60e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_90e-1,
    1.369_298_809_227_358_053_10e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591_00e-4,
    1.846_318_317_510_054_681_80e-5,
    1.421_511_758_316_445_888_70e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn as241(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Marsaglia's series Φ(x) = 1/2 + φ(x) Σ x^(2k+1) / (2k+1)!!.
    /// Independent of erfc; accurate to ~1e-15 absolute on [-8, 8].
    fn series_cdf(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut k = 1.0;
        while term.abs() > 1e-300 && k < 2000.0 {
            term *= x2 / (2.0 * k + 1.0);
            let next = sum + term;
            if next == sum {
                break;
            }
            sum = next;
            k += 1.0;
        }
        0.5 + sum * (-0.5 * x2).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn pdf_at_zero() {
        // 1/sqrt(2 pi) to 30 digits: 0.398942280401432677939946059934
        assert!((std_normal_pdf(0.0).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-16);
    }

    #[test]
    fn pdf_deep_tail_does_not_blow_up() {
        let v = std_normal_pdf(40.0).unwrap();
        assert!((0.0..1e-300).contains(&v));
        assert_eq!(std_normal_pdf(2.5).unwrap(), std_normal_pdf(-2.5).unwrap());
    }

    #[test]
    fn non_finite_inputs() {
        assert!(std_normal_pdf(f64::NAN).is_err());
        assert!(std_normal_pdf(f64::INFINITY).is_err());
        assert!(std_normal_cdf(f64::NAN).is_err());
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY).unwrap().value(), 0.0);
        assert_eq!(std_normal_cdf(f64::INFINITY).unwrap().value(), 1.0);
        assert_eq!(std_normal_cdf(0.0).unwrap().value(), 0.5);
    }

    #[test]
    fn cdf_matches_series_oracle_on_grid() {
        let mut worst: f64 = 0.0;
        for i in 0..=1600 {
            let x = -8.0 + i as f64 * 0.01;
            let err = (cdf(x) - series_cdf(x)).abs();
            worst = worst.max(err);
        }
        assert!(worst <= 1e-12, "max abs error {worst:e}");
    }

    #[test]
    fn cdf_root_at_0975() {
        let root = bisect(|x| series_cdf(x) - 0.975, 0.0, 4.0);
        assert!((root - 1.959_964).abs() < 1e-6);
        assert!((cdf(1.959_964) - 0.975).abs() < 1e-8);
    }

    #[test]
    fn two_sided_quantiles_match_bisection_oracle() {
        for (a, approx) in [(0.05, 1.959_964_0), (0.1, 1.644_853_6)] {
            let oracle = bisect(|c| series_cdf(c) - series_cdf(-c) - (1.0 - a), 0.0, 10.0);
            let q = std_normal_quantile(a).unwrap();
            assert!((q.value() - oracle).abs() < 1e-12, "a={a}");
            assert!((q.value() - approx).abs() < 1e-7);
            assert_eq!(q.level(), a);
        }
    }

    #[test]
    fn quantile_inverts_two_sided_mass_at_one() {
        let a = 1.0 - (2.0 * cdf(1.0) - 1.0);
        let c = std_normal_quantile(a).unwrap().value();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_round_trip() {
        for a in [0.001, 0.01, 0.05, 0.1, 0.5] {
            let c = std_normal_quantile(a).unwrap().value();
            assert!(c > 0.0);
            let mass = cdf(c) - cdf(-c);
            assert!((mass - (1.0 - a)).abs() < 1e-10, "a={a}");
        }
    }

    #[test]
    fn quantile_domain() {
        for a in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(std_normal_quantile(a).is_err());
            assert!(inverse_cdf(a).is_err());
        }
    }

    #[test]
    fn one_sided_inverse_round_trip() {
        for p in [1e-300, 1e-20, 1e-8, 0.02, 0.3, 0.5, 0.7, 0.975, 1.0 - 1e-12] {
            let x = inverse_cdf(p).unwrap();
            let back = cdf(x);
            let rel = ((back - p) / p.min(1.0 - p)).abs();
            // Above 0.5 only 1 - p is resolvable, so compare on the tail mass.
            assert!(rel < 1e-9 || (back - p).abs() < 1e-15, "p={p} back={back}");
        }
        assert_eq!(inverse_cdf(0.5).unwrap(), 0.0);
    }

    #[test]
    fn interval_prob_is_precise_in_the_right_tail() {
        let p = interval_prob(10.0, 11.0);
        // mpmath, 40 digits: ncdf(-10) - ncdf(-11)
        let expected = 7.619_661_958_203_076_2e-24;
        assert!(((p - expected) / expected).abs() < 1e-10);
        assert_eq!(interval_prob(1.0, 1.0), 0.0);
    }

    #[test]
    fn interval_prob_is_mirror_exact() {
        for (lo, hi) in [
            (-1.3, 0.7),
            (-0.2, 2.9),
            (0.4, 1.1),
            (-3.0, -0.5),
            (-1.0, 1.0),
        ] {
            assert_eq!(interval_prob(lo, hi), interval_prob(-hi, -lo));
        }
    }
}
