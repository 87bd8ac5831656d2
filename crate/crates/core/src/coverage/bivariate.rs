//! Standard bivariate normal distribution function.
//!
//! Drezner & Wesolowsky's single-integral reduction with Genz's
//! double-precision refinements: for |ρ| ≤ 0.925 the Plackett integral over
//! the correlation is taken in the arcsine variable; closer to ±1 the
//! integrand is expanded around the singular point and the remainder is
//! integrated numerically. Fixed Gauss–Legendre rules are used throughout.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use crate::normal::cdf;

const TWO_PI: f64 = 2.0 * PI;

// (weight, node) on [-1, 0]; the rule is mirrored to cover [-1, 1].
const GL6: [(f64, f64); 3] = [
    (0.171_324_492_379_170_5, -0.932_469_514_203_152_2),
    (0.360_761_573_048_138_4, -0.661_209_386_466_264_7),
    (0.467_913_934_572_690_4, -0.238_619_186_083_197_0),
];
const GL12: [(f64, f64); 6] = [
    (0.047_175_336_386_511_77, -0.981_560_634_246_719_1),
    (0.106_939_325_995_318_3, -0.904_117_256_370_475_0),
    (0.160_078_328_543_346_4, -0.769_902_674_194_305_0),
    (0.203_167_426_723_065_9, -0.587_317_954_286_617_1),
    (0.233_492_536_538_354_7, -0.367_831_498_998_180_2),
    (0.249_147_045_813_402_9, -0.125_233_408_511_469_2),
];
const GL20: [(f64, f64); 10] = [
    (0.017_614_007_139_152_12, -0.993_128_599_185_094_9),
    (0.040_601_429_800_386_94, -0.963_971_927_277_913_8),
    (0.062_672_048_334_109_06, -0.912_234_428_251_325_9),
    (0.083_276_741_576_704_75, -0.839_116_971_822_218_8),
    (0.101_930_119_817_240_4, -0.746_331_906_460_150_8),
    (0.118_194_531_961_518_4, -0.636_053_680_726_515_0),
    (0.131_688_638_449_176_6, -0.510_867_001_950_827_1),
    (0.142_096_109_318_382_1, -0.373_706_088_715_419_6),
    (0.149_172_986_472_603_7, -0.227_785_851_141_645_1),
    (0.152_753_387_130_725_9, -0.076_526_521_133_497_33),
];

fn rule_for(rho_abs: f64) -> &'static [(f64, f64)] {
    if rho_abs < 0.3 {
        &GL6
    } else if rho_abs < 0.75 {
        &GL12
    } else {
        &GL20
    }
}

/// Upper orthant `P(X > h, Y > k)` for a standard bivariate normal with
/// correlation `rho`.
pub fn upper_orthant(h: f64, k: f64, rho: f64) -> f64 {
    let rule = rule_for(rho.abs());
    let hk = h * k;

    if rho.abs() < 0.925 {
        let mut sum = 0.0;
        if rho != 0.0 {
            let hs = 0.5 * (h * h + k * k);
            let asr = rho.asin();
            for &(w, x) in rule {
                for node in [x, -x] {
                    let sn = (0.5 * asr * (node + 1.0)).sin();
                    sum += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
                }
            }
            sum *= asr / (2.0 * TWO_PI);
        }
        return sum + cdf(-h) * cdf(-k);
    }

    // Near-singular correlation: reflect onto rho > 0.
    let (h, k, hk) = if rho < 0.0 { (h, -k, -hk) } else { (h, k, hk) };
    let mut bvn = 0.0;
    if rho.abs() < 1.0 {
        let a_sq = (1.0 - rho) * (1.0 + rho);
        let mut a = a_sq.sqrt();
        let b_sq = (h - k) * (h - k);
        let b = (h - k).abs();
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        let exponent = -0.5 * (b_sq / a_sq + hk);
        if exponent > -100.0 {
            bvn = a
                * exponent.exp()
                * (1.0 - c * (b_sq - a_sq) * (1.0 - d * b_sq / 5.0) / 3.0
                    + c * d * a_sq * a_sq / 5.0);
        }
        if hk > -100.0 {
            bvn -= (-0.5 * hk).exp()
                * TWO_PI.sqrt()
                * cdf(-b / a)
                * b
                * (1.0 - c * b_sq * (1.0 - d * b_sq / 5.0) / 3.0);
        }
        a *= 0.5;
        for &(w, x) in rule {
            for node in [x, -x] {
                let xs = (a * (node + 1.0)).powi(2);
                let rs = (1.0 - xs).sqrt();
                let exponent = -0.5 * (b_sq / xs + hk);
                if exponent > -100.0 {
                    bvn += a
                        * w
                        * exponent.exp()
                        * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs
                            - (1.0 + c * xs * (1.0 + d * xs)));
                }
            }
        }
        bvn /= -TWO_PI;
    }
    if rho > 0.0 {
        bvn + cdf(-h.max(k))
    } else {
        let mut out = -bvn;
        if k > h {
            out += cdf(k) - cdf(h);
        }
        out
    }
}

/// Lower orthant `P(X < h, Y < k)`, accepting infinite limits.
pub fn lower_orthant(h: f64, k: f64, rho: f64) -> f64 {
    if h == f64::NEG_INFINITY || k == f64::NEG_INFINITY {
        0.0
    } else if h == f64::INFINITY {
        cdf(k)
    } else if k == f64::INFINITY {
        cdf(h)
    } else {
        upper_orthant(-h, -k, rho)
    }
}

/// `P(x_lo < X < x_hi, y_lo < Y < y_hi)` by inclusion–exclusion.
pub fn rectangle(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, rho: f64) -> f64 {
    if x_hi <= x_lo || y_hi <= y_lo {
        return 0.0;
    }
    lower_orthant(x_hi, y_hi, rho) - lower_orthant(x_lo, y_hi, rho) - lower_orthant(x_hi, y_lo, rho)
        + lower_orthant(x_lo, y_lo, rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ∫_{-∞}^{h} φ(x) Φ((k − ρx)/√(1−ρ²)) dx by composite Simpson on
    /// [-12, h] with 20 000 panels.
    fn conditional_oracle(h: f64, k: f64, rho: f64) -> f64 {
        let lo = -12.0;
        if h <= lo {
            return 0.0;
        }
        let n = 20_000;
        let step = (h - lo) / n as f64;
        let s = (1.0 - rho * rho).sqrt();
        let f = |x: f64| crate::normal::pdf(x) * cdf((k - rho * x) / s);
        let mut sum = f(lo) + f(h);
        for i in 1..n {
            let x = lo + i as f64 * step;
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        sum * step / 3.0
    }

    #[test]
    fn independent_case_factorises() {
        for (h, k) in [(0.3, -1.2), (2.0, 2.0), (-3.0, 0.5)] {
            let v = lower_orthant(h, k, 0.0);
            assert!((v - cdf(h) * cdf(k)).abs() < 1e-16);
        }
    }

    #[test]
    fn origin_orthant_closed_form() {
        for rho in [
            -0.99,
            -0.93,
            -0.5,
            0.1,
            0.6,
            0.9,
            3.0 / 11f64.sqrt(),
            0.93,
            0.999,
        ] {
            let v = lower_orthant(0.0, 0.0, rho);
            let exact = 0.25 + rho.asin() / TWO_PI;
            assert!((v - exact).abs() < 1e-14, "rho={rho} v={v} exact={exact}");
        }
    }

    #[test]
    fn matches_conditional_integral() {
        let points = [
            (0.5, -0.2),
            (-1.3, 2.1),
            (1.96, 1.645),
            (-1.96, -1.645),
            (2.5, -0.3),
            (-0.4, -2.8),
        ];
        for rho in [-0.95, -0.6, 0.2, 0.5, 3.0 / 11f64.sqrt(), 0.95, 0.99] {
            for &(h, k) in &points {
                let v = lower_orthant(h, k, rho);
                let o = conditional_oracle(h, k, rho);
                assert!((v - o).abs() < 1e-12, "h={h} k={k} rho={rho}: {v} vs {o}");
            }
        }
    }

    #[test]
    fn infinite_limits_reduce_to_margins() {
        let rho = 0.7;
        assert_eq!(lower_orthant(f64::NEG_INFINITY, 0.4, rho), 0.0);
        assert_eq!(lower_orthant(f64::INFINITY, 0.4, rho), cdf(0.4));
        assert_eq!(lower_orthant(-0.2, f64::INFINITY, rho), cdf(-0.2));
        let full = rectangle(f64::NEG_INFINITY, f64::INFINITY, -1.0, 1.0, rho);
        assert!((full - (cdf(1.0) - cdf(-1.0))).abs() < 1e-15);
    }

    #[test]
    fn rectangle_is_nonnegative_and_ordered() {
        assert_eq!(rectangle(1.0, 0.0, -1.0, 1.0, 0.5), 0.0);
        let small = rectangle(-0.5, 0.5, -0.5, 0.5, 0.9);
        let big = rectangle(-1.0, 1.0, -1.0, 1.0, 0.9);
        assert!(small > 0.0 && big > small);
    }
}
