//! Unpooled two-sample Wald tests with a standard normal reference.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    /// Wald statistic; infinite when both binary arms are degenerate at
    /// different values.
    pub z: f64,
    pub reject: bool,
    pub alpha: f64,
    /// Treatment minus control.
    pub estimate_diff: f64,
}

impl TestOutcome {
    fn from_z(z: f64, alpha: f64, estimate_diff: f64) -> Result<Self> {
        Ok(TestOutcome {
            z,
            reject: z.abs() >= z_crit(alpha)?,
            alpha,
            estimate_diff,
        })
    }
}

/// Wald test for a difference in proportions using the raw arm proportions.
///
/// When the estimated standard error is zero every observation within an
/// arm is identical. Equal proportions then give z = 0; unequal ones give
/// an infinite statistic with the sign of the difference.
pub fn wald_binary(n0: usize, s0: usize, n1: usize, s1: usize, alpha: f64) -> Result<TestOutcome> {
    if n0 == 0 || n1 == 0 {
        return Err(Error::InsufficientData(
            "each arm needs at least one patient".into(),
        ));
    }
    if s0 > n0 || s1 > n1 {
        return Err(Error::domain(format!(
            "successes exceed arm size: {s0}/{n0}, {s1}/{n1}"
        )));
    }
    let (p0, p1) = (s0 as f64 / n0 as f64, s1 as f64 / n1 as f64);
    let diff = p1 - p0;
    let se = (p0 * (1.0 - p0) / n0 as f64 + p1 * (1.0 - p1) / n1 as f64).sqrt();
    let z = if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    TestOutcome::from_z(z, alpha, diff)
}

/// Welch-type Wald test for a difference in means from sufficient
/// statistics (`ssd` is the sum of squared deviations about the arm mean).
pub fn wald_continuous(
    n0: usize,
    mean0: f64,
    ssd0: f64,
    n1: usize,
    mean1: f64,
    ssd1: f64,
    alpha: f64,
) -> Result<TestOutcome> {
    if n0 < 2 || n1 < 2 {
        return Err(Error::InsufficientData(format!(
            "continuous Wald test needs at least 2 patients per arm, got ({n0}, {n1})"
        )));
    }
    let v0 = ssd0 / (n0 - 1) as f64;
    let v1 = ssd1 / (n1 - 1) as f64;
    let diff = mean1 - mean0;
    let se = (v0 / n0 as f64 + v1 / n1 as f64).sqrt();
    let z = if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    TestOutcome::from_z(z, alpha, diff)
}

/// Two-sided critical value: the upper alpha/2 standard normal quantile.
pub fn z_crit(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    Ok(-normal_quantile(alpha / 2.0))
}

/// Standard normal quantile by Wichura's algorithm AS 241 (PPND16),
/// accurate to about 1e-16 relative error.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

fn poly(coef: &[f64; 8], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

const A: [f64; 8] = [
    3.387_132_872_796_366_5,
    1.331_416_678_917_843_8e2,
    1.971_590_950_306_551_3e3,
    1.373_169_376_550_946e4,
    4.592_195_393_154_987e4,
    6.726_577_092_700_87e4,
    3.343_057_558_358_813e4,
    2.509_080_928_730_122_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091e1,
    6.871_870_074_920_579e2,
    5.394_196_021_424_751e3,
    2.121_379_430_158_659_7e4,
    3.930_789_580_009_271e4,
    2.872_908_573_572_194_3e4,
    5.226_495_278_852_545e3,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_5,
    4.630_337_846_156_546,
    5.769_497_221_460_691,
    3.647_848_324_763_204_5,
    1.270_458_252_452_368_4,
    2.417_807_251_774_506e-1,
    2.272_384_498_926_918_4e-2,
    7.745_450_142_783_414e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_759,
    1.676_384_830_183_803_8,
    6.897_673_349_851e-1,
    1.481_039_764_274_800_8e-1,
    1.519_866_656_361_645_7e-2,
    5.475_938_084_995_345e-4,
    1.050_750_071_644_416_9e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103,
    5.463_784_911_164_114,
    1.784_826_539_917_291_3,
    2.965_605_718_285_048_7e-1,
    2.653_218_952_657_612_4e-2,
    1.242_660_947_388_078_4e-3,
    2.711_555_568_743_487_6e-5,
    2.010_334_399_292_288_1e-7,
];
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_88e-1,
    1.369_298_809_227_358e-1,
    1.487_536_129_085_061_5e-2,
    7.868_691_311_456_133e-4,
    1.846_318_317_510_054_8e-5,
    1.421_511_758_316_446e-7,
    2.044_263_103_389_939_8e-15,
];
