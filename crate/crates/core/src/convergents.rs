//! Continued-fraction convergents of a slope given as a decimal string.

use crate::error::{Error, Result};
use crate::potential::RationalAngle;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Positive slope held exactly as `num / den` with `den` a power of ten
/// (or an exact ratio). Decimal input should carry at least 30 digits so
/// convergents with `q` up to about `10^13` are certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Slope {
    num: i128,
    den: i128,
    /// Exact ratio rather than a decimal with `den = 10^digits`.
    exact: bool,
}

pub const GOLDEN_RATIO: &str = "1.618033988749894848204586834365638";
pub const SQRT_2: &str = "1.414213562373095048801688724209698";

impl Slope {
    pub fn ratio(p: i64, q: i64) -> Result<Self> {
        if p <= 0 || q <= 0 {
            return Err(Error::InvalidSlope(format!("{p}/{q} is not a positive ratio")));
        }
        Ok(Self { num: p as i128, den: q as i128, exact: true })
    }

    pub fn golden() -> Self {
        GOLDEN_RATIO.parse().expect("valid constant")
    }

    pub fn sqrt2() -> Self {
        SQRT_2.parse().expect("valid constant")
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    /// Exact test of `|alpha - p/q| < 1/q^2`, i.e. `|num q - p den| q < den`.
    pub fn within_inverse_square(&self, p: i128, q: i128) -> bool {
        if p < 0 || q <= 0 {
            return false;
        }
        let a = wide_mul(self.num as u128, q as u128);
        let b = wide_mul(p as u128, self.den as u128);
        let e = if a >= b { wide_sub(a, b) } else { wide_sub(b, a) };
        if e.0 != 0 {
            return false;
        }
        wide_mul(e.1, q as u128) < (0, self.den as u128)
    }
}

/// 256-bit product as `(hi, lo)`.
fn wide_mul(a: u128, b: u128) -> (u128, u128) {
    let mask = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & mask);
    let (b1, b0) = (b >> 64, b & mask);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    let lo = (p00 & mask) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

fn wide_sub(a: (u128, u128), b: (u128, u128)) -> (u128, u128) {
    let (lo, borrow) = a.1.overflowing_sub(b.1);
    (a.0 - b.0 - borrow as u128, lo)
}

impl FromStr for Slope {
    type Err = Error;

    /// Accepts `"a.bcd..."` decimals or `"p/q"` ratios.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::InvalidSlope(format!("`{s}`: {why}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad("numerator is not an integer"))?;
            let q: i64 = q.trim().parse().map_err(|_| bad("denominator is not an integer"))?;
            return Slope::ratio(p, q);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad("empty"));
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad("only plain positive decimals are accepted"));
        }
        let digits = format!("{int}{frac}");
        let digits = digits.trim_start_matches('0');
        let mut num: i128 = 0;
        for c in digits.chars() {
            num = num.checked_mul(10).and_then(|n| n.checked_add((c as u8 - b'0') as i128)).ok_or_else(|| bad("too many digits for 128-bit arithmetic"))?;
        }
        let den = 10i128.checked_pow(frac.len() as u32).ok_or_else(|| bad("too many fractional digits"))?;
        if num == 0 {
            return Err(bad("slope must be positive"));
        }
        Ok(Self { num, den, exact: false })
    }
}

impl TryFrom<String> for Slope {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Slope> for String {
    fn from(s: Slope) -> String {
        s.to_string()
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            return write!(f, "{}/{}", self.num, self.den);
        }
        let digits = self.den.to_string().len() - 1;
        let frac = (self.num % self.den).to_string();
        write!(f, "{}.{}{}", self.num / self.den, "0".repeat(digits - frac.len()), frac)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergentSequence {
    pub target_slope: Slope,
    pub convergents: Vec<RationalAngle>,
    /// The expansion ended because the slope is exactly `p/q` at working precision.
    pub terminated: bool,
}

/// First `count` convergents `p_n / q_n` of `alpha`.
///
/// Partial quotients come from the exact Euclidean algorithm on `num / den`.
/// For a truncated decimal, a convergent is emitted only while
/// `10 q_n^2 <= den`, where it coincides with the convergent of every real
/// number sharing those digits.
pub fn continued_fraction_convergents(alpha: &Slope, count: usize) -> Result<ConvergentSequence> {
    if count == 0 {
        return Err(Error::InvalidArgument { field: "count", reason: "at least one convergent is required".into() });
    }
    let (mut a, mut b) = (alpha.num, alpha.den);
    let (mut p_prev, mut p) = (0i128, 1i128);
    let (mut q_prev, mut q) = (1i128, 0i128);
    let mut out = Vec::new();
    let mut terminated = false;
    while out.len() < count {
        let quotient = a / b;
        let rem = a % b;
        (p_prev, p) = (p, quotient * p + p_prev);
        (q_prev, q) = (q, quotient * q + q_prev);
        let last = rem == 0;
        if !alpha.exact && !last && q.checked_mul(q).and_then(|s| s.checked_mul(10)).map_or(true, |s| s > alpha.den) {
            break;
        }
        if p > i64::MAX as i128 || q > i64::MAX as i128 {
            break;
        }
        out.push(RationalAngle::new(p as i64, q as i64)?);
        if last {
            terminated = true;
            break;
        }
        (a, b) = (b, rem);
    }
    Ok(ConvergentSequence { target_slope: *alpha, convergents: out, terminated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pairs(s: &ConvergentSequence) -> Vec<(i64, i64)> {
        s.convergents.iter().map(|a| (a.p(), a.q())).collect()
    }

    #[test]
    fn rational_input_terminates_with_itself() {
        let s = continued_fraction_convergents(&"0.75".parse().unwrap(), 10).unwrap();
        assert!(s.terminated);
        assert_eq!(*pairs(&s).last().unwrap(), (3, 4));
        let s = continued_fraction_convergents(&Slope::ratio(3, 4).unwrap(), 10).unwrap();
        assert_eq!(pairs(&s), vec![(0, 1), (1, 1), (3, 4)]);
    }

    #[test]
    fn slope_round_trips_through_text() {
        let g = Slope::golden();
        assert_eq!(g.to_string(), GOLDEN_RATIO);
        assert_eq!(g.to_string().parse::<Slope>().unwrap(), g);
        assert_eq!("5/3".parse::<Slope>().unwrap().to_string(), "5/3");
        assert!("-1.5".parse::<Slope>().is_err());
        assert!("0".parse::<Slope>().is_err());
    }

    #[test]
    fn wide_arithmetic() {
        let big = u128::MAX;
        assert_eq!(wide_mul(big, big), (big - 1, 1));
        assert_eq!(wide_mul(1 << 100, 1 << 100), (1 << 72, 0));
        assert_eq!(wide_sub((1, 0), (0, 1)), (0, big));
        let s = Slope::ratio(3, 4).unwrap();
        assert!(s.within_inverse_square(3, 4));
        assert!(!s.within_inverse_square(1, 2));
    }

    #[test]
    fn certified_length_is_bounded_by_precision() {
        let s = continued_fraction_convergents(&"1.4142".parse().unwrap(), 50).unwrap();
        assert!(!s.terminated);
        assert!(s.convergents.iter().all(|a| 10 * a.q() * a.q() <= 10_000));
    }

    proptest! {
        #[test]
        fn best_approximation_in_exact_arithmetic(digits in "[1-9][0-9]{0,2}\\.[0-9]{30,34}", count in 1usize..25) {
            let alpha: Slope = digits.parse().unwrap();
            let s = continued_fraction_convergents(&alpha, count).unwrap();
            prop_assert!(!s.convergents.is_empty());
            for a in &s.convergents {
                prop_assert!(alpha.within_inverse_square(a.p() as i128, a.q() as i128), "{a}");
            }
            for w in s.convergents.windows(2) {
                prop_assert!(w[1].q() >= w[0].q());
            }
            for w in s.convergents.windows(3) {
                prop_assert!(w[2].q() > w[1].q());
            }
        }
    }
}
