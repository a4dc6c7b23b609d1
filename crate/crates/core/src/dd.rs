//! Double-double ("double-word") floating point: an unevaluated sum `hi + lo`
//! of two `f64` with `|lo| ≤ ulp(hi)/2`, giving about 32 significant digits.
//!
//! Only the operations the gap engine needs are provided. Error-free
//! transformations follow Dekker and Knuth; products use a fused multiply-add.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

// requires |a| ≥ |b|
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Dd {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact for `|n| < 2^106`, rounded to about 106 bits beyond.
    pub fn from_i128(n: i128) -> Dd {
        // Three 43-bit chunks, each exact in an f64.
        const MASK: i128 = (1 << 43) - 1;
        let c2 = (n >> 86) as f64;
        let c1 = ((n >> 43) & MASK) as f64;
        let c0 = (n & MASK) as f64;
        Dd::from_f64(c2 * 2f64.powi(86)) + Dd::from_f64(c1 * 2f64.powi(43)) + Dd::from_f64(c0)
    }

    pub fn from_u128(n: u128) -> Dd {
        if n <= i128::MAX as u128 {
            Dd::from_i128(n as i128)
        } else {
            Dd::from_i128((n >> 1) as i128).mul_f64(2.0) + Dd::from_f64((n & 1) as f64)
        }
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_zero(&self) -> bool {
        self.hi == 0.0
    }

    pub fn is_sign_negative(&self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    pub fn abs(self) -> Dd {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        Dd::renorm(p1, p2 + self.lo * b)
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // One Newton step from the double-precision root doubles the digits.
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let residual = (self - Dd { hi: p, lo: e }).hi;
        Dd::renorm(x, residual / (2.0 * x))
    }

    pub fn powi(self, exp: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Positive real `n`-th root of a non-negative value.
    pub fn nth_root(self, n: u32) -> Dd {
        assert!(n >= 1, "root order must be positive");
        if n == 1 || self.is_zero() {
            return self;
        }
        if n == 2 {
            return self.sqrt();
        }
        let mut y = Dd::from_f64(self.to_f64().powf(1.0 / n as f64));
        for _ in 0..2 {
            let y_pow = y.powi(n - 1);
            let f = y_pow * y - self;
            y = y - f / y_pow.mul_f64(n as f64);
        }
        y
    }

    pub fn floor(self) -> Dd {
        let hi = self.hi.floor();
        if hi == self.hi {
            Dd::renorm(hi, self.lo.floor())
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn total_cmp(&self, other: &Dd) -> Ordering {
        self.hi
            .total_cmp(&other.hi)
            .then_with(|| self.lo.total_cmp(&other.lo))
    }

    /// Scientific notation with `digits` significant digits (1..=34), such as
    /// `1.41421356237309504880168872420970e0`.
    pub fn to_sci_string(&self, digits: usize) -> String {
        let digits = digits.clamp(1, 34);
        if !self.hi.is_finite() {
            return format!("{}", self.hi);
        }
        if self.is_zero() {
            return if digits == 1 {
                "0e0".to_string()
            } else {
                format!("0.{}e0", "0".repeat(digits - 1))
            };
        }
        let neg = self.is_sign_negative();
        let mut x = self.abs();
        let mut exp = x.hi.log10().floor() as i32;
        x = x / Dd::from_f64(10.0).powi_signed(exp);
        // log10 can be off by one near powers of ten.
        if x.hi >= 10.0 {
            x = x / Dd::from_f64(10.0);
            exp += 1;
        } else if x.hi < 1.0 {
            x = x * Dd::from_f64(10.0);
            exp -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.floor().hi.clamp(0.0, 9.0);
            ds.push(d as u8);
            x = (x - Dd::from_f64(d)).mul_f64(10.0);
        }
        // round half up on the guard digit
        let guard = ds.pop().unwrap_or(0);
        if guard >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut s = String::with_capacity(digits + 8);
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push('e');
        s.push_str(&exp.to_string());
        s
    }

    fn powi_signed(self, exp: i32) -> Dd {
        if exp >= 0 {
            self.powi(exp as u32)
        } else {
            Dd::ONE / self.powi(exp.unsigned_abs())
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;

    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Dd::renorm(s1, s2 + t2)
    }
}

impl Sub for Dd {
    type Output = Dd;

    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;

    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        Dd::renorm(p1, p2 + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for Dd {
    type Output = Dd;

    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        Dd::renorm(q1, q2) + Dd::from_f64(q3)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(17);
        f.write_str(&self.to_sci_string(digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_integer::Roots;
    use proptest::prelude::*;

    #[test]
    fn sqrt2_digits() {
        let s = Dd::from_f64(2.0).sqrt();
        assert_eq!(s.to_sci_string(32), "1.4142135623730950488016887242097e0");
    }

    #[test]
    fn cbrt_and_integer_roundtrip() {
        let x = Dd::from_u128(1_000_000_007);
        let r = x.nth_root(3);
        let back = r.powi(3);
        let rel = ((back - x) / x).abs().to_f64();
        assert!(rel < 1e-30, "{rel}");
    }

    #[test]
    fn from_i128_is_exact_below_2_106() {
        let n: i128 = (1i128 << 105) + 12345;
        let d = Dd::from_i128(n);
        assert_eq!(d.hi as i128 + d.lo as i128, n);
        let big = i128::MAX;
        assert!(Dd::from_i128(big).to_f64() > 1.7e38);
        assert_eq!(Dd::from_i128(-7).to_f64(), -7.0);
        assert_eq!(Dd::from_u128(u128::MAX).to_f64(), u128::MAX as f64);
    }

    #[test]
    fn formatting_rounds_and_carries() {
        assert_eq!(Dd::from_f64(9.9999).to_sci_string(3), "1.00e1");
        assert_eq!(Dd::from_f64(0.125).to_sci_string(2), "1.3e-1");
        assert_eq!(Dd::from_f64(-2.5).to_sci_string(1), "-3e0");
        assert_eq!(Dd::ZERO.to_sci_string(3), "0.00e0");
        assert_eq!(format!("{:.4}", Dd::from_f64(1234.5)), "1.235e3");
    }

    #[test]
    fn sqrt_matches_bigint_reference() {
        // 30 significant digits against an exact integer square root.
        let scale = BigUint::from(10u32).pow(80);
        for n in [2u64, 3, 5, 1_000_003, 999_999_999_989] {
            let reference = (BigUint::from(n) * &scale).sqrt();
            let got = Dd::from_u128(n as u128).sqrt();
            let s = got.to_sci_string(30);
            let digits: String = s.split('e').next().unwrap().replace('.', "");
            let got30: BigUint = digits.parse().unwrap();
            let ref30: BigUint = reference.to_string()[..30].parse().unwrap();
            let diff = if got30 > ref30 { &got30 - &ref30 } else { &ref30 - &got30 };
            assert!(diff <= BigUint::from(2u32), "n={n}: {got30} vs {ref30}");
        }
    }

    proptest! {
        #[test]
        fn add_sub_roundtrip(a in -1e12f64..1e12, b in -1e12f64..1e12) {
            let x = Dd::from_f64(a) + Dd::from_f64(b);
            let back = x - Dd::from_f64(b);
            prop_assert_eq!(back.to_f64(), a);
        }

        #[test]
        fn div_inverts_mul(a in 1e-6f64..1e9, b in 1e-6f64..1e9) {
            let x = Dd::from_f64(a) * Dd::from_f64(b);
            let back = x / Dd::from_f64(b);
            let rel = ((back - Dd::from_f64(a)) / Dd::from_f64(a)).abs().to_f64();
            prop_assert!(rel < 1e-30);
        }

        #[test]
        fn nth_root_inverts_powi(n in 1u64..u64::MAX / 4, k in 2u32..7) {
            let x = Dd::from_u128(n as u128);
            let r = x.nth_root(k);
            let rel = ((r.powi(k) - x) / x).abs().to_f64();
            prop_assert!(rel < 1e-29);
            let floor_root = (n as u128).nth_root(k);
            prop_assert_eq!(r.floor().to_f64() as u128, floor_root);
        }
    }
}
