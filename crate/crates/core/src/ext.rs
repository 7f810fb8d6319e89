//! Extended-exponent floating point scalar.
//!
//! Series coefficients of high degree leave the `f64` exponent range, and
//! in several systems the coefficients of one layer come out of sums that
//! cancel by many orders of magnitude. The value is therefore kept as an
//! unevaluated pair `hi + lo` of doubles (about 106 significant bits) scaled
//! by a binary exponent held in an `i64`.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

const EXP_MASK: u64 = 0x7ff << 52;
const LN_2: f64 = core::f64::consts::LN_2;
/// Exponent gap beyond which the smaller addend cannot affect the sum.
const MAX_GAP: i64 = 110;

/// `(hi + lo) * 2^exponent` with `|hi|` in `[1, 2)` and `hi = fl(hi + lo)`.
///
/// The sign is carried by `hi`; zero is the unique value with `hi = 0`,
/// `lo = 0` and a zero exponent.
#[derive(Clone, Copy, Default)]
pub struct ExtFloat {
    hi: f64,
    lo: f64,
    e: i64,
}

/// `2^k` for `-1022 <= k <= 1023`.
#[inline]
fn pow2(k: i64) -> f64 {
    f64::from_bits(((1023 + k) as u64) << 52)
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Exact product `a * b = p + err` for moderate magnitudes.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

#[inline]
fn dd_add(ah: f64, al: f64, bh: f64, bl: f64) -> (f64, f64) {
    let (s1, s2) = two_sum(ah, bh);
    let (t1, t2) = two_sum(al, bl);
    let (s1, s2) = quick_two_sum(s1, s2 + t1);
    quick_two_sum(s1, s2 + t2)
}

#[inline]
fn dd_mul(ah: f64, al: f64, bh: f64, bl: f64) -> (f64, f64) {
    let (p, e) = two_prod(ah, bh);
    quick_two_sum(p, e + (ah * bl + al * bh))
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { hi: 0.0, lo: 0.0, e: 0 };
    pub const ONE: ExtFloat = ExtFloat { hi: 1.0, lo: 0.0, e: 0 };

    /// Renormalize a pair whose leading part is zero or of magnitude in
    /// `[2^-1000, 2^1000]`.
    #[inline]
    fn norm(hi: f64, lo: f64, e: i64) -> ExtFloat {
        if hi == 0.0 {
            return ExtFloat::ZERO;
        }
        let k = ((hi.to_bits() & EXP_MASK) >> 52) as i64 - 1023;
        if k == 0 {
            return ExtFloat { hi, lo, e };
        }
        let s = pow2(-k);
        ExtFloat { hi: hi * s, lo: lo * s, e: e + k }
    }

    /// Build from raw parts. `mantissa` must be zero or have magnitude in `[1, 2)`.
    pub fn from_parts(sign: i8, mantissa: f64, exponent: i64) -> Option<ExtFloat> {
        ExtFloat::from_parts_ext(sign, mantissa, 0.0, exponent)
    }

    /// Build from a leading mantissa and a trailing correction, both given
    /// for the magnitude. Requires `mantissa = fl(mantissa + tail)`.
    pub fn from_parts_ext(sign: i8, mantissa: f64, tail: f64, exponent: i64) -> Option<ExtFloat> {
        match sign {
            0 if mantissa == 0.0 && tail == 0.0 => Some(ExtFloat::ZERO),
            1 | -1
                if (1.0..2.0).contains(&mantissa)
                    && tail.is_finite()
                    && mantissa + tail == mantissa =>
            {
                let s = f64::from(sign);
                Some(ExtFloat { hi: s * mantissa, lo: s * tail, e: exponent })
            }
            _ => None,
        }
    }

    pub fn from_f64(x: f64) -> ExtFloat {
        debug_assert!(x.is_finite(), "non-finite input {x}");
        if x == 0.0 || !x.is_finite() {
            return ExtFloat::ZERO;
        }
        let (fr, ex) = libm::frexp(x);
        ExtFloat { hi: 2.0 * fr, lo: 0.0, e: ex as i64 - 1 }
    }

    /// Nearest `f64`; overflows to `±inf`, underflows to `±0`.
    pub fn to_f64(self) -> f64 {
        if self.hi == 0.0 {
            0.0
        } else if self.e > 1023 {
            f64::INFINITY.copysign(self.hi)
        } else if self.e < -1080 {
            0.0f64.copysign(self.hi)
        } else {
            libm::ldexp(self.hi, self.e as i32)
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn sign(self) -> i8 {
        if self.hi > 0.0 {
            1
        } else if self.hi < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Leading mantissa magnitude in `[1, 2)`, or 0.
    #[inline]
    pub fn mantissa(self) -> f64 {
        self.hi.abs()
    }

    /// Trailing correction to [`mantissa`](Self::mantissa), for the magnitude.
    #[inline]
    pub fn mantissa_tail(self) -> f64 {
        if self.hi < 0.0 {
            -self.lo
        } else {
            self.lo
        }
    }

    #[inline]
    pub fn exponent(self) -> i64 {
        self.e
    }

    #[inline]
    pub fn abs(self) -> ExtFloat {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        if self.hi == 0.0 {
            return f64::NEG_INFINITY;
        }
        libm::log(self.hi.abs()) + self.lo / self.hi + self.e as f64 * LN_2
    }

    /// Positive value with the given natural log.
    pub fn from_ln(ln: f64) -> ExtFloat {
        if ln == f64::NEG_INFINITY {
            return ExtFloat::ZERO;
        }
        let l2 = ln / LN_2;
        let e = libm::floor(l2);
        let m = libm::exp((l2 - e) * LN_2);
        ExtFloat::norm(m, 0.0, e as i64)
    }

    /// Multiply by `2^k`.
    #[inline]
    pub fn ldexp(self, k: i64) -> ExtFloat {
        if self.hi == 0.0 {
            self
        } else {
            ExtFloat { hi: self.hi, lo: self.lo, e: self.e + k }
        }
    }

    pub fn recip(self) -> ExtFloat {
        ExtFloat::ONE / self
    }

    pub fn powi(self, mut k: u32) -> ExtFloat {
        let mut base = self;
        let mut acc = ExtFloat::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// `self + a * b`.
    #[inline]
    pub fn mul_add(self, a: ExtFloat, b: ExtFloat) -> ExtFloat {
        self + a * b
    }

    pub fn mul_f64(self, x: f64) -> ExtFloat {
        self * ExtFloat::from_f64(x)
    }

    /// Compare magnitudes.
    pub fn cmp_abs(&self, other: &ExtFloat) -> Ordering {
        match (self.hi == 0.0, other.hi == 0.0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.e.cmp(&other.e).then_with(|| {
                let a = self.abs();
                let b = other.abs();
                a.hi.total_cmp(&b.hi).then(a.lo.total_cmp(&b.lo))
            }),
        }
    }

    pub fn max_abs(self, other: ExtFloat) -> ExtFloat {
        if self.cmp_abs(&other) == Ordering::Less {
            other.abs()
        } else {
            self.abs()
        }
    }
}

impl From<f64> for ExtFloat {
    fn from(x: f64) -> Self {
        ExtFloat::from_f64(x)
    }
}

impl Add for ExtFloat {
    type Output = ExtFloat;
    #[inline]
    fn add(self, rhs: ExtFloat) -> ExtFloat {
        if rhs.hi == 0.0 {
            return self;
        }
        if self.hi == 0.0 {
            return rhs;
        }
        let (big, small) = if self.e >= rhs.e { (self, rhs) } else { (rhs, self) };
        let d = big.e - small.e;
        if d > MAX_GAP {
            return big;
        }
        let s = pow2(-d);
        let (hi, lo) = dd_add(big.hi, big.lo, small.hi * s, small.lo * s);
        ExtFloat::norm(hi, lo, big.e)
    }
}

impl AddAssign for ExtFloat {
    #[inline]
    fn add_assign(&mut self, rhs: ExtFloat) {
        *self = *self + rhs;
    }
}

impl Neg for ExtFloat {
    type Output = ExtFloat;
    #[inline]
    fn neg(self) -> ExtFloat {
        ExtFloat { hi: -self.hi, lo: -self.lo, e: self.e }
    }
}

impl Sub for ExtFloat {
    type Output = ExtFloat;
    #[inline]
    fn sub(self, rhs: ExtFloat) -> ExtFloat {
        self + (-rhs)
    }
}

impl SubAssign for ExtFloat {
    #[inline]
    fn sub_assign(&mut self, rhs: ExtFloat) {
        *self = *self - rhs;
    }
}

impl Mul for ExtFloat {
    type Output = ExtFloat;
    #[inline]
    fn mul(self, rhs: ExtFloat) -> ExtFloat {
        if self.hi == 0.0 || rhs.hi == 0.0 {
            return ExtFloat::ZERO;
        }
        let (hi, lo) = dd_mul(self.hi, self.lo, rhs.hi, rhs.lo);
        let e = self.e + rhs.e;
        if hi.abs() >= 2.0 {
            ExtFloat { hi: hi * 0.5, lo: lo * 0.5, e: e + 1 }
        } else {
            ExtFloat { hi, lo, e }
        }
    }
}

impl MulAssign for ExtFloat {
    #[inline]
    fn mul_assign(&mut self, rhs: ExtFloat) {
        *self = *self * rhs;
    }
}

impl Div for ExtFloat {
    type Output = ExtFloat;
    fn div(self, rhs: ExtFloat) -> ExtFloat {
        assert!(rhs.hi != 0.0, "ExtFloat division by zero");
        if self.hi == 0.0 {
            return ExtFloat::ZERO;
        }
        // long division: one correction step on the leading quotient
        let q1 = self.hi / rhs.hi;
        let (ph, pl) = dd_mul(q1, 0.0, rhs.hi, rhs.lo);
        let (rh, rl) = dd_add(self.hi, self.lo, -ph, -pl);
        let q2 = (rh + rl) / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        ExtFloat::norm(hi, lo, self.e - rhs.e)
    }
}

impl PartialEq for ExtFloat {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo && (self.hi == 0.0 || self.e == other.e)
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (s, o) = (self.sign(), other.sign());
        if s != o {
            return s.partial_cmp(&o);
        }
        let mag = self.cmp_abs(other);
        Some(if s < 0 { mag.reverse() } else { mag })
    }
}

impl fmt::Debug for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hi == 0.0 {
            return write!(f, "0");
        }
        if (-1000..1000).contains(&self.e) {
            return write!(f, "{:e}", self.to_f64());
        }
        // decimal scientific notation from the log10 magnitude
        let l10 = self.ln_abs() / core::f64::consts::LN_10;
        let e10 = libm::floor(l10);
        let m10 = libm::pow(10.0, l10 - e10);
        let sign = if self.hi < 0.0 { "-" } else { "" };
        write!(f, "{sign}{m10:.6}e{}", e10 as i64)
    }
}
