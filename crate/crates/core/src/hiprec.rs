//! Binary fixed-point reals with a few hundred bits, enough to separate ℓp
//! objective values that collide in `f64` and to bound `p*` from below.
//!
//! Values are `BigInt`s scaled by `2^FRAC_BITS`. Every operation truncates,
//! so each result carries an absolute error of a few units in the last
//! place; callers compare with a margin far above that.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::Rational;

pub const FRAC_BITS: u64 = 320;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed(BigInt);

impl Fixed {
    pub fn zero() -> Self {
        Fixed(BigInt::zero())
    }

    pub fn from_rational(q: &Rational) -> Self {
        Fixed((q.numer() << FRAC_BITS).div_floor(q.denom()))
    }

    pub fn from_f64(v: f64) -> Self {
        Self::from_rational(&Rational::from_float(v).expect("finite"))
    }

    pub fn raw(&self) -> &BigInt {
        &self.0
    }

    pub fn add(&self, o: &Self) -> Self {
        Fixed(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Fixed(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Fixed((&self.0 * &o.0) >> FRAC_BITS)
    }

    pub fn div(&self, o: &Self) -> Self {
        Fixed((&self.0 << FRAC_BITS).div_floor(&o.0))
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        Fixed((&self.0 * q.numer()).div_floor(q.denom()))
    }

    pub fn abs(&self) -> Self {
        Fixed(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// `|self - o| <= 2^-bits · max(|self|, |o|, 1)`.
    pub fn close_to(&self, o: &Self, bits: u64) -> bool {
        let diff = self.sub(o).abs().0;
        let one = BigInt::one() << FRAC_BITS;
        let scale = self.0.abs().max(o.0.abs()).max(one);
        (diff << bits) <= scale
    }

    /// Largest `f64` not exceeding `self`, assuming `self > 0`.
    pub fn to_f64_down(&self) -> f64 {
        assert!(self.0.sign() == Sign::Plus, "to_f64_down expects a positive value");
        let bits = self.0.bits();
        let shift = bits.saturating_sub(53);
        let mantissa = &self.0 >> shift;
        let m: u64 = mantissa.try_into().expect("53-bit mantissa");
        // m < 2^53 so the conversion is exact; scaling by a power of two is exact too.
        (m as f64) * 2f64.powi(shift as i32 - FRAC_BITS as i32)
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        Rational::new(self.0.clone(), BigInt::one() << FRAC_BITS)
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

fn one() -> Fixed {
    Fixed(BigInt::one() << FRAC_BITS)
}

/// `atanh(z)` for `|z| <= 1/3`, by its Taylor series.
fn atanh_small(z: &Fixed) -> Fixed {
    let z2 = z.mul(z);
    let mut power = z.clone();
    let mut sum = Fixed::zero();
    let mut k: u32 = 0;
    while !power.0.is_zero() {
        let term = Fixed(&power.0 / BigInt::from(2 * k + 1));
        sum = sum.add(&term);
        power = power.mul(&z2);
        k += 1;
    }
    sum
}

pub fn ln2() -> Fixed {
    let third = Fixed::from_rational(&Rational::new(1.into(), 3.into()));
    let t = atanh_small(&third);
    t.add(&t)
}

/// Natural log of a positive rational.
pub fn ln(q: &Rational) -> Fixed {
    assert!(q.is_positive(), "ln of a non-positive value");
    // q = 2^e · f with f ∈ [1, 2)
    let mut e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let two = Rational::from_integer(2.into());
    let mut f = if e >= 0 {
        q / Rational::from_integer(BigInt::one() << e as u64)
    } else {
        q * Rational::from_integer(BigInt::one() << (-e) as u64)
    };
    while f >= two {
        f /= &two;
        e += 1;
    }
    while f < Rational::one() {
        f *= &two;
        e -= 1;
    }
    // ln f = 2 atanh((f-1)/(f+1)), argument in [0, 1/3)
    let z = (&f - Rational::one()) / (&f + Rational::one());
    let t = atanh_small(&Fixed::from_rational(&z));
    let ln_f = t.add(&t);
    let ln2 = ln2();
    let scaled = Fixed(&ln2.0 * BigInt::from(e));
    ln_f.add(&scaled)
}

/// `e^t`.
pub fn exp(t: &Fixed) -> Fixed {
    const HALVINGS: u64 = 24;
    let ln2 = ln2();
    // t = k ln2 + r with |r| <= ln2 / 2
    let k = {
        let (q, r) = t.0.div_mod_floor(&ln2.0);
        if (&r << 1u32) > ln2.0 {
            q + 1
        } else {
            q
        }
    };
    let r = t.sub(&Fixed(&ln2.0 * &k));
    let small = Fixed(&r.0 >> HALVINGS);
    let mut term = one();
    let mut sum = one();
    let mut i: u32 = 1;
    loop {
        term = Fixed(&term.mul(&small).0 / BigInt::from(i));
        if term.0.is_zero() {
            break;
        }
        sum = sum.add(&term);
        i += 1;
    }
    for _ in 0..HALVINGS {
        sum = sum.mul(&sum);
    }
    let k: i64 = (&k).try_into().expect("exponent fits in i64");
    if k >= 0 {
        Fixed(sum.0 << k as u64)
    } else {
        Fixed(sum.0 >> (-k) as u64)
    }
}

/// `y^p` for `y >= 0` with `0^p = 0`; `p` is taken exactly as the rational it denotes.
pub fn pow(y: &Rational, p: &Rational) -> Fixed {
    if y.is_zero() {
        return Fixed::zero();
    }
    exp(&ln(y).mul_rational(p))
}

/// `Σ y_i^p` over the nonzero entries.
pub fn power_sum(y: &[Rational], p: f64) -> Fixed {
    let p = Rational::from_float(p).expect("finite exponent");
    y.iter()
        .filter(|v| !v.is_zero())
        .fold(Fixed::zero(), |acc, v| acc.add(&pow(v, &p)))
}
