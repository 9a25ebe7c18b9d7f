//! GF(2^8) arithmetic over the field polynomial x^8 + x^4 + x^3 + x^2 + 1,
//! using log/antilog tables built from the primitive element 0x02.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub};

/// Field polynomial including the x^8 term.
pub const FIELD_POLY: u16 = 0x11D;

const fn build_tables() -> ([u8; 512], [u8; 256]) {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= FIELD_POLY;
        }
        i += 1;
    }
    // duplicate so exp[a + b] never needs a modulo
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    (exp, log)
}

const TABLES: ([u8; 512], [u8; 256]) = build_tables();
static EXP: [u8; 512] = TABLES.0;
static LOG: [u8; 256] = TABLES.1;

/// An element of GF(256).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);
    /// The primitive element used to build the tables and the code roots.
    pub const ALPHA: Gf256 = Gf256(2);

    /// `ALPHA^e` for any exponent, reduced mod 255.
    #[inline]
    pub fn alpha_pow(e: i64) -> Gf256 {
        Gf256(EXP[e.rem_euclid(255) as usize])
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Discrete log base `ALPHA`; `None` for zero.
    #[inline]
    pub fn log(self) -> Option<u8> {
        (self.0 != 0).then(|| LOG[self.0 as usize])
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(self) -> Gf256 {
        assert!(self.0 != 0, "zero has no inverse in GF(256)");
        Gf256(EXP[255 - LOG[self.0 as usize] as usize])
    }

    pub fn pow(self, e: u32) -> Gf256 {
        if e == 0 {
            return Gf256::ONE;
        }
        match self.log() {
            None => Gf256::ZERO,
            Some(l) => Gf256::alpha_pow(i64::from(l) * i64::from(e)),
        }
    }
}

impl fmt::Debug for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf256({:#04x})", self.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl Add for Gf256 {
    type Output = Gf256;
    #[inline]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl AddAssign for Gf256 {
    #[inline]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl Sub for Gf256 {
    type Output = Gf256;
    #[inline]
    fn sub(self, rhs: Gf256) -> Gf256 {
        self + rhs
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl Mul for Gf256 {
    type Output = Gf256;
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        if self.0 == 0 || rhs.0 == 0 {
            Gf256::ZERO
        } else {
            Gf256(EXP[LOG[self.0 as usize] as usize + LOG[rhs.0 as usize] as usize])
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl Div for Gf256 {
    type Output = Gf256;
    #[inline]
    fn div(self, rhs: Gf256) -> Gf256 {
        self * rhs.inv()
    }
}

pub fn gf_mul(a: Gf256, b: Gf256) -> Gf256 {
    a * b
}

/// Evaluates a polynomial stored lowest degree first.
pub fn poly_eval(poly: &[Gf256], x: Gf256) -> Gf256 {
    poly.iter().rev().fold(Gf256::ZERO, |acc, &c| acc * x + c)
}

/// Product of two polynomials stored lowest degree first.
pub fn poly_mul(a: &[Gf256], b: &[Gf256]) -> Vec<Gf256> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Gf256::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
