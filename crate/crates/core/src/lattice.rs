//! Picard lattice of the blow-up of the plane in `r = 9 - d` general points.
//!
//! A class is written in the basis `H, E_1, ..., E_r` where `H` is the
//! pullback of a line and `E_i` are the exceptional curves. The intersection
//! form is diagonal: `H^2 = 1`, `E_i^2 = -1`, all mixed products zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A smooth surface obtained by blowing up the plane in `9 - degree` points.
///
/// Degrees 1..=7 are del Pezzo surfaces with `9 - degree >= 2` points; degree
/// 8 is the single blow-up `F_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceModel {
    degree: u8,
}

impl SurfaceModel {
    pub fn new(degree: u8) -> Result<Self> {
        if !(1..=8).contains(&degree) {
            return Err(Error::Input(format!("degree must be in 1..=8, got {degree}")));
        }
        Ok(SurfaceModel { degree })
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    /// Number of blown-up points.
    pub fn r(&self) -> usize {
        9 - self.degree as usize
    }

    pub fn zero(&self) -> DivClass {
        DivClass {
            h: Rational::zero(),
            e: vec![Rational::zero(); self.r()],
        }
    }

    pub fn h(&self) -> DivClass {
        let mut c = self.zero();
        c.h = Rational::one();
        c
    }

    /// The exceptional class `E_i`, 1-based.
    pub fn e(&self, i: usize) -> DivClass {
        assert!((1..=self.r()).contains(&i), "E_{i} out of range for r = {}", self.r());
        let mut c = self.zero();
        c.e[i - 1] = Rational::one();
        c
    }

    /// `K = -3H + sum E_i`.
    pub fn canonical(&self) -> DivClass {
        DivClass {
            h: Rational::integer(-3),
            e: vec![Rational::one(); self.r()],
        }
    }

    pub fn anticanonical(&self) -> DivClass {
        -self.canonical()
    }

    /// Builds a class from integer coordinates `(h; e_1..e_r)`.
    pub fn class_from_ints(&self, h: i64, e: &[i64]) -> Result<DivClass> {
        self.class(Rational::integer(h), e.iter().map(|&x| Rational::integer(x)).collect())
    }

    pub fn class(&self, h: Rational, e: Vec<Rational>) -> Result<DivClass> {
        let c = DivClass { h, e };
        self.check(&c)?;
        Ok(c)
    }

    pub fn check(&self, c: &DivClass) -> Result<()> {
        if c.e.len() != self.r() {
            return Err(Error::Dimension {
                expected: self.r(),
                got: c.e.len(),
            });
        }
        Ok(())
    }

    /// `a . b = a_h b_h - sum a_i b_i`.
    pub fn intersect(&self, a: &DivClass, b: &DivClass) -> Result<Rational> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.dot(b))
    }

    pub fn self_intersection(&self, a: &DivClass) -> Result<Rational> {
        self.intersect(a, a)
    }

    /// `-K . a`.
    pub fn anticanonical_degree(&self, a: &DivClass) -> Result<Rational> {
        self.intersect(&self.anticanonical(), a)
    }
}

/// Free-function form of [`SurfaceModel::intersect`].
pub fn intersect(a: &DivClass, b: &DivClass, s: &SurfaceModel) -> Result<Rational> {
    s.intersect(a, b)
}

/// Free-function form of [`SurfaceModel::canonical`].
pub fn canonical(s: &SurfaceModel) -> DivClass {
    s.canonical()
}

/// A numerical class `h H + sum e_i E_i` with rational coordinates.
///
/// Outside the crate (display and JSON) a class is written by its degree and
/// multiplicities, `(h; b_1, ..., b_r)` for `h H - sum b_i E_i`, so `-K` is
/// `(3; 1, ..., 1)` and `E_1` is `(0; -1, 0, ...)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DivClass {
    pub h: Rational,
    pub e: Vec<Rational>,
}

impl DivClass {
    pub fn r(&self) -> usize {
        self.e.len()
    }

    /// Intersection product without a model check. Both operands must have
    /// the same length.
    pub(crate) fn dot(&self, other: &DivClass) -> Rational {
        debug_assert_eq!(self.e.len(), other.e.len());
        let mut acc = &self.h * &other.h;
        for (x, y) in self.e.iter().zip(&other.e) {
            if !x.is_zero() && !y.is_zero() {
                acc -= &(x * y);
            }
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> DivClass {
        DivClass {
            h: &self.h * c,
            e: self.e.iter().map(|x| x * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.h.is_zero() && self.e.iter().all(Rational::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.h.is_integer() && self.e.iter().all(Rational::is_integer)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Rational, other: &DivClass) -> DivClass {
        debug_assert_eq!(self.e.len(), other.e.len());
        DivClass {
            h: &self.h + &(c * &other.h),
            e: self.e.iter().zip(&other.e).map(|(x, y)| x + &(c * y)).collect(),
        }
    }

    pub fn coords(&self) -> impl Iterator<Item = &Rational> {
        std::iter::once(&self.h).chain(self.e.iter())
    }

    /// Deterministic enumeration order: degree `h` ascending, then the
    /// multiplicity pattern `|e_i|` in descending lexicographic order, then
    /// the signed coordinates descending. Puts `E_1, ..., E_r` first and
    /// `H - E_1 - E_2` before `H - E_1 - E_3`.
    pub fn enumeration_cmp(&self, other: &DivClass) -> Ordering {
        self.h
            .cmp(&other.h)
            .then_with(|| {
                let a = self.e.iter().map(Rational::abs);
                let b = other.e.iter().map(Rational::abs);
                b.cmp(a)
            })
            .then_with(|| other.e.cmp(&self.e))
    }
}

impl DivClass {
    /// Multiplicities `b_i = -e_i`.
    pub fn multiplicities(&self) -> Vec<Rational> {
        self.e.iter().map(|x| -x).collect()
    }
}

impl fmt::Display for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.h)?;
        for (i, x) in self.e.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {}", -x)?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct ExternalClass {
    h: Rational,
    e: Vec<Rational>,
}

impl Serialize for DivClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ExternalClass {
            h: self.h.clone(),
            e: self.multiplicities(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DivClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let ext = ExternalClass::deserialize(deserializer)?;
        Ok(DivClass {
            h: ext.h,
            e: ext.e.into_iter().map(|x| -x).collect(),
        })
    }
}

impl fmt::Debug for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add<&DivClass> for &DivClass {
    type Output = DivClass;
    fn add(self, rhs: &DivClass) -> DivClass {
        debug_assert_eq!(self.e.len(), rhs.e.len());
        DivClass {
            h: &self.h + &rhs.h,
            e: self.e.iter().zip(&rhs.e).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Add for DivClass {
    type Output = DivClass;
    fn add(self, rhs: DivClass) -> DivClass {
        &self + &rhs
    }
}

impl Sub<&DivClass> for &DivClass {
    type Output = DivClass;
    fn sub(self, rhs: &DivClass) -> DivClass {
        debug_assert_eq!(self.e.len(), rhs.e.len());
        DivClass {
            h: &self.h - &rhs.h,
            e: self.e.iter().zip(&rhs.e).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Sub for DivClass {
    type Output = DivClass;
    fn sub(self, rhs: DivClass) -> DivClass {
        &self - &rhs
    }
}

impl Neg for DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        DivClass {
            h: -self.h,
            e: self.e.into_iter().map(|x| -x).collect(),
        }
    }
}

impl Neg for &DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        -self.clone()
    }
}
