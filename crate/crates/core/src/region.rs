//! Decidable Borel subsets of the complex plane.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;

use crate::exact::{rational_from_f64, QComplex};
use crate::syntax::{parse_call, Call, DescriptorError};

/// A finite boolean combination of primitive regions. Membership is decided
/// in exact arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BorelRegion {
    ClosedDisk { center: QComplex, radius: BigRational },
    OpenDisk { center: QComplex, radius: BigRational },
    Singleton(QComplex),
    /// `{λ : Re(conj(normal)·λ) ≥ offset}`.
    HalfPlane { normal: QComplex, offset: BigRational },
    WholePlane,
    Empty,
    Union(Box<BorelRegion>, Box<BorelRegion>),
    Intersection(Box<BorelRegion>, Box<BorelRegion>),
    Complement(Box<BorelRegion>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("region parameters must be finite")]
    NonFinite,
    #[error("disk radius must be non-negative")]
    NegativeRadius,
    #[error("half-plane normal must be non-zero")]
    ZeroNormal,
    #[error(transparent)]
    Syntax(#[from] DescriptorError),
}

fn exact(z: Complex64) -> Result<QComplex, RegionError> {
    QComplex::from_f64(z).ok_or(RegionError::NonFinite)
}

fn exact_radius(r: f64) -> Result<BigRational, RegionError> {
    let r = rational_from_f64(r).ok_or(RegionError::NonFinite)?;
    if r.is_negative() {
        return Err(RegionError::NegativeRadius);
    }
    Ok(r)
}

impl BorelRegion {
    pub fn closed_disk(center: Complex64, radius: f64) -> Result<Self, RegionError> {
        Ok(Self::ClosedDisk { center: exact(center)?, radius: exact_radius(radius)? })
    }

    pub fn open_disk(center: Complex64, radius: f64) -> Result<Self, RegionError> {
        Ok(Self::OpenDisk { center: exact(center)?, radius: exact_radius(radius)? })
    }

    pub fn singleton(point: Complex64) -> Result<Self, RegionError> {
        Ok(Self::Singleton(exact(point)?))
    }

    pub fn half_plane(normal: Complex64, offset: f64) -> Result<Self, RegionError> {
        let normal = exact(normal)?;
        if normal.is_zero() {
            return Err(RegionError::ZeroNormal);
        }
        Ok(Self::HalfPlane { normal, offset: rational_from_f64(offset).ok_or(RegionError::NonFinite)? })
    }

    pub fn union(a: Self, b: Self) -> Self {
        Self::Union(Box::new(a), Box::new(b))
    }

    pub fn intersection(a: Self, b: Self) -> Self {
        Self::Intersection(Box::new(a), Box::new(b))
    }

    pub fn complement(a: Self) -> Self {
        Self::Complement(Box::new(a))
    }

    /// `a ∖ b`.
    pub fn difference(a: Self, b: Self) -> Self {
        Self::intersection(a, Self::complement(b))
    }

    /// Exact membership test.
    pub fn contains_exact(&self, z: &QComplex) -> bool {
        use BorelRegion::*;
        match self {
            ClosedDisk { center, radius } => (z - center).cmp_abs(radius).is_le(),
            OpenDisk { center, radius } => (z - center).cmp_abs(radius).is_lt(),
            Singleton(p) => z == p,
            HalfPlane { normal, offset } => (&normal.conj() * z).re >= *offset,
            WholePlane => true,
            Empty => false,
            Union(a, b) => a.contains_exact(z) || b.contains_exact(z),
            Intersection(a, b) => a.contains_exact(z) && b.contains_exact(z),
            Complement(a) => !a.contains_exact(z),
        }
    }

    /// Membership of a finite `f64` point; non-finite points belong to no region.
    pub fn contains(&self, z: Complex64) -> bool {
        QComplex::from_f64(z).is_some_and(|q| self.contains_exact(&q))
    }

    pub fn depth(&self) -> usize {
        use BorelRegion::*;
        match self {
            Union(a, b) | Intersection(a, b) => 1 + a.depth().max(b.depth()),
            Complement(a) => 1 + a.depth(),
            _ => 0,
        }
    }

    pub(crate) fn from_call(c: &Call) -> Result<Self, RegionError> {
        let radius = |c: &Call, i: usize| -> Result<BigRational, RegionError> {
            let r = c.scalar_arg(i)?;
            if !r.is_real() {
                return Err(DescriptorError::new(c.position, "radius must be real").into());
            }
            if r.re.is_negative() {
                return Err(RegionError::NegativeRadius);
            }
            Ok(r.re)
        };
        Ok(match c.name.as_str() {
            "closed_disk" => {
                c.expect_arity(2)?;
                Self::ClosedDisk { center: c.scalar_arg(0)?, radius: radius(c, 1)? }
            }
            "open_disk" => {
                c.expect_arity(2)?;
                Self::OpenDisk { center: c.scalar_arg(0)?, radius: radius(c, 1)? }
            }
            "singleton" => {
                c.expect_arity(1)?;
                Self::Singleton(c.scalar_arg(0)?)
            }
            "half_plane" => {
                c.expect_arity(2)?;
                let normal = c.scalar_arg(0)?;
                if normal.is_zero() {
                    return Err(RegionError::ZeroNormal);
                }
                let offset = c.scalar_arg(1)?;
                if !offset.is_real() {
                    return Err(DescriptorError::new(c.position, "offset must be real").into());
                }
                Self::HalfPlane { normal, offset: offset.re }
            }
            "whole_plane" => {
                c.expect_arity(0)?;
                Self::WholePlane
            }
            "empty" => {
                c.expect_arity(0)?;
                Self::Empty
            }
            "union" | "intersection" => {
                c.expect_arity(2)?;
                let a = Self::from_call(c.call_arg(0)?)?;
                let b = Self::from_call(c.call_arg(1)?)?;
                if c.name == "union" {
                    Self::union(a, b)
                } else {
                    Self::intersection(a, b)
                }
            }
            "complement" => {
                c.expect_arity(1)?;
                Self::complement(Self::from_call(c.call_arg(0)?)?)
            }
            other => {
                return Err(DescriptorError::new(c.position, format!("unknown region '{other}'")).into());
            }
        })
    }
}

impl FromStr for BorelRegion {
    type Err = RegionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_call(&parse_call(s)?)
    }
}

pub(crate) fn scalar_text(z: &QComplex) -> String {
    crate::expr::LambdaExpr::Literal(z.clone()).to_string()
}

fn radius_text(r: &BigRational) -> String {
    crate::exact::format_rational(r)
}

impl fmt::Display for BorelRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use BorelRegion::*;
        match self {
            ClosedDisk { center, radius } => write!(f, "closed_disk({}, {})", scalar_text(center), radius_text(radius)),
            OpenDisk { center, radius } => write!(f, "open_disk({}, {})", scalar_text(center), radius_text(radius)),
            Singleton(p) => write!(f, "singleton({})", scalar_text(p)),
            HalfPlane { normal, offset } => write!(f, "half_plane({}, {})", scalar_text(normal), radius_text(offset)),
            WholePlane => write!(f, "whole_plane"),
            Empty => write!(f, "empty"),
            Union(a, b) => write!(f, "union({a}, {b})"),
            Intersection(a, b) => write!(f, "intersection({a}, {b})"),
            Complement(a) => write!(f, "complement({a})"),
        }
    }
}
