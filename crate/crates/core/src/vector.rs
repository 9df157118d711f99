//! Finitely supported vectors of a sequence space `ℓ_p`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exact::QComplex;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VectorError {
    #[error("coordinate indices start at 1")]
    ZeroIndex,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("exponent p must satisfy 1 <= p < infinity, got {0}")]
    InvalidExponent(String),
}

/// Checks `1 ≤ p < ∞`.
pub fn validate_p(p: f64) -> Result<f64, VectorError> {
    if p.is_finite() && p >= 1.0 {
        Ok(p)
    } else {
        Err(VectorError::InvalidExponent(p.to_string()))
    }
}

/// A vector with finitely many non-zero coordinates, indexed from 1.
/// Entries are exact; zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteVector {
    entries: BTreeMap<u64, QComplex>,
}

impl Default for FiniteVector {
    fn default() -> Self {
        Self::zero()
    }
}

impl FiniteVector {
    pub fn zero() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// The coordinate vector `e_k`.
    pub fn basis(k: u64) -> Result<Self, VectorError> {
        let mut v = Self::zero();
        v.set(k, QComplex::one())?;
        Ok(v)
    }

    pub fn from_entries<I>(entries: I) -> Result<Self, VectorError>
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        let mut v = Self::zero();
        for (k, z) in entries {
            v.set(k, QComplex::from_f64(z).ok_or(VectorError::NonFinite)?)?;
        }
        Ok(v)
    }

    /// Coordinates `x_1, x_2, …` from a dense slice.
    pub fn from_dense(values: &[Complex64]) -> Result<Self, VectorError> {
        Self::from_entries(values.iter().enumerate().map(|(i, z)| (i as u64 + 1, *z)))
    }

    pub fn set(&mut self, k: u64, z: QComplex) -> Result<(), VectorError> {
        if k == 0 {
            return Err(VectorError::ZeroIndex);
        }
        if z.is_zero() {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, z);
        }
        Ok(())
    }

    pub fn get(&self, k: u64) -> QComplex {
        self.entries.get(&k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &QComplex)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Largest index in the support, 0 for the zero vector.
    pub fn max_index(&self) -> u64 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    /// Coordinates `1..=dim` as `f64`; entries beyond `dim` are dropped.
    pub fn to_dense(&self, dim: usize) -> Vec<Complex64> {
        (1..=dim as u64).map(|k| self.get(k).to_f64()).collect()
    }

    /// Coordinatewise map over the support; `f` receives the index and entry.
    pub fn map_support<F>(&self, mut f: F) -> Self
    where
        F: FnMut(u64, &QComplex) -> QComplex,
    {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| (*k, f(*k, v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Self { entries }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &rhs.entries {
            let sum = &out.get(*k) + v;
            out.set(*k, sum).expect("index already validated");
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&QComplex::from_integer(-1)))
    }

    pub fn scale(&self, c: &QComplex) -> Self {
        self.map_support(|_, v| c * v)
    }

    /// `‖x‖_p = (Σ |x_k|^p)^{1/p}`.
    pub fn norm(&self, p: f64) -> f64 {
        if p == 2.0 {
            let sum = self.entries.values().map(|v| v.to_f64().norm_sqr()).fold(0.0, |a, b| a + b);
            return sum.sqrt();
        }
        let sum = self.entries.values().map(|v| v.abs_f64().powf(p)).fold(0.0, |a, b| a + b);
        sum.powf(1.0 / p)
    }
}

/// JSON form of a complex scalar, `{"re": .., "im": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// A vector as written on the command line: a dense array of scalars
/// (numbers or `{"re","im"}` objects) for `x_1, x_2, …`, or an object mapping
/// 1-based indices to scalars.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum VectorJson {
    Dense(Vec<ScalarJson>),
    Sparse(BTreeMap<String, ScalarJson>),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Real(f64),
    Complex(ComplexJson),
}

impl From<ScalarJson> for Complex64 {
    fn from(s: ScalarJson) -> Self {
        match s {
            ScalarJson::Real(x) => Complex64::new(x, 0.0),
            ScalarJson::Complex(z) => z.into(),
        }
    }
}

impl VectorJson {
    pub fn to_vector(&self) -> Result<FiniteVector, VectorError> {
        match self {
            VectorJson::Dense(values) => {
                let dense: Vec<Complex64> = values.iter().map(|s| (*s).into()).collect();
                FiniteVector::from_dense(&dense)
            }
            VectorJson::Sparse(map) => {
                let mut entries = Vec::with_capacity(map.len());
                for (k, v) in map {
                    let k: u64 = k.parse().map_err(|_| VectorError::ZeroIndex)?;
                    entries.push((k, (*v).into()));
                }
                FiniteVector::from_entries(entries)
            }
        }
    }
}

/// `serialize_with` helpers writing complex numbers as `{"re","im"}` objects.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::ser::{SerializeSeq, Serializer};
    use serde::Serialize;

    use super::ComplexJson;

    pub fn one<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ComplexJson::from(*z).serialize(s)
    }

    pub fn many<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(zs.len()))?;
        for z in zs {
            seq.serialize_element(&ComplexJson::from(*z))?;
        }
        seq.end()
    }
}

/// Serializable sparse rendering used in reports.
pub fn vector_to_json(x: &FiniteVector) -> BTreeMap<String, ComplexJson> {
    x.iter().map(|(k, v)| (k.to_string(), v.to_f64().into())).collect()
}
