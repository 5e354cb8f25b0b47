//! Conversions between the max-times and max-plus pictures of the semiring.
//!
//! Max-times `a` corresponds to max-plus `log a`, with `0 ↔ -inf`.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::MaxMatrix;
use crate::scalar::{rational_ln, rational_log, rational_pow, rational_root, MaxPlus, Rational};

/// Largest denominator tried when recognising a rational logarithm.
pub const LOG_DENOMINATOR_LIMIT: u32 = 64;

/// Natural logarithm entrywise.
pub fn to_max_plus(a: &MaxMatrix<f64>) -> MaxMatrix<MaxPlus<f64>> {
    MaxMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let v = *a.get(i, j);
        if v == 0.0 {
            MaxPlus::neg_inf()
        } else {
            MaxPlus::finite(v.ln())
        }
    })
    .with_tol(a.tol())
}

/// Exponential entrywise.
pub fn from_max_plus(a: &MaxMatrix<MaxPlus<f64>>) -> MaxMatrix<f64> {
    MaxMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        a.get(i, j).log_value().map_or(0.0, |v| v.exp())
    })
    .with_tol(a.tol())
}

/// Logarithm to a rational `base` entrywise, exactly.
///
/// Fails with [`Error::PrecisionLoss`] when some entry is not a rational
/// power of `base`; such data has to go through float mode.
pub fn to_max_plus_exact(a: &MaxMatrix<Rational>, base: &Rational) -> Result<MaxMatrix<MaxPlus<Rational>>> {
    check_base(base)?;
    let mut rows = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let mut row = Vec::with_capacity(a.cols());
        for j in 0..a.cols() {
            let v = a.get(i, j);
            if v.is_zero() {
                row.push(MaxPlus::neg_inf());
                continue;
            }
            let r = rational_log(v, base, LOG_DENOMINATOR_LIMIT).ok_or_else(|| {
                Error::PrecisionLoss(format!(
                    "log of entry ({i},{j}) to base {base} is not rational"
                ))
            })?;
            row.push(MaxPlus::finite(r));
        }
        rows.push(row);
    }
    MaxMatrix::from_rows(rows)
}

/// `base^r` entrywise, exactly.
pub fn from_max_plus_exact(a: &MaxMatrix<MaxPlus<Rational>>, base: &Rational) -> Result<MaxMatrix<Rational>> {
    check_base(base)?;
    let mut rows = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let mut row = Vec::with_capacity(a.cols());
        for j in 0..a.cols() {
            let value = match a.get(i, j).log_value() {
                None => Rational::zero(),
                Some(r) => rational_exp(base, r).ok_or_else(|| {
                    Error::PrecisionLoss(format!("{base}^{r} at ({i},{j}) is not rational"))
                })?,
            };
            row.push(value);
        }
        rows.push(row);
    }
    MaxMatrix::from_rows(rows)
}

/// Natural logarithm of exact data, rounded to floats.
pub fn to_max_plus_lossy(a: &MaxMatrix<Rational>) -> MaxMatrix<MaxPlus<f64>> {
    MaxMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let v = a.get(i, j);
        if v.is_zero() {
            MaxPlus::neg_inf()
        } else {
            MaxPlus::finite(rational_ln(v))
        }
    })
}

/// Rounds exact max-times data to floats.
pub fn to_float(a: &MaxMatrix<Rational>) -> MaxMatrix<f64> {
    MaxMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j).to_f64().unwrap_or(f64::NAN))
}

/// Rounds exact max-plus data to floats.
pub fn to_float_max_plus(a: &MaxMatrix<MaxPlus<Rational>>) -> MaxMatrix<MaxPlus<f64>> {
    MaxMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        MaxPlus(a.get(i, j).log_value().map(|r| r.to_f64().unwrap_or(f64::NAN)))
    })
}

fn check_base(base: &Rational) -> Result<()> {
    if !base.is_positive() || base.is_one() {
        return Err(Error::InvalidArgument(format!(
            "logarithm base must be positive and different from 1, got {base}"
        )));
    }
    Ok(())
}

fn rational_exp(base: &Rational, r: &Rational) -> Option<Rational> {
    let k = r.denom().to_u32()?;
    let p = r.numer().abs().to_u32()?;
    let root = rational_root(base, k)?;
    let v = rational_pow(&root, p);
    Some(if r.is_negative() { v.recip() } else { v })
}
