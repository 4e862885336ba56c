//! Exact integer binomials and the alternating weights `S(M, N, x)` that turn
//! the M-out-of-N binomial availability into a sum of pure exponentials:
//!
//! ```text
//! A(t) = sum_{x=M..N} S(M, N, x) * A_e(t)^x
//! S(M, N, x) = sum_{k=M..x} C(N, x) * C(x, k) * (-1)^(x-k)
//! ```

use crate::{Error, Result};

/// Largest N for which [`s_coefficients`] is supported.
pub const MAX_COMPONENTS: u32 = 30;

/// Largest n for which every `C(n, k)` fits in a `u64`.
pub const MAX_BINOMIAL_N: u64 = 62;

/// Exact `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Err(Error::BinomialDomain { n, k });
    }
    if n > MAX_BINOMIAL_N {
        return Err(Error::BinomialOverflow(n));
    }
    let k = k.min(n - k);
    // each partial product is itself a binomial, so the division is exact
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    Ok(acc as u64)
}

/// `S(M, N, x)` for `x = M..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SCoefficients {
    m: u32,
    n_components: u32,
    values: Vec<i64>,
}

impl SCoefficients {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n_components(&self) -> u32 {
        self.n_components
    }

    /// Values indexed from `x = M`.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `S(M, N, x)`, or `None` when `x` is outside `M..=N`.
    pub fn get(&self, x: u32) -> Option<i64> {
        x.checked_sub(self.m)
            .and_then(|offset| self.values.get(offset as usize).copied())
    }

    /// Iterates `(x, S(M, N, x))`.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(offset, &s)| (self.m + offset as u32, s))
    }
}

pub fn s_coefficients(m: u32, n_components: u32) -> Result<SCoefficients> {
    if m < 1 {
        return Err(Error::MinimumBelowOne(m));
    }
    if m > n_components {
        return Err(Error::MExceedsN { m, n: n_components });
    }
    if n_components > MAX_COMPONENTS {
        return Err(Error::UnsupportedArchitecture(n_components));
    }
    let n = u64::from(n_components);
    let mut values = Vec::with_capacity((n_components - m + 1) as usize);
    for x in u64::from(m)..=n {
        let outer = i128::from(binomial(n, x)?);
        let mut inner: i128 = 0;
        for k in u64::from(m)..=x {
            let term = i128::from(binomial(x, k)?);
            if (x - k) % 2 == 0 {
                inner += term;
            } else {
                inner -= term;
            }
        }
        values.push(i64::try_from(outer * inner).expect("S fits in i64 for N <= 30"));
    }
    Ok(SCoefficients {
        m,
        n_components,
        values,
    })
}
