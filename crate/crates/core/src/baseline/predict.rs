//! Closed-form operation counts for the recursive and chart engines, in the
//! worst case where all `N` icons are predicates of valency `V` and every
//! role/filler pair passes the threshold.
//!
//! A prediction is kept as three exact integer coefficients so it can be
//! evaluated for any cost ratios `a` (one role/filler score) and `b` (one
//! assignment score), both measured in elementary additions.

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ComplexityError {
    #[error("cannot choose {v} of {n}")]
    Domain { n: u64, v: u64 },
    #[error("invalid complexity parameters: {0}")]
    InvalidParams(&'static str),
    #[error("count does not fit in 128 bits")]
    Overflow,
}

/// `n! / (n - v)!`, the number of ordered selections of `v` distinct items.
pub fn permutations(n: u64, v: u64) -> Result<u128, ComplexityError> {
    if v > n {
        return Err(ComplexityError::Domain { n, v });
    }
    ((n - v + 1)..=n).try_fold(1u128, |acc, k| acc.checked_mul(k as u128).ok_or(ComplexityError::Overflow))
}

/// Worst-case shape of an input plus the two cost ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityParams {
    pub n: u32,
    pub v: u32,
    pub a: f64,
    pub b: f64,
}

impl ComplexityParams {
    /// Requires `N >= 1`, `V >= 1`, `N - 1 > V` and positive cost ratios.
    pub fn new(n: u32, v: u32, a: f64, b: f64) -> Result<Self, ComplexityError> {
        if n < 1 || v < 1 {
            return Err(ComplexityError::InvalidParams("N and V must be at least 1"));
        }
        if n - 1 <= v {
            return Err(ComplexityError::InvalidParams("N - 1 must exceed V"));
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(ComplexityError::InvalidParams("cost ratios must be positive"));
        }
        Ok(ComplexityParams { n, v, a, b })
    }
}

/// `sums + a * role_filler + b * assignment` elementary operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpsPrediction {
    /// Elementary additions spent summing interpretation scores.
    pub sums: u128,
    /// Role/filler compatibility computations.
    pub role_filler: u128,
    /// Assignment scorings.
    pub assignment: u128,
}

impl OpsPrediction {
    pub fn total(&self, a: f64, b: f64) -> f64 {
        self.sums as f64 + a * self.role_filler as f64 + b * self.assignment as f64
    }

    /// Exact integer total for integral cost ratios.
    pub fn total_exact(&self, a: u128, b: u128) -> Result<u128, ComplexityError> {
        let ra = a.checked_mul(self.role_filler).ok_or(ComplexityError::Overflow)?;
        let rb = b.checked_mul(self.assignment).ok_or(ComplexityError::Overflow)?;
        self.sums
            .checked_add(ra)
            .and_then(|s| s.checked_add(rb))
            .ok_or(ComplexityError::Overflow)
    }

    pub fn evaluate(&self, p: &ComplexityParams) -> f64 {
        self.total(p.a, p.b)
    }
}

fn pow(base: u128, exp: u32) -> Result<u128, ComplexityError> {
    base.checked_pow(exp).ok_or(ComplexityError::Overflow)
}

/// `sum_{k=lo..=hi} base^k`
fn power_sum(base: u128, lo: u32, hi: u32) -> Result<u128, ComplexityError> {
    (lo..=hi).try_fold(0u128, |acc, k| acc.checked_add(pow(base, k)?).ok_or(ComplexityError::Overflow))
}

fn mul(a: u128, b: u128) -> Result<u128, ComplexityError> {
    a.checked_mul(b).ok_or(ComplexityError::Overflow)
}

/// Shared first term: `(N-1) * P^N` elementary sums over all interpretations.
fn interpretation_sums(n: u32, p: u128) -> Result<u128, ComplexityError> {
    mul((n - 1) as u128, pow(p, n)?)
}

/// Recursive backtracking:
/// `(N-1) P^N + a * (sum_{k=1..V} (N-1)^k) * (sum_{k=1..N} P^k)`
/// with `P = permutations(N-1, V)`.
pub fn predict_recursive_ops(params: &ComplexityParams) -> Result<OpsPrediction, ComplexityError> {
    let (n, v) = (params.n, params.v);
    let p = permutations((n - 1) as u64, v as u64)?;
    let per_enumeration = power_sum((n - 1) as u128, 1, v)?;
    let assignments = power_sum(p, 1, n)?;
    Ok(OpsPrediction {
        sums: interpretation_sums(n, p)?,
        role_filler: mul(per_enumeration, assignments)?,
        assignment: 0,
    })
}

/// Chart: `(N-1) P^N + a V N (N-1) + b N P`.
pub fn predict_chart_ops(params: &ComplexityParams) -> Result<OpsPrediction, ComplexityError> {
    let (n, v) = (params.n as u128, params.v as u128);
    let p = permutations((params.n - 1) as u64, params.v as u64)?;
    Ok(OpsPrediction {
        sums: interpretation_sums(params.n, p)?,
        role_filler: mul(mul(v, n)?, n - 1)?,
        assignment: mul(n, p)?,
    })
}
