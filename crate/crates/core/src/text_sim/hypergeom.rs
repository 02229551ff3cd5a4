//! Upper-tail hypergeometric probabilities computed in log space.

use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

/// `ln P[X >= k]` for `X ~ Hypergeometric(population, successes, draws)`.
///
/// `k` successes observed in `n` draws from a population of `big_n` items of
/// which `big_k` are successes.
pub fn hypergeom_ln_pvalue(k: u64, n: u64, big_k: u64, big_n: u64) -> Result<f64> {
    if !(k <= n && n <= big_n && k <= big_k && big_k <= big_n) {
        return Err(Error::Domain(format!(
            "invalid hypergeometric arguments k={k} n={n} K={big_k} N={big_n}"
        )));
    }
    // support of X is [max(0, n + K - N), min(n, K)]
    let lo = (n + big_k).saturating_sub(big_n);
    let hi = n.min(big_k);
    if k <= lo {
        return Ok(0.0);
    }
    if k > hi {
        return Ok(f64::NEG_INFINITY);
    }
    let ln_total = ln_binomial(big_n, n);
    let terms: Vec<f64> = (k..=hi)
        .map(|i| ln_binomial(big_k, i) + ln_binomial(big_n - big_k, n - i) - ln_total)
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    Ok((max + sum.ln()).min(0.0))
}

/// `P[X >= k]`, clamped to `[0, 1]`.
pub fn hypergeom_pvalue(k: u64, n: u64, big_k: u64, big_n: u64) -> Result<f64> {
    Ok(hypergeom_ln_pvalue(k, n, big_k, big_n)?.exp().clamp(0.0, 1.0))
}
