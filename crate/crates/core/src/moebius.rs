//! Number-theoretic substrate: Möbius sieve, exact partial sums and the
//! fractional-part sums entering the error analysis.
//!
//! All partial sums are exact rationals. Sums over `mu(k)/k` and
//! `mu(d)/d^2` are accumulated over the common denominator `lcm(1..k)`
//! (respectively its square), which grows like `e^k` in value but only
//! linearly in digits, so a full prefix walk stays cheap.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Sieved Möbius values `mu(1)..mu(limit)`, shared read-only by the
/// evaluators. Construction is the only mutation; afterwards the table is
/// safe for concurrent reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoebiusTable {
    values: Vec<i8>,
}

impl MoebiusTable {
    /// Sieves `mu(k)` for all `1 <= k <= limit` with a linear sieve.
    pub fn sieve(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::ZeroLimit);
        }
        let mut mu = vec![0i8; limit + 1];
        mu[1] = 1;
        let mut primes: Vec<usize> = Vec::new();
        let mut is_composite = vec![false; limit + 1];
        for i in 2..=limit {
            if !is_composite[i] {
                primes.push(i);
                mu[i] = -1;
            }
            for &p in &primes {
                let ip = match i.checked_mul(p) {
                    Some(ip) if ip <= limit => ip,
                    _ => break,
                };
                is_composite[ip] = true;
                if i % p == 0 {
                    mu[ip] = 0;
                    break;
                }
                mu[ip] = -mu[i];
            }
        }
        Ok(MoebiusTable { values: mu })
    }

    pub fn limit(&self) -> usize {
        self.values.len() - 1
    }

    /// `mu(k)`; panics if `k` is 0 or above the sieved limit.
    #[inline]
    pub fn mu(&self, k: usize) -> i64 {
        assert!(k >= 1, "mu is defined for k >= 1");
        i64::from(self.values[k])
    }

    fn require(&self, needed: usize) -> Result<()> {
        if needed > self.limit() {
            Err(Error::TableTooShort {
                limit: self.limit(),
                needed,
            })
        } else {
            Ok(())
        }
    }

    /// Exact `sum_{k=1}^{limit} mu(k)/k`, reduced.
    ///
    /// The classical sharpening of the `O(1)` bound gives `|result| <= 1`
    /// for every limit.
    pub fn mertens_weighted(&self, limit: usize) -> Result<BigRational> {
        let (num, den) = self.mertens_weighted_parts(limit, |_, _| {})?;
        Ok(BigRational::new(num, den))
    }

    /// Walks every prefix `1..=limit` and reports whether
    /// `|sum_{k<=m} mu(k)/k| <= 1` held at each step.
    pub fn mertens_bound_holds_to(&self, limit: usize) -> Result<bool> {
        let mut ok = true;
        self.mertens_weighted_parts(limit, |num, den| {
            if num.magnitude() > den.magnitude() {
                ok = false;
            }
        })?;
        Ok(ok)
    }

    /// Accumulates `sum mu(k)/k` over the running denominator `lcm(1..k)`,
    /// invoking `observe(num, den)` after each prefix.
    fn mertens_weighted_parts(
        &self,
        limit: usize,
        mut observe: impl FnMut(&BigInt, &BigInt),
    ) -> Result<(BigInt, BigInt)> {
        if limit == 0 {
            return Err(Error::ZeroLimit);
        }
        self.require(limit)?;
        let ppb = prime_power_base(limit);
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        observe(&num, &den);
        for k in 2..=limit {
            // lcm(1..k) gains a factor exactly when k is a prime power
            if ppb[k] != 0 {
                let p = BigInt::from(ppb[k]);
                num *= &p;
                den *= &p;
            }
            let mu = self.mu(k);
            if mu != 0 {
                let term = &den / BigInt::from(k as u64);
                if mu > 0 {
                    num += term;
                } else {
                    num -= term;
                }
            }
            observe(&num, &den);
        }
        Ok((num, den))
    }

    /// Exact `sum_{d=1}^{limit} mu(d)/d^2`, reduced.
    ///
    /// Converges to `6/pi^2` with `|error| < 1/limit` (tail of `sum 1/d^2`).
    pub fn basel_partial(&self, limit: usize) -> Result<BigRational> {
        let (num, den) = self.basel_partial_parts(limit)?;
        Ok(BigRational::new(num, den))
    }

    /// The same sum as an unreduced numerator/denominator pair over
    /// `lcm(1..limit)^2`. Exact comparisons against other rationals go
    /// through cross-multiplication, so large limits skip the final gcd.
    pub fn basel_partial_parts(&self, limit: usize) -> Result<(BigInt, BigInt)> {
        if limit == 0 {
            return Err(Error::ZeroLimit);
        }
        self.require(limit)?;
        let ppb = prime_power_base(limit);
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for d in 2..=limit {
            if ppb[d] != 0 {
                let p2 = BigInt::from(ppb[d] * ppb[d]);
                num *= &p2;
                den *= &p2;
            }
            let mu = self.mu(d);
            if mu != 0 {
                let d2 = BigInt::from((d as u64) * (d as u64));
                let term = &den / d2;
                if mu > 0 {
                    num += term;
                } else {
                    num -= term;
                }
            }
        }
        Ok((num, den))
    }

    /// Exact `alpha(m,n) = sum_{d=1}^{m} (mu(d)/d) * {n/d}` with
    /// `{x} = x - floor(x)`. Each fractional part is the exact rational
    /// `(n mod d)/d`.
    pub fn alpha(&self, m: usize, n: u64) -> Result<FracPartSum> {
        if m == 0 || n == 0 {
            return Err(Error::ZeroLimit);
        }
        self.require(m)?;
        let ppb = prime_power_base(m);
        // denominator lcm(1..d)^2: {n/d}/d = (n mod d)/d^2
        let mut num = BigInt::zero(); // d=1 term: {n} = 0
        let mut den = BigInt::one();
        for d in 2..=m {
            if ppb[d] != 0 {
                let p2 = BigInt::from(ppb[d] * ppb[d]);
                num *= &p2;
                den *= &p2;
            }
            let mu = self.mu(d);
            let rem = n % d as u64;
            if mu != 0 && rem != 0 {
                let d2 = BigInt::from((d as u64) * (d as u64));
                let term = (&den / d2) * BigInt::from(rem);
                if mu > 0 {
                    num += term;
                } else {
                    num -= term;
                }
            }
        }
        Ok(FracPartSum {
            m: m as u64,
            n,
            value: BigRational::new(num, den),
        })
    }
}

/// Exact value of `alpha(m,n)` together with its arguments.
///
/// `|value| <= H_m` always, and `value = 0` when `m = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracPartSum {
    pub m: u64,
    pub n: u64,
    pub value: BigRational,
}

impl FracPartSum {
    /// Checks `|value| <= H_m` exactly.
    pub fn within_harmonic_bound(&self) -> bool {
        self.value.abs() <= harmonic(self.m as usize)
    }
}

/// Exact harmonic number `H_m = sum_{d=1}^{m} 1/d`.
pub fn harmonic(m: usize) -> BigRational {
    assert!(m >= 1);
    let ppb = prime_power_base(m);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for d in 2..=m {
        if ppb[d] != 0 {
            let p = BigInt::from(ppb[d]);
            num *= &p;
            den *= &p;
        }
        num += &den / BigInt::from(d as u64);
    }
    BigRational::new(num, den)
}

/// `out[k] = p` if `k = p^e` is a prime power, else 0 (`out[0] = out[1] = 0`).
fn prime_power_base(limit: usize) -> Vec<u64> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut out = vec![0u64; limit + 1];
    for k in 2..=limit {
        let p = spf[k] as usize;
        let mut rest = k;
        while rest % p == 0 {
            rest /= p;
        }
        if rest == 1 {
            out[k] = p as u64;
        }
    }
    out
}

/// Sign flag of `num/den - target` where `target` is reduced; exact.
pub fn cmp_parts(num: &BigInt, den: &BigInt, target: &BigRational) -> std::cmp::Ordering {
    debug_assert_eq!(den.sign(), Sign::Plus);
    (num * target.denom()).cmp(&(target.numer() * den))
}
