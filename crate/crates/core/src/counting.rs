//! Exact evaluation of `f(m,n)`, `t(m,n)`, the gcd-class sums `f_q(m,n)` and
//! the moment sums `s1..s4`, each by a naive `O(mn)` double loop and a
//! Möbius-accelerated `O(min(m,n))` closed form.
//!
//! `f(m,n)` sums `(m-|i|)(n-|j|)` over all pairs `-m < i < m`, `-n < j < n`
//! with `gcd(i,j) = 1`, under the convention `gcd(0,k) = |k|` (so the axis
//! pairs `(0,±1)` and `(±1,0)` count and `(0,0)` does not). The number of
//! threshold functions is `t(m,n) = f(m,n) + 2`.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;

use crate::moebius::MoebiusTable;
use crate::separability;
use crate::{Error, Result};

/// Validated grid dimensions, `m, n >= 2`. No ordering is imposed; the
/// evaluators normalize internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridDims {
    m: u64,
    n: u64,
}

impl GridDims {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidDims { m, n });
        }
        Ok(GridDims { m, n })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn cells(&self) -> u64 {
        self.m * self.n
    }

    pub fn transposed(&self) -> GridDims {
        GridDims { m: self.n, n: self.m }
    }
}

impl std::fmt::Display for GridDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

/// Which evaluation route produced a count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Naive,
    Moebius,
    Oracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Naive => write!(f, "naive"),
            Method::Moebius => write!(f, "moebius"),
            Method::Oracle => write!(f, "oracle"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub dims: GridDims,
    pub f_value: BigInt,
    pub t_value: BigInt,
    pub method: Method,
}

/// The four coprime-pair moment sums over `1 <= i <= m`, `1 <= j <= n`,
/// `gcd(i,j) = 1`, weighted by `1`, `i`, `j` and `ij` respectively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofSums {
    pub s1: BigInt,
    pub s2: BigInt,
    pub s3: BigInt,
    pub s4: BigInt,
}

// Every i128 accumulator below is bounded in absolute value by
// min(m,n) * (mn)^2, which for m, n <= FAST_PATH_MAX = 10^6 is at most
// 10^30 < 2^127. Larger dimensions take the BigInt path.
const FAST_PATH_MAX: u64 = 1_000_000;

#[inline]
fn tri(k: i128) -> i128 {
    k * (k + 1) / 2
}

/// Direct double sum for `f(m,n)`. Exploits the 4-fold sign symmetry:
/// the positive quadrant is counted once and multiplied by 4, and the axis
/// pairs `(0,±1)`, `(±1,0)` contribute `2m(n-1) + 2(m-1)n`.
pub fn f_naive(dims: GridDims) -> BigInt {
    let (m, n) = (dims.m, dims.n);
    if m <= FAST_PATH_MAX && n <= FAST_PATH_MAX {
        let (mi, ni) = (m as i128, n as i128);
        let quadrant: i128 = (1..m)
            .into_par_iter()
            .map(|i| {
                let wi = mi - i as i128;
                let mut row = 0i128;
                for j in 1..n {
                    if i.gcd(&j) == 1 {
                        row += ni - j as i128;
                    }
                }
                wi * row
            })
            .sum();
        BigInt::from(4 * quadrant + 2 * mi * (ni - 1) + 2 * (mi - 1) * ni)
    } else {
        let mut quadrant = BigInt::from(0);
        for i in 1..m {
            let mut row = BigInt::from(0);
            for j in 1..n {
                if i.gcd(&j) == 1 {
                    row += n - j;
                }
            }
            quadrant += row * (m - i);
        }
        let m = BigInt::from(m);
        let n = BigInt::from(n);
        quadrant * 4 + (&m * (&n - 1) + (&m - 1) * &n) * 2
    }
}

/// Möbius-accelerated exact evaluation of `f(m,n)` in `O(min(m,n))`
/// arithmetic operations:
///
/// with `M = min(m,n)-1`, `N = max(m,n)-1`, `A = floor(M/d)`,
/// `B = floor(N/d)` and `T(k) = k(k+1)/2`,
///
/// `f = 4 * sum_{d=1}^{M} mu(d) (m*A - d*T(A)) (n*B - d*T(B))
///      + 2m(n-1) + 2(m-1)n`.
pub fn f_moebius(dims: GridDims, table: &MoebiusTable) -> Result<BigInt> {
    let (m, n) = if dims.m <= dims.n {
        (dims.m, dims.n)
    } else {
        (dims.n, dims.m)
    };
    let big_m = m - 1;
    if big_m as usize > table.limit() {
        return Err(Error::TableTooShort {
            limit: table.limit(),
            needed: big_m as usize,
        });
    }
    if n <= FAST_PATH_MAX {
        let (mi, ni) = (m as i128, n as i128);
        let mut sum = 0i128;
        for d in 1..=big_m {
            let mu = table.mu(d as usize) as i128;
            if mu == 0 {
                continue;
            }
            let di = d as i128;
            let a = (big_m / d) as i128;
            let b = ((n - 1) / d) as i128;
            sum += mu * (mi * a - di * tri(a)) * (ni * b - di * tri(b));
        }
        Ok(BigInt::from(4 * sum + 2 * mi * (ni - 1) + 2 * (mi - 1) * ni))
    } else {
        let mut sum = BigInt::from(0);
        for d in 1..=big_m {
            let mu = table.mu(d as usize);
            if mu == 0 {
                continue;
            }
            let a = BigInt::from(big_m / d);
            let b = BigInt::from((n - 1) / d);
            let ta = (&a * (&a + 1u32)) / 2u32;
            let tb = (&b * (&b + 1u32)) / 2u32;
            let term = (a * m - &ta * d) * (b * n - &tb * d);
            if mu > 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let m = BigInt::from(m);
        let n = BigInt::from(n);
        Ok(sum * 4 + (&m * (&n - 1) + (&m - 1) * &n) * 2)
    }
}

/// `t(m,n) = f(m,n) + 2` via the chosen route. The oracle route enumerates
/// all labelings and is limited to grids with at most
/// [`separability::DEFAULT_ENUMERATION_CAP`] cells.
pub fn t_count(dims: GridDims, method: Method, table: &MoebiusTable) -> Result<CountResult> {
    let f_value = match method {
        Method::Naive => f_naive(dims),
        Method::Moebius => f_moebius(dims, table)?,
        Method::Oracle => {
            let t = separability::count_by_enumeration(dims, separability::DEFAULT_ENUMERATION_CAP)?;
            t - 2
        }
    };
    let t_value = &f_value + 2;
    Ok(CountResult {
        dims,
        f_value,
        t_value,
        method,
    })
}

/// Direct double loops for the moment sums `s1..s4`; `m, n >= 1`.
pub fn proof_sums_naive(m: u64, n: u64) -> Result<ProofSums> {
    if m == 0 || n == 0 {
        return Err(Error::ZeroLimit);
    }
    if m <= FAST_PATH_MAX && n <= FAST_PATH_MAX {
        let sums = (1..=m)
            .into_par_iter()
            .map(|i| {
                let mut row = [0i128; 4];
                for j in 1..=n {
                    if i.gcd(&j) == 1 {
                        let (ii, jj) = (i as i128, j as i128);
                        row[0] += 1;
                        row[1] += ii;
                        row[2] += jj;
                        row[3] += ii * jj;
                    }
                }
                row
            })
            .reduce(
                || [0i128; 4],
                |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
            );
        Ok(ProofSums {
            s1: BigInt::from(sums[0]),
            s2: BigInt::from(sums[1]),
            s3: BigInt::from(sums[2]),
            s4: BigInt::from(sums[3]),
        })
    } else {
        let mut sums = [BigInt::from(0), BigInt::from(0), BigInt::from(0), BigInt::from(0)];
        for i in 1..=m {
            for j in 1..=n {
                if i.gcd(&j) == 1 {
                    sums[0] += 1u32;
                    sums[1] += i;
                    sums[2] += j;
                    sums[3] += BigInt::from(i) * j;
                }
            }
        }
        let [s1, s2, s3, s4] = sums;
        Ok(ProofSums { s1, s2, s3, s4 })
    }
}

/// Exact closed forms for `s1..s4` over `d = 1..min(m,n)`:
///
/// `s1 = sum mu(d) |m/d| |n/d|`,
/// `s2 = sum mu(d) d T(|m/d|) |n/d|`,
/// `s3 = sum mu(d) d |m/d| T(|n/d|)`,
/// `s4 = sum mu(d) d^2 T(|m/d|) T(|n/d|)`.
pub fn proof_sums_moebius(m: u64, n: u64, table: &MoebiusTable) -> Result<ProofSums> {
    if m == 0 || n == 0 {
        return Err(Error::ZeroLimit);
    }
    let lo = m.min(n);
    if lo as usize > table.limit() {
        return Err(Error::TableTooShort {
            limit: table.limit(),
            needed: lo as usize,
        });
    }
    if m <= FAST_PATH_MAX && n <= FAST_PATH_MAX {
        let mut sums = [0i128; 4];
        for d in 1..=lo {
            let mu = table.mu(d as usize) as i128;
            if mu == 0 {
                continue;
            }
            let di = d as i128;
            let a = (m / d) as i128;
            let b = (n / d) as i128;
            sums[0] += mu * a * b;
            sums[1] += mu * di * tri(a) * b;
            sums[2] += mu * di * a * tri(b);
            sums[3] += mu * di * di * tri(a) * tri(b);
        }
        Ok(ProofSums {
            s1: BigInt::from(sums[0]),
            s2: BigInt::from(sums[1]),
            s3: BigInt::from(sums[2]),
            s4: BigInt::from(sums[3]),
        })
    } else {
        let mut sums = [BigInt::from(0), BigInt::from(0), BigInt::from(0), BigInt::from(0)];
        for d in 1..=lo {
            let mu = table.mu(d as usize);
            if mu == 0 {
                continue;
            }
            let a = BigInt::from(m / d);
            let b = BigInt::from(n / d);
            let ta = (&a * (&a + 1u32)) / 2u32;
            let tb = (&b * (&b + 1u32)) / 2u32;
            let terms = [
                &a * &b,
                &ta * &b * d,
                &a * &tb * d,
                ta * tb * d * d,
            ];
            for (acc, t) in sums.iter_mut().zip(terms) {
                if mu > 0 {
                    *acc += t;
                } else {
                    *acc -= t;
                }
            }
        }
        let [s1, s2, s3, s4] = sums;
        Ok(ProofSums { s1, s2, s3, s4 })
    }
}

/// Verifies the exact decomposition
///
/// `f(m+1,n+1) = 4[(m+1)(n+1)s1 - (n+1)s2 - (m+1)s3 + s4]
///               + 2(m+1)n + 2m(n+1)`
///
/// with `s_k = s_k(m,n)`. The left side comes from the naive evaluator and
/// the right side from the Möbius closed forms, so the check crosses the two
/// routes. Any `false` is a build-stopping defect.
pub fn part1_identity_check(m: u64, n: u64, table: &MoebiusTable) -> Result<bool> {
    let left = f_naive(GridDims::new(m + 1, n + 1)?);
    let s = proof_sums_moebius(m, n, table)?;
    let (mb, nb) = (BigInt::from(m), BigInt::from(n));
    let right = ((&mb + 1u32) * (&nb + 1u32) * &s.s1 - (&nb + 1u32) * &s.s2
        - (&mb + 1u32) * &s.s3
        + &s.s4)
        * 4u32
        + (&mb + 1u32) * &nb * 2u32
        + &mb * (&nb + 1u32) * 2u32;
    Ok(left == right)
}

/// Direct sum of `(m-|i|)(n-|j|)` over pairs with `gcd(i,j)` exactly `q`.
pub fn f_q_naive(dims: GridDims, q: u64) -> Result<BigInt> {
    if q == 0 {
        return Err(Error::ZeroLimit);
    }
    let (m, n) = (dims.m, dims.n);
    debug_assert!(m <= FAST_PATH_MAX && n <= FAST_PATH_MAX);
    let (mi, ni) = (m as i128, n as i128);
    let quadrant: i128 = (1..m)
        .into_par_iter()
        .map(|i| {
            let mut row = 0i128;
            for j in 1..n {
                if i.gcd(&j) == q {
                    row += ni - j as i128;
                }
            }
            (mi - i as i128) * row
        })
        .sum();
    let mut total = 4 * quadrant;
    if q <= n - 1 {
        total += 2 * mi * (ni - q as i128);
    }
    if q <= m - 1 {
        total += 2 * (mi - q as i128) * ni;
    }
    Ok(BigInt::from(total))
}

/// Accelerated `f_q`: substituting `i = q i'`, `j = q j'` reduces to a
/// coprime sum, so the `f_moebius` loop applies with `A = floor((m-1)/(qd))`,
/// `B = floor((n-1)/(qd))` and inner factors `m*A - qd*T(A)`.
/// Zero whenever `q > max(m,n) - 1`.
pub fn f_q_moebius(dims: GridDims, q: u64, table: &MoebiusTable) -> Result<BigInt> {
    if q == 0 {
        return Err(Error::ZeroLimit);
    }
    let (m, n) = if dims.m <= dims.n {
        (dims.m, dims.n)
    } else {
        (dims.n, dims.m)
    };
    let d_max = (m - 1) / q;
    if d_max as usize > table.limit() {
        return Err(Error::TableTooShort {
            limit: table.limit(),
            needed: d_max as usize,
        });
    }
    if n <= FAST_PATH_MAX {
        let (mi, ni, qi) = (m as i128, n as i128, q as i128);
        let mut sum = 0i128;
        for d in 1..=d_max {
            let mu = table.mu(d as usize) as i128;
            if mu == 0 {
                continue;
            }
            let qd = qi * d as i128;
            let a = ((m - 1) / (q * d)) as i128;
            let b = ((n - 1) / (q * d)) as i128;
            sum += mu * (mi * a - qd * tri(a)) * (ni * b - qd * tri(b));
        }
        let mut total = 4 * sum;
        if q <= n - 1 {
            total += 2 * mi * (ni - qi);
        }
        if q <= m - 1 {
            total += 2 * (mi - qi) * ni;
        }
        Ok(BigInt::from(total))
    } else {
        let mut sum = BigInt::from(0);
        for d in 1..=d_max {
            let mu = table.mu(d as usize);
            if mu == 0 {
                continue;
            }
            let qd = q * d;
            let a = BigInt::from((m - 1) / qd);
            let b = BigInt::from((n - 1) / qd);
            let ta = (&a * (&a + 1u32)) / 2u32;
            let tb = (&b * (&b + 1u32)) / 2u32;
            let term = (a * m - ta * qd) * (b * n - tb * qd);
            if mu > 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let mut total = sum * 4u32;
        if q <= n - 1 {
            total += BigInt::from(m) * (n - q) * 2u32;
        }
        if q <= m - 1 {
            total += BigInt::from(m - q) * n * 2u32;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(m: u64, n: u64) -> GridDims {
        GridDims::new(m, n).unwrap()
    }

    fn table(limit: usize) -> MoebiusTable {
        MoebiusTable::sieve(limit).unwrap()
    }

    /// Independent oracle: sum over the full pair rectangle with plain gcd.
    fn f_q_brute(m: i64, n: i64, q: i64) -> i64 {
        let mut total = 0;
        for i in -(m - 1)..=(m - 1) {
            for j in -(n - 1)..=(n - 1) {
                if i.gcd(&j) == q {
                    total += (m - i.abs()) * (n - j.abs());
                }
            }
        }
        total
    }

    #[test]
    fn dims_validation() {
        assert!(GridDims::new(1, 5).is_err());
        assert!(GridDims::new(5, 1).is_err());
        assert!(GridDims::new(2, 2).is_ok());
    }

    #[test]
    fn f_naive_spot_values() {
        assert_eq!(f_naive(dims(2, 2)), BigInt::from(12));
        assert_eq!(f_naive(dims(2, 3)), BigInt::from(26));
        assert_eq!(f_naive(dims(3, 3)), BigInt::from(56));
    }

    #[test]
    fn f_naive_matches_full_rectangle_brute_force() {
        for m in 2..=12i64 {
            for n in 2..=12i64 {
                assert_eq!(
                    f_naive(dims(m as u64, n as u64)),
                    BigInt::from(f_q_brute(m, n, 1)),
                    "f({m},{n})"
                );
            }
        }
    }

    #[test]
    fn f_moebius_equals_naive() {
        let t = table(400);
        for m in 2..=60 {
            for n in 2..=60 {
                let d = dims(m, n);
                assert_eq!(f_moebius(d, &t).unwrap(), f_naive(d), "f({m},{n})");
            }
        }
        for (m, n) in [(5, 9), (123, 301), (301, 123), (64, 400)] {
            let d = dims(m, n);
            assert_eq!(f_moebius(d, &t).unwrap(), f_naive(d));
        }
    }

    #[test]
    fn f_is_symmetric() {
        let t = table(100);
        for (m, n) in [(2, 7), (13, 40), (99, 100)] {
            assert_eq!(f_naive(dims(m, n)), f_naive(dims(n, m)));
            assert_eq!(
                f_moebius(dims(m, n), &t).unwrap(),
                f_moebius(dims(n, m), &t).unwrap()
            );
        }
    }

    #[test]
    fn f_is_strictly_monotone() {
        for m in 2..=20 {
            for n in 2..=20 {
                assert!(f_naive(dims(m, n)) < f_naive(dims(m + 1, n)));
                assert!(f_naive(dims(m, n)) < f_naive(dims(m, n + 1)));
            }
        }
    }

    #[test]
    fn f_moebius_rejects_short_table() {
        let t = table(5);
        assert!(matches!(
            f_moebius(dims(8, 8), &t),
            Err(Error::TableTooShort { limit: 5, needed: 7 })
        ));
    }

    #[test]
    fn bigint_path_agrees_with_fast_path() {
        // n above FAST_PATH_MAX forces the BigInt branch; with m = 2 the
        // naive loop stays linear and both routes remain feasible
        let t = table(10);
        let d = dims(2, FAST_PATH_MAX + 7);
        assert_eq!(f_moebius(d, &t).unwrap(), f_naive(d));
        assert_eq!(
            f_q_moebius(d, 2, &t).unwrap(),
            f_q_moebius(dims(FAST_PATH_MAX + 7, 2), 2, &t).unwrap()
        );
    }

    #[test]
    fn t_count_spot_values() {
        let t = table(10);
        let r = t_count(dims(2, 2), Method::Naive, &t).unwrap();
        assert_eq!(r.t_value, BigInt::from(14));
        let r = t_count(dims(3, 3), Method::Moebius, &t).unwrap();
        assert_eq!(r.t_value, BigInt::from(58));
        let r = t_count(dims(2, 3), Method::Oracle, &t).unwrap();
        assert_eq!(r.t_value, BigInt::from(28));
        assert_eq!(r.f_value, BigInt::from(26));
    }

    #[test]
    fn proof_sums_spot_values() {
        let s = proof_sums_naive(1, 1).unwrap();
        assert_eq!(
            (s.s1, s.s2, s.s3, s.s4),
            (BigInt::from(1), BigInt::from(1), BigInt::from(1), BigInt::from(1))
        );
        let s = proof_sums_naive(2, 2).unwrap();
        assert_eq!(
            (s.s1, s.s2, s.s3, s.s4),
            (BigInt::from(3), BigInt::from(4), BigInt::from(4), BigInt::from(5))
        );
    }

    #[test]
    fn proof_sums_mutual_oracle() {
        let t = table(300);
        for (m, n) in [(1, 1), (2, 2), (3, 4), (17, 5), (100, 250), (250, 100)] {
            assert_eq!(
                proof_sums_naive(m, n).unwrap(),
                proof_sums_moebius(m, n, &t).unwrap(),
                "s1..s4({m},{n})"
            );
        }
    }

    #[test]
    fn proof_sums_transpose_symmetry() {
        // s2(m,n) = s3(n,m)
        let t = table(100);
        for (m, n) in [(3, 4), (20, 31), (50, 7)] {
            let a = proof_sums_moebius(m, n, &t).unwrap();
            let b = proof_sums_moebius(n, m, &t).unwrap();
            assert_eq!(a.s2, b.s3);
            assert_eq!(a.s3, b.s2);
            assert_eq!(a.s1, b.s1);
            assert_eq!(a.s4, b.s4);
        }
    }

    #[test]
    fn part1_identity_small() {
        let t = table(400);
        for (m, n) in [(1, 1), (2, 4), (4, 2), (10, 10), (123, 77)] {
            assert!(part1_identity_check(m, n, &t).unwrap(), "({m},{n})");
        }
    }

    #[test]
    fn f_q_spot_values() {
        let t = table(100);
        assert_eq!(f_q_naive(dims(2, 2), 1).unwrap(), BigInt::from(12));
        for q in 2..6 {
            assert_eq!(f_q_naive(dims(2, 2), q).unwrap(), BigInt::from(0));
            assert_eq!(f_q_moebius(dims(2, 2), q, &t).unwrap(), BigInt::from(0));
        }
        // 4 axis pairs of weight 3 plus 4 diagonal pairs of weight 1
        assert_eq!(f_q_naive(dims(3, 3), 2).unwrap(), BigInt::from(16));
        assert_eq!(f_q_brute(3, 3, 2), 16);
    }

    #[test]
    fn f_q_naive_matches_brute_force() {
        for m in 2..=10i64 {
            for n in 2..=10i64 {
                for q in 1..=10i64 {
                    assert_eq!(
                        f_q_naive(dims(m as u64, n as u64), q as u64).unwrap(),
                        BigInt::from(f_q_brute(m, n, q)),
                        "f_{q}({m},{n})"
                    );
                }
            }
        }
    }

    #[test]
    fn f_q_moebius_matches_naive() {
        let t = table(500);
        for (m, n) in [(2, 2), (3, 3), (4, 7), (30, 41), (101, 55)] {
            for q in 1..=(m.max(n)) {
                assert_eq!(
                    f_q_moebius(dims(m, n), q, &t).unwrap(),
                    f_q_naive(dims(m, n), q).unwrap(),
                    "f_{q}({m},{n})"
                );
            }
        }
    }

    #[test]
    fn f_q_total_mass() {
        // sum over gcd classes = (sum of all weights) = m^2 n^2 - mn
        let t = table(500);
        for (m, n) in [(2, 2), (4, 7), (13, 13), (20, 60)] {
            let mut total = BigInt::from(0);
            for q in 1..m.max(n) {
                total += f_q_moebius(dims(m, n), q, &t).unwrap();
            }
            let expect = BigInt::from(m) * m * n * n - BigInt::from(m) * n;
            assert_eq!(total, expect, "({m},{n})");
        }
    }

    #[test]
    fn f_q_rejects_zero() {
        assert!(f_q_naive(dims(3, 3), 0).is_err());
    }
}
