//! Residual laboratory for the main-term approximation
//! `t(m,n) ~ (6/pi^2)(mn)^2`: per-grid residual records, deterministic
//! sweeps, a log-log exponent fit and the `alpha(m)` profile.
//!
//! Bounds with unspecified O-constants are never asserted here; the sweep
//! reports measured maxima and the test suite pins generous explicit caps.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::io::Write;
use std::sync::OnceLock;

use crate::counting::{f_moebius, GridDims};
use crate::moebius::{harmonic, MoebiusTable};
use crate::{Error, Result};

/// Default ceiling on sweep sizes.
pub const DEFAULT_MAX_SWEEP_N: u64 = 5_000;

/// Decimal digits carried by [`inv_zeta2`].
const INV_ZETA2_DIGITS: u32 = 70;

/// `6/pi^2 = 1/zeta(2)` as an exact rational carrying 70 decimal digits.
///
/// pi is evaluated on the fly from Machin's formula in integer arithmetic
/// rather than transcribed as a literal.
pub fn inv_zeta2() -> &'static BigRational {
    static CACHE: OnceLock<BigRational> = OnceLock::new();
    CACHE.get_or_init(|| {
        let guard = INV_ZETA2_DIGITS + 15;
        let scale = BigInt::from(10u32).pow(guard);
        // pi = 16 atan(1/5) - 4 atan(1/239)
        let pi = atan_inv_scaled(5, &scale) * 16 - atan_inv_scaled(239, &scale) * 4;
        let out_scale = BigInt::from(10u32).pow(INV_ZETA2_DIGITS);
        // 6/pi^2 = 6 * scale^2 / pi_scaled^2, then rescaled to the output
        let num = BigInt::from(6) * &scale * &scale * &out_scale / (&pi * &pi);
        BigRational::new(num, out_scale)
    })
}

/// `atan(1/x) * scale`, truncated, by the alternating Taylor series.
fn atan_inv_scaled(x: u64, scale: &BigInt) -> BigInt {
    let x2 = BigInt::from(x * x);
    let mut term = scale / BigInt::from(x);
    let mut total = BigInt::zero();
    let mut k = 0u32;
    while !term.is_zero() {
        let contrib = &term / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            total += contrib;
        } else {
            total -= contrib;
        }
        term /= &x2;
        k += 1;
    }
    total
}

/// One row of an error-term study.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRecord {
    pub m: u64,
    pub n: u64,
    pub t_exact: BigInt,
    /// `(6/pi^2)(mn)^2`, rounded from the high-precision rational.
    pub main_term: f64,
    /// `t_exact - main_term`, computed in exact rationals then rounded.
    pub residual: f64,
    /// `residual / (m n^2)` with `m <= n`.
    pub norm_mn2: f64,
    /// `residual / n^3` with `n` the larger dimension; equals `norm_mn2`
    /// on square grids.
    pub norm_n3: f64,
    /// `residual / (mn)^(3/2)`, the conjectured error scale.
    pub norm_conj: f64,
}

/// Exact count and normalized residuals for one grid.
pub fn residual(dims: GridDims, table: &MoebiusTable) -> Result<ResidualRecord> {
    let t_exact = f_moebius(dims, table)? + 2;
    Ok(residual_from_exact(dims, t_exact))
}

fn residual_from_exact(dims: GridDims, t_exact: BigInt) -> ResidualRecord {
    let (lo, hi) = (dims.m().min(dims.n()), dims.m().max(dims.n()));
    let mn = BigInt::from(dims.m()) * BigInt::from(dims.n());
    let main_rat = inv_zeta2() * BigRational::from(&mn * &mn);
    let residual_rat = BigRational::from(t_exact.clone()) - &main_rat;
    let main_term = main_rat.to_f64().expect("main term fits f64");
    let res = residual_rat.to_f64().expect("residual fits f64");
    let mn_f = mn.to_f64().expect("mn fits f64");
    ResidualRecord {
        m: dims.m(),
        n: dims.n(),
        t_exact,
        main_term,
        residual: res,
        norm_mn2: res / (lo as f64 * (hi as f64).powi(2)),
        norm_n3: res / (hi as f64).powi(3),
        norm_conj: res / mn_f.powf(1.5),
    }
}

/// Shape of an error-term sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepShape {
    /// Square grids `n x n`, `2 <= n <= max_n`.
    Square { max_n: u64 },
    /// `m` fixed, `n` from `2` to `max_n`.
    FixedM { m: u64, max_n: u64 },
    /// `m = floor(sqrt(n))`, `4 <= n <= max_n` — the regime where the two
    /// historical error terms trade places.
    SqrtAspect { max_n: u64 },
}

impl SweepShape {
    fn cells(self) -> Result<Vec<(u64, u64)>> {
        let out: Vec<(u64, u64)> = match self {
            SweepShape::Square { max_n } => (2..=max_n).map(|n| (n, n)).collect(),
            SweepShape::FixedM { m, max_n } => {
                if m < 2 {
                    return Err(Error::InvalidDims { m, n: max_n });
                }
                (2..=max_n).map(|n| (m, n)).collect()
            }
            SweepShape::SqrtAspect { max_n } => (4..=max_n)
                .map(|n| ((n as f64).sqrt().floor() as u64, n))
                .collect(),
        };
        if out.is_empty() {
            return Err(Error::EmptySweep);
        }
        Ok(out)
    }

    fn max_n(self) -> u64 {
        match self {
            SweepShape::Square { max_n }
            | SweepShape::FixedM { max_n, .. }
            | SweepShape::SqrtAspect { max_n } => max_n,
        }
    }
}

/// Deterministic record sequence ordered by `(m,n)`; identical specs yield
/// byte-identical CSV regardless of worker count.
pub fn sweep(shape: SweepShape) -> Result<Vec<ResidualRecord>> {
    sweep_with_cap(shape, DEFAULT_MAX_SWEEP_N)
}

pub fn sweep_with_cap(shape: SweepShape, cap: u64) -> Result<Vec<ResidualRecord>> {
    if shape.max_n() > cap {
        return Err(Error::CapExceeded {
            cells: shape.max_n(),
            cap,
        });
    }
    let cells = shape.cells()?;
    let limit = cells
        .iter()
        .map(|&(m, n)| m.max(n) as usize - 1)
        .max()
        .expect("non-empty");
    let table = MoebiusTable::sieve(limit.max(1))?;
    let mut records = cells
        .into_par_iter()
        .map(|(m, n)| residual(GridDims::new(m, n)?, &table))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.m, r.n));
    Ok(records)
}

/// Least-squares fit of `log |residual|` against `log(mn)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Exploratory probe of the residual growth exponent; no statistical rigor
/// claimed. Records with zero residual are skipped.
pub fn fit_exponent(records: &[ResidualRecord]) -> Result<ExponentFit> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.residual != 0.0 && r.residual.is_finite())
        .map(|r| ((r.m as f64 * r.n as f64).ln(), r.residual.abs().ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::TooFewRecords);
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ExponentFit {
        slope,
        intercept,
        r2,
    })
}

/// `alpha(m) = alpha(m,m)` with its harmonic bound, for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaPoint {
    pub m: u64,
    pub alpha: BigRational,
    pub bound: BigRational,
}

impl AlphaPoint {
    pub fn within_bound(&self) -> bool {
        self.alpha.abs() <= self.bound
    }
}

/// Exact `alpha(m)` for every `m <= max_m`.
pub fn alpha_profile(max_m: usize, table: &MoebiusTable) -> Result<Vec<AlphaPoint>> {
    if max_m == 0 {
        return Err(Error::ZeroLimit);
    }
    (1..=max_m)
        .into_par_iter()
        .map(|m| {
            let a = table.alpha(m, m as u64)?;
            Ok(AlphaPoint {
                m: m as u64,
                alpha: a.value,
                bound: harmonic(m),
            })
        })
        .collect()
}

/// Renders a float with 12 significant digits, deterministically.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

pub const CSV_HEADER: &str = "m,n,t_exact,main_term,residual,norm_mn2,norm_n3,norm_conj";

/// Writes the sweep CSV with the fixed schema and 12-significant-digit
/// floats; `t_exact` is the full decimal integer.
pub fn write_csv<W: Write>(records: &[ResidualRecord], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.m,
            r.n,
            r.t_exact,
            format_float(r.main_term),
            format_float(r.residual),
            format_float(r.norm_mn2),
            format_float(r.norm_n3),
            format_float(r.norm_conj),
        )?;
    }
    Ok(())
}

/// Synthetic square-grid records with `|residual| = (mn)^exponent`; used to
/// validate the exponent fit against a known power law.
pub fn synthetic_power_law(exponent: f64, count: usize) -> Vec<ResidualRecord> {
    (0..count)
        .map(|k| {
            let n = k as u64 + 2;
            let mn = (n * n) as f64;
            ResidualRecord {
                m: n,
                n,
                t_exact: BigInt::zero(),
                main_term: 1.0,
                residual: mn.powf(exponent),
                norm_mn2: 0.0,
                norm_n3: 0.0,
                norm_conj: 0.0,
            }
        })
        .collect()
}
