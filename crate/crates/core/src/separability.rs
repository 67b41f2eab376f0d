//! Independent geometric ground truth: decide, exactly over the rationals,
//! whether a labeling of `G(m,n)` is realizable by a half-plane test, and
//! count all such labelings on small grids by exhausting the `2^(mn)`
//! possibilities.
//!
//! Feasibility of the strict separation is reduced to a unit margin: the
//! 1-labeled points must satisfy `a*x + b*y + c >= 1`, which is equivalent
//! to `> 0` because the constraint set is finite and positively homogeneous
//! in `(a,b,c)` on the 0 side. The resulting linear system in the three
//! unknowns is decided by Fourier-Motzkin elimination over exact integers
//! (`c` first, then `b`), with a rational witness recovered by
//! back-substitution.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::collections::HashSet;

use crate::counting::GridDims;
use crate::{Error, Result};

/// Default cell cap for exhaustive enumeration (`2^20` feasibility calls).
pub const DEFAULT_ENUMERATION_CAP: u64 = 20;
/// Hard ceiling for enumeration; beyond this the search is not a desk job.
pub const MAX_ENUMERATION_CAP: u64 = 24;

/// One labeling `tau : G(m,n) -> {0,1}`, row-major: the bit of `(x,y)` is
/// `bits[y*m + x]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    dims: GridDims,
    bits: Vec<bool>,
}

impl Labeling {
    pub fn new(dims: GridDims, bits: Vec<bool>) -> Result<Self> {
        let expected = dims.cells() as usize;
        if bits.len() != expected {
            return Err(Error::BitCountMismatch {
                expected,
                got: bits.len(),
            });
        }
        Ok(Labeling { dims, bits })
    }

    /// Builds a labeling from the low `m*n` bits of `mask`.
    pub fn from_mask(dims: GridDims, mask: u64) -> Result<Self> {
        let cells = dims.cells();
        if cells > 63 {
            return Err(Error::CapExceeded { cells, cap: 63 });
        }
        let bits = (0..cells).map(|i| mask >> i & 1 == 1).collect();
        Labeling::new(dims, bits)
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn bit(&self, x: u64, y: u64) -> bool {
        self.bits[(y * self.dims.m() + x) as usize]
    }

    pub fn complement(&self) -> Labeling {
        Labeling {
            dims: self.dims,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// Parses the debug text format: first line `m n`, then `n` rows of `m`
    /// characters from `{0,1}`, row `y` on line `y+1`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::LabelingParse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let m: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::LabelingParse("header must be \"m n\"".into()))?;
        let n: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::LabelingParse("header must be \"m n\"".into()))?;
        if parts.next().is_some() {
            return Err(Error::LabelingParse("header must be \"m n\"".into()));
        }
        let dims = GridDims::new(m, n)?;
        let mut bits = vec![false; (m * n) as usize];
        for y in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::LabelingParse(format!("missing row {y}")))?;
            let row: Vec<char> = line.trim_end().chars().collect();
            if row.len() != m as usize {
                return Err(Error::LabelingParse(format!(
                    "row {y} has {} characters, expected {m}",
                    row.len()
                )));
            }
            for (x, ch) in row.iter().enumerate() {
                bits[(y * m) as usize + x] = match ch {
                    '0' => false,
                    '1' => true,
                    other => {
                        return Err(Error::LabelingParse(format!(
                            "unexpected character {other:?} in row {y}"
                        )))
                    }
                };
            }
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::LabelingParse("trailing content after grid rows".into()));
        }
        Labeling::new(dims, bits)
    }
}

impl std::fmt::Display for Labeling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{} {}", self.dims.m(), self.dims.n())?;
        for y in 0..self.dims.n() {
            for x in 0..self.dims.m() {
                write!(f, "{}", if self.bit(x, y) { '1' } else { '0' })?;
            }
            if y + 1 < self.dims.n() {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Which class receives the boundary of the separating line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryConvention {
    /// `tau(x,y) = 0` iff `a*x + b*y + c <= 0` (the default convention).
    #[default]
    ZeroSide,
    /// `tau(x,y) = 0` iff `a*x + b*y + c < 0`.
    OneSide,
}

/// Exact rational line coefficients certifying a threshold labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlaneWitness {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

/// One inequality `k[0]*a + k[1]*b + k[2]*c <= k[3]`.
type Constraint = [i64; 4];

fn constraints_for(dims: GridDims, bit_at: impl Fn(u64, u64) -> bool, conv: BoundaryConvention) -> Vec<Constraint> {
    let mut out = Vec::with_capacity(dims.cells() as usize);
    for y in 0..dims.n() {
        for x in 0..dims.m() {
            let (xi, yi) = (x as i64, y as i64);
            let one_labeled = bit_at(x, y);
            let margin_on_zero = matches!(conv, BoundaryConvention::OneSide);
            if one_labeled {
                // a*x + b*y + c >= 1 (ZeroSide) or >= 0 (OneSide)
                out.push([-xi, -yi, -1, if margin_on_zero { 0 } else { -1 }]);
            } else {
                // a*x + b*y + c <= 0 (ZeroSide) or <= -1 (OneSide)
                out.push([xi, yi, 1, if margin_on_zero { -1 } else { 0 }]);
            }
        }
    }
    out
}

/// Normalizes by the gcd of the coefficients. Returns `Err(())` when the
/// constraint reduces to `0 <= negative`, `Ok(None)` when it is vacuous.
fn normalize(mut k: Constraint) -> std::result::Result<Option<Constraint>, ()> {
    if k[0] == 0 && k[1] == 0 && k[2] == 0 {
        return if k[3] >= 0 { Ok(None) } else { Err(()) };
    }
    // divide by the gcd of all four entries so the integer form stays exact
    let mut g = 0i64;
    for v in &k {
        g = num_integer::gcd(g, v.abs());
    }
    if g > 1 {
        for v in &mut k {
            *v /= g;
        }
    }
    Ok(Some(k))
}

/// Eliminates variable `var` by pairing lower and upper constraints.
fn eliminate(constraints: &[Constraint], var: usize) -> Option<Vec<Constraint>> {
    let mut lows: Vec<&Constraint> = Vec::new();
    let mut ups: Vec<&Constraint> = Vec::new();
    let mut rest: Vec<Constraint> = Vec::new();
    let mut seen: HashSet<Constraint> = HashSet::new();
    for k in constraints {
        match k[var].signum() {
            -1 => lows.push(k),
            1 => ups.push(k),
            _ => {
                if seen.insert(*k) {
                    rest.push(*k);
                }
            }
        }
    }
    for l in &lows {
        for u in &ups {
            let (lu, ul) = (u[var], -l[var]);
            let mut k = [0i64; 4];
            for i in 0..4 {
                k[i] = lu * l[i] + ul * u[i];
            }
            debug_assert_eq!(k[var], 0);
            match normalize(k) {
                Err(()) => return None,
                Ok(None) => {}
                Ok(Some(k)) => {
                    if seen.insert(k) {
                        rest.push(k);
                    }
                }
            }
        }
    }
    Some(rest)
}

/// Exact bounds for the single remaining variable `var`; `None` on
/// contradiction among variable-free constraints.
fn single_var_bounds(constraints: &[Constraint], var: usize) -> Option<(Option<(i64, i64)>, Option<(i64, i64)>)> {
    // bounds are rationals rhs/coef stored unevaluated as (num, den), den > 0
    let mut lower: Option<(i64, i64)> = None; // var >= num/den
    let mut upper: Option<(i64, i64)> = None; // var <= num/den
    for k in constraints {
        let coef = k[var];
        if coef == 0 {
            if k[3] < 0 {
                return None;
            }
            continue;
        }
        let bound = (k[3], coef);
        if coef > 0 {
            // var <= rhs/coef
            upper = Some(match upper {
                None => bound,
                Some(u) => {
                    // min: bound < u  <=>  bound.0*u.1 < u.0*bound.1 (dens > 0)
                    if (bound.0 as i128) * (u.1 as i128) < (u.0 as i128) * (bound.1 as i128) {
                        bound
                    } else {
                        u
                    }
                }
            });
        } else {
            // var >= rhs/coef with coef < 0; normalize den positive
            let bound = (-k[3], -coef);
            lower = Some(match lower {
                None => bound,
                Some(l) => {
                    if (bound.0 as i128) * (l.1 as i128) > (l.0 as i128) * (bound.1 as i128) {
                        bound
                    } else {
                        l
                    }
                }
            });
        }
    }
    Some((lower, upper))
}

fn bounds_consistent(lower: Option<(i64, i64)>, upper: Option<(i64, i64)>) -> bool {
    match (lower, upper) {
        (Some(l), Some(u)) => (l.0 as i128) * (u.1 as i128) <= (u.0 as i128) * (l.1 as i128),
        _ => true,
    }
}

/// Decision-only feasibility of a constraint system in (a, b, c).
fn fm_feasible(constraints: &[Constraint]) -> bool {
    let after_c = match eliminate(constraints, 2) {
        Some(s) => s,
        None => return false,
    };
    let after_b = match eliminate(&after_c, 1) {
        Some(s) => s,
        None => return false,
    };
    match single_var_bounds(&after_b, 0) {
        Some((lower, upper)) => bounds_consistent(lower, upper),
        None => false,
    }
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Picks a value inside `[lower, upper]` (either side may be open).
fn pick(lower: Option<BigRational>, upper: Option<BigRational>) -> BigRational {
    match (lower, upper) {
        (Some(l), Some(u)) => (l + u) / BigRational::from(BigInt::from(2)),
        (Some(l), None) => l,
        (None, Some(u)) => u,
        (None, None) => BigRational::zero(),
    }
}

/// Bounds on variable `var` of `constraints` after fixing earlier-eliminated
/// variables to the rational values in `fixed` (indexed by variable).
fn rational_bounds(
    constraints: &[Constraint],
    var: usize,
    fixed: &[(usize, BigRational)],
) -> Option<(Option<BigRational>, Option<BigRational>)> {
    let mut lower: Option<BigRational> = None;
    let mut upper: Option<BigRational> = None;
    for k in constraints {
        let mut rhs = BigRational::from(BigInt::from(k[3]));
        for (idx, val) in fixed {
            rhs -= BigRational::from(BigInt::from(k[*idx])) * val;
        }
        let coef = k[var];
        if coef == 0 {
            if rhs.is_negative() {
                return None;
            }
            continue;
        }
        let bound = rhs / BigRational::from(BigInt::from(coef));
        if coef > 0 {
            upper = Some(match upper {
                None => bound,
                Some(u) => u.min(bound),
            });
        } else {
            lower = Some(match lower {
                None => bound,
                Some(l) => l.max(bound),
            });
        }
    }
    Some((lower, upper))
}

fn fm_witness(constraints: &[Constraint]) -> Option<HalfPlaneWitness> {
    let after_c = eliminate(constraints, 2)?;
    let after_b = eliminate(&after_c, 1)?;
    let (lower, upper) = single_var_bounds(&after_b, 0)?;
    if !bounds_consistent(lower, upper) {
        return None;
    }
    let a = pick(
        lower.map(|(num, den)| ratio(num, den)),
        upper.map(|(num, den)| ratio(num, den)),
    );
    let (bl, bu) = rational_bounds(&after_c, 1, &[(0, a.clone())])?;
    let b = pick(bl, bu);
    let (cl, cu) = rational_bounds(constraints, 2, &[(0, a.clone()), (1, b.clone())])?;
    let c = pick(cl, cu);
    Some(HalfPlaneWitness { a, b, c })
}

/// Decides whether `labeling` is a threshold function under the default
/// boundary convention, returning a rational witness on success.
pub fn is_threshold(labeling: &Labeling) -> Option<HalfPlaneWitness> {
    is_threshold_with(labeling, BoundaryConvention::ZeroSide)
}

pub fn is_threshold_with(
    labeling: &Labeling,
    conv: BoundaryConvention,
) -> Option<HalfPlaneWitness> {
    let cs = constraints_for(labeling.dims(), |x, y| labeling.bit(x, y), conv);
    fm_witness(&cs)
}

/// Checks that the sign pattern of `a*x + b*y + c` reproduces `labeling`
/// under the given convention, in exact arithmetic.
pub fn verify_witness_with(
    labeling: &Labeling,
    w: &HalfPlaneWitness,
    conv: BoundaryConvention,
) -> bool {
    let dims = labeling.dims();
    for y in 0..dims.n() {
        for x in 0..dims.m() {
            let s = &w.a * BigRational::from(BigInt::from(x))
                + &w.b * BigRational::from(BigInt::from(y))
                + &w.c;
            let zero_side = match conv {
                BoundaryConvention::ZeroSide => !s.is_positive(),
                BoundaryConvention::OneSide => s.is_negative(),
            };
            if zero_side == labeling.bit(x, y) {
                return false;
            }
        }
    }
    true
}

/// `verify_witness_with` under the default "`<= 0` means class 0" convention.
pub fn verify_witness(labeling: &Labeling, w: &HalfPlaneWitness) -> bool {
    verify_witness_with(labeling, w, BoundaryConvention::ZeroSide)
}

/// Iterates all `2^(mn)` labelings and counts the threshold functions.
/// Refuses grids with more than `cap` cells.
pub fn count_by_enumeration(dims: GridDims, cap: u64) -> Result<BigInt> {
    count_by_enumeration_with(dims, cap, BoundaryConvention::ZeroSide)
}

pub fn count_by_enumeration_with(
    dims: GridDims,
    cap: u64,
    conv: BoundaryConvention,
) -> Result<BigInt> {
    let cells = dims.cells();
    if cells > cap || cells > MAX_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            cells,
            cap: cap.min(MAX_ENUMERATION_CAP),
        });
    }
    let (m, n) = (dims.m(), dims.n());
    let count = (0u64..1 << cells)
        .into_par_iter()
        .filter(|&mask| {
            let cs = constraints_for(dims, |x, y| mask >> (y * m + x) & 1 == 1, conv);
            debug_assert_eq!(cs.len() as u64, m * n);
            fm_feasible(&cs)
        })
        .count();
    Ok(BigInt::from(count))
}
