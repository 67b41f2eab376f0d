//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Three operations are exposed: exact counting with residual data for a
//! single grid, threshold-checking a painted labeling, and a square-grid
//! residual sweep for the error-term plot. Exact integers are returned as
//! decimal strings since `t` overflows JavaScript's safe-integer range
//! quickly.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use tgrid_core::asymptotics::{residual, sweep_with_cap, SweepShape};
use tgrid_core::counting::GridDims;
use tgrid_core::moebius::MoebiusTable;
use tgrid_core::separability::{is_threshold, Labeling};

/// Keep single-call work comfortably inside a frame budget.
const MAX_DIM: u64 = 2_000_000;
const MAX_SWEEP_N: u64 = 600;

#[derive(Serialize)]
struct CountReport {
    m: u64,
    n: u64,
    f: String,
    t: String,
    main_term: f64,
    residual: f64,
    norm_conj: f64,
}

#[derive(Serialize)]
struct CheckReport {
    threshold: bool,
    /// Witness coefficients `a`, `b`, `c` as exact rational strings,
    /// present only when `threshold` is true.
    witness: Option<[String; 3]>,
}

#[derive(Serialize)]
struct SweepPoint {
    n: u64,
    residual: f64,
    norm_n3: f64,
}

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Exact `f` and `t` for an `m x n` grid plus the residual against the
/// `(6/pi^2)(mn)^2` main term.
#[wasm_bindgen]
pub fn grid_count(m: u64, n: u64) -> Result<JsValue, JsValue> {
    if m > MAX_DIM || n > MAX_DIM {
        return Err(err(format!("dimensions capped at {MAX_DIM} in the demo")));
    }
    let dims = GridDims::new(m, n).map_err(err)?;
    let table = MoebiusTable::sieve((m.min(n) - 1).max(1) as usize).map_err(err)?;
    let rec = residual(dims, &table).map_err(err)?;
    let report = CountReport {
        m,
        n,
        f: (&rec.t_exact - 2u8).to_string(),
        t: rec.t_exact.to_string(),
        main_term: rec.main_term,
        residual: rec.residual,
        norm_conj: rec.norm_conj,
    };
    serde_wasm_bindgen::to_value(&report).map_err(err)
}

/// Decide whether a painted labeling is realizable by a half plane.
///
/// `text` uses the same format as the CLI's `check` subcommand: an
/// `m n` header line followed by `n` rows of `0`/`1` characters.
#[wasm_bindgen]
pub fn check_labeling(text: &str) -> Result<JsValue, JsValue> {
    let labeling = Labeling::parse(text).map_err(err)?;
    let report = match is_threshold(&labeling) {
        Some(w) => CheckReport {
            threshold: true,
            witness: Some([w.a.to_string(), w.b.to_string(), w.c.to_string()]),
        },
        None => CheckReport {
            threshold: false,
            witness: None,
        },
    };
    serde_wasm_bindgen::to_value(&report).map_err(err)
}

/// Residuals for all square grids `n x n` with `2 <= n <= max_n`.
#[wasm_bindgen]
pub fn square_sweep(max_n: u64) -> Result<JsValue, JsValue> {
    if max_n > MAX_SWEEP_N {
        return Err(err(format!("sweep capped at n = {MAX_SWEEP_N} in the demo")));
    }
    let records = sweep_with_cap(SweepShape::Square { max_n }, max_n).map_err(err)?;
    let points: Vec<SweepPoint> = records
        .into_iter()
        .map(|r| SweepPoint {
            n: r.n,
            residual: r.residual,
            norm_n3: r.norm_n3,
        })
        .collect();
    serde_wasm_bindgen::to_value(&points).map_err(err)
}
