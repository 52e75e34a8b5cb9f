//! Symbolic coordinates for the scaled exponentials `E(z) = lambda * e^z`
//! with `0 < lambda < 1/e`.
//!
//! In this range E has an attracting real fixed point `q < 1`, and the set of
//! points that escape instead organizes into curves ("hairs") indexed by
//! sequences of integers. The finite-address part lives in the horizontal
//! rectangles
//!
//! ```text
//!   R_j = { 1 < Re z < c,  (2j-1)*pi < Im z < (2j+1)*pi },   |j| <= n_bound,
//! ```
//!
//! and the address of a point is the sequence of rectangle indices its orbit
//! visits. Each inverse branch `w -> log(w/lambda) + 2*pi*i*m` is a
//! contraction from the rectangle union into R_m once c is wide enough, so
//! pulling a rectangle center back along an address converges toward the
//! endpoint of the hair with that address. This module builds endpoints only;
//! it does not trace the hairs themselves.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::geom::Rect;

/// Everything derived from the pair (lambda, n_bound).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BouquetConfig {
    pub lambda: f64,
    /// Largest rectangle index tracked; symbols range over `-n_bound..=n_bound`.
    pub n_bound: u32,
    /// Right edge of the rectangles, the smallest integer >= 2 with
    /// `lambda * e^c > c + (2*n_bound + 1) * pi`, so that E(R_j) covers every
    /// rectangle and the inverse branches never miss.
    pub c: f64,
    /// The attracting real fixed point, `lambda * e^q = q` with `0 < q < 1`.
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BouquetError {
    #[error("lambda must lie strictly between 0 and 1/e, got {lambda}")]
    LambdaOutOfRange { lambda: f64 },
    #[error("symbol {symbol} at position {index} exceeds the bound {n_bound}")]
    SymbolOutOfBound {
        index: usize,
        symbol: i32,
        n_bound: u32,
    },
    #[error("itinerary has {have} symbols, need at least {need}")]
    TooShort { have: usize, need: usize },
    /// An inverse branch landed outside its rectangle. Cannot happen when the
    /// config came out of [`configure`]; rebuilding with a larger c fixes it.
    #[error("inverse branch at level {level} left its rectangle")]
    BranchMiss { level: usize },
}

impl BouquetConfig {
    /// One forward step `z -> lambda * e^z`.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.lambda * z.exp()
    }

    /// The open rectangle R_j.
    pub fn rectangle(&self, j: i32) -> Rect {
        let j = f64::from(j);
        Rect::new(1.0, self.c, (2.0 * j - 1.0) * PI, (2.0 * j + 1.0) * PI)
            .expect("c > 1 and the band has height 2*pi")
    }

    pub fn center(&self, j: i32) -> Complex64 {
        Complex64::new((1.0 + self.c) / 2.0, 2.0 * PI * f64::from(j))
    }

    /// Index j with `z` strictly inside R_j, if any. Points on a rectangle
    /// edge, outside `1 < Re z < c`, or beyond the tracked bands get `None`.
    pub fn strip_index(&self, z: Complex64) -> Option<i32> {
        if !(z.re > 1.0 && z.re < self.c) {
            return None;
        }
        let j = (z.im / (2.0 * PI)).round();
        if !j.is_finite() || j.abs() > f64::from(self.n_bound) {
            return None;
        }
        if (z.im - 2.0 * PI * j).abs() >= PI {
            return None;
        }
        Some(j as i32)
    }
}

/// Validate lambda, solve for the fixed point q, and take the smallest
/// integer c that makes every inverse branch land: `lambda * e^c` must clear
/// the far corner of the widest rectangle stack, `c + (2*n_bound + 1) * pi`.
pub fn configure(lambda: f64, n_bound: u32) -> Result<BouquetConfig, BouquetError> {
    assert!(n_bound >= 1, "need at least the strips -1, 0, 1");
    if !(lambda > 0.0 && lambda < 1.0 / std::f64::consts::E) {
        return Err(BouquetError::LambdaOutOfRange { lambda });
    }

    // lambda * e^x - x is positive at 0 and negative at 1, so the fixed point
    // bisects cleanly; 200 halvings flatten the bracket to machine width.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lambda * mid.exp() - mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    let q = 0.5 * (lo + hi);

    // Compare in logs so tiny lambda cannot overflow the left side.
    let reach = f64::from(2 * n_bound + 1) * PI;
    let mut c = 2.0f64;
    while lambda.ln() + c <= (c + reach).ln() {
        c += 1.0;
    }

    Ok(BouquetConfig {
        lambda,
        n_bound,
        c,
        q,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ItineraryOutcome {
    /// Rectangle indices of `z, E(z), ..., E^(k-1)(z)`, all inside the union.
    Symbols { symbols: Vec<i32> },
    /// `E^step(z)` is the first orbit point outside every tracked rectangle.
    EscapedStrips { step: usize },
}

/// Read off the first k rectangle indices along the orbit of z.
pub fn itinerary(config: &BouquetConfig, z: Complex64, k: usize) -> ItineraryOutcome {
    assert!(k >= 1, "an itinerary needs at least one symbol");
    let mut z = z;
    let mut symbols = Vec::with_capacity(k);
    for step in 0..k {
        match config.strip_index(z) {
            Some(j) => symbols.push(j),
            None => return ItineraryOutcome::EscapedStrips { step },
        }
        if step + 1 < k {
            z = config.apply(z);
        }
    }
    ItineraryOutcome::Symbols { symbols }
}

fn check_symbols(config: &BouquetConfig, s: &[i32]) -> Result<(), BouquetError> {
    if s.is_empty() {
        return Err(BouquetError::TooShort { have: 0, need: 1 });
    }
    for (index, &symbol) in s.iter().enumerate() {
        if symbol.unsigned_abs() > config.n_bound {
            return Err(BouquetError::SymbolOutOfBound {
                index,
                symbol,
                n_bound: config.n_bound,
            });
        }
    }
    Ok(())
}

/// Pull the center of the deepest rectangle back along the address s.
///
/// The branch targeting R_m is the principal log of w/lambda shifted by
/// 2*pi*i*m; with c from [`configure`] the shifted point always lands
/// strictly inside R_m. The result is the unique point whose first
/// `s.len()` rectangle indices are exactly s, up to the contraction
/// length of the address.
pub fn endpoint_from_itinerary(
    config: &BouquetConfig,
    s: &[i32],
) -> Result<Complex64, BouquetError> {
    check_symbols(config, s)?;
    let mut z = config.center(s[s.len() - 1]);
    for level in (0..s.len() - 1).rev() {
        let w = (z / config.lambda).ln() + Complex64::new(0.0, 2.0 * PI * f64::from(s[level]));
        if config.strip_index(w) != Some(s[level]) {
            return Err(BouquetError::BranchMiss { level });
        }
        z = w;
    }
    Ok(z)
}

/// Check that E acts on addresses as the left shift: the itinerary of
/// `E(endpoint(s))` over k steps must reproduce `s[1..=k]`. Needs at least
/// k + 1 symbols so the shifted prefix is still pinned by the construction.
pub fn verify_conjugacy(
    config: &BouquetConfig,
    s: &[i32],
    k: usize,
) -> Result<bool, BouquetError> {
    if s.len() < k + 1 {
        return Err(BouquetError::TooShort {
            have: s.len(),
            need: k + 1,
        });
    }
    let endpoint = endpoint_from_itinerary(config, s)?;
    match itinerary(config, config.apply(endpoint), k) {
        ItineraryOutcome::Symbols { symbols } => Ok(symbols == s[1..=k]),
        ItineraryOutcome::EscapedStrips { .. } => Ok(false),
    }
}

#[cfg(test)]
mod tests;
