//! Axis-aligned boxes in the plane and the pixel/lattice conventions used by
//! every grid-based search and raster.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Closed axis-aligned box `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

#[derive(Debug, thiserror::Error)]
#[error("degenerate box: need x0 < x1 and y0 < y1, got [{x0}, {x1}] x [{y0}, {y1}]")]
pub struct DegenerateBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self, DegenerateBox> {
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite())
            || x0 >= x1
            || y0 >= y1
        {
            return Err(DegenerateBox { x0, x1, y0, y1 });
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    /// Square box centred at the origin with half-side `r`.
    pub fn centered(r: f64) -> Self {
        Rect { x0: -r, x1: r, y0: -r, y1: r }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    /// Box scaled about its centre by the linear factor `k`.
    pub fn scaled(&self, k: f64) -> Rect {
        let cx = 0.5 * (self.x0 + self.x1);
        let cy = 0.5 * (self.y0 + self.y1);
        let hw = 0.5 * self.width() * k;
        let hh = 0.5 * self.height() * k;
        Rect { x0: cx - hw, x1: cx + hw, y0: cy - hh, y1: cy + hh }
    }

    /// Centre of the pixel at (row `i`, column `j`) of a `w × h` raster.
    ///
    /// Row 0 is the top of the image, i.e. the side of largest imaginary
    /// part; columns grow with the real part.
    pub fn pixel_center(&self, i: usize, j: usize, w: usize, h: usize) -> Complex64 {
        let x = self.x0 + (j as f64 + 0.5) * self.width() / w as f64;
        let y = self.y1 - (i as f64 + 0.5) * self.height() / h as f64;
        Complex64::new(x, y)
    }

    /// Centres of an `n × n` lattice of equal cells covering the box, in
    /// row-major order from the top row down (same convention as rasters).
    pub fn lattice(&self, n: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.pixel_center(i, j, n, n));
            }
        }
        out
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.x0, self.x1, self.y0, self.y1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_rows_run_top_down() {
        let r = Rect::new(-2.0, 2.0, -1.0, 1.0).unwrap();
        let top = r.pixel_center(0, 0, 4, 2);
        let bottom = r.pixel_center(1, 3, 4, 2);
        assert_eq!(top, Complex64::new(-1.5, 0.5));
        assert_eq!(bottom, Complex64::new(1.5, -0.5));
    }

    #[test]
    fn degenerate_boxes_rejected() {
        assert!(Rect::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Rect::new(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(Rect::new(f64::NAN, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn scaled_keeps_center() {
        let r = Rect::new(0.0, 2.0, 0.0, 4.0).unwrap();
        let s = r.scaled(3.0);
        assert_eq!(s, Rect { x0: -2.0, x1: 4.0, y0: -4.0, y1: 8.0 });
    }
}
