//! Rasterized Julia-set indicators: escape-time grids, backward-orbit
//! accumulation, boundary extraction, and PGM/PNG serialization.

use crate::consts::*;
use crate::exec;
use crate::fnkit::MeroFn;
use crate::geom::Rect;
use crate::orbit::{self, Fate, PreimageError};
use crate::ExtComplex;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Per-pixel verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CellCode {
    /// First step at which the orbit left the escape radius.
    EscapeStep { step: u32 },
    /// Orbit settled onto the cycle at this index of the grid legend.
    Converged { id: u32 },
    PoleHit,
    Undecided,
    /// Near the Julia set: holds a backward-orbit point (preimage raster)
    /// or sits on the escape boundary (boundary_extract).
    JNear,
}

/// A rectangle of cells sampled at pixel centers, row-major with the top
/// row at max Im. `legend[id]` is the limit representative for
/// `Converged { id }` cells, in first-seen row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterGrid {
    #[serde(rename = "box")]
    pub bounds: Rect,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<CellCode>,
    pub legend: Vec<Complex64>,
}

impl RasterGrid {
    pub fn cell_width(&self) -> f64 {
        (self.bounds.x1 - self.bounds.x0) / self.width as f64
    }

    pub fn cell_height(&self) -> f64 {
        (self.bounds.y1 - self.bounds.y0) / self.height as f64
    }

    /// Complex coordinate of the center of cell (col, row).
    pub fn center(&self, col: usize, row: usize) -> Complex64 {
        Complex64::new(
            self.bounds.x0 + (col as f64 + 0.5) * self.cell_width(),
            self.bounds.y1 - (row as f64 + 0.5) * self.cell_height(),
        )
    }

    pub fn at(&self, col: usize, row: usize) -> CellCode {
        self.cells[row * self.width + col]
    }

    /// Cell containing a point, or None outside the box. Points exactly on
    /// the max-x/min-y edges are folded into the last cell.
    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        if !self.bounds.contains(z) {
            return None;
        }
        let col = ((z.re - self.bounds.x0) / self.cell_width()) as usize;
        let row = ((self.bounds.y1 - z.im) / self.cell_height()) as usize;
        Some((col.min(self.width - 1), row.min(self.height - 1)))
    }

    /// Sidecar metadata: geometry, caller parameters, cycle legend, and the
    /// PGM byte scheme.
    pub fn sidecar(&self, params: serde_json::Value) -> serde_json::Value {
        serde_json::json!({
            "box": self.bounds,
            "width": self.width,
            "height": self.height,
            "params": params,
            "legend": self.legend,
            "pgm_bytes": {
                "jnear": 0,
                "converged": "16 + (id % 12) * 8",
                "pole_hit": 112,
                "undecided": 120,
                "escape": "128 + floor(127 * cdf(step)), histogram-equalized",
            },
        })
    }
}

/// Escape-time raster: iterate every pixel center and code the outcome.
/// For meromorphic maps the escape coding is heuristic (poles also send
/// orbits far out) which is why pole hits carry their own code.
pub fn raster_escape(
    f: &MeroFn,
    bounds: Rect,
    width: usize,
    height: usize,
    max_iters: usize,
) -> RasterGrid {
    enum Raw {
        Escape(u32),
        Limit(Complex64),
        Pole,
        Open,
    }
    let raw = exec::map_indexed(width * height, |i| {
        let z = Complex64::new(
            bounds.x0 + ((i % width) as f64 + 0.5) * (bounds.x1 - bounds.x0) / width as f64,
            bounds.y1 - ((i / width) as f64 + 0.5) * (bounds.y1 - bounds.y0) / height as f64,
        );
        match orbit::iterate(f, z, max_iters).fate {
            Fate::Escaped { step } => Raw::Escape(step as u32),
            Fate::ConvergedTo { value } => Raw::Limit(value),
            Fate::CycleOfPeriod { representative, .. } => Raw::Limit(representative),
            Fate::HitPole { .. } => Raw::Pole,
            Fate::Undecided => Raw::Open,
        }
    });
    // legend ids are assigned in row-major first-seen order, so the result
    // is independent of the parallel schedule
    let mut legend: Vec<Complex64> = Vec::new();
    let cells = raw
        .into_iter()
        .map(|r| match r {
            Raw::Escape(step) => CellCode::EscapeStep { step },
            Raw::Pole => CellCode::PoleHit,
            Raw::Open => CellCode::Undecided,
            Raw::Limit(v) => {
                let id = legend
                    .iter()
                    .position(|w| (w - v).norm() < DEDUP_TOL)
                    .unwrap_or_else(|| {
                        legend.push(v);
                        legend.len() - 1
                    });
                CellCode::Converged { id: id as u32 }
            }
        })
        .collect();
    RasterGrid { bounds, width, height, cells, legend }
}

/// Backward-orbit raster: mark every cell holding a point of the depth-d
/// backward orbit of `target` (including the target itself when finite and
/// inside the box). Completeness is relative to the Newton seed lattice
/// used by the level solver.
pub fn raster_preimage(
    f: &MeroFn,
    bounds: Rect,
    width: usize,
    height: usize,
    depth: usize,
    target: ExtComplex,
) -> Result<RasterGrid, PreimageError> {
    let levels = orbit::preimage_levels(f, target, depth, bounds, PREIMAGE_GRID_N)?;
    let mut grid = RasterGrid {
        bounds,
        width,
        height,
        cells: vec![CellCode::Undecided; width * height],
        legend: Vec::new(),
    };
    let finite_target = match target {
        ExtComplex::Finite { value } => Some(value),
        ExtComplex::Infinity => None,
    };
    for z in finite_target.iter().chain(levels.iter().flatten()) {
        if let Some((col, row)) = grid.locate(*z) {
            grid.cells[row * width + col] = CellCode::JNear;
        }
    }
    Ok(grid)
}

/// Boundary raster: JNear wherever the closed 4-neighborhood holds both
/// EscapeStep and non-EscapeStep codes; everything else is kept.
pub fn boundary_extract(grid: &RasterGrid) -> RasterGrid {
    let (w, h) = (grid.width as isize, grid.height as isize);
    let is_esc = |col: isize, row: isize| {
        matches!(grid.cells[(row * w + col) as usize], CellCode::EscapeStep { .. })
    };
    let cells = (0..grid.cells.len())
        .map(|i| {
            let (col, row) = (i as isize % w, i as isize / w);
            let mut esc = false;
            let mut non = false;
            for (dc, dr) in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (c, r) = (col + dc, row + dr);
                if (0..w).contains(&c) && (0..h).contains(&r) {
                    if is_esc(c, r) {
                        esc = true;
                    } else {
                        non = true;
                    }
                }
            }
            if esc && non {
                CellCode::JNear
            } else {
                grid.cells[i]
            }
        })
        .collect();
    RasterGrid { cells, ..grid.clone() }
}

/// 8-bit binary PGM (P5), row-major, top row = max Im. Fixed codes: JNear
/// 0, Converged 16 + (id mod 12)·8, PoleHit 112, Undecided 120. Escape
/// steps fill 129..=255 by histogram equalization over the escape cells
/// (integer arithmetic only, so the bytes are reproducible).
pub fn pgm_bytes(grid: &RasterGrid) -> Vec<u8> {
    let mut steps: Vec<u32> = grid
        .cells
        .iter()
        .filter_map(|c| match c {
            CellCode::EscapeStep { step } => Some(*step),
            _ => None,
        })
        .collect();
    steps.sort_unstable();
    let total = steps.len() as u64;
    let escape_byte = |step: u32| -> u8 {
        // cells with step <= this one, via binary search on the sorted list
        let le = steps.partition_point(|s| *s <= step) as u64;
        128 + (127 * le / total) as u8
    };
    let mut out = format!("P5\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    out.extend(grid.cells.iter().map(|c| match c {
        CellCode::JNear => 0,
        CellCode::Converged { id } => 16 + (id % 12) as u8 * 8,
        CellCode::PoleHit => 112,
        CellCode::Undecided => 120,
        CellCode::EscapeStep { step } => escape_byte(*step),
    }));
    out
}

/// PNG encoding of the same bytes as [`pgm_bytes`].
#[cfg(feature = "png")]
pub fn png_bytes(grid: &RasterGrid) -> Vec<u8> {
    let pgm = pgm_bytes(grid);
    let pixels = pgm[pgm.len() - grid.width * grid.height..].to_vec();
    let img = image::GrayImage::from_raw(grid.width as u32, grid.height as u32, pixels)
        .expect("pixel count matches dimensions");
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageOutputFormat::Png)
        .expect("in-memory PNG encoding");
    out.into_inner()
}
