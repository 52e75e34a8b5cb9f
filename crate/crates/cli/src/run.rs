//! Subcommand execution and artifact emission.
//!
//! Every runner produces a JSON report (config echo + result), an optional
//! list of images, and a one-screen summary. With `--out PREFIX` the report
//! and images land on disk and the summary goes to stdout; without it the
//! report itself goes to stdout and the summary to stderr, so both shapes
//! stay pipeable.

use std::fs;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use td_core::julia::{CellCode, RasterGrid};
use td_core::newton::{self, Verdict};
use td_core::orbit::{Fate, PreimageError};
use td_core::{bouquet, fatou, julia, orbit, periodic};
use td_core::{MeroFn, Rect};

use crate::args::{self, BasinsArgs, BouquetArgs, ClassifyArgs, Cmd, FlowArgs, JuliaArgs, Method,
                  NewtonCmd, OrbitArgs, PeriodicArgs, SmaleArgs};
use crate::catalog::CATALOG;
use crate::CliError;

struct Artifacts {
    result: Value,
    images: Vec<(&'static str, Vec<u8>)>,
    summary: String,
}

pub fn run(cmd: &Cmd) -> Result<(), CliError> {
    let (out, art) = match cmd {
        Cmd::Orbit(a) => (&a.out.out, run_orbit(a)?),
        Cmd::Classify(a) => (&a.out.out, run_classify(a)?),
        Cmd::Periodic(a) => (&a.out.out, run_periodic(a)?),
        Cmd::Julia(a) => (&a.out.out, run_julia(a)?),
        Cmd::Newton(NewtonCmd::Smale(a)) => (&a.out.out, run_smale(a)?),
        Cmd::Newton(NewtonCmd::Basins(a)) => (&a.out.out, run_basins(a)?),
        Cmd::Newton(NewtonCmd::Flow(a)) => (&a.out.out, run_flow(a)?),
        Cmd::Bouquet(a) => (&a.out.out, run_bouquet(a)?),
        Cmd::Catalog => (&None, run_catalog()),
    };
    let report = json!({
        "tool": "td",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cmd,
        "result": art.result,
    });
    emit(out, &report, &art.images, &art.summary)
}

fn emit(
    out: &Option<PathBuf>,
    report: &Value,
    images: &[(&'static str, Vec<u8>)],
    summary: &str,
) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(report).expect("report serializes");
    body.push('\n');
    match out {
        Some(prefix) => {
            if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)
                    .map_err(|e| CliError::runtime(format!("cannot create {dir:?}: {e}")))?;
            }
            let mut written = Vec::new();
            let json_path = path_with_ext(prefix, "json");
            fs::write(&json_path, body)
                .map_err(|e| CliError::runtime(format!("cannot write {json_path:?}: {e}")))?;
            written.push(json_path);
            for (ext, bytes) in images {
                let path = path_with_ext(prefix, ext);
                fs::write(&path, bytes)
                    .map_err(|e| CliError::runtime(format!("cannot write {path:?}: {e}")))?;
                written.push(path);
            }
            println!("{summary}");
            for path in written {
                println!("  wrote {}", path.display());
            }
        }
        None => {
            print!("{body}");
            eprintln!("{summary}");
            if !images.is_empty() {
                eprintln!("  (image output skipped: pass --out PREFIX to write it)");
            }
        }
    }
    Ok(())
}

fn path_with_ext(prefix: &std::path::Path, ext: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn fmt_fate(fate: &Fate) -> String {
    match fate {
        Fate::ConvergedTo { value } => format!("converged to {}", fmt_c(*value)),
        Fate::CycleOfPeriod { period, representative } => {
            format!("settled on a {period}-cycle through {}", fmt_c(*representative))
        }
        Fate::Escaped { step } => format!("escaped at step {step}"),
        Fate::HitPole { step } => format!("hit a pole at step {step}"),
        Fate::Undecided => "undecided within the budget".to_string(),
    }
}

/// Shift a box by a random sub-cell offset so lattices and pixel centers
/// stop aligning with any symmetric structure. Deterministic in the seed.
fn jittered(rect: Rect, cells_per_side: usize, seed: u64) -> Rect {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dx = rng.gen::<f64>() * rect.width() / cells_per_side as f64;
    let dy = rng.gen::<f64>() * rect.height() / cells_per_side as f64;
    Rect::new(rect.x0 + dx, rect.x1 + dx, rect.y0 + dy, rect.y1 + dy)
        .expect("translation keeps the box nondegenerate")
}

fn run_orbit(a: &OrbitArgs) -> Result<Artifacts, CliError> {
    let f = a.map.resolve()?;
    let z0 = args::parse_complex(&a.z0)?;
    let rec = orbit::iterate(&f, z0, a.iters);
    let summary = format!(
        "orbit  {}  z0 = {}\n  {} ({} points recorded)",
        f.source(),
        fmt_c(z0),
        fmt_fate(&rec.fate),
        rec.points.len(),
    );
    Ok(Artifacts {
        result: json!({ "record": rec }),
        images: vec![],
        summary,
    })
}

fn run_classify(a: &ClassifyArgs) -> Result<Artifacts, CliError> {
    let f = a.map.resolve()?;
    let z0 = args::parse_complex(&a.z0)?;
    let label = fatou::classify_seed(&f, z0, a.budget);
    let summary = format!(
        "classify  {}  z0 = {}\n  verdict: {label:?}",
        f.source(),
        fmt_c(z0),
    );
    Ok(Artifacts {
        result: json!({ "label": label }),
        images: vec![],
        summary,
    })
}

fn run_periodic(a: &PeriodicArgs) -> Result<Artifacts, CliError> {
    if a.period == 0 {
        return Err(CliError::config("period must be at least 1".into()));
    }
    if a.grid == 0 {
        return Err(CliError::config("--grid must be at least 1".into()));
    }
    let f = a.map.resolve()?;
    let mut rect = args::rect_from(&a.box_)?;
    if a.jitter {
        rect = jittered(rect, a.grid, a.seed);
    }
    let search = periodic::find_periodic(&f, a.period, rect, a.grid);
    let mut summary = format!(
        "periodic  {}  period {}  box {rect}\n  {} point(s) found ({} seeds, {} failed)",
        f.source(),
        a.period,
        search.points.len(),
        search.seeds_tried,
        search.failed_seeds,
    );
    for p in search.points.iter().take(5) {
        summary.push_str(&format!(
            "\n  {}  |mult| = {:.6}  {:?}",
            fmt_c(p.location),
            p.multiplier.norm(),
            p.stability,
        ));
    }
    if search.points.len() > 5 {
        summary.push_str(&format!("\n  ... and {} more", search.points.len() - 5));
    }
    Ok(Artifacts {
        result: json!({ "search": search }),
        images: vec![],
        summary,
    })
}

fn cell_counts(grid: &RasterGrid) -> Value {
    let (mut jnear, mut escape, mut converged, mut pole, mut open) = (0u64, 0u64, 0u64, 0u64, 0u64);
    for c in &grid.cells {
        match c {
            CellCode::JNear => jnear += 1,
            CellCode::EscapeStep { .. } => escape += 1,
            CellCode::Converged { .. } => converged += 1,
            CellCode::PoleHit => pole += 1,
            CellCode::Undecided => open += 1,
        }
    }
    json!({
        "jnear": jnear,
        "escape": escape,
        "converged": converged,
        "pole_hit": pole,
        "undecided": open,
    })
}

fn grid_images(grid: &RasterGrid) -> Vec<(&'static str, Vec<u8>)> {
    #[allow(unused_mut)] // pushed onto only in png builds
    let mut images = vec![("pgm", julia::pgm_bytes(grid))];
    #[cfg(feature = "png")]
    images.push(("png", julia::png_bytes(grid)));
    images
}

fn run_julia(a: &JuliaArgs) -> Result<Artifacts, CliError> {
    let f = a.map.resolve()?;
    let mut rect = args::rect_from(&a.box_)?;
    if a.px == 0 {
        return Err(CliError::config("--px must be at least 1".into()));
    }
    if a.jitter {
        rect = jittered(rect, a.px, a.seed);
    }
    let (grid, params) = match a.method {
        Method::Escape => {
            if a.depth.is_some() {
                return Err(CliError::config("--depth applies to --method preimage".into()));
            }
            if a.target.is_some() {
                return Err(CliError::config("--target applies to --method preimage".into()));
            }
            let mut grid = julia::raster_escape(&f, rect, a.px, a.px, a.iters);
            if a.boundary {
                grid = julia::boundary_extract(&grid);
            }
            let params = json!({
                "map": f.source(),
                "method": "escape",
                "iters": a.iters,
                "boundary": a.boundary,
            });
            (grid, params)
        }
        Method::Preimage => {
            if a.boundary {
                return Err(CliError::config("--boundary applies to --method escape".into()));
            }
            let depth = a.depth.unwrap_or(2);
            let target_text = a.target.as_deref().unwrap_or("inf");
            let target = args::parse_target(target_text)?;
            let grid = julia::raster_preimage(&f, rect, a.px, a.px, depth, target)
                .map_err(|e| match e {
                    PreimageError::ZeroDepth => CliError::config(e.to_string()),
                    PreimageError::TargetExceptional { .. } => CliError::runtime(e.to_string()),
                })?;
            let params = json!({
                "map": f.source(),
                "method": "preimage",
                "depth": depth,
                "target": target_text,
            });
            (grid, params)
        }
    };
    let counts = cell_counts(&grid);
    let method = match a.method {
        Method::Escape => "escape",
        Method::Preimage => "preimage",
    };
    let summary = format!(
        "julia {method}  {}  box {rect}  {}x{}\n  cells: {} jnear | {} escape | {} converged | {} pole | {} undecided",
        f.source(),
        grid.width,
        grid.height,
        counts["jnear"],
        counts["escape"],
        counts["converged"],
        counts["pole_hit"],
        counts["undecided"],
    );
    let images = grid_images(&grid);
    Ok(Artifacts {
        result: json!({ "sidecar": grid.sidecar(params), "counts": counts }),
        images,
        summary,
    })
}

fn run_smale(a: &SmaleArgs) -> Result<Artifacts, CliError> {
    let g = a.target.resolve()?;
    let g_src = g.source().to_string();
    let rect = args::rect_or(&a.box_, Rect::centered(8.0))?;
    let setup = newton::make_relaxed(g, Complex64::new(1.0, 0.0), rect, a.grid)
        .map_err(|e| CliError::config(e.to_string()))?;
    let report = newton::smale_test(&setup, rect, a.grid, a.iters);
    let cycle = obstruction_cycle(&setup, &report.verdict);
    let mut summary = format!(
        "newton smale  g = {g_src}  box {rect}\n  roots located: {}  singular points: {}",
        setup.roots.len(),
        report.singular.len(),
    );
    match &report.verdict {
        Verdict::Guaranteed => {
            summary.push_str("\n  verdict: GUARANTEED (every singular orbit reached a root)");
        }
        Verdict::Obstructed { point, fate } => {
            summary.push_str(&format!(
                "\n  verdict: OBSTRUCTED\n  singular orbit from {} {}",
                fmt_c(*point),
                fmt_fate(fate),
            ));
            if let Some(members) = &cycle {
                let listed: Vec<String> = members.iter().map(|&z| fmt_c(z)).collect();
                summary.push_str(&format!("\n  cycle: {}", listed.join(" -> ")));
            }
        }
    }
    Ok(Artifacts {
        result: json!({
            "roots": setup.roots,
            "smale": report,
            "obstruction_cycle": cycle,
        }),
        images: vec![],
        summary,
    })
}

/// Recover the members of an obstructing cycle by running the iterator from
/// the cycle representative (already on the cycle, so the first `period`
/// points are the cycle).
fn obstruction_cycle(setup: &newton::NewtonSetup, verdict: &Verdict) -> Option<Vec<Complex64>> {
    match verdict {
        Verdict::Obstructed { fate: Fate::CycleOfPeriod { period, representative }, .. } => {
            let rec = orbit::iterate(&setup.iterator(), *representative, *period + 1);
            Some(rec.points[..(*period).min(rec.points.len())].to_vec())
        }
        _ => None,
    }
}

fn run_basins(a: &BasinsArgs) -> Result<Artifacts, CliError> {
    if a.px == 0 {
        return Err(CliError::config("--px must be at least 1".into()));
    }
    let g = a.target.resolve()?;
    let g_src = g.source().to_string();
    let rect = args::rect_or(&a.box_, Rect::centered(2.0))?;
    let hs: Vec<Complex64> = if a.h.is_empty() {
        vec![Complex64::new(1.0, 0.0)]
    } else {
        a.h.iter().map(|s| args::parse_complex(s)).collect::<Result<_, _>>()?
    };
    let mut setups = Vec::with_capacity(hs.len());
    for &h in &hs {
        setups.push(
            newton::make_relaxed(g.clone(), h, rect, a.grid)
                .map_err(|e| CliError::config(e.to_string()))?,
        );
    }
    let reports = newton::basin_measures(&setups, rect, a.px, a.px, a.iters);
    let mut summary = format!(
        "newton basins  g = {g_src}  box {rect}  {px}x{px}  roots: {}",
        setups[0].roots.len(),
        px = a.px,
    );
    for r in &reports {
        summary.push_str(&format!(
            "\n  h = {}: converged {:.4}  flow {:.4}  nonconvergent {:.4}  stray cycles: {}",
            fmt_c(r.h),
            r.iter_fraction.iter().sum::<f64>(),
            r.flow_fraction.iter().sum::<f64>(),
            r.nonconvergent,
            r.cycles.len(),
        ));
    }
    Ok(Artifacts {
        result: json!({ "roots": setups[0].roots, "reports": reports }),
        images: vec![],
        summary,
    })
}

fn run_flow(a: &FlowArgs) -> Result<Artifacts, CliError> {
    let g = a.target.resolve()?;
    let g_src = g.source().to_string();
    let z0 = args::parse_complex(&a.z0)?;
    let rect = args::rect_or(&a.box_, Rect::centered(8.0))?;
    let setup = newton::make_relaxed(g, Complex64::new(1.0, 0.0), rect, a.grid)
        .map_err(|e| CliError::config(e.to_string()))?;
    let end = newton::flow_basin(&setup, z0, a.tmax, a.dt);
    let desc = match &end {
        newton::FlowEnd::Root { index, location, t } => {
            format!("reached root #{index} at {} (t = {t:.4})", fmt_c(*location))
        }
        newton::FlowEnd::Diverged => "left the horizon without reaching a root".to_string(),
        newton::FlowEnd::StepUnderflow => {
            "stalled: the trajectory ran into a critical point of g".to_string()
        }
    };
    let summary = format!("newton flow  g = {g_src}  z0 = {}\n  {desc}", fmt_c(z0));
    Ok(Artifacts {
        result: json!({ "end": end, "roots": setup.roots }),
        images: vec![],
        summary,
    })
}

fn bouquet_err(e: bouquet::BouquetError) -> CliError {
    match e {
        // a wrong branch is discovered mid-computation; everything else is
        // a malformed request
        bouquet::BouquetError::BranchMiss { .. } => CliError::runtime(e.to_string()),
        _ => CliError::config(e.to_string()),
    }
}

fn run_bouquet(a: &BouquetArgs) -> Result<Artifacts, CliError> {
    // clap enforces the one-of group; config files bypass clap
    let picked = a.mode.symbols.is_some() as u8
        + a.mode.z0.is_some() as u8
        + a.mode.random.is_some() as u8;
    if picked != 1 {
        return Err(CliError::config(
            "pass exactly one of --symbols, --z0, --random".into(),
        ));
    }
    let cfg = bouquet::configure(a.lambda, a.n).map_err(bouquet_err)?;
    let head = format!(
        "bouquet  {}*exp(z)  symbols |j| <= {}  (q = {:.6}, c = {})",
        a.lambda, a.n, cfg.q, cfg.c,
    );

    if let Some(text) = &a.mode.symbols {
        let symbols = args::parse_symbols(text)?;
        let endpoint = bouquet::endpoint_from_itinerary(&cfg, &symbols).map_err(bouquet_err)?;
        let verified = match a.k {
            Some(k) => Some(bouquet::verify_conjugacy(&cfg, &symbols, k).map_err(bouquet_err)?),
            None => None,
        };
        let note = match verified {
            Some(true) => "\n  forward itinerary matches the shifted tags".to_string(),
            Some(false) => "\n  MISMATCH: forward itinerary left the strips".to_string(),
            None => String::new(),
        };
        let summary = format!("{head}\n  endpoint({symbols:?}) = {}{note}", fmt_c(endpoint));
        return Ok(Artifacts {
            result: json!({
                "mode": "endpoint",
                "q": cfg.q,
                "c": cfg.c,
                "symbols": symbols,
                "endpoint": endpoint,
                "verified": verified,
            }),
            images: vec![],
            summary,
        });
    }

    if let Some(text) = &a.mode.z0 {
        let z0 = args::parse_complex(text)?;
        let k = a.k.unwrap_or(16).max(1);
        let outcome = bouquet::itinerary(&cfg, z0, k);
        let desc = match &outcome {
            bouquet::ItineraryOutcome::Symbols { symbols } => format!("tags {symbols:?}"),
            bouquet::ItineraryOutcome::EscapedStrips { step } => {
                format!("left the strip family at step {step}")
            }
        };
        let summary = format!("{head}\n  itinerary of {} over {k} steps: {desc}", fmt_c(z0));
        return Ok(Artifacts {
            result: json!({ "mode": "itinerary", "q": cfg.q, "c": cfg.c, "k": k, "outcome": outcome }),
            images: vec![],
            summary,
        });
    }

    let count = a.mode.random.expect("clap/validation guarantees one mode");
    if a.depth < 2 {
        return Err(CliError::config("--depth must be at least 2".into()));
    }
    let k = a.k.unwrap_or(a.depth - 1);
    if k == 0 || k + 1 > a.depth {
        return Err(CliError::config(format!(
            "--k must satisfy 1 <= k <= depth - 1 = {}",
            a.depth - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let n = a.n as i32;
    let mut records = Vec::with_capacity(count);
    let mut endpoints = Vec::with_capacity(count);
    let mut failures = 0usize;
    for _ in 0..count {
        let symbols: Vec<i32> = (0..a.depth).map(|_| rng.gen_range(-n..=n)).collect();
        let endpoint = bouquet::endpoint_from_itinerary(&cfg, &symbols).map_err(bouquet_err)?;
        let verified = bouquet::verify_conjugacy(&cfg, &symbols, k).map_err(bouquet_err)?;
        if !verified {
            failures += 1;
        }
        endpoints.push(endpoint);
        records.push(json!({
            "symbols": symbols,
            "endpoint": endpoint,
            "verified": verified,
        }));
    }
    let images = match a.px {
        Some(px) if px > 0 => {
            let reach = (2.0 * a.n as f64 + 1.0) * std::f64::consts::PI;
            let bounds = Rect::new(0.0, cfg.c + 1.0, -reach, reach)
                .expect("strip family box is nondegenerate");
            let mut grid = RasterGrid {
                bounds,
                width: px,
                height: px,
                cells: vec![CellCode::Undecided; px * px],
                legend: vec![],
            };
            for &z in &endpoints {
                if let Some((col, row)) = grid.locate(z) {
                    grid.cells[row * px + col] = CellCode::JNear;
                }
            }
            grid_images(&grid)
        }
        _ => vec![],
    };
    let summary = format!(
        "{head}\n  {count} random itineraries at depth {}: verified {}/{count} (k = {k})",
        a.depth,
        count - failures,
    );
    Ok(Artifacts {
        result: json!({
            "mode": "random",
            "q": cfg.q,
            "c": cfg.c,
            "count": count,
            "depth": a.depth,
            "k": k,
            "failures": failures,
            "records": records,
        }),
        images,
        summary,
    })
}

fn run_catalog() -> Artifacts {
    let mut entries = Vec::new();
    let mut summary = String::from("catalog");
    for (key, src, note) in CATALOG {
        let class = match MeroFn::parse(src).expect("catalog sources parse").fn_class() {
            Ok(c) => format!("{c:?}"),
            Err(_) => "ambiguous".to_string(),
        };
        summary.push_str(&format!("\n  {key:<8} {src:<40} {note}"));
        entries.push(json!({ "key": key, "fn": src, "class": class, "note": note }));
    }
    Artifacts {
        result: Value::Array(entries),
        images: vec![],
        summary,
    }
}
