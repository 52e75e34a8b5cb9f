//! Command-line surface. Every subcommand's argument struct doubles as the
//! serializable run configuration: `td --config run.json` deserializes the
//! same types that clap populates from flags, and each report echoes the
//! config back, so a report is always replayable.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use td_core::consts::{BUDGET_DEFAULT, FLOW_DT, FLOW_T_MAX, SEED_DEFAULT};
use td_core::{MeroFn, Rect};

use crate::catalog;
use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "td",
    version,
    about = "Iteration toolkit for entire and meromorphic maps",
    subcommand_negates_reqs = true
)]
pub struct Cli {
    /// Read the whole run configuration from a JSON file instead of flags.
    #[arg(long, value_name = "PATH", global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for parallel kernels; env TD_THREADS is the fallback.
    /// Results do not depend on the thread count.
    #[arg(long, value_name = "N", global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub cmd: Option<Cmd>,
}

/// One run. Serialized form is the `--config` file format.
#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Cmd {
    /// Iterate a map from a seed and report the orbit ledger.
    Orbit(OrbitArgs),
    /// Decide which Fatou component type a seed's orbit favors.
    Classify(ClassifyArgs),
    /// Sweep a box for periodic points of a given period.
    Periodic(PeriodicArgs),
    /// Raster a Julia-set indicator over a box.
    Julia(JuliaArgs),
    /// Relaxed Newton iteration: certificates, basin measures, flow.
    #[command(subcommand)]
    Newton(NewtonCmd),
    /// Hairs and endpoints of the Cantor bouquet for lambda*exp(z).
    Bouquet(BouquetArgs),
    /// List the built-in example maps.
    Catalog,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NewtonCmd {
    /// Singular-orbit convergence certificate for the unrelaxed map.
    Smale(SmaleArgs),
    /// Basin fractions per relaxation h, iteration against the flow.
    Basins(BasinsArgs),
    /// Integrate the continuous Newton flow from one seed.
    Flow(FlowArgs),
}

/// The map under iteration: source text or a catalog key, exactly one.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[group(required = true, multiple = false)]
pub struct FnSel {
    /// Map source text, e.g. "exp(z) + z".
    #[arg(long = "fn", value_name = "EXPR")]
    #[serde(rename = "fn", default, skip_serializing_if = "Option::is_none")]
    pub fn_text: Option<String>,

    /// Catalog key; `td catalog` lists them.
    #[arg(long, value_name = "KEY")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
}

/// Newton target g: source text or a catalog key, exactly one.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[group(required = true, multiple = false)]
pub struct GSel {
    /// Target source text; roots of g are what the iteration hunts.
    #[arg(long = "g", value_name = "EXPR")]
    #[serde(rename = "g", default, skip_serializing_if = "Option::is_none")]
    pub g_text: Option<String>,

    /// Catalog key; `td catalog` lists them.
    #[arg(long, value_name = "KEY")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct OutArgs {
    /// Artifact path prefix: writes <PREFIX>.json, plus <PREFIX>.pgm (and
    /// .png when built with the png feature) for raster commands. Without
    /// it the report goes to stdout and the summary to stderr.
    #[arg(long, value_name = "PREFIX")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct OrbitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: FnSel,

    /// Seed, "re,im" (or a bare real).
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    pub z0: String,

    /// Iteration budget.
    #[arg(long, default_value_t = BUDGET_DEFAULT)]
    #[serde(default = "d_budget")]
    pub iters: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: FnSel,

    /// Seed, "re,im" (or a bare real).
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    pub z0: String,

    /// Iteration budget for the evidence orbit.
    #[arg(long, default_value_t = BUDGET_DEFAULT)]
    #[serde(default = "d_budget")]
    pub budget: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: FnSel,

    /// Period to search for (minimality is enforced on the results).
    #[arg(long)]
    pub period: usize,

    /// Search box: X0 X1 Y0 Y1.
    #[arg(long = "box", num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
    #[serde(rename = "box")]
    pub box_: Vec<f64>,

    /// Seed lattice is grid x grid cells over the box.
    #[arg(long, default_value_t = 120)]
    #[serde(default = "d_grid_periodic")]
    pub grid: usize,

    /// Shift the seed lattice by a random sub-cell offset.
    #[arg(long)]
    #[serde(default)]
    pub jitter: bool,

    /// Seed for the jitter offset.
    #[arg(long, default_value_t = SEED_DEFAULT)]
    #[serde(default = "d_seed")]
    pub seed: u64,

    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Iterate every pixel center and code escape/convergence/poles.
    Escape,
    /// Accumulate backward orbits of a target; pixels they land in are JNear.
    Preimage,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct JuliaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: FnSel,

    /// Raster box: X0 X1 Y0 Y1.
    #[arg(long = "box", num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
    #[serde(rename = "box")]
    pub box_: Vec<f64>,

    /// Pixels per side (the raster is px x px).
    #[arg(long, default_value_t = 400)]
    #[serde(default = "d_px")]
    pub px: usize,

    #[arg(long, value_enum, default_value_t = Method::Escape)]
    #[serde(default = "d_method")]
    pub method: Method,

    /// Iteration budget per pixel (escape method).
    #[arg(long, default_value_t = 300)]
    #[serde(default = "d_julia_iters")]
    pub iters: usize,

    /// Backward-orbit depth (preimage method).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,

    /// Preimage target: "re,im" or "inf" (the default).
    #[arg(long, value_name = "RE,IM|inf", allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,

    /// Reduce an escape raster to its basin-interface cells.
    #[arg(long)]
    #[serde(default)]
    pub boundary: bool,

    /// Shift the pixel frame by a random sub-cell offset.
    #[arg(long)]
    #[serde(default)]
    pub jitter: bool,

    /// Seed for the jitter offset.
    #[arg(long, default_value_t = SEED_DEFAULT)]
    #[serde(default = "d_seed")]
    pub seed: u64,

    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SmaleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub target: GSel,

    /// Box searched for roots and singular points (default -8 8 -8 8).
    #[arg(long = "box", num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub box_: Option<Vec<f64>>,

    /// Seed lattice resolution for the root/singular-point search.
    #[arg(long, default_value_t = 60)]
    #[serde(default = "d_grid_newton")]
    pub grid: usize,

    /// Iteration budget for each singular orbit.
    #[arg(long, default_value_t = BUDGET_DEFAULT)]
    #[serde(default = "d_budget")]
    pub iters: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BasinsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub target: GSel,

    /// Relaxation h, "re,im"; repeat the flag to sweep (default 1).
    #[arg(long = "h", value_name = "RE,IM", action = clap::ArgAction::Append, allow_hyphen_values = true)]
    #[serde(default)]
    pub h: Vec<String>,

    /// Pixel box measured for basin fractions (default -2 2 -2 2).
    #[arg(long = "box", num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub box_: Option<Vec<f64>>,

    /// Pixels per side.
    #[arg(long, default_value_t = 200)]
    #[serde(default = "d_px_basins")]
    pub px: usize,

    /// Iteration budget per pixel.
    #[arg(long, default_value_t = BUDGET_DEFAULT)]
    #[serde(default = "d_budget")]
    pub iters: usize,

    /// Seed lattice resolution for the root search.
    #[arg(long, default_value_t = 40)]
    #[serde(default = "d_grid_basins")]
    pub grid: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FlowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub target: GSel,

    /// Flow seed, "re,im".
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    pub z0: String,

    /// Time horizon.
    #[arg(long, default_value_t = FLOW_T_MAX)]
    #[serde(default = "d_tmax")]
    pub tmax: f64,

    /// Initial step size (adapted from there).
    #[arg(long, default_value_t = FLOW_DT)]
    #[serde(default = "d_dt")]
    pub dt: f64,

    /// Box searched for roots to assign the landing point to
    /// (default -8 8 -8 8).
    #[arg(long = "box", num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub box_: Option<Vec<f64>>,

    /// Seed lattice resolution for the root search.
    #[arg(long, default_value_t = 60)]
    #[serde(default = "d_grid_newton")]
    pub grid: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[group(required = true, multiple = false)]
pub struct BouquetMode {
    /// Build the endpoint for this itinerary, e.g. "0,1,-2".
    #[arg(long, value_name = "S0,S1,...", allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<String>,

    /// Record the strip itinerary of this point, "re,im".
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<String>,

    /// Draw this many random itineraries; verify and emit their endpoints.
    #[arg(long, value_name = "COUNT")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BouquetArgs {
    /// Map parameter, 0 < lambda < 1/e.
    #[arg(long, default_value_t = 0.3)]
    #[serde(default = "d_lambda")]
    pub lambda: f64,

    /// Symbols range over -n..=n.
    #[arg(long = "n", value_name = "N", default_value_t = 2)]
    #[serde(default = "d_nbound")]
    pub n: u32,

    #[command(flatten)]
    #[serde(flatten)]
    pub mode: BouquetMode,

    /// Itinerary depth for --random draws.
    #[arg(long, default_value_t = 8)]
    #[serde(default = "d_depth")]
    pub depth: usize,

    /// Symbols to record (--z0) or verify (--symbols/--random).
    #[arg(long, value_name = "K")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,

    /// Seed for --random draws.
    #[arg(long, default_value_t = SEED_DEFAULT)]
    #[serde(default = "d_seed")]
    pub seed: u64,

    /// Scatter the endpoints of a --random batch onto a px x px raster.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub px: Option<usize>,

    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

fn d_budget() -> usize {
    BUDGET_DEFAULT
}
fn d_grid_periodic() -> usize {
    120
}
fn d_grid_newton() -> usize {
    60
}
fn d_grid_basins() -> usize {
    40
}
fn d_px() -> usize {
    400
}
fn d_px_basins() -> usize {
    200
}
fn d_julia_iters() -> usize {
    300
}
fn d_method() -> Method {
    Method::Escape
}
fn d_seed() -> u64 {
    SEED_DEFAULT
}
fn d_tmax() -> f64 {
    FLOW_T_MAX
}
fn d_dt() -> f64 {
    FLOW_DT
}
fn d_lambda() -> f64 {
    0.3
}
fn d_nbound() -> u32 {
    2
}
fn d_depth() -> usize {
    8
}

impl FnSel {
    pub fn resolve(&self) -> Result<MeroFn, CliError> {
        resolve_map(&self.fn_text, &self.catalog, "--fn")
    }
}

impl GSel {
    pub fn resolve(&self) -> Result<MeroFn, CliError> {
        resolve_map(&self.g_text, &self.catalog, "--g")
    }
}

fn resolve_map(
    text: &Option<String>,
    key: &Option<String>,
    flag: &str,
) -> Result<MeroFn, CliError> {
    let src = match (text, key) {
        (Some(t), None) => t.clone(),
        (None, Some(k)) => catalog::lookup(k)?.to_string(),
        _ => {
            return Err(CliError::config(format!(
                "pass exactly one of {flag} or --catalog"
            )))
        }
    };
    MeroFn::parse(&src).map_err(|e| CliError::config(format!("cannot parse map {src:?}: {e}")))
}

/// "re,im" or a bare real.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::config(format!("expected \"re,im\" or a real number, got {s:?}"));
    let t = s.trim();
    if let Some((a, b)) = t.split_once(',') {
        let re: f64 = a.trim().parse().map_err(|_| bad())?;
        let im: f64 = b.trim().parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, im))
    } else {
        t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad())
    }
}

pub fn parse_target(s: &str) -> Result<td_core::ExtComplex, CliError> {
    match s.trim() {
        "inf" | "infinity" => Ok(td_core::ExtComplex::Infinity),
        finite => parse_complex(finite).map(td_core::ExtComplex::finite),
    }
}

/// Comma-separated symbol list, e.g. "0,1,-2".
pub fn parse_symbols(s: &str) -> Result<Vec<i32>, CliError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<i32>()
                .map_err(|_| CliError::config(format!("bad symbol {part:?} in {s:?}")))
        })
        .collect()
}

pub fn rect_from(values: &[f64]) -> Result<Rect, CliError> {
    if values.len() != 4 {
        return Err(CliError::config(format!(
            "--box needs four numbers X0 X1 Y0 Y1, got {}",
            values.len()
        )));
    }
    Rect::new(values[0], values[1], values[2], values[3])
        .map_err(|e| CliError::config(e.to_string()))
}

pub fn rect_or(values: &Option<Vec<f64>>, fallback: Rect) -> Result<Rect, CliError> {
    match values {
        Some(v) => rect_from(v),
        None => Ok(fallback),
    }
}
