//! Built-in example maps. Keys are stable: scripts and the acceptance
//! suite refer to them by name.

use crate::CliError;

/// (key, source text, one-line note).
pub const CATALOG: &[(&str, &str, &str)] = &[
    ("fatou1", "z + 1 + exp(-z)", "invariant Baker domain; orbits drift right along the real axis"),
    ("baker2", "1/z - exp(z)", "Baker domain of period 2 with one unbounded sub-orbit"),
    (
        "wander1",
        "z - 1 + exp(-z) + 6.283185307179586*i",
        "wandering domains climbing the imaginary axis by 2*pi per step",
    ),
    ("exp03", "0.3*exp(z)", "Cantor bouquet of hairs; attracting fixed point near 0.4894"),
    ("exp", "exp(z)", "Julia set is the whole plane"),
    ("expz", "exp(z) + z", "no fixed points, yet period-2 cycles abound"),
    ("tan2", "2*tan(z)", "Julia set is the real axis plus infinity"),
    ("tan05", "0.5*tan(z)", "attracting fixed point at 0; Julia set a Cantor subset of the axis"),
    ("smale2", "z^3 - z + 0.7071067811865476", "Newton obstruction: superattracting 2-cycle through 0"),
];

pub fn lookup(key: &str) -> Result<&'static str, CliError> {
    CATALOG
        .iter()
        .find(|(k, _, _)| *k == key)
        .map(|(_, src, _)| *src)
        .ok_or_else(|| {
            let keys: Vec<&str> = CATALOG.iter().map(|(k, _, _)| *k).collect();
            CliError::config(format!(
                "unknown catalog key {key:?}; known keys: {}",
                keys.join(", ")
            ))
        })
}
