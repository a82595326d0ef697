//! Flat `key = value` scenario files.
//!
//! ```text
//! # comments start with '#'
//! d11 = 2
//! d22 = 1
//! r12 = 4
//! r21 = 3
//! r1P = 3
//! r2P = 3
//! phi = 3
//! L = 1
//! M = 1
//! ip_db = 20
//! rate_bpcu = 1
//! alpha = 0.5
//! mode = concurrent
//! ```
//!
//! Channels come either from the six distances plus `phi`, or from the six
//! explicit rates `lambda11 lambda22 mu12 mu21 mu1P mu2P`. When both are
//! given, the geometry wins and the explicit rates must agree with it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::{ChannelStatistics, Geometry, PowerMode, PowerPolicy, RatePolicy, Scenario, Selection};
use crate::error::{Error, Result};

const GEOMETRY_KEYS: [&str; 7] = ["d11", "d22", "r12", "r21", "r1P", "r2P", "phi"];
const RATE_KEYS: [&str; 6] = ["lambda11", "lambda22", "mu12", "mu21", "mu1P", "mu2P"];
const OTHER_KEYS: [&str; 9] = [
    "L",
    "M",
    "ip_db",
    "rate_bpcu",
    "alpha",
    "mode",
    "selection",
    "trials",
    "seed",
];

/// Relative tolerance when checking explicit rates against geometry.
const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub geometry: Option<Geometry>,
    pub rate: Option<RatePolicy>,
    pub power: PowerPolicy,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

struct Entry {
    line: usize,
    value: String,
}

impl ScenarioFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// `origin` only labels error messages.
    pub fn parse(text: &str, origin: impl AsRef<Path>) -> Result<Self> {
        let origin = origin.as_ref().to_path_buf();
        let err = |line: usize, msg: String| Error::Parse {
            path: origin.clone(),
            line,
            msg,
        };

        let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let value = value.trim();
            let known = GEOMETRY_KEYS
                .iter()
                .chain(RATE_KEYS.iter())
                .chain(OTHER_KEYS.iter())
                .find(|k| **k == key)
                .ok_or_else(|| err(line, format!("unknown key `{key}`")))?;
            if value.is_empty() {
                return Err(err(line, format!("missing value for `{key}`")));
            }
            if let Some(prev) = entries.insert(
                known,
                Entry {
                    line,
                    value: value.to_string(),
                },
            ) {
                return Err(err(
                    line,
                    format!("duplicate key `{key}` (first set on line {})", prev.line),
                ));
            }
        }

        let number = |key: &str| -> Result<Option<f64>> {
            entries
                .get(key)
                .map(|e| {
                    e.value
                        .parse::<f64>()
                        .map_err(|_| err(e.line, format!("`{key}` is not a number: `{}`", e.value)))
                })
                .transpose()
        };
        let integer = |key: &str| -> Result<Option<u64>> {
            entries
                .get(key)
                .map(|e| {
                    e.value.parse::<u64>().map_err(|_| {
                        err(e.line, format!("`{key}` is not a non-negative integer: `{}`", e.value))
                    })
                })
                .transpose()
        };
        let line_of = |key: &str| entries.get(key).map_or(0, |e| e.line);

        let geometry = collect_group(&GEOMETRY_KEYS, &number)?
            .map_err(|missing| err(0, format!("incomplete geometry: missing {missing}")))?
            .map(|v| Geometry {
                d11: v[0],
                d22: v[1],
                r12: v[2],
                r21: v[3],
                r1p: v[4],
                r2p: v[5],
                phi: v[6],
            });
        let explicit = collect_group(&RATE_KEYS, &number)?
            .map_err(|missing| err(0, format!("incomplete channel rates: missing {missing}")))?
            .map(|v| ChannelStatistics {
                lambda11: v[0],
                lambda22: v[1],
                mu12: v[2],
                mu21: v[3],
                mu1p: v[4],
                mu2p: v[5],
            });

        let stats = match (geometry, explicit) {
            (Some(g), explicit) => {
                let derived = g.channel_stats()?;
                if let Some(e) = explicit {
                    for ((name, want), (_, got)) in derived.named().iter().zip(e.named()) {
                        if (want - got).abs() > CONSISTENCY_TOL * want.abs() {
                            return Err(err(
                                line_of(name),
                                format!("`{name}` = {got} contradicts geometry, which gives {want}"),
                            ));
                        }
                    }
                }
                derived
            }
            (None, Some(e)) => {
                e.validate()?;
                e
            }
            (None, None) => {
                return Err(err(
                    0,
                    "no channel description: give d11..r2P with phi, or lambda11..mu2P".into(),
                ))
            }
        };

        let users = |key: &str| -> Result<u32> {
            match integer(key)? {
                None => Ok(1),
                Some(v) => u32::try_from(v)
                    .map_err(|_| err(line_of(key), format!("`{key}` is out of range"))),
            }
        };
        let ip_db = number("ip_db")?.ok_or_else(|| err(0, "missing required key `ip_db`".into()))?;
        let selection = match entries.get("selection") {
            Some(e) => e.value.parse::<Selection>()?,
            None => Selection::BestUser,
        };
        let scenario = Scenario::new(stats, users("L")?, users("M")?, ip_db)?.with_selection(selection);

        let rate = number("rate_bpcu")?.map(RatePolicy::new).transpose()?;
        let mode = match entries.get("mode") {
            Some(e) => e.value.parse::<PowerMode>()?,
            None => PowerMode::Concurrent,
        };
        let power = PowerPolicy::from_mode(mode, number("alpha")?.unwrap_or(0.5))?;

        Ok(Self {
            scenario,
            geometry,
            rate,
            power,
            trials: integer("trials")?,
            seed: integer("seed")?,
        })
    }

    /// Directory holding the bundled scenario files.
    pub fn bundled_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
    }

    /// Loads one of the bundled scenarios (`fig2`, `fig3a`, `fig3b`, `fig4`).
    pub fn bundled(name: &str) -> Result<Self> {
        Self::load(Self::bundled_dir().join(format!("{name}.scn")))
    }
}

/// `Ok(None)` if no key of the group is present, the values in key order if
/// all are, and the first missing key otherwise.
fn collect_group(
    keys: &[&'static str],
    number: &dyn Fn(&str) -> Result<Option<f64>>,
) -> Result<std::result::Result<Option<Vec<f64>>, &'static str>> {
    let mut values = Vec::with_capacity(keys.len());
    let mut missing = None;
    for key in keys {
        match number(key)? {
            Some(v) => values.push(v),
            None => missing = missing.or(Some(*key)),
        }
    }
    Ok(match (values.is_empty(), missing) {
        (true, _) => Ok(None),
        (false, None) => Ok(Some(values)),
        (false, Some(key)) => Err(key),
    })
}
