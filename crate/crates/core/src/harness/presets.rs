//! Named experiment presets, shipped as versioned TOML.

use toml::{Table, Value};

use super::config::{Algorithm, ExperimentConfig};
use crate::error::{Error, Result};

const PRESETS_TOML: &str = include_str!("../../presets/presets.toml");

/// Schema version of the bundled preset file.
pub const PRESET_VERSION: i64 = 1;

const META_KEYS: [&str; 4] = ["description", "base", "sweep", "algorithms"];

/// A preset expanded into one config per sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub description: String,
    /// Algorithms the preset is meant to compare.
    pub algorithms: Vec<Algorithm>,
    pub points: Vec<ExperimentConfig>,
}

fn presets_table() -> Result<Table> {
    let mut file: Table = PRESETS_TOML
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(format!("bundled presets: {e}")))?;
    match file.get("version").and_then(Value::as_integer) {
        Some(PRESET_VERSION) => {}
        other => {
            return Err(Error::Config(format!(
                "bundled presets have version {other:?}, expected {PRESET_VERSION}"
            )))
        }
    }
    match file.remove("presets") {
        Some(Value::Table(t)) => Ok(t),
        _ => Err(Error::Config("bundled presets lack a [presets] table".into())),
    }
}

/// Names and descriptions of the bundled presets.
pub fn preset_names() -> Result<Vec<(String, String)>> {
    Ok(presets_table()?
        .iter()
        .map(|(name, v)| {
            let desc = v
                .get("description")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string();
            (name.clone(), desc)
        })
        .collect())
}

/// The preset's own keys layered over those of its `base` chain.
fn resolve(all: &Table, name: &str, depth: usize) -> Result<Table> {
    if depth > 8 {
        return Err(Error::Config(format!("preset {name:?}: base chain too deep")));
    }
    let own = all
        .get(name)
        .and_then(Value::as_table)
        .ok_or_else(|| Error::Config(format!("unknown preset {name:?}")))?;
    let mut merged = match own.get("base").and_then(Value::as_str) {
        Some(base) => {
            let mut t = resolve(all, base, depth + 1)?;
            t.remove("sweep");
            t.remove("description");
            t
        }
        None => Table::new(),
    };
    for (k, v) in own {
        if k != "base" {
            merged.insert(k.clone(), v.clone());
        }
    }
    Ok(merged)
}

/// Builds a config from a table of config keys; a `preset` key naming a
/// bundled single-point preset supplies defaults for the missing keys.
pub(crate) fn config_from_table(mut table: Table) -> Result<ExperimentConfig> {
    if let Some(name) = table.get("preset").and_then(Value::as_str) {
        let all = presets_table()?;
        if all.contains_key(name) {
            let mut base = resolve(&all, name, 0)?;
            if base.contains_key("sweep") {
                return Err(Error::Config(format!(
                    "preset {name:?} is a sweep; run it with the experiment command"
                )));
            }
            for (k, v) in table {
                base.insert(k, v);
            }
            table = base;
        }
    }
    for key in META_KEYS {
        table.remove(key);
    }
    Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
}

fn as_f64(v: &Value) -> Option<f64> {
    v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
}

fn sweep_point(base: &Table, field: &str, value: &Value) -> Result<(String, Table)> {
    let mut t = base.clone();
    let bad = || Error::Config(format!("bad sweep value {value} for {field}"));
    let label = match field {
        "n" => {
            let n = value.as_integer().ok_or_else(bad)?;
            t.insert("n".into(), Value::Integer(n));
            format!("n={n}")
        }
        "delay_hi" => {
            let hi = value.as_integer().ok_or_else(bad)?;
            let mut delay = Table::new();
            delay.insert("kind".into(), Value::String("uniform_int".into()));
            delay.insert("lo".into(), Value::Integer(1));
            delay.insert("hi".into(), Value::Integer(hi));
            t.insert("delay".into(), Value::Table(delay));
            format!("d={hi}")
        }
        "sigma_p_ratio" => {
            let ratio = as_f64(value).ok_or_else(bad)?;
            let sigma = t
                .get("sigma")
                .and_then(as_f64)
                .unwrap_or(ExperimentConfig::default().sigma);
            t.insert("sigma_p".into(), Value::Float(ratio * sigma));
            format!("sigma_p_ratio={ratio}")
        }
        other => return Err(Error::Config(format!("cannot sweep over {other:?}"))),
    };
    Ok((label, t))
}

impl Preset {
    pub fn load(name: &str) -> Result<Preset> {
        let all = presets_table()?;
        let mut table = resolve(&all, name, 0)?;
        let description = table
            .get("description")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        let algorithms = match table.get("algorithms") {
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_str()
                        .ok_or_else(|| Error::Config("algorithms must be strings".into()))?
                        .parse()
                })
                .collect::<Result<Vec<Algorithm>>>()?,
            _ => Vec::new(),
        };
        let sweep = table.remove("sweep");
        table.insert("preset".into(), Value::String(name.into()));
        let tables = match sweep {
            None => vec![table],
            Some(Value::Table(s)) => {
                let field = s
                    .get("field")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Config(format!("preset {name:?}: sweep needs a field")))?;
                let values = s
                    .get("values")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Config(format!("preset {name:?}: sweep needs values")))?;
                values
                    .iter()
                    .map(|v| {
                        let (label, mut t) = sweep_point(&table, field, v)?;
                        t.insert("preset".into(), Value::String(format!("{name}[{label}]")));
                        Ok(t)
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            Some(_) => return Err(Error::Config(format!("preset {name:?}: bad sweep"))),
        };
        let points = tables
            .into_iter()
            .map(|mut t| {
                for key in META_KEYS {
                    t.remove(key);
                }
                Value::Table(t)
                    .try_into()
                    .map_err(|e: toml::de::Error| Error::Config(format!("preset {name:?}: {e}")))
            })
            .collect::<Result<Vec<ExperimentConfig>>>()?;
        Ok(Preset {
            name: name.into(),
            description,
            algorithms,
            points,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DelayDist;

    #[test]
    fn every_preset_loads_and_validates() {
        for (name, desc) in preset_names().unwrap() {
            assert!(!desc.is_empty(), "{name}");
            let p = Preset::load(&name).unwrap();
            assert!(!p.points.is_empty());
            for point in &p.points {
                point.validate().unwrap_or_else(|e| panic!("{}: {e}", point.preset));
            }
        }
    }

    #[test]
    fn free_means_matches_documented_setup() {
        let p = Preset::load("free-means").unwrap();
        let c = &p.points[0];
        assert_eq!((c.n, c.k(), c.delta), (20, 4, 0.05));
        assert_eq!(c.sigma, 0.1);
        assert!((c.sigma_p - 0.1 * c.sigma).abs() < 1e-15);
        assert_eq!(c.delay, DelayDist::UniformInt { lo: 1, hi: 10 });
        assert_eq!(p.algorithms, vec![Algorithm::RaceFullDf, Algorithm::RaceUnbiasedPf]);
    }

    #[test]
    fn sweeps_expand() {
        let d = Preset::load("delay-sweep").unwrap();
        let his: Vec<_> = d
            .points
            .iter()
            .map(|c| match c.delay {
                DelayDist::UniformInt { hi, .. } => hi,
                _ => 0,
            })
            .collect();
        assert_eq!(his, vec![1, 5, 10, 25, 50]);
        assert!(d.points.iter().all(|c| c.n == 100));
        assert_eq!(d.points[3].preset, "delay-sweep[d=25]");

        let ns: Vec<_> = Preset::load("bounded-means-sweep")
            .unwrap()
            .points
            .iter()
            .map(|c| c.n)
            .collect();
        assert_eq!(ns, vec![3, 5, 10, 20, 40]);
        let s = Preset::load("partial-noise-sweep").unwrap();
        assert!((s.points[2].sigma_p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_can_start_from_preset() {
        let c = ExperimentConfig::from_toml("preset = \"free-means\"\nalgorithm = \"race_unbiased_pf\"\nruns = 3").unwrap();
        assert_eq!(c.preset, "free-means");
        assert_eq!(c.c_tilde, 0.025);
        assert_eq!(c.runs, 3);
        assert!(ExperimentConfig::from_toml("preset = \"delay-sweep\"").is_err());
        assert!(Preset::load("nope").is_err());
    }
}
