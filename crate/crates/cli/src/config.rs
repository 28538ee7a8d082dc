//! Flat `key = value` scenario documents.
//!
//! ```text
//! # two-species scenario
//! n_sites = 100
//! sigma_noise = 0.05
//! seed = 42
//!
//! [species]
//! x_opt = 0.5
//! y_opt = 0.0
//!
//! [species]
//! x_opt = 0.5
//! y_opt = 0.5
//! ```
//!
//! Keys are the scenario field names. Omitted fields take the two-species
//! defaults, except `seed`, which is mandatory. Without any `[species]`
//! section the two-species niches (`y*` = 0 and 0.5) are used.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use varboot::synth::{two_species_niches, ScenarioConfig, SpeciesNiche};

const TOP_KEYS: &[&str] = &[
    "n_sites",
    "sigma_niche",
    "sigma_noise",
    "y_max",
    "carrying_capacity",
    "replicates",
    "seed",
];

#[derive(Default)]
struct PartialNiche {
    x_opt: Option<f64>,
    y_opt: Option<f64>,
    line: usize,
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, String> {
    let mut cfg = ScenarioConfig::two_species(ScenarioConfig::DEFAULT_Y2_OPT, 0);
    let mut seed = None;
    let mut seen = HashSet::new();
    let mut species: Vec<PartialNiche> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if line != "[species]" {
                return Err(format!("line {line_no}: unknown section {line}"));
            }
            species.push(PartialNiche {
                line: line_no,
                ..Default::default()
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| format!("line {line_no}: expected 'key = value', got '{line}'"))?;

        if let Some(sp) = species.last_mut() {
            let slot = match key {
                "x_opt" => &mut sp.x_opt,
                "y_opt" => &mut sp.y_opt,
                _ => return Err(format!("line {line_no}: unknown species key '{key}'")),
            };
            if slot.is_some() {
                return Err(format!("line {line_no}: duplicate key '{key}'"));
            }
            *slot = Some(parse_value(key, value, line_no)?);
            continue;
        }

        if !TOP_KEYS.contains(&key) {
            return Err(format!(
                "line {line_no}: unknown key '{key}' (expected one of {})",
                TOP_KEYS.join(", ")
            ));
        }
        if !seen.insert(key.to_string()) {
            return Err(format!("line {line_no}: duplicate key '{key}'"));
        }
        match key {
            "n_sites" => cfg.n_sites = parse_value(key, value, line_no)?,
            "sigma_niche" => cfg.sigma_niche = parse_value(key, value, line_no)?,
            "sigma_noise" => cfg.sigma_noise = parse_value(key, value, line_no)?,
            "y_max" => cfg.y_max = parse_value(key, value, line_no)?,
            "carrying_capacity" => cfg.carrying_capacity = parse_value(key, value, line_no)?,
            "replicates" => cfg.replicates = parse_value(key, value, line_no)?,
            "seed" => seed = Some(parse_value(key, value, line_no)?),
            _ => unreachable!(),
        }
    }

    cfg.seed = seed.ok_or("missing 'seed': an explicit seed is required for reproducibility")?;
    cfg.niches = if species.is_empty() {
        two_species_niches(ScenarioConfig::DEFAULT_Y2_OPT)
    } else {
        species
            .iter()
            .map(|sp| match (sp.x_opt, sp.y_opt) {
                (Some(x), Some(y)) => Ok(SpeciesNiche::new(x, y)),
                _ => Err(format!("line {}: [species] needs both x_opt and y_opt", sp.line)),
            })
            .collect::<Result<_, _>>()?
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("line {line}: invalid value '{value}' for '{key}'"))
}

/// Canonical document for a config; `parse_config` reads it back unchanged.
pub fn to_document(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n_sites = {}", cfg.n_sites);
    let _ = writeln!(s, "sigma_niche = {}", cfg.sigma_niche);
    let _ = writeln!(s, "sigma_noise = {}", cfg.sigma_noise);
    let _ = writeln!(s, "y_max = {}", cfg.y_max);
    let _ = writeln!(s, "carrying_capacity = {}", cfg.carrying_capacity);
    let _ = writeln!(s, "replicates = {}", cfg.replicates);
    let _ = writeln!(s, "seed = {}", cfg.seed);
    for n in &cfg.niches {
        let _ = write!(s, "\n[species]\nx_opt = {}\ny_opt = {}\n", n.x_opt, n.y_opt);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_uses_defaults() {
        let cfg = parse_config("seed = 9\n").unwrap();
        assert_eq!(cfg, ScenarioConfig::two_species(0.5, 9));
    }

    #[test]
    fn species_sections() {
        let doc = "seed = 1 # inline\nsigma_noise = 0.1\n[species]\nx_opt = 0.1\ny_opt = 0.2\n[species]\nx_opt=0.3\ny_opt=0.4\n[species]\nx_opt = 0.5\ny_opt = 0.6\n";
        let cfg = parse_config(doc).unwrap();
        assert_eq!(cfg.niches.len(), 3);
        assert_eq!(cfg.niches[1], SpeciesNiche::new(0.3, 0.4));
        assert_eq!(cfg.sigma_noise, 0.1);
    }

    #[test]
    fn missing_seed() {
        let err = parse_config("n_sites = 50\n").unwrap_err();
        assert!(err.contains("seed"), "{err}");
    }

    #[test]
    fn misspelled_key() {
        let err = parse_config("seed = 1\nsigma_nosie = 0.1\n").unwrap_err();
        assert!(err.contains("unknown key 'sigma_nosie'"), "{err}");
        assert!(parse_config("seed = 1\n[species]\nz_opt = 1\n").is_err());
        assert!(parse_config("seed = 1\n[genus]\n").is_err());
        assert!(parse_config("seed = 1\nseed = 2\n").is_err());
    }

    #[test]
    fn invalid_values() {
        assert!(parse_config("seed = -1\n").is_err());
        assert!(parse_config("seed = 1\ny_max = 2\n").is_err());
        assert!(parse_config("seed = 1\n[species]\nx_opt = 0.1\n[species]\nx_opt = 0.2\ny_opt = 0\n").is_err());
    }

    #[test]
    fn document_round_trip() {
        let mut cfg = ScenarioConfig::two_species(0.3, 77);
        cfg.sigma_noise = 0.05;
        cfg.y_max = 0.4;
        assert_eq!(parse_config(&to_document(&cfg)).unwrap(), cfg);
    }
}
