//! Quiver configuration files and flag parsing.
//!
//! ```toml
//! vertices = ["1", "2"]
//! arrows = [["1", "2"]]
//! charge = "-1,1;1,1"   # optional
//! ```

use std::path::Path;
use std::str::FromStr;

use dimred_core::quiver::Quiver;
use dimred_core::series::CentralCharge;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuiverFile {
    vertices: Vec<String>,
    #[serde(default)]
    arrows: Vec<(String, String)>,
    charge: Option<String>,
}

#[derive(Clone, Debug)]
pub struct QuiverConfig {
    pub quiver: Quiver,
    pub charge: Option<CentralCharge>,
}

pub fn parse_config(text: &str) -> Result<QuiverConfig, CliError> {
    let file: QuiverFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let vertices: Vec<&str> = file.vertices.iter().map(String::as_str).collect();
    let arrows: Vec<(&str, &str)> = file
        .arrows
        .iter()
        .map(|(s, t)| (s.as_str(), t.as_str()))
        .collect();
    let quiver =
        Quiver::from_named(&vertices, &arrows).map_err(|e| CliError::Config(e.to_string()))?;
    let charge = file
        .charge
        .as_deref()
        .map(|c| parse_charge(c, quiver.num_vertices()))
        .transpose()?;
    Ok(QuiverConfig { quiver, charge })
}

pub fn load_config(path: &Path) -> Result<QuiverConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// `re1,im1;re2,im2;...` with rational entries.
pub fn parse_charge(s: &str, rank: usize) -> Result<CentralCharge, CliError> {
    let pairs = s
        .split(';')
        .map(|part| {
            match part
                .split(',')
                .map(str::trim)
                .collect::<Vec<_>>()
                .as_slice()
            {
                [re, im] => Ok((re.to_string(), im.to_string())),
                _ => Err(CliError::Config(format!(
                    "charge component {part:?} is not re,im"
                ))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if pairs.len() != rank {
        return Err(CliError::Config(format!(
            "charge has {} components, the quiver has {rank} vertices",
            pairs.len()
        )));
    }
    CentralCharge::try_from(pairs).map_err(|e| CliError::Config(e.to_string()))
}

/// Comma-separated list.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad list entry {x:?} in {s:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_kronecker() {
        let c =
            parse_config("vertices = [\"a\", \"b\"]\narrows = [[\"a\", \"b\"], [\"a\", \"b\"]]\n")
                .unwrap();
        assert_eq!(c.quiver.arrow_count(0, 1), 2);
        assert!(c.charge.is_none());
    }

    #[test]
    fn parses_charge() {
        let c = parse_config(
            "vertices = [\"1\", \"2\"]\narrows = [[\"1\", \"2\"]]\ncharge = \"-1,1; 1/2,1\"\n",
        )
        .unwrap();
        let z = c.charge.unwrap();
        assert_eq!(z.z[1].0.to_string(), "1/2");
        assert!(parse_charge("0,1", 2).is_err());
        assert!(parse_charge("0,-1", 1).is_err());
        assert!(parse_charge("0;1", 1).is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_config("vertices = [\"1\"]\narrows = [[\"1\", \"2\"]]\n").is_err());
        assert!(parse_config("vertices = 3").is_err());
        assert!(parse_config("vertices = [\"1\"]\nedges = []\n").is_err());
        assert!(parse_list::<u64>("2,x").is_err());
        assert_eq!(parse_list::<u32>("1, 2").unwrap(), vec![1, 2]);
    }
}
