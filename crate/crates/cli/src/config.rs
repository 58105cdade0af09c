//! JSON configuration and the `--grid` flag.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use tdsusy::darboux::DarbouxChain;
use tdsusy::numerics::{FreePotential, HarmonicPotential, Interval, PotentialField, SpaceTimeGrid};
use tdsusy::seeds::SeedSpec;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeedPotential {
    Free,
    Oscillator { omega: f64 },
}

impl SeedPotential {
    pub fn field(&self) -> Result<Arc<dyn PotentialField>, Failure> {
        Ok(match *self {
            SeedPotential::Free => Arc::new(FreePotential),
            SeedPotential::Oscillator { omega } => Arc::new(HarmonicPotential::new(omega).map_err(Failure::config)?),
        })
    }

    /// Rejects seeds that solve a different equation.
    fn admits(&self, seed: &SeedSpec) -> Result<(), Failure> {
        let ok = match (self, seed.omega()) {
            (SeedPotential::Free, None) => true,
            (SeedPotential::Oscillator { omega }, Some(w)) => *omega == w,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Failure::Config(format!(
                "seed {seed:?} does not solve the equation with seed potential {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NamedDomain {
    #[default]
    RealLine,
    PositiveHalfLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainConfig {
    Named(NamedDomain),
    Bounds { a: f64, b: f64 },
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig::Named(NamedDomain::RealLine)
    }
}

impl DomainConfig {
    pub fn interval(&self) -> Result<Interval, Failure> {
        match *self {
            DomainConfig::Named(NamedDomain::RealLine) => Ok(Interval::real_line()),
            DomainConfig::Named(NamedDomain::PositiveHalfLine) => Ok(Interval::positive_half_line()),
            DomainConfig::Bounds { a, b } => Interval::new(a, b).map_err(Failure::config),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x: Range,
    pub t: Range,
}

impl GridConfig {
    pub fn grid(&self) -> Result<SpaceTimeGrid, Failure> {
        for (name, r) in [("x", self.x), ("t", self.t)] {
            if r.n < 1 || !r.a.is_finite() || !r.b.is_finite() || (r.n > 1 && !(r.b > r.a)) {
                return Err(Failure::Config(format!(
                    "{name} range {}:{}:{} needs finite a < b and n >= 1",
                    r.a, r.b, r.n
                )));
            }
        }
        SpaceTimeGrid::uniform((self.x.a, self.x.b, self.x.n), (self.t.a, self.t.b, self.t.n)).map_err(Failure::config)
    }
}

/// Parses `x=a:b:n,t=a:b:n`.
pub fn parse_grid(s: &str) -> Result<GridConfig, String> {
    let mut x = None;
    let mut t = None;
    for part in s.split(',') {
        let (key, spec) = part
            .split_once('=')
            .ok_or_else(|| format!("grid component '{part}' is not of the form key=a:b:n"))?;
        let fields: Vec<&str> = spec.split(':').collect();
        if fields.len() != 3 {
            return Err(format!("grid component '{part}' needs a:b:n"));
        }
        let num = |f: &str| f.trim().parse::<f64>().map_err(|e| format!("'{f}': {e}"));
        let range = Range {
            a: num(fields[0])?,
            b: num(fields[1])?,
            n: fields[2].trim().parse().map_err(|e| format!("'{}': {e}", fields[2]))?,
        };
        match key.trim() {
            "x" if x.is_none() => x = Some(range),
            "t" if t.is_none() => t = Some(range),
            other => return Err(format!("unexpected or repeated grid key '{other}'")),
        }
    }
    match (x, t) {
        (Some(x), Some(t)) => Ok(GridConfig { x, t }),
        _ => Err("grid needs both x=a:b:n and t=a:b:n".into()),
    }
}

/// A Crum chain over one of the seed potentials, with an optional test state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub seed_potential: SeedPotential,
    #[serde(default)]
    pub chain: Vec<SeedSpec>,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub t_ref: f64,
    #[serde(default)]
    pub state: Option<SeedSpec>,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        if !self.t_ref.is_finite() {
            return Err(Failure::Config("t_ref must be finite".into()));
        }
        self.seed_potential.field()?;
        for seed in self.chain.iter().chain(self.state.iter()) {
            self.seed_potential.admits(seed)?;
            seed.build().map_err(Failure::config)?;
        }
        Ok(())
    }

    /// The chain, or `None` when no transformation functions are listed.
    pub fn build_chain(&self) -> Result<Option<Arc<DarbouxChain>>, Failure> {
        self.validate()?;
        if self.chain.is_empty() {
            return Ok(None);
        }
        let seeds = self
            .chain
            .iter()
            .map(|s| s.build())
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::config)?;
        let probes = self.domain.interval()?.probe_points().to_vec();
        Ok(Some(DarbouxChain::with_probes(seeds, self.t_ref, probes).map_err(Failure::runtime)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub nodes: usize,
}

/// Propagation of a state, or of its image under a chain, in a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateConfig {
    #[serde(flatten)]
    pub chain: ChainConfig,
    #[serde(rename = "box")]
    pub box_: BoxConfig,
    pub tau: f64,
    #[serde(default)]
    pub t0: f64,
    pub t_final: f64,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub leakage_limit: Option<f64>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("invalid config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag_parses() {
        let g = parse_grid("x=-1:1:5,t=0:2:3").unwrap();
        assert_eq!(g.x, Range { a: -1.0, b: 1.0, n: 5 });
        assert_eq!(g.t.n, 3);
        assert!(parse_grid("x=-1:1:5").is_err());
        assert!(parse_grid("x=-1:1,t=0:1:2").is_err());
        assert!(parse_grid("x=-1:1:5,x=0:1:2").is_err());
        assert!(parse_grid("y=0:1:2,t=0:1:2").is_err());
    }

    #[test]
    fn chain_config_round_trips() {
        let text = r#"{"seed_potential":{"kind":"oscillator","omega":1.0},
            "chain":[{"family":"oscillator-eigen","n":0,"omega":1.0}],
            "domain":"real-line","t_ref":0.0,
            "state":{"family":"oscillator-eigen","n":2,"omega":1.0}}"#;
        let c: ChainConfig = serde_json::from_str(text).unwrap();
        c.validate().unwrap();
        let back: ChainConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn mismatched_seed_is_a_config_error() {
        let c = ChainConfig {
            seed_potential: SeedPotential::Free,
            chain: vec![SeedSpec::OscillatorEigen { n: 0, omega: 1.0 }],
            domain: DomainConfig::default(),
            grid: None,
            t_ref: 0.0,
            state: None,
        };
        assert!(matches!(c.validate(), Err(Failure::Config(_))));
    }

    #[test]
    fn finite_domain_bounds_parse() {
        let d: DomainConfig = serde_json::from_str(r#"{"a":0.5,"b":8.0}"#).unwrap();
        assert_eq!(d.interval().unwrap().a, 0.5);
        let h: DomainConfig = serde_json::from_str(r#""positive-half-line""#).unwrap();
        assert_eq!(h, DomainConfig::Named(NamedDomain::PositiveHalfLine));
    }
}
