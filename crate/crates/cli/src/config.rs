//! Resolved experiment configuration and its `key = value` file format.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use fqt_core::engine::TuningConstants;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub subcommand: String,
    pub q: Option<u32>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub eq: Option<String>,
    pub set: Option<String>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub trials: Option<usize>,
    pub method: Option<String>,
    pub eta: Option<f64>,
    pub gamma: Option<String>,
    pub widths: Option<String>,
    pub dilate: Option<String>,
    pub modulus: Option<u64>,
    pub rho: Option<f64>,
    pub eps: Option<f64>,
    pub suite: Option<String>,
    pub store: Option<String>,
    pub out: Option<String>,
    pub c_chang: Option<f64>,
    pub c_size: Option<f64>,
    pub c_increment: Option<f64>,
    pub verification: Option<String>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("bad value {value:?} for {key}"))
}

macro_rules! fields {
    ($m:ident, $($name:ident => $key:literal),* $(,)?) => {
        impl ExperimentConfig {
            /// Sets one key from its textual value.
            pub fn set_key(&mut self, key: &str, value: &str) -> Result<(), String> {
                match key {
                    "subcommand" => self.subcommand = value.to_string(),
                    $($key => self.$name = Some(parse(key, value)?),)*
                    _ => return Err(format!("unknown key {key:?}")),
                }
                Ok(())
            }

            /// `(key, value)` for every set field, in a fixed order.
            pub fn entries(&self) -> Vec<(&'static str, String)> {
                let mut out = vec![("subcommand", self.subcommand.clone())];
                $(if let Some(v) = &self.$name {
                    out.push(($key, v.to_string()));
                })*
                out
            }

            /// Fields of `over` that are set replace those of `self`.
            pub fn merged(&self, over: &ExperimentConfig) -> ExperimentConfig {
                let $m = self.clone();
                ExperimentConfig {
                    subcommand: if over.subcommand.is_empty() {
                        $m.subcommand
                    } else {
                        over.subcommand.clone()
                    },
                    $($name: over.$name.clone().or($m.$name),)*
                }
            }
        }
    };
}

fields!(base,
    q => "q",
    n => "N",
    eq => "eq",
    set => "set",
    seed => "seed",
    budget => "budget",
    trials => "trials",
    method => "method",
    eta => "eta",
    gamma => "gamma",
    widths => "widths",
    dilate => "dilate",
    modulus => "modulus",
    rho => "rho",
    eps => "eps",
    suite => "suite",
    store => "store",
    out => "out",
    c_chang => "c_chang",
    c_size => "c_size",
    c_increment => "c_increment",
    verification => "verification",
);

impl ExperimentConfig {
    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self, String> {
        let mut cfg = ExperimentConfig::default();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            cfg.set_key(k.trim(), v.trim())
                .map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn tuning(&self) -> TuningConstants {
        let d = TuningConstants::default();
        TuningConstants {
            c_chang: self.c_chang.unwrap_or(d.c_chang),
            c_size: self.c_size.unwrap_or(d.c_size),
            c_increment: self.c_increment.unwrap_or(d.c_increment),
            verify_chang: self.verification.as_deref() == Some("oracle"),
        }
    }

    /// SHA-256 of the configuration without its output destination.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let text = serde_json::to_string(&c).expect("serialisable");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let cfg = ExperimentConfig {
            subcommand: "count".into(),
            q: Some(3),
            n: Some(2),
            eq: Some("1,1,1".into()),
            eta: Some(0.1 + 0.2),
            c_increment: Some(0.125),
            ..Default::default()
        };
        let back = ExperimentConfig::parse_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert!(ExperimentConfig::parse_text("bogus = 1").is_err());
        assert!(ExperimentConfig::parse_text("q = x").is_err());
    }

    #[test]
    fn merge_prefers_override() {
        let base = ExperimentConfig::parse_text("q = 3\nN = 2\n").unwrap();
        let over = ExperimentConfig {
            n: Some(4),
            ..Default::default()
        };
        let m = base.merged(&over);
        assert_eq!((m.q, m.n), (Some(3), Some(4)));
    }
}
