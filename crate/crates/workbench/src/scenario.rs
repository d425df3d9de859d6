//! Scenario files: bundled copies, a directory override, and validation of assumption tags.

use std::fmt;
use std::path::Path;

use katetov_core::diagonal::hindman::HindmanScenario;
use katetov_core::diagonal::posdiff::PosdiffScenario;
use katetov_core::diagonal::pwfin::PwfinScenario;
use katetov_core::diagonal::ramsey_stage::RamseyScenario;
use katetov_core::ideals::IdealSpec;
use katetov_core::trees::{CoherentMap, FiniteTree, Stipulation};
use katetov_core::{DescribedSet, FiniteString};
use serde::{Deserialize, Serialize};

/// Directory searched for `NAME.json` before the bundled copies.
pub const SCENARIO_DIR_VAR: &str = "KATETOV_SCENARIO_DIR";

/// A stipulated fact no finite computation decides.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assumption {
    pub tag: String,
    pub statement: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub assumptions: Vec<Assumption>,
    pub setup: Setup,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Setup {
    Pwfin { engine: PwfinScenario },
    Posdiff { engine: PosdiffScenario },
    Hindman { engine: HindmanScenario },
    Ramsey { engine: RamseyScenario },
    Collision(CollisionSetup),
    Tree(TreeSetup),
}

/// A posdiff run met by a tree that branches at the declared critical node `tau`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionSetup {
    pub engine: PosdiffScenario,
    /// Used when the command line gives no stage count.
    pub stages: u64,
    /// Which `D[i]` the tree is tested against.
    pub i: u64,
    pub tau: FiniteString,
    /// Successor set claimed at `tau`; its members below `children` are materialised.
    pub successors: DescribedSet,
    pub children: u64,
    pub ideal: IdealSpec,
    pub horizon: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Bottom,
    Value(u64),
}

/// A finite labelled tree with the oracle facts its labelling needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSetup {
    pub ideal: IdealSpec,
    pub horizon: u64,
    pub tree: FiniteTree,
    pub map: CoherentMap,
    #[serde(default)]
    pub stipulations: Vec<Stipulation>,
    #[serde(default)]
    pub expected_root: Option<Expected>,
    #[serde(default)]
    pub expected_critical: Option<Vec<FiniteString>>,
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../scenarios/", $name, ".json")))),*]
    };
}

pub const BUNDLED: &[(&str, &str)] = bundled![
    "pw-2b",
    "pwfin-2c",
    "pwfin-bottom",
    "posdiff-identity",
    "posdiff-blocks",
    "posdiff-powers",
    "posdiff-finite",
    "hindman-case1",
    "hindman-case2",
    "hindman-case3",
    "hindman-case4",
    "hindman-case5",
    "ramsey-case1",
    "ramsey-case2",
    "ramsey-case3",
    "ramsey-case4",
    "collision-posdiff",
    "tree-evens",
    "tree-least",
    "tree-deep",
    "tree-critical-root",
    "pwfin-case2b",
];

#[derive(Debug)]
pub enum LoadError {
    NotFound(String),
    Io(String, std::io::Error),
    Parse(String, serde_json::Error),
    Invalid(String, String),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::NotFound(n) => write!(f, "no scenario named {n}, and no such file"),
            LoadError::Io(n, e) => write!(f, "{n}: {e}"),
            LoadError::Parse(n, e) => write!(f, "{n}: {e}"),
            LoadError::Invalid(n, why) => write!(f, "{n}: {why}"),
        }
    }
}

impl std::error::Error for LoadError {}

impl Scenario {
    pub fn parse(origin: &str, text: &str) -> Result<Scenario, LoadError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| LoadError::Parse(origin.into(), e))?;
        s.validate().map_err(|why| LoadError::Invalid(origin.into(), why))?;
        Ok(s)
    }

    /// Every assumption and stipulation must carry a nonempty tag.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(a) = self.assumptions.iter().find(|a| a.tag.trim().is_empty()) {
            return Err(format!("assumption without a tag: {}", a.statement));
        }
        if let Setup::Tree(t) = &self.setup {
            if let Some(s) = t.stipulations.iter().find(|s| s.tag.trim().is_empty()) {
                return Err(format!("stipulation at {} without a tag", s.node));
            }
        }
        Ok(())
    }

    pub fn bundled(name: &str) -> Option<Scenario> {
        let (_, text) = BUNDLED.iter().find(|(n, _)| *n == name)?;
        Some(Scenario::parse(name, text).expect("bundled scenarios parse"))
    }

    /// A path to a file, else `NAME.json` in the scenario directory, else a bundled scenario.
    pub fn load(name_or_path: &str) -> Result<Scenario, LoadError> {
        let path = Path::new(name_or_path);
        if path.is_file() {
            return read(path);
        }
        if let Some(dir) = std::env::var_os(SCENARIO_DIR_VAR) {
            let p = Path::new(&dir).join(format!("{name_or_path}.json"));
            if p.is_file() {
                return read(&p);
            }
        }
        Scenario::bundled(name_or_path).ok_or_else(|| LoadError::NotFound(name_or_path.into()))
    }
}

fn read(path: &Path) -> Result<Scenario, LoadError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(origin.clone(), e))?;
    Scenario::parse(&origin, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_scenario_parses_and_round_trips() {
        for (name, text) in BUNDLED {
            let s = Scenario::parse(name, text).unwrap();
            assert_eq!(&s.name, name);
            let back: Scenario = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn untagged_stipulations_are_rejected() {
        let (_, text) = BUNDLED.iter().find(|(n, _)| *n == "tree-evens").unwrap();
        let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
        v["setup"]["stipulations"][0]["tag"] = serde_json::Value::String(" ".into());
        assert!(matches!(Scenario::parse("t", &v.to_string()), Err(LoadError::Invalid(..))));
        v["setup"]["stipulations"][0].as_object_mut().unwrap().remove("tag");
        assert!(matches!(Scenario::parse("t", &v.to_string()), Err(LoadError::Parse(..))));
    }
}
