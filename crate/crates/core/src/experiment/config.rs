use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::boundary::BoundaryCondition;
use crate::connectivity::BackendKind;
use crate::dynamics::DEFAULT_CAP;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeKind};
use crate::params::{p_critical, FkParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Validate,
    Sample,
    Bridges,
    Psi,
    Crossing,
    Mix,
    Block,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Validate => "validate",
            ExperimentKind::Sample => "sample",
            ExperimentKind::Bridges => "bridges",
            ExperimentKind::Psi => "psi",
            ExperimentKind::Crossing => "crossing",
            ExperimentKind::Mix => "mix",
            ExperimentKind::Block => "block",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PSpec {
    Value(f64),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sizes {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Typicality {
    pub k1: f64,
    pub k2: f64,
    /// The `N` in the `K log N` thresholds; defaults to the lattice size.
    pub big_n: Option<f64>,
}

/// Experiment description as written in a TOML file. Every field except
/// `experiment` has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub name: Option<String>,
    pub q: Option<f64>,
    pub p: Option<PSpec>,
    pub p_scale: Option<f64>,
    pub lattice: Option<LatticeKind>,
    pub n: Option<Sizes>,
    pub n_prime: Option<usize>,
    pub boundary: Option<String>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    /// Phase length for `block`, horizon for `mix`.
    pub time: Option<f64>,
    /// Evaluation times for `mix`.
    pub times: Option<Vec<f64>>,
    /// Number of phases for `block`.
    pub phases: Option<usize>,
    pub backend: Option<BackendKind>,
    pub blocks: Option<String>,
    pub typicality: Option<Typicality>,
    /// Inclusive row range `[y0, y1]` of the band for `psi`.
    pub band: Option<[usize; 2]>,
    pub cftp_cap: Option<u64>,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            name: None,
            q: None,
            p: None,
            p_scale: None,
            lattice: None,
            n: None,
            n_prime: None,
            boundary: None,
            seed: None,
            replicas: None,
            time: None,
            times: None,
            phases: None,
            backend: None,
            blocks: None,
            typicality: None,
            band: None,
            cftp_cap: None,
            threads: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fill in defaults and check every field.
    pub fn resolve(&self) -> Result<Plan> {
        let bad = |msg: String| Err(Error::Config(msg));
        let q = self.q.unwrap_or(1.5);
        if !(q.is_finite() && q >= 1.0) {
            return bad(format!("q must be a finite number >= 1, got {q}"));
        }
        let p_base = match &self.p {
            None => p_critical(q),
            Some(PSpec::Value(p)) => *p,
            Some(PSpec::Named(s)) if s == "critical" => p_critical(q),
            Some(PSpec::Named(s)) => return bad(format!("p must be a number or \"critical\", got {s:?}")),
        };
        let p_scale = self.p_scale.unwrap_or(1.0);
        let p = p_base * p_scale;
        if !(p > 0.0 && p < 1.0) {
            return bad(format!("effective p = {p} is outside (0, 1)"));
        }
        let lattice = self.lattice.unwrap_or(LatticeKind::Rectangle);
        let default_n = if self.experiment == ExperimentKind::Validate { 2 } else { 16 };
        let ns = match &self.n {
            None => vec![default_n],
            Some(Sizes::One(n)) => vec![*n],
            Some(Sizes::Many(v)) => v.clone(),
        };
        if ns.is_empty() || ns.contains(&0) {
            return bad("n must list positive sizes".into());
        }
        if self.n_prime == Some(0) {
            return bad("n_prime must be positive".into());
        }
        let boundary = self
            .boundary
            .clone()
            .unwrap_or_else(|| if lattice == LatticeKind::Torus { "periodic".into() } else { "wired".into() });
        let replicas = self.replicas.unwrap_or(100);
        if replicas == 0 {
            return bad("replicas must be positive".into());
        }
        let threads = self.threads.unwrap_or(1);
        if threads == 0 {
            return bad("threads must be positive".into());
        }
        let cftp_cap = self.cftp_cap.unwrap_or(DEFAULT_CAP);
        if cftp_cap == 0 {
            return bad("cftp_cap must be positive".into());
        }
        let time = self.time.unwrap_or(1.0);
        if !(time.is_finite() && time > 0.0) {
            return bad(format!("time must be positive, got {time}"));
        }
        let mut times = self.times.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0]);
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("times must be nonnegative".into());
        }
        times.sort_by(f64::total_cmp);
        let phases = self.phases.unwrap_or(4);
        let typicality = self.typicality.unwrap_or(Typicality { k1: 2.0, k2: 2.0, big_n: None });
        if !(typicality.k1 > 0.0 && typicality.k2 > 0.0 && typicality.big_n.is_none_or(|n| n >= 2.0)) {
            return bad("typicality needs k1, k2 > 0 and big_n >= 2".into());
        }
        let blocks = self.blocks.clone().unwrap_or_else(|| {
            if lattice == LatticeKind::Rectangle { "halves".into() } else { "cylinder-fifths".into() }
        });

        let plan = Plan {
            experiment: self.experiment,
            name: self.name.clone().unwrap_or_else(|| self.experiment.name().to_string()),
            q,
            p,
            p_scale,
            lattice,
            ns,
            n_prime: self.n_prime,
            boundary,
            seed: self.seed.unwrap_or(0),
            replicas,
            time,
            times,
            phases,
            backend: self.backend.unwrap_or_default(),
            blocks,
            typicality,
            band: self.band,
            cftp_cap,
            threads,
        };
        plan.check_shapes()?;
        Ok(plan)
    }
}

/// A validated configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plan {
    pub experiment: ExperimentKind,
    pub name: String,
    pub q: f64,
    /// Effective edge parameter, after scaling.
    pub p: f64,
    pub p_scale: f64,
    pub lattice: LatticeKind,
    pub ns: Vec<usize>,
    pub n_prime: Option<usize>,
    pub boundary: String,
    pub seed: u64,
    pub replicas: usize,
    pub time: f64,
    pub times: Vec<f64>,
    pub phases: usize,
    pub backend: BackendKind,
    pub blocks: String,
    pub typicality: Typicality,
    pub band: Option<[usize; 2]>,
    pub cftp_cap: u64,
    pub threads: usize,
}

/// One lattice of a plan with its boundary condition.
#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    pub lattice: Arc<Lattice>,
    pub xi: Option<BoundaryCondition>,
}

impl Plan {
    pub fn params(&self) -> FkParams {
        FkParams::new(self.p, self.q).expect("checked when resolving")
    }

    /// Hex SHA-256 of the canonical JSON form of the plan.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("plan serialises");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn instance(&self, n: usize) -> Result<Instance> {
        let lattice = Arc::new(Lattice::new(self.lattice, n, self.n_prime.unwrap_or(n)).map_err(|e| Error::Config(e.to_string()))?);
        let xi = if self.boundary == "periodic" {
            if lattice.has_boundary() {
                return Err(Error::Config(format!("boundary \"periodic\" needs a torus, not a {}", self.lattice)));
            }
            None
        } else {
            if !lattice.has_boundary() {
                return Err(Error::Config("a torus takes boundary = \"periodic\"".into()));
            }
            Some(BoundaryCondition::parse(&lattice, &self.boundary).map_err(|e| Error::Config(e.to_string()))?)
        };
        Ok(Instance { n, lattice, xi })
    }

    fn check_shapes(&self) -> Result<()> {
        use ExperimentKind::*;
        let need_rectangle = matches!(self.experiment, Bridges | Crossing | Validate);
        if need_rectangle && self.lattice != LatticeKind::Rectangle {
            return Err(Error::Config(format!("{} needs a rectangle", self.experiment.name())));
        }
        for &n in &self.ns {
            let inst = self.instance(n)?;
            if self.experiment == Psi {
                let [y0, y1] = self.band_rows(&inst.lattice);
                if y0 >= y1 {
                    return Err(Error::Config(format!("band [{y0}, {y1}] is empty at n = {n}")));
                }
            }
            if self.experiment == Bridges && inst.lattice.n_prime() < 2 {
                return Err(Error::Config(format!("bridges needs n_prime >= 2 at n = {n}")));
            }
            if self.experiment == Block {
                self.block_list(&inst.lattice)?;
            }
        }
        Ok(())
    }

    /// Band rows for `psi`: the configured band, or the middle third.
    pub fn band_rows(&self, lattice: &Lattice) -> [usize; 2] {
        let np = lattice.n_prime();
        self.band.unwrap_or([np / 3, 2 * np / 3])
    }

    pub fn block_list(&self, lattice: &Lattice) -> Result<Vec<crate::dynamics::Block>> {
        let blocks = match self.blocks.as_str() {
            "halves" => crate::dynamics::halves(lattice),
            "cylinder-fifths" => crate::dynamics::cylinder_fifths(lattice),
            other => return Err(Error::Config(format!("unknown block preset {other:?}"))),
        };
        blocks.map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = ExperimentConfig::from_toml("experiment = \"bridges\"\nn = [16, 32]\np = \"critical\"\nq = 2.0\n").unwrap();
        let plan = c.resolve().unwrap();
        assert_eq!(plan.ns, vec![16, 32]);
        assert!((plan.p - p_critical(2.0)).abs() < 1e-15);
        assert_eq!(plan.boundary, "wired");
        let c = ExperimentConfig::from_toml("experiment = \"sample\"\nn = 8\np = 0.4\np_scale = 0.5\n").unwrap();
        assert!((c.resolve().unwrap().p - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(ExperimentConfig::from_toml("experiment = \"nope\"").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"sample\"\nbogus = 1").is_err());
        for body in [
            "q = 0.5",
            "p = 1.5",
            "p = \"hot\"",
            "n = 0",
            "replicas = 0",
            "boundary = \"sides:1,0\"",
            "lattice = \"torus\"\nboundary = \"wired\"",
            "boundary = \"periodic\"",
        ] {
            let c = ExperimentConfig::from_toml(&format!("experiment = \"sample\"\n{body}")).unwrap();
            assert!(matches!(c.resolve(), Err(Error::Config(_))), "{body}");
        }
        let c = ExperimentConfig::from_toml("experiment = \"crossing\"\nlattice = \"torus\"").unwrap();
        assert!(c.resolve().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::new(ExperimentKind::Sample).resolve().unwrap();
        let mut b = ExperimentConfig::new(ExperimentKind::Sample);
        b.seed = Some(1);
        let b = b.resolve().unwrap();
        assert_eq!(a.hash(), ExperimentConfig::new(ExperimentKind::Sample).resolve().unwrap().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
