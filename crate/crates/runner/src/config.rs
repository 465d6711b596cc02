//! Human-editable experiment configs (TOML) and their resolution into fully
//! validated market instances.
//!
//! Defaults follow the theory's canonical choices: `η = 1/√T`, initial bids
//! equal to the budget shares, first price, lowest-index tie-breaking, and
//! normalized budgets. A `[sweep]` table turns one config into a cross
//! product of run points over η, T, budget-share vectors, and seeds.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use pacing_core::engine::{AgentSpec, AuctionFormat, MarketConfig, Policy, TieBreak};
use pacing_core::rng::{mix, SplitMix64};
use serde::{Deserialize, Serialize};

/// A descriptive error naming the offending field and constraint.
#[derive(Debug)]
pub enum ConfigError {
    Parse(String),
    Invalid(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "config parse error: {msg}"),
            ConfigError::Invalid(msg) => write!(f, "config error: {msg}"),
            ConfigError::Io { path, source } => {
                write!(f, "config i/o error at {}: {source}", path.display())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

// ---------------------------------------------------------------------------
// Raw (as-parsed) shapes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: Option<String>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
    market: RawMarket,
    #[serde(default)]
    analysis: AnalysisPlan,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    n: Option<usize>,
    #[serde(alias = "T")]
    t: Option<usize>,
    eta: Option<f64>,
    rho: Option<Vec<f64>>,
    initial_bids: Option<Vec<f64>>,
    format: Option<String>,
    tie_break: Option<RawTieBreak>,
    normalize_budgets: Option<bool>,
    agents: Option<Vec<RawAgent>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawTieBreak {
    Name(String),
    Seeded { seeded_random: u64 },
    Favored { favor_agent: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    rho: f64,
    initial_bid: Option<f64>,
    policy: Option<RawPolicy>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawPolicy {
    Name(String),
    Scripted {
        scripted: Vec<f64>,
    },
    Match {
        match_learner: usize,
    },
    /// A bid schedule drawn uniformly from `[lo, hi)`, regenerated from the
    /// run point's seed; gives sweeps their randomized opponents.
    Uniform {
        scripted_uniform: UniformSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct UniformSpec {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    eta: Option<Vec<f64>>,
    #[serde(alias = "T")]
    t: Option<Vec<usize>>,
    rho: Option<Vec<Vec<f64>>>,
    seeds: Option<Vec<u64>>,
    max_points: Option<usize>,
}

/// Which analyses `run` executes per point.
#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnalysisPlan {
    #[serde(default)]
    pub potential: bool,
    #[serde(default)]
    pub milestones: bool,
    pub milestones_d: Option<f64>,
    #[serde(default)]
    pub discrepancy_windows: Vec<usize>,
    #[serde(default)]
    pub round_robin: bool,
    #[serde(default)]
    pub sum_bound: bool,
}

// ---------------------------------------------------------------------------
// Resolved experiment
// ---------------------------------------------------------------------------

/// A parsed and validated experiment: base market, analysis plan, sweep
/// axes, and output location.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub analyses: AnalysisPlan,
    raw_market: RawMarket,
    sweep: Option<RawSweep>,
}

/// One fully resolved point of a sweep.
#[derive(Debug, Clone)]
pub struct RunPoint {
    pub index: usize,
    pub label: String,
    pub seed: u64,
    pub market: MarketConfig,
    /// Stable content hash of the resolved point.
    pub config_hash: String,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let default_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());
    parse_config(&text, &default_name)
}

/// Parses and validates a config from TOML text. The base market must
/// resolve cleanly; sweep points are validated again at expansion.
pub fn parse_config(text: &str, default_name: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawExperiment = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let config = ExperimentConfig {
        name: raw.name.unwrap_or_else(|| default_name.to_string()),
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("runs")),
        seed: raw.seed.unwrap_or(0),
        analyses: raw.analysis,
        raw_market: raw.market,
        sweep: raw.sweep,
    };
    // Surface invariant violations at load time.
    config.base_market()?;
    config.points()?;
    Ok(config)
}

#[derive(Debug, Clone, Default)]
struct Overrides {
    eta: Option<f64>,
    horizon: Option<usize>,
    rho: Option<Vec<f64>>,
}

impl ExperimentConfig {
    /// The market of the un-swept base point.
    pub fn base_market(&self) -> Result<MarketConfig, ConfigError> {
        self.resolve_market(&Overrides::default(), self.seed)
    }

    /// The same experiment restricted to its base point.
    pub fn without_sweep(mut self) -> Self {
        self.sweep = None;
        self
    }

    /// Expands the sweep cross product (η × T × ρ × seeds) into run points.
    pub fn points(&self) -> Result<Vec<RunPoint>, ConfigError> {
        let empty = RawSweep {
            eta: None,
            t: None,
            rho: None,
            seeds: None,
            max_points: None,
        };
        let sweep = self.sweep.as_ref().unwrap_or(&empty);
        let etas: Vec<Option<f64>> = match &sweep.eta {
            Some(v) => v.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let horizons: Vec<Option<usize>> = match &sweep.t {
            Some(v) => v.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let rhos: Vec<Option<Vec<f64>>> = match &sweep.rho {
            Some(v) => v.iter().cloned().map(Some).collect(),
            None => vec![None],
        };
        let seeds: Vec<u64> = sweep.seeds.clone().unwrap_or_else(|| vec![self.seed]);

        let max_points = sweep.max_points.unwrap_or(10_000);
        let count = etas.len() * horizons.len() * rhos.len() * seeds.len();
        if count > max_points {
            return Err(ConfigError::Invalid(format!(
                "sweep: cross product has {count} points, above the cap of {max_points}"
            )));
        }

        let mut points = Vec::with_capacity(count);
        for horizon in &horizons {
            for eta in &etas {
                for rho in &rhos {
                    for &seed in &seeds {
                        let overrides = Overrides {
                            eta: *eta,
                            horizon: *horizon,
                            rho: rho.clone(),
                        };
                        let market = self.resolve_market(&overrides, seed)?;
                        let index = points.len();
                        let label = format!("T={},eta={},seed={seed}", market.horizon, market.eta);
                        let config_hash =
                            crate::hash::config_hash(&(&self.name, &market, &self.analyses, seed));
                        points.push(RunPoint {
                            index,
                            label,
                            seed,
                            market,
                            config_hash,
                        });
                    }
                }
            }
        }
        Ok(points)
    }

    fn resolve_market(
        &self,
        overrides: &Overrides,
        seed: u64,
    ) -> Result<MarketConfig, ConfigError> {
        let raw = &self.raw_market;
        let horizon = overrides
            .horizon
            .or(raw.t)
            .ok_or_else(|| ConfigError::Invalid("market.T: horizon is required".into()))?;

        let eta = match overrides.eta.or(raw.eta) {
            Some(e) => e,
            None => {
                if horizon == 0 {
                    return Err(ConfigError::Invalid(
                        "market.eta: required explicitly when T = 0".into(),
                    ));
                }
                1.0 / (horizon as f64).sqrt()
            }
        };
        if !(eta > 0.0 && eta < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "market.eta: eta must lie in (0,1), got {eta}"
            )));
        }

        let format = match raw.format.as_deref() {
            None | Some("first_price") => AuctionFormat::FirstPrice,
            Some("second_price") => AuctionFormat::SecondPrice,
            Some(other) => {
                return Err(ConfigError::Invalid(format!(
                    "market.format: expected first_price or second_price, got {other}"
                )));
            }
        };

        let tie_break = match &raw.tie_break {
            None => TieBreak::LowestIndex,
            Some(RawTieBreak::Name(name)) => match name.as_str() {
                "lowest_index" => TieBreak::LowestIndex,
                "highest_index" => TieBreak::HighestIndex,
                other => {
                    return Err(ConfigError::Invalid(format!(
                        "market.tie_break: unknown policy {other}"
                    )));
                }
            },
            Some(RawTieBreak::Seeded { seeded_random }) => {
                TieBreak::SeededRandom(mix(*seeded_random, seed))
            }
            Some(RawTieBreak::Favored { favor_agent }) => TieBreak::FavorAgent(*favor_agent),
        };

        let agents = self.resolve_agents(overrides, horizon, seed)?;
        let normalize_budgets = raw.normalize_budgets.unwrap_or(true);
        if normalize_budgets {
            let sum: f64 = agents.iter().map(|a| a.rho).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(ConfigError::Invalid(format!(
                    "market.rho: budget shares must sum to 1 (got {sum}); \
                     set normalize_budgets = false to allow"
                )));
            }
        }

        let market = MarketConfig {
            agents,
            horizon,
            eta,
            format,
            tie_break,
            normalize_budgets,
        };
        market
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("market: {e}")))?;
        Ok(market)
    }

    fn resolve_agents(
        &self,
        overrides: &Overrides,
        horizon: usize,
        seed: u64,
    ) -> Result<Vec<AgentSpec>, ConfigError> {
        let raw = &self.raw_market;
        if let Some(raw_agents) = &raw.agents {
            let n = raw_agents.len();
            let rho_override = match &overrides.rho {
                Some(r) if r.len() != n => {
                    return Err(ConfigError::Invalid(format!(
                        "sweep.rho: expected {n} shares, got {}",
                        r.len()
                    )));
                }
                other => other.clone(),
            };
            return raw_agents
                .iter()
                .enumerate()
                .map(|(id, a)| {
                    let rho = rho_override.as_ref().map_or(a.rho, |r| r[id]);
                    let policy = match &a.policy {
                        None => Policy::PrimalPacing,
                        Some(RawPolicy::Name(name)) => match name.as_str() {
                            "primal_pacing" => Policy::PrimalPacing,
                            other => {
                                return Err(ConfigError::Invalid(format!(
                                    "agents[{id}].policy: unknown policy {other}"
                                )));
                            }
                        },
                        Some(RawPolicy::Scripted { scripted }) => {
                            Policy::Scripted(scripted.clone())
                        }
                        Some(RawPolicy::Match { match_learner }) => {
                            Policy::MatchLearner(*match_learner)
                        }
                        Some(RawPolicy::Uniform { scripted_uniform }) => {
                            let UniformSpec { lo, hi } = *scripted_uniform;
                            if !(hi >= lo && lo >= 0.0) {
                                return Err(ConfigError::Invalid(format!(
                                    "agents[{id}].scripted_uniform: need 0 <= lo <= hi"
                                )));
                            }
                            let mut rng = SplitMix64::new(mix(seed, id as u64 + 1));
                            Policy::Scripted((0..horizon).map(|_| rng.uniform(lo, hi)).collect())
                        }
                    };
                    let initial_bid = a.initial_bid.unwrap_or(match &policy {
                        Policy::PrimalPacing => rho,
                        Policy::Scripted(s) => s.first().copied().unwrap_or(0.0),
                        Policy::MatchLearner(_) => 0.0,
                    });
                    Ok(AgentSpec {
                        id,
                        rho,
                        initial_bid,
                        policy,
                    })
                })
                .collect();
        }

        // Shorthand form: n pacing agents with optional rho / initial_bids.
        let rho = match (&overrides.rho, &raw.rho) {
            (Some(r), _) => r.clone(),
            (None, Some(r)) => r.clone(),
            (None, None) => {
                let n = raw.n.ok_or_else(|| {
                    ConfigError::Invalid(
                        "market.n: agent count required (or give rho / agents)".into(),
                    )
                })?;
                if n == 0 {
                    return Err(ConfigError::Invalid("market.n: must be positive".into()));
                }
                vec![1.0 / n as f64; n]
            }
        };
        if let Some(n) = raw.n {
            if n != rho.len() {
                return Err(ConfigError::Invalid(format!(
                    "market.rho: {} shares but n = {n}",
                    rho.len()
                )));
            }
        }
        let initial = match &raw.initial_bids {
            Some(b) => {
                if b.len() != rho.len() {
                    return Err(ConfigError::Invalid(format!(
                        "market.initial_bids: expected {} entries, got {}",
                        rho.len(),
                        b.len()
                    )));
                }
                b.clone()
            }
            None => rho.clone(),
        };
        Ok(rho
            .iter()
            .zip(&initial)
            .enumerate()
            .map(|(id, (&rho, &initial_bid))| AgentSpec {
                id,
                rho,
                initial_bid,
                policy: Policy::PrimalPacing,
            })
            .collect())
    }
}

/// Serializable form of a resolved run point, persisted as the trace's
/// sidecar so analyzers can reload the market.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSidecar {
    pub name: String,
    pub label: String,
    pub seed: u64,
    pub config_hash: String,
    pub market: MarketConfig,
}

/// Metrics maps persisted per point.
pub type Metrics = BTreeMap<String, serde_json::Value>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_documented_defaults() {
        let config = parse_config("[market]\nn = 2\nT = 100\n", "mini").unwrap();
        let market = config.base_market().unwrap();
        assert_eq!(market.horizon, 100);
        assert!(
            (market.eta - 0.1).abs() < 1e-15,
            "eta defaults to 1/sqrt(T)"
        );
        assert_eq!(market.rho(), vec![0.5, 0.5]);
        assert_eq!(market.initial_bids(), vec![0.5, 0.5]);
        assert_eq!(market.format, AuctionFormat::FirstPrice);
        assert_eq!(market.tie_break, TieBreak::LowestIndex);
        assert!(market.normalize_budgets);
    }

    #[test]
    fn eta_out_of_range_is_named() {
        let err = parse_config("[market]\nn = 2\nT = 10\neta = 1.5\n", "x").unwrap_err();
        assert!(err.to_string().contains("eta must lie in (0,1)"), "{err}");
    }

    #[test]
    fn unnormalized_shares_error_lists_the_sum() {
        let err = parse_config("[market]\nT = 10\nrho = [0.5, 0.4]\n", "x").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("0.9"), "sum missing from: {msg}");
        // explicit opt-out works
        parse_config(
            "[market]\nT = 10\nrho = [0.5, 0.4]\nnormalize_budgets = false\n",
            "x",
        )
        .unwrap();
    }

    #[test]
    fn sweep_cross_product_and_cap() {
        let config = parse_config(
            "[market]\nn = 2\nT = 50\n[sweep]\neta = [0.1, 0.2, 0.3]\nseeds = [1, 2]\n",
            "x",
        )
        .unwrap();
        let points = config.points().unwrap();
        assert_eq!(points.len(), 6);
        let hashes: std::collections::HashSet<_> =
            points.iter().map(|p| p.config_hash.clone()).collect();
        assert_eq!(hashes.len(), 6, "all sweep points hash distinctly");

        let err = parse_config(
            "[market]\nn = 2\nT = 50\n[sweep]\nseeds = [1,2,3]\nmax_points = 2\n",
            "x",
        )
        .unwrap_err();
        assert!(err.to_string().contains("cross product"));
    }

    #[test]
    fn hash_invariant_under_key_reordering_and_comments() {
        let a = parse_config("[market]\nn = 2\nT = 100\neta = 0.25\n", "same").unwrap();
        let b = parse_config(
            "# a comment\n[market]\neta = 0.25 # trailing\nT = 100\nn = 2\n",
            "same",
        )
        .unwrap();
        assert_eq!(
            a.points().unwrap()[0].config_hash,
            b.points().unwrap()[0].config_hash
        );
    }

    #[test]
    fn sweeping_t_rederives_default_eta() {
        let config =
            parse_config("[market]\nn = 2\nT = 100\n[sweep]\nT = [100, 400]\n", "x").unwrap();
        let points = config.points().unwrap();
        assert!((points[0].market.eta - 0.1).abs() < 1e-15);
        assert!((points[1].market.eta - 0.05).abs() < 1e-15);
    }

    #[test]
    fn uniform_scripted_agents_depend_on_seed() {
        let text = "\
[market]
T = 20
normalize_budgets = false

[[market.agents]]
rho = 0.5
policy = \"primal_pacing\"

[[market.agents]]
rho = 0.5
policy = { scripted_uniform = { lo = 0.0, hi = 1.0 } }

[sweep]
seeds = [1, 2]
";
        let config = parse_config(text, "x").unwrap();
        let points = config.points().unwrap();
        let sched = |p: &RunPoint| match &p.market.agents[1].policy {
            Policy::Scripted(s) => s.clone(),
            _ => panic!("expected scripted"),
        };
        assert_ne!(sched(&points[0]), sched(&points[1]));
        // same seed resolves identically
        assert_eq!(sched(&points[0]), sched(&config.points().unwrap()[0]));
    }
}
