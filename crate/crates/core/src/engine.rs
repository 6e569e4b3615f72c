//! Two-group initialization and the sequential per-iteration action loop.
//!
//! Each iteration every agent, in turn, picks an information source (an
//! in-neighbor by weight, or occasionally anyone in its weak component),
//! accepts or rejects the source's culture, and strengthens or weakens the
//! edge from the source accordingly. Edges whose weight drops below the
//! pruning threshold are removed on the spot. Updates are applied in place,
//! so later agents in an iteration see earlier agents' changes.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{self, RunResult, SplMetric};
use crate::model::{
    acceptance_probability, mix_culture, reinforce_weight, sample_attributes, weaken_weight, Agent,
    CulturalVector, DiversityParams, Group,
};
use crate::network::Network;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub group_size: usize,
    pub dims: usize,
    pub intra_density: f64,
    pub inter_density: f64,
    pub center_separation: f64,
    pub culture_noise_sd: f64,
    pub diversity: DiversityParams,
    pub iterations: usize,
    pub local_select_prob: f64,
    pub new_edge_weight: f64,
    pub prune_threshold: f64,
    /// Visit agents in a fresh random permutation each iteration instead of
    /// ascending id order.
    pub shuffle_order: bool,
    /// Path-length measure recorded as the run's `spl`.
    pub spl_metric: SplMetric,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            group_size: 50,
            dims: 10,
            intra_density: 0.20,
            inter_density: 0.02,
            center_separation: 3.0,
            culture_noise_sd: 0.1,
            diversity: DiversityParams::default(),
            iterations: 500,
            local_select_prob: 0.99,
            new_edge_weight: 0.01,
            prune_threshold: 0.01,
            shuffle_order: false,
            spl_metric: SplMetric::Directed,
            seed: 0,
        }
    }
}

fn invalid(field: &'static str, reason: alloc::string::String) -> Error {
    Error::InvalidConfig { field, reason }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.group_size < 2 {
            return Err(invalid("group_size", alloc::format!("must be >= 2, got {}", self.group_size)));
        }
        if self.dims == 0 {
            return Err(invalid("dims", "must be >= 1".into()));
        }
        for (field, p) in [
            ("intra_density", self.intra_density),
            ("inter_density", self.inter_density),
            ("local_select_prob", self.local_select_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(field, alloc::format!("must be a probability in [0, 1], got {p}")));
            }
        }
        if !(self.center_separation.is_finite() && self.center_separation >= 0.0) {
            return Err(invalid("center_separation", alloc::format!("must be finite and >= 0, got {}", self.center_separation)));
        }
        if !(self.culture_noise_sd.is_finite() && self.culture_noise_sd >= 0.0) {
            return Err(invalid("culture_noise_sd", alloc::format!("must be finite and >= 0, got {}", self.culture_noise_sd)));
        }
        if !(self.prune_threshold >= 0.0 && self.prune_threshold < 1.0) {
            return Err(invalid("prune_threshold", alloc::format!("must lie in [0, 1), got {}", self.prune_threshold)));
        }
        if !(self.new_edge_weight > 0.0 && self.new_edge_weight < 1.0) {
            return Err(invalid("new_edge_weight", alloc::format!("must lie in (0, 1), got {}", self.new_edge_weight)));
        }
        if self.new_edge_weight < self.prune_threshold {
            return Err(invalid(
                "new_edge_weight",
                alloc::format!("must be >= prune_threshold ({}), got {}", self.prune_threshold, self.new_edge_weight),
            ));
        }
        self.diversity.validate()
    }

    pub fn agent_count(&self) -> usize {
        2 * self.group_size
    }
}

/// Complete model state. Serializable, including the random stream, so a
/// run can be snapshotted and resumed bit-exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub config: SimConfig,
    pub agents: Vec<Agent>,
    pub network: Network,
    pub iteration: usize,
    #[serde(with = "rng_state")]
    pub rng: ChaCha8Rng,
}

/// Serializes the generator as its seed, stream id and word position.
mod rng_state {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct State {
        seed: [u8; 32],
        stream: u64,
        word_pos: u128,
    }

    pub fn serialize<S: Serializer>(rng: &ChaCha8Rng, s: S) -> Result<S::Ok, S::Error> {
        State {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ChaCha8Rng, D::Error> {
        let st = State::deserialize(d)?;
        let mut rng = ChaCha8Rng::from_seed(st.seed);
        rng.set_stream(st.stream);
        rng.set_word_pos(st.word_pos);
        Ok(rng)
    }
}

/// Outcome of source selection for one focal agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceChoice {
    Source { source: usize, created_edge: bool },
    /// The focal agent is alone in its weak component.
    NoAction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionOutcome {
    Accepted,
    Rejected,
    Skipped,
}

/// Per-iteration tallies of action outcomes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub skipped: usize,
    pub pruned: usize,
    pub created: usize,
}

impl StepStats {
    pub fn actions(&self) -> usize {
        self.accepted + self.rejected + self.skipped
    }
}

impl SimState {
    /// Builds the initial two-group state. Fully determined by `config.seed`.
    ///
    /// Group A's center is the origin, group B's sits `center_separation`
    /// along the first axis. Each ordered pair gets an edge independently;
    /// initial weights are uniform on `[prune_threshold, 1)`.
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let n = config.agent_count();
        let noise = Normal::new(0.0, config.culture_noise_sd).map_err(|_| {
            invalid("culture_noise_sd", alloc::format!("invalid standard deviation {}", config.culture_noise_sd))
        })?;

        let mut cultures = Vec::with_capacity(n);
        for id in 0..n {
            let mut c = CulturalVector::zeros(config.dims);
            let group = group_of(id, config.group_size);
            for (k, comp) in c.as_mut_slice().iter_mut().enumerate() {
                let center = if group == Group::B && k == 0 {
                    config.center_separation
                } else {
                    0.0
                };
                *comp = center + noise.sample(&mut rng);
            }
            cultures.push(c);
        }

        let mut network = Network::new(n);
        for target in 0..n {
            for source in 0..n {
                if source == target {
                    continue;
                }
                let same = group_of(source, config.group_size) == group_of(target, config.group_size);
                let p = if same { config.intra_density } else { config.inter_density };
                if rng.random::<f64>() < p {
                    let w = loop {
                        let w: f64 = rng.random();
                        if w >= config.prune_threshold && w > 0.0 {
                            break w;
                        }
                    };
                    network.set_edge(source, target, w)?;
                }
            }
        }

        let agents = cultures
            .into_iter()
            .enumerate()
            .map(|(id, culture)| Agent {
                id,
                group: group_of(id, config.group_size),
                culture,
                attrs: sample_attributes(&config.diversity, &mut rng),
            })
            .collect();

        Ok(Self {
            config: config.clone(),
            agents,
            network,
            iteration: 0,
            rng,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    fn check_focal(&self, focal: usize) -> Result<()> {
        if focal < self.agents.len() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: focal,
                len: self.agents.len(),
            })
        }
    }

    /// Chooses an information source for `focal`, creating a
    /// `new_edge_weight` edge from it when none exists.
    ///
    /// With probability `local_select_prob` (and at least one in-neighbor)
    /// the source is an in-neighbor drawn proportionally to edge weight.
    /// Otherwise it is drawn uniformly from focal's weak component, focal
    /// excluded.
    pub fn select_source(&mut self, focal: usize) -> Result<SourceChoice> {
        self.check_focal(focal)?;
        let branch: f64 = self.rng.random();
        let in_edges = self.network.in_edges(focal);
        if branch < self.config.local_select_prob && !in_edges.is_empty() {
            let total: f64 = in_edges.iter().map(|e| e.weight).sum();
            let mut x = self.rng.random::<f64>() * total;
            let mut source = in_edges[in_edges.len() - 1].source;
            for e in in_edges {
                if x < e.weight {
                    source = e.source;
                    break;
                }
                x -= e.weight;
            }
            return Ok(SourceChoice::Source {
                source,
                created_edge: false,
            });
        }

        let mut candidates = metrics::weak_component_of(&self.network, focal);
        candidates.retain(|&v| v != focal);
        if candidates.is_empty() {
            return Ok(SourceChoice::NoAction);
        }
        let source = candidates[self.rng.random_range(0..candidates.len())];
        let created_edge = self.network.weight(source, focal).is_none();
        if created_edge {
            self.network.set_edge(source, focal, self.config.new_edge_weight)?;
        }
        Ok(SourceChoice::Source { source, created_edge })
    }

    /// One full turn for `focal`, using focal's own attributes for the
    /// accept/reject draw, the culture mix and the weight change.
    pub fn agent_action(&mut self, focal: usize) -> Result<ActionOutcome> {
        Ok(self.agent_action_detailed(focal)?.0)
    }

    fn agent_action_detailed(&mut self, focal: usize) -> Result<(ActionOutcome, bool, bool)> {
        let (source, created) = match self.select_source(focal)? {
            SourceChoice::NoAction => return Ok((ActionOutcome::Skipped, false, false)),
            SourceChoice::Source { source, created_edge } => (source, created_edge),
        };
        let attrs = self.agents[focal].attrs;
        let p = acceptance_probability(&self.agents[focal].culture, &self.agents[source].culture, attrs.d)?;
        let accepted = self.rng.random::<f64>() < p;
        let w = self
            .network
            .weight(source, focal)
            .expect("selected source always has an edge into focal");
        let new_w = if accepted {
            let mixed = mix_culture(&self.agents[focal].culture, &self.agents[source].culture, attrs.r_s)?;
            self.agents[focal].culture = mixed;
            reinforce_weight(w, attrs.r_w)?
        } else {
            weaken_weight(w, attrs.r_w)?
        };
        let pruned = new_w < self.config.prune_threshold;
        if pruned {
            self.network.remove_edge(source, focal);
        } else {
            self.network.set_edge(source, focal, new_w)?;
        }
        let outcome = if accepted {
            ActionOutcome::Accepted
        } else {
            ActionOutcome::Rejected
        };
        Ok((outcome, pruned, created))
    }

    /// One iteration: every agent acts once.
    pub fn step(&mut self) -> Result<StepStats> {
        let n = self.agents.len();
        let order: Vec<usize> = if self.config.shuffle_order {
            let mut ids: Vec<usize> = (0..n).collect();
            ids.shuffle(&mut self.rng);
            ids
        } else {
            (0..n).collect()
        };
        let mut stats = StepStats::default();
        for focal in order {
            let (outcome, pruned, created) = self.agent_action_detailed(focal)?;
            match outcome {
                ActionOutcome::Accepted => stats.accepted += 1,
                ActionOutcome::Rejected => stats.rejected += 1,
                ActionOutcome::Skipped => stats.skipped += 1,
            }
            stats.pruned += pruned as usize;
            stats.created += created as usize;
        }
        self.iteration += 1;
        Ok(stats)
    }

    /// Outcome record for the current state.
    pub fn measure(&self, run_index: u32) -> RunResult {
        let div = &self.config.diversity;
        RunResult {
            sigma_d: div.sigma_d,
            sigma_rs: div.sigma_s,
            sigma_rw: div.sigma_w,
            run_index,
            seed: self.config.seed,
            cd: metrics::mean_intergroup_cultural_distance(&self.agents),
            spl: self.config.spl_metric.measure(&self.network),
            edge_count: self.network.edge_count(),
            component_count: metrics::component_count(&self.network),
            wall_ms: 0,
            failed: false,
        }
    }
}

fn group_of(id: usize, group_size: usize) -> Group {
    if id < group_size {
        Group::A
    } else {
        Group::B
    }
}

/// Initializes, runs `config.iterations` steps and measures the final state.
pub fn run(config: &SimConfig) -> Result<(SimState, RunResult)> {
    run_observed(config, 0, |_| {})
}

/// As [`run`], calling `observer` on the initial state and after every
/// `every`-th iteration (never when `every == 0`).
pub fn run_observed<F>(config: &SimConfig, every: usize, mut observer: F) -> Result<(SimState, RunResult)>
where
    F: FnMut(&SimState),
{
    let mut state = SimState::new(config)?;
    if every > 0 {
        observer(&state);
    }
    for _ in 0..config.iterations {
        state.step()?;
        if every > 0 && state.iteration % every == 0 {
            observer(&state);
        }
    }
    let result = state.measure(0);
    Ok((state, result))
}
