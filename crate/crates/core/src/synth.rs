//! Deterministic synthetic fixtures: an indicator panel whose informative
//! indicators drift upward ahead of generated crises, the matching crisis
//! events, and a two-level network (one root, all entities as complete
//! siblings) observed every quarter.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::early_warning::{CrisisEvent, CrisisEvents, IndicatorPanel};
use crate::error::{Error, Result};
use crate::io;
use crate::network::{Link, NetworkSnapshot, Node, RiskNetwork};
use crate::quarter::Quarter;

pub const ROOT_ID: &str = "EU";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub entities: usize,
    pub start: Quarter,
    pub quarters: usize,
    pub indicators: usize,
    /// Multiplier on the per-quarter crisis hazard; 0 disables crises.
    pub crisis_intensity: f64,
    /// Probability that a sibling link carries nonzero weight.
    pub network_density: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            entities: 8,
            start: Quarter::from_index(1995 * 4),
            quarters: 80,
            indicators: 14,
            crisis_intensity: 1.0,
            network_density: 0.6,
            seed: 42,
        }
    }
}

impl SynthSpec {
    fn check(&self) -> Result<()> {
        if self.entities == 0 || self.quarters == 0 || self.indicators == 0 {
            return Err(Error::InvalidParameter("entity, quarter and indicator counts must be positive".into()));
        }
        if !(self.crisis_intensity >= 0.0) {
            return Err(Error::InvalidParameter("crisis intensity must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.network_density) {
            return Err(Error::InvalidParameter("network density must lie in [0,1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub panel: IndicatorPanel,
    pub events: CrisisEvents,
    pub snapshots: Vec<NetworkSnapshot>,
}

const BASE_HAZARD: f64 = 0.025;
const PRE_CRISIS_BUMP: f64 = 1.4;

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn entity_id(k: usize) -> String {
    format!("C{:02}", k + 1)
}

pub fn generate_synthetic(spec: &SynthSpec) -> Result<SynthData> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_q = spec.quarters;
    let ids: Vec<String> = (0..spec.entities).map(entity_id).collect();

    let mut events = Vec::new();
    let mut crisis_starts: Vec<Vec<usize>> = vec![Vec::new(); spec.entities];
    for (e, id) in ids.iter().enumerate() {
        let mut t = 12;
        while t < n_q {
            if rng.random::<f64>() < BASE_HAZARD * spec.crisis_intensity {
                let len = rng.random_range(2..=6);
                events.push(CrisisEvent {
                    entity: id.clone(),
                    start: spec.start.offset(t as i32),
                    end: Some(spec.start.offset((t + len - 1) as i32)),
                });
                crisis_starts[e].push(t);
                t += len + 16;
            } else {
                t += 1;
            }
        }
    }

    // Latent vulnerability: AR(1) noise plus a bump over each pre-crisis window.
    let mut signal = vec![vec![0.0; n_q]; spec.entities];
    for (e, row) in signal.iter_mut().enumerate() {
        let mut ar = 0.0;
        for (t, s) in row.iter_mut().enumerate() {
            ar = 0.7 * ar + 0.5 * normal(&mut rng);
            let bump = crisis_starts[e].iter().any(|&c| t + 5 <= c && c <= t + 12);
            *s = ar + if bump { PRE_CRISIS_BUMP } else { 0.0 };
        }
    }

    let informative = spec.indicators.div_ceil(2);
    let loadings: Vec<f64> = (0..spec.indicators)
        .map(|j| {
            if j < informative {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * rng.random_range(0.5..1.0)
            } else {
                0.0
            }
        })
        .collect();
    let names: Vec<String> = (1..=spec.indicators).map(|j| format!("ind_{j}")).collect();
    let mut rows = Vec::with_capacity(spec.entities * n_q);
    for (e, id) in ids.iter().enumerate() {
        for t in 0..n_q {
            let values = loadings
                .iter()
                .map(|&l| {
                    let v = round6(l * signal[e][t] + 0.8 * normal(&mut rng));
                    (rng.random::<f64>() >= 0.01).then_some(v)
                })
                .collect();
            rows.push((id.clone(), spec.start.offset(t as i32), values));
        }
    }
    let panel = IndicatorPanel::from_rows(names, rows)?;

    let to_root: Vec<f64> = (0..spec.entities).map(|_| rng.random_range(0.2..1.0)).collect();
    let sibling: Vec<Vec<f64>> = (0..spec.entities)
        .map(|_| {
            (0..spec.entities)
                .map(|_| if rng.random::<f64>() < spec.network_density { rng.random_range(0.05..0.5) } else { 0.0 })
                .collect()
        })
        .collect();
    let phase: Vec<f64> = (0..spec.entities).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();

    let mut snapshots = Vec::with_capacity(n_q);
    for t in 0..n_q {
        let wobble = |e: usize| 1.0 + 0.1 * (std::f64::consts::TAU * t as f64 / 20.0 + phase[e]).sin();
        let mut nodes = vec![Node::root(ROOT_ID)];
        let mut links = Vec::new();
        for (e, id) in ids.iter().enumerate() {
            let risk = round6(1.0 / (1.0 + (-2.0 * (signal[e][t] - 0.8)).exp()));
            nodes.push(Node::child(id.clone(), 1, ROOT_ID, risk));
            links.push(Link::new(id.clone(), ROOT_ID, round6(to_root[e] * wobble(e))));
            for (f, other) in ids.iter().enumerate() {
                if e != f {
                    links.push(Link::new(id.clone(), other.clone(), round6(sibling[e][f] * wobble(e))));
                }
            }
        }
        snapshots.push(NetworkSnapshot::new(spec.start.offset(t as i32), RiskNetwork::new(nodes, links)?));
    }

    Ok(SynthData { panel, events: CrisisEvents::new(events)?, snapshots })
}

pub const INDICATORS_FILE: &str = "indicators.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const NODES_FILE: &str = "nodes.csv";
pub const LINKS_FILE: &str = "links.csv";

/// Writes the four input files into `dir`, creating it if needed.
pub fn write_synthetic(data: &SynthData, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    io::write_indicators(&data.panel, io::create(&dir.join(INDICATORS_FILE))?)?;
    io::write_events(&data.events, io::create(&dir.join(EVENTS_FILE))?)?;
    io::write_snapshots(
        &data.snapshots,
        io::create(&dir.join(NODES_FILE))?,
        io::create(&dir.join(LINKS_FILE))?,
    )?;
    Ok(())
}
