//! Keeps a minimal universally rigid topology alive while nodes come, go,
//! and move. Every applied event rebuilds the framework from scratch and
//! reruns the certificate; callers read edge deltas to learn which links
//! to create or drop.
//!
//! Nodes carry stable ids decoupled from construction indices, so deltas
//! stay meaningful across epochs.

use crate::construction::{build_grunbaum_2d, build_grunbaum_3d, FanDecomposition, Framework};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::rigidity::{superstability_test, RigidityReport};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Event {
    Add { id: u64, point: Vec<f64> },
    Remove { id: u64 },
    Move { id: u64, point: Vec<f64> },
}

/// Edges to create and to drop, as unordered pairs of stable node ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EdgeDelta {
    pub added: Vec<[u64; 2]>,
    pub removed: Vec<[u64; 2]>,
}

impl EdgeDelta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }
}

/// Set difference of two sorted id-edge lists.
pub fn edge_delta(prev: &[[u64; 2]], next: &[[u64; 2]]) -> EdgeDelta {
    let added = next.iter().filter(|e| prev.binary_search(e).is_err()).copied().collect();
    let removed = prev.iter().filter(|e| next.binary_search(e).is_err()).copied().collect();
    EdgeDelta { added, removed }
}

/// One line of the session log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub epoch: u64,
    pub event: Event,
    pub added: Vec<[u64; 2]>,
    pub removed: Vec<[u64; 2]>,
}

/// The framework standing after an epoch, with its certificate outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// Index i of the framework is the node with the i-th smallest id.
    pub ids: Vec<u64>,
    pub framework: Framework,
    pub fan: Option<FanDecomposition>,
    pub report: Option<RigidityReport>,
    /// True iff the certificate ran and returned superstable.
    pub certified: bool,
    /// Why certification did not succeed, when it did not.
    pub note: Option<String>,
}

impl Snapshot {
    /// The edge set in id space, sorted.
    pub fn id_edges(&self) -> Vec<[u64; 2]> {
        let mut out: Vec<[u64; 2]> = self
            .framework
            .edges()
            .iter()
            .map(|&[i, j]| {
                let (a, b) = (self.ids[i], self.ids[j]);
                [a.min(b), a.max(b)]
            })
            .collect();
        out.sort();
        out
    }
}

pub struct Session {
    dim: usize,
    nodes: BTreeMap<u64, Vec<f64>>,
    epoch: u64,
    current: Option<Snapshot>,
    history: Vec<HistoryEntry>,
}

impl Session {
    pub fn new(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::DegenerateInput(format!("session dimension {dim} not supported")));
        }
        Ok(Self { dim, nodes: BTreeMap::new(), epoch: 0, current: None, history: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn current(&self) -> Option<&Snapshot> {
        self.current.as_ref()
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn node_ids(&self) -> Vec<u64> {
        self.nodes.keys().copied().collect()
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim || point.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "point must be {} finite coordinates",
                self.dim
            )));
        }
        Ok(())
    }

    /// Applies one event transactionally: on any error the session is left
    /// exactly as it was. A framework that builds but fails its certificate
    /// still commits, with the failure recorded in the snapshot.
    pub fn apply_event(&mut self, event: Event) -> Result<&HistoryEntry> {
        let mut next = self.nodes.clone();
        match &event {
            Event::Add { id, point } => {
                self.check_point(point)?;
                if next.insert(*id, point.clone()).is_some() {
                    return Err(Error::DuplicateId(*id));
                }
            }
            Event::Remove { id } => {
                if next.remove(id).is_none() {
                    return Err(Error::UnknownId(*id));
                }
                if next.is_empty() {
                    return Err(Error::DegenerateInput("session cannot become empty".into()));
                }
            }
            Event::Move { id, point } => {
                self.check_point(point)?;
                match next.get_mut(id) {
                    Some(p) => *p = point.clone(),
                    None => return Err(Error::UnknownId(*id)),
                }
            }
        }

        let snapshot = rebuild(self.dim, &next)?;
        let prev_edges = self.current.as_ref().map(Snapshot::id_edges).unwrap_or_default();
        let delta = edge_delta(&prev_edges, &snapshot.id_edges());

        self.nodes = next;
        self.epoch += 1;
        self.current = Some(snapshot);
        self.history.push(HistoryEntry {
            epoch: self.epoch,
            event,
            added: delta.added,
            removed: delta.removed,
        });
        Ok(self.history.last().expect("just pushed"))
    }
}

fn rebuild(dim: usize, nodes: &BTreeMap<u64, Vec<f64>>) -> Result<Snapshot> {
    let ids: Vec<u64> = nodes.keys().copied().collect();
    let coords: Vec<f64> = ids.iter().flat_map(|id| nodes[id].iter().copied()).collect();
    let config = Configuration::new(dim, coords)?;
    config.require_distinct_points()?;
    let n = config.len();

    let (framework, fan) = if n <= dim + 1 {
        (Framework::complete(config), None)
    } else if dim == 2 {
        let (fw, fan) = build_grunbaum_2d(&config)?;
        (fw, Some(fan))
    } else {
        let (fw, fan) = build_grunbaum_3d(&config)?;
        (fw, Some(fan))
    };

    let (report, certified, note) = match superstability_test(&framework) {
        Ok(r) => {
            let ok = r.superstable;
            let note = (!ok).then(|| format!("certificate not superstable: {:?}", r.classification));
            (Some(r), ok, note)
        }
        Err(e) => (None, false, Some(format!("certificate inconclusive: {e}"))),
    };

    Ok(Snapshot { ids, framework, fan, report, certified, note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn add(id: u64, point: &[f64]) -> Event {
        Event::Add { id, point: point.to_vec() }
    }

    #[test]
    fn growing_a_triangle_into_k4() {
        let mut sess = Session::new(2).unwrap();
        sess.apply_event(add(7, &[0.0, 0.0])).unwrap();
        sess.apply_event(add(3, &[1.0, 0.1])).unwrap();
        sess.apply_event(add(9, &[0.4, 0.9])).unwrap();
        assert_eq!(sess.epoch(), 3);
        let snap = sess.current().unwrap();
        assert_eq!(snap.framework.edges().len(), 3);
        assert!(snap.certified);
        assert!(snap.fan.is_none());

        let entry = sess.apply_event(add(5, &[0.9, 1.1])).unwrap();
        assert_eq!(entry.added.len(), 3);
        assert!(entry.removed.is_empty());
        assert_eq!(sess.current().unwrap().framework.edges().len(), 6);
    }

    #[test]
    fn removal_keeps_the_count_formula() {
        let mut sess = Session::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for id in 0..10u64 {
            sess.apply_event(add(id, &[rng.random::<f64>(), rng.random::<f64>()])).unwrap();
        }
        assert_eq!(sess.current().unwrap().framework.edges().len(), 18);
        let center = sess.current().unwrap().fan.as_ref().unwrap().center_nodes[0];
        let center_id = sess.current().unwrap().ids[center];
        let victim = (0..10u64).find(|id| *id != center_id).unwrap();
        sess.apply_event(Event::Remove { id: victim }).unwrap();
        assert_eq!(sess.current().unwrap().framework.edges().len(), 16);
        assert!(sess.current().unwrap().certified);
    }

    #[test]
    fn events_are_transactional() {
        let mut sess = Session::new(2).unwrap();
        sess.apply_event(add(1, &[0.0, 0.0])).unwrap();
        sess.apply_event(add(2, &[1.0, 0.3])).unwrap();

        assert!(matches!(sess.apply_event(add(1, &[2.0, 2.0])), Err(Error::DuplicateId(1))));
        assert!(matches!(
            sess.apply_event(Event::Remove { id: 99 }),
            Err(Error::UnknownId(99))
        ));
        assert!(matches!(
            sess.apply_event(Event::Move { id: 42, point: vec![0.0, 0.0] }),
            Err(Error::UnknownId(42))
        ));
        // coincident point makes the build degenerate and must not commit
        assert!(sess.apply_event(add(3, &[0.0, 0.0])).is_err());
        assert_eq!(sess.epoch(), 2);
        assert_eq!(sess.node_ids(), vec![1, 2]);
        assert_eq!(sess.history().len(), 2);
    }

    #[test]
    fn session_never_becomes_empty() {
        let mut sess = Session::new(3).unwrap();
        sess.apply_event(add(1, &[0.0, 0.0, 0.0])).unwrap();
        assert!(matches!(
            sess.apply_event(Event::Remove { id: 1 }),
            Err(Error::DegenerateInput(_))
        ));
        assert_eq!(sess.len(), 1);
    }

    #[test]
    fn gentle_move_produces_an_empty_delta() {
        let mut sess = Session::new(2).unwrap();
        let pts = [[0.0, 0.0], [2.0, 0.0], [2.1, 1.9], [0.1, 2.0], [1.0, 0.8]];
        for (id, p) in pts.iter().enumerate() {
            sess.apply_event(add(id as u64, p)).unwrap();
        }
        let entry = sess
            .apply_event(Event::Move { id: 4, point: vec![1.001, 0.801] })
            .unwrap();
        assert!(entry.added.is_empty());
        assert!(entry.removed.is_empty());
    }

    #[test]
    fn random_event_streams_stay_certified() {
        for dim in [2usize, 3] {
            let mut sess = Session::new(dim).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(dim as u64 * 1000 + 5);
            let mut next_id = 0u64;
            let mut rand_point =
                |rng: &mut ChaCha8Rng| (0..dim).map(|_| rng.random::<f64>()).collect::<Vec<_>>();
            for _ in 0..6 {
                let p = rand_point(&mut rng);
                sess.apply_event(Event::Add { id: next_id, point: p }).unwrap();
                next_id += 1;
            }
            for step in 0..50 {
                let ids = sess.node_ids();
                let roll = rng.random::<f64>();
                let event = if roll < 0.4 || ids.len() <= dim + 2 {
                    next_id += 1;
                    Event::Add { id: next_id, point: rand_point(&mut rng) }
                } else if roll < 0.7 {
                    Event::Remove { id: ids[rng.random_range(0..ids.len())] }
                } else {
                    Event::Move {
                        id: ids[rng.random_range(0..ids.len())],
                        point: rand_point(&mut rng),
                    }
                };
                sess.apply_event(event).unwrap();
                let snap = sess.current().unwrap();
                assert!(snap.certified, "dim {dim} step {step}: {:?}", snap.note);
                let n = snap.framework.len();
                if n >= dim + 2 {
                    let expect = dim * n - dim * (dim + 1) / 2 + 1;
                    assert_eq!(snap.framework.edges().len(), expect);
                }
            }
        }
    }

    #[test]
    fn replaying_history_reproduces_the_final_state() {
        let mut sess = Session::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for id in 0..8u64 {
            sess.apply_event(add(id, &[rng.random::<f64>(), rng.random::<f64>()])).unwrap();
        }
        sess.apply_event(Event::Remove { id: 3 }).unwrap();
        sess.apply_event(Event::Move { id: 5, point: vec![0.42, 0.17] }).unwrap();

        let mut replay = Session::new(2).unwrap();
        for entry in sess.history() {
            replay.apply_event(entry.event.clone()).unwrap();
        }
        let (a, b) = (sess.current().unwrap(), replay.current().unwrap());
        assert_eq!(a.ids, b.ids);
        assert_eq!(a.framework, b.framework);
        assert_eq!(a.fan, b.fan);
        assert_eq!(a.certified, b.certified);
    }

    #[test]
    fn log_lines_round_trip() {
        let mut sess = Session::new(2).unwrap();
        sess.apply_event(add(1, &[0.0, 0.0])).unwrap();
        sess.apply_event(add(2, &[1.0, 0.5])).unwrap();
        let line = serde_json::to_string(&sess.history()[1]).unwrap();
        assert!(line.starts_with("{\"epoch\":2,\"event\":{\"op\":\"add\""));
        let back: HistoryEntry = serde_json::from_str(&line).unwrap();
        assert_eq!(back, sess.history()[1]);
    }
}
