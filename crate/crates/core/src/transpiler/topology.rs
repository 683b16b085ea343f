use crate::error::{domain, Error};
use crate::Result;
use crate::sim::MAX_QUBITS;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// Undirected coupling graph; the native two-qubit gate is always CZ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceTopology {
    num_qubits: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct TopologyRecord {
    qubits: usize,
    edges: Vec<[usize; 2]>,
}

/// Name of the bundled coupling map: physical qubits `q0..q4` of the 3x3
/// square-grid processor with the four calibrated CZ couplers
/// `q0-q1`, `q1-q2`, `q2-q4`, `q4-q1`. `q3` is present but uncoupled.
pub const GRID5_PRESET: &str = "grid5";

impl DeviceTopology {
    pub fn new(num_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(domain!("topology needs at least one qubit"));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= num_qubits || b >= num_qubits {
                return Err(domain!("edge ({a}, {b}) references a qubit outside 0..{num_qubits}"));
            }
            if a == b {
                return Err(domain!("self-loop on qubit {a}"));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self { num_qubits, edges: set })
    }

    pub fn grid5() -> Self {
        Self::new(5, [(0, 1), (1, 2), (2, 4), (1, 4)]).expect("preset is valid")
    }

    /// All-to-all connectivity.
    pub fn complete(num_qubits: usize) -> Self {
        let edges = (0..num_qubits).flat_map(|a| (a + 1..num_qubits).map(move |b| (a, b)));
        Self::new(num_qubits, edges).expect("complete graph is valid")
    }

    pub fn line(num_qubits: usize) -> Self {
        Self::new(num_qubits, (1..num_qubits).map(|q| (q - 1, q))).expect("line is valid")
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            GRID5_PRESET => Ok(Self::grid5()),
            other => {
                let sized = |prefix: &str| other.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
                match (sized("complete"), sized("line")) {
                    (Some(n), _) if (1..=MAX_QUBITS).contains(&n) => Ok(Self::complete(n)),
                    (_, Some(n)) if (1..=MAX_QUBITS).contains(&n) => Ok(Self::line(n)),
                    _ => Err(domain!(
                        "unknown coupling preset {other:?} (available: {GRID5_PRESET}, complete<n>, line<n>)"
                    )),
                }
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Neighbours of `q` in ascending order.
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == q { Some(b) } else if b == q { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    /// All-pairs hop distances (`usize::MAX` when unreachable).
    pub fn distances(&self) -> Vec<Vec<usize>> {
        (0..self.num_qubits)
            .map(|src| {
                let mut dist = vec![usize::MAX; self.num_qubits];
                dist[src] = 0;
                let mut queue = VecDeque::from([src]);
                while let Some(q) = queue.pop_front() {
                    for nb in self.neighbors(q) {
                        if dist[nb] == usize::MAX {
                            dist[nb] = dist[q] + 1;
                            queue.push_back(nb);
                        }
                    }
                }
                dist
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let record = TopologyRecord {
            qubits: self.num_qubits,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_string(&record).expect("topology serialises")
    }

    /// Parses `{"qubits": n, "edges": [[i, j], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let record: TopologyRecord = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("coupling file, line {} column {}: {e}", e.line(), e.column())))?;
        Self::new(record.qubits, record.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

/// Logical-to-physical assignment; a bijection on `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitMapping {
    l2p: Vec<usize>,
}

impl QubitMapping {
    pub fn identity(n: usize) -> Self {
        Self { l2p: (0..n).collect() }
    }

    /// Accepts an injective partial map; it is completed later by [`Self::extend_to`].
    pub fn new(l2p: Vec<usize>) -> Result<Self> {
        for (i, p) in l2p.iter().enumerate() {
            if l2p[..i].contains(p) {
                return Err(domain!("physical qubit {p} assigned twice"));
            }
        }
        Ok(Self { l2p })
    }

    pub fn len(&self) -> usize {
        self.l2p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l2p.is_empty()
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.l2p[logical]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.l2p
    }

    pub fn logical_of(&self, physical: usize) -> Option<usize> {
        self.l2p.iter().position(|&p| p == physical)
    }

    /// Completes the map to a bijection on `0..n`, giving unused physical
    /// qubits to the extra logical slots in ascending order.
    pub fn extend_to(&self, n: usize) -> Result<Self> {
        if self.l2p.iter().any(|&p| p >= n) || self.l2p.len() > n {
            return Err(domain!("mapping does not fit in {n} physical qubits"));
        }
        let mut l2p = self.l2p.clone();
        let free: Vec<usize> = (0..n).filter(|p| !l2p.contains(p)).collect();
        l2p.extend(free);
        Ok(Self { l2p })
    }

    pub(crate) fn swap_physical(&mut self, p1: usize, p2: usize) {
        for p in self.l2p.iter_mut() {
            if *p == p1 {
                *p = p2;
            } else if *p == p2 {
                *p = p1;
            }
        }
    }

    /// Permutation taking each qubit's starting position under `self` to its
    /// position under `later`: `perm[self(l)] = later(l)`.
    pub fn transition_to(&self, later: &QubitMapping) -> Vec<usize> {
        let mut perm = vec![0; self.l2p.len()];
        for (l, &p) in self.l2p.iter().enumerate() {
            perm[p] = later.l2p[l];
        }
        perm
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid5_connectivity() {
        let t = DeviceTopology::grid5();
        assert!(t.is_edge(1, 0) && t.is_edge(4, 2) && t.is_edge(4, 1));
        assert!(!t.is_edge(0, 2));
        let d = t.distances();
        assert_eq!(d[0][2], 2);
        assert_eq!(d[0][4], 2);
        assert_eq!(d[0][3], usize::MAX);
    }

    #[test]
    fn json_round_trip() {
        let t = DeviceTopology::grid5();
        assert_eq!(DeviceTopology::from_json(&t.to_json()).unwrap(), t);
        assert!(DeviceTopology::from_json(r#"{"qubits": 2, "edges": [[0, 5]]}"#).is_err());
    }

    #[test]
    fn mapping_extension_and_transition() {
        let m = QubitMapping::new(vec![0, 1, 2, 4]).unwrap().extend_to(5).unwrap();
        assert_eq!(m.as_slice(), &[0, 1, 2, 4, 3]);
        let mut later = m.clone();
        later.swap_physical(0, 1);
        assert_eq!(m.transition_to(&later), vec![1, 0, 2, 3, 4]);
        assert!(QubitMapping::new(vec![1, 1]).is_err());
    }
}
