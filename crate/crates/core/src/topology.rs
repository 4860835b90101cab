//! Fiber topology, k-shortest candidate paths and distance-adaptive modulation.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("link {0} has non-positive length")]
    BadLength(usize),
    #[error("link {0} is a self loop")]
    SelfLoop(usize),
    #[error("link {link} references unknown node {node}")]
    UnknownEndpoint { link: usize, node: usize },
    #[error("topology is not connected")]
    Disconnected,
    #[error("topology has no links")]
    Empty,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("no modulation format reaches {0} km")]
    Unreachable(f64),
    #[error("invalid reach table: {0}")]
    BadReachTable(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bidirectional fiber link.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: LinkId,
    pub a: NodeId,
    pub b: NodeId,
    pub length_km: f64,
}

#[derive(Debug, Clone)]
pub struct Topology {
    names: Vec<String>,
    links: Vec<Link>,
    adjacency: Vec<Vec<(NodeId, LinkId)>>,
}

impl Topology {
    /// Builds a topology from node names and `(a, b, length_km)` triples.
    /// Link ids are assigned in input order.
    pub fn new(
        names: Vec<String>,
        edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
    ) -> Result<Self, TopologyError> {
        let mut links = Vec::new();
        let mut adjacency = vec![Vec::new(); names.len()];
        for (idx, (a, b, length_km)) in edges.into_iter().enumerate() {
            for n in [a, b] {
                if n.0 >= names.len() {
                    return Err(TopologyError::UnknownEndpoint { link: idx, node: n.0 });
                }
            }
            if a == b {
                return Err(TopologyError::SelfLoop(idx));
            }
            if !(length_km > 0.0) || !length_km.is_finite() {
                return Err(TopologyError::BadLength(idx));
            }
            let id = LinkId(idx);
            adjacency[a.0].push((b, id));
            adjacency[b.0].push((a, id));
            links.push(Link { id, a, b, length_km });
        }
        if links.is_empty() {
            return Err(TopologyError::Empty);
        }
        let topo = Topology { names, links, adjacency };
        if !topo.is_connected() {
            return Err(TopologyError::Disconnected);
        }
        Ok(topo)
    }

    /// Parses the `node_a,node_b,length_km` link table. Node indices follow
    /// first appearance.
    pub fn from_csv_str(text: &str) -> Result<Self, TopologyError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| TopologyError::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        if headers.iter().collect::<Vec<_>>() != ["node_a", "node_b", "length_km"] {
            return Err(TopologyError::Parse {
                line: 1,
                msg: "expected header `node_a,node_b,length_km`".into(),
            });
        }
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, NodeId> = HashMap::new();
        let mut edges = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| TopologyError::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                msg: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.len() != 3 {
                return Err(TopologyError::Parse { line, msg: "expected 3 fields".into() });
            }
            let mut node = |name: &str| {
                *index.entry(name.to_string()).or_insert_with(|| {
                    names.push(name.to_string());
                    NodeId(names.len() - 1)
                })
            };
            let a = node(&record[0]);
            let b = node(&record[1]);
            let length: f64 = record[2].parse().map_err(|_| TopologyError::Parse {
                line,
                msg: format!("bad length `{}`", &record[2]),
            })?;
            edges.push((a, b, length));
        }
        Topology::new(names, edges)
    }

    pub fn load(path: &Path) -> Result<Self, TopologyError> {
        let text = std::fs::read_to_string(path).map_err(|source| TopologyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_str(&text)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.0]
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n.0]
    }

    pub fn node(&self, name: &str) -> Result<NodeId, TopologyError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(NodeId)
            .ok_or_else(|| TopologyError::UnknownNode(name.to_string()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.names.len()).map(NodeId)
    }

    pub fn neighbors(&self, n: NodeId) -> &[(NodeId, LinkId)] {
        &self.adjacency[n.0]
    }

    /// Sum of link lengths, accumulated in path order.
    pub fn path_length(&self, links: &[LinkId]) -> f64 {
        links.iter().map(|l| self.links[l.0].length_km).sum()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.names.len()];
        let mut stack = vec![NodeId(0)];
        seen[0] = true;
        while let Some(n) = stack.pop() {
            for &(m, _) in &self.adjacency[n.0] {
                if !seen[m.0] {
                    seen[m.0] = true;
                    stack.push(m);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// A loop-free route through the topology.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
    pub length_km: f64,
}

impl Route {
    fn order(&self, other: &Route) -> Ordering {
        self.length_km
            .total_cmp(&other.length_km)
            .then_with(|| self.nodes.cmp(&other.nodes))
            .then_with(|| self.links.cmp(&other.links))
    }
}

struct Ranked(Route);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.0.order(&other.0) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.order(&other.0)
    }
}

/// Shortest path under the (length, node sequence, link sequence) order,
/// avoiding banned nodes and links.
fn shortest_route(
    topo: &Topology,
    src: NodeId,
    dst: NodeId,
    banned_nodes: &[bool],
    banned_links: &[bool],
) -> Option<Route> {
    let n = topo.node_count();
    let mut best: Vec<Option<Route>> = vec![None; n];
    let mut settled = vec![false; n];
    best[src.0] = Some(Route { nodes: vec![src], links: vec![], length_km: 0.0 });
    loop {
        let current = (0..n)
            .filter(|&v| !settled[v] && best[v].is_some())
            .min_by(|&x, &y| best[x].as_ref().unwrap().order(best[y].as_ref().unwrap()))?;
        settled[current] = true;
        if current == dst.0 {
            return best[current].take();
        }
        let label = best[current].clone().unwrap();
        for &(next, link) in topo.neighbors(NodeId(current)) {
            if settled[next.0] || banned_nodes[next.0] || banned_links[link.0] {
                continue;
            }
            let mut links = label.links.clone();
            links.push(link);
            let mut nodes = label.nodes.clone();
            nodes.push(next);
            let candidate = Route { length_km: topo.path_length(&links), nodes, links };
            let better = match &best[next.0] {
                None => true,
                Some(existing) => candidate.order(existing) == Ordering::Less,
            };
            if better {
                best[next.0] = Some(candidate);
            }
        }
    }
}

/// Yen's k loop-free shortest paths, ascending by length with ties broken by
/// node-id sequence. Returns an empty list when `dst` is unreachable.
pub fn yen_k_shortest(topo: &Topology, src: NodeId, dst: NodeId, k: usize) -> Vec<Route> {
    let n = topo.node_count();
    if k == 0 || src == dst || src.0 >= n || dst.0 >= n {
        return Vec::new();
    }
    let no_nodes = vec![false; n];
    let no_links = vec![false; topo.link_count()];
    let Some(first) = shortest_route(topo, src, dst, &no_nodes, &no_links) else {
        return Vec::new();
    };
    let mut accepted = vec![first];
    let mut pending: BTreeSet<Ranked> = BTreeSet::new();

    while accepted.len() < k {
        let last = accepted.last().unwrap().clone();
        for i in 0..last.links.len() {
            let spur = last.nodes[i];
            let root_nodes = &last.nodes[..=i];
            let root_links = &last.links[..i];

            let mut banned_links = vec![false; topo.link_count()];
            for p in &accepted {
                if p.nodes.len() > i && &p.nodes[..=i] == root_nodes && &p.links[..i] == root_links {
                    banned_links[p.links[i].0] = true;
                }
            }
            let mut banned_nodes = vec![false; n];
            for node in &root_nodes[..i] {
                banned_nodes[node.0] = true;
            }

            if let Some(spur_route) = shortest_route(topo, spur, dst, &banned_nodes, &banned_links) {
                let mut nodes = root_nodes.to_vec();
                nodes.extend_from_slice(&spur_route.nodes[1..]);
                let mut links = root_links.to_vec();
                links.extend_from_slice(&spur_route.links);
                let route = Route { length_km: topo.path_length(&links), nodes, links };
                if !accepted.iter().any(|a| a.links == route.links) {
                    pending.insert(Ranked(route));
                }
            }
        }
        match pending.pop_first() {
            Some(Ranked(route)) => accepted.push(route),
            None => break,
        }
    }
    accepted
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationFormat {
    pub name: String,
    pub bits_per_symbol: u32,
    pub max_reach_km: f64,
}

impl ModulationFormat {
    pub fn new(name: &str, bits_per_symbol: u32, max_reach_km: f64) -> Self {
        ModulationFormat { name: name.to_string(), bits_per_symbol, max_reach_km }
    }
}

/// Modulation formats ordered from highest to lowest spectral efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ModulationFormat>", into = "Vec<ModulationFormat>")]
pub struct ReachTable(Vec<ModulationFormat>);

impl ReachTable {
    pub fn new(mut formats: Vec<ModulationFormat>) -> Result<Self, TopologyError> {
        if formats.is_empty() {
            return Err(TopologyError::BadReachTable("empty".into()));
        }
        formats.sort_by_key(|f| std::cmp::Reverse(f.bits_per_symbol));
        for pair in formats.windows(2) {
            if pair[0].bits_per_symbol == pair[1].bits_per_symbol {
                return Err(TopologyError::BadReachTable(format!(
                    "duplicate bits per symbol {}",
                    pair[0].bits_per_symbol
                )));
            }
            if pair[0].max_reach_km >= pair[1].max_reach_km {
                return Err(TopologyError::BadReachTable(format!(
                    "reach of {} must be below reach of {}",
                    pair[0].name, pair[1].name
                )));
            }
        }
        if formats.iter().any(|f| f.bits_per_symbol == 0 || !(f.max_reach_km > 0.0)) {
            return Err(TopologyError::BadReachTable("non-positive entry".into()));
        }
        Ok(ReachTable(formats))
    }

    pub fn formats(&self) -> &[ModulationFormat] {
        &self.0
    }
}

impl Default for ReachTable {
    fn default() -> Self {
        ReachTable(vec![
            ModulationFormat::new("16QAM", 4, 500.0),
            ModulationFormat::new("8QAM", 3, 1000.0),
            ModulationFormat::new("QPSK", 2, 2000.0),
            ModulationFormat::new("BPSK", 1, 4000.0),
        ])
    }
}

impl TryFrom<Vec<ModulationFormat>> for ReachTable {
    type Error = TopologyError;
    fn try_from(v: Vec<ModulationFormat>) -> Result<Self, Self::Error> {
        ReachTable::new(v)
    }
}

impl From<ReachTable> for Vec<ModulationFormat> {
    fn from(t: ReachTable) -> Self {
        t.0
    }
}

/// First format (in table order) whose reach covers `path_length_km`.
pub fn assign_modulation(
    path_length_km: f64,
    table: &[ModulationFormat],
) -> Result<&ModulationFormat, TopologyError> {
    table
        .iter()
        .find(|f| f.max_reach_km >= path_length_km)
        .ok_or(TopologyError::Unreachable(path_length_km))
}

/// Number of frequency slots needed to carry `bitrate_gbps`.
pub fn fs_required(bitrate_gbps: f64, baud_gbaud: f64, modulation: &ModulationFormat) -> u32 {
    debug_assert!(bitrate_gbps >= 0.0 && baud_gbaud > 0.0);
    let per_slot = baud_gbaud * f64::from(modulation.bits_per_symbol);
    (bitrate_gbps / per_slot).ceil().max(0.0) as u32
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePath {
    pub index: usize,
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
    pub length_km: f64,
    pub modulation: ModulationFormat,
}

impl CandidatePath {
    pub fn uses(&self, link: LinkId) -> bool {
        self.links.contains(&link)
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }

    /// Gbps carried per slot on this path.
    pub fn slot_capacity(&self, baud_gbaud: f64) -> f64 {
        baud_gbaud * f64::from(self.modulation.bits_per_symbol)
    }
}

/// Up to `k` candidate paths; routes no format can reach are dropped and the
/// survivors re-indexed from 0.
pub fn candidate_paths(
    topo: &Topology,
    src: NodeId,
    dst: NodeId,
    k: usize,
    reach: &ReachTable,
) -> Vec<CandidatePath> {
    yen_k_shortest(topo, src, dst, k)
        .into_iter()
        .filter_map(|r| {
            let modulation = assign_modulation(r.length_km, reach.formats()).ok()?.clone();
            Some((r, modulation))
        })
        .enumerate()
        .map(|(index, (r, modulation))| CandidatePath {
            index,
            nodes: r.nodes,
            links: r.links,
            length_km: r.length_km,
            modulation,
        })
        .collect()
}
