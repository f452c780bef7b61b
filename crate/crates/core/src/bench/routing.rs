//! Two five-qubit rings joined by one link, and greedy SWAP routing.

use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Gate, GateKind};
use crate::error::{MnqcError, Result};

const UNREACHABLE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeTopology {
    n_qubits: usize,
    local_edges: Vec<(usize, usize)>,
    link: Option<(usize, usize)>,
    dist: Vec<Vec<usize>>,
}

impl NodeTopology {
    /// Rings `0-1-2-3-4-0` and `5-6-7-8-9-5`, link `4-5`.
    pub fn two_rings() -> Self {
        Self::build(Some((4, 5)))
    }

    /// The same rings without the link (two isolated nodes).
    pub fn isolated_rings() -> Self {
        Self::build(None)
    }

    fn build(link: Option<(usize, usize)>) -> Self {
        let mut local_edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                local_edges.push((base + i, base + (i + 1) % 5));
            }
        }
        let mut t = Self {
            n_qubits: 10,
            local_edges,
            link,
            dist: Vec::new(),
        };
        t.dist = (0..t.n_qubits).map(|s| t.bfs(s)).collect();
        t
    }

    fn bfs(&self, src: usize) -> Vec<usize> {
        let mut d = vec![UNREACHABLE; self.n_qubits];
        d[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if d[v] == UNREACHABLE {
                    d[v] = d[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        d
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn link(&self) -> Option<(usize, usize)> {
        self.link
    }

    pub fn local_edges(&self) -> &[(usize, usize)] {
        &self.local_edges
    }

    pub fn node_of(&self, q: usize) -> usize {
        q / 5
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.local_edges.iter().copied().chain(self.link)
    }

    pub fn neighbors(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges().filter_map(move |(a, b)| {
            if a == q {
                Some(b)
            } else if b == q {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn is_link(&self, a: usize, b: usize) -> bool {
        self.link.is_some_and(|(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    /// Hop distance, `None` when disconnected.
    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        let d = self.dist[a][b];
        (d != UNREACHABLE).then_some(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub n_qubits: usize,
    pub depth: usize,
    pub n_1q: usize,
    /// Local two-qubit gates, in CX equivalents.
    pub n_2q: usize,
    /// Internode two-qubit gates, in CX equivalents.
    pub n_comm: usize,
    /// Occupied fraction of the `n_qubits x depth` gate slots.
    pub gate_density: f64,
}

impl CircuitStats {
    pub fn of(c: &Circuit) -> Self {
        let mut layer = vec![0usize; c.n_qubits];
        let (mut n_1q, mut n_2q, mut n_comm) = (0, 0, 0);
        for g in &c.gates {
            let start = g.qubits.iter().map(|&q| layer[q]).max().unwrap_or(0);
            for &q in &g.qubits {
                layer[q] = start + 1;
            }
            match (g.kind.arity(), g.internode) {
                (1, _) => n_1q += 1,
                (_, false) => n_2q += g.kind.cx_count().max(1),
                (_, true) => n_comm += g.kind.cx_count().max(1),
            }
        }
        let depth = layer.into_iter().max().unwrap_or(0);
        let slots = (c.n_qubits * depth).max(1) as f64;
        Self {
            n_qubits: c.n_qubits,
            depth,
            n_1q,
            n_2q,
            n_comm,
            gate_density: (n_1q + 2 * n_2q + 2 * n_comm) as f64 / slots,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoutedCircuit {
    /// Physical circuit on the topology's qubits.
    pub circuit: Circuit,
    pub stats: CircuitStats,
    /// Logical qubit -> physical qubit at the end of the circuit.
    pub final_layout: Vec<usize>,
}

impl RoutedCircuit {
    /// Expected readout translated to physical qubits.
    pub fn physical_readout(&self) -> Option<Vec<(usize, bool)>> {
        self.circuit
            .readout
            .as_ref()
            .map(|r| r.iter().map(|&(q, b)| (self.final_layout[q], b)).collect())
    }
}

/// Tie-breaking between equally short SWAP candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapPolicy {
    /// The link is an ordinary edge (closest to a cost-unaware transpiler).
    #[default]
    Neutral,
    /// Prefer local SWAPs over SWAPs across the link.
    AvoidLink,
}

/// [`route_with`] under [`SwapPolicy::Neutral`].
pub fn route(circuit: &Circuit, topo: &NodeTopology) -> Result<RoutedCircuit> {
    route_with(circuit, topo, SwapPolicy::Neutral)
}

/// Greedy SWAP insertion with one gate of lookahead, starting from the
/// trivial layout. The circuit is first lowered to {1q, CX, SU(4)}; SWAPs are
/// emitted as three CX and any two-qubit gate on the link is marked
/// internode.
pub fn route_with(circuit: &Circuit, topo: &NodeTopology, policy: SwapPolicy) -> Result<RoutedCircuit> {
    if circuit.n_qubits > topo.n_qubits() {
        return Err(MnqcError::Domain(format!(
            "{} logical qubits exceed the {}-qubit topology",
            circuit.n_qubits,
            topo.n_qubits()
        )));
    }
    let native = circuit.to_native();
    let mut l2p: Vec<usize> = (0..native.n_qubits).collect();
    let mut p2l: Vec<Option<usize>> = (0..topo.n_qubits())
        .map(|p| (p < native.n_qubits).then_some(p))
        .collect();
    let mut out = Circuit {
        n_qubits: topo.n_qubits(),
        gates: Vec::with_capacity(native.gates.len() * 2),
        ..native.clone()
    };
    let two_q: Vec<usize> = (0..native.gates.len())
        .filter(|&i| native.gates[i].kind.arity() == 2)
        .collect();
    let mut next2 = 0;

    let emit = |out: &mut Circuit, gate: &Gate, phys: Vec<usize>| {
        let internode = phys.len() == 2 && topo.is_link(phys[0], phys[1]);
        out.gates.push(Gate {
            kind: gate.kind.clone(),
            qubits: phys,
            duration: gate.duration,
            internode,
        });
    };

    for (i, gate) in native.gates.iter().enumerate() {
        if gate.kind.arity() == 1 {
            emit(&mut out, gate, vec![l2p[gate.qubits[0]]]);
            continue;
        }
        while two_q.get(next2).is_some_and(|&j| j <= i) {
            next2 += 1;
        }
        let (la, lb) = (gate.qubits[0], gate.qubits[1]);
        let lookahead = two_q.get(next2).map(|&j| &native.gates[j].qubits);
        loop {
            let (pa, pb) = (l2p[la], l2p[lb]);
            let d = topo.distance(pa, pb).ok_or(MnqcError::Unroutable(pa, pb))?;
            if d == 1 {
                break;
            }
            let mut best: Option<((usize, bool, usize), (usize, usize))> = None;
            for &end in &[pa, pb] {
                for nb in topo.neighbors(end) {
                    let moved = |p: usize| {
                        if p == end {
                            nb
                        } else if p == nb {
                            end
                        } else {
                            p
                        }
                    };
                    let d_new = topo.distance(moved(pa), moved(pb)).unwrap_or(UNREACHABLE);
                    let look = lookahead.map_or(0, |q| {
                        topo.distance(moved(l2p[q[0]]), moved(l2p[q[1]]))
                            .unwrap_or(UNREACHABLE)
                    });
                    let key = (d_new, policy == SwapPolicy::AvoidLink && topo.is_link(end, nb), look);
                    if best.as_ref().map_or(true, |(k, _)| key < *k) {
                        best = Some((key, (end, nb)));
                    }
                }
            }
            let (_, (x, y)) = best.ok_or(MnqcError::Unroutable(pa, pb))?;
            let internode = topo.is_link(x, y);
            for (c, t) in [(x, y), (y, x), (x, y)] {
                out.gates.push(Gate {
                    kind: GateKind::Cx,
                    qubits: vec![c, t],
                    duration: gate.duration,
                    internode,
                });
            }
            let (lx, ly) = (p2l[x], p2l[y]);
            p2l[x] = ly;
            p2l[y] = lx;
            if let Some(l) = lx {
                l2p[l] = y;
            }
            if let Some(l) = ly {
                l2p[l] = x;
            }
        }
        emit(&mut out, gate, vec![l2p[la], l2p[lb]]);
    }
    out.readout = native.readout.clone();
    let stats = CircuitStats::of(&out);
    Ok(RoutedCircuit {
        circuit: out,
        stats,
        final_layout: l2p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_distances() {
        let t = NodeTopology::two_rings();
        assert_eq!(t.distance(0, 2), Some(2));
        assert_eq!(t.distance(0, 4), Some(1));
        assert_eq!(t.distance(0, 7), Some(4));
        assert_eq!(t.edges().count(), 11);
        assert_eq!(NodeTopology::isolated_rings().distance(0, 7), None);
        assert!(t.is_link(5, 4));
    }

    #[test]
    fn isolated_nodes_cannot_route_across() {
        let mut c = Circuit::new(10, "t");
        c.g(GateKind::Cx, &[0, 9]);
        assert!(matches!(
            route(&c, &NodeTopology::isolated_rings()),
            Err(MnqcError::Unroutable(..))
        ));
    }
}
