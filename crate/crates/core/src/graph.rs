//! Directed acyclic graphs: construction, ancestry queries, d-separation,
//! and intervention surgery.
//!
//! Vertices are dense indices `0..n`; labels are display-only. All values are
//! immutable after construction, so they can be shared freely across threads.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// A set of vertex indices, stored sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    members: Vec<usize>,
}

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(v: usize) -> Self {
        Self { members: vec![v] }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn insert(&mut self, v: usize) {
        if let Err(pos) = self.members.binary_search(&v) {
            self.members.insert(pos, v);
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::new(self.iter().filter(|&v| other.contains(v)))
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self::new(self.iter().filter(|&v| !other.contains(v)))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self::new(iter)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A validated DAG: per-vertex parent sets plus display labels.
///
/// The edge relation is `j -> i` iff `j` is a parent of `i`. Construction
/// rejects self-loops and cycles and caches a topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    labels: Vec<String>,
    topo: Vec<usize>,
}

impl Dag {
    /// Validates parent sets and builds the graph. Labels default to
    /// `X1..Xn`.
    pub fn new(parents: Vec<Vec<usize>>) -> Result<Self> {
        let labels = (1..=parents.len()).map(|i| format!("X{i}")).collect();
        Self::with_labels(parents, labels)
    }

    pub fn with_labels(parents: Vec<Vec<usize>>, labels: Vec<String>) -> Result<Self> {
        let n = parents.len();
        if labels.len() != n {
            return Err(Error::ScopeMismatch {
                reason: format!("{} labels for {} vertices", labels.len(), n),
            });
        }
        let mut parents: Vec<Vec<usize>> = parents;
        for (i, ps) in parents.iter_mut().enumerate() {
            ps.sort_unstable();
            ps.dedup();
            for &p in ps.iter() {
                if p >= n {
                    return Err(Error::IndexOutOfRange { index: p, n });
                }
                if p == i {
                    return Err(Error::SelfParent { vertex: i });
                }
            }
        }
        let mut children = vec![Vec::new(); n];
        for (i, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(i);
            }
        }
        for cs in &mut children {
            cs.sort_unstable();
        }
        let topo = topological_order(&parents, &children)?;
        Ok(Self {
            parents,
            children,
            labels,
            topo,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// A topological order fixed at construction (lowest index first among
    /// ready vertices).
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// True when the declared index order is itself causal, i.e. every parent
    /// set satisfies `parents(i) ⊆ {0..i}`.
    pub fn is_causal_order(&self) -> bool {
        self.parents
            .iter()
            .enumerate()
            .all(|(i, ps)| ps.iter().all(|&p| p < i))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count() {
            return Err(Error::IndexOutOfRange {
                index: v,
                n: self.vertex_count(),
            });
        }
        Ok(())
    }

    fn check_set(&self, s: &VertexSet) -> Result<()> {
        for v in s.iter() {
            self.check_vertex(v)?;
        }
        Ok(())
    }

    fn reach(&self, s: &VertexSet, step: impl Fn(usize) -> Vec<usize>) -> VertexSet {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue: VecDeque<usize> = s.iter().collect();
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            for w in step(v) {
                if !seen[w] {
                    seen[w] = true;
                    out.push(w);
                    queue.push_back(w);
                }
            }
        }
        VertexSet::new(out)
    }

    /// Descendants `Δ_S`: vertices reachable from `S` by a directed path of
    /// length at least one. A member of `S` appears only if another member
    /// reaches it.
    pub fn descendants_of(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_set(s)?;
        Ok(self.reach(s, |v| self.children[v].clone()))
    }

    /// Ancestors `A_S`, the dual of [`Dag::descendants_of`].
    pub fn ancestors_of(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_set(s)?;
        Ok(self.reach(s, |v| self.parents[v].clone()))
    }

    /// Nondescendants `N_S = [n] \ (Δ_S ∪ S)`.
    pub fn nondescendants_of(&self, s: &VertexSet) -> Result<VertexSet> {
        let desc = self.descendants_of(s)?;
        Ok((0..self.vertex_count())
            .filter(|&v| !desc.contains(v) && !s.contains(v))
            .collect())
    }

    /// Parent set of a vertex set: `Π_S = (⋃_{i∈S} Π_i) \ S`.
    ///
    /// Members of `S` are excluded even when one member is a parent of
    /// another; identities that quantify over interventions on `Π_S` hold in
    /// general only when `S ∩ A_{Π_S} = ∅` (see the crate docs on the
    /// parent-intervention identity).
    pub fn parents_of_set(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_set(s)?;
        Ok(s.iter()
            .flat_map(|v| self.parents[v].iter().copied())
            .filter(|&p| !s.contains(p))
            .collect())
    }

    /// d-separation of `a` from `b` given `z`, by the reachability
    /// ("Bayes-ball") formulation.
    pub fn d_separated(&self, a: &VertexSet, b: &VertexSet, z: &VertexSet) -> Result<bool> {
        self.check_set(a)?;
        self.check_set(b)?;
        self.check_set(z)?;
        if !a.is_disjoint(b) || !a.is_disjoint(z) || !b.is_disjoint(z) {
            return Err(Error::SetsNotDisjoint);
        }
        let n = self.vertex_count();
        let mut z_or_anc = vec![false; n];
        for v in z.iter().chain(self.ancestors_of(z)?.iter()) {
            z_or_anc[v] = true;
        }

        // Trail states: (vertex, entered-from-child?). A source vertex starts
        // as if entered from a child, which permits every move.
        const FROM_CHILD: usize = 0;
        const FROM_PARENT: usize = 1;
        let mut visited = vec![[false; 2]; n];
        let mut queue: VecDeque<(usize, usize)> = a.iter().map(|v| (v, FROM_CHILD)).collect();
        while let Some((v, dir)) = queue.pop_front() {
            if visited[v][dir] {
                continue;
            }
            visited[v][dir] = true;
            if !z.contains(v) && b.contains(v) {
                return Ok(false);
            }
            if dir == FROM_CHILD && !z.contains(v) {
                for &p in &self.parents[v] {
                    queue.push_back((p, FROM_CHILD));
                }
                for &c in &self.children[v] {
                    queue.push_back((c, FROM_PARENT));
                }
            } else if dir == FROM_PARENT {
                if !z.contains(v) {
                    for &c in &self.children[v] {
                        queue.push_back((c, FROM_PARENT));
                    }
                }
                if z_or_anc[v] {
                    // Collider at v is open: v is in z or has a descendant there.
                    for &p in &self.parents[v] {
                        queue.push_back((p, FROM_CHILD));
                    }
                }
            }
        }
        Ok(true)
    }

    /// Intervention surgery: removes every edge into a member of `s`, leaving
    /// the rest of the graph untouched.
    pub fn surgery(&self, s: &VertexSet) -> Result<Dag> {
        self.check_set(s)?;
        let parents = (0..self.vertex_count())
            .map(|v| {
                if s.contains(v) {
                    Vec::new()
                } else {
                    self.parents[v].clone()
                }
            })
            .collect();
        Dag::with_labels(parents, self.labels.clone())
    }

    /// Removes every edge out of a member of `s`; the graph used by the
    /// graphical back-door check.
    pub fn remove_outgoing(&self, s: &VertexSet) -> Result<Dag> {
        self.check_set(s)?;
        let parents = (0..self.vertex_count())
            .map(|v| {
                self.parents[v]
                    .iter()
                    .copied()
                    .filter(|&p| !s.contains(p))
                    .collect()
            })
            .collect();
        Dag::with_labels(parents, self.labels.clone())
    }

    /// Renders the graph as a Graphviz digraph, deterministically (vertices
    /// and edges ordered by index, LF line endings).
    ///
    /// Intervened vertices are drawn boxed with their incoming edges removed
    /// and an extra assignment node attached, mirroring how surgered models
    /// are usually diagrammed. `assigned_labels[v]` supplies the assignment
    /// text for intervened vertices and is ignored elsewhere.
    pub fn to_dot(&self, intervened: &VertexSet, assigned_labels: &[String]) -> Result<String> {
        self.check_set(intervened)?;
        let mut out = String::from("digraph model {\n  rankdir=LR;\n");
        for v in 0..self.vertex_count() {
            if intervened.contains(v) {
                out.push_str(&format!(
                    "  v{v} [label=\"{}\", shape=box];\n",
                    self.labels[v]
                ));
                let text = assigned_labels.get(v).map(String::as_str).unwrap_or("?");
                out.push_str(&format!("  a{v} [label=\"{text}\", shape=none];\n"));
            } else {
                out.push_str(&format!("  v{v} [label=\"{}\"];\n", self.labels[v]));
            }
        }
        for v in 0..self.vertex_count() {
            if intervened.contains(v) {
                out.push_str(&format!("  a{v} -> v{v} [label=\"=\"];\n"));
            } else {
                for &p in &self.parents[v] {
                    out.push_str(&format!("  v{p} -> v{v};\n"));
                }
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

/// Kahn's algorithm with a lowest-index-first tie break; on failure, reports
/// one cycle found by walking unprocessed vertices.
fn topological_order(parents: &[Vec<usize>], children: &[Vec<usize>]) -> Result<Vec<usize>> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    while let Some(next) = (0..n).find(|&v| !done[v] && indegree[v] == 0) {
        done[next] = true;
        order.push(next);
        for &c in &children[next] {
            indegree[c] -= 1;
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Walk parent links among the leftover vertices until one repeats.
    let start = (0..n).find(|&v| !done[v]).expect("cycle vertex");
    let mut path = vec![start];
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut cur = start;
    loop {
        let &next = parents[cur]
            .iter()
            .find(|&&p| !done[p])
            .expect("vertex on a cycle has an unprocessed parent");
        if seen[next] {
            let pos = path.iter().position(|&v| v == next).unwrap();
            let mut cycle: Vec<usize> = path[pos..].to_vec();
            cycle.reverse();
            return Err(Error::CycleDetected { cycle });
        }
        seen[next] = true;
        path.push(next);
        cur = next;
    }
}
