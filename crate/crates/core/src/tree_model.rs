//! Trees, forests, the named families, and a canonical isomorphism code.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("malformed line {line}: {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("vertex {vertex} out of range for tree of order {order}")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("invalid family parameters: {0}")]
    InvalidParameters(String),
}

/// An undirected tree on vertices `0..n` stored as compressed adjacency
/// lists. Neighbor lists are sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Tree {
    /// The one-vertex tree.
    pub fn single_vertex() -> Self {
        Tree {
            offsets: vec![0, 0],
            neighbors: Vec::new(),
        }
    }

    /// Builds a tree on `n` vertices from an edge list, checking edge count,
    /// self-loops, parallel edges, and connectivity.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::NotATree("a tree needs at least one vertex".into()));
        }
        if edges.len() != n - 1 {
            return Err(TreeError::NotATree(format!(
                "{} edges on {} vertices (expected {})",
                edges.len(),
                n,
                n - 1
            )));
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(TreeError::VertexOutOfRange {
                    vertex: u.max(v),
                    order: n,
                });
            }
            if u == v {
                return Err(TreeError::NotATree(format!("self-loop at vertex {u}")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; 2 * (n - 1)];
        for &(u, v) in edges {
            neighbors[fill[u]] = v;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..n {
            let adj = &mut neighbors[offsets[v]..offsets[v + 1]];
            adj.sort_unstable();
            if adj.windows(2).any(|w| w[0] == w[1]) {
                return Err(TreeError::NotATree(format!("parallel edge at vertex {v}")));
            }
        }
        let tree = Tree { offsets, neighbors };
        if tree.reachable_from(0) != n {
            return Err(TreeError::NotATree("graph is disconnected".into()));
        }
        Ok(tree)
    }

    /// Decodes a Prüfer sequence over labels `0..seq.len() + 2`.
    pub fn from_prufer(seq: &[usize]) -> Self {
        let n = seq.len() + 2;
        let mut degree = vec![1usize; n];
        for &s in seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        // Smallest current leaf, tracked with a moving pointer.
        let mut ptr = degree.iter().position(|&d| d == 1).unwrap();
        let mut leaf = ptr;
        for &s in seq {
            edges.push((leaf, s));
            degree[s] -= 1;
            if degree[s] == 1 && s < ptr {
                leaf = s;
            } else {
                ptr += 1;
                while degree[ptr] != 1 {
                    ptr += 1;
                }
                leaf = ptr;
            }
        }
        edges.push((leaf, n - 1));
        Tree::from_edges(n, &edges).expect("Prüfer decoding always yields a tree")
    }

    /// A uniformly random labeled tree on `n` vertices.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        match n {
            0 | 1 => Tree::single_vertex(),
            2 => Tree::from_edges(2, &[(0, 1)]).unwrap(),
            _ => {
                let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
                Tree::from_prufer(&seq)
            }
        }
    }

    /// Builds the rooted tree encoded by a depth-first level sequence.
    /// Vertex `i` is the `i`-th entry of the sequence.
    pub fn from_level_sequence(levels: &[usize]) -> Self {
        let n = levels.len();
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        let mut stack: Vec<usize> = Vec::with_capacity(n);
        for (i, &level) in levels.iter().enumerate() {
            stack.truncate(level);
            if let Some(&parent) = stack.last() {
                edges.push((parent, i));
            }
            stack.push(i);
        }
        Tree::from_edges(n, &edges).expect("valid level sequence")
    }

    pub fn order(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Degree sequence sorted in non-increasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.order()).map(|v| self.degree(v)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    /// Edges `(u, v)` with `u < v`, in increasing order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.order())
            .flat_map(|u| {
                self.neighbors(u)
                    .iter()
                    .filter(move |&&v| u < v)
                    .map(move |&v| (u, v))
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    fn check_vertex(&self, v: usize) -> Result<(), TreeError> {
        if v < self.order() {
            Ok(())
        } else {
            Err(TreeError::VertexOutOfRange {
                vertex: v,
                order: self.order(),
            })
        }
    }

    fn reachable_from(&self, start: usize) -> usize {
        let mut seen = vec![false; self.order()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 0;
        while let Some(u) = queue.pop_front() {
            count += 1;
            for &w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        count
    }

    /// True when the structural invariants hold: `n - 1` edges, symmetric
    /// sorted adjacency without loops, and connectivity.
    pub fn is_valid(&self) -> bool {
        let n = self.order();
        if n == 0 || self.edge_count() != n - 1 || !self.neighbors.len().is_multiple_of(2) {
            return false;
        }
        for u in 0..n {
            let adj = self.neighbors(u);
            if adj.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            if adj.iter().any(|&w| w == u || w >= n || !self.is_adjacent(w, u)) {
                return false;
            }
        }
        self.reachable_from(0) == n
    }

    /// Parent array and BFS order of the tree rooted at `root`.
    /// `parent[root] == usize::MAX`.
    pub fn rooted_order(&self, root: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.order();
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in self.neighbors(u) {
                if w != parent[u] {
                    parent[w] = u;
                    order.push(w);
                }
            }
        }
        (parent, order)
    }

    /// Removes `v` and returns the remaining components, each re-indexed
    /// contiguously.
    pub fn delete_vertex(&self, v: usize) -> Result<Forest, TreeError> {
        self.check_vertex(v)?;
        let n = self.order();
        let mut relabel = vec![None; n];
        let mut components = Vec::with_capacity(self.degree(v));
        let mut offsets = Vec::with_capacity(self.degree(v));
        let mut next = 0;
        for &start in self.neighbors(v) {
            // BFS inside the component hanging off `start`.
            let mut members = vec![start];
            let mut parent = vec![(start, v)];
            let mut head = 0;
            while head < members.len() {
                let (u, p) = parent[head];
                head += 1;
                for &w in self.neighbors(u) {
                    if w != p {
                        members.push(w);
                        parent.push((w, u));
                    }
                }
            }
            let mut local = vec![usize::MAX; n];
            for (i, &m) in members.iter().enumerate() {
                local[m] = i;
                relabel[m] = Some(next + i);
            }
            let edges: Vec<(usize, usize)> = parent[1..]
                .iter()
                .map(|&(w, u)| (local[u], local[w]))
                .collect();
            components.push(Tree::from_edges(members.len(), &edges).expect("component is a tree"));
            offsets.push(next);
            next += members.len();
        }
        Ok(Forest {
            components,
            offsets,
            total: next,
            relabel,
        })
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tree")
            .field("n", &self.order())
            .field("edges", &self.edges())
            .finish()
    }
}

/// A vertex-deleted subgraph: components occupy consecutive index ranges
/// `offsets[i]..offsets[i] + components[i].order()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    pub components: Vec<Tree>,
    pub offsets: Vec<usize>,
    pub total: usize,
    /// Old vertex index to forest index; `None` for the deleted vertex.
    pub relabel: Vec<Option<usize>>,
}

impl Forest {
    pub fn empty() -> Self {
        Forest {
            components: Vec::new(),
            offsets: Vec::new(),
            total: 0,
            relabel: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Component orders, sorted ascending.
    pub fn component_orders(&self) -> Vec<usize> {
        let mut orders: Vec<usize> = self.components.iter().map(Tree::order).collect();
        orders.sort_unstable();
        orders
    }
}

/// A named tree family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// The path on `n` vertices.
    Path(usize),
    /// The star on `n` vertices, i.e. `K_{1,n-1}`.
    Star(usize),
    /// `K_{1,a+b}` with a pendant vertex attached to `b` of its leaves.
    Spider { a: usize, b: usize },
}

impl FamilySpec {
    pub fn order(&self) -> usize {
        match *self {
            FamilySpec::Path(n) | FamilySpec::Star(n) => n,
            FamilySpec::Spider { a, b } => a + 2 * b + 1,
        }
    }

    pub fn validate(&self) -> Result<(), TreeError> {
        match *self {
            FamilySpec::Path(0) | FamilySpec::Star(0) => {
                Err(TreeError::InvalidParameters("order must be at least 1".into()))
            }
            FamilySpec::Spider { a, b } if a == 0 || b == 0 => Err(TreeError::InvalidParameters(
                format!("spider needs a >= 1 and b >= 1, got a={a}, b={b}"),
            )),
            _ => Ok(()),
        }
    }

    /// Builds the tree. Stars and spiders have their center at vertex 0;
    /// spider vertices `1..=a` are the plain leaves, then each of the `b`
    /// spokes is followed by its pendant.
    pub fn build(&self) -> Result<Tree, TreeError> {
        self.validate()?;
        let n = self.order();
        let edges: Vec<(usize, usize)> = match *self {
            FamilySpec::Path(n) => (1..n).map(|i| (i - 1, i)).collect(),
            FamilySpec::Star(n) => (1..n).map(|i| (0, i)).collect(),
            FamilySpec::Spider { a, b } => {
                let mut e: Vec<(usize, usize)> = (1..=a).map(|i| (0, i)).collect();
                for j in 0..b {
                    let spoke = a + 1 + 2 * j;
                    e.push((0, spoke));
                    e.push((spoke, spoke + 1));
                }
                e
            }
        };
        Tree::from_edges(n, &edges)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Path(n) => write!(f, "path:{n}"),
            FamilySpec::Star(n) => write!(f, "star:{n}"),
            FamilySpec::Spider { a, b } => write!(f, "spider:{a},{b}"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TreeError::InvalidParameters(format!("cannot parse family {s:?}"));
        let (kind, params) = s.trim().split_once(':').ok_or_else(bad)?;
        let num = |p: &str| p.trim().parse::<usize>().map_err(|_| bad());
        let spec = match kind.trim() {
            "path" => FamilySpec::Path(num(params)?),
            "star" => FamilySpec::Star(num(params)?),
            "spider" => {
                let (a, b) = params.split_once(',').ok_or_else(bad)?;
                FamilySpec::Spider {
                    a: num(a)?,
                    b: num(b)?,
                }
            }
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses whitespace-separated `u v` edge lines. Blank lines and `#`
/// comments are skipped; an input with no edges is the single vertex.
pub fn parse_edge_list(text: &str) -> Result<Tree, TreeError> {
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = || TreeError::MalformedLine {
            line: idx + 1,
            content: raw.to_string(),
        };
        let mut fields = line.split_whitespace();
        let u = fields.next().and_then(|f| f.parse::<usize>().ok()).ok_or_else(malformed)?;
        let v = fields.next().and_then(|f| f.parse::<usize>().ok()).ok_or_else(malformed)?;
        if fields.next().is_some() {
            return Err(malformed());
        }
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Ok(Tree::single_vertex());
    }
    let n = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap() + 1;
    Tree::from_edges(n, &edges)
}

/// The one or two central vertices (those of minimum eccentricity).
pub fn centers(t: &Tree) -> Vec<usize> {
    let n = t.order();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = (0..n).map(|v| t.degree(v)).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &w in t.neighbors(leaf) {
                if degree[w] > 1 {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// AHU-style parenthesis code of `t` rooted at `root`: each vertex becomes
/// `(` followed by its children's codes in sorted order, then `)`.
fn rooted_code(t: &Tree, root: usize) -> Vec<u8> {
    let n = t.order();
    let (parent, order) = t.rooted_order(root);
    // Codes of finished vertices live in `arena[span[v].0..span[v].1]`.
    let mut arena: Vec<u8> = Vec::with_capacity(n * (n + 1));
    let mut span = vec![(0usize, 0usize); n];
    let mut child_spans: Vec<(usize, usize)> = Vec::new();
    for &v in order.iter().rev() {
        child_spans.clear();
        child_spans.extend(
            t.neighbors(v)
                .iter()
                .filter(|&&w| w != parent[v])
                .map(|&w| span[w]),
        );
        child_spans.sort_unstable_by(|x, y| arena[x.0..x.1].cmp(&arena[y.0..y.1]));
        let start = arena.len();
        arena.push(b'(');
        for &(s, e) in &child_spans {
            arena.extend_from_within(s..e);
        }
        arena.push(b')');
        span[v] = (start, arena.len());
    }
    let (s, e) = span[root];
    arena[s..e].to_vec()
}

/// Isomorphism-invariant byte code: the smallest center-rooted AHU code.
/// Two trees get the same code iff they are isomorphic.
pub fn canonical_code(t: &Tree) -> Vec<u8> {
    centers(t)
        .into_iter()
        .map(|c| rooted_code(t, c))
        .min()
        .expect("every tree has a center")
}
