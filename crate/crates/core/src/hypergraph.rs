//! Uniform weighted hypergraphs and partitions.
//!
//! Node ids are 0-based inside the library. The text formats in [`crate::io`]
//! speak 1-based ids and convert at the boundary.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A canonical hyperedge: strictly increasing node ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hyperedge(Box<[u32]>);

impl Hyperedge {
    pub fn nodes(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }
}

impl fmt::Display for Hyperedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Sorts `nodes` into canonical form, checking arity, range and distinctness.
pub fn canonical_edge(nodes: &[u32], n: usize, d: usize) -> Result<Hyperedge> {
    if nodes.len() != d {
        return Err(Error::BadEdgeSize {
            got: nodes.len(),
            expected: d,
        });
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    if let Some(&v) = sorted.iter().find(|&&v| v as usize >= n) {
        return Err(Error::NodeOutOfRange {
            id: u64::from(v),
            n,
        });
    }
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateNode(w[0]));
    }
    Ok(Hyperedge(sorted.into_boxed_slice()))
}

/// How an edge that is not stored should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Unlisted {
    /// Absent edges are observations with weight 0.
    #[default]
    Zero,
    /// Absent edges are erasures (censored models).
    Erased,
}

/// State of one edge as seen by a lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeState {
    Observed(f64),
    Erased,
}

/// A stored edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRef<'a> {
    pub nodes: &'a [u32],
    pub weight: f64,
    pub observed: bool,
}

/// A `d`-uniform hypergraph on `n` nodes with sparse edge weights in `[0, 1]`.
///
/// Stored edges are kept flattened and sorted lexicographically. Each stored
/// edge is either observed (with a weight) or an explicit erasure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHypergraph {
    n: usize,
    d: usize,
    unlisted: Unlisted,
    nodes: Vec<u32>,
    weights: Vec<f64>,
    observed: Vec<bool>,
}

impl WeightedHypergraph {
    /// Empty hypergraph.
    pub fn empty(n: usize, d: usize) -> Result<Self> {
        HypergraphBuilder::new(n, d)?.build()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn unlisted(&self) -> Unlisted {
        self.unlisted
    }

    /// Number of stored edges, erasures included.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    pub fn edge(&self, idx: usize) -> EdgeRef<'_> {
        EdgeRef {
            nodes: &self.nodes[idx * self.d..(idx + 1) * self.d],
            weight: self.weights[idx],
            observed: self.observed[idx],
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = EdgeRef<'_>> + '_ {
        (0..self.len()).map(move |i| self.edge(i))
    }

    fn find(&self, nodes: &[u32]) -> Option<usize> {
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.edge(mid).nodes.cmp(nodes) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Looks up a canonical edge, applying the unlisted-edge convention.
    pub fn state(&self, edge: &Hyperedge) -> EdgeState {
        match self.find(edge.nodes()) {
            Some(i) if self.observed[i] => EdgeState::Observed(self.weights[i]),
            Some(_) => EdgeState::Erased,
            None => match self.unlisted {
                Unlisted::Zero => EdgeState::Observed(0.0),
                Unlisted::Erased => EdgeState::Erased,
            },
        }
    }

    /// Weight of an edge with erasures read as 0.
    pub fn weight(&self, edge: &Hyperedge) -> f64 {
        match self.state(edge) {
            EdgeState::Observed(w) => w,
            EdgeState::Erased => 0.0,
        }
    }

    /// Splits stored edges into two hypergraphs according to `pred`
    /// (true goes left). Both children keep `n`, `d` and the unlisted
    /// convention.
    pub fn partition_edges<F>(&self, mut pred: F) -> (Self, Self)
    where
        F: FnMut(EdgeRef<'_>) -> bool,
    {
        let mut left = self.empty_like();
        let mut right = self.empty_like();
        for e in self.iter() {
            let dst = if pred(e) { &mut left } else { &mut right };
            dst.nodes.extend_from_slice(e.nodes);
            dst.weights.push(e.weight);
            dst.observed.push(e.observed);
        }
        (left, right)
    }

    fn empty_like(&self) -> Self {
        Self {
            n: self.n,
            d: self.d,
            unlisted: self.unlisted,
            nodes: Vec::new(),
            weights: Vec::new(),
            observed: Vec::new(),
        }
    }
}

/// Collects edges and validates them into a [`WeightedHypergraph`].
#[derive(Debug, Clone)]
pub struct HypergraphBuilder {
    inner: WeightedHypergraph,
}

impl HypergraphBuilder {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!(
                "edge size d = {d} must be at least 2"
            )));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidParams(format!("n = {n} too large")));
        }
        Ok(Self {
            inner: WeightedHypergraph {
                n,
                d,
                unlisted: Unlisted::Zero,
                nodes: Vec::new(),
                weights: Vec::new(),
                observed: Vec::new(),
            },
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn d(&self) -> usize {
        self.inner.d
    }

    pub fn unlisted(mut self, unlisted: Unlisted) -> Self {
        self.inner.unlisted = unlisted;
        self
    }

    pub fn reserve(&mut self, edges: usize) {
        self.inner.nodes.reserve(edges * self.inner.d);
        self.inner.weights.reserve(edges);
        self.inner.observed.reserve(edges);
    }

    /// Adds an observed edge from arbitrary node order.
    pub fn add(&mut self, nodes: &[u32], weight: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::WeightOutOfRange(weight));
        }
        let e = canonical_edge(nodes, self.inner.n, self.inner.d)?;
        self.push_canonical(e.nodes(), weight, true);
        Ok(())
    }

    /// Adds an explicit erasure.
    pub fn add_erased(&mut self, nodes: &[u32]) -> Result<()> {
        let e = canonical_edge(nodes, self.inner.n, self.inner.d)?;
        self.push_canonical(e.nodes(), 0.0, false);
        Ok(())
    }

    /// Adds an edge the caller guarantees is canonical, in range, and has a
    /// weight in `[0, 1]`. Used by the samplers on their hot paths.
    pub(crate) fn push_canonical(&mut self, nodes: &[u32], weight: f64, observed: bool) {
        debug_assert_eq!(nodes.len(), self.inner.d);
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        debug_assert!((0.0..=1.0).contains(&weight));
        self.inner.nodes.extend_from_slice(nodes);
        self.inner.weights.push(weight);
        self.inner.observed.push(observed);
    }

    /// Sorts the edges and rejects duplicates.
    pub fn build(self) -> Result<WeightedHypergraph> {
        let mut g = self.inner;
        let d = g.d;
        let m = g.weights.len();
        let sorted = (1..m).all(|i| g.nodes[(i - 1) * d..i * d] < g.nodes[i * d..(i + 1) * d]);
        if !sorted {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_unstable_by(|&a, &b| {
                g.nodes[a * d..(a + 1) * d].cmp(&g.nodes[b * d..(b + 1) * d])
            });
            if let Some(w) = order
                .windows(2)
                .find(|w| g.nodes[w[0] * d..(w[0] + 1) * d] == g.nodes[w[1] * d..(w[1] + 1) * d])
            {
                let dup = Hyperedge(g.nodes[w[0] * d..(w[0] + 1) * d].into());
                return Err(Error::InvalidParams(format!("duplicate edge {dup}")));
            }
            let mut nodes = Vec::with_capacity(m * d);
            for &i in &order {
                nodes.extend_from_slice(&g.nodes[i * d..(i + 1) * d]);
            }
            g.weights = order.iter().map(|&i| g.weights[i]).collect();
            g.observed = order.iter().map(|&i| g.observed[i]).collect();
            g.nodes = nodes;
        }
        Ok(g)
    }
}

/// A labelling of `n` nodes with groups `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<u32>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<u32>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPartition("k must be positive".into()));
        }
        if let Some(&l) = labels.iter().find(|&&l| l as usize >= k) {
            return Err(Error::InvalidPartition(format!(
                "label {l} not below k = {k}"
            )));
        }
        Ok(Self { labels, k })
    }

    /// Contiguous blocks: the first `sizes[0]` nodes get label 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(j, &s)| std::iter::repeat_n(j as u32, s))
            .collect();
        Self::new(labels, sizes.len())
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l as usize] += 1;
        }
        s
    }

    /// Same partition viewed with a larger label range.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.labels.clone(), k)
    }

    /// Applies `perm` to every label.
    pub fn relabel(&self, perm: &[u32]) -> Result<Self> {
        if perm.len() != self.k {
            return Err(Error::ShapeMismatch(format!(
                "permutation of length {} for k = {}",
                perm.len(),
                self.k
            )));
        }
        Self::new(
            self.labels.iter().map(|&l| perm[l as usize]).collect(),
            self.k,
        )
    }
}
