//! Realization of a target graph and enumeration of connected complete complexes.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{canonical_form, CanonicalForm, Multigraph};
use crate::pot::{EdgeLabel, LabeledAssembly, Pot, PotIndex};
use crate::spectrum::for_each_usage;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Node-expansion limit for exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: DEFAULT_BUDGET,
        }
    }
}

impl SearchBudget {
    pub fn new(max_nodes: u64) -> Self {
        SearchBudget { max_nodes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Exceeded;

#[derive(Debug)]
pub(crate) struct Counter {
    pub used: u64,
    pub limit: u64,
}

impl Counter {
    pub fn new(budget: SearchBudget) -> Self {
        Counter {
            used: 0,
            limit: budget.max_nodes,
        }
    }

    pub fn tick(&mut self) -> Result<(), Exceeded> {
        self.used += 1;
        if self.used > self.limit {
            Err(Exceeded)
        } else {
            Ok(())
        }
    }
}

/// A realizable graph together with one labelled assembly of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub graph: Multigraph,
    pub witness: LabeledAssembly,
}

/// Connected complete complexes by order, pairwise non-isomorphic within an order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComplexCatalog {
    pub by_order: BTreeMap<usize, Vec<CatalogEntry>>,
}

impl ComplexCatalog {
    pub fn len(&self) -> usize {
        self.by_order.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn smallest(&self) -> Option<(usize, &CatalogEntry)> {
        self.by_order
            .iter()
            .find_map(|(&n, es)| es.first().map(|e| (n, e)))
    }

    /// `[{"order": N, "graph": …, "witness": …}, …]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.by_order
                .iter()
                .flat_map(|(&n, es)| {
                    es.iter().map(move |e| {
                        serde_json::json!({ "order": n, "graph": e.graph, "witness": e.witness })
                    })
                })
                .collect(),
        )
    }
}

#[derive(Debug, Error)]
#[error("search budget of {limit} nodes exceeded")]
pub struct BudgetExceeded {
    pub limit: u64,
    pub explored: u64,
    pub partial: ComplexCatalog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct RawEdge {
    pub u: usize,
    pub v: usize,
    pub bond: usize,
    pub unhatted: usize,
}

pub(crate) fn raw_assembly(pot: &Pot, tiles: &[usize], edges: &[RawEdge]) -> LabeledAssembly {
    let labelled = edges
        .iter()
        .map(|e| {
            (
                (e.u, e.v),
                EdgeLabel {
                    bond_type: pot.bond_types()[e.bond].clone(),
                    unhatted_end: e.unhatted,
                },
            )
        })
        .collect();
    LabeledAssembly::from_parts(tiles.len(), tiles.to_vec(), labelled).expect("vertices in range")
}

/// Partial complex grown one bond at a time from a seed tile.
pub(crate) struct Grower<'a> {
    idx: &'a PotIndex,
    usage: Vec<u64>,
    used: Vec<u64>,
    pub tiles: Vec<usize>,
    open: Vec<Vec<u32>>,
    open_total: Vec<u32>,
    pub edges: Vec<RawEdge>,
}

impl<'a> Grower<'a> {
    fn new(idx: &'a PotIndex, usage: &[u64]) -> Self {
        Grower {
            idx,
            usage: usage.to_vec(),
            used: vec![0; usage.len()],
            tiles: Vec::new(),
            open: Vec::new(),
            open_total: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn add_vertex(&mut self, j: usize) -> usize {
        let mut arms = vec![0u32; 2 * self.idx.bonds];
        for &(l, c) in &self.idx.arms[j] {
            arms[l] = c;
        }
        self.tiles.push(j);
        self.open.push(arms);
        self.open_total.push(self.idx.degree[j] as u32);
        self.used[j] += 1;
        self.tiles.len() - 1
    }

    fn pop_vertex(&mut self) {
        let j = self.tiles.pop().expect("vertex to pop");
        self.open.pop();
        self.open_total.pop();
        self.used[j] -= 1;
    }

    fn take(&mut self, v: usize, l: usize) {
        self.open[v][l] -= 1;
        self.open_total[v] -= 1;
    }

    fn give(&mut self, v: usize, l: usize) {
        self.open[v][l] += 1;
        self.open_total[v] += 1;
    }

    fn neighbours(&self, x: usize) -> Option<Vec<(usize, usize, bool)>> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.u == x && e.v == x {
                return None;
            }
            if e.u == x {
                out.push((e.v, e.bond, e.unhatted == x));
            } else if e.v == x {
                out.push((e.u, e.bond, e.unhatted == x));
            }
        }
        out.sort_unstable();
        Some(out)
    }

    /// Swapping `x` and `w` maps the partial complex onto itself.
    fn twins(&self, x: usize, w: usize) -> bool {
        if self.tiles[x] != self.tiles[w] || self.open[x] != self.open[w] {
            return false;
        }
        match (self.neighbours(x), self.neighbours(w)) {
            (Some(a), Some(b)) => a == b && !a.iter().any(|n| n.0 == w),
            _ => false,
        }
    }

    fn edge(&self, v: usize, w: usize, l: usize) -> RawEdge {
        RawEdge {
            u: v.min(w),
            v: v.max(w),
            bond: l / 2,
            unhatted: if l % 2 == 0 { v } else { w },
        }
    }

    fn grow(
        &mut self,
        counter: &mut Counter,
        visit: &mut dyn FnMut(&Grower) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>, Exceeded> {
        counter.tick()?;
        let n = self.tiles.len();
        let Some(v) = (0..n).find(|&v| self.open_total[v] > 0) else {
            // Closing before the usage vector is spent gives a smaller complex,
            // which is found under its own usage vector.
            return Ok(if self.used == self.usage {
                visit(self)
            } else {
                ControlFlow::Continue(())
            });
        };
        let l = self.open[v].iter().position(|&c| c > 0).expect("open arm");
        let c = l ^ 1;
        self.take(v, l);
        let mut tried: Vec<usize> = Vec::new();
        for w in 0..n {
            if self.open[w][c] == 0 {
                continue;
            }
            if w != v && tried.iter().any(|&x| x != v && self.twins(x, w)) {
                continue;
            }
            tried.push(w);
            self.take(w, c);
            self.edges.push(self.edge(v, w, l));
            let r = self.grow(counter, visit);
            self.edges.pop();
            self.give(w, c);
            match r {
                Ok(ControlFlow::Continue(())) => {}
                other => {
                    self.give(v, l);
                    return other;
                }
            }
        }
        for j in 0..self.usage.len() {
            if self.used[j] >= self.usage[j] || !self.idx.arms[j].iter().any(|&(a, _)| a == c) {
                continue;
            }
            let w = self.add_vertex(j);
            self.take(w, c);
            self.edges.push(self.edge(v, w, l));
            let r = self.grow(counter, visit);
            self.edges.pop();
            self.pop_vertex();
            match r {
                Ok(ControlFlow::Continue(())) => {}
                other => {
                    self.give(v, l);
                    return other;
                }
            }
        }
        self.give(v, l);
        Ok(ControlFlow::Continue(()))
    }

    pub fn graph(&self) -> Multigraph {
        Multigraph::new(self.tiles.len(), self.edges.iter().map(|e| (e.u, e.v)))
            .expect("grown edges in range")
    }
}

/// Visit every connected complete complex of exactly `order` tiles (possibly
/// several times per isomorphism class).
pub(crate) fn for_each_complex(
    idx: &PotIndex,
    order: u64,
    counter: &mut Counter,
    f: &mut dyn FnMut(&Grower) -> ControlFlow<()>,
) -> Result<ControlFlow<()>, Exceeded> {
    let mut outcome = Ok(ControlFlow::Continue(()));
    let _ = for_each_usage(idx, order, |u| {
        let seed = u.iter().position(|&c| c > 0).expect("order >= 1");
        let mut g = Grower::new(idx, u);
        g.add_vertex(seed);
        match g.grow(counter, f) {
            Ok(ControlFlow::Continue(())) => ControlFlow::Continue(()),
            other => {
                outcome = other;
                ControlFlow::Break(())
            }
        }
    });
    outcome
}

/// All connected complete complexes with at most `max_order` tiles.
pub fn enumerate_complexes(
    pot: &Pot,
    max_order: usize,
    budget: SearchBudget,
) -> Result<ComplexCatalog, BudgetExceeded> {
    let idx = PotIndex::new(pot);
    let mut counter = Counter::new(budget);
    let mut catalog = ComplexCatalog::default();
    for n in 1..=max_order {
        let mut seen: BTreeMap<CanonicalForm, CatalogEntry> = BTreeMap::new();
        let r = for_each_complex(&idx, n as u64, &mut counter, &mut |g| {
            let graph = g.graph();
            seen.entry(canonical_form(&graph)).or_insert_with(|| CatalogEntry {
                witness: raw_assembly(pot, &g.tiles, &g.edges),
                graph,
            });
            ControlFlow::Continue(())
        });
        if !seen.is_empty() {
            catalog.by_order.insert(n, seen.into_values().collect());
        }
        if r.is_err() {
            return Err(BudgetExceeded {
                limit: budget.max_nodes,
                explored: counter.used,
                partial: catalog,
            });
        }
    }
    Ok(catalog)
}

/// The least order `<= cap` at which some connected complete complex exists.
pub fn smallest_realized_order(
    pot: &Pot,
    cap: usize,
    budget: SearchBudget,
) -> Result<Option<(usize, CatalogEntry)>, BudgetExceeded> {
    let idx = PotIndex::new(pot);
    let mut counter = Counter::new(budget);
    smallest_with_counter(pot, &idx, cap, &mut counter).map_err(|_| BudgetExceeded {
        limit: budget.max_nodes,
        explored: counter.used,
        partial: ComplexCatalog::default(),
    })
}

pub(crate) fn smallest_with_counter(
    pot: &Pot,
    idx: &PotIndex,
    cap: usize,
    counter: &mut Counter,
) -> Result<Option<(usize, CatalogEntry)>, Exceeded> {
    for n in 1..=cap {
        let mut found = None;
        let _ = for_each_complex(idx, n as u64, counter, &mut |g| {
            found = Some(CatalogEntry {
                graph: g.graph(),
                witness: raw_assembly(pot, &g.tiles, &g.edges),
            });
            ControlFlow::Break(())
        })?;
        if let Some(e) = found {
            return Ok(Some((n, e)));
        }
    }
    Ok(None)
}

/// A labelled assembly of `target` from `pot`, if one exists.
///
/// Vertices are placed highest degree first, each next vertex being the one
/// with most already-placed neighbours; tiles are tried by index.
pub fn realizes(pot: &Pot, target: &Multigraph) -> Option<LabeledAssembly> {
    let n = target.vertex_count();
    if n == 0 {
        return None;
    }
    let idx = PotIndex::new(pot);
    let degs = target.degrees();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (links[v], degs[v], std::cmp::Reverse(v)))
            .expect("unplaced vertex");
        placed[v] = true;
        order.push(v);
        for &(a, b) in target.edges() {
            if a == v && b != v {
                links[b] += 1;
            } else if b == v && a != v {
                links[a] += 1;
            }
        }
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // Back edges of each vertex: edge index and earlier endpoint, grouped by endpoint.
    let mut back: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in target.edges().iter().enumerate() {
        let (early, late) = if pos[a] <= pos[b] { (a, b) } else { (b, a) };
        back[late].push((e, early));
    }
    for b in back.iter_mut() {
        b.sort_by_key(|&(e, u)| (pos[u], e));
    }
    let mut csp = Realizer {
        idx: &idx,
        order,
        back,
        degs,
        rem: vec![Vec::new(); n],
        tiles: vec![usize::MAX; n],
        labels: vec![usize::MAX; target.edge_count()],
    };
    if !csp.place(0) {
        return None;
    }
    let labelled = target
        .edges()
        .iter()
        .zip(&csp.labels)
        .map(|(&(a, b), &lab)| {
            // `lab` is the label seen from the later endpoint.
            let (early, late) = if pos[a] <= pos[b] { (a, b) } else { (b, a) };
            let unhatted = if lab % 2 == 0 { late } else { early };
            (
                (a, b),
                EdgeLabel {
                    bond_type: pot.bond_types()[lab / 2].clone(),
                    unhatted_end: unhatted,
                },
            )
        })
        .collect();
    LabeledAssembly::from_parts(n, csp.tiles, labelled).ok()
}

struct Realizer<'a> {
    idx: &'a PotIndex,
    order: Vec<usize>,
    back: Vec<Vec<(usize, usize)>>,
    degs: Vec<usize>,
    rem: Vec<Vec<u32>>,
    tiles: Vec<usize>,
    labels: Vec<usize>,
}

impl Realizer<'_> {
    fn place(&mut self, i: usize) -> bool {
        if i == self.order.len() {
            return true;
        }
        let v = self.order[i];
        for j in 0..self.idx.tiles() {
            if self.idx.degree[j] != self.degs[v] {
                continue;
            }
            let mut avail = vec![0u32; 2 * self.idx.bonds];
            for &(l, c) in &self.idx.arms[j] {
                avail[l] = c;
            }
            self.tiles[v] = j;
            if self.bind(i, v, 0, avail) {
                return true;
            }
        }
        self.tiles[v] = usize::MAX;
        false
    }

    /// Label the `k`-th back edge of `v`, then continue with the next vertex.
    fn bind(&mut self, i: usize, v: usize, k: usize, mut avail: Vec<u32>) -> bool {
        if k == self.back[v].len() {
            self.rem[v] = avail;
            return self.place(i + 1);
        }
        let (e, u) = self.back[v][k];
        // Parallel edges to the same neighbour take non-decreasing labels.
        let floor = match k.checked_sub(1).map(|p| self.back[v][p]) {
            Some((pe, pu)) if pu == u => self.labels[pe],
            _ => 0,
        };
        for x in floor..avail.len() {
            if avail[x] == 0 {
                continue;
            }
            if u == v {
                if x % 2 == 1 || avail[x ^ 1] == 0 {
                    continue;
                }
                avail[x] -= 1;
                avail[x ^ 1] -= 1;
                self.labels[e] = x;
                if self.bind(i, v, k + 1, avail.clone()) {
                    return true;
                }
                avail[x] += 1;
                avail[x ^ 1] += 1;
            } else {
                if self.rem[u][x ^ 1] == 0 {
                    continue;
                }
                avail[x] -= 1;
                self.rem[u][x ^ 1] -= 1;
                self.labels[e] = x;
                if self.bind(i, v, k + 1, avail.clone()) {
                    return true;
                }
                self.rem[u][x ^ 1] += 1;
                avail[x] += 1;
            }
        }
        false
    }
}
