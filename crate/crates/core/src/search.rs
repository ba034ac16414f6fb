//! Exhaustive minimum bond-type and tile-type counts for a target graph.
//!
//! Only pots induced by edge labellings of the target are searched: dropping
//! tile types a passing pot never uses keeps it passing, so some minimum pot
//! is always induced by a labelling.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::ControlFlow;

use itertools::Itertools;
use serde::Serialize;

use crate::assembly::{for_each_complex, Counter, Exceeded, SearchBudget};
use crate::error::{invalid, Result};
use crate::graph::{canonical_form, CanonicalForm, Multigraph};
use crate::pot::{EdgeLabel, HalfEdgeLabel, LabeledAssembly, Pot, PotIndex, Tile};
use crate::scenario::Scenario;

/// Default node limit for each scenario check made during a search.
pub const DEFAULT_CHECK_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    /// Labelling nodes expanded over the whole search.
    pub budget: SearchBudget,
    /// Complex-growth nodes per scenario check; an exhausted check is inconclusive.
    pub check_budget: SearchBudget,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: SearchBudget::default(),
            check_budget: SearchBudget::new(DEFAULT_CHECK_BUDGET),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchKind {
    Bond,
    Tile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    /// `minimum` is proven.
    Exact,
    /// Budget ran out or some check was inconclusive; see the bounds.
    Indeterminate,
    /// No count up to `max_types` passes.
    Infeasible,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub kind: SearchKind,
    pub scenario: Scenario,
    pub status: SearchStatus,
    pub minimum: Option<usize>,
    /// Every count below this was exhausted without a passing pot.
    pub lower_bound: usize,
    /// Least count with a passing witness, proven minimal or not.
    pub upper_bound: Option<usize>,
    pub witness_pot: Option<Pot>,
    pub witness_assembly: Option<LabeledAssembly>,
    /// Complete labellings whose pot was checked.
    pub explored: u64,
    /// Labelling nodes expanded.
    pub nodes: u64,
    pub max_types: usize,
    pub caps: SearchOptions,
}

impl SearchResult {
    pub fn minimum(&self) -> Option<usize> {
        self.minimum
    }
}

/// Least number of bond types over labellings whose pot passes `scenario`.
pub fn min_bond_types(
    target: &Multigraph,
    scenario: Scenario,
    max_types: usize,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let t = Target::new(target, scenario, max_types)?;
    let mut run = Run::new(&t, SearchKind::Bond, max_types, opts);
    let top = max_types.min(t.edges.len());
    for b in 1..=top {
        let mut s = BondSearch::new(&t, b);
        let r = s.dfs(0, &mut run);
        if run.record(b, r) {
            break;
        }
    }
    Ok(run.finish())
}

/// Least number of distinct tiles over labellings whose pot passes `scenario`.
pub fn min_tile_types(
    target: &Multigraph,
    scenario: Scenario,
    max_types: usize,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let t = Target::new(target, scenario, max_types)?;
    let mut run = Run::new(&t, SearchKind::Tile, max_types, opts);
    let top = max_types.min(t.n);
    for k in 1..=top {
        let mut s = TileSearch::new(&t, k);
        let r = s.partitions(0, &mut run);
        if run.record(k, r) {
            break;
        }
    }
    Ok(run.finish())
}

/// Sorted `(label, multiplicity)` arms; labels are `2 * bond + hatted`.
type Arms = Vec<(usize, u32)>;

struct Target {
    n: usize,
    edges: Vec<(usize, usize)>,
    form: CanonicalForm,
    /// Per vertex: incident `(edge, side)` ends, side 0 being the edge's first endpoint.
    ends: Vec<Vec<(usize, u8)>>,
    scenario: Scenario,
    /// Automorphisms used for symmetry reduction; empty when there are too many.
    auts: Vec<Sym>,
}

/// Largest automorphism group used for symmetry reduction.
const AUT_LIMIT: usize = 5040;

/// A target automorphism acting on vertices and edges. `flip[e]` is set when
/// the image of edge `e` has its endpoints in the opposite order.
struct Sym {
    v: Vec<usize>,
    e: Vec<usize>,
    flip: Vec<u8>,
}

impl Target {
    fn new(g: &Multigraph, scenario: Scenario, max_types: usize) -> Result<Self> {
        if max_types == 0 {
            return Err(invalid("max_types must be at least 1"));
        }
        if g.edge_count() == 0 {
            return Err(invalid("target needs at least one edge"));
        }
        if g.degrees().contains(&0) {
            return Err(invalid("every target vertex needs an edge"));
        }
        let mut ends = vec![Vec::new(); g.vertex_count()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            ends[u].push((e, 0));
            ends[v].push((e, 1));
        }
        Ok(Target {
            n: g.vertex_count(),
            edges: g.edges().to_vec(),
            form: canonical_form(g),
            ends,
            scenario,
            auts: automorphisms(g, AUT_LIMIT)
                .unwrap_or_default()
                .into_iter()
                .map(|v| edge_action(g, v))
                .collect(),
        })
    }

    /// Tile of every vertex under a labelling given as per-edge type and
    /// hat bit of the first endpoint.
    fn tiles(&self, ty: &[usize], hat_first: &[u8]) -> Vec<Arms> {
        self.ends
            .iter()
            .map(|ends| {
                let mut m: BTreeMap<usize, u32> = BTreeMap::new();
                for &(e, s) in ends {
                    *m.entry(2 * ty[e] + usize::from(hat_first[e] ^ s)).or_default() += 1;
                }
                m.into_iter().collect()
            })
            .collect()
    }

    fn assembly(&self, pot_tiles: &[Arms], ty: &[usize], hat_first: &[u8]) -> (Pot, LabeledAssembly) {
        let vt = self.tiles(ty, hat_first);
        let tiles: Vec<Tile> = pot_tiles
            .iter()
            .map(|arms| {
                let labels = arms
                    .iter()
                    .flat_map(|&(l, c)| {
                        let name = bond_name(l / 2);
                        let h = if l % 2 == 0 {
                            HalfEdgeLabel::plain(name)
                        } else {
                            HalfEdgeLabel::hat(name)
                        };
                        std::iter::repeat(h).take(c as usize)
                    })
                    .collect();
                Tile::new(labels).expect("non-empty tile")
            })
            .collect();
        let pot = Pot::new(tiles).expect("distinct tiles");
        let vertex_tiles = vt
            .iter()
            .map(|a| pot_tiles.iter().position(|p| p == a).expect("tile in pot"))
            .collect();
        let labelled = self
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| {
                let unhatted = if hat_first[e] == 0 { u } else { v };
                (
                    (u, v),
                    EdgeLabel {
                        bond_type: bond_name(ty[e]),
                        unhatted_end: unhatted,
                    },
                )
            })
            .collect();
        let asm = LabeledAssembly::from_parts(self.n, vertex_tiles, labelled).expect("target edges");
        (pot, asm)
    }
}

fn bond_name(i: usize) -> String {
    format!("a{}", i + 1)
}

/// Distinct tiles in order of first appearance.
fn distinct(tiles: &[Arms]) -> Vec<Arms> {
    let mut out: Vec<Arms> = Vec::new();
    for t in tiles {
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    Pass,
    Fail,
    Unknown,
}

/// Search-wide state: budget, memoised checks and the best result so far.
struct Run<'a> {
    t: &'a Target,
    kind: SearchKind,
    max_types: usize,
    opts: SearchOptions,
    counter: Counter,
    memo: HashMap<(usize, Vec<Arms>), Check>,
    iso: HashMap<Vec<(usize, usize)>, bool>,
    explored: u64,
    inconclusive: bool,
    exhausted_below: usize,
    blocked: bool,
    best: Option<(usize, Pot, LabeledAssembly)>,
    out_of_budget: bool,
}

/// Outcome of searching one count.
type Step = std::result::Result<ControlFlow<()>, Exceeded>;

impl<'a> Run<'a> {
    fn new(t: &'a Target, kind: SearchKind, max_types: usize, opts: &SearchOptions) -> Self {
        Run {
            t,
            kind,
            max_types,
            opts: *opts,
            counter: Counter::new(opts.budget),
            memo: HashMap::new(),
            iso: HashMap::new(),
            explored: 0,
            inconclusive: false,
            exhausted_below: 1,
            blocked: false,
            best: None,
            out_of_budget: false,
        }
    }

    /// Fold in the search of count `k`; true when the search should stop.
    fn record(&mut self, k: usize, r: Step) -> bool {
        match r {
            Err(Exceeded) => {
                self.out_of_budget = true;
                true
            }
            Ok(ControlFlow::Break(())) => true,
            Ok(ControlFlow::Continue(())) => {
                if self.inconclusive {
                    self.blocked = true;
                }
                if !self.blocked {
                    self.exhausted_below = k + 1;
                }
                self.inconclusive = false;
                false
            }
        }
    }

    fn finish(self) -> SearchResult {
        let upper = self.best.as_ref().map(|b| b.0);
        let status = if upper.is_some() && upper == Some(self.exhausted_below) {
            SearchStatus::Exact
        } else if upper.is_none() && !self.out_of_budget && !self.blocked {
            SearchStatus::Infeasible
        } else {
            SearchStatus::Indeterminate
        };
        let (pot, asm) = match self.best {
            Some((_, p, a)) => (Some(p), Some(a)),
            None => (None, None),
        };
        SearchResult {
            kind: self.kind,
            scenario: self.t.scenario,
            status,
            minimum: if status == SearchStatus::Exact { upper } else { None },
            lower_bound: self.exhausted_below,
            upper_bound: upper,
            witness_pot: pot,
            witness_assembly: asm,
            explored: self.explored,
            nodes: self.counter.used,
            max_types: self.max_types,
            caps: self.opts,
        }
    }

    /// Does the pot made of `tiles` admit a complex that breaks the scenario?
    fn check(&mut self, bonds: usize, tiles: &[Arms]) -> Check {
        if self.t.scenario == Scenario::One {
            return Check::Pass;
        }
        let mut key = tiles.to_vec();
        key.sort();
        key.dedup();
        let key = (bonds, key);
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let c = self.check_uncached(bonds, &key.1);
        self.memo.insert(key, c);
        c
    }

    fn check_uncached(&mut self, bonds: usize, tiles: &[Arms]) -> Check {
        let idx = PotIndex::from_arms(bonds, tiles.to_vec());
        let mut counter = Counter::new(self.opts.check_budget);
        let n = self.t.n;
        for order in 1..n {
            let r = for_each_complex(&idx, order as u64, &mut counter, &mut |_| ControlFlow::Break(()));
            match r {
                Err(Exceeded) => return Check::Unknown,
                Ok(ControlFlow::Break(())) => return Check::Fail,
                Ok(ControlFlow::Continue(())) => {}
            }
        }
        if self.t.scenario == Scenario::Three {
            let form = &self.t.form;
            let r = for_each_complex(&idx, n as u64, &mut counter, &mut |g| {
                if canonical_form(&g.graph()) == *form {
                    ControlFlow::Continue(())
                } else {
                    ControlFlow::Break(())
                }
            });
            match r {
                Err(Exceeded) => return Check::Unknown,
                Ok(ControlFlow::Break(())) => return Check::Fail,
                Ok(ControlFlow::Continue(())) => {}
            }
        }
        Check::Pass
    }

    /// Leaf: check a full labelling and keep it when it passes.
    fn leaf(&mut self, count: usize, ty: &[usize], hat_first: &[u8]) -> ControlFlow<()> {
        self.explored += 1;
        let vt = self.t.tiles(ty, hat_first);
        let pot_tiles = distinct(&vt);
        let bonds = ty.iter().max().map_or(0, |&m| m + 1);
        match self.check(bonds, &pot_tiles) {
            Check::Pass => {
                let (pot, asm) = self.t.assembly(&pot_tiles, ty, hat_first);
                self.best = Some((count, pot, asm));
                ControlFlow::Break(())
            }
            Check::Fail => ControlFlow::Continue(()),
            Check::Unknown => {
                self.inconclusive = true;
                ControlFlow::Continue(())
            }
        }
    }

    /// Rebond two same-type edges: `(u→v)` and `(x→y)`, arrows from the
    /// un-hatted end, become `(u, y)` and `(x, v)`. The result is realized by
    /// any pot the labelling induces; true when that breaks the scenario.
    fn swap_breaks(&mut self, e: usize, e_unhat: usize, f: usize, f_unhat: usize) -> bool {
        if self.t.scenario == Scenario::One {
            return false;
        }
        let other = |k: usize, end: usize| {
            let (a, b) = self.t.edges[k];
            if a == end {
                b
            } else {
                a
            }
        };
        let (u, v) = (e_unhat, other(e, e_unhat));
        let (x, y) = (f_unhat, other(f, f_unhat));
        let mut edges: Vec<(usize, usize)> = self
            .t
            .edges
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != e && k != f)
            .map(|(_, &p)| p)
            .collect();
        edges.push((u.min(y), u.max(y)));
        edges.push((x.min(v), x.max(v)));
        if !connected(self.t.n, &edges) {
            return true;
        }
        if self.t.scenario != Scenario::Three {
            return false;
        }
        edges.sort_unstable();
        if let Some(&same) = self.iso.get(&edges) {
            return !same;
        }
        let g = Multigraph::new(self.t.n, edges.iter().copied()).expect("rebonded edges in range");
        let same = canonical_form(&g) == self.t.form;
        self.iso.insert(edges, same);
        !same
    }
}

/// All vertex automorphisms of `g`, or `None` if there are more than `limit`.
fn automorphisms(g: &Multigraph, limit: usize) -> Option<Vec<Vec<usize>>> {
    fn extend(
        adj: &[Vec<u32>],
        deg: &[usize],
        img: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> bool {
        let v = img.len();
        if v == adj.len() {
            out.push(img.clone());
            return out.len() <= limit;
        }
        for w in 0..adj.len() {
            if used[w] || deg[w] != deg[v] || adj[w][w] != adj[v][v] {
                continue;
            }
            if (0..v).any(|u| adj[img[u]][w] != adj[u][v]) {
                continue;
            }
            used[w] = true;
            img.push(w);
            let go_on = extend(adj, deg, img, used, out, limit);
            img.pop();
            used[w] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
    let adj = g.adjacency();
    let deg = g.degrees();
    let mut out = Vec::new();
    let mut used = vec![false; g.vertex_count()];
    extend(&adj, &deg, &mut Vec::new(), &mut used, &mut out, limit).then_some(out)
}

/// Induced action on edges; parallel copies map in order.
fn edge_action(g: &Multigraph, v: Vec<usize>) -> Sym {
    let edges = g.edges();
    let mut e = Vec::with_capacity(edges.len());
    let mut flip = Vec::with_capacity(edges.len());
    for (i, &(a, b)) in edges.iter().enumerate() {
        let copy = edges[..i].iter().filter(|&&p| p == (a, b)).count();
        let (x, y) = (v[a], v[b]);
        let key = (x.min(y), x.max(y));
        let j = edges
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p == key)
            .nth(copy)
            .expect("automorphism preserves multiplicity")
            .0;
        e.push(j);
        flip.push(u8::from(x > y));
    }
    Sym { v, e, flip }
}

/// Restricted-growth relabelling of a partition.
fn normalize(class: &[usize]) -> Vec<usize> {
    let mut ids: Vec<usize> = Vec::new();
    class
        .iter()
        .map(|c| match ids.iter().position(|x| x == c) {
            Some(i) => i,
            None => {
                ids.push(*c);
                ids.len() - 1
            }
        })
        .collect()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut parts = n;
    for &(u, v) in edges {
        let (a, b) = (root(&mut parent, u), root(&mut parent, v));
        if a != b {
            parent[a] = b;
            parts -= 1;
        }
    }
    parts <= 1
}

/// Labellings with exactly `b` bond types, in canonical form: types are
/// numbered by first appearance and each type's first edge points away from
/// its first endpoint.
struct BondSearch<'a> {
    t: &'a Target,
    b: usize,
    order: Vec<usize>,
    /// Vertices whose last edge is `order[i]`.
    completes: Vec<Vec<usize>>,
    ty: Vec<usize>,
    hat_first: Vec<u8>,
    by_type: Vec<Vec<usize>>,
    used: usize,
    done: Vec<bool>,
}

impl<'a> BondSearch<'a> {
    fn new(t: &'a Target, b: usize) -> Self {
        let order = edge_order(t);
        let mut last = vec![0; t.n];
        for (i, &e) in order.iter().enumerate() {
            let (u, v) = t.edges[e];
            last[u] = i;
            last[v] = i;
        }
        let mut completes = vec![Vec::new(); order.len()];
        for v in 0..t.n {
            completes[last[v]].push(v);
        }
        BondSearch {
            t,
            b,
            order,
            completes,
            ty: vec![usize::MAX; t.edges.len()],
            hat_first: vec![0; t.edges.len()],
            by_type: vec![Vec::new(); b],
            used: 0,
            done: vec![false; t.n],
        }
    }

    fn unhatted(&self, e: usize) -> usize {
        let (u, v) = self.t.edges[e];
        if self.hat_first[e] == 0 {
            u
        } else {
            v
        }
    }

    fn dfs(&mut self, i: usize, run: &mut Run) -> Step {
        run.counter.tick()?;
        let m = self.order.len();
        if i == m {
            return Ok(if self.used == self.b {
                run.leaf(self.b, &self.ty, &self.hat_first)
            } else {
                ControlFlow::Continue(())
            });
        }
        if self.used + (m - i) < self.b {
            return Ok(ControlFlow::Continue(()));
        }
        let e = self.order[i];
        let (u, v) = self.t.edges[e];
        for x in 0..(self.used + 1).min(self.b) {
            let fresh = x == self.used;
            let flips: &[u8] = if fresh || u == v { &[0] } else { &[0, 1] };
            for &h in flips {
                self.ty[e] = x;
                self.hat_first[e] = h;
                let ue = self.unhatted(e);
                let broken = self.by_type[x]
                    .clone()
                    .into_iter()
                    .any(|f| run.swap_breaks(e, ue, f, self.unhatted(f)));
                if broken {
                    continue;
                }
                self.by_type[x].push(e);
                if fresh {
                    self.used += 1;
                }
                let ok = self.completed_ok(i, run);
                let r = if ok { self.dfs(i + 1, run) } else { Ok(ControlFlow::Continue(())) };
                for &w in &self.completes[i] {
                    self.done[w] = false;
                }
                if fresh {
                    self.used -= 1;
                }
                self.by_type[x].pop();
                self.ty[e] = usize::MAX;
                match r {
                    Ok(ControlFlow::Continue(())) => {}
                    other => return other,
                }
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Mark the vertices finished at step `i`; false when the tiles finished
    /// so far already admit a bad complex.
    fn completed_ok(&mut self, i: usize, run: &mut Run) -> bool {
        if self.completes[i].is_empty() {
            return true;
        }
        for &w in &self.completes[i] {
            self.done[w] = true;
        }
        if i + 1 == self.order.len() {
            return true;
        }
        let tiles: Vec<Arms> = (0..self.t.n)
            .filter(|&w| self.done[w])
            .map(|w| self.tile(w))
            .collect();
        run.check(self.b, &distinct(&tiles)) != Check::Fail
    }

    fn tile(&self, w: usize) -> Arms {
        let mut m: BTreeMap<usize, u32> = BTreeMap::new();
        for &(e, s) in &self.t.ends[w] {
            *m.entry(2 * self.ty[e] + usize::from(self.hat_first[e] ^ s)).or_default() += 1;
        }
        m.into_iter().collect()
    }
}

/// Edges sorted so that vertices are finished early: vertices are ranked
/// highest degree first, then by most ranked neighbours, and each edge comes
/// at the rank of its later endpoint.
fn edge_order(t: &Target) -> Vec<usize> {
    let degs: Vec<usize> = t.ends.iter().map(Vec::len).collect();
    let mut pos = vec![usize::MAX; t.n];
    let mut links = vec![0usize; t.n];
    for r in 0..t.n {
        let v = (0..t.n)
            .filter(|&v| pos[v] == usize::MAX)
            .max_by_key(|&v| (links[v], degs[v], std::cmp::Reverse(v)))
            .expect("unranked vertex");
        pos[v] = r;
        for &(a, b) in &t.edges {
            if a == v && b != v {
                links[b] += 1;
            } else if b == v && a != v {
                links[a] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..t.edges.len()).collect();
    order.sort_by_key(|&e| {
        let (u, v) = t.edges[e];
        let (p, q) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
        (q, p, e)
    });
    order
}

/// Union-find over edges with a parity per edge: the hat bit of the edge's
/// first endpoint relative to its class root. Supports rollback.
struct ParityUf {
    parent: Vec<usize>,
    parity: Vec<u8>,
    members: Vec<Vec<usize>>,
    log: Vec<Option<(usize, usize)>>,
}

impl ParityUf {
    fn new(n: usize) -> Self {
        ParityUf {
            parent: (0..n).collect(),
            parity: vec![0; n],
            members: (0..n).map(|i| vec![i]).collect(),
            log: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> (usize, u8) {
        let mut p = 0;
        while self.parent[x] != x {
            p ^= self.parity[x];
            x = self.parent[x];
        }
        (x, p)
    }

    /// Require `bit(a) ^ bit(b) == want`. `Err` on contradiction, otherwise
    /// the root absorbed into the other, if any.
    fn union(&mut self, a: usize, b: usize, want: u8) -> std::result::Result<Option<usize>, ()> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            self.log.push(None);
            return if pa ^ pb == want { Ok(None) } else { Err(()) };
        }
        let (big, small) = if self.members[ra].len() >= self.members[rb].len() {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.parity[small] = pa ^ pb ^ want;
        let moved = std::mem::take(&mut self.members[small]);
        self.log.push(Some((small, moved.len())));
        self.members[big].extend(moved);
        Ok(Some(small))
    }

    fn undo(&mut self) {
        if let Some((small, moved)) = self.log.pop().expect("union to undo") {
            let big = self.parent[small];
            let keep = self.members[big].len() - moved;
            self.members[small] = self.members[big].split_off(keep);
            self.parent[small] = small;
            self.parity[small] = 0;
        }
    }

    /// Members of the class most recently absorbed, and of the class that absorbed it.
    fn last_merge(&self) -> Option<(&[usize], &[usize])> {
        let (small, moved) = (*self.log.last()?)?;
        let all = &self.members[self.parent[small]];
        let (theirs, ours) = all.split_at(all.len() - moved);
        Some((ours, theirs))
    }
}

/// Labellings where vertices in the same class of a tile partition carry the
/// same tile. For a partition and a matching of each member's ends to its
/// class representative's ends, the finest compatible labelling is read off
/// the union-find; any passing labelling coarsens one of these, and coarsening
/// never helps a pot pass.
struct TileSearch<'a> {
    t: &'a Target,
    k: usize,
    class: Vec<usize>,
    uf: ParityUf,
    /// Automorphisms fixing every class of the current partition.
    stab: Vec<usize>,
    /// Canonical keys of states whose subtrees were already entered.
    seen: HashSet<Vec<u16>>,
    /// Exact states already entered, before symmetry reduction.
    raw: HashSet<(usize, Vec<(usize, u8)>)>,
}

impl<'a> TileSearch<'a> {
    fn new(t: &'a Target, k: usize) -> Self {
        TileSearch {
            t,
            k,
            class: vec![usize::MAX; t.n],
            uf: ParityUf::new(t.edges.len()),
            stab: Vec::new(),
            seen: HashSet::new(),
            raw: HashSet::new(),
        }
    }

    /// Set partitions of the vertices into exactly `k` classes of equal degree.
    fn partitions(&mut self, v: usize, run: &mut Run) -> Step {
        let n = self.t.n;
        let classes = self.class[..v].iter().copied().max().map_or(0, |c| c + 1);
        if classes > self.k || classes + (n - v) < self.k {
            return Ok(ControlFlow::Continue(()));
        }
        if v == n {
            if !self.canonical_partition() {
                return Ok(ControlFlow::Continue(()));
            }
            self.stab = (0..self.t.auts.len())
                .filter(|&i| (0..n).all(|x| self.class[self.t.auts[i].v[x]] == self.class[x]))
                .collect();
            self.seen.clear();
            self.raw.clear();
            let steps = self.steps();
            let mut taken: Vec<Vec<bool>> = self.t.ends.iter().map(|e| vec![false; e.len()]).collect();
            return self.match_ends(&steps, 0, &mut taken, run);
        }
        let deg = self.t.ends[v].len();
        for c in 0..=classes.min(self.k - 1) {
            if c < classes {
                let rep = self.class.iter().position(|&x| x == c).expect("class member");
                if self.t.ends[rep].len() != deg {
                    continue;
                }
            }
            self.class[v] = c;
            let r = self.partitions(v + 1, run);
            self.class[v] = usize::MAX;
            match r {
                Ok(ControlFlow::Continue(())) => {}
                other => return other,
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Is the partition the least of its images under the automorphisms?
    fn canonical_partition(&self) -> bool {
        self.t.auts.iter().all(|a| {
            let mut img = vec![0; self.t.n];
            for x in 0..self.t.n {
                img[a.v[x]] = self.class[x];
            }
            normalize(&img) >= self.class
        })
    }

    /// Key of the union-find state and the members still to be matched,
    /// least over the partition's stabiliser. Bond types are numbered by
    /// first appearance and each type's first edge is taken as un-flipped.
    /// The current labelling with types numbered by first appearance and
    /// each type's first edge un-flipped.
    fn labelling(&self) -> (Vec<usize>, Vec<u8>) {
        let m = self.t.edges.len();
        let mut id = vec![(usize::MAX, 0u8); m];
        let mut next = 0;
        let mut ty = vec![0; m];
        let mut hat_first = vec![0; m];
        for e in 0..m {
            let (root, p) = self.uf.find(e);
            if id[root].0 == usize::MAX {
                id[root] = (next, p);
                next += 1;
            }
            ty[e] = id[root].0;
            hat_first[e] = p ^ id[root].1;
        }
        (ty, hat_first)
    }

    fn raw_key(&self, step: usize) -> (usize, Vec<(usize, u8)>) {
        let (ty, hat_first) = self.labelling();
        (step, ty.into_iter().zip(hat_first).collect())
    }

    fn state_key(&self, pending: &[usize]) -> Vec<u16> {
        let m = self.t.edges.len();
        let found: Vec<(usize, u8)> = (0..m).map(|e| self.uf.find(e)).collect();
        let mut best: Option<Vec<u16>> = None;
        let mut root = vec![0; m];
        let mut bit = vec![0u8; m];
        for &i in &self.stab {
            let a = &self.t.auts[i];
            for e in 0..m {
                root[a.e[e]] = found[e].0;
                bit[a.e[e]] = found[e].1 ^ a.flip[e];
            }
            let mut ids: HashMap<usize, (u16, u8)> = HashMap::new();
            let mut key: Vec<u16> = (0..m)
                .map(|e| {
                    let next = ids.len() as u16;
                    let &mut (id, first) = ids.entry(root[e]).or_insert((next, bit[e]));
                    2 * id + u16::from(bit[e] ^ first)
                })
                .collect();
            let mut mask = vec![0u16; self.t.n];
            for &w in pending {
                mask[a.v[w]] = 1;
            }
            key.extend(mask);
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
        }
        best.unwrap_or_default()
    }

    /// `(representative, member, end index)` for every end to be matched.
    fn steps(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.t.n {
            let rep = self.class.iter().position(|&c| c == self.class[v]).expect("own class");
            if rep != v {
                out.extend((0..self.t.ends[v].len()).map(|k| (rep, v, k)));
            }
        }
        out
    }

    fn match_ends(
        &mut self,
        steps: &[(usize, usize, usize)],
        s: usize,
        taken: &mut [Vec<bool>],
        run: &mut Run,
    ) -> Step {
        run.counter.tick()?;
        let boundary = s == steps.len() || (s > 0 && steps[s].1 != steps[s - 1].1);
        if boundary && self.stab.len() > 1 {
            let pending: Vec<usize> = steps[s..].iter().map(|st| st.1).dedup().collect();
            if !self.raw.insert(self.raw_key(s)) || !self.seen.insert(self.state_key(&pending)) {
                return Ok(ControlFlow::Continue(()));
            }
        }
        if boundary && s < steps.len() && self.t.scenario != Scenario::One {
            // Later matches only coarsen the labelling, which cannot cure a failure.
            let (ty, hat_first) = self.labelling();
            let bonds = ty.iter().max().map_or(0, |&b| b + 1);
            if run.check(bonds, &distinct(&self.t.tiles(&ty, &hat_first))) == Check::Fail {
                return Ok(ControlFlow::Continue(()));
            }
        }
        if s == steps.len() {
            return Ok(self.leaf(run));
        }
        let (rep, w, k) = steps[s];
        let (e, se) = self.t.ends[rep][k];
        let mut seen: Vec<(usize, u8)> = Vec::new();
        for j in 0..self.t.ends[w].len() {
            if taken[w][j] {
                continue;
            }
            let (f, sf) = self.t.ends[w][j];
            let (root, p) = self.uf.find(f);
            let id = (root, p ^ sf);
            if seen.contains(&id) {
                continue;
            }
            seen.push(id);
            let Ok(merged) = self.uf.union(e, f, se ^ sf) else {
                self.uf.undo();
                continue;
            };
            let broken = merged.is_some() && self.merge_breaks(run);
            let r = if broken {
                Ok(ControlFlow::Continue(()))
            } else {
                taken[w][j] = true;
                let r = self.match_ends(steps, s + 1, taken, run);
                taken[w][j] = false;
                r
            };
            self.uf.undo();
            match r {
                Ok(ControlFlow::Continue(())) => {}
                other => return other,
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Swap test between the class just absorbed and the rest of its new class.
    fn merge_breaks(&self, run: &mut Run) -> bool {
        if self.t.scenario == Scenario::One {
            return false;
        }
        let Some((ours, theirs)) = self.uf.last_merge() else {
            return false;
        };
        ours.iter()
            .any(|&e| theirs.iter().any(|&f| run.swap_breaks(e, self.unhatted(e), f, self.unhatted(f))))
    }

    fn unhatted(&self, e: usize) -> usize {
        let (u, v) = self.t.edges[e];
        if self.uf.find(e).1 == 0 {
            u
        } else {
            v
        }
    }

    fn leaf(&self, run: &mut Run) -> ControlFlow<()> {
        let (ty, hat_first) = self.labelling();
        let tiles = distinct(&self.t.tiles(&ty, &hat_first));
        if tiles.len() != self.k {
            return ControlFlow::Continue(());
        }
        run.leaf(self.k, &ty, &hat_first)
    }
}

impl PotIndex {
    pub(crate) fn from_arms(bonds: usize, arms: Vec<Arms>) -> Self {
        let mut net = vec![vec![0i64; arms.len()]; bonds];
        for (j, t) in arms.iter().enumerate() {
            for &(l, c) in t {
                net[l / 2][j] += if l % 2 == 0 { i64::from(c) } else { -i64::from(c) };
            }
        }
        let degree = arms
            .iter()
            .map(|t| t.iter().map(|&(_, c)| c as usize).sum())
            .collect();
        PotIndex {
            bonds,
            arms,
            net,
            degree,
        }
    }
}
