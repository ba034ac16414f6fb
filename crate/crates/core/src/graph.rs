//! Undirected multigraphs with loops, the lollipop/tadpole families and
//! canonical labelling for small-graph isomorphism.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// An undirected multigraph on vertices `0..vertex_count`.
///
/// Edges are stored as `(u, v)` with `u <= v`, sorted, so equality does not
/// depend on insertion order. A loop at `v` is the pair `(v, v)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Multigraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for Multigraph {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        Multigraph::new(j.vertices, j.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Multigraph> for GraphJson {
    fn from(g: Multigraph) -> Self {
        GraphJson {
            vertices: g.vertices,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Multigraph {
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(invalid(format!(
                    "edge ({u}, {v}) out of range for {vertices} vertices"
                )));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        Ok(Multigraph {
            vertices,
            edges: out,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted edge list, each pair normalised to `u <= v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Degree of `v`; a loop contributes 2.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Symmetric multiplicity matrix; the diagonal holds loop counts.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut a = vec![vec![0u32; self.vertices]; self.vertices];
        for &(u, v) in &self.edges {
            a[u][v] += 1;
            if u != v {
                a[v][u] += 1;
            }
        }
        a
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|&(u, v)| u == v)
    }

    pub fn is_simple(&self) -> bool {
        !self.has_loops() && self.edges.windows(2).all(|w| w[0] != w[1])
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..self.vertices {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.vertices > 0 && self.components().len() == 1
    }

    /// The subgraph induced on `vs`, relabelled to `0..vs.len()` in the given order.
    pub fn induced(&self, vs: &[usize]) -> Multigraph {
        let mut pos = vec![usize::MAX; self.vertices];
        for (i, &v) in vs.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]));
        Multigraph::new(vs.len(), edges).expect("induced edges are in range")
    }

    /// Undirected Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for v in 0..self.vertices {
            let _ = writeln!(s, "  {v};");
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "  {u} -- {v};");
        }
        s.push_str("}\n");
        s
    }
}

/// Path on `n` vertices.
pub fn make_path(n: usize) -> Result<Multigraph> {
    if n == 0 {
        return Err(invalid("path needs at least one vertex"));
    }
    Multigraph::new(n, (1..n).map(|i| (i - 1, i)))
}

/// Complete graph on `m` vertices.
pub fn make_complete(m: usize) -> Result<Multigraph> {
    if m == 0 {
        return Err(invalid("complete graph needs at least one vertex"));
    }
    Multigraph::new(m, (0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v))))
}

/// Cycle on `m >= 3` vertices.
pub fn make_cycle(m: usize) -> Result<Multigraph> {
    if m < 3 {
        return Err(invalid(format!("cycle needs m >= 3, got {m}")));
    }
    Multigraph::new(m, (0..m).map(|i| (i, (i + 1) % m)))
}

/// `K_m` on vertices `0..m` with a path of `n` vertices hung off vertex 0.
pub fn make_lollipop(m: usize, n: usize) -> Result<Multigraph> {
    if m <= 3 {
        return Err(invalid(format!(
            "lollipop needs m >= 4, got {m}; for m = 3 use make_tadpole"
        )));
    }
    if n == 0 {
        return Err(invalid("lollipop needs n >= 1"));
    }
    let clique = make_complete(m)?;
    Multigraph::new(m + n, clique.edges.iter().copied().chain(tail(m, n)))
}

/// `C_m` on vertices `0..m` with a path of `n` vertices hung off vertex 0.
pub fn make_tadpole(m: usize, n: usize) -> Result<Multigraph> {
    if m < 3 {
        return Err(invalid(format!("tadpole needs m >= 3, got {m}")));
    }
    if n == 0 {
        return Err(invalid("tadpole needs n >= 1"));
    }
    let cycle = make_cycle(m)?;
    Multigraph::new(m + n, cycle.edges.iter().copied().chain(tail(m, n)))
}

fn tail(m: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).map(move |i| (if i == 0 { 0 } else { m + i - 1 }, m + i))
}

/// Distinct-degree counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub av: usize,
    pub ev: usize,
    pub ov: usize,
}

pub fn degree_stats(g: &Multigraph) -> Result<DegreeStats> {
    if g.vertex_count() == 0 {
        return Err(invalid("degree statistics of the empty graph"));
    }
    let distinct: BTreeSet<usize> = g.degrees().into_iter().collect();
    let ev = distinct.iter().filter(|d| *d % 2 == 0).count();
    Ok(DegreeStats {
        av: distinct.len(),
        ev,
        ov: distinct.len() - ev,
    })
}

/// Relabelling-invariant form: two graphs are isomorphic iff their forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Colour refinement plus individualisation; the smallest leaf edge list wins.
pub fn canonical_form(g: &Multigraph) -> CanonicalForm {
    canonical_labeling(g).0
}

/// Canonical form together with the vertex map `old -> new` that produces it.
pub fn canonical_labeling(g: &Multigraph) -> (CanonicalForm, Vec<usize>) {
    let n = g.vertex_count();
    let adj = g.adjacency();
    let degs = g.degrees();
    let keys: Vec<(usize, u32)> = (0..n).map(|v| (degs[v], adj[v][v])).collect();
    let mut colors = rank(&keys);
    refine(&adj, &mut colors);
    let mut best: Option<(Vec<(usize, usize)>, Vec<usize>)> = None;
    search(g, &adj, colors, &mut best);
    let (edges, perm) = best.unwrap_or_default();
    (CanonicalForm { vertices: n, edges }, perm)
}

pub fn is_isomorphic(a: &Multigraph, b: &Multigraph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let (mut da, mut db) = (a.degrees(), b.degrees());
    da.sort_unstable();
    db.sort_unstable();
    da == db && canonical_form(a) == canonical_form(b)
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut uniq = keys.to_vec();
    uniq.sort();
    uniq.dedup();
    keys.iter()
        .map(|k| uniq.binary_search(k).expect("key present"))
        .collect()
}

fn distinct(colors: &[usize]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

fn refine(adj: &[Vec<u32>], colors: &mut Vec<usize>) {
    let n = adj.len();
    let mut count = distinct(colors);
    loop {
        let sigs: Vec<(usize, Vec<(usize, u32)>)> = (0..n)
            .map(|v| {
                let mut s: Vec<(usize, u32)> = (0..n)
                    .filter(|&u| u != v && adj[v][u] > 0)
                    .map(|u| (colors[u], adj[v][u]))
                    .collect();
                s.sort_unstable();
                (colors[v], s)
            })
            .collect();
        *colors = rank(&sigs);
        let now = distinct(colors);
        if now == count {
            return;
        }
        count = now;
    }
}

fn twins(adj: &[Vec<u32>], v: usize, w: usize) -> bool {
    adj[v][v] == adj[w][w] && (0..adj.len()).all(|x| x == v || x == w || adj[v][x] == adj[w][x])
}

fn search(
    g: &Multigraph,
    adj: &[Vec<u32>],
    colors: Vec<usize>,
    best: &mut Option<(Vec<(usize, usize)>, Vec<usize>)>,
) {
    let n = adj.len();
    if distinct(&colors) == n {
        let mut edges: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (colors[u], colors[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        if best.as_ref().map_or(true, |(b, _)| edges < *b) {
            *best = Some((edges, colors));
        }
        return;
    }
    // First non-singleton cell in colour order.
    let mut sizes = vec![0usize; n];
    for &c in &colors {
        sizes[c] += 1;
    }
    let target = (0..n).find(|&c| sizes[c] > 1).expect("some cell is not singleton");
    let mut tried: Vec<usize> = Vec::new();
    for v in (0..n).filter(|&v| colors[v] == target) {
        if tried.iter().any(|&w| twins(adj, v, w)) {
            continue;
        }
        tried.push(v);
        let keys: Vec<usize> = (0..n)
            .map(|w| 2 * colors[w] + usize::from(w != v))
            .collect();
        let mut next = rank(&keys);
        refine(adj, &mut next);
        search(g, adj, next, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn brute_iso(a: &Multigraph, b: &Multigraph) -> bool {
        if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
            return false;
        }
        let n = a.vertex_count();
        let target = b.edges().to_vec();
        (0..n).permutations(n).any(|p| {
            let mapped = Multigraph::new(n, a.edges().iter().map(|&(u, v)| (p[u], p[v]))).unwrap();
            mapped.edges() == target.as_slice()
        }) || n == 0
    }

    fn arb_graph(max_v: usize, max_e: usize) -> impl Strategy<Value = Multigraph> {
        (1..=max_v).prop_flat_map(move |n| {
            prop::collection::vec((0..n, 0..n), 0..=max_e)
                .prop_map(move |es| Multigraph::new(n, es).unwrap())
        })
    }

    fn relabel(g: &Multigraph, perm: &[usize]) -> Multigraph {
        Multigraph::new(g.vertex_count(), g.edges().iter().map(|&(u, v)| (perm[u], perm[v]))).unwrap()
    }

    #[test]
    fn paths() {
        assert!(make_path(0).is_err());
        let p1 = make_path(1).unwrap();
        assert_eq!((p1.vertex_count(), p1.edge_count()), (1, 0));
        assert_eq!(make_path(2).unwrap().edge_count(), 1);
        assert_eq!(make_path(5).unwrap().degrees(), vec![1, 2, 2, 2, 1]);
    }

    #[test]
    fn complete_and_cycle() {
        let k4 = make_complete(4).unwrap();
        assert_eq!(k4.edge_count(), 6);
        assert!(k4.degrees().iter().all(|&d| d == 3));
        let c5 = make_cycle(5).unwrap();
        assert_eq!(c5.edge_count(), 5);
        assert!(c5.degrees().iter().all(|&d| d == 2));
        assert!(make_cycle(2).is_err());
        assert!(make_complete(0).is_err());
        assert!(is_isomorphic(&make_complete(3).unwrap(), &make_cycle(3).unwrap()));
    }

    #[test]
    fn lollipops() {
        let g = make_lollipop(4, 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 8));
        let mut d = g.degrees();
        d.sort_unstable();
        assert_eq!(d, vec![1, 2, 3, 3, 3, 4]);
        let g = make_lollipop(5, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 11));
        let s = degree_stats(&make_lollipop(5, 3).unwrap()).unwrap();
        assert_eq!((s.av, s.ev, s.ov), (4, 2, 2));
        assert!(make_lollipop(3, 2).unwrap_err().to_string().contains("tadpole"));
    }

    #[test]
    fn tadpoles() {
        let g = make_tadpole(6, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (7, 7));
        let mut d = make_tadpole(5, 2).unwrap().degrees();
        d.sort_unstable();
        assert_eq!(d, vec![1, 2, 2, 2, 2, 2, 3]);
        let g = make_tadpole(3, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        assert!(make_tadpole(2, 1).is_err());
    }

    #[test]
    fn stats() {
        for (m, n) in [(3, 1), (5, 4), (8, 2)] {
            let s = degree_stats(&make_tadpole(m, n).unwrap()).unwrap();
            assert_eq!((s.av, s.ev, s.ov), (3, 1, 2));
        }
        for m in 4..9 {
            assert_eq!(degree_stats(&make_lollipop(m, 1).unwrap()).unwrap().av, 3);
        }
        let s = degree_stats(&make_cycle(5).unwrap()).unwrap();
        assert_eq!((s.av, s.ev, s.ov), (1, 1, 0));
        assert!(degree_stats(&Multigraph::new(0, []).unwrap()).is_err());
    }

    #[test]
    fn iso_examples() {
        let p4 = make_path(4).unwrap();
        let k3_plus = Multigraph::new(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(!is_isomorphic(&p4, &k3_plus));
        // Same order as Tad(5,2) but three paths leave the cycle.
        let tad = make_tadpole(5, 2).unwrap();
        let spider = Multigraph::new(7, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 5), (2, 6)]).unwrap();
        assert_eq!(tad.edge_count(), 7);
        assert!(!is_isomorphic(&tad, &spider));
    }

    #[test]
    fn lollipop_bridge_structure() {
        for m in 4..8 {
            for n in 1..5 {
                let g = make_lollipop(m, n).unwrap();
                assert_eq!(g.edge_count(), m * (m - 1) / 2 + n);
                let d = g.degrees();
                assert_eq!(d.iter().filter(|&&x| x == m).count(), 1);
                assert_eq!(d.iter().filter(|&&x| x == 1).count(), 1);
                let rest: Vec<usize> = (1..m + n).collect();
                let parts = g.induced(&rest).components();
                assert_eq!(parts.len(), 2);
                assert!(parts.iter().any(|p| p.len() == m - 1));
                assert!(parts.iter().any(|p| p.len() == n));
            }
        }
    }

    #[test]
    fn loops_and_json() {
        let g = Multigraph::new(2, [(1, 0), (1, 1), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(g.degree(1), 4);
        let js = serde_json::to_string(&g).unwrap();
        assert_eq!(js, r#"{"vertices":2,"edges":[[0,1],[0,1],[1,1]]}"#);
        let back: Multigraph = serde_json::from_str(&js).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Multigraph>(r#"{"vertices":1,"edges":[[0,3]]}"#).is_err());
        assert!(g.to_dot().contains("1 -- 1;"));
    }

    #[test]
    fn canonical_matches_brute_force_exhaustively_on_four_vertices() {
        // Every simple graph on 4 vertices against every other.
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        let graphs: Vec<Multigraph> = (0..1u32 << pairs.len())
            .map(|mask| {
                Multigraph::new(4, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e)).unwrap()
            })
            .collect();
        for a in &graphs {
            for b in &graphs {
                assert_eq!(is_isomorphic(a, b), brute_iso(a, b));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn agrees_with_brute_force(a in arb_graph(7, 12), b in arb_graph(7, 12)) {
            prop_assert_eq!(is_isomorphic(&a, &b), brute_iso(&a, &b));
        }

        #[test]
        fn invariant_under_relabeling(g in arb_graph(9, 16), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
            perm.shuffle(&mut rng);
            let h = relabel(&g, &perm);
            prop_assert!(is_isomorphic(&g, &h));
            prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        }

        #[test]
        fn equivalence_relation(a in arb_graph(5, 6), b in arb_graph(5, 6), c in arb_graph(5, 6)) {
            prop_assert!(is_isomorphic(&a, &a));
            prop_assert_eq!(is_isomorphic(&a, &b), is_isomorphic(&b, &a));
            if is_isomorphic(&a, &b) && is_isomorphic(&b, &c) {
                prop_assert!(is_isomorphic(&a, &c));
            }
        }

        #[test]
        fn canonical_labeling_reproduces_form(g in arb_graph(8, 14)) {
            let (form, perm) = canonical_labeling(&g);
            let h = relabel(&g, &perm);
            prop_assert_eq!(h.edges(), form.edges.as_slice());
        }

        #[test]
        fn degree_counts_add_up(g in arb_graph(9, 20)) {
            let s = degree_stats(&g).unwrap();
            prop_assert_eq!(s.av, s.ev + s.ov);
            prop_assert!(s.av >= 1);
        }

        #[test]
        fn insertion_order_irrelevant(mut es in prop::collection::vec((0..6usize, 0..6usize), 0..12)) {
            let a = Multigraph::new(6, es.clone()).unwrap();
            es.reverse();
            let b = Multigraph::new(6, es.iter().map(|&(u, v)| (v, u))).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(canonical_form(&a), canonical_form(&b));
        }
    }
}
