//! Half-edge labels, tiles, pots, labelled assemblies and the pot text format.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::Multigraph;

/// Compare symbols so that digit runs compare numerically (`a2 < a10`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let b = s.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < b.len() {
            let digit = b[i].is_ascii_digit();
            let mut j = i;
            while j < b.len() && b[j].is_ascii_digit() == digit {
                j += 1;
            }
            out.push((digit, &s[i..j]));
            i = j;
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, sa), (db, sb)) in ca.iter().zip(&cb) {
        let ord = if *da && *db {
            let (ta, tb) = (sa.trim_start_matches('0'), sb.trim_start_matches('0'));
            ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb))
        } else {
            sa.cmp(sb)
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

/// One arm of a tile: a bond type, hatted or not.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfEdgeLabel {
    pub bond_type: String,
    pub hatted: bool,
}

impl HalfEdgeLabel {
    pub fn plain(bond: impl Into<String>) -> Self {
        HalfEdgeLabel {
            bond_type: bond.into(),
            hatted: false,
        }
    }

    pub fn hat(bond: impl Into<String>) -> Self {
        HalfEdgeLabel {
            bond_type: bond.into(),
            hatted: true,
        }
    }

    pub fn complement(&self) -> Self {
        HalfEdgeLabel {
            bond_type: self.bond_type.clone(),
            hatted: !self.hatted,
        }
    }
}

impl Ord for HalfEdgeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.bond_type, &other.bond_type).then(self.hatted.cmp(&other.hatted))
    }
}

impl PartialOrd for HalfEdgeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HalfEdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hatted {
            write!(f, "~")?;
        }
        write!(f, "{}", self.bond_type)
    }
}

/// A multiset of arms, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    arms: Vec<HalfEdgeLabel>,
}

impl Tile {
    pub fn new(mut arms: Vec<HalfEdgeLabel>) -> Result<Self> {
        if arms.is_empty() {
            return Err(invalid("a tile needs at least one arm"));
        }
        arms.sort();
        Ok(Tile { arms })
    }

    pub fn arms(&self) -> &[HalfEdgeLabel] {
        &self.arms
    }

    pub fn degree(&self) -> usize {
        self.arms.len()
    }

    /// Un-hatted minus hatted arms of `bond`.
    pub fn net(&self, bond: &str) -> i64 {
        self.arms
            .iter()
            .filter(|a| a.bond_type == bond)
            .map(|a| if a.hatted { -1 } else { 1 })
            .sum()
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.arms.iter().dedup_with_count().map(|(c, a)| {
            if c == 1 {
                a.to_string()
            } else {
                format!("{a}:{c}")
            }
        });
        write!(f, "{{{}}}", parts.format(", "))
    }
}

/// An ordered list of distinct tiles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pot {
    tiles: Vec<Tile>,
    bond_types: Vec<String>,
}

impl Pot {
    pub fn new(tiles: Vec<Tile>) -> Result<Self> {
        if tiles.is_empty() {
            return Err(invalid("a pot needs at least one tile"));
        }
        for (i, t) in tiles.iter().enumerate() {
            if tiles[..i].contains(t) {
                return Err(Error::DuplicateTile {
                    index: i,
                    tile: t.to_string(),
                });
            }
        }
        let mut bond_types: Vec<String> = tiles
            .iter()
            .flat_map(|t| t.arms.iter().map(|a| a.bond_type.clone()))
            .collect();
        bond_types.sort_by(|a, b| natural_cmp(a, b));
        bond_types.dedup();
        Ok(Pot { tiles, bond_types })
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    /// Bond types in natural symbol order.
    pub fn bond_types(&self) -> &[String] {
        &self.bond_types
    }

    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bond_types.len()
    }

    pub fn bond_index(&self, bond: &str) -> Option<usize> {
        self.bond_types
            .binary_search_by(|b| natural_cmp(b, bond))
            .ok()
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_pot(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pot serialises")
    }

    /// Same tiles with the tile list sorted; used as a cache key.
    pub fn sorted_key(&self) -> Vec<Tile> {
        let mut t = self.tiles.clone();
        t.sort();
        t
    }
}

impl fmt::Display for Pot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tiles.iter().format("; "))
    }
}

#[derive(Serialize, Deserialize)]
struct PotJson {
    tiles: Vec<Vec<String>>,
}

impl Serialize for Pot {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PotJson {
            tiles: self
                .tiles
                .iter()
                .map(|t| t.arms.iter().map(|a| a.to_string()).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pot {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = PotJson::deserialize(d)?;
        let tiles = j
            .tiles
            .into_iter()
            .map(|arms| {
                let arms = arms
                    .iter()
                    .map(|a| match a.strip_prefix('~') {
                        Some(b) if valid_ident(b) => Ok(HalfEdgeLabel::hat(b)),
                        None if valid_ident(a) => Ok(HalfEdgeLabel::plain(a.as_str())),
                        _ => Err(D::Error::custom(format!("bad arm {a:?}"))),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Tile::new(arms).map_err(D::Error::custom)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Pot::new(tiles).map_err(D::Error::custom)
    }
}

fn valid_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic()) && c.all(|ch| ch.is_ascii_alphanumeric())
}

/// Canonical text: tiles in order, arms sorted, repeats folded into `:N`.
pub fn format_pot(pot: &Pot) -> String {
    pot.to_string()
}

/// Parse the pot language: `{a:3}; {~a, b}; {~b}`.
pub fn parse_pot(text: &str) -> Result<Pot> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tiles: Vec<Tile> = Vec::new();
    p.skip_ws();
    loop {
        let tile = p.tile()?;
        if tiles.contains(&tile) {
            return Err(Error::DuplicateTile {
                index: tiles.len(),
                tile: tile.to_string(),
            });
        }
        tiles.push(tile);
        p.skip_ws();
        match p.peek() {
            None => break,
            Some(';') => {
                p.bump();
                p.skip_ws();
                if p.peek().is_none() {
                    break;
                }
            }
            Some(c) => return Err(p.err(format!("expected ';' or end of input, found {c:?}"))),
        }
    }
    Pot::new(tiles)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn err(&self, message: String) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.col,
            message,
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.err(format!("expected {want:?}, found {c:?}"))),
            None => Err(self.err(format!("expected {want:?}, found end of input"))),
        }
    }

    fn tile(&mut self) -> Result<Tile> {
        let (line, column) = (self.line, self.col);
        self.expect('{')?;
        self.skip_ws();
        if self.peek() == Some('}') {
            return Err(Error::EmptyTile { line, column });
        }
        let mut arms = Vec::new();
        loop {
            self.skip_ws();
            let hatted = if self.peek() == Some('~') {
                self.bump();
                self.skip_ws();
                true
            } else {
                false
            };
            let name = self.ident()?;
            self.skip_ws();
            let count = if self.peek() == Some(':') {
                self.bump();
                self.skip_ws();
                self.count()?
            } else {
                1
            };
            let label = HalfEdgeLabel {
                bond_type: name,
                hatted,
            };
            arms.extend(std::iter::repeat(label).take(count));
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some('}') => {
                    self.bump();
                    break;
                }
                Some(c) => return Err(self.err(format!("expected ',' or '}}', found {c:?}"))),
                None => return Err(self.err("unterminated tile".into())),
            }
        }
        Tile::new(arms)
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {}
            Some(c) => return Err(self.err(format!("expected bond symbol, found {c:?}"))),
            None => return Err(self.err("expected bond symbol, found end of input".into())),
        }
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_alphanumeric) {
            s.push(c);
            self.bump();
        }
        Ok(s)
    }

    fn count(&mut self) -> Result<usize> {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(self.err(format!("expected positive count, found {s:?}"))),
        }
    }
}

/// Bond type and orientation of one edge: the arrow points away from `unhatted_end`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub bond_type: String,
    pub unhatted_end: usize,
}

/// A tile assignment and edge labelling of a graph; `edge_labels[i]` labels `graph.edges()[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledAssembly {
    pub graph: Multigraph,
    pub vertex_tiles: Vec<usize>,
    pub edge_labels: Vec<EdgeLabel>,
}

impl LabeledAssembly {
    /// Build from unsorted `(u, v, label)` triples; edges and labels are sorted together.
    pub fn from_parts(
        vertices: usize,
        vertex_tiles: Vec<usize>,
        mut labelled: Vec<((usize, usize), EdgeLabel)>,
    ) -> Result<Self> {
        for ((u, v), _) in labelled.iter_mut() {
            if *u > *v {
                std::mem::swap(u, v);
            }
        }
        labelled.sort();
        let graph = Multigraph::new(vertices, labelled.iter().map(|(e, _)| *e))?;
        Ok(LabeledAssembly {
            graph,
            vertex_tiles,
            edge_labels: labelled.into_iter().map(|(_, l)| l).collect(),
        })
    }

    /// How many copies of each of the `tiles` tile types are used.
    pub fn tally(&self, tiles: usize) -> Vec<u64> {
        let mut c = vec![0; tiles];
        for &t in &self.vertex_tiles {
            if t < tiles {
                c[t] += 1;
            }
        }
        c
    }

    /// Directed rendering: arrows run from the un-hatted to the hatted half.
    pub fn to_dot(&self, pot: &Pot) -> String {
        const PALETTE: [&str; 8] = [
            "black", "red", "blue", "darkgreen", "orange", "purple", "brown", "cyan4",
        ];
        let mut s = String::from("digraph G {\n");
        for (v, &t) in self.vertex_tiles.iter().enumerate() {
            let tile = pot.tiles().get(t).map(|t| t.to_string()).unwrap_or_default();
            s.push_str(&format!("  {v} [label=\"{v}: t{}\" tooltip=\"{tile}\"];\n", t + 1));
        }
        for (&(u, v), l) in self.graph.edges().iter().zip(&self.edge_labels) {
            let (from, to) = if l.unhatted_end == u { (u, v) } else { (v, u) };
            let color = PALETTE[pot.bond_index(&l.bond_type).unwrap_or(0) % PALETTE.len()];
            s.push_str(&format!(
                "  {from} -> {to} [label=\"{}\" color=\"{color}\"];\n",
                l.bond_type
            ));
        }
        s.push_str("}\n");
        s
    }
}

/// Check that every vertex's induced arms equal its tile and every edge pairs
/// complementary halves. Dangling references are an error.
pub fn validate_assembly(asm: &LabeledAssembly, pot: &Pot) -> Result<bool> {
    let n = asm.graph.vertex_count();
    if asm.vertex_tiles.len() != n {
        return Err(invalid(format!(
            "{} tile assignments for {n} vertices",
            asm.vertex_tiles.len()
        )));
    }
    if asm.edge_labels.len() != asm.graph.edge_count() {
        return Err(invalid(format!(
            "{} edge labels for {} edges",
            asm.edge_labels.len(),
            asm.graph.edge_count()
        )));
    }
    if let Some(&t) = asm.vertex_tiles.iter().find(|&&t| t >= pot.tile_count()) {
        return Err(invalid(format!("tile index {t} not in pot")));
    }
    let mut induced: Vec<Vec<HalfEdgeLabel>> = vec![Vec::new(); n];
    for (&(u, v), l) in asm.graph.edges().iter().zip(&asm.edge_labels) {
        if l.unhatted_end != u && l.unhatted_end != v {
            return Err(invalid(format!(
                "edge ({u}, {v}) oriented from non-endpoint {}",
                l.unhatted_end
            )));
        }
        let other = if l.unhatted_end == u { v } else { u };
        induced[l.unhatted_end].push(HalfEdgeLabel::plain(l.bond_type.as_str()));
        induced[other].push(HalfEdgeLabel::hat(l.bond_type.as_str()));
    }
    Ok(induced.into_iter().enumerate().all(|(v, mut arms)| {
        arms.sort();
        arms == pot.tiles()[asm.vertex_tiles[v]].arms
    }))
}

/// Dense numeric view of a pot: labels are `2 * bond + hatted`.
#[derive(Clone, Debug)]
pub(crate) struct PotIndex {
    pub bonds: usize,
    /// Per tile: sorted `(label, multiplicity)`.
    pub arms: Vec<Vec<(usize, u32)>>,
    /// `net[i][j]`: net arms of bond `i` on tile `j`.
    pub net: Vec<Vec<i64>>,
    pub degree: Vec<usize>,
}

impl PotIndex {
    pub fn new(pot: &Pot) -> Self {
        let b = pot.bond_count();
        let mut net = vec![vec![0i64; pot.tile_count()]; b];
        let mut arms = Vec::new();
        for (j, t) in pot.tiles().iter().enumerate() {
            let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
            for a in t.arms() {
                let i = pot.bond_index(&a.bond_type).expect("bond listed");
                net[i][j] += if a.hatted { -1 } else { 1 };
                *counts.entry(2 * i + usize::from(a.hatted)).or_default() += 1;
            }
            arms.push(counts.into_iter().collect());
        }
        PotIndex {
            bonds: b,
            arms,
            net,
            degree: pot.tiles().iter().map(Tile::degree).collect(),
        }
    }

    pub fn tiles(&self) -> usize {
        self.arms.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tile(s: &str) -> Tile {
        parse_pot(s).unwrap().tiles()[0].clone()
    }

    #[test]
    fn natural_order() {
        let mut v = vec!["a10", "a2", "b", "a1", "a", "a02"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, vec!["a", "a1", "a02", "a2", "a10", "b"]);
    }

    #[test]
    fn parse_examples() {
        let p = parse_pot("{a:3}; {~a, b}; {~b}").unwrap();
        assert_eq!(p.tile_count(), 3);
        assert_eq!(p.tiles()[0].arms(), vec![HalfEdgeLabel::plain("a"); 3].as_slice());
        assert_eq!(p.tiles()[1].arms(), &[HalfEdgeLabel::hat("a"), HalfEdgeLabel::plain("b")]);
        assert_eq!(p.tiles()[2].arms(), &[HalfEdgeLabel::hat("b")]);
        assert_eq!(p.bond_types(), &["a".to_string(), "b".to_string()]);

        let four = parse_pot("{a,b,x}; {~a,~b,~x}; {a,~b,x}; {~a,b,~x}").unwrap();
        assert_eq!(four.tile_count(), 4);
        assert_eq!(four.bond_count(), 3);
        assert!(four.tiles().iter().all(|t| t.degree() == 3));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_pot("{}"), Err(Error::EmptyTile { line: 1, column: 1 })));
        assert!(matches!(parse_pot("{a}; {a}"), Err(Error::DuplicateTile { index: 1, .. })));
        assert!(matches!(parse_pot("{a, b}; {b, a}"), Err(Error::DuplicateTile { .. })));
        match parse_pot("{a};\n  {~a, 3b}") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_pot("{a:0}"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_pot("{a"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_pot(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse_pot("{a} {b}"), Err(Error::Syntax { .. })));
        assert!(parse_pot("{a};").is_ok());
    }

    #[test]
    fn format_examples() {
        assert_eq!(format_pot(&parse_pot("{~a}").unwrap()), "{~a}");
        assert_eq!(format_pot(&parse_pot("{a, a ,a}").unwrap()), "{a:3}");
        let p = parse_pot("{a1:5, a2}; {~a1:3, a1:2}; {a3, ~a2}; {~a3, a1}; {~a1}").unwrap();
        assert_eq!(format_pot(&p), "{a1:5, a2}; {a1:2, ~a1:3}; {~a2, a3}; {a1, ~a3}; {~a1}");
        let p = parse_pot("{a10, a2, ~a2}").unwrap();
        assert_eq!(format_pot(&p), "{a2, ~a2, a10}");
    }

    #[test]
    fn json_round_trip() {
        let p = parse_pot("{a, a, ~b}; {b}; {~a}").unwrap();
        let js = p.to_json();
        assert_eq!(js, r#"{"tiles":[["a","a","~b"],["b"],["~a"]]}"#);
        assert_eq!(Pot::from_json(&js).unwrap(), p);
        assert!(Pot::from_json(r#"{"tiles":[["1a"]]}"#).is_err());
        assert!(Pot::from_json(r#"{"tiles":[[]]}"#).is_err());
    }

    #[test]
    fn complement_and_net() {
        let x = HalfEdgeLabel::plain("a");
        assert_eq!(x.complement().complement(), x);
        assert!(x.complement().hatted);
        assert_eq!(tile("{a:3, ~a, b}").net("a"), 2);
        assert_eq!(tile("{a:3, ~a, b}").net("c"), 0);
    }

    fn loop_pot() -> Pot {
        parse_pot("{a, ~a}").unwrap()
    }

    #[test]
    fn validate_loop_vertex() {
        let asm = LabeledAssembly::from_parts(
            1,
            vec![0],
            vec![((0, 0), EdgeLabel { bond_type: "a".into(), unhatted_end: 0 })],
        )
        .unwrap();
        assert!(validate_assembly(&asm, &loop_pot()).unwrap());
    }

    #[test]
    fn validate_rejects_and_errors() {
        let pot = parse_pot("{a}; {~a}").unwrap();
        let good = LabeledAssembly::from_parts(
            2,
            vec![0, 1],
            vec![((0, 1), EdgeLabel { bond_type: "a".into(), unhatted_end: 0 })],
        )
        .unwrap();
        assert!(validate_assembly(&good, &pot).unwrap());
        let mut flipped = good.clone();
        flipped.edge_labels[0].unhatted_end = 1;
        assert!(!validate_assembly(&flipped, &pot).unwrap());
        let mut dangling = good.clone();
        dangling.vertex_tiles[1] = 7;
        assert!(validate_assembly(&dangling, &pot).is_err());
        let mut off = good.clone();
        off.edge_labels[0].unhatted_end = 5;
        assert!(validate_assembly(&off, &pot).is_err());
        let mut short = good;
        short.vertex_tiles.pop();
        assert!(validate_assembly(&short, &pot).is_err());
    }

    fn arb_pot() -> impl Strategy<Value = Pot> {
        let arm = (0..4usize, any::<bool>()).prop_map(|(b, h)| HalfEdgeLabel {
            bond_type: format!("a{}", [1, 2, 10, 11][b]),
            hatted: h,
        });
        let tile = prop::collection::vec(arm, 1..6).prop_map(|a| Tile::new(a).unwrap());
        prop::collection::vec(tile, 1..6).prop_filter_map("distinct tiles", |ts| Pot::new(ts).ok())
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(p in arb_pot()) {
            let text = format_pot(&p);
            let q = parse_pot(&text).unwrap();
            prop_assert_eq!(&q, &p);
            prop_assert_eq!(format_pot(&q), text);
            prop_assert_eq!(Pot::from_json(&p.to_json()).unwrap(), p);
        }

        #[test]
        fn index_nets_match_tiles(p in arb_pot()) {
            let idx = PotIndex::new(&p);
            for (i, b) in p.bond_types().iter().enumerate() {
                for (j, t) in p.tiles().iter().enumerate() {
                    prop_assert_eq!(idx.net[i][j], t.net(b));
                }
            }
        }
    }
}
