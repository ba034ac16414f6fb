//! Construction matrices, exact parametric spectra and integer usage vectors.

use std::fmt::Write as _;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::{json, Value};

use crate::pot::{Pot, PotIndex};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `{"num": n, "den": d}`; falls back to decimal strings beyond 64 bits.
pub fn rational_json(q: &Rational) -> Value {
    fn int(x: &BigInt) -> Value {
        x.to_i64().map(Value::from).unwrap_or_else(|| Value::from(x.to_string()))
    }
    json!({ "num": int(q.numer()), "den": int(q.denom()) })
}

fn show(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Augmented matrix: one row per bond type (net arm counts), then a row of ones;
/// the last column is `(0, …, 0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionMatrix {
    bond_types: Vec<String>,
    rows: Vec<Vec<Rational>>,
}

impl ConstructionMatrix {
    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn bond_types(&self) -> &[String] {
        &self.bond_types
    }

    /// Number of tile columns (excluding the augmented column).
    pub fn tiles(&self) -> usize {
        self.rows[0].len() - 1
    }

    /// Integer entries, convenient for comparisons in tests and reports.
    pub fn as_integers(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|q| q.to_integer().to_i64().expect("small entry")).collect())
            .collect()
    }

    /// Does `r` satisfy every row exactly?
    pub fn satisfied_by(&self, r: &[Rational]) -> bool {
        let p = self.tiles();
        r.len() == p
            && self.rows.iter().all(|row| {
                let lhs: Rational = row[..p].iter().zip(r).map(|(a, x)| a * x).sum();
                lhs == row[p]
            })
    }

    /// Is `v` a direction of the solution set (`M v = 0` on the coefficient part)?
    pub fn annihilates(&self, v: &[Rational]) -> bool {
        let p = self.tiles();
        v.len() == p
            && self.rows.iter().all(|row| {
                row[..p].iter().zip(v).map(|(a, x)| a * x).sum::<Rational>().is_zero()
            })
    }

    /// Right-aligned text table with a `|` before the augmented column.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(show).collect()).collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        let label_w = self.bond_types.iter().map(String::len).max().unwrap_or(0).max(1);
        let mut s = String::new();
        for (i, row) in cells.iter().enumerate() {
            let label = self.bond_types.get(i).map(String::as_str).unwrap_or("Σ");
            let _ = write!(s, "{label:>label_w$} [");
            let p = row.len() - 1;
            for (j, c) in row.iter().enumerate() {
                if j == p {
                    let _ = write!(s, " |");
                }
                let _ = write!(s, " {c:>width$}");
            }
            s.push_str(" ]\n");
        }
        s
    }
}

impl Serialize for ConstructionMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ConstructionMatrix", 2)?;
        st.serialize_field("bond_types", &self.bond_types)?;
        let rows: Vec<Vec<Value>> = self.rows.iter().map(|r| r.iter().map(rational_json).collect()).collect();
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

pub fn construction_matrix(pot: &Pot) -> ConstructionMatrix {
    let idx = PotIndex::new(pot);
    let p = pot.tile_count();
    let mut rows: Vec<Vec<Rational>> = idx
        .net
        .iter()
        .map(|r| {
            r.iter()
                .map(|&z| Rational::from_integer(z.into()))
                .chain(std::iter::once(Rational::zero()))
                .collect()
        })
        .collect();
    rows.push(vec![Rational::one(); p + 1]);
    ConstructionMatrix {
        bond_types: pot.bond_types().to_vec(),
        rows,
    }
}

/// The affine solution set `particular + span(basis)` of a construction matrix.
/// Proportions are the points of this set with all components in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    pub particular: Vec<Rational>,
    pub basis: Vec<Vec<Rational>>,
    /// Column index of each basis vector's free variable.
    pub free: Vec<usize>,
}

impl Spectrum {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn is_unique(&self) -> bool {
        self.basis.is_empty()
    }

    /// `particular + Σ params[k] · basis[k]`.
    pub fn point(&self, params: &[Rational]) -> Vec<Rational> {
        assert_eq!(params.len(), self.basis.len(), "one parameter per basis vector");
        let mut r = self.particular.clone();
        for (c, v) in params.iter().zip(&self.basis) {
            for (x, y) in r.iter_mut().zip(v) {
                *x += c * y;
            }
        }
        r
    }

    /// Least common denominator of a unique solution.
    pub fn common_denominator(&self) -> Option<BigInt> {
        self.is_unique().then(|| {
            self.particular
                .iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
        })
    }

    /// Whether the given point lies in the solution set of `m`.
    pub fn contains(&self, m: &ConstructionMatrix, r: &[Rational]) -> bool {
        m.satisfied_by(r)
    }
}

impl Serialize for Spectrum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let vec = |v: &[Rational]| v.iter().map(rational_json).collect::<Vec<_>>();
        let mut st = s.serialize_struct("Spectrum", 3)?;
        st.serialize_field("particular", &vec(&self.particular))?;
        st.serialize_field("basis", &self.basis.iter().map(|b| vec(b)).collect::<Vec<_>>())?;
        st.serialize_field("free", &self.free)?;
        st.end()
    }
}

/// Solve `M r = (0, …, 0, 1)` exactly. `None` means the system is inconsistent
/// (the pot cannot form any complete complex).
///
/// Fraction-free elimination with the leftmost usable column and smallest row
/// as pivot, followed by exact back substitution. Free variables are zero in
/// the particular solution.
pub fn solve_spectrum(m: &ConstructionMatrix) -> Option<Spectrum> {
    let p = m.tiles();
    let mut a: Vec<Vec<BigInt>> = m
        .rows
        .iter()
        .map(|r| r.iter().map(|q| q.to_integer()).collect())
        .collect();
    let rows = a.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..p {
        if r == rows {
            break;
        }
        let Some(i) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, i);
        for i in r + 1..rows {
            for j in c + 1..=p {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "fraction-free step is exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[p].is_zero()) {
        return None;
    }
    let mut q: Vec<Vec<Rational>> = a[..r]
        .iter()
        .map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    for k in (0..r).rev() {
        let piv = q[k][pivots[k]].clone();
        for x in q[k].iter_mut() {
            *x /= &piv;
        }
        for up in 0..k {
            let f = q[up][pivots[k]].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..=p {
                let d = &f * &q[k][j];
                q[up][j] -= d;
            }
        }
    }
    let free: Vec<usize> = (0..p).filter(|c| !pivots.contains(c)).collect();
    let mut particular = vec![Rational::zero(); p];
    for (k, &c) in pivots.iter().enumerate() {
        particular[c] = q[k][p].clone();
    }
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); p];
            v[f] = Rational::one();
            for (k, &c) in pivots.iter().enumerate() {
                v[c] = -q[k][f].clone();
            }
            v
        })
        .collect();
    Some(Spectrum {
        particular,
        basis,
        free,
    })
}

/// Nonnegative tile counts whose net arm count vanishes for every bond type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct UsageVector {
    pub counts: Vec<u64>,
}

impl UsageVector {
    pub fn order(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_balanced(&self, pot: &Pot) -> bool {
        let idx = PotIndex::new(pot);
        self.counts.len() == pot.tile_count() && balanced(&idx, &self.counts)
    }
}

fn balanced(idx: &PotIndex, counts: &[u64]) -> bool {
    idx.net
        .iter()
        .all(|row| row.iter().zip(counts).map(|(&z, &c)| z * c as i64).sum::<i64>() == 0)
}

/// Visit every usage vector of the given order in lexicographic order.
pub(crate) fn for_each_usage<F>(idx: &PotIndex, order: u64, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[u64]) -> ControlFlow<()>,
{
    let p = idx.tiles();
    let b = idx.bonds;
    if p == 0 {
        return ControlFlow::Continue(());
    }
    // Per bond, min and max net over tiles j.. (suffix bounds).
    let mut lo = vec![vec![0i64; b]; p + 1];
    let mut hi = vec![vec![0i64; b]; p + 1];
    for j in (0..p).rev() {
        for i in 0..b {
            let z = idx.net[i][j];
            lo[j][i] = if j + 1 < p { lo[j + 1][i].min(z) } else { z };
            hi[j][i] = if j + 1 < p { hi[j + 1][i].max(z) } else { z };
        }
    }
    let mut counts = vec![0u64; p];
    let mut sums = vec![0i64; b];
    fn rec<F: FnMut(&[u64]) -> ControlFlow<()>>(
        j: usize,
        left: u64,
        idx: &PotIndex,
        lo: &[Vec<i64>],
        hi: &[Vec<i64>],
        counts: &mut Vec<u64>,
        sums: &mut Vec<i64>,
        f: &mut F,
    ) -> ControlFlow<()> {
        let p = counts.len();
        let feasible = (0..sums.len()).all(|i| {
            let r = left as i64;
            sums[i] + r * lo[j][i] <= 0 && sums[i] + r * hi[j][i] >= 0
        });
        if !feasible {
            return ControlFlow::Continue(());
        }
        if j == p - 1 {
            counts[j] = left;
            let ok = sums.iter().enumerate().all(|(i, s)| s + left as i64 * idx.net[i][j] == 0);
            let res = if ok { f(counts) } else { ControlFlow::Continue(()) };
            counts[j] = 0;
            return res;
        }
        for c in 0..=left {
            counts[j] = c;
            for (i, s) in sums.iter_mut().enumerate() {
                *s += c as i64 * idx.net[i][j];
            }
            let res = rec(j + 1, left - c, idx, lo, hi, counts, sums, f);
            for (i, s) in sums.iter_mut().enumerate() {
                *s -= c as i64 * idx.net[i][j];
            }
            counts[j] = 0;
            res?;
        }
        ControlFlow::Continue(())
    }
    rec(0, order, idx, &lo, &hi, &mut counts, &mut sums, &mut f)
}

/// All usage vectors of exactly this order, lexicographically ascending.
pub fn usage_vectors(pot: &Pot, order: u64) -> Vec<UsageVector> {
    let idx = PotIndex::new(pot);
    let mut out = Vec::new();
    let _ = for_each_usage(&idx, order, |c| {
        out.push(UsageVector { counts: c.to_vec() });
        ControlFlow::Continue(())
    });
    out
}

/// Smallest order `N <= cap` admitting a usage vector, with the
/// lexicographically smallest vector of that order.
pub fn min_usage_order(pot: &Pot, cap: u64) -> Option<(u64, UsageVector)> {
    let idx = PotIndex::new(pot);
    (1..=cap).find_map(|n| {
        let mut found = None;
        let _ = for_each_usage(&idx, n, |c| {
            found = Some(UsageVector { counts: c.to_vec() });
            ControlFlow::Break(())
        });
        found.map(|u| (n, u))
    })
}

/// Is every component of `r` within `[0, 1]`?
pub fn is_proportion(r: &[Rational]) -> bool {
    r.iter().all(|x| !x.is_negative() && *x <= Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pot::parse_pot;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    #[test]
    fn single_edge_pot() {
        let m = construction_matrix(&parse_pot("{a}; {~a}").unwrap());
        assert_eq!(m.as_integers(), vec![vec![1, -1, 0], vec![1, 1, 1]]);
        let s = solve_spectrum(&m).unwrap();
        assert!(s.is_unique());
        assert_eq!(s.particular, vec![q(1, 2), q(1, 2)]);
        assert_eq!(min_usage_order(&parse_pot("{a}; {~a}").unwrap(), 5).unwrap().0, 2);
    }

    #[test]
    fn one_free_parameter() {
        let pot = parse_pot("{a:4}; {a, ~a:2}; {~a}").unwrap();
        let m = construction_matrix(&pot);
        assert_eq!(m.as_integers(), vec![vec![4, -1, -1, 0], vec![1, 1, 1, 1]]);
        let s = solve_spectrum(&m).unwrap();
        assert_eq!(s.particular, vec![q(1, 5), q(4, 5), q(0, 1)]);
        assert_eq!(s.basis, vec![vec![q(0, 1), q(-1, 1), q(1, 1)]]);
        assert_eq!(s.free, vec![2]);
    }

    #[test]
    fn empty_spectrum() {
        let m = construction_matrix(&parse_pot("{a}; {b, a}").unwrap());
        assert!(solve_spectrum(&m).is_none());
        assert!(min_usage_order(&parse_pot("{a}; {a, a}").unwrap(), 10).is_none());
    }

    #[test]
    fn zero_net_tile_has_order_one() {
        let pot = parse_pot("{a, ~a}").unwrap();
        let (n, u) = min_usage_order(&pot, 5).unwrap();
        assert_eq!((n, u.counts), (1, vec![1]));
    }

    #[test]
    fn lexicographically_smallest() {
        let pot = parse_pot("{a}; {~a}; {a, ~a}").unwrap();
        assert_eq!(usage_vectors(&pot, 2).iter().map(|u| u.counts.clone()).collect::<Vec<_>>(),
            vec![vec![0, 0, 2], vec![1, 1, 0]]);
        assert_eq!(min_usage_order(&pot, 3).unwrap().1.counts, vec![0, 0, 1]);
    }

    #[test]
    fn text_layout() {
        let m = construction_matrix(&parse_pot("{a:4}; {a, ~a:2}; {~a}").unwrap());
        assert_eq!(m.to_text(), "a [  4 -1 -1 |  0 ]\nΣ [  1  1  1 |  1 ]\n");
        let js = serde_json::to_value(&m).unwrap();
        assert_eq!(js["rows"][0][1], json!({"num": -1, "den": 1}));
    }

    fn arb_pot() -> impl Strategy<Value = Pot> {
        let arm = (0..3usize, any::<bool>()).prop_map(|(b, h)| {
            let s = ["a", "b", "c"][b];
            if h { crate::pot::HalfEdgeLabel::hat(s) } else { crate::pot::HalfEdgeLabel::plain(s) }
        });
        let tile = prop::collection::vec(arm, 1..5).prop_map(|a| crate::pot::Tile::new(a).unwrap());
        prop::collection::vec(tile, 1..6).prop_filter_map("distinct", |t| Pot::new(t).ok())
    }

    proptest! {
        #[test]
        fn solutions_satisfy_matrix(pot in arb_pot(), params in prop::collection::vec((-20i64..20, 1i64..9), 0..8)) {
            let m = construction_matrix(&pot);
            if let Some(s) = solve_spectrum(&m) {
                prop_assert!(m.satisfied_by(&s.particular));
                for v in &s.basis {
                    prop_assert!(m.annihilates(v));
                    prop_assert!(v.iter().sum::<Rational>().is_zero());
                }
                let ps: Vec<Rational> = (0..s.dimension()).map(|k| {
                    let (n, d) = params.get(k).copied().unwrap_or((0, 1));
                    q(n, d)
                }).collect();
                prop_assert!(m.satisfied_by(&s.point(&ps)));
            }
        }

        #[test]
        fn usage_vectors_balance_and_double(pot in arb_pot()) {
            let m = construction_matrix(&pot);
            if let Some((n, u)) = min_usage_order(&pot, 6) {
                prop_assert_eq!(u.order(), n);
                prop_assert!(u.is_balanced(&pot));
                // A usage vector scaled to proportions solves the matrix.
                let r: Vec<Rational> = u.counts.iter().map(|&c| q(c as i64, n as i64)).collect();
                prop_assert!(solve_spectrum(&m).is_some());
                prop_assert!(m.satisfied_by(&r));
                let doubled = usage_vectors(&pot, 2 * n);
                prop_assert!(doubled.iter().any(|d| d.counts.iter().zip(&u.counts).all(|(a, b)| *a == 2 * b)));
                for k in 1..n {
                    prop_assert!(usage_vectors(&pot, k).is_empty());
                }
            }
        }

        #[test]
        fn enumeration_matches_brute_force(pot in arb_pot(), order in 1u64..5) {
            let p = pot.tile_count();
            let idx = PotIndex::new(&pot);
            let mut brute: Vec<Vec<u64>> = (0..p)
                .map(|_| 0..=order)
                .multi_cartesian_product()
                .filter(|c| c.iter().sum::<u64>() == order && balanced(&idx, c))
                .collect();
            brute.sort();
            let got: Vec<Vec<u64>> = usage_vectors(&pot, order).into_iter().map(|u| u.counts).collect();
            prop_assert_eq!(got, brute);
        }
    }
}
