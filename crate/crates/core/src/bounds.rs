//! Closed-form minimum bond-type and tile-type counts for lollipop, tadpole,
//! complete and cycle graphs, and lower bounds from appended paths.
//!
//! Long-path lollipop bounds are stated in terms of `m`: with `m = 2k` the
//! terms `n - 2k + 1` and `2k` read `n - m + 1` and `m`; with `m = 2k + 1`
//! the terms `n - 2k` and `2k + 1` read `n - m + 1` and `m`.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoundKind {
    B,
    T,
}

/// A known value or a closed range for a minimum count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundValue {
    pub exact: Option<u64>,
    pub lower: u64,
    pub upper: u64,
}

impl BoundValue {
    pub fn exact(v: u64) -> Self {
        BoundValue {
            exact: Some(v),
            lower: v,
            upper: v,
        }
    }

    pub fn range(lower: u64, upper: u64) -> Self {
        assert!(lower <= upper, "empty range {lower}..={upper}");
        if lower == upper {
            return BoundValue::exact(lower);
        }
        BoundValue {
            exact: None,
            lower,
            upper,
        }
    }

    pub fn contains(&self, v: u64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// A bound together with the family/scenario/regime row it comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bound {
    #[serde(flatten)]
    pub value: BoundValue,
    pub regime: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceFamily {
    Complete,
    Cycle,
}

fn ceil_half(x: u64) -> u64 {
    x.div_ceil(2)
}

fn parity(m: u64) -> &'static str {
    if m % 2 == 0 {
        "even"
    } else {
        "odd"
    }
}

fn bound(value: BoundValue, regime: String) -> Bound {
    Bound { value, regime }
}

/// `L_{m,n}`: `K_m` with a path of `n` vertices hung off one clique vertex.
/// `m = 3` is answered by the tadpole rows, since `K_3` is `C_3`.
pub fn lollipop_bound(kind: BoundKind, scenario: Scenario, m: u64, n: u64) -> Result<Bound> {
    if m < 3 || n < 1 {
        return Err(invalid(format!("lollipop needs m >= 3 and n >= 1, got m={m}, n={n}")));
    }
    if m == 3 {
        let mut b = tadpole_bound(kind, scenario, 3, n)?;
        b.regime = format!("lollipop/m3-as-{}", b.regime);
        return Ok(b);
    }
    let odd = m % 2 == 1;
    let reach = ceil_half(n - m.min(n) + 1);
    let (value, regime) = match (scenario, kind) {
        (Scenario::One, BoundKind::B) => (BoundValue::exact(1), "s1".to_string()),
        (Scenario::One, BoundKind::T) => {
            let v = if n == 1 { 3 } else { 4 };
            (BoundValue::exact(v), format!("s1/{}", if n == 1 { "single" } else { "longer" }))
        }
        (Scenario::Two, kind) if n <= m => {
            let v = match kind {
                BoundKind::B => n.max(u64::from(odd) + 1),
                BoundKind::T => n + if odd { 3 } else { 2 },
            };
            let row = if n == 1 { "single" } else { "short" };
            (BoundValue::exact(v), format!("s2/{row}/{}", parity(m)))
        }
        (Scenario::Two, BoundKind::B) => (
            BoundValue::range(reach + m - 1, n),
            format!("s2/long/{}", parity(m)),
        ),
        (Scenario::Two, BoundKind::T) => {
            let (extra, top) = if odd { (3, 3) } else { (2, 2) };
            (
                BoundValue::range(reach + m + extra, n + top),
                format!("s2/long/{}", parity(m)),
            )
        }
        (Scenario::Three, BoundKind::B) => {
            if n == 1 {
                (BoundValue::exact(m - 1), "s3/single".to_string())
            } else {
                (BoundValue::range(m + n - 2, m + n - 1), "s3/longer".to_string())
            }
        }
        (Scenario::Three, BoundKind::T) => (BoundValue::exact(m + n), "s3".to_string()),
    };
    Ok(bound(value, format!("lollipop/{regime}")))
}

/// Path regime of `Tad_{m,n}`: short below `ceil(m/2)`, long above `m`.
fn tadpole_regime(m: u64, n: u64) -> &'static str {
    if n < ceil_half(m) {
        "short"
    } else if n <= m {
        "medium"
    } else {
        "long"
    }
}

/// `Tad_{m,n}`: `C_m` with a path of `n` vertices hung off one cycle vertex.
///
/// The medium-regime tile value `n + 2` is the published one. At `n = m` the
/// exhaustive search beats it: `{a1:2, a2}; {~a1, a3}; {~a2, ~a3}; {a2}`
/// passes scenarios 2 and 3 for `Tad_{3,3}` with 4 tiles, and
/// `{a1:2, a2}; {~a1, a3}; {~a3, a4}; {~a2, ~a4}; {a2}` passes scenario 2 for
/// `Tad_{4,4}` with 5. Both pots force usage proportional to the target's
/// own tile counts, so every complex has order a multiple of `m + n`.
pub fn tadpole_bound(kind: BoundKind, scenario: Scenario, m: u64, n: u64) -> Result<Bound> {
    if m < 3 || n < 1 {
        return Err(invalid(format!("tadpole needs m >= 3 and n >= 1, got m={m}, n={n}")));
    }
    let half_up = ceil_half(m);
    let reach = ceil_half(n - m.min(n) + 1);
    let regime = tadpole_regime(m, n);
    let value = match (scenario, kind, regime) {
        (Scenario::One, BoundKind::B, _) => BoundValue::exact(1),
        (Scenario::One, BoundKind::T, _) => BoundValue::exact(3),
        (Scenario::Two, BoundKind::B, "short") => BoundValue::exact(half_up),
        (Scenario::Two, BoundKind::T, "short") => BoundValue::exact(half_up + 2),
        (Scenario::Two | Scenario::Three, BoundKind::B, "medium") => BoundValue::exact(n),
        (Scenario::Two | Scenario::Three, BoundKind::T, "medium") => BoundValue::exact(n + 2),
        (Scenario::Two, BoundKind::B, _) => BoundValue::range(reach + m - 1, n),
        (Scenario::Two, BoundKind::T, _) => BoundValue::range(reach + m + 1, n + 1),
        (Scenario::Three, BoundKind::B, "short") => BoundValue::exact(m / 2 + n),
        (Scenario::Three, BoundKind::T, "short") => BoundValue::exact(half_up + n + 1),
        (Scenario::Three, BoundKind::B, _) => BoundValue::exact(n),
        (Scenario::Three, BoundKind::T, _) => BoundValue::exact(n + 1),
    };
    let regime = if scenario == Scenario::One {
        "tadpole/s1".to_string()
    } else {
        format!("tadpole/s{}/{regime}/{}", scenario.level(), parity(m))
    };
    Ok(bound(value, regime))
}

/// Lower bound forced by a path of `n` vertices hung off a graph through a
/// cut vertex, where `m` is the order of the rest.
pub fn appended_path_lower_bound(kind: BoundKind, scenario: Scenario, m: u64, n: u64) -> Result<u64> {
    match scenario {
        Scenario::One => Err(invalid("appended-path bounds apply to scenarios 2 and 3")),
        Scenario::Three => Ok(n),
        Scenario::Two if n <= m => Ok(n),
        Scenario::Two => {
            let reach = ceil_half(n - m + 1);
            Ok(match kind {
                BoundKind::B => reach + m - 1,
                BoundKind::T => reach + m,
            })
        }
    }
}

/// Known values for complete graphs `K_m` and cycles `C_m`.
pub fn reference_bound(family: ReferenceFamily, kind: BoundKind, scenario: Scenario, m: u64) -> Result<Bound> {
    if m < 3 {
        return Err(invalid(format!("reference families need m >= 3, got {m}")));
    }
    let odd = m % 2 == 1;
    let v = match (family, scenario, kind) {
        (ReferenceFamily::Complete, Scenario::One, BoundKind::B) => 1,
        (ReferenceFamily::Complete, Scenario::One, BoundKind::T) => {
            if odd {
                1
            } else {
                2
            }
        }
        (ReferenceFamily::Complete, Scenario::Two, BoundKind::B) => 1 + u64::from(odd),
        (ReferenceFamily::Complete, Scenario::Two, BoundKind::T) => 2 + u64::from(odd),
        (ReferenceFamily::Complete, Scenario::Three, BoundKind::B) => m - 1,
        (ReferenceFamily::Complete, Scenario::Three, BoundKind::T) => m,
        (ReferenceFamily::Cycle, Scenario::One, _) => 1,
        (ReferenceFamily::Cycle, _, BoundKind::B) => ceil_half(m),
        (ReferenceFamily::Cycle, _, BoundKind::T) => ceil_half(m) + 1,
    };
    let name = match family {
        ReferenceFamily::Complete => "complete",
        ReferenceFamily::Cycle => "cycle",
    };
    Ok(bound(BoundValue::exact(v), format!("{name}/s{}", scenario.level())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S: [Scenario; 3] = Scenario::ALL;
    const K: [BoundKind; 2] = [BoundKind::B, BoundKind::T];

    #[test]
    fn lollipop_examples() {
        let v = lollipop_bound(BoundKind::T, Scenario::One, 6, 1).unwrap().value;
        assert_eq!(v.exact, Some(3));
        let v = lollipop_bound(BoundKind::B, Scenario::Two, 7, 1).unwrap().value;
        assert_eq!(v.exact, Some(2));
        let v = lollipop_bound(BoundKind::T, Scenario::Two, 6, 9).unwrap().value;
        assert_eq!((v.exact, v.lower, v.upper), (None, 10, 11));
        let v = lollipop_bound(BoundKind::T, Scenario::Two, 5, 3).unwrap().value;
        assert_eq!(v.exact, Some(6));
        let v = lollipop_bound(BoundKind::B, Scenario::Three, 5, 3).unwrap().value;
        assert_eq!((v.lower, v.upper), (6, 7));
        assert!(lollipop_bound(BoundKind::B, Scenario::Two, 2, 1).is_err());
        assert!(lollipop_bound(BoundKind::B, Scenario::Two, 5, 0).is_err());
    }

    #[test]
    fn lollipop_three_uses_tadpole_rows() {
        for s in S {
            for k in K {
                for n in 1..8 {
                    let l = lollipop_bound(k, s, 3, n).unwrap();
                    assert_eq!(l.value, tadpole_bound(k, s, 3, n).unwrap().value);
                    assert!(l.regime.contains("tadpole"));
                }
            }
        }
    }

    #[test]
    fn tadpole_examples() {
        let v = tadpole_bound(BoundKind::B, Scenario::Two, 5, 2).unwrap();
        assert_eq!(v.value.exact, Some(3));
        assert_eq!(v.regime, "tadpole/s2/short/odd");
        assert_eq!(tadpole_bound(BoundKind::T, Scenario::Three, 5, 2).unwrap().value.exact, Some(6));
        assert_eq!(tadpole_bound(BoundKind::B, Scenario::Three, 4, 7).unwrap().value.exact, Some(7));
        let long = tadpole_bound(BoundKind::B, Scenario::Two, 5, 7).unwrap().value;
        assert_eq!((long.lower, long.upper), (6, 7));
    }

    #[test]
    fn appended_path_examples() {
        assert_eq!(appended_path_lower_bound(BoundKind::B, Scenario::Two, 5, 5).unwrap(), 5);
        assert_eq!(appended_path_lower_bound(BoundKind::B, Scenario::Two, 5, 9).unwrap(), 7);
        assert_eq!(appended_path_lower_bound(BoundKind::T, Scenario::Two, 5, 9).unwrap(), 8);
        assert_eq!(appended_path_lower_bound(BoundKind::T, Scenario::Three, 4, 3).unwrap(), 3);
    }

    #[test]
    fn reference_examples() {
        let t = |f, k, s, m| reference_bound(f, k, s, m).unwrap().value.exact.unwrap();
        assert_eq!(t(ReferenceFamily::Complete, BoundKind::T, Scenario::Three, 5), 5);
        assert_eq!(t(ReferenceFamily::Cycle, BoundKind::B, Scenario::Two, 6), 3);
        assert_eq!(t(ReferenceFamily::Complete, BoundKind::B, Scenario::One, 9), 1);
        assert_eq!(t(ReferenceFamily::Cycle, BoundKind::T, Scenario::Three, 7), 5);
    }

    #[test]
    fn tadpole_boundary_rows_agree() {
        // n = ceil(m/2) is covered by the short and the medium scenario-2 rows.
        for m in 3..=40u64 {
            let n = ceil_half(m);
            let b = tadpole_bound(BoundKind::B, Scenario::Two, m, n).unwrap().value;
            let t = tadpole_bound(BoundKind::T, Scenario::Two, m, n).unwrap().value;
            assert_eq!(b.exact, Some(ceil_half(m)));
            assert_eq!(b.exact, Some(n));
            assert_eq!(t.exact, Some(ceil_half(m) + 2));
            assert_eq!(t.exact, Some(n + 2));
        }
    }

    fn all(kind: BoundKind, s: Scenario, m: u64, n: u64) -> Vec<BoundValue> {
        let mut v = vec![tadpole_bound(kind, s, m, n).unwrap().value];
        if m >= 4 {
            v.push(lollipop_bound(kind, s, m, n).unwrap().value);
        }
        v
    }

    proptest! {
        #[test]
        fn ranges_are_well_formed(m in 3u64..30, n in 1u64..30) {
            for s in S {
                for k in K {
                    for v in all(k, s, m, n) {
                        prop_assert!(v.lower <= v.upper);
                        prop_assert_eq!(v.exact.is_some(), v.lower == v.upper);
                    }
                }
            }
        }

        #[test]
        fn scenarios_are_monotone(m in 3u64..30, n in 1u64..30) {
            for k in K {
                let rows: Vec<Vec<BoundValue>> = S.iter().map(|&s| all(k, s, m, n)).collect();
                for i in 0..rows[0].len() {
                    prop_assert!(rows[0][i].lower <= rows[1][i].lower && rows[1][i].lower <= rows[2][i].lower);
                    prop_assert!(rows[0][i].upper <= rows[1][i].upper && rows[1][i].upper <= rows[2][i].upper);
                }
            }
        }

        #[test]
        fn tiles_exceed_bonds_in_scenario_two(m in 3u64..30, n in 1u64..30) {
            let b = all(BoundKind::B, Scenario::Two, m, n);
            let t = all(BoundKind::T, Scenario::Two, m, n);
            for (b, t) in b.iter().zip(&t) {
                prop_assert!(b.lower + 1 <= t.lower && b.upper + 1 <= t.upper);
            }
        }

        #[test]
        fn appended_path_bounds_below_family_bounds(m in 3u64..30, n in 1u64..30) {
            for s in [Scenario::Two, Scenario::Three] {
                for k in K {
                    let tad = tadpole_bound(k, s, m, n).unwrap().value;
                    prop_assert!(appended_path_lower_bound(k, s, m, n).unwrap() <= tad.lower);
                    if m >= 4 {
                        let lol = lollipop_bound(k, s, m, n).unwrap().value;
                        prop_assert!(appended_path_lower_bound(k, s, m, n).unwrap() <= lol.lower);
                    }
                }
            }
        }
    }
}
