//! Closed-form pots for lollipop and tadpole targets, plus two pots that
//! break scenario 3 on long lollipop paths.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::pot::{HalfEdgeLabel, Pot, Tile};
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lollipop,
    Tadpole,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(m: usize) -> Self {
        if m % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// How long the appended path is relative to the clique or cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathRegime {
    /// `n = 1`.
    Single,
    /// Any `n >= 2`.
    Longer,
    /// Tadpole `n < ceil(m/2)`.
    Short,
    /// Tadpole `ceil(m/2) <= n <= m`.
    Medium,
    /// Tadpole `n > m`.
    Long,
    /// Recipe does not depend on `n`.
    Any,
}

/// Which construction produced a pot, and the type counts it is meant to have.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PotRecipe {
    pub family: Family,
    pub scenario: Scenario,
    pub parity: Parity,
    pub path: PathRegime,
    /// Stable tag naming the construction, e.g. `tadpole/s2/short/odd`.
    pub citation: String,
    pub bond_types: usize,
    pub tile_types: usize,
}

/// Arm spec: bond index, multiplicity, hatted.
type Arm = (usize, usize, bool);

fn up(i: usize, c: usize) -> Arm {
    (i, c, false)
}

fn hat(i: usize, c: usize) -> Arm {
    (i, c, true)
}

/// Hatted arms of each bond in `from..=to`, once each.
fn hats(from: usize, to: usize) -> Vec<Arm> {
    (from..=to).map(|i| hat(i, 1)).collect()
}

fn build(tiles: Vec<Vec<Arm>>, single_symbol: bool) -> Pot {
    let name = |i: usize| {
        if single_symbol {
            "a".to_string()
        } else {
            format!("a{i}")
        }
    };
    let tiles = tiles
        .into_iter()
        .map(|arms| {
            let labels = arms
                .into_iter()
                .flat_map(|(i, c, h)| {
                    let l = HalfEdgeLabel {
                        bond_type: name(i),
                        hatted: h,
                    };
                    std::iter::repeat(l).take(c)
                })
                .collect();
            Tile::new(labels).expect("recipes produce nonempty tiles")
        })
        .collect();
    Pot::new(tiles).expect("recipes produce distinct tiles")
}

/// Two-armed chain tile `{~a_{i-1}, a_i}`.
fn link(i: usize) -> Vec<Arm> {
    vec![hat(i - 1, 1), up(i, 1)]
}

fn check_lollipop(m: usize, n: usize) -> Result<()> {
    if m <= 3 {
        return Err(invalid(format!(
            "lollipop pots need m >= 4, got {m}; m = 3 is a tadpole"
        )));
    }
    if n == 0 {
        return Err(invalid("lollipop pots need n >= 1"));
    }
    Ok(())
}

fn check_tadpole(m: usize, n: usize) -> Result<()> {
    if m < 3 || n == 0 {
        return Err(invalid(format!("tadpole pots need m >= 3 and n >= 1, got ({m}, {n})")));
    }
    Ok(())
}

pub fn lollipop_recipe(scenario: Scenario, m: usize, n: usize) -> Result<PotRecipe> {
    check_lollipop(m, n)?;
    let parity = Parity::of(m);
    let single = n == 1;
    let path = if single { PathRegime::Single } else { PathRegime::Longer };
    let (b, t, path) = match (scenario, parity, single) {
        (Scenario::One, _, true) => (1, 3, path),
        (Scenario::One, _, false) => (1, 4, path),
        (Scenario::Two, Parity::Even, true) => (1, 3, path),
        (Scenario::Two, Parity::Even, false) => (n, n + 2, path),
        (Scenario::Two, Parity::Odd, true) => (2, 4, path),
        (Scenario::Two, Parity::Odd, false) => (n, n + 3, path),
        (Scenario::Three, _, _) => (m + n - 1, m + n, PathRegime::Any),
    };
    Ok(PotRecipe {
        family: Family::Lollipop,
        scenario,
        parity,
        path,
        citation: tag("lollipop", scenario, path, parity),
        bond_types: b,
        tile_types: t,
    })
}

pub fn tadpole_recipe(scenario: Scenario, m: usize, n: usize) -> Result<PotRecipe> {
    check_tadpole(m, n)?;
    let parity = Parity::of(m);
    let (half_up, half_down) = (m.div_ceil(2), m / 2);
    let path = if scenario == Scenario::One {
        PathRegime::Any
    } else if n < half_up {
        PathRegime::Short
    } else if n <= m {
        PathRegime::Medium
    } else {
        PathRegime::Long
    };
    let (b, t) = match (scenario, path) {
        (Scenario::One, _) => (1, 3),
        (Scenario::Two, PathRegime::Short) => (half_up, half_up + 2),
        (Scenario::Three, PathRegime::Short) => (half_down + n, half_up + n + 1),
        (_, PathRegime::Medium) => (n, n + 2),
        _ => (n, n + 1),
    };
    Ok(PotRecipe {
        family: Family::Tadpole,
        scenario,
        parity,
        path,
        citation: tag("tadpole", scenario, path, parity),
        bond_types: b,
        tile_types: t,
    })
}

fn tag(family: &str, s: Scenario, path: PathRegime, parity: Parity) -> String {
    let path = serde_json::to_value(path).expect("enum").as_str().unwrap_or("").to_string();
    let parity = match parity {
        Parity::Even => "even",
        Parity::Odd => "odd",
    };
    format!("{family}/s{}/{path}/{parity}", s.level())
}

/// Pot realizing `L_{m,n}` under the given scenario.
pub fn lollipop_pot(scenario: Scenario, m: usize, n: usize) -> Result<Pot> {
    check_lollipop(m, n)?;
    let k = m / 2;
    let even = m % 2 == 0;
    let tiles: Vec<Vec<Arm>> = match scenario {
        Scenario::One => {
            let mut ts = if even {
                vec![vec![up(0, m)], vec![up(0, k - 1), hat(0, k)]]
            } else {
                vec![vec![hat(0, k), up(0, k + 1)], vec![hat(0, k), up(0, k)]]
            };
            if n > 1 {
                ts.push(vec![hat(0, 1), up(0, 1)]);
            }
            ts.push(vec![hat(0, 1)]);
            return Ok(build(ts, true));
        }
        Scenario::Two if even && n == 1 => {
            vec![vec![up(1, m)], vec![up(1, k - 1), hat(1, k)], vec![hat(1, 1)]]
        }
        Scenario::Two if even => {
            let mut ts = vec![vec![up(1, 2 * k - 1), up(2, 1)], vec![up(1, k - 1), hat(1, k)]];
            ts.extend((3..=n).map(link));
            ts.push(vec![hat(n, 1), up(1, 1)]);
            ts.push(vec![hat(1, 1)]);
            ts
        }
        Scenario::Two if n == 1 => vec![
            vec![up(1, m)],
            vec![hat(1, 1), hat(2, k), up(2, k - 1)],
            vec![hat(1, 1), up(2, k), hat(2, k - 1)],
            vec![hat(1, 1)],
        ],
        Scenario::Two => {
            let mut ts = vec![
                vec![up(1, m)],
                vec![hat(1, 1), up(2, k - 1), hat(2, k)],
                vec![hat(1, 1), up(2, k), hat(2, k - 1)],
            ];
            ts.extend((4..=n + 2).map(|i| vec![hat(i - 3, 1), up(i - 2, 1)]));
            ts.push(vec![hat(n, 1)]);
            ts
        }
        Scenario::Three => {
            let mut ts = vec![vec![up(1, m - 1), up(m, 1)]];
            for i in 2..m {
                let mut t = hats(1, i - 1);
                t.push(up(i, m - i));
                ts.push(t);
            }
            ts.push(hats(1, m - 1));
            if n == 1 {
                ts.push(vec![hat(m, 1)]);
            } else {
                ts.push(vec![hat(m, 1), up(m + 1, 1)]);
                ts.extend((m + 2..m + n).map(link));
                ts.push(vec![hat(m + n - 1, 1)]);
            }
            ts
        }
    };
    Ok(build(strip(tiles), false))
}

fn strip(tiles: Vec<Vec<Arm>>) -> Vec<Vec<Arm>> {
    tiles
        .into_iter()
        .map(|t| t.into_iter().filter(|a| a.1 > 0).collect())
        .collect()
}

/// Pot realizing `Tad_{m,n}` under the given scenario.
pub fn tadpole_pot(scenario: Scenario, m: usize, n: usize) -> Result<Pot> {
    check_tadpole(m, n)?;
    if scenario == Scenario::One {
        return Ok(build(
            vec![vec![hat(0, 1), up(0, 1)], vec![hat(0, 1), up(0, 2)], vec![hat(0, 1)]],
            true,
        ));
    }
    let k = m / 2;
    let even = m % 2 == 0;
    let recipe = tadpole_recipe(scenario, m, n)?;
    let bridge_short = |j: usize| {
        if j == 1 {
            vec![up(1, 3)]
        } else {
            vec![up(1, 2), up(j, 1)]
        }
    };
    let tiles: Vec<Vec<Arm>> = match (recipe.path, scenario) {
        (PathRegime::Short, Scenario::Two) => {
            let mut ts = vec![bridge_short(k + 1 - n)];
            ts.extend((2..=k).map(link));
            if even {
                ts.push(vec![hat(k, 2)]);
            } else {
                ts.push(vec![hat(k, 1), hat(k + 1, 1)]);
                ts.push(vec![hat(k, 1), up(k + 1, 1)]);
            }
            ts.push(vec![hat(k, 1)]);
            ts
        }
        (PathRegime::Short, _) if even => {
            let mut ts = vec![vec![up(1, 2), up(k + 1, 1)]];
            ts.extend((2..=k).map(link));
            ts.push(vec![hat(k, 2)]);
            ts.extend((k + 2..=k + n).map(link));
            ts.push(vec![hat(k + n, 1)]);
            ts
        }
        (PathRegime::Short, _) => {
            let mut ts = vec![vec![up(1, 2), up(2, 1)]];
            ts.extend((2..=k + 1).map(link));
            ts.push(vec![hat(k + 1, 2)]);
            if n == 1 {
                ts.push(vec![hat(1, 1)]);
            } else {
                ts.push(vec![hat(1, 1), up(k + 2, 1)]);
                ts.extend((k + 4..=k + n + 1).map(|l| vec![hat(l - 2, 1), up(l - 1, 1)]));
                ts.push(vec![hat(k + n, 1)]);
            }
            ts
        }
        (PathRegime::Medium, _) => {
            let mut ts = vec![vec![up(1, 3)]];
            ts.extend((2..=n).map(link));
            ts.push(vec![hat(n, 1)]);
            if even {
                ts.push(vec![hat(k, 2)]);
            } else {
                ts.push(vec![hat(k, 1), hat(k + 1, 1)]);
            }
            ts
        }
        _ => {
            let mut ts = vec![vec![up(1, 2), hat(m, 1)]];
            ts.extend((2..=n).map(link));
            ts.push(vec![hat(n, 1)]);
            ts
        }
    };
    Ok(build(tiles, false))
}

/// Pots whose repeated bond types at the bridging vertex let a long path be
/// short-circuited into a smaller complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Counterexample {
    /// One bond type on every edge at the bridging vertex.
    SharedBridge,
    /// One bond type on one clique edge and the path edge at the bridging vertex.
    PairedBridge,
}

pub fn counterexample_pot(which: Counterexample, m: usize, n: usize) -> Result<Pot> {
    check_lollipop(m, n)?;
    let mut ts: Vec<Vec<Arm>> = match which {
        Counterexample::SharedBridge => {
            let mut ts = vec![vec![up(1, m)]];
            for i in 2..m {
                let mut t = hats(1, i - 1);
                t.push(up(i, m - i));
                ts.push(t);
            }
            ts
        }
        Counterexample::PairedBridge => {
            let mut first = vec![up(1, 2)];
            first.extend(hats(2, m - 1));
            let mut ts = vec![first];
            for i in 2..m {
                let mut t = hats(2, i - 1);
                t.push(up(i, m - i + 1));
                ts.push(t);
            }
            ts
        }
    };
    ts.push(hats(1, m - 1));
    if n == 1 {
        ts.push(vec![hat(1, 1)]);
    } else {
        ts.push(vec![hat(1, 1), up(m, 1)]);
        ts.extend((m + 2..m + n).map(|l| vec![hat(l - 2, 1), up(l - 1, 1)]));
        ts.push(vec![hat(m + n - 2, 1)]);
    }
    Ok(build(ts, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pot::format_pot;

    #[test]
    fn worked_texts() {
        assert_eq!(
            format_pot(&lollipop_pot(Scenario::Two, 6, 3).unwrap()),
            "{a1:5, a2}; {a1:2, ~a1:3}; {~a2, a3}; {a1, ~a3}; {~a1}"
        );
        assert_eq!(
            format_pot(&lollipop_pot(Scenario::One, 6, 1).unwrap()),
            "{a:6}; {a:2, ~a:3}; {~a}"
        );
        assert_eq!(
            format_pot(&lollipop_pot(Scenario::One, 5, 1).unwrap()),
            "{a:3, ~a:2}; {a:2, ~a:2}; {~a}"
        );
        assert_eq!(
            format_pot(&tadpole_pot(Scenario::Two, 5, 7).unwrap()),
            "{a1:2, ~a5}; {~a1, a2}; {~a2, a3}; {~a3, a4}; {~a4, a5}; {~a5, a6}; {~a6, a7}; {~a7}"
        );
        assert_eq!(
            format_pot(&tadpole_pot(Scenario::Two, 5, 2).unwrap()),
            "{a1:3}; {~a1, a2}; {~a2, ~a3}; {~a2, a3}; {~a2}"
        );
        assert_eq!(
            format_pot(&tadpole_pot(Scenario::Three, 6, 2).unwrap()),
            "{a1:2, a4}; {~a1, a2}; {~a2, a3}; {~a3:2}; {~a4, a5}; {~a5}"
        );
        assert_eq!(
            format_pot(&tadpole_pot(Scenario::One, 4, 4).unwrap()),
            "{a, ~a}; {a:2, ~a}; {~a}"
        );
    }

    #[test]
    fn lollipop_scenario_three_counts() {
        let p = lollipop_pot(Scenario::Three, 5, 3).unwrap();
        assert_eq!((p.tile_count(), p.bond_count()), (8, 7));
    }

    #[test]
    fn counterexample_texts() {
        assert_eq!(
            format_pot(&counterexample_pot(Counterexample::SharedBridge, 4, 3).unwrap()),
            "{a1:4}; {~a1, a2:2}; {~a1, ~a2, a3}; {~a1, ~a2, ~a3}; {~a1, a4}; {~a4, a5}; {~a5}"
        );
        assert_eq!(
            format_pot(&counterexample_pot(Counterexample::PairedBridge, 4, 2).unwrap()),
            "{a1:2, ~a2, ~a3}; {a2:3}; {~a2, a3:2}; {~a1, ~a2, ~a3}; {~a1, a4}; {~a4}"
        );
    }

    #[test]
    fn recipe_counts_match_generated_pots() {
        for s in [Scenario::One, Scenario::Two, Scenario::Three] {
            for m in 3..=9 {
                for n in 1..=9 {
                    if m >= 4 {
                        let r = lollipop_recipe(s, m, n).unwrap();
                        let p = lollipop_pot(s, m, n).unwrap();
                        assert_eq!((p.bond_count(), p.tile_count()), (r.bond_types, r.tile_types), "L({m},{n}) {s:?}");
                    }
                    let r = tadpole_recipe(s, m, n).unwrap();
                    let p = tadpole_pot(s, m, n).unwrap();
                    assert_eq!((p.bond_count(), p.tile_count()), (r.bond_types, r.tile_types), "Tad({m},{n}) {s:?}");
                }
            }
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(lollipop_pot(Scenario::One, 3, 2).is_err());
        assert!(lollipop_pot(Scenario::One, 4, 0).is_err());
        assert!(tadpole_pot(Scenario::Two, 2, 1).is_err());
        assert!(counterexample_pot(Counterexample::SharedBridge, 3, 1).is_err());
    }

    #[test]
    fn boundary_uses_medium_pot() {
        let r = tadpole_recipe(Scenario::Two, 5, 3).unwrap();
        assert_eq!(r.path, PathRegime::Medium);
        assert_eq!(r.citation, "tadpole/s2/medium/odd");
        let r = tadpole_recipe(Scenario::Two, 6, 2).unwrap();
        assert_eq!(r.path, PathRegime::Short);
    }
}
