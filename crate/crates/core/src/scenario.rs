//! Scenario 1–3 verdicts for a pot against a target graph.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::assembly::{for_each_complex, raw_assembly, realizes, smallest_with_counter, Counter, SearchBudget};
use crate::error::{invalid, Error, Result};
use crate::graph::{canonical_form, CanonicalForm, Multigraph};
use crate::pot::{LabeledAssembly, Pot, PotIndex};

/// How strict the requirements on a pot are:
/// one realizes the target; two also forbids smaller complexes; three also
/// forbids non-isomorphic complexes of the target's order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Scenario {
    One,
    Two,
    Three,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::One, Scenario::Two, Scenario::Three];

    pub fn level(self) -> u8 {
        match self {
            Scenario::One => 1,
            Scenario::Two => 2,
            Scenario::Three => 3,
        }
    }

    pub fn from_level(level: u8) -> Result<Self> {
        match level {
            1 => Ok(Scenario::One),
            2 => Ok(Scenario::Two),
            3 => Ok(Scenario::Three),
            _ => Err(invalid(format!("scenario must be 1, 2 or 3, got {level}"))),
        }
    }
}

impl TryFrom<u8> for Scenario {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        Scenario::from_level(v)
    }
}

impl From<Scenario> for u8 {
    fn from(s: Scenario) -> u8 {
        s.level()
    }
}

/// Enumeration limits for a check. `cap` bounds the largest complex order
/// examined; by default it is `|target| - 1` for scenario 2 and `|target|`
/// for scenario 3.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScenarioCaps {
    pub cap: Option<usize>,
    pub budget: SearchBudget,
}

/// The limits actually applied, echoed into verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CapsUsed {
    /// Largest order searched for strictly smaller complexes (0 if none).
    pub smaller_order_cap: usize,
    pub same_order_checked: bool,
    pub budget: u64,
    pub explored: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessReason {
    SmallerOrder,
    SameOrderNonIsomorphic,
    DoesNotRealize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub reason: WitnessReason,
    /// The offending complex; absent when the pot does not realize the target.
    pub graph: Option<Multigraph>,
    pub assembly: Option<LabeledAssembly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioVerdict {
    pub scenario: Scenario,
    pub outcome: Outcome,
    pub pass: bool,
    pub witness: Option<Witness>,
    /// An assembly of the target, when one exists.
    pub realization: Option<LabeledAssembly>,
    pub caps_used: CapsUsed,
}

pub fn check_scenario(pot: &Pot, target: &Multigraph, scenario: Scenario) -> ScenarioVerdict {
    check_scenario_with(pot, target, scenario, &ScenarioCaps::default())
}

pub fn check_scenario_with(
    pot: &Pot,
    target: &Multigraph,
    scenario: Scenario,
    caps: &ScenarioCaps,
) -> ScenarioVerdict {
    let n = target.vertex_count();
    let cap = caps.cap.unwrap_or(match scenario {
        Scenario::One => 0,
        Scenario::Two => n.saturating_sub(1),
        Scenario::Three => n,
    });
    let mut used = CapsUsed {
        smaller_order_cap: 0,
        same_order_checked: false,
        budget: caps.budget.max_nodes,
        explored: 0,
    };
    let realization = realizes(pot, target);
    let verdict = |outcome: Outcome, witness: Option<Witness>, used: CapsUsed, realization| ScenarioVerdict {
        scenario,
        outcome,
        pass: outcome == Outcome::Pass,
        witness,
        realization,
        caps_used: used,
    };
    if realization.is_none() {
        let w = Witness {
            reason: WitnessReason::DoesNotRealize,
            graph: None,
            assembly: None,
        };
        return verdict(Outcome::Fail, Some(w), used, None);
    }
    if scenario == Scenario::One {
        return verdict(Outcome::Pass, None, used, realization);
    }
    let idx = PotIndex::new(pot);
    let mut counter = Counter::new(caps.budget);
    used.smaller_order_cap = cap.min(n.saturating_sub(1));
    let smaller = smallest_with_counter(pot, &idx, used.smaller_order_cap, &mut counter);
    used.explored = counter.used;
    match smaller {
        Err(_) => return verdict(Outcome::Indeterminate, None, used, realization),
        Ok(Some((_, e))) => {
            let w = Witness {
                reason: WitnessReason::SmallerOrder,
                graph: Some(e.graph),
                assembly: Some(e.witness),
            };
            return verdict(Outcome::Fail, Some(w), used, realization);
        }
        Ok(None) => {}
    }
    if scenario == Scenario::Two || cap < n {
        return verdict(Outcome::Pass, None, used, realization);
    }
    used.same_order_checked = true;
    let form = canonical_form(target);
    let odd = same_order_intruder(pot, &idx, &form, n, &mut counter);
    used.explored = counter.used;
    match odd {
        Err(_) => verdict(Outcome::Indeterminate, None, used, realization),
        Ok(Some(w)) => verdict(Outcome::Fail, Some(w), used, realization),
        Ok(None) => verdict(Outcome::Pass, None, used, realization),
    }
}

/// A connected complex of order `n` not isomorphic to the target, if any.
pub(crate) fn same_order_intruder(
    pot: &Pot,
    idx: &PotIndex,
    target: &CanonicalForm,
    n: usize,
    counter: &mut Counter,
) -> std::result::Result<Option<Witness>, crate::assembly::Exceeded> {
    let mut found = None;
    let _ = for_each_complex(idx, n as u64, counter, &mut |g| {
        let graph = g.graph();
        if canonical_form(&graph) == *target {
            return ControlFlow::Continue(());
        }
        found = Some(Witness {
            reason: WitnessReason::SameOrderNonIsomorphic,
            assembly: Some(raw_assembly(pot, &g.tiles, &g.edges)),
            graph: Some(graph),
        });
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Outcome of checking a claimed optimal pot.
#[derive(Clone, Debug, Serialize)]
pub struct OptimalityReport {
    pub scenario: Scenario,
    pub target_order: usize,
    pub bond_types: usize,
    pub tile_types: usize,
    pub verdict: ScenarioVerdict,
    /// The pot passes at the claimed level, so the claimed counts are upper bounds.
    pub upper_bound_confirmed: bool,
    pub minimality: Option<Minimality>,
}

/// Exhaustive confirmation that fewer types cannot pass.
#[derive(Clone, Debug, Serialize)]
pub struct Minimality {
    pub bond: crate::search::SearchResult,
    pub tile: crate::search::SearchResult,
    pub bond_confirmed: bool,
    pub tile_confirmed: bool,
}

/// Check a pot claimed to be optimal; optionally run the exhaustive search
/// to confirm no smaller counts suffice.
pub fn verify_optimality(
    target: &Multigraph,
    scenario: Scenario,
    claimed_bonds: usize,
    claimed_tiles: usize,
    pot: &Pot,
    search: Option<&crate::search::SearchOptions>,
) -> Result<OptimalityReport> {
    if pot.bond_count() != claimed_bonds || pot.tile_count() != claimed_tiles {
        return Err(invalid(format!(
            "pot has {} bond types and {} tile types, claimed {claimed_bonds} and {claimed_tiles}",
            pot.bond_count(),
            pot.tile_count()
        )));
    }
    let verdict = check_scenario(pot, target, scenario);
    let minimality = match search {
        None => None,
        Some(opts) => {
            let bond = crate::search::min_bond_types(target, scenario, claimed_bonds, opts)?;
            let tile = crate::search::min_tile_types(target, scenario, claimed_tiles, opts)?;
            Some(Minimality {
                bond_confirmed: bond.minimum() == Some(claimed_bonds),
                tile_confirmed: tile.minimum() == Some(claimed_tiles),
                bond,
                tile,
            })
        }
    };
    Ok(OptimalityReport {
        scenario,
        target_order: target.vertex_count(),
        bond_types: pot.bond_count(),
        tile_types: pot.tile_count(),
        upper_bound_confirmed: verdict.pass,
        verdict,
        minimality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_isomorphic, make_path, make_tadpole};
    use crate::pot::{parse_pot, validate_assembly};

    #[test]
    fn scenario_levels() {
        assert_eq!(Scenario::from_level(2).unwrap(), Scenario::Two);
        assert!(Scenario::from_level(4).is_err());
        assert_eq!(serde_json::to_string(&Scenario::Three).unwrap(), "3");
    }

    #[test]
    fn single_edge_passes_everything() {
        let pot = parse_pot("{a}; {~a}").unwrap();
        let p2 = make_path(2).unwrap();
        for s in Scenario::ALL {
            assert!(check_scenario(&pot, &p2, s).pass);
        }
        let v = check_scenario(&pot, &make_path(3).unwrap(), Scenario::One);
        assert_eq!(v.witness.unwrap().reason, WitnessReason::DoesNotRealize);
    }

    #[test]
    fn tadpole_scenario_one_pot_fails_two() {
        let pot = parse_pot("{~a, a}; {~a, a:2}; {~a}").unwrap();
        let g = make_tadpole(5, 2).unwrap();
        assert!(check_scenario(&pot, &g, Scenario::One).pass);
        let v = check_scenario(&pot, &g, Scenario::Two);
        assert_eq!(v.outcome, Outcome::Fail);
        let w = v.witness.unwrap();
        assert_eq!(w.reason, WitnessReason::SmallerOrder);
        let graph = w.graph.unwrap();
        assert!(graph.vertex_count() < 7);
        assert!(validate_assembly(&w.assembly.unwrap(), &pot).unwrap());
    }

    #[test]
    fn same_order_intruder_found() {
        // Two copies of a bond type on a path of four let the path close into a cycle
        // of the same order? No: it makes a 2-cycle plus a path; check P_4 with a
        // pot that also builds the star K_{1,3}.
        let pot = parse_pot("{a}; {~a, b}; {~b, c}; {~c}; {a, ~a}").unwrap();
        let target = make_path(4).unwrap();
        let v = check_scenario(&pot, &target, Scenario::Three);
        assert_eq!(v.outcome, Outcome::Fail);
        let w = v.witness.unwrap();
        assert_eq!(w.reason, WitnessReason::SmallerOrder);

        let pot = parse_pot("{a:3}; {~a}; {a, ~a:2}; {~a:2, a:2}").unwrap();
        let star = Multigraph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let v = check_scenario_with(&pot, &star, Scenario::Three, &ScenarioCaps { cap: Some(4), budget: SearchBudget::default() });
        assert!(!v.pass);
    }

    #[test]
    fn verdict_monotone_and_indeterminate() {
        let pot = parse_pot("{a:2, b}; {~a, ~b}; {~a, a}").unwrap();
        let g = Multigraph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let tight = ScenarioCaps { cap: None, budget: SearchBudget::new(1) };
        let v = check_scenario_with(&pot, &g, Scenario::Two, &tight);
        assert!(matches!(v.outcome, Outcome::Indeterminate | Outcome::Fail));
        let full: Vec<bool> = Scenario::ALL.iter().map(|&s| check_scenario(&pot, &g, s).pass).collect();
        assert!(full.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn same_order_witness_is_not_the_target() {
        let pot = parse_pot("{a, b}; {~a, ~b}; {a, ~b}; {~a, b}").unwrap();
        let c4 = crate::graph::make_cycle(4).unwrap();
        let v = check_scenario(&pot, &c4, Scenario::Three);
        if let Some(w) = v.witness {
            if w.reason == WitnessReason::SameOrderNonIsomorphic {
                assert!(!is_isomorphic(w.graph.as_ref().unwrap(), &c4));
            }
        }
    }

    #[test]
    fn optimality_preconditions() {
        let pot = parse_pot("{a}; {~a}").unwrap();
        let p2 = make_path(2).unwrap();
        let r = verify_optimality(&p2, Scenario::One, 1, 2, &pot, None).unwrap();
        assert!(r.upper_bound_confirmed);
        assert!(verify_optimality(&p2, Scenario::One, 2, 2, &pot, None).is_err());
    }
}
