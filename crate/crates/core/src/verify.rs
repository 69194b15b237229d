//! Exhaustive verification suites over enumerated lattices and chainmails.
//!
//! Each suite evaluates the stated equivalences and implications on every
//! structure up to a size bound and lists every violation it finds. A suite
//! can be run with a seeded fault, which corrupts one computed quantity so
//! the suite must report violations.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use crate::bitset::ElementSet;
use crate::canon::is_isomorphic;
use crate::category::{
    chainmail_morphisms, check_connectivity_hom_consequences, check_epsilon_naturality, check_eta_naturality,
    check_triangle_identities, connectivity_homs, d_adjoint_table, d_on_morphism_table, hom_set_bijection,
    right_adjoint_table, unit_eta, Counit, Role,
};
use crate::chainmail::{as_chainmail, d_lattice, Chainmail};
use crate::enumeration::posets_up_to;
use crate::error::{Error, Result};
use crate::lattice::{as_complete_lattice, CompleteLattice, Condition, NuClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Implications between the four connectedness conditions, plus the
    /// lemmas on chained sets, unique separation and decomposition.
    EConditions,
    /// Separated sets of connected elements versus local connectivity, and
    /// the counit being an isomorphism exactly for locally connected lattices.
    SeparationIso,
    /// The three descriptions of subchainmails agree, and the lattice of
    /// totally disconnected sets computes joins and meets as subchainmails.
    Subchainmails,
    /// Chainmails are recovered from their lattice of totally disconnected
    /// sets, and locally connected lattices from their connected elements.
    UnitCounitIso,
    /// Hom-set bijection, triangle identities, naturality and properties of
    /// connectivity homomorphisms.
    Adjunction,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::EConditions, Suite::SeparationIso, Suite::Subchainmails, Suite::UnitCounitIso, Suite::Adjunction];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Suite::EConditions => "e-conditions",
            Suite::SeparationIso => "thmD",
            Suite::Subchainmails => "thmF",
            Suite::UnitCounitIso => "thmH",
            Suite::Adjunction => "adjunction",
        }
    }

    /// Default size bound: lattices and chainmails up to this many elements
    /// (for the adjunction, lattices up to this size and chainmails one smaller).
    pub fn default_max_size(self) -> usize {
        match self {
            Suite::Adjunction => 5,
            _ => 6,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Malformed(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    pub max_size: Option<usize>,
    /// Corrupt one computed quantity so the suite must fail.
    pub seeded_fault: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub max_size: usize,
    /// Structures examined.
    pub structures: usize,
    /// Individual checks evaluated.
    pub checks: u64,
    pub violations: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Tally {
    checks: u64,
    violations: Vec<String>,
}

impl Tally {
    fn new() -> Tally {
        Tally { checks: 0, violations: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    /// Record a theorem violation; propagate any other error.
    fn outcome<T>(&mut self, r: Result<T>, context: impl FnOnce() -> String) -> Result<Option<T>> {
        self.checks += 1;
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e) if e.is_theorem_violation() => {
                self.violations.push(format!("{}: {e}", context()));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

/// Every complete lattice on at most `n` elements, one per isomorphism class.
pub fn lattices_up_to(n: usize) -> Result<Vec<CompleteLattice>> {
    Ok(posets_up_to(n)?.iter().filter_map(|p| as_complete_lattice(p).ok()).collect())
}

/// Every chainmail on at most `n` elements (the empty one included), one per
/// isomorphism class.
pub fn chainmails_up_to(n: usize) -> Result<Vec<Chainmail>> {
    Ok(posets_up_to(n)?.iter().filter_map(|p| as_chainmail(p).ok()).collect())
}

pub fn run_suite(suite: Suite, opts: VerifyOptions) -> Result<SuiteReport> {
    let max_size = opts.max_size.unwrap_or(suite.default_max_size());
    let fault = opts.seeded_fault;
    let mut t = Tally::new();
    let structures = match suite {
        Suite::EConditions => e_conditions(max_size, fault, &mut t)?,
        Suite::SeparationIso => separation_iso(max_size, fault, &mut t)?,
        Suite::Subchainmails => subchainmails(max_size, fault, &mut t)?,
        Suite::UnitCounitIso => unit_counit_iso(max_size, fault, &mut t)?,
        Suite::Adjunction => adjunction(max_size, fault, &mut t)?,
    };
    Ok(SuiteReport { suite, max_size, structures, checks: t.checks, violations: t.violations })
}

fn e_conditions(max_size: usize, fault: bool, t: &mut Tally) -> Result<usize> {
    let lattices = lattices_up_to(max_size)?;
    for (li, l) in lattices.iter().enumerate() {
        let lc = l.is_locally_connected();
        for a in 0..l.size() {
            let mut e = Condition::ALL.map(|c| l.check_condition(a, c));
            if fault {
                e[1] = !e[1];
            }
            let [e1, e2, e3, e4] = e;
            let at = || format!("lattice #{li} element {a}");
            t.check(!e4 || e1, || format!("{}: E4 without E1", at()));
            t.check(!e1 || e2, || format!("{}: E1 without E2", at()));
            t.check(!e3 || e2, || format!("{}: E3 without E2", at()));
            t.check(!e4 || e3, || format!("{}: E4 without E3", at()));
            if lc {
                t.check(!e2 || e4, || format!("{}: E2 without E4 in a locally connected lattice", at()));
            }
            t.check(l.is_connected(a) == e4, || format!("{}: connected-element scan disagrees with E4", at()));
        }

        let connected = l.connected_elements().clone();
        // the join of a chained set of connected elements is connected
        let members = connected.to_vec();
        if members.len() <= 12 {
            for mask in 1u64..1 << members.len() {
                let c: ElementSet =
                    members.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &x)| x).collect();
                if l.is_chained(&c) {
                    let j = l.join_set(&c);
                    t.check(l.is_connected(j), || {
                        format!("lattice #{li}: chained set {:?} has a disconnected join", c.to_vec())
                    });
                }
            }
        }
        // separated sets of connected elements are determined by their joins
        let mut by_join: HashMap<usize, ElementSet> = HashMap::new();
        l.for_each_separated_set(&connected, |s, j| {
            t.check(by_join.insert(j, s.clone()).is_none(), || {
                format!("lattice #{li}: two separated sets join to {j}")
            });
            ControlFlow::Continue(())
        });
        if lc {
            for x in 0..l.size() {
                let r = l.star(x).map_err(|e| Error::TheoremViolation(e.to_string()));
                if let Some(s) = t.outcome(r, || format!("lattice #{li} element {x}"))? {
                    t.check(l.is_separated(s.members()) && l.join_set(s.members()) == x, || {
                        format!("lattice #{li}: decomposition of {x} is wrong")
                    });
                }
            }
        }
    }
    Ok(lattices.len())
}

fn separation_iso(max_size: usize, fault: bool, t: &mut Tally) -> Result<usize> {
    let lattices = lattices_up_to(max_size)?;
    for (li, l) in lattices.iter().enumerate() {
        let lc = l.is_locally_connected() != fault;
        let sp = l.separation_poset()?;
        let class = sp.classify(l);
        let iso = class == NuClass::Iso;
        let surjective = class != NuClass::NotSurjective;
        t.check(iso == surjective, || format!("lattice #{li}: nu is {class:?}"));
        t.check(iso == lc, || format!("lattice #{li}: nu is {class:?}, locally connected = {lc}"));
        if let Some(counit) = t.outcome(Counit::new(l), || format!("lattice #{li}"))? {
            t.check(counit.is_injective(), || format!("lattice #{li}: counit is not injective"));
            t.check(counit.is_iso(l) == lc, || format!("lattice #{li}: counit iso disagrees with local connectivity"));
            if l.has_connective_foundation() {
                t.check(is_isomorphic(&sp.poset, counit.d.lattice().poset()), || {
                    format!("lattice #{li}: separated sets of connected elements differ from D(K(L))")
                });
            }
        }
    }
    Ok(lattices.len())
}

fn subchainmails(max_size: usize, fault: bool, t: &mut Tally) -> Result<usize> {
    let chainmails = chainmails_up_to(max_size)?;
    for (gi, g) in chainmails.iter().enumerate() {
        let p = g.poset();
        for x in p.ideals() {
            let mut c = g.subchainmail_conditions(&x);
            if fault {
                c[2] = !c[2];
            }
            t.check(c[0] == c[1] && c[1] == c[2], || format!("chainmail #{gi} set {:?}: conditions {c:?}", x.to_vec()));
            t.check(g.is_subchainmail(&x) == c[1], || {
                format!("chainmail #{gi} set {:?}: pairwise test disagrees", x.to_vec())
            });
        }
        let d = match t.outcome(d_lattice(g), || format!("chainmail #{gi}"))? {
            Some(d) => d,
            None => continue,
        };
        for i in 0..d.size() {
            let back = g.x_star(d.subchainmail(i)).map(|s| s.into_members());
            t.check(back.as_ref().ok() == Some(d.td_set(i)), || {
                format!("chainmail #{gi}: down-set of td set {i} does not return")
            });
            for j in 0..d.size() {
                let l = d.lattice();
                t.check(l.join(i, j) == d.join_via_subchainmails(i, j), || {
                    format!("chainmail #{gi}: join of {i}, {j}")
                });
                t.check(l.meet(i, j) == d.meet_via_subchainmails(i, j), || {
                    format!("chainmail #{gi}: meet of {i}, {j}")
                });
            }
        }
    }
    Ok(chainmails.len())
}

fn unit_counit_iso(max_size: usize, fault: bool, t: &mut Tally) -> Result<usize> {
    let chainmails = chainmails_up_to(max_size)?;
    for (gi, g) in chainmails.iter().enumerate() {
        if let Some(eta) = t.outcome(unit_eta(g), || format!("chainmail #{gi}"))? {
            let mut table = eta.table().to_vec();
            if fault && table.len() > 1 {
                table.rotate_left(1);
            }
            let (p, q) = (eta.source(), eta.target());
            let iso = p.size() == q.size()
                && (0..p.size()).all(|a| (0..p.size()).all(|b| p.leq(a, b) == q.leq(table[a], table[b])));
            t.check(iso, || format!("chainmail #{gi}: unit is not an order isomorphism"));
        }
    }
    let lattices = lattices_up_to(max_size)?;
    let mut count = chainmails.len();
    for (li, l) in lattices.iter().enumerate().filter(|(_, l)| l.is_locally_connected()) {
        count += 1;
        if let Some(c) = t.outcome(Counit::new(l), || format!("lattice #{li}"))? {
            t.check(c.is_iso(l), || format!("lattice #{li}: counit is not an isomorphism"));
            t.check(is_isomorphic(l.poset(), c.d.lattice().poset()), || {
                format!("lattice #{li}: not isomorphic to D(K(L))")
            });
        }
    }
    Ok(count)
}

fn adjunction(max_size: usize, fault: bool, t: &mut Tally) -> Result<usize> {
    let lattices: Vec<CompleteLattice> = lattices_up_to(max_size)?;
    let chainmails = chainmails_up_to(max_size.saturating_sub(1))?;
    let mut faulted = false;
    for (gi, g) in chainmails.iter().enumerate() {
        for (li, l) in lattices.iter().enumerate() {
            let ctx = || format!("chainmail #{gi}, lattice #{li}");
            let r = hom_set_bijection(g, l, |ms| {
                if fault && !faulted && !ms.is_empty() {
                    ms.pop();
                    faulted = true;
                }
            });
            t.outcome(r, ctx)?;
            t.outcome(check_triangle_identities(g, l), ctx)?;
        }
    }

    // properties of every connectivity homomorphism between the lattices
    for (ai, a) in lattices.iter().enumerate() {
        for (bi, b) in lattices.iter().enumerate() {
            for f in connectivity_homs(a, b, Role::ConnectivityHom) {
                let ctx = || format!("lattices #{ai} -> #{bi}, map {f:?}");
                t.outcome(check_connectivity_hom_consequences(a, b, &f), ctx)?;
                let adj = right_adjoint_table(a, b, &f);
                let galois = (0..a.size()).all(|x| (0..b.size()).all(|y| b.leq(f[x], y) == a.leq(x, adj[y])));
                t.check(galois, || format!("{}: Galois law fails", ctx()));
                if a.size() < max_size && b.size() < max_size {
                    t.outcome(check_epsilon_naturality(a, b, &f), ctx)?;
                }
            }
        }
    }

    // naturality of the unit and the stated adjoint of D(m)
    let small: Vec<&Chainmail> = chainmails.iter().filter(|g| g.size() + 2 <= max_size).collect();
    for (ai, g1) in small.iter().enumerate() {
        for (bi, g2) in small.iter().enumerate() {
            let (d1, d2) = (d_lattice(g1)?, d_lattice(g2)?);
            for m in chainmail_morphisms(g1, g2) {
                let ctx = || format!("chainmails #{ai} -> #{bi}, morphism {m:?}");
                t.outcome(check_eta_naturality(g1, g2, &m), ctx)?;
                if let Some(dm) = t.outcome(d_on_morphism_table(&d1, &d2, &m), ctx)? {
                    let stated = d_adjoint_table(&d1, &d2, &m)?;
                    let computed = right_adjoint_table(d1.lattice(), d2.lattice(), &dm);
                    t.check(stated == computed, || format!("{}: stated adjoint differs", ctx()));
                }
            }
        }
    }
    Ok(chainmails.len() * lattices.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_sizes() {
        for suite in Suite::ALL {
            let r = run_suite(suite, VerifyOptions { max_size: Some(4), seeded_fault: false }).unwrap();
            assert!(r.passed(), "{suite}: {:?}", r.violations);
            assert!(r.checks > 0);
        }
    }

    #[test]
    fn seeded_faults_are_caught() {
        for suite in Suite::ALL {
            let r = run_suite(suite, VerifyOptions { max_size: Some(4), seeded_fault: true }).unwrap();
            assert!(!r.passed(), "{suite} missed its seeded fault");
        }
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("thmZ".parse::<Suite>().is_err());
    }
}
