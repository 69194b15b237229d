//! Morphisms of chainmails and of complete lattices, the functors between
//! them, unit and counit, and exhaustive checks of the adjunction laws.
//!
//! Maps are stored as tables over element indices. The `*_table` helpers work
//! on prebuilt lattices and chainmails; the [`PosetMap`] operations rebuild
//! those structures from the carried posets.

use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::ElementSet;
use crate::chainmail::{as_chainmail, d_lattice, Chainmail, DLattice};
use crate::error::{Error, Result};
use crate::lattice::{as_complete_lattice, CompleteLattice};
use crate::poset::Poset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Monotone,
    /// Preserves joins of mails.
    ChainmailMorphism,
    /// Preserves all joins; the right adjoint preserves joins of separated sets.
    ConnectivityHom,
    /// Preserves all joins and maps connected elements to connected elements.
    WeakConnectivityHom,
}

impl Role {
    pub const ALL: [Role; 4] =
        [Role::Monotone, Role::ChainmailMorphism, Role::ConnectivityHom, Role::WeakConnectivityHom];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Monotone => "monotone",
            Role::ChainmailMorphism => "chainmail-morphism",
            Role::ConnectivityHom => "connectivity-hom",
            Role::WeakConnectivityHom => "weak-connectivity-hom",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Role> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown map role {s:?}")))
    }
}

/// A validated function table between two posets.
#[derive(Debug, Clone)]
pub struct PosetMap {
    source: Poset,
    target: Poset,
    table: Vec<usize>,
    role: Role,
}

impl PosetMap {
    pub fn source(&self) -> &Poset {
        &self.source
    }

    pub fn target(&self) -> &Poset {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn identity(p: &Poset, role: Role) -> Result<PosetMap> {
        validate_map(p, p, (0..p.size()).collect(), role)
    }

    /// `next ∘ self`. The composite keeps the common role, or is only
    /// monotone when the roles differ, and is validated again.
    pub fn then(&self, next: &PosetMap) -> Result<PosetMap> {
        if self.target != next.source {
            return Err(Error::Malformed("composed maps do not share the middle poset".into()));
        }
        let table = self.table.iter().map(|&y| next.table[y]).collect();
        let role = if self.role == next.role { self.role } else { Role::Monotone };
        validate_map(&self.source, &next.target, table, role)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.table.iter().enumerate().all(|(i, &v)| i == v)
    }
}

fn check_table(source: &Poset, target: &Poset, table: &[usize]) -> Result<()> {
    if table.len() != source.size() {
        return Err(Error::TableSize { expected: source.size(), got: table.len() });
    }
    match table.iter().find(|&&v| v >= target.size()) {
        Some(&v) => Err(Error::IndexOutOfRange { index: v, size: target.size() }),
        None => Ok(()),
    }
}

pub fn check_monotone(source: &Poset, target: &Poset, table: &[usize]) -> Result<()> {
    match source.covers().into_iter().find(|&(x, y)| !target.leq(table[x], table[y])) {
        Some(pair) => Err(Error::NotMonotone { pair }),
        None => Ok(()),
    }
}

/// Check a table against a role and wrap it.
pub fn validate_map(source: &Poset, target: &Poset, table: Vec<usize>, role: Role) -> Result<PosetMap> {
    check_table(source, target, &table)?;
    check_monotone(source, target, &table)?;
    match role {
        Role::Monotone => {}
        Role::ChainmailMorphism => {
            check_chainmail_morphism(&as_chainmail(source)?, &as_chainmail(target)?, &table)?;
        }
        Role::ConnectivityHom => {
            check_connectivity_hom(&as_complete_lattice(source)?, &as_complete_lattice(target)?, &table)?;
        }
        Role::WeakConnectivityHom => {
            check_weak_connectivity_hom(&as_complete_lattice(source)?, &as_complete_lattice(target)?, &table)?;
        }
    }
    Ok(PosetMap { source: source.clone(), target: target.clone(), table, role })
}

/// Wrap a table produced by a construction, reporting any failure as a
/// theorem violation.
fn derived(source: &Poset, target: &Poset, table: Vec<usize>, role: Role, what: &str) -> Result<PosetMap> {
    validate_map(source, target, table, role).map_err(|e| Error::TheoremViolation(format!("{what}: {e}")))
}

/// Every pairwise mail join is preserved. Larger mails follow, since their
/// joins are folds of pairwise joins of mails.
pub fn check_chainmail_morphism(g1: &Chainmail, g2: &Chainmail, table: &[usize]) -> Result<()> {
    let n = g1.size();
    for a in 0..n {
        for b in a + 1..n {
            if let Some(j) = g1.mail_join(a, b) {
                if g2.mail_join(table[a], table[b]) != Some(table[j]) {
                    return Err(Error::MailJoinNotPreserved { pair: (a, b) });
                }
            }
        }
    }
    Ok(())
}

/// Bottom and binary joins are preserved, hence all joins.
pub fn check_join_preserving(l1: &CompleteLattice, l2: &CompleteLattice, table: &[usize]) -> Result<()> {
    if table[l1.bottom()] != l2.bottom() {
        return Err(Error::JoinsNotPreserved { witness: vec![] });
    }
    let n = l1.size();
    for a in 0..n {
        for b in a + 1..n {
            if table[l1.join(a, b)] != l2.join(table[a], table[b]) {
                return Err(Error::JoinsNotPreserved { witness: vec![a, b] });
            }
        }
    }
    Ok(())
}

/// `F•(y) = ⋁{x : F(x) ≤ y}`.
pub fn right_adjoint_table(l1: &CompleteLattice, l2: &CompleteLattice, table: &[usize]) -> Vec<usize> {
    (0..l2.size())
        .map(|y| {
            let below: ElementSet = (0..l1.size()).filter(|&x| l2.leq(table[x], y)).collect();
            l1.join_set(&below)
        })
        .collect()
}

fn adjoint_separated_witness(l1: &CompleteLattice, l2: &CompleteLattice, adjoint: &[usize]) -> Option<Vec<usize>> {
    let mut witness = None;
    l2.for_each_separated_set(&l2.poset().all(), |s, j| {
        let images: ElementSet = s.iter().map(|x| adjoint[x]).collect();
        if adjoint[j] != l1.join_set(&images) {
            witness = Some(s.to_vec());
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    witness
}

pub fn check_connectivity_hom(l1: &CompleteLattice, l2: &CompleteLattice, table: &[usize]) -> Result<()> {
    check_join_preserving(l1, l2, table)?;
    let adjoint = right_adjoint_table(l1, l2, table);
    match adjoint_separated_witness(l1, l2, &adjoint) {
        Some(witness) => Err(Error::AdjointFailsSeparatedJoins { witness }),
        None => Ok(()),
    }
}

pub fn check_weak_connectivity_hom(l1: &CompleteLattice, l2: &CompleteLattice, table: &[usize]) -> Result<()> {
    check_join_preserving(l1, l2, table)?;
    match l1.connected_elements().iter().find(|&c| !l2.is_connected(table[c])) {
        Some(c) => Err(Error::ConnectedNotPreserved(c)),
        None => Ok(()),
    }
}

/// Consequences every connectivity homomorphism must satisfy: the right
/// adjoint keeps the bottom, sends a separated set to a separated set once
/// the bottom is dropped, and the map keeps connected elements connected.
pub fn check_connectivity_hom_consequences(l1: &CompleteLattice, l2: &CompleteLattice, table: &[usize]) -> Result<()> {
    let adjoint = right_adjoint_table(l1, l2, table);
    if adjoint[l2.bottom()] != l1.bottom() {
        return Err(Error::TheoremViolation("right adjoint moves the bottom".into()));
    }
    let mut bad = None;
    l2.for_each_separated_set(&l2.poset().all(), |s, _| {
        let mut images: ElementSet = s.iter().map(|x| adjoint[x]).collect();
        images.remove(l1.bottom());
        if !l1.is_separated(&images) {
            bad = Some(s.to_vec());
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    if let Some(s) = bad {
        return Err(Error::TheoremViolation(format!("right adjoint image of separated set {s:?} is not separated")));
    }
    if let Some(c) = l1.connected_elements().iter().find(|&c| !l2.is_connected(table[c])) {
        return Err(Error::TheoremViolation(format!("connected element {c} maps to a non-connected element")));
    }
    Ok(())
}

/// The right adjoint of a join-preserving map, with the Galois law checked
/// on every pair.
pub fn right_adjoint(f: &PosetMap) -> Result<PosetMap> {
    let l1 = as_complete_lattice(f.source())?;
    let l2 = as_complete_lattice(f.target())?;
    check_join_preserving(&l1, &l2, f.table())?;
    let adjoint = right_adjoint_table(&l1, &l2, f.table());
    for x in 0..l1.size() {
        for (y, &gy) in adjoint.iter().enumerate() {
            if l2.leq(f.apply(x), y) != l1.leq(x, gy) {
                return Err(Error::TheoremViolation(format!("Galois law fails at ({x}, {y})")));
            }
        }
    }
    derived(f.target(), f.source(), adjoint, Role::Monotone, "right adjoint")
}

/// The chainmail of connected elements of a lattice, with its embedding.
#[derive(Debug, Clone)]
pub struct KChainmail {
    chainmail: Chainmail,
    elements: Vec<usize>,
    index: Vec<Option<usize>>,
}

impl KChainmail {
    pub fn chainmail(&self) -> &Chainmail {
        &self.chainmail
    }

    /// Lattice element of chainmail element `i`.
    pub fn element(&self, i: usize) -> usize {
        self.elements[i]
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    /// Chainmail element of a lattice element, if it is connected.
    pub fn index_of(&self, x: usize) -> Option<usize> {
        self.index[x]
    }
}

pub fn k_chainmail(l: &CompleteLattice) -> Result<KChainmail> {
    let connected = l.connected_elements();
    let (sub, elements) = l.poset().induced(connected);
    let sub = sub.with_labels(elements.iter().map(|&x| l.name(x)))?;
    let chainmail = as_chainmail(&sub)
        .map_err(|e| Error::TheoremViolation(format!("connected elements do not form a chainmail: {e}")))?;
    let mut index = vec![None; l.size()];
    for (i, &x) in elements.iter().enumerate() {
        index[x] = Some(i);
    }
    Ok(KChainmail { chainmail, elements, index })
}

/// Restriction of a connectivity homomorphism to connected elements.
pub fn k_on_morphism_table(k1: &KChainmail, k2: &KChainmail, table: &[usize]) -> Result<Vec<usize>> {
    k1.elements
        .iter()
        .map(|&c| {
            k2.index_of(table[c]).ok_or_else(|| {
                Error::TheoremViolation(format!("connected element {c} maps outside the connected elements"))
            })
        })
        .collect()
}

pub fn k_on_morphism(f: &PosetMap) -> Result<PosetMap> {
    if !matches!(f.role(), Role::ConnectivityHom | Role::WeakConnectivityHom) {
        return Err(Error::Malformed(format!("expected a connectivity-hom, got {}", f.role())));
    }
    let k1 = k_chainmail(&as_complete_lattice(f.source())?)?;
    let k2 = k_chainmail(&as_complete_lattice(f.target())?)?;
    let table = k_on_morphism_table(&k1, &k2, f.table())?;
    derived(
        k1.chainmail.poset(),
        k2.chainmail.poset(),
        table,
        Role::ChainmailMorphism,
        "restriction to connected elements",
    )
}

/// `D ↦ ⋁{{m(d)} : d ∈ D}`, computed as the subchainmail generated by the image.
pub fn d_on_morphism_table(d1: &DLattice, d2: &DLattice, table: &[usize]) -> Result<Vec<usize>> {
    let g2 = d2.chainmail();
    d1.sets()
        .iter()
        .map(|s| {
            let image: ElementSet = s.iter().map(|x| table[x]).collect();
            let gen = g2.subchainmail_generated(&image);
            d2.index_of_subchainmail(gen.members())
                .ok_or_else(|| Error::TheoremViolation("generated subchainmail has no totally disconnected top".into()))
        })
        .collect()
}

/// `D₂ ↦ (m⁻¹(↓D₂))*`.
pub fn d_adjoint_table(d1: &DLattice, d2: &DLattice, table: &[usize]) -> Result<Vec<usize>> {
    let g1 = d1.chainmail();
    (0..d2.size())
        .map(|j| {
            let down = d2.subchainmail(j);
            let pre: ElementSet = (0..g1.size()).filter(|&x| down.contains(table[x])).collect();
            let star =
                g1.x_star(&pre).map_err(|e| Error::TheoremViolation(format!("preimage of a subchainmail: {e}")))?;
            d1.index_of(star.members())
                .ok_or_else(|| Error::TheoremViolation("preimage star is not a lattice element".into()))
        })
        .collect()
}

fn chainmails_of(m: &PosetMap) -> Result<(DLattice, DLattice)> {
    if m.role() != Role::ChainmailMorphism {
        return Err(Error::Malformed(format!("expected a chainmail-morphism, got {}", m.role())));
    }
    Ok((d_lattice(&as_chainmail(m.source())?)?, d_lattice(&as_chainmail(m.target())?)?))
}

pub fn d_on_morphism(m: &PosetMap) -> Result<PosetMap> {
    let (d1, d2) = chainmails_of(m)?;
    let table = d_on_morphism_table(&d1, &d2, m.table())?;
    derived(d1.lattice().poset(), d2.lattice().poset(), table, Role::ConnectivityHom, "image under D")
}

pub fn d_morphism_adjoint(m: &PosetMap) -> Result<PosetMap> {
    let (d1, d2) = chainmails_of(m)?;
    let table = d_adjoint_table(&d1, &d2, m.table())?;
    derived(d2.lattice().poset(), d1.lattice().poset(), table, Role::Monotone, "adjoint of the image under D")
}

/// `x ↦ {x}` as a table into `K(D(Γ))`, given both constructions.
fn eta_table(d: &DLattice, k: &KChainmail) -> Result<Vec<usize>> {
    (0..d.chainmail().size())
        .map(|x| {
            k.index_of(d.singleton(x))
                .ok_or_else(|| Error::TheoremViolation(format!("singleton of {x} is not connected")))
        })
        .collect()
}

fn check_order_iso(p: &Poset, q: &Poset, table: &[usize], what: &str) -> Result<()> {
    let mut hit = vec![false; q.size()];
    for &v in table {
        hit[v] = true;
    }
    if p.size() != q.size() || hit.iter().any(|h| !h) {
        return Err(Error::TheoremViolation(format!("{what} is not a bijection")));
    }
    for a in 0..p.size() {
        for b in 0..p.size() {
            if p.leq(a, b) != q.leq(table[a], table[b]) {
                return Err(Error::TheoremViolation(format!("{what} is not an order isomorphism at ({a}, {b})")));
            }
        }
    }
    Ok(())
}

/// The unit `Γ → K(D(Γ))`, checked to be an order isomorphism.
pub fn unit_eta(g: &Chainmail) -> Result<PosetMap> {
    let d = d_lattice(g)?;
    let k = k_chainmail(d.lattice())?;
    let table = eta_table(&d, &k)?;
    check_order_iso(g.poset(), k.chainmail.poset(), &table, "unit")?;
    derived(g.poset(), k.chainmail.poset(), table, Role::ChainmailMorphism, "unit")
}

/// The counit `D(K(L)) → L`, `D ↦ ⋁D`, and its right adjoint
/// `x ↦ (connected elements below x)*`.
#[derive(Debug, Clone)]
pub struct Counit {
    pub k: KChainmail,
    pub d: DLattice,
    pub epsilon: Vec<usize>,
    pub adjoint: Vec<usize>,
}

impl Counit {
    pub fn new(l: &CompleteLattice) -> Result<Counit> {
        let k = k_chainmail(l)?;
        let d = d_lattice(k.chainmail())?;
        let epsilon: Vec<usize> =
            d.sets().iter().map(|s| l.join_set(&s.iter().map(|i| k.element(i)).collect())).collect();
        let adjoint = (0..l.size())
            .map(|x| {
                let below: ElementSet = (0..k.elements.len()).filter(|&i| l.leq(k.element(i), x)).collect();
                let star = k
                    .chainmail
                    .x_star(&below)
                    .map_err(|e| Error::TheoremViolation(format!("connected elements below {x}: {e}")))?;
                d.index_of(star.members())
                    .ok_or_else(|| Error::TheoremViolation(format!("star of {x} is not a lattice element")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Counit { k, d, epsilon, adjoint })
    }

    pub fn is_injective(&self) -> bool {
        let distinct: HashSet<usize> = self.epsilon.iter().copied().collect();
        distinct.len() == self.epsilon.len()
    }

    /// Bijective and order-reflecting.
    pub fn is_iso(&self, l: &CompleteLattice) -> bool {
        let dl = self.d.lattice();
        self.epsilon.len() == l.size()
            && self.is_injective()
            && (0..dl.size()).all(|a| (0..dl.size()).all(|b| dl.leq(a, b) == l.leq(self.epsilon[a], self.epsilon[b])))
    }
}

/// The counit and its stated adjoint as maps. The counit is checked to be an
/// injective connectivity homomorphism whose right adjoint is the stated one.
pub fn counit_epsilon(l: &CompleteLattice) -> Result<(PosetMap, PosetMap)> {
    let c = Counit::new(l)?;
    if !c.is_injective() {
        return Err(Error::TheoremViolation("counit is not injective".into()));
    }
    let dl = c.d.lattice();
    if right_adjoint_table(dl, l, &c.epsilon) != c.adjoint {
        return Err(Error::TheoremViolation("stated counit adjoint differs from the computed right adjoint".into()));
    }
    let eps = derived(dl.poset(), l.poset(), c.epsilon.clone(), Role::ConnectivityHom, "counit")?;
    let adj = derived(l.poset(), dl.poset(), c.adjoint.clone(), Role::Monotone, "counit adjoint")?;
    Ok((eps, adj))
}

pub fn is_epsilon_iso(l: &CompleteLattice) -> Result<bool> {
    Ok(Counit::new(l)?.is_iso(l))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleReport {
    /// `K(ε_L) ∘ η_{K(L)}` on `K(L)`.
    pub lattice_side: Vec<usize>,
    /// `ε_{D(Γ)} ∘ D(η_Γ)` on `D(Γ)`.
    pub chainmail_side: Vec<usize>,
}

fn compose(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&y| second[y]).collect()
}

fn expect_identity(table: &[usize], what: &str) -> Result<()> {
    match table.iter().enumerate().find(|&(i, &v)| i != v) {
        Some((i, &v)) => Err(Error::TheoremViolation(format!("{what} sends {i} to {v}"))),
        None => Ok(()),
    }
}

/// Both triangle identities, each checked as a pair of mutually inverse maps.
pub fn check_triangle_identities(g: &Chainmail, l: &CompleteLattice) -> Result<TriangleReport> {
    // lattice side: K(L) -> K(D(K(L))) -> K(L)
    let counit = Counit::new(l)?;
    let kl = &counit.k;
    let kdk = k_chainmail(counit.d.lattice())?;
    let eta_k = eta_table(&counit.d, &kdk)?;
    let k_eps = k_on_morphism_table(&kdk, kl, &counit.epsilon)?;
    let lattice_side = compose(&eta_k, &k_eps);
    expect_identity(&lattice_side, "K(counit) after unit")?;
    expect_identity(&compose(&k_eps, &eta_k), "unit after K(counit)")?;

    // chainmail side: D(Γ) -> D(K(D(Γ))) -> D(Γ)
    let dg = d_lattice(g)?;
    let counit_d = Counit::new(dg.lattice())?;
    let eta_g = eta_table(&dg, &counit_d.k)?;
    let d_eta = d_on_morphism_table(&dg, &counit_d.d, &eta_g)?;
    let chainmail_side = compose(&d_eta, &counit_d.epsilon);
    expect_identity(&chainmail_side, "counit after D(unit)")?;
    expect_identity(&compose(&counit_d.epsilon, &d_eta), "D(unit) after counit")?;
    Ok(TriangleReport { lattice_side, chainmail_side })
}

/// `K(D(m)) ∘ η_{Γ₁} = η_{Γ₂} ∘ m` for a chainmail morphism `m: Γ₁ → Γ₂`.
pub fn check_eta_naturality(g1: &Chainmail, g2: &Chainmail, m: &[usize]) -> Result<()> {
    let (d1, d2) = (d_lattice(g1)?, d_lattice(g2)?);
    let (k1, k2) = (k_chainmail(d1.lattice())?, k_chainmail(d2.lattice())?);
    let dm = d_on_morphism_table(&d1, &d2, m)?;
    let kdm = k_on_morphism_table(&k1, &k2, &dm)?;
    let left = compose(&eta_table(&d1, &k1)?, &kdm);
    let right = compose(m, &eta_table(&d2, &k2)?);
    match (0..left.len()).find(|&x| left[x] != right[x]) {
        Some(x) => Err(Error::TheoremViolation(format!("unit is not natural at element {x}"))),
        None => Ok(()),
    }
}

/// `F ∘ ε_{L₁} = ε_{L₂} ∘ D(K(F))`, and the adjoint square
/// `ε_{L₁}• ∘ F• = D(K(F))• ∘ ε_{L₂}•`, for a connectivity homomorphism `F`.
pub fn check_epsilon_naturality(l1: &CompleteLattice, l2: &CompleteLattice, f: &[usize]) -> Result<()> {
    let (c1, c2) = (Counit::new(l1)?, Counit::new(l2)?);
    let kf = k_on_morphism_table(&c1.k, &c2.k, f)?;
    let dkf = d_on_morphism_table(&c1.d, &c2.d, &kf)?;
    let left = compose(&c1.epsilon, f);
    let right = compose(&dkf, &c2.epsilon);
    if let Some(x) = (0..left.len()).find(|&x| left[x] != right[x]) {
        return Err(Error::TheoremViolation(format!("counit is not natural at element {x}")));
    }
    let f_adj = right_adjoint_table(l1, l2, f);
    let dkf_adj = d_adjoint_table(&c1.d, &c2.d, &kf)?;
    let left = compose(&f_adj, &c1.adjoint);
    let right = compose(&c2.adjoint, &dkf_adj);
    match (0..left.len()).find(|&y| left[y] != right[y]) {
        Some(y) => Err(Error::TheoremViolation(format!("counit adjoint is not natural at element {y}"))),
        None => Ok(()),
    }
}

pub fn check_naturality(f: &PosetMap) -> Result<()> {
    match f.role() {
        Role::ChainmailMorphism => {
            check_eta_naturality(&as_chainmail(f.source())?, &as_chainmail(f.target())?, f.table())
        }
        Role::ConnectivityHom => {
            check_epsilon_naturality(&as_complete_lattice(f.source())?, &as_complete_lattice(f.target())?, f.table())
        }
        r => Err(Error::Malformed(format!("naturality needs a chainmail-morphism or connectivity-hom, got {r}"))),
    }
}

const UNSET: usize = usize::MAX;

/// Backtrack over tables, assigning `order` left to right with `choose`
/// listing the admissible values of the next element. The first branching
/// point is explored in parallel; output order is deterministic.
fn backtrack<C>(n: usize, order: &[usize], choose: &C) -> Vec<Vec<usize>>
where
    C: Fn(&[usize], usize) -> Vec<usize> + Sync,
{
    fn rec<C: Fn(&[usize], usize) -> Vec<usize>>(
        order: &[usize],
        k: usize,
        table: &mut Vec<usize>,
        choose: &C,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == order.len() {
            out.push(table.clone());
            return;
        }
        for v in choose(table, order[k]) {
            table[order[k]] = v;
            rec(order, k + 1, table, choose, out);
        }
        table[order[k]] = UNSET;
    }

    let mut table = vec![UNSET; n];
    let mut k = 0;
    loop {
        if k == order.len() {
            return vec![table];
        }
        let c = choose(&table, order[k]);
        if c.len() != 1 {
            return c
                .par_iter()
                .flat_map_iter(|&v| {
                    let mut t = table.clone();
                    t[order[k]] = v;
                    let mut out = Vec::new();
                    rec(order, k + 1, &mut t, choose, &mut out);
                    out
                })
                .collect();
        }
        table[order[k]] = c[0];
        k += 1;
    }
}

fn linear_extension(p: &Poset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.size()).collect();
    order.sort_by_key(|&x| p.down_set(x).len());
    order
}

/// All chainmail morphisms `g1 → g2`. Elements are assigned along a linear
/// extension; each value must dominate the images of the lower covers and
/// equal the image join of every incomparable pair whose mail join it is.
pub fn chainmail_morphisms(g1: &Chainmail, g2: &Chainmail) -> Vec<Vec<usize>> {
    let (p1, p2) = (g1.poset(), g2.poset());
    let n = p1.size();
    let mut forced_by: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            if !p1.comparable(a, b) {
                if let Some(j) = g1.mail_join(a, b) {
                    forced_by[j].push((a, b));
                }
            }
        }
    }
    let lower: Vec<Vec<usize>> = (0..n).map(|x| p1.lower_covers(x).to_vec()).collect();
    let choose = |t: &[usize], x: usize| -> Vec<usize> {
        let mut forced = None;
        for &(a, b) in &forced_by[x] {
            match (g2.mail_join(t[a], t[b]), forced) {
                (None, _) => return Vec::new(),
                (Some(j), Some(f)) if j != f => return Vec::new(),
                (Some(j), _) => forced = Some(j),
            }
        }
        let ok = |v: usize| lower[x].iter().all(|&y| p2.leq(t[y], v));
        match forced {
            Some(v) => {
                if ok(v) {
                    vec![v]
                } else {
                    Vec::new()
                }
            }
            None => (0..p2.size()).filter(|&v| ok(v)).collect(),
        }
    };
    backtrack(n, &linear_extension(p1), &choose)
}

/// All join-preserving maps `l1 → l2`: the bottom goes to the bottom, a
/// join-reducible element to the join of its lower covers' images, and a
/// join-irreducible element anywhere above its lower cover's image.
pub fn join_preserving_maps(l1: &CompleteLattice, l2: &CompleteLattice) -> Vec<Vec<usize>> {
    let p1 = l1.poset();
    let n = p1.size();
    let lower: Vec<Vec<usize>> = (0..n).map(|x| p1.lower_covers(x).to_vec()).collect();
    let choose = |t: &[usize], x: usize| -> Vec<usize> {
        match lower[x].as_slice() {
            [] => vec![l2.bottom()],
            [y] => (0..l2.size()).filter(|&v| l2.leq(t[*y], v)).collect(),
            many => vec![many.iter().fold(l2.bottom(), |acc, &y| l2.join(acc, t[y]))],
        }
    };
    backtrack(n, &linear_extension(p1), &choose)
        .into_iter()
        .filter(|t| check_join_preserving(l1, l2, t).is_ok())
        .collect()
}

/// All connectivity homomorphisms `l1 → l2`, or the weak ones when `role`
/// is [`Role::WeakConnectivityHom`].
pub fn connectivity_homs(l1: &CompleteLattice, l2: &CompleteLattice, role: Role) -> Vec<Vec<usize>> {
    let keep = |t: &Vec<usize>| match role {
        Role::WeakConnectivityHom => l1.connected_elements().iter().all(|c| l2.is_connected(t[c])),
        _ => adjoint_separated_witness(l1, l2, &right_adjoint_table(l1, l2, t)).is_none(),
    };
    join_preserving_maps(l1, l2).into_iter().filter(keep).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomSetReport {
    pub chainmail_morphisms: usize,
    pub connectivity_homs: usize,
    pub weak_homs: usize,
}

/// Check that `f ↦ ε_L ∘ D(f)` is a bijection from chainmail morphisms
/// `Γ → K(L)` onto connectivity homomorphisms `D(Γ) → L`, with inverse
/// `F ↦ K(F) ∘ η_Γ`, and that the weak homomorphisms form the same set.
pub fn check_hom_set_bijection(g: &Chainmail, l: &CompleteLattice) -> Result<HomSetReport> {
    hom_set_bijection(g, l, |_| {})
}

/// As [`check_hom_set_bijection`], letting the caller alter the enumerated
/// chainmail morphisms first (used to seed faults).
pub(crate) fn hom_set_bijection(
    g: &Chainmail,
    l: &CompleteLattice,
    adjust: impl FnOnce(&mut Vec<Vec<usize>>),
) -> Result<HomSetReport> {
    let counit = Counit::new(l)?;
    let dg = d_lattice(g)?;
    let kdg = k_chainmail(dg.lattice())?;
    let eta = eta_table(&dg, &kdg)?;
    let mut morphisms = chainmail_morphisms(g, counit.k.chainmail());
    adjust(&mut morphisms);
    let homs = connectivity_homs(dg.lattice(), l, Role::ConnectivityHom);
    let weak = connectivity_homs(dg.lattice(), l, Role::WeakConnectivityHom);
    let hom_set: HashSet<&Vec<usize>> = homs.iter().collect();
    let weak_set: HashSet<&Vec<usize>> = weak.iter().collect();

    let mut images = HashSet::new();
    for f in &morphisms {
        let df = d_on_morphism_table(&dg, &counit.d, f)?;
        let phi = compose(&df, &counit.epsilon);
        if !hom_set.contains(&phi) {
            return Err(Error::TheoremViolation(format!(
                "image of chainmail morphism {f:?} is not a connectivity-hom"
            )));
        }
        if !images.insert(phi) {
            return Err(Error::TheoremViolation(format!("two chainmail morphisms share the image of {f:?}")));
        }
    }
    if images.len() != homs.len() {
        return Err(Error::TheoremViolation(format!(
            "{} chainmail morphisms but {} connectivity-homs",
            images.len(),
            homs.len()
        )));
    }
    if weak_set != hom_set {
        return Err(Error::TheoremViolation(format!(
            "{} weak connectivity-homs but {} connectivity-homs",
            weak.len(),
            homs.len()
        )));
    }
    for f in &homs {
        let kf = k_on_morphism_table(&kdg, &counit.k, f)?;
        let back = compose(&eta, &kf);
        let df = d_on_morphism_table(&dg, &counit.d, &back)?;
        if compose(&df, &counit.epsilon) != *f {
            return Err(Error::TheoremViolation(format!(
                "connectivity-hom {f:?} is not recovered from its restriction"
            )));
        }
    }
    Ok(HomSetReport { chainmail_morphisms: morphisms.len(), connectivity_homs: homs.len(), weak_homs: weak.len() })
}
