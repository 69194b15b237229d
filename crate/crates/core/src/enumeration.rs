//! Isomorph-free generation of posets by canonical augmentation, and the
//! chainmail counts and catalogs built on it.
//!
//! A poset of size `k + 1` is produced from one of size `k` by adding a new
//! maximal element above an ideal. Every poset is kept only when produced
//! from its canonical parent: the poset left after deleting the maximal
//! element that comes last in canonical order. Siblings with equal codes are
//! merged, so each isomorphism class is visited exactly once.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{self, Budget};
use crate::canon::{canonical_code, canonical_form, refine, CanonicalCode};
use crate::chainmail::as_chainmail;
use crate::error::{Error, Result};
use crate::interchange::render_dot;
use crate::poset::Poset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    AllPosets,
    Chainmails,
    /// Chainmails forming a single mail component.
    MailConnectedChainmails,
}

impl Filter {
    pub const ALL: [Filter; 3] = [Filter::AllPosets, Filter::Chainmails, Filter::MailConnectedChainmails];

    pub fn as_str(self) -> &'static str {
        match self {
            Filter::AllPosets => "all-posets",
            Filter::Chainmails => "chainmails",
            Filter::MailConnectedChainmails => "mail-connected-chainmails",
        }
    }
}

impl std::str::FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Filter> {
        Filter::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown filter {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationTask {
    /// Largest size counted.
    pub n: usize,
    pub filter: Filter,
    /// Worker threads.
    pub jobs: usize,
    /// Depth of the generation tree expanded sequentially before its
    /// subtrees are handed to workers.
    pub split_depth: usize,
    /// When set, the ideals of every node are visited in a seeded random order.
    pub shuffle_seed: Option<u64>,
}

impl EnumerationTask {
    pub fn new(n: usize, filter: Filter) -> EnumerationTask {
        EnumerationTask { n, filter, jobs: 1, split_depth: 5, shuffle_seed: None }
    }

    pub fn jobs(mut self, jobs: usize) -> EnumerationTask {
        self.jobs = jobs;
        self
    }

    pub fn shuffled(mut self, seed: u64) -> EnumerationTask {
        self.shuffle_seed = Some(seed);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Malformed("enumeration size must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Malformed("worker count must be at least 1".into()));
        }
        budget::check("enumeration size", self.n, Budget::current().max_enumeration)
    }

    /// Largest poset size the generator must reach. A mail-connected
    /// chainmail has a greatest element, so those of size `k` are exactly
    /// the posets of size `k - 1` with a top added that pass the filter.
    fn generation_depth(&self) -> usize {
        match self.filter {
            Filter::MailConnectedChainmails => self.n - 1,
            _ => self.n,
        }
    }
}

struct Node {
    poset: Poset,
    code: CanonicalCode,
}

/// Whether `v` lies in the last cell, in refined order, holding maximal elements.
fn in_last_maximal_cell(p: &Poset, v: usize) -> bool {
    let mut cells = vec![(0..p.size()).collect::<Vec<_>>()];
    refine(p, &mut cells);
    let maximal = p.maximal_elements();
    cells.iter().rev().find(|c| maximal.contains(c[0])).is_some_and(|c| c.contains(&v))
}

fn children(node: &Node, seed: Option<u64>) -> Vec<Node> {
    let q = &node.poset;
    let v = q.size();
    let mut ideals = q.ideals();
    if let Some(seed) = seed {
        let salt = node.code.as_bytes().iter().fold(seed, |h, &b| h.rotate_left(5) ^ b as u64);
        ideals.shuffle(&mut ChaCha8Rng::seed_from_u64(salt));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for ideal in ideals {
        let p = q.extend_with_maximal(&ideal);
        if !in_last_maximal_cell(&p, v) {
            continue;
        }
        let form = canonical_form(&p);
        if !seen.insert(form.code.clone()) {
            continue;
        }
        let last = p
            .maximal_elements()
            .iter()
            .max_by_key(|&x| form.relabeling[x])
            .expect("nonempty poset has a maximal element");
        let accept = last == v || {
            let mut rest = p.all();
            rest.remove(last);
            canonical_code(&p.induced(&rest).0) == node.code
        };
        if accept {
            out.push(Node { poset: p, code: form.code });
        }
    }
    out
}

fn dfs<A>(
    node: &Node,
    max_size: usize,
    seed: Option<u64>,
    acc: &mut A,
    visit: &(impl Fn(&mut A, &Poset, &CanonicalCode) + Sync),
) {
    visit(acc, &node.poset, &node.code);
    if node.poset.size() < max_size {
        for child in children(node, seed) {
            dfs(&child, max_size, seed, acc, visit);
        }
    }
}

/// Visit one representative of every isomorphism class of posets of size
/// `0..=max_size`, accumulating per worker and merging at the end.
pub fn walk_posets<A, I, V, M>(max_size: usize, task: &EnumerationTask, init: I, visit: V, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, &Poset, &CanonicalCode) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(task.jobs)
        .build()
        .map_err(|e| Error::Malformed(format!("cannot start workers: {e}")))?;
    let seed = task.shuffle_seed;
    Ok(pool.install(|| {
        let empty = Poset::empty();
        let root = Node { code: canonical_code(&empty), poset: empty };
        let mut acc = init();
        let mut frontier = vec![root];
        for _ in 0..task.split_depth.min(max_size) {
            let mut next = Vec::new();
            for node in &frontier {
                visit(&mut acc, &node.poset, &node.code);
                next.extend(children(node, seed));
            }
            frontier = next;
        }
        let rest = frontier
            .par_iter()
            .map(|node| {
                let mut a = init();
                dfs(node, max_size, seed, &mut a, &visit);
                a
            })
            .reduce(&init, &merge);
        merge(acc, rest)
    }))
}

/// One canonical representative per isomorphism class of `n`-element posets,
/// sorted by canonical code.
pub fn enumerate_posets(n: usize) -> Result<Vec<Poset>> {
    Ok(enumerate_codes(&EnumerationTask::new(n.max(1), Filter::AllPosets), n)?
        .into_iter()
        .map(|c| c.to_poset().expect("valid code"))
        .collect())
}

/// Canonical codes of all posets of size `n`, sorted.
pub fn enumerate_codes(task: &EnumerationTask, n: usize) -> Result<Vec<CanonicalCode>> {
    budget::check("enumeration size", n, Budget::current().max_enumeration)?;
    let mut codes = walk_posets(
        n,
        task,
        Vec::new,
        |acc: &mut Vec<CanonicalCode>, p, code| {
            if p.size() == n {
                acc.push(code.clone());
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    codes.sort();
    Ok(codes)
}

/// All posets of size `0..=n` (canonical representatives), by size then code.
pub fn posets_up_to(n: usize) -> Result<Vec<Poset>> {
    budget::check("enumeration size", n, Budget::current().max_enumeration)?;
    let task = EnumerationTask::new(n.max(1), Filter::AllPosets);
    let mut codes = walk_posets(
        n,
        &task,
        Vec::new,
        |acc: &mut Vec<CanonicalCode>, _, code| acc.push(code.clone()),
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    codes.sort_by(|a, b| a.as_bytes().len().cmp(&b.as_bytes().len()).then_with(|| a.cmp(b)));
    Ok(codes.into_iter().map(|c| c.to_poset().expect("valid code")).collect())
}

/// What the filter sees for a generated poset: the candidate itself, which
/// for the mail-connected filter is the poset with a top added.
fn candidate(filter: Filter, p: &Poset) -> Poset {
    match filter {
        Filter::MailConnectedChainmails => {
            let top = p.all();
            p.extend_with_maximal(&top)
        }
        _ => p.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Classification {
    chainmail: bool,
    mail_connected: bool,
}

fn classify(p: &Poset) -> (Classification, Option<crate::chainmail::Chainmail>) {
    match as_chainmail(p) {
        Ok(g) => {
            let mail_connected = p.size() > 0 && g.is_mail_connected(&p.all());
            (Classification { chainmail: true, mail_connected }, Some(g))
        }
        Err(_) => (Classification { chainmail: false, mail_connected: false }, None),
    }
}

fn passes(filter: Filter, c: Classification) -> bool {
    match filter {
        Filter::AllPosets => true,
        Filter::Chainmails => c.chainmail,
        Filter::MailConnectedChainmails => c.mail_connected,
    }
}

/// Per-size counts of isomorphism classes passing the filter; entry `k - 1`
/// is the count for size `k`.
pub fn count_chainmails(task: &EnumerationTask) -> Result<Vec<u64>> {
    task.validate()?;
    let n = task.n;
    let filter = task.filter;
    walk_posets(
        task.generation_depth(),
        task,
        || vec![0u64; n],
        |acc: &mut Vec<u64>, p, _| {
            let c = candidate(filter, p);
            if c.size() == 0 || c.size() > n {
                return;
            }
            if filter == Filter::AllPosets || passes(filter, classify(&c).0) {
                acc[c.size() - 1] += 1;
            }
        },
        |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
    )
}

/// One catalog structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub code: CanonicalCode,
    /// The canonically relabeled poset.
    pub poset: Poset,
    pub chainmail: bool,
    pub mail_connected: bool,
    /// Number of totally disconnected sets, for chainmails.
    pub d_size: Option<u64>,
}

/// A manifest line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub code: String,
    pub n: usize,
    pub chainmail: bool,
    pub mail_connected: bool,
    pub d_size: Option<u64>,
}

impl CatalogEntry {
    pub fn record(&self) -> ManifestRecord {
        ManifestRecord {
            code: self.code.to_hex(),
            n: self.poset.size(),
            chainmail: self.chainmail,
            mail_connected: self.mail_connected,
            d_size: self.d_size,
        }
    }

    pub fn file_name(&self) -> String {
        format!("n{}-{}.dot", self.poset.size(), self.code.to_hex())
    }
}

/// Every structure of size `1..=n` passing the filter, sorted by size then code.
pub fn catalog(task: &EnumerationTask) -> Result<Vec<CatalogEntry>> {
    task.validate()?;
    let n = task.n;
    let filter = task.filter;
    let mut entries = walk_posets(
        task.generation_depth(),
        task,
        Vec::new,
        |acc: &mut Vec<CatalogEntry>, p, _| {
            let c = candidate(filter, p);
            if c.size() == 0 || c.size() > n {
                return;
            }
            let (class, g) = classify(&c);
            if passes(filter, class) {
                let code = canonical_code(&c);
                let poset = code.to_poset().expect("valid code");
                let d_size = g.map(|g| g.count_totally_disconnected_sets());
                acc.push(CatalogEntry {
                    code,
                    poset,
                    chainmail: class.chainmail,
                    mail_connected: class.mail_connected,
                    d_size,
                });
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    entries.sort_by(|a, b| a.poset.size().cmp(&b.poset.size()).then_with(|| a.code.cmp(&b.code)));
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogSummary {
    pub files: usize,
    pub counts: Vec<u64>,
}

pub const MANIFEST_NAME: &str = "manifest.jsonl";

/// Write one DOT file per structure and a JSON-lines manifest into `dir`.
pub fn emit_catalog(task: &EnumerationTask, dir: &Path) -> Result<CatalogSummary> {
    let entries = catalog(task)?;
    fs::create_dir_all(dir)?;
    let mut manifest = String::new();
    let mut counts = vec![0u64; task.n];
    for e in &entries {
        fs::write(dir.join(e.file_name()), render_dot(&e.poset))?;
        manifest.push_str(&serde_json::to_string(&e.record())?);
        manifest.push('\n');
        counts[e.poset.size() - 1] += 1;
    }
    fs::write(dir.join(MANIFEST_NAME), manifest)?;
    Ok(CatalogSummary { files: entries.len(), counts })
}
