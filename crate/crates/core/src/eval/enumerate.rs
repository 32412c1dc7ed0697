//! Exhaustive enumeration of instances, the brute-force oracle.
//!
//! Enumeration order is deterministic: atoms are visited top-level
//! signature by signature in index order, each atom is placed in one
//! signature of its hierarchy (in declaration order), and field extents
//! are then chosen field by field and left tuple by left tuple, with the
//! image subsets taken in increasing bitmask order.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use thiserror::Error;

use super::instance::{Atom, Instance, IntSemantics, Tuple};
use super::semantics::{holds, satisfies_constraints};
use crate::model::{Model, Mult, SigId};

/// Largest per-signature universe the oracle accepts.
pub const MAX_ORACLE_ATOMS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("enumeration budget of {limit} instances exceeded")]
    Budget { limit: u64 },
    #[error("at most {max} atoms per signature can be enumerated, {requested} requested")]
    TooManyAtoms { requested: u32, max: u32 },
    #[error("unknown assertion `{0}`")]
    UnknownAssertion(String),
}

#[derive(Debug, Clone, Copy)]
pub struct EnumConfig {
    /// Maximum number of instances visited before giving up.
    pub budget: u64,
    /// When false, every field image is an arbitrary subset, regardless of
    /// the declared multiplicity.
    pub respect_multiplicity: bool,
    pub ints: IntSemantics,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            budget: 20_000_000,
            respect_multiplicity: true,
            ints: IntSemantics::default(),
        }
    }
}

/// Every assignment of universe sizes `1..=max_atoms` to the top-level
/// signatures, in lexicographic order.
pub fn size_combinations(model: &Model, max_atoms: u32) -> Vec<BTreeMap<SigId, u32>> {
    let tops = model.top_levels();
    let mut out = vec![BTreeMap::new()];
    for t in tops {
        out = out
            .into_iter()
            .flat_map(|m| {
                (1..=max_atoms).map(move |n| {
                    let mut m = m.clone();
                    m.insert(t, n);
                    m
                })
            })
            .collect();
    }
    out
}

/// Visits every well-formed instance with the given universe sizes whose
/// field tuples respect the column types (and, if configured, the
/// multiplicities). Returns the number of instances visited.
pub fn enumerate_instances(
    model: &Model,
    sizes: &BTreeMap<SigId, u32>,
    cfg: &EnumConfig,
    visit: &mut dyn FnMut(&Instance) -> ControlFlow<()>,
) -> Result<u64, EnumError> {
    if let Some(&n) = sizes.values().find(|&&n| n > MAX_ORACLE_ATOMS) {
        return Err(EnumError::TooManyAtoms {
            requested: n,
            max: MAX_ORACLE_ATOMS,
        });
    }
    let mut inst = Instance::empty(model, sizes);
    inst.ints = cfg.ints;
    let mut atoms = Vec::new();
    for (&top, &n) in sizes {
        let options: Vec<SigId> = model
            .descendants(top)
            .into_iter()
            .filter(|&s| !model.is_abstract_constrained(s))
            .collect();
        for a in 0..n {
            atoms.push((a, options.clone()));
        }
    }
    let mut e = Enumerator {
        model,
        cfg,
        inst,
        atoms,
        count: 0,
        visit,
    };
    match e.hierarchy(0) {
        Ok(()) | Err(Stop::Break) => Ok(e.count),
        Err(Stop::Budget) => Err(EnumError::Budget { limit: cfg.budget }),
    }
}

/// First instance (in enumeration order) with the given sizes that
/// satisfies every constraint and falsifies the assertion.
pub fn find_counterexample(
    model: &Model,
    assertion: &str,
    sizes: &BTreeMap<SigId, u32>,
    cfg: &EnumConfig,
) -> Result<Option<Instance>, EnumError> {
    let a = model
        .assertion(assertion)
        .ok_or_else(|| EnumError::UnknownAssertion(assertion.to_string()))?;
    let mut found = None;
    enumerate_instances(model, sizes, cfg, &mut |inst| {
        if satisfies_constraints(model, inst) && !holds(model, inst, &a.body) {
            found = Some(inst.clone());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found)
}

/// Searches every instance with between 1 and `max_atoms` atoms per
/// top-level signature for a counterexample to the assertion.
pub fn enumerate_check(model: &Model, assertion: &str, max_atoms: u32) -> Result<Option<Instance>, EnumError> {
    enumerate_check_with(model, assertion, max_atoms, &EnumConfig::default())
}

pub fn enumerate_check_with(
    model: &Model,
    assertion: &str,
    max_atoms: u32,
    cfg: &EnumConfig,
) -> Result<Option<Instance>, EnumError> {
    if max_atoms > MAX_ORACLE_ATOMS {
        return Err(EnumError::TooManyAtoms {
            requested: max_atoms,
            max: MAX_ORACLE_ATOMS,
        });
    }
    for sizes in size_combinations(model, max_atoms) {
        if let Some(inst) = find_counterexample(model, assertion, &sizes, cfg)? {
            return Ok(Some(inst));
        }
    }
    Ok(None)
}

enum Stop {
    Break,
    Budget,
}

struct Enumerator<'a, 'v> {
    model: &'a Model,
    cfg: &'a EnumConfig,
    inst: Instance,
    /// Every atom (index within its universe) with the signatures it may
    /// stop at.
    atoms: Vec<(Atom, Vec<SigId>)>,
    count: u64,
    visit: &'v mut dyn FnMut(&Instance) -> ControlFlow<()>,
}

impl Enumerator<'_, '_> {
    fn hierarchy(&mut self, k: usize) -> Result<(), Stop> {
        if k == self.atoms.len() {
            return self.fields(0);
        }
        let (atom, options) = self.atoms[k].clone();
        for stop in options {
            let path = self.path_below_top(stop);
            for &s in &path {
                self.inst.sigs[s].insert(atom);
            }
            let r = self.hierarchy(k + 1);
            for &s in &path {
                self.inst.sigs[s].remove(&atom);
            }
            r?;
        }
        Ok(())
    }

    /// `s` and its ancestors, excluding the top-level signature (whose
    /// extent is always the whole universe).
    fn path_below_top(&self, mut s: SigId) -> Vec<SigId> {
        let mut out = Vec::new();
        while let Some(p) = self.model.sigs[s].parent {
            out.push(s);
            s = p;
        }
        out
    }

    fn fields(&mut self, fi: usize) -> Result<(), Stop> {
        if fi == self.model.fields.len() {
            return self.emit();
        }
        let field = &self.model.fields[fi];
        let n = field.arity();
        let mut lefts: Vec<Tuple> = Vec::new();
        for &o in &self.inst.sigs[field.owner] {
            let mut partial: Vec<Tuple> = vec![vec![o]];
            for i in 1..n - 1 {
                let dom: BTreeSet<Atom> = match field.restriction {
                    Some((ri, g)) if ri == i => self.inst.fields[g]
                        .iter()
                        .filter(|t| t[0] == o)
                        .map(|t| t[1])
                        .collect(),
                    _ => self.inst.sigs[field.columns[i]].clone(),
                };
                partial = partial
                    .into_iter()
                    .flat_map(|p| {
                        dom.iter().map(move |&x| {
                            let mut q = p.clone();
                            q.push(x);
                            q
                        })
                    })
                    .collect();
            }
            lefts.extend(partial);
        }
        let last_col = n - 1;
        let last: Vec<Atom> = match field.restriction {
            Some((ri, _)) if ri == last_col => Vec::new(), // handled per left tuple below
            _ => self.inst.sigs[field.columns[last_col]].iter().copied().collect(),
        };
        let restricted_last = matches!(field.restriction, Some((ri, _)) if ri == last_col);
        self.images(fi, &lefts, &last, restricted_last, 0)
    }

    fn images(&mut self, fi: usize, lefts: &[Tuple], last: &[Atom], restricted_last: bool, li: usize) -> Result<(), Stop> {
        if li == lefts.len() {
            return self.fields(fi + 1);
        }
        let field = &self.model.fields[fi];
        let left = &lefts[li];
        let range: Vec<Atom> = if restricted_last {
            let g = field.restriction.expect("restricted").1;
            self.inst.fields[g].iter().filter(|t| t[0] == left[0]).map(|t| t[1]).collect()
        } else {
            last.to_vec()
        };
        let mult = if self.cfg.respect_multiplicity { field.mult } else { Mult::Set };
        for mask in 0u32..(1u32 << range.len()) {
            let k = mask.count_ones();
            let ok = match mult {
                Mult::Set => true,
                Mult::Some => k >= 1,
                Mult::One => k == 1,
                Mult::Lone => k <= 1,
            };
            if !ok {
                continue;
            }
            let tuples: Vec<Tuple> = range
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .map(|(_, &x)| {
                    let mut t = left.clone();
                    t.push(x);
                    t
                })
                .collect();
            for t in &tuples {
                self.inst.fields[fi].insert(t.clone());
            }
            let r = self.images(fi, lefts, last, restricted_last, li + 1);
            for t in &tuples {
                self.inst.fields[fi].remove(t);
            }
            r?;
        }
        Ok(())
    }

    fn emit(&mut self) -> Result<(), Stop> {
        self.count += 1;
        if self.count > self.cfg.budget {
            return Err(Stop::Budget);
        }
        match (self.visit)(&self.inst) {
            ControlFlow::Continue(()) => Ok(()),
            ControlFlow::Break(()) => Err(Stop::Break),
        }
    }
}
