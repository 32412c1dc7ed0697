//! Finite valuations of a model.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Model, SigId};

/// An atom is identified by its index within the universe of its top-level
/// signature; atoms of different top-level signatures never meet in a
/// well-typed expression, so indices are only compared within one universe.
pub type Atom = u32;
pub type Tuple = Vec<Atom>;
pub type TupleSet = BTreeSet<Tuple>;

/// How integer terms are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntSemantics {
    /// Two's-complement arithmetic of the given width, as in the bounded
    /// encoding.
    Wrapping { bits: u32 },
    /// Exact arithmetic; integer quantifiers range over `lo..=hi`.
    Window { lo: i64, hi: i64 },
}

impl Default for IntSemantics {
    fn default() -> Self {
        IntSemantics::Window { lo: -4, hi: 4 }
    }
}

impl IntSemantics {
    /// Maps an exact result into the value space of the semantics.
    pub fn normalize(self, v: i64) -> i64 {
        match self {
            IntSemantics::Wrapping { bits } => {
                let m = 1i128 << bits;
                let mut r = (v as i128).rem_euclid(m);
                if r >= m / 2 {
                    r -= m;
                }
                r as i64
            }
            IntSemantics::Window { .. } => v,
        }
    }

    /// The integers an integer quantifier ranges over.
    pub fn range(self) -> std::ops::RangeInclusive<i64> {
        match self {
            IntSemantics::Wrapping { bits } => {
                let half = 1i64 << (bits - 1);
                -half..=half - 1
            }
            IntSemantics::Window { lo, hi } => lo..=hi,
        }
    }
}

/// A finite valuation: a universe per top-level signature, an extent per
/// signature and a tuple set per field.
///
/// The ordered signature, if any, is ordered by atom index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    /// Universe size per top-level signature.
    pub sizes: BTreeMap<SigId, u32>,
    /// Extent per signature, indexed by `SigId`.
    pub sigs: Vec<BTreeSet<Atom>>,
    /// Extent per field, indexed by `FieldId`.
    pub fields: Vec<TupleSet>,
    pub ints: IntSemantics,
}

impl Instance {
    /// An instance with every top-level extent equal to its universe and
    /// everything else empty.
    pub fn empty(model: &Model, sizes: &BTreeMap<SigId, u32>) -> Instance {
        let mut sigs = vec![BTreeSet::new(); model.sigs.len()];
        for (&top, &n) in sizes {
            sigs[top] = (0..n).collect();
        }
        Instance {
            sizes: sizes.clone(),
            sigs,
            fields: vec![TupleSet::new(); model.fields.len()],
            ints: IntSemantics::default(),
        }
    }

    /// Uniform universe size for every top-level signature.
    pub fn uniform_sizes(model: &Model, n: u32) -> BTreeMap<SigId, u32> {
        model.top_levels().into_iter().map(|t| (t, n)).collect()
    }

    pub fn universe(&self, top: SigId) -> u32 {
        self.sizes.get(&top).copied().unwrap_or(0)
    }

    /// Canonical atom name, e.g. `Book$1`.
    pub fn atom_name(model: &Model, top: SigId, atom: Atom) -> String {
        format!("{}${}", model.sigs[top].name, atom)
    }

    /// Checks the structural invariants: top-level extents are whole
    /// universes, children lie inside parents, siblings are disjoint,
    /// constrained abstract signatures are covered by their children and
    /// every tuple component lies in its column's universe.
    pub fn check_wellformed(&self, model: &Model) -> Result<(), String> {
        if self.sigs.len() != model.sigs.len() || self.fields.len() != model.fields.len() {
            return Err("instance does not match the model's signatures and fields".into());
        }
        for top in model.top_levels() {
            let n = self.universe(top);
            if self.sigs[top] != (0..n).collect::<BTreeSet<_>>() {
                return Err(format!("extent of `{}` is not its universe", model.sigs[top].name));
            }
        }
        for (s, sig) in model.sigs.iter().enumerate() {
            if let Some(p) = sig.parent {
                if !self.sigs[s].is_subset(&self.sigs[p]) {
                    return Err(format!("`{}` is not contained in `{}`", sig.name, model.sigs[p].name));
                }
            }
            for (i, &a) in sig.children.iter().enumerate() {
                for &b in &sig.children[i + 1..] {
                    if !self.sigs[a].is_disjoint(&self.sigs[b]) {
                        return Err(format!(
                            "`{}` and `{}` overlap",
                            model.sigs[a].name, model.sigs[b].name
                        ));
                    }
                }
            }
            if model.is_abstract_constrained(s) {
                let covered: BTreeSet<Atom> = sig.children.iter().flat_map(|&c| self.sigs[c].iter().copied()).collect();
                if covered != self.sigs[s] {
                    return Err(format!("abstract `{}` is not covered by its children", sig.name));
                }
            }
        }
        for (f, field) in model.fields.iter().enumerate() {
            for t in &self.fields[f] {
                if t.len() != field.arity() {
                    return Err(format!("tuple of wrong arity in `{}`", field.name));
                }
                for (&a, &c) in t.iter().zip(&field.columns) {
                    if a >= self.universe(model.top(c)) {
                        return Err(format!("tuple of `{}` mentions a non-existent atom", field.name));
                    }
                }
            }
        }
        Ok(())
    }
}
