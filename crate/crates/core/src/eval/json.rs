//! JSON form of instances (see `docs/instance-format.md`).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instance::{Atom, Instance, IntSemantics, TupleSet};
use crate::model::{Model, SigId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed instance: {0}")]
pub struct InstanceError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntsJson {
    Wrapping { bits: u32 },
    Window { lo: i64, hi: i64 },
}

/// Serialized instance. Atoms are named `Top$i` after their top-level
/// signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub universe: BTreeMap<String, u32>,
    pub sigs: BTreeMap<String, Vec<String>>,
    pub fields: BTreeMap<String, Vec<Vec<String>>>,
    pub ints: IntsJson,
}

impl Instance {
    pub fn to_json(&self, model: &Model) -> InstanceJson {
        let universe = self
            .sizes
            .iter()
            .map(|(&t, &n)| (model.sigs[t].name.clone(), n))
            .collect();
        let sigs = model
            .sigs
            .iter()
            .enumerate()
            .map(|(s, sig)| {
                let top = model.top(s);
                let atoms = self.sigs[s].iter().map(|&a| Instance::atom_name(model, top, a)).collect();
                (sig.name.clone(), atoms)
            })
            .collect();
        let fields = model
            .fields
            .iter()
            .enumerate()
            .map(|(f, field)| {
                let tuples = self.fields[f]
                    .iter()
                    .map(|t| {
                        t.iter()
                            .zip(&field.columns)
                            .map(|(&a, &c)| Instance::atom_name(model, model.top(c), a))
                            .collect()
                    })
                    .collect();
                (field.name.clone(), tuples)
            })
            .collect();
        let ints = match self.ints {
            IntSemantics::Wrapping { bits } => IntsJson::Wrapping { bits },
            IntSemantics::Window { lo, hi } => IntsJson::Window { lo, hi },
        };
        InstanceJson {
            universe,
            sigs,
            fields,
            ints,
        }
    }

    pub fn to_json_string(&self, model: &Model) -> String {
        serde_json::to_string_pretty(&self.to_json(model)).expect("instance serializes")
    }

    pub fn from_json(model: &Model, j: &InstanceJson) -> Result<Instance, InstanceError> {
        let err = |m: String| InstanceError(m);
        let mut sizes = BTreeMap::new();
        for (name, &n) in &j.universe {
            let s = model
                .sig_by_name(name)
                .ok_or_else(|| err(format!("unknown signature `{name}`")))?;
            if !model.sigs[s].is_top_level() {
                return Err(err(format!("`{name}` is not a top-level signature")));
            }
            sizes.insert(s, n);
        }
        for t in model.top_levels() {
            if !sizes.contains_key(&t) {
                return Err(err(format!("missing universe for `{}`", model.sigs[t].name)));
            }
        }
        let atom = |top: SigId, text: &str| -> Result<Atom, InstanceError> {
            let prefix = format!("{}$", model.sigs[top].name);
            let idx: Atom = text
                .strip_prefix(&prefix)
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| err(format!("`{text}` is not an atom of `{}`", model.sigs[top].name)))?;
            if idx >= sizes[&top] {
                return Err(err(format!("`{text}` lies outside its universe")));
            }
            Ok(idx)
        };
        let mut inst = Instance::empty(model, &sizes);
        for (name, atoms) in &j.sigs {
            let s = model
                .sig_by_name(name)
                .ok_or_else(|| err(format!("unknown signature `{name}`")))?;
            let top = model.top(s);
            let ext: BTreeSet<Atom> = atoms.iter().map(|a| atom(top, a)).collect::<Result<_, _>>()?;
            inst.sigs[s] = ext;
        }
        for (name, tuples) in &j.fields {
            let f = model
                .field_by_name(name)
                .ok_or_else(|| err(format!("unknown field `{name}`")))?;
            let cols = &model.fields[f].columns;
            let mut set = TupleSet::new();
            for t in tuples {
                if t.len() != cols.len() {
                    return Err(err(format!("tuple of wrong arity in `{name}`")));
                }
                let tuple = t
                    .iter()
                    .zip(cols)
                    .map(|(a, &c)| atom(model.top(c), a))
                    .collect::<Result<Vec<_>, _>>()?;
                set.insert(tuple);
            }
            inst.fields[f] = set;
        }
        inst.ints = match j.ints {
            IntsJson::Wrapping { bits } if (1..=62).contains(&bits) => IntSemantics::Wrapping { bits },
            IntsJson::Wrapping { bits } => return Err(err(format!("unsupported integer width {bits}"))),
            IntsJson::Window { lo, hi } => IntSemantics::Window { lo, hi },
        };
        inst.check_wellformed(model).map_err(err)?;
        Ok(inst)
    }

    pub fn from_json_str(model: &Model, text: &str) -> Result<Instance, InstanceError> {
        let j: InstanceJson = serde_json::from_str(text).map_err(|e| InstanceError(e.to_string()))?;
        Instance::from_json(model, &j)
    }
}
