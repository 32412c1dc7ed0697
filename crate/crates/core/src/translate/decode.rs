//! Decoding solver models into instances.

use std::collections::BTreeMap;

use crate::eval::{Atom, Instance, IntSemantics, Tuple};
use crate::model::{Model, SigId};
use crate::smt::{DecodeError, MValue, RawModel};

use super::bounded::EncodingMetadata;

/// An instance decoded from a model, with the values of the skolemized
/// assertion variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub instance: Instance,
    /// Source variable name and value (an atom name or an integer).
    pub witnesses: Vec<(String, String)>,
}

fn err<T>(message: String) -> Result<T, DecodeError> {
    Err(DecodeError {
        message,
        fragment: String::new(),
    })
}

/// Atom values of one top-level sort and the atom each one stands for.
struct Universe {
    values: Vec<MValue>,
    /// Number of values that are atoms (the rest are non-live values that
    /// must not occur in any extent).
    live: usize,
}

/// Applies a symbol; symbols absent from the model are unconstrained,
/// and the validation that follows decoding makes `false` a safe default.
fn truth(raw: &RawModel, name: &str, args: &[MValue]) -> Result<bool, DecodeError> {
    if !raw.has(name) {
        return Ok(false);
    }
    match raw.apply(name, args)? {
        MValue::Bool(b) => Ok(b),
        other => err(format!("`{name}` has non-boolean value {other:?}")),
    }
}

/// Decodes a model of a bounded or unbounded encoding. Bitvector values
/// below the scope become atoms with that index; elements of free sorts
/// are numbered in the order the solver lists them, except that members
/// of the ordered signature come first, in order. Skolem functions are
/// dropped.
pub fn decode_instance(model: &Model, raw: &RawModel, meta: &EncodingMetadata) -> Result<Decoded, DecodeError> {
    let tops = model.top_levels();
    let mut universes: BTreeMap<SigId, Universe> = BTreeMap::new();
    match &meta.scope {
        Some(scope) => {
            for &t in &tops {
                let w = scope.bitwidth(t);
                let values = (0..1u64 << w).map(|v| MValue::Bv { value: v, width: w }).collect();
                universes.insert(
                    t,
                    Universe {
                        values,
                        live: scope.scope(t) as usize,
                    },
                );
            }
        }
        None => {
            for &t in &tops {
                let name = &model.sigs[t].name;
                let Some(elems) = raw.universes.get(name) else {
                    return err(format!("the model does not enumerate sort `{name}`"));
                };
                if !raw.finite_sorts.contains(name) {
                    return err(format!("sort `{name}` is not finitely constrained"));
                }
                let mut values: Vec<MValue> = elems.iter().map(|e| MValue::Elem(e.clone())).collect();
                if let (Some(ord), Some(lt)) = (&model.ordering, &meta.symbols.order) {
                    if model.top(ord.sig) == t {
                        values = order_elements(model, raw, meta, ord.sig, lt, values)?;
                    }
                }
                let live = values.len();
                universes.insert(t, Universe { values, live });
            }
        }
    }

    let sizes: BTreeMap<SigId, u32> = universes.iter().map(|(&t, u)| (t, u.live as u32)).collect();
    let mut inst = Instance::empty(model, &sizes);
    if meta.scope.is_some() {
        inst.ints = IntSemantics::Wrapping { bits: meta.int_width.max(1) };
    }
    let index = |t: SigId, v: &MValue| -> Option<usize> { universes[&t].values.iter().position(|x| x == v) };

    for (&s, f) in &meta.symbols.membership {
        let t = model.top(s);
        let u = &universes[&t];
        for (i, v) in u.values.iter().enumerate() {
            if truth(raw, f, std::slice::from_ref(v))? {
                if i >= u.live {
                    return err(format!("`{f}` holds for non-live value {v:?}"));
                }
                inst.sigs[s].insert(i as Atom);
            }
        }
    }
    for (fid, field) in model.fields.iter().enumerate() {
        let name = &meta.symbols.fields[fid];
        let cols: Vec<SigId> = field.columns.iter().map(|&c| model.top(c)).collect();
        let domains: Vec<Vec<MValue>> = cols.iter().map(|t| universes[t].values.clone()).collect();
        if !raw.has(name) {
            continue;
        }
        for (args, v) in raw.table(name, &domains)? {
            if v != MValue::Bool(true) {
                continue;
            }
            let mut tuple: Tuple = Vec::with_capacity(args.len());
            for (a, &t) in args.iter().zip(&cols) {
                let i = index(t, a).expect("table arguments come from the universe");
                if i >= universes[&t].live {
                    return err(format!("`{name}` holds for a tuple with non-live value {a:?}"));
                }
                tuple.push(i as Atom);
            }
            inst.fields[fid].insert(tuple);
        }
    }

    let mut witnesses = Vec::new();
    for w in &meta.symbols.witnesses {
        if !raw.has(&w.symbol) {
            continue;
        }
        let v = raw.apply(&w.symbol, &[])?;
        let shown = match (w.top, &v) {
            (Some(t), _) => match index(t, &v) {
                Some(i) if i < universes[&t].live => Instance::atom_name(model, t, i as Atom),
                _ => return err(format!("witness `{}` has non-live value {v:?}", w.var)),
            },
            (None, MValue::Int(n)) => n.to_string(),
            (None, MValue::Bv { value, width }) => {
                let w = *width;
                let signed = if w < 64 && value >> (w - 1) & 1 == 1 {
                    *value as i64 - (1i64 << w)
                } else {
                    *value as i64
                };
                signed.to_string()
            }
            (None, other) => return err(format!("integer witness `{}` has value {other:?}", w.var)),
        };
        witnesses.push((w.var.clone(), shown));
    }
    Ok(Decoded { instance: inst, witnesses })
}

/// Orders the elements of a free sort so that members of the ordered
/// signature come first, sorted by the number of their predecessors.
fn order_elements(
    model: &Model,
    raw: &RawModel,
    meta: &EncodingMetadata,
    s: SigId,
    lt: &str,
    values: Vec<MValue>,
) -> Result<Vec<MValue>, DecodeError> {
    let member = |v: &MValue| -> Result<bool, DecodeError> {
        match meta.symbols.membership.get(&s) {
            Some(f) => truth(raw, f, std::slice::from_ref(v)),
            None => Ok(model.sigs[s].is_top_level()),
        }
    };
    let mut members = Vec::new();
    let mut others = Vec::new();
    for v in values {
        if member(&v)? {
            members.push(v);
        } else {
            others.push(v);
        }
    }
    let mut ranked = Vec::new();
    for v in &members {
        let mut k = 0;
        for u in &members {
            if truth(raw, lt, &[u.clone(), v.clone()])? {
                k += 1;
            }
        }
        ranked.push((k, v.clone()));
    }
    ranked.sort_by_key(|(k, _)| *k);
    let mut out: Vec<MValue> = ranked.into_iter().map(|(_, v)| v).collect();
    out.extend(others);
    Ok(out)
}
