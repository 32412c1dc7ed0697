//! The relational theory: sorts, tuple constructors and relational
//! operators with their defining axioms, generated per arity on demand.

use std::collections::BTreeSet;

use super::syntax::*;

/// One operator of the theory at fixed arities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpInstance {
    /// Tuple constructor of arity k >= 2.
    Tuple(usize),
    Union(usize),
    Inter(usize),
    Diff(usize),
    /// Product of an m-ary and an n-ary relation.
    Prod(usize, usize),
    /// Join of an m-ary and an n-ary relation, m + n > 2.
    Join(usize, usize),
    TransClos,
    ReflTransClos,
    /// The unary relation containing exactly one atom.
    Sing,
    None(usize),
    Subset(usize),
    /// Extensional equality of k-ary relations.
    Ext(usize),
    Some(usize),
    No(usize),
    Lone(usize),
    One(usize),
}

/// A declared function or predicate symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymbolDecl {
    pub name: String,
    pub args: Vec<FSort>,
    /// `None` for predicates.
    pub result: Option<FSort>,
}

impl SymbolDecl {
    pub fn function(name: &str, args: Vec<FSort>, result: FSort) -> SymbolDecl {
        SymbolDecl {
            name: name.to_string(),
            args,
            result: Some(result),
        }
    }

    pub fn predicate(name: &str, args: Vec<FSort>) -> SymbolDecl {
        SymbolDecl {
            name: name.to_string(),
            args,
            result: None,
        }
    }
}

/// A named closed formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub name: String,
    pub formula: Formula,
}

impl Axiom {
    pub fn new(name: impl Into<String>, formula: Formula) -> Axiom {
        Axiom {
            name: name.into(),
            formula,
        }
    }
}

fn rel(k: usize) -> FSort {
    FSort::Rel(k)
}

fn rv(name: &str, k: usize) -> (String, FSort) {
    (name.to_string(), rel(k))
}

/// `in(tuple(xs), r)`.
fn holds(xs: &[(String, FSort)], r: FTerm) -> Formula {
    mem(tuple(terms_of(xs)), r)
}

impl OpInstance {
    /// Recognizes a theory symbol by name.
    pub fn parse(name: &str) -> Option<OpInstance> {
        let num = |s: &str| s.parse::<usize>().ok().filter(|&k| k >= 1);
        let pair = |s: &str| {
            let (a, b) = s.split_once('x')?;
            Some((num(a)?, num(b)?))
        };
        match name {
            "binary" => return Some(OpInstance::Tuple(2)),
            "ternary" => return Some(OpInstance::Tuple(3)),
            "transClos" => return Some(OpInstance::TransClos),
            "reflTransClos" => return Some(OpInstance::ReflTransClos),
            "sing" => return Some(OpInstance::Sing),
            _ => {}
        }
        if let Some(k) = name.strip_prefix("tuple").and_then(num) {
            return (k >= 4).then_some(OpInstance::Tuple(k));
        }
        let (head, tail) = name.split_once('_')?;
        let op = match head {
            "union" => OpInstance::Union(num(tail)?),
            "inter" => OpInstance::Inter(num(tail)?),
            "diff" => OpInstance::Diff(num(tail)?),
            "none" => OpInstance::None(num(tail)?),
            "subset" => OpInstance::Subset(num(tail)?),
            "some" => OpInstance::Some(num(tail)?),
            "no" => OpInstance::No(num(tail)?),
            "lone" => OpInstance::Lone(num(tail)?),
            "one" => OpInstance::One(num(tail)?),
            "prod" => {
                let (m, n) = pair(tail)?;
                OpInstance::Prod(m, n)
            }
            "join" => {
                let (m, n) = pair(tail)?;
                if m + n <= 2 {
                    return None;
                }
                OpInstance::Join(m, n)
            }
            _ => return None,
        };
        Some(op)
    }

    pub fn name(self) -> String {
        match self {
            OpInstance::Tuple(k) => constructor_name(k),
            OpInstance::Union(k) => format!("union_{k}"),
            OpInstance::Inter(k) => format!("inter_{k}"),
            OpInstance::Diff(k) => format!("diff_{k}"),
            OpInstance::Prod(m, n) => format!("prod_{m}x{n}"),
            OpInstance::Join(m, n) => format!("join_{m}x{n}"),
            OpInstance::TransClos => "transClos".into(),
            OpInstance::ReflTransClos => "reflTransClos".into(),
            OpInstance::Sing => "sing".into(),
            OpInstance::None(k) => format!("none_{k}"),
            OpInstance::Subset(k) => format!("subset_{k}"),
            OpInstance::Ext(k) => format!("ext_{k}"),
            OpInstance::Some(k) => format!("some_{k}"),
            OpInstance::No(k) => format!("no_{k}"),
            OpInstance::Lone(k) => format!("lone_{k}"),
            OpInstance::One(k) => format!("one_{k}"),
        }
    }

    /// Tuple and relation arities this operator mentions.
    pub fn arities(self) -> Vec<usize> {
        match self {
            OpInstance::Tuple(k)
            | OpInstance::Union(k)
            | OpInstance::Inter(k)
            | OpInstance::Diff(k)
            | OpInstance::None(k)
            | OpInstance::Subset(k)
            | OpInstance::Ext(k)
            | OpInstance::Some(k)
            | OpInstance::No(k)
            | OpInstance::Lone(k)
            | OpInstance::One(k) => vec![k],
            OpInstance::Prod(m, n) => vec![m, n, m + n],
            OpInstance::Join(m, n) => vec![m, n, m + n - 2],
            OpInstance::TransClos | OpInstance::ReflTransClos => vec![2],
            OpInstance::Sing => vec![1],
        }
    }

    /// The symbol declaration (extensionality has none: it constrains `=`).
    pub fn decl(self) -> Option<SymbolDecl> {
        let name = self.name();
        let d = match self {
            OpInstance::Tuple(k) => SymbolDecl::function(&name, vec![FSort::Atom; k], FSort::TupleK(k)),
            OpInstance::Union(k) | OpInstance::Inter(k) | OpInstance::Diff(k) => {
                SymbolDecl::function(&name, vec![rel(k), rel(k)], rel(k))
            }
            OpInstance::Prod(m, n) => SymbolDecl::function(&name, vec![rel(m), rel(n)], rel(m + n)),
            OpInstance::Join(m, n) => SymbolDecl::function(&name, vec![rel(m), rel(n)], rel(m + n - 2)),
            OpInstance::TransClos | OpInstance::ReflTransClos => SymbolDecl::function(&name, vec![rel(2)], rel(2)),
            OpInstance::Sing => SymbolDecl::function(&name, vec![FSort::Atom], rel(1)),
            OpInstance::None(k) => SymbolDecl::function(&name, vec![], rel(k)),
            OpInstance::Subset(k) => SymbolDecl::predicate(&name, vec![rel(k), rel(k)]),
            OpInstance::Ext(_) => return None,
            OpInstance::Some(k) | OpInstance::No(k) | OpInstance::Lone(k) | OpInstance::One(k) => {
                SymbolDecl::predicate(&name, vec![rel(k)])
            }
        };
        Some(d)
    }

    /// Operators whose symbols occur in this operator's axioms.
    fn needs(self) -> Vec<OpInstance> {
        let mut out: Vec<OpInstance> = self
            .arities()
            .into_iter()
            .filter(|&k| k >= 2)
            .map(OpInstance::Tuple)
            .collect();
        match self {
            OpInstance::TransClos => out.push(OpInstance::Tuple(2)),
            OpInstance::ReflTransClos => out.extend([OpInstance::Tuple(2), OpInstance::TransClos]),
            _ => {}
        }
        out
    }

    /// Defining axioms.
    pub fn axioms(self) -> Vec<Axiom> {
        let name = self.name();
        let f = |args: Vec<FTerm>| func(&name, args);
        let (r, s) = (var("r"), var("s"));
        match self {
            OpInstance::Tuple(k) => {
                let xs = atom_vars("x", k);
                let ys = atom_vars("y", k);
                let cover = forall(
                    vec![("t".into(), FSort::TupleK(k))],
                    exists(xs.clone(), Formula::Eq(var("t"), f(terms_of(&xs)))),
                );
                let eqs = xs.iter().zip(&ys).map(|((x, _), (y, _))| Formula::Eq(var(x), var(y))).collect();
                let inj = forall(
                    [xs.clone(), ys.clone()].concat(),
                    implies(Formula::Eq(f(terms_of(&xs)), f(terms_of(&ys))), Formula::And(eqs)),
                );
                vec![Axiom::new(format!("{name}_cover"), cover), Axiom::new(format!("{name}_inj"), inj)]
            }
            OpInstance::Union(k) | OpInstance::Inter(k) | OpInstance::Diff(k) => {
                let xs = atom_vars("x", k);
                let (a, b) = (holds(&xs, r.clone()), holds(&xs, s.clone()));
                let rhs = match self {
                    OpInstance::Union(_) => Formula::Or(vec![a, b]),
                    OpInstance::Inter(_) => Formula::And(vec![a, b]),
                    _ => Formula::And(vec![a, not(b)]),
                };
                let body = forall(xs.clone(), iff(holds(&xs, f(vec![r.clone(), s.clone()])), rhs));
                vec![Axiom::new(format!("{name}_def"), forall(vec![rv("r", k), rv("s", k)], body))]
            }
            OpInstance::Prod(m, n) => {
                let xs = atom_vars("x", m);
                let ys = atom_vars("y", n);
                let all: Vec<_> = [xs.clone(), ys.clone()].concat();
                let body = iff(
                    holds(&all, f(vec![r.clone(), s.clone()])),
                    Formula::And(vec![holds(&xs, r.clone()), holds(&ys, s.clone())]),
                );
                vec![Axiom::new(format!("{name}_def"), forall(vec![rv("r", m), rv("s", n)], forall(all, body)))]
            }
            OpInstance::Join(m, n) => {
                let xs = atom_vars("x", m - 1);
                let ys = atom_vars("y", n - 1);
                let z = vec![("z".to_string(), FSort::Atom)];
                let left: Vec<_> = [xs.clone(), z.clone()].concat();
                let right: Vec<_> = [z.clone(), ys.clone()].concat();
                let all: Vec<_> = [xs.clone(), ys.clone()].concat();
                let body = iff(
                    holds(&all, f(vec![r.clone(), s.clone()])),
                    exists(z, Formula::And(vec![holds(&left, r.clone()), holds(&right, s.clone())])),
                );
                vec![Axiom::new(format!("{name}_def"), forall(vec![rv("r", m), rv("s", n)], forall(all, body)))]
            }
            OpInstance::TransClos => {
                // Unfolding only: every fixpoint satisfies it, the least one
                // included. Minimality is the induction rule.
                let pair = |a: &str, c: &str| tuple(vec![var(a), var(c)]);
                let tc = f(vec![r.clone()]);
                let body = iff(
                    mem(pair("a", "c"), tc.clone()),
                    Formula::Or(vec![
                        mem(pair("a", "c"), r.clone()),
                        exists(
                            vec![("b".into(), FSort::Atom)],
                            Formula::And(vec![mem(pair("a", "b"), r.clone()), mem(pair("b", "c"), tc)]),
                        ),
                    ]),
                );
                vec![Axiom::new(
                    "transClos_unfold",
                    forall(vec![rv("r", 2)], forall(atom_names(&["a", "c"]), body)),
                )]
            }
            OpInstance::ReflTransClos => {
                let pair = tuple(vec![var("a"), var("c")]);
                let body = iff(
                    mem(pair.clone(), f(vec![r.clone()])),
                    Formula::Or(vec![
                        Formula::Eq(var("a"), var("c")),
                        mem(pair, func("transClos", vec![r.clone()])),
                    ]),
                );
                vec![Axiom::new(
                    "reflTransClos_def",
                    forall(vec![rv("r", 2)], forall(atom_names(&["a", "c"]), body)),
                )]
            }
            OpInstance::Sing => {
                let body = iff(mem(var("x"), f(vec![var("a")])), Formula::Eq(var("x"), var("a")));
                vec![Axiom::new("sing_def", forall(atom_names(&["a", "x"]), body))]
            }
            OpInstance::None(k) => {
                let xs = atom_vars("x", k);
                vec![Axiom::new(format!("{name}_def"), forall(xs.clone(), not(holds(&xs, f(vec![])))))]
            }
            OpInstance::Subset(k) => {
                let xs = atom_vars("x", k);
                let body = iff(
                    pred(&name, vec![r.clone(), s.clone()]),
                    forall(xs.clone(), implies(holds(&xs, r.clone()), holds(&xs, s.clone()))),
                );
                vec![Axiom::new(format!("{name}_def"), forall(vec![rv("r", k), rv("s", k)], body))]
            }
            OpInstance::Ext(k) => {
                let xs = atom_vars("x", k);
                let body = iff(
                    Formula::Eq(r.clone(), s.clone()),
                    forall(xs.clone(), iff(holds(&xs, r.clone()), holds(&xs, s.clone()))),
                );
                vec![Axiom::new(format!("ext_{k}"), forall(vec![rv("r", k), rv("s", k)], body))]
            }
            OpInstance::Some(k) | OpInstance::No(k) => {
                let xs = atom_vars("x", k);
                let some = exists(xs.clone(), holds(&xs, r.clone()));
                let rhs = if matches!(self, OpInstance::Some(_)) { some } else { not(some) };
                let body = iff(pred(&name, vec![r.clone()]), rhs);
                vec![Axiom::new(format!("{name}_def"), forall(vec![rv("r", k)], body))]
            }
            OpInstance::Lone(k) | OpInstance::One(k) => {
                let xs = atom_vars("x", k);
                let ys = atom_vars("y", k);
                let eqs = xs.iter().zip(&ys).map(|((x, _), (y, _))| Formula::Eq(var(x), var(y))).collect();
                let lone = forall(
                    [xs.clone(), ys.clone()].concat(),
                    implies(Formula::And(vec![holds(&xs, r.clone()), holds(&ys, r.clone())]), Formula::And(eqs)),
                );
                let rhs = if matches!(self, OpInstance::Lone(_)) {
                    lone
                } else {
                    Formula::And(vec![exists(xs.clone(), holds(&xs, r.clone())), lone])
                };
                let body = iff(pred(&name, vec![r.clone()]), rhs);
                vec![Axiom::new(format!("{name}_def"), forall(vec![rv("r", k)], body))]
            }
        }
    }
}

fn atom_names(names: &[&str]) -> Vec<(String, FSort)> {
    names.iter().map(|n| (n.to_string(), FSort::Atom)).collect()
}

/// The operators an obligation uses, closed under the dependencies of
/// their axioms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelTheory {
    pub ops: BTreeSet<OpInstance>,
}

impl RelTheory {
    /// The operators whose symbols occur in the formulas, plus the
    /// extensionality axiom for every relation arity compared with `=`.
    pub fn for_formulas<'a>(formulas: impl IntoIterator<Item = &'a Formula>, rel_eq_arities: &BTreeSet<usize>) -> RelTheory {
        let mut ops = BTreeSet::new();
        for f in formulas {
            for (name, _) in f.symbols() {
                if let Some(op) = OpInstance::parse(&name) {
                    ops.insert(op);
                }
            }
        }
        ops.extend(rel_eq_arities.iter().map(|&k| OpInstance::Ext(k)));
        let mut theory = RelTheory { ops };
        theory.close();
        theory
    }

    fn close(&mut self) {
        loop {
            let extra: Vec<OpInstance> = self
                .ops
                .iter()
                .flat_map(|op| op.needs())
                .filter(|op| !self.ops.contains(op))
                .collect();
            if extra.is_empty() {
                return;
            }
            self.ops.extend(extra);
        }
    }

    /// Largest tuple or relation arity mentioned.
    pub fn max_arity(&self) -> usize {
        self.ops.iter().flat_map(|op| op.arities()).max().unwrap_or(1)
    }

    pub fn decls(&self) -> Vec<SymbolDecl> {
        self.ops.iter().filter_map(|op| op.decl()).collect()
    }

    pub fn axioms(&self) -> Vec<Axiom> {
        self.ops.iter().flat_map(|op| op.axioms()).collect()
    }
}
