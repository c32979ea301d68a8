use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relstruct::{Elem, Relation, Structure, StructureBuilder, Vocabulary};

use super::formula::{Formula, Var};

/// A formula compiled against a structure, with variables as slot indices.
enum Node<'a> {
    Lit {
        rel: Option<&'a Relation>,
        args: Vec<usize>,
        neg: bool,
    },
    And(Vec<Node<'a>>),
    Or(Vec<Node<'a>>),
    Exists(usize, Box<Node<'a>>),
}

struct Compiler<'a> {
    s: &'a Structure,
    slots: Vec<Var>,
    scope: Vec<(Var, usize)>,
}

impl<'a> Compiler<'a> {
    fn new(s: &'a Structure, free: &[Var]) -> Self {
        Compiler {
            s,
            slots: free.to_vec(),
            scope: free.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect(),
        }
    }

    fn slot(&self, v: &Var) -> Result<usize> {
        self.scope
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|&(_, i)| i)
            .ok_or_else(|| Error::Argument(format!("variable `{v}` is free")))
    }

    fn compile(&mut self, f: &Formula) -> Result<Node<'a>> {
        Ok(match f {
            Formula::Atom(a) | Formula::NotAtom(a) => {
                let rel = self
                    .s
                    .relation(&a.rel)
                    .ok_or_else(|| Error::VocabularyMismatch(format!("unknown symbol `{}`", a.rel)))?;
                if rel.arity() != a.args.len() {
                    return Err(Error::VocabularyMismatch(format!(
                        "`{}` has arity {} but is used with {} arguments",
                        a.rel,
                        rel.arity(),
                        a.args.len()
                    )));
                }
                Node::Lit {
                    rel: Some(rel),
                    args: a.args.iter().map(|v| self.slot(v)).collect::<Result<_>>()?,
                    neg: matches!(f, Formula::NotAtom(_)),
                }
            }
            Formula::Eq(x, y) | Formula::NotEq(x, y) => Node::Lit {
                rel: None,
                args: vec![self.slot(x)?, self.slot(y)?],
                neg: matches!(f, Formula::NotEq(..)),
            },
            Formula::And(fs) => Node::And(fs.iter().map(|g| self.compile(g)).collect::<Result<_>>()?),
            Formula::Or(fs) => Node::Or(fs.iter().map(|g| self.compile(g)).collect::<Result<_>>()?),
            Formula::Exists(x, b) => {
                let i = self.slots.len();
                self.slots.push(x.clone());
                self.scope.push((x.clone(), i));
                let body = self.compile(b)?;
                self.scope.pop();
                Node::Exists(i, Box::new(body))
            }
        })
    }
}

impl Node<'_> {
    fn holds(&self, asg: &mut [Option<Elem>], n: usize) -> bool {
        match self {
            Node::Lit { .. } => self.partial(asg).expect("assigned"),
            Node::And(fs) => fs.iter().all(|f| f.holds(asg, n)),
            Node::Or(fs) => fs.iter().any(|f| f.holds(asg, n)),
            Node::Exists(i, b) => {
                let found = (0..n as Elem).any(|e| {
                    asg[*i] = Some(e);
                    b.holds(asg, n)
                });
                asg[*i] = None;
                found
            }
        }
    }

    /// Three-valued evaluation: `None` when unassigned slots decide the value.
    fn partial(&self, asg: &[Option<Elem>]) -> Option<bool> {
        match self {
            Node::Lit { rel, args, neg } => {
                let vals: Option<Vec<Elem>> = args.iter().map(|&i| asg[i]).collect();
                let vals = vals?;
                let v = match rel {
                    Some(r) => r.contains(&vals),
                    None => vals[0] == vals[1],
                };
                Some(v != *neg)
            }
            Node::And(fs) => {
                let mut open = false;
                for f in fs {
                    match f.partial(asg) {
                        Some(false) => return Some(false),
                        None => open = true,
                        Some(true) => {}
                    }
                }
                (!open).then_some(true)
            }
            Node::Or(fs) => {
                let mut open = false;
                for f in fs {
                    match f.partial(asg) {
                        Some(true) => return Some(true),
                        None => open = true,
                        Some(false) => {}
                    }
                }
                (!open).then_some(false)
            }
            Node::Exists(..) => None,
        }
    }
}

/// Whether `b` satisfies `f` with the given values for its free variables.
pub fn satisfies(b: &Structure, f: &Formula, values: &[(Var, Elem)]) -> Result<bool> {
    let free: Vec<Var> = values.iter().map(|(v, _)| v.clone()).collect();
    let mut c = Compiler::new(b, &free);
    let node = c.compile(f)?;
    let mut asg: Vec<Option<Elem>> = vec![None; c.slots.len()];
    for (i, (_, e)) in values.iter().enumerate() {
        if *e as usize >= b.len() {
            return Err(Error::Argument(format!("element id {e} out of range")));
        }
        asg[i] = Some(*e);
    }
    Ok(node.holds(&mut asg, b.len()))
}

/// Whether `b` satisfies the sentence `f`, by exhaustive search.
pub fn model_check(b: &Structure, f: &Formula) -> Result<bool> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::Argument(format!(
            "not a sentence: free variables {}",
            free.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    satisfies(b, f, &[])
}

/// A defining formula with its variables, `ar(R)` blocks of `w` each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definition {
    pub vars: Vec<Var>,
    #[serde(serialize_with = "ser_formula", deserialize_with = "de_formula")]
    pub formula: Formula,
}

fn ser_formula<S: Serializer>(f: &Formula, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_string())
}

fn de_formula<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Formula, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// Name of the universe formula in an [`Interpretation`].
pub const UNIVERSE: &str = "U";

/// A quantifier-free interpretation of `output` in `input` of dimension `w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub input: Vocabulary,
    pub output: Vocabulary,
    pub dimension: usize,
    /// Keyed by output symbol, plus [`UNIVERSE`].
    pub formulas: BTreeMap<String, Definition>,
}

impl Interpretation {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let w = self.dimension;
        if w == 0 {
            errs.push("dimension must be positive".to_string());
        }
        if self.output.contains(UNIVERSE) {
            errs.push(format!("output vocabulary may not contain `{UNIVERSE}`"));
        }
        let wanted = self
            .output
            .symbols()
            .map(|(s, k)| (s.to_string(), k))
            .chain([(UNIVERSE.to_string(), 1)]);
        for (s, k) in wanted {
            let Some(d) = self.formulas.get(&s) else {
                errs.push(format!("no formula for `{s}`"));
                continue;
            };
            if d.vars.len() != k * w {
                errs.push(format!("`{s}` needs {} variables, has {}", k * w, d.vars.len()));
            }
            let distinct: std::collections::BTreeSet<&Var> = d.vars.iter().collect();
            if distinct.len() != d.vars.len() {
                errs.push(format!("variables of `{s}` repeat"));
            }
            if d.formula.has_quantifier() {
                errs.push(format!("formula for `{s}` has a quantifier"));
            }
            if let Some(v) = d.formula.free_vars().iter().find(|v| !d.vars.contains(v)) {
                errs.push(format!("formula for `{s}` uses undeclared variable `{v}`"));
            }
            if let Err(e) = d.formula.check_vocabulary(&self.input) {
                errs.push(format!("formula for `{s}`: {e}"));
            }
        }
        for s in self.formulas.keys() {
            if s != UNIVERSE && !self.output.contains(s) {
                errs.push(format!("formula for `{s}` outside the output vocabulary"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errs))
        }
    }
}

struct Steps {
    used: usize,
    limit: usize,
}

impl Steps {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        crate::error::guard("interpretation evaluation steps", self.used, self.limit)
    }
}

/// Enumerates assignments of `blocks` blocks drawn from `choices`, pruning
/// with three-valued evaluation after each block.
fn search(
    node: &Node<'_>,
    choices: &[Vec<Elem>],
    blocks: usize,
    w: usize,
    asg: &mut Vec<Option<Elem>>,
    picked: &mut Vec<usize>,
    steps: &mut Steps,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let j = picked.len();
    if j == blocks {
        if node.partial(asg) == Some(true) {
            out.push(picked.clone());
        }
        return Ok(());
    }
    for (ci, c) in choices.iter().enumerate() {
        steps.tick()?;
        for (k, &e) in c.iter().enumerate() {
            asg[j * w + k] = Some(e);
        }
        if node.partial(asg) != Some(false) {
            picked.push(ci);
            search(node, choices, blocks, w, asg, picked, steps, out)?;
            picked.pop();
        }
    }
    for k in 0..w {
        asg[j * w + k] = None;
    }
    Ok(())
}

/// `I(A)`, or `None` when the universe formula defines the empty set.
pub fn eval_interpretation(i: &Interpretation, a: &Structure, limits: &Limits) -> Result<Option<Structure>> {
    i.validate()?;
    let w = i.dimension;
    let mut steps = Steps {
        used: 0,
        limit: limits.interpretation_tuples,
    };
    let compile = |d: &Definition| -> Result<Node<'_>> { Compiler::new(a, &d.vars).compile(&d.formula) };

    let u_def = &i.formulas[UNIVERSE];
    let u_node = compile(u_def)?;
    let singles: Vec<Vec<Elem>> = a.elements().map(|e| vec![e]).collect();
    let mut found = Vec::new();
    search(&u_node, &singles, w, 1, &mut vec![None; w], &mut Vec::new(), &mut steps, &mut found)?;
    if found.is_empty() {
        return Ok(None);
    }
    let universe: Vec<Vec<Elem>> = found
        .into_iter()
        .map(|p| p.into_iter().map(|c| c as Elem).collect())
        .collect();

    let mut b = StructureBuilder::new(i.output.clone());
    for t in &universe {
        b.element(if w == 1 {
            a.name(t[0]).to_string()
        } else {
            format!("({})", t.iter().map(|&e| a.name(e)).collect::<Vec<_>>().join(","))
        });
    }
    for (s, k) in i.output.symbols() {
        let d = &i.formulas[s];
        let node = compile(d)?;
        let mut hits = Vec::new();
        search(&node, &universe, k, w, &mut vec![None; k * w], &mut Vec::new(), &mut steps, &mut hits)?;
        for h in hits {
            let ids: Vec<Elem> = h.into_iter().map(|x| x as Elem).collect();
            b.tuple(s, &ids)?;
        }
    }
    b.finish().map(Some)
}
