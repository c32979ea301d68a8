use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::relstruct::Vocabulary;

pub type Var = String;

/// A relational atom `R x_1 ... x_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub rel: String,
    pub args: Vec<Var>,
}

impl Atom {
    pub fn new<S: Into<String>>(rel: &str, args: impl IntoIterator<Item = S>) -> Self {
        Atom {
            rel: rel.to_string(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

/// Existential first-order formulas in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Eq(Var, Var),
    NotAtom(Atom),
    NotEq(Var, Var),
    /// Empty conjunction is true.
    And(Vec<Formula>),
    /// Empty disjunction is false.
    Or(Vec<Formula>),
    Exists(Var, Box<Formula>),
}

/// Syntactic fragments, most specific first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fragment {
    /// Built from atoms by conjunction and existential quantification.
    Pp,
    /// A disjunction of primitive positive sentences.
    Dpp,
    Existential,
    /// Not a sentence, or uses a symbol above the arity bound.
    Other,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Pp => "pp",
            Fragment::Dpp => "dpp",
            Fragment::Existential => "existential",
            Fragment::Other => "other",
        })
    }
}

impl Formula {
    pub fn atom<S: Into<String>>(rel: &str, args: impl IntoIterator<Item = S>) -> Formula {
        Formula::Atom(Atom::new(rel, args))
    }

    pub fn exists(x: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula::And(parts)
    }

    pub fn truth() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn children(&self) -> &[Formula] {
        match self {
            Formula::And(fs) | Formula::Or(fs) => fs,
            Formula::Exists(_, b) => std::slice::from_ref(b),
            _ => &[],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut add = |v: &Var| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::Atom(a) | Formula::NotAtom(a) => a.args.iter().for_each(&mut add),
            Formula::Eq(x, y) | Formula::NotEq(x, y) => {
                add(x);
                add(y);
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Exists(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(a) | Formula::NotAtom(a) => out.extend(a.args.iter().cloned()),
            Formula::Eq(x, y) | Formula::NotEq(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Formula::Exists(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    /// Preorder traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Relation symbols with their arities; fails if a symbol is used with
    /// two arities.
    pub fn symbols(&self) -> Result<Vocabulary> {
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut clash = None;
        self.visit(&mut |f| {
            if let Formula::Atom(a) | Formula::NotAtom(a) = f {
                if let Some(&k) = seen.get(&a.rel) {
                    if k != a.args.len() {
                        clash = Some(a.rel.clone());
                    }
                } else {
                    seen.insert(a.rel.clone(), a.args.len());
                }
            }
        });
        if let Some(r) = clash {
            return Err(Error::Argument(format!("symbol `{r}` is used with two arities")));
        }
        let mut v = Vocabulary::new();
        for (s, k) in seen {
            v.insert(&s, k)?;
        }
        Ok(v)
    }

    /// Fails unless every symbol is in `vocab` with a matching arity.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<()> {
        for (s, k) in self.symbols()?.symbols() {
            match vocab.arity(s) {
                Some(a) if a == k => {}
                Some(a) => {
                    return Err(Error::VocabularyMismatch(format!(
                        "`{s}` has arity {a} but is used with {k} arguments"
                    )))
                }
                None => return Err(Error::VocabularyMismatch(format!("unknown symbol `{s}`"))),
            }
        }
        Ok(())
    }

    pub fn has_quantifier(&self) -> bool {
        let mut q = false;
        self.visit(&mut |f| q |= matches!(f, Formula::Exists(..)));
        q
    }

    /// Whether only atoms, equalities, conjunction and `exists` occur.
    pub fn is_pp(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Eq(..) => true,
            Formula::NotAtom(_) | Formula::NotEq(..) | Formula::Or(_) => false,
            Formula::And(fs) => fs.iter().all(Formula::is_pp),
            Formula::Exists(_, b) => b.is_pp(),
        }
    }

    /// The top-level disjuncts of a formula (itself if it is no disjunction).
    pub fn disjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::Or(fs) => fs.iter().flat_map(Formula::disjuncts).collect(),
            f => vec![f],
        }
    }

    /// Nodes in the syntax tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

/// Quantifier rank.
pub fn qrank(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) | Formula::Eq(..) | Formula::NotAtom(_) | Formula::NotEq(..) => 0,
        Formula::And(fs) | Formula::Or(fs) => fs.iter().map(qrank).max().unwrap_or(0),
        Formula::Exists(_, b) => 1 + qrank(b),
    }
}

/// The most specific fragment containing `f` among sentences whose symbols
/// have arity at most `max_arity`.
pub fn classify_fragment(f: &Formula, max_arity: usize) -> Fragment {
    let Ok(voc) = f.symbols() else {
        return Fragment::Other;
    };
    if !f.is_sentence() || voc.max_arity() > max_arity {
        return Fragment::Other;
    }
    if f.is_pp() {
        Fragment::Pp
    } else if f.disjuncts().iter().all(|d| d.is_pp()) {
        Fragment::Dpp
    } else {
        Fragment::Existential
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(f: &mut fmt::Formatter<'_>, a: &Atom) -> fmt::Result {
            write!(f, "(atom {}", a.rel)?;
            for x in &a.args {
                write!(f, " {x}")?;
            }
            write!(f, ")")
        }
        match self {
            Formula::Atom(a) => atom(f, a),
            Formula::Eq(x, y) => write!(f, "(= {x} {y})"),
            Formula::NotAtom(a) => {
                write!(f, "(not ")?;
                atom(f, a)?;
                write!(f, ")")
            }
            Formula::NotEq(x, y) => write!(f, "(not (= {x} {y}))"),
            Formula::And(fs) | Formula::Or(fs) => {
                write!(f, "({}", if matches!(self, Formula::And(_)) { "and" } else { "or" })?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Formula::Exists(x, b) => write!(f, "(exists {x} {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Sym(String),
    List(Vec<Sexp>),
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sexp> {
    let t = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of formula".into()))?;
    *pos += 1;
    match t.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    None => return Err(Error::Parse("unbalanced `(`".into())),
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                }
            }
        }
        ")" => Err(Error::Parse("unexpected `)`".into())),
        s => Ok(Sexp::Sym(s.to_string())),
    }
}

fn sym(e: &Sexp) -> Result<String> {
    match e {
        Sexp::Sym(s) => Ok(s.clone()),
        Sexp::List(_) => Err(Error::Parse("expected a name, found a list".into())),
    }
}

fn build(e: &Sexp) -> Result<Formula> {
    let Sexp::List(items) = e else {
        return Err(Error::Parse(format!("expected a formula, found `{}`", sym(e)?)));
    };
    let Some((head, rest)) = items.split_first() else {
        return Err(Error::Parse("empty list".into()));
    };
    match sym(head)?.as_str() {
        "atom" => {
            let (rel, args) = rest.split_first().ok_or_else(|| Error::Parse("atom without symbol".into()))?;
            Ok(Formula::Atom(Atom {
                rel: sym(rel)?,
                args: args.iter().map(sym).collect::<Result<_>>()?,
            }))
        }
        "=" => match rest {
            [x, y] => Ok(Formula::Eq(sym(x)?, sym(y)?)),
            _ => Err(Error::Parse("`=` takes two variables".into())),
        },
        "not" => match rest {
            [inner] => match build(inner)? {
                Formula::Atom(a) => Ok(Formula::NotAtom(a)),
                Formula::Eq(x, y) => Ok(Formula::NotEq(x, y)),
                _ => Err(Error::Parse("negation may only be applied to atoms".into())),
            },
            _ => Err(Error::Parse("`not` takes one argument".into())),
        },
        "and" => Ok(Formula::And(rest.iter().map(build).collect::<Result<_>>()?)),
        "or" => Ok(Formula::Or(rest.iter().map(build).collect::<Result<_>>()?)),
        "exists" => match rest {
            [vars, body] => {
                let vars = match vars {
                    Sexp::Sym(v) => vec![v.clone()],
                    Sexp::List(vs) => vs.iter().map(sym).collect::<Result<_>>()?,
                };
                Ok(vars.into_iter().rev().fold(build(body)?, |b, v| Formula::exists(v, b)))
            }
            _ => Err(Error::Parse("`exists` takes variables and a body".into())),
        },
        "forall" => Err(Error::Parse("universal quantification is not supported".into())),
        other => Err(Error::Parse(format!("unknown connective `{other}`"))),
    }
}

impl FromStr for Formula {
    type Err = Error;

    /// Parses the s-expression syntax, e.g.
    /// `(exists x (and (atom E x y) (not (atom C x))))`.
    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let e = read(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse("trailing input after formula".into()));
        }
        build(&e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn round_trip() {
        let src = "(exists x (and (atom E x y) (not (atom C x)) (not (= x y)) (or)))";
        assert_eq!(f(src).to_string(), src);
        assert_eq!(f("(exists (x y) (atom E x y))"), f("(exists x (exists y (atom E x y)))"));
        assert!("(not (and))".parse::<Formula>().is_err());
        assert!("(forall x (atom C x))".parse::<Formula>().is_err());
        assert!("(atom E x".parse::<Formula>().is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(qrank(&f("(atom E x y)")), 0);
        assert_eq!(qrank(&f("(exists x (atom E x x))")), 1);
        assert_eq!(qrank(&f("(exists x (and (atom C x) (exists y (atom E x y))))")), 2);
    }

    #[test]
    fn fragments() {
        assert_eq!(classify_fragment(&f("(exists x (atom C x))"), 2), Fragment::Pp);
        assert_eq!(
            classify_fragment(&f("(or (exists x (atom C x)) (exists x (atom D x)))"), 2),
            Fragment::Dpp
        );
        assert_eq!(classify_fragment(&f("(exists x (not (atom C x)))"), 2), Fragment::Existential);
        assert_eq!(classify_fragment(&f("(atom C x)"), 2), Fragment::Other);
        assert_eq!(classify_fragment(&f("(exists x (atom R x x x))"), 2), Fragment::Other);
    }

    #[test]
    fn free_variables() {
        let g = f("(and (atom E x y) (exists y (atom C y)))");
        assert_eq!(g.free_vars().into_iter().collect::<Vec<_>>(), vec!["x", "y"]);
        assert!(f("(exists x (exists y (= x y)))").is_sentence());
        assert!(f("(and (atom E x y) (atom E x))").symbols().is_err());
    }
}
