//! Printing terms back to the surface syntax.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::pasting::{check_pasting, comp_n, identity_dim, locally_maximal};
use crate::syntax::{Context, Term, Type};
use crate::typing::infer_type;

/// Prints terms over a context. Known coherence heads are printed by name;
/// arrow bases are omitted when they agree with the type of the source.
#[derive(Clone, Debug, Default)]
pub struct Printer {
    heads: HashMap<(Context, Type), String>,
    sugar: bool,
    lm_only: bool,
}

impl Printer {
    /// Prints identities as `idK` and unbiased composites as `compN`.
    pub fn new() -> Self {
        let mut heads = HashMap::new();
        for n in 1..=9 {
            let c = comp_n(n);
            let c = c.as_coh().unwrap();
            heads.insert((c.ctx().clone(), c.ty().clone()), format!("comp{n}"));
        }
        Printer { heads, sugar: true, lm_only: false }
    }

    /// Prints every coherence in full.
    pub fn raw() -> Self {
        Printer::default()
    }

    /// Prints only the arguments of locally maximal variables.
    pub fn lm_only(mut self, on: bool) -> Self {
        self.lm_only = on;
        self
    }

    pub fn name_head(&mut self, ctx: &Context, ty: &Type, name: impl Into<String>) {
        self.heads.insert((ctx.clone(), ty.clone()), name.into());
    }

    pub fn forget_head_name(&mut self, name: &str) {
        self.heads.retain(|_, n| n != name);
    }

    pub fn term(&self, ctx: &Context, t: &Term) -> String {
        let names = unique_names(ctx);
        let mut out = String::new();
        self.write_term(&mut out, &names, t);
        out
    }

    pub fn ty(&self, ctx: &Context, ty: &Type) -> String {
        let names = unique_names(ctx);
        let mut out = String::new();
        self.write_type(&mut out, ctx, &names, ty);
        out
    }

    /// `(x : *) (y : *) (f : x -> y)`.
    pub fn context(&self, ctx: &Context) -> String {
        let names = unique_names(ctx);
        let mut out = String::new();
        self.write_binders(&mut out, ctx, &names);
        out
    }

    fn write_binders(&self, out: &mut String, ctx: &Context, names: &[String]) {
        for i in 0..ctx.len() {
            if i > 0 {
                out.push(' ');
            }
            out.push('(');
            out.push_str(&names[i]);
            out.push_str(" : ");
            self.write_type(out, ctx, names, ctx.ty(i));
            out.push(')');
        }
    }

    fn write_type(&self, out: &mut String, ctx: &Context, names: &[String], ty: &Type) {
        match ty {
            Type::Star => out.push('*'),
            Type::Arrow(a) => {
                self.write_term(out, names, &a.src);
                let inferred = match &a.src {
                    Term::Var(v) if v.index < ctx.len() => Some(ctx.ty(v.index).clone()),
                    Term::Var(_) => None,
                    Term::Coh(_) => Some(infer_type(ctx, &a.src)),
                };
                if inferred.as_ref() == Some(&a.base) {
                    out.push_str(" -> ");
                } else {
                    out.push_str(" ->[");
                    self.write_type(out, ctx, names, &a.base);
                    out.push_str("] ");
                }
                self.write_term(out, names, &a.tgt);
            }
        }
    }

    fn write_term(&self, out: &mut String, names: &[String], t: &Term) {
        match t {
            Term::Var(v) => match names.get(v.index) {
                Some(n) => out.push_str(n),
                None => out.push_str(&v.name),
            },
            Term::Coh(c) => {
                let named = if self.sugar {
                    identity_dim(c.ctx(), c.ty())
                        .map(|k| format!("id{k}"))
                        .or_else(|| self.heads.get(&(c.ctx().clone(), c.ty().clone())).cloned())
                } else {
                    self.heads.get(&(c.ctx().clone(), c.ty().clone())).cloned()
                };
                match named {
                    Some(name) => out.push_str(&name),
                    None => {
                        let inner = unique_names(c.ctx());
                        out.push_str("coh (");
                        self.write_binders(out, c.ctx(), &inner);
                        out.push_str(" : ");
                        self.write_type(out, c.ctx(), &inner, c.ty());
                        out.push(')');
                    }
                }
                out.push('[');
                let shown: Vec<usize> = match (self.lm_only, check_pasting(c.ctx())) {
                    (true, Ok(word)) if c.ctx().len() > 1 => {
                        locally_maximal(&word).into_iter().map(|(v, _)| v).collect()
                    }
                    _ => (0..c.args().len()).collect(),
                };
                for (k, &i) in shown.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    self.write_term(out, names, &c.args()[i]);
                }
                out.push(']');
            }
        }
    }
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !matches!(s, "coh" | "let" | "star")
}

/// Display names for a context, made distinct so that they resolve back to
/// the same variables.
pub fn unique_names(ctx: &Context) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(ctx.len());
    for i in 0..ctx.len() {
        let base = ctx.name(i);
        let mut name = if valid_ident(base) { base.to_string() } else { format!("v{i}") };
        let stem = name.clone();
        let mut k = 1;
        while !seen.insert(name.clone()) {
            name = format!("{stem}_{k}");
            k += 1;
        }
        out.push(name);
    }
    out
}

impl fmt::Display for Term {
    /// Context-free rendering using the names carried by variables.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::new().term(&Context::empty(), self))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::new().ty(&Context::empty(), self))
    }
}
