//! Surface language: parsing, name resolution, implicit arguments and
//! printing.

pub mod parser;
pub mod pretty;

use indexmap::IndexMap;
use thiserror::Error;

use crate::pasting::{check_pasting, comp_n, identity_head, locally_maximal};
use crate::reduction::DEFAULT_FUEL;
use crate::syntax::{Context, Sub, Term, Type};
use crate::typing::{Checker, Mode, TypeError, DEFAULT_MAX_DIM};
pub use parser::{
    parse_context, parse_file, parse_term, parse_type, Binder, Decl, DeclKind, ParseError, STerm, SType, Span,
};
pub use pretty::Printer;

/// Source of the bundled prelude.
pub const PRELUDE: &str = include_str!("../prelude.catt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElabErrorKind {
    #[error("unknown name '{0}'")]
    UnknownName(String),
    #[error("'{0}' is already defined")]
    Redefinition(String),
    #[error("'{name}' expects {expected} arguments, found {found}")]
    Arity { name: String, expected: String, found: usize },
    #[error("variable '{0}' cannot be applied to arguments")]
    NotAFunction(String),
    #[error("{0}")]
    Type(#[from] TypeError),
    #[error("declared type does not match the type of the body")]
    DeclaredTypeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ElabError {
    pub line: usize,
    pub col: usize,
    pub kind: ElabErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Elab(#[from] ElabError),
}

/// A checked top-level definition. A `coh` declaration is stored as its
/// coherence applied to the identity substitution.
#[derive(Clone, Debug)]
pub struct Definition {
    pub name: String,
    pub kind: DeclKind,
    pub ctx: Context,
    pub term: Term,
    pub ty: Type,
}

/// Global definitions together with the checker used to admit them.
#[derive(Clone, Debug)]
pub struct Environment {
    defs: IndexMap<String, Definition>,
    checker_mode: Mode,
    max_dim: usize,
    fuel: u64,
}

struct Scope {
    ctx: Context,
    names: Vec<String>,
}

impl Scope {
    fn empty() -> Self {
        Scope { ctx: Context::empty(), names: Vec::new() }
    }

    fn lookup(&self, name: &str) -> Option<usize> {
        self.names.iter().rposition(|n| n == name)
    }
}

/// Loads sources into an environment, using one checker for all of them.
pub struct Session {
    pub env: Environment,
    pub checker: Checker,
}

impl Environment {
    pub fn new(mode: Mode) -> Self {
        Environment::with_limits(mode, DEFAULT_MAX_DIM, DEFAULT_FUEL)
    }

    pub fn with_limits(mode: Mode, max_dim: usize, fuel: u64) -> Self {
        Environment { defs: IndexMap::new(), checker_mode: mode, max_dim, fuel }
    }

    pub fn mode(&self) -> Mode {
        self.checker_mode
    }

    pub fn checker(&self) -> Checker {
        Checker::with_limits(self.checker_mode, self.max_dim, self.fuel)
    }

    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.get(name)
    }

    pub fn definitions(&self) -> impl Iterator<Item = &Definition> {
        self.defs.values()
    }

    /// A defined name, or a generated `idK` / `compN` when not shadowed.
    pub fn resolve(&self, name: &str) -> Option<Definition> {
        if let Some(d) = self.defs.get(name) {
            return Some(d.clone());
        }
        builtin(name)
    }

    /// A printer that knows the names of this environment's coherences.
    pub fn printer(&self) -> Printer {
        let mut p = Printer::new();
        for d in self.defs.values() {
            p.forget_head_name(&d.name);
        }
        for d in self.defs.values() {
            if d.kind == DeclKind::Coh {
                if let Some(c) = d.term.as_coh() {
                    p.name_head(c.ctx(), c.ty(), d.name.clone());
                }
            }
        }
        p
    }

    pub fn session(self) -> Session {
        let checker = self.checker();
        Session { env: self, checker }
    }
}

fn builtin(name: &str) -> Option<Definition> {
    let digits = |prefix: &str| {
        name.strip_prefix(prefix)
            .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()) && (d.len() == 1 || !d.starts_with('0')))
            .and_then(|d| d.parse::<usize>().ok())
    };
    if let Some(k) = digits("id").filter(|k| *k <= DEFAULT_MAX_DIM) {
        let (ctx, ty) = identity_head(k);
        let term = Term::coh(ctx.clone(), ty.clone(), Sub::identity(&ctx));
        return Some(Definition { name: name.to_string(), kind: DeclKind::Coh, ctx, term, ty });
    }
    if let Some(n) = digits("comp").filter(|n| (1..=9).contains(n)) {
        let term = comp_n(n);
        let c = term.as_coh().unwrap();
        let (ctx, ty) = (c.ctx().clone(), c.ty().clone());
        return Some(Definition { name: name.to_string(), kind: DeclKind::Coh, ctx, term, ty });
    }
    None
}

impl Session {
    pub fn new(mode: Mode) -> Self {
        Environment::new(mode).session()
    }

    /// A session with the bundled prelude loaded.
    pub fn with_prelude(env: Environment) -> Result<Self, LoadError> {
        let mut s = env.session();
        s.load(PRELUDE)?;
        Ok(s)
    }

    /// Parses and admits every declaration of a source, in order. Returns the
    /// names defined.
    pub fn load(&mut self, src: &str) -> Result<Vec<String>, LoadError> {
        let decls = parse_file(src)?;
        let mut names = Vec::new();
        for d in &decls {
            let def = self.declaration(d).map_err(|(span, kind)| {
                let (line, col) = span.line_col(src);
                ElabError { line, col, kind }
            })?;
            names.push(def.name.clone());
            self.env.defs.insert(def.name.clone(), def);
        }
        Ok(names)
    }

    fn declaration(&mut self, d: &Decl) -> Result<Definition, (Span, ElabErrorKind)> {
        if self.env.defs.contains_key(&d.name) {
            return Err((d.span, ElabErrorKind::Redefinition(d.name.clone())));
        }
        let scope = self.binders(&d.ctx)?;
        let ctx = scope.ctx.clone();
        match d.kind {
            DeclKind::Coh => {
                let sty = d.ty.as_ref().expect("coh declarations carry a type");
                let ty = self.ty(&scope, sty)?;
                self.checker.check_head(&ctx, &ty).map_err(|e| (d.span, e.into()))?;
                let term = Term::coh(ctx.clone(), ty.clone(), Sub::identity(&ctx));
                Ok(Definition { name: d.name.clone(), kind: DeclKind::Coh, ctx, term, ty })
            }
            DeclKind::Let => {
                let body = d.body.as_ref().expect("let declarations carry a body");
                let (term, inferred) = self.term(&scope, body)?;
                let ty = match &d.ty {
                    None => inferred,
                    Some(sty) => {
                        let ty = self.ty(&scope, sty)?;
                        let ok = self.checker.convertible(&ty, &inferred).map_err(|e| (sty.span(), e.into()))?;
                        if !ok {
                            return Err((sty.span(), ElabErrorKind::DeclaredTypeMismatch));
                        }
                        ty
                    }
                };
                Ok(Definition { name: d.name.clone(), kind: DeclKind::Let, ctx, term, ty })
            }
        }
    }

    fn binders(&mut self, binders: &[Binder]) -> Result<Scope, (Span, ElabErrorKind)> {
        let mut scope = Scope::empty();
        for b in binders {
            let ty = self.ty(&scope, &b.ty)?;
            scope.ctx = scope.ctx.extend(b.name.as_str(), ty);
            scope.names.push(b.name.clone());
        }
        self.checker
            .check_context(&scope.ctx)
            .map_err(|e| (binders.first().map(|b| b.span).unwrap_or_default(), e.into()))?;
        Ok(scope)
    }

    fn ty(&mut self, scope: &Scope, t: &SType) -> Result<Type, (Span, ElabErrorKind)> {
        match t {
            SType::Star(_) => Ok(Type::Star),
            SType::Arrow { src, base, tgt, span } => {
                let (s, sty) = self.term(scope, src)?;
                let (u, _) = self.term(scope, tgt)?;
                let base = match base {
                    Some(b) => self.ty(scope, b)?,
                    None => sty,
                };
                let ty = Type::arrow(base, s, u);
                self.checker.check_type(&scope.ctx, &ty).map_err(|e| (*span, e.into()))?;
                Ok(ty)
            }
        }
    }

    fn term(&mut self, scope: &Scope, t: &STerm) -> Result<(Term, Type), (Span, ElabErrorKind)> {
        match t {
            STerm::Ident(name, span) => {
                if let Some(i) = scope.lookup(name) {
                    return Ok((Term::var(i, name.as_str()), scope.ctx.ty(i).clone()));
                }
                self.apply(scope, name, &[], *span)
            }
            STerm::App(name, args, span) => {
                if scope.lookup(name).is_some() {
                    return Err((*span, ElabErrorKind::NotAFunction(name.clone())));
                }
                self.apply(scope, name, args, *span)
            }
            STerm::Coh { ctx, ty, args, span } => {
                let inner = self.binders(ctx)?;
                let cell = self.ty(&inner, ty)?;
                self.checker.check_head(&inner.ctx, &cell).map_err(|e| (*span, e.into()))?;
                let def = Definition {
                    name: "coh".to_string(),
                    kind: DeclKind::Coh,
                    ctx: inner.ctx.clone(),
                    term: Term::coh(inner.ctx.clone(), cell.clone(), Sub::identity(&inner.ctx)),
                    ty: cell,
                };
                self.instantiate(scope, &def, args, *span)
            }
        }
    }

    fn apply(
        &mut self,
        scope: &Scope,
        name: &str,
        args: &[STerm],
        span: Span,
    ) -> Result<(Term, Type), (Span, ElabErrorKind)> {
        let def = self.env.resolve(name).ok_or((span, ElabErrorKind::UnknownName(name.to_string())))?;
        self.instantiate(scope, &def, args, span)
    }

    /// Applies a definition to either all of its arguments or, over a pasting
    /// context, to those of its locally maximal variables.
    fn instantiate(
        &mut self,
        scope: &Scope,
        def: &Definition,
        args: &[STerm],
        span: Span,
    ) -> Result<(Term, Type), (Span, ElabErrorKind)> {
        let mut terms = Vec::with_capacity(args.len());
        for a in args {
            terms.push(self.term(scope, a)?.0);
        }
        let ctx = &scope.ctx;
        let sigma = if terms.len() == def.ctx.len() {
            let sigma = Sub(terms);
            self.checker.check_sub(ctx, &sigma, &def.ctx).map_err(|e| (span, e.into()))?;
            sigma
        } else {
            match check_pasting(&def.ctx) {
                Ok(word) if locally_maximal(&word).len() == terms.len() => {
                    self.checker.elaborate_substitution(ctx, &def.ctx, &word, &terms).map_err(|e| (span, e.into()))?
                }
                Ok(word) => {
                    return Err((
                        span,
                        ElabErrorKind::Arity {
                            name: def.name.clone(),
                            expected: format!("{} or {}", def.ctx.len(), locally_maximal(&word).len()),
                            found: terms.len(),
                        },
                    ))
                }
                Err(_) => {
                    return Err((
                        span,
                        ElabErrorKind::Arity {
                            name: def.name.clone(),
                            expected: def.ctx.len().to_string(),
                            found: terms.len(),
                        },
                    ))
                }
            }
        };
        let term = def.term.subst(&sigma);
        let ty = self.checker.check_term(ctx, &term).map_err(|e| (span, e.into()))?;
        Ok((term, ty))
    }

    /// Elaborates a standalone term over the context of a definition.
    pub fn term_in(&mut self, ctx: &Context, src: &str) -> Result<Term, LoadError> {
        let st = parse_term(src)?;
        let names = pretty::unique_names(ctx);
        let scope = Scope { ctx: ctx.clone(), names };
        self.term(&scope, &st).map(|(t, _)| t).map_err(|(span, kind)| {
            let (line, col) = span.line_col(src);
            LoadError::Elab(ElabError { line, col, kind })
        })
    }

    /// Elaborates a context written as binders, e.g. `(x : *) (f : x -> x)`.
    pub fn context_from(&mut self, src: &str) -> Result<Context, LoadError> {
        let binders = parser::parse_context(src)?;
        self.binders(&binders).map(|s| s.ctx).map_err(|(span, kind)| {
            let (line, col) = span.line_col(src);
            LoadError::Elab(ElabError { line, col, kind })
        })
    }
}
