//! Typing judgements for Catt and Catt_su.
//!
//! The two theories share their rules and differ only in conversion: Catt
//! compares syntactically, Catt_su compares normal forms.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::pasting::{boundary, check_pasting, locally_maximal, DyckWord, PastingError, Sign};
use crate::reduction::{Locus, Normalizer, ReductionError, Segment, DEFAULT_FUEL};
use crate::syntax::{Context, Sub, Term, Type};

pub const DEFAULT_MAX_DIM: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    /// Syntactic equality only.
    Catt,
    /// Equality up to pruning, disc removal and endo-coherence removal.
    #[default]
    CattSu,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Catt => f.write_str("catt"),
            Mode::CattSu => f.write_str("su"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("{0}")]
    NotPasting(#[from] PastingError),
    #[error(
        "support condition fails: source {src:?} and target {tgt:?} cover neither the boundaries nor the whole context"
    )]
    SupportViolation { src: BTreeSet<usize>, tgt: BTreeSet<usize> },
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: Box<Type>, found: Box<Type> },
    #[error("unbound variable with index {index} in a context of length {len}")]
    UnboundVariable { index: usize, len: usize },
    #[error("expected {expected} arguments, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("a coherence cannot have type *")]
    BaseTypeCoherence,
    #[error("dimension {dim} exceeds the limit {max}")]
    DimensionLimit { dim: i64, max: usize },
    #[error("{0}")]
    Reduction(#[from] ReductionError),
    #[error("the boundary of {var} is determined inconsistently")]
    BoundaryMismatch { var: usize },
    #[error("{0} has no source or target")]
    NotAnArrow(String),
}

/// A typing error with the path to the offending subterm.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub location: Locus,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.location.0.is_empty() {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{} (at {})", self.kind, self.location)
        }
    }
}

impl From<TypeErrorKind> for TypeError {
    fn from(kind: TypeErrorKind) -> Self {
        TypeError { kind, location: Locus::default() }
    }
}

impl From<ReductionError> for TypeError {
    fn from(e: ReductionError) -> Self {
        TypeErrorKind::Reduction(e).into()
    }
}

trait At<T> {
    fn at(self, seg: Segment) -> Result<T, TypeError>;
}

impl<T> At<T> for Result<T, TypeError> {
    fn at(self, seg: Segment) -> Result<T, TypeError> {
        self.map_err(|mut e| {
            e.location.0.insert(0, seg);
            e
        })
    }
}

/// Checker state: mode, limits and caches for heads, judgements and normal forms.
#[derive(Debug)]
pub struct Checker {
    mode: Mode,
    max_dim: usize,
    normalizer: Normalizer,
    heads: HashMap<(Context, Type), Result<(), TypeError>>,
    terms: HashMap<(Context, Term), Type>,
    contexts: HashMap<Context, Result<(), TypeError>>,
}

impl Checker {
    pub fn new(mode: Mode) -> Self {
        Checker::with_limits(mode, DEFAULT_MAX_DIM, DEFAULT_FUEL)
    }

    pub fn with_limits(mode: Mode, max_dim: usize, fuel: u64) -> Self {
        Checker {
            mode,
            max_dim,
            normalizer: Normalizer::new(fuel),
            heads: HashMap::new(),
            terms: HashMap::new(),
            contexts: HashMap::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn normalizer(&mut self) -> &mut Normalizer {
        &mut self.normalizer
    }

    pub fn normalize(&mut self, t: &Term) -> Result<Term, ReductionError> {
        self.normalizer.reset_steps();
        self.normalizer.term(t)
    }

    pub fn normalize_type(&mut self, ty: &Type) -> Result<Type, ReductionError> {
        self.normalizer.reset_steps();
        self.normalizer.ty(ty)
    }

    fn check_dim(&self, dim: i64) -> Result<(), TypeError> {
        if dim > self.max_dim as i64 {
            Err(TypeErrorKind::DimensionLimit { dim, max: self.max_dim }.into())
        } else {
            Ok(())
        }
    }

    /// Conversion of types in the current mode. Inputs are assumed valid.
    pub fn convertible(&mut self, a: &Type, b: &Type) -> Result<bool, TypeError> {
        if a == b {
            return Ok(true);
        }
        match self.mode {
            Mode::Catt => Ok(false),
            Mode::CattSu => Ok(self.normalize_type(a)? == self.normalize_type(b)?),
        }
    }

    /// Conversion of terms in the current mode. Inputs are assumed valid.
    pub fn convertible_terms(&mut self, a: &Term, b: &Term) -> Result<bool, TypeError> {
        if a == b {
            return Ok(true);
        }
        match self.mode {
            Mode::Catt => Ok(false),
            Mode::CattSu => Ok(self.normalize(a)? == self.normalize(b)?),
        }
    }

    /// `Γ ⊢`: every entry's type is valid in the preceding prefix.
    pub fn check_context(&mut self, ctx: &Context) -> Result<(), TypeError> {
        if let Some(r) = self.contexts.get(ctx) {
            return r.clone();
        }
        let r = self.check_context_uncached(ctx);
        self.contexts.insert(ctx.clone(), r.clone());
        r
    }

    fn check_context_uncached(&mut self, ctx: &Context) -> Result<(), TypeError> {
        self.check_dim(ctx.dim())?;
        for i in 0..ctx.len() {
            let prefix = ctx.prefix(i);
            self.check_type(&prefix, ctx.ty(i)).at(Segment::Arg(i))?;
        }
        Ok(())
    }

    /// `Γ ⊢ A`.
    pub fn check_type(&mut self, ctx: &Context, ty: &Type) -> Result<(), TypeError> {
        let Type::Arrow(a) = ty else {
            return Ok(());
        };
        self.check_type(ctx, &a.base).at(Segment::Base)?;
        let s = self.check_term(ctx, &a.src).at(Segment::Src)?;
        if !self.convertible(&s, &a.base)? {
            return Err(TypeError {
                kind: TypeErrorKind::TypeMismatch { expected: Box::new(a.base.clone()), found: Box::new(s) },
                location: Locus(vec![Segment::Src]),
            });
        }
        let t = self.check_term(ctx, &a.tgt).at(Segment::Tgt)?;
        if !self.convertible(&t, &a.base)? {
            return Err(TypeError {
                kind: TypeErrorKind::TypeMismatch { expected: Box::new(a.base.clone()), found: Box::new(t) },
                location: Locus(vec![Segment::Tgt]),
            });
        }
        Ok(())
    }

    /// `Γ ⊢ t : A`, returning the inferred type `A`.
    pub fn check_term(&mut self, ctx: &Context, t: &Term) -> Result<Type, TypeError> {
        match t {
            Term::Var(v) => match ctx.get(v.index) {
                Some(e) => Ok(e.ty.clone()),
                None => Err(TypeErrorKind::UnboundVariable { index: v.index, len: ctx.len() }.into()),
            },
            Term::Coh(c) => {
                let key = (ctx.clone(), t.clone());
                if let Some(ty) = self.terms.get(&key) {
                    return Ok(ty.clone());
                }
                self.check_head(c.ctx(), c.ty()).at(Segment::Cell)?;
                self.check_sub(ctx, c.args(), c.ctx())?;
                let ty = c.ty().subst(c.args());
                self.check_dim(ty.dim() + 1)?;
                self.terms.insert(key, ty.clone());
                Ok(ty)
            }
        }
    }

    /// A coherence head `(Δ, U)`: `Δ` is pasting, `U` is a valid arrow type
    /// over `Δ`, and the support condition holds.
    pub fn check_head(&mut self, delta: &Context, ty: &Type) -> Result<(), TypeError> {
        let key = (delta.clone(), ty.clone());
        if let Some(r) = self.heads.get(&key) {
            return r.clone();
        }
        let r = self.check_head_uncached(delta, ty);
        self.heads.insert(key, r.clone());
        r
    }

    fn check_head_uncached(&mut self, delta: &Context, ty: &Type) -> Result<(), TypeError> {
        self.check_dim(delta.dim())?;
        check_pasting(delta).map_err(TypeErrorKind::from)?;
        self.check_context(delta)?;
        let Type::Arrow(a) = ty else {
            return Err(TypeErrorKind::BaseTypeCoherence.into());
        };
        self.check_type(delta, ty)?;
        let src = delta.support(&a.src);
        let tgt = delta.support(&a.tgt);
        let all = delta.all_vars();
        let full = src == all && tgt == all;
        let bounded = src == boundary(delta, Sign::Source) && tgt == boundary(delta, Sign::Target);
        if !(full || bounded) {
            return Err(TypeErrorKind::SupportViolation { src, tgt }.into());
        }
        Ok(())
    }

    /// `Γ ⊢ σ : Δ`.
    pub fn check_sub(&mut self, ctx: &Context, sigma: &Sub, delta: &Context) -> Result<(), TypeError> {
        if sigma.len() != delta.len() {
            return Err(TypeErrorKind::ArityMismatch { expected: delta.len(), found: sigma.len() }.into());
        }
        for (i, t) in sigma.iter().enumerate() {
            let found = self.check_term(ctx, t).at(Segment::Arg(i))?;
            let expected = delta.ty(i).subst(sigma);
            if !self.convertible(&found, &expected)? {
                return Err(TypeError {
                    kind: TypeErrorKind::TypeMismatch { expected: Box::new(expected), found: Box::new(found) },
                    location: Locus(vec![Segment::Arg(i)]),
                });
            }
        }
        Ok(())
    }

    /// Judgemental equality of two terms, after checking both.
    pub fn def_eq(&mut self, ctx: &Context, a: &Term, b: &Term) -> Result<bool, TypeError> {
        self.check_term(ctx, a)?;
        self.check_term(ctx, b)?;
        self.convertible_terms(a, b)
    }

    /// Builds a full substitution out of a pasting context from the images of
    /// its locally maximal variables. The remaining images are read off the
    /// types of the given arguments; determinations of the same variable must
    /// agree in the current mode.
    pub fn elaborate_substitution(
        &mut self,
        ctx: &Context,
        delta: &Context,
        word: &DyckWord,
        lm_args: &[Term],
    ) -> Result<Sub, TypeError> {
        let lm = locally_maximal(word);
        if lm.len() != lm_args.len() {
            return Err(TypeErrorKind::ArityMismatch { expected: lm.len(), found: lm_args.len() }.into());
        }
        let mut images: Vec<Option<Term>> = vec![None; delta.len()];
        for ((var, _), arg) in lm.iter().zip(lm_args) {
            let ty = self.check_term(ctx, arg).at(Segment::Arg(*var))?;
            self.assign(delta, &mut images, *var, arg.clone(), ty)?;
        }
        let terms = images
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or(TypeError::from(TypeErrorKind::BoundaryMismatch { var: i })))
            .collect::<Result<Vec<_>, _>>()?;
        let sigma = Sub(terms);
        self.check_sub(ctx, &sigma, delta)?;
        Ok(sigma)
    }

    fn assign(
        &mut self,
        delta: &Context,
        images: &mut [Option<Term>],
        var: usize,
        t: Term,
        ty: Type,
    ) -> Result<(), TypeError> {
        if let Some(prev) = &images[var] {
            if !self.convertible_terms(prev, &t)? {
                return Err(TypeError {
                    kind: TypeErrorKind::BoundaryMismatch { var },
                    location: Locus(vec![Segment::Arg(var)]),
                });
            }
            return Ok(());
        }
        images[var] = Some(t);
        if let Type::Arrow(decl) = delta.ty(var).clone() {
            let Type::Arrow(found) = ty else {
                return Err(TypeError {
                    kind: TypeErrorKind::NotAnArrow(format!("argument for variable {var}")),
                    location: Locus(vec![Segment::Arg(var)]),
                });
            };
            let (Some(s), Some(u)) = (decl.src.as_var(), decl.tgt.as_var()) else {
                unreachable!("pasting contexts only have variables in their types");
            };
            let base = found.base.clone();
            self.assign(delta, images, s.index, found.src.clone(), base.clone())?;
            self.assign(delta, images, u.index, found.tgt.clone(), base)?;
        }
        Ok(())
    }
}

/// `ty(t)` without validation: the declared type of a variable, or the cell
/// type under the arguments of a coherence.
pub fn infer_type(ctx: &Context, t: &Term) -> Type {
    match t {
        Term::Var(v) => ctx.ty(v.index).clone(),
        Term::Coh(c) => c.ty().subst(c.args()),
    }
}

/// Iterated source: `src_k(t)` for a term of dimension above `k`.
///
/// # Panics
/// If `t` has no `k`-dimensional boundary.
pub fn source_at(ctx: &Context, t: &Term, k: i64) -> Term {
    try_source_at(ctx, t, k).expect("term has no boundary at this dimension")
}

pub fn target_at(ctx: &Context, t: &Term, k: i64) -> Term {
    try_target_at(ctx, t, k).expect("term has no boundary at this dimension")
}

/// `src_k(t)`, or `None` when `t` has dimension at most `k`.
pub fn try_source_at(ctx: &Context, t: &Term, k: i64) -> Option<Term> {
    boundary_at(ctx, t, k).map(|a| a.src.clone())
}

pub fn try_target_at(ctx: &Context, t: &Term, k: i64) -> Option<Term> {
    boundary_at(ctx, t, k).map(|a| a.tgt.clone())
}

fn boundary_at(ctx: &Context, t: &Term, k: i64) -> Option<crate::syntax::Arrow> {
    let mut ty = infer_type(ctx, t);
    while ty.dim() > k {
        ty = ty.as_arrow()?.base.clone();
    }
    ty.as_arrow().cloned()
}
