//! Substitution application and composition.

use thiserror::Error;

use crate::syntax::{Context, Sub, Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("variable index {index} out of range for a substitution of length {len}")]
    OutOfRange { index: usize, len: usize },
}

impl Term {
    /// `t⟦σ⟧`. Variables are looked up by position; coherence heads are
    /// closed, so only the arguments are composed.
    pub fn try_subst(&self, sigma: &Sub) -> Result<Term, SubstError> {
        match self {
            Term::Var(v) => {
                sigma.get(v.index).cloned().ok_or(SubstError::OutOfRange { index: v.index, len: sigma.len() })
            }
            Term::Coh(c) => Ok(Term::coh(c.ctx().clone(), c.ty().clone(), c.args().try_compose(sigma)?)),
        }
    }

    /// As [`Term::try_subst`], for substitutions already known to be in scope.
    pub fn subst(&self, sigma: &Sub) -> Term {
        self.try_subst(sigma).expect("ill-scoped substitution")
    }

    /// Renames variables through a partial index map. Used to move a term
    /// into a sub-context that contains its support.
    pub fn reindex(&self, map: &[Option<usize>], ctx: &Context) -> Term {
        match self {
            Term::Var(v) => {
                let i = map[v.index].expect("variable outside the restricted context");
                ctx.var(i)
            }
            Term::Coh(c) => {
                Term::coh(c.ctx().clone(), c.ty().clone(), c.args().iter().map(|a| a.reindex(map, ctx)).collect())
            }
        }
    }
}

impl Type {
    pub fn try_subst(&self, sigma: &Sub) -> Result<Type, SubstError> {
        match self {
            Type::Star => Ok(Type::Star),
            Type::Arrow(a) => {
                Ok(Type::arrow(a.base.try_subst(sigma)?, a.src.try_subst(sigma)?, a.tgt.try_subst(sigma)?))
            }
        }
    }

    pub fn subst(&self, sigma: &Sub) -> Type {
        self.try_subst(sigma).expect("ill-scoped substitution")
    }

    pub fn reindex(&self, map: &[Option<usize>], ctx: &Context) -> Type {
        match self {
            Type::Star => Type::Star,
            Type::Arrow(a) => Type::arrow(a.base.reindex(map, ctx), a.src.reindex(map, ctx), a.tgt.reindex(map, ctx)),
        }
    }
}

impl Sub {
    /// `self ∘ sigma`, entrywise: `⟨t₁⟦σ⟧, …, tₙ⟦σ⟧⟩`.
    pub fn try_compose(&self, sigma: &Sub) -> Result<Sub, SubstError> {
        self.iter().map(|t| t.try_subst(sigma)).collect::<Result<Vec<_>, _>>().map(Sub)
    }

    pub fn compose(&self, sigma: &Sub) -> Sub {
        self.try_compose(sigma).expect("ill-scoped substitution")
    }
}

/// A sub-context on a downward-closed set of variables, together with the
/// inclusion into the original context and the renaming out of it.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub ctx: Context,
    pub inclusion: Sub,
    pub map: Vec<Option<usize>>,
}

impl Restriction {
    pub fn term(&self, t: &Term) -> Term {
        t.reindex(&self.map, &self.ctx)
    }

    pub fn ty(&self, ty: &Type) -> Type {
        ty.reindex(&self.map, &self.ctx)
    }
}

/// Restricts `ctx` to the variables in `keep`, which must be downward closed.
pub fn restrict(ctx: &Context, keep: &std::collections::BTreeSet<usize>) -> Restriction {
    let mut map = vec![None; ctx.len()];
    let mut entries = Vec::with_capacity(keep.len());
    let mut inclusion = Vec::with_capacity(keep.len());
    let mut partial = Context::empty();
    for &i in keep {
        let ty = ctx.ty(i).reindex(&map, &partial);
        map[i] = Some(entries.len());
        entries.push(crate::syntax::Entry { name: ctx.name(i).clone(), ty });
        inclusion.push(ctx.var(i));
        partial = Context::new(entries.clone());
    }
    Restriction { ctx: partial, inclusion: Sub(inclusion), map }
}
