//! Rehydration: turning a Catt_su normal form back into a Catt term that is
//! equal to it in Catt_su. Every coherence is padded so that its boundaries
//! become the rehydrated normal forms of its original boundaries.

use std::collections::HashMap;

use thiserror::Error;

use crate::pasting::{check_pasting, comp_nk_context, DyckWord};
use crate::reduction::{Normalizer, ReductionError, DEFAULT_FUEL};
use crate::subst::restrict;
use crate::syntax::{Context, Sub, Term, Type};
use crate::typing::{infer_type, source_at, target_at, Checker, Mode, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RehydrateError {
    #[error("the context is not a pasting context")]
    NotPasting,
    #[error("the term does not use every variable of its context")]
    NotFullSupport,
    #[error("the term is not valid in Catt_su: {0}")]
    Invalid(TypeError),
    #[error("{0}")]
    Reduction(#[from] ReductionError),
    #[error("rehydration recursed deeper than {0} levels")]
    DepthExceeded(usize),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Rehydrates terms over arbitrary contexts, caching results.
#[derive(Debug)]
pub struct Rehydrator {
    catt: Checker,
    normalizer: Normalizer,
    terms: HashMap<(Context, Term), Term>,
    normalizers: HashMap<(Context, Term, bool), Term>,
    shapes: HashMap<(usize, usize), (Context, Type, DyckWord)>,
    depth_limit: usize,
}

impl Default for Rehydrator {
    fn default() -> Self {
        Rehydrator::new(DEFAULT_FUEL)
    }
}

impl Rehydrator {
    pub fn new(fuel: u64) -> Self {
        Rehydrator {
            catt: Checker::with_limits(Mode::Catt, crate::typing::DEFAULT_MAX_DIM, fuel),
            normalizer: Normalizer::new(fuel),
            terms: HashMap::new(),
            normalizers: HashMap::new(),
            shapes: HashMap::new(),
            depth_limit: 0,
        }
    }

    /// `R(N(t))` for a term over a pasting context with full support, after
    /// checking that the result is a Catt term equal to `t` in Catt_su.
    pub fn rehydrated_normal_form(&mut self, ctx: &Context, t: &Term) -> Result<Term, RehydrateError> {
        check_pasting(ctx).map_err(|_| RehydrateError::NotPasting)?;
        if ctx.support(t) != ctx.all_vars() {
            return Err(RehydrateError::NotFullSupport);
        }
        Checker::new(Mode::CattSu).check_term(ctx, t).map_err(RehydrateError::Invalid)?;
        let nf = self.normalizer.term(t)?;
        let r = self.rehydrate(ctx, &nf)?;
        self.catt
            .check_term(ctx, &r)
            .map_err(|e| RehydrateError::Internal(format!("rehydrated term is not valid in Catt: {e}")))?;
        let back = self.normalizer.term(&r)?;
        if back != nf {
            return Err(RehydrateError::Internal("rehydrated term does not normalize back".into()));
        }
        Ok(r)
    }

    /// `R(t)`.
    pub fn rehydrate(&mut self, ctx: &Context, t: &Term) -> Result<Term, RehydrateError> {
        self.depth_limit = (infer_type(ctx, t).dim() + 2).max(1) as usize;
        self.term(ctx, t, 0)
    }

    fn term(&mut self, ctx: &Context, t: &Term, depth: usize) -> Result<Term, RehydrateError> {
        let Term::Coh(c) = t else {
            return Ok(t.clone());
        };
        let key = (ctx.clone(), t.clone());
        if let Some(r) = self.terms.get(&key) {
            return Ok(r.clone());
        }
        let ty = self.ty(c.ctx(), c.ty(), depth)?;
        let args = c.args().iter().map(|a| self.term(ctx, a, depth)).collect::<Result<Vec<_>, _>>()?;
        let r = self.pad(ctx, Term::coh(c.ctx().clone(), ty, Sub(args)), depth)?;
        self.terms.insert(key, r.clone());
        Ok(r)
    }

    fn ty(&mut self, ctx: &Context, ty: &Type, depth: usize) -> Result<Type, RehydrateError> {
        match ty {
            Type::Star => Ok(Type::Star),
            Type::Arrow(a) => Ok(Type::arrow(
                self.ty(ctx, &a.base, depth)?,
                self.term(ctx, &a.src, depth)?,
                self.term(ctx, &a.tgt, depth)?,
            )),
        }
    }

    /// `P(t)`: successively composes normalizer cells on both sides of every
    /// boundary, from dimension 0 upwards.
    fn pad(&mut self, ctx: &Context, t: Term, depth: usize) -> Result<Term, RehydrateError> {
        let n = (infer_type(ctx, &t).dim() + 1) as usize;
        let mut cur = t;
        for k in 0..n {
            let u = source_at(ctx, &cur, k as i64);
            let v = target_at(ctx, &cur, k as i64);
            let left = self.normalizer_cell(ctx, &u, false, depth + 1)?;
            let right = self.normalizer_cell(ctx, &v, true, depth + 1)?;
            cur = self.compose(ctx, n, k, [left, cur, right])?;
        }
        Ok(cur)
    }

    fn compose(&mut self, ctx: &Context, n: usize, k: usize, args: [Term; 3]) -> Result<Term, RehydrateError> {
        let (delta, ty, word) = self
            .shapes
            .entry((n, k))
            .or_insert_with(|| {
                let delta = comp_nk_context(n, k);
                let ty = crate::pasting::unbiased_type(&delta);
                let word = check_pasting(&delta).expect("comp_{n,k} is pasting");
                (delta, ty, word)
            })
            .clone();
        let sigma = self
            .catt
            .elaborate_substitution(ctx, &delta, &word, &args)
            .map_err(|e| RehydrateError::Internal(format!("padding comp_{{{n},{k}}} does not apply: {e}")))?;
        Ok(Term::coh(delta, ty, sigma))
    }

    /// `φ(u) : R(N(u)) → u`, or its reverse, built over the support of `u`.
    fn normalizer_cell(
        &mut self,
        ctx: &Context,
        u: &Term,
        inverse: bool,
        depth: usize,
    ) -> Result<Term, RehydrateError> {
        if depth > self.depth_limit {
            return Err(RehydrateError::DepthExceeded(self.depth_limit));
        }
        let r = restrict(ctx, &ctx.support(u));
        let sub_ctx = r.ctx.clone();
        let u2 = r.term(u);
        let key = (sub_ctx.clone(), u2.clone(), inverse);
        if let Some(cell) = self.normalizers.get(&key) {
            return Ok(cell.subst(&r.inclusion));
        }
        if check_pasting(&sub_ctx).is_err() {
            return Err(RehydrateError::Internal("the support of a boundary is not a pasting context".into()));
        }
        let nu = self.normalizer.term(&u2)?;
        let ru = self.term(&sub_ctx, &nu, depth)?;
        let ty = infer_type(&sub_ctx, &u2);
        if infer_type(&sub_ctx, &ru) != ty {
            return Err(RehydrateError::Internal("normalizer cell boundaries disagree".into()));
        }
        let cell_ty = if inverse { Type::arrow(ty, u2.clone(), ru) } else { Type::arrow(ty, ru, u2.clone()) };
        let cell = Term::coh(sub_ctx.clone(), cell_ty, Sub::identity(&sub_ctx));
        self.normalizers.insert(key, cell.clone());
        Ok(cell.subst(&r.inclusion))
    }
}

/// `R(N(t))` with a fresh rehydrator.
pub fn rehydrated_normal_form(ctx: &Context, t: &Term) -> Result<Term, RehydrateError> {
    Rehydrator::default().rehydrated_normal_form(ctx, t)
}
