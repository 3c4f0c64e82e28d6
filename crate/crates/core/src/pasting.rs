//! Pasting contexts as Dyck words, their peaks and boundaries, discs,
//! identities and unbiased composites.

use std::collections::BTreeSet;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::subst::{restrict, Restriction};
use crate::syntax::{Context, Entry, Name, Sub, Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PastingError {
    #[error("the empty context is not a pasting context")]
    Empty,
    #[error("not a pasting context: entry {position} does not extend the current derivation")]
    NotPasting { position: usize },
}

/// A derivation of `Γ ⊢ps`, read left to right. `Up` adds a fresh target
/// and a fresh cell out of the current term; `Down` moves to the target of
/// the current cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DyckWord {
    Star(Name),
    Up(Box<DyckWord>, Name, Name),
    Down(Box<DyckWord>),
}

/// Path to a peak `⇓(⇑ d y f)` inside a Dyck word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Peak {
    Top,
    InUp(Box<Peak>),
    InDown(Box<Peak>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Source,
    Target,
}

impl DyckWord {
    pub fn star(name: impl Into<Name>) -> Self {
        DyckWord::Star(name.into())
    }

    pub fn up(self, y: impl Into<Name>, f: impl Into<Name>) -> Self {
        DyckWord::Up(Box::new(self), y.into(), f.into())
    }

    /// `None` when already at height zero.
    pub fn down(self) -> Option<Self> {
        (self.height() > 0).then(|| DyckWord::Down(Box::new(self)))
    }

    pub fn height(&self) -> usize {
        match self {
            DyckWord::Star(_) => 0,
            DyckWord::Up(d, _, _) => d.height() + 1,
            DyckWord::Down(d) => d.height() - 1,
        }
    }

    /// Number of variables of `⌈d⌉`.
    pub fn len(&self) -> usize {
        match self {
            DyckWord::Star(_) => 1,
            DyckWord::Up(d, _, _) => d.len() + 2,
            DyckWord::Down(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn build(&self, entries: &mut Vec<Entry>) -> (Term, Type) {
        match self {
            DyckWord::Star(x) => {
                entries.push(Entry { name: x.clone(), ty: Type::Star });
                (Term::var(0, x.clone()), Type::Star)
            }
            DyckWord::Up(d, y, f) => {
                let (t, a) = d.build(entries);
                let n = entries.len();
                entries.push(Entry { name: y.clone(), ty: a.clone() });
                let fty = Type::arrow(a, t, Term::var(n, y.clone()));
                entries.push(Entry { name: f.clone(), ty: fty.clone() });
                (Term::var(n + 1, f.clone()), fty)
            }
            DyckWord::Down(d) => {
                let (_, a) = d.build(entries);
                let a = a.as_arrow().expect("Down below height zero");
                (a.tgt.clone(), a.base.clone())
            }
        }
    }

    /// `⌈d⌉`.
    pub fn to_context(&self) -> Context {
        let mut entries = Vec::new();
        self.build(&mut entries);
        Context::new(entries)
    }

    /// The current term and type of the derivation, over `⌈d⌉`.
    pub fn current(&self) -> (Term, Type) {
        self.build(&mut Vec::new())
    }

    /// Peaks in left-to-right order of their variables.
    pub fn peaks(&self) -> Vec<Peak> {
        match self {
            DyckWord::Star(_) => Vec::new(),
            DyckWord::Up(d, _, _) => d.peaks().into_iter().map(|p| Peak::InUp(Box::new(p))).collect(),
            DyckWord::Down(d) => {
                let mut out: Vec<Peak> = d.peaks().into_iter().map(|p| Peak::InDown(Box::new(p))).collect();
                if matches!(**d, DyckWord::Up(..)) {
                    out.push(Peak::Top);
                }
                out
            }
        }
    }

    /// Index in `⌈d⌉` of the locally maximal variable at a peak.
    pub fn peak_var(&self, p: &Peak) -> usize {
        match (self, p) {
            (DyckWord::Down(d), Peak::Top) => match &**d {
                DyckWord::Up(inner, _, _) => inner.len() + 1,
                _ => panic!("not a peak"),
            },
            (DyckWord::Up(d, _, _), Peak::InUp(p)) => d.peak_var(p),
            (DyckWord::Down(d), Peak::InDown(p)) => d.peak_var(p),
            _ => panic!("peak path does not match the Dyck word"),
        }
    }

    /// `d⫽p`: the word with the peak removed.
    pub fn excise(&self, p: &Peak) -> DyckWord {
        match (self, p) {
            (DyckWord::Down(d), Peak::Top) => match &**d {
                DyckWord::Up(inner, _, _) => (**inner).clone(),
                _ => panic!("not a peak"),
            },
            (DyckWord::Up(d, y, f), Peak::InUp(p)) => DyckWord::Up(Box::new(d.excise(p)), y.clone(), f.clone()),
            (DyckWord::Down(d), Peak::InDown(p)) => DyckWord::Down(Box::new(d.excise(p))),
            _ => panic!("peak path does not match the Dyck word"),
        }
    }

    /// `π_p`, a substitution from `⌈d⌉` into `⌈d⫽p⌉`. The peak variable goes to
    /// an identity on its source and its target to its source.
    pub fn project(&self, p: &Peak) -> Sub {
        let target = self.excise(p).to_context();
        self.project_into(p, &target)
    }

    fn project_into(&self, p: &Peak, target: &Context) -> Sub {
        match (self, p) {
            (DyckWord::Down(d), Peak::Top) => match &**d {
                DyckWord::Up(inner, _, _) => {
                    let n = inner.len();
                    let mut terms: Vec<Term> = (0..n).map(|i| target.var(i)).collect();
                    let (t, a) = inner.current();
                    let (t, a) = (t.reindex_names(target), a.reindex_names(target));
                    terms.push(t.clone());
                    terms.push(canonical_identity(&a, &t));
                    Sub(terms)
                }
                _ => panic!("not a peak"),
            },
            (DyckWord::Up(d, _, _), Peak::InUp(p)) => {
                let mut sub = d.project_into(p, target);
                let n = d.excise(p).len();
                sub.0.push(target.var(n));
                sub.0.push(target.var(n + 1));
                sub
            }
            (DyckWord::Down(d), Peak::InDown(p)) => d.project_into(p, target),
            _ => panic!("peak path does not match the Dyck word"),
        }
    }

    /// `σ⫽p`: drops the images of the peak variable and its target.
    pub fn remove(&self, p: &Peak, sigma: &Sub) -> Sub {
        let f = self.peak_var(p);
        Sub(sigma.iter().enumerate().filter(|(i, _)| *i != f && *i + 1 != f).map(|(_, t)| t.clone()).collect())
    }
}

impl Term {
    /// Replaces variable names with those of `ctx`, leaving indices alone.
    pub(crate) fn reindex_names(&self, ctx: &Context) -> Term {
        match self {
            Term::Var(v) => ctx.var(v.index),
            Term::Coh(c) => {
                Term::coh(c.ctx().clone(), c.ty().clone(), c.args().iter().map(|a| a.reindex_names(ctx)).collect())
            }
        }
    }
}

impl Type {
    pub(crate) fn reindex_names(&self, ctx: &Context) -> Type {
        match self {
            Type::Star => Type::Star,
            Type::Arrow(a) => {
                Type::arrow(a.base.reindex_names(ctx), a.src.reindex_names(ctx), a.tgt.reindex_names(ctx))
            }
        }
    }
}

/// Reads a context as a pasting derivation, deterministically left to right.
pub fn check_pasting(ctx: &Context) -> Result<DyckWord, PastingError> {
    let Some(first) = ctx.get(0) else {
        return Err(PastingError::Empty);
    };
    if first.ty != Type::Star {
        return Err(PastingError::NotPasting { position: 0 });
    }
    let mut word = DyckWord::Star(first.name.clone());
    let mut tm = Term::var(0, first.name.clone());
    let mut ty = Type::Star;
    let mut i = 1;
    while i < ctx.len() {
        let target = ctx.ty(i);
        while ty != *target {
            let Type::Arrow(a) = ty else {
                return Err(PastingError::NotPasting { position: i });
            };
            tm = a.tgt.clone();
            ty = a.base.clone();
            word = DyckWord::Down(Box::new(word));
        }
        let expected = Type::arrow(ty.clone(), tm.clone(), Term::var(i, ctx.name(i).clone()));
        if i + 1 >= ctx.len() || *ctx.ty(i + 1) != expected {
            return Err(PastingError::NotPasting { position: i + 1 });
        }
        word = DyckWord::Up(Box::new(word), ctx.name(i).clone(), ctx.name(i + 1).clone());
        tm = Term::var(i + 1, ctx.name(i + 1).clone());
        ty = expected;
        i += 2;
    }
    while let Type::Arrow(a) = ty {
        ty = a.base.clone();
        word = DyckWord::Down(Box::new(word));
    }
    Ok(word)
}

pub fn is_pasting(ctx: &Context) -> bool {
    check_pasting(ctx).is_ok()
}

/// Locally maximal variables of a pasting context, left to right.
pub fn locally_maximal(word: &DyckWord) -> Vec<(usize, Peak)> {
    word.peaks().into_iter().map(|p| (word.peak_var(&p), p)).collect()
}

/// `∂^-(Γ)` or `∂^+(Γ)`: every variable below dimension `dim Γ - 1`, plus the
/// target-free (resp. source-free) ones of dimension exactly `dim Γ - 1`.
pub fn boundary(ctx: &Context, sign: Sign) -> BTreeSet<usize> {
    let n = ctx.dim();
    (0..ctx.len())
        .filter(|&i| {
            let d = ctx.var_dim(i);
            d < n - 1
                || (d == n - 1
                    && match sign {
                        Sign::Source => ctx.is_target_free(i),
                        Sign::Target => ctx.is_source_free(i),
                    })
        })
        .collect()
}

pub fn boundary_restriction(ctx: &Context, sign: Sign) -> Restriction {
    restrict(ctx, &boundary(ctx, sign))
}

fn disc_name(i: usize) -> String {
    if i.is_multiple_of(2) {
        format!("d{}", i / 2)
    } else {
        format!("d{}'", i / 2)
    }
}

struct DiscCache {
    heads: Vec<(Context, Type)>,
}

fn disc_cache() -> &'static Mutex<DiscCache> {
    static CACHE: OnceLock<Mutex<DiscCache>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(DiscCache { heads: Vec::new() }))
}

/// `S^k` over `D^{k+1}`; `S^{-1} = ⋆`.
pub fn sphere_type(k: i64) -> Type {
    if k < 0 {
        return Type::Star;
    }
    let k = k as usize;
    Type::arrow(
        sphere_type(k as i64 - 1),
        Term::var(2 * k, disc_name(2 * k)),
        Term::var(2 * k + 1, disc_name(2 * k + 1)),
    )
}

fn build_disc(k: usize) -> Context {
    let mut entries = vec![Entry::new(disc_name(0), Type::Star)];
    for j in 0..k {
        let s = sphere_type(j as i64 - 1);
        entries.push(Entry::new(disc_name(2 * j + 1), s));
        entries.push(Entry::new(disc_name(2 * j + 2), sphere_type(j as i64)));
    }
    Context::new(entries)
}

fn disc_head(k: usize) -> (Context, Type) {
    let mut cache = disc_cache().lock().unwrap();
    while cache.heads.len() <= k {
        let n = cache.heads.len();
        let ctx = build_disc(n);
        let d = ctx.var(2 * n);
        let ty = Type::arrow(ctx.ty(2 * n).clone(), d.clone(), d);
        cache.heads.push((ctx, ty));
    }
    cache.heads[k].clone()
}

/// `D^k`: `(d0 : ⋆)(d0' : ⋆)(d1 : d0 → d0') … (dk : S^{k-1})`.
pub fn disc_context(k: usize) -> Context {
    disc_head(k).0
}

/// `{A, t}`: the substitution out of `D^{dim A + 1}` sending the top variable
/// to `t` and the sphere to `A`.
pub fn disc_sub(ty: &Type, t: &Term) -> Sub {
    let mut out = Vec::new();
    push_sphere(ty, &mut out);
    out.push(t.clone());
    Sub(out)
}

fn push_sphere(ty: &Type, out: &mut Vec<Term>) {
    if let Type::Arrow(a) = ty {
        push_sphere(&a.base, out);
        out.push(a.src.clone());
        out.push(a.tgt.clone());
    }
}

/// Arguments `{A, u}` followed by `v`: the image of `S^n` for an arrow type.
pub fn sphere_sub(ty: &Type) -> Sub {
    let mut out = Vec::new();
    push_sphere(ty, &mut out);
    Sub(out)
}

/// `i_k⟦args⟧ = coh(D^k : d_k → d_k)[args]`.
pub fn identity_term(k: usize, args: Sub) -> Term {
    let (ctx, ty) = disc_head(k);
    Term::coh(ctx, ty, args)
}

/// The identity head `(D^k, d_k → d_k)`.
pub fn identity_head(k: usize) -> (Context, Type) {
    disc_head(k)
}

/// `ι(t)` for `t : A`: `i_{dim A + 1}⟦{A, t}⟧`.
pub fn canonical_identity(ty: &Type, t: &Term) -> Term {
    identity_term((ty.dim() + 1) as usize, disc_sub(ty, t))
}

/// `Some(k)` when `ctx` is structurally `D^k`.
pub fn disc_dim(ctx: &Context) -> Option<usize> {
    let len = ctx.len();
    if len.is_multiple_of(2) || *ctx.ty(0) != Type::Star {
        return None;
    }
    let k = len / 2;
    for j in 0..k {
        let base = ctx.ty(2 * j);
        if ctx.ty(2 * j + 1) != base {
            return None;
        }
        let expected = Type::arrow(base.clone(), Term::var(2 * j, ""), Term::var(2 * j + 1, ""));
        if *ctx.ty(2 * j + 2) != expected {
            return None;
        }
    }
    Some(k)
}

/// `Some(k)` when the coherence head is `i_k`, i.e. `coh(D^k : d_k → d_k)`.
pub fn identity_dim(ctx: &Context, ty: &Type) -> Option<usize> {
    let k = disc_dim(ctx)?;
    let top = Term::var(2 * k, "");
    let expected = Type::arrow(ctx.ty(2 * k).clone(), top.clone(), top);
    (*ty == expected).then_some(k)
}

pub fn is_identity(t: &Term) -> bool {
    t.as_coh().is_some_and(|c| identity_dim(c.ctx(), c.ty()).is_some())
}

/// A disc head `coh(D^{n+1} : S^n)`, whose instances reduce to their last argument.
pub fn is_disc_head(ctx: &Context, ty: &Type) -> bool {
    matches!(disc_dim(ctx), Some(k) if k >= 1 && *ty == *ctx.ty(2 * k))
}

/// Standard names for generated pasting contexts.
pub fn cell_name(index: usize, dim: i64) -> String {
    let letter = match dim {
        0 => "x",
        1 => "f",
        2 => "a",
        3 => "m",
        _ => "c",
    };
    format!("{letter}{index}")
}

/// Builds a pasting context from a sequence of moves: `true` goes up.
pub fn dyck_from_moves(moves: &[bool]) -> Option<DyckWord> {
    let mut word = DyckWord::star(cell_name(0, 0));
    let mut len = 1;
    let mut height = 0i64;
    for &up in moves {
        if up {
            word = word.up(cell_name(len, height), cell_name(len + 1, height + 1));
            len += 2;
            height += 1;
        } else {
            word = word.down()?;
            height -= 1;
        }
    }
    (height == 0).then_some(word)
}

/// The unbiased composite over a pasting context: its top variable when the
/// context is a disc, otherwise the coherence with the unbiased type.
pub fn unbiased_term(ctx: &Context) -> Term {
    match disc_dim(ctx) {
        Some(k) => ctx.var(2 * k),
        None => unbiased_coherence(ctx),
    }
}

/// The coherence `coh(Δ : U_Δ)[id_Δ]`, built even when `Δ` is a disc.
pub fn unbiased_coherence(ctx: &Context) -> Term {
    Term::coh(ctx.clone(), unbiased_type(ctx), Sub::identity(ctx))
}

/// `U_Δ`: from the unbiased composite of `∂^-Δ` to that of `∂^+Δ`.
pub fn unbiased_type(ctx: &Context) -> Type {
    if ctx.dim() <= 0 {
        return Type::Star;
    }
    let lower = boundary_restriction(ctx, Sign::Source);
    let upper = boundary_restriction(ctx, Sign::Target);
    let s = unbiased_term(&lower.ctx).subst(&lower.inclusion);
    let t = unbiased_term(&upper.ctx).subst(&upper.inclusion);
    let base = unbiased_type(&lower.ctx).subst(&lower.inclusion);
    Type::arrow(base, s, t)
}

/// `x0 → x2 → … ` with `n` composable 1-cells.
pub fn chain_context(n: usize) -> Context {
    let moves: Vec<bool> = std::iter::repeat_n([true, false], n).flatten().collect();
    dyck_from_moves(&moves).expect("chains are Dyck words").to_context()
}

/// `comp_n`, the unbiased composite of `n` 1-cells, applied to the identity.
pub fn comp_n(n: usize) -> Term {
    unbiased_coherence(&chain_context(n))
}

/// Pasting context of `comp_{n,k}`: a (k+1)-disc, an n-disc and a (k+1)-disc
/// glued along k-cells.
pub fn comp_nk_context(n: usize, k: usize) -> Context {
    assert!(k < n, "comp_{{n,k}} needs k < n");
    let mut moves = Vec::new();
    moves.extend(std::iter::repeat_n(true, k + 1));
    moves.push(false);
    moves.extend(std::iter::repeat_n(true, n - k));
    moves.extend(std::iter::repeat_n(false, n - k));
    moves.push(true);
    moves.extend(std::iter::repeat_n(false, k + 1));
    dyck_from_moves(&moves).expect("comp_{n,k} shapes are Dyck words").to_context()
}

/// `comp_{n,k}` applied to the identity of its context.
pub fn comp_nk(n: usize, k: usize) -> Term {
    unbiased_coherence(&comp_nk_context(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(spec: &[(&str, Option<(usize, usize)>)]) -> Context {
        // Builds contexts of 0- and 1-cells and 2-cells between 1-cells by naming
        // source and target indices; the base type is taken from the source.
        let mut entries: Vec<Entry> = Vec::new();
        for (name, st) in spec {
            let ty = match st {
                None => Type::Star,
                Some((s, t)) => Type::arrow(
                    entries[*s].ty.clone(),
                    Term::var(*s, entries[*s].name.clone()),
                    Term::var(*t, entries[*t].name.clone()),
                ),
            };
            entries.push(Entry::new(*name, ty));
        }
        Context::new(entries)
    }

    fn chain2() -> Context {
        ctx(&[("x", None), ("y", None), ("f", Some((0, 1))), ("z", None), ("g", Some((1, 3)))])
    }

    fn glob() -> Context {
        ctx(&[("x", None), ("y", None), ("f", Some((0, 1))), ("g", Some((0, 1))), ("a", Some((2, 3)))])
    }

    #[test]
    fn pasting_examples() {
        assert!(is_pasting(&chain2()));
        assert!(is_pasting(&glob()));
        assert!(is_pasting(&disc_context(0)));
        assert!(is_pasting(&disc_context(3)));
        let loop_ = ctx(&[("x", None), ("f", Some((0, 0)))]);
        assert_eq!(check_pasting(&loop_), Err(PastingError::NotPasting { position: 1 }));
        let two_points = ctx(&[("x", None), ("y", None)]);
        assert_eq!(check_pasting(&two_points), Err(PastingError::NotPasting { position: 2 }));
        assert_eq!(check_pasting(&Context::empty()), Err(PastingError::Empty));
        let backwards = ctx(&[("x", None), ("y", None), ("f", Some((1, 0)))]);
        assert_eq!(check_pasting(&backwards), Err(PastingError::NotPasting { position: 2 }));
    }

    #[test]
    fn dyck_round_trip() {
        for c in [chain2(), glob(), disc_context(2), comp_nk_context(2, 0), chain_context(4)] {
            let w = check_pasting(&c).unwrap();
            assert_eq!(w.to_context(), c);
            assert_eq!(w.height(), 0);
        }
    }

    #[test]
    fn locally_maximal_variables() {
        let w = check_pasting(&chain2()).unwrap();
        let lm: Vec<usize> = locally_maximal(&w).into_iter().map(|(i, _)| i).collect();
        assert_eq!(lm, vec![2, 4]);
        let w = check_pasting(&glob()).unwrap();
        let lm: Vec<usize> = locally_maximal(&w).into_iter().map(|(i, _)| i).collect();
        assert_eq!(lm, vec![4]);
        assert!(locally_maximal(&check_pasting(&disc_context(0)).unwrap()).is_empty());
    }

    #[test]
    fn boundaries() {
        assert_eq!(boundary(&chain2(), Sign::Source), BTreeSet::from([0]));
        assert_eq!(boundary(&chain2(), Sign::Target), BTreeSet::from([3]));
        assert_eq!(boundary(&glob(), Sign::Source), BTreeSet::from([0, 1, 2]));
        assert_eq!(boundary(&glob(), Sign::Target), BTreeSet::from([0, 1, 3]));
        assert!(boundary(&disc_context(0), Sign::Source).is_empty());
        assert!(boundary(&disc_context(0), Sign::Target).is_empty());
    }

    #[test]
    fn excising_the_second_cell_of_a_chain() {
        let g = chain2();
        let w = check_pasting(&g).unwrap();
        let (_, peak) = locally_maximal(&w).pop().unwrap();
        let excised = w.excise(&peak).to_context();
        assert_eq!(excised, disc_context(1));
        let pi = w.project(&peak);
        let y = excised.var(1);
        assert_eq!(pi, Sub(vec![excised.var(0), y.clone(), excised.var(2), y.clone(), identity_term(0, Sub(vec![y]))]));
        let sigma = Sub((0..5).map(|i| Term::var(10 + i, "s")).collect());
        assert_eq!(w.remove(&peak, &sigma), Sub(vec![Term::var(10, ""), Term::var(11, ""), Term::var(12, "")]));
    }

    #[test]
    fn excising_the_first_cell_rewrites_later_types() {
        let g = chain2();
        let w = check_pasting(&g).unwrap();
        let (_, peak) = locally_maximal(&w).remove(0);
        let excised = w.excise(&peak).to_context();
        assert_eq!(excised.len(), 3);
        assert_eq!(*excised.ty(2), Type::arrow(Type::Star, excised.var(0), excised.var(1)));
        let pi = w.project(&peak);
        assert_eq!(pi[1], excised.var(0));
        assert_eq!(pi[2], identity_term(0, Sub(vec![excised.var(0)])));
        assert_eq!(pi[4], excised.var(2));
    }

    #[test]
    fn discs_and_identities() {
        let d2 = disc_context(2);
        assert_eq!(d2.len(), 5);
        assert_eq!(disc_dim(&d2), Some(2));
        assert_eq!(disc_dim(&glob()), Some(2));
        assert_eq!(disc_dim(&chain2()), None);
        assert_eq!(*d2.ty(4), sphere_type(1));
        let x = Term::var(0, "x");
        let i0 = canonical_identity(&Type::Star, &x);
        assert!(is_identity(&i0));
        assert_eq!(identity_dim(i0.as_coh().unwrap().ctx(), i0.as_coh().unwrap().ty()), Some(0));
        let g = glob();
        let f = g.var(2);
        assert_eq!(disc_sub(g.ty(2), &f), Sub(vec![g.var(0), g.var(1), f]));
        assert!(is_disc_head(&disc_context(1), &sphere_type(0)));
        assert!(!is_disc_head(&disc_context(0), &Type::Star));
    }

    #[test]
    fn unbiased_composites() {
        let c2 = comp_n(2);
        let c = c2.as_coh().unwrap();
        assert_eq!(*c.ctx(), chain2());
        assert_eq!(*c.ty(), Type::arrow(Type::Star, Term::var(0, ""), Term::var(3, "")));
        let c1 = comp_n(1);
        assert_eq!(*c1.as_coh().unwrap().ty(), sphere_type(0));
        assert!(is_disc_head(c1.as_coh().unwrap().ctx(), c1.as_coh().unwrap().ty()));
        let c10 = comp_nk_context(1, 0);
        assert_eq!(c10, chain_context(3));
        let c20 = comp_nk_context(2, 0);
        assert_eq!(c20.len(), 9);
        // (x)(y)(f)(z)(g)(h)(α : g → h)(w)(k)
        assert_eq!(*c20.ty(6), Type::arrow(c20.ty(4).clone(), Term::var(4, ""), Term::var(5, "")));
        assert_eq!(*c20.ty(8), Type::arrow(Type::Star, Term::var(3, ""), Term::var(7, "")));
        let ty = comp_nk(2, 0).as_coh().unwrap().ty().clone();
        let a = ty.as_arrow().unwrap();
        assert_eq!(a.src.as_coh().unwrap().args().len(), 7);
    }
}
