//! Shared test support: corpus loading, random valid terms, exhaustive
//! enumeration over small discs, and independent reference implementations.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use cattsu::frontend::{Environment, Session};
use cattsu::pasting::{
    boundary, canonical_identity, check_pasting, dyck_from_moves, identity_dim, is_identity, locally_maximal, DyckWord,
    Sign,
};
use cattsu::reduction::Normalizer;
use cattsu::typing::{infer_type, Checker, Mode};
use cattsu::{Context, Entry, Sub, Term, Type};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "catt"))
        .collect();
    files.sort();
    files
}

/// A session with the prelude and every corpus file loaded.
pub fn corpus_session(mode: Mode) -> Session {
    let mut s = Session::with_prelude(Environment::new(mode)).unwrap();
    for f in corpus_files() {
        let src = std::fs::read_to_string(&f).unwrap();
        s.load(&src).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
    }
    s
}

/// Every definition of the prelude and corpus as (name, context, term).
pub fn corpus_terms() -> Vec<(String, Context, Term)> {
    let s = corpus_session(Mode::CattSu);
    s.env.definitions().map(|d| (d.name.clone(), d.ctx.clone(), d.term.clone())).collect()
}

pub fn parse_context(src: &str) -> Context {
    Session::new(Mode::CattSu).context_from(src).unwrap()
}

/// Contexts used as ambient contexts for random terms. Some are not pasting.
pub fn ambient_contexts() -> Vec<Context> {
    [
        "(x : *)",
        "(x : *) (y : *) (f : x -> y)",
        "(x : *) (y : *) (f : x -> y) (g : x -> y) (a : f -> g)",
        "(x : *) (y : *) (f : x -> y) (z : *) (g : y -> z)",
        "(x : *) (y : *) (f : x -> y) (z : *) (g : y -> z) (w : *) (h : z -> w)",
        "(x : *) (y : *) (f : x -> y) (g : x -> y) (a : f -> g) (h : x -> y) (b : g -> h)",
        "(x : *) (y : *) (f : x -> y) (g : x -> y) (a : f -> g) (z : *) (h : y -> z)",
        "(x : *) (y : *) (f : x -> y) (g : x -> y) (a : f -> g) (z : *) (h : y -> z) (k : y -> z) (b : h -> k)",
        "(x : *) (f : x -> x)",
        "(x : *) (y : *) (f : x -> y) (g : x -> y)",
        "(x : *) (a : id0[x] -> id0[x]) (b : id0[x] -> id0[x])",
        "(x : *) (y : *) (f : x -> y) (g : y -> x)",
    ]
    .iter()
    .map(|s| parse_context(s))
    .collect()
}

/// Pasting contexts with at most `ups` up-steps.
pub fn pasting_contexts(ups: usize) -> Vec<(Context, DyckWord)> {
    let mut out = Vec::new();
    fn go(moves: &mut Vec<bool>, height: usize, ups_left: usize, out: &mut Vec<Vec<bool>>) {
        if height == 0 {
            out.push(moves.clone());
        }
        if ups_left > 0 {
            moves.push(true);
            go(moves, height + 1, ups_left - 1, out);
            moves.pop();
        }
        if height > 0 {
            moves.push(false);
            go(moves, height - 1, ups_left, out);
            moves.pop();
        }
    }
    let mut all = Vec::new();
    go(&mut Vec::new(), 0, ups, &mut all);
    for m in all {
        let w = dyck_from_moves(&m).unwrap();
        out.push((w.to_context(), w));
    }
    out
}

/// A valid term with cached normal forms of it and of its boundaries.
#[derive(Clone, Debug)]
pub struct Item {
    pub term: Term,
    pub ty: Type,
    pub dim: i64,
    pub nf: Term,
    /// Normal forms of (source, target) at each dimension below the top, from the top down.
    pub bounds: Vec<(Term, Term)>,
    pub support: BTreeSet<usize>,
}

impl Item {
    pub fn new(ctx: &Context, term: Term, ty: Type, n: &mut Normalizer) -> Item {
        let nf = n.term(&term).unwrap();
        let mut bounds = Vec::new();
        let mut cur = ty.clone();
        while let Type::Arrow(a) = cur {
            bounds.push((n.term(&a.src).unwrap(), n.term(&a.tgt).unwrap()));
            cur = a.base.clone();
        }
        let dim = ty.dim() + 1;
        let support = ctx.support(&term);
        Item { term, ty, dim, nf, bounds, support }
    }
}

/// For each dimension below a variable of a pasting context, the indices of
/// its source and target, from the top down.
fn boundary_vars(delta: &Context, var: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut ty = delta.ty(var).clone();
    while let Type::Arrow(a) = ty {
        out.push((a.src.as_var().unwrap().index, a.tgt.as_var().unwrap().index));
        ty = a.base.clone();
    }
    out
}

/// A coherence head over a pasting context, applied to its identity.
#[derive(Clone, Debug)]
pub struct Schema {
    pub term: Term,
    pub ctx: Context,
    pub word: DyckWord,
    pub lm: Vec<usize>,
}

impl Schema {
    pub fn new(term: Term) -> Schema {
        let c = term.as_coh().unwrap();
        let ctx = c.ctx().clone();
        let word = check_pasting(&ctx).unwrap();
        let lm = locally_maximal(&word).into_iter().map(|(v, _)| v).collect();
        Schema { term, ctx, word, lm }
    }

    pub fn dim(&self) -> i64 {
        self.ctx.dim()
    }
}

/// Seeded generator of valid Catt_su terms.
pub struct Gen {
    pub rng: ChaCha8Rng,
    pub checker: Checker,
    pub norm: Normalizer,
    pub schemas: Vec<Schema>,
    pools: HashMap<Context, Vec<Item>>,
    pub max_size: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        let s = corpus_session(Mode::CattSu);
        let mut schemas: Vec<Schema> = s
            .env
            .definitions()
            .filter(|d| d.kind == cattsu::frontend::DeclKind::Coh && d.ctx.dim() <= 2)
            .map(|d| Schema::new(d.term.clone()))
            .collect();
        for (ctx, _) in pasting_contexts(3) {
            if ctx.dim() >= 1 {
                schemas.push(Schema::new(cattsu::pasting::unbiased_coherence(&ctx)));
            }
        }
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            checker: Checker::new(Mode::CattSu),
            norm: Normalizer::default(),
            schemas,
            pools: HashMap::new(),
            max_size: 80,
        }
    }

    fn item(&mut self, ctx: &Context, t: Term) -> Option<Item> {
        let ty = self.checker.check_term(ctx, &t).ok()?;
        Some(Item::new(ctx, t, ty, &mut self.norm))
    }

    /// Chooses images for the locally maximal variables of `delta` whose
    /// boundaries agree up to normal form.
    fn pick_lm(
        &mut self,
        pool: &[Item],
        delta: &Context,
        lm: &[usize],
        identity_at: Option<usize>,
    ) -> Option<Vec<Term>> {
        let mut images: Vec<Option<Term>> = vec![None; delta.len()];
        let mut chosen = Vec::new();
        for &v in lm {
            let d = delta.var_dim(v);
            let bvars = boundary_vars(delta, v);
            let cands: Vec<&Item> = pool
                .iter()
                .filter(|it| it.dim == d)
                .filter(|it| identity_at != Some(v) || is_identity(&it.term))
                .filter(|it| {
                    bvars.iter().zip(&it.bounds).all(|(&(s, t), (bs, bt))| {
                        images[s].as_ref().is_none_or(|i| i == bs) && images[t].as_ref().is_none_or(|i| i == bt)
                    })
                })
                .collect();
            let it = *cands.choose(&mut self.rng)?;
            for (&(s, t), (bs, bt)) in bvars.iter().zip(&it.bounds) {
                images[s] = Some(bs.clone());
                images[t] = Some(bt.clone());
            }
            images[v] = Some(it.nf.clone());
            chosen.push(it.term.clone());
        }
        Some(chosen)
    }

    pub fn apply_schema(&mut self, ctx: &Context, pool: &[Item], schema: &Schema) -> Option<Term> {
        let chosen = self.pick_lm(pool, &schema.ctx, &schema.lm, None)?;
        let sigma = self.checker.elaborate_substitution(ctx, &schema.ctx, &schema.word, &chosen).ok()?;
        Some(schema.term.subst(&sigma))
    }

    /// A random coherence head over a small pasting context: either an
    /// endo-style head between parallel full-support terms or a head between
    /// boundary-supported terms.
    pub fn random_head(&mut self) -> Option<Schema> {
        let shapes = pasting_contexts(2);
        let (delta, _) = shapes.choose(&mut self.rng)?.clone();
        let pool = self.pool(&delta, 14);
        let all = delta.all_vars();
        let (ls, lt) = if self.rng.gen_bool(0.5) {
            (all.clone(), all.clone())
        } else {
            (boundary(&delta, Sign::Source), boundary(&delta, Sign::Target))
        };
        let srcs: Vec<&Item> = pool.iter().filter(|i| i.support == ls && i.term.size() <= 12).collect();
        let s = (*srcs.choose(&mut self.rng)?).clone();
        let tgts: Vec<&Item> = pool
            .iter()
            .filter(|i| i.support == lt && i.dim == s.dim && i.bounds == s.bounds && i.term.size() <= 12)
            .collect();
        let t = (*tgts.choose(&mut self.rng)?).clone();
        let base = if self.rng.gen_bool(0.5) { s.ty.clone() } else { t.ty.clone() };
        let ty = Type::arrow(base, s.term, t.term);
        self.checker.check_head(&delta, &ty).ok()?;
        Some(Schema::new(Term::coh(delta.clone(), ty, Sub::identity(&delta))))
    }

    /// A pool of valid terms over `ctx`, grown by random steps.
    pub fn pool(&mut self, ctx: &Context, rounds: usize) -> Vec<Item> {
        if let Some(p) = self.pools.get(ctx) {
            return p.clone();
        }
        let mut pool: Vec<Item> = (0..ctx.len()).filter_map(|i| self.item(ctx, ctx.var(i))).collect();
        self.grow(ctx, &mut pool, rounds, false);
        self.pools.insert(ctx.clone(), pool.clone());
        pool
    }

    fn grow(&mut self, ctx: &Context, pool: &mut Vec<Item>, rounds: usize, heads: bool) {
        for _ in 0..rounds {
            let choice = self.rng.gen_range(0..10);
            let candidate = if choice < 2 {
                let it = pool.choose(&mut self.rng).unwrap().clone();
                Some(canonical_identity(&it.ty, &it.term))
            } else if choice < 4 && heads {
                match self.random_head() {
                    Some(h) => self.apply_schema(ctx, pool, &h),
                    None => None,
                }
            } else {
                let max_dim = pool.iter().map(|i| i.dim).max().unwrap_or(0) + 1;
                let schemas: Vec<Schema> = self.schemas.iter().filter(|s| s.dim() <= max_dim).cloned().collect();
                let s = schemas.choose(&mut self.rng).unwrap().clone();
                self.apply_schema(ctx, pool, &s)
            };
            if let Some(t) = candidate {
                if t.size() <= self.max_size && t.coherence_count() <= 20 && !pool.iter().any(|i| i.term == t) {
                    if let Some(it) = self.item(ctx, t) {
                        pool.push(it);
                    }
                }
            }
        }
    }

    /// Random valid coherence terms over the ambient contexts.
    pub fn population(&mut self, count: usize) -> Vec<(Context, Term)> {
        let contexts = ambient_contexts();
        let mut out: Vec<(Context, Term)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut round = 0;
        while out.len() < count {
            let ctx = contexts[round % contexts.len()].clone();
            round += 1;
            let mut pool: Vec<Item> = (0..ctx.len()).filter_map(|i| self.item(&ctx, ctx.var(i))).collect();
            self.grow(&ctx, &mut pool, 80, true);
            for it in pool {
                if matches!(it.term, Term::Coh(_)) && seen.insert((ctx.clone(), it.term.clone())) {
                    out.push((ctx.clone(), it.term));
                }
            }
        }
        out.truncate(count);
        out
    }

    /// A random valid substitution out of a pasting context into `ctx`.
    pub fn substitution(&mut self, ctx: &Context, delta: &Context) -> Option<Sub> {
        self.substitution_with(ctx, delta, None)
    }

    /// As [`Gen::substitution`], sending the given locally maximal variable to
    /// an identity.
    pub fn substitution_with(&mut self, ctx: &Context, delta: &Context, identity_at: Option<usize>) -> Option<Sub> {
        let pool = self.pool(ctx, 40);
        let word = check_pasting(delta).ok()?;
        if delta.len() == 1 {
            let zero: Vec<&Item> = pool.iter().filter(|i| i.dim == 0).collect();
            return Some(Sub(vec![zero.choose(&mut self.rng)?.term.clone()]));
        }
        let lm: Vec<usize> = locally_maximal(&word).into_iter().map(|(v, _)| v).collect();
        let chosen = self.pick_lm(&pool, delta, &lm, identity_at)?;
        self.checker.elaborate_substitution(ctx, delta, &word, &chosen).ok()
    }

    /// A random valid term over `ctx`, possibly a variable.
    pub fn term_in(&mut self, ctx: &Context) -> Term {
        let pool = self.pool(ctx, 40);
        pool.choose(&mut self.rng).unwrap().term.clone()
    }
}

/// Whether `t` is a variable or an iterated canonical identity on a variable.
pub fn is_iterated_identity_on_var(ctx: &Context, t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Coh(c) => {
            if identity_dim(c.ctx(), c.ty()).is_none() {
                return false;
            }
            let p = c.args().0.last().unwrap();
            *t == canonical_identity(&infer_type(ctx, p), p) && is_iterated_identity_on_var(ctx, p)
        }
    }
}

/// Pasting check by search over derivations, trying both extending and
/// descending at every point.
pub fn pasting_oracle(ctx: &Context) -> bool {
    fn search(ctx: &Context, i: usize, x: Term, a: Type) -> bool {
        if i == ctx.len() {
            return true;
        }
        if i + 1 < ctx.len()
            && *ctx.ty(i) == a
            && *ctx.ty(i + 1) == Type::arrow(a.clone(), x.clone(), Term::var(i, ""))
            && search(ctx, i + 2, Term::var(i + 1, ""), ctx.ty(i + 1).clone())
        {
            return true;
        }
        match &a {
            Type::Arrow(ar) => search(ctx, i, ar.tgt.clone(), ar.base.clone()),
            Type::Star => false,
        }
    }
    !ctx.is_empty() && *ctx.ty(0) == Type::Star && search(ctx, 1, Term::var(0, ""), Type::Star)
}

/// Locally maximal variables of a pasting context: those that are neither the
/// source nor the target of any other variable.
pub fn lm_oracle(ctx: &Context) -> Vec<usize> {
    (0..ctx.len()).filter(|&i| ctx.var_dim(i) >= 1 && ctx.is_source_free(i) && ctx.is_target_free(i)).collect()
}

/// The context with `var` and its target removed, the target renamed to the
/// source in later types.
pub fn excise_oracle(ctx: &Context, var: usize) -> Context {
    let a = ctx.ty(var).as_arrow().unwrap().clone();
    let (s, t) = (a.src.as_var().unwrap().index, a.tgt.as_var().unwrap().index);
    let mut map: Vec<Option<usize>> = vec![None; ctx.len()];
    let mut entries: Vec<Entry> = Vec::new();
    for i in 0..ctx.len() {
        if i == var || i == t {
            continue;
        }
        map[i] = Some(entries.len());
        let ty = rename(ctx.ty(i), &map, s, t);
        entries.push(Entry::new(ctx.name(i).clone(), ty));
    }
    fn rename_term(tm: &Term, map: &[Option<usize>], s: usize, t: usize) -> Term {
        let i = tm.as_var().unwrap().index;
        let i = if i == t { s } else { i };
        Term::var(map[i].unwrap(), "")
    }
    fn rename(ty: &Type, map: &[Option<usize>], s: usize, t: usize) -> Type {
        match ty {
            Type::Star => Type::Star,
            Type::Arrow(a) => {
                Type::arrow(rename(&a.base, map, s, t), rename_term(&a.src, map, s, t), rename_term(&a.tgt, map, s, t))
            }
        }
    }
    Context::new(entries)
}

/// A type with the normal forms of its boundaries, from the top down.
type Bounded = (Type, Vec<(Term, Term)>);

/// All valid terms over a context up to a size bound, by increasing size.
pub struct Enumerator {
    pub checker: Checker,
    pub norm: Normalizer,
    terms: HashMap<(Context, usize), Vec<Item>>,
    types: HashMap<(Context, usize), Vec<Bounded>>,
    shapes: Vec<(Context, DyckWord)>,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator::new()
    }
}

impl Enumerator {
    pub fn new() -> Self {
        Enumerator {
            checker: Checker::new(Mode::CattSu),
            norm: Normalizer::default(),
            terms: HashMap::new(),
            types: HashMap::new(),
            shapes: pasting_contexts(5),
        }
    }

    /// Valid terms of exactly the given size.
    pub fn terms(&mut self, ctx: &Context, size: usize) -> Vec<Item> {
        let key = (ctx.clone(), size);
        if let Some(v) = self.terms.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            for i in 0..ctx.len() {
                out.push(Item::new(ctx, ctx.var(i), ctx.ty(i).clone(), &mut self.norm));
            }
        } else {
            let shapes = self.shapes.clone();
            for (delta, _) in shapes {
                if delta.len() + 3 > size {
                    continue;
                }
                for cell in 2..=(size - 1 - delta.len()) {
                    let args_size = size - 1 - cell;
                    for (ty, _) in self.types(&delta, cell) {
                        let Type::Arrow(_) = ty else { continue };
                        if self.checker.check_head(&delta, &ty).is_err() {
                            continue;
                        }
                        let mut subs = Vec::new();
                        self.substitutions(ctx, &delta, args_size, &mut Vec::new(), &mut subs);
                        for sigma in subs {
                            let t = Term::coh(delta.clone(), ty.clone(), Sub(sigma));
                            let tty = self.checker.check_term(ctx, &t).expect("enumerated terms are valid");
                            out.push(Item::new(ctx, t, tty, &mut self.norm));
                        }
                    }
                }
            }
        }
        self.terms.insert(key, out.clone());
        out
    }

    /// Valid types of exactly the given size, with the normal forms of their
    /// boundaries from the top down.
    fn types(&mut self, ctx: &Context, size: usize) -> Vec<Bounded> {
        let key = (ctx.clone(), size);
        if let Some(v) = self.types.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 0 {
            out.push((Type::Star, Vec::new()));
        }
        for base_size in (0..=size.saturating_sub(2)).filter(|&b| b != 1 && size >= 2) {
            let bases = self.types(ctx, base_size);
            for su in 1..(size - base_size) {
                let sv = size - base_size - su;
                let us = self.terms(ctx, su);
                let vs = self.terms(ctx, sv);
                for (base, bb) in &bases {
                    for u in us.iter().filter(|u| u.bounds == *bb) {
                        for v in vs.iter().filter(|v| v.bounds == *bb) {
                            let mut bounds = vec![(u.nf.clone(), v.nf.clone())];
                            bounds.extend(bb.iter().cloned());
                            out.push((Type::arrow(base.clone(), u.term.clone(), v.term.clone()), bounds));
                        }
                    }
                }
            }
        }
        self.types.insert(key, out.clone());
        out
    }

    fn substitutions(
        &mut self,
        ctx: &Context,
        delta: &Context,
        budget: usize,
        prefix: &mut Vec<Term>,
        out: &mut Vec<Vec<Term>>,
    ) {
        let i = prefix.len();
        if i == delta.len() {
            if budget == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let remaining = delta.len() - i - 1;
        if budget < 1 + remaining {
            return;
        }
        let sigma = Sub(prefix.iter().cloned().chain(std::iter::repeat_n(Term::var(0, ""), delta.len() - i)).collect());
        let expected = delta.ty(i).subst(&sigma);
        let expected = self.norm.ty(&expected).unwrap();
        let mut bounds = Vec::new();
        let mut cur = expected.clone();
        while let Type::Arrow(a) = cur {
            bounds.push((a.src.clone(), a.tgt.clone()));
            cur = a.base.clone();
        }
        for s in 1..=(budget - remaining) {
            for it in self.terms(ctx, s) {
                if it.dim == expected.dim() + 1 && it.bounds == bounds {
                    prefix.push(it.term.clone());
                    self.substitutions(ctx, delta, budget - s, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
}
