//! Reduction: pruning, disc removal and endo-coherence removal, closed under
//! congruence. Provides every one-step reduct, the deterministic standard
//! step, a fast normalizer and the phase-structure check.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::pasting::{
    canonical_identity, check_pasting, disc_sub, identity_dim, is_disc_head, is_identity, locally_maximal, DyckWord,
};
use crate::syntax::{Coh, Context, Sub, Term, Type};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("normalization ran out of fuel after {0} steps")]
    FuelExhausted(u64),
}

/// One step into a term, type or substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Segment {
    /// The i-th argument of a coherence, or the i-th entry of a substitution.
    Arg(usize),
    /// The cell type of a coherence.
    Cell,
    Base,
    Src,
    Tgt,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Arg(i) => write!(f, "A{i}"),
            Segment::Cell => f.write_str("C"),
            Segment::Base => f.write_str("T0"),
            Segment::Src => f.write_str("T1"),
            Segment::Tgt => f.write_str("T2"),
        }
    }
}

/// Path from the root of the reduced entity to the contracted redex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Locus(pub Vec<Segment>);

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Locus {
    fn prefixed(mut self, seg: Segment) -> Locus {
        self.0.insert(0, seg);
        self
    }
}

/// Top-level label of a step, determined by where it happens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    A,
    B,
    C,
    D,
    E,
    T0,
    T1,
    T2,
    S,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// What happens at the redex itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Contraction {
    /// Pruning the identity argument of the locally maximal variable `var`.
    Prune { var: usize },
    /// A disc coherence reduces to its last argument.
    Disc,
    /// An endo-coherence that is not an identity reduces to one.
    Endo,
}

impl Contraction {
    pub fn rule(&self) -> Rule {
        match self {
            Contraction::Prune { .. } => Rule::B,
            Contraction::Disc => Rule::D,
            Contraction::Endo => Rule::E,
        }
    }
}

impl fmt::Display for Contraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Contraction::Prune { var } => write!(f, "B{var}"),
            Contraction::Disc => f.write_str("D"),
            Contraction::Endo => f.write_str("E"),
        }
    }
}

/// A single rewrite, recording the redex before and after contraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Rule,
    pub locus: Locus,
    pub contraction: Contraction,
    pub before: Term,
    pub after: Term,
}

impl ReductionStep {
    /// Re-applies the contraction to `before` and compares with `after`.
    pub fn replay(&self) -> bool {
        contract(&self.before, self.contraction).as_ref() == Some(&self.after)
    }

    fn prefixed(mut self, seg: Segment) -> Self {
        self.locus = self.locus.prefixed(seg);
        self
    }
}

/// Applies a contraction at the root of `t`, if it is a redex of that kind.
pub fn contract(t: &Term, contraction: Contraction) -> Option<Term> {
    let c = t.as_coh()?;
    match contraction {
        Contraction::Prune { var } => {
            if is_identity(t) || !c.args().get(var).is_some_and(is_identity) {
                return None;
            }
            let word = check_pasting(c.ctx()).ok()?;
            let (_, peak) = locally_maximal(&word).into_iter().find(|(v, _)| *v == var)?;
            let (ctx, ty, args) = prune(&word, &peak, c.ty(), c.args());
            Some(Term::coh(ctx, ty, args))
        }
        Contraction::Disc => is_disc_head(c.ctx(), c.ty()).then(|| c.args().0.last().unwrap().clone()),
        Contraction::Endo => endo(c),
    }
}

fn prune(word: &DyckWord, peak: &crate::pasting::Peak, ty: &Type, args: &Sub) -> (Context, Type, Sub) {
    let ctx = word.excise(peak).to_context();
    let pi = word.project(peak);
    (ctx, ty.subst(&pi), word.remove(peak, args))
}

fn endo(c: &Coh) -> Option<Term> {
    if identity_dim(c.ctx(), c.ty()).is_some() {
        return None;
    }
    let a = c.ty().as_arrow()?;
    if a.src != a.tgt {
        return None;
    }
    let id = canonical_identity(&a.base, &a.src);
    Some(id.subst(c.args()))
}

/// Locally maximal variables whose argument is an identity, left to right.
fn prunable(c: &Coh, t: &Term) -> Vec<(usize, crate::pasting::Peak, DyckWord)> {
    if is_identity(t) || !c.args().iter().any(is_identity) {
        return Vec::new();
    }
    let Ok(word) = check_pasting(c.ctx()) else {
        return Vec::new();
    };
    locally_maximal(&word)
        .into_iter()
        .filter(|(v, _)| c.args().get(*v).is_some_and(is_identity))
        .map(|(v, p)| (v, p, word.clone()))
        .collect()
}

fn step_at_root(t: &Term, contraction: Contraction, after: Term) -> ReductionStep {
    ReductionStep { rule: contraction.rule(), locus: Locus::default(), contraction, before: t.clone(), after }
}

fn with_arg(c: &Coh, i: usize, a: Term) -> Term {
    let mut args = c.args().clone();
    args.0[i] = a;
    Term::coh(c.ctx().clone(), c.ty().clone(), args)
}

fn term_label(locus: &Locus, contraction: Contraction) -> Rule {
    match locus.0.first() {
        None => contraction.rule(),
        Some(Segment::Arg(_)) => Rule::A,
        Some(_) => Rule::C,
    }
}

fn type_label(locus: &Locus) -> Rule {
    match locus.0.first() {
        Some(Segment::Base) => Rule::T0,
        Some(Segment::Src) => Rule::T1,
        _ => Rule::T2,
    }
}

fn relabel(mut step: ReductionStep, rule: Rule) -> ReductionStep {
    step.rule = rule;
    step
}

/// Every one-step reduct of a term, with the step that produces it.
pub fn term_reducts(t: &Term) -> Vec<(ReductionStep, Term)> {
    let mut out = Vec::new();
    let Some(c) = t.as_coh() else {
        return out;
    };
    for (i, a) in c.args().iter().enumerate() {
        for (step, a2) in term_reducts(a) {
            out.push((step.prefixed(Segment::Arg(i)), with_arg(c, i, a2)));
        }
    }
    for (var, peak, word) in prunable(c, t) {
        let (ctx, ty, args) = prune(&word, &peak, c.ty(), c.args());
        let after = Term::coh(ctx, ty, args);
        out.push((step_at_root(t, Contraction::Prune { var }, after.clone()), after));
    }
    for (step, ty2) in type_reducts(c.ty()) {
        let after = Term::coh(c.ctx().clone(), ty2, c.args().clone());
        out.push((step.prefixed(Segment::Cell), after));
    }
    for contraction in [Contraction::Disc, Contraction::Endo] {
        if let Some(after) = contract(t, contraction) {
            out.push((step_at_root(t, contraction, after.clone()), after));
        }
    }
    out.into_iter().map(|(s, r)| (relabel_term(s), r)).collect()
}

fn relabel_term(s: ReductionStep) -> ReductionStep {
    let rule = term_label(&s.locus, s.contraction);
    relabel(s, rule)
}

/// Every one-step reduct of a type.
pub fn type_reducts(ty: &Type) -> Vec<(ReductionStep, Type)> {
    let mut out = Vec::new();
    let Type::Arrow(a) = ty else {
        return out;
    };
    for (step, b) in type_reducts(&a.base) {
        out.push((step.prefixed(Segment::Base), Type::arrow(b, a.src.clone(), a.tgt.clone())));
    }
    for (step, s) in term_reducts(&a.src) {
        out.push((step.prefixed(Segment::Src), Type::arrow(a.base.clone(), s, a.tgt.clone())));
    }
    for (step, t) in term_reducts(&a.tgt) {
        out.push((step.prefixed(Segment::Tgt), Type::arrow(a.base.clone(), a.src.clone(), t)));
    }
    out.into_iter()
        .map(|(s, r)| {
            let rule = type_label(&s.locus);
            (relabel(s, rule), r)
        })
        .collect()
}

/// Every one-step reduct of a substitution.
pub fn sub_reducts(sigma: &Sub) -> Vec<(ReductionStep, Sub)> {
    let mut out = Vec::new();
    for (i, a) in sigma.iter().enumerate() {
        for (step, a2) in term_reducts(a) {
            let mut s2 = sigma.clone();
            s2.0[i] = a2;
            out.push((relabel(step.prefixed(Segment::Arg(i)), Rule::S), s2));
        }
    }
    out
}

/// The standard reduct: arguments first (leftmost), then pruning (leftmost
/// locally maximal variable), then the cell type, then disc removal, then
/// endo-coherence removal.
pub fn standard_step(t: &Term) -> Option<(ReductionStep, Term)> {
    standard_term(t).map(|(s, r)| (relabel_term(s), r))
}

fn standard_term(t: &Term) -> Option<(ReductionStep, Term)> {
    let c = t.as_coh()?;
    for (i, a) in c.args().iter().enumerate() {
        if let Some((step, a2)) = standard_term(a) {
            return Some((step.prefixed(Segment::Arg(i)), with_arg(c, i, a2)));
        }
    }
    if let Some((var, peak, word)) = prunable(c, t).into_iter().next() {
        let (ctx, ty, args) = prune(&word, &peak, c.ty(), c.args());
        let after = Term::coh(ctx, ty, args);
        return Some((step_at_root(t, Contraction::Prune { var }, after.clone()), after));
    }
    if let Some((step, ty2)) = standard_type_inner(c.ty()) {
        return Some((step.prefixed(Segment::Cell), Term::coh(c.ctx().clone(), ty2, c.args().clone())));
    }
    for contraction in [Contraction::Disc, Contraction::Endo] {
        if let Some(after) = contract(t, contraction) {
            return Some((step_at_root(t, contraction, after.clone()), after));
        }
    }
    None
}

/// Standard reduct of a type: base, then source, then target.
pub fn standard_type_step(ty: &Type) -> Option<(ReductionStep, Type)> {
    standard_type_inner(ty).map(|(s, r)| {
        let rule = type_label(&s.locus);
        (relabel(s, rule), r)
    })
}

fn standard_type_inner(ty: &Type) -> Option<(ReductionStep, Type)> {
    let Type::Arrow(a) = ty else {
        return None;
    };
    if let Some((step, b)) = standard_type_inner(&a.base) {
        return Some((step.prefixed(Segment::Base), Type::arrow(b, a.src.clone(), a.tgt.clone())));
    }
    if let Some((step, s)) = standard_term(&a.src) {
        return Some((step.prefixed(Segment::Src), Type::arrow(a.base.clone(), s, a.tgt.clone())));
    }
    if let Some((step, t)) = standard_term(&a.tgt) {
        return Some((step.prefixed(Segment::Tgt), Type::arrow(a.base.clone(), a.src.clone(), t)));
    }
    None
}

/// Standard reduct of a substitution: its leftmost reducible entry.
pub fn standard_sub_step(sigma: &Sub) -> Option<(ReductionStep, Sub)> {
    for (i, a) in sigma.iter().enumerate() {
        if let Some((step, a2)) = standard_term(a) {
            let mut s2 = sigma.clone();
            s2.0[i] = a2;
            return Some((relabel(step.prefixed(Segment::Arg(i)), Rule::S), s2));
        }
    }
    None
}

/// Iterates the standard step, recording each step and the term after it.
pub fn normalize_traced(t: &Term, fuel: u64) -> Result<(Term, Vec<(ReductionStep, Term)>), ReductionError> {
    let mut cur = t.clone();
    let mut trace = Vec::new();
    while let Some((step, next)) = standard_step(&cur) {
        if trace.len() as u64 >= fuel {
            return Err(ReductionError::FuelExhausted(fuel));
        }
        trace.push((step, next.clone()));
        cur = next;
    }
    Ok((cur, trace))
}

/// Computes normal forms by structural recursion, contracting redexes in the
/// same order as the standard strategy. Results are memoized.
#[derive(Debug)]
pub struct Normalizer {
    fuel: u64,
    steps: u64,
    memo: bool,
    terms: HashMap<Term, Term>,
    types: HashMap<Type, Type>,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::new(DEFAULT_FUEL)
    }
}

impl Normalizer {
    pub fn new(fuel: u64) -> Self {
        Normalizer { fuel, steps: 0, memo: true, terms: HashMap::new(), types: HashMap::new() }
    }

    /// A normalizer that never memoizes, so that `steps` counts exactly the
    /// standard reduction sequence.
    pub fn counting(fuel: u64) -> Self {
        Normalizer { memo: false, ..Normalizer::new(fuel) }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Resets the step counter; fuel is measured per top-level call.
    pub fn reset_steps(&mut self) {
        self.steps = 0;
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    fn tick(&mut self) -> Result<(), ReductionError> {
        self.steps += 1;
        if self.steps > self.fuel {
            Err(ReductionError::FuelExhausted(self.fuel))
        } else {
            Ok(())
        }
    }

    pub fn term(&mut self, t: &Term) -> Result<Term, ReductionError> {
        let Term::Coh(c) = t else {
            return Ok(t.clone());
        };
        if self.memo {
            if let Some(n) = self.terms.get(t) {
                return Ok(n.clone());
            }
        }
        let n = self.coh(c)?;
        if self.memo {
            self.terms.insert(t.clone(), n.clone());
        }
        Ok(n)
    }

    fn coh(&mut self, c: &Coh) -> Result<Term, ReductionError> {
        let mut args = self.sub(c.args())?;
        let mut ctx = c.ctx().clone();
        let mut ty = c.ty().clone();
        if identity_dim(&ctx, &ty).is_none() && args.iter().any(is_identity) {
            if let Ok(mut word) = check_pasting(&ctx) {
                loop {
                    if identity_dim(&ctx, &ty).is_some() {
                        break;
                    }
                    let found = locally_maximal(&word).into_iter().find(|(v, _)| is_identity(&args[*v]));
                    let Some((_, peak)) = found else {
                        break;
                    };
                    self.tick()?;
                    let (c2, t2, a2) = prune(&word, &peak, &ty, &args);
                    word = word.excise(&peak);
                    ctx = c2;
                    ty = t2;
                    args = a2;
                }
            }
        }
        let ty = self.ty(&ty)?;
        if is_disc_head(&ctx, &ty) {
            self.tick()?;
            return Ok(args.0.last().unwrap().clone());
        }
        if identity_dim(&ctx, &ty).is_none() {
            if let Some(a) = ty.as_arrow() {
                if a.src == a.tgt {
                    self.tick()?;
                    let k = (a.base.dim() + 1) as usize;
                    let args = self.sub(&disc_sub(&a.base, &a.src).compose(&args))?;
                    return Ok(crate::pasting::identity_term(k, args));
                }
            }
        }
        Ok(Term::coh(ctx, ty, args))
    }

    pub fn ty(&mut self, ty: &Type) -> Result<Type, ReductionError> {
        let Type::Arrow(a) = ty else {
            return Ok(Type::Star);
        };
        if self.memo {
            if let Some(n) = self.types.get(ty) {
                return Ok(n.clone());
            }
        }
        let n = Type::arrow(self.ty(&a.base)?, self.term(&a.src)?, self.term(&a.tgt)?);
        if self.memo {
            self.types.insert(ty.clone(), n.clone());
        }
        Ok(n)
    }

    pub fn sub(&mut self, sigma: &Sub) -> Result<Sub, ReductionError> {
        sigma.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>().map(Sub)
    }
}

/// `N(t)` with the default fuel.
pub fn normalize(t: &Term) -> Result<Term, ReductionError> {
    Normalizer::default().term(t)
}

pub fn normalize_type(ty: &Type) -> Result<Type, ReductionError> {
    Normalizer::default().ty(ty)
}

/// `N(s) ≡ N(t)`. Both terms are assumed valid in the same context.
pub fn decide_eq(s: &Term, t: &Term) -> Result<bool, ReductionError> {
    let mut n = Normalizer::default();
    Ok(n.term(s)? == n.term(t)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("phase violation at step {step}: rule {label} at site '{site}' follows {history:?}")]
pub struct PhaseViolation {
    pub step: usize,
    pub site: Locus,
    pub label: Rule,
    pub history: Vec<Rule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Args,
    Prune,
    Cell,
    Done,
    AfterEndo,
}

fn advance(phase: Phase, label: Rule) -> Option<Phase> {
    use Phase::*;
    match (phase, label) {
        (Args, Rule::A) | (AfterEndo, Rule::A) => Some(phase),
        (Args | Prune, Rule::B) => Some(Prune),
        (Args | Prune | Cell, Rule::C) => Some(Cell),
        (Args | Prune | Cell, Rule::D) => Some(Done),
        (Args | Prune | Cell, Rule::E) => Some(AfterEndo),
        _ => None,
    }
}

/// Root kinds for [`check_phases`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Root {
    Term,
    Type,
    Sub,
}

/// Checks that at every term site the sequence of labels is of the form
/// `A* B* C* (D | E A*)?`. A contraction at a site starts fresh histories
/// for everything below it.
pub fn check_phases(root: Root, steps: &[ReductionStep]) -> Result<(), PhaseViolation> {
    let mut sites: HashMap<Vec<Segment>, (Phase, Vec<Rule>)> = HashMap::new();
    for (n, step) in steps.iter().enumerate() {
        let path = &step.locus.0;
        let mut is_term = root == Root::Term;
        for depth in 0..=path.len() {
            if is_term {
                let label = match path.get(depth) {
                    None => step.contraction.rule(),
                    Some(Segment::Arg(_)) => Rule::A,
                    Some(_) => Rule::C,
                };
                let key = path[..depth].to_vec();
                let entry = sites.entry(key.clone()).or_insert((Phase::Args, Vec::new()));
                match advance(entry.0, label) {
                    Some(p) => {
                        entry.0 = p;
                        entry.1.push(label);
                    }
                    None => return Err(PhaseViolation { step: n, site: Locus(key), label, history: entry.1.clone() }),
                }
            }
            if let Some(seg) = path.get(depth) {
                is_term = matches!(seg, Segment::Arg(_) | Segment::Src | Segment::Tgt);
            }
        }
        sites.retain(|k, _| !(k.len() > path.len() && k.starts_with(path)));
    }
    Ok(())
}
