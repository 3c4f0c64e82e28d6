//! Raw syntax: variables, types, terms, contexts and substitutions.
//!
//! Variables are level indices into the enclosing context. The display name
//! carried by a variable never takes part in equality or hashing.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Display name of a variable or a context entry.
pub type Name = Arc<str>;

#[derive(Clone, Debug)]
pub struct Var {
    pub index: usize,
    pub name: Name,
}

impl Var {
    pub fn new(index: usize, name: impl Into<Name>) -> Self {
        Var { index, name: name.into() }
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}
impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state)
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Var {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index.cmp(&other.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Star,
    Arrow(Arc<Arrow>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub base: Type,
    pub src: Term,
    pub tgt: Term,
}

impl Type {
    pub fn arrow(base: Type, src: Term, tgt: Term) -> Type {
        Type::Arrow(Arc::new(Arrow { base, src, tgt }))
    }

    pub fn as_arrow(&self) -> Option<&Arrow> {
        match self {
            Type::Star => None,
            Type::Arrow(a) => Some(a),
        }
    }

    /// `⋆` has dimension -1, an arrow one more than its base.
    pub fn dim(&self) -> i64 {
        match self {
            Type::Star => -1,
            Type::Arrow(a) => a.base.dim() + 1,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    pub(crate) fn collect_free_vars(&self, out: &mut BTreeSet<usize>) {
        if let Type::Arrow(a) = self {
            a.base.collect_free_vars(out);
            a.src.collect_free_vars(out);
            a.tgt.collect_free_vars(out);
        }
    }

    /// Number of term nodes occurring in the type.
    pub fn size(&self) -> usize {
        match self {
            Type::Star => 0,
            Type::Arrow(a) => a.base.size() + a.src.size() + a.tgt.size(),
        }
    }

    /// Number of coherence nodes, counting those inside arrow bases.
    pub fn coherence_count(&self) -> usize {
        match self {
            Type::Star => 0,
            Type::Arrow(a) => a.base.coherence_count() + a.src.coherence_count() + a.tgt.coherence_count(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Term {
    Var(Var),
    Coh(Arc<Coh>),
}

/// A coherence `coh(Δ : U)[σ]`. The structural hash is computed once at
/// construction so that hashing a term is constant time.
#[derive(Debug)]
pub struct Coh {
    ctx: Context,
    ty: Type,
    args: Sub,
    hash: u64,
}

impl Coh {
    pub fn ctx(&self) -> &Context {
        &self.ctx
    }
    pub fn ty(&self) -> &Type {
        &self.ty
    }
    pub fn args(&self) -> &Sub {
        &self.args
    }
}

impl PartialEq for Coh {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash && self.args == other.args && self.ty == other.ty && self.ctx == other.ctx
    }
}
impl Eq for Coh {}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Coh(a), Term::Coh(b)) => Arc::ptr_eq(a, b) || **a == **b,
            _ => false,
        }
    }
}
impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Term::Var(v) => {
                0u8.hash(state);
                v.index.hash(state);
            }
            Term::Coh(c) => {
                1u8.hash(state);
                c.hash.hash(state);
            }
        }
    }
}

fn fingerprint<T: Hash + ?Sized>(value: &T) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

impl Term {
    pub fn var(index: usize, name: impl Into<Name>) -> Term {
        Term::Var(Var::new(index, name))
    }

    pub fn coh(ctx: Context, ty: Type, args: Sub) -> Term {
        let hash = fingerprint(&(&ctx, &ty, &args));
        Term::Coh(Arc::new(Coh { ctx, ty, args, hash }))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Coh(_) => None,
        }
    }

    pub fn as_coh(&self) -> Option<&Coh> {
        match self {
            Term::Var(_) => None,
            Term::Coh(c) => Some(c),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    /// Only the arguments of a coherence contribute: its head is closed.
    pub(crate) fn collect_free_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Term::Var(v) => {
                out.insert(v.index);
            }
            Term::Coh(c) => {
                for a in c.args.iter() {
                    a.collect_free_vars(out);
                }
            }
        }
    }

    /// Number of term nodes: variables, coherences, and the term nodes of
    /// each coherence's cell type.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Coh(c) => 1 + c.ty.size() + c.args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Number of coherence nodes, including those inside cell types.
    pub fn coherence_count(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Coh(c) => 1 + c.ty.coherence_count() + c.args.iter().map(Term::coherence_count).sum::<usize>(),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.free_vars().last().copied()
    }
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: Name,
    pub ty: Type,
}

impl Entry {
    pub fn new(name: impl Into<Name>, ty: Type) -> Self {
        Entry { name: name.into(), ty }
    }
}

/// An ordered list of typed variables. Equality and hashing ignore names.
#[derive(Clone, Debug)]
pub struct Context(Arc<ContextData>);

#[derive(Debug)]
struct ContextData {
    entries: Vec<Entry>,
    hash: u64,
}

impl Context {
    pub fn new(entries: Vec<Entry>) -> Self {
        let hash = fingerprint(&entries.iter().map(|e| &e.ty).collect::<Vec<_>>());
        Context(Arc::new(ContextData { entries, hash }))
    }

    pub fn empty() -> Self {
        Context::new(Vec::new())
    }

    pub fn entries(&self) -> &[Entry] {
        &self.0.entries
    }

    pub fn len(&self) -> usize {
        self.0.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Entry> {
        self.0.entries.get(index)
    }

    pub fn ty(&self, index: usize) -> &Type {
        &self.0.entries[index].ty
    }

    pub fn name(&self, index: usize) -> &Name {
        &self.0.entries[index].name
    }

    /// The variable at `index`, named after its entry.
    pub fn var(&self, index: usize) -> Term {
        Term::var(index, self.name(index).clone())
    }

    pub fn extend(&self, name: impl Into<Name>, ty: Type) -> Context {
        let mut entries = self.0.entries.clone();
        entries.push(Entry::new(name, ty));
        Context::new(entries)
    }

    pub fn prefix(&self, len: usize) -> Context {
        Context::new(self.0.entries[..len].to_vec())
    }

    /// `dim(Γ, x : A) = max(dim Γ, dim A + 1)`, with the empty context at -1.
    pub fn dim(&self) -> i64 {
        self.0.entries.iter().map(|e| e.ty.dim() + 1).max().unwrap_or(-1)
    }

    /// Dimension of the variable at `index`.
    pub fn var_dim(&self, index: usize) -> i64 {
        self.ty(index).dim() + 1
    }

    pub fn all_vars(&self) -> BTreeSet<usize> {
        (0..self.len()).collect()
    }

    /// Downward closure of a set of variables: adds every variable occurring
    /// in the types of its members.
    pub fn close(&self, vars: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = vars.clone();
        // Types only mention earlier variables, so one descending sweep suffices.
        for i in (0..self.len()).rev() {
            if out.contains(&i) {
                self.ty(i).collect_free_vars(&mut out);
            }
        }
        out
    }

    /// `supp(t)`: the downward closure of the free variables of `t`.
    pub fn support(&self, t: &Term) -> BTreeSet<usize> {
        self.close(&t.free_vars())
    }

    pub fn type_support(&self, ty: &Type) -> BTreeSet<usize> {
        self.close(&ty.free_vars())
    }

    /// Variables whose declared type has `index` as its source or target.
    pub fn is_source_free(&self, index: usize) -> bool {
        !self
            .0
            .entries
            .iter()
            .any(|e| matches!(e.ty.as_arrow(), Some(a) if a.src.as_var().map(|v| v.index) == Some(index)))
    }

    pub fn is_target_free(&self, index: usize) -> bool {
        !self
            .0
            .entries
            .iter()
            .any(|e| matches!(e.ty.as_arrow(), Some(a) if a.tgt.as_var().map(|v| v.index) == Some(index)))
    }
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.entries.len() == other.0.entries.len()
                && self.0.entries.iter().zip(other.0.entries.iter()).all(|(a, b)| a.ty == b.ty))
    }
}
impl Eq for Context {}

impl Hash for Context {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash.hash(state)
    }
}

/// A substitution, listed in the order of its domain context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Sub(pub Vec<Term>);

impl Sub {
    pub fn new(terms: Vec<Term>) -> Self {
        Sub(terms)
    }

    /// `id_Γ`: every variable sent to itself.
    pub fn identity(ctx: &Context) -> Self {
        Sub((0..ctx.len()).map(|i| ctx.var(i)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Term> {
        self.0.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Term> {
        self.0.iter()
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(Term::size).sum()
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for t in &self.0 {
            t.collect_free_vars(&mut out);
        }
        out
    }
}

impl std::ops::Index<usize> for Sub {
    type Output = Term;
    fn index(&self, index: usize) -> &Term {
        &self.0[index]
    }
}

impl FromIterator<Term> for Sub {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Sub(iter.into_iter().collect())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
