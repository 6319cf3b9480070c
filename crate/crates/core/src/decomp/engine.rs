//! Graded span membership.
//!
//! Decomposables of multidegree `t` form the space `D_t` spanned by products of
//! at least two pool items. Writing `I_s` for the span of all pool items and
//! their products at multidegree `s`, and `Gen_s` for items independent
//! modulo `D_s`, we have `D_t = sum_s Gen_s * I_{t-s}`, so each component only
//! needs generators times a basis of a lower component.
//!
//! Spans are computed on value vectors at random points of a large finite
//! field. That step is only a search: a "decomposable" answer is accepted only
//! after the certificate has been lifted to the base field and re-substituted
//! into exact expansions, and an "indecomposable" answer is re-checked against
//! the complete product list (by exact integer elimination over `Q`, or by
//! evaluation, which is conclusive in that direction, over `F_p`).

use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};
use serde_json::{json, Value as Json};
use smallvec::SmallVec;

use super::evalfield::{large_primes, EvalField, Gf, Zq};
use super::fastpoly::{packed_generics, packed_variables, FastPoly};
use crate::error::{Error, Result};
use crate::genmat::{Matrix, MatrixKind};
use crate::invlang::{canonical_form, InvariantExpr, Word};
use crate::polyring::{count_monomials_of_multidegree, MultiDegree, Polynomial};
use crate::scalars::{inv_mod, mul_mod, FieldDescriptor, Ring, Scalar};

/// Default cap on the number of monomials in a component we expand exactly.
pub const DEFAULT_RESOURCE_CAP: u128 = 200_000;

/// Largest `GF(p^k)` used for evaluation in characteristic `p`.
const EXTENSION_LIMIT: u64 = 1 << 20;

/// Rank margin below the number of points; reaching it means more points are
/// needed.
const MARGIN: usize = 8;

const INITIAL_POINTS: usize = 64;
const MAX_POINTS: usize = 4096;

/// Products beyond this count are not enumerated for confirmation.
const ENUMERATION_LIMIT: usize = 60_000;

/// The monomial cap, overridable through `INVKIT_RESOURCE_CAP`.
pub fn resource_cap() -> u128 {
    std::env::var("INVKIT_RESOURCE_CAP").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_RESOURCE_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CaseDesc {
    pub kind: MatrixKind,
    pub n: usize,
    pub d: usize,
    pub field: FieldDescriptor,
}

impl CaseDesc {
    pub fn new(kind: MatrixKind, n: usize, d: usize, field: FieldDescriptor) -> Self {
        CaseDesc { kind, n, d, field }
    }

    /// Three symmetric 3x3 matrices.
    pub fn o3_sym(d: usize, field: FieldDescriptor) -> Self {
        CaseDesc::new(MatrixKind::Symmetric, 3, d, field)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoolItem {
    pub expr: InvariantExpr,
    pub mdeg: MultiDegree,
    pub degree: u32,
}

/// A product of pool items, as sorted item indices.
pub type Product = SmallVec<[u32; 6]>;

/// All `sigma_t(w)` (`t <= 3`) of bounded degree, up to rotation and
/// transpose-reversal of `w`. Expansions are computed on demand.
pub struct InvariantPool {
    pub desc: CaseDesc,
    pub max_degree: u32,
    pub items: Vec<PoolItem>,
    expansions: Vec<OnceLock<Polynomial>>,
    exact: Mutex<ExactCache>,
    engine: Mutex<Option<EngineState>>,
}

impl fmt::Debug for InvariantPool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvariantPool")
            .field("desc", &self.desc)
            .field("max_degree", &self.max_degree)
            .field("items", &self.items.len())
            .finish()
    }
}

pub fn build_pool(desc: CaseDesc, max_degree: u32) -> Result<InvariantPool> {
    if max_degree > 8 {
        return Err(Error::Input(format!("pool degree {max_degree} exceeds 8")));
    }
    if desc.n == 0 || desc.d == 0 {
        return Err(Error::Input("pool needs n >= 1 and d >= 1".into()));
    }
    if desc.field.characteristic() == 2 {
        return Err(Error::Inadmissible(2, "decomposability is computed in odd or zero characteristic".into()));
    }
    let cap = resource_cap();
    let mut seen = FxHashSet::default();
    let mut keyed = Vec::new();
    for t in 1..=desc.n.min(3) {
        for len in 1..=(max_degree as usize / t) {
            let mut idx = vec![1usize; len];
            loop {
                let e = InvariantExpr::sigma_t(t, &idx);
                let (c, _) = canonical_form(&e, desc.kind, desc.n);
                if seen.insert(c.clone()) {
                    keyed.push(((t * len) as u32, len, c.word.clone(), t, c));
                }
                // next word in lexicographic order
                let mut pos = len;
                while pos > 0 && idx[pos - 1] == desc.d {
                    idx[pos - 1] = 1;
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                idx[pos - 1] += 1;
            }
        }
    }
    keyed.sort_by(|a, b| (a.0, a.1, &a.2, a.3).cmp(&(b.0, b.1, &b.2, b.3)));
    let mut items = Vec::with_capacity(keyed.len());
    for (degree, _, _, _, expr) in keyed {
        let mdeg = expr.multidegree(desc.n, desc.d);
        let monomials = count_monomials_of_multidegree(desc.kind, desc.n, &mdeg);
        if monomials > cap {
            return Err(Error::ResourceCap { mdeg: mdeg.to_string(), monomials, cap });
        }
        items.push(PoolItem { expr, mdeg, degree });
    }
    let expansions = (0..items.len()).map(|_| OnceLock::new()).collect();
    Ok(InvariantPool {
        desc,
        max_degree,
        items,
        expansions,
        exact: Mutex::new(ExactCache::default()),
        engine: Mutex::new(None),
    })
}

#[derive(Default)]
struct ExactCache {
    generics: Option<Vec<Matrix<FastPoly>>>,
    items: FxHashMap<u32, Arc<FastPoly>>,
}

impl InvariantPool {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Index of the item representing `expr` (up to rotation and
    /// transpose-reversal), with the relating sign.
    pub fn find(&self, expr: &InvariantExpr) -> Option<(usize, i8)> {
        let (c, sign) = canonical_form(expr, self.desc.kind, self.desc.n);
        self.items.iter().position(|it| it.expr == c).map(|i| (i, sign))
    }

    /// The expansion of item `i` over the pool's field.
    pub fn expansion(&self, i: usize) -> Result<&Polynomial> {
        if let Some(p) = self.expansions[i].get() {
            return Ok(p);
        }
        let fast = self.exact_expansion(&self.items[i].expr)?;
        let vars = packed_variables(self.desc.kind, self.desc.n, self.desc.d);
        let p = fast.to_polynomial(&vars, self.desc.field);
        Ok(self.expansions[i].get_or_init(|| p))
    }

    fn modulus(&self) -> i128 {
        self.desc.field.characteristic() as i128
    }

    /// Exact packed expansion of an arbitrary expression (integer
    /// coefficients in characteristic 0).
    pub(crate) fn exact_expansion(&self, expr: &InvariantExpr) -> Result<FastPoly> {
        let desc = self.desc;
        if expr.word.max_index() > desc.d {
            return Err(Error::IndexOutOfRange(format!("{expr} uses a generator beyond d = {}", desc.d)));
        }
        let gens = {
            let mut cache = self.exact.lock().unwrap();
            if cache.generics.is_none() {
                cache.generics = Some(
                    packed_generics(desc.kind, desc.n, desc.d, self.modulus())
                        .ok_or_else(|| Error::Input("too many variables for packed expansion".into()))?,
                );
            }
            cache.generics.clone().unwrap()
        };
        let t = expr.t(desc.n);
        if t == 0 || t > desc.n {
            return Err(Error::SigmaOutOfRange { t, n: desc.n });
        }
        if expr.degree(desc.n) > 15 {
            return Err(Error::Input(format!("{expr} exceeds the packed degree limit")));
        }
        expr.word.value(&gens)?.sigma(t)
    }

    fn item_exact(&self, i: u32) -> Result<Arc<FastPoly>> {
        if let Some(p) = self.exact.lock().unwrap().items.get(&i) {
            return Ok(p.clone());
        }
        let p = Arc::new(self.exact_expansion(&self.items[i as usize].expr)?);
        self.exact.lock().unwrap().items.insert(i, p.clone());
        Ok(p)
    }

    pub fn product_exprs(&self, p: &Product) -> Vec<InvariantExpr> {
        p.iter().map(|&i| self.items[i as usize].expr.clone()).collect()
    }

    /// Every product of at least two nonzero items with multidegree `t`.
    pub fn products_of_multidegree(&self, t: &MultiDegree) -> Vec<Product> {
        let candidates: Vec<u32> = (0..self.items.len() as u32)
            .filter(|&i| {
                let m = &self.items[i as usize].mdeg;
                m.le(t) && m != t && !m.is_zero()
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = Product::new();
        self.enumerate(&candidates, 0, t.clone(), &mut cur, &mut out);
        out
    }

    fn enumerate(&self, cands: &[u32], from: usize, rest: MultiDegree, cur: &mut Product, out: &mut Vec<Product>) {
        if rest.is_zero() {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        if out.len() > ENUMERATION_LIMIT {
            return;
        }
        for (pos, &i) in cands.iter().enumerate().skip(from) {
            let m = &self.items[i as usize].mdeg;
            if let Some(r) = rest.checked_sub(m) {
                cur.push(i);
                self.enumerate(cands, pos, r, cur, out);
                cur.pop();
            }
        }
    }
}

/// An integer combination of expressions, e.g. `tr(xyx^2q) + tr(x^2yxq)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearTarget {
    pub terms: Vec<(i64, InvariantExpr)>,
}

impl LinearTarget {
    pub fn single(e: InvariantExpr) -> Self {
        LinearTarget { terms: vec![(1, e)] }
    }

    pub fn sum(a: InvariantExpr, b: InvariantExpr) -> Self {
        LinearTarget { terms: vec![(1, a), (1, b)] }
    }

    pub fn difference(a: InvariantExpr, b: InvariantExpr) -> Self {
        LinearTarget { terms: vec![(1, a), (-1, b)] }
    }

    pub fn multidegree(&self, n: usize, d: usize) -> Result<MultiDegree> {
        let first = self.terms.first().ok_or_else(|| Error::Input("empty target".into()))?;
        let t = first.1.multidegree(n, d);
        for (_, e) in &self.terms[1..] {
            if e.multidegree(n, d) != t {
                return Err(Error::Input(format!("target {self} is not multihomogeneous")));
            }
        }
        Ok(t)
    }

    pub fn to_notation(&self, kind: MatrixKind) -> String {
        self.render(|e| e.to_notation(kind))
    }

    fn render(&self, name: impl Fn(&InvariantExpr) -> String) -> String {
        let mut s = String::new();
        for (pos, (c, e)) in self.terms.iter().enumerate() {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if pos == 0 {
                if sign == "-" {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            if mag != 1 {
                s.push_str(&format!("{mag}*"));
            }
            s.push_str(&name(e));
        }
        s
    }
}

impl From<InvariantExpr> for LinearTarget {
    fn from(e: InvariantExpr) -> Self {
        LinearTarget::single(e)
    }
}

impl fmt::Display for LinearTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|e| e.to_string()))
    }
}

/// One term of a certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm {
    pub coeff: Scalar,
    pub factors: Vec<InvariantExpr>,
}

/// How an indecomposability verdict was confirmed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Confirmation {
    /// fraction-free integer elimination on exact coefficient vectors
    ExactElimination,
    /// evaluation over an extension of `F_p`; a value vector outside the span
    /// of the product value vectors is conclusive
    Evaluation,
    /// too many products to enumerate; the verdict rests on the modular solve
    Unconfirmed,
}

impl Confirmation {
    pub fn as_str(self) -> &'static str {
        match self {
            Confirmation::ExactElimination => "exact elimination",
            Confirmation::Evaluation => "evaluation",
            Confirmation::Unconfirmed => "unconfirmed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Combination(Vec<ProductTerm>),
    Failure {
        /// products enumerated in the confirmation (or candidate count)
        products: usize,
        /// dimension of the decomposable subspace
        span_rank: usize,
        monomials: u128,
        confirmation: Confirmation,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport {
    pub target: LinearTarget,
    pub kind: MatrixKind,
    pub field: FieldDescriptor,
    pub mdeg: MultiDegree,
    pub decomposable: bool,
    pub certificate: Certificate,
    /// true when a decomposable verdict was re-substituted exactly, or an
    /// indecomposable one was confirmed
    pub verified: bool,
}

impl DecompositionReport {
    pub fn to_json(&self) -> Json {
        let cert = match &self.certificate {
            Certificate::Combination(terms) => Json::Array(
                terms
                    .iter()
                    .map(|t| {
                        json!([t.coeff.to_string(), t.factors.iter().map(|e| e.to_string()).collect::<Vec<_>>()])
                    })
                    .collect(),
            ),
            Certificate::Failure { products, span_rank, monomials, confirmation } => json!({
                "products": products,
                "span_rank": span_rank,
                "monomials": monomials.to_string(),
                "confirmation": confirmation.as_str(),
            }),
        };
        json!({
            "target": self.target.to_string(),
            "field": self.field.to_string(),
            "multidegree": self.mdeg.0,
            "decomposable": self.decomposable,
            "verified": self.verified,
            "certificate": cert,
        })
    }

    /// Human-readable certificate, one product per line.
    pub fn certificate_text(&self) -> String {
        match &self.certificate {
            Certificate::Combination(terms) if terms.is_empty() => "0 (the target expands to zero)\n".into(),
            Certificate::Combination(terms) => {
                let mut s = String::new();
                for t in terms {
                    let names: Vec<String> = t.factors.iter().map(|e| e.to_notation(self.kind)).collect();
                    s.push_str(&format!("  {} * {}\n", t.coeff, names.join(" * ")));
                }
                s
            }
            Certificate::Failure { products, span_rank, monomials, confirmation } => format!(
                "  not in the span of {products} products (rank {span_rank}, {monomials} monomials; {})\n",
                confirmation.as_str()
            ),
        }
    }
}

/// Decide whether `target` is a polynomial in lower-degree invariants.
pub fn is_decomposable(target: &InvariantExpr, pool: &InvariantPool) -> Result<DecompositionReport> {
    decompose(&LinearTarget::single(target.clone()), pool)
}

/// [`is_decomposable`] for an integer combination of expressions with a
/// common multidegree.
pub fn decompose(target: &LinearTarget, pool: &InvariantPool) -> Result<DecompositionReport> {
    let desc = pool.desc;
    let t = target.multidegree(desc.n, desc.d)?;
    let deg = t.degree();
    if deg == 0 {
        return Err(Error::Input("constant target".into()));
    }
    if pool.max_degree + 1 < deg {
        return Err(Error::PoolInsufficient(format!(
            "target of degree {deg} needs all items of degree < {deg}, pool stops at {}",
            pool.max_degree
        )));
    }
    for (_, e) in &target.terms {
        if e.word.max_index() > desc.d {
            return Err(Error::IndexOutOfRange(format!("{e} uses a generator beyond d = {}", desc.d)));
        }
        let tt = e.t(desc.n);
        if tt == 0 || tt > desc.n {
            return Err(Error::SigmaOutOfRange { t: tt, n: desc.n });
        }
    }
    let monomials = count_monomials_of_multidegree(desc.kind, desc.n, &t);
    let cap = resource_cap();
    if monomials > cap {
        return Err(Error::ResourceCap { mdeg: t.to_string(), monomials, cap });
    }
    let report = |decomposable, certificate, verified| DecompositionReport {
        target: target.clone(),
        kind: desc.kind,
        field: desc.field,
        mdeg: t.clone(),
        decomposable,
        certificate,
        verified,
    };

    let spec = Spec::Linear(target);
    let target_exact = spec.exact(pool)?;
    Ok(match solve_spec(pool, &t, &spec, &target_exact)? {
        SpecOutcome::Combination(terms) => {
            let terms =
                terms.into_iter().map(|(p, coeff)| ProductTerm { coeff, factors: pool.product_exprs(&p) }).collect();
            report(true, Certificate::Combination(terms), true)
        }
        SpecOutcome::Outside { products, rank, how } => report(
            false,
            Certificate::Failure { products, span_rank: rank, monomials, confirmation: how },
            how != Confirmation::Unconfirmed,
        ),
    })
}

/// What is being decomposed: an expression combination or a product of
/// pool items.
pub(crate) enum Spec<'a> {
    Linear(&'a LinearTarget),
    Product(&'a Product),
}

impl Spec<'_> {
    fn exact(&self, pool: &InvariantPool) -> Result<FastPoly> {
        match self {
            Spec::Linear(t) => exact_target(pool, t),
            Spec::Product(p) => sum_of_products(pool, &[((*p).clone(), 1)], pool.modulus()),
        }
    }

    fn describe(&self, pool: &InvariantPool) -> String {
        match self {
            Spec::Linear(t) => t.to_string(),
            Spec::Product(p) => {
                pool.product_exprs(p).iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" * ")
            }
        }
    }
}

enum SpecOutcome {
    Combination(Vec<(Product, Scalar)>),
    Outside { products: usize, rank: usize, how: Confirmation },
}

fn solve_spec(pool: &InvariantPool, t: &MultiDegree, spec: &Spec, exact: &FastPoly) -> Result<SpecOutcome> {
    if exact.is_zero() {
        return Ok(SpecOutcome::Combination(Vec::new()));
    }
    let mut guard = pool.engine.lock().unwrap();
    for attempt in 0..4u64 {
        let outcome = with_engine(&mut guard, pool, attempt, |eng| eng.solve(pool, t, spec))?;
        match outcome {
            Outcome::InSpan(support) => {
                if let Some(terms) = lift_and_verify(pool, spec, exact, &support)? {
                    return Ok(SpecOutcome::Combination(terms));
                }
                // spurious dependency: retry with fresh points
                *guard = None;
            }
            Outcome::NotInSpan { rank } => {
                return match confirm(pool, t, spec, exact, &mut guard)? {
                    Confirmed::Outside { products, rank, how } => Ok(SpecOutcome::Outside { products, rank, how }),
                    Confirmed::Unconfirmed => {
                        Ok(SpecOutcome::Outside { products: 0, rank, how: Confirmation::Unconfirmed })
                    }
                    Confirmed::Inside => {
                        // the modular solve missed part of the span; redo it
                        *guard = None;
                        continue;
                    }
                };
            }
        }
    }
    Err(Error::Unresolved(format!("span computation for {} did not stabilise", spec.describe(pool))))
}

/// A basis of the decomposable subspace at `t`, as products of generators in
/// pool order. Independence is exact; that the basis spans every product can
/// be checked with [`express_product`].
pub fn decomposable_basis(pool: &InvariantPool, t: &MultiDegree) -> Result<Vec<Product>> {
    let mut guard = pool.engine.lock().unwrap();
    with_engine(&mut guard, pool, 0, |eng| eng.basis(pool, t))
}

/// Coefficients expressing a product of pool items through
/// [`decomposable_basis`], verified on exact expansions.
pub fn express_product(pool: &InvariantPool, p: &Product) -> Result<Vec<(Product, Scalar)>> {
    let d = pool.desc.d;
    let t = p.iter().fold(MultiDegree::zero(d), |acc, &i| acc.add(&pool.items[i as usize].mdeg));
    let spec = Spec::Product(p);
    let exact = spec.exact(pool)?;
    match solve_spec(pool, &t, &spec, &exact)? {
        SpecOutcome::Combination(terms) => Ok(terms),
        SpecOutcome::Outside { .. } => {
            Err(Error::Unresolved(format!("product {} is outside the decomposable span", spec.describe(pool))))
        }
    }
}

fn exact_target(pool: &InvariantPool, target: &LinearTarget) -> Result<FastPoly> {
    let mut acc = FastPoly::zero(pool.modulus());
    for (c, e) in &target.terms {
        acc.add_scaled(&pool.exact_expansion(e)?, *c as i128);
    }
    Ok(acc)
}

enum Outcome {
    /// `(product, coefficient)` over the evaluation field
    InSpan(Support),
    NotInSpan { rank: usize },
}

enum Support {
    Prime { p: u64, terms: Vec<(Product, u64)> },
    Mersenne(Vec<(Product, u64)>, u64),
}

enum EngineState {
    Zq(Engine<Zq>),
    Gf(Engine<Gf>),
}

fn new_engine_state(pool: &InvariantPool, npts: usize, seed: u64) -> EngineState {
    let p = pool.desc.field.characteristic();
    if p == 0 {
        EngineState::Zq(Engine::new(Zq::new(large_primes(1)[0]), pool, npts, seed))
    } else if p > EXTENSION_LIMIT {
        EngineState::Zq(Engine::new(Zq::new(p), pool, npts, seed))
    } else {
        EngineState::Gf(Engine::new(Gf::with_limit(p, EXTENSION_LIMIT), pool, npts, seed))
    }
}

fn with_engine<R>(
    guard: &mut Option<EngineState>,
    pool: &InvariantPool,
    attempt: u64,
    mut f: impl FnMut(&mut dyn SolveOps) -> std::result::Result<R, Saturated>,
) -> Result<R> {
    loop {
        if guard.is_none() {
            *guard = Some(new_engine_state(pool, INITIAL_POINTS, attempt));
        }
        let state = guard.as_mut().unwrap();
        let ops: &mut dyn SolveOps = match state {
            EngineState::Zq(e) => e,
            EngineState::Gf(e) => e,
        };
        match f(ops) {
            Ok(r) => return Ok(r),
            Err(Saturated) => {
                let (npts, seed) = (ops.points() * 2, ops.seed());
                if npts > MAX_POINTS {
                    return Err(Error::Unresolved("evaluation needs more points than allowed".into()));
                }
                *guard = Some(new_engine_state(pool, npts, seed));
            }
        }
    }
}

struct Saturated;

trait SolveOps {
    fn solve(&mut self, pool: &InvariantPool, t: &MultiDegree, target: &Spec) -> std::result::Result<Outcome, Saturated>;
    fn basis(&mut self, pool: &InvariantPool, t: &MultiDegree) -> std::result::Result<Vec<Product>, Saturated>;
    /// Is the target outside the span of all listed products? `None` when
    /// the points do not suffice.
    fn outside_full_span(
        &mut self,
        pool: &InvariantPool,
        products: &[Product],
        target: &Spec,
    ) -> std::result::Result<(bool, usize), Saturated>;
    fn points(&self) -> usize;
    fn seed(&self) -> u64;
}

struct Row {
    pivot: usize,
    v: Vec<u64>,
    combo: Vec<u64>,
}

struct Component {
    /// products spanning `D_t`, independent on the points
    basis: Vec<Product>,
    basis_ev: Vec<Arc<Vec<u64>>>,
    rows: Vec<Row>,
    /// items independent modulo `D_t`
    gens: Vec<u32>,
}

struct Engine<F: EvalField> {
    ef: F,
    npts: usize,
    seed: u64,
    /// `points[p][k]` is matrix `k` at point `p`, row-major
    points: Vec<Vec<Vec<u64>>>,
    item_ev: FxHashMap<u32, Arc<Vec<u64>>>,
    comps: FxHashMap<MultiDegree, Arc<Component>>,
}

impl<F: EvalField> Engine<F> {
    fn new(ef: F, pool: &InvariantPool, npts: usize, seed: u64) -> Self {
        let CaseDesc { kind, n, d, .. } = pool.desc;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ (seed << 16) ^ npts as u64);
        let points = (0..npts)
            .map(|_| (0..d).map(|_| random_matrix(&ef, kind, n, &mut rng)).collect())
            .collect();
        Engine { ef, npts, seed, points, item_ev: FxHashMap::default(), comps: FxHashMap::default() }
    }

    fn expr_ev(&self, n: usize, e: &InvariantExpr) -> Vec<u64> {
        let t = e.t(n);
        self.points.iter().map(|pt| sigma_at(&self.ef, &word_at(&self.ef, n, &e.word, pt), n, t)).collect()
    }

    fn item(&mut self, pool: &InvariantPool, i: u32) -> Arc<Vec<u64>> {
        if let Some(v) = self.item_ev.get(&i) {
            return v.clone();
        }
        let v = Arc::new(self.expr_ev(pool.desc.n, &pool.items[i as usize].expr));
        self.item_ev.insert(i, v.clone());
        v
    }

    fn product_ev(&mut self, pool: &InvariantPool, p: &Product) -> Vec<u64> {
        let mut acc = self.item(pool, p[0]).as_ref().clone();
        for &i in &p[1..] {
            let v = self.item(pool, i);
            for (a, b) in acc.iter_mut().zip(v.iter()) {
                *a = self.ef.mul(*a, *b);
            }
        }
        acc
    }

    fn target_ev(&mut self, pool: &InvariantPool, target: &Spec) -> Vec<u64> {
        let target = match target {
            Spec::Linear(t) => *t,
            Spec::Product(p) => return self.product_ev(pool, p),
        };
        let mut acc = vec![self.ef.zero(); self.npts];
        for (c, e) in &target.terms {
            let v = self.expr_ev(pool.desc.n, e);
            let c = self.ef.from_i64(*c);
            for (a, b) in acc.iter_mut().zip(&v) {
                *a = self.ef.mul_add(*a, c, *b);
            }
        }
        acc
    }

    /// Reduce `v` against `rows`, returning the multipliers used.
    fn reduce(&self, rows: &[Row], v: &mut [u64]) -> Vec<(usize, u64)> {
        let mut mult = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            let c = v[row.pivot];
            if c != 0 && !self.ef.is_zero(c) {
                self.ef.sub_mul_assign(&mut v[row.pivot..], c, &row.v[row.pivot..]);
                mult.push((r, c));
            }
        }
        mult
    }

    fn pivot_of(&self, v: &[u64]) -> Option<usize> {
        v.iter().position(|&x| !self.ef.is_zero(x))
    }

    fn component(&mut self, pool: &InvariantPool, t: &MultiDegree) -> std::result::Result<Arc<Component>, Saturated> {
        if let Some(c) = self.comps.get(t) {
            return Ok(c.clone());
        }
        let mut lower: Vec<MultiDegree> = t.lower_set().into_iter().filter(|s| !s.is_zero() && s != t).collect();
        lower.sort_by_key(|s| (s.degree(), s.clone()));
        let mut parts = Vec::with_capacity(lower.len());
        for s in &lower {
            let rest = t.checked_sub(s).unwrap();
            let cs = self.component(pool, s)?;
            let cr = self.component(pool, &rest)?;
            parts.push((cs, cr));
        }
        let mut seen: FxHashSet<Product> = FxHashSet::default();
        let mut comp = Component { basis: Vec::new(), basis_ev: Vec::new(), rows: Vec::new(), gens: Vec::new() };
        for (cs, cr) in &parts {
            for &g in &cs.gens {
                let gev = self.item(pool, g);
                // basis of I_{t-s}: products of D_{t-s} followed by its generators
                let others = cr
                    .basis
                    .iter()
                    .cloned()
                    .zip(cr.basis_ev.iter().cloned())
                    .chain(cr.gens.iter().map(|&h| (Product::from_slice(&[h]), self.item(pool, h))));
                let others: Vec<_> = others.collect();
                for (b, bev) in others {
                    let mut prod = b.clone();
                    prod.push(g);
                    prod.sort_unstable();
                    if !seen.insert(prod.clone()) {
                        continue;
                    }
                    let mut v: Vec<u64> = gev.iter().zip(bev.iter()).map(|(x, y)| self.ef.mul(*x, *y)).collect();
                    let ev = v.clone();
                    let mult = self.reduce(&comp.rows, &mut v);
                    if let Some(piv) = self.pivot_of(&v) {
                        self.insert_row(&mut comp, prod, ev, v, piv, &mult);
                        if comp.rows.len() + MARGIN >= self.npts {
                            return Err(Saturated);
                        }
                    }
                }
            }
        }
        // generators at t
        let mut ext: Vec<(usize, Vec<u64>)> = Vec::new();
        for i in 0..pool.items.len() as u32 {
            if pool.items[i as usize].mdeg != *t {
                continue;
            }
            let mut v = self.item(pool, i).as_ref().clone();
            self.reduce(&comp.rows, &mut v);
            for (piv, row) in &ext {
                let c = v[*piv];
                if !self.ef.is_zero(c) {
                    self.ef.sub_mul_assign(&mut v, c, row);
                }
            }
            if let Some(piv) = self.pivot_of(&v) {
                let inv = self.ef.inv(v[piv]);
                for x in v.iter_mut() {
                    *x = self.ef.mul(*x, inv);
                }
                ext.push((piv, v));
                comp.gens.push(i);
                if comp.rows.len() + ext.len() + MARGIN >= self.npts {
                    return Err(Saturated);
                }
            }
        }
        let comp = Arc::new(comp);
        self.comps.insert(t.clone(), comp.clone());
        Ok(comp)
    }

    fn insert_row(&self, comp: &mut Component, prod: Product, ev: Vec<u64>, mut v: Vec<u64>, piv: usize, mult: &[(usize, u64)]) {
        let idx = comp.basis.len();
        let mut combo = vec![self.ef.zero(); idx + 1];
        combo[idx] = self.ef.one();
        for &(r, c) in mult {
            let rc = &comp.rows[r].combo;
            self.ef.sub_mul_assign(&mut combo[..rc.len()], c, rc);
        }
        let inv = self.ef.inv(v[piv]);
        for x in v.iter_mut() {
            *x = self.ef.mul(*x, inv);
        }
        for x in combo.iter_mut() {
            *x = self.ef.mul(*x, inv);
        }
        comp.rows.push(Row { pivot: piv, v, combo });
        comp.basis.push(prod);
        comp.basis_ev.push(Arc::new(ev));
    }
}

impl<F: EvalField + LiftField> SolveOps for Engine<F> {
    fn solve(&mut self, pool: &InvariantPool, t: &MultiDegree, target: &Spec) -> std::result::Result<Outcome, Saturated> {
        let comp = self.component(pool, t)?;
        let mut w = self.target_ev(pool, target);
        let mult = self.reduce(&comp.rows, &mut w);
        if self.pivot_of(&w).is_some() {
            return Ok(Outcome::NotInSpan { rank: comp.rows.len() });
        }
        let mut coef = vec![self.ef.zero(); comp.basis.len()];
        for (r, c) in mult {
            let rc = &comp.rows[r].combo;
            // coef += c * combo
            let neg = self.ef.neg(c);
            self.ef.sub_mul_assign(&mut coef[..rc.len()], neg, rc);
        }
        let terms: Vec<(Product, u64)> = comp
            .basis
            .iter()
            .zip(coef)
            .filter(|(_, c)| !self.ef.is_zero(*c))
            .map(|(p, c)| (p.clone(), c))
            .collect();
        Ok(Outcome::InSpan(self.ef.support(terms)))
    }

    fn outside_full_span(
        &mut self,
        pool: &InvariantPool,
        products: &[Product],
        target: &Spec,
    ) -> std::result::Result<(bool, usize), Saturated> {
        let mut rows: Vec<Row> = Vec::new();
        for p in products {
            let mut v = self.product_ev(pool, p);
            self.reduce(&rows, &mut v);
            if let Some(piv) = self.pivot_of(&v) {
                let inv = self.ef.inv(v[piv]);
                for x in v.iter_mut() {
                    *x = self.ef.mul(*x, inv);
                }
                rows.push(Row { pivot: piv, v, combo: Vec::new() });
                if rows.len() + MARGIN >= self.npts {
                    return Err(Saturated);
                }
            }
        }
        let mut w = self.target_ev(pool, target);
        self.reduce(&rows, &mut w);
        Ok((self.pivot_of(&w).is_some(), rows.len()))
    }

    fn points(&self) -> usize {
        self.npts
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn basis(&mut self, pool: &InvariantPool, t: &MultiDegree) -> std::result::Result<Vec<Product>, Saturated> {
        Ok(self.component(pool, t)?.basis.clone())
    }
}

/// Conversion of solved coefficients into base-field data.
trait LiftField {
    fn support(&self, terms: Vec<(Product, u64)>) -> Support;
}

impl LiftField for Zq {
    fn support(&self, terms: Vec<(Product, u64)>) -> Support {
        if self.q == large_primes(1)[0] {
            Support::Mersenne(terms, self.q)
        } else {
            Support::Prime { p: self.q, terms }
        }
    }
}

impl LiftField for Gf {
    fn support(&self, terms: Vec<(Product, u64)>) -> Support {
        let p = self.characteristic();
        // a unique solution over GF(p^k) of a system defined over F_p lies in F_p;
        // anything else marks a spurious dependency and fails verification
        let terms = terms.into_iter().map(|(pr, c)| (pr, self.to_prime(c).unwrap_or(u64::MAX))).collect();
        Support::Prime { p, terms }
    }
}

fn random_matrix<F: EvalField>(ef: &F, kind: MatrixKind, n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut m = vec![ef.zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            match kind {
                MatrixKind::General => m[i * n + j] = ef.random(rng),
                MatrixKind::Symmetric if i >= j => {
                    let x = ef.random(rng);
                    m[i * n + j] = x;
                    m[j * n + i] = x;
                }
                MatrixKind::SkewSymmetric if i > j => {
                    let x = ef.random(rng);
                    m[i * n + j] = x;
                    m[j * n + i] = ef.neg(x);
                }
                _ => {}
            }
        }
    }
    m
}

fn transpose(m: &[u64], n: usize) -> Vec<u64> {
    let mut out = m.to_vec();
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = m[j * n + i];
        }
    }
    out
}

fn mat_mul<F: EvalField>(ef: &F, a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
    let mut out = vec![ef.zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if ef.is_zero(x) {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = ef.mul_add(out[i * n + j], x, b[k * n + j]);
            }
        }
    }
    out
}

fn word_at<F: EvalField>(ef: &F, n: usize, w: &Word, pt: &[Vec<u64>]) -> Vec<u64> {
    let pick = |pos: usize| {
        let l = w.letters()[pos];
        let m = &pt[l.k - 1];
        if l.transpose {
            transpose(m, n)
        } else {
            m.clone()
        }
    };
    let mut acc = pick(0);
    for pos in 1..w.len() {
        acc = mat_mul(ef, &acc, &pick(pos), n);
    }
    acc
}

/// `sigma_t` by the same division-free principal-minor expansion as
/// [`Matrix::sigma`].
fn sigma_at<F: EvalField>(ef: &F, m: &[u64], n: usize, t: usize) -> u64 {
    let mut acc = ef.zero();
    for mask in 0usize..(1 << n) {
        if mask.count_ones() as usize != t {
            continue;
        }
        let rows: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut dp = vec![ef.zero(); 1 << t];
        dp[0] = ef.one();
        for sub in 1usize..(1 << t) {
            let r = sub.count_ones() as usize - 1;
            let mut a = ef.zero();
            for c in 0..t {
                if sub & (1 << c) == 0 {
                    continue;
                }
                let term = ef.mul(m[rows[r] * n + rows[c]], dp[sub ^ (1 << c)]);
                let above = (sub >> (c + 1)).count_ones();
                a = if above % 2 == 0 { ef.add(a, term) } else { ef.sub(a, term) };
            }
            dp[sub] = a;
        }
        acc = ef.add(acc, dp[(1 << t) - 1]);
    }
    acc
}

/// Rational number with numerator and denominator bounded by `sqrt(m/2)`
/// congruent to `a` mod `m`.
pub(crate) fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound {
        return None;
    }
    let r = BigRational::new(r1, s1);
    // must reduce back to a
    let check = (r.numer() - a * r.denom()).mod_floor(m);
    check.is_zero().then_some(r)
}

/// Lift the solved coefficients to the base field and check the identity on
/// exact expansions. Returns `None` if no lift verifies.
fn lift_and_verify(
    pool: &InvariantPool,
    lin: &Spec,
    target: &FastPoly,
    support: &Support,
) -> Result<Option<Vec<(Product, Scalar)>>> {
    let field = pool.desc.field;
    match support {
        Support::Prime { p, terms } => {
            if terms.iter().any(|(_, c)| *c == u64::MAX) {
                return Ok(None);
            }
            let m = *p as i128;
            let ints: Vec<(Product, i128)> = terms.iter().map(|(pr, c)| (pr.clone(), *c as i128)).collect();
            if !verify_integer(pool, target, 1, &ints, m)? {
                return Ok(None);
            }
            Ok(Some(terms.iter().map(|(pr, c)| (pr.clone(), field.from_i64(*c as i64))).collect()))
        }
        Support::Mersenne(terms, q) => {
            let products: Vec<Product> = terms.iter().map(|(p, _)| p.clone()).collect();
            let mut residues: Vec<Vec<u64>> = terms.iter().map(|(_, c)| vec![*c]).collect();
            let mut moduli = vec![*q];
            for extra in 0..6 {
                if let Some(rats) = reconstruct(&residues, &moduli) {
                    let denom = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
                    let ints: Option<Vec<(Product, i128)>> = products
                        .iter()
                        .zip(&rats)
                        .map(|(p, r)| (r.numer() * (&denom / r.denom())).to_i128().map(|c| (p.clone(), c)))
                        .collect();
                    if let (Some(ints), Some(dn)) = (ints, denom.to_i128()) {
                        if verify_integer(pool, target, dn, &ints, 0)? {
                            let out = products
                                .iter()
                                .zip(rats)
                                .map(|(p, r)| Ok((p.clone(), field.from_rational(&r)?)))
                                .collect::<Result<Vec<_>>>()?;
                            return Ok(Some(out));
                        }
                    }
                }
                // another prime, solving for the same products only
                let prime = large_primes(extra + 2)[extra + 1];
                match solve_on_support(pool, &products, lin, prime) {
                    Some(sol) => {
                        for (res, s) in residues.iter_mut().zip(sol) {
                            res.push(s);
                        }
                        moduli.push(prime);
                    }
                    None => return Ok(None),
                }
            }
            Ok(None)
        }
    }
}

fn reconstruct(residues: &[Vec<u64>], moduli: &[u64]) -> Option<Vec<BigRational>> {
    let m: BigInt = moduli.iter().fold(BigInt::one(), |acc, &q| acc * q);
    residues
        .iter()
        .map(|rs| {
            let mut acc = BigInt::zero();
            let mut modulus = BigInt::one();
            for (&r, &q) in rs.iter().zip(moduli) {
                let qb = BigInt::from(q);
                let cur = acc.mod_floor(&qb).to_u64().unwrap();
                let diff = (r as i128 - cur as i128).rem_euclid(q as i128) as u64;
                let inv = inv_mod((&modulus % &qb).to_u64().unwrap(), q)?;
                acc += &modulus * mul_mod(diff, inv, q);
                modulus *= qb;
            }
            rational_reconstruction(&acc, &m)
        })
        .collect()
}

/// Coefficients of `target` over the given products modulo `prime`, from a
/// fresh set of points.
fn solve_on_support(pool: &InvariantPool, products: &[Product], target: &Spec, prime: u64) -> Option<Vec<u64>> {
    let mut npts = products.len() + 2 * MARGIN;
    for seed in 0..3 {
        let mut eng = Engine::new(Zq::new(prime), pool, npts, 0x100 + seed);
        let mut comp = Component { basis: Vec::new(), basis_ev: Vec::new(), rows: Vec::new(), gens: Vec::new() };
        let mut full = true;
        for p in products {
            let ev = eng.product_ev(pool, p);
            let mut v = ev.clone();
            let mult = eng.reduce(&comp.rows, &mut v);
            match eng.pivot_of(&v) {
                Some(piv) => eng.insert_row(&mut comp, p.clone(), ev, v, piv, &mult),
                None => {
                    full = false;
                    break;
                }
            }
        }
        if !full {
            npts *= 2;
            continue;
        }
        let mut w = eng.target_ev(pool, target);
        let mult = eng.reduce(&comp.rows, &mut w);
        if eng.pivot_of(&w).is_some() {
            return None;
        }
        let mut coef = vec![0u64; products.len()];
        for (r, c) in mult {
            let rc = &comp.rows[r].combo;
            let neg = eng.ef.neg(c);
            eng.ef.sub_mul_assign(&mut coef[..rc.len()], neg, rc);
        }
        return Some(coef);
    }
    None
}

/// Check `scale * target == sum c_j * prod_j` on exact expansions.
fn verify_integer(pool: &InvariantPool, target: &FastPoly, scale: i128, terms: &[(Product, i128)], m: i128) -> Result<bool> {
    let lhs = sum_of_products(pool, terms, m)?;
    let mut diff = target.scale(scale);
    diff.add_scaled(&lhs, -1);
    Ok(diff.is_zero())
}

/// `sum c_j prod_j`, factoring out shared first factors.
fn sum_of_products(pool: &InvariantPool, terms: &[(Product, i128)], m: i128) -> Result<FastPoly> {
    let mut acc = FastPoly::zero(m);
    let mut groups: std::collections::BTreeMap<u32, Vec<(Product, i128)>> = Default::default();
    for (p, c) in terms {
        if p.is_empty() {
            acc.add_scaled(&FastPoly::constant(1, m), *c);
        } else {
            groups.entry(p[0]).or_default().push((Product::from_slice(&p[1..]), *c));
        }
    }
    for (first, rest) in groups {
        let f = pool.item_exact(first)?;
        let inner = sum_of_products(pool, &rest, m)?;
        acc.add_scaled(&f.mul(&inner), 1);
    }
    Ok(acc)
}

enum Confirmed {
    Outside { products: usize, rank: usize, how: Confirmation },
    Inside,
    Unconfirmed,
}

fn confirm(
    pool: &InvariantPool,
    t: &MultiDegree,
    lin: &Spec,
    target: &FastPoly,
    guard: &mut Option<EngineState>,
) -> Result<Confirmed> {
    let products = pool.products_of_multidegree(t);
    if products.len() > ENUMERATION_LIMIT {
        return Ok(Confirmed::Unconfirmed);
    }
    if pool.desc.field.characteristic() == 0 {
        return exact_elimination(pool, &products, target);
    }
    let (outside, rank) = with_engine(guard, pool, 0, |eng| eng.outside_full_span(pool, &products, lin))?;
    Ok(if outside {
        Confirmed::Outside { products: products.len(), rank, how: Confirmation::Evaluation }
    } else {
        Confirmed::Inside
    })
}

type SparseRow = Vec<(u128, BigInt)>;

/// Fraction-free elimination on exact integer coefficient vectors, rows keyed
/// by their leading monomial, contents stripped after every step.
fn exact_elimination(pool: &InvariantPool, products: &[Product], target: &FastPoly) -> Result<Confirmed> {
    let mut pivots: FxHashMap<u128, SparseRow> = FxHashMap::default();
    let to_row = |p: &FastPoly| -> SparseRow {
        let mut r: SparseRow = p.terms.iter().map(|(&m, &c)| (m, BigInt::from(c))).collect();
        r.sort_by(|a, b| b.0.cmp(&a.0));
        r
    };
    for p in products {
        let terms = [(p.clone(), 1i128)];
        let row = to_row(&sum_of_products(pool, &terms, 0)?);
        if let Some(r) = reduce_sparse(&pivots, row) {
            pivots.insert(r[0].0, r);
        }
    }
    let rank = pivots.len();
    Ok(match reduce_sparse(&pivots, to_row(target)) {
        Some(_) => Confirmed::Outside { products: products.len(), rank, how: Confirmation::ExactElimination },
        None => Confirmed::Inside,
    })
}

fn reduce_sparse(pivots: &FxHashMap<u128, SparseRow>, mut row: SparseRow) -> Option<SparseRow> {
    loop {
        let (lead, b) = match row.first() {
            None => return None,
            Some((m, c)) => (*m, c.clone()),
        };
        let Some(piv) = pivots.get(&lead) else {
            strip_content(&mut row);
            return Some(row);
        };
        let a = &piv[0].1;
        // row := a*row - b*piv, which cancels the leading term
        let mut out = SparseRow::with_capacity(row.len() + piv.len());
        let (mut i, mut j) = (1, 1);
        while i < row.len() || j < piv.len() {
            let take_row = j >= piv.len() || (i < row.len() && row[i].0 > piv[j].0);
            let take_piv = i >= row.len() || (j < piv.len() && piv[j].0 > row[i].0);
            if take_row {
                out.push((row[i].0, &row[i].1 * a));
                i += 1;
            } else if take_piv {
                out.push((piv[j].0, -(&piv[j].1 * &b)));
                j += 1;
            } else {
                let c = &row[i].1 * a - &piv[j].1 * &b;
                if !c.is_zero() {
                    out.push((row[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        strip_content(&mut out);
        row = out;
    }
}

fn strip_content(row: &mut SparseRow) {
    let g = row.iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for (_, c) in row.iter_mut() {
            *c /= &g;
        }
    }
}
