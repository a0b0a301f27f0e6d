//! Morphisms of relative sites: the fiber functors `A_c`, the global functor
//! `A_C`, the cofinality conditions, relative local filteredness, the
//! fiberwise check, diagonal denseness and the aggregate verdict.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::{Arr, FinCategory, Obj};
use crate::comma::CommaCategory;
use crate::functor::{FinFunctor, NatError, NatTransform};
use crate::oracle::{build_phi_tilde, is_locally_injective, is_locally_surjective};
use crate::sitecheck::{
    check_comorphism, check_cover_preserving, check_site_morphism, contains_cover, filtering_f3, solution_sieve,
    FilteringWitness, SieveWitness, SiteMorphismReport, SitePair,
};
use crate::topology::{CommaVariant, Sieve, Topology};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelativeError {
    #[error("{0}")]
    Mismatch(String),
    #[error("`{which}` is not a comorphism of sites: cover {witness:?} is not refined")]
    NotComorphism { which: &'static str, witness: SieveWitness },
    #[error("comparison transformation: {0}")]
    Phi(#[from] NatError),
}

fn same(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// `p: (D, K) → (C, J)`, `p': (D', K') → (C, J)`, `A: D → D'` and
/// `phi: p'∘A ⇒ p`.
#[derive(Debug, Clone)]
pub struct RelativeProblem {
    base: SitePair,
    left: SitePair,
    p: FinFunctor,
    right: SitePair,
    p_prime: FinFunctor,
    a: FinFunctor,
    phi: NatTransform,
}

impl RelativeProblem {
    pub fn new(
        base: SitePair,
        left: SitePair,
        p: FinFunctor,
        right: SitePair,
        p_prime: FinFunctor,
        a: FinFunctor,
        phi: NatTransform,
    ) -> Result<Self, RelativeError> {
        let mismatch = |m: &str| Err(RelativeError::Mismatch(m.into()));
        if !same(p.source(), left.category()) || !same(p.target(), base.category()) {
            return mismatch("p must go from the left site to the base");
        }
        if !same(p_prime.source(), right.category()) || !same(p_prime.target(), base.category()) {
            return mismatch("p' must go from the right site to the base");
        }
        if !same(a.source(), left.category()) || !same(a.target(), right.category()) {
            return mismatch("A must go from the left site to the right site");
        }
        for (f, name) in [(&p, "p"), (&p_prime, "p'"), (&a, "A")] {
            if f.validate().is_err() {
                return Err(RelativeError::Mismatch(format!("`{name}` is not a functor")));
            }
        }
        let pa = a.then(&p_prime).expect("endpoints checked");
        let (ps, pt) = (phi.source(), phi.target());
        if ps.object_map() != pa.object_map()
            || ps.arrow_map() != pa.arrow_map()
            || pt.object_map() != p.object_map()
            || pt.arrow_map() != p.arrow_map()
            || !same(ps.source(), left.category())
            || !same(ps.target(), base.category())
        {
            return mismatch("phi must go from p'∘A to p");
        }
        phi.validate()?;
        if let Some(witness) = check_comorphism(&p, left.topology(), base.topology()).witness {
            return Err(RelativeError::NotComorphism { which: "p", witness });
        }
        if let Some(witness) = check_comorphism(&p_prime, right.topology(), base.topology()).witness {
            return Err(RelativeError::NotComorphism { which: "p'", witness });
        }
        Ok(Self {
            base,
            left,
            p,
            right,
            p_prime,
            a,
            phi,
        })
    }

    /// The problem `(id, id)` over `p: (D, K) → (C, J)`.
    pub fn identity(base: SitePair, left: SitePair, p: FinFunctor) -> Result<Self, RelativeError> {
        let a = FinFunctor::identity(left.category().clone());
        let pa = a.then(&p).expect("endomorphism");
        let phi = NatTransform::new(pa, p.clone(), p.source().object_ids().map(|d| p.target().identity(p.on_object(d))).collect())?;
        Self::new(base, left.clone(), p.clone(), left, p, a, phi)
    }

    pub fn base(&self) -> &SitePair {
        &self.base
    }

    pub fn left(&self) -> &SitePair {
        &self.left
    }

    pub fn right(&self) -> &SitePair {
        &self.right
    }

    pub fn p(&self) -> &FinFunctor {
        &self.p
    }

    pub fn p_prime(&self) -> &FinFunctor {
        &self.p_prime
    }

    pub fn a(&self) -> &FinFunctor {
        &self.a
    }

    pub fn phi(&self) -> &NatTransform {
        &self.phi
    }

    fn c(&self) -> &FinCategory {
        self.base.category()
    }

    /// `u ∘ φ_d ∘ p'(h)` for `h: x → A(d)`, `u: p(d) → c`.
    pub(crate) fn index_of(&self, d: Obj, h: Arr, u: Arr) -> Arr {
        let c = self.c();
        c.compose(u, c.compose(self.phi.component(d), self.p_prime.on_arrow(h)))
    }
}

/// `A_c: (p ↓ c) → (p' ↓ c)` with both commas.
#[derive(Debug, Clone)]
pub struct FiberFunctor {
    pub source: CommaCategory,
    pub target: CommaCategory,
    pub functor: FinFunctor,
}

/// `(d, v) ↦ (A(d), v∘φ_d)`, `m ↦ A(m)`.
pub fn fiber_functor(prob: &RelativeProblem, c: Obj) -> FiberFunctor {
    let source = CommaCategory::over_object(&prob.p, c).expect("object of the base");
    let target = CommaCategory::over_object(&prob.p_prime, c).expect("object of the base");
    let base = prob.c();
    let objects: Vec<Obj> = source
        .objects()
        .iter()
        .map(|o| {
            let d = o.left;
            let u = base.compose(o.arrow, prob.phi.component(d));
            target.find(prob.a.on_object(d), o.right, u).expect("image object")
        })
        .collect();
    let arrows = source
        .carrier()
        .arrow_ids()
        .map(|m| {
            let t = source.arrow(m);
            let car = source.carrier();
            target
                .find_arrow(objects[car.src(m).index()], objects[car.dst(m).index()], prob.a.on_arrow(t.left), t.right)
                .expect("image arrow")
        })
        .collect();
    let functor =
        FinFunctor::new(source.carrier().clone(), target.carrier().clone(), objects, arrows).expect("fiber functor");
    debug_assert!(functor.validate().is_ok());
    FiberFunctor {
        source,
        target,
        functor,
    }
}

/// `A_C: (p ↓ 1_C) → (p' ↓ 1_C)` with both commas.
#[derive(Debug, Clone)]
pub struct GlobalFunctor {
    pub source: CommaCategory,
    pub target: CommaCategory,
    pub functor: FinFunctor,
}

/// `(d, c, u) ↦ (A(d), c, u∘φ_d)`, `(m, n) ↦ (A(m), n)`.
pub fn global_functor(prob: &RelativeProblem) -> GlobalFunctor {
    let source = CommaCategory::over_identity(&prob.p);
    let target = CommaCategory::over_identity(&prob.p_prime);
    let base = prob.c();
    let objects: Vec<Obj> = source
        .objects()
        .iter()
        .map(|o| {
            let u = base.compose(o.arrow, prob.phi.component(o.left));
            target.find(prob.a.on_object(o.left), o.right, u).expect("image object")
        })
        .collect();
    let car = source.carrier();
    let arrows = car
        .arrow_ids()
        .map(|m| {
            let t = source.arrow(m);
            target
                .find_arrow(objects[car.src(m).index()], objects[car.dst(m).index()], prob.a.on_arrow(t.left), t.right)
                .expect("image arrow")
        })
        .collect();
    let functor = FinFunctor::new(car.clone(), target.carrier().clone(), objects, arrows).expect("global functor");
    debug_assert!(functor.validate().is_ok());
    GlobalFunctor {
        source,
        target,
        functor,
    }
}

/// An element `(d, v: x → A(d), u: p(d) → c)` of the source of the comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedElement {
    pub object: String,
    pub arrow: String,
    pub index: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CofinalityWitness {
    /// `u: p'(d') → c` is not locally reached.
    Surjectivity { base: String, object: String, arrow: String },
    /// Two elements over `d'` with the same image are not locally connected.
    Injectivity {
        base: String,
        object: String,
        first: IndexedElement,
        second: IndexedElement,
    },
}

/// For each `e` in `D'`, the arrows `u_i ∘ φ_k ∘ p'(v)` from `p'(e)` to `c`.
fn reached_indices(prob: &RelativeProblem, c: Obj) -> Vec<HashSet<Arr>> {
    let (d, d2, base) = (prob.left.category(), prob.right.category(), prob.c());
    d2.object_ids()
        .map(|e| {
            let mut out = HashSet::new();
            for k in d.object_ids() {
                for &u in base.hom(prob.p.on_object(k), c) {
                    for &v in d2.hom(e, prob.a.on_object(k)) {
                        out.insert(prob.index_of(k, v, u));
                    }
                }
            }
            out
        })
        .collect()
}

/// The local-surjectivity half: every `u: p'(d') → c` is reached on a cover.
/// Shared by the cofinality check and relative condition (a).
fn local_surjectivity(prob: &RelativeProblem, c: Obj) -> Option<(Obj, Arr)> {
    let (d2, base) = (prob.right.category(), prob.c());
    let k2 = prob.right.topology();
    let reached = reached_indices(prob, c);
    for x in d2.object_ids() {
        for &u in base.hom(prob.p_prime.on_object(x), c) {
            let sol = solution_sieve(d2, x, |f| {
                reached[d2.src(f).index()].contains(&base.compose(u, prob.p_prime.on_arrow(f)))
            });
            if !contains_cover(k2, &sol) {
                return Some((x, u));
            }
        }
    }
    None
}

/// Cofinality: local surjectivity and local injectivity of the
/// comparison between colimits, for every base object.
pub fn check_cofinality(prob: &RelativeProblem) -> Verdict<CofinalityWitness> {
    let (d, d2, base) = (prob.left.category(), prob.right.category(), prob.c());
    let k2 = prob.right.topology();
    for c in base.object_ids() {
        if let Some((x, u)) = local_surjectivity(prob, c) {
            return Verdict::fail(CofinalityWitness::Surjectivity {
                base: base.object_name(c).into(),
                object: d2.object_name(x).into(),
                arrow: base.arrow_name(u).into(),
            });
        }
        let over = CommaCategory::over_object(&prob.p, c).expect("object of the base");
        let diagram = over.left_projection().then(&prob.a).expect("composable");
        // component labels of (e ↓ A∘π_c) for each e
        let mut comps: Vec<Option<(CommaCategory, Vec<usize>)>> = vec![None; d2.object_count()];
        let mut component = |e: Obj, k: Obj, w: Arr, h: Arr| -> usize {
            let slot = comps[e.index()].get_or_insert_with(|| {
                let comma = CommaCategory::from_object(e, &diagram).expect("object of D'");
                let labels = comma.carrier().component_labels();
                (comma, labels)
            });
            let row = over.find(k, Obj(0), w).expect("object of (p ↓ c)");
            let o = slot.0.find(Obj(0), row, h).expect("object of the arrow comma");
            slot.1[o.index()]
        };
        for x in d2.object_ids() {
            let mut elements = Vec::new();
            for k in d.object_ids() {
                for &w in base.hom(prob.p.on_object(k), c) {
                    for &v in d2.hom(x, prob.a.on_object(k)) {
                        elements.push((k, v, w, prob.index_of(k, v, w)));
                    }
                }
            }
            for (i, &(k1, v1, w1, img1)) in elements.iter().enumerate() {
                for &(k2o, v2, w2, img2) in &elements[i + 1..] {
                    if img1 != img2 {
                        continue;
                    }
                    let mut members = FixedBitSet::with_capacity(d2.arrow_count());
                    for &f in d2.incoming(x) {
                        let e = d2.src(f);
                        if component(e, k1, w1, d2.compose(v1, f)) == component(e, k2o, w2, d2.compose(v2, f)) {
                            members.insert(f.index());
                        }
                    }
                    let sol = Sieve::from_members(x, members);
                    if !contains_cover(k2, &sol) {
                        let el = |k: Obj, v: Arr, w: Arr| IndexedElement {
                            object: d.object_name(k).into(),
                            arrow: d2.arrow_name(v).into(),
                            index: base.arrow_name(w).into(),
                        };
                        return Verdict::fail(CofinalityWitness::Injectivity {
                            base: base.object_name(c).into(),
                            object: d2.object_name(x).into(),
                            first: el(k1, v1, w1),
                            second: el(k2o, v2, w2),
                        });
                    }
                }
            }
        }
    }
    Verdict::pass()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelativeFilterWitness {
    /// `chi: p'(d') → c` admits no local lift.
    A { base: String, object: String, chi: String },
    /// The indexed pair `(h1, u)`, `(h2, v)` over `d'` is not locally joined.
    B {
        base: String,
        object: String,
        h1: String,
        h2: String,
        u: String,
        v: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeFilteredReport {
    pub a: Verdict<RelativeFilterWitness>,
    pub b: Verdict<RelativeFilterWitness>,
    pub c: Verdict<FilteringWitness>,
    pub d: Verdict<SieveWitness>,
}

impl RelativeFilteredReport {
    pub fn holds(&self) -> bool {
        self.a.holds() && self.b.holds() && self.c.holds() && self.d.holds()
    }
}

/// Relative local filteredness (a), (b), the absolute equalizer condition (c)
/// and cover preservation (d).
pub fn check_relative_filtered(prob: &RelativeProblem) -> RelativeFilteredReport {
    RelativeFilteredReport {
        a: relative_a(prob),
        b: relative_b(prob),
        c: filtering_f3(&prob.a, prob.right.topology()),
        d: check_cover_preserving(&prob.a, prob.left.topology(), prob.right.topology()),
    }
}

/// Condition (a) alone.
pub fn relative_a(prob: &RelativeProblem) -> Verdict<RelativeFilterWitness> {
    let (d2, base) = (prob.right.category(), prob.c());
    for c in base.object_ids() {
        if let Some((x, chi)) = local_surjectivity(prob, c) {
            return Verdict::fail(RelativeFilterWitness::A {
                base: base.object_name(c).into(),
                object: d2.object_name(x).into(),
                chi: base.arrow_name(chi).into(),
            });
        }
    }
    Verdict::pass()
}

/// Condition (a) at a single base object.
pub fn relative_a_at(prob: &RelativeProblem, c: Obj) -> bool {
    local_surjectivity(prob, c).is_none()
}

fn relative_b(prob: &RelativeProblem) -> Verdict<RelativeFilterWitness> {
    let (d, d2, base) = (prob.left.category(), prob.right.category(), prob.c());
    let (a, p) = (&prob.a, &prob.p);
    let k2 = prob.right.topology();
    for c in base.object_ids() {
        for d1 in d.object_ids() {
            for &h1 in base.hom(p.on_object(d1), c) {
                for dd2 in d.object_ids() {
                    for &h2 in base.hom(p.on_object(dd2), c) {
                        // (A(s)∘γ, A(t)∘γ) over spans with h1∘p(s) = h2∘p(t)
                        let mut cones: HashSet<(Arr, Arr)> = HashSet::new();
                        for di in d.object_ids() {
                            for &s in d.hom(di, d1) {
                                for &t in d.hom(di, dd2) {
                                    if base.compose(h1, p.on_arrow(s)) != base.compose(h2, p.on_arrow(t)) {
                                        continue;
                                    }
                                    let (as_, at) = (a.on_arrow(s), a.on_arrow(t));
                                    for &g in d2.incoming(a.on_object(di)) {
                                        cones.insert((d2.compose(as_, g), d2.compose(at, g)));
                                    }
                                }
                            }
                        }
                        for x in d2.object_ids() {
                            for &u in d2.hom(x, a.on_object(d1)) {
                                for &v in d2.hom(x, a.on_object(dd2)) {
                                    if prob.index_of(d1, u, h1) != prob.index_of(dd2, v, h2) {
                                        continue;
                                    }
                                    let sol = solution_sieve(d2, x, |g| {
                                        cones.contains(&(d2.compose(u, g), d2.compose(v, g)))
                                    });
                                    if !contains_cover(k2, &sol) {
                                        return Verdict::fail(RelativeFilterWitness::B {
                                            base: base.object_name(c).into(),
                                            object: d2.object_name(x).into(),
                                            h1: base.arrow_name(h1).into(),
                                            h2: base.arrow_name(h2).into(),
                                            u: d2.arrow_name(u).into(),
                                            v: d2.arrow_name(v).into(),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Verdict::pass()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberwiseWitness {
    pub base: String,
    pub report: SiteMorphismReport,
}

/// Every `A_c` is a morphism of sites `((p ↓ c), K_c) → ((p' ↓ c), K'_c)`.
pub fn check_fiberwise(prob: &RelativeProblem) -> Verdict<FiberwiseWitness> {
    let base = prob.c();
    for c in base.object_ids() {
        let report = fiber_site_morphism(prob, c);
        if !report.holds() {
            return Verdict::fail(FiberwiseWitness {
                base: base.object_name(c).into(),
                report,
            });
        }
    }
    Verdict::pass()
}

/// The site-morphism report for `A_c` alone.
pub fn fiber_site_morphism(prob: &RelativeProblem, c: Obj) -> SiteMorphismReport {
    let fib = fiber_functor(prob, c);
    let kc = Topology::comma_giraud(&fib.source, prob.left.topology(), CommaVariant::Fiber).expect("fiber comma");
    let k2c = Topology::comma_giraud(&fib.target, prob.right.topology(), CommaVariant::Fiber).expect("fiber comma");
    check_site_morphism(&fib.functor, &kc, &k2c)
}

/// The comma `(1 ↓ A_C)` over `(p' ↓ 1_C)` with its diagonal objects marked.
///
/// An object is `(χ, ξ, (g, f): χ → A_C(ξ))` with `χ = (d', c', u')` and
/// `ξ = (d, c, u)`; it is diagonal when `f` is an identity.
#[derive(Debug, Clone)]
pub struct DiagonalCategory {
    pub global: GlobalFunctor,
    pub comma: CommaCategory,
    pub diagonal: FixedBitSet,
    /// The two consecutive first projections down to `D'`.
    pub to_right: FinFunctor,
    right_topology: Topology,
}

impl DiagonalCategory {
    pub fn is_diagonal(&self, o: Obj) -> bool {
        self.diagonal.contains(o.index())
    }

    pub fn diagonal_objects(&self) -> impl Iterator<Item = Obj> + '_ {
        self.diagonal.ones().map(|i| Obj(i as u32))
    }

    /// `K̃`: a sieve covers iff the `D'`-components of its members generate a
    /// `K'`-cover.
    pub fn is_covering(&self, s: &Sieve) -> bool {
        let d = self.to_right.on_object(s.base());
        let image = Sieve::generate_unchecked(
            self.to_right.target(),
            d,
            s.arrows().map(|a| self.to_right.on_arrow(a)),
        );
        contains_cover(&self.right_topology, &image)
    }

    /// `K̃` as explicit cover sets (enumerates every sieve of the comma).
    pub fn topology(&self) -> Topology {
        Topology::projection_covering(
            self.comma.carrier().clone(),
            self.to_right.object_map(),
            self.to_right.arrow_map(),
            &self.right_topology,
        )
    }
}

pub fn diagonal_category(prob: &RelativeProblem) -> DiagonalCategory {
    let global = global_functor(prob);
    let id = FinFunctor::identity(global.target.carrier().clone());
    let comma = CommaCategory::new(&id, &global.functor).expect("shared codomain");
    let base = prob.c();
    let mut diagonal = FixedBitSet::with_capacity(comma.objects().len());
    for (i, o) in comma.objects().iter().enumerate() {
        if base.is_identity(global.target.arrow(o.arrow).right) {
            diagonal.insert(i);
        }
    }
    let to_right = comma
        .left_projection()
        .then(global.target.left_projection())
        .expect("composable projections");
    DiagonalCategory {
        global,
        comma,
        diagonal,
        to_right,
        right_topology: prob.right.topology().clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalWitness {
    pub object: String,
}

/// Every comma object is `K̃`-covered by arrows out of diagonal objects.
///
/// Walks the comma objects directly rather than building
/// [`diagonal_category`], whose composition table grows quickly.
pub fn check_diagonal_density(prob: &RelativeProblem) -> Verdict<DiagonalWitness> {
    let global = global_functor(prob);
    let (s_car, t_car) = (global.source.carrier(), global.target.carrier());
    let a = &global.functor;
    let to_right = global.target.left_projection();
    let right = prob.right.category();
    let base = prob.c();

    // (t', s', f': t' → A(s')) with identity base component
    let mut diagonal = Vec::new();
    for t in t_car.object_ids() {
        for s in s_car.object_ids() {
            for &f in t_car.hom(t, a.on_object(s)) {
                if base.is_identity(global.target.arrow(f).right) {
                    diagonal.push((t, s, f));
                }
            }
        }
    }
    for t in t_car.object_ids() {
        for s in s_car.object_ids() {
            for &f in t_car.hom(t, a.on_object(s)) {
                let mut gens = Vec::new();
                for &(t2, s2, f2) in &diagonal {
                    for &m in t_car.hom(t2, t) {
                        let fm = t_car.compose(f, m);
                        for &n in s_car.hom(s2, s) {
                            if t_car.compose(a.on_arrow(n), f2) == fm {
                                gens.push(to_right.on_arrow(m));
                                break;
                            }
                        }
                    }
                }
                let sieve = Sieve::generate_unchecked(right, to_right.on_object(t), gens);
                if !contains_cover(prob.right.topology(), &sieve) {
                    return Verdict::fail(DiagonalWitness {
                        object: format!(
                            "({},{},{})",
                            t_car.object_name(t),
                            s_car.object_name(s),
                            t_car.arrow_name(f)
                        ),
                    });
                }
            }
        }
    }
    Verdict::pass()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleFailure {
    NotLocallySurjective,
    NotLocallyInjective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleWitness {
    pub base: String,
    pub failure: OracleFailure,
    pub object: String,
}

/// The comparison map on each representable is a local isomorphism.
pub fn check_oracle(prob: &RelativeProblem) -> Verdict<OracleWitness> {
    let base = prob.c();
    let k2 = prob.right.topology();
    for c in base.object_ids() {
        let m = build_phi_tilde(prob, c);
        if let Some(object) = is_locally_surjective(&m, k2).witness {
            return Verdict::fail(OracleWitness {
                base: base.object_name(c).into(),
                failure: OracleFailure::NotLocallySurjective,
                object: object.object,
            });
        }
        if let Some(object) = is_locally_injective(&m, k2).witness {
            return Verdict::fail(OracleWitness {
                base: base.object_name(c).into(),
                failure: OracleFailure::NotLocallyInjective,
                object: object.object,
            });
        }
    }
    Verdict::pass()
}

/// All criteria side by side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeVerdict {
    pub site_morphism: bool,
    pub cofinality: Verdict<CofinalityWitness>,
    pub filtered: RelativeFilteredReport,
    pub fiberwise: Verdict<FiberwiseWitness>,
    pub diagonal: Verdict<DiagonalWitness>,
    pub oracle: Option<Verdict<OracleWitness>>,
    pub aggregate: bool,
    pub discrepancy: bool,
    pub disagreements: Vec<String>,
}

/// Criteria that must agree, yet did not.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct DiscrepancyDetected {
    pub verdict: Box<RelativeVerdict>,
}

impl fmt::Display for DiscrepancyDetected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "criteria disagree: {}", self.verdict.disagreements.join("; "))
    }
}

/// Runs every criterion. The oracle must match cofinality and the filtered
/// conditions must match the fiberwise check unconditionally; when `A` is a
/// morphism of sites all criteria must match.
pub fn relative_verdict(prob: &RelativeProblem, include_oracle: bool) -> Result<RelativeVerdict, DiscrepancyDetected> {
    let site_morphism = check_site_morphism(&prob.a, prob.left.topology(), prob.right.topology()).holds();
    let cofinality = check_cofinality(prob);
    let filtered = check_relative_filtered(prob);
    let fiberwise = check_fiberwise(prob);
    let diagonal = check_diagonal_density(prob);
    let oracle = include_oracle.then(|| check_oracle(prob));

    let mut disagreements = Vec::new();
    let mut expect = |x: bool, y: bool, what: &str| {
        if x != y {
            disagreements.push(format!("{what}: {x} vs {y}"));
        }
    };
    if let Some(o) = &oracle {
        expect(cofinality.holds(), o.holds(), "cofinality vs oracle");
    }
    expect(filtered.holds(), fiberwise.holds(), "filtered vs fiberwise");
    if site_morphism {
        expect(cofinality.holds(), filtered.holds(), "cofinality vs filtered");
        expect(filtered.holds(), diagonal.holds(), "filtered vs diagonal");
    }
    let aggregate = site_morphism
        && cofinality.holds()
        && filtered.holds()
        && fiberwise.holds()
        && diagonal.holds()
        && oracle.as_ref().is_none_or(|o| o.holds());
    let discrepancy = !disagreements.is_empty();
    let verdict = RelativeVerdict {
        site_morphism,
        cofinality,
        filtered,
        fiberwise,
        diagonal,
        oracle,
        aggregate,
        discrepancy,
        disagreements,
    };
    if discrepancy {
        Err(DiscrepancyDetected {
            verdict: Box::new(verdict),
        })
    } else {
        Ok(verdict)
    }
}

pub mod fixtures {
    //! Small named problems over the two-object base `a → b`.

    use super::*;
    use crate::category::CategoryBuilder;

    /// Objects `a`, `b`, one non-identity arrow `f: a → b`.
    pub fn c2() -> FinCategory {
        let mut b = CategoryBuilder::new();
        let a = b.add_object("a");
        let bb = b.add_object("b");
        b.add_identity("id:a", a);
        b.add_identity("id:b", bb);
        b.add_arrow("f", a, bb);
        b.build().expect("C2")
    }

    /// `J1` on C2: maximal sieves plus `{f}` on `b`.
    pub fn j1(cat: Arc<FinCategory>) -> Topology {
        let b = cat.object_by_name("b").expect("b");
        let f = cat.arrow_by_name("f").expect("f");
        Topology::trivial(cat.clone()).with_sieve(&Sieve::generate(&cat, b, &[f]).expect("sieve"))
    }

    fn trivial_site(cat: Arc<FinCategory>) -> SitePair {
        let t = Topology::trivial(cat.clone());
        SitePair::new(cat, t).expect("trivial topology")
    }

    /// `(id, id)` over `id: (C2, J1) → (C2, J1)`.
    pub fn identity_problem() -> RelativeProblem {
        let cat = Arc::new(c2());
        let site = SitePair::new(cat.clone(), j1(cat.clone())).expect("J1");
        RelativeProblem::identity(site.clone(), site, FinFunctor::identity(cat)).expect("identity problem")
    }

    /// `p = A: 1 → C2` at `b`, `p' = id`, `phi = id`, trivial topologies.
    pub fn neg() -> RelativeProblem {
        let cat = Arc::new(c2());
        let one = Arc::new(FinCategory::terminal());
        let b = cat.object_by_name("b").expect("b");
        let p = FinFunctor::new(one.clone(), cat.clone(), vec![b], vec![cat.identity(b)]).expect("point");
        let a = p.clone();
        let p_prime = FinFunctor::identity(cat.clone());
        let pa = a.then(&p_prime).expect("composable");
        let phi = NatTransform::new(pa, p.clone(), vec![cat.identity(b)]).expect("identity");
        RelativeProblem::new(
            trivial_site(cat.clone()),
            trivial_site(one),
            p,
            trivial_site(cat),
            p_prime,
            a,
            phi,
        )
        .expect("NEG")
    }

    /// NEG restricted to the one-object base at `b`: every functor lands in 1.
    pub fn pos() -> RelativeProblem {
        let one = Arc::new(FinCategory::terminal());
        let p = FinFunctor::identity(one.clone());
        let phi = NatTransform::identity(p.clone());
        RelativeProblem::new(
            trivial_site(one.clone()),
            trivial_site(one.clone()),
            p.clone(),
            trivial_site(one),
            p.clone(),
            p,
            phi,
        )
        .expect("POS")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn identity_problem_passes() {
        let prob = identity_problem();
        for c in prob.base().category().object_ids() {
            let fib = fiber_functor(&prob, c);
            assert_eq!(fib.functor.object_map(), (0..fib.source.objects().len() as u32).map(Obj).collect::<Vec<_>>());
        }
        let v = relative_verdict(&prob, true).unwrap();
        assert!(v.aggregate);
        assert!(!v.discrepancy);
    }

    #[test]
    fn neg_fiber_functors() {
        let prob = neg();
        let cat = prob.base().category().clone();
        let (a, b) = (cat.object_by_name("a").unwrap(), cat.object_by_name("b").unwrap());
        let fb = fiber_functor(&prob, b);
        assert_eq!(fb.source.objects().len(), 1);
        let image = fb.functor.on_object(Obj(0));
        assert_eq!(fb.target.carrier().object_name(image), "(b,id:b)");
        let fa = fiber_functor(&prob, a);
        assert_eq!(fa.source.objects().len(), 0);
        assert_eq!(fa.functor.source().arrow_count(), 0);

        let g = global_functor(&prob);
        assert_eq!(g.source.objects().len(), 1);
        assert_eq!(g.target.carrier().object_name(g.functor.on_object(Obj(0))), "(b,b,id:b)");
    }

    #[test]
    fn neg_fails_everywhere() {
        let prob = neg();
        let v = relative_verdict(&prob, true).unwrap();
        assert!(v.site_morphism);
        assert_eq!(
            v.cofinality.witness,
            Some(CofinalityWitness::Surjectivity {
                base: "a".into(),
                object: "a".into(),
                arrow: "id:a".into()
            })
        );
        assert_eq!(
            v.filtered.a.witness,
            Some(RelativeFilterWitness::A {
                base: "a".into(),
                object: "a".into(),
                chi: "id:a".into()
            })
        );
        assert_eq!(v.fiberwise.witness.as_ref().unwrap().base, "a");
        assert!(!v.diagonal.holds());
        assert!(!v.oracle.unwrap().holds());
        assert!(!v.aggregate);
    }

    #[test]
    fn pos_passes_everywhere() {
        let v = relative_verdict(&pos(), true).unwrap();
        assert!(v.aggregate);
        let diag = diagonal_category(&pos());
        assert_eq!(diag.diagonal_objects().count(), 1);
    }

    #[test]
    fn diagonal_objects_match_direct_count() {
        let cat = Arc::new(c2());
        let site = SitePair::new(cat.clone(), Topology::trivial(cat.clone())).unwrap();
        let prob = RelativeProblem::identity(site.clone(), site, FinFunctor::identity(cat.clone())).unwrap();
        let diag = diagonal_category(&prob);
        // (d', d, c, g: d' → A(d), u: p(d) → c)
        let mut direct = 0;
        for d2 in cat.object_ids() {
            for d in cat.object_ids() {
                for c in cat.object_ids() {
                    direct += cat.hom(d2, d).len() * cat.hom(d, c).len();
                }
            }
        }
        assert_eq!(diag.diagonal_objects().count(), direct);
        assert!(diag.topology().validate().is_ok());
        assert!(check_diagonal_density(&prob).holds());
    }

    fn density_via_comma(prob: &RelativeProblem) -> Option<String> {
        let diag = diagonal_category(prob);
        let car = diag.comma.carrier();
        car.object_ids().find_map(|x| {
            let gens = car.incoming(x).iter().copied().filter(|&a| diag.is_diagonal(car.src(a)));
            let s = Sieve::generate_unchecked(car, x, gens);
            (!diag.is_covering(&s)).then(|| car.object_name(x).to_string())
        })
    }

    #[test]
    fn density_agrees_with_materialized_comma() {
        for prob in [neg(), pos(), identity_problem()] {
            let direct = check_diagonal_density(&prob).witness.map(|w| w.object);
            assert_eq!(direct, density_via_comma(&prob));
        }
    }
}
