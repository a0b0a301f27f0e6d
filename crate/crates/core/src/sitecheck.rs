//! Absolute site checks: comorphisms, cover preservation and the filtering
//! conditions of a morphism of sites.

use std::collections::HashSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::{Arr, FinCategory, Obj};
use crate::functor::FinFunctor;
use crate::topology::{Sieve, Topology, TopologyError};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiteError {
    #[error("topology lives on a different category")]
    CarrierMismatch,
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// A category together with a validated topology on it.
#[derive(Debug, Clone)]
pub struct SitePair {
    category: Arc<FinCategory>,
    topology: Topology,
}

impl SitePair {
    pub fn new(category: Arc<FinCategory>, topology: Topology) -> Result<Self, SiteError> {
        if !(Arc::ptr_eq(&category, topology.category()) || *category == **topology.category()) {
            return Err(SiteError::CarrierMismatch);
        }
        topology.validate()?;
        Ok(Self { category, topology })
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }
}

/// A sieve named by its base object and members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveWitness {
    pub object: String,
    pub members: Vec<String>,
}

impl SieveWitness {
    pub fn new(cat: &FinCategory, s: &Sieve) -> Self {
        Self {
            object: cat.object_name(s.base()).into(),
            members: s.names(cat),
        }
    }
}

/// Whether some covering sieve on the base of `s` is contained in `s`.
pub fn contains_cover(top: &Topology, s: &Sieve) -> bool {
    top.is_covering(s) || top.covering(s.base()).any(|t| t.is_subset(s))
}

/// The set of arrows into `c` satisfying `pred`, as a sieve. Callers pass
/// predicates stable under precomposition.
pub(crate) fn solution_sieve(cat: &FinCategory, c: Obj, mut pred: impl FnMut(Arr) -> bool) -> Sieve {
    let mut members = FixedBitSet::with_capacity(cat.arrow_count());
    for &h in cat.incoming(c) {
        if pred(h) {
            members.insert(h.index());
        }
    }
    debug_assert!(Sieve::is_closed(cat, c, &members));
    Sieve::from_members(c, members)
}

/// `p: (D, K) → (C, J)` is a comorphism: every `J`-cover `S` on `p(d)` is
/// refined by some `K`-cover `S'` on `d` with `p(S') ⊆ S`.
pub fn check_comorphism(p: &FinFunctor, k: &Topology, j: &Topology) -> Verdict<SieveWitness> {
    let src = p.source();
    for d in src.object_ids() {
        for s in j.covering(p.on_object(d)) {
            let pre = solution_sieve(src, d, |m| s.contains(p.on_arrow(m)));
            if !contains_cover(k, &pre) {
                return Verdict::fail(SieveWitness::new(p.target(), &s));
            }
        }
    }
    Verdict::pass()
}

/// Every `K`-cover `S` on `d` is sent to a family generating a `K'`-cover on
/// `A(d)`. The witness is the offending source sieve.
pub fn check_cover_preserving(a: &FinFunctor, k: &Topology, k_target: &Topology) -> Verdict<SieveWitness> {
    let src = a.source();
    for d in src.object_ids() {
        for s in k.covering(d) {
            let image = Sieve::generate_unchecked(a.target(), a.on_object(d), s.arrows().map(|m| a.on_arrow(m)));
            if !contains_cover(k_target, &image) {
                return Verdict::fail(SieveWitness::new(src, &s));
            }
        }
    }
    Verdict::pass()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilteringWitness {
    /// No covering family of `object` factors through the image.
    F1 { object: String },
    /// The pair `u: d' → A(d1)`, `v: d' → A(d2)` is not locally joined.
    F2 { object: String, u: String, v: String },
    /// `g` equalizes `A(f1)` and `A(f2)` but is not locally factored through
    /// an equalizing arrow.
    F3 { f1: String, f2: String, g: String },
}

/// The three filtering conditions, each with its own verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteringReport {
    pub f1: Verdict<FilteringWitness>,
    pub f2: Verdict<FilteringWitness>,
    pub f3: Verdict<FilteringWitness>,
}

impl FilteringReport {
    pub fn holds(&self) -> bool {
        self.f1.holds() && self.f2.holds() && self.f3.holds()
    }

    pub fn first_failure(&self) -> Option<&FilteringWitness> {
        self.f1
            .witness
            .as_ref()
            .or(self.f2.witness.as_ref())
            .or(self.f3.witness.as_ref())
    }
}

/// Decides F1, F2 and F3 for `A: D → D'` against `K'`. Each challenge is
/// answered by the sieve of arrows admitting the required data; the condition
/// holds for the challenge iff that sieve contains a `K'`-cover.
pub fn check_filtering(a: &FinFunctor, k_target: &Topology) -> FilteringReport {
    FilteringReport {
        f1: filtering_f1(a, k_target),
        f2: filtering_f2(a, k_target),
        f3: filtering_f3(a, k_target),
    }
}

pub(crate) fn filtering_f1(a: &FinFunctor, k: &Topology) -> Verdict<FilteringWitness> {
    let (src, tgt) = (a.source(), a.target());
    let reaches: Vec<bool> = tgt
        .object_ids()
        .map(|e| src.object_ids().any(|d| !tgt.hom(e, a.on_object(d)).is_empty()))
        .collect();
    for d2 in tgt.object_ids() {
        let sol = solution_sieve(tgt, d2, |h| reaches[tgt.src(h).index()]);
        if !contains_cover(k, &sol) {
            return Verdict::fail(FilteringWitness::F1 {
                object: tgt.object_name(d2).into(),
            });
        }
    }
    Verdict::pass()
}

pub(crate) fn filtering_f2(a: &FinFunctor, k: &Topology) -> Verdict<FilteringWitness> {
    let (src, tgt) = (a.source(), a.target());
    for d1 in src.object_ids() {
        for d2 in src.object_ids() {
            // pairs (A(s)∘γ, A(t)∘γ) realised by some cone over (d1, d2)
            let mut cones: HashSet<(Arr, Arr)> = HashSet::new();
            for d in src.object_ids() {
                let ad = a.on_object(d);
                for &s in src.hom(d, d1) {
                    for &t in src.hom(d, d2) {
                        let (as_, at) = (a.on_arrow(s), a.on_arrow(t));
                        for &g in tgt.incoming(ad) {
                            cones.insert((tgt.compose(as_, g), tgt.compose(at, g)));
                        }
                    }
                }
            }
            let (ad1, ad2) = (a.on_object(d1), a.on_object(d2));
            for e in tgt.object_ids() {
                for &u in tgt.hom(e, ad1) {
                    for &v in tgt.hom(e, ad2) {
                        let sol = solution_sieve(tgt, e, |h| {
                            cones.contains(&(tgt.compose(u, h), tgt.compose(v, h)))
                        });
                        if !contains_cover(k, &sol) {
                            return Verdict::fail(FilteringWitness::F2 {
                                object: tgt.object_name(e).into(),
                                u: tgt.arrow_name(u).into(),
                                v: tgt.arrow_name(v).into(),
                            });
                        }
                    }
                }
            }
        }
    }
    Verdict::pass()
}

pub(crate) fn filtering_f3(a: &FinFunctor, k: &Topology) -> Verdict<FilteringWitness> {
    let (src, tgt) = (a.source(), a.target());
    for d1 in src.object_ids() {
        let ad1 = a.on_object(d1);
        for &f1 in src.outgoing(d1) {
            for &f2 in src.hom(d1, src.dst(f1)) {
                // arrows A(k)∘γ into A(d1) with k equalizing f1, f2
                let mut through: HashSet<Arr> = HashSet::new();
                for &kk in src.incoming(d1) {
                    if src.compose(f1, kk) != src.compose(f2, kk) {
                        continue;
                    }
                    let ak = a.on_arrow(kk);
                    for &g in tgt.incoming(a.on_object(src.src(kk))) {
                        through.insert(tgt.compose(ak, g));
                    }
                }
                let (af1, af2) = (a.on_arrow(f1), a.on_arrow(f2));
                for &g in tgt.incoming(ad1) {
                    if tgt.compose(af1, g) != tgt.compose(af2, g) {
                        continue;
                    }
                    let sol = solution_sieve(tgt, tgt.src(g), |h| through.contains(&tgt.compose(g, h)));
                    if !contains_cover(k, &sol) {
                        return Verdict::fail(FilteringWitness::F3 {
                            f1: src.arrow_name(f1).into(),
                            f2: src.arrow_name(f2).into(),
                            g: tgt.arrow_name(g).into(),
                        });
                    }
                }
            }
        }
    }
    Verdict::pass()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteMorphismReport {
    pub cover_preserving: Verdict<SieveWitness>,
    pub filtering: FilteringReport,
}

impl SiteMorphismReport {
    pub fn holds(&self) -> bool {
        self.cover_preserving.holds() && self.filtering.holds()
    }
}

/// Cover preservation together with F1, F2, F3.
pub fn check_site_morphism(a: &FinFunctor, k: &Topology, k_target: &Topology) -> SiteMorphismReport {
    SiteMorphismReport {
        cover_preserving: check_cover_preserving(a, k, k_target),
        filtering: check_filtering(a, k_target),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::fixtures::c2;
    use crate::topology::fixtures::j1;

    fn point(name: &str) -> FinFunctor {
        let c = Arc::new(c2());
        let o = c.object_by_name(name).unwrap();
        FinFunctor::point(c, o)
    }

    #[test]
    fn identity_passes_everything() {
        let j = j1();
        let id = FinFunctor::identity(j.category().clone());
        assert!(check_comorphism(&id, &j, &j).holds());
        assert!(check_site_morphism(&id, &j, &j).holds());
        let d = Topology::discrete(j.category().clone());
        assert!(check_filtering(&id, &d).holds());
    }

    #[test]
    fn point_at_b_is_not_a_comorphism_into_j1() {
        let p = point("b");
        let k = Topology::trivial(p.source().clone());
        let v = check_comorphism(&p, &k, &j1());
        assert_eq!(
            v.witness,
            Some(SieveWitness {
                object: "b".into(),
                members: vec!["f".into()]
            })
        );
        let triv = Topology::trivial(p.target().clone());
        assert!(check_comorphism(&p, &k, &triv).holds());
    }

    #[test]
    fn identity_into_trivial_is_not_cover_preserving_from_j1() {
        let j = j1();
        let id = FinFunctor::identity(j.category().clone());
        let triv = Topology::trivial(j.category().clone());
        let v = check_cover_preserving(&id, &j, &triv);
        assert_eq!(
            v.witness,
            Some(SieveWitness {
                object: "b".into(),
                members: vec!["f".into()]
            })
        );
        assert!(check_cover_preserving(&id, &triv, &j).holds());
    }

    #[test]
    fn filtering_for_points_of_c2() {
        let pb = point("b");
        let triv = Topology::trivial(pb.target().clone());
        assert!(check_filtering(&pb, &triv).holds());
        let k = Topology::trivial(pb.source().clone());
        assert!(check_site_morphism(&pb, &k, &triv).holds());

        let pa = point("a");
        let r = check_filtering(&pa, &triv);
        assert_eq!(r.f1.witness, Some(FilteringWitness::F1 { object: "b".into() }));
        assert!(!check_site_morphism(&pa, &k, &triv).holds());
    }

    #[test]
    fn empty_sieve_covering_makes_filtering_vacuous() {
        let pa = point("a");
        let disc = Topology::discrete(pa.target().clone());
        assert!(check_filtering(&pa, &disc).holds());
    }
}
