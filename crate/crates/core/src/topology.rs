//! Sieves and Grothendieck topologies on finite categories.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::category::{Arr, FinCategory, Obj};
use crate::comma::{CommaCategory, CommaShape};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("arrow `{arrow}` does not have codomain `{object}`")]
    WrongCodomain { arrow: String, object: String },
    #[error("arrow `{arrow}` does not end at the base of the sieve")]
    EndpointMismatch { arrow: String },
    #[error("set is not closed under precomposition at `{arrow}`")]
    NotClosed { arrow: String },
}

/// A sieve on `base`: a set of arrows into `base` closed under precomposition.
/// Members are stored as a bitset over the category's arrows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    base: Obj,
    members: FixedBitSet,
}

impl Sieve {
    pub fn base(&self) -> Obj {
        self.base
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, a: Arr) -> bool {
        self.members.contains(a.index())
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arr> + '_ {
        self.members.ones().map(|i| Arr(i as u32))
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.base == other.base && self.members.is_subset(&other.members)
    }

    /// Member names in declared order.
    pub fn names(&self, cat: &FinCategory) -> Vec<String> {
        self.arrows().map(|a| cat.arrow_name(a).to_string()).collect()
    }

    /// Wraps a set of arrows that is already known to be a sieve on `base`.
    pub(crate) fn from_members(base: Obj, members: FixedBitSet) -> Self {
        Self { base, members }
    }

    /// The empty sieve on `c`.
    pub fn empty(cat: &FinCategory, c: Obj) -> Self {
        Self {
            base: c,
            members: FixedBitSet::with_capacity(cat.arrow_count()),
        }
    }

    /// The maximal sieve on `c`: every arrow into `c`.
    pub fn maximal(cat: &FinCategory, c: Obj) -> Self {
        let mut members = FixedBitSet::with_capacity(cat.arrow_count());
        for &a in cat.incoming(c) {
            members.insert(a.index());
        }
        Self { base: c, members }
    }

    /// The smallest sieve on `c` containing `generators`.
    pub fn generate(cat: &FinCategory, c: Obj, generators: &[Arr]) -> Result<Self, SieveError> {
        for &g in generators {
            if cat.dst(g) != c {
                return Err(SieveError::WrongCodomain {
                    arrow: cat.arrow_name(g).into(),
                    object: cat.object_name(c).into(),
                });
            }
        }
        Ok(Self::generate_unchecked(cat, c, generators.iter().copied()))
    }

    pub(crate) fn generate_unchecked(cat: &FinCategory, c: Obj, generators: impl IntoIterator<Item = Arr>) -> Self {
        let mut members = FixedBitSet::with_capacity(cat.arrow_count());
        for g in generators {
            debug_assert_eq!(cat.dst(g), c);
            if members.contains(g.index()) {
                continue;
            }
            for &h in cat.incoming(cat.src(g)) {
                members.insert(cat.compose(g, h).index());
            }
        }
        Self { base: c, members }
    }

    /// `h^*S = { g : h∘g ∈ S }` for `h: x → base`.
    pub fn pullback(&self, cat: &FinCategory, h: Arr) -> Result<Self, SieveError> {
        if cat.dst(h) != self.base {
            return Err(SieveError::EndpointMismatch {
                arrow: cat.arrow_name(h).into(),
            });
        }
        Ok(self.pullback_unchecked(cat, h))
    }

    pub(crate) fn pullback_unchecked(&self, cat: &FinCategory, h: Arr) -> Self {
        let x = cat.src(h);
        let mut members = FixedBitSet::with_capacity(cat.arrow_count());
        if self.contains(h) {
            for &g in cat.incoming(x) {
                members.insert(g.index());
            }
        } else {
            for &g in cat.incoming(x) {
                if self.members.contains(cat.compose(h, g).index()) {
                    members.insert(g.index());
                }
            }
        }
        Self { base: x, members }
    }

    /// Whether `arrows` (all into `base`) is closed under precomposition.
    pub fn is_closed(cat: &FinCategory, base: Obj, members: &FixedBitSet) -> bool {
        members.ones().all(|g| {
            let g = Arr(g as u32);
            cat.dst(g) == base && cat.incoming(cat.src(g)).iter().all(|&h| members.contains(cat.compose(g, h).index()))
        })
    }

    /// Builds a sieve from explicit members, checking closure.
    pub fn from_arrows(cat: &FinCategory, base: Obj, arrows: &[Arr]) -> Result<Self, SieveError> {
        let mut members = FixedBitSet::with_capacity(cat.arrow_count());
        for &a in arrows {
            if cat.dst(a) != base {
                return Err(SieveError::WrongCodomain {
                    arrow: cat.arrow_name(a).into(),
                    object: cat.object_name(base).into(),
                });
            }
            members.insert(a.index());
        }
        if !Self::is_closed(cat, base, &members) {
            let culprit = members
                .ones()
                .map(|g| Arr(g as u32))
                .find(|&g| cat.incoming(cat.src(g)).iter().any(|&h| !members.contains(cat.compose(g, h).index())))
                .expect("non-closed set has a culprit");
            return Err(SieveError::NotClosed {
                arrow: cat.arrow_name(culprit).into(),
            });
        }
        Ok(Self { base, members })
    }
}

/// Every sieve on `c`, sorted.
pub fn all_sieves(cat: &FinCategory, c: Obj) -> Vec<Sieve> {
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut list = vec![FixedBitSet::with_capacity(cat.arrow_count())];
    seen.insert(list[0].clone());
    for &f in cat.incoming(c) {
        let principal = Sieve::generate_unchecked(cat, c, [f]).members;
        let current = list.len();
        for i in 0..current {
            let mut u = list[i].clone();
            u.union_with(&principal);
            if seen.insert(u.clone()) {
                list.push(u);
            }
        }
    }
    let mut sieves: Vec<Sieve> = list.into_iter().map(|members| Sieve { base: c, members }).collect();
    sieves.sort();
    sieves
}

/// Which Grothendieck axiom a cover set violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Maximality,
    Stability,
    Transitivity,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axiom::Maximality => "maximality",
            Axiom::Stability => "stability",
            Axiom::Transitivity => "transitivity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("{axiom} axiom fails: {witness}")]
    AxiomViolation { axiom: Axiom, witness: String },
    #[error("cover on `{object}` is not a sieve on it")]
    MalformedSieve { object: String },
    #[error("topologies live on different categories")]
    CarrierMismatch,
    #[error("comma category has the wrong shape for this topology")]
    BadCommaTags,
    #[error("cover list has {found} entries, category has {expected} objects")]
    CoverCount { expected: usize, found: usize },
}

/// A Grothendieck topology, stored as the full set of covering sieves on each
/// object.
#[derive(Debug, Clone)]
pub struct Topology {
    category: Arc<FinCategory>,
    covers: Vec<BTreeSet<FixedBitSet>>,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.covers == other.covers && (Arc::ptr_eq(&self.category, &other.category) || self.category == other.category)
    }
}

impl Eq for Topology {}

impl Topology {
    /// Wraps explicit cover sets without checking the axioms.
    pub fn from_covers(category: Arc<FinCategory>, covers: Vec<Vec<Sieve>>) -> Result<Self, TopologyError> {
        if covers.len() != category.object_count() {
            return Err(TopologyError::CoverCount {
                expected: category.object_count(),
                found: covers.len(),
            });
        }
        let mut sets = Vec::with_capacity(covers.len());
        for (i, list) in covers.into_iter().enumerate() {
            let o = Obj(i as u32);
            let mut set = BTreeSet::new();
            for s in list {
                if s.base != o || !Sieve::is_closed(&category, o, &s.members) {
                    return Err(TopologyError::MalformedSieve {
                        object: category.object_name(o).into(),
                    });
                }
                set.insert(s.members);
            }
            sets.push(set);
        }
        Ok(Self { category, covers: sets })
    }

    /// Like [`Topology::from_covers`] followed by [`Topology::validate`].
    pub fn new_validated(category: Arc<FinCategory>, covers: Vec<Vec<Sieve>>) -> Result<Self, TopologyError> {
        let t = Self::from_covers(category, covers)?;
        t.validate()?;
        Ok(t)
    }

    /// Only maximal sieves cover.
    pub fn trivial(category: Arc<FinCategory>) -> Self {
        let covers = category
            .object_ids()
            .map(|o| BTreeSet::from([Sieve::maximal(&category, o).members]))
            .collect();
        Self { category, covers }
    }

    /// Every sieve covers, the empty one included.
    pub fn discrete(category: Arc<FinCategory>) -> Self {
        let covers = category
            .object_ids()
            .map(|o| all_sieves(&category, o).into_iter().map(|s| s.members).collect())
            .collect();
        Self { category, covers }
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    #[inline]
    pub fn is_covering(&self, s: &Sieve) -> bool {
        self.covers[s.base.index()].contains(&s.members)
    }

    /// Whether the sieve generated by `generators` (arrows into `c`) covers.
    pub fn covers_generated(&self, c: Obj, generators: impl IntoIterator<Item = Arr>) -> bool {
        self.is_covering(&Sieve::generate_unchecked(&self.category, c, generators))
    }

    /// Covering sieves on `c` in sorted order.
    pub fn covering(&self, c: Obj) -> impl Iterator<Item = Sieve> + '_ {
        self.covers[c.index()].iter().map(move |m| Sieve {
            base: c,
            members: m.clone(),
        })
    }

    pub fn cover_count(&self, c: Obj) -> usize {
        self.covers[c.index()].len()
    }

    /// Checks maximality, stability and transitivity; the first failure in
    /// declared order is reported with its witness.
    pub fn validate(&self) -> Result<(), TopologyError> {
        let cat = &*self.category;
        for c in cat.object_ids() {
            for m in &self.covers[c.index()] {
                if !Sieve::is_closed(cat, c, m) {
                    return Err(TopologyError::MalformedSieve {
                        object: cat.object_name(c).into(),
                    });
                }
            }
        }
        for c in cat.object_ids() {
            if !self.is_covering(&Sieve::maximal(cat, c)) {
                return Err(TopologyError::AxiomViolation {
                    axiom: Axiom::Maximality,
                    witness: format!("maximal sieve on `{}` is not covering", cat.object_name(c)),
                });
            }
        }
        for c in cat.object_ids() {
            for s in self.covering(c) {
                for &h in cat.incoming(c) {
                    if !self.is_covering(&s.pullback_unchecked(cat, h)) {
                        return Err(TopologyError::AxiomViolation {
                            axiom: Axiom::Stability,
                            witness: format!(
                                "pullback of covering sieve {:?} on `{}` along `{}` is not covering",
                                s.names(cat),
                                cat.object_name(c),
                                cat.arrow_name(h)
                            ),
                        });
                    }
                }
            }
        }
        for c in cat.object_ids() {
            for s in all_sieves(cat, c) {
                if self.is_covering(&s) {
                    continue;
                }
                if let Some(r) = self.covering(c).find(|r| self.locally_covers(r, &s)) {
                    return Err(TopologyError::AxiomViolation {
                        axiom: Axiom::Transitivity,
                        witness: format!(
                            "sieve {:?} on `{}` is locally covering along {:?} but not covering",
                            s.names(cat),
                            cat.object_name(c),
                            r.names(cat)
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    // every pullback of `s` along a member of `r` covers
    fn locally_covers(&self, r: &Sieve, s: &Sieve) -> bool {
        r.arrows().all(|f| self.is_covering(&s.pullback_unchecked(&self.category, f)))
    }

    /// Least topology containing `basis` (a list of sieves per object), by a
    /// worklist fixpoint over stability and transitivity.
    pub fn generate(category: Arc<FinCategory>, basis: &[Vec<Sieve>]) -> Result<Self, TopologyError> {
        if basis.len() != category.object_count() {
            return Err(TopologyError::CoverCount {
                expected: category.object_count(),
                found: basis.len(),
            });
        }
        let mut t = Self::trivial(category.clone());
        for (i, list) in basis.iter().enumerate() {
            for s in list {
                if s.base.index() != i || !Sieve::is_closed(&category, s.base, &s.members) {
                    return Err(TopologyError::MalformedSieve {
                        object: category.object_name(Obj(i as u32)).into(),
                    });
                }
                t.covers[i].insert(s.members.clone());
            }
        }
        t.close();
        Ok(t)
    }

    /// Smallest topology containing this one and the given extra sieve.
    pub fn with_sieve(&self, s: &Sieve) -> Self {
        let mut t = self.clone();
        if t.covers[s.base.index()].insert(s.members.clone()) {
            t.close();
        }
        t
    }

    fn close(&mut self) {
        let cat = self.category.clone();
        let sieves: Vec<Vec<Sieve>> = cat.object_ids().map(|c| all_sieves(&cat, c)).collect();
        loop {
            let mut changed = false;
            // stability
            let mut work: Vec<Sieve> = cat.object_ids().flat_map(|c| self.covering(c).collect::<Vec<_>>()).collect();
            while let Some(s) = work.pop() {
                for &h in cat.incoming(s.base) {
                    let pb = s.pullback_unchecked(&cat, h);
                    if self.covers[pb.base.index()].insert(pb.members.clone()) {
                        changed = true;
                        work.push(pb);
                    }
                }
            }
            // transitivity (upward closure included)
            for c in cat.object_ids() {
                for s in &sieves[c.index()] {
                    if self.is_covering(s) {
                        continue;
                    }
                    let forced = self.covering(c).any(|r| self.locally_covers(&r, s));
                    if forced {
                        self.covers[c.index()].insert(s.members.clone());
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Whether every sieve covering for `self` covers for `other`.
    pub fn leq(&self, other: &Topology) -> Result<bool, TopologyError> {
        if !(Arc::ptr_eq(&self.category, &other.category) || self.category == other.category) {
            return Err(TopologyError::CarrierMismatch);
        }
        Ok(self.covers.iter().zip(&other.covers).all(|(a, b)| a.is_subset(b)))
    }

    /// The first sieve covering for `self` but not for `other`.
    pub fn first_excess(&self, other: &Topology) -> Option<Sieve> {
        self.category.object_ids().find_map(|c| {
            self.covers[c.index()]
                .iter()
                .find(|m| !other.covers[c.index()].contains(*m))
                .map(|m| Sieve {
                    base: c,
                    members: m.clone(),
                })
        })
    }

    /// Sieves on a comma object covering iff the sieve generated by the
    /// projections of their members covers for `base`.
    ///
    /// `Fiber` needs a `(p ↓ c)` comma, `Global` a `(p ↓ 1_C)` comma; in both
    /// cases `base` lives on the left leg's source.
    pub fn comma_giraud(comma: &CommaCategory, base: &Topology, variant: CommaVariant) -> Result<Self, TopologyError> {
        let projection = comma.left_projection();
        if !(Arc::ptr_eq(projection.target(), &base.category) || **projection.target() == *base.category) {
            return Err(TopologyError::BadCommaTags);
        }
        let car = comma.carrier().clone();
        match (variant, comma.shape()) {
            (CommaVariant::Fiber, CommaShape::OverObject(_)) => {
                // The projection is a discrete fibration: sieves on (d, u)
                // correspond to sieves on d by lifting.
                let covers = car
                    .object_ids()
                    .map(|x| {
                        let d = projection.on_object(x);
                        base.covering(d)
                            .map(|s| {
                                let mut members = FixedBitSet::with_capacity(car.arrow_count());
                                for &a in car.incoming(x) {
                                    if s.contains(projection.on_arrow(a)) {
                                        members.insert(a.index());
                                    }
                                }
                                members
                            })
                            .collect()
                    })
                    .collect();
                Ok(Self { category: car, covers })
            }
            (CommaVariant::Global, CommaShape::OverIdentity) => {
                Ok(Self::projection_covering(car, projection.object_map(), projection.arrow_map(), base))
            }
            _ => Err(TopologyError::BadCommaTags),
        }
    }

    /// Sieves on `category` covering iff the sieve generated by their images
    /// under the given projection covers for `base`. Enumerates every sieve.
    pub(crate) fn projection_covering(
        category: Arc<FinCategory>,
        on_objects: &[Obj],
        on_arrows: &[Arr],
        base: &Topology,
    ) -> Self {
        let covers = category
            .object_ids()
            .map(|x| {
                let d = on_objects[x.index()];
                all_sieves(&category, x)
                    .into_iter()
                    .filter(|s| base.covers_generated(d, s.arrows().map(|a| on_arrows[a.index()])))
                    .map(|s| s.members)
                    .collect()
            })
            .collect();
        Self { category, covers }
    }
}

/// Which comma-category topology to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommaVariant {
    /// `K_c` on `(p ↓ c)`.
    Fiber,
    /// `K̄` on `(p ↓ 1_C)`.
    Global,
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::category::fixtures::c2;

    /// C2 with the maximal sieves plus `S_f = {f}` on `b`.
    pub fn j1() -> Topology {
        let cat = Arc::new(c2());
        let b = cat.object_by_name("b").unwrap();
        let f = cat.arrow_by_name("f").unwrap();
        let mut t = Topology::trivial(cat.clone());
        t.covers[b.index()].insert(Sieve::generate(&cat, b, &[f]).unwrap().members);
        t
    }
}
