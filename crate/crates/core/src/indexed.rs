//! Strict indexed categories, their Grothendieck construction, cartesian
//! arrows and the Giraud topology.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::{Arr, CategoryBuilder, FinCategory, Obj};
use crate::functor::{FinFunctor, FunctorError, NatTransform};
use crate::topology::{all_sieves, Topology};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexedError {
    #[error("expected {expected} fibers, found {found}")]
    FiberCount { expected: usize, found: usize },
    #[error("expected {expected} transition functors, found {found}")]
    TransitionCount { expected: usize, found: usize },
    #[error("transition along `{arrow}` has the wrong source or target fiber")]
    TransitionEndpoints { arrow: String },
    #[error("transition along `{arrow}` is not a functor: {source}")]
    BadTransition {
        arrow: String,
        #[source]
        source: FunctorError,
    },
    #[error("not strict: {0}")]
    NotStrict(String),
}

/// A strict functor `C^op → Cat` with finite fibers.
#[derive(Debug, Clone)]
pub struct IndexedCategory {
    base: Arc<FinCategory>,
    fibers: Vec<Arc<FinCategory>>,
    // transition[g] : fiber(dst g) → fiber(src g)
    transitions: Vec<FinFunctor>,
}

impl IndexedCategory {
    /// Validates sizes, fiber endpoints, functoriality of every transition and
    /// strictness: identities go to identity functors and
    /// `D(g∘f) = D(f)∘D(g)` on the nose.
    pub fn new(
        base: Arc<FinCategory>,
        fibers: Vec<Arc<FinCategory>>,
        transitions: Vec<FinFunctor>,
    ) -> Result<Self, IndexedError> {
        if fibers.len() != base.object_count() {
            return Err(IndexedError::FiberCount {
                expected: base.object_count(),
                found: fibers.len(),
            });
        }
        if transitions.len() != base.arrow_count() {
            return Err(IndexedError::TransitionCount {
                expected: base.arrow_count(),
                found: transitions.len(),
            });
        }
        let same = |a: &Arc<FinCategory>, b: &Arc<FinCategory>| Arc::ptr_eq(a, b) || a == b;
        for g in base.arrow_ids() {
            let t = &transitions[g.index()];
            if !same(t.source(), &fibers[base.dst(g).index()]) || !same(t.target(), &fibers[base.src(g).index()]) {
                return Err(IndexedError::TransitionEndpoints {
                    arrow: base.arrow_name(g).into(),
                });
            }
            t.validate().map_err(|source| IndexedError::BadTransition {
                arrow: base.arrow_name(g).into(),
                source,
            })?;
        }
        let d = Self {
            base,
            fibers,
            transitions,
        };
        d.check_strict()?;
        Ok(d)
    }

    /// Every fiber is the terminal category.
    pub fn terminal(base: Arc<FinCategory>) -> Self {
        let one = Arc::new(FinCategory::terminal());
        let fibers = vec![one.clone(); base.object_count()];
        let transitions = base.arrow_ids().map(|_| FinFunctor::identity(one.clone())).collect();
        Self {
            base,
            fibers,
            transitions,
        }
    }

    fn check_strict(&self) -> Result<(), IndexedError> {
        let base = &*self.base;
        for c in base.object_ids() {
            let t = &self.transitions[base.identity(c).index()];
            if *t != FinFunctor::identity(self.fibers[c.index()].clone()) {
                return Err(IndexedError::NotStrict(format!(
                    "transition along `{}` is not the identity",
                    base.arrow_name(base.identity(c))
                )));
            }
        }
        for g in base.arrow_ids() {
            for &f in base.incoming(base.src(g)) {
                let gf = base.compose(g, f);
                // D(g∘f) = D(f) ∘ D(g)
                let expected = self.transitions[g.index()]
                    .then(&self.transitions[f.index()])
                    .expect("fibers match");
                let actual = &self.transitions[gf.index()];
                if expected.object_map() != actual.object_map() || expected.arrow_map() != actual.arrow_map() {
                    return Err(IndexedError::NotStrict(format!(
                        "transition along `{}` differs from the composite along `{}` then `{}`",
                        base.arrow_name(gf),
                        base.arrow_name(g),
                        base.arrow_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn fiber(&self, c: Obj) -> &Arc<FinCategory> {
        &self.fibers[c.index()]
    }

    /// `D(g): fiber(dst g) → fiber(src g)`.
    pub fn transition(&self, g: Arr) -> &FinFunctor {
        &self.transitions[g.index()]
    }
}

/// Tags of an object of a total category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TotalObject {
    pub fiber_object: Obj,
    pub base_object: Obj,
}

/// Tags of an arrow `(x, c) → (x', c')`: a vertical part `v: x → D(g)(x')` in
/// the fiber over `c`, and the base arrow `g: c → c'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TotalArrow {
    pub vertical: Arr,
    pub base_arrow: Arr,
}

/// The Grothendieck construction `G(D)` with its projection to the base.
#[derive(Debug, Clone)]
pub struct TotalCategory {
    indexed: IndexedCategory,
    carrier: Arc<FinCategory>,
    projection: FinFunctor,
    objects: Vec<TotalObject>,
    arrows: Vec<TotalArrow>,
    cartesian: FixedBitSet,
}

impl TotalCategory {
    /// Builds `G(D)`: composition `(v', g') ∘ (v, g) = (D(g)(v') ∘ v, g' ∘ g)`,
    /// projection `(v, g) ↦ g`, cartesian arrows the ones with identity
    /// vertical part.
    pub fn new(indexed: IndexedCategory) -> Self {
        let base = indexed.base.clone();
        let mut b = CategoryBuilder::new();
        let mut objects = Vec::new();
        let mut object_index = HashMap::new();
        for c in base.object_ids() {
            let fiber = &indexed.fibers[c.index()];
            for x in fiber.object_ids() {
                let o = b.add_object(format!("({},{})", fiber.object_name(x), base.object_name(c)));
                object_index.insert((x, c), o);
                objects.push(TotalObject {
                    fiber_object: x,
                    base_object: c,
                });
            }
        }
        let mut arrows = Vec::new();
        let mut src_of = Vec::new();
        let mut dst_of = Vec::new();
        let mut arrow_index: HashMap<(Obj, Obj, Arr, Arr), Arr> = HashMap::new();
        for (si, so) in objects.iter().enumerate() {
            let s = Obj(si as u32);
            let fiber = &indexed.fibers[so.base_object.index()];
            for &g in base.outgoing(so.base_object) {
                let c2 = base.dst(g);
                let reindex = &indexed.transitions[g.index()];
                for x2 in indexed.fibers[c2.index()].object_ids() {
                    let t = object_index[&(x2, c2)];
                    for &v in fiber.hom(so.fiber_object, reindex.on_object(x2)) {
                        let name = if t == s && base.is_identity(g) && fiber.is_identity(v) {
                            format!("id:{}", b_name(&indexed, so))
                        } else {
                            format!(
                                "({},{}):{}->{}",
                                fiber.arrow_name(v),
                                base.arrow_name(g),
                                b_name(&indexed, so),
                                b_name(&indexed, &objects[t.index()])
                            )
                        };
                        let a = b.add_arrow(name, s, t);
                        if t == s && base.is_identity(g) && fiber.is_identity(v) {
                            b.set_identity(s, a);
                        }
                        arrow_index.insert((s, t, v, g), a);
                        arrows.push(TotalArrow {
                            vertical: v,
                            base_arrow: g,
                        });
                        src_of.push(s);
                        dst_of.push(t);
                    }
                }
            }
        }
        let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); objects.len()];
        for (i, s) in src_of.iter().enumerate() {
            by_source[s.index()].push(i);
        }
        for first in 0..arrows.len() {
            let TotalArrow { vertical: v, base_arrow: g } = arrows[first];
            let c = base.src(g);
            for &second in &by_source[dst_of[first].index()] {
                let TotalArrow {
                    vertical: v2,
                    base_arrow: g2,
                } = arrows[second];
                let fiber = &indexed.fibers[c.index()];
                let moved = indexed.transitions[g.index()].on_arrow(v2);
                let vert = fiber.compose(moved, v);
                let key = (src_of[first], dst_of[second], vert, base.compose(g2, g));
                b.set_composite(Arr(second as u32), Arr(first as u32), arrow_index[&key]);
            }
        }
        let carrier = Arc::new(b.build_trusted().expect("Grothendieck construction is well formed"));
        let projection = FinFunctor::new(
            carrier.clone(),
            base.clone(),
            objects.iter().map(|o| o.base_object).collect(),
            arrows.iter().map(|a| a.base_arrow).collect(),
        )
        .expect("projection");
        let mut cartesian = FixedBitSet::with_capacity(arrows.len());
        for (i, a) in arrows.iter().enumerate() {
            let fiber = &indexed.fibers[base.src(a.base_arrow).index()];
            if fiber.is_identity(a.vertical) {
                cartesian.insert(i);
            }
        }
        Self {
            indexed,
            carrier,
            projection,
            objects,
            arrows,
            cartesian,
        }
    }

    pub fn indexed(&self) -> &IndexedCategory {
        &self.indexed
    }

    pub fn carrier(&self) -> &Arc<FinCategory> {
        &self.carrier
    }

    pub fn projection(&self) -> &FinFunctor {
        &self.projection
    }

    pub fn object(&self, o: Obj) -> TotalObject {
        self.objects[o.index()]
    }

    pub fn arrow(&self, a: Arr) -> TotalArrow {
        self.arrows[a.index()]
    }

    pub fn is_cartesian(&self, a: Arr) -> bool {
        self.cartesian.contains(a.index())
    }

    pub fn cartesian_arrows(&self) -> impl Iterator<Item = Arr> + '_ {
        self.cartesian.ones().map(|i| Arr(i as u32))
    }

    pub fn find_object(&self, fiber_object: Obj, base_object: Obj) -> Option<Obj> {
        self.objects
            .iter()
            .position(|o| o.fiber_object == fiber_object && o.base_object == base_object)
            .map(|i| Obj(i as u32))
    }

    /// Splits an arrow as `(cartesian) ∘ (vertical)`: returns the vertical arrow
    /// `(v, id_c): (x, c) → (D(g)(x'), c)` and the cartesian lift
    /// `(id, g): (D(g)(x'), c) → (x', c')`.
    pub fn factor(&self, a: Arr) -> (Arr, Arr) {
        let car = &*self.carrier;
        let base = &*self.indexed.base;
        let TotalArrow { vertical, base_arrow } = self.arrows[a.index()];
        let c = base.src(base_arrow);
        let fiber = &self.indexed.fibers[c.index()];
        let mid = self
            .find_object(fiber.dst(vertical), c)
            .expect("reindexed object lives in the fiber");
        let target = car.dst(a);
        let cart = car
            .hom(mid, target)
            .iter()
            .copied()
            .find(|&h| {
                let t = self.arrows[h.index()];
                t.base_arrow == base_arrow && fiber.is_identity(t.vertical)
            })
            .expect("canonical lift");
        let vert = car
            .hom(car.src(a), mid)
            .iter()
            .copied()
            .find(|&h| {
                let t = self.arrows[h.index()];
                t.vertical == vertical && base.is_identity(t.base_arrow)
            })
            .expect("vertical part");
        (vert, cart)
    }
}

fn b_name(indexed: &IndexedCategory, o: &TotalObject) -> String {
    format!(
        "({},{})",
        indexed.fibers[o.base_object.index()].object_name(o.fiber_object),
        indexed.base.object_name(o.base_object)
    )
}

/// Whether `phi: y → x` is cartesian for `p` in the strong sense: every
/// `psi: z → x` with `p(psi) = p(phi) ∘ h` factors as `phi ∘ chi` for exactly
/// one `chi` over `h`.
pub fn is_cartesian(p: &FinFunctor, phi: Arr) -> bool {
    let src = p.source();
    let tgt = p.target();
    let (y, x) = (src.src(phi), src.dst(phi));
    let g = p.on_arrow(phi);
    for &psi in src.incoming(x) {
        let z = src.src(psi);
        for &h in tgt.hom(p.on_object(z), p.on_object(y)) {
            if tgt.compose(g, h) != p.on_arrow(psi) {
                continue;
            }
            let lifts = src
                .hom(z, y)
                .iter()
                .filter(|&&chi| p.on_arrow(chi) == h && src.compose(phi, chi) == psi)
                .count();
            if lifts != 1 {
                return false;
            }
        }
    }
    true
}

/// A base arrow `g: c → p(x)` with no cartesian lift ending at `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingLift {
    pub object: String,
    pub arrow: String,
}

/// Decides whether `p` is a Grothendieck fibration by exhaustive search for
/// cartesian lifts.
pub fn check_fibration(p: &FinFunctor) -> Verdict<MissingLift> {
    let src = p.source();
    let tgt = p.target();
    for x in src.object_ids() {
        for &g in tgt.incoming(p.on_object(x)) {
            let found = src
                .incoming(x)
                .iter()
                .any(|&phi| p.on_arrow(phi) == g && is_cartesian(p, phi));
            if !found {
                return Verdict::fail(MissingLift {
                    object: src.object_name(x).into(),
                    arrow: tgt.arrow_name(g).into(),
                });
            }
        }
    }
    Verdict::pass()
}

/// `J_D`: a sieve on `(x, c)` covers iff the base arrows of its cartesian
/// members generate a `J`-covering sieve on `c`.
pub fn giraud_topology(total: &TotalCategory, base_topology: &Topology) -> Topology {
    let car = total.carrier();
    let covers = car
        .object_ids()
        .map(|o| {
            let c = total.projection.on_object(o);
            all_sieves(car, o)
                .into_iter()
                .filter(|s| {
                    base_topology.covers_generated(
                        c,
                        s.arrows()
                            .filter(|&a| total.is_cartesian(a))
                            .map(|a| total.projection.on_arrow(a)),
                    )
                })
                .collect()
        })
        .collect();
    Topology::from_covers(car.clone(), covers).expect("sieves enumerated on the carrier")
}

/// Why a functor between total categories is not a morphism of fibrations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FibrationMorphismFailure {
    /// The component of the comparison transformation at this object is not
    /// invertible.
    NonInvertibleComponent { object: String },
    /// This cartesian arrow is sent to a non-cartesian one.
    CartesianNotPreserved { arrow: String },
}

/// Whether `(A, phi)` with `phi: p'∘A ⇒ p` is a morphism of fibrations: every
/// component of `phi` is an isomorphism and `A` sends the cartesian arrows of
/// `source` to arrows cartesian for the target projection.
pub fn check_fibration_morphism(
    source: &TotalCategory,
    target: &TotalCategory,
    functor: &FinFunctor,
    phi: &NatTransform,
) -> Verdict<FibrationMorphismFailure> {
    let car = source.carrier();
    for o in car.object_ids() {
        if !phi.source().target().is_iso(phi.component(o)) {
            return Verdict::fail(FibrationMorphismFailure::NonInvertibleComponent {
                object: car.object_name(o).into(),
            });
        }
    }
    for a in source.cartesian_arrows() {
        if !is_cartesian(target.projection(), functor.on_arrow(a)) {
            return Verdict::fail(FibrationMorphismFailure::CartesianNotPreserved {
                arrow: car.arrow_name(a).into(),
            });
        }
    }
    Verdict::pass()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::category::fixtures::c2;

    /// Over C2: fiber(b) = {x, y}, fiber(a) = {x', y'} discrete, D(f): x ↦ x', y ↦ y'.
    pub fn four_object() -> IndexedCategory {
        let base = Arc::new(c2());
        let fb = Arc::new(FinCategory::discrete(&["x", "y"]));
        let fa = Arc::new(FinCategory::discrete(&["x'", "y'"]));
        let a = base.object_by_name("a").unwrap();
        let b = base.object_by_name("b").unwrap();
        let f = base.arrow_by_name("f").unwrap();
        let mut transitions = Vec::new();
        for g in base.arrow_ids() {
            if g == f {
                transitions.push(
                    FinFunctor::new(fb.clone(), fa.clone(), vec![Obj(0), Obj(1)], vec![Arr(0), Arr(1)]).unwrap(),
                );
            } else if g == base.identity(a) {
                transitions.push(FinFunctor::identity(fa.clone()));
            } else {
                assert_eq!(g, base.identity(b));
                transitions.push(FinFunctor::identity(fb.clone()));
            }
        }
        let fibers = base
            .object_ids()
            .map(|o| if o == a { fa.clone() } else { fb.clone() })
            .collect();
        IndexedCategory::new(base, fibers, transitions).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::four_object;
    use super::*;
    use crate::category::fixtures::c2;
    use crate::topology::fixtures::j1;

    #[test]
    fn terminal_indexed_category_reproduces_the_base() {
        let base = Arc::new(c2());
        let total = TotalCategory::new(IndexedCategory::terminal(base.clone()));
        assert_eq!(total.carrier().object_count(), 2);
        assert_eq!(total.carrier().arrow_count(), 3);
        assert!(total.carrier().validate().is_ok());
        assert!(total.projection().validate().is_ok());
        assert_eq!(total.cartesian_arrows().count(), 3);
        assert!(check_fibration(total.projection()).holds());

        let jd = giraud_topology(&total, &j1());
        assert!(jd.validate().is_ok());
        assert_eq!(jd.cover_count(Obj(0)), 1);
        assert_eq!(jd.cover_count(Obj(1)), 2);
        let triv = giraud_topology(&total, &Topology::trivial(base.clone()));
        for o in total.carrier().object_ids() {
            assert_eq!(triv.cover_count(o), 1);
        }
    }

    #[test]
    fn four_object_total_category() {
        let total = TotalCategory::new(four_object());
        let car = total.carrier();
        assert_eq!(car.object_count(), 4);
        assert!(car.validate().is_ok());
        let non_identity: Vec<_> = car.arrow_ids().filter(|&a| !car.is_identity(a)).collect();
        assert_eq!(non_identity.len(), 2);
        assert!(non_identity.iter().all(|&a| total.is_cartesian(a)));
        assert!(check_fibration(total.projection()).holds());
        for a in car.arrow_ids() {
            let (v, c) = total.factor(a);
            assert_eq!(car.compose(c, v), a);
            assert!(total.is_cartesian(c));
            assert!(is_cartesian(total.projection(), c));
        }

        // the cartesian lift of f into (x,b) generates a J_D-covering sieve
        let jd = giraud_topology(&total, &j1());
        assert!(jd.validate().is_ok());
        let xb = car.object_by_name("(x,b)").unwrap();
        let lift = car.incoming(xb).iter().copied().find(|&a| !car.is_identity(a)).unwrap();
        assert!(jd.covers_generated(xb, [lift]));
    }

    #[test]
    fn inclusion_of_discrete_is_not_a_fibration() {
        let base = Arc::new(c2());
        let disc = Arc::new(FinCategory::discrete(&["a", "b"]));
        let p = FinFunctor::new(
            disc,
            base.clone(),
            vec![Obj(0), Obj(1)],
            vec![base.identity(Obj(0)), base.identity(Obj(1))],
        )
        .unwrap();
        let v = check_fibration(&p);
        assert_eq!(
            v.witness,
            Some(MissingLift {
                object: "b".into(),
                arrow: "f".into()
            })
        );
    }

    #[test]
    fn anything_over_the_terminal_category_is_a_fibration() {
        let c = Arc::new(c2());
        let p = FinFunctor::to_terminal(c, Arc::new(FinCategory::terminal()));
        assert!(check_fibration(&p).holds());
    }

    #[test]
    fn non_strict_transitions_are_rejected() {
        let base = Arc::new(c2());
        let one = Arc::new(FinCategory::terminal());
        let two = Arc::new(FinCategory::discrete(&["u", "v"]));
        // identity on b's fiber replaced by a swap
        let swap = FinFunctor::new(two.clone(), two.clone(), vec![Obj(1), Obj(0)], vec![Arr(1), Arr(0)]).unwrap();
        let a = base.object_by_name("a").unwrap();
        let f = base.arrow_by_name("f").unwrap();
        let transitions = base
            .arrow_ids()
            .map(|g| {
                if g == f {
                    FinFunctor::to_terminal(two.clone(), one.clone())
                } else if g == base.identity(a) {
                    FinFunctor::identity(one.clone())
                } else {
                    swap.clone()
                }
            })
            .collect();
        let fibers = vec![one.clone(), two.clone()];
        assert!(matches!(
            IndexedCategory::new(base, fibers, transitions),
            Err(IndexedError::NotStrict(_))
        ));
    }

    #[test]
    fn collapse_onto_terminal_indexed_category_is_a_fibration_morphism() {
        let source = TotalCategory::new(four_object());
        let target = TotalCategory::new(IndexedCategory::terminal(source.indexed().base().clone()));
        let objects = source
            .carrier()
            .object_ids()
            .map(|o| Obj(source.object(o).base_object.0))
            .collect();
        let arrows = source
            .carrier()
            .arrow_ids()
            .map(|a| {
                let g = source.arrow(a).base_arrow;
                target
                    .carrier()
                    .arrow_ids()
                    .find(|&t| target.arrow(t).base_arrow == g)
                    .unwrap()
            })
            .collect();
        let collapse =
            FinFunctor::new_validated(source.carrier().clone(), target.carrier().clone(), objects, arrows).unwrap();
        let through = collapse.then(target.projection()).unwrap();
        let phi = NatTransform::new_validated(
            through.clone(),
            source.projection().clone(),
            source
                .carrier()
                .object_ids()
                .map(|o| through.target().identity(through.on_object(o)))
                .collect(),
        )
        .unwrap();
        assert!(check_fibration_morphism(&source, &target, &collapse, &phi).holds());

        let id = FinFunctor::identity(source.carrier().clone());
        let phi_id = NatTransform::identity(source.projection().clone());
        let id_then_p = id.then(source.projection()).unwrap();
        let phi_id = NatTransform::new_validated(id_then_p, source.projection().clone(), phi_id.components().to_vec())
            .unwrap();
        assert!(check_fibration_morphism(&source, &source, &id, &phi_id).holds());
    }
}
