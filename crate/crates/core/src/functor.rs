//! Functors and natural transformations between finite categories.

use std::sync::Arc;

use thiserror::Error;

use crate::category::{Arr, FinCategory, Obj};

/// Why a functor fails the functor laws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorViolation {
    /// The image of the arrow does not go between the images of its endpoints.
    Endpoints { arrow: String },
    /// The identity of this object is not sent to an identity.
    Identity { object: String },
    /// `F(g∘f) ≠ F(g)∘F(f)`.
    Composition { g: String, f: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("object map has {found} entries, source has {expected} objects")]
    ObjectMapSize { expected: usize, found: usize },
    #[error("arrow map has {found} entries, source has {expected} arrows")]
    ArrowMapSize { expected: usize, found: usize },
    #[error("not functorial: {0:?}")]
    NotFunctorial(FunctorViolation),
    #[error("functors are not composable: target and source categories differ")]
    NotComposable,
}

/// A functor between finite categories, stored as total object and arrow maps.
#[derive(Debug, Clone)]
pub struct FinFunctor {
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
    objects: Vec<Obj>,
    arrows: Vec<Arr>,
}

impl PartialEq for FinFunctor {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.source, &other.source) || self.source == other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || self.target == other.target)
            && self.objects == other.objects
            && self.arrows == other.arrows
    }
}

impl Eq for FinFunctor {}

impl FinFunctor {
    /// Wraps the maps after checking their sizes. Use [`FinFunctor::validate`]
    /// or [`FinFunctor::new_validated`] to check the functor laws.
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        objects: Vec<Obj>,
        arrows: Vec<Arr>,
    ) -> Result<Self, FunctorError> {
        if objects.len() != source.object_count() {
            return Err(FunctorError::ObjectMapSize {
                expected: source.object_count(),
                found: objects.len(),
            });
        }
        if arrows.len() != source.arrow_count() {
            return Err(FunctorError::ArrowMapSize {
                expected: source.arrow_count(),
                found: arrows.len(),
            });
        }
        Ok(Self {
            source,
            target,
            objects,
            arrows,
        })
    }

    pub fn new_validated(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        objects: Vec<Obj>,
        arrows: Vec<Arr>,
    ) -> Result<Self, FunctorError> {
        let f = Self::new(source, target, objects, arrows)?;
        f.validate()?;
        Ok(f)
    }

    pub fn identity(cat: Arc<FinCategory>) -> Self {
        let objects = cat.object_ids().collect();
        let arrows = cat.arrow_ids().collect();
        Self {
            source: cat.clone(),
            target: cat,
            objects,
            arrows,
        }
    }

    /// The constant functor at `o`.
    pub fn constant(source: Arc<FinCategory>, target: Arc<FinCategory>, o: Obj) -> Self {
        let id = target.identity(o);
        Self {
            objects: vec![o; source.object_count()],
            arrows: vec![id; source.arrow_count()],
            source,
            target,
        }
    }

    /// The functor from the terminal category picking `o`.
    pub fn point(target: Arc<FinCategory>, o: Obj) -> Self {
        Self::constant(Arc::new(FinCategory::terminal()), target, o)
    }

    /// The unique functor into the terminal category.
    pub fn to_terminal(source: Arc<FinCategory>, terminal: Arc<FinCategory>) -> Self {
        assert_eq!(terminal.object_count(), 1);
        Self::constant(source, terminal, Obj(0))
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        &self.target
    }

    #[inline]
    pub fn on_object(&self, o: Obj) -> Obj {
        self.objects[o.index()]
    }

    #[inline]
    pub fn on_arrow(&self, a: Arr) -> Arr {
        self.arrows[a.index()]
    }

    pub fn object_map(&self) -> &[Obj] {
        &self.objects
    }

    pub fn arrow_map(&self) -> &[Arr] {
        &self.arrows
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FinFunctor) -> Result<FinFunctor, FunctorError> {
        if !(Arc::ptr_eq(&self.target, &other.source) || self.target == other.source) {
            return Err(FunctorError::NotComposable);
        }
        Ok(FinFunctor {
            source: self.source.clone(),
            target: other.target.clone(),
            objects: self.objects.iter().map(|&o| other.on_object(o)).collect(),
            arrows: self.arrows.iter().map(|&a| other.on_arrow(a)).collect(),
        })
    }

    /// Checks the functor laws exhaustively; the first violation in declared
    /// order is reported.
    pub fn validate(&self) -> Result<(), FunctorError> {
        let (s, t) = (&*self.source, &*self.target);
        if let Some(bad) = self.objects.iter().find(|o| o.index() >= t.object_count()) {
            return Err(FunctorError::ObjectMapSize {
                expected: t.object_count(),
                found: bad.index(),
            });
        }
        if let Some(bad) = self.arrows.iter().find(|a| a.index() >= t.arrow_count()) {
            return Err(FunctorError::ArrowMapSize {
                expected: t.arrow_count(),
                found: bad.index(),
            });
        }
        for a in s.arrow_ids() {
            let fa = self.on_arrow(a);
            if t.src(fa) != self.on_object(s.src(a)) || t.dst(fa) != self.on_object(s.dst(a)) {
                return Err(FunctorError::NotFunctorial(FunctorViolation::Endpoints {
                    arrow: s.arrow_name(a).into(),
                }));
            }
        }
        for o in s.object_ids() {
            if !t.is_identity(self.on_arrow(s.identity(o))) {
                return Err(FunctorError::NotFunctorial(FunctorViolation::Identity {
                    object: s.object_name(o).into(),
                }));
            }
        }
        for g in s.arrow_ids() {
            for &f in s.incoming(s.src(g)) {
                if self.on_arrow(s.compose(g, f)) != t.compose(self.on_arrow(g), self.on_arrow(f)) {
                    return Err(FunctorError::NotFunctorial(FunctorViolation::Composition {
                        g: s.arrow_name(g).into(),
                        f: s.arrow_name(f).into(),
                    }));
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NatError {
    #[error("functors are not parallel")]
    NotParallel,
    #[error("component count {found} differs from object count {expected}")]
    ComponentCount { expected: usize, found: usize },
    #[error("component at `{object}` has the wrong endpoints")]
    BadComponent { object: String },
    #[error("naturality square fails at arrow `{arrow}`")]
    NotNatural { arrow: String },
}

/// A natural transformation `source ⇒ target` between parallel functors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTransform {
    source: FinFunctor,
    target: FinFunctor,
    components: Vec<Arr>,
}

impl NatTransform {
    pub fn new(source: FinFunctor, target: FinFunctor, components: Vec<Arr>) -> Result<Self, NatError> {
        let parallel = |a: &Arc<FinCategory>, b: &Arc<FinCategory>| Arc::ptr_eq(a, b) || a == b;
        if !parallel(source.source(), target.source()) || !parallel(source.target(), target.target()) {
            return Err(NatError::NotParallel);
        }
        if components.len() != source.source().object_count() {
            return Err(NatError::ComponentCount {
                expected: source.source().object_count(),
                found: components.len(),
            });
        }
        Ok(Self {
            source,
            target,
            components,
        })
    }

    pub fn new_validated(source: FinFunctor, target: FinFunctor, components: Vec<Arr>) -> Result<Self, NatError> {
        let t = Self::new(source, target, components)?;
        t.validate()?;
        Ok(t)
    }

    pub fn identity(f: FinFunctor) -> Self {
        let components = f
            .source()
            .object_ids()
            .map(|o| f.target().identity(f.on_object(o)))
            .collect();
        Self {
            source: f.clone(),
            target: f,
            components,
        }
    }

    pub fn source(&self) -> &FinFunctor {
        &self.source
    }

    pub fn target(&self) -> &FinFunctor {
        &self.target
    }

    #[inline]
    pub fn component(&self, o: Obj) -> Arr {
        self.components[o.index()]
    }

    pub fn components(&self) -> &[Arr] {
        &self.components
    }

    pub fn validate(&self) -> Result<(), NatError> {
        let dom = self.source.source();
        let cod = self.source.target();
        for o in dom.object_ids() {
            let c = self.component(o);
            if c.index() >= cod.arrow_count()
                || cod.src(c) != self.source.on_object(o)
                || cod.dst(c) != self.target.on_object(o)
            {
                return Err(NatError::BadComponent {
                    object: dom.object_name(o).into(),
                });
            }
        }
        for m in dom.arrow_ids() {
            let lhs = cod.compose(self.target.on_arrow(m), self.component(dom.src(m)));
            let rhs = cod.compose(self.component(dom.dst(m)), self.source.on_arrow(m));
            if lhs != rhs {
                return Err(NatError::NotNatural {
                    arrow: dom.arrow_name(m).into(),
                });
            }
        }
        Ok(())
    }

    /// Whether every component is an isomorphism.
    pub fn is_iso(&self) -> bool {
        let cod = self.source.target();
        self.components.iter().all(|&c| cod.is_iso(c))
    }

    /// All natural transformations `source ⇒ target`, in lexicographic order of
    /// their component lists.
    pub fn enumerate(source: &FinFunctor, target: &FinFunctor) -> Vec<NatTransform> {
        let dom = source.source().clone();
        let cod = source.target().clone();
        let choices: Vec<&[Arr]> = dom
            .object_ids()
            .map(|o| cod.hom(source.on_object(o), target.on_object(o)))
            .collect();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(choices.len());
        enumerate_rec(&dom, &cod, source, target, &choices, &mut current, &mut out);
        out
    }
}

fn enumerate_rec(
    dom: &FinCategory,
    cod: &FinCategory,
    source: &FinFunctor,
    target: &FinFunctor,
    choices: &[&[Arr]],
    current: &mut Vec<Arr>,
    out: &mut Vec<NatTransform>,
) {
    let k = current.len();
    if k == choices.len() {
        out.push(NatTransform {
            source: source.clone(),
            target: target.clone(),
            components: current.clone(),
        });
        return;
    }
    'next: for &c in choices[k] {
        current.push(c);
        // check squares whose endpoints are both decided
        let o = Obj(k as u32);
        for &m in dom.outgoing(o).iter().chain(dom.incoming(o)) {
            let (s, t) = (dom.src(m), dom.dst(m));
            if s.index() > k || t.index() > k {
                continue;
            }
            let lhs = cod.compose(target.on_arrow(m), current[s.index()]);
            let rhs = cod.compose(current[t.index()], source.on_arrow(m));
            if lhs != rhs {
                current.pop();
                continue 'next;
            }
        }
        enumerate_rec(dom, cod, source, target, choices, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::fixtures::c2;

    #[test]
    fn identity_and_terminal_functors_are_valid() {
        let c = Arc::new(c2());
        assert!(FinFunctor::identity(c.clone()).validate().is_ok());
        let one = Arc::new(FinCategory::terminal());
        assert!(FinFunctor::to_terminal(c, one).validate().is_ok());
    }

    #[test]
    fn wrong_endpoint_is_not_functorial() {
        let c = Arc::new(c2());
        let a = c.object_by_name("a").unwrap();
        let b = c.object_by_name("b").unwrap();
        let f = c.arrow_by_name("f").unwrap();
        let arrows = c
            .arrow_ids()
            .map(|x| if x == f { c.identity(a) } else { x })
            .collect();
        let func = FinFunctor::new(c.clone(), c.clone(), vec![a, b], arrows).unwrap();
        assert_eq!(
            func.validate(),
            Err(FunctorError::NotFunctorial(FunctorViolation::Endpoints { arrow: "f".into() }))
        );
    }

    #[test]
    fn nat_between_constant_functors() {
        let c = Arc::new(c2());
        let a = c.object_by_name("a").unwrap();
        let b = c.object_by_name("b").unwrap();
        let f = c.arrow_by_name("f").unwrap();
        let ka = FinFunctor::constant(c.clone(), c.clone(), a);
        let kb = FinFunctor::constant(c.clone(), c.clone(), b);
        assert!(NatTransform::new_validated(ka.clone(), kb.clone(), vec![f, f]).is_ok());
        let bad = NatTransform::new(ka.clone(), kb.clone(), vec![c.identity(a), f]).unwrap();
        assert_eq!(bad.validate(), Err(NatError::BadComponent { object: "a".into() }));
        assert_eq!(NatTransform::enumerate(&ka, &kb).len(), 1);
        assert!(NatTransform::identity(ka).validate().is_ok());
    }

    #[test]
    fn composition_of_functors() {
        let c = Arc::new(c2());
        let one = Arc::new(FinCategory::terminal());
        let id = FinFunctor::identity(c.clone());
        let bang = FinFunctor::to_terminal(c.clone(), one.clone());
        let composite = id.then(&bang).unwrap();
        assert!(composite.validate().is_ok());
        assert!(bang.then(&id).is_err());
    }
}
