//! Comma categories `(F ↓ G)`, materialized up front.
//!
//! For `F: X → Z` and `G: Y → Z`, an object is a triple `(x, y, u: F(x) → G(y))`
//! and an arrow `(x, y, u) → (x', y', u')` is a pair `(m: x → x', n: y → y')`
//! with `G(n) ∘ u = u' ∘ F(m)`. The over-object, over-identity and
//! arrow-from-object shapes are instances with a terminal leg.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::category::{Arr, CategoryBuilder, FinCategory, Obj};
use crate::functor::FinFunctor;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommaError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("functors do not share a codomain")]
    CodomainMismatch,
}

/// Which construction produced a comma category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommaShape {
    /// `(p ↓ c)`: left leg `p`, right leg the point `c`.
    OverObject(Obj),
    /// `(p ↓ 1_C)`.
    OverIdentity,
    /// `(d0 ↓ F)`: left leg the point `d0`, right leg `F`.
    FromObject(Obj),
    /// A general `(F ↓ G)`.
    General,
}

/// Constituents of a comma object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommaObject {
    pub left: Obj,
    pub right: Obj,
    pub arrow: Arr,
}

/// Constituents of a comma arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommaArrow {
    pub left: Arr,
    pub right: Arr,
}

/// A comma category together with the tags of its objects and arrows and its
/// two projection functors.
#[derive(Debug, Clone)]
pub struct CommaCategory {
    shape: CommaShape,
    carrier: Arc<FinCategory>,
    objects: Vec<CommaObject>,
    arrows: Vec<CommaArrow>,
    object_index: HashMap<CommaObject, Obj>,
    left: FinFunctor,
    right: FinFunctor,
    middle: Arc<FinCategory>,
}

impl CommaCategory {
    /// `(F ↓ G)`.
    pub fn new(f: &FinFunctor, g: &FinFunctor) -> Result<Self, CommaError> {
        Self::build(f, g, CommaShape::General)
    }

    fn build(f: &FinFunctor, g: &FinFunctor, shape: CommaShape) -> Result<Self, CommaError> {
        let z = f.target().clone();
        if !(Arc::ptr_eq(&z, g.target()) || *z == **g.target()) {
            return Err(CommaError::CodomainMismatch);
        }
        let (xc, yc) = (f.source().clone(), g.source().clone());

        let name_obj = |o: &CommaObject| -> String {
            match shape {
                CommaShape::OverObject(_) => {
                    format!("({},{})", xc.object_name(o.left), z.arrow_name(o.arrow))
                }
                CommaShape::FromObject(_) => {
                    format!("({},{})", yc.object_name(o.right), z.arrow_name(o.arrow))
                }
                _ => format!(
                    "({},{},{})",
                    xc.object_name(o.left),
                    yc.object_name(o.right),
                    z.arrow_name(o.arrow)
                ),
            }
        };

        let mut b = CategoryBuilder::new();
        let mut objects = Vec::new();
        let mut object_index = HashMap::new();
        for x in xc.object_ids() {
            for y in yc.object_ids() {
                for &u in z.hom(f.on_object(x), g.on_object(y)) {
                    let o = CommaObject { left: x, right: y, arrow: u };
                    let id = b.add_object(name_obj(&o));
                    object_index.insert(o, id);
                    objects.push(o);
                }
            }
        }

        // Arrows grouped by source object, then target object, then (m, n).
        let mut arrows = Vec::new();
        let mut arrow_index: HashMap<(Obj, Obj, Arr, Arr), Arr> = HashMap::new();
        for (si, so) in objects.iter().enumerate() {
            let mut out: Vec<(Obj, Arr, Arr)> = Vec::new();
            for &m in xc.outgoing(so.left) {
                let fm = f.on_arrow(m);
                for &n in yc.outgoing(so.right) {
                    let gnu = z.compose(g.on_arrow(n), so.arrow);
                    for &u2 in z.hom(f.on_object(xc.dst(m)), g.on_object(yc.dst(n))) {
                        if z.compose(u2, fm) == gnu {
                            let t = object_index[&CommaObject {
                                left: xc.dst(m),
                                right: yc.dst(n),
                                arrow: u2,
                            }];
                            out.push((t, m, n));
                        }
                    }
                }
            }
            out.sort();
            let s = Obj(si as u32);
            for (t, m, n) in out {
                let name = if xc.is_identity(m) && yc.is_identity(n) && t == s {
                    format!("id:{}", name_obj(so))
                } else {
                    match shape {
                        CommaShape::OverObject(_) => {
                            format!("{}:{}->{}", xc.arrow_name(m), name_obj(so), name_obj(&objects[t.index()]))
                        }
                        CommaShape::FromObject(_) => {
                            format!("{}:{}->{}", yc.arrow_name(n), name_obj(so), name_obj(&objects[t.index()]))
                        }
                        _ => format!(
                            "({},{}):{}->{}",
                            xc.arrow_name(m),
                            yc.arrow_name(n),
                            name_obj(so),
                            name_obj(&objects[t.index()])
                        ),
                    }
                };
                let a = b.add_arrow(name, s, t);
                if xc.is_identity(m) && yc.is_identity(n) && t == s {
                    b.set_identity(s, a);
                }
                arrow_index.insert((s, t, m, n), a);
                arrows.push(CommaArrow { left: m, right: n });
            }
        }

        let n_arrows = arrows.len();
        let mut tgt = vec![Obj(0); n_arrows];
        let mut src = vec![Obj(0); n_arrows];
        for (&(s, t, _, _), &a) in &arrow_index {
            src[a.index()] = s;
            tgt[a.index()] = t;
        }
        // composites: (m', n') ∘ (m, n) = (m'm, n'n)
        let mut by_source: Vec<Vec<Arr>> = vec![Vec::new(); objects.len()];
        for a in 0..n_arrows {
            by_source[src[a].index()].push(Arr(a as u32));
        }
        for a in 0..n_arrows {
            let first = arrows[a];
            let mid = tgt[a];
            for &second in &by_source[mid.index()] {
                let sa = arrows[second.index()];
                let key = (
                    src[a],
                    tgt[second.index()],
                    xc.compose(sa.left, first.left),
                    yc.compose(sa.right, first.right),
                );
                let c = arrow_index[&key];
                b.set_composite(second, Arr(a as u32), c);
            }
        }
        let carrier = Arc::new(b.build_trusted().expect("comma categories are well formed"));

        let left = FinFunctor::new(
            carrier.clone(),
            xc.clone(),
            objects.iter().map(|o| o.left).collect(),
            arrows.iter().map(|a| a.left).collect(),
        )
        .expect("left projection");
        let right = FinFunctor::new(
            carrier.clone(),
            yc.clone(),
            objects.iter().map(|o| o.right).collect(),
            arrows.iter().map(|a| a.right).collect(),
        )
        .expect("right projection");

        Ok(Self {
            shape,
            carrier,
            objects,
            arrows,
            object_index,
            left,
            right,
            middle: z,
        })
    }

    /// `(p ↓ c)`: objects `(d, u: p(d) → c)`.
    pub fn over_object(p: &FinFunctor, c: Obj) -> Result<Self, CommaError> {
        let base = p.target();
        if c.index() >= base.object_count() {
            return Err(CommaError::UnknownObject(format!("#{}", c.0)));
        }
        let point = FinFunctor::point(base.clone(), c);
        Self::build(p, &point, CommaShape::OverObject(c))
    }

    /// `(p ↓ 1_C)`: objects `(d, c, u: p(d) → c)`.
    pub fn over_identity(p: &FinFunctor) -> Self {
        let id = FinFunctor::identity(p.target().clone());
        Self::build(p, &id, CommaShape::OverIdentity).expect("shared codomain")
    }

    /// `(d0 ↓ F)`: objects `(x, h: d0 → F(x))`.
    pub fn from_object(d0: Obj, f: &FinFunctor) -> Result<Self, CommaError> {
        let target = f.target();
        if d0.index() >= target.object_count() {
            return Err(CommaError::UnknownObject(format!("#{}", d0.0)));
        }
        let point = FinFunctor::point(target.clone(), d0);
        Self::build(&point, f, CommaShape::FromObject(d0))
    }

    pub fn shape(&self) -> CommaShape {
        self.shape
    }

    pub fn carrier(&self) -> &Arc<FinCategory> {
        &self.carrier
    }

    /// The category both legs land in.
    pub fn middle(&self) -> &Arc<FinCategory> {
        &self.middle
    }

    #[inline]
    pub fn object(&self, o: Obj) -> CommaObject {
        self.objects[o.index()]
    }

    #[inline]
    pub fn arrow(&self, a: Arr) -> CommaArrow {
        self.arrows[a.index()]
    }

    pub fn objects(&self) -> &[CommaObject] {
        &self.objects
    }

    pub fn find(&self, left: Obj, right: Obj, arrow: Arr) -> Option<Obj> {
        self.object_index.get(&CommaObject { left, right, arrow }).copied()
    }

    /// Projection to the source of the left leg.
    pub fn left_projection(&self) -> &FinFunctor {
        &self.left
    }

    /// Projection to the source of the right leg.
    pub fn right_projection(&self) -> &FinFunctor {
        &self.right
    }

    /// The projection to the category the comma lives over: the left leg's
    /// source for every shape except [`CommaShape::FromObject`].
    pub fn primary_projection(&self) -> &FinFunctor {
        match self.shape {
            CommaShape::FromObject(_) => &self.right,
            _ => &self.left,
        }
    }

    /// Locates the comma arrow `(m, n)` out of `source` landing in `target`.
    pub fn find_arrow(&self, source: Obj, target: Obj, left: Arr, right: Arr) -> Option<Arr> {
        self.carrier
            .hom(source, target)
            .iter()
            .copied()
            .find(|&a| self.arrows[a.index()] == CommaArrow { left, right })
    }
}
