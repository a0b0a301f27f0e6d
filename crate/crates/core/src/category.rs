//! Finite categories with an explicit composition table.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an object in its category's declared order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Obj(pub u32);

/// Index of an arrow in its category's declared order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arr(pub u32);

impl Obj {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Arr {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("duplicate arrow `{0}`")]
    DuplicateArrow(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("object `{object}` has no identity arrow")]
    MissingIdentity { object: String },
    #[error("identity law fails: `{identity}` composed with `{arrow}` declared as `{found}`")]
    BadIdentity {
        identity: String,
        arrow: String,
        found: String,
    },
    #[error("arrows `{g}` and `{f}` are not composable")]
    NotComposable { g: String, f: String },
    #[error("composite of `{g}` after `{f}` declared as `{found}`, which has the wrong endpoints")]
    BadComposite { g: String, f: String, found: String },
    #[error("composite of `{g}` after `{f}` declared twice")]
    DuplicateComposite { g: String, f: String },
    #[error("missing composite of `{g}` after `{f}`")]
    MissingComposite { g: String, f: String },
    #[error("composition is not associative on `{h}`, `{g}`, `{f}`")]
    NonAssociative { h: String, g: String, f: String },
}

/// A category description by names: the raw input of [`FinCategory::from_description`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDescription {
    pub objects: Vec<String>,
    /// `(id, source, target)` for every arrow, identities included.
    pub arrows: Vec<(String, String, String)>,
    /// `(object, identity arrow)`.
    pub identities: Vec<(String, String)>,
    /// `(g, f, g∘f)`; entries involving an identity may be omitted.
    pub compose: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ArrowInfo {
    name: String,
    src: Obj,
    dst: Obj,
}

/// A finite category. Objects and arrows are kept in declared order, and every
/// enumeration in this crate follows that order.
#[derive(Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<ArrowInfo>,
    identities: Vec<Arr>,
    incoming: Vec<Vec<Arr>>,
    outgoing: Vec<Vec<Arr>>,
    hom: Vec<Vec<Arr>>,
    // position of each arrow inside `incoming[dst]`
    in_pos: Vec<u32>,
    // table[g][in_pos[f]] = g∘f for every f with dst(f) = src(g)
    table: Vec<Vec<Arr>>,
    object_index: HashMap<String, Obj>,
    arrow_index: HashMap<String, Arr>,
}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.objects)
            .field("arrows", &self.arrows.len())
            .finish()
    }
}

/// Incremental construction of a [`FinCategory`] by indices.
#[derive(Debug, Default, Clone)]
pub struct CategoryBuilder {
    objects: Vec<String>,
    arrows: Vec<ArrowInfo>,
    identities: Vec<Option<Arr>>,
    composites: HashMap<(Arr, Arr), Arr>,
    duplicate: Option<(Arr, Arr)>,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_object(&mut self, name: impl Into<String>) -> Obj {
        self.objects.push(name.into());
        self.identities.push(None);
        Obj(self.objects.len() as u32 - 1)
    }

    pub fn add_arrow(&mut self, name: impl Into<String>, src: Obj, dst: Obj) -> Arr {
        self.arrows.push(ArrowInfo {
            name: name.into(),
            src,
            dst,
        });
        Arr(self.arrows.len() as u32 - 1)
    }

    /// Adds an arrow `id_<obj>` style identity and registers it.
    pub fn add_identity(&mut self, name: impl Into<String>, obj: Obj) -> Arr {
        let a = self.add_arrow(name, obj, obj);
        self.identities[obj.index()] = Some(a);
        a
    }

    pub fn set_identity(&mut self, obj: Obj, arrow: Arr) {
        self.identities[obj.index()] = Some(arrow);
    }

    pub fn set_composite(&mut self, g: Arr, f: Arr, gf: Arr) {
        if self.composites.insert((g, f), gf).is_some() && self.duplicate.is_none() {
            self.duplicate = Some((g, f));
        }
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    /// Builds and validates every category law exhaustively.
    pub fn build(self) -> Result<FinCategory, CategoryError> {
        let cat = self.assemble()?;
        cat.check_associativity()?;
        Ok(cat)
    }

    /// Builds with identity, endpoint and totality checks but skips the cubic
    /// associativity sweep. Used for categories constructed from valid ones.
    pub fn build_trusted(self) -> Result<FinCategory, CategoryError> {
        self.assemble()
    }

    fn assemble(self) -> Result<FinCategory, CategoryError> {
        let CategoryBuilder {
            objects,
            arrows,
            identities,
            mut composites,
            duplicate,
        } = self;
        let name = |a: Arr| arrows[a.index()].name.clone();

        let mut object_index = HashMap::with_capacity(objects.len());
        for (i, o) in objects.iter().enumerate() {
            if object_index.insert(o.clone(), Obj(i as u32)).is_some() {
                return Err(CategoryError::DuplicateObject(o.clone()));
            }
        }
        let mut arrow_index = HashMap::with_capacity(arrows.len());
        for (i, a) in arrows.iter().enumerate() {
            if arrow_index.insert(a.name.clone(), Arr(i as u32)).is_some() {
                return Err(CategoryError::DuplicateArrow(a.name.clone()));
            }
        }
        if let Some((g, f)) = duplicate {
            return Err(CategoryError::DuplicateComposite {
                g: name(g),
                f: name(f),
            });
        }

        let mut ids = Vec::with_capacity(objects.len());
        for (i, id) in identities.iter().enumerate() {
            match id {
                Some(a) if arrows[a.index()].src.index() == i && arrows[a.index()].dst.index() == i => {
                    ids.push(*a)
                }
                _ => {
                    return Err(CategoryError::MissingIdentity {
                        object: objects[i].clone(),
                    })
                }
            }
        }

        // Declared entries: composability, identity laws, endpoints.
        let mut entries: Vec<_> = composites.iter().map(|(&k, &v)| (k, v)).collect();
        entries.sort();
        for &((g, f), gf) in &entries {
            let (gi, fi, gfi) = (&arrows[g.index()], &arrows[f.index()], &arrows[gf.index()]);
            if fi.dst != gi.src {
                return Err(CategoryError::NotComposable {
                    g: name(g),
                    f: name(f),
                });
            }
            if ids[gi.src.index()] == g && gf != f {
                return Err(CategoryError::BadIdentity {
                    identity: name(g),
                    arrow: name(f),
                    found: name(gf),
                });
            }
            if ids[fi.dst.index()] == f && gf != g {
                return Err(CategoryError::BadIdentity {
                    identity: name(f),
                    arrow: name(g),
                    found: name(gf),
                });
            }
            if gfi.src != fi.src || gfi.dst != gi.dst {
                return Err(CategoryError::BadComposite {
                    g: name(g),
                    f: name(f),
                    found: name(gf),
                });
            }
        }
        // Identity composites are implied.
        for (i, a) in arrows.iter().enumerate() {
            let a_id = Arr(i as u32);
            composites.entry((ids[a.dst.index()], a_id)).or_insert(a_id);
            composites.entry((a_id, ids[a.src.index()])).or_insert(a_id);
        }

        let n_obj = objects.len();
        let mut incoming = vec![Vec::new(); n_obj];
        let mut outgoing = vec![Vec::new(); n_obj];
        let mut hom = vec![Vec::new(); n_obj * n_obj];
        let mut in_pos = vec![0u32; arrows.len()];
        for (i, a) in arrows.iter().enumerate() {
            let id = Arr(i as u32);
            in_pos[i] = incoming[a.dst.index()].len() as u32;
            incoming[a.dst.index()].push(id);
            outgoing[a.src.index()].push(id);
            hom[a.src.index() * n_obj + a.dst.index()].push(id);
        }

        let mut table = Vec::with_capacity(arrows.len());
        for (gi, g) in arrows.iter().enumerate() {
            let into_src = &incoming[g.src.index()];
            let mut row = Vec::with_capacity(into_src.len());
            for &f in into_src {
                match composites.get(&(Arr(gi as u32), f)) {
                    Some(&gf) => row.push(gf),
                    None => {
                        return Err(CategoryError::MissingComposite {
                            g: g.name.clone(),
                            f: name(f),
                        })
                    }
                }
            }
            table.push(row);
        }

        Ok(FinCategory {
            objects,
            arrows,
            identities: ids,
            incoming,
            outgoing,
            hom,
            in_pos,
            table,
            object_index,
            arrow_index,
        })
    }
}

impl FinCategory {
    /// Validates a named description: identities, endpoints, totality of the
    /// composition table, identity laws and associativity.
    pub fn from_description(desc: &CategoryDescription) -> Result<Self, CategoryError> {
        let mut b = CategoryBuilder::new();
        let mut objs = HashMap::new();
        for o in &desc.objects {
            if objs.insert(o.as_str(), b.add_object(o.clone())).is_some() {
                return Err(CategoryError::DuplicateObject(o.clone()));
            }
        }
        let obj = |name: &str| {
            objs.get(name)
                .copied()
                .ok_or_else(|| CategoryError::UnknownObject(name.to_string()))
        };
        let mut arrs = HashMap::new();
        for (id, s, t) in &desc.arrows {
            let a = b.add_arrow(id.clone(), obj(s)?, obj(t)?);
            if arrs.insert(id.as_str(), a).is_some() {
                return Err(CategoryError::DuplicateArrow(id.clone()));
            }
        }
        let arr = |name: &str| {
            arrs.get(name)
                .copied()
                .ok_or_else(|| CategoryError::UnknownArrow(name.to_string()))
        };
        for (o, a) in &desc.identities {
            b.set_identity(obj(o)?, arr(a)?);
        }
        for (g, f, gf) in &desc.compose {
            b.set_composite(arr(g)?, arr(f)?, arr(gf)?);
        }
        b.build()
    }

    /// The category with no objects.
    pub fn empty() -> Self {
        CategoryBuilder::new().build().expect("empty category")
    }

    /// The terminal category `1` with object `*`.
    pub fn terminal() -> Self {
        let mut b = CategoryBuilder::new();
        let o = b.add_object("*");
        b.add_identity("id:*", o);
        b.build().expect("terminal category")
    }

    /// The discrete category on the given object names.
    pub fn discrete<S: AsRef<str>>(names: &[S]) -> Self {
        let mut b = CategoryBuilder::new();
        for n in names {
            let o = b.add_object(n.as_ref());
            b.add_identity(format!("id:{}", n.as_ref()), o);
        }
        b.build().expect("discrete category")
    }

    pub fn description(&self) -> CategoryDescription {
        let mut compose = Vec::new();
        for g in self.arrow_ids() {
            for f in self.incoming(self.src(g)).iter().copied() {
                if self.is_identity(g) || self.is_identity(f) {
                    continue;
                }
                compose.push((
                    self.arrow_name(g).to_string(),
                    self.arrow_name(f).to_string(),
                    self.arrow_name(self.compose(g, f)).to_string(),
                ));
            }
        }
        CategoryDescription {
            objects: self.objects.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| {
                    (
                        a.name.clone(),
                        self.objects[a.src.index()].clone(),
                        self.objects[a.dst.index()].clone(),
                    )
                })
                .collect(),
            identities: self
                .object_ids()
                .map(|o| {
                    (
                        self.object_name(o).to_string(),
                        self.arrow_name(self.identity(o)).to_string(),
                    )
                })
                .collect(),
            compose,
        }
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_ids(&self) -> impl DoubleEndedIterator<Item = Obj> + ExactSizeIterator {
        (0..self.objects.len() as u32).map(Obj)
    }

    pub fn arrow_ids(&self) -> impl DoubleEndedIterator<Item = Arr> + ExactSizeIterator {
        (0..self.arrows.len() as u32).map(Arr)
    }

    pub fn object_name(&self, o: Obj) -> &str {
        &self.objects[o.index()]
    }

    pub fn arrow_name(&self, a: Arr) -> &str {
        &self.arrows[a.index()].name
    }

    pub fn object_by_name(&self, name: &str) -> Option<Obj> {
        self.object_index.get(name).copied()
    }

    pub fn arrow_by_name(&self, name: &str) -> Option<Arr> {
        self.arrow_index.get(name).copied()
    }

    #[inline]
    pub fn src(&self, a: Arr) -> Obj {
        self.arrows[a.index()].src
    }

    #[inline]
    pub fn dst(&self, a: Arr) -> Obj {
        self.arrows[a.index()].dst
    }

    #[inline]
    pub fn identity(&self, o: Obj) -> Arr {
        self.identities[o.index()]
    }

    #[inline]
    pub fn is_identity(&self, a: Arr) -> bool {
        self.identities[self.src(a).index()] == a
    }

    /// Arrows with codomain `o`, in declared order.
    #[inline]
    pub fn incoming(&self, o: Obj) -> &[Arr] {
        &self.incoming[o.index()]
    }

    /// Arrows with domain `o`, in declared order.
    #[inline]
    pub fn outgoing(&self, o: Obj) -> &[Arr] {
        &self.outgoing[o.index()]
    }

    #[inline]
    pub fn hom(&self, x: Obj, y: Obj) -> &[Arr] {
        &self.hom[x.index() * self.objects.len() + y.index()]
    }

    /// Position of `a` in `incoming(dst(a))`.
    #[inline]
    pub fn incoming_position(&self, a: Arr) -> usize {
        self.in_pos[a.index()] as usize
    }

    /// `g ∘ f`. Panics when `dst(f) != src(g)`.
    #[inline]
    pub fn compose(&self, g: Arr, f: Arr) -> Arr {
        assert_eq!(
            self.dst(f),
            self.src(g),
            "composing non-composable arrows {} and {}",
            self.arrow_name(g),
            self.arrow_name(f)
        );
        self.table[g.index()][self.in_pos[f.index()] as usize]
    }

    pub fn try_compose(&self, g: Arr, f: Arr) -> Option<Arr> {
        (self.dst(f) == self.src(g)).then(|| self.table[g.index()][self.in_pos[f.index()] as usize])
    }

    /// The inverse of `a`, if `a` is an isomorphism.
    pub fn inverse(&self, a: Arr) -> Option<Arr> {
        let (s, t) = (self.src(a), self.dst(a));
        self.hom(t, s)
            .iter()
            .copied()
            .find(|&b| self.compose(b, a) == self.identity(s) && self.compose(a, b) == self.identity(t))
    }

    pub fn is_iso(&self, a: Arr) -> bool {
        self.inverse(a).is_some()
    }

    /// Checks identity laws and associativity exhaustively.
    pub fn validate(&self) -> Result<(), CategoryError> {
        for f in self.arrow_ids() {
            let (s, t) = (self.src(f), self.dst(f));
            for (id, g, gf) in [
                (self.identity(t), f, self.compose(self.identity(t), f)),
                (self.identity(s), f, self.compose(f, self.identity(s))),
            ] {
                if gf != g {
                    return Err(CategoryError::BadIdentity {
                        identity: self.arrow_name(id).into(),
                        arrow: self.arrow_name(g).into(),
                        found: self.arrow_name(gf).into(),
                    });
                }
            }
        }
        for g in self.arrow_ids() {
            for &f in self.incoming(self.src(g)) {
                let gf = self.compose(g, f);
                if self.src(gf) != self.src(f) || self.dst(gf) != self.dst(g) {
                    return Err(CategoryError::BadComposite {
                        g: self.arrow_name(g).into(),
                        f: self.arrow_name(f).into(),
                        found: self.arrow_name(gf).into(),
                    });
                }
            }
        }
        self.check_associativity()
    }

    fn check_associativity(&self) -> Result<(), CategoryError> {
        for h in self.arrow_ids() {
            for &g in self.incoming(self.src(h)) {
                let hg = self.compose(h, g);
                for &f in self.incoming(self.src(g)) {
                    if self.compose(h, self.compose(g, f)) != self.compose(hg, f) {
                        return Err(CategoryError::NonAssociative {
                            h: self.arrow_name(h).into(),
                            g: self.arrow_name(g).into(),
                            f: self.arrow_name(f).into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Connected components under the symmetric-transitive closure of "there is
    /// an arrow between". Components are listed by their least object, each in
    /// declared order.
    pub fn connected_components(&self) -> Vec<Vec<Obj>> {
        let labels = self.component_labels();
        let mut comps: Vec<Vec<Obj>> = Vec::new();
        for o in self.object_ids() {
            let l = labels[o.index()];
            if l == comps.len() {
                comps.push(Vec::new());
            }
            comps[l].push(o);
        }
        comps
    }

    /// For each object, the index of its connected component (numbered in order
    /// of first appearance).
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.object_count()];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in self.object_ids() {
            if label[start.index()] != usize::MAX {
                continue;
            }
            label[start.index()] = next;
            stack.push(start);
            while let Some(o) = stack.pop() {
                let neighbours = self
                    .outgoing(o)
                    .iter()
                    .map(|&a| self.dst(a))
                    .chain(self.incoming(o).iter().map(|&a| self.src(a)));
                for n in neighbours {
                    if label[n.index()] == usize::MAX {
                        label[n.index()] = next;
                        stack.push(n);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Display form `name: src -> dst`.
    pub fn describe_arrow(&self, a: Arr) -> String {
        format!(
            "{}: {} -> {}",
            self.arrow_name(a),
            self.object_name(self.src(a)),
            self.object_name(self.dst(a))
        )
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// `a --f--> b`.
    pub fn c2() -> FinCategory {
        FinCategory::from_description(&CategoryDescription {
            objects: vec!["a".into(), "b".into()],
            arrows: vec![
                ("id:a".into(), "a".into(), "a".into()),
                ("id:b".into(), "b".into(), "b".into()),
                ("f".into(), "a".into(), "b".into()),
            ],
            identities: vec![("a".into(), "id:a".into()), ("b".into(), "id:b".into())],
            compose: vec![],
        })
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::c2;
    use super::*;

    fn desc_c2(extra: Vec<(&str, &str, &str)>) -> CategoryDescription {
        let mut d = c2().description();
        d.compose = extra
            .into_iter()
            .map(|(g, f, h)| (g.to_string(), f.to_string(), h.to_string()))
            .collect();
        d
    }

    #[test]
    fn terminal_has_one_arrow() {
        let t = FinCategory::terminal();
        assert_eq!(t.object_count(), 1);
        assert_eq!(t.arrow_count(), 1);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn c2_with_explicit_identity_composites() {
        let cat = FinCategory::from_description(&desc_c2(vec![("f", "id:a", "f"), ("id:b", "f", "f")])).unwrap();
        let f = cat.arrow_by_name("f").unwrap();
        assert_eq!(cat.compose(f, cat.identity(cat.src(f))), f);
        assert_eq!(cat.hom(cat.object_by_name("a").unwrap(), cat.object_by_name("b").unwrap()), &[f]);
    }

    #[test]
    fn wrong_identity_composite_is_reported() {
        let err = FinCategory::from_description(&desc_c2(vec![("f", "id:a", "id:b")])).unwrap_err();
        assert!(matches!(err, CategoryError::BadIdentity { .. }), "{err:?}");
    }

    #[test]
    fn missing_composite_is_reported() {
        // a -f-> b -g-> c without g∘f
        let d = CategoryDescription {
            objects: vec!["a".into(), "b".into(), "c".into()],
            arrows: vec![
                ("id:a".into(), "a".into(), "a".into()),
                ("id:b".into(), "b".into(), "b".into()),
                ("id:c".into(), "c".into(), "c".into()),
                ("f".into(), "a".into(), "b".into()),
                ("g".into(), "b".into(), "c".into()),
            ],
            identities: vec![
                ("a".into(), "id:a".into()),
                ("b".into(), "id:b".into()),
                ("c".into(), "id:c".into()),
            ],
            compose: vec![],
        };
        let err = FinCategory::from_description(&d).unwrap_err();
        assert_eq!(
            err,
            CategoryError::MissingComposite {
                g: "g".into(),
                f: "f".into()
            }
        );
    }

    #[test]
    fn non_associative_monoid_is_rejected() {
        // one object, arrows id, x, y with x∘x = y, x∘y = x, y∘x = y, y∘y = y:
        // (x∘x)∘y = y∘y = y but x∘(x∘y) = x∘x = y; try (x∘y)∘x = x∘x = y vs x∘(y∘x) = x∘y = x.
        let d = CategoryDescription {
            objects: vec!["o".into()],
            arrows: vec![
                ("id:o".into(), "o".into(), "o".into()),
                ("x".into(), "o".into(), "o".into()),
                ("y".into(), "o".into(), "o".into()),
            ],
            identities: vec![("o".into(), "id:o".into())],
            compose: vec![
                ("x".into(), "x".into(), "y".into()),
                ("x".into(), "y".into(), "x".into()),
                ("y".into(), "x".into(), "y".into()),
                ("y".into(), "y".into(), "y".into()),
            ],
        };
        let err = FinCategory::from_description(&d).unwrap_err();
        assert!(matches!(err, CategoryError::NonAssociative { .. }), "{err:?}");
    }

    #[test]
    fn unknown_names_are_reported() {
        let mut d = c2().description();
        d.compose.push(("f".into(), "nope".into(), "f".into()));
        assert_eq!(
            FinCategory::from_description(&d).unwrap_err(),
            CategoryError::UnknownArrow("nope".into())
        );
    }

    #[test]
    fn components() {
        assert_eq!(FinCategory::discrete(&["a", "b"]).connected_components().len(), 2);
        assert_eq!(c2().connected_components().len(), 1);
        assert_eq!(FinCategory::empty().connected_components().len(), 0);
        assert_eq!(FinCategory::terminal().connected_components().len(), 1);
    }

    #[test]
    fn isomorphisms() {
        let cat = c2();
        let f = cat.arrow_by_name("f").unwrap();
        assert!(!cat.is_iso(f));
        assert!(cat.is_iso(cat.identity(cat.src(f))));
    }
}
