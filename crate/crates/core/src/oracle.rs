//! Finite presheaves, colimits of representables, pointwise left Kan
//! extension, the comparison map on representables, local surjectivity and
//! injectivity, and sheafification by the plus construction.
//!
//! Nothing here calls into the combinatorial checkers.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::{Arr, FinCategory, Obj};
use crate::comma::CommaCategory;
use crate::functor::FinFunctor;
use crate::relative::RelativeProblem;
use crate::topology::{Sieve, Topology};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("unknown object #{0}")]
    UnknownObject(u32),
    #[error("wrong number of section sets or restriction maps")]
    Shape,
    #[error("restriction along `{arrow}` is malformed")]
    BadRestriction { arrow: String },
    #[error("restriction along an identity is not the identity at `{object}`")]
    NotUnital { object: String },
    #[error("restriction does not respect composition at `{g}` after `{f}`")]
    NotFunctorial { g: String, f: String },
    #[error("component at `{object}` is malformed")]
    BadComponent { object: String },
    #[error("not natural along `{arrow}`")]
    NotNatural { arrow: String },
    #[error("presheaves live on different categories")]
    CategoryMismatch,
}

/// A presheaf of finite sets. Sections at `x` are `0..size(x)` with display
/// labels; `restriction[f]` maps sections at `dst f` to sections at `src f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinPresheaf {
    category: Arc<FinCategory>,
    labels: Vec<Vec<String>>,
    restriction: Vec<Vec<usize>>,
}

impl FinPresheaf {
    pub fn new(
        category: Arc<FinCategory>,
        labels: Vec<Vec<String>>,
        restriction: Vec<Vec<usize>>,
    ) -> Result<Self, PresheafError> {
        let p = Self {
            category,
            labels,
            restriction,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PresheafError> {
        let cat = &*self.category;
        if self.labels.len() != cat.object_count() || self.restriction.len() != cat.arrow_count() {
            return Err(PresheafError::Shape);
        }
        for f in cat.arrow_ids() {
            let r = &self.restriction[f.index()];
            let n = self.size(cat.src(f));
            if r.len() != self.size(cat.dst(f)) || r.iter().any(|&i| i >= n) {
                return Err(PresheafError::BadRestriction {
                    arrow: cat.arrow_name(f).into(),
                });
            }
        }
        for x in cat.object_ids() {
            let r = &self.restriction[cat.identity(x).index()];
            if r.iter().enumerate().any(|(i, &j)| i != j) {
                return Err(PresheafError::NotUnital {
                    object: cat.object_name(x).into(),
                });
            }
        }
        for g in cat.arrow_ids() {
            for &f in cat.incoming(cat.src(g)) {
                let gf = cat.compose(g, f);
                for s in 0..self.size(cat.dst(g)) {
                    if self.restrict(gf, s) != self.restrict(f, self.restrict(g, s)) {
                        return Err(PresheafError::NotFunctorial {
                            g: cat.arrow_name(g).into(),
                            f: cat.arrow_name(f).into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    pub fn size(&self, x: Obj) -> usize {
        self.labels[x.index()].len()
    }

    pub fn label(&self, x: Obj, s: usize) -> &str {
        &self.labels[x.index()][s]
    }

    pub fn labels(&self, x: Obj) -> &[String] {
        &self.labels[x.index()]
    }

    /// `P(f)(s)` for `f: x → y` and `s ∈ P(y)`.
    #[inline]
    pub fn restrict(&self, f: Arr, s: usize) -> usize {
        self.restriction[f.index()][s]
    }

    /// The presheaf with no sections anywhere.
    pub fn empty(category: Arc<FinCategory>) -> Self {
        Self {
            labels: vec![Vec::new(); category.object_count()],
            restriction: vec![Vec::new(); category.arrow_count()],
            category,
        }
    }

    /// Coproduct `P ⊔ Q`, sections of `P` first.
    pub fn coproduct(&self, other: &FinPresheaf) -> Self {
        let cat = &self.category;
        let labels = cat
            .object_ids()
            .map(|x| {
                let mut l: Vec<String> = self.labels(x).iter().map(|s| format!("0.{s}")).collect();
                l.extend(other.labels(x).iter().map(|s| format!("1.{s}")));
                l
            })
            .collect();
        let restriction = cat
            .arrow_ids()
            .map(|f| {
                let shift = self.size(cat.src(f));
                let mut r = self.restriction[f.index()].clone();
                r.extend(other.restriction[f.index()].iter().map(|&i| i + shift));
                r
            })
            .collect();
        Self {
            category: cat.clone(),
            labels,
            restriction,
        }
    }
}

/// A natural transformation between presheaves on one category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresheafMorphism {
    source: FinPresheaf,
    target: FinPresheaf,
    components: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub fn new(source: FinPresheaf, target: FinPresheaf, components: Vec<Vec<usize>>) -> Result<Self, PresheafError> {
        let m = Self {
            source,
            target,
            components,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(p: FinPresheaf) -> Self {
        let components = p.category.object_ids().map(|x| (0..p.size(x)).collect()).collect();
        Self {
            source: p.clone(),
            target: p,
            components,
        }
    }

    pub fn validate(&self) -> Result<(), PresheafError> {
        let cat = &*self.source.category;
        if !(Arc::ptr_eq(&self.source.category, &self.target.category) || *self.source.category == *self.target.category)
        {
            return Err(PresheafError::CategoryMismatch);
        }
        if self.components.len() != cat.object_count() {
            return Err(PresheafError::Shape);
        }
        for x in cat.object_ids() {
            let c = &self.components[x.index()];
            if c.len() != self.source.size(x) || c.iter().any(|&t| t >= self.target.size(x)) {
                return Err(PresheafError::BadComponent {
                    object: cat.object_name(x).into(),
                });
            }
        }
        for f in cat.arrow_ids() {
            for s in 0..self.source.size(cat.dst(f)) {
                let down_then_across = self.apply(cat.src(f), self.source.restrict(f, s));
                let across_then_down = self.target.restrict(f, self.apply(cat.dst(f), s));
                if down_then_across != across_then_down {
                    return Err(PresheafError::NotNatural {
                        arrow: cat.arrow_name(f).into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &FinPresheaf {
        &self.source
    }

    pub fn target(&self) -> &FinPresheaf {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: Obj, s: usize) -> usize {
        self.components[x.index()][s]
    }

    pub fn is_bijective(&self) -> bool {
        self.source.category.object_ids().all(|x| {
            let c = &self.components[x.index()];
            let mut seen = vec![false; self.target.size(x)];
            c.len() == seen.len() && c.iter().all(|&t| !std::mem::replace(&mut seen[t], true))
        })
    }
}

/// `Y(c) = Hom(−, c)`.
pub fn representable(cat: Arc<FinCategory>, c: Obj) -> Result<FinPresheaf, PresheafError> {
    if c.index() >= cat.object_count() {
        return Err(PresheafError::UnknownObject(c.0));
    }
    let labels = cat
        .object_ids()
        .map(|x| cat.hom(x, c).iter().map(|&h| cat.arrow_name(h).to_string()).collect())
        .collect();
    let restriction = cat
        .arrow_ids()
        .map(|f| {
            let here = cat.hom(cat.src(f), c);
            cat.hom(cat.dst(f), c)
                .iter()
                .map(|&s| {
                    let sf = cat.compose(s, f);
                    here.iter().position(|&h| h == sf).expect("composite in hom-set")
                })
                .collect()
        })
        .collect();
    Ok(FinPresheaf {
        category: cat,
        labels,
        restriction,
    })
}

/// `P ∘ p^op`.
pub fn restrict_along(p: &FinFunctor, presheaf: &FinPresheaf) -> FinPresheaf {
    let d = p.source();
    FinPresheaf {
        category: d.clone(),
        labels: d.object_ids().map(|x| presheaf.labels(p.on_object(x)).to_vec()).collect(),
        restriction: d
            .arrow_ids()
            .map(|f| presheaf.restriction[p.on_arrow(f).index()].clone())
            .collect(),
    }
}

/// Classes of a quotient at one object: members in declared order, each
/// mapped to its class; class ids follow the order of least members.
struct Quotient<K> {
    index: HashMap<K, usize>,
    class_of: Vec<usize>,
    representatives: Vec<usize>,
}

impl<K: std::hash::Hash + Eq + Clone> Quotient<K> {
    fn new(members: Vec<K>, relations: impl IntoIterator<Item = (K, K)>) -> (Self, Vec<K>) {
        let index: HashMap<K, usize> = members.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut uf = UnionFind::<usize>::new(members.len());
        for (a, b) in relations {
            uf.union(index[&a], index[&b]);
        }
        let mut class_of_root = HashMap::new();
        let mut class_of = Vec::with_capacity(members.len());
        let mut representatives = Vec::new();
        for i in 0..members.len() {
            let root = uf.find(i);
            let next = representatives.len();
            let c = *class_of_root.entry(root).or_insert(next);
            if c == next {
                representatives.push(i);
            }
            class_of.push(c);
        }
        (
            Self {
                index,
                class_of,
                representatives,
            },
            members,
        )
    }

    fn class(&self, k: &K) -> usize {
        self.class_of[self.index[k]]
    }

    fn len(&self) -> usize {
        self.representatives.len()
    }
}

/// `colim_i Y(F(i))` together with its cocone legs.
#[derive(Debug, Clone)]
pub struct Colimit {
    pub presheaf: FinPresheaf,
    /// `legs[x][(i, h)]`: the class of `h: x → F(i)`.
    pub legs: Vec<HashMap<(Obj, Arr), usize>>,
}

/// Pointwise: sections at `x` are pairs `(i, h: x → F(i))` modulo
/// `(i, h) ~ (j, F(α)∘h)` for `α: i → j`.
pub fn colimit_of_representables(diagram: &FinFunctor) -> Colimit {
    let (index, cat) = (diagram.source(), diagram.target());
    let mut labels = Vec::new();
    let mut quotients = Vec::new();
    let mut legs = Vec::new();
    for x in cat.object_ids() {
        let mut members = Vec::new();
        for i in index.object_ids() {
            for &h in cat.hom(x, diagram.on_object(i)) {
                members.push((i, h));
            }
        }
        let relations: Vec<_> = members
            .iter()
            .flat_map(|&(i, h)| {
                index
                    .outgoing(i)
                    .iter()
                    .map(move |&alpha| ((i, h), (index.dst(alpha), cat.compose(diagram.on_arrow(alpha), h))))
            })
            .collect();
        let (q, members) = Quotient::new(members, relations);
        labels.push(
            q.representatives
                .iter()
                .map(|&r| {
                    let (i, h) = members[r];
                    format!("[{},{}]", index.object_name(i), cat.arrow_name(h))
                })
                .collect(),
        );
        legs.push(members.iter().map(|k| (*k, q.class(k))).collect());
        quotients.push((q, members));
    }
    let restriction = cat
        .arrow_ids()
        .map(|f| {
            let (qy, my) = &quotients[cat.dst(f).index()];
            let (qx, _) = &quotients[cat.src(f).index()];
            qy.representatives
                .iter()
                .map(|&r| {
                    let (i, h) = my[r];
                    qx.class(&(i, cat.compose(h, f)))
                })
                .collect()
        })
        .collect();
    Colimit {
        presheaf: FinPresheaf {
            category: cat.clone(),
            labels,
            restriction,
        },
        legs,
    }
}

/// `Lan_{A^op} P` by the pointwise formula: sections at `x` are triples
/// `(d, h: x → A(d), s ∈ P(d))` modulo `(d, h, P(m)(s)) ~ (e, A(m)∘h, s)`.
pub fn left_kan_presheaf(a: &FinFunctor, presheaf: &FinPresheaf) -> FinPresheaf {
    let (d, d2) = (a.source(), a.target());
    let mut labels = Vec::new();
    let mut quotients = Vec::new();
    for x in d2.object_ids() {
        let mut members = Vec::new();
        for k in d.object_ids() {
            for &h in d2.hom(x, a.on_object(k)) {
                for s in 0..presheaf.size(k) {
                    members.push((k, h, s));
                }
            }
        }
        let mut relations = Vec::new();
        for &(k, h, _) in &members {
            for &m in d.outgoing(k) {
                let e = d.dst(m);
                let moved = d2.compose(a.on_arrow(m), h);
                for s in 0..presheaf.size(e) {
                    relations.push(((k, h, presheaf.restrict(m, s)), (e, moved, s)));
                }
            }
        }
        relations.sort();
        relations.dedup();
        let (q, members) = Quotient::new(members, relations);
        labels.push(
            q.representatives
                .iter()
                .map(|&r| {
                    let (k, h, s) = members[r];
                    format!("[{},{},{}]", d.object_name(k), d2.arrow_name(h), presheaf.label(k, s))
                })
                .collect(),
        );
        quotients.push((q, members));
    }
    let restriction = d2
        .arrow_ids()
        .map(|f| {
            let (qy, my) = &quotients[d2.dst(f).index()];
            let (qx, _) = &quotients[d2.src(f).index()];
            qy.representatives
                .iter()
                .map(|&r| {
                    let (k, h, s) = my[r];
                    qx.class(&(k, d2.compose(h, f), s))
                })
                .collect()
        })
        .collect();
    let out = FinPresheaf {
        category: d2.clone(),
        labels,
        restriction,
    };
    debug_assert!(out.validate().is_ok());
    out
}

/// The comparison `colim_{(d,v) ∈ (p↓c)} Y(A(d)) → Hom(p'(−), c)` sending the
/// class of `(d, v; h: x → A(d))` to `v ∘ φ_d ∘ p'(h)`.
pub fn build_phi_tilde(prob: &RelativeProblem, c: Obj) -> PresheafMorphism {
    let base = prob.base().category();
    let over = CommaCategory::over_object(prob.p(), c).expect("object of the base");
    let diagram = over.left_projection().then(prob.a()).expect("composable");
    let source = colimit_of_representables(&diagram);
    let target = restrict_along(prob.p_prime(), &representable(base.clone(), c).expect("object of the base"));
    let d2 = prob.right().category();
    let components = d2
        .object_ids()
        .map(|x| {
            let mut comp = vec![usize::MAX; source.presheaf.size(x)];
            for (&(i, h), &class) in &source.legs[x.index()] {
                let o = over.object(i);
                let d = o.left;
                let value = base.compose(
                    o.arrow,
                    base.compose(prob.phi().component(d), prob.p_prime().on_arrow(h)),
                );
                let t = base
                    .hom(prob.p_prime().on_object(x), c)
                    .iter()
                    .position(|&w| w == value)
                    .expect("arrow into c");
                debug_assert!(comp[class] == usize::MAX || comp[class] == t, "well defined on classes");
                comp[class] = t;
            }
            comp
        })
        .collect();
    PresheafMorphism::new(source.presheaf, target, components).expect("comparison is natural")
}

/// An object where a local condition fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFailure {
    pub object: String,
    pub sections: Vec<String>,
}

fn has_cover(top: &Topology, x: Obj, members: FixedBitSet) -> bool {
    let s = Sieve::from_members(x, members);
    top.covering(x).any(|t| t.is_subset(&s))
}

/// Every target section is, on some cover, in the image.
pub fn is_locally_surjective(m: &PresheafMorphism, top: &Topology) -> Verdict<LocalFailure> {
    let cat = &*m.source.category;
    let images: Vec<Vec<bool>> = cat
        .object_ids()
        .map(|z| {
            let mut hit = vec![false; m.target.size(z)];
            for &t in &m.components[z.index()] {
                hit[t] = true;
            }
            hit
        })
        .collect();
    for x in cat.object_ids() {
        for y in 0..m.target.size(x) {
            let mut members = FixedBitSet::with_capacity(cat.arrow_count());
            for &f in cat.incoming(x) {
                if images[cat.src(f).index()][m.target.restrict(f, y)] {
                    members.insert(f.index());
                }
            }
            if !has_cover(top, x, members) {
                return Verdict::fail(LocalFailure {
                    object: cat.object_name(x).into(),
                    sections: vec![m.target.label(x, y).into()],
                });
            }
        }
    }
    Verdict::pass()
}

/// Any two sections with the same image agree on some cover.
pub fn is_locally_injective(m: &PresheafMorphism, top: &Topology) -> Verdict<LocalFailure> {
    let cat = &*m.source.category;
    for x in cat.object_ids() {
        let n = m.source.size(x);
        for s1 in 0..n {
            for s2 in s1 + 1..n {
                if m.apply(x, s1) != m.apply(x, s2) {
                    continue;
                }
                let mut members = FixedBitSet::with_capacity(cat.arrow_count());
                for &f in cat.incoming(x) {
                    if m.source.restrict(f, s1) == m.source.restrict(f, s2) {
                        members.insert(f.index());
                    }
                }
                if !has_cover(top, x, members) {
                    return Verdict::fail(LocalFailure {
                        object: cat.object_name(x).into(),
                        sections: vec![m.source.label(x, s1).into(), m.source.label(x, s2).into()],
                    });
                }
            }
        }
    }
    Verdict::pass()
}

pub fn is_local_isomorphism(m: &PresheafMorphism, top: &Topology) -> Verdict<LocalFailure> {
    let s = is_locally_surjective(m, top);
    if !s.holds() {
        return s;
    }
    is_locally_injective(m, top)
}

const ABSENT: u32 = u32::MAX;

/// A matching family at `x`: a section per member of a sieve, indexed by the
/// position of the member among arrows into `x`; `ABSENT` off the sieve.
type Family = Vec<u32>;

/// Every matching family for `presheaf` on the sieve `s`.
fn matching_families(presheaf: &FinPresheaf, s: &Sieve) -> Vec<Family> {
    let cat = &*presheaf.category;
    let x = s.base();
    let incoming = cat.incoming(x);
    let members: Vec<usize> = (0..incoming.len()).filter(|&i| s.contains(incoming[i])).collect();
    let mut out = Vec::new();
    let mut family = vec![ABSENT; incoming.len()];
    fn go(
        presheaf: &FinPresheaf,
        incoming: &[Arr],
        members: &[usize],
        k: usize,
        family: &mut Family,
        out: &mut Vec<Family>,
    ) {
        let cat = &*presheaf.category;
        if k == members.len() {
            out.push(family.clone());
            return;
        }
        let pos = members[k];
        let f = incoming[pos];
        let z = cat.src(f);
        'choice: for v in 0..presheaf.size(z) {
            // compatible with every earlier member of the form f∘g or with f = earlier∘g
            for &q in &members[..k] {
                let e = incoming[q];
                let w = family[q] as usize;
                for &g in cat.hom(cat.src(e), z) {
                    if cat.compose(f, g) == e && presheaf.restrict(g, v) != w {
                        continue 'choice;
                    }
                }
                for &g in cat.hom(z, cat.src(e)) {
                    if cat.compose(e, g) == f && presheaf.restrict(g, w) != v {
                        continue 'choice;
                    }
                }
            }
            family[pos] = v as u32;
            go(presheaf, incoming, members, k + 1, family, out);
        }
        family[pos] = ABSENT;
    }
    go(presheaf, incoming, &members, 0, &mut family, &mut out);
    // full compatibility: P(g)(s_f) = s_{f∘g} for every member f and every g
    out.retain(|fam| {
        members.iter().all(|&pos| {
            let f = incoming[pos];
            cat.incoming(cat.src(f)).iter().all(|&g| {
                let fg = cat.compose(f, g);
                let q = cat.incoming_position(fg);
                fam[q] as usize == presheaf.restrict(g, fam[pos] as usize)
            })
        })
    });
    out
}

/// `P⁺` with the canonical map `P → P⁺`.
#[derive(Debug, Clone)]
pub struct Plus {
    pub presheaf: FinPresheaf,
    pub unit: PresheafMorphism,
    /// Per object, every family with its class.
    families: Vec<HashMap<Family, usize>>,
}

/// Matching families on covering sieves, identified when they agree on a
/// covering sieve.
pub fn plus_construction(presheaf: &FinPresheaf, top: &Topology) -> Plus {
    let cat = &presheaf.category;
    let mut labels = Vec::new();
    let mut families = Vec::new();
    let mut classes = Vec::new();
    for x in cat.object_ids() {
        let incoming = cat.incoming(x);
        let mut members: Vec<Family> = Vec::new();
        for s in top.covering(x) {
            members.extend(matching_families(presheaf, &s));
        }
        let mut relations = Vec::new();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let mut agree = FixedBitSet::with_capacity(cat.arrow_count());
                for (q, &f) in incoming.iter().enumerate() {
                    if members[i][q] != ABSENT && members[i][q] == members[j][q] {
                        agree.insert(f.index());
                    }
                }
                if has_cover(top, x, agree) {
                    relations.push((members[i].clone(), members[j].clone()));
                }
            }
        }
        let (q, members) = Quotient::new(members, relations);
        labels.push(
            q.representatives
                .iter()
                .map(|&r| family_label(presheaf, x, &members[r]))
                .collect::<Vec<_>>(),
        );
        families.push(members.iter().map(|m| (m.clone(), q.class(m))).collect::<HashMap<_, _>>());
        classes.push(q.len());
    }
    let restriction = cat
        .arrow_ids()
        .map(|h| {
            let (y, x) = (cat.src(h), cat.dst(h));
            let mut r = vec![usize::MAX; classes[x.index()]];
            for (fam, &class) in &families[x.index()] {
                if r[class] != usize::MAX {
                    continue;
                }
                r[class] = families[y.index()][&pull_family(cat, fam, h)];
            }
            r
        })
        .collect();
    let plus = FinPresheaf {
        category: cat.clone(),
        labels,
        restriction,
    };
    let unit = cat
        .object_ids()
        .map(|x| {
            (0..presheaf.size(x))
                .map(|s| {
                    let fam: Family = cat.incoming(x).iter().map(|&f| presheaf.restrict(f, s) as u32).collect();
                    families[x.index()][&fam]
                })
                .collect()
        })
        .collect();
    let unit = PresheafMorphism {
        source: presheaf.clone(),
        target: plus.clone(),
        components: unit,
    };
    debug_assert!(unit.validate().is_ok());
    Plus {
        presheaf: plus,
        unit,
        families,
    }
}

fn family_label(presheaf: &FinPresheaf, x: Obj, fam: &Family) -> String {
    let cat = &*presheaf.category;
    let parts: Vec<String> = cat
        .incoming(x)
        .iter()
        .zip(fam)
        .filter(|(_, &v)| v != ABSENT)
        .map(|(&f, &v)| format!("{}:{}", cat.arrow_name(f), presheaf.label(cat.src(f), v as usize)))
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// Restricts a family at `x` along `h: y → x`: `s'_g = s_{h∘g}` on `h*S`.
fn pull_family(cat: &FinCategory, fam: &Family, h: Arr) -> Family {
    let y = cat.src(h);
    cat.incoming(y)
        .iter()
        .map(|&g| fam[cat.incoming_position(cat.compose(h, g))])
        .collect()
}

impl Plus {
    /// `m⁺: P⁺ → Q⁺`, given `Q⁺`.
    pub fn map(&self, m: &PresheafMorphism, target: &Plus) -> PresheafMorphism {
        let cat = &self.presheaf.category;
        let components = cat
            .object_ids()
            .map(|x| {
                let mut comp = vec![usize::MAX; self.presheaf.size(x)];
                for (fam, &class) in &self.families[x.index()] {
                    if comp[class] != usize::MAX {
                        continue;
                    }
                    let moved: Family = cat
                        .incoming(x)
                        .iter()
                        .zip(fam)
                        .map(|(&f, &v)| if v == ABSENT { ABSENT } else { m.apply(cat.src(f), v as usize) as u32 })
                        .collect();
                    comp[class] = target.families[x.index()][&moved];
                }
                comp
            })
            .collect();
        PresheafMorphism {
            source: self.presheaf.clone(),
            target: target.presheaf.clone(),
            components,
        }
    }
}

/// `P⁺⁺`.
pub fn sheafify(presheaf: &FinPresheaf, top: &Topology) -> FinPresheaf {
    let once = plus_construction(presheaf, top);
    plus_construction(&once.presheaf, top).presheaf
}

/// `m⁺⁺`.
pub fn sheafify_morphism(m: &PresheafMorphism, top: &Topology) -> PresheafMorphism {
    let (p1, q1) = (plus_construction(&m.source, top), plus_construction(&m.target, top));
    let m1 = p1.map(m, &q1);
    let (p2, q2) = (plus_construction(&p1.presheaf, top), plus_construction(&q1.presheaf, top));
    p2.map(&m1, &q2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SheafFailure {
    NoAmalgamation { object: String, sieve: Vec<String> },
    ManyAmalgamations { object: String, sieve: Vec<String> },
}

/// Every matching family on a covering sieve has exactly one amalgamation.
pub fn is_sheaf(presheaf: &FinPresheaf, top: &Topology) -> Verdict<SheafFailure> {
    let cat = &*presheaf.category;
    for x in cat.object_ids() {
        for s in top.covering(x) {
            for fam in matching_families(presheaf, &s) {
                let count = (0..presheaf.size(x))
                    .filter(|&t| {
                        cat.incoming(x)
                            .iter()
                            .zip(&fam)
                            .all(|(&f, &v)| v == ABSENT || presheaf.restrict(f, t) == v as usize)
                    })
                    .count();
                let (object, sieve) = (cat.object_name(x).to_string(), s.names(cat));
                match count {
                    1 => {}
                    0 => return Verdict::fail(SheafFailure::NoAmalgamation { object, sieve }),
                    _ => return Verdict::fail(SheafFailure::ManyAmalgamations { object, sieve }),
                }
            }
        }
    }
    Verdict::pass()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::fixtures::c2;
    use crate::relative::fixtures::{identity_problem, neg, pos};
    use crate::topology::fixtures::j1;

    fn sizes(p: &FinPresheaf) -> Vec<usize> {
        p.category().object_ids().map(|x| p.size(x)).collect()
    }

    #[test]
    fn representables_on_c2() {
        let cat = Arc::new(c2());
        let yb = representable(cat.clone(), Obj(1)).unwrap();
        assert_eq!(yb.labels(Obj(0)), ["f"]);
        assert_eq!(yb.labels(Obj(1)), ["id:b"]);
        let ya = representable(cat.clone(), Obj(0)).unwrap();
        assert_eq!(sizes(&ya), [1, 0]);
        assert!(yb.validate().is_ok() && ya.validate().is_ok());
        let one = Arc::new(FinCategory::terminal());
        assert_eq!(sizes(&representable(one, Obj(0)).unwrap()), [1]);
        assert!(matches!(representable(cat, Obj(7)), Err(PresheafError::UnknownObject(7))));
    }

    #[test]
    fn restriction_examples() {
        let cat = Arc::new(c2());
        let yb = representable(cat.clone(), Obj(1)).unwrap();
        assert_eq!(restrict_along(&FinFunctor::identity(cat.clone()), &yb), yb);
        let ya = representable(cat.clone(), Obj(0)).unwrap();
        let p = FinFunctor::point(cat.clone(), Obj(1));
        assert_eq!(sizes(&restrict_along(&p, &ya)), [0]);
        let k = FinFunctor::constant(cat.clone(), cat.clone(), Obj(1));
        assert_eq!(sizes(&restrict_along(&k, &yb)), [1, 1]);
    }

    #[test]
    fn colimit_examples() {
        let cat = Arc::new(c2());
        let single = FinFunctor::point(cat.clone(), Obj(0));
        assert_eq!(sizes(&colimit_of_representables(&single).presheaf), [1, 0]);
        let all = colimit_of_representables(&FinFunctor::identity(cat.clone()));
        assert_eq!(sizes(&all.presheaf), [1, 1]);
        assert!(all.presheaf.validate().is_ok());
        let disc = Arc::new(FinCategory::discrete(&["i", "j"]));
        let two = FinFunctor::constant(disc, cat.clone(), Obj(0));
        assert_eq!(sizes(&colimit_of_representables(&two).presheaf), [2, 0]);
    }

    #[test]
    fn left_kan_examples() {
        let cat = Arc::new(c2());
        let yb = representable(cat.clone(), Obj(1)).unwrap();
        assert_eq!(sizes(&left_kan_presheaf(&FinFunctor::identity(cat.clone()), &yb)), [1, 1]);
        let one = Arc::new(FinCategory::terminal());
        let pt = FinFunctor::point(cat.clone(), Obj(1));
        let y = representable(one.clone(), Obj(0)).unwrap();
        assert_eq!(sizes(&left_kan_presheaf(&pt, &y)), sizes(&yb));
        assert_eq!(sizes(&left_kan_presheaf(&pt, &FinPresheaf::empty(one))), [0, 0]);
    }

    #[test]
    fn phi_tilde_on_fixtures() {
        let prob = identity_problem();
        for c in prob.base().category().object_ids() {
            assert!(build_phi_tilde(&prob, c).is_bijective());
        }
        let prob = neg();
        let m = build_phi_tilde(&prob, Obj(0));
        assert_eq!(sizes(m.source()), [0, 0]);
        assert_eq!(sizes(m.target()), [1, 0]);
        assert!(!is_locally_surjective(&m, prob.right().topology()).holds());
        assert!(!is_local_isomorphism(&m, prob.right().topology()).holds());
        assert!(build_phi_tilde(&pos(), Obj(0)).is_bijective());
    }

    #[test]
    fn local_conditions() {
        let cat = Arc::new(c2());
        let triv = Topology::trivial(cat.clone());
        let ya = representable(cat.clone(), Obj(0)).unwrap();
        let id = PresheafMorphism::identity(ya.clone());
        assert!(is_local_isomorphism(&id, &triv).holds());
        let empty = PresheafMorphism::new(FinPresheaf::empty(cat.clone()), ya.clone(), vec![vec![], vec![]]).unwrap();
        assert!(!is_locally_surjective(&empty, &triv).holds());
        assert!(is_locally_surjective(&empty, &Topology::discrete(cat.clone())).holds());
        let fold = PresheafMorphism::new(ya.coproduct(&ya), ya.clone(), vec![vec![0, 0], vec![]]).unwrap();
        assert!(is_locally_surjective(&fold, &triv).holds());
        assert!(!is_locally_injective(&fold, &triv).holds());
    }

    #[test]
    fn plus_construction_examples() {
        let cat = Arc::new(c2());
        let triv = Topology::trivial(cat.clone());
        let yb = representable(cat.clone(), Obj(1)).unwrap();
        assert_eq!(sizes(&plus_construction(&yb, &triv).presheaf), [1, 1]);
        assert!(plus_construction(&yb, &triv).unit.is_bijective());

        let j = j1();
        assert!(is_sheaf(&yb, &j).holds());
        let ya = representable(cat.clone(), Obj(0)).unwrap();
        assert!(!is_sheaf(&ya, &j).holds());
        let sh = sheafify(&ya, &j);
        assert_eq!(sizes(&sh), [1, 1]);
        assert!(is_sheaf(&sh, &j).holds());
        let m = sheafify_morphism(&PresheafMorphism::identity(ya), &j);
        assert!(m.is_bijective());
    }
}
