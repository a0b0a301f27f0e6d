//! JSON workspace files: named categories, functors, transformations,
//! topologies, indexed categories and relative problems.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use relsite_core::{
    giraud_topology, CategoryDescription, CategoryError, FinCategory, FinFunctor, IndexedCategory, NatTransform,
    RelativeProblem, Sieve, SitePair, Topology, TotalCategory,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("{location}: unresolved reference `{name}`")]
    UnresolvedReference { location: String, name: String },
    #[error("{location}: {message}")]
    ValidationError { location: String, message: String },
}

fn unresolved(location: impl Into<String>, name: impl Into<String>) -> LoadError {
    LoadError::UnresolvedReference {
        location: location.into(),
        name: name.into(),
    }
}

fn invalid(location: impl Into<String>, message: impl ToString) -> LoadError {
    LoadError::ValidationError {
        location: location.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<CategoryDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functors: Vec<FunctorDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nat_transforms: Vec<NatDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub topologies: Vec<TopologyDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indexed: Vec<IndexedDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub problems: Vec<ProblemDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDecl {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// Identities are implicit and named `id:<object>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDecl {
    pub name: String,
    pub objects: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowDecl>,
    /// `[g, f, g∘f]`; pairs involving an identity are implied.
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
}

/// Identity arrows may be left out of `on_arrows`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub on_objects: BTreeMap<String, String>,
    #[serde(default)]
    pub on_arrows: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NatDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub components: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GiraudDecl {
    pub indexed: String,
    pub base: String,
}

/// Exactly one of `covers` (every covering sieve, as member lists), `basis`
/// (generating sieves, as generator lists) or `giraud` must be given. A
/// `giraud` topology lives on the total category named after the indexed
/// category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDecl {
    pub name: String,
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers: Option<BTreeMap<String, Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BTreeMap<String, Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub giraud: Option<GiraudDecl>,
}

/// Fibers by base object, transitions by base arrow (identities implied).
/// Loading registers the total category under `name` and its projection as
/// the functor `<name>.projection`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexedDecl {
    pub name: String,
    pub base: String,
    pub fibers: BTreeMap<String, String>,
    #[serde(default)]
    pub transitions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideDecl {
    pub topology: String,
    pub functor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDecl {
    pub name: String,
    /// Topology on the base category.
    pub base: String,
    pub left: SideDecl,
    pub right: SideDecl,
    #[serde(rename = "A")]
    pub a: String,
    pub phi: String,
}

/// A loaded and fully validated workspace.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub file: WorkspaceFile,
    pub categories: BTreeMap<String, Arc<FinCategory>>,
    pub functors: BTreeMap<String, FinFunctor>,
    pub nat_transforms: BTreeMap<String, NatTransform>,
    pub topologies: BTreeMap<String, Topology>,
    pub indexed: BTreeMap<String, TotalCategory>,
    pub problems: BTreeMap<String, RelativeProblem>,
}

impl PartialEq for Workspace {
    fn eq(&self, other: &Self) -> bool {
        self.file == other.file
            && self.categories == other.categories
            && self.functors == other.functors
            && self.nat_transforms == other.nat_transforms
            && self.topologies == other.topologies
            && self.indexed.keys().eq(other.indexed.keys())
            && self.problems.keys().eq(other.problems.keys())
    }
}

pub fn load_workspace(path: impl AsRef<Path>) -> Result<Workspace, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_workspace(&text)
}

pub fn parse_workspace(text: &str) -> Result<Workspace, LoadError> {
    let file: WorkspaceFile = serde_json::from_str(text).map_err(|e| LoadError::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    resolve(file)
}

pub fn serialize(ws: &Workspace) -> String {
    serialize_file(&ws.file)
}

pub fn serialize_file(file: &WorkspaceFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("workspace files serialize");
    s.push('\n');
    s
}

fn identity_name(object: &str) -> String {
    format!("id:{object}")
}

fn build_category(decl: &CategoryDecl) -> Result<FinCategory, LoadError> {
    let loc = format!("categories[{}]", decl.name);
    let mut desc = CategoryDescription {
        objects: decl.objects.clone(),
        ..Default::default()
    };
    let mut declared: HashMap<&str, (&str, &str)> = HashMap::new();
    for (i, a) in decl.arrows.iter().enumerate() {
        for end in [&a.src, &a.dst] {
            if !decl.objects.contains(end) {
                return Err(unresolved(format!("{loc}.arrows[{i}]"), end));
            }
        }
        if declared.insert(&a.id, (&a.src, &a.dst)).is_some() {
            return Err(invalid(format!("{loc}.arrows[{i}]"), format!("duplicate arrow `{}`", a.id)));
        }
    }
    for o in &decl.objects {
        let id = identity_name(o);
        match declared.get(id.as_str()) {
            Some(&(s, t)) if s == o && t == o => {}
            Some(_) => return Err(invalid(&loc, format!("`{id}` is reserved for the identity of `{o}`"))),
            None => desc.arrows.push((id.clone(), o.clone(), o.clone())),
        }
        desc.identities.push((o.clone(), id));
    }
    desc.arrows
        .extend(decl.arrows.iter().map(|a| (a.id.clone(), a.src.clone(), a.dst.clone())));
    for (i, [g, f, gf]) in decl.compose.iter().enumerate() {
        for name in [g, f, gf] {
            if !desc.arrows.iter().any(|(id, _, _)| id == name) {
                return Err(unresolved(format!("{loc}.compose[{i}]"), name));
            }
        }
        desc.compose.push((g.clone(), f.clone(), gf.clone()));
    }
    FinCategory::from_description(&desc).map_err(|e| match e {
        CategoryError::UnknownArrow(n) | CategoryError::UnknownObject(n) => unresolved(&loc, n),
        e => invalid(&loc, e),
    })
}

struct Resolver {
    categories: BTreeMap<String, Arc<FinCategory>>,
    functors: BTreeMap<String, FinFunctor>,
    nat_transforms: BTreeMap<String, NatTransform>,
    topologies: BTreeMap<String, Topology>,
    indexed: BTreeMap<String, TotalCategory>,
}

impl Resolver {
    fn category(&self, loc: &str, name: &str) -> Result<&Arc<FinCategory>, LoadError> {
        self.categories.get(name).ok_or_else(|| unresolved(loc, name))
    }

    fn functor(&self, loc: &str, name: &str) -> Result<&FinFunctor, LoadError> {
        self.functors.get(name).ok_or_else(|| unresolved(loc, name))
    }

    fn topology(&self, loc: &str, name: &str) -> Result<&Topology, LoadError> {
        self.topologies.get(name).ok_or_else(|| unresolved(loc, name))
    }

    fn add_category(&mut self, loc: &str, name: &str, cat: Arc<FinCategory>) -> Result<(), LoadError> {
        if self.categories.insert(name.to_string(), cat).is_some() {
            return Err(invalid(loc, format!("duplicate category `{name}`")));
        }
        Ok(())
    }

    fn add_functor(&mut self, loc: &str, name: &str, f: FinFunctor) -> Result<(), LoadError> {
        if self.functors.insert(name.to_string(), f).is_some() {
            return Err(invalid(loc, format!("duplicate functor `{name}`")));
        }
        Ok(())
    }

    fn build_functor(&self, decl: &FunctorDecl) -> Result<FinFunctor, LoadError> {
        let loc = format!("functors[{}]", decl.name);
        let src = self.category(&loc, &decl.source)?.clone();
        let tgt = self.category(&loc, &decl.target)?.clone();
        for (k, v) in &decl.on_objects {
            src.object_by_name(k).ok_or_else(|| unresolved(format!("{loc}.on_objects"), k))?;
            tgt.object_by_name(v).ok_or_else(|| unresolved(format!("{loc}.on_objects"), v))?;
        }
        for (k, v) in &decl.on_arrows {
            src.arrow_by_name(k).ok_or_else(|| unresolved(format!("{loc}.on_arrows"), k))?;
            tgt.arrow_by_name(v).ok_or_else(|| unresolved(format!("{loc}.on_arrows"), v))?;
        }
        let mut objects = Vec::with_capacity(src.object_count());
        for o in src.object_ids() {
            let name = src.object_name(o);
            let image = decl
                .on_objects
                .get(name)
                .ok_or_else(|| invalid(&loc, format!("object `{name}` has no image")))?;
            objects.push(tgt.object_by_name(image).expect("checked above"));
        }
        let mut arrows = Vec::with_capacity(src.arrow_count());
        for a in src.arrow_ids() {
            let name = src.arrow_name(a);
            let image = match decl.on_arrows.get(name) {
                Some(image) => tgt.arrow_by_name(image).expect("checked above"),
                None if src.is_identity(a) => tgt.identity(objects[src.src(a).index()]),
                None => return Err(invalid(&loc, format!("arrow `{name}` has no image"))),
            };
            arrows.push(image);
        }
        FinFunctor::new_validated(src, tgt, objects, arrows).map_err(|e| invalid(&loc, e))
    }

    fn build_indexed(&self, decl: &IndexedDecl) -> Result<TotalCategory, LoadError> {
        let loc = format!("indexed[{}]", decl.name);
        let base = self.category(&loc, &decl.base)?.clone();
        for k in decl.fibers.keys() {
            base.object_by_name(k).ok_or_else(|| unresolved(format!("{loc}.fibers"), k))?;
        }
        for k in decl.transitions.keys() {
            base.arrow_by_name(k).ok_or_else(|| unresolved(format!("{loc}.transitions"), k))?;
        }
        let mut fibers = Vec::with_capacity(base.object_count());
        for c in base.object_ids() {
            let name = base.object_name(c);
            let fiber = decl
                .fibers
                .get(name)
                .ok_or_else(|| invalid(&loc, format!("object `{name}` has no fiber")))?;
            fibers.push(self.category(&format!("{loc}.fibers"), fiber)?.clone());
        }
        let mut transitions = Vec::with_capacity(base.arrow_count());
        for g in base.arrow_ids() {
            let name = base.arrow_name(g);
            let t = match decl.transitions.get(name) {
                Some(f) => self.functor(&format!("{loc}.transitions"), f)?.clone(),
                None if base.is_identity(g) => FinFunctor::identity(fibers[base.src(g).index()].clone()),
                None => return Err(invalid(&loc, format!("arrow `{name}` has no transition functor"))),
            };
            transitions.push(t);
        }
        let indexed = IndexedCategory::new(base, fibers, transitions).map_err(|e| invalid(&loc, e))?;
        Ok(TotalCategory::new(indexed))
    }

    fn build_topology(&self, decl: &TopologyDecl) -> Result<Topology, LoadError> {
        let loc = format!("topologies[{}]", decl.name);
        let cat = self.category(&loc, &decl.category)?.clone();
        let sieves = |map: &BTreeMap<String, Vec<Vec<String>>>, closed: bool| -> Result<Vec<Vec<Sieve>>, LoadError> {
            let mut out = vec![Vec::new(); cat.object_count()];
            for (obj, list) in map {
                let c = cat.object_by_name(obj).ok_or_else(|| unresolved(&loc, obj))?;
                for (i, names) in list.iter().enumerate() {
                    let at = format!("{loc}.{obj}[{i}]");
                    let arrows = names
                        .iter()
                        .map(|n| cat.arrow_by_name(n).ok_or_else(|| unresolved(&at, n)))
                        .collect::<Result<Vec<_>, _>>()?;
                    let s = if closed {
                        Sieve::from_arrows(&cat, c, &arrows)
                    } else {
                        Sieve::generate(&cat, c, &arrows)
                    };
                    out[c.index()].push(s.map_err(|e| invalid(&at, e))?);
                }
            }
            Ok(out)
        };
        match (&decl.covers, &decl.basis, &decl.giraud) {
            (Some(covers), None, None) => {
                Topology::new_validated(cat.clone(), sieves(covers, true)?).map_err(|e| invalid(&loc, e))
            }
            (None, Some(basis), None) => {
                Topology::generate(cat.clone(), &sieves(basis, false)?).map_err(|e| invalid(&loc, e))
            }
            (None, None, Some(g)) => {
                let total = self.indexed.get(&g.indexed).ok_or_else(|| unresolved(&loc, &g.indexed))?;
                if g.indexed != decl.category {
                    return Err(invalid(
                        &loc,
                        format!("a Giraud topology lives on `{}`, not `{}`", g.indexed, decl.category),
                    ));
                }
                let base = self.topology(&loc, &g.base)?;
                if base.category() != total.indexed().base() {
                    return Err(invalid(&loc, format!("`{}` is not a topology on the base of `{}`", g.base, g.indexed)));
                }
                Ok(giraud_topology(total, base))
            }
            _ => Err(invalid(&loc, "give exactly one of `covers`, `basis` or `giraud`")),
        }
    }

    fn build_nat(&self, decl: &NatDecl) -> Result<NatTransform, LoadError> {
        let loc = format!("nat_transforms[{}]", decl.name);
        let f = self.functor(&loc, &decl.source)?.clone();
        let g = self.functor(&loc, &decl.target)?.clone();
        let (src, tgt) = (f.source().clone(), f.target().clone());
        let mut components = Vec::with_capacity(src.object_count());
        for o in src.object_ids() {
            let name = src.object_name(o);
            let a = decl
                .components
                .get(name)
                .ok_or_else(|| invalid(&loc, format!("object `{name}` has no component")))?;
            components.push(tgt.arrow_by_name(a).ok_or_else(|| unresolved(&loc, a))?);
        }
        for k in decl.components.keys() {
            src.object_by_name(k).ok_or_else(|| unresolved(&loc, k))?;
        }
        NatTransform::new_validated(f, g, components).map_err(|e| invalid(&loc, e))
    }

    fn build_problem(&self, decl: &ProblemDecl) -> Result<RelativeProblem, LoadError> {
        let loc = format!("problems[{}]", decl.name);
        let site = |t: &str| -> Result<SitePair, LoadError> {
            let t = self.topology(&loc, t)?;
            SitePair::new(t.category().clone(), t.clone()).map_err(|e| invalid(&loc, e))
        };
        let nat = self
            .nat_transforms
            .get(&decl.phi)
            .ok_or_else(|| unresolved(&loc, &decl.phi))?;
        RelativeProblem::new(
            site(&decl.base)?,
            site(&decl.left.topology)?,
            self.functor(&loc, &decl.left.functor)?.clone(),
            site(&decl.right.topology)?,
            self.functor(&loc, &decl.right.functor)?.clone(),
            self.functor(&loc, &decl.a)?.clone(),
            nat.clone(),
        )
        .map_err(|e| invalid(&loc, e))
    }
}

fn resolve(file: WorkspaceFile) -> Result<Workspace, LoadError> {
    let mut r = Resolver {
        categories: BTreeMap::new(),
        functors: BTreeMap::new(),
        nat_transforms: BTreeMap::new(),
        topologies: BTreeMap::new(),
        indexed: BTreeMap::new(),
    };
    for decl in &file.categories {
        let cat = Arc::new(build_category(decl)?);
        r.add_category(&format!("categories[{}]", decl.name), &decl.name, cat)?;
    }

    // Functors and indexed categories may refer to each other; resolve in
    // rounds until nothing changes, then report the first blocked item.
    let mut functors: Vec<&FunctorDecl> = file.functors.iter().collect();
    let mut indexed: Vec<&IndexedDecl> = file.indexed.iter().collect();
    loop {
        let before = functors.len() + indexed.len();
        let mut blocked = Vec::new();
        for decl in functors {
            match r.build_functor(decl) {
                Ok(f) => r.add_functor(&format!("functors[{}]", decl.name), &decl.name, f)?,
                Err(LoadError::UnresolvedReference { .. }) => blocked.push(decl),
                Err(e) => return Err(e),
            }
        }
        functors = blocked;
        let mut blocked = Vec::new();
        for decl in indexed {
            match r.build_indexed(decl) {
                Ok(total) => {
                    let loc = format!("indexed[{}]", decl.name);
                    r.add_category(&loc, &decl.name, total.carrier().clone())?;
                    r.add_functor(&loc, &format!("{}.projection", decl.name), total.projection().clone())?;
                    r.indexed.insert(decl.name.clone(), total);
                }
                Err(LoadError::UnresolvedReference { .. }) => blocked.push(decl),
                Err(e) => return Err(e),
            }
        }
        indexed = blocked;
        if functors.len() + indexed.len() == before || functors.len() + indexed.len() == 0 {
            break;
        }
    }
    if let Some(decl) = functors.first() {
        r.build_functor(decl)?;
    }
    if let Some(decl) = indexed.first() {
        r.build_indexed(decl)?;
    }

    for decl in &file.nat_transforms {
        let n = r.build_nat(decl)?;
        if r.nat_transforms.insert(decl.name.clone(), n).is_some() {
            return Err(invalid(format!("nat_transforms[{}]", decl.name), "duplicate name"));
        }
    }
    // Giraud topologies refer to other topologies; same round scheme.
    let mut pending: Vec<&TopologyDecl> = file.topologies.iter().collect();
    loop {
        let before = pending.len();
        let mut blocked = Vec::new();
        for decl in pending {
            match r.build_topology(decl) {
                Ok(t) => {
                    if r.topologies.insert(decl.name.clone(), t).is_some() {
                        return Err(invalid(format!("topologies[{}]", decl.name), "duplicate name"));
                    }
                }
                Err(LoadError::UnresolvedReference { .. }) => blocked.push(decl),
                Err(e) => return Err(e),
            }
        }
        pending = blocked;
        if pending.is_empty() || pending.len() == before {
            break;
        }
    }
    if let Some(decl) = pending.first() {
        r.build_topology(decl)?;
    }

    let mut problems = BTreeMap::new();
    for decl in &file.problems {
        let p = r.build_problem(decl)?;
        if problems.insert(decl.name.clone(), p).is_some() {
            return Err(invalid(format!("problems[{}]", decl.name), "duplicate name"));
        }
    }
    Ok(Workspace {
        file,
        categories: r.categories,
        functors: r.functors,
        nat_transforms: r.nat_transforms,
        topologies: r.topologies,
        indexed: r.indexed,
        problems,
    })
}

/// Declarations for in-memory objects, for writing corpus instances out.
pub mod decl {
    use super::*;

    /// Fails when an identity is not named `id:<object>`.
    pub fn category(name: &str, cat: &FinCategory) -> Option<CategoryDecl> {
        let desc = cat.description();
        for (o, id) in &desc.identities {
            if *id != identity_name(o) {
                return None;
            }
        }
        Some(CategoryDecl {
            name: name.into(),
            objects: desc.objects,
            arrows: desc
                .arrows
                .into_iter()
                .filter(|(id, s, t)| !(s == t && *id == identity_name(s)))
                .map(|(id, src, dst)| ArrowDecl { id, src, dst })
                .collect(),
            compose: desc.compose.into_iter().map(|(g, f, gf)| [g, f, gf]).collect(),
        })
    }

    pub fn functor(name: &str, source: &str, target: &str, f: &FinFunctor) -> FunctorDecl {
        let (src, tgt) = (f.source(), f.target());
        FunctorDecl {
            name: name.into(),
            source: source.into(),
            target: target.into(),
            on_objects: src
                .object_ids()
                .map(|o| (src.object_name(o).into(), tgt.object_name(f.on_object(o)).into()))
                .collect(),
            on_arrows: src
                .arrow_ids()
                .filter(|&a| !src.is_identity(a))
                .map(|a| (src.arrow_name(a).into(), tgt.arrow_name(f.on_arrow(a)).into()))
                .collect(),
        }
    }

    pub fn nat(name: &str, source: &str, target: &str, n: &NatTransform) -> NatDecl {
        let (src, tgt) = (n.source().source(), n.source().target());
        NatDecl {
            name: name.into(),
            source: source.into(),
            target: target.into(),
            components: src
                .object_ids()
                .map(|o| (src.object_name(o).into(), tgt.arrow_name(n.component(o)).into()))
                .collect(),
        }
    }

    pub fn topology(name: &str, category: &str, t: &Topology) -> TopologyDecl {
        let cat = t.category();
        TopologyDecl {
            name: name.into(),
            category: category.into(),
            covers: Some(
                cat.object_ids()
                    .map(|c| (cat.object_name(c).into(), t.covering(c).map(|s| s.names(cat)).collect()))
                    .collect(),
            ),
            basis: None,
            giraud: None,
        }
    }

    /// A self-contained file holding one relative problem named `name`.
    pub fn problem(name: &str, prob: &RelativeProblem) -> Option<WorkspaceFile> {
        let mut file = WorkspaceFile::default();
        for (n, cat) in [("C", prob.base().category()), ("D", prob.left().category()), ("E", prob.right().category())] {
            file.categories.push(category(n, cat)?);
        }
        file.functors.push(functor("p", "D", "C", prob.p()));
        file.functors.push(functor("q", "E", "C", prob.p_prime()));
        file.functors.push(functor("A", "D", "E", prob.a()));
        let qa = prob.a().then(prob.p_prime()).expect("composable");
        file.functors.push(functor("qA", "D", "C", &qa));
        file.nat_transforms.push(nat("phi", "qA", "p", prob.phi()));
        file.topologies.push(topology("J", "C", prob.base().topology()));
        file.topologies.push(topology("K", "D", prob.left().topology()));
        file.topologies.push(topology("L", "E", prob.right().topology()));
        file.problems.push(ProblemDecl {
            name: name.into(),
            base: "J".into(),
            left: SideDecl {
                topology: "K".into(),
                functor: "p".into(),
            },
            right: SideDecl {
                topology: "L".into(),
                functor: "q".into(),
            },
            a: "A".into(),
            phi: "phi".into(),
        });
        Some(file)
    }
}
