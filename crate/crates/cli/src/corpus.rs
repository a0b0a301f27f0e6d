//! Deterministic corpus of relative problems: an exhaustive part over tiny
//! categories and a seeded random part over larger ones.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relsite_core::{
    build_phi_tilde, check_comorphism, check_fibration_morphism, is_locally_surjective, relative_a_at, relative_verdict, CategoryBuilder,
    FinCategory, FinFunctor, NatTransform, Obj, RelativeProblem, SitePair, Topology, TotalCategory,
};
use serde::{Deserialize, Serialize};

use crate::enumerate::{categories, functors, indexed_categories, topologies};
use crate::workspace::{decl, WorkspaceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Objects of base and side categories in the exhaustive part.
    pub max_objects: usize,
    /// Arrows of base categories in the exhaustive part.
    pub max_arrows: usize,
    /// Arrows of the side categories `D`, `D'` in the exhaustive part.
    pub side_max_arrows: usize,
    /// Objects of base categories in the random part.
    pub random_max_objects: usize,
    /// Number of random problems.
    pub samples: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            max_objects: 2,
            max_arrows: 3,
            side_max_arrows: 2,
            random_max_objects: 4,
            samples: 500,
        }
    }
}

/// A named corpus problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub problem: RelativeProblem,
}

fn arcs(cats: Vec<FinCategory>) -> Vec<Arc<FinCategory>> {
    cats.into_iter().map(Arc::new).collect()
}

/// A comorphism `p: (D, K) → (C, J)` offered as one side of a problem.
#[derive(Clone)]
struct Side {
    site: SitePair,
    p: FinFunctor,
}

fn sides(cats: &[Arc<FinCategory>], tops: &[Vec<Topology>], j: &Topology) -> Vec<Side> {
    let c = j.category();
    let mut out = Vec::new();
    for (d, ks) in cats.iter().zip(tops) {
        for p in functors(d, c) {
            for k in ks {
                if check_comorphism(&p, k, j).holds() {
                    out.push(Side {
                        site: SitePair::new(d.clone(), k.clone()).expect("enumerated topology"),
                        p: p.clone(),
                    });
                }
            }
        }
    }
    out
}

/// Every problem over bases with at most `max_objects` objects and
/// `max_arrows` arrows and sides with at most `side_max_arrows` arrows.
pub fn exhaustive(bounds: &Bounds) -> Vec<Instance> {
    let bases = arcs(categories(bounds.max_objects, bounds.max_arrows, None).items);
    let side_cats = arcs(categories(bounds.max_objects, bounds.side_max_arrows, None).items);
    let side_tops: Vec<Vec<Topology>> = side_cats.iter().map(topologies).collect();
    let mut out = Vec::new();
    for (bi, c) in bases.iter().enumerate() {
        for (ji, j) in topologies(c).into_iter().enumerate() {
            let base = SitePair::new(c.clone(), j.clone()).expect("enumerated topology");
            let all = sides(&side_cats, &side_tops, &j);
            for (li, l) in all.iter().enumerate() {
                for (ri, r) in all.iter().enumerate() {
                    for (ai, a) in functors(l.site.category(), r.site.category()).into_iter().enumerate() {
                        let pa = a.then(&r.p).expect("composable");
                        for (fi, phi) in NatTransform::enumerate(&pa, &l.p).into_iter().enumerate() {
                            let problem = RelativeProblem::new(
                                base.clone(),
                                l.site.clone(),
                                l.p.clone(),
                                r.site.clone(),
                                r.p.clone(),
                                a.clone(),
                                phi,
                            )
                            .expect("enumerated problems are valid");
                            out.push(Instance {
                                name: format!("x{bi}.{ji}.{li}.{ri}.{ai}.{fi}"),
                                problem,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// A random thin category on `n` objects: the reflexive-transitive closure
/// of a random relation.
pub fn random_preorder(rng: &mut impl Rng, n: usize) -> FinCategory {
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = i == j || (i < j && rng.gen_bool(0.4));
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][k] && rel[k][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    let mut b = CategoryBuilder::new();
    let objs: Vec<Obj> = (0..n).map(|i| b.add_object(format!("o{i}"))).collect();
    let mut arrow = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if rel[i][j] {
                arrow[i][j] = Some(if i == j {
                    b.add_identity(format!("id:o{i}"), objs[i])
                } else {
                    b.add_arrow(format!("o{i}<o{j}"), objs[i], objs[j])
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if let (Some(f), Some(g)) = (arrow[i][j], arrow[j][k]) {
                    b.set_composite(g, f, arrow[i][k].expect("transitive"));
                }
            }
        }
    }
    b.build().expect("preorders are categories")
}

/// `samples` seeded problems with bases of up to `random_max_objects`
/// objects.
pub fn random(bounds: &Bounds, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = arcs(categories(2, 4, None).items);
    let mut side_pool = pool.clone();
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < bounds.samples && attempts < bounds.samples * 200 {
        attempts += 1;
        let c = if rng.gen_bool(0.5) {
            let n = rng.gen_range(1..=bounds.random_max_objects.max(1));
            Arc::new(random_preorder(&mut rng, n))
        } else {
            pool.choose(&mut rng).expect("nonempty pool").clone()
        };
        if side_pool.len() < pool.len() + 8 {
            let n = rng.gen_range(2..=3);
            side_pool.push(Arc::new(random_preorder(&mut rng, n)));
        }
        let js = topologies(&c);
        let j = js.choose(&mut rng).expect("trivial topology").clone();
        let Some(left) = random_side(&mut rng, &side_pool, &j) else { continue };
        let Some(right) = random_side(&mut rng, &side_pool, &j) else { continue };
        let as_ = functors(left.site.category(), right.site.category());
        let Some(a) = as_.choose(&mut rng).cloned() else { continue };
        let pa = a.then(&right.p).expect("composable");
        let phis = NatTransform::enumerate(&pa, &left.p);
        let Some(phi) = phis.choose(&mut rng).cloned() else { continue };
        let base = SitePair::new(c.clone(), j).expect("enumerated topology");
        let problem = RelativeProblem::new(base, left.site, left.p, right.site, right.p, a, phi)
            .expect("sampled problems are valid");
        out.push(Instance {
            name: format!("r{seed}.{}", out.len()),
            problem,
        });
    }
    out
}

fn random_side(rng: &mut ChaCha8Rng, pool: &[Arc<FinCategory>], j: &Topology) -> Option<Side> {
    let d = pool.choose(rng)?.clone();
    let p = functors(&d, j.category()).choose(rng)?.clone();
    let ks: Vec<Topology> = topologies(&d)
        .into_iter()
        .filter(|k| check_comorphism(&p, k, j).holds())
        .collect();
    let k = ks.choose(rng)?.clone();
    Some(Side {
        site: SitePair::new(d, k).expect("enumerated topology"),
        p,
    })
}

/// The exhaustive part followed by the random part.
pub fn enumerate_instances(bounds: &Bounds, seed: u64) -> Vec<Instance> {
    let mut out = exhaustive(bounds);
    out.extend(random(bounds, seed));
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub agree: usize,
    pub total: usize,
}

impl Agreement {
    fn record(&mut self, x: bool, y: bool) {
        self.total += 1;
        self.agree += usize::from(x == y);
    }

    fn merge(&mut self, other: Agreement) {
        self.agree += other.agree;
        self.total += other.total;
    }

    pub fn complete(&self) -> bool {
        self.agree == self.total
    }
}

/// Verdicts of one problem, in the order site morphism, cofinality,
/// filtered, fiberwise, diagonal, oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub name: String,
    pub flags: [bool; 6],
    pub discrepancy: bool,
    /// Per base object: relative condition (a) against local surjectivity of
    /// the comparison map.
    pub local_surjectivity: Agreement,
    pub disagreements: Vec<String>,
}

pub fn evaluate(inst: &Instance) -> Outcome {
    let prob = &inst.problem;
    let (v, discrepancy) = match relative_verdict(prob, true) {
        Ok(v) => (v, false),
        Err(e) => (*e.verdict, true),
    };
    let oracle = v.oracle.as_ref().is_some_and(|o| o.holds());
    let mut disagreements = v.disagreements.clone();
    let mut local = Agreement::default();
    let base = prob.base().category();
    for c in base.object_ids() {
        let a = relative_a_at(prob, c);
        let s = is_locally_surjective(&build_phi_tilde(prob, c), prob.right().topology()).holds();
        local.record(a, s);
        if a != s {
            disagreements.push(format!(
                "condition (a) vs local surjectivity at {}: {a} vs {s}",
                base.object_name(c)
            ));
        }
    }
    Outcome {
        name: inst.name.clone(),
        flags: [
            v.site_morphism,
            v.cofinality.holds(),
            v.filtered.holds(),
            v.fiberwise.holds(),
            v.diagonal.holds(),
            oracle,
        ],
        discrepancy,
        local_surjectivity: local,
        disagreements,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub name: String,
    pub details: Vec<String>,
    /// The problem as a standalone workspace, for replay.
    pub workspace: Option<WorkspaceFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub bounds: Bounds,
    pub seed: u64,
    pub instances: usize,
    pub site_morphisms: usize,
    pub oracle_vs_cofinality: Agreement,
    pub filtered_vs_fiberwise: Agreement,
    /// Site morphisms only.
    pub cofinality_vs_filtered: Agreement,
    /// Site morphisms only.
    pub filtered_vs_diagonal: Agreement,
    pub local_surjectivity: Agreement,
    pub discrepancy_events: usize,
    pub disagreements: Vec<Disagreement>,
    /// `name:flags` per problem, flags as in [`Outcome`].
    pub verdicts: Vec<String>,
}

impl CorpusReport {
    pub fn all_agree(&self) -> bool {
        self.discrepancy_events == 0 && self.disagreements.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Evaluates in parallel; results keep the instance order.
pub fn evaluate_all(instances: &[Instance]) -> Vec<Outcome> {
    instances.par_iter().map(evaluate).collect()
}

pub fn summarize(bounds: Bounds, seed: u64, instances: &[Instance], outcomes: &[Outcome]) -> CorpusReport {
    let mut r = CorpusReport {
        bounds,
        seed,
        instances: instances.len(),
        site_morphisms: 0,
        oracle_vs_cofinality: Agreement::default(),
        filtered_vs_fiberwise: Agreement::default(),
        cofinality_vs_filtered: Agreement::default(),
        filtered_vs_diagonal: Agreement::default(),
        local_surjectivity: Agreement::default(),
        discrepancy_events: 0,
        disagreements: Vec::new(),
        verdicts: Vec::with_capacity(outcomes.len()),
    };
    for (inst, o) in instances.iter().zip(outcomes) {
        let [site, cof, filt, fib, diag, oracle] = o.flags;
        r.oracle_vs_cofinality.record(cof, oracle);
        r.filtered_vs_fiberwise.record(filt, fib);
        if site {
            r.site_morphisms += 1;
            r.cofinality_vs_filtered.record(cof, filt);
            r.filtered_vs_diagonal.record(filt, diag);
        }
        r.local_surjectivity.merge(o.local_surjectivity);
        r.discrepancy_events += usize::from(o.discrepancy);
        if !o.disagreements.is_empty() {
            r.disagreements.push(Disagreement {
                name: o.name.clone(),
                details: o.disagreements.clone(),
                workspace: decl::problem(&o.name, &inst.problem),
            });
        }
        let bits: String = o.flags.iter().map(|&b| if b { '1' } else { '0' }).collect();
        r.verdicts.push(format!("{}:{bits}", o.name));
    }
    r
}

pub fn run_corpus(bounds: Bounds, seed: u64) -> CorpusReport {
    let instances = enumerate_instances(&bounds, seed);
    let outcomes = evaluate_all(&instances);
    summarize(bounds, seed, &instances, &outcomes)
}

/// Grothendieck constructions of the strict indexed categories over every
/// base with at most `max_objects` objects and `max_arrows` arrows, fibers
/// drawn from `fibers`; at most `per_base` per base.
pub fn fibrations(max_objects: usize, max_arrows: usize, fibers: &[Arc<FinCategory>], per_base: usize) -> Vec<TotalCategory> {
    arcs(categories(max_objects, max_arrows, None).items)
        .iter()
        .flat_map(|c| indexed_categories(c, fibers, per_base))
        .map(TotalCategory::new)
        .collect()
}

/// `(A, φ)` between two Grothendieck constructions over the same base.
#[derive(Debug, Clone)]
pub struct FibrationMorphism {
    pub source: TotalCategory,
    pub target: TotalCategory,
    pub functor: FinFunctor,
    pub phi: NatTransform,
}

/// The functor `G(D) → G(D')` induced by fiber functors `F_c: D(c) → D'(c)`,
/// or `None` when the family is not natural in `c`.
pub fn induced_functor(source: &TotalCategory, target: &TotalCategory, family: &[FinFunctor]) -> Option<FinFunctor> {
    let (d, e) = (source.indexed(), target.indexed());
    let base = d.base();
    for g in base.arrow_ids().filter(|&g| !base.is_identity(g)) {
        let (c, c2) = (base.src(g), base.dst(g));
        let left = d.transition(g).then(&family[c.index()]).ok()?;
        let right = family[c2.index()].then(e.transition(g)).ok()?;
        if left != right {
            return None;
        }
    }
    let (s, t) = (source.carrier(), target.carrier());
    let objects: Vec<Obj> = s
        .object_ids()
        .map(|o| {
            let x = source.object(o);
            target
                .find_object(family[x.base_object.index()].on_object(x.fiber_object), x.base_object)
                .expect("fiber object")
        })
        .collect();
    let arrows = s
        .arrow_ids()
        .map(|a| {
            let tag = source.arrow(a);
            let c = base.src(tag.base_arrow);
            let v = family[c.index()].on_arrow(tag.vertical);
            *t.hom(objects[s.src(a).index()], objects[s.dst(a).index()])
                .iter()
                .find(|&&b| target.arrow(b).vertical == v && target.arrow(b).base_arrow == tag.base_arrow)
                .expect("image arrow")
        })
        .collect();
    FinFunctor::new_validated(s.clone(), t.clone(), objects, arrows).ok()
}

/// Morphisms of fibrations with identity comparison, induced by natural
/// families of fiber functors between totals over a shared base.
pub fn fibration_morphisms(totals: &[TotalCategory], limit: usize) -> Vec<FibrationMorphism> {
    let mut out = Vec::new();
    for s in totals {
        for t in totals {
            let base = s.indexed().base();
            if base != t.indexed().base() {
                continue;
            }
            let options: Vec<Vec<FinFunctor>> = base
                .object_ids()
                .map(|c| functors(s.indexed().fiber(c), t.indexed().fiber(c)))
                .collect();
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            let mut pick = vec![0usize; options.len()];
            loop {
                let family: Vec<FinFunctor> = pick.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
                if let Some(functor) = induced_functor(s, t, &family) {
                    let phi = NatTransform::identity(s.projection().clone());
                    if check_fibration_morphism(s, t, &functor, &phi).holds() {
                        out.push(FibrationMorphism {
                            source: s.clone(),
                            target: t.clone(),
                            functor,
                            phi,
                        });
                        if out.len() >= limit {
                            return out;
                        }
                    }
                }
                let mut k = 0;
                while k < pick.len() {
                    pick[k] += 1;
                    if pick[k] < options[k].len() {
                        break;
                    }
                    pick[k] = 0;
                    k += 1;
                }
                if k == pick.len() {
                    break;
                }
            }
        }
    }
    out
}
