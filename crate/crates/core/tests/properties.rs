use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use relsite_core::{
    all_sieves, check_comorphism, check_fibration, check_filtering, giraud_topology, is_cartesian, is_sheaf,
    left_kan_presheaf, plus_construction, relative_verdict, representable, sheafify, Arr, CategoryBuilder,
    FinCategory, FinFunctor, FinPresheaf, IndexedCategory, Obj, RelativeProblem, Sieve, SitePair, Topology,
    TotalCategory,
};

// ---------------------------------------------------------------------------
// generators

fn preorder(n: usize, bits: &[bool]) -> FinCategory {
    let mut rel = vec![vec![false; n]; n];
    let mut k = 0;
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
        for cell in &mut row[i + 1..] {
            *cell = bits[k % bits.len()];
            k += 1;
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][m] && rel[m][j] {
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
                    b.add_arrow(format!("o{i}o{j}"), objs[i], objs[j])
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if let (Some(f), Some(g)) = (arrow[i][j], arrow[j][k]) {
                    b.set_composite(g, f, arrow[i][k].unwrap());
                }
            }
        }
    }
    b.build().unwrap()
}

/// Paths in a DAG with edges `i → j`, `i < j`.
fn free_dag(n: usize, edges: &[(usize, usize)]) -> FinCategory {
    let mut paths: Vec<(usize, usize, Vec<usize>)> = (0..n).map(|i| (i, i, vec![])).collect();
    let mut frontier: Vec<(usize, usize, Vec<usize>)> = edges.iter().enumerate().map(|(e, &(s, t))| (s, t, vec![e])).collect();
    while let Some(p) = frontier.pop() {
        for (e, &(s, t)) in edges.iter().enumerate() {
            if s == p.1 {
                let mut q = p.2.clone();
                q.push(e);
                frontier.push((p.0, t, q));
            }
        }
        paths.push(p);
    }
    let mut b = CategoryBuilder::new();
    let objs: Vec<Obj> = (0..n).map(|i| b.add_object(format!("o{i}"))).collect();
    let name = |s: usize, p: &[usize]| {
        if p.is_empty() {
            format!("id:o{s}")
        } else {
            p.iter().map(|e| format!("e{e}")).collect::<Vec<_>>().join(".")
        }
    };
    let ids: Vec<Arr> = paths
        .iter()
        .map(|(s, t, p)| {
            if p.is_empty() {
                b.add_identity(name(*s, p), objs[*s])
            } else {
                b.add_arrow(name(*s, p), objs[*s], objs[*t])
            }
        })
        .collect();
    for (fi, f) in paths.iter().enumerate() {
        for (gi, g) in paths.iter().enumerate() {
            if f.1 == g.0 {
                let mut q = f.2.clone();
                q.extend(&g.2);
                let k = paths.iter().position(|p| p.0 == f.0 && p.1 == g.1 && p.2 == q).unwrap();
                b.set_composite(ids[gi], ids[fi], ids[k]);
            }
        }
    }
    b.build().unwrap()
}

/// Non-thin categories with relations: `{1, e}` with `e∘e = e`, the cyclic
/// group of order 2, and `a ⇉ b → c` with both composites equal.
fn named(which: usize) -> FinCategory {
    let mut b = CategoryBuilder::new();
    match which {
        0 | 1 => {
            let o = b.add_object("*");
            let id = b.add_identity("id:*", o);
            let e = b.add_arrow("e", o, o);
            b.set_composite(e, e, if which == 0 { e } else { id });
        }
        _ => {
            let (a, bb, c) = (b.add_object("a"), b.add_object("b"), b.add_object("c"));
            b.add_identity("id:a", a);
            b.add_identity("id:b", bb);
            b.add_identity("id:c", c);
            let f1 = b.add_arrow("f1", a, bb);
            let f2 = b.add_arrow("f2", a, bb);
            let h = b.add_arrow("h", bb, c);
            let hf = b.add_arrow("hf", a, c);
            b.set_composite(h, f1, hf);
            b.set_composite(h, f2, hf);
        }
    }
    b.build().unwrap()
}

fn category() -> impl Strategy<Value = Arc<FinCategory>> {
    prop_oneof![
        (1usize..=4, prop::collection::vec(any::<bool>(), 6)).prop_map(|(n, bits)| preorder(n, &bits)),
        (2usize..=3, prop::collection::vec((0usize..3, 0usize..3), 0..=3)).prop_map(|(n, raw)| {
            let edges: Vec<(usize, usize)> = raw
                .into_iter()
                .map(|(a, b)| (a.min(b) % n, a.max(b) % n))
                .filter(|(a, b)| a < b)
                .collect();
            free_dag(n, &edges)
        }),
        (0usize..3).prop_map(named),
    ]
    .prop_map(Arc::new)
}

/// Least topology containing a pseudo-random choice of sieves.
fn topology_on(cat: &Arc<FinCategory>, seed: u64) -> Topology {
    let mut state = seed | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let basis: Vec<Vec<Sieve>> = cat
        .object_ids()
        .map(|c| all_sieves(cat, c).into_iter().filter(|_| next() % 4 == 0).collect())
        .collect();
    Topology::generate(cat.clone(), &basis).unwrap()
}

fn functors(src: &FinCategory, tgt: &FinCategory) -> Vec<(Vec<Obj>, Vec<Arr>)> {
    let mut out = Vec::new();
    let no = src.object_count();
    let mut objs = vec![Obj(0); no];
    fn arrows(src: &FinCategory, tgt: &FinCategory, objs: &[Obj], i: usize, acc: &mut Vec<Arr>, out: &mut Vec<(Vec<Obj>, Vec<Arr>)>) {
        if i == src.arrow_count() {
            let ok = src.arrow_ids().all(|g| {
                src.incoming(src.src(g))
                    .iter()
                    .all(|&f| acc[src.compose(g, f).index()] == tgt.compose(acc[g.index()], acc[f.index()]))
            });
            if ok {
                out.push((objs.to_vec(), acc.clone()));
            }
            return;
        }
        let a = Arr(i as u32);
        let (s, t) = (objs[src.src(a).index()], objs[src.dst(a).index()]);
        let choices: Vec<Arr> = if src.is_identity(a) {
            vec![tgt.identity(s)]
        } else {
            tgt.hom(s, t).to_vec()
        };
        for c in choices {
            acc.push(c);
            arrows(src, tgt, objs, i + 1, acc, out);
            acc.pop();
        }
    }
    let total = tgt.object_count().pow(no as u32);
    for code in 0..total {
        let mut k = code;
        for o in objs.iter_mut() {
            *o = Obj((k % tgt.object_count()) as u32);
            k /= tgt.object_count();
        }
        arrows(src, tgt, &objs, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn functor(src: &Arc<FinCategory>, tgt: &Arc<FinCategory>, pick: usize) -> Option<FinFunctor> {
    let all = functors(src, tgt);
    let (o, a) = all.get(pick % all.len().max(1))?.clone();
    Some(FinFunctor::new_validated(src.clone(), tgt.clone(), o, a).unwrap())
}

/// A coproduct of representables at the given objects.
fn presheaf(cat: &Arc<FinCategory>, at: &[usize]) -> FinPresheaf {
    at.iter().fold(FinPresheaf::empty(cat.clone()), |p, &i| {
        let c = Obj((i % cat.object_count()) as u32);
        p.coproduct(&representable(cat.clone(), c).unwrap())
    })
}

/// A discrete indexed category: the fiber over `c` is the discrete category
/// on the sections of a coproduct of representables.
fn discrete_indexed(base: &Arc<FinCategory>, at: &[usize]) -> IndexedCategory {
    let p = presheaf(base, at);
    let fibers: Vec<Arc<FinCategory>> = base
        .object_ids()
        .map(|c| Arc::new(FinCategory::discrete(&(0..p.size(c)).map(|s| format!("s{s}")).collect::<Vec<_>>())))
        .collect();
    let transitions = base
        .arrow_ids()
        .map(|g| {
            let (from, to) = (&fibers[base.dst(g).index()], &fibers[base.src(g).index()]);
            let objects: Vec<Obj> = (0..p.size(base.dst(g))).map(|s| Obj(p.restrict(g, s) as u32)).collect();
            let arrows = from.arrow_ids().map(|a| to.identity(objects[from.src(a).index()])).collect();
            FinFunctor::new(from.clone(), to.clone(), objects, arrows).unwrap()
        })
        .collect();
    IndexedCategory::new(base.clone(), fibers, transitions).unwrap()
}

/// Every fiber equal to `fiber`, every transition the identity.
fn constant_indexed(base: &Arc<FinCategory>, fiber: &Arc<FinCategory>) -> IndexedCategory {
    let fibers = vec![fiber.clone(); base.object_count()];
    let transitions = base.arrow_ids().map(|_| FinFunctor::identity(fiber.clone())).collect();
    IndexedCategory::new(base.clone(), fibers, transitions).unwrap()
}

fn total() -> impl Strategy<Value = TotalCategory> {
    (category(), category(), prop::collection::vec(0usize..4, 0..=3), any::<bool>()).prop_map(|(base, fiber, at, discrete)| {
        let indexed = if discrete || fiber.object_count() > 2 {
            discrete_indexed(&base, &at)
        } else {
            constant_indexed(&base, &fiber)
        };
        TotalCategory::new(indexed)
    })
}

fn sizes(p: &FinPresheaf) -> Vec<usize> {
    p.category().object_ids().map(|x| p.size(x)).collect()
}

// ---------------------------------------------------------------------------
// direct filtering with single arrows, for the trivial topology

fn filtered_directly(a: &FinFunctor) -> bool {
    let (src, tgt) = (a.source(), a.target());
    for e in tgt.object_ids() {
        if !src.object_ids().any(|d| !tgt.hom(e, a.on_object(d)).is_empty()) {
            return false;
        }
        for d1 in src.object_ids() {
            for d2 in src.object_ids() {
                for &u in tgt.hom(e, a.on_object(d1)) {
                    for &v in tgt.hom(e, a.on_object(d2)) {
                        let cone = src.object_ids().any(|d| {
                            src.hom(d, d1).iter().any(|&s| {
                                src.hom(d, d2).iter().any(|&t| {
                                    tgt.hom(e, a.on_object(d)).iter().any(|&w| {
                                        tgt.compose(a.on_arrow(s), w) == u && tgt.compose(a.on_arrow(t), w) == v
                                    })
                                })
                            })
                        });
                        if !cone {
                            return false;
                        }
                    }
                }
            }
        }
        for f1 in src.arrow_ids() {
            for &f2 in src.hom(src.src(f1), src.dst(f1)) {
                let d1 = src.src(f1);
                for &g in tgt.hom(e, a.on_object(d1)) {
                    if tgt.compose(a.on_arrow(f1), g) != tgt.compose(a.on_arrow(f2), g) {
                        continue;
                    }
                    let eq = src.incoming(d1).iter().any(|&k| {
                        src.compose(f1, k) == src.compose(f2, k)
                            && tgt
                                .hom(e, a.on_object(src.src(k)))
                                .iter()
                                .any(|&w| tgt.compose(a.on_arrow(k), w) == g)
                    });
                    if !eq {
                        return false;
                    }
                }
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn composition_is_closed_and_associative(cat in category()) {
        for g in cat.arrow_ids() {
            for &f in cat.incoming(cat.src(g)) {
                let gf = cat.compose(g, f);
                prop_assert_eq!(cat.src(gf), cat.src(f));
                prop_assert_eq!(cat.dst(gf), cat.dst(g));
                for &e in cat.incoming(cat.src(f)) {
                    prop_assert_eq!(cat.compose(gf, e), cat.compose(g, cat.compose(f, e)));
                }
            }
        }
        for c in cat.object_ids() {
            for s in all_sieves(&cat, c) {
                prop_assert!(Sieve::is_closed(&cat, c, s.members()));
            }
        }
    }

    #[test]
    fn generated_topologies_validate_and_are_stable(cat in category(), seed in any::<u64>()) {
        let t = topology_on(&cat, seed);
        prop_assert!(t.validate().is_ok());
        for c in cat.object_ids() {
            for s in t.covering(c) {
                for &h in cat.incoming(c) {
                    prop_assert!(t.is_covering(&s.pullback(&cat, h).unwrap()));
                }
            }
        }
    }

    #[test]
    fn totals_factor_as_cartesian_after_vertical(total in total()) {
        let car = total.carrier();
        let p = total.projection();
        prop_assert!(check_fibration(p).holds());
        for a in car.arrow_ids() {
            let (v, c) = total.factor(a);
            prop_assert_eq!(car.compose(c, v), a);
            prop_assert!(p.target().is_identity(p.on_arrow(v)));
            prop_assert!(total.is_cartesian(c));
            prop_assert!(is_cartesian(p, c));
        }
    }

    #[test]
    fn giraud_topology_validates_and_makes_projection_a_comorphism(total in total(), seed in any::<u64>()) {
        let base = total.indexed().base().clone();
        let j = topology_on(&base, seed);
        let g = giraud_topology(&total, &j);
        prop_assert!(g.validate().is_ok());
        prop_assert!(check_comorphism(total.projection(), &g, &j).holds());
    }

    #[test]
    fn identity_problems_pass_everything(total in total(), seed in any::<u64>()) {
        let base = total.indexed().base().clone();
        let j = topology_on(&base, seed);
        let g = giraud_topology(&total, &j);
        let base_site = SitePair::new(base.clone(), j.clone()).unwrap();
        let left = SitePair::new(total.carrier().clone(), g).unwrap();
        let prob = RelativeProblem::identity(base_site.clone(), left, total.projection().clone()).unwrap();
        let v = relative_verdict(&prob, true).unwrap();
        prop_assert!(v.aggregate);
        let on_base = RelativeProblem::identity(base_site.clone(), base_site, FinFunctor::identity(base)).unwrap();
        prop_assert!(relative_verdict(&on_base, true).unwrap().aggregate);
    }

    #[test]
    fn left_kan_preserves_coproducts_and_representables(
        d in category(),
        e in category(),
        pick in any::<usize>(),
        left in prop::collection::vec(0usize..4, 0..=2),
        right in prop::collection::vec(0usize..4, 0..=2),
    ) {
        let Some(a) = functor(&d, &e, pick) else { return Ok(()) };
        let (p, q) = (presheaf(&d, &left), presheaf(&d, &right));
        let lan_sum = sizes(&left_kan_presheaf(&a, &p.coproduct(&q)));
        let sum: Vec<usize> = sizes(&left_kan_presheaf(&a, &p))
            .iter()
            .zip(sizes(&left_kan_presheaf(&a, &q)))
            .map(|(x, y)| x + y)
            .collect();
        prop_assert_eq!(lan_sum, sum);
        for x in d.object_ids() {
            let lan = left_kan_presheaf(&a, &representable(d.clone(), x).unwrap());
            prop_assert_eq!(sizes(&lan), sizes(&representable(e.clone(), a.on_object(x)).unwrap()));
        }
    }

    #[test]
    fn sheafification_is_idempotent(cat in category(), seed in any::<u64>(), at in prop::collection::vec(0usize..4, 0..=3)) {
        let t = topology_on(&cat, seed);
        let p = presheaf(&cat, &at);
        let sh = sheafify(&p, &t);
        prop_assert!(is_sheaf(&sh, &t).holds());
        prop_assert_eq!(sizes(&sheafify(&sh, &t)), sizes(&sh));
        prop_assert!(plus_construction(&sh, &t).unit.is_bijective());
    }

    #[test]
    fn trivial_filtering_matches_single_arrow_conditions(d in category(), e in category(), pick in any::<usize>()) {
        let Some(a) = functor(&d, &e, pick) else { return Ok(()) };
        let report = check_filtering(&a, &Topology::trivial(e.clone()));
        prop_assert_eq!(report.holds(), filtered_directly(&a));
    }
}

#[test]
fn named_categories_are_not_thin() {
    let thin = |c: &FinCategory| {
        let mut seen = HashSet::new();
        c.arrow_ids().all(|a| seen.insert((c.src(a), c.dst(a))))
    };
    assert!(!thin(&named(0)) && !thin(&named(1)) && !thin(&named(2)));
}
