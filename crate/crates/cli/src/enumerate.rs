//! Exhaustive enumeration of small categories, functors, topologies and
//! strict indexed categories.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;
use std::time::Instant;

use relsite_core::{all_sieves, Arr, CategoryBuilder, FinCategory, FinFunctor, IndexedCategory, Obj, Topology};

/// Hom-size matrices for `n` objects with at most `max_arrows` arrows in
/// total, one per orbit under relabelling of objects.
fn hom_matrices(n: usize, max_arrows: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut m = vec![vec![0usize; n]; n];
    fn go(
        k: usize,
        budget: usize,
        cells: &[(usize, usize)],
        m: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if k == cells.len() {
            out.push(m.clone());
            return;
        }
        let (i, j) = cells[k];
        let lo = usize::from(i == j);
        for v in lo..=budget {
            m[i][j] = v;
            go(k + 1, budget - v, cells, m, out);
        }
        m[i][j] = 0;
    }
    go(0, max_arrows, &cells, &mut m, &mut out);
    let perms = permutations(n);
    out.retain(|m| {
        perms.iter().all(|p| {
            let relabelled: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| m[p[i]][p[j]]).collect()).collect();
            relabelled >= *m
        })
    });
    out.retain(|m| m.iter().flatten().sum::<usize>() <= max_arrows && (0..n).all(|i| m[i][i] >= 1));
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn go(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            go(k + 1, p, out);
            p.swap(k, i);
        }
    }
    go(0, &mut p, &mut out);
    out
}

/// Arrow layout for a hom matrix: arrows grouped by (src, dst), identities
/// first within endo-hom-sets.
struct Layout {
    n: usize,
    src: Vec<usize>,
    dst: Vec<usize>,
    homs: Vec<Vec<Vec<usize>>>,
    identity: Vec<usize>,
}

impl Layout {
    fn new(m: &[Vec<usize>]) -> Self {
        let n = m.len();
        let (mut src, mut dst) = (Vec::new(), Vec::new());
        let mut homs = vec![vec![Vec::new(); n]; n];
        let mut identity = vec![0; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..m[i][j] {
                    if i == j && k == 0 {
                        identity[i] = src.len();
                    }
                    homs[i][j].push(src.len());
                    src.push(i);
                    dst.push(j);
                }
            }
        }
        Self {
            n,
            src,
            dst,
            homs,
            identity,
        }
    }

    fn arrow_count(&self) -> usize {
        self.src.len()
    }
}

const UNSET: u8 = u8::MAX;

/// Every associative composition table for `layout`, as `table[g][f]`
/// (`UNSET` when not composable), deduplicated up to isomorphism.
fn composition_tables(layout: &Layout, deadline: Option<Instant>) -> Option<Vec<Vec<Vec<u8>>>> {
    let na = layout.arrow_count();
    let is_id = |a: usize| layout.identity[layout.src[a]] == a && layout.src[a] == layout.dst[a];
    let mut table = vec![vec![UNSET; na]; na];
    let mut unknowns = Vec::new();
    for (g, row) in table.iter_mut().enumerate() {
        for (f, cell) in row.iter_mut().enumerate() {
            if layout.dst[f] != layout.src[g] {
                continue;
            }
            if is_id(g) {
                *cell = f as u8;
            } else if is_id(f) {
                *cell = g as u8;
            } else {
                unknowns.push((g, f));
            }
        }
    }
    let symmetries = relabellings(layout);
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut out = Vec::new();
    let mut timed_out = false;
    let mut steps = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn go(
        k: usize,
        unknowns: &[(usize, usize)],
        layout: &Layout,
        table: &mut Vec<Vec<u8>>,
        symmetries: &[Vec<usize>],
        seen: &mut HashSet<Vec<u8>>,
        out: &mut Vec<Vec<Vec<u8>>>,
        deadline: Option<Instant>,
        timed_out: &mut bool,
        steps: &mut u64,
    ) {
        if *timed_out {
            return;
        }
        *steps += 1;
        if steps.is_multiple_of(4096) && deadline.is_some_and(|d| Instant::now() > d) {
            *timed_out = true;
            return;
        }
        if k == unknowns.len() {
            let canon = canonical(table, symmetries);
            if seen.insert(canon) {
                out.push(table.clone());
            }
            return;
        }
        let (g, f) = unknowns[k];
        for &v in &layout.homs[layout.src[f]][layout.dst[g]] {
            table[g][f] = v as u8;
            if associative_around(layout, table, g, f) {
                go(k + 1, unknowns, layout, table, symmetries, seen, out, deadline, timed_out, steps);
            }
        }
        table[g][f] = UNSET;
    }
    go(
        0,
        &unknowns,
        layout,
        &mut table,
        &symmetries,
        &mut seen,
        &mut out,
        deadline,
        &mut timed_out,
        &mut steps,
    );
    (!timed_out).then_some(out)
}

/// Checks every associativity instance involving the pair `(g, f)` whose
/// composites are all known.
fn associative_around(layout: &Layout, t: &[Vec<u8>], g: usize, f: usize) -> bool {
    let na = layout.arrow_count();
    let get = |x: usize, y: usize| t[x][y];
    // (h, g, f): h ∘ (g ∘ f) = (h ∘ g) ∘ f
    for h in 0..na {
        if layout.src[h] != layout.dst[g] {
            continue;
        }
        let (gf, hg) = (get(g, f), get(h, g));
        if gf == UNSET || hg == UNSET {
            continue;
        }
        let (l, r) = (get(h, gf as usize), get(hg as usize, f));
        if l != UNSET && r != UNSET && l != r {
            return false;
        }
    }
    // (g, f, e)
    for e in 0..na {
        if layout.dst[e] != layout.src[f] {
            continue;
        }
        let (gf, fe) = (get(g, f), get(f, e));
        if gf == UNSET || fe == UNSET {
            continue;
        }
        let (l, r) = (get(g, fe as usize), get(gf as usize, e));
        if l != UNSET && r != UNSET && l != r {
            return false;
        }
    }
    // triples where (g, f) appears as an outer composite: x ∘ (y ∘ z) with
    // (x, y∘z) = (g, f), or (x∘y) ∘ z with (x∘y, z) = (g, f)
    for x in 0..na {
        for y in 0..na {
            if layout.dst[y] != layout.src[x] {
                continue;
            }
            let xy = get(x, y);
            if x == g {
                // y ∘ z = f
                for z in 0..na {
                    if layout.dst[z] == layout.src[y] && get(y, z) as usize == f {
                        let l = get(g, f);
                        let r = if xy == UNSET { UNSET } else { get(xy as usize, z) };
                        if r != UNSET && l != r {
                            return false;
                        }
                    }
                }
            }
            if xy != UNSET && xy as usize == g && layout.src[y] == layout.dst[f] {
                let yf = get(y, f);
                if yf != UNSET {
                    let l = get(x, yf as usize);
                    let r = get(g, f);
                    if l != UNSET && l != r {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Arrow relabellings induced by object permutations preserving the hom
/// matrix, combined with permutations of non-identity arrows inside each
/// hom-set.
fn relabellings(layout: &Layout) -> Vec<Vec<usize>> {
    let n = layout.n;
    let mut out = Vec::new();
    for p in permutations(n) {
        let ok = (0..n).all(|i| (0..n).all(|j| layout.homs[i][j].len() == layout.homs[p[i]][p[j]].len()));
        if !ok {
            continue;
        }
        // per hom-set, bijections onto the image hom-set fixing identities
        let mut partial: Vec<Vec<usize>> = vec![vec![usize::MAX; layout.arrow_count()]];
        for i in 0..n {
            for j in 0..n {
                let from = &layout.homs[i][j];
                let to = &layout.homs[p[i]][p[j]];
                let (fixed, movable_from, movable_to) = if i == j {
                    (Some((from[0], to[0])), &from[1..], &to[1..])
                } else {
                    (None, &from[..], &to[..])
                };
                let perms = permutations(movable_from.len());
                let mut next = Vec::new();
                for base in &partial {
                    for q in &perms {
                        let mut m = base.clone();
                        if let Some((a, b)) = fixed {
                            m[a] = b;
                        }
                        for (k, &a) in movable_from.iter().enumerate() {
                            m[a] = movable_to[q[k]];
                        }
                        next.push(m);
                    }
                }
                partial = next;
            }
        }
        out.extend(partial);
    }
    out
}

fn canonical(table: &[Vec<u8>], symmetries: &[Vec<usize>]) -> Vec<u8> {
    let na = table.len();
    let mut best: Option<Vec<u8>> = None;
    let mut buf = vec![UNSET; na * na];
    for s in symmetries {
        for g in 0..na {
            for f in 0..na {
                let v = table[g][f];
                buf[s[g] * na + s[f]] = if v == UNSET { UNSET } else { s[v as usize] as u8 };
            }
        }
        if best.as_ref().is_none_or(|b| buf < *b) {
            best = Some(buf.clone());
        }
    }
    best.unwrap_or_default()
}

fn build(layout: &Layout, table: &[Vec<u8>]) -> FinCategory {
    let mut b = CategoryBuilder::new();
    let objects: Vec<Obj> = (0..layout.n).map(|i| b.add_object(format!("o{i}"))).collect();
    let mut arrows = Vec::new();
    let mut counter = 0;
    for a in 0..layout.arrow_count() {
        let (s, d) = (layout.src[a], layout.dst[a]);
        if layout.identity[s] == a && s == d {
            arrows.push(b.add_identity(format!("id:o{s}"), objects[s]));
        } else {
            arrows.push(b.add_arrow(format!("a{counter}"), objects[s], objects[d]));
            counter += 1;
        }
    }
    for (g, row) in table.iter().enumerate() {
        for (f, &v) in row.iter().enumerate() {
            if v != UNSET {
                b.set_composite(arrows[g], arrows[f], arrows[v as usize]);
            }
        }
    }
    b.build().expect("enumerated tables are categories")
}

/// Outcome of a possibly time-boxed enumeration.
pub struct Enumerated<T> {
    pub items: Vec<T>,
    pub complete: bool,
}

/// All categories with `1..=max_objects` objects and at most `max_arrows`
/// arrows, up to isomorphism. Stops early (with `complete = false`) once the
/// deadline passes.
pub fn categories(max_objects: usize, max_arrows: usize, deadline: Option<Instant>) -> Enumerated<FinCategory> {
    let mut items = Vec::new();
    for n in 1..=max_objects {
        for m in hom_matrices(n, max_arrows) {
            let layout = Layout::new(&m);
            match composition_tables(&layout, deadline) {
                Some(tables) => items.extend(tables.iter().map(|t| build(&layout, t))),
                None => return Enumerated { items, complete: false },
            }
        }
    }
    Enumerated { items, complete: true }
}

/// Every Grothendieck topology on `cat`, in a deterministic order: the
/// trivial one first, then by breadth-first joins with single sieves.
pub fn topologies(cat: &Arc<FinCategory>) -> Vec<Topology> {
    let sieves: Vec<_> = cat.object_ids().flat_map(|c| all_sieves(cat, c)).collect();
    let start = Topology::trivial(cat.clone());
    let mut seen: BTreeSet<Vec<Vec<Vec<u32>>>> = BTreeSet::new();
    let key = |t: &Topology| -> Vec<Vec<Vec<u32>>> {
        cat.object_ids()
            .map(|c| t.covering(c).map(|s| s.arrows().map(|a| a.0).collect()).collect())
            .collect()
    };
    seen.insert(key(&start));
    let mut out = vec![start];
    let mut i = 0;
    while i < out.len() {
        let t = out[i].clone();
        for s in &sieves {
            if t.is_covering(s) {
                continue;
            }
            let bigger = t.with_sieve(s);
            if seen.insert(key(&bigger)) {
                out.push(bigger);
            }
        }
        i += 1;
    }
    out
}

/// Every functor `src → tgt`.
pub fn functors(src: &Arc<FinCategory>, tgt: &Arc<FinCategory>) -> Vec<FinFunctor> {
    let mut out = Vec::new();
    let no = src.object_count();
    let mut objects = vec![Obj(0); no];
    fn objs(
        k: usize,
        src: &Arc<FinCategory>,
        tgt: &Arc<FinCategory>,
        objects: &mut Vec<Obj>,
        out: &mut Vec<FinFunctor>,
    ) {
        if k == objects.len() {
            arrows(src, tgt, objects, out);
            return;
        }
        for o in tgt.object_ids() {
            objects[k] = o;
            objs(k + 1, src, tgt, objects, out);
        }
    }
    fn arrows(src: &Arc<FinCategory>, tgt: &Arc<FinCategory>, objects: &[Obj], out: &mut Vec<FinFunctor>) {
        let na = src.arrow_count();
        let mut map: Vec<Option<Arr>> = vec![None; na];
        for o in src.object_ids() {
            map[src.identity(o).index()] = Some(tgt.identity(objects[o.index()]));
        }
        let free: Vec<Arr> = src.arrow_ids().filter(|&a| !src.is_identity(a)).collect();
        fn go(
            k: usize,
            free: &[Arr],
            src: &FinCategory,
            tgt: &FinCategory,
            objects: &[Obj],
            map: &mut Vec<Option<Arr>>,
            found: &mut Vec<Vec<Arr>>,
        ) {
            if k == free.len() {
                found.push(map.iter().map(|a| a.expect("assigned")).collect());
                return;
            }
            let a = free[k];
            let (s, d) = (objects[src.src(a).index()], objects[src.dst(a).index()]);
            'candidate: for &image in tgt.hom(s, d) {
                map[a.index()] = Some(image);
                // composites among assigned arrows
                for &g in src.outgoing(src.dst(a)) {
                    if let (Some(fg), Some(gf)) = (map[g.index()], map[src.compose(g, a).index()]) {
                        if tgt.compose(fg, image) != gf {
                            continue 'candidate;
                        }
                    }
                }
                for &f in src.incoming(src.src(a)) {
                    if let (Some(ff), Some(af)) = (map[f.index()], map[src.compose(a, f).index()]) {
                        if tgt.compose(image, ff) != af {
                            continue 'candidate;
                        }
                    }
                }
                // a as a composite of assigned arrows
                for &f in src.incoming(src.dst(a)) {
                    for &g in src.outgoing(src.dst(f)) {
                        if src.compose(g, f) == a {
                            if let (Some(mg), Some(mf)) = (map[g.index()], map[f.index()]) {
                                if tgt.compose(mg, mf) != image {
                                    continue 'candidate;
                                }
                            }
                        }
                    }
                }
                go(k + 1, free, src, tgt, objects, map, found);
            }
            map[a.index()] = None;
        }
        let mut found = Vec::new();
        go(0, &free, src, tgt, objects, &mut map, &mut found);
        for arrows in found {
            if let Ok(f) = FinFunctor::new_validated(src.clone(), tgt.clone(), objects.to_vec(), arrows) {
                out.push(f);
            }
        }
    }
    objs(0, src, tgt, &mut objects, &mut out);
    out
}

/// Every strict indexed category over `base` whose fibers are drawn from
/// `fibers`, in a deterministic order. At most `limit` are returned.
pub fn indexed_categories(base: &Arc<FinCategory>, fibers: &[Arc<FinCategory>], limit: usize) -> Vec<IndexedCategory> {
    let mut out = Vec::new();
    let no = base.object_count();
    let mut choice = vec![0usize; no];
    loop {
        let fib: Vec<Arc<FinCategory>> = choice.iter().map(|&i| fibers[i].clone()).collect();
        let free: Vec<Arr> = base.arrow_ids().filter(|&a| !base.is_identity(a)).collect();
        let options: Vec<Vec<FinFunctor>> = free
            .iter()
            .map(|&g| functors(&fib[base.dst(g).index()], &fib[base.src(g).index()]))
            .collect();
        let mut pick = vec![0usize; free.len()];
        if options.iter().all(|o| !o.is_empty()) {
            loop {
                let mut all = Vec::with_capacity(base.arrow_count());
                for a in base.arrow_ids() {
                    if base.is_identity(a) {
                        all.push(FinFunctor::identity(fib[base.src(a).index()].clone()));
                    } else {
                        let k = free.iter().position(|&g| g == a).expect("free arrow");
                        all.push(options[k][pick[k]].clone());
                    }
                }
                if let Ok(d) = IndexedCategory::new(base.clone(), fib.clone(), all) {
                    out.push(d);
                    if out.len() >= limit {
                        return out;
                    }
                }
                // advance the odometer over transition choices
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
        let mut k = 0;
        while k < no {
            choice[k] += 1;
            if choice[k] < fibers.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == no {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        // one object: monoids of order 1, 2, 3
        let one = categories(1, 3, None);
        assert!(one.complete);
        assert_eq!(one.items.len(), 1 + 2 + 7);
        assert!(one.items.iter().any(|c| c.arrow_count() == 1));
        let two = categories(2, 3, None).items;
        assert!(two.iter().any(|c| c.object_count() == 2
            && c.arrow_count() == 3
            && c.connected_components().len() == 1));
    }

    #[test]
    fn topologies_on_c2() {
        let c2 = categories(2, 3, None)
            .items
            .into_iter()
            .find(|c| c.object_count() == 2 && c.arrow_count() == 3 && c.connected_components().len() == 1)
            .unwrap();
        let c2 = Arc::new(c2);
        let ts = topologies(&c2);
        assert!(ts.iter().all(|t| t.validate().is_ok()));
        assert!(ts.len() >= 2);
    }

    #[test]
    fn functors_from_c2_to_itself() {
        let c2 = Arc::new(
            categories(2, 3, None)
                .items
                .into_iter()
                .find(|c| c.object_count() == 2 && c.arrow_count() == 3 && c.connected_components().len() == 1)
                .unwrap(),
        );
        // constant at either object, or the identity
        assert_eq!(functors(&c2, &c2).len(), 3);
    }
}
