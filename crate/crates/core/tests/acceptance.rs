//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::Ratio;
use parahoric::affine::{extended_weyl_inclusion, reductive_quotient, AffineRootSystem, Facet, FrobeniusForm};
use parahoric::centralizer::{
    alcove_points, component_group_in, dual_pseudo_levi_roots, index_identity_check, pseudo_levi, pseudo_levi_in,
    KacContext, KacPoint, PseudoLevi, DEFAULT_WEYL_GUARD,
};
use parahoric::chevalley::ChevalleyAlgebra;
use parahoric::fdeg::{fdeg_ratio_exponent, pprime_ratio, tame_adjoint_conductor, OrderPolynomial};
use parahoric::verify::{atlas_report, lemma_suite, pinning_suite, Verdict};
use parahoric::{CartanType, Family, RootDatum, RootSystem};

use common::{Cartan, Lattice};

type Outcome = std::result::Result<String, String>;

fn ty(f: Family, r: usize) -> CartanType {
    CartanType::new(f, r).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lemma_suite_all() -> Outcome {
    let mut verified = 0;
    let mut na = 0;
    for t in CartanType::all_up_to(8) {
        for c in lemma_suite(t) {
            match c.verdict {
                Verdict::Verified => verified += 1,
                Verdict::NotApplicable => {
                    // type A lifts are excluded; the distance claim needs two adjacent long simple roots
                    let excluded = t.family == Family::A || c.claim == "dist-of-root";
                    ensure(excluded, || format!("{t} {}: unexpected not-applicable", c.claim))?;
                    na += 1;
                }
                v => return Err(format!("{t} {}: {v:?} {}", c.claim, c.witness)),
            }
        }
    }
    Ok(format!("{verified} verified, {na} not applicable"))
}

fn pinning_all() -> Outcome {
    let mut verified = 0;
    let mut flagged = 0;
    for t in CartanType::all_up_to(8) {
        for c in pinning_suite(t) {
            match c.verdict {
                Verdict::Verified => verified += 1,
                Verdict::NotComputed => {
                    let form = c.scope.form.clone().unwrap_or_default();
                    let twisted = !form.starts_with(&t.label());
                    let d_even = t.family == Family::D && t.rank % 2 == 0;
                    ensure(
                        form.contains("inner") && (twisted || d_even) && c.witness.get("scope_flag").is_some(),
                        || format!("{t} {form}: not computed outside the documented scope: {}", c.witness),
                    )?;
                    flagged += 1;
                }
                v => return Err(format!("{t} {:?}: {v:?} {}", c.scope, c.witness)),
            }
        }
    }
    ensure(flagged > 0, || "no D_2n inner form reached the scope flag".into())?;
    Ok(format!("{verified} verified, {flagged} documented not-computed"))
}

fn w0_square_all() -> Outcome {
    let mut n = 0;
    for t in CartanType::all_up_to(8) {
        let alg = ChevalleyAlgebra::of_system(&RootSystem::of_type(t)).map_err(|e| e.to_string())?;
        let r = alg.w0_square_identity();
        ensure(r.holds(), || format!("{t}: {r:?}"))?;
        n += 1;
    }
    Ok(format!("{n} types, exact matrix equality"))
}

fn coxeter_parity() -> Outcome {
    let mut even = 0;
    for t in CartanType::all_up_to(8) {
        let h = RootSystem::of_type(t).coxeter_number().map_err(|e| e.to_string())?;
        // h = |Phi| / rank, recomputed from the oracle root list
        let oracle = common::roots(&t.cartan_matrix()).len() as i64 / t.rank as i64;
        ensure(h == oracle, || format!("{t}: h = {h}, oracle {oracle}"))?;
        let required = !(t.family == Family::A && t.rank % 2 == 0);
        if required {
            ensure(h % 2 == 0, || format!("{t}: odd Coxeter number {h}"))?;
            even += 1;
        } else {
            ensure(h % 2 == 1, || format!("{t}: A_even should have odd h"))?;
        }
    }
    Ok(format!("{even} required types even"))
}

type Classes = BTreeSet<BTreeSet<Vec<usize>>>;

fn classes(lists: &[&[&[usize]]]) -> Classes {
    lists.iter().map(|c| c.iter().map(|s| s.to_vec()).collect()).collect()
}

fn atlas_all() -> Outcome {
    use Family::*;
    // removed-node sets of the disconnected-center facets, grouped by Omega-class
    let cases: Vec<(CartanType, usize, Classes)> = vec![
        (ty(C, 2), 0, classes(&[&[&[1]]])),
        (ty(C, 3), 0, classes(&[])),
        (ty(C, 4), 0, classes(&[&[&[2]]])),
        (ty(C, 5), 0, classes(&[])),
        (ty(C, 6), 0, classes(&[&[&[3]]])),
        (ty(C, 7), 0, classes(&[])),
        (ty(C, 8), 0, classes(&[&[&[4]]])),
        (ty(E, 6), 0, classes(&[&[&[4]]])),
        (ty(E, 6), 1, classes(&[&[&[4]], &[&[2, 3, 5]]])),
        (ty(E, 7), 0, classes(&[&[&[2]], &[&[4]]])),
        (ty(B, 3), 0, classes(&[&[&[2]], &[&[3]]])),
        (ty(B, 4), 0, classes(&[&[&[2]], &[&[3]], &[&[4]]])),
        (ty(B, 5), 0, classes(&[&[&[2]], &[&[3]], &[&[4]], &[&[5]]])),
        (ty(B, 6), 0, classes(&[&[&[2]], &[&[3]], &[&[4]], &[&[5]], &[&[6]]])),
        (ty(D, 4), 0, classes(&[&[&[2]]])),
        (ty(D, 5), 0, classes(&[&[&[2], &[3]]])),
        (ty(D, 6), 0, classes(&[&[&[2], &[4]], &[&[3]]])),
        (ty(D, 7), 0, classes(&[&[&[2], &[5]], &[&[3], &[4]]])),
        (ty(D, 8), 0, classes(&[&[&[2], &[6]], &[&[3], &[5]], &[&[4]]])),
        (ty(A, 5), 0, classes(&[])),
    ];
    let mut checked = 0;
    for (t, inner, want) in cases {
        let a = AffineRootSystem::new(t);
        let form = FrobeniusForm::new(&a, t, inner).map_err(|e| e.to_string())?;
        let rep = atlas_report(&a, &form).map_err(|e| e.to_string())?;
        let got: Classes = rep.flagged_classes.iter().map(|c| c.iter().cloned().collect()).collect();
        ensure(got == want, || format!("{}: found {got:?}, expected {want:?}", form.label()))?;
        for row in rep.rows.iter().filter(|r| r.flagged) {
            // SO_{2k} x SO_{2(n-k)+1} for B, SO_{2k} x SO_{2(n-k)} for D
            let k = row.removed[0];
            let n = t.rank;
            let shape = row.orthogonal_shape.map(|s| (s.even, s.other));
            match t.family {
                B => ensure(shape == Some((2 * k, 2 * (n - k) + 1)), || format!("{}: {row:?}", form.label()))?,
                D => {
                    let k = k.min(n - k);
                    ensure(shape == Some((2 * k, 2 * (n - k))) || shape == Some((2 * (n - k), 2 * k)), || {
                        format!("{}: {row:?}", form.label())
                    })?
                }
                _ => {}
            }
            if t == ty(E, 6) && inner == 0 {
                ensure(row.omega_f_frob == vec![3], || format!("E6 split: Omega {:?}", row.omega_f_frob))?;
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} forms match their facet lists"))
}

struct Generated {
    datum: RootDatum,
    lattice: Lattice,
    point: KacPoint,
    levi: PseudoLevi,
    component_order: usize,
}

fn generated(max_rank: usize, max_m: i64) -> Vec<Generated> {
    let mut out = Vec::new();
    for t in CartanType::all_up_to(max_rank) {
        for (d, lattice) in
            [(RootDatum::adjoint(t), Lattice::Coweight), (RootDatum::simply_connected(t), Lattice::Coroot)]
        {
            let ctx = KacContext::new(&d).unwrap();
            for m in 1..=max_m {
                for s in alcove_points(&ctx, m) {
                    if !s.is_reduced() {
                        continue;
                    }
                    let levi = pseudo_levi_in(&ctx, &s).unwrap();
                    let component_order = component_group_in(&ctx, &s, DEFAULT_WEYL_GUARD).unwrap().order();
                    out.push(Generated { datum: d.clone(), lattice, point: s, levi, component_order });
                }
            }
        }
    }
    out
}

fn centralizer_oracle(gen: &[Generated]) -> Outcome {
    for g in gen {
        let sys = g.datum.system();
        let a: Cartan = sys.cartan().to_vec();
        let st = common::stabilizer(&a, g.lattice, &g.point.coords, g.point.order);
        let got: BTreeSet<Vec<i64>> = g.levi.roots.iter().map(|&k| sys.root(k).clone()).collect();
        let tag = || format!("{} {:?}: {:?}/{}", sys.type_label(), g.lattice, g.point.coords, g.point.order);
        ensure(got == st.roots, || format!("{}: roots differ", tag()))?;
        ensure(g.levi.roots.len() == st.roots.len(), || tag())?;
        ensure(st.ws % st.wh == 0, || format!("{}: W_H not in W_s", tag()))?;
        ensure(g.component_order == st.ws / st.wh, || {
            format!("{}: component group {} vs oracle {}/{}", tag(), g.component_order, st.ws, st.wh)
        })?;
    }
    Ok(format!("{} alcove points, zero mismatches", gen.len()))
}

/// Cartan matrix of the oracle's centralized subsystem, from its own simple roots.
fn oracle_levi_cartan(a: &Cartan, roots: &BTreeSet<Vec<i64>>) -> Cartan {
    let pos: Vec<&Vec<i64>> = roots.iter().filter(|v| v.iter().all(|&x| x >= 0)).collect();
    let simple: Vec<&Vec<i64>> = pos
        .iter()
        .copied()
        .filter(|v| {
            !pos.iter().any(|u| {
                let d: Vec<i64> = v.iter().zip(u.iter()).map(|(x, y)| x - y).collect();
                roots.contains(&d) && d.iter().all(|&x| x >= 0)
            })
        })
        .collect();
    simple
        .iter()
        .map(|u| {
            simple
                .iter()
                .map(|v| {
                    let cv = common::coroot_coweight(a, v);
                    u.iter().zip(&cv).map(|(x, y)| x * y).sum()
                })
                .collect()
        })
        .collect()
}

fn fdeg_check(
    d: &RootDatum,
    levi: &PseudoLevi,
    component_order: u64,
    oracle_roots: &BTreeSet<Vec<i64>>,
) -> std::result::Result<(), String> {
    let sys = d.system();
    let r = d.rank();
    let e = fdeg_ratio_exponent(d, levi).map_err(|e| e.to_string())?;
    let tag = || format!("{} in {}", levi.type_label, sys.type_label());
    ensure(e.cross_check, || format!("{}: {e:?}", tag()))?;
    let c = tame_adjoint_conductor(d, levi).map_err(|e| e.to_string())?;
    ensure(c.conductor == 2 * e.exponent, || format!("{}: conductor {}", tag(), c.conductor))?;
    let gq = OrderPolynomial::split(sys, r).map_err(|e| e.to_string())?;
    let hq = OrderPolynomial::split(&parahoric::affine::subsystem_of_basis(sys, &levi.basis), r)
        .map_err(|e| e.to_string())?;
    let p = pprime_ratio(&gq, &hq, component_order).map_err(|e| e.to_string())?;
    ensure(p.matches_exponent(&e), || format!("{}: q-power {} vs {}", tag(), p.q_exponent, e.exponent))?;
    let a: Cartan = sys.cartan().to_vec();
    let ah = oracle_levi_cartan(&a, oracle_roots);
    for q in common::Q_VALUES {
        let ch = common::characteristic(q);
        let og = common::split_group_order(&a, r, q);
        let oh = common::split_group_order(&ah, r, q);
        let want = Ratio::new(common::strip_p(&og, ch), common::strip_p(&oh, ch));
        ensure(p.reduced.eval(q) == want, || format!("{} at q={q}: {} vs {want}", tag(), p.reduced.eval(q)))?;
        let full = Ratio::new(og, oh);
        ensure(full == want * Ratio::from_integer(BigInt::from(q).pow(e.exponent as u32)), || {
            format!("{}: full quotient at q={q}", tag())
        })?;
    }
    Ok(())
}

fn fdeg_identities(gen: &[Generated]) -> Outcome {
    let mut n = 0;
    for g in gen {
        let a: Cartan = g.datum.system().cartan().to_vec();
        let st = common::stabilizer(&a, g.lattice, &g.point.coords, g.point.order);
        fdeg_check(&g.datum, &g.levi, g.component_order as u64, &st.roots)?;
        n += 1;
    }
    let fixtures: [(Family, usize, usize, i64, &str, i64); 3] =
        [(Family::E, 8, 0, 2, "D8", 64), (Family::E, 8, 7, 2, "E7+A1", 56), (Family::E, 6, 3, 3, "A2+A2+A2", 27)];
    for (f, r, node, m, label, want) in fixtures {
        let d = RootDatum::adjoint(ty(f, r));
        let mut v = vec![0; r];
        v[node] = 1;
        let s = KacPoint::new(&d, v.clone(), m).unwrap();
        let levi = pseudo_levi(&s, &d).map_err(|e| e.to_string())?;
        ensure(levi.type_label == label, || format!("expected {label}, got {}", levi.type_label))?;
        let e = fdeg_ratio_exponent(&d, &levi).map_err(|e| e.to_string())?;
        ensure(e.exponent == want, || format!("{label}: exponent {}", e.exponent))?;
        let oracle: BTreeSet<Vec<i64>> = common::roots(&d.system().cartan().to_vec())
            .into_iter()
            .filter(|x| x.iter().zip(&v).map(|(a, b)| a * b).sum::<i64>().rem_euclid(m) == 0)
            .collect();
        fdeg_check(&d, &levi, 1, &oracle)?;
        n += 1;
    }
    Ok(format!("{n} pseudo-Levis, q in {:?}", common::Q_VALUES))
}

fn kottwitz(gen: &[Generated]) -> Outcome {
    let mut n = 0;
    let mut run = |d: &RootDatum, levi: &PseudoLevi| -> std::result::Result<(), String> {
        let w = extended_weyl_inclusion(d, &levi.roots).map_err(|e| e.to_string())?;
        ensure(w.commutes && w.surjective, || format!("{} in {}: {w:?}", levi.type_label, d.system().type_label()))?;
        ensure(w.omega_g_torsion == d.fundamental_group().invariant_factors, || "Omega_G torsion".into())?;
        n += 1;
        Ok(())
    };
    for g in gen {
        run(&g.datum, &g.levi)?;
    }
    for t in CartanType::all_up_to(6).into_iter().filter(|t| t.rank >= 5) {
        for d in [RootDatum::adjoint(t), RootDatum::simply_connected(t)] {
            let ctx = KacContext::new(&d).unwrap();
            for m in 1..=4 {
                for s in alcove_points(&ctx, m).into_iter().filter(|s| s.is_reduced()) {
                    run(&d, &pseudo_levi_in(&ctx, &s).unwrap())?;
                }
            }
        }
    }
    Ok(format!("{n} pseudo-Levis commute on generators"))
}

fn so5_example() -> Outcome {
    let b2 = ty(Family::B, 2);
    let a = AffineRootSystem::new(b2);
    let sys = a.system();
    let g = a.datum();
    let dual = g.dual();
    // Bourbaki B2: beta = alpha_1 long, alpha = alpha_2 short
    let s = KacPoint::new(&dual, vec![1, -2], 3).map_err(|e| e.to_string())?;
    let roots = dual_pseudo_levi_roots(sys, dual.system(), &s);
    let got: BTreeSet<Vec<i64>> = roots.iter().map(|&k| sys.root(k).clone()).collect();
    ensure(got == BTreeSet::from([vec![1, 1], vec![-1, -1]]), || format!("Phi_H = {got:?}"))?;
    let levi = pseudo_levi(&s, &dual).map_err(|e| e.to_string())?;
    ensure(levi.type_label == "A1", || levi.type_label.clone())?;
    ensure(levi.roots.iter().all(|&k| dual.system().is_long(k)), || "dual roots of H should be long in C2".into())?;

    let facet = Facet::from_removed(&a, &[2]).map_err(|e| e.to_string())?;
    let rq = reductive_quotient(&a, &facet).map_err(|e| e.to_string())?;
    ensure(rq.type_label == "A1+A1" && rq.center_torsion == vec![2], || format!("{rq:?}"))?;
    let images: BTreeSet<Vec<i64>> = rq.simple_coroots.iter().cloned().collect();
    let want: BTreeSet<Vec<i64>> = [g.cocharacter(&[1, 0]), g.cocharacter(&[-1, -1])].into_iter().collect();
    ensure(images == want, || format!("lattice images {images:?}, expected {want:?}"))?;

    let form = FrobeniusForm::split(&a, b2);
    let idx = index_identity_check(&a, &form, &facet, &roots, Some(&s)).map_err(|e| e.to_string())?;
    ensure(idx.holds, || format!("{idx:?}"))?;
    let w = extended_weyl_inclusion(g, &roots).map_err(|e| e.to_string())?;
    ensure(w.omega_g_torsion == vec![2] && w.surjective && w.commutes, || format!("{w:?}"))?;

    let e = fdeg_ratio_exponent(&dual, &levi).map_err(|e| e.to_string())?;
    ensure(e.exponent == 3 && e.cross_check && (e.dim_g, e.dim_h) == (10, 4), || format!("{e:?}"))?;
    let c = tame_adjoint_conductor(&dual, &levi).map_err(|e| e.to_string())?;
    ensure(c.conductor == 6 && c.gamma_exponent == 3, || format!("{c:?}"))?;
    Ok("Phi_H = {+-(alpha+beta)}, vertex (SL2xSL2)/Z, images Z.beta^v and Z.(-alpha^v-beta^v), exponent 3".into())
}

fn main() {
    let start = Instant::now();
    // pseudo-Levis shared by criteria 6-8
    let gen = generated(4, 6);
    let gen = &gen;
    let jobs: Vec<(&str, Box<dyn Fn() -> Outcome + Sync + '_>)> = vec![
        ("lemma suite, rank <= 8", Box::new(lemma_suite_all)),
        ("pinning-preserving lifts, rank <= 8", Box::new(pinning_all)),
        ("n(w0)^2 identity, rank <= 8", Box::new(w0_square_all)),
        ("Coxeter parity, rank <= 8", Box::new(coxeter_parity)),
        ("disconnected-center facet atlas", Box::new(atlas_all)),
        ("centralizer vs brute-force stabilizer, rank <= 4, m <= 6", Box::new(move || centralizer_oracle(gen))),
        ("formal-degree exponent identities", Box::new(move || fdeg_identities(gen))),
        ("Kottwitz compatibility, rank <= 6", Box::new(move || kottwitz(gen))),
        ("SO5 worked example", Box::new(so5_example)),
    ];
    let results: Vec<(Outcome, f64)> = std::thread::scope(|sc| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(_, f)| {
                sc.spawn(move || {
                    let t = Instant::now();
                    let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
                        .unwrap_or_else(|_| Err("panicked".into()));
                    (r, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (r, secs))) in jobs.iter().zip(&results).enumerate() {
        match r {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1}s]", i + 1)
            }
        }
    }
    println!("acceptance: {}/{} passed in {:.1}s", jobs.len() - failed, jobs.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
