//! Torsion points of a torus, their centralizers and component groups.
//!
//! A [`KacPoint`] `lambda / m` lives in `X_*(T) (x) Q / X_*(T)` for a root datum
//! `d`; in the applications `d` is the dual group and the roots it centralizes
//! are the coroots of the original group.

use std::collections::{HashMap, HashSet};

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::affine::{AffineRootSystem, Facet, FrobeniusForm, OmegaElement};
use crate::error::{Error, Result};
use crate::linalg::{solve_integer, IntMatrix, LatticeQuotient, Matrix};
use crate::rootcore::{Family, Isogeny, RootDatum, RootSystem, Vector, WeylElement};

/// Largest Weyl group the exhaustive component-group path will enumerate.
pub const DEFAULT_WEYL_GUARD: usize = 60_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct KacPoint {
    /// Fundamental-coweight coordinates; must lie in `X_*`.
    pub coords: Vector,
    pub order: i64,
}

impl KacPoint {
    pub fn new(d: &RootDatum, coords: Vector, order: i64) -> Result<Self> {
        if order <= 0 {
            return Err(Error::InvalidInput("torsion order must be positive".into()));
        }
        if coords.len() != d.rank() {
            return Err(Error::InvalidInput(format!("expected {} coordinates, got {}", d.rank(), coords.len())));
        }
        if solve_integer(d.cocharacter_basis(), &coords).is_none() {
            return Err(Error::InvalidInput("coordinates are not a cocharacter of this datum".into()));
        }
        Ok(KacPoint { coords, order })
    }

    pub fn identity(d: &RootDatum) -> Self {
        KacPoint { coords: vec![0; d.rank()], order: 1 }
    }

    pub fn is_reduced(&self) -> bool {
        self.coords.iter().fold(self.order, |g, &c| g.gcd(&c)) == 1
    }

    /// Divide out the common factor of coordinates and order.
    pub fn reduced(&self) -> Self {
        let g = self.coords.iter().fold(self.order, |g, &c| g.gcd(&c));
        KacPoint { coords: self.coords.iter().map(|c| c / g).collect(), order: self.order / g }
    }

    /// `alpha(s)` as an exponent modulo `m`: `<alpha, lambda> mod m`.
    pub fn eval(&self, root: &[i64]) -> i64 {
        root.iter().zip(&self.coords).map(|(a, b)| a * b).sum::<i64>().mod_floor(&self.order)
    }
}

fn in_lattice_multiple(d: &RootDatum, v: &[i64], m: i64) -> bool {
    if v.iter().any(|x| x % m != 0) {
        return false;
    }
    let w: Vector = v.iter().map(|x| x / m).collect();
    solve_integer(d.cocharacter_basis(), &w).is_some()
}

/// Permutation of roots for the reflection in root `t`.
pub fn root_reflection(sys: &RootSystem, t: usize) -> WeylElement {
    let perm: Vec<u16> = (0..sys.num_roots())
        .map(|k| {
            let c = sys.pairing(k, t);
            let v: Vector = sys.root(k).iter().zip(sys.root(t)).map(|(a, b)| a - c * b).collect();
            sys.index_of(&v).expect("reflection of a root") as u16
        })
        .collect();
    WeylElement::from_perm(sys, perm)
}

/// The reflection-closure of a set of roots.
pub fn subsystem_from_basis(sys: &RootSystem, basis: &[usize]) -> Vec<usize> {
    let mut seen: HashSet<usize> = basis.iter().copied().collect();
    let mut stack = basis.to_vec();
    while let Some(k) = stack.pop() {
        for &b in basis {
            let c = sys.pairing(k, b);
            let v: Vector = sys.root(k).iter().zip(sys.root(b)).map(|(x, y)| x - c * y).collect();
            let img = sys.index_of(&v).expect("root");
            if seen.insert(img) {
                stack.push(img);
            }
        }
    }
    let mut out: Vec<usize> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Alcove machinery for a datum: the adjoint affine system of the same roots
/// and the subgroup `Omega_d = X_* / Q^vee` of its `Omega`.
#[derive(Clone, Debug)]
pub struct KacContext {
    pub datum: RootDatum,
    pub affine: AffineRootSystem,
    /// Indices into `affine.omega()` of the elements whose translation lies in `X_*`.
    pub omega_d: Vec<usize>,
}

impl KacContext {
    pub fn new(d: &RootDatum) -> Result<Self> {
        let adj = RootDatum::from_system(d.system_arc(), Isogeny::Adjoint)?;
        let affine = AffineRootSystem::from_datum(adj)?;
        let omega_d = affine
            .omega()?
            .iter()
            .enumerate()
            .filter(|(_, e)| solve_integer(d.cocharacter_basis(), &e.translation).is_some())
            .map(|(i, _)| i)
            .collect();
        Ok(KacContext { datum: d.clone(), affine, omega_d })
    }

    pub fn system(&self) -> &RootSystem {
        self.datum.system()
    }

    fn omega(&self, e: usize) -> &OmegaElement {
        &self.affine.omega().expect("adjoint")[e]
    }
}

/// The representative of a torsion point in the closed fundamental alcove.
#[derive(Clone, Debug, Serialize)]
pub struct AlcoveRep {
    /// `y = m x` in fundamental-coweight coordinates, `x` in the closed alcove.
    pub y: Vector,
    /// Kac coordinates `(s_0, ..., s_r)`, `sum m_i s_i = m`.
    pub kac: Vec<i64>,
    /// Finite part `w` with `y = w lambda` modulo `m X_*`.
    #[serde(skip)]
    pub w: WeylElement,
    pub word: Vec<usize>,
}

fn kac_of(ctx: &KacContext, y: &[i64], m: i64) -> Vec<i64> {
    let sys = ctx.system();
    let theta = sys.root(ctx.affine.theta());
    let t: i64 = theta.iter().zip(y).map(|(a, b)| a * b).sum();
    let mut k = vec![m - t];
    k.extend_from_slice(y);
    k
}

fn apply_simple(sys: &RootSystem, y: &mut [i64], i: usize) {
    let c = y[i];
    for k in 0..sys.rank() {
        y[k] -= c * sys.cartan()[k][i];
    }
}

/// Move `lambda / m` into the closed fundamental alcove by the affine Weyl group.
pub fn alcove_reduce(ctx: &KacContext, s: &KacPoint) -> AlcoveRep {
    let sys = ctx.system();
    let r = sys.rank();
    let m = s.order;
    let theta = ctx.affine.theta();
    let theta_v = sys.coroot(theta).clone();
    let theta_cw: Vector = (0..r).map(|k| (0..r).map(|j| sys.cartan()[k][j] * theta_v[j]).sum()).collect();
    let s_theta = root_reflection(sys, theta);
    let mut y = s.coords.clone();
    let mut w = WeylElement::identity(sys);
    loop {
        if let Some(i) = (0..r).find(|&i| y[i] < 0) {
            apply_simple(sys, &mut y, i);
            w = WeylElement::simple_reflection(sys, i).mul(sys, &w);
            continue;
        }
        let t: i64 = sys.root(theta).iter().zip(&y).map(|(a, b)| a * b).sum();
        if t > m {
            for k in 0..r {
                y[k] -= (t - m) * theta_cw[k];
            }
            w = s_theta.mul(sys, &w);
            continue;
        }
        break;
    }
    let kac = kac_of(ctx, &y, m);
    AlcoveRep { word: w.word().to_vec(), y, kac, w }
}

/// Lexicographically smallest Kac vector in the `Omega_d` orbit of the alcove point.
pub fn canonical_alcove(ctx: &KacContext, s: &KacPoint) -> AlcoveRep {
    let base = alcove_reduce(ctx, s);
    let sys = ctx.system();
    let mut best = base.clone();
    for &e in &ctx.omega_d {
        let om = ctx.omega(e);
        let mut kac = vec![0; base.kac.len()];
        for (a, &v) in base.kac.iter().enumerate() {
            kac[om.perm[a]] = v;
        }
        if kac < best.kac {
            let w = om.finite.mul(sys, &base.w);
            best = AlcoveRep { y: kac[1..].to_vec(), kac, word: w.word().to_vec(), w };
        }
    }
    best
}

/// True iff the two points are conjugate under `W` modulo `X_*`.
pub fn conjugate(ctx: &KacContext, s: &KacPoint, t: &KacPoint) -> bool {
    let (s, t) = (s.reduced(), t.reduced());
    s.order == t.order && canonical_alcove(ctx, &s).kac == canonical_alcove(ctx, &t).kac
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudoLevi {
    pub point: KacPoint,
    /// Root indices `alpha` with `alpha(s) = 1`.
    pub roots: Vec<usize>,
    /// Basis of `roots`: the zero Kac nodes transported back by `w^{-1}`.
    pub basis: Vec<usize>,
    /// Nodes of the extended diagram with vanishing Kac coordinate.
    pub alcove_nodes: Vec<usize>,
    pub kac: Vec<i64>,
    pub type_label: String,
    /// `X_* / <Phi_H^vee>`.
    pub omega_torsion: Vec<i64>,
    pub omega_free_rank: usize,
}

impl PseudoLevi {
    pub fn dim(&self, rank: usize) -> usize {
        self.roots.len() + rank
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }
}

pub fn pseudo_levi(s: &KacPoint, d: &RootDatum) -> Result<PseudoLevi> {
    let ctx = KacContext::new(d)?;
    pseudo_levi_in(&ctx, s)
}

pub fn pseudo_levi_in(ctx: &KacContext, s: &KacPoint) -> Result<PseudoLevi> {
    if s.order <= 0 {
        return Err(Error::InvalidInput("torsion order must be positive".into()));
    }
    let sys = ctx.system();
    let d = &ctx.datum;
    let roots: Vec<usize> = (0..sys.num_roots()).filter(|&k| s.eval(sys.root(k)) == 0).collect();
    let rep = alcove_reduce(ctx, s);
    let alcove_nodes: Vec<usize> = (0..rep.kac.len()).filter(|&a| rep.kac[a] == 0).collect();
    let w_inv = rep.w.inverse(sys);
    let mut basis: Vec<usize> = alcove_nodes.iter().map(|&a| w_inv.act(ctx.affine.node_root(a))).collect();
    basis.sort_unstable();
    let sub = crate::affine::subsystem_of_basis(sys, &basis);
    let r = sys.rank();
    let coroots: Vec<Vector> = roots.iter().map(|&k| d.cocharacter(sys.coroot(k))).collect();
    let q =
        LatticeQuotient::new(&if coroots.is_empty() { IntMatrix::zeros(r, 1) } else { Matrix::from_cols(r, &coroots) });
    Ok(PseudoLevi {
        point: s.clone(),
        roots,
        basis,
        alcove_nodes,
        kac: canonical_alcove(ctx, s).kac,
        type_label: sub.type_label(),
        omega_torsion: q.torsion(),
        omega_free_rank: q.free_rank(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    /// Full enumeration of the Weyl group.
    Exhaustive,
    /// Stabilizer of the alcove point in `Omega_d`.
    Generated,
}

/// `W_s / W(Phi_H)`, realized by the elements of `W_s` permuting the alcove basis.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentGroup {
    #[serde(skip)]
    pub elements: Vec<WeylElement>,
    pub words: Vec<Vec<usize>>,
    /// `table[i][j]` = index of `elements[i] * elements[j]`.
    pub table: Vec<Vec<usize>>,
    pub confidence: Confidence,
    /// `|W_s|` when enumerated.
    pub stabilizer_order: Option<u128>,
    pub subsystem_weyl_order: u128,
    /// Alcove representative the elements refer to.
    pub alcove: Vec<i64>,
}

impl ComponentGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    fn from_elements(
        sys: &RootSystem,
        mut elements: Vec<WeylElement>,
        confidence: Confidence,
        stab: Option<u128>,
        wh: u128,
        alcove: Vec<i64>,
    ) -> Self {
        elements.sort_by(|a, b| a.length().cmp(&b.length()).then(a.word().cmp(b.word())));
        let idx: HashMap<&[u16], usize> = elements.iter().enumerate().map(|(i, e)| (e.perm(), i)).collect();
        let table = elements.iter().map(|a| elements.iter().map(|b| idx[a.mul(sys, b).perm()]).collect()).collect();
        ComponentGroup {
            words: elements.iter().map(|e| e.word().to_vec()).collect(),
            elements,
            table,
            confidence,
            stabilizer_order: stab,
            subsystem_weyl_order: wh,
            alcove,
        }
    }

    /// Action of a diagram automorphism (0-based node permutation) on the group, if it preserves it.
    pub fn frobenius_action(&self, sys: &RootSystem, sigma: &[usize]) -> Option<Vec<usize>> {
        let idx: HashMap<&[u16], usize> = self.elements.iter().enumerate().map(|(i, e)| (e.perm(), i)).collect();
        self.elements
            .iter()
            .map(|e| {
                let word: Vec<usize> = e.word().iter().map(|&i| sigma[i]).collect();
                let img = WeylElement::from_word(sys, &word).ok()?;
                idx.get(img.perm()).copied()
            })
            .collect()
    }
}

pub fn component_group(s: &KacPoint, d: &RootDatum) -> Result<ComponentGroup> {
    let ctx = KacContext::new(d)?;
    component_group_in(&ctx, s, DEFAULT_WEYL_GUARD)
}

/// Exhaustive when `|W| <= guard`, otherwise through the `Omega_d` stabilizer.
pub fn component_group_in(ctx: &KacContext, s: &KacPoint, guard: usize) -> Result<ComponentGroup> {
    let sys = ctx.system();
    if sys.weyl_order() <= guard as u128 {
        component_group_exhaustive(ctx, s, guard)
    } else {
        Ok(component_group_generated(ctx, s))
    }
}

fn alcove_basis(ctx: &KacContext, rep: &AlcoveRep) -> Vec<usize> {
    let mut b: Vec<usize> = (0..rep.kac.len()).filter(|&a| rep.kac[a] == 0).map(|a| ctx.affine.node_root(a)).collect();
    b.sort_unstable();
    b
}

pub fn component_group_generated(ctx: &KacContext, s: &KacPoint) -> ComponentGroup {
    let sys = ctx.system();
    let rep = canonical_alcove(ctx, s);
    let elements: Vec<WeylElement> = ctx
        .omega_d
        .iter()
        .map(|&e| ctx.omega(e))
        .filter(|om| (0..rep.kac.len()).all(|a| rep.kac[om.perm[a]] == rep.kac[a]))
        .map(|om| om.finite.clone())
        .collect();
    let basis = alcove_basis(ctx, &rep);
    let wh = crate::affine::subsystem_of_basis(sys, &basis).weyl_order();
    ComponentGroup::from_elements(sys, elements, Confidence::Generated, None, wh, rep.kac)
}

pub fn component_group_exhaustive(ctx: &KacContext, s: &KacPoint, guard: usize) -> Result<ComponentGroup> {
    let sys = ctx.system();
    let rep = canonical_alcove(ctx, s);
    let m = s.order;
    let all = sys.enumerate_weyl(guard)?;
    let basis: HashSet<usize> = alcove_basis(ctx, &rep).into_iter().collect();
    let mut stab = 0u128;
    let mut elements = Vec::new();
    for w in all {
        let wy = apply_weyl_coweight(sys, &w, &rep.y);
        let diff: Vector = wy.iter().zip(&rep.y).map(|(a, b)| a - b).collect();
        if !in_lattice_multiple(&ctx.datum, &diff, m) {
            continue;
        }
        stab += 1;
        if basis.iter().all(|&b| basis.contains(&w.act(b))) {
            elements.push(w);
        }
    }
    let wh = crate::affine::subsystem_of_basis(sys, &basis.iter().copied().collect::<Vec<_>>()).weyl_order();
    if stab != wh * elements.len() as u128 {
        return Err(Error::InvalidInput(format!(
            "component group bookkeeping failed: |W_s| = {stab}, |W_H| = {wh}, reps = {}",
            elements.len()
        )));
    }
    Ok(ComponentGroup::from_elements(sys, elements, Confidence::Exhaustive, Some(stab), wh, rep.kac))
}

/// Weyl action on fundamental-coweight coordinates.
pub fn apply_weyl_coweight(sys: &RootSystem, w: &WeylElement, y: &[i64]) -> Vector {
    let mut v = y.to_vec();
    for &i in w.word().iter().rev() {
        apply_simple(sys, &mut v, i);
    }
    v
}

/// Frobenius rationality of a torsion point.
#[derive(Clone, Debug, Serialize)]
pub struct Rationality {
    /// `q sigma(lambda) = lambda` modulo `m X_*`.
    pub exact: bool,
    /// `q sigma(lambda)` is Weyl-conjugate to `lambda` modulo `X_*`.
    pub class: bool,
}

pub fn frobenius_rational(s: &KacPoint, d: &RootDatum, form: &FrobeniusForm, q: i64) -> Result<bool> {
    Ok(frobenius_rationality(&KacContext::new(d)?, s, form, q)?.exact)
}

pub fn frobenius_rationality(ctx: &KacContext, s: &KacPoint, form: &FrobeniusForm, q: i64) -> Result<Rationality> {
    if q < 2 {
        return Err(Error::InvalidInput("q must be a prime power".into()));
    }
    if q.gcd(&s.order) != 1 {
        return Err(Error::InvalidInput(format!("q = {q} is not coprime to the order {}", s.order)));
    }
    let img = twisted_q_image(s, form, q);
    let diff: Vector = img.coords.iter().zip(&s.coords).map(|(a, b)| a - b).collect();
    let exact = in_lattice_multiple(&ctx.datum, &diff, s.order);
    let class = conjugate(ctx, s, &img);
    Ok(Rationality { exact, class })
}

/// `q sigma(lambda) / m`.
pub fn twisted_q_image(s: &KacPoint, form: &FrobeniusForm, q: i64) -> KacPoint {
    let r = s.coords.len();
    let mut v = vec![0; r];
    for i in 0..r {
        v[form.sigma[i + 1] - 1] = q * s.coords[i];
    }
    KacPoint { coords: v, order: s.order }
}

/// Phases of the standard representation of an orthogonal group at a torsion point.
#[derive(Clone, Debug, Serialize)]
pub struct StandardEigenvalues {
    /// Phases in `[0, 1)`, sorted.
    pub phases: Vec<Ratio<i64>>,
    pub has_one: bool,
    pub has_minus_one: bool,
}

impl StandardEigenvalues {
    /// Eigenvalue `1` or `-1` occurs.
    pub fn condition_b(&self) -> bool {
        self.has_one || self.has_minus_one
    }
}

/// Weights `e_i` of the standard representation in simple-root coordinates (halves allowed).
pub fn standard_weights(family: Family, n: usize) -> Result<Vec<Vec<Ratio<i64>>>> {
    let z = Ratio::from_integer(0);
    let one = Ratio::from_integer(1);
    let half = Ratio::new(1, 2);
    match family {
        Family::B => Ok((0..n).map(|i| (0..n).map(|j| if j >= i { one } else { z }).collect()).collect()),
        Family::D => Ok((0..n)
            .map(|i| {
                let mut v = vec![z; n];
                if i + 2 < n {
                    for x in v.iter_mut().take(n - 2).skip(i) {
                        *x = one;
                    }
                    v[n - 2] = half;
                    v[n - 1] = half;
                } else if i + 2 == n {
                    v[n - 2] = half;
                    v[n - 1] = half;
                } else {
                    v[n - 2] = -half;
                    v[n - 1] = half;
                }
                v
            })
            .collect()),
        f => Err(Error::Unsupported(format!("type {f} has no orthogonal standard representation"))),
    }
}

pub fn standard_rep_eigenvalues(s: &KacPoint, d: &RootDatum) -> Result<StandardEigenvalues> {
    let t = d.cartan_type.ok_or_else(|| Error::Unsupported("datum without a Cartan type".into()))?;
    let weights = standard_weights(t.family, t.rank)?;
    let mut phases = Vec::new();
    let frac = |x: Ratio<i64>| x - x.floor();
    for e in &weights {
        let p: Ratio<i64> = e.iter().zip(&s.coords).map(|(a, &b)| a * b).sum::<Ratio<i64>>() / s.order;
        phases.push(frac(p));
        phases.push(frac(-p));
    }
    if t.family == Family::B {
        phases.push(Ratio::from_integer(0));
    }
    phases.sort();
    let has_one = phases.iter().any(|p| *p == Ratio::from_integer(0));
    let has_minus_one = phases.iter().any(|p| *p == Ratio::new(1, 2));
    Ok(StandardEigenvalues { phases, has_one, has_minus_one })
}

/// Roots of `G` (indices in `sys`) whose dual coroots are killed by `s`, where
/// `s` is a torsion point of the dual torus in `dual`.
pub fn dual_pseudo_levi_roots(sys: &RootSystem, dual: &RootSystem, s: &KacPoint) -> Vec<usize> {
    (0..sys.num_roots())
        .filter(|&k| {
            let dk = dual.index_of(sys.coroot(k)).expect("coroots of G are roots of the dual");
            s.eval(dual.root(dk)) == 0
        })
        .collect()
}

/// Both sides of the index identity for a facet `x` and a pseudo-Levi `Phi_H` of `G`.
#[derive(Clone, Debug, Serialize)]
pub struct IndexIdentity {
    pub point: Vec<Ratio<i64>>,
    pub omega_hx: usize,
    pub omega_hx_frob: usize,
    pub kernel_frob: usize,
    /// Image of `Omega_{H,x}^Frob` in `Omega_{G,x}^Frob`.
    pub image: usize,
    /// `|Omega_{H,x}^Frob| / |Ker^Frob|`.
    pub quotient: usize,
    /// Classes in `Omega_{G,x}^Frob` of stabilizer elements fixing `s`; `None` without a point `s`.
    pub stabilizer_side: Option<usize>,
    pub omega_gx_frob: usize,
    /// `{alpha in Phi(GG) : alpha(s) = 1} = Phi_H cap Phi(GG)` when `s` is given.
    pub reductive_roots_agree: Option<bool>,
    pub holds: bool,
}

/// `G` is the adjoint group of `a`; `roots_h` a pseudo-Levi subsystem of `G`;
/// `s` optionally the torsion point of the dual torus producing it.
pub fn index_identity_check(
    a: &AffineRootSystem,
    form: &FrobeniusForm,
    facet: &Facet,
    roots_h: &[usize],
    s: Option<&KacPoint>,
) -> Result<IndexIdentity> {
    if !form.is_quasi_split() {
        return Err(Error::Unsupported("index identity is implemented for quasi-split forms".into()));
    }
    let sys = a.system();
    let d = a.datum();
    let r = sys.rank();
    let x = facet.barycenter(a);
    let xs = x.coords();
    let basis_h = crate::affine::closed_subsystem_basis(sys, roots_h)?;
    let sub = crate::affine::subsystem_of_basis(sys, &basis_h);
    // W(Phi_H) as ambient Weyl elements
    let refl: Vec<WeylElement> = basis_h.iter().map(|&b| root_reflection(sys, b)).collect();
    let wh = closure(sys, &refl, DEFAULT_WEYL_GUARD * 4)?;
    debug_assert_eq!(wh.len() as u128, sub.weyl_order());
    let h_coroots: Vec<Vector> = roots_h.iter().map(|&k| d.cocharacter(sys.coroot(k))).collect();
    let qh = LatticeQuotient::new(&if h_coroots.is_empty() {
        IntMatrix::zeros(r, 1)
    } else {
        Matrix::from_cols(r, &h_coroots)
    });
    let g_coroots: Vec<Vector> = (0..sys.num_roots()).map(|k| d.cocharacter(sys.coroot(k))).collect();
    let qg = LatticeQuotient::new(&Matrix::from_cols(r, &g_coroots));
    let sigma_mat = {
        let mut p = IntMatrix::zeros(r, r);
        for i in 0..r {
            p[(form.sigma[i + 1] - 1, i)] = 1;
        }
        p
    };
    // translation part mu = x - w x, required integral (X_* = coweights for adjoint G)
    let stab_translation = |w: &WeylElement| -> Option<Vector> {
        let m = crate::affine::weyl_matrix_coweight(sys, w);
        let wx = m.mul_vec(&x.num);
        let mu: Vec<i64> = x.num.iter().zip(&wx).map(|(a, b)| a - b).collect();
        if mu.iter().all(|v| v % x.den == 0) {
            Some(mu.iter().map(|v| v / x.den).collect())
        } else {
            None
        }
    };
    let frob_fixed = |q: &LatticeQuotient<i64>, mu: &Vector| q.reduce(&sigma_mat.mul_vec(mu)) == q.reduce(mu);
    let mut omega_hx: HashSet<Vector> = HashSet::new();
    for w in &wh {
        if let Some(mu) = stab_translation(w) {
            omega_hx.insert(qh.reduce(&mu));
        }
    }
    let hx_lifts: Vec<Vector> = omega_hx.iter().map(|c| qh.lift(c)).collect();
    let hx_frob: Vec<&Vector> = hx_lifts.iter().filter(|mu| frob_fixed(&qh, mu)).collect();
    let image: HashSet<Vector> = hx_frob.iter().map(|mu| qg.reduce(mu)).collect();
    let kernel_frob = hx_frob.iter().filter(|mu| qg.is_zero(mu)).count();
    let quotient = hx_frob.len() / kernel_frob.max(1);
    // Omega_{G,x}^Frob from the affine module, as classes mod Q^vee
    let fixed = form.omega_fixed(a);
    let st = crate::affine::facet_stabilizer(a, form, facet)?;
    let om = a.omega()?;
    let omega_gx_frob: HashSet<Vector> =
        st.elements.iter().filter(|e| fixed.contains(e)).map(|&e| qg.reduce(&om[e].translation)).collect();
    let image_inside = image.iter().all(|c| omega_gx_frob.contains(c));
    let mut stabilizer_side = None;
    let mut reductive_roots_agree = None;
    if let Some(s) = s {
        let dual = d.dual();
        let dsys = dual.system();
        let fixes_s = |w: &WeylElement| -> bool {
            // w acts on X^*(S) = X_*(S^) through the dual root system
            let wd: Vec<usize> = w.word().to_vec();
            let wdual = WeylElement::from_word(dsys, &wd).expect("same rank");
            let v = apply_weyl_coweight(dsys, &wdual, &s.coords);
            let diff: Vector = v.iter().zip(&s.coords).map(|(a, b)| a - b).collect();
            in_lattice_multiple(&dual, &diff, s.order)
        };
        let all_x: Vec<WeylElement> = sys.enumerate_weyl(DEFAULT_WEYL_GUARD * 4)?;
        let side: HashSet<Vector> = all_x
            .iter()
            .filter_map(|w| stab_translation(w).map(|mu| (w, mu)))
            .filter(|(w, mu)| fixes_s(w) && frob_fixed(&qg, mu))
            .map(|(_, mu)| qg.reduce(&mu))
            .collect();
        stabilizer_side = Some(side.len());
        let in_gg: Vec<usize> = (0..sys.num_roots()).filter(|&k| x.eval(sys.root(k)).is_integer()).collect();
        let hs: HashSet<usize> = dual_pseudo_levi_roots(sys, dsys, s).into_iter().collect();
        let set_h: HashSet<usize> = roots_h.iter().copied().collect();
        reductive_roots_agree = Some(in_gg.iter().all(|k| hs.contains(k) == set_h.contains(k)));
    }
    let holds = image.len() == quotient
        && image_inside
        && stabilizer_side.map_or(true, |n| n == image.len())
        && reductive_roots_agree.unwrap_or(true);
    Ok(IndexIdentity {
        point: xs,
        omega_hx: omega_hx.len(),
        omega_hx_frob: hx_frob.len(),
        kernel_frob,
        image: image.len(),
        quotient,
        stabilizer_side,
        omega_gx_frob: omega_gx_frob.len(),
        reductive_roots_agree,
        holds,
    })
}

/// Subgroup of `W` generated by `gens`, up to `limit` elements.
pub fn closure(sys: &RootSystem, gens: &[WeylElement], limit: usize) -> Result<Vec<WeylElement>> {
    let id = WeylElement::identity(sys);
    let mut seen: HashSet<Vec<u16>> = HashSet::from([id.perm().to_vec()]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let p: Vec<u16> = g.perm().iter().map(|&k| out[i].perm()[k as usize]).collect();
            if seen.insert(p.clone()) {
                if seen.len() > limit {
                    return Err(Error::Guard(format!("subgroup exceeds {limit} elements")));
                }
                out.push(WeylElement::from_perm(sys, p));
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Every point of the closed alcove with denominator dividing `m` that lies in `X_*`.
pub fn alcove_points(ctx: &KacContext, m: i64) -> Vec<KacPoint> {
    let marks = ctx.affine.marks().to_vec();
    let r = marks.len() - 1;
    let mut out = Vec::new();
    let mut y = vec![0i64; r];
    fn rec(i: usize, budget: i64, marks: &[i64], y: &mut Vec<i64>, m: i64, ctx: &KacContext, out: &mut Vec<KacPoint>) {
        if i == y.len() {
            if let Ok(p) = KacPoint::new(&ctx.datum, y.clone(), m) {
                out.push(p);
            }
            return;
        }
        let mut v = 0;
        while v * marks[i + 1] <= budget {
            y[i] = v;
            rec(i + 1, budget - v * marks[i + 1], marks, y, m, ctx, out);
            v += 1;
        }
        y[i] = 0;
    }
    rec(0, m, &marks, &mut y, m, ctx, &mut out);
    out
}

/// One point per conjugacy class of elements `s` with `s^m = 1` for some
/// `m <= max_order`, each at its least such `m`.
pub fn torsion_classes(ctx: &KacContext, max_order: i64) -> Vec<KacPoint> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in 1..=max_order {
        for s in alcove_points(ctx, m) {
            let kac = canonical_alcove(ctx, &s).kac;
            let g = kac.iter().fold(m, |g, &c| g.gcd(&c));
            let key: (Vec<i64>, i64) = (kac.iter().map(|c| c / g).collect(), m / g);
            if seen.insert(key) {
                out.push(s);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootcore::{CartanType, Family::*};

    fn t(f: Family, r: usize) -> CartanType {
        CartanType::new(f, r).unwrap()
    }

    #[test]
    fn torsion_class_counts() {
        let count = |d: RootDatum, m| torsion_classes(&KacContext::new(&d).unwrap(), m).len();
        // PGL2: {1, diag(1,-1)}; SL2 with s^m = 1, m <= 4: eigenvalues 1, -1, {w, w^2}, {i, -i}
        assert_eq!(count(RootDatum::adjoint(t(A, 1)), 2), 2);
        assert_eq!(count(RootDatum::simply_connected(t(A, 1)), 4), 4);
        assert_eq!(count(RootDatum::adjoint(t(G, 2)), 3), 4);
    }

    #[test]
    fn e8_order_two_points() {
        let d = RootDatum::adjoint(t(E, 8));
        let mut v = vec![0; 8];
        v[0] = 1;
        let p = pseudo_levi(&KacPoint::new(&d, v, 2).unwrap(), &d).unwrap();
        assert_eq!(p.type_label, "D8");
        assert_eq!(p.roots.len(), 112);
        let mut v = vec![0; 8];
        v[7] = 1;
        let p = pseudo_levi(&KacPoint::new(&d, v, 2).unwrap(), &d).unwrap();
        assert_eq!(p.type_label, "E7+A1");
    }

    #[test]
    fn e6_order_three() {
        let d = RootDatum::adjoint(t(E, 6));
        let p = pseudo_levi(&KacPoint::new(&d, vec![0, 0, 0, 1, 0, 0], 3).unwrap(), &d).unwrap();
        assert_eq!(p.type_label, "A2+A2+A2");
    }

    #[test]
    fn a1_adjoint_component() {
        let d = RootDatum::adjoint(t(A, 1));
        let s = KacPoint::new(&d, vec![1], 2).unwrap();
        assert_eq!(component_group(&s, &d).unwrap().order(), 2);
        let sc = RootDatum::simply_connected(t(A, 1));
        let s = KacPoint::new(&sc, vec![2], 4).unwrap();
        assert_eq!(component_group(&s, &sc).unwrap().order(), 1);
    }

    #[test]
    fn rationality_examples() {
        let d = RootDatum::adjoint(t(E, 6));
        let ctx = KacContext::new(&d).unwrap();
        let a = AffineRootSystem::new(t(E, 6));
        let f = FrobeniusForm::split(&a, t(E, 6));
        let s = KacPoint::new(&d, vec![0, 0, 0, 1, 0, 0], 3).unwrap();
        let r = frobenius_rationality(&ctx, &s, &f, 2).unwrap();
        assert!(!r.exact);
        assert!(frobenius_rationality(&ctx, &s, &f, 4).unwrap().exact);
        assert!(frobenius_rationality(&ctx, &s, &f, 3).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let d = RootDatum::adjoint(t(D, 4));
        let central = KacPoint::new(&d, vec![0, 0, 0, 2], 2).unwrap();
        let e = standard_rep_eigenvalues(&central, &d).unwrap();
        assert!(e.phases.iter().all(|p| *p == Ratio::new(1, 2)));
        let mixed = KacPoint::new(&d, vec![0, 0, 0, 1], 2).unwrap();
        let e = standard_rep_eigenvalues(&mixed, &d).unwrap();
        assert!(!e.condition_b());
        assert!(e.phases.contains(&Ratio::new(1, 4)) && e.phases.contains(&Ratio::new(3, 4)));
        assert!(standard_rep_eigenvalues(&mixed, &RootDatum::adjoint(t(E, 6))).is_err());
    }

    #[test]
    fn so5_index_identity() {
        let a = AffineRootSystem::new(t(B, 2));
        let f = FrobeniusForm::split(&a, t(B, 2));
        let facet = Facet::from_removed(&a, &[2]).unwrap();
        let sys = a.system();
        let dual = a.datum().dual();
        // e1 in the e-coordinates of Sp4
        let s = KacPoint::new(&dual, vec![1, 0], 3).unwrap();
        let roots = dual_pseudo_levi_roots(sys, dual.system(), &s);
        assert_eq!(roots, vec![sys.simple(1), sys.negate(sys.simple(1))]);
        let r = index_identity_check(&a, &f, &facet, &roots, Some(&s)).unwrap();
        assert_eq!(r.image, 2);
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn paths_agree_small_ranks() {
        for ty in CartanType::all_up_to(3) {
            for d in [RootDatum::adjoint(ty), RootDatum::simply_connected(ty)] {
                let ctx = KacContext::new(&d).unwrap();
                for m in 1..=4 {
                    for s in alcove_points(&ctx, m) {
                        let p = pseudo_levi_in(&ctx, &s).unwrap();
                        assert_eq!(subsystem_from_basis(ctx.system(), &p.basis), p.roots, "{ty} {s:?}");
                        let a = component_group_exhaustive(&ctx, &s, DEFAULT_WEYL_GUARD).unwrap();
                        let b = component_group_generated(&ctx, &s);
                        assert_eq!(a.words, b.words, "{ty} {s:?}");
                    }
                }
            }
        }
    }
}
