//! Chevalley basis of a simple Lie algebra and Tits lifts of Weyl elements.
//!
//! Basis order: `h_1, ..., h_r` (simple coroots), then `X_gamma` in root order.
//! `[X_g, X_-g] = h_g`, `[h_i, X_g] = <g, alpha_i^vee> X_g`, `[X_g, X_d] = N_{g,d} X_{g+d}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::rootcore::{RootSystem, Vector, WeylElement};

type Q = Ratio<i64>;

/// Sparse vector in the Chevalley basis.
pub type Sparse<T> = BTreeMap<usize, T>;

#[derive(Clone, Debug)]
pub struct ChevalleyAlgebra {
    sys: Arc<RootSystem>,
    /// `n[a * N + b] = N_{a,b}`.
    n: Vec<i8>,
    /// Per simple root: `n_i X_g = sign X_{s_i g}`.
    simple_signs: Vec<Vec<i8>>,
}

fn strength(sys: &RootSystem, a: usize, b: usize) -> i64 {
    // largest p with b - p a a root
    let mut p = 0;
    let mut v = sys.root(b).clone();
    loop {
        for (x, y) in v.iter_mut().zip(sys.root(a)) {
            *x -= y;
        }
        if sys.index_of(&v).is_none() {
            return p;
        }
        p += 1;
    }
}

struct Builder<'a> {
    sys: &'a RootSystem,
    pos: Vec<Option<i64>>,
    extraspecial: Vec<Option<(usize, usize)>>,
}

impl Builder<'_> {
    fn nr(&self) -> usize {
        self.sys.num_roots()
    }

    fn norm(&self, k: usize) -> Q {
        Q::from_integer(self.sys.norm(k))
    }

    fn diff(&self, a: usize, b: usize) -> Option<usize> {
        let v: Vector = self.sys.root(a).iter().zip(self.sys.root(b)).map(|(x, y)| x - y).collect();
        self.sys.index_of(&v)
    }

    /// `N_{a,b}` for any pair, from the positive table filled so far.
    fn get(&self, a: usize, b: usize) -> i64 {
        let sys = self.sys;
        let Some(c) = sys.add(a, b) else { return 0 };
        let (pa, pb) = (sys.is_positive(a), sys.is_positive(b));
        match (pa, pb) {
            (true, true) => {
                if a > b {
                    return -self.get(b, a);
                }
                self.pos[a * self.nr() + b].expect("positive pair computed before use")
            }
            (false, false) => -self.get(sys.negate(a), sys.negate(b)),
            (true, false) => self.mixed(a, b, c),
            (false, true) => -self.mixed(b, a, c),
        }
    }

    /// `a > 0 > b`, `c = a + b`.
    fn mixed(&self, a: usize, b: usize, c: usize) -> i64 {
        let sys = self.sys;
        let v = if sys.is_positive(c) {
            // N_{a,b} = (c,c)/(a,a) N_{b,-c} = -(c,c)/(a,a) N_{-b,c}
            -self.norm(c) / self.norm(a) * Q::from_integer(self.get(sys.negate(b), c))
        } else {
            // N_{a,b} = (c,c)/(b,b) N_{-c,a}
            self.norm(c) / self.norm(b) * Q::from_integer(self.get(sys.negate(c), a))
        };
        assert!(v.is_integer(), "non-integral structure constant");
        v.to_integer()
    }

    fn run(mut self) -> Vec<Option<i64>> {
        let sys = self.sys;
        let np = sys.num_positive();
        let nr = self.nr();
        // positive roots are sorted by height, so sums come after summands
        for xi in 0..np {
            let pairs: Vec<(usize, usize)> = (0..np)
                .filter_map(|a| self.diff(xi, a).filter(|&b| sys.is_positive(b) && a < b).map(|b| (a, b)))
                .collect();
            if pairs.is_empty() {
                continue;
            }
            let (e, eta) = pairs[0];
            self.extraspecial[xi] = Some((e, eta));
            let ne = strength(sys, e, eta) + 1;
            self.pos[e * nr + eta] = Some(ne);
            self.pos[eta * nr + e] = Some(-ne);
            for &(a, b) in &pairs[1..] {
                let me = sys.negate(e);
                let meta = sys.negate(eta);
                let mut s = Q::zero();
                if let Some(be) = sys.add(b, me) {
                    s += Q::from_integer(self.get(b, me) * self.get(a, meta)) / self.norm(be);
                }
                if let Some(ae) = sys.add(a, me) {
                    s += Q::from_integer(self.get(me, a) * self.get(b, meta)) / self.norm(ae);
                }
                let v = self.norm(xi) / Q::from_integer(ne) * s;
                assert!(v.is_integer(), "non-integral structure constant");
                let v = v.to_integer();
                self.pos[a * nr + b] = Some(v);
                self.pos[b * nr + a] = Some(-v);
            }
        }
        self.pos
    }
}

impl ChevalleyAlgebra {
    pub fn new(sys: Arc<RootSystem>) -> Result<Self> {
        if !sys.is_irreducible() {
            return Err(Error::Reducible(sys.type_label()));
        }
        let nr = sys.num_roots();
        let b = Builder { sys: &sys, pos: vec![None; nr * nr], extraspecial: vec![None; nr] };
        let pos = b.run();
        let b = Builder { sys: &sys, pos, extraspecial: vec![] };
        let mut n = vec![0i8; nr * nr];
        for a in 0..nr {
            for c in 0..nr {
                n[a * nr + c] = b.get(a, c) as i8;
            }
        }
        let mut alg = ChevalleyAlgebra { sys, n, simple_signs: vec![] };
        alg.simple_signs = (0..alg.rank()).map(|i| alg.compute_simple_lift(i)).collect::<Result<_>>()?;
        Ok(alg)
    }

    pub fn of_system(sys: &RootSystem) -> Result<Self> {
        Self::new(Arc::new(sys.clone()))
    }

    pub fn system(&self) -> &RootSystem {
        &self.sys
    }

    pub fn rank(&self) -> usize {
        self.sys.rank()
    }

    pub fn dim(&self) -> usize {
        self.sys.rank() + self.sys.num_roots()
    }

    /// Basis index of `X_gamma`.
    pub fn root_index(&self, k: usize) -> usize {
        self.rank() + k
    }

    pub fn structure_constant(&self, a: usize, b: usize) -> i64 {
        self.n[a * self.sys.num_roots() + b] as i64
    }

    /// Bracket of two basis vectors.
    pub fn bracket_basis(&self, u: usize, v: usize) -> Sparse<i64> {
        let r = self.rank();
        let sys = &self.sys;
        let mut out = Sparse::new();
        match (u < r, v < r) {
            (true, true) => {}
            (true, false) => {
                let c = sys.pair_simple(sys.root(v - r), u);
                if c != 0 {
                    out.insert(v, c);
                }
            }
            (false, true) => {
                let c = sys.pair_simple(sys.root(u - r), v);
                if c != 0 {
                    out.insert(u, -c);
                }
            }
            (false, false) => {
                let (a, b) = (u - r, v - r);
                if b == sys.negate(a) {
                    for (j, &c) in sys.coroot(a).iter().enumerate() {
                        if c != 0 {
                            out.insert(j, c);
                        }
                    }
                } else if let Some(s) = sys.add(a, b) {
                    out.insert(r + s, self.structure_constant(a, b));
                }
            }
        }
        out
    }

    pub fn bracket<T: Clone + Zero + From<i64> + std::ops::Mul<Output = T> + std::ops::AddAssign>(
        &self,
        x: &Sparse<T>,
        y: &Sparse<T>,
    ) -> Sparse<T> {
        let mut out: Sparse<T> = Sparse::new();
        for (&u, cu) in x {
            for (&v, cv) in y {
                for (w, c) in self.bracket_basis(u, v) {
                    let term = cu.clone() * cv.clone() * T::from(c);
                    *out.entry(w).or_insert_with(T::zero) += term;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Jacobi identity on a basis triple.
    pub fn jacobi_holds(&self, a: usize, b: usize, c: usize) -> bool {
        let e = |i: usize| Sparse::from([(i, 1i64)]);
        let t1 = self.bracket(&e(a), &self.bracket_basis(b, c));
        let t2 = self.bracket(&e(b), &self.bracket_basis(c, a));
        let t3 = self.bracket(&e(c), &self.bracket_basis(a, b));
        let mut sum = t1;
        for (k, v) in t2.into_iter().chain(t3) {
            *sum.entry(k).or_insert(0) += v;
        }
        sum.values().all(|&v| v == 0)
    }

    fn exp_ad(&self, x: usize, v: &Sparse<Q>, sign: i64) -> Sparse<Q> {
        let xv = Sparse::from([(x, Q::from_integer(sign))]);
        let mut out = v.clone();
        let mut term = v.clone();
        let mut k = 1i64;
        loop {
            let next: Sparse<Q> = self.bracket(&xv, &term);
            if next.is_empty() {
                break;
            }
            term = next.into_iter().map(|(i, c)| (i, c / Q::from_integer(k))).collect();
            for (&i, c) in &term {
                *out.entry(i).or_insert_with(Q::zero) += *c;
            }
            k += 1;
            assert!(k < 8, "ad X is nilpotent of small index");
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `n_i = exp(ad X_i) exp(-ad X_-i) exp(ad X_i)` applied to a basis vector.
    pub fn simple_lift_apply(&self, i: usize, v: usize) -> Sparse<Q> {
        let a = self.sys.simple(i);
        let x = self.root_index(a);
        let y = self.root_index(self.sys.negate(a));
        let s = Sparse::from([(v, Q::one())]);
        let s = self.exp_ad(x, &s, 1);
        let s = self.exp_ad(y, &s, -1);
        self.exp_ad(x, &s, 1)
    }

    fn compute_simple_lift(&self, i: usize) -> Result<Vec<i8>> {
        let sys = &self.sys;
        let r = self.rank();
        let mut signs = vec![0i8; sys.num_roots()];
        for k in 0..sys.num_roots() {
            let img = self.simple_lift_apply(i, r + k);
            let target = r + sys.reflect(i, k);
            match img.iter().collect::<Vec<_>>().as_slice() {
                [(&t, c)] if t == target && (**c == Q::one() || **c == -Q::one()) => {
                    signs[k] = if **c == Q::one() { 1 } else { -1 };
                }
                _ => return Err(Error::InvalidInput(format!("n_{i} is not monomial on root {k}"))),
            }
        }
        // Cartan block must be the reflection on coroots
        for j in 0..r {
            let img = self.simple_lift_apply(i, j);
            let want = sys.coroot(sys.reflect(i, sys.simple(j)));
            for (jj, &c) in want.iter().enumerate() {
                if img.get(&jj).copied().unwrap_or_else(Q::zero) != Q::from_integer(c) {
                    return Err(Error::InvalidInput(format!("n_{i} acts wrongly on h_{j}")));
                }
            }
        }
        Ok(signs)
    }

    pub fn identity_lift(&self) -> TitsElement {
        TitsElement { w: WeylElement::identity(&self.sys), signs: vec![1; self.sys.num_roots()] }
    }

    pub fn simple_lift(&self, i: usize) -> TitsElement {
        TitsElement { w: WeylElement::simple_reflection(&self.sys, i), signs: self.simple_signs[i].clone() }
    }

    /// `n(w)` along the canonical reduced word.
    pub fn tits_lift(&self, w: &WeylElement) -> TitsElement {
        self.lift_word_unchecked(w.word())
    }

    /// `n(w)` along a given reduced word; non-reduced words are rejected.
    pub fn tits_lift_word(&self, word: &[usize]) -> Result<TitsElement> {
        WeylElement::from_reduced_word(&self.sys, word)?;
        Ok(self.lift_word_unchecked(word))
    }

    fn lift_word_unchecked(&self, word: &[usize]) -> TitsElement {
        let mut n = self.identity_lift();
        for &i in word {
            n = self.mul(&n, &self.simple_lift(i));
        }
        n
    }

    pub fn mul(&self, u: &TitsElement, v: &TitsElement) -> TitsElement {
        let signs = (0..self.sys.num_roots()).map(|k| v.signs[k] * u.signs[v.w.act(k)]).collect();
        TitsElement { w: u.w.mul(&self.sys, &v.w), signs }
    }

    pub fn inverse(&self, n: &TitsElement) -> TitsElement {
        let mut signs = vec![0i8; n.signs.len()];
        for (k, &s) in n.signs.iter().enumerate() {
            signs[n.w.act(k)] = s;
        }
        TitsElement { w: n.w.inverse(&self.sys), signs }
    }

    /// `prod gamma^vee(-1)` over the given roots, as a torus element.
    pub fn torus_element(&self, coroots: &[usize]) -> TitsElement {
        let sys = &self.sys;
        let r = sys.rank();
        let mut total = vec![0i64; r];
        for &g in coroots {
            for (t, c) in total.iter_mut().zip(sys.coroot(g)) {
                *t += c;
            }
        }
        let signs = (0..sys.num_roots())
            .map(|d| if sys.pair_vec(sys.root(d), &total).rem_euclid(2) == 0 { 1 } else { -1 })
            .collect();
        TitsElement { w: WeylElement::identity(sys), signs }
    }

    /// `gamma^vee(-1)` on `X_delta`.
    pub fn torus_sign(&self, gamma: usize, delta: usize) -> i64 {
        if self.sys.pairing(delta, gamma).rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Adjoint matrix of a lift (columns are images of basis vectors).
    pub fn matrix(&self, n: &TitsElement) -> IntMatrix {
        let sys = &self.sys;
        let r = self.rank();
        let dim = self.dim();
        let mut m = IntMatrix::zeros(dim, dim);
        for j in 0..r {
            let img = sys.coroot(n.w.act(sys.simple(j)));
            for (i, &c) in img.iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        for k in 0..sys.num_roots() {
            m[(r + n.w.act(k), r + k)] = n.signs[k] as i64;
        }
        m
    }

    /// Dense matrix of `n_i` from the exponential formula, independent of the sign table.
    pub fn simple_lift_matrix_exp(&self, i: usize) -> IntMatrix {
        let dim = self.dim();
        let mut m = IntMatrix::zeros(dim, dim);
        for v in 0..dim {
            for (k, c) in self.simple_lift_apply(i, v) {
                assert!(c.is_integer(), "Chevalley lattice is preserved");
                m[(k, v)] = c.to_integer();
            }
        }
        m
    }

    /// Certify `n(w0)^2 = prod_{gamma > 0} gamma^vee(-1)` by dense matrices.
    pub fn w0_square_identity(&self) -> W0Square {
        let sys = &self.sys;
        let w0 = sys.longest_element();
        let n = self.tits_lift(&w0);
        let m = self.matrix(&n);
        let lhs = m.mul(&m);
        let r = self.rank();
        let mut rhs = IntMatrix::identity(self.dim());
        for d in 0..sys.num_roots() {
            rhs[(r + d, r + d)] = if sys.rho_pairing(d).rem_euclid(2) == 0 { 1 } else { -1 };
        }
        let torus = self.torus_element(&(0..sys.num_positive()).collect::<Vec<_>>());
        let signed = self.mul(&n, &n);
        W0Square {
            dim: self.dim(),
            matrix_equal: lhs == rhs,
            signed_equal: signed.signs == torus.signs && signed.w.is_identity(),
            negative_entries: (0..sys.num_roots()).filter(|&d| rhs[(r + d, r + d)] < 0).count(),
        }
    }

    /// The LS product defect `n(u) n(v) n(uv)^{-1}` and the predicted torus element.
    pub fn ls_defect(&self, u: &WeylElement, v: &WeylElement) -> (TitsElement, TitsElement) {
        let sys = &self.sys;
        let uv = u.mul(sys, v);
        let actual = self.mul(&self.mul(&self.tits_lift(u), &self.tits_lift(v)), &self.inverse(&self.tits_lift(&uv)));
        let ui = u.inverse(sys);
        let uvi = uv.inverse(sys);
        let gammas: Vec<usize> =
            (0..sys.num_positive()).filter(|&g| !sys.is_positive(ui.act(g)) && sys.is_positive(uvi.act(g))).collect();
        (actual, self.torus_element(&gammas))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct W0Square {
    pub dim: usize,
    pub matrix_equal: bool,
    pub signed_equal: bool,
    /// Root spaces on which both sides act by `-1`.
    pub negative_entries: usize,
}

impl W0Square {
    pub fn holds(&self) -> bool {
        self.matrix_equal && self.signed_equal
    }
}

/// A lift of a Weyl element to the normalizer of the torus, acting on the
/// Chevalley lattice as a signed permutation of root vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TitsElement {
    pub w: WeylElement,
    /// `n X_gamma = signs[gamma] X_{w gamma}`.
    pub signs: Vec<i8>,
}

impl TitsElement {
    /// `(w gamma, sign)`.
    pub fn sign_action(&self, gamma: usize) -> (usize, i64) {
        (self.w.act(gamma), self.signs[gamma] as i64)
    }

    pub fn is_torus(&self) -> bool {
        self.w.is_identity()
    }

    /// Values on the roots when this is a torus element.
    pub fn torus_part(&self) -> Option<&[i8]> {
        self.is_torus().then_some(&self.signs[..])
    }
}
