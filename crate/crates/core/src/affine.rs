//! Extended Dynkin diagrams, the action of the fundamental group on them,
//! Frobenius forms, facets of the fundamental alcove and their stabilizers.
//!
//! Nodes of the extended diagram are numbered `0..=r`: node `0` is the affine
//! root `(-theta, 1)`, node `i >= 1` is `(alpha_i, 0)` in Bourbaki numbering.
//! The chamber is the fundamental alcove `{x : <alpha_i, x> > 0, <theta, x> < 1}`
//! and the base point is the origin, so every level set is `Z`.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{index_structure, integer_kernel, IntMatrix, LatticeQuotient, Matrix};
use crate::rootcore::{CartanType, Isogeny, RootDatum, RootSystem, Vector, WeylElement};

pub const AFFINE_NODE: usize = 0;

/// An element of `Omega`, realized as `x -> finite(x) + translation` on the apartment.
#[derive(Clone, Debug)]
pub struct OmegaElement {
    /// Image of the affine node; `0` for the identity.
    pub node: usize,
    pub perm: Vec<usize>,
    pub finite: WeylElement,
    /// Fundamental-coweight coordinates.
    pub translation: Vector,
}

#[derive(Clone, Debug)]
pub struct AffineRootSystem {
    datum: RootDatum,
    theta: usize,
    marks: Vec<i64>,
    grads: Vec<usize>,
    omega: Option<Vec<OmegaElement>>,
}

/// Linear action of a Weyl element on fundamental-coweight coordinates.
pub fn weyl_matrix_coweight(sys: &RootSystem, w: &WeylElement) -> IntMatrix {
    let r = sys.rank();
    let mut m = IntMatrix::identity(r);
    // w = s_{i1} ... s_{ik}; apply the last letter first
    for &i in w.word().iter().rev() {
        let mut s = IntMatrix::identity(r);
        for j in 0..r {
            // s_i(e_j) = e_j - <alpha_i, e_j> alpha_i^vee, and <alpha_i, e_j> = delta_ij
            if j == i {
                for k in 0..r {
                    s[(k, j)] -= sys.cartan()[k][i];
                }
            }
        }
        m = s.mul(&m);
    }
    m
}

/// Rational point of the apartment in fundamental-coweight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Point {
    pub num: Vector,
    pub den: i64,
}

impl Point {
    pub fn new(num: Vector, den: i64) -> Self {
        assert!(den != 0);
        let g = num.iter().fold(den, |a, &b| num_integer::gcd(a, b));
        let s = if den < 0 { -1 } else { 1 };
        Point { num: num.iter().map(|x| s * x / g).collect(), den: s * den / g }
    }

    pub fn origin(r: usize) -> Self {
        Point { num: vec![0; r], den: 1 }
    }

    /// `<gamma, x>` for a root-lattice vector.
    pub fn eval(&self, gamma: &[i64]) -> Ratio<i64> {
        let s: i64 = gamma.iter().zip(&self.num).map(|(a, b)| a * b).sum();
        Ratio::new(s, self.den)
    }

    pub fn coords(&self) -> Vec<Ratio<i64>> {
        self.num.iter().map(|&x| Ratio::new(x, self.den)).collect()
    }
}

impl AffineRootSystem {
    pub fn new(t: CartanType) -> Self {
        Self::from_datum(RootDatum::adjoint(t.split())).expect("simple type")
    }

    pub fn from_datum(datum: RootDatum) -> Result<Self> {
        let sys = datum.system();
        let theta = sys.highest_root()?;
        let r = sys.rank();
        let mut marks = vec![1];
        marks.extend(sys.marks()?);
        let mut grads = vec![sys.negate(theta)];
        grads.extend((0..r).map(|i| sys.simple(i)));
        let mut a = AffineRootSystem { datum, theta, marks, grads, omega: None };
        if a.datum.isogeny == Isogeny::Adjoint {
            a.omega = Some(a.compute_omega()?);
        }
        Ok(a)
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn system(&self) -> &RootSystem {
        self.datum.system()
    }

    pub fn rank(&self) -> usize {
        self.system().rank()
    }

    pub fn num_nodes(&self) -> usize {
        self.rank() + 1
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    /// Marks indexed by node, `marks()[0] = 1`.
    pub fn marks(&self) -> &[i64] {
        &self.marks
    }

    /// Gradient (root index) of a node.
    pub fn node_root(&self, a: usize) -> usize {
        self.grads[a]
    }

    pub fn node_level(&self, a: usize) -> i64 {
        if a == AFFINE_NODE {
            1
        } else {
            0
        }
    }

    /// Node carrying the affine root `(root k, level)`, if any.
    pub fn node_of(&self, k: usize, level: i64) -> Option<usize> {
        (0..self.num_nodes()).find(|&a| self.grads[a] == k && self.node_level(a) == level)
    }

    pub fn affine_cartan(&self) -> Vec<Vec<i64>> {
        let n = self.num_nodes();
        let sys = self.system();
        (0..n).map(|a| (0..n).map(|b| sys.pairing(self.grads[a], self.grads[b])).collect()).collect()
    }

    /// Affine roots `(gamma, n)` with `|n| <= window`.
    pub fn affine_roots(&self, window: i64) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for n in -window..=window {
            for k in 0..self.system().num_roots() {
                out.push((k, n));
            }
        }
        out
    }

    fn compute_omega(&self) -> Result<Vec<OmegaElement>> {
        let sys = self.system();
        let r = sys.rank();
        let mut out = vec![OmegaElement {
            node: 0,
            perm: (0..=r).collect(),
            finite: WeylElement::identity(sys),
            translation: vec![0; r],
        }];
        let w0 = sys.longest_element();
        for j in 1..=r {
            if self.marks[j] != 1 {
                continue;
            }
            let others: Vec<usize> = (0..r).filter(|&i| i != j - 1).collect();
            let w = sys.longest_in(&others).mul(sys, &w0);
            let mut lambda = vec![0; r];
            lambda[j - 1] = 1;
            let perm = (0..=r)
                .map(|a| {
                    let img = w.act(self.grads[a]);
                    let level = self.node_level(a) - sys.root(img)[j - 1];
                    self.node_of(img, level)
                        .ok_or_else(|| Error::InvalidInput(format!("omega_{j} does not permute the affine basis")))
                })
                .collect::<Result<Vec<_>>>()?;
            debug_assert_eq!(perm[0], j);
            out.push(OmegaElement { node: j, perm, finite: w, translation: lambda });
        }
        Ok(out)
    }

    /// Elements of `Omega` with their diagram permutations; adjoint data only.
    pub fn omega(&self) -> Result<&[OmegaElement]> {
        self.omega
            .as_deref()
            .ok_or_else(|| Error::Unsupported("Omega acts on the extended diagram only for adjoint data".into()))
    }

    pub fn omega_by_perm(&self, perm: &[usize]) -> Option<usize> {
        self.omega.as_ref()?.iter().position(|e| e.perm == perm)
    }

    pub fn omega_by_node(&self, node: usize) -> Option<usize> {
        self.omega.as_ref()?.iter().position(|e| e.node == node)
    }

    pub fn omega_mul(&self, a: usize, b: usize) -> usize {
        let om = self.omega.as_ref().expect("adjoint");
        let p: Vec<usize> = om[b].perm.iter().map(|&x| om[a].perm[x]).collect();
        self.omega_by_perm(&p).expect("Omega is closed")
    }

    pub fn omega_order_of(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.omega_mul(x, a);
            k += 1;
        }
        k
    }

    /// Invariant factors of the subgroup of `Omega` with the given element indices.
    pub fn omega_subgroup_structure(&self, elems: &[usize]) -> Vec<i64> {
        let om = self.omega.as_ref().expect("adjoint");
        let r = self.rank();
        let a = IntMatrix::from_rows(self.system().cartan());
        let mut cols: Vec<Vector> = (0..r).map(|j| a.col(j)).collect();
        cols.extend(elems.iter().map(|&e| om[e].translation.clone()));
        let sup = Matrix::from_cols(r, &cols);
        index_structure(&sup, &a).expect("coroot lattice has full rank")
    }

    /// Apply an element of `Omega` to a point.
    pub fn omega_act_point(&self, e: usize, x: &Point) -> Point {
        let om = &self.omega.as_ref().expect("adjoint")[e];
        let m = weyl_matrix_coweight(self.system(), &om.finite);
        let mut num = m.mul_vec(&x.num);
        for (n, t) in num.iter_mut().zip(&om.translation) {
            *n += t * x.den;
        }
        Point::new(num, x.den)
    }

    /// Vertices of the closed fundamental alcove, indexed by node.
    pub fn alcove_vertex(&self, a: usize) -> Point {
        let r = self.rank();
        if a == AFFINE_NODE {
            return Point::origin(r);
        }
        let mut num = vec![0; r];
        num[a - 1] = 1;
        Point::new(num, self.marks[a])
    }
}

/// Frobenius action on the extended diagram: a diagram automorphism composed
/// with an inner twist by an element of `Omega`.
#[derive(Clone, Debug, Serialize)]
pub struct FrobeniusForm {
    pub cartan_type: CartanType,
    /// Node `j` of the inner-twisting element `omega_j`; `0` for none.
    pub inner: usize,
    /// Diagram automorphism on nodes (fixes node 0).
    pub sigma: Vec<usize>,
    /// Composite permutation `omega . sigma` of the nodes.
    pub frob: Vec<usize>,
}

impl FrobeniusForm {
    pub fn split(a: &AffineRootSystem, t: CartanType) -> Self {
        Self::new(a, t, 0).expect("split form")
    }

    pub fn new(a: &AffineRootSystem, t: CartanType, inner: usize) -> Result<Self> {
        let r = a.rank();
        if t.rank != r {
            return Err(Error::InvalidInput("form type does not match the affine system".into()));
        }
        let ds = t.diagram_automorphism();
        let mut sigma = vec![0];
        sigma.extend(ds.iter().map(|&i| i + 1));
        let om = a.omega()?;
        let e = a
            .omega_by_node(inner)
            .ok_or_else(|| Error::InvalidInput(format!("node {inner} does not carry an element of Omega")))?;
        let frob: Vec<usize> = sigma.iter().map(|&x| om[e].perm[x]).collect();
        let ac = a.affine_cartan();
        for i in 0..=r {
            for j in 0..=r {
                if ac[frob[i]][frob[j]] != ac[i][j] {
                    return Err(Error::InvalidInput("Frobenius does not preserve the affine diagram".into()));
                }
            }
        }
        Ok(FrobeniusForm { cartan_type: t, inner, sigma, frob })
    }

    pub fn is_split(&self) -> bool {
        self.cartan_type.twist == 1 && self.inner == 0
    }

    pub fn is_quasi_split(&self) -> bool {
        self.inner == 0
    }

    pub fn label(&self) -> String {
        if self.inner == 0 {
            self.cartan_type.label()
        } else {
            format!("{}[inner {}]", self.cartan_type.label(), self.inner)
        }
    }

    /// Orbits of Frobenius on the nodes, each sorted, in order of least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.frob.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut orb = vec![];
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                orb.push(x);
                x = self.frob[x];
            }
            orb.sort_unstable();
            out.push(orb);
        }
        out
    }

    /// `sigma omega sigma^{-1}` as an element index.
    pub fn sigma_conjugate(&self, a: &AffineRootSystem, e: usize) -> usize {
        let om = a.omega().expect("adjoint");
        let n = self.sigma.len();
        let mut inv = vec![0; n];
        for (i, &x) in self.sigma.iter().enumerate() {
            inv[x] = i;
        }
        let p: Vec<usize> = (0..n).map(|x| self.sigma[om[e].perm[inv[x]]]).collect();
        a.omega_by_perm(&p).expect("sigma normalizes Omega")
    }

    /// `Omega^Frob`.
    pub fn omega_fixed(&self, a: &AffineRootSystem) -> Vec<usize> {
        (0..a.omega().expect("adjoint").len()).filter(|&e| self.sigma_conjugate(a, e) == e).collect()
    }

    /// Linear part of Frobenius on fundamental-coweight coordinates.
    pub fn linear_part(&self, a: &AffineRootSystem) -> IntMatrix {
        let r = a.rank();
        let mut p = IntMatrix::zeros(r, r);
        for i in 0..r {
            p[(self.sigma[i + 1] - 1, i)] = 1;
        }
        let om = &a.omega().expect("adjoint")[a.omega_by_node(self.inner).unwrap()];
        weyl_matrix_coweight(a.system(), &om.finite).mul(&p)
    }
}

/// A facet of the fundamental alcove, encoded by the nodes `Delta_F` vanishing on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Facet {
    pub delta: BTreeSet<usize>,
}

impl Facet {
    pub fn from_removed(a: &AffineRootSystem, removed: &[usize]) -> Result<Self> {
        let n = a.num_nodes();
        if let Some(&bad) = removed.iter().find(|&&x| x >= n) {
            return Err(Error::InvalidInput(format!("node {bad} out of range 0..{n}")));
        }
        let delta: BTreeSet<usize> = (0..n).filter(|x| !removed.contains(x)).collect();
        if delta.len() == n {
            return Err(Error::InvalidInput("Delta_F must be a proper subset".into()));
        }
        Ok(Facet { delta })
    }

    pub fn removed(&self, a: &AffineRootSystem) -> Vec<usize> {
        (0..a.num_nodes()).filter(|x| !self.delta.contains(x)).collect()
    }

    pub fn is_frob_stable(&self, f: &FrobeniusForm) -> bool {
        self.delta.iter().all(|&x| self.delta.contains(&f.frob[x]))
    }

    pub fn contains_affine_node(&self) -> bool {
        self.delta.contains(&AFFINE_NODE)
    }

    /// Barycenter of the vertices of the closed facet.
    pub fn barycenter(&self, a: &AffineRootSystem) -> Point {
        let rem = self.removed(a);
        let r = a.rank();
        let den: i64 = rem.iter().map(|&j| a.marks()[j]).fold(1, num_integer::lcm) * rem.len() as i64;
        let mut num = vec![0i64; r];
        for &j in &rem {
            if j != AFFINE_NODE {
                num[j - 1] += den / (a.marks()[j] * rem.len() as i64);
            }
        }
        Point::new(num, den)
    }

    pub fn label(&self, a: &AffineRootSystem) -> String {
        let rem: Vec<String> = self.removed(a).iter().map(|x| x.to_string()).collect();
        format!("-{{{}}}", rem.join(","))
    }
}

/// Maximal Frobenius-stable proper subsets of the nodes.
pub fn maximal_facets(a: &AffineRootSystem, f: &FrobeniusForm) -> Vec<Facet> {
    let n = a.num_nodes();
    f.orbits().into_iter().map(|orb| Facet { delta: (0..n).filter(|x| !orb.contains(x)).collect() }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FacetStabilizer {
    /// Element indices of `Omega_{G,F}`.
    pub elements: Vec<usize>,
    pub frob_fixed: Vec<usize>,
    pub structure: Vec<i64>,
    pub frob_fixed_structure: Vec<i64>,
}

pub fn facet_stabilizer(a: &AffineRootSystem, f: &FrobeniusForm, facet: &Facet) -> Result<FacetStabilizer> {
    let om = a.omega()?;
    let elements: Vec<usize> =
        (0..om.len()).filter(|&e| facet.delta.iter().all(|&x| facet.delta.contains(&om[e].perm[x]))).collect();
    let fixed: HashSet<usize> = f.omega_fixed(a).into_iter().collect();
    let frob_fixed: Vec<usize> = elements.iter().copied().filter(|e| fixed.contains(e)).collect();
    Ok(FacetStabilizer {
        structure: a.omega_subgroup_structure(&elements),
        frob_fixed_structure: a.omega_subgroup_structure(&frob_fixed),
        elements,
        frob_fixed,
    })
}

/// `Omega / (sigma - 1) Omega` with lifts of generators.
#[derive(Clone, Debug, Serialize)]
pub struct Coinvariants {
    pub invariant_factors: Vec<i64>,
    /// Cocharacter lifts in fundamental-coweight coordinates.
    pub generator_lifts: Vec<Vector>,
}

/// Coinvariants of Frobenius on `X_* / <coroots>` for the datum of `d`.
pub fn h1_coinvariants(d: &RootDatum, f: &FrobeniusForm) -> Result<Coinvariants> {
    coinvariants_of(
        d,
        &d.system().cartan().iter().enumerate().map(|(j, _)| coroot_coweight(d.system(), j)).collect::<Vec<_>>(),
        f,
    )
}

fn coroot_coweight(sys: &RootSystem, j: usize) -> Vector {
    (0..sys.rank()).map(|i| sys.cartan()[i][j]).collect()
}

/// Coinvariants of `X_* / span(relations)` where the relations are coweight-coordinate vectors.
pub fn coinvariants_of(d: &RootDatum, relations: &[Vector], f: &FrobeniusForm) -> Result<Coinvariants> {
    let r = d.rank();
    let b = d.cocharacter_basis();
    let inv = crate::linalg::rational_inverse(b).ok_or_else(|| Error::InvalidInput("singular lattice".into()))?;
    let to_x = |v: &Vector| -> Result<Vector> {
        (0..r)
            .map(|i| {
                let s: Ratio<i64> = (0..r).map(|k| inv[i][k] * v[k]).sum();
                if s.is_integer() {
                    Ok(s.to_integer())
                } else {
                    Err(Error::InvalidInput("vector not in the cocharacter lattice".into()))
                }
            })
            .collect()
    };
    let mut cols = Vec::new();
    for v in relations {
        cols.push(to_x(v)?);
    }
    // (sigma - 1) on the lattice basis
    for k in 0..r {
        let e = b.col(k);
        let mut s = vec![0; r];
        for i in 0..r {
            s[f.sigma[i + 1] - 1] = e[i];
        }
        let img = to_x(&s).map_err(|_| Error::Unsupported("sigma does not preserve the cocharacter lattice".into()))?;
        let mut diff = img;
        diff[k] -= 1;
        cols.push(diff);
    }
    let q = LatticeQuotient::new(&Matrix::from_cols(r, &cols));
    if q.free_rank() > 0 {
        return Err(Error::InvalidInput("coinvariants are infinite".into()));
    }
    Ok(Coinvariants {
        invariant_factors: q.torsion(),
        generator_lifts: q.generator_lifts().iter().map(|x| d.to_coweight(x)).collect(),
    })
}

/// The reductive quotient attached to a facet.
#[derive(Clone, Debug, Serialize)]
pub struct ReductiveQuotient {
    pub nodes: Vec<usize>,
    pub type_label: String,
    /// Simple roots in character-lattice coordinates.
    pub simple_roots: Vec<Vector>,
    /// Simple coroots in cocharacter-lattice coordinates.
    pub simple_coroots: Vec<Vector>,
    pub cartan: Vec<Vec<i64>>,
    /// Torsion of `X^*(T) / <Delta_F>`.
    pub center_torsion: Vec<i64>,
    pub connected_center: bool,
    /// Node lists of the irreducible components.
    pub components: Vec<Vec<usize>>,
}

pub fn reductive_quotient(a: &AffineRootSystem, facet: &Facet) -> Result<ReductiveQuotient> {
    let sys = a.system();
    let d = a.datum();
    let r = a.rank();
    let nodes: Vec<usize> = facet.delta.iter().copied().collect();
    let simple_roots: Vec<Vector> = nodes.iter().map(|&x| d.character(sys.root(a.node_root(x)))).collect();
    let simple_coroots: Vec<Vector> = nodes.iter().map(|&x| d.cocharacter(sys.coroot(a.node_root(x)))).collect();
    let m = Matrix::from_cols(r, &simple_roots);
    if m.rank() != nodes.len() {
        return Err(Error::InvalidInput("Delta_F is not linearly independent".into()));
    }
    let q = LatticeQuotient::new(&m);
    let center_torsion = q.torsion();
    let ac = a.affine_cartan();
    let cartan: Vec<Vec<i64>> = nodes.iter().map(|&x| nodes.iter().map(|&y| ac[x][y]).collect()).collect();
    let norms = nodes.iter().map(|&x| sys.norm(a.node_root(x))).collect();
    let sub = RootSystem::with_norms(cartan.clone(), norms)?;
    let components = sub.components().into_iter().map(|c| c.into_iter().map(|i| nodes[i]).collect()).collect();
    Ok(ReductiveQuotient {
        type_label: sub.type_label(),
        connected_center: center_torsion.is_empty(),
        nodes,
        simple_roots,
        simple_coroots,
        cartan,
        center_torsion,
        components,
    })
}

/// True iff the facet's Frobenius-fixed locus is a point.
pub fn vertex_test(a: &AffineRootSystem, f: &FrobeniusForm, facet: &Facet) -> bool {
    let grads: Vec<Vector> = facet.delta.iter().map(|&x| a.system().root(a.node_root(x)).clone()).collect();
    spans_fixed_space(a.rank(), &f.linear_part(a), &grads)
}

/// True iff the functionals `grads` restricted to `ker(linear - 1)` span its dual.
pub fn spans_fixed_space(r: usize, linear: &IntMatrix, grads: &[Vector]) -> bool {
    let mut l = linear.clone();
    for i in 0..r {
        l[(i, i)] -= 1;
    }
    let kernel = integer_kernel(&l);
    if kernel.is_empty() {
        return true;
    }
    if grads.is_empty() {
        return false;
    }
    let k = Matrix::from_cols(r, &kernel);
    let g = Matrix::from_rows(grads);
    g.mul(&k).rank() == kernel.len()
}

/// Gradients of the affine roots vanishing at `x`.
pub fn vanishing_gradients(sys: &RootSystem, x: &Point) -> Vec<usize> {
    (0..sys.num_roots()).filter(|&k| x.eval(sys.root(k)).is_integer()).collect()
}

/// An equal-rank or smaller closed subsystem `Phi_H` of an ambient system, with
/// its induced affine root system `Psi_H = {psi in Psi_G : grad psi in Phi_H}`.
#[derive(Clone, Debug, Serialize)]
pub struct ApartmentEmbedding {
    /// Root indices of `Phi_H` in the ambient system.
    pub roots: Vec<usize>,
    /// Simple roots of `Phi_H` (ambient indices) for the induced positive system.
    pub basis: Vec<usize>,
    pub type_label: String,
    /// Affine basis of `Psi_H`: per component the simple roots at level 0 and `-theta_c` at level 1.
    pub affine_basis: Vec<(usize, i64)>,
    /// Every `gamma in Phi_H` has level set exactly `Z` inside the checked window.
    pub level_sets_are_z: bool,
    pub window: i64,
}

/// Check closure of `roots` and return its positive-system basis.
pub fn closed_subsystem_basis(sys: &RootSystem, roots: &[usize]) -> Result<Vec<usize>> {
    let set: HashSet<usize> = roots.iter().copied().collect();
    for &k in roots {
        if !set.contains(&sys.negate(k)) {
            return Err(Error::InvalidInput("subsystem is not symmetric".into()));
        }
        for &l in roots {
            if let Some(s) = sys.add(k, l) {
                if !set.contains(&s) {
                    return Err(Error::InvalidInput("subsystem is not closed".into()));
                }
            }
        }
    }
    let pos: Vec<usize> = roots.iter().copied().filter(|&k| sys.is_positive(k)).collect();
    let mut basis: Vec<usize> = pos
        .iter()
        .copied()
        .filter(|&k| {
            !pos.iter().any(|&a| {
                let diff: Vector = sys.root(k).iter().zip(sys.root(a)).map(|(x, y)| x - y).collect();
                sys.index_of(&diff).map_or(false, |d| set.contains(&d) && sys.is_positive(d))
            })
        })
        .collect();
    basis.sort_unstable();
    Ok(basis)
}

/// Root system of a basis given by ambient root indices.
pub fn subsystem_of_basis(sys: &RootSystem, basis: &[usize]) -> RootSystem {
    let cartan = basis.iter().map(|&a| basis.iter().map(|&b| sys.pairing(a, b)).collect()).collect();
    let norms = basis.iter().map(|&a| sys.norm(a)).collect();
    RootSystem::with_norms(cartan, norms).expect("subsystem of a finite system")
}

pub fn apartment_embedding(sys: &RootSystem, roots: &[usize]) -> Result<ApartmentEmbedding> {
    let basis = closed_subsystem_basis(sys, roots)?;
    let sub = subsystem_of_basis(sys, &basis);
    let mut affine_basis: Vec<(usize, i64)> = basis.iter().map(|&b| (b, 0)).collect();
    for comp in sub.components() {
        let csub = sub.restrict(&comp);
        let top = csub.root(csub.highest_root()?);
        let mut v = vec![0i64; sys.rank()];
        for (ci, &c) in top.iter().enumerate() {
            for (j, x) in sys.root(basis[comp[ci]]).iter().enumerate() {
                v[j] += c * x;
            }
        }
        let theta_c = sys.require_root(&v)?;
        affine_basis.push((sys.negate(theta_c), 1));
    }
    let window = 2;
    let level_sets_are_z = affine_closure_covers(sys, &affine_basis, roots, window);
    Ok(ApartmentEmbedding {
        roots: roots.to_vec(),
        type_label: sub.type_label(),
        basis,
        affine_basis,
        level_sets_are_z,
        window,
    })
}

/// Close the affine basis under its own reflections inside a wide window and
/// check that `(gamma, n)` is reached for every `gamma` in `roots` and `|n| <= window`.
fn affine_closure_covers(sys: &RootSystem, basis: &[(usize, i64)], roots: &[usize], window: i64) -> bool {
    let wide = 4 * window + 4;
    let mut seen: HashSet<(usize, i64)> = basis.iter().copied().collect();
    let mut stack: Vec<(usize, i64)> = basis.to_vec();
    while let Some((g, n)) = stack.pop() {
        for &(b, k) in basis {
            let c = sys.pairing(g, b);
            let img = {
                let v: Vector = sys.root(g).iter().zip(sys.root(b)).map(|(x, y)| x - c * y).collect();
                sys.index_of(&v).expect("reflection of a root")
            };
            let m = n - c * k;
            if m.abs() <= wide && seen.insert((img, m)) {
                stack.push((img, m));
            }
        }
    }
    let set: HashSet<usize> = roots.iter().copied().collect();
    let levels_ok = seen.iter().all(|(g, _)| set.contains(g));
    levels_ok && roots.iter().all(|&g| (-window..=window).all(|n| seen.contains(&(g, n))))
}

/// Ambient affine roots `(gamma > 0, n)` with `|n| <= window`, split by membership in `Psi_H`.
pub fn hyperplane_partition(sys: &RootSystem, roots: &[usize], window: i64) -> (Vec<(usize, i64)>, Vec<(usize, i64)>) {
    let set: HashSet<usize> = roots.iter().copied().collect();
    let mut solid = Vec::new();
    let mut dashed = Vec::new();
    for k in 0..sys.num_positive() {
        for n in -window..=window {
            if set.contains(&k) {
                solid.push((k, n));
            } else {
                dashed.push((k, n));
            }
        }
    }
    (solid, dashed)
}

/// `Omega_H = X_* / <Phi_H^vee>` mapped onto `Omega_G = X_* / <Phi^vee>`.
#[derive(Clone, Debug, Serialize)]
pub struct WeylInclusion {
    pub omega_h_torsion: Vec<i64>,
    pub omega_h_free_rank: usize,
    pub omega_g_torsion: Vec<i64>,
    /// Images in `Omega_G` coordinates of the generators of `Omega_H`.
    pub generator_images: Vec<Vector>,
    pub surjective: bool,
    /// Number of generators of `N_H(S)/S_0` on which the Kottwitz square was checked.
    pub generators_checked: usize,
    pub commutes: bool,
    /// First generator on which commutativity failed.
    pub counterexample: Option<String>,
}

pub fn extended_weyl_inclusion(d: &RootDatum, roots: &[usize]) -> Result<WeylInclusion> {
    let sys = d.system();
    let r = d.rank();
    closed_subsystem_basis(sys, roots)?;
    let h_coroots: Vec<Vector> = roots.iter().map(|&k| d.cocharacter(sys.coroot(k))).collect();
    let g_coroots: Vec<Vector> = (0..sys.num_roots()).map(|k| d.cocharacter(sys.coroot(k))).collect();
    let qh = LatticeQuotient::new(&if h_coroots.is_empty() {
        IntMatrix::zeros(r, 1)
    } else {
        Matrix::from_cols(r, &h_coroots)
    });
    let qg = LatticeQuotient::new(&Matrix::from_cols(r, &g_coroots));
    let gens = qh.generator_lifts();
    let generator_images: Vec<Vector> = gens.iter().map(|x| qg.reduce(x)).collect();
    // surjectivity: images of all X_* basis vectors already generate; check that
    // generator images together with relations span Omega_G
    let mut cols = generator_images.clone();
    for (i, m) in qg.moduli.iter().enumerate() {
        let mut v = vec![0; r];
        v[i] = *m;
        cols.push(v);
    }
    let span = LatticeQuotient::new(&Matrix::from_cols(r, &cols));
    let surjective = span.order() == Some(1);
    // Kottwitz square: kappa_G(g) = f(kappa_H(g)) for translations and affine reflections.
    let mut checked = 0;
    let mut counterexample = None;
    let mut check = |label: String, mu: Vector| {
        checked += 1;
        let via_h = qg.reduce(&qh.lift(&qh.reduce(&mu)));
        let direct = qg.reduce(&mu);
        if via_h != direct && counterexample.is_none() {
            counterexample = Some(label);
        }
        // affine reflections must die in Omega_H as well
    };
    for k in 0..r {
        let mut e = vec![0; r];
        e[k] = 1;
        check(format!("t(e{k})"), e);
    }
    let mut reflection_ok = true;
    for &k in roots.iter().filter(|&&k| sys.is_positive(k)) {
        for n in 0..=1i64 {
            let mu: Vector = d.cocharacter(sys.coroot(k)).iter().map(|x| -n * x).collect();
            if !qh.is_zero(&mu) || !qg.is_zero(&mu) {
                reflection_ok = false;
            }
            check(format!("s({k},{n})"), mu);
        }
    }
    if !reflection_ok && counterexample.is_none() {
        counterexample = Some("affine reflection with nonzero Kottwitz image".into());
    }
    Ok(WeylInclusion {
        omega_h_torsion: qh.torsion(),
        omega_h_free_rank: qh.free_rank(),
        omega_g_torsion: qg.torsion(),
        generator_images,
        surjective,
        generators_checked: checked,
        commutes: counterexample.is_none(),
        counterexample,
    })
}

/// Orbits of `Omega^Frob` on a list of facets, as sorted index lists.
pub fn facet_classes(a: &AffineRootSystem, f: &FrobeniusForm, facets: &[Facet]) -> Vec<Vec<usize>> {
    let om = a.omega().expect("adjoint");
    let fixed = f.omega_fixed(a);
    let pos: HashMap<&Facet, usize> = facets.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut seen = vec![false; facets.len()];
    let mut out = Vec::new();
    for i in 0..facets.len() {
        if seen[i] {
            continue;
        }
        let mut cls = BTreeSet::new();
        for &e in &fixed {
            let img = Facet { delta: facets[i].delta.iter().map(|&x| om[e].perm[x]).collect() };
            if let Some(&j) = pos.get(&img) {
                seen[j] = true;
                cls.insert(j);
            }
        }
        out.push(cls.into_iter().collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootcore::Family::*;

    fn aff(f: crate::rootcore::Family, r: usize) -> (AffineRootSystem, CartanType) {
        let t = CartanType::new(f, r).unwrap();
        (AffineRootSystem::new(t), t)
    }

    #[test]
    fn omega_c_n_reverses() {
        let (a, _) = aff(C, 4);
        let om = a.omega().unwrap();
        assert_eq!(om.len(), 2);
        assert_eq!(om[1].perm, vec![4, 3, 2, 1, 0]);
    }

    #[test]
    fn omega_b_n_swaps_01() {
        let (a, _) = aff(B, 5);
        let om = a.omega().unwrap();
        assert_eq!(om[1].perm, vec![1, 0, 2, 3, 4, 5]);
    }

    #[test]
    fn omega_e6_rotates_about_4() {
        let (a, _) = aff(E, 6);
        let om = a.omega().unwrap();
        assert_eq!(om.len(), 3);
        for e in &om[1..] {
            assert_eq!(e.perm[4], 4);
            assert_eq!(a.omega_order_of(a.omega_by_node(e.node).unwrap()), 3);
        }
    }

    #[test]
    fn omega_faithful_and_free() {
        for t in CartanType::all_up_to(8) {
            let a = AffineRootSystem::new(t);
            let om = a.omega().unwrap();
            let d = IntMatrix::from_rows(a.system().cartan()).det().abs();
            assert_eq!(om.len() as i64, d, "{t}");
            let imgs: HashSet<usize> = om.iter().map(|e| e.perm[0]).collect();
            assert_eq!(imgs.len(), om.len());
            assert_eq!(
                a.omega_subgroup_structure(&(0..om.len()).collect::<Vec<_>>()),
                a.datum().fundamental_group().invariant_factors
            );
        }
    }

    #[test]
    fn c_n_stabilizers() {
        let (a, t) = aff(C, 4);
        let f = FrobeniusForm::split(&a, t);
        for i in 0..=4 {
            let facet = Facet::from_removed(&a, &[i]).unwrap();
            let st = facet_stabilizer(&a, &f, &facet).unwrap();
            assert_eq!(st.elements.len(), if i == 2 { 2 } else { 1 }, "node {i}");
        }
    }

    #[test]
    fn coinvariants() {
        let (a, t) = aff(A, 1);
        let f = FrobeniusForm::split(&a, t);
        assert_eq!(h1_coinvariants(a.datum(), &f).unwrap().invariant_factors, vec![2]);
        let t = CartanType::twisted(A, 4, 2).unwrap();
        let a = AffineRootSystem::new(t);
        let f = FrobeniusForm::split(&a, t);
        assert_eq!(f.omega_fixed(&a), vec![0]);
        assert!(h1_coinvariants(a.datum(), &f).unwrap().invariant_factors.is_empty());
        let (a, t) = aff(E, 8);
        let f = FrobeniusForm::split(&a, t);
        assert!(h1_coinvariants(a.datum(), &f).unwrap().invariant_factors.is_empty());
    }

    #[test]
    fn reductive_quotients() {
        let (a, _) = aff(C, 4);
        let q = reductive_quotient(&a, &Facet::from_removed(&a, &[2]).unwrap()).unwrap();
        assert_eq!(q.center_torsion, vec![2]);
        assert_eq!(q.type_label, "B2+B2");
        let (a, _) = aff(A, 5);
        for i in 0..=5 {
            let q = reductive_quotient(&a, &Facet::from_removed(&a, &[i]).unwrap()).unwrap();
            assert!(q.connected_center);
        }
    }

    #[test]
    fn vertex_tests() {
        let (a, t) = aff(E, 7);
        let f = FrobeniusForm::split(&a, t);
        for facet in maximal_facets(&a, &f) {
            assert!(vertex_test(&a, &f, &facet));
        }
        let (a, t) = aff(A, 3);
        let f = FrobeniusForm::split(&a, t);
        assert!(!vertex_test(&a, &f, &Facet::from_removed(&a, &[0, 1, 2, 3]).unwrap()));
    }

    #[test]
    fn barycenters_lie_on_their_facets() {
        let (a, _) = aff(E, 6);
        let sys = a.system();
        for rem in [vec![4], vec![2, 3, 5], vec![0, 1]] {
            let facet = Facet::from_removed(&a, &rem).unwrap();
            let x = facet.barycenter(&a);
            for n in 0..a.num_nodes() {
                let v = x.eval(sys.root(a.node_root(n))) + a.node_level(n);
                assert_eq!(v.is_zero(), facet.delta.contains(&n), "{rem:?} node {n}");
            }
        }
    }

    use num_traits::Zero;
}
