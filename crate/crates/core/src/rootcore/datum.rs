//! Based root data: a root system together with a choice of lattice
//! between the coroot and coweight lattices.

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::cartan::CartanType;
use super::system::{RootSystem, Vector};
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, LatticeQuotient, Matrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Isogeny {
    Adjoint,
    SimplyConnected,
    /// Extra cocharacters (fundamental-coweight coordinates) adjoined to the coroot lattice.
    Intermediate(Vec<Vector>),
}

/// Cocharacter lattice `X_*` described inside the coweight lattice.
///
/// Coordinates of cocharacters are taken in the basis `basis` (columns, in
/// fundamental-coweight coordinates); characters use the dual basis, so the
/// pairing is the plain dot product.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub cartan_type: Option<CartanType>,
    pub isogeny: Isogeny,
    system: Arc<RootSystem>,
    basis: IntMatrix,
    simple_roots: Vec<Vector>,
    simple_coroots: Vec<Vector>,
}

/// `X_*(T) / <coroots>` via Smith normal form.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalGroup {
    pub invariant_factors: Vec<i64>,
    /// Cocharacter representatives (fundamental-coweight coordinates), one per cyclic factor.
    pub generator_reps: Vec<Vector>,
}

impl FundamentalGroup {
    pub fn order(&self) -> i64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn label(&self) -> String {
        if self.is_trivial() {
            "1".into()
        } else {
            self.invariant_factors.iter().map(|n| format!("Z/{n}")).collect::<Vec<_>>().join("x")
        }
    }
}

impl RootDatum {
    pub fn build(t: CartanType, isogeny: Isogeny) -> Result<Self> {
        let sys = Arc::new(RootSystem::of_type(t.split()));
        let mut d = Self::from_system(sys, isogeny)?;
        d.cartan_type = Some(t);
        Ok(d)
    }

    pub fn adjoint(t: CartanType) -> Self {
        Self::build(t, Isogeny::Adjoint).expect("adjoint datum")
    }

    pub fn simply_connected(t: CartanType) -> Self {
        Self::build(t, Isogeny::SimplyConnected).expect("simply connected datum")
    }

    pub fn from_system(sys: Arc<RootSystem>, isogeny: Isogeny) -> Result<Self> {
        let r = sys.rank();
        let a = IntMatrix::from_rows(sys.cartan());
        let basis = match &isogeny {
            Isogeny::Adjoint => IntMatrix::identity(r),
            Isogeny::SimplyConnected => a.clone(),
            Isogeny::Intermediate(extra) => {
                let mut cols: Vec<Vector> = (0..r).map(|j| a.col(j)).collect();
                for v in extra {
                    if v.len() != r {
                        return Err(Error::InvalidInput("cocharacter has wrong length".into()));
                    }
                    cols.push(v.clone());
                }
                lattice_basis(&Matrix::from_cols(r, &cols))
            }
        };
        if r > 0 && basis.det() == 0 {
            return Err(Error::InvalidInput("cocharacter lattice has deficient rank".into()));
        }
        let simple_roots = (0..r).map(|i| basis.row(i)).collect();
        let simple_coroots = (0..r)
            .map(|j| {
                crate::linalg::solve_integer(&basis, &a.col(j))
                    .ok_or_else(|| Error::InvalidInput("coroots not in the cocharacter lattice".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RootDatum { cartan_type: None, isogeny, system: sys, basis, simple_roots, simple_coroots })
    }

    pub fn system(&self) -> &RootSystem {
        &self.system
    }

    pub fn system_arc(&self) -> Arc<RootSystem> {
        self.system.clone()
    }

    pub fn rank(&self) -> usize {
        self.system.rank()
    }

    /// Columns are a basis of `X_*` in fundamental-coweight coordinates.
    pub fn cocharacter_basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn simple_roots(&self) -> &[Vector] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[Vector] {
        &self.simple_coroots
    }

    /// Character-lattice coordinates of the root-lattice vector `v`.
    pub fn character(&self, v: &[i64]) -> Vector {
        let r = self.rank();
        let mut out = vec![0; r];
        for (i, &c) in v.iter().enumerate() {
            for k in 0..r {
                out[k] += c * self.simple_roots[i][k];
            }
        }
        out
    }

    /// Cocharacter-lattice coordinates of the coroot-lattice vector `v`.
    pub fn cocharacter(&self, v: &[i64]) -> Vector {
        let r = self.rank();
        let mut out = vec![0; r];
        for (j, &c) in v.iter().enumerate() {
            for k in 0..r {
                out[k] += c * self.simple_coroots[j][k];
            }
        }
        out
    }

    /// Fundamental-coweight coordinates of a cocharacter given in `X_*` coordinates.
    pub fn to_coweight(&self, x: &[i64]) -> Vector {
        self.basis.mul_vec(x)
    }

    pub fn pairing(&self, chi: &[i64], y: &[i64]) -> i64 {
        chi.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn fundamental_group(&self) -> FundamentalGroup {
        let r = self.rank();
        let rel = Matrix::from_cols(r, &self.simple_coroots);
        let q = LatticeQuotient::new(&rel);
        let invariant_factors = q.torsion();
        let generator_reps = q.generator_lifts().into_iter().map(|x| self.to_coweight(&x)).collect();
        FundamentalGroup { invariant_factors, generator_reps }
    }

    pub fn highest_root(&self) -> Result<(Vector, Vec<i64>)> {
        let k = self.system.highest_root()?;
        Ok((self.system.root(k).clone(), self.system.marks()?))
    }

    pub fn coxeter_number(&self) -> Result<i64> {
        self.system.coxeter_number()
    }

    /// `<gamma, 2 rho^vee>` for a root given in simple-root coordinates.
    pub fn rho_pairing(&self, gamma: &[i64]) -> Result<i64> {
        let k = self.system.require_root(gamma)?;
        Ok(self.system.rho_pairing(k))
    }

    /// Langlands dual: roots and coroots exchanged, same node numbering.
    pub fn dual(&self) -> RootDatum {
        let r = self.rank();
        let sys = self.system.as_ref();
        let cartan: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| sys.cartan()[j][i]).collect()).collect();
        let maxn = sys.simple_norms().iter().copied().max().unwrap_or(1);
        let norms = sys.simple_norms().iter().map(|&n| maxn / n).collect();
        let dsys = RootSystem::with_norms(cartan, norms).expect("dual system");
        // X_*(dual) = X^*(self); weights of self are coweights of the dual.
        let isogeny = match &self.isogeny {
            Isogeny::Adjoint => Isogeny::SimplyConnected,
            Isogeny::SimplyConnected => Isogeny::Adjoint,
            Isogeny::Intermediate(_) => Isogeny::Intermediate(self.character_lattice_gens()),
        };
        let mut d = RootDatum::from_system(Arc::new(dsys), isogeny).expect("dual datum");
        d.cartan_type = self.cartan_type.map(|t| {
            let fam = match t.family {
                super::cartan::Family::B => super::cartan::Family::C,
                super::cartan::Family::C => super::cartan::Family::B,
                f => f,
            };
            CartanType { family: fam, ..t }
        });
        d
    }

    /// Generators of `X^*` in fundamental-weight coordinates. The dual basis
    /// vector `e_k` pairs with `alpha_j^vee` to `(basis^{-1} A)_{kj}`.
    fn character_lattice_gens(&self) -> Vec<Vector> {
        let inv = crate::linalg::rational_inverse(&self.basis).expect("nonsingular basis");
        let a = self.system.cartan();
        let r = self.rank();
        inv.into_iter()
            .map(|row| {
                (0..r)
                    .map(|j| {
                        let x: Ratio<i64> = (0..r).map(|i| row[i] * a[i][j]).sum();
                        assert!(x.is_integer(), "X^* lies inside the weight lattice");
                        x.to_integer()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Basis (columns) of the lattice spanned by the columns of `gens`.
fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let s = crate::linalg::smith(gens);
    let r = gens.rows();
    let u_inv = s.u.unimodular_inverse().expect("unimodular");
    let mut cols = Vec::new();
    for (i, f) in s.invariant_factors.iter().enumerate() {
        cols.push(u_inv.col(i).iter().map(|x| x * f).collect::<Vector>());
    }
    Matrix::from_cols(r, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootcore::cartan::Family::*;

    #[test]
    fn fundamental_groups() {
        let f = |fam, r| RootDatum::adjoint(CartanType::new(fam, r).unwrap()).fundamental_group();
        assert_eq!(f(E, 6).invariant_factors, vec![3]);
        assert_eq!(f(E, 8).invariant_factors, Vec::<i64>::new());
        assert_eq!(f(B, 4).invariant_factors, vec![2]);
        assert_eq!(f(A, 4).invariant_factors, vec![5]);
        assert_eq!(f(D, 4).invariant_factors, vec![2, 2]);
        assert_eq!(f(D, 5).invariant_factors, vec![4]);
        let sc = RootDatum::simply_connected(CartanType::new(E, 7).unwrap()).fundamental_group();
        assert!(sc.is_trivial());
    }

    #[test]
    fn pairing_is_cartan() {
        for iso in [Isogeny::Adjoint, Isogeny::SimplyConnected] {
            let d = RootDatum::build(CartanType::new(C, 3).unwrap(), iso).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(d.pairing(&d.simple_roots()[i], &d.simple_coroots()[j]), d.system().cartan()[i][j]);
                }
            }
        }
    }

    #[test]
    fn intermediate_so8() {
        // spin(8) / <one central element>
        let d =
            RootDatum::build(CartanType::new(D, 4).unwrap(), Isogeny::Intermediate(vec![vec![1, 0, 0, 0]])).unwrap();
        assert_eq!(d.fundamental_group().invariant_factors, vec![2]);
    }

    #[test]
    fn dual_swaps_b_and_c() {
        let d = RootDatum::adjoint(CartanType::new(B, 3).unwrap());
        let dd = d.dual();
        assert_eq!(dd.cartan_type.unwrap().family, C);
        assert_eq!(dd.isogeny, Isogeny::SimplyConnected);
        assert_eq!(dd.system().marks().unwrap(), vec![2, 2, 1]);
    }

    #[test]
    fn duals_of_every_isogeny() {
        let t = CartanType::new(A, 3).unwrap();
        assert_eq!(RootDatum::simply_connected(t).dual().isogeny, Isogeny::Adjoint);
        let half = RootDatum::build(t, Isogeny::Intermediate(vec![vec![0, 1, 0]])).unwrap();
        assert_eq!(half.fundamental_group().invariant_factors, vec![2]);
        let dual = half.dual();
        assert_eq!(dual.fundamental_group().invariant_factors, vec![2]);
        assert_eq!(dual.dual().fundamental_group().invariant_factors, vec![2]);
    }
}
