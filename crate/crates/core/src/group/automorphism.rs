use std::fmt;
use std::sync::Arc;

use crate::admissibility::KMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::{rat_to_f64, Field, Matrix, Rat, RatMatrix};
use crate::numfield::element::to_k_matrix;
use crate::numfield::{NFElement, NumberField};

/// Field element in power-basis coordinates.
pub type KVec = Vec<Vec<Rat>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Euclidean,
    HalfLine,
    Sphere2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseFactor {
    pub kind: FactorKind,
    pub coords: Vec<String>,
}

/// Product of Euclidean spaces, half-lines `ℝ₊*` and round 2-spheres, each
/// sitting in its ambient chart so that every action below is affine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseManifold {
    pub factors: Vec<BaseFactor>,
}

impl BaseManifold {
    pub fn new(factors: Vec<BaseFactor>) -> Result<BaseManifold> {
        if factors.is_empty() {
            return invalid("base manifold needs at least one factor");
        }
        let mut seen = std::collections::BTreeSet::new();
        for f in &factors {
            let want = match f.kind {
                FactorKind::Euclidean => None,
                FactorKind::HalfLine => Some(1),
                FactorKind::Sphere2 => Some(3),
            };
            if f.coords.is_empty() || want.is_some_and(|w| w != f.coords.len()) {
                return invalid(format!("factor {:?} has {} coordinates", f.kind, f.coords.len()));
            }
            for c in &f.coords {
                if !seen.insert(c.clone()) {
                    return invalid(format!("coordinate name `{c}` is used twice"));
                }
            }
        }
        Ok(BaseManifold { factors })
    }

    pub fn euclidean(names: &[&str]) -> BaseManifold {
        BaseManifold { factors: vec![BaseFactor { kind: FactorKind::Euclidean, coords: names.iter().map(|s| s.to_string()).collect() }] }
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.coords.len()).sum()
    }

    pub fn coord_names(&self) -> Vec<String> {
        self.factors.iter().flat_map(|f| f.coords.iter().cloned()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coord_names().iter().position(|c| c == name)
    }

    /// Index ranges of the factors in the chart.
    pub fn ranges(&self) -> Vec<(FactorKind, std::ops::Range<usize>)> {
        let mut off = 0;
        self.factors
            .iter()
            .map(|f| {
                let r = off..off + f.coords.len();
                off = r.end;
                (f.kind, r)
            })
            .collect()
    }

    /// Whether a numeric point lies on the manifold (within `tol` for the sphere).
    pub fn contains_f64(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && self.ranges().into_iter().all(|(k, r)| match k {
                FactorKind::Euclidean => true,
                FactorKind::HalfLine => x[r.start] > 0.0,
                FactorKind::Sphere2 => (x[r].iter().map(|v| v * v).sum::<f64>() - 1.0).abs() <= tol,
            })
    }
}

/// Base action `x ↦ Mx + s`, block diagonal along the factors.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseAction {
    pub matrix: KMatrix,
    pub shift: KVec,
}

impl BaseAction {
    pub fn identity(field: &NumberField, n: usize) -> BaseAction {
        BaseAction { matrix: Matrix::identity_in(field, n), shift: vec![field.zero(); n] }
    }

    /// Checks the per-factor model: invertible affine maps on Euclidean
    /// factors, positive scalings on half-lines, orthogonal maps on spheres.
    pub fn validate(&self, field: &Arc<NumberField>, base: &BaseManifold) -> Result<()> {
        let k = &**field;
        let n = base.dim();
        if self.matrix.rows() != n || self.matrix.cols() != n || self.shift.len() != n {
            return invalid("base action has the wrong size");
        }
        let ranges = base.ranges();
        for (kind, r) in &ranges {
            for i in r.clone() {
                for j in 0..n {
                    if !r.contains(&j) && !k.is_zero(self.matrix.get(i, j)) {
                        return Err(Error::UnsupportedComposition("base action mixes factors".into()));
                    }
                }
            }
            let block = Matrix::from_fn(r.len(), r.len(), |i, j| self.matrix.get(r.start + i, r.start + j).clone());
            let shift_zero = r.clone().all(|i| k.is_zero(&self.shift[i]));
            match kind {
                FactorKind::Euclidean => {
                    if block.inverse_in(k).is_none() {
                        return invalid("affine base action is not invertible");
                    }
                }
                FactorKind::HalfLine => {
                    let s = NFElement::new(field, block.get(0, 0).clone())?;
                    if !shift_zero || s.sign()? != std::cmp::Ordering::Greater {
                        return invalid("half-line action must be a positive scaling");
                    }
                }
                FactorKind::Sphere2 => {
                    let ortho = block.transpose().mul_in(k, &block).is_identity_in(k);
                    if !shift_zero || !ortho {
                        return Err(Error::UnsupportedComposition("sphere action must be orthogonal".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, field: &NumberField, x: &[Vec<Rat>]) -> KVec {
        let mx = self.matrix.mul_vec_in(field, x);
        mx.iter().zip(&self.shift).map(|(a, b)| field.add(a, b)).collect()
    }

    pub fn is_identity(&self, field: &NumberField) -> bool {
        self.matrix.is_identity_in(field) && self.shift.iter().all(|s| field.is_zero(s))
    }
}

/// `(a, x) ↦ (A a + c + L x, M x + s)` on `ℝᵖ × C`.
#[derive(Clone, PartialEq)]
pub struct BundleAutomorphism {
    pub name: String,
    pub field: Arc<NumberField>,
    /// Linear part `A ∈ GL_p(ℤ)`.
    pub linear: RatMatrix,
    /// Constant term `c` of the translation part.
    pub constant: KVec,
    /// `L`: dependence of the translation part on the base coordinates.
    pub coupling: KMatrix,
    pub base: BaseAction,
}

impl fmt::Debug for BundleAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.constant.iter().map(|e| NFElement::new(&self.field, e.clone()).map(|e| e.to_string()).unwrap_or_default()).collect();
        write!(f, "{}: A = {:?}, c = [{}]", self.name, self.linear.row_vecs(), c.join(", "))
    }
}

impl BundleAutomorphism {
    pub fn identity(field: &Arc<NumberField>, p: usize, n: usize) -> BundleAutomorphism {
        let k = &**field;
        BundleAutomorphism {
            name: "id".into(),
            field: field.clone(),
            linear: RatMatrix::identity(p),
            constant: vec![k.zero(); p],
            coupling: Matrix::zero_in(k, p, n),
            base: BaseAction::identity(k, n),
        }
    }

    /// Pure fibre translation by a rational vector.
    pub fn translation(field: &Arc<NumberField>, c: &[Rat], n: usize) -> BundleAutomorphism {
        let mut t = BundleAutomorphism::identity(field, c.len(), n);
        t.constant = c.iter().map(|r| field.rat_coords(r)).collect();
        t.name = "translation".into();
        t
    }

    pub fn p(&self) -> usize {
        self.linear.rows()
    }

    pub fn base_dim(&self) -> usize {
        self.base.shift.len()
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn check(&self, g: &BundleAutomorphism) -> Result<()> {
        if !NumberField::same(&self.field, &g.field) || self.p() != g.p() || self.base_dim() != g.base_dim() {
            return invalid("automorphisms live on different bundles");
        }
        Ok(())
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &BundleAutomorphism) -> Result<BundleAutomorphism> {
        self.check(g)?;
        let k = &*self.field;
        let af = to_k_matrix(k, &self.linear);
        let linear = self.linear.mul(&g.linear);
        let lf_sg = self.coupling.mul_vec_in(k, &g.base.shift);
        let af_cg = af.mul_vec_in(k, &g.constant);
        let constant = (0..self.p()).map(|i| k.add(&k.add(&af_cg[i], &self.constant[i]), &lf_sg[i])).collect();
        let coupling = af.mul_in(k, &g.coupling).add_in(k, &self.coupling.mul_in(k, &g.base.matrix));
        let base = BaseAction {
            matrix: self.base.matrix.mul_in(k, &g.base.matrix),
            shift: self.base.apply(k, &g.base.shift),
        };
        Ok(BundleAutomorphism { name: format!("{}∘{}", self.name, g.name), field: self.field.clone(), linear, constant, coupling, base })
    }

    pub fn inverse(&self) -> Result<BundleAutomorphism> {
        let k = &*self.field;
        let ainv = self.linear.inverse().ok_or_else(|| Error::InvalidInput(format!("{} has a singular linear part", self.name)))?;
        let minv = self.base.matrix.inverse_in(k).ok_or_else(|| Error::InvalidInput(format!("{} has a singular base action", self.name)))?;
        let shift: KVec = minv.mul_vec_in(k, &self.base.shift).iter().map(|v| k.neg(v)).collect();
        let aik = to_k_matrix(k, &ainv);
        let coupling = aik.mul_in(k, &self.coupling).mul_in(k, &minv);
        let coupling = coupling.map(|v| k.neg(v));
        // c' = −A⁻¹c − L′s  with L′ = −A⁻¹ L M⁻¹
        let lc = coupling.mul_vec_in(k, &self.base.shift);
        let aic = aik.mul_vec_in(k, &self.constant);
        let constant = (0..self.p()).map(|i| k.sub(&k.neg(&aic[i]), &lc[i])).collect();
        Ok(BundleAutomorphism {
            name: format!("{}^-1", self.name),
            field: self.field.clone(),
            linear: ainv,
            constant,
            coupling,
            base: BaseAction { matrix: minv, shift },
        })
    }

    pub fn pow(&self, e: i64) -> Result<BundleAutomorphism> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = BundleAutomorphism::identity(&self.field, self.p(), self.base_dim());
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base)?;
        }
        Ok(acc.named(format!("{}^{e}", self.name)))
    }

    /// Equality of the maps, ignoring names.
    pub fn same_map(&self, o: &BundleAutomorphism) -> bool {
        self.linear == o.linear && self.constant == o.constant && self.coupling == o.coupling && self.base == o.base
    }

    pub fn is_identity(&self) -> bool {
        let k = &*self.field;
        self.linear.is_identity() && self.constant.iter().all(|c| k.is_zero(c)) && self.coupling.is_zero_in(k) && self.base.is_identity(k)
    }

    /// The constant vector when the map is `(a, x) ↦ (a + c, x)`.
    pub fn pure_translation(&self) -> Option<&KVec> {
        let k = &*self.field;
        (self.linear.is_identity() && self.coupling.is_zero_in(k) && self.base.is_identity(k)).then_some(&self.constant)
    }

    /// Translation part `c + L x` at a base point.
    pub fn translation_at(&self, x: &[Vec<Rat>]) -> KVec {
        let k = &*self.field;
        let lx = self.coupling.mul_vec_in(k, x);
        self.constant.iter().zip(&lx).map(|(a, b)| k.add(a, b)).collect()
    }

    pub fn base_apply(&self, x: &[Vec<Rat>]) -> KVec {
        self.base.apply(&self.field, x)
    }

    /// Whether the translation part depends on the base point.
    pub fn has_coupling(&self) -> bool {
        !self.coupling.is_zero_in(&*self.field)
    }

    /// Postcompose with the fibre translation by `z`: constant becomes `c + z`.
    pub fn shifted(&self, z: &[Rat]) -> BundleAutomorphism {
        let t = BundleAutomorphism::translation(&self.field, z, self.base_dim());
        t.compose(self).expect("same bundle").named(self.name.clone())
    }

    /// Floating-point copy for numerical work.
    pub fn to_f64(&self) -> NumericAutomorphism {
        let e = |c: &Vec<Rat>| NFElement::new(&self.field, c.clone()).map(|x| x.approx().0).unwrap_or(f64::NAN);
        let p = self.p();
        let n = self.base_dim();
        NumericAutomorphism {
            linear: nalgebra::DMatrix::from_fn(p, p, |i, j| rat_to_f64(self.linear.get(i, j))),
            constant: nalgebra::DVector::from_iterator(p, self.constant.iter().map(e)),
            coupling: nalgebra::DMatrix::from_fn(p, n, |i, j| e(self.coupling.get(i, j))),
            base_matrix: nalgebra::DMatrix::from_fn(n, n, |i, j| e(self.base.matrix.get(i, j))),
            base_shift: nalgebra::DVector::from_iterator(n, self.base.shift.iter().map(e)),
        }
    }
}

/// `(a, x) ↦ (A a + c + L x, M x + s)` in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericAutomorphism {
    pub linear: nalgebra::DMatrix<f64>,
    pub constant: nalgebra::DVector<f64>,
    pub coupling: nalgebra::DMatrix<f64>,
    pub base_matrix: nalgebra::DMatrix<f64>,
    pub base_shift: nalgebra::DVector<f64>,
}

impl NumericAutomorphism {
    pub fn p(&self) -> usize {
        self.linear.nrows()
    }

    /// Image of the total-space point `(a, x)` given as one vector.
    pub fn apply(&self, point: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        let p = self.p();
        let n = self.base_shift.len();
        let a = point.rows(0, p);
        let x = point.rows(p, n);
        let fa = &self.linear * a + &self.constant + &self.coupling * x;
        let fx = &self.base_matrix * x + &self.base_shift;
        let mut out = nalgebra::DVector::zeros(p + n);
        out.rows_mut(0, p).copy_from(&fa);
        out.rows_mut(p, n).copy_from(&fx);
        out
    }

    /// Jacobian `[[A, L], [0, M]]`, constant in the affine model.
    pub fn jacobian(&self) -> nalgebra::DMatrix<f64> {
        let p = self.p();
        let n = self.base_shift.len();
        let mut j = nalgebra::DMatrix::zeros(p + n, p + n);
        j.view_mut((0, 0), (p, p)).copy_from(&self.linear);
        j.view_mut((0, p), (p, n)).copy_from(&self.coupling);
        j.view_mut((p, p), (n, n)).copy_from(&self.base_matrix);
        j
    }
}
