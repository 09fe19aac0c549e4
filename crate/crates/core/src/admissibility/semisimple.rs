use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::json::{self, Num};
use crate::linalg::{char_poly_z, factor_over_z, lattice_saturate, min_poly, Matrix, PolyQ, PolyZ, Rat, RatMatrix};

/// Outcome of the semi-simplicity test, with the polynomials that decide it.
#[derive(Debug, Clone, PartialEq)]
pub struct SemisimpleWitness {
    pub semisimple: bool,
    pub min_poly: PolyQ,
    /// `gcd(μ, μ′)`; constant exactly when `μ` is squarefree.
    pub gcd: PolyQ,
}

/// A matrix is semi-simple iff its minimal polynomial is squarefree.
pub fn is_semisimple(a: &RatMatrix) -> Result<SemisimpleWitness> {
    let mu = min_poly(a)?;
    let gcd = mu.gcd(&mu.derivative());
    Ok(SemisimpleWitness { semisimple: gcd.is_constant(), min_poly: mu, gcd })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub matrix: RatMatrix,
    pub poly: PolyZ,
    /// Multiplicity of `poly` in the characteristic polynomial of the whole matrix.
    pub multiplicity: usize,
}

/// Integral change of basis putting a semi-simple matrix in block-diagonal form.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    /// Columns are integer vectors; `C⁻¹AC` is block diagonal.
    pub change_of_basis: RatMatrix,
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn block_diagonal(&self) -> RatMatrix {
        let n: usize = self.blocks.iter().map(|b| b.matrix.rows()).sum();
        let mut m = RatMatrix::zero(n, n);
        let mut off = 0;
        for b in &self.blocks {
            let k = b.matrix.rows();
            for i in 0..k {
                for j in 0..k {
                    m.set(off + i, off + j, b.matrix.get(i, j).clone());
                }
            }
            off += k;
        }
        m
    }

    /// `C·D·C⁻¹`, which must equal the original matrix.
    pub fn reassemble(&self) -> RatMatrix {
        let c = &self.change_of_basis;
        c.mul(&self.block_diagonal()).mul(&c.inverse().expect("change of basis is invertible"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockJson {
    pub matrix: Vec<Vec<Num>>,
    pub char_poly: String,
    pub multiplicity: usize,
}

impl BlockDecomposition {
    pub fn to_json(&self) -> (Vec<Vec<Num>>, Vec<BlockJson>) {
        let blocks = self
            .blocks
            .iter()
            .map(|b| BlockJson { matrix: json::matrix_json(&b.matrix), char_poly: b.poly.to_string(), multiplicity: b.multiplicity })
            .collect();
        (json::matrix_json(&self.change_of_basis), blocks)
    }
}

/// Splits `ℚᵖ` into `A`-invariant pieces, one per irreducible factor copy.
///
/// Each primary component `ker fₖ(A)` is cut into cyclic subspaces
/// `span(v, Av, …)`; for semi-simple `A` every such subspace is a simple
/// module, so consecutive ones meet trivially. Each piece is saturated in
/// `ℤᵖ`, so the restricted block is an integer matrix.
pub fn block_decompose(a: &RatMatrix) -> Result<BlockDecomposition> {
    if !a.is_square() || !a.is_integral() {
        return invalid("block decomposition needs a square integer matrix");
    }
    let w = is_semisimple(a)?;
    if !w.semisimple {
        return Err(Error::NotAdmissible(format!(
            "matrix is not semi-simple: minimal polynomial {} has repeated factor {}",
            w.min_poly, w.gcd
        )));
    }
    let p = a.rows();
    let chi = factor_over_z(&char_poly_z(a)?)?;
    let mut columns: Vec<Vec<Rat>> = Vec::new();
    let mut blocks = Vec::new();
    for (f, mult) in &chi.factors {
        let d = f.deg();
        let primary = f.to_q().eval_matrix(a).kernel();
        let mut chosen: Vec<Vec<Rat>> = Vec::new();
        for seed in &primary {
            if chosen.len() == d * mult {
                break;
            }
            if in_span(&chosen, seed) {
                continue;
            }
            let mut cyc = vec![seed.clone()];
            for _ in 1..d {
                let next = a.mul_vec(cyc.last().unwrap());
                cyc.push(next);
            }
            let lattice = lattice_saturate(p, &cyc)?;
            let basis = lattice.basis_vectors();
            let cob = Matrix::from_columns(p, &basis);
            let block = restrict(a, &cob)?;
            chosen.extend(basis.iter().cloned());
            columns.extend(basis);
            blocks.push(Block { matrix: block, poly: f.clone(), multiplicity: *mult });
        }
        if chosen.len() != d * mult {
            return Err(Error::NotAdmissible(format!("primary component of {f} has unexpected dimension")));
        }
    }
    let change_of_basis = Matrix::from_columns(p, &columns);
    Ok(BlockDecomposition { change_of_basis, blocks })
}

fn in_span(basis: &[Vec<Rat>], v: &[Rat]) -> bool {
    if basis.is_empty() {
        return v.iter().all(|x| x == &Rat::default());
    }
    let mut rows = basis.to_vec();
    let r = Matrix::from_rows(rows.clone()).rank();
    rows.push(v.to_vec());
    Matrix::from_rows(rows).rank() == r
}

/// Matrix of `A` restricted to the invariant span of the columns of `basis`.
fn restrict(a: &RatMatrix, basis: &RatMatrix) -> Result<RatMatrix> {
    let images = a.mul(basis);
    let cols: Vec<Vec<Rat>> = (0..basis.cols())
        .map(|j| basis.solve_in(&crate::linalg::Rationals, &images.column(j)))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::NotAdmissible("subspace is not invariant".into()))?;
    Ok(Matrix::from_columns(basis.cols(), &cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::char_poly;

    #[test]
    fn semisimplicity() {
        let a0 = RatMatrix::from_i64(&[&[1, 1], &[1, 2]]);
        assert!(is_semisimple(&a0).unwrap().semisimple);
        let j = is_semisimple(&RatMatrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap();
        assert!(!j.semisimple);
        assert_eq!(j.min_poly, PolyZ::from_i64(&[1, -2, 1]).to_q());
        let b = RatMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]]);
        assert!(is_semisimple(&b).unwrap().semisimple);
    }

    #[test]
    fn blocks() {
        let a = RatMatrix::from_i64(&[&[1, 2, 0, 0], &[2, 3, 0, 0], &[0, 0, 1, 2], &[0, 0, 2, 3]]);
        let d = block_decompose(&a).unwrap();
        assert_eq!(d.blocks.len(), 2);
        for b in &d.blocks {
            assert_eq!(b.poly, PolyZ::from_i64(&[-1, -4, 1]));
            assert_eq!(char_poly(&b.matrix).unwrap(), b.poly.to_q());
            assert!(b.matrix.is_integral());
        }
        assert_eq!(d.reassemble(), a);
        let s = block_decompose(&RatMatrix::from_i64(&[&[1, 0], &[0, -1]])).unwrap();
        assert_eq!(s.blocks.len(), 2);
        assert!(block_decompose(&RatMatrix::from_i64(&[&[1, 1], &[0, 1]])).is_err());
    }
}
