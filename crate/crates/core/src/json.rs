//! Exact numbers on the wire: integers and rationals travel as decimal
//! strings (`"-3"`, `"3/5"`); plain JSON integers are accepted on input.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{parse_rat, Matrix, PolyZ, Rat, RatMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    pub fn to_rat(&self) -> Result<Rat> {
        match self {
            Num::Int(i) => Ok(Rat::from_integer(BigInt::from(*i))),
            Num::Text(s) => parse_rat(s).ok_or_else(|| Error::Parse(format!("`{s}` is not a rational number"))),
        }
    }

    pub fn to_int(&self) -> Result<BigInt> {
        let r = self.to_rat()?;
        if !r.denom().is_one() {
            return Err(Error::InvalidInput(format!("`{r}` is not an integer")));
        }
        Ok(r.to_integer())
    }

    pub fn from_rat(r: &Rat) -> Num {
        Num::Text(r.to_string())
    }
}

pub fn rats(v: &[Num]) -> Result<Vec<Rat>> {
    v.iter().map(Num::to_rat).collect()
}

pub fn nums(v: &[Rat]) -> Vec<Num> {
    v.iter().map(Num::from_rat).collect()
}

pub fn matrix(rows: &[Vec<Num>]) -> Result<RatMatrix> {
    let rows: Vec<Vec<Rat>> = rows.iter().map(|r| rats(r)).collect::<Result<_>>()?;
    Matrix::try_from_rows(rows)
}

pub fn matrix_json(m: &RatMatrix) -> Vec<Vec<Num>> {
    m.row_vecs().iter().map(|r| nums(r)).collect()
}

pub fn poly(coeffs: &[Num]) -> Result<PolyZ> {
    Ok(PolyZ::new(coeffs.iter().map(Num::to_int).collect::<Result<_>>()?))
}

pub fn poly_json(p: &PolyZ) -> Vec<Num> {
    p.coeffs().iter().map(|c| Num::Text(c.to_string())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;

    #[test]
    fn round_trip() {
        let v: Vec<Num> = serde_json::from_str(r#"[1, "-2", "3/5"]"#).unwrap();
        assert_eq!(rats(&v).unwrap()[2], ratio(3, 5));
        let m = RatMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        assert_eq!(matrix(&matrix_json(&m)).unwrap(), m);
        assert!(Num::Text("1/2".into()).to_int().is_err());
        assert!(Num::Text("x".into()).to_rat().is_err());
    }
}
