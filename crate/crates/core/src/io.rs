//! JSON input formats for groups and overlattices.
//!
//! A group is `{"rank": n, "generators": [{"linear": [[int]], "translation": ["p/q", ...]}]}`.
//! An overlattice is `{"rank": n, "generators": [["p/q", ...]]}`; the lattice is
//! `Z^n` plus the span of the listed vectors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cohomology::Overlattice;
use crate::cryst::{AffineGenerator, CrystGroup};
use crate::error::{Error, Result};
use crate::linalg::{format_rational, parse_rational, IntMatrix, RatVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub linear: Vec<Vec<i64>>,
    pub translation: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub rank: usize,
    pub generators: Vec<GeneratorSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlatticeSpec {
    pub rank: usize,
    pub generators: Vec<Vec<String>>,
}

pub fn rat_strings(v: &RatVector) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

pub fn parse_vector(xs: &[String]) -> Result<RatVector> {
    Ok(RatVector(xs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<BigRational>>>()?))
}

pub fn matrix_i64(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.to_i64().expect("entry fits in i64")).collect())
        .collect()
}

impl GroupSpec {
    /// Canonical form: translations reduced into `[0, 1)`.
    pub fn from_group(c: &CrystGroup) -> GroupSpec {
        GroupSpec {
            rank: c.rank(),
            generators: c
                .generators()
                .iter()
                .map(|(l, t)| GeneratorSpec {
                    linear: matrix_i64(l),
                    translation: rat_strings(&t.reduce_mod_one()),
                })
                .collect(),
        }
    }

    pub fn affine_generators(&self) -> Result<Vec<AffineGenerator>> {
        let n = self.rank;
        if n == 0 {
            return Err(Error::ZeroRank);
        }
        self.generators
            .iter()
            .enumerate()
            .map(|(k, g)| {
                if g.linear.len() != n || g.linear.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch(format!("generator {k}: linear part must be {n}x{n}")));
                }
                if g.translation.len() != n {
                    return Err(Error::DimensionMismatch(format!("generator {k}: translation must have length {n}")));
                }
                let rows: Vec<Vec<BigInt>> = g.linear.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect();
                Ok((IntMatrix::try_from_rows(rows, n)?, parse_vector(&g.translation)?))
            })
            .collect()
    }

    pub fn to_group(&self) -> Result<CrystGroup> {
        CrystGroup::from_generators(self.rank, &self.affine_generators()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

impl OverlatticeSpec {
    pub fn from_overlattice(l: &Overlattice) -> OverlatticeSpec {
        let b = l.basis();
        OverlatticeSpec {
            rank: l.rank(),
            generators: (0..b.cols()).map(|j| rat_strings(&b.column(j))).collect(),
        }
    }

    pub fn to_overlattice(&self) -> Result<Overlattice> {
        let n = self.rank;
        if n == 0 {
            return Err(Error::ZeroRank);
        }
        let mut gens: Vec<RatVector> = (0..n)
            .map(|i| RatVector::from_integers(&(0..n).map(|j| BigInt::from(i64::from(i == j))).collect::<Vec<_>>()))
            .collect();
        for v in &self.generators {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!("overlattice vectors must have length {n}")));
            }
            gens.push(parse_vector(v)?);
        }
        Overlattice::from_generators(n, &gens)
    }
}

pub fn parse_group(json: &str) -> Result<CrystGroup> {
    parse_group_spec(json)?.to_group()
}

pub fn parse_group_spec(json: &str) -> Result<GroupSpec> {
    serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_overlattice(json: &str) -> Result<Overlattice> {
    let spec: OverlatticeSpec = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    spec.to_overlattice()
}
