//! Built-in groups with expected analysis results.
//!
//! Each expectation records how it was obtained. The hyperelliptic entries
//! follow the usual recipe: the group translates the first elliptic factor
//! and acts linearly on the second.

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, AnalysisOptions, AnalysisReport};
use crate::cryst::CrystGroup;
use crate::error::Result;
use crate::io::{GeneratorSpec, GroupSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedReport {
    pub torsion_free: bool,
    pub even: bool,
    pub d: u64,
    pub extension_order: u64,
    pub hodge_types: usize,
    pub component_dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub group: GroupSpec,
    pub expected: ExpectedReport,
    /// How the expected values were derived.
    pub provenance: String,
}

impl CatalogEntry {
    pub fn build(&self) -> Result<CrystGroup> {
        self.group.to_group()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDiff {
    pub field: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryVerification {
    pub name: String,
    pub passed: bool,
    pub diffs: Vec<FieldDiff>,
    /// Set when the pipeline itself failed.
    pub error: Option<String>,
}

fn block(top: &[&[i64]], bottom: &[&[i64]]) -> Vec<Vec<i64>> {
    let a = top.len();
    let n = a + bottom.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i < a, j < a) {
                    (true, true) => top[i][j],
                    (false, false) => bottom[i - a][j - a],
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

fn gen(linear: Vec<Vec<i64>>, translation: &[&str]) -> GeneratorSpec {
    GeneratorSpec {
        linear,
        translation: translation.iter().map(|s| s.to_string()).collect(),
    }
}

const I2: &[&[i64]] = &[&[1, 0], &[0, 1]];

fn hyperelliptic(name: &str, order: u64, rotation: &[&[i64]], provenance: &str) -> CatalogEntry {
    let shift = format!("1/{order}");
    CatalogEntry {
        name: name.into(),
        description: format!("Z/{order} translating the first elliptic factor and rotating the second"),
        group: GroupSpec {
            rank: 4,
            generators: vec![gen(block(I2, rotation), &[&shift, "0", "0", "0"])],
        },
        expected: ExpectedReport {
            torsion_free: true,
            even: true,
            d: order,
            extension_order: order,
            hodge_types: if order == 2 { 1 } else { 2 },
            component_dims: if order == 2 { vec![2] } else { vec![1, 1] },
        },
        provenance: provenance.into(),
    }
}

fn trivial(rank: usize) -> CatalogEntry {
    let k = rank / 2;
    CatalogEntry {
        name: format!("trivial-rank-{rank}"),
        description: format!("trivial point group on Z^{rank}: a {k}-dimensional complex torus"),
        group: GroupSpec {
            rank,
            generators: Vec::new(),
        },
        expected: ExpectedReport {
            torsion_free: true,
            even: true,
            d: 1,
            extension_order: 1,
            hodge_types: 1,
            component_dims: vec![k * k],
        },
        provenance: format!(
            "only the trivial character, multiplicity {rank}: one type, dimension ({rank}/2)^2 = dim Gr({k}, {rank})"
        ),
    }
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    let mut v = vec![
        trivial(2),
        trivial(4),
        trivial(6),
        hyperelliptic(
            "Z2-hyperelliptic",
            2,
            &[&[-1, 0], &[0, -1]],
            "congruence: (L-I)x has zero first coordinate, never 1/2 mod 1, so torsion-free and no \
             coboundary clears the 1/2 (d = 2); traces (4, 0) give n = 2 for both real characters, \
             so one type of dimension 1 + 1",
        ),
        CatalogEntry {
            name: "Z2-linear".into(),
            description: "-I on Z^2 with zero translation: split, with a fixed point".into(),
            group: GroupSpec {
                rank: 2,
                generators: vec![gen(vec![vec![-1, 0], vec![0, -1]], &["0", "0"])],
            },
            expected: ExpectedReport {
                torsion_free: false,
                even: true,
                d: 1,
                extension_order: 1,
                hodge_types: 1,
                component_dims: vec![1],
            },
            provenance: "u = 0 so the origin is fixed and the extension splits; det(-2I) = 4 rules out \
                         eigenvalue 1; traces (2, -2) give n_sign = 2, one type of dimension 1"
                .into(),
        },
        hyperelliptic(
            "Z3-hyperelliptic",
            3,
            &[&[0, -1], &[1, -1]],
            "congruence on the fixed block gives torsion-free and d = 3; traces (4, 1, 1) give \
             n_triv = 2 and one conjugate pair with n = 1, so types ν ∈ {0, 1}, each of dimension 1",
        ),
        hyperelliptic(
            "Z4-hyperelliptic",
            4,
            &[&[0, -1], &[1, 0]],
            "invariant coordinate carries 1/4, giving d = 4 and torsion-freeness; traces \
             (4, 2, 0, 2) give n_triv = 2 and the pair ±i with n = 1: two types of dimension 1",
        ),
        hyperelliptic(
            "Z6-hyperelliptic",
            6,
            &[&[1, -1], &[1, 0]],
            "invariant coordinate carries 1/6, giving d = 6 and torsion-freeness; the rotation block \
             contributes exactly the primitive sixth-root pair with n = 1: two types of dimension 1",
        ),
        CatalogEntry {
            name: "S3-rank4".into(),
            description: "S3 acting diagonally on two copies of the A2 root lattice".into(),
            group: GroupSpec {
                rank: 4,
                generators: vec![
                    gen(block(&[&[0, -1], &[1, -1]], &[&[0, -1], &[1, -1]]), &["0", "0", "0", "0"]),
                    gen(block(&[&[0, 1], &[1, 0]], &[&[0, 1], &[1, 0]]), &["0", "0", "0", "0"]),
                ],
            },
            expected: ExpectedReport {
                torsion_free: false,
                even: true,
                d: 1,
                extension_order: 1,
                hodge_types: 1,
                component_dims: vec![1],
            },
            provenance: "zero translations fix the origin; traces (4, -2, 0) against the S3 table give \
                         n_std = 2 and nothing else, one type of dimension (2/2)^2"
                .into(),
        },
        CatalogEntry {
            name: "Q8-rank4".into(),
            description: "quaternion group acting on the Lipschitz quaternions by left multiplication".into(),
            group: GroupSpec {
                rank: 4,
                generators: vec![
                    gen(
                        vec![vec![0, -1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, -1], vec![0, 0, 1, 0]],
                        &["0", "0", "0", "0"],
                    ),
                    gen(
                        vec![vec![0, 0, -1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, -1, 0, 0]],
                        &["0", "0", "0", "0"],
                    ),
                ],
            },
            expected: ExpectedReport {
                torsion_free: false,
                even: true,
                d: 1,
                extension_order: 1,
                hodge_types: 1,
                component_dims: vec![1],
            },
            provenance: "-1 acts as -I, which has no eigenvalue 1; traces (4, -4, 0, 0, 0) give the \
                         2-dimensional character with n = 2, one type of dimension 1 (right \
                         multiplication by unit imaginary quaternions)"
                .into(),
        },
    ];
    v.sort_by(|a, b| a.name.cmp(&b.name));
    v
}

pub fn find_entry(name: &str) -> Option<CatalogEntry> {
    catalog_entries().into_iter().find(|e| e.name == name)
}

pub fn diff_report(expected: &ExpectedReport, r: &AnalysisReport) -> Vec<FieldDiff> {
    let mut diffs = Vec::new();
    let mut check = |field: &str, e: String, a: String| {
        if e != a {
            diffs.push(FieldDiff {
                field: field.into(),
                expected: e,
                actual: a,
            });
        }
    };
    check("torsion_free", expected.torsion_free.to_string(), r.torsion.torsion_free.to_string());
    check("even", expected.even.to_string(), r.evenness.even.to_string());
    check("d", expected.d.to_string(), r.minimal_denominator.d.to_string());
    check(
        "extension_order",
        expected.extension_order.to_string(),
        r.extension_class.order.to_string(),
    );
    check("hodge_types", expected.hodge_types.to_string(), r.hodge_type_count().to_string());
    check(
        "component_dims",
        format!("{:?}", expected.component_dims),
        format!("{:?}", r.component_dims()),
    );
    diffs
}

pub fn verify_entry(e: &CatalogEntry) -> EntryVerification {
    let result = e.build().and_then(|c| analyze(&c, AnalysisOptions::default()));
    match result {
        Ok(r) => {
            let diffs = diff_report(&e.expected, &r);
            EntryVerification {
                name: e.name.clone(),
                passed: diffs.is_empty(),
                diffs,
                error: None,
            }
        }
        Err(err) => EntryVerification {
            name: e.name.clone(),
            passed: false,
            diffs: Vec::new(),
            error: Some(err.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_are_consistent_and_sorted() {
        let entries = catalog_entries();
        assert!(entries.windows(2).all(|w| w[0].name < w[1].name));
        for e in &entries {
            assert_eq!(e.expected.d, e.expected.extension_order, "{}", e.name);
            assert_eq!(e.expected.hodge_types, e.expected.component_dims.len(), "{}", e.name);
        }
    }

    #[test]
    fn tampered_expectation_fails() {
        let mut e = find_entry("Z2-hyperelliptic").unwrap();
        assert!(verify_entry(&e).passed);
        e.expected.d = 1;
        let v = verify_entry(&e);
        assert!(!v.passed);
        assert_eq!(v.diffs.len(), 1);
        assert_eq!(v.diffs[0].field, "d");
        assert_eq!(v.diffs[0].expected, "1");
        assert_eq!(v.diffs[0].actual, "2");
    }

    #[test]
    fn every_entry_verifies() {
        for e in catalog_entries() {
            let v = verify_entry(&e);
            assert!(v.passed, "{}: {:?} {:?}", e.name, v.diffs, v.error);
            let c = e.build().unwrap();
            if e.expected.torsion_free {
                assert!(c.eigenvalue_one_filter().iter().all(|&(_, ok)| ok), "{}", e.name);
            }
        }
    }
}
