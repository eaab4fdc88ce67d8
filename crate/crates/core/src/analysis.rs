//! The full analysis pipeline and its serializable report.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cohomology::extension_class;
use crate::cryst::CrystGroup;
use crate::error::{Error, Result};
use crate::hodge::{
    component_dimensions, evenness, isotypical_decomposition, sample_complex_structure, ComplexStructureSample,
    HodgeType,
};
use crate::io::{matrix_i64, rat_strings, GroupSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Build and verify one complex structure per Hodge type.
    pub sample_structure: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: GroupSpec,
    pub validation: ValidationSection,
    pub point_group: PointGroupSection,
    pub torsion: TorsionSection,
    pub eigenvalue_one: Vec<EigenvalueOneEntry>,
    pub minimal_denominator: DenominatorSection,
    pub extension_class: ExtensionSection,
    pub isotypical: IsotypicalSection,
    pub evenness: EvennessSection,
    pub hodge: Option<HodgeSection>,
    pub samples: Option<Vec<SampleSection>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationSection {
    pub valid: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub representative: Vec<Vec<i64>>,
    pub size: usize,
    pub element_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointGroupSection {
    pub order: usize,
    pub exponent: usize,
    pub abelian: bool,
    pub classes: Vec<ClassEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub element: usize,
    pub linear: Vec<Vec<i64>>,
    pub fixed_point: Vec<String>,
    pub translation: Vec<String>,
    pub order: usize,
    pub orbit_sum: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionSection {
    pub torsion_free: bool,
    pub witnesses: Vec<WitnessEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvalueOneEntry {
    pub element: usize,
    pub has_eigenvalue_one: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenominatorSection {
    pub d: u64,
    pub shift: Vec<String>,
    /// One vector per group element, in `(1/d) Z^n`.
    pub realization: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionSection {
    pub order: u64,
    pub h2_invariant_factors: Vec<u64>,
    pub class_coords: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterEntry {
    pub index: usize,
    pub degree: usize,
    pub multiplicity: usize,
    pub real: bool,
    pub partner: usize,
    /// Values on the classes, written in powers of `z = exp(2πi/field_order)`.
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotypicalSection {
    pub field_order: usize,
    pub lattice_character: Vec<i64>,
    pub characters: Vec<CharacterEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvennessSection {
    pub even: bool,
    pub rank_even: bool,
    pub odd_real: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub character: usize,
    pub partner: Option<usize>,
    pub nu: usize,
    pub multiplicity: usize,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentEntry {
    pub nu: Vec<usize>,
    pub dimension: usize,
    pub conjugate_index: usize,
    pub factors: Vec<FactorEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeSection {
    pub hodge_types: usize,
    pub component_dims: Vec<usize>,
    pub components: Vec<ComponentEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSection {
    pub nu: Vec<usize>,
    pub recovered_nu: Vec<usize>,
    pub conjugate_nu: Vec<usize>,
    pub field_order: usize,
    pub j: Vec<Vec<String>>,
    /// Display only.
    pub j_float: Vec<Vec<f64>>,
    pub omega: Vec<Vec<String>>,
    pub orientation_sign: i8,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn hodge_type_count(&self) -> usize {
        self.hodge.as_ref().map_or(0, |h| h.hodge_types)
    }

    pub fn component_dims(&self) -> Vec<usize> {
        self.hodge.as_ref().map_or_else(Vec::new, |h| h.component_dims.clone())
    }
}

fn small(x: &BigInt) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::Internal(format!("{x} does not fit the report")))
}

pub fn analyze(c: &CrystGroup, options: AnalysisOptions) -> Result<AnalysisReport> {
    c.require_valid()?;
    let g = c.group();

    let point_group = PointGroupSection {
        order: g.order(),
        exponent: g.exponent(),
        abelian: g.is_abelian(),
        classes: g
            .conjugacy_classes()
            .iter()
            .map(|cl| ClassEntry {
                representative: matrix_i64(g.element(cl.representative)),
                size: cl.size(),
                element_order: g.element_order(cl.representative),
            })
            .collect(),
    };

    let t = c.torsion_status()?;
    let torsion = TorsionSection {
        torsion_free: t.is_torsion_free,
        witnesses: t
            .witnesses
            .iter()
            .map(|w| WitnessEntry {
                element: w.element,
                linear: matrix_i64(c.linear(w.element)),
                fixed_point: rat_strings(&w.x),
                translation: rat_strings(&w.translation),
                order: w.order,
                orbit_sum: rat_strings(&w.orbit_sum),
            })
            .collect(),
    };

    let eigenvalue_one = c
        .eigenvalue_one_filter()
        .into_iter()
        .map(|(element, has_eigenvalue_one)| EigenvalueOneEntry {
            element,
            has_eigenvalue_one,
        })
        .collect();

    let md = c.minimal_denominator()?;
    let ext = extension_class(c)?;
    let order = small(&ext.order)?;
    if order != md.d {
        return Err(Error::Internal(format!(
            "minimal denominator {} differs from extension class order {order}",
            md.d
        )));
    }
    let minimal_denominator = DenominatorSection {
        d: md.d,
        shift: rat_strings(&md.shift),
        realization: md.realization.iter().map(rat_strings).collect(),
    };
    let extension_class = ExtensionSection {
        order,
        h2_invariant_factors: ext.invariant_factors.iter().map(small).collect::<Result<_>>()?,
        class_coords: ext
            .class_coords
            .iter()
            .map(|x| x.to_i64().ok_or_else(|| Error::Internal("class coordinate overflow".into())))
            .collect::<Result<_>>()?,
    };

    let data = isotypical_decomposition(c)?;
    let table = &data.table;
    let isotypical = IsotypicalSection {
        field_order: table.field().order(),
        lattice_character: crate::hodge::lattice_character(c)
            .iter()
            .map(|x| x.to_i64().expect("trace fits"))
            .collect(),
        characters: data
            .characters
            .iter()
            .map(|ch| CharacterEntry {
                index: ch.index,
                degree: ch.degree,
                multiplicity: ch.multiplicity,
                real: ch.real,
                partner: ch.partner,
                values: table.values(ch.index).iter().map(|v| v.to_string()).collect(),
            })
            .collect(),
    };
    let ev = evenness(&data);
    let evenness_section = EvennessSection {
        even: ev.even,
        rank_even: ev.rank_even,
        odd_real: ev.odd_real.clone(),
    };

    let (hodge, samples) = if ev.even {
        let comps = component_dimensions(&data);
        let section = HodgeSection {
            hodge_types: comps.len(),
            component_dims: comps.iter().map(|r| r.dimension).collect(),
            components: comps
                .iter()
                .map(|r| ComponentEntry {
                    nu: r.hodge_type.nu.clone(),
                    dimension: r.dimension,
                    conjugate_index: r.conjugate_index,
                    factors: r
                        .factors
                        .iter()
                        .map(|f| FactorEntry {
                            character: f.character,
                            partner: f.partner,
                            nu: f.nu,
                            multiplicity: f.multiplicity,
                            dimension: f.dimension,
                        })
                        .collect(),
                })
                .collect(),
        };
        let samples = if options.sample_structure {
            Some(
                comps
                    .iter()
                    .map(|r| sample_complex_structure(c, &data, &r.hodge_type).map(|s| sample_section(&s)))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        (Some(section), samples)
    } else {
        (None, None)
    };

    Ok(AnalysisReport {
        input: GroupSpec::from_group(c),
        validation: ValidationSection {
            valid: true,
            violations: Vec::new(),
        },
        point_group,
        torsion,
        eigenvalue_one,
        minimal_denominator,
        extension_class,
        isotypical,
        evenness: evenness_section,
        hodge,
        samples,
    })
}

fn sample_section(s: &ComplexStructureSample) -> SampleSection {
    let show = |m: &Vec<Vec<crate::cyclotomic::Cyclo>>| -> Vec<Vec<String>> {
        m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    };
    let nu = |t: &HodgeType| t.nu.clone();
    SampleSection {
        nu: nu(&s.requested),
        recovered_nu: nu(&s.recovered),
        conjugate_nu: nu(&s.conjugate_type),
        field_order: s.field.order(),
        j: show(&s.j),
        j_float: s.j_float.clone(),
        omega: show(&s.omega),
        orientation_sign: s.orientation_sign,
    }
}

fn chi_name(i: usize) -> String {
    format!("χ{i}")
}

/// Human-readable rendering.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "rank {}, |G| = {}, exponent {}{}", r.input.rank, r.point_group.order, r.point_group.exponent,
        if r.point_group.abelian { ", abelian" } else { "" });
    let _ = writeln!(w, "valid: {}", r.validation.valid);
    let _ = writeln!(w, "torsion-free: {}", r.torsion.torsion_free);
    for t in &r.torsion.witnesses {
        let _ = writeln!(
            w,
            "  element {} of order {} fixes x = ({}), orbit sum ({})",
            t.element,
            t.order,
            t.fixed_point.join(", "),
            t.orbit_sum.join(", ")
        );
    }
    let missing: Vec<String> = r
        .eigenvalue_one
        .iter()
        .filter(|e| !e.has_eigenvalue_one)
        .map(|e| e.element.to_string())
        .collect();
    if !missing.is_empty() {
        let _ = writeln!(w, "no eigenvalue 1 for elements: {}", missing.join(", "));
    }
    let _ = writeln!(w, "minimal denominator d = {}, shift w = ({})", r.minimal_denominator.d,
        r.minimal_denominator.shift.join(", "));
    let _ = writeln!(
        w,
        "extension class: order {}, H^2(G, Z^n) = {}",
        r.extension_class.order,
        fga_name(&r.extension_class.h2_invariant_factors)
    );
    let _ = writeln!(w, "isotypical decomposition (z = exp(2πi/{})):", r.isotypical.field_order);
    let _ = writeln!(w, "  {:<6} {:>6} {:>6} {:>6}  values", "χ", "χ(1)", "n_χ", "real");
    for c in &r.isotypical.characters {
        let real = if c.real { "yes".to_string() } else { format!("~{}", chi_name(c.partner)) };
        let _ = writeln!(
            w,
            "  {:<6} {:>6} {:>6} {:>6}  [{}]",
            chi_name(c.index),
            c.degree,
            c.multiplicity,
            real,
            c.values.join(", ")
        );
    }
    let _ = write!(w, "even: {}", r.evenness.even);
    if !r.evenness.rank_even {
        let _ = write!(w, " (odd rank)");
    }
    if !r.evenness.odd_real.is_empty() {
        let names: Vec<String> = r.evenness.odd_real.iter().map(|&i| chi_name(i)).collect();
        let _ = write!(w, " (odd multiplicity: {})", names.join(", "));
    }
    let _ = writeln!(w);
    if let Some(h) = &r.hodge {
        let _ = writeln!(w, "Hodge types: {}", h.hodge_types);
        for (k, comp) in h.components.iter().enumerate() {
            let nus: Vec<String> = comp.nu.iter().enumerate().map(|(i, v)| format!("ν({})={v}", chi_name(i))).collect();
            let _ = writeln!(w, "  [{k}] {}  dim {}  conjugate [{}]", nus.join(" "), comp.dimension, comp.conjugate_index);
            for f in &comp.factors {
                match f.partner {
                    None => {
                        let _ = writeln!(
                            w,
                            "      {}: Gr({}, {}) ∩ open, dim {}",
                            chi_name(f.character),
                            f.nu,
                            f.multiplicity,
                            f.dimension
                        );
                    }
                    Some(p) => {
                        let _ = writeln!(
                            w,
                            "      {}/{}: Gr({}, {}) x Gr({}, {}), dim {}",
                            chi_name(f.character),
                            chi_name(p),
                            f.nu,
                            f.multiplicity,
                            f.multiplicity - f.nu,
                            f.multiplicity,
                            f.dimension
                        );
                    }
                }
            }
        }
    }
    if let Some(samples) = &r.samples {
        for (k, s) in samples.iter().enumerate() {
            let _ = writeln!(w, "sample [{k}] (orientation sign {:+}):", s.orientation_sign);
            for row in &s.j_float {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:>8.4}")).collect();
                let _ = writeln!(w, "  J ≈ [{}]", cells.join(" "));
            }
        }
    }
    out
}

fn fga_name(factors: &[u64]) -> String {
    if factors.is_empty() {
        return "0".into();
    }
    factors.iter().map(|f| format!("Z/{f}")).collect::<Vec<_>>().join(" + ")
}
