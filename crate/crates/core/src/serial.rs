//! Canonical JSON form of certificates: fixed field order, blocks sorted,
//! class order preserved, colourings indexing the sorted block list.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Perm;
use crate::model::{Block, CertifiedDesign, ClaimedKind, ColorClass, Coloring, DesignInstance, Point, Structure};
use crate::verify::VerifyReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    schema_version: u32,
    kind: ClaimedKind,
    structure: Structure,
    v: u32,
    t: u32,
    block_sizes: Vec<u32>,
    #[serde(default)]
    stem: Option<Vec<Point>>,
    #[serde(default)]
    groups: Option<Vec<Vec<Point>>>,
    #[serde(default)]
    hole: Option<Vec<Point>>,
    #[serde(default)]
    labels: BTreeMap<String, Point>,
    blocks: Vec<Block>,
    #[serde(default)]
    colorings: BTreeMap<Point, Coloring>,
    #[serde(default)]
    resolution: Option<Coloring>,
    #[serde(default)]
    special_group: Option<u32>,
    #[serde(default)]
    generators: Vec<Perm>,
    #[serde(default)]
    families: Vec<Vec<u32>>,
    #[serde(default)]
    provenance: String,
    #[serde(default)]
    report: Option<VerifyReport>,
}

/// Sorts points within blocks and blocks lexicographically, rewriting every
/// block reference. Repeated blocks are kept so verification still sees them.
pub fn canonical_form(cert: &CertifiedDesign) -> CertifiedDesign {
    let mut out = cert.clone();
    let d = &mut out.design;
    for b in &mut d.blocks {
        b.sort_unstable();
    }
    let mut order: Vec<usize> = (0..d.blocks.len()).collect();
    order.sort_by(|&a, &b| d.blocks[a].cmp(&d.blocks[b]));
    let mut new_index = vec![0u32; order.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new as u32;
    }
    d.blocks = order.iter().map(|&i| d.blocks[i].clone()).collect();
    for s in [&mut d.stem, &mut d.hole].into_iter().flatten() {
        s.sort_unstable();
    }
    for g in d.groups.iter_mut().flatten() {
        g.sort_unstable();
    }
    let remap = |idx: &mut Vec<u32>| {
        for i in idx.iter_mut() {
            if let Some(&n) = new_index.get(*i as usize) {
                *i = n;
            }
        }
        idx.sort_unstable();
    };
    let remap_coloring = |c: &mut Coloring| {
        for ColorClass { blocks, .. } in &mut c.classes {
            remap(blocks);
        }
    };
    out.derived_colorings.values_mut().for_each(remap_coloring);
    out.resolution.iter_mut().for_each(remap_coloring);
    out.families.iter_mut().for_each(remap);
    out
}

pub fn to_json(cert: &CertifiedDesign) -> Result<String> {
    let c = canonical_form(cert);
    let d = c.design;
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        kind: c.claimed_kind,
        structure: d.kind,
        v: d.v,
        t: d.t,
        block_sizes: d.block_sizes,
        stem: d.stem,
        groups: d.groups,
        hole: d.hole,
        labels: d.labels,
        blocks: d.blocks,
        colorings: c.derived_colorings,
        resolution: c.resolution,
        special_group: c.special_group,
        generators: c.generators,
        families: c.families,
        provenance: c.provenance,
        report: c.report,
    };
    let mut s = serde_json::to_string(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<CertifiedDesign> {
    let doc: Document = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "schema version {} is not supported (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    let design = DesignInstance {
        v: doc.v,
        t: doc.t,
        block_sizes: doc.block_sizes,
        kind: doc.structure,
        stem: doc.stem,
        groups: doc.groups,
        hole: doc.hole,
        blocks: doc.blocks,
        labels: doc.labels,
    };
    let mut cert = CertifiedDesign::new(design, doc.kind);
    cert.derived_colorings = doc.colorings;
    cert.resolution = doc.resolution;
    cert.special_group = doc.special_group;
    cert.generators = doc.generators;
    cert.families = doc.families;
    cert.provenance = doc.provenance;
    cert.report = doc.report;
    Ok(cert)
}

pub fn read_certificate(path: &Path) -> Result<CertifiedDesign> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_certificate(path: &Path, cert: &CertifiedDesign) -> Result<()> {
    std::fs::write(path, to_json(cert)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClassScope, Ground};

    fn sample() -> CertifiedDesign {
        let d = DesignInstance::steiner(5, 3, 4, vec![vec![3, 2, 1, 0], vec![0, 1, 2, 4]]);
        let mut c = CertifiedDesign::new(d, ClaimedKind::SQS);
        c.derived_colorings.insert(
            0,
            Coloring {
                classes: vec![ColorClass { blocks: vec![0, 1], scope: ClassScope::ppc(Ground::minus_point(0)) }],
            },
        );
        c.families = vec![vec![0]];
        c
    }

    #[test]
    fn canonical_sorting_rewrites_references() {
        let c = canonical_form(&sample());
        assert_eq!(c.design.blocks, vec![vec![0, 1, 2, 3], vec![0, 1, 2, 4]]);
        assert_eq!(c.families, vec![vec![0]]);
        let c = canonical_form(&c);
        assert_eq!(canonical_form(&c), c);
    }

    #[test]
    fn round_trip_is_exact() {
        let c = canonical_form(&sample());
        let text = to_json(&c).unwrap();
        assert_eq!(from_json(&text).unwrap(), c);
        assert_eq!(to_json(&from_json(&text).unwrap()).unwrap(), text);
    }

    #[test]
    fn rejects_other_versions() {
        let text = to_json(&sample()).unwrap().replace("\"schema_version\":1", "\"schema_version\":9");
        assert!(matches!(from_json(&text), Err(Error::Parse(_))));
    }
}
