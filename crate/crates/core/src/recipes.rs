//! Declarative construction pipelines. A recipe is a JSON tree of steps whose
//! leaves name sources: `dataset:<id>`, `moebius:<q>`, `trivial_rds:<k>`,
//! `recipe:<name>` or a path to a certificate file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::{moebius_rds_with, trivial_rds};
use crate::constructions::{
    as_rdsqs, designate_hole, fill_c1dcqs, fill_gcdcqs, inflate_c1, inflate_fan, inflate_rds, quadruple_rsqs,
    ConstructOptions,
};
use crate::data::load_dataset;
use crate::error::{Error, Result};
use crate::model::{CertifiedDesign, ClaimedKind, Point};
use crate::serial::read_certificate;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub output_kind: ClaimedKind,
    #[serde(default)]
    pub expect: Expect,
    pub build: Input,
}

/// Checked against the output after the pipeline runs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default)]
    pub v: Option<u32>,
    #[serde(default)]
    pub blocks: Option<usize>,
    #[serde(default)]
    pub classes_per_point: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Input {
    Source(String),
    Step(Box<Step>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Step {
    AsRdsqs {
        input: Input,
    },
    DesignateHole {
        input: Input,
        hole: Vec<Point>,
    },
    FillGcdcqs {
        cqs: Input,
        filler_full: Input,
        filler_holed: Input,
    },
    FillC1dcqs {
        c1: Input,
        filler: Input,
    },
    InflateRds {
        rds: Input,
        ing: Input,
        #[serde(default)]
        rdgdd: Option<Input>,
    },
    InflateC1 {
        rds: Input,
        c1: Input,
        c2: Input,
        #[serde(default)]
        rdgdd: Option<Input>,
        #[serde(default)]
        eta: Option<Point>,
    },
    InflateFan {
        fg: Input,
        ings: BTreeMap<u32, Input>,
        fdgdds: BTreeMap<u32, Input>,
        #[serde(default)]
        weaken: bool,
    },
    QuadrupleRsqs {
        rsqs2: Input,
        ing: Input,
        #[serde(default)]
        rdtd: Option<Input>,
    },
}

const BUILTIN: [(&str, &str); 6] = [
    ("rdsqs10", include_str!("../recipes/rdsqs10.json")),
    ("rdsqs34", include_str!("../recipes/rdsqs34.json")),
    ("mcdsqs20", include_str!("../recipes/mcdsqs20.json")),
    ("mcdsqs26", include_str!("../recipes/mcdsqs26.json")),
    ("mcdsqs32", include_str!("../recipes/mcdsqs32.json")),
    ("mcdsqs164", include_str!("../recipes/mcdsqs164.json")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

pub fn builtin(name: &str) -> Result<Recipe> {
    let (_, text) = BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Precondition(format!("no built-in recipe `{name}`")))?;
    parse_recipe(text)
}

pub fn parse_recipe(text: &str) -> Result<Recipe> {
    Ok(serde_json::from_str(text)?)
}

/// A built-in recipe by name, or a recipe file.
pub fn load_recipe(name_or_path: &str) -> Result<(Recipe, PathBuf)> {
    if BUILTIN.iter().any(|(n, _)| *n == name_or_path) {
        return Ok((builtin(name_or_path)?, PathBuf::from(".")));
    }
    let path = Path::new(name_or_path);
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("recipe `{name_or_path}` is neither built in nor readable: {e}")))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    Ok((parse_recipe(&text)?, dir))
}

/// Runs a recipe; relative paths resolve against `base`.
pub fn run_recipe(recipe: &Recipe, base: &Path, opts: &ConstructOptions) -> Result<CertifiedDesign> {
    let out = Runner { base, opts, depth: 0 }.input(&recipe.build)?;
    if out.claimed_kind != recipe.output_kind {
        return Err(Error::Certification(format!(
            "recipe `{}` produced {}, expected {}",
            recipe.name, out.claimed_kind, recipe.output_kind
        )));
    }
    let e = &recipe.expect;
    let classes = out.derived_colorings.values().map(|c| c.classes.len()).max();
    let checks = [
        ("points", e.v.map(|v| v as usize), out.design.v as usize),
        ("blocks", e.blocks, out.design.blocks.len()),
        ("classes per point", e.classes_per_point, classes.unwrap_or(0)),
    ];
    for (what, want, got) in checks {
        if let Some(w) = want.filter(|&w| w != got) {
            return Err(Error::Certification(format!("recipe `{}`: {got} {what}, expected {w}", recipe.name)));
        }
    }
    Ok(out)
}

struct Runner<'a> {
    base: &'a Path,
    opts: &'a ConstructOptions,
    depth: usize,
}

impl Runner<'_> {
    fn input(&self, i: &Input) -> Result<CertifiedDesign> {
        match i {
            Input::Source(s) => self.source(s),
            Input::Step(step) => self.step(step),
        }
    }

    fn opt(&self, i: &Option<Input>) -> Result<Option<CertifiedDesign>> {
        i.as_ref().map(|x| self.input(x)).transpose()
    }

    fn source(&self, s: &str) -> Result<CertifiedDesign> {
        let num = |v: &str| v.parse::<u32>().map_err(|_| Error::Parse(format!("bad number in source `{s}`")));
        match s.split_once(':') {
            Some(("dataset", id)) => load_dataset(id),
            Some(("moebius", q)) => moebius_rds_with(num(q)?, self.opts.exec),
            Some(("trivial_rds", k)) => {
                let k = num(k)?;
                if k < 2 {
                    return Err(Error::Precondition(format!("trivial RDS needs k ≥ 2, got {k}")));
                }
                Ok(trivial_rds(k))
            }
            Some(("recipe", name)) => {
                if self.depth > 8 {
                    return Err(Error::Precondition(format!("recipe nesting too deep at `{name}`")));
                }
                let r = builtin(name)?;
                Runner { depth: self.depth + 1, ..*self }.input(&r.build)
            }
            _ => {
                let p = self.base.join(s);
                read_certificate(&p)
                    .map_err(|e| Error::Precondition(format!("cannot read ingredient {}: {e}", p.display())))
            }
        }
    }

    fn step(&self, step: &Step) -> Result<CertifiedDesign> {
        let o = self.opts;
        match step {
            Step::AsRdsqs { input } => as_rdsqs(&self.input(input)?, o),
            Step::DesignateHole { input, hole } => designate_hole(&self.input(input)?, hole, o),
            Step::FillGcdcqs { cqs, filler_full, filler_holed } => {
                fill_gcdcqs(&self.input(cqs)?, &self.input(filler_full)?, &self.input(filler_holed)?, o)
            }
            Step::FillC1dcqs { c1, filler } => fill_c1dcqs(&self.input(c1)?, &self.input(filler)?, o),
            Step::InflateRds { rds, ing, rdgdd } => {
                inflate_rds(&self.input(rds)?, &self.input(ing)?, self.opt(rdgdd)?.as_ref(), o)
            }
            Step::InflateC1 { rds, c1, c2, rdgdd, eta } => {
                let opts = ConstructOptions { eta: eta.or(o.eta), ..*o };
                inflate_c1(&self.input(rds)?, &self.input(c1)?, &self.input(c2)?, self.opt(rdgdd)?.as_ref(), &opts)
            }
            Step::InflateFan { fg, ings, fdgdds, weaken } => {
                let load = |m: &BTreeMap<u32, Input>| -> Result<BTreeMap<u32, CertifiedDesign>> {
                    m.iter().map(|(&k, i)| Ok((k, self.input(i)?))).collect()
                };
                let opts = ConstructOptions { weaken: *weaken || o.weaken, ..*o };
                inflate_fan(&self.input(fg)?, &load(ings)?, &load(fdgdds)?, &opts)
            }
            Step::QuadrupleRsqs { rsqs2, ing, rdtd } => {
                quadruple_rsqs(&self.input(rsqs2)?, &self.input(ing)?, self.opt(rdtd)?.as_ref(), o)
            }
        }
    }
}
