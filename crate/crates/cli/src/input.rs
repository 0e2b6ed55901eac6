//! The JSON input document and its resolution into library types.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use loctorus::affine::{AffineAtlas, AffineCorner, AffineTransition, FacetSeed};
use loctorus::base_complex::{
    build_surface_base, BaseComplex, BoundaryComponent, Cell, Facet, IncidenceRecord, Word,
};
use loctorus::four_manifold::{BoundaryContribution, BoundaryFacetData, NecklaceFacet, SingleCornerData, TrinionPair};
use loctorus::torus_data::{CechCocycle, CechEdge, CharacteristicData, MonodromyData};
use loctorus::{IntegerMatrix, IntegerVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("{field}: unknown id `{id}`")]
    Dangling { field: String, id: String },
    #[error("no bundled fixture named `{0}`")]
    UnknownFixture(String),
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Field {
        field: field.into(),
        message: message.into(),
    }
}

pub type MatrixRows = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub base: BaseSpec,
    #[serde(default)]
    pub monodromy: BTreeMap<String, MatrixRows>,
    #[serde(default)]
    pub characteristic: BTreeMap<String, Vec<i64>>,
    pub section_exists: bool,
    #[serde(default)]
    pub oriented: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<SignatureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseSpec {
    /// Generated decomposition of a surface; see `build_surface_base`.
    Surface { genus: usize, boundary: Vec<usize> },
    Complex(ComplexSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub n: usize,
    pub cells: Vec<CellSpec>,
    #[serde(default)]
    pub incidences: Vec<IncidenceSpec>,
    #[serde(default)]
    pub generators: Vec<String>,
    #[serde(default)]
    pub relators: Vec<Vec<String>>,
    #[serde(default)]
    pub facets: Vec<FacetSpec>,
    #[serde(default)]
    pub boundary_components: Vec<ComponentSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub id: String,
    pub dim: usize,
    pub stratum: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidenceSpec {
    pub coface: String,
    pub face: String,
    pub coefficient: i64,
    #[serde(default)]
    pub transport: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetSpec {
    pub id: String,
    pub cells: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub facets: Vec<String>,
    #[serde(default)]
    pub corners: Vec<String>,
}

/// A matrix given by its rows, or a word evaluated through the monodromy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixOrWord {
    Matrix(MatrixRows),
    Word(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrinionSpec {
    Pairs(Vec<PairSpec>),
    /// Only `"auto"` is accepted.
    Keyword(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub c1: MatrixOrWord,
    pub c2: MatrixOrWord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureSpec {
    pub trinions: TrinionSpec,
    #[serde(default)]
    pub boundary: Vec<BoundarySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySpec {
    Necklace(Vec<NecklaceFacetSpec>),
    Corner(CornerSpec),
    Smooth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NecklaceFacetSpec {
    pub prev: [i64; 2],
    pub v: [i64; 2],
    pub next: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CornerSpec {
    pub v: [i64; 2],
    pub other: [i64; 2],
    pub monodromy: MatrixOrWord,
}

/// An integer or a decimal fraction string such as `"7/2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalSpec {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    pub charts: Vec<String>,
    #[serde(default)]
    pub transitions: Vec<TransitionSpec>,
    #[serde(default)]
    pub triangles: Vec<[String; 3]>,
    #[serde(default)]
    pub facet_seeds: Vec<SeedSpec>,
    #[serde(default)]
    pub corners: Vec<ChartCornerSpec>,
    /// Edgewise torus holonomy `rho` to compare against, keyed like the transitions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<Vec<EdgeSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: String,
    pub to: String,
    pub a: MatrixRows,
    pub c: Vec<RationalSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    pub facet: String,
    pub chart: String,
    pub normal: Vec<i64>,
    #[serde(default)]
    pub charts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartCornerSpec {
    pub chart: String,
    pub facets: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub value: MatrixRows,
}

pub fn parse_input(text: &str) -> Result<InputDocument, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_input(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Canonical serialization, used for round trips.
pub fn serialize_input(doc: &InputDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents always serialize")
}

/// Signature inputs with every word evaluated.
#[derive(Clone, Debug)]
pub struct ResolvedSignature {
    pub pairs: TrinionSource,
    pub boundary: Vec<BoundaryContribution>,
}

#[derive(Clone, Debug)]
pub enum TrinionSource {
    Auto { genus: usize },
    Pairs(Vec<TrinionPair>),
}

#[derive(Clone, Debug)]
pub struct ResolvedAffine {
    pub atlas: AffineAtlas,
    pub holonomy: Option<CechCocycle>,
}

/// A document whose ids all resolve, converted to library types.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub base: BaseComplex,
    pub genus: Option<usize>,
    pub monodromy: MonodromyData,
    pub characteristic: CharacteristicData,
    pub section_exists: bool,
    pub oriented: bool,
    pub signature: Option<ResolvedSignature>,
    pub affine: Option<ResolvedAffine>,
}

fn matrix(field: &str, rows: &MatrixRows) -> Result<IntegerMatrix, InputError> {
    let big = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    IntegerMatrix::from_rows(big).map_err(|e| field_error(field, e.to_string()))
}

fn vector(v: &[i64]) -> IntegerVector {
    loctorus::int_vector(v)
}

fn word(field: &str, letters: &[String], generators: &BTreeSet<&str>) -> Result<Word, InputError> {
    let w = Word::parse(letters).map_err(|e| field_error(field, e.to_string()))?;
    for l in w.letters() {
        if !generators.contains(l.symbol.as_str()) {
            return Err(InputError::Dangling {
                field: field.to_string(),
                id: l.symbol.clone(),
            });
        }
    }
    Ok(w)
}

fn require<'a>(field: &str, id: &'a str, known: &BTreeSet<&str>) -> Result<&'a str, InputError> {
    if known.contains(id) {
        Ok(id)
    } else {
        Err(InputError::Dangling {
            field: field.to_string(),
            id: id.to_string(),
        })
    }
}

fn complex(spec: &ComplexSpec, oriented: bool) -> Result<BaseComplex, InputError> {
    let cells: BTreeSet<&str> = spec.cells.iter().map(|c| c.id.as_str()).collect();
    let generators: BTreeSet<&str> = spec.generators.iter().map(String::as_str).collect();
    let facet_ids: BTreeSet<&str> = spec.facets.iter().map(|f| f.id.as_str()).collect();
    let mut incidences = Vec::new();
    for (i, inc) in spec.incidences.iter().enumerate() {
        let field = format!("base.complex.incidences[{i}]");
        require(&field, &inc.coface, &cells)?;
        require(&field, &inc.face, &cells)?;
        let t = word(&field, &inc.transport, &generators)?;
        incidences.push(IncidenceRecord::new(&inc.coface, &inc.face, inc.coefficient, t));
    }
    let relators = spec
        .relators
        .iter()
        .enumerate()
        .map(|(i, r)| word(&format!("base.complex.relators[{i}]"), r, &generators))
        .collect::<Result<Vec<_>, _>>()?;
    let mut facets = Vec::new();
    for f in &spec.facets {
        for c in &f.cells {
            require(&format!("base.complex.facets.{}", f.id), c, &cells)?;
        }
        facets.push(Facet {
            id: f.id.clone(),
            cells: f.cells.clone(),
        });
    }
    let mut components = Vec::new();
    for (i, comp) in spec.boundary_components.iter().enumerate() {
        let field = format!("base.complex.boundary_components[{i}]");
        for f in &comp.facets {
            require(&field, f, &facet_ids)?;
        }
        for c in &comp.corners {
            require(&field, c, &cells)?;
        }
        components.push(BoundaryComponent {
            facets: comp.facets.clone(),
            corners: comp.corners.clone(),
        });
    }
    Ok(BaseComplex {
        n: spec.n,
        cells: spec
            .cells
            .iter()
            .map(|c| Cell {
                label: c.label.clone(),
                ..Cell::new(&c.id, c.dim, c.stratum)
            })
            .collect(),
        incidences,
        generator_symbols: spec.generators.clone(),
        relators,
        facets,
        boundary_components: components,
        oriented,
    })
}

fn rational(field: &str, r: &RationalSpec) -> Result<BigRational, InputError> {
    match r {
        RationalSpec::Int(x) => Ok(BigRational::from_integer(BigInt::from(*x))),
        RationalSpec::Text(s) => s
            .trim()
            .parse::<BigRational>()
            .map_err(|_| field_error(field, format!("`{s}` is not a rational number"))),
    }
}

fn affine(spec: &AffineSpec, n: usize) -> Result<ResolvedAffine, InputError> {
    let charts: BTreeSet<&str> = spec.charts.iter().map(String::as_str).collect();
    let mut transitions = Vec::new();
    for (i, t) in spec.transitions.iter().enumerate() {
        let field = format!("affine.transitions[{i}]");
        require(&field, &t.from, &charts)?;
        require(&field, &t.to, &charts)?;
        transitions.push(AffineTransition {
            from: t.from.clone(),
            to: t.to.clone(),
            a: matrix(&field, &t.a)?,
            c: t.c.iter().map(|r| rational(&field, r)).collect::<Result<_, _>>()?,
        });
    }
    for (i, tri) in spec.triangles.iter().enumerate() {
        for c in tri {
            require(&format!("affine.triangles[{i}]"), c, &charts)?;
        }
    }
    let mut seeds = Vec::new();
    for (i, s) in spec.facet_seeds.iter().enumerate() {
        let field = format!("affine.facet_seeds[{i}]");
        require(&field, &s.chart, &charts)?;
        for c in &s.charts {
            require(&field, c, &charts)?;
        }
        seeds.push(FacetSeed {
            facet: s.facet.clone(),
            chart: s.chart.clone(),
            normal: vector(&s.normal),
            charts: s.charts.clone(),
        });
    }
    let mut corners = Vec::new();
    for (i, c) in spec.corners.iter().enumerate() {
        require(&format!("affine.corners[{i}]"), &c.chart, &charts)?;
        corners.push(AffineCorner {
            chart: c.chart.clone(),
            facets: c.facets.clone(),
        });
    }
    let holonomy = match &spec.holonomy {
        None => None,
        Some(edges) => {
            let mut out = Vec::new();
            for (i, e) in edges.iter().enumerate() {
                let field = format!("affine.holonomy[{i}]");
                require(&field, &e.from, &charts)?;
                require(&field, &e.to, &charts)?;
                out.push(CechEdge {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    value: matrix(&field, &e.value)?,
                    symbol: None,
                });
            }
            Some(CechCocycle {
                n,
                charts: spec.charts.clone(),
                edges: out,
                triangles: spec.triangles.clone(),
            })
        }
    };
    Ok(ResolvedAffine {
        atlas: AffineAtlas {
            n,
            charts: spec.charts.clone(),
            transitions,
            triangles: spec.triangles.clone(),
            facet_seeds: seeds,
            corners,
        },
        holonomy,
    })
}

impl InputDocument {
    /// Checks that every referenced id exists and converts to library types.
    /// Mathematical validity is left to the pipelines.
    pub fn resolve(&self) -> Result<Resolved, InputError> {
        let (base, genus) = match &self.base {
            BaseSpec::Surface { genus, boundary } => {
                let mut b = build_surface_base(*genus, boundary);
                b.oriented = self.oriented;
                (b, Some(*genus))
            }
            BaseSpec::Complex(spec) => {
                let b = complex(spec, self.oriented)?;
                let chi = b.cellular_euler_characteristic();
                let holes = b.boundary_components.len() as i64;
                let twice = 2 - holes - chi;
                let genus = (b.n == 2 && twice >= 0 && twice % 2 == 0).then_some((twice / 2) as usize);
                (b, genus)
            }
        };
        let generators: BTreeSet<&str> = base.generator_symbols.iter().map(String::as_str).collect();
        let mut images = BTreeMap::new();
        for (g, rows) in &self.monodromy {
            require("monodromy", g, &generators)?;
            images.insert(g.clone(), matrix(&format!("monodromy.{g}"), rows)?);
        }
        if let Some(g) = generators.iter().find(|g| !images.contains_key(**g)) {
            return Err(field_error("monodromy", format!("generator `{g}` has no image")));
        }
        let monodromy = MonodromyData {
            n: base.n,
            images,
            relations: Vec::new(),
        };

        let facets: BTreeSet<&str> = base.facets.iter().map(|f| f.id.as_str()).collect();
        let mut facet_vectors = BTreeMap::new();
        for (f, v) in &self.characteristic {
            require("characteristic", f, &facets)?;
            facet_vectors.insert(f.clone(), vector(v));
        }

        let eval = |field: &str, m: &MatrixOrWord| -> Result<IntegerMatrix, InputError> {
            match m {
                MatrixOrWord::Matrix(rows) if !rows.is_empty() => matrix(field, rows),
                MatrixOrWord::Matrix(_) => Ok(IntegerMatrix::identity(base.n)),
                MatrixOrWord::Word(letters) => {
                    let w = word(field, letters, &generators)?;
                    monodromy.evaluate(&w).map_err(|e| field_error(field, e.to_string()))
                }
            }
        };
        let signature = match &self.signature {
            None => None,
            Some(spec) => {
                let pairs = match &spec.trinions {
                    TrinionSpec::Keyword(k) if k == "auto" => TrinionSource::Auto {
                        genus: genus.ok_or_else(|| {
                            field_error("signature.trinions", "cannot infer the genus of this base")
                        })?,
                    },
                    TrinionSpec::Keyword(k) => {
                        return Err(field_error("signature.trinions", format!("expected \"auto\" or a list, got `{k}`")))
                    }
                    TrinionSpec::Pairs(ps) => TrinionSource::Pairs(
                        ps.iter()
                            .enumerate()
                            .map(|(i, p)| {
                                let field = format!("signature.trinions[{i}]");
                                Ok(TrinionPair {
                                    c1: eval(&field, &p.c1)?,
                                    c2: eval(&field, &p.c2)?,
                                })
                            })
                            .collect::<Result<_, InputError>>()?,
                    ),
                };
                let mut boundary = Vec::new();
                for (i, b) in spec.boundary.iter().enumerate() {
                    let field = format!("signature.boundary[{i}]");
                    boundary.push(match b {
                        BoundarySpec::Smooth => BoundaryContribution::Smooth,
                        BoundarySpec::Necklace(fs) => BoundaryContribution::Necklace(BoundaryFacetData {
                            facets: fs.iter().map(|f| NecklaceFacet::from_i64(f.prev, f.v, f.next)).collect(),
                        }),
                        BoundarySpec::Corner(c) => BoundaryContribution::Corner(SingleCornerData {
                            v: vector(&c.v),
                            other: vector(&c.other),
                            monodromy: eval(&field, &c.monodromy)?,
                        }),
                    });
                }
                Some(ResolvedSignature { pairs, boundary })
            }
        };

        let affine = self.affine.as_ref().map(|a| affine(a, base.n)).transpose()?;
        Ok(Resolved {
            base,
            genus,
            monodromy,
            characteristic: CharacteristicData { facet_vectors },
            section_exists: self.section_exists,
            oriented: self.oriented,
            signature,
            affine,
        })
    }
}
