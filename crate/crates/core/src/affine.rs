//! Integral affine atlases on the base and the facet normals they induce.
//!
//! A transition `from → to` means `ξ_to = A ξ_from + c`. Inward facet normals
//! are covectors, so they move by `u_to = A^{-T} u_from`.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{inverse_unimodular, LatticeError};
use crate::torus_data::{is_primitive, CechCocycle, CharacteristicData, TorusDataError};
use crate::validation::ValidationReport;
use crate::{IntegerMatrix, IntegerSublattice, IntegerVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("invalid affine atlas:\n{0}")]
    InvalidAtlas(ValidationReport),
    #[error("normal of facet `{facet}` is inconsistent in chart `{chart}`")]
    InconsistentPropagation { facet: String, chart: String },
    #[error("unimodularity fails at {0}")]
    UnimodularityFailure(String),
    #[error("facet `{facet}` has no normal in chart `{chart}`")]
    MissingNormal { facet: String, chart: String },
    #[error("atlas and cocycle are defined on different chart graphs: {0}")]
    GraphMismatch(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Torus(#[from] TorusDataError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineTransition {
    pub from: String,
    pub to: String,
    pub a: IntegerMatrix,
    pub c: Vec<BigRational>,
}

/// Inward normal `normal` of `facet`, written in `chart`; `charts` lists every
/// chart meeting the facet (empty means all charts).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetSeed {
    pub facet: String,
    pub chart: String,
    pub normal: IntegerVector,
    pub charts: Vec<String>,
}

/// A corner of the base seen in `chart`, where the listed facets meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineCorner {
    pub chart: String,
    pub facets: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineAtlas {
    pub n: usize,
    pub charts: Vec<String>,
    pub transitions: Vec<AffineTransition>,
    pub triangles: Vec<[String; 3]>,
    pub facet_seeds: Vec<FacetSeed>,
    pub corners: Vec<AffineCorner>,
}

type AffineMap = (IntegerMatrix, Vec<BigRational>);

fn rational(m: &IntegerMatrix, v: &[BigRational]) -> Vec<BigRational> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(v)
                .fold(BigRational::zero(), |acc, (a, x)| acc + BigRational::from_integer(a.clone()) * x)
        })
        .collect()
}

impl AffineAtlas {
    fn find(&self, a: &str, b: &str) -> Option<(usize, bool)> {
        self.transitions.iter().enumerate().find_map(|(i, t)| {
            if t.to == a && t.from == b {
                Some((i, false))
            } else if t.from == a && t.to == b {
                Some((i, true))
            } else {
                None
            }
        })
    }

    /// The map from `b`-coordinates to `a`-coordinates.
    fn map(&self, a: &str, b: &str) -> Result<Option<AffineMap>, LatticeError> {
        let Some((i, reversed)) = self.find(a, b) else {
            return Ok(None);
        };
        let t = &self.transitions[i];
        if !reversed {
            return Ok(Some((t.a.clone(), t.c.clone())));
        }
        let inv = inverse_unimodular(&t.a)?;
        let c = rational(&inv, &t.c).into_iter().map(|x| -x).collect();
        Ok(Some((inv, c)))
    }

    fn neighbours<'a>(&'a self, chart: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.transitions.iter().filter_map(move |t| {
            if t.from == chart {
                Some(t.to.as_str())
            } else if t.to == chart {
                Some(t.from.as_str())
            } else {
                None
            }
        })
    }
}

/// Transition matrices are in `GL_n(Z)` and both cocycle conditions hold on
/// every declared triangle.
pub fn validate_affine_atlas(atlas: &AffineAtlas) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let n = atlas.n;
    let known: HashSet<&str> = atlas.charts.iter().map(String::as_str).collect();
    let mut invertible = true;
    for t in &atlas.transitions {
        let subject = format!("{} -> {}", t.from, t.to);
        for c in [&t.from, &t.to] {
            if !known.contains(c.as_str()) {
                rep.push(&subject, format!("unknown chart `{c}`"));
            }
        }
        if t.a.shape() != (n, n) || t.c.len() != n {
            rep.push(&subject, format!("transition must be {n}x{n} with a length-{n} translation"));
            invertible = false;
            continue;
        }
        let det = t.a.determinant().expect("square");
        if !det.abs().is_one() {
            rep.push(&subject, format!("linear part is not invertible over Z (det {det})"));
            invertible = false;
        }
    }
    for s in &atlas.facet_seeds {
        for c in std::iter::once(&s.chart).chain(&s.charts) {
            if !known.contains(c.as_str()) {
                rep.push(&s.facet, format!("unknown chart `{c}`"));
            }
        }
        if s.normal.len() != n {
            rep.push(&s.facet, format!("normal must have length {n}"));
        }
    }
    if !invertible {
        return rep;
    }
    for [a, b, c] in &atlas.triangles {
        let subject = format!("triangle ({a}, {b}, {c})");
        let maps = (atlas.map(a, b), atlas.map(b, c), atlas.map(a, c));
        let (Ok(Some(ab)), Ok(Some(bc)), Ok(Some(ac))) = maps else {
            rep.push(&subject, "a side of the triangle has no transition");
            continue;
        };
        if &ab.0 * &bc.0 != ac.0 {
            rep.push(&subject, "linear parts violate the cocycle condition");
        }
        let composed: Vec<BigRational> = rational(&ab.0, &bc.1).into_iter().zip(&ab.1).map(|(x, y)| x + y).collect();
        if composed != ac.1 {
            rep.push(&subject, "translations violate the cocycle condition");
        }
    }
    rep
}

/// Facet normals in every chart meeting the facet.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InducedNormals {
    /// `(facet, chart) → u`.
    pub normals: BTreeMap<(String, String), IntegerVector>,
}

impl InducedNormals {
    pub fn get(&self, facet: &str, chart: &str) -> Option<&IntegerVector> {
        self.normals.get(&(facet.to_string(), chart.to_string()))
    }
}

/// Propagates every seed by `u_α = A_{αβ}^{-T} u_β` and checks unimodularity
/// at the declared corners.
pub fn induced_normals(atlas: &AffineAtlas) -> Result<InducedNormals, AffineError> {
    let rep = validate_affine_atlas(atlas);
    if !rep.is_valid() {
        return Err(AffineError::InvalidAtlas(rep));
    }
    let mut by_facet: BTreeMap<&str, Vec<&FacetSeed>> = BTreeMap::new();
    for s in &atlas.facet_seeds {
        by_facet.entry(s.facet.as_str()).or_default().push(s);
    }
    let mut out = InducedNormals::default();
    for (facet, seeds) in by_facet {
        let allowed: BTreeSet<&str> = seeds.iter().flat_map(|s| s.charts.iter().map(String::as_str)).collect();
        let allowed_all = seeds.iter().any(|s| s.charts.is_empty());
        let admits = |c: &str| allowed_all || allowed.contains(c);
        let mut found: BTreeMap<&str, IntegerVector> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for s in &seeds {
            if !is_primitive(&s.normal) {
                return Err(AffineError::UnimodularityFailure(format!("facet `{facet}` (normal not primitive)")));
            }
            if let Some(prev) = found.insert(s.chart.as_str(), s.normal.clone()) {
                if prev != s.normal {
                    return Err(AffineError::InconsistentPropagation {
                        facet: facet.to_string(),
                        chart: s.chart.clone(),
                    });
                }
            }
            queue.push_back(s.chart.as_str());
        }
        while let Some(beta) = queue.pop_front() {
            let u = found[beta].clone();
            for alpha in atlas.neighbours(beta) {
                if !admits(alpha) {
                    continue;
                }
                let (a, _) = atlas.map(alpha, beta)?.expect("neighbour has a transition");
                let moved = inverse_unimodular(&a)?.transpose().mul_vec(&u);
                match found.get(alpha) {
                    Some(existing) if *existing != moved => {
                        return Err(AffineError::InconsistentPropagation {
                            facet: facet.to_string(),
                            chart: alpha.to_string(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        found.insert(alpha, moved);
                        queue.push_back(alpha);
                    }
                }
            }
        }
        for (chart, u) in found {
            out.normals.insert((facet.to_string(), chart.to_string()), u);
        }
    }
    for corner in &atlas.corners {
        let mut vs = Vec::new();
        for f in &corner.facets {
            let u = out.get(f, &corner.chart).ok_or_else(|| AffineError::MissingNormal {
                facet: f.clone(),
                chart: corner.chart.clone(),
            })?;
            vs.push(u.clone());
        }
        let s = IntegerSublattice::from_vectors(atlas.n, &vs)?;
        if s.rank() != vs.len() || !s.is_direct_summand() {
            return Err(AffineError::UnimodularityFailure(format!(
                "corner in chart `{}` ({})",
                corner.chart,
                corner.facets.join(", ")
            )));
        }
    }
    Ok(out)
}

/// Linear gauge `G_α` with `G_root = I` and `G_child = G_parent · A_{parent,child}`
/// along a breadth-first tree: it takes `α`-coordinates to root coordinates.
fn root_gauge(atlas: &AffineAtlas) -> Result<BTreeMap<String, IntegerMatrix>, AffineError> {
    let mut gauge = BTreeMap::new();
    let Some(root) = atlas.charts.first() else {
        return Ok(gauge);
    };
    gauge.insert(root.clone(), IntegerMatrix::identity(atlas.n));
    let mut queue = VecDeque::from([root.as_str()]);
    while let Some(p) = queue.pop_front() {
        for c in atlas.neighbours(p) {
            if gauge.contains_key(c) {
                continue;
            }
            let (a, _) = atlas.map(p, c)?.expect("neighbour has a transition");
            let g = &gauge[p] * &a;
            gauge.insert(c.to_string(), g);
            queue.push_back(c);
        }
    }
    Ok(gauge)
}

/// Characteristic vectors of every facet in the frame of the first chart,
/// reached along a breadth-first spanning tree of the chart graph.
///
/// This matches base complexes whose cells all use that one frame, which is
/// the case when the holonomy is trivial.
pub fn characteristic_in_root_frame(atlas: &AffineAtlas, normals: &InducedNormals) -> Result<CharacteristicData, AffineError> {
    let gauge = root_gauge(atlas)?;
    let mut facet_vectors = BTreeMap::new();
    for ((facet, chart), u) in &normals.normals {
        if facet_vectors.contains_key(facet) {
            continue;
        }
        let Some(g) = gauge.get(chart) else {
            return Err(AffineError::GraphMismatch(format!("chart `{chart}` is not connected to the root")));
        };
        facet_vectors.insert(facet.clone(), inverse_unimodular(g)?.transpose().mul_vec(u));
    }
    Ok(CharacteristicData { facet_vectors })
}

/// `A_{αβ} = ρ_{αβ}^{-T}` on every edge of the shared chart graph.
///
/// Only the linear half of the compatibility is checked; the condition on the
/// Lagrangian sections has no finite presentation here.
pub fn compatibility_check(atlas: &AffineAtlas, rho: &CechCocycle) -> Result<bool, AffineError> {
    let charts = |v: &[String]| v.iter().cloned().collect::<BTreeSet<_>>();
    if charts(&atlas.charts) != charts(&rho.charts) {
        return Err(AffineError::GraphMismatch("chart sets differ".to_string()));
    }
    let pair = |a: &str, b: &str| if a < b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) };
    let atlas_edges: BTreeSet<_> = atlas.transitions.iter().map(|t| pair(&t.from, &t.to)).collect();
    let cocycle_edges: BTreeSet<_> = rho.edges.iter().map(|e| pair(&e.from, &e.to)).collect();
    if atlas_edges != cocycle_edges {
        return Err(AffineError::GraphMismatch("edge sets differ".to_string()));
    }
    for t in &atlas.transitions {
        let r = rho.value(&t.to, &t.from)?;
        if t.a != inverse_unimodular(&r)?.transpose() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rational translation vector from integers.
pub fn translation(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_data::CechEdge;
    use crate::{int_matrix, int_vector};

    fn two_charts(a: IntegerMatrix, seeds: Vec<FacetSeed>) -> AffineAtlas {
        AffineAtlas {
            n: 2,
            charts: vec!["alpha".into(), "beta".into()],
            transitions: vec![AffineTransition {
                from: "beta".into(),
                to: "alpha".into(),
                a,
                c: translation(&[0, 7]),
            }],
            triangles: vec![],
            facet_seeds: seeds,
            corners: vec![],
        }
    }

    fn seed(facet: &str, chart: &str, u: &[i64]) -> FacetSeed {
        FacetSeed {
            facet: facet.into(),
            chart: chart.into(),
            normal: int_vector(u),
            charts: vec![],
        }
    }

    #[test]
    fn rotation_transition_is_valid() {
        let atlas = two_charts(int_matrix(&[[0, 1], [-1, 0]]), vec![]);
        assert!(validate_affine_atlas(&atlas).is_valid());
        let single = AffineAtlas {
            n: 2,
            charts: vec!["only".into()],
            transitions: vec![],
            triangles: vec![],
            facet_seeds: vec![],
            corners: vec![],
        };
        assert!(validate_affine_atlas(&single).is_valid());
    }

    #[test]
    fn determinant_two_is_rejected() {
        let atlas = two_charts(int_matrix(&[[2, 0], [0, 1]]), vec![]);
        assert!(validate_affine_atlas(&atlas).mentions("not invertible"));
    }

    #[test]
    fn normals_move_by_inverse_transpose() {
        let atlas = two_charts(int_matrix(&[[0, 1], [-1, 0]]), vec![seed("F", "beta", &[1, 0])]);
        let normals = induced_normals(&atlas).unwrap();
        assert_eq!(normals.get("F", "alpha"), Some(&int_vector(&[0, -1])));
    }

    #[test]
    fn identity_transitions_keep_normals() {
        let atlas = two_charts(IntegerMatrix::identity(2), vec![seed("F", "beta", &[2, 1])]);
        let normals = induced_normals(&atlas).unwrap();
        assert_eq!(normals.get("F", "alpha"), Some(&int_vector(&[2, 1])));
    }

    #[test]
    fn conflicting_seeds_are_rejected() {
        let atlas = two_charts(
            IntegerMatrix::identity(2),
            vec![seed("F", "beta", &[1, 0]), seed("F", "alpha", &[0, 1])],
        );
        assert!(matches!(induced_normals(&atlas), Err(AffineError::InconsistentPropagation { .. })));
    }

    #[test]
    fn translation_cocycle_is_checked() {
        let id = IntegerMatrix::identity(1);
        let t = |from: &str, to: &str, c: i64| AffineTransition {
            from: from.into(),
            to: to.into(),
            a: id.clone(),
            c: translation(&[c]),
        };
        let mut atlas = AffineAtlas {
            n: 1,
            charts: vec!["a".into(), "b".into(), "c".into()],
            transitions: vec![t("b", "a", 1), t("c", "b", 2), t("c", "a", 3)],
            triangles: vec![["a".into(), "b".into(), "c".into()]],
            facet_seeds: vec![],
            corners: vec![],
        };
        assert!(validate_affine_atlas(&atlas).is_valid());
        atlas.transitions[2].c = translation(&[4]);
        assert!(validate_affine_atlas(&atlas).mentions("translations"));
    }

    fn edge_cocycle(rho: IntegerMatrix) -> CechCocycle {
        CechCocycle {
            n: 2,
            charts: vec!["alpha".into(), "beta".into()],
            edges: vec![CechEdge {
                from: "alpha".into(),
                to: "beta".into(),
                value: rho,
                symbol: None,
            }],
            triangles: vec![],
        }
    }

    #[test]
    fn compatibility_with_monodromy() {
        let rho = int_matrix(&[[1, 0], [-1, 1]]);
        let good = two_charts(int_matrix(&[[1, 1], [0, 1]]), vec![]);
        assert!(compatibility_check(&good, &edge_cocycle(rho.clone())).unwrap());
        let bad = two_charts(IntegerMatrix::identity(2), vec![]);
        assert!(!compatibility_check(&bad, &edge_cocycle(rho)).unwrap());
        let trivial = two_charts(IntegerMatrix::identity(2), vec![]);
        assert!(compatibility_check(&trivial, &edge_cocycle(IntegerMatrix::identity(2))).unwrap());
    }

    #[test]
    fn corner_unimodularity() {
        let mut atlas = two_charts(
            IntegerMatrix::identity(2),
            vec![seed("F", "alpha", &[1, 0]), seed("G", "alpha", &[1, 2])],
        );
        atlas.corners.push(AffineCorner {
            chart: "alpha".into(),
            facets: vec!["F".into(), "G".into()],
        });
        assert!(matches!(induced_normals(&atlas), Err(AffineError::UnimodularityFailure(_))));
        atlas.facet_seeds[1].normal = int_vector(&[1, 1]);
        assert!(induced_normals(&atlas).is_ok());
    }
}
