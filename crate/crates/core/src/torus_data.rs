//! Monodromy and characteristic data of a local torus action.
//!
//! Conventions. `ρ(w)` for a transport word `w` is the product of the
//! generator images read left to right; it maps lattice vectors written in
//! the frame of an incidence's face to the frame of its coface. Cochains of
//! the fiber cohomology move the other way round, by `ρ(w)^{-T}`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::base_complex::{BaseComplex, Letter, Word};
use crate::lattice::{inverse_unimodular, LatticeError};
use crate::validation::ValidationReport;
use crate::{IntegerMatrix, IntegerSublattice, IntegerVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusDataError {
    #[error("generator `{0}` has no monodromy image")]
    UnknownGenerator(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("charts `{0}` and `{1}` share no edge")]
    MissingEdge(String, String),
    #[error("chart graph is not connected: `{0}` is unreachable")]
    DisconnectedChartGraph(String),
    #[error("edge list is not a spanning tree of the chart graph")]
    NotASpanningTree,
    #[error("cocycle condition fails on triangle ({0}, {1}, {2})")]
    CocycleViolation(String, String, String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Holonomy representation of the base's fundamental group into `GL_n(Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyData {
    pub n: usize,
    pub images: BTreeMap<String, IntegerMatrix>,
    /// Words required to evaluate to the identity.
    pub relations: Vec<Word>,
}

impl MonodromyData {
    /// Every listed generator acts trivially.
    pub fn trivial<S: AsRef<str>>(n: usize, symbols: &[S]) -> Self {
        MonodromyData {
            n,
            images: symbols
                .iter()
                .map(|s| (s.as_ref().to_string(), IntegerMatrix::identity(n)))
                .collect(),
            relations: Vec::new(),
        }
    }

    pub fn image(&self, letter: &Letter) -> Result<IntegerMatrix, TorusDataError> {
        let g = self
            .images
            .get(&letter.symbol)
            .ok_or_else(|| TorusDataError::UnknownGenerator(letter.symbol.clone()))?;
        if letter.inverse {
            Ok(inverse_unimodular(g)?)
        } else {
            Ok(g.clone())
        }
    }

    /// `ρ(w)`: product of letter images, left to right.
    pub fn evaluate(&self, w: &Word) -> Result<IntegerMatrix, TorusDataError> {
        let mut acc = IntegerMatrix::identity(self.n);
        for l in w.letters() {
            acc = &acc * &self.image(l)?;
        }
        Ok(acc)
    }

    /// `ρ(w)^{-T}`, the action on degree-one fiber cohomology.
    pub fn cochain_transport(&self, w: &Word) -> Result<IntegerMatrix, TorusDataError> {
        Ok(inverse_unimodular(&self.evaluate(w)?)?.transpose())
    }

    /// Conjugate every image by `g`: `ρ ↦ g ρ g^{-1}`, a global change of frame.
    pub fn conjugated(&self, g: &IntegerMatrix) -> Result<Self, TorusDataError> {
        let g_inv = inverse_unimodular(g)?;
        Ok(MonodromyData {
            n: self.n,
            images: self
                .images
                .iter()
                .map(|(k, v)| (k.clone(), &(g * v) * &g_inv))
                .collect(),
            relations: self.relations.clone(),
        })
    }

    /// Images lie in `GL_n(Z)` and every declared relation holds.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::new();
        for (s, g) in &self.images {
            if g.shape() != (self.n, self.n) {
                rep.push(s, format!("image has shape {:?}, expected {}x{}", g.shape(), self.n, self.n));
                continue;
            }
            let det = g.determinant().expect("square");
            if det.abs() != BigInt::one() {
                rep.push(s, format!("image has determinant {det}, not ±1"));
            }
        }
        if rep.is_valid() {
            for w in &self.relations {
                check_relation(self, w, &mut rep);
            }
        }
        rep
    }
}

fn check_relation(m: &MonodromyData, w: &Word, rep: &mut ValidationReport) {
    match m.evaluate(w) {
        Ok(g) if g.is_identity() => {}
        Ok(g) => rep.push(format!("relation {w}"), format!("evaluates to {g}, not the identity")),
        Err(e) => rep.push(format!("relation {w}"), e.to_string()),
    }
}

/// Monodromy is well defined on the base: every generator has an image and
/// the base's relators hold.
pub fn validate_monodromy(b: &BaseComplex, m: &MonodromyData) -> ValidationReport {
    let mut rep = m.validate();
    if m.n != b.n {
        rep.push("monodromy", format!("torus rank {} differs from base dimension {}", m.n, b.n));
        return rep;
    }
    for s in &b.generator_symbols {
        if !m.images.contains_key(s) {
            rep.push(s, "generator has no monodromy image");
        }
    }
    if rep.is_valid() {
        for w in &b.relators {
            check_relation(m, w, &mut rep);
        }
    }
    rep
}

/// The action comes from a global torus action iff the holonomy is trivial.
pub fn is_locally_standard(m: &MonodromyData) -> bool {
    m.images.values().all(IntegerMatrix::is_identity)
}

/// Primitive generator of the characteristic line over each facet, written
/// in the frame of the facet's anchor cell.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CharacteristicData {
    pub facet_vectors: BTreeMap<String, IntegerVector>,
}

impl CharacteristicData {
    pub fn from_i64<S: AsRef<str>>(entries: &[(S, &[i64])]) -> Self {
        CharacteristicData {
            facet_vectors: entries
                .iter()
                .map(|(k, v)| (k.as_ref().to_string(), crate::int_vector(v)))
                .collect(),
        }
    }

    /// Apply `g` to every facet vector.
    pub fn transformed(&self, g: &IntegerMatrix) -> Self {
        CharacteristicData {
            facet_vectors: self
                .facet_vectors
                .iter()
                .map(|(k, v)| (k.clone(), g.mul_vec(v)))
                .collect(),
        }
    }
}

/// Sign-normalised representative of the line through `v`: first nonzero
/// entry positive.
pub fn canonical_line(v: &[BigInt]) -> IntegerVector {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.iter().map(|x| -x).collect(),
        _ => v.to_vec(),
    }
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one()
}

/// Stabilizer lines and sublattices of every cell, with the checks that
/// make the data a characteristic pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerMap {
    /// Distinct characteristic lines through each cell, in the cell's frame.
    pub lines: BTreeMap<String, Vec<IntegerVector>>,
    pub sublattices: BTreeMap<String, IntegerSublattice>,
    pub report: ValidationReport,
}

impl StabilizerMap {
    pub fn get(&self, cell: &str) -> Option<&IntegerSublattice> {
        self.sublattices.get(cell)
    }
}

pub fn compute_stabilizers(b: &BaseComplex, m: &MonodromyData, ch: &CharacteristicData) -> StabilizerMap {
    let n = b.n;
    let mut rep = validate_monodromy(b, m);
    let mut lines: HashMap<String, Vec<IntegerVector>> = HashMap::new();

    for id in ch.facet_vectors.keys() {
        if b.facet(id).is_none() {
            rep.push(id, "characteristic vector given for an unknown facet");
        }
    }

    for facet in &b.facets {
        let Some(v) = ch.facet_vectors.get(&facet.id) else {
            rep.push(&facet.id, "facet has no characteristic vector");
            continue;
        };
        if v.len() != n {
            rep.push(&facet.id, format!("characteristic vector has length {}, expected {n}", v.len()));
            continue;
        }
        if !is_primitive(v) {
            rep.push(&facet.id, "characteristic vector is not primitive");
            continue;
        }
        let Some(anchor) = facet.cells.first() else {
            continue;
        };
        let members: HashSet<&str> = facet.cells.iter().map(String::as_str).collect();
        let inner: Vec<_> = b
            .incidences
            .iter()
            .filter(|r| members.contains(r.coface.as_str()) && members.contains(r.face.as_str()))
            .collect();
        let mut assigned: HashMap<&str, IntegerVector> = HashMap::from([(anchor.as_str(), v.clone())]);
        let mut changed = true;
        while changed {
            changed = false;
            for r in &inner {
                let (co, fa) = (assigned.get(r.coface.as_str()), assigned.get(r.face.as_str()));
                let moved = match (co, fa) {
                    (Some(u), None) => transport_to_face(m, &r.transport, u).map(|w| (r.face.as_str(), w)),
                    (None, Some(u)) => m
                        .evaluate(&r.transport)
                        .map(|g| (r.coface.as_str(), g.mul_vec(u))),
                    _ => continue,
                };
                match moved {
                    Ok((id, w)) => {
                        assigned.insert(id, w);
                        changed = true;
                    }
                    Err(e) => rep.push(&facet.id, e.to_string()),
                }
            }
        }
        for r in &inner {
            let (Some(co), Some(fa)) = (assigned.get(r.coface.as_str()), assigned.get(r.face.as_str())) else {
                continue;
            };
            if let Ok(w) = transport_to_face(m, &r.transport, co) {
                if canonical_line(&w) != canonical_line(fa) {
                    rep.push(
                        &facet.id,
                        format!("transported facet vectors disagree along {} > {}", r.coface, r.face),
                    );
                }
            }
        }
        for id in &facet.cells {
            match assigned.get(id.as_str()) {
                Some(w) => {
                    lines.insert(id.clone(), vec![canonical_line(w)]);
                }
                None => rep.push(&facet.id, format!("cell `{id}` is not connected to the facet anchor")),
            }
        }
    }

    // Lower strata collect the lines of their non-interior cofaces.
    let mut order: Vec<_> = b.cells.iter().filter(|c| c.stratum + 1 < n).collect();
    order.sort_by_key(|c| std::cmp::Reverse(c.dim));
    for c in order {
        let mut collected: BTreeSet<IntegerVector> = BTreeSet::new();
        for r in b.cofaces_of(&c.id) {
            let Some(co) = b.cell(&r.coface) else { continue };
            if co.stratum >= n {
                continue;
            }
            for l in lines.get(&r.coface).cloned().unwrap_or_default() {
                match transport_to_face(m, &r.transport, &l) {
                    Ok(w) => {
                        collected.insert(canonical_line(&w));
                    }
                    Err(e) => rep.push(&c.id, e.to_string()),
                }
            }
        }
        lines.insert(c.id.clone(), collected.into_iter().collect());
    }

    let mut sublattices = BTreeMap::new();
    let mut ordered_lines = BTreeMap::new();
    for c in &b.cells {
        let ls = lines.remove(&c.id).unwrap_or_default();
        if c.stratum >= n {
            sublattices.insert(c.id.clone(), IntegerSublattice::zero(n));
            ordered_lines.insert(c.id.clone(), Vec::new());
            continue;
        }
        let expected = n - c.stratum;
        let s = IntegerSublattice::from_vectors(n, &ls).unwrap_or_else(|_| IntegerSublattice::zero(n));
        if ls.len() != expected {
            rep.push(&c.id, format!("cell meets {} characteristic lines, expected {expected}", ls.len()));
        }
        if s.rank() != expected {
            rep.push(&c.id, format!("stabilizer has rank {}, expected {expected}", s.rank()));
        } else if !s.is_direct_summand() {
            rep.push(&c.id, "stabilizer is not a direct summand (unimodularity fails)");
        }
        sublattices.insert(c.id.clone(), s);
        ordered_lines.insert(c.id.clone(), ls);
    }

    StabilizerMap {
        lines: ordered_lines,
        sublattices,
        report: rep,
    }
}

fn transport_to_face(m: &MonodromyData, w: &Word, v: &[BigInt]) -> Result<IntegerVector, TorusDataError> {
    Ok(inverse_unimodular(&m.evaluate(w)?)?.mul_vec(v))
}

/// Full check that `(monodromy, characteristic)` is a characteristic pair over `b`.
pub fn validate_characteristic(b: &BaseComplex, m: &MonodromyData, ch: &CharacteristicData) -> ValidationReport {
    compute_stabilizers(b, m, ch).report
}

/// Stabilizer sublattice of a single cell, in the cell's own frame.
pub fn stabilizer(
    b: &BaseComplex,
    m: &MonodromyData,
    ch: &CharacteristicData,
    cell: &str,
) -> Result<IntegerSublattice, TorusDataError> {
    compute_stabilizers(b, m, ch)
        .sublattices
        .remove(cell)
        .ok_or_else(|| TorusDataError::UnknownCell(cell.to_string()))
}

/// Overlap `from`/`to` carrying `ρ_{from,to}`; the reverse direction carries the inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechEdge {
    pub from: String,
    pub to: String,
    pub value: IntegerMatrix,
    /// Generator name used if the edge survives gauge fixing.
    pub symbol: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechCocycle {
    pub n: usize,
    pub charts: Vec<String>,
    pub edges: Vec<CechEdge>,
    pub triangles: Vec<[String; 3]>,
}

/// A cocycle after gauge fixing along a spanning tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeFixed {
    pub monodromy: MonodromyData,
    /// `g_α` with `g_root = I` and `g_child = g_parent · ρ_{parent,child}`.
    pub gauge: BTreeMap<String, IntegerMatrix>,
    pub tree: Vec<usize>,
}

impl CechCocycle {
    fn edge_between(&self, a: &str, b: &str) -> Option<(usize, bool)> {
        self.edges.iter().enumerate().find_map(|(i, e)| {
            if e.from == a && e.to == b {
                Some((i, false))
            } else if e.from == b && e.to == a {
                Some((i, true))
            } else {
                None
            }
        })
    }

    /// `ρ_{ab}`.
    pub fn value(&self, a: &str, b: &str) -> Result<IntegerMatrix, TorusDataError> {
        match self.edge_between(a, b) {
            Some((i, false)) => Ok(self.edges[i].value.clone()),
            Some((i, true)) => Ok(inverse_unimodular(&self.edges[i].value)?),
            None => Err(TorusDataError::MissingEdge(a.to_string(), b.to_string())),
        }
    }

    fn check_charts(&self) -> Result<(), TorusDataError> {
        let known: HashSet<&str> = self.charts.iter().map(String::as_str).collect();
        let named = self
            .edges
            .iter()
            .flat_map(|e| [&e.from, &e.to])
            .chain(self.triangles.iter().flatten());
        for c in named {
            if !known.contains(c.as_str()) {
                return Err(TorusDataError::UnknownChart(c.clone()));
            }
        }
        Ok(())
    }

    /// `ρ_{αβ} ρ_{βγ} = ρ_{αγ}` on every declared triangle.
    pub fn check_cocycle(&self) -> Result<(), TorusDataError> {
        self.check_charts()?;
        for e in &self.edges {
            inverse_unimodular(&e.value)?;
        }
        for [a, b, c] in &self.triangles {
            let lhs = &self.value(a, b)? * &self.value(b, c)?;
            if lhs != self.value(a, c)? {
                return Err(TorusDataError::CocycleViolation(a.clone(), b.clone(), c.clone()));
            }
        }
        Ok(())
    }

    /// Breadth-first spanning tree rooted at the first chart, as edge indices.
    pub fn spanning_tree(&self) -> Result<Vec<usize>, TorusDataError> {
        self.check_charts()?;
        let Some(root) = self.charts.first() else {
            return Ok(Vec::new());
        };
        let mut seen: HashSet<&str> = HashSet::from([root.as_str()]);
        let mut queue = VecDeque::from([root.as_str()]);
        let mut tree = Vec::new();
        while let Some(a) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                let other = if e.from == a {
                    e.to.as_str()
                } else if e.to == a {
                    e.from.as_str()
                } else {
                    continue;
                };
                if seen.insert(other) {
                    tree.push(i);
                    queue.push_back(other);
                }
            }
        }
        match self.charts.iter().find(|c| !seen.contains(c.as_str())) {
            Some(c) => Err(TorusDataError::DisconnectedChartGraph(c.clone())),
            None => Ok(tree),
        }
    }
}

fn edge_symbol(e: &CechEdge) -> String {
    e.symbol.clone().unwrap_or_else(|| format!("h_{}_{}", e.from, e.to))
}

/// Gauge-fix `c` along `tree`: tree edges become the identity and every other
/// edge becomes a generator of the holonomy, with one relation per triangle.
pub fn holonomy_from_cocycle(c: &CechCocycle, tree: &[usize]) -> Result<GaugeFixed, TorusDataError> {
    c.check_cocycle()?;
    if c.charts.is_empty() {
        return Err(TorusDataError::NotASpanningTree);
    }
    if tree.len() + 1 != c.charts.len() || tree.iter().any(|&i| i >= c.edges.len()) {
        return Err(TorusDataError::NotASpanningTree);
    }
    let mut gauge: BTreeMap<String, IntegerMatrix> = BTreeMap::new();
    gauge.insert(c.charts[0].clone(), IntegerMatrix::identity(c.n));
    let mut pending: Vec<usize> = tree.to_vec();
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|&i| {
            let e = &c.edges[i];
            match (gauge.get(&e.from).cloned(), gauge.get(&e.to).cloned()) {
                (Some(g), None) => {
                    gauge.insert(e.to.clone(), &g * &e.value);
                    false
                }
                (None, Some(g)) => {
                    let inv = inverse_unimodular(&e.value).expect("checked invertible");
                    gauge.insert(e.from.clone(), &g * &inv);
                    false
                }
                _ => true,
            }
        });
        if pending.len() == before {
            return Err(TorusDataError::NotASpanningTree);
        }
    }
    if let Some(missing) = c.charts.iter().find(|ch| !gauge.contains_key(*ch)) {
        return Err(TorusDataError::DisconnectedChartGraph(missing.clone()));
    }

    let in_tree: HashSet<usize> = tree.iter().copied().collect();
    let mut images = BTreeMap::new();
    for (i, e) in c.edges.iter().enumerate() {
        if in_tree.contains(&i) {
            continue;
        }
        let fixed = &(&gauge[&e.from] * &e.value) * &inverse_unimodular(&gauge[&e.to])?;
        images.insert(edge_symbol(e), fixed);
    }
    let mut relations = Vec::new();
    for [a, b, d] in &c.triangles {
        let mut letters = Vec::new();
        for (x, y) in [(a, b), (b, d), (d, a)] {
            let (i, reversed) = c
                .edge_between(x, y)
                .ok_or_else(|| TorusDataError::MissingEdge(x.clone(), y.clone()))?;
            if in_tree.contains(&i) {
                continue;
            }
            let sym = edge_symbol(&c.edges[i]);
            letters.push(if reversed { Letter::inv(sym) } else { Letter::new(sym) });
        }
        relations.push(Word(letters));
    }
    Ok(GaugeFixed {
        monodromy: MonodromyData {
            n: c.n,
            images,
            relations,
        },
        gauge,
        tree: tree.to_vec(),
    })
}
