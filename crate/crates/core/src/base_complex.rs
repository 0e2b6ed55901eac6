//! Cell decompositions of the orbit space.
//!
//! Every cell lies in a single stratum `S^(k)`: the points whose fiber is a
//! `k`-torus. Incidences between cells carry a transport word in the
//! generators of the base's fundamental group; the word says which lift of the
//! face is glued to the coface, and is what twists the local coefficients.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::validation::ValidationReport;
use crate::IntegerMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseComplexError {
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("malformed word letter `{0}`")]
    BadLetter(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    /// `k` such that the cell lies in `S^(k)`.
    pub stratum: usize,
    pub label: Option<String>,
}

impl Cell {
    pub fn new(id: impl Into<String>, dim: usize, stratum: usize) -> Self {
        Cell {
            id: id.into(),
            dim,
            stratum,
            label: None,
        }
    }
}

/// A generator or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub symbol: String,
    pub inverse: bool,
}

impl Letter {
    pub fn new(symbol: impl Into<String>) -> Self {
        Letter {
            symbol: symbol.into(),
            inverse: false,
        }
    }

    pub fn inv(symbol: impl Into<String>) -> Self {
        Letter {
            symbol: symbol.into(),
            inverse: true,
        }
    }

    pub fn inverted(&self) -> Letter {
        Letter {
            symbol: self.symbol.clone(),
            inverse: !self.inverse,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "-{}", self.symbol)
        } else {
            write!(f, "{}", self.symbol)
        }
    }
}

/// `"alpha1"` is a generator, `"-alpha1"` its inverse.
impl FromStr for Letter {
    type Err = BaseComplexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (inverse, symbol) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if symbol.is_empty() || symbol.starts_with('-') || symbol.chars().any(char::is_whitespace) {
            return Err(BaseComplexError::BadLetter(s.to_string()));
        }
        Ok(Letter {
            symbol: symbol.to_string(),
            inverse,
        })
    }
}

/// A word in the generators, read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn parse<S: AsRef<str>>(letters: &[S]) -> Result<Self, BaseComplexError> {
        letters
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn then(&self, letter: Letter) -> Word {
        let mut w = self.0.clone();
        w.push(letter);
        Word(w)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.0.clone();
        w.extend(other.0.iter().cloned());
        Word(w)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inverted).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(Letter::to_string).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.to_strings();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceRecord {
    pub coface: String,
    pub face: String,
    pub coefficient: i64,
    pub transport: Word,
}

impl IncidenceRecord {
    pub fn new(coface: &str, face: &str, coefficient: i64, transport: Word) -> Self {
        IncidenceRecord {
            coface: coface.to_string(),
            face: face.to_string(),
            coefficient,
            transport,
        }
    }
}

/// A connected component of `S^(n-1)` together with the lower-dimensional
/// cells of its own stratum. The first cell is the anchor: facet vectors are
/// expressed in its frame. It must have dimension `n - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub id: String,
    pub cells: Vec<String>,
}

/// One boundary component as a cyclic sequence of facets.
///
/// `corners[i]` is the corner cell where `facets[i]` meets `facets[i + 1]`
/// (indices mod the length). A corner-free component has a single facet and
/// no corners.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundaryComponent {
    pub facets: Vec<String>,
    pub corners: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseComplex {
    pub n: usize,
    pub cells: Vec<Cell>,
    pub incidences: Vec<IncidenceRecord>,
    pub generator_symbols: Vec<String>,
    /// Words that must map to the identity under any monodromy.
    pub relators: Vec<Word>,
    pub facets: Vec<Facet>,
    pub boundary_components: Vec<BoundaryComponent>,
    pub oriented: bool,
}

impl BaseComplex {
    pub fn cell(&self, id: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.id == id)
    }

    pub fn require_cell(&self, id: &str) -> Result<&Cell, BaseComplexError> {
        self.cell(id).ok_or_else(|| BaseComplexError::UnknownCell(id.to_string()))
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    /// Cells of dimension `p`, in declaration order. This order fixes the
    /// bases of all cochain groups.
    pub fn cells_of_dim(&self, p: usize) -> Vec<&Cell> {
        self.cells.iter().filter(|c| c.dim == p).collect()
    }

    /// Position of every cell within its own dimension.
    pub fn dim_index(&self) -> HashMap<&str, usize> {
        let mut counters: HashMap<usize, usize> = HashMap::new();
        let mut out = HashMap::new();
        for c in &self.cells {
            let k = counters.entry(c.dim).or_default();
            out.insert(c.id.as_str(), *k);
            *k += 1;
        }
        out
    }

    pub fn cofaces_of<'a>(&'a self, face: &'a str) -> impl Iterator<Item = &'a IncidenceRecord> + 'a {
        self.incidences.iter().filter(move |r| r.face == face)
    }

    pub fn faces_of<'a>(&'a self, coface: &'a str) -> impl Iterator<Item = &'a IncidenceRecord> + 'a {
        self.incidences.iter().filter(move |r| r.coface == coface)
    }

    pub fn facet(&self, id: &str) -> Option<&Facet> {
        self.facets.iter().find(|f| f.id == id)
    }

    /// Alternating count of cells.
    pub fn cellular_euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .map(|c| if c.dim % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// Untwisted integer coboundary `C^p -> C^(p+1)` (rows: `(p+1)`-cells,
    /// columns: `p`-cells), transport words erased.
    pub fn untwisted_coboundary(&self, p: usize) -> IntegerMatrix {
        let rows = self.cells_of_dim(p + 1).len();
        let cols = self.cells_of_dim(p).len();
        let idx = self.dim_index();
        let mut m = IntegerMatrix::zeros(rows, cols);
        for r in &self.incidences {
            let (Some(co), Some(fa)) = (self.cell(&r.coface), self.cell(&r.face)) else {
                continue;
            };
            if fa.dim != p || co.dim != p + 1 {
                continue;
            }
            let (i, j) = (idx[co.id.as_str()], idx[fa.id.as_str()]);
            let v = m.get(i, j) + BigInt::from(r.coefficient);
            m.set(i, j, v);
        }
        m
    }
}

/// Per-`(dim, stratum)` cell counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StratumCensus {
    pub counts: BTreeMap<(usize, usize), usize>,
}

impl StratumCensus {
    pub fn count(&self, dim: usize, stratum: usize) -> usize {
        self.counts.get(&(dim, stratum)).copied().unwrap_or(0)
    }

    /// Number of cells in `S^(k)`.
    pub fn in_stratum(&self, k: usize) -> usize {
        self.counts
            .iter()
            .filter(|((_, s), _)| *s == k)
            .map(|(_, c)| c)
            .sum()
    }

    /// `|S^(0)|`, the number of fixed points of the torus action.
    pub fn corner_count(&self) -> usize {
        self.in_stratum(0)
    }
}

pub fn stratum_census(b: &BaseComplex) -> StratumCensus {
    let mut counts = BTreeMap::new();
    for c in &b.cells {
        *counts.entry((c.dim, c.stratum)).or_insert(0) += 1;
    }
    StratumCensus { counts }
}

/// Checks every structural invariant of the complex and reports all failures.
pub fn validate_complex(b: &BaseComplex) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let mut seen = HashSet::new();
    for c in &b.cells {
        if !seen.insert(c.id.as_str()) {
            rep.push(&c.id, "duplicate cell id");
        }
        if c.dim > c.stratum {
            rep.push(&c.id, format!("cell exceeds stratum dimension ({} > {})", c.dim, c.stratum));
        }
        if c.stratum > b.n {
            rep.push(&c.id, format!("stratum {} exceeds base dimension {}", c.stratum, b.n));
        }
    }

    let gens: HashSet<&str> = b.generator_symbols.iter().map(String::as_str).collect();
    let check_word = |rep: &mut ValidationReport, subject: &str, w: &Word| {
        for l in w.letters() {
            if !gens.contains(l.symbol.as_str()) {
                rep.push(subject, format!("undeclared generator `{}`", l.symbol));
            }
        }
    };

    for r in &b.incidences {
        let subject = format!("{} > {}", r.coface, r.face);
        match (b.cell(&r.coface), b.cell(&r.face)) {
            (Some(co), Some(fa)) => {
                if co.dim != fa.dim + 1 {
                    rep.push(&subject, "incidence dimensions must differ by one");
                }
                if fa.stratum > co.stratum {
                    rep.push(&subject, "face lies in a higher stratum than its coface");
                }
            }
            (co, fa) => {
                if co.is_none() {
                    rep.push(&subject, format!("unknown cell `{}`", r.coface));
                }
                if fa.is_none() {
                    rep.push(&subject, format!("unknown cell `{}`", r.face));
                }
            }
        }
        if r.coefficient == 0 {
            rep.push(&subject, "zero incidence coefficient");
        }
        check_word(&mut rep, &subject, &r.transport);
    }
    for (i, w) in b.relators.iter().enumerate() {
        check_word(&mut rep, &format!("relator {i}"), w);
    }

    if rep.is_valid() {
        for p in 0..b.max_dim().saturating_sub(1) {
            let prod = &b.untwisted_coboundary(p + 1) * &b.untwisted_coboundary(p);
            if !prod.is_zero() {
                rep.push(format!("degree {p}"), "untwisted coboundary does not square to zero");
            }
        }
    }

    validate_facets(b, &mut rep);
    rep
}

fn validate_facets(b: &BaseComplex, rep: &mut ValidationReport) {
    if b.n == 0 {
        return;
    }
    let mut owner: HashMap<&str, &str> = HashMap::new();
    for f in &b.facets {
        match f.cells.first().and_then(|id| b.cell(id)) {
            Some(anchor) if anchor.dim + 1 == b.n => {}
            _ => rep.push(&f.id, format!("facet anchor must be a cell of dimension {}", b.n - 1)),
        }
        for id in &f.cells {
            match b.cell(id) {
                None => rep.push(&f.id, format!("unknown cell `{id}`")),
                Some(c) if c.stratum + 1 != b.n => {
                    rep.push(&f.id, format!("cell `{id}` is not in the codimension-one stratum"))
                }
                Some(_) => {
                    if let Some(other) = owner.insert(id.as_str(), f.id.as_str()) {
                        rep.push(id, format!("cell belongs to facets `{other}` and `{}`", f.id));
                    }
                }
            }
        }
    }
    for c in &b.cells {
        if c.stratum + 1 == b.n && !owner.contains_key(c.id.as_str()) {
            rep.push(&c.id, "codimension-one cell is in no facet");
        }
    }

    let mut facet_owner: HashMap<&str, usize> = HashMap::new();
    let mut corner_owner: HashMap<&str, usize> = HashMap::new();
    for (j, comp) in b.boundary_components.iter().enumerate() {
        let subject = format!("boundary component {}", j + 1);
        if comp.facets.is_empty() {
            rep.push(&subject, "no facets");
        }
        if !comp.corners.is_empty() && comp.corners.len() != comp.facets.len() {
            rep.push(&subject, "corner count must equal facet count (or be zero)");
        }
        if comp.corners.is_empty() && comp.facets.len() > 1 {
            rep.push(&subject, "several facets but no corners between them");
        }
        for f in &comp.facets {
            if b.facet(f).is_none() {
                rep.push(&subject, format!("unknown facet `{f}`"));
            }
            if facet_owner.insert(f.as_str(), j).is_some() {
                rep.push(f, "facet listed in more than one boundary component");
            }
        }
        for c in &comp.corners {
            match b.cell(c) {
                None => rep.push(&subject, format!("unknown corner `{c}`")),
                Some(cell) if cell.stratum + 2 != b.n => {
                    rep.push(c, "corner is not in the codimension-two stratum")
                }
                Some(_) => {
                    if corner_owner.insert(c.as_str(), j).is_some() {
                        rep.push(c, "corner listed more than once");
                    }
                }
            }
        }
    }
    if !b.boundary_components.is_empty() {
        for f in &b.facets {
            if !facet_owner.contains_key(f.id.as_str()) {
                rep.push(&f.id, "facet is in no boundary component");
            }
        }
        if b.n == 2 {
            for c in &b.cells {
                if c.stratum == 0 && !corner_owner.contains_key(c.id.as_str()) {
                    rep.push(&c.id, "corner cell is in no boundary component");
                }
            }
        }
    }
}

/// Canonical cell decomposition of an orientable surface of genus `genus`
/// whose `j`-th boundary circle carries `boundary[j]` corners.
///
/// One polygon 2-cell `f` is glued along the word
/// `[a1,b1]…[ag,bg] · s1 · d2 s2 d2^-1 · … · db sb db^-1`, where `sj` runs
/// around boundary circle `j` and `dj` is an arc from the base vertex to
/// circle `j`. Cells are named `x{j}_{k}` (boundary vertices), `x0` (the
/// vertex of a closed surface), `a{i}`, `b{i}`, `s{j}_{k}`, `d{j}` and `f`.
/// Generators are `alpha{i}`, `beta{i}`, `gamma{j}`, subject to the single
/// relator `[alpha1,beta1]…[alphag,betag] gamma1 … gammab`.
pub fn build_surface_base(genus: usize, boundary: &[usize]) -> BaseComplex {
    let mut cells = Vec::new();
    let mut inc = Vec::new();
    let mut facets = Vec::new();
    let mut components = Vec::new();

    let base_vertex = if boundary.is_empty() {
        cells.push(Cell::new("x0", 0, 2));
        "x0".to_string()
    } else {
        for (j, &m) in boundary.iter().enumerate() {
            let j = j + 1;
            if m == 0 {
                cells.push(Cell::new(format!("x{j}_1"), 0, 1));
            } else {
                for k in 1..=m {
                    cells.push(Cell::new(format!("x{j}_{k}"), 0, 0));
                }
            }
        }
        "x1_1".to_string()
    };

    let mut generators = Vec::new();
    for i in 1..=genus {
        generators.push(format!("alpha{i}"));
        generators.push(format!("beta{i}"));
    }
    for j in 1..=boundary.len() {
        generators.push(format!("gamma{j}"));
    }

    for i in 1..=genus {
        for (edge, gen) in [(format!("a{i}"), format!("alpha{i}")), (format!("b{i}"), format!("beta{i}"))] {
            cells.push(Cell::new(&edge, 1, 2));
            inc.push(IncidenceRecord::new(&edge, &base_vertex, -1, Word::empty()));
            inc.push(IncidenceRecord::new(&edge, &base_vertex, 1, Word(vec![Letter::new(gen)])));
        }
    }

    for (j, &m) in boundary.iter().enumerate() {
        let j = j + 1;
        let segments = m.max(1);
        let gamma = Word(vec![Letter::new(format!("gamma{j}"))]);
        let mut facet_ids = Vec::new();
        let mut corner_ids = Vec::new();
        for k in 1..=segments {
            let s = format!("s{j}_{k}");
            let start = format!("x{j}_{k}");
            let (end, end_word) = if k == segments {
                (format!("x{j}_1"), gamma.clone())
            } else {
                (format!("x{j}_{}", k + 1), Word::empty())
            };
            cells.push(Cell::new(&s, 1, 1));
            inc.push(IncidenceRecord::new(&s, &start, -1, Word::empty()));
            inc.push(IncidenceRecord::new(&s, &end, 1, end_word));
            if m == 0 {
                facet_ids.push(format!("F{j}"));
                facets.push(Facet {
                    id: format!("F{j}"),
                    cells: vec![s, start],
                });
            } else {
                facet_ids.push(format!("F{j}_{k}"));
                facets.push(Facet {
                    id: format!("F{j}_{k}"),
                    cells: vec![s],
                });
                corner_ids.push(end);
            }
        }
        components.push(BoundaryComponent {
            facets: facet_ids,
            corners: corner_ids,
        });
    }

    for j in 2..=boundary.len() {
        let d = format!("d{j}");
        cells.push(Cell::new(&d, 1, 2));
        inc.push(IncidenceRecord::new(&d, &base_vertex, -1, Word::empty()));
        inc.push(IncidenceRecord::new(&d, &format!("x{j}_1"), 1, Word::empty()));
    }

    cells.push(Cell::new("f", 2, 2));
    // Walk the polygon, tracking the deck transformation reached so far.
    let mut deck = Word::empty();
    for i in 1..=genus {
        let (a, b) = (format!("a{i}"), format!("b{i}"));
        let (alpha, beta) = (Letter::new(format!("alpha{i}")), Letter::new(format!("beta{i}")));
        inc.push(IncidenceRecord::new("f", &a, 1, deck.clone()));
        deck = deck.then(alpha.clone());
        inc.push(IncidenceRecord::new("f", &b, 1, deck.clone()));
        deck = deck.then(beta.clone());
        deck = deck.then(alpha.inverted());
        inc.push(IncidenceRecord::new("f", &a, -1, deck.clone()));
        deck = deck.then(beta.inverted());
        inc.push(IncidenceRecord::new("f", &b, -1, deck.clone()));
    }
    for (j, &m) in boundary.iter().enumerate() {
        let j = j + 1;
        let d = format!("d{j}");
        if j > 1 {
            inc.push(IncidenceRecord::new("f", &d, 1, deck.clone()));
        }
        for k in 1..=m.max(1) {
            inc.push(IncidenceRecord::new("f", &format!("s{j}_{k}"), 1, deck.clone()));
        }
        deck = deck.then(Letter::new(format!("gamma{j}")));
        if j > 1 {
            inc.push(IncidenceRecord::new("f", &d, -1, deck.clone()));
        }
    }

    let relators = if generators.is_empty() { Vec::new() } else { vec![deck] };

    // keep the documented cell order: vertices, handle edges, boundary, arcs, face
    let order = |c: &Cell| -> (usize, usize) {
        let class = match c.id.as_bytes()[0] {
            b'x' => 0,
            b'a' | b'b' => 1,
            b's' => 2,
            b'd' => 3,
            _ => 4,
        };
        (c.dim, class)
    };
    cells.sort_by_key(order);

    BaseComplex {
        n: 2,
        cells,
        incidences: inc,
        generator_symbols: generators,
        relators,
        facets,
        boundary_components: components,
        oriented: true,
    }
}
