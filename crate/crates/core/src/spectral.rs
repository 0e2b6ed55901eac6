//! Leray and Atiyah–Hirzebruch spectral sequences of the orbit map.
//!
//! Over a cell in `S^(k)` the fiber is the quotient torus `T^n / Z` where `Z`
//! is the stabilizer subtorus. Its cohomology sits inside that of `T^n` as
//! `Λ^q Ann(Z)`, and these subgroups, glued by the monodromy, form the
//! coefficient system of the `E_1` page. For K-theory the fiber coefficients
//! are `Λ^0 ⊕ Λ^2` in even degree and `Λ^1` in odd degree, which is exact for
//! fibers of dimension at most two.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::base_complex::{stratum_census, validate_complex, BaseComplex};
use crate::lattice::{compound_matrix, exterior_power_dual_rep, solve_integer, subquotient, LatticeError};
use crate::torus_data::{compute_stabilizers, validate_monodromy, CharacteristicData, MonodromyData, TorusDataError};
use crate::validation::ValidationReport;
use crate::{AbelianGroup, IntegerMatrix, IntegerSublattice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error("the orbit map must be declared to admit a section")]
    SectionRequired,
    #[error("transport along {coface} > {face} leaves the degree-{degree} coefficient subgroup")]
    SubcomplexViolation { coface: String, face: String, degree: String },
    #[error("degeneracy not certified: {0}")]
    DegeneracyNotCertified(String),
    #[error("K-theory needs a rank-2 torus, got rank {0}")]
    UnsupportedRank(usize),
    #[error("invalid input:\n{0}")]
    InvalidInput(ValidationReport),
    #[error(transparent)]
    Torus(#[from] TorusDataError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Which fiber cohomology theory a coefficient system carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberDegree {
    /// `H^q` of the fiber.
    Cohomology(usize),
    /// `K^0` of the fiber, `H^0 ⊕ H^2`.
    KEven,
    /// `K^1` of the fiber, `H^1`.
    KOdd,
}

impl FiberDegree {
    fn label(self) -> String {
        match self {
            FiberDegree::Cohomology(q) => format!("q={q}"),
            FiberDegree::KEven => "even".to_string(),
            FiberDegree::KOdd => "odd".to_string(),
        }
    }

    fn exterior_degrees(self) -> Vec<usize> {
        match self {
            FiberDegree::Cohomology(q) => vec![q],
            FiberDegree::KEven => vec![0, 2],
            FiberDegree::KOdd => vec![1],
        }
    }
}

/// Validated input to the spectral sequences: a base, its monodromy and the
/// stabilizer of every cell.
#[derive(Clone, Debug)]
pub struct Fibration<'a> {
    pub base: &'a BaseComplex,
    pub monodromy: &'a MonodromyData,
    pub stabilizers: BTreeMap<String, IntegerSublattice>,
    pub section_exists: bool,
}

impl<'a> Fibration<'a> {
    /// Validates the complex and the characteristic pair.
    pub fn new(
        base: &'a BaseComplex,
        monodromy: &'a MonodromyData,
        ch: &CharacteristicData,
        section_exists: bool,
    ) -> Result<Self, SpectralError> {
        let mut rep = validate_complex(base);
        if !rep.is_valid() {
            return Err(SpectralError::InvalidInput(rep));
        }
        let st = compute_stabilizers(base, monodromy, ch);
        rep.extend(st.report);
        if !rep.is_valid() {
            return Err(SpectralError::InvalidInput(rep));
        }
        Ok(Fibration {
            base,
            monodromy,
            stabilizers: st.sublattices,
            section_exists,
        })
    }

    /// Uses caller-supplied stabilizers, checking only that each has rank
    /// `n - k` and is a direct summand. Useful when the base has no facets
    /// to derive them from.
    pub fn from_stabilizers(
        base: &'a BaseComplex,
        monodromy: &'a MonodromyData,
        stabilizers: BTreeMap<String, IntegerSublattice>,
        section_exists: bool,
    ) -> Result<Self, SpectralError> {
        let mut rep = validate_complex(base);
        rep.extend(validate_monodromy(base, monodromy));
        for c in &base.cells {
            match stabilizers.get(&c.id) {
                None => rep.push(&c.id, "no stabilizer given"),
                Some(s) => {
                    if s.ambient_rank() != base.n || s.rank() + c.stratum != base.n {
                        rep.push(&c.id, "stabilizer rank does not match the stratum");
                    } else if !s.is_direct_summand() {
                        rep.push(&c.id, "stabilizer is not a direct summand");
                    }
                }
            }
        }
        if !rep.is_valid() {
            return Err(SpectralError::InvalidInput(rep));
        }
        Ok(Fibration {
            base,
            monodromy,
            stabilizers,
            section_exists,
        })
    }

    fn require_section(&self) -> Result<(), SpectralError> {
        if self.section_exists {
            Ok(())
        } else {
            Err(SpectralError::SectionRequired)
        }
    }
}

/// A block of a twisted coboundary: `coefficient · matrix` maps the face's
/// coefficient group into the coface's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportBlock {
    pub coface: String,
    pub face: String,
    pub coefficient: i64,
    pub matrix: IntegerMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSystem {
    pub degree: FiberDegree,
    /// Basis (as columns) of the coefficient subgroup of every cell.
    pub bases: BTreeMap<String, IntegerMatrix>,
    pub blocks: Vec<TransportBlock>,
    base_cells: Vec<(String, usize)>,
}

impl CoefficientSystem {
    pub fn rank(&self, cell: &str) -> usize {
        self.bases.get(cell).map_or(0, IntegerMatrix::cols)
    }

    /// Rank of the cochain group `C^p`.
    pub fn cochain_rank(&self, p: usize) -> usize {
        self.base_cells
            .iter()
            .filter(|(_, d)| *d == p)
            .map(|(id, _)| self.rank(id))
            .sum()
    }

    fn offsets(&self, p: usize) -> BTreeMap<&str, usize> {
        let mut acc = 0;
        let mut out = BTreeMap::new();
        for (id, d) in &self.base_cells {
            if *d == p {
                out.insert(id.as_str(), acc);
                acc += self.rank(id);
            }
        }
        out
    }
}

fn fiber_action(g: &IntegerMatrix, degree: FiberDegree) -> Result<IntegerMatrix, LatticeError> {
    let mut blocks = degree.exterior_degrees().into_iter();
    let first = exterior_power_dual_rep(g, blocks.next().expect("nonempty"))?;
    blocks.try_fold(first, |acc, q| Ok(acc.direct_sum(&exterior_power_dual_rep(g, q)?)))
}

fn fiber_subgroup(ann: &IntegerMatrix, degree: FiberDegree) -> IntegerMatrix {
    let mut blocks = degree.exterior_degrees().into_iter();
    let first = compound_matrix(ann, blocks.next().expect("nonempty"));
    let gens = blocks.fold(first, |acc, q| acc.direct_sum(&compound_matrix(ann, q)));
    IntegerSublattice::new(&gens).basis().clone()
}

/// Fiber-cohomology coefficients of every cell, with the restricted transports.
pub fn coefficient_system(fib: &Fibration, degree: FiberDegree) -> Result<CoefficientSystem, SpectralError> {
    fib.require_section()?;
    let n = fib.base.n;
    if let FiberDegree::Cohomology(q) = degree {
        if q > n {
            return Err(LatticeError::DegreeOutOfRange { degree: q, rank: n }.into());
        }
    }
    let mut bases = BTreeMap::new();
    for c in &fib.base.cells {
        let ann = fib.stabilizers[&c.id].annihilator();
        bases.insert(c.id.clone(), fiber_subgroup(ann.basis(), degree));
    }
    let mut blocks = Vec::new();
    for r in &fib.base.incidences {
        let action = fiber_action(&fib.monodromy.evaluate(&r.transport)?, degree)?;
        let image = &action * &bases[&r.face];
        let matrix = solve_integer(&bases[&r.coface], &image).ok_or_else(|| SpectralError::SubcomplexViolation {
            coface: r.coface.clone(),
            face: r.face.clone(),
            degree: degree.label(),
        })?;
        blocks.push(TransportBlock {
            coface: r.coface.clone(),
            face: r.face.clone(),
            coefficient: r.coefficient,
            matrix,
        });
    }
    Ok(CoefficientSystem {
        degree,
        bases,
        blocks,
        base_cells: fib.base.cells.iter().map(|c| (c.id.clone(), c.dim)).collect(),
    })
}

/// Matrix of `δ^p : C^p -> C^(p+1)` in the cell-ordered bases of the coefficient subgroups.
pub fn twisted_coboundary(cs: &CoefficientSystem, p: usize) -> IntegerMatrix {
    let rows = cs.offsets(p + 1);
    let cols = cs.offsets(p);
    let mut m = IntegerMatrix::zeros(cs.cochain_rank(p + 1), cs.cochain_rank(p));
    for b in &cs.blocks {
        let (Some(&i0), Some(&j0)) = (rows.get(b.coface.as_str()), cols.get(b.face.as_str())) else {
            continue;
        };
        let c = num_bigint::BigInt::from(b.coefficient);
        for i in 0..b.matrix.rows() {
            for j in 0..b.matrix.cols() {
                let v = m.get(i0 + i, j0 + j) + &c * b.matrix.get(i, j);
                m.set(i0 + i, j0 + j, v);
            }
        }
    }
    m
}

/// Cohomology of the base with coefficients in `cs`, degrees `0..=top`.
pub fn twisted_cohomology(cs: &CoefficientSystem, top: usize) -> Vec<AbelianGroup> {
    (0..=top)
        .map(|p| {
            let incoming = if p == 0 {
                IntegerMatrix::zeros(cs.cochain_rank(0), 0)
            } else {
                twisted_coboundary(cs, p - 1)
            };
            subquotient(&incoming, &twisted_coboundary(cs, p), cs.cochain_rank(p))
        })
        .collect()
}

/// An `E_2` page. For K-theory `q` is the parity (0 even, 1 odd).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Page {
    pub base_dim: usize,
    pub periodic: bool,
    pub table: BTreeMap<(usize, usize), AbelianGroup>,
    /// Ranks of the `E_1` terms, the cochain groups.
    pub e1_ranks: BTreeMap<(usize, usize), usize>,
    pub degeneracy_certified: bool,
    pub degeneracy_reason: String,
}

impl E2Page {
    pub fn get(&self, p: usize, q: usize) -> &AbelianGroup {
        &self.table[&(p, q)]
    }

    pub fn rows(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = self.table.keys().map(|&(_, q)| q).collect();
        qs.dedup();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    fn alternating(&self, rank: impl Fn(&(usize, usize)) -> usize) -> i64 {
        self.table
            .keys()
            .map(|k| {
                let sign = if (k.0 + k.1) % 2 == 0 { 1 } else { -1 };
                sign * rank(k) as i64
            })
            .sum()
    }

    /// `Σ (-1)^(p+q) rank E_1^{p,q}`.
    pub fn e1_euler_sum(&self) -> i64 {
        self.alternating(|k| self.e1_ranks[k])
    }

    /// `Σ (-1)^(p+q) rank E_2^{p,q}`.
    pub fn e2_euler_sum(&self) -> i64 {
        self.alternating(|k| self.table[k].free_rank)
    }
}

fn build_page(fib: &Fibration, degrees: &[(usize, FiberDegree)], periodic: bool) -> Result<E2Page, SpectralError> {
    let base_dim = fib.base.n;
    let mut table = BTreeMap::new();
    let mut e1_ranks = BTreeMap::new();
    for &(q, degree) in degrees {
        let cs = coefficient_system(fib, degree)?;
        for (p, g) in twisted_cohomology(&cs, base_dim).into_iter().enumerate() {
            table.insert((p, q), g);
            e1_ranks.insert((p, q), cs.cochain_rank(p));
        }
    }
    let mut page = E2Page {
        base_dim,
        periodic,
        table,
        e1_ranks,
        degeneracy_certified: false,
        degeneracy_reason: String::new(),
    };
    certify(&mut page, fib.base);
    Ok(page)
}

/// Surface base with boundary and every vertex on it.
fn corners_cover_vertices(b: &BaseComplex) -> bool {
    b.n == 2
        && b.cells.iter().any(|c| c.stratum < b.n)
        && b.cells.iter().filter(|c| c.dim == 0).all(|c| c.stratum < b.n)
}

fn certify(page: &mut E2Page, b: &BaseComplex) {
    let zero = |p: usize, q: usize| page.table.get(&(p, q)).is_none_or(AbelianGroup::is_zero);
    let n = page.base_dim;
    let modulus = if page.periodic { 2 } else { usize::MAX };
    let mut obstruction = None;
    'outer: for (&(p, q), g) in &page.table {
        if g.is_zero() {
            continue;
        }
        for r in 2..=n {
            if p + r > n {
                break;
            }
            // d_r : E^{p,q} -> E^{p+r, q-r+1}
            let target_q = if page.periodic {
                (q + 1 + modulus * r - r) % modulus
            } else if q + 1 >= r {
                q + 1 - r
            } else {
                continue;
            };
            if !zero(p + r, target_q) {
                obstruction = Some(format!("d_{r} from E^{{{p},{q}}} to E^{{{},{target_q}}} may be nonzero", p + r));
                break 'outer;
            }
        }
    }
    let surface_criterion = !page.periodic && corners_cover_vertices(b) && zero(2, 0) && zero(0, 2);
    match obstruction {
        None if surface_criterion => {
            page.degeneracy_certified = true;
            page.degeneracy_reason =
                "surface base with boundary containing every vertex; E2^{2,0} = E2^{0,2} = 0".to_string();
        }
        None => {
            page.degeneracy_certified = true;
            page.degeneracy_reason = "every higher differential has zero source or target".to_string();
        }
        Some(why) => {
            page.degeneracy_certified = false;
            page.degeneracy_reason = why;
        }
    }
}

/// `E_2^{p,q} = H^p(B; H^q_X)` for `0 ≤ p, q ≤ n`.
pub fn e2_page(fib: &Fibration) -> Result<E2Page, SpectralError> {
    let degrees: Vec<_> = (0..=fib.base.n).map(|q| (q, FiberDegree::Cohomology(q))).collect();
    build_page(fib, &degrees, false)
}

/// `E_2^{p,q} = H^p(B; K^q_X)`, rows indexed by parity.
pub fn k_e2_page(fib: &Fibration) -> Result<E2Page, SpectralError> {
    if fib.base.n != 2 {
        return Err(SpectralError::UnsupportedRank(fib.base.n));
    }
    build_page(fib, &[(0, FiberDegree::KEven), (1, FiberDegree::KOdd)], true)
}

/// `E_∞^{p,q}` at position `(p, q)`.
pub type GradedPiece = ((usize, usize), AbelianGroup);

/// Groups of the abutment, by total degree (or parity, for K-theory).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedGroups {
    /// Graded pieces `E_∞^{p,q}` contributing to each total degree.
    pub pieces: BTreeMap<usize, Vec<GradedPiece>>,
    /// Direct sum of the pieces. This is the group itself only when `assembled`.
    pub groups: BTreeMap<usize, AbelianGroup>,
    pub assembled: bool,
}

impl GradedGroups {
    pub fn group(&self, k: usize) -> Option<&AbelianGroup> {
        if self.assembled {
            self.groups.get(&k)
        } else {
            None
        }
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.groups.values().map(|g| g.free_rank).collect()
    }
}

fn assemble(page: &E2Page, degree_count: usize, reduce: impl Fn(usize) -> usize) -> Result<GradedGroups, SpectralError> {
    if !page.degeneracy_certified {
        return Err(SpectralError::DegeneracyNotCertified(page.degeneracy_reason.clone()));
    }
    let mut pieces: BTreeMap<usize, Vec<_>> = (0..degree_count).map(|k| (k, Vec::new())).collect();
    for (&(p, q), g) in &page.table {
        pieces.entry(reduce(p + q)).or_default().push(((p, q), g.clone()));
    }
    let groups = pieces
        .iter()
        .map(|(&k, ps)| (k, ps.iter().fold(AbelianGroup::zero(), |acc, (_, g)| acc.direct_sum(g))))
        .collect();
    let assembled = page.table.values().all(AbelianGroup::is_free);
    Ok(GradedGroups {
        pieces,
        groups,
        assembled,
    })
}

/// `H^*(X; Z)`, degrees `0..=2n`.
pub fn total_cohomology(fib: &Fibration) -> Result<GradedGroups, SpectralError> {
    let page = e2_page(fib)?;
    assemble(&page, 2 * fib.base.n + 1, |k| k)
}

/// `K^0(X)` and `K^1(X)`.
pub fn k_groups(fib: &Fibration) -> Result<GradedGroups, SpectralError> {
    let page = k_e2_page(fib)?;
    assemble(&page, 2, |k| k % 2)
}

/// `χ(X) = |S^(0)B|`: only the fixed points contribute.
pub fn euler_characteristic(b: &BaseComplex) -> i64 {
    stratum_census(b).corner_count() as i64
}
