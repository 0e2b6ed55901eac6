//! Signature and fundamental group of four-dimensional total spaces.
//!
//! The signature splits along a collar of the boundary: the interior part is
//! a sum of Meyer cocycle values over a pants decomposition of the base, the
//! collar part is the intersection form of the necklace of 2-spheres sitting
//! over the boundary facets.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::base_complex::{stratum_census, BaseComplex, BaseComplexError, Word};
use crate::lattice::{inverse_unimodular, kernel_lattice, signature_of_symmetric, smith_normal_form, LatticeError};
use crate::torus_data::{MonodromyData, TorusDataError};
use crate::{AbelianGroup, IntegerMatrix, IntegerVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("matrix {0} is not in SL(2, Z)")]
    NotSymplectic(String),
    #[error("Meyer form is not symmetric: {0}")]
    AsymmetricGram(String),
    #[error("facet {facet}: {detail}")]
    NormalizationViolation { facet: usize, detail: String },
    #[error("necklace needs at least two facets, got {0}; blow up the corner first")]
    KTooSmall(usize),
    #[error("vectors must have length 2")]
    BadVector,
    #[error("signature requires an oriented base")]
    OrientationMissing,
    #[error("automatic pants decomposition needs exactly one boundary component, got {0}")]
    AutoTrinionsUnsupported(usize),
    #[error(transparent)]
    Base(#[from] BaseComplexError),
    #[error(transparent)]
    Torus(#[from] TorusDataError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn check_sl2(c: &IntegerMatrix) -> Result<(), SignatureError> {
    if c.shape() != (2, 2) || !c.determinant()?.is_one() {
        return Err(SignatureError::NotSymplectic(c.to_string()));
    }
    Ok(())
}

fn det2(a: &[BigInt], b: &[BigInt]) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Meyer's `τ₁(C₁, C₂)`: the signature of `(x, y), (x', y') ↦ (x+y)ᵀ J (I - C₂) y'`
/// on `{(x, y) : (C₁⁻¹ - I) x + (C₂ - I) y = 0}`.
pub fn meyer_tau1(c1: &IntegerMatrix, c2: &IntegerMatrix) -> Result<i64, SignatureError> {
    check_sl2(c1)?;
    check_sl2(c2)?;
    let id = IntegerMatrix::identity(2);
    let constraint = (&inverse_unimodular(c1)? - &id).hstack(&(c2 - &id))?;
    let basis = kernel_lattice(&constraint).basis().clone();
    let j = crate::int_matrix(&[[0, 1], [-1, 0]]);
    let twist = &j * &(&id - c2);
    let k = basis.cols();
    let cols = basis.columns();
    let gram = IntegerMatrix::from_fn(k, k, |a, b| {
        let (x, y) = (&cols[a][..2], &cols[a][2..]);
        let sum: Vec<BigInt> = x.iter().zip(y).map(|(p, q)| p + q).collect();
        let image = twist.mul_vec(&cols[b][2..]);
        sum.iter().zip(&image).map(|(p, q)| p * q).sum()
    });
    if !gram.is_symmetric() {
        return Err(SignatureError::AsymmetricGram(gram.to_string()));
    }
    Ok(signature_of_symmetric(&gram.to_rational())?)
}

/// Monodromies around two of the three boundary loops of a pair of pants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrinionPair {
    pub c1: IntegerMatrix,
    pub c2: IntegerMatrix,
}

pub fn interior_signature(pairs: &[TrinionPair]) -> Result<i64, SignatureError> {
    pairs.iter().map(|t| meyer_tau1(&t.c1, &t.c2)).sum()
}

/// One pants decomposition of a genus-`g` surface with one boundary circle.
///
/// Each handle is cut along `alpha_i`, giving the pair `(A_i⁻¹, [A_i, B_i])`;
/// the handles are then chained by `(c_1⋯c_i, c_{i+1})` with `c_i = [A_i, B_i]`.
/// That is `2g - 1` pairs for `g ≥ 1` and none for `g = 0`.
pub fn auto_trinions(b: &BaseComplex, m: &MonodromyData, genus: usize) -> Result<Vec<TrinionPair>, SignatureError> {
    if b.boundary_components.len() != 1 {
        return Err(SignatureError::AutoTrinionsUnsupported(b.boundary_components.len()));
    }
    let mut pairs = Vec::new();
    let mut commutators = Vec::new();
    for i in 1..=genus {
        let (a, bb) = (format!("alpha{i}"), format!("beta{i}"));
        let c = m.evaluate(&Word::parse(&[a.clone(), bb.clone(), format!("-{a}"), format!("-{bb}")])?)?;
        let a_inv = m.evaluate(&Word::parse(&[format!("-{a}")])?)?;
        pairs.push(TrinionPair { c1: a_inv, c2: c.clone() });
        commutators.push(c);
    }
    let mut acc = commutators.first().cloned();
    for c in commutators.iter().skip(1) {
        let prefix = acc.take().expect("set above");
        pairs.push(TrinionPair {
            c1: prefix.clone(),
            c2: c.clone(),
        });
        acc = Some(&prefix * c);
    }
    Ok(pairs)
}

/// A boundary facet with its own characteristic vector `v` and those of its
/// neighbours, all in one local frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecklaceFacet {
    pub prev: IntegerVector,
    pub v: IntegerVector,
    pub next: IntegerVector,
}

impl NecklaceFacet {
    pub fn from_i64(prev: [i64; 2], v: [i64; 2], next: [i64; 2]) -> Self {
        NecklaceFacet {
            prev: crate::int_vector(&prev),
            v: crate::int_vector(&v),
            next: crate::int_vector(&next),
        }
    }

    /// Self-intersection of the sphere over this facet: `-det(prev, next)`.
    pub fn self_intersection(&self) -> BigInt {
        -det2(&self.prev, &self.next)
    }
}

/// Cyclic list of facets of one boundary component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryFacetData {
    pub facets: Vec<NecklaceFacet>,
}

/// Intersection form of a chain of `k ≥ 2` spheres with the given self-intersections.
pub fn necklace_from_self_intersections(diagonal: &[BigInt]) -> Result<IntegerMatrix, SignatureError> {
    let k = diagonal.len();
    if k < 2 {
        return Err(SignatureError::KTooSmall(k));
    }
    let adjacent = BigInt::from(if k == 2 { 2 } else { 1 });
    Ok(IntegerMatrix::from_fn(k, k, |i, j| {
        if i == j {
            diagonal[i].clone()
        } else if (i + 1) % k == j || (j + 1) % k == i {
            adjacent.clone()
        } else {
            BigInt::from(0)
        }
    }))
}

/// Intersection form of the necklace over one boundary component, after
/// checking `det(prev, v) = det(v, next) = 1` for every facet.
pub fn necklace_matrix(bd: &BoundaryFacetData) -> Result<IntegerMatrix, SignatureError> {
    let k = bd.facets.len();
    if k < 2 {
        return Err(SignatureError::KTooSmall(k));
    }
    let mut diagonal = Vec::with_capacity(k);
    for (i, f) in bd.facets.iter().enumerate() {
        if [&f.prev, &f.v, &f.next].iter().any(|v| v.len() != 2) {
            return Err(SignatureError::BadVector);
        }
        for (name, d) in [("det(prev, v)", det2(&f.prev, &f.v)), ("det(v, next)", det2(&f.v, &f.next))] {
            if !d.is_one() {
                return Err(SignatureError::NormalizationViolation {
                    facet: i,
                    detail: format!("{name} = {d}, expected 1"),
                });
            }
        }
        diagonal.push(f.self_intersection());
    }
    necklace_from_self_intersections(&diagonal)
}

/// A boundary component with a single corner, where the two characteristic
/// lines `v` and `other` meet (`det(v, other) = 1`), and the monodromy around
/// the component in the corner's frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleCornerData {
    pub v: IntegerVector,
    pub other: IntegerVector,
    pub monodromy: IntegerMatrix,
}

/// The two-facet data obtained by blowing up the single corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowUp {
    /// Exceptional facet first, surviving facet second.
    pub data: BoundaryFacetData,
    /// Neighbours `u₁ = M e` and `u₂ = e` of the surviving facet, `e = v + other`.
    pub u1: IntegerVector,
    pub u2: IntegerVector,
    pub self_intersections: Vec<BigInt>,
    /// Signature change undone by the blow-up: always `+1`.
    pub correction: i64,
}

pub fn blow_up_corner(c: &SingleCornerData) -> Result<BlowUp, SignatureError> {
    if c.v.len() != 2 || c.other.len() != 2 {
        return Err(SignatureError::BadVector);
    }
    check_sl2(&c.monodromy)?;
    let d = det2(&c.v, &c.other);
    if !d.is_one() {
        return Err(SignatureError::NormalizationViolation {
            facet: 0,
            detail: format!("det(v, other) = {d}, expected 1"),
        });
    }
    let e: IntegerVector = c.v.iter().zip(&c.other).map(|(a, b)| a + b).collect();
    let u1 = c.monodromy.mul_vec(&e);
    let exceptional = NecklaceFacet {
        prev: c.v.clone(),
        v: e.clone(),
        next: c.other.clone(),
    };
    let surviving = NecklaceFacet {
        prev: u1.clone(),
        v: c.v.clone(),
        next: e.clone(),
    };
    let self_intersections = vec![exceptional.self_intersection(), surviving.self_intersection()];
    Ok(BlowUp {
        data: BoundaryFacetData {
            facets: vec![exceptional, surviving],
        },
        u1,
        u2: e,
        self_intersections,
        correction: 1,
    })
}

/// How one boundary component contributes to the signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryContribution {
    Necklace(BoundaryFacetData),
    Corner(SingleCornerData),
    /// No corners: nothing is computed and the zero contribution is flagged.
    Smooth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSignature {
    pub kind: &'static str,
    pub matrix: Option<IntegerMatrix>,
    pub signature: i64,
    pub correction: i64,
    /// False for smooth components, whose zero contribution is assumed.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureBreakdown {
    pub tau_values: Vec<i64>,
    pub sigma_interior: i64,
    pub components: Vec<ComponentSignature>,
    pub sigma_boundary: i64,
    pub blowup_correction: i64,
    pub sigma_total: i64,
    /// More than one boundary component: contributions summed componentwise.
    pub multi_component: bool,
}

pub fn total_signature(
    oriented: bool,
    pairs: &[TrinionPair],
    boundary: &[BoundaryContribution],
) -> Result<SignatureBreakdown, SignatureError> {
    if !oriented {
        return Err(SignatureError::OrientationMissing);
    }
    let tau_values = pairs
        .iter()
        .map(|t| meyer_tau1(&t.c1, &t.c2))
        .collect::<Result<Vec<_>, _>>()?;
    let sigma_interior = tau_values.iter().sum();
    let mut components = Vec::new();
    for part in boundary {
        let comp = match part {
            BoundaryContribution::Necklace(bd) => {
                let m = necklace_matrix(bd)?;
                ComponentSignature {
                    kind: "necklace",
                    signature: signature_of_symmetric(&m.to_rational())?,
                    matrix: Some(m),
                    correction: 0,
                    verified: true,
                }
            }
            BoundaryContribution::Corner(c) => {
                let blow = blow_up_corner(c)?;
                let m = necklace_from_self_intersections(&blow.self_intersections)?;
                ComponentSignature {
                    kind: "blown-up corner",
                    signature: signature_of_symmetric(&m.to_rational())?,
                    matrix: Some(m),
                    correction: blow.correction,
                    verified: true,
                }
            }
            BoundaryContribution::Smooth => ComponentSignature {
                kind: "smooth",
                matrix: None,
                signature: 0,
                correction: 0,
                verified: false,
            },
        };
        components.push(comp);
    }
    let sigma_boundary = components.iter().map(|c| c.signature + c.correction).sum();
    let blowup_correction = components.iter().map(|c| c.correction).sum();
    Ok(SignatureBreakdown {
        tau_values,
        sigma_interior,
        sigma_boundary,
        blowup_correction,
        sigma_total: sigma_interior + sigma_boundary,
        multi_component: components.len() > 1,
        components,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pi1Status {
    /// `π₁(X) ≅ π₁(B)` through the orbit map.
    Isomorphic,
    /// Only the split exact sequence of the orbit map is available.
    ExactSequenceOnly(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Report {
    pub status: Pi1Status,
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    /// Rank of `π₁(B)` when it is known to be free.
    pub free_rank: Option<usize>,
    /// Abelianisation of the presentation.
    pub base_h1: AbelianGroup,
}

impl Pi1Report {
    /// `H₁` of the presentation agrees with the claimed free rank.
    pub fn h1_consistent(&self) -> Option<bool> {
        self.free_rank.map(|r| self.base_h1 == AbelianGroup::free(r))
    }
}

impl fmt::Display for Pi1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.status, self.free_rank) {
            (Pi1Status::Isomorphic, Some(0)) => write!(f, "pi1(X) = pi1(B) = 1"),
            (Pi1Status::Isomorphic, Some(r)) => write!(f, "pi1(X) = pi1(B), free of rank {r}"),
            (Pi1Status::Isomorphic, None) => write!(f, "pi1(X) = pi1(B)"),
            (Pi1Status::ExactSequenceOnly(why), _) => write!(
                f,
                "isomorphism not asserted ({why}); 1 -> pi1(fiber)/K -> pi1(X) -> pi1(B) -> 1 reported"
            ),
        }
    }
}

fn abelianization(b: &BaseComplex) -> AbelianGroup {
    let g = b.generator_symbols.len();
    let rows: Vec<Vec<BigInt>> = b
        .relators
        .iter()
        .map(|w| {
            let mut row = vec![BigInt::from(0); g];
            for l in w.letters() {
                if let Some(i) = b.generator_symbols.iter().position(|s| *s == l.symbol) {
                    row[i] += if l.inverse { -1 } else { 1 };
                }
            }
            row
        })
        .collect();
    let m = IntegerMatrix::from_rows_with_width(rows, g).expect("rows have width g");
    let snf = smith_normal_form(&m);
    AbelianGroup::new(g - snf.rank(), snf.torsion())
}

pub fn fundamental_group_report(b: &BaseComplex, section_exists: bool) -> Pi1Report {
    let corners = stratum_census(b).corner_count();
    let surface_with_boundary = b.n == 2 && b.cells.iter().any(|c| c.stratum < b.n);
    let status = if !section_exists {
        Pi1Status::ExactSequenceOnly("no section declared".to_string())
    } else if corners == 0 {
        Pi1Status::ExactSequenceOnly("no fixed points".to_string())
    } else {
        Pi1Status::Isomorphic
    };
    let chi = b.cellular_euler_characteristic();
    let free_rank = (surface_with_boundary && chi <= 1).then(|| (1 - chi) as usize);
    Pi1Report {
        status,
        generators: b.generator_symbols.clone(),
        relators: b.relators.clone(),
        free_rank,
        base_h1: abelianization(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_complex::build_surface_base;
    use crate::{int_matrix, int_vector};

    fn big(v: &[i64]) -> Vec<BigInt> {
        int_vector(v)
    }

    #[test]
    fn meyer_values_from_the_oracle() {
        let a = int_matrix(&[[1, 0], [-1, 1]]);
        let c = int_matrix(&[[3, 1], [-1, 0]]);
        let inv = |m: &IntegerMatrix| inverse_unimodular(m).unwrap();
        assert_eq!(meyer_tau1(&inv(&a), &inv(&c)).unwrap(), 0);
        assert_eq!(meyer_tau1(&c, &inv(&c)).unwrap(), 0);
        assert_eq!(meyer_tau1(&c, &c).unwrap(), 0);
        let s = int_matrix(&[[0, -1], [1, 0]]);
        let t = int_matrix(&[[1, 1], [0, 1]]);
        assert_eq!(meyer_tau1(&s, &s).unwrap(), -2);
        assert_eq!(meyer_tau1(&t, &t).unwrap(), 1);
        assert_eq!(meyer_tau1(&s, &t).unwrap(), 1);
        assert_eq!(meyer_tau1(&t, &s).unwrap(), 1);
        assert_eq!(meyer_tau1(&inv(&t), &t).unwrap(), 0);
        assert_eq!(meyer_tau1(&s, &inv(&s)).unwrap(), 0);
        assert_eq!(meyer_tau1(&IntegerMatrix::identity(2), &c).unwrap(), 0);
    }

    #[test]
    fn meyer_rejects_non_sl2() {
        let r = int_matrix(&[[0, 1], [1, 0]]);
        assert!(matches!(
            meyer_tau1(&r, &IntegerMatrix::identity(2)),
            Err(SignatureError::NotSymplectic(_))
        ));
    }

    #[test]
    fn example_blow_up() {
        let corner = SingleCornerData {
            v: big(&[1, 0]),
            other: big(&[0, 1]),
            monodromy: int_matrix(&[[3, 1], [-1, 0]]),
        };
        let blow = blow_up_corner(&corner).unwrap();
        assert_eq!(blow.u1, big(&[4, -1]));
        assert_eq!(blow.u2, big(&[1, 1]));
        let m = necklace_matrix(&blow.data).unwrap();
        assert_eq!(m, int_matrix(&[[-1, 2], [2, -5]]));
        let b = total_signature(true, &[], &[BoundaryContribution::Corner(corner)]).unwrap();
        assert_eq!(b.components[0].signature, -2);
        assert_eq!(b.sigma_boundary, -1);
        assert_eq!(b.blowup_correction, 1);
    }

    #[test]
    fn identity_monodromy_blow_up() {
        let corner = SingleCornerData {
            v: big(&[1, 0]),
            other: big(&[0, 1]),
            monodromy: IntegerMatrix::identity(2),
        };
        let blow = blow_up_corner(&corner).unwrap();
        assert_eq!((blow.u1.clone(), blow.u2.clone()), (big(&[1, 1]), big(&[1, 1])));
        let m = necklace_from_self_intersections(&blow.self_intersections).unwrap();
        assert_eq!(m, int_matrix(&[[-1, 2], [2, 0]]));
        assert!(matches!(
            necklace_matrix(&blow.data),
            Err(SignatureError::NormalizationViolation { facet: 1, .. })
        ));
        let b = total_signature(true, &[], &[BoundaryContribution::Corner(corner)]).unwrap();
        assert_eq!((b.components[0].signature, b.sigma_total), (0, 1));
    }

    #[test]
    fn facet_with_twisted_neighbours() {
        for m in -3..=3 {
            let f = NecklaceFacet::from_i64([1, 0], [0, 1], [-1, m]);
            assert_eq!(f.self_intersection(), BigInt::from(-m));
        }
    }

    #[test]
    fn square_necklace_is_a_four_cycle() {
        let e = [[1, 0], [0, 1], [-1, 0], [0, -1]];
        let facets = (0..4)
            .map(|i| NecklaceFacet::from_i64(e[(i + 3) % 4], e[i], e[(i + 1) % 4]))
            .collect();
        let m = necklace_matrix(&BoundaryFacetData { facets }).unwrap();
        assert_eq!(
            m,
            int_matrix(&[[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]])
        );
        assert_eq!(signature_of_symmetric(&m.to_rational()).unwrap(), 0);
    }

    #[test]
    fn normalization_and_size_errors() {
        let bad = BoundaryFacetData {
            facets: vec![
                NecklaceFacet::from_i64([0, 1], [1, 0], [0, 1]),
                NecklaceFacet::from_i64([1, 0], [0, 1], [1, 0]),
            ],
        };
        assert!(matches!(necklace_matrix(&bad), Err(SignatureError::NormalizationViolation { .. })));
        let one = BoundaryFacetData {
            facets: vec![NecklaceFacet::from_i64([1, 0], [0, 1], [-1, 0])],
        };
        assert_eq!(necklace_matrix(&one), Err(SignatureError::KTooSmall(1)));
        assert_eq!(total_signature(false, &[], &[]), Err(SignatureError::OrientationMissing));
    }

    #[test]
    fn example_trinions_and_total() {
        let b = build_surface_base(1, &[1]);
        let m = MonodromyData {
            n: 2,
            images: [
                ("alpha1", int_matrix(&[[1, 0], [-1, 1]])),
                ("beta1", int_matrix(&[[1, -1], [0, 1]])),
                ("gamma1", int_matrix(&[[3, 1], [-1, 0]])),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
            relations: vec![],
        };
        let pairs = auto_trinions(&b, &m, 1).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].c1, int_matrix(&[[1, 0], [1, 1]]));
        assert_eq!(pairs[0].c2, int_matrix(&[[0, -1], [1, 3]]));
        let corner = SingleCornerData {
            v: big(&[1, 0]),
            other: big(&[0, 1]),
            monodromy: m.images["gamma1"].clone(),
        };
        let s = total_signature(true, &pairs, &[BoundaryContribution::Corner(corner)]).unwrap();
        assert_eq!((s.sigma_interior, s.sigma_boundary, s.sigma_total), (0, -1, -1));
        assert!(!s.multi_component);
    }

    #[test]
    fn pi1_reports() {
        let ex = fundamental_group_report(&build_surface_base(1, &[1]), true);
        assert_eq!(ex.status, Pi1Status::Isomorphic);
        assert_eq!(ex.free_rank, Some(2));
        assert_eq!(ex.h1_consistent(), Some(true));

        let tri = fundamental_group_report(&build_surface_base(0, &[3]), true);
        assert_eq!(tri.free_rank, Some(0));
        assert_eq!(tri.h1_consistent(), Some(true));
        assert_eq!(tri.to_string(), "pi1(X) = pi1(B) = 1");

        let closed = fundamental_group_report(&build_surface_base(2, &[]), true);
        assert!(matches!(closed.status, Pi1Status::ExactSequenceOnly(_)));
        assert_eq!(closed.base_h1, AbelianGroup::free(4));

        let no_section = fundamental_group_report(&build_surface_base(1, &[1]), false);
        assert!(matches!(no_section.status, Pi1Status::ExactSequenceOnly(_)));
    }
}
