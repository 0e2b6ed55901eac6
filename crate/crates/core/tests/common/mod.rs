#![allow(dead_code)]

use std::collections::BTreeMap;

use loctorus::base_complex::{build_surface_base, BaseComplex};
use loctorus::torus_data::{CharacteristicData, MonodromyData};
use loctorus::{int_matrix, IntegerMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn monodromy(entries: &[(&str, IntegerMatrix)]) -> MonodromyData {
    MonodromyData {
        n: 2,
        images: entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>(),
        relations: Vec::new(),
    }
}

/// The once-punctured torus with one corner and a single facet.
pub fn worked_example() -> (BaseComplex, MonodromyData, CharacteristicData) {
    let b = build_surface_base(1, &[1]);
    let m = monodromy(&[
        ("alpha1", int_matrix(&[[1, 0], [-1, 1]])),
        ("beta1", int_matrix(&[[1, -1], [0, 1]])),
        ("gamma1", int_matrix(&[[3, 1], [-1, 0]])),
    ]);
    (b, m, CharacteristicData::from_i64(&[("F1_1", &[0, 1])]))
}

/// Polygon with the given facet vectors, trivial monodromy.
pub fn polygon(vectors: &[[i64; 2]]) -> (BaseComplex, MonodromyData, CharacteristicData) {
    let b = build_surface_base(0, &[vectors.len()]);
    let m = MonodromyData::trivial(2, &["gamma1"]);
    let names: Vec<String> = (1..=vectors.len()).map(|k| format!("F1_{k}")).collect();
    let entries: Vec<(&str, &[i64])> = names.iter().map(String::as_str).zip(vectors.iter().map(|v| &v[..])).collect();
    (b, m, CharacteristicData::from_i64(&entries))
}

pub fn pow(p: &IntegerMatrix, e: i32) -> IntegerMatrix {
    let base = if e < 0 {
        loctorus::lattice::inverse_unimodular(p).unwrap()
    } else {
        p.clone()
    };
    (0..e.unsigned_abs()).fold(IntegerMatrix::identity(2), |acc, _| &acc * &base)
}

pub fn sl2_generators() -> [IntegerMatrix; 4] {
    [
        int_matrix(&[[0, -1], [1, 0]]),
        int_matrix(&[[1, 1], [0, 1]]),
        int_matrix(&[[0, 1], [-1, 0]]),
        int_matrix(&[[1, -1], [0, 1]]),
    ]
}

pub fn word_product(word: &[usize]) -> IntegerMatrix {
    let gens = sl2_generators();
    word.iter().fold(IntegerMatrix::identity(2), |acc, &i| &acc * &gens[i])
}

/// Random element of `SL(2, Z)` as a word of length at most 8 in `S^±1, T^±1`.
pub fn sl2_word() -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec(0usize..4, 0..=8).prop_map(|w| word_product(&w))
}

/// Random element of `GL(2, Z)`.
pub fn gl2() -> impl Strategy<Value = IntegerMatrix> {
    (sl2_word(), any::<bool>()).prop_map(|(g, flip)| if flip { &g * &int_matrix(&[[0, 1], [1, 0]]) } else { g })
}

/// Random unimodular `n x n` matrix as a product of elementary moves.
pub fn unimodular(n: usize) -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3, any::<bool>()), 0..12).prop_map(move |ops| {
        let mut g = IntegerMatrix::identity(n);
        for (i, j, k, neg) in ops {
            let mut e = IntegerMatrix::identity(n);
            if i != j {
                e.set(i, j, BigInt::from(k));
            } else if neg {
                e.set(i, i, BigInt::from(-1));
            }
            g = &g * &e;
        }
        g
    })
}

pub fn matrix(max: usize, bound: i64) -> impl Strategy<Value = IntegerMatrix> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c)
            .prop_map(move |v| IntegerMatrix::from_fn(r, c, |i, j| BigInt::from(v[i * c + j])))
    })
}

/// Genus-one handle with commuting monodromy `(P^a, P^b)`, trivial boundary
/// monodromy and `k` corners whose facet vectors cycle through
/// `G e1, G e2, G (e1 + e2)`.
pub fn handle_fixture(a: i32, b: i32, k: usize, g: &IntegerMatrix) -> (BaseComplex, MonodromyData, CharacteristicData) {
    let p = &g.clone() * &(&int_matrix(&[[2, 1], [1, 1]]) * &loctorus::lattice::inverse_unimodular(g).unwrap());
    let base = build_surface_base(1, &[k]);
    let m = monodromy(&[
        ("alpha1", pow(&p, a)),
        ("beta1", pow(&p, b)),
        ("gamma1", IntegerMatrix::identity(2)),
    ]);
    let cycle = [[1i64, 0], [0, 1], [1, 1]];
    let facet_vectors = (1..=k)
        .map(|i| {
            let v = loctorus::int_vector(&cycle[(i - 1) % 3]);
            (format!("F1_{i}"), g.mul_vec(&v))
        })
        .collect();
    (base, m, CharacteristicData { facet_vectors })
}

/// Corner counts for which the three-periodic pattern closes up unimodularly.
pub fn closing_corner_count() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 3, 5, 6])
}

/// Ranks over `Q`, by fraction-free elimination in `i128`.
pub fn rational_rank(m: &IntegerMatrix) -> usize {
    let mut a: Vec<Vec<i128>> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| i128::try_from(x).unwrap()).collect())
        .collect();
    let (rows, cols) = m.shape();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let (x, y) = (a[rank][c], a[r][c]);
                let pivot = a[rank].clone();
                for (dst, src) in a[r].iter_mut().zip(&pivot) {
                    *dst = *dst * x - src * y;
                }
                let g = a[r].iter().fold(0i128, |g, &v| num_integer::gcd(g, v));
                if g > 1 {
                    a[r].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}
