#![allow(dead_code, clippy::needless_range_loop)]

use k3bn::{DivClass, GramLattice, QuasiPolarization};
use rand::Rng;

/// `U ⊕` up to two `(-2)`-classes meeting `e`, `f` and each other in
/// small nonnegative numbers; `e² ∈ {0, 2}`.
pub fn lattice_with_roots(rng: &mut impl Rng) -> (GramLattice, Vec<DivClass>) {
    let k = rng.gen_range(0..=2usize);
    let rank = 2 + k;
    let mut g = vec![vec![0i64; rank]; rank];
    g[0][0] = 2 * rng.gen_range(0..=1);
    g[0][1] = 1;
    g[1][0] = 1;
    for j in 2..rank {
        g[j][j] = -2;
        let (p, q) = (rng.gen_range(0..=2), rng.gen_range(0..=1));
        g[0][j] = p;
        g[j][0] = p;
        g[1][j] = q;
        g[j][1] = q;
    }
    if rank == 4 {
        let c = rng.gen_range(0..=1);
        g[2][3] = c;
        g[3][2] = c;
    }
    let roots = (2..rank).map(|j| DivClass::basis(rank, j)).collect();
    (GramLattice::new(g).expect("valid by construction"), roots)
}

pub struct ReductionInput {
    pub lattice: GramLattice,
    pub h: QuasiPolarization,
    pub parts: Vec<DivClass>,
    pub delta: Vec<DivClass>,
}

/// Parts with positive coordinates on `e, f` plus a random multiset of the
/// lattice roots; `H` is their sum. Returns `None` when `H` is not big.
pub fn reduction_input(rng: &mut impl Rng) -> Option<ReductionInput> {
    let (lattice, roots) = lattice_with_roots(rng);
    let rank = lattice.rank();
    let parts: Vec<DivClass> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let mut c = vec![0i64; rank];
            c[0] = rng.gen_range(0..=2);
            c[1] = rng.gen_range(0..=2);
            if c[0] + c[1] == 0 {
                c[1] = 1;
            }
            for v in c.iter_mut().skip(2) {
                *v = rng.gen_range(0..=1);
            }
            DivClass::new(c)
        })
        .collect();
    let mut delta = Vec::new();
    for r in &roots {
        for _ in 0..rng.gen_range(0..=2) {
            delta.push(r.clone());
        }
    }
    let total = &DivClass::sum(rank, &parts) + &DivClass::sum(rank, &delta);
    let h = QuasiPolarization::new(&lattice, total).ok()?;
    Some(ReductionInput { lattice, h, parts, delta })
}

pub fn random_even(rng: &mut impl Rng, bound: i64) -> i64 {
    2 * rng.gen_range(-bound / 2..=bound / 2)
}
