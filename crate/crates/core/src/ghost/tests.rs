use std::sync::Arc;

use super::*;
use crate::ff::{Field, Matrix, RowEchelon};
use crate::group::{GroupData, GroupPreset};
use crate::hom::hom_basis;

fn cat(g: &str, q: u64) -> StableCategory {
    let group = Arc::new(GroupData::from_preset(&g.parse::<GroupPreset>().unwrap()).unwrap());
    StableCategory::new(&group, &Field::of_order(q).unwrap()).unwrap()
}

fn jordan(c: &StableCategory, d: usize) -> Module {
    let f = c.field();
    let x = Matrix::from_fn(f, d, d, |r, col| u8::from(r == col || r + 1 == col));
    Module::new(c.group(), f, vec![x]).unwrap()
}

fn gel(c: &StableCategory, m: &Module, range: u32) -> usize {
    c.generating_length(m, range, None).unwrap().gel.unwrap()
}

#[test]
fn trivial_module_has_length_one() {
    for (g, q) in [("C3", 3), ("C9", 3), ("A4", 4)] {
        let c = cat(g, q);
        for m in 0..3 {
            assert_eq!(gel(&c, c.trivial(), m), 1);
        }
    }
}

#[test]
fn regular_module_is_stably_zero() {
    let c = cat("C3xS3", 3);
    let kg = Module::regular(c.group(), c.field());
    let step = c.universal_ghost(&kg, 1).unwrap();
    assert_eq!(step.target.dim(), 0);
    assert!(step.ghost.is_zero());
    assert_eq!(gel(&c, &kg, 1), 0);
}

#[test]
fn omega_k_over_c3_needs_two_ghosts() {
    let c = cat("C3", 3);
    let ok = jordan(&c, 2);
    let g1 = c.universal_ghost(&ok, 0).unwrap();
    assert!(!c.is_stably_trivial(&g1.ghost).unwrap());
    let g2 = c.universal_ghost(&g1.target, 0).unwrap();
    assert!(c.is_stably_trivial(&g2.ghost.after(&g1.ghost)).unwrap());
    assert_eq!(gel(&c, &ok, 0), 2);
}

#[test]
fn ghosts_kill_range_homs() {
    let c = cat("C9", 3);
    for d in [3, 5] {
        let step = c.universal_ghost(&jordan(&c, d), 1).unwrap();
        assert!(step.ghost.is_equivariant());
        for i in -1..=1 {
            let s = c.sphere(i).unwrap();
            for h in c.stable_hom(&s, &step.source).unwrap().lifted {
                assert!(c.is_stably_trivial(&step.ghost.after(&h)).unwrap());
            }
        }
    }
}

#[test]
fn radical_length_over_c9() {
    let c = cat("C9", 3);
    for d in 1..=8 {
        let j = jordan(&c, d);
        assert_eq!(gel(&c, &j, 0), d, "J_{d}");
        assert!(gel(&c, &j, 1) <= 4);
    }
}

#[test]
fn stable_invariance_and_spheres() {
    let c = cat("C3xS3", 3);
    let m = c.create_random_module(1, 2, 1, 11).unwrap().module().clone();
    let kg = Module::regular(c.group(), c.field());
    let padded = Module::sum(&[m.clone(), kg]).unwrap().forget_summands();
    assert_eq!(gel(&c, &padded, 1), gel(&c, &m, 1));
    for j in -2i64..=2 {
        let s = c.sphere(j).unwrap();
        assert_eq!(gel(&c, &s, j.unsigned_abs() as u32), 1);
    }
}

#[test]
fn random_modules_are_deterministic_and_bounded() {
    let c = cat("C9", 3);
    let a = c.create_random_module(3, 3, 1, 42).unwrap();
    let b = c.create_random_module(3, 3, 1, 42).unwrap();
    assert_eq!(a.stages, b.stages);
    for (t, r) in a.stages.iter().enumerate() {
        assert!(gel(&c, r, 1) <= t + 1);
        assert_eq!(c.projective_free_summand(r).unwrap().core.dim(), r.dim());
    }
    let zero_steps = c.create_random_module(0, 3, 2, 5).unwrap();
    assert!(gel(&c, zero_steps.module(), 2) <= 1);
}

#[test]
fn length_is_monotone_in_range() {
    let c = cat("C9", 3);
    for seed in 0..4 {
        let r = c.create_random_module(2, 2, 2, seed).unwrap();
        let lens: Vec<usize> = (0..3).map(|m| gel(&c, r.module(), m)).collect();
        assert!(lens.windows(2).all(|w| w[0] >= w[1]), "{lens:?}");
    }
}

/// Every ghost `M -> X` (a map killing the range homs) factors through the
/// universal ghost up to a stably trivial map.
#[test]
fn universal_ghost_is_universal() {
    let c = cat("C3", 3);
    let f = c.field();
    let m = Module::sum(&[jordan(&c, 2), c.trivial().clone()]).unwrap().forget_summands();
    let step = c.universal_ghost(&m, 0).unwrap();
    for x in [jordan(&c, 1), jordan(&c, 2), m.clone()] {
        let homs = hom_basis(&m, &x).unwrap();
        let phom = c.phom(&m, &x).unwrap();
        let mut reachable = RowEchelon::new(f, m.dim() * x.dim());
        for p in phom.maps() {
            reachable.insert(p.flatten());
        }
        for psi in hom_basis(&step.target, &x).unwrap().maps() {
            reachable.insert(psi.after(&step.ghost).flatten());
        }
        let q = f.order();
        let total = q.pow(homs.dim() as u32);
        for idx in 0..total {
            let mut k = idx;
            let coeffs: Vec<u8> = (0..homs.dim())
                .map(|_| {
                    let v = (k % q) as u8;
                    k /= q;
                    v
                })
                .collect();
            let phi = homs.combination(&coeffs);
            let s = c.sphere(0).unwrap();
            let is_ghost = c
                .stable_hom(&s, &m)
                .unwrap()
                .lifted
                .iter()
                .all(|h| c.is_stably_trivial(&phi.after(h)).unwrap());
            if is_ghost {
                assert!(reachable.contains(&phi.flatten()));
            }
        }
    }
}
