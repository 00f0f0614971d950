use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use stmod::ff::{Field, Matrix};
use stmod::group::{GroupData, GroupPreset, Module};
use stmod::harness::ModuleFile;
use stmod::hom::{hom_basis, hom_basis_direct, hom_dim};
use stmod::stable::StableCategory;

fn category(i: usize) -> &'static StableCategory {
    static CATS: OnceLock<Vec<StableCategory>> = OnceLock::new();
    let cats = CATS.get_or_init(|| {
        [("C3", 3), ("S3", 3), ("S3", 2), ("C3xC3", 3)]
            .into_iter()
            .map(|(g, q)| {
                let group = Arc::new(GroupData::from_preset(&g.parse::<GroupPreset>().unwrap()).unwrap());
                StableCategory::new(&group, &Field::of_order(q).unwrap()).unwrap()
            })
            .collect()
    });
    &cats[i]
}

fn module(cat: &StableCategory, seed: u64) -> Module {
    let steps = (seed % 2) as usize;
    cat.create_random_module(steps, 2, 1, seed).unwrap().module().clone()
}

fn matrix(f: &Field, rows: usize, cols: usize, data: &[u8]) -> Matrix {
    let q = f.order() as u8;
    Matrix::from_fn(f, rows, cols, |r, c| data[(r * cols + c) % data.len()] % q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hom_is_additive(c in 0usize..4, a in any::<u64>(), b in any::<u64>(), n in any::<u64>()) {
        let cat = category(c);
        let (ma, mb, mn) = (module(cat, a), module(cat, b), module(cat, n));
        let sum = Module::sum(&[ma.clone(), mb.clone()]).unwrap();
        prop_assert_eq!(hom_dim(&sum, &mn).unwrap(), hom_dim(&ma, &mn).unwrap() + hom_dim(&mb, &mn).unwrap());
        prop_assert_eq!(hom_dim(&mn, &sum).unwrap(), hom_dim(&mn, &ma).unwrap() + hom_dim(&mn, &mb).unwrap());
    }

    #[test]
    fn duality_preserves_dimensions(c in 0usize..4, a in any::<u64>(), b in any::<u64>()) {
        let cat = category(c);
        let (m, n) = (module(cat, a), module(cat, b));
        prop_assert_eq!(hom_dim(&m, &n).unwrap(), hom_dim(&n.dual(), &m.dual()).unwrap());
        let st = cat.stable_hom(&m, &n).unwrap();
        let dual = cat.stable_hom(&n.dual(), &m.dual()).unwrap();
        prop_assert_eq!(st.phom_dim, dual.phom_dim);
        prop_assert_eq!(st.dim(), dual.dim());
    }

    #[test]
    fn spinning_matches_direct_solve(c in 0usize..4, a in any::<u64>(), b in any::<u64>()) {
        let cat = category(c);
        let (m, n) = (module(cat, a), module(cat, b));
        let spun = hom_basis(&m, &n).unwrap();
        let direct = hom_basis_direct(&m, &n).unwrap();
        prop_assert_eq!(spun.dim(), direct.dim());
        for (x, y) in spun.maps().iter().zip(direct.maps()) {
            prop_assert_eq!(x.matrix(), y.matrix());
        }
    }

    #[test]
    fn projective_maps_form_an_ideal(c in 0usize..4, a in any::<u64>(), b in any::<u64>(), d in any::<u64>()) {
        let cat = category(c);
        let (k, m, n) = (module(cat, a), module(cat, b), module(cat, d));
        let pmn = cat.phom(&m, &n).unwrap();
        let after = hom_basis(&n, &k).unwrap();
        let before = hom_basis(&k, &m).unwrap();
        let pmk = cat.phom(&m, &k).unwrap();
        let pkn = cat.phom(&k, &n).unwrap();
        for f in pmn.maps() {
            prop_assert!(f.is_equivariant());
            for g in after.maps().iter().take(3) {
                prop_assert!(pmk.contains(&g.compose(&f).unwrap()));
            }
            for h in before.maps().iter().take(3) {
                prop_assert!(pkn.contains(&f.compose(h).unwrap()));
            }
        }
    }

    #[test]
    fn module_files_round_trip(c in 0usize..4, a in any::<u64>()) {
        let m = module(category(c), a);
        let file = ModuleFile::from_module(&m, Some(format!("seed {a}")));
        let back = ModuleFile::from_json(&file.to_json()).unwrap();
        prop_assert_eq!(&back, &file);
        let rebuilt = back.to_module_over(m.group()).unwrap();
        prop_assert_eq!(rebuilt.gens(), m.gens());
    }

    #[test]
    fn transpose_reverses_products(q in prop::sample::select(vec![2u64, 3, 4, 5, 9]),
                                   (r, k, c) in (1usize..12, 1usize..12, 1usize..12),
                                   data in prop::collection::vec(any::<u8>(), 1..64),
                                   other in prop::collection::vec(any::<u8>(), 1..64)) {
        let f = Field::of_order(q).unwrap();
        let a = matrix(&f, r, k, &data);
        let b = matrix(&f, k, c, &other);
        prop_assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
        prop_assert_eq!(a.rank() + a.nullspace().cols(), k);
        prop_assert!(a.mul(&a.nullspace()).is_zero());
    }
}
