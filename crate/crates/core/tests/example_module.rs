use std::path::PathBuf;
use std::sync::Arc;

use stmod::ff::{Field, Matrix};
use stmod::group::{GroupData, GroupPreset, Module, ModuleMap};
use stmod::harness::ModuleFile;
use stmod::projective::fitting_decomposition;
use stmod::stable::StableCategory;

fn data_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/example_c3s3.json")
}

/// Five-dimensional module with basis `c, b, a, d, e`: `1 - x` sends
/// `c -> b -> a`, `y - y^2` sends `c -> d -> e`, and `z` fixes only `d`.
fn codomain(group: &Arc<GroupData>, f: &Field) -> Module {
    let shift = |pairs: &[(usize, usize)]| Matrix::from_fn(f, 5, 5, |r, c| u8::from(pairs.contains(&(r, c))));
    let one = Matrix::identity(f, 5);
    let big_x = shift(&[(1, 0), (2, 1)]);
    let big_y = shift(&[(3, 0), (4, 3)]);
    let x = one.sub(&big_x);
    let y = one.sub(&big_y).sub(&big_y.mul(&big_y));
    let z = Matrix::from_fn(f, 5, 5, |r, c| if r != c { 0 } else if r == 3 { 1 } else { f.from_int(-1) });
    Module::new(group, f, vec![x, y, z]).unwrap()
}

fn sketch() -> Module {
    let group = Arc::new(GroupData::from_preset(&"C3xS3".parse::<GroupPreset>().unwrap()).unwrap());
    let f = Field::of_order(3).unwrap();
    let v = codomain(&group, &f);
    let sign = Module::character(&group, &f, &[1, 1, -1]).unwrap();
    let mut col = Matrix::zeros(&f, 5, 1);
    col.set(2, 0, 1);
    col.set(4, 0, f.from_int(-1));
    ModuleMap::new(&sign, &v, col).unwrap().cokernel().module
}

#[test]
fn checked_in_module_matches_sketch() {
    let built = ModuleFile::from_module(&sketch(), Some("C3xS3 example, gel_3 = 3".into()));
    if std::env::var_os("STMOD_WRITE_EXAMPLE").is_some() {
        built.write(&data_path()).unwrap();
    }
    let file = ModuleFile::read(&data_path()).unwrap();
    assert_eq!(file.generators, built.generators);
    assert_eq!(file.to_module().unwrap().dim(), 4);
}

#[test]
fn restriction_avoids_small_sign_summands() {
    let m = ModuleFile::read(&data_path()).unwrap().to_module().unwrap();
    let r = m.restrict(&["x", "z"]).unwrap();
    let minus = r.field().from_int(-1);
    for (inc, _) in fitting_decomposition(&r, 7).unwrap() {
        let s = inc.source();
        let z = s.gen(1);
        let sign_type = *z == Matrix::identity(s.field(), s.dim()).scaled(minus);
        assert!(!(sign_type && s.dim() <= 2), "forbidden summand of dim {}", s.dim());
    }
}

#[test]
fn example_has_length_three() {
    let m = ModuleFile::read(&data_path()).unwrap().to_module().unwrap();
    let cat = StableCategory::new(m.group(), m.field()).unwrap();
    let report = cat.generating_length(&m, 3, None).unwrap();
    assert_eq!(report.gel, Some(3));
}
