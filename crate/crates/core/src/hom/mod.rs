//! Hom spaces, maps factoring through projectives, and stable Hom.

mod spin;

use std::collections::HashMap;
use std::sync::Arc;

use crate::ff::{Matrix, RowEchelon};
use crate::group::{Module, ModuleError, ModuleMap};

pub use spin::Spin;

/// A basis of Hom(M, N) in reduced echelon form with respect to the row-major
/// flattening of the (N.dim x M.dim) matrices.
#[derive(Clone, Debug)]
pub struct HomBasis {
    source: Module,
    target: Module,
    maps: Vec<ModuleMap>,
}

impl HomBasis {
    pub fn source(&self) -> &Module {
        &self.source
    }
    pub fn target(&self) -> &Module {
        &self.target
    }
    pub fn dim(&self) -> usize {
        self.maps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
    pub fn maps(&self) -> &[ModuleMap] {
        &self.maps
    }
    pub fn into_maps(self) -> Vec<ModuleMap> {
        self.maps
    }
    /// `sum coeffs[i] * maps[i]`.
    pub fn combination(&self, coeffs: &[u8]) -> ModuleMap {
        ModuleMap::combination(&self.source, &self.target, &self.maps, coeffs)
    }
}

fn leading(v: &[u8]) -> usize {
    v.iter().position(|&x| x != 0).unwrap_or(v.len())
}

/// Seed images of the maps `m -> n`: the nullspace of the relations met while
/// spinning `m`, one column per map, seed `s` occupying rows `s*dn..(s+1)*dn`.
fn spin_nullspace(spin: &Spin, n: &Module) -> Matrix {
    let f = n.field();
    let dn = n.dim();
    let width = spin.seeds.len() * dn;
    let nm = n.element_matrices();
    let mut ech = RowEchelon::new(f, width);
    let mut row = vec![0u8; width];
    'outer: for rel in &spin.relations {
        for i in 0..dn {
            row.iter_mut().for_each(|x| *x = 0);
            let s0 = rel.slot * dn;
            f.axpy(&mut row[s0..s0 + dn], 1, nm[rel.elem].row(i));
            for &(t, c) in &rel.coords {
                let s = spin.slot[t] * dn;
                f.axpy(&mut row[s..s + dn], f.neg(c), nm[spin.elem[t]].row(i));
            }
            ech.insert(row.clone());
            if ech.is_full() {
                break 'outer;
            }
        }
    }
    ech.nullspace()
}

/// The maps `m -> n` whose seed images are the columns of `x`.
fn maps_from_seed_images(spin: &Spin, n: &Module, x: &Matrix) -> Vec<Matrix> {
    let f = n.field();
    let dn = n.dim();
    let dm = spin.elem.len();
    let h = x.cols();
    if h == 0 {
        return Vec::new();
    }
    let nt = n.element_matrices_transposed();
    let per_slot: Vec<Matrix> = (0..spin.seeds.len()).map(|s| x.block(s * dn, 0, dn, h).transpose()).collect();
    // row k of images[t] is the image of the t-th spun vector under map k
    let images: Vec<Matrix> = crate::par::map_range(dm, |t| per_slot[spin.slot[t]].mul(&nt[spin.elem[t]]));
    crate::par::map_range(h, |k| {
        let rows: Vec<Vec<u8>> = images.iter().map(|im| im.row(k).to_vec()).collect();
        Matrix::from_rows(f, dn, &rows).transpose().mul(&spin.basis_inv)
    })
}

/// Solutions of the intertwining system obtained by spinning `m`, as matrices.
fn spin_solutions(m: &Module, n: &Module) -> Vec<Matrix> {
    let spin = Spin::of(m);
    maps_from_seed_images(&spin, n, &spin_nullspace(&spin, n))
}

/// Spin the cheaper side: the source directly, or the dual of the target.
fn hom_unstructured(m: &Module, n: &Module) -> Vec<Vec<u8>> {
    let f = m.field();
    if m.dim() == 0 || n.dim() == 0 {
        return Vec::new();
    }
    let r_m = Spin::of(m).seeds.len();
    let direct_cost = r_m * n.dim();
    let mats = if direct_cost <= m.dim() {
        spin_solutions(m, n)
    } else {
        let nd = n.dual();
        let r_n = Spin::of(&nd).seeds.len();
        if r_n * m.dim() < direct_cost {
            spin_solutions(&nd, &m.dual()).into_iter().map(|x| x.transpose()).collect()
        } else {
            spin_solutions(m, n)
        }
    };
    if mats.is_empty() {
        return Vec::new();
    }
    let rows: Vec<Vec<u8>> = mats.iter().map(Matrix::flatten).collect();
    let reduced = Matrix::from_rows(f, m.dim() * n.dim(), &rows).rref();
    (0..reduced.rank()).map(|i| reduced.reduced.row(i).to_vec()).collect()
}

type BlockCache = HashMap<(Module, Module), Arc<Vec<Vec<u8>>>>;

/// Reduced echelon rows of Hom(m, n), working block by block over recorded summands.
fn hom_rows(m: &Module, n: &Module, cache: &mut BlockCache) -> Arc<Vec<Vec<u8>>> {
    let key = (m.clone(), n.clone());
    if let Some(hit) = cache.get(&key) {
        return hit.clone();
    }
    let (dm, dn) = (m.dim(), n.dim());
    let rows = if !m.summands().is_empty() {
        let mut out = Vec::new();
        let mut off = 0;
        for a in m.summands() {
            let block = hom_rows(a, n, cache);
            for r in block.iter() {
                let mut v = vec![0u8; dn * dm];
                for i in 0..dn {
                    v[i * dm + off..i * dm + off + a.dim()].copy_from_slice(&r[i * a.dim()..(i + 1) * a.dim()]);
                }
                out.push(v);
            }
            off += a.dim();
        }
        out.sort_by_cached_key(|v| leading(v));
        out
    } else if !n.summands().is_empty() {
        let mut out = Vec::new();
        let mut off = 0;
        for b in n.summands() {
            let block = hom_rows(m, b, cache);
            for r in block.iter() {
                let mut v = vec![0u8; dn * dm];
                v[off * dm..(off + b.dim()) * dm].copy_from_slice(r);
                out.push(v);
            }
            off += b.dim();
        }
        out.sort_by_cached_key(|v| leading(v));
        out
    } else {
        hom_unstructured(m, n)
    };
    let rows = Arc::new(rows);
    cache.insert(key, rows.clone());
    rows
}

/// Canonical echelon basis of the equivariant maps `m -> n`.
pub fn hom_basis(m: &Module, n: &Module) -> Result<HomBasis, ModuleError> {
    m.same_context(n)?;
    let rows = hom_rows(m, n, &mut HashMap::new());
    let maps = rows.iter().map(|r| ModuleMap::from_flat(m, n, r.clone())).collect();
    Ok(HomBasis { source: m.clone(), target: n.clone(), maps })
}

pub fn hom_dim(m: &Module, n: &Module) -> Result<usize, ModuleError> {
    m.same_context(n)?;
    Ok(hom_rows(m, n, &mut HashMap::new()).len())
}

/// Hom(m, n) by solving the full intertwining system in one matrix. Quadratic in
/// the size of the maps; kept as an independent reference.
pub fn hom_basis_direct(m: &Module, n: &Module) -> Result<HomBasis, ModuleError> {
    m.same_context(n)?;
    let f = m.field();
    let (dm, dn) = (m.dim(), n.dim());
    let width = dm * dn;
    let mut ech = RowEchelon::new(f, width);
    for (gm, gn) in m.gens().iter().zip(n.gens()) {
        // (rho_N X - X rho_M)[i][j]
        for i in 0..dn {
            for j in 0..dm {
                let mut row = vec![0u8; width];
                for k in 0..dn {
                    row[k * dm + j] = f.add(row[k * dm + j], gn.get(i, k));
                }
                for k in 0..dm {
                    row[i * dm + k] = f.sub(row[i * dm + k], gm.get(k, j));
                }
                ech.insert(row);
            }
        }
    }
    let ns = ech.nullspace().transpose();
    let reduced = ns.rref();
    let maps = (0..reduced.rank())
        .map(|i| ModuleMap::from_flat(m, n, reduced.reduced.row(i).to_vec()))
        .collect();
    Ok(HomBasis { source: m.clone(), target: n.clone(), maps })
}

/// A map is determined by its values on a generating set of the source, so
/// maps out of `m` are compared through the columns at the spin seeds,
/// concatenated in seed order.
fn seed_vector(mat: &Matrix, seeds: &[usize]) -> Vec<u8> {
    mat.select_cols(seeds).transpose().flatten()
}

/// The maps `M -> N` that factor through a projective.
///
/// Built from maps `g_c: M -> kG` whose images are the summands of an injective
/// hull. Any map out of a summand of kG extends to kG, and maps `kG -> N` are
/// `a -> a.n`, so PHom is spanned by `m -> g_c(m).n` over copies `c` and basis
/// vectors `n` of N.
#[derive(Clone, Debug)]
pub struct PHom {
    source: Module,
    target: Module,
    into_free: Arc<Vec<ModuleMap>>,
    seeds: Vec<usize>,
    echelon: RowEchelon,
    independent: Vec<(usize, usize)>,
}

/// `g(m).e_k` for every `m`, as the columns of a `N.dim x M.dim` matrix.
fn act_on_basis(g: &ModuleMap, cols: &[usize], nt: &[Matrix], k: usize, dn: usize) -> Vec<Vec<u8>> {
    let f = g.source().field();
    cols.iter()
        .map(|&m| {
            let mut v = vec![0u8; dn];
            for (h, t) in nt.iter().enumerate() {
                let a = g.matrix().get(h, m);
                if a != 0 {
                    f.axpy(&mut v, a, t.row(k));
                }
            }
            v
        })
        .collect()
}

impl PHom {
    /// `into_free` lists maps `M -> kG` whose combined map is an injective hull.
    pub fn new(source: &Module, into_free: Arc<Vec<ModuleMap>>, n: &Module) -> Result<PHom, ModuleError> {
        source.same_context(n)?;
        let f = source.field();
        let seeds = Spin::of(source).seeds().to_vec();
        let dn = n.dim();
        let mut echelon = RowEchelon::new(f, dn * seeds.len());
        let mut independent = Vec::new();
        if dn > 0 && !seeds.is_empty() {
            let nt = n.element_matrices_transposed();
            'copies: for (c, g) in into_free.iter().enumerate() {
                let vecs = crate::par::map_range(dn, |k| act_on_basis(g, &seeds, &nt, k, dn).concat());
                for (k, v) in vecs.into_iter().enumerate() {
                    if echelon.is_full() {
                        break 'copies;
                    }
                    if echelon.insert(v) {
                        independent.push((c, k));
                    }
                }
            }
        }
        Ok(PHom { source: source.clone(), target: n.clone(), into_free, seeds, echelon, independent })
    }

    pub fn dim(&self) -> usize {
        self.echelon.rank()
    }
    pub fn source(&self) -> &Module {
        &self.source
    }
    pub fn target(&self) -> &Module {
        &self.target
    }

    /// A basis of maps `m -> g_c(m).e_k`.
    pub fn maps(&self) -> Vec<ModuleMap> {
        let (dm, dn) = (self.source.dim(), self.target.dim());
        let nt = self.target.element_matrices_transposed();
        let all: Vec<usize> = (0..dm).collect();
        self.independent
            .iter()
            .map(|&(c, k)| {
                let cols = act_on_basis(&self.into_free[c], &all, &nt, k, dn);
                let mat = Matrix::from_rows(self.source.field(), dn, &cols).transpose();
                ModuleMap::new_unchecked(self.source.clone(), self.target.clone(), mat)
            })
            .collect()
    }

    /// Whether `f: M -> N` factors through a projective.
    pub fn contains(&self, f: &ModuleMap) -> bool {
        self.echelon.contains(&seed_vector(f.matrix(), &self.seeds))
    }

    /// Whether `f` lies in the span of the composites `outer . inner` plus the
    /// maps factoring through a projective.
    pub fn contains_modulo(&self, f: &ModuleMap, composites: &[(&ModuleMap, &[ModuleMap])]) -> bool {
        let mut ech = self.echelon.clone();
        let r = self.seeds.len();
        for &(outer, inners) in composites {
            if inners.is_empty() {
                continue;
            }
            if ech.is_full() {
                return true;
            }
            // row block j holds the seed images of outer . inners[j]
            let at_seeds: Vec<Matrix> = inners.iter().map(|b| b.matrix().select_cols(&self.seeds).transpose()).collect();
            let refs: Vec<&Matrix> = at_seeds.iter().collect();
            let images = Matrix::vstack_all(f.source().field(), outer.source().dim(), &refs).mul(&outer.matrix().transpose());
            for j in 0..inners.len() {
                ech.insert(images.data()[j * r * images.cols()..(j + 1) * r * images.cols()].to_vec());
            }
        }
        ech.contains(&seed_vector(f.matrix(), &self.seeds))
    }

    /// Complete the PHom basis by maps read off the spin of the source; the
    /// added maps lift a basis of the stable Hom space.
    pub fn stable_hom(&self) -> Result<StableHom, ModuleError> {
        let (m, n) = (&self.source, &self.target);
        if m.dim() == 0 || n.dim() == 0 {
            return Ok(StableHom { hom_dim: 0, phom_dim: self.dim(), lifted: Vec::new() });
        }
        let spin = Spin::of(m);
        let ns = spin_nullspace(&spin, n);
        let mut ech = self.echelon.clone();
        let solutions = ns.transpose();
        let mut chosen = Vec::new();
        for k in 0..solutions.rows() {
            if ech.is_full() {
                break;
            }
            let x = solutions.row(k).to_vec();
            if ech.insert(x.clone()) {
                chosen.push(x);
            }
        }
        let x = Matrix::from_columns(m.field(), ns.rows(), &chosen);
        let lifted = maps_from_seed_images(&spin, n, &x)
            .into_iter()
            .map(|mat| ModuleMap::new_unchecked(m.clone(), n.clone(), mat))
            .collect();
        Ok(StableHom { hom_dim: ns.cols(), phom_dim: self.dim(), lifted })
    }
}

/// Stable Hom dimension with representatives of a basis.
#[derive(Clone, Debug)]
pub struct StableHom {
    pub hom_dim: usize,
    pub phom_dim: usize,
    pub lifted: Vec<ModuleMap>,
}

impl StableHom {
    pub fn dim(&self) -> usize {
        self.lifted.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::group::{GroupData, GroupPreset};

    fn setup(g: &str, q: u64) -> (Arc<GroupData>, Field) {
        let group = Arc::new(GroupData::from_preset(&g.parse::<GroupPreset>().unwrap()).unwrap());
        (group, Field::of_order(q).unwrap())
    }

    fn assert_same(a: &HomBasis, b: &HomBasis) {
        let fa: Vec<_> = a.maps().iter().map(|m| m.flatten()).collect();
        let fb: Vec<_> = b.maps().iter().map(|m| m.flatten()).collect();
        assert_eq!(fa, fb);
    }

    #[test]
    fn small_dimensions() {
        let (g, f) = setup("C3", 3);
        let k = Module::trivial(&g, &f);
        let kg = Module::regular(&g, &f);
        assert_eq!(hom_dim(&k, &k).unwrap(), 1);
        assert_eq!(hom_dim(&kg, &k).unwrap(), 1);
        assert_eq!(hom_dim(&kg, &kg).unwrap(), 3);
        for m in hom_basis(&kg, &kg).unwrap().maps() {
            assert!(m.is_equivariant());
        }
    }

    #[test]
    fn spin_matches_direct_solve() {
        let (g, f) = setup("C3xS3", 3);
        let kg = Module::regular(&g, &f);
        let eps = Module::character(&g, &f, &[1, 1, -1]).unwrap();
        let k = Module::trivial(&g, &f);
        let s = Module::sum(&[k.clone(), eps.clone(), k.clone()]).unwrap();
        for (a, b) in [(&kg, &eps), (&eps, &kg), (&s, &kg), (&kg, &s), (&s, &s)] {
            assert_same(&hom_basis(a, b).unwrap(), &hom_basis_direct(a, b).unwrap());
        }
        let s_plain = s.forget_summands();
        assert_same(&hom_basis(&s_plain, &s_plain).unwrap(), &hom_basis(&s, &s).unwrap());
    }

    #[test]
    fn mismatch_is_reported() {
        let (g, f) = setup("C3", 3);
        let (g2, _) = setup("C9", 3);
        let a = Module::trivial(&g, &f);
        let b = Module::trivial(&g2, &f);
        assert!(matches!(hom_basis(&a, &b), Err(ModuleError::Mismatch(_))));
    }
}
