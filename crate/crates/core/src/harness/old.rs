//! The earlier replacement strategy, kept as a comparison baseline: targets are
//! enlarged by whole copies of kG and projective parts are found by a full
//! decomposition.

use crate::ff::Matrix;
use crate::group::{Module, ModuleError, ModuleMap};
use crate::projective::fitting_decomposition;
use crate::stable::StableCategory;

/// An injective replacement `M -> N + kG^copies`.
#[derive(Clone, Debug)]
pub struct FreeReplacement {
    pub replaced: ModuleMap,
    pub copies: usize,
    pub added_dim: usize,
}

/// Replace `f` by an injection into `N + kG^c`, with `c` the least number of
/// free copies whose socles can absorb the kernel. Copy `j` of kG receives the
/// `j`-th map chosen for each indecomposable projective through its inclusion.
pub fn free_replace_with_inj(cat: &StableCategory, f: &ModuleMap) -> Result<FreeReplacement, ModuleError> {
    let minimal = cat.replace_with_inj(f)?;
    let table = cat.table();
    let m = f.source();
    let kg = Module::regular(cat.group(), cat.field());
    let mut per_projective: Vec<Vec<&ModuleMap>> = vec![Vec::new(); table.len()];
    let chosen: Vec<ModuleMap> = minimal.sum.projections[1..].iter().map(|p| p.after(&minimal.replaced)).collect();
    for (g, &i) in chosen.iter().zip(&minimal.summands) {
        per_projective[i].push(g);
    }
    let copies = per_projective.iter().map(Vec::len).max().unwrap_or(0);
    let mut blocks = vec![f.matrix().clone()];
    let mut parts = vec![f.target().clone()];
    for j in 0..copies {
        let mut into_kg = Matrix::zeros(m.field(), kg.dim(), m.dim());
        for (i, maps) in per_projective.iter().enumerate() {
            if let Some(g) = maps.get(j) {
                into_kg.add_assign(&table.inclusions()[i].matrix().mul(g.matrix()));
            }
        }
        blocks.push(into_kg);
        parts.push(kg.clone());
    }
    let target = if parts.len() == 1 { parts.pop().unwrap() } else { Module::sum(&parts)? };
    let refs: Vec<&Matrix> = blocks.iter().collect();
    let replaced = ModuleMap::new_unchecked(m.clone(), target, Matrix::vstack_all(m.field(), m.dim(), &refs));
    Ok(FreeReplacement { replaced, copies, added_dim: copies * kg.dim() })
}

/// Cokernel of the free injective hull, with no projective reduction.
pub fn old_suspend(cat: &StableCategory, m: &Module) -> Result<Module, ModuleError> {
    let hull = free_replace_with_inj(cat, &ModuleMap::zero(m, &cat.zero()))?;
    Ok(hull.replaced.cokernel().module)
}

/// Projective-free part found by decomposing fully and discarding the
/// summands isomorphic to table projectives.
pub fn legacy_projective_free(cat: &StableCategory, m: &Module, seed: u64) -> Result<Module, ModuleError> {
    let mut kept = Vec::new();
    for (inc, _) in fitting_decomposition(m, seed)? {
        if cat.table().projective_index(inc.source())?.is_none() {
            kept.push(inc.source().clone());
        }
    }
    if kept.is_empty() {
        return Ok(cat.zero());
    }
    Ok(Module::sum(&kept)?.forget_summands())
}
