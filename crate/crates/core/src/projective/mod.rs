//! Indecomposable projectives of kG, their simple heads, and socle evaluation maps.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ff::Field;
use crate::group::{GroupData, Module, ModuleError, ModuleMap};
use crate::hom::{hom_basis, HomBasis};

/// Random draws used to certify indecomposability when enumeration is too large.
pub const CERTIFY_DRAWS: usize = 64;
/// Largest End dimension for which End is enumerated exhaustively.
pub const EXHAUSTIVE_END_DIM: usize = 12;
/// Largest End size (in elements) for exhaustive enumeration.
pub const EXHAUSTIVE_END_SIZE: usize = 1 << 20;

const DEFAULT_SEED: u64 = 0x5eed_0f_7ab1e;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectiveError {
    #[error("decomposition inconclusive: {0}")]
    DecompositionInconclusive(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// The indecomposable projective kG-modules, one per isomorphism class.
#[derive(Clone, Debug)]
pub struct ProjectiveTable {
    group: Arc<GroupData>,
    field: Field,
    projectives: Vec<Module>,
    simples: Vec<Module>,
    multiplicities: Vec<usize>,
    inclusions: Vec<ModuleMap>,
    dual_partners: Vec<(usize, ModuleMap)>,
    certified: Vec<bool>,
}

/// Summary used by the `decompose` command.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TableSummary {
    pub group: String,
    pub field: String,
    pub order: usize,
    pub projective_dims: Vec<usize>,
    pub multiplicities: Vec<usize>,
    pub simple_dims: Vec<usize>,
    pub dual_partners: Vec<usize>,
    pub exhaustively_certified: Vec<bool>,
}

/// Elements of End(M) (or any Hom space) to try, in a fixed order: the basis,
/// then either all combinations or seeded random ones.
struct Candidates<'a> {
    basis: &'a HomBasis,
    q: usize,
    phase: usize,
    index: usize,
    exhaustive: bool,
    limit: usize,
    rng: ChaCha8Rng,
}

impl<'a> Candidates<'a> {
    fn new(basis: &'a HomBasis, seed: u64, draws: usize, max_size: usize) -> Self {
        let q = basis.source().field().order();
        let e = basis.dim();
        let size = (q as f64).powi(e as i32);
        let exhaustive = e <= EXHAUSTIVE_END_DIM && size <= max_size as f64;
        let limit = if exhaustive { size as usize } else { draws };
        Candidates { basis, q, phase: 0, index: 0, exhaustive, limit, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Iterator for Candidates<'_> {
    type Item = ModuleMap;

    fn next(&mut self) -> Option<ModuleMap> {
        let e = self.basis.dim();
        if self.phase == 0 {
            if self.index < e {
                self.index += 1;
                return Some(self.basis.maps()[self.index - 1].clone());
            }
            self.phase = 1;
            self.index = 0;
        }
        if self.index >= self.limit {
            return None;
        }
        let coeffs: Vec<u8> = if self.exhaustive {
            let mut k = self.index;
            (0..e)
                .map(|_| {
                    let c = (k % self.q) as u8;
                    k /= self.q;
                    c
                })
                .collect()
        } else {
            (0..e).map(|_| self.rng.gen_range(0..self.q) as u8).collect()
        };
        self.index += 1;
        Some(self.basis.combination(&coeffs))
    }
}

/// A power of a self-map with rank strictly between 0 and dim, if one is found.
fn splitting_endomorphism(m: &Module, seed: u64) -> Result<(Option<ModuleMap>, bool), ModuleError> {
    let end = hom_basis(m, m)?;
    if end.dim() <= 1 {
        return Ok((None, true));
    }
    let cands = Candidates::new(&end, seed, CERTIFY_DRAWS, EXHAUSTIVE_END_SIZE);
    let exhaustive = cands.exhaustive;
    let n = m.dim() as u64;
    for f in cands {
        let power = f.matrix().pow(n);
        let r = power.rank();
        if r > 0 && r < m.dim() {
            return Ok((Some(ModuleMap::new_unchecked(m.clone(), m.clone(), power)), exhaustive));
        }
    }
    Ok((None, exhaustive))
}

/// Search a Hom space for an invertible member.
pub fn find_isomorphism(p: &Module, q: &Module, seed: u64) -> Result<Option<ModuleMap>, ModuleError> {
    if p.dim() != q.dim() {
        return Ok(None);
    }
    let h = hom_basis(p, q)?;
    if h.is_empty() {
        return Ok((p.dim() == 0).then(|| ModuleMap::zero(p, q)));
    }
    for f in Candidates::new(&h, seed, CERTIFY_DRAWS, 1 << 16) {
        if f.rank() == p.dim() {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// The simple head of a projective by repeatedly passing to proper images of
/// self-maps until End is one-dimensional or no proper image exists.
pub fn simple_of_projective(p: &Module) -> Result<Module, ModuleError> {
    let mut m = p.clone();
    loop {
        let end = hom_basis(&m, &m)?;
        if end.dim() <= 1 {
            return Ok(m);
        }
        let proper = Candidates::new(&end, DEFAULT_SEED, CERTIFY_DRAWS, EXHAUSTIVE_END_SIZE).find(|f| {
            let r = f.rank();
            r > 0 && r < m.dim()
        });
        match proper {
            Some(f) => m = f.image().module,
            None => return Ok(m),
        }
    }
}

/// The map `S^d -> M` whose components form a basis of Hom(S, M).
pub fn socle_evaluation_map(s: &Module, m: &Module) -> Result<ModuleMap, ModuleError> {
    let h = hom_basis(s, m)?;
    let copies = vec![s.clone(); h.dim()];
    let source = if copies.is_empty() { Module::zero(s.group(), s.field()) } else { Module::sum(&copies)? };
    if h.is_empty() {
        return Ok(ModuleMap::zero(&source, m));
    }
    Ok(ModuleMap::from_sum(&source, h.maps()))
}

/// Split a module into indecomposable summands by Fitting's lemma. Returns the
/// inclusion of each summand and whether its indecomposability was certified
/// by exhausting End.
pub fn fitting_decomposition(module: &Module, seed: u64) -> Result<Vec<(ModuleMap, bool)>, ModuleError> {
    let mut pieces = Vec::new();
    let mut stack = vec![ModuleMap::identity(module)];
    let mut draw = 0u64;
    while let Some(inc) = stack.pop() {
        let m = inc.source().clone();
        if m.is_zero() {
            continue;
        }
        draw += 1;
        let (split, exhaustive) = splitting_endomorphism(&m, seed ^ draw.wrapping_mul(0x9e37_79b9_7f4a_7c15))?;
        match split {
            None => pieces.push((inc, exhaustive)),
            Some(power) => {
                stack.push(inc.after(&power.kernel().inclusion));
                stack.push(inc.after(&power.image().inclusion));
            }
        }
    }
    Ok(pieces)
}

impl ProjectiveTable {
    pub fn new(group: &Arc<GroupData>, field: &Field) -> Result<ProjectiveTable, ProjectiveError> {
        Self::with_seed(group, field, DEFAULT_SEED)
    }

    /// Fitting decomposition of kG with a seeded search for splitting endomorphisms.
    pub fn with_seed(group: &Arc<GroupData>, field: &Field, seed: u64) -> Result<ProjectiveTable, ProjectiveError> {
        let kg = Module::regular(group, field);
        let pieces = fitting_decomposition(&kg, seed)?;
        let total: usize = pieces.iter().map(|(p, _)| p.source().dim()).sum();
        if total != group.order() {
            return Err(ProjectiveError::DecompositionInconclusive(format!(
                "pieces have total dimension {total}, expected {}",
                group.order()
            )));
        }
        // isomorphism classes in discovery order
        let mut classes: Vec<(ModuleMap, usize, bool)> = Vec::new();
        for (inc, cert) in pieces {
            let p = inc.source().clone();
            let mut found = false;
            for (rep, mult, _) in classes.iter_mut() {
                if find_isomorphism(rep.source(), &p, seed)?.is_some() {
                    *mult += 1;
                    found = true;
                    break;
                }
            }
            if !found {
                classes.push((inc, 1, cert));
            }
        }
        classes.sort_by_key(|(inc, _, _)| inc.source().dim());
        let projectives: Vec<Module> = classes.iter().map(|(i, _, _)| i.source().clone()).collect();
        let simples = projectives.iter().map(simple_of_projective).collect::<Result<Vec<_>, _>>()?;
        for (a, p) in projectives.iter().enumerate() {
            for q in &projectives[a + 1..] {
                if find_isomorphism(p, q, seed)?.is_some() {
                    return Err(ProjectiveError::DecompositionInconclusive("duplicate isomorphism class".into()));
                }
            }
        }
        let mut dual_partners = Vec::with_capacity(projectives.len());
        for p in &projectives {
            let pd = p.dual();
            let mut partner = None;
            for (j, q) in projectives.iter().enumerate() {
                if let Some(iso) = find_isomorphism(q, &pd, seed)? {
                    partner = Some((j, iso));
                    break;
                }
            }
            let partner = partner.ok_or_else(|| {
                ProjectiveError::DecompositionInconclusive(format!("no table projective matches the dual of a dim {} projective", p.dim()))
            })?;
            dual_partners.push(partner);
        }
        Ok(ProjectiveTable {
            group: group.clone(),
            field: field.clone(),
            multiplicities: classes.iter().map(|c| c.1).collect(),
            certified: classes.iter().map(|c| c.2).collect(),
            inclusions: classes.into_iter().map(|c| c.0).collect(),
            projectives,
            simples,
            dual_partners,
        })
    }

    pub fn group(&self) -> &Arc<GroupData> {
        &self.group
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn len(&self) -> usize {
        self.projectives.len()
    }
    pub fn is_empty(&self) -> bool {
        self.projectives.is_empty()
    }
    pub fn projectives(&self) -> &[Module] {
        &self.projectives
    }
    pub fn simples(&self) -> &[Module] {
        &self.simples
    }
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }
    /// A split inclusion of each projective into kG.
    pub fn inclusions(&self) -> &[ModuleMap] {
        &self.inclusions
    }
    /// For projective `i`: an index `j` and an isomorphism `P_j -> dual(P_i)`.
    pub fn dual_partner(&self, i: usize) -> (usize, &ModuleMap) {
        let (j, ref iso) = self.dual_partners[i];
        (j, iso)
    }
    /// Whether each class was proved indecomposable by exhausting End.
    pub fn exhaustively_certified(&self) -> &[bool] {
        &self.certified
    }

    /// Index of the table projective isomorphic to `m`, if any.
    pub fn projective_index(&self, m: &Module) -> Result<Option<usize>, ModuleError> {
        for (i, p) in self.projectives.iter().enumerate() {
            if p.dim() == m.dim() && find_isomorphism(p, m, DEFAULT_SEED)?.is_some() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn summary(&self) -> TableSummary {
        TableSummary {
            group: self.group.name(),
            field: self.field.to_string(),
            order: self.group.order(),
            projective_dims: self.projectives.iter().map(Module::dim).collect(),
            multiplicities: self.multiplicities.clone(),
            simple_dims: self.simples.iter().map(Module::dim).collect(),
            dual_partners: self.dual_partners.iter().map(|p| p.0).collect(),
            exhaustively_certified: self.certified.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupPreset;
    use crate::hom::hom_dim;

    fn table(g: &str, q: u64) -> ProjectiveTable {
        let group = Arc::new(GroupData::from_preset(&g.parse::<GroupPreset>().unwrap()).unwrap());
        ProjectiveTable::new(&group, &Field::of_order(q).unwrap()).unwrap()
    }

    fn bookkeeping(t: &ProjectiveTable) {
        let total: usize = t.projectives().iter().zip(t.multiplicities()).map(|(p, m)| p.dim() * m).sum();
        assert_eq!(total, t.group().order());
        for (p, inc) in t.projectives().iter().zip(t.inclusions()) {
            assert!(inc.is_equivariant());
            assert!(inc.is_injective());
            assert_eq!(inc.source(), p);
        }
        for s in t.simples() {
            assert_eq!(hom_dim(s, s).unwrap(), 1);
        }
    }

    #[test]
    fn p_groups_have_one_projective() {
        for (g, q) in [("C9", 3), ("C3", 3), ("Q8", 2), ("C3xC3", 3)] {
            let t = table(g, q);
            bookkeeping(&t);
            assert_eq!(t.len(), 1);
            assert_eq!(t.projectives()[0].dim(), t.group().order());
            assert_eq!(t.simples()[0].dim(), 1);
        }
    }

    #[test]
    fn a4_over_gf4() {
        let t = table("A4", 4);
        bookkeeping(&t);
        assert_eq!(t.summary().projective_dims, vec![4, 4, 4]);
        assert_eq!(t.multiplicities(), &[1, 1, 1]);
        assert_eq!(t.summary().simple_dims, vec![1, 1, 1]);
    }

    #[test]
    fn c3xs3_over_gf3() {
        let t = table("C3xS3", 3);
        bookkeeping(&t);
        assert_eq!(t.summary().projective_dims, vec![9, 9]);
        let z: Vec<u8> = t.simples().iter().map(|s| s.gen(2).get(0, 0)).collect();
        let mut sorted = z.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2]);
        for (i, p) in t.projectives().iter().enumerate() {
            let (j, iso) = t.dual_partner(i);
            assert!(iso.is_equivariant());
            assert_eq!(iso.source(), &t.projectives()[j]);
            assert_eq!(iso.target(), &p.dual());
        }
    }

    #[test]
    fn socle_evaluation() {
        let t = table("C3", 3);
        let g = t.group().clone();
        let f = t.field().clone();
        let k = Module::trivial(&g, &f);
        let kg = Module::regular(&g, &f);
        let beta = socle_evaluation_map(&k, &kg).unwrap();
        assert_eq!((beta.source().dim(), beta.rank()), (1, 1));
        let kk = Module::sum(&[k.clone(), k.clone()]).unwrap();
        let beta = socle_evaluation_map(&k, &kk).unwrap();
        assert_eq!((beta.source().dim(), beta.rank()), (2, 2));
        let beta = socle_evaluation_map(&k, &k).unwrap();
        assert!(beta.matrix().get(0, 0) != 0);
    }
}
