use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::StableCategory;
use crate::ff::{Matrix, RowEchelon};
use crate::group::{DirectSum, Module, ModuleError, ModuleMap};
use crate::hom::hom_basis;
use crate::projective::socle_evaluation_map;

/// Knobs for the replacement loop.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReplaceOptions {
    /// Shuffle each Hom(M, P) basis with this seed before scanning it.
    pub shuffle_seed: Option<u64>,
}

/// Per-projective record of the injective replacement loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjStep {
    pub projective: usize,
    pub rank_beta: usize,
    pub initial_rank: usize,
    pub simple_dim: usize,
    pub copies: usize,
}

/// A map replaced by a stably equivalent injection (or surjection).
#[derive(Clone, Debug)]
pub struct Replacement {
    pub original: ModuleMap,
    pub replaced: ModuleMap,
    /// The enlarged module: target for injective, source for surjective
    /// replacements. Part 0 is the original module, then the added projectives.
    pub sum: DirectSum,
    /// Table index of each added projective, in order of addition.
    pub summands: Vec<usize>,
    pub steps: Vec<InjStep>,
}

impl Replacement {
    /// `(projective index, copies)` for every projective that was added.
    pub fn added(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &i in &self.summands {
            match out.iter_mut().find(|(j, _)| *j == i) {
                Some(e) => e.1 += 1,
                None => out.push((i, 1)),
            }
        }
        out
    }

    /// Total dimension of the added projectives.
    pub fn added_dim(&self) -> usize {
        self.sum.inclusions[1..].iter().map(|i| i.source().dim()).sum()
    }

    /// Inclusion of the original target (injective case) or source (surjective case).
    pub fn original_inclusion(&self) -> &ModuleMap {
        &self.sum.inclusions[0]
    }
}

fn sum_of(parts: &[Module]) -> Result<DirectSum, ModuleError> {
    if parts.len() == 1 {
        let id = ModuleMap::identity(&parts[0]);
        return Ok(DirectSum { module: parts[0].clone(), inclusions: vec![id.clone()], projections: vec![id] });
    }
    Module::direct_sum(parts)
}

fn rows_of(m: &Matrix) -> Vec<Vec<u8>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

impl StableCategory {
    pub fn replace_with_inj(&self, f: &ModuleMap) -> Result<Replacement, ModuleError> {
        self.replace_with_inj_opts(f, ReplaceOptions::default())
    }

    /// Add projectives to the target until the map is injective, choosing for each
    /// indecomposable projective `P` with head `S` the maps `M -> P` that raise the
    /// rank of the composite with the socle evaluation map `S^d -> M`.
    pub fn replace_with_inj_opts(&self, f: &ModuleMap, opts: ReplaceOptions) -> Result<Replacement, ModuleError> {
        self.check(f.source())?;
        let m = f.source();
        let mut blocks = vec![f.matrix().clone()];
        let mut parts = vec![f.target().clone()];
        let mut summands = Vec::new();
        let mut steps = Vec::new();
        if f.rank() < m.dim() {
            let table = self.table();
            let mut rng = opts.shuffle_seed.map(ChaCha8Rng::seed_from_u64);
            for (i, (p, s)) in table.projectives().iter().zip(table.simples()).enumerate() {
                let beta = socle_evaluation_map(s, m)?;
                let rank_beta = beta.rank();
                let mut ech = RowEchelon::new(m.field(), beta.source().dim());
                for b in &blocks {
                    ech.extend(rows_of(&b.mul(beta.matrix())));
                }
                let initial_rank = ech.rank();
                let mut copies = 0;
                if initial_rank < rank_beta {
                    let mut candidates = hom_basis(m, p)?.into_maps();
                    if let Some(r) = rng.as_mut() {
                        candidates.shuffle(r);
                    }
                    for g in candidates {
                        let gb = rows_of(&g.matrix().mul(beta.matrix()));
                        if ech.rank_increase(&gb) > 0 {
                            ech.extend(gb);
                            blocks.push(g.into_matrix());
                            parts.push(p.clone());
                            summands.push(i);
                            copies += 1;
                            if ech.rank() == rank_beta {
                                break;
                            }
                        }
                    }
                }
                debug_assert_eq!(rank_beta - initial_rank, copies * s.dim());
                steps.push(InjStep { projective: i, rank_beta, initial_rank, simple_dim: s.dim(), copies });
            }
        }
        let sum = sum_of(&parts)?;
        let refs: Vec<&Matrix> = blocks.iter().collect();
        let mat = Matrix::vstack_all(m.field(), m.dim(), &refs);
        let replaced = ModuleMap::new_unchecked(m.clone(), sum.module.clone(), mat);
        Ok(Replacement { original: f.clone(), replaced, sum, summands, steps })
    }

    pub fn replace_with_surj(&self, f: &ModuleMap) -> Result<Replacement, ModuleError> {
        self.replace_with_surj_opts(f, ReplaceOptions::default())
    }

    /// The dual of the injective replacement of the dual map, with each added
    /// summand identified with a table projective.
    pub fn replace_with_surj_opts(&self, f: &ModuleMap, opts: ReplaceOptions) -> Result<Replacement, ModuleError> {
        self.check(f.source())?;
        let inj = self.replace_with_inj_opts(&f.dual(), opts)?;
        let table = self.table();
        let mut parts = vec![f.source().clone()];
        let mut isos = vec![Matrix::identity(f.source().field(), f.source().dim())];
        let mut summands = Vec::with_capacity(inj.summands.len());
        for &a in &inj.summands {
            let (j, iso) = table.dual_partner(a);
            parts.push(table.projectives()[j].clone());
            isos.push(iso.matrix().clone());
            summands.push(j);
        }
        let sum = sum_of(&parts)?;
        let refs: Vec<&Matrix> = isos.iter().collect();
        let b = Matrix::block_diag(f.source().field(), &refs);
        let mat = inj.replaced.matrix().transpose().mul(&b);
        let replaced = ModuleMap::new_unchecked(sum.module.clone(), f.target().clone(), mat);
        Ok(Replacement { original: f.clone(), replaced, sum, summands, steps: inj.steps })
    }
}
