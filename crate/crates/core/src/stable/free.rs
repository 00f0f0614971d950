use super::StableCategory;
use crate::ff::RowEchelon;
use crate::group::{Module, ModuleError, ModuleMap};

/// `M` split as a projective-free core plus projective summands.
#[derive(Clone, Debug)]
pub struct ProjectiveFree {
    pub core: Module,
    /// Split surjection `M -> core`.
    pub quotient: ModuleMap,
    /// Injection of the projective part `P_1 + ... + P_r -> M`.
    pub projective_part: ModuleMap,
    /// Table index of each split-off projective.
    pub summands: Vec<usize>,
}

impl StableCategory {
    /// Greedily keep the components `P_i -> M` of a projective cover that raise the
    /// rank by `dim P_i`; their images are projective summands and the cokernel
    /// of their sum is the core.
    pub fn projective_free_summand(&self, m: &Module) -> Result<ProjectiveFree, ModuleError> {
        self.check(m)?;
        let zero = self.zero();
        let unchanged = |m: &Module| ProjectiveFree {
            core: m.clone(),
            quotient: ModuleMap::identity(m),
            projective_part: ModuleMap::zero(&zero, m),
            summands: Vec::new(),
        };
        if m.is_zero() {
            return Ok(unchanged(m));
        }
        let cover = self.replace_with_surj(&ModuleMap::zero(&zero, m))?;
        let mut ech = RowEchelon::new(m.field(), m.dim());
        let mut accepted = Vec::new();
        let mut summands = Vec::new();
        for (inc, &j) in cover.sum.inclusions[1..].iter().zip(&cover.summands) {
            let fi = cover.replaced.after(inc);
            let t = fi.matrix().transpose();
            let cols: Vec<Vec<u8>> = (0..t.rows()).map(|r| t.row(r).to_vec()).collect();
            if ech.rank_increase(&cols) == fi.source().dim() {
                ech.extend(cols);
                accepted.push(fi);
                summands.push(j);
            }
        }
        if accepted.is_empty() {
            return Ok(unchanged(m));
        }
        let sources: Vec<Module> = accepted.iter().map(|f| f.source().clone()).collect();
        let part_module = Module::sum(&sources)?;
        let projective_part = ModuleMap::from_sum(&part_module, &accepted);
        let q = projective_part.cokernel();
        Ok(ProjectiveFree { core: q.module, quotient: q.projection, projective_part, summands })
    }
}
