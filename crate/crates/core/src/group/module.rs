use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use super::map::ModuleMap;
use super::perm::{default_names, GroupData};
use super::ModuleError;
use crate::ff::{Field, Matrix};
use crate::hom::Spin;

/// A finite-dimensional kG-module: one invertible matrix per group generator,
/// acting on column vectors.
#[derive(Clone)]
pub struct Module(Arc<ModuleInner>);

struct ModuleInner {
    group: Arc<GroupData>,
    field: Field,
    dim: usize,
    gens: Vec<Matrix>,
    summands: Vec<Module>,
    dual: OnceLock<Module>,
    elements: OnceLock<Arc<Vec<Matrix>>>,
    elements_t: OnceLock<Arc<Vec<Matrix>>>,
    spin: OnceLock<Arc<Spin>>,
}

/// A direct sum with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub module: Module,
    pub inclusions: Vec<ModuleMap>,
    pub projections: Vec<ModuleMap>,
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Module(dim {} over {} for {})", self.dim(), self.field(), self.group().name())
    }
}

impl PartialEq for Module {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.dim == other.0.dim
                && self.0.field == other.0.field
                && (Arc::ptr_eq(&self.0.group, &other.0.group) || self.0.group == other.0.group)
                && self.0.gens == other.0.gens)
    }
}
impl Eq for Module {}

impl Hash for Module {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.field.spec().hash(state);
        self.0.dim.hash(state);
        self.0.gens.hash(state);
    }
}

/// Element matrices by breadth-first closure, `mat[e*s] = mat[e] * mat[s]`.
/// Returns `Err((e, s))` at the first inconsistent pair.
fn close_elements(group: &GroupData, field: &Field, dim: usize, gens: &[Matrix]) -> Result<Vec<Matrix>, (usize, usize)> {
    let n = group.order();
    let mut mats: Vec<Option<Matrix>> = vec![None; n];
    mats[0] = Some(Matrix::identity(field, dim));
    for e in 0..n {
        let me = mats[e].clone().expect("breadth-first order reaches parents first");
        for (s, g) in gens.iter().enumerate() {
            let target = group.mul(e, group.generator_indices()[s]);
            let prod = me.mul(g);
            match &mats[target] {
                Some(m) if *m != prod => return Err((e, s)),
                Some(_) => {}
                None => mats[target] = Some(prod),
            }
        }
    }
    Ok(mats.into_iter().map(Option::unwrap).collect())
}

impl Module {
    /// Checked constructor: generator matrices must be square, of equal size,
    /// invertible, and satisfy every relation of the group.
    pub fn new(group: &Arc<GroupData>, field: &Field, gens: Vec<Matrix>) -> Result<Module, ModuleError> {
        if gens.len() != group.num_generators() {
            return Err(ModuleError::NotARepresentation(format!(
                "{} matrices for {} generators",
                gens.len(),
                group.num_generators()
            )));
        }
        let dim = gens.first().map_or(0, |g| g.rows());
        for (i, g) in gens.iter().enumerate() {
            if g.field() != field {
                return Err(ModuleError::Mismatch(format!("generator {i} is over {}, expected {field}", g.field())));
            }
            if g.rows() != dim || g.cols() != dim {
                return Err(ModuleError::NotARepresentation(format!(
                    "generator {i} has shape {}x{}, expected {dim}x{dim}",
                    g.rows(),
                    g.cols()
                )));
            }
            if g.rank() != dim {
                return Err(ModuleError::NotARepresentation(format!("generator {} is singular", group.generator_names()[i])));
            }
        }
        let elements = close_elements(group, field, dim, &gens).map_err(|(e, s)| {
            ModuleError::NotARepresentation(format!(
                "relation violated at element {e} times generator {}",
                group.generator_names()[s]
            ))
        })?;
        let m = Module::from_parts(group.clone(), field.clone(), dim, gens);
        let _ = m.0.elements.set(Arc::new(elements));
        Ok(m)
    }

    pub(crate) fn from_parts(group: Arc<GroupData>, field: Field, dim: usize, gens: Vec<Matrix>) -> Module {
        Self::with_summands(group, field, dim, gens, Vec::new())
    }

    fn with_summands(group: Arc<GroupData>, field: Field, dim: usize, gens: Vec<Matrix>, summands: Vec<Module>) -> Module {
        Module(Arc::new(ModuleInner {
            group,
            field,
            dim,
            gens,
            summands,
            dual: OnceLock::new(),
            elements: OnceLock::new(),
            elements_t: OnceLock::new(),
            spin: OnceLock::new(),
        }))
    }

    pub fn zero(group: &Arc<GroupData>, field: &Field) -> Module {
        let gens = vec![Matrix::zeros(field, 0, 0); group.num_generators()];
        Module::from_parts(group.clone(), field.clone(), 0, gens)
    }

    pub fn trivial(group: &Arc<GroupData>, field: &Field) -> Module {
        let gens = vec![Matrix::identity(field, 1); group.num_generators()];
        Module::from_parts(group.clone(), field.clone(), 1, gens)
    }

    /// One-dimensional module with generator `i` acting by the scalar `values[i]`.
    pub fn character(group: &Arc<GroupData>, field: &Field, values: &[i64]) -> Result<Module, ModuleError> {
        let gens = values.iter().map(|&v| Matrix::from_data(field, 1, 1, vec![field.from_int(v)])).collect();
        Module::new(group, field, gens)
    }

    /// The regular module kG; generator `g` sends basis vector `e_h` to `e_{gh}`.
    pub fn regular(group: &Arc<GroupData>, field: &Field) -> Module {
        let n = group.order();
        let gens = group
            .generator_indices()
            .iter()
            .map(|&g| {
                let mut m = Matrix::zeros(field, n, n);
                for h in 0..n {
                    m.set(group.mul(g, h), h, 1);
                }
                m
            })
            .collect();
        Module::from_parts(group.clone(), field.clone(), n, gens)
    }

    pub fn group(&self) -> &Arc<GroupData> {
        &self.0.group
    }
    pub fn field(&self) -> &Field {
        &self.0.field
    }
    pub fn dim(&self) -> usize {
        self.0.dim
    }
    pub fn is_zero(&self) -> bool {
        self.0.dim == 0
    }
    pub fn gens(&self) -> &[Matrix] {
        &self.0.gens
    }
    pub fn gen(&self, i: usize) -> &Matrix {
        &self.0.gens[i]
    }
    /// Recorded direct-sum decomposition, empty when none was recorded.
    pub fn summands(&self) -> &[Module] {
        &self.0.summands
    }
    pub fn ptr_eq(&self, other: &Module) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn spin_cache(&self) -> &OnceLock<Arc<Spin>> {
        &self.0.spin
    }

    /// Matrices of every group element, indexed like the group's element list.
    pub fn element_matrices(&self) -> Arc<Vec<Matrix>> {
        self.0
            .elements
            .get_or_init(|| {
                let mats = close_elements(&self.0.group, &self.0.field, self.0.dim, &self.0.gens)
                    .expect("module constructed without a consistent action");
                Arc::new(mats)
            })
            .clone()
    }

    /// Transposes of [`Module::element_matrices`].
    pub fn element_matrices_transposed(&self) -> Arc<Vec<Matrix>> {
        self.0
            .elements_t
            .get_or_init(|| Arc::new(self.element_matrices().iter().map(Matrix::transpose).collect()))
            .clone()
    }

    pub fn element_matrix(&self, e: usize) -> Matrix {
        self.element_matrices()[e].clone()
    }

    pub fn same_context(&self, other: &Module) -> Result<(), ModuleError> {
        if self.0.field != other.0.field {
            return Err(ModuleError::Mismatch(format!("fields {} and {}", self.0.field, other.0.field)));
        }
        if !Arc::ptr_eq(&self.0.group, &other.0.group) && self.0.group != other.0.group {
            return Err(ModuleError::Mismatch(format!(
                "groups {} and {}",
                self.0.group.name(),
                other.0.group.name()
            )));
        }
        Ok(())
    }

    /// Generator `g` acts by the transpose of the inverse of its original matrix.
    pub fn dual(&self) -> Module {
        self.0
            .dual
            .get_or_init(|| {
                let gens = self
                    .0
                    .gens
                    .iter()
                    .map(|g| g.inverse().expect("generator matrices are invertible").transpose())
                    .collect();
                let summands = self.0.summands.iter().map(Module::dual).collect();
                Module::with_summands(self.0.group.clone(), self.0.field.clone(), self.0.dim, gens, summands)
            })
            .clone()
    }

    /// Direct sum with block-diagonal generators. The summands are recorded so
    /// that Hom computations can work block by block.
    pub fn direct_sum(parts: &[Module]) -> Result<DirectSum, ModuleError> {
        let first = parts
            .first()
            .ok_or_else(|| ModuleError::Mismatch("direct sum of no modules".into()))?;
        for p in &parts[1..] {
            first.same_context(p)?;
        }
        let field = first.field().clone();
        let group = first.group().clone();
        let dim: usize = parts.iter().map(Module::dim).sum();
        let gens = (0..group.num_generators())
            .map(|s| {
                let blocks: Vec<&Matrix> = parts.iter().map(|p| p.gen(s)).collect();
                Matrix::block_diag(&field, &blocks)
            })
            .collect();
        let mut summands = Vec::new();
        for p in parts {
            if p.summands().is_empty() {
                if !p.is_zero() {
                    summands.push(p.clone());
                }
            } else {
                summands.extend(p.summands().iter().cloned());
            }
        }
        if parts.len() < 2 {
            summands.clear();
        }
        let module = Module::with_summands(group, field.clone(), dim, gens, summands);
        let mut inclusions = Vec::with_capacity(parts.len());
        let mut projections = Vec::with_capacity(parts.len());
        let mut offset = 0;
        for p in parts {
            let mut inc = Matrix::zeros(&field, dim, p.dim());
            let mut proj = Matrix::zeros(&field, p.dim(), dim);
            for i in 0..p.dim() {
                inc.set(offset + i, i, 1);
                proj.set(i, offset + i, 1);
            }
            inclusions.push(ModuleMap::new_unchecked(p.clone(), module.clone(), inc));
            projections.push(ModuleMap::new_unchecked(module.clone(), p.clone(), proj));
            offset += p.dim();
        }
        Ok(DirectSum { module, inclusions, projections })
    }

    /// Convenience wrapper returning only the sum module.
    pub fn sum(parts: &[Module]) -> Result<Module, ModuleError> {
        Ok(Module::direct_sum(parts)?.module)
    }

    /// Restriction to the subgroup generated by the given words in this module's
    /// generator names; the words become the subgroup's generators.
    pub fn restrict(&self, words: &[&str]) -> Result<Module, ModuleError> {
        let group = self.group();
        let elems = words
            .iter()
            .map(|w| group.parse_word(w).map(|p| group.eval_word(&p)))
            .collect::<Result<Vec<_>, _>>()?;
        let fallback = default_names(words.len());
        let names = words
            .iter()
            .zip(fallback)
            .map(|(w, d)| {
                let plain = !w.is_empty() && w.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                if plain && !w.starts_with(|c: char| c.is_ascii_digit()) {
                    w.to_string()
                } else {
                    d
                }
            })
            .collect();
        let sub = Arc::new(group.subgroup(&elems, names)?);
        let mats = self.element_matrices();
        let gens = elems.iter().map(|&e| mats[e].clone()).collect();
        Ok(Module::from_parts(sub, self.field().clone(), self.dim(), gens))
    }

    /// Module with the given generator matrices over the same group, without
    /// checking relations. Used for modules built from known-good data.
    pub(crate) fn sibling(&self, dim: usize, gens: Vec<Matrix>) -> Module {
        Module::from_parts(self.0.group.clone(), self.0.field.clone(), dim, gens)
    }

    /// Same action, summand record dropped.
    pub fn forget_summands(&self) -> Module {
        if self.0.summands.is_empty() {
            return self.clone();
        }
        self.sibling(self.0.dim, self.0.gens.clone())
    }
}
