use std::fmt;

use super::module::Module;
use super::ModuleError;
use crate::ff::{Matrix, Rref};

/// An equivariant linear map, stored as a (target.dim x source.dim) matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleMap {
    source: Module,
    target: Module,
    mat: Matrix,
}

impl fmt::Debug for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleMap({} -> {}) {:?}", self.source.dim(), self.target.dim(), self.mat)
    }
}

/// A submodule together with its inclusion.
#[derive(Clone, Debug)]
pub struct Submodule {
    pub module: Module,
    pub inclusion: ModuleMap,
}

/// A quotient module together with its projection.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub module: Module,
    pub projection: ModuleMap,
}

#[derive(Clone, Debug)]
pub struct ImageKernel {
    pub image: Submodule,
    pub kernel: Submodule,
    pub cokernel: Quotient,
}

impl ModuleMap {
    /// Checked constructor: shape, field and equivariance.
    pub fn new(source: &Module, target: &Module, mat: Matrix) -> Result<ModuleMap, ModuleError> {
        source.same_context(target)?;
        if mat.field() != source.field() {
            return Err(ModuleError::Mismatch(format!("matrix over {}, modules over {}", mat.field(), source.field())));
        }
        if mat.rows() != target.dim() || mat.cols() != source.dim() {
            return Err(ModuleError::Mismatch(format!(
                "matrix is {}x{}, expected {}x{}",
                mat.rows(),
                mat.cols(),
                target.dim(),
                source.dim()
            )));
        }
        let f = ModuleMap::new_unchecked(source.clone(), target.clone(), mat);
        if let Some(s) = f.first_violation() {
            return Err(ModuleError::NotEquivariant(format!(
                "fails to commute with generator {}",
                source.group().generator_names()[s]
            )));
        }
        Ok(f)
    }

    pub(crate) fn new_unchecked(source: Module, target: Module, mat: Matrix) -> ModuleMap {
        debug_assert_eq!((mat.rows(), mat.cols()), (target.dim(), source.dim()));
        ModuleMap { source, target, mat }
    }

    pub fn zero(source: &Module, target: &Module) -> ModuleMap {
        let mat = Matrix::zeros(source.field(), target.dim(), source.dim());
        ModuleMap::new_unchecked(source.clone(), target.clone(), mat)
    }

    pub fn identity(m: &Module) -> ModuleMap {
        ModuleMap::new_unchecked(m.clone(), m.clone(), Matrix::identity(m.field(), m.dim()))
    }

    pub fn source(&self) -> &Module {
        &self.source
    }
    pub fn target(&self) -> &Module {
        &self.target
    }
    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }
    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    fn first_violation(&self) -> Option<usize> {
        (0..self.source.gens().len())
            .find(|&s| self.target.gen(s).mul(&self.mat) != self.mat.mul(self.source.gen(s)))
    }

    /// Whether the matrix commutes with every generator.
    pub fn is_equivariant(&self) -> bool {
        self.first_violation().is_none()
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &ModuleMap) -> Result<ModuleMap, ModuleError> {
        if other.target != self.source {
            return Err(ModuleError::Mismatch(format!(
                "cannot compose: target of dim {} is not the source of dim {}",
                other.target.dim(),
                self.source.dim()
            )));
        }
        Ok(ModuleMap::new_unchecked(other.source.clone(), self.target.clone(), self.mat.mul(&other.mat)))
    }

    /// Composition trusting that `other.target` is `self.source`.
    pub(crate) fn after(&self, other: &ModuleMap) -> ModuleMap {
        debug_assert_eq!(other.target.dim(), self.source.dim());
        ModuleMap::new_unchecked(other.source.clone(), self.target.clone(), self.mat.mul(&other.mat))
    }

    fn check_parallel(&self, other: &ModuleMap) -> Result<(), ModuleError> {
        if self.source != other.source || self.target != other.target {
            return Err(ModuleError::Mismatch("maps have different source or target".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ModuleMap) -> Result<ModuleMap, ModuleError> {
        self.check_parallel(other)?;
        Ok(ModuleMap::new_unchecked(self.source.clone(), self.target.clone(), self.mat.add(&other.mat)))
    }

    pub fn sub(&self, other: &ModuleMap) -> Result<ModuleMap, ModuleError> {
        self.check_parallel(other)?;
        Ok(ModuleMap::new_unchecked(self.source.clone(), self.target.clone(), self.mat.sub(&other.mat)))
    }

    pub fn scaled(&self, c: u8) -> ModuleMap {
        ModuleMap::new_unchecked(self.source.clone(), self.target.clone(), self.mat.scaled(c))
    }

    /// Linear combination of parallel maps; all share the first map's source and target.
    pub fn combination(source: &Module, target: &Module, maps: &[ModuleMap], coeffs: &[u8]) -> ModuleMap {
        let mut mat = Matrix::zeros(source.field(), target.dim(), source.dim());
        for (m, &c) in maps.iter().zip(coeffs) {
            if c != 0 {
                mat.add_scaled(c, &m.mat);
            }
        }
        ModuleMap::new_unchecked(source.clone(), target.clone(), mat)
    }

    /// Rebuild a map from a row-major flattened matrix.
    pub fn from_flat(source: &Module, target: &Module, flat: Vec<u8>) -> ModuleMap {
        let mat = Matrix::from_data(source.field(), target.dim(), source.dim(), flat);
        ModuleMap::new_unchecked(source.clone(), target.clone(), mat)
    }

    /// Row-major flattening, length target.dim * source.dim.
    pub fn flatten(&self) -> Vec<u8> {
        self.mat.flatten()
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }
    pub fn rank(&self) -> usize {
        self.mat.rank()
    }
    pub fn is_injective(&self) -> bool {
        self.rank() == self.source.dim()
    }
    pub fn is_surjective(&self) -> bool {
        self.rank() == self.target.dim()
    }

    /// Transpose, from dual(target) to dual(source).
    pub fn dual(&self) -> ModuleMap {
        ModuleMap::new_unchecked(self.target.dual(), self.source.dual(), self.mat.transpose())
    }

    /// The map `M -> N_1 + ... + N_r` with components `maps[i]: M -> N_i`.
    pub fn into_sum(target: &Module, maps: &[ModuleMap]) -> ModuleMap {
        let source = maps[0].source.clone();
        let parts: Vec<&Matrix> = maps.iter().map(|m| &m.mat).collect();
        let mat = Matrix::vstack_all(source.field(), source.dim(), &parts);
        ModuleMap::new_unchecked(source, target.clone(), mat)
    }

    /// The map `M_1 + ... + M_r -> N` with components `maps[i]: M_i -> N`.
    pub fn from_sum(source: &Module, maps: &[ModuleMap]) -> ModuleMap {
        let target = maps[0].target.clone();
        let mut mat = Matrix::zeros(source.field(), target.dim(), source.dim());
        let mut c0 = 0;
        for m in maps {
            mat.set_block(0, c0, &m.mat);
            c0 += m.source.dim();
        }
        ModuleMap::new_unchecked(source.clone(), target, mat)
    }

    pub fn image(&self) -> Submodule {
        let Rref { reduced, pivots } = self.mat.transpose().rref();
        let basis = reduced.select_rows(&(0..pivots.len()).collect::<Vec<_>>()).transpose();
        submodule(&self.target, basis, &pivots)
    }

    pub fn kernel(&self) -> Submodule {
        let Rref { reduced, pivots } = self.mat.rref();
        let basis = crate::ff::nullspace_from_rref(&reduced, &pivots);
        let mut is_pivot = vec![false; self.source.dim()];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.source.dim()).filter(|&c| !is_pivot[c]).collect();
        submodule(&self.source, basis, &free)
    }

    pub fn cokernel(&self) -> Quotient {
        quotient_by(&self.target, &self.mat)
    }
}

/// Submodule spanned by the columns of `basis`, where the coordinates of a vector
/// in the span are its entries at `coord_rows`.
pub(crate) fn submodule(m: &Module, basis: Matrix, coord_rows: &[usize]) -> Submodule {
    let k = basis.cols();
    let gens = m.gens().iter().map(|g| g.mul(&basis).select_rows(coord_rows)).collect();
    let sub = m.sibling(k, gens);
    let inclusion = ModuleMap::new_unchecked(sub.clone(), m.clone(), basis);
    Submodule { module: sub, inclusion }
}

/// Quotient of `m` by the column span of `span` (rows = m.dim). The quotient's
/// coordinates are the non-pivot coordinates of the span's reduced echelon basis.
pub(crate) fn quotient_by(m: &Module, span: &Matrix) -> Quotient {
    let f = m.field();
    let d = m.dim();
    let Rref { reduced, pivots } = span.transpose().rref();
    let mut is_pivot = vec![false; d];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let comp: Vec<usize> = (0..d).filter(|&c| !is_pivot[c]).collect();
    let mut q = Matrix::zeros(f, comp.len(), d);
    for (j, &c) in comp.iter().enumerate() {
        q.set(j, c, 1);
    }
    for (i, &p) in pivots.iter().enumerate() {
        for (j, &c) in comp.iter().enumerate() {
            q.set(j, p, f.neg(reduced.get(i, c)));
        }
    }
    let gens = m.gens().iter().map(|g| q.mul(g).select_cols(&comp)).collect();
    let module = m.sibling(comp.len(), gens);
    let projection = ModuleMap::new_unchecked(m.clone(), module.clone(), q);
    Quotient { module, projection }
}

pub fn image_kernel(f: &ModuleMap) -> ImageKernel {
    ImageKernel { image: f.image(), kernel: f.kernel(), cokernel: f.cokernel() }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::ff::Field;
    use crate::group::{GroupData, GroupPreset};

    fn c3() -> (Arc<GroupData>, Field) {
        let g = Arc::new(GroupData::from_preset(&GroupPreset::Cyclic(3)).unwrap());
        (g, Field::prime(3).unwrap())
    }

    fn valid(f: &ModuleMap) {
        assert!(f.is_equivariant());
        Module::new(f.source().group(), f.source().field(), f.source().gens().to_vec()).unwrap();
        Module::new(f.target().group(), f.target().field(), f.target().gens().to_vec()).unwrap();
    }

    #[test]
    fn identity_image_kernel() {
        let (g, f) = c3();
        let kg = Module::regular(&g, &f);
        let ik = image_kernel(&ModuleMap::identity(&kg));
        assert_eq!(ik.image.module.dim(), 3);
        assert_eq!(ik.kernel.module.dim(), 0);
        assert_eq!(ik.cokernel.module.dim(), 0);
    }

    #[test]
    fn one_minus_x_on_regular() {
        let (g, f) = c3();
        let kg = Module::regular(&g, &f);
        let x = kg.gen(0).clone();
        let mat = Matrix::identity(&f, 3).sub(&x);
        let map = ModuleMap::new(&kg, &kg, mat).unwrap();
        let ik = image_kernel(&map);
        assert_eq!(ik.kernel.module.dim(), 1);
        assert_eq!(ik.image.module.dim(), 2);
        assert_eq!(ik.cokernel.module.dim(), 1);
        for m in [&ik.image.inclusion, &ik.kernel.inclusion, &ik.cokernel.projection] {
            valid(m);
        }
        assert!(ik.cokernel.projection.after(&map).is_zero());
        assert!(map.after(&ik.kernel.inclusion).is_zero());
    }

    #[test]
    fn augmentation() {
        let (g, f) = c3();
        let kg = Module::regular(&g, &f);
        let k = Module::trivial(&g, &f);
        let aug = ModuleMap::new(&kg, &k, Matrix::from_ints(&f, &[[1, 1, 1]])).unwrap();
        let ik = image_kernel(&aug);
        assert_eq!(ik.kernel.module.dim(), 2);
        assert_eq!(ik.cokernel.module.dim(), 0);
        valid(&ik.kernel.inclusion);
    }

    #[test]
    fn non_equivariant_rejected() {
        let (g, f) = c3();
        let kg = Module::regular(&g, &f);
        let k = Module::trivial(&g, &f);
        let bad = Matrix::from_ints(&f, &[[1, 0, 0]]);
        assert!(matches!(ModuleMap::new(&kg, &k, bad), Err(ModuleError::NotEquivariant(_))));
    }

    #[test]
    fn dual_map_contravariant() {
        let (g, f) = c3();
        let kg = Module::regular(&g, &f);
        let a = ModuleMap::new(&kg, &kg, Matrix::identity(&f, 3).sub(kg.gen(0))).unwrap();
        let b = ModuleMap::new(&kg, &kg, kg.gen(0).clone()).unwrap();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.dual(), b.dual().compose(&a.dual()).unwrap());
        assert_eq!(a.dual().dual(), a);
        assert!(a.dual().is_equivariant());
    }
}
