//! Injective and surjective replacements, cofibres, fibres and suspensions in
//! the stable module category.

mod free;
mod replace;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::ff::Field;
use crate::group::{GroupData, Module, ModuleError, ModuleMap};
use crate::hom::{PHom, StableHom};
use crate::projective::{ProjectiveError, ProjectiveTable};

pub use free::ProjectiveFree;
pub use replace::{InjStep, ReplaceOptions, Replacement};

/// Operations in the stable category of kG-modules for a fixed group and field.
/// Holds the projective table and caches of suspended trivial modules and
/// injective hulls; caches are shared behind mutexes and never change results.
pub struct StableCategory {
    table: ProjectiveTable,
    trivial: Module,
    spheres: Mutex<HashMap<i64, Module>>,
    hulls: Mutex<HashMap<Module, Hull>>,
}

#[derive(Clone)]
struct Hull {
    map: ModuleMap,
    into_free: Arc<Vec<ModuleMap>>,
}

/// A cofibre (or fibre) with the leg of the triangle that lands in (or leaves) it.
#[derive(Clone, Debug)]
pub struct Cone {
    pub module: Module,
    pub leg: ModuleMap,
}

impl StableCategory {
    pub fn new(group: &Arc<GroupData>, field: &Field) -> Result<StableCategory, ProjectiveError> {
        Ok(Self::from_table(ProjectiveTable::new(group, field)?))
    }

    pub fn from_table(table: ProjectiveTable) -> StableCategory {
        let trivial = Module::trivial(table.group(), table.field());
        let mut spheres = HashMap::new();
        spheres.insert(0, trivial.clone());
        StableCategory { table, trivial, spheres: Mutex::new(spheres), hulls: Mutex::new(HashMap::new()) }
    }

    pub fn table(&self) -> &ProjectiveTable {
        &self.table
    }
    pub fn group(&self) -> &Arc<GroupData> {
        self.table.group()
    }
    pub fn field(&self) -> &Field {
        self.table.field()
    }
    pub fn trivial(&self) -> &Module {
        &self.trivial
    }
    pub fn zero(&self) -> Module {
        Module::zero(self.group(), self.field())
    }

    fn check(&self, m: &Module) -> Result<(), ModuleError> {
        m.same_context(&self.trivial)
    }

    /// Cokernel of the injective replacement, reduced to its projective-free part.
    /// The leg is `N -> L`.
    pub fn cofibre(&self, f: &ModuleMap) -> Result<Cone, ModuleError> {
        let raw = self.unreduced_cofibre(f)?;
        let free = self.projective_free_summand(&raw.module)?;
        Ok(Cone { module: free.core, leg: free.quotient.after(&raw.leg) })
    }

    /// Cokernel of the injective replacement, projective summands left in.
    pub(crate) fn unreduced_cofibre(&self, f: &ModuleMap) -> Result<Cone, ModuleError> {
        self.check(f.source())?;
        let rep = self.replace_with_inj(f)?;
        let quotient = rep.replaced.cokernel();
        let leg = quotient.projection.after(rep.original_inclusion());
        Ok(Cone { module: quotient.module, leg })
    }

    /// Dual of the cofibre of the dual map. The leg is `F -> M`.
    pub fn fibre(&self, f: &ModuleMap) -> Result<Cone, ModuleError> {
        let c = self.cofibre(&f.dual())?;
        let leg = c.leg.dual();
        let leg = ModuleMap::new_unchecked(leg.source().clone(), f.source().clone(), leg.into_matrix());
        Ok(Cone { module: c.module.dual(), leg })
    }

    pub fn suspend(&self, m: &Module) -> Result<Module, ModuleError> {
        Ok(self.cofibre(&ModuleMap::zero(m, &self.zero()))?.module)
    }

    pub fn desuspend(&self, m: &Module) -> Result<Module, ModuleError> {
        Ok(self.fibre(&ModuleMap::zero(&self.zero(), m))?.module)
    }

    /// `n`-fold suspension (desuspension for negative `n`); `n = 0` gives the
    /// projective-free core.
    pub fn suspension_power(&self, m: &Module, n: i64) -> Result<Module, ModuleError> {
        if *m == self.trivial {
            return self.sphere(n);
        }
        let mut cur = self.projective_free_summand(m)?.core;
        for _ in 0..n.unsigned_abs() {
            cur = if n > 0 { self.suspend(&cur)? } else { self.desuspend(&cur)? };
        }
        Ok(cur)
    }

    /// The suspended trivial module, cached for every step on the way.
    pub fn sphere(&self, n: i64) -> Result<Module, ModuleError> {
        if let Some(m) = self.spheres.lock().unwrap().get(&n) {
            return Ok(m.clone());
        }
        let step = n.signum();
        let prev = self.sphere(n - step)?;
        let m = if step > 0 { self.suspend(&prev)? } else { self.desuspend(&prev)? };
        self.spheres.lock().unwrap().insert(n, m.clone());
        Ok(m)
    }

    /// A minimal injective hull `M -> I`, where `I` is a sum of table projectives.
    pub fn injective_hull(&self, m: &Module) -> Result<ModuleMap, ModuleError> {
        Ok(self.hull(m)?.map)
    }

    fn hull(&self, m: &Module) -> Result<Hull, ModuleError> {
        self.check(m)?;
        if let Some(h) = self.hulls.lock().unwrap().get(m) {
            if h.map.source().ptr_eq(m) {
                return Ok(h.clone());
            }
            let rebase = |g: &ModuleMap| ModuleMap::new_unchecked(m.clone(), g.target().clone(), g.matrix().clone());
            return Ok(Hull { map: rebase(&h.map), into_free: Arc::new(h.into_free.iter().map(rebase).collect()) });
        }
        let rep = self.replace_with_inj(&ModuleMap::zero(m, &self.zero()))?;
        let into_free = rep.sum.projections[1..]
            .iter()
            .zip(&rep.summands)
            .map(|(p, &i)| self.table.inclusions()[i].after(&p.after(&rep.replaced)))
            .collect();
        let hull = Hull { map: rep.replaced, into_free: Arc::new(into_free) };
        self.hulls.lock().unwrap().insert(m.clone(), hull.clone());
        Ok(hull)
    }

    /// The maps `M -> N` factoring through a projective.
    pub fn phom(&self, m: &Module, n: &Module) -> Result<PHom, ModuleError> {
        PHom::new(m, self.hull(m)?.into_free, n)
    }

    pub fn is_stably_trivial(&self, f: &ModuleMap) -> Result<bool, ModuleError> {
        Ok(self.phom(f.source(), f.target())?.contains(f))
    }

    pub fn stable_hom(&self, m: &Module, n: &Module) -> Result<StableHom, ModuleError> {
        self.phom(m, n)?.stable_hom()
    }
}
