//! Universal ghosts, range-restricted generating length, and random modules.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::group::{Module, ModuleError, ModuleMap};
use crate::hom::hom_basis;
use crate::stable::StableCategory;

/// One universal ghost out of a module for the sphere range `[-m, m]`.
#[derive(Clone, Debug)]
pub struct GhostStep {
    pub source: Module,
    pub range: u32,
    /// `(i, dim stable Hom(S^i k, N))` for each degree in range.
    pub sphere_dims: Vec<(i64, usize)>,
    /// Evaluation map from the sum of spheres.
    pub evaluation: ModuleMap,
    pub ghost: ModuleMap,
    pub target: Module,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    TrivialComposite,
    Cap,
}

/// Outcome of the generating-length iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthReport {
    pub fingerprint: String,
    pub range: u32,
    pub core_dim: usize,
    /// Present only when the iteration stopped at a stably trivial composite.
    pub gel: Option<usize>,
    /// Dimensions of the ghost targets that were built.
    pub step_dims: Vec<usize>,
    pub stopped_by: StopReason,
}

/// A module built by iterated random cofibres, with every intermediate stage.
#[derive(Clone, Debug)]
pub struct RandomModule {
    pub stages: Vec<Module>,
    pub length_bound: usize,
}

impl RandomModule {
    pub fn module(&self) -> &Module {
        self.stages.last().expect("at least one stage")
    }
}

/// Stable hash of a module's field, group and generator matrices (FNV-1a).
pub fn fingerprint(m: &Module) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    eat(m.field().to_string().as_bytes());
    eat(m.group().name().as_bytes());
    eat(&(m.dim() as u64).to_le_bytes());
    for g in m.gens() {
        eat(g.data());
    }
    format!("{h:016x}")
}

/// SplitMix64 finaliser, used to derive independent per-trial seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Lifted stable Hom bases from the spheres `S^i k`, `i` in `[-m, m]`, into a module.
struct SphereMaps {
    sphere_dims: Vec<(i64, usize)>,
    /// `(i, S^i k -> N)` in degree order.
    maps: Vec<(i64, ModuleMap)>,
}

impl StableCategory {
    fn sphere_maps(&self, n: &Module, m: u32) -> Result<SphereMaps, ModuleError> {
        let mut sphere_dims = Vec::new();
        let mut maps = Vec::new();
        for i in -(m as i64)..=(m as i64) {
            let sh = self.stable_hom(&self.sphere(i)?, n)?;
            sphere_dims.push((i, sh.dim()));
            maps.extend(sh.lifted.into_iter().map(|h| (i, h)));
        }
        Ok(SphereMaps { sphere_dims, maps })
    }

    fn ghost_from(&self, n: &Module, m: u32, sm: SphereMaps, reduce: bool) -> Result<GhostStep, ModuleError> {
        let evaluation = if sm.maps.is_empty() {
            ModuleMap::zero(&self.zero(), n)
        } else {
            let parts: Vec<Module> = sm.maps.iter().map(|(_, h)| h.source().clone()).collect();
            let maps: Vec<ModuleMap> = sm.maps.into_iter().map(|(_, h)| h).collect();
            ModuleMap::from_sum(&Module::sum(&parts)?, &maps)
        };
        let cone = if reduce { self.cofibre(&evaluation)? } else { self.unreduced_cofibre(&evaluation)? };
        Ok(GhostStep {
            source: n.clone(),
            range: m,
            sphere_dims: sm.sphere_dims,
            evaluation,
            ghost: cone.leg,
            target: cone.module,
        })
    }

    /// Cofibre leg of the evaluation map `sum_i (S^i k)^{d_i} -> N` built from
    /// lifts of stable Hom bases, `i` in `[-m, m]`.
    pub fn universal_ghost(&self, n: &Module, m: u32) -> Result<GhostStep, ModuleError> {
        let sm = self.sphere_maps(n, m)?;
        self.ghost_from(n, m, sm, true)
    }

    /// Whether `phi: M -> N` factors stably through the evaluation map, which
    /// by exactness means the next universal ghost kills it. Stable Hom lifts
    /// into the spheres suffice because PHom is already in the span.
    fn factors_through_spheres(&self, phi: &ModuleMap, sm: &SphereMaps) -> Result<bool, ModuleError> {
        let m = phi.source();
        let mut homs: Vec<(i64, Vec<ModuleMap>)> = Vec::new();
        for (i, h) in &sm.maps {
            if homs.last().is_none_or(|(d, _)| d != i) {
                homs.push((*i, self.stable_hom(m, h.source())?.lifted));
            }
        }
        let composites: Vec<(&ModuleMap, &[ModuleMap])> = sm
            .maps
            .iter()
            .map(|(i, h)| (h, homs.iter().find(|(d, _)| d == i).map_or(&[][..], |(_, b)| &b[..])))
            .collect();
        Ok(self.phom(m, phi.target())?.contains_modulo(phi, &composites))
    }

    /// Least `n` such that the `n`-fold composite of universal ghosts out of the
    /// projective-free core of `m` is stably trivial; `cap` defaults to core dim + 1.
    ///
    /// The composite `g_n ... g_1` is trivial exactly when `g_{n-1} ... g_1`
    /// factors through the `n`-th evaluation map, so the last ghost target is
    /// never built. Intermediate targets keep their projective summands, which
    /// are invisible stably.
    pub fn generating_length(&self, module: &Module, m: u32, cap: Option<usize>) -> Result<LengthReport, ModuleError> {
        let core = self.projective_free_summand(module)?.core;
        let mut report = LengthReport {
            fingerprint: fingerprint(module),
            range: m,
            core_dim: core.dim(),
            gel: Some(0),
            step_dims: Vec::new(),
            stopped_by: StopReason::TrivialComposite,
        };
        if core.is_zero() {
            return Ok(report);
        }
        let cap = cap.unwrap_or(core.dim() + 1);
        let mut composite = ModuleMap::identity(&core);
        for n in 1..=cap {
            let target = composite.target().clone();
            let sm = self.sphere_maps(&target, m)?;
            if self.factors_through_spheres(&composite, &sm)? {
                report.gel = Some(n);
                return Ok(report);
            }
            if n == cap {
                break;
            }
            let step = self.ghost_from(&target, m, sm, false)?;
            report.step_dims.push(step.target.dim());
            composite = step.ghost.after(&composite);
        }
        report.gel = None;
        report.stopped_by = StopReason::Cap;
        Ok(report)
    }

    fn random_sphere_sum(&self, rng: &mut ChaCha8Rng, summands: usize, degrees: RangeInclusive<i64>) -> Result<Module, ModuleError> {
        let count = rng.gen_range(1..=summands.max(1));
        let parts = (0..count)
            .map(|_| self.sphere(rng.gen_range(degrees.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Module::sum(&parts)
    }

    /// `R_0` is a random sum of spheres `S^i k`, `i` in `[-m, m]`; `R_{t+1}` is the
    /// cofibre of a random map from a fresh sphere sum into `R_t`. The fresh
    /// spheres have degrees in `[-m-1, m-1]`, so the cofibre is an extension of
    /// `R_t` by spheres inside the range and `gel_m(R_t) <= t + 1`.
    pub fn create_random_module(&self, steps: usize, summands: usize, m: u32, seed: u64) -> Result<RandomModule, ModuleError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = self.field().order();
        let m = m as i64;
        let mut stages = vec![self.random_sphere_sum(&mut rng, summands, -m..=m)?.forget_summands()];
        for _ in 0..steps {
            let w = self.random_sphere_sum(&mut rng, summands, -m - 1..=m - 1)?;
            let prev = stages.last().unwrap();
            let homs = hom_basis(&w, prev)?;
            let coeffs: Vec<u8> = (0..homs.dim()).map(|_| rng.gen_range(0..q) as u8).collect();
            let f = homs.combination(&coeffs);
            stages.push(self.cofibre(&f)?.module);
        }
        Ok(RandomModule { stages, length_bound: steps + 1 })
    }
}

#[cfg(test)]
mod tests;
