use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::old::{free_replace_with_inj, legacy_projective_free, old_suspend};
use super::HarnessError;
use crate::group::{Module, ModuleMap};
use crate::hom::hom_basis;
use crate::stable::StableCategory;

/// A replacement workload run under both strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "task")]
pub enum BenchTask {
    /// `S^n k` by iterated suspension (or desuspension for negative `n`).
    SuspendN { n: i64 },
    /// Projective-free part of the old-style `S^n k`.
    Projfree { n: i64 },
    /// Injective replacement of a seeded random map.
    Replace { seed: u64 },
}

impl BenchTask {
    pub fn label(&self) -> String {
        match self {
            BenchTask::SuspendN { n } => format!("suspend-{n}"),
            BenchTask::Projfree { n } => format!("projfree-{n}"),
            BenchTask::Replace { seed } => format!("replace-{seed}"),
        }
    }
}

/// Output dimension and wall time of one strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub dim: usize,
    /// Projective dimension added by the replacement, where meaningful.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub added: Option<usize>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub task: String,
    pub group: String,
    pub field: String,
    pub new: BenchRun,
    pub old: BenchRun,
    /// `old.dim - new.dim`.
    pub delta: i64,
}

impl BenchReport {
    pub fn is_consistent(&self) -> bool {
        self.new.dim <= self.old.dim && self.new.added.zip(self.old.added).is_none_or(|(n, o)| n <= o)
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T, HarnessError>) -> Result<(T, f64), HarnessError> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

/// `S^n k` by the old strategy: free hulls without reduction, desuspension
/// through duality.
pub fn old_sphere(cat: &StableCategory, n: i64) -> Result<Module, HarnessError> {
    let mut m = cat.trivial().clone();
    for _ in 0..n.unsigned_abs() {
        m = if n > 0 { old_suspend(cat, &m)? } else { old_suspend(cat, &m.dual())?.dual() };
    }
    Ok(m)
}

/// A seeded random equivariant map between two random modules.
pub fn random_map(cat: &StableCategory, seed: u64) -> Result<ModuleMap, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source = cat.create_random_module(rng.gen_range(0..=2), 2, 1, rng.gen())?.module().clone();
    let target = cat.create_random_module(rng.gen_range(0..=2), 2, 1, rng.gen())?.module().clone();
    let homs = hom_basis(&source, &target)?;
    let q = cat.field().order();
    let coeffs: Vec<u8> = (0..homs.dim()).map(|_| rng.gen_range(0..q) as u8).collect();
    Ok(homs.combination(&coeffs))
}

pub fn bench_replacement(cat: &StableCategory, task: BenchTask) -> Result<BenchReport, HarnessError> {
    let (new, old) = match task {
        BenchTask::SuspendN { n } => {
            let (new, ts) = timed(|| {
                let mut m = cat.trivial().clone();
                for _ in 0..n.unsigned_abs() {
                    m = if n > 0 { cat.suspend(&m)? } else { cat.desuspend(&m)? };
                }
                Ok(m)
            })?;
            let (old, to) = timed(|| old_sphere(cat, n))?;
            (BenchRun { dim: new.dim(), added: None, seconds: ts }, BenchRun { dim: old.dim(), added: None, seconds: to })
        }
        BenchTask::Projfree { n } => {
            let model = old_sphere(cat, n)?;
            let (new, ts) = timed(|| Ok(cat.projective_free_summand(&model)?.core))?;
            let (old, to) = timed(|| Ok(legacy_projective_free(cat, &model, 1)?))?;
            (BenchRun { dim: new.dim(), added: None, seconds: ts }, BenchRun { dim: old.dim(), added: None, seconds: to })
        }
        BenchTask::Replace { seed } => {
            let f = random_map(cat, seed)?;
            let (new, ts) = timed(|| Ok(cat.replace_with_inj(&f)?))?;
            let (old, to) = timed(|| Ok(free_replace_with_inj(cat, &f)?))?;
            (
                BenchRun { dim: new.replaced.target().dim(), added: Some(new.added_dim()), seconds: ts },
                BenchRun { dim: old.replaced.target().dim(), added: Some(old.added_dim), seconds: to },
            )
        }
    };
    Ok(BenchReport {
        task: task.label(),
        group: cat.group().name(),
        field: cat.field().to_string(),
        delta: old.dim as i64 - new.dim as i64,
        new,
        old,
    })
}
