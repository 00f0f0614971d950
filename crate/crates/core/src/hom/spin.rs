use std::sync::Arc;

use crate::ff::{Matrix, Offer, TrackedEchelon};
use crate::group::Module;

/// A dependency found while spinning: `rho(elem) u_slot = sum_t c_t rho(g_t) u_{slot_t}`.
#[derive(Clone, Debug)]
pub(crate) struct Relation {
    pub slot: usize,
    pub elem: usize,
    pub coords: Vec<(usize, u8)>,
}

/// Spinning data for a module: a basis of vectors `w_t = rho(g_t) e_{seed(slot_t)}`
/// together with every linear dependency met along the way. An equivariant map
/// is determined by the images of the seeds, subject to the relations.
#[derive(Clone, Debug)]
pub struct Spin {
    pub(crate) seeds: Vec<usize>,
    pub(crate) elem: Vec<usize>,
    pub(crate) slot: Vec<usize>,
    pub(crate) relations: Vec<Relation>,
    pub(crate) basis_inv: Matrix,
}

impl Spin {
    pub fn new(m: &Module) -> Spin {
        let f = m.field();
        let d = m.dim();
        let group = m.group();
        let gen_idx = group.generator_indices();
        let mut ech = TrackedEchelon::new(f, d);
        let mut vectors: Vec<Vec<u8>> = Vec::with_capacity(d);
        let mut seeds = Vec::new();
        let mut elem = Vec::with_capacity(d);
        let mut slot = Vec::with_capacity(d);
        let mut relations = Vec::new();
        let mut next = 0;
        let transposed: Vec<Matrix> = m.gens().iter().map(Matrix::transpose).collect();
        for j in 0..d {
            if ech.is_full() {
                break;
            }
            let mut e = vec![0u8; d];
            e[j] = 1;
            if !matches!(ech.offer(&e), Offer::New(_)) {
                continue;
            }
            let s_slot = seeds.len();
            seeds.push(j);
            vectors.push(e);
            elem.push(0);
            slot.push(s_slot);
            while next < vectors.len() {
                let t = next;
                next += 1;
                for (s, gt) in transposed.iter().enumerate() {
                    let mut v = vec![0u8; d];
                    for (i, &c) in vectors[t].iter().enumerate() {
                        if c != 0 {
                            f.axpy(&mut v, c, gt.row(i));
                        }
                    }
                    let h = group.mul(gen_idx[s], elem[t]);
                    match ech.offer(&v) {
                        Offer::New(_) => {
                            vectors.push(v);
                            elem.push(h);
                            slot.push(slot[t]);
                        }
                        Offer::Dependent(c) => {
                            let coords = c.into_iter().enumerate().filter(|&(_, x)| x != 0).collect();
                            relations.push(Relation { slot: slot[t], elem: h, coords });
                        }
                    }
                }
            }
        }
        let basis_inv = Matrix::from_columns(f, d, &vectors).inverse().expect("spun vectors form a basis");
        Spin { seeds, elem, slot, relations, basis_inv }
    }

    /// Cached spin of a module.
    pub fn of(m: &Module) -> Arc<Spin> {
        m.spin_cache().get_or_init(|| Arc::new(Spin::new(m))).clone()
    }

    /// Standard basis indices that generate the module.
    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }
}
