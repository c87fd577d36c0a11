use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::CVector;
use crate::seed;
use crate::states::{self, DensityMatrix, ProductKet};

use super::ActiveLearningConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Anchor,
    Useful,
    Perturbed,
    Fresh,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolComposition {
    pub anchors: usize,
    pub useful: usize,
    pub perturbed: usize,
    pub fresh: usize,
}

/// Vertex set of the inner approximation of the separable set.
///
/// The first `dim_a·dim_b` entries are the computational-basis product
/// states. Each candidate caches its full product vector `a ⊗ b`, i.e. the
/// rank-one projector in factored form.
#[derive(Clone, Debug)]
pub struct CandidatePool {
    dim_a: usize,
    dim_b: usize,
    kets: Vec<ProductKet>,
    vectors: Vec<CVector>,
    origins: Vec<Origin>,
}

impl CandidatePool {
    pub fn anchors_only(dim_a: usize, dim_b: usize) -> Self {
        let mut pool = CandidatePool {
            dim_a,
            dim_b,
            kets: Vec::new(),
            vectors: Vec::new(),
            origins: Vec::new(),
        };
        for i in 0..dim_a {
            for j in 0..dim_b {
                pool.push(ProductKet::basis(dim_a, dim_b, i, j), Origin::Anchor);
            }
        }
        pool
    }

    /// Anchors plus Haar-random product states up to `size`.
    pub fn with_fresh(dim_a: usize, dim_b: usize, size: usize, seed: u64) -> Self {
        let mut pool = Self::anchors_only(dim_a, dim_b);
        pool.fill_fresh(size, seed);
        pool
    }

    pub(crate) fn fill_fresh(&mut self, size: usize, seed: u64) {
        let mut k = 0u64;
        while self.len() < size {
            let ket = states::random_product_ket(self.dim_a, self.dim_b, seed::derive_seed(seed, k));
            self.push(ket, Origin::Fresh);
            k += 1;
        }
    }

    pub fn push(&mut self, ket: ProductKet, origin: Origin) {
        debug_assert_eq!((ket.dim_a(), ket.dim_b()), (self.dim_a, self.dim_b));
        self.vectors.push(ket.vector());
        self.kets.push(ket);
        self.origins.push(origin);
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }

    pub fn n_anchors(&self) -> usize {
        self.dim()
    }

    pub fn is_anchor(&self, i: usize) -> bool {
        self.origins[i] == Origin::Anchor
    }

    pub fn ket(&self, i: usize) -> &ProductKet {
        &self.kets[i]
    }

    pub fn kets(&self) -> &[ProductKet] {
        &self.kets
    }

    pub fn vector(&self, i: usize) -> &CVector {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn origin(&self, i: usize) -> Origin {
        self.origins[i]
    }

    pub fn projector(&self, i: usize) -> DensityMatrix {
        states::product_projector(&self.kets[i])
    }

    pub fn composition(&self) -> PoolComposition {
        let mut c = PoolComposition::default();
        for o in &self.origins {
            match o {
                Origin::Anchor => c.anchors += 1,
                Origin::Useful => c.useful += 1,
                Origin::Perturbed => c.perturbed += 1,
                Origin::Fresh => c.fresh += 1,
            }
        }
        c
    }
}

/// Candidates worth keeping: every anchor, plus every other candidate whose
/// weight reaches `epsilon`. When no non-anchor qualifies, the heaviest
/// non-anchor is kept instead. Non-anchors come out heaviest first.
pub fn select_useful(weights: &[f64], pool: &CandidatePool, epsilon: f64) -> Vec<usize> {
    assert_eq!(weights.len(), pool.len(), "weights do not belong to this pool");
    let mut keep: Vec<usize> = (0..pool.len()).filter(|&i| pool.is_anchor(i)).collect();
    let mut useful: Vec<usize> = (0..pool.len())
        .filter(|&i| !pool.is_anchor(i) && weights[i] >= epsilon)
        .collect();
    if useful.is_empty() {
        if let Some(best) = (0..pool.len())
            .filter(|&i| !pool.is_anchor(i))
            .max_by(|&a, &b| weights[a].total_cmp(&weights[b]))
        {
            useful.push(best);
        }
    }
    useful.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    keep.extend(useful);
    keep
}

/// Builds the next pool: anchors, the `useful` candidates (heaviest first,
/// truncated if they do not fit), perturbed copies of them at scale `delta`,
/// then fresh Haar draws up to `cfg.pool_size`. At least
/// `ceil(fresh_fraction · pool_size)` slots are always fresh.
pub fn resample(
    dim_a: usize,
    dim_b: usize,
    useful: &[ProductKet],
    cfg: &ActiveLearningConfig,
    delta: f64,
    seed: u64,
) -> Result<CandidatePool> {
    let mut pool = CandidatePool::anchors_only(dim_a, dim_b);
    let fresh_min = (cfg.fresh_fraction * cfg.pool_size as f64).ceil() as usize;
    let room = cfg.pool_size.saturating_sub(pool.len() + fresh_min);
    let kept = useful.len().min(room);
    for k in &useful[..kept] {
        pool.push(k.clone(), Origin::Useful);
    }
    let budget = room - kept;
    let copies = budget.min(kept * cfg.resample_per_useful);
    // round-robin so the heaviest parents get the remainder
    let mut made = 0;
    'rounds: for r in 0..cfg.resample_per_useful {
        for (j, parent) in useful[..kept].iter().enumerate() {
            if made == copies {
                break 'rounds;
            }
            let s = seed::derive_path(seed, &[1, j as u64, r as u64]);
            pool.push(states::perturb_ket(parent, delta, s)?, Origin::Perturbed);
            made += 1;
        }
    }
    pool.fill_fresh(cfg.pool_size, seed::derive_seed(seed, 2));
    Ok(pool)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool_with(n_extra: usize) -> CandidatePool {
        CandidatePool::with_fresh(2, 2, 4 + n_extra, 3)
    }

    #[test]
    fn anchors_come_first() {
        let p = pool_with(10);
        assert_eq!(p.len(), 14);
        assert_eq!(p.n_anchors(), 4);
        for i in 0..4 {
            assert!(p.is_anchor(i));
            let proj = p.projector(i);
            assert!((proj.op().trace() - 1.0).abs() < 1e-12);
        }
        assert_eq!(
            p.composition(),
            PoolComposition { anchors: 4, useful: 0, perturbed: 0, fresh: 10 }
        );
    }

    #[test]
    fn threshold_selection() {
        let p = pool_with(4);
        let mut w = vec![0.0; 8];
        w[4] = 0.6;
        w[5] = 0.399;
        w[6] = 1e-9;
        w[7] = 1e-9;
        w[0] = 0.001 - 2e-9;
        let kept = select_useful(&w, &p, 1e-6);
        assert_eq!(kept, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn single_vertex_mass() {
        let p = pool_with(4);
        let mut w = vec![0.0; 8];
        w[6] = 1.0;
        assert_eq!(select_useful(&w, &p, 1e-6), vec![0, 1, 2, 3, 6]);
    }

    #[test]
    fn uniform_weights_all_kept() {
        let p = pool_with(6);
        let w = vec![0.1; 10];
        assert_eq!(select_useful(&w, &p, 1e-6).len(), 10);
    }

    #[test]
    fn empty_useful_falls_back_to_heaviest() {
        let p = pool_with(3);
        let w = vec![0.25, 0.25, 0.25, 0.25 - 1e-8, 0.0, 3e-9, 7e-9];
        assert_eq!(select_useful(&w, &p, 1e-6), vec![0, 1, 2, 3, 6]);
    }

    #[test]
    fn resample_without_useful_is_all_fresh() {
        let cfg = ActiveLearningConfig { pool_size: 40, ..Default::default() };
        let p = resample(2, 2, &[], &cfg, 0.1, 9).unwrap();
        assert_eq!(p.len(), 40);
        assert_eq!(p.composition(), PoolComposition { anchors: 4, useful: 0, perturbed: 0, fresh: 36 });
    }

    #[test]
    fn resample_zero_delta_duplicates_parents() {
        let cfg = ActiveLearningConfig { pool_size: 100, resample_per_useful: 3, ..Default::default() };
        let parents: Vec<ProductKet> = (0..2).map(|s| states::random_product_ket(2, 3, s)).collect();
        let p = resample(2, 3, &parents, &cfg, 0.0, 1).unwrap();
        assert_eq!(p.len(), 100);
        let c = p.composition();
        assert_eq!((c.anchors, c.useful, c.perturbed), (6, 2, 6));
        for i in 0..p.len() {
            if p.origin(i) == Origin::Perturbed {
                assert!(parents.contains(p.ket(i)));
            }
        }
    }

    #[test]
    fn resample_respects_fresh_floor_and_size() {
        let cfg = ActiveLearningConfig { pool_size: 60, resample_per_useful: 20, fresh_fraction: 0.25, ..Default::default() };
        let parents: Vec<ProductKet> = (0..10).map(|s| states::random_product_ket(2, 2, s)).collect();
        let p = resample(2, 2, &parents, &cfg, 0.1, 4).unwrap();
        assert_eq!(p.len(), 60);
        let c = p.composition();
        assert!(c.fresh >= 15, "{c:?}");
        assert_eq!(c.useful, 10);
        assert_eq!(c.anchors + c.useful + c.perturbed + c.fresh, 60);

        let again = resample(2, 2, &parents, &cfg, 0.1, 4).unwrap();
        assert_eq!(p.kets(), again.kets());
    }
}
