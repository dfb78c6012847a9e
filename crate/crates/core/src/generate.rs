//! Seeded random graph generators.
//!
//! All randomness comes from ChaCha8 (`rand_chacha` 0.3) seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. Independent sub-streams are split off
//! with [`Seed::stream`], which selects ChaCha stream number `k` on the same
//! key. Pairs are visited in lexicographic order `(u, v)`, `u < v`, and one
//! uniform `f64` is drawn per pair whose probability is strictly inside
//! `(0, 1)`, so a given seed always reproduces the same graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::scalar::Scalar;
use crate::template::WeightedTemplate;
use crate::vertex_set::VertexSet;

pub const PRNG_NAME: &str = "chacha8/rand_chacha-0.3";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `k` under the same seed.
    pub fn stream(self, k: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(k);
        rng
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Block membership for planted generators, kept beside the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub blocks: Vec<Vec<usize>>,
}

impl BlockLayout {
    pub fn block(&self, i: usize, n: usize) -> VertexSet {
        VertexSet::from_indices(n, self.blocks[i].iter().copied())
    }

    pub fn block_of(&self, n: usize) -> Vec<usize> {
        let mut owner = vec![usize::MAX; n];
        for (b, verts) in self.blocks.iter().enumerate() {
            for &v in verts {
                owner[v] = b;
            }
        }
        owner
    }

    pub fn consecutive(sizes: &[usize]) -> Self {
        let mut start = 0;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let b: Vec<usize> = (start..start + s).collect();
                start += s;
                b
            })
            .collect();
        BlockLayout { blocks }
    }
}

#[derive(Clone, Debug)]
pub struct Planted {
    pub graph: Graph,
    pub layout: BlockLayout,
}

fn draw(rng: &mut ChaCha8Rng, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.gen::<f64>() < p
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::invalid(format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

/// Binomial random graph `G(n, p)`.
pub fn gen_gnp(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    check_probability(p)?;
    let mut rng = seed.rng();
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if draw(&mut rng, p) {
                b.add_edge(u, v);
            }
        }
    }
    Ok(b.build())
}

/// Blow-up of a weighted template: blocks are consecutive index ranges and a
/// pair in blocks `(i, j)` is an edge with probability `weights[i][j]`.
pub fn expand_template<T: Scalar>(t: &WeightedTemplate<T>, seed: Seed) -> Result<Planted> {
    let n = t.total_vertices();
    if n < 2 {
        return Err(Error::invalid(
            "template must expand to at least 2 vertices",
        ));
    }
    let k = t.k();
    let probs: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| t.weight(i, j).as_f64()).collect())
        .collect();
    for row in &probs {
        for &p in row {
            check_probability(p)?;
        }
    }
    let layout = BlockLayout::consecutive(t.block_sizes());
    let owner = layout.block_of(n);
    let mut rng = seed.rng();
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if draw(&mut rng, probs[owner[u]][owner[v]]) {
                b.add_edge(u, v);
            }
        }
    }
    Ok(Planted {
        graph: b.build(),
        layout,
    })
}

/// Four blocks of size `n/4`: `V1`, `V2` cliques, `V3`, `V4` independent and
/// complete to each other, and a seeded random bipartite graph of density 1/2
/// between `V1 ∪ V2` and `V3 ∪ V4`. Density 1/2 with about `n³/8` labelled
/// triangles, yet far from quasirandom.
pub fn build_four_block_counterexample(n: usize, seed: Seed) -> Result<Planted> {
    if n < 8 || n % 4 != 0 {
        return Err(Error::invalid(format!(
            "counterexample needs n >= 8 divisible by 4, got {n}"
        )));
    }
    let q = n / 4;
    let layout = BlockLayout::consecutive(&[q, q, q, q]);
    let owner = layout.block_of(n);
    let mut rng = seed.rng();
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let edge = match (owner[u], owner[v]) {
                (0, 0) | (1, 1) => true,
                (2, 3) => true,
                (0 | 1, 2 | 3) => draw(&mut rng, 0.5),
                _ => false,
            };
            if edge {
                b.add_edge(u, v);
            }
        }
    }
    Ok(Planted {
        graph: b.build(),
        layout,
    })
}
