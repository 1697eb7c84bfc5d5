//! Small random graphs shared by the exhaustive correctness checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vicinity_core::generators::{barabasi_albert, erdos_renyi};
use vicinity_core::Graph;

pub struct SuiteGraph {
    pub name: String,
    pub graph: Graph,
}

/// Alphas every suite graph is built with.
pub const SUITE_ALPHAS: [f64; 3] = [1.0, 4.0, 16.0];

/// One G(n,p) and two Barabasi-Albert graphs (k = 2 and 5) with
/// `n` drawn from 50..=300. G(n,p) uses `p = 2 ln n / n`, above the
/// connectivity threshold, so most draws are connected.
pub fn small_instance_suite(seed: u64) -> Vec<SuiteGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(3);
    let n = rng.gen_range(50..=300);
    let p = 2.0 * (n as f64).ln() / n as f64;
    out.push(SuiteGraph {
        name: format!("er(n={n},p={p:.4},seed={seed})"),
        graph: erdos_renyi(n, p, rng.gen()).expect("valid G(n,p)"),
    });
    for k in [2, 5] {
        let n = rng.gen_range(50..=300);
        out.push(SuiteGraph {
            name: format!("ba(n={n},k={k},seed={seed})"),
            graph: barabasi_albert(n, k, rng.gen()).expect("valid BA"),
        });
    }
    out
}
