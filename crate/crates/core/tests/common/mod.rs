#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sic_core::{Party, ProblemInstance, SubsetMask};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid instance: each message lands in W, A or B of each party,
/// and prohibited messages are drawn from B.
pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, secure: bool) -> ProblemInstance {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let parties = (0..m)
        .map(|_| {
            let eavesdropper = secure && rng.gen_bool(0.15);
            let mut w = SubsetMask::EMPTY;
            let mut a = SubsetMask::EMPTY;
            for k in 1..=n {
                match rng.gen_range(0..10) {
                    0..=2 if !eavesdropper => w = w.with(k),
                    3..=6 => a = a.with(k),
                    _ => {}
                }
            }
            let b = (w | a).complement(n);
            let p = if secure {
                SubsetMask::from_messages(b.messages().filter(|_| rng.gen_bool(0.4)))
            } else {
                SubsetMask::EMPTY
            };
            Party::new(n, w, a, p)
        })
        .collect();
    ProblemInstance::new(n, parties).expect("generated instance is valid")
}

pub fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (SubsetMask, SubsetMask) {
    let full = 1u32 << n;
    let upper = SubsetMask(rng.gen_range(0..full));
    let lower = SubsetMask(rng.gen_range(0..full) & upper.bits());
    (lower, upper)
}
