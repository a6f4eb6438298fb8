use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (x, y, z), each coordinate in 1..=|X|.
pub type Triple = (usize, usize, usize);

/// Exhaustive search for |X| triples covering every x, y and z exactly once.
pub fn has_perfect_matching(triples: &[Triple], x_size: usize) -> bool {
    let mut by_x: Vec<Vec<(usize, usize)>> = vec![Vec::new(); x_size + 1];
    for &(x, y, z) in triples {
        by_x[x].push((y, z));
    }
    fn go(x: usize, by_x: &[Vec<(usize, usize)>], used_y: &mut [bool], used_z: &mut [bool]) -> bool {
        if x == by_x.len() {
            return true;
        }
        for &(y, z) in &by_x[x] {
            if !used_y[y] && !used_z[z] {
                used_y[y] = true;
                used_z[z] = true;
                let found = go(x + 1, by_x, used_y, used_z);
                used_y[y] = false;
                used_z[z] = false;
                if found {
                    return true;
                }
            }
        }
        false
    }
    go(1, &by_x, &mut vec![false; x_size + 1], &mut vec![false; x_size + 1])
}

/// A random perfect matching plus `extra` random triples, shuffled.
pub fn planted_3dm(x_size: usize, extra: usize, seed: u64) -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ys: Vec<usize> = (1..=x_size).collect();
    let mut zs = ys.clone();
    ys.shuffle(&mut rng);
    zs.shuffle(&mut rng);
    let mut triples: Vec<Triple> = (1..=x_size).map(|x| (x, ys[x - 1], zs[x - 1])).collect();
    for _ in 0..extra {
        triples.push((
            rng.gen_range(1..=x_size),
            rng.gen_range(1..=x_size),
            rng.gen_range(1..=x_size),
        ));
    }
    triples.shuffle(&mut rng);
    triples
}

/// Random triples touching every x, redrawn until no perfect matching
/// exists. Gives up after `attempts` draws.
pub fn matching_free_3dm(x_size: usize, count: usize, seed: u64, attempts: usize) -> Option<Vec<Triple>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let mut triples: Vec<Triple> = (1..=x_size)
            .map(|x| (x, rng.gen_range(1..=x_size), rng.gen_range(1..=x_size)))
            .collect();
        while triples.len() < count {
            triples.push((
                rng.gen_range(1..=x_size),
                rng.gen_range(1..=x_size),
                rng.gen_range(1..=x_size),
            ));
        }
        triples.shuffle(&mut rng);
        if !has_perfect_matching(&triples, x_size) {
            return Some(triples);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_has_matching() {
        for seed in 0..20 {
            assert!(has_perfect_matching(&planted_3dm(4, 3, seed), 4));
        }
    }

    #[test]
    fn shared_y_blocks_matching() {
        assert!(!has_perfect_matching(&[(1, 1, 1), (2, 1, 2)], 2));
        assert!(has_perfect_matching(&[(1, 1, 1), (2, 1, 2), (2, 2, 2)], 2));
    }
}
