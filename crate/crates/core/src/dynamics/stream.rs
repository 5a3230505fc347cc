use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Words of generator output consumed per update.
const WORDS: u128 = 6;

/// One element of the random mapping: an edge, a uniform and the waiting
/// time since the previous element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Update {
    pub edge: usize,
    pub u: f64,
    pub gap: f64,
}

/// Deterministic i.i.d. sequence of updates over `m` edges, addressable by
/// index. Distinct `stream_id`s under one seed are independent.
#[derive(Clone, Debug)]
pub struct UpdateStream {
    seed: u64,
    stream_id: u64,
    m: usize,
}

#[inline]
fn unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl UpdateStream {
    pub fn new(seed: u64, stream_id: u64, m: usize) -> Self {
        assert!(m > 0, "update stream needs at least one edge");
        UpdateStream { seed, stream_id, m }
    }

    pub fn num_edges(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Sequential reader starting at element `index`.
    pub fn cursor(&self, index: u64) -> StreamCursor {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng.set_word_pos(index as u128 * WORDS);
        StreamCursor { rng, index, m: self.m as u64, rate: self.m as f64 }
    }

    pub fn get(&self, index: u64) -> Update {
        self.cursor(index).next_update()
    }
}

pub struct StreamCursor {
    rng: ChaCha8Rng,
    index: u64,
    m: u64,
    rate: f64,
}

impl StreamCursor {
    /// Index of the element the next call returns.
    pub fn index(&self) -> u64 {
        self.index
    }

    #[inline]
    pub fn next_update(&mut self) -> Update {
        let j = self.rng.next_u64();
        let u = self.rng.next_u64();
        let g = self.rng.next_u64();
        self.index += 1;
        let edge = ((j as u128 * self.m as u128) >> 64) as usize;
        // Shift by half a unit so the waiting time is strictly positive.
        let v = ((g >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        Update { edge, u: unit(u), gap: -v.ln() / self.rate }
    }
}

impl Iterator for StreamCursor {
    type Item = Update;

    fn next(&mut self) -> Option<Update> {
        Some(self.next_update())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_and_random_access_agree() {
        let s = UpdateStream::new(42, 3, 17);
        let seq: Vec<Update> = s.cursor(0).take(50).collect();
        assert_eq!(seq, s.cursor(0).take(50).collect::<Vec<_>>());
        for i in [0u64, 1, 7, 49] {
            assert_eq!(s.get(i), seq[i as usize]);
        }
        assert_eq!(s.cursor(10).next_update(), seq[10]);
        assert_ne!(UpdateStream::new(42, 4, 17).get(0), seq[0]);
    }

    #[test]
    fn ranges() {
        let s = UpdateStream::new(1, 0, 5);
        let mut hits = [0usize; 5];
        let mut sum_gap = 0.0;
        for up in s.cursor(0).take(100_000) {
            assert!(up.edge < 5);
            assert!((0.0..1.0).contains(&up.u));
            assert!(up.gap > 0.0);
            hits[up.edge] += 1;
            sum_gap += up.gap;
        }
        for h in hits {
            assert!((h as f64 - 20_000.0).abs() < 600.0);
        }
        // Mean gap 1/5 with standard error 0.2/sqrt(1e5).
        assert!((sum_gap / 1e5 - 0.2).abs() < 0.003);
    }
}
