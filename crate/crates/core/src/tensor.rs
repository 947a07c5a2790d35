//! Dense tensors over the combined index `a ∈ 0..n1+n2` with factor-block slicing.

use serde::{Deserialize, Serialize};

/// Index position: contravariant or covariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variance {
    Upper,
    Lower,
}

/// Which factor an index range belongs to: Latin `0..n1`, Greek `n1..n1+n2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    Latin,
    Greek,
}

/// Rank 1–4 dense array in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockTensor {
    pub n1: usize,
    pub n2: usize,
    pub variance: Vec<Variance>,
    pub data: Vec<f64>,
}

impl BlockTensor {
    pub fn zeros(n1: usize, n2: usize, variance: &[Variance]) -> Self {
        assert!((1..=4).contains(&variance.len()), "rank must be 1..=4");
        let n = n1 + n2;
        BlockTensor { n1, n2, variance: variance.to_vec(), data: vec![0.0; n.pow(variance.len() as u32)] }
    }

    /// Builds a tensor by evaluating `f` on every index tuple.
    pub fn from_fn(n1: usize, n2: usize, variance: &[Variance], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(n1, n2, variance);
        let r = t.rank();
        let n = t.dim();
        let mut idx = vec![0; r];
        for slot in 0..t.data.len() {
            let mut s = slot;
            for k in (0..r).rev() {
                idx[k] = s % n;
                s /= n;
            }
            t.data[slot] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn dim(&self) -> usize {
        self.n1 + self.n2
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim() + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn block_of(&self, a: usize) -> Block {
        if a < self.n1 {
            Block::Latin
        } else {
            Block::Greek
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest entry whose index tuple matches the block pattern slot by slot.
    pub fn block_max_abs(&self, pattern: &[Block]) -> f64 {
        assert_eq!(pattern.len(), self.rank());
        let mut best = 0.0f64;
        let r = self.rank();
        let n = self.dim();
        let mut idx = vec![0; r];
        for (slot, v) in self.data.iter().enumerate() {
            let mut s = slot;
            for k in (0..r).rev() {
                idx[k] = s % n;
                s /= n;
            }
            if idx.iter().zip(pattern).all(|(&i, &b)| self.block_of(i) == b) {
                best = best.max(v.abs());
            }
        }
        best
    }

    /// Largest entry with indices drawn from more than one factor.
    pub fn mixed_max_abs(&self) -> f64 {
        let r = self.rank();
        let n = self.dim();
        let mut best = 0.0f64;
        let mut idx = vec![0; r];
        for (slot, v) in self.data.iter().enumerate() {
            let mut s = slot;
            for k in (0..r).rev() {
                idx[k] = s % n;
                s /= n;
            }
            let latin = idx.iter().filter(|&&i| i < self.n1).count();
            if latin != 0 && latin != r {
                best = best.max(v.abs());
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &BlockTensor) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest difference over entries matching a block pattern.
    pub fn block_max_abs_diff(&self, other: &BlockTensor, pattern: &[Block]) -> f64 {
        let diff = BlockTensor {
            n1: self.n1,
            n2: self.n2,
            variance: self.variance.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        };
        diff.block_max_abs(pattern)
    }

    /// Index tuple of the largest absolute entry.
    pub fn argmax_abs(&self) -> Vec<usize> {
        let (slot, _) = self
            .data
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        let mut s = slot;
        let n = self.dim();
        let mut idx = vec![0; self.rank()];
        for k in (0..self.rank()).rev() {
            idx[k] = s % n;
            s /= n;
        }
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Variance::*;

    #[test]
    fn block_slicing() {
        let t = BlockTensor::from_fn(1, 2, &[Lower, Lower], |i| if i[0] == i[1] { 1.0 } else { 5.0 });
        assert_eq!(t.block_max_abs(&[Block::Latin, Block::Latin]), 1.0);
        assert_eq!(t.block_max_abs(&[Block::Latin, Block::Greek]), 5.0);
        assert_eq!(t.mixed_max_abs(), 5.0);
        assert_eq!(t.get(&[1, 2]), 5.0);
    }

    #[test]
    fn argmax_round_trip() {
        let mut t = BlockTensor::zeros(2, 1, &[Upper, Lower, Lower]);
        t.set(&[2, 0, 1], -3.0);
        assert_eq!(t.argmax_abs(), vec![2, 0, 1]);
    }
}
