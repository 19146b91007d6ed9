use crate::dsl::{Mat3, Tensor4};

/// Dense covariant tensor of arbitrary rank over a 3-dimensional space.
/// Components are stored row-major (last index fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    rank: usize,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(rank: usize) -> Self {
        DenseTensor {
            rank,
            data: vec![0.0; 3usize.pow(rank as u32)],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * 3 + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Multi-index of a flat offset.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for slot in (0..self.rank).rev() {
            out[slot] = flat % 3;
            flat /= 3;
        }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &DenseTensor) -> f64 {
        assert_eq!(self.rank, other.rank);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn axpy(&self, alpha: f64, other: &DenseTensor) -> DenseTensor {
        assert_eq!(self.rank, other.rank);
        DenseTensor {
            rank: self.rank,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + alpha * b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Components in a frame: `T'_{a..} = Σ T_{i..} E[i][a] ...` on every slot.
    pub fn to_frame(&self, e: &Mat3) -> DenseTensor {
        let mut cur = self.clone();
        let mut idx = vec![0usize; self.rank];
        for slot in 0..self.rank {
            let mut next = DenseTensor::zeros(self.rank);
            for flat in 0..next.data.len() {
                next.unravel(flat, &mut idx);
                let a = idx[slot];
                let mut s = 0.0;
                for i in 0..3 {
                    idx[slot] = i;
                    s += cur.get(&idx) * e[i][a];
                }
                next.data[flat] = s;
            }
            cur = next;
        }
        cur
    }

    /// Largest |T(.., X, Y) + T(.., Y, X)| over the trailing pair.
    pub fn trailing_symmetric_part(&self) -> f64 {
        assert!(self.rank >= 2);
        let mut idx = vec![0usize; self.rank];
        let mut swapped = vec![0usize; self.rank];
        let mut worst: f64 = 0.0;
        for flat in 0..self.data.len() {
            self.unravel(flat, &mut idx);
            swapped.copy_from_slice(&idx);
            swapped.swap(self.rank - 2, self.rank - 1);
            worst = worst.max((self.data[flat] + self.get(&swapped)).abs());
        }
        worst
    }
}

impl From<&Mat3> for DenseTensor {
    fn from(m: &Mat3) -> Self {
        DenseTensor {
            rank: 2,
            data: m.iter().flatten().copied().collect(),
        }
    }
}

impl From<&Tensor4> for DenseTensor {
    fn from(t: &Tensor4) -> Self {
        DenseTensor {
            rank: 4,
            data: t.iter().flatten().flatten().flatten().copied().collect(),
        }
    }
}
