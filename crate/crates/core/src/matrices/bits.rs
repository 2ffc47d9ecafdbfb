use std::fmt;

use crate::circuit::QubitId;

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Fixed-capacity set of qubit indices stored as packed 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QubitSet {
    len: usize,
    words: Vec<u64>,
}

impl QubitSet {
    pub fn new(capacity: usize) -> QubitSet {
        QubitSet {
            len: capacity,
            words: vec![0; words_for(capacity)],
        }
    }

    pub fn from_indices(capacity: usize, indices: impl IntoIterator<Item = usize>) -> QubitSet {
        let mut s = QubitSet::new(capacity);
        for i in indices {
            s.insert(QubitId(i));
        }
        s
    }

    pub(crate) fn from_words(len: usize, words: &[u64]) -> QubitSet {
        QubitSet {
            len,
            words: words.to_vec(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, q: QubitId) -> bool {
        q.0 < self.len && self.words[q.0 / WORD] >> (q.0 % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, q: QubitId) {
        assert!(q.0 < self.len, "qubit {} out of range {}", q.0, self.len);
        self.words[q.0 / WORD] |= 1 << (q.0 % WORD);
    }

    #[inline]
    pub fn remove(&mut self, q: QubitId) {
        if q.0 < self.len {
            self.words[q.0 / WORD] &= !(1 << (q.0 % WORD));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect_with(&mut self, other: &QubitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub(crate) fn intersect_words(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a &= *b;
        }
    }

    pub fn intersection(&self, other: &QubitSet) -> QubitSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    /// `|self ∩ other|` without allocating.
    pub fn intersection_len(&self, other: &QubitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(QubitId(wi * WORD + bit))
            })
        })
    }

    pub fn to_vec(&self) -> Vec<QubitId> {
        self.iter().collect()
    }
}

impl fmt::Debug for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|q| q.0)).finish()
    }
}

/// Dense boolean matrix with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> BitMatrix {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / WORD];
        if value {
            *w |= 1 << (j % WORD);
        } else {
            *w &= !(1 << (j % WORD));
        }
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> QubitSet {
        QubitSet::from_words(self.cols, self.row_words(i))
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row_words(i).iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn clear_row(&mut self, i: usize) {
        self.row_words_mut(i).fill(0);
    }

    pub fn clear_col(&mut self, j: usize) {
        let mask = !(1u64 << (j % WORD));
        let off = j / WORD;
        for i in 0..self.rows {
            self.data[i * self.stride + off] &= mask;
        }
    }

    /// Clears every bit of row `i` that is set in `mask`.
    pub fn clear_row_bits(&mut self, i: usize, mask: &[u64]) {
        for (w, m) in self.row_words_mut(i).iter_mut().zip(mask) {
            *w &= !m;
        }
    }

    /// ORs `src` into row `i`.
    pub fn or_row(&mut self, i: usize, src: &[u64]) {
        for (w, s) in self.row_words_mut(i).iter_mut().zip(src) {
            *w |= s;
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Bitwise complement, keeping padding bits clear.
    pub fn complement(&self) -> BitMatrix {
        let mut out = self.clone();
        let tail = self.cols % WORD;
        for i in 0..self.rows {
            let row = out.row_words_mut(i);
            for w in row.iter_mut() {
                *w = !*w;
            }
            if tail != 0 {
                if let Some(last) = row.last_mut() {
                    *last &= (1u64 << tail) - 1;
                }
            }
        }
        out
    }

    /// Rows as strings of `0`/`1`.
    pub fn to_rows_string(&self) -> Vec<String> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| if self.get(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in self.to_rows_string() {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}
