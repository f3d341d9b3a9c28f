use alloc::vec;
use alloc::vec::Vec;

/// Binary indexed tree over `1..=len` holding nonnegative counts.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    pub(crate) fn new(len: usize) -> Self {
        Fenwick {
            tree: vec![0; len + 1],
        }
    }

    /// Linear-time construction from `counts[i]` stored at position `i + 1`.
    pub(crate) fn from_counts(counts: impl IntoIterator<Item = u32>, len: usize) -> Self {
        let mut tree = vec![0u32; len + 1];
        for (i, c) in counts.into_iter().take(len).enumerate() {
            tree[i + 1] = c;
        }
        for i in 1..=len {
            let parent = i + (i & i.wrapping_neg());
            if parent <= len {
                tree[parent] += tree[i];
            }
        }
        Fenwick { tree }
    }

    pub(crate) fn len(&self) -> usize {
        self.tree.len() - 1
    }

    pub(crate) fn add(&mut self, mut pos: usize, delta: i32) {
        debug_assert!(pos >= 1 && pos <= self.len());
        while pos < self.tree.len() {
            self.tree[pos] = self.tree[pos].wrapping_add_signed(delta);
            pos += pos & pos.wrapping_neg();
        }
    }

    /// Sum of counts at positions `1..=pos`.
    pub(crate) fn prefix_sum(&self, mut pos: usize) -> u64 {
        let mut s = 0u64;
        while pos > 0 {
            s += u64::from(self.tree[pos]);
            pos &= pos - 1;
        }
        s
    }

    /// Smallest position whose prefix sum reaches `k` (k >= 1); `None` when the
    /// total is below `k`.
    pub(crate) fn select(&self, k: u64) -> Option<usize> {
        let len = self.len();
        if k == 0 || len == 0 {
            return None;
        }
        let mut pos = 0usize;
        let mut rem = k;
        let mut step = 1usize << (usize::BITS - 1 - len.leading_zeros());
        while step > 0 {
            let next = pos + step;
            if next <= len && u64::from(self.tree[next]) < rem {
                pos = next;
                rem -= u64::from(self.tree[next]);
            }
            step >>= 1;
        }
        (pos < len).then_some(pos + 1)
    }
}

/// The set of natural numbers `{1, 2, ...}` not yet taken, with
/// "take the z-th smallest" in logarithmic time.
///
/// Backed by a Fenwick tree over a window `1..=capacity` that doubles when a
/// request reaches past the end; every number above the window is unused.
#[derive(Debug, Clone)]
pub struct UnusedNaturals {
    unused: Fenwick,
    taken: Vec<bool>,
    taken_count: u64,
}

impl UnusedNaturals {
    pub fn new() -> Self {
        Self::with_capacity(16)
    }

    pub fn with_capacity(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        UnusedNaturals {
            unused: Fenwick::from_counts(core::iter::repeat(1), capacity),
            taken: vec![false; capacity],
            taken_count: 0,
        }
    }

    pub fn taken_count(&self) -> u64 {
        self.taken_count
    }

    fn capacity(&self) -> usize {
        self.taken.len()
    }

    fn grow_to(&mut self, min_capacity: usize) {
        let mut cap = self.capacity();
        while cap < min_capacity {
            cap *= 2;
        }
        self.taken.resize(cap, false);
        self.unused = Fenwick::from_counts(self.taken.iter().map(|&t| u32::from(!t)), cap);
    }

    /// Removes and returns the `z`-th smallest unused natural number.
    ///
    /// Panics if `z == 0`.
    pub fn take_nth(&mut self, z: u64) -> u64 {
        assert!(z >= 1, "rank must be positive");
        let free_in_window = self.capacity() as u64 - self.taken_count;
        if z > free_in_window {
            let need = self.taken_count + z;
            self.grow_to(usize::try_from(need).expect("rank exceeds address space"));
        }
        let pos = self
            .unused
            .select(z)
            .expect("window holds at least z unused numbers");
        self.unused.add(pos, -1);
        self.taken[pos - 1] = true;
        self.taken_count += 1;
        pos as u64
    }

    /// The smallest natural number not yet taken.
    pub fn smallest_unused(&self) -> u64 {
        match self.unused.select(1) {
            Some(pos) => pos as u64,
            None => self.capacity() as u64 + 1,
        }
    }

    /// Returns every number to the unused set, keeping the allocation.
    pub fn reset(&mut self) {
        self.taken.iter_mut().for_each(|t| *t = false);
        self.unused = Fenwick::from_counts(core::iter::repeat(1), self.capacity());
        self.taken_count = 0;
    }

    pub fn is_taken(&self, value: u64) -> bool {
        value >= 1 && (value as usize) <= self.capacity() && self.taken[value as usize - 1]
    }
}

impl Default for UnusedNaturals {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Linear scan over a plain used-set.
    fn naive_take(used: &mut Vec<u64>, z: u64) -> u64 {
        let mut seen = 0;
        let mut v = 0;
        loop {
            v += 1;
            if !used.contains(&v) {
                seen += 1;
                if seen == z {
                    used.push(v);
                    return v;
                }
            }
        }
    }

    #[test]
    fn fenwick_select_and_prefix() {
        let f = Fenwick::from_counts([1, 0, 2, 0, 1], 5);
        assert_eq!(f.prefix_sum(5), 4);
        assert_eq!(f.select(1), Some(1));
        assert_eq!(f.select(2), Some(3));
        assert_eq!(f.select(3), Some(3));
        assert_eq!(f.select(4), Some(5));
        assert_eq!(f.select(5), None);
    }

    #[test]
    fn matches_naive_scan_with_growth() {
        let mut fast = UnusedNaturals::with_capacity(1);
        let mut used = Vec::new();
        let ranks = [4u64, 4, 1, 2, 3, 9, 1, 1, 17, 2, 5, 30, 1];
        for &z in &ranks {
            assert_eq!(fast.take_nth(z), naive_take(&mut used, z));
            let mut smallest = 1;
            while used.contains(&smallest) {
                smallest += 1;
            }
            assert_eq!(fast.smallest_unused(), smallest);
        }
    }

    #[test]
    fn example_from_insertion_process() {
        let mut s = UnusedNaturals::new();
        let got: Vec<u64> = [4, 4, 1, 2, 3].iter().map(|&z| s.take_nth(z)).collect();
        assert_eq!(got, [4, 5, 1, 3, 7]);
        assert_eq!(s.smallest_unused(), 2);
        s.reset();
        assert_eq!(s.taken_count(), 0);
        assert_eq!(s.take_nth(3), 3);
    }
}
