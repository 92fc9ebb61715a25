//! Hamming weights and the value-sorted party ordering used by the tighter
//! polygamy bounds.

/// Number of ones in the binary expansion of `j`.
pub fn hamming_weight(j: u64) -> u32 {
    j.count_ones()
}

/// Parties sorted by nonincreasing value (ties by ascending index), each
/// tagged with the binary expansion of its position.
#[derive(Debug, Clone, PartialEq)]
pub struct HammingOrder {
    /// Party (group) indices in sorted order.
    pub order: Vec<usize>,
    /// The value of each party in sorted order.
    pub values: Vec<f64>,
    /// Binary expansion of each position, least significant bit first.
    pub bits: Vec<Vec<u8>>,
    /// `w_H` of each position.
    pub weights: Vec<u32>,
}

impl HammingOrder {
    pub fn new(entries: &[(usize, f64)]) -> Self {
        let mut sorted = entries.to_vec();
        sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let m = sorted.len();
        let width = (usize::BITS - m.saturating_sub(1).leading_zeros()).max(1) as usize;
        let bits = (0..m).map(|i| (0..width).map(|b| ((i >> b) & 1) as u8).collect()).collect();
        let weights = (0..m).map(|i| hamming_weight(i as u64)).collect();
        HammingOrder {
            order: sorted.iter().map(|e| e.0).collect(),
            values: sorted.iter().map(|e| e.1).collect(),
            bits,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}
