//! Dantzig-style tools for the per-period binary knapsacks.
//!
//! An item is one job on one skill. Its value is the job weight and its size
//! is the workload `duration * crew` in man-hours.

use alloc::vec::Vec;
use core::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum KnapsackError {
    #[error("knapsack capacity {0} is negative")]
    NegativeCapacity(i64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnapsackItem {
    pub job: usize,
    pub value: f64,
    pub duration: u32,
    pub crew: u32,
}

impl KnapsackItem {
    pub fn size(&self) -> u64 {
        u64::from(self.duration) * u64::from(self.crew)
    }
}

/// Key used to rank knapsack candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrderingRule {
    /// `w / (p * crew)`: value per man-hour.
    #[default]
    EfficacyPerWorkload,
    /// `w / p`: the classical weighted-shortest-processing-time key.
    EfficacyPerTime,
}

impl OrderingRule {
    fn denominator(self, item: &KnapsackItem) -> f64 {
        match self {
            OrderingRule::EfficacyPerWorkload => item.size() as f64,
            OrderingRule::EfficacyPerTime => f64::from(item.duration),
        }
    }

    pub fn ratio(self, item: &KnapsackItem) -> f64 {
        item.value / self.denominator(item)
    }

    /// Total order: higher ratio first, then smaller size, then lower job
    /// index. Ratios are compared by cross-multiplication.
    pub fn compare(self, a: &KnapsackItem, b: &KnapsackItem) -> Ordering {
        let lhs = a.value * self.denominator(b);
        let rhs = b.value * self.denominator(a);
        rhs.partial_cmp(&lhs)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.size().cmp(&b.size()))
            .then_with(|| a.job.cmp(&b.job))
    }
}

/// Sorts items into non-increasing efficacy under `rule`.
pub fn efficacy_order(items: &mut [KnapsackItem], rule: OrderingRule) {
    items.sort_by(|a, b| rule.compare(a, b));
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub fractions: Vec<f64>,
    pub value: f64,
    /// Index of the critical item `m_0`, if the items do not all fit.
    pub critical: Option<usize>,
}

/// Optimal LP-relaxation solution for items already in efficacy order.
///
/// The critical item is the first whose cumulative size reaches the capacity;
/// it takes the leftover fraction, everything before it is packed whole.
pub fn dantzig_fractional(
    items: &[KnapsackItem],
    capacity: i64,
) -> Result<FractionalSolution, KnapsackError> {
    if capacity < 0 {
        return Err(KnapsackError::NegativeCapacity(capacity));
    }
    let capacity = capacity as u64;
    let mut fractions = alloc::vec![0.0; items.len()];
    let mut value = 0.0;
    let mut cumulative = 0u64;
    let mut critical = None;
    for (i, item) in items.iter().enumerate() {
        if cumulative + item.size() >= capacity {
            let x = (capacity - cumulative) as f64 / item.size() as f64;
            fractions[i] = x;
            value += x * item.value;
            critical = Some(i);
            break;
        }
        cumulative += item.size();
        fractions[i] = 1.0;
        value += item.value;
    }
    Ok(FractionalSolution {
        fractions,
        value,
        critical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefixCut {
    /// Number of leading items packed, `m_0`.
    pub count: usize,
    pub load: u64,
    pub value: f64,
}

/// Longest prefix of the ordered items whose total size fits `capacity`.
pub fn dantzig_integer_prefix(
    items: &[KnapsackItem],
    capacity: i64,
) -> Result<PrefixCut, KnapsackError> {
    if capacity < 0 {
        return Err(KnapsackError::NegativeCapacity(capacity));
    }
    let capacity = capacity as u64;
    let mut cut = PrefixCut {
        count: 0,
        load: 0,
        value: 0.0,
    };
    for item in items {
        if cut.load + item.size() > capacity {
            break;
        }
        cut.count += 1;
        cut.load += item.size();
        cut.value += item.value;
    }
    Ok(cut)
}

/// Maximum-cardinality subset of `rejected` fitting in `residual` man-hours.
///
/// Takes items smallest first while they fit, which is optimal for the
/// cardinality objective. Returns indices into `rejected` in packing order.
pub fn residual_fill(rejected: &[KnapsackItem], residual: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rejected.len()).collect();
    order.sort_by(|&a, &b| {
        rejected[a]
            .size()
            .cmp(&rejected[b].size())
            .then_with(|| rejected[a].job.cmp(&rejected[b].job))
    });
    let mut used = 0u64;
    let mut fill = Vec::new();
    for i in order {
        let size = rejected[i].size();
        if used + size > residual {
            break;
        }
        used += size;
        fill.push(i);
    }
    fill
}
