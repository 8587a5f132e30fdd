//! Small worked blocks used by tests, the acceptance suite and the CLI corpus.

use super::{BlockSpec, DEFAULT_ORDER_BOUND};

/// C_4 acting on C_3 by inversion, with kernel C_2.
pub fn inverting_c3() -> BlockSpec {
    BlockSpec {
        p: 3,
        defect: vec![1],
        generators: vec![vec![1, 2, 3, 0]],
        actions: vec![vec![vec![-1]]],
        phi: None,
        order_bound: DEFAULT_ORDER_BOUND,
    }
}

/// C_4 inverting the first factor of C_3 x C_3 and fixing the second.
pub fn inverting_c3_times_c3() -> BlockSpec {
    BlockSpec {
        p: 3,
        defect: vec![1, 1],
        generators: vec![vec![1, 2, 3, 0]],
        actions: vec![vec![vec![-1, 0], vec![0, 1]]],
        phi: None,
        order_bound: DEFAULT_ORDER_BOUND,
    }
}

/// C_3 acting fixed-point-freely on C_4 x C_4.
pub fn rotating_c4_squared() -> BlockSpec {
    BlockSpec {
        p: 2,
        defect: vec![2, 2],
        generators: vec![vec![1, 2, 0]],
        actions: vec![vec![vec![0, -1], vec![1, -1]]],
        phi: None,
        order_bound: DEFAULT_ORDER_BOUND,
    }
}
