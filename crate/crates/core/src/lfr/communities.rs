//! Community-size sampling with an exact total.

use rand::Rng;

use super::{power_law, LfrError, LfrParams};
use crate::rng;

/// Whether some multiset of sizes in `[cmin, cmax]` sums to `n`.
pub fn sizes_feasible(n: usize, cmin: usize, cmax: usize) -> bool {
    cmin >= 1 && cmin <= cmax && n.div_ceil(cmax) <= n / cmin
}

pub(crate) fn sample_sizes(
    rng: &mut impl Rng,
    n: usize,
    tau2: f64,
    cmin: usize,
    cmax: usize,
) -> Result<Vec<usize>, LfrError> {
    if !sizes_feasible(n, cmin, cmax) {
        return Err(LfrError::Infeasible { n, cmin, cmax });
    }
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < n {
        let s = power_law::draw(rng, tau2, cmin, cmax);
        sizes.push(s);
        total += s;
    }
    if sizes.len() * cmin > n {
        // even at cmin the count overshoots; the last draw goes
        total -= sizes.pop().expect("nonempty");
    }

    // Shrink or grow towards n: the last community absorbs as much of the
    // difference as its bounds allow, then the others in reverse order.
    let order: Vec<usize> = (0..sizes.len()).rev().collect();
    while total > n {
        let mut moved = false;
        for &i in &order {
            if total == n {
                break;
            }
            let room = sizes[i] - cmin;
            let step = room.min(total - n);
            if step > 0 {
                sizes[i] -= step;
                total -= step;
                moved = true;
            }
        }
        debug_assert!(moved, "feasible count guarantees progress");
        if !moved {
            return Err(LfrError::Infeasible { n, cmin, cmax });
        }
    }
    while total < n {
        let mut moved = false;
        for &i in &order {
            if total == n {
                break;
            }
            let room = cmax - sizes[i];
            let step = room.min(n - total);
            if step > 0 {
                sizes[i] += step;
                total += step;
                moved = true;
            }
        }
        if !moved {
            return Err(LfrError::Infeasible { n, cmin, cmax });
        }
    }
    Ok(sizes)
}

/// Community sizes for `params`: power-law(τ₂) draws on `[cmin, cmax]`
/// summing exactly to `n`.
pub fn sample_community_sizes(params: &LfrParams) -> Result<Vec<usize>, LfrError> {
    let mut rng = rng::stream(params.seed, &[0xC0_55]);
    sample_sizes(&mut rng, params.n, params.tau2, params.cmin, params.cmax)
}
