//! Binomial coefficients and lexicographic enumeration of d-subsets.

/// `C(n, r)` as `f64`; exact while the result fits in 53 bits.
pub fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    let mut acc = 1.0f64;
    for i in 0..r {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// `C(n, r)` as `u64`, or `None` on overflow.
pub fn binomial_u64(n: u64, r: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// Calls `f` on every strictly increasing `d`-subset of `0..n`, in
/// lexicographic order.
pub fn for_each_combination<F: FnMut(&[u32])>(n: usize, d: usize, mut f: F) {
    if d == 0 || d > n {
        return;
    }
    let n = n as u32;
    let d32 = d as u32;
    let mut c: Vec<u32> = (0..d32).collect();
    loop {
        f(&c);
        // rightmost position that can still be incremented
        let mut i = d;
        while i > 0 && c[i - 1] == n - d32 + (i as u32 - 1) {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        c[i - 1] += 1;
        for j in i..d {
            c[j] = c[j - 1] + 1;
        }
    }
}
