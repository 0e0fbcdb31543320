//! Set-partition enumeration in restricted-growth-string order.
//!
//! A partition of `{0, .., m-1}` is encoded as a code vector where
//! `code[i]` is the block of element `i`, blocks numbered by first
//! appearance (so `code[0] == 0` and `code[i] <= max(code[..i]) + 1`).
//! Enumeration visits every partition exactly once; the number of visits is
//! the Bell number `B_m`.

/// Calls `f` once per set partition of `m` elements with the code vector.
/// `m == 0` yields the single empty partition.
pub fn for_each_partition(m: usize, mut f: impl FnMut(&[usize])) {
    if m == 0 {
        f(&[]);
        return;
    }
    let mut code = vec![0usize; m];
    // prefix_max[i] = max(code[..=i]), maintained across increments.
    let mut prefix_max = vec![0usize; m];
    loop {
        f(&code);
        // Odometer step: rightmost position that can still grow.
        let mut i = m - 1;
        loop {
            if i == 0 {
                return;
            }
            if code[i] <= prefix_max[i - 1] {
                code[i] += 1;
                break;
            }
            code[i] = 0;
            i -= 1;
        }
        for j in i..m {
            prefix_max[j] = prefix_max[j - 1].max(code[j]);
        }
        for j in i + 1..m {
            code[j] = 0;
            prefix_max[j] = prefix_max[j - 1];
        }
    }
}

/// Number of blocks named by a partition code.
pub fn block_count(code: &[usize]) -> usize {
    code.iter().copied().max().map_or(0, |b| b + 1)
}

/// Groups element indices into blocks according to a partition code.
pub fn blocks_of(code: &[usize]) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); block_count(code)];
    for (i, &b) in code.iter().enumerate() {
        blocks[b].push(i);
    }
    blocks
}

/// Bell number `B_m` via the Bell triangle.
pub fn bell_number(m: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..m {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            next.push(next.last().unwrap() + v);
        }
        row = next;
    }
    row[0]
}
