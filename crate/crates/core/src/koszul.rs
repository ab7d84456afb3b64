//! Unshuffles and Koszul signs for graded-symmetric multilinear maps.

/// All `(i, j)`-unshuffles in lexicographic order: permutations `s` of `0..i+j` with
/// `s[..i]` and `s[i..]` both increasing. There are `C(i+j, i)` of them.
pub fn unshuffles(i: usize, j: usize) -> Vec<Vec<usize>> {
    let n = i + j;
    let mut out = Vec::new();
    let mut head = Vec::with_capacity(i);
    choose(n, i, 0, &mut head, &mut out);
    out
}

fn choose(n: usize, k: usize, start: usize, head: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if head.len() == k {
        let mut perm = head.clone();
        perm.extend((0..n).filter(|x| !head.contains(x)));
        out.push(perm);
        return;
    }
    let need = k - head.len();
    for x in start..=(n - need) {
        head.push(x);
        choose(n, k, x + 1, head, out);
        head.pop();
    }
}

/// Koszul sign `e` with `x_{s(0)} ... x_{s(n-1)} = e * x_0 ... x_{n-1}` in the free
/// graded-commutative algebra, for `x_k` of degree `degrees[k]`.
///
/// Computed by bubble-sorting `perm` back to the identity; each adjacent swap of two
/// odd-degree entries contributes a factor of -1.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> i64 {
    let mut p = perm.to_vec();
    let mut sign = 1;
    let n = p.len();
    for pass in 1..n {
        let mut swapped = false;
        for k in 0..n - pass {
            if p[k] > p[k + 1] {
                if degrees[p[k]] % 2 != 0 && degrees[p[k + 1]] % 2 != 0 {
                    sign = -sign;
                }
                p.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    sign
}

/// Sorts basis indices ascending and returns the Koszul sign `e` with
/// `x_{args} = e * x_{sorted}`, given `degree(index)`.
/// Returns `None` when an odd-degree index repeats (the symmetric product vanishes).
pub fn sort_with_sign(args: &[usize], degree: impl Fn(usize) -> i64) -> Option<(Vec<usize>, i64)> {
    let mut order: Vec<usize> = (0..args.len()).collect();
    order.sort_by_key(|&k| (args[k], k));
    let sorted: Vec<usize> = order.iter().map(|&k| args[k]).collect();
    for w in sorted.windows(2) {
        if w[0] == w[1] && degree(w[0]) % 2 != 0 {
            return None;
        }
    }
    let degs: Vec<i64> = args.iter().map(|&a| degree(a)).collect();
    // x_sorted = koszul(order) * x_args, and signs are involutive.
    Some((sorted, koszul_sign(&order, &degs)))
}
