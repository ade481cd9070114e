//! Topological ordering of successor-list graphs, ignoring self-loops.

/// Returns a topological order (every non-self edge goes forward), or a
/// cycle as a vertex sequence `c` with an edge `c[i] -> c[i+1]` and
/// `c[last] -> c[0]`.
pub(crate) fn order<I, F>(n: usize, successors: F) -> Result<Vec<usize>, Vec<usize>>
where
    I: IntoIterator<Item = usize>,
    F: Fn(usize) -> I,
{
    let mut out_degree = vec![0usize; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, degree) in out_degree.iter_mut().enumerate() {
        for w in successors(v) {
            if w != v {
                *degree += 1;
                preds[w].push(v);
            }
        }
    }

    // Peel vertices with no remaining outgoing edges; this yields a
    // reverse topological order.
    let mut stack: Vec<usize> = (0..n).rev().filter(|&v| out_degree[v] == 0).collect();
    let mut peeled = Vec::with_capacity(n);
    let mut done = vec![false; n];
    while let Some(v) = stack.pop() {
        done[v] = true;
        peeled.push(v);
        for &u in &preds[v] {
            out_degree[u] -= 1;
            if out_degree[u] == 0 {
                stack.push(u);
            }
        }
    }
    if peeled.len() == n {
        peeled.reverse();
        return Ok(peeled);
    }

    // Every unpeeled vertex keeps a non-self edge into the unpeeled set.
    let start = (0..n).find(|&v| !done[v]).expect("unpeeled vertex");
    let mut seen_at = vec![usize::MAX; n];
    let mut walk = Vec::new();
    let mut v = start;
    while seen_at[v] == usize::MAX {
        seen_at[v] = walk.len();
        walk.push(v);
        v = successors(v)
            .into_iter()
            .find(|&w| w != v && !done[w])
            .expect("unpeeled vertex has an unpeeled successor");
    }
    Err(walk.split_off(seen_at[v]))
}
