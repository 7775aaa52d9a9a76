use super::Adjacency;

/// Coreness of every node via bucket peeling (Batagelj–Zaversnik), O(|E|).
pub fn core_decomposition<G: Adjacency + ?Sized>(graph: &G) -> Vec<u32> {
    let n = graph.node_count();
    if n == 0 {
        return Vec::new();
    }
    let mut degree: Vec<usize> = (0..n).map(|v| graph.neighbors(v as u32).len()).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);

    // bin[d] = start of degree-d block in `order`.
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &degree {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0u32; n];
    {
        let mut next = bin.clone();
        for v in 0..n {
            let d = degree[v];
            pos[v] = next[d];
            order[pos[v]] = v as u32;
            next[d] += 1;
        }
    }

    for i in 0..n {
        let v = order[i] as usize;
        for &w in graph.neighbors(v as u32) {
            let w = w as usize;
            if degree[w] > degree[v] {
                // Swap w to the front of its bucket, then shrink the bucket.
                let dw = degree[w];
                let pw = pos[w];
                let start = bin[dw];
                let u = order[start] as usize;
                if u != w {
                    order.swap(start, pw);
                    pos[u] = pw;
                    pos[w] = start;
                }
                bin[dw] += 1;
                degree[w] -= 1;
            }
        }
    }
    degree.into_iter().map(|d| d as u32).collect()
}
