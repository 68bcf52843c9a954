//! Exact min-cost flow on the dense bipartite transportation graph, by
//! successive shortest paths with node potentials (Dijkstra on reduced
//! costs). Supplies, demands and flows are real-valued.

use crate::error::{Error, Result};
use crate::Scalar;

pub(crate) struct FlowSolution<F> {
    /// (source, sink, mass) for every arc carrying flow.
    pub flows: Vec<(usize, usize, F)>,
    pub cost: F,
    /// Dual variables: `u[i] + v[j] ≤ c[i][j]`, tight on flow arcs.
    pub source_duals: Vec<F>,
    pub sink_duals: Vec<F>,
}

/// Mass below this is treated as exhausted.
const MASS_EPS: f64 = 1e-15;
/// Total unmet demand below this terminates the solve.
const DONE_EPS: f64 = 1e-13;

pub(crate) fn min_cost_transport<F: Scalar>(
    supply: &[F],
    demand: &[F],
    cost: &[F], // row-major n×m
) -> Result<FlowSolution<F>> {
    let n = supply.len();
    let m = demand.len();
    if cost.len() != n * m {
        return Err(Error::Solver("cost matrix size mismatch".into()));
    }
    let eps = F::c(MASS_EPS);
    let inf = F::infinity();

    let mut rem_s = supply.to_vec();
    let mut rem_d = demand.to_vec();
    let mut flow = vec![F::zero(); n * m];
    // Node potentials: sources 0..n, sinks n..n+m.
    let mut pi = vec![F::zero(); n + m];

    let max_iterations = 10 * (n + m) + 1000;
    let mut iterations = 0;
    loop {
        let unmet: F = rem_d.iter().copied().sum();
        if unmet <= F::c(DONE_EPS) {
            break;
        }
        iterations += 1;
        if iterations > max_iterations {
            return Err(Error::Solver(format!(
                "augmentation cap exceeded ({max_iterations} iterations)"
            )));
        }

        // Dijkstra over reduced costs from all sources with remaining supply.
        let v_count = n + m;
        let mut dist = vec![inf; v_count];
        let mut prev = vec![usize::MAX; v_count];
        let mut done = vec![false; v_count];
        for (i, &s) in rem_s.iter().enumerate() {
            if s > eps {
                dist[i] = F::zero();
            }
        }
        loop {
            let mut u = usize::MAX;
            let mut best = inf;
            for (v, &d) in dist.iter().enumerate() {
                if !done[v] && d < best {
                    best = d;
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < n {
                // Forward arcs source u → every sink.
                for j in 0..m {
                    let t = n + j;
                    if done[t] {
                        continue;
                    }
                    let rc = (cost[u * m + j] + pi[u] - pi[t]).max(F::zero());
                    let nd = dist[u] + rc;
                    if nd < dist[t] {
                        dist[t] = nd;
                        prev[t] = u;
                    }
                }
            } else {
                // Backward arcs sink → sources currently shipping to it.
                let j = u - n;
                for i in 0..n {
                    if done[i] || flow[i * m + j] <= eps {
                        continue;
                    }
                    let rc = (pi[u] - pi[i] - cost[i * m + j]).max(F::zero());
                    let nd = dist[u] + rc;
                    if nd < dist[i] {
                        dist[i] = nd;
                        prev[i] = u;
                    }
                }
            }
        }

        // Nearest sink with unmet demand.
        let mut target = usize::MAX;
        let mut target_dist = inf;
        for (j, &d) in rem_d.iter().enumerate() {
            if d > eps && dist[n + j] < target_dist {
                target_dist = dist[n + j];
                target = j;
            }
        }
        if target == usize::MAX {
            return Err(Error::Solver(
                "no augmenting path to an unmet sink (disconnected problem)".into(),
            ));
        }

        // Shift potentials so all tight arcs stay at zero reduced cost.
        for (v, p) in pi.iter_mut().enumerate() {
            *p += dist[v].min(target_dist);
        }

        // Walk the path back to its source, collecting the bottleneck.
        let mut path = vec![n + target];
        let mut v = n + target;
        while prev[v] != usize::MAX {
            v = prev[v];
            path.push(v);
        }
        let start = *path.last().unwrap();
        if start >= n {
            return Err(Error::Solver("augmenting path does not start at a source".into()));
        }
        let mut delta = rem_s[start].min(rem_d[target]);
        // Backward arcs along the path are (sink → source) steps.
        for w in path.windows(2) {
            let (to, from) = (w[0], w[1]);
            if from >= n && to < n {
                delta = delta.min(flow[to * m + (from - n)]);
            }
        }
        if delta <= eps {
            return Err(Error::Solver("degenerate augmentation (zero bottleneck)".into()));
        }
        for w in path.windows(2) {
            let (to, from) = (w[0], w[1]);
            if from < n {
                flow[from * m + (to - n)] += delta;
            } else {
                flow[to * m + (from - n)] -= delta;
            }
        }
        rem_s[start] -= delta;
        rem_d[target] -= delta;
    }

    let mut flows = Vec::new();
    let mut total = F::zero();
    for i in 0..n {
        for j in 0..m {
            let f = flow[i * m + j];
            if f > eps {
                flows.push((i, j, f));
                total += f * cost[i * m + j];
            }
        }
    }
    let source_duals: Vec<F> = pi[..n].iter().map(|&p| -p).collect();
    let sink_duals: Vec<F> = pi[n..].iter().copied().collect();
    Ok(FlowSolution {
        flows,
        cost: total,
        source_duals,
        sink_duals,
    })
}
