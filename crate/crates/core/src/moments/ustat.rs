use super::factorial::factorial_moment;
use crate::error::{invalid, Error, Result};
use crate::mixture::BitstringHistogram;
use std::collections::HashMap;

/// Largest supported order; the number of set partitions grows as the Bell numbers.
pub const MAX_ORDER: usize = 8;

/// Integer partitions of `p` into exactly `l` parts, as multiplicities
/// `h_1..h_{p-l+1}` with `Σ h_i = l` and `Σ i h_i = p`.
fn multiplicities(p: usize, l: usize) -> Vec<Vec<usize>> {
    fn rec(p: usize, l: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if l == 0 {
            if p == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for part in (1..=max.min(p)).rev() {
            if p - part < l - 1 {
                continue;
            }
            cur.push(part);
            rec(p - part, l - 1, part, cur, out);
            cur.pop();
        }
    }
    let mut parts = Vec::new();
    rec(p, l, p, &mut Vec::new(), &mut parts);
    parts
        .into_iter()
        .map(|ps| {
            let mut h = vec![0; p - l + 1];
            for x in ps {
                h[x - 1] += 1;
            }
            h
        })
        .collect()
}

/// Visit every set partition of `0..n` as a block assignment vector.
fn for_each_set_partition(n: usize, f: &mut impl FnMut(&[usize], usize)) {
    fn rec(i: usize, n: usize, blocks: usize, a: &mut Vec<usize>, f: &mut impl FnMut(&[usize], usize)) {
        if i == n {
            f(a, blocks);
            return;
        }
        for b in 0..=blocks {
            a.push(b);
            rec(i + 1, n, blocks.max(b + 1), a, f);
            a.pop();
        }
    }
    rec(0, n, 0, &mut Vec::with_capacity(n), f);
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|t| t as f64).product()
}

struct BlockSums<'a> {
    d: f64,
    /// `t[r][j]` for r >= 2 on the support.
    t: &'a [Vec<f64>],
    cache: HashMap<Vec<u8>, f64>,
}

impl BlockSums<'_> {
    /// `Σ_j Π_{r ∈ types} T_{j,r}` over all `d` outcomes.
    fn get(&mut self, mut types: Vec<u8>) -> f64 {
        types.sort_unstable();
        if let Some(&v) = self.cache.get(&types) {
            return v;
        }
        let ones = types.iter().filter(|&&r| r == 1).count() as i32;
        let v = if ones as usize == types.len() {
            self.d * self.d.powi(-ones)
        } else {
            let base = self.d.powi(-ones);
            let hi: Vec<usize> = types.iter().filter(|&&r| r > 1).map(|&r| r as usize).collect();
            let cells = self.t[hi[0]].len();
            base * (0..cells).map(|j| hi.iter().map(|&r| self.t[r][j]).product::<f64>()).sum::<f64>()
        };
        self.cache.insert(types, v);
        v
    }
}

/// Unbiased (under the Poisson model) estimate of the `p`-th cumulant `ξ_p`
/// of `θ = Σ c_i ϖ_i`.
///
/// The sum over disjoint index tuples is expanded by inclusion-exclusion over
/// set partitions of the `ℓ` slots: an injective sum equals
/// `Σ_σ μ(σ) Π_{B∈σ} Σ_j Π_{s∈B} a_s(j)` with `μ(σ) = Π_B (−1)^{|B|−1}(|B|−1)!`.
pub fn cumulant_estimate(y: &BitstringHistogram, p: usize, k: usize) -> Result<f64> {
    if p == 0 || p > k || k > MAX_ORDER {
        return Err(invalid(format!("need 1 <= p <= k <= {MAX_ORDER}, got p={p}, k={k}")));
    }
    if (p as u64) > y.d() {
        return Err(invalid(format!("order p={p} exceeds d={}", y.d())));
    }
    if y.total() == 0 {
        return Err(Error::EmptyData("moment estimator needs at least one sample".into()));
    }
    let d = y.d() as f64;
    let n = y.total() as f64;
    let t: Vec<Vec<f64>> = (0..=p)
        .map(|r| if r < 2 { vec![] } else { y.support().iter().map(|&(_, c)| factorial_moment(c, n, r as u32)).collect() })
        .collect();
    let mut sums = BlockSums { d, t: &t, cache: HashMap::new() };
    let mut xi = 0.0;
    for l in 1..=p {
        // (−1)^{ℓ−1} (ℓ−1)! (d−ℓ)!/d!
        let falling: f64 = (0..l).map(|s| d - s as f64).product();
        let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
        let weight = sign * factorial(l - 1) / falling;
        for h in multiplicities(p, l) {
            let types: Vec<u8> = h.iter().enumerate().flat_map(|(i, &hi)| std::iter::repeat((i + 1) as u8).take(hi)).collect();
            let mut injective = 0.0;
            let mut blocks: Vec<Vec<u8>> = Vec::new();
            for_each_set_partition(l, &mut |assign, nb| {
                blocks.clear();
                blocks.resize(nb, Vec::new());
                for (s, &b) in assign.iter().enumerate() {
                    blocks[b].push(types[s]);
                }
                let mut term = 1.0;
                for b in &blocks {
                    let sz = b.len();
                    let mu = if sz % 2 == 1 { 1.0 } else { -1.0 } * factorial(sz - 1);
                    term *= mu * sums.get(b.clone());
                }
                injective += term;
            });
            let mut denom = 1.0;
            for (i, &hi) in h.iter().enumerate() {
                denom *= factorial(hi) * factorial(i + 1).powi(hi as i32);
            }
            xi += weight * injective / denom;
        }
    }
    Ok(factorial(p) * xi)
}

/// `m̂_p = d^p ξ̂_p / (p−1)!` for `p = 1..=k`, with `m̂_1 = 1` exactly.
pub fn moment_vector(y: &BitstringHistogram, k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > MAX_ORDER {
        return Err(invalid(format!("need 1 <= k <= {MAX_ORDER}")));
    }
    let d = y.d() as f64;
    let mut m = Vec::with_capacity(k);
    for p in 1..=k {
        let xi = cumulant_estimate(y, p, k)?;
        m.push(if p == 1 { 1.0 } else { d.powi(p as i32) * xi / factorial(p - 1) });
    }
    Ok(m)
}
