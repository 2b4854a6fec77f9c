//! Leibniz determinant and simplex volumes.

use num_rational::Ratio;

fn sign(p: &[usize]) -> i128 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn leibniz(m: &[Vec<i128>]) -> i128 {
    perms(m.len()).iter().map(|p| sign(p) * p.iter().enumerate().map(|(i, &j)| m[i][j]).product::<i128>()).sum()
}

/// det[z_j − z₀] / n!, columns z_j − z₀.
pub fn simplex_volume(points: &[Vec<i64>]) -> Ratio<i128> {
    let n = points.len() - 1;
    let m: Vec<Vec<i128>> =
        (0..n).map(|row| (1..=n).map(|j| (points[j][row] - points[0][row]) as i128).collect()).collect();
    let fact: i128 = (1..=n as i128).product();
    Ratio::new(leibniz(&m), fact)
}
