//! Brute-force K(φ) for the volume cocycle on ℤ²: every triple in a box,
//! without basing, with the small-simplex test done on ℓ¹ distances.

use num_rational::Ratio;

use crate::det::simplex_volume;

/// max |vol| over triples in [-r, r]² with pairwise ℓ¹ distance < 2D.
pub fn volume_k_plane(r: i64, d: u64) -> Ratio<i128> {
    let pts: Vec<Vec<i64>> = (-r..=r).flat_map(|x| (-r..=r).map(move |y| vec![x, y])).collect();
    let l1 = |p: &Vec<i64>, q: &Vec<i64>| ((p[0] - q[0]).abs() + (p[1] - q[1]).abs()) as u64;
    let mut best = Ratio::from_integer(0);
    for a in &pts {
        for b in &pts {
            if l1(a, b) >= 2 * d {
                continue;
            }
            for c in &pts {
                if l1(a, c) >= 2 * d || l1(b, c) >= 2 * d {
                    continue;
                }
                let v = simplex_volume(&[a.clone(), b.clone(), c.clone()]);
                let v = if v < Ratio::from_integer(0) { -v } else { v };
                if v > best {
                    best = v;
                }
            }
        }
    }
    best
}
