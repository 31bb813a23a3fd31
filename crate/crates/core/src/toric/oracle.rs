//! The exact cohomology oracle. Graded pieces of line-bundle cohomology on a
//! smooth complete fan are reduced cohomology groups of the full subcomplex
//! of the fan's ray complex spanned by the rays where the character is
//! negative. Candidate characters are scanned over the bounding box of the
//! per-cone chart vertices (a superset of their convex hull), enlarged by a
//! configurable margin; the scan walks constant-pattern segments instead of
//! single points. The region heuristic is guarded by the shift-invariance,
//! Serre-duality and margin-robustness suites.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::Serialize;

 
use super::{dot, solve_unimodular, Fan, TDivisor, Vector};
use crate::{Error, Result};

/// Cohomology dimensions `h^0, ..., h^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyTable {
    pub h: Vec<u64>,
}

impl CohomologyTable {
    pub fn total(&self) -> u64 {
        self.h.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(|&x| x == 0)
    }

    pub fn euler(&self) -> i64 {
        self.h
            .iter()
            .enumerate()
            .map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) })
            .sum()
    }
}

/// Per-cone chart vertices: the characters solving `<m, v> = -a_v` on each
/// maximal cone. `None` when a cone fails to be unimodular.
pub fn chart_vertices(fan: &Fan, d: &TDivisor) -> Option<Vec<Vector>> {
    let mut out = Vec::with_capacity(fan.max_cones().len());
    for cone in fan.max_cones() {
        let rows: Vec<&Vector> = cone.iter().map(|&i| &fan.rays()[i as usize]).collect();
        let rhs: Vec<i64> = cone.iter().map(|&i| -d.coeffs[i as usize]).collect();
        out.push(solve_unimodular(&rows, &rhs)?);
    }
    Some(out)
}

/// A reusable cohomology engine for one fan. Interior memo tables make it
/// cheap to query many divisors; shared references are thread-safe.
pub struct Oracle {
    fan: Fan,
    /// augmented boundary structure of the ray complex
    complex: super::homology::CellComplex,
    /// ray mask of each cell (the empty cell first)
    cell_masks: Vec<u128>,
    betti_memo: RwLock<HashMap<u128, Vec<u32>>>,
    chi_memo: RwLock<HashMap<u128, i64>>,
}

impl Oracle {
    pub fn new(fan: Fan) -> Result<Oracle> {
        if !fan.is_smooth() {
            return Err(Error::FanCheck("oracle requires a smooth fan".into()));
        }
        if !fan.is_complete() {
            return Err(Error::FanCheck("oracle requires a complete fan".into()));
        }
        if fan.rays().len() > 128 {
            return Err(Error::FanCheck("too many rays for the subset encoding".into()));
        }
        // all faces of the ray complex: subsets of maximal cones
        let mut seen = std::collections::BTreeSet::new();
        for cone in fan.max_cones() {
            let k = cone.len();
            for sub in 1u32..(1 << k) {
                let mut mask: u128 = 0;
                for (i, &r) in cone.iter().enumerate() {
                    if sub & (1 << i) != 0 {
                        mask |= 1u128 << r;
                    }
                }
                seen.insert(mask);
            }
        }
        let faces: Vec<Vec<u32>> = seen
            .iter()
            .map(|mask| (0..128).filter(|&i| mask & (1u128 << i) != 0).collect())
            .collect();
        let complex = super::homology::CellComplex::from_faces(&faces);
        let cell_masks: Vec<u128> = std::iter::once(0).chain(seen.into_iter()).collect();
        Ok(Oracle {
            fan,
            complex,
            cell_masks,
            betti_memo: RwLock::new(HashMap::new()),
            chi_memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn for_lm(n: u8) -> Result<Oracle> {
        Oracle::new(super::lm_fan(n)?)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    fn betti(&self, mask: u128) -> Vec<u32> {
        if let Some(b) = self.betti_memo.read().expect("lock").get(&mask) {
            return b.clone();
        }
        let mut alive: Vec<bool> =
            self.cell_masks.iter().map(|&f| f & !mask == 0).collect();
        let mut b = self.complex.reduced_betti_alive(&mut alive);
        b.resize(self.fan.dim() + 2, 0);
        self.betti_memo.write().expect("lock").insert(mask, b.clone());
        b
    }

    fn chi_tilde_neg(&self, mask: u128) -> i64 {
        if let Some(&c) = self.chi_memo.read().expect("lock").get(&mask) {
            return c;
        }
        // minus the reduced Euler characteristic of the subcomplex
        let mut sum: i64 = 0;
        for (c, &f) in self.cell_masks.iter().enumerate().skip(1) {
            if f & !mask == 0 {
                sum += if (self.complex.dim_of[c] - 1) % 2 == 0 { 1 } else { -1 };
            }
        }
        let val = 1 - sum;
        self.chi_memo.write().expect("lock").insert(mask, val);
        val
    }

    /// Full cohomology table of the divisor, exact. With a positive margin
    /// the outermost shell of the candidate region must carry nothing; a
    /// contribution there means the region heuristic truncated and the call
    /// fails loudly instead of returning a wrong table.
    pub fn cohomology(&self, d: &TDivisor, margin: i64) -> Result<CohomologyTable> {
        let dim = self.fan.dim();
        let mut h = vec![0u64; dim + 1];
        let (counts, shell) = self.scan(d, margin)?;
        if margin >= 1 {
            self.guard_shell(&shell)?;
        }
        for (mask, count) in counts {
            let b = self.betti(mask);
            for p in 0..=dim {
                h[p] += count * b[p] as u64;
            }
        }
        Ok(CohomologyTable { h })
    }

    /// Euler characteristic only; no rank computations beyond the guard.
    pub fn chi(&self, d: &TDivisor, margin: i64) -> Result<i64> {
        let mut total: i64 = 0;
        let (counts, shell) = self.scan(d, margin)?;
        if margin >= 1 {
            self.guard_shell(&shell)?;
        }
        for (mask, count) in counts {
            total += count as i64 * self.chi_tilde_neg(mask);
        }
        Ok(total)
    }

    fn guard_shell(&self, shell: &HashMap<u128, u64>) -> Result<()> {
        for &mask in shell.keys() {
            if self.betti(mask).iter().any(|&b| b != 0) {
                return Err(Error::FanCheck(
                    "the candidate-region boundary carries cohomology; enlarge the margin".into(),
                ));
            }
        }
        Ok(())
    }

    /// Acyclicity shortcut.
    pub fn is_acyclic(&self, d: &TDivisor, margin: i64) -> Result<bool> {
        Ok(self.cohomology(d, margin)?.is_zero())
    }

    /// Lattice-point counts of the candidate region, aggregated per
    /// negative-ray pattern, plus the patterns met on the region boundary.
    #[allow(clippy::type_complexity)]
    fn scan(&self, d: &TDivisor, margin: i64) -> Result<(HashMap<u128, u64>, HashMap<u128, u64>)> {
        let dim = self.fan.dim();
        if d.coeffs.len() != self.fan.rays().len() {
            return Err(Error::invalid("divisor does not match the fan"));
        }
        let mut counts: HashMap<u128, u64> = HashMap::new();
        let mut shell: HashMap<u128, u64> = HashMap::new();
        if dim == 0 {
            counts.insert(0, 1);
            return Ok((counts, shell));
        }
        let verts = chart_vertices(&self.fan, d)
            .ok_or_else(|| Error::FanCheck("chart solve failed".into()))?;
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        for v in &verts {
            for i in 0..dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        for i in 0..dim {
            lo[i] -= margin;
            hi[i] += margin;
        }
        let rays = self.fan.rays();
        let nrays = rays.len();
        let mut prefix = lo[..dim - 1].to_vec();
        let (xlo, xhi) = (lo[dim - 1], hi[dim - 1]);
        // per-ray affine constants over the inner coordinate, updated
        // incrementally as the prefix odometer advances
        let mut consts: Vec<i64> = (0..nrays)
            .map(|r| d.coeffs[r] + dot(&prefix, &rays[r][..dim - 1]))
            .collect();
        let mut events: Vec<(i64, u32)> = Vec::with_capacity(nrays);
        loop {
            events.clear();
            let mut mask: u128 = 0;
            for (r, v) in rays.iter().enumerate() {
                let c = consts[r];
                let s = v[dim - 1];
                if s == 0 {
                    if c < 0 {
                        mask |= 1u128 << r;
                    }
                } else if s > 0 {
                    // negative exactly for x <= t
                    let t = (-1 - c).div_euclid(s);
                    if t >= xlo {
                        mask |= 1u128 << r;
                        if t < xhi {
                            events.push((t + 1, r as u32)); // leaves
                        }
                    }
                } else {
                    // negative exactly for x >= t
                    let t = ceil_div(-1 - c, s);
                    if t <= xlo {
                        mask |= 1u128 << r;
                    } else if t <= xhi {
                        events.push((t, r as u32)); // enters
                    }
                }
            }
            events.sort_unstable();
            let boundary_line =
                (0..dim - 1).any(|i| prefix[i] == lo[i] || prefix[i] == hi[i]);
            let mut cur = xlo;
            let mut idx = 0;
            while cur <= xhi {
                let next = if idx < events.len() { events[idx].0 } else { xhi + 1 };
                if next > cur {
                    let seg = next.min(xhi + 1) - cur;
                    *counts.entry(mask).or_insert(0) += seg as u64;
                    if boundary_line {
                        *shell.entry(mask).or_insert(0) += seg as u64;
                    } else {
                        // only the two endpoints of an interior line touch
                        if cur == xlo {
                            *shell.entry(mask).or_insert(0) += 1;
                        }
                        if next > xhi {
                            *shell.entry(mask).or_insert(0) += 1;
                        }
                    }
                }
                cur = next;
                while idx < events.len() && events[idx].0 == cur {
                    mask ^= 1u128 << events[idx].1;
                    idx += 1;
                }
            }
            // advance the prefix odometer, keeping the constants in step
            let mut i = 0;
            loop {
                if i == dim - 1 {
                    return Ok((counts, shell));
                }
                prefix[i] += 1;
                if prefix[i] <= hi[i] {
                    for (r, v) in rays.iter().enumerate() {
                        consts[r] += v[i];
                    }
                    break;
                }
                let span = hi[i] - lo[i];
                prefix[i] = lo[i];
                for (r, v) in rays.iter().enumerate() {
                    consts[r] -= v[i] * span;
                }
                i += 1;
            }
        }
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    // div_euclid floors for b > 0 and ceils for b < 0
    let q = a.div_euclid(b);
    if b > 0 && a.rem_euclid(b) != 0 {
        q + 1
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::{g_pos, ModelId};
    use crate::toric::{class_to_tdivisor, lm_fan, Fan};

    fn p1_divisor(a0: i64, a1: i64) -> (Fan, TDivisor) {
        let fan = Fan::projective(1);
        let d = TDivisor { coeffs: vec![a0, a1] };
        (fan, d)
    }

    #[test]
    fn ceil_div_matches_floats() {
        for a in -20..=20i64 {
            for b in [-7i64, -3, -1, 1, 2, 5] {
                let expect = (a as f64 / b as f64).ceil() as i64;
                assert_eq!(ceil_div(a, b), expect, "{a}/{b}");
            }
        }
    }

    #[test]
    fn p1_line_bundles() {
        let (fan, _) = p1_divisor(0, 0);
        let oracle = Oracle::new(fan).unwrap();
        // O(-1) is acyclic
        let t = oracle.cohomology(&TDivisor { coeffs: vec![-1, 0] }, 1).unwrap();
        assert_eq!(t.h, vec![0, 0]);
        // O(m)
        for m in -5i64..=5 {
            let t = oracle.cohomology(&TDivisor { coeffs: vec![m, 0] }, 1).unwrap();
            let h0 = if m >= 0 { (m + 1) as u64 } else { 0 };
            let h1 = if m <= -2 { (-m - 1) as u64 } else { 0 };
            assert_eq!(t.h, vec![h0, h1], "m={m}");
            assert_eq!(oracle.chi(&TDivisor { coeffs: vec![m, 0] }, 1).unwrap(), m + 1);
        }
    }

    #[test]
    fn p2_serre_dual_of_o_minus_three() {
        let oracle = Oracle::new(Fan::projective(2)).unwrap();
        let t = oracle.cohomology(&TDivisor { coeffs: vec![-3, 0, 0] }, 1).unwrap();
        assert_eq!(t.h, vec![0, 0, 1]);
        let t = oracle.cohomology(&TDivisor { coeffs: vec![2, 0, 0] }, 1).unwrap();
        assert_eq!(t.h, vec![6, 0, 0]);
    }

    #[test]
    fn hyperplane_sections_count_points() {
        for n in 2..=4u8 {
            let oracle = Oracle::new(lm_fan(n).unwrap()).unwrap();
            let model = ModelId::lm_n(n).unwrap();
            let h = class_to_tdivisor(&g_pos(model, 1).unwrap(), oracle.fan()).unwrap();
            let t = oracle.cohomology(&h, 1).unwrap();
            assert_eq!(t.h[0], n as u64);
            assert!(t.h[1..].iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn lm3_conics_through_three_points() {
        let fan = lm_fan(3).unwrap();
        let oracle = Oracle::new(fan).unwrap();
        let model = ModelId::lm_n(3).unwrap();
        let g2 = class_to_tdivisor(&g_pos(model, 2).unwrap(), oracle.fan()).unwrap();
        let t = oracle.cohomology(&g2, 1).unwrap();
        assert_eq!(t.h, vec![3, 0, 0]);
        // and the dual is acyclic
        let g2d = class_to_tdivisor(&g_pos(model, 2).unwrap().neg(), oracle.fan()).unwrap();
        assert!(oracle.is_acyclic(&g2d, 1).unwrap());
    }

    #[test]
    fn serre_duality_spot_checks() {
        for fan in [Fan::projective(2), Fan::product(&Fan::projective(1), &Fan::projective(1)), lm_fan(3).unwrap()] {
            let dim = fan.dim();
            let oracle = Oracle::new(fan).unwrap();
            let k = TDivisor::canonical(oracle.fan());
            let nrays = oracle.fan().rays().len();
            for seed in 0..40u64 {
                let coeffs: Vec<i64> =
                    (0..nrays).map(|i| ((seed * 31 + i as u64 * 17) % 7) as i64 - 3).collect();
                let d = TDivisor { coeffs };
                let t = oracle.cohomology(&d, 1).unwrap();
                let td = oracle.cohomology(&k.sub(&d), 1).unwrap();
                for p in 0..=dim {
                    assert_eq!(t.h[p], td.h[dim - p], "seed={seed} p={p}");
                }
            }
        }
    }

    #[test]
    fn shift_invariance_spot_checks() {
        let oracle = Oracle::new(lm_fan(4).unwrap()).unwrap();
        let model = ModelId::lm_n(4).unwrap();
        let base = class_to_tdivisor(&g_pos(model, 2).unwrap().neg(), oracle.fan()).unwrap();
        let t0 = oracle.cohomology(&base, 1).unwrap();
        for seed in 0..10i64 {
            let m: Vec<i64> = (0..3).map(|i| (seed * 7 + i * 5) % 3 - 1).collect();
            let shifted = base.add(&TDivisor::principal(oracle.fan(), &m));
            assert_eq!(oracle.cohomology(&shifted, 1).unwrap(), t0);
        }
    }

    #[test]
    fn margin_robustness() {
        let oracle = Oracle::new(lm_fan(3).unwrap()).unwrap();
        let d = TDivisor { coeffs: vec![1, -2, 0, 3, -1, 0] };
        let t0 = oracle.cohomology(&d, 0).unwrap();
        let t2 = oracle.cohomology(&d, 2).unwrap();
        assert_eq!(t0, t2);
    }

    #[test]
    fn nef_h0_equals_polytope_points() {
        let fan = lm_fan(3).unwrap();
        let oracle = Oracle::new(fan).unwrap();
        let model = ModelId::lm_n(3).unwrap();
        for a in 1..=2u8 {
            let d = class_to_tdivisor(&g_pos(model, a).unwrap(), oracle.fan()).unwrap();
            let t = oracle.cohomology(&d, 1).unwrap();
            assert_eq!(t.h[0], crate::toric::polytope_point_count(oracle.fan(), &d));
            assert!(t.h[1..].iter().all(|&x| x == 0));
        }
    }
}
