//! Smooth complete fans, torus-invariant divisors and the exact line-bundle
//! cohomology oracle. The permutohedral fan of the chain-curve moduli space
//! is built from subset rays and flag cones; its boundary tags tie the toric
//! picture to the Kapranov class basis.

pub(crate) mod homology;
mod oracle;

pub use oracle::{chart_vertices, CohomologyTable, Oracle};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::combinat::{mask_elems, mask_string, Mask};
use crate::picard::DivisorClass;
use crate::{Error, Result};

pub type Vector = Vec<i64>;

/// A rational polyhedral fan given by primitive rays and maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vector>,
    max_cones: Vec<Vec<u32>>,
    /// For moduli fans: the boundary marking set of each ray.
    tags: BTreeMap<u32, Mask>,
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<Vector>, max_cones: Vec<Vec<u32>>) -> Self {
        Fan { dim, rays, max_cones, tags: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<u32>] {
        &self.max_cones
    }

    pub fn tags(&self) -> &BTreeMap<u32, Mask> {
        &self.tags
    }

    pub fn ray_by_tag(&self, tag: Mask) -> Option<u32> {
        self.tags.iter().find(|&(_, &t)| t == tag).map(|(&i, _)| i)
    }

    /// Every maximal cone is a lattice basis.
    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|c| {
            c.len() == self.dim && {
                let mat: Vec<&Vector> = c.iter().map(|&i| &self.rays[i as usize]).collect();
                det(&mat).map(|d| d == 1 || d == -1).unwrap_or(false)
            }
        })
    }

    /// Every wall lies in exactly two maximal cones.
    pub fn is_complete(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        let mut walls: HashMap<Vec<u32>, u32> = HashMap::new();
        for cone in &self.max_cones {
            for skip in 0..cone.len() {
                let mut w: Vec<u32> = cone.clone();
                w.remove(skip);
                *walls.entry(w).or_insert(0) += 1;
            }
        }
        walls.values().all(|&c| c == 2)
    }

    /// The fan of projective space of the given dimension.
    pub fn projective(d: usize) -> Fan {
        let mut rays: Vec<Vector> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1 } else { 0 }).collect())
            .collect();
        rays.push(vec![-1; d]);
        let max_cones = (0..=d as u32)
            .map(|skip| (0..=d as u32).filter(|&i| i != skip).collect())
            .collect();
        Fan::new(d, rays, max_cones)
    }

    /// Product fan; rays of the left factor come first.
    pub fn product(a: &Fan, b: &Fan) -> Fan {
        let dim = a.dim + b.dim;
        let mut rays = Vec::with_capacity(a.rays.len() + b.rays.len());
        for r in &a.rays {
            let mut v = r.clone();
            v.extend(std::iter::repeat(0).take(b.dim));
            rays.push(v);
        }
        for r in &b.rays {
            let mut v = vec![0; a.dim];
            v.extend(r.iter().copied());
            rays.push(v);
        }
        let off = a.rays.len() as u32;
        let mut max_cones = Vec::with_capacity(a.max_cones.len() * b.max_cones.len());
        for ca in &a.max_cones {
            for cb in &b.max_cones {
                let mut c = ca.clone();
                c.extend(cb.iter().map(|&i| i + off));
                max_cones.push(c);
            }
        }
        Fan::new(dim, rays, max_cones)
    }
}

fn det(mat: &[&Vector]) -> Option<i128> {
    let n = mat.len();
    if n == 0 {
        return Some(1);
    }
    if mat.iter().any(|r| r.len() != n) {
        return None;
    }
    // fraction-free elimination
    let mut m: Vec<Vec<i128>> = mat.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut denom: i128 = 1;
    let mut sign: i128 = 1;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r][col] != 0) else {
            return Some(0);
        };
        if pivot != col {
            m.swap(col, pivot);
            sign = -sign;
        }
        for r in col + 1..n {
            for c in col + 1..n {
                m[r][c] = (m[r][c] * m[col][col] - m[r][col] * m[col][c]) / denom;
            }
            m[r][col] = 0;
        }
        denom = m[col][col];
    }
    Some(sign * m[n - 1][n - 1])
}

/// The permutohedral fan of the moduli space over the given ground set:
/// one ray per proper nonempty subset, one maximal cone per complete flag.
pub fn lm_fan_over(ground: Mask) -> Result<Fan> {
    let elems: Vec<u8> = mask_elems(ground).collect();
    let n = elems.len();
    if n < 1 {
        return Err(Error::UndefinedGroundSet);
    }
    if n > 7 {
        return Err(Error::invalid("moduli fans are capped at seven points"));
    }
    let dim = n - 1;
    if n == 1 {
        return Ok(Fan::new(0, Vec::new(), vec![Vec::new()]));
    }
    // coordinates: indicator of S on the first n-1 sorted elements,
    // shifted by -1 everywhere when the largest element lies in S
    let coord = |s: Mask| -> Vector {
        let anchor_in = s & (1 << (elems[n - 1] - 1)) != 0;
        (0..dim)
            .map(|i| {
                let set = s & (1 << (elems[i] - 1)) != 0;
                (set as i64) - (anchor_in as i64)
            })
            .collect()
    };
    let mut subsets: Vec<Mask> = Vec::new();
    let mut sub = ground;
    loop {
        sub = (sub - 1) & ground;
        if sub == 0 {
            break;
        }
        subsets.push(sub);
    }
    subsets.sort_unstable();
    let mut index = HashMap::new();
    let mut rays = Vec::with_capacity(subsets.len());
    let mut tags = BTreeMap::new();
    for (i, &s) in subsets.iter().enumerate() {
        index.insert(s, i as u32);
        rays.push(coord(s));
        tags.insert(i as u32, s);
    }
    // maximal cones from permutations of the ground elements
    let mut max_cones = Vec::new();
    let mut perm: Vec<u8> = elems.clone();
    permute(&mut perm, 0, &mut |p| {
        let mut acc: Mask = 0;
        let mut cone = Vec::with_capacity(dim);
        for &e in &p[..n - 1] {
            acc |= 1 << (e - 1);
            cone.push(index[&acc]);
        }
        cone.sort_unstable();
        max_cones.push(cone);
    });
    max_cones.sort();
    let mut fan = Fan::new(dim, rays, max_cones);
    fan.tags = tags;
    Ok(fan)
}

pub fn lm_fan(n: u8) -> Result<Fan> {
    if n == 0 || n > 16 {
        return Err(Error::UndefinedGroundSet);
    }
    lm_fan_over(if n == 16 { u16::MAX } else { (1 << n) - 1 })
}

fn permute(items: &mut Vec<u8>, k: usize, f: &mut impl FnMut(&[u8])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// A torus-invariant divisor: one integer per ray.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TDivisor {
    pub coeffs: Vec<i64>,
}

impl TDivisor {
    pub fn zero(fan: &Fan) -> TDivisor {
        TDivisor { coeffs: vec![0; fan.rays().len()] }
    }

    /// The canonical divisor `-sum of all prime toric divisors`.
    pub fn canonical(fan: &Fan) -> TDivisor {
        TDivisor { coeffs: vec![-1; fan.rays().len()] }
    }

    pub fn add(&self, other: &TDivisor) -> TDivisor {
        TDivisor {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &TDivisor) -> TDivisor {
        TDivisor {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    /// The principal divisor of the character `m`.
    pub fn principal(fan: &Fan, m: &Vector) -> TDivisor {
        TDivisor { coeffs: fan.rays().iter().map(|v| dot(m, v)).collect() }
    }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Translates a class in the Kapranov basis to a torus-invariant divisor on
/// the tagged moduli fan. Exceptional classes go to their tagged rays, the
/// hyperplane class to the pullback of a coordinate hyperplane.
pub fn class_to_tdivisor(class: &DivisorClass, fan: &Fan) -> Result<TDivisor> {
    if !class.is_integral() {
        return Err(Error::NonIntegralClass(class.to_string()));
    }
    let model = class.model();
    if model.r() != -1 {
        return Err(Error::invalid("only moduli-model classes translate to the tagged fan"));
    }
    let anchor = mask_elems(model.ground()).last().expect("nonempty ground set");
    let anchor_bit: Mask = 1 << (anchor - 1);
    let mut coeffs = vec![0i64; fan.rays().len()];
    let h: i64 = i64::try_from(&class.h().to_integer())
        .map_err(|_| Error::invalid("coefficient overflow"))?;
    if h != 0 {
        for (&ray, &tag) in fan.tags() {
            if tag & anchor_bit == 0 {
                coeffs[ray as usize] += h;
            }
        }
    }
    for (j, c) in class.e_iter() {
        let ray = fan
            .ray_by_tag(j)
            .ok_or_else(|| Error::invalid(format!("no ray tagged {}", mask_string(j))))?;
        let c: i64 =
            i64::try_from(&c.to_integer()).map_err(|_| Error::invalid("coefficient overflow"))?;
        coeffs[ray as usize] += c;
    }
    Ok(TDivisor { coeffs })
}

/// Solves for a character `m` with `D - D' = div(m)`; two divisors are
/// linearly equivalent exactly when such a character exists.
pub fn lin_equiv(fan: &Fan, d1: &TDivisor, d2: &TDivisor) -> Option<Vector> {
    if fan.dim() == 0 {
        return Some(Vec::new());
    }
    let diff: Vec<i64> = d1.coeffs.iter().zip(&d2.coeffs).map(|(a, b)| a - b).collect();
    let cone = &fan.max_cones()[0];
    let basis: Vec<&Vector> = cone.iter().map(|&i| &fan.rays()[i as usize]).collect();
    let rhs: Vec<i64> = cone.iter().map(|&i| diff[i as usize]).collect();
    let m = solve_unimodular(&basis, &rhs)?;
    for (i, v) in fan.rays().iter().enumerate() {
        if dot(&m, v) != diff[i] {
            return None;
        }
    }
    Some(m)
}

/// Solves `<m, row_i> = rhs_i` for a unimodular row set, exactly over the
/// integers (Cramer with determinant +-1).
pub fn solve_unimodular(rows: &[&Vector], rhs: &[i64]) -> Option<Vector> {
    let n = rows.len();
    let d = det(rows)?;
    if d != 1 && d != -1 {
        return None;
    }
    let mut m = Vec::with_capacity(n);
    for col in 0..n {
        let replaced: Vec<Vector> = (0..n)
            .map(|r| {
                let mut row = rows[r].clone();
                row[col] = rhs[r];
                row
            })
            .collect();
        let refs: Vec<&Vector> = replaced.iter().collect();
        let dc = det(&refs)?;
        m.push((dc / d) as i64);
    }
    Some(m)
}

/// Result of the nef test: either nef, or a wall curve of negative degree.
#[derive(Debug, Clone)]
pub struct NefResult {
    pub nef: bool,
    /// A wall with negative intersection, as (cone rays minus one, degree).
    pub witness: Option<(Vec<u32>, i64)>,
}

/// Evaluates the divisor on every wall curve through the support-function
/// kink; nef means every value is nonnegative.
pub fn nef_check(fan: &Fan, d: &TDivisor) -> Result<NefResult> {
    let walls = wall_list(fan)?;
    for (wall, rho, rho2) in walls {
        let cone_rows: Vec<&Vector> = wall
            .iter()
            .chain(std::iter::once(&rho))
            .map(|&i| &fan.rays()[i as usize])
            .collect();
        let rhs: Vec<i64> = wall
            .iter()
            .chain(std::iter::once(&rho))
            .map(|&i| -d.coeffs[i as usize])
            .collect();
        let m = solve_unimodular(&cone_rows, &rhs)
            .ok_or_else(|| Error::FanCheck("non-unimodular cone in wall scan".into()))?;
        let deg = dot(&m, &fan.rays()[rho2 as usize]) + d.coeffs[rho2 as usize];
        if deg < 0 {
            return Ok(NefResult { nef: false, witness: Some((wall, deg)) });
        }
    }
    Ok(NefResult { nef: true, witness: None })
}

/// Interior walls as (shared rays, extra ray of one side, extra ray of the other).
fn wall_list(fan: &Fan) -> Result<Vec<(Vec<u32>, u32, u32)>> {
    let mut seen: HashMap<Vec<u32>, (u32, u32)> = HashMap::new();
    let mut order: Vec<Vec<u32>> = Vec::new();
    for cone in fan.max_cones() {
        for skip in 0..cone.len() {
            let mut w = cone.clone();
            let extra = w.remove(skip);
            match seen.entry(w.clone()) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert((extra, u32::MAX));
                    order.push(w);
                }
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    if e.get().1 != u32::MAX {
                        return Err(Error::FanCheck("wall in more than two cones".into()));
                    }
                    e.get_mut().1 = extra;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(order.len());
    for w in order {
        let (a, b) = seen[&w];
        if b == u32::MAX {
            return Err(Error::FanCheck("wall in a single cone; fan not complete".into()));
        }
        out.push((w, a, b));
    }
    Ok(out)
}

/// Counts lattice points of the section polytope `{m : <m, v> >= -a_v}`;
/// a direct scan, independent of the cohomology machinery.
pub fn polytope_point_count(fan: &Fan, d: &TDivisor) -> u64 {
    if fan.dim() == 0 {
        return 1;
    }
    let verts = match oracle::chart_vertices(fan, d) {
        Some(v) => v,
        None => return 0,
    };
    let dim = fan.dim();
    let mut lo = vec![i64::MAX; dim];
    let mut hi = vec![i64::MIN; dim];
    for v in &verts {
        for i in 0..dim {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    let mut count = 0u64;
    let mut m = lo.clone();
    'outer: loop {
        if fan.rays().iter().enumerate().all(|(i, v)| dot(&m, v) + d.coeffs[i] >= 0) {
            count += 1;
        }
        for i in 0..dim {
            m[i] += 1;
            if m[i] <= hi[i] {
                continue 'outer;
            }
            m[i] = lo[i];
        }
        break;
    }
    count
}

/// The factor fans of a product stratum, one per block.
pub fn stratum_fan(blocks: &[Mask]) -> Result<Vec<Fan>> {
    blocks.iter().map(|&b| lm_fan_over(b)).collect()
}

/// The star fan of the cone spanned by the given rays, with the induced
/// quotient lattice, plus the map from surviving old rays to new ray ids.
pub fn star_restrict(fan: &Fan, cone_rays: &[u32]) -> Result<(Fan, BTreeMap<u32, u32>)> {
    let k = cone_rays.len();
    let host = fan
        .max_cones()
        .iter()
        .find(|c| cone_rays.iter().all(|r| c.contains(r)))
        .ok_or(Error::NotACone)?;
    // unimodular basis adapted to the cone: its rays first
    let mut basis: Vec<u32> = cone_rays.to_vec();
    for &r in host {
        if !basis.contains(&r) {
            basis.push(r);
        }
    }
    let rows: Vec<&Vector> = basis.iter().map(|&i| &fan.rays()[i as usize]).collect();
    // coordinates of v in this basis: solve B^T y = v
    let dim = fan.dim();
    let coords = |v: &Vector| -> Option<Vector> {
        let cols: Vec<Vector> = (0..dim)
            .map(|i| (0..dim).map(|j| rows[j][i]).collect())
            .collect();
        let refs: Vec<&Vector> = cols.iter().collect();
        solve_unimodular(&refs, v)
    };

    let mut new_rays: Vec<Vector> = Vec::new();
    let mut ray_map: BTreeMap<u32, u32> = BTreeMap::new();
    let mut new_cones: BTreeSet<Vec<u32>> = BTreeSet::new();
    for cone in fan.max_cones() {
        if !cone_rays.iter().all(|r| cone.contains(r)) {
            continue;
        }
        let mut img = Vec::new();
        for &r in cone {
            if cone_rays.contains(&r) {
                continue;
            }
            let new_id = if let Some(&id) = ray_map.get(&r) {
                id
            } else {
                let y = coords(&fan.rays()[r as usize])
                    .ok_or_else(|| Error::FanCheck("non-unimodular adapted basis".into()))?;
                let id = new_rays.len() as u32;
                new_rays.push(y[k..].to_vec());
                ray_map.insert(r, id);
                id
            };
            img.push(new_id);
        }
        img.sort_unstable();
        new_cones.insert(img);
    }
    let mut star = Fan::new(dim - k, new_rays, new_cones.into_iter().collect());
    // carry tags through for moduli fans
    for (&old, &new) in &ray_map {
        if let Some(&t) = fan.tags().get(&old) {
            star.tags.insert(new, t);
        }
    }
    Ok((star, ray_map))
}

/// On-disk fan format, bit-exact across platforms.
#[derive(Serialize, Deserialize)]
struct FanCacheFile {
    rank: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<u32>>,
    tags: BTreeMap<String, String>,
}

pub fn save_fan(fan: &Fan, path: &Path) -> Result<()> {
    let file = FanCacheFile {
        rank: fan.dim(),
        rays: fan.rays().to_vec(),
        cones: fan.max_cones().to_vec(),
        tags: fan
            .tags()
            .iter()
            .map(|(&i, &t)| (i.to_string(), mask_string(t)))
            .collect(),
    };
    let json = serde_json::to_string(&file)?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_fan(path: &Path) -> Result<Fan> {
    let data = std::fs::read_to_string(path)?;
    let file: FanCacheFile = serde_json::from_str(&data)?;
    let mut fan = Fan::new(file.rank, file.rays, file.cones);
    for (k, v) in &file.tags {
        let idx: u32 = k.parse().map_err(|_| Error::invalid("bad ray index in cache"))?;
        let mut mask: Mask = 0;
        for e in v.split(',') {
            let e: u8 = e.parse().map_err(|_| Error::invalid("bad tag in cache"))?;
            mask |= 1 << (e - 1);
        }
        fan.tags.insert(idx, mask);
    }
    Ok(fan)
}

/// Builds (or reloads) the moduli fan, caching it under the given directory.
pub fn lm_fan_cached(n: u8, cache_dir: Option<&Path>) -> Result<Fan> {
    if let Some(dir) = cache_dir {
        let path = dir.join(format!("lm_{n}.json"));
        if path.exists() {
            let fan = load_fan(&path)?;
            if fan.rays().len() == (1usize << n) - 2 {
                return Ok(fan);
            }
        }
        let fan = lm_fan(n)?;
        std::fs::create_dir_all(dir)?;
        save_fan(&fan, &path)?;
        return Ok(fan);
    }
    lm_fan(n)
}

/// Verifies the tagged-fan/stratum dictionary: the star of the chain cone of
/// a stratum is the product of the block fans, ray for ray.
pub fn star_matches_product(fan: &Fan, blocks: &[Mask]) -> Result<bool> {
    let mut prefixes = Vec::new();
    let mut acc: Mask = 0;
    for &b in &blocks[..blocks.len() - 1] {
        acc |= b;
        prefixes.push(acc);
    }
    let cone: Vec<u32> = prefixes
        .iter()
        .map(|&p| fan.ray_by_tag(p).ok_or(Error::NotACone))
        .collect::<Result<_>>()?;
    let (star, _) = star_restrict(fan, &cone)?;

    // expected rays: for each factor, subsets sandwiched between prefixes
    let factors = stratum_fan(blocks)?;
    let mut expected = 0usize;
    for f in &factors {
        expected += f.rays().len();
    }
    if star.rays().len() != expected {
        return Ok(false);
    }
    let mut by_factor_count = vec![0usize; blocks.len()];
    for (_, &tag) in star.tags() {
        let mut placed = false;
        let mut prev: Mask = 0;
        for (j, &b) in blocks.iter().enumerate() {
            let upto = prev | b;
            if tag & prev == prev && tag & !upto == 0 && tag != prev && tag != upto {
                by_factor_count[j] += 1;
                placed = true;
                break;
            }
            prev = upto;
        }
        if !placed {
            return Ok(false);
        }
    }
    for (j, f) in factors.iter().enumerate() {
        if by_factor_count[j] != f.rays().len() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::{g_class, g_pos, ModelId};
    use num_rational::BigRational;
    use num_traits::One;

    #[test]
    fn lm_fan_counts() {
        for n in 2..=6u8 {
            let fan = lm_fan(n).unwrap();
            assert_eq!(fan.rays().len(), (1usize << n) - 2, "n={n}");
            assert_eq!(fan.max_cones().len(), (1..=n as usize).product::<usize>(), "n={n}");
            assert!(fan.is_smooth(), "n={n}");
            assert!(fan.is_complete(), "n={n}");
        }
        let p1 = lm_fan(2).unwrap();
        assert_eq!(p1.rays().len(), 2);
    }

    #[test]
    fn projective_fans() {
        for d in 1..=4 {
            let f = Fan::projective(d);
            assert!(f.is_smooth() && f.is_complete());
        }
        let sq = Fan::product(&Fan::projective(1), &Fan::projective(1));
        assert!(sq.is_smooth() && sq.is_complete());
        assert_eq!(sq.rays().len(), 4);
        assert_eq!(sq.max_cones().len(), 4);
    }

    #[test]
    fn nef_examples() {
        // the hyperplane class on the plane
        let p2 = Fan::projective(2);
        let mut d = TDivisor::zero(&p2);
        d.coeffs[0] = 1;
        let r = nef_check(&p2, &d).unwrap();
        assert!(r.nef);

        let fan = lm_fan(3).unwrap();
        let model = ModelId::lm_n(3).unwrap();
        let g2 = class_to_tdivisor(&g_pos(model, 2).unwrap(), &fan).unwrap();
        assert!(nef_check(&fan, &g2).unwrap().nef);
        let e1 = class_to_tdivisor(
            &{
                let mut c = crate::picard::DivisorClass::zero(model);
                c.add_e(0b001, -BigRational::one()).unwrap();
                c
            },
            &fan,
        )
        .unwrap();
        let r = nef_check(&fan, &e1).unwrap();
        assert!(!r.nef && r.witness.is_some());
    }

    #[test]
    fn lin_equiv_detects_shifts() {
        let fan = lm_fan(3).unwrap();
        let d = TDivisor::zero(&fan);
        let m = vec![2, -1];
        let shifted = d.add(&TDivisor::principal(&fan, &m));
        let found = lin_equiv(&fan, &shifted, &d).unwrap();
        assert_eq!(found, m);
        let mut other = d.clone();
        other.coeffs[0] += 1;
        assert!(lin_equiv(&fan, &other, &d).is_none());
    }

    #[test]
    fn psi_zero_symmetrization_is_linear_equivalent() {
        use crate::picard::boundary_class;
        use num_traits::Zero;
        for n in 3..=5u8 {
            let fan = lm_fan(n).unwrap();
            let model = ModelId::lm_n(n).unwrap();
            // n * H versus sum_k (n-k) Delta_k, cleared of denominators
            let mut h = crate::picard::DivisorClass::zero(model);
            h.add_h(BigRational::from(num_bigint::BigInt::from(n as i64)));
            let mut sym = crate::picard::DivisorClass::zero(model);
            let mut sub = model.ground();
            while sub > 0 {
                let k = crate::combinat::mask_len(sub) as i64;
                if (k as u8) < n {
                    let c = BigRational::from(num_bigint::BigInt::from(n as i64 - k));
                    if !c.is_zero() {
                        sym.add_assign(&boundary_class(model, sub).unwrap().scale(&c)).unwrap();
                    }
                }
                sub = (sub - 1) & model.ground();
            }
            let dh = class_to_tdivisor(&h, &fan).unwrap();
            let ds = class_to_tdivisor(&sym, &fan).unwrap();
            assert!(lin_equiv(&fan, &dh, &ds).is_some(), "n={n}");
        }
    }

    #[test]
    fn star_of_moduli_fan_is_product() {
        let fan = lm_fan(4).unwrap();
        assert!(star_matches_product(&fan, &[0b0011, 0b1100]).unwrap());
        assert!(star_matches_product(&fan, &[0b0101, 0b1010]).unwrap());
        let fan5 = lm_fan(5).unwrap();
        assert!(star_matches_product(&fan5, &[0b00011, 0b11100]).unwrap());
        // star at a maximal cone is the point fan
        let max = fan.max_cones()[0].clone();
        let (pt, _) = star_restrict(&fan, &max).unwrap();
        assert_eq!(pt.dim(), 0);
    }

    #[test]
    fn g_class_to_divisor_translation() {
        let fan = lm_fan(3).unwrap();
        let model = ModelId::lm_n(3).unwrap();
        // exceptional class lands on its tagged ray
        let mut e1 = crate::picard::DivisorClass::zero(model);
        e1.add_e(0b001, BigRational::one()).unwrap();
        let d = class_to_tdivisor(&e1, &fan).unwrap();
        let ray = fan.ray_by_tag(0b001).unwrap() as usize;
        assert_eq!(d.coeffs[ray], 1);
        assert_eq!(d.coeffs.iter().sum::<i64>(), 1);
        // non-integral classes are rejected
        let mut half = crate::picard::DivisorClass::zero(model);
        half.add_h(BigRational::new(1.into(), 2.into()));
        assert!(class_to_tdivisor(&half, &fan).is_err());
        let _ = g_class(model, 1).unwrap();
    }

    #[test]
    fn fan_cache_round_trip() {
        let dir = std::env::temp_dir().join("permucat-fan-cache-test");
        let _ = std::fs::remove_dir_all(&dir);
        let f1 = lm_fan_cached(4, Some(&dir)).unwrap();
        let f2 = lm_fan_cached(4, Some(&dir)).unwrap();
        assert_eq!(f1, f2);
        let raw1 = std::fs::read(dir.join("lm_4.json")).unwrap();
        save_fan(&f2, &dir.join("lm_4b.json")).unwrap();
        let raw2 = std::fs::read(dir.join("lm_4b.json")).unwrap();
        assert_eq!(raw1, raw2);
        let _ = std::fs::remove_dir_all(&dir);
    }
}
