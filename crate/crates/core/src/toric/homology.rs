//! Reduced rational homology of small simplicial complexes.
//!
//! The augmented chain complex is shrunk by homology-preserving pair
//! removals: a cell whose restricted boundary has a single entry is removed
//! with that entry (coreduction), a cell with a single remaining coface is
//! removed with it (collapse). Cells isolated on both sides split off as
//! free generators. Whatever survives is handled by exact sparse column
//! reduction over the rationals.
//!
//! The cell structure can be built once and queried against many aliveness
//! filters; the oracle uses this for its per-pattern tables.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// The augmented boundary structure of a simplicial complex. Cell `0` is the
/// empty face; `dim_of` stores dimension plus one.
pub struct CellComplex {
    pub dim_of: Vec<u8>,
    pub boundary: Vec<Vec<(u32, i8)>>,
    pub cofaces: Vec<Vec<u32>>,
    pub top: usize,
}

impl CellComplex {
    /// Builds the structure from faces given as sorted vertex lists, closed
    /// under subsets. Cell `i + 1` corresponds to `faces[i]`.
    pub fn from_faces(faces: &[Vec<u32>]) -> CellComplex {
        let top = faces.iter().map(|f| f.len()).max().unwrap_or(0);
        let ncells = faces.len() + 1;
        let mut index: HashMap<&[u32], usize> = HashMap::with_capacity(ncells);
        for (i, f) in faces.iter().enumerate() {
            index.insert(f.as_slice(), i + 1);
        }
        let mut dim_of = vec![0u8; ncells];
        let mut boundary: Vec<Vec<(u32, i8)>> = vec![Vec::new(); ncells];
        let mut cofaces: Vec<Vec<u32>> = vec![Vec::new(); ncells];
        let mut facet = Vec::new();
        for (i, f) in faces.iter().enumerate() {
            let id = i + 1;
            dim_of[id] = f.len() as u8;
            if f.len() == 1 {
                boundary[id].push((0, 1));
                cofaces[0].push(id as u32);
                continue;
            }
            let mut sign = 1i8;
            for cut in 0..f.len() {
                facet.clear();
                facet.extend_from_slice(&f[..cut]);
                facet.extend_from_slice(&f[cut + 1..]);
                let row = index[facet.as_slice()];
                boundary[id].push((row as u32, sign));
                cofaces[row].push(id as u32);
                sign = -sign;
            }
        }
        CellComplex { dim_of, boundary, cofaces, top }
    }

    /// Reduced Betti numbers of the subcomplex of alive cells; `alive[0]`
    /// must be true and the alive set closed under taking faces. The slice
    /// is consumed as scratch space.
    pub fn reduced_betti_alive(&self, alive: &mut [bool]) -> Vec<u32> {
        let ncells = self.dim_of.len();
        let mut bnd_count: Vec<u32> = vec![0; ncells];
        let mut cob_count: Vec<u32> = vec![0; ncells];
        for c in 0..ncells {
            if !alive[c] {
                continue;
            }
            // faces of alive cells are alive, so the boundary count is full
            bnd_count[c] = self.boundary[c].len() as u32;
            let mut cob = 0;
            for &t in &self.cofaces[c] {
                if alive[t as usize] {
                    cob += 1;
                }
            }
            cob_count[c] = cob;
        }
        let mut queue: Vec<u32> = (0..ncells as u32)
            .filter(|&i| alive[i as usize] && (bnd_count[i as usize] == 1 || cob_count[i as usize] == 1))
            .collect();

        macro_rules! kill {
            ($c:expr) => {{
                let c = $c;
                alive[c] = false;
                for &(b, _) in &self.boundary[c] {
                    let b = b as usize;
                    if alive[b] {
                        cob_count[b] -= 1;
                        if cob_count[b] == 1 || bnd_count[b] == 1 {
                            queue.push(b as u32);
                        }
                    }
                }
                for &t in &self.cofaces[c] {
                    let t = t as usize;
                    if alive[t] {
                        bnd_count[t] -= 1;
                        if bnd_count[t] == 1 || cob_count[t] == 1 {
                            queue.push(t as u32);
                        }
                    }
                }
            }};
        }

        while let Some(c) = queue.pop() {
            let c = c as usize;
            if !alive[c] {
                continue;
            }
            if bnd_count[c] == 1 {
                let partner = self.boundary[c]
                    .iter()
                    .map(|&(b, _)| b as usize)
                    .find(|&b| alive[b])
                    .expect("counted boundary entry");
                kill!(c);
                kill!(partner);
            } else if cob_count[c] == 1 {
                let partner = self.cofaces[c]
                    .iter()
                    .map(|&t| t as usize)
                    .find(|&t| alive[t])
                    .expect("counted coface entry");
                kill!(c);
                kill!(partner);
            }
        }

        let mut betti = vec![0u32; self.top + 2];
        let mut rest: Vec<usize> = Vec::new();
        for c in 0..ncells {
            if !alive[c] {
                continue;
            }
            if bnd_count[c] == 0 && cob_count[c] == 0 {
                betti[self.dim_of[c] as usize] += 1;
            } else {
                rest.push(c);
            }
        }
        if rest.is_empty() {
            return betti;
        }

        // exact ranks on the stuck remainder
        let pos: HashMap<usize, usize> = rest.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut f_counts = vec![0i64; self.top + 2];
        for &c in &rest {
            f_counts[self.dim_of[c] as usize] += 1;
        }
        let mut ranks = vec![0i64; self.top + 3];
        for d in 1..=self.top + 1 {
            let cols: Vec<Vec<(usize, BigRational)>> = rest
                .iter()
                .filter(|&&c| self.dim_of[c] as usize == d)
                .map(|&c| {
                    let mut col: Vec<(usize, BigRational)> = self.boundary[c]
                        .iter()
                        .filter(|&&(b, _)| alive[b as usize])
                        .map(|&(b, s)| (pos[&(b as usize)], BigRational::from(BigInt::from(s))))
                        .collect();
                    col.sort_by_key(|&(r, _)| r);
                    col
                })
                .collect();
            if cols.is_empty() {
                continue;
            }
            ranks[d] = column_rank(cols);
        }
        for d in 0..self.top + 2 {
            betti[d] += (f_counts[d] - ranks[d] - ranks[d + 1]) as u32;
        }
        betti
    }
}

/// Convenience entry point for a standalone face list.
#[allow(dead_code)]
pub fn reduced_betti(faces: &[Vec<u32>]) -> Vec<u32> {
    let cx = CellComplex::from_faces(faces);
    let mut alive = vec![true; faces.len() + 1];
    cx.reduced_betti_alive(&mut alive)
}

/// Exact rank by sparse column reduction.
fn column_rank(mut cols: Vec<Vec<(usize, BigRational)>>) -> i64 {
    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    let mut rank = 0i64;
    for j in 0..cols.len() {
        loop {
            let Some(&(low, ref lead)) = cols[j].last() else { break };
            let Some(&owner) = low_owner.get(&low) else { break };
            let factor = lead / &cols[owner].last().expect("pivot column").1;
            let merged = sub_scaled(&cols[j], &cols[owner], &factor);
            cols[j] = merged;
        }
        if let Some(&(low, _)) = cols[j].last() {
            low_owner.insert(low, j);
            rank += 1;
        }
    }
    rank
}

fn sub_scaled(
    a: &[(usize, BigRational)],
    b: &[(usize, BigRational)],
    factor: &BigRational,
) -> Vec<(usize, BigRational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, -(factor * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - factor * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closure(facets: &[&[u32]]) -> Vec<Vec<u32>> {
        use std::collections::BTreeSet;
        let mut all = BTreeSet::new();
        for f in facets {
            let k = f.len();
            for mask in 1u32..(1 << k) {
                let sub: Vec<u32> =
                    (0..k).filter(|i| mask & (1 << i) != 0).map(|i| f[i]).collect();
                all.insert(sub);
            }
        }
        all.into_iter().collect()
    }

    #[test]
    fn empty_complex_has_reduced_minus_one() {
        let b = reduced_betti(&[]);
        assert_eq!(b[0], 1);
    }

    #[test]
    fn point_is_acyclic() {
        let b = reduced_betti(&closure(&[&[0]]));
        assert!(b.iter().all(|&x| x == 0));
    }

    #[test]
    fn two_points() {
        let b = reduced_betti(&closure(&[&[0], &[1]]));
        assert_eq!(b[0], 0);
        assert_eq!(b[1], 1); // H~_0
    }

    #[test]
    fn circle() {
        let b = reduced_betti(&closure(&[&[0, 1], &[1, 2], &[0, 2]]));
        assert_eq!(b[1], 0);
        assert_eq!(b[2], 1); // H~_1
    }

    #[test]
    fn two_sphere() {
        let b = reduced_betti(&closure(&[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]));
        assert_eq!(b[1], 0);
        assert_eq!(b[2], 0);
        assert_eq!(b[3], 1); // H~_2
    }

    #[test]
    fn filled_triangle_is_acyclic() {
        let b = reduced_betti(&closure(&[&[0, 1, 2]]));
        assert!(b.iter().all(|&x| x == 0));
    }

    #[test]
    fn wedge_and_rp2() {
        let b = reduced_betti(&closure(&[
            &[0, 1],
            &[1, 2],
            &[0, 2],
            &[0, 3],
            &[3, 4],
            &[0, 4],
        ]));
        assert_eq!(b[1], 0);
        assert_eq!(b[2], 2);
        // six-vertex projective plane: no rational homology
        let rp2: Vec<&[u32]> = vec![
            &[0, 1, 2],
            &[0, 2, 3],
            &[0, 3, 4],
            &[0, 4, 5],
            &[0, 1, 5],
            &[1, 2, 4],
            &[2, 4, 5],
            &[2, 3, 5],
            &[1, 3, 5],
            &[1, 3, 4],
        ];
        let b = reduced_betti(&closure(&rp2));
        assert!(b.iter().all(|&x| x == 0), "{b:?}");
    }

    #[test]
    fn disjoint_union_counts_components() {
        let b = reduced_betti(&closure(&[&[0, 1, 2], &[3, 4], &[5]]));
        assert_eq!(b[1], 2);
        assert!(b[2..].iter().all(|&x| x == 0));
    }

    #[test]
    fn torus_triangulation() {
        // the cyclic seven-vertex torus: {i, i+1, i+3} and {i, i+2, i+3} mod 7
        let mut facets: Vec<Vec<u32>> = Vec::new();
        for i in 0..7u32 {
            let mut a = vec![i, (i + 1) % 7, (i + 3) % 7];
            let mut b = vec![i, (i + 2) % 7, (i + 3) % 7];
            a.sort_unstable();
            b.sort_unstable();
            facets.push(a);
            facets.push(b);
        }
        let refs: Vec<&[u32]> = facets.iter().map(|f| f.as_slice()).collect();
        let b = reduced_betti(&closure(&refs));
        assert_eq!(&b[..4], &[0, 0, 2, 1]);
    }

    #[test]
    fn alive_filter_matches_full_computation() {
        // full subcomplexes of a small complex, both code paths
        let faces = closure(&[&[0, 1, 2], &[1, 2, 3], &[2, 3, 4], &[0, 4]]);
        let cx = CellComplex::from_faces(&faces);
        for pick in 0u32..(1 << 5) {
            let keep: Vec<u32> = (0..5).filter(|i| pick & (1 << i) != 0).collect();
            let sub: Vec<Vec<u32>> =
                faces.iter().filter(|f| f.iter().all(|v| keep.contains(v))).cloned().collect();
            let direct = reduced_betti(&sub);
            let mut alive: Vec<bool> = std::iter::once(true)
                .chain(faces.iter().map(|f| f.iter().all(|v| keep.contains(v))))
                .collect();
            let filtered = cx.reduced_betti_alive(&mut alive);
            for k in 0..direct.len().min(filtered.len()) {
                assert_eq!(direct[k], filtered[k], "pick={pick} k={k}");
            }
        }
    }
}
