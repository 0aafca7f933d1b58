//! Circular (Morgan-style) fingerprints and Tanimoto similarity.

use super::error::ChemError;
use super::molecule::Molecule;

pub const DEFAULT_WIDTH: usize = 2048;
pub const DEFAULT_RADIUS: u32 = 2;

/// Fixed-width bit vector tagged with the width and radius that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
    width: usize,
    radius: u32,
}

impl Fingerprint {
    pub fn empty(width: usize, radius: u32) -> Fingerprint {
        assert!(width.is_power_of_two(), "fingerprint width must be a power of two");
        Fingerprint {
            words: vec![0; width.div_ceil(64)],
            width,
            radius,
        }
    }

    pub fn from_bits(width: usize, radius: u32, bits: impl IntoIterator<Item = usize>) -> Fingerprint {
        let mut fp = Fingerprint::empty(width, radius);
        for b in bits {
            fp.set(b);
        }
        fp
    }

    pub fn set(&mut self, bit: usize) {
        assert!(bit < self.width, "bit {bit} out of range");
        self.words[bit / 64] |= 1u64 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        bit < self.width && self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(|&b| self.get(b))
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Canonical text of every atom environment, per radius, skipping radii
/// that add no bonds over the previous one.
pub fn atom_environments(mol: &Molecule, radius: u32) -> Vec<String> {
    let n = mol.atom_count();
    let mut labels: Vec<String> = (0..n)
        .map(|i| {
            let a = mol.atom(i);
            format!(
                "{}{}{:+}",
                a.element.symbol(),
                if a.aromatic { "a" } else { "" },
                a.formal_charge
            )
        })
        .collect();
    let mut out = labels.clone();

    // bonds covered by each atom's neighborhood, grown one shell per radius
    let mut covered: Vec<Vec<bool>> = vec![vec![false; mol.bonds().len()]; n];
    let mut frontier: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut reached: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            let mut r = vec![false; n];
            r[i] = true;
            r
        })
        .collect();
    let mut saturated = vec![false; n];

    for _ in 1..=radius {
        let next: Vec<String> = (0..n)
            .map(|i| {
                let mut nb: Vec<String> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(w, bi)| format!("{}{}", mol.bonds()[bi].order.symbol(), labels[w]))
                    .collect();
                nb.sort();
                format!("{}({})", labels[i], nb.join(","))
            })
            .collect();
        for i in 0..n {
            if saturated[i] {
                continue;
            }
            let mut grew = false;
            let mut new_frontier = Vec::new();
            for &v in &frontier[i] {
                for &(w, bi) in mol.neighbors(v) {
                    if !covered[i][bi] {
                        covered[i][bi] = true;
                        grew = true;
                    }
                    if !reached[i][w] {
                        reached[i][w] = true;
                        new_frontier.push(w);
                    }
                }
            }
            frontier[i] = new_frontier;
            if grew {
                out.push(next[i].clone());
            } else {
                saturated[i] = true;
            }
        }
        labels = next;
    }
    out
}

pub fn morgan_fingerprint(mol: &Molecule, radius: u32, width: usize) -> Fingerprint {
    let mut fp = Fingerprint::empty(width, radius);
    for env in atom_environments(mol, radius) {
        fp.set((fnv1a(env.as_bytes()) & (width as u64 - 1)) as usize);
    }
    fp
}

/// Fingerprint with the toolkit defaults (radius 2, 2048 bits).
pub fn default_fingerprint(mol: &Molecule) -> Fingerprint {
    morgan_fingerprint(mol, DEFAULT_RADIUS, DEFAULT_WIDTH)
}

/// Intersection over union of set bits; 1.0 for two empty vectors.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, ChemError> {
    if a.width != b.width || a.radius != b.radius {
        return Err(ChemError::IncomparableFingerprints);
    }
    let (mut both, mut either) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        both += (x & y).count_ones();
        either += (x | y).count_ones();
    }
    if either == 0 {
        return Ok(1.0);
    }
    Ok(both as f64 / either as f64)
}
