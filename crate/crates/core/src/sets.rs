//! Finite ground sets, their subsets, and rings of sets.
//!
//! A ring here is a nonempty family of subsets containing the empty set and
//! closed under pairwise union and set difference (hence also intersection
//! and symmetric difference). Membership is an explicit enumerated list so
//! that closure properties can be checked exhaustively. Every finite ring of
//! sets is the family of all unions of blocks of a partition of its largest
//! member, which is what `generate_ring` exploits.
//!
//! Subsets are stored as bitmasks over the atom indices of their ground set;
//! ground sets are therefore capped at 128 atoms.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_ATOMS: usize = 128;

#[derive(Debug)]
struct GroundInner {
    atoms: Vec<String>,
    index: BTreeMap<String, usize>,
}

/// An ordered finite set of distinct atom labels.
#[derive(Debug, Clone)]
pub struct GroundSet(Arc<GroundInner>);

impl GroundSet {
    pub fn new<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::EmptyGround);
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::GroundTooLarge {
                max: MAX_ATOMS,
                got: atoms.len(),
            });
        }
        let mut index = BTreeMap::new();
        for (i, a) in atoms.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return Err(Error::DuplicateAtom(a.clone()));
            }
        }
        Ok(GroundSet(Arc::new(GroundInner { atoms, index })))
    }

    pub fn len(&self) -> usize {
        self.0.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty grounds
    }

    pub fn atoms(&self) -> &[String] {
        &self.0.atoms
    }

    pub fn atom(&self, i: usize) -> &str {
        &self.0.atoms[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.0
            .index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }

    /// The empty subset of this ground set.
    pub fn empty(&self) -> Subset {
        Subset {
            ground: self.clone(),
            bits: 0,
        }
    }

    /// The whole ground set as a subset.
    pub fn full(&self) -> Subset {
        let bits = if self.len() == MAX_ATOMS {
            u128::MAX
        } else {
            (1u128 << self.len()) - 1
        };
        Subset {
            ground: self.clone(),
            bits,
        }
    }

    pub fn subset<I, S>(&self, members: I) -> Result<Subset>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u128;
        for m in members {
            bits |= 1u128 << self.index_of(m.as_ref())?;
        }
        Ok(Subset {
            ground: self.clone(),
            bits,
        })
    }

    pub fn subset_of_indices<I: IntoIterator<Item = usize>>(&self, idx: I) -> Subset {
        let mut bits = 0u128;
        for i in idx {
            assert!(i < self.len(), "atom index out of range");
            bits |= 1u128 << i;
        }
        Subset {
            ground: self.clone(),
            bits,
        }
    }

    pub fn singleton(&self, i: usize) -> Subset {
        self.subset_of_indices([i])
    }
}

/// Equality is by atom-label content, not identity.
impl PartialEq for GroundSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.atoms == other.0.atoms
    }
}

impl Eq for GroundSet {}

/// A subset of a ground set, represented as a bitmask over atom indices.
#[derive(Debug, Clone)]
pub struct Subset {
    ground: GroundSet,
    bits: u128,
}

impl Subset {
    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ground.len()).filter(|&i| self.contains_index(i))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.indices().map(|i| self.ground.atom(i)).collect()
    }

    fn assert_same_ground(&self, other: &Subset) -> Result<()> {
        if self.ground == other.ground {
            Ok(())
        } else {
            Err(Error::GroundMismatch)
        }
    }

    pub fn union(&self, other: &Subset) -> Result<Subset> {
        self.assert_same_ground(other)?;
        Ok(Subset {
            ground: self.ground.clone(),
            bits: self.bits | other.bits,
        })
    }

    pub fn intersection(&self, other: &Subset) -> Result<Subset> {
        self.assert_same_ground(other)?;
        Ok(Subset {
            ground: self.ground.clone(),
            bits: self.bits & other.bits,
        })
    }

    pub fn difference(&self, other: &Subset) -> Result<Subset> {
        self.assert_same_ground(other)?;
        Ok(Subset {
            ground: self.ground.clone(),
            bits: self.bits & !other.bits,
        })
    }

    pub fn complement(&self) -> Subset {
        Subset {
            ground: self.ground.clone(),
            bits: self.ground.full().bits & !self.bits,
        }
    }

    pub fn is_subset_of(&self, other: &Subset) -> Result<bool> {
        self.assert_same_ground(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    /// Lexicographic key on the sorted list of member atom indices, the
    /// canonical ordering for serialized rings.
    pub fn canonical_key(&self) -> Vec<usize> {
        self.indices().collect()
    }
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.bits == other.bits
    }
}

impl Eq for Subset {}

impl std::fmt::Display for Subset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}", self.labels().join(","))
    }
}

/// An enumerated ring of subsets: contains the empty set and is closed under
/// pairwise union and set difference. Members are kept in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct SetRing {
    ground: GroundSet,
    sets: Vec<Subset>,
    members: Vec<u128>, // sorted bitmasks, for O(log n) membership
}

impl SetRing {
    /// Validates closure exhaustively and canonicalizes the member order.
    pub fn new(ground: GroundSet, sets: Vec<Subset>) -> Result<Self> {
        for s in &sets {
            if *s.ground() != ground {
                return Err(Error::GroundMismatch);
            }
        }
        let mut masks: Vec<u128> = sets.iter().map(|s| s.bits).collect();
        masks.sort_unstable();
        masks.dedup();
        if masks.binary_search(&0).is_err() {
            return Err(Error::NotARing("missing the empty set".into()));
        }
        for &a in &masks {
            for &b in &masks {
                if masks.binary_search(&(a | b)).is_err() {
                    return Err(Error::NotARing(format!(
                        "not closed under union: {} | {}",
                        show(&ground, a),
                        show(&ground, b)
                    )));
                }
                if masks.binary_search(&(a & !b)).is_err() {
                    return Err(Error::NotARing(format!(
                        "not closed under difference: {} \\ {}",
                        show(&ground, a),
                        show(&ground, b)
                    )));
                }
            }
        }
        Ok(Self::from_masks(ground, masks))
    }

    /// Internal constructor for families that are rings by construction.
    pub(crate) fn from_masks(ground: GroundSet, mut masks: Vec<u128>) -> Self {
        masks.sort_unstable();
        masks.dedup();
        let members = masks.clone();
        let mut sets: Vec<Subset> = masks
            .into_iter()
            .map(|bits| Subset {
                ground: ground.clone(),
                bits,
            })
            .collect();
        sets.sort_by_key(|a| a.canonical_key());
        SetRing {
            ground,
            sets,
            members,
        }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a ring always contains the empty set
    }

    pub fn contains(&self, s: &Subset) -> bool {
        *s.ground() == self.ground && self.members.binary_search(&s.bits).is_ok()
    }

    /// Position of `s` in canonical order, if it is a member.
    pub fn position(&self, s: &Subset) -> Option<usize> {
        if !self.contains(s) {
            return None;
        }
        self.sets.iter().position(|t| t.bits == s.bits)
    }

    /// The union of all members (the largest member of a finite ring).
    pub fn span(&self) -> Subset {
        let bits = self.members.iter().fold(0u128, |acc, &m| acc | m);
        Subset {
            ground: self.ground.clone(),
            bits,
        }
    }

    /// Blocks of the partition underlying this ring: the minimal nonempty
    /// members obtained by separating atoms with distinct membership
    /// patterns. Every member is a union of blocks.
    pub fn blocks(&self) -> Vec<Subset> {
        partition_blocks(&self.ground, &self.members)
            .into_iter()
            .map(|bits| Subset {
                ground: self.ground.clone(),
                bits,
            })
            .collect()
    }
}

fn show(ground: &GroundSet, bits: u128) -> String {
    Subset {
        ground: ground.clone(),
        bits,
    }
    .to_string()
}

/// Membership-pattern blocks of a family of masks, restricted to the union.
fn partition_blocks(ground: &GroundSet, masks: &[u128]) -> Vec<u128> {
    let union = masks.iter().fold(0u128, |acc, &m| acc | m);
    let mut blocks: BTreeMap<Vec<bool>, u128> = BTreeMap::new();
    for i in 0..ground.len() {
        if union >> i & 1 == 0 {
            continue;
        }
        let pattern: Vec<bool> = masks.iter().map(|&m| m >> i & 1 == 1).collect();
        *blocks.entry(pattern).or_insert(0) |= 1u128 << i;
    }
    blocks.into_values().collect()
}

/// The inclusion-minimal ring containing all generators.
///
/// Atoms of the generated ring are the membership-pattern blocks of the
/// generators inside their union; the ring is the family of all unions of
/// blocks. An empty generator list yields the trivial ring `{∅}`.
pub fn generate_ring(ground: &GroundSet, generators: &[Subset]) -> Result<SetRing> {
    for g in generators {
        if g.ground() != ground {
            return Err(Error::GroundMismatch);
        }
    }
    let masks: Vec<u128> = generators.iter().map(|g| g.bits).collect();
    let blocks = partition_blocks(ground, &masks);
    if blocks.len() > 24 {
        return Err(Error::GroundTooLarge {
            max: 24,
            got: blocks.len(),
        });
    }
    let mut members = Vec::with_capacity(1 << blocks.len());
    for choice in 0u32..(1 << blocks.len()) {
        let mut bits = 0u128;
        for (j, b) in blocks.iter().enumerate() {
            if choice >> j & 1 == 1 {
                bits |= b;
            }
        }
        members.push(bits);
    }
    Ok(SetRing::from_masks(ground.clone(), members))
}
