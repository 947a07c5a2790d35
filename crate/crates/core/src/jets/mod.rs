//! Truncated multivariate Taylor jets and a finite-difference oracle.

mod fd;
mod jet;
mod space;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use fd::{default_step, fd_partial, fd_partial_default};
pub use jet::Jet;
pub use space::{JetSpace, MAX_ORDER, MAX_VARS};

use crate::error::{Error, Result};
use crate::sample::TangentSample;

/// Which coordinate family an index belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Block {
    /// `x^i` on `M1`
    Base1,
    /// `u^α` on `M2`
    Base2,
    /// `y^i`
    Fiber1,
    /// `v^α`
    Fiber2,
}

/// A single coordinate of `TM1° × TM2°`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoordIndex {
    pub block: Block,
    pub offset: usize,
}

impl CoordIndex {
    pub fn x(i: usize) -> Self {
        CoordIndex { block: Block::Base1, offset: i }
    }
    pub fn u(a: usize) -> Self {
        CoordIndex { block: Block::Base2, offset: a }
    }
    pub fn y(i: usize) -> Self {
        CoordIndex { block: Block::Fiber1, offset: i }
    }
    pub fn v(a: usize) -> Self {
        CoordIndex { block: Block::Fiber2, offset: a }
    }

    /// Base coordinate for combined index `a` (`a < n1` is Latin).
    pub fn base(n1: usize, a: usize) -> Self {
        if a < n1 {
            Self::x(a)
        } else {
            Self::u(a - n1)
        }
    }

    /// Fiber coordinate for combined index `a`.
    pub fn fiber(n1: usize, a: usize) -> Self {
        if a < n1 {
            Self::y(a)
        } else {
            Self::v(a - n1)
        }
    }

    pub fn validate(&self, n1: usize, n2: usize) -> Result<()> {
        let bound = match self.block {
            Block::Base1 | Block::Fiber1 => n1,
            Block::Base2 | Block::Fiber2 => n2,
        };
        if self.offset >= bound {
            return Err(Error::Dimension(format!("{self} out of range (block size {bound})")));
        }
        Ok(())
    }

    /// Position in the flat coordinate vector `[x, u, y, v]`.
    pub fn flat(&self, n1: usize, n2: usize) -> usize {
        match self.block {
            Block::Base1 => self.offset,
            Block::Base2 => n1 + self.offset,
            Block::Fiber1 => n1 + n2 + self.offset,
            Block::Fiber2 => 2 * n1 + n2 + self.offset,
        }
    }

    pub fn from_flat(n1: usize, n2: usize, k: usize) -> Self {
        let n = n1 + n2;
        if k < n {
            Self::base(n1, k)
        } else {
            Self::fiber(n1, k - n)
        }
    }
}

impl fmt::Display for CoordIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.block {
            Block::Base1 => "x",
            Block::Base2 => "u",
            Block::Fiber1 => "y",
            Block::Fiber2 => "v",
        };
        write!(f, "{name}{}", self.offset)
    }
}

/// Canonical multiset of coordinates with multiplicities.
///
/// Entries are sorted by coordinate and merged, so every permutation of the
/// same differentiation sequence maps to one key.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<(CoordIndex, usize)>);

impl MultiIndex {
    pub fn new(entries: impl IntoIterator<Item = (CoordIndex, usize)>) -> Result<Self> {
        let mut map: BTreeMap<CoordIndex, usize> = BTreeMap::new();
        for (c, k) in entries {
            if k > 0 {
                *map.entry(c).or_insert(0) += k;
            }
        }
        let m = MultiIndex(map.into_iter().collect());
        if m.total() > MAX_ORDER {
            return Err(Error::OrderTooHigh { requested: m.total(), max: MAX_ORDER });
        }
        Ok(m)
    }

    /// From a differentiation sequence such as `[y0, y0, v0]`.
    pub fn from_sequence(seq: &[CoordIndex]) -> Result<Self> {
        Self::new(seq.iter().map(|&c| (c, 1)))
    }

    pub fn entries(&self) -> &[(CoordIndex, usize)] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|e| e.1).sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, k) in &self.0 {
            match k {
                1 => write!(f, "∂{c}")?,
                _ => write!(f, "∂{c}^{k}")?,
            }
        }
        Ok(())
    }
}

/// Jets of all coordinates at a sample point, as inputs to a scalar field.
#[derive(Clone, Debug)]
pub struct PointJets {
    pub x: Vec<Jet>,
    pub u: Vec<Jet>,
    pub y: Vec<Jet>,
    pub v: Vec<Jet>,
}

impl PointJets {
    /// Lifts every coordinate as an independent variable (flat order `[x, u, y, v]`).
    pub fn full(p: &TangentSample, order: usize) -> Result<PointJets> {
        let flat = p.flat();
        let space = JetSpace::get(flat.len(), order)?;
        let jets: Vec<Jet> = flat.iter().enumerate().map(|(k, &c)| Jet::variable(&space, k, c)).collect();
        Ok(Self::split(p.n1(), p.n2(), jets))
    }

    /// Lifts only `seeds` as variables (in the given order); other coordinates are constants.
    pub fn seeded(p: &TangentSample, seeds: &[CoordIndex], order: usize) -> Result<PointJets> {
        let (n1, n2) = (p.n1(), p.n2());
        let flat = p.flat();
        let space = JetSpace::get(seeds.len(), order)?;
        let mut jets: Vec<Jet> = flat.iter().map(|&c| Jet::constant(&space, c)).collect();
        for (k, s) in seeds.iter().enumerate() {
            s.validate(n1, n2)?;
            let f = s.flat(n1, n2);
            jets[f] = Jet::variable(&space, k, flat[f]);
        }
        Ok(Self::split(n1, n2, jets))
    }

    /// Plain values (order 0, no variables).
    pub fn values(p: &TangentSample) -> Result<PointJets> {
        Self::seeded(p, &[], 0)
    }

    fn split(n1: usize, n2: usize, mut jets: Vec<Jet>) -> PointJets {
        let v = jets.split_off(2 * n1 + n2);
        let y = jets.split_off(n1 + n2);
        let u = jets.split_off(n1);
        PointJets { x: jets, u, y, v }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        self.x[0].space()
    }

    pub fn constant(&self, c: f64) -> Jet {
        Jet::constant(self.space(), c)
    }
}

/// A smooth scalar function of `(x, u, y, v)` evaluated through jets.
pub trait ScalarField: Send + Sync {
    fn eval(&self, p: &PointJets) -> Result<Jet>;

    /// Plain value at a sample point.
    fn value_at(&self, p: &TangentSample) -> Result<f64> {
        Ok(self.eval(&PointJets::values(p)?)?.value())
    }
}

impl<F> ScalarField for F
where
    F: Fn(&PointJets) -> Result<Jet> + Send + Sync,
{
    fn eval(&self, p: &PointJets) -> Result<Jet> {
        self(p)
    }
}

/// A jet together with the coordinates it was seeded on.
#[derive(Clone, Debug)]
pub struct SeededJet {
    seeds: Vec<CoordIndex>,
    jet: Jet,
}

impl SeededJet {
    pub fn value(&self) -> f64 {
        self.jet.value()
    }

    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn seeds(&self) -> &[CoordIndex] {
        &self.seeds
    }

    pub fn jet(&self) -> &Jet {
        &self.jet
    }

    /// Mixed partial for `multi`; coordinates outside the seeds or orders beyond
    /// the truncation are reported as errors.
    pub fn partial(&self, multi: &MultiIndex) -> Result<f64> {
        let mut e = vec![0; self.seeds.len()];
        for &(c, k) in multi.entries() {
            let pos = self
                .seeds
                .iter()
                .position(|s| *s == c)
                .ok_or_else(|| Error::Precondition(format!("{c} is not a seed")))?;
            e[pos] = k;
        }
        if multi.total() > self.order() {
            return Err(Error::OrderTooHigh { requested: multi.total(), max: self.order() });
        }
        Ok(self.jet.partial(&e).expect("within order"))
    }

    /// Every stored partial keyed by its canonical multi-index.
    pub fn coeffs(&self) -> BTreeMap<MultiIndex, f64> {
        let space = self.jet.space();
        (0..space.size())
            .map(|i| {
                let e = space.exponents(i);
                let m = MultiIndex(
                    self.seeds.iter().zip(e).filter(|(_, k)| *k > 0).map(|(s, k)| (*s, k)).collect(),
                );
                (MultiIndex::new(m.0).expect("within order"), self.jet.coeffs()[i])
            })
            .collect()
    }
}

/// Jet of `f` at `point` seeded on `seeds`, truncated at total order `order`.
pub fn jet_lift(f: &dyn ScalarField, point: &TangentSample, seeds: &[CoordIndex], order: usize) -> Result<SeededJet> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh { requested: order, max: MAX_ORDER });
    }
    point.validate()?;
    let mut uniq: Vec<CoordIndex> = Vec::new();
    for s in seeds {
        if !uniq.contains(s) {
            uniq.push(*s);
        }
    }
    let pj = PointJets::seeded(point, &uniq, order)?;
    let jet = f.eval(&pj)?;
    Ok(SeededJet { seeds: uniq, jet })
}
