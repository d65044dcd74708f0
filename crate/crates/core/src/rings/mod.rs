//! Finite commutative unital rings, their idempotents, atoms and stalks.
//!
//! Elements are dense indices `0..size` into a ring-specific enumeration.
//! Residue rings enumerate residues in order, products use mixed radix with
//! the first factor most significant, and stalks `eR` list their members in
//! increasing parent order.

mod descriptor;
mod table;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::residue::arith::{crt_solve, factor};

pub use descriptor::{parse_element, RingDescriptorError};
pub use table::TableSpec;

/// Op tables are materialized only for rings up to this size.
const TABLE_LIMIT: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Elem(pub u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness(pub u32, pub u32, pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("the trivial ring (0 = 1) is not allowed")]
    Trivial,
    #[error("a product needs at least one factor")]
    EmptyProduct,
    #[error("ring has {0} elements, more than the supported 2^32")]
    TooLarge(u128),
    #[error("malformed table: {0}")]
    Shape(String),
    #[error("{law} fails at ({}, {}, {})", .witness.0, .witness.1, .witness.2)]
    AxiomViolation { law: &'static str, witness: Witness },
    #[error("element {0} is not idempotent")]
    NotIdempotent(u32),
    #[error("the zero idempotent has no stalk")]
    ZeroIdempotent,
}

/// Dense `n × n` operation tables.
#[derive(Debug)]
pub struct OpTables {
    n: usize,
    add: Vec<u32>,
    sub: Vec<u32>,
    mul: Vec<u32>,
}

impl OpTables {
    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.n + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.sub[a as usize * self.n + b as usize]
    }
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.n + b as usize]
    }
}

enum Repr {
    Modular { n: u32 },
    Product { factors: Vec<FiniteRing>, radix: Vec<u32> },
    Table { add: Vec<u32>, mul: Vec<u32>, neg: Vec<u32> },
    Sub { parent: FiniteRing, members: Vec<Elem>, index_of: Vec<u32> },
}

struct Inner {
    label: String,
    size: u32,
    zero: Elem,
    one: Elem,
    repr: Repr,
    tables: OnceLock<Option<OpTables>>,
    decomposition: OnceLock<Decomposition>,
}

/// Idempotents, atoms and stalks of a ring, computed once per ring.
pub struct Decomposition {
    pub idempotents: Vec<Elem>,
    pub atoms: Vec<Elem>,
    pub stalks: Vec<Stalk>,
}

#[derive(Clone)]
pub struct FiniteRing {
    inner: Arc<Inner>,
}

/// The ring `eR` for a nonzero idempotent `e`, with unit `e`.
#[derive(Clone)]
pub struct Stalk {
    pub parent: FiniteRing,
    pub unit: Elem,
    pub ring: FiniteRing,
}

impl fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteRing({}, {} elements)", self.label(), self.size())
    }
}

impl fmt::Debug for Stalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Stalk({} at {})", self.parent.label(), self.parent.format_elem(self.unit))
    }
}

impl PartialEq for FiniteRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

impl FiniteRing {
    fn from_parts(label: String, size: u32, zero: Elem, one: Elem, repr: Repr) -> Self {
        FiniteRing {
            inner: Arc::new(Inner {
                label,
                size,
                zero,
                one,
                repr,
                tables: OnceLock::new(),
                decomposition: OnceLock::new(),
            }),
        }
    }

    /// The residue ring `Z/n`.
    pub fn modular(n: u32) -> Result<Self, RingError> {
        if n < 2 {
            return Err(RingError::Trivial);
        }
        Ok(Self::from_parts(format!("Z/{n}"), n, Elem(0), Elem(1), Repr::Modular { n }))
    }

    /// The direct product of `factors`, with coordinatewise operations.
    pub fn product(factors: Vec<FiniteRing>) -> Result<Self, RingError> {
        if factors.is_empty() {
            return Err(RingError::EmptyProduct);
        }
        let total: u128 = factors.iter().map(|f| f.size() as u128).product();
        if total > u32::MAX as u128 {
            return Err(RingError::TooLarge(total));
        }
        let radix: Vec<u32> = factors.iter().map(|f| f.size() as u32).collect();
        let label = factors
            .iter()
            .map(|f| if matches!(f.inner.repr, Repr::Product { .. }) { format!("({})", f.label()) } else { f.label().to_string() })
            .collect::<Vec<_>>()
            .join(" x ");
        let encode = |coords: &[u32]| -> Elem { Elem(mixed_encode(&radix, coords)) };
        let zero = encode(&factors.iter().map(|f| f.zero().0).collect::<Vec<_>>());
        let one = encode(&factors.iter().map(|f| f.one().0).collect::<Vec<_>>());
        Ok(Self::from_parts(label, total as u32, zero, one, Repr::Product { factors, radix }))
    }

    /// A ring given by explicit tables, accepted only after every
    /// commutative-ring law has been verified on the whole carrier.
    pub fn table(
        label: impl Into<String>,
        add: Vec<u32>,
        mul: Vec<u32>,
        zero: u32,
        one: u32,
    ) -> Result<Self, RingError> {
        let neg = table::verify(&add, &mul, zero, one)?;
        let n = neg.len() as u32;
        Ok(Self::from_parts(label.into(), n, Elem(zero), Elem(one), Repr::Table { add, mul, neg }))
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// Same ring, different report label.
    pub fn relabel(&self, label: impl Into<String>) -> FiniteRing {
        let repr = match &self.inner.repr {
            Repr::Modular { n } => Repr::Modular { n: *n },
            Repr::Product { factors, radix } => Repr::Product { factors: factors.clone(), radix: radix.clone() },
            Repr::Table { add, mul, neg } => Repr::Table { add: add.clone(), mul: mul.clone(), neg: neg.clone() },
            Repr::Sub { parent, members, index_of } => Repr::Sub {
                parent: parent.clone(),
                members: members.clone(),
                index_of: index_of.clone(),
            },
        };
        Self::from_parts(label.into(), self.inner.size, self.inner.zero, self.inner.one, repr)
    }

    pub fn size(&self) -> usize {
        self.inner.size as usize
    }

    pub fn zero(&self) -> Elem {
        self.inner.zero
    }

    pub fn one(&self) -> Elem {
        self.inner.one
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.inner.size).map(Elem)
    }

    /// The modulus when this is a residue ring.
    pub fn modulus(&self) -> Option<u32> {
        match self.inner.repr {
            Repr::Modular { n } => Some(n),
            _ => None,
        }
    }

    pub fn factors(&self) -> Option<&[FiniteRing]> {
        match &self.inner.repr {
            Repr::Product { factors, .. } => Some(factors),
            _ => None,
        }
    }

    /// For a stalk ring, the parent ring and the parent element of each member.
    pub fn sub_parent(&self) -> Option<(&FiniteRing, &[Elem])> {
        match &self.inner.repr {
            Repr::Sub { parent, members, .. } => Some((parent, members)),
            _ => None,
        }
    }

    /// Coordinates of a product element, first factor first.
    pub fn coordinates(&self, x: Elem) -> Option<Vec<Elem>> {
        match &self.inner.repr {
            Repr::Product { radix, .. } => Some(mixed_decode(radix, x.0).into_iter().map(Elem).collect()),
            _ => None,
        }
    }

    pub fn from_coordinates(&self, coords: &[Elem]) -> Option<Elem> {
        match &self.inner.repr {
            Repr::Product { radix, .. } if coords.len() == radix.len() => {
                let raw: Vec<u32> = coords.iter().map(|c| c.0).collect();
                if raw.iter().zip(radix).any(|(c, r)| c >= r) {
                    return None;
                }
                Some(Elem(mixed_encode(radix, &raw)))
            }
            _ => None,
        }
    }

    fn compute(&self, op: Op, a: Elem, b: Elem) -> Elem {
        match &self.inner.repr {
            Repr::Modular { n } => {
                let (a, b, n) = (a.0 as u64, b.0 as u64, *n as u64);
                Elem(match op {
                    Op::Add => (a + b) % n,
                    Op::Sub => (a + n - b) % n,
                    Op::Mul => (a * b) % n,
                } as u32)
            }
            Repr::Product { factors, radix } => {
                let (ca, cb) = (mixed_decode(radix, a.0), mixed_decode(radix, b.0));
                let coords: Vec<u32> = factors
                    .iter()
                    .zip(ca.iter().zip(&cb))
                    .map(|(f, (&x, &y))| f.apply(op, Elem(x), Elem(y)).0)
                    .collect();
                Elem(mixed_encode(radix, &coords))
            }
            Repr::Table { add, mul, neg } => {
                let n = neg.len();
                Elem(match op {
                    Op::Add => add[a.index() * n + b.index()],
                    Op::Sub => add[a.index() * n + neg[b.index()] as usize],
                    Op::Mul => mul[a.index() * n + b.index()],
                })
            }
            Repr::Sub { parent, members, index_of } => {
                let r = parent.apply(op, members[a.index()], members[b.index()]);
                Elem(index_of[r.index()])
            }
        }
    }

    fn apply(&self, op: Op, a: Elem, b: Elem) -> Elem {
        if let Some(t) = self.op_tables() {
            return Elem(match op {
                Op::Add => t.add(a.0, b.0),
                Op::Sub => t.sub(a.0, b.0),
                Op::Mul => t.mul(a.0, b.0),
            });
        }
        self.compute(op, a, b)
    }

    /// Dense op tables, built on first use for rings with at most 1024 elements.
    pub fn op_tables(&self) -> Option<&OpTables> {
        self.inner
            .tables
            .get_or_init(|| {
                let n = self.size();
                if n > TABLE_LIMIT {
                    return None;
                }
                let mut add = Vec::with_capacity(n * n);
                let mut sub = Vec::with_capacity(n * n);
                let mut mul = Vec::with_capacity(n * n);
                for a in self.elements() {
                    for b in self.elements() {
                        add.push(self.compute(Op::Add, a, b).0);
                        sub.push(self.compute(Op::Sub, a, b).0);
                        mul.push(self.compute(Op::Mul, a, b).0);
                    }
                }
                Some(OpTables { n, add, sub, mul })
            })
            .as_ref()
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.apply(Op::Add, a, b)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.apply(Op::Sub, a, b)
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.apply(Op::Mul, a, b)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.sub(self.zero(), a)
    }

    pub fn is_idempotent(&self, x: Elem) -> bool {
        self.mul(x, x) == x
    }

    /// Human-readable element: a residue, a coordinate tuple, a table
    /// index, or for a stalk the parent element it stands for.
    pub fn format_elem(&self, x: Elem) -> String {
        match &self.inner.repr {
            Repr::Modular { .. } | Repr::Table { .. } => x.0.to_string(),
            Repr::Product { factors, radix } => {
                let parts: Vec<String> = factors
                    .iter()
                    .zip(mixed_decode(radix, x.0))
                    .map(|(f, c)| f.format_elem(Elem(c)))
                    .collect();
                format!("({})", parts.join(","))
            }
            Repr::Sub { parent, members, .. } => parent.format_elem(members[x.index()]),
        }
    }

    /// Inverse of [`format_elem`](Self::format_elem).
    pub fn parse_elem(&self, text: &str) -> Result<Elem, RingDescriptorError> {
        parse_element(self, text)
    }

    fn stalk_parent_index(&self, parent_elem: Elem) -> Option<Elem> {
        match &self.inner.repr {
            Repr::Sub { index_of, .. } => {
                let i = *index_of.get(parent_elem.index())?;
                (i != u32::MAX).then_some(Elem(i))
            }
            _ => None,
        }
    }

    pub fn decomposition(&self) -> &Decomposition {
        self.inner.decomposition.get_or_init(|| {
            let idempotents: Vec<Elem> = self.elements().filter(|&x| self.is_idempotent(x)).collect();
            let atoms = match self.modulus() {
                Some(n) => atoms_by_crt(n),
                None => atoms_by_scan(self, &idempotents),
            };
            let stalks = atoms
                .iter()
                .map(|&e| build_stalk(self, e).expect("atoms are nonzero idempotents"))
                .collect();
            Decomposition { idempotents, atoms, stalks }
        })
    }

    pub fn idempotents(&self) -> &[Elem] {
        &self.decomposition().idempotents
    }

    /// Minimal nonzero idempotents, in increasing element order.
    pub fn atoms(&self) -> &[Elem] {
        &self.decomposition().atoms
    }

    /// Stalks at the atoms, in the same order as [`atoms`](Self::atoms).
    pub fn atom_stalks(&self) -> &[Stalk] {
        &self.decomposition().stalks
    }

    pub fn is_connected(&self) -> bool {
        self.idempotents().len() == 2
    }

    /// A short structural description such as `Z/3` for cyclic rings.
    pub fn describe_structure(&self) -> String {
        let n = self.size();
        let (mut x, mut order) = (self.one(), 1usize);
        while x != self.zero() {
            x = self.add(x, self.one());
            order += 1;
        }
        if order == n {
            format!("Z/{n}")
        } else {
            format!("order {n}, characteristic {order}")
        }
    }
}

#[derive(Clone, Copy)]
enum Op {
    Add,
    Sub,
    Mul,
}

fn mixed_encode(radix: &[u32], coords: &[u32]) -> u32 {
    coords.iter().zip(radix).fold(0u32, |acc, (&c, &r)| acc * r + c)
}

fn mixed_decode(radix: &[u32], mut x: u32) -> Vec<u32> {
    let mut out = vec![0u32; radix.len()];
    for (slot, &r) in out.iter_mut().zip(radix).rev() {
        *slot = x % r;
        x /= r;
    }
    out
}

/// Atoms of `Z/n` via CRT: for each maximal prime power `q | n`, the
/// residue that is 1 mod `q` and 0 mod `n/q`.
pub fn atoms_by_crt(n: u32) -> Vec<Elem> {
    let dec = factor(n as u64).expect("n >= 2");
    let mut atoms: Vec<Elem> = dec
        .factors
        .iter()
        .map(|pp| {
            let rest = n as u64 / pp.q;
            let residues = if rest == 1 { vec![(1 % pp.q, pp.q)] } else { vec![(1, pp.q), (0, rest)] };
            Elem(crt_solve(&residues).expect("q and n/q are coprime") as u32)
        })
        .collect();
    atoms.sort();
    atoms
}

/// Atoms by brute force: nonzero idempotents with no strictly smaller
/// nonzero idempotent below them.
pub fn atoms_by_scan(ring: &FiniteRing, idempotents: &[Elem]) -> Vec<Elem> {
    let zero = ring.zero();
    idempotents
        .iter()
        .copied()
        .filter(|&e| e != zero)
        .filter(|&e| {
            !idempotents
                .iter()
                .any(|&f| f != zero && f != e && ring.mul(f, e) == f)
        })
        .collect()
}

fn build_stalk(parent: &FiniteRing, e: Elem) -> Result<Stalk, RingError> {
    if !parent.is_idempotent(e) {
        return Err(RingError::NotIdempotent(e.0));
    }
    if e == parent.zero() {
        return Err(RingError::ZeroIdempotent);
    }
    let members: Vec<Elem> = parent
        .elements()
        .map(|x| parent.mul(e, x))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut index_of = vec![u32::MAX; parent.size()];
    for (i, m) in members.iter().enumerate() {
        index_of[m.index()] = i as u32;
    }
    let zero = Elem(index_of[parent.zero().index()]);
    let one = Elem(index_of[e.index()]);
    let label = format!("{}[{}]", parent.label(), parent.format_elem(e));
    let ring = FiniteRing::from_parts(
        label,
        members.len() as u32,
        zero,
        one,
        Repr::Sub { parent: parent.clone(), members, index_of },
    );
    if ring.size() == 1 {
        return Err(RingError::ZeroIdempotent);
    }
    Ok(Stalk { parent: parent.clone(), unit: e, ring })
}

impl Stalk {
    /// The stalk `eR` at any nonzero idempotent `e`.
    pub fn new(parent: &FiniteRing, e: Elem) -> Result<Stalk, RingError> {
        build_stalk(parent, e)
    }

    /// The image of a parent element under `x ↦ ex`, as a stalk element.
    pub fn project(&self, x: Elem) -> Elem {
        let ex = self.parent.mul(self.unit, x);
        self.ring.stalk_parent_index(ex).expect("ex lies in eR")
    }

    /// The parent element a stalk element stands for.
    pub fn lift(&self, y: Elem) -> Elem {
        self.ring.sub_parent().expect("stalk ring").1[y.index()]
    }
}

/// The quotient `R/(1−e)R` as a table ring. Each class is represented by
/// its least member, and classes are listed in order of that member.
pub fn quotient_by_complement(parent: &FiniteRing, e: Elem) -> Result<FiniteRing, RingError> {
    if !parent.is_idempotent(e) {
        return Err(RingError::NotIdempotent(e.0));
    }
    let complement = parent.sub(parent.one(), e);
    let ideal: BTreeSet<Elem> = parent.elements().map(|x| parent.mul(complement, x)).collect();
    let mut class_of = vec![u32::MAX; parent.size()];
    let mut reps: Vec<Elem> = Vec::new();
    for x in parent.elements() {
        if class_of[x.index()] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(x);
        for &i in &ideal {
            class_of[parent.add(x, i).index()] = c;
        }
    }
    let n = reps.len();
    let mut add = Vec::with_capacity(n * n);
    let mut mul = Vec::with_capacity(n * n);
    for &a in &reps {
        for &b in &reps {
            add.push(class_of[parent.add(a, b).index()]);
            mul.push(class_of[parent.mul(a, b).index()]);
        }
    }
    let label = format!("{}/(1-{})", parent.label(), parent.format_elem(e));
    FiniteRing::table(
        label,
        add,
        mul,
        class_of[parent.zero().index()],
        class_of[parent.one().index()],
    )
}
