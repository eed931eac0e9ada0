//! Finite algebras as operation tables, with subset machinery and plain
//! homomorphism search.
//!
//! Universe elements are canonicalized to dense ids `0..n` at construction;
//! display names are kept for reports. Subsets are bitmasks, so the
//! exponential subset scans of the decomposition pipeline stay cheap.

use crate::error::{Error, Result};
use std::fmt;

/// Dense index into an algebra's universe.
pub type ElementId = usize;

/// Hard representation bound for universes (bitmask width). The configurable
/// scan cap in [`crate::Limits`] is lower.
pub const MAX_REPRESENTABLE: usize = 32;

// ---------------------------------------------------------------------------
// element sets
// ---------------------------------------------------------------------------

/// A subset of a universe, as a bitmask. The owning universe size is carried
/// by context, not by the set itself.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElemSet(u32);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_REPRESENTABLE);
        if n == 32 {
            ElemSet(u32::MAX)
        } else {
            ElemSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(id: ElementId) -> Self {
        ElemSet(1 << id)
    }

    pub fn from_bits(bits: u32) -> Self {
        ElemSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn insert(&mut self, id: ElementId) {
        self.0 |= 1 << id;
    }

    pub fn contains(self, id: ElementId) -> bool {
        self.0 >> id & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 | other.0)
    }

    pub fn intersect(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & other.0)
    }

    pub fn minus(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset_of(self, other: ElemSet) -> bool {
        self != other && self.is_subset_of(other)
    }

    pub fn iter(self) -> impl Iterator<Item = ElementId> {
        (0..MAX_REPRESENTABLE).filter(move |i| self.contains(*i))
    }

    /// Canonical ordering used throughout: by size, then lexicographically on
    /// the ascending element-id sequence.
    pub fn canonical_cmp(self, other: ElemSet) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl FromIterator<ElementId> for ElemSet {
    fn from_iter<T: IntoIterator<Item = ElementId>>(iter: T) -> Self {
        let mut s = ElemSet::EMPTY;
        for id in iter {
            s.insert(id);
        }
        s
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, id) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// tuple scans
// ---------------------------------------------------------------------------

/// Calls `f` on every `arity`-tuple over `domain` (odometer order, first
/// coordinate slowest). Aborts and returns `false` as soon as `f` does.
pub fn scan_tuples(
    domain: &[ElementId],
    arity: usize,
    mut f: impl FnMut(&[ElementId]) -> bool,
) -> bool {
    if domain.is_empty() {
        return true;
    }
    let mut idx = vec![0usize; arity];
    let mut tup: Vec<ElementId> = vec![domain[0]; arity];
    loop {
        if !f(&tup) {
            return false;
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < domain.len() {
                tup[pos] = domain[idx[pos]];
                break;
            }
            idx[pos] = 0;
            tup[pos] = domain[0];
        }
    }
}

// ---------------------------------------------------------------------------
// operations and algebras
// ---------------------------------------------------------------------------

/// One fundamental operation: a total table over `universe^arity`, stored
/// row-major (first argument is the row).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    name: String,
    arity: usize,
    table: Vec<ElementId>,
}

impl Operation {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        universe: usize,
        table: Vec<ElementId>,
    ) -> Result<Self> {
        let name = name.into();
        if arity == 0 {
            return Err(Error::input(format!(
                "operation '{name}': arity must be at least 1 (constants are not supported)"
            )));
        }
        let expect = universe.pow(arity as u32);
        if table.len() != expect {
            return Err(Error::input(format!(
                "operation '{name}': table has {} entries, expected {expect}",
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|v| **v >= universe) {
            return Err(Error::input(format!(
                "operation '{name}': table value {v} outside universe of size {universe}"
            )));
        }
        Ok(Operation { name, arity, table })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn eval(&self, n: usize, args: &[ElementId]) -> ElementId {
        debug_assert_eq!(args.len(), self.arity);
        let mut idx = 0usize;
        for &a in args {
            debug_assert!(a < n);
            idx = idx * n + a;
        }
        self.table[idx]
    }

    pub fn table(&self) -> &[ElementId] {
        &self.table
    }
}

/// A finite algebra: named universe plus total operation tables.
///
/// Immutable after construction; all pipeline stages treat it read-only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    elements: Vec<String>,
    operations: Vec<Operation>,
}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        elements: Vec<String>,
        operations: Vec<Operation>,
    ) -> Result<Self> {
        let name = name.into();
        if elements.is_empty() {
            return Err(Error::input(format!("algebra '{name}': universe is empty")));
        }
        if elements.len() > MAX_REPRESENTABLE {
            return Err(Error::input(format!(
                "algebra '{name}': universe of size {} exceeds the representation bound {MAX_REPRESENTABLE}",
                elements.len()
            )));
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::input(format!(
                    "algebra '{name}': duplicate element name '{e}'"
                )));
            }
        }
        Ok(FiniteAlgebra {
            name,
            elements,
            operations,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn universe(&self) -> ElemSet {
        ElemSet::full(self.size())
    }

    pub fn element_names(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, id: ElementId) -> &str {
        &self.elements[id]
    }

    pub fn element_id(&self, name: &str) -> Option<ElementId> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn signature(&self) -> Vec<(String, usize)> {
        self.operations
            .iter()
            .map(|op| (op.name.clone(), op.arity))
            .collect()
    }

    /// Position-wise signature equality.
    pub fn is_similar_to(&self, other: &FiniteAlgebra) -> bool {
        self.operations.len() == other.operations.len()
            && self
                .operations
                .iter()
                .zip(&other.operations)
                .all(|(a, b)| a.name == b.name && a.arity == b.arity)
    }

    /// True when some operation has arity at least 2. The decomposition entry
    /// points require this; purely unary algebras are rejected there.
    pub fn has_higher_arity_operation(&self) -> bool {
        self.operations.iter().any(|op| op.arity >= 2)
    }

    pub fn max_arity(&self) -> usize {
        self.operations.iter().map(|op| op.arity).max().unwrap_or(0)
    }

    /// Validated table lookup.
    pub fn evaluate(&self, op_index: usize, args: &[ElementId]) -> Result<ElementId> {
        let op = self
            .operations
            .get(op_index)
            .ok_or_else(|| Error::input(format!("operation index {op_index} out of range")))?;
        if args.len() != op.arity {
            return Err(Error::input(format!(
                "operation '{}' has arity {}, got {} arguments",
                op.name,
                op.arity,
                args.len()
            )));
        }
        if let Some(a) = args.iter().find(|a| **a >= self.size()) {
            return Err(Error::input(format!(
                "element id {a} outside universe of size {}",
                self.size()
            )));
        }
        Ok(op.eval(self.size(), args))
    }

    /// Unvalidated lookup for inner loops.
    #[inline]
    pub fn eval(&self, op_index: usize, args: &[ElementId]) -> ElementId {
        self.operations[op_index].eval(self.size(), args)
    }

    fn check_subset(&self, set: ElemSet) -> Result<()> {
        if !set.is_subset_of(self.universe()) {
            return Err(Error::input(format!(
                "subset {} is not contained in the universe",
                self.format_set(set)
            )));
        }
        Ok(())
    }

    /// True iff every operation applied to arguments from `set` stays in `set`.
    pub fn is_closed(&self, set: ElemSet) -> Result<bool> {
        self.check_subset(set)?;
        if set.is_empty() {
            return Err(Error::input(
                "closure test requires a non-empty subset".to_string(),
            ));
        }
        let members: Vec<ElementId> = set.iter().collect();
        for (k, op) in self.operations.iter().enumerate() {
            let ok = scan_tuples(&members, op.arity, |tup| set.contains(self.eval(k, tup)));
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Least closed superset of `seed` (fixpoint of table application).
    pub fn closure(&self, seed: ElemSet) -> Result<ElemSet> {
        self.check_subset(seed)?;
        if seed.is_empty() {
            return Err(Error::input(
                "closure requires a non-empty seed".to_string(),
            ));
        }
        let mut current = seed;
        loop {
            let members: Vec<ElementId> = current.iter().collect();
            let mut next = current;
            for (k, op) in self.operations.iter().enumerate() {
                scan_tuples(&members, op.arity, |tup| {
                    next.insert(self.eval(k, tup));
                    true
                });
            }
            if next == current {
                return Ok(current);
            }
            current = next;
        }
    }

    /// The subalgebra on `set` as a standalone algebra, element names kept,
    /// ids re-densified in ascending order. `set` must be closed.
    pub fn restrict(&self, set: ElemSet, name: impl Into<String>) -> Result<FiniteAlgebra> {
        if !self.is_closed(set)? {
            return Err(Error::input(format!(
                "subset {} is not closed under the operations",
                self.format_set(set)
            )));
        }
        let members: Vec<ElementId> = set.iter().collect();
        let local: Vec<Option<usize>> = (0..self.size())
            .map(|id| members.iter().position(|m| *m == id))
            .collect();
        let elements = members
            .iter()
            .map(|id| self.elements[*id].clone())
            .collect();
        let m = members.len();
        let mut operations = Vec::new();
        for (k, op) in self.operations.iter().enumerate() {
            let mut table = Vec::with_capacity(m.pow(op.arity as u32));
            scan_tuples(&members, op.arity, |tup| {
                table.push(local[self.eval(k, tup)].expect("closed subset"));
                true
            });
            operations.push(Operation::new(op.name.clone(), op.arity, m, table)?);
        }
        FiniteAlgebra::new(name, elements, operations)
    }

    /// Same signature, same element names, same tables under the name
    /// bijection. Element declaration order may differ.
    pub fn same_tables(&self, other: &FiniteAlgebra) -> bool {
        if !self.is_similar_to(other) || self.size() != other.size() {
            return false;
        }
        let mut to_other = Vec::with_capacity(self.size());
        for e in &self.elements {
            match other.element_id(e) {
                Some(id) => to_other.push(id),
                None => return false,
            }
        }
        let all: Vec<ElementId> = (0..self.size()).collect();
        for (k, op) in self.operations.iter().enumerate() {
            let ok = scan_tuples(&all, op.arity, |tup| {
                let mapped: Vec<ElementId> = tup.iter().map(|a| to_other[*a]).collect();
                to_other[self.eval(k, tup)] == other.eval(k, &mapped)
            });
            if !ok {
                return false;
            }
        }
        true
    }

    pub fn format_set(&self, set: ElemSet) -> String {
        let mut s = String::from("{");
        for (k, id) in set.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(&self.elements[id]);
        }
        s.push('}');
        s
    }

    pub fn set_by_names<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<ElemSet> {
        let mut set = ElemSet::EMPTY;
        for name in names {
            let id = self
                .element_id(name)
                .ok_or_else(|| Error::input(format!("unknown element '{name}'")))?;
            set.insert(id);
        }
        Ok(set)
    }
}

// ---------------------------------------------------------------------------
// element maps and homomorphism search
// ---------------------------------------------------------------------------

/// A total map from one subset to another, as sorted (source, image) pairs.
/// The derived ordering is the canonical one: lexicographic on the map viewed
/// as a tuple of images over the ascending source.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementMap {
    entries: Vec<(ElementId, ElementId)>,
}

impl ElementMap {
    pub fn new(mut entries: Vec<(ElementId, ElementId)>) -> Result<Self> {
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::input(format!(
                    "map assigns element {} twice",
                    w[0].0
                )));
            }
        }
        Ok(ElementMap { entries })
    }

    pub fn identity(set: ElemSet) -> Self {
        ElementMap {
            entries: set.iter().map(|id| (id, id)).collect(),
        }
    }

    pub fn entries(&self) -> &[(ElementId, ElementId)] {
        &self.entries
    }

    pub fn get(&self, id: ElementId) -> Option<ElementId> {
        self.entries
            .binary_search_by_key(&id, |e| e.0)
            .ok()
            .map(|k| self.entries[k].1)
    }

    pub fn source(&self) -> ElemSet {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn image(&self) -> ElemSet {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|(a, b)| a == b)
    }

    /// `then` after `self`; defined when the image of `self` lies in the
    /// source of `then`.
    pub fn compose(&self, then: &ElementMap) -> Result<ElementMap> {
        let entries = self
            .entries
            .iter()
            .map(|(a, b)| {
                then.get(*b)
                    .map(|c| (*a, c))
                    .ok_or_else(|| Error::input(format!("composition undefined at element {b}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ElementMap::new(entries)
    }

    /// The pointwise extension to a universe of size `n`: the map itself on
    /// its source, identity elsewhere.
    pub fn extend(&self, n: usize) -> Vec<ElementId> {
        let mut ext: Vec<ElementId> = (0..n).collect();
        for (a, b) in &self.entries {
            ext[*a] = *b;
        }
        ext
    }

    pub fn format_with(&self, src: &FiniteAlgebra, dst: &FiniteAlgebra) -> String {
        let cells: Vec<String> = self
            .entries
            .iter()
            .map(|(a, b)| format!("{}->{}", src.element_name(*a), dst.element_name(*b)))
            .collect();
        format!("{{{}}}", cells.join(", "))
    }
}

/// All homomorphisms from the subalgebra on `src` (of `src_alg`) to the
/// subalgebra on `dst` (of `dst_alg`), in canonical order.
///
/// Backtracks over source elements in ascending id order, pruning with every
/// operation tuple that is fully contained in the assigned prefix.
pub fn enumerate_homomorphisms(
    src_alg: &FiniteAlgebra,
    src: ElemSet,
    dst_alg: &FiniteAlgebra,
    dst: ElemSet,
) -> Result<Vec<ElementMap>> {
    if !src_alg.is_similar_to(dst_alg) {
        return Err(Error::input(format!(
            "algebras '{}' and '{}' are not similar",
            src_alg.name(),
            dst_alg.name()
        )));
    }
    if !src_alg.is_closed(src)? {
        return Err(Error::input(format!(
            "source {} is not a closed subuniverse",
            src_alg.format_set(src)
        )));
    }
    if !dst_alg.is_closed(dst)? {
        return Err(Error::input(format!(
            "target {} is not a closed subuniverse",
            dst_alg.format_set(dst)
        )));
    }

    let sources: Vec<ElementId> = src.iter().collect();
    let targets: Vec<ElementId> = dst.iter().collect();
    let mut partial: Vec<Option<ElementId>> = vec![None; src_alg.size()];
    let mut found = Vec::new();

    fn consistent(
        src_alg: &FiniteAlgebra,
        dst_alg: &FiniteAlgebra,
        assigned: &[ElementId],
        partial: &[Option<ElementId>],
    ) -> bool {
        for (k, op) in src_alg.operations().iter().enumerate() {
            let ok = scan_tuples(assigned, op.arity(), |tup| {
                let r = src_alg.eval(k, tup);
                match partial[r] {
                    None => true,
                    Some(img) => {
                        let mapped: Vec<ElementId> =
                            tup.iter().map(|a| partial[*a].unwrap()).collect();
                        dst_alg.eval(k, &mapped) == img
                    }
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }

    fn backtrack(
        src_alg: &FiniteAlgebra,
        dst_alg: &FiniteAlgebra,
        sources: &[ElementId],
        targets: &[ElementId],
        depth: usize,
        partial: &mut Vec<Option<ElementId>>,
        found: &mut Vec<ElementMap>,
    ) {
        if depth == sources.len() {
            let entries: Vec<(ElementId, ElementId)> =
                sources.iter().map(|s| (*s, partial[*s].unwrap())).collect();
            found.push(ElementMap::new(entries).expect("distinct sources"));
            return;
        }
        let s = sources[depth];
        for &t in targets {
            partial[s] = Some(t);
            if consistent(src_alg, dst_alg, &sources[..=depth], partial) {
                backtrack(
                    src_alg,
                    dst_alg,
                    sources,
                    targets,
                    depth + 1,
                    partial,
                    found,
                );
            }
            partial[s] = None;
        }
    }

    backtrack(
        src_alg,
        dst_alg,
        &sources,
        &targets,
        0,
        &mut partial,
        &mut found,
    );
    Ok(found)
}

/// Homomorphisms between two closed subuniverses of one ambient algebra.
pub fn enumerate_homomorphisms_within(
    alg: &FiniteAlgebra,
    src: ElemSet,
    dst: ElemSet,
) -> Result<Vec<ElementMap>> {
    enumerate_homomorphisms(alg, src, alg, dst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;

    #[test]
    fn evaluate_reads_the_table() {
        let a1 = testdata::a1();
        // meet is operation 0; row a, column c
        let a = a1.element_id("a").unwrap();
        let c = a1.element_id("c").unwrap();
        let e = a1.element_id("e").unwrap();
        assert_eq!(a1.evaluate(0, &[a, c]).unwrap(), e);

        let a7 = testdata::a7();
        let a9 = a7.element_id("a9").unwrap();
        assert_eq!(a7.evaluate(0, &[a9, a9]).unwrap(), a9);

        // idempotent diagonal lookup
        let a5 = testdata::a5();
        let b = a5.element_id("b").unwrap();
        assert_eq!(a5.evaluate(0, &[b, b]).unwrap(), b);
    }

    #[test]
    fn evaluate_rejects_bad_input() {
        let a4 = testdata::a4();
        assert!(a4.evaluate(3, &[0, 0]).is_err());
        assert!(a4.evaluate(0, &[0]).is_err());
        assert!(a4.evaluate(0, &[0, 17]).is_err());
    }

    #[test]
    fn closed_subsets_of_a1() {
        let a1 = testdata::a1();
        let ab = a1.set_by_names(["a", "b"]).unwrap();
        let ac = a1.set_by_names(["a", "c"]).unwrap();
        assert!(a1.is_closed(ab).unwrap());
        // a meet c = e falls outside
        assert!(!a1.is_closed(ac).unwrap());
        assert!(a1.is_closed(a1.universe()).unwrap());
        assert!(a1.is_closed(ElemSet::EMPTY).is_err());
    }

    #[test]
    fn closure_fixpoints() {
        let a1 = testdata::a1();
        let a = a1.set_by_names(["a"]).unwrap();
        // complement sends a to b, so the closure of {a} is {a,b}
        assert_eq!(a1.closure(a).unwrap(), a1.set_by_names(["a", "b"]).unwrap());

        let a7 = testdata::a7();
        let a9 = a7.set_by_names(["a9"]).unwrap();
        assert_eq!(a7.closure(a9).unwrap(), a9);

        assert_eq!(a1.closure(a1.universe()).unwrap(), a1.universe());
    }

    #[test]
    fn hom_enumeration_matches_worked_examples() {
        let a6 = testdata::a6();
        let b1 = a6.set_by_names(["a", "b"]).unwrap();
        let b2 = a6.set_by_names(["c", "d"]).unwrap();
        let homs = enumerate_homomorphisms_within(&a6, b1, b2).unwrap();
        let render: Vec<String> = homs.iter().map(|h| h.format_with(&a6, &a6)).collect();
        assert_eq!(render, vec!["{a->c, b->c}", "{a->c, b->d}"]);

        let a4 = testdata::a4();
        let b2 = a4.set_by_names(["a", "b"]).unwrap();
        let cd = a4.set_by_names(["c", "d"]).unwrap();
        assert!(enumerate_homomorphisms_within(&a4, b2, cd)
            .unwrap()
            .is_empty());

        // singleton with an idempotent element maps only to itself
        let a5 = testdata::a5();
        let d = a5.set_by_names(["d"]).unwrap();
        let homs = enumerate_homomorphisms_within(&a5, d, d).unwrap();
        assert_eq!(homs.len(), 1);
        assert!(homs[0].is_identity());
    }

    #[test]
    fn restrict_preserves_names_and_tables() {
        let a1 = testdata::a1();
        let ab = a1.set_by_names(["a", "b"]).unwrap();
        let sub = a1.restrict(ab, "B1").unwrap();
        assert_eq!(sub.element_names(), ["a", "b"]);
        // a meet b = a in the ambient table
        assert_eq!(sub.evaluate(0, &[0, 1]).unwrap(), 0);
        assert!(sub.is_similar_to(&a1));
    }

    #[test]
    fn canonical_set_order_is_size_then_lex() {
        let s = |ids: &[usize]| ids.iter().copied().collect::<ElemSet>();
        let mut sets = vec![s(&[1, 2]), s(&[0, 3]), s(&[2]), s(&[0, 1, 2])];
        sets.sort_by(|a, b| a.canonical_cmp(*b));
        assert_eq!(sets, vec![s(&[2]), s(&[0, 3]), s(&[1, 2]), s(&[0, 1, 2])]);
    }
}
