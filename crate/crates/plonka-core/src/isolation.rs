//! Isolated subalgebras and their inclusion semilattice.
//!
//! A closed subset B is isolated when every operation applied to a tuple with
//! at least one argument outside B lands outside B. The family of all
//! isolated subuniverses is closed under non-empty intersection and forms a
//! join-semilattice under inclusion, with the full universe on top.

use crate::algebra::{scan_tuples, ElemSet, ElementId, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::Limits;

/// Isolation test relative to a sub-universe: tuples range over `ambient`
/// only. `is_isolated` is the `ambient = universe` case.
pub fn is_isolated_within(alg: &FiniteAlgebra, ambient: ElemSet, set: ElemSet) -> Result<bool> {
    if set.is_empty() {
        return Err(Error::input(
            "isolation test requires a non-empty subset".to_string(),
        ));
    }
    if !set.is_subset_of(ambient) {
        return Err(Error::input(format!(
            "subset {} is not contained in the ambient set {}",
            alg.format_set(set),
            alg.format_set(ambient)
        )));
    }
    // closure within the ambient set
    let members: Vec<ElementId> = set.iter().collect();
    for (k, op) in alg.operations().iter().enumerate() {
        if !scan_tuples(&members, op.arity(), |tup| set.contains(alg.eval(k, tup))) {
            return Ok(false);
        }
    }
    // tuples with an outsider must land outside
    let scope: Vec<ElementId> = ambient.iter().collect();
    for (k, op) in alg.operations().iter().enumerate() {
        let ok = scan_tuples(&scope, op.arity(), |tup| {
            if tup.iter().all(|a| set.contains(*a)) {
                return true;
            }
            !set.contains(alg.eval(k, tup))
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_isolated(alg: &FiniteAlgebra, set: ElemSet) -> Result<bool> {
    is_isolated_within(alg, alg.universe(), set)
}

/// All isolated subuniverses of an algebra, in canonical order (size, then
/// lexicographic on the element sequence), with the inclusion order and join
/// structure precomputed.
#[derive(Clone, Debug)]
pub struct IsolatedFamily {
    members: Vec<ElemSet>,
    top: usize,
    join: Vec<Vec<usize>>,
}

impl IsolatedFamily {
    pub fn members(&self) -> &[ElemSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> ElemSet {
        self.members[i]
    }

    /// Index of the full universe.
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn index_of(&self, set: ElemSet) -> Option<usize> {
        self.members.iter().position(|m| *m == set)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.members[i].is_subset_of(self.members[j])
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.members[i].is_proper_subset_of(self.members[j])
    }

    /// Least member containing both: the intersection of every member above
    /// the union. Membership of that intersection is guaranteed; violations
    /// are defects.
    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    /// Intersection of the named members, when non-empty. The intersection of
    /// isolated subuniverses is itself isolated, so a non-empty result is
    /// always a member.
    pub fn meet(&self, indices: &[usize]) -> Option<usize> {
        let mut acc = self.members[*indices.first().expect("non-empty index list")];
        for &i in &indices[1..] {
            acc = acc.intersect(self.members[i]);
        }
        if acc.is_empty() {
            return None;
        }
        let found = self.index_of(acc);
        debug_assert!(found.is_some(), "meet of members must be a member");
        found
    }
}

/// Enumerate every isolated subuniverse by scanning all non-empty subsets.
///
/// The scan is 2^n - 1 isolation checks; `limits.max_universe` bounds n.
pub fn all_isolated(alg: &FiniteAlgebra, limits: &Limits) -> Result<IsolatedFamily> {
    let n = alg.size();
    if n > limits.max_universe {
        return Err(Error::resource(format!(
            "universe of size {n} exceeds the cap {} for the 2^n subset scan \
             (raise the limit to proceed)",
            limits.max_universe
        )));
    }
    if !alg.has_higher_arity_operation() {
        return Err(Error::input(format!(
            "algebra '{}' has no operation of arity 2 or more; \
             every subalgebra of a purely unary algebra is isolated and the \
             decomposition is not meaningful",
            alg.name()
        )));
    }

    let mut members: Vec<ElemSet> = Vec::new();
    for bits in 1..(1u64 << n) {
        let set = ElemSet::from_bits(bits as u32);
        if is_isolated(alg, set)? {
            members.push(set);
        }
    }
    members.sort_by(|a, b| a.canonical_cmp(*b));
    let top = members
        .iter()
        .position(|m| *m == alg.universe())
        .expect("full universe is always isolated");

    let k = members.len();
    let mut join = vec![vec![0usize; k]; k];
    for i in 0..k {
        for j in 0..k {
            let union = members[i].union(members[j]);
            let mut acc = alg.universe();
            for m in &members {
                if union.is_subset_of(*m) {
                    acc = acc.intersect(*m);
                }
            }
            join[i][j] = members
                .iter()
                .position(|m| *m == acc)
                .expect("join of members must be a member");
        }
    }
    Ok(IsolatedFamily { members, top, join })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;
    use crate::Limits;

    fn family_names(alg: &FiniteAlgebra, fam: &IsolatedFamily) -> Vec<String> {
        fam.members().iter().map(|m| alg.format_set(*m)).collect()
    }

    #[test]
    fn isolation_examples() {
        let a1 = testdata::a1();
        let ef = a1.set_by_names(["e", "f"]).unwrap();
        let ab = a1.set_by_names(["a", "b"]).unwrap();
        assert!(!is_isolated(&a1, ef).unwrap());
        assert!(is_isolated(&a1, ab).unwrap());
        assert!(is_isolated(&a1, a1.universe()).unwrap());
        assert!(is_isolated(&a1, ElemSet::EMPTY).is_err());
    }

    #[test]
    fn golden_families() {
        let limits = Limits::default();
        let a2 = testdata::a2();
        let fam = all_isolated(&a2, &limits).unwrap();
        assert_eq!(
            family_names(&a2, &fam),
            vec!["{a,b}", "{a,b,c,d}", "{a,b,c,d,e,f}"]
        );

        let a7 = testdata::a7();
        let fam = all_isolated(&a7, &limits).unwrap();
        assert_eq!(
            family_names(&a7, &fam),
            vec![
                "{a1,a2}",
                "{a3,a4}",
                "{a1,a2,a3,a4,a5,a6}",
                "{a1,a2,a3,a4,a5,a6,a9}",
                "{a1,a2,a3,a4,a5,a6,a7,a8}",
                "{a1,a2,a3,a4,a5,a6,a7,a8,a9,a10,a11}",
            ]
        );

        let a8 = testdata::a8();
        let fam = all_isolated(&a8, &limits).unwrap();
        assert_eq!(
            family_names(&a8, &fam),
            vec![
                "{a1}",
                "{a2}",
                "{a1,a2,a3,a4}",
                "{a1,a2,a3,a4,a5,a6}",
                "{a1,a2,a3,a4,a7,a8}",
                "{a1,a2,a3,a4,a5,a6,a7,a8,a9,a10}",
            ]
        );
    }

    #[test]
    fn join_and_meet_examples() {
        let limits = Limits::default();
        let a1 = testdata::a1();
        let fam = all_isolated(&a1, &limits).unwrap();
        let ab = fam.index_of(a1.set_by_names(["a", "b"]).unwrap()).unwrap();
        let cd = fam.index_of(a1.set_by_names(["c", "d"]).unwrap()).unwrap();
        assert_eq!(fam.join(ab, cd), fam.top());
        assert_eq!(fam.join(ab, ab), ab);
        assert_eq!(fam.join(ab, fam.top()), fam.top());

        let a8 = testdata::a8();
        let fam = all_isolated(&a8, &limits).unwrap();
        let m4 = fam
            .index_of(
                a8.set_by_names(["a1", "a2", "a3", "a4", "a5", "a6"])
                    .unwrap(),
            )
            .unwrap();
        let m5 = fam
            .index_of(
                a8.set_by_names(["a1", "a2", "a3", "a4", "a7", "a8"])
                    .unwrap(),
            )
            .unwrap();
        let m3 = fam
            .index_of(a8.set_by_names(["a1", "a2", "a3", "a4"]).unwrap())
            .unwrap();
        assert_eq!(fam.meet(&[m4, m5]), Some(m3));
        assert_eq!(fam.meet(&[m4, m4]), Some(m4));

        let a7 = testdata::a7();
        let fam = all_isolated(&a7, &limits).unwrap();
        let m1 = fam
            .index_of(a7.set_by_names(["a1", "a2"]).unwrap())
            .unwrap();
        let m2 = fam
            .index_of(a7.set_by_names(["a3", "a4"]).unwrap())
            .unwrap();
        assert_eq!(fam.meet(&[m1, m2]), None);
    }

    #[test]
    fn caps_and_preconditions() {
        let a7 = testdata::a7();
        let tight = Limits {
            max_universe: 8,
            ..Limits::default()
        };
        assert!(matches!(all_isolated(&a7, &tight), Err(Error::Resource(_))));

        // purely unary algebra is rejected
        let unary = FiniteAlgebra::new(
            "U",
            vec!["x".into(), "y".into()],
            vec![crate::algebra::Operation::new("f", 1, 2, vec![1, 0]).unwrap()],
        )
        .unwrap();
        assert!(matches!(
            all_isolated(&unary, &Limits::default()),
            Err(Error::Input(_))
        ));
    }
}
