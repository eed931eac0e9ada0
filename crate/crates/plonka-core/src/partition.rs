//! Partition functions: the binary-operation characterization of sum
//! decomposability, used as an independent cross-check.
//!
//! Seven equation schemas (P1-P7) over a binary function f on the universe.
//! Any direct system induces such a function through its homomorphisms. The
//! first projection f(a,b) = a satisfies all seven schemas on every algebra
//! and corresponds to the trivial one-component representation, so the
//! search below looks for functions other than it.

use crate::algebra::{scan_tuples, ElementId, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::systems::{plonka_sum, DirectSystem};

/// A total binary function on a universe, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionFunction {
    n: usize,
    table: Vec<ElementId>,
}

impl PartitionFunction {
    pub fn from_table(n: usize, table: Vec<ElementId>) -> Result<Self> {
        if table.len() != n * n {
            return Err(Error::input(format!(
                "partition table has {} entries, expected {}",
                table.len(),
                n * n
            )));
        }
        if let Some(v) = table.iter().find(|v| **v >= n) {
            return Err(Error::input(format!(
                "partition table value {v} outside universe of size {n}"
            )));
        }
        Ok(PartitionFunction { n, table })
    }

    pub fn first_projection(n: usize) -> Self {
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for _ in 0..n {
                table.push(a);
            }
        }
        PartitionFunction { n, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn value(&self, a: ElementId, b: ElementId) -> ElementId {
        self.table[a * self.n + b]
    }

    pub fn table(&self) -> &[ElementId] {
        &self.table
    }

    pub fn is_first_projection(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.value(a, b) == a))
    }
}

/// Outcome of one axiom schema: pass, or a violated instance.
#[derive(Clone, Debug)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub holds: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.name)
            .collect()
    }
}

/// Exhaustive verification of the seven schemas, reporting one counterexample
/// instance per failing schema.
pub fn verify_axioms(alg: &FiniteAlgebra, f: &PartitionFunction) -> Result<AxiomReport> {
    let n = alg.size();
    if f.n() != n {
        return Err(Error::input(format!(
            "partition function is over {} elements, algebra has {n}",
            f.n()
        )));
    }
    let nm = |id: ElementId| alg.element_name(id).to_string();
    let mut checks = Vec::with_capacity(7);

    // P1: f(f(a,b),c) = f(a,f(b,c))
    let mut cex = None;
    'p1: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if f.value(f.value(a, b), c) != f.value(a, f.value(b, c)) {
                    cex = Some(format!("a={}, b={}, c={}", nm(a), nm(b), nm(c)));
                    break 'p1;
                }
            }
        }
    }
    checks.push(AxiomCheck {
        name: "P1",
        holds: cex.is_none(),
        counterexample: cex,
    });

    // P2: f(a,a) = a
    let cex = (0..n)
        .find(|&a| f.value(a, a) != a)
        .map(|a| format!("a={}", nm(a)));
    checks.push(AxiomCheck {
        name: "P2",
        holds: cex.is_none(),
        counterexample: cex,
    });

    // P3: f(a,f(b,c)) = f(a,f(c,b))
    let mut cex = None;
    'p3: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if f.value(a, f.value(b, c)) != f.value(a, f.value(c, b)) {
                    cex = Some(format!("a={}, b={}, c={}", nm(a), nm(b), nm(c)));
                    break 'p3;
                }
            }
        }
    }
    checks.push(AxiomCheck {
        name: "P3",
        holds: cex.is_none(),
        counterexample: cex,
    });

    let all: Vec<ElementId> = (0..n).collect();
    let fmt_tuple = |tup: &[ElementId]| tup.iter().map(|a| nm(*a)).collect::<Vec<_>>().join(",");

    // P4: f(F(a...), b) = F(f(a1,b), ..., f(ar,b))
    let mut cex = None;
    for (k, op) in alg.operations().iter().enumerate() {
        if cex.is_some() {
            break;
        }
        scan_tuples(&all, op.arity(), |tup| {
            let v = alg.eval(k, tup);
            for b in 0..n {
                let mapped: Vec<ElementId> = tup.iter().map(|a| f.value(*a, b)).collect();
                if f.value(v, b) != alg.eval(k, &mapped) {
                    cex = Some(format!("{}({}), b={}", op.name(), fmt_tuple(tup), nm(b)));
                    return false;
                }
            }
            true
        });
    }
    checks.push(AxiomCheck {
        name: "P4",
        holds: cex.is_none(),
        counterexample: cex,
    });

    // P5: f(b, F(a...)) = f(b, F(f(b,a1), ..., f(b,ar)))
    let mut cex = None;
    for (k, op) in alg.operations().iter().enumerate() {
        if cex.is_some() {
            break;
        }
        scan_tuples(&all, op.arity(), |tup| {
            let v = alg.eval(k, tup);
            for b in 0..n {
                let mapped: Vec<ElementId> = tup.iter().map(|a| f.value(b, *a)).collect();
                let inner = alg.eval(k, &mapped);
                if f.value(b, v) != f.value(b, inner) {
                    cex = Some(format!("b={}, {}({})", nm(b), op.name(), fmt_tuple(tup)));
                    return false;
                }
            }
            true
        });
    }
    checks.push(AxiomCheck {
        name: "P5",
        holds: cex.is_none(),
        counterexample: cex,
    });

    // P6: f(F(a...), a_l) = F(a...)
    let mut cex = None;
    for (k, op) in alg.operations().iter().enumerate() {
        if cex.is_some() {
            break;
        }
        scan_tuples(&all, op.arity(), |tup| {
            let v = alg.eval(k, tup);
            for &a in tup {
                if f.value(v, a) != v {
                    cex = Some(format!(
                        "{}({}), argument {}",
                        op.name(),
                        fmt_tuple(tup),
                        nm(a)
                    ));
                    return false;
                }
            }
            true
        });
    }
    checks.push(AxiomCheck {
        name: "P6",
        holds: cex.is_none(),
        counterexample: cex,
    });

    // P7: f(a, F(a,...,a)) = a
    let mut cex = None;
    for (k, op) in alg.operations().iter().enumerate() {
        if cex.is_some() {
            break;
        }
        for a in 0..n {
            let diag = vec![a; op.arity()];
            if f.value(a, alg.eval(k, &diag)) != a {
                cex = Some(format!("a={}, {}", nm(a), op.name()));
                break;
            }
        }
    }
    checks.push(AxiomCheck {
        name: "P7",
        holds: cex.is_none(),
        counterexample: cex,
    });

    Ok(AxiomReport { checks })
}

/// The partition function a direct system induces on its sum: an element of
/// component i paired with one of component j is sent through the
/// homomorphism into the component at i join j.
///
/// All seven schemas are verified before returning; a failure is a defect.
pub fn from_system(sys: &DirectSystem) -> (FiniteAlgebra, PartitionFunction) {
    let sum = plonka_sum(sys);
    let mut comp_of = Vec::with_capacity(sum.size());
    let mut local_of = Vec::with_capacity(sum.size());
    let mut offsets = Vec::with_capacity(sys.components().len());
    for (i, c) in sys.components().iter().enumerate() {
        offsets.push(comp_of.len());
        for l in 0..c.size() {
            comp_of.push(i);
            local_of.push(l);
        }
    }
    let n = sum.size();
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let m = sys.indices().join(comp_of[a], comp_of[b]);
            let img = sys
                .hom(comp_of[a], m)
                .get(local_of[a])
                .expect("hom total on its source");
            table.push(offsets[m] + img);
        }
    }
    let f = PartitionFunction { n, table };
    let report = verify_axioms(&sum, &f).expect("sizes match");
    assert!(
        report.all_pass(),
        "partition function induced by a direct system violates {:?}",
        report.failing()
    );
    (sum, f)
}

/// Search result for [`brute_force_search`].
#[derive(Clone, Debug)]
pub enum SearchOutcome {
    /// A non-trivial partition function (not the first projection).
    Found(PartitionFunction),
    /// The whole space was refuted: no non-trivial partition function exists.
    Refuted,
    /// The node budget ran out before the space was decided.
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub nodes: u64,
}

impl SearchResult {
    pub fn found(&self) -> Option<&PartitionFunction> {
        match &self.outcome {
            SearchOutcome::Found(f) => Some(f),
            _ => None,
        }
    }

    pub fn exhausted_budget(&self) -> bool {
        matches!(self.outcome, SearchOutcome::BudgetExhausted)
    }
}

const DEFAULT_ACCEPTED_SIZE: usize = 4;

struct Search<'a> {
    alg: &'a FiniteAlgebra,
    n: usize,
    cells: Vec<Option<ElementId>>,
    free: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn cell(&self, a: ElementId, b: ElementId) -> Option<ElementId> {
        self.cells[a * self.n + b]
    }

    /// Every schema instance whose cells are all assigned must hold.
    fn consistent(&self) -> bool {
        let n = self.n;
        let all: Vec<ElementId> = (0..n).collect();
        for (k, op) in self.alg.operations().iter().enumerate() {
            let mut mapped = vec![0; op.arity()];
            let ok = scan_tuples(&all, op.arity(), |tup| {
                let v = self.alg.eval(k, tup);
                for b in 0..n {
                    // P4
                    if let Some(lhs) = self.cell(v, b) {
                        let mut complete = true;
                        for (idx, &a) in tup.iter().enumerate() {
                            match self.cell(a, b) {
                                Some(x) => mapped[idx] = x,
                                None => {
                                    complete = false;
                                    break;
                                }
                            }
                        }
                        if complete && lhs != self.alg.eval(k, &mapped) {
                            return false;
                        }
                    }
                    // P5
                    let mut complete = true;
                    for (idx, &a) in tup.iter().enumerate() {
                        match self.cell(b, a) {
                            Some(x) => mapped[idx] = x,
                            None => {
                                complete = false;
                                break;
                            }
                        }
                    }
                    if complete {
                        let inner = self.alg.eval(k, &mapped);
                        if let (Some(x), Some(y)) = (self.cell(b, v), self.cell(b, inner)) {
                            if x != y {
                                return false;
                            }
                        }
                    }
                }
                true
            });
            if !ok {
                return false;
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.cell(a, b);
                for c in 0..n {
                    // P1
                    if let (Some(ab), Some(bc)) = (ab, self.cell(b, c)) {
                        if let (Some(x), Some(y)) = (self.cell(ab, c), self.cell(a, bc)) {
                            if x != y {
                                return false;
                            }
                        }
                    }
                    // P3
                    if let (Some(bc), Some(cb)) = (self.cell(b, c), self.cell(c, b)) {
                        if let (Some(x), Some(y)) = (self.cell(a, bc), self.cell(a, cb)) {
                            if x != y {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, depth: usize) -> std::result::Result<Option<PartitionFunction>, ()> {
        if depth == self.free.len() {
            let table: Vec<ElementId> = self.cells.iter().map(|c| c.unwrap()).collect();
            let f = PartitionFunction { n: self.n, table };
            if f.is_first_projection() {
                return Ok(None);
            }
            let report = verify_axioms(self.alg, &f).expect("sizes match");
            return Ok(report.all_pass().then_some(f));
        }
        let cell = self.free[depth];
        for v in 0..self.n {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(());
            }
            self.cells[cell] = Some(v);
            if self.consistent() {
                if let Some(f) = self.run(depth + 1)? {
                    return Ok(Some(f));
                }
            }
            self.cells[cell] = None;
        }
        Ok(None)
    }
}

/// Backtracking search for a partition function other than the first
/// projection.
///
/// The diagonal is pinned by P2; P6 pins f at every (table value, argument)
/// pair; P7 pins f at every (element, diagonal value) pair. The remaining
/// cells are filled by backtracking with incremental consistency on the
/// fully-assigned instances of P1/P3/P4/P5.
///
/// Universes over 4 elements require an explicit budget; budget exhaustion is
/// reported in the outcome, never silently.
pub fn brute_force_search(alg: &FiniteAlgebra, budget: Option<u64>) -> Result<SearchResult> {
    let n = alg.size();
    if n > DEFAULT_ACCEPTED_SIZE && budget.is_none() {
        return Err(Error::resource(format!(
            "universe of size {n} exceeds the accepted partition-search size \
             {DEFAULT_ACCEPTED_SIZE}; pass an explicit node budget to search anyway"
        )));
    }
    let budget = budget.unwrap_or(u64::MAX);

    let mut cells: Vec<Option<ElementId>> = vec![None; n * n];
    let pin = |cells: &mut Vec<Option<ElementId>>, a: usize, b: usize, v: usize| -> bool {
        match cells[a * n + b] {
            Some(old) => old == v,
            None => {
                cells[a * n + b] = Some(v);
                true
            }
        }
    };
    for a in 0..n {
        if !pin(&mut cells, a, a, a) {
            return Ok(SearchResult {
                outcome: SearchOutcome::Refuted,
                nodes: 0,
            });
        }
    }
    let all: Vec<ElementId> = (0..n).collect();
    let mut conflict = false;
    for (k, op) in alg.operations().iter().enumerate() {
        scan_tuples(&all, op.arity(), |tup| {
            let v = alg.eval(k, tup);
            for &a in tup {
                if !pin(&mut cells, v, a, v) {
                    conflict = true;
                    return false;
                }
            }
            true
        });
        if conflict {
            break;
        }
        for a in 0..n {
            let diag = vec![a; op.arity()];
            let v = alg.eval(k, &diag);
            if !pin(&mut cells, a, v, a) {
                conflict = true;
                break;
            }
        }
        if conflict {
            break;
        }
    }
    if conflict {
        return Ok(SearchResult {
            outcome: SearchOutcome::Refuted,
            nodes: 0,
        });
    }

    let free: Vec<usize> = (0..n * n).filter(|i| cells[*i].is_none()).collect();
    let mut search = Search {
        alg,
        n,
        cells,
        free,
        nodes: 0,
        budget,
    };
    if !search.consistent() {
        return Ok(SearchResult {
            outcome: SearchOutcome::Refuted,
            nodes: 0,
        });
    }
    match search.run(0) {
        Ok(Some(f)) => Ok(SearchResult {
            outcome: SearchOutcome::Found(f),
            nodes: search.nodes,
        }),
        Ok(None) => Ok(SearchResult {
            outcome: SearchOutcome::Refuted,
            nodes: search.nodes,
        }),
        Err(()) => Ok(SearchResult {
            outcome: SearchOutcome::BudgetExhausted,
            nodes: search.nodes,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::decompose;
    use crate::testdata;
    use crate::Limits;

    #[test]
    fn from_system_matches_worked_values() {
        let a2 = testdata::a2();
        let d = decompose(&a2, &Limits::default()).unwrap();
        let full = d
            .systems
            .iter()
            .find(|s| s.system.indices().len() == 3)
            .unwrap();
        let (sum, f) = from_system(&full.system);
        let e = |n: &str| sum.element_id(n).unwrap();
        // a is carried through the chain into the top component
        assert_eq!(f.value(e("a"), e("e")), e("e"));
        // the diagonal is fixed pointwise
        for a in 0..sum.size() {
            assert_eq!(f.value(a, a), a);
        }

        let a4 = testdata::a4();
        let d = decompose(&a4, &Limits::default()).unwrap();
        let (sum, f) = from_system(&d.systems[0].system);
        let e = |n: &str| sum.element_id(n).unwrap();
        assert_eq!(f.value(e("a"), e("c")), e("b"));
    }

    #[test]
    fn axioms_pass_for_induced_functions() {
        let a1 = testdata::a1();
        let d = decompose(&a1, &Limits::default()).unwrap();
        for entry in &d.systems {
            let (sum, f) = from_system(&entry.system);
            assert!(verify_axioms(&sum, &f).unwrap().all_pass());
        }
    }

    #[test]
    fn first_projection_satisfies_every_schema() {
        // The schemas do not exclude the trivial function; that is exactly why
        // the search has to.
        for alg in testdata::all() {
            let f = PartitionFunction::first_projection(alg.size());
            let report = verify_axioms(&alg, &f).unwrap();
            assert!(
                report.all_pass(),
                "on {}: {:?}",
                alg.name(),
                report.failing()
            );
        }
    }

    #[test]
    fn one_element_algebra_has_only_the_trivial_function() {
        let one = FiniteAlgebra::new(
            "one",
            vec!["x".into()],
            vec![crate::algebra::Operation::new("f", 2, 1, vec![0]).unwrap()],
        )
        .unwrap();
        let f = PartitionFunction::first_projection(1);
        assert!(verify_axioms(&one, &f).unwrap().all_pass());
        // the unique candidate is the first projection, so the search refutes
        let r = brute_force_search(&one, None).unwrap();
        assert!(matches!(r.outcome, SearchOutcome::Refuted));
    }

    #[test]
    fn search_refutes_and_finds() {
        let a3 = testdata::a3();
        let r = brute_force_search(&a3, None).unwrap();
        assert!(matches!(r.outcome, SearchOutcome::Refuted));

        let a4 = testdata::a4();
        let r = brute_force_search(&a4, None).unwrap();
        let f = r.found().expect("a partition function exists");
        assert!(verify_axioms(&a4, f).unwrap().all_pass());
        assert!(!f.is_first_projection());
    }

    #[test]
    fn search_respects_caps_and_budget() {
        let a1 = testdata::a1();
        assert!(matches!(
            brute_force_search(&a1, None),
            Err(Error::Resource(_))
        ));
        let r = brute_force_search(&testdata::a4(), Some(1)).unwrap();
        assert!(r.exhausted_budget());
    }
}
