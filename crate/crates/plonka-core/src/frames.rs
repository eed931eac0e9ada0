//! Frames of isolated algebras and their complement families.
//!
//! A frame selects members of the isolated family so that the selection is a
//! join-semilattice containing the top and closed under realized
//! intersections. Replacing each selected member by what remains after
//! removing all strictly smaller selected members yields the complement
//! family: pairwise disjoint, non-empty, closed, covering the universe.

use crate::algebra::{scan_tuples, ElemSet, ElementId, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::isolation::IsolatedFamily;
use crate::Limits;

/// A valid frame over an [`IsolatedFamily`]. Members are stored as ascending
/// family indices; covering pairs and per-member complements use positions
/// into that list.
#[derive(Clone, Debug)]
pub struct Frame {
    members: Vec<usize>,
    covering: Vec<(usize, usize)>,
    complements: Vec<ElemSet>,
}

impl Frame {
    /// Family indices of the selected members, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_set(&self, fam: &IsolatedFamily, pos: usize) -> ElemSet {
        fam.member(self.members[pos])
    }

    /// Covering pairs (i, j) as positions: member i immediately below j.
    pub fn covering(&self) -> &[(usize, usize)] {
        &self.covering
    }

    pub fn complement(&self, pos: usize) -> ElemSet {
        self.complements[pos]
    }

    pub fn complements(&self) -> &[ElemSet] {
        &self.complements
    }

    /// Position of the top member.
    pub fn top(&self) -> usize {
        self.members.len() - 1
    }

    pub fn leq(&self, fam: &IsolatedFamily, i: usize, j: usize) -> bool {
        fam.leq(self.members[i], self.members[j])
    }

    pub fn lt(&self, fam: &IsolatedFamily, i: usize, j: usize) -> bool {
        fam.lt(self.members[i], self.members[j])
    }

    /// Join within the frame (guaranteed present by F1), as a position.
    pub fn join(&self, fam: &IsolatedFamily, i: usize, j: usize) -> usize {
        let idx = fam.join(self.members[i], self.members[j]);
        self.members
            .iter()
            .position(|m| *m == idx)
            .expect("frame is join-closed")
    }

    /// The position of the least selected member containing `elem`; every
    /// element has exactly one (it lies in exactly one complement).
    pub fn least_member_of(&self, elem: ElementId) -> usize {
        let pos = self
            .complements
            .iter()
            .position(|c| c.contains(elem))
            .expect("complements cover the universe");
        debug_assert_eq!(
            self.complements.iter().filter(|c| c.contains(elem)).count(),
            1
        );
        pos
    }

    /// Union of the complements at positions k with i <= k.
    pub fn upward_complement_union(&self, fam: &IsolatedFamily, i: usize) -> ElemSet {
        let mut acc = ElemSet::EMPTY;
        for k in 0..self.len() {
            if self.leq(fam, i, k) {
                acc = acc.union(self.complements[k]);
            }
        }
        acc
    }

    /// Member position the operation value must land in when arguments are
    /// routed by their least members: the join of the least positions.
    pub fn routing_target(&self, fam: &IsolatedFamily, args: &[ElementId]) -> usize {
        let mut m = self.least_member_of(args[0]);
        for &a in &args[1..] {
            m = self.join(fam, m, self.least_member_of(a));
        }
        m
    }

    pub fn format(&self, alg: &FiniteAlgebra, fam: &IsolatedFamily) -> String {
        let names: Vec<String> = self
            .members
            .iter()
            .map(|m| alg.format_set(fam.member(*m)))
            .collect();
        format!("[{}]", names.join(", "))
    }
}

/// Complement of each member of `selection` relative to the smaller selected
/// members. Panics if a complement comes out empty or non-closed; the theory
/// rules both out for a valid frame selection.
pub fn complements_of(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    selection: &[usize],
) -> Vec<ElemSet> {
    selection
        .iter()
        .map(|&j| {
            let mut below = ElemSet::EMPTY;
            for &i in selection {
                if fam.lt(i, j) {
                    below = below.union(fam.member(i));
                }
            }
            let comp = fam.member(j).minus(below);
            assert!(
                !comp.is_empty(),
                "complement of member {} is empty",
                alg.format_set(fam.member(j))
            );
            assert!(
                alg.is_closed(comp).expect("valid subset"),
                "complement {} is not closed",
                alg.format_set(comp)
            );
            comp
        })
        .collect()
}

/// Covering pairs of the selection, as positions, in ascending order.
pub fn covering_pairs(fam: &IsolatedFamily, selection: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &mi) in selection.iter().enumerate() {
        for (j, &mj) in selection.iter().enumerate() {
            if fam.lt(mi, mj) && !selection.iter().any(|&mk| fam.lt(mi, mk) && fam.lt(mk, mj)) {
                out.push((i, j));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Checks F1-F3 for a candidate selection (ascending family indices).
///
/// F3 is tested through pairwise meets: the family is closed under non-empty
/// intersection, so any realized intersection of selected members is reached
/// by iterated pairwise meets.
pub fn is_frame_selection(fam: &IsolatedFamily, selection: &[usize]) -> bool {
    if selection.len() < 2 || !selection.contains(&fam.top()) {
        return false;
    }
    for &i in selection {
        for &j in selection {
            if !selection.contains(&fam.join(i, j)) {
                return false;
            }
            if let Some(m) = fam.meet(&[i, j]) {
                if !selection.contains(&m) {
                    return false;
                }
            }
        }
    }
    true
}

/// Builds the frame on a selection after checking F1-F3.
pub fn frame_from_selection(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    selection: &[usize],
) -> Result<Frame> {
    let mut members = selection.to_vec();
    members.sort_unstable();
    if !is_frame_selection(fam, &members) {
        return Err(Error::input(
            "selection is not a frame: it must have two or more members, contain \
             the top, and be closed under joins and realized intersections"
                .to_string(),
        ));
    }
    let covering = covering_pairs(fam, &members);
    let complements = complements_of(alg, fam, &members);
    Ok(Frame {
        members,
        covering,
        complements,
    })
}

/// All frames over the family, in canonical order (lexicographic on the
/// member index list). The trivial selection (top alone) is excluded; only
/// non-trivial frames can carry systems.
pub fn enumerate_frames(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    limits: &Limits,
) -> Result<Vec<Frame>> {
    let k = fam.len();
    if k > limits.max_family {
        return Err(Error::resource(format!(
            "isolated family has {k} members; frame enumeration scans 2^{k} \
             subsets and is capped at 2^{} (raise the limit to proceed)",
            limits.max_family
        )));
    }
    let mut frames = Vec::new();
    for bits in 0..(1u64 << k) {
        let selection: Vec<usize> = (0..k).filter(|i| bits >> i & 1 == 1).collect();
        if !is_frame_selection(fam, &selection) {
            continue;
        }
        let covering = covering_pairs(fam, &selection);
        let complements = complements_of(alg, fam, &selection);
        frames.push(Frame {
            members: selection,
            covering,
            complements,
        });
    }
    frames.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(frames)
}

/// The frame-level reconstruction identity: for every operation and tuple,
/// the table value lies in the member at the join of the arguments' least
/// positions.
pub fn routing_reconstructs(alg: &FiniteAlgebra, fam: &IsolatedFamily, frame: &Frame) -> bool {
    let all: Vec<ElementId> = (0..alg.size()).collect();
    for (k, op) in alg.operations().iter().enumerate() {
        let ok = scan_tuples(&all, op.arity(), |tup| {
            let target = frame.routing_target(fam, tup);
            frame.member_set(fam, target).contains(alg.eval(k, tup))
        });
        if !ok {
            return false;
        }
    }
    true
}
