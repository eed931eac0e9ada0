//! Płonka homomorphisms between complement algebras of a frame.
//!
//! A homomorphism φ between two complements qualifies when extending it by
//! the identity leaves every operation value unchanged, for every tuple over
//! the whole universe whose value lands in a complement at or above the
//! target. Quantification deliberately ranges over the full universe, not
//! just the two complements involved.

use crate::algebra::{scan_tuples, ElemSet, ElementId, ElementMap, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::isolation::IsolatedFamily;

/// A violated instance of the defining equation: applying the extension
/// changed the value of `op` at `args`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PHomViolation {
    pub op: usize,
    pub args: Vec<ElementId>,
    pub result: ElementId,
    pub mapped: ElementId,
}

impl PHomViolation {
    pub fn format_with(&self, alg: &FiniteAlgebra) -> String {
        let op = alg.operations()[self.op].name();
        let args: Vec<&str> = self.args.iter().map(|a| alg.element_name(*a)).collect();
        format!(
            "{op}({}) = {} but the mapped arguments give {}",
            args.join(","),
            alg.element_name(self.result),
            alg.element_name(self.mapped)
        )
    }
}

/// A checked Płonka homomorphism between the complements at frame positions
/// `src <= dst`. Constructed only by the checker in this module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PHom {
    pub src: usize,
    pub dst: usize,
    pub map: ElementMap,
    verified: bool,
}

impl PHom {
    pub fn verified(&self) -> bool {
        self.verified
    }
}

fn require_comparable(fam: &IsolatedFamily, frame: &Frame, i: usize, j: usize) -> Result<()> {
    if i >= frame.len() || j >= frame.len() {
        return Err(Error::input(format!(
            "frame position out of range: ({i}, {j}) in a frame of {} members",
            frame.len()
        )));
    }
    if !frame.leq(fam, i, j) {
        return Err(Error::input(format!(
            "frame members at positions {i} and {j} are not ordered"
        )));
    }
    Ok(())
}

/// Plain homomorphism test for a map between two closed subsets of one
/// algebra: total on `src`, into `dst`, commuting with every operation.
pub fn is_homomorphism_between(
    alg: &FiniteAlgebra,
    src: ElemSet,
    dst: ElemSet,
    map: &ElementMap,
) -> bool {
    if map.source() != src || !map.image().is_subset_of(dst) {
        return false;
    }
    let members: Vec<ElementId> = src.iter().collect();
    for (k, op) in alg.operations().iter().enumerate() {
        let ok = scan_tuples(&members, op.arity(), |tup| {
            let r = alg.eval(k, tup);
            let mapped: Vec<ElementId> = tup.iter().map(|a| map.get(*a).unwrap()).collect();
            map.get(r) == Some(alg.eval(k, &mapped))
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Violations of the defining equation for `map` as a candidate between the
/// complements at positions `i <= j`, up to `max` entries. Empty output means
/// the map is a Płonka homomorphism. The map must already be a plain
/// homomorphism between the complements.
pub fn p_hom_violations(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    frame: &Frame,
    i: usize,
    j: usize,
    map: &ElementMap,
    max: usize,
) -> Result<Vec<PHomViolation>> {
    require_comparable(fam, frame, i, j)?;
    if i == j {
        return if map.is_identity() && map.source() == frame.complement(i) {
            Ok(Vec::new())
        } else {
            Ok(vec![PHomViolation {
                op: 0,
                args: Vec::new(),
                result: 0,
                mapped: 0,
            }])
        };
    }
    if !is_homomorphism_between(alg, frame.complement(i), frame.complement(j), map) {
        return Err(Error::input(format!(
            "map {} is not a homomorphism from {} to {}",
            map.format_with(alg, alg),
            alg.format_set(frame.complement(i)),
            alg.format_set(frame.complement(j))
        )));
    }

    let upward = frame.upward_complement_union(fam, j);
    let ext = map.extend(alg.size());
    let all: Vec<ElementId> = (0..alg.size()).collect();
    let mut violations = Vec::new();
    for (k, op) in alg.operations().iter().enumerate() {
        scan_tuples(&all, op.arity(), |tup| {
            let r = alg.eval(k, tup);
            if upward.contains(r) {
                let mapped_args: Vec<ElementId> = tup.iter().map(|a| ext[*a]).collect();
                let mapped = alg.eval(k, &mapped_args);
                if mapped != r {
                    violations.push(PHomViolation {
                        op: k,
                        args: tup.to_vec(),
                        result: r,
                        mapped,
                    });
                }
            }
            violations.len() < max
        });
        if violations.len() >= max {
            break;
        }
    }
    Ok(violations)
}

/// Decides the Płonka homomorphism condition for a plain homomorphism
/// between the complements at `i <= j`. Identity is required when `i = j`.
pub fn is_p_homomorphism(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    frame: &Frame,
    i: usize,
    j: usize,
    map: &ElementMap,
) -> Result<bool> {
    Ok(p_hom_violations(alg, fam, frame, i, j, map, 1)?.is_empty())
}

/// All Płonka homomorphisms between the complements at `i <= j`, in canonical
/// (map-lexicographic) order. An empty answer is meaningful: it rules the
/// frame out.
pub fn enumerate_phoms(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    frame: &Frame,
    i: usize,
    j: usize,
) -> Result<Vec<PHom>> {
    require_comparable(fam, frame, i, j)?;
    if i == j {
        return Ok(vec![PHom {
            src: i,
            dst: i,
            map: ElementMap::identity(frame.complement(i)),
            verified: true,
        }]);
    }
    let homs = crate::algebra::enumerate_homomorphisms_within(
        alg,
        frame.complement(i),
        frame.complement(j),
    )?;
    let mut out = Vec::new();
    for map in homs {
        if p_hom_violations(alg, fam, frame, i, j, &map, 1)?.is_empty() {
            out.push(PHom {
                src: i,
                dst: j,
                map,
                verified: true,
            });
        }
    }
    Ok(out)
}

/// Composition of Płonka homomorphisms along `first.dst = second.src`. The
/// composite is guaranteed to be a Płonka homomorphism again; it is
/// re-verified and a failure is a defect.
pub fn compose_phoms(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    frame: &Frame,
    first: &PHom,
    second: &PHom,
) -> Result<PHom> {
    if first.dst != second.src {
        return Err(Error::input(format!(
            "cannot compose: first map ends at position {} but second starts at {}",
            first.dst, second.src
        )));
    }
    let map = first.map.compose(&second.map)?;
    let ok = is_p_homomorphism(alg, fam, frame, first.src, second.dst, &map)
        .expect("composite of homomorphisms is a homomorphism");
    assert!(
        ok,
        "composite of Płonka homomorphisms failed the Płonka condition: {}",
        map.format_with(alg, alg)
    );
    Ok(PHom {
        src: first.src,
        dst: second.dst,
        map,
        verified: true,
    })
}

/// Upward-closure property of complement unions: any tuple touching the
/// union of complements at positions >= i lands back in that union.
pub fn upward_union_is_absorbing(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    frame: &Frame,
    i: usize,
) -> bool {
    let upward = frame.upward_complement_union(fam, i);
    let all: Vec<ElementId> = (0..alg.size()).collect();
    for (k, op) in alg.operations().iter().enumerate() {
        let ok = scan_tuples(&all, op.arity(), |tup| {
            if tup.iter().any(|a| upward.contains(*a)) {
                upward.contains(alg.eval(k, tup))
            } else {
                true
            }
        });
        if !ok {
            return false;
        }
    }
    true
}
