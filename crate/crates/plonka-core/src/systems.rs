//! Sound sets of Płonka homomorphisms, direct systems, the sum construction,
//! and the end-to-end decomposition driver.

use std::collections::BTreeMap;

use crate::algebra::{scan_tuples, ElemSet, ElementId, ElementMap, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::frames::{enumerate_frames, Frame};
use crate::isolation::{all_isolated, is_isolated, IsolatedFamily};
use crate::phom::{enumerate_phoms, is_p_homomorphism, PHomViolation};
use crate::Limits;

// ---------------------------------------------------------------------------
// index semilattices
// ---------------------------------------------------------------------------

/// A finite join-semilattice of indices: a partial order in which every pair
/// has a least upper bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semilattice {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
}

impl Semilattice {
    /// Builds from a set of order pairs; the reflexive-transitive closure is
    /// taken first, then antisymmetry and join existence are checked.
    pub fn new(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let k = names.len();
        if k == 0 {
            return Err(Error::input("index set must be non-empty".to_string()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::input(format!("duplicate index name '{n}'")));
            }
        }
        let mut leq = vec![vec![false; k]; k];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in pairs {
            if i >= k || j >= k {
                return Err(Error::input(format!("order pair ({i}, {j}) out of range")));
            }
            leq[i][j] = true;
        }
        // transitive closure
        for m in 0..k {
            for i in 0..k {
                for j in 0..k {
                    if leq[i][m] && leq[m][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        Self::from_leq(names, leq)
    }

    /// Builds from a complete relation matrix (already reflexive/transitive).
    pub fn from_leq(names: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let k = names.len();
        for i in 0..k {
            for j in 0..k {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::input(format!(
                        "index order is not antisymmetric: '{}' and '{}' are mutually below each other",
                        names[i], names[j]
                    )));
                }
            }
        }
        let mut join = vec![vec![0usize; k]; k];
        for i in 0..k {
            for j in 0..k {
                let ubs: Vec<usize> = (0..k).filter(|&u| leq[i][u] && leq[j][u]).collect();
                let least = ubs
                    .iter()
                    .copied()
                    .find(|&u| ubs.iter().all(|&v| leq[u][v]));
                match least {
                    Some(u) => join[i][j] = u,
                    None => {
                        return Err(Error::input(format!(
                            "index order is not a join-semilattice: '{}' and '{}' have no least upper bound",
                            names[i], names[j]
                        )))
                    }
                }
            }
        }
        Ok(Semilattice { names, leq, join })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    /// Hasse covering pairs.
    pub fn covering(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if self.lt(i, j) && !(0..k).any(|m| self.lt(i, m) && self.lt(m, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// direct systems
// ---------------------------------------------------------------------------

/// A direct system: a join-semilattice of indices, pairwise disjoint similar
/// component algebras, and a composition-coherent family of homomorphisms
/// along the order. Validated on construction; hom maps use component-local
/// element ids.
#[derive(Clone, Debug)]
pub struct DirectSystem {
    name: String,
    indices: Semilattice,
    components: Vec<FiniteAlgebra>,
    homs: BTreeMap<(usize, usize), ElementMap>,
}

impl DirectSystem {
    pub fn new(
        name: impl Into<String>,
        indices: Semilattice,
        components: Vec<FiniteAlgebra>,
        mut homs: BTreeMap<(usize, usize), ElementMap>,
    ) -> Result<Self> {
        let name = name.into();
        let k = indices.len();
        if components.len() != k {
            return Err(Error::input(format!(
                "system '{name}': {} components for {k} indices",
                components.len()
            )));
        }
        // similarity
        for c in &components[1..] {
            if !components[0].is_similar_to(c) {
                return Err(Error::input(format!(
                    "system '{name}': components '{}' and '{}' are not similar (signatures differ)",
                    components[0].name(),
                    c.name()
                )));
            }
        }
        // disjoint universes, by element name
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, c) in components.iter().enumerate() {
            for e in c.element_names() {
                if let Some(prev) = seen.insert(e, i) {
                    return Err(Error::input(format!(
                        "system '{name}': component universes are not disjoint: element '{e}' \
                         appears under indices '{}' and '{}'",
                        indices.name(prev),
                        indices.name(i)
                    )));
                }
            }
        }
        // diagonal entries, when present, must be identities
        for (i, component) in components.iter().enumerate() {
            if let Some(m) = homs.remove(&(i, i)) {
                if !m.is_identity() || m.source() != component.universe() {
                    return Err(Error::input(format!(
                        "system '{name}': the homomorphism at index '{}' to itself must be the identity",
                        indices.name(i)
                    )));
                }
            }
        }
        // exactly the comparable pairs carry maps, and each is a homomorphism
        for (&(i, j), map) in &homs {
            if i >= k || j >= k || !indices.lt(i, j) {
                return Err(Error::input(format!(
                    "system '{name}': homomorphism given for a pair that is not ordered: \
                     '{}' to '{}'",
                    indices.name(i.min(k - 1)),
                    indices.name(j.min(k - 1))
                )));
            }
            if map.source() != components[i].universe() {
                return Err(Error::input(format!(
                    "system '{name}': homomorphism for '{}' <= '{}' is not total on its source",
                    indices.name(i),
                    indices.name(j)
                )));
            }
            if !map.image().is_subset_of(components[j].universe()) {
                return Err(Error::input(format!(
                    "system '{name}': homomorphism for '{}' <= '{}' maps outside its target",
                    indices.name(i),
                    indices.name(j)
                )));
            }
            if !hom_commutes(&components[i], &components[j], map) {
                return Err(Error::input(format!(
                    "system '{name}': map for '{}' <= '{}' is not a homomorphism",
                    indices.name(i),
                    indices.name(j)
                )));
            }
        }
        for i in 0..k {
            for j in 0..k {
                if indices.lt(i, j) && !homs.contains_key(&(i, j)) {
                    return Err(Error::input(format!(
                        "system '{name}': missing homomorphism for '{}' <= '{}'",
                        indices.name(i),
                        indices.name(j)
                    )));
                }
            }
        }
        // composition coherence
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if indices.lt(i, j) && indices.lt(j, l) {
                        let left = homs[&(i, j)].compose(&homs[&(j, l)]).expect("images nest");
                        if left != homs[&(i, l)] {
                            return Err(Error::input(format!(
                                "system '{name}': homomorphisms do not compose: \
                                 phi['{j_}','{l_}'] o phi['{i_}','{j_}'] differs from phi['{i_}','{l_}']",
                                i_ = indices.name(i),
                                j_ = indices.name(j),
                                l_ = indices.name(l)
                            )));
                        }
                    }
                }
            }
        }
        Ok(DirectSystem {
            name,
            indices,
            components,
            homs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn indices(&self) -> &Semilattice {
        &self.indices
    }

    pub fn components(&self) -> &[FiniteAlgebra] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &FiniteAlgebra {
        &self.components[i]
    }

    /// The map for `i <= j`; the identity when `i = j`.
    pub fn hom(&self, i: usize, j: usize) -> ElementMap {
        if i == j {
            ElementMap::identity(self.components[i].universe())
        } else {
            self.homs[&(i, j)].clone()
        }
    }

    pub fn homs(&self) -> &BTreeMap<(usize, usize), ElementMap> {
        &self.homs
    }

    pub fn is_trivial(&self) -> bool {
        self.indices.len() < 2
    }
}

fn hom_commutes(src: &FiniteAlgebra, dst: &FiniteAlgebra, map: &ElementMap) -> bool {
    let members: Vec<ElementId> = (0..src.size()).collect();
    for (k, op) in src.operations().iter().enumerate() {
        let ok = scan_tuples(&members, op.arity(), |tup| {
            let mapped: Vec<ElementId> = tup.iter().map(|a| map.get(*a).unwrap()).collect();
            map.get(src.eval(k, tup)) == Some(dst.eval(k, &mapped))
        });
        if !ok {
            return false;
        }
    }
    true
}

/// The Płonka sum of a validated direct system: the algebra on the disjoint
/// union whose operations route every argument through the homomorphism into
/// the component at the join of the arguments' indices.
///
/// Universe order: components in index order, elements in component order.
pub fn plonka_sum(sys: &DirectSystem) -> FiniteAlgebra {
    let k = sys.indices.len();
    let mut offsets = Vec::with_capacity(k);
    let mut elements = Vec::new();
    let mut comp_of = Vec::new();
    let mut local_of = Vec::new();
    for (i, c) in sys.components.iter().enumerate() {
        offsets.push(elements.len());
        for (l, e) in c.element_names().iter().enumerate() {
            elements.push(e.clone());
            comp_of.push(i);
            local_of.push(l);
        }
    }
    let n = elements.len();
    let all: Vec<ElementId> = (0..n).collect();
    let mut operations = Vec::new();
    for (op_idx, op) in sys.components[0].operations().iter().enumerate() {
        let mut table = Vec::with_capacity(n.pow(op.arity() as u32));
        scan_tuples(&all, op.arity(), |tup| {
            let mut m = comp_of[tup[0]];
            for &a in &tup[1..] {
                m = sys.indices.join(m, comp_of[a]);
            }
            let locals: Vec<ElementId> = tup
                .iter()
                .map(|&a| {
                    sys.hom(comp_of[a], m)
                        .get(local_of[a])
                        .expect("hom total on its source")
                })
                .collect();
            let r = sys.components[m].eval(op_idx, &locals);
            table.push(offsets[m] + r);
            true
        });
        operations.push(
            crate::algebra::Operation::new(op.name(), op.arity(), n, table)
                .expect("constructed table is total and closed"),
        );
    }
    FiniteAlgebra::new(sys.name.clone(), elements, operations)
        .expect("component names are distinct")
}

/// True iff the sum of the system has the same tables as `original`,
/// element names matched up.
pub fn verify_reconstruction(original: &FiniteAlgebra, sys: &DirectSystem) -> bool {
    plonka_sum(sys).same_tables(original)
}

// ---------------------------------------------------------------------------
// sound sets
// ---------------------------------------------------------------------------

/// One Płonka homomorphism per comparable pair of a frame (positions),
/// identities on the diagonal, chain composites path-independent. Maps are in
/// ambient element ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundHomSet {
    homs: BTreeMap<(usize, usize), ElementMap>,
}

impl SoundHomSet {
    pub fn hom(&self, i: usize, j: usize) -> &ElementMap {
        &self.homs[&(i, j)]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(usize, usize), &ElementMap)> {
        self.homs.iter()
    }
}

/// Why a frame admits no sound set.
#[derive(Clone, Debug)]
pub enum Obstruction {
    /// A covering pair with no Płonka homomorphism at all. When plain
    /// homomorphisms exist, one is kept with the equation instances it
    /// violates.
    NoPHom {
        src: usize,
        dst: usize,
        plain_homs: usize,
        rejected: Option<(ElementMap, Vec<PHomViolation>)>,
    },
    /// Every choice of covering maps produced disagreeing chain composites
    /// somewhere; one witness pair is kept.
    PathDependence { src: usize, dst: usize },
}

/// Search result for one frame.
#[derive(Clone, Debug, Default)]
pub struct SoundSearch {
    pub sound_sets: Vec<SoundHomSet>,
    pub obstructions: Vec<Obstruction>,
}

fn covering_chains(fam: &IsolatedFamily, frame: &Frame, i: usize, j: usize) -> Vec<Vec<usize>> {
    let mut chains = Vec::new();
    let mut path = vec![i];
    fn dfs(
        fam: &IsolatedFamily,
        frame: &Frame,
        j: usize,
        path: &mut Vec<usize>,
        chains: &mut Vec<Vec<usize>>,
    ) {
        let last = *path.last().unwrap();
        if last == j {
            chains.push(path.clone());
            return;
        }
        for &(a, b) in frame.covering() {
            if a == last && frame.leq(fam, b, j) {
                path.push(b);
                dfs(fam, frame, j, path, chains);
                path.pop();
            }
        }
    }
    dfs(fam, frame, j, &mut path, &mut chains);
    chains
}

/// All sound sets over a frame: every assignment of one Płonka homomorphism
/// per covering pair whose chain composites are path-independent, extended to
/// the full comparable-pair family. Canonical order is lexicographic over the
/// covering-pair assignment.
pub fn search_sound_sets(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    frame: &Frame,
) -> Result<SoundSearch> {
    let mut search = SoundSearch::default();
    let covering = frame.covering().to_vec();

    let mut options: Vec<Vec<ElementMap>> = Vec::with_capacity(covering.len());
    for &(i, j) in &covering {
        let phoms = enumerate_phoms(alg, fam, frame, i, j)?;
        if phoms.is_empty() {
            let plain = crate::algebra::enumerate_homomorphisms_within(
                alg,
                frame.complement(i),
                frame.complement(j),
            )?;
            let rejected = plain.first().map(|map| {
                let violations = crate::phom::p_hom_violations(alg, fam, frame, i, j, map, 8)
                    .expect("enumerated map is a homomorphism");
                (map.clone(), violations)
            });
            search.obstructions.push(Obstruction::NoPHom {
                src: i,
                dst: j,
                plain_homs: plain.len(),
                rejected,
            });
        }
        options.push(phoms.into_iter().map(|p| p.map).collect());
    }
    if !search.obstructions.is_empty() {
        return Ok(search);
    }

    // comparable pairs and their covering chains, computed once
    type PairChains = Vec<((usize, usize), Vec<Vec<usize>>)>;
    let mut comparable: PairChains = Vec::new();
    for i in 0..frame.len() {
        for j in 0..frame.len() {
            if frame.lt(fam, i, j) {
                let chains = covering_chains(fam, frame, i, j);
                debug_assert!(!chains.is_empty());
                comparable.push(((i, j), chains));
            }
        }
    }

    let mut pick = vec![0usize; covering.len()];
    let mut dependence_witness: Option<(usize, usize)> = None;
    'assignments: loop {
        let assignment: BTreeMap<(usize, usize), &ElementMap> = covering
            .iter()
            .enumerate()
            .map(|(k, pair)| (*pair, &options[k][pick[k]]))
            .collect();

        let mut full: BTreeMap<(usize, usize), ElementMap> = BTreeMap::new();
        for i in 0..frame.len() {
            full.insert((i, i), ElementMap::identity(frame.complement(i)));
        }
        let mut coherent = true;
        for ((i, j), chains) in &comparable {
            let mut composite: Option<ElementMap> = None;
            for chain in chains {
                let mut acc = ElementMap::identity(frame.complement(*i));
                for w in chain.windows(2) {
                    acc = acc.compose(assignment[&(w[0], w[1])]).expect("images nest");
                }
                match &composite {
                    None => composite = Some(acc),
                    Some(prev) if *prev != acc => {
                        coherent = false;
                        if dependence_witness.is_none() {
                            dependence_witness = Some((*i, *j));
                        }
                        break;
                    }
                    Some(_) => {}
                }
            }
            if !coherent {
                break;
            }
            let map = composite.expect("at least one chain");
            // composites of Płonka homomorphisms stay Płonka homomorphisms
            assert!(
                is_p_homomorphism(alg, fam, frame, *i, *j, &map)
                    .expect("composite is a homomorphism"),
                "chain composite failed the Płonka condition"
            );
            full.insert((*i, *j), map);
        }
        if coherent {
            search.sound_sets.push(SoundHomSet { homs: full });
        }

        // odometer, last pair fastest
        let mut pos = covering.len();
        loop {
            if pos == 0 {
                break 'assignments;
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < options[pos].len() {
                break;
            }
            pick[pos] = 0;
        }
    }

    if search.sound_sets.is_empty() {
        if let Some((i, j)) = dependence_witness {
            search
                .obstructions
                .push(Obstruction::PathDependence { src: i, dst: j });
        }
    }
    Ok(search)
}

/// Builds the direct system of a frame and a sound set: complement algebras
/// as components, the frame order as index semilattice, the sound maps
/// translated to component-local ids. The result always satisfies the direct
/// system conditions; a failure is a defect.
pub fn assemble(
    alg: &FiniteAlgebra,
    fam: &IsolatedFamily,
    frame: &Frame,
    sound: &SoundHomSet,
) -> DirectSystem {
    assert!(frame.len() >= 2, "assembly requires a non-trivial frame");
    let k = frame.len();
    let names: Vec<String> = frame
        .members()
        .iter()
        .map(|m| format!("I{}", m + 1))
        .collect();
    let mut leq = vec![vec![false; k]; k];
    for (i, row) in leq.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = frame.leq(fam, i, j);
        }
    }
    let indices = Semilattice::from_leq(names, leq).expect("frame order is a join-semilattice");

    let components: Vec<FiniteAlgebra> = (0..k)
        .map(|i| {
            alg.restrict(frame.complement(i), format!("C{}", i + 1))
                .expect("complements are closed")
        })
        .collect();

    let locals: Vec<Vec<ElementId>> = (0..k)
        .map(|i| frame.complement(i).iter().collect())
        .collect();
    let mut homs = BTreeMap::new();
    for (&(i, j), map) in sound.pairs() {
        if i == j {
            continue;
        }
        let entries: Vec<(ElementId, ElementId)> = map
            .entries()
            .iter()
            .map(|(a, b)| {
                let la = locals[i].iter().position(|x| x == a).unwrap();
                let lb = locals[j].iter().position(|x| x == b).unwrap();
                (la, lb)
            })
            .collect();
        homs.insert((i, j), ElementMap::new(entries).expect("distinct sources"));
    }
    DirectSystem::new(alg.name(), indices, components, homs)
        .expect("a frame with a sound set is a direct system")
}

// ---------------------------------------------------------------------------
// decomposition driver
// ---------------------------------------------------------------------------

/// Per-frame outcome inside a decomposition.
#[derive(Clone, Debug)]
pub struct FrameAnalysis {
    pub frame: Frame,
    pub sound_sets: Vec<SoundHomSet>,
    pub obstructions: Vec<Obstruction>,
}

/// One assembled and reconstruction-checked system.
#[derive(Clone, Debug)]
pub struct SystemEntry {
    pub frame_index: usize,
    pub sound_index: usize,
    pub system: DirectSystem,
    pub reconstruction_verified: bool,
}

/// Everything the decomposition finds: the family, every frame with its
/// sound sets or obstructions, every assembled system, and the verdict.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub family: IsolatedFamily,
    pub frames: Vec<FrameAnalysis>,
    pub systems: Vec<SystemEntry>,
    pub verdict: bool,
}

/// Runs the pipeline: isolated family, frames, sound-set search, assembly,
/// reconstruction check. The verdict is true iff some non-trivial system
/// exists.
pub fn decompose(alg: &FiniteAlgebra, limits: &Limits) -> Result<Decomposition> {
    let family = all_isolated(alg, limits)?;
    let frames = enumerate_frames(alg, &family, limits)?;
    let mut analyses = Vec::with_capacity(frames.len());
    let mut systems = Vec::new();
    for (frame_index, frame) in frames.into_iter().enumerate() {
        let search = search_sound_sets(alg, &family, &frame)?;
        for (sound_index, sound) in search.sound_sets.iter().enumerate() {
            let system = assemble(alg, &family, &frame, sound);
            let reconstruction_verified = verify_reconstruction(alg, &system);
            assert!(
                reconstruction_verified,
                "assembled system failed to reconstruct '{}' (frame {})",
                alg.name(),
                frame_index
            );
            systems.push(SystemEntry {
                frame_index,
                sound_index,
                system,
                reconstruction_verified,
            });
        }
        analyses.push(FrameAnalysis {
            frame,
            sound_sets: search.sound_sets,
            obstructions: search.obstructions,
        });
    }
    let verdict = !systems.is_empty();
    Ok(Decomposition {
        family,
        frames: analyses,
        systems,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// structural checks shared by the test suites
// ---------------------------------------------------------------------------

/// Checks the structural facts every direct system must satisfy against an
/// ambient algebra equal to its sum: the unions of components below each
/// index are closed and isolated, ordered exactly like the indices, their
/// images in the isolated family contain the top and are closed under
/// realized intersections, and every system map satisfies the Płonka
/// condition on the sum. Returns the first failure as text.
pub fn check_system_facts(
    amb: &FiniteAlgebra,
    sys: &DirectSystem,
    limits: &Limits,
) -> std::result::Result<(), String> {
    let k = sys.indices().len();
    let comp_sets: Vec<ElemSet> = sys
        .components()
        .iter()
        .map(|c| {
            c.element_names()
                .iter()
                .map(|e| {
                    amb.element_id(e)
                        .ok_or_else(|| format!("element '{e}' missing from the ambient algebra"))
                })
                .collect::<std::result::Result<ElemSet, String>>()
        })
        .collect::<std::result::Result<_, _>>()?;
    let up_sets: Vec<ElemSet> = (0..k)
        .map(|i| {
            let mut acc = ElemSet::EMPTY;
            for (j, comp) in comp_sets.iter().enumerate() {
                if sys.indices().leq(j, i) {
                    acc = acc.union(*comp);
                }
            }
            acc
        })
        .collect();

    for (i, up) in up_sets.iter().enumerate() {
        if !amb.is_closed(*up).map_err(|e| e.to_string())? {
            return Err(format!("lower union at index {i} is not closed"));
        }
        if !is_isolated(amb, *up).map_err(|e| e.to_string())? {
            return Err(format!("lower union at index {i} is not isolated"));
        }
    }
    if !up_sets.iter().any(|up| *up == amb.universe()) {
        return Err("no lower union covers the whole universe".to_string());
    }
    for i in 0..k {
        for j in 0..k {
            if up_sets[i].is_subset_of(up_sets[j]) != sys.indices().leq(i, j) {
                return Err(format!(
                    "lower-union inclusion disagrees with the index order at ({i}, {j})"
                ));
            }
            if (!comp_sets[i].intersect(up_sets[j]).is_empty()) != sys.indices().leq(i, j) {
                return Err(format!(
                    "component/lower-union intersection disagrees with the order at ({i}, {j})"
                ));
            }
            if (up_sets[i] == up_sets[j]) != (i == j) {
                return Err(format!("lower unions at {i} and {j} coincide"));
            }
        }
    }
    // meet closure over every subset of indices
    for bits in 1u64..(1 << k) {
        if bits.count_ones() < 2 {
            continue;
        }
        let mut acc = amb.universe();
        for (i, up) in up_sets.iter().enumerate() {
            if bits >> i & 1 == 1 {
                acc = acc.intersect(*up);
            }
        }
        if !acc.is_empty() && !up_sets.contains(&acc) {
            return Err("an intersection of lower unions is not itself a lower union".to_string());
        }
    }
    // the lower unions embed as a frame of the ambient isolated family
    let fam = all_isolated(amb, limits).map_err(|e| e.to_string())?;
    let mut image: Vec<usize> = Vec::with_capacity(k);
    for (i, set) in up_sets.iter().enumerate() {
        match fam.index_of(*set) {
            Some(idx) => image.push(idx),
            None => {
                return Err(format!(
                    "lower union at index {i} is not in the isolated family"
                ))
            }
        }
    }
    let mut distinct = image.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != k {
        return Err("the lower-union map is not injective".to_string());
    }
    for i in 0..k {
        for j in 0..k {
            if sys.indices().leq(i, j) != fam.leq(image[i], image[j]) {
                return Err("the lower-union map does not preserve the order".to_string());
            }
        }
    }
    if k >= 2 {
        // The image carries the top and is closed under realized
        // intersections. Closure under the family join can genuinely fail:
        // the sum may own isolated subsets strictly between a union of lower
        // unions and the lower union at the join index, so only the
        // within-image least upper bounds (given by the order isomorphism
        // checked above) are guaranteed.
        if !distinct.contains(&fam.top()) {
            return Err("the lower-union image misses the family top".to_string());
        }
        for &i in &distinct {
            for &j in &distinct {
                if let Some(m) = fam.meet(&[i, j]) {
                    if !distinct.contains(&m) {
                        return Err(
                            "the lower-union image is not closed under realized intersections"
                                .to_string(),
                        );
                    }
                }
            }
        }
    }
    // every homomorphism of the system qualifies against the sum: extending
    // it by the identity preserves each operation value that lands in a
    // component at or above the target index
    for (&(i, j), map) in sys.homs() {
        let mut upward = ElemSet::EMPTY;
        for (l, comp) in comp_sets.iter().enumerate() {
            if sys.indices().leq(j, l) {
                upward = upward.union(*comp);
            }
        }
        let mut ext: Vec<ElementId> = (0..amb.size()).collect();
        for &(a, b) in map.entries() {
            let src = amb
                .element_id(sys.components()[i].element_name(a))
                .expect("checked above");
            let dst = amb
                .element_id(sys.components()[j].element_name(b))
                .expect("checked above");
            ext[src] = dst;
        }
        let all: Vec<ElementId> = (0..amb.size()).collect();
        for (op_idx, op) in amb.operations().iter().enumerate() {
            let ok = scan_tuples(&all, op.arity(), |tup| {
                let r = amb.eval(op_idx, tup);
                if upward.contains(r) {
                    let mapped: Vec<ElementId> = tup.iter().map(|a| ext[*a]).collect();
                    amb.eval(op_idx, &mapped) == r
                } else {
                    true
                }
            });
            if !ok {
                return Err(format!(
                    "the system map for ({i}, {j}) fails the sum-compatibility condition"
                ));
            }
        }
    }
    Ok(())
}
