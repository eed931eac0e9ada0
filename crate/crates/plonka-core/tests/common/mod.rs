//! Shared fixtures and random generators for the integration suites.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use plonka_core::algebra::{enumerate_homomorphisms, ElementMap};
use plonka_core::format::parse_algebra;
use plonka_core::systems::{DirectSystem, Semilattice};
use plonka_core::{FiniteAlgebra, Operation};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load(name: &str) -> FiniteAlgebra {
    let path = fixture_path(&format!("{name}.alg"));
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    parse_algebra(&text).unwrap_or_else(|e| panic!("cannot parse {}: {e}", path.display()))
}

pub fn golden() -> Vec<FiniteAlgebra> {
    ["a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"]
        .iter()
        .map(|n| load(n))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random algebra with one binary operation (occasionally also a unary
/// one) on up to `max_n` elements. Tables are drawn from a mix of uniform
/// noise and structured shapes so that subalgebras actually occur.
pub fn random_algebra(rng: &mut ChaCha8Rng, max_n: usize) -> FiniteAlgebra {
    let n = rng.gen_range(1..=max_n);
    let elements: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut ops = vec![Operation::new("f", 2, n, random_binary_table(rng, n)).unwrap()];
    if rng.gen_bool(0.3) {
        let table: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        ops.push(Operation::new("u", 1, n, table).unwrap());
    }
    FiniteAlgebra::new(format!("R{n}"), elements, ops).unwrap()
}

fn random_binary_table(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    match rng.gen_range(0..4u8) {
        // uniform noise
        0 | 1 => (0..n * n).map(|_| rng.gen_range(0..n)).collect(),
        // left projection
        2 => {
            let mut t = Vec::with_capacity(n * n);
            for a in 0..n {
                for _ in 0..n {
                    t.push(a);
                }
            }
            t
        }
        // max along the element order
        _ => {
            let mut t = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    t.push(a.max(b));
                }
            }
            t
        }
    }
}

fn random_semilattice(rng: &mut ChaCha8Rng, max_indices: usize) -> Option<Semilattice> {
    let k = rng.gen_range(2..=max_indices.max(2));
    let names: Vec<String> = (0..k).map(|i| format!("i{i}")).collect();
    for _ in 0..64 {
        let mut pairs = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                if rng.gen_bool(0.45) {
                    pairs.push((i, j));
                }
            }
        }
        if let Ok(s) = Semilattice::new(names.clone(), &pairs) {
            return Some(s);
        }
    }
    None
}

/// One attempt at a random valid direct system: random semilattice, random
/// similar components with disjoint universes, covering maps drawn from the
/// enumerated homomorphisms, completed along chains and kept only when the
/// composites agree.
fn try_random_direct_system(
    rng: &mut ChaCha8Rng,
    max_indices: usize,
    max_component: usize,
) -> Option<DirectSystem> {
    let indices = random_semilattice(rng, max_indices)?;
    let k = indices.len();
    let with_unary = rng.gen_bool(0.2);

    let mut components = Vec::with_capacity(k);
    let mut next_name = 0usize;
    for i in 0..k {
        let n = rng.gen_range(1..=max_component);
        let elements: Vec<String> = (0..n)
            .map(|_| {
                next_name += 1;
                format!("x{next_name}")
            })
            .collect();
        let mut ops = vec![Operation::new("f", 2, n, random_binary_table(rng, n)).unwrap()];
        if with_unary {
            let table: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            ops.push(Operation::new("u", 1, n, table).unwrap());
        }
        components.push(FiniteAlgebra::new(format!("c{i}"), elements, ops).unwrap());
    }

    // covering maps
    let covering = indices.covering();
    let mut chosen: BTreeMap<(usize, usize), ElementMap> = BTreeMap::new();
    for &(i, j) in &covering {
        let homs = enumerate_homomorphisms(
            &components[i],
            components[i].universe(),
            &components[j],
            components[j].universe(),
        )
        .unwrap();
        if homs.is_empty() {
            return None;
        }
        let pick = rng.gen_range(0..homs.len());
        chosen.insert((i, j), homs[pick].clone());
    }

    // composites along every covering chain must agree
    let mut homs: BTreeMap<(usize, usize), ElementMap> = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            if !indices.lt(i, j) {
                continue;
            }
            let mut composites = Vec::new();
            chain_composites(
                &indices,
                &covering,
                &chosen,
                &components,
                i,
                j,
                &mut composites,
            );
            let first = composites.first()?.clone();
            if composites.iter().any(|c| *c != first) {
                return None;
            }
            homs.insert((i, j), first);
        }
    }
    DirectSystem::new("random", indices, components, homs).ok()
}

fn chain_composites(
    indices: &Semilattice,
    covering: &[(usize, usize)],
    chosen: &BTreeMap<(usize, usize), ElementMap>,
    components: &[FiniteAlgebra],
    i: usize,
    j: usize,
    out: &mut Vec<ElementMap>,
) {
    fn dfs(
        indices: &Semilattice,
        covering: &[(usize, usize)],
        chosen: &BTreeMap<(usize, usize), ElementMap>,
        at: usize,
        j: usize,
        acc: ElementMap,
        out: &mut Vec<ElementMap>,
    ) {
        if at == j {
            out.push(acc);
            return;
        }
        for &(a, b) in covering {
            if a == at && indices.leq(b, j) {
                let next = acc.compose(&chosen[&(a, b)]).expect("images nest");
                dfs(indices, covering, chosen, b, j, next, out);
            }
        }
    }
    dfs(
        indices,
        covering,
        chosen,
        i,
        j,
        ElementMap::identity(components[i].universe()),
        out,
    );
}

/// Retries until a valid system appears; panics when the bound is hit so the
/// suite flags a generator regression instead of hanging.
pub fn random_direct_system(
    rng: &mut ChaCha8Rng,
    max_indices: usize,
    max_component: usize,
) -> DirectSystem {
    for _ in 0..5_000 {
        if let Some(sys) = try_random_direct_system(rng, max_indices, max_component) {
            return sys;
        }
    }
    panic!("no valid random direct system found within the retry bound");
}
